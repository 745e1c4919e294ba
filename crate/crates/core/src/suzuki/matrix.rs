use std::fmt;

use crate::field::{Fe, Field};

/// 4x4 matrix over GF(2^m), row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix4(pub [[Fe; 4]; 4]);

impl fmt::Debug for Matrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for row in &self.0 {
            writeln!(
                f,
                "  {:>6} {:>6} {:>6} {:>6}",
                row[0].0, row[1].0, row[2].0, row[3].0
            )?;
        }
        write!(f, "]")
    }
}

impl Matrix4 {
    pub const ZERO: Matrix4 = Matrix4([[Fe::ZERO; 4]; 4]);

    pub fn identity() -> Matrix4 {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = Fe::ONE;
        }
        m
    }

    /// Anti-diagonal permutation (1 4)(2 3).
    pub fn antidiagonal() -> Matrix4 {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][3 - i] = Fe::ONE;
        }
        m
    }

    pub fn diagonal(d: [Fe; 4]) -> Matrix4 {
        let mut m = Self::ZERO;
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = x;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.0[i][j]
    }

    pub fn mul(&self, field: &Field, rhs: &Matrix4) -> Matrix4 {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0u32;
                for k in 0..4 {
                    acc ^= field.mul(self.0[i][k], rhs.0[k][j]).0;
                }
                out.0[i][j] = Fe(acc);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix4 {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, field: &Field, c: Fe) -> Matrix4 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e = field.mul(*e, c);
            }
        }
        out
    }

    /// `A` with rows and columns reversed: `T A T` for the anti-diagonal `T`.
    #[inline]
    pub fn flip(&self) -> Matrix4 {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[3 - i][3 - j];
            }
        }
        out
    }

    /// `A T`: reverses the column order.
    #[inline]
    pub fn mul_antidiagonal(&self) -> Matrix4 {
        let mut out = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[i][3 - j];
            }
        }
        out
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..4).all(|i| (i + 1..4).all(|j| self.0[i][j].is_zero()))
    }

    pub fn trace(&self) -> Fe {
        Fe(self.0[0][0].0 ^ self.0[1][1].0 ^ self.0[2][2].0 ^ self.0[3][3].0)
    }

    /// Determinant by full expansion; signs vanish in characteristic 2.
    pub fn det(&self, field: &Field) -> Fe {
        let mut acc = 0u32;
        for p in PERMUTATIONS_4 {
            let mut t = Fe::ONE;
            for (i, &pi) in p.iter().enumerate() {
                t = field.mul(t, self.0[i][pi]);
            }
            acc ^= t.0;
        }
        Fe(acc)
    }

    /// Coefficients `(c1, c2, c3)` of `det(A + lambda) = lambda^4 + c1 lambda^3 +
    /// c2 lambda^2 + c3 lambda + det A`: sums of principal minors of size 1, 2, 3.
    pub fn charpoly_coeffs(&self, field: &Field) -> (Fe, Fe, Fe) {
        let a = &self.0;
        let c1 = self.trace();
        let mut c2 = 0u32;
        for i in 0..4 {
            for j in i + 1..4 {
                c2 ^= field.mul(a[i][i], a[j][j]).0 ^ field.mul(a[i][j], a[j][i]).0;
            }
        }
        let mut c3 = 0u32;
        for skip in 0..4 {
            let idx: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            c3 ^= minor3(field, a, [idx[0], idx[1], idx[2]]).0;
        }
        (c1, Fe(c2), Fe(c3))
    }

    /// Packs entries into a `u64` key; requires `16 * m <= 64`.
    pub(crate) fn pack(&self, m: u32) -> u64 {
        let mut key = 0u64;
        for row in &self.0 {
            for e in row {
                key = (key << m) | e.0 as u64;
            }
        }
        key
    }
}

fn minor3(field: &Field, a: &[[Fe; 4]; 4], r: [usize; 3]) -> Fe {
    const P3: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut acc = 0u32;
    for p in P3 {
        let t = field.mul(
            field.mul(a[r[0]][r[p[0]]], a[r[1]][r[p[1]]]),
            a[r[2]][r[p[2]]],
        );
        acc ^= t.0;
    }
    Fe(acc)
}

const PERMUTATIONS_4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];
