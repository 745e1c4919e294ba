//! The Suzuki group Sz(q), q = 2^(2n+1), as explicit 4x4 matrices.
//!
//! Every element has a unique canonical form, [`BruhatParams`]: either a
//! Borel element `U(α,β) D(γ)` or a big-cell element `U(α,β) D(γ) T U(α',β')`,
//! where `U(α,β) = u(α^θ, β^θ, α, β)` and `D(γ) = d(γ^θ, γ)`.
//! Equality and hashing of [`SuzukiElement`] use the parameters only.

mod index;
mod matrix;
mod subgroup;

use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_factors, Fe, Field};
use crate::group::Group;

pub use index::{GroupIndex, IndexMode, INDEX_MAGIC};
pub use matrix::Matrix4;
pub use subgroup::{Generation, SubfieldSubgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BruhatParams {
    /// `U(alpha, beta) D(gamma)`.
    Borel { alpha: Fe, beta: Fe, gamma: Fe },
    /// `U(alpha, beta) D(gamma) T U(alpha2, beta2)`.
    BigCell {
        alpha: Fe,
        beta: Fe,
        gamma: Fe,
        alpha2: Fe,
        beta2: Fe,
    },
}

impl BruhatParams {
    pub fn borel(alpha: Fe, beta: Fe, gamma: Fe) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::InvalidParameter("gamma must be nonzero".into()));
        }
        Ok(BruhatParams::Borel { alpha, beta, gamma })
    }

    pub fn big_cell(alpha: Fe, beta: Fe, gamma: Fe, alpha2: Fe, beta2: Fe) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::InvalidParameter("gamma must be nonzero".into()));
        }
        Ok(BruhatParams::BigCell {
            alpha,
            beta,
            gamma,
            alpha2,
            beta2,
        })
    }

    pub fn is_borel(&self) -> bool {
        matches!(self, BruhatParams::Borel { .. })
    }

    pub fn gamma(&self) -> Fe {
        match *self {
            BruhatParams::Borel { gamma, .. } | BruhatParams::BigCell { gamma, .. } => gamma,
        }
    }

    /// All field parameters in order (3 for Borel, 5 for the big cell).
    pub fn values(&self) -> Vec<Fe> {
        match *self {
            BruhatParams::Borel { alpha, beta, gamma } => vec![alpha, beta, gamma],
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            } => vec![alpha, beta, gamma, alpha2, beta2],
        }
    }

    pub fn map(&self, f: impl Fn(Fe) -> Fe) -> BruhatParams {
        match *self {
            BruhatParams::Borel { alpha, beta, gamma } => BruhatParams::Borel {
                alpha: f(alpha),
                beta: f(beta),
                gamma: f(gamma),
            },
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            } => BruhatParams::BigCell {
                alpha: f(alpha),
                beta: f(beta),
                gamma: f(gamma),
                alpha2: f(alpha2),
                beta2: f(beta2),
            },
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuzukiElement {
    matrix: Matrix4,
    params: BruhatParams,
}

impl PartialEq for SuzukiElement {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl Eq for SuzukiElement {}

impl Hash for SuzukiElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.params.hash(state)
    }
}

impl SuzukiElement {
    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn params(&self) -> &BruhatParams {
        &self.params
    }

    pub fn is_borel(&self) -> bool {
        self.params.is_borel()
    }
}

/// Closed-form orders, for q = 2^m with m odd.
pub fn group_order(q: u64) -> Result<u128> {
    let q = validate_q(q)? as u128;
    let q2 = q * q;
    q2.checked_mul(q2 + 1)
        .and_then(|x| x.checked_mul(q - 1))
        .ok_or_else(|| Error::Capacity {
            what: format!("|Sz({q})| overflows 128 bits"),
            limit: 1 << 25,
            hint: "use q <= 2^25",
        })
}

pub fn borel_order(q: u64) -> Result<u128> {
    let q = validate_q(q)? as u128;
    Ok(q * q * (q - 1))
}

fn validate_q(q: u64) -> Result<u64> {
    if !q.is_power_of_two() || q.trailing_zeros() % 2 == 0 || q.trailing_zeros() > 31 {
        return Err(Error::InvalidParameter(format!(
            "q = {q} is not 2^m with m odd and m <= 31"
        )));
    }
    Ok(q)
}

/// Sz(q) over a fixed field, with the group law of [`Group`].
#[derive(Clone, Debug)]
pub struct Suzuki {
    field: Field,
}

impl Suzuki {
    pub fn new(field: Field) -> Self {
        Suzuki { field }
    }

    pub fn with_degree(m: u32) -> Result<Self> {
        Ok(Self::new(Field::new(m)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn order(&self) -> u128 {
        group_order(self.q()).expect("field degree is odd")
    }

    pub fn u_matrix(&self, a: Fe, b: Fe, alpha: Fe, beta: Fe) -> Matrix4 {
        let f = &self.field;
        let o = Fe::ONE;
        let z = Fe::ZERO;
        let r2c0 = f.add(f.mul(alpha, a), beta);
        let r3c0 = f.add(f.add(f.mul(f.square(alpha), a), f.mul(alpha, beta)), b);
        Matrix4([
            [o, z, z, z],
            [alpha, o, z, z],
            [r2c0, a, o, z],
            [r3c0, beta, alpha, o],
        ])
    }

    pub fn d_matrix(&self, c: Fe, gamma: Fe) -> Result<Matrix4> {
        if c.is_zero() || gamma.is_zero() {
            return Err(Error::InvalidParameter(
                "d(c, gamma) needs c, gamma nonzero".into(),
            ));
        }
        Ok(self.d_unchecked(c, gamma))
    }

    fn d_unchecked(&self, c: Fe, gamma: Fe) -> Matrix4 {
        let f = &self.field;
        let cg = f.mul(c, gamma);
        Matrix4::diagonal([cg, gamma, f.inv_nonzero(gamma), f.inv_nonzero(cg)])
    }

    pub fn t_matrix(&self) -> Matrix4 {
        Matrix4::antidiagonal()
    }

    pub fn big_u(&self, alpha: Fe, beta: Fe) -> Matrix4 {
        let f = &self.field;
        self.u_matrix(f.theta(alpha), f.theta(beta), alpha, beta)
    }

    pub fn big_d(&self, gamma: Fe) -> Result<Matrix4> {
        self.d_matrix(self.field.theta(gamma), gamma)
    }

    /// `U(α,β) D(γ)` without validation (gamma nonzero).
    fn borel_matrix(&self, alpha: Fe, beta: Fe, gamma: Fe) -> Matrix4 {
        let d = self.d_unchecked(self.field.theta(gamma), gamma);
        // u D scales column j of u by D_jj.
        let mut m = self.big_u(alpha, beta);
        for row in m.0.iter_mut() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.field.mul(*e, d.0[j][j]);
            }
        }
        m
    }

    pub fn matrix_of(&self, p: &BruhatParams) -> Matrix4 {
        match *p {
            BruhatParams::Borel { alpha, beta, gamma } => self.borel_matrix(alpha, beta, gamma),
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            } => {
                let left = self.borel_matrix(alpha, beta, gamma).mul_antidiagonal();
                left.mul(&self.field, &self.big_u(alpha2, beta2))
            }
        }
    }

    pub fn assemble(&self, p: BruhatParams) -> SuzukiElement {
        debug_assert!(!p.gamma().is_zero());
        SuzukiElement {
            matrix: self.matrix_of(&p),
            params: p,
        }
    }

    /// Canonical parameters of `m`, or `None` if `m` is not in Sz(q).
    ///
    /// Shape dispatch: a nonzero top-right entry selects the big cell, whose
    /// right factor `U(α',β')` is read off the first row and peeled;
    /// otherwise the matrix must be lower triangular. The candidate is then
    /// reassembled and compared exactly, which enforces the twisted
    /// constraints, and the symplectic condition is checked.
    pub fn factorize(&self, m: &Matrix4) -> Option<BruhatParams> {
        let p = self.factorize_shape(m)?;
        if self.matrix_of(&p) != *m || !self.is_symplectic(m) {
            return None;
        }
        Some(p)
    }

    /// Parameters read off a matrix assumed to lie in Sz(q). No verification.
    pub(crate) fn factorize_shape(&self, m: &Matrix4) -> Option<BruhatParams> {
        let f = &self.field;
        let top_right = m.get(0, 3);
        if !top_right.is_zero() {
            // Row 0 of M is top_right * (row 3 of U').
            let inv = f.inv_nonzero(top_right);
            let alpha2 = f.mul(m.get(0, 2), inv);
            let beta2 = f.mul(m.get(0, 1), inv);
            let u2 = self.big_u(alpha2, beta2);
            let u2_inv = u2.transpose().flip();
            // M U'^-1 = L T, so L = (M U'^-1) T.
            let lower = m.mul(f, &u2_inv).mul_antidiagonal();
            match self.borel_shape(&lower)? {
                BruhatParams::Borel { alpha, beta, gamma } => Some(BruhatParams::BigCell {
                    alpha,
                    beta,
                    gamma,
                    alpha2,
                    beta2,
                }),
                BruhatParams::BigCell { .. } => None,
            }
        } else {
            if !m.is_lower_triangular() {
                return None;
            }
            self.borel_shape(m)
        }
    }

    fn borel_shape(&self, l: &Matrix4) -> Option<BruhatParams> {
        let f = &self.field;
        let l00 = l.get(0, 0);
        let gamma = l.get(1, 1);
        if l00.is_zero() || gamma.is_zero() {
            return None;
        }
        let alpha = f.mul(l.get(1, 0), f.inv_nonzero(l00));
        let beta = f.mul(l.get(3, 1), f.inv_nonzero(gamma));
        Some(BruhatParams::Borel { alpha, beta, gamma })
    }

    pub fn is_symplectic(&self, m: &Matrix4) -> bool {
        // M^T T M = T  <=>  M^T (T M) = T, and T M reverses rows.
        let f = &self.field;
        let mut tm = Matrix4::ZERO;
        for i in 0..4 {
            tm.0[i] = m.0[3 - i];
        }
        m.transpose().mul(f, &tm) == Matrix4::antidiagonal()
    }

    pub fn element(&self, m: &Matrix4) -> Result<SuzukiElement> {
        let params = self
            .factorize(m)
            .ok_or_else(|| Error::InvalidParameter("matrix is not in Sz(q)".into()))?;
        Ok(SuzukiElement { matrix: *m, params })
    }

    fn recanonicalize(&self, m: Matrix4) -> SuzukiElement {
        match self.factorize_shape(&m) {
            Some(params) => {
                debug_assert_eq!(self.matrix_of(&params), m, "closure violated");
                SuzukiElement { matrix: m, params }
            }
            None => panic!(
                "{}",
                Error::Inconsistent(format!("product left Sz(q): {m:?}"))
            ),
        }
    }

    /// Product with full membership verification of the result.
    pub fn try_multiply(&self, g: &SuzukiElement, h: &SuzukiElement) -> Result<SuzukiElement> {
        let m = g.matrix.mul(&self.field, &h.matrix);
        let params = self
            .factorize(&m)
            .ok_or_else(|| Error::Inconsistent(format!("product left Sz(q): {m:?}")))?;
        Ok(SuzukiElement { matrix: m, params })
    }

    pub fn multiply(&self, g: &SuzukiElement, h: &SuzukiElement) -> SuzukiElement {
        self.recanonicalize(g.matrix.mul(&self.field, &h.matrix))
    }

    /// `g^-1 = T g^T T`, valid for symplectic `g`.
    pub fn inverse(&self, g: &SuzukiElement) -> SuzukiElement {
        self.recanonicalize(g.matrix.transpose().flip())
    }

    /// `x^-1 g x`.
    pub fn conjugate(&self, g: &SuzukiElement, x: &SuzukiElement) -> SuzukiElement {
        self.multiply(&self.multiply(&self.inverse(x), g), x)
    }

    pub fn identity_element(&self) -> SuzukiElement {
        self.assemble(BruhatParams::Borel {
            alpha: Fe::ZERO,
            beta: Fe::ZERO,
            gamma: Fe::ONE,
        })
    }

    pub fn t_element(&self) -> SuzukiElement {
        self.assemble(BruhatParams::BigCell {
            alpha: Fe::ZERO,
            beta: Fe::ZERO,
            gamma: Fe::ONE,
            alpha2: Fe::ZERO,
            beta2: Fe::ZERO,
        })
    }

    pub fn charpoly_coeffs(&self, g: &SuzukiElement) -> (Fe, Fe, Fe) {
        g.matrix.charpoly_coeffs(&self.field)
    }

    /// Uniform element: the big cell is chosen with odds q^2 : 1 against the
    /// Borel subgroup, matching their cardinalities.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> SuzukiElement {
        let q = self.q();
        if rng.random_range(0..q * q + 1) == 0 {
            self.random_borel(rng)
        } else {
            self.random_big_cell(rng)
        }
    }

    pub fn random_borel<R: Rng + ?Sized>(&self, rng: &mut R) -> SuzukiElement {
        let f = &self.field;
        self.assemble(BruhatParams::Borel {
            alpha: f.random(rng),
            beta: f.random(rng),
            gamma: f.random_nonzero(rng),
        })
    }

    pub fn random_big_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> SuzukiElement {
        let f = &self.field;
        self.assemble(BruhatParams::BigCell {
            alpha: f.random(rng),
            beta: f.random(rng),
            gamma: f.random_nonzero(rng),
            alpha2: f.random(rng),
            beta2: f.random(rng),
        })
    }

    /// Raw matrix power.
    pub fn matrix_pow(&self, m: &Matrix4, mut e: u128) -> Matrix4 {
        let mut base = *m;
        let mut acc = Matrix4::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&self.field, &base);
            }
            base = base.mul(&self.field, &base);
            e >>= 1;
        }
        acc
    }

    /// Element order, by stripping prime factors from the group order.
    pub fn element_order(&self, g: &SuzukiElement) -> Result<u128> {
        if self.field.degree() > 21 {
            return Err(Error::Capacity {
                what: "element order needs factoring q^2+1".into(),
                limit: 21,
                hint: "use m <= 21",
            });
        }
        let q = self.q();
        let n = self.order();
        let mut primes = vec![2u64];
        primes.extend(prime_factors(q * q + 1));
        primes.extend(prime_factors(q - 1));
        primes.sort_unstable();
        primes.dedup();
        let id = Matrix4::identity();
        let mut d = n;
        for p in primes {
            let p = p as u128;
            while d % p == 0 && self.matrix_pow(&g.matrix, d / p) == id {
                d /= p;
            }
        }
        Ok(d)
    }

    /// All elements, Borel first then the big cell, each in parameter order.
    pub fn elements(&self) -> impl Iterator<Item = SuzukiElement> + '_ {
        let f = self.field.clone();
        let borel = {
            let f = f.clone();
            f.elements().flat_map(move |alpha| {
                let f = f.clone();
                f.elements().flat_map(move |beta| {
                    f.nonzero_elements().map(move |gamma| BruhatParams::Borel {
                        alpha,
                        beta,
                        gamma,
                    })
                })
            })
        };
        let big = {
            let f = f.clone();
            f.elements().flat_map(move |alpha| {
                let f = f.clone();
                f.elements().flat_map(move |beta| {
                    let f = f.clone();
                    f.nonzero_elements().flat_map(move |gamma| {
                        let f = f.clone();
                        f.elements().flat_map(move |alpha2| {
                            f.elements().map(move |beta2| BruhatParams::BigCell {
                                alpha,
                                beta,
                                gamma,
                                alpha2,
                                beta2,
                            })
                        })
                    })
                })
            })
        };
        borel.chain(big).map(move |p| self.assemble(p))
    }
}

impl Group for Suzuki {
    type Elem = SuzukiElement;

    fn identity(&self) -> SuzukiElement {
        self.identity_element()
    }

    fn mul(&self, x: &SuzukiElement, y: &SuzukiElement) -> SuzukiElement {
        self.multiply(x, y)
    }

    fn inv(&self, x: &SuzukiElement) -> SuzukiElement {
        self.inverse(x)
    }

    fn is_identity(&self, x: &SuzukiElement) -> bool {
        x.matrix == Matrix4::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn sz8() -> Suzuki {
        Suzuki::with_degree(3).unwrap()
    }

    #[test]
    fn displayed_matrices() {
        let g = sz8();
        let z = Fe::ZERO;
        assert_eq!(g.u_matrix(z, z, z, z), Matrix4::identity());
        assert_eq!(g.d_matrix(Fe::ONE, Fe::ONE).unwrap(), Matrix4::identity());
        assert!(g.d_matrix(Fe::ZERO, Fe::ONE).is_err());
        assert!(g.big_d(Fe::ZERO).is_err());
        let t = g.t_matrix();
        assert_eq!(t.mul(g.field(), &t), Matrix4::identity());
        assert_eq!(g.big_u(z, z), Matrix4::identity());
    }

    #[test]
    fn big_d_is_multiplicative() {
        let g = sz8();
        let f = g.field().clone();
        for x in f.nonzero_elements() {
            for y in f.nonzero_elements() {
                let lhs = g.big_d(x).unwrap().mul(&f, &g.big_d(y).unwrap());
                assert_eq!(lhs, g.big_d(f.mul(x, y)).unwrap());
            }
        }
    }

    #[test]
    fn unipotent_closure() {
        let g = sz8();
        let f = g.field().clone();
        for a in f.elements() {
            for b in f.elements() {
                let prod = g.big_u(a, Fe::ZERO).mul(&f, &g.big_u(Fe::ZERO, b));
                match g.factorize(&prod) {
                    Some(BruhatParams::Borel { gamma, .. }) => assert_eq!(gamma, Fe::ONE),
                    other => panic!("unexpected {other:?}"),
                }
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let g = sz8();
        let id = g.identity_element();
        assert_eq!(*id.matrix(), Matrix4::identity());
        assert_eq!(g.factorize(&Matrix4::identity()), Some(*id.params()));
        let t = g.t_element();
        assert_eq!(*t.matrix(), Matrix4::antidiagonal());
        assert_eq!(g.factorize(&Matrix4::antidiagonal()), Some(*t.params()));
        assert_eq!(g.multiply(&t, &t), id);
        // untwisted u(1, 0, 0, 0): a = 1 but alpha^theta = 0
        let untwisted = g.u_matrix(Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO);
        assert_eq!(g.factorize(&untwisted), None);
    }

    #[test]
    fn symplectic_examples() {
        let g = sz8();
        assert!(g.is_symplectic(&Matrix4::identity()));
        let m = Matrix4::diagonal([Fe(2), Fe::ONE, Fe::ONE, Fe::ONE]);
        assert!(!g.is_symplectic(&m));
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(8).unwrap(), 29120);
        assert_eq!(borel_order(8).unwrap(), 448);
        assert_eq!(group_order(2).unwrap(), 20);
        assert_eq!(group_order(32).unwrap(), 32_537_600);
        for q in [2u64, 8, 32, 128] {
            let n = group_order(q).unwrap();
            let b = borel_order(q).unwrap();
            assert_eq!(n % b, 0);
            assert_eq!(n / b, (q as u128) * (q as u128) + 1);
        }
        assert!(group_order(4).is_err());
        assert!(group_order(6).is_err());
    }

    #[test]
    fn identity_and_t_charpoly() {
        let g = sz8();
        let zero = (Fe::ZERO, Fe::ZERO, Fe::ZERO);
        assert_eq!(g.charpoly_coeffs(&g.t_element()), zero);
        assert_eq!(g.charpoly_coeffs(&g.identity_element()), zero);
    }

    #[test]
    fn group_axioms_on_samples() {
        let g = sz8();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let id = g.identity_element();
        for _ in 0..1000 {
            let x = g.random_element(&mut rng);
            let y = g.random_element(&mut rng);
            let z = g.random_element(&mut rng);
            assert_eq!(g.multiply(&x, &g.inverse(&x)), id);
            assert_eq!(
                g.multiply(&g.multiply(&x, &y), &z),
                g.multiply(&x, &g.multiply(&y, &z))
            );
            let c = g.conjugate(&x, &y);
            assert_eq!(g.charpoly_coeffs(&c), g.charpoly_coeffs(&x));
            assert_eq!(g.element_order(&c).unwrap(), g.element_order(&x).unwrap());
            assert_eq!(g.conjugate(&x, &id), x);
        }
    }

    #[test]
    fn sz8_enumeration_is_exhaustive_and_symplectic() {
        let g = sz8();
        let f = g.field().clone();
        let mut seen = HashSet::new();
        for e in g.elements() {
            assert!(g.is_symplectic(e.matrix()));
            assert_eq!(e.matrix().det(&f), Fe::ONE);
            assert_eq!(g.factorize(e.matrix()), Some(*e.params()));
            assert!(seen.insert(*e.matrix()));
        }
        assert_eq!(seen.len(), 29120);
        // the untwisted u(1,0,0,0) is absent from the enumeration
        assert!(!seen.contains(&g.u_matrix(Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO)));
    }

    #[test]
    fn sz2_is_small() {
        let g = Suzuki::with_degree(1).unwrap();
        assert_eq!(g.elements().count(), 20);
    }

    #[test]
    fn element_orders_in_sz8() {
        let g = sz8();
        let mut hist = std::collections::BTreeMap::new();
        for e in g.elements() {
            *hist.entry(g.element_order(&e).unwrap()).or_insert(0u32) += 1;
        }
        let orders: Vec<u128> = hist.keys().copied().collect();
        assert_eq!(orders, vec![1, 2, 4, 5, 7, 13]);
        assert_eq!(hist[&2], 455);
    }
}
