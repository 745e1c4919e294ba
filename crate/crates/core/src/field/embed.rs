use super::{split_roots, Fe, Field, UniPoly};
use crate::error::{Error, Result};

/// Field homomorphism GF(2^m0) -> GF(2^m) for `m0 | m`.
///
/// The class of `X` in the small field is sent to the least root (by bit
/// pattern) of the small modulus inside the big field.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    sub: Field,
    big: Field,
    /// Images of X^0 .. X^(m0-1).
    basis: Vec<Fe>,
    /// Row-reduced basis for inverting the map: (pivot bit, vector, combination mask).
    reduced: Vec<(u32, u32, u32)>,
}

impl SubfieldEmbedding {
    pub fn new(sub: &Field, big: &Field) -> Result<Self> {
        let (m0, m) = (sub.degree(), big.degree());
        if m % m0 != 0 {
            return Err(Error::NotSubfield { sub: m0, big: m });
        }
        let modulus = sub.modulus();
        let coeffs = (0..=m0).map(|i| Fe(((modulus >> i) & 1) as u32)).collect();
        let roots = split_roots(big, &UniPoly::new(coeffs))?;
        let y = *roots.first().ok_or_else(|| {
            Error::Inconsistent(format!("modulus of GF(2^{m0}) has no root in GF(2^{m})"))
        })?;
        let mut basis = Vec::with_capacity(m0 as usize);
        let mut p = Fe::ONE;
        for _ in 0..m0 {
            basis.push(p);
            p = big.mul(p, y);
        }
        let reduced = reduce_basis(&basis);
        Ok(SubfieldEmbedding {
            sub: sub.clone(),
            big: big.clone(),
            basis,
            reduced,
        })
    }

    pub fn sub(&self) -> &Field {
        &self.sub
    }

    pub fn big(&self) -> &Field {
        &self.big
    }

    pub fn embed(&self, x: Fe) -> Fe {
        let mut acc = 0u32;
        for (i, b) in self.basis.iter().enumerate() {
            if (x.0 >> i) & 1 == 1 {
                acc ^= b.0;
            }
        }
        Fe(acc)
    }

    /// Whether `y` lies in the image (the fixed points of `x -> x^(2^m0)`).
    pub fn contains(&self, y: Fe) -> bool {
        self.big.in_subfield(y, self.sub.degree())
    }

    /// Inverse image, if `y` is in the image.
    pub fn preimage(&self, y: Fe) -> Option<Fe> {
        let mut v = y.0;
        let mut combo = 0u32;
        for &(pivot, vec, mask) in &self.reduced {
            if (v >> pivot) & 1 == 1 {
                v ^= vec;
                combo ^= mask;
            }
        }
        (v == 0).then_some(Fe(combo))
    }
}

fn reduce_basis(basis: &[Fe]) -> Vec<(u32, u32, u32)> {
    let mut rows: Vec<(u32, u32, u32)> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let mut v = b.0;
        let mut mask = 1u32 << i;
        for &(pivot, rv, rm) in &rows {
            if (v >> pivot) & 1 == 1 {
                v ^= rv;
                mask ^= rm;
            }
        }
        debug_assert!(v != 0, "basis images are linearly independent");
        let pivot = 31 - v.leading_zeros();
        rows.push((pivot, v, mask));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_subfield() {
        let f2 = Field::new(1).unwrap();
        let f8 = Field::new(3).unwrap();
        let e = SubfieldEmbedding::new(&f2, &f8).unwrap();
        assert_eq!(e.embed(Fe::ZERO), Fe::ZERO);
        assert_eq!(e.embed(Fe::ONE), Fe::ONE);
    }

    #[test]
    fn gf8_in_gf512() {
        let f8 = Field::new(3).unwrap();
        let f512 = Field::new(9).unwrap();
        let e = SubfieldEmbedding::new(&f8, &f512).unwrap();
        let fixed: Vec<Fe> = f512.elements().filter(|&x| f512.pow(x, 8) == x).collect();
        assert_eq!(fixed.len(), 8);
        let mut image: Vec<Fe> = f8.elements().map(|x| e.embed(x)).collect();
        image.sort();
        assert_eq!(image, fixed);
        for x in f8.elements() {
            assert_eq!(e.embed(f8.theta(x)), f512.theta(e.embed(x)));
            assert_eq!(e.preimage(e.embed(x)), Some(x));
            for y in f8.elements() {
                assert_eq!(e.embed(f8.mul(x, y)), f512.mul(e.embed(x), e.embed(y)));
                assert_eq!(e.embed(f8.add(x, y)), f512.add(e.embed(x), e.embed(y)));
            }
        }
        let outside = f512.elements().find(|&x| !e.contains(x)).unwrap();
        assert_eq!(e.preimage(outside), None);
    }

    #[test]
    fn non_divisor_rejected() {
        let f8 = Field::new(3).unwrap();
        let f32 = Field::new(5).unwrap();
        assert!(matches!(
            SubfieldEmbedding::new(&f8, &f32),
            Err(Error::NotSubfield { sub: 3, big: 5 })
        ));
    }
}
