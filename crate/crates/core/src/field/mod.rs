//! Arithmetic in GF(2^m) for odd `m`, the twisting automorphism
//! `x -> x^(2^((m+1)/2))`, and univariate root counting.
//!
//! Elements are plain `u32` bit patterns ([`Fe`]); all arithmetic goes through
//! a [`Field`] handle that owns the modulus and, for `m <= 16`, log/antilog
//! tables.

mod embed;
mod gf2;
mod poly;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use embed::SubfieldEmbedding;
pub use poly::{count_roots, count_roots_exhaustive, split_roots, UniPoly};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 31;
const TABLE_LIMIT: u32 = 16;

/// An element of GF(2^m): coefficients of the residue polynomial, bit `i` for `X^i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({:#x})", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

struct Tables {
    // exp has length 2(q-1) so that log a + log b never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    m: u32,
    modulus: u64,
    mask: u32,
    tables: Option<Tables>,
}

/// GF(2^m) with the least irreducible modulus. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // The modulus is a function of m.
        self.inner.m == other.inner.m
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#b}", self.inner.m, self.inner.modulus)
    }
}

impl Field {
    /// Builds GF(2^m) for odd `1 <= m <= 31`.
    ///
    /// The modulus is the least irreducible polynomial of degree `m` with
    /// nonzero constant term, found and verified at construction.
    pub fn new(m: u32) -> Result<Field> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::InvalidDegree {
                m,
                reason: "degree must lie in 1..=31",
            });
        }
        if m % 2 == 0 {
            return Err(Error::InvalidDegree {
                m,
                reason: "degree must be odd for the twisting automorphism to exist",
            });
        }
        Ok(Self::build(m))
    }

    /// Any degree in `1..=31`, for groups that do not need the twisting
    /// map (such as SL2). On even degrees [`Field::theta`] is not an
    /// automorphism with `(x^θ)^θ = x^2` and must not be used.
    pub fn new_any(m: u32) -> Result<Field> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::InvalidDegree {
                m,
                reason: "degree must lie in 1..=31",
            });
        }
        Ok(Self::build(m))
    }

    pub(crate) fn build(m: u32) -> Field {
        let modulus = gf2::least_irreducible(m);
        debug_assert!(gf2::is_irreducible(modulus));
        let mask = ((1u64 << m) - 1) as u32;
        let mut field = Field {
            inner: Arc::new(Inner {
                m,
                modulus,
                mask,
                tables: None,
            }),
        };
        if m <= TABLE_LIMIT && m > 1 {
            let tables = field.build_tables();
            field = Field {
                inner: Arc::new(Inner {
                    m,
                    modulus,
                    mask,
                    tables: Some(tables),
                }),
            };
        }
        field
    }

    fn build_tables(&self) -> Tables {
        let q = self.order() as u32;
        let g = self.primitive_element();
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = Fe::ONE;
        for i in 0..n {
            exp[i] = x.0;
            exp[i + n] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        Tables { exp, log }
    }

    /// Smallest element (by bits) generating the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        let n = self.order() - 1;
        let primes = prime_factors(n);
        (2..self.order() as u32)
            .map(Fe)
            .find(|&g| primes.iter().all(|&p| self.pow_slow(g, n / p) != Fe::ONE))
            .unwrap_or(Fe::ONE)
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    /// q = 2^m.
    #[inline]
    pub fn order(&self) -> u64 {
        1u64 << self.inner.m
    }

    /// The modulus as a bit vector including the leading term.
    pub fn modulus(&self) -> u64 {
        self.inner.modulus
    }

    /// theta = 2^(n+1) where m = 2n+1.
    pub fn theta_exponent(&self) -> u64 {
        1u64 << self.theta_squarings()
    }

    #[inline]
    fn theta_squarings(&self) -> u32 {
        self.inner.m.div_ceil(2)
    }

    /// Validates a bit pattern as an element of this field.
    pub fn element(&self, bits: u64) -> Result<Fe> {
        if bits > self.inner.mask as u64 {
            return Err(Error::FieldMismatch {
                bits,
                m: self.inner.m,
            });
        }
        Ok(Fe(bits as u32))
    }

    pub fn check(&self, x: Fe) -> Result<Fe> {
        self.element(x.0 as u64)
    }

    /// Class of `X`.
    pub fn generator(&self) -> Fe {
        if self.inner.m == 1 {
            Fe::ONE
        } else {
            Fe(0b10)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.order()).map(|b| Fe(b as u32))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.order()).map(|b| Fe(b as u32))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.random::<u32>() & self.inner.mask)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.random_range(1..=self.inner.mask))
    }

    #[inline]
    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        Fe(x.0 ^ y.0)
    }

    #[inline]
    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        match &self.inner.tables {
            Some(t) => {
                if x.0 == 0 || y.0 == 0 {
                    Fe::ZERO
                } else {
                    let i = t.log[x.0 as usize] + t.log[y.0 as usize];
                    Fe(t.exp[i as usize])
                }
            }
            None => self.mul_slow(x, y),
        }
    }

    fn mul_slow(&self, x: Fe, y: Fe) -> Fe {
        let prod = gf2::clmul(x.0 as u64, y.0 as u64);
        Fe(gf2::rem(prod, self.inner.modulus) as u32)
    }

    fn pow_slow(&self, x: Fe, mut e: u64) -> Fe {
        let mut base = x;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn square(&self, x: Fe) -> Fe {
        self.mul(x, x)
    }

    pub fn pow(&self, x: Fe, mut e: u64) -> Fe {
        let mut base = x;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as `x^(q-2)`.
    pub fn inv(&self, x: Fe) -> Result<Fe> {
        if x.is_zero() {
            return Err(Error::DivisionByZero { m: self.inner.m });
        }
        Ok(self.inv_nonzero(x))
    }

    /// Inverse of an element already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nonzero(&self, x: Fe) -> Fe {
        debug_assert!(!x.is_zero());
        match &self.inner.tables {
            // Same value as the power below; the table route avoids the ladder.
            Some(t) => {
                let n = (self.order() - 1) as u32;
                let l = t.log[x.0 as usize];
                Fe(t.exp[((n - l) % n) as usize])
            }
            None => self.pow(x, self.order() - 2),
        }
    }

    pub fn div(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Validated arithmetic: rejects operands that are not canonical elements
    /// of this field.
    pub fn checked_mul(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.mul(self.check(x)?, self.check(y)?))
    }

    pub fn checked_add(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.add(self.check(x)?, self.check(y)?))
    }

    /// The twisting automorphism `x -> x^theta`, by `n+1` squarings.
    #[inline]
    pub fn theta(&self, x: Fe) -> Fe {
        let mut y = x;
        for _ in 0..self.theta_squarings() {
            y = self.square(y);
        }
        y
    }

    /// `x^(2^k)`.
    pub fn frobenius(&self, x: Fe, k: u32) -> Fe {
        let mut y = x;
        for _ in 0..k {
            y = self.square(y);
        }
        y
    }

    /// Whether `x` lies in the subfield of order `2^d` (`d` must divide `m`).
    pub fn in_subfield(&self, x: Fe, d: u32) -> bool {
        self.frobenius(x, d) == x
    }

    /// Whether `x` lies in some proper subfield.
    pub fn in_proper_subfield(&self, x: Fe) -> bool {
        proper_divisors(self.inner.m)
            .into_iter()
            .any(|d| self.in_subfield(x, d))
    }
}

/// Proper divisors of `m` in increasing order.
pub fn proper_divisors(m: u32) -> Vec<u32> {
    (1..m).filter(|d| m % d == 0).collect()
}

/// Size of the union of all proper subfields of GF(2^m).
///
/// Counts elements by the degree of the smallest field containing them,
/// with the Möbius function.
pub fn proper_subfield_union_size(m: u32) -> u64 {
    proper_divisors(m)
        .into_iter()
        .map(|d| {
            divisors(d)
                .into_iter()
                .map(|e| mobius(d / e) * (1i64 << e))
                .sum::<i64>() as u64
        })
        .sum()
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn mobius(mut n: u32) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulus_selection() {
        assert_eq!(Field::new(3).unwrap().modulus(), 0b1011);
        assert_eq!(Field::new(1).unwrap().modulus(), 0b11);
        assert!(matches!(
            Field::new(4),
            Err(Error::InvalidDegree { m: 4, .. })
        ));
        assert!(Field::new(0).is_err());
        assert!(Field::new(33).is_err());
    }

    #[test]
    fn gf8_products() {
        let f = Field::new(3).unwrap();
        let g = f.generator();
        let g2 = f.mul(g, g);
        assert_eq!(f.mul(g, g2), Fe(0b011));
        assert_eq!(f.theta(g), Fe(0b110));
        assert_eq!(f.theta(Fe::ZERO), Fe::ZERO);
        assert_eq!(f.theta(Fe::ONE), Fe::ONE);
    }

    #[test]
    fn table_and_ladder_agree() {
        for m in [3, 5, 7, 9, 11, 13] {
            let f = Field::new(m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(m));
            for _ in 0..2000 {
                let x = f.random(&mut rng);
                let y = f.random(&mut rng);
                assert_eq!(f.mul(x, y), f.mul_slow(x, y));
                if !x.is_zero() {
                    assert_eq!(f.inv_nonzero(x), f.pow(x, f.order() - 2));
                }
            }
        }
    }

    #[test]
    fn untabled_field_works() {
        let f = Field::new(31).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x = f.random_nonzero(&mut rng);
            assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
            assert_eq!(f.theta(f.theta(x)), f.square(x));
        }
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let f = Field::new(3).unwrap();
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero { m: 3 }));
        assert!(matches!(
            f.checked_mul(Fe(9), Fe(1)),
            Err(Error::FieldMismatch { bits: 9, m: 3 })
        ));
        assert!(f.element(7).is_ok());
    }

    #[test]
    fn subfield_union_sizes() {
        assert_eq!(proper_subfield_union_size(3), 2);
        assert_eq!(proper_subfield_union_size(9), 8);
        assert_eq!(proper_subfield_union_size(15), 38);
        assert_eq!(proper_subfield_union_size(1), 0);
        // brute force for m = 9
        let f = Field::new(9).unwrap();
        let count = f.elements().filter(|&x| f.in_proper_subfield(x)).count();
        assert_eq!(count, 8);
    }

    #[test]
    fn primitive_element_has_full_order() {
        let f = Field::new(9).unwrap();
        let g = f.primitive_element();
        let mut seen = std::collections::HashSet::new();
        let mut x = Fe::ONE;
        for _ in 0..511 {
            seen.insert(x);
            x = f.mul(x, g);
        }
        assert_eq!(seen.len(), 511);
    }
}
