use std::fmt;

use super::{Fe, Field};
use crate::error::{Error, Result};

/// Univariate polynomial over GF(2^m), coefficients low degree first.
/// Canonical: no trailing zero coefficients; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Fe>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*X^{i}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fe) -> Self {
        Self::new(vec![c])
    }

    /// `X`.
    pub fn x() -> Self {
        UniPoly {
            coeffs: vec![Fe::ZERO, Fe::ONE],
        }
    }

    /// `c * X^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn eval(&self, field: &Field, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
                let b = other.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
                Fe(a.0 ^ b.0)
            })
            .collect();
        UniPoly::new(coeffs)
    }

    pub fn mul(&self, field: &Field, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, field: &Field, c: Fe) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn monic(&self, field: &Field) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        self.scale(field, field.inv_nonzero(self.leading()))
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, field: &Field, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = divisor
            .degree()
            .ok_or(Error::ZeroPolynomial("division by the zero polynomial"))?;
        let lead_inv = field.inv_nonzero(divisor.leading());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let t = field.mul(c, lead_inv);
            quot[k - dd] = t;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = field.add(rem[idx], field.mul(t, dc));
            }
        }
        rem.truncate(dd);
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    pub fn rem(&self, field: &Field, divisor: &UniPoly) -> Result<UniPoly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, field: &Field, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(field)
    }

    fn mulmod(&self, field: &Field, other: &UniPoly, modulus: &UniPoly) -> UniPoly {
        self.mul(field, other)
            .rem(field, modulus)
            .expect("modulus is nonzero")
    }
}

/// `X^(q) mod f` by `m` squarings.
fn x_to_q_mod(field: &Field, f: &UniPoly) -> UniPoly {
    let mut acc = UniPoly::x().rem(field, f).expect("f is nonzero");
    for _ in 0..field.degree() {
        acc = acc.mulmod(field, &acc, f);
    }
    acc
}

/// Number of distinct roots of `f` in the field, as `deg gcd(f, X^q - X)`.
pub fn count_roots(field: &Field, f: &UniPoly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial("every element is a root"));
    }
    if f.degree() == Some(0) {
        return Ok(0);
    }
    let h = x_to_q_mod(field, f).add(&UniPoly::x());
    let g = f.gcd(field, &h);
    Ok(g.degree().unwrap_or(0))
}

/// Brute-force count by evaluating at every element.
pub fn count_roots_exhaustive(field: &Field, f: &UniPoly) -> usize {
    field
        .elements()
        .filter(|&x| f.eval(field, x).is_zero())
        .count()
}

/// All roots of `f` in the field, sorted by bit pattern.
///
/// Splits the squarefree part `gcd(f, X^q - X)` with trace maps
/// `Tr(r X) = sum_i (r X)^(2^i)` for `r = 1, 2, 3, ...`.
pub fn split_roots(field: &Field, f: &UniPoly) -> Result<Vec<Fe>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial("every element is a root"));
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let h = x_to_q_mod(field, f).add(&UniPoly::x());
    let g = f.gcd(field, &h);
    let mut roots = Vec::new();
    split_into(field, g, &mut roots);
    roots.sort();
    Ok(roots)
}

fn split_into(field: &Field, g: UniPoly, out: &mut Vec<Fe>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            // monic: X + c
            out.push(g.coeffs()[0]);
        }
        Some(_) => {
            for r in field.nonzero_elements() {
                let rx = UniPoly::monomial(r, 1).rem(field, &g).expect("g nonzero");
                let mut term = rx.clone();
                let mut tr = rx;
                for _ in 1..field.degree() {
                    term = term.mulmod(field, &term, &g);
                    tr = tr.add(&term);
                }
                let d = g.gcd(field, &tr);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && Some(dd) < g.degree() {
                    let (other, _) = g.div_rem(field, &d).expect("d nonzero");
                    split_into(field, d, out);
                    split_into(field, other.monic(field), out);
                    return;
                }
            }
            unreachable!("a squarefree split polynomial always separates under some trace map");
        }
    }
}
