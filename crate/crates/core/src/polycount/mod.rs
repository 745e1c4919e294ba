//! Root counting for polynomials evaluated on the graph of the θ-map, and
//! the word-to-polynomial bridge.

mod twisted;
mod wordpoly;

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{count_roots, Fe, Field, UniPoly};
use crate::rng;

pub use twisted::{random_twisted, zero_probability, TwistedPolynomial, ZeroMode, ZeroProbability};
pub use wordpoly::{word_coefficient_poly, word_law_witness, WitnessOutcome, WordPoly};

/// `p(x, y) = sum c[i][j] x^i y^j`. Canonical: no all-zero trailing rows
/// (x-degree) or columns (y-degree); the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiPoly {
    coeffs: Vec<Vec<Fe>>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(format!("{c}*x^{i}*y^{j}"));
                }
            }
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for BiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let bits: Vec<Vec<u32>> = self
            .coeffs
            .iter()
            .map(|r| r.iter().map(|c| c.0).collect())
            .collect();
        bits.serialize(s)
    }
}

impl BiPoly {
    /// `coeffs[i][j]` multiplies `x^i y^j`; rows may be ragged.
    pub fn new(coeffs: Vec<Vec<Fe>>) -> BiPoly {
        let width = coeffs
            .iter()
            .map(|r| r.iter().rposition(|c| !c.is_zero()).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0);
        let mut rows: Vec<Vec<Fe>> = coeffs
            .into_iter()
            .map(|mut r| {
                r.resize(width, Fe::ZERO);
                r
            })
            .collect();
        while rows.last().is_some_and(|r| r.iter().all(|c| c.is_zero())) {
            rows.pop();
        }
        BiPoly { coeffs: rows }
    }

    pub fn coeffs(&self) -> &[Vec<Fe>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.coeffs.first().map(|r| r.len() - 1)
    }

    pub fn eval(&self, field: &Field, x: Fe, y: Fe) -> Fe {
        let mut acc = Fe::ZERO;
        for row in self.coeffs.iter().rev() {
            let mut inner = Fe::ZERO;
            for c in row.iter().rev() {
                inner = field.add(field.mul(inner, y), *c);
            }
            acc = field.add(field.mul(acc, x), inner);
        }
        acc
    }

    /// Uniform coefficients of `x^i y^j`, `i, j <= d`, resampled while zero.
    pub fn random<R: Rng + ?Sized>(field: &Field, d: usize, rng: &mut R) -> BiPoly {
        Self::random_shaped(field, d, DegreeShape::PerVariable, rng)
    }

    pub fn random_shaped<R: Rng + ?Sized>(
        field: &Field,
        d: usize,
        shape: DegreeShape,
        rng: &mut R,
    ) -> BiPoly {
        loop {
            let p = BiPoly::new(
                (0..=d)
                    .map(|i| {
                        let width = match shape {
                            DegreeShape::PerVariable => d,
                            DegreeShape::Total => d - i,
                        };
                        (0..=width).map(|_| field.random(rng)).collect()
                    })
                    .collect(),
            );
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// `p(x, x^θ)` as a polynomial in `x`, with exponents reduced through
    /// `x^q = x` so that it represents the same function on `GF(q)`.
    pub fn substitute_theta(&self, field: &Field) -> UniPoly {
        let q = field.order();
        let theta = field.theta_exponent();
        let reduce = |e: u64| if e < q { e } else { (e - 1) % (q - 1) + 1 };
        let mut terms: Vec<(u64, Fe)> = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    terms.push((reduce(i as u64 + j as u64 * theta), *c));
                }
            }
        }
        let top = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let mut out = vec![Fe::ZERO; top + 1];
        for (e, c) in terms {
            out[e as usize] = field.add(out[e as usize], c);
        }
        UniPoly::new(out)
    }
}

/// Which monomials `x^i y^j` a random polynomial of degree `d` may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DegreeShape {
    /// `i <= d` and `j <= d`.
    PerVariable,
    /// `i + j <= d`.
    Total,
}

/// Number of `x` in `GF(q)` with `p(x, x^θ) = 0`: the distinct roots of the
/// substituted polynomial, or `q` when it vanishes as a function.
pub fn twisted_root_count(field: &Field, p: &BiPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial(
            "twisted root count of the zero polynomial",
        ));
    }
    let u = p.substitute_theta(field);
    if u.is_zero() {
        return Ok(field.order() as usize);
    }
    count_roots(field, &u)
}

/// Direct evaluation at every `x`.
pub fn twisted_root_count_exhaustive(field: &Field, p: &BiPoly) -> usize {
    field
        .elements()
        .filter(|&x| p.eval(field, x, field.theta(x)).is_zero())
        .count()
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistAudit {
    pub q: u64,
    pub d: usize,
    pub shape: DegreeShape,
    pub samples: usize,
    pub max_count: usize,
    /// `2 d^2`.
    pub bound: usize,
    pub violations: usize,
    /// Polynomials whose substitution count disagreed with direct
    /// evaluation (only when cross-validating).
    pub mismatches: usize,
    pub cross_validated: bool,
    pub witness: Option<BiPoly>,
    pub pass: bool,
}

/// Samples `samples` uniform nonzero `BiPoly`s of degree `<= d` in the given
/// shape (sample `i` from `rng::stream(seed, "bipoly", i)`) and checks the
/// root count against `2 d^2`. With `cross_validate` every count is
/// recomputed by direct evaluation.
pub fn harder_twist_audit(
    field: &Field,
    d: usize,
    shape: DegreeShape,
    samples: usize,
    seed: u64,
    cross_validate: bool,
) -> Result<TwistAudit> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "degree bound must be at least 1".into(),
        ));
    }
    let bound = 2 * d * d;
    let results = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = BiPoly::random_shaped(field, d, shape, &mut rng::stream(seed, "bipoly", i));
            let c = twisted_root_count(field, &p)?;
            let mismatch = cross_validate && twisted_root_count_exhaustive(field, &p) != c;
            Ok((c, mismatch, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut audit = TwistAudit {
        q: field.order(),
        d,
        shape,
        samples,
        max_count: 0,
        bound,
        violations: 0,
        mismatches: 0,
        cross_validated: cross_validate,
        witness: None,
        pass: true,
    };
    for (c, mismatch, p) in results {
        if c > bound {
            audit.violations += 1;
        }
        if mismatch {
            audit.mismatches += 1;
        }
        if audit.witness.is_none() || c > audit.max_count {
            audit.max_count = c;
            audit.witness = Some(p);
        }
    }
    audit.pass = audit.violations == 0 && audit.mismatches == 0;
    Ok(audit)
}
