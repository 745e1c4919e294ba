use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::rng;

#[derive(Debug)]
pub(crate) enum Expr {
    Const(Fe),
    /// `x_i`
    Var(usize),
    /// `x_i^θ`
    Theta(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
}

impl Expr {
    fn eval(&self, f: &Field, xs: &[Fe], ts: &[Fe]) -> Fe {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => xs[*i],
            Expr::Theta(i) => ts[*i],
            Expr::Add(a, b) => f.add(a.eval(f, xs, ts), b.eval(f, xs, ts)),
            Expr::Mul(a, b) => f.mul(a.eval(f, xs, ts), b.eval(f, xs, ts)),
        }
    }
}

type BlackBox = Arc<dyn Fn(&[Fe]) -> Fe + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Expr(Arc<Expr>),
    BlackBox(BlackBox),
}

/// `P(x_1..x_k, x_1^θ..x_k^θ)` as an evaluator with tracked degree bounds
/// in each of the `2k` variables (`x_i` at position `i`, `x_i^θ` at `k + i`).
#[derive(Clone)]
pub struct TwistedPolynomial {
    field: Field,
    k: usize,
    degrees: Vec<u32>,
    eval: Evaluator,
}

impl fmt::Debug for TwistedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedPolynomial")
            .field("q", &self.field.order())
            .field("k", &self.k)
            .field("degrees", &self.degrees)
            .finish()
    }
}

impl TwistedPolynomial {
    fn leaf(field: &Field, k: usize, e: Expr, slot: Option<usize>) -> TwistedPolynomial {
        let mut degrees = vec![0; 2 * k];
        if let Some(s) = slot {
            degrees[s] = 1;
        }
        TwistedPolynomial {
            field: field.clone(),
            k,
            degrees,
            eval: Evaluator::Expr(Arc::new(e)),
        }
    }

    pub fn constant(field: &Field, k: usize, c: Fe) -> TwistedPolynomial {
        Self::leaf(field, k, Expr::Const(c), None)
    }

    pub fn var(field: &Field, k: usize, i: usize) -> Result<TwistedPolynomial> {
        Self::check_index(k, i)?;
        Ok(Self::leaf(field, k, Expr::Var(i), Some(i)))
    }

    pub fn theta_var(field: &Field, k: usize, i: usize) -> Result<TwistedPolynomial> {
        Self::check_index(k, i)?;
        Ok(Self::leaf(field, k, Expr::Theta(i), Some(k + i)))
    }

    fn check_index(k: usize, i: usize) -> Result<()> {
        if i >= k {
            return Err(Error::InvalidParameter(format!(
                "variable {i} out of range for k = {k}"
            )));
        }
        Ok(())
    }

    /// Wraps a closure. `degrees` must bound the degree of the closure's
    /// polynomial in each of the `2k` variables; it is taken on trust.
    pub fn black_box(
        field: &Field,
        k: usize,
        degrees: Vec<u32>,
        f: impl Fn(&[Fe]) -> Fe + Send + Sync + 'static,
    ) -> Result<TwistedPolynomial> {
        if degrees.len() != 2 * k {
            return Err(Error::Arity {
                expected: 2 * k,
                got: degrees.len(),
            });
        }
        Ok(TwistedPolynomial {
            field: field.clone(),
            k,
            degrees,
            eval: Evaluator::BlackBox(Arc::new(f)),
        })
    }

    fn expr(&self) -> Result<Arc<Expr>> {
        match &self.eval {
            Evaluator::Expr(e) => Ok(e.clone()),
            Evaluator::BlackBox(_) => Err(Error::InvalidParameter(
                "black-box polynomials cannot be composed".into(),
            )),
        }
    }

    fn combine(&self, other: &TwistedPolynomial, mul: bool) -> Result<TwistedPolynomial> {
        if self.k != other.k || self.field != other.field {
            return Err(Error::InvalidParameter(
                "operands live in different polynomial rings".into(),
            ));
        }
        let (a, b) = (self.expr()?, other.expr()?);
        let degrees = self
            .degrees
            .iter()
            .zip(&other.degrees)
            .map(|(x, y)| if mul { x + y } else { *x.max(y) })
            .collect();
        Ok(TwistedPolynomial {
            field: self.field.clone(),
            k: self.k,
            degrees,
            eval: Evaluator::Expr(Arc::new(if mul {
                Expr::Mul(a, b)
            } else {
                Expr::Add(a, b)
            })),
        })
    }

    pub fn add(&self, other: &TwistedPolynomial) -> Result<TwistedPolynomial> {
        self.combine(other, false)
    }

    pub fn mul(&self, other: &TwistedPolynomial) -> Result<TwistedPolynomial> {
        self.combine(other, true)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Bounds on the degree in `x_1..x_k, x_1^θ..x_k^θ`.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Largest per-variable bound.
    pub fn degree_bound(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn eval(&self, xs: &[Fe]) -> Result<Fe> {
        if xs.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: xs.len(),
            });
        }
        for &x in xs {
            self.field.check(x)?;
        }
        Ok(self.eval_unchecked(xs))
    }

    pub(crate) fn eval_unchecked(&self, xs: &[Fe]) -> Fe {
        match &self.eval {
            Evaluator::Expr(e) => {
                let ts: Vec<Fe> = xs.iter().map(|&x| self.field.theta(x)).collect();
                e.eval(&self.field, xs, &ts)
            }
            Evaluator::BlackBox(f) => f(xs),
        }
    }

    #[cfg(test)]
    pub(crate) fn expr_for_test(&self) -> Arc<Expr> {
        self.expr().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZeroMode {
    /// Every point of `GF(q)^k`; needs `q^k <= 2^24`.
    Exact,
    MonteCarlo {
        samples: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroProbability {
    pub q: u64,
    pub k: usize,
    pub d: u32,
    pub mode: ZeroMode,
    pub zeros: u64,
    pub points: u64,
    pub fraction: f64,
    /// `k d (θ + 1) / q`.
    pub bound: f64,
    /// A point with `P != 0` was seen.
    pub certified_nonzero: bool,
    /// Exact mode found no nonzero point: `P` vanishes on all of `GF(q)^k`.
    pub identically_zero: bool,
    /// Certified nonzero and above the bound.
    pub violation: bool,
}

pub const EXACT_LIMIT: u64 = 1 << 24;

/// Fraction of points where `P` vanishes. Monte Carlo point `i` comes from
/// `rng::stream(seed, "zero-probability", i)`.
pub fn zero_probability(
    p: &TwistedPolynomial,
    mode: ZeroMode,
    seed: u64,
) -> Result<ZeroProbability> {
    let f = p.field();
    let q = f.order();
    let k = p.k();
    let (zeros, points) = match mode {
        ZeroMode::Exact => {
            let total = (q as u128).pow(k as u32);
            if total > EXACT_LIMIT as u128 {
                return Err(Error::Capacity {
                    what: "exact zero probability".into(),
                    limit: EXACT_LIMIT,
                    hint: "use Monte Carlo mode",
                });
            }
            let total = total as u64;
            let zeros = (0..total)
                .into_par_iter()
                .filter(|&idx| {
                    let mut r = idx;
                    let xs: Vec<Fe> = (0..k)
                        .map(|_| {
                            let x = Fe((r % q) as u32);
                            r /= q;
                            x
                        })
                        .collect();
                    p.eval_unchecked(&xs).is_zero()
                })
                .count() as u64;
            (zeros, total)
        }
        ZeroMode::MonteCarlo { samples } => {
            let zeros = (0..samples)
                .into_par_iter()
                .filter(|&i| {
                    let mut r = rng::stream(seed, "zero-probability", i);
                    let xs: Vec<Fe> = (0..k).map(|_| f.random(&mut r)).collect();
                    p.eval_unchecked(&xs).is_zero()
                })
                .count() as u64;
            (zeros, samples)
        }
    };
    let d = p.degree_bound();
    let bound = (k as f64) * d as f64 * (f.theta_exponent() + 1) as f64 / q as f64;
    let fraction = zeros as f64 / points.max(1) as f64;
    let certified = zeros < points;
    Ok(ZeroProbability {
        q,
        k,
        d,
        mode,
        zeros,
        points,
        fraction,
        bound,
        certified_nonzero: certified,
        identically_zero: mode == ZeroMode::Exact && !certified,
        violation: certified && fraction > bound,
    })
}

/// Random structured polynomial with every per-variable degree `<= d`: a
/// product of up to `d` sparse factors, each of degree `<= 1` in every
/// variable, plus occasionally a sparse additive term. Products of
/// low-degree factors have far more zeros than uniform dense polynomials,
/// which makes them the harder test of the bound.
pub fn random_twisted<R: Rng + ?Sized>(
    field: &Field,
    k: usize,
    d: usize,
    rng: &mut R,
) -> TwistedPolynomial {
    let slot = |i: usize| -> TwistedPolynomial {
        if i < k {
            TwistedPolynomial::var(field, k, i).expect("in range")
        } else {
            TwistedPolynomial::theta_var(field, k, i - k).expect("in range")
        }
    };
    let sparse = |rng: &mut R| -> TwistedPolynomial {
        // c0 + sum of up to 3 monomials, each a product of distinct slots
        let mut acc = TwistedPolynomial::constant(field, k, field.random(rng));
        for _ in 0..rng.random_range(1..=3) {
            let mut term = TwistedPolynomial::constant(field, k, field.random_nonzero(rng));
            for s in 0..2 * k {
                if rng.random_bool(0.5) {
                    term = term.mul(&slot(s)).expect("same ring");
                }
            }
            acc = acc.add(&term).expect("same ring");
        }
        acc
    };
    let factors = rng.random_range(1..=d);
    let mut p = sparse(rng);
    for _ in 1..factors {
        p = p.mul(&sparse(rng)).expect("same ring");
    }
    if rng.random_bool(0.25) {
        let extra = sparse(rng);
        if extra
            .degrees
            .iter()
            .zip(&p.degrees)
            .all(|(a, b)| a.max(b) <= &(d as u32))
        {
            p = p.add(&extra).expect("same ring");
        }
    }
    p
}
