use serde::Serialize;

use super::twisted::TwistedPolynomial;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::rng;
use crate::suzuki::{Matrix4, Suzuki, SuzukiElement};
use crate::words::{evaluate, Letter, Word};

/// Variables: the big-cell parameters `(α, β, γ, α', β')` of `a`, then of `b`.
pub const WORD_POLY_VARS: usize = 10;

/// Per-letter degree bound in each variable of the γ-scaled matrices.
pub const DEGREE_PER_LETTER: u32 = 2;

#[derive(Clone, Debug)]
pub struct WordPoly {
    /// `c_i(ŵ) + λ^i x`, where `ŵ = λ w(a, b)` is the product of the
    /// γ-scaled letter matrices and `λ = γ_a^((θ+1)n_a) γ_b^((θ+1)n_b)`.
    pub poly: TwistedPolynomial,
    pub coefficient: usize,
    pub target: Fe,
    /// Exponents of `γ_a^(θ+1)` and `γ_b^(θ+1)` in `λ`.
    pub gamma_powers: (u32, u32),
    /// The point encoding `a = b = T` is a nonvanishing witness.
    pub certified: bool,
}

/// `γ^(θ+1) U(α,β) D(γ) T U(α',β')`, whose entries are polynomials in the
/// parameters and their θ-images (no inverses).
fn scaled_big_cell(g: &Suzuki, p: &[Fe]) -> Matrix4 {
    let f = g.field();
    let (alpha, beta, gamma, alpha2, beta2) = (p[0], p[1], p[2], p[3], p[4]);
    let gt = f.theta(gamma);
    let gg = f.square(gamma);
    let scale = [f.mul(f.square(gt), gg), f.mul(gt, gg), gt, Fe::ONE];
    let mut m = g.big_u(alpha, beta);
    for row in m.0.iter_mut() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = f.mul(*e, scale[j]);
        }
    }
    m.mul_antidiagonal().mul(f, &g.big_u(alpha2, beta2))
}

fn coefficient(m: &Matrix4, f: &Field, i: usize) -> Fe {
    let (c1, c2, c3) = m.charpoly_coeffs(f);
    [c1, c2, c3][i - 1]
}

/// Polynomial in the 10 big-cell parameters of `(a, b)` that vanishes, at
/// parameters with nonzero γ's, exactly when `c_i(w(a, b)) = x`. Degree
/// bound `2 i |w|` per variable.
pub fn word_coefficient_poly(group: &Suzuki, w: &Word, i: usize, x: Fe) -> Result<WordPoly> {
    if w.is_identity() {
        return Err(Error::InvalidParameter("word must be nontrivial".into()));
    }
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidParameter(format!(
            "coefficient index {i} not in 1..=3"
        )));
    }
    let f = group.field().clone();
    f.check(x)?;
    let n_a = w
        .letters()
        .iter()
        .filter(|l| matches!(l, Letter::A | Letter::AInv))
        .count() as u32;
    let n_b = w.len() as u32 - n_a;
    let letters = w.letters().to_vec();
    let g = group.clone();
    let bound = DEGREE_PER_LETTER * i as u32 * w.len() as u32;
    let poly = TwistedPolynomial::black_box(
        &f,
        WORD_POLY_VARS,
        vec![bound; 2 * WORD_POLY_VARS],
        move |xs: &[Fe]| {
            let f = g.field();
            let a = scaled_big_cell(&g, &xs[..5]);
            let b = scaled_big_cell(&g, &xs[5..]);
            let images = [a, a.transpose().flip(), b, b.transpose().flip()];
            let mut m = Matrix4::identity();
            for l in &letters {
                m = m.mul(f, &images[*l as usize]);
            }
            let lam_a = f.pow(f.mul(xs[2], f.theta(xs[2])), n_a as u64);
            let lam_b = f.pow(f.mul(xs[7], f.theta(xs[7])), n_b as u64);
            let lam = f.mul(lam_a, lam_b);
            f.add(coefficient(&m, f, i), f.mul(f.pow(lam, i as u64), x))
        },
    )?;
    // a = b = T: all parameters zero except γ_a = γ_b = 1
    let mut witness = [Fe::ZERO; WORD_POLY_VARS];
    witness[2] = Fe::ONE;
    witness[7] = Fe::ONE;
    let certified = !poly.eval_unchecked(&witness).is_zero();
    Ok(WordPoly {
        poly,
        coefficient: i,
        target: x,
        gamma_powers: (n_a, n_b),
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum WitnessOutcome {
    Found {
        a: String,
        b: String,
        attempt: usize,
    },
    /// No witness in the budget. This never means `w` is a law.
    Exhausted { attempts: usize },
}

impl WitnessOutcome {
    pub fn found(&self) -> bool {
        matches!(self, WitnessOutcome::Found { .. })
    }
}

/// Searches pairs from the big cell (attempt `t` drawn from
/// `rng::stream(seed, "law-witness", t)`) for `w(a, b) != id`.
pub fn word_law_witness(
    group: &Suzuki,
    w: &Word,
    attempts: usize,
    seed: u64,
) -> Result<WitnessOutcome> {
    if w.is_identity() {
        return Err(Error::InvalidParameter("word must be nontrivial".into()));
    }
    for t in 0..attempts {
        let mut r = rng::stream(seed, "law-witness", t as u64);
        let a: SuzukiElement = group.random_big_cell(&mut r);
        let b = group.random_big_cell(&mut r);
        if evaluate(group, w, &a, &b) != group.identity_element() {
            return Ok(WitnessOutcome::Found {
                a: format!("{:?}", a.params()),
                b: format!("{:?}", b.params()),
                attempt: t,
            });
        }
    }
    Ok(WitnessOutcome::Exhausted { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycount::{zero_probability, ZeroMode};
    use crate::suzuki::BruhatParams;

    fn params(p: &BruhatParams) -> Vec<Fe> {
        match *p {
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            } => vec![alpha, beta, gamma, alpha2, beta2],
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_letter_matches_trace() {
        let g = Suzuki::with_degree(3).unwrap();
        let f = g.field().clone();
        let x = Fe(3);
        let wp = word_coefficient_poly(&g, &Word::a(), 1, x).unwrap();
        assert!(wp.certified);
        let mut r = rng::stream(0, "wp", 0);
        for _ in 0..1000 {
            let a = g.random_big_cell(&mut r);
            let b = g.random_big_cell(&mut r);
            let mut xs = params(a.params());
            xs.extend(params(b.params()));
            let lam = f.mul(xs[2], f.theta(xs[2]));
            let expect = f.mul(lam, f.add(a.matrix().trace(), x));
            assert_eq!(wp.poly.eval(&xs).unwrap(), expect);
        }
    }

    #[test]
    fn matches_direct_coefficients_for_longer_words() {
        let g = Suzuki::with_degree(3).unwrap();
        let f = g.field().clone();
        let mut r = rng::stream(1, "wp", 0);
        for w in ["ab", "aBAb", "abbAB", "aaBaB"] {
            let w: Word = w.parse().unwrap();
            for i in 1..=3 {
                let x = f.random_nonzero(&mut r);
                let wp = word_coefficient_poly(&g, &w, i, x).unwrap();
                assert!(wp.certified);
                assert_eq!(wp.poly.degree_bound(), 2 * i as u32 * w.len() as u32);
                for _ in 0..100 {
                    let a = g.random_big_cell(&mut r);
                    let b = g.random_big_cell(&mut r);
                    let mut xs = params(a.params());
                    xs.extend(params(b.params()));
                    let direct = coefficient(evaluate(&g, &w, &a, &b).matrix(), &f, i);
                    // P = 0 exactly when c_i(w) = x
                    assert_eq!(wp.poly.eval(&xs).unwrap().is_zero(), direct == x);
                }
            }
        }
    }

    #[test]
    fn witness_point_is_t() {
        let g = Suzuki::with_degree(3).unwrap();
        let wp = word_coefficient_poly(&g, &"abAB".parse().unwrap(), 2, Fe::ZERO).unwrap();
        assert!(!wp.certified);
        let mut xs = [Fe::ZERO; 10];
        xs[2] = Fe::ONE;
        xs[7] = Fe::ONE;
        assert!(wp.poly.eval(&xs).unwrap().is_zero());
        assert!(word_coefficient_poly(&g, &Word::identity(), 1, Fe::ONE).is_err());
    }

    #[test]
    fn monte_carlo_zero_fraction_below_bound() {
        let g = Suzuki::with_degree(5).unwrap();
        let wp = word_coefficient_poly(&g, &"abAB".parse().unwrap(), 1, Fe::ONE).unwrap();
        let z = zero_probability(&wp.poly, ZeroMode::MonteCarlo { samples: 20_000 }, 0).unwrap();
        assert!(z.certified_nonzero);
        assert!(!z.violation, "{z:?}");
    }

    #[test]
    fn witnesses() {
        let g = Suzuki::with_degree(3).unwrap();
        let out = word_law_witness(&g, &Word::a(), 5, 0).unwrap();
        assert_eq!(out, word_law_witness(&g, &Word::a(), 5, 0).unwrap());
        match word_law_witness(&g, &"abAB".parse().unwrap(), 3, 0).unwrap() {
            WitnessOutcome::Found { attempt, .. } => assert!(attempt < 3),
            e => panic!("{e:?}"),
        }
        assert!(word_law_witness(&g, &Word::identity(), 3, 0).is_err());
    }
}
