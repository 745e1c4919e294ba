use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::suzuki::{Matrix4, Suzuki, SuzukiElement};

#[derive(Clone, Copy, Debug)]
pub struct SigmaConfig {
    /// Length of the generator strings (walks, not reduced words).
    pub word_length: usize,
    pub word_samples: usize,
    pub pair_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub enum PairSource {
    Uniform,
    Fixed(SuzukiElement, SuzukiElement),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub q: u64,
    pub word_length: usize,
    pub samples: u64,
    /// Mean number of `i` with `c_i` a nonzero element of a proper subfield.
    pub sigma1: f64,
    pub sigma1_half_width: f64,
    /// Fraction of samples with `c_1 = c_2 = c_3 = 0`.
    pub sigma2: f64,
    pub sigma2_half_width: f64,
    pub sigma2_hits: u64,
    /// `q^(-1/6) ln q`.
    pub sigma1_shape: f64,
    /// `q^(-1/2) ln q`.
    pub sigma2_shape: f64,
}

struct PairTally {
    s1: Vec<f64>,
    hits: u64,
}

/// Monte Carlo estimate of both quantities. Pair `p` is drawn from
/// `rng::stream(seed, "sigma-pair", p)` and its strings from
/// `rng::stream(seed, "sigma-words", p)`. Every all-zero hit is checked for
/// `w^4 = id`; a failure is an internal inconsistency.
pub fn sigma_estimate(
    group: &Suzuki,
    cfg: &SigmaConfig,
    pairs: PairSource,
) -> Result<SigmaEstimate> {
    if cfg.word_samples == 0 || cfg.pair_samples == 0 {
        return Err(Error::InvalidParameter(
            "sample counts must be positive".into(),
        ));
    }
    let f = group.field();
    let tallies = (0..cfg.pair_samples as u64)
        .into_par_iter()
        .map(|p| {
            let (a, b) = match pairs {
                PairSource::Uniform => {
                    let mut r = rng::stream(cfg.seed, "sigma-pair", p);
                    (group.random_element(&mut r), group.random_element(&mut r))
                }
                PairSource::Fixed(a, b) => (a, b),
            };
            let gens = [
                *a.matrix(),
                *group.inverse(&a).matrix(),
                *b.matrix(),
                *group.inverse(&b).matrix(),
            ];
            let mut r = rng::stream(cfg.seed, "sigma-words", p);
            let mut tally = PairTally {
                s1: Vec::with_capacity(cfg.word_samples),
                hits: 0,
            };
            for _ in 0..cfg.word_samples {
                let mut m = Matrix4::identity();
                for _ in 0..cfg.word_length {
                    m = m.mul(f, &gens[r.random_range(0..4usize)]);
                }
                let (c1, c2, c3) = m.charpoly_coeffs(f);
                let in_sub = [c1, c2, c3]
                    .iter()
                    .filter(|c| !c.is_zero() && f.in_proper_subfield(**c))
                    .count();
                tally.s1.push(in_sub as f64);
                if c1.is_zero() && c2.is_zero() && c3.is_zero() {
                    if group.matrix_pow(&m, 4) != Matrix4::identity() {
                        return Err(Error::Inconsistent(format!(
                            "characteristic polynomial is x^4 + 1 but w^4 != id for {m:?}"
                        )));
                    }
                    tally.hits += 1;
                }
            }
            Ok(tally)
        })
        .collect::<Result<Vec<_>>>()?;

    let samples = (cfg.word_samples * cfg.pair_samples) as u64;
    let all_s1: Vec<f64> = tallies.iter().flat_map(|t| t.s1.iter().copied()).collect();
    let hits: u64 = tallies.iter().map(|t| t.hits).sum();
    let sigma1 = mean(&all_s1);
    let sigma2 = hits as f64 / samples as f64;
    // Samples sharing a pair are correlated, so with several pairs the
    // spread is taken over per-pair means.
    let (h1, h2) = if cfg.pair_samples >= 2 {
        let m1: Vec<f64> = tallies.iter().map(|t| mean(&t.s1)).collect();
        let m2: Vec<f64> = tallies
            .iter()
            .map(|t| t.hits as f64 / cfg.word_samples as f64)
            .collect();
        (half_width(&m1), half_width(&m2))
    } else {
        let se = (sigma2 * (1.0 - sigma2) / samples as f64).sqrt();
        (half_width(&all_s1), 1.96 * se)
    };
    let q = group.q();
    let lq = (q as f64).ln();
    Ok(SigmaEstimate {
        q,
        word_length: cfg.word_length,
        samples,
        sigma1,
        sigma1_half_width: h1,
        sigma2,
        sigma2_half_width: h2,
        sigma2_hits: hits,
        sigma1_shape: (q as f64).powf(-1.0 / 6.0) * lq,
        sigma2_shape: (q as f64).powf(-0.5) * lq,
    })
}

pub fn sigma1_estimate(group: &Suzuki, cfg: &SigmaConfig) -> Result<(f64, f64)> {
    let e = sigma_estimate(group, cfg, PairSource::Uniform)?;
    Ok((e.sigma1, e.sigma1_half_width))
}

pub fn sigma2_estimate(group: &Suzuki, cfg: &SigmaConfig) -> Result<(f64, f64)> {
    let e = sigma_estimate(group, cfg, PairSource::Uniform)?;
    Ok((e.sigma2, e.sigma2_half_width))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn half_width(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    1.96 * (var / xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> SigmaConfig {
        SigmaConfig {
            word_length: 20,
            word_samples: 200,
            pair_samples: 50,
            seed,
        }
    }

    #[test]
    fn involution_pair_always_hits() {
        let g = Suzuki::with_degree(3).unwrap();
        let t = g.t_element();
        let e = sigma_estimate(&g, &cfg(1), PairSource::Fixed(t, t)).unwrap();
        assert_eq!(e.sigma2, 1.0);
        assert_eq!(e.sigma2_hits, e.samples);
        assert_eq!(e.sigma1, 0.0);
    }

    #[test]
    fn sigma2_matches_unipotent_fraction() {
        // c = (0,0,0) exactly on the unipotent elements; count them.
        let g = Suzuki::with_degree(3).unwrap();
        let unipotent = g
            .elements()
            .filter(|x| {
                let (a, b, c) = g.charpoly_coeffs(x);
                a.is_zero() && b.is_zero() && c.is_zero()
            })
            .count();
        assert_eq!(unipotent, 4096);
        let frac = unipotent as f64 / 29120.0;
        let e = sigma_estimate(&g, &cfg(2), PairSource::Uniform).unwrap();
        assert!(
            (e.sigma2 - frac).abs() < 3.0 * e.sigma2_half_width.max(0.01),
            "{e:?}"
        );
    }

    #[test]
    fn sigma1_at_q8_counts_ones() {
        // the only nonzero proper-subfield value in GF(8) is 1
        let g = Suzuki::with_degree(3).unwrap();
        let ones: f64 = g
            .elements()
            .map(|x| {
                let (a, b, c) = g.charpoly_coeffs(&x);
                [a, b, c].iter().filter(|v| v.0 == 1).count() as f64
            })
            .sum::<f64>()
            / 29120.0;
        let e = sigma_estimate(&g, &cfg(3), PairSource::Uniform).unwrap();
        assert!(
            (e.sigma1 - ones).abs() < 3.0 * e.sigma1_half_width.max(0.02),
            "{ones} {e:?}"
        );
    }

    #[test]
    fn reproducible() {
        let g = Suzuki::with_degree(3).unwrap();
        let a = sigma_estimate(&g, &cfg(4), PairSource::Uniform).unwrap();
        let b = sigma_estimate(&g, &cfg(4), PairSource::Uniform).unwrap();
        assert_eq!(a, b);
    }
}
