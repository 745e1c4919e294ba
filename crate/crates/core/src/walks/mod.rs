//! The symmetric random walk driven by `{a, a^-1, b, b^-1}` and subgroup
//! non-concentration measurements.

mod sigma;
mod target;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::suzuki::{Generation, GroupIndex, Matrix4, Suzuki, SuzukiElement};

pub use sigma::{
    sigma1_estimate, sigma2_estimate, sigma_estimate, PairSource, SigmaConfig, SigmaEstimate,
};
pub use target::{SubgroupTarget, TargetTag};

/// Largest `n * trials` accepted by [`sample_walk`].
pub const WALK_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Drawn from `rng::stream(seed, "pair", attempt)`.
    Seed {
        seed: u64,
        attempt: u64,
    },
    Explicit,
}

#[derive(Clone, Debug)]
pub struct GeneratorPair {
    pub a: SuzukiElement,
    pub b: SuzukiElement,
    pub provenance: Provenance,
}

impl GeneratorPair {
    pub fn explicit(a: SuzukiElement, b: SuzukiElement) -> GeneratorPair {
        GeneratorPair {
            a,
            b,
            provenance: Provenance::Explicit,
        }
    }

    /// Uniform pair.
    pub fn random(group: &Suzuki, seed: u64) -> GeneratorPair {
        Self::attempt(group, seed, 0)
    }

    fn attempt(group: &Suzuki, seed: u64, attempt: u64) -> GeneratorPair {
        let mut r = rng::stream(seed, "pair", attempt);
        GeneratorPair {
            a: group.random_element(&mut r),
            b: group.random_element(&mut r),
            provenance: Provenance::Seed { seed, attempt },
        }
    }

    /// First uniform pair (over attempts `0, 1, ...`) that generates the whole
    /// group. Needs a group small enough for a closure search.
    pub fn random_generating(group: &Suzuki, seed: u64) -> Result<GeneratorPair> {
        const MAX_ORDER: u128 = 1 << 20;
        if group.order() > MAX_ORDER {
            return Err(Error::Capacity {
                what: "generation check".into(),
                limit: MAX_ORDER as u64,
                hint: "use GeneratorPair::random for large q",
            });
        }
        for attempt in 0..1000 {
            let p = Self::attempt(group, seed, attempt);
            if p.generates(group) {
                return Ok(p);
            }
        }
        Err(Error::Inconsistent(
            "no generating pair in 1000 attempts".into(),
        ))
    }

    pub fn generates(&self, group: &Suzuki) -> bool {
        group.generates(&self.a, &self.b, u64::MAX) == Generation::Generates
    }

    pub fn seed(&self) -> Option<u64> {
        match self.provenance {
            Provenance::Seed { seed, .. } => Some(seed),
            Provenance::Explicit => None,
        }
    }

    /// `(a, a^-1, b, b^-1)`.
    pub fn steps(&self, group: &Suzuki) -> [SuzukiElement; 4] {
        [
            self.a,
            group.inverse(&self.a),
            self.b,
            group.inverse(&self.b),
        ]
    }
}

#[derive(Clone, Debug)]
pub enum WalkDistribution {
    /// Finitely many weighted points; any q.
    Atoms(Vec<(SuzukiElement, f64)>),
    /// Probability per rank of a [`GroupIndex`].
    Exact(Vec<f64>),
    Sampled {
        endpoints: Vec<SuzukiElement>,
        steps: usize,
        trials: u64,
        seed: u64,
    },
}

impl WalkDistribution {
    pub fn total_mass(&self) -> f64 {
        match self {
            WalkDistribution::Atoms(a) => a.iter().map(|(_, p)| p).sum(),
            WalkDistribution::Exact(v) => v.iter().sum(),
            WalkDistribution::Sampled { .. } => 1.0,
        }
    }
}

/// One step of the walk: `1/4` on each of `a, a^-1, b, b^-1`, merged where
/// points coincide.
pub fn mu(group: &Suzuki, pair: &GeneratorPair) -> WalkDistribution {
    let mut atoms: Vec<(SuzukiElement, f64)> = Vec::new();
    for s in pair.steps(group) {
        match atoms.iter_mut().find(|(g, _)| *g == s) {
            Some((_, p)) => *p += 0.25,
            None => atoms.push((s, 0.25)),
        }
    }
    WalkDistribution::Atoms(atoms)
}

/// Exact transition operator on an enumerated group.
pub struct ExactWalker<'a> {
    index: &'a GroupIndex,
    table: Vec<[u32; 4]>,
    identity: u32,
}

impl<'a> ExactWalker<'a> {
    /// Fails unless the index holds matrices (q <= 8).
    pub fn new(index: &'a GroupIndex, pair: &GeneratorPair) -> Result<ExactWalker<'a>> {
        let table = index.action_table(&pair.a, &pair.b)?;
        Ok(ExactWalker {
            index,
            table,
            identity: index.identity_rank(),
        })
    }

    pub fn index(&self) -> &GroupIndex {
        self.index
    }

    pub fn table(&self) -> &[[u32; 4]] {
        &self.table
    }

    pub fn delta_identity(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.table.len()];
        v[self.identity as usize] = 1.0;
        v
    }

    /// `v'(y) = 1/4 sum_s v(y s)`; the generator multiset is closed under
    /// inversion, so this is convolution with the step measure.
    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        self.table
            .par_iter()
            .map(|row| {
                0.25 * (v[row[0] as usize]
                    + v[row[1] as usize]
                    + v[row[2] as usize]
                    + v[row[3] as usize])
            })
            .collect()
    }

    pub fn convolve(&self, v: &[f64], steps: usize) -> Vec<f64> {
        let mut v = v.to_vec();
        for _ in 0..steps {
            v = self.step(&v);
        }
        v
    }

    /// Exact n-step distribution from the identity.
    pub fn distribution(&self, steps: usize) -> Vec<f64> {
        self.convolve(&self.delta_identity(), steps)
    }

    /// `counts[k]` is the number of length-`k` generator strings whose product
    /// lies in the masked set, for `k = 0..=max_steps`.
    pub fn subgroup_counts(&self, mask: &[bool], max_steps: usize) -> Result<Vec<u128>> {
        if max_steps > 63 {
            return Err(Error::Capacity {
                what: "exact walk counts".into(),
                limit: 63,
                hint: "4^n must fit in u128",
            });
        }
        let mut v: Vec<u128> = vec![0; self.table.len()];
        v[self.identity as usize] = 1;
        let mut out = Vec::with_capacity(max_steps + 1);
        for k in 0..=max_steps {
            if k > 0 {
                v = self
                    .table
                    .par_iter()
                    .map(|row| row.iter().map(|&x| v[x as usize]).sum())
                    .collect();
            }
            out.push(
                v.iter()
                    .zip(mask)
                    .filter(|(_, &m)| m)
                    .map(|(c, _)| *c)
                    .sum(),
            );
        }
        Ok(out)
    }

    /// Rank of the inverse of each element.
    pub fn inverse_ranks(&self) -> Vec<u32> {
        let g = self.index.group();
        (0..self.table.len() as u64)
            .into_par_iter()
            .map(|r| self.index.index_of(&g.inverse(&self.index.element(r))))
            .collect()
    }
}

/// Applies `steps` transitions. Atoms are first placed on the index; sampled
/// distributions are rejected.
pub fn convolve_exact(
    walker: &ExactWalker<'_>,
    dist: &WalkDistribution,
    steps: usize,
) -> Result<WalkDistribution> {
    let v = match dist {
        WalkDistribution::Exact(v) => {
            if v.len() != walker.table.len() {
                return Err(Error::InvalidParameter(
                    "distribution length does not match the index".into(),
                ));
            }
            v.clone()
        }
        WalkDistribution::Atoms(atoms) => {
            let mut v = vec![0.0; walker.table.len()];
            for (g, p) in atoms {
                v[walker.index.index_of(g) as usize] += p;
            }
            v
        }
        WalkDistribution::Sampled { .. } => {
            return Err(Error::InvalidParameter(
                "exact convolution needs an exact distribution".into(),
            ))
        }
    };
    Ok(WalkDistribution::Exact(walker.convolve(&v, steps)))
}

/// `trials` independent `n`-step walks from the identity; trial `t` draws its
/// steps from `rng::stream(seed, "walk", t)`.
pub fn sample_walk(
    group: &Suzuki,
    pair: &GeneratorPair,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<WalkDistribution> {
    let work = (n as u64).saturating_mul(trials);
    if work > WALK_BUDGET {
        return Err(Error::Capacity {
            what: "n * trials".into(),
            limit: WALK_BUDGET,
            hint: "reduce the walk length or the trial count",
        });
    }
    let f = group.field();
    let gens: Vec<Matrix4> = pair.steps(group).iter().map(|s| *s.matrix()).collect();
    let endpoints = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, "walk", t);
            let mut m = Matrix4::identity();
            for _ in 0..n {
                m = m.mul(f, &gens[r.random_range(0..4usize)]);
            }
            group.element(&m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WalkDistribution::Sampled {
        endpoints,
        steps: n,
        trials,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassEstimate {
    pub mass: f64,
    /// 95% normal-approximation half-width; 0 for exact masses.
    pub half_width: f64,
    /// Binomial standard error; 0 for exact masses.
    pub std_error: f64,
}

impl MassEstimate {
    pub fn exact(mass: f64) -> MassEstimate {
        MassEstimate {
            mass,
            half_width: 0.0,
            std_error: 0.0,
        }
    }

    pub fn binomial(hits: u64, trials: u64) -> MassEstimate {
        let p = hits as f64 / trials.max(1) as f64;
        let se = (p * (1.0 - p) / trials.max(1) as f64).sqrt();
        MassEstimate {
            mass: p,
            half_width: 1.96 * se,
            std_error: se,
        }
    }
}

/// Mass of `mask` under an exact distribution.
pub fn masked_mass(v: &[f64], mask: &[bool]) -> f64 {
    v.iter().zip(mask).filter(|(_, &m)| m).map(|(p, _)| p).sum()
}

/// Mass the distribution puts on `target`. Exact distributions need the
/// index they were computed on.
pub fn subgroup_mass(
    dist: &WalkDistribution,
    target: &SubgroupTarget,
    index: Option<&GroupIndex>,
) -> Result<MassEstimate> {
    match dist {
        WalkDistribution::Atoms(atoms) => Ok(MassEstimate::exact(
            atoms
                .iter()
                .filter(|(g, _)| target.contains(g))
                .map(|(_, p)| p)
                .sum(),
        )),
        WalkDistribution::Exact(v) => {
            let index = index.ok_or_else(|| {
                Error::InvalidParameter("exact distributions need their group index".into())
            })?;
            Ok(MassEstimate::exact(masked_mass(v, &target.mask(index))))
        }
        WalkDistribution::Sampled {
            endpoints, trials, ..
        } => {
            let hits = endpoints.par_iter().filter(|g| target.contains(g)).count() as u64;
            Ok(MassEstimate::binomial(hits, *trials))
        }
    }
}

/// Total-variation distance of an exact distribution from uniform.
pub fn tv_to_uniform(v: &[f64]) -> f64 {
    let u = 1.0 / v.len() as f64;
    0.5 * v.iter().map(|p| (p - u).abs()).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchySchwarz {
    pub n: usize,
    pub m: usize,
    /// `mu^(n+m)(H)`.
    pub lhs: f64,
    /// `mu^(2n)(H)^(1/2)`.
    pub rhs: f64,
    /// Number of length-`(n+m)` strings landing in `H`.
    pub count_lhs: u128,
    /// Number of length-`2n` strings landing in `H`.
    pub count_rhs: u128,
    /// Exact integer comparison `count_lhs^2 <= count_rhs * 4^(2m)`.
    pub holds: bool,
}

impl CauchySchwarz {
    /// From the string counts of [`ExactWalker::subgroup_counts`].
    pub fn from_counts(counts: &[u128], n: usize, m: usize) -> Result<CauchySchwarz> {
        let need = (2 * n).max(n + m);
        if counts.len() <= need {
            return Err(Error::InvalidParameter(format!(
                "counts up to step {need} are required"
            )));
        }
        let (cl, cr) = (counts[n + m], counts[2 * n]);
        let overflow = || Error::Capacity {
            what: "Cauchy-Schwarz integer comparison".into(),
            limit: 127,
            hint: "use smaller n and m",
        };
        let left = cl.checked_mul(cl).ok_or_else(overflow)?;
        let scale = 1u128.checked_shl(4 * m as u32).ok_or_else(overflow)?;
        let right = cr.checked_mul(scale).ok_or_else(overflow)?;
        Ok(CauchySchwarz {
            n,
            m,
            lhs: cl as f64 / 4f64.powi((n + m) as i32),
            rhs: (cr as f64 / 4f64.powi(2 * n as i32)).sqrt(),
            count_lhs: cl,
            count_rhs: cr,
            holds: left <= right,
        })
    }
}

pub fn cauchy_schwarz_check(
    walker: &ExactWalker<'_>,
    target: &SubgroupTarget,
    n: usize,
    m: usize,
) -> Result<CauchySchwarz> {
    let counts = walker.subgroup_counts(&target.mask(walker.index()), (2 * n).max(n + m))?;
    CauchySchwarz::from_counts(&counts, n, m)
}

/// `ceil(C ln q)` for `C` in `{5, 10, 20, 40}`.
pub fn default_schedule(q: u64) -> Vec<usize> {
    [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|c: &f64| (c * (q as f64).ln()).ceil() as usize)
        .collect()
}

#[derive(Clone, Debug)]
pub struct NonconcConfig {
    pub n_schedule: Vec<usize>,
    pub delta0: f64,
    /// Conjugates `x^-1 H x` added per target, with `x` drawn from
    /// `rng::stream(seed, "conjugator", j)`.
    pub conjugators: usize,
    /// Trials per schedule entry in sampled mode.
    pub trials: u64,
    pub seed: u64,
}

impl NonconcConfig {
    pub fn new(q: u64, seed: u64) -> NonconcConfig {
        NonconcConfig {
            n_schedule: default_schedule(q),
            delta0: 0.25,
            conjugators: 1,
            trials: 10_000,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonconcRow {
    pub q: u64,
    pub pair_seed: Option<u64>,
    pub target: String,
    pub n: usize,
    pub mass: f64,
    pub half_width: f64,
    /// `q^-delta0`.
    pub threshold: f64,
    pub flagged: bool,
}

/// Masses of each target and its sampled conjugates along the schedule.
/// Exact when an index with matrices is supplied, sampled otherwise.
pub fn nonconcentration_report(
    group: &Suzuki,
    index: Option<&GroupIndex>,
    pair: &GeneratorPair,
    targets: &[SubgroupTarget],
    cfg: &NonconcConfig,
) -> Result<Vec<NonconcRow>> {
    let q = group.q();
    let threshold = (q as f64).powf(-cfg.delta0);
    let mut all = Vec::new();
    for t in targets {
        all.push(t.clone());
        for j in 0..cfg.conjugators {
            let x = group.random_element(&mut rng::stream(cfg.seed, "conjugator", j as u64));
            all.push(t.conjugated_by(&x));
        }
    }
    let mut schedule = cfg.n_schedule.clone();
    schedule.sort_unstable();
    schedule.dedup();

    let row = |t: &SubgroupTarget, n: usize, est: MassEstimate| NonconcRow {
        q,
        pair_seed: pair.seed(),
        target: t.label(),
        n,
        mass: est.mass,
        half_width: est.half_width,
        threshold,
        flagged: est.mass >= threshold,
    };
    let mut rows = Vec::new();
    match index {
        Some(idx) => {
            let walker = ExactWalker::new(idx, pair)?;
            let masks: Vec<Vec<bool>> = all.iter().map(|t| t.mask(idx)).collect();
            let mut v = walker.delta_identity();
            let mut at = 0;
            for &n in &schedule {
                v = walker.convolve(&v, n - at);
                at = n;
                for (t, mask) in all.iter().zip(&masks) {
                    rows.push(row(t, n, MassEstimate::exact(masked_mass(&v, mask))));
                }
            }
        }
        None => {
            for &n in &schedule {
                let dist = sample_walk(
                    group,
                    pair,
                    n,
                    cfg.trials,
                    rng::derive_seed(cfg.seed, "nonconc", n as u64),
                )?;
                for t in &all {
                    rows.push(row(t, n, subgroup_mass(&dist, t, None)?));
                }
            }
        }
    }
    Ok(rows)
}
