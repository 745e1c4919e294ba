//! One function per experiment; each returns the verdicts of the acceptance
//! criteria it owns plus its CSV rows.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rayon::prelude::*;

use super::config::*;
use super::{CriterionOutcome, ExperimentOutput, Metric, Status, Table};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::polycount::{
    harder_twist_audit, random_twisted, word_law_witness, zero_probability, DegreeShape, ZeroMode,
};
use crate::rng;
use crate::sl2::{exhaustive_trace_histogram, trace_concentration, Sl2};
use crate::spectral::{dense_spectrum, multiplicity_probe, second_eigenvalue, CayleyGraph};
use crate::suzuki::{GroupIndex, Matrix4, SubfieldSubgroup, Suzuki, SuzukiElement};
use crate::walks::{
    sigma_estimate, CauchySchwarz, ExactWalker, GeneratorPair, PairSource, SigmaConfig,
    SubgroupTarget,
};
use crate::words::{
    ball, closed_walks_on_tree, count_closed_walks, girth_test, psi, within_kesten_bound, Word,
};

/// Pass fractions of the pair-counting criteria.
pub const GENERATION_FRACTION: f64 = 0.99;
pub const GIRTH_FRACTION: f64 = 0.90;
pub const NONCONC_FRACTION: f64 = 0.95;
pub const SPECTRAL_FRACTION: f64 = 0.95;

/// Smallest count that is at least `fraction` of `total`.
pub fn required(fraction: f64, total: u64) -> u64 {
    (fraction * total as f64 - 1e-9).ceil() as u64
}

struct Verdict {
    pass: bool,
    detail: String,
    metrics: Vec<Metric>,
}

fn criterion(id: u8, title: &str, f: impl FnOnce() -> Result<Verdict>) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let v = f()?;
    Ok(CriterionOutcome {
        id,
        title: title.to_string(),
        status: if v.pass { Status::Pass } else { Status::Fail },
        detail: v.detail,
        metrics: v.metrics,
        elapsed: start.elapsed(),
    })
}

fn suzuki(m: u32) -> Result<Suzuki> {
    Suzuki::with_degree(m)
}

/// `q^2 (q^2 + 1) (q - 1)`, recomputed here rather than taken from the
/// group module.
fn sz_order(q: u128) -> u128 {
    q * q * (q * q + 1) * (q - 1)
}

fn exact_index(m: u32) -> Result<GroupIndex> {
    if m > 3 {
        return Err(Error::Capacity {
            what: format!("exact walk on Sz(2^{m})"),
            limit: 8,
            hint: "exact experiments need the matrix index; use q = 8",
        });
    }
    GroupIndex::enumerate(&Field::new(m)?)
}

pub fn field_check(p: &FieldCheckParams) -> Result<ExperimentOutput> {
    let c1 = criterion(1, "field laws", || {
        let mut metrics = Vec::new();
        let mut total = 0;
        for &m in &p.degrees {
            let f = Field::new(m)?;
            let q = f.order();
            let theta = (0..q)
                .into_par_iter()
                .filter(|&x| {
                    let x = Fe(x as u32);
                    f.theta(f.theta(x)) != f.square(x)
                })
                .count();
            let fermat = (1..q)
                .into_par_iter()
                .filter(|&x| f.pow(Fe(x as u32), q - 1) != Fe::ONE)
                .count();
            total += theta + fermat;
            metrics.push(Metric::new("theta_squared_failures", theta as f64).q(q));
            metrics.push(Metric::new("fermat_failures", fermat as f64).q(q));
        }
        Ok(Verdict {
            pass: total == 0,
            detail: format!("{total} failures over degrees {:?}", p.degrees),
            metrics,
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c1]))
}

pub fn enumerate(p: &EnumerateParams, seed: u64) -> Result<ExperimentOutput> {
    if p.m > 3 {
        return Err(Error::Capacity {
            what: format!("explicit enumeration of Sz(2^{})", p.m),
            limit: 8,
            hint: "the collision and factorization sweeps hold every matrix; use q = 8",
        });
    }
    let start = Instant::now();
    let g = suzuki(p.m)?;
    let f = g.field().clone();
    let q = g.q();
    let elements: Vec<SuzukiElement> = g.elements().collect();

    let mut c2 = criterion(2, "enumeration and Borel order", || {
        let expected = sz_order(q as u128);
        let expected_b = (q as u128).pow(2) * (q as u128 - 1);
        let distinct: HashSet<Matrix4> = elements.iter().map(|e| *e.matrix()).collect();
        let collisions = elements.len() - distinct.len();
        let borel = elements.iter().filter(|e| e.is_borel()).count() as u128;
        // B is the stabilizer of the first basis line: lower triangular.
        let borel_shape = elements
            .iter()
            .filter(|e| e.matrix().is_lower_triangular())
            .count() as u128;
        let n = elements.len() as u128;
        Ok(Verdict {
            pass: n == expected && borel == expected_b && borel_shape == expected_b && collisions == 0,
            detail: format!("|G| = {n} (expect {expected}), |B| = {borel} (expect {expected_b}), {collisions} collisions"),
            metrics: vec![
                Metric::new("order", n as f64).q(q),
                Metric::new("borel_order", borel as f64).q(q),
                Metric::new("collisions", collisions as f64).q(q),
            ],
        })
    })?;
    // the limit covers the enumeration too
    c2.elapsed = start.elapsed();

    let c3 = criterion(3, "closure and factorization", || {
        let t = Matrix4::antidiagonal();
        let products = (0..p.products)
            .into_par_iter()
            .filter(|&i| {
                let mut r = rng::stream(seed, "products", i);
                let (x, y) = (g.random_element(&mut r), g.random_element(&mut r));
                let m = x.matrix().mul(&f, y.matrix());
                match g.factorize(&m) {
                    Some(params) => *g.assemble(params).matrix() != m,
                    None => true,
                }
            })
            .count();
        let roundtrip = elements
            .par_iter()
            .filter(|e| g.factorize(e.matrix()) != Some(*e.params()))
            .count();
        let symplectic = elements
            .par_iter()
            .filter(|e| {
                let m = e.matrix();
                m.transpose().mul(&f, &t).mul(&f, m) != t
            })
            .count();
        let total = products + roundtrip + symplectic;
        Ok(Verdict {
            pass: total == 0,
            detail: format!(
                "{products} product, {roundtrip} round-trip, {symplectic} symplectic failures over {} elements",
                elements.len()
            ),
            metrics: vec![
                Metric::new("product_failures", products as f64).q(q),
                Metric::new("roundtrip_failures", roundtrip as f64).q(q),
                Metric::new("symplectic_failures", symplectic as f64).q(q),
            ],
        })
    })?;

    let c4 = criterion(4, "subfield subgroup", || {
        let sub = Field::new(p.sub_degree)?;
        let h = SubfieldSubgroup::new(&f, &sub)?;
        let members: Vec<SuzukiElement> = h.elements().collect();
        let expected = sz_order(sub.order() as u128);
        let scanned = elements.par_iter().filter(|e| h.contains(e)).count() as u128;
        let foreign = members
            .iter()
            .filter(|e| !h.contains(e) || !g.is_symplectic(e.matrix()))
            .count();
        let open = (0..p.closure_pairs)
            .into_par_iter()
            .filter(|&i| {
                let mut r = rng::stream(seed, "subfield-closure", i);
                let x = members.choose(&mut r).expect("nonempty");
                let y = members.choose(&mut r).expect("nonempty");
                !h.contains(&g.multiply(x, y))
            })
            .count();
        let n = members.len() as u128;
        Ok(Verdict {
            pass: n == expected && scanned == expected && foreign == 0 && open == 0,
            detail: format!(
                "|Sz({})| = {n} (scan {scanned}, expect {expected}); {open} of {} products escaped",
                sub.order(),
                p.closure_pairs
            ),
            metrics: vec![
                Metric::new("subgroup_order", n as f64).q(q),
                Metric::new("closure_failures", open as f64).q(q),
            ],
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c2, c3, c4]))
}

pub fn girth(p: &GirthParams, seed: u64) -> Result<ExperimentOutput> {
    let g = suzuki(p.m)?;
    let q = g.q();
    let pairs: Vec<GeneratorPair> = (0..p.pairs)
        .map(|i| GeneratorPair::random(&g, rng::derive_seed(seed, "girth-pair", i)))
        .collect();

    let mut generates = Vec::new();
    let c5 = criterion(5, "random pairs generate", || {
        generates = pairs.par_iter().map(|pair| pair.generates(&g)).collect();
        let n = generates.iter().filter(|&&x| x).count() as u64;
        let need = required(GENERATION_FRACTION, p.pairs);
        Ok(Verdict {
            pass: n >= need,
            detail: format!("{n} of {} pairs generate (need {need})", p.pairs),
            metrics: vec![Metric::new("generating_pairs", n as f64).q(q)],
        })
    })?;

    let mut outcomes = Vec::new();
    let c6 = criterion(6, "girth", || {
        outcomes = pairs
            .par_iter()
            .map(|pair| girth_test(&g, &pair.a, &pair.b, p.max_len))
            .collect();
        let n = outcomes.iter().filter(|o| o.passed()).count() as u64;
        let need = required(GIRTH_FRACTION, p.pairs);
        let t = g.t_element();
        let b = pairs.first().map(|x| x.b).unwrap_or(t);
        let counter = girth_test(&g, &t, &b, 2);
        let counter_ok = !counter.passed();
        let mut hist = vec![0u64; p.max_len + 1];
        for o in &outcomes {
            if let crate::words::GirthOutcome::Fail(w) = o {
                hist[w.len()] += 1;
            }
        }
        let mut metrics = vec![Metric::new("girth_pass_pairs", n as f64).q(q)];
        for (len, c) in hist.iter().enumerate().skip(1) {
            metrics.push(Metric::new(&format!("shortest_relation_len_{len}"), *c as f64).q(q));
        }
        metrics.push(Metric::new("involution_counterexample_fails", counter_ok as u8 as f64).q(q));
        Ok(Verdict {
            pass: n >= need && counter_ok,
            detail: format!(
                "{n} of {} pairs have no relation of length <= {} (need {need}); a = T gives {counter:?}",
                p.pairs, p.max_len
            ),
            metrics,
        })
    })?;

    let mut table = Table::new(&["pair", "pair_seed", "generates", "girth_pass", "relation"]);
    for (i, pair) in pairs.iter().enumerate() {
        let relation = match &outcomes[i] {
            crate::words::GirthOutcome::Pass => String::new(),
            crate::words::GirthOutcome::Fail(w) => w.to_string(),
        };
        table.push(vec![
            i.to_string(),
            pair.seed().map(|s| s.to_string()).unwrap_or_default(),
            generates[i].to_string(),
            outcomes[i].passed().to_string(),
            relation,
        ]);
    }
    Ok(ExperimentOutput {
        outcomes: vec![c5, c6],
        table: Some(table),
    })
}

pub fn walk(p: &WalkParams, seed: u64) -> Result<ExperimentOutput> {
    let c7 = criterion(7, "Kesten bound", || {
        let mut metrics = Vec::new();
        let mut bad = 0;
        for n in 0..=p.kesten_max_len {
            let count = count_closed_walks(n)? as u128;
            let tree = closed_walks_on_tree(n);
            if count != tree || !within_kesten_bound(count, n as u32) {
                bad += 1;
            }
            metrics.push(
                Metric::new(&format!("closed_walks_{n}"), count as f64)
                    .shape("(2 sqrt 3)^n", 12f64.sqrt().powi(n as i32)),
            );
        }
        Ok(Verdict {
            pass: bad == 0,
            detail: format!(
                "{bad} lengths out of bound or disagreeing with the tree count, n <= {}",
                p.kesten_max_len
            ),
            metrics,
        })
    })?;

    let g = suzuki(p.m)?;
    let q = g.q();
    let cfg = SigmaConfig {
        word_length: p.word_length,
        word_samples: p.word_samples,
        pair_samples: p.pair_samples,
        seed,
    };
    let c10 = criterion(10, "sigma_2 consistency", || {
        let (uniform_ok, mut metrics, note) = match sigma_estimate(&g, &cfg, PairSource::Uniform) {
            Ok(e) => (
                true,
                vec![
                    Metric::new("sigma1", e.sigma1)
                        .q(q)
                        .shape("q^-1/6 ln q", e.sigma1_shape),
                    Metric::new("sigma1_half_width", e.sigma1_half_width).q(q),
                    Metric::new("sigma2", e.sigma2)
                        .q(q)
                        .shape("q^-1/2 ln q", e.sigma2_shape),
                    Metric::new("sigma2_half_width", e.sigma2_half_width).q(q),
                    Metric::new("sigma2_hits", e.sigma2_hits as f64).q(q),
                ],
                format!("{} hits, all with w^4 = id", e.sigma2_hits),
            ),
            Err(Error::Inconsistent(msg)) => (false, Vec::new(), msg),
            Err(e) => return Err(e),
        };
        let t = g.t_element();
        let at_t = sigma_estimate(&g, &cfg, PairSource::Fixed(t, t))?;
        let rate_ok = at_t.sigma2_hits == at_t.samples;
        metrics.push(Metric::new("hit_rate_at_t", at_t.sigma2).q(q));
        Ok(Verdict {
            pass: uniform_ok && rate_ok,
            detail: format!("{note}; hit rate at a = b = T is {}", at_t.sigma2),
            metrics,
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c7, c10]))
}

pub fn nonconc(p: &NonconcParams, seed: u64) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let index = exact_index(p.m)?;
    let g = index.group().clone();
    let q = g.q();
    let order = index.len() as f64;
    let borel = SubgroupTarget::borel(&g);
    let sub = SubgroupTarget::subfield(&g, p.sub_degree)?;
    let borel_mask = borel.mask(&index);
    let sub_mask = sub.mask(&index);
    let borel_uniform = borel_mask.iter().filter(|&&b| b).count() as f64 / order;
    let sub_uniform = sub_mask.iter().filter(|&&b| b).count() as f64 / order;
    let threshold = (q as f64).powf(-p.delta0);
    let mut table = Table::new(&[
        "group",
        "q",
        "pair_seed",
        "target",
        "n",
        "mass",
        "half_width",
    ]);

    let mut c8 = criterion(8, "non-concentration at q = 8", || {
        let rows: Vec<(GeneratorPair, String, f64, f64)> = (0..p.pairs)
            .into_par_iter()
            .map(|i| -> Result<_> {
                let pair = GeneratorPair::random_generating(
                    &g,
                    rng::derive_seed(seed, "nonconc-pair", i),
                )?;
                let x = g.random_element(&mut rng::stream(seed, "conjugator", i));
                let conj = sub.conjugated_by(&x);
                let walker = ExactWalker::new(&index, &pair)?;
                let dist = walker.distribution(p.steps);
                let mb = crate::walks::masked_mass(&dist, &borel_mask);
                let ms = crate::walks::masked_mass(&dist, &conj.mask(&index));
                Ok((pair, conj.label(), mb, ms))
            })
            .collect::<Result<_>>()?;
        let mut good = 0u64;
        let (mut worst_b, mut worst_s) = (0f64, 0f64);
        for (pair, label, mb, ms) in &rows {
            let ok = (mb - borel_uniform).abs() <= p.tolerance
                && (ms - sub_uniform).abs() <= p.tolerance
                && *mb < threshold
                && *ms < threshold;
            good += ok as u64;
            worst_b = worst_b.max(*mb);
            worst_s = worst_s.max(*ms);
            let seed = pair.seed().map(|s| s.to_string()).unwrap_or_default();
            for (target, mass) in [(borel.label(), mb), (label.clone(), ms)] {
                table.push(vec![
                    "Sz".into(),
                    q.to_string(),
                    seed.clone(),
                    target,
                    p.steps.to_string(),
                    mass.to_string(),
                    "0".into(),
                ]);
            }
        }
        let need = required(NONCONC_FRACTION, p.pairs);
        Ok(Verdict {
            pass: good >= need,
            detail: format!(
                "{good} of {} pairs within {} of uniform and below q^-{} = {threshold:.4} (need {need})",
                p.pairs, p.tolerance, p.delta0
            ),
            metrics: vec![
                Metric::new("passing_pairs", good as f64).q(q),
                Metric::new("max_borel_mass", worst_b).q(q).shape("q^-delta0", threshold),
                Metric::new("max_subfield_mass", worst_s).q(q).shape("q^-delta0", threshold),
                Metric::new("borel_uniform", borel_uniform).q(q),
                Metric::new("subfield_uniform", sub_uniform).q(q),
            ],
        })
    })?;
    c8.elapsed = start.elapsed();

    let c9 = criterion(9, "Cauchy-Schwarz step", || {
        let max_steps = p
            .cs_n
            .iter()
            .flat_map(|&n| p.cs_m.iter().map(move |&m| (2 * n).max(n + m)))
            .max()
            .unwrap_or(0);
        let checks: Vec<Vec<CauchySchwarz>> = (0..p.cs_pairs)
            .into_par_iter()
            .map(|i| -> Result<_> {
                let pair = GeneratorPair::random(&g, rng::derive_seed(seed, "cs-pair", i));
                let walker = ExactWalker::new(&index, &pair)?;
                let mut out = Vec::new();
                for mask in [&borel_mask, &sub_mask] {
                    let counts = walker.subgroup_counts(mask, max_steps)?;
                    for &n in &p.cs_n {
                        for &m in &p.cs_m {
                            out.push(CauchySchwarz::from_counts(&counts, n, m)?);
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let all: Vec<&CauchySchwarz> = checks.iter().flatten().collect();
        let bad = all.iter().filter(|c| !c.holds).count();
        let slack = all
            .iter()
            .filter(|c| c.rhs > 0.0)
            .map(|c| c.lhs / c.rhs)
            .fold(0f64, f64::max);
        Ok(Verdict {
            pass: bad == 0,
            detail: format!("{bad} of {} exact comparisons fail", all.len()),
            metrics: vec![
                Metric::new("comparisons", all.len() as f64).q(q),
                Metric::new("failures", bad as f64).q(q),
                Metric::new("max_lhs_over_rhs", slack).q(q),
            ],
        })
    })?;
    Ok(ExperimentOutput {
        outcomes: vec![c8, c9],
        table: Some(table),
    })
}

pub fn spectral(p: &SpectralParams, seed: u64) -> Result<ExperimentOutput> {
    let index = exact_index(p.m)?;
    let g = index.group().clone();
    let q = g.q();
    let c15 = criterion(15, "spectral gap", || {
        let reports = (0..p.pairs)
            .into_par_iter()
            .map(|i| -> Result<_> {
                let pair = GeneratorPair::random_generating(
                    &g,
                    rng::derive_seed(seed, "spectral-pair", i),
                )?;
                let graph = CayleyGraph::from_index(&index, &pair)?;
                let r = second_eigenvalue(
                    &graph,
                    p.lanczos_tol,
                    p.max_iter,
                    rng::derive_seed(seed, "lanczos", i),
                )?;
                Ok((graph, r))
            })
            .collect::<Result<Vec<_>>>()?;
        let limit = 1.0 - p.gap;
        let good = reports
            .iter()
            .filter(|(_, r)| !r.inconclusive && r.lambda2 + r.lambda2_residual < limit)
            .count() as u64;
        let need = required(SPECTRAL_FRACTION, p.pairs);
        let worst = reports
            .iter()
            .map(|(_, r)| r.lambda2)
            .fold(f64::MIN, f64::max);

        // toy graphs against the dense solver and closed forms
        let k5 = CayleyGraph::cyclic(5, 1, 2)?;
        let z8 = CayleyGraph::cyclic(8, 1, 2)?;
        let k5_dense = dense_spectrum(&k5)?;
        let z8_dense = dense_spectrum(&z8)?;
        let k5_dense_mm = k5_dense[1].max(-k5_dense[k5_dense.len() - 1]);
        let k5_lanczos = second_eigenvalue(&k5, p.lanczos_tol, p.max_iter, seed)?.max_modulus;
        let z8_lanczos = second_eigenvalue(&z8, p.lanczos_tol, p.max_iter, seed)?.lambda2;
        let z8_exact = (std::f64::consts::PI / 4.0).cos() / 2.0;
        let tol = p.toy_tolerance;
        let toys_ok = (k5_lanczos - 0.25).abs() <= tol
            && (k5_dense_mm - 0.25).abs() <= tol
            && (z8_lanczos - z8_exact).abs() <= tol
            && (z8_dense[1] - z8_exact).abs() <= tol;

        let mut metrics = vec![
            Metric::new("gap_pairs", good as f64).q(q),
            Metric::new("max_lambda2", worst).q(q),
            Metric::new("k5_max_modulus", k5_lanczos),
            Metric::new("k5_dense_max_modulus", k5_dense_mm),
            Metric::new("z8_lambda2", z8_lanczos),
            Metric::new("z8_dense_lambda2", z8_dense[1]),
        ];
        // report-only: size of the lambda_2 cluster of the first pair
        if let Some((graph, r)) = reports.first() {
            let mult = multiplicity_probe(
                graph,
                r.lambda2,
                p.multiplicity_tol,
                p.multiplicity_budget,
                seed,
            )?;
            metrics.push(
                Metric::new("lambda2_multiplicity", mult.count as f64)
                    .q(q)
                    .shape("q^3/2", (q as f64).powf(1.5)),
            );
            metrics.push(
                Metric::new(
                    "lambda2_multiplicity_budget_exhausted",
                    mult.budget_exhausted as u8 as f64,
                )
                .q(q),
            );
        }
        Ok(Verdict {
            pass: good >= need && toys_ok,
            detail: format!(
                "{good} of {} pairs with lambda2 < {limit} (need {need}); toy graphs {}",
                p.pairs,
                if toys_ok { "match" } else { "MISMATCH" }
            ),
            metrics,
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c15]))
}

pub fn polycount(p: &PolycountParams, seed: u64) -> Result<ExperimentOutput> {
    let c11 = criterion(11, "twisted Schwartz-Zippel", || {
        let mut metrics = Vec::new();
        let mut violations = 0u64;
        for &m in &p.twisted_degrees {
            let f = Field::new(m)?;
            let q = f.order();
            let theta1 = f.theta_exponent() + 1;
            for &k in &p.twisted_ks {
                for &d in &p.twisted_ds {
                    let label = format!("q{q}-k{k}-d{d}");
                    let mut checked = 0usize;
                    let mut skipped = 0u64;
                    let mut worst = 0f64;
                    let mut idx = 0u64;
                    while checked < p.twisted_samples {
                        let batch: Vec<_> = (idx..idx + p.twisted_samples as u64)
                            .into_par_iter()
                            .map(|i| -> Result<_> {
                                let mut r = rng::stream(seed, &format!("twisted-{label}"), i);
                                let poly = random_twisted(&f, k, d, &mut r);
                                zero_probability(&poly, ZeroMode::Exact, seed)
                            })
                            .collect::<Result<_>>()?;
                        idx += p.twisted_samples as u64;
                        for z in batch {
                            if checked == p.twisted_samples {
                                break;
                            }
                            if !z.certified_nonzero {
                                skipped += 1;
                                continue;
                            }
                            checked += 1;
                            // zeros / q^k <= k d (theta + 1) / q, in integers
                            if z.zeros as u128 * q as u128
                                > (k as u128) * (d as u128) * theta1 as u128 * z.points as u128
                            {
                                violations += 1;
                            }
                            worst = worst.max(z.fraction);
                        }
                    }
                    let bound = (k * d) as f64 * theta1 as f64 / q as f64;
                    metrics.push(
                        Metric::new(&format!("max_zero_fraction_k{k}_d{d}"), worst)
                            .q(q)
                            .shape("k d (theta+1)/q", bound),
                    );
                    metrics.push(
                        Metric::new(
                            &format!("identically_zero_skipped_k{k}_d{d}"),
                            skipped as f64,
                        )
                        .q(q),
                    );
                }
            }
        }
        Ok(Verdict {
            pass: violations == 0,
            detail: format!("{violations} violations"),
            metrics,
        })
    })?;

    let c12 = criterion(12, "harder twist root bound", || {
        let mut metrics = Vec::new();
        let mut violations = 0usize;
        let mut mismatches = 0usize;
        let mut notes = Vec::new();
        for &m in &p.degrees {
            let f = Field::new(m)?;
            let q = f.order();
            for &d in &p.ds {
                let s = rng::derive_seed(seed, "harder-twist", (m as u64) << 8 | d as u64);
                let cross = q <= p.cross_validate_max_q;
                let a = harder_twist_audit(&f, d, DegreeShape::PerVariable, p.samples, s, cross)?;
                violations += a.violations;
                mismatches += a.mismatches;
                if a.violations > 0 {
                    notes.push(format!("q={q} d={d}: max {} > {}", a.max_count, a.bound));
                }
                metrics.push(
                    Metric::new(&format!("max_count_d{d}"), a.max_count as f64)
                        .q(q)
                        .shape("2 d^2", a.bound as f64),
                );
                metrics.push(Metric::new(&format!("violations_d{d}"), a.violations as f64).q(q));
                // supplementary: the same audit with total degree <= d
                let t = harder_twist_audit(&f, d, DegreeShape::Total, p.samples, s, false)?;
                metrics.push(
                    Metric::new(&format!("total_degree_max_count_d{d}"), t.max_count as f64)
                        .q(q)
                        .shape("2 d^2", t.bound as f64),
                );
            }
        }
        Ok(Verdict {
            pass: violations == 0 && mismatches == 0,
            detail: format!(
                "{violations} violations, {mismatches} cross-validation mismatches{}{}",
                if notes.is_empty() { "" } else { "; " },
                notes.join(", ")
            ),
            metrics,
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c11, c12]))
}

pub fn wordlaw(p: &WordlawParams, seed: u64) -> Result<ExperimentOutput> {
    let g = suzuki(p.m)?;
    let q = g.q();
    let c13 = criterion(13, "no short word laws", || {
        let words: Vec<Word> = ball(p.max_len)?
            .into_iter()
            .filter(|w| !w.is_identity())
            .collect();
        let results = words
            .par_iter()
            .map(|w| word_law_witness(&g, w, p.attempts, seed))
            .collect::<Result<Vec<_>>>()?;
        let missing: Vec<&Word> = words
            .iter()
            .zip(&results)
            .filter(|(_, r)| !r.found())
            .map(|(w, _)| w)
            .collect();
        let last = results
            .iter()
            .filter_map(|r| match r {
                crate::polycount::WitnessOutcome::Found { attempt, .. } => Some(*attempt),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Ok(Verdict {
            pass: missing.is_empty(),
            detail: format!(
                "{} of {} words ({} up to inversion) without a witness in {} attempts{}",
                missing.len(),
                words.len(),
                words.len() / 2,
                p.attempts,
                missing
                    .first()
                    .map(|w| format!(", e.g. {w}"))
                    .unwrap_or_default()
            ),
            metrics: vec![
                Metric::new("words", words.len() as f64).q(q),
                Metric::new("words_without_witness", missing.len() as f64).q(q),
                Metric::new("latest_witness_attempt", last as f64)
                    .q(q)
                    .shape("q^1/2", (q as f64).sqrt()),
            ],
        })
    })?;

    let c14 = criterion(14, "Borel is 3-step solvable", || {
        let id = g.identity_element();
        let count = |domain: &str, borel: bool| -> Result<u64> {
            let hits = (0..p.tuples)
                .into_par_iter()
                .map(|i| -> Result<bool> {
                    let mut r = rng::stream(seed, domain, i);
                    let tuple: Vec<SuzukiElement> = (0..8)
                        .map(|_| {
                            if borel {
                                g.random_borel(&mut r)
                            } else {
                                g.random_element(&mut r)
                            }
                        })
                        .collect();
                    Ok(psi(&g, 3, &tuple)? != id)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(hits.into_iter().filter(|&x| x).count() as u64)
        };
        let borel_nonzero = count("psi-borel", true)?;
        let full_nonzero = count("psi-full", false)?;
        Ok(Verdict {
            pass: borel_nonzero == 0 && full_nonzero >= 1,
            detail: format!(
                "psi_3 nontrivial on {borel_nonzero} Borel tuples and {full_nonzero} full-group tuples of {}",
                p.tuples
            ),
            metrics: vec![
                Metric::new("borel_nontrivial", borel_nonzero as f64).q(q),
                Metric::new("full_nontrivial", full_nonzero as f64).q(q),
            ],
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c13, c14]))
}

pub fn sl2_trace(p: &Sl2TraceParams, seed: u64) -> Result<ExperimentOutput> {
    let c16 = criterion(16, "SL2 trace track", || {
        let g = Sl2::with_degree(p.m)?;
        let q = g.q();
        let expected = q as u128 * (q as u128 * q as u128 - 1);
        let by_strata = g.elements().count() as u128;
        let by_det = g.enumerate_by_determinant()?.len() as u128;
        let w: Word = "abAB".parse()?;
        let exact = exhaustive_trace_histogram(&g, &w)?;
        let mc = trace_concentration(&g, &w, p.samples, seed)?;
        let n = mc.samples as f64;
        let mut worst = 0f64;
        let mut bins_ok = true;
        for (e, s) in exact.histogram.iter().zip(&mc.histogram) {
            let prob = *e as f64 / exact.samples as f64;
            let sd = (n * prob * (1.0 - prob)).sqrt();
            let dev = (*s as f64 - n * prob).abs();
            if sd == 0.0 {
                bins_ok &= dev == 0.0;
            } else {
                worst = worst.max(dev / sd);
                bins_ok &= dev <= p.sigmas * sd;
            }
        }
        let big = Sl2::with_degree(p.report_degree)?;
        let report = trace_concentration(&big, &w, p.samples, seed)?;
        let qb = big.q();
        Ok(Verdict {
            pass: by_strata == expected && by_det == expected && bins_ok,
            detail: format!(
                "|SL2({q})| = {by_strata} / {by_det} (expect {expected}); worst bin {worst:.2} sigma; \
                 q = {qb} max trace mass {:.5} (report only)",
                report.max_mass
            ),
            metrics: vec![
                Metric::new("order", by_strata as f64).q(q),
                Metric::new("worst_bin_sigmas", worst).q(q),
                Metric::new("max_trace_mass", exact.max_mass).q(q).shape("q^-1", 1.0 / q as f64),
                Metric::new("max_trace_mass", report.max_mass).q(qb).shape("q^-1", 1.0 / qb as f64),
                Metric::new("max_trace_mass_times_q", report.max_mass_times_q).q(qb),
                Metric::new("trace_nonconstant", report.nonconstant as u8 as f64).q(qb),
            ],
        })
    })?;
    Ok(ExperimentOutput::metrics(vec![c16]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_counts() {
        assert_eq!(required(0.99, 100), 99);
        assert_eq!(required(0.90, 100), 90);
        assert_eq!(required(0.95, 50), 48);
        assert_eq!(required(0.95, 100), 95);
        assert_eq!(required(1.0, 7), 7);
    }

    #[test]
    fn order_formula() {
        assert_eq!(sz_order(2), 20);
        assert_eq!(sz_order(8), 29120);
        assert_eq!(sz_order(32), 32_537_600);
    }
}
