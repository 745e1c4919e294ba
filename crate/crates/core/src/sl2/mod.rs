//! SL2(q) in characteristic 2: the simpler comparison group for trace
//! concentration and subfield non-concentration.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::group::Group;
use crate::rng;
use crate::walks::MassEstimate;
use crate::words::{evaluate, Word};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2Element([[Fe; 2]; 2]);

impl fmt::Debug for Sl2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl Sl2Element {
    pub fn entries(&self) -> [[Fe; 2]; 2] {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct Sl2 {
    field: Field,
}

impl Sl2 {
    pub fn new(field: Field) -> Sl2 {
        Sl2 { field }
    }

    /// `SL2(2^m)` for any `1 <= m <= 31`.
    pub fn with_degree(m: u32) -> Result<Sl2> {
        Ok(Sl2::new(Field::new_any(m)?))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    /// `q (q^2 - 1)`.
    pub fn order(&self) -> u128 {
        let q = self.q() as u128;
        q * (q * q - 1)
    }

    pub fn det(&self, m: &[[Fe; 2]; 2]) -> Fe {
        let f = &self.field;
        f.add(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]))
    }

    pub fn element(&self, m: [[Fe; 2]; 2]) -> Result<Sl2Element> {
        for row in &m {
            for &x in row {
                self.field.check(x)?;
            }
        }
        if self.det(&m) != Fe::ONE {
            return Err(Error::InvalidParameter("determinant is not 1".into()));
        }
        Ok(Sl2Element(m))
    }

    pub fn trace(&self, g: &Sl2Element) -> Fe {
        self.field.add(g.0[0][0], g.0[1][1])
    }

    /// Uniform element. The chart `t1 != 0`, `((t1, t2), (t3, (t2 t3 + 1)/t1))`,
    /// covers `q^2 (q-1)` elements; the stratum `t1 = 0`, `((0, c^-1), (c, d))`,
    /// the remaining `q (q-1)`, so it is chosen with probability `1/(q+1)`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Sl2Element {
        let f = &self.field;
        if rng.random_range(0..self.q() + 1) == 0 {
            let c = f.random_nonzero(rng);
            let d = f.random(rng);
            Sl2Element([[Fe::ZERO, f.inv_nonzero(c)], [c, d]])
        } else {
            let t1 = f.random_nonzero(rng);
            let t2 = f.random(rng);
            let t3 = f.random(rng);
            let t4 = f.mul(f.add(f.mul(t2, t3), Fe::ONE), f.inv_nonzero(t1));
            Sl2Element([[t1, t2], [t3, t4]])
        }
    }

    /// All elements via the two strata.
    pub fn elements(&self) -> impl Iterator<Item = Sl2Element> + '_ {
        let f = &self.field;
        let chart = f.nonzero_elements().flat_map(move |t1| {
            f.elements().flat_map(move |t2| {
                f.elements().map(move |t3| {
                    let t4 = f.mul(f.add(f.mul(t2, t3), Fe::ONE), f.inv_nonzero(t1));
                    Sl2Element([[t1, t2], [t3, t4]])
                })
            })
        });
        let stratum = f.nonzero_elements().flat_map(move |c| {
            f.elements()
                .map(move |d| Sl2Element([[Fe::ZERO, f.inv_nonzero(c)], [c, d]]))
        });
        chart.chain(stratum)
    }

    /// Brute force over all `q^4` matrices; `q <= 16`.
    pub fn enumerate_by_determinant(&self) -> Result<Vec<Sl2Element>> {
        if self.q() > 16 {
            return Err(Error::Capacity {
                what: "matrix enumeration".into(),
                limit: 16,
                hint: "use Sl2::elements",
            });
        }
        let q = self.q() as u32;
        let mut out = Vec::new();
        for bits in 0..q.pow(4) {
            let e = |k: u32| Fe((bits / q.pow(k)) % q);
            let m = [[e(0), e(1)], [e(2), e(3)]];
            if self.det(&m) == Fe::ONE {
                out.push(Sl2Element(m));
            }
        }
        Ok(out)
    }
}

impl Group for Sl2 {
    type Elem = Sl2Element;

    fn identity(&self) -> Sl2Element {
        Sl2Element([[Fe::ONE, Fe::ZERO], [Fe::ZERO, Fe::ONE]])
    }

    fn mul(&self, x: &Sl2Element, y: &Sl2Element) -> Sl2Element {
        let f = &self.field;
        let (a, b) = (&x.0, &y.0);
        let e = |i: usize, j: usize| f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
        Sl2Element([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Adjugate; signs vanish in characteristic 2.
    fn inv(&self, x: &Sl2Element) -> Sl2Element {
        let m = &x.0;
        Sl2Element([[m[1][1], m[0][1]], [m[1][0], m[0][0]]])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub group: &'static str,
    pub q: u64,
    pub word: Word,
    pub samples: u64,
    /// Counts indexed by the trace's bit pattern.
    pub histogram: Vec<u64>,
    pub max_mass: f64,
    pub argmax: u32,
    /// `max_mass * q`: the point mass measured against `q^-1`.
    pub max_mass_times_q: f64,
    /// Two sampled pairs gave different traces.
    pub nonconstant: bool,
}

pub const MIN_TRACE_SAMPLES: u64 = 10_000;

fn report(group: &Sl2, w: &Word, histogram: Vec<u64>, samples: u64) -> TraceReport {
    let (argmax, &max) = histogram
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .expect("nonempty");
    let q = group.q();
    let max_mass = max as f64 / samples as f64;
    TraceReport {
        group: "SL2",
        q,
        word: w.clone(),
        samples,
        nonconstant: histogram.iter().filter(|&&c| c > 0).count() > 1,
        histogram,
        max_mass,
        argmax: argmax as u32,
        max_mass_times_q: max_mass * q as f64,
    }
}

/// Empirical distribution of `tr w(a, b)` over uniform pairs; pair `i` comes
/// from `rng::stream(seed, "sl2-trace", i)`.
pub fn trace_concentration(
    group: &Sl2,
    w: &Word,
    pair_samples: u64,
    seed: u64,
) -> Result<TraceReport> {
    if w.is_identity() {
        return Err(Error::InvalidParameter(
            "the trivial word has constant trace".into(),
        ));
    }
    if pair_samples < MIN_TRACE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "trace concentration needs at least {MIN_TRACE_SAMPLES} samples"
        )));
    }
    let q = group.q() as usize;
    let histogram = (0..pair_samples)
        .into_par_iter()
        .fold(
            || vec![0u64; q],
            |mut h, i| {
                let mut r = rng::stream(seed, "sl2-trace", i);
                let a = group.random_element(&mut r);
                let b = group.random_element(&mut r);
                h[group.trace(&evaluate(group, w, &a, &b)).0 as usize] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; q],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(u, v)| *u += v);
                x
            },
        );
    Ok(report(group, w, histogram, pair_samples))
}

/// Trace histogram of `w` over every pair; `|G|^2` evaluations.
pub fn exhaustive_trace_histogram(group: &Sl2, w: &Word) -> Result<TraceReport> {
    if w.is_identity() {
        return Err(Error::InvalidParameter(
            "the trivial word has constant trace".into(),
        ));
    }
    if group.order() > 1 << 12 {
        return Err(Error::Capacity {
            what: "exhaustive trace histogram".into(),
            limit: 1 << 12,
            hint: "use trace_concentration",
        });
    }
    let q = group.q() as usize;
    let elems: Vec<Sl2Element> = group.elements().collect();
    let histogram = elems
        .par_iter()
        .fold(
            || vec![0u64; q],
            |mut h, a| {
                for b in &elems {
                    h[group.trace(&evaluate(group, w, a, b)).0 as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; q],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(u, v)| *u += v);
                x
            },
        );
    let n = (elems.len() * elems.len()) as u64;
    Ok(report(group, w, histogram, n))
}

/// Fraction of `n`-step walk endpoints (trial `t` from
/// `rng::stream(seed, "sl2-walk", t)`) whose trace lies in `GF(2^sub_degree)`,
/// or in the union of all proper subfields when `sub_degree` is `None`.
pub fn sl2_subfield_mass(
    group: &Sl2,
    sub_degree: Option<u32>,
    a: &Sl2Element,
    b: &Sl2Element,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<MassEstimate> {
    let f = group.field();
    let m = f.degree();
    if let Some(d) = sub_degree {
        if d == 0 || m % d != 0 {
            return Err(Error::NotSubfield { sub: d, big: m });
        }
    }
    if (n as u64).saturating_mul(trials) > crate::walks::WALK_BUDGET {
        return Err(Error::Capacity {
            what: "n * trials".into(),
            limit: crate::walks::WALK_BUDGET,
            hint: "reduce the walk length or the trial count",
        });
    }
    let gens = [*a, group.inv(a), *b, group.inv(b)];
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut r = rng::stream(seed, "sl2-walk", t);
            let mut x = group.identity();
            for _ in 0..n {
                x = group.mul(&x, &gens[r.random_range(0..4usize)]);
            }
            let tr = group.trace(&x);
            match sub_degree {
                Some(d) => f.in_subfield(tr, d),
                None => f.in_proper_subfield(tr),
            }
        })
        .count() as u64;
    Ok(MassEstimate::binomial(hits, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::proper_subfield_union_size;

    #[test]
    fn sl2_8_has_504_elements() {
        let g = Sl2::with_degree(3).unwrap();
        let brute = g.enumerate_by_determinant().unwrap();
        assert_eq!(brute.len(), 504);
        let mut strata: Vec<Sl2Element> = g.elements().collect();
        assert_eq!(strata.len() as u128, g.order());
        let key = |e: &Sl2Element| e.0.iter().flatten().map(|x| x.0).collect::<Vec<_>>();
        strata.sort_by_key(key);
        let mut b = brute.clone();
        b.sort_by_key(key);
        assert_eq!(strata, b);
        assert_eq!(brute.iter().filter(|e| e.0[0][0].is_zero()).count(), 8 * 7);
    }

    #[test]
    fn sampler_is_uniform_on_strata_and_closed() {
        let g = Sl2::with_degree(3).unwrap();
        let mut r = rng::stream(5, "sl2", 0);
        let n = 100_000;
        let mut zero = 0;
        let mut prev = g.identity();
        for _ in 0..n {
            let x = g.random_element(&mut r);
            assert_eq!(g.det(&x.0), Fe::ONE);
            if x.0[0][0].is_zero() {
                zero += 1;
            }
            prev = g.mul(&prev, &x);
            assert_eq!(g.det(&prev.0), Fe::ONE);
            assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        }
        let p = 1.0 / 9.0;
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((zero as f64 / n as f64) - p).abs() < 5.0 * sd);
        assert!(g.element([[Fe::ONE, Fe::ONE], [Fe::ONE, Fe::ONE]]).is_err());
    }

    #[test]
    fn single_letter_trace_histogram() {
        let g = Sl2::with_degree(3).unwrap();
        let ex = exhaustive_trace_histogram(&g, &Word::a()).unwrap();
        // trace of a uniform element: 504 elements, counted once per b
        let mut direct = vec![0u64; 8];
        for e in g.elements() {
            direct[g.trace(&e).0 as usize] += 504;
        }
        assert_eq!(ex.histogram, direct);
        // trace 0 is the unipotent class: q^2 elements
        assert_eq!(direct[0], 64 * 504);
        let mc = trace_concentration(&g, &Word::a(), 100_000, 3).unwrap();
        for (e, m) in ex.histogram.iter().zip(&mc.histogram) {
            let p = *e as f64 / ex.samples as f64;
            let sd = (p * (1.0 - p) / 1e5).sqrt();
            assert!((*m as f64 / 1e5 - p).abs() <= 5.0 * sd);
        }
        assert!(mc.nonconstant);
        assert!(trace_concentration(&g, &Word::identity(), 100_000, 3).is_err());
    }

    #[test]
    fn subfield_mass() {
        let g = Sl2::with_degree(9).unwrap();
        assert_eq!(proper_subfield_union_size(9), 8);
        let mut r = rng::stream(0, "pair", 0);
        let a = g.random_element(&mut r);
        let b = g.random_element(&mut r);
        let m0 = sl2_subfield_mass(&g, None, &a, &b, 0, 100, 0).unwrap();
        assert_eq!(m0.mass, 1.0);
        let m = sl2_subfield_mass(&g, None, &a, &b, 200, 20_000, 0).unwrap();
        assert!(m.mass < 0.1, "{m:?}");
        assert!(sl2_subfield_mass(&g, Some(2), &a, &b, 1, 1, 0).is_err());
        assert!(sl2_subfield_mass(&g, Some(3), &a, &b, 1, 10, 0).is_ok());
    }
}
