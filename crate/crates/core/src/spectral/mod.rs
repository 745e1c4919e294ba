//! Cayley graphs with implicit adjacency, expansion of explicit vertex sets,
//! and extremal eigenvalues of the normalized adjacency operator.

mod lanczos;

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::suzuki::GroupIndex;
use crate::walks::GeneratorPair;
use lanczos::{lanczos, orthogonalize, End};

/// Largest graph accepted by [`dense_spectrum`].
pub const DENSE_LIMIT: usize = 4096;

/// A 4-regular graph given by right multiplication by `(s, s^-1, t, t^-1)`.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    adj: Vec<[u32; 4]>,
    label: String,
}

impl CayleyGraph {
    pub fn from_index(index: &GroupIndex, pair: &GeneratorPair) -> Result<CayleyGraph> {
        Ok(CayleyGraph {
            adj: index.action_table(&pair.a, &pair.b)?,
            label: format!("Cay(Sz({}))", index.group().q()),
        })
    }

    /// `Cay(Z/n, {+-s, +-t})`.
    pub fn cyclic(n: u32, s: u32, t: u32) -> Result<CayleyGraph> {
        if n == 0 {
            return Err(Error::InvalidParameter("cyclic group of order 0".into()));
        }
        let adj = (0..n)
            .map(|x| {
                [
                    (x + s) % n,
                    (x + n - s % n) % n,
                    (x + t) % n,
                    (x + n - t % n) % n,
                ]
            })
            .collect();
        Ok(CayleyGraph {
            adj,
            label: format!("Cay(Z/{n}, +-{s}, +-{t})"),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, x: u32) -> [u32; 4] {
        self.adj[x as usize]
    }

    pub fn is_connected(&self) -> bool {
        GroupIndex::closure_size(&self.adj, 0) == self.adj.len()
    }

    /// The walk operator `(Av)(x) = 1/4 sum_s v(x s)`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.adj
            .par_iter()
            .map(|r| {
                0.25 * (v[r[0] as usize] + v[r[1] as usize] + v[r[2] as usize] + v[r[3] as usize])
            })
            .collect()
    }

    fn check_set(&self, set: &[u32]) -> Result<Vec<bool>> {
        if set.is_empty() {
            return Err(Error::InvalidParameter("expansion of the empty set".into()));
        }
        let mut inside = vec![false; self.len()];
        for &x in set {
            let slot = inside
                .get_mut(x as usize)
                .ok_or_else(|| Error::InvalidParameter(format!("vertex {x} out of range")))?;
            *slot = true;
        }
        Ok(inside)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexExpansion {
    pub size: usize,
    pub boundary: usize,
    pub ratio: f64,
    /// `|A| > |V|/2`, outside the expander regime.
    pub oversize: bool,
}

/// `|dA| / |A|` with `dA` the outside vertices adjacent to `A`.
pub fn vertex_expansion(graph: &CayleyGraph, set: &[u32]) -> Result<VertexExpansion> {
    let inside = graph.check_set(set)?;
    let size = inside.iter().filter(|&&b| b).count();
    let mut hit = vec![false; graph.len()];
    for (x, row) in graph.adj.iter().enumerate() {
        if inside[x] {
            for &y in row {
                hit[y as usize] = true;
            }
        }
    }
    let boundary = hit.iter().zip(&inside).filter(|(h, i)| **h && !**i).count();
    Ok(VertexExpansion {
        size,
        boundary,
        ratio: boundary as f64 / size as f64,
        oversize: 2 * size > graph.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeFormExpansion {
    pub size: usize,
    /// `|A sym-diff AS|`.
    pub symmetric_difference: usize,
    pub ratio: f64,
    /// `|A S'|` with `S' = S + {id}`.
    pub extended_image: usize,
    pub extended_ratio: f64,
    pub oversize: bool,
}

pub fn edge_form_expansion(graph: &CayleyGraph, set: &[u32]) -> Result<EdgeFormExpansion> {
    let inside = graph.check_set(set)?;
    let size = inside.iter().filter(|&&b| b).count();
    let mut image = vec![false; graph.len()];
    for (x, row) in graph.adj.iter().enumerate() {
        if inside[x] {
            for &y in row {
                image[y as usize] = true;
            }
        }
    }
    let sym = inside.iter().zip(&image).filter(|(a, b)| a != b).count();
    let ext = inside
        .iter()
        .zip(&image)
        .filter(|(a, b)| **a || **b)
        .count();
    Ok(EdgeFormExpansion {
        size,
        symmetric_difference: sym,
        ratio: sym as f64 / size as f64,
        extended_image: ext,
        extended_ratio: ext as f64 / size as f64,
        oversize: 2 * size > graph.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCut {
    /// Prefix of the sorted order, in that order.
    pub set: Vec<u32>,
    pub symmetric_difference: usize,
    pub ratio: f64,
}

/// Sorts vertices stably by `(value, index)` and returns the prefix of size
/// at most `|V|/2` with the least `|A sym-diff AS| / |A|` (earliest on ties).
pub fn sweep_cut(graph: &CayleyGraph, vector: &[f64]) -> Result<SweepCut> {
    let n = graph.len();
    if vector.len() != n || n < 2 {
        return Err(Error::InvalidParameter(
            "sweep vector must match a graph with >= 2 vertices".into(),
        ));
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&x, &y| {
        vector[x as usize]
            .total_cmp(&vector[y as usize])
            .then(x.cmp(&y))
    });

    let mut in_a = vec![false; n];
    let mut cnt = vec![0u8; n];
    let (mut a_not_image, mut image_not_a) = (0usize, 0usize);
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (k, &v) in order.iter().take(n / 2).enumerate() {
        in_a[v as usize] = true;
        if cnt[v as usize] > 0 {
            image_not_a -= 1;
        } else {
            a_not_image += 1;
        }
        for y in graph.adj[v as usize] {
            let y = y as usize;
            cnt[y] += 1;
            if cnt[y] == 1 {
                if in_a[y] {
                    a_not_image -= 1;
                } else {
                    image_not_a += 1;
                }
            }
        }
        let sym = a_not_image + image_not_a;
        let ratio = sym as f64 / (k + 1) as f64;
        if ratio < best.0 {
            best = (ratio, k + 1, sym);
        }
    }
    Ok(SweepCut {
        set: order[..best.1].to_vec(),
        symmetric_difference: best.2,
        ratio: best.0,
    })
}

/// All eigenvalues of the normalized adjacency, descending. Dense; small
/// graphs only.
pub fn dense_spectrum(graph: &CayleyGraph) -> Result<Vec<f64>> {
    let n = graph.len();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity {
            what: "dense eigensolve".into(),
            limit: DENSE_LIMIT as u64,
            hint: "use second_eigenvalue",
        });
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (x, row) in graph.adj.iter().enumerate() {
        for &y in row {
            a[(x, y as usize)] += 0.25;
        }
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub lambda: f64,
    pub tol: f64,
    /// Eigenvalues found within `tol` of `lambda`; a lower bound on the
    /// multiplicity.
    pub count: usize,
    pub found: Vec<f64>,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub graph: String,
    pub vertices: usize,
    pub degree: usize,
    /// Residual of the constant vector for eigenvalue 1.
    pub top_residual: f64,
    pub lambda2: f64,
    pub lambda2_residual: f64,
    pub lambda_min: f64,
    pub lambda_min_residual: f64,
    /// `max(lambda2, |lambda_min|)`.
    pub max_modulus: f64,
    pub iterations: usize,
    pub inconclusive: bool,
    pub multiplicity: Option<MultiplicityReport>,
}

fn constant(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

/// `lambda_2` and `lambda_min` of the normalized adjacency on the complement
/// of the constants, by Lanczos with full reorthogonalization. Flagged
/// inconclusive when the residuals exceed `tol` after `max_iter` steps.
pub fn second_eigenvalue(
    graph: &CayleyGraph,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralReport> {
    let n = graph.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "graph needs at least 2 vertices".into(),
        ));
    }
    if !graph.is_connected() {
        return Err(Error::InvalidParameter("graph is not connected".into()));
    }
    let c = constant(n);
    let mut top = graph.apply(&c);
    for (t, x) in top.iter_mut().zip(&c) {
        *t -= x;
    }
    let apply = |v: &[f64]| graph.apply(v);
    let out = lanczos(
        &apply,
        n,
        &[c],
        &[End::Largest, End::Smallest],
        tol,
        max_iter,
        seed,
    );
    Ok(SpectralReport {
        graph: graph.label.clone(),
        vertices: n,
        degree: 4,
        top_residual: lanczos::norm(&top),
        lambda2: out.largest.value,
        lambda2_residual: out.largest.residual,
        lambda_min: out.smallest.value,
        lambda_min_residual: out.smallest.residual,
        max_modulus: out.largest.value.max(-out.smallest.value),
        iterations: out.iterations,
        inconclusive: !out.converged,
        multiplicity: None,
    })
}

/// Counts eigenvalues within `tol` of `lambda` by repeatedly finding the
/// extremal eigenpair on the complement of the constants and all previously
/// found eigenvectors. Works from the top of the spectrum when `lambda >= 0`
/// and from the bottom otherwise; eigenvalues met before the cluster are
/// deflated without being counted.
pub fn multiplicity_probe(
    graph: &CayleyGraph,
    lambda: f64,
    tol: f64,
    count_budget: usize,
    seed: u64,
) -> Result<MultiplicityReport> {
    let n = graph.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "graph needs at least 2 vertices".into(),
        ));
    }
    let end = if lambda >= 0.0 {
        End::Largest
    } else {
        End::Smallest
    };
    let apply = |v: &[f64]| graph.apply(v);
    let inner_tol = (tol * 1e-2).max(1e-10);
    let mut deflate = vec![constant(n)];
    let mut found = Vec::new();
    let mut budget_exhausted = true;
    for _ in 0..count_budget {
        if deflate.len() >= n {
            budget_exhausted = false;
            break;
        }
        let out = lanczos(&apply, n, &deflate, &[end], inner_tol, 400, seed);
        let pair = match end {
            End::Largest => out.largest,
            End::Smallest => out.smallest,
        };
        let before_cluster = match end {
            End::Largest => pair.value > lambda + tol,
            End::Smallest => pair.value < lambda - tol,
        };
        if (pair.value - lambda).abs() > tol && !before_cluster {
            budget_exhausted = false;
            break;
        }
        if !before_cluster {
            found.push(pair.value);
        }
        let mut v = pair.vector;
        orthogonalize(&mut v, &deflate);
        let nv = lanczos::norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        deflate.push(v);
    }
    Ok(MultiplicityReport {
        lambda,
        tol,
        count: found.len(),
        found,
        budget_exhausted,
    })
}

/// Vertex-indexed little-endian `f64` array.
pub fn dump_vector<W: Write>(mut w: W, v: &[f64]) -> Result<()> {
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suzuki::Suzuki;
    use std::f64::consts::FRAC_PI_4;
    use std::sync::OnceLock;

    fn sz8() -> &'static GroupIndex {
        static IDX: OnceLock<GroupIndex> = OnceLock::new();
        IDX.get_or_init(|| GroupIndex::enumerate(Suzuki::with_degree(3).unwrap().field()).unwrap())
    }

    #[test]
    fn k5_spectrum() {
        let g = CayleyGraph::cyclic(5, 1, 2).unwrap();
        for x in 0..5 {
            let mut nb = g.neighbors(x).to_vec();
            nb.sort();
            let expect: Vec<u32> = (0..5).filter(|&y| y != x).collect();
            assert_eq!(nb, expect);
        }
        let dense = dense_spectrum(&g).unwrap();
        assert!((dense[0] - 1.0).abs() < 1e-12);
        assert!(dense[1..].iter().all(|v| (v + 0.25).abs() < 1e-12));
        let r = second_eigenvalue(&g, 1e-10, 100, 0).unwrap();
        assert!((r.max_modulus - 0.25).abs() < 1e-8);
        assert!((r.lambda2 - dense[1]).abs() < 1e-8);
        assert!(!r.inconclusive);
        assert!(r.top_residual < 1e-12);
        let m = multiplicity_probe(&g, -0.25, 1e-6, 10, 0).unwrap();
        assert_eq!(m.count, 4);
        assert!(!m.budget_exhausted);
    }

    #[test]
    fn z8_circulant() {
        let g = CayleyGraph::cyclic(8, 1, 2).unwrap();
        let dense = dense_spectrum(&g).unwrap();
        let l2 = FRAC_PI_4.cos() / 2.0;
        assert!((dense[1] - l2).abs() < 1e-12);
        // circulant formula for every character
        let mut formula: Vec<f64> = (0..8)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 8.0;
                (t.cos() + (2.0 * t).cos()) / 2.0
            })
            .collect();
        formula.sort_by(|x, y| y.total_cmp(x));
        for (a, b) in dense.iter().zip(&formula) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = second_eigenvalue(&g, 1e-10, 100, 1).unwrap();
        assert!((r.lambda2 - l2).abs() < 1e-8);
        assert!((r.lambda_min - dense[7]).abs() < 1e-8);
        assert_eq!(multiplicity_probe(&g, l2, 1e-6, 10, 0).unwrap().count, 2);
        assert_eq!(multiplicity_probe(&g, -0.5, 1e-6, 10, 0).unwrap().count, 2);
        // k = 4 is a real character with eigenvalue 0, reached after deflating
        // the pair above it
        assert_eq!(multiplicity_probe(&g, 0.0, 1e-6, 10, 0).unwrap().count, 1);
    }

    #[test]
    fn lanczos_matches_dense_on_small_circulants() {
        for n in [6u32, 9, 13, 31, 64] {
            for (s, t) in [(1, 2), (1, 3), (2, 5)] {
                let g = CayleyGraph::cyclic(n, s, t).unwrap();
                if !g.is_connected() {
                    assert!(second_eigenvalue(&g, 1e-10, 200, 0).is_err());
                    continue;
                }
                let dense = dense_spectrum(&g).unwrap();
                let r = second_eigenvalue(&g, 1e-10, 200, 0).unwrap();
                assert!((r.lambda2 - dense[1]).abs() < 1e-8, "{n} {s} {t}");
                assert!((r.lambda_min - dense[n as usize - 1]).abs() < 1e-8);
                assert!(r.lambda2 <= 1.0 + 1e-10 && r.lambda_min >= -1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn expansion_counts() {
        let g = CayleyGraph::cyclic(5, 1, 2).unwrap();
        assert!(vertex_expansion(&g, &[]).is_err());
        assert!(edge_form_expansion(&g, &[]).is_err());
        let v = vertex_expansion(&g, &[0]).unwrap();
        assert_eq!((v.boundary, v.ratio), (4, 4.0));
        let all: Vec<u32> = (0..5).collect();
        let v = vertex_expansion(&g, &all).unwrap();
        assert!(v.oversize && v.ratio == 0.0);
        // brute force over every 2-set of K5
        for x in 0..5u32 {
            for y in x + 1..5 {
                let e = edge_form_expansion(&g, &[x, y]).unwrap();
                let a: Vec<u32> = vec![x, y];
                let mut image: Vec<u32> = a.iter().flat_map(|&z| g.neighbors(z)).collect();
                image.sort();
                image.dedup();
                let sym = (0..5)
                    .filter(|z| a.contains(z) != image.contains(z))
                    .count();
                assert_eq!(e.symmetric_difference, sym);
                assert_eq!(e.symmetric_difference, 3);
                assert_eq!(e.extended_image, 5);
            }
        }
    }

    #[test]
    fn sz8_graph_basics() {
        let idx = sz8();
        let grp = idx.group();
        let pair = GeneratorPair::random_generating(grp, 11).unwrap();
        let g = CayleyGraph::from_index(idx, &pair).unwrap();
        assert_eq!(g.len(), 29120);
        assert!(g.is_connected());
        let id = idx.identity_rank();
        if crate::words::girth_test(grp, &pair.a, &pair.b, 2).passed() {
            assert_eq!(vertex_expansion(&g, &[id]).unwrap().ratio, 4.0);
            assert_eq!(
                edge_form_expansion(&g, &[id]).unwrap().symmetric_difference,
                5
            );
        }
        let borel: Vec<u32> = (0..idx.borel_len() as u32).collect();
        assert!(vertex_expansion(&g, &borel).unwrap().ratio > 0.0);
        assert!(edge_form_expansion(&g, &borel).unwrap().ratio > 0.0);

        // a non-generating pair: its closure is invariant
        let b = SuzukiGen::borel_pair(grp);
        let gb = CayleyGraph::from_index(idx, &b).unwrap();
        assert!(!gb.is_connected());
        let mut closure = vec![id];
        let mut seen = vec![false; gb.len()];
        seen[id as usize] = true;
        let mut i = 0;
        while i < closure.len() {
            for y in gb.neighbors(closure[i]) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    closure.push(y);
                }
            }
            i += 1;
        }
        assert_eq!(
            edge_form_expansion(&gb, &closure)
                .unwrap()
                .symmetric_difference,
            0
        );
    }

    struct SuzukiGen;
    impl SuzukiGen {
        fn borel_pair(g: &Suzuki) -> GeneratorPair {
            let mut r = crate::rng::stream(0, "borel-pair", 0);
            GeneratorPair::explicit(g.random_borel(&mut r), g.random_borel(&mut r))
        }
    }

    #[test]
    fn sweep_cut_rules() {
        let g = CayleyGraph::cyclic(5, 1, 2).unwrap();
        let c = sweep_cut(&g, &[0.0; 5]).unwrap();
        // index order on ties; every 2-set of K5 has ratio 3/2 < 5
        assert_eq!(c.set, vec![0, 1]);
        assert_eq!(c.ratio, 1.5);
        let ring = CayleyGraph::cyclic(64, 1, 2).unwrap();
        let dense = dense_spectrum(&ring).unwrap();
        let r = second_eigenvalue(&ring, 1e-10, 200, 0).unwrap();
        assert!((r.lambda2 - dense[1]).abs() < 1e-8);
        // an arc is the natural sparse cut of a ring
        let v: Vec<f64> = (0..64)
            .map(|x| ((x as f64) * std::f64::consts::TAU / 64.0).cos())
            .collect();
        let cut = sweep_cut(&ring, &v).unwrap();
        let direct = edge_form_expansion(&ring, &cut.set).unwrap();
        assert_eq!(direct.symmetric_difference, cut.symmetric_difference);
        assert!(cut.ratio > 0.0 && cut.ratio <= 4.0 / 32.0 + 1e-12);
    }

    #[test]
    fn dump_is_le_f64() {
        let mut buf = Vec::new();
        dump_vector(&mut buf, &[1.0, -2.5]).unwrap();
        assert_eq!(buf.len(), 16);
        assert_eq!(f64::from_le_bytes(buf[8..].try_into().unwrap()), -2.5);
    }
}
