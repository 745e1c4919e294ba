use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::rng;

const CHUNK: usize = 4096;

/// Dot product with a reduction order fixed by `CHUNK`, independent of the
/// thread count.
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u * v).sum())
        .collect();
    partial.iter().sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(ys, xs)| ys.iter_mut().zip(xs).for_each(|(u, v)| *u += a * v));
}

fn scale(x: &mut [f64], a: f64) {
    x.par_iter_mut().for_each(|u| *u *= a);
}

/// Two passes of classical Gram-Schmidt against an orthonormal family.
pub(crate) fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(w, b);
            axpy(w, -c, b);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum End {
    Largest,
    Smallest,
}

#[derive(Clone, Debug)]
pub(crate) struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A y - theta y||`, recomputed explicitly.
    pub residual: f64,
}

pub(crate) struct LanczosOutcome {
    pub largest: RitzPair,
    pub smallest: RitzPair,
    pub iterations: usize,
    pub converged: bool,
}

/// Lanczos with full reorthogonalization on the orthogonal complement of
/// `deflate` (an orthonormal family). Stops when the Ritz residual estimates
/// of the requested ends drop below `tol`, on breakdown, or at `max_iter`.
pub(crate) fn lanczos(
    apply: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    n: usize,
    deflate: &[Vec<f64>],
    ends: &[End],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> LanczosOutcome {
    let mut r = rng::stream(seed, "lanczos", deflate.len() as u64);
    let mut v: Vec<f64> = (0..n).map(|_| r.random::<f64>() - 0.5).collect();
    orthogonalize(&mut v, deflate);
    let nv = norm(&v);
    scale(&mut v, 1.0 / nv);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let limit = max_iter.min(n.saturating_sub(deflate.len())).max(1);
    let mut converged = false;
    loop {
        let j = basis.len() - 1;
        let mut w = apply(&basis[j]);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        orthogonalize(&mut w, deflate);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        let k = alpha.len();
        let check = k == limit || b < 1e-10 || k % 5 == 0;
        if check {
            let (vals, vecs) = tridiagonal_eigen(&alpha, &beta);
            let estimate = |i: usize| (b * vecs[(k - 1, i)]).abs();
            let ok = ends.iter().all(|e| {
                let i = pick(&vals, *e);
                estimate(i) <= tol
            });
            if ok || b < 1e-10 {
                converged = true;
            }
            if converged || k == limit {
                let ritz = |i: usize| {
                    let mut y = vec![0.0; n];
                    for (row, q) in basis.iter().take(k).enumerate() {
                        axpy(&mut y, vecs[(row, i)], q);
                    }
                    let ny = norm(&y);
                    scale(&mut y, 1.0 / ny);
                    let mut res = apply(&y);
                    let theta = dot(&res, &y);
                    axpy(&mut res, -theta, &y);
                    RitzPair {
                        value: theta,
                        residual: norm(&res),
                        vector: y,
                    }
                };
                let largest = ritz(pick(&vals, End::Largest));
                let smallest = ritz(pick(&vals, End::Smallest));
                converged = ends.iter().all(|e| match e {
                    End::Largest => largest.residual <= tol.max(1e-12) * 10.0,
                    End::Smallest => smallest.residual <= tol.max(1e-12) * 10.0,
                });
                return LanczosOutcome {
                    largest,
                    smallest,
                    iterations: k,
                    converged,
                };
            }
        }
        beta.push(b);
        scale(&mut w, 1.0 / b);
        basis.push(w);
    }
}

fn pick(vals: &[f64], end: End) -> usize {
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        let better = match end {
            End::Largest => *v > vals[best],
            End::Smallest => *v < vals[best],
        };
        if better {
            best = i;
        }
    }
    best
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(t);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}
