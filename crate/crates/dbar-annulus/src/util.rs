//! Deterministic summation and small numeric helpers.
//!
//! All quadrature sums in this crate go through [`pairwise_sum`] or
//! [`par_accumulate`]. The reduction tree is fixed by the node ordering and
//! the chunk size, so results are bit-identical regardless of thread count.

use rayon::prelude::*;

use crate::C;

const PAIRWISE_LEAF: usize = 32;

/// Pairwise summation with a fixed reduction tree.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= PAIRWISE_LEAF {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

pub fn pairwise_sum_c(x: &[C]) -> C {
    if x.len() <= PAIRWISE_LEAF {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum_c(&x[..mid]) + pairwise_sum_c(&x[mid..])
}

/// Chunk size for parallel accumulation. Fixed so that the reduction tree,
/// and hence the floating-point result, does not depend on parallelism.
pub const ACC_CHUNK: usize = 4096;

/// Deterministic parallel accumulation of `K` quantities over `len` items.
///
/// `f(i, acc)` adds item `i`'s contributions into `acc`. Items are summed
/// sequentially within fixed chunks; chunk partials are combined pairwise.
pub fn par_accumulate<const K: usize, F>(len: usize, f: F) -> [f64; K]
where
    F: Fn(usize, &mut [f64; K]) + Sync,
{
    if len == 0 {
        return [0.0; K];
    }
    let nchunks = len.div_ceil(ACC_CHUNK);
    let partials: Vec<[f64; K]> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0; K];
            let lo = c * ACC_CHUNK;
            let hi = (lo + ACC_CHUNK).min(len);
            for i in lo..hi {
                f(i, &mut acc);
            }
            acc
        })
        .collect();
    let mut out = [0.0; K];
    for (k, slot) in out.iter_mut().enumerate() {
        let col: Vec<f64> = partials.iter().map(|p| p[k]).collect();
        *slot = pairwise_sum(&col);
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Newton from the Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        nodes[i] = -x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Real coordinates of a complex point, laid out (Re z_1, Im z_1, ...).
pub fn complex_to_real(z: &[C]) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * z.len());
    for w in z {
        x.push(w.re);
        x.push(w.im);
    }
    x
}

pub fn real_to_complex(x: &[f64]) -> Vec<C> {
    x.chunks_exact(2).map(|c| C::new(c[0], c[1])).collect()
}
