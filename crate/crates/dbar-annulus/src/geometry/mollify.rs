//! Mollification of the signed distance function.
//!
//! `mollify(D, j)` convolves rho_D with a smooth bump of radius 1/j and
//! returns the smoothed domain as an implicit spec whose defining function
//! is the convolution itself. Since the discrete mollifier weights are
//! nonnegative and sum to one, |rho - rho_j| <= 1/j holds exactly for the
//! quadrature rule, by the 1-Lipschitz property of the distance.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::domain::{DomainSpec, ImplicitFn};
use crate::util::gauss_legendre;

/// Tensor Gauss nodes over the support of the bump chi(x) ~ exp(-1/(1-|x|^2)),
/// scaled to radius `r` in dimension `m`, normalized so weights sum to 1.
fn mollifier_rule(m: usize, r: f64, pts_per_axis: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes1, w1) = gauss_legendre(pts_per_axis);
    let total = pts_per_axis.pow(m as u32);
    let mut offsets = Vec::with_capacity(total * m);
    let mut weights = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = flat;
        let mut x = vec![0.0; m];
        let mut w = 1.0;
        for v in x.iter_mut() {
            let i = idx % pts_per_axis;
            idx /= pts_per_axis;
            *v = nodes1[i];
            w *= w1[i];
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            continue;
        }
        let chi = (-1.0 / (1.0 - r2)).exp();
        offsets.extend(x.iter().map(|v| v * r));
        weights.push(w * chi);
    }
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= sum;
    }
    (offsets, weights)
}

/// Smoothed domain defined by rho * chi_j on the 1/j-shrunken shell.
pub fn mollify(domain: &Arc<DomainSpec>, j: u32) -> Result<Arc<DomainSpec>> {
    mollify_with(domain, j, 8)
}

pub fn mollify_with(
    domain: &Arc<DomainSpec>,
    j: u32,
    pts_per_axis: usize,
) -> Result<Arc<DomainSpec>> {
    let r = 1.0 / j as f64;
    let shell = domain.shell_thickness;
    if r >= 0.5 * shell {
        return Err(Error::ShellTooThin { j, shell });
    }
    let m = 2 * domain.n;
    let (offsets, weights) = mollifier_rule(m, r, pts_per_axis);
    let base = Arc::clone(domain);
    let (lo, hi) = domain.bbox();
    let interior = {
        let (l, h) = domain.bbox();
        l.iter().zip(&h).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<f64>>()
    };
    let f = move |x: &[f64]| -> f64 {
        let mut acc = 0.0;
        let mut p = vec![0.0; m];
        for (k, w) in weights.iter().enumerate() {
            for i in 0..m {
                p[i] = x[i] - offsets[k * m + i];
            }
            // rho evaluations come from the exact projector of the base domain
            acc += w * base.rho(&p).unwrap_or(f64::NAN);
        }
        acc
    };
    Ok(DomainSpec::implicit(
        domain.n,
        ImplicitFn {
            f: Arc::new(f),
            grad: None,
            lo,
            hi,
            interior,
            distance_like: true,
        },
        shell - r,
    ))
}
