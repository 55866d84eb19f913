//! The boundary frame built from a signed-distance jet: the complex normal
//! field N = 4 sum rho_jbar d/dz_j, the tangential fields
//! L_j = d/dz_j - rho_j N, the Levi trace tau = sum Lbar_j rho_j, the
//! curvature invariant eta^2 = sum |L_j rho_k|^2, and the multipliers nu,
//! mu_j entering the adjoint representation Lbar_j^* = -L_j + mu_j.

use crate::error::{Error, Result};
use crate::geometry::jet::Jet2;
use crate::C;

pub const DEFAULT_FRAME_TOL: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct CrFrame {
    /// Coefficients of N on d/dz_k: 4 rho_kbar.
    pub n_coeffs: Vec<C>,
    /// Row j holds the coefficients of L_j on d/dz_k.
    pub l_coeffs: Vec<C>,
    pub tau: f64,
    pub eta_squared: f64,
    pub nu: C,
    /// mu_j = phi_j + 4 sum_k rho_jk rho_kbar + 4 rho_j conj(nu).
    pub mu: Vec<C>,
    /// Equivalent expression through the complex Hessian,
    /// mu_j = phi_j - 4 sum_k rho_{j kbar} rho_k + 4 rho_j conj(nu).
    pub mu_hessian_form: Vec<C>,
    /// gamma_phi = sum_j Lbar_j phi_j (real for real weights).
    pub gamma_phi: f64,
}

impl CrFrame {
    /// N rho = 4 sum |rho_j|^2 (should be 1 on the shell).
    pub fn n_rho(&self, rho: &Jet2) -> f64 {
        4.0 * rho.d.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Vector-field norm of N; sqrt(2) on the shell.
    pub fn n_norm(&self) -> f64 {
        (self.n_coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / 2.0).sqrt()
    }

    /// Max |sum_j rho_jbar L_j| coefficient; zero on the shell.
    pub fn tangential_sum_defect(&self, rho: &Jet2) -> f64 {
        let n = rho.n();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let mut acc = C::new(0.0, 0.0);
            for j in 0..n {
                acc += rho.db(j) * self.l_coeffs[j * n + k];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

pub fn cr_frame(rho: &Jet2, weight: Option<&Jet2>) -> Result<CrFrame> {
    cr_frame_tol(rho, weight, DEFAULT_FRAME_TOL)
}

pub fn cr_frame_tol(rho: &Jet2, weight: Option<&Jet2>, tol: f64) -> Result<CrFrame> {
    let dev = rho.unit_gradient_deviation();
    if dev > tol {
        return Err(Error::BadJet { dev, tol });
    }
    let n = rho.n();
    let zero = C::new(0.0, 0.0);

    let n_coeffs: Vec<C> = (0..n).map(|j| 4.0 * rho.db(j)).collect();
    let mut l_coeffs = vec![zero; n * n];
    for j in 0..n {
        for k in 0..n {
            let kron = if j == k { C::new(1.0, 0.0) } else { zero };
            l_coeffs[j * n + k] = kron - 4.0 * rho.d[j] * rho.db(k);
        }
    }

    // tau = sum_j rho_{j jbar} - 4 sum_{j,k} rho_jbar rho_k rho_{j kbar}
    let mut tau = zero;
    for j in 0..n {
        tau += rho.dzzb_at(j, j);
        for k in 0..n {
            tau -= 4.0 * rho.db(j) * rho.d[k] * rho.dzzb_at(j, k);
        }
    }

    // eta^2 = sum_{j,k} |L_j rho_k|^2 with L_j rho_k = rho_{kj} - 4 rho_j sum_l rho_lbar rho_{kl}
    let mut eta2 = 0.0;
    for k in 0..n {
        let mut n_rho_k = zero;
        for l in 0..n {
            n_rho_k += 4.0 * rho.db(l) * rho.dzz_at(k, l);
        }
        for j in 0..n {
            let v = rho.dzz_at(k, j) - rho.d[j] * n_rho_k;
            eta2 += v.norm_sqr();
        }
    }

    // nu = sum_k (rho_{k kbar} - rho_k phi_kbar)
    let mut nu = zero;
    for k in 0..n {
        nu += rho.dzzb_at(k, k);
        if let Some(w) = weight {
            nu -= rho.d[k] * w.db(k);
        }
    }

    let phi_d = |j: usize| weight.map_or(zero, |w| w.d[j]);
    let mut mu = Vec::with_capacity(n);
    let mut mu_hessian_form = Vec::with_capacity(n);
    for j in 0..n {
        let mut s1 = zero;
        let mut s2 = zero;
        for k in 0..n {
            s1 += rho.dzz_at(j, k) * rho.db(k);
            s2 += rho.dzzb_at(j, k) * rho.d[k];
        }
        mu.push(phi_d(j) + 4.0 * s1 + 4.0 * rho.d[j] * nu.conj());
        mu_hessian_form.push(phi_d(j) - 4.0 * s2 + 4.0 * rho.d[j] * nu.conj());
    }

    // gamma_phi = sum_j (phi_{j jbar} - 4 rho_jbar sum_k rho_k phi_{j kbar})
    let mut gamma = zero;
    if let Some(w) = weight {
        for j in 0..n {
            gamma += w.dzzb_at(j, j);
            for k in 0..n {
                gamma -= 4.0 * rho.db(j) * rho.d[k] * w.dzzb_at(j, k);
            }
        }
    }

    Ok(CrFrame {
        n_coeffs,
        l_coeffs,
        tau: tau.re,
        eta_squared: eta2,
        nu,
        mu,
        mu_hessian_form,
        gamma_phi: gamma.re,
    })
}

/// Residual of the differentiated unit-gradient relation,
/// max_j |sum_l (rho_l rho_{lbar j} + rho_{lj} rho_lbar)|.
pub fn differentiated_relation_defect(rho: &Jet2) -> f64 {
    let n = rho.n();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut acc = C::new(0.0, 0.0);
        for l in 0..n {
            // rho_{lbar j} = conj(rho_{l jbar}) for real rho... use dzbz
            acc += rho.d[l] * rho.dzbz_at(l, j) + rho.dzz_at(l, j) * rho.db(l);
        }
        worst = worst.max(acc.norm());
    }
    worst
}
