//! Bounded domains with evaluable signed distance and jets.
//!
//! Balls and Hermitian ellipsoids get closed-form (projection-based) jets;
//! anything else is an implicit domain with finite-difference jets. The
//! signed distance is negative inside, positive outside, and is an exact
//! distance on the shell where |d rho| = 1.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::jet::{Jet2, Jet3};
use crate::util::complex_to_real;
use crate::C;

/// Callable defining function for an implicit domain (negative inside).
pub struct ImplicitFn {
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub grad: Option<Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>>,
    /// Bounding box of the domain plus its shell.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// A point strictly inside the domain (used for boundary ray casts).
    pub interior: Vec<f64>,
    /// When set, `f` itself is treated as the signed distance
    /// (e.g. a mollified distance function), skipping projection.
    pub distance_like: bool,
}

pub enum DomainKind {
    Ball { center: Vec<C>, radius: f64 },
    /// Hermitian ellipsoid sum |z_k - c_k|^2 / a_k^2 = 1; each complex
    /// coordinate shares one semi-axis.
    Ellipsoid { center: Vec<C>, semi_axes: Vec<f64> },
    Implicit(ImplicitFn),
}

pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
    pub shell_thickness: f64,
}

const PROJ_MAX_ITERS: usize = 50;
const PROJ_TOL: f64 = 1e-12;

impl DomainSpec {
    pub fn ball(center: Vec<C>, radius: f64, shell_thickness: f64) -> Arc<Self> {
        let n = center.len();
        assert!(radius > 0.0 && shell_thickness > 0.0);
        Arc::new(DomainSpec { kind: DomainKind::Ball { center, radius }, n, shell_thickness })
    }

    pub fn ellipsoid(center: Vec<C>, semi_axes: Vec<f64>, shell_thickness: f64) -> Arc<Self> {
        let n = center.len();
        assert_eq!(semi_axes.len(), n);
        assert!(semi_axes.iter().all(|a| *a > 0.0));
        Arc::new(DomainSpec { kind: DomainKind::Ellipsoid { center, semi_axes }, n, shell_thickness })
    }

    pub fn implicit(n: usize, spec: ImplicitFn, shell_thickness: f64) -> Arc<Self> {
        Arc::new(DomainSpec { kind: DomainKind::Implicit(spec), n, shell_thickness })
    }

    /// Per-real-axis semi-axes (length 2n) for the ellipsoid.
    fn real_axes(semi_axes: &[f64]) -> Vec<f64> {
        semi_axes.iter().flat_map(|a| [*a, *a]).collect()
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Ball { radius, .. } => 2.0 * radius,
            DomainKind::Ellipsoid { semi_axes, .. } => {
                2.0 * semi_axes.iter().cloned().fold(0.0, f64::max)
            }
            DomainKind::Implicit(s) => {
                let d2: f64 =
                    s.lo.iter().zip(&s.hi).map(|(a, b)| (b - a) * (b - a)).sum();
                d2.sqrt()
            }
        }
    }

    /// Box containing the domain together with its shell.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let s = self.shell_thickness;
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let c = complex_to_real(center);
                let r = radius + s;
                (c.iter().map(|x| x - r).collect(), c.iter().map(|x| x + r).collect())
            }
            DomainKind::Ellipsoid { center, semi_axes } => {
                let c = complex_to_real(center);
                let ax = Self::real_axes(semi_axes);
                (
                    c.iter().zip(&ax).map(|(x, a)| x - a - s).collect(),
                    c.iter().zip(&ax).map(|(x, a)| x + a + s).collect(),
                )
            }
            DomainKind::Implicit(spec) => (spec.lo.clone(), spec.hi.clone()),
        }
    }

    /// Signed distance at a point given in real coordinates.
    pub fn rho(&self, x: &[f64]) -> Result<f64> {
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let mut d2 = 0.0;
                for (k, c) in center.iter().enumerate() {
                    let dx = x[2 * k] - c.re;
                    let dy = x[2 * k + 1] - c.im;
                    d2 += dx * dx + dy * dy;
                }
                Ok(d2.sqrt() - radius)
            }
            DomainKind::Ellipsoid { center, semi_axes } => {
                let d = rel_coords(x, center);
                let ax = Self::real_axes(semi_axes);
                let (w, _) = ellipsoid_foot(&ax, &d);
                let dist: f64 = d
                    .iter()
                    .zip(&w)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let level: f64 = d.iter().zip(&ax).map(|(v, a)| (v / a) * (v / a)).sum();
                Ok(if level >= 1.0 { dist } else { -dist })
            }
            DomainKind::Implicit(spec) => {
                if spec.distance_like {
                    return Ok((spec.f)(x));
                }
                let (w, _) = self.project_implicit(spec, x)?;
                let dist: f64 =
                    x.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                Ok(if (spec.f)(x) >= 0.0 { dist } else { -dist })
            }
        }
    }

    pub fn rho_z(&self, z: &[C]) -> Result<f64> {
        self.rho(&complex_to_real(z))
    }

    /// Real gradient of the signed distance (unit vector on the shell).
    pub fn grad_rho(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            DomainKind::Ball { center, .. } => {
                let d = rel_coords(x, center);
                let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-300 {
                    return Err(Error::NoConvergence { iters: 0, level: 0.0 });
                }
                Ok(d.iter().map(|v| v / norm).collect())
            }
            DomainKind::Ellipsoid { center, semi_axes } => {
                let d = rel_coords(x, center);
                let ax = Self::real_axes(semi_axes);
                let (w, _) = ellipsoid_foot(&ax, &d);
                Ok(ellipsoid_unit_normal(&ax, &w))
            }
            DomainKind::Implicit(_) => {
                let h = 1e-5 * self.diameter();
                let m = x.len();
                let mut g = vec![0.0; m];
                let mut xp = x.to_vec();
                for i in 0..m {
                    xp[i] = x[i] + h;
                    let fp = self.rho(&xp)?;
                    xp[i] = x[i] - h;
                    let fm = self.rho(&xp)?;
                    xp[i] = x[i];
                    g[i] = (fp - fm) / (2.0 * h);
                }
                Ok(g)
            }
        }
    }

    /// Second-order Wirtinger jet of the signed distance. Requires the point
    /// to lie on the shell |rho| < shell_thickness.
    pub fn jet2(&self, z: &[C]) -> Result<Jet2> {
        let jet = self.jet2_unchecked(z)?;
        if jet.rho.abs() >= self.shell_thickness {
            return Err(Error::OutsideShell { rho: jet.rho, shell: self.shell_thickness });
        }
        Ok(jet)
    }

    /// Same as [`jet2`](Self::jet2) without the shell-membership check; the
    /// jet is still rejected near the medial axis.
    pub fn jet2_unchecked(&self, z: &[C]) -> Result<Jet2> {
        let x = complex_to_real(z);
        match &self.kind {
            DomainKind::Ball { center, radius } => Ok(ball_jet2(z, center, *radius)),
            DomainKind::Ellipsoid { center, semi_axes } => {
                let (value, grad, hess) = self.ellipsoid_real_jet(&x, center, semi_axes)?;
                Ok(Jet2::from_real(z, value, &grad, &hess))
            }
            DomainKind::Implicit(_) => {
                let diam = self.diameter();
                let h1 = 1e-5 * diam;
                // Second differences of a projected distance lose about half
                // the digits; a larger step keeps the roundoff term small.
                let h2 = 2e-3 * diam;
                let (value, grad, hess) = fd_real_jet(&|p| self.rho(p), &x, h1, h2)?;
                Ok(Jet2::from_real(z, value, &grad, &hess))
            }
        }
    }

    /// Third-order jet. Analytic for balls, finite differences of the
    /// second-order jet otherwise.
    pub fn jet3(&self, z: &[C]) -> Result<Jet3> {
        match &self.kind {
            DomainKind::Ball { center, radius } => Ok(ball_jet3(z, center, *radius)),
            _ => {
                let n = self.n;
                let j2 = self.jet2_unchecked(z)?;
                let h = match &self.kind {
                    DomainKind::Ellipsoid { .. } => 3e-4 * self.diameter(),
                    _ => 1e-2 * self.diameter(),
                };
                let mut plus_z = Vec::with_capacity(2 * n);
                let mut minus_z = Vec::with_capacity(2 * n);
                for axis in 0..2 * n {
                    let mut zp = z.to_vec();
                    let mut zm = z.to_vec();
                    let (k, im) = (axis / 2, axis % 2 == 1);
                    if im {
                        zp[k].im += h;
                        zm[k].im -= h;
                    } else {
                        zp[k].re += h;
                        zm[k].re -= h;
                    }
                    plus_z.push(self.jet2_unchecked(&zp)?);
                    minus_z.push(self.jet2_unchecked(&zm)?);
                }
                // d/dz_l = (d/dx_l - i d/dy_l)/2 applied to the second
                // derivative fields.
                let dl = |field: &dyn Fn(&Jet2) -> C, l: usize| -> C {
                    let dx = (field(&plus_z[2 * l]) - field(&minus_z[2 * l])) / (2.0 * h);
                    let dy = (field(&plus_z[2 * l + 1]) - field(&minus_z[2 * l + 1])) / (2.0 * h);
                    (dx - C::i() * dy) * 0.5
                };
                let mut t1 = vec![C::new(0.0, 0.0); n * n * n];
                let mut t2 = vec![C::new(0.0, 0.0); n * n * n];
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            t1[(j * n + k) * n + l] = dl(&|jt: &Jet2| jt.dzz_at(j, k), l);
                            // rho_{jk lbar} = conj applied derivative: use
                            // (d/dx + i d/dy)/2 of rho_{jk}.
                            let dx = (plus_z[2 * l].dzz_at(j, k) - minus_z[2 * l].dzz_at(j, k))
                                / (2.0 * h);
                            let dy = (plus_z[2 * l + 1].dzz_at(j, k)
                                - minus_z[2 * l + 1].dzz_at(j, k))
                                / (2.0 * h);
                            t2[(j * n + k) * n + l] = (dx + C::i() * dy) * 0.5;
                        }
                    }
                }
                Ok(Jet3 { j2, t1, t2 })
            }
        }
    }

    /// Boundary point in direction `dir` (real coordinates) from the center
    /// or interior anchor.
    pub fn boundary_point(&self, dir: &[f64]) -> Result<Vec<f64>> {
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NoConvergence { iters: 0, level: 0.0 });
        }
        let d: Vec<f64> = dir.iter().map(|v| v / norm).collect();
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let c = complex_to_real(center);
                Ok(c.iter().zip(&d).map(|(c, d)| c + radius * d).collect())
            }
            DomainKind::Ellipsoid { center, semi_axes } => {
                let c = complex_to_real(center);
                let ax = Self::real_axes(semi_axes);
                let t =
                    1.0 / d.iter().zip(&ax).map(|(v, a)| (v / a) * (v / a)).sum::<f64>().sqrt();
                Ok(c.iter().zip(&d).map(|(c, d)| c + t * d).collect())
            }
            DomainKind::Implicit(spec) => {
                // bisect the sign of the defining function along the ray
                let mut tlo = 0.0;
                let mut thi = 1e-3;
                let at = |t: f64| -> Vec<f64> {
                    spec.interior.iter().zip(&d).map(|(c, d)| c + t * d).collect()
                };
                let mut guard = 0;
                while (spec.f)(&at(thi)) < 0.0 {
                    thi *= 2.0;
                    guard += 1;
                    if guard > 60 {
                        return Err(Error::NoConvergence { iters: guard, level: thi });
                    }
                }
                for _ in 0..80 {
                    let tm = 0.5 * (tlo + thi);
                    if (spec.f)(&at(tm)) < 0.0 {
                        tlo = tm;
                    } else {
                        thi = tm;
                    }
                }
                Ok(at(0.5 * (tlo + thi)))
            }
        }
    }

    fn ellipsoid_real_jet(
        &self,
        x: &[f64],
        center: &[C],
        semi_axes: &[f64],
    ) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let d = rel_coords(x, center);
        let ax = Self::real_axes(semi_axes);
        let m = d.len();
        let (w, _) = ellipsoid_foot(&ax, &d);
        let dist: f64 = d.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let level: f64 = d.iter().zip(&ax).map(|(v, a)| (v / a) * (v / a)).sum();
        let rho = if level >= 1.0 { dist } else { -dist };
        let nu = ellipsoid_unit_normal(&ax, &w);

        // Shape operator of the level set at the foot point, projected onto
        // the tangent space: H0 = P diag(1/a_i^2) P / |w/a^2|.
        let scale: f64 =
            w.iter().zip(&ax).map(|(w, a)| (w / (a * a)) * (w / (a * a))).sum::<f64>().sqrt();
        if scale < 1e-300 {
            return Err(Error::NoConvergence { iters: 0, level: scale });
        }
        let mut h0 = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                // M P with M = diag(1/a_i^2), P = I - nu nu^T
                let mik = if i == k { 1.0 / (ax[i] * ax[i]) } else { 0.0 };
                h0[i * m + k] = mik - nu[i] * nu[k] / (ax[i] * ax[i]);
            }
        }
        // complete the projection on the left: (I - nu nu^T) (M P)
        let mut h0p = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let mut v = h0[i * m + k];
                let mut dot = 0.0;
                for l in 0..m {
                    dot += nu[l] * h0[l * m + k];
                }
                v -= nu[i] * dot;
                h0p[i * m + k] = v / scale;
            }
        }

        // Hess rho(z) = H0 (I + rho H0)^{-1}; singular pivots flag the
        // medial axis.
        let mut b = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                b[i * m + k] = if i == k { 1.0 } else { 0.0 } + rho * h0p[i * m + k];
            }
        }
        let hess = solve_right(&b, &h0p, m).ok_or(Error::NoConvergence {
            iters: PROJ_MAX_ITERS,
            level: rho,
        })?;

        Ok((rho, nu, hess))
    }

    fn project_implicit(&self, spec: &ImplicitFn, x: &[f64]) -> Result<(Vec<f64>, usize)> {
        let m = x.len();
        let diam = self.diameter();
        let scale = 1.0f64.max(diam);
        let fd_h = 1e-6 * scale;
        let grad = |p: &[f64]| -> Vec<f64> {
            if let Some(g) = &spec.grad {
                g(p)
            } else {
                let mut out = vec![0.0; m];
                let mut q = p.to_vec();
                for i in 0..m {
                    q[i] = p[i] + fd_h;
                    let fp = (spec.f)(&q);
                    q[i] = p[i] - fd_h;
                    let fm = (spec.f)(&q);
                    q[i] = p[i];
                    out[i] = (fp - fm) / (2.0 * fd_h);
                }
                out
            }
        };
        let mut w = x.to_vec();
        let total_iters = 3 * PROJ_MAX_ITERS;
        for it in 0..total_iters {
            // pull onto the level set along the gradient
            for _ in 0..6 {
                let fv = (spec.f)(&w);
                if fv.abs() < PROJ_TOL * scale {
                    break;
                }
                let g = grad(&w);
                let g2: f64 = g.iter().map(|v| v * v).sum();
                if g2 < 1e-30 {
                    return Err(Error::NoConvergence { iters: it, level: fv });
                }
                for i in 0..m {
                    w[i] -= fv * g[i] / g2;
                }
            }
            // slide tangentially toward the query point; damped and capped
            // so distant queries cannot overshoot around curved boundaries
            let g = grad(&w);
            let gn: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn < 1e-15 {
                return Err(Error::NoConvergence { iters: it, level: gn });
            }
            let mut dot = 0.0;
            for i in 0..m {
                dot += (x[i] - w[i]) * g[i] / gn;
            }
            let mut tnorm2 = 0.0;
            let mut t = vec![0.0; m];
            for i in 0..m {
                t[i] = (x[i] - w[i]) - dot * g[i] / gn;
                tnorm2 += t[i] * t[i];
            }
            let tnorm = tnorm2.sqrt();
            if tnorm < 1e-11 * scale {
                return Ok((w, it));
            }
            let step = (0.7f64).min(0.15 * diam / tnorm);
            for i in 0..m {
                w[i] += step * t[i];
            }
        }
        let level = (spec.f)(&w).abs();
        if level < PROJ_TOL * scale * 10.0 {
            // converged in level value, tangential drift below shell accuracy
            return Ok((w, total_iters));
        }
        Err(Error::NoConvergence { iters: total_iters, level })
    }
}

fn rel_coords(x: &[f64], center: &[C]) -> Vec<f64> {
    let mut d = Vec::with_capacity(x.len());
    for (k, c) in center.iter().enumerate() {
        d.push(x[2 * k] - c.re);
        d.push(x[2 * k + 1] - c.im);
    }
    d
}

fn ellipsoid_unit_normal(ax: &[f64], w: &[f64]) -> Vec<f64> {
    let mut nu: Vec<f64> = w.iter().zip(ax).map(|(w, a)| w / (a * a)).collect();
    let norm: f64 = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in nu.iter_mut() {
        *v /= norm;
    }
    nu
}

/// Foot of the point `d` (coordinates relative to the center) on the
/// ellipsoid with per-axis radii `ax`. Valid for interior and exterior
/// points; on the medial axis a deterministic representative is returned.
pub(crate) fn ellipsoid_foot(ax: &[f64], d: &[f64]) -> (Vec<f64>, f64) {
    let m = d.len();
    let scale = ax.iter().cloned().fold(0.0, f64::max);
    let eps = 1e-13 * scale;
    let active: Vec<usize> = (0..m).filter(|&i| d[i].abs() > eps).collect();

    if active.is_empty() {
        // center: nearest boundary point sits on the shortest axis
        let imin =
            (0..m).min_by(|&a, &b| ax[a].partial_cmp(&ax[b]).unwrap()).unwrap();
        let mut w = vec![0.0; m];
        w[imin] = ax[imin];
        return (w, -ax[imin] * ax[imin]);
    }

    let g = |lambda: f64| -> f64 {
        active
            .iter()
            .map(|&i| {
                let t = ax[i] * d[i] / (ax[i] * ax[i] + lambda);
                t * t
            })
            .sum::<f64>()
    };

    let amin_active =
        active.iter().map(|&i| ax[i]).fold(f64::INFINITY, f64::min);
    let inactive_min = (0..m)
        .filter(|i| !active.contains(i))
        .map(|i| ax[i])
        .fold(f64::INFINITY, f64::min);

    // bracket the root of g = 1 on (-amin_active^2, inf)
    let mut lo = -amin_active * amin_active * (1.0 - 1e-14) + 0.0;
    let mut hi = {
        let s: f64 = active.iter().map(|&i| (ax[i] * d[i]) * (ax[i] * d[i])).sum();
        s.sqrt().max(1e-30)
    };
    while g(hi) > 1.0 {
        hi *= 2.0;
    }
    if g(lo) < 1.0 {
        lo = -amin_active * amin_active;
    }
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..120 {
        let gv = g(lambda);
        if (gv - 1.0).abs() < 1e-14 {
            break;
        }
        if gv > 1.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // Newton step when inside the bracket, bisection otherwise
        let dg: f64 = active
            .iter()
            .map(|&i| {
                let a2 = ax[i] * ax[i];
                -2.0 * a2 * d[i] * d[i] / (a2 + lambda).powi(3)
            })
            .sum();
        let mut next = lambda - (gv - 1.0) / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - lambda).abs() < 1e-16 * (1.0 + lambda.abs()) {
            lambda = next;
            break;
        }
        lambda = next;
    }

    if lambda >= -inactive_min * inactive_min || inactive_min.is_infinite() {
        let mut w = vec![0.0; m];
        for &i in &active {
            let a2 = ax[i] * ax[i];
            w[i] = a2 * d[i] / (a2 + lambda);
        }
        (w, lambda)
    } else {
        // the closest point picks up a component on the shortest inactive axis
        let beta2 = inactive_min * inactive_min;
        let mut w = vec![0.0; m];
        let mut s = 0.0;
        for &i in &active {
            let a2 = ax[i] * ax[i];
            w[i] = a2 * d[i] / (a2 - beta2);
            s += (w[i] / ax[i]) * (w[i] / ax[i]);
        }
        if s < 1.0 {
            let j = (0..m)
                .find(|i| !active.contains(i) && ax[*i] == inactive_min)
                .unwrap();
            w[j] = inactive_min * (1.0 - s).sqrt();
            (w, -beta2)
        } else {
            // reduced problem pinned to w_j = 0 on the inactive axes
            let mut wfull = vec![0.0; m];
            for &i in &active {
                let a2 = ax[i] * ax[i];
                wfull[i] = a2 * d[i] / (a2 + lambda);
            }
            (wfull, lambda)
        }
    }
}

fn ball_jet2(z: &[C], center: &[C], radius: f64) -> Jet2 {
    let n = z.len();
    let w: Vec<C> = z.iter().zip(center).map(|(z, c)| z - c).collect();
    let s2: f64 = w.iter().map(|v| v.norm_sqr()).sum();
    let s = s2.sqrt();
    let d: Vec<C> = w.iter().map(|v| v.conj() / (2.0 * s)).collect();
    let mut dzz = vec![C::new(0.0, 0.0); n * n];
    let mut dzzb = vec![C::new(0.0, 0.0); n * n];
    let s3 = s * s2;
    for j in 0..n {
        for k in 0..n {
            dzz[j * n + k] = -w[j].conj() * w[k].conj() / (4.0 * s3);
            let kron = if j == k { 1.0 / (2.0 * s) } else { 0.0 };
            dzzb[j * n + k] = C::new(kron, 0.0) - w[j].conj() * w[k] / (4.0 * s3);
        }
    }
    Jet2 { z: z.to_vec(), rho: s - radius, d, dzz, dzzb }
}

fn ball_jet3(z: &[C], center: &[C], radius: f64) -> Jet3 {
    let n = z.len();
    let j2 = ball_jet2(z, center, radius);
    let w: Vec<C> = z.iter().zip(center).map(|(z, c)| z - c).collect();
    let s2: f64 = w.iter().map(|v| v.norm_sqr()).sum();
    let s = s2.sqrt();
    let s3 = s * s2;
    let s5 = s3 * s2;
    let mut t1 = vec![C::new(0.0, 0.0); n * n * n];
    let mut t2 = vec![C::new(0.0, 0.0); n * n * n];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                t1[(j * n + k) * n + l] =
                    3.0 * w[j].conj() * w[k].conj() * w[l].conj() / (8.0 * s5);
                let mut v = 3.0 * w[j].conj() * w[k].conj() * w[l] / (8.0 * s5);
                if j == l {
                    v -= w[k].conj() / (4.0 * s3);
                }
                if k == l {
                    v -= w[j].conj() / (4.0 * s3);
                }
                t2[(j * n + k) * n + l] = v;
            }
        }
    }
    Jet3 { j2, t1, t2 }
}

/// Central finite-difference jet of a scalar callable; `h1` for first,
/// `h2` for second derivatives.
pub fn fd_real_jet(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    x: &[f64],
    h1: f64,
    h2: f64,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = x.len();
    let f0 = f(x)?;
    let mut grad = vec![0.0; m];
    let mut hess = vec![0.0; m * m];
    let mut p = x.to_vec();
    for i in 0..m {
        p[i] = x[i] + h1;
        let fp = f(&p)?;
        p[i] = x[i] - h1;
        let fm = f(&p)?;
        p[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h1);
    }
    for i in 0..m {
        p[i] = x[i] + h2;
        let fp = f(&p)?;
        p[i] = x[i] - h2;
        let fm = f(&p)?;
        p[i] = x[i];
        hess[i * m + i] = (fp - 2.0 * f0 + fm) / (h2 * h2);
    }
    for i in 0..m {
        for k in (i + 1)..m {
            p[i] = x[i] + h2;
            p[k] = x[k] + h2;
            let fpp = f(&p)?;
            p[k] = x[k] - h2;
            let fpm = f(&p)?;
            p[i] = x[i] - h2;
            let fmm = f(&p)?;
            p[k] = x[k] + h2;
            let fmp = f(&p)?;
            p[i] = x[i];
            p[k] = x[k];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h2 * h2);
            hess[i * m + k] = v;
            hess[k * m + i] = v;
        }
    }
    Ok((f0, grad, hess))
}

/// X = B^{-1} A for small row-major matrices; None on a singular pivot.
fn solve_right(b: &[f64], a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut lu = b.to_vec();
    let mut x = a.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();
    for col in 0..m {
        let mut piv = col;
        for r in col + 1..m {
            if lu[perm[r] * m + col].abs() > lu[perm[piv] * m + col].abs() {
                piv = r;
            }
        }
        perm.swap(col, piv);
        let p = lu[perm[col] * m + col];
        if p.abs() < 2e-2 {
            // treat near-singular Riccati factors as medial-axis proximity
            return None;
        }
        for r in col + 1..m {
            let factor = lu[perm[r] * m + col] / p;
            lu[perm[r] * m + col] = factor;
            for c in col + 1..m {
                lu[perm[r] * m + c] -= factor * lu[perm[col] * m + c];
            }
            for c in 0..m {
                x[perm[r] * m + c] -= factor * x[perm[col] * m + c];
            }
        }
    }
    let mut out = vec![0.0; m * m];
    for c in 0..m {
        for row in (0..m).rev() {
            let mut v = x[perm[row] * m + c];
            for k in row + 1..m {
                v -= lu[perm[row] * m + k] * out[k * m + c];
            }
            out[row * m + c] = v / lu[perm[row] * m + row];
        }
    }
    Some(out)
}

/// Annulus between two domains; the hole must be compactly contained in the
/// envelope.
pub struct AnnulusSpec {
    pub envelope: Arc<DomainSpec>,
    pub hole: Arc<DomainSpec>,
    /// dist(b envelope, b hole), estimated from boundary samples.
    pub gap: f64,
}

impl AnnulusSpec {
    pub fn new(envelope: Arc<DomainSpec>, hole: Arc<DomainSpec>) -> Result<AnnulusSpec> {
        assert_eq!(envelope.n, hole.n);
        let m = 2 * hole.n;
        let mut gap = f64::INFINITY;
        let samples = 64 * m;
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        for _ in 0..samples {
            let mut dir = vec![0.0; m];
            for v in dir.iter_mut() {
                // xorshift is plenty for direction sampling here
                rng_state ^= rng_state << 13;
                rng_state ^= rng_state >> 7;
                rng_state ^= rng_state << 17;
                *v = (rng_state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
            if dir.iter().map(|v| v * v).sum::<f64>() < 1e-12 {
                continue;
            }
            let b = hole.boundary_point(&dir)?;
            let r = envelope.rho(&b)?;
            if r >= 0.0 {
                return Err(Error::HoleNotContained { rho: r });
            }
            gap = gap.min(-r);
        }
        Ok(AnnulusSpec { envelope, hole, gap })
    }

    pub fn n(&self) -> usize {
        self.hole.n
    }

    /// Diameter of the annulus = diameter of the envelope.
    pub fn diameter(&self) -> f64 {
        self.envelope.diameter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zv(coords: &[(f64, f64)]) -> Vec<C> {
        coords.iter().map(|&(a, b)| C::new(a, b)).collect()
    }

    #[test]
    fn ball_signed_distance() {
        let d = DomainSpec::ball(zv(&[(0.0, 0.0); 3]), 1.0, 0.3);
        let inside = d.rho_z(&zv(&[(0.5, 0.0), (0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!((inside + 0.5).abs() < 1e-14);
        let outside = d.rho_z(&zv(&[(2.0, 0.0), (0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!((outside - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_distance_at_center_hits_short_axis() {
        // brute-force oracle: min |z - w| over a dense boundary sampling
        let d = DomainSpec::ellipsoid(zv(&[(0.0, 0.0), (0.0, 0.0)]), vec![2.0, 1.0], 0.3);
        let rho = d.rho_z(&zv(&[(0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!((rho + 1.0).abs() < 1e-12, "rho = {rho}");

        let mut best = f64::INFINITY;
        let k = 60;
        for i in 0..k {
            for jj in 0..k {
                for l in 0..k {
                    let (t1, t2, t3) = (
                        std::f64::consts::PI * (i as f64 + 0.5) / k as f64,
                        std::f64::consts::PI * (jj as f64 + 0.5) / k as f64,
                        2.0 * std::f64::consts::PI * l as f64 / k as f64,
                    );
                    let u = [
                        t1.cos(),
                        t1.sin() * t2.cos(),
                        t1.sin() * t2.sin() * t3.cos(),
                        t1.sin() * t2.sin() * t3.sin(),
                    ];
                    let scale = 1.0
                        / (u[0] * u[0] / 4.0 + u[1] * u[1] / 4.0 + u[2] * u[2] + u[3] * u[3])
                            .sqrt();
                    let w: Vec<f64> = u.iter().map(|v| v * scale).collect();
                    let dist = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    best = best.min(dist);
                }
            }
        }
        assert!((best - 1.0).abs() < 1e-2, "oracle min {best}");
    }

    #[test]
    fn ellipsoid_foot_matches_brute_force() {
        let d = DomainSpec::ellipsoid(zv(&[(0.0, 0.0), (0.0, 0.0)]), vec![2.0, 1.0], 0.3);
        for &(a, b, c, e) in
            &[(1.9, 0.3, 0.2, -0.1), (0.4, 0.1, 0.8, 0.3), (2.5, 0.0, 0.0, 1.2), (0.9, -0.4, 0.05, 0.02)]
        {
            let z = zv(&[(a, b), (c, e)]);
            let rho = d.rho_z(&z).unwrap();
            // oracle: dense minimization over the boundary
            let mut best = f64::INFINITY;
            let k = 140;
            for i in 0..k {
                for jj in 0..k {
                    for l in 0..(2 * k) {
                        let (t1, t2, t3) = (
                            std::f64::consts::PI * (i as f64 + 0.5) / k as f64,
                            std::f64::consts::PI * (jj as f64 + 0.5) / k as f64,
                            std::f64::consts::PI * l as f64 / k as f64,
                        );
                        let u = [
                            t1.cos(),
                            t1.sin() * t2.cos(),
                            t1.sin() * t2.sin() * t3.cos(),
                            t1.sin() * t2.sin() * t3.sin(),
                        ];
                        let scale = 1.0
                            / (u[0] * u[0] / 4.0 + u[1] * u[1] / 4.0 + u[2] * u[2] + u[3] * u[3])
                                .sqrt();
                        let p = [a, b, c, e];
                        let dist = (0..4)
                            .map(|m| (p[m] - u[m] * scale) * (p[m] - u[m] * scale))
                            .sum::<f64>()
                            .sqrt();
                        best = best.min(dist);
                    }
                }
            }
            assert!(
                (rho.abs() - best).abs() < 1e-2,
                "point ({a},{b},{c},{e}): rho {rho}, oracle {best}"
            );
        }
    }

    #[test]
    fn ball_jet_values() {
        // symbolic differentiation of rho = |z| - 1 at z = (1, 0)
        let d = DomainSpec::ball(zv(&[(0.0, 0.0), (0.0, 0.0)]), 1.0, 0.3);
        let j = d.jet2(&zv(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
        assert!((j.d[0] - C::new(0.5, 0.0)).norm() < 1e-14);
        assert!((j.dzzb_at(0, 0) - C::new(0.25, 0.0)).norm() < 1e-14);
        assert!((j.dzzb_at(1, 1) - C::new(0.5, 0.0)).norm() < 1e-14);
        assert!(j.unit_gradient_deviation() < 1e-14);
    }

    #[test]
    fn ellipsoid_jet_is_unit_gradient_and_matches_fd() {
        let d = DomainSpec::ellipsoid(zv(&[(0.1, -0.2), (0.0, 0.3)]), vec![1.4, 0.8], 0.3);
        let z = zv(&[(1.1, 0.2), (0.3, 0.5)]);
        let j = d.jet2_unchecked(&z).unwrap();
        assert!(j.unit_gradient_deviation() < 1e-10, "dev {}", j.unit_gradient_deviation());
        // compare Hessian against finite differences of rho
        let x = complex_to_real(&z);
        let (_, grad, hess) = fd_real_jet(&|p| d.rho(p), &x, 1e-6, 5e-4).unwrap();
        let jg = j.real_grad();
        for i in 0..4 {
            assert!((grad[i] - jg[i]).abs() < 1e-8, "grad[{i}]");
        }
        let jfd = Jet2::from_real(&z, j.rho, &grad, &hess);
        for a in 0..2 {
            for b in 0..2 {
                assert!(
                    (j.dzzb_at(a, b) - jfd.dzzb_at(a, b)).norm() < 1e-5,
                    "dzzb {a}{b}: {} vs {}",
                    j.dzzb_at(a, b),
                    jfd.dzzb_at(a, b)
                );
                assert!((j.dzz_at(a, b) - jfd.dzz_at(a, b)).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn ball_jet3_matches_fd() {
        let d = DomainSpec::ball(zv(&[(0.0, 0.0), (0.0, 0.0)]), 1.0, 0.4);
        let z = zv(&[(0.8, 0.2), (0.4, -0.3)]);
        let j3 = d.jet3(&z).unwrap();
        // finite-difference oracle on the analytic second derivatives
        let h = 1e-5;
        for (j, k, l) in [(0, 0, 0), (0, 1, 0), (1, 1, 1), (0, 1, 1)] {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[l].re += h;
            zm[l].re -= h;
            let dx = (d.jet2_unchecked(&zp).unwrap().dzz_at(j, k)
                - d.jet2_unchecked(&zm).unwrap().dzz_at(j, k))
                / (2.0 * h);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[l].im += h;
            zm[l].im -= h;
            let dy = (d.jet2_unchecked(&zp).unwrap().dzz_at(j, k)
                - d.jet2_unchecked(&zm).unwrap().dzz_at(j, k))
                / (2.0 * h);
            let fd = (dx - C::i() * dy) * 0.5;
            assert!((j3.zzz(j, k, l) - fd).norm() < 1e-8, "zzz({j},{k},{l})");
            let fd2 = (dx + C::i() * dy) * 0.5;
            assert!((j3.zzzb(j, k, l) - fd2).norm() < 1e-8, "zzzb({j},{k},{l})");
        }
    }

    #[test]
    fn implicit_matches_ball() {
        let center = zv(&[(0.0, 0.0), (0.0, 0.0)]);
        let spec = ImplicitFn {
            f: Arc::new(|x: &[f64]| {
                (x.iter().map(|v| v * v).sum::<f64>()).sqrt() - 1.0
            }),
            grad: None,
            lo: vec![-1.4; 4],
            hi: vec![1.4; 4],
            interior: vec![0.0; 4],
            distance_like: false,
        };
        let d = DomainSpec::implicit(2, spec, 0.3);
        let ball = DomainSpec::ball(center, 1.0, 0.3);
        let z = zv(&[(0.9, 0.1), (0.2, -0.2)]);
        let r1 = d.rho_z(&z).unwrap();
        let r2 = ball.rho_z(&z).unwrap();
        assert!((r1 - r2).abs() < 1e-9);
        let j1 = d.jet2_unchecked(&z).unwrap();
        let j2 = ball.jet2_unchecked(&z).unwrap();
        assert!(j1.unit_gradient_deviation() < 1e-5);
        for a in 0..2 {
            assert!((j1.d[a] - j2.d[a]).norm() < 1e-6);
            for b in 0..2 {
                assert!((j1.dzzb_at(a, b) - j2.dzzb_at(a, b)).norm() < 1e-3);
            }
        }
    }

    #[test]
    fn annulus_containment() {
        let env = DomainSpec::ball(zv(&[(0.0, 0.0), (0.0, 0.0)]), 1.0, 0.2);
        let hole = DomainSpec::ball(zv(&[(0.0, 0.0), (0.0, 0.0)]), 0.4, 0.12);
        let ann = AnnulusSpec::new(env, hole).unwrap();
        assert!((ann.gap - 0.6).abs() < 1e-10);

        let env = DomainSpec::ball(zv(&[(0.0, 0.0), (0.0, 0.0)]), 1.0, 0.2);
        let big = DomainSpec::ball(zv(&[(0.8, 0.0), (0.0, 0.0)]), 0.5, 0.1);
        assert!(AnnulusSpec::new(env, big).is_err());
    }
}
