//! Quadrature over implicitly-bounded volumes and their boundaries.
//!
//! Volumes use a tensor grid masked by the sign of the signed distance.
//! Cells cut by an interface are subdivided once and each subcell is
//! weighted by the exact volume fraction of the half-space obtained by
//! linearizing rho at the subcell center, which keeps the scheme second
//! order up to the boundary. Boundaries of balls and ellipsoids use
//! parametric sphere patches with exact area elements; other domains fall
//! back to a level-set surface rule.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::domain::DomainSpec;
use crate::geometry::jet::Jet2;
use crate::util::{gauss_legendre, real_to_complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadOrder {
    Midpoint,
    Gauss,
}

/// Integration region described by signed-distance constraints
/// lo < rho_D(x) < hi.
#[derive(Clone)]
pub enum Region {
    /// Interior of a domain.
    Domain(Arc<DomainSpec>),
    /// Between two domains: inside the envelope, outside the hole.
    Annulus { envelope: Arc<DomainSpec>, hole: Arc<DomainSpec> },
    /// Collar lo < rho < hi around a domain boundary.
    Shell { domain: Arc<DomainSpec>, lo: f64, hi: f64 },
}

impl Region {
    pub fn n(&self) -> usize {
        match self {
            Region::Domain(d) => d.n,
            Region::Annulus { envelope, .. } => envelope.n,
            Region::Shell { domain, .. } => domain.n,
        }
    }

    fn constraints(&self) -> Vec<(Arc<DomainSpec>, f64, f64)> {
        match self {
            Region::Domain(d) => vec![(Arc::clone(d), f64::NEG_INFINITY, 0.0)],
            Region::Annulus { envelope, hole } => vec![
                (Arc::clone(envelope), f64::NEG_INFINITY, 0.0),
                (Arc::clone(hole), 0.0, f64::INFINITY),
            ],
            Region::Shell { domain, lo, hi } => vec![(Arc::clone(domain), *lo, *hi)],
        }
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Domain(d) => d.bbox(),
            Region::Annulus { envelope, .. } => envelope.bbox(),
            Region::Shell { domain, hi, .. } => {
                let (lo_box, hi_box) = domain.bbox();
                let pad = (hi - domain.shell_thickness).max(0.0);
                (
                    lo_box.iter().map(|v| v - pad).collect(),
                    hi_box.iter().map(|v| v + pad).collect(),
                )
            }
        }
    }

    /// The domain whose rho is recorded per node (the hole for annuli and
    /// shells, the domain itself otherwise).
    fn primary(&self) -> Arc<DomainSpec> {
        match self {
            Region::Domain(d) => Arc::clone(d),
            Region::Annulus { hole, .. } => Arc::clone(hole),
            Region::Shell { domain, .. } => Arc::clone(domain),
        }
    }
}

pub struct VolumeScheme {
    pub n: usize,
    /// Flat node coordinates, 2n per node.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Signed distance of the region's primary domain at each node.
    pub rho: Vec<f64>,
    pub resolution: usize,
}

impl VolumeScheme {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let m = 2 * self.n;
        &self.points[i * m..(i + 1) * m]
    }

    pub fn total_weight(&self) -> f64 {
        crate::util::pairwise_sum(&self.weights)
    }

    /// Integrate a scalar callable over the region.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let acc = crate::util::par_accumulate::<1, _>(self.len(), |i, acc| {
            acc[0] += self.weights[i] * f(self.point(i));
        });
        acc[0]
    }

    pub fn to_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let m = 2 * self.n;
        for i in 1..=m {
            write!(out, "x_{i},")?;
        }
        writeln!(out, "weight,rho")?;
        for i in 0..self.len() {
            for v in self.point(i) {
                write!(out, "{v:.17e},")?;
            }
            writeln!(out, "{:.17e},{:.17e}", self.weights[i], self.rho[i])?;
        }
        Ok(())
    }
}

pub struct BoundaryScheme {
    pub n: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Unit outward normals, 2n per node.
    pub normals: Vec<f64>,
    pub resolution: usize,
    domain: Arc<DomainSpec>,
}

impl BoundaryScheme {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let m = 2 * self.n;
        &self.points[i * m..(i + 1) * m]
    }

    #[inline]
    pub fn normal(&self, i: usize) -> &[f64] {
        let m = 2 * self.n;
        &self.normals[i * m..(i + 1) * m]
    }

    pub fn domain(&self) -> &Arc<DomainSpec> {
        &self.domain
    }

    /// Signed-distance jet carried by the node.
    pub fn jet(&self, i: usize) -> Result<Jet2> {
        self.domain.jet2_unchecked(&real_to_complex(self.point(i)))
    }

    pub fn area(&self) -> f64 {
        crate::util::pairwise_sum(&self.weights)
    }

    pub fn to_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let m = 2 * self.n;
        for i in 1..=m {
            write!(out, "x_{i},")?;
        }
        write!(out, "weight,rho,")?;
        for i in 1..m {
            write!(out, "nu_{i},")?;
        }
        writeln!(out, "nu_{m}")?;
        for i in 0..self.len() {
            for v in self.point(i) {
                write!(out, "{v:.17e},")?;
            }
            write!(out, "{:.17e},{:.17e}", self.weights[i], 0.0)?;
            for v in self.normal(i) {
                write!(out, ",{v:.17e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Volume fraction of the unit cube on the side a.x <= b.
pub fn cube_fraction_leq(a: &[f64], b: f64) -> f64 {
    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 {
        return if b >= 0.0 { 1.0 } else { 0.0 };
    }
    // reflect to nonnegative coefficients, drop negligible ones
    let mut coef: Vec<f64> = Vec::with_capacity(a.len());
    let mut rhs = b;
    for &ai in a {
        if ai.abs() <= 1e-12 * amax {
            continue;
        }
        if ai < 0.0 {
            rhs -= ai;
            coef.push(-ai);
        } else {
            coef.push(ai);
        }
    }
    let d = coef.len();
    if d == 0 {
        return if rhs >= 0.0 { 1.0 } else { 0.0 };
    }
    let total: f64 = coef.iter().sum();
    if rhs <= 0.0 {
        return 0.0;
    }
    if rhs >= total {
        return 1.0;
    }
    // inclusion-exclusion over the cube corners
    let mut acc = 0.0;
    for mask in 0u32..(1 << d) {
        let mut t = rhs;
        let mut sign = 1.0;
        for (i, c) in coef.iter().enumerate() {
            if mask >> i & 1 == 1 {
                t -= c;
                sign = -sign;
            }
        }
        if t > 0.0 {
            acc += sign * t.powi(d as i32);
        }
    }
    let mut denom = 1.0;
    for (i, c) in coef.iter().enumerate() {
        denom *= c * (i + 1) as f64;
    }
    (acc / denom).clamp(0.0, 1.0)
}

/// Fraction of a box (center `c`, half-widths `half`) satisfying
/// rho > bound_lo and rho < bound_hi for the linearization
/// rho(x) ~ rho_c + g.(x - c).
fn box_fraction(
    rho_c: f64,
    g: &[f64],
    half: &[f64],
    lo: f64,
    hi: f64,
) -> f64 {
    // map to unit-cube coordinates xi in [0,1]^d: x = c + (2 xi - 1) * half
    let d = half.len();
    let mut a = vec![0.0; d];
    let mut shift = 0.0;
    for i in 0..d {
        a[i] = 2.0 * g[i] * half[i];
        shift += g[i] * half[i];
    }
    let mut frac = 1.0;
    if lo.is_finite() {
        // rho > lo  <=>  -a.xi <= rho_c - shift - lo
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        frac *= cube_fraction_leq(&neg, rho_c - shift - lo);
    }
    if hi.is_finite() {
        frac *= cube_fraction_leq(&a, hi - rho_c + shift);
    }
    frac
}

/// Masked tensor-product volume scheme.
pub fn volume_scheme(region: &Region, resolution: usize, order: QuadOrder) -> Result<VolumeScheme> {
    assert!(resolution >= 4, "resolution must be at least 4 per real dimension");
    let n = region.n();
    let m = 2 * n;
    let (lo_box, hi_box) = region.bbox();
    let h: Vec<f64> = lo_box
        .iter()
        .zip(&hi_box)
        .map(|(a, b)| (b - a) / resolution as f64)
        .collect();
    let cell_radius: f64 = h.iter().map(|v| 0.25 * v * v).sum::<f64>().sqrt();
    let constraints = region.constraints();
    let primary = region.primary();
    let cell_vol: f64 = h.iter().product();

    let slabs: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..resolution)
        .into_par_iter()
        .map(|i0| {
            let mut pts = Vec::new();
            let mut wts = Vec::new();
            let mut rhos = Vec::new();
            let mut idx = vec![0usize; m];
            idx[0] = i0;
            let mut x = vec![0.0; m];
            'cells: loop {
                for i in 0..m {
                    x[i] = lo_box[i] + (idx[i] as f64 + 0.5) * h[i];
                }
                process_cell(
                    &x,
                    &h,
                    cell_radius,
                    cell_vol,
                    &constraints,
                    &primary,
                    order,
                    &mut pts,
                    &mut wts,
                    &mut rhos,
                );
                // advance odometer over axes 1..m
                let mut axis = 1;
                loop {
                    if axis >= m {
                        break 'cells;
                    }
                    idx[axis] += 1;
                    if idx[axis] < resolution {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
            (pts, wts, rhos)
        })
        .collect();

    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut rho = Vec::new();
    for (p, w, r) in slabs {
        points.extend(p);
        weights.extend(w);
        rho.extend(r);
    }
    Ok(VolumeScheme { n, points, weights, rho, resolution })
}

#[allow(clippy::too_many_arguments)]
fn process_cell(
    center: &[f64],
    h: &[f64],
    cell_radius: f64,
    cell_vol: f64,
    constraints: &[(Arc<DomainSpec>, f64, f64)],
    primary: &Arc<DomainSpec>,
    order: QuadOrder,
    pts: &mut Vec<f64>,
    wts: &mut Vec<f64>,
    rhos: &mut Vec<f64>,
) {
    let m = center.len();
    let mut cut = false;
    for (dom, lo, hi) in constraints {
        let r = match dom.rho(center) {
            Ok(r) => r,
            Err(_) => return,
        };
        if r <= lo - cell_radius || r >= hi + cell_radius {
            return; // whole cell violates this constraint
        }
        if !(r > lo + cell_radius && r < hi - cell_radius) {
            cut = true;
        }
    }
    if !cut {
        match order {
            QuadOrder::Midpoint => {
                pts.extend_from_slice(center);
                wts.push(cell_vol);
                rhos.push(primary.rho(center).unwrap_or(f64::NAN));
            }
            QuadOrder::Gauss => {
                // 2-point tensor Gauss inside full cells
                let g = 0.5 / 3f64.sqrt();
                let mut corner = vec![0usize; m];
                loop {
                    let mut x = vec![0.0; m];
                    for i in 0..m {
                        let s = if corner[i] == 0 { -g } else { g };
                        x[i] = center[i] + s * h[i];
                    }
                    rhos.push(primary.rho(&x).unwrap_or(f64::NAN));
                    pts.extend_from_slice(&x);
                    wts.push(cell_vol / (1u64 << m) as f64);
                    // advance
                    let mut axis = 0;
                    loop {
                        if axis >= m {
                            return;
                        }
                        corner[axis] += 1;
                        if corner[axis] < 2 {
                            break;
                        }
                        corner[axis] = 0;
                        axis += 1;
                    }
                }
            }
        }
        return;
    }

    // cut cell: one dyadic subdivision, half-space-exact subcell weights
    let sub_vol = cell_vol / (1usize << m) as f64;
    let half: Vec<f64> = h.iter().map(|v| 0.25 * v).collect();
    let sub_radius = 0.5 * cell_radius;
    let mut corner = vec![0usize; m];
    loop {
        let mut x = vec![0.0; m];
        for i in 0..m {
            let s = if corner[i] == 0 { -0.25 } else { 0.25 };
            x[i] = center[i] + s * h[i];
        }
        let mut frac = 1.0;
        for (dom, lo, hi) in constraints {
            if frac == 0.0 {
                break;
            }
            let r = match dom.rho(&x) {
                Ok(r) => r,
                Err(_) => {
                    frac = 0.0;
                    break;
                }
            };
            if r <= lo - sub_radius || r >= hi + sub_radius {
                frac = 0.0;
            } else if !(r > lo + sub_radius && r < hi - sub_radius) {
                match dom.grad_rho(&x) {
                    Ok(g) => frac *= box_fraction(r, &g, &half, *lo, *hi),
                    Err(_) => frac = 0.0,
                }
            }
        }
        if frac > 1e-14 {
            pts.extend_from_slice(&x);
            wts.push(sub_vol * frac);
            rhos.push(primary.rho(&x).unwrap_or(f64::NAN));
        }
        let mut axis = 0;
        loop {
            if axis >= m {
                return;
            }
            corner[axis] += 1;
            if corner[axis] < 2 {
                break;
            }
            corner[axis] = 0;
            axis += 1;
        }
    }
}

/// Product-angle rule on the unit sphere S^{m-1}: nodes and weights of the
/// surface measure. Polar angles use midpoint or Gauss-Legendre nodes, the
/// azimuthal angle a periodic equal-weight rule.
fn sphere_rule(m: usize, res: usize, order: QuadOrder) -> (Vec<f64>, Vec<f64>) {
    use std::f64::consts::PI;
    assert!(m >= 2);
    let n_polar = m - 2;
    let polar: Vec<(Vec<f64>, Vec<f64>)> = (0..n_polar)
        .map(|_| match order {
            QuadOrder::Midpoint => {
                let nodes: Vec<f64> = (0..res).map(|i| PI * (i as f64 + 0.5) / res as f64).collect();
                let w = vec![PI / res as f64; res];
                (nodes, w)
            }
            QuadOrder::Gauss => {
                let (x, w) = gauss_legendre(res);
                (
                    x.iter().map(|t| 0.5 * PI * (t + 1.0)).collect(),
                    w.iter().map(|w| 0.5 * PI * w).collect(),
                )
            }
        })
        .collect();
    let nphi = 2 * res;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut idx = vec![0usize; n_polar + 1];
    loop {
        let mut w = 2.0 * PI / nphi as f64;
        let mut sin_prod = 1.0;
        let mut x = vec![0.0; m];
        for k in 0..n_polar {
            let theta = polar[k].0[idx[k]];
            // sin power m-2-k for the k-th polar angle
            w *= polar[k].1[idx[k]] * theta.sin().powi((m - 2 - k) as i32);
            x[k] = sin_prod * theta.cos();
            sin_prod *= theta.sin();
        }
        let phi = 2.0 * PI * idx[n_polar] as f64 / nphi as f64;
        x[m - 2] = sin_prod * phi.cos();
        x[m - 1] = sin_prod * phi.sin();
        points.extend_from_slice(&x);
        weights.push(w);
        let mut axis = 0;
        loop {
            if axis > n_polar {
                return (points, weights);
            }
            idx[axis] += 1;
            let cap = if axis < n_polar { res } else { nphi };
            if idx[axis] < cap {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Boundary scheme with exact area elements for balls and ellipsoids, and a
/// level-set fallback for implicit domains.
pub fn boundary_scheme(
    domain: &Arc<DomainSpec>,
    resolution: usize,
    order: QuadOrder,
) -> Result<BoundaryScheme> {
    use crate::geometry::domain::DomainKind;
    let n = domain.n;
    let m = 2 * n;
    match &domain.kind {
        DomainKind::Ball { center, radius } => {
            let (unit, uw) = sphere_rule(m, resolution, order);
            let count = uw.len();
            let mut points = vec![0.0; count * m];
            let mut normals = vec![0.0; count * m];
            let mut weights = vec![0.0; count];
            let c: Vec<f64> = center.iter().flat_map(|z| [z.re, z.im]).collect();
            let rpow = radius.powi((m - 1) as i32);
            for i in 0..count {
                for k in 0..m {
                    points[i * m + k] = c[k] + radius * unit[i * m + k];
                    normals[i * m + k] = unit[i * m + k];
                }
                weights[i] = uw[i] * rpow;
            }
            Ok(BoundaryScheme { n, points, weights, normals, resolution, domain: Arc::clone(domain) })
        }
        DomainKind::Ellipsoid { center, semi_axes } => {
            let (unit, uw) = sphere_rule(m, resolution, order);
            let count = uw.len();
            let ax: Vec<f64> = semi_axes.iter().flat_map(|a| [*a, *a]).collect();
            let det: f64 = ax.iter().product();
            let mut points = vec![0.0; count * m];
            let mut normals = vec![0.0; count * m];
            let mut weights = vec![0.0; count];
            let c: Vec<f64> = center.iter().flat_map(|z| [z.re, z.im]).collect();
            for i in 0..count {
                let s = &unit[i * m..(i + 1) * m];
                let mut invts = vec![0.0; m];
                let mut norm = 0.0;
                for k in 0..m {
                    points[i * m + k] = c[k] + ax[k] * s[k];
                    invts[k] = s[k] / ax[k];
                    norm += invts[k] * invts[k];
                }
                let norm = norm.sqrt();
                for k in 0..m {
                    normals[i * m + k] = invts[k] / norm;
                }
                weights[i] = uw[i] * det * norm;
            }
            Ok(BoundaryScheme { n, points, weights, normals, resolution, domain: Arc::clone(domain) })
        }
        DomainKind::Implicit(_) => {
            // level-set rule: smoothed delta of rho on a volume grid
            let shell = domain.shell_thickness;
            let region = Region::Shell {
                domain: Arc::clone(domain),
                lo: -shell * 0.9,
                hi: shell * 0.9,
            };
            let vol = volume_scheme(&region, resolution, QuadOrder::Midpoint)?;
            let (lo_box, hi_box) = region.bbox();
            let h: f64 = (0..m)
                .map(|i| (hi_box[i] - lo_box[i]) / resolution as f64)
                .fold(0.0, f64::max);
            let eps = 2.0 * h;
            let mut points = Vec::new();
            let mut weights = Vec::new();
            let mut normals = Vec::new();
            for i in 0..vol.len() {
                let r = vol.rho[i];
                if r.abs() >= eps {
                    continue;
                }
                let delta =
                    (1.0 + (std::f64::consts::PI * r / eps).cos()) / (2.0 * eps);
                let g = domain.grad_rho(vol.point(i))?;
                points.extend_from_slice(vol.point(i));
                weights.push(vol.weights[i] * delta);
                normals.extend(g);
            }
            Ok(BoundaryScheme { n, points, weights, normals, resolution, domain: Arc::clone(domain) })
        }
    }
}
