//! Scalar coefficient fields with exact Wirtinger jets.
//!
//! Fields are small expression trees closed under d/dz_j and d/dzbar_j, so
//! test forms keep analytic derivatives all the way through the calculus;
//! grids only ever see point evaluations. Signed-distance factors appear as
//! `Rho` leaves that read the host domain's jets (up to third order).

use std::sync::Arc;

use crate::geometry::domain::DomainSpec;
use crate::geometry::jet::{Jet2, Jet3};
use crate::C;

/// Univariate smooth profiles applied to real-valued subexpressions.
#[derive(Clone, Debug)]
pub enum SmoothFn {
    /// exp(-t/(r2 - t)) on [0, r2), zero beyond; a compactly supported bump
    /// in t = |z - c|^2.
    Bump { r2: f64 },
    /// Quintic smoothstep rising 0 -> 1 over [lo, hi].
    SmoothStep { lo: f64, hi: f64 },
    /// t^p for integer p (negative allowed away from t = 0).
    Powi { p: i32 },
    /// -log(-t) for t < 0.
    NegLogNeg,
    /// exp(s t).
    Exp { s: f64 },
}

impl SmoothFn {
    /// k-th derivative at t, k <= 3.
    pub fn eval(&self, t: f64, k: usize) -> f64 {
        match self {
            SmoothFn::Bump { r2 } => {
                if t <= 0.0 || t >= *r2 {
                    // smooth continuation from the left of 0 is the same
                    // formula; only the right cutoff matters in practice
                    if t >= *r2 {
                        return 0.0;
                    }
                }
                if t >= *r2 {
                    return 0.0;
                }
                let d = r2 - t;
                let s = (-t / d).exp();
                let g1 = -r2 / (d * d);
                let g2 = -2.0 * r2 / (d * d * d);
                let g3 = -6.0 * r2 / (d * d * d * d);
                match k {
                    0 => s,
                    1 => s * g1,
                    2 => s * (g1 * g1 + g2),
                    3 => s * (g1 * g1 * g1 + 3.0 * g1 * g2 + g3),
                    _ => unreachable!(),
                }
            }
            SmoothFn::SmoothStep { lo, hi } => {
                let w = hi - lo;
                let u = (t - lo) / w;
                if u <= 0.0 {
                    return 0.0;
                }
                if u >= 1.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                let base = match k {
                    0 => 10.0 * u.powi(3) - 15.0 * u.powi(4) + 6.0 * u.powi(5),
                    1 => 30.0 * u.powi(2) - 60.0 * u.powi(3) + 30.0 * u.powi(4),
                    2 => 60.0 * u - 180.0 * u.powi(2) + 120.0 * u.powi(3),
                    3 => 60.0 - 360.0 * u + 360.0 * u.powi(2),
                    _ => unreachable!(),
                };
                base / w.powi(k as i32)
            }
            SmoothFn::Powi { p } => {
                let mut c = 1.0;
                let mut e = *p;
                for _ in 0..k {
                    c *= e as f64;
                    e -= 1;
                }
                c * t.powi(e)
            }
            SmoothFn::NegLogNeg => match k {
                0 => -(-t).ln(),
                1 => -1.0 / t,
                2 => 1.0 / (t * t),
                3 => -2.0 / (t * t * t),
                _ => unreachable!(),
            },
            SmoothFn::Exp { s } => s.powi(k as i32) * (s * t).exp(),
        }
    }
}

#[derive(Clone)]
pub enum Expr {
    Const(C),
    /// z_j
    Z(usize),
    /// conj(z_j)
    Zb(usize),
    Add(Vec<Field>),
    Mul(Vec<Field>),
    Neg(Field),
    Conj(Field),
    /// k-th derivative of a smooth profile of a real-valued field.
    Smooth(SmoothFn, usize, Field),
    /// Wirtinger derivative of the signed distance: indices `holo` then
    /// conjugated indices `anti`; total order at most 3.
    Rho(Arc<DomainSpec>, Vec<u8>, Vec<u8>),
}

#[derive(Clone)]
pub struct Field(pub Arc<Expr>);

impl Field {
    pub fn constant(c: C) -> Field {
        Field(Arc::new(Expr::Const(c)))
    }

    pub fn real(x: f64) -> Field {
        Field::constant(C::new(x, 0.0))
    }

    pub fn z(j: usize) -> Field {
        Field(Arc::new(Expr::Z(j)))
    }

    pub fn zb(j: usize) -> Field {
        Field(Arc::new(Expr::Zb(j)))
    }

    pub fn zero() -> Field {
        Field::real(0.0)
    }

    pub fn add(terms: Vec<Field>) -> Field {
        Field(Arc::new(Expr::Add(terms)))
    }

    pub fn mul(factors: Vec<Field>) -> Field {
        Field(Arc::new(Expr::Mul(factors)))
    }

    pub fn neg(self) -> Field {
        Field(Arc::new(Expr::Neg(self)))
    }

    pub fn conj(self) -> Field {
        Field(Arc::new(Expr::Conj(self)))
    }

    pub fn smooth(f: SmoothFn, arg: Field) -> Field {
        Field(Arc::new(Expr::Smooth(f, 0, arg)))
    }

    pub fn rho(domain: &Arc<DomainSpec>) -> Field {
        Field(Arc::new(Expr::Rho(Arc::clone(domain), vec![], vec![])))
    }

    /// rho_k of a domain.
    pub fn rho_d(domain: &Arc<DomainSpec>, k: usize) -> Field {
        Field(Arc::new(Expr::Rho(Arc::clone(domain), vec![k as u8], vec![])))
    }

    pub fn scale(self, c: C) -> Field {
        Field::mul(vec![Field::constant(c), self])
    }

    /// |z - c|^2 as a field.
    pub fn dist_sq(center: &[C]) -> Field {
        let mut terms = Vec::new();
        for (j, c) in center.iter().enumerate() {
            let dz = Field::add(vec![Field::z(j), Field::constant(-c)]);
            terms.push(Field::mul(vec![dz.clone(), dz.conj()]));
        }
        Field::add(terms)
    }

    /// Radial bump supported on |z - c| < r.
    pub fn bump(center: &[C], r: f64) -> Field {
        Field::smooth(SmoothFn::Bump { r2: r * r }, Field::dist_sq(center))
    }

    /// Symbolic d/dz_j.
    pub fn d_z(&self, j: usize) -> Field {
        match &*self.0 {
            Expr::Const(_) => Field::zero(),
            Expr::Z(k) => Field::real(if *k == j { 1.0 } else { 0.0 }),
            Expr::Zb(_) => Field::zero(),
            Expr::Add(ts) => Field::add(ts.iter().map(|t| t.d_z(j)).collect()),
            Expr::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let mut fac = fs.clone();
                    fac[i] = fs[i].d_z(j);
                    terms.push(Field::mul(fac));
                }
                Field::add(terms)
            }
            Expr::Neg(f) => f.d_z(j).neg(),
            Expr::Conj(f) => f.d_zb(j).conj(),
            Expr::Smooth(s, k, arg) => Field::mul(vec![
                Field(Arc::new(Expr::Smooth(s.clone(), k + 1, arg.clone()))),
                arg.d_z(j),
            ]),
            Expr::Rho(d, holo, anti) => {
                let mut h = holo.clone();
                h.push(j as u8);
                assert!(h.len() + anti.len() <= 3, "rho derivatives stop at third order");
                Field(Arc::new(Expr::Rho(Arc::clone(d), h, anti.clone())))
            }
        }
    }

    /// Symbolic d/dzbar_j.
    pub fn d_zb(&self, j: usize) -> Field {
        match &*self.0 {
            Expr::Const(_) => Field::zero(),
            Expr::Z(_) => Field::zero(),
            Expr::Zb(k) => Field::real(if *k == j { 1.0 } else { 0.0 }),
            Expr::Add(ts) => Field::add(ts.iter().map(|t| t.d_zb(j)).collect()),
            Expr::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let mut fac = fs.clone();
                    fac[i] = fs[i].d_zb(j);
                    terms.push(Field::mul(fac));
                }
                Field::add(terms)
            }
            Expr::Neg(f) => f.d_zb(j).neg(),
            Expr::Conj(f) => f.d_z(j).conj(),
            Expr::Smooth(s, k, arg) => Field::mul(vec![
                Field(Arc::new(Expr::Smooth(s.clone(), k + 1, arg.clone()))),
                arg.d_zb(j),
            ]),
            Expr::Rho(d, holo, anti) => {
                let mut a = anti.clone();
                a.push(j as u8);
                assert!(holo.len() + a.len() <= 3, "rho derivatives stop at third order");
                Field(Arc::new(Expr::Rho(Arc::clone(d), holo.clone(), a)))
            }
        }
    }

    pub fn eval(&self, ctx: &mut EvalCtx) -> C {
        match &*self.0 {
            Expr::Const(c) => *c,
            Expr::Z(j) => ctx.z[*j],
            Expr::Zb(j) => ctx.z[*j].conj(),
            Expr::Add(ts) => ts.iter().map(|t| t.eval(ctx)).sum(),
            Expr::Mul(fs) => fs.iter().fold(C::new(1.0, 0.0), |a, f| a * f.eval(ctx)),
            Expr::Neg(f) => -f.eval(ctx),
            Expr::Conj(f) => f.eval(ctx).conj(),
            Expr::Smooth(s, k, arg) => {
                let t = arg.eval(ctx).re;
                C::new(s.eval(t, *k), 0.0)
            }
            Expr::Rho(d, holo, anti) => ctx.rho_component(d, holo, anti),
        }
    }
}

impl std::ops::Add for Field {
    type Output = Field;
    fn add(self, rhs: Field) -> Field {
        Field::add(vec![self, rhs])
    }
}

impl std::ops::Mul for Field {
    type Output = Field;
    fn mul(self, rhs: Field) -> Field {
        Field::mul(vec![self, rhs])
    }
}

/// Per-point evaluation context caching the domain jets that `Rho` leaves
/// pull from.
pub struct EvalCtx {
    pub z: Vec<C>,
    jets2: Vec<(usize, Jet2)>,
    jets3: Vec<(usize, Jet3)>,
}

impl EvalCtx {
    pub fn new(z: &[C]) -> EvalCtx {
        EvalCtx { z: z.to_vec(), jets2: Vec::new(), jets3: Vec::new() }
    }

    /// Pre-seed the cache with an already computed jet of a domain.
    pub fn with_jet(z: &[C], domain: &Arc<DomainSpec>, jet: Jet2) -> EvalCtx {
        let key = Arc::as_ptr(domain) as usize;
        EvalCtx { z: z.to_vec(), jets2: vec![(key, jet)], jets3: Vec::new() }
    }

    fn jet2(&mut self, d: &Arc<DomainSpec>) -> &Jet2 {
        let key = Arc::as_ptr(d) as usize;
        if let Some(pos) = self.jets2.iter().position(|(k, _)| *k == key) {
            return &self.jets2[pos].1;
        }
        let jet = d
            .jet2_unchecked(&self.z)
            .expect("signed-distance jet evaluation failed at a field point");
        self.jets2.push((key, jet));
        &self.jets2.last().unwrap().1
    }

    fn jet3(&mut self, d: &Arc<DomainSpec>) -> &Jet3 {
        let key = Arc::as_ptr(d) as usize;
        if let Some(pos) = self.jets3.iter().position(|(k, _)| *k == key) {
            return &self.jets3[pos].1;
        }
        let jet = d
            .jet3(&self.z)
            .expect("third-order signed-distance jet evaluation failed");
        self.jets3.push((key, jet));
        &self.jets3.last().unwrap().1
    }

    fn rho_component(&mut self, d: &Arc<DomainSpec>, holo: &[u8], anti: &[u8]) -> C {
        let order = holo.len() + anti.len();
        match order {
            0 => C::new(self.jet2(d).rho, 0.0),
            1 => {
                let j = self.jet2(d);
                if holo.len() == 1 {
                    j.d[holo[0] as usize]
                } else {
                    j.db(anti[0] as usize)
                }
            }
            2 => {
                let j = self.jet2(d);
                match (holo.len(), anti.len()) {
                    (2, 0) => j.dzz_at(holo[0] as usize, holo[1] as usize),
                    (1, 1) => j.dzzb_at(holo[0] as usize, anti[0] as usize),
                    (0, 2) => j.dzz_at(anti[0] as usize, anti[1] as usize).conj(),
                    _ => unreachable!(),
                }
            }
            3 => {
                let j = self.jet3(d);
                let (h, a) = (holo, anti);
                match (h.len(), a.len()) {
                    (3, 0) => j.zzz(h[0] as usize, h[1] as usize, h[2] as usize),
                    (2, 1) => j.zzzb(h[0] as usize, h[1] as usize, a[0] as usize),
                    (1, 2) => j.zzzb(a[0] as usize, a[1] as usize, h[0] as usize).conj(),
                    (0, 3) => j.zzz(a[0] as usize, a[1] as usize, a[2] as usize).conj(),
                    _ => unreachable!(),
                }
            }
            _ => panic!("rho derivatives beyond third order are not available"),
        }
    }
}

/// Weight functions phi for the weighted L2 products.
#[derive(Clone)]
pub enum WeightField {
    Zero,
    /// t |z|^2, the canonical family.
    Quadratic { t: f64 },
    Custom(Field),
}

impl WeightField {
    pub fn canonical(t: f64) -> WeightField {
        WeightField::Quadratic { t }
    }

    pub fn value(&self, z: &[C]) -> f64 {
        match self {
            WeightField::Zero => 0.0,
            WeightField::Quadratic { t } => t * z.iter().map(|c| c.norm_sqr()).sum::<f64>(),
            WeightField::Custom(f) => f.eval(&mut EvalCtx::new(z)).re,
        }
    }

    /// Jet of the weight as a real function; exact for the built-in family.
    pub fn jet2(&self, z: &[C]) -> Jet2 {
        let n = z.len();
        match self {
            WeightField::Zero => Jet2 {
                z: z.to_vec(),
                rho: 0.0,
                d: vec![C::new(0.0, 0.0); n],
                dzz: vec![C::new(0.0, 0.0); n * n],
                dzzb: vec![C::new(0.0, 0.0); n * n],
            },
            WeightField::Quadratic { t } => {
                let mut dzzb = vec![C::new(0.0, 0.0); n * n];
                for j in 0..n {
                    dzzb[j * n + j] = C::new(*t, 0.0);
                }
                Jet2 {
                    z: z.to_vec(),
                    rho: self.value(z),
                    d: z.iter().map(|c| t * c.conj()).collect(),
                    dzz: vec![C::new(0.0, 0.0); n * n],
                    dzzb,
                }
            }
            WeightField::Custom(f) => {
                let mut ctx = EvalCtx::new(z);
                let rho = f.eval(&mut ctx).re;
                let d: Vec<C> = (0..n).map(|j| f.d_z(j).eval(&mut ctx)).collect();
                let mut dzz = vec![C::new(0.0, 0.0); n * n];
                let mut dzzb = vec![C::new(0.0, 0.0); n * n];
                for j in 0..n {
                    let fj = f.d_z(j);
                    for k in 0..n {
                        dzz[j * n + k] = fj.d_z(k).eval(&mut ctx);
                        dzzb[j * n + k] = fj.d_zb(k).eval(&mut ctx);
                    }
                }
                Jet2 { z: z.to_vec(), rho, d, dzz, dzzb }
            }
        }
    }

    pub fn as_field(&self, n: usize) -> Field {
        match self {
            WeightField::Zero => Field::zero(),
            WeightField::Quadratic { t } => {
                let mut terms = Vec::new();
                for j in 0..n {
                    terms.push(Field::mul(vec![Field::z(j), Field::zb(j)]));
                }
                Field::add(terms).scale(C::new(*t, 0.0))
            }
            WeightField::Custom(f) => f.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightField::Zero => "phi=0".into(),
            WeightField::Quadratic { t } => format!("phi={t}|z|^2"),
            WeightField::Custom(_) => "phi=custom".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_polynomial() {
        // f = z1^2 zb2
        let f = Field::mul(vec![Field::z(0), Field::z(0), Field::zb(1)]);
        let z = vec![C::new(1.0, 1.0), C::new(0.5, -0.5)];
        let mut ctx = EvalCtx::new(&z);
        let fz = f.d_z(0).eval(&mut ctx);
        assert!((fz - 2.0 * z[0] * z[1].conj()).norm() < 1e-14);
        let fzb = f.d_zb(1).eval(&mut ctx);
        assert!((fzb - z[0] * z[0]).norm() < 1e-14);
        assert!(f.d_zb(0).eval(&mut ctx).norm() < 1e-14);
    }

    #[test]
    fn bump_derivative_matches_fd() {
        let c = vec![C::new(0.2, 0.0), C::new(0.0, -0.1)];
        let b = Field::bump(&c, 0.8);
        let z = vec![C::new(0.4, 0.1), C::new(0.2, 0.1)];
        let mut ctx = EvalCtx::new(&z);
        let dz0 = b.d_z(0).eval(&mut ctx);
        let h = 1e-6;
        let mut zp = z.clone();
        zp[0].re += h;
        let mut zm = z.clone();
        zm[0].re -= h;
        let dx = (b.eval(&mut EvalCtx::new(&zp)) - b.eval(&mut EvalCtx::new(&zm))) / (2.0 * h);
        let mut zp = z.clone();
        zp[0].im += h;
        let mut zm = z.clone();
        zm[0].im -= h;
        let dy = (b.eval(&mut EvalCtx::new(&zp)) - b.eval(&mut EvalCtx::new(&zm))) / (2.0 * h);
        let fd = (dx - C::i() * dy) * 0.5;
        assert!((dz0 - fd).norm() < 1e-8, "{dz0} vs {fd}");
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let c = vec![C::new(0.0, 0.0)];
        let b = Field::bump(&c, 0.5);
        let z = vec![C::new(0.7, 0.0)];
        let mut ctx = EvalCtx::new(&z);
        assert_eq!(b.eval(&mut ctx).norm(), 0.0);
        assert_eq!(b.d_z(0).eval(&mut ctx).norm(), 0.0);
    }

    #[test]
    fn rho_leaf_derivatives() {
        use crate::geometry::domain::DomainSpec;
        let d = DomainSpec::ball(vec![C::new(0.0, 0.0); 2], 1.0, 0.5);
        let f = Field::rho(&d);
        let z = vec![C::new(0.8, 0.1), C::new(0.2, -0.3)];
        let mut ctx = EvalCtx::new(&z);
        let jet = d.jet2_unchecked(&z).unwrap();
        assert!((f.d_z(0).eval(&mut ctx) - jet.d[0]).norm() < 1e-13);
        assert!((f.d_z(0).d_zb(1).eval(&mut ctx) - jet.dzzb_at(0, 1)).norm() < 1e-13);
    }

    #[test]
    fn quadratic_weight_jet() {
        let w = WeightField::canonical(1.5);
        let z = vec![C::new(0.3, 0.4), C::new(-0.2, 0.1)];
        let j = w.jet2(&z);
        assert!((j.rho - 1.5 * (0.25 + 0.05)).abs() < 1e-14);
        assert!((j.d[0] - 1.5 * z[0].conj()).norm() < 1e-14);
        assert!((j.dzzb_at(1, 1) - C::new(1.5, 0.0)).norm() < 1e-14);
    }
}
