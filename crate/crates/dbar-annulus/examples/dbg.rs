use dbar_annulus::geometry::{DomainSpec, ImplicitFn};
use dbar_annulus::convexity::*;
use dbar_annulus::util::real_to_complex;
use std::sync::Arc;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

fn dumbbell() -> Arc<DomainSpec> {
    let sep = 0.95; let eps = 0.05;
    let f = Arc::new(move |x: &[f64]| -> f64 {
        let dist = |shift: f64| -> f64 {
            let d = [x[0], x[1], x[2] - shift, x[3]];
            d.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0
        };
        let (d1, d2) = (dist(sep), dist(-sep));
        let lo = d1.min(d2);
        lo - eps * (1.0 + (-(d1 - d2).abs() / eps).exp()).ln()
    });
    DomainSpec::implicit(2, ImplicitFn {
        f, grad: None,
        lo: vec![-1.3, -1.3, -2.2, -1.3], hi: vec![1.3, 1.3, 2.2, 1.3],
        interior: vec![0.0; 4], distance_like: false,
    }, 0.08)
}

fn main() {
    let d = dumbbell();
    // hand-build one aligned trial at the waist, c = 0
    let dir = vec![1.0, 0.0, 0.0, 0.0];
    let b = d.boundary_point(&dir).unwrap();
    let g = d.grad_rho(&b).unwrap();
    let t = 0.004;
    let x: Vec<f64> = b.iter().zip(&g).map(|(x,g)| x - t*g).collect();
    let center = real_to_complex(&x);
    println!("rho(center) = {:?}", d.rho(&x));
    let jet = d.jet2_unchecked(&real_to_complex(&b)).unwrap();
    let (vals, vecs) = tangential_levi_eigenpairs(&jet).unwrap();
    println!("levi vals: {vals:?}");
    let field = convexity_potential(&d, 0.0);
    let hints = vec![Some(vec![vecs[0].clone()])];
    for r in [4e-4, 8e-4, 1.4e-3] {
        let rep = check_q_subharmonic_hinted(&field, 1, 2, &[center.clone()], Some(&hints), &[r], 99);
        println!("r={r:.1e}: viol {} gap {:.3e}", rep.submean_violations, rep.min_q_sum);
    }
    // expected gap: r^2 * lambda/|rho|
    println!("expected gap at r=8e-4: {:.3e}", 8e-4f64.powi(2) * vals[0]/0.004);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let _ : f64 = rng.sample(StandardNormal);
}
