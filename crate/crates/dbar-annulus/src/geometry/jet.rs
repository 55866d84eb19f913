//! Second and third order Wirtinger jets of real-valued functions.
//!
//! A `Jet2` stores the value, the holomorphic gradient rho_j, and the two
//! independent second-derivative blocks rho_{jk} and rho_{j kbar}; the
//! antiholomorphic blocks follow by conjugation since the function is real.

use crate::C;

#[derive(Debug, Clone)]
pub struct Jet2 {
    /// Evaluation point.
    pub z: Vec<C>,
    /// Value of the function.
    pub rho: f64,
    /// rho_j = d rho / d z_j.
    pub d: Vec<C>,
    /// rho_{jk}, row-major n x n (symmetric).
    pub dzz: Vec<C>,
    /// rho_{j kbar}, row-major n x n (Hermitian).
    pub dzzb: Vec<C>,
}

impl Jet2 {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// rho_{jbar} = conj(rho_j).
    #[inline]
    pub fn db(&self, j: usize) -> C {
        self.d[j].conj()
    }

    #[inline]
    pub fn dzz_at(&self, j: usize, k: usize) -> C {
        self.dzz[j * self.n() + k]
    }

    /// rho_{j kbar}.
    #[inline]
    pub fn dzzb_at(&self, j: usize, k: usize) -> C {
        self.dzzb[j * self.n() + k]
    }

    /// rho_{jbar k} = conj(rho_{j kbar}).
    #[inline]
    pub fn dzbz_at(&self, j: usize, k: usize) -> C {
        self.dzzb_at(j, k).conj()
    }

    /// 4 sum_j |rho_j|^2, which equals |d rho|^2 for the real gradient.
    pub fn grad_norm_sq(&self) -> f64 {
        4.0 * self.d.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// | |d rho| - 1 |.
    pub fn unit_gradient_deviation(&self) -> f64 {
        (self.grad_norm_sq().sqrt() - 1.0).abs()
    }

    /// Build from a real jet: gradient and Hessian over coordinates
    /// (x_1, y_1, ..., x_n, y_n).
    pub fn from_real(z: &[C], value: f64, grad: &[f64], hess: &[f64]) -> Jet2 {
        let n = z.len();
        let m = 2 * n;
        assert_eq!(grad.len(), m);
        assert_eq!(hess.len(), m * m);
        let h = |a: usize, b: usize| hess[a * m + b];
        let mut d = Vec::with_capacity(n);
        for j in 0..n {
            d.push(C::new(grad[2 * j], -grad[2 * j + 1]) * 0.5);
        }
        let mut dzz = vec![C::new(0.0, 0.0); n * n];
        let mut dzzb = vec![C::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                dzz[j * n + k] = C::new(
                    h(xj, xk) - h(yj, yk),
                    -(h(xj, yk) + h(yj, xk)),
                ) * 0.25;
                dzzb[j * n + k] = C::new(
                    h(xj, xk) + h(yj, yk),
                    h(xj, yk) - h(yj, xk),
                ) * 0.25;
            }
        }
        Jet2 { z: z.to_vec(), rho: value, d, dzz, dzzb }
    }

    /// Real gradient (x_1, y_1, ...) recovered from the Wirtinger gradient.
    pub fn real_grad(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(2 * self.n());
        for c in &self.d {
            g.push(2.0 * c.re);
            g.push(-2.0 * c.im);
        }
        g
    }

    /// Max violation of the conjugate-symmetry invariants. Zero by
    /// construction for jets built through [`Jet2::from_real`].
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.dzz_at(j, k) - self.dzz_at(k, j)).norm());
                worst = worst.max((self.dzzb_at(j, k) - self.dzzb_at(k, j).conj()).norm());
            }
        }
        worst
    }
}

/// Third-order extension. `t1[j][k][l] = rho_{jkl}` (fully symmetric) and
/// `t2[j][k][l] = rho_{jk lbar}` (symmetric in j,k). Every third Wirtinger
/// derivative of a real function is one of these up to conjugation.
#[derive(Debug, Clone)]
pub struct Jet3 {
    pub j2: Jet2,
    pub t1: Vec<C>,
    pub t2: Vec<C>,
}

impl Jet3 {
    pub fn n(&self) -> usize {
        self.j2.n()
    }

    /// rho_{jkl}.
    #[inline]
    pub fn zzz(&self, j: usize, k: usize, l: usize) -> C {
        let n = self.n();
        self.t1[(j * n + k) * n + l]
    }

    /// rho_{jk lbar}.
    #[inline]
    pub fn zzzb(&self, j: usize, k: usize, l: usize) -> C {
        let n = self.n();
        self.t2[(j * n + k) * n + l]
    }

    /// rho_{j kbar lbar} = conj(rho_{k l jbar}).
    #[inline]
    pub fn zzbzb(&self, j: usize, k: usize, l: usize) -> C {
        self.zzzb(k, l, j).conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_real_quadratic() {
        // f = x1^2 - y1^2 => f = Re(z1^2): f_z = z1... check at z = (1+2i)
        let z = vec![C::new(1.0, 2.0)];
        let grad = vec![2.0, -4.0];
        let hess = vec![2.0, 0.0, 0.0, -2.0];
        let j = Jet2::from_real(&z, 1.0 - 4.0, &grad, &hess);
        // f = Re(z^2): f_z = z, f_zz = 1, f_zzb = 0
        assert!((j.d[0] - z[0]).norm() < 1e-14);
        assert!((j.dzz[0] - C::new(1.0, 0.0)).norm() < 1e-14);
        assert!(j.dzzb[0].norm() < 1e-14);
        assert!(j.conjugate_symmetry_defect() < 1e-15);
    }
}
