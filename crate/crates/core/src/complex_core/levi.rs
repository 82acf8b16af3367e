use super::{PointC2, Tolerance, C64};
use crate::{Error, Result};

/// A real defining function ρ on (an open set of) ℂ².
pub trait DefiningFunction {
    fn eval(&self, p: PointC2) -> f64;
}

impl<F: Fn(PointC2) -> f64> DefiningFunction for F {
    fn eval(&self, p: PointC2) -> f64 {
        self(p)
    }
}

/// Restricted Levi form of ρ at p: the complex Hessian ∂²ρ/∂z_j∂z̄_k evaluated
/// on the unit vector spanning the complex tangent line Σ (∂ρ/∂z_j) v_j = 0.
///
/// Derivatives are central differences with step max(√abs_tol, 1e-4)·max(1, |x_i|)
/// in each real coordinate, refined by one Richardson extrapolation. A positive
/// value certifies strong pseudoconvexity at p for the side {ρ < 0}.
pub fn levi_min_eigenvalue<R: DefiningFunction + ?Sized>(
    rho: &R,
    p: PointC2,
    tol: &Tolerance,
) -> Result<f64> {
    let x = p.to_reals();
    let base = tol.abs_tol.sqrt().max(1e-4);
    let h0: [f64; 4] = std::array::from_fn(|i| base * x[i].abs().max(1.0));
    let f = |d: [f64; 4]| {
        let q = PointC2::from_reals(x[0] + d[0], x[1] + d[1], x[2] + d[2], x[3] + d[3]);
        rho.eval(q)
    };
    let value = rho.eval(p);

    // central differences at step h, as (gradient, Hessian)
    let diffs = |scale: f64| {
        let h: [f64; 4] = std::array::from_fn(|i| h0[i] * scale);
        let at = |pairs: &[(usize, f64)]| {
            let mut d = [0.0; 4];
            for &(i, s) in pairs {
                d[i] += s * h[i];
            }
            f(d)
        };
        let mut grad = [0.0; 4];
        let mut hess = [[0.0; 4]; 4];
        for i in 0..4 {
            let (fp, fm) = (at(&[(i, 1.0)]), at(&[(i, -1.0)]));
            grad[i] = (fp - fm) / (2.0 * h[i]);
            hess[i][i] = (fp - 2.0 * value + fm) / (h[i] * h[i]);
            for j in (i + 1)..4 {
                let v = (at(&[(i, 1.0), (j, 1.0)]) - at(&[(i, 1.0), (j, -1.0)])
                    - at(&[(i, -1.0), (j, 1.0)])
                    + at(&[(i, -1.0), (j, -1.0)]))
                    / (4.0 * h[i] * h[j]);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        (grad, hess)
    };
    // one Richardson step removes the O(h²) error term, which matters close
    // to the singular sets of the |·| defining functions
    let (g1, h1) = diffs(1.0);
    let (g2, h2) = diffs(0.5);
    let grad: [f64; 4] = std::array::from_fn(|i| (4.0 * g2[i] - g1[i]) / 3.0);
    let hess: [[f64; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| (4.0 * h2[i][j] - h1[i][j]) / 3.0));

    let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if !(grad_norm >= tol.abs_tol) {
        return Err(Error::DegenerateGradient(grad_norm));
    }
    if !(value.abs() <= tol.abs_tol * (1.0 + grad_norm * (1.0 + p.norm()))) {
        return Err(Error::NotOnSurface(value.abs()));
    }

    // ∂/∂z_j = ½(∂x_j − i∂y_j), ∂/∂z̄_k = ½(∂x_k + i∂y_k)
    let mut cplx = [[C64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            cplx[j][k] = C64::new(
                0.25 * (hess[xj][xk] + hess[yj][yk]),
                0.25 * (hess[xj][yk] - hess[yj][xk]),
            );
        }
    }
    let dz = C64::new(0.5 * grad[0], -0.5 * grad[1]);
    let dw = C64::new(0.5 * grad[2], -0.5 * grad[3]);
    let len = (dz.norm_sqr() + dw.norm_sqr()).sqrt();
    let v = [dw / len, -dz / len];
    let mut levi = C64::new(0.0, 0.0);
    for j in 0..2 {
        for k in 0..2 {
            levi += cplx[j][k] * v[j] * v[k].conj();
        }
    }
    Ok(levi.re)
}
