use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::SurfaceId;
use crate::complex_core::{root_of_unity, Point, PointC2, ProjPoint2, Tolerance, C64, I};
use crate::groups::{frac_linear, frac_linear_eta, GroupElement, GroupId};
use crate::{Error, Result};

/// An element of one of the automorphism families of the model surfaces.
///
/// `Nu` covers both components of SO₂,₁(ℝ): the matrix applied is `q` when
/// `flip` is false and diag(−1, 1, −1)·q otherwise, with `q` in the identity
/// component. `Chi` stores the O₂(ℝ) matrix row by row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AutFamily {
    S3 { q: GroupElement },
    Lens { m: u32, u: [[C64; 2]; 2] },
    Sigma { lambda: f64, phi: f64, a: C64, gamma: f64 },
    SigmaPlus { lambda: f64, beta: f64, gamma: f64 },
    Epsilon { alpha: f64, phi: f64, psi: f64, a: C64 },
    Omega { phi: f64, a: C64, gamma: f64 },
    Delta { phi: f64, psi: f64, a: C64 },
    Nu { q: GroupElement, flip: bool },
    Tau { alpha: f64, lambda: f64, beta: f64, gamma: f64 },
    Xi { lambda: f64, beta: f64, gamma: f64 },
    Chi { a: [[f64; 2]; 2], beta: f64, gamma: f64 },
    Rho { alpha: f64, psi: f64, beta: f64, gamma: f64 },
    Mu { a: GroupElement },
    Eta { q: GroupElement },
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}

fn need_group(g: &GroupElement, id: GroupId) -> Result<()> {
    if g.id != id {
        return Err(bad(format!("expected a {id:?} element, got {:?}", g.id)));
    }
    let r = g.invariant_residual();
    if !(r <= 1e-8) {
        return Err(bad(format!("{id:?} certificate fails (residual {r:e})")));
    }
    Ok(())
}

fn reflect3() -> Matrix3<C64> {
    let mut m = Matrix3::<C64>::identity();
    m[(0, 0)] = C64::new(-1.0, 0.0);
    m[(2, 2)] = C64::new(-1.0, 0.0);
    m
}

impl AutFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AutFamily::S3 { .. } => "S3",
            AutFamily::Lens { .. } => "lens",
            AutFamily::Sigma { .. } => "sigma",
            AutFamily::SigmaPlus { .. } => "sigma_plus",
            AutFamily::Epsilon { .. } => "epsilon",
            AutFamily::Omega { .. } => "omega",
            AutFamily::Delta { .. } => "delta",
            AutFamily::Nu { .. } => "nu",
            AutFamily::Tau { .. } => "tau",
            AutFamily::Xi { .. } => "xi",
            AutFamily::Chi { .. } => "chi",
            AutFamily::Rho { .. } => "rho",
            AutFamily::Mu { .. } => "mu",
            AutFamily::Eta { .. } => "eta",
        }
    }

    /// Whether the family acts on the given surface.
    pub fn acts_on(&self, s: &SurfaceId) -> bool {
        match (self, s) {
            (AutFamily::Lens { m, .. }, SurfaceId::Lens { m: k }) => m == k,
            (AutFamily::Epsilon { alpha, .. }, SurfaceId::Epsilon { alpha: b }) => alpha == b,
            (AutFamily::Tau { alpha, .. }, SurfaceId::Tau { alpha: b }) => alpha == b,
            (AutFamily::Rho { alpha, .. }, SurfaceId::Rho { alpha: b }) => alpha == b,
            (AutFamily::Mu { .. }, SurfaceId::Mu { .. })
            | (AutFamily::Nu { .. }, SurfaceId::Nu { .. })
            | (AutFamily::Eta { .. }, SurfaceId::Eta { .. }) => true,
            _ => self.name() == s.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AutFamily::S3 { q } => need_group(q, GroupId::SU21),
            AutFamily::Lens { m, u } => {
                if *m < 2 {
                    return Err(bad(format!("lens space needs m >= 2, got {m}")));
                }
                let mut err = 0.0f64;
                for i in 0..2 {
                    for j in 0..2 {
                        let ip = u[0][i] * u[0][j].conj() + u[1][i] * u[1][j].conj();
                        let target = if i == j { 1.0 } else { 0.0 };
                        err = err.max((ip - target).norm());
                    }
                }
                if !(err <= 1e-8) {
                    return Err(bad(format!("lens matrix is not unitary (residual {err:e})")));
                }
                Ok(())
            }
            AutFamily::Sigma { lambda, .. } if !(lambda.is_finite() && *lambda != 0.0) => {
                Err(bad("sigma needs lambda != 0"))
            }
            AutFamily::SigmaPlus { lambda, .. }
            | AutFamily::Tau { lambda, .. }
            | AutFamily::Xi { lambda, .. }
                if !(*lambda > 0.0 && lambda.is_finite()) =>
            {
                Err(bad(format!("lambda must be positive, got {lambda}")))
            }
            AutFamily::Epsilon { alpha, .. } if !(*alpha > 0.0) => {
                Err(bad(format!("epsilon needs alpha > 0, got {alpha}")))
            }
            AutFamily::Epsilon { a, .. } | AutFamily::Omega { a, .. } if !(a.norm() < 1.0) => {
                Err(bad(format!("|a| must be < 1, got {}", a.norm())))
            }
            AutFamily::Tau { alpha, .. } => SurfaceId::Tau { alpha: *alpha }.validate(),
            AutFamily::Rho { alpha, .. } if !(*alpha > 0.0) => {
                Err(bad(format!("rho needs alpha > 0, got {alpha}")))
            }
            AutFamily::Chi { a, .. } => {
                let e00 = a[0][0] * a[0][0] + a[1][0] * a[1][0] - 1.0;
                let e11 = a[0][1] * a[0][1] + a[1][1] * a[1][1] - 1.0;
                let e01 = a[0][0] * a[0][1] + a[1][0] * a[1][1];
                let err = e00.abs().max(e11.abs()).max(e01.abs());
                if !(err <= 1e-10) {
                    return Err(bad(format!("chi matrix is not orthogonal (residual {err:e})")));
                }
                Ok(())
            }
            AutFamily::Nu { q, .. } | AutFamily::Eta { q } => need_group(q, GroupId::SO21c),
            AutFamily::Mu { a } => need_group(a, GroupId::SO3),
            _ => Ok(()),
        }
    }

    /// The 3×3 matrix acting on (z, w, 1) for the ν family.
    fn nu_matrix(q: &GroupElement, flip: bool) -> Result<Matrix3<C64>> {
        let m = q.m3()?;
        Ok(if flip { reflect3() * m } else { m })
    }
}

/// Multiplies a ℂ² representative of a lens-space class by the m-th root of
/// unity that brings arg z (or arg w when |z| < abs_tol) into [0, 2π/m).
pub fn lens_canonical(m: u32, p: PointC2, tol: &Tolerance) -> Result<PointC2> {
    if m < 2 {
        return Err(bad(format!("lens space needs m >= 2, got {m}")));
    }
    let lead = if p.z.norm() >= tol.abs_tol { p.z } else { p.w };
    if lead.norm() == 0.0 {
        return Err(Error::OriginExcluded);
    }
    let sector = 2.0 * PI / m as f64;
    let arg = lead.arg().rem_euclid(2.0 * PI);
    let k = (arg / sector).floor() as i64;
    let mut q = p.scale(root_of_unity(m, -k));
    // guard against rounding pushing the argument just below 0
    let a = if p.z.norm() >= tol.abs_tol { q.z.arg() } else { q.w.arg() };
    if a < 0.0 {
        q = q.scale(root_of_unity(m, 1));
    }
    Ok(q)
}

/// Applies an automorphism to a point of its surface's ambient space.
pub fn aut_apply(fam: &AutFamily, p: &Point, tol: &Tolerance) -> Result<Point> {
    fam.validate()?;
    if let AutFamily::Mu { a } = fam {
        let h = p.as_p2()?.coords();
        let m = a.m3()?;
        let out: [C64; 3] =
            std::array::from_fn(|i| m[(i, 0)] * h[0] + m[(i, 1)] * h[1] + m[(i, 2)] * h[2]);
        return Ok(Point::P2(ProjPoint2::new(out)?));
    }
    let q = p.as_c2()?;
    let (z, w) = (q.z, q.w);
    let one = C64::new(1.0, 0.0);
    let out = match *fam {
        AutFamily::S3 { q: ref g } => frac_linear(g, q, tol)?,
        AutFamily::Lens { m, u } => {
            let r = PointC2::new(u[0][0] * z + u[0][1] * w, u[1][0] * z + u[1][1] * w);
            lens_canonical(m, r, tol)?
        }
        AutFamily::Sigma { lambda, phi, a, gamma } => {
            let l = C64::from_polar(lambda, phi);
            PointC2::new(
                l * z + a,
                lambda * lambda * w + 2.0 * l * a.conj() * z + a.norm_sqr() + I * gamma,
            )
        }
        AutFamily::SigmaPlus { lambda, beta, gamma } => PointC2::new(
            lambda * z + I * beta,
            lambda * lambda * w - 2.0 * I * lambda * beta * z + beta * beta + I * gamma,
        ),
        AutFamily::Epsilon { alpha, phi, psi, a } => {
            let den = one - a.conj() * z;
            let zz = C64::from_polar(1.0, phi) * (z - a) / den;
            let scale = (1.0 - a.norm_sqr()).powf(1.0 / alpha) * (-(2.0 / alpha) * den.ln()).exp();
            PointC2::new(zz, C64::from_polar(1.0, psi) * scale * w)
        }
        AutFamily::Omega { phi, a, gamma } => {
            let den = one - a.conj() * z;
            let zz = C64::from_polar(1.0, phi) * (z - a) / den;
            let ratio = C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0) / den;
            PointC2::new(zz, w + 2.0 * ratio.ln() + I * gamma)
        }
        AutFamily::Delta { phi, psi, a } => {
            let e = C64::from_polar(1.0, phi);
            let factor = (2.0 * e * a.conj() * z + a.norm_sqr()).exp();
            PointC2::new(e * z + a, C64::from_polar(1.0, psi) * factor * w)
        }
        AutFamily::Nu { q: ref g, flip } => {
            let m = AutFamily::nu_matrix(g, flip)?;
            frac_linear(&GroupElement::from_matrix3(GroupId::SU21, m)?, q, tol)?
        }
        AutFamily::Tau { alpha, lambda, beta, gamma } => {
            PointC2::new(lambda * z + I * beta, lambda.powf(alpha) * w + I * gamma)
        }
        AutFamily::Xi { lambda, beta, gamma } => PointC2::new(
            lambda * z + I * beta,
            lambda * lambda.ln() * z + lambda * w + I * gamma,
        ),
        AutFamily::Chi { a, beta, gamma } => PointC2::new(
            a[0][0] * z + a[0][1] * w + I * beta,
            a[1][0] * z + a[1][1] * w + I * gamma,
        ),
        AutFamily::Rho { alpha, psi, beta, gamma } => {
            let k = (alpha * psi).exp();
            let (s, c) = psi.sin_cos();
            PointC2::new(
                k * (c * z + s * w) + I * beta,
                k * (-s * z + c * w) + I * gamma,
            )
        }
        AutFamily::Eta { q: ref g } => frac_linear_eta(g, q, tol)?,
        AutFamily::Mu { .. } => unreachable!("handled above"),
    };
    Ok(Point::C2(out))
}

fn rot_apply(a: [[f64; 2]; 2], v: (f64, f64)) -> (f64, f64) {
    (a[0][0] * v.0 + a[0][1] * v.1, a[1][0] * v.0 + a[1][1] * v.1)
}

/// The parameters of f∘g for two elements of the same family.
pub fn compose(f: &AutFamily, g: &AutFamily) -> Result<AutFamily> {
    f.validate()?;
    g.validate()?;
    let unsupported = || {
        Error::UnsupportedPair(format!("cannot compose {} with {}", f.name(), g.name()))
    };
    Ok(match (*f, *g) {
        (AutFamily::S3 { q: a }, AutFamily::S3 { q: b }) => AutFamily::S3 { q: a.mul(&b)? },
        (AutFamily::Mu { a }, AutFamily::Mu { a: b }) => AutFamily::Mu { a: a.mul(&b)? },
        (AutFamily::Eta { q: a }, AutFamily::Eta { q: b }) => AutFamily::Eta { q: a.mul(&b)? },
        (AutFamily::Nu { q: a, flip: fa }, AutFamily::Nu { q: b, flip: fb }) => {
            let m = AutFamily::nu_matrix(&a, fa)? * AutFamily::nu_matrix(&b, fb)?;
            let flip = m[(2, 2)].re < 0.0;
            let q = if flip { reflect3() * m } else { m };
            AutFamily::Nu {
                q: GroupElement::from_matrix3(GroupId::SO21c, q)?,
                flip,
            }
        }
        (AutFamily::Lens { m, u: a }, AutFamily::Lens { m: k, u: b }) if m == k => {
            let u = std::array::from_fn(|i| {
                std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
            });
            AutFamily::Lens { m, u }
        }
        (
            AutFamily::Sigma { lambda: l1, phi: p1, a: a1, gamma: g1 },
            AutFamily::Sigma { lambda: l2, phi: p2, a: a2, gamma: g2 },
        ) => {
            let big = C64::from_polar(l1, p1);
            AutFamily::Sigma {
                lambda: l1 * l2,
                phi: p1 + p2,
                a: big * a2 + a1,
                gamma: l1 * l1 * g2 + g1 + 2.0 * (big * a2 * a1.conj()).im,
            }
        }
        (
            AutFamily::SigmaPlus { lambda: l1, beta: b1, gamma: g1 },
            AutFamily::SigmaPlus { lambda: l2, beta: b2, gamma: g2 },
        ) => AutFamily::SigmaPlus {
            lambda: l1 * l2,
            beta: l1 * b2 + b1,
            gamma: l1 * l1 * g2 + g1,
        },
        (
            AutFamily::Tau { alpha, lambda: l1, beta: b1, gamma: g1 },
            AutFamily::Tau { alpha: a2, lambda: l2, beta: b2, gamma: g2 },
        ) if alpha == a2 => AutFamily::Tau {
            alpha,
            lambda: l1 * l2,
            beta: l1 * b2 + b1,
            gamma: l1.powf(alpha) * g2 + g1,
        },
        (
            AutFamily::Xi { lambda: l1, beta: b1, gamma: g1 },
            AutFamily::Xi { lambda: l2, beta: b2, gamma: g2 },
        ) => AutFamily::Xi {
            lambda: l1 * l2,
            beta: l1 * b2 + b1,
            gamma: l1 * g2 + g1 + l1 * l1.ln() * b2,
        },
        (
            AutFamily::Chi { a: a1, beta: b1, gamma: g1 },
            AutFamily::Chi { a: a2, beta: b2, gamma: g2 },
        ) => {
            let a = std::array::from_fn(|i| {
                std::array::from_fn(|j| a1[i][0] * a2[0][j] + a1[i][1] * a2[1][j])
            });
            let (b, g) = rot_apply(a1, (b2, g2));
            AutFamily::Chi {
                a,
                beta: b + b1,
                gamma: g + g1,
            }
        }
        (
            AutFamily::Rho { alpha, psi: p1, beta: b1, gamma: g1 },
            AutFamily::Rho { alpha: a2, psi: p2, beta: b2, gamma: g2 },
        ) if alpha == a2 => {
            let k = (alpha * p1).exp();
            let (s, c) = p1.sin_cos();
            let (b, g) = rot_apply([[k * c, k * s], [-k * s, k * c]], (b2, g2));
            AutFamily::Rho {
                alpha,
                psi: p1 + p2,
                beta: b + b1,
                gamma: g + g1,
            }
        }
        _ => return Err(unsupported()),
    })
}
