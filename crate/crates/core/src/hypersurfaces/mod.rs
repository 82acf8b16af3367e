//! The model hypersurfaces, the auxiliary domains and orbits used by the
//! covering constructions, and the automorphism families acting on them.

mod aut;
mod region;
mod sample;

pub use aut::{aut_apply, compose, lens_canonical, AutFamily};
pub use region::{orbit_test, RegionId};
pub use sample::{random_aut, sample_point};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::complex_core::{levi_min_eigenvalue, Point, PointC2, ProjPoint2, Tolerance, C64};
use crate::{Error, Result};

/// One of the model surfaces, with its parameters.
///
/// JSON form: `{"family": "nu", "params": {"alpha": 0.5}}`; parameterless
/// families omit `params`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum SurfaceId {
    S3,
    Lens { m: u32 },
    Sigma,
    SigmaPlus,
    Epsilon { alpha: f64 },
    Omega,
    Delta,
    Nu { alpha: f64 },
    Tau { alpha: f64 },
    Xi,
    Chi,
    Rho { alpha: f64 },
    Mu { alpha: f64 },
    Eta { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    On,
    Outside,
}

/// Result of a membership test. `residual` is the defining-equation mismatch
/// |lhs − rhs| / (1 + max(|lhs|, |rhs|)); for pure inequality regions it is the
/// signed slack of the tightest violated (or, if none, the tightest satisfied)
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub side: Side,
    pub residual: f64,
}

impl Membership {
    pub fn is_on(&self) -> bool {
        self.side == Side::On
    }
}

fn bad(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

impl SurfaceId {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceId::S3 => "S3",
            SurfaceId::Lens { .. } => "lens",
            SurfaceId::Sigma => "sigma",
            SurfaceId::SigmaPlus => "sigma_plus",
            SurfaceId::Epsilon { .. } => "epsilon",
            SurfaceId::Omega => "omega",
            SurfaceId::Delta => "delta",
            SurfaceId::Nu { .. } => "nu",
            SurfaceId::Tau { .. } => "tau",
            SurfaceId::Xi => "xi",
            SurfaceId::Chi => "chi",
            SurfaceId::Rho { .. } => "rho",
            SurfaceId::Mu { .. } => "mu",
            SurfaceId::Eta { .. } => "eta",
        }
    }

    /// Checks the parameter ranges of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SurfaceId::Lens { m } if m < 2 => Err(bad(format!("lens space needs m >= 2, got {m}"))),
            SurfaceId::Epsilon { alpha } if !(alpha > 0.0) => {
                Err(bad(format!("epsilon needs alpha > 0, got {alpha}")))
            }
            SurfaceId::Nu { alpha } if !(alpha > -1.0 && alpha < 1.0) => {
                Err(bad(format!("nu needs -1 < alpha < 1, got {alpha}")))
            }
            SurfaceId::Tau { alpha }
                if !(alpha <= -1.0 || (alpha > 1.0 && alpha < 2.0) || alpha > 2.0) =>
            {
                Err(bad(format!(
                    "tau needs alpha in (-inf,-1] U (1,2) U (2,inf), got {alpha}"
                )))
            }
            SurfaceId::Rho { alpha } if !(alpha > 0.0) => {
                Err(bad(format!("rho needs alpha > 0, got {alpha}")))
            }
            SurfaceId::Mu { alpha } if !(alpha > 1.0) => {
                Err(bad(format!("mu needs alpha > 1, got {alpha}")))
            }
            SurfaceId::Eta { alpha } if !(alpha > 1.0) => {
                Err(bad(format!("eta needs alpha > 1, got {alpha}")))
            }
            _ => Ok(()),
        }
    }

    pub fn ambient(&self) -> &'static str {
        match self {
            SurfaceId::Mu { .. } => "CP^2",
            _ => "C^2",
        }
    }

    /// The two sides of the defining equation, or `None` when an extra
    /// condition of the family (x > 0, w ≠ 0, Im(z(1 + w̄)) > 0, the excluded real
    /// circle of ν) fails.
    fn sides(&self, p: PointC2, tol: &Tolerance) -> Result<Option<(f64, f64)>> {
        let (z, w) = (p.z, p.w);
        let (x, u) = (z.re, w.re);
        let one = C64::new(1.0, 0.0);
        Ok(match *self {
            SurfaceId::S3 | SurfaceId::Lens { .. } => Some((p.norm_sqr(), 1.0)),
            SurfaceId::Sigma => Some((u, z.norm_sqr())),
            SurfaceId::SigmaPlus => (x > 0.0).then(|| (u, z.norm_sqr())),
            SurfaceId::Epsilon { alpha } => {
                (w.norm() > 0.0).then(|| (z.norm_sqr() + w.norm().powf(alpha), 1.0))
            }
            SurfaceId::Omega => Some((z.norm_sqr() + u.exp(), 1.0)),
            SurfaceId::Delta => Some((w.norm(), z.norm_sqr().exp())),
            SurfaceId::Nu { alpha } => {
                let real_circle = z.im.abs() <= tol.abs_tol
                    && w.im.abs() <= tol.abs_tol
                    && (x * x + u * u - 1.0).abs() <= tol.abs_tol;
                (!real_circle)
                    .then(|| (p.norm_sqr() - 1.0, alpha * (z * z + w * w - one).norm()))
            }
            SurfaceId::Tau { alpha } => (x > 0.0).then(|| (u, x.powf(alpha))),
            SurfaceId::Xi => (x > 0.0).then(|| (u, x * x.ln())),
            SurfaceId::Chi => Some((x * x + u * u, 1.0)),
            SurfaceId::Rho { alpha } => {
                let (lhs, rhs) = spiral_sides(alpha, p)?;
                Some((lhs, rhs))
            }
            SurfaceId::Mu { .. } => return Err(Error::AmbientMismatch { expected: "CP^2" }),
            SurfaceId::Eta { alpha } => {
                let side = (z * (one + w.conj())).im > 0.0;
                side.then(|| {
                    (
                        1.0 + z.norm_sqr() - w.norm_sqr(),
                        alpha * (one + z * z - w * w).norm(),
                    )
                })
            }
        })
    }

    /// Membership of a point of the surface's ambient space.
    ///
    /// `On` when |lhs − rhs| ≤ abs_tol + rel_tol·max(|lhs|, |rhs|) and every extra
    /// condition holds; otherwise `Inside` / `Outside` by the sign of the
    /// pseudoconvex-side defining function (`Outside` when an extra condition fails).
    pub fn membership(&self, p: &Point, tol: &Tolerance) -> Result<Membership> {
        self.validate()?;
        let (lhs, rhs, sign) = match (self, p) {
            (SurfaceId::Mu { alpha }, Point::P2(h)) => {
                let [a, b, c] = h.coords();
                let lhs = a.norm_sqr() + b.norm_sqr() + c.norm_sqr();
                let rhs = alpha * (a * a + b * b + c * c).norm();
                (lhs, rhs, 1.0)
            }
            (SurfaceId::Mu { .. }, _) => return Err(Error::AmbientMismatch { expected: "CP^2" }),
            (_, Point::C2(q)) => match self.sides(*q, tol)? {
                Some((lhs, rhs)) => (lhs, rhs, self.orientation()),
                None => {
                    return Ok(Membership {
                        side: Side::Outside,
                        residual: f64::INFINITY,
                    })
                }
            },
            _ => return Err(Error::AmbientMismatch { expected: "C^2" }),
        };
        let diff = lhs - rhs;
        let residual = diff.abs() / (1.0 + lhs.abs().max(rhs.abs()));
        let side = if tol.eq_r(lhs, rhs) {
            Side::On
        } else if sign * diff < 0.0 {
            Side::Inside
        } else {
            Side::Outside
        };
        Ok(Membership { side, residual })
    }

    /// +1 when lhs − rhs is the pseudoconvex-side defining function, −1 when
    /// rhs − lhs is.
    fn orientation(&self) -> f64 {
        match self {
            SurfaceId::Sigma
            | SurfaceId::SigmaPlus
            | SurfaceId::Tau { .. }
            | SurfaceId::Xi
            | SurfaceId::Eta { .. } => -1.0,
            _ => 1.0,
        }
    }

    /// A defining function near `p` whose Levi form is positive on a strongly
    /// pseudoconvex surface, in the affine chart where `p` lives. For μ_α the
    /// chart is the one dividing by the largest homogeneous coordinate; the
    /// returned point is `p` in that chart.
    pub fn levi_defining_function(
        &self,
        p: &Point,
    ) -> Result<(Box<dyn Fn(PointC2) -> f64 + Send + Sync>, PointC2)> {
        self.validate()?;
        let one = C64::new(1.0, 0.0);
        if let SurfaceId::Mu { alpha } = *self {
            let h = p.as_p2()?.coords();
            let k = (0..3)
                .max_by(|&i, &j| h[i].norm().total_cmp(&h[j].norm()))
                .unwrap_or(2);
            let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
            let q = PointC2::new(h[others[0]] / h[k], h[others[1]] / h[k]);
            // the defining form is symmetric in the three coordinates, so every
            // chart sees the same function
            let f = move |p: PointC2| {
                (p.norm_sqr() + 1.0) - alpha * (p.z * p.z + p.w * p.w + one).norm()
            };
            return Ok((Box::new(f), q));
        }
        let q = p.as_c2()?;
        let f: Box<dyn Fn(PointC2) -> f64 + Send + Sync> = match *self {
            SurfaceId::S3 | SurfaceId::Lens { .. } => Box::new(|p: PointC2| p.norm_sqr() - 1.0),
            SurfaceId::Sigma | SurfaceId::SigmaPlus => {
                Box::new(|p: PointC2| p.z.norm_sqr() - p.w.re)
            }
            SurfaceId::Epsilon { alpha } => {
                Box::new(move |p: PointC2| p.z.norm_sqr() + p.w.norm().powf(alpha) - 1.0)
            }
            SurfaceId::Omega => Box::new(|p: PointC2| p.z.norm_sqr() + p.w.re.exp() - 1.0),
            // |w| = exp(|z|²) written as |z|² − ln|w| = 0
            SurfaceId::Delta => Box::new(|p: PointC2| p.z.norm_sqr() - p.w.norm().ln()),
            SurfaceId::Nu { alpha } => Box::new(move |p: PointC2| {
                p.norm_sqr() - 1.0 - alpha * (p.z * p.z + p.w * p.w - one).norm()
            }),
            SurfaceId::Tau { alpha } => Box::new(move |p: PointC2| p.z.re.powf(alpha) - p.w.re),
            SurfaceId::Xi => Box::new(|p: PointC2| p.z.re * p.z.re.ln() - p.w.re),
            SurfaceId::Chi => Box::new(|p: PointC2| p.z.re * p.z.re + p.w.re * p.w.re - 1.0),
            SurfaceId::Rho { alpha } => {
                // ln r − α·θ with θ the clockwise angle, continued from its value at q
                let v0 = C64::new(q.z.re, -q.w.re);
                let rot = C64::from_polar(1.0, -v0.arg());
                // the sheet of the angle on which q sits
                let k = ((v0.norm().ln() / alpha - v0.arg()) / (2.0 * PI)).round();
                let th0 = v0.arg() + 2.0 * PI * k;
                Box::new(move |p: PointC2| {
                    let v = C64::new(p.z.re, -p.w.re);
                    v.norm().ln() - alpha * ((v * rot).arg() + th0)
                })
            }
            SurfaceId::Eta { alpha } => Box::new(move |p: PointC2| {
                alpha * (one + p.z * p.z - p.w * p.w).norm() - (1.0 + p.z.norm_sqr() - p.w.norm_sqr())
            }),
            SurfaceId::Mu { .. } => unreachable!("handled above"),
        };
        Ok((f, q))
    }

    /// Restricted Levi eigenvalue of the surface at `p`.
    pub fn levi(&self, p: &Point, tol: &Tolerance) -> Result<f64> {
        let (f, q) = self.levi_defining_function(p)?;
        levi_min_eigenvalue(&f, q, tol)
    }
}

/// Clockwise polar angle of (x, u) and the two sides ln r̂ and α(θ̂ + 2πk) for the
/// best k.
fn spiral_sides(alpha: f64, p: PointC2) -> Result<(f64, f64)> {
    let (x, u) = (p.z.re, p.w.re);
    if x == 0.0 && u == 0.0 {
        return Err(Error::OriginPoint);
    }
    let v = C64::new(x, -u);
    let (ln_r, th) = (v.norm().ln(), v.arg());
    let window = spiral_window(alpha, ln_r);
    let mut best = (f64::INFINITY, 0.0);
    for k in -window..=window {
        let rhs = alpha * (th + 2.0 * PI * k as f64);
        let d = (ln_r - rhs).abs();
        if d < best.0 {
            best = (d, rhs);
        }
    }
    Ok((ln_r, best.1))
}

fn spiral_window(alpha: f64, ln_r: f64) -> i64 {
    ((ln_r.abs() / alpha + PI) / (2.0 * PI)).ceil() as i64 + 1
}

/// Whether (x, u) lies on the logarithmic spiral r = e^{αφ}: some k ∈ ℤ with
/// ln r̂ = α(θ̂ + 2πk), θ̂ the principal clockwise angle arg(x − iu).
pub fn spiral_membership(alpha: f64, p: PointC2, tol: &Tolerance) -> Result<bool> {
    if !(alpha > 0.0) {
        return Err(bad(format!("spiral needs alpha > 0, got {alpha}")));
    }
    let (lhs, rhs) = spiral_sides(alpha, p)?;
    Ok(tol.eq_r(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitFamily {
    Mu,
    Nu,
    Eta,
}

/// α as a function of the orbit radius r: 2r⁴ + 1 for μ (r > 0), 2r⁴ − 1 for ν
/// (0 < r < 1) and η (r > 1).
pub fn alpha_of_r(family: OrbitFamily, r: f64) -> Result<f64> {
    let ok = match family {
        OrbitFamily::Mu => r > 0.0 && r.is_finite(),
        OrbitFamily::Nu => r > 0.0 && r < 1.0,
        OrbitFamily::Eta => r > 1.0 && r.is_finite(),
    };
    if !ok {
        return Err(Error::RangeError(format!("r = {r} outside the {family:?} interval")));
    }
    let r4 = r * r * r * r;
    Ok(match family {
        OrbitFamily::Mu => 2.0 * r4 + 1.0,
        _ => 2.0 * r4 - 1.0,
    })
}

/// Inverse of [`alpha_of_r`].
pub fn r_of_alpha(family: OrbitFamily, alpha: f64) -> Result<f64> {
    let ok = match family {
        OrbitFamily::Mu => alpha > 1.0 && alpha.is_finite(),
        OrbitFamily::Nu => alpha > -1.0 && alpha < 1.0,
        OrbitFamily::Eta => alpha > 1.0 && alpha.is_finite(),
    };
    if !ok {
        return Err(Error::RangeError(format!(
            "alpha = {alpha} outside the {family:?} range"
        )));
    }
    Ok(match family {
        OrbitFamily::Mu => ((alpha - 1.0) / 2.0).powf(0.25),
        _ => ((alpha + 1.0) / 2.0).powf(0.25),
    })
}

/// Projective class helper used by the μ pipelines.
pub fn proj(a: C64, b: C64, c: C64) -> Result<ProjPoint2> {
    ProjPoint2::new([a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_core::c;
    use proptest::prelude::*;

    fn c2(x: f64, y: f64, u: f64, v: f64) -> Point {
        Point::C2(PointC2::from_reals(x, y, u, v))
    }

    #[test]
    fn membership_examples() {
        let tol = Tolerance::default();
        let m = SurfaceId::Chi.membership(&c2(1.0, 0.0, 0.0, 0.0), &tol).unwrap();
        assert_eq!(m.side, Side::On);
        assert_eq!(m.residual, 0.0);

        let p = Point::P2(proj(c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap());
        assert!(SurfaceId::Mu { alpha: 3.0 }.membership(&p, &tol).unwrap().is_on());
        assert!(!SurfaceId::Mu { alpha: 2.5 }.membership(&p, &tol).unwrap().is_on());

        let r: f64 = 0.8;
        let r2 = r * r;
        let nu = SurfaceId::Nu {
            alpha: alpha_of_r(OrbitFamily::Nu, r).unwrap(),
        };
        assert!(nu.membership(&c2(r2, 0.0, 0.0, r2), &tol).unwrap().is_on());

        let alpha = 0.7;
        let q = c2(-(alpha * PI).exp(), 0.0, 0.0, 0.0);
        assert!(SurfaceId::Rho { alpha }.membership(&q, &tol).unwrap().is_on());
    }

    #[test]
    fn ambient_mismatch_and_ranges() {
        let tol = Tolerance::default();
        assert!(matches!(
            SurfaceId::Chi.membership(&Point::P2(proj(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap()), &tol),
            Err(Error::AmbientMismatch { .. })
        ));
        assert!(SurfaceId::Nu { alpha: 1.0 }.validate().is_err());
        assert!(SurfaceId::Tau { alpha: 2.0 }.validate().is_err());
        assert!(SurfaceId::Tau { alpha: -1.0 }.validate().is_ok());
        assert!(SurfaceId::Lens { m: 1 }.validate().is_err());
    }

    #[test]
    fn nu_excludes_the_real_circle() {
        let tol = Tolerance::default();
        let s = 0.5f64.sqrt();
        let m = SurfaceId::Nu { alpha: 0.3 }.membership(&c2(s, 0.0, s, 0.0), &tol).unwrap();
        assert_eq!(m.side, Side::Outside);
    }

    #[test]
    fn eta_side_condition() {
        let tol = Tolerance::default();
        // 1 + |z|² − |w|² = α|1 + z² − w²| holds at z = i·t for suitable t, but the
        // sign of Im(z(1 + w̄)) decides
        let t: f64 = 0.5;
        let alpha = (1.0 + t * t) / (1.0 - t * t);
        let eta = SurfaceId::Eta { alpha };
        assert!(eta.membership(&c2(0.0, t, 0.0, 0.0), &tol).unwrap().is_on());
        assert_eq!(
            eta.membership(&c2(0.0, -t, 0.0, 0.0), &tol).unwrap().side,
            Side::Outside
        );
    }

    #[test]
    fn eta_levi_matches_symbolic_hessian() {
        // reference values from a symbolic complex Hessian of α|1 + z² − w²| − (1 + |z|² − |w|²)
        let tol = Tolerance::default();
        let s = SurfaceId::Eta { alpha: 3.0 };
        for (p, want) in [
            (
                c2(1.5030448732718855, 0.570781795339019, 1.7910009477603965, 0.48687899333715556),
                0.08308492666668599,
            ),
            (
                c2(-1.505034463159999, 1.192779586366667, 1.737771224708142, -1.0808850398801342),
                0.06469247957397073,
            ),
        ] {
            assert!((s.levi(&p, &tol).unwrap() - want).abs() < 1e-4);
        }
    }

    #[test]
    fn alpha_of_r_examples() {
        assert_eq!(alpha_of_r(OrbitFamily::Mu, 1.0).unwrap(), 3.0);
        let a = alpha_of_r(OrbitFamily::Nu, 1.0 - 1e-9).unwrap();
        assert!(a < 1.0 && a > 1.0 - 1e-7);
        assert!((alpha_of_r(OrbitFamily::Eta, 2f64.powf(0.25)).unwrap() - 3.0).abs() < 1e-14);
        assert!(matches!(alpha_of_r(OrbitFamily::Nu, 1.5), Err(Error::RangeError(_))));
        assert!(matches!(alpha_of_r(OrbitFamily::Eta, 0.5), Err(Error::RangeError(_))));
        assert!(matches!(alpha_of_r(OrbitFamily::Mu, 0.0), Err(Error::RangeError(_))));
        for fam in [OrbitFamily::Mu, OrbitFamily::Nu, OrbitFamily::Eta] {
            let r = match fam {
                OrbitFamily::Eta => 1.7,
                _ => 0.6,
            };
            let a = alpha_of_r(fam, r).unwrap();
            assert!((r_of_alpha(fam, a).unwrap() - r).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_of_r_is_increasing() {
        let grids: [(OrbitFamily, f64, f64); 3] = [
            (OrbitFamily::Mu, 1e-3, 5.0),
            (OrbitFamily::Nu, 1e-3, 1.0 - 1e-3),
            (OrbitFamily::Eta, 1.0 + 1e-3, 5.0),
        ];
        for (fam, lo, hi) in grids {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=500 {
                let r = lo + (hi - lo) * i as f64 / 500.0;
                let a = alpha_of_r(fam, r).unwrap();
                assert!(a > prev);
                prev = a;
            }
        }
    }

    #[test]
    fn spiral_examples() {
        let tol = Tolerance::default();
        let pt = |x: f64| PointC2::from_reals(x, 0.0, 0.0, 0.0);
        assert!(spiral_membership(1.0, pt(1.0), &tol).unwrap());
        assert!(spiral_membership(1.0, pt((2.0 * PI).exp()), &tol).unwrap());
        assert!(!spiral_membership(1.0, pt(PI.exp()), &tol).unwrap());
        assert!(matches!(
            spiral_membership(1.0, pt(0.0), &tol),
            Err(Error::OriginPoint)
        ));
    }

    #[test]
    fn surface_json_descriptor() {
        let s = SurfaceId::Nu { alpha: 0.5 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"family":"nu","params":{"alpha":0.5}}"#);
        assert_eq!(serde_json::from_str::<SurfaceId>(&j).unwrap(), s);
        assert_eq!(
            serde_json::from_str::<SurfaceId>(r#"{"family":"chi"}"#).unwrap(),
            SurfaceId::Chi
        );
    }

    proptest! {
        #[test]
        fn spiral_points_are_members(alpha in 0.05..3.0f64, phi in -6.0..6.0f64) {
            let r = (alpha * phi).exp();
            prop_assume!(r.is_finite() && r > 1e-200);
            // φ measured clockwise: (x, u) = r(cos φ, −sin φ)
            let p = PointC2::from_reals(r * phi.cos(), 0.3, -r * phi.sin(), -1.2);
            prop_assert!(spiral_membership(alpha, p, &Tolerance::default()).unwrap());
        }
    }
}
