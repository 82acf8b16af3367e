use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use super::{lens_canonical, r_of_alpha, AutFamily, OrbitFamily, SurfaceId};
use crate::complex_core::{Point, PointC2, Tolerance, C64};
use crate::groups::{sample_group, GroupId};
use crate::rossi_maps::{psi_eta, psi_mu, psi_nu, rossi_minus, rossi_mu};
use crate::{Error, Result};

const RETRIES: usize = 64;

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(-PI..PI)
}

fn in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), angle(rng))
}

fn on_s3<R: Rng + ?Sized>(rng: &mut R) -> PointC2 {
    loop {
        let p = PointC2::from_reals(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
        let n = p.norm();
        if n > 1e-6 {
            return p.scale(C64::new(1.0 / n, 0.0));
        }
    }
}

fn orbit_point<R: Rng + ?Sized>(id: GroupId, r: f64, rng: &mut R) -> Result<PointC2> {
    let g = sample_group(id, rng, 1.0)?;
    g.act_c2(PointC2::new(C64::new(r, 0.0), C64::new(0.0, 0.0)))
}

fn candidate<R: Rng + ?Sized>(id: &SurfaceId, rng: &mut R, tol: &Tolerance) -> Result<Point> {
    let p = match *id {
        SurfaceId::S3 => on_s3(rng),
        SurfaceId::Lens { m } => lens_canonical(m, on_s3(rng), tol)?,
        SurfaceId::Sigma | SurfaceId::SigmaPlus => {
            let x = if matches!(id, SurfaceId::Sigma) {
                rng.gen_range(-2.0..2.0)
            } else {
                rng.gen_range(0.05..2.0)
            };
            let z = C64::new(x, rng.gen_range(-2.0..2.0));
            PointC2::new(z, C64::new(z.norm_sqr(), rng.gen_range(-3.0..3.0)))
        }
        SurfaceId::Epsilon { alpha } => {
            let z = in_disk(rng, 0.95);
            let m = (1.0 - z.norm_sqr()).powf(1.0 / alpha);
            PointC2::new(z, C64::from_polar(m, angle(rng)))
        }
        SurfaceId::Omega => {
            let z = in_disk(rng, 0.95);
            PointC2::new(z, C64::new((1.0 - z.norm_sqr()).ln(), rng.gen_range(-3.0..3.0)))
        }
        SurfaceId::Delta => {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            PointC2::new(z, C64::from_polar(z.norm_sqr().exp(), angle(rng)))
        }
        SurfaceId::Nu { alpha } => {
            let r = r_of_alpha(OrbitFamily::Nu, alpha)?;
            psi_nu(rossi_minus(orbit_point(GroupId::SU11, r, rng)?)?, tol)?
        }
        SurfaceId::Tau { alpha } => {
            let x: f64 = rng.gen_range(0.1..3.0);
            PointC2::from_reals(x, rng.gen_range(-3.0..3.0), x.powf(alpha), rng.gen_range(-3.0..3.0))
        }
        SurfaceId::Xi => {
            let x: f64 = rng.gen_range(0.1..3.0);
            PointC2::from_reals(x, rng.gen_range(-3.0..3.0), x * x.ln(), rng.gen_range(-3.0..3.0))
        }
        SurfaceId::Chi => {
            let t = angle(rng);
            PointC2::from_reals(t.cos(), rng.gen_range(-3.0..3.0), t.sin(), rng.gen_range(-3.0..3.0))
        }
        SurfaceId::Rho { alpha } => {
            let span = (3.0 / alpha).min(2.0 * PI);
            let phi = rng.gen_range(-span..span);
            let r = (alpha * phi).exp();
            PointC2::from_reals(
                r * phi.cos(),
                rng.gen_range(-3.0..3.0),
                -r * phi.sin(),
                rng.gen_range(-3.0..3.0),
            )
        }
        SurfaceId::Mu { alpha } => {
            let r = r_of_alpha(OrbitFamily::Mu, alpha)?;
            return Ok(Point::P2(psi_mu(rossi_mu(orbit_point(GroupId::SU2, r, rng)?)?, tol)?));
        }
        SurfaceId::Eta { alpha } => {
            let r = r_of_alpha(OrbitFamily::Eta, alpha)?;
            psi_eta(rossi_minus(orbit_point(GroupId::SU11, r, rng)?)?, tol)?
        }
    };
    Ok(Point::C2(p))
}

/// Draws a point of the surface, retrying (up to 64 times) when a draw lands
/// on an excluded set or fails the membership check.
pub fn sample_point<R: Rng + ?Sized>(id: &SurfaceId, rng: &mut R, tol: &Tolerance) -> Result<Point> {
    id.validate()?;
    let mut last = String::from("no attempt");
    for _ in 0..RETRIES {
        match candidate(id, rng, tol) {
            Ok(p) => match id.membership(&p, tol) {
                Ok(m) if m.is_on() => return Ok(p),
                Ok(m) => last = format!("residual {:e}", m.residual),
                Err(e) => last = e.to_string(),
            },
            Err(e @ Error::RangeError(_)) => return Err(e),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::SamplingFailed(format!("{} after {RETRIES} draws: {last}", id.name())))
}

fn rotation(t: f64) -> [[f64; 2]; 2] {
    let (s, c) = t.sin_cos();
    [[c, s], [-s, c]]
}

/// A random element of the automorphism family of `id`, with scales in
/// [1/2, 2], disk parameters of modulus at most 0.9 and group elements drawn
/// at radius 1.
pub fn random_aut<R: Rng + ?Sized>(id: &SurfaceId, rng: &mut R) -> Result<AutFamily> {
    id.validate()?;
    let lambda = rng.gen_range(0.5..2.0);
    let mut real = || rng.gen_range(-2.0..2.0);
    let (b, g) = (real(), real());
    Ok(match *id {
        SurfaceId::S3 => AutFamily::S3 { q: sample_group(GroupId::SU21, rng, 1.0)? },
        SurfaceId::Lens { m } => {
            let k = sample_group(GroupId::SU2, rng, 1.0)?.m2()?;
            let ph = C64::from_polar(1.0, angle(rng));
            AutFamily::Lens {
                m,
                u: [[ph * k[(0, 0)], ph * k[(0, 1)]], [ph * k[(1, 0)], ph * k[(1, 1)]]],
            }
        }
        SurfaceId::Sigma => AutFamily::Sigma {
            lambda,
            phi: angle(rng),
            a: C64::new(b, rng.gen_range(-2.0..2.0)),
            gamma: g,
        },
        SurfaceId::SigmaPlus => AutFamily::SigmaPlus { lambda, beta: b, gamma: g },
        SurfaceId::Epsilon { alpha } => AutFamily::Epsilon {
            alpha,
            phi: angle(rng),
            psi: angle(rng),
            a: in_disk(rng, 0.9),
        },
        SurfaceId::Omega => AutFamily::Omega { phi: angle(rng), a: in_disk(rng, 0.9), gamma: g },
        SurfaceId::Delta => AutFamily::Delta {
            phi: angle(rng),
            psi: angle(rng),
            a: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        },
        SurfaceId::Nu { .. } => AutFamily::Nu {
            q: sample_group(GroupId::SO21c, rng, 1.0)?,
            flip: rng.gen(),
        },
        SurfaceId::Tau { alpha } => AutFamily::Tau { alpha, lambda, beta: b, gamma: g },
        SurfaceId::Xi => AutFamily::Xi { lambda, beta: b, gamma: g },
        SurfaceId::Chi => {
            let mut a = rotation(angle(rng));
            if rng.gen::<bool>() {
                a[1] = [a[1][0] * -1.0, a[1][1] * -1.0];
            }
            AutFamily::Chi { a, beta: b, gamma: g }
        }
        SurfaceId::Rho { alpha } => AutFamily::Rho {
            alpha,
            psi: rng.gen_range(-1.0..1.0),
            beta: b,
            gamma: g,
        },
        SurfaceId::Mu { .. } => AutFamily::Mu { a: sample_group(GroupId::SO3, rng, 1.0)? },
        SurfaceId::Eta { .. } => AutFamily::Eta { q: sample_group(GroupId::SO21c, rng, 1.0)? },
    })
}
