use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::deck::{d_prime, f_eta, f_mu, nu_inf_flip, nu_n_flip};
use super::CoverId;
use crate::complex_core::{principal_ln, principal_root, root_of_unity, Point, PointC2, PointC3, ProjPoint2, Tolerance, C64};
use crate::groups::{frac_linear, frac_linear_eta, phi, phi_mu, sample_group, GroupElement, GroupId};
use crate::{Error, Result};

/// An automorphism of a cover's total space.
///
/// Each element is `cont ∘ disc^discrete`: first the family's discrete
/// generator is applied `discrete` times, then the identity-component map.
/// `(a, b)` satisfy |a|² − |b|² = 1 and `branch` picks the logarithm or n-th
/// root sheet (shift by 2πi·branch, or a factor e^{2πi·branch/n}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum CoverAutId {
    NuInf { a: C64, b: C64, branch: i64, discrete: u32 },
    NuN { n: u32, a: C64, b: C64, branch: i64, discrete: u32 },
    EtaInf { a: C64, b: C64, branch: i64, discrete: u32 },
    Eta2 { q: GroupElement, flip: bool },
    Eta2N { n: u32, a: C64, b: C64, branch: i64, discrete: u32 },
    /// Acts on representatives in Ω^{η(2n)}; the result is re-canonicalized.
    EtaOdd { n: u32, a: C64, b: C64, branch: i64 },
    Mu4 { q: GroupElement, discrete: u32 },
    Mu2 { a: GroupElement, flip: bool },
    ChiInf { beta: f64, a: C64, reflect: bool },
    ChiN { n: u32, phi: f64, beta: f64, gamma: f64, reflect: bool },
}

fn su11_check(a: C64, b: C64) -> Result<()> {
    let r = a.norm_sqr() - b.norm_sqr() - 1.0;
    if !(r.abs() <= 1e-10) {
        return Err(Error::ParameterOutOfRange(format!("|a|^2 - |b|^2 = {} != 1", r + 1.0)));
    }
    Ok(())
}

fn need(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(msg()))
    }
}

impl CoverAutId {
    /// The cover whose total space this automorphism acts on.
    pub fn cover(&self) -> CoverId {
        match *self {
            CoverAutId::NuInf { .. } => CoverId::NuInf,
            CoverAutId::NuN { n, .. } => CoverId::NuN(n),
            CoverAutId::EtaInf { .. } => CoverId::EtaInf,
            CoverAutId::Eta2 { .. } => CoverId::Eta2,
            CoverAutId::Eta2N { n, .. } => CoverId::Eta2N(n),
            CoverAutId::EtaOdd { n, .. } => CoverId::EtaOdd(n),
            CoverAutId::Mu4 { .. } => CoverId::Mu4,
            CoverAutId::Mu2 { .. } => CoverId::Mu2,
            CoverAutId::ChiInf { .. } => CoverId::ChiInf,
            CoverAutId::ChiN { n, .. } => CoverId::ChiN(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cover().validate()?;
        match *self {
            CoverAutId::NuInf { a, b, .. }
            | CoverAutId::NuN { a, b, .. }
            | CoverAutId::EtaInf { a, b, .. }
            | CoverAutId::Eta2N { a, b, .. }
            | CoverAutId::EtaOdd { a, b, .. } => su11_check(a, b),
            CoverAutId::Eta2 { q, .. } => {
                need(q.id == GroupId::SO21c && q.invariant_residual() <= 1e-8, || {
                    "Eta2 needs an SO21c element".into()
                })
            }
            CoverAutId::Mu4 { q, .. } => need(q.id == GroupId::SU2 && q.invariant_residual() <= 1e-8, || {
                "Mu4 needs an SU2 element".into()
            }),
            CoverAutId::Mu2 { a, .. } => need(a.id == GroupId::SO3 && a.invariant_residual() <= 1e-8, || {
                "Mu2 needs an SO3 element".into()
            }),
            CoverAutId::ChiInf { .. } | CoverAutId::ChiN { .. } => Ok(()),
        }
    }
}

/// s ↦ s + ln(a + bt) + 2πi·branch, t ↦ (b̄ + āt)/(a + bt).
fn inf_cont(a: C64, b: C64, branch: i64, p: PointC2) -> Result<PointC2> {
    let (s, t) = (p.z, p.w);
    let den = a + b * t;
    let l = principal_ln(den, "ln(a + bt)")? + C64::new(0.0, 2.0 * PI * branch as f64);
    Ok(PointC2::new(s + l, (b.conj() + a.conj() * t) / den))
}

/// z ↦ z·ⁿ√((a + bw/z)²), w ↦ that times (b̄ + āw/z)/(a + bw/z).
fn n_cont(n: u32, a: C64, b: C64, branch: i64, p: PointC2) -> Result<PointC2> {
    let (z, w) = (p.z, p.w);
    if z.norm() < crate::rossi_maps::GUARD {
        return Err(Error::ZeroZ(z.norm()));
    }
    let t = w / z;
    let den = a + b * t;
    let root = principal_root(den * den, n, "root of (a + bw/z)^2")? * root_of_unity(n, branch);
    let zz = z * root;
    Ok(PointC2::new(zz, zz * (b.conj() + a.conj() * t) / den))
}

fn repeat(k: u32, p: PointC2, f: impl Fn(PointC2) -> Result<PointC2>) -> Result<PointC2> {
    (0..k).try_fold(p, |q, _| f(q))
}

/// Applies a cover automorphism to a point of the cover's total space.
pub fn cover_aut_apply(a: &CoverAutId, p: &Point) -> Result<Point> {
    a.validate()?;
    Ok(match *a {
        CoverAutId::NuInf { a, b, branch, discrete } => {
            let q = repeat(discrete, p.as_c2()?, nu_inf_flip)?;
            Point::C2(inf_cont(a, b, branch, q)?)
        }
        CoverAutId::EtaInf { a, b, branch, discrete } => {
            let q = repeat(discrete, p.as_c2()?, f_eta)?;
            Point::C2(inf_cont(a, b, branch, q)?)
        }
        CoverAutId::NuN { n, a, b, branch, discrete } => {
            let q = repeat(discrete, p.as_c2()?, |x| nu_n_flip(n, x))?;
            Point::C2(n_cont(n, a, b, branch, q)?)
        }
        CoverAutId::Eta2N { n, a, b, branch, discrete } => {
            let q = repeat(discrete, p.as_c2()?, |x| d_prime(n, x))?;
            Point::C2(n_cont(n, a, b, branch, q)?)
        }
        CoverAutId::EtaOdd { n, a, b, branch } => {
            let q = n_cont(2 * n, a, b, branch, p.as_c2()?)?;
            Point::C2(super::deck::eta_odd_representative(n, q)?)
        }
        CoverAutId::Eta2 { q, flip } => {
            let z = q.act_c3(p.as_c3()?)?;
            Point::C3(if flip { z.neg() } else { z })
        }
        CoverAutId::Mu4 { q, discrete } => {
            let x = repeat(discrete, p.as_c2()?, f_mu)?;
            Point::C2(q.act_c2(x)?)
        }
        CoverAutId::Mu2 { a, flip } => {
            let z = a.act_c3(p.as_c3()?)?;
            Point::C3(if flip { z.neg() } else { z })
        }
        CoverAutId::ChiInf { beta, a, reflect } => {
            let q = p.as_c2()?;
            let q = if reflect { PointC2::new(q.z.conj(), q.w.conj()) } else { q };
            Point::C2(PointC2::new(q.z + C64::new(0.0, beta), q.w + a))
        }
        CoverAutId::ChiN { n, phi, beta, gamma, reflect } => {
            let q = p.as_c2()?;
            let q = if reflect { PointC2::new(q.z, -q.w) } else { q };
            let xu = C64::from_polar(1.0, -phi) * C64::new(q.z.re, q.w.re);
            let yv = C64::from_polar(1.0, -(n as f64) * phi) * C64::new(q.z.im, q.w.im);
            Point::C2(PointC2::from_reals(xu.re, yv.re + beta, xu.im, yv.im + gamma))
        }
    })
}

/// The base automorphism covered by `a`, applied to a point of the base
/// surface: the SO₂,₁ fractional-linear action for ν and η, the SO₃ action for
/// μ, and the χ family for χ covers. Discrete parts that lift −id of Q₋ or Q₊
/// cover the identity; the ν discrete parts cover (z, w) ↦ (−z, w).
pub fn cover_aut_base(a: &CoverAutId, base: &Point, tol: &Tolerance) -> Result<Point> {
    a.validate()?;
    let su11 = |a: C64, b: C64| GroupElement::su11(a, b);
    let nu_flip = |k: u32, p: PointC2| if k % 2 == 1 { PointC2::new(-p.z, p.w) } else { p };
    Ok(match *a {
        CoverAutId::NuInf { a, b, discrete, .. } | CoverAutId::NuN { a, b, discrete, .. } => {
            let g = phi(&su11(a, b)?)?;
            Point::C2(frac_linear(&g, nu_flip(discrete, base.as_c2()?), tol)?)
        }
        CoverAutId::EtaInf { a, b, .. }
        | CoverAutId::Eta2N { a, b, .. }
        | CoverAutId::EtaOdd { a, b, .. } => {
            let g = phi(&su11(a, b)?)?;
            Point::C2(frac_linear_eta(&g, base.as_c2()?, tol)?)
        }
        CoverAutId::Eta2 { q, .. } => Point::C2(frac_linear_eta(&q, base.as_c2()?, tol)?),
        CoverAutId::Mu4 { q, .. } => mu_base(&phi_mu(&q)?, base)?,
        CoverAutId::Mu2 { a, .. } => mu_base(&a, base)?,
        CoverAutId::ChiInf { beta, a, reflect } => {
            let q = base.as_c2()?;
            let q = if reflect { PointC2::new(q.z, -q.w) } else { q };
            let xu = C64::from_polar(1.0, beta) * C64::new(q.z.re, q.w.re);
            Point::C2(PointC2::from_reals(xu.re, q.z.im + a.re, xu.im, q.w.im + a.im))
        }
        CoverAutId::ChiN { n, phi, beta, gamma, reflect } => {
            let q = base.as_c2()?;
            let q = if reflect { PointC2::new(q.z, -q.w) } else { q };
            let r = C64::from_polar(1.0, -(n as f64) * phi);
            let xu = r * C64::new(q.z.re, q.w.re);
            let yv = r * C64::new(q.z.im, q.w.im);
            Point::C2(PointC2::from_reals(xu.re, yv.re + beta, xu.im, yv.im + gamma))
        }
    })
}

fn mu_base(a: &GroupElement, base: &Point) -> Result<Point> {
    let h = base.as_p2()?.coords();
    let z = a.act_c3(PointC3::from_array(h))?;
    Ok(Point::P2(ProjPoint2::from_c3(z)?))
}

fn su11_params<R: Rng + ?Sized>(rng: &mut R) -> (C64, C64) {
    let tau: f64 = rng.gen_range(0.0..1.0);
    let (p1, p2) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    (C64::from_polar(tau.cosh(), p1), C64::from_polar(tau.sinh(), p2))
}

/// A random automorphism of the cover's total space; the discrete part is
/// included with probability one half.
pub fn random_cover_aut<R: Rng + ?Sized>(cover: CoverId, rng: &mut R) -> Result<CoverAutId> {
    cover.validate()?;
    let (a, b) = su11_params(rng);
    let branch = rng.gen_range(-2..=2);
    let discrete = rng.gen_range(0..=1);
    Ok(match cover {
        CoverId::NuInf => CoverAutId::NuInf { a, b, branch, discrete },
        CoverId::NuN(n) => CoverAutId::NuN { n, a, b, branch, discrete },
        CoverId::EtaInf => CoverAutId::EtaInf { a, b, branch, discrete },
        CoverId::Eta2 => CoverAutId::Eta2 { q: sample_group(GroupId::SO21c, rng, 1.0)?, flip: rng.gen() },
        CoverId::Eta2N(n) => CoverAutId::Eta2N { n, a, b, branch, discrete },
        CoverId::EtaOdd(n) => CoverAutId::EtaOdd { n, a, b, branch },
        CoverId::Mu4 => CoverAutId::Mu4 { q: sample_group(GroupId::SU2, rng, 1.0)?, discrete },
        CoverId::Mu2 => CoverAutId::Mu2 { a: sample_group(GroupId::SO3, rng, 1.0)?, flip: rng.gen() },
        CoverId::ChiInf => CoverAutId::ChiInf {
            beta: rng.gen_range(-3.0..3.0),
            a: C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
            reflect: rng.gen(),
        },
        CoverId::ChiN(n) => CoverAutId::ChiN {
            n,
            phi: rng.gen_range(-PI..PI),
            beta: rng.gen_range(-3.0..3.0),
            gamma: rng.gen_range(-3.0..3.0),
            reflect: rng.gen(),
        },
    })
}
