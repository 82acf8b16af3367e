use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::complex_core::{principal_ln, principal_root, root_of_unity, Point, PointC2, C64, I};
use crate::{Error, Result};

/// A deck transformation of one of the covers.
///
/// `RootOfUnity{n, k}` is (z, w) ↦ e^{2πik/n}(z, w) on Ω^{ν(n)} / Ω^{η(n)};
/// `ChiRotation{n, k}` rotates (x, u) by 2πk/n on χ^(n); `DPrime(n)` is the
/// discrete generator of Aut η^(2n); `MinusMinus` negates a point of ℂ² or ℂ³.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum DeckMapId {
    FMu,
    ShiftPiK { k: i64 },
    FEta,
    FEtaN { n: u32 },
    ChiShift { k: i64 },
    MinusMinus,
    RootOfUnity { n: u32, k: i64 },
    ChiRotation { n: u32, k: i64 },
    DPrime { n: u32 },
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

// `strict` selects the guarded principal branch; orbit enumeration passes
// false since it quotients out the branch choice anyway
fn ln_b(x: C64, strict: bool, what: &str) -> Result<C64> {
    if strict {
        principal_ln(x, what)
    } else {
        Ok(x.ln())
    }
}

fn root_b(x: C64, n: u32, strict: bool, what: &str) -> Result<C64> {
    if strict {
        principal_root(x, n, what)
    } else if x == C64::new(0.0, 0.0) {
        Ok(x)
    } else {
        Ok((x.ln() / n as f64).exp())
    }
}

/// f^μ on ℂ² ∖ {0}.
pub fn f_mu(p: PointC2) -> Result<PointC2> {
    let n = p.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::OriginExcluded);
    }
    let k = I / (1.0 + n * n).sqrt();
    Ok(PointC2::new(k * (p.z * n - p.w.conj()), k * (p.w * n + p.z.conj())))
}

fn need_disk(t: C64) -> Result<()> {
    if !(t.norm() < 1.0) {
        return Err(Error::DiskViolation(t.norm()));
    }
    Ok(())
}

/// f^η on U^η, with the principal logarithm.
pub fn f_eta(p: PointC2) -> Result<PointC2> {
    f_eta_b(p, true)
}

pub(crate) fn f_eta_b(p: PointC2, strict: bool) -> Result<PointC2> {
    let (s, t) = (p.z, p.w);
    need_disk(t)?;
    let q = 1.0 - t.norm_sqr();
    let rad = (4.0 * s.re).exp() * q * q - 1.0;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("(s, t) is not in U^eta ({rad})")));
    }
    let e2s = (2.0 * s).exp();
    let arg = I * (q + (-2.0 * s).exp() * t.conj()) / rad.sqrt();
    let s2 = 2.0 * s + s.conj() + ln_b(arg, strict, "f_eta")?;
    let den = t.conj() + e2s * q;
    let t2 = (one() + e2s * t * q) / den;
    Ok(PointC2::new(s2, t2))
}

/// The lift of z₁ ↦ −z₁ to M^{Λ^ν}, principal logarithm.
pub fn nu_inf_flip(p: PointC2) -> Result<PointC2> {
    nu_inf_flip_b(p, true)
}

pub(crate) fn nu_inf_flip_b(p: PointC2, strict: bool) -> Result<PointC2> {
    let (s, t) = (p.z, p.w);
    need_disk(t)?;
    let q = 1.0 - t.norm_sqr();
    let rad = 1.0 - (4.0 * s.re).exp() * q * q;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("(s, t) is not in U^nu ({rad})")));
    }
    let e2s = (2.0 * s).exp();
    let num = one() + e2s * t * q;
    let s2 = s.conj() + ln_b(-num / rad.sqrt(), strict, "nu_inf_flip")?;
    let t2 = -(t.conj() + e2s * q) / num;
    Ok(PointC2::new(s2, t2))
}

fn z_guard(z: C64) -> Result<()> {
    if z.norm() < crate::rossi_maps::GUARD {
        return Err(Error::ZeroZ(z.norm()));
    }
    Ok(())
}

/// The lift of z₁ ↦ −z₁ to M^{Φ^ν_n}, principal n-th root.
pub fn nu_n_flip(n: u32, p: PointC2) -> Result<PointC2> {
    nu_n_flip_b(n, p, true)
}

pub(crate) fn nu_n_flip_b(n: u32, p: PointC2, strict: bool) -> Result<PointC2> {
    let (z, w) = (p.z, p.w);
    z_guard(z)?;
    let q = 1.0 - w.norm_sqr() / z.norm_sqr();
    let rad = 1.0 - z.norm().powi(2 * n as i32) * q * q;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("point is not in Omega^nu({n})")));
    }
    let num = one() + z.powi(n as i32 - 1) * w * q;
    let root = root_b(num * num / rad, n, strict, "nu_n_flip")?;
    let zz = z.conj() * root;
    let ww = -(w.conj() / z.conj() + z.powi(n as i32) * q) / num * zz;
    Ok(PointC2::new(zz, ww))
}

/// The lift of Z ↦ −Z to M^{Φ^η}: z ↦ i(zd + w̄)/√(d² − 1),
/// w ↦ i(wd + z̄)/√(d² − 1) with d = |z|² − |w|². Its square is −id.
pub fn eta_specc(p: PointC2) -> Result<PointC2> {
    let d = p.minus_norm_sqr();
    let rad = d * d - 1.0;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("|z|^2 - |w|^2 = {d} is not > 1")));
    }
    let k = I / rad.sqrt();
    Ok(PointC2::new(k * (p.z * d + p.w.conj()), k * (p.w * d + p.z.conj())))
}

/// f^η_n on Ω^{η(2n)}, principal n-th root; for n = 1 it is [`eta_specc`].
pub fn f_eta_n(n: u32, p: PointC2) -> Result<PointC2> {
    f_eta_n_b(n, p, true)
}

pub(crate) fn f_eta_n_b(n: u32, p: PointC2, strict: bool) -> Result<PointC2> {
    let (z, w) = (p.z, p.w);
    z_guard(z)?;
    let q = 1.0 - w.norm_sqr() / z.norm_sqr();
    let rad = z.norm().powi(4 * n as i32) * q * q - 1.0;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("point is not in Omega^eta({})", 2 * n)));
    }
    let zb = w.conj() / z.conj();
    let inner = (q + z.powi(-2 * n as i32) * zb) / rad.sqrt();
    let big = z * z * z.conj() * root_b(inner, n, strict, "f_eta_n")?;
    let ratio = (one() + z.powi(2 * n as i32 - 1) * w * q) / (zb + z.powi(2 * n as i32) * q);
    Ok(PointC2::new(I * big, I * ratio * big))
}

/// The discrete generator of Aut η^(2n) on Ω^{η(n)}, principal n-th root,
/// with the sign under the root that makes Φ_n(D′p) = −Φ_n(p).
pub fn d_prime(n: u32, p: PointC2) -> Result<PointC2> {
    d_prime_b(n, p, true)
}

pub(crate) fn d_prime_b(n: u32, p: PointC2, strict: bool) -> Result<PointC2> {
    let (z, w) = (p.z, p.w);
    z_guard(z)?;
    let q = 1.0 - w.norm_sqr() / z.norm_sqr();
    let rad = z.norm().powi(2 * n as i32) * q * q - 1.0;
    if !(rad > 0.0) {
        return Err(Error::DomainViolation(format!("point is not in Omega^eta({n})")));
    }
    let zb = w.conj() / z.conj();
    let x = q + z.powi(-(n as i32)) * zb;
    let big = z * z * z.conj() * root_b(-x * x / rad, n, strict, "d_prime")?;
    let ratio = (one() + z.powi(n as i32 - 1) * w * q) / (zb + z.powi(n as i32) * q);
    Ok(PointC2::new(big, ratio * big))
}

/// The order-four element of ⟨f^η_n⟩·μ_n acting at `p`: the branch of the
/// n-th root is chosen so that applying it twice gives −p.
pub fn f_eta_n_tracked(n: u32, p: PointC2) -> Result<PointC2> {
    let f = f_eta_n_b(n, p, false)?;
    let f2 = f_eta_n_b(n, f, false)?;
    let m = 2 * n;
    // F(ζp) = ζF(p) for ζ ∈ μ_{2n}, so F² is a rotation ζ^j
    let (j, err) = (0..m)
        .map(|j| (j, f2.dist(p.scale(root_of_unity(m, j as i64)))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("m >= 2");
    if !(err <= 1e-6 * (1.0 + p.norm())) || j % 2 == 0 {
        return Err(Error::DomainViolation(format!(
            "f^eta_{n} squared is not an odd rotation at this point (j = {j}, err {err:e})"
        )));
    }
    // (ζ^{2l}F)² = ζ^{4l + j}; want ζ^n = −1
    let l = (0..n)
        .find(|&l| (4 * l + j) % m == n % m)
        .expect("2 is invertible mod odd n");
    Ok(f.scale(root_of_unity(m, 2 * l as i64)))
}

/// Canonical representative of the class {p, f(p), −p, −f(p)} of a point of
/// Ω^{η(2n)} under the order-four deck element: the lexicographically largest
/// (Re z, Im z, Re w, Im w).
pub fn eta_odd_representative(n: u32, p: PointC2) -> Result<PointC2> {
    if n % 2 == 0 {
        return Err(Error::ParameterOutOfRange(format!("odd eta quotient needs odd n, got {n}")));
    }
    let f = f_eta_n_tracked(n, p)?;
    let orbit = [p, f, p.neg(), f.neg()];
    Ok(*orbit
        .iter()
        .max_by(|a, b| {
            let (a, b) = (a.to_reals(), b.to_reals());
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("nonempty"))
}

/// Applies a deck transformation.
pub fn deck_apply(d: DeckMapId, p: &Point) -> Result<Point> {
    if let DeckMapId::MinusMinus = d {
        return Ok(match *p {
            Point::C2(q) => Point::C2(q.neg()),
            Point::C3(q) => Point::C3(q.neg()),
            Point::P2(_) => return Err(Error::AmbientMismatch { expected: "C^2 or C^3" }),
        });
    }
    let q = p.as_c2()?;
    let out = match d {
        DeckMapId::FMu => f_mu(q)?,
        DeckMapId::ShiftPiK { k } => {
            need_disk(q.w)?;
            PointC2::new(q.z + C64::new(0.0, PI * k as f64), q.w)
        }
        DeckMapId::FEta => f_eta(q)?,
        DeckMapId::FEtaN { n } => {
            if n % 2 == 0 {
                return Err(Error::ParameterOutOfRange(format!("FEtaN needs odd n, got {n}")));
            }
            f_eta_n(n, q)?
        }
        DeckMapId::ChiShift { k } => PointC2::new(q.z + C64::new(0.0, 2.0 * PI * k as f64), q.w),
        DeckMapId::RootOfUnity { n, k } => {
            if n < 1 {
                return Err(Error::ParameterOutOfRange("root of unity needs n >= 1".into()));
            }
            q.scale(root_of_unity(n, k))
        }
        DeckMapId::ChiRotation { n, k } => {
            if n < 1 {
                return Err(Error::ParameterOutOfRange("chi rotation needs n >= 1".into()));
            }
            let r = root_of_unity(n, k);
            let xu = r * C64::new(q.z.re, q.w.re);
            PointC2::from_reals(xu.re, q.z.im, xu.im, q.w.im)
        }
        DeckMapId::DPrime { n } => {
            if n < 2 {
                return Err(Error::ParameterOutOfRange(format!("D' needs n >= 2, got {n}")));
            }
            d_prime(n, q)?
        }
        DeckMapId::MinusMinus => unreachable!("handled above"),
    };
    Ok(Point::C2(out))
}
