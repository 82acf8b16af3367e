//! Rossi's map, its SU₁,₁ analogues Φ and Φ_n, the projections Ψ^μ, Ψ^ν, Ψ^η,
//! the exponential chart Λ, the χ covers, and the composite covering maps.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::complex_core::{
    quadric_residual, FormSignature, Point, PointC2, PointC3, ProjPoint2, Tolerance, C64, I,
};
use crate::covers::CoverId;
use crate::hypersurfaces::RegionId;
use crate::{Error, Result};

/// Relative guard for the null cone |z|² = |w|² and for z = 0.
pub const GUARD: f64 = 1e-12;

/// Which image domain a Φ_n evaluation is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Nu,
    Eta,
}

/// A covering or projection map, or a right-to-left pipeline of them.
///
/// Descriptor strings: `PhiMu`, `PsiMu`, `PhiMinus`, `PhiN:n` (optionally
/// `PhiN:n:nu` / `PhiN:n:eta`), `PsiNu`, `PsiEta`, `Lambda`, `PhiChi`,
/// `PhiChiN:n`; a JSON array is a composite applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub enum MapId {
    PhiMu,
    PsiMu,
    PhiMinus,
    PhiN { n: u32, branch: Option<Branch> },
    PsiNu,
    PsiEta,
    Lambda,
    PhiChi,
    PhiChiN(u32),
    Composite(Vec<MapId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    C2,
    C3,
    P2,
}

impl MapId {
    fn signature(&self) -> Option<(Space, Space)> {
        use Space::*;
        Some(match self {
            MapId::PhiMu | MapId::PhiMinus | MapId::PhiN { .. } => (C2, C3),
            MapId::PsiMu => (C3, P2),
            MapId::PsiNu | MapId::PsiEta => (C3, C2),
            MapId::Lambda | MapId::PhiChi | MapId::PhiChiN(_) => (C2, C2),
            MapId::Composite(_) => return None,
        })
    }

    /// Checks indices and that consecutive stages of a composite chain.
    pub fn validate(&self) -> Result<()> {
        match self {
            MapId::PhiN { n, .. } if *n < 2 => {
                Err(Error::ParameterOutOfRange(format!("PhiN needs n >= 2, got {n}")))
            }
            MapId::PhiChiN(n) if *n < 1 => {
                Err(Error::ParameterOutOfRange("PhiChiN needs n >= 1".into()))
            }
            MapId::Composite(parts) => {
                if parts.is_empty() {
                    return Err(Error::Descriptor("empty pipeline".into()));
                }
                let flat = self.flatten();
                for m in &flat {
                    m.validate()?;
                }
                for pair in flat.windows(2) {
                    // pair[1] runs first
                    let (_, out) = pair[1].signature().expect("flattened");
                    let (inp, _) = pair[0].signature().expect("flattened");
                    if out != inp {
                        return Err(Error::Descriptor(format!(
                            "pipeline stages {} and {} do not chain",
                            pair[1], pair[0]
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn flatten(&self) -> Vec<MapId> {
        match self {
            MapId::Composite(parts) => parts.iter().flat_map(|m| m.flatten()).collect(),
            other => vec![other.clone()],
        }
    }

    /// Evaluates the map (a composite runs its last entry first).
    pub fn apply(&self, p: &Point, tol: &Tolerance) -> Result<Point> {
        self.validate()?;
        Ok(match self {
            MapId::PhiMu => Point::C3(rossi_mu(p.as_c2()?)?),
            MapId::PsiMu => Point::P2(psi_mu(p.as_c3()?, tol)?),
            MapId::PhiMinus => Point::C3(rossi_minus(p.as_c2()?)?),
            MapId::PhiN { n, branch } => Point::C3(rossi_n(*n, p.as_c2()?, *branch)?),
            MapId::PsiNu => Point::C2(psi_nu(p.as_c3()?, tol)?),
            MapId::PsiEta => Point::C2(psi_eta(p.as_c3()?, tol)?),
            MapId::Lambda => {
                let q = p.as_c2()?;
                Point::C2(lambda_map(q.z, q.w)?)
            }
            MapId::PhiChi => Point::C2(phi_chi(p.as_c2()?)),
            MapId::PhiChiN(n) => Point::C2(phi_chi_n(*n, p.as_c2()?)?),
            MapId::Composite(parts) => {
                let mut cur = *p;
                for m in parts.iter().rev() {
                    cur = m.apply(&cur, tol)?;
                }
                cur
            }
        })
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapId::PhiMu => write!(f, "PhiMu"),
            MapId::PsiMu => write!(f, "PsiMu"),
            MapId::PhiMinus => write!(f, "PhiMinus"),
            MapId::PhiN { n, branch: None } => write!(f, "PhiN:{n}"),
            MapId::PhiN { n, branch: Some(Branch::Nu) } => write!(f, "PhiN:{n}:nu"),
            MapId::PhiN { n, branch: Some(Branch::Eta) } => write!(f, "PhiN:{n}:eta"),
            MapId::PsiNu => write!(f, "PsiNu"),
            MapId::PsiEta => write!(f, "PsiEta"),
            MapId::Lambda => write!(f, "Lambda"),
            MapId::PhiChi => write!(f, "PhiChi"),
            MapId::PhiChiN(n) => write!(f, "PhiChiN:{n}"),
            MapId::Composite(parts) => {
                let s: Vec<String> = parts.iter().map(|m| m.to_string()).collect();
                write!(f, "{}", s.join("∘"))
            }
        }
    }
}

impl FromStr for MapId {
    type Err = Error;

    /// Parses a single stage, or a pipeline joined by `∘`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('∘') {
            let parts = s.split('∘').map(str::parse).collect::<Result<Vec<MapId>>>()?;
            let m = MapId::Composite(parts);
            m.validate()?;
            return Ok(m);
        }
        let mut it = s.split(':');
        let head = it.next().unwrap_or("");
        let index = |x: Option<&str>| -> Result<u32> {
            x.ok_or_else(|| Error::Descriptor(format!("{head} needs an index")))?
                .trim()
                .parse::<u32>()
                .map_err(|e| Error::Descriptor(format!("bad index in {s:?}: {e}")))
        };
        let m = match head {
            "PhiMu" => MapId::PhiMu,
            "PsiMu" => MapId::PsiMu,
            "PhiMinus" => MapId::PhiMinus,
            "PhiN" => {
                let n = index(it.next())?;
                let branch = match it.next() {
                    None => None,
                    Some("nu") => Some(Branch::Nu),
                    Some("eta") => Some(Branch::Eta),
                    Some(b) => return Err(Error::Descriptor(format!("unknown branch {b:?}"))),
                };
                MapId::PhiN { n, branch }
            }
            "PsiNu" => MapId::PsiNu,
            "PsiEta" => MapId::PsiEta,
            "Lambda" => MapId::Lambda,
            "PhiChi" => MapId::PhiChi,
            "PhiChiN" => MapId::PhiChiN(index(it.next())?),
            _ => return Err(Error::Descriptor(format!("unknown map {s:?}"))),
        };
        if it.next().is_some() {
            return Err(Error::Descriptor(format!("trailing fields in {s:?}")));
        }
        m.validate()?;
        Ok(m)
    }
}

impl Serialize for MapId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MapId::Composite(parts) => parts.serialize(s),
            other => s.collect_str(other),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapRepr {
    One(String),
    Many(Vec<MapRepr>),
}

fn from_repr(r: MapRepr) -> Result<MapId> {
    match r {
        MapRepr::One(s) => s.parse(),
        MapRepr::Many(v) => {
            let m = MapId::Composite(v.into_iter().map(from_repr).collect::<Result<_>>()?);
            m.validate()?;
            Ok(m)
        }
    }
}

impl<'de> Deserialize<'de> for MapId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        from_repr(MapRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Rossi's map ℂ² ∖ {0} → Q₊.
pub fn rossi_mu(p: PointC2) -> Result<PointC3> {
    let (z, w) = (p.z, p.w);
    let n = p.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::OriginExcluded);
    }
    let zw = z * w.conj();
    let wz = w * z.conj();
    Ok(PointC3::new(
        -I * (z * z + w * w) + I * (zw - wz) / n,
        z * z - w * w - (zw + wz) / n,
        2.0 * z * w + (z.norm_sqr() - w.norm_sqr()) / n,
    ))
}

/// Ψ^μ: (z₁, z₂, z₃) ↦ (z₁ : z₂ : z₃) on Q₊ ∖ ℝ³.
pub fn psi_mu(p: PointC3, tol: &Tolerance) -> Result<ProjPoint2> {
    let r = quadric_residual(FormSignature::Plus, p).norm();
    if !(r <= tol.abs_tol * (1.0 + p.norm_sqr())) {
        return Err(Error::NotOnQuadric(r));
    }
    let im = p.im().iter().map(|x| x * x).sum::<f64>().sqrt();
    if im <= GUARD * p.norm_sqr().sqrt() {
        return Err(Error::DomainViolation("Psi^mu is undefined on real points".into()));
    }
    ProjPoint2::from_c3(p)
}

/// The two points of Q₊ over a class of ℂℙ² (the fiber of Ψ^μ).
pub fn lift_psi_mu(h: &ProjPoint2) -> Result<[PointC3; 2]> {
    let c = h.coords();
    let q = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    if q.norm() <= GUARD {
        return Err(Error::DomainViolation("class lies on the null conic".into()));
    }
    let k = C64::new(1.0, 0.0) / q.sqrt();
    let p = PointC3::new(k * c[0], k * c[1], k * c[2]);
    Ok([p, p.neg()])
}

fn null_cone_guard(p: PointC2) -> Result<f64> {
    let n = p.norm_sqr();
    let d = p.z.norm_sqr() - p.w.norm_sqr();
    if !(d.abs() >= GUARD * n) || n == 0.0 {
        return Err(Error::NullConeExcluded(d));
    }
    Ok(d)
}

/// The SU₁,₁ analogue Φ: Ω → Q₋.
pub fn rossi_minus(p: PointC2) -> Result<PointC3> {
    let d = null_cone_guard(p)?;
    let (z, w) = (p.z, p.w);
    let zw = z * w.conj();
    let wz = w * z.conj();
    Ok(PointC3::new(
        -I * (z * z + w * w) - I * (zw + wz) / d,
        z * z - w * w + (zw - wz) / d,
        -2.0 * I * z * w - I * p.norm_sqr() / d,
    ))
}

/// |z|ⁿ − |z|ⁿ⁻²|w|², the level function of Ω^{ν(n)} and Ω^{η(n)}.
pub fn level_n(n: u32, p: PointC2) -> f64 {
    p.z.norm().powi(n as i32 - 2) * (p.z.norm_sqr() - p.w.norm_sqr())
}

/// Φ_n: Ω^{ν(n)} ∪ Ω^{η(n)} → Q₋. With `branch` set the point must lie in the
/// corresponding domain; with `None` only Ω^> is required.
pub fn rossi_n(n: u32, p: PointC2, branch: Option<Branch>) -> Result<PointC3> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("rossi_n needs n >= 2, got {n}")));
    }
    let (z, w) = (p.z, p.w);
    if z.norm() < GUARD {
        return Err(Error::ZeroZ(z.norm()));
    }
    let d = null_cone_guard(p)?;
    let level = level_n(n, p);
    let ok = match branch {
        _ if d <= 0.0 => false,
        None => true,
        Some(Branch::Nu) => level < 1.0,
        Some(Branch::Eta) => level > 1.0,
    };
    if !ok {
        return Err(Error::DomainViolation(format!(
            "|z|^{n} - |z|^{}|w|^2 = {level} outside the {branch:?} domain",
            n - 2
        )));
    }
    let zn2 = z.powi(n as i32 - 2);
    let zn1 = zn2 * z;
    let zn = zn1 * z;
    let zw = z * w.conj();
    let wz = w * z.conj();
    Ok(PointC3::new(
        -I * (zn + zn2 * w * w) - I * (zw + wz) / d,
        zn - zn2 * w * w + (zw - wz) / d,
        -2.0 * I * zn1 * w - I * p.norm_sqr() / d,
    ))
}

/// Ψ^ν: Σ^ν → D^ν, (z₁/z₃, z₂/z₃).
pub fn psi_nu(p: PointC3, tol: &Tolerance) -> Result<PointC2> {
    if !RegionId::SigmaNu.contains(&Point::C3(p), tol)? {
        return Err(Error::NotInSigmaNu);
    }
    Ok(PointC2::new(p.z1 / p.z3, p.z2 / p.z3))
}

/// Ψ^η: Σ^η → D^η, (z₂/z₁, z₃/z₁).
pub fn psi_eta(p: PointC3, tol: &Tolerance) -> Result<PointC2> {
    if !RegionId::SigmaEta.contains(&Point::C3(p), tol)? {
        return Err(Error::NotInSigmaEta);
    }
    Ok(PointC2::new(p.z2 / p.z1, p.z3 / p.z1))
}

/// The two points z₁(1, z, w) of Q₋ over (z, w), z₁² = 1/(1 + z² − w²).
pub fn lift_psi_eta(b: PointC2) -> Result<[PointC3; 2]> {
    let q = C64::new(1.0, 0.0) + b.z * b.z - b.w * b.w;
    if q.norm() <= GUARD {
        return Err(Error::DomainViolation("1 + z^2 - w^2 vanishes".into()));
    }
    let z1 = C64::new(1.0, 0.0) / q.sqrt();
    let p = PointC3::new(z1, z1 * b.z, z1 * b.w);
    Ok([p, p.neg()])
}

/// Λ(s, t) = (eˢ, eˢt) on ℂ × Δ.
pub fn lambda_map(s: C64, t: C64) -> Result<PointC2> {
    if !(t.norm() < 1.0) {
        return Err(Error::DiskViolation(t.norm()));
    }
    let e = s.exp();
    Ok(PointC2::new(e, e * t))
}

/// Φ^χ(z, w) = (eˣ cos y + iu, eˣ sin y + iv).
pub fn phi_chi(p: PointC2) -> PointC2 {
    let (x, y, u, v) = (p.z.re, p.z.im, p.w.re, p.w.im);
    let e = x.exp();
    PointC2::from_reals(e * y.cos(), u, e * y.sin(), v)
}

/// Φ^χ_n(z, w) = (Re(x+iu)ⁿ + iy, Im(x+iu)ⁿ + iv).
pub fn phi_chi_n(n: u32, p: PointC2) -> Result<PointC2> {
    if n < 1 {
        return Err(Error::ParameterOutOfRange("phi_chi_n needs n >= 1".into()));
    }
    let (x, y, u, v) = (p.z.re, p.z.im, p.w.re, p.w.im);
    if x.hypot(u) < GUARD {
        return Err(Error::AxisExcluded);
    }
    let q = C64::new(x, u).powi(n as i32);
    Ok(PointC2::from_reals(q.re, y, q.im, v))
}

/// Outcome of [`classify_q_minus`]: the unique matching tag (`None` for
/// "other") and the worst normalized margin of every candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    #[serde(serialize_with = "region_or_other")]
    pub region: Option<RegionId>,
    pub margins: BTreeMap<String, f64>,
}

fn region_or_other<S: Serializer>(
    r: &Option<RegionId>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_str("other"),
    }
}

/// Decides which of O₁–O₆, Σ^ν, Σ^η contains a point of Q₋.
pub fn classify_q_minus(p: PointC3, tol: &Tolerance) -> Result<Classification> {
    let r = quadric_residual(FormSignature::Minus, p).norm();
    if !(r <= tol.abs_tol * (1.0 + p.norm_sqr())) {
        return Err(Error::NotOnQuadric(r));
    }
    use RegionId::*;
    let mut margins = BTreeMap::new();
    let mut hits = Vec::new();
    for tag in [O1, O2, O3, O4, O5, O6, SigmaNu, SigmaEta] {
        let m = tag.membership(&Point::C3(p), tol)?;
        margins.insert(tag.to_string(), m.residual);
        if m.side == crate::hypersurfaces::Side::Inside {
            hits.push(tag);
        }
    }
    match hits.len() {
        0 => Ok(Classification { region: None, margins }),
        1 => Ok(Classification { region: Some(hits[0]), margins }),
        _ => Err(Error::Ambiguous(hits.iter().map(|t| t.to_string()).collect())),
    }
}

/// The covering map of a cover onto its base hypersurface.
pub fn cover_map(cover: CoverId, p: &Point, tol: &Tolerance) -> Result<Point> {
    cover.validate()?;
    Ok(match cover {
        CoverId::ChiInf => Point::C2(phi_chi(p.as_c2()?)),
        CoverId::ChiN(n) => Point::C2(phi_chi_n(n, p.as_c2()?)?),
        CoverId::Mu2 => Point::P2(psi_mu(p.as_c3()?, tol)?),
        CoverId::Mu4 => Point::P2(psi_mu(rossi_mu(p.as_c2()?)?, tol)?),
        CoverId::NuN(n) => Point::C2(psi_nu(rossi_n(n, p.as_c2()?, Some(Branch::Nu))?, tol)?),
        CoverId::NuInf => {
            let st = p.as_c2()?;
            Point::C2(psi_nu(rossi_minus(lambda_map(st.z, st.w)?)?, tol)?)
        }
        CoverId::Eta2 => Point::C2(psi_eta(p.as_c3()?, tol)?),
        CoverId::Eta2N(n) => {
            Point::C2(psi_eta(rossi_n(n, p.as_c2()?, Some(Branch::Eta))?, tol)?)
        }
        CoverId::EtaOdd(n) => {
            Point::C2(psi_eta(rossi_n(2 * n, p.as_c2()?, Some(Branch::Eta))?, tol)?)
        }
        CoverId::EtaInf => {
            let st = p.as_c2()?;
            Point::C2(psi_eta(rossi_minus(lambda_map(st.z, st.w)?)?, tol)?)
        }
    })
}
