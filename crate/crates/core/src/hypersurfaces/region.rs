use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use super::{Membership, Side};
use crate::complex_core::{Point, PointC2, PointC3, Tolerance, C64, I};
use crate::{Error, Result};

/// Auxiliary domains of ℂ² (Ω variants, D^ν, D^η, U^ν, U^η on (s, t)) and subsets
/// of ℂ³ (Σ^ν, Σ^η, D^>, W and the orbits O₁–O₆ of Q₋).
///
/// Serialized as its display string, e.g. `"SigmaNu"` or `"OmegaEta(3)"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionId {
    Omega,
    OmegaGt,
    OmegaLt,
    OmegaNu(u32),
    OmegaEta(u32),
    SigmaNu,
    SigmaEta,
    Dnu,
    Deta,
    DGt,
    W,
    O1,
    O2,
    O3,
    O4,
    O5,
    O6,
    Unu,
    Ueta,
}

enum Cond {
    /// value > 0, normalized by 1 + scale
    Pos(f64, f64),
    /// equality of two moduli
    Eq(f64, f64),
    /// equality of two complex numbers
    EqC(C64, C64),
}

fn cond_margin(c: &Cond) -> f64 {
    match *c {
        Cond::Pos(v, s) => v / (1.0 + s.abs()),
        Cond::Eq(l, r) => -(l - r).abs() / (1.0 + l.abs() + r.abs()),
        Cond::EqC(l, r) => -(l - r).norm() / (1.0 + l.norm() + r.norm()),
    }
}

/// Strict inequalities count as `Inside` beyond the band and `On` within it;
/// equalities hold within the band |lhs − rhs| ≤ abs_tol·(1 + |lhs| + |rhs|).
fn evaluate(conds: &[Cond], tol: &Tolerance) -> Membership {
    let band = tol.abs_tol;
    let mut residual = f64::INFINITY;
    let mut side = Side::Inside;
    for c in conds {
        let m = cond_margin(c);
        residual = residual.min(m);
        let s = match c {
            Cond::Pos(..) if m > band => Side::Inside,
            Cond::Pos(..) if m >= -band => Side::On,
            Cond::Pos(..) => Side::Outside,
            _ if m >= -band => Side::Inside,
            _ => Side::Outside,
        };
        side = match (side, s) {
            (Side::Outside, _) | (_, Side::Outside) => Side::Outside,
            (Side::On, _) | (_, Side::On) => Side::On,
            _ => Side::Inside,
        };
    }
    Membership { side, residual }
}

fn minus_norm(p: &PointC3) -> f64 {
    p.z1.norm_sqr() + p.z2.norm_sqr() - p.z3.norm_sqr()
}

fn on_q_minus(p: &PointC3) -> Cond {
    Cond::EqC(p.z1 * p.z1 + p.z2 * p.z2 - p.z3 * p.z3, C64::new(1.0, 0.0))
}

fn imag_norm(p: &PointC3) -> f64 {
    p.im().iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn real_norm(p: &PointC3) -> f64 {
    p.re().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Conditions defining the orbit O_k (k = 1..6) of Q₋.
fn orbit_conds(k: u8, p: &PointC3) -> Vec<Cond> {
    let mag = p.norm_sqr().sqrt();
    let mut conds = vec![on_q_minus(p)];
    match k {
        1 => conds.push(Cond::Eq(real_norm(p), 0.0)),
        2 => conds.push(Cond::Eq(imag_norm(p), 0.0)),
        _ => {
            let plus = (I * p.z1 + p.z2).norm();
            let minus = (I * p.z1 - p.z2).norm();
            let m3 = (I * p.z3 - 1.0).norm();
            let p3 = (I * p.z3 + 1.0).norm();
            conds.push(Cond::Pos(imag_norm(p), mag));
            if k <= 4 {
                conds.push(Cond::Eq(plus, m3));
                conds.push(Cond::Eq(minus, p3));
            } else {
                conds.push(Cond::Eq(plus, p3));
                conds.push(Cond::Eq(minus, m3));
            }
            let s = if k % 2 == 1 { -1.0 } else { 1.0 };
            conds.push(Cond::Pos(s * p.z3.im, mag));
        }
    }
    conds
}

/// Whether `p` lies on the orbit O_k, with the worst normalized margin.
pub fn orbit_test(k: u8, p: &PointC3, tol: &Tolerance) -> Result<(bool, f64)> {
    if !(1..=6).contains(&k) {
        return Err(Error::ParameterOutOfRange(format!("orbit index {k} not in 1..6")));
    }
    let m = evaluate(&orbit_conds(k, p), tol);
    Ok((m.side == Side::Inside, m.residual))
}

impl RegionId {
    pub fn ambient(&self) -> &'static str {
        use RegionId::*;
        match self {
            SigmaNu | SigmaEta | DGt | W | O1 | O2 | O3 | O4 | O5 | O6 => "C^3",
            _ => "C^2",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RegionId::OmegaNu(n) | RegionId::OmegaEta(n) if *n < 2 => Err(
                Error::ParameterOutOfRange(format!("region index n must be >= 2, got {n}")),
            ),
            _ => Ok(()),
        }
    }

    fn conds_c2(&self, p: PointC2) -> Vec<Cond> {
        let (z, w) = (p.z, p.w);
        let n2 = p.norm_sqr();
        let d = z.norm_sqr() - w.norm_sqr();
        let one = C64::new(1.0, 0.0);
        match *self {
            RegionId::Omega => vec![Cond::Pos(d.abs(), n2)],
            RegionId::OmegaGt => vec![Cond::Pos(d, n2)],
            RegionId::OmegaLt => vec![Cond::Pos(-d, n2)],
            RegionId::OmegaNu(n) | RegionId::OmegaEta(n) => {
                let r = z.norm();
                let level = r.powi(n as i32 - 2) * d;
                let scale = r.powi(n as i32 - 2) * n2;
                if matches!(self, RegionId::OmegaNu(_)) {
                    vec![Cond::Pos(level, scale), Cond::Pos(1.0 - level, scale)]
                } else {
                    vec![Cond::Pos(level - 1.0, scale)]
                }
            }
            RegionId::Dnu => {
                let h = n2 - 1.0;
                let b = (z * z + w * w - one).norm();
                vec![Cond::Pos(b - h, b + h.abs()), Cond::Pos(h + b, b + h.abs())]
            }
            RegionId::Deta => {
                let h = 1.0 + z.norm_sqr() - w.norm_sqr();
                let b = (one + z * z - w * w).norm();
                let side = (z * (one + w.conj())).im;
                vec![Cond::Pos(h - b, h.abs() + b), Cond::Pos(side, n2)]
            }
            RegionId::Unu | RegionId::Ueta => {
                let (s, t) = (z, w);
                let disk = 1.0 - t.norm_sqr();
                let v = (2.0 * s.re).exp() * disk;
                let level = if matches!(self, RegionId::Unu) {
                    1.0 - v
                } else {
                    v - 1.0
                };
                vec![Cond::Pos(disk, 0.0), Cond::Pos(level, v)]
            }
            _ => unreachable!("ℂ³ region"),
        }
    }

    fn conds_c3(&self, p: &PointC3) -> Vec<Cond> {
        let mag = p.norm_sqr();
        let nm = minus_norm(p);
        match *self {
            RegionId::SigmaNu => vec![
                on_q_minus(p),
                Cond::Pos(nm + 1.0, mag),
                Cond::Pos(1.0 - nm, mag),
                Cond::Pos(-p.z3.im, mag.sqrt()),
            ],
            RegionId::SigmaEta => vec![
                on_q_minus(p),
                Cond::Pos(nm - 1.0, mag),
                Cond::Pos((p.z2 * (p.z1.conj() + p.z3.conj())).im, mag),
            ],
            RegionId::O1 => orbit_conds(1, p),
            RegionId::O2 => orbit_conds(2, p),
            RegionId::O3 => orbit_conds(3, p),
            RegionId::O4 => orbit_conds(4, p),
            RegionId::O5 => orbit_conds(5, p),
            RegionId::O6 => orbit_conds(6, p),
            _ => unreachable!("handled by membership"),
        }
    }

    /// Membership in the region; `On` marks points within the band of a strict
    /// inequality's boundary.
    pub fn membership(&self, p: &Point, tol: &Tolerance) -> Result<Membership> {
        self.validate()?;
        match (self.ambient(), p) {
            ("C^2", Point::C2(q)) => Ok(evaluate(&self.conds_c2(*q), tol)),
            ("C^3", Point::C3(q)) => Ok(match self {
                RegionId::DGt => best_of(
                    &[RegionId::SigmaNu, RegionId::SigmaEta, RegionId::O5],
                    q,
                    tol,
                ),
                RegionId::W => w_membership(q, tol),
                _ => evaluate(&self.conds_c3(q), tol),
            }),
            ("C^2", _) => Err(Error::AmbientMismatch { expected: "C^2" }),
            _ => Err(Error::AmbientMismatch { expected: "C^3" }),
        }
    }

    pub fn contains(&self, p: &Point, tol: &Tolerance) -> Result<bool> {
        Ok(self.membership(p, tol)?.side == Side::Inside)
    }
}

fn best_of(parts: &[RegionId], p: &PointC3, tol: &Tolerance) -> Membership {
    parts
        .iter()
        .map(|r| evaluate(&r.conds_c3(p), tol))
        .max_by(|a, b| rank(a).cmp(&rank(b)).then(a.residual.total_cmp(&b.residual)))
        .expect("non-empty union")
}

fn rank(m: &Membership) -> u8 {
    match m.side {
        Side::Inside => 2,
        Side::On => 1,
        Side::Outside => 0,
    }
}

/// W = iℝ³ ∪ ℝ³ ∪ {p ∉ ℝ³ : |iz₁+z₂| = |iz₃−1|, |iz₁−z₂| = |iz₃+1|}; no quadric condition.
fn w_membership(p: &PointC3, tol: &Tolerance) -> Membership {
    let mag = p.norm_sqr().sqrt();
    let pieces = [
        vec![Cond::Eq(real_norm(p), 0.0)],
        vec![Cond::Eq(imag_norm(p), 0.0)],
        vec![
            Cond::Pos(imag_norm(p), mag),
            Cond::Eq((I * p.z1 + p.z2).norm(), (I * p.z3 - 1.0).norm()),
            Cond::Eq((I * p.z1 - p.z2).norm(), (I * p.z3 + 1.0).norm()),
        ],
    ];
    pieces
        .iter()
        .map(|c| evaluate(c, tol))
        .max_by(|a, b| rank(a).cmp(&rank(b)).then(a.residual.total_cmp(&b.residual)))
        .expect("non-empty union")
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionId::OmegaNu(n) => write!(f, "OmegaNu({n})"),
            RegionId::OmegaEta(n) => write!(f, "OmegaEta({n})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let indexed = |prefix: &str| -> Option<Result<u32>> {
            let rest = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(
                rest.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Descriptor(format!("bad region index in {s:?}: {e}"))),
            )
        };
        if let Some(n) = indexed("OmegaNu") {
            let r = RegionId::OmegaNu(n?);
            r.validate()?;
            return Ok(r);
        }
        if let Some(n) = indexed("OmegaEta") {
            let r = RegionId::OmegaEta(n?);
            r.validate()?;
            return Ok(r);
        }
        use RegionId::*;
        Ok(match s {
            "Omega" => Omega,
            "OmegaGt" => OmegaGt,
            "OmegaLt" => OmegaLt,
            "SigmaNu" => SigmaNu,
            "SigmaEta" => SigmaEta,
            "Dnu" => Dnu,
            "Deta" => Deta,
            "DGt" => DGt,
            "W" => W,
            "O1" => O1,
            "O2" => O2,
            "O3" => O3,
            "O4" => O4,
            "O5" => O5,
            "O6" => O6,
            "Unu" => Unu,
            "Ueta" => Ueta,
            _ => return Err(Error::Descriptor(format!("unknown region {s:?}"))),
        })
    }
}

impl Serialize for RegionId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegionId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_core::c;

    fn c3(a: C64, b: C64, cc: C64) -> Point {
        Point::C3(PointC3::new(a, b, cc))
    }

    #[test]
    fn orbit_examples() {
        let tol = Tolerance::default();
        let real = PointC3::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(orbit_test(2, &real, &tol).unwrap().0);
        assert!(!orbit_test(1, &real, &tol).unwrap().0);
        // (0, 0, i) is on Q₋ and purely imaginary
        let imag = PointC3::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        assert!(orbit_test(1, &imag, &tol).unwrap().0);
        // basepoint image (−i, 1, −i) lies on O₅
        let base = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, -1.0));
        for k in 1..=6u8 {
            assert_eq!(orbit_test(k, &base, &tol).unwrap().0, k == 5, "k = {k}");
        }
    }

    #[test]
    fn sigma_examples() {
        let tol = Tolerance::default();
        let r2: f64 = 0.25;
        let p = c3(c(0.0, -r2), c(r2, 0.0), c(0.0, -1.0));
        assert!(RegionId::SigmaNu.contains(&p, &tol).unwrap());
        assert!(!RegionId::SigmaEta.contains(&p, &tol).unwrap());
        assert!(RegionId::DGt.contains(&p, &tol).unwrap());
        let q = c3(c(0.0, -4.0), c(4.0, 0.0), c(0.0, -1.0));
        assert!(RegionId::SigmaEta.contains(&q, &tol).unwrap());
        assert!(matches!(
            RegionId::SigmaNu.membership(&Point::C2(PointC2::from_reals(0.0, 0.0, 0.0, 0.0)), &tol),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn c2_regions() {
        let tol = Tolerance::default();
        let p = Point::C2(PointC2::from_reals(0.5, 0.0, 0.1, 0.0));
        assert!(RegionId::OmegaGt.contains(&p, &tol).unwrap());
        assert!(RegionId::OmegaNu(2).contains(&p, &tol).unwrap());
        assert!(!RegionId::OmegaEta(2).contains(&p, &tol).unwrap());
        assert!(!RegionId::OmegaLt.contains(&p, &tol).unwrap());
        let st = Point::C2(PointC2::from_reals(1.0, 0.0, 0.1, 0.0));
        assert!(RegionId::Ueta.contains(&st, &tol).unwrap());
        assert!(!RegionId::Unu.contains(&st, &tol).unwrap());
        let b = Point::C2(PointC2::from_reals(0.0, 0.5, 0.0, 0.0));
        assert!(RegionId::Deta.contains(&b, &tol).unwrap());
    }

    #[test]
    fn region_strings_round_trip() {
        for r in [RegionId::OmegaEta(3), RegionId::SigmaNu, RegionId::O4, RegionId::DGt] {
            let s = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<RegionId>(&s).unwrap(), r);
        }
        assert!("OmegaNu(1)".parse::<RegionId>().is_err());
        assert!("Nowhere".parse::<RegionId>().is_err());
    }
}
