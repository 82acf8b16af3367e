use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::hypersurfaces::SurfaceId;
use crate::{Error, Result};

/// A cover of a model surface, named by its base family and sheet count.
///
/// String form `family(N)` with `N` the number of sheets or `inf`, e.g.
/// `nu(5)`, `eta(6)`, `mu(4)`, `chi(inf)`. For η an even N ≥ 4 names
/// [`CoverId::Eta2N`] and an odd N names [`CoverId::EtaOdd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverId {
    /// χ^(n), total space x² + u² = 1 in (z, w) coordinates, n ≥ 1.
    ChiN(u32),
    /// χ^(∞) = {x = 0}.
    ChiInf,
    /// μ_α^(2) ⊂ Q₊.
    Mu2,
    /// μ_α^(4) ⊂ ℂ².
    Mu4,
    /// ν_α^(n) ⊂ Ω^{ν(n)}, n ≥ 2.
    NuN(u32),
    /// ν_α^(∞) in the (s, t) chart.
    NuInf,
    /// η_α^(2) ⊂ Q₋.
    Eta2,
    /// η_α^(2n) ⊂ Ω^{η(n)}, n ≥ 2.
    Eta2N(u32),
    /// η_α^(n) for odd n, realised as classes of η^(4n) points.
    EtaOdd(u32),
    /// η_α^(∞) in the (s, t) chart.
    EtaInf,
}

impl CoverId {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ParameterOutOfRange(m));
        match *self {
            CoverId::ChiN(0) => bad("chi cover needs n >= 1".into()),
            CoverId::NuN(n) if n < 2 => bad(format!("nu cover needs n >= 2, got {n}")),
            CoverId::Eta2N(n) if n < 2 => bad(format!("eta(2n) cover needs n >= 2, got {n}")),
            CoverId::EtaOdd(n) if n % 2 == 0 => bad(format!("odd eta cover needs odd n, got {n}")),
            _ => Ok(()),
        }
    }

    /// Number of sheets, `None` for the universal covers.
    pub fn sheets(&self) -> Option<u32> {
        match *self {
            CoverId::ChiN(n) | CoverId::NuN(n) | CoverId::EtaOdd(n) => Some(n),
            CoverId::Eta2N(n) => Some(2 * n),
            CoverId::Mu2 | CoverId::Eta2 => Some(2),
            CoverId::Mu4 => Some(4),
            CoverId::ChiInf | CoverId::NuInf | CoverId::EtaInf => None,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CoverId::ChiN(_) | CoverId::ChiInf => "chi",
            CoverId::Mu2 | CoverId::Mu4 => "mu",
            CoverId::NuN(_) | CoverId::NuInf => "nu",
            _ => "eta",
        }
    }

    /// Whether the cover depends on a parameter α.
    pub fn has_alpha(&self) -> bool {
        self.family() != "chi"
    }

    /// The base surface (α ignored for χ).
    pub fn base(&self, alpha: f64) -> Result<SurfaceId> {
        self.validate()?;
        let s = match self.family() {
            "chi" => SurfaceId::Chi,
            "mu" => SurfaceId::Mu { alpha },
            "nu" => SurfaceId::Nu { alpha },
            _ => SurfaceId::Eta { alpha },
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a cover from its family name and sheet count (`None` for ∞).
    pub fn from_parts(family: &str, sheets: Option<u32>) -> Result<Self> {
        let c = match (family, sheets) {
            ("chi", None) => CoverId::ChiInf,
            ("chi", Some(n)) => CoverId::ChiN(n),
            ("mu", Some(2)) => CoverId::Mu2,
            ("mu", Some(4)) => CoverId::Mu4,
            ("nu", None) => CoverId::NuInf,
            ("nu", Some(n)) => CoverId::NuN(n),
            ("eta", None) => CoverId::EtaInf,
            ("eta", Some(2)) => CoverId::Eta2,
            ("eta", Some(n)) if n % 2 == 0 => CoverId::Eta2N(n / 2),
            ("eta", Some(n)) => CoverId::EtaOdd(n),
            _ => {
                return Err(Error::Descriptor(format!(
                    "no {family} cover with {} sheets",
                    sheets.map_or("inf".to_string(), |n| n.to_string())
                )))
            }
        };
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for CoverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sheets() {
            Some(n) => write!(f, "{}({n})", self.family()),
            None => write!(f, "{}(inf)", self.family()),
        }
    }
}

impl FromStr for CoverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (fam, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Descriptor(format!("expected family(N), got {s:?}")))?;
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Descriptor(format!("unclosed parenthesis in {s:?}")))?
            .trim();
        let sheets = match inner {
            "inf" | "∞" => None,
            n => Some(
                n.parse::<u32>()
                    .map_err(|e| Error::Descriptor(format!("bad sheet count {n:?}: {e}")))?,
            ),
        };
        CoverId::from_parts(fam.trim(), sheets)
    }
}

impl Serialize for CoverId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoverId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["chi(1)", "chi(inf)", "mu(2)", "mu(4)", "nu(5)", "nu(inf)", "eta(2)", "eta(6)", "eta(3)", "eta(inf)"] {
            let c: CoverId = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!("eta(6)".parse::<CoverId>().unwrap(), CoverId::Eta2N(3));
        assert_eq!("eta(1)".parse::<CoverId>().unwrap(), CoverId::EtaOdd(1));
        assert!("mu(3)".parse::<CoverId>().is_err());
        assert!("nu(1)".parse::<CoverId>().is_err());
        assert!("chi(0)".parse::<CoverId>().is_err());
        assert!("nu5".parse::<CoverId>().is_err());
    }
}
