use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use super::C64;
use crate::{Error, Result};

/// A point (z, w) of ℂ² with z = x + iy, w = u + iv.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointC2 {
    pub z: C64,
    pub w: C64,
}

impl PointC2 {
    pub const fn new(z: C64, w: C64) -> Self {
        Self { z, w }
    }

    pub fn from_reals(x: f64, y: f64, u: f64, v: f64) -> Self {
        Self::new(C64::new(x, y), C64::new(u, v))
    }

    /// (x, y, u, v).
    pub fn to_reals(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Indefinite norm |z|² − |w|².
    pub fn minus_norm_sqr(self) -> f64 {
        self.z.norm_sqr() - self.w.norm_sqr()
    }

    pub fn scale(self, k: C64) -> Self {
        Self::new(self.z * k, self.w * k)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.z, -self.w)
    }

    pub fn dist(self, other: Self) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_reals().iter().all(|x| x.is_finite())
    }
}

/// A point (z₁, z₂, z₃) of ℂ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointC3 {
    pub z1: C64,
    pub z2: C64,
    pub z3: C64,
}

impl PointC3 {
    pub const fn new(z1: C64, z2: C64, z3: C64) -> Self {
        Self { z1, z2, z3 }
    }

    pub fn from_array(a: [C64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [C64; 3] {
        [self.z1, self.z2, self.z3]
    }

    pub fn re(self) -> [f64; 3] {
        [self.z1.re, self.z2.re, self.z3.re]
    }

    pub fn im(self) -> [f64; 3] {
        [self.z1.im, self.z2.im, self.z3.im]
    }

    pub fn from_re_im(re: [f64; 3], im: [f64; 3]) -> Self {
        Self::new(
            C64::new(re[0], im[0]),
            C64::new(re[1], im[1]),
            C64::new(re[2], im[2]),
        )
    }

    pub fn to_reals(self) -> [f64; 6] {
        [
            self.z1.re, self.z1.im, self.z2.re, self.z2.im, self.z3.re, self.z3.im,
        ]
    }

    pub fn norm_sqr(self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr() + self.z3.norm_sqr()
    }

    pub fn scale(self, k: C64) -> Self {
        Self::new(self.z1 * k, self.z2 * k, self.z3 * k)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.z1, -self.z2, -self.z3)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.z1 + o.z1, self.z2 + o.z2, self.z3 + o.z3)
    }

    pub fn dist(self, other: Self) -> f64 {
        ((self.z1 - other.z1).norm_sqr()
            + (self.z2 - other.z2).norm_sqr()
            + (self.z3 - other.z3).norm_sqr())
        .sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_reals().iter().all(|x| x.is_finite())
    }
}

/// A point of ℂℙ² stored as a canonical homogeneous representative: unit
/// Euclidean norm, and the first coordinate of largest modulus real positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint2 {
    h: [C64; 3],
}

impl ProjPoint2 {
    pub fn new(h: [C64; 3]) -> Result<Self> {
        let n = h.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DomainViolation(
                "homogeneous coordinates must be finite and not all zero".into(),
            ));
        }
        let mut k = 0;
        for i in 1..3 {
            if h[i].norm() > h[k].norm() {
                k = i;
            }
        }
        let phase = h[k] / h[k].norm();
        let s = C64::new(1.0 / n, 0.0) / phase;
        let mut out = [h[0] * s, h[1] * s, h[2] * s];
        out[k] = C64::new(out[k].norm(), 0.0);
        Ok(Self { h: out })
    }

    pub fn from_c3(p: PointC3) -> Result<Self> {
        Self::new(p.to_array())
    }

    pub fn coords(&self) -> [C64; 3] {
        self.h
    }

    /// min over θ of ‖h − e^{iθ}h′‖ for the unit representatives; zero exactly
    /// on equal classes and free of the cancellation in √(1 − |⟨h, h′⟩|²).
    pub fn dist(&self, other: &Self) -> f64 {
        let ip: C64 = (0..3).map(|i| self.h[i] * other.h[i].conj()).sum();
        let phase = if ip.norm() > 0.0 {
            ip / ip.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        (0..3)
            .map(|i| (self.h[i] - phase * other.h[i]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// A point of any of the three ambient spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    C2(PointC2),
    C3(PointC3),
    P2(ProjPoint2),
}

impl Point {
    pub fn ambient(&self) -> &'static str {
        match self {
            Point::C2(_) => "C^2",
            Point::C3(_) => "C^3",
            Point::P2(_) => "CP^2",
        }
    }

    pub fn as_c2(&self) -> Result<PointC2> {
        match self {
            Point::C2(p) => Ok(*p),
            _ => Err(Error::AmbientMismatch { expected: "C^2" }),
        }
    }

    pub fn as_c3(&self) -> Result<PointC3> {
        match self {
            Point::C3(p) => Ok(*p),
            _ => Err(Error::AmbientMismatch { expected: "C^3" }),
        }
    }

    pub fn as_p2(&self) -> Result<ProjPoint2> {
        match self {
            Point::P2(p) => Ok(*p),
            _ => Err(Error::AmbientMismatch { expected: "CP^2" }),
        }
    }

    /// Distance in the ambient space; `None` for points of different spaces.
    pub fn dist(&self, other: &Point) -> Option<f64> {
        match (self, other) {
            (Point::C2(a), Point::C2(b)) => Some(a.dist(*b)),
            (Point::C3(a), Point::C3(b)) => Some(a.dist(*b)),
            (Point::P2(a), Point::P2(b)) => Some(a.dist(b)),
            _ => None,
        }
    }

    pub fn magnitude(&self) -> f64 {
        match self {
            Point::C2(p) => p.norm(),
            Point::C3(p) => p.norm_sqr().sqrt(),
            Point::P2(_) => 1.0,
        }
    }
}

impl From<PointC2> for Point {
    fn from(p: PointC2) -> Self {
        Point::C2(p)
    }
}

impl From<PointC3> for Point {
    fn from(p: PointC3) -> Self {
        Point::C3(p)
    }
}

impl From<ProjPoint2> for Point {
    fn from(p: ProjPoint2) -> Self {
        Point::P2(p)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<C64> = match self {
            Point::C2(p) => vec![p.z, p.w],
            Point::C3(p) => p.to_array().to_vec(),
            Point::P2(p) => p.coords().to_vec(),
        };
        let parts: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
        match self {
            Point::P2(_) => write!(f, "({})", parts.join(" : ")),
            _ => write!(f, "({})", parts.join(", ")),
        }
    }
}

// JSON layout: ℂ² and ℂ³ points are arrays of [re, im] pairs, projective
// points are {"proj": [[re, im], [re, im], [re, im]]}.

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn unpair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Serialize, Deserialize)]
struct ProjRepr {
    proj: [Pair; 3],
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Proj(ProjRepr),
    Affine(Vec<Pair>),
}

impl Serialize for PointC2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [pair(self.z), pair(self.w)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointC2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [z, w] = <[Pair; 2]>::deserialize(d)?;
        Ok(Self::new(unpair(z), unpair(w)))
    }
}

impl Serialize for PointC3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [pair(self.z1), pair(self.z2), pair(self.z3)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointC3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[Pair; 3]>::deserialize(d)?;
        Ok(Self::new(unpair(a), unpair(b), unpair(c)))
    }
}

impl Serialize for ProjPoint2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjRepr {
            proj: [pair(self.h[0]), pair(self.h[1]), pair(self.h[2])],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ProjRepr::deserialize(d)?;
        ProjPoint2::new(r.proj.map(unpair)).map_err(D::Error::custom)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::C2(p) => p.serialize(s),
            Point::C3(p) => p.serialize(s),
            Point::P2(p) => p.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Proj(r) => ProjPoint2::new(r.proj.map(unpair))
                .map(Point::P2)
                .map_err(D::Error::custom),
            PointRepr::Affine(v) => match v.len() {
                2 => Ok(Point::C2(PointC2::new(unpair(v[0]), unpair(v[1])))),
                3 => Ok(Point::C3(PointC3::new(
                    unpair(v[0]),
                    unpair(v[1]),
                    unpair(v[2]),
                ))),
                n => Err(D::Error::custom(format!(
                    "a point needs 2 or 3 complex coordinates, got {n}"
                ))),
            },
        }
    }
}
