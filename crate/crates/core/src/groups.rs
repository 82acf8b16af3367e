//! The matrix groups SU₂, SU₁,₁, SU₂,₁, SO₃(ℝ), SO₂,₁(ℝ)ᶜ, the covering
//! homomorphisms φ^μ: SU₂ → SO₃(ℝ) and φ: SU₁,₁ → SO₂,₁(ℝ)ᶜ, random sampling
//! through the exponential map, and the fractional-linear actions on ℂ².

use nalgebra::{Matrix2, Matrix3, SMatrix};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex_core::{c, PointC2, PointC3, Tolerance, C64};
use crate::{Error, Result};

/// Residual bound used when a constructor validates group membership.
const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    SU2,
    SU11,
    SU21,
    SO3,
    SO21c,
}

impl GroupId {
    pub fn dim(self) -> usize {
        match self {
            GroupId::SU2 | GroupId::SU11 => 2,
            _ => 3,
        }
    }

    pub fn all() -> [GroupId; 5] {
        [
            GroupId::SU2,
            GroupId::SU11,
            GroupId::SU21,
            GroupId::SO3,
            GroupId::SO21c,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mat {
    M2(Matrix2<C64>),
    M3(Matrix3<C64>),
}

impl Mat {
    fn identity(dim: usize) -> Self {
        if dim == 2 {
            Mat::M2(Matrix2::identity())
        } else {
            Mat::M3(Matrix3::identity())
        }
    }

    fn rows(&self) -> Vec<Vec<C64>> {
        match self {
            Mat::M2(m) => (0..2).map(|i| (0..2).map(|j| m[(i, j)]).collect()).collect(),
            Mat::M3(m) => (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect(),
        }
    }

    /// Frobenius norm of the difference; infinite for mismatched sizes.
    pub fn dist(&self, other: &Mat) -> f64 {
        match (self, other) {
            (Mat::M2(a), Mat::M2(b)) => (a - b).norm(),
            (Mat::M3(a), Mat::M3(b)) => (a - b).norm(),
            _ => f64::INFINITY,
        }
    }
}

fn j3() -> Matrix3<C64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)))
}

fn j2() -> Matrix2<C64> {
    Matrix2::from_diagonal(&nalgebra::Vector2::new(c(1.0, 0.0), c(-1.0, 0.0)))
}

fn imag_norm3(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|x| x.im * x.im).sum::<f64>().sqrt()
}

/// An element of one of the five groups.
///
/// `branch` is an integer sheet label for elements of the n-fold cover of
/// SO₂,₁(ℝ)ᶜ realised on Ω^>; it is 0 everywhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub id: GroupId,
    pub matrix: Mat,
    pub branch: i64,
}

impl GroupElement {
    pub fn identity(id: GroupId) -> Self {
        Self {
            id,
            matrix: Mat::identity(id.dim()),
            branch: 0,
        }
    }

    /// Validated constructor for SU₂ and SU₁,₁.
    pub fn from_matrix2(id: GroupId, m: Matrix2<C64>) -> Result<Self> {
        Self::checked(id, Mat::M2(m))
    }

    /// Validated constructor for SU₂,₁, SO₃ and SO₂,₁ᶜ.
    pub fn from_matrix3(id: GroupId, m: Matrix3<C64>) -> Result<Self> {
        Self::checked(id, Mat::M3(m))
    }

    fn checked(id: GroupId, matrix: Mat) -> Result<Self> {
        let dim_ok = matches!(
            (id.dim(), &matrix),
            (2, Mat::M2(_)) | (3, Mat::M3(_))
        );
        if !dim_ok {
            return Err(Error::ParameterOutOfRange(format!(
                "{id:?} needs a {n}x{n} matrix",
                n = id.dim()
            )));
        }
        let g = Self {
            id,
            matrix,
            branch: 0,
        };
        let r = g.invariant_residual();
        let scale = 1.0 + g.frobenius_sqr();
        if !(r <= MEMBERSHIP_TOL * scale) {
            return Err(Error::ParameterOutOfRange(format!(
                "matrix is not in {id:?} (invariant residual {r:e})"
            )));
        }
        Ok(g)
    }

    /// g = [[a, b], [−b̄, ā]] with |a|² + |b|² = 1.
    pub fn su2(a: C64, b: C64) -> Result<Self> {
        Self::from_matrix2(GroupId::SU2, Matrix2::new(a, b, -b.conj(), a.conj()))
    }

    /// g = [[a, b], [b̄, ā]] with |a|² − |b|² = 1.
    pub fn su11(a: C64, b: C64) -> Result<Self> {
        Self::from_matrix2(GroupId::SU11, Matrix2::new(a, b, b.conj(), a.conj()))
    }

    pub fn with_branch(mut self, branch: i64) -> Self {
        self.branch = branch;
        self
    }

    pub fn m2(&self) -> Result<Matrix2<C64>> {
        match self.matrix {
            Mat::M2(m) => Ok(m),
            Mat::M3(_) => Err(Error::ParameterOutOfRange(format!(
                "{:?} is not a 2x2 group",
                self.id
            ))),
        }
    }

    pub fn m3(&self) -> Result<Matrix3<C64>> {
        match self.matrix {
            Mat::M3(m) => Ok(m),
            Mat::M2(_) => Err(Error::ParameterOutOfRange(format!(
                "{:?} is not a 3x3 group",
                self.id
            ))),
        }
    }

    /// The (a, b) parameters of an SU₂ or SU₁,₁ element.
    pub fn ab(&self) -> Result<(C64, C64)> {
        let m = self.m2()?;
        Ok((m[(0, 0)], m[(0, 1)]))
    }

    fn frobenius_sqr(&self) -> f64 {
        match &self.matrix {
            Mat::M2(m) => m.norm_squared(),
            Mat::M3(m) => m.norm_squared(),
        }
    }

    /// Sum of the defining-equation residuals of the group (0 for an exact member).
    pub fn invariant_residual(&self) -> f64 {
        match (&self.id, &self.matrix) {
            (GroupId::SU2, Mat::M2(m)) => {
                let (a, b) = (m[(0, 0)], m[(0, 1)]);
                (m[(1, 0)] + b.conj()).norm()
                    + (m[(1, 1)] - a.conj()).norm()
                    + (a.norm_sqr() + b.norm_sqr() - 1.0).abs()
            }
            (GroupId::SU11, Mat::M2(m)) => {
                let (a, b) = (m[(0, 0)], m[(0, 1)]);
                let j = j2();
                (m[(1, 0)] - b.conj()).norm()
                    + (m[(1, 1)] - a.conj()).norm()
                    + (a.norm_sqr() - b.norm_sqr() - 1.0).abs()
                    + (m.adjoint() * j * m - j).norm()
            }
            (GroupId::SU21, Mat::M3(m)) => {
                let j = j3();
                (m.adjoint() * j * m - j).norm() + (m.determinant() - 1.0).norm()
            }
            (GroupId::SO3, Mat::M3(m)) => {
                imag_norm3(m)
                    + (m.transpose() * m - Matrix3::identity()).norm()
                    + (m.determinant() - 1.0).norm()
            }
            (GroupId::SO21c, Mat::M3(m)) => {
                let j = j3();
                imag_norm3(m)
                    + (m.transpose() * j * m - j).norm()
                    + (m.determinant() - 1.0).norm()
                    + (1.0 - m[(2, 2)].re).max(0.0)
            }
            _ => f64::INFINITY,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.id != other.id {
            return Err(Error::ParameterOutOfRange(format!(
                "cannot multiply {:?} by {:?}",
                self.id, other.id
            )));
        }
        let matrix = match (&self.matrix, &other.matrix) {
            (Mat::M2(a), Mat::M2(b)) => Mat::M2(a * b),
            (Mat::M3(a), Mat::M3(b)) => Mat::M3(a * b),
            _ => unreachable!("ids agree so sizes agree"),
        };
        Ok(Self {
            id: self.id,
            matrix,
            branch: 0,
        })
    }

    /// Group inverse, computed from the defining form (exact up to rounding).
    pub fn inverse(&self) -> Self {
        let matrix = match (&self.id, &self.matrix) {
            (GroupId::SU2, Mat::M2(m)) => Mat::M2(m.adjoint()),
            (GroupId::SU11, Mat::M2(m)) => Mat::M2(j2() * m.adjoint() * j2()),
            (GroupId::SO3, Mat::M3(m)) => Mat::M3(m.transpose()),
            (GroupId::SO21c, Mat::M3(m)) => Mat::M3(j3() * m.transpose() * j3()),
            (GroupId::SU21, Mat::M3(m)) => Mat::M3(j3() * m.adjoint() * j3()),
            (_, other) => *other,
        };
        Self {
            id: self.id,
            matrix,
            branch: -self.branch,
        }
    }

    /// −g; defined for the 2×2 groups, where φ(−g) = φ(g).
    pub fn neg(&self) -> Result<Self> {
        let m = self.m2()?;
        Ok(Self {
            id: self.id,
            matrix: Mat::M2(-m),
            branch: self.branch,
        })
    }

    /// Standard linear action of a 2×2 group on ℂ².
    pub fn act_c2(&self, p: PointC2) -> Result<PointC2> {
        let m = self.m2()?;
        Ok(PointC2::new(
            m[(0, 0)] * p.z + m[(0, 1)] * p.w,
            m[(1, 0)] * p.z + m[(1, 1)] * p.w,
        ))
    }

    /// Standard linear action of a 3×3 group on ℂ³.
    pub fn act_c3(&self, p: PointC3) -> Result<PointC3> {
        let m = self.m3()?;
        let v = m * nalgebra::Vector3::new(p.z1, p.z2, p.z3);
        Ok(PointC3::new(v[0], v[1], v[2]))
    }
}

/// An element of the Lie algebra of one of the five groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    pub id: GroupId,
    pub matrix: Mat,
}

impl AlgebraElement {
    pub fn new(id: GroupId, matrix: Mat) -> Result<Self> {
        let x = Self { id, matrix };
        let r = x.invariant_residual();
        let scale = 1.0
            + match &matrix {
                Mat::M2(m) => m.norm(),
                Mat::M3(m) => m.norm(),
            };
        if !(r <= MEMBERSHIP_TOL * scale) {
            return Err(Error::ParameterOutOfRange(format!(
                "matrix is not in the Lie algebra of {id:?} (residual {r:e})"
            )));
        }
        Ok(x)
    }

    pub fn zero(id: GroupId) -> Self {
        let matrix = if id.dim() == 2 {
            Mat::M2(Matrix2::zeros())
        } else {
            Mat::M3(Matrix3::zeros())
        };
        Self { id, matrix }
    }

    pub fn invariant_residual(&self) -> f64 {
        match (&self.id, &self.matrix) {
            (GroupId::SU2, Mat::M2(x)) => (x.adjoint() + x).norm() + x.trace().norm(),
            (GroupId::SU11, Mat::M2(x)) => {
                (x.adjoint() * j2() + j2() * x).norm() + x.trace().norm()
            }
            (GroupId::SU21, Mat::M3(x)) => {
                (x.adjoint() * j3() + j3() * x).norm() + x.trace().norm()
            }
            (GroupId::SO3, Mat::M3(x)) => imag_norm3(x) + (x.transpose() + x).norm(),
            (GroupId::SO21c, Mat::M3(x)) => {
                imag_norm3(x) + (x.transpose() * j3() + j3() * x).norm()
            }
            _ => f64::INFINITY,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        let k = c(t, 0.0);
        let matrix = match &self.matrix {
            Mat::M2(m) => Mat::M2(m * k),
            Mat::M3(m) => Mat::M3(m * k),
        };
        Self {
            id: self.id,
            matrix,
        }
    }

    /// Random element whose real coordinates are uniform in [−radius, radius].
    pub fn random<R: Rng + ?Sized>(id: GroupId, rng: &mut R, radius: f64) -> Self {
        let mut u = || {
            if radius > 0.0 {
                rng.gen_range(-radius..=radius)
            } else {
                0.0
            }
        };
        let matrix = match id {
            GroupId::SU2 => {
                let (al, be, ga) = (u(), u(), u());
                Mat::M2(Matrix2::new(c(0.0, al), c(be, ga), c(-be, ga), c(0.0, -al)))
            }
            GroupId::SU11 => {
                let (al, be, ga) = (u(), u(), u());
                Mat::M2(Matrix2::new(c(0.0, al), c(be, ga), c(be, -ga), c(0.0, -al)))
            }
            GroupId::SU21 => {
                // [[A, v], [v*, −tr A]] with A ∈ u(2)
                let (p, q, r, s) = (u(), u(), u(), u());
                let a = Matrix2::new(c(0.0, p), c(r, s), c(-r, s), c(0.0, q));
                let v = [c(u(), u()), c(u(), u())];
                let tr = a.trace();
                Mat::M3(Matrix3::new(
                    a[(0, 0)],
                    a[(0, 1)],
                    v[0],
                    a[(1, 0)],
                    a[(1, 1)],
                    v[1],
                    v[0].conj(),
                    v[1].conj(),
                    -tr,
                ))
            }
            GroupId::SO3 => {
                let (a, b, cc) = (u(), u(), u());
                Mat::M3(Matrix3::new(
                    c(0.0, 0.0),
                    c(a, 0.0),
                    c(b, 0.0),
                    c(-a, 0.0),
                    c(0.0, 0.0),
                    c(cc, 0.0),
                    c(-b, 0.0),
                    c(-cc, 0.0),
                    c(0.0, 0.0),
                ))
            }
            GroupId::SO21c => {
                let (a, b, cc) = (u(), u(), u());
                Mat::M3(Matrix3::new(
                    c(0.0, 0.0),
                    c(a, 0.0),
                    c(b, 0.0),
                    c(-a, 0.0),
                    c(0.0, 0.0),
                    c(cc, 0.0),
                    c(b, 0.0),
                    c(cc, 0.0),
                    c(0.0, 0.0),
                ))
            }
        };
        Self { id, matrix }
    }
}

/// Scaling-and-squaring Taylor exponential of a small complex matrix.
fn expm<const N: usize>(x: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm = x.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = x * c(0.5f64.powi(squarings), 0.0);
    let mut result = SMatrix::<C64, N, N>::identity();
    let mut term = SMatrix::<C64, N, N>::identity();
    for k in 1..=30 {
        term = term * y * c(1.0 / k as f64, 0.0);
        result += term;
        if term.norm() <= 1e-18 * result.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

pub fn mat_exp(x: &AlgebraElement) -> GroupElement {
    let matrix = match &x.matrix {
        Mat::M2(m) => Mat::M2(expm(m)),
        Mat::M3(m) => {
            let mut e = expm(m);
            if matches!(x.id, GroupId::SO3 | GroupId::SO21c) {
                // real algebra, real group: drop rounding noise in the imaginary parts
                e.iter_mut().for_each(|v| v.im = 0.0);
            }
            Mat::M3(e)
        }
    };
    GroupElement {
        id: x.id,
        matrix,
        branch: 0,
    }
}

/// mat_exp of a random algebra element with coordinates in [−radius, radius].
pub fn sample_group<R: Rng + ?Sized>(id: GroupId, rng: &mut R, radius: f64) -> Result<GroupElement> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::ParameterOutOfRange(format!(
            "sampling radius must be finite and non-negative, got {radius}"
        )));
    }
    Ok(mat_exp(&AlgebraElement::random(id, rng, radius)))
}

/// φ^μ: SU₂ → SO₃(ℝ), with the bottom-right entry |a|² − |b|².
pub fn phi_mu(g: &GroupElement) -> Result<GroupElement> {
    if g.id != GroupId::SU2 {
        return Err(Error::ParameterOutOfRange(format!(
            "phi_mu expects an SU2 element, got {:?}",
            g.id
        )));
    }
    let (a, b) = g.ab()?;
    let (a2, b2, ab, abb) = (a * a, b * b, a * b, a * b.conj());
    let m = Matrix3::new(
        (a2 + b2).re,
        (a2 - b2).im,
        2.0 * ab.im,
        -(a2 + b2).im,
        (a2 - b2).re,
        2.0 * ab.re,
        2.0 * abb.im,
        -2.0 * abb.re,
        a.norm_sqr() - b.norm_sqr(),
    );
    Ok(GroupElement {
        id: GroupId::SO3,
        matrix: Mat::M3(m.map(|x| c(x, 0.0))),
        branch: 0,
    })
}

/// φ: SU₁,₁ → SO₂,₁(ℝ)ᶜ, with the bottom-right entry |a|² + |b|².
pub fn phi(g: &GroupElement) -> Result<GroupElement> {
    if g.id != GroupId::SU11 {
        return Err(Error::ParameterOutOfRange(format!(
            "phi expects an SU11 element, got {:?}",
            g.id
        )));
    }
    let (a, b) = g.ab()?;
    let (a2, b2, ab, abb) = (a * a, b * b, a * b, a * b.conj());
    let m = Matrix3::new(
        (a2 + b2).re,
        (a2 - b2).im,
        2.0 * ab.re,
        -(a2 + b2).im,
        (a2 - b2).re,
        -2.0 * ab.im,
        2.0 * abb.re,
        2.0 * abb.im,
        a.norm_sqr() + b.norm_sqr(),
    );
    Ok(GroupElement {
        id: GroupId::SO21c,
        matrix: Mat::M3(m.map(|x| c(x, 0.0))),
        branch: 0,
    })
}

fn prefer_positive(a: C64, b: C64) -> (C64, C64) {
    if a.re < 0.0 || (a.re == 0.0 && a.im < 0.0) {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// One of the two preimages of an SO₃ element under φ^μ (the one with Re a ≥ 0).
pub fn lift_so3(m: &GroupElement) -> Result<GroupElement> {
    if m.id != GroupId::SO3 {
        return Err(Error::ParameterOutOfRange("lift_so3 expects SO3".into()));
    }
    let r = m.m3()?.map(|x| x.re);
    let a2 = c(r[(0, 0)] + r[(1, 1)], r[(0, 1)] - r[(1, 0)]) * 0.5;
    let b2 = -c(r[(1, 1)] - r[(0, 0)], r[(0, 1)] + r[(1, 0)]) * 0.5;
    let ab = c(r[(1, 2)], r[(0, 2)]) * 0.5;
    let (a, b) = if a2.norm() >= b2.norm() {
        let a = a2.sqrt();
        (a, ab / a)
    } else {
        let b = b2.sqrt();
        (ab / b, b)
    };
    let (a, b) = prefer_positive(a, b);
    // renormalise away rounding so the result passes the membership check
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    GroupElement::su2(a / n, b / n)
}

/// One of the two preimages of an SO₂,₁ᶜ element under φ (the one with Re a ≥ 0).
pub fn lift_so21c(m: &GroupElement) -> Result<GroupElement> {
    if m.id != GroupId::SO21c {
        return Err(Error::ParameterOutOfRange("lift_so21c expects SO21c".into()));
    }
    let r = m.m3()?.map(|x| x.re);
    let a2 = c(r[(0, 0)] + r[(1, 1)], r[(0, 1)] - r[(1, 0)]) * 0.5;
    let a = a2.sqrt();
    let b = c(r[(0, 2)], -r[(1, 2)]) / (2.0 * a);
    let (a, b) = prefer_positive(a, b);
    let n = (a.norm_sqr() - b.norm_sqr()).sqrt();
    GroupElement::su11(a / n, b / n)
}

/// A logarithm X with mat_exp(X) = ±g for g in SU₂ or SU₁,₁.
///
/// The sign of g is flipped when Re a < 0 so that the element is always an
/// exponential; this is harmless wherever only φ(g) matters.
pub fn log_sl2(g: &GroupElement) -> Result<AlgebraElement> {
    let m = g.m2()?;
    let m = if m[(0, 0)].re < 0.0 { -m } else { m };
    let half_trace = m[(0, 0)].re;
    let shifted = m - Matrix2::identity() * c(half_trace, 0.0);
    let factor = match g.id {
        GroupId::SU2 => {
            let th = half_trace.clamp(-1.0, 1.0).acos();
            if th < 1e-8 {
                1.0 + th * th / 6.0
            } else {
                th / th.sin()
            }
        }
        GroupId::SU11 => {
            if half_trace > 1.0 + 1e-12 {
                let th = half_trace.acosh();
                th / th.sinh()
            } else if half_trace < 1.0 - 1e-12 {
                let th = half_trace.acos();
                th / th.sin()
            } else {
                1.0
            }
        }
        other => {
            return Err(Error::ParameterOutOfRange(format!(
                "log_sl2 expects SU2 or SU11, got {other:?}"
            )))
        }
    };
    let x = shifted * c(factor, 0.0);
    // project onto the algebra to remove rounding drift in the diagonal
    let x = Matrix2::new(
        c(0.0, x[(0, 0)].im),
        x[(0, 1)],
        x[(1, 0)],
        c(0.0, -x[(0, 0)].im),
    );
    Ok(AlgebraElement {
        id: g.id,
        matrix: Mat::M2(x),
    })
}

/// Fractional-linear action on (z, w, 1):
/// ((a₁₁z + a₁₂w + b₁)/(c₁z + c₂w + d), (a₂₁z + a₂₂w + b₂)/(c₁z + c₂w + d)).
pub fn frac_linear(q: &GroupElement, p: PointC2, tol: &Tolerance) -> Result<PointC2> {
    let m = q.m3()?;
    let den = m[(2, 0)] * p.z + m[(2, 1)] * p.w + m[(2, 2)];
    if den.norm() < tol.abs_tol * (1.0 + p.norm()) {
        return Err(Error::PoleHit(den.norm()));
    }
    Ok(PointC2::new(
        (m[(0, 0)] * p.z + m[(0, 1)] * p.w + m[(0, 2)]) / den,
        (m[(1, 0)] * p.z + m[(1, 1)] * p.w + m[(1, 2)]) / den,
    ))
}

/// Fractional-linear action on (1, z, w):
/// ((a₂₂z + b₂w + a₂₁)/(a₁₂z + b₁w + a₁₁), (c₂z + dw + c₁)/(a₁₂z + b₁w + a₁₁)).
pub fn frac_linear_eta(q: &GroupElement, p: PointC2, tol: &Tolerance) -> Result<PointC2> {
    let m = q.m3()?;
    let den = m[(0, 1)] * p.z + m[(0, 2)] * p.w + m[(0, 0)];
    if den.norm() < tol.abs_tol * (1.0 + p.norm()) {
        return Err(Error::PoleHit(den.norm()));
    }
    Ok(PointC2::new(
        (m[(1, 1)] * p.z + m[(1, 2)] * p.w + m[(1, 0)]) / den,
        (m[(2, 1)] * p.z + m[(2, 2)] * p.w + m[(2, 0)]) / den,
    ))
}

// JSON: {"group": "SU11", "matrix": [[[re, im], ...], ...], "branch": 0}

#[derive(Serialize, Deserialize)]
struct GroupElementRepr {
    group: GroupId,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    branch: i64,
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupElementRepr {
            group: self.id,
            matrix: self
                .matrix
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(|x| [x.re, x.im]).collect())
                .collect(),
            branch: self.branch,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GroupElementRepr::deserialize(d)?;
        let n = r.group.dim();
        if r.matrix.len() != n || r.matrix.iter().any(|row| row.len() != n) {
            return Err(D::Error::custom(format!("{:?} needs a {n}x{n} matrix", r.group)));
        }
        let at = |i: usize, j: usize| c(r.matrix[i][j][0], r.matrix[i][j][1]);
        let g = if n == 2 {
            GroupElement::from_matrix2(r.group, Matrix2::from_fn(at))
        } else {
            GroupElement::from_matrix3(r.group, Matrix3::from_fn(at))
        };
        g.map(|g| g.with_branch(r.branch)).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        for id in GroupId::all() {
            let e = mat_exp(&AlgebraElement::zero(id));
            assert_eq!(e, GroupElement::identity(id));
        }
        let th = 0.83;
        let x = AlgebraElement::new(
            GroupId::SU2,
            Mat::M2(Matrix2::new(c(0.0, th), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -th))),
        )
        .unwrap();
        let g = mat_exp(&x).m2().unwrap();
        assert!((g[(0, 0)] - C64::from_polar(1.0, th)).norm() < 1e-15);
        assert!((g[(1, 1)] - C64::from_polar(1.0, -th)).norm() < 1e-15);
    }

    #[test]
    fn exp_of_so3_generator_is_rodrigues_rotation() {
        let th = 2.7;
        let x = AlgebraElement::new(
            GroupId::SO3,
            Mat::M3(Matrix3::new(
                c(0.0, 0.0), c(-th, 0.0), c(0.0, 0.0),
                c(th, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            )),
        )
        .unwrap();
        let g = mat_exp(&x).m3().unwrap();
        let expect = Matrix3::new(
            th.cos(), -th.sin(), 0.0,
            th.sin(), th.cos(), 0.0,
            0.0, 0.0, 1.0,
        )
        .map(|v| c(v, 0.0));
        assert!((g - expect).norm() < 1e-13);
    }

    #[test]
    fn samples_satisfy_invariants() {
        let mut r = rng(3);
        for id in GroupId::all() {
            for _ in 0..200 {
                let g = sample_group(id, &mut r, 1.0).unwrap();
                assert!(g.invariant_residual() < 1e-10, "{id:?} {}", g.invariant_residual());
            }
            assert_eq!(
                sample_group(id, &mut r, 0.0).unwrap(),
                GroupElement::identity(id)
            );
        }
        assert!(sample_group(GroupId::SU2, &mut r, -1.0).is_err());
    }

    #[test]
    fn phi_mu_examples() {
        let id = GroupElement::identity(GroupId::SU2);
        assert!(phi_mu(&id).unwrap().matrix.dist(&GroupElement::identity(GroupId::SO3).matrix) < 1e-15);
        let th = 0.4;
        let g = GroupElement::su2(C64::from_polar(1.0, th), c(0.0, 0.0)).unwrap();
        let m = phi_mu(&g).unwrap().m3().unwrap();
        let (c2, s2) = ((2.0 * th).cos(), (2.0 * th).sin());
        let expect = Matrix3::new(c2, s2, 0.0, -s2, c2, 0.0, 0.0, 0.0, 1.0).map(|v| c(v, 0.0));
        assert!((m - expect).norm() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        let t = 0.6f64;
        let g = GroupElement::su11(c(t.cosh(), 0.0), c(t.sinh(), 0.0)).unwrap();
        let m = phi(&g).unwrap().m3().unwrap();
        let (ch, sh) = ((2.0 * t).cosh(), (2.0 * t).sinh());
        let expect = Matrix3::new(ch, 0.0, sh, 0.0, 1.0, 0.0, sh, 0.0, ch).map(|v| c(v, 0.0));
        assert!((m - expect).norm() < 1e-13);
    }

    #[test]
    fn lifts_invert_the_covering() {
        let mut r = rng(9);
        for _ in 0..300 {
            let g = sample_group(GroupId::SU2, &mut r, 2.0).unwrap();
            let m = phi_mu(&g).unwrap();
            let back = phi_mu(&lift_so3(&m).unwrap()).unwrap();
            assert!(back.matrix.dist(&m.matrix) < 1e-12);
            let g = sample_group(GroupId::SU11, &mut r, 1.0).unwrap();
            let m = phi(&g).unwrap();
            let back = phi(&lift_so21c(&m).unwrap()).unwrap();
            assert!(back.matrix.dist(&m.matrix) < 1e-10 * (1.0 + m.frobenius_sqr()));
        }
    }

    #[test]
    fn log_inverts_exp_up_to_sign() {
        let mut r = rng(5);
        for id in [GroupId::SU2, GroupId::SU11] {
            for _ in 0..300 {
                let g = sample_group(id, &mut r, 1.5).unwrap();
                let x = log_sl2(&g).unwrap();
                assert!(x.invariant_residual() < 1e-12);
                let e = mat_exp(&x);
                let d = e.matrix.dist(&g.matrix).min(e.matrix.dist(&g.neg().unwrap().matrix));
                assert!(d < 1e-9 * (1.0 + g.frobenius_sqr()), "{id:?} {d}");
            }
        }
    }

    #[test]
    fn frac_linear_examples() {
        let tol = Tolerance::default();
        let p = PointC2::new(c(0.3, -0.2), c(0.1, 0.5));
        for id in [GroupId::SU21, GroupId::SO21c] {
            let e = GroupElement::identity(id);
            assert_eq!(frac_linear(&e, p, &tol).unwrap(), p);
            assert_eq!(frac_linear_eta(&e, p, &tol).unwrap(), p);
        }
        let th = 1.1;
        let e = C64::from_polar(1.0, th);
        let q = Matrix3::from_diagonal(&nalgebra::Vector3::new(e, e, c(1.0, 0.0)));
        // diag(e^{iθ}, e^{iθ}, 1) preserves the form but has det e^{2iθ}; the action
        // does not see the determinant
        let q = GroupElement {
            id: GroupId::SU21,
            matrix: Mat::M3(q),
            branch: 0,
        };
        let out = frac_linear(&q, PointC2::new(c(1.0, 0.0), c(0.0, 0.0)), &tol).unwrap();
        assert!((out.z - e).norm() < 1e-15 && out.w.norm() < 1e-15);
        let pole = GroupElement {
            id: GroupId::SU21,
            matrix: Mat::M3(Matrix3::new(
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
                c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0),
            )),
            branch: 0,
        };
        assert!(matches!(
            frac_linear(&pole, PointC2::new(c(1.0, 0.0), c(0.0, 0.0)), &tol),
            Err(Error::PoleHit(_))
        ));
    }

    #[test]
    fn group_element_json_round_trip() {
        let g = sample_group(GroupId::SU11, &mut rng(1), 1.0).unwrap().with_branch(2);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with(r#"{"group":"SU11","matrix":[[["#));
        let back: GroupElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"group":"SO3","matrix":[[[2,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#;
        assert!(serde_json::from_str::<GroupElement>(bad).is_err());
    }

    proptest! {
        #[test]
        fn phi_mu_is_a_homomorphism(s1 in 0u64..10_000, s2 in 0u64..10_000) {
            let g = sample_group(GroupId::SU2, &mut rng(s1), 1.0).unwrap();
            let h = sample_group(GroupId::SU2, &mut rng(s2 + 10_000), 1.0).unwrap();
            let lhs = phi_mu(&g.mul(&h).unwrap()).unwrap();
            let rhs = phi_mu(&g).unwrap().mul(&phi_mu(&h).unwrap()).unwrap();
            prop_assert!(lhs.matrix.dist(&rhs.matrix) < 1e-12);
            prop_assert!(lhs.invariant_residual() < 1e-12);
            prop_assert_eq!(phi_mu(&g).unwrap(), phi_mu(&g.neg().unwrap()).unwrap());
        }

        #[test]
        fn phi_is_a_homomorphism(s1 in 0u64..10_000, s2 in 0u64..10_000) {
            let g = sample_group(GroupId::SU11, &mut rng(s1), 1.0).unwrap();
            let h = sample_group(GroupId::SU11, &mut rng(s2 + 10_000), 1.0).unwrap();
            let lhs = phi(&g.mul(&h).unwrap()).unwrap();
            let rhs = phi(&g).unwrap().mul(&phi(&h).unwrap()).unwrap();
            prop_assert!(lhs.matrix.dist(&rhs.matrix) < 1e-9);
            prop_assert!(lhs.invariant_residual() < 1e-9);
            prop_assert_eq!(phi(&g).unwrap(), phi(&g.neg().unwrap()).unwrap());
        }

        #[test]
        fn exp_times_exp_of_negative_is_identity(seed in 0u64..10_000, k in 0usize..5) {
            let id = GroupId::all()[k];
            let x = AlgebraElement::random(id, &mut rng(seed), 1.0);
            let p = mat_exp(&x).mul(&mat_exp(&x.scale(-1.0))).unwrap();
            prop_assert!(p.matrix.dist(&GroupElement::identity(id).matrix) < 1e-10);
        }

        #[test]
        fn frac_linear_is_a_left_action(s1 in 0u64..10_000, s2 in 0u64..10_000,
                                        x in -0.6..0.6f64, y in -0.6..0.6f64) {
            let tol = Tolerance::default();
            let p = PointC2::new(c(x, y), c(y * 0.5, -x * 0.3));
            let g = sample_group(GroupId::SU21, &mut rng(s1), 0.5).unwrap();
            let h = sample_group(GroupId::SU21, &mut rng(s2 + 10_000), 0.5).unwrap();
            let lhs = frac_linear(&g, frac_linear(&h, p, &tol).unwrap(), &tol).unwrap();
            let rhs = frac_linear(&g.mul(&h).unwrap(), p, &tol).unwrap();
            prop_assert!(lhs.dist(rhs) < 1e-9 * (1.0 + lhs.norm()));
            let g = sample_group(GroupId::SO21c, &mut rng(s1), 0.5).unwrap();
            let h = sample_group(GroupId::SO21c, &mut rng(s2 + 10_000), 0.5).unwrap();
            let lhs = frac_linear_eta(&g, frac_linear_eta(&h, p, &tol).unwrap(), &tol).unwrap();
            let rhs = frac_linear_eta(&g.mul(&h).unwrap(), p, &tol).unwrap();
            prop_assert!(lhs.dist(rhs) < 1e-9 * (1.0 + lhs.norm()));
        }
    }
}
