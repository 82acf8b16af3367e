use serde::{Deserialize, Serialize};

use super::{PointC3, C64};
use crate::{Error, Result};

/// Which of the two Hermitian forms on ℂ³ is meant: `Plus` is the standard
/// product ζ₁ζ̄′₁ + ζ₂ζ̄′₂ + ζ₃ζ̄′₃, `Minus` flips the sign of the last term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormSignature {
    Plus,
    Minus,
}

impl FormSignature {
    /// Sign of the third coordinate.
    pub fn sign(self) -> f64 {
        match self {
            FormSignature::Plus => 1.0,
            FormSignature::Minus => -1.0,
        }
    }
}

pub fn herm_form(sig: FormSignature, a: PointC3, b: PointC3) -> C64 {
    a.z1 * b.z1.conj() + a.z2 * b.z2.conj() + sig.sign() * a.z3 * b.z3.conj()
}

/// z₁² + z₂² ± z₃² − 1; zero exactly on Q₊ (plus) or Q₋ (minus).
pub fn quadric_residual(sig: FormSignature, p: PointC3) -> C64 {
    p.z1 * p.z1 + p.z2 * p.z2 + sig.sign() * p.z3 * p.z3 - 1.0
}

/// Bilinear (not Hermitian) null form ζ₁² + ζ₂² ± ζ₃².
fn null_form(sig: FormSignature, p: PointC3) -> C64 {
    p.z1 * p.z1 + p.z2 * p.z2 + sig.sign() * p.z3 * p.z3
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The real unit normal ξ used by the frame maps.
///
/// * `Plus`: ⟨ξ,ξ⟩₊ = 1, ⟨ξ,ζ⟩₊ = 0 and det(ξ, Re ζ, Im ζ) > 0, on the null
///   quadric ζ₁² + ζ₂² + ζ₃² = 0.
/// * `Minus`: ⟨ξ,ξ⟩₋ = −1, ⟨ξ,ζ⟩₋ = 0 and det(ξ, Re ζ, Im ζ) < 0, on the null
///   quadric ζ₁² + ζ₂² − ζ₃² = 0 with ⟨ζ,ζ⟩₋ > 0.
///
/// ξ is the (J-adapted) cross product of Re ζ and Im ζ, normalized.
pub fn frame_vector(sig: FormSignature, zeta: PointC3) -> Result<[f64; 3]> {
    let scale = 1.0 + zeta.norm_sqr();
    let residual = null_form(sig, zeta).norm();
    if residual >= 1e-8 * scale {
        return Err(Error::NotOnNullQuadric(residual));
    }
    if sig == FormSignature::Minus && herm_form(sig, zeta, zeta).re <= 0.0 {
        return Err(Error::DomainViolation(
            "frame_vector(minus) needs <zeta, zeta>_- > 0".into(),
        ));
    }
    let re = zeta.re();
    let im = zeta.im();
    let n = cross(re, im);
    let sin_angle = dot(n, n).sqrt() / (dot(re, re) * dot(im, im)).sqrt();
    if !(sin_angle > 1e-8) {
        return Err(Error::DegenerateFrame(sin_angle));
    }
    let xi = match sig {
        FormSignature::Plus => {
            let len = dot(n, n).sqrt();
            [n[0] / len, n[1] / len, n[2] / len]
        }
        FormSignature::Minus => {
            // J(Re ζ × Im ζ) is J-orthogonal to Re ζ and Im ζ and timelike
            let jn = [n[0], n[1], -n[2]];
            let q = jn[0] * jn[0] + jn[1] * jn[1] - jn[2] * jn[2];
            if !(q < 0.0) {
                return Err(Error::DegenerateFrame(q));
            }
            let len = (-q).sqrt();
            let mut xi = [jn[0] / len, jn[1] / len, jn[2] / len];
            if dot(xi, n) > 0.0 {
                xi = [-xi[0], -xi[1], -xi[2]];
            }
            xi
        }
    };
    Ok(xi)
}

/// F₊(ζ) = ζ + ξ and F₋(ζ) = ζ + iξ.
pub fn frame_map(sig: FormSignature, zeta: PointC3) -> Result<PointC3> {
    let xi = frame_vector(sig, zeta)?;
    let k = match sig {
        FormSignature::Plus => C64::new(1.0, 0.0),
        FormSignature::Minus => C64::new(0.0, 1.0),
    };
    Ok(zeta.add(PointC3::new(k * xi[0], k * xi[1], k * xi[2])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_core::c;
    use crate::groups::{sample_group, GroupId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn det(a: [f64; 3], b: [f64; 3], cc: [f64; 3]) -> f64 {
        dot(a, cross(b, cc))
    }

    fn real_c3(x: [f64; 3]) -> PointC3 {
        PointC3::new(c(x[0], 0.0), c(x[1], 0.0), c(x[2], 0.0))
    }

    #[test]
    fn herm_form_examples() {
        let e3 = PointC3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(herm_form(FormSignature::Minus, e3, e3), c(-1.0, 0.0));
        let p = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(herm_form(FormSignature::Plus, p, p), c(3.0, 0.0));
        let q = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, -1.0));
        assert_eq!(herm_form(FormSignature::Minus, q, q), c(1.0, 0.0));
    }

    #[test]
    fn quadric_examples() {
        let p = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(quadric_residual(FormSignature::Plus, p), c(0.0, 0.0));
        let q = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, -1.0));
        assert_eq!(quadric_residual(FormSignature::Minus, q), c(0.0, 0.0));
        let e1 = PointC3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(quadric_residual(FormSignature::Plus, e1), c(0.0, 0.0));
    }

    #[test]
    fn frame_vector_at_base_points() {
        // Re ζ = (0,1,0), Im ζ = (−1,0,0): ξ ⊥ both forces ξ = ±e₃.
        let zeta = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, 0.0));
        let xi = frame_vector(FormSignature::Plus, zeta).unwrap();
        assert_eq!(xi, [0.0, 0.0, 1.0]);
        assert!(det(xi, zeta.re(), zeta.im()) > 0.0);
        let f = frame_map(FormSignature::Plus, zeta).unwrap();
        assert_eq!(f, PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0)));

        let xi = frame_vector(FormSignature::Minus, zeta).unwrap();
        assert_eq!(xi, [0.0, 0.0, -1.0]);
        assert!(det(xi, zeta.re(), zeta.im()) < 0.0);
        let f = frame_map(FormSignature::Minus, zeta).unwrap();
        assert_eq!(f, PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, -1.0)));
    }

    #[test]
    fn frame_vector_rejects_bad_input() {
        let off = PointC3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            frame_vector(FormSignature::Plus, off),
            Err(Error::NotOnNullQuadric(_))
        ));
        // on the null quadric but spacelike part negative
        let neg = PointC3::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!(frame_vector(FormSignature::Minus, neg).is_err());
    }

    #[test]
    fn frame_postconditions_on_random_null_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, 0.0));
        for sig in [FormSignature::Plus, FormSignature::Minus] {
            let gid = match sig {
                FormSignature::Plus => GroupId::SO3,
                FormSignature::Minus => GroupId::SO21c,
            };
            for i in 0..200 {
                let g = sample_group(gid, &mut rng, 1.0).unwrap();
                let t = (i as f64 / 100.0 - 1.0).exp();
                let zeta = g.act_c3(base).unwrap().scale(c(t, 0.0));
                let xi = frame_vector(sig, zeta).unwrap();
                let xic = real_c3(xi);
                let s = sig.sign();
                assert!((herm_form(sig, xic, xic).re - s).abs() < 1e-10);
                assert!(herm_form(sig, xic, zeta).norm() < 1e-10 * (1.0 + t));
                let d = det(xi, zeta.re(), zeta.im());
                assert!(d * s > 0.0);
                let f = frame_map(sig, zeta).unwrap();
                assert!(quadric_residual(sig, f).norm() < 1e-10 * (1.0 + t * t));
            }
        }
    }
}
