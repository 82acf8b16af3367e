//! Complex scalars and points, Hermitian and bilinear forms on ℂ³, the quadrics
//! Q₊ / Q₋, numerical Levi forms and the frame maps F₊ / F₋.

mod forms;
mod levi;
mod point;

pub use forms::{frame_map, frame_vector, herm_form, quadric_residual, FormSignature};
pub use levi::{levi_min_eigenvalue, DefiningFunction};
pub use point::{Point, PointC2, PointC3, ProjPoint2};

use serde::{Deserialize, Serialize};

pub type C64 = num_complex::Complex64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Builds a complex number from its real and imaginary parts.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Thresholds, seed and sample count shared by every verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            seed: 0,
            samples: 1000,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, seed: u64, samples: usize) -> crate::Result<Self> {
        let tol = Self {
            abs_tol,
            rel_tol,
            seed,
            samples,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.samples == 0 {
            return Err(crate::Error::ParameterOutOfRange(format!(
                "tolerance requires abs_tol > 0, rel_tol > 0, samples >= 1 (got {}, {}, {})",
                self.abs_tol, self.rel_tol, self.samples
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    /// |a − b| ≤ abs_tol + rel_tol·max(|a|, |b|).
    pub fn eq_c(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.abs_tol + self.rel_tol * a.norm().max(b.norm())
    }

    pub fn eq_r(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

/// Principal logarithm that refuses arguments on (or within 1e−10 of) the
/// negative real axis.
pub(crate) fn principal_ln(x: C64, what: &str) -> crate::Result<C64> {
    check_branch(x, what)?;
    Ok(x.ln())
}

/// Principal n-th root with the same branch-cut guard as [`principal_ln`].
pub(crate) fn principal_root(x: C64, n: u32, what: &str) -> crate::Result<C64> {
    check_branch(x, what)?;
    if x == C64::new(0.0, 0.0) {
        return Ok(x);
    }
    Ok((x.ln() / n as f64).exp())
}

fn check_branch(x: C64, what: &str) -> crate::Result<()> {
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(crate::Error::DomainViolation(format!("{what} is not finite")));
    }
    if x.re < 0.0 && x.im.abs() <= 1e-10 * x.norm() {
        return Err(crate::Error::BranchCut(what.to_string()));
    }
    Ok(())
}

/// e^{2πik/n}.
pub fn root_of_unity(n: u32, k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_rejects_nonpositive_thresholds() {
        assert!(Tolerance::new(0.0, 1e-9, 0, 10).is_err());
        assert!(Tolerance::new(1e-9, 1e-9, 0, 0).is_err());
        assert!(Tolerance::new(1e-9, 1e-9, 7, 1).is_ok());
    }

    #[test]
    fn complex_equality_is_relative_for_large_values() {
        let tol = Tolerance::default();
        assert!(tol.eq_c(c(1e6, 0.0), c(1e6 + 1e-4, 0.0)));
        assert!(!tol.eq_c(c(1.0, 0.0), c(1.0 + 1e-6, 0.0)));
    }

    #[test]
    fn branch_guard() {
        assert!(matches!(
            principal_ln(c(-1.0, 0.0), "x"),
            Err(crate::Error::BranchCut(_))
        ));
        let r = principal_root(c(-1.0, 1e-3), 2, "x").unwrap();
        assert!((r * r - c(-1.0, 1e-3)).norm() < 1e-14);
    }
}
