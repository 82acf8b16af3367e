//! Explicit covering maps, deck transformations and automorphism actions for
//! the homogeneous strongly pseudoconvex hypersurfaces of Cartan's list, with
//! randomized numerical verification of the identities that tie them together.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex_core`]: points of ℂ², ℂ³ and ℂℙ², the Hermitian forms ⟨·,·⟩₊ and
//!   ⟨·,·⟩₋, the quadrics Q₊ / Q₋, numerical Levi forms and the frame maps F₊ / F₋.
//! * [`groups`]: SU₂, SU₁,₁, SU₂,₁, SO₃(ℝ) and SO₂,₁(ℝ)ᶜ, their covering
//!   homomorphisms and the fractional-linear actions on ℂ².
//! * [`hypersurfaces`]: the model surfaces, the auxiliary regions of ℂ² and ℂ³, and
//!   every automorphism family acting on them.
//! * [`rossi_maps`]: Rossi's map and its SU₁,₁ analogues together with the
//!   projections and exponential charts that build the covers.
//! * [`covers`]: deck groups, cover automorphisms, factorization maps and
//!   fiber enumeration.
//! * [`verify`]: seeded verification suites used by the CLI and the
//!   acceptance tests.

pub mod complex_core;
pub mod covers;
pub mod error;
pub mod groups;
pub mod hypersurfaces;
pub mod report;
pub mod rossi_maps;
pub mod verify;

pub use complex_core::{FormSignature, Point, PointC2, PointC3, ProjPoint2, Tolerance, C64};
pub use error::{Error, Result};

/// Version tag embedded in every JSON document.
pub const SCHEMA: &str = "cr-atlas/1";
