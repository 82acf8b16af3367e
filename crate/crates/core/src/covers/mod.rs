//! Covers of the model surfaces: their deck groups, automorphism lifts,
//! factorization maps and fiber enumeration.

mod aut;
mod deck;
mod factor;
mod fiber;
mod id;

pub use aut::{cover_aut_apply, cover_aut_base, random_cover_aut, CoverAutId};
pub use deck::{
    d_prime, deck_apply, eta_odd_representative, eta_specc, f_eta, f_eta_n, f_eta_n_tracked, f_mu,
    nu_inf_flip, nu_n_flip, DeckMapId,
};
pub use factor::factorization_map;
pub use fiber::{
    algebraic_fiber, alpha_of_base, continue_lift, count_sheets, deck_orbit, invert_rossi_minus,
    invert_rossi_mu, on_total_space, sample_total_space, seed, total_space_sides, Cardinality, FiberReport,
    WitnessSource, K_MAX,
};
pub use id::CoverId;
