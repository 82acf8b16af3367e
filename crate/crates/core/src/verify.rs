//! Seeded randomized verification suites.
//!
//! Every check draws `tol.samples` samples (fixed-size checks ignore it),
//! split into shards of [`SHARD`] samples that run on the rayon pool. Shard
//! `s` of check `name` uses a ChaCha8 generator seeded with `tol.seed` on
//! stream `fnv(name) + s`, so results do not depend on scheduling or on the
//! order checks are listed in.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex_core::{frame_vector, herm_form, quadric_residual, FormSignature, Point, PointC2, PointC3, Tolerance, C64};
use crate::covers::{
    count_sheets, cover_aut_apply, cover_aut_base, deck_apply, eta_odd_representative, eta_specc,
    f_eta, f_eta_n_tracked, f_mu, random_cover_aut, sample_total_space, total_space_sides, Cardinality, CoverAutId,
    CoverId, DeckMapId,
};
use crate::groups::{phi, phi_mu, sample_group, GroupElement, GroupId};
use crate::hypersurfaces::{aut_apply, random_aut, sample_point, RegionId, SurfaceId};
use crate::report::{CheckReport, Failure, SuiteReport, MAX_LISTED_FAILURES};
use crate::rossi_maps::{classify_q_minus, cover_map, psi_eta, rossi_minus, rossi_mu, rossi_n, Branch};
use crate::{Error, Result};

pub const SHARD: usize = 64;

/// Attempts per sample when a draw hits a branch cut or guard band.
const REDRAWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Equivariance,
    Homomorphism,
    Orbits,
    Regions,
    Frames,
    Decks,
    Auts,
    Levi,
    Sheets,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 9] = [
        Suite::Homomorphism,
        Suite::Equivariance,
        Suite::Orbits,
        Suite::Regions,
        Suite::Frames,
        Suite::Decks,
        Suite::Auts,
        Suite::Levi,
        Suite::Sheets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Equivariance => "equivariance",
            Suite::Homomorphism => "homomorphism",
            Suite::Orbits => "orbits",
            Suite::Regions => "regions",
            Suite::Frames => "frames",
            Suite::Decks => "decks",
            Suite::Auts => "auts",
            Suite::Levi => "levi",
            Suite::Sheets => "sheets",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::MODULES
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|m| m.name() == s)
            .copied()
            .ok_or_else(|| Error::Descriptor(format!("unknown suite '{s}'")))
    }
}

/// One observation: the residual compared against the check's threshold and
/// optionally the quantity it was derived from.
#[derive(Debug, Clone, Copy)]
pub struct Obs {
    pub residual: f64,
    pub value: Option<f64>,
}

impl From<f64> for Obs {
    fn from(residual: f64) -> Self {
        Obs { residual, value: None }
    }
}

type Sampler<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Obs> + Sync + Send + 'a>;

pub struct Check<'a> {
    pub name: String,
    pub threshold: f64,
    pub samples: usize,
    sampler: Sampler<'a>,
}

impl<'a> Check<'a> {
    pub fn new<F, O>(name: impl Into<String>, threshold: f64, samples: usize, f: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng) -> Result<O> + Sync + Send + 'a,
        O: Into<Obs>,
    {
        Check {
            name: name.into(),
            threshold,
            samples,
            sampler: Box::new(move |rng| f(rng).map(Into::into)),
        }
    }
}

fn fnv(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The generator for shard `shard` of the check called `name`.
pub fn shard_rng(seed: u64, name: &str, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv(name).wrapping_add(shard));
    rng
}

struct ShardOut {
    max_residual: f64,
    min_value: Option<f64>,
    max_value: Option<f64>,
    failures: Vec<(usize, String)>,
}

fn fmax(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn opt(a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(f(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn run_check(check: &Check, seed: u64) -> (CheckReport, Vec<Failure>) {
    let shards = check.samples.div_ceil(SHARD);
    let outs: Vec<ShardOut> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(seed, &check.name, s as u64);
            let mut out = ShardOut { max_residual: 0.0, min_value: None, max_value: None, failures: Vec::new() };
            for i in (s * SHARD)..((s + 1) * SHARD).min(check.samples) {
                match (check.sampler)(&mut rng) {
                    Ok(o) => {
                        out.max_residual = fmax(out.max_residual, o.residual);
                        out.min_value = opt(out.min_value, o.value, f64::min);
                        out.max_value = opt(out.max_value, o.value, f64::max);
                        if !(o.residual <= check.threshold) {
                            out.failures.push((i, format!("residual {:e} exceeds {:e}", o.residual, check.threshold)));
                        }
                    }
                    Err(e) => {
                        out.max_residual = f64::INFINITY;
                        out.failures.push((i, e.to_string()));
                    }
                }
            }
            out
        })
        .collect();
    let mut rep = CheckReport {
        name: check.name.clone(),
        samples: check.samples,
        threshold: check.threshold,
        max_residual: 0.0,
        min_value: None,
        max_value: None,
        failures: 0,
        passed: true,
    };
    let mut failures = Vec::new();
    for o in outs {
        rep.max_residual = fmax(rep.max_residual, o.max_residual);
        rep.min_value = opt(rep.min_value, o.min_value, f64::min);
        rep.max_value = opt(rep.max_value, o.max_value, f64::max);
        rep.failures += o.failures.len();
        failures.extend(o.failures);
    }
    rep.passed = rep.failures == 0;
    failures.sort_by_key(|f| f.0);
    let listed = failures
        .into_iter()
        .take(MAX_LISTED_FAILURES)
        .map(|(sample, detail)| Failure { check: check.name.clone(), sample, detail })
        .collect();
    (rep, listed)
}

/// Runs checks in order and assembles the suite report.
pub fn run_checks(suite: &str, checks: &[Check], tol: &Tolerance) -> SuiteReport {
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for c in checks {
        let (r, f) = run_check(c, tol.seed);
        reports.push(r);
        failures.extend(f);
    }
    SuiteReport::new(suite, tol, reports, failures)
}

pub fn run_suite(suite: Suite, tol: &Tolerance) -> Result<SuiteReport> {
    tol.validate()?;
    if suite == Suite::All {
        let parts = Suite::MODULES
            .iter()
            .map(|s| run_suite(*s, tol))
            .collect::<Result<Vec<_>>>()?;
        return Ok(SuiteReport::merge("all", tol, parts));
    }
    let checks = match suite {
        Suite::Homomorphism => homomorphism_checks(tol),
        Suite::Equivariance => equivariance_checks(tol),
        Suite::Orbits => orbit_checks(tol),
        Suite::Regions => region_checks(tol),
        Suite::Frames => frame_checks(tol),
        Suite::Decks => deck_checks(tol),
        Suite::Auts => aut_checks(tol),
        Suite::Levi => levi_checks(tol),
        Suite::Sheets => sheet_checks(tol),
        Suite::All => unreachable!(),
    };
    Ok(run_checks(suite.name(), &checks, tol))
}

// ---- samplers shared by the suites -------------------------------------------

fn gaussian_c2(rng: &mut ChaCha8Rng) -> PointC2 {
    let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    PointC2::from_reals(g[0], g[1], g[2], g[3])
}

/// A point of Ω^> = {|z| > |w|} away from the null cone: an SU₁,₁ image of (r, 0).
fn omega_gt(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Result<(f64, PointC2)> {
    let r = rng.gen_range(lo..hi);
    let g = sample_group(GroupId::SU11, rng, 1.0)?;
    Ok((r, g.act_c2(PointC2::from_reals(r, 0.0, 0.0, 0.0))?))
}

/// Retries a draw that may land on a branch cut or guard band.
fn redraw<T>(rng: &mut ChaCha8Rng, mut f: impl FnMut(&mut ChaCha8Rng) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..REDRAWS {
        match f(rng) {
            Ok(v) => return Ok(v),
            Err(e @ (Error::BranchCut(_) | Error::PoleHit(_) | Error::ZeroZ(_) | Error::NullConeExcluded(_))) => {
                last = Some(e)
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("REDRAWS > 0"))
}

fn c3_dist(a: PointC3, b: PointC3) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn mat_dist(a: &GroupElement, b: &GroupElement) -> f64 {
    a.matrix.dist(&b.matrix)
}

// ---- suites ----------------------------------------------------------------

fn homomorphism_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let pair = |id: GroupId, f: fn(&GroupElement) -> Result<GroupElement>| {
        move |rng: &mut ChaCha8Rng| -> Result<f64> {
            let g = sample_group(id, rng, 1.0)?;
            let h = sample_group(id, rng, 1.0)?;
            Ok(mat_dist(&f(&g.mul(&h)?)?, &f(&g)?.mul(&f(&h)?)?))
        }
    };
    let cert = |id: GroupId, f: fn(&GroupElement) -> Result<GroupElement>| {
        move |rng: &mut ChaCha8Rng| -> Result<f64> { Ok(f(&sample_group(id, rng, 1.0)?)?.invariant_residual()) }
    };
    vec![
        Check::new("phi_mu_multiplicative", 1e-9, n, pair(GroupId::SU2, phi_mu)),
        Check::new("phi_multiplicative", 1e-9, n, pair(GroupId::SU11, phi)),
        Check::new("phi_mu_so3_certificate", 1e-10, n, cert(GroupId::SU2, phi_mu)),
        Check::new("phi_so21c_certificate", 1e-10, n, cert(GroupId::SU11, phi)),
    ]
}

fn equivariance_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let mut checks = vec![
        Check::new("rossi_mu", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let g = sample_group(GroupId::SU2, rng, 2.0)?;
            let p = gaussian_c2(rng);
            Ok(c3_dist(rossi_mu(g.act_c2(p)?)?, phi_mu(&g)?.act_c3(rossi_mu(p)?)?))
        }),
        Check::new("rossi_minus", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let (_, p) = omega_gt(rng, 0.2, 2.0)?;
            let g = sample_group(GroupId::SU11, rng, 1.0)?;
            Ok(c3_dist(rossi_minus(g.act_c2(p)?)?, phi(&g)?.act_c3(rossi_minus(p)?)?))
        }),
    ];
    for m in 2..=5u32 {
        for branch in [Branch::Nu, Branch::Eta] {
            let name = format!("rossi_n_lifted[n={m},{}]", if branch == Branch::Nu { "nu" } else { "eta" });
            checks.push(Check::new(name, 1e-9, n, move |rng: &mut ChaCha8Rng| -> Result<f64> {
                redraw(rng, |rng| {
                    let (cover, alpha) = match branch {
                        Branch::Nu => (CoverId::NuN(m), rng.gen_range(-0.9..0.9)),
                        Branch::Eta => (CoverId::Eta2N(m), rng.gen_range(1.1..5.0)),
                    };
                    let p = sample_total_space(cover, alpha, rng)?.as_c2()?;
                    let g = sample_group(GroupId::SU11, rng, 1.0)?;
                    let (a, b) = g.ab()?;
                    let k = rng.gen_range(0..m as i64);
                    // the identity-component lift with a random root branch
                    let lift = match branch {
                        Branch::Nu => CoverAutId::NuN { n: m, a, b, branch: k, discrete: 0 },
                        Branch::Eta => CoverAutId::Eta2N { n: m, a, b, branch: k, discrete: 0 },
                    };
                    let q = cover_aut_apply(&lift, &Point::C2(p))?.as_c2()?;
                    let lhs = rossi_n(m, q, Some(branch))?;
                    let rhs = phi(&g)?.act_c3(rossi_n(m, p, Some(branch))?)?;
                    Ok(c3_dist(lhs, rhs))
                })
            }));
        }
    }
    checks
}

fn orbit_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let minus_norm = |lo: f64, hi: f64| {
        move |rng: &mut ChaCha8Rng| -> Result<f64> {
            let (r, p) = omega_gt(rng, lo, hi)?;
            let z = rossi_minus(p)?;
            Ok((herm_form(FormSignature::Minus, z, z).re - (2.0 * r.powi(4) - 1.0)).abs())
        }
    };
    vec![
        Check::new("base_point_anchors", 1e-14, 1, |_: &mut ChaCha8Rng| -> Result<f64> {
            let e = PointC2::from_reals(1.0, 0.0, 0.0, 0.0);
            let c = |re, im| C64::new(re, im);
            let mu = c3_dist(rossi_mu(e)?, PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0)));
            let minus = c3_dist(rossi_minus(e)?, PointC3::new(c(0.0, -1.0), c(1.0, 0.0), c(0.0, -1.0)));
            Ok(mu.max(minus))
        }),
        Check::new("mu_orbit_norm", 1e-10, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let r = rng.gen_range(0.2..2.0);
            let g = sample_group(GroupId::SU2, rng, 2.0)?;
            let z = rossi_mu(g.act_c2(PointC2::from_reals(r, 0.0, 0.0, 0.0))?)?;
            Ok((z.norm_sqr() - (2.0 * r.powi(4) + 1.0)).abs())
        }),
        Check::new("nu_orbit_norm", 1e-10, n, minus_norm(0.2, 0.99)),
        Check::new("eta_orbit_norm", 1e-10, n, minus_norm(1.01, 2.0)),
    ]
}

fn region_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let tol = *tol;
    let pushed = move |cover: CoverId, lo: f64, hi: f64, want: RegionId| {
        move |rng: &mut ChaCha8Rng| -> Result<f64> {
            let p = sample_total_space(cover, rng.gen_range(lo..hi), rng)?.as_c2()?;
            let got = classify_q_minus(rossi_minus(p)?, &tol)?.region;
            if got == Some(want) {
                Ok(0.0)
            } else {
                Err(Error::DomainViolation(format!("classified as {got:?}, expected {want:?}")))
            }
        }
    };
    vec![
        Check::new("omega_nu_to_sigma_nu", 0.0, n, pushed(CoverId::NuN(2), -0.95, 0.95, RegionId::SigmaNu)),
        Check::new("omega_eta_to_sigma_eta", 0.0, n, pushed(CoverId::Eta2N(2), 1.05, 6.0, RegionId::SigmaEta)),
        Check::new("hand_points", 0.0, n, move |rng: &mut ChaCha8Rng| -> Result<f64> {
            // O1 = iℝ³ ∩ Q₋: x₃² − x₁² − x₂² = 1; O2 = ℝ³ ∩ Q₋: x₁² + x₂² − x₃² = 1
            let (a, b): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let th: f64 = rng.gen_range(-3.2..3.2);
            let h = (1.0 + a * a + b * b).sqrt();
            let sgn = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let o1 = PointC3::new(C64::new(0.0, a), C64::new(0.0, b), C64::new(0.0, sgn * h));
            let rr = (1.0 + a * a).sqrt();
            let o2 = PointC3::new(C64::new(rr * th.cos(), 0.0), C64::new(rr * th.sin(), 0.0), C64::new(a, 0.0));
            for (p, want) in [(o1, RegionId::O1), (o2, RegionId::O2)] {
                let got = classify_q_minus(p, &tol)?.region;
                if got != Some(want) {
                    return Err(Error::DomainViolation(format!("{p:?} classified as {got:?}, expected {want:?}")));
                }
            }
            Ok(0.0)
        }),
    ]
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Residual of the frame-map postconditions at ζ; a wrong determinant sign
/// is reported as an infinite residual.
pub fn frame_residual(sig: FormSignature, zeta: PointC3) -> Result<f64> {
    let xi = frame_vector(sig, zeta)?;
    let xi3 = PointC3::from_re_im(xi, [0.0; 3]);
    let s = sig.sign();
    let unit = (herm_form(sig, xi3, xi3).re - s).abs();
    let orth = herm_form(sig, xi3, zeta).norm() / (1.0 + zeta.norm_sqr().sqrt());
    let k = match sig {
        FormSignature::Plus => C64::new(1.0, 0.0),
        FormSignature::Minus => C64::new(0.0, 1.0),
    };
    let f = zeta.add(xi3.scale(k));
    let quad = quadric_residual(sig, f).norm() / (1.0 + f.norm_sqr());
    let det = det3(xi, zeta.re(), zeta.im());
    if !(det * s > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(unit.max(orth).max(quad))
}

fn frame_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    vec![
        Check::new("frame_plus", 1e-10, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let p = gaussian_c2(rng);
            let (z2, w2) = (p.z * p.z, p.w * p.w);
            let zeta = PointC3::new(C64::new(0.0, -1.0) * (z2 + w2), z2 - w2, 2.0 * p.z * p.w);
            frame_residual(FormSignature::Plus, zeta)
        }),
        Check::new("frame_minus", 1e-10, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let (_, p) = omega_gt(rng, 0.2, 2.0)?;
            let (z2, w2) = (p.z * p.z, p.w * p.w);
            let i = C64::new(0.0, 1.0);
            let zeta = PointC3::new(i * (z2 + w2), z2 - w2, 2.0 * i * p.z * p.w);
            frame_residual(FormSignature::Minus, zeta)
        }),
    ]
}

/// Covers exercised by the deck, automorphism and sheet suites, with a
/// sampling range for α.
pub fn cover_cases() -> Vec<(CoverId, f64, f64)> {
    let mut v = vec![
        (CoverId::Mu2, 1.5, 6.0),
        (CoverId::Mu4, 1.5, 6.0),
        (CoverId::NuInf, -0.9, 0.9),
        (CoverId::Eta2, 1.2, 6.0),
        (CoverId::EtaInf, 1.2, 6.0),
        (CoverId::ChiInf, 0.0, 0.0),
    ];
    v.extend((2..=7).map(|n| (CoverId::NuN(n), -0.9, 0.9)));
    v.extend((2..=3).map(|n| (CoverId::Eta2N(n), 1.2, 6.0)));
    v.extend([1, 3, 5].map(|n| (CoverId::EtaOdd(n), 1.2, 6.0)));
    v.extend((1..=5).map(|n| (CoverId::ChiN(n), 0.0, 0.0)));
    v
}

fn draw_alpha(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// The deck generators checked for each cover.
pub fn deck_generators(cover: CoverId) -> Vec<DeckMapId> {
    match cover {
        CoverId::Mu4 => vec![DeckMapId::FMu],
        CoverId::Mu2 | CoverId::Eta2 => vec![DeckMapId::MinusMinus],
        CoverId::NuN(n) => vec![DeckMapId::RootOfUnity { n, k: 1 }],
        CoverId::Eta2N(n) => vec![DeckMapId::RootOfUnity { n, k: 1 }, DeckMapId::DPrime { n }],
        CoverId::EtaOdd(n) => vec![DeckMapId::RootOfUnity { n: 2 * n, k: 1 }, DeckMapId::FEtaN { n }],
        CoverId::NuInf => vec![DeckMapId::ShiftPiK { k: 1 }, DeckMapId::ShiftPiK { k: -3 }],
        CoverId::EtaInf => vec![DeckMapId::ShiftPiK { k: 1 }, DeckMapId::FEta],
        CoverId::ChiN(n) => vec![DeckMapId::ChiRotation { n, k: 1 }],
        CoverId::ChiInf => vec![DeckMapId::ChiShift { k: 1 }, DeckMapId::ChiShift { k: -2 }],
    }
}

fn rel_dist(a: &Point, b: &Point) -> Result<f64> {
    let d = a.dist(b).ok_or(Error::AmbientMismatch { expected: "matching ambients" })?;
    Ok(d / (1.0 + b.magnitude()))
}

fn deck_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let t = *tol;
    let mut checks = vec![
        Check::new("f_mu_order_four", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            let p = gaussian_c2(rng);
            let mut orbit = vec![p];
            for _ in 0..4 {
                orbit.push(f_mu(*orbit.last().expect("nonempty"))?);
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if orbit[i].dist(orbit[j]) <= 1e-6 * (1.0 + p.norm()) {
                        return Err(Error::DomainViolation(format!("f_mu orbit repeats at steps {i}, {j}")));
                    }
                }
            }
            Ok(orbit[4].dist(p))
        }),
        Check::new("f_eta_square_fixes_t", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let a = rng.gen_range(1.2..6.0);
                let p = sample_total_space(CoverId::EtaInf, a, rng)?.as_c2()?;
                Ok((f_eta(f_eta(p)?)?.w - p.w).norm())
            })
        }),
        Check::new("f_eta_square_odd_shift", 1e-6, n, |rng: &mut ChaCha8Rng| -> Result<Obs> {
            redraw(rng, |rng| {
                let a = rng.gen_range(1.2..6.0);
                let p = sample_total_space(CoverId::EtaInf, a, rng)?.as_c2()?;
                let k = (f_eta(f_eta(p)?)?.z - p.z) / C64::new(0.0, std::f64::consts::PI);
                let kr = k.re.round();
                if (kr as i64).rem_euclid(2) != 1 {
                    return Err(Error::DomainViolation(format!("shift index {kr} is even")));
                }
                Ok(Obs { residual: (k - kr).norm(), value: Some(kr) })
            })
        }),
        Check::new("f_eta_commutes_with_shifts", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let a = rng.gen_range(1.2..6.0);
                let p = Point::C2(sample_total_space(CoverId::EtaInf, a, rng)?.as_c2()?);
                let g = DeckMapId::ShiftPiK { k: rng.gen_range(-5..=5) };
                let lhs = deck_apply(DeckMapId::FEta, &deck_apply(g, &p)?)?;
                let rhs = deck_apply(g, &deck_apply(DeckMapId::FEta, &p)?)?;
                rel_dist(&lhs, &rhs)
            })
        }),
        Check::new("specc_square_is_minus", 1e-9, n, |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let a = rng.gen_range(1.2..6.0);
                let p = sample_total_space(CoverId::Eta2N(2), a, rng)?.as_c2()?;
                Ok(eta_specc(eta_specc(p)?)?.dist(p.neg()) / (1.0 + p.norm()))
            })
        }),
    ];
    for odd in [1u32, 3, 5] {
        checks.push(Check::new(format!("f_eta_n_order_four[n={odd}]"), 1e-8, n, move |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let a = rng.gen_range(1.2..6.0);
                let p = sample_total_space(CoverId::EtaOdd(odd), a, rng)?.as_c2()?;
                let mut orbit = vec![p];
                for _ in 0..4 {
                    orbit.push(f_eta_n_tracked(odd, *orbit.last().expect("nonempty"))?);
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        if orbit[i].dist(orbit[j]) <= 1e-6 {
                            return Err(Error::DomainViolation("f_eta_n orbit has fewer than 4 points".into()));
                        }
                    }
                }
                // the class is well defined on the base
                let img = |q: PointC2| -> Result<PointC2> { psi_eta(rossi_n(2 * odd, q, Some(Branch::Eta))?, &t) };
                let b = img(p)?;
                let mut r = orbit[4].dist(p) / (1.0 + p.norm());
                for q in &orbit[1..4] {
                    r = r.max(img(*q)?.dist(b) / (1.0 + b.norm()));
                    r = r.max(eta_odd_representative(odd, *q)?.dist(eta_odd_representative(odd, p)?));
                }
                Ok(r)
            })
        }));
    }
    for (cover, lo, hi) in cover_cases() {
        for d in deck_generators(cover) {
            let name = format!("deck_property[{cover},{}]", deck_label(d));
            checks.push(Check::new(name, 1e-9, n.min(500).max(n / 2), move |rng: &mut ChaCha8Rng| -> Result<f64> {
                redraw(rng, |rng| {
                    let p = sample_total_space(cover, draw_alpha(rng, lo, hi), rng)?;
                    let q = deck_apply(d, &p)?;
                    rel_dist(&cover_map(cover, &q, &t)?, &cover_map(cover, &p, &t)?)
                })
            }));
        }
    }
    checks
}

fn deck_label(d: DeckMapId) -> String {
    match d {
        DeckMapId::FMu => "FMu".into(),
        DeckMapId::ShiftPiK { k } => format!("ShiftPiK({k})"),
        DeckMapId::FEta => "FEta".into(),
        DeckMapId::FEtaN { n } => format!("FEtaN({n})"),
        DeckMapId::ChiShift { k } => format!("ChiShift({k})"),
        DeckMapId::MinusMinus => "MinusMinus".into(),
        DeckMapId::RootOfUnity { n, k } => format!("RootOfUnity({n},{k})"),
        DeckMapId::ChiRotation { n, k } => format!("ChiRotation({n},{k})"),
        DeckMapId::DPrime { n } => format!("DPrime({n})"),
    }
}

/// Surfaces whose automorphism families are checked.
pub fn surface_cases() -> Vec<SurfaceId> {
    vec![
        SurfaceId::S3,
        SurfaceId::Lens { m: 3 },
        SurfaceId::Sigma,
        SurfaceId::SigmaPlus,
        SurfaceId::Epsilon { alpha: 2.0 },
        SurfaceId::Epsilon { alpha: 0.7 },
        SurfaceId::Omega,
        SurfaceId::Delta,
        SurfaceId::Nu { alpha: 0.5 },
        SurfaceId::Nu { alpha: -0.4 },
        SurfaceId::Tau { alpha: 1.5 },
        SurfaceId::Tau { alpha: -2.0 },
        SurfaceId::Xi,
        SurfaceId::Chi,
        SurfaceId::Rho { alpha: 0.3 },
        SurfaceId::Mu { alpha: 3.0 },
        SurfaceId::Eta { alpha: 3.0 },
    ]
}

pub fn surface_label(s: &SurfaceId) -> String {
    match s {
        SurfaceId::Lens { m } => format!("lens({m})"),
        SurfaceId::Epsilon { alpha }
        | SurfaceId::Nu { alpha }
        | SurfaceId::Tau { alpha }
        | SurfaceId::Rho { alpha }
        | SurfaceId::Mu { alpha }
        | SurfaceId::Eta { alpha } => format!("{}({alpha})", s.name()),
        _ => s.name().to_string(),
    }
}

/// Relative mismatch of the total-space equation at `p`.
fn total_space_residual(cover: CoverId, alpha: f64, p: &Point, tol: &Tolerance) -> Result<f64> {
    let (l, r) = total_space_sides(cover, alpha, p)?;
    let mut res = (l - r).abs() / (1.0 + l.abs().max(r.abs()));
    match cover {
        CoverId::Mu2 => {
            let z = p.as_c3()?;
            let q = (z.z1 * z.z1 + z.z2 * z.z2 + z.z3 * z.z3 - 1.0).norm();
            res = res.max(q / (1.0 + z.norm_sqr()));
        }
        CoverId::Eta2 => {
            let z = p.as_c3()?;
            res = res.max(quadric_residual(FormSignature::Minus, z).norm() / (1.0 + z.norm_sqr()));
            if !RegionId::SigmaEta.contains(p, tol)? {
                return Err(Error::NotInSigmaEta);
            }
        }
        _ => {}
    }
    Ok(res)
}

fn aut_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let t = *tol;
    let mut checks = Vec::new();
    for s in surface_cases() {
        checks.push(Check::new(format!("surface_aut[{}]", surface_label(&s)), 1e-8, n, move |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let p = sample_point(&s, rng, &t)?;
                let a = random_aut(&s, rng)?;
                let q = aut_apply(&a, &p, &t)?;
                let m = s.membership(&q, &t)?;
                if !m.is_on() {
                    return Err(Error::NotOnSurface(m.residual));
                }
                Ok(m.residual)
            })
        }));
    }
    for (cover, lo, hi) in cover_cases() {
        checks.push(Check::new(format!("cover_aut[{cover}]"), 1e-8, n, move |rng: &mut ChaCha8Rng| -> Result<f64> {
            redraw(rng, |rng| {
                let alpha = draw_alpha(rng, lo, hi);
                let p = sample_total_space(cover, alpha, rng)?;
                let a = random_cover_aut(cover, rng)?;
                let q = cover_aut_apply(&a, &p)?;
                let on = total_space_residual(cover, alpha, &q, &t)?;
                let lhs = cover_map(cover, &q, &t)?;
                let rhs = cover_aut_base(&a, &cover_map(cover, &p, &t)?, &t)?;
                Ok(on.max(rel_dist(&lhs, &rhs)?))
            })
        }));
    }
    checks
}

fn levi_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let n = tol.samples;
    let t = *tol;
    let surfaces = [
        SurfaceId::Chi,
        SurfaceId::Sigma,
        SurfaceId::Delta,
        SurfaceId::Omega,
        SurfaceId::Epsilon { alpha: 2.0 },
        SurfaceId::Mu { alpha: 3.0 },
        SurfaceId::Nu { alpha: 0.5 },
        SurfaceId::Eta { alpha: 3.0 },
    ];
    let mut checks: Vec<Check<'static>> = surfaces
        .into_iter()
        .map(|s| {
            Check::new(format!("levi_positive[{}]", surface_label(&s)), 0.0, n, move |rng: &mut ChaCha8Rng| -> Result<Obs> {
                let p = sample_point(&s, rng, &t)?;
                let l = s.levi(&p, &t)?;
                Ok(Obs { residual: if l > 0.0 { 0.0 } else { 1.0 - l }, value: Some(l) })
            })
        })
        .collect();
    checks.push(Check::new("levi_chi_value", 1e-6, n, move |rng: &mut ChaCha8Rng| -> Result<Obs> {
        let p = sample_point(&SurfaceId::Chi, rng, &t)?;
        let l = SurfaceId::Chi.levi(&p, &t)?;
        Ok(Obs { residual: (l - 0.5).abs(), value: Some(l) })
    }));
    checks
}

/// Expected sheet count of a cover over a generic base point: the number of
/// f^η_n classes for odd η quotients, INFINITE for ∞ covers.
pub fn expected_sheets(cover: CoverId) -> Cardinality {
    match cover {
        CoverId::EtaOdd(n) => Cardinality::Finite(n as usize),
        c => match c.sheets() {
            Some(k) => Cardinality::Finite(k as usize),
            None => Cardinality::Infinite,
        },
    }
}

fn sheet_checks(tol: &Tolerance) -> Vec<Check<'static>> {
    let t = *tol;
    let samples = (tol.samples / 100).clamp(1, 10);
    cover_cases()
        .into_iter()
        .map(|(cover, lo, hi)| {
            Check::new(format!("sheets[{cover}]"), 1e-9, samples, move |rng: &mut ChaCha8Rng| -> Result<Obs> {
                let alpha = draw_alpha(rng, lo, hi);
                let base = cover_map(cover, &sample_total_space(cover, alpha, rng)?, &t)?;
                let r = count_sheets(cover, &base, None, &t)?;
                if r.cardinality != expected_sheets(cover) {
                    return Err(Error::DomainViolation(format!(
                        "found {:?} sheets, expected {:?}",
                        r.cardinality,
                        expected_sheets(cover)
                    )));
                }
                if let Some(sizes) = &r.class_sizes {
                    if sizes.iter().any(|&k| k != 4) {
                        return Err(Error::DomainViolation(format!("class sizes {sizes:?}")));
                    }
                }
                let value = match r.cardinality {
                    Cardinality::Finite(k) => k as f64,
                    Cardinality::Infinite => f64::INFINITY,
                };
                Ok(Obs { residual: r.residual_max / (1.0 + base.magnitude()), value: Some(value) })
            })
        })
        .collect()
}

