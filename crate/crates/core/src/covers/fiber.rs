use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Serialize, Serializer};

use super::deck::{d_prime_b, eta_odd_representative, f_mu};
use super::CoverId;
use crate::complex_core::{root_of_unity, Point, PointC2, PointC3, Tolerance, C64, I};
use crate::hypersurfaces::{r_of_alpha, OrbitFamily, RegionId};
use crate::rossi_maps::{cover_map, level_n, lift_psi_eta, lift_psi_mu, rossi_minus, rossi_mu};
use crate::{Error, Result};

/// Number of distinct shift images after which a cover is reported infinite.
pub const K_MAX: usize = 64;

/// Points closer than this (relative) are the same fiber point.
const SEPARATION: f64 = 1e-6;

/// Sheet count of a fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cardinality::Finite(n) => s.serialize_u64(*n as u64),
            Cardinality::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

/// How the first fiber point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessSource {
    Given,
    Continuation,
    Algebraic,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberReport {
    pub cover: CoverId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub base: Point,
    pub cardinality: Cardinality,
    pub residual_max: f64,
    pub min_pairwise_sep: f64,
    pub max_pairwise_sep: f64,
    pub witness_source: WitnessSource,
    /// Sizes of the f^η_n classes, for odd η covers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_sizes: Option<Vec<usize>>,
    pub witnesses: Vec<Point>,
    pub residuals: Vec<f64>,
}

/// The α of the base surface through `base` (`None` for χ).
pub fn alpha_of_base(cover: CoverId, base: &Point) -> Result<Option<f64>> {
    let one = C64::new(1.0, 0.0);
    Ok(match cover.family() {
        "chi" => None,
        "mu" => {
            let [a, b, c] = base.as_p2()?.coords();
            Some((a.norm_sqr() + b.norm_sqr() + c.norm_sqr()) / (a * a + b * b + c * c).norm())
        }
        "nu" => {
            let p = base.as_c2()?;
            Some((p.norm_sqr() - 1.0) / (p.z * p.z + p.w * p.w - one).norm())
        }
        _ => {
            let p = base.as_c2()?;
            Some((1.0 + p.z.norm_sqr() - p.w.norm_sqr()) / (one + p.z * p.z - p.w * p.w).norm())
        }
    })
}

/// Defining equation of the cover's total space as (lhs, rhs).
pub fn total_space_sides(cover: CoverId, alpha: f64, p: &Point) -> Result<(f64, f64)> {
    cover.validate()?;
    let level = || ((alpha + 1.0) / 2.0).sqrt();
    Ok(match cover {
        CoverId::ChiInf => (p.as_c2()?.z.re, 0.0),
        CoverId::ChiN(_) => {
            let q = p.as_c2()?;
            (q.z.re * q.z.re + q.w.re * q.w.re, 1.0)
        }
        CoverId::Mu4 => (p.as_c2()?.norm_sqr(), ((alpha - 1.0) / 2.0).sqrt()),
        CoverId::Mu2 => (p.as_c3()?.norm_sqr(), alpha),
        CoverId::NuN(n) | CoverId::Eta2N(n) => (level_n(n, p.as_c2()?), level()),
        CoverId::EtaOdd(n) => (level_n(2 * n, p.as_c2()?), level()),
        CoverId::Eta2 => {
            let z = p.as_c3()?;
            (z.z1.norm_sqr() + z.z2.norm_sqr() - z.z3.norm_sqr(), alpha)
        }
        CoverId::NuInf | CoverId::EtaInf => {
            let q = p.as_c2()?;
            (level() * (-2.0 * q.z.re).exp() + q.w.norm_sqr(), 1.0)
        }
    })
}

/// Whether `p` lies on the cover's total space over the surface with this α.
/// The C³ total spaces also require the quadric and the Σ^η side.
pub fn on_total_space(cover: CoverId, alpha: f64, p: &Point, tol: &Tolerance) -> Result<bool> {
    let (lhs, rhs) = total_space_sides(cover, alpha, p)?;
    if !tol.eq_r(lhs, rhs) {
        return Ok(false);
    }
    Ok(match cover {
        CoverId::Mu2 => {
            let z = p.as_c3()?;
            let q = z.z1 * z.z1 + z.z2 * z.z2 + z.z3 * z.z3 - 1.0;
            q.norm() <= tol.abs_tol * (1.0 + z.norm_sqr())
        }
        CoverId::Eta2 => RegionId::SigmaEta.contains(p, tol)?,
        _ => true,
    })
}

/// The canonical seed of the total space and its image.
pub fn seed(cover: CoverId, alpha: Option<f64>) -> Result<Point> {
    cover.validate()?;
    let need = || alpha.ok_or_else(|| Error::ParameterOutOfRange("this cover needs alpha".into()));
    let c2 = |x: f64| Point::C2(PointC2::from_reals(x, 0.0, 0.0, 0.0));
    Ok(match cover {
        CoverId::ChiInf => c2(0.0),
        CoverId::ChiN(_) => c2(1.0),
        CoverId::Mu4 => c2(r_of_alpha(OrbitFamily::Mu, need()?)?),
        CoverId::Mu2 => Point::C3(rossi_mu(PointC2::from_reals(r_of_alpha(OrbitFamily::Mu, need()?)?, 0.0, 0.0, 0.0))?),
        CoverId::NuN(n) => c2(r_of_alpha(OrbitFamily::Nu, need()?)?.powf(2.0 / n as f64)),
        CoverId::Eta2N(n) => c2(r_of_alpha(OrbitFamily::Eta, need()?)?.powf(2.0 / n as f64)),
        CoverId::EtaOdd(n) => c2(r_of_alpha(OrbitFamily::Eta, need()?)?.powf(1.0 / n as f64)),
        CoverId::Eta2 => Point::C3(rossi_minus(PointC2::from_reals(r_of_alpha(OrbitFamily::Eta, need()?)?, 0.0, 0.0, 0.0))?),
        CoverId::NuInf => c2(r_of_alpha(OrbitFamily::Nu, need()?)?.ln()),
        CoverId::EtaInf => c2(r_of_alpha(OrbitFamily::Eta, need()?)?.ln()),
    })
}

// ---- algebraic inversion ----------------------------------------------------

fn real3(v: [f64; 3]) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Real solutions ξ of ξ·u = c₁, ξ·v = c₂, ξ·Gξ = c₃ (G diagonal).
fn line_conic(u: Vector3<f64>, v: Vector3<f64>, c: [f64; 3], g: [f64; 3]) -> Vec<Vector3<f64>> {
    let d = u.cross(&v);
    let (uu, uv, vv) = (u.dot(&u), u.dot(&v), v.dot(&v));
    let det = uu * vv - uv * uv;
    if !(det.abs() > 1e-14 * (uu * vv).max(1e-300)) {
        return Vec::new();
    }
    let al = (c[0] * vv - c[1] * uv) / det;
    let be = (c[1] * uu - c[0] * uv) / det;
    let x0 = u * al + v * be;
    let form = |a: &Vector3<f64>, b: &Vector3<f64>| g[0] * a[0] * b[0] + g[1] * a[1] * b[1] + g[2] * a[2] * b[2];
    let (qa, qb, qc) = (form(&d, &d), 2.0 * form(&x0, &d), form(&x0, &x0) - c[2]);
    if qa.abs() < 1e-300 {
        return if qb.abs() > 1e-300 { vec![x0 - d * (qc / qb)] } else { Vec::new() };
    }
    let disc = qb * qb - 4.0 * qa * qc;
    let scale = qb * qb + (4.0 * qa * qc).abs();
    let disc = if disc < 0.0 && disc > -1e-10 * scale { 0.0 } else { disc };
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    vec![x0 + d * ((-qb + sq) / (2.0 * qa)), x0 + d * ((-qb - sq) / (2.0 * qa))]
}

fn close(a: PointC3, b: PointC3) -> bool {
    a.dist(b) <= 1e-7 * (1.0 + b.norm_sqr())
}

/// All (z, w) ∈ Ω with Φ(z, w) = Z, from Z = ζ + iξ with ζ J-null and ξ real,
/// ZJξ = −i and ξJξ = −1.
pub fn invert_rossi_minus(z: PointC3) -> Vec<PointC2> {
    let (a, b) = (real3(z.re()), real3(z.im()));
    let j = Vector3::new(1.0, 1.0, -1.0);
    let mut out = Vec::new();
    for xi in line_conic(a.component_mul(&j), b.component_mul(&j), [0.0, -1.0, -1.0], [1.0, 1.0, -1.0]) {
        let zeta = [z.z1 - I * xi[0], z.z2 - I * xi[1], z.z3 - I * xi[2]];
        let z2 = (I * zeta[0] + zeta[1]) / 2.0;
        let zz = z2.sqrt();
        if zz.norm() < 1e-12 {
            continue;
        }
        let ww = I * zeta[2] / (2.0 * zz);
        let p = PointC2::new(zz, ww);
        if rossi_minus(p).map(|img| close(img, z)).unwrap_or(false) {
            out.push(p);
            out.push(p.neg());
        }
    }
    dedup(out)
}

/// All (z, w) with Φ^μ(z, w) = Z, from Z = ζ + ξ with ζ null and ξ a real unit
/// vector, Z·ξ = 1.
pub fn invert_rossi_mu(z: PointC3) -> Vec<PointC2> {
    let (a, b) = (real3(z.re()), real3(z.im()));
    let mut out = Vec::new();
    for xi in line_conic(a, b, [1.0, 0.0, 1.0], [1.0, 1.0, 1.0]) {
        let zeta = [z.z1 - xi[0], z.z2 - xi[1], z.z3 - xi[2]];
        let z2 = (I * zeta[0] + zeta[1]) / 2.0;
        let zz = z2.sqrt();
        let p = if zz.norm() > 1e-12 {
            PointC2::new(zz, zeta[2] / (2.0 * zz))
        } else {
            // z = 0: then w² = iζ₁ − z² ... recovered from ζ₁ = −iw²
            PointC2::new(C64::new(0.0, 0.0), (I * zeta[0]).sqrt())
        };
        if rossi_mu(p).map(|img| close(img, z)).unwrap_or(false) {
            out.push(p);
            out.push(p.neg());
        }
    }
    dedup(out)
}

fn dedup<T: Copy + Into<Point>>(v: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for p in v {
        let pp: Point = p.into();
        if !out.iter().any(|q| {
            let qq: Point = (*q).into();
            qq.dist(&pp).map_or(false, |d| d <= SEPARATION * (1.0 + pp.magnitude()))
        }) {
            out.push(p);
        }
    }
    out
}

fn lift_psi_nu(b: PointC2) -> Result<[PointC3; 2]> {
    let q = b.z * b.z + b.w * b.w - 1.0;
    if q.norm() <= 1e-12 {
        return Err(Error::DomainViolation("z^2 + w^2 - 1 vanishes".into()));
    }
    let z3 = C64::new(1.0, 0.0) / q.sqrt();
    let p = PointC3::new(z3 * b.z, z3 * b.w, z3);
    Ok([p, p.neg()])
}

/// Preimages of Z under Φ_n inside the given branch: (ẑ, ŵ) = Φ⁻¹(Z), then
/// z runs over the n-th roots of ẑ² and w = z·ŵ/ẑ.
fn invert_rossi_n(n: u32, z: PointC3, nu: bool) -> Vec<PointC2> {
    let mut out = Vec::new();
    for hat in invert_rossi_minus(z) {
        let t = hat.w / hat.z;
        let z2 = hat.z * hat.z;
        let base = (z2.ln() / n as f64).exp();
        for k in 0..n {
            let zz = base * root_of_unity(n, k as i64);
            let p = PointC2::new(zz, zz * t);
            let level = level_n(n, p);
            let ok = if nu { level > 0.0 && level < 1.0 } else { level > 1.0 };
            if ok {
                out.push(p);
            }
        }
    }
    dedup(out)
}

/// Every preimage of `base` under the cover map. For ∞ covers only the
/// representatives with Im s ∈ (−π, π] are returned.
pub fn algebraic_fiber(cover: CoverId, base: &Point, tol: &Tolerance) -> Result<Vec<Point>> {
    cover.validate()?;
    let c2 = |v: Vec<PointC2>| v.into_iter().map(Point::C2).collect::<Vec<_>>();
    let pts: Vec<Point> = match cover {
        CoverId::ChiInf | CoverId::ChiN(_) => {
            let b = base.as_c2()?;
            let c = C64::new(b.z.re, b.w.re);
            if c.norm() < 1e-300 {
                return Err(Error::AxisExcluded);
            }
            match cover {
                CoverId::ChiInf => c2(vec![PointC2::from_reals(c.norm().ln(), c.arg(), b.z.im, b.w.im)]),
                CoverId::ChiN(n) => {
                    let r = (c.ln() / n as f64).exp();
                    c2((0..n)
                        .map(|k| {
                            let x = r * root_of_unity(n, k as i64);
                            PointC2::from_reals(x.re, b.z.im, x.im, b.w.im)
                        })
                        .collect())
                }
                _ => unreachable!(),
            }
        }
        CoverId::Mu2 => lift_psi_mu(&base.as_p2()?)?.into_iter().map(Point::C3).collect(),
        CoverId::Mu4 => c2(lift_psi_mu(&base.as_p2()?)?
            .into_iter()
            .flat_map(invert_rossi_mu)
            .collect()),
        CoverId::Eta2 => lift_psi_eta(base.as_c2()?)?.into_iter().map(Point::C3).collect(),
        CoverId::NuN(n) => c2(lift_psi_nu(base.as_c2()?)?
            .into_iter()
            .flat_map(|z| invert_rossi_n(n, z, true))
            .collect()),
        CoverId::Eta2N(n) => c2(lift_psi_eta(base.as_c2()?)?
            .into_iter()
            .flat_map(|z| invert_rossi_n(n, z, false))
            .collect()),
        CoverId::EtaOdd(n) => c2(lift_psi_eta(base.as_c2()?)?
            .into_iter()
            .flat_map(|z| invert_rossi_n(2 * n, z, false))
            .collect()),
        CoverId::NuInf | CoverId::EtaInf => {
            let b = base.as_c2()?;
            let zs = if cover == CoverId::NuInf { lift_psi_nu(b)? } else { lift_psi_eta(b)? };
            c2(zs
                .into_iter()
                .flat_map(invert_rossi_minus)
                .filter(|h| h.w.norm() < h.z.norm())
                .map(|h| PointC2::new(h.z.ln(), h.w / h.z))
                .collect())
        }
    };
    // keep only genuine preimages (the Ψ lifts include the wrong sign for ν)
    let good: Vec<Point> = pts
        .into_iter()
        .filter(|p| {
            cover_map(cover, p, tol)
                .ok()
                .and_then(|img| img.dist(base))
                .map_or(false, |d| d <= 1e-7 * (1.0 + base.magnitude()))
        })
        .collect();
    Ok(dedup(good))
}

// ---- continuation -------------------------------------------------------------

/// Real chart coordinates of a base point; for ℂℙ² the affine chart dividing
/// by coordinate `k`.
fn chart(p: &Point, k: usize) -> Result<[f64; 4]> {
    Ok(match p {
        Point::C2(q) => q.to_reals(),
        Point::P2(h) => {
            let c = h.coords();
            if c[k].norm() < 1e-12 {
                return Err(Error::PoleHit(c[k].norm()));
            }
            let o: Vec<C64> = (0..3).filter(|&i| i != k).map(|i| c[i] / c[k]).collect();
            [o[0].re, o[0].im, o[1].re, o[1].im]
        }
        Point::C3(_) => return Err(Error::AmbientMismatch { expected: "C^2 or CP^2" }),
    })
}

fn residual_vec(cover: CoverId, p: [f64; 4], target: [f64; 4], k: usize, tol: &Tolerance) -> Result<Vector4<f64>> {
    let img = cover_map(cover, &Point::C2(PointC2::from_reals(p[0], p[1], p[2], p[3])), tol)?;
    let c = chart(&img, k)?;
    Ok(Vector4::from_fn(|i, _| c[i] - target[i]))
}

fn newton(cover: CoverId, mut p: [f64; 4], target: [f64; 4], k: usize, tol: &Tolerance) -> Result<[f64; 4]> {
    let scale = 1.0 + target.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..30 {
        let r = residual_vec(cover, p, target, k, tol)?;
        if r.norm() <= 1e-12 * scale {
            return Ok(p);
        }
        let mut jac = Matrix4::<f64>::zeros();
        for i in 0..4 {
            let h = 1e-7 * (1.0 + p[i].abs());
            let (mut a, mut b) = (p, p);
            a[i] += h;
            b[i] -= h;
            let col = (residual_vec(cover, a, target, k, tol)? - residual_vec(cover, b, target, k, tol)?) / (2.0 * h);
            jac.set_column(i, &col);
        }
        let step = jac
            .lu()
            .solve(&(-r))
            .ok_or_else(|| Error::ContinuationFailed("singular Jacobian".into()))?;
        for i in 0..4 {
            p[i] += step[i];
        }
    }
    let r = residual_vec(cover, p, target, k, tol)?;
    if r.norm() <= 1e-10 * scale {
        Ok(p)
    } else {
        Err(Error::ContinuationFailed(format!("Newton stalled at residual {:e}", r.norm())))
    }
}

/// Tracks the fiber point over a base path from cover_map(seed) to `base`,
/// Newton-correcting at every step (adaptive step, at most 10⁴ steps). The
/// base path is a straight segment in chart coordinates; for χ covers the
/// (Re z, Re w) part follows the polar angle instead.
pub fn continue_lift(cover: CoverId, seed: &Point, base: &Point, tol: &Tolerance) -> Result<Point> {
    let p0 = seed.as_c2().map_err(|_| {
        Error::ContinuationFailed(format!("{cover} has no C^2 total space to track in"))
    })?;
    let k = match base {
        Point::P2(h) => {
            let c = h.coords();
            (0..3).max_by(|&i, &j| c[i].norm().total_cmp(&c[j].norm())).unwrap_or(0)
        }
        _ => 0,
    };
    let start = cover_map(cover, seed, tol)?;
    let b0 = chart(&start, k).map_err(|e| Error::ContinuationFailed(e.to_string()))?;
    let b1 = chart(base, k)?;
    let polar = cover.family() == "chi";
    let (a0, a1) = (C64::new(b0[0], b0[2]), C64::new(b1[0], b1[2]));
    let dth = (a1 / a0).arg();
    let path = |tau: f64| -> [f64; 4] {
        let mut b: [f64; 4] = std::array::from_fn(|i| b0[i] + tau * (b1[i] - b0[i]));
        if polar {
            let r = a0.norm() + tau * (a1.norm() - a0.norm());
            let c = C64::from_polar(r, a0.arg() + tau * dth);
            b[0] = c.re;
            b[2] = c.im;
        }
        b
    };
    let mut p = p0.to_reals();
    let (mut tau, mut h) = (0.0f64, 1.0 / 64.0);
    for _ in 0..10_000 {
        if tau >= 1.0 {
            let q = newton(cover, p, b1, k, tol)?;
            return Ok(Point::C2(PointC2::from_reals(q[0], q[1], q[2], q[3])));
        }
        let next = (tau + h).min(1.0);
        match newton(cover, p, path(next), k, tol) {
            Ok(q) => {
                let jump = (0..4).map(|i| (q[i] - p[i]).powi(2)).sum::<f64>().sqrt();
                // a large jump means Newton slid to another sheet
                if jump <= 0.5 * (1.0 + p.iter().map(|x| x * x).sum::<f64>().sqrt()) {
                    p = q;
                    tau = next;
                    h = (h * 1.5).min(0.25);
                    continue;
                }
                h /= 2.0;
            }
            Err(_) => h /= 2.0,
        }
        if h < 1e-9 {
            return Err(Error::ContinuationFailed(format!("step underflow at tau = {tau}")));
        }
    }
    Err(Error::ContinuationFailed("step budget exhausted".into()))
}

// ---- orbit enumeration -------------------------------------------------------

fn generators(cover: CoverId) -> Vec<Box<dyn Fn(&Point) -> Result<Point>>> {
    let c2 = |f: Box<dyn Fn(PointC2) -> Result<PointC2>>| -> Box<dyn Fn(&Point) -> Result<Point>> {
        Box::new(move |p: &Point| Ok(Point::C2(f(p.as_c2()?)?)))
    };
    let rot = |n: u32| c2(Box::new(move |p: PointC2| Ok(p.scale(root_of_unity(n, 1)))));
    match cover {
        CoverId::NuN(n) => vec![rot(n)],
        CoverId::Eta2N(n) => vec![rot(n), c2(Box::new(move |p| d_prime_b(n, p, false)))],
        CoverId::EtaOdd(n) => vec![rot(2 * n), c2(Box::new(move |p| d_prime_b(2 * n, p, false)))],
        CoverId::Mu4 => vec![c2(Box::new(f_mu))],
        CoverId::Mu2 | CoverId::Eta2 => vec![Box::new(|p: &Point| Ok(Point::C3(p.as_c3()?.neg())))],
        CoverId::ChiN(n) => vec![c2(Box::new(move |p: PointC2| {
            let xu = root_of_unity(n, 1) * C64::new(p.z.re, p.w.re);
            Ok(PointC2::from_reals(xu.re, p.z.im, xu.im, p.w.im))
        }))],
        CoverId::ChiInf => vec![c2(Box::new(|p: PointC2| {
            Ok(PointC2::new(p.z + C64::new(0.0, 2.0 * std::f64::consts::PI), p.w))
        }))],
        CoverId::NuInf | CoverId::EtaInf => vec![c2(Box::new(|p: PointC2| {
            Ok(PointC2::new(p.z + C64::new(0.0, std::f64::consts::PI), p.w))
        }))],
    }
}

fn same(a: &Point, b: &Point) -> bool {
    a.dist(b).map_or(false, |d| d <= SEPARATION * (1.0 + a.magnitude()))
}

/// Closure of {p} under the cover's deck generators, capped at `cap` points.
pub fn deck_orbit(cover: CoverId, p: &Point, cap: usize) -> Result<Vec<Point>> {
    let gens = generators(cover);
    let mut orbit = vec![*p];
    let mut i = 0;
    while i < orbit.len() && orbit.len() < cap {
        let cur = orbit[i];
        for g in &gens {
            let q = g(&cur)?;
            if !orbit.iter().any(|o| same(o, &q)) {
                orbit.push(q);
            }
        }
        i += 1;
    }
    Ok(orbit)
}

fn separations(pts: &[Point]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if let Some(d) = pts[i].dist(&pts[j]) {
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
    }
    (lo, hi)
}

/// Counts the sheets of `cover` over `base`: finds one fiber point (the given
/// witness, else by continuation from the canonical seed, else algebraically)
/// and enumerates its deck orbit. ∞ covers report INFINITE after [`K_MAX`]
/// distinct shift images.
pub fn count_sheets(cover: CoverId, base: &Point, witness: Option<&Point>, tol: &Tolerance) -> Result<FiberReport> {
    cover.validate()?;
    let alpha = alpha_of_base(cover, base)?;
    cover.base(alpha.unwrap_or(0.0))?;
    let base_scale = 1.0 + base.magnitude();
    let residual = |p: &Point| -> Result<f64> {
        let img = cover_map(cover, p, tol)?;
        img.dist(base).ok_or(Error::AmbientMismatch { expected: "base ambient" })
    };

    let (start, source) = match witness {
        Some(w) => {
            let r = residual(w).map_err(|_| Error::WitnessInvalid(f64::INFINITY))?;
            if !(r <= 1e-8 * base_scale) {
                return Err(Error::WitnessInvalid(r));
            }
            (*w, WitnessSource::Given)
        }
        None => {
            let tracked = seed(cover, alpha).and_then(|s| continue_lift(cover, &s, base, tol));
            match tracked {
                Ok(p) => (p, WitnessSource::Continuation),
                Err(_) => {
                    let fib = algebraic_fiber(cover, base, tol)?;
                    let p = *fib.first().ok_or_else(|| {
                        Error::ContinuationFailed("no fiber point found".into())
                    })?;
                    (p, WitnessSource::Algebraic)
                }
            }
        }
    };

    let infinite = cover.sheets().is_none();
    let cap = if infinite { K_MAX + 1 } else { 4096 };
    let orbit = deck_orbit(cover, &start, cap)?;
    let residuals = orbit.iter().map(residual).collect::<Result<Vec<f64>>>()?;
    let residual_max = residuals.iter().cloned().fold(0.0, f64::max);
    let (lo, hi) = separations(&orbit);

    let (cardinality, witnesses, class_sizes, residuals) = if infinite {
        let card = if orbit.len() > K_MAX { Cardinality::Infinite } else { Cardinality::Finite(orbit.len()) };
        (card, orbit.iter().take(8).cloned().collect(), None, residuals.into_iter().take(8).collect())
    } else if let CoverId::EtaOdd(n) = cover {
        let mut reps: Vec<Point> = Vec::new();
        let mut sizes: Vec<usize> = Vec::new();
        for p in &orbit {
            let r = Point::C2(eta_odd_representative(n, p.as_c2()?)?);
            match reps.iter().position(|q| same(q, &r)) {
                Some(i) => sizes[i] += 1,
                None => {
                    reps.push(r);
                    sizes.push(1);
                }
            }
        }
        let res = reps.iter().map(residual).collect::<Result<Vec<f64>>>()?;
        (Cardinality::Finite(reps.len()), reps, Some(sizes), res)
    } else {
        (Cardinality::Finite(orbit.len()), orbit.clone(), None, residuals)
    };

    Ok(FiberReport {
        cover,
        alpha,
        base: *base,
        cardinality,
        residual_max,
        min_pairwise_sep: if lo.is_finite() { lo } else { 0.0 },
        max_pairwise_sep: hi,
        witness_source: source,
        class_sizes,
        witnesses,
        residuals,
    })
}

/// A random point of the cover's total space over the surface with this α
/// (α is ignored for χ covers).
pub fn sample_total_space<R: rand::Rng + ?Sized>(cover: CoverId, alpha: f64, rng: &mut R) -> Result<Point> {
    use rand_distr::{Distribution, StandardNormal};
    cover.validate()?;
    cover.base(alpha)?;
    let level = ((alpha + 1.0) / 2.0).sqrt();
    let phase = |rng: &mut R| C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
    // t uniform-ish in the disk of radius 0.9
    let disk = |rng: &mut R| phase(rng) * (0.9 * rng.gen::<f64>().sqrt());
    let on_level = |rng: &mut R, n: u32| {
        let t = disk(rng);
        let r = (level / (1.0 - t.norm_sqr())).powf(1.0 / n as f64);
        let z = phase(rng) * r;
        PointC2::new(z, z * t)
    };
    let s_inf = |rng: &mut R| {
        let t = disk(rng);
        let re = -0.5 * ((1.0 - t.norm_sqr()) / level).ln();
        PointC2::new(C64::new(re, rng.gen_range(-10.0..10.0)), t)
    };
    let mu = |rng: &mut R| {
        let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut *rng));
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = ((alpha - 1.0) / 2.0).sqrt().sqrt() / n;
        PointC2::from_reals(g[0] * r, g[1] * r, g[2] * r, g[3] * r)
    };
    let u = |rng: &mut R| rng.gen_range(-2.0..2.0);
    Ok(match cover {
        CoverId::ChiInf => Point::C2(PointC2::from_reals(0.0, u(rng), u(rng), u(rng))),
        CoverId::ChiN(_) => {
            let c = phase(rng);
            Point::C2(PointC2::from_reals(c.re, u(rng), c.im, u(rng)))
        }
        CoverId::Mu4 => Point::C2(mu(rng)),
        CoverId::Mu2 => Point::C3(rossi_mu(mu(rng))?),
        CoverId::NuN(n) | CoverId::Eta2N(n) => Point::C2(on_level(rng, n)),
        CoverId::EtaOdd(n) => Point::C2(on_level(rng, 2 * n)),
        CoverId::Eta2 => Point::C3(rossi_minus(on_level(rng, 2))?),
        CoverId::NuInf | CoverId::EtaInf => Point::C2(s_inf(rng)),
    })
}
