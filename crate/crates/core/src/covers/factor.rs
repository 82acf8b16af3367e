use super::deck::eta_odd_representative;
use super::CoverId;
use crate::complex_core::{Point, PointC2, C64};
use crate::rossi_maps::{lambda_map, rossi_minus, rossi_mu, rossi_n, Branch};
use crate::{Error, Result};

/// z ↦ z^k for a positive integer k (no branch involved).
fn ipow(z: C64, k: u32) -> C64 {
    z.powu(k)
}

/// The map π with cover_map(to) ∘ π = cover_map(from).
///
/// Supported: any cover onto itself; χ^(∞) → χ^(n) and χ^(m) → χ^(n) for
/// n | m; ν^(∞) → ν^(n) and ν^(m) → ν^(n) for n | m; η^(∞) → η^(2), η^(2n)
/// and the odd η^(n); η^(2m) → η^(2n) for n | m and η^(2n) → η^(2); μ(4) →
/// μ(2). Anything else is [`Error::UnsupportedPair`].
pub fn factorization_map(from: CoverId, to: CoverId, p: &Point) -> Result<Point> {
    from.validate()?;
    to.validate()?;
    if from == to {
        return Ok(*p);
    }
    let unsupported = || Error::UnsupportedPair(format!("{from} -> {to}"));
    let inf = |q: PointC2, n: u32| {
        // (s, t) ↦ (e^{2s/n}, e^{2s/n}t)
        let z = (q.z * (2.0 / n as f64)).exp();
        PointC2::new(z, z * q.w)
    };
    let fin = |q: PointC2, m: u32, n: u32| {
        // z^n of the image equals z^m of the source
        let z = ipow(q.z, m / n);
        PointC2::new(z, z * (q.w / q.z))
    };
    Ok(match (from, to) {
        (CoverId::ChiInf, CoverId::ChiN(n)) => {
            let q = p.as_c2()?;
            let c = (C64::new(q.z.re, q.z.im) / n as f64).exp();
            Point::C2(PointC2::from_reals(c.re, q.w.re, c.im, q.w.im))
        }
        (CoverId::ChiN(m), CoverId::ChiN(n)) if m % n == 0 => {
            let q = p.as_c2()?;
            let c = ipow(C64::new(q.z.re, q.w.re), m / n);
            Point::C2(PointC2::from_reals(c.re, q.z.im, c.im, q.w.im))
        }
        (CoverId::NuInf, CoverId::NuN(n)) | (CoverId::EtaInf, CoverId::Eta2N(n)) => {
            Point::C2(inf(p.as_c2()?, n))
        }
        (CoverId::EtaInf, CoverId::EtaOdd(n)) => {
            Point::C2(eta_odd_representative(n, inf(p.as_c2()?, 2 * n))?)
        }
        (CoverId::EtaInf, CoverId::Eta2) => {
            let q = p.as_c2()?;
            Point::C3(rossi_minus(lambda_map(q.z, q.w)?)?)
        }
        (CoverId::NuN(m), CoverId::NuN(n)) | (CoverId::Eta2N(m), CoverId::Eta2N(n)) if m % n == 0 => {
            let q = p.as_c2()?;
            if q.z.norm() < 1e-300 {
                return Err(Error::ZeroZ(q.z.norm()));
            }
            Point::C2(fin(q, m, n))
        }
        (CoverId::Eta2N(n), CoverId::Eta2) => Point::C3(rossi_n(n, p.as_c2()?, Some(Branch::Eta))?),
        (CoverId::Mu4, CoverId::Mu2) => Point::C3(rossi_mu(p.as_c2()?)?),
        _ => return Err(unsupported()),
    })
}
