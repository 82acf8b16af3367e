use cr_atlas::covers::*;
use cr_atlas::groups::{GroupElement, GroupId};
use cr_atlas::rossi_maps::{cover_map, lambda_map, rossi_mu};
use cr_atlas::{Point, PointC2, Tolerance, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn shift_by_two_pi_i_leaves_lambda_unchanged() {
    for (s, t) in [(c(0.3, -0.2), c(0.1, 0.4)), (c(-1.0, 2.0), c(0.0, -0.7))] {
        let p = Point::C2(PointC2::new(s, t));
        let q = deck_apply(DeckMapId::ShiftPiK { k: 2 }, &p).unwrap().as_c2().unwrap();
        let a = lambda_map(s, t).unwrap();
        let b = lambda_map(q.z, q.w).unwrap();
        assert!(a.dist(b) < 1e-14);
    }
}

#[test]
fn trivial_inf_parameters_are_the_identity() {
    let id = CoverAutId::NuInf { a: c(1.0, 0.0), b: c(0.0, 0.0), branch: 0, discrete: 0 };
    let p = Point::C2(PointC2::new(c(-0.4, 1.3), c(0.2, -0.5)));
    assert_eq!(cover_aut_apply(&id, &p).unwrap(), p);
}

#[test]
fn boost_keeps_nu3_level() {
    let tol = Tolerance::default();
    for r in [0.3, 0.6, 0.9] {
        let alpha = 2.0 * f64::powi(r, 4) - 1.0;
        let p = Point::C2(PointC2::new(c(f64::powf(r, 2.0 / 3.0), 0.0), c(0.0, 0.0)));
        assert!(on_total_space(CoverId::NuN(3), alpha, &p, &tol).unwrap());
        for tau in [0.2, -0.5, 1.1] {
            let a = CoverAutId::NuN { n: 3, a: c(f64::cosh(tau), 0.0), b: c(f64::sinh(tau), 0.0), branch: 0, discrete: 0 };
            let q = cover_aut_apply(&a, &p).unwrap();
            let (lhs, rhs) = total_space_sides(CoverId::NuN(3), alpha, &q).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "r={r} tau={tau}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn sign_flip_preserves_eta2() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let flip = CoverAutId::Eta2 { q: GroupElement::identity(GroupId::SO21c), flip: true };
    for alpha in [1.5, 3.0, 7.0] {
        for _ in 0..50 {
            let p = sample_total_space(CoverId::Eta2, alpha, &mut rng).unwrap();
            let q = cover_aut_apply(&flip, &p).unwrap();
            assert!(on_total_space(CoverId::Eta2, alpha, &q, &tol).unwrap());
            let (bp, bq) = (cover_map(CoverId::Eta2, &p, &tol).unwrap(), cover_map(CoverId::Eta2, &q, &tol).unwrap());
            assert!(bp.dist(&bq).unwrap() < 1e-12);
        }
    }
}

#[test]
fn tracked_f_eta_n_has_order_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [1u32, 3, 5, 7] {
        let mut done = 0;
        while done < 200 {
            let p = sample_total_space(CoverId::EtaOdd(n), 2.0, &mut rng).unwrap().as_c2().unwrap();
            let Ok(q) = (0..4).try_fold(p, |x, _| f_eta_n_tracked(n, x)) else { continue };
            assert!(q.dist(p) < 1e-8 * (1.0 + p.norm()), "n={n}: {}", q.dist(p));
            done += 1;
        }
    }
}

#[test]
fn factorization_formulas() {
    let (x, y, u, v): (f64, f64, f64, f64) = (0.7, 2.3, -0.4, 1.9);
    let p = Point::C2(PointC2::from_reals(x, y, u, v));
    for n in 1..5u32 {
        let nf = n as f64;
        let got = factorization_map(CoverId::ChiInf, CoverId::ChiN(n), &p).unwrap().as_c2().unwrap();
        let e = (x / nf).exp();
        let want = PointC2::new(c(e * (y / nf).cos(), u), c(e * (y / nf).sin(), v));
        assert!(got.dist(want) < 1e-14);

        if n < 2 {
            continue;
        }
        let (s, t) = (c(-0.3, 0.8), c(0.2, 0.1));
        let got = factorization_map(CoverId::NuInf, CoverId::NuN(n), &Point::C2(PointC2::new(s, t))).unwrap().as_c2().unwrap();
        let e = (2.0 * s / nf).exp();
        assert!(got.dist(PointC2::new(e, e * t)) < 1e-14);
    }
    let q = PointC2::new(c(0.6, -0.1), c(0.3, 0.2));
    let got = factorization_map(CoverId::Mu4, CoverId::Mu2, &Point::C2(q)).unwrap().as_c3().unwrap();
    assert!(got.dist(rossi_mu(q).unwrap()) < 1e-15);
    assert!(factorization_map(CoverId::Mu2, CoverId::Mu4, &Point::C2(q)).is_err());
}

proptest! {
    #[test]
    fn pi_i_shifts_are_nu_inf_decks(seed in 0u64..10_000, alpha in -0.9..0.9f64, k in -4i64..5) {
        let tol = Tolerance::default();
        let p = sample_total_space(CoverId::NuInf, alpha, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let q = deck_apply(DeckMapId::ShiftPiK { k }, &p).unwrap();
        let (a, b) = (cover_map(CoverId::NuInf, &p, &tol).unwrap(), cover_map(CoverId::NuInf, &q, &tol).unwrap());
        prop_assert!(a.dist(&b).unwrap() < 1e-9 * (1.0 + a.magnitude()));
    }

    #[test]
    fn f_mu_is_a_mu4_deck(x in -2.0..2.0f64, y in -2.0..2.0f64, u in -2.0..2.0f64, v in -2.0..2.0f64) {
        prop_assume!(x * x + y * y + u * u + v * v > 1e-3);
        let tol = Tolerance::default();
        let p = Point::C2(PointC2::from_reals(x, y, u, v));
        let q = deck_apply(DeckMapId::FMu, &p).unwrap();
        let (a, b) = (cover_map(CoverId::Mu4, &p, &tol).unwrap(), cover_map(CoverId::Mu4, &q, &tol).unwrap());
        prop_assert!(a.dist(&b).unwrap() < 1e-9);
        prop_assert!(q.dist(&p).unwrap() > 1e-6);
    }

    #[test]
    fn chi_rotation_is_periodic(seed in 0u64..1000, n in 1u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_total_space(CoverId::ChiN(n), 0.0, &mut rng).unwrap();
        let q = (0..n).try_fold(p, |x, _| deck_apply(DeckMapId::ChiRotation { n, k: 1 }, &x)).unwrap();
        prop_assert!(q.dist(&p).unwrap() < 1e-10 * (1.0 + p.magnitude()));
    }
}
