mod common;

use common::{area_volume_ratio, cap_fraction_quadrature};
use invgc::theory::{check_lemma2, verify_grid, TheoryGrid};
use invgc::{cap_fraction, cap_fraction_exact, cap_fraction_mc, CapMeasure, CheckKind};
use proptest::prelude::*;

#[test]
fn beta_identity_matches_quadrature() {
    for n in 2..=16 {
        for i in 1..20 {
            let b = i as f64 * 0.05;
            let vol = cap_fraction(n, b, CapMeasure::Volume).unwrap();
            let want = cap_fraction_quadrature(n, b, false);
            assert!((vol - want).abs() < 1e-10, "volume n={n} b={b}: {vol} vs {want}");
            if n >= 3 {
                let area = cap_fraction(n, b, CapMeasure::Surface).unwrap();
                let want = cap_fraction_quadrature(n, b, true);
                assert!((area - want).abs() < 1e-10, "surface n={n} b={b}: {area} vs {want}");
            }
        }
    }
}

#[test]
fn planar_arc_and_disc_segment() {
    // Arc of half-angle asin(b) out of the full circle.
    let b = 0.6f64;
    let arc = cap_fraction(2, b, CapMeasure::Surface).unwrap();
    assert!((arc - b.asin() / std::f64::consts::PI).abs() < 1e-12);
    // Disc segment: (θ - sin θ cos θ) / π with θ = asin(b).
    let t = b.asin();
    let seg = cap_fraction(2, b, CapMeasure::Volume).unwrap();
    assert!((seg - (t - t.sin() * t.cos()) / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn lemma2_against_recursion() {
    for n in 2..=16 {
        let c = check_lemma2(n).unwrap();
        assert!((c.exact - area_volume_ratio(n)).abs() < 1e-12);
        assert!(c.holds);
    }
}

#[test]
fn mc_tracks_exact_with_stderr() {
    for n in [3, 7] {
        for b in [0.5, 0.8] {
            let m = cap_fraction_mc(n, b, 200_000, 99).unwrap();
            let exact = cap_fraction_exact(n, b).unwrap();
            assert!(
                (m.estimate - exact).abs() <= 4.0 * m.stderr,
                "n={n} b={b}: {m:?} vs {exact}"
            );
        }
    }
}

#[test]
fn thm1_fails_only_below_its_lower_bound() {
    let grid = TheoryGrid {
        include_thm1: true,
        ..TheoryGrid::default()
    };
    let checks = verify_grid(&grid).unwrap();
    for c in checks.iter().filter(|c| c.kind != CheckKind::Thm1) {
        assert!(c.holds, "{c:?}");
    }
    let thm1: Vec<_> = checks.iter().filter(|c| c.kind == CheckKind::Thm1).collect();
    assert!(thm1.iter().all(|c| c.upper_holds()));
    let miss = thm1.iter().find(|c| c.n == 3 && c.b == Some(0.5)).unwrap();
    assert!(!miss.lower_holds());
}

proptest! {
    #[test]
    fn exact_fraction_monotone_in_radius(n in 2usize..40, b1 in 0.01f64..0.99, db in 0.001f64..0.5) {
        let b2 = (b1 + db).min(1.0);
        prop_assert!(cap_fraction_exact(n, b1).unwrap() < cap_fraction_exact(n, b2).unwrap());
    }

    #[test]
    fn volume_fraction_below_surface_fraction(n in 3usize..40, b in 0.01f64..0.99) {
        // The solid cap is thinner than the spherical one at equal radius.
        prop_assert!(cap_fraction(n, b, CapMeasure::Volume).unwrap() <= cap_fraction(n, b, CapMeasure::Surface).unwrap());
    }
}
