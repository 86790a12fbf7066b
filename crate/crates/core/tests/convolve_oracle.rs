mod common;

use common::{naive_dual, random_rows, rng, Rows};
use invgc::{inverse_convolve_dual, EmbeddingSet, InvGcConfig, Variant};
use proptest::prelude::*;
use rand::Rng;

fn set(rows: &Rows) -> EmbeddingSet {
    EmbeddingSet::from_rows(rows).unwrap()
}

fn variants() -> [Variant; 3] {
    [
        Variant::Full,
        Variant::Local { k_percent: 25.0 },
        Variant::Binary { p_percent: 50.0 },
    ]
}

fn max_diff(a: &EmbeddingSet, b: &Rows) -> f64 {
    a.rows()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn matches_loop_oracle_on_random_instances() {
    let mut r = rng(2024);
    for case in 0..50 {
        let d = r.random_range(2..=8);
        let ng = r.random_range(1..=16);
        let (nrg, nrq) = (r.random_range(1..=32), r.random_range(1..=32));
        let g = random_rows(&mut r, ng, d);
        let rg = random_rows(&mut r, nrg, d);
        let rq = random_rows(&mut r, nrq, d);
        let (r_g, r_q) = (r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        for variant in variants() {
            let cfg = InvGcConfig::new(variant, r_g, r_q).unwrap();
            let got = inverse_convolve_dual(&set(&g), &set(&rg), &set(&rq), &cfg).unwrap();
            let want = naive_dual(&g, &rg, &rq, variant, r_g, r_q, false, false);
            let err = max_diff(&got, &want);
            assert!(err <= 1e-9, "case {case} {variant}: max diff {err}");
        }
    }
}

#[test]
fn aliased_reference_drops_self_term() {
    let mut r = rng(5);
    for _ in 0..10 {
        let g = random_rows(&mut r, 12, 4);
        let rq = random_rows(&mut r, 20, 4);
        for variant in variants() {
            let cfg = InvGcConfig::new(variant, 0.3, 0.2).unwrap();
            let gs = set(&g);
            let got = inverse_convolve_dual(&gs, &gs, &set(&rq), &cfg).unwrap();
            let want = naive_dual(&g, &g, &rq, variant, 0.3, 0.2, true, false);
            assert!(max_diff(&got, &want) <= 1e-9, "{variant}");
        }
    }
}

fn instance() -> impl Strategy<Value = (Rows, Rows, Rows, f64, f64)> {
    (2usize..6, 2usize..10, 1usize..12).prop_flat_map(|(d, ng, nr)| {
        let row = prop::collection::vec(-1.0f64..1.0, d).prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-2));
        (
            prop::collection::vec(row.clone(), ng),
            prop::collection::vec(row.clone(), nr),
            prop::collection::vec(row, nr),
            0.0f64..2.0,
            0.0f64..2.0,
        )
    })
}

proptest! {
    #[test]
    fn output_rows_have_norm_at_most_one((g, rg, rq, r_g, r_q) in instance()) {
        for variant in variants() {
            let cfg = InvGcConfig::new(variant, r_g, r_q).unwrap();
            let out = inverse_convolve_dual(&set(&g), &set(&rg), &set(&rq), &cfg).unwrap();
            for row in out.rows() {
                let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(n <= 1.0 + 1e-12, "{variant}: {n}");
            }
        }
    }

    #[test]
    fn invariant_to_row_rescaling((g, rg, rq, r_g, r_q) in instance(), scale in 0.1f64..10.0) {
        let mut scaled = g.clone();
        scaled[0].iter_mut().for_each(|x| *x *= scale);
        for variant in variants() {
            let cfg = InvGcConfig::new(variant, r_g, r_q).unwrap();
            let a = inverse_convolve_dual(&set(&g), &set(&rg), &set(&rq), &cfg).unwrap();
            let b = inverse_convolve_dual(&set(&scaled), &set(&rg), &set(&rq), &cfg).unwrap();
            let err = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-9, "{variant}: {err}");
        }
    }

    #[test]
    fn gallery_permutation_permutes_output((g, rg, rq, r_g, r_q) in instance()) {
        let mut reversed = g.clone();
        reversed.reverse();
        for variant in variants() {
            let cfg = InvGcConfig::new(variant, r_g, r_q).unwrap();
            let a = inverse_convolve_dual(&set(&g), &set(&rg), &set(&rq), &cfg).unwrap();
            let b = inverse_convolve_dual(&set(&reversed), &set(&rg), &set(&rq), &cfg).unwrap();
            let n = g.len();
            for i in 0..n {
                let err = a.row(i).iter().zip(b.row(n - 1 - i)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                prop_assert!(err <= 1e-9, "{variant} row {i}: {err}");
            }
        }
    }
}
