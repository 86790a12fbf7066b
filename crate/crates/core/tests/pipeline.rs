use invgc::tuner::DEFAULT_R_GRID;
use invgc::{
    degeneration_score, evaluate, generate_cone_dataset, grid_search, sweep_param, ConeConfig, ConeDataset,
    InvGcConfig, SweepParam, TuneData, Variant,
};

fn data(d: &ConeDataset) -> TuneData<'_> {
    TuneData {
        val_query: &d.query,
        val_gallery: &d.gallery,
        ref_gallery: &d.ref_gallery,
        ref_query: &d.ref_query,
        relevance: &d.relevance,
    }
}

#[test]
fn default_dataset_regression() {
    let d = generate_cone_dataset(&ConeConfig::default()).unwrap();
    let ddeg = degeneration_score(&d.gallery).unwrap();
    assert!((ddeg - 0.797_295_149_848_747_9).abs() < 1e-12, "{ddeg}");
    let base = evaluate(&d.query, &d.gallery, &d.relevance, &[1, 5, 10]).unwrap();
    assert_eq!(base.recall_at[&1], 99.5);
    assert!(base.recall_at[&1] < 100.0);
}

#[test]
fn grid_best_dominates_origin_cell() {
    let d = generate_cone_dataset(&ConeConfig::default()).unwrap();
    let grid = [0.0, 0.05, 0.1, 0.2];
    for variant in [
        Variant::Full,
        Variant::Local { k_percent: 1.0 },
        Variant::Binary { p_percent: 100.0 },
    ] {
        let t = grid_search(&data(&d), variant, &grid, &grid).unwrap();
        assert_eq!(t.grid_trace.len(), 16);
        let origin = t
            .grid_trace
            .iter()
            .find(|e| e.cfg.r_g == 0.0 && e.cfg.r_q == 0.0)
            .unwrap();
        assert!(t.best_report.recall_at[&1] >= origin.recall_at_1, "{variant}");
    }
}

#[test]
fn default_grid_tuning_outcome() {
    let d = generate_cone_dataset(&ConeConfig::default()).unwrap();
    let full = grid_search(&data(&d), Variant::Full, &DEFAULT_R_GRID, &DEFAULT_R_GRID).unwrap();
    // Every positive strength costs Full some R@1 on this near-saturated set.
    assert_eq!((full.best_cfg.r_g, full.best_cfg.r_q), (0.0, 0.0));
    let local = grid_search(
        &data(&d),
        Variant::Local { k_percent: 1.0 },
        &DEFAULT_R_GRID,
        &DEFAULT_R_GRID,
    )
    .unwrap();
    assert_eq!((local.best_cfg.r_g, local.best_cfg.r_q), (0.0, 0.01));
    assert_eq!(local.best_report.recall_at[&1], 100.0);
}

#[test]
fn ratio_sweep_is_reproducible() {
    let cfg = ConeConfig {
        n_items: 60,
        n_ref: 200,
        ..ConeConfig::default()
    };
    let d = generate_cone_dataset(&cfg).unwrap();
    let fixed = InvGcConfig::new(Variant::Local { k_percent: 1.0 }, 0.1, 0.1).unwrap();
    let values = [0.1, 0.25, 0.5, 1.0];
    let a = sweep_param(&fixed, SweepParam::Ratio, &values, &data(&d), 3).unwrap();
    let b = sweep_param(&fixed, SweepParam::Ratio, &values, &data(&d), 3).unwrap();
    assert_eq!(a, b);
    assert!(a
        .points
        .iter()
        .all(|p| p.recall_at_1.is_finite() && p.degeneration.is_finite()));
}

#[test]
fn rg_zero_sweep_is_baseline() {
    let d = generate_cone_dataset(&ConeConfig::default()).unwrap();
    let fixed = InvGcConfig::new(Variant::Full, 0.0, 0.0).unwrap();
    let c = sweep_param(&fixed, SweepParam::Rg, &[0.0], &data(&d), 0).unwrap();
    let base = evaluate(&d.query, &d.gallery, &d.relevance, &[1]).unwrap();
    assert_eq!(c.points.len(), 1);
    assert_eq!(c.points[0].recall_at_1, base.recall_at[&1]);
}
