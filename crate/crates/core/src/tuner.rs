//! Hyperparameter search and ablation sweeps.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::convolve::{inverse_convolve_dual, InvGcConfig};
use crate::diagnostics::degeneration_score;
use crate::embio::{EmbeddingSet, RelevanceMap};
use crate::error::{Error, Result};
use crate::retrieval::{evaluate, RetrievalReport, DEFAULT_RECALL_AT};
use crate::simgraph::Variant;

/// Default search grid for both `r_g` and `r_q`.
pub const DEFAULT_R_GRID: [f64; 8] = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

/// Default LocalAdj neighbourhood, in percent.
pub const DEFAULT_K_PERCENT: f64 = 1.0;

/// Default AvgPool neighbourhood, in percent.
pub const DEFAULT_P_PERCENT: f64 = 100.0;

/// Everything one evaluation of a configuration needs.
#[derive(Debug, Clone, Copy)]
pub struct TuneData<'a> {
    pub val_query: &'a EmbeddingSet,
    pub val_gallery: &'a EmbeddingSet,
    pub ref_gallery: &'a EmbeddingSet,
    pub ref_query: &'a EmbeddingSet,
    pub relevance: &'a RelevanceMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub cfg: InvGcConfig,
    pub recall_at_1: f64,
    pub recall_at_5: f64,
    pub mean_rank: f64,
    /// `Δ_deg` of the corrected gallery.
    pub degeneration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best_cfg: InvGcConfig,
    pub best_report: RetrievalReport,
    /// One entry per grid cell, `r_g`-major in grid order.
    pub grid_trace: Vec<TraceEntry>,
}

/// Applies `cfg` to the validation gallery and scores it.
pub fn evaluate_config(data: &TuneData<'_>, cfg: &InvGcConfig) -> Result<(RetrievalReport, TraceEntry)> {
    let corrected = inverse_convolve_dual(data.val_gallery, data.ref_gallery, data.ref_query, cfg)?;
    let report = evaluate(data.val_query, &corrected, data.relevance, &DEFAULT_RECALL_AT)?;
    let degeneration = if corrected.n() >= 2 {
        degeneration_score(&corrected)?
    } else {
        f64::NAN
    };
    let entry = TraceEntry {
        cfg: *cfg,
        recall_at_1: report.recall_at[&1],
        recall_at_5: report.recall_at[&5],
        mean_rank: report.mean_rank,
        degeneration,
    };
    Ok((report, entry))
}

/// Preference order: higher R@1, higher R@5, lower MnR, smaller `r_g + r_q`.
fn better(a: &TraceEntry, b: &TraceEntry) -> Ordering {
    a.recall_at_1
        .total_cmp(&b.recall_at_1)
        .then(a.recall_at_5.total_cmp(&b.recall_at_5))
        .then(b.mean_rank.total_cmp(&a.mean_rank))
        .then((b.cfg.r_g + b.cfg.r_q).total_cmp(&(a.cfg.r_g + a.cfg.r_q)))
}

pub fn grid_search(data: &TuneData<'_>, variant: Variant, rg_grid: &[f64], rq_grid: &[f64]) -> Result<TuneResult> {
    if rg_grid.is_empty() || rq_grid.is_empty() {
        return Err(Error::InvalidParameter("search grids must be non-empty".into()));
    }
    let cells: Vec<InvGcConfig> = rg_grid
        .iter()
        .flat_map(|&r_g| rq_grid.iter().map(move |&r_q| InvGcConfig { variant, r_g, r_q }))
        .collect();
    for c in &cells {
        c.validate()?;
    }
    let results: Vec<(RetrievalReport, TraceEntry)> = cells
        .par_iter()
        .map(|c| evaluate_config(data, c))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, (_, entry)) in results.iter().enumerate().skip(1) {
        if better(entry, &results[best].1) == Ordering::Greater {
            best = i;
        }
    }
    let best_cfg = cells[best];
    let best_report = results[best].0.clone();
    Ok(TuneResult {
        best_cfg,
        best_report,
        grid_trace: results.into_iter().map(|(_, e)| e).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Rg,
    Rq,
    /// The neighbourhood percentage of a Local or Binary variant.
    K,
    /// Fraction of each reference set kept.
    Ratio,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Rg => "rg",
            SweepParam::Rq => "rq",
            SweepParam::K => "k",
            SweepParam::Ratio => "ratio",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rg" => Ok(SweepParam::Rg),
            "rq" => Ok(SweepParam::Rq),
            "k" => Ok(SweepParam::K),
            "ratio" => Ok(SweepParam::Ratio),
            other => Err(Error::InvalidParameter(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub recall_at_1: f64,
    pub recall_at_5: f64,
    pub mean_rank: f64,
    pub degeneration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub param: SweepParam,
    /// Sorted by `value`.
    pub points: Vec<SweepPoint>,
}

/// Evaluates `fixed` with one parameter replaced by each of `values`.
/// `seed` drives reference subsampling for [`SweepParam::Ratio`].
pub fn sweep_param(
    fixed: &InvGcConfig,
    param: SweepParam,
    values: &[f64],
    data: &TuneData<'_>,
    seed: u64,
) -> Result<SweepCurve> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let points = sorted
        .par_iter()
        .map(|&value| -> Result<SweepPoint> {
            let mut cfg = *fixed;
            let subsampled;
            let mut d = *data;
            match param {
                SweepParam::Rg => cfg.r_g = value,
                SweepParam::Rq => cfg.r_q = value,
                SweepParam::K => {
                    cfg.variant = match cfg.variant {
                        Variant::Local { .. } => Variant::Local { k_percent: value },
                        Variant::Binary { .. } => Variant::Binary { p_percent: value },
                        Variant::Full => {
                            return Err(Error::InvalidParameter(
                                "a k sweep needs the local or avgpool variant".into(),
                            ))
                        }
                    }
                }
                SweepParam::Ratio => {
                    subsampled = subsample_reference(data.ref_gallery, data.ref_query, value, seed)?;
                    d.ref_gallery = &subsampled.0;
                    d.ref_query = &subsampled.1;
                }
            }
            cfg.validate()?;
            let (_, e) = evaluate_config(&d, &cfg)?;
            Ok(SweepPoint {
                value,
                recall_at_1: e.recall_at_1,
                recall_at_5: e.recall_at_5,
                mean_rank: e.mean_rank,
                degeneration: e.degeneration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve { param, points })
}

fn sample_size(ratio: f64, n: usize) -> usize {
    (((ratio * n as f64) - 1e-9).ceil().max(1.0) as usize).min(n)
}

fn sample_rows(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, m).into_vec();
    idx.sort_unstable();
    idx
}

/// Uniform sample without replacement of `ceil(ratio * N)` rows from each
/// reference set, in original row order. Equal-sized sets share one index
/// sample so paired references stay paired.
pub fn subsample_reference(
    ref_gallery: &EmbeddingSet,
    ref_query: &EmbeddingSet,
    ratio: f64,
    seed: u64,
) -> Result<(EmbeddingSet, EmbeddingSet)> {
    if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!("ratio {ratio} outside (0, 1]")));
    }
    if ratio == 1.0 {
        return Ok((ref_gallery.clone(), ref_query.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_idx = sample_rows(ref_gallery.n(), sample_size(ratio, ref_gallery.n()), &mut rng);
    let q_idx = if ref_query.n() == ref_gallery.n() {
        g_idx.clone()
    } else {
        sample_rows(ref_query.n(), sample_size(ratio, ref_query.n()), &mut rng)
    };
    Ok((ref_gallery.select(&g_idx)?, ref_query.select(&q_idx)?))
}
