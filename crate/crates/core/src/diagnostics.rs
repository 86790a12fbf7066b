//! Representation-degeneration measures.
//!
//! `MeanSim` is the mean cosine similarity over all counted pairs,
//! `MeanSim@k` the mean over points of the average similarity to their `k`
//! nearest neighbours. `MeanSim@1` is the degeneration score `Δ_deg`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::embio::{EmbeddingSet, RelevanceMap};
use crate::error::{Error, Result};
use crate::simgraph::cosine_similarity_matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationReport {
    /// Number of anchor points (the `m` of the degeneration score).
    pub points: usize,
    pub mean_sim: f64,
    pub std_sim: f64,
    pub min_sim: f64,
    pub mean_sim_at: BTreeMap<usize, f64>,
    /// Nearest-neighbour similarity histogram over `[-1, 1]`.
    pub histogram: Vec<HistogramBin>,
    /// Pairs left out of every aggregate (self pairs or matched pairs).
    pub excluded_pairs: usize,
}

impl DegenerationReport {
    /// `Δ_deg`, when `1` was among the requested `ks`.
    pub fn degeneration(&self) -> Option<f64> {
        self.mean_sim_at.get(&1).copied()
    }
}

/// Equal-width bins over `[-1, 1]`. Boundary values go to the higher bin,
/// and 1.0 lands in the top bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let width = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v.clamp(-1.0, 1.0) + 1.0) / width).floor() as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lower: -1.0 + i as f64 * width,
            upper: if i + 1 == bins {
                1.0
            } else {
                -1.0 + (i + 1) as f64 * width
            },
            count,
        })
        .collect())
}

/// Per-anchor candidate similarities, each sorted descending.
fn aggregate(rows: Vec<Vec<f64>>, ks: &[usize], bins: usize, excluded_pairs: usize) -> Result<DegenerationReport> {
    let points = rows.len();
    let total: usize = rows.iter().map(Vec::len).sum();
    if points == 0 || total == 0 {
        return Err(Error::InsufficientData("no similarity pairs to aggregate".into()));
    }
    let mean_sim = rows.iter().flatten().sum::<f64>() / total as f64;
    let var = rows.iter().flatten().map(|s| (s - mean_sim).powi(2)).sum::<f64>() / total as f64;
    let min_sim = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);

    let mut mean_sim_at = BTreeMap::new();
    for &k in ks {
        if k == 0 {
            return Err(Error::InvalidParameter("top-k must be positive".into()));
        }
        let sum: f64 = rows
            .iter()
            .map(|r| {
                let take = k.min(r.len());
                r[..take].iter().sum::<f64>() / take as f64
            })
            .sum();
        mean_sim_at.insert(k, sum / points as f64);
    }
    let nearest: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    Ok(DegenerationReport {
        points,
        mean_sim,
        std_sim: var.sqrt(),
        min_sim,
        mean_sim_at,
        histogram: histogram(&nearest, bins)?,
        excluded_pairs,
    })
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// Similarity structure within one set, self pairs excluded.
pub fn intra_mean_sim(set: &EmbeddingSet, ks: &[usize], bins: usize) -> Result<DegenerationReport> {
    let n = set.n();
    if n < 2 {
        return Err(Error::InsufficientData("need at least two points".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k > n - 1) {
        return Err(Error::InsufficientData(format!(
            "top-{k} requested but only {} neighbours per point",
            n - 1
        )));
    }
    let sim = cosine_similarity_matrix(set, set)?;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = sim.row(i);
            sorted_desc(
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &s)| s)
                    .collect(),
            )
        })
        .collect();
    aggregate(rows, ks, bins, n)
}

/// Gallery-anchored similarity to the query set, skipping each gallery
/// point's matched queries.
pub fn cross_mean_sim(
    gallery: &EmbeddingSet,
    queries: &EmbeddingSet,
    rel: &RelevanceMap,
    ks: &[usize],
    bins: usize,
) -> Result<DegenerationReport> {
    let sim = cosine_similarity_matrix(gallery, queries)?;
    let inverted = rel.inverted();
    let q_index = queries.index_of();
    let rows: Vec<Result<(Vec<f64>, usize)>> = gallery
        .ids()
        .par_iter()
        .enumerate()
        .map(|(i, gid)| {
            let mut skip = vec![false; queries.n()];
            let mut excluded = 0;
            for q in inverted.get(gid.as_str()).into_iter().flatten() {
                if let Some(&j) = q_index.get(q) {
                    if !skip[j] {
                        skip[j] = true;
                        excluded += 1;
                    }
                }
            }
            let kept: Vec<f64> = sim
                .row(i)
                .iter()
                .zip(&skip)
                .filter(|(_, &s)| !s)
                .map(|(&v, _)| v)
                .collect();
            if kept.is_empty() {
                return Err(Error::InsufficientData(format!(
                    "gallery item {gid:?} is matched to every query"
                )));
            }
            Ok((sorted_desc(kept), excluded))
        })
        .collect();
    let mut kept = Vec::with_capacity(rows.len());
    let mut excluded = 0;
    for r in rows {
        let (row, e) = r?;
        kept.push(row);
        excluded += e;
    }
    aggregate(kept, ks, bins, excluded)
}

/// `Δ_deg`: mean similarity between each point and its nearest neighbour.
pub fn degeneration_score(set: &EmbeddingSet) -> Result<f64> {
    let report = intra_mean_sim(set, &[1], 1)?;
    Ok(report.mean_sim_at[&1])
}

pub fn nn_similarity_histogram(set: &EmbeddingSet, bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    Ok(intra_mean_sim(set, &[], bins)?.histogram)
}
