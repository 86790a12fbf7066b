//! Ranking and retrieval metrics (R@K, median rank, mean rank).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::embio::{EmbeddingSet, RelevanceMap};
use crate::error::{Error, Result};
use crate::simgraph::{dot, row_norms};

pub const DEFAULT_RECALL_AT: [usize; 3] = [1, 5, 10];

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    /// Percentage of queries whose best relevant item ranks at or above K.
    pub recall_at: BTreeMap<usize, f64>,
    pub median_rank: f64,
    pub mean_rank: f64,
    pub per_query_rank: BTreeMap<String, usize>,
}

impl RetrievalReport {
    pub fn recall(&self, k: usize) -> Option<f64> {
        self.recall_at.get(&k).copied()
    }
}

/// 1-based rank of the best-ranked relevant gallery item for every query.
///
/// Gallery items are ordered by descending cosine similarity, ties broken by
/// ascending gallery row index. Each query is scored on its own.
pub fn rank_queries(
    queries: &EmbeddingSet,
    gallery: &EmbeddingSet,
    rel: &RelevanceMap,
) -> Result<BTreeMap<String, usize>> {
    if queries.dim() != gallery.dim() {
        return Err(Error::DimensionMismatch {
            left: queries.dim(),
            right: gallery.dim(),
        });
    }
    let q_norms = row_norms(queries)?;
    let g_norms = row_norms(gallery)?;
    let g_index = gallery.index_of();

    let ranks: Vec<Result<(String, usize)>> = queries
        .ids()
        .par_iter()
        .enumerate()
        .map(|(qi, qid)| {
            let relevant: Vec<usize> = rel
                .relevant(qid)
                .into_iter()
                .flatten()
                .filter_map(|g| g_index.get(g.as_str()).copied())
                .collect();
            if relevant.is_empty() {
                return Err(Error::MissingRelevance(qid.clone()));
            }
            let q = queries.row(qi);
            let scores: Vec<f64> = (0..gallery.n())
                .map(|j| dot(q, gallery.row(j)) / (q_norms[qi] * g_norms[j]))
                .collect();
            let rank = relevant
                .iter()
                .map(|&r| {
                    let s = scores[r];
                    1 + scores
                        .iter()
                        .enumerate()
                        .filter(|&(j, &t)| t > s || (t == s && j < r))
                        .count()
                })
                .min()
                .expect("relevant is non-empty");
            Ok((qid.clone(), rank))
        })
        .collect();
    ranks.into_iter().collect()
}

pub fn compute_metrics(ranks: &BTreeMap<String, usize>, ks: &[usize]) -> Result<RetrievalReport> {
    if ranks.is_empty() {
        return Err(Error::InsufficientData("no ranked queries".into()));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("recall cutoff K must be positive".into()));
    }
    let n = ranks.len() as f64;
    let recall_at = ks
        .iter()
        .map(|&k| (k, 100.0 * ranks.values().filter(|&&r| r <= k).count() as f64 / n))
        .collect();
    let mut sorted: Vec<usize> = ranks.values().copied().collect();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    let median_rank = if sorted.len() % 2 == 1 {
        sorted[mid] as f64
    } else {
        (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
    };
    let mean_rank = sorted.iter().sum::<usize>() as f64 / n;
    Ok(RetrievalReport {
        recall_at,
        median_rank,
        mean_rank,
        per_query_rank: ranks.clone(),
    })
}

/// `rank_queries` followed by `compute_metrics`.
pub fn evaluate(
    queries: &EmbeddingSet,
    gallery: &EmbeddingSet,
    rel: &RelevanceMap,
    ks: &[usize],
) -> Result<RetrievalReport> {
    compute_metrics(&rank_queries(queries, gallery, rel)?, ks)
}
