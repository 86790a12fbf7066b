//! Cosine similarity matrices and the adjacency matrices built from them.

use rayon::prelude::*;

use crate::embio::EmbeddingSet;
use crate::error::{Error, Result};

/// Slack allowed outside `[-1, 1]` before a similarity is treated as a bug.
pub const SIM_SLACK: f64 = 1e-9;

/// Dense `n_rows x n_cols` cosine similarities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    values: Vec<f64>,
    n_cols: usize,
}

impl SimMatrix {
    /// Builds a matrix from raw values; entries are clamped to `[-1, 1]`.
    pub fn from_values(row_ids: Vec<String>, col_ids: Vec<String>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != row_ids.len() * col_ids.len() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: row_ids.len() * col_ids.len(),
            });
        }
        for v in &mut values {
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(SimMatrix {
            n_cols: col_ids.len(),
            row_ids,
            col_ids,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Which adjacency an inverse convolution uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Raw cosine similarities (mean-centered when used for InvGC).
    Full,
    /// Only each row's top `k_percent` similarities are kept (LocalAdj).
    Local { k_percent: f64 },
    /// Top `p_percent` entries set to 1, others 0 (AvgPool).
    Binary { p_percent: f64 },
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::Full => Ok(()),
            Variant::Local { k_percent: pct } | Variant::Binary { p_percent: pct } => check_percent(pct),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Local { .. } => "local",
            Variant::Binary { .. } => "avgpool",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Full => write!(f, "full"),
            Variant::Local { k_percent } => write!(f, "local(k={k_percent})"),
            Variant::Binary { p_percent } => write!(f, "avgpool(p={p_percent})"),
        }
    }
}

fn check_percent(pct: f64) -> Result<()> {
    if pct.is_finite() && pct > 0.0 && pct <= 100.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("percentage {pct} outside (0, 100]")))
    }
}

/// Convolution weights over `rows x refs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    pub variant: Variant,
    pub centered: bool,
}

impl Adjacency {
    pub fn from_values(
        values: Vec<f64>,
        n_rows: usize,
        n_cols: usize,
        variant: Variant,
        centered: bool,
    ) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: n_rows * n_cols,
            });
        }
        Ok(Adjacency {
            values,
            n_rows,
            n_cols,
            variant,
            centered,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Zeroes the diagonal. Used when rows and references are the same set.
    pub(crate) fn zero_diagonal(&mut self) {
        for i in 0..self.n_rows.min(self.n_cols) {
            self.values[i * self.n_cols + i] = 0.0;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn row_norms(set: &EmbeddingSet) -> Result<Vec<f64>> {
    set.rows()
        .zip(set.ids())
        .map(|(row, id)| {
            let n = norm(row);
            if n > 0.0 {
                Ok(n)
            } else {
                Err(Error::ZeroNorm { id: id.clone() })
            }
        })
        .collect()
}

pub fn cosine_similarity_matrix(rows: &EmbeddingSet, cols: &EmbeddingSet) -> Result<SimMatrix> {
    if rows.dim() != cols.dim() {
        return Err(Error::DimensionMismatch {
            left: rows.dim(),
            right: cols.dim(),
        });
    }
    let r_norms = row_norms(rows)?;
    let c_norms = row_norms(cols)?;
    let n_cols = cols.n();
    let mut values = vec![0.0; rows.n() * n_cols];
    values.par_chunks_mut(n_cols).enumerate().for_each(|(i, out)| {
        let x = rows.row(i);
        for (j, slot) in out.iter_mut().enumerate() {
            let s = dot(x, cols.row(j)) / (r_norms[i] * c_norms[j]);
            debug_assert!(s.abs() <= 1.0 + SIM_SLACK, "cosine {s} out of range");
            *slot = s;
        }
    });
    SimMatrix::from_values(rows.ids().to_vec(), cols.ids().to_vec(), values)
}

/// Number of entries kept by a top-`pct` percent rule over `len` entries:
/// `max(1, ceil(pct / 100 * len))`.
pub fn top_percent_count(pct: f64, len: usize) -> usize {
    // The 1e-9 absorbs products such as 0.07 * 100 that land just above an integer.
    let raw = (pct * len as f64 / 100.0 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(len)
}

/// The m-th largest value of `row`, `m = max(1, ceil(k/100 * len))`.
pub fn row_percentile_threshold(row: &[f64], k_percent: f64) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::InsufficientData("empty similarity row".into()));
    }
    check_percent(k_percent)?;
    let m = top_percent_count(k_percent, row.len());
    let mut scratch = row.to_vec();
    let (_, nth, _) = scratch.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    Ok(*nth)
}

pub fn adjacency_full(sim: &SimMatrix, center: bool) -> Adjacency {
    let mut values = sim.values().to_vec();
    if center && !values.is_empty() {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        for v in &mut values {
            *v -= mean;
        }
    }
    Adjacency {
        values,
        n_rows: sim.n_rows(),
        n_cols: sim.n_cols(),
        variant: Variant::Full,
        centered: center,
    }
}

fn thresholded(sim: &SimMatrix, pct: f64, keep: impl Fn(f64) -> f64 + Sync) -> Result<Vec<f64>> {
    check_percent(pct)?;
    let n_cols = sim.n_cols();
    if n_cols == 0 {
        return Ok(Vec::new());
    }
    let mut values = vec![0.0; sim.n_rows() * n_cols];
    values
        .par_chunks_mut(n_cols)
        .enumerate()
        .try_for_each(|(i, out)| -> Result<()> {
            let row = sim.row(i);
            let t = row_percentile_threshold(row, pct)?;
            for (slot, &s) in out.iter_mut().zip(row) {
                *slot = if s >= t { keep(s) } else { 0.0 };
            }
            Ok(())
        })?;
    Ok(values)
}

/// LocalAdj: per row, similarities at or above the top-`k_percent` threshold
/// are kept verbatim and the rest are zeroed. Never centered.
pub fn adjacency_local(sim: &SimMatrix, k_percent: f64) -> Result<Adjacency> {
    let values = thresholded(sim, k_percent, |s| s)?;
    Ok(Adjacency {
        values,
        n_rows: sim.n_rows(),
        n_cols: sim.n_cols(),
        variant: Variant::Local { k_percent },
        centered: false,
    })
}

/// AvgPool: per row, 1 at or above the top-`p_percent` threshold, else 0.
pub fn adjacency_binary(sim: &SimMatrix, p_percent: f64) -> Result<Adjacency> {
    let values = thresholded(sim, p_percent, |_| 1.0)?;
    Ok(Adjacency {
        values,
        n_rows: sim.n_rows(),
        n_cols: sim.n_cols(),
        variant: Variant::Binary { p_percent },
        centered: false,
    })
}

/// The adjacency InvGC uses for `variant`: Full is mean-centered, the
/// thresholded variants are not.
pub fn adjacency_for(sim: &SimMatrix, variant: Variant) -> Result<Adjacency> {
    match variant {
        Variant::Full => Ok(adjacency_full(sim, true)),
        Variant::Local { k_percent } => adjacency_local(sim, k_percent),
        Variant::Binary { p_percent } => adjacency_binary(sim, p_percent),
    }
}
