//! Inverse graph convolution on embedding sets, plus the forward
//! (additive) convolution it inverts.
//!
//! All ops are row-parallel with a sequential per-row accumulation over the
//! reference rows in index order, so results do not depend on thread count.

use log::warn;
use rayon::prelude::*;

use crate::embio::EmbeddingSet;
use crate::error::{Error, Result};
use crate::simgraph::{adjacency_for, cosine_similarity_matrix, Adjacency, SimMatrix, Variant};

/// Rows with a Euclidean norm below this are left at zero by [`row_normalize`].
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Rows whose norm is this close to 1 already count as unit rows and are
/// left bit-for-bit unchanged, so normalization is idempotent.
const UNIT_SLACK: f64 = 4.0 * f64::EPSILON;

/// Variant and strengths for [`inverse_convolve_dual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGcConfig {
    pub variant: Variant,
    /// Strength of the convolution against the reference gallery.
    pub r_g: f64,
    /// Strength of the convolution against the reference queries.
    pub r_q: f64,
}

impl InvGcConfig {
    pub fn new(variant: Variant, r_g: f64, r_q: f64) -> Result<Self> {
        let cfg = InvGcConfig { variant, r_g, r_q };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("r_g", self.r_g), ("r_q", self.r_q)] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {r} must be finite and >= 0")));
            }
        }
        self.variant.validate()
    }
}

/// Scales every `dim`-wide row of `values` to unit length in place.
///
/// Rows shorter than [`DEGENERATE_NORM`] become all-zero; the number of such
/// rows is returned and logged. Rows that are already unit length are not
/// touched.
pub fn row_normalize(values: &mut [f64], dim: usize) -> usize {
    let degenerate: usize = values
        .par_chunks_mut(dim)
        .map(|row| {
            let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < DEGENERATE_NORM {
                row.fill(0.0);
                1
            } else if (n - 1.0).abs() <= UNIT_SLACK {
                0
            } else {
                row.iter_mut().for_each(|x| *x /= n);
                0
            }
        })
        .sum();
    if degenerate > 0 {
        warn!("{degenerate} row(s) had near-zero norm and were left as zeros");
    }
    degenerate
}

/// True when `a` and `b` are the same set (ids and values), in which case a
/// point must not be convolved with itself.
fn aliased(a: &EmbeddingSet, b: &EmbeddingSet) -> bool {
    a.ids() == b.ids() && a.data() == b.data()
}

fn check_shapes(x: &EmbeddingSet, adj: &Adjacency, refs: &EmbeddingSet) -> Result<()> {
    if x.dim() != refs.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: refs.dim(),
        });
    }
    if adj.n_rows() != x.n() {
        return Err(Error::DimensionMismatch {
            left: adj.n_rows(),
            right: x.n(),
        });
    }
    if adj.n_cols() != refs.n() {
        return Err(Error::DimensionMismatch {
            left: adj.n_cols(),
            right: refs.n(),
        });
    }
    Ok(())
}

/// `x_i + scale * sum_j adj_ij * ref_j`, optionally skipping `j == i`.
fn convolve(x: &EmbeddingSet, adj: &Adjacency, refs: &EmbeddingSet, scale: f64, skip_self: bool) -> Vec<f64> {
    let dim = x.dim();
    let mut out = x.data().to_vec();
    if scale == 0.0 {
        return out;
    }
    out.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
        let mut acc = vec![0.0; dim];
        for (j, &w) in adj.row(i).iter().enumerate() {
            if w == 0.0 || (skip_self && j == i) {
                continue;
            }
            for (a, &r) in acc.iter_mut().zip(refs.row(j)) {
                *a += w * r;
            }
        }
        for (v, a) in row.iter_mut().zip(&acc) {
            *v += scale * a;
        }
    });
    out
}

/// `x'_i = x_i - r * sum_j S_ij ref_j`, without normalization.
pub fn inverse_convolve_single(x: &EmbeddingSet, adj: &Adjacency, refs: &EmbeddingSet, r: f64) -> Result<EmbeddingSet> {
    check_shapes(x, adj, refs)?;
    x.with_data(convolve(x, adj, refs, -r, aliased(x, refs)))
}

/// `x'_i = x_i + sum_j S_ij ref_j`: plain aggregation, the operation the
/// inverse variant undoes.
pub fn forward_convolve(x: &EmbeddingSet, adj: &Adjacency, refs: &EmbeddingSet) -> Result<EmbeddingSet> {
    check_shapes(x, adj, refs)?;
    x.with_data(convolve(x, adj, refs, 1.0, aliased(x, refs)))
}

fn normalized(set: &EmbeddingSet) -> Result<EmbeddingSet> {
    crate::simgraph::row_norms(set)?;
    let mut data = set.data().to_vec();
    row_normalize(&mut data, set.dim());
    set.with_data(data)
}

/// One half of the dual update: `norm(G - r * S G_ref)` with `S` built from
/// `cfg.variant` over `G x refs`.
fn corrected_half(
    g: &EmbeddingSet,
    g_raw: &EmbeddingSet,
    refs: &EmbeddingSet,
    variant: Variant,
    r: f64,
) -> Result<Vec<f64>> {
    let sim = cosine_similarity_matrix(g, refs)?;
    let mut adj = adjacency_for(&sim, variant)?;
    if aliased(g_raw, refs) || aliased(g, refs) {
        adj.zero_diagonal();
    }
    let mut data = convolve(g, &adj, refs, -r, false);
    row_normalize(&mut data, g.dim());
    Ok(data)
}

/// InvGC: `G' = 1/2 [norm(G - r_g S^g G_ref) + norm(G - r_q S^q Q_ref)]`.
///
/// `gallery` is row-normalized first. `S^g` and `S^q` are built
/// independently from cosine similarities against each reference set.
pub fn inverse_convolve_dual(
    gallery: &EmbeddingSet,
    ref_gallery: &EmbeddingSet,
    ref_query: &EmbeddingSet,
    cfg: &InvGcConfig,
) -> Result<EmbeddingSet> {
    cfg.validate()?;
    for refs in [ref_gallery, ref_query] {
        if refs.dim() != gallery.dim() {
            return Err(Error::DimensionMismatch {
                left: gallery.dim(),
                right: refs.dim(),
            });
        }
    }
    let g = normalized(gallery)?;
    let half_g = corrected_half(&g, gallery, ref_gallery, cfg.variant, cfg.r_g)?;
    let half_q = corrected_half(&g, gallery, ref_query, cfg.variant, cfg.r_q)?;
    let data = half_g.iter().zip(&half_q).map(|(a, b)| 0.5 * (a + b)).collect();
    gallery.with_data(data)
}

/// Query-to-corrected-gallery cosine scores.
pub fn score_queries(queries: &EmbeddingSet, gallery: &EmbeddingSet) -> Result<SimMatrix> {
    cosine_similarity_matrix(queries, gallery)
}
