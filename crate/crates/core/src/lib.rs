//! Inverse graph convolution (InvGC) post-processing for retrieval embeddings.
//!
//! The crate is organised around a single currency type, [`EmbeddingSet`],
//! which flows through:
//!
//! - [`embio`]: binary (`IGCE`) and TSV embedding files, relevance maps.
//! - [`simgraph`]: cosine similarity matrices and the three adjacency variants.
//! - [`convolve`]: inverse / forward graph convolution updates.
//! - [`diagnostics`]: degeneration scores (MeanSim, MeanSim@k) and histograms.
//! - [`retrieval`]: ranking and R@K / MdR / MnR.
//! - [`tuner`]: grid search and ablation sweeps over the convolution strength.
//! - [`theory`]: spherical-cap fractions, their bounds, and Monte Carlo checks.
//! - [`synth`]: cone-degenerate synthetic datasets.
//! - [`cli`]: the command-line surface used by the `invgc` binary.

pub mod cli;
pub mod convolve;
pub mod diagnostics;
pub mod embio;
pub mod error;
pub mod retrieval;
pub mod simgraph;
pub mod synth;
pub mod theory;
pub mod tuner;

pub use convolve::{
    forward_convolve, inverse_convolve_dual, inverse_convolve_single, row_normalize, score_queries, InvGcConfig,
};
pub use diagnostics::{
    cross_mean_sim, degeneration_score, intra_mean_sim, nn_similarity_histogram, DegenerationReport, HistogramBin,
};
pub use embio::{
    load_embeddings, load_relevance, save_embeddings, save_relevance, validate_pairing, EmbeddingFormat, EmbeddingSet,
    PairingReport, RelevanceMap,
};
pub use error::{Error, Result};
pub use retrieval::{compute_metrics, evaluate, rank_queries, RetrievalReport};
pub use simgraph::{
    adjacency_binary, adjacency_for, adjacency_full, adjacency_local, cosine_similarity_matrix,
    row_percentile_threshold, Adjacency, SimMatrix, Variant,
};
pub use synth::{generate_cone_dataset, ConeConfig, ConeDataset};
pub use theory::{
    cap_fraction, cap_fraction_exact, cap_fraction_mc, check_corollary, check_thm1_bounds, check_thm3_bounds,
    sphere_area_volume_ratio, CapCheck, CapMeasure, CheckKind, McEstimate,
};
pub use tuner::{grid_search, subsample_reference, sweep_param, SweepCurve, SweepParam, TuneData, TuneResult};
