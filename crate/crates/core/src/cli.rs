//! Command-line surface. Reports go to the supplied writer as
//! `metric<TAB>value` lines; logs go to stderr.
//!
//! Embedding paths ending in `.tsv`/`.txt` are read and written as TSV,
//! everything else as `IGCE` binary with an `.ids` sidecar.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::convolve::{inverse_convolve_dual, InvGcConfig};
use crate::diagnostics::{cross_mean_sim, degeneration_score, intra_mean_sim, DegenerationReport};
use crate::embio::{
    load_embeddings, load_relevance, save_embeddings, save_relevance, validate_pairing, EmbeddingFormat, EmbeddingSet,
    RelevanceMap,
};
use crate::error::Error;
use crate::retrieval::{evaluate, DEFAULT_RECALL_AT};
use crate::simgraph::Variant;
use crate::synth::{generate_cone_dataset, ConeConfig};
use crate::theory::{round_grid, verify_grid, CapCheck, CheckKind, TheoryGrid};
use crate::tuner::{
    grid_search, sweep_param, SweepParam, TuneData, DEFAULT_K_PERCENT, DEFAULT_P_PERCENT, DEFAULT_R_GRID,
};

#[derive(Debug, Parser)]
#[command(
    name = "invgc",
    version,
    about = "Inverse graph convolution for retrieval embeddings"
)]
pub struct Cli {
    /// Worker threads (defaults to rayon's choice). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degeneration report for a gallery, optionally against a query set.
    Diagnose(DiagnoseArgs),
    /// Apply InvGC to a gallery and write the corrected embeddings.
    Apply(ApplyArgs),
    /// Retrieval metrics of a query set against a gallery.
    Eval(EvalArgs),
    /// Grid-search r_g and r_q on a validation split.
    Tune(TuneArgs),
    /// Ablation sweep over one parameter.
    Sweep(SweepArgs),
    /// Write a synthetic cone-degenerate dataset.
    Synth(SynthArgs),
    /// Check the spherical-cap relations on a grid.
    VerifyTheory(VerifyTheoryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Local,
    Avgpool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long, requires = "relevance")]
    pub query: Option<PathBuf>,
    #[arg(long, requires = "query")]
    pub relevance: Option<PathBuf>,
    /// Comma-separated k values for MeanSim@k.
    #[arg(long)]
    pub topk: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Write the nearest-neighbour histogram as TSV.
    #[arg(long)]
    pub dump_hist: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VariantFlags {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    /// LocalAdj neighbourhood in percent (local only, default 1).
    #[arg(long)]
    pub k: Option<f64>,
    /// AvgPool neighbourhood in percent (avgpool only, default 100).
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub ref_gallery: PathBuf,
    #[arg(long)]
    pub ref_query: PathBuf,
    #[command(flatten)]
    pub variant: VariantFlags,
    #[arg(long)]
    pub rg: f64,
    #[arg(long)]
    pub rq: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub relevance: PathBuf,
    /// Comma-separated recall cutoffs.
    #[arg(long)]
    pub recall_at: Option<String>,
    /// Write per-query ranks as `query_id<TAB>rank`.
    #[arg(long)]
    pub dump_ranks: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub val_query: PathBuf,
    #[arg(long)]
    pub val_gallery: PathBuf,
    #[arg(long)]
    pub ref_gallery: PathBuf,
    #[arg(long)]
    pub ref_query: PathBuf,
    #[arg(long)]
    pub relevance: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub variant: VariantFlags,
    /// List or range of r_g values.
    #[arg(long)]
    pub rg_grid: Option<String>,
    /// List or range of r_q values.
    #[arg(long)]
    pub rq_grid: Option<String>,
    /// Write the full grid trace as TSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParamArg {
    Rg,
    Rq,
    K,
    Ratio,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParamArg,
    /// List or range of parameter values.
    #[arg(long)]
    pub values: String,
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub variant: VariantFlags,
    /// Fixed r_g while another parameter varies.
    #[arg(long, default_value_t = 0.0)]
    pub rg: f64,
    /// Fixed r_q while another parameter varies.
    #[arg(long, default_value_t = 0.0)]
    pub rq: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the curve as TSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub items: usize,
    #[arg(long, default_value_t = 1000)]
    pub refs: usize,
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.15)]
    pub spread: f64,
    #[arg(long, default_value_t = 0.1)]
    pub qnoise: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output files are `<prefix>gallery.emb`, `<prefix>query.emb`, ...
    #[arg(long)]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct VerifyTheoryArgs {
    /// Dimension range `start:stop[:step]` or list.
    #[arg(long, default_value = "2:16")]
    pub n: String,
    /// Radius range `start:stop[:step]` or list.
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub b: String,
    /// Monte Carlo samples per theorem-3 cell (0 = off).
    #[arg(long, default_value_t = 0)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
    /// Exit with status 3 if any reported check fails.
    #[arg(long)]
    pub strict: bool,
    /// Also report the retrieval-probability bounds against the cap fraction.
    #[arg(long)]
    pub include_thm1: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] Error),
    #[error("{0} theory check(s) failed")]
    TheoryFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::TheoryFailed(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `a,b,c` or an inclusive range `start:stop[:step]` (step defaults to 1).
pub fn parse_values(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::Usage(format!("bad value list {spec:?}: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (start, stop, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1.0),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(bad("expected start:stop[:step]")),
        };
        if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) || stop < start {
            return Err(bad("need start <= stop and step > 0"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| round_grid(start + i as f64 * step)).collect())
    } else {
        let v: Vec<f64> = spec.split(',').map(num).collect::<CliResult<_>>()?;
        if v.is_empty() {
            return Err(bad("empty"));
        }
        Ok(v)
    }
}

fn parse_counts(spec: &str) -> CliResult<Vec<usize>> {
    parse_values(spec)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Usage(format!(
                    "{v} is not a non-negative integer in {spec:?}"
                )))
            }
        })
        .collect()
}

fn variant_of(flags: &VariantFlags) -> CliResult<Variant> {
    let v = match flags.variant {
        VariantArg::Full => {
            if flags.k.is_some() || flags.p.is_some() {
                return Err(CliError::Usage("--k/--p do not apply to the full variant".into()));
            }
            Variant::Full
        }
        VariantArg::Local => {
            if flags.p.is_some() {
                return Err(CliError::Usage("--p only applies to --variant avgpool".into()));
            }
            Variant::Local {
                k_percent: flags.k.unwrap_or(DEFAULT_K_PERCENT),
            }
        }
        VariantArg::Avgpool => {
            if flags.k.is_some() {
                return Err(CliError::Usage("--k only applies to --variant local".into()));
            }
            Variant::Binary {
                p_percent: flags.p.unwrap_or(DEFAULT_P_PERCENT),
            }
        }
    };
    v.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(v)
}

fn load(path: &Path) -> CliResult<EmbeddingSet> {
    Ok(load_embeddings(path, EmbeddingFormat::from_path(path))?)
}

fn save(set: &EmbeddingSet, path: &Path) -> CliResult<()> {
    Ok(save_embeddings(set, path, EmbeddingFormat::from_path(path))?)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| {
        CliError::Data(Error::Io {
            path: path.to_owned(),
            source: e,
        })
    })
}

fn kv(out: &mut dyn Write, key: impl Display, value: impl Display) -> CliResult<()> {
    writeln!(out, "{key}\t{value}")?;
    Ok(())
}

fn checked_pairing(q: &EmbeddingSet, g: &EmbeddingSet, rel: &RelevanceMap) -> CliResult<()> {
    let report = validate_pairing(q, g, rel);
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Data(Error::InvalidParameter(report.to_string())))
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Diagnose(a) => diagnose(a, out),
        Command::Apply(a) => apply(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Tune(a) => tune(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Synth(a) => synth(a, out),
        Command::VerifyTheory(a) => verify_theory(a, out),
    }
}

fn write_report(out: &mut dyn Write, prefix: &str, r: &DegenerationReport) -> CliResult<()> {
    kv(out, format!("{prefix}points"), r.points)?;
    kv(out, format!("{prefix}mean_sim"), r.mean_sim)?;
    kv(out, format!("{prefix}std_sim"), r.std_sim)?;
    kv(out, format!("{prefix}min_sim"), r.min_sim)?;
    for (k, v) in &r.mean_sim_at {
        kv(out, format!("{prefix}mean_sim@{k}"), v)?;
    }
    if let Some(d) = r.degeneration() {
        kv(out, format!("{prefix}ddeg"), d)?;
    }
    kv(out, format!("{prefix}excluded_pairs"), r.excluded_pairs)
}

fn diagnose(a: DiagnoseArgs, out: &mut dyn Write) -> CliResult<()> {
    let g = load(&a.gallery)?;
    let ks = match &a.topk {
        Some(s) => parse_counts(s)?,
        None => [1, 10].into_iter().filter(|&k| k < g.n()).collect(),
    };
    let intra = intra_mean_sim(&g, &ks, a.bins)?;
    write_report(out, "", &intra)?;
    if let (Some(qp), Some(rp)) = (&a.query, &a.relevance) {
        let q = load(qp)?;
        let rel = load_relevance(rp)?;
        checked_pairing(&q, &g, &rel)?;
        let cross = cross_mean_sim(&g, &q, &rel, &ks, a.bins)?;
        write_report(out, "cross_", &cross)?;
    }
    if let Some(path) = &a.dump_hist {
        let mut tsv = String::from("bin_lower\tbin_upper\tcount\n");
        for b in &intra.histogram {
            tsv.push_str(&format!("{}\t{}\t{}\n", b.lower, b.upper, b.count));
        }
        write_file(path, &tsv)?;
    }
    Ok(())
}

fn apply(a: ApplyArgs, out: &mut dyn Write) -> CliResult<()> {
    let variant = variant_of(&a.variant)?;
    let cfg = InvGcConfig::new(variant, a.rg, a.rq).map_err(|e| CliError::Usage(e.to_string()))?;
    let g = load(&a.gallery)?;
    let ref_g = load(&a.ref_gallery)?;
    let ref_q = load(&a.ref_query)?;
    info!("applying {variant} with r_g={} r_q={} to {} rows", a.rg, a.rq, g.n());
    let corrected = inverse_convolve_dual(&g, &ref_g, &ref_q, &cfg)?;
    save(&corrected, &a.out)?;
    kv(out, "rows", corrected.n())?;
    kv(out, "dim", corrected.dim())?;
    kv(out, "variant", variant)?;
    kv(out, "rg", a.rg)?;
    kv(out, "rq", a.rq)?;
    if g.n() >= 2 {
        kv(out, "ddeg_before", degeneration_score(&g)?)?;
        kv(out, "ddeg_after", degeneration_score(&corrected)?)?;
    }
    Ok(())
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let ks = match &a.recall_at {
        Some(s) => parse_counts(s)?,
        None => DEFAULT_RECALL_AT.to_vec(),
    };
    let q = load(&a.query)?;
    let g = load(&a.gallery)?;
    let rel = load_relevance(&a.relevance)?;
    checked_pairing(&q, &g, &rel)?;
    let report = evaluate(&q, &g, &rel, &ks)?;
    kv(out, "queries", report.per_query_rank.len())?;
    for (k, v) in &report.recall_at {
        kv(out, format!("R@{k}"), v)?;
    }
    kv(out, "MdR", report.median_rank)?;
    kv(out, "MnR", report.mean_rank)?;
    if let Some(path) = &a.dump_ranks {
        let mut tsv = String::new();
        // Query set order, not id order.
        for id in q.ids() {
            tsv.push_str(&format!("{id}\t{}\n", report.per_query_rank[id]));
        }
        write_file(path, &tsv)?;
    }
    Ok(())
}

struct LoadedData {
    val_query: EmbeddingSet,
    val_gallery: EmbeddingSet,
    ref_gallery: EmbeddingSet,
    ref_query: EmbeddingSet,
    relevance: RelevanceMap,
}

impl LoadedData {
    fn load(a: &DatasetArgs) -> CliResult<Self> {
        let d = LoadedData {
            val_query: load(&a.val_query)?,
            val_gallery: load(&a.val_gallery)?,
            ref_gallery: load(&a.ref_gallery)?,
            ref_query: load(&a.ref_query)?,
            relevance: load_relevance(&a.relevance)?,
        };
        checked_pairing(&d.val_query, &d.val_gallery, &d.relevance)?;
        Ok(d)
    }

    fn view(&self) -> TuneData<'_> {
        TuneData {
            val_query: &self.val_query,
            val_gallery: &self.val_gallery,
            ref_gallery: &self.ref_gallery,
            ref_query: &self.ref_query,
            relevance: &self.relevance,
        }
    }
}

const TRACE_HEADER: &str = "param_or_cfg\tR@1\tR@5\tMnR\tDdeg\n";

fn tune(a: TuneArgs, out: &mut dyn Write) -> CliResult<()> {
    let variant = variant_of(&a.variant)?;
    let grid = |s: &Option<String>| match s {
        Some(s) => parse_values(s),
        None => Ok(DEFAULT_R_GRID.to_vec()),
    };
    let (rg_grid, rq_grid) = (grid(&a.rg_grid)?, grid(&a.rq_grid)?);
    if rg_grid.iter().chain(&rq_grid).any(|&r| r < 0.0) {
        return Err(CliError::Usage("grid values must be >= 0".into()));
    }
    let d = LoadedData::load(&a.data)?;
    let baseline = evaluate(&d.val_query, &d.val_gallery, &d.relevance, &DEFAULT_RECALL_AT)?;
    let result = grid_search(&d.view(), variant, &rg_grid, &rq_grid)?;
    kv(out, "variant", variant)?;
    kv(out, "cells", result.grid_trace.len())?;
    kv(out, "baseline_R@1", baseline.recall_at[&1])?;
    kv(out, "best_rg", result.best_cfg.r_g)?;
    kv(out, "best_rq", result.best_cfg.r_q)?;
    for (k, v) in &result.best_report.recall_at {
        kv(out, format!("R@{k}"), v)?;
    }
    kv(out, "MdR", result.best_report.median_rank)?;
    kv(out, "MnR", result.best_report.mean_rank)?;
    if let Some(path) = &a.trace {
        let mut tsv = String::from(TRACE_HEADER);
        for e in &result.grid_trace {
            tsv.push_str(&format!(
                "rg={},rq={}\t{}\t{}\t{}\t{}\n",
                e.cfg.r_g, e.cfg.r_q, e.recall_at_1, e.recall_at_5, e.mean_rank, e.degeneration
            ));
        }
        write_file(path, &tsv)?;
    }
    Ok(())
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let variant = variant_of(&a.variant)?;
    let param = match a.param {
        SweepParamArg::Rg => SweepParam::Rg,
        SweepParamArg::Rq => SweepParam::Rq,
        SweepParamArg::K => SweepParam::K,
        SweepParamArg::Ratio => SweepParam::Ratio,
    };
    if param == SweepParam::K && variant == Variant::Full {
        return Err(CliError::Usage("--param k needs --variant local or avgpool".into()));
    }
    let values = parse_values(&a.values)?;
    let fixed = InvGcConfig::new(variant, a.rg, a.rq).map_err(|e| CliError::Usage(e.to_string()))?;
    let d = LoadedData::load(&a.data)?;
    let curve = sweep_param(&fixed, param, &values, &d.view(), a.seed)?;
    let name = param.name();
    kv(out, "param", name)?;
    kv(out, "points", curve.points.len())?;
    for p in &curve.points {
        kv(out, format!("{name}={}:R@1", p.value), p.recall_at_1)?;
        kv(out, format!("{name}={}:Ddeg", p.value), p.degeneration)?;
    }
    if let Some(path) = &a.out {
        let mut tsv = String::from(TRACE_HEADER);
        for p in &curve.points {
            tsv.push_str(&format!(
                "{name}={}\t{}\t{}\t{}\t{}\n",
                p.value, p.recall_at_1, p.recall_at_5, p.mean_rank, p.degeneration
            ));
        }
        write_file(path, &tsv)?;
    }
    Ok(())
}

fn synth(a: SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = ConeConfig {
        n_items: a.items,
        n_ref: a.refs,
        dim: a.dim,
        cone_spread: a.spread,
        query_noise: a.qnoise,
        seed: a.seed,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let d = generate_cone_dataset(&cfg)?;
    let path = |name: &str| PathBuf::from(format!("{}{name}", a.out_prefix));
    if let Some(parent) = path("x").parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| {
            CliError::Data(Error::Io {
                path: parent.to_owned(),
                source: e,
            })
        })?;
    }
    for (name, set) in [
        ("gallery.emb", &d.gallery),
        ("query.emb", &d.query),
        ("ref_gallery.emb", &d.ref_gallery),
        ("ref_query.emb", &d.ref_query),
    ] {
        save(set, &path(name))?;
        kv(out, name.trim_end_matches(".emb"), path(name).display())?;
    }
    save_relevance(&d.relevance, path("relevance.tsv"))?;
    save_relevance(&d.ref_relevance, path("ref_relevance.tsv"))?;
    kv(out, "relevance", path("relevance.tsv").display())?;
    kv(out, "ref_relevance", path("ref_relevance.tsv").display())?;
    kv(out, "ddeg_gallery", degeneration_score(&d.gallery)?)?;
    Ok(())
}

fn theory_row(c: &CapCheck) -> String {
    let b = match (c.b, c.b2) {
        (Some(b1), Some(b2)) => format!("{b1},{b2}"),
        (Some(b), None) => b.to_string(),
        _ => "-".into(),
    };
    let mc = c.mc.map_or_else(|| "NA".to_string(), |m| m.estimate.to_string());
    let lower = c.lower.map_or_else(|| "NA".to_string(), |l| l.to_string());
    format!(
        "{}\t{}\t{b}\t{}\t{mc}\t{lower}\t{}\t{}\n",
        c.kind.name(),
        c.n,
        c.exact,
        c.upper,
        c.holds
    )
}

pub const THEORY_HEADER: &str = "check\tn\tb\texact\tmc\tlower\tupper\tholds\n";

fn verify_theory(a: VerifyTheoryArgs, out: &mut dyn Write) -> CliResult<()> {
    let dims = parse_counts(&a.n)?;
    let radii = parse_values(&a.b)?;
    if dims.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("--n values must be >= 2".into()));
    }
    if radii.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
        return Err(CliError::Usage("--b values must lie in (0, 1]".into()));
    }
    let grid = TheoryGrid {
        dims,
        radii,
        mc_samples: a.mc_samples,
        seed: a.seed,
        include_thm1: a.include_thm1,
        ..TheoryGrid::default()
    };
    let checks = verify_grid(&grid)?;
    out.write_all(THEORY_HEADER.as_bytes())?;
    for c in &checks {
        out.write_all(theory_row(c).as_bytes())?;
    }
    let failed = checks.iter().filter(|c| !c.holds).count();
    let thm1_failed = checks.iter().filter(|c| !c.holds && c.kind == CheckKind::Thm1).count();
    info!("{} checks, {failed} failed ({thm1_failed} of them thm1)", checks.len());
    if a.strict && failed > 0 {
        return Err(CliError::TheoryFailed(failed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0,0.5,1").unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(parse_values("2:5").unwrap(), [2.0, 3.0, 4.0, 5.0]);
        let b = parse_values("0.05:0.95:0.05").unwrap();
        assert_eq!(b.len(), 19);
        assert_eq!(b[2], 0.15);
        assert_eq!(b[9], 0.5);
        assert_eq!(b[18], 0.95);
        assert!(parse_values("1:0").is_err());
        assert!(parse_values("a,b").is_err());
        assert!(parse_counts("1.5").is_err());
    }

    #[test]
    fn variant_flag_rules() {
        let f = |variant, k, p| VariantFlags { variant, k, p };
        assert_eq!(
            variant_of(&f(VariantArg::Local, None, None)).unwrap(),
            Variant::Local { k_percent: 1.0 }
        );
        assert_eq!(
            variant_of(&f(VariantArg::Avgpool, None, None)).unwrap(),
            Variant::Binary { p_percent: 100.0 }
        );
        assert!(variant_of(&f(VariantArg::Local, None, Some(10.0))).is_err());
        assert!(variant_of(&f(VariantArg::Avgpool, Some(1.0), None)).is_err());
        assert!(variant_of(&f(VariantArg::Full, Some(1.0), None)).is_err());
        assert!(variant_of(&f(VariantArg::Local, Some(0.0), None)).is_err());
    }
}
