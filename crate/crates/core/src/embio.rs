//! Embedding and relevance file I/O.
//!
//! Binary layout (`IGCE`, all little-endian):
//!
//! | offset | size | field                     |
//! |--------|------|---------------------------|
//! | 0      | 4    | magic `b"IGCE"`           |
//! | 4      | 2    | version (u16, = 1)        |
//! | 6      | 2    | reserved (u16, = 0)       |
//! | 8      | 8    | n_rows (u64)              |
//! | 16     | 8    | n_dims (u64)              |
//! | 24     | 4·n·d| f32 payload, row-major    |
//!
//! Ids live in a sidecar `<path>.ids`, one per line. Without a sidecar rows
//! are named `"0".."N-1"`.
//!
//! TSV embeddings are `<id>\t<v1>\t...\t<vd>` per line; relevance TSV is
//! `<query_id>\t<gallery_id>` per line. Neither has a header.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"IGCE";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Binary,
    Tsv,
}

impl EmbeddingFormat {
    /// `.tsv` and `.txt` are read as TSV, anything else as `IGCE` binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") || ext.eq_ignore_ascii_case("txt") => EmbeddingFormat::Tsv,
            _ => EmbeddingFormat::Binary,
        }
    }
}

/// An id-indexed `N x d` matrix of finite reals, stored row-major in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    ids: Vec<String>,
    data: Vec<f64>,
    dim: usize,
}

impl EmbeddingSet {
    pub fn new(ids: Vec<String>, data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be >= 1".into()));
        }
        if ids.is_empty() {
            return Err(Error::InsufficientData(
                "embedding set must have at least one row".into(),
            ));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: ids.len() * dim,
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("row {} column {}", pos / dim, pos % dim),
            });
        }
        check_unique(&ids, |i| format!("row {i}"))?;
        Ok(EmbeddingSet { ids, data, dim })
    }

    /// Builds a set from explicit rows with ids `"0".."N-1"`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: bad.len(),
                right: dim,
            });
        }
        let ids = default_ids(rows.len());
        Self::new(ids, rows.concat(), dim)
    }

    pub fn with_ids(self, ids: Vec<String>) -> Result<Self> {
        Self::new(ids, self.data, self.dim)
    }

    /// Replaces the matrix, keeping ids. Used by the convolution ops.
    pub(crate) fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.ids.clone(), data, self.dim)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let ids = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let data = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Self::new(ids, data, self.dim)
    }
}

fn default_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_unique(ids: &[String], location: impl Fn(usize) -> String) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId {
                id: id.clone(),
                location: location(i),
            });
        }
    }
    Ok(())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

pub fn load_embeddings(path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    match format {
        EmbeddingFormat::Binary => load_binary(path),
        EmbeddingFormat::Tsv => load_tsv(path),
    }
}

pub fn save_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        EmbeddingFormat::Binary => save_binary(set, path),
        EmbeddingFormat::Tsv => save_tsv(set, path),
    }
}

fn load_binary(path: &Path) -> Result<EmbeddingSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            "offset 0",
            format!("file is {} bytes, header needs {HEADER_LEN}", bytes.len()),
        ));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::format(path, "offset 0", "bad magic, expected \"IGCE\""));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::format(
            path,
            "offset 4",
            format!("unsupported version {version}"),
        ));
    }
    let reserved = u16::from_le_bytes([bytes[6], bytes[7]]);
    if reserved != 0 {
        return Err(Error::format(
            path,
            "offset 6",
            format!("reserved field is {reserved}, expected 0"),
        ));
    }
    let n_rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let n_dims = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if n_rows == 0 {
        return Err(Error::format(path, "offset 8", "n_rows must be >= 1"));
    }
    if n_dims == 0 {
        return Err(Error::format(path, "offset 16", "n_dims must be >= 1"));
    }
    let payload = n_rows
        .checked_mul(n_dims)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::format(path, "offset 8", "n_rows * n_dims overflows"))?;
    if bytes.len() - HEADER_LEN != payload {
        return Err(Error::format(
            path,
            format!("offset {HEADER_LEN}"),
            format!(
                "payload is {} bytes, header implies {payload}",
                bytes.len() - HEADER_LEN
            ),
        ));
    }
    let (n, dim) = (n_rows as usize, n_dims as usize);
    let mut data = Vec::with_capacity(n * dim);
    for (k, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFinite {
                location: format!(
                    "{}: offset {} (row {}, column {})",
                    path.display(),
                    HEADER_LEN + 4 * k,
                    k / dim,
                    k % dim
                ),
            });
        }
        data.push(f64::from(v));
    }

    let sidecar = sidecar_path(path);
    let ids = if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let ids: Vec<String> = text.lines().map(str::to_owned).collect();
        if ids.len() != n {
            return Err(Error::format(
                &sidecar,
                format!("line {}", ids.len()),
                format!("{} ids for {n} rows", ids.len()),
            ));
        }
        if let Some(i) = ids.iter().position(String::is_empty) {
            return Err(Error::format(&sidecar, format!("line {}", i + 1), "empty id"));
        }
        check_unique(&ids, |i| format!("{} line {}", sidecar.display(), i + 1))?;
        ids
    } else {
        default_ids(n)
    };
    EmbeddingSet::new(ids, data, dim)
}

fn save_binary(set: &EmbeddingSet, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * set.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&0u16.to_le_bytes());
    buf.extend_from_slice(&(set.n() as u64).to_le_bytes());
    buf.extend_from_slice(&(set.dim as u64).to_le_bytes());
    for &v in &set.data {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, &buf).map_err(|e| Error::io(path, e))?;

    let sidecar = sidecar_path(path);
    let mut ids = String::new();
    for id in &set.ids {
        ids.push_str(id);
        ids.push('\n');
    }
    fs::write(&sidecar, ids).map_err(|e| Error::io(&sidecar, e))
}

fn load_tsv(path: &Path) -> Result<EmbeddingSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ids = Vec::new();
    let mut data = Vec::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let loc = || format!("line {lineno}");
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        if id.is_empty() {
            return Err(Error::format(path, loc(), "blank line or empty id"));
        }
        let mut count = 0;
        for (col, field) in fields.enumerate() {
            let v: f32 = field.parse().map_err(|_| {
                Error::format(
                    path,
                    format!("line {lineno} column {}", col + 2),
                    format!("cannot parse {field:?} as a number"),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    location: format!("{}: line {lineno} column {}", path.display(), col + 2),
                });
            }
            data.push(f64::from(v));
            count += 1;
        }
        match dim {
            None if count == 0 => return Err(Error::format(path, loc(), "row has no values")),
            None => dim = Some(count),
            Some(d) if d != count => {
                return Err(Error::format(
                    path,
                    loc(),
                    format!("row has {count} values, expected {d}"),
                ))
            }
            Some(_) => {}
        }
        ids.push(id.to_owned());
    }
    let dim = dim.ok_or_else(|| Error::format(path, "line 1", "empty file"))?;
    check_unique(&ids, |i| format!("{} line {}", path.display(), i + 1))?;
    EmbeddingSet::new(ids, data, dim)
}

fn save_tsv(set: &EmbeddingSet, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (id, row) in set.ids.iter().zip(set.rows()) {
        out.push_str(id);
        for &v in row {
            // Files carry f32 precision in both formats.
            let _ = write!(out, "\t{}", v as f32);
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Query id to the set of relevant gallery ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelevanceMap {
    pairs: BTreeMap<String, BTreeSet<String>>,
}

impl RelevanceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query: impl Into<String>, gallery: impl Into<String>) {
        self.pairs.entry(query.into()).or_default().insert(gallery.into());
    }

    /// Query i is relevant to gallery i.
    pub fn diagonal(queries: &EmbeddingSet, gallery: &EmbeddingSet) -> Self {
        let mut rel = Self::new();
        for (q, g) in queries.ids().iter().zip(gallery.ids()) {
            rel.insert(q.clone(), g.clone());
        }
        rel
    }

    pub fn relevant(&self, query: &str) -> Option<&BTreeSet<String>> {
        self.pairs.get(query)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.pairs.iter()
    }

    /// Gallery id to the queries that list it as relevant.
    pub fn inverted(&self) -> HashMap<&str, Vec<&str>> {
        let mut inv: HashMap<&str, Vec<&str>> = HashMap::new();
        for (q, gs) in &self.pairs {
            for g in gs {
                inv.entry(g.as_str()).or_default().push(q.as_str());
            }
        }
        inv
    }
}

pub fn load_relevance(path: impl AsRef<Path>) -> Result<RelevanceMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rel = RelevanceMap::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(q), Some(g), None) if !q.is_empty() && !g.is_empty() => rel.insert(q, g),
            _ => {
                return Err(Error::format(
                    path,
                    format!("line {lineno}"),
                    format!("expected \"query_id<TAB>gallery_id\", got {line:?}"),
                ))
            }
        }
    }
    Ok(rel)
}

pub fn save_relevance(rel: &RelevanceMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (q, gs) in rel.iter() {
        for g in gs {
            writeln!(w, "{q}\t{g}").map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Findings from cross-checking a relevance map against its embedding sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairingReport {
    /// Query ids named in the relevance map but absent from the query set.
    pub unresolved_queries: Vec<String>,
    /// Gallery ids named in the relevance map but absent from the gallery.
    pub unresolved_gallery: Vec<String>,
    /// Query set rows with no relevance entry.
    pub queries_without_relevance: Vec<String>,
}

impl PairingReport {
    pub fn ok(&self) -> bool {
        self.unresolved_queries.is_empty()
            && self.unresolved_gallery.is_empty()
            && self.queries_without_relevance.is_empty()
    }
}

impl std::fmt::Display for PairingReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok() {
            return write!(f, "pairing ok");
        }
        let mut parts = Vec::new();
        if !self.unresolved_queries.is_empty() {
            parts.push(format!("unknown query ids {:?}", self.unresolved_queries));
        }
        if !self.unresolved_gallery.is_empty() {
            parts.push(format!("unknown gallery ids {:?}", self.unresolved_gallery));
        }
        if !self.queries_without_relevance.is_empty() {
            parts.push(format!(
                "queries without relevance {:?}",
                self.queries_without_relevance
            ));
        }
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_pairing(queries: &EmbeddingSet, gallery: &EmbeddingSet, rel: &RelevanceMap) -> PairingReport {
    let q_ids: HashSet<&str> = queries.ids().iter().map(String::as_str).collect();
    let g_ids: HashSet<&str> = gallery.ids().iter().map(String::as_str).collect();
    let mut report = PairingReport::default();
    let mut missing_gallery = BTreeSet::new();
    for (q, gs) in rel.iter() {
        if !q_ids.contains(q.as_str()) {
            report.unresolved_queries.push(q.clone());
        }
        missing_gallery.extend(gs.iter().filter(|g| !g_ids.contains(g.as_str())).cloned());
    }
    report.unresolved_gallery = missing_gallery.into_iter().collect();
    report.queries_without_relevance = queries
        .ids()
        .iter()
        .filter(|q| rel.relevant(q).is_none())
        .cloned()
        .collect();
    report
}
