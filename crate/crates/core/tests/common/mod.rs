//! Brute-force reference implementations and CLI helpers shared by the
//! integration tests. The oracles never call into the library's numeric code.

#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

use invgc::Variant;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Rows = Vec<Vec<f64>>;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0;
    for k in 0..a.len() {
        d += a[k] * b[k];
    }
    (d / (norm(a) * norm(b))).clamp(-1.0, 1.0)
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    if n < 1e-12 {
        vec![0.0; v.len()]
    } else {
        v.iter().map(|x| x / n).collect()
    }
}

/// Adjacency built straight from the definitions: loops, a full sort per
/// row, and no shared helpers.
pub fn naive_adjacency(g: &Rows, refs: &Rows, variant: Variant) -> Rows {
    let mut s: Rows = g.iter().map(|x| refs.iter().map(|y| cosine(x, y)).collect()).collect();
    match variant {
        Variant::Full => {
            let count = (g.len() * refs.len()) as f64;
            let mean = s.iter().flatten().sum::<f64>() / count;
            for row in &mut s {
                for v in row.iter_mut() {
                    *v -= mean;
                }
            }
        }
        Variant::Local { k_percent: pct } | Variant::Binary { p_percent: pct } => {
            let binary = matches!(variant, Variant::Binary { .. });
            let m = ((pct * refs.len() as f64 / 100.0 - 1e-9).ceil() as usize).max(1);
            for row in &mut s {
                let mut sorted = row.clone();
                sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let threshold = sorted[m - 1];
                for v in row.iter_mut() {
                    *v = if *v >= threshold {
                        if binary {
                            1.0
                        } else {
                            *v
                        }
                    } else {
                        0.0
                    };
                }
            }
        }
    }
    s
}

/// `norm(g_i - r * sum_j S_ij ref_j)` for every row, one scalar at a time.
fn naive_half(g: &Rows, refs: &Rows, variant: Variant, r: f64, skip_self: bool) -> Rows {
    let s = naive_adjacency(g, refs, variant);
    let mut out = Vec::new();
    for i in 0..g.len() {
        let mut row = g[i].clone();
        for j in 0..refs.len() {
            if skip_self && i == j {
                continue;
            }
            for k in 0..row.len() {
                row[k] -= r * s[i][j] * refs[j][k];
            }
        }
        out.push(unit(&row));
    }
    out
}

/// Reference dual update. `alias_g` / `alias_q` say whether the reference
/// set is the gallery itself, which drops the `j == i` term.
pub fn naive_dual(
    g: &Rows,
    ref_g: &Rows,
    ref_q: &Rows,
    variant: Variant,
    r_g: f64,
    r_q: f64,
    alias_g: bool,
    alias_q: bool,
) -> Rows {
    let g: Rows = g.iter().map(|x| unit(x)).collect();
    let a = naive_half(&g, ref_g, variant, r_g, alias_g);
    let b = naive_half(&g, ref_q, variant, r_q, alias_q);
    a.iter()
        .zip(&b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect())
        .collect()
}

pub fn random_rows(rng: &mut StdRng, n: usize, d: usize) -> Rows {
    (0..n)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            if norm(&v) > 1e-3 {
                break v;
            }
        })
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Cap fraction by quadrature over the polar angle. The solid cap in the
/// `n`-ball has slice weight `sin^n`, the spherical cap `sin^(n-2)`.
pub fn cap_fraction_quadrature(n: usize, b: f64, surface: bool) -> f64 {
    let p = if surface { n as i32 - 2 } else { n as i32 };
    let f = |t: f64| t.sin().powi(p);
    let steps = 20_000;
    simpson(f, 0.0, b.asin(), steps) / simpson(f, 0.0, std::f64::consts::PI, steps)
}

/// `A(S_{n-1}) / V(B_n)` from `V_n = 2π/n V_{n-2}` and `A_{n-1} = 2π V_{n-2}`.
pub fn area_volume_ratio(n: usize) -> f64 {
    let mut v = vec![1.0, 2.0];
    for k in 2..=n {
        v.push(2.0 * std::f64::consts::PI / k as f64 * v[k - 2]);
    }
    2.0 * std::f64::consts::PI * v[n - 2] / v[n]
}

pub mod cli {
    use std::collections::BTreeMap;
    use std::fs;
    use std::path::Path;
    use std::process::{Command, Output};

    pub fn invgc(dir: &Path, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_invgc"))
            .args(args)
            .current_dir(dir)
            .output()
            .expect("spawn invgc")
    }

    /// Runs `args` and panics unless it exits 0.
    pub fn ok(dir: &Path, args: &[&str]) -> String {
        let out = invgc(dir, args);
        assert!(
            out.status.success(),
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    /// Looks up `key` in `key<TAB>value` report lines.
    pub fn field(report: &str, key: &str) -> f64 {
        report
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
            .unwrap_or_else(|| panic!("{key} missing from {report}"))
            .parse()
            .unwrap()
    }

    const DATA: [&str; 10] = [
        "--val-query",
        "d/query.emb",
        "--val-gallery",
        "d/gallery.emb",
        "--ref-gallery",
        "d/ref_gallery.emb",
        "--ref-query",
        "d/ref_query.emb",
        "--relevance",
        "d/relevance.tsv",
    ];

    /// Runs every subcommand on a small synthetic set inside `dir` and
    /// returns stdout of each run plus every file written, keyed by name.
    pub fn run_every_subcommand(dir: &Path, threads: &str) -> BTreeMap<String, Vec<u8>> {
        let t = ["--threads", threads];
        let with = |rest: &[&str]| -> Vec<String> { t.iter().chain(rest).map(|s| s.to_string()).collect() };
        let data = |rest: &[&str]| -> Vec<String> { with(&[rest, &DATA[..]].concat()) };
        let runs: Vec<(&str, Vec<String>)> = vec![
            (
                "synth",
                with(&[
                    "synth",
                    "--items",
                    "40",
                    "--refs",
                    "120",
                    "--dim",
                    "16",
                    "--seed",
                    "7",
                    "--out-prefix",
                    "d/",
                ]),
            ),
            (
                "diagnose",
                with(&[
                    "diagnose",
                    "--gallery",
                    "d/gallery.emb",
                    "--query",
                    "d/query.emb",
                    "--relevance",
                    "d/relevance.tsv",
                    "--topk",
                    "1,5",
                    "--dump-hist",
                    "hist.tsv",
                ]),
            ),
            (
                "apply",
                with(&[
                    "apply",
                    "--gallery",
                    "d/gallery.emb",
                    "--ref-gallery",
                    "d/ref_gallery.emb",
                    "--ref-query",
                    "d/ref_query.emb",
                    "--variant",
                    "local",
                    "--k",
                    "5",
                    "--rg",
                    "0.1",
                    "--rq",
                    "0.05",
                    "--out",
                    "g2.emb",
                ]),
            ),
            (
                "eval",
                with(&[
                    "eval",
                    "--query",
                    "d/query.emb",
                    "--gallery",
                    "g2.emb",
                    "--relevance",
                    "d/relevance.tsv",
                    "--dump-ranks",
                    "ranks.tsv",
                ]),
            ),
            (
                "tune",
                data(&[
                    "tune",
                    "--variant",
                    "full",
                    "--rg-grid",
                    "0,0.05,0.1",
                    "--rq-grid",
                    "0:0.1:0.05",
                    "--trace",
                    "trace.tsv",
                ]),
            ),
            (
                "sweep",
                data(&[
                    "sweep",
                    "--param",
                    "ratio",
                    "--values",
                    "0.25,0.5,1",
                    "--variant",
                    "avgpool",
                    "--p",
                    "10",
                    "--rg",
                    "0.05",
                    "--seed",
                    "3",
                    "--out",
                    "sweep.tsv",
                ]),
            ),
            (
                "verify-theory",
                with(&[
                    "verify-theory",
                    "--n",
                    "2:6",
                    "--b",
                    "0.1:0.9:0.2",
                    "--mc-samples",
                    "20000",
                    "--include-thm1",
                ]),
            ),
        ];
        let mut outputs = BTreeMap::new();
        for (name, args) in runs {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            outputs.insert(format!("stdout:{name}"), ok(dir, &args).into_bytes());
        }
        collect_files(dir, dir, &mut outputs);
        outputs
    }

    fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                collect_files(root, &path, out);
            } else {
                let key = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(key, fs::read(&path).unwrap());
            }
        }
    }
}
