//! Result artifacts: CSV tables, `interval.json` and `manifest.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use hypstab_core::{threshold_map, Error};

use crate::config::{ExperimentConfig, MANIFEST_KEY};
use crate::run::Outcome;
use crate::CliError;

/// Shortest round-trip decimal, switching to exponent form for very small or
/// large magnitudes.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `k` node indices spread evenly over `0..n`, endpoints included.
pub fn sampled_nodes(n: usize, k: usize) -> Vec<usize> {
    match (n, k) {
        (0, _) | (_, 0) => Vec::new(),
        _ if k >= n => (0..n).collect(),
        (_, 1) => vec![(n - 1) / 2],
        _ => {
            let mut v: Vec<usize> = (0..k)
                .map(|i| ((i * (n - 1)) as f64 / (k - 1) as f64).round() as usize)
                .collect();
            v.dedup();
            v
        }
    }
}

fn header(cfg: &ExperimentConfig, tail: &[&str]) -> String {
    let mut cols = vec!["node"];
    cols.extend(cfg.params.iter().map(String::as_str));
    cols.extend(tail);
    cols.join(",") + "\n"
}

fn node_prefix(out: &mut String, l: usize, params: &[f64]) {
    write!(out, "{l}").unwrap();
    for &p in params {
        write!(out, ",{}", fmt_num(p)).unwrap();
    }
}

fn breakdown_kind(e: &Option<Error>) -> &'static str {
    match e {
        None => "",
        Some(Error::NonFinite { .. }) => "non_finite",
        Some(Error::Domain { .. }) => "domain",
        Some(_) => "other",
    }
}

pub fn distribution_csv(cfg: &ExperimentConfig, o: &Outcome) -> String {
    let r = &o.result;
    let mut s = header(cfg, &["prior", "posterior"]);
    for (l, node) in r.nodes.iter().enumerate() {
        node_prefix(&mut s, l, &node.params);
        writeln!(
            s,
            ",{},{}",
            fmt_num(r.prior.p[l]),
            fmt_num(r.final_distribution.p[l])
        )
        .unwrap();
    }
    s
}

pub fn nodes_csv(cfg: &ExperimentConfig, o: &Outcome) -> String {
    let mut s = header(
        cfg,
        &["final_time", "steps", "damped", "initial_L", "last_L", "breakdown"],
    );
    for (l, n) in o.result.nodes.iter().enumerate() {
        node_prefix(&mut s, l, &n.params);
        writeln!(
            s,
            ",{},{},{},{},{},{}",
            fmt_num(n.final_time),
            n.steps,
            n.damped,
            fmt_num(n.initial_indicator),
            fmt_num(n.last_indicator),
            breakdown_kind(&n.breakdown)
        )
        .unwrap();
    }
    s
}

pub fn indicators_csv(cfg: &ExperimentConfig, o: &Outcome) -> String {
    let mut s = header(cfg, &["t", "L"]);
    let nodes = &o.result.nodes;
    for l in sampled_nodes(nodes.len(), cfg.record_nodes) {
        for &(t, v) in &nodes[l].history {
            node_prefix(&mut s, l, &nodes[l].params);
            writeln!(s, ",{},{}", fmt_num(t), fmt_num(v)).unwrap();
        }
    }
    s
}

pub fn variation_csv(o: &Outcome) -> String {
    let mut s = String::from("iteration,variation\n");
    for (i, v) in o.result.variation_history.iter().enumerate() {
        writeln!(s, "{},{}", i + 1, fmt_num(*v)).unwrap();
    }
    s
}

pub fn fits_csv(cfg: &ExperimentConfig, o: &Outcome) -> Option<String> {
    let fits = o.fits.as_ref()?;
    let mut s = header(cfg, &["a", "c", "e_deviation", "n_samples", "n_dropped"]);
    for (l, (n, f)) in o.result.nodes.iter().zip(fits).enumerate() {
        node_prefix(&mut s, l, &n.params);
        writeln!(
            s,
            ",{},{},{},{},{}",
            fmt_num(f.a),
            fmt_num(f.c),
            fmt_num(f.e_deviation),
            f.n_samples,
            f.n_dropped
        )
        .unwrap();
    }
    Some(s)
}

/// `(file name, contents)` of each threshold mask.
pub fn mask_csvs(cfg: &ExperimentConfig, o: &Outcome) -> Vec<(String, String)> {
    let Some(fits) = o.fits.as_ref() else {
        return Vec::new();
    };
    cfg.mask_tols
        .iter()
        .map(|&tol| {
            let mut s = header(cfg, &["inside"]);
            for (l, (n, inside)) in o.result.nodes.iter().zip(threshold_map(fits, tol)).enumerate() {
                node_prefix(&mut s, l, &n.params);
                writeln!(s, ",{}", u8::from(inside)).unwrap();
            }
            (format!("mask_{tol:e}.csv"), s)
        })
        .collect()
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn interval_json(cfg: &ExperimentConfig, o: &Outcome) -> Value {
    let r = &o.result;
    let interval: Vec<Value> = r
        .stability_interval
        .iter()
        .map(|&(lo, hi)| json!([finite_or_null(lo), finite_or_null(hi)]))
        .collect();
    json!({
        "name": cfg.name,
        "params": cfg.params,
        "interval": interval,
        "contiguous": r.contiguous,
        "stability_set_size": r.stability_set.len(),
        "nodes": r.nodes.len(),
        "threshold": cfg.stability_threshold,
        "iterations": r.iterations,
        "stop_reason": r.stop_reason,
        "seed": cfg.seed,
    })
}

/// Resolved configuration plus a metadata block. Feeding it back to `run`
/// reproduces the experiment.
pub fn manifest_json(cfg: &ExperimentConfig) -> Value {
    let mut echo = cfg.clone();
    echo.out = None;
    let mut v = serde_json::to_value(&echo).expect("config serializes");
    let obj = v.as_object_mut().expect("config is an object");
    obj.remove("out");
    obj.insert(
        MANIFEST_KEY.into(),
        json!({
            "tool": "hypstab",
            "version": env!("CARGO_PKG_VERSION"),
        }),
    );
    v
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

/// Writes every artifact into `dir`, creating it if needed.
pub fn write_artifacts(cfg: &ExperimentConfig, o: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json") + "\n";
    let mut written = Vec::new();
    write(dir, "distribution.csv", &distribution_csv(cfg, o), &mut written)?;
    write(dir, "interval.json", &pretty(&interval_json(cfg, o)), &mut written)?;
    write(dir, "nodes.csv", &nodes_csv(cfg, o), &mut written)?;
    write(dir, "variation.csv", &variation_csv(o), &mut written)?;
    if cfg.record_nodes > 0 {
        write(dir, "indicators.csv", &indicators_csv(cfg, o), &mut written)?;
    }
    if let Some(f) = fits_csv(cfg, o) {
        write(dir, "fits.csv", &f, &mut written)?;
    }
    for (name, contents) in mask_csvs(cfg, o) {
        write(dir, &name, &contents, &mut written)?;
    }
    write(dir, "manifest.json", &pretty(&manifest_json(cfg)), &mut written)?;
    Ok(written)
}
