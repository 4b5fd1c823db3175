//! Run artifacts: focal-instant CSV, plain-text summary and JSON report.

use crate::error::{Error, Result};
use crate::jacobi_maslov::FocalReport;
use crate::scenarios::ScenarioResult;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "t_focal,kernel_dim,contribution_num,contribution_den,level,flags";

/// `x` with 12 significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

fn rows<'a>(report: &'a FocalReport, level: &'static str) -> impl Iterator<Item = (f64, &'static str, String)> + 'a {
    report.instants.iter().map(move |i| {
        let (num, den) = i.contribution.num_den();
        let mut flags = Vec::new();
        if i.degenerate {
            flags.push("degenerate");
        }
        if i.cluster {
            flags.push("cluster");
        }
        let line = format!("{},{},{num},{den},{level},{}", fmt12(i.t), i.kernel_dim, flags.join("|"));
        (i.t, level, line)
    })
}

/// One row per focal instant of `γ` (level `total`) and of `x` (level `base`), sorted by
/// instant and then level.
pub fn focal_csv(r: &ScenarioResult) -> String {
    let mut all: Vec<_> = rows(&r.total, "total").chain(rows(&r.base, "base")).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (_, _, line) in all {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn summary_text(r: &ScenarioResult) -> String {
    let mut s = String::new();
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "scenario        {}", r.name);
    let _ = writeln!(s, "interval        [{}, {}]", fmt12(r.interval[0]), fmt12(r.interval[1]));
    if let Some(t) = r.patch_exit {
        let _ = writeln!(s, "patch exit      {}", fmt12(t));
    }
    let _ = writeln!(s, "mu_Q(gamma)     {}", r.mu_q);
    let _ = writeln!(s, "mu_P(x)         {}", r.mu_p);
    let _ = writeln!(s, "focal instants  {} total, {} base", r.total.instants.len(), r.base.instants.len());
    for m in &r.matches {
        let t = |v: Option<f64>| v.map(fmt12).unwrap_or_else(|| "-".into());
        let c = |v: Option<crate::HalfInteger>| v.map(|h| h.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "  t = {:<18} base t = {:<18} contribution {} / {}{}",
            t(m.t_total),
            t(m.t_base),
            c(m.contribution_total),
            c(m.contribution_base),
            if m.agree { "" } else { "  MISMATCH" }
        );
    }
    if let Some(c) = &r.counts {
        let _ = writeln!(
            s,
            "conjugate       omega = {}, omega_delta = {}, i(gamma) = {}, i(x) = {}",
            c.omega, c.omega_delta, c.i_gamma, c.i_x
        );
    }
    let _ = writeln!(s, "checks");
    for c in &r.checks {
        let _ = writeln!(
            s,
            "  {:<24} {:<5} value {}  limit {}",
            c.name,
            if c.pass { "ok" } else { "FAIL" },
            fmt12(c.value),
            fmt12(c.limit)
        );
    }
    let _ = writeln!(s, "result          {verdict}");
    s
}

pub fn json_report(r: &ScenarioResult) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("results serialize to JSON");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Paths of the files written by [`write_artifacts`].
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub json: PathBuf,
}

/// Writes `<name>.csv`, `<name>.summary.txt` and `<name>.json` into `dir`.
pub fn write_artifacts(dir: &Path, r: &ScenarioResult) -> Result<Artifacts> {
    let a = Artifacts {
        csv: dir.join(format!("{}.csv", r.name)),
        summary: dir.join(format!("{}.summary.txt", r.name)),
        json: dir.join(format!("{}.json", r.name)),
    };
    write_atomic(&a.csv, &focal_csv(r))?;
    write_atomic(&a.summary, &summary_text(r))?;
    write_atomic(&a.json, &json_report(r))?;
    Ok(a)
}
