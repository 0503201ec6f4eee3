//! Output directory handling and the stdout summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use geodesy_core::io::csv::{self, GridData};
use geodesy_core::io::report::DiagnosticsReport;

/// Raised after the report is written when any of its checks failed.
#[derive(Debug)]
pub struct ChecksFailed(pub Vec<String>);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed: {}", self.0.len(), self.0.join(", "))
    }
}

impl std::error::Error for ChecksFailed {}

/// Files of one command run under a single output directory.
pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
    timings: Option<BTreeMap<String, f64>>,
    clock: Instant,
}

impl Output {
    pub fn create(dir: &Path, timings: bool) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), written: Vec::new(), timings: timings.then(BTreeMap::new), clock: Instant::now() })
    }

    /// Records the time since the previous mark under `phase`.
    pub fn mark(&mut self, phase: &str) {
        if let Some(t) = &mut self.timings {
            t.insert(phase.to_string(), self.clock.elapsed().as_secs_f64());
            self.clock = Instant::now();
        }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn csv(&mut self, rel: &str, data: &GridData) -> Result<()> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        csv::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(rel.to_string());
        Ok(())
    }

    pub fn json<T: serde::Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let path = self.path(rel);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(rel.to_string());
        Ok(())
    }

    /// Writes `report.json`, prints the summary and fails if a check failed.
    pub fn finish(mut self, mut report: DiagnosticsReport) -> Result<()> {
        self.mark("write");
        report.outputs = std::mem::take(&mut self.written);
        report.outputs.push("report.json".into());
        report.timings = self.timings.take();
        let path = self.path("report.json");
        report.write(&path).with_context(|| format!("writing {}", path.display()))?;
        summarize(&report);
        println!("report: {}", path.display());
        let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(ChecksFailed(failed).into())
        }
    }
}

pub fn summarize(report: &DiagnosticsReport) {
    println!("{} {}", report.command, report.model);
    for n in report.residuals.iter().chain(&report.conservation) {
        println!("  {:<36} sup {:.3e}  l2 {:.3e}", n.name, n.sup, n.l2);
    }
    for p in &report.potentials {
        println!("  {:<36} loop defect {:.3e}", p.name, p.loop_defect);
    }
    if let Some(b) = &report.boundary {
        let class = serde_json::to_value(b.class).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        println!("  {:<36} {class} at {:.1e}", "boundary", b.tolerance);
    }
    for f in &report.convergence {
        match f.order {
            Some(p) => println!("  {:<36} order {p:.3}", f.name),
            None => println!("  {:<36} below measurement floor", f.name),
        }
    }
    for (k, v) in &report.extra {
        println!("  {k:<36} {v:.6e}");
    }
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("  {tag} {:<31} {:.3e} (threshold {:.1e})", c.name, c.value, c.threshold);
    }
}
