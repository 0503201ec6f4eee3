//! JSON diagnostics report shared by all commands.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Patch;
use crate::models::boundary::BoundaryReport;
use crate::solvers::convergence::ConvergenceFit;

/// JSON schema for [`DiagnosticsReport`].
pub const SCHEMA: &str = include_str!("../../schemas/diagnostics_report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub name: String,
    pub sup: f64,
    pub l2: f64,
}

impl Norms {
    pub fn of(name: &str, p: &Patch) -> Self {
        Norms { name: name.to_string(), sup: p.sup_norm(), l2: p.l2_norm() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDefect {
    pub name: String,
    pub loop_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.to_string(), value, threshold, passed: value <= threshold }
    }

    /// Passes when |value − target| ≤ threshold; records the distance.
    pub fn near(name: &str, value: f64, target: f64, threshold: f64) -> Self {
        Self::at_most(name, (value - target).abs(), threshold)
    }

    pub fn flag(name: &str, passed: bool) -> Self {
        Check { name: name.to_string(), value: f64::from(u8::from(!passed)), threshold: 0.0, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub command: String,
    pub model: String,
    pub residuals: Vec<Norms>,
    pub conservation: Vec<Norms>,
    pub potentials: Vec<LoopDefect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryReport>,
    pub convergence: Vec<ConvergenceFit>,
    pub checks: Vec<Check>,
    /// Files written by the command, relative to the output directory.
    pub outputs: Vec<String>,
    pub extra: BTreeMap<String, f64>,
    /// Wall-clock seconds per phase; only recorded on request since it
    /// breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl DiagnosticsReport {
    pub fn new(command: &str, model: &str) -> Self {
        DiagnosticsReport { command: command.to_string(), model: model.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
