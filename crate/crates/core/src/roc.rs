//! ROC curve container and its CSV/JSON forms.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fmt::sig12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
    /// Binomial standard error of `pd` for simulated curves.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr: Option<f64>,
}

/// Where a curve came from: a formula name or a simulation, plus the
/// parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub provenance: Provenance,
}

impl RocCurve {
    pub fn new(points: Vec<RocPoint>, provenance: Provenance) -> Result<Self> {
        for p in &points {
            if !(0.0..=1.0).contains(&p.pfa) || !(0.0..=1.0).contains(&p.pd) {
                return domain(format!("ROC point out of [0, 1]: ({}, {})", p.pfa, p.pd));
            }
        }
        Ok(RocCurve { points, provenance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when `pd` never decreases as `pfa` increases, allowing `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.points.windows(2).all(|w| w[1].pd + slack >= w[0].pd)
    }

    /// `pfa,pd` rows, plus a `stderr` column for simulated curves.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let with_err = self.points.iter().any(|p| p.stderr.is_some());
        let mut wtr = csv::Writer::from_writer(w);
        if with_err {
            wtr.write_record(["pfa", "pd", "stderr"])?;
        } else {
            wtr.write_record(["pfa", "pd"])?;
        }
        for p in &self.points {
            if with_err {
                wtr.write_record([sig12(p.pfa), sig12(p.pd), sig12(p.stderr.unwrap_or(0.0))])?;
            } else {
                wtr.write_record([sig12(p.pfa), sig12(p.pd)])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks that a false-alarm grid is strictly increasing inside (0, 1).
pub fn validate_pfa_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain("false-alarm grid is empty");
    }
    if grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return domain(format!("false-alarm probabilities must lie in (0, 1), got {grid:?}"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain(format!("false-alarm grid must be strictly increasing, got {grid:?}"));
    }
    Ok(())
}
