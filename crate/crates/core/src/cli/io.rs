//! JSON documents read and written by the command-line tool.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, ScalingWeights};
use crate::programs::ScalabilityReport;

/// `{"n": int, "m": int, "columns": [[f64; n]; m]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub n: usize,
    pub m: usize,
    pub columns: Vec<Vec<f64>>,
}

impl FrameDoc {
    pub fn from_frame(frame: &Frame<f64>) -> Self {
        Self { n: frame.n(), m: frame.m(), columns: frame.columns() }
    }

    pub fn into_frame(self) -> Result<Frame<f64>> {
        if self.columns.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: self.columns.len() });
        }
        if let Some(c) = self.columns.iter().find(|c| c.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: c.len() });
        }
        Frame::from_columns(&self.columns)
    }
}

/// `{"m": int, "u": [f64; m], "method": str, "residual": f64}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDoc {
    pub m: usize,
    pub u: Vec<f64>,
    pub method: String,
    pub residual: f64,
}

impl WeightsDoc {
    pub fn into_weights(self) -> Result<ScalingWeights<f64>> {
        if self.u.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: self.u.len() });
        }
        ScalingWeights::from_raw(&self.u)
    }
}

/// The scalability report as printed by `check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub scalable: bool,
    pub method: String,
    pub u: Option<Vec<f64>>,
    pub support_size: Option<usize>,
    pub primal_objective: Option<f64>,
    pub dual_objective: Option<f64>,
    pub residual: Option<f64>,
    pub cond_after: Option<f64>,
}

impl From<&ScalabilityReport<f64>> for ReportDoc {
    fn from(r: &ScalabilityReport<f64>) -> Self {
        Self {
            scalable: r.scalable,
            method: r.method.to_string(),
            u: r.weights.as_ref().map(|w| w.values().to_vec()),
            support_size: r.support_size(),
            primal_objective: r.primal_objective,
            dual_objective: r.dual_objective,
            residual: r.residual,
            cond_after: r.cond_after,
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty-printed with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_frame(path: &Path) -> Result<Frame<f64>> {
    read_json::<FrameDoc>(path)?.into_frame()
}

pub fn read_weights(path: &Path) -> Result<ScalingWeights<f64>> {
    read_json::<WeightsDoc>(path)?.into_weights()
}
