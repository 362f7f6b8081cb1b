//! Sweeps, random-state verification, tightness scans and the `qmaj`
//! command line.

pub mod cli;
pub mod grids;
pub mod output;
mod sweep;
mod tightness;
mod verify;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde::Serialize;

use crate::bench::BenchConfig;
use crate::error::{Error, Result};

pub use output::{Cell, Dataset, Format};
pub use sweep::{
    bench_dataset, sweep_entropy_three, sweep_entropy_two, sweep_majorization, BENCH_HEADER,
    ENTROPY2_HEADER, ENTROPY3_HEADER, MAJORIZATION_BENCH_HEADER, MAJORIZATION_HEADER,
};
pub use tightness::{tightness_dataset, tightness_scan, TightnessResult, TIGHTNESS_HEADER};
pub use verify::{
    sample_bloch_ball, verify_random, verify_random_with_tol, RelationStats, VerifyReport,
    VERIFY_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Majorization3,
    Entropy2,
    Entropy3,
    Bench,
}

/// A request for one of the grid sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub lambda1_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    /// Used by two-observable sweeps only.
    pub theta_list: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Not echoed into JSON output, so files do not depend on where they are written.
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Majorization tolerance for analytic rows.
    pub tol: f64,
    /// Simulated-bench settings; adds bench rows to majorization sweeps.
    pub bench: Option<BenchConfig>,
}

impl SweepSpec {
    /// A spec on the given grid with defaults for everything else.
    pub fn new(kind: SweepKind, lambda1_list: Vec<f64>, alpha_list: Vec<f64>) -> Self {
        Self {
            kind,
            lambda1_list,
            alpha_list,
            theta_list: Vec::new(),
            samples: 0,
            seed: 0,
            output_path: None,
            format: Format::Csv,
            tol: crate::majorization::ANALYTIC_TOL,
            bench: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        if self.lambda1_list.is_empty() {
            return invalid("lambda1 list is empty".into());
        }
        if self.alpha_list.is_empty() {
            return invalid("alpha list is empty".into());
        }
        if let Some(&l) = self.lambda1_list.iter().find(|l| !(0.0..=0.5).contains(*l)) {
            return invalid(format!("lambda1 = {l} is outside [0, 0.5]"));
        }
        if let Some(&a) = self.alpha_list.iter().find(|a| !a.is_finite()) {
            return invalid(format!("alpha = {a} is not finite"));
        }
        if self.kind == SweepKind::Entropy2 {
            if self.theta_list.is_empty() {
                return invalid("theta list is empty".into());
            }
            if let Some(&t) = self
                .theta_list
                .iter()
                .find(|t| !(**t > 0.0 && **t <= FRAC_PI_2))
            {
                return invalid(format!("theta = {t} is outside (0, pi/2]"));
            }
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return invalid(format!(
                "tolerance {} must be finite and non-negative",
                self.tol
            ));
        }
        if let Some(cfg) = &self.bench {
            cfg.validate()?;
        }
        Ok(())
    }

    /// (λ₁, α) pairs in λ₁-major order.
    pub fn state_grid(&self) -> Vec<(f64, f64)> {
        self.lambda1_list
            .iter()
            .flat_map(|&l| self.alpha_list.iter().map(move |&a| (l, a)))
            .collect()
    }

    pub(crate) fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spec serializes")
    }
}
