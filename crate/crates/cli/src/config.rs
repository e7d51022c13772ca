//! Experiment configuration files.

use bergman_core::experiments::DEFAULT_DELTAS;
use bergman_core::NumericConfig;
use serde::{Deserialize, Serialize};

use crate::spec::{DomainSpec, Point, Term, WeightSpec};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// Closed form or Gram-matrix solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Closed,
    Numeric,
}

fn default_deltas() -> Vec<f64> {
    DEFAULT_DELTAS.to_vec()
}

fn default_grid() -> usize {
    41
}

fn default_margin() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Thm11 {
        domain: DomainSpec,
        weight: WeightSpec,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
        #[serde(default)]
        alpha: usize,
        #[serde(default)]
        beta: usize,
    },
    DeltaPower {
        domain: DomainSpec,
        weight: WeightSpec,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
        #[serde(default)]
        alpha: usize,
        #[serde(default)]
        beta: usize,
        bounds: [f64; 2],
    },
    Cor12Sum {
        domain: DomainSpec,
        terms: Vec<Term>,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
    },
    Cor12Product {
        domain: DomainSpec,
        factors: Vec<WeightSpec>,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
    },
    Dpower {
        domain: DomainSpec,
        d: usize,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
        #[serde(default)]
        source: Source,
    },
    Scaling {
        weight: WeightSpec,
        /// Values of `-psi(p_j) = 1 - p_j^2`.
        minus_psi: Vec<f64>,
    },
    Riemann {
        minus_psi: Vec<f64>,
        #[serde(default = "default_grid")]
        grid_n: usize,
        #[serde(default = "default_margin")]
        margin: f64,
    },
    Ramadanov {
        js: Vec<usize>,
        nu_inf: f64,
        /// `(u, v, w0)` of the real-affine perturbation.
        sigma: [f64; 3],
        #[serde(default)]
        probes: Vec<[Point; 2]>,
    },
    Localization {
        domain: DomainSpec,
        u_center: Point,
        u_radius: f64,
        weight: WeightSpec,
        p: Point,
        #[serde(default = "default_deltas")]
        deltas: Vec<f64>,
    },
    KernelEval {
        domain: DomainSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<WeightSpec>,
        #[serde(default)]
        source: Source,
        z: Point,
        w: Point,
        #[serde(default)]
        alpha: usize,
        #[serde(default)]
        beta: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected: Option<Point>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    /// Declared pass/fail tolerance; its meaning depends on the experiment.
    pub tolerance: f64,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Config(format!(
                "field `tolerance` must be positive, got {}",
                self.tolerance
            )));
        }
        self.numeric.validate()?;
        let deltas = match &self.experiment {
            Experiment::Thm11 { deltas, .. }
            | Experiment::DeltaPower { deltas, .. }
            | Experiment::Cor12Sum { deltas, .. }
            | Experiment::Cor12Product { deltas, .. }
            | Experiment::Dpower { deltas, .. }
            | Experiment::Localization { deltas, .. } => Some(deltas),
            _ => None,
        };
        if let Some(d) = deltas {
            bergman_core::experiments::validate_deltas(d)
                .map_err(|e| CliError::Config(format!("field `deltas`: {e}")))?;
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.experiment {
            Experiment::Thm11 { .. } => "thm11",
            Experiment::DeltaPower { .. } => "delta-power",
            Experiment::Cor12Sum { .. } => "cor12-sum",
            Experiment::Cor12Product { .. } => "cor12-product",
            Experiment::Dpower { .. } => "dpower",
            Experiment::Scaling { .. } => "scaling",
            Experiment::Riemann { .. } => "riemann",
            Experiment::Ramadanov { .. } => "ramadanov",
            Experiment::Localization { .. } => "localization",
            Experiment::KernelEval { .. } => "kernel-eval",
        }
    }
}
