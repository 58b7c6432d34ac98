//! Run configuration: JSON schema, validation and initial-data construction.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use gsqg_core::{init, GridSpec, GsqgParams, SobolevIndex, SpectralField, StepControl};

use crate::CliError;

/// Initial data selector. Serialized externally tagged, e.g.
/// `"two_mode"` or `{"single_mode": {"k": [1, 0]}}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    SingleMode {
        k: [i64; 2],
    },
    TwoMode,
    RandomBand {
        seed: u64,
        k_lo: f64,
        k_hi: f64,
        /// Target inhomogeneous critical-space norm of the initial data.
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub period: f64,
    pub t_end: f64,
    pub dt_max: f64,
    pub cfl: f64,
    pub initial_condition: InitialCondition,
    pub observe_every: f64,
    pub snapshot_every: Option<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects invalid configurations, naming the violated field.
    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, why: String| CliError::Config(format!("field `{name}`: {why}"));
        GsqgParams::new(self.alpha, self.beta)
            .map_err(|e| field("alpha/beta", e.to_string()))?;
        GridSpec::new(self.n, self.period, 2.0 / 3.0)
            .map_err(|e| field("n/period", e.to_string()))?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(field("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        StepControl::new(self.cfl, self.dt_max)
            .map_err(|e| field("cfl/dt_max", e.to_string()))?;
        if !(self.observe_every > 0.0) {
            return Err(field(
                "observe_every",
                format!("must be > 0, got {}", self.observe_every),
            ));
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0) {
                return Err(field("snapshot_every", format!("must be > 0, got {s}")));
            }
        }
        match self.initial_condition {
            InitialCondition::SingleMode { k } => {
                if k == [0, 0] {
                    return Err(field("initial_condition", "mode (0, 0) has no dynamics".into()));
                }
            }
            InitialCondition::RandomBand { k_lo, k_hi, amplitude, .. } => {
                if !(k_lo >= 0.0 && k_hi > k_lo) {
                    return Err(field(
                        "initial_condition",
                        format!("band [{k_lo}, {k_hi}] is empty"),
                    ));
                }
                if !(amplitude > 0.0) {
                    return Err(field(
                        "initial_condition",
                        format!("amplitude must be > 0, got {amplitude}"),
                    ));
                }
            }
            InitialCondition::TwoMode => {}
        }
        Ok(())
    }

    pub fn params(&self) -> GsqgParams {
        GsqgParams::new(self.alpha, self.beta).expect("validated")
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.n, self.period, 2.0 / 3.0).expect("validated")
    }

    pub fn step_control(&self) -> StepControl {
        StepControl::new(self.cfl, self.dt_max).expect("validated")
    }

    /// Builds the configured initial data on the configured grid.
    pub fn initial_field(&self) -> Result<SpectralField, CliError> {
        let grid = self.grid();
        let f = match self.initial_condition {
            InitialCondition::SingleMode { k } => init::single_mode(&grid, k[0], k[1], 1.0)?,
            InitialCondition::TwoMode => init::two_mode(&grid)?,
            InitialCondition::RandomBand {
                seed,
                k_lo,
                k_hi,
                amplitude,
            } => {
                let raw = init::random_band(&grid, k_lo, k_hi, seed)?;
                let crit = self.params().critical_exponent();
                init::normalize_to(&raw, SobolevIndex::inhomogeneous(crit)?, amplitude)?
            }
        };
        Ok(f)
    }

    /// Canonical JSON serialization (stable key order, trailing newline).
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
