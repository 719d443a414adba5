//! Case configuration: a TOML file with one section per concern.
//!
//! ```toml
//! [gas]
//! gamma = 1.6666666666666667
//!
//! [run]
//! grids = [[125, 25], [250, 50], [500, 100]]
//! t_end = 0.003
//! snapshot_times = [0.0, 0.00075, 0.0015, 0.00225, 0.003]
//! samples = 64
//! base_seed = 2024
//! output_dir = "out"
//! ```
//!
//! Every section and key is optional except where noted; unknown keys are
//! rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::GasParams;
use crate::grid::Grid;
use crate::inlet::PerturbationParams;
use crate::metrics::Variable;
use crate::render::ColorMap;
use crate::solver::{Boundaries, CaseSetup, LatticeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Domain {
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self { x_max: 2.5, y_min: -0.25, y_max: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSettings {
    /// `[nx, ny]` per grid, coarse to fine.
    pub grids: Vec<[usize; 2]>,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Monte Carlo sample count M.
    pub samples: usize,
    pub base_seed: u64,
    /// Worker threads; 0 picks the available parallelism.
    pub workers: usize,
    /// Relative paths resolve against the config file's directory.
    pub output_dir: PathBuf,
    /// Treat finite snapshots with `rho <= 0` or `p <= 0` as diverged.
    pub positivity_admissibility: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            grids: vec![[125, 25], [250, 50], [500, 100]],
            t_end: 0.003,
            snapshot_times: vec![0.0, 0.00075, 0.0015, 0.00225, 0.003],
            samples: 64,
            base_seed: 2024,
            workers: 0,
            output_dir: PathBuf::from("out"),
            positivity_admissibility: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSettings {
    pub variable: Variable,
    /// Relative density deviation marking the jet head.
    pub head_threshold: f64,
}

impl Default for MetricsSettings {
    fn default() -> Self {
        Self { variable: Variable::Rho, head_threshold: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSettings {
    /// Smallest value before the log; defaults to `1e-3 * rho_amb`.
    pub floor: Option<f64>,
    pub colormap: ColorMap,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CaseConfig {
    pub gas: GasParams,
    pub lattice: LatticeParams,
    pub perturbation: PerturbationParams,
    pub domain: Domain,
    pub run: RunSettings,
    pub metrics: MetricsSettings,
    pub render: RenderSettings,
}

impl CaseConfig {
    /// Desk-scale ladder: 125x25, 250x50, 500x100 with 64 samples.
    pub fn desk() -> Self {
        Self::default()
    }

    /// Full ladder from 500x100 to 4000x800 with 1000 samples.
    pub fn full_scale() -> Self {
        let mut c = Self::default();
        c.run.grids = vec![[500, 100], [1000, 200], [2000, 400], [4000, 800]];
        c.run.samples = 1000;
        c
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads, validates and resolves `run.output_dir` against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { context: format!("reading config {}", path.display()), source: e })?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.run.output_dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.run.output_dir = base.join(&cfg.run.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if !(self.gas.gamma > 1.0) || !self.gas.gamma.is_finite() {
            return err("gas.gamma", format!("must exceed 1, got {}", self.gas.gamma));
        }
        self.lattice.validate().map_err(|e| Error::Config(format!("lattice: {e}")))?;
        self.perturbation.validate().map_err(|e| Error::Config(format!("perturbation: {e}")))?;
        let d = self.domain;
        if !(d.x_max > 0.0) || !(d.y_max > d.y_min) {
            return err("domain", format!("empty domain {d:?}"));
        }
        if (d.y_min + d.y_max).abs() > 1e-12 * d.y_max.abs() {
            return err("domain", format!("y extent must be centred on 0, got [{}, {}]", d.y_min, d.y_max));
        }
        let run = &self.run;
        if run.grids.is_empty() {
            return err("run.grids", "at least one grid is required".into());
        }
        for (k, g) in run.grids.iter().enumerate() {
            self.grid(k).map_err(|e| Error::Config(format!("run.grids[{k}] = {g:?}: {e}")))?;
            if run.grids[..k].contains(g) {
                return err("run.grids", format!("grid {g:?} listed twice"));
            }
        }
        if !(run.t_end > 0.0) || !run.t_end.is_finite() {
            return err("run.t_end", format!("must be positive, got {}", run.t_end));
        }
        if run.snapshot_times.is_empty() {
            return err("run.snapshot_times", "at least one time is required".into());
        }
        if run.snapshot_times.iter().any(|t| !(*t >= 0.0 && *t <= run.t_end)) {
            return err("run.snapshot_times", format!("times must lie in [0, t_end = {}]", run.t_end));
        }
        if run.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return err("run.snapshot_times", "times must be strictly increasing".into());
        }
        if run.snapshot_times.len() > 100 {
            return err("run.snapshot_times", "at most 100 times (two-digit file index)".into());
        }
        if run.base_seed > i64::MAX as u64 {
            return err("run.base_seed", "must fit in a signed 64-bit integer".into());
        }
        if run.samples < 1 {
            return err("run.samples", "M must be >= 1".into());
        }
        if run.samples > 1_000_000 {
            return err("run.samples", "M must be < 1000000 (six-digit file index)".into());
        }
        if !(self.metrics.head_threshold > 0.0) {
            return err("metrics.head_threshold", format!("must be positive, got {}", self.metrics.head_threshold));
        }
        if let Some(f) = self.render.floor {
            if !(f > 0.0) {
                return err("render.floor", format!("must be positive, got {f}"));
            }
        }
        Ok(())
    }

    pub fn grid(&self, index: usize) -> Result<Grid> {
        let [nx, ny] = self.run.grids[index];
        Grid::new(nx, ny, self.domain.x_max, self.domain.y_min, self.domain.y_max)
    }

    pub fn grids(&self) -> Result<Vec<Grid>> {
        (0..self.run.grids.len()).map(|k| self.grid(k)).collect()
    }

    pub fn setup(&self) -> CaseSetup {
        CaseSetup {
            gas: self.gas,
            lattice: self.lattice,
            perturbation: self.perturbation,
            boundaries: Boundaries::JET,
            positivity_admissibility: self.run.positivity_admissibility,
        }
    }

    pub fn render_floor(&self) -> f64 {
        self.render.floor.unwrap_or(1e-3 * self.perturbation.rho_amb)
    }

    /// The parts that determine simulation results; used to detect a
    /// changed config on resume.
    pub(crate) fn normalized(&self) -> Self {
        let mut c = self.clone();
        c.run.output_dir = PathBuf::from(".");
        c.run.workers = 0;
        c
    }
}
