//! D2Q5 vectorial lattice Boltzmann solver for the 2D Euler equations.
//!
//! One step is `kinetic speed -> ghost fill -> blending -> stream/collide`.
//! Four moving populations are stored per cell; the rest population is
//! folded into the macroscopic update through its `alpha * u` term.

mod blending;
mod boundary;
mod field;
mod sample;
mod step;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::WaveSpeedBound;

pub use blending::{compute_blending, Blending, Floors};
pub use boundary::{apply_inlet, apply_outlet, apply_walls, fill_ghosts, Boundaries, Side};
pub use field::{maxwellians, DistributionField, Kinetics, GHOST};
pub use sample::{run_sample, CaseSetup, SampleRun};
pub use step::{kinetic_speed, stream_collide_step, Solver, StepOutcome};

/// Flux-limiting mode of the blending parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    /// theta = 0 everywhere
    FirstOrder,
    /// theta = 1 everywhere
    SecondOrder,
    /// Relaxed local maximum principle on density and pressure.
    Rlmp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeParams {
    /// Rest-population weight in `[0, 1]`.
    pub alpha: f64,
    /// Kinetic speed over the largest wave speed.
    pub safety: f64,
    pub limiter: Limiter,
    /// Relaxation of the local bounds, as a fraction of the local range.
    pub rlmp_relaxation: f64,
    /// Positivity floors relative to the reference density and pressure.
    pub positivity_floor: f64,
    pub wave_speed_bound: WaveSpeedBound,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            safety: 2.0,
            limiter: Limiter::Rlmp,
            rlmp_relaxation: 0.1,
            positivity_floor: 1e-10,
            wave_speed_bound: WaveSpeedBound::Componentwise,
        }
    }
}

impl LatticeParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.safety >= 1.0) || !self.safety.is_finite() {
            return Err(Error::InvalidParameter(format!("safety must be >= 1, got {}", self.safety)));
        }
        if !(self.rlmp_relaxation >= 0.0) {
            return Err(Error::InvalidParameter(format!("rlmp_relaxation must be >= 0, got {}", self.rlmp_relaxation)));
        }
        if !(self.positivity_floor > 0.0) {
            return Err(Error::InvalidParameter(format!("positivity_floor must be > 0, got {}", self.positivity_floor)));
        }
        Ok(())
    }

    /// Smallest safety factor keeping every moving equilibrium's density
    /// non-negative: `(1 - alpha) / 4 >= |v| / (2a)`. Below it the first-order
    /// update is not positivity preserving.
    pub fn min_positive_safety(&self) -> f64 {
        2.0 / (1.0 - self.alpha)
    }
}
