//! Stochastic jet inlet: seeded spectral density perturbation, the inlet
//! profile it induces, and the initial field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasParams};
use crate::grid::{FieldSnapshot, Grid};
use crate::rng::{sample_seed, SplitMix64};

/// Taper applied to the perturbation across the jet core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// `cos^2(pi*ybar/2)` on `|ybar| <= 1`.
    #[default]
    CosineSquared,
    /// No taper inside the core.
    Flat,
}

impl Window {
    #[inline]
    pub fn eval(self, ybar: f64) -> f64 {
        if ybar.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Window::CosineSquared => {
                let c = (0.5 * PI * ybar).cos();
                c * c
            }
            Window::Flat => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationParams {
    pub amplitude: f64,
    pub modes: usize,
    pub decay_exponent: f64,
    pub r_jet: f64,
    pub rho_jet: f64,
    pub rho_amb: f64,
    pub p_amb: f64,
    pub v_jet: f64,
    pub window: Window,
}

impl Default for PerturbationParams {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            modes: 10,
            decay_exponent: 2.0,
            r_jet: 0.05,
            rho_jet: 5.0,
            rho_amb: 0.5,
            p_amb: 0.4127,
            v_jet: 800.0,
            window: Window::CosineSquared,
        }
    }
}

impl PerturbationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.amplitude >= 0.0) {
            return bad(format!("amplitude must be >= 0, got {}", self.amplitude));
        }
        if self.modes < 1 {
            return bad("modes must be >= 1".into());
        }
        if !(self.decay_exponent > 0.0) {
            return bad(format!("decay_exponent must be > 0, got {}", self.decay_exponent));
        }
        for (name, v) in [("r_jet", self.r_jet), ("rho_jet", self.rho_jet), ("rho_amb", self.rho_amb), ("p_amb", self.p_amb)] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.v_jet.is_finite() {
            return bad("v_jet must be finite".into());
        }
        Ok(())
    }

    /// Quiescent ambient state.
    pub fn ambient(&self, gas: GasParams) -> ConservedState {
        ConservedState::new(self.rho_amb, 0.0, 0.0, self.p_amb / (gas.gamma - 1.0))
    }
}

/// Random mode amplitudes `Y_k`, `Z_k` of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub seed: u64,
    pub y_coeffs: Vec<f64>,
    pub z_coeffs: Vec<f64>,
}

impl ModeCoefficients {
    pub fn modes(&self) -> usize {
        self.y_coeffs.len()
    }
}

/// Draws the `2K` uniforms of sample `m`, in the order `Y1, Z1, Y2, Z2, ...`.
///
/// Depends only on `(base_seed, m, modes)`, so every grid sees the same
/// realization.
pub fn draw_coefficients(base_seed: u64, m: u64, modes: usize) -> ModeCoefficients {
    let seed = sample_seed(base_seed, m);
    let mut rng = SplitMix64::new(seed);
    let mut y_coeffs = Vec::with_capacity(modes);
    let mut z_coeffs = Vec::with_capacity(modes);
    for _ in 0..modes {
        y_coeffs.push(rng.next_symmetric());
        z_coeffs.push(rng.next_symmetric());
    }
    ModeCoefficients { seed, y_coeffs, z_coeffs }
}

/// Perturbed jet-core density at transverse position `y` (`|y| <= r_jet`).
pub fn density_perturbation(y: f64, c: &ModeCoefficients, pp: &PerturbationParams) -> f64 {
    let ybar = y / pp.r_jet;
    let window = pp.window.eval(ybar);
    let mut series = 0.0;
    for (idx, (yk, zk)) in c.y_coeffs.iter().zip(&c.z_coeffs).enumerate() {
        let k = (idx + 1) as f64;
        let (s, co) = (k * PI * ybar).sin_cos();
        series += k.powf(-pp.decay_exponent) * (yk * co + zk * s);
    }
    pp.rho_jet * (1.0 + pp.amplitude * series * window)
}

/// Inlet state: perturbed jet inside the core, ambient gas outside, both at
/// the ambient pressure.
pub fn inlet_state(y: f64, c: &ModeCoefficients, pp: &PerturbationParams, gas: GasParams) -> ConservedState {
    let thermal = pp.p_amb / (gas.gamma - 1.0);
    if y.abs() <= pp.r_jet {
        let rho = density_perturbation(y, c, pp);
        ConservedState::new(rho, rho * pp.v_jet, 0.0, thermal + 0.5 * rho * pp.v_jet * pp.v_jet)
    } else {
        ConservedState::new(pp.rho_amb, 0.0, 0.0, thermal)
    }
}

/// Inlet states at the cell-centre ordinates of every grid row.
pub fn inlet_profile(grid: &Grid, c: &ModeCoefficients, pp: &PerturbationParams, gas: GasParams) -> Vec<ConservedState> {
    (0..grid.ny).map(|j| inlet_state(grid.y_center(j as isize), c, pp, gas)).collect()
}

/// Initial field: quiescent ambient gas, except that the first column (the
/// cells bordering `x = 0`) carries the inlet trace.
pub fn initial_field(grid: &Grid, c: &ModeCoefficients, pp: &PerturbationParams, gas: GasParams) -> FieldSnapshot {
    let mut field = FieldSnapshot::uniform(*grid, pp.ambient(gas));
    field.sample_seed = c.seed;
    for (j, state) in inlet_profile(grid, c, pp, gas).into_iter().enumerate() {
        field.data[grid.index(0, j)] = state;
    }
    field
}
