//! Browser demo: inlet perturbation statistics, a Sod tube and a coarse
//! jet preview, each a single call from JavaScript.
//!
//! The `*_data` functions are plain Rust and are what the native tests
//! exercise; the exported wrappers only convert errors.

use statjet::euler::{GasParams, PrimitiveState};
use statjet::grid::{FieldSnapshot, Grid};
use statjet::inlet::{density_perturbation, draw_coefficients, PerturbationParams};
use statjet::render::{color_indices, color_table, ColorMap};
use statjet::solver::{run_sample, Boundaries, CaseSetup, Floors, LatticeParams, Limiter, Solver, StepOutcome};
use wasm_bindgen::prelude::*;

/// Rows of `points` values over `ybar` in `[-1, 1]`: the ordinates, the
/// ensemble mean, the standard deviation, then `shown` sample paths.
pub fn perturbation_data(base_seed: u64, samples: usize, shown: usize, points: usize) -> Result<Vec<f64>, String> {
    if samples < 2 || points < 2 || shown > samples {
        return Err(format!("need samples >= 2, points >= 2 and shown <= samples (got {samples}, {points}, {shown})"));
    }
    let pp = PerturbationParams::default();
    let ybars: Vec<f64> = (0..points).map(|k| -1.0 + 2.0 * k as f64 / (points - 1) as f64).collect();
    let mut sum = vec![0.0; points];
    let mut sq = vec![0.0; points];
    let mut paths = Vec::with_capacity(shown * points);
    for m in 0..samples {
        let c = draw_coefficients(base_seed, m as u64, pp.modes);
        for (k, yb) in ybars.iter().enumerate() {
            let v = density_perturbation(yb * pp.r_jet, &c, &pp);
            sum[k] += v;
            sq[k] += v * v;
            if m < shown {
                paths.push(v);
            }
        }
    }
    let n = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std: Vec<f64> = sq.iter().zip(&mean).map(|(q, m)| ((q - n * m * m) / (n - 1.0)).max(0.0).sqrt()).collect();
    Ok([ybars, mean, std, paths].concat())
}

/// Density of the Sod tube at `t = 0.2` on `nx` cells of `[0, 1]`, for the
/// limiter `"first_order"`, `"second_order"` or `"rlmp"`.
pub fn sod_data(nx: usize, limiter: &str) -> Result<Vec<f64>, String> {
    let limiter = match limiter {
        "first_order" => Limiter::FirstOrder,
        "second_order" => Limiter::SecondOrder,
        "rlmp" => Limiter::Rlmp,
        other => return Err(format!("unknown limiter {other:?}")),
    };
    if !(8..=4000).contains(&nx) {
        return Err(format!("nx must lie in 8..=4000, got {nx}"));
    }
    let gas = GasParams::new(1.4).map_err(|e| e.to_string())?;
    let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).map_err(|e| e.to_string())?;
    let data = (0..grid.cells())
        .map(|k| {
            let left = grid.x_center((k % nx) as isize) < 0.5;
            let (rho, p) = if left { (1.0, 1.0) } else { (0.125, 0.1) };
            PrimitiveState::new(rho, 0.0, 0.0, p).to_conserved(gas)
        })
        .collect();
    let init = FieldSnapshot::new(grid, 0.0, 0, data).map_err(|e| e.to_string())?;
    let params = LatticeParams { limiter, ..Default::default() };
    let floors = Floors::relative(params.positivity_floor, 0.125, 0.1);
    let mut solver = Solver::new(&init, params, Boundaries::TUBE, None, floors, gas).map_err(|e| e.to_string())?;
    if solver.advance_to(0.2) == StepOutcome::Diverged {
        return Err("Sod run diverged".into());
    }
    let s = solver.snapshot(0);
    Ok((0..nx).map(|i| s.at(i, 0).rho).collect())
}

/// RGBA pixels (top row = largest y) of the log density of one jet sample
/// at `t_end`, on an `nx x nx/5` grid.
pub fn jet_rgba(nx: usize, t_end: f64, amplitude: f64, seed: u64) -> Result<Vec<u8>, String> {
    if !nx.is_multiple_of(5) || !(20..=500).contains(&nx) {
        return Err(format!("nx must be a multiple of 5 in 20..=500, got {nx}"));
    }
    if !(t_end > 0.0 && t_end <= 0.003) {
        return Err(format!("t_end must lie in (0, 0.003], got {t_end}"));
    }
    let pp = PerturbationParams { amplitude, ..Default::default() };
    pp.validate().map_err(|e| e.to_string())?;
    let gas = GasParams::monatomic();
    let setup = CaseSetup::jet(gas, LatticeParams::default(), pp);
    let grid = Grid::jet(nx, nx / 5).map_err(|e| e.to_string())?;
    let run = run_sample(&setup, &draw_coefficients(seed, 0, pp.modes), grid, &[t_end]).map_err(|e| e.to_string())?;
    if !run.admissible {
        return Err(format!("sample diverged at t = {:?}", run.diverged_at));
    }
    let rho = run.snapshots[0].plane(0);
    let idx = color_indices(&rho, 1e-3 * pp.rho_amb).map_err(|e| e.to_string())?;
    let table = color_table(ColorMap::Viridis);
    let mut out = Vec::with_capacity(4 * rho.len());
    for j in (0..grid.ny).rev() {
        for &k in &idx[j * nx..(j + 1) * nx] {
            out.extend_from_slice(&table[k as usize]);
            out.push(255);
        }
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn perturbation(base_seed: u64, samples: usize, shown: usize, points: usize) -> Result<Vec<f64>, JsError> {
    perturbation_data(base_seed, samples, shown, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sod(nx: usize, limiter: &str) -> Result<Vec<f64>, JsError> {
    sod_data(nx, limiter).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn jet(nx: usize, t_end: f64, amplitude: f64, seed: u64) -> Result<Vec<u8>, JsError> {
    jet_rgba(nx, t_end, amplitude, seed).map_err(|e| JsError::new(&e))
}
