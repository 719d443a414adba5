use super::blending::Floors;
use super::boundary::Boundaries;
use super::step::{Solver, StepOutcome};
use super::LatticeParams;
use crate::error::{Error, Result};
use crate::euler::{pressure, GasParams};
use crate::grid::{FieldSnapshot, Grid};
use crate::inlet::{initial_field, inlet_profile, ModeCoefficients, PerturbationParams};

/// Everything a single jet sample needs besides its coefficients and grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSetup {
    pub gas: GasParams,
    pub lattice: LatticeParams,
    pub perturbation: PerturbationParams,
    pub boundaries: Boundaries,
    /// Also reject finite snapshots with `rho <= 0` or `p <= 0`.
    pub positivity_admissibility: bool,
}

impl CaseSetup {
    pub fn jet(gas: GasParams, lattice: LatticeParams, perturbation: PerturbationParams) -> Self {
        Self { gas, lattice, perturbation, boundaries: Boundaries::JET, positivity_admissibility: false }
    }

    pub fn floors(&self) -> Floors {
        let amb = self.perturbation.ambient(self.gas);
        Floors::relative(self.lattice.positivity_floor, amb.rho, pressure(amb, self.gas))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    /// One per requested time; placeholders after a divergence.
    pub snapshots: Vec<FieldSnapshot>,
    pub admissible: bool,
    pub steps: u64,
    /// Solver time at which divergence was detected.
    pub diverged_at: Option<f64>,
}

/// Runs one sample from the quiescent initial field through every requested
/// time. Numerical divergence ends the run with placeholder snapshots; it is
/// not an error.
pub fn run_sample(setup: &CaseSetup, coeffs: &ModeCoefficients, grid: Grid, times: &[f64]) -> Result<SampleRun> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("snapshot times must be finite, non-negative and sorted".into()));
    }
    let gas = setup.gas;
    let initial = initial_field(&grid, coeffs, &setup.perturbation, gas);
    let profile = inlet_profile(&grid, coeffs, &setup.perturbation, gas);
    let inlet = setup.boundaries.has_inlet().then_some(profile);
    let mut solver = Solver::new(&initial, setup.lattice, setup.boundaries, inlet, setup.floors(), gas)?;

    let mut snapshots = Vec::with_capacity(times.len());
    let mut diverged_at = None;
    for &t in times {
        if diverged_at.is_none() {
            let outcome = if t == 0.0 { StepOutcome::Advanced } else { solver.advance_to(t) };
            if outcome == StepOutcome::Advanced {
                let snap = if t == 0.0 { FieldSnapshot { time: 0.0, ..initial.clone() } } else { solver.snapshot(coeffs.seed) };
                if setup.positivity_admissibility && !snap.data.iter().all(|u| u.rho > 0.0 && pressure(*u, gas) > 0.0) {
                    diverged_at = Some(solver.time());
                } else {
                    snapshots.push(snap);
                    continue;
                }
            } else {
                diverged_at = Some(solver.time());
            }
        }
        snapshots.push(FieldSnapshot::placeholder(grid, t, coeffs.seed));
    }
    Ok(SampleRun { snapshots, admissible: diverged_at.is_none(), steps: solver.steps(), diverged_at })
}
