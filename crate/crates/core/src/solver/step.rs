use super::blending::{update_blending, Blending, Floors, LimiterScratch};
use super::boundary::{fill_ghosts, Boundaries};
use super::field::{DistributionField, Kinetics};
use super::{LatticeParams, Limiter};
use crate::error::{Error, Result};
use crate::euler::{max_wave_speed_with, ConservedState, GasParams};
use crate::grid::FieldSnapshot;

/// `safety * max(|v| + c)` over the given states.
pub fn kinetic_speed<I>(states: I, params: &LatticeParams, gas: GasParams) -> Result<f64>
where
    I: IntoIterator<Item = ConservedState>,
{
    let mut s_max: f64 = 0.0;
    for u in states {
        s_max = s_max.max(max_wave_speed_with(u, gas, params.wave_speed_bound)?);
    }
    if !(s_max > 0.0) {
        return Err(Error::NonPhysicalState("no positive wave speed in field".into()));
    }
    Ok(params.safety * s_max)
}

/// One blended stream-collide update of every interior cell of `dist` into
/// `out`. Ghost layers of `dist` and `kin` must be current; ghosts of `out`
/// are left untouched.
pub fn stream_collide_step(dist: &DistributionField, kin: &Kinetics, theta: &Blending, out: &mut DistributionField) {
    let grid = *dist.grid();
    debug_assert!(grid.same_shape(out.grid()));
    let w = dist.width();
    for j in 0..grid.ny {
        let row = dist.idx(0, j as isize);
        for i in 0..grid.nx {
            let c = row + i;
            let th = [theta.x(i, j), theta.x(i + 1, j), theta.y(i, j), theta.y(i, j + 1)];
            let (u, pops) = blended_update(dist, kin, c, w, th);
            out.state[c] = u;
            for (k, p) in pops.into_iter().enumerate() {
                out.pops[k][c] = p;
            }
        }
    }
}

/// Update of storage cell `c` with face parameters `[left, right, bottom, top]`.
#[inline(always)]
pub(crate) fn blended_update(
    dist: &DistributionField,
    kin: &Kinetics,
    c: usize,
    w: usize,
    th: [f64; 4],
) -> (ConservedState, [ConservedState; 4]) {
    let [e0, e1, e2, e3] = &kin.eq;
    let [n0, n1, n2, n3] = &kin.neq;
    let (west, east, south, north) = (c - 1, c + 1, c - w, c + w);
    let [tl, tr, tb, tt] = th;
    let u1 = e0[west] + n0[west] * tl;
    let u2 = e1[east] + n1[east] * tr;
    let u3 = e2[south] + n2[south] * tb;
    let u4 = e3[north] + n3[north] * tt;
    // grouped by axis: a mirror image of the field gets bitwise mirrored values
    let outgoing = (n1[c] * tl + n0[c] * tr) + (n3[c] * tb + n2[c] * tt);
    let u = (u1 + u2) + (u3 + u4) + dist.state[c] * kin.alpha - outgoing;
    (u, [u1, u2, u3, u4])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Advanced,
    /// A non-finite or non-physical macroscopic value appeared; the solver
    /// refuses further steps.
    Diverged,
}

/// Time integrator of one field.
#[derive(Debug, Clone)]
pub struct Solver {
    gas: GasParams,
    params: LatticeParams,
    boundaries: Boundaries,
    inlet: Option<Vec<ConservedState>>,
    floors: Floors,
    dist: DistributionField,
    next: DistributionField,
    kin: Kinetics,
    blending: Blending,
    scratch: LimiterScratch,
    time: f64,
    steps: u64,
    diverged: bool,
}

impl Solver {
    /// Populations start at the equilibrium of `initial` for the initial
    /// kinetic speed. `inlet` is required iff a side is an inlet; it holds
    /// one state per row.
    pub fn new(
        initial: &FieldSnapshot,
        params: LatticeParams,
        boundaries: Boundaries,
        inlet: Option<Vec<ConservedState>>,
        floors: Floors,
        gas: GasParams,
    ) -> Result<Self> {
        params.validate()?;
        boundaries.validate()?;
        let grid = initial.grid;
        match (&inlet, boundaries.has_inlet()) {
            (Some(p), true) if p.len() == grid.ny => {}
            (Some(p), true) => {
                return Err(Error::DimensionMismatch(format!("inlet profile has {} rows, grid has {}", p.len(), grid.ny)))
            }
            (None, true) => return Err(Error::InvalidParameter("inlet boundary needs an inlet profile".into())),
            (Some(_), false) => return Err(Error::InvalidParameter("inlet profile given without an inlet boundary".into())),
            (None, false) => {}
        }
        let a = kinetic_speed(initial.data.iter().copied().chain(inlet.iter().flatten().copied()), &params, gas)?;
        let dist = DistributionField::at_equilibrium(initial, a, params.alpha, gas);
        let kin = Kinetics::new(&dist, a, params.alpha, gas);
        Ok(Self {
            gas,
            params,
            boundaries,
            inlet,
            floors,
            next: dist.clone(),
            dist,
            kin,
            blending: Blending::uniform(grid.nx, grid.ny, 0.0),
            scratch: LimiterScratch::default(),
            time: initial.time,
            steps: 0,
            diverged: false,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn field(&self) -> &DistributionField {
        &self.dist
    }

    /// Blending used by the most recent step.
    pub fn blending(&self) -> &Blending {
        &self.blending
    }

    pub fn snapshot(&self, sample_seed: u64) -> FieldSnapshot {
        self.dist.snapshot(self.time, sample_seed)
    }

    /// Smallest admissible kinetic speed for the current state.
    pub fn kinetic_speed(&self) -> Result<f64> {
        let inlet = self.inlet.iter().flatten().copied();
        kinetic_speed(self.dist.interior().chain(inlet), &self.params, self.gas)
    }

    /// One step at kinetic speed `a`, i.e. `dt = dx / a`.
    pub fn step_with_speed(&mut self, a: f64) -> StepOutcome {
        if self.diverged {
            return StepOutcome::Diverged;
        }
        let alpha = self.params.alpha;
        fill_ghosts(&mut self.dist, &self.boundaries, self.inlet.as_deref(), a, alpha, self.gas);
        self.kin.recompute(&self.dist, a, self.gas);
        update_blending(
            &mut self.blending,
            &mut self.scratch,
            &self.dist,
            &self.kin,
            &self.params,
            &self.boundaries,
            self.floors,
            self.gas,
        );
        stream_collide_step(&self.dist, &self.kin, &self.blending, &mut self.next);
        std::mem::swap(&mut self.dist, &mut self.next);
        self.time += self.dist.grid().dx() / a;
        self.steps += 1;
        if !self.dist.interior().all(|u| u.is_finite()) {
            self.diverged = true;
            return StepOutcome::Diverged;
        }
        if cfg!(debug_assertions) && self.params.limiter == Limiter::Rlmp {
            debug_assert!(
                self.dist.interior().all(|u| self.floors.admits(u, self.gas)),
                "positivity floor violated at step {}",
                self.steps
            );
        }
        StepOutcome::Advanced
    }

    /// One step at the adaptive kinetic speed.
    pub fn step(&mut self) -> StepOutcome {
        match self.kinetic_speed() {
            Ok(a) => self.step_with_speed(a),
            Err(_) => {
                self.diverged = true;
                StepOutcome::Diverged
            }
        }
    }

    /// Advances to exactly `t_target`. The remaining interval is split into
    /// the fewest equal steps allowed by the current kinetic speed, which is
    /// recomputed every step.
    pub fn advance_to(&mut self, t_target: f64) -> StepOutcome {
        if self.diverged {
            return StepOutcome::Diverged;
        }
        let dx = self.dist.grid().dx();
        while self.time < t_target {
            let a_min = match self.kinetic_speed() {
                Ok(a) => a,
                Err(_) => {
                    self.diverged = true;
                    return StepOutcome::Diverged;
                }
            };
            let remaining = t_target - self.time;
            let n = (remaining * a_min / dx * (1.0 - 1e-12)).ceil().max(1.0);
            let a = dx * n / remaining;
            let last = n == 1.0;
            if self.step_with_speed(a) == StepOutcome::Diverged {
                return StepOutcome::Diverged;
            }
            if last {
                self.time = t_target;
            }
        }
        StepOutcome::Advanced
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn kinetic_speed_scales_with_safety() {
        let gas = GasParams::monatomic();
        let u = ConservedState::new(1.0, 0.0, 0.0, 1.5);
        let c = crate::euler::sound_speed(u, gas);
        let p1 = LatticeParams { safety: 1.0, ..Default::default() };
        let p2 = LatticeParams { safety: 2.0, ..Default::default() };
        assert_eq!(kinetic_speed([u], &p1, gas).unwrap(), c);
        assert_eq!(kinetic_speed([u], &p2, gas).unwrap(), 2.0 * c);
        let bad = ConservedState::new(-1.0, 0.0, 0.0, 1.0);
        assert!(kinetic_speed([u, bad], &p1, gas).is_err());
    }

    #[test]
    fn uniform_state_is_a_fixed_point() {
        let gas = GasParams::monatomic();
        let grid = Grid::from_spacing(8, 6, 0.1).unwrap();
        let u = ConservedState::new(1.3, 0.4, -0.7, 3.0);
        for alpha in [0.0, 0.25, 0.5] {
            let params = LatticeParams { alpha, ..Default::default() };
            let mut s = Solver::new(&FieldSnapshot::uniform(grid, u), params, Boundaries::PERIODIC, None, Floors::relative(1e-10, 1.0, 1.0), gas)
                .unwrap();
            for _ in 0..10 {
                assert_eq!(s.step(), StepOutcome::Advanced);
            }
            for v in s.field().interior() {
                assert!((v - u).abs_sum() <= 1e-13 * u.abs_sum());
            }
        }
    }

    #[test]
    fn advance_hits_target_exactly() {
        let gas = GasParams::monatomic();
        let grid = Grid::from_spacing(8, 8, 0.1).unwrap();
        let u = ConservedState::new(1.0, 0.1, 0.0, 2.0);
        let mut s =
            Solver::new(&FieldSnapshot::uniform(grid, u), LatticeParams::default(), Boundaries::PERIODIC, None, Floors::relative(1e-10, 1.0, 1.0), gas)
                .unwrap();
        s.advance_to(0.0137);
        assert_eq!(s.time(), 0.0137);
        let steps = s.steps();
        s.advance_to(0.0137);
        assert_eq!(s.steps(), steps);
    }

    #[test]
    fn inlet_profile_must_match_boundaries() {
        let gas = GasParams::monatomic();
        let grid = Grid::from_spacing(8, 8, 0.1).unwrap();
        let field = FieldSnapshot::uniform(grid, ConservedState::new(1.0, 0.0, 0.0, 2.0));
        let floors = Floors::relative(1e-10, 1.0, 1.0);
        let p = LatticeParams::default();
        assert!(Solver::new(&field, p, Boundaries::JET, None, floors, gas).is_err());
        assert!(Solver::new(&field, p, Boundaries::JET, Some(vec![field.data[0]; 7]), floors, gas).is_err());
        assert!(Solver::new(&field, p, Boundaries::PERIODIC, Some(vec![field.data[0]; 8]), floors, gas).is_err());
        assert!(Solver::new(&field, p, Boundaries::JET, Some(vec![field.data[0]; 8]), floors, gas).is_ok());
    }
}
