//! Per-interface blending between the first-order (theta = 0) and the
//! second-order (theta = 1) stream-collide update.
//!
//! The relaxed local maximum principle works per cell: the update is affine
//! in theta along `u_fo + theta * (u_so - u_fo)`, density bounds give theta
//! in closed form and pressure (concave in `u`) is checked afterwards with a
//! bisection fallback. Interfaces take the smaller of their two cell values.
//! Because interface values can be smaller than either cell value, the real
//! update is not on that segment; a repair pass zeroes the faces of any cell
//! still breaking the positivity floors until none is left.

use super::boundary::Boundaries;
use super::field::{DistributionField, Kinetics};
use super::step::blended_update;
use super::{LatticeParams, Limiter};
use crate::euler::{pressure, ConservedState, GasParams};

const BISECTION_STEPS: usize = 30;
const MAX_REPAIR_PASSES: usize = 32;

/// Absolute positivity floors for density and pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floors {
    pub rho: f64,
    pub p: f64,
}

impl Floors {
    pub fn relative(epsilon: f64, rho_ref: f64, p_ref: f64) -> Self {
        Self { rho: epsilon * rho_ref, p: epsilon * p_ref }
    }

    #[inline]
    pub fn admits(&self, u: ConservedState, gas: GasParams) -> bool {
        u.rho >= self.rho && pressure(u, gas) >= self.p
    }
}

/// Blending parameters on interfaces: `nx + 1` per row in x, `ny + 1` per
/// column in y.
#[derive(Debug, Clone, PartialEq)]
pub struct Blending {
    nx: usize,
    ny: usize,
    pub theta_x: Vec<f64>,
    pub theta_y: Vec<f64>,
    /// Cells whose faces were zeroed by the positivity repair.
    pub repaired: usize,
}

impl Blending {
    pub fn uniform(nx: usize, ny: usize, theta: f64) -> Self {
        Self { nx, ny, theta_x: vec![theta; (nx + 1) * ny], theta_y: vec![theta; nx * (ny + 1)], repaired: 0 }
    }

    /// Interface between cells `(i-1, j)` and `(i, j)`, `i` in `0..=nx`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.theta_x[j * (self.nx + 1) + i]
    }

    /// Interface between cells `(i, j-1)` and `(i, j)`, `j` in `0..=ny`.
    #[inline]
    pub fn y(&self, i: usize, j: usize) -> f64 {
        self.theta_y[j * self.nx + i]
    }

    #[inline]
    pub fn set_x(&mut self, i: usize, j: usize, v: f64) {
        self.theta_x[j * (self.nx + 1) + i] = v;
    }

    #[inline]
    pub fn set_y(&mut self, i: usize, j: usize, v: f64) {
        self.theta_y[j * self.nx + i] = v;
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn in_unit_range(&self) -> bool {
        self.theta_x.iter().chain(&self.theta_y).all(|t| (0.0..=1.0).contains(t))
    }

    /// Makes both copies of each wrapped interface agree.
    pub fn sync_periodic(&mut self, boundaries: &Boundaries) {
        if boundaries.x_periodic() {
            for j in 0..self.ny {
                let v = self.x(0, j).min(self.x(self.nx, j));
                self.set_x(0, j, v);
                self.set_x(self.nx, j, v);
            }
        }
        if boundaries.y_periodic() {
            for i in 0..self.nx {
                let v = self.y(i, 0).min(self.y(i, self.ny));
                self.set_y(i, 0, v);
                self.set_y(i, self.ny, v);
            }
        }
    }
}

/// Scratch space for the limiter, reused across steps.
#[derive(Debug, Clone, Default)]
pub(crate) struct LimiterScratch {
    fo: Vec<ConservedState>,
    fo_rho: Vec<f64>,
    fo_p: Vec<f64>,
    theta_cell: Vec<f64>,
}

/// Blending parameters for the next update of `dist`.
pub fn compute_blending(
    dist: &DistributionField,
    kin: &Kinetics,
    params: &LatticeParams,
    boundaries: &Boundaries,
    floors: Floors,
    gas: GasParams,
) -> Blending {
    let grid = dist.grid();
    let mut out = Blending::uniform(grid.nx, grid.ny, 0.0);
    let mut scratch = LimiterScratch::default();
    update_blending(&mut out, &mut scratch, dist, kin, params, boundaries, floors, gas);
    out
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn update_blending(
    out: &mut Blending,
    scratch: &mut LimiterScratch,
    dist: &DistributionField,
    kin: &Kinetics,
    params: &LatticeParams,
    boundaries: &Boundaries,
    floors: Floors,
    gas: GasParams,
) {
    out.repaired = 0;
    match params.limiter {
        Limiter::FirstOrder => {
            out.theta_x.fill(0.0);
            out.theta_y.fill(0.0);
        }
        Limiter::SecondOrder => {
            out.theta_x.fill(1.0);
            out.theta_y.fill(1.0);
        }
        Limiter::Rlmp => rlmp(out, scratch, dist, kin, params, boundaries, floors, gas),
    }
}

/// First-order candidate of cell `c` (all theta = 0).
#[inline]
fn first_order(dist: &DistributionField, kin: &Kinetics, c: usize) -> ConservedState {
    let w = dist.width();
    // paired by axis so mirrored cells see mirrored roundoff
    (kin.eq[0][c - 1] + kin.eq[1][c + 1]) + (kin.eq[2][c - w] + kin.eq[3][c + w]) + dist.state[c] * kin.alpha
}

/// Face contributions `(left, right, bottom, top)` of cell `c`; the update
/// is `u_fo + sum(theta_face * contribution)`.
#[inline]
fn face_terms(dist: &DistributionField, kin: &Kinetics, c: usize) -> [ConservedState; 4] {
    let w = dist.width();
    let n = &kin.neq;
    [n[0][c - 1] - n[1][c], n[1][c + 1] - n[0][c], n[2][c - w] - n[3][c], n[3][c + w] - n[2][c]]
}

/// Largest theta in `[0, 1]` keeping `fo + theta * delta` inside the bounds.
#[inline]
fn cell_theta(fo: ConservedState, delta: ConservedState, rho: (f64, f64), p: (f64, f64), gas: GasParams) -> f64 {
    let mut theta: f64 = 1.0;
    let d = delta.rho;
    if d > 0.0 {
        theta = theta.min((rho.1 - fo.rho) / d);
    } else if d < 0.0 {
        theta = theta.min((fo.rho - rho.0) / -d);
    }
    // also catches NaN bounds
    if !(theta > 0.0) {
        return 0.0;
    }
    let ok = |t: f64| {
        let u = fo + delta * t;
        let pr = pressure(u, gas);
        u.rho > 0.0 && pr >= p.0 && pr <= p.1
    };
    if ok(theta) {
        return theta;
    }
    if !ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, theta);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[allow(clippy::too_many_arguments)]
fn rlmp(
    out: &mut Blending,
    scratch: &mut LimiterScratch,
    dist: &DistributionField,
    kin: &Kinetics,
    params: &LatticeParams,
    boundaries: &Boundaries,
    floors: Floors,
    gas: GasParams,
) {
    let grid = *dist.grid();
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let w = dist.width();
    let n = dist.len();
    let kappa = params.rlmp_relaxation;
    scratch.fo.resize(n, ConservedState::ZERO);
    scratch.fo_rho.resize(n, f64::NAN);
    scratch.fo_p.resize(n, f64::NAN);
    scratch.theta_cell.resize(n, 0.0);

    // first-order candidates on the interior and the first ghost ring
    for j in -1..=ny {
        for i in -1..=nx {
            let c = dist.idx(i, j);
            let fo = first_order(dist, kin, c);
            scratch.fo[c] = fo;
            scratch.fo_rho[c] = fo.rho;
            scratch.fo_p[c] = if fo.rho > 0.0 { pressure(fo, gas) } else { f64::NAN };
        }
    }

    for j in 0..ny {
        for i in 0..nx {
            let c = dist.idx(i, j);
            let stencil = [c, c - 1, c + 1, c - w, c + w];
            let (mut rmin, mut rmax, mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            let mut valid = true;
            for &s in &stencil {
                let (r, p) = (scratch.fo_rho[s], scratch.fo_p[s]);
                valid &= r.is_finite() && p.is_finite();
                rmin = rmin.min(r);
                rmax = rmax.max(r);
                pmin = pmin.min(p);
                pmax = pmax.max(p);
            }
            scratch.theta_cell[c] = if valid {
                let rho_bounds = ((rmin - kappa * (rmax - rmin)).max(floors.rho), rmax + kappa * (rmax - rmin));
                let p_bounds = ((pmin - kappa * (pmax - pmin)).max(floors.p), pmax + kappa * (pmax - pmin));
                let [l, r, b, t] = face_terms(dist, kin, c);
                cell_theta(scratch.fo[c], (l + r) + (b + t), rho_bounds, p_bounds, gas)
            } else {
                0.0
            };
        }
    }

    let tc = |i: isize, j: isize| scratch.theta_cell[dist.idx(i, j)];
    for j in 0..ny {
        for i in 0..=nx {
            let v = if i == 0 || i == nx {
                if boundaries.x_periodic() {
                    tc(0, j).min(tc(nx - 1, j))
                } else if i == 0 {
                    tc(0, j)
                } else {
                    tc(nx - 1, j)
                }
            } else {
                tc(i - 1, j).min(tc(i, j))
            };
            out.set_x(i as usize, j as usize, v);
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let v = if j == 0 || j == ny {
                if boundaries.y_periodic() {
                    tc(i, 0).min(tc(i, ny - 1))
                } else if j == 0 {
                    tc(i, 0)
                } else {
                    tc(i, ny - 1)
                }
            } else {
                tc(i, j - 1).min(tc(i, j))
            };
            out.set_y(i as usize, j as usize, v);
        }
    }

    repair(out, dist, kin, boundaries, floors, gas);
}

/// Zeroes the faces of cells whose blended update breaks the floors, until
/// no offending cell with a nonzero face is left.
fn repair(
    out: &mut Blending,
    dist: &DistributionField,
    kin: &Kinetics,
    boundaries: &Boundaries,
    floors: Floors,
    gas: GasParams,
) {
    let grid = *dist.grid();
    let (nx, ny) = (grid.nx, grid.ny);
    let w = dist.width();
    // same arithmetic as the real update, so the floors hold bitwise
    let blended = |out: &Blending, i: usize, j: usize| {
        let c = dist.idx(i as isize, j as isize);
        blended_update(dist, kin, c, w, [out.x(i, j), out.x(i + 1, j), out.y(i, j), out.y(i, j + 1)]).0
    };
    let has_open_face =
        |out: &Blending, i: usize, j: usize| out.x(i, j) > 0.0 || out.x(i + 1, j) > 0.0 || out.y(i, j) > 0.0 || out.y(i, j + 1) > 0.0;

    let mut suspects: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    for _ in 0..MAX_REPAIR_PASSES {
        let violators: Vec<(usize, usize)> = suspects
            .iter()
            .copied()
            .filter(|&(i, j)| has_open_face(out, i, j) && !floors.admits(blended(out, i, j), gas))
            .collect();
        if violators.is_empty() {
            break;
        }
        out.repaired += violators.len();
        suspects.clear();
        for &(i, j) in &violators {
            out.set_x(i, j, 0.0);
            out.set_x(i + 1, j, 0.0);
            out.set_y(i, j, 0.0);
            out.set_y(i, j + 1, 0.0);
            suspects.push((i, j));
            if i > 0 {
                suspects.push((i - 1, j));
            }
            if i + 1 < nx {
                suspects.push((i + 1, j));
            }
            if j > 0 {
                suspects.push((i, j - 1));
            }
            if j + 1 < ny {
                suspects.push((i, j + 1));
            }
            if boundaries.x_periodic() && (i == 0 || i + 1 == nx) {
                out.set_x(0, j, 0.0);
                out.set_x(nx, j, 0.0);
                suspects.push((if i == 0 { nx - 1 } else { 0 }, j));
            }
            if boundaries.y_periodic() && (j == 0 || j + 1 == ny) {
                out.set_y(i, 0, 0.0);
                out.set_y(i, ny, 0.0);
                suspects.push((i, if j == 0 { ny - 1 } else { 0 }));
            }
        }
        suspects.sort_unstable();
        suspects.dedup();
    }
}
