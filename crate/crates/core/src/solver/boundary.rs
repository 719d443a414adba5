//! Ghost-layer fills. The x sides are filled for the interior rows first,
//! then the y sides for every column, which also takes care of corners.

use serde::{Deserialize, Serialize};

use super::field::{moving_maxwellians, DistributionField, GHOST};
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Dirichlet equilibrium inflow (x low side only).
    Inlet,
    /// Zero-gradient copy of the last interior layer.
    Outflow,
    /// Specular reflection.
    Wall,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundaries {
    pub x_low: Side,
    pub x_high: Side,
    pub y_low: Side,
    pub y_high: Side,
}

impl Boundaries {
    /// Inflow at `x = 0`, outflow at `x = x_max`, free-slip walls in `y`.
    pub const JET: Self = Self { x_low: Side::Inlet, x_high: Side::Outflow, y_low: Side::Wall, y_high: Side::Wall };
    pub const PERIODIC: Self =
        Self { x_low: Side::Periodic, x_high: Side::Periodic, y_low: Side::Periodic, y_high: Side::Periodic };
    pub const CLOSED: Self = Self { x_low: Side::Wall, x_high: Side::Wall, y_low: Side::Wall, y_high: Side::Wall };
    /// Transmissive ends with walls in `y`: an embedded 1D shock tube.
    pub const TUBE: Self = Self { x_low: Side::Outflow, x_high: Side::Outflow, y_low: Side::Wall, y_high: Side::Wall };

    pub fn validate(&self) -> Result<()> {
        if matches!(self.x_high, Side::Inlet) || matches!(self.y_low, Side::Inlet) || matches!(self.y_high, Side::Inlet) {
            return Err(Error::InvalidParameter("inlet is only supported on the low x side".into()));
        }
        if (self.x_low == Side::Periodic) != (self.x_high == Side::Periodic)
            || (self.y_low == Side::Periodic) != (self.y_high == Side::Periodic)
        {
            return Err(Error::InvalidParameter("periodic sides must come in pairs".into()));
        }
        Ok(())
    }

    pub fn x_periodic(&self) -> bool {
        self.x_low == Side::Periodic
    }

    pub fn y_periodic(&self) -> bool {
        self.y_low == Side::Periodic
    }

    pub fn has_inlet(&self) -> bool {
        self.x_low == Side::Inlet
    }
}

/// Inlet ghost columns hold the equilibria of the prescribed inflow state.
pub fn apply_inlet(dist: &mut DistributionField, profile: &[ConservedState], a: f64, alpha: f64, gas: GasParams) {
    let ny = dist.grid().ny;
    assert_eq!(profile.len(), ny, "inlet profile must have one state per row");
    for (j, &u) in profile.iter().enumerate() {
        let pops = moving_maxwellians(u, a, alpha, gas);
        for g in 1..=GHOST as isize {
            dist.set_cell(-g, j as isize, u, pops);
        }
    }
}

/// Outlet ghost columns copy the last interior column.
pub fn apply_outlet(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    for j in 0..dist.grid().ny as isize {
        for g in 0..GHOST as isize {
            dist.copy_cell((nx + g, j), (nx - 1, j));
        }
    }
}

/// Zero-gradient copy on the low x side.
pub(crate) fn apply_outflow_low(dist: &mut DistributionField) {
    for j in 0..dist.grid().ny as isize {
        for g in 1..=GHOST as isize {
            dist.copy_cell((-g, j), (0, j));
        }
    }
}

#[inline]
fn mirror_y(dist: &mut DistributionField, ghost: (isize, isize), src: (isize, isize)) {
    let u = dist.state(src.0, src.1).reflect_y();
    let p = [
        dist.population(0, src.0, src.1).reflect_y(),
        dist.population(1, src.0, src.1).reflect_y(),
        dist.population(3, src.0, src.1).reflect_y(),
        dist.population(2, src.0, src.1).reflect_y(),
    ];
    dist.set_cell(ghost.0, ghost.1, u, p);
}

#[inline]
fn mirror_x(dist: &mut DistributionField, ghost: (isize, isize), src: (isize, isize)) {
    let u = dist.state(src.0, src.1).reflect_x();
    let p = [
        dist.population(1, src.0, src.1).reflect_x(),
        dist.population(0, src.0, src.1).reflect_x(),
        dist.population(2, src.0, src.1).reflect_x(),
        dist.population(3, src.0, src.1).reflect_x(),
    ];
    dist.set_cell(ghost.0, ghost.1, u, p);
}

/// Free-slip walls at both y sides: ghost rows mirror the interior with the
/// normal momentum negated and the normal links exchanged.
pub fn apply_walls(dist: &mut DistributionField) {
    apply_wall_low_y(dist);
    apply_wall_high_y(dist);
}

fn apply_wall_low_y(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    let g = GHOST as isize;
    for i in -g..nx + g {
        for l in 0..g {
            mirror_y(dist, (i, -1 - l), (i, l));
        }
    }
}

fn apply_wall_high_y(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    let ny = dist.grid().ny as isize;
    let g = GHOST as isize;
    for i in -g..nx + g {
        for l in 0..g {
            mirror_y(dist, (i, ny + l), (i, ny - 1 - l));
        }
    }
}

fn apply_wall_low_x(dist: &mut DistributionField) {
    for j in 0..dist.grid().ny as isize {
        for l in 0..GHOST as isize {
            mirror_x(dist, (-1 - l, j), (l, j));
        }
    }
}

fn apply_wall_high_x(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    for j in 0..dist.grid().ny as isize {
        for l in 0..GHOST as isize {
            mirror_x(dist, (nx + l, j), (nx - 1 - l, j));
        }
    }
}

fn apply_periodic_x(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    for j in 0..dist.grid().ny as isize {
        for l in 1..=GHOST as isize {
            dist.copy_cell((-l, j), (nx - l, j));
            dist.copy_cell((nx - 1 + l, j), (l - 1, j));
        }
    }
}

fn apply_periodic_y(dist: &mut DistributionField) {
    let nx = dist.grid().nx as isize;
    let ny = dist.grid().ny as isize;
    let g = GHOST as isize;
    for i in -g..nx + g {
        for l in 1..=g {
            dist.copy_cell((i, -l), (i, ny - l));
            dist.copy_cell((i, ny - 1 + l), (i, l - 1));
        }
    }
}

/// Fills every ghost layer for the given boundary set.
pub fn fill_ghosts(
    dist: &mut DistributionField,
    boundaries: &Boundaries,
    inlet: Option<&[ConservedState]>,
    a: f64,
    alpha: f64,
    gas: GasParams,
) {
    match boundaries.x_low {
        Side::Inlet => apply_inlet(dist, inlet.expect("inlet boundary requires an inlet profile"), a, alpha, gas),
        Side::Outflow => apply_outflow_low(dist),
        Side::Wall => apply_wall_low_x(dist),
        Side::Periodic => apply_periodic_x(dist),
    }
    match boundaries.x_high {
        Side::Outflow => apply_outlet(dist),
        Side::Wall => apply_wall_high_x(dist),
        Side::Periodic => {
            if boundaries.x_low != Side::Periodic {
                apply_periodic_x(dist)
            }
        }
        Side::Inlet => unreachable!("validated"),
    }
    match boundaries.y_low {
        Side::Wall => apply_wall_low_y(dist),
        Side::Periodic => apply_periodic_y(dist),
        Side::Outflow => {
            let nx = dist.grid().nx as isize;
            for i in -(GHOST as isize)..nx + GHOST as isize {
                for l in 1..=GHOST as isize {
                    dist.copy_cell((i, -l), (i, 0));
                }
            }
        }
        Side::Inlet => unreachable!("validated"),
    }
    match boundaries.y_high {
        Side::Wall => apply_wall_high_y(dist),
        Side::Periodic => {}
        Side::Outflow => {
            let nx = dist.grid().nx as isize;
            let ny = dist.grid().ny as isize;
            for i in -(GHOST as isize)..nx + GHOST as isize {
                for l in 0..GHOST as isize {
                    dist.copy_cell((i, ny + l), (i, ny - 1));
                }
            }
        }
        Side::Inlet => unreachable!("validated"),
    }
}
