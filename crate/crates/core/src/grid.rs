//! Cell-centred Cartesian grid and per-time field snapshots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::ConservedState;

/// Uniform grid of square cells on `[0, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(nx: usize, ny: usize, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if nx < Self::MIN_CELLS || ny < Self::MIN_CELLS {
            return Err(Error::InvalidGrid(format!("need at least {} cells per axis, got {nx}x{ny}", Self::MIN_CELLS)));
        }
        if !(x_max > 0.0) || !(y_max > y_min) || !x_max.is_finite() || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::InvalidGrid(format!("degenerate extents x_max={x_max}, y=[{y_min}, {y_max}]")));
        }
        let dx = x_max / nx as f64;
        let dy = (y_max - y_min) / ny as f64;
        if (dx - dy).abs() > 1e-12 * dx {
            return Err(Error::InvalidGrid(format!("cells must be square: dx={dx}, dy={dy}")));
        }
        Ok(Self { nx, ny, x_max, y_min, y_max })
    }

    /// Grid with spacing `dx`, `x` starting at 0 and `y` centred on 0.
    pub fn from_spacing(nx: usize, ny: usize, dx: f64) -> Result<Self> {
        let half = 0.5 * ny as f64 * dx;
        Self::new(nx, ny, nx as f64 * dx, -half, half)
    }

    /// The mach-2000 jet domain `[0, 2.5] x [-0.25, 0.25]`.
    pub fn jet(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, 2.5, -0.25, 0.25)
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.x_max / self.nx as f64
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn x_center(&self, i: isize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn y_center(&self, j: isize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// The grid with half as many cells per axis over the same domain.
    pub fn coarsened(&self) -> Result<Self> {
        if !self.nx.is_multiple_of(2) || !self.ny.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!("cannot coarsen odd grid {}x{}", self.nx, self.ny)));
        }
        Self::new(self.nx / 2, self.ny / 2, self.x_max, self.y_min, self.y_max)
    }

    /// Same cell counts and (to rounding) the same spacing.
    pub fn same_shape(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny && (self.dx() - other.dx()).abs() <= 1e-12 * self.dx()
    }

    pub fn label(&self) -> String {
        format!("{}x{}", self.nx, self.ny)
    }
}

/// One realization of the macroscopic field at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub grid: Grid,
    pub time: f64,
    pub sample_seed: u64,
    /// Set for placeholder snapshots of samples that diverged.
    pub diverged: bool,
    /// Row-major, x fastest.
    pub data: Vec<ConservedState>,
}

impl FieldSnapshot {
    pub fn new(grid: Grid, time: f64, sample_seed: u64, data: Vec<ConservedState>) -> Result<Self> {
        if data.len() != grid.cells() {
            return Err(Error::DimensionMismatch(format!(
                "snapshot data has {} cells, grid {} needs {}",
                data.len(),
                grid.label(),
                grid.cells()
            )));
        }
        Ok(Self { grid, time, sample_seed, diverged: false, data })
    }

    pub fn uniform(grid: Grid, state: ConservedState) -> Self {
        Self { grid, time: 0.0, sample_seed: 0, diverged: false, data: vec![state; grid.cells()] }
    }

    /// Placeholder for a diverged sample: NaN data, divergence flag set.
    pub fn placeholder(grid: Grid, time: f64, sample_seed: u64) -> Self {
        let nan = ConservedState::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        Self { grid, time, sample_seed, diverged: true, data: vec![nan; grid.cells()] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> ConservedState {
        self.data[self.grid.index(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(ConservedState::is_finite)
    }

    /// Sum of one component over all cells, times cell area.
    pub fn integral(&self, component: usize) -> f64 {
        let dx = self.grid.dx();
        self.data.iter().map(|u| u.component(component)).sum::<f64>() * dx * dx
    }

    pub fn plane(&self, component: usize) -> Vec<f64> {
        self.data.iter().map(|u| u.component(component)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_grid_is_square() {
        let g = Grid::jet(500, 100).unwrap();
        assert!((g.dx() - 0.005).abs() < 1e-15);
        assert!((g.y_center(0) + 0.2475).abs() < 1e-12);
        assert!((g.x_center(0) - 0.0025).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::jet(500, 101).is_err());
        assert!(Grid::jet(3, 3).is_err());
        assert!(Grid::new(8, 8, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn coarsening() {
        let g = Grid::jet(500, 100).unwrap();
        let c = g.coarsened().unwrap();
        assert_eq!((c.nx, c.ny), (250, 50));
        assert!(!Grid::jet(250, 50).unwrap().coarsened().is_err());
        assert!(Grid::from_spacing(5, 4, 0.1).unwrap().coarsened().is_err());
    }

    #[test]
    fn snapshot_length_checked() {
        let g = Grid::from_spacing(4, 4, 0.25).unwrap();
        assert!(FieldSnapshot::new(g, 0.0, 0, vec![ConservedState::ZERO; 15]).is_err());
    }
}
