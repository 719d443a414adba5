use crate::euler::{fluxes, ConservedState, GasParams};
use crate::grid::{FieldSnapshot, Grid};

/// Ghost layers on each side. The limiter needs first-order candidates of
/// the neighbours, which widens the stencil to radius two.
pub const GHOST: usize = 2;

/// The five discrete equilibria `M1..M5` for kinetic speed `a`.
///
/// `M1,M2` travel along `+x,-x`, `M3,M4` along `+y,-y`, `M5` rests.
pub fn maxwellians(u: ConservedState, a: f64, alpha: f64, gas: GasParams) -> [ConservedState; 5] {
    let (f, g) = fluxes(u, gas);
    let base = u * ((1.0 - alpha) / 4.0);
    let inv = 1.0 / (2.0 * a);
    [base + f * inv, base - f * inv, base + g * inv, base - g * inv, u * alpha]
}

/// The four moving equilibria only (the rest population is never stored).
#[inline]
pub(crate) fn moving_maxwellians(u: ConservedState, a: f64, alpha: f64, gas: GasParams) -> [ConservedState; 4] {
    let (f, g) = fluxes(u, gas);
    let base = u * ((1.0 - alpha) / 4.0);
    let inv = 1.0 / (2.0 * a);
    let f = f * inv;
    let g = g * inv;
    [base + f, base - f, base + g, base - g]
}

/// Solver state of one sample: macroscopic field plus the four moving
/// populations, on the grid extended by `GHOST` layers.
///
/// The rest population is folded into the macroscopic update and never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    grid: Grid,
    width: usize,
    height: usize,
    pub(crate) state: Vec<ConservedState>,
    pub(crate) pops: [Vec<ConservedState>; 4],
}

impl DistributionField {
    /// Every population at its equilibrium for `a`; ghosts left at zero
    /// until a boundary fill.
    pub fn at_equilibrium(field: &FieldSnapshot, a: f64, alpha: f64, gas: GasParams) -> Self {
        let grid = field.grid;
        let width = grid.nx + 2 * GHOST;
        let height = grid.ny + 2 * GHOST;
        let n = width * height;
        let mut out = Self {
            grid,
            width,
            height,
            state: vec![ConservedState::ZERO; n],
            pops: std::array::from_fn(|_| vec![ConservedState::ZERO; n]),
        };
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let u = field.at(i, j);
                let idx = out.idx(i as isize, j as isize);
                out.state[idx] = u;
                let m = moving_maxwellians(u, a, alpha, gas);
                for k in 0..4 {
                    out.pops[k][idx] = m[k];
                }
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub(crate) fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.width * self.height
    }

    /// Storage index of cell `(i, j)`; ghosts have `i < 0`, `i >= nx`, etc.
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        debug_assert!(i >= -(GHOST as isize) && i < (self.grid.nx + GHOST) as isize);
        debug_assert!(j >= -(GHOST as isize) && j < (self.grid.ny + GHOST) as isize);
        (j + GHOST as isize) as usize * self.width + (i + GHOST as isize) as usize
    }

    #[inline]
    pub fn state(&self, i: isize, j: isize) -> ConservedState {
        self.state[self.idx(i, j)]
    }

    /// Population `k` in `0..4` (links `+x, -x, +y, -y`).
    #[inline]
    pub fn population(&self, k: usize, i: isize, j: isize) -> ConservedState {
        self.pops[k][self.idx(i, j)]
    }

    pub fn set_cell(&mut self, i: isize, j: isize, state: ConservedState, pops: [ConservedState; 4]) {
        let idx = self.idx(i, j);
        self.state[idx] = state;
        for (k, p) in pops.into_iter().enumerate() {
            self.pops[k][idx] = p;
        }
    }

    pub(crate) fn copy_cell(&mut self, to: (isize, isize), from: (isize, isize)) {
        let (a, b) = (self.idx(to.0, to.1), self.idx(from.0, from.1));
        self.state[a] = self.state[b];
        for k in 0..4 {
            self.pops[k][a] = self.pops[k][b];
        }
    }

    /// Interior macroscopic field as a snapshot.
    pub fn snapshot(&self, time: f64, sample_seed: u64) -> FieldSnapshot {
        let mut data = Vec::with_capacity(self.grid.cells());
        for j in 0..self.grid.ny as isize {
            let row = self.idx(0, j);
            data.extend_from_slice(&self.state[row..row + self.grid.nx]);
        }
        FieldSnapshot { grid: self.grid, time, sample_seed, diverged: false, data }
    }

    /// Interior sum of the macroscopic state.
    pub fn interior_total(&self) -> ConservedState {
        let mut total = ConservedState::ZERO;
        for j in 0..self.grid.ny as isize {
            let row = self.idx(0, j);
            for u in &self.state[row..row + self.grid.nx] {
                total += *u;
            }
        }
        total
    }

    /// Iterator over interior macroscopic states, row-major.
    pub fn interior(&self) -> impl Iterator<Item = ConservedState> + '_ {
        (0..self.grid.ny as isize).flat_map(move |j| {
            let row = self.idx(0, j);
            self.state[row..row + self.grid.nx].iter().copied()
        })
    }
}

/// Equilibria and non-equilibrium parts `M_k(u) - u_k` of every stored cell
/// for one step's kinetic speed.
#[derive(Debug, Clone)]
pub struct Kinetics {
    pub a: f64,
    pub alpha: f64,
    pub(crate) eq: [Vec<ConservedState>; 4],
    pub(crate) neq: [Vec<ConservedState>; 4],
}

impl Kinetics {
    pub fn new(dist: &DistributionField, a: f64, alpha: f64, gas: GasParams) -> Self {
        let n = dist.len();
        let mut out = Self {
            a,
            alpha,
            eq: std::array::from_fn(|_| vec![ConservedState::ZERO; n]),
            neq: std::array::from_fn(|_| vec![ConservedState::ZERO; n]),
        };
        out.recompute(dist, a, gas);
        out
    }

    /// Refreshes in place; ghost layers must already be filled.
    pub fn recompute(&mut self, dist: &DistributionField, a: f64, gas: GasParams) {
        self.a = a;
        let alpha = self.alpha;
        let [e0, e1, e2, e3] = &mut self.eq;
        let [n0, n1, n2, n3] = &mut self.neq;
        for (idx, u) in dist.state.iter().enumerate() {
            let m = moving_maxwellians(*u, a, alpha, gas);
            e0[idx] = m[0];
            e1[idx] = m[1];
            e2[idx] = m[2];
            e3[idx] = m[3];
            n0[idx] = m[0] - dist.pops[0][idx];
            n1[idx] = m[1] - dist.pops[1][idx];
            n2[idx] = m[2] - dist.pops[2][idx];
            n3[idx] = m[3] - dist.pops[3][idx];
        }
    }
}
