//! Helpers shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use statjet::euler::{ConservedState, GasParams, PrimitiveState};
use statjet::grid::{FieldSnapshot, Grid};
use statjet::rng::SplitMix64;
use statjet::solver::{Boundaries, Floors, LatticeParams, Limiter, Solver, StepOutcome};

/// 1D primitive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prim1 {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

fn sound(s: Prim1, g: f64) -> f64 {
    (g * s.p / s.rho).sqrt()
}

/// Pressure function of one side and its derivative.
fn side_fn(p: f64, s: Prim1, g: f64) -> (f64, f64) {
    let c = sound(s, g);
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let r = p / s.p;
        let e = (g - 1.0) / (2.0 * g);
        (2.0 * c / (g - 1.0) * (r.powf(e) - 1.0), r.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c))
    }
}

/// Star-region pressure and velocity by Newton iteration.
pub fn star_state(l: Prim1, r: Prim1, g: f64) -> (f64, f64) {
    let du = r.u - l.u;
    let mut p = (0.5 * (l.p + r.p)).max(1e-8);
    for _ in 0..100 {
        let (fl, dl) = side_fn(p, l, g);
        let (fr, dr) = side_fn(p, r, g);
        let next = (p - (fl + fr + du) / (dl + dr)).max(1e-12);
        let done = (next - p).abs() <= 1e-15 * (next + p);
        p = next;
        if done {
            break;
        }
    }
    let (fl, _) = side_fn(p, l, g);
    let (fr, _) = side_fn(p, r, g);
    (p, 0.5 * (l.u + r.u) + 0.5 * (fr - fl))
}

/// Exact solution of the Riemann problem at similarity coordinate `xi = x / t`.
pub fn exact_riemann(l: Prim1, r: Prim1, g: f64, xi: f64) -> Prim1 {
    let (ps, us) = star_state(l, r, g);
    let gm = (g - 1.0) / (g + 1.0);
    if xi <= us {
        let c = sound(l, g);
        if ps > l.p {
            let s = l.u - c * ((g + 1.0) / (2.0 * g) * ps / l.p + (g - 1.0) / (2.0 * g)).sqrt();
            if xi <= s {
                l
            } else {
                Prim1 { rho: l.rho * (ps / l.p + gm) / (gm * ps / l.p + 1.0), u: us, p: ps }
            }
        } else {
            let cs = c * (ps / l.p).powf((g - 1.0) / (2.0 * g));
            if xi <= l.u - c {
                l
            } else if xi >= us - cs {
                Prim1 { rho: l.rho * (ps / l.p).powf(1.0 / g), u: us, p: ps }
            } else {
                let f = 2.0 / (g + 1.0) + gm / c * (l.u - xi);
                Prim1 { rho: l.rho * f.powf(2.0 / (g - 1.0)), u: 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * l.u + xi), p: l.p * f.powf(2.0 * g / (g - 1.0)) }
            }
        }
    } else {
        let c = sound(r, g);
        if ps > r.p {
            let s = r.u + c * ((g + 1.0) / (2.0 * g) * ps / r.p + (g - 1.0) / (2.0 * g)).sqrt();
            if xi >= s {
                r
            } else {
                Prim1 { rho: r.rho * (ps / r.p + gm) / (gm * ps / r.p + 1.0), u: us, p: ps }
            }
        } else {
            let cs = c * (ps / r.p).powf((g - 1.0) / (2.0 * g));
            if xi >= r.u + c {
                r
            } else if xi <= us + cs {
                Prim1 { rho: r.rho * (ps / r.p).powf(1.0 / g), u: us, p: ps }
            } else {
                let f = 2.0 / (g + 1.0) - gm / c * (r.u - xi);
                Prim1 { rho: r.rho * f.powf(2.0 / (g - 1.0)), u: 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * r.u + xi), p: r.p * f.powf(2.0 * g / (g - 1.0)) }
            }
        }
    }
}

pub const SOD_LEFT: Prim1 = Prim1 { rho: 1.0, u: 0.0, p: 1.0 };
pub const SOD_RIGHT: Prim1 = Prim1 { rho: 0.125, u: 0.0, p: 0.1 };
pub const SOD_T: f64 = 0.2;

/// Sod tube on `[0, 1]`, uniform in y, run to `t = 0.2`. Returns the L1
/// density error against the exact solution, averaged over rows.
pub fn sod_l1(nx: usize, limiter: Limiter) -> f64 {
    let gas = GasParams::new(1.4).unwrap();
    let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).unwrap();
    let data = (0..grid.cells())
        .map(|k| {
            let s = if grid.x_center((k % nx) as isize) < 0.5 { SOD_LEFT } else { SOD_RIGHT };
            PrimitiveState::new(s.rho, s.u, 0.0, s.p).to_conserved(gas)
        })
        .collect();
    let init = FieldSnapshot::new(grid, 0.0, 0, data).unwrap();
    let params = LatticeParams { limiter, ..Default::default() };
    let floors = Floors::relative(params.positivity_floor, SOD_RIGHT.rho, SOD_RIGHT.p);
    let mut solver = Solver::new(&init, params, Boundaries::TUBE, None, floors, gas).unwrap();
    assert_eq!(solver.advance_to(SOD_T), StepOutcome::Advanced);
    let snap = solver.snapshot(0);
    let dx = grid.dx();
    let mut err = 0.0;
    for j in 0..grid.ny {
        for i in 0..nx {
            let exact = exact_riemann(SOD_LEFT, SOD_RIGHT, 1.4, (grid.x_center(i as isize) - 0.5) / SOD_T);
            err += (snap.at(i, j).rho - exact.rho).abs() * dx;
        }
    }
    err / grid.ny as f64
}

/// Smooth random periodic field: a few low Fourier modes per primitive
/// variable around a quiescent base state.
pub fn smooth_periodic_field(grid: Grid, seed: u64, gas: GasParams) -> FieldSnapshot {
    let mut rng = SplitMix64::new(seed);
    let mut coeffs = [[0.0; 4]; 4];
    for c in coeffs.iter_mut() {
        for v in c.iter_mut() {
            *v = rng.next_symmetric();
        }
    }
    let lx = grid.dx() * grid.nx as f64;
    let ly = grid.dx() * grid.ny as f64;
    let mode = |c: [f64; 4], x: f64, y: f64| {
        let (kx, ky) = (2.0 * std::f64::consts::PI * x / lx, 2.0 * std::f64::consts::PI * y / ly);
        c[0] * kx.sin() + c[1] * kx.cos() + c[2] * ky.sin() + c[3] * (kx + ky).cos()
    };
    let mut data = Vec::with_capacity(grid.cells());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = (grid.x_center(i as isize), grid.y_center(j as isize));
            let rho = 1.0 + 0.1 * mode(coeffs[0], x, y);
            let v1 = 0.2 * mode(coeffs[1], x, y);
            let v2 = 0.2 * mode(coeffs[2], x, y);
            let p = 1.0 + 0.1 * mode(coeffs[3], x, y);
            data.push(PrimitiveState::new(rho, v1, v2, p).to_conserved(gas));
        }
    }
    FieldSnapshot::new(grid, 0.0, seed, data).unwrap()
}

pub fn totals(s: &FieldSnapshot) -> [f64; 4] {
    std::array::from_fn(|k| s.data.iter().map(|u| u.component(k)).sum())
}

pub fn rel_drift(a: [f64; 4], b: [f64; 4], scale: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|k| (a[k] - b[k]).abs() / scale[k])
}

/// Scale for relative drift of a total that may be near zero: the sum of
/// absolute values.
pub fn abs_totals(s: &FieldSnapshot) -> [f64; 4] {
    std::array::from_fn(|k| s.data.iter().map(|u| u.component(k).abs()).sum())
}

pub fn conserved(rho: f64, v1: f64, v2: f64, p: f64, gas: GasParams) -> ConservedState {
    PrimitiveState::new(rho, v1, v2, p).to_conserved(gas)
}
