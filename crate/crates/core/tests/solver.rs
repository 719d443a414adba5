mod common;

use common::*;
use statjet::euler::{flux_x, flux_y, pressure, ConservedState, GasParams};
use statjet::grid::{FieldSnapshot, Grid};
use statjet::inlet::{draw_coefficients, initial_field, inlet_profile, PerturbationParams};
use statjet::metrics::fit_rate;
use statjet::rng::SplitMix64;
use statjet::solver::{
    fill_ghosts, kinetic_speed, stream_collide_step, Blending, Boundaries, DistributionField, Floors, Kinetics,
    LatticeParams, Limiter, Solver, StepOutcome,
};

#[test]
fn riemann_oracle_star_state() {
    let (p, u) = star_state(SOD_LEFT, SOD_RIGHT, 1.4);
    assert!((p - 0.30313).abs() < 1e-5, "{p}");
    assert!((u - 0.92745).abs() < 1e-5, "{u}");
    // far field and plateau densities
    assert_eq!(exact_riemann(SOD_LEFT, SOD_RIGHT, 1.4, -2.0), SOD_LEFT);
    assert_eq!(exact_riemann(SOD_LEFT, SOD_RIGHT, 1.4, 2.0), SOD_RIGHT);
    let contact_left = exact_riemann(SOD_LEFT, SOD_RIGHT, 1.4, u - 1e-9).rho;
    let contact_right = exact_riemann(SOD_LEFT, SOD_RIGHT, 1.4, u + 1e-9).rho;
    assert!((contact_left - 0.42632).abs() < 1e-5, "{contact_left}");
    assert!((contact_right - 0.26557).abs() < 1e-5, "{contact_right}");
}

#[test]
fn riemann_oracle_is_symmetric() {
    let l = Prim1 { rho: 1.0, u: 0.3, p: 2.0 };
    let r = Prim1 { rho: 0.4, u: -0.2, p: 0.5 };
    let ml = Prim1 { u: -r.u, ..r };
    let mr = Prim1 { u: -l.u, ..l };
    for k in -20..=20 {
        let xi = k as f64 * 0.1;
        let a = exact_riemann(l, r, 1.4, xi);
        let b = exact_riemann(ml, mr, 1.4, -xi);
        assert!((a.rho - b.rho).abs() < 1e-12 && (a.u + b.u).abs() < 1e-12 && (a.p - b.p).abs() < 1e-12, "xi {xi}");
    }
}

#[test]
fn sod_tube_converges_to_the_exact_solution() {
    let errs: Vec<f64> = [100, 200, 400].iter().map(|&n| sod_l1(n, Limiter::Rlmp)).collect();
    assert!(errs[2] <= 0.02, "{errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

fn random_blending(nx: usize, ny: usize, rng: &mut SplitMix64) -> Blending {
    let mut b = Blending::uniform(nx, ny, 0.0);
    for t in b.theta_x.iter_mut().chain(b.theta_y.iter_mut()) {
        *t = rng.next_unit();
    }
    b.sync_periodic(&Boundaries::PERIODIC);
    b
}

#[test]
fn periodic_conservation_with_random_blending() {
    let gas = GasParams::new(1.4).unwrap();
    for alpha in [0.0, 0.25, 0.5] {
        let grid = Grid::from_spacing(32, 32, 1.0 / 32.0).unwrap();
        let init = smooth_periodic_field(grid, 11, gas);
        let params = LatticeParams { alpha, safety: 4.0, ..Default::default() };
        let a = kinetic_speed(init.data.iter().copied(), &params, gas).unwrap();
        let mut dist = DistributionField::at_equilibrium(&init, a, alpha, gas);
        let mut next = dist.clone();
        let mut kin = Kinetics::new(&dist, a, alpha, gas);
        let mut rng = SplitMix64::new(5);
        let start = totals(&init);
        let scale = abs_totals(&init);
        for _ in 0..50 {
            fill_ghosts(&mut dist, &Boundaries::PERIODIC, None, a, alpha, gas);
            kin.recompute(&dist, a, gas);
            let theta = random_blending(grid.nx, grid.ny, &mut rng);
            stream_collide_step(&dist, &kin, &theta, &mut next);
            std::mem::swap(&mut dist, &mut next);
        }
        let drift = rel_drift(totals(&dist.snapshot(0.0, 0)), start, scale);
        assert!(drift.iter().all(|d| *d <= 1e-12), "alpha {alpha}: {drift:?}");
    }
}

/// Straight-line first-order kinetic update of a row that is uniform in y
/// with zero normal velocity, zero-gradient ends.
fn first_order_oracle(row: &[ConservedState], a: f64, alpha: f64, gas: GasParams) -> Vec<ConservedState> {
    let n = row.len();
    let w = (1.0 - alpha) / 4.0;
    let m = |u: ConservedState, k: usize| -> ConservedState {
        match k {
            0 => u * w + flux_x(u, gas) * (0.5 / a),
            1 => u * w - flux_x(u, gas) * (0.5 / a),
            2 => u * w + flux_y(u, gas) * (0.5 / a),
            _ => u * w - flux_y(u, gas) * (0.5 / a),
        }
    };
    (0..n)
        .map(|i| {
            let west = row[i.saturating_sub(1)];
            let east = row[(i + 1).min(n - 1)];
            m(west, 0) + m(east, 1) + m(row[i], 2) + m(row[i], 3) + row[i] * alpha
        })
        .collect()
}

#[test]
fn zero_blending_is_the_first_order_scheme() {
    let gas = GasParams::new(1.4).unwrap();
    for alpha in [0.0, 0.25, 0.5] {
        let nx = 40;
        let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).unwrap();
        let row: Vec<ConservedState> = (0..nx)
            .map(|i| if i < nx / 2 { conserved(1.0, 0.0, 0.0, 1.0, gas) } else { conserved(0.125, 0.0, 0.0, 0.1, gas) })
            .collect();
        let data = (0..4).flat_map(|_| row.iter().copied()).collect();
        let init = FieldSnapshot::new(grid, 0.0, 0, data).unwrap();
        let params = LatticeParams { alpha, limiter: Limiter::FirstOrder, safety: 4.0, ..Default::default() };
        let floors = Floors::relative(1e-10, 0.125, 0.1);
        let mut solver = Solver::new(&init, params, Boundaries::TUBE, None, floors, gas).unwrap();
        let a = solver.kinetic_speed().unwrap();
        let mut oracle = row.clone();
        for step in 0..20 {
            assert_eq!(solver.step_with_speed(a), StepOutcome::Advanced);
            assert!(solver.blending().theta_x.iter().all(|t| *t == 0.0));
            oracle = first_order_oracle(&oracle, a, alpha, gas);
            let s = solver.snapshot(0);
            for j in 0..4 {
                for i in 0..nx {
                    let (got, want) = (s.at(i, j), oracle[i]);
                    for k in 0..4 {
                        let tol = 1e-13 * (1.0 + want.component(k).abs());
                        assert!(
                            (got.component(k) - want.component(k)).abs() <= tol,
                            "alpha {alpha} step {step} cell {i},{j} comp {k}: {got:?} vs {want:?}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn walls_conserve_mass_and_energy() {
    let gas = GasParams::new(1.4).unwrap();
    let grid = Grid::from_spacing(32, 32, 1.0 / 32.0).unwrap();
    let init = smooth_periodic_field(grid, 3, gas);
    let start = totals(&init);
    let scale = abs_totals(&init);
    let floors = Floors::relative(1e-10, 1.0, 1.0);
    for (boundaries, conserved_comps) in [(Boundaries::CLOSED, vec![0, 3]), (x_periodic_channel(), vec![0, 1, 3])] {
        let mut solver = Solver::new(&init, LatticeParams::default(), boundaries, None, floors, gas).unwrap();
        for _ in 0..100 {
            assert_eq!(solver.step(), StepOutcome::Advanced);
        }
        let drift = rel_drift(totals(&solver.snapshot(0)), start, scale);
        for k in conserved_comps {
            assert!(drift[k] <= 1e-11, "{boundaries:?}: component {k} drift {drift:?}");
        }
    }
}

fn x_periodic_channel() -> Boundaries {
    Boundaries { x_low: statjet::solver::Side::Periodic, x_high: statjet::solver::Side::Periodic, ..Boundaries::CLOSED }
}

#[test]
fn unperturbed_jet_stays_mirror_symmetric() {
    let gas = GasParams::monatomic();
    let pp = PerturbationParams { amplitude: 0.0, ..Default::default() };
    let grid = Grid::jet(100, 20).unwrap();
    let c = draw_coefficients(1, 0, pp.modes);
    let init = initial_field(&grid, &c, &pp, gas);
    let profile = inlet_profile(&grid, &c, &pp, gas);
    let amb = pp.ambient(gas);
    let floors = Floors::relative(1e-10, amb.rho, pressure(amb, gas));
    let mut solver = Solver::new(&init, LatticeParams::default(), Boundaries::JET, Some(profile), floors, gas).unwrap();
    for _ in 0..100 {
        assert_eq!(solver.step(), StepOutcome::Advanced);
    }
    let s = solver.snapshot(0);
    let scale: [f64; 4] = std::array::from_fn(|k| s.data.iter().map(|u| u.component(k).abs()).fold(0.0, f64::max));
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (u, m) = (s.at(i, j), s.at(i, grid.ny - 1 - j).reflect_y());
            for k in 0..4 {
                assert!((u.component(k) - m.component(k)).abs() <= 1e-10 * scale[k], "cell {i},{j} comp {k}");
            }
        }
    }
    // the jet has actually entered the domain
    assert!(s.at(1, grid.ny / 2).rho > 1.0);
}

#[test]
fn outflow_does_not_reflect_an_exiting_wave() {
    let gas = GasParams::new(1.4).unwrap();
    let nx = 200;
    let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).unwrap();
    let amp = 0.5;
    let bump = |x: f64| 1.0 + amp * (-((x - 0.85) / 0.03f64).powi(2)).exp();
    let data = (0..grid.cells()).map(|k| conserved(bump(grid.x_center((k % nx) as isize)), 1.0, 0.0, 1.0, gas)).collect();
    let init = FieldSnapshot::new(grid, 0.0, 0, data).unwrap();
    let floors = Floors::relative(1e-10, 1.0, 1.0);
    let mut solver = Solver::new(&init, LatticeParams::default(), Boundaries::TUBE, None, floors, gas).unwrap();
    // the bump centre leaves at t = 0.15; check long after the tail is gone
    for t in [0.5, 0.6, 0.7] {
        assert_eq!(solver.advance_to(t), StepOutcome::Advanced);
        let s = solver.snapshot(0);
        let worst = (nx - 5..nx).map(|i| (s.at(i, 0).rho - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst <= 0.01 * amp, "t {t}: residual {worst}");
    }
}

/// L1 error of smooth periodic density advection after `t`.
fn advection_error(nx: usize, limiter: Limiter, t: f64) -> f64 {
    let gas = GasParams::new(1.4).unwrap();
    let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).unwrap();
    let rho = |x: f64| 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x).sin();
    let data = (0..grid.cells()).map(|k| conserved(rho(grid.x_center((k % nx) as isize)), 1.0, 0.0, 1.0, gas)).collect();
    let init = FieldSnapshot::new(grid, 0.0, 0, data).unwrap();
    let params = LatticeParams { limiter, ..Default::default() };
    let floors = Floors::relative(1e-10, 1.0, 1.0);
    let mut solver = Solver::new(&init, params, Boundaries::PERIODIC, None, floors, gas).unwrap();
    assert_eq!(solver.advance_to(t), StepOutcome::Advanced);
    let s = solver.snapshot(0);
    (0..nx).map(|i| (s.at(i, 0).rho - rho(grid.x_center(i as isize) - t)).abs()).sum::<f64>() / nx as f64
}

fn observed_order(limiter: Limiter) -> f64 {
    let ns = [64, 128, 256, 512];
    let errs: Vec<f64> = ns.iter().map(|&n| advection_error(n, limiter, 0.25)).collect();
    let dxs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    fit_rate(&errs[1..], &dxs[1..]).unwrap()
}

#[test]
fn first_order_limiter_is_first_order() {
    let r = observed_order(Limiter::FirstOrder);
    assert!((r - 1.0).abs() <= 0.15, "rate {r}");
}

#[test]
fn second_order_limiter_is_second_order() {
    let r = observed_order(Limiter::SecondOrder);
    assert!(r >= 1.7, "rate {r}");
}

#[test]
fn rlmp_keeps_theta_in_range_and_respects_floors_in_a_strong_expansion() {
    // two streams leaving each other at high Mach number
    let gas = GasParams::new(1.4).unwrap();
    let nx = 100;
    let grid = Grid::from_spacing(nx, 4, 1.0 / nx as f64).unwrap();
    let data = (0..grid.cells())
        .map(|k| {
            let v = if grid.x_center((k % nx) as isize) < 0.5 { -20.0 } else { 20.0 };
            conserved(1.0, v, 0.0, 0.4, gas)
        })
        .collect();
    let init = FieldSnapshot::new(grid, 0.0, 0, data).unwrap();
    let floors = Floors::relative(1e-10, 1.0, 0.4);
    let mut solver = Solver::new(&init, LatticeParams::default(), Boundaries::TUBE, None, floors, gas).unwrap();
    for _ in 0..200 {
        assert_eq!(solver.step(), StepOutcome::Advanced);
        assert!(solver.blending().in_unit_range());
        assert!(solver.field().interior().all(|u| floors.admits(u, gas)));
    }
}
