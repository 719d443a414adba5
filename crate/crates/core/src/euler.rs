//! Ideal-gas compressible Euler relations in two space dimensions.
//!
//! Everything here is a pure function of a single gas state. Pressure is
//! returned unclamped so that callers further up (the limiter, the
//! admissibility filter) can observe breakdown instead of having it hidden.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heat-capacity ratio of the ideal gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasParams {
    pub gamma: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        Self::monatomic()
    }
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    /// Monatomic gas, gamma = 5/3.
    pub fn monatomic() -> Self {
        Self { gamma: 5.0 / 3.0 }
    }
}

/// Conserved variables `(rho, rho*v1, rho*v2, E)`.
///
/// Physical admissibility is not enforced structurally: diverged states have
/// to be representable so they can be detected and filtered.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
}

impl ConservedState {
    pub const ZERO: Self = Self { rho: 0.0, mom_x: 0.0, mom_y: 0.0, energy: 0.0 };

    #[inline]
    pub const fn new(rho: f64, mom_x: f64, mom_y: f64, energy: f64) -> Self {
        Self { rho, mom_x, mom_y, energy }
    }

    #[inline]
    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mom_x, self.mom_y, self.energy]
    }

    /// Component by index in storage order (rho, mom_x, mom_y, energy).
    #[inline]
    pub fn component(&self, index: usize) -> f64 {
        match index {
            0 => self.rho,
            1 => self.mom_x,
            2 => self.mom_y,
            3 => self.energy,
            _ => panic!("conserved component index {index} out of range"),
        }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.mom_x.is_finite() && self.mom_y.is_finite() && self.energy.is_finite()
    }

    /// Mirror image across a wall normal to y.
    #[inline]
    pub fn reflect_y(self) -> Self {
        Self { mom_y: -self.mom_y, ..self }
    }

    /// Mirror image across a wall normal to x.
    #[inline]
    pub fn reflect_x(self) -> Self {
        Self { mom_x: -self.mom_x, ..self }
    }

    #[inline]
    pub fn abs_sum(&self) -> f64 {
        self.rho.abs() + self.mom_x.abs() + self.mom_y.abs() + self.energy.abs()
    }
}

impl Add for ConservedState {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.rho + o.rho, self.mom_x + o.mom_x, self.mom_y + o.mom_y, self.energy + o.energy)
    }
}

impl Sub for ConservedState {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.rho - o.rho, self.mom_x - o.mom_x, self.mom_y - o.mom_y, self.energy - o.energy)
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.rho * s, self.mom_x * s, self.mom_y * s, self.energy * s)
    }
}

impl Neg for ConservedState {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl AddAssign for ConservedState {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for ConservedState {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Primitive variables: density, velocity, pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v1: f64,
    pub v2: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, v1: f64, v2: f64, p: f64) -> Self {
        Self { rho, v1, v2, p }
    }

    pub fn to_conserved(self, gas: GasParams) -> ConservedState {
        let kinetic = 0.5 * self.rho * (self.v1 * self.v1 + self.v2 * self.v2);
        ConservedState::new(self.rho, self.rho * self.v1, self.rho * self.v2, self.p / (gas.gamma - 1.0) + kinetic)
    }
}

/// Conserved to primitive conversion. Requires `u.rho > 0`.
#[inline]
pub fn to_primitive(u: ConservedState, gas: GasParams) -> PrimitiveState {
    let v1 = u.mom_x / u.rho;
    let v2 = u.mom_y / u.rho;
    PrimitiveState { rho: u.rho, v1, v2, p: pressure(u, gas) }
}

/// Ideal-gas pressure `(gamma-1)(E - rho|v|^2/2)`, not clamped.
#[inline]
pub fn pressure(u: ConservedState, gas: GasParams) -> f64 {
    let kinetic = 0.5 * (u.mom_x * u.mom_x + u.mom_y * u.mom_y) / u.rho;
    (gas.gamma - 1.0) * (u.energy - kinetic)
}

#[inline]
pub fn flux_x(u: ConservedState, gas: GasParams) -> ConservedState {
    let p = pressure(u, gas);
    let v1 = u.mom_x / u.rho;
    ConservedState::new(u.mom_x, u.mom_x * v1 + p, u.mom_y * v1, (u.energy + p) * v1)
}

#[inline]
pub fn flux_y(u: ConservedState, gas: GasParams) -> ConservedState {
    let p = pressure(u, gas);
    let v2 = u.mom_y / u.rho;
    ConservedState::new(u.mom_y, u.mom_x * v2, u.mom_y * v2 + p, (u.energy + p) * v2)
}

/// Both physical fluxes at once, sharing the pressure evaluation.
#[inline]
pub fn fluxes(u: ConservedState, gas: GasParams) -> (ConservedState, ConservedState) {
    let p = pressure(u, gas);
    let v1 = u.mom_x / u.rho;
    let v2 = u.mom_y / u.rho;
    let f = ConservedState::new(u.mom_x, u.mom_x * v1 + p, u.mom_y * v1, (u.energy + p) * v1);
    let g = ConservedState::new(u.mom_y, u.mom_x * v2, u.mom_y * v2 + p, (u.energy + p) * v2);
    (f, g)
}

#[inline]
pub fn sound_speed(u: ConservedState, gas: GasParams) -> f64 {
    (gas.gamma * pressure(u, gas) / u.rho).sqrt()
}

/// How the spectral radius of the two flux Jacobians is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSpeedBound {
    /// `max(|v1|, |v2|) + c`
    #[default]
    Componentwise,
    /// `|v| + c`, never smaller than the componentwise bound.
    Magnitude,
}

/// Upper bound on the spectral radii of both directional flux Jacobians.
pub fn max_wave_speed(u: ConservedState, gas: GasParams) -> Result<f64> {
    max_wave_speed_with(u, gas, WaveSpeedBound::Componentwise)
}

pub fn max_wave_speed_with(u: ConservedState, gas: GasParams, bound: WaveSpeedBound) -> Result<f64> {
    if !(u.rho > 0.0) {
        return Err(Error::NonPhysicalState(format!("density {} is not positive", u.rho)));
    }
    let p = pressure(u, gas);
    if !(p > 0.0) {
        return Err(Error::NonPhysicalState(format!("pressure {p} is not positive")));
    }
    let c = (gas.gamma * p / u.rho).sqrt();
    let v1 = (u.mom_x / u.rho).abs();
    let v2 = (u.mom_y / u.rho).abs();
    let v = match bound {
        WaveSpeedBound::Componentwise => v1.max(v2),
        WaveSpeedBound::Magnitude => v1.hypot(v2),
    };
    Ok(v + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const AMBIENT_P: f64 = 0.4127;

    fn jet_core() -> ConservedState {
        ConservedState::new(5.0, 4000.0, 0.0, AMBIENT_P / (2.0 / 3.0) + 0.5 * 5.0 * 800.0 * 800.0)
    }

    #[test]
    fn ambient_pressure() {
        let g = GasParams::monatomic();
        let u = ConservedState::new(0.5, 0.0, 0.0, AMBIENT_P / (g.gamma - 1.0));
        assert_relative_eq!(u.energy, 0.619050, epsilon = 1e-6);
        assert_relative_eq!(pressure(u, g), AMBIENT_P, max_relative = 1e-14);
    }

    #[test]
    fn quiescent_pressure_is_scaled_energy() {
        let g = GasParams::new(1.4).unwrap();
        let u = ConservedState::new(2.0, 0.0, 0.0, 3.0);
        assert_relative_eq!(pressure(u, g), 1.2, max_relative = 1e-15);
    }

    #[test]
    fn jet_core_pressure() {
        // 1.6e6 of kinetic energy on top of 0.62 thermal: cancellation costs ~7 digits
        assert_relative_eq!(pressure(jet_core(), GasParams::monatomic()), AMBIENT_P, max_relative = 1e-9);
    }

    #[test]
    fn hand_evaluated_fluxes() {
        let g = GasParams::new(1.4).unwrap();
        let f = flux_x(ConservedState::new(1.0, 1.0, 0.0, 2.5), g);
        assert_relative_eq!(f.rho, 1.0);
        assert_relative_eq!(f.mom_x, 1.8, max_relative = 1e-15);
        assert_eq!(f.mom_y, 0.0);
        assert_relative_eq!(f.energy, 3.3, max_relative = 1e-15);

        let gy = flux_y(ConservedState::new(1.0, 0.0, 1.0, 2.5), g);
        assert_relative_eq!(gy.mom_y, 1.8, max_relative = 1e-15);
        assert_relative_eq!(gy.energy, 3.3, max_relative = 1e-15);
        assert_eq!(gy.mom_x, 0.0);
    }

    #[test]
    fn quiescent_fluxes_carry_only_pressure() {
        let g = GasParams::monatomic();
        let u = ConservedState::new(0.7, 0.0, 0.0, 1.1);
        let p = pressure(u, g);
        assert_eq!(flux_x(u, g), ConservedState::new(0.0, p, 0.0, 0.0));
        assert_eq!(flux_y(u, g), ConservedState::new(0.0, 0.0, p, 0.0));
    }

    #[test]
    fn wave_speeds() {
        let g = GasParams::monatomic();
        let amb = ConservedState::new(0.5, 0.0, 0.0, AMBIENT_P / (g.gamma - 1.0));
        let c = max_wave_speed(amb, g).unwrap();
        assert_relative_eq!(c, 1.1729, epsilon = 1e-4);
        assert_eq!(c, sound_speed(amb, g));
        assert_relative_eq!(max_wave_speed(jet_core(), g).unwrap(), 800.37, epsilon = 5e-3);
    }

    #[test]
    fn wave_speed_rejects_nonphysical() {
        let g = GasParams::monatomic();
        assert!(max_wave_speed(ConservedState::new(1.0, 10.0, 0.0, 1.0), g).is_err());
        assert!(max_wave_speed(ConservedState::new(-1.0, 0.0, 0.0, 1.0), g).is_err());
    }

    #[test]
    fn magnitude_bound_dominates() {
        let g = GasParams::monatomic();
        let u = PrimitiveState::new(1.0, 3.0, 4.0, 1.0).to_conserved(g);
        let comp = max_wave_speed_with(u, g, WaveSpeedBound::Componentwise).unwrap();
        let mag = max_wave_speed_with(u, g, WaveSpeedBound::Magnitude).unwrap();
        assert!(mag > comp);
        assert_relative_eq!(mag - comp, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gamma_validation() {
        assert!(GasParams::new(1.0).is_err());
        assert!(GasParams::new(f64::NAN).is_err());
        assert!(GasParams::new(1.4).is_ok());
    }

    fn admissible() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (0.01f64..10.0, -50.0f64..50.0, -50.0f64..50.0, 0.01f64..100.0, 1.05f64..3.0)
    }

    proptest! {
        #[test]
        fn primitive_round_trip((rho, v1, v2, p, gamma) in admissible()) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            let back = to_primitive(u, g).to_conserved(g);
            for k in 0..4 {
                let (a, b) = (u.component(k), back.component(k));
                prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
            }
        }

        #[test]
        fn flux_mass_rows_are_momenta((rho, v1, v2, p, gamma) in admissible()) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            prop_assert_eq!(flux_x(u, g).rho, u.mom_x);
            prop_assert_eq!(flux_y(u, g).rho, u.mom_y);
            let (f, gg) = fluxes(u, g);
            prop_assert_eq!(f, flux_x(u, g));
            prop_assert_eq!(gg, flux_y(u, g));
        }

        #[test]
        fn pressure_rotation_invariant((rho, v1, v2, p, gamma) in admissible(), angle in 0.0f64..6.3) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            let (s, c) = angle.sin_cos();
            let rotated = ConservedState::new(u.rho, c * u.mom_x - s * u.mom_y, s * u.mom_x + c * u.mom_y, u.energy);
            let (p0, p1) = (pressure(u, g), pressure(rotated, g));
            // relative to the energy scale the subtraction operates on
            prop_assert!((p0 - p1).abs() <= 1e-13 * u.energy.abs() * (g.gamma - 1.0));
        }

        #[test]
        fn wave_speed_bounds_velocities((rho, v1, v2, p, gamma) in admissible()) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            let s = max_wave_speed(u, g).unwrap();
            prop_assert!(s >= v1.abs() && s >= v2.abs());
        }

        #[test]
        fn flux_x_parity_in_v1((rho, v1, v2, p, gamma) in admissible()) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            let f = flux_x(u, g);
            let fm = flux_x(u.reflect_x(), g);
            prop_assert_eq!(fm.rho, -f.rho);
            prop_assert_eq!(fm.mom_x, f.mom_x);
            prop_assert_eq!(fm.mom_y, -f.mom_y);
            prop_assert_eq!(fm.energy, -f.energy);
        }

        #[test]
        fn flux_y_is_coordinate_swap_of_flux_x((rho, v1, v2, p, gamma) in admissible()) {
            let g = GasParams::new(gamma).unwrap();
            let u = PrimitiveState::new(rho, v1, v2, p).to_conserved(g);
            let swapped = ConservedState::new(u.rho, u.mom_y, u.mom_x, u.energy);
            let f = flux_x(swapped, g);
            let gy = flux_y(u, g);
            prop_assert_eq!(gy.rho, f.rho);
            prop_assert_eq!(gy.mom_x, f.mom_y);
            prop_assert_eq!(gy.mom_y, f.mom_x);
            prop_assert_eq!(gy.energy, f.energy);
        }
    }
}
