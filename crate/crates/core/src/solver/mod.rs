//! Integrating-factor Heun time stepping of the Boussinesq system on the
//! periodic box.
//!
//! Diffusion is applied through the exact multipliers `e^{-ν|k|²dt}` and
//! `e^{-κ|k|²dt}`; transport and buoyancy are explicit. The pressure never
//! appears: the momentum right-hand side is Leray-projected.

mod initial;
mod kernel;
mod simulate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{gradient, leray_project, Grid, PhysicalField, SpectralField};

use kernel::Kernel;

pub use initial::initial_condition;
pub use simulate::{simulate, BlowUp, CflWarning, Simulation};

/// Courant number above which a step is flagged.
pub const CFL_LIMIT: f64 = 0.5;

/// Velocity, temperature, time and transport coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub u: SpectralField,
    pub theta: SpectralField,
    pub t: f64,
    pub nu: f64,
    pub kappa: f64,
}

impl SimState {
    pub fn zero(grid: Grid) -> Self {
        SimState {
            u: SpectralField::zeros(grid, 3),
            theta: SpectralField::zeros(grid, 1),
            t: 0.0,
            nu: 1.0,
            kappa: 1.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.theta.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    TaylorGreen,
    Shear,
    BuoyantMode,
    RandomBand,
}

impl IcKind {
    pub const ALL: [IcKind; 4] = [IcKind::TaylorGreen, IcKind::Shear, IcKind::BuoyantMode, IcKind::RandomBand];

    pub fn name(&self) -> &'static str {
        match self {
            IcKind::TaylorGreen => "taylor_green",
            IcKind::Shear => "shear",
            IcKind::BuoyantMode => "buoyant_mode",
            IcKind::RandomBand => "random_band",
        }
    }
}

impl fmt::Display for IcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IcKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown initial condition '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub ic_kind: IcKind,
    pub ic_amplitude: f64,
    /// Temperature amplitude for the `taylor_green` and `random_band` starts.
    pub theta_amplitude: f64,
    pub rng_seed: u64,
    pub nu: f64,
    pub kappa: f64,
    pub sample_every: usize,
    /// Steps between snapshots; 0 disables them.
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 32,
            dt: 1e-3,
            t_end: 1.0,
            ic_kind: IcKind::TaylorGreen,
            ic_amplitude: 1.0,
            theta_amplitude: 0.0,
            rng_seed: 0,
            nu: 1.0,
            kappa: 1.0,
            sample_every: 10,
            snapshot_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if let Err(e) = Grid::new(self.n) {
            errors.push(format!("grid.n: {e}"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errors.push(format!("solver.dt: must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            errors.push(format!("solver.t_end: must be nonnegative, got {}", self.t_end));
        }
        if !(self.nu >= 0.0 && self.kappa >= 0.0) {
            errors.push("solver.nu / solver.kappa: must be nonnegative".to_string());
        }
        if self.sample_every == 0 {
            errors.push("monitor.sample_every: must be at least 1".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let grid = Grid::new(self.n)?;
        let mut state =
            initial_condition(self.ic_kind, self.ic_amplitude, self.theta_amplitude, self.rng_seed, grid);
        state.nu = self.nu;
        state.kappa = self.kappa;
        Ok(state)
    }
}

fn advect(u: &PhysicalField, f: &SpectralField) -> SpectralField {
    let len = u.grid.len();
    let grad = gradient(f).to_physical();
    let mut out = PhysicalField::zeros(u.grid, f.components());
    for c in 0..f.components() {
        let dst = out.component_mut(c);
        for j in 0..3 {
            let uj = u.component(j);
            let dfj = grad.component(3 * c + j);
            for idx in 0..len {
                dst[idx] += uj[idx] * dfj[idx];
            }
        }
    }
    SpectralField::from_physical(&out).dealiased()
}

/// `(u·∇) f`, evaluated pseudo-spectrally and dealiased by the 2/3 rule.
pub fn nonlinear_term(u: &SpectralField, f: &SpectralField) -> SpectralField {
    assert_eq!(u.components(), 3, "advecting velocity must have 3 components");
    advect(&u.to_physical(), f)
}

/// `P(θ e₃)`: the buoyancy force with its gradient part removed.
pub fn buoyancy_term(theta: &SpectralField) -> SpectralField {
    let grid = theta.grid();
    let zero = SpectralField::zeros(grid, 1);
    let forcing = SpectralField::stack(&[&zero, &zero, theta]).expect("same grid");
    leray_project(&forcing)
}

/// Result of one step: the new state and the Courant number of the old one.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: SimState,
    pub courant: f64,
}

impl StepOutcome {
    pub fn cfl_warning(&self) -> bool {
        self.courant > CFL_LIMIT
    }
}

/// Reusable stepper with the diffusion multipliers for a fixed `dt`.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid,
    dt: f64,
    decay_u: Vec<f64>,
    decay_theta: Vec<f64>,
    kernel: Kernel,
}

impl Stepper {
    pub fn new(grid: Grid, dt: f64, nu: f64, kappa: f64) -> Self {
        let k2: Vec<f64> = grid
            .wavevectors()
            .map(|(_, k)| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
            .collect();
        Stepper {
            grid,
            dt,
            decay_u: k2.iter().map(|k2| (-nu * k2 * dt).exp()).collect(),
            decay_theta: k2.iter().map(|k2| (-kappa * k2 * dt).exp()).collect(),
            kernel: Kernel::new(grid),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, state: &SimState) -> StepOutcome {
        assert_eq!(state.grid(), self.grid, "state and stepper grids differ");
        let dt = self.dt;
        let first = self.kernel.tendency(&state.u, &state.theta);

        let mut u_pred = state.u.clone();
        u_pred.axpy(dt, &first.u);
        let mut theta_pred = state.theta.clone();
        theta_pred.axpy(dt, &first.theta);
        u_pred.scale_by_table(&self.decay_u);
        theta_pred.scale_by_table(&self.decay_theta);

        let second = self.kernel.tendency(&u_pred, &theta_pred);

        let mut u = state.u.clone();
        u.axpy(0.5 * dt, &first.u);
        u.scale_by_table(&self.decay_u);
        u.axpy(0.5 * dt, &second.u);
        let mut theta = state.theta.clone();
        theta.axpy(0.5 * dt, &first.theta);
        theta.scale_by_table(&self.decay_theta);
        theta.axpy(0.5 * dt, &second.theta);

        self.kernel.project(&mut u);
        self.kernel.dealias(&mut u);
        self.kernel.dealias(&mut theta);
        let courant = first.max_speed * dt * self.grid.n() as f64 / self.grid.side();
        StepOutcome {
            state: SimState { u, theta, t: state.t + dt, nu: state.nu, kappa: state.kappa },
            courant,
        }
    }
}

/// Advances `state` by one step of size `dt`.
pub fn step(state: &SimState, dt: f64) -> StepOutcome {
    Stepper::new(state.grid(), dt, state.nu, state.kappa).step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{divergence_residual, forward_transform, inner_product, lebesgue_norm};

    fn sample(g: Grid, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> SpectralField {
        forward_transform(&PhysicalField::from_fn(g, components, f)).unwrap()
    }

    #[test]
    fn ic_kind_names_round_trip() {
        for kind in IcKind::ALL {
            assert_eq!(kind.name().parse::<IcKind>().unwrap(), kind);
        }
        assert!("vortex".parse::<IcKind>().is_err());
    }

    #[test]
    fn shear_is_a_steady_nonlinear_solution() {
        let g = Grid::new(16).unwrap();
        let amp = 2.0;
        let u = sample(g, 3, |c, x| if c == 1 { amp * x[0].sin() } else { 0.0 });
        let n = nonlinear_term(&u, &u);
        assert!(n.max_abs() <= 1e-13 * amp * amp);
        let c = SpectralField::constant(g, 1, 1.5);
        assert!(nonlinear_term(&u, &c).is_zero());
    }

    #[test]
    fn transport_is_skew() {
        let g = Grid::new(16).unwrap();
        let state = initial_condition(IcKind::RandomBand, 1.0, 1.0, 3, g);
        let adv = nonlinear_term(&state.u, &state.theta);
        let pairing = inner_product(&adv, &state.theta).unwrap();
        let scale = lebesgue_norm(&state.u, 2.0).unwrap() * lebesgue_norm(&state.theta, 2.0).unwrap().powi(2);
        assert!(pairing.abs() <= 1e-10 * scale, "{pairing} vs {scale}");
    }

    #[test]
    fn buoyancy_projection_cases() {
        let g = Grid::new(16).unwrap();
        let vertical = sample(g, 1, |_, x| x[2].sin());
        assert!(buoyancy_term(&vertical).max_abs() < 1e-16);
        let horizontal = sample(g, 1, |_, x| x[0].sin());
        let b = buoyancy_term(&horizontal);
        assert!(b.extract(2).sub(&horizontal).max_abs() < 1e-16);
        assert!(b.extract(0).is_zero() && b.extract(1).is_zero());
        assert!(buoyancy_term(&SpectralField::zeros(g, 1)).is_zero());
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::new(8).unwrap();
        let out = step(&SimState::zero(g), 1e-2);
        assert!(out.state.u.is_zero() && out.state.theta.is_zero());
        assert_eq!(out.state.t, 1e-2);
        assert_eq!(out.courant, 0.0);
    }

    #[test]
    fn shear_decays_exactly() {
        let g = Grid::new(16).unwrap();
        let mut state = initial_condition(IcKind::Shear, 1.0, 0.0, 0, g);
        let stepper = Stepper::new(g, 0.05, 1.0, 1.0);
        for _ in 0..20 {
            state = stepper.step(&state).state;
        }
        let exact = initial_condition(IcKind::Shear, 1.0, 0.0, 0, g).u.scaled((-1.0f64).exp());
        assert!(state.u.sub(&exact).max_abs() <= 1e-12 * exact.max_abs());
    }

    #[test]
    fn random_band_stays_divergence_free() {
        let g = Grid::new(16).unwrap();
        let mut state = initial_condition(IcKind::RandomBand, 2.0, 1.0, 11, g);
        let stepper = Stepper::new(g, 1e-2, 0.1, 0.1);
        for _ in 0..10 {
            let out = stepper.step(&state);
            state = out.state;
            assert!(divergence_residual(&state.u) <= 1e-10 * state.u.max_abs());
            assert!(state.theta.hermitian_defect() < 1e-14);
        }
    }

    #[test]
    fn courant_warning_flags_fast_flow() {
        let g = Grid::new(16).unwrap();
        let state = initial_condition(IcKind::Shear, 100.0, 0.0, 0, g);
        let out = step(&state, 0.01);
        // max|u| = 100 on the grid, so C = 100 · 0.01 · 16 / 2π
        assert!((out.courant - 16.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!(out.cfl_warning());
    }
}
