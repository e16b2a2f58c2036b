use serde::{Deserialize, Serialize};

use super::{SimState, SolverConfig, Stepper};
use crate::error::Result;
use crate::littlewood_paley::LpBank;
use crate::monitor::{sample_norms, EnergyLedger, EnergyRow, NormSample};

/// A step whose Courant number exceeded the limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CflWarning {
    pub step: usize,
    pub t: f64,
    pub courant: f64,
}

/// Non-finite values appeared at `t`; `last_sample` is the last finite one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    pub t: f64,
    pub step: usize,
    pub last_sample: NormSample,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub samples: Vec<NormSample>,
    /// `(step, state)` pairs.
    pub snapshots: Vec<(usize, SimState)>,
    pub energy: Vec<EnergyRow>,
    pub warnings: Vec<CflWarning>,
    pub blow_up: Option<BlowUp>,
    pub final_state: SimState,
}

/// Runs `config.steps()` steps from the configured initial condition.
///
/// A sample is taken at `t = 0`, every `sample_every` steps and at the final
/// step. Snapshots (when enabled) start with the initial state.
pub fn simulate(config: &SolverConfig) -> Result<Simulation> {
    config.validate()?;
    let state = config.initial_state()?;
    Ok(run_from(state, config))
}

pub(crate) fn run_from(mut state: SimState, config: &SolverConfig) -> Simulation {
    let grid = state.grid();
    let bank = LpBank::build(grid);
    let stepper = Stepper::new(grid, config.dt, state.nu, state.kappa);
    let steps = config.steps();
    let t_start = state.t;

    let mut samples = vec![sample_norms(&state, &bank, None)];
    let mut snapshots = Vec::new();
    if config.snapshot_every > 0 {
        snapshots.push((0, state.clone()));
    }
    let mut ledger = EnergyLedger::new(&state);
    let mut warnings = Vec::new();
    let mut blow_up = None;

    for n in 1..=steps {
        let outcome = stepper.step(&state);
        let t = t_start + n as f64 * config.dt;
        if outcome.cfl_warning() {
            warnings.push(CflWarning { step: n, t: state.t, courant: outcome.courant });
        }
        let mut next = outcome.state;
        next.t = t;
        if !next.is_finite() {
            let last_sample = *samples.last().expect("initial sample");
            blow_up = Some(BlowUp { t, step: n, last_sample });
            break;
        }
        ledger.record(&next);
        state = next;
        if n % config.sample_every == 0 || n == steps {
            let s = sample_norms(&state, &bank, samples.last());
            samples.push(s);
        }
        if config.snapshot_every > 0 && n % config.snapshot_every == 0 {
            snapshots.push((n, state.clone()));
        }
    }

    Simulation { samples, snapshots, energy: ledger.into_rows(), warnings, blow_up, final_state: state }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::IcKind;

    fn shear_config() -> SolverConfig {
        SolverConfig {
            n: 16,
            dt: 0.01,
            t_end: 0.5,
            ic_kind: IcKind::Shear,
            sample_every: 5,
            snapshot_every: 25,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_duration_gives_one_sample() {
        let config = SolverConfig { t_end: 0.0, ..shear_config() };
        let sim = simulate(&config).unwrap();
        assert_eq!(sim.samples.len(), 1);
        let bank = LpBank::build(crate::spectral::Grid::new(16).unwrap());
        assert_eq!(sim.samples[0], sample_norms(&config.initial_state().unwrap(), &bank, None));
    }

    #[test]
    fn shear_samples_follow_exact_decay() {
        let sim = simulate(&shear_config()).unwrap();
        assert_eq!(sim.samples.len(), 11);
        assert_eq!(sim.snapshots.len(), 3);
        let l0 = sim.samples[0].l2_u;
        for s in &sim.samples {
            assert!((s.l2_u - (-s.t).exp() * l0).abs() <= 1e-10 * l0);
        }
        assert!(sim.warnings.is_empty() && sim.blow_up.is_none());
        assert!((sim.samples.last().unwrap().t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let config = SolverConfig { dt: 0.0, ..shear_config() };
        assert!(simulate(&config).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let mut state = SolverConfig { n: 8, ..shear_config() }.initial_state().unwrap();
        state.u = state.u.scaled(f64::INFINITY);
        let config = SolverConfig { n: 8, ..shear_config() };
        let sim = run_from(state, &config);
        let b = sim.blow_up.expect("non-finite run");
        assert_eq!(b.step, 1);
        assert_eq!(sim.samples.len(), 1);
    }
}
