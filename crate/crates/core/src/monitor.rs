//! Along-trajectory diagnostics: norm samples, the criterion integrals and
//! their tails, the `H²` running maximum, the discrete energy balance and
//! Gronwall-type implied constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov0_sup, bmo_oscillation_norm, grad_besov_minus1, LpBank};
use crate::solver::SimState;
use crate::spectral::{derivative_l2, inner_product};

/// One row of the monitored series. Field order is the CSV column order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub l2_u: f64,
    pub l2_theta: f64,
    pub h1_u: f64,
    pub h1_theta: f64,
    pub h2_u: f64,
    pub h2_theta: f64,
    pub besov_grad_u: f64,
    pub besov0_u: f64,
    pub bmo_u: f64,
    pub criterion_cum: f64,
    pub criterion0_cum: f64,
}

impl NormSample {
    pub const COLUMNS: [&'static str; 12] = [
        "t",
        "l2_u",
        "l2_theta",
        "h1_u",
        "h1_theta",
        "h2_u",
        "h2_theta",
        "besov_grad_u",
        "besov0_u",
        "bmo_u",
        "criterion_cum",
        "criterion0_cum",
    ];

    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.l2_u,
            self.l2_theta,
            self.h1_u,
            self.h1_theta,
            self.h2_u,
            self.h2_theta,
            self.besov_grad_u,
            self.besov0_u,
            self.bmo_u,
            self.criterion_cum,
            self.criterion0_cum,
        ]
    }

    pub fn from_values(v: [f64; 12]) -> Self {
        NormSample {
            t: v[0],
            l2_u: v[1],
            l2_theta: v[2],
            h1_u: v[3],
            h1_theta: v[4],
            h2_u: v[5],
            h2_theta: v[6],
            besov_grad_u: v[7],
            besov0_u: v[8],
            bmo_u: v[9],
            criterion_cum: v[10],
            criterion0_cum: v[11],
        }
    }

    /// `‖u‖²_{H²} + ‖θ‖²_{H²}` with `‖f‖²_{H²} = ‖f‖² + 2‖∇f‖² + ‖Δf‖²`,
    /// i.e. `Σ (1+|k|²)² |f̂|²`.
    pub fn h2_energy(&self) -> f64 {
        let h2 = |l2: f64, h1: f64, h2: f64| l2 * l2 + 2.0 * h1 * h1 + h2 * h2;
        h2(self.l2_u, self.h1_u, self.h2_u) + h2(self.l2_theta, self.h1_theta, self.h2_theta)
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Norms of `state`, with the criterion integrals advanced from `prev` by
/// the trapezoid rule.
pub fn sample_norms(state: &SimState, bank: &LpBank, prev: Option<&NormSample>) -> NormSample {
    assert_eq!(state.grid(), bank.grid(), "state and bank grids differ");
    let u = &state.u;
    let theta = &state.theta;
    let mut s = NormSample {
        t: state.t,
        l2_u: derivative_l2(u, 0),
        l2_theta: derivative_l2(theta, 0),
        h1_u: derivative_l2(u, 1),
        h1_theta: derivative_l2(theta, 1),
        h2_u: derivative_l2(u, 2),
        h2_theta: derivative_l2(theta, 2),
        besov_grad_u: grad_besov_minus1(u, bank),
        besov0_u: besov0_sup(u, bank),
        bmo_u: bmo_oscillation_norm(u),
        criterion_cum: 0.0,
        criterion0_cum: 0.0,
    };
    if let Some(p) = prev {
        let h = s.t - p.t;
        s.criterion_cum = p.criterion_cum + 0.5 * h * (p.besov_grad_u.powi(2) + s.besov_grad_u.powi(2));
        s.criterion0_cum = p.criterion0_cum + 0.5 * h * (p.besov0_u.powi(2) + s.besov0_u.powi(2));
    }
    s
}

fn check_window(samples: &[NormSample], t0: f64) -> Result<()> {
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::InvalidArgument("empty sample series".into())),
    };
    if !(first..=last).contains(&t0) {
        return Err(Error::InvalidArgument(format!("T0 = {t0} outside sampled range [{first}, {last}]")));
    }
    Ok(())
}

/// Cumulative criterion integral at an arbitrary `t` inside the samples,
/// interpolating the integrand linearly within a sampling interval.
fn criterion_at(samples: &[NormSample], t: f64) -> f64 {
    let i = samples.partition_point(|s| s.t <= t).saturating_sub(1);
    let a = &samples[i];
    if a.t == t || i + 1 == samples.len() {
        return a.criterion_cum;
    }
    let b = &samples[i + 1];
    let w = (t - a.t) / (b.t - a.t);
    let ga = a.besov_grad_u.powi(2);
    let gt = ga + w * (b.besov_grad_u.powi(2) - ga);
    a.criterion_cum + 0.5 * (t - a.t) * (ga + gt)
}

/// `∫_{T0}^{T} ‖∇u‖²_{Ḃ⁻¹∞∞} dτ` with `T` the last sample time.
pub fn criterion_tail(samples: &[NormSample], t0: f64) -> Result<f64> {
    check_window(samples, t0)?;
    let total = samples.last().map_or(0.0, |s| s.criterion_cum);
    Ok((total - criterion_at(samples, t0)).max(0.0))
}

/// Running maximum of [`NormSample::h2_energy`] over samples in `[t0, t]`.
pub fn f_monitor(samples: &[NormSample], t0: f64, t: f64) -> Result<f64> {
    if t0 > t {
        return Err(Error::InvalidArgument(format!("window [{t0}, {t}] is reversed")));
    }
    samples
        .iter()
        .filter(|s| s.t >= t0 && s.t <= t)
        .map(NormSample::h2_energy)
        .reduce(f64::max)
        .ok_or_else(|| Error::InvalidArgument(format!("no samples in window [{t0}, {t}]")))
}

/// Energy, dissipation rate and buoyancy work rate of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
struct EnergyTerms {
    energy: f64,
    dissipation: f64,
    buoyancy: f64,
}

fn energy_terms(s: &SimState) -> EnergyTerms {
    let l2u = derivative_l2(&s.u, 0);
    let l2t = derivative_l2(&s.theta, 0);
    let h1u = derivative_l2(&s.u, 1);
    let h1t = derivative_l2(&s.theta, 1);
    EnergyTerms {
        energy: 0.5 * (l2u * l2u + l2t * l2t),
        dissipation: s.nu * h1u * h1u + s.kappa * h1t * h1t,
        buoyancy: inner_product(&s.theta, &s.u.extract(2)).expect("scalar pairing"),
    }
}

/// `|ΔE/dt + ν‖∇u‖² + κ‖∇θ‖² − ⟨θ, u₃⟩|` with `E = ½(‖u‖² + ‖θ‖²)`, the
/// rate terms averaged over the two endpoints.
pub fn energy_residual(prev: &SimState, next: &SimState) -> f64 {
    let dt = next.t - prev.t;
    let a = energy_terms(prev);
    let b = energy_terms(next);
    if dt == 0.0 {
        return 0.0;
    }
    ((b.energy - a.energy) / dt + 0.5 * (a.dissipation + b.dissipation) - 0.5 * (a.buoyancy + b.buoyancy)).abs()
}

/// One step of the energy bookkeeping.
///
/// `inequality_lhs = E(t) + ∫ (ν‖∇u‖² + κ‖∇θ‖²)` is compared against
/// `inequality_rhs = E(0)`; the exact balance has `inequality_lhs = inequality_rhs + buoyancy_work`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub residual: f64,
    pub energy: f64,
    pub dissipation_cum: f64,
    pub buoyancy_work: f64,
    pub inequality_lhs: f64,
    pub inequality_rhs: f64,
}

/// Accumulates [`EnergyRow`]s step by step.
#[derive(Clone, Debug)]
pub struct EnergyLedger {
    initial: f64,
    last: EnergyTerms,
    last_t: f64,
    dissipation_cum: f64,
    buoyancy_work: f64,
    rows: Vec<EnergyRow>,
}

impl EnergyLedger {
    pub fn new(initial: &SimState) -> Self {
        let terms = energy_terms(initial);
        EnergyLedger {
            initial: terms.energy,
            last: terms,
            last_t: initial.t,
            dissipation_cum: 0.0,
            buoyancy_work: 0.0,
            rows: Vec::new(),
        }
    }

    pub fn record(&mut self, next: &SimState) {
        let b = energy_terms(next);
        let a = self.last;
        let dt = next.t - self.last_t;
        self.dissipation_cum += 0.5 * dt * (a.dissipation + b.dissipation);
        self.buoyancy_work += 0.5 * dt * (a.buoyancy + b.buoyancy);
        let residual = if dt == 0.0 {
            0.0
        } else {
            ((b.energy - a.energy) / dt + 0.5 * (a.dissipation + b.dissipation) - 0.5 * (a.buoyancy + b.buoyancy)).abs()
        };
        self.rows.push(EnergyRow {
            t: next.t,
            residual,
            energy: b.energy,
            dissipation_cum: self.dissipation_cum,
            buoyancy_work: self.buoyancy_work,
            inequality_lhs: b.energy + self.dissipation_cum,
            inequality_rhs: self.initial,
        });
        self.last = b;
        self.last_t = next.t;
    }

    pub fn rows(&self) -> &[EnergyRow] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<EnergyRow> {
        self.rows
    }
}

/// Implied Gronwall constant at one sample; `None` where undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallEntry {
    pub t: f64,
    pub implied_c: Option<f64>,
}

/// Smallest `C(t) ≥ 0` with `y' ≤ C (1 + bmo_u²) y`, `y = h1_u² + h1_θ²`,
/// for samples at or after `t0`. `y'` is a central difference (one-sided at
/// the ends).
pub fn gronwall_report(samples: &[NormSample], t0: f64) -> Vec<GronwallEntry> {
    let y: Vec<f64> = samples.iter().map(|s| s.h1_u.powi(2) + s.h1_theta.powi(2)).collect();
    let n = samples.len();
    (0..n)
        .filter(|&i| samples[i].t >= t0)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let denom = (1.0 + samples[i].bmo_u.powi(2)) * y[i];
            let implied_c = if lo == hi || denom == 0.0 {
                None
            } else {
                let dy = (y[hi] - y[lo]) / (samples[hi].t - samples[lo].t);
                Some(dy.max(0.0) / denom)
            };
            GronwallEntry { t: samples[i].t, implied_c }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeValue {
    pub t: f64,
    pub value: f64,
}

/// Everything the monitor derives from one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub t0: f64,
    pub samples: Vec<NormSample>,
    /// `F(t) = max_{[t0, t]} (‖u‖²_{H²} + ‖θ‖²_{H²})`.
    pub f_series: Vec<TimeValue>,
    /// `G(T0)` evaluated at every sample time.
    pub tail_series: Vec<TimeValue>,
    pub energy: Vec<EnergyRow>,
    pub gronwall: Vec<GronwallEntry>,
    pub max_gronwall_c: Option<f64>,
}

impl MonitorReport {
    pub fn build(samples: Vec<NormSample>, energy: Vec<EnergyRow>, t0: f64) -> Result<Self> {
        check_window(&samples, t0)?;
        let mut f_series = Vec::new();
        let mut running = f64::NEG_INFINITY;
        for s in samples.iter().filter(|s| s.t >= t0) {
            running = running.max(s.h2_energy());
            f_series.push(TimeValue { t: s.t, value: running });
        }
        let tail_series = samples
            .iter()
            .map(|s| Ok(TimeValue { t: s.t, value: criterion_tail(&samples, s.t)? }))
            .collect::<Result<Vec<_>>>()?;
        let gronwall = gronwall_report(&samples, t0);
        let max_gronwall_c = gronwall.iter().filter_map(|g| g.implied_c).reduce(f64::max);
        Ok(MonitorReport { t0, samples, f_series, tail_series, energy, gronwall, max_gronwall_c })
    }

    pub fn criterion_tail(&self, t0: f64) -> Result<f64> {
        criterion_tail(&self.samples, t0)
    }

    pub fn f_monitor(&self, t0: f64, t: f64) -> Result<f64> {
        f_monitor(&self.samples, t0, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{initial_condition, IcKind, Stepper};
    use crate::spectral::Grid;

    fn sample_at(t: f64, g: f64) -> NormSample {
        NormSample { t, besov_grad_u: g, besov0_u: g, h1_u: g, ..Default::default() }
    }

    fn accumulate(raw: Vec<NormSample>) -> Vec<NormSample> {
        let mut out: Vec<NormSample> = Vec::new();
        for mut s in raw {
            if let Some(p) = out.last() {
                let h = s.t - p.t;
                s.criterion_cum = p.criterion_cum + 0.5 * h * (p.besov_grad_u.powi(2) + s.besov_grad_u.powi(2));
                s.criterion0_cum = p.criterion0_cum + 0.5 * h * (p.besov0_u.powi(2) + s.besov0_u.powi(2));
            }
            out.push(s);
        }
        out
    }

    #[test]
    fn zero_state_samples_to_zero() {
        let g = Grid::new(8).unwrap();
        let bank = LpBank::build(g);
        let s = sample_norms(&SimState::zero(g), &bank, None);
        assert_eq!(s, NormSample::default());
        assert_eq!(energy_residual(&SimState::zero(g), &SimState { t: 0.1, ..SimState::zero(g) }), 0.0);
    }

    #[test]
    fn constant_integrand_quadrature() {
        let samples = accumulate((0..=10).map(|i| sample_at(0.3 * i as f64, 1.5)).collect());
        let last = samples.last().unwrap();
        assert!((last.criterion_cum - last.t * 2.25).abs() < 1e-14);
        assert_eq!(criterion_tail(&samples, last.t).unwrap(), 0.0);
        assert_eq!(criterion_tail(&samples, 0.0).unwrap(), last.criterion_cum);
        assert!((criterion_tail(&samples, 1.0).unwrap() - 2.25 * (last.t - 1.0)).abs() < 1e-13);
        assert!(criterion_tail(&samples, -0.1).is_err());
        assert!(criterion_tail(&samples, 3.1).is_err());
        assert!(criterion_tail(&[], 0.0).is_err());
    }

    #[test]
    fn tail_is_nonincreasing() {
        let samples = accumulate((0..40).map(|i| sample_at(0.1 * i as f64, (i as f64 * 0.7).sin().abs())).collect());
        let mut prev = f64::INFINITY;
        for k in 0..=390 {
            let t0 = 0.01 * k as f64;
            let tail = criterion_tail(&samples, t0).unwrap();
            assert!(tail <= prev, "at {t0}");
            prev = tail;
        }
    }

    #[test]
    fn f_monitor_is_a_running_max() {
        let samples: Vec<_> =
            (0..20).map(|i| NormSample { t: i as f64, l2_u: (i as f64).cos().abs(), ..Default::default() }).collect();
        assert_eq!(f_monitor(&samples, 3.0, 3.0).unwrap(), samples[3].h2_energy());
        let mut prev = 0.0;
        for t in 2..20 {
            let v = f_monitor(&samples, 2.0, t as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(f_monitor(&samples, 2.5, 2.7).is_err());
        assert!(f_monitor(&samples, 5.0, 2.0).is_err());
        let report = MonitorReport::build(samples, Vec::new(), 0.0).unwrap();
        assert!(report.f_series.windows(2).all(|w| w[1].value >= w[0].value));
    }

    #[test]
    fn zero_trajectory_gronwall_is_undefined() {
        let samples: Vec<_> = (0..5).map(|i| NormSample { t: i as f64, ..Default::default() }).collect();
        assert!(gronwall_report(&samples, 0.0).iter().all(|e| e.implied_c.is_none()));
        assert!(gronwall_report(&samples[..1], 0.0)[0].implied_c.is_none());
    }

    #[test]
    fn shear_trajectory_monitor() {
        let g = Grid::new(16).unwrap();
        let bank = LpBank::build(g);
        let h = 0.002f64;
        let stepper = Stepper::new(g, h, 1.0, 1.0);
        let mut state = initial_condition(IcKind::Shear, 1.0, 0.0, 0, g);
        let first = sample_norms(&state, &bank, None);
        let mut samples = vec![first];
        let mut ledger = EnergyLedger::new(&state);
        for _ in 0..500 {
            let next = stepper.step(&state).state;
            // E' = −2E exactly; the endpoint average leaves E_n·|(e^{−2h}−1)/h + 1 + e^{−2h}|
            let e = 0.5 * derivative_l2(&state.u, 0).powi(2);
            let expected = e * (((-2.0 * h).exp() - 1.0) / h + 1.0 + (-2.0 * h).exp()).abs();
            assert!((energy_residual(&state, &next) - expected).abs() <= 1e-9 * e);
            ledger.record(&next);
            state = next;
            samples.push(sample_norms(&state, &bank, samples.last()));
        }
        for s in &samples {
            let decay = (-s.t).exp();
            assert!((s.besov_grad_u - decay * first.besov_grad_u).abs() < 1e-12 * first.besov_grad_u);
            assert!((s.l2_u - decay * first.l2_u).abs() < 1e-10 * first.l2_u);
        }
        // ∫_{T0}^{1} c² e^{−2τ} dτ
        let c2 = first.besov_grad_u.powi(2);
        for t0 in [0.0f64, 0.25, 0.5] {
            let exact = 0.5 * c2 * ((-2.0 * t0).exp() - (-2.0f64).exp());
            assert!((criterion_tail(&samples, t0).unwrap() - exact).abs() < 1e-6);
        }
        let report = MonitorReport::build(samples, ledger.into_rows(), 0.25).unwrap();
        assert!(report.f_series.iter().all(|v| v.value == report.f_series[0].value));
        assert!(report.gronwall.iter().all(|e| e.implied_c == Some(0.0)));
        for row in &report.energy {
            assert_eq!(row.buoyancy_work, 0.0);
            // trapezoid dissipation overshoots the convex exact integral by O(h²·t)
            assert!(row.inequality_lhs <= row.inequality_rhs * (1.0 + h * h * row.t));
        }
    }
}
