use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use super::{IcKind, SimState};
use crate::spectral::{derivative_l2, forward_transform, leray_project, Grid, PhysicalField, SpectralField};

const BAND_LOW: f64 = 1.0;
const BAND_HIGH: f64 = 4.0;

/// Wavevectors with `1 ≤ |k| ≤ 4` from one half space, so each `±k` pair
/// appears once.
fn band_half_space() -> Vec<[i64; 3]> {
    let top = BAND_HIGH as i64;
    let mut out = Vec::new();
    for k1 in -top..=top {
        for k2 in -top..=top {
            for k3 in -top..=top {
                let upper = k3 > 0 || (k3 == 0 && (k2 > 0 || (k2 == 0 && k1 > 0)));
                let r = ((k1 * k1 + k2 * k2 + k3 * k3) as f64).sqrt();
                if upper && (BAND_LOW..=BAND_HIGH).contains(&r) {
                    out.push([k1, k2, k3]);
                }
            }
        }
    }
    out
}

fn gaussian_band(grid: Grid, components: usize, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut modes = Vec::new();
    for k in band_half_space() {
        for c in 0..components {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            modes.push((c, k, Complex64::new(re, im)));
        }
    }
    SpectralField::from_modes(grid, components, &modes).dealiased()
}

/// Rescales so the root-mean-square magnitude over the box equals `rms`.
fn with_rms(f: SpectralField, rms: f64) -> SpectralField {
    let current = derivative_l2(&f, 0) / f.grid().volume().sqrt();
    if current == 0.0 {
        f
    } else {
        f.scaled(rms / current)
    }
}

/// Initial state for `kind` with unit coefficients.
///
/// * `taylor_green`: `u = A(sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0)`,
///   `θ = A_θ sin x₁ sin x₂ sin x₃`
/// * `shear`: `u = A(0, sin x₁, 0)`, `θ = 0`
/// * `buoyant_mode`: `u = 0`, `θ = A sin x₁`
/// * `random_band`: Gaussian modes on `1 ≤ |k| ≤ 4`, projected, with rms
///   velocity `A` and rms temperature `A_θ`
pub fn initial_condition(kind: IcKind, amplitude: f64, theta_amplitude: f64, seed: u64, grid: Grid) -> SimState {
    let sample = |components: usize, f: &dyn Fn(usize, [f64; 3]) -> f64| {
        forward_transform(&PhysicalField::from_fn(grid, components, f)).expect("sampled on its own grid")
    };
    let (u, theta) = match kind {
        IcKind::TaylorGreen => (
            sample(3, &|c, x| match c {
                0 => amplitude * x[0].sin() * x[1].cos() * x[2].cos(),
                1 => -amplitude * x[0].cos() * x[1].sin() * x[2].cos(),
                _ => 0.0,
            }),
            sample(1, &|_, x| theta_amplitude * x[0].sin() * x[1].sin() * x[2].sin()),
        ),
        IcKind::Shear => (
            sample(3, &|c, x| if c == 1 { amplitude * x[0].sin() } else { 0.0 }),
            SpectralField::zeros(grid, 1),
        ),
        IcKind::BuoyantMode => (SpectralField::zeros(grid, 3), sample(1, &|_, x| amplitude * x[0].sin())),
        IcKind::RandomBand => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = with_rms(leray_project(&gaussian_band(grid, 3, &mut rng)), amplitude);
            let theta = with_rms(gaussian_band(grid, 1, &mut rng), theta_amplitude);
            (u, theta)
        }
    };
    SimState {
        u: leray_project(&u).dealiased(),
        theta: theta.without_mean().dealiased(),
        t: 0.0,
        nu: 1.0,
        kappa: 1.0,
    }
}
