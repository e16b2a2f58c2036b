use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spectral::{leray_project, Grid, SpectralField};

/// Largest `|k_i|` any corpus field uses, so members are identical on every
/// grid with dealiasing cutoff at least this large.
pub const MAX_WAVENUMBER: i64 = 5;

type Mode = (usize, [i64; 3], Complex64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SingleMode,
    DyadicShell,
    GaussianBump,
    RandomBand,
    TaylorGreenSlice,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::SingleMode, Family::DyadicShell, Family::GaussianBump, Family::RandomBand, Family::TaylorGreenSlice];

    pub fn name(&self) -> &'static str {
        match self {
            Family::SingleMode => "single_mode",
            Family::DyadicShell => "dyadic_shell",
            Family::GaussianBump => "gaussian_bump",
            Family::RandomBand => "random_band",
            Family::TaylorGreenSlice => "taylor_green_slice",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown corpus family '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub grids: Vec<usize>,
    pub families: Vec<Family>,
    pub count: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { grids: vec![32], families: Family::ALL.to_vec(), count: 4, seed: 20260 }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        for &n in &self.grids {
            match Grid::new(n) {
                Err(e) => errors.push(format!("corpus.grids: {e}")),
                Ok(g) if g.dealias_cutoff() < 2 * MAX_WAVENUMBER => {
                    errors.push(format!("corpus.grids: N = {n} cannot resolve products of corpus fields (need N >= 32)"))
                }
                Ok(_) => {}
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Grid-independent members in (family, index) order.
    pub fn members(&self) -> Vec<MemberModes> {
        let mut out = Vec::new();
        for (fi, &family) in self.families.iter().enumerate() {
            for index in 0..self.count {
                let stream = (fi as u64) << 32 | index as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(stream);
                out.push(MemberModes::generate(family, index, &mut rng));
            }
        }
        out
    }

    /// SHA-256 over every member's mode list, identifying the corpus.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for m in self.members() {
            hasher.update(m.family.name().as_bytes());
            hasher.update((m.index as u64).to_le_bytes());
            for modes in [&m.g, &m.h, &m.f] {
                hasher.update((modes.len() as u64).to_le_bytes());
                for (c, k, a) in modes.iter() {
                    hasher.update((*c as u64).to_le_bytes());
                    for ki in k {
                        hasher.update(ki.to_le_bytes());
                    }
                    hasher.update(a.re.to_le_bytes());
                    hasher.update(a.im.to_le_bytes());
                }
            }
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One corpus member as mode lists: scalars `g`, `h` and a generic vector `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberModes {
    pub family: Family,
    pub index: usize,
    pub g: Vec<Mode>,
    pub h: Vec<Mode>,
    pub f: Vec<Mode>,
}

/// A member sampled on a grid; `u` is the Leray projection of `f`.
#[derive(Clone, Debug)]
pub struct CorpusMember {
    pub family: Family,
    pub index: usize,
    pub g: SpectralField,
    pub h: SpectralField,
    pub f: SpectralField,
    pub u: SpectralField,
}

impl MemberModes {
    fn generate(family: Family, index: usize, rng: &mut ChaCha8Rng) -> Self {
        let scalar = |rng: &mut ChaCha8Rng| family_modes(family, 0, rng);
        let g = scalar(rng);
        let h = scalar(rng);
        let f = (0..3).flat_map(|c| family_modes(family, c, rng)).collect();
        MemberModes { family, index, g, h, f }
    }

    pub fn on_grid(&self, grid: Grid) -> CorpusMember {
        let f = SpectralField::from_modes(grid, 3, &self.f);
        CorpusMember {
            family: self.family,
            index: self.index,
            g: SpectralField::from_modes(grid, 1, &self.g),
            h: SpectralField::from_modes(grid, 1, &self.h),
            u: leray_project(&f),
            f,
        }
    }
}

fn in_box(k: [i64; 3]) -> bool {
    k.iter().all(|v| v.abs() <= MAX_WAVENUMBER) && k != [0, 0, 0]
}

fn norm(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

fn random_phase(rng: &mut ChaCha8Rng, amplitude: f64) -> Complex64 {
    Complex64::from_polar(amplitude, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Representative of `{k, -k}`, so modes are not added twice.
fn upper(k: [i64; 3]) -> bool {
    k[2] > 0 || (k[2] == 0 && (k[1] > 0 || (k[1] == 0 && k[0] > 0)))
}

fn all_wavevectors() -> impl Iterator<Item = [i64; 3]> {
    let r = -MAX_WAVENUMBER..=MAX_WAVENUMBER;
    r.clone()
        .flat_map(move |a| r.clone().flat_map(move |b| (-MAX_WAVENUMBER..=MAX_WAVENUMBER).map(move |c| [a, b, c])))
        .filter(|&k| in_box(k) && upper(k))
}

/// Modified Bessel function `I_n(x)` by its power series.
fn bessel_i(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..60 {
        term *= half * half / (m as f64 * (m + n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn family_modes(family: Family, c: usize, rng: &mut ChaCha8Rng) -> Vec<Mode> {
    match family {
        Family::SingleMode => {
            let k = loop {
                let k = [rng.random_range(-3..=3), rng.random_range(-3..=3), rng.random_range(-3..=3)];
                if in_box(k) {
                    break k;
                }
            };
            let amp = rng.random_range(0.5..2.0);
            vec![(c, k, random_phase(rng, amp))]
        }
        Family::DyadicShell => {
            let j = rng.random_range(0..=2);
            let centre = f64::from(1 << j);
            let shell: Vec<_> = all_wavevectors().filter(|&k| (norm(k) / centre - 1.0).abs() <= 0.2).collect();
            (0..4)
                .map(|_| {
                    let k = shell[rng.random_range(0..shell.len())];
                    {
                        let amp = rng.random_range(0.2..1.0);
                        (c, k, random_phase(rng, amp))
                    }
                })
                .collect()
        }
        Family::GaussianBump => {
            // periodic bump Π exp(κ cos(x_i − x0_i)), truncated to the box
            let kappa = rng.random_range(1.0..3.0);
            let centre: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
            let norm0 = bessel_i(0, kappa).powi(3);
            all_wavevectors()
                .map(|k| {
                    let mag: f64 = k.iter().map(|&ki| bessel_i(ki.unsigned_abs() as u32, kappa)).product::<f64>() / norm0;
                    let phase = -(0..3).map(|i| k[i] as f64 * centre[i]).sum::<f64>();
                    (c, k, Complex64::from_polar(mag, phase))
                })
                .collect()
        }
        Family::RandomBand => all_wavevectors()
            .filter(|&k| (1.0..=4.0).contains(&norm(k)))
            .map(|k| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                (c, k, Complex64::new(re, im) / norm(k).powi(2))
            })
            .collect(),
        Family::TaylorGreenSlice => {
            let m = rng.random_range(1..=2);
            let amp = rng.random_range(0.5..2.0);
            let ph: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU));
            taylor_green_modes(c, m, amp, ph)
        }
    }
}

/// `A sin(m x₁ + a) cos(m x₂ + b) cos(m x₃ + d)` as four `±k` pairs, using
/// `sin A cos B cos C = ¼ Σ sin(A ± B ± C)` and `ŝin θ(k) = e^{iθ₀}/(2i)`.
fn taylor_green_modes(c: usize, m: i64, amp: f64, ph: [f64; 3]) -> Vec<Mode> {
    let mut out = Vec::new();
    for s2 in [1i64, -1] {
        for s3 in [1i64, -1] {
            let phase = ph[0] + s2 as f64 * ph[1] + s3 as f64 * ph[2];
            let coeff = Complex64::from_polar(amp / 8.0, phase) * Complex64::new(0.0, -1.0);
            out.push((c, [m, s2 * m, s3 * m], coeff));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, PhysicalField};

    #[test]
    fn bessel_values() {
        // I_0(1), I_1(1), I_2(2)
        assert!((bessel_i(0, 1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i(1, 1.0) - 0.565_159_103_992_485).abs() < 1e-15);
        assert!((bessel_i(2, 2.0) - 0.688_948_447_698_738_2).abs() < 1e-15);
    }

    #[test]
    fn members_are_seeded_and_grid_independent() {
        let spec = CorpusSpec { count: 2, ..CorpusSpec::default() };
        assert_eq!(spec.members(), spec.members());
        assert_eq!(spec.hash(), spec.hash());
        let other = CorpusSpec { seed: 1, ..spec.clone() };
        assert_ne!(spec.hash(), other.hash());
        for m in spec.members() {
            let a = m.on_grid(Grid::new(32).unwrap());
            let b = m.on_grid(Grid::new(64).unwrap());
            for k in all_wavevectors() {
                assert_eq!(a.g.coeff(0, k), b.g.coeff(0, k));
                assert_eq!(a.f.coeff(2, k), b.f.coeff(2, k));
            }
            assert_eq!(a.g.mean(0), 0.0);
        }
    }

    #[test]
    fn taylor_green_slice_matches_samples() {
        let g = Grid::new(16).unwrap();
        let (amp, ph) = (1.3, [0.4, 2.0, 5.1]);
        for m in [1, 2] {
            let x = PhysicalField::from_fn(g, 1, |_, x| {
                amp * (m as f64 * x[0] + ph[0]).sin() * (m as f64 * x[1] + ph[1]).cos() * (m as f64 * x[2] + ph[2]).cos()
            });
            let field = SpectralField::from_modes(g, 1, &taylor_green_modes(0, m, amp, ph));
            assert!(forward_transform(&x).unwrap().sub(&field).max_abs() < 1e-15);
        }
    }
}
