//! Right-hand side evaluation for the stepper.
//!
//! Momentum transport is taken in rotational form, `ω × u`; the remaining
//! gradient `∇|u|²/2` is removed by the projection, so for dealiased input
//! this matches `P((u·∇)u)` to rounding. Real fields of the same equation
//! share one complex FFT two at a time.

use rustfft::num_complex::Complex64;

use crate::spectral::fft::{fft3, Direction};
use crate::spectral::{Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(super) struct Tendency {
    pub u: SpectralField,
    pub theta: SpectralField,
    pub max_speed: f64,
}

#[derive(Clone, Debug)]
pub(super) struct Kernel {
    grid: Grid,
    k: Vec<f64>,
    keep: Vec<bool>,
    /// `conj` partner index of every mode.
    partner: Vec<usize>,
}

impl Kernel {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n();
        let cutoff = grid.dealias_cutoff();
        let k: Vec<f64> = (0..n).map(|i| grid.wavenumber(i) as f64).collect();
        let keep = (0..n).map(|i| grid.wavenumber(i).abs() <= cutoff).collect();
        let partner = (0..grid.len()).map(|idx| grid.conjugate_index(idx)).collect();
        Kernel { grid, k, keep, partner }
    }

    fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 3], bool)) {
        let n = self.grid.n();
        let mut idx = 0;
        for i1 in 0..n {
            for i2 in 0..n {
                let keep12 = self.keep[i1] && self.keep[i2];
                for i3 in 0..n {
                    f(idx, [self.k[i1], self.k[i2], self.k[i3]], keep12 && self.keep[i3]);
                    idx += 1;
                }
            }
        }
    }

    /// Inverse transform of two Hermitian spectra at once.
    fn inverse_pair(&self, a: &[Complex64], b: Option<&[Complex64]>, work: &mut [Complex64]) -> (Vec<f64>, Vec<f64>) {
        match b {
            Some(b) => {
                for ((w, x), y) in work.iter_mut().zip(a).zip(b) {
                    *w = Complex64::new(x.re - y.im, x.im + y.re);
                }
            }
            None => work.copy_from_slice(a),
        }
        fft3(work, self.grid.n(), Direction::Inverse);
        (work.iter().map(|z| z.re).collect(), work.iter().map(|z| z.im).collect())
    }

    /// Dealiased forward transform of up to two real fields at once.
    fn forward_pair(&self, a: &[f64], b: Option<&[f64]>, work: &mut [Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        match b {
            Some(b) => {
                for ((w, &x), &y) in work.iter_mut().zip(a).zip(b) {
                    *w = Complex64::new(x, y);
                }
            }
            None => {
                for (w, &x) in work.iter_mut().zip(a) {
                    *w = Complex64::new(x, 0.0);
                }
            }
        }
        fft3(work, self.grid.n(), Direction::Forward);
        let half = 0.5 / self.grid.len() as f64;
        let mut fa = vec![ZERO; work.len()];
        let mut fb = vec![ZERO; if b.is_some() { work.len() } else { 0 }];
        self.for_each_mode(|idx, _, keep| {
            if keep {
                let z = work[idx];
                let zm = work[self.partner[idx]].conj();
                fa[idx] = (z + zm) * half;
                if let Some(slot) = fb.get_mut(idx) {
                    let d = (z - zm) * half;
                    *slot = Complex64::new(d.im, -d.re);
                }
            }
        });
        (fa, fb)
    }

    pub fn dealias(&self, f: &mut SpectralField) {
        let len = self.grid.len();
        let comps = f.components();
        let coeffs = f.coeffs_mut();
        self.for_each_mode(|idx, _, keep| {
            if !keep {
                for c in 0..comps {
                    coeffs[c * len + idx] = ZERO;
                }
            }
        });
    }

    pub fn project(&self, v: &mut SpectralField) {
        let len = self.grid.len();
        let coeffs = v.coeffs_mut();
        self.for_each_mode(|idx, k, _| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return;
            }
            let dot = coeffs[idx] * k[0] + coeffs[len + idx] * k[1] + coeffs[2 * len + idx] * k[2];
            let scale = dot / k2;
            for a in 0..3 {
                coeffs[a * len + idx] -= scale * k[a];
            }
        });
    }

    /// `P(-(u·∇)u + θe₃)`, `-(u·∇)θ` and `max|u|`.
    pub fn tendency(&self, u: &SpectralField, theta: &SpectralField) -> Tendency {
        let grid = self.grid;
        let len = grid.len();
        let uc = [u.component(0), u.component(1), u.component(2)];
        let th = theta.coeffs();

        let mut omega = vec![vec![ZERO; len]; 3];
        let mut grad = vec![vec![ZERO; len]; 3];
        self.for_each_mode(|idx, k, _| {
            let iu = |a: usize| Complex64::new(-uc[a][idx].im, uc[a][idx].re);
            let (iu0, iu1, iu2) = (iu(0), iu(1), iu(2));
            omega[0][idx] = iu2 * k[1] - iu1 * k[2];
            omega[1][idx] = iu0 * k[2] - iu2 * k[0];
            omega[2][idx] = iu1 * k[0] - iu0 * k[1];
            let it = Complex64::new(-th[idx].im, th[idx].re);
            for a in 0..3 {
                grad[a][idx] = it * k[a];
            }
        });

        let mut work = vec![ZERO; len];
        let (u0, u1) = self.inverse_pair(uc[0], Some(uc[1]), &mut work);
        let (u2, w0) = self.inverse_pair(uc[2], Some(&omega[0]), &mut work);
        let (w1, w2) = self.inverse_pair(&omega[1], Some(&omega[2]), &mut work);
        let (g0, g1) = self.inverse_pair(&grad[0], Some(&grad[1]), &mut work);
        let (g2, _) = self.inverse_pair(&grad[2], None, &mut work);

        let mut c0 = vec![0.0; len];
        let mut c1 = vec![0.0; len];
        let mut c2 = vec![0.0; len];
        let mut adv = vec![0.0; len];
        let mut max_speed2: f64 = 0.0;
        for i in 0..len {
            c0[i] = w1[i] * u2[i] - w2[i] * u1[i];
            c1[i] = w2[i] * u0[i] - w0[i] * u2[i];
            c2[i] = w0[i] * u1[i] - w1[i] * u0[i];
            adv[i] = u0[i] * g0[i] + u1[i] * g1[i] + u2[i] * g2[i];
            max_speed2 = max_speed2.max(u0[i] * u0[i] + u1[i] * u1[i] + u2[i] * u2[i]);
        }

        // θ is never paired with momentum: a zero temperature stays exactly zero.
        let (f0, f1) = self.forward_pair(&c0, Some(&c1), &mut work);
        let (f2, _) = self.forward_pair(&c2, None, &mut work);
        let (fa, _) = self.forward_pair(&adv, None, &mut work);

        let mut coeffs = Vec::with_capacity(3 * len);
        coeffs.extend(f0.iter().map(|z| -z));
        coeffs.extend(f1.iter().map(|z| -z));
        coeffs.extend(f2.iter().zip(th).map(|(z, t)| t - z));
        let mut momentum = SpectralField::from_coeffs(grid, 3, coeffs).expect("sized to the grid");
        self.project(&mut momentum);
        let theta = SpectralField::from_coeffs(grid, 1, fa.iter().map(|z| -z).collect()).expect("sized to the grid");

        Tendency { u: momentum, theta, max_speed: max_speed2.sqrt() }
    }
}
