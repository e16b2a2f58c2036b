//! Periodic-grid Fourier infrastructure on the box `[0, 2π)³`.
//!
//! A [`SpectralField`] holds the discrete Fourier coefficients
//! `û(k) = N⁻³ Σ_x u(x) e^{-ik·x}` of a real scalar or vector field. Coefficients
//! are stored in FFT order per component; wavevector components run over
//! `-N/2+1 ..= N/2` and the Nyquist plane `k_i = N/2` is held at zero.

pub(crate) mod fft;
mod ops;

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use fft::Direction;

pub use ops::{
    derivative, derivative_l2, divergence_residual, gradient, inner_product, laplacian,
    lebesgue_norm, leray_project, multi_indices, multinomial, pointwise_magnitude,
    product_dealiased, sobolev_norm, derivative_lebesgue_norm, derivative_tensor_magnitude, SobolevSpec,
};
pub(crate) use ops::{check_exponent, lp_of_magnitude};

/// Relative tolerance on the imaginary residue accepted by [`inverse_transform`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Uniform periodic grid with `n` points per axis on a box of side 2π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Grid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest retained `|k_i|` after dealiasing (2/3 rule).
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    pub fn side(&self) -> f64 {
        2.0 * PI
    }

    /// Box volume `(2π)³`.
    pub fn volume(&self) -> f64 {
        self.side().powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.side() / self.n as f64
    }

    /// Signed wavenumber stored at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index holding wavenumber `k` (taken modulo `n`).
    pub fn fft_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [
            self.wavenumber(idx / (n * n)),
            self.wavenumber((idx / n) % n),
            self.wavenumber(idx % n),
        ]
    }

    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n;
        (self.fft_index(k[0]) * n + self.fft_index(k[1])) * n + self.fft_index(k[2])
    }

    /// Index of `-k` for the mode stored at `idx`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let k = self.wavevector(idx);
        self.index_of([-k[0], -k[1], -k[2]])
    }

    pub fn is_nyquist(&self, k: [i64; 3]) -> bool {
        let half = (self.n / 2) as i64;
        k.iter().any(|&ki| ki == half)
    }

    pub fn is_dealiased(&self, k: [i64; 3]) -> bool {
        let cutoff = self.dealias_cutoff();
        k.iter().all(|ki| ki.abs() <= cutoff)
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.spacing();
        [
            (idx / (n * n)) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx % n) as f64 * h,
        ]
    }

    pub fn wavevectors(&self) -> impl Iterator<Item = (usize, [i64; 3])> + '_ {
        (0..self.len()).map(move |idx| (idx, self.wavevector(idx)))
    }
}

/// Real field sampled on the grid, stored as `(component, i1, i2, i3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub components: usize,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        PhysicalField { grid, components, values: vec![0.0; components * grid.len()] }
    }

    /// Samples `f(x)` for each component at every grid point.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let mut values = Vec::with_capacity(components * grid.len());
        for c in 0..components {
            values.extend((0..grid.len()).map(|idx| f(c, grid.point(idx))));
        }
        PhysicalField { grid, components, values }
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.values[c * len..(c + 1) * len]
    }
}

/// Fourier coefficients of a real field with one or more components.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        SpectralField {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); components * grid.len()],
        }
    }

    /// Wraps raw coefficients in FFT order. The Nyquist plane is cleared.
    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = components * grid.len();
        if coeffs.len() != expected {
            return Err(Error::GridMismatch { expected, actual: coeffs.len() });
        }
        let mut field = SpectralField { grid, components, coeffs };
        field.clear_nyquist();
        Ok(field)
    }

    /// Builds a real field from `(component, k, c)` triples, each contributing
    /// `c e^{ik·x} + conj(c) e^{-ik·x}`. Zero and Nyquist wavevectors are ignored.
    pub fn from_modes(grid: Grid, components: usize, modes: &[(usize, [i64; 3], Complex64)]) -> Self {
        let mut field = SpectralField::zeros(grid, components);
        for &(c, k, amp) in modes {
            assert!(c < components, "mode component {c} out of range");
            if k == [0, 0, 0] || grid.is_nyquist(k) || grid.is_nyquist([-k[0], -k[1], -k[2]]) {
                continue;
            }
            let len = grid.len();
            field.coeffs[c * len + grid.index_of(k)] += amp;
            field.coeffs[c * len + grid.index_of([-k[0], -k[1], -k[2]])] += amp.conj();
        }
        field
    }

    /// Constant field with the given value in every component.
    pub fn constant(grid: Grid, components: usize, value: f64) -> Self {
        let mut field = SpectralField::zeros(grid, components);
        for c in 0..components {
            field.coeffs[c * grid.len()] = Complex64::new(value, 0.0);
        }
        field
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub(crate) fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    pub fn coeff(&self, c: usize, k: [i64; 3]) -> Complex64 {
        self.coeffs[c * self.grid.len() + self.grid.index_of(k)]
    }

    /// Copies component `c` out as a scalar field.
    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField { grid: self.grid, components: 1, coeffs: self.component(c).to_vec() }
    }

    /// Concatenates the components of several fields on the same grid.
    pub fn stack(fields: &[&SpectralField]) -> Result<SpectralField> {
        let grid = fields
            .first()
            .ok_or_else(|| Error::ShapeMismatch("cannot stack zero fields".into()))?
            .grid;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for f in fields {
            if f.grid != grid {
                return Err(Error::ShapeMismatch("stacked fields live on different grids".into()));
            }
            coeffs.extend_from_slice(&f.coeffs);
            components += f.components;
        }
        Ok(SpectralField { grid, components, coeffs })
    }

    pub fn mean(&self, c: usize) -> f64 {
        self.component(c)[0].re
    }

    /// Copy with the zero mode of every component removed.
    pub fn without_mean(&self) -> SpectralField {
        let mut out = self.clone();
        let len = self.grid.len();
        for c in 0..self.components {
            out.coeffs[c * len] = Complex64::new(0.0, 0.0);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= factor);
        out
    }

    /// `self += factor * other`
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) {
        assert_eq!(self.shape(), other.shape(), "axpy on mismatched fields");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * factor;
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn shape(&self) -> (Grid, usize) {
        (self.grid, self.components)
    }

    /// Multiplies every mode of every component by a real factor `m(k)`.
    pub fn apply_multiplier(&self, m: impl Fn([i64; 3]) -> f64) -> SpectralField {
        let len = self.grid.len();
        let factors: Vec<f64> = (0..len).map(|idx| m(self.grid.wavevector(idx))).collect();
        self.apply_table(&factors)
    }

    /// Multiplies by a precomputed per-mode table of length `n³`.
    pub fn apply_table(&self, factors: &[f64]) -> SpectralField {
        let mut out = self.clone();
        out.scale_by_table(factors);
        out
    }

    /// In-place form of [`SpectralField::apply_table`].
    pub fn scale_by_table(&mut self, factors: &[f64]) {
        let len = self.grid.len();
        debug_assert_eq!(factors.len(), len);
        for chunk in self.coeffs.chunks_mut(len) {
            for (z, &m) in chunk.iter_mut().zip(factors) {
                *z *= m;
            }
        }
    }

    /// Zeroes every mode with some `|k_i|` above the 2/3-rule cutoff.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        let len = grid.len();
        for idx in 0..len {
            if !grid.is_dealiased(grid.wavevector(idx)) {
                for c in 0..self.components {
                    self.coeffs[c * len + idx] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn dealiased(mut self) -> SpectralField {
        self.dealias();
        self
    }

    fn clear_nyquist(&mut self) {
        let grid = self.grid;
        let len = grid.len();
        let n = grid.n;
        let half = n / 2;
        for idx in 0..len {
            if idx / (n * n) == half || (idx / n) % n == half || idx % n == half {
                for c in 0..self.components {
                    self.coeffs[c * len + idx] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|f̂(k) - conj f̂(-k)|` over all modes and components.
    pub fn hermitian_defect(&self) -> f64 {
        let len = self.grid.len();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = &self.coeffs[c * len..(c + 1) * len];
            for idx in 0..len {
                let partner = comp[self.grid.conjugate_index(idx)];
                worst = worst.max((comp[idx] - partner.conj()).norm());
            }
        }
        worst
    }

    /// Inverse transform without the Hermitian check; the imaginary part is dropped.
    pub(crate) fn to_physical(&self) -> PhysicalField {
        let (physical, _) = self.inverse_complex();
        physical
    }

    fn inverse_complex(&self) -> (PhysicalField, f64) {
        let len = self.grid.len();
        let n = self.grid.n;
        let mut values = Vec::with_capacity(self.components * len);
        let mut residue: f64 = 0.0;
        let mut work = vec![Complex64::new(0.0, 0.0); len];
        for c in 0..self.components {
            work.copy_from_slice(self.component(c));
            fft::fft3(&mut work, n, Direction::Inverse);
            for z in &work {
                residue = residue.max(z.im.abs());
                values.push(z.re);
            }
        }
        (PhysicalField { grid: self.grid, components: self.components, values }, residue)
    }

    pub(crate) fn from_physical(field: &PhysicalField) -> SpectralField {
        let grid = field.grid;
        let len = grid.len();
        let scale = 1.0 / len as f64;
        let mut coeffs = Vec::with_capacity(field.components * len);
        let mut work = vec![Complex64::new(0.0, 0.0); len];
        for c in 0..field.components {
            for (z, &v) in work.iter_mut().zip(field.component(c)) {
                *z = Complex64::new(v, 0.0);
            }
            fft::fft3(&mut work, grid.n, Direction::Forward);
            coeffs.extend(work.iter().map(|z| z * scale));
        }
        let mut out = SpectralField { grid, components: field.components, coeffs };
        out.clear_nyquist();
        out
    }
}

/// Discrete Fourier coefficients of grid samples, Nyquist plane cleared.
pub fn forward_transform(samples: &PhysicalField) -> Result<SpectralField> {
    let expected = samples.components * samples.grid.len();
    if samples.values.len() != expected {
        return Err(Error::GridMismatch { expected, actual: samples.values.len() });
    }
    Ok(SpectralField::from_physical(samples))
}

/// Real samples of a Hermitian-symmetric field.
///
/// Fails if the imaginary residue of the inverse transform exceeds
/// [`HERMITIAN_TOLERANCE`] relative to the largest sample magnitude.
pub fn inverse_transform(field: &SpectralField) -> Result<PhysicalField> {
    let (physical, residue) = field.inverse_complex();
    let scale = physical.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(residue);
    let tolerance = HERMITIAN_TOLERANCE * scale;
    if residue > tolerance {
        return Err(Error::HermitianViolation { residue, tolerance });
    }
    Ok(physical)
}

/// Sequential left-to-right sum; every norm reduction goes through here so
/// results are independent of thread count.
pub(crate) fn ordered_sum(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc + v)
}
