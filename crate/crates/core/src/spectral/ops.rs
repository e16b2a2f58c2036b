//! Fourier multipliers, projection and classical norms.

use rustfft::num_complex::Complex64;

use super::{ordered_sum, Grid, PhysicalField, SpectralField};
use crate::error::{Error, Result};

/// Order of an inhomogeneous Sobolev norm `H^s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevSpec {
    pub s: f64,
}

/// `∂^α f`: each mode multiplied by `Π (i k_i)^{α_i}`.
pub fn derivative(f: &SpectralField, alpha: [u32; 3]) -> SpectralField {
    let order: u32 = alpha.iter().sum();
    let i_pow = match order % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let grid = f.grid();
    let len = grid.len();
    let factors: Vec<f64> = (0..len)
        .map(|idx| {
            let k = grid.wavevector(idx);
            (0..3).map(|a| (k[a] as f64).powi(alpha[a] as i32)).product()
        })
        .collect();
    let mut out = f.clone();
    for c in 0..f.components() {
        for (z, &m) in out.component_mut(c).iter_mut().zip(&factors) {
            *z = *z * i_pow * m;
        }
    }
    out
}

/// Gradient of every component; component `3c + a` holds `∂_a f_c`.
pub fn gradient(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let mut out = SpectralField::zeros(grid, 3 * f.components());
    for c in 0..f.components() {
        let fc = f.extract(c);
        for (a, alpha) in [[1, 0, 0], [0, 1, 0], [0, 0, 1]].into_iter().enumerate() {
            out.component_mut(3 * c + a).copy_from_slice(derivative(&fc, alpha).coeffs());
        }
    }
    out
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|k| -((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64))
}

/// Leray projection onto divergence-free fields: `v̂ - k (k·v̂)/|k|²` for `k ≠ 0`.
///
/// Panics if `v` does not have three components.
pub fn leray_project(v: &SpectralField) -> SpectralField {
    assert_eq!(v.components(), 3, "leray_project needs a 3-component field");
    let grid = v.grid();
    let len = grid.len();
    let mut out = v.clone();
    let coeffs = out.coeffs_mut();
    for idx in 1..len {
        let k = grid.wavevector(idx);
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
        let dot = (0..3).fold(Complex64::new(0.0, 0.0), |acc, a| acc + coeffs[a * len + idx] * kf[a]);
        let scale = dot / k2;
        for a in 0..3 {
            coeffs[a * len + idx] -= scale * kf[a];
        }
    }
    out
}

/// `max_k |k·v̂(k)|` for a 3-component field.
pub fn divergence_residual(v: &SpectralField) -> f64 {
    assert_eq!(v.components(), 3, "divergence of a non-vector field");
    let grid = v.grid();
    let len = grid.len();
    let coeffs = v.coeffs();
    (0..len)
        .map(|idx| {
            let k = grid.wavevector(idx);
            (0..3)
                .fold(Complex64::new(0.0, 0.0), |acc, a| acc + coeffs[a * len + idx] * k[a] as f64)
                .norm()
        })
        .fold(0.0, f64::max)
}

/// Pointwise Euclidean magnitude over components.
pub fn pointwise_magnitude(x: &PhysicalField) -> Vec<f64> {
    let len = x.grid.len();
    if x.components == 1 {
        return x.values.iter().map(|v| v.abs()).collect();
    }
    (0..len)
        .map(|idx| (0..x.components).map(|c| x.values[c * len + idx].powi(2)).sum::<f64>().sqrt())
        .collect()
}

pub(crate) fn lp_of_magnitude(grid: Grid, magnitude: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(magnitude.iter().copied().fold(0.0, f64::max));
    }
    let cell = grid.volume() / grid.len() as f64;
    let sum = if p == 2.0 {
        ordered_sum(magnitude.iter().map(|m| m * m))
    } else {
        ordered_sum(magnitude.iter().map(|m| m.powf(p)))
    };
    Ok((cell * sum).powf(1.0 / p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(p))
    } else {
        Ok(())
    }
}

/// Grid-quadrature `L^p` norm; vector fields use the pointwise Euclidean magnitude.
pub fn lebesgue_norm(f: &SpectralField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let x = f.to_physical();
    lp_of_magnitude(f.grid(), &pointwise_magnitude(&x), p)
}

fn weighted_energy(f: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid();
    let len = grid.len();
    let weights: Vec<f64> = (0..len)
        .map(|idx| {
            let k = grid.wavevector(idx);
            weight((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
        })
        .collect();
    let sum = ordered_sum(
        (0..f.components())
            .flat_map(|c| f.component(c).iter().zip(&weights).map(|(z, w)| w * z.norm_sqr())),
    );
    grid.volume() * sum
}

/// `( (2π)³ Σ_k (1+|k|²)^s |f̂(k)|² )^{1/2}`; equals the `L²` norm at `s = 0`.
pub fn sobolev_norm(f: &SpectralField, spec: SobolevSpec) -> f64 {
    weighted_energy(f, |k2| (1.0 + k2).powf(spec.s)).sqrt()
}

/// `‖∇^m f‖_{L²}` of the full derivative tensor, computed by Parseval.
pub fn derivative_l2(f: &SpectralField, order: u32) -> f64 {
    weighted_energy(f, |k2| k2.powi(order as i32)).sqrt()
}

/// `(2π)³ Re Σ_k f̂(k)·conj ĝ(k)`, the `L²` pairing of two real fields.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    if f.shape() != g.shape() {
        return Err(Error::ShapeMismatch(format!(
            "inner product of {}-component and {}-component fields",
            f.components(),
            g.components()
        )));
    }
    let sum = ordered_sum(f.coeffs().iter().zip(g.coeffs()).map(|(a, b)| (a * b.conj()).re));
    Ok(f.grid().volume() * sum)
}

/// Physical-space product followed by the 2/3-rule truncation.
///
/// A scalar `f` multiplies every component of `g`; otherwise the product is
/// componentwise.
pub fn product_dealiased(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if f.grid() != g.grid() || (f.components() != 1 && f.components() != g.components()) {
        return Err(Error::ShapeMismatch(format!(
            "cannot multiply {}-component by {}-component field",
            f.components(),
            g.components()
        )));
    }
    let x = f.to_physical();
    let mut y = g.to_physical();
    let len = f.grid().len();
    for c in 0..g.components() {
        let fc = if f.components() == 1 { x.component(0) } else { x.component(c) };
        for (a, b) in y.component_mut(c).iter_mut().zip(fc) {
            *a *= b;
        }
    }
    debug_assert_eq!(y.values.len(), g.components() * len);
    Ok(SpectralField::from_physical(&y).dealiased())
}

/// All multi-indices `α` with `|α| = order`.
pub fn multi_indices(order: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=order).rev() {
        for b in (0..=order - a).rev() {
            out.push([a, b, order - a - b]);
        }
    }
    out
}

/// Number of ordered derivative sequences producing `∂^α`.
pub fn multinomial(alpha: [u32; 3]) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(alpha.iter().sum()) / alpha.iter().map(|&a| fact(a)).product::<f64>()
}

/// Pointwise magnitude of the full tensor `∇^m f`, summing over components of `f`.
pub fn derivative_tensor_magnitude(f: &SpectralField, order: u32) -> Vec<f64> {
    let len = f.grid().len();
    let mut acc = vec![0.0; len];
    for alpha in multi_indices(order) {
        let weight = multinomial(alpha);
        let x = derivative(f, alpha).to_physical();
        for c in 0..f.components() {
            for (a, v) in acc.iter_mut().zip(x.component(c)) {
                *a += weight * v * v;
            }
        }
    }
    acc.iter_mut().for_each(|a| *a = a.sqrt());
    acc
}

/// `‖∇^m f‖_{L^p}` of the full derivative tensor.
pub fn derivative_lebesgue_norm(f: &SpectralField, order: u32, p: f64) -> Result<f64> {
    check_exponent(p)?;
    lp_of_magnitude(f.grid(), &derivative_tensor_magnitude(f, order), p)
}
