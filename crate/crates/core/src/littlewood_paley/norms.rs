//! Homogeneous Besov norms, the square-function proxy and shell energies.

use super::bank::{dyadic_block, LpBank};
use crate::error::{Error, Result};
use crate::spectral::{derivative_l2, gradient, pointwise_magnitude, SpectralField};
use crate::spectral::lp_of_magnitude;

/// Smoothness `s`, integrability `p` and summation exponent `q` of `Ḃ^s_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovSpec {
    s: f64,
    p: f64,
    q: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("besov smoothness must be finite, got {s}")));
        }
        for e in [p, q] {
            if e.is_nan() || e < 1.0 {
                return Err(Error::InvalidExponent(e));
            }
        }
        Ok(BesovSpec { s, p, q })
    }

    /// `Ḃ^s_{∞,∞}`
    pub fn sup(s: f64) -> Self {
        BesovSpec { s, p: f64::INFINITY, q: f64::INFINITY }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Weighted block norms `2^{js} ‖Δ_j f‖_{L^p}` for every shell of the bank.
pub fn weighted_block_norms(f: &SpectralField, spec: BesovSpec, bank: &LpBank) -> Vec<(i32, f64)> {
    let f = f.without_mean();
    bank.j_range()
        .map(|j| {
            let block = dyadic_block(&f, j, bank);
            let norm = if block.is_zero() {
                0.0
            } else if spec.p == 2.0 {
                derivative_l2(&block, 0)
            } else {
                let x = block.to_physical();
                lp_of_magnitude(f.grid(), &pointwise_magnitude(&x), spec.p)
                    .expect("exponent validated by BesovSpec")
            };
            (j, (j as f64 * spec.s).exp2() * norm)
        })
        .collect()
}

/// `‖f‖_{Ḃ^s_{p,q}}`: the `ℓ^q` norm over shells of `2^{js}‖Δ_j f‖_{L^p}`.
pub fn besov_norm(f: &SpectralField, spec: BesovSpec, bank: &LpBank) -> f64 {
    let terms = weighted_block_norms(f, spec, bank);
    if spec.q.is_infinite() {
        terms.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    } else {
        let sum = terms.iter().fold(0.0, |acc, &(_, v)| acc + v.powf(spec.q));
        sum.powf(1.0 / spec.q)
    }
}

/// `‖∇u‖_{Ḃ^{-1}_{∞,∞}}`, with the gradient tensor's pointwise Euclidean magnitude.
pub fn grad_besov_minus1(u: &SpectralField, bank: &LpBank) -> f64 {
    besov_norm(&gradient(u), BesovSpec::sup(-1.0), bank)
}

/// `‖f‖_{Ḃ^0_{∞,∞}}`
pub fn besov0_sup(f: &SpectralField, bank: &LpBank) -> f64 {
    besov_norm(f, BesovSpec::sup(0.0), bank)
}

/// `L^p` norm (`p ∈ {1, ∞}`) of the square function `(Σ_j |Δ_j f|²)^{1/2}`.
pub fn triebel_proxy_norm(f: &SpectralField, bank: &LpBank, p: f64) -> Result<f64> {
    if p != 1.0 && p != f64::INFINITY {
        return Err(Error::InvalidArgument(format!(
            "square-function proxy supports p = 1 or p = inf, got {p}"
        )));
    }
    let grid = f.grid();
    let mut square = vec![0.0; grid.len()];
    for j in bank.j_range() {
        let block = dyadic_block(f, j, bank);
        if block.is_zero() {
            continue;
        }
        let x = block.to_physical();
        for (acc, m) in square.iter_mut().zip(pointwise_magnitude(&x)) {
            *acc += m * m;
        }
    }
    square.iter_mut().for_each(|v| *v = v.sqrt());
    lp_of_magnitude(grid, &square, p)
}

/// `‖Δ_j f‖²_{L²}` for every shell.
pub fn shell_energies(f: &SpectralField, bank: &LpBank) -> Vec<(i32, f64)> {
    bank.j_range()
        .map(|j| (j, derivative_l2(&dyadic_block(f, j, bank), 0).powi(2)))
        .collect()
}
