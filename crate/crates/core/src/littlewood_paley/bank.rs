//! Dyadic partition of unity on the retained wavevectors.

use std::ops::RangeInclusive;

use sha2::{Digest, Sha256};

use crate::spectral::{Grid, SpectralField};

/// Inner radius of the annulus carrying `φ`.
pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
/// Outer radius of the annulus carrying `φ`.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;

const CHI_FLAT: f64 = 3.0 / 4.0;
const CHI_ZERO: f64 = 4.0 / 3.0;

fn flat_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Radial cutoff: `1` on `r ≤ 3/4`, `0` on `r ≥ 4/3`, joined by the C^∞
/// step `e^{-1/(1-t)} / (e^{-1/t} + e^{-1/(1-t)})` on the transition.
pub fn chi(r: f64) -> f64 {
    if r <= CHI_FLAT {
        1.0
    } else if r >= CHI_ZERO {
        0.0
    } else {
        let t = (r - CHI_FLAT) / (CHI_ZERO - CHI_FLAT);
        let rise = flat_exp(1.0 - t);
        rise / (flat_exp(t) + rise)
    }
}

/// `φ(r) = χ(r/2) − χ(r)`, supported in `[3/4, 8/3]`.
pub fn phi_radial(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Precomputed multipliers `φ(2^{-j} k)` for every retained `k` and shell `j`.
#[derive(Clone, Debug)]
pub struct LpBank {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    phi: Vec<Vec<f64>>,
}

impl LpBank {
    pub fn build(grid: Grid) -> Self {
        let j_min = -1;
        let k_max = 3f64.sqrt() * grid.n() as f64 / 2.0;
        let j_max = (k_max / ANNULUS_INNER).log2().ceil() as i32;
        let radii: Vec<f64> = grid
            .wavevectors()
            .map(|(_, k)| ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt())
            .collect();
        let phi = (j_min..=j_max)
            .map(|j| {
                let scale = (-j as f64).exp2();
                radii.iter().map(|&r| if r == 0.0 { 0.0 } else { phi_radial(scale * r) }).collect()
            })
            .collect();
        LpBank { grid, j_min, j_max, phi }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_range(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// Multiplier table of shell `j`, `None` outside the bank range.
    pub fn multiplier(&self, j: i32) -> Option<&[f64]> {
        if self.j_range().contains(&j) {
            Some(&self.phi[(j - self.j_min) as usize])
        } else {
            None
        }
    }

    pub fn phi(&self, j: i32, k: [i64; 3]) -> f64 {
        self.multiplier(j).map_or(0.0, |m| m[self.grid.index_of(k)])
    }

    /// Shells with a nonzero multiplier at `k`.
    pub fn active_shells(&self, k: [i64; 3]) -> Vec<i32> {
        self.j_range().filter(|&j| self.phi(j, k) != 0.0).collect()
    }
}

/// All dyadic blocks of a field together with a digest of its coefficients.
#[derive(Clone, Debug)]
pub struct DyadicDecomposition {
    pub blocks: Vec<(i32, SpectralField)>,
    pub source_checksum: String,
}

impl DyadicDecomposition {
    /// `Σ_j Δ_j f`, summed in increasing `j`.
    pub fn reconstruct(&self) -> Option<SpectralField> {
        let mut blocks = self.blocks.iter();
        let (_, first) = blocks.next()?;
        let mut acc = first.clone();
        for (_, b) in blocks {
            acc.axpy(1.0, b);
        }
        Some(acc)
    }
}

/// `Δ_j f`: every mode scaled by `φ(2^{-j}k)`; zero field outside the bank range.
pub fn dyadic_block(f: &SpectralField, j: i32, bank: &LpBank) -> SpectralField {
    assert_eq!(f.grid(), bank.grid(), "field and bank grids differ");
    match bank.multiplier(j) {
        Some(m) => f.apply_table(m),
        None => SpectralField::zeros(f.grid(), f.components()),
    }
}

/// `S_l f = Σ_{j ≤ l-1} Δ_j f` (mean excluded).
pub fn low_pass(f: &SpectralField, l: i32, bank: &LpBank) -> SpectralField {
    let mut acc = SpectralField::zeros(f.grid(), f.components());
    for j in bank.j_min()..l.min(bank.j_max() + 1) {
        acc.axpy(1.0, &dyadic_block(f, j, bank));
    }
    acc
}

pub fn decompose(f: &SpectralField, bank: &LpBank) -> DyadicDecomposition {
    let blocks = bank.j_range().map(|j| (j, dyadic_block(f, j, bank))).collect();
    DyadicDecomposition { blocks, source_checksum: checksum(f) }
}

/// SHA-256 of the little-endian coefficient bytes, hex encoded.
pub fn checksum(f: &SpectralField) -> String {
    let mut hasher = Sha256::new();
    for z in f.coeffs() {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
