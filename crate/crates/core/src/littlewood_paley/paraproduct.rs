//! Bony paraproduct and remainder.
//!
//! Both operate on mean-free scalar fields: the mean of each input is dropped
//! before the blocks are formed, so `T_f g + T_g f + R(f, g)` equals the
//! product of the mean-free parts.

use super::bank::{dyadic_block, LpBank};
use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, SpectralField};

fn physical_blocks(f: &SpectralField, bank: &LpBank) -> Vec<PhysicalField> {
    bank.j_range().map(|j| dyadic_block(f, j, bank).to_physical()).collect()
}

fn check_scalars(f: &SpectralField, g: &SpectralField) -> Result<()> {
    if f.components() != 1 || g.components() != 1 || f.grid() != g.grid() {
        return Err(Error::ShapeMismatch("paraproducts take two scalar fields on one grid".into()));
    }
    Ok(())
}

fn accumulate(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((s, x), y) in acc.iter_mut().zip(a).zip(b) {
        *s += x * y;
    }
}

fn finish(grid_values: Vec<f64>, f: &SpectralField) -> SpectralField {
    let x = PhysicalField { grid: f.grid(), components: 1, values: grid_values };
    SpectralField::from_physical(&x).dealiased()
}

/// `T_f g = Σ_j S_{j-1} f · Δ_j g`, each product dealiased.
pub fn paraproduct(f: &SpectralField, g: &SpectralField, bank: &LpBank) -> Result<SpectralField> {
    check_scalars(f, g)?;
    let fb = physical_blocks(f, bank);
    let gb = physical_blocks(g, bank);
    let len = f.grid().len();
    let mut low = vec![0.0; len];
    let mut acc = vec![0.0; len];
    // position i in the block lists is shell j_min + i; S_{j-1} sums shells ≤ j - 2
    for i in 0..gb.len() {
        if i >= 2 {
            for (l, v) in low.iter_mut().zip(&fb[i - 2].values) {
                *l += v;
            }
        }
        accumulate(&mut acc, &low, &gb[i].values);
    }
    Ok(finish(acc, f))
}

/// `R(f, g) = Σ_{|j-k| ≤ 1} Δ_j f · Δ_k g`, dealiased.
pub fn bony_remainder(f: &SpectralField, g: &SpectralField, bank: &LpBank) -> Result<SpectralField> {
    check_scalars(f, g)?;
    let fb = physical_blocks(f, bank);
    let gb = physical_blocks(g, bank);
    let len = f.grid().len();
    let mut acc = vec![0.0; len];
    for i in 0..fb.len() {
        let mut near = vec![0.0; len];
        for k in i.saturating_sub(1)..(i + 2).min(gb.len()) {
            for (s, v) in near.iter_mut().zip(&gb[k].values) {
                *s += v;
            }
        }
        accumulate(&mut acc, &fb[i].values, &near);
    }
    Ok(finish(acc, f))
}
