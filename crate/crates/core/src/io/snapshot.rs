//! `BSVF` snapshots: a 40-byte little-endian header followed by `(re, im)`
//! pairs of every coefficient, ordered by component and then by `k₁, k₂, k₃`
//! each ascending from `−N/2 + 1` to `N/2`.
//!
//! ```text
//! offset  type  field
//!  0      [u8;4] "BSVF"
//!  4      u32   version (1)
//!  8      u32   N
//! 12      u32   components (4: u₁, u₂, u₃, θ)
//! 16      f64   t
//! 24      f64   ν
//! 32      f64   κ
//! 40      f64 pairs
//! ```

use std::path::Path;

use rustfft::num_complex::Complex64;

use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::solver::SimState;
use crate::spectral::{Grid, SpectralField, HERMITIAN_TOLERANCE};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"BSVF";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const SNAPSHOT_COMPONENTS: u32 = 4;
pub const SNAPSHOT_HEADER_LEN: usize = 40;

pub fn snapshot_len(n: usize, components: usize) -> usize {
    SNAPSHOT_HEADER_LEN + 16 * components * n * n * n
}

/// Storage indices in file order for one component.
fn file_order(grid: Grid) -> impl Iterator<Item = usize> {
    let half = grid.n() as i64 / 2;
    let ks = move || (1 - half)..=half;
    ks().flat_map(move |k1| ks().flat_map(move |k2| ks().map(move |k3| grid.index_of([k1, k2, k3]))))
}

pub fn encode_snapshot(state: &SimState) -> Vec<u8> {
    let grid = state.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(snapshot_len(n, 4));
    out.extend_from_slice(&SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&SNAPSHOT_COMPONENTS.to_le_bytes());
    for v in [state.t, state.nu, state.kappa] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let components = [state.u.component(0), state.u.component(1), state.u.component(2), state.theta.component(0)];
    for comp in components {
        for idx in file_order(grid) {
            out.extend_from_slice(&comp[idx].re.to_le_bytes());
            out.extend_from_slice(&comp[idx].im.to_le_bytes());
        }
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SimState> {
    if bytes.len() < SNAPSHOT_HEADER_LEN {
        return Err(Error::Truncated { expected: SNAPSHOT_HEADER_LEN, actual: bytes.len() });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u32_at(bytes, 4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::VersionMismatch { found: version, expected: SNAPSHOT_VERSION });
    }
    let n = u32_at(bytes, 8) as usize;
    let components = u32_at(bytes, 12) as usize;
    if components != SNAPSHOT_COMPONENTS as usize {
        return Err(Error::Parse(format!("snapshot has {components} components, expected {SNAPSHOT_COMPONENTS}")));
    }
    let grid = Grid::new(n)?;
    let expected = snapshot_len(n, components);
    if bytes.len() < expected {
        return Err(Error::Truncated { expected, actual: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(Error::TrailingBytes { expected, actual: bytes.len() });
    }

    let len = grid.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); components * len];
    let mut at = SNAPSHOT_HEADER_LEN;
    for c in 0..components {
        for idx in file_order(grid) {
            coeffs[c * len + idx] = Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8));
            at += 16;
        }
    }
    let theta = SpectralField::from_coeffs(grid, 1, coeffs.split_off(3 * len))?;
    let u = SpectralField::from_coeffs(grid, 3, coeffs)?;
    for field in [&u, &theta] {
        let residue = field.hermitian_defect();
        if !(residue <= HERMITIAN_TOLERANCE * field.max_abs().max(f64::MIN_POSITIVE)) {
            return Err(Error::HermitianViolation { residue, tolerance: HERMITIAN_TOLERANCE });
        }
    }
    Ok(SimState { u, theta, t: f64_at(bytes, 16), nu: f64_at(bytes, 24), kappa: f64_at(bytes, 32) })
}

pub fn write_snapshot(path: &Path, state: &SimState) -> Result<()> {
    write_file(path, &encode_snapshot(state))
}

pub fn read_snapshot(path: &Path) -> Result<SimState> {
    decode_snapshot(&read_file(path)?)
}
