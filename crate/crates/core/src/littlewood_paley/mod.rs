//! Littlewood–Paley decomposition, Besov / square-function / BMO norms and
//! paraproducts on the periodic grid.
//!
//! Homogeneous quantities are taken modulo constants: the zero mode never
//! enters a block, so every norm here ignores the mean of its input.

mod bank;
mod bmo;
mod norms;
mod paraproduct;

pub use bank::{
    checksum, chi, decompose, dyadic_block, low_pass, phi_radial, DyadicDecomposition, LpBank,
    ANNULUS_INNER, ANNULUS_OUTER,
};
pub use bmo::{bmo_oscillation_norm, dyadic_sides};
pub use norms::{
    besov0_sup, besov_norm, grad_besov_minus1, shell_energies, triebel_proxy_norm,
    weighted_block_norms, BesovSpec,
};
pub use paraproduct::{bony_remainder, paraproduct};
