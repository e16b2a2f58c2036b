use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{
    bmo_oscillation_norm, bony_remainder, dyadic_block, grad_besov_minus1, besov0_sup, paraproduct,
    triebel_proxy_norm, LpBank,
};
use crate::spectral::{
    check_exponent, derivative, derivative_l2, derivative_lebesgue_norm, gradient, inner_product, laplacian,
    lebesgue_norm, multi_indices, product_dealiased, sobolev_norm, SobolevSpec, SpectralField,
};

/// Left side, constant-free right side and their quotient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs_core: f64,
    pub ratio: f64,
}

impl Ratio {
    /// `None` for the degenerate `0/0` case.
    pub fn of(lhs: f64, rhs_core: f64) -> Option<Ratio> {
        if rhs_core == 0.0 && lhs == 0.0 {
            None
        } else {
            Some(Ratio { lhs, rhs_core, ratio: lhs / rhs_core })
        }
    }
}

fn sup_derivative_norm(f: &SpectralField, order: u32, p: f64) -> Result<f64> {
    multi_indices(order)
        .into_iter()
        .map(|alpha| lebesgue_norm(&derivative(f, alpha), p))
        .try_fold(0.0, |acc, v| Ok(f64::max(acc, v?)))
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() { 0.0 } else { 1.0 / p }
}

/// Bernstein ratios for `Δ_j f`:
/// (i) `sup_{|α|=k} ‖∂^α Δ_j f‖_{L^q} / (2^{jk + 3j(1/p − 1/q)} ‖Δ_j f‖_{L^p})` and
/// (ii) `‖Δ_j f‖_{L^p} / (2^{−jk} sup_{|α|=k} ‖∂^α Δ_j f‖_{L^p})`.
/// Both are `None` when the block vanishes.
pub fn bernstein_check(
    f: &SpectralField,
    j: i32,
    k_order: u32,
    p: f64,
    q: f64,
    bank: &LpBank,
) -> Result<(Option<Ratio>, Option<Ratio>)> {
    check_exponent(p)?;
    check_exponent(q)?;
    if p > q {
        return Err(Error::InvalidArgument(format!("Bernstein check needs p <= q, got p = {p}, q = {q}")));
    }
    let block = dyadic_block(f, j, bank);
    if block.is_zero() {
        return Ok((None, None));
    }
    let jf = j as f64;
    let k = k_order as f64;
    let block_p = lebesgue_norm(&block, p)?;
    let first = Ratio::of(
        sup_derivative_norm(&block, k_order, q)?,
        (jf * k + 3.0 * jf * (inv(p) - inv(q))).exp2() * block_p,
    );
    let second = Ratio::of(block_p, (-jf * k).exp2() * sup_derivative_norm(&block, k_order, p)?);
    Ok((first, second))
}

/// `ln⁺ x`: `ln x` above `e`, otherwise 1.
pub fn ln_plus(x: f64) -> f64 {
    if x > std::f64::consts::E { x.ln() } else { 1.0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSobolev {
    /// Largest of `‖f‖_∞ / (2^{−αN}‖f‖_{H^s} + N‖∇f‖_{Ḃ⁻¹∞∞})` over `N = 1..=8`.
    pub split: Option<Ratio>,
    /// The `N` attaining `split`.
    pub split_n: u32,
    /// Smallest `N ≥ 1` with `2^{−αN}‖f‖_{H^s} ≤ 1`.
    pub selected_n: u32,
    /// `‖f‖_∞ / (1 + ‖∇f‖_{Ḃ⁻¹∞∞} (ln⁺‖f‖_{H^s})^{1/2})`.
    pub closed: Option<Ratio>,
}

pub const LOG_SOBOLEV_MAX_N: u32 = 8;

pub fn log_sobolev_check(f: &SpectralField, s: f64, bank: &LpBank) -> Result<LogSobolev> {
    if s <= 1.5 {
        return Err(Error::InvalidArgument(format!("log-Sobolev check needs s > 3/2, got {s}")));
    }
    let alpha = (s - 1.5).min(1.5);
    let f = f.without_mean();
    let sup = lebesgue_norm(&f, f64::INFINITY)?;
    let hs = sobolev_norm(&f, SobolevSpec { s });
    let grad = grad_besov_minus1(&f, bank);

    let mut split: Option<Ratio> = None;
    let mut split_n = 1;
    for n in 1..=LOG_SOBOLEV_MAX_N {
        let r = Ratio::of(sup, (-alpha * n as f64).exp2() * hs + n as f64 * grad);
        if let Some(r) = r {
            if split.is_none_or(|best| r.ratio > best.ratio) {
                split = Some(r);
                split_n = n;
            }
        }
    }
    let selected_n = if hs <= 1.0 { 1 } else { ((hs.log2() / alpha).ceil() as u32).max(1) };
    let closed = Ratio::of(sup, 1.0 + grad * ln_plus(hs).sqrt());
    Ok(LogSobolev { split, split_n, selected_n, closed })
}

/// `‖∇u‖²_{L⁴} / (‖u‖_{Ḃ⁰∞∞} ‖Δu‖_{L²})`
pub fn machihara_ozawa_check(u: &SpectralField, bank: &LpBank) -> Option<Ratio> {
    let u = u.without_mean();
    let lhs = derivative_lebesgue_norm(&u, 1, 4.0).expect("valid exponent").powi(2);
    Ratio::of(lhs, besov0_sup(&u, bank) * derivative_l2(&u, 2))
}

/// `‖Δf‖_{L⁴} / (‖∇f‖^{1/8}_{L²} ‖∇³f‖^{7/8}_{L²})`
pub fn gn_quarter_check(f: &SpectralField) -> Option<Ratio> {
    let f = f.without_mean();
    let lhs = lebesgue_norm(&laplacian(&f), 4.0).expect("valid exponent");
    Ratio::of(lhs, derivative_l2(&f, 1).powf(0.125) * derivative_l2(&f, 3).powf(0.875))
}

/// Exponents of the interpolation inequality
/// `‖∇^j f‖_{L^p} ≤ C ‖∇^m f‖^{1−θ}_{L^q} ‖∇^k f‖^θ_{L^r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interpolation {
    pub j: u32,
    pub m: u32,
    pub k: u32,
    pub theta: f64,
    pub q: f64,
    pub r: f64,
}

impl Interpolation {
    /// `p` from `1/p = j/3 + θ(1/r − m/3) + (1−θ)(1/q − k/3)`.
    pub fn exponent(&self) -> Result<f64> {
        let Interpolation { j, m, k, theta, q, r } = *self;
        check_exponent(q)?;
        check_exponent(r)?;
        if !(m <= j && j <= k) || !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "interpolation needs m <= j <= k and 0 <= theta <= 1, got {self:?}"
            )));
        }
        let inv_p = j as f64 / 3.0 + theta * (inv(r) - m as f64 / 3.0) + (1.0 - theta) * (inv(q) - k as f64 / 3.0);
        if !(-1e-12..=1.0 + 1e-12).contains(&inv_p) {
            return Err(Error::InvalidArgument(format!(
                "interpolation exponents {self:?} give 1/p = {inv_p}, outside [0, 1]"
            )));
        }
        Ok(if inv_p.abs() <= 1e-12 { f64::INFINITY } else { 1.0 / inv_p.min(1.0) })
    }
}

pub fn interpolation_check(f: &SpectralField, spec: Interpolation) -> Result<Option<Ratio>> {
    let p = spec.exponent()?;
    let f = f.without_mean();
    let norm = |order: u32, e: f64| -> Result<f64> {
        if e == 2.0 { Ok(derivative_l2(&f, order)) } else { derivative_lebesgue_norm(&f, order, e) }
    };
    let lhs = norm(spec.j, p)?;
    let low = norm(spec.m, spec.q)?;
    let high = norm(spec.k, spec.r)?;
    Ok(Ratio::of(lhs, low.powf(1.0 - spec.theta) * high.powf(spec.theta)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trilinear {
    /// Denominator with the dyadic-cube BMO estimator.
    pub bmo: Option<Ratio>,
    /// Denominator with the `L^∞` square-function proxy.
    pub proxy: Option<Ratio>,
}

/// `|∫ f·∇(gh)| / (‖f‖_{BMO} (‖∇g‖‖h‖ + ‖g‖‖∇h‖))` on mean-free inputs.
pub fn trilinear_check(f: &SpectralField, g: &SpectralField, h: &SpectralField, bank: &LpBank) -> Result<Trilinear> {
    if f.components() != 3 || g.components() != 1 || h.components() != 1 {
        return Err(Error::ShapeMismatch("trilinear check takes a vector f and scalars g, h".into()));
    }
    let (f, g, h) = (f.without_mean(), g.without_mean(), h.without_mean());
    let gh = product_dealiased(&g, &h)?;
    let lhs = inner_product(&f, &gradient(&gh))?.abs();
    let core = derivative_l2(&g, 1) * derivative_l2(&h, 0) + derivative_l2(&g, 0) * derivative_l2(&h, 1);
    Ok(Trilinear {
        bmo: Ratio::of(lhs, bmo_oscillation_norm(&f) * core),
        proxy: Ratio::of(lhs, triebel_proxy_norm(&f, bank, f64::INFINITY)? * core),
    })
}

/// Relative `L²` residual of `f̃g̃ − mean(f̃g̃) − (T_f g + T_g f + R(f, g))`,
/// `f̃, g̃` the mean-free parts; `None` when the product is constant.
pub fn bony_identity_check(f: &SpectralField, g: &SpectralField, bank: &LpBank) -> Result<Option<Ratio>> {
    let (f, g) = (f.without_mean(), g.without_mean());
    let product = product_dealiased(&f, &g)?.without_mean();
    let parts = paraproduct(&f, &g, bank)?.add(&paraproduct(&g, &f, bank)?).add(&bony_remainder(&f, &g, bank)?);
    let residual = derivative_l2(&product.sub(&parts.without_mean()), 0);
    Ok(Ratio::of(residual, derivative_l2(&product, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{initial_condition, IcKind};
    use crate::spectral::{leray_project, Grid};
    use rustfft::num_complex::Complex64;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn mode(g: Grid, k: [i64; 3], amp: f64) -> SpectralField {
        SpectralField::from_modes(g, 1, &[(0, k, Complex64::new(0.0, -0.5 * amp))])
    }

    #[test]
    fn bernstein_single_mode() {
        let g = grid(32);
        let bank = LpBank::build(g);
        // |k| = 2 sits in shells 0 and 1 (phi(2) = 1 − χ(1), phi(1) = χ(1))
        let f = mode(g, [2, 0, 0], 1.3);
        for j in [0, 1] {
            let (first, second) = bernstein_check(&f, j, 1, 2.0, 2.0, &bank).unwrap();
            let ratio = 2.0 / f64::from(j).exp2();
            assert!((first.unwrap().ratio - ratio).abs() < 1e-12, "{j} {first:?} {ratio}");
            assert!((second.unwrap().ratio - 1.0 / ratio).abs() < 1e-12);
        }
        assert_eq!(bernstein_check(&f, 4, 1, 2.0, 2.0, &bank).unwrap(), (None, None));
        assert!(bernstein_check(&f, 0, 1, 4.0, 2.0, &bank).is_err());
    }

    #[test]
    fn ln_plus_branches() {
        assert_eq!(ln_plus(0.5), 1.0);
        assert_eq!(ln_plus(std::f64::consts::E), 1.0);
        assert!((ln_plus(10.0) - 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_sobolev_flat_branch_and_rejection() {
        let g = grid(16);
        let bank = LpBank::build(g);
        let f = mode(g, [1, 0, 0], 0.05);
        let r = log_sobolev_check(&f, 2.0, &bank).unwrap();
        let hs = sobolev_norm(&f, SobolevSpec { s: 2.0 });
        assert!(hs <= std::f64::consts::E);
        let sup = lebesgue_norm(&f, f64::INFINITY).unwrap();
        let closed = sup / (1.0 + grad_besov_minus1(&f, &bank));
        assert!((r.closed.unwrap().ratio - closed).abs() < 1e-15);
        assert_eq!(r.selected_n, 1);
        assert!(log_sobolev_check(&f, 1.5, &bank).is_err());
    }

    #[test]
    fn machihara_ozawa_single_mode_oracle() {
        let g = grid(16);
        let bank = LpBank::build(g);
        // u = (0, A sin x₁, 0): ∇u has one entry A cos x₁
        let amp = 1.7;
        let u = SpectralField::from_modes(g, 3, &[(1, [1, 0, 0], Complex64::new(0.0, -0.5 * amp))]);
        let vol = g.volume();
        let cos4_mean = 3.0 / 8.0;
        let grad_l4_sq = (amp.powi(4) * cos4_mean * vol).sqrt();
        let besov0 = amp * crate::littlewood_paley::chi(1.0).max(1.0 - crate::littlewood_paley::chi(1.0));
        let lap_l2 = amp * (0.5 * vol).sqrt();
        let r = machihara_ozawa_check(&u, &bank).unwrap();
        assert!((r.ratio - grad_l4_sq / (besov0 * lap_l2)).abs() < 1e-12 * r.ratio);
    }

    #[test]
    fn gn_quarter_single_mode_oracle() {
        let g = grid(16);
        // f = A sin(k·x), |k|² = 2: Δf = −2f, ‖∇^m f‖ = |k|^m ‖f‖
        let amp = 0.8;
        let f = mode(g, [1, 1, 0], amp);
        let vol = g.volume();
        let l2 = amp * (0.5 * vol).sqrt();
        let l4 = amp * (3.0 / 8.0 * vol).powf(0.25);
        let k = 2f64.sqrt();
        let expected = k * k * l4 / ((k * l2).powf(0.125) * (k.powi(3) * l2).powf(0.875));
        assert!((gn_quarter_check(&f).unwrap().ratio - expected).abs() < 1e-12 * expected);
        assert!(gn_quarter_check(&SpectralField::zeros(g, 1)).is_none());
    }

    #[test]
    fn interpolation_exponents() {
        let a = Interpolation { j: 2, m: 1, k: 3, theta: 0.5, q: 2.0, r: 2.0 };
        assert!((a.exponent().unwrap() - 2.0).abs() < 1e-15);
        let b = Interpolation { j: 1, m: 0, k: 2, theta: 0.5, q: 4.0, r: 4.0 };
        assert!((b.exponent().unwrap() - 4.0).abs() < 1e-14);
        let bad = Interpolation { j: 0, m: 1, k: 3, theta: 0.5, q: 2.0, r: 2.0 };
        assert!(bad.exponent().is_err());
        let too_big = Interpolation { j: 3, m: 0, k: 3, theta: 1.0, q: 1.0, r: 1.0 };
        let err = too_big.exponent().unwrap_err().to_string();
        assert!(err.contains("1/p"), "{err}");
    }

    #[test]
    fn interpolation_degenerate_and_single_mode() {
        let g = grid(16);
        let f = mode(g, [2, 1, 0], 1.1);
        let identity = Interpolation { j: 2, m: 2, k: 2, theta: 1.0, q: 3.0, r: 3.0 };
        assert!((interpolation_check(&f, identity).unwrap().unwrap().ratio - 1.0).abs() < 1e-15);
        let a = Interpolation { j: 2, m: 1, k: 3, theta: 0.5, q: 2.0, r: 2.0 };
        let r = interpolation_check(&f, a).unwrap().unwrap().ratio;
        assert!((r - 1.0).abs() <= 4.0 * f64::EPSILON, "{r}");
    }

    #[test]
    fn trilinear_vanishes_for_divergence_free() {
        let g = grid(32);
        let bank = LpBank::build(g);
        let s = initial_condition(IcKind::RandomBand, 1.0, 1.0, 5, g);
        let theta = s.theta.clone();
        let small = SpectralField::from_modes(g, 1, &[(0, [1, 2, 0], Complex64::new(0.3, 0.1)), (0, [0, 1, 3], Complex64::new(-0.2, 0.4))]);
        let r = trilinear_check(&leray_project(&s.u), &small, &small, &bank).unwrap();
        assert!(r.bmo.unwrap().ratio <= 1e-10);
        let constant = SpectralField::constant(g, 3, 2.0);
        let r = trilinear_check(&constant, &theta, &theta, &bank).unwrap();
        assert_eq!(r.bmo, None);
        assert!(trilinear_check(&theta, &theta, &theta, &bank).is_err());
    }

    #[test]
    fn bony_constant_inputs() {
        let g = grid(32);
        let bank = LpBank::build(g);
        let f = mode(g, [3, 1, 0], 1.0).add(&SpectralField::constant(g, 1, 2.0));
        let c = SpectralField::constant(g, 1, 5.0);
        assert_eq!(bony_identity_check(&f, &c, &bank).unwrap(), None);
        let h = mode(g, [1, 0, 2], 0.7);
        assert!(bony_identity_check(&f, &h, &bank).unwrap().unwrap().ratio <= 1e-10);
    }
}
