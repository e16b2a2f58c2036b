//! Dyadic-cube mean oscillation.

use crate::spectral::{PhysicalField, SpectralField};

/// Inclusive prefix sums over an `n³` block, stored on an `(n+1)³` lattice.
struct SummedVolume {
    n: usize,
    table: Vec<f64>,
}

impl SummedVolume {
    fn new(values: &[f64], n: usize) -> Self {
        let m = n + 1;
        let mut table = vec![0.0; m * m * m];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let at = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
                    table[at(i + 1, j + 1, k + 1)] = values[(i * n + j) * n + k]
                        + table[at(i, j + 1, k + 1)]
                        + table[at(i + 1, j, k + 1)]
                        + table[at(i + 1, j + 1, k)]
                        - table[at(i, j, k + 1)]
                        - table[at(i, j + 1, k)]
                        - table[at(i + 1, j, k)]
                        + table[at(i, j, k)];
                }
            }
        }
        SummedVolume { n, table }
    }

    /// Sum over the cube `[lo, lo + side)³`.
    fn cube_sum(&self, lo: [usize; 3], side: usize) -> f64 {
        let m = self.n + 1;
        let at = |a: usize, b: usize, c: usize| self.table[(a * m + b) * m + c];
        let [a0, b0, c0] = lo;
        let [a1, b1, c1] = [a0 + side, b0 + side, c0 + side];
        at(a1, b1, c1) - at(a0, b1, c1) - at(a1, b0, c1) - at(a1, b1, c0) + at(a0, b0, c1)
            + at(a0, b1, c0)
            + at(a1, b0, c0)
            - at(a0, b0, c0)
    }
}

/// Side lengths (in grid points) of the dyadic levels `m = 0, 1, …` that tile the
/// grid exactly and contain more than one point.
pub fn dyadic_sides(n: usize) -> Vec<usize> {
    let mut sides = Vec::new();
    let mut side = n;
    while side >= 2 {
        sides.push(side);
        if side % 2 != 0 {
            break;
        }
        side /= 2;
    }
    sides
}

/// Largest mean absolute deviation from the cube average over all aligned
/// dyadic subcubes of the box. Vector fields use the Euclidean deviation.
pub fn bmo_oscillation_norm(f: &SpectralField) -> f64 {
    bmo_of_samples(&f.to_physical())
}

pub(crate) fn bmo_of_samples(x: &PhysicalField) -> f64 {
    let n = x.grid.n();
    let tables: Vec<SummedVolume> = (0..x.components).map(|c| SummedVolume::new(x.component(c), n)).collect();
    let mut worst: f64 = 0.0;
    for side in dyadic_sides(n) {
        let count = n / side;
        let volume = (side * side * side) as f64;
        for a in 0..count {
            for b in 0..count {
                for c in 0..count {
                    let lo = [a * side, b * side, c * side];
                    let means: Vec<f64> = tables.iter().map(|t| t.cube_sum(lo, side) / volume).collect();
                    let mut deviation = 0.0;
                    for i in lo[0]..lo[0] + side {
                        for j in lo[1]..lo[1] + side {
                            for k in lo[2]..lo[2] + side {
                                let idx = (i * n + j) * n + k;
                                let d2: f64 = means
                                    .iter()
                                    .enumerate()
                                    .map(|(comp, mean)| (x.component(comp)[idx] - mean).powi(2))
                                    .sum();
                                deviation += d2.sqrt();
                            }
                        }
                    }
                    worst = worst.max(deviation / volume);
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, lebesgue_norm, Grid};

    fn sample(g: Grid, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> SpectralField {
        forward_transform(&PhysicalField::from_fn(g, components, f)).unwrap()
    }

    /// Direct evaluation over every aligned dyadic cube: mean by plain summation.
    fn brute_force(x: &PhysicalField) -> f64 {
        let n = x.grid.n();
        let mut worst: f64 = 0.0;
        let mut side = n;
        while side >= 2 {
            for a in (0..n).step_by(side) {
                for b in (0..n).step_by(side) {
                    for c in (0..n).step_by(side) {
                        let points: Vec<usize> = (a..a + side)
                            .flat_map(|i| (b..b + side).flat_map(move |j| (c..c + side).map(move |k| (i * n + j) * n + k)))
                            .collect();
                        let mean: Vec<f64> = (0..x.components)
                            .map(|comp| points.iter().map(|&p| x.component(comp)[p]).sum::<f64>() / points.len() as f64)
                            .collect();
                        let dev: f64 = points
                            .iter()
                            .map(|&p| (0..x.components).map(|comp| (x.component(comp)[p] - mean[comp]).powi(2)).sum::<f64>().sqrt())
                            .sum::<f64>()
                            / points.len() as f64;
                        worst = worst.max(dev);
                    }
                }
            }
            if side % 2 != 0 {
                break;
            }
            side /= 2;
        }
        worst
    }

    #[test]
    fn sides_for_power_of_two_and_mixed() {
        assert_eq!(dyadic_sides(16), vec![16, 8, 4, 2]);
        assert_eq!(dyadic_sides(48), vec![48, 24, 12, 6, 3]);
    }

    #[test]
    fn constant_has_zero_oscillation() {
        let g = Grid::new(16).unwrap();
        assert!(bmo_oscillation_norm(&SpectralField::constant(g, 1, 3.0)) < 1e-14);
    }

    #[test]
    fn sine_matches_brute_force() {
        let g = Grid::new(16).unwrap();
        let f = sample(g, 1, |_, x| x[0].sin());
        let fast = bmo_oscillation_norm(&f);
        let slow = brute_force(&f.to_physical());
        assert!((fast - slow).abs() < 1e-13);
        // the whole box wins: mean of |sin| over 16 samples = cot(π/16)/8
        let expected = (std::f64::consts::PI / 16.0).tan().recip() / 8.0;
        assert!((fast - expected).abs() < 1e-13, "{fast} vs {expected}");
        assert!(fast > 0.0 && fast <= 1.0);
        assert!(fast <= lebesgue_norm(&f, f64::INFINITY).unwrap());
    }

    #[test]
    fn vector_and_homogeneity() {
        let g = Grid::new(16).unwrap();
        let f = sample(g, 3, |c, x| ((c + 1) as f64 * x[c]).cos() + 0.3 * x[(c + 1) % 3].sin());
        let base = bmo_oscillation_norm(&f);
        assert!((base - brute_force(&f.to_physical())).abs() < 1e-12);
        let scaled = bmo_oscillation_norm(&f.scaled(-2.5));
        assert!((scaled - 2.5 * base).abs() <= 1e-12 * scaled);
    }
}
