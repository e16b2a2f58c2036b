//! Three-dimensional complex FFT on an `n³` cube built from rustfft line
//! transforms.
//!
//! The cube is stored row-major as `(i1 * n + i2) * n + i3`. Non-contiguous
//! axes are brought to the front by transposes. Every line is transformed
//! independently, so the result does not depend on the number of rayon
//! workers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

fn plan(n: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, Direction), Arc<dyn Fft<f64>>>>> =
        OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut plans = plans.lock().expect("fft plan cache poisoned");
    plans
        .entry((n, direction))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            match direction {
                Direction::Forward => planner.plan_fft_forward(n),
                Direction::Inverse => planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

/// Unnormalized in-place 3D transform of one `n³` block.
pub(crate) fn fft3(data: &mut [Complex64], n: usize, direction: Direction) {
    debug_assert_eq!(data.len(), n * n * n);
    let fft = plan(n, direction);
    let fft = fft.as_ref();
    let plane = n * n;
    let buffers = || {
        (vec![Complex64::new(0.0, 0.0); plane], vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()])
    };

    // Inner two axes, one `i1` plane at a time.
    data.par_chunks_mut(plane).for_each_init(buffers, |(tmp, scratch), slab| {
        fft.process_with_scratch(slab, scratch);
        for i2 in 0..n {
            for i3 in 0..n {
                tmp[i3 * n + i2] = slab[i2 * n + i3];
            }
        }
        fft.process_with_scratch(tmp, scratch);
        for i3 in 0..n {
            for i2 in 0..n {
                slab[i2 * n + i3] = tmp[i3 * n + i2];
            }
        }
    });

    // Outer axis, gathered one `i2` slab at a time.
    let (mut tmp, mut scratch) = buffers();
    for i2 in 0..n {
        for i1 in 0..n {
            let row = &data[(i1 * n + i2) * n..(i1 * n + i2 + 1) * n];
            for (i3, &z) in row.iter().enumerate() {
                tmp[i3 * n + i1] = z;
            }
        }
        fft.process_with_scratch(&mut tmp, &mut scratch);
        for i1 in 0..n {
            let row = &mut data[(i1 * n + i2) * n..(i1 * n + i2 + 1) * n];
            for (i3, z) in row.iter_mut().enumerate() {
                *z = tmp[i3 * n + i1];
            }
        }
    }
}
