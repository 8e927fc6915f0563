//! Multi-dimensional complex FFT on a cubic grid, built from one 1-D plan.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub(crate) struct FftNd {
    len: usize,
    dims: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftNd {
    pub(crate) fn new(len: usize, dims: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            dims,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform, normalized so that `inverse(forward(x)) == x`.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.len;
        debug_assert_eq!(data.len(), n.pow(self.dims as u32));
        let scratch_len = fft.get_inplace_scratch_len();
        for axis in 0..self.dims {
            let stride = n.pow((self.dims - 1 - axis) as u32);
            if stride == 1 {
                let lines_per_task = (4096 / n).max(1);
                data.par_chunks_mut(n * lines_per_task).for_each_init(
                    || vec![Complex64::default(); scratch_len],
                    |scratch, chunk| fft.process_with_scratch(chunk, scratch),
                );
                continue;
            }
            // Lines with stride `stride` live inside blocks of n * stride values.
            // Gather them contiguously, transform, scatter back. Blocks are split
            // into column groups so that the work parallelizes even for axis 0.
            let block = n * stride;
            let cols_per_task = stride.min(256);
            data.par_chunks_mut(block).for_each(|blk| {
                let mut tmp = vec![Complex64::default(); n * cols_per_task];
                let mut scratch = vec![Complex64::default(); scratch_len];
                let mut col0 = 0;
                while col0 < stride {
                    let cols = cols_per_task.min(stride - col0);
                    for c in 0..cols {
                        for j in 0..n {
                            tmp[c * n + j] = blk[j * stride + col0 + c];
                        }
                    }
                    fft.process_with_scratch(&mut tmp[..cols * n], &mut scratch);
                    for c in 0..cols {
                        for j in 0..n {
                            blk[j * stride + col0 + c] = tmp[c * n + j];
                        }
                    }
                    col0 += cols;
                }
            });
        }
    }
}
