use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::darcy::TorusGrid;

/// FFT-based differentiation on a [`TorusGrid`].
///
/// Derivatives use the symmetric wavenumbers with the Nyquist component set
/// to zero, so each partial derivative is an exactly skew-symmetric real
/// operator. Its common kernel consists of the modes whose every wavenumber
/// is 0 or `n/2`.
pub struct Spectral {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Wavenumber per axis index, zero at the Nyquist index.
    wavenumber: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n;
        let wavenumber = (0..n)
            .map(|i| {
                if i < n / 2 {
                    i as f64
                } else if i == n / 2 {
                    0.0
                } else {
                    i as f64 - n as f64
                }
            })
            .collect();
        Self { grid, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), wavenumber }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n;
        let total = self.grid.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for axis in 0..self.grid.d {
            let stride = n.pow((self.grid.d - 1 - axis) as u32);
            for start in 0..total {
                if !(start / stride).is_multiple_of(n) {
                    continue;
                }
                for (i, l) in line.iter_mut().enumerate() {
                    *l = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, l) in line.iter().enumerate() {
                    data[start + i * stride] = *l;
                }
            }
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, &self.inverse);
        let scale = 1.0 / self.grid.len() as f64;
        spectrum.iter().map(|c| c.re * scale).collect()
    }

    fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.grid.n.pow((self.grid.d - 1 - axis) as u32)) % self.grid.n
    }

    /// Whether spectral index `flat` lies in the kernel of the gradient.
    pub fn is_kernel(&self, flat: usize) -> bool {
        (0..self.grid.d).all(|a| {
            let i = self.axis_index(flat, a);
            i == 0 || i == self.grid.n / 2
        })
    }

    /// Removes the kernel modes (constant and pure Nyquist modes).
    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        let mut s = self.forward(values);
        for (k, c) in s.iter_mut().enumerate() {
            if self.is_kernel(k) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse(s)
    }

    /// Partial derivatives of `values` along every axis.
    pub fn gradient(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let s = self.forward(values);
        (0..self.grid.d)
            .map(|axis| {
                let ds = s
                    .iter()
                    .enumerate()
                    .map(|(k, c)| *c * Complex64::new(0.0, 2.0 * PI * self.wavenumber[self.axis_index(k, axis)]))
                    .collect();
                self.inverse(ds)
            })
            .collect()
    }

    /// `sum_k d_k flux_k`.
    pub fn divergence(&self, flux: &[Vec<f64>]) -> Vec<f64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (axis, f) in flux.iter().enumerate() {
            let s = self.forward(f);
            for (k, (a, c)) in acc.iter_mut().zip(s).enumerate() {
                *a += c * Complex64::new(0.0, 2.0 * PI * self.wavenumber[self.axis_index(k, axis)]);
            }
        }
        self.inverse(acc)
    }

    /// Applies `1 / (scale |2 pi k|^2)` in Fourier space, zero on the kernel.
    pub fn inverse_laplacian(&self, values: &[f64], scale: f64) -> Vec<f64> {
        let mut s = self.forward(values);
        for (k, c) in s.iter_mut().enumerate() {
            if self.is_kernel(k) {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            let sym: f64 = (0..self.grid.d)
                .map(|a| (2.0 * PI * self.wavenumber[self.axis_index(k, a)]).powi(2))
                .sum();
            *c /= scale * sym;
        }
        self.inverse(s)
    }
}
