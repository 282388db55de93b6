//! n-dimensional FFT plumbing on top of rustfft, plus Fourier-multiplier
//! application for the spectral operator realizations.
//!
//! Frequencies follow the convention `xi_k = k / (2L)` per axis with k
//! wrapped to -N/2..N/2-1, matching the transform `\int f e^{-2 pi i x xi}`.
//! The grid phase factors cancel between the forward and inverse passes, so
//! multipliers act directly on raw DFT bins.

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, MAX_DIM};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

/// One Fourier mode of a grid: signed frequency components and Nyquist flags.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub xi: [f64; MAX_DIM],
    pub nyquist: [bool; MAX_DIM],
    pub n: usize,
}

impl Mode {
    pub fn xi_norm(&self) -> f64 {
        self.xi[..self.n].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.xi[..self.n].iter().all(|&v| v == 0.0)
    }
}

/// Apply a 1-d FFT along every axis of the row-major buffer.
pub(crate) fn fft_all_axes(grid: Grid, data: &mut [Complex64], inverse: bool) {
    let npts = grid.npts;
    let fft = plan(npts, inverse);
    let total = grid.len();
    let mut scratch = vec![Complex64::default(); npts];
    for axis in 0..grid.n {
        // stride between consecutive entries along `axis`
        let stride = npts.pow((grid.n - 1 - axis) as u32);
        let lines = total / npts;
        for line in 0..lines {
            // base index of this line: distribute `line` over the other axes
            let block = line / stride;
            let offset = line % stride;
            let base = block * stride * npts + offset;
            for (j, slot) in scratch.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process(&mut scratch);
            for (j, slot) in scratch.iter().enumerate() {
                data[base + j * stride] = *slot;
            }
        }
    }
}

/// Signed frequency for DFT bin k: k/(2L) for k < N/2, (k-N)/(2L) above.
fn signed_freq(k: usize, npts: usize, half_extent: f64) -> (f64, bool) {
    let nyq = npts / 2;
    let signed = if k < nyq {
        k as i64
    } else {
        k as i64 - npts as i64
    };
    (signed as f64 / (2.0 * half_extent), k == nyq)
}

pub fn forward(field: &ScalarField) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = field
        .values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_all_axes(field.grid, &mut data, false);
    data
}

/// Inverse transform, normalization 1/len, returning the real part after
/// checking the imaginary residue stays below 1e-12 of the field amplitude.
pub fn inverse_real(grid: Grid, mut data: Vec<Complex64>) -> Result<ScalarField> {
    fft_all_axes(grid, &mut data, true);
    let scale = 1.0 / grid.len() as f64;
    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    for v in &data {
        max_re = max_re.max((v.re * scale).abs());
        max_im = max_im.max((v.im * scale).abs());
    }
    if max_im > 1e-12 * max_re.max(1e-300) && max_im > 1e-300 {
        return Err(Error::Op(format!(
            "spectral output has imaginary residue {max_im:.3e} vs amplitude {max_re:.3e}"
        )));
    }
    let values = data.iter().map(|v| v.re * scale).collect();
    ScalarField::new(grid, values)
}

pub fn modes(grid: Grid) -> impl Iterator<Item = (usize, Mode)> {
    let n = grid.n;
    let npts = grid.npts;
    let half = grid.half_extent;
    (0..grid.len()).map(move |flat| {
        let mut rem = flat;
        let mut xi = [0.0; MAX_DIM];
        let mut nyquist = [false; MAX_DIM];
        for a in (0..n).rev() {
            let k = rem % npts;
            rem /= npts;
            let (f, ny) = signed_freq(k, npts, half);
            xi[a] = f;
            nyquist[a] = ny;
        }
        (flat, Mode { xi, nyquist, n })
    })
}

/// Apply a single Fourier multiplier to a real field.
pub fn apply_multiplier<F>(field: &ScalarField, multiplier: F) -> Result<ScalarField>
where
    F: Fn(&Mode) -> Complex64,
{
    if !field.grid.periodic {
        return Err(Error::Op("spectral operators need a periodic grid".into()));
    }
    let mut data = forward(field);
    for (flat, mode) in modes(field.grid) {
        data[flat] *= multiplier(&mode);
    }
    inverse_real(field.grid, data)
}

/// Precomputed multiplier table for repeated application inside solvers.
pub struct MultiplierTable {
    pub grid: Grid,
    pub symbol: Vec<Complex64>,
}

impl MultiplierTable {
    pub fn build<F>(grid: Grid, multiplier: F) -> Self
    where
        F: Fn(&Mode) -> Complex64,
    {
        let symbol = modes(grid).map(|(_, m)| multiplier(&m)).collect();
        MultiplierTable { grid, symbol }
    }
}

/// One forward transform, several multiplier channels out.
pub fn apply_stack(field: &ScalarField, tables: &[&MultiplierTable]) -> Result<Vec<ScalarField>> {
    let spectrum = forward(field);
    tables
        .iter()
        .map(|t| {
            let data: Vec<Complex64> = spectrum.iter().zip(&t.symbol).map(|(v, s)| v * s).collect();
            inverse_real(field.grid, data)
        })
        .collect()
}

/// Adjoint of [`apply_stack`]: conj-multiplier per channel, summed.
pub fn apply_stack_adjoint(
    channels: &[ScalarField],
    tables: &[&MultiplierTable],
) -> Result<ScalarField> {
    assert_eq!(channels.len(), tables.len());
    let grid = channels[0].grid;
    let mut acc = vec![Complex64::default(); grid.len()];
    for (field, table) in channels.iter().zip(tables) {
        let spectrum = forward(field);
        for ((a, v), s) in acc.iter_mut().zip(&spectrum).zip(&table.symbol) {
            *a += v * s.conj();
        }
    }
    inverse_real(grid, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TestFamily;

    #[test]
    fn identity_multiplier_round_trips() {
        let g = Grid::new(2, 32, 8.0, true).unwrap();
        let f = crate::grid::sample(&TestFamily::gaussian(1.0), g).unwrap();
        let back = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        let err = f
            .values
            .iter()
            .zip(&back.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "round-trip error {err}");
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let g = Grid::new(1, 64, std::f64::consts::PI, true).unwrap();
        // sin(x) has period 2*pi = box length, so xi = 1/(2L) resolves it exactly.
        let f = ScalarField::from_fn(g, |x| x[0].sin()).unwrap();
        let df = apply_multiplier(&f, |m| {
            if m.nyquist[0] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * std::f64::consts::PI * m.xi[0])
            }
        })
        .unwrap();
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!((df.values[i] - x.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn nonperiodic_grid_rejected() {
        let g = Grid::new(1, 16, 4.0, false).unwrap();
        let f = ScalarField::zeros(g);
        assert!(apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).is_err());
    }
}
