//! Thin 2D FFT layer over rustfft with process-wide plan caching.

use std::sync::{Mutex, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

fn transpose(data: &[Complex<f64>], rows: usize, cols: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn fft2d(data: &mut Vec<Complex<f64>>, rows: usize, cols: usize, inverse: bool) {
    assert_eq!(data.len(), rows * cols);
    let row_fft = plan(cols, inverse);
    for r in 0..rows {
        row_fft.process(&mut data[r * cols..(r + 1) * cols]);
    }
    let mut t = transpose(data, rows, cols);
    let col_fft = plan(rows, inverse);
    for c in 0..cols {
        col_fft.process(&mut t[c * rows..(c + 1) * rows]);
    }
    *data = transpose(&t, cols, rows);
}

/// In-place unnormalized forward 2D FFT of a row-major buffer.
pub fn forward(data: &mut Vec<Complex<f64>>, rows: usize, cols: usize) {
    fft2d(data, rows, cols, false);
}

/// In-place inverse 2D FFT, normalized so that `inverse(forward(x)) == x`.
pub fn inverse(data: &mut Vec<Complex<f64>>, rows: usize, cols: usize) {
    fft2d(data, rows, cols, true);
    let n = (rows * cols) as f64;
    for v in data.iter_mut() {
        *v /= n;
    }
}

/// Copy real values into a zero-padded complex buffer of shape
/// `pad_rows` x `pad_cols` with the source block at the origin.
pub fn to_padded_complex(
    src: &[f64],
    rows: usize,
    cols: usize,
    pad_rows: usize,
    pad_cols: usize,
) -> Vec<Complex<f64>> {
    assert!(pad_rows >= rows && pad_cols >= cols);
    let mut out = vec![Complex::default(); pad_rows * pad_cols];
    for r in 0..rows {
        for c in 0..cols {
            out[r * pad_cols + c] = Complex::new(src[r * cols + c], 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_round_trip() {
        let rows = 6;
        let cols = 10;
        let src: Vec<f64> = (0..rows * cols).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut buf = to_padded_complex(&src, rows, cols, rows, cols);
        forward(&mut buf, rows, cols);
        inverse(&mut buf, rows, cols);
        for (a, b) in src.iter().zip(&buf) {
            assert!((a - b.re).abs() < 1e-12);
            assert!(b.im.abs() < 1e-12);
        }
    }

    #[test]
    fn forward_dc_bin_is_sum() {
        let src = vec![1.0; 12];
        let mut buf = to_padded_complex(&src, 3, 4, 3, 4);
        forward(&mut buf, 3, 4);
        assert!((buf[0].re - 12.0).abs() < 1e-12);
    }
}
