//! Dense 2D matrix types used across the codec.
//!
//! Three value domains show up in the pipeline: exact bipolar matrices over
//! {-1, +1} (spread modules, masks, data units, prototypes), bit matrices over
//! {0, 1} (message payloads), and real-valued matrices (images, estimated
//! prototypes, symmetry maps). All are stored row-major. Geometric helpers use
//! image conventions: `x` runs along columns, `y` along rows.

use crate::error::{Error, Result};

/// Real-valued row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Grayscale image: a real matrix of luminance samples, nominally in [0, 255].
///
/// Quantization to the 8-bit grid happens where an operation's contract says
/// so ([`crate::encoder::blend_adaptive`]) and at PNG I/O boundaries, not on
/// every intermediate value.
pub type GrayImage = RealMatrix;

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn variance(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Crop the rectangle whose top-left corner is (r0, c0).
    pub fn crop(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::InvalidArgument(format!(
                "crop {}x{}+{}+{} exceeds {}x{}",
                rows, cols, r0, c0, self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            let src = &self.data[(r0 + r) * self.cols + c0..(r0 + r) * self.cols + c0 + cols];
            out.data[r * cols..(r + 1) * cols].copy_from_slice(src);
        }
        Ok(out)
    }

    pub fn flip_horizontal(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, self.cols - 1 - c))
    }

    pub fn flip_vertical(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(self.rows - 1 - r, c))
    }

    pub fn rotate180(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            self.get(self.rows - 1 - r, self.cols - 1 - c)
        })
    }

    /// Rotate 90 degrees clockwise.
    pub fn rotate90(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(self.rows - 1 - c, r))
    }

    /// Rotate 270 degrees clockwise (90 counter-clockwise).
    pub fn rotate270(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, self.cols - 1 - r))
    }

    /// Bilinear sample at image coordinates (x along columns, y along rows).
    /// Out-of-bounds positions return 0.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        if !x.is_finite() || !y.is_finite() {
            return 0.0;
        }
        if x < 0.0 || y < 0.0 || x > (self.cols - 1) as f64 || y > (self.rows - 1) as f64 {
            return 0.0;
        }
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.cols - 1);
        let y1 = (y0 + 1).min(self.rows - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let v00 = self.get(y0, x0);
        let v01 = self.get(y0, x1);
        let v10 = self.get(y1, x0);
        let v11 = self.get(y1, x1);
        v00 * (1.0 - fx) * (1.0 - fy)
            + v01 * fx * (1.0 - fy)
            + v10 * (1.0 - fx) * fy
            + v11 * fx * fy
    }

    /// Resize with bilinear interpolation, mapping corner samples to corner
    /// samples so that a same-size resize is the identity.
    pub fn resize_bilinear(&self, rows: usize, cols: usize) -> Self {
        if rows == self.rows && cols == self.cols {
            return self.clone();
        }
        let sy = if rows > 1 {
            (self.rows - 1) as f64 / (rows - 1) as f64
        } else {
            0.0
        };
        let sx = if cols > 1 {
            (self.cols - 1) as f64 / (cols - 1) as f64
        } else {
            0.0
        };
        Self::from_fn(rows, cols, |r, c| {
            self.sample_bilinear(c as f64 * sx, r as f64 * sy)
        })
    }

    /// Sample an axis-aligned rectangle given by inclusive corner coordinates
    /// onto an `out_rows` x `out_cols` grid. Corner samples map to the exact
    /// corner coordinates, so an integer-aligned rectangle whose pixel count
    /// matches the output is copied exactly.
    pub fn sample_rect(
        &self,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        out_rows: usize,
        out_cols: usize,
    ) -> Self {
        let sy = if out_rows > 1 {
            (y1 - y0) / (out_rows - 1) as f64
        } else {
            0.0
        };
        let sx = if out_cols > 1 {
            (x1 - x0) / (out_cols - 1) as f64
        } else {
            0.0
        };
        Self::from_fn(out_rows, out_cols, |r, c| {
            self.sample_bilinear(x0 + c as f64 * sx, y0 + r as f64 * sy)
        })
    }

    /// Clamp to [0, 255] and round to the 8-bit grid, in place.
    pub fn quantize_u8(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 255.0).round();
        }
    }
}

/// Matrix over {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipolarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl BipolarMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i8) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                debug_assert!(v == 1 || v == -1, "bipolar elements must be +/-1");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "bipolar data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(
                "bipolar matrix elements must be +/-1".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    /// Element-wise product with another bipolar matrix of the same shape.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v as f64).collect(),
        }
    }

    /// Fraction of +1 elements.
    pub fn positive_fraction(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().filter(|&&v| v == 1).count() as f64 / self.data.len() as f64
    }

    /// Number of positions where the two matrices differ.
    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.data
            .iter()
            .zip(&other.data)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Square bit matrix holding the message payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    side: usize,
    bits: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(side: usize) -> Self {
        Self {
            side,
            bits: vec![0; side * side],
        }
    }

    pub fn from_bits(side: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != side * side {
            return Err(Error::InvalidArgument(format!(
                "bit count {} does not match side {}",
                bits.len(),
                side
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("bits must be 0 or 1".into()));
        }
        Ok(Self { side, bits })
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.bits[r * self.side + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: u8) {
        debug_assert!(b <= 1);
        self.bits[r * self.side + c] = b;
    }

    /// Row-major bit sequence.
    pub fn as_bits(&self) -> &[u8] {
        &self.bits
    }

    /// Pack the row-major bit sequence into bytes, most significant bit first.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b == 1 {
                out[i / 8] |= 1 << (7 - (i % 8));
            }
        }
        out
    }

    /// Number of differing bits between two equally sized matrices.
    pub fn bit_errors(&self, other: &Self) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_bilinear_is_exact_on_grid() {
        let m = RealMatrix::from_fn(4, 5, |r, c| (r * 10 + c) as f64);
        for r in 0..4 {
            for c in 0..5 {
                assert_eq!(m.sample_bilinear(c as f64, r as f64), m.get(r, c));
            }
        }
        // midpoint of a bilinear patch
        let v = m.sample_bilinear(0.5, 0.5);
        assert!((v - (0.0 + 1.0 + 10.0 + 11.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn sample_bilinear_out_of_bounds_is_zero() {
        let m = RealMatrix::from_fn(3, 3, |_, _| 7.0);
        assert_eq!(m.sample_bilinear(-0.01, 1.0), 0.0);
        assert_eq!(m.sample_bilinear(1.0, 2.01), 0.0);
    }

    #[test]
    fn resize_same_shape_is_identity() {
        let m = RealMatrix::from_fn(6, 7, |r, c| (r * 7 + c) as f64);
        assert_eq!(m.resize_bilinear(6, 7), m);
    }

    #[test]
    fn sample_rect_integer_aligned_copies_exactly() {
        let m = RealMatrix::from_fn(10, 10, |r, c| (r * 10 + c) as f64);
        let sub = m.sample_rect(2.0, 3.0, 5.0, 6.0, 4, 4);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(sub.get(r, c), m.get(3 + r, 2 + c));
            }
        }
    }

    #[test]
    fn rotations_compose() {
        let m = RealMatrix::from_fn(3, 4, |r, c| (r * 4 + c) as f64);
        assert_eq!(m.rotate90().rotate90(), m.rotate180());
        assert_eq!(m.rotate90().rotate270(), m);
        assert_eq!(m.flip_horizontal().flip_vertical(), m.rotate180());
    }

    #[test]
    fn bipolar_rejects_non_unit_values() {
        assert!(BipolarMatrix::from_vec(1, 2, vec![1, 0]).is_err());
        assert!(BipolarMatrix::from_vec(1, 2, vec![1, -1]).is_ok());
    }

    #[test]
    fn bit_matrix_packs_msb_first() {
        let mut m = BitMatrix::zeros(4);
        m.set(0, 0, 1); // bit index 0 -> 0x80 of byte 0
        m.set(0, 7 % 4, 1); // row 0 col 3 -> bit index 3
        let bytes = m.to_bytes();
        assert_eq!(bytes[0], 0b1001_0000);
    }
}
