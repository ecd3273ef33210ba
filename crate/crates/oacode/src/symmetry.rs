//! Prototype estimation and symmetry-peak extraction from a captured image.
//!
//! The embedded prototype looks like zero-mean noise at module scale, so it
//! is separated from the background with a local mean/variance filter. Its
//! point-symmetry centers are then scored by the auto-convolution map
//! `S(i,j) = sum_{x,y} A(i-x,j-y) A(i+x,j+y)`, computed in the frequency
//! domain after zero-padding to double size; `S` is the even-index
//! decimation of that auto-convolution. An adaptive threshold finally turns
//! `S` into a peaks map with slightly more than the expected number of
//! unit-corner candidates.

use crate::error::{Error, Result};
use crate::fft;
use crate::matrix::{GrayImage, RealMatrix};

/// Boxcar window used to estimate local statistics of the capture; larger
/// than any spread module so the prototype reads as noise at that scale.
pub const DEFAULT_ESTIMATE_WINDOW: usize = 9;

/// Variance guard so flat patches estimate to zero instead of blowing up.
const VARIANCE_EPS: f64 = 1e-6;

/// Expected minimum number of symmetry centers in a well-formed code.
pub const DEFAULT_PEAK_TARGET: usize = 25;

/// Per-pixel symmetry score, same shape as the estimated prototype.
#[derive(Debug, Clone)]
pub struct SymmetryMap {
    pub values: RealMatrix,
}

/// Binarized symmetry map: one pixel per detected peak.
#[derive(Debug, Clone)]
pub struct PeaksMap {
    rows: usize,
    cols: usize,
    /// Peak centroids as (row, col), integer precision.
    peaks: Vec<(usize, usize)>,
    /// Threshold coefficient that produced this map.
    beta: f64,
}

impl PeaksMap {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.peaks
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Render the map as a binary matrix (1.0 at peak pixels).
    pub fn to_matrix(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.rows, self.cols);
        for &(r, c) in &self.peaks {
            m.set(r, c, 1.0);
        }
        m
    }

    /// Centroid of all peaks as (row, col).
    pub fn centroid(&self) -> (f64, f64) {
        let n = self.peaks.len().max(1) as f64;
        let (sr, sc) = self
            .peaks
            .iter()
            .fold((0.0, 0.0), |(ar, ac), &(r, c)| (ar + r as f64, ac + c as f64));
        (sr / n, sc / n)
    }
}

/// Local boxcar mean and variance with border-clipped windows.
pub fn local_mean_variance(m: &RealMatrix, window: usize) -> (RealMatrix, RealMatrix) {
    assert!(window >= 1 && window % 2 == 1, "window must be odd");
    let (rows, cols) = (m.rows(), m.cols());
    let half = window / 2;

    // summed-area tables of values and squares, (rows+1) x (cols+1)
    let w = cols + 1;
    let mut sat = vec![0.0f64; (rows + 1) * w];
    let mut sat_sq = vec![0.0f64; (rows + 1) * w];
    for r in 0..rows {
        let mut run = 0.0;
        let mut run_sq = 0.0;
        for c in 0..cols {
            let v = m.get(r, c);
            run += v;
            run_sq += v * v;
            sat[(r + 1) * w + c + 1] = sat[r * w + c + 1] + run;
            sat_sq[(r + 1) * w + c + 1] = sat_sq[r * w + c + 1] + run_sq;
        }
    }
    let rect = |tab: &[f64], r0: usize, c0: usize, r1: usize, c1: usize| {
        tab[r1 * w + c1] - tab[r0 * w + c1] - tab[r1 * w + c0] + tab[r0 * w + c0]
    };

    let mut mean = RealMatrix::zeros(rows, cols);
    let mut var = RealMatrix::zeros(rows, cols);
    for r in 0..rows {
        let r0 = r.saturating_sub(half);
        let r1 = (r + half + 1).min(rows);
        for c in 0..cols {
            let c0 = c.saturating_sub(half);
            let c1 = (c + half + 1).min(cols);
            let n = ((r1 - r0) * (c1 - c0)) as f64;
            let s = rect(&sat, r0, c0, r1, c1);
            let sq = rect(&sat_sq, r0, c0, r1, c1);
            let mu = s / n;
            mean.set(r, c, mu);
            var.set(r, c, (sq / n - mu * mu).max(0.0));
        }
    }
    (mean, var)
}

/// Estimate the embedded prototype from a grayscale capture:
/// `(O - mu) / sigma^2` with local statistics over `window`.
///
/// Flat regions estimate to zero; a fully constant capture yields an all-zero
/// (low-energy) estimate that fails downstream peak detection.
pub fn estimate_prototype(capture: &GrayImage, window: usize) -> Result<RealMatrix> {
    if window % 2 == 0 || window < 3 {
        return Err(Error::InvalidArgument(
            "estimation window must be odd and >= 3".into(),
        ));
    }
    if capture.rows() <= window || capture.cols() <= window {
        return Err(Error::InvalidArgument(format!(
            "capture {}x{} not larger than window {}",
            capture.rows(),
            capture.cols(),
            window
        )));
    }
    let (mean, var) = local_mean_variance(capture, window);
    let mut out = RealMatrix::zeros(capture.rows(), capture.cols());
    for r in 0..capture.rows() {
        for c in 0..capture.cols() {
            let num = capture.get(r, c) - mean.get(r, c);
            out.set(r, c, num / (var.get(r, c) + VARIANCE_EPS));
        }
    }
    Ok(out)
}

/// Frequency-domain symmetry map: auto-convolution of the zero-padded input,
/// decimated back to the input shape.
pub fn symmetry_map(a: &RealMatrix) -> SymmetryMap {
    let (rows, cols) = (a.rows(), a.cols());
    let (pr, pc) = (rows * 2, cols * 2);
    let mut buf = fft::to_padded_complex(a.as_slice(), rows, cols, pr, pc);
    fft::forward(&mut buf, pr, pc);
    for v in buf.iter_mut() {
        *v = *v * *v;
    }
    fft::inverse(&mut buf, pr, pc);
    // S(i, j) = T(2i, 2j): half-integer centers are discarded by design
    let values = RealMatrix::from_fn(rows, cols, |r, c| buf[(2 * r) * pc + 2 * c].re);
    SymmetryMap { values }
}

/// Maximum side accepted by the O(n^4) spatial-domain oracle.
pub const BRUTE_FORCE_LIMIT: usize = 64;

/// Spatial-domain evaluation of the symmetry definition, with out-of-range
/// terms treated as zero. Test oracle for [`symmetry_map`]; refuses inputs
/// larger than [`BRUTE_FORCE_LIMIT`].
pub fn symmetry_map_bruteforce(a: &RealMatrix) -> Result<SymmetryMap> {
    let (rows, cols) = (a.rows(), a.cols());
    if rows > BRUTE_FORCE_LIMIT || cols > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "brute-force symmetry limited to {BRUTE_FORCE_LIMIT}x{BRUTE_FORCE_LIMIT}, got {rows}x{cols}"
        )));
    }
    let values = RealMatrix::from_fn(rows, cols, |i, j| {
        let xm = i.min(rows - 1 - i) as i64;
        let ym = j.min(cols - 1 - j) as i64;
        let mut acc = 0.0;
        for x in -xm..=xm {
            let a0 = (i as i64 - x) as usize;
            let a1 = (i as i64 + x) as usize;
            for y in -ym..=ym {
                let b0 = (j as i64 - y) as usize;
                let b1 = (j as i64 + y) as usize;
                acc += a.get(a0, b0) * a.get(a1, b1);
            }
        }
        acc
    });
    Ok(SymmetryMap { values })
}

/// Number of extra components tolerated above the target before the
/// threshold is considered too loose.
const PEAK_BAND: usize = 15;

/// Binarize the symmetry map with the adaptive peaks filter
/// `S > mu_S + beta * sigma^2_S` (local statistics), walking `beta` until the
/// connected-component count lands slightly above `target`. Components are
/// collapsed to their centroids.
pub fn peaks_map(s: &SymmetryMap, target: usize) -> Result<PeaksMap> {
    if target < DEFAULT_PEAK_TARGET {
        return Err(Error::InvalidArgument(format!(
            "peak target {target} below the minimum lattice of {DEFAULT_PEAK_TARGET}"
        )));
    }
    let m = &s.values;
    let (rows, cols) = (m.rows(), m.cols());
    let stats_window = {
        let w = (rows.min(cols) / 6).max(31);
        if w % 2 == 0 {
            w + 1
        } else {
            w
        }
    };
    let (mean, var) = local_mean_variance(m, stats_window);

    // normalized score so each beta step is a single comparison pass
    let mut score = vec![0.0f64; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let z = (m.get(r, c) - mean.get(r, c)) / (var.get(r, c) + VARIANCE_EPS);
            score[r * cols + c] = if z.is_finite() { z } else { 0.0 };
        }
    }

    let lo = target + 1;
    let hi = target + PEAK_BAND;
    // a threshold admitting more than this fraction of pixels is noise, not
    // peaks, regardless of how the components merge
    let max_marked = (rows * cols) / 20;

    #[derive(Clone, Copy, PartialEq)]
    enum Verdict {
        TooMany,
        TooFew,
    }

    let classify = |beta: f64| -> (Option<Vec<(usize, usize)>>, Verdict) {
        let mask: Vec<bool> = score.iter().map(|&z| z > beta).collect();
        let marked = mask.iter().filter(|&&b| b).count();
        if marked > max_marked {
            return (None, Verdict::TooMany);
        }
        if marked < lo {
            return (None, Verdict::TooFew);
        }
        match components(&mask, rows, cols, hi + 1) {
            None => (None, Verdict::TooMany),
            Some(list) => {
                if list.len() > hi {
                    (None, Verdict::TooMany)
                } else if list.len() < lo {
                    (None, Verdict::TooFew)
                } else {
                    (Some(list), Verdict::TooFew)
                }
            }
        }
    };

    let mut beta = 3.0f64;
    let mut bracket_many: Option<f64> = None; // beta known too loose
    let mut bracket_few: Option<f64> = None; // beta known too tight
    for _ in 0..200 {
        let (found, verdict) = classify(beta);
        if let Some(peaks) = found {
            return Ok(PeaksMap {
                rows,
                cols,
                peaks,
                beta,
            });
        }
        match verdict {
            Verdict::TooMany => bracket_many = Some(beta),
            Verdict::TooFew => bracket_few = Some(beta),
        }
        beta = match (bracket_many, bracket_few) {
            (Some(a), Some(b)) => (a * b).sqrt(),
            _ => match verdict {
                Verdict::TooMany => beta * 1.1,
                Verdict::TooFew => beta / 1.1,
            },
        };
        if !beta.is_finite() || beta <= 0.0 {
            break;
        }
    }
    Err(Error::NoLattice(format!(
        "no threshold yields {lo}..={hi} symmetry peaks"
    )))
}

/// 8-connected components of a binary mask, collapsed to rounded centroids.
/// Returns `None` once more than `cap` components are seen.
fn components(
    mask: &[bool],
    rows: usize,
    cols: usize,
    cap: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut sum_r = 0usize;
        let mut sum_c = 0usize;
        let mut count = 0usize;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (r, c) = (idx / cols, idx % cols);
            sum_r += r;
            sum_c += c;
            count += 1;
            let r0 = r.saturating_sub(1);
            let r1 = (r + 1).min(rows - 1);
            let c0 = c.saturating_sub(1);
            let c1 = (c + 1).min(cols - 1);
            for nr in r0..=r1 {
                for nc in c0..=c1 {
                    let nidx = nr * cols + nc;
                    if mask[nidx] && !seen[nidx] {
                        seen[nidx] = true;
                        stack.push(nidx);
                    }
                }
            }
        }
        let cr = (sum_r as f64 / count as f64).round() as usize;
        let cc = (sum_c as f64 / count as f64).round() as usize;
        out.push((cr, cc));
        if out.len() > cap {
            return None;
        }
    }
    Some(out)
}

/// One-call helper: estimate the prototype and extract its peaks.
pub fn detect_peaks(capture: &GrayImage, target: usize) -> Result<(RealMatrix, PeaksMap)> {
    let estimate = estimate_prototype(capture, DEFAULT_ESTIMATE_WINDOW)?;
    let map = symmetry_map(&estimate);
    let peaks = peaks_map(&map, target)?;
    Ok((estimate, peaks))
}
