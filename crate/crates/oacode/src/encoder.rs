//! Code generation: message bits to data unit, mirror-periodic prototype,
//! and adaptive blending into a background image.
//!
//! The prototype matrix is built by mirror-tiling the data unit with period
//! twice the unit side so that every unit corner is an exact point-symmetry
//! center on the integer pixel grid, and the unit immediately up-left of the
//! global center is the unflipped (state 0) data unit. The decoder leans on
//! both properties.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{bipolar_chessboard, mask_matrix, CodeParams, MIN_UNITS_PER_AXIS};
use crate::matrix::{BipolarMatrix, BitMatrix, GrayImage, RealMatrix};

/// A masked spread-spectrum block carrying the full message bit matrix.
#[derive(Debug, Clone)]
pub struct DataUnit {
    pub matrix: BipolarMatrix,
    /// Orientation tag; freshly generated units are state 0.
    pub state: u8,
}

/// The mirror-tiled, centrally cropped bipolar signal blended into the
/// background image.
#[derive(Debug, Clone)]
pub struct PrototypeMatrix {
    pub matrix: BipolarMatrix,
    pub unit_side: usize,
    /// Global symmetry center (row, col), a data-unit corner.
    pub center: (usize, usize),
}

/// Planar RGB image with real-valued samples.
#[derive(Debug, Clone)]
pub struct ColorImage {
    pub r: RealMatrix,
    pub g: RealMatrix,
    pub b: RealMatrix,
}

impl ColorImage {
    pub fn rows(&self) -> usize {
        self.r.rows()
    }

    pub fn cols(&self) -> usize {
        self.r.cols()
    }

    pub fn new(r: RealMatrix, g: RealMatrix, b: RealMatrix) -> Result<Self> {
        if r.rows() != g.rows()
            || r.rows() != b.rows()
            || r.cols() != g.cols()
            || r.cols() != b.cols()
        {
            return Err(Error::InvalidArgument("RGB planes differ in shape".into()));
        }
        Ok(Self { r, g, b })
    }
}

/// BT.601 full-range luma/chroma weights, pinned in FORMAT.md.
const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;

/// Convert RGB planes to full-range YCbCr planes.
pub fn rgb_to_ycbcr(img: &ColorImage) -> (RealMatrix, RealMatrix, RealMatrix) {
    let (rows, cols) = (img.rows(), img.cols());
    let mut y = RealMatrix::zeros(rows, cols);
    let mut cb = RealMatrix::zeros(rows, cols);
    let mut cr = RealMatrix::zeros(rows, cols);
    for rr in 0..rows {
        for cc in 0..cols {
            let (r, g, b) = (img.r.get(rr, cc), img.g.get(rr, cc), img.b.get(rr, cc));
            let yy = KR * r + KG * g + KB * b;
            y.set(rr, cc, yy);
            cb.set(rr, cc, 128.0 + (b - yy) * 0.5 / (1.0 - KB));
            cr.set(rr, cc, 128.0 + (r - yy) * 0.5 / (1.0 - KR));
        }
    }
    (y, cb, cr)
}

/// Convert full-range YCbCr planes back to RGB planes (not clamped).
pub fn ycbcr_to_rgb(y: &RealMatrix, cb: &RealMatrix, cr: &RealMatrix) -> ColorImage {
    let (rows, cols) = (y.rows(), y.cols());
    let mut out = ColorImage {
        r: RealMatrix::zeros(rows, cols),
        g: RealMatrix::zeros(rows, cols),
        b: RealMatrix::zeros(rows, cols),
    };
    for rr in 0..rows {
        for cc in 0..cols {
            let yy = y.get(rr, cc);
            let cbv = cb.get(rr, cc) - 128.0;
            let crv = cr.get(rr, cc) - 128.0;
            let r = yy + crv * (1.0 - KR) / 0.5;
            let b = yy + cbv * (1.0 - KB) / 0.5;
            let g = (yy - KR * r - KB * b) / KG;
            out.r.set(rr, cc, r);
            out.g.set(rr, cc, g);
            out.b.set(rr, cc, b);
        }
    }
    out
}

/// Reshape a byte message into the square bit matrix, row-major, most
/// significant bit first, zero-padded at the tail.
pub fn message_to_bit_matrix(message: &[u8], bit_side: usize) -> Result<BitMatrix> {
    let capacity_bytes = bit_side * bit_side / 8;
    if message.len() > capacity_bytes {
        return Err(Error::Capacity(format!(
            "message of {} bytes exceeds {} byte capacity",
            message.len(),
            capacity_bytes
        )));
    }
    let mut m = BitMatrix::zeros(bit_side);
    for (i, &byte) in message.iter().enumerate() {
        for bit in 0..8 {
            let idx = i * 8 + bit;
            m.set(idx / bit_side, idx % bit_side, (byte >> (7 - bit)) & 1);
        }
    }
    Ok(m)
}

/// Spread every message bit over one module: bit 1 becomes `+p`, bit 0
/// becomes `-p`.
pub fn spread_spectrum_encode(m: &BitMatrix, module: &BipolarMatrix) -> BipolarMatrix {
    let p_side = module.rows();
    let side = m.side() * p_side;
    BipolarMatrix::from_fn(side, side, |r, c| {
        let sign: i8 = if m.get(r / p_side, c / p_side) == 1 {
            1
        } else {
            -1
        };
        sign * module.get(r % p_side, c % p_side)
    })
}

/// Mask the data matrix element-wise. Involutive: masking twice restores the
/// input.
pub fn apply_mask(data: &BipolarMatrix, mask: &BipolarMatrix) -> Result<DataUnit> {
    Ok(DataUnit {
        matrix: data.hadamard(mask)?,
        state: 0,
    })
}

/// Generate the state-0 data unit for a message under the given parameters.
pub fn build_data_unit(message: &[u8], params: &CodeParams) -> Result<DataUnit> {
    let bits = message_to_bit_matrix(message, params.capacity.bit_side())?;
    let module = bipolar_chessboard(params.module.side())?;
    let spread = spread_spectrum_encode(&bits, &module);
    let mask = mask_matrix(params.mask_seed, params.unit_side())?;
    apply_mask(&spread, &mask)
}

/// Fold an offset from the global center into a data-unit index.
///
/// The tiling has period `2 * unit` along each axis; unit corners sit on the
/// lattice `center + k * unit` and are all point-symmetry centers.
#[inline]
pub fn mirror_fold(offset: i64, unit: usize) -> usize {
    let period = 2 * unit as i64;
    let d = offset.rem_euclid(period);
    ((d - unit as i64).unsigned_abs() as usize) % unit
}

/// Whether the tiling stretch with index `k` (stretches count away from the
/// global center, the one ending at the center being `-1`) holds an unflipped
/// copy of the unit along that axis.
#[inline]
pub fn stretch_is_forward(k: i64) -> bool {
    k.rem_euclid(2) == 1
}

/// Global-center pixel index for a crop side, both axes.
#[inline]
pub fn center_index(crop_side: usize) -> usize {
    (crop_side - 1) / 2
}

/// Mirror-tile the data unit and centrally crop to `crop_side`.
pub fn build_prototype(unit: &DataUnit, crop_side: usize) -> Result<PrototypeMatrix> {
    let l_u = unit.matrix.rows();
    if unit.matrix.cols() != l_u {
        return Err(Error::InvalidArgument("data unit must be square".into()));
    }
    if crop_side < MIN_UNITS_PER_AXIS * l_u {
        return Err(Error::Capacity(format!(
            "crop side {crop_side} px holds fewer than {MIN_UNITS_PER_AXIS} units of {l_u} px"
        )));
    }
    let g = center_index(crop_side) as i64;
    let matrix = BipolarMatrix::from_fn(crop_side, crop_side, |r, c| {
        unit.matrix.get(
            mirror_fold(r as i64 - g, l_u),
            mirror_fold(c as i64 - g, l_u),
        )
    });
    Ok(PrototypeMatrix {
        matrix,
        unit_side: l_u,
        center: (g as usize, g as usize),
    })
}

/// Blend the prototype into a grayscale background with adaptive intensity,
/// then clamp to [0, 255] and quantize to the 8-bit grid.
///
/// The adaptive term shifts the modulation toward mid-gray so that, for
/// lambda <= 127.5, the output never clips.
pub fn blend_adaptive(
    background: &GrayImage,
    prototype: &PrototypeMatrix,
    lambda: f64,
) -> Result<GrayImage> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "blend intensity must be positive".into(),
        ));
    }
    let p = &prototype.matrix;
    if background.rows() != p.rows() || background.cols() != p.cols() {
        return Err(Error::InvalidArgument(format!(
            "background {}x{} does not match prototype {}x{}",
            background.rows(),
            background.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let mut out = GrayImage::zeros(p.rows(), p.cols());
    for r in 0..p.rows() {
        for c in 0..p.cols() {
            let i = background.get(r, c);
            let v = i + lambda * (p.get(r, c) as f64 + 1.0 - 2.0 * i / 255.0);
            out.set(r, c, v);
        }
    }
    out.quantize_u8();
    Ok(out)
}

/// Blend into a color background: convert to YCbCr, blend the luma plane,
/// recombine with the untouched chroma planes.
pub fn blend_color(
    background: &ColorImage,
    prototype: &PrototypeMatrix,
    lambda: f64,
) -> Result<ColorImage> {
    let (y, cb, cr) = rgb_to_ycbcr(background);
    let blended = blend_adaptive(&y, prototype, lambda)?;
    Ok(ycbcr_to_rgb(&blended, &cb, &cr))
}

/// Full grayscale encode: resize the background to the crop side, build the
/// prototype for the message, blend.
pub fn encode_gray(
    message: &[u8],
    background: &GrayImage,
    params: &CodeParams,
    crop_side: usize,
    lambda: f64,
) -> Result<GrayImage> {
    let unit = build_data_unit(message, params)?;
    let prototype = build_prototype(&unit, crop_side)?;
    let resized = background.resize_bilinear(crop_side, crop_side);
    blend_adaptive(&resized, &prototype, lambda)
}

/// Full color encode; chroma planes pass through untouched.
pub fn encode_color(
    message: &[u8],
    background: &ColorImage,
    params: &CodeParams,
    crop_side: usize,
    lambda: f64,
) -> Result<ColorImage> {
    let unit = build_data_unit(message, params)?;
    let prototype = build_prototype(&unit, crop_side)?;
    let resized = ColorImage {
        r: background.r.resize_bilinear(crop_side, crop_side),
        g: background.g.resize_bilinear(crop_side, crop_side),
        b: background.b.resize_bilinear(crop_side, crop_side),
    };
    blend_color(&resized, &prototype, lambda)
}

/// Metadata describing one encode, recorded alongside the produced image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodeInfo {
    pub params: CodeParams,
    pub lambda: f64,
    pub crop_side: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{Capacity, Module, DEFAULT_MASK_SEED};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_bipolar(side: usize, seed: u64) -> BipolarMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BipolarMatrix::from_fn(side, side, |_, _| if rng.random::<bool>() { 1 } else { -1 })
    }

    #[test]
    fn message_fills_row_major_msb_first() {
        let m = message_to_bit_matrix(&[0b1010_0000], 32).unwrap();
        assert_eq!(m.get(0, 0), 1);
        assert_eq!(m.get(0, 1), 0);
        assert_eq!(m.get(0, 2), 1);
        assert_eq!(m.get(0, 3), 0);
        assert_eq!(m.get(0, 8), 0); // padding
    }

    #[test]
    fn message_capacity_bounds() {
        assert!(message_to_bit_matrix(&[0u8; 128], 32).is_ok());
        assert!(matches!(
            message_to_bit_matrix(&[0u8; 129], 32),
            Err(Error::Capacity(_))
        ));
        let empty = message_to_bit_matrix(&[], 32).unwrap();
        assert!(empty.as_bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn spread_single_bit_anchors() {
        let p = bipolar_chessboard(2).unwrap();
        let one = BitMatrix::from_bits(1, vec![1]).unwrap();
        assert_eq!(spread_spectrum_encode(&one, &p).as_slice(), &[-1, 1, 1, -1]);
        let zero = BitMatrix::from_bits(1, vec![0]).unwrap();
        assert_eq!(
            spread_spectrum_encode(&zero, &p).as_slice(),
            &[1, -1, -1, 1]
        );
    }

    #[test]
    fn spread_tiles_modules() {
        let p = bipolar_chessboard(3).unwrap();
        let m = BitMatrix::from_bits(32, vec![1; 32 * 32]).unwrap();
        let d = spread_spectrum_encode(&m, &p);
        assert_eq!(d.rows(), 96);
        for r in 0..96 {
            for c in 0..96 {
                assert_eq!(d.get(r, c), p.get(r % 3, c % 3));
            }
        }
    }

    #[test]
    fn mask_identity_and_involution() {
        let d = random_bipolar(16, 7);
        let all_plus = BipolarMatrix::from_fn(16, 16, |_, _| 1);
        assert_eq!(apply_mask(&d, &all_plus).unwrap().matrix, d);
        let k = random_bipolar(16, 8);
        let u = apply_mask(&d, &k).unwrap();
        assert_eq!(apply_mask(&u.matrix, &k).unwrap().matrix, d);
    }

    #[test]
    fn mask_shape_mismatch_rejected() {
        let d = random_bipolar(8, 1);
        let k = random_bipolar(9, 1);
        assert!(apply_mask(&d, &k).is_err());
    }

    #[test]
    fn mask_decorrelates_data() {
        // Seed-fixed Monte Carlo check of the masking contract.
        let d = random_bipolar(64, 21);
        let k = mask_matrix(99, 64).unwrap();
        let u = apply_mask(&d, &k).unwrap();
        let corr: f64 = u
            .matrix
            .as_slice()
            .iter()
            .zip(d.as_slice())
            .map(|(&a, &b)| (a as f64) * (b as f64))
            .sum::<f64>()
            / (64.0 * 64.0);
        assert!(corr.abs() < 0.1, "correlation {corr}");
    }

    #[test]
    fn prototype_is_point_symmetric_and_anchored() {
        let unit = DataUnit {
            matrix: random_bipolar(8, 3),
            state: 0,
        };
        let l_c = 83; // odd, not a multiple of the unit side
        let proto = build_prototype(&unit, l_c).unwrap();
        let (gr, gc) = proto.center;
        assert_eq!((gr, gc), (41, 41));
        // exact point symmetry about the center for every offset where both
        // mirrored positions are inside the crop
        let g = gr as i64;
        let n = l_c as i64;
        for dr in -g..=(n - 1 - g) {
            for dc in -g..=(n - 1 - g) {
                if g - dr < 0 || g - dr >= n || g - dc < 0 || g - dc >= n {
                    continue;
                }
                assert_eq!(
                    proto.matrix.get((g + dr) as usize, (g + dc) as usize),
                    proto.matrix.get((g - dr) as usize, (g - dc) as usize),
                    "asymmetry at offset ({dr},{dc})"
                );
            }
        }
        // the unit immediately up-left of the center is state-0 U
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(
                    proto.matrix.get(gr - 8 + r, gc - 8 + c),
                    unit.matrix.get(r, c),
                    "up-left block mismatch at ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn prototype_has_unit_pitch_center_lattice() {
        let unit = DataUnit {
            matrix: random_bipolar(6, 11),
            state: 0,
        };
        let l_c = 64;
        let proto = build_prototype(&unit, l_c).unwrap();
        let g = proto.center.0 as i64;
        // every lattice point center + k*unit is a point-symmetry center
        for k in -3i64..=3 {
            for l in -3i64..=3 {
                let cr = g + k * 6;
                let cc = g + l * 6;
                if !(0..l_c as i64).contains(&cr) || !(0..l_c as i64).contains(&cc) {
                    continue;
                }
                for dr in -4i64..=4 {
                    for dc in -4i64..=4 {
                        let (ar, ac) = (cr + dr, cc + dc);
                        let (br, bc) = (cr - dr, cc - dc);
                        if [ar, ac, br, bc]
                            .iter()
                            .all(|&v| (0..l_c as i64).contains(&v))
                        {
                            assert_eq!(
                                proto.matrix.get(ar as usize, ac as usize),
                                proto.matrix.get(br as usize, bc as usize),
                                "lattice point ({cr},{cc}) offset ({dr},{dc})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prototype_rejects_small_crop() {
        let unit = DataUnit {
            matrix: random_bipolar(8, 3),
            state: 0,
        };
        assert!(matches!(
            build_prototype(&unit, 39),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn blend_anchor_values() {
        let unit = build_data_unit(b"x", &CodeParams::default()).unwrap();
        let proto = build_prototype(&unit, 480).unwrap();
        let lambda = 20.0;

        let mid = GrayImage::from_fn(480, 480, |_, _| 127.5);
        let out = blend_adaptive(&mid, &proto, lambda).unwrap();
        for r in 0..480 {
            for c in 0..480 {
                let expect = (127.5 + lambda * proto.matrix.get(r, c) as f64).round();
                assert_eq!(out.get(r, c), expect);
            }
        }

        let dark = GrayImage::zeros(480, 480);
        let out = blend_adaptive(&dark, &proto, lambda).unwrap();
        for (r, c) in [(0usize, 0usize), (7, 13), (479, 479)] {
            if proto.matrix.get(r, c) == -1 {
                assert_eq!(out.get(r, c), 0.0);
            }
        }

        let bright = GrayImage::from_fn(480, 480, |_, _| 255.0);
        let out = blend_adaptive(&bright, &proto, lambda).unwrap();
        for (r, c) in [(0usize, 0usize), (7, 13), (479, 479)] {
            if proto.matrix.get(r, c) == 1 {
                assert_eq!(out.get(r, c), 255.0);
            }
        }
    }

    #[test]
    fn blend_never_clips_for_moderate_lambda() {
        let unit = build_data_unit(b"clip", &CodeParams::default()).unwrap();
        let proto = build_prototype(&unit, 480).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bg = GrayImage::from_fn(480, 480, |_, _| rng.random::<f64>() * 255.0);
        for r in 0..480 {
            for c in 0..480 {
                let i = bg.get(r, c);
                let p = proto.matrix.get(r, c) as f64;
                let v = i + 20.0 * (p + 1.0 - 2.0 * i / 255.0);
                assert!((0.0..=255.0).contains(&v), "raw blend clipped: {v}");
            }
        }
    }

    #[test]
    fn color_blend_passes_chroma_through() {
        let unit = build_data_unit(b"rgb", &CodeParams::default()).unwrap();
        let proto = build_prototype(&unit, 480).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // keep channels close so blended YCbCr stays inside the RGB gamut
        let base = RealMatrix::from_fn(480, 480, |_, _| 60.0 + rng.random::<f64>() * 130.0);
        let img = ColorImage {
            r: base.clone(),
            g: base.scale(1.05),
            b: base.scale(0.95),
        };
        let (_, cb_in, cr_in) = rgb_to_ycbcr(&img);
        let out = blend_color(&img, &proto, 20.0).unwrap();
        let (_, cb_out, cr_out) = rgb_to_ycbcr(&out);
        for r in (0..480).step_by(37) {
            for c in (0..480).step_by(41) {
                assert!((cb_in.get(r, c) - cb_out.get(r, c)).abs() < 1e-9);
                assert!((cr_in.get(r, c) - cr_out.get(r, c)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn color_blend_of_gray_content_matches_gray_blend() {
        let unit = build_data_unit(b"gray", &CodeParams::default()).unwrap();
        let proto = build_prototype(&unit, 480).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let base = RealMatrix::from_fn(480, 480, |_, _| 30.0 + rng.random::<f64>() * 195.0);
        let img = ColorImage {
            r: base.clone(),
            g: base.clone(),
            b: base.clone(),
        };
        let gray_out = blend_adaptive(&base, &proto, 20.0).unwrap();
        let color_out = blend_color(&img, &proto, 20.0).unwrap();
        let (y_out, _, _) = rgb_to_ycbcr(&color_out);
        for r in (0..480).step_by(29) {
            for c in (0..480).step_by(31) {
                assert!((y_out.get(r, c) - gray_out.get(r, c)).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn zero_lambda_is_rejected_but_roundtrip_holds_via_conversion() {
        let img = ColorImage {
            r: RealMatrix::from_fn(8, 8, |r, c| (r * 8 + c) as f64),
            g: RealMatrix::from_fn(8, 8, |r, c| (r * 8 + c) as f64 * 0.5),
            b: RealMatrix::from_fn(8, 8, |r, c| 255.0 - (r * 8 + c) as f64),
        };
        let (y, cb, cr) = rgb_to_ycbcr(&img);
        let back = ycbcr_to_rgb(&y, &cb, &cr);
        for r in 0..8 {
            for c in 0..8 {
                assert!((back.r.get(r, c) - img.r.get(r, c)).abs() < 1e-9);
                assert!((back.g.get(r, c) - img.g.get(r, c)).abs() < 1e-9);
                assert!((back.b.get(r, c) - img.b.get(r, c)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn encode_defaults_produce_expected_size() {
        let bg = GrayImage::from_fn(512, 512, |r, c| ((r + c) % 256) as f64);
        let params = CodeParams::new(Capacity::C0, Module::M1, DEFAULT_MASK_SEED);
        let img = encode_gray(b"hello", &bg, &params, 640, 20.0).unwrap();
        assert_eq!((img.rows(), img.cols()), (640, 640));
        assert!(img.as_slice().iter().all(|&v| (0.0..=255.0).contains(&v)));
    }
}
