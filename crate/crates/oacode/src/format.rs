//! Format constants and the deterministic primitives encoder and decoder
//! must agree on.
//!
//! Everything here is pinned by `FORMAT.md` at the repository root: the
//! chessboard phase, the mask PRNG and its key layout, the capacity/module
//! tables, and the row-major bit order. Changing any of it breaks decoding
//! of previously produced codes.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BipolarMatrix;

/// Centimeters per inch, used by the display-size to pixel-size conversion.
pub const CM_PER_INCH: f64 = 2.54;

/// Default mask seed. Callers may override it, but encoder and decoder must
/// use the same value.
pub const DEFAULT_MASK_SEED: u64 = 0x0AC0_DE01;

/// Minimum number of data units along each axis of a well-formed code.
pub const MIN_UNITS_PER_AXIS: usize = 5;

/// Capacity version: side length of the square message bit matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacity {
    /// 32 x 32 = 1024 message bits.
    C0,
    /// 64 x 64 = 4096 message bits.
    C1,
}

impl Capacity {
    pub const ALL: [Capacity; 2] = [Capacity::C0, Capacity::C1];

    /// Side length of the message bit matrix.
    pub fn bit_side(self) -> usize {
        match self {
            Capacity::C0 => 32,
            Capacity::C1 => 64,
        }
    }

    /// Message payload in bits.
    pub fn bits(self) -> usize {
        self.bit_side() * self.bit_side()
    }

    pub fn index(self) -> usize {
        match self {
            Capacity::C0 => 0,
            Capacity::C1 => 1,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Capacity::C0),
            1 => Ok(Capacity::C1),
            _ => Err(Error::InvalidArgument(format!("unknown capacity {i}"))),
        }
    }
}

/// Spread-spectrum module version: side length of the chessboard module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    /// 2 x 2 chessboard.
    M0,
    /// 3 x 3 chessboard.
    M1,
    /// 4 x 4 chessboard.
    M2,
}

impl Module {
    pub const ALL: [Module; 3] = [Module::M0, Module::M1, Module::M2];

    pub fn side(self) -> usize {
        match self {
            Module::M0 => 2,
            Module::M1 => 3,
            Module::M2 => 4,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Module::M0 => 0,
            Module::M1 => 1,
            Module::M2 => 2,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Module::M0),
            1 => Ok(Module::M1),
            2 => Ok(Module::M2),
            _ => Err(Error::InvalidArgument(format!("unknown module {i}"))),
        }
    }
}

/// Everything the decoder must determine about a code without any position
/// detection pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Orientation class: 0 for 0/180 degree captures, 1 for 90/270.
    pub state: u8,
    pub capacity: Capacity,
    pub module: Module,
    pub mask_seed: u64,
}

impl CodeParams {
    pub fn new(capacity: Capacity, module: Module, mask_seed: u64) -> Self {
        Self {
            state: 0,
            capacity,
            module,
            mask_seed,
        }
    }

    /// Data unit side in pixels: bit side times module side.
    pub fn unit_side(&self) -> usize {
        self.capacity.bit_side() * self.module.side()
    }
}

impl Default for CodeParams {
    fn default() -> Self {
        Self::new(Capacity::C0, Module::M1, DEFAULT_MASK_SEED)
    }
}

/// Physical display size specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeSpec {
    /// Displayed side length in centimeters.
    pub display_cm: f64,
    /// Display pixel density in pixels per inch.
    pub ppi: f64,
}

impl SizeSpec {
    pub fn new(display_cm: f64, ppi: f64) -> Result<Self> {
        if !(display_cm > 0.0) || !(ppi > 0.0) {
            return Err(Error::InvalidArgument(
                "display size and ppi must be positive".into(),
            ));
        }
        Ok(Self { display_cm, ppi })
    }

    /// Cropping side in pixels for this physical size.
    pub fn crop_side(&self) -> usize {
        crop_size(self.display_cm, self.ppi).expect("validated at construction")
    }

    /// Check that the crop accommodates at least the minimum unit lattice for
    /// the given parameters.
    pub fn validate_for(&self, params: &CodeParams) -> Result<()> {
        let l_c = self.crop_side();
        let needed = MIN_UNITS_PER_AXIS * params.unit_side();
        if l_c < needed {
            return Err(Error::Capacity(format!(
                "crop side {l_c} px cannot hold {MIN_UNITS_PER_AXIS}x{MIN_UNITS_PER_AXIS} units \
                 of {} px (needs {needed} px)",
                params.unit_side()
            )));
        }
        Ok(())
    }
}

/// The spread-spectrum module: +/-1 alternating like a chessboard with the
/// top-left element -1.
pub fn bipolar_chessboard(side: usize) -> Result<BipolarMatrix> {
    if !(2..=4).contains(&side) {
        return Err(Error::UnsupportedModule(side));
    }
    Ok(BipolarMatrix::from_fn(side, side, |r, c| {
        if (r + c) % 2 == 0 {
            -1
        } else {
            1
        }
    }))
}

/// Deterministic mask matrix for a (seed, side) pair.
///
/// The generator is the ChaCha8 stream keyed with the seed in little-endian
/// order in the first 8 key bytes (remaining key bytes zero, stream and
/// counter zero). Each element consumes one byte in row-major order; the
/// element is +1 when the byte is odd.
pub fn mask_matrix(seed: u64, side: usize) -> Result<BipolarMatrix> {
    if side == 0 {
        return Err(Error::InvalidArgument("mask side must be positive".into()));
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut bytes = vec![0u8; side * side];
    rng.fill_bytes(&mut bytes);
    let data = bytes
        .into_iter()
        .map(|b| if b & 1 == 1 { 1i8 } else { -1i8 })
        .collect();
    BipolarMatrix::from_vec(side, side, data)
}

/// Cropping side in pixels for a displayed size in centimeters at the given
/// pixel density: round(display_cm * ppi / 2.54).
pub fn crop_size(display_cm: f64, ppi: f64) -> Result<usize> {
    if !(display_cm > 0.0) || !(ppi > 0.0) {
        return Err(Error::InvalidArgument(
            "display size and ppi must be positive".into(),
        ));
    }
    Ok((display_cm * ppi / CM_PER_INCH).round() as usize)
}

/// Largest supported message capacity in bits for a crop side, under the
/// minimum lattice of 5x5 units and the smallest (2 px) module.
pub fn max_capacity_bits(crop_side: usize) -> Result<usize> {
    let fits = |cap: Capacity| {
        MIN_UNITS_PER_AXIS * cap.bit_side() * Module::M0.side() <= crop_side
    };
    Capacity::ALL
        .iter()
        .rev()
        .find(|&&c| fits(c))
        .map(|c| c.bits())
        .ok_or_else(|| {
            Err::<usize, _>(Error::Capacity(format!(
                "crop side {crop_side} px is below the minimum decodable size"
            )))
            .unwrap_err()
        })
}
