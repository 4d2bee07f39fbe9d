//! Binary symmetric channel models and counter-based noise.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::{erfc, erfc_inv};

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Gaussian tail `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_function`] on `(0, ½]`.
pub fn q_inverse(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // Newton polish: Q'(x) = −φ(x).
    for _ in 0..3 {
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density == 0.0 {
            break;
        }
        x += (q_function(x) - p) / density;
    }
    x
}

/// Eb/N0 in dB at which hard-decision BPSK has crossover `p` at rate `rate`:
/// `p = Q(√(2R·Eb/N0))`.
pub fn ebn0_db_for_p(p: f64, rate: f64) -> f64 {
    let x = q_inverse(p);
    10.0 * (x * x / (2.0 * rate)).log10()
}

pub fn p_for_ebn0_db(ebn0_db: f64, rate: f64) -> f64 {
    q_function((2.0 * rate * 10f64.powf(ebn0_db / 10.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelModel {
    Bsc {
        p: f64,
    },
    /// BPSK over AWGN followed by hard decisions.
    BiAwgnHard {
        ebn0_db: f64,
        rate: f64,
    },
}

impl ChannelModel {
    pub fn crossover(&self) -> f64 {
        match *self {
            ChannelModel::Bsc { p } => p,
            ChannelModel::BiAwgnHard { ebn0_db, rate } => p_for_ebn0_db(ebn0_db, rate),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ChannelModel::BiAwgnHard { rate, ebn0_db } = *self {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(Error::Channel(format!("rate {rate} outside (0, 1]")));
            }
            if !ebn0_db.is_finite() {
                return Err(Error::Channel("Eb/N0 must be finite".into()));
            }
        }
        let p = self.crossover();
        if !(0.0..0.5).contains(&p) {
            return Err(Error::Channel(format!("crossover probability {p} outside [0, 0.5)")));
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChannelModel::Bsc { .. } => "bsc",
            ChannelModel::BiAwgnHard { .. } => "awgn-hard",
        }
    }

    /// The swept parameter: `p` for the BSC, Eb/N0 in dB otherwise.
    pub fn param(&self) -> f64 {
        match *self {
            ChannelModel::Bsc { p } => p,
            ChannelModel::BiAwgnHard { ebn0_db, .. } => ebn0_db,
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelModel::Bsc { p } => write!(f, "BSC(p={p})"),
            ChannelModel::BiAwgnHard { ebn0_db, rate } => write!(f, "BI-AWGN-hard(Eb/N0={ebn0_db} dB, R={rate})"),
        }
    }
}

/// Flip decisions keyed by `(seed, trial, block, position)`: the decision
/// for a position is the `position`-th 64-bit output of the ChaCha8 stream
/// selected by `(trial, block)`, compared against `p·2^64`.
#[derive(Clone, Debug)]
pub struct NoiseSource {
    seed: u64,
    threshold: u64,
}

impl NoiseSource {
    pub fn new(seed: u64, p: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p) {
            return Err(Error::Channel(format!("crossover probability {p} outside [0, 0.5)")));
        }
        let threshold = (p * 2f64.powi(64)) as u64;
        Ok(Self { seed, threshold })
    }

    pub fn for_channel(seed: u64, model: &ChannelModel) -> Result<Self> {
        model.validate()?;
        Self::new(seed, model.crossover())
    }

    fn stream(&self, trial: u64, block: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((trial << 32) ^ block);
        rng
    }

    /// Decision for a single position, computed independently.
    pub fn flips_at(&self, trial: u64, block: u64, position: u64) -> bool {
        let mut rng = self.stream(trial, block);
        rng.set_word_pos(2 * position as u128);
        rng.next_u64() < self.threshold
    }

    /// XORs the noise of `(trial, block)` into `bits`.
    pub fn apply(&self, trial: u64, block: u64, bits: &mut [u8]) {
        if self.threshold == 0 {
            return;
        }
        let mut rng = self.stream(trial, block);
        let mut buf = [0u64; 256];
        for chunk in bits.chunks_mut(buf.len()) {
            let words = &mut buf[..chunk.len()];
            rng.fill(words);
            for (bit, &u) in chunk.iter_mut().zip(words.iter()) {
                *bit ^= (u < self.threshold) as u8;
            }
        }
    }
}

/// Corrupts a copy of `block` with the noise of `(trial, index)`.
pub fn apply_channel(noise: &NoiseSource, block: &BitBlock, trial: u64, index: u64) -> BitBlock {
    let mut y = block.clone();
    noise.apply(trial, index, y.as_mut_slice());
    y
}
