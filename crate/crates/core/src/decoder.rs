//! Sliding-window iterative bounded distance decoding.
//!
//! The decoder keeps the received blocks of the current window plus the
//! `w − 1` most recently emitted blocks, which stay readable as coupled
//! context but are never modified again. Each bit lies in exactly two row
//! constraints: the row of its own block and one coupled row of a later
//! block, so a correction marks the other constraint dirty and only dirty
//! rows are decoded in the next sweep.

use std::collections::VecDeque;
use std::str::FromStr;

use crate::bits::BitBlock;
use crate::code::{Source, SrscCode};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeMode {
    Plain,
    MiscorrectionFree,
}

impl DecodeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodeMode::Plain => "plain",
            DecodeMode::MiscorrectionFree => "mf",
        }
    }
}

impl FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" | "ibdd" => Ok(DecodeMode::Plain),
            "mf" | "genie" | "miscorrection-free" => Ok(DecodeMode::MiscorrectionFree),
            other => Err(Error::DecoderConfig(format!("unknown mode '{other}' (plain|mf)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    /// Blocks per window `W`.
    pub window: usize,
    /// BDD sweeps per window position.
    pub max_iters: usize,
    pub mode: DecodeMode,
    /// Blocks emitted per slide.
    pub stride: usize,
}

impl DecoderConfig {
    pub fn new(window: usize, max_iters: usize, mode: DecodeMode) -> Self {
        Self { window, max_iters, mode, stride: 1 }
    }

    pub fn validate(&self, w: usize) -> Result<()> {
        if self.window <= w {
            return Err(Error::DecoderConfig(format!("window W = {} must exceed w = {w}", self.window)));
        }
        if self.max_iters == 0 {
            return Err(Error::DecoderConfig("max_iters must be at least 1".into()));
        }
        if self.stride == 0 || self.stride > self.window {
            return Err(Error::DecoderConfig(format!("stride must be in 1..={}", self.window)));
        }
        Ok(())
    }
}

/// Outcome of one window pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowStats {
    pub first_block: i64,
    pub last_block: i64,
    pub sweeps: usize,
    pub row_decodes: usize,
    pub corrections: usize,
    /// No row changed during the last sweep.
    pub fixed_point: bool,
    /// Bit errors left in the window; `None` without truth.
    pub residual: Option<usize>,
}

impl WindowStats {
    pub fn stalled(&self) -> bool {
        self.fixed_point && self.residual.is_some_and(|r| r > 0)
    }
}

/// Residual errors of a block leaving the window after a fixed point
/// (steady-state emissions only; the final flush is not logged).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallEvent {
    pub block: i64,
    pub weight: usize,
    /// Up to [`STALL_COORDS_CAP`] `(row, col)` positions.
    pub coords: Vec<(usize, usize)>,
}

pub const STALL_COORDS_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedBlock {
    pub index: i64,
    pub block: BitBlock,
    pub residual: Option<usize>,
    /// Emitted by a final flush rather than a full window.
    pub tail: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecodeReport {
    pub blocks: Vec<BitBlock>,
    /// Per-block residual errors, present only with truth.
    pub residuals: Option<Vec<usize>>,
    pub windows: Vec<WindowStats>,
    pub stalls: Vec<StallEvent>,
    /// Blocks emitted from full windows; the remainder were flushed.
    pub steady_blocks: usize,
}

impl DecodeReport {
    /// Bit error rate over the steady-state blocks.
    pub fn ber(&self) -> Option<f64> {
        let res = self.residuals.as_ref()?;
        let bits: usize = self.blocks[..self.steady_blocks].iter().map(BitBlock::len).sum();
        let errs: usize = res[..self.steady_blocks].iter().sum();
        Some(if bits == 0 { 0.0 } else { errs as f64 / bits as f64 })
    }
}

#[derive(Clone, Debug)]
enum Truth {
    Unknown,
    Zero,
    Known(BitBlock),
}

impl Truth {
    #[inline]
    fn bit(&self, r: usize, c: usize) -> u8 {
        match self {
            Truth::Unknown | Truth::Zero => 0,
            Truth::Known(b) => b.get(r, c),
        }
    }

    fn residual(&self, y: &BitBlock) -> Option<usize> {
        match self {
            Truth::Unknown => None,
            Truth::Zero => Some(y.weight()),
            Truth::Known(b) => Some(y.distance(b)),
        }
    }
}

#[derive(Clone, Debug)]
struct Slot {
    index: i64,
    y: BitBlock,
    truth: Truth,
    frozen: bool,
    dirty: Vec<bool>,
}

/// Streaming decoder: push received blocks, get decided blocks back.
#[derive(Clone, Debug)]
pub struct StreamDecoder<'a> {
    code: &'a SrscCode,
    config: DecoderConfig,
    /// Frozen context followed by the live window, indices contiguous.
    slots: VecDeque<Slot>,
    /// Coupled sources per component, `[row * coupled_width + pos]`.
    sources: [Vec<Source>; 2],
    next_index: i64,
    truth_mode: Option<bool>,
    windows: Vec<WindowStats>,
    stalls: Vec<StallEvent>,
    word: Vec<u8>,
    reference: Vec<u8>,
}

impl<'a> StreamDecoder<'a> {
    /// Decoder for a chain starting at block 1 after the all-zero blocks.
    pub fn new(code: &'a SrscCode, config: DecoderConfig) -> Result<Self> {
        config.validate(code.w())?;
        let w = code.w() as i64;
        let slots = (1..w)
            .rev()
            .map(|l| {
                let (r, c) = code.block_dims(1 - l);
                Slot { index: 1 - l, y: BitBlock::zeros(r, c), truth: Truth::Zero, frozen: true, dirty: vec![false; r] }
            })
            .collect();
        let sources = [1i64, 2].map(|i| {
            let (rows, _) = code.block_dims(i);
            let cw = code.coupled_width(i);
            let mut v = Vec::with_capacity(rows * cw);
            for r in 0..rows {
                for p in 0..cw {
                    v.push(code.coupled_source(i, r, p));
                }
            }
            v
        });
        // sources[0] was built for odd blocks (C2); store by component index.
        let [odd, even] = sources;
        Ok(Self {
            code,
            config,
            slots,
            sources: [even, odd],
            next_index: 1,
            truth_mode: None,
            windows: Vec::new(),
            stalls: Vec::new(),
            word: Vec::new(),
            reference: Vec::new(),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn windows(&self) -> &[WindowStats] {
        &self.windows
    }

    pub fn stalls(&self) -> &[StallEvent] {
        &self.stalls
    }

    pub fn take_stats(&mut self) -> (Vec<WindowStats>, Vec<StallEvent>) {
        (std::mem::take(&mut self.windows), std::mem::take(&mut self.stalls))
    }

    /// Index of the next block to push.
    pub fn next_index(&self) -> i64 {
        self.next_index
    }

    fn live(&self) -> usize {
        self.slots.iter().filter(|s| !s.frozen).count()
    }

    fn first_live(&self) -> usize {
        self.slots.iter().position(|s| !s.frozen).unwrap_or(self.slots.len())
    }

    /// Pushes the next received block. `truth` is the transmitted block
    /// (required in miscorrection-free mode unless `push_zero_truth` is
    /// used). Returns the blocks that became final.
    pub fn push(&mut self, y: BitBlock, truth: Option<BitBlock>) -> Result<Vec<EmittedBlock>> {
        let truth = match truth {
            Some(t) => {
                self.check_dims(&t)?;
                Truth::Known(t)
            }
            None => Truth::Unknown,
        };
        self.push_slot(y, truth)
    }

    /// Pushes a block whose transmitted value is known to be all-zero.
    pub fn push_zero_truth(&mut self, y: BitBlock) -> Result<Vec<EmittedBlock>> {
        self.push_slot(y, Truth::Zero)
    }

    fn check_dims(&self, b: &BitBlock) -> Result<()> {
        let (rows, cols) = self.code.block_dims(self.next_index);
        if (b.rows(), b.cols()) != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        Ok(())
    }

    fn push_slot(&mut self, y: BitBlock, truth: Truth) -> Result<Vec<EmittedBlock>> {
        self.check_dims(&y)?;
        let has_truth = !matches!(truth, Truth::Unknown);
        if self.config.mode == DecodeMode::MiscorrectionFree && !has_truth {
            return Err(Error::MissingTruth);
        }
        match self.truth_mode {
            None => self.truth_mode = Some(has_truth),
            Some(prev) if prev != has_truth => {
                return Err(Error::DecoderConfig("truth must be supplied for all blocks or none".into()))
            }
            _ => {}
        }
        let rows = y.rows();
        self.slots.push_back(Slot { index: self.next_index, y, truth, frozen: false, dirty: vec![true; rows] });
        self.next_index += 1;
        if self.live() < self.config.window {
            return Ok(Vec::new());
        }
        let stats = self.decode_window();
        let emitted = self.emit(self.config.stride, false, &stats);
        self.windows.push(stats);
        Ok(emitted)
    }

    /// Runs a last pass over the partial window and emits everything.
    pub fn finish(&mut self) -> Vec<EmittedBlock> {
        let live = self.live();
        if live == 0 {
            return Vec::new();
        }
        let stats = self.decode_window();
        let out = self.emit(live, true, &stats);
        self.windows.push(stats);
        out
    }

    fn emit(&mut self, count: usize, tail: bool, stats: &WindowStats) -> Vec<EmittedBlock> {
        let keep = self.code.w() - 1;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let at = self.first_live();
            if at == self.slots.len() {
                break;
            }
            let slot = &mut self.slots[at];
            slot.frozen = true;
            let residual = slot.truth.residual(&slot.y);
            if stats.fixed_point && !tail {
                if let Some(weight) = residual.filter(|&r| r > 0) {
                    let diff = match &slot.truth {
                        Truth::Known(t) => {
                            let mut d = slot.y.clone();
                            d.xor_assign(t);
                            d
                        }
                        _ => slot.y.clone(),
                    };
                    let coords = diff.support().into_iter().take(STALL_COORDS_CAP).collect();
                    self.stalls.push(StallEvent { block: slot.index, weight, coords });
                }
            }
            out.push(EmittedBlock { index: slot.index, block: slot.y.clone(), residual, tail });
        }
        while self.first_live() > keep {
            self.slots.pop_front();
        }
        out
    }

    /// Constraint matrix `D_i` (`rows × n`, shortened zeros implicit) of a
    /// block currently held by the decoder.
    pub fn received_matrix(&self, i: i64) -> Option<BitBlock> {
        let s = self.slot_pos(i)?;
        let code = self.code;
        let j = code.component_index(i);
        let cw = code.coupled_width(i);
        let rows = self.slots[s].y.rows();
        let n = code.code(j).n();
        Some(BitBlock::from_fn(rows, n, |r, p| {
            if p < cw {
                let src = self.sources[j - 1][r * cw + p];
                self.bit(i - src.lag as i64, src.row, src.col) == 1
            } else {
                self.slots[s].y.get(r, p - cw) == 1
            }
        }))
    }

    /// Current (possibly partially corrected) value of a held block.
    pub fn block(&self, i: i64) -> Option<&BitBlock> {
        self.slot_pos(i).map(|s| &self.slots[s].y)
    }

    #[inline]
    fn slot_pos(&self, i: i64) -> Option<usize> {
        let first = self.slots.front()?.index;
        let pos = i - first;
        (pos >= 0 && (pos as usize) < self.slots.len()).then_some(pos as usize)
    }

    #[inline]
    fn bit(&self, i: i64, r: usize, c: usize) -> u8 {
        match self.slot_pos(i) {
            Some(s) => self.slots[s].y.get(r, c),
            None => 0,
        }
    }

    /// Sweeps the live window until a fixed point or `max_iters`.
    fn decode_window(&mut self) -> WindowStats {
        let start = self.first_live();
        let mut stats = WindowStats {
            first_block: self.slots[start].index,
            last_block: self.slots.back().map(|s| s.index).unwrap_or(0),
            sweeps: 0,
            row_decodes: 0,
            corrections: 0,
            fixed_point: false,
            residual: None,
        };
        for _ in 0..self.config.max_iters {
            stats.sweeps += 1;
            let mut changed = false;
            for s in start..self.slots.len() {
                for r in 0..self.slots[s].dirty.len() {
                    if !self.slots[s].dirty[r] {
                        continue;
                    }
                    self.slots[s].dirty[r] = false;
                    stats.row_decodes += 1;
                    if let Some(n) = self.decode_row(s, r) {
                        stats.corrections += n;
                        changed |= n > 0;
                    }
                }
            }
            if !changed {
                stats.fixed_point = true;
                break;
            }
        }
        if self.truth_mode == Some(true) {
            stats.residual = Some(self.slots.range(start..).map(|s| s.truth.residual(&s.y).unwrap_or(0)).sum());
        }
        stats
    }

    /// Decodes row `r` of the constraint of slot `s`; returns the number of
    /// flipped bits, or `None` on failure.
    fn decode_row(&mut self, s: usize, r: usize) -> Option<usize> {
        let code = self.code;
        let i = self.slots[s].index;
        let j = code.component_index(i);
        let bch = code.code(j);
        let cw = code.coupled_width(i);
        let n = bch.n();
        let mut word = std::mem::take(&mut self.word);
        word.clear();
        let sources = &self.sources[j - 1][r * cw..(r + 1) * cw];
        for src in sources {
            word.push(self.bit(i - src.lag as i64, src.row, src.col));
        }
        word.extend_from_slice(self.slots[s].y.row(r));
        debug_assert_eq!(word.len(), n);

        let flips: Option<Vec<usize>> = match self.config.mode {
            DecodeMode::MiscorrectionFree => {
                let mut reference = std::mem::take(&mut self.reference);
                reference.clear();
                for src in sources {
                    let b = match self.slot_pos(i - src.lag as i64) {
                        Some(p) => self.slots[p].truth.bit(src.row, src.col),
                        None => 0,
                    };
                    reference.push(b);
                }
                let truth = &self.slots[s].truth;
                for c in 0..self.slots[s].y.cols() {
                    reference.push(truth.bit(r, c));
                }
                let diff: Vec<usize> = (0..n).filter(|&p| word[p] != reference[p]).collect();
                self.reference = reference;
                bch.genie_corrects(diff.len()).then_some(diff)
            }
            DecodeMode::Plain => bch.locate_errors(&word),
        };
        self.word = word;
        let flips = flips?;
        if flips.is_empty() {
            return Some(0);
        }
        // A correction may not touch emitted blocks.
        for &p in &flips {
            if p < cw {
                let src = sources[p];
                match self.slot_pos(i - src.lag as i64) {
                    Some(q) if !self.slots[q].frozen => {}
                    _ => return None,
                }
            }
        }
        for &p in &flips {
            if p < cw {
                let src = self.sources[j - 1][r * cw + p];
                let q = self.slot_pos(i - src.lag as i64).expect("checked above");
                self.slots[q].y.flip(src.row, src.col);
                self.slots[q].dirty[src.row] = true;
            } else {
                let c = p - cw;
                self.slots[s].y.flip(r, c);
                let t = code.coupled_target(i, r, c);
                if let Some(q) = self.slot_pos(i + t.lag as i64) {
                    self.slots[q].dirty[t.row] = true;
                }
            }
        }
        Some(flips.len())
    }
}

/// Decodes one window of blocks `1..=window.len()` following the all-zero
/// initial blocks, without sliding.
pub fn decode_window(
    code: &SrscCode,
    config: &DecoderConfig,
    window: &[BitBlock],
    truth: Option<&[BitBlock]>,
) -> Result<(Vec<BitBlock>, WindowStats)> {
    let mut cfg = *config;
    cfg.window = (window.len() + 1).max(code.w() + 1);
    if let Some(t) = truth {
        if t.len() != window.len() {
            return Err(Error::LengthMismatch { expected: window.len(), got: t.len() });
        }
    }
    let mut dec = StreamDecoder::new(code, cfg)?;
    for (k, y) in window.iter().enumerate() {
        let t = truth.map(|t| t[k].clone());
        dec.push(y.clone(), t)?;
    }
    let out = dec.finish();
    let stats = dec.windows.pop().expect("one window pass");
    Ok((out.into_iter().map(|e| e.block).collect(), stats))
}

/// Decodes a whole received chain with the sliding window, flushing the
/// final partial window at the end.
pub fn decode_stream(
    code: &SrscCode,
    config: &DecoderConfig,
    received: &[BitBlock],
    truth: Option<&[BitBlock]>,
) -> Result<DecodeReport> {
    if received.len() < config.window {
        return Err(Error::ChainTooShort { len: received.len(), window: config.window });
    }
    if let Some(t) = truth {
        if t.len() != received.len() {
            return Err(Error::LengthMismatch { expected: received.len(), got: t.len() });
        }
    }
    let mut dec = StreamDecoder::new(code, *config)?;
    let mut emitted = Vec::with_capacity(received.len());
    for (k, y) in received.iter().enumerate() {
        emitted.extend(dec.push(y.clone(), truth.map(|t| t[k].clone()))?);
    }
    let steady_blocks = emitted.len();
    emitted.extend(dec.finish());
    let residuals = truth.map(|_| emitted.iter().map(|e| e.residual.unwrap_or(0)).collect());
    let (windows, stalls) = dec.take_stats();
    Ok(DecodeReport {
        blocks: emitted.into_iter().map(|e| e.block).collect(),
        residuals,
        windows,
        stalls,
        steady_blocks,
    })
}
