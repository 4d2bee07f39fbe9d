//! Monte Carlo BER/FER measurement.
//!
//! A run is a sequence of trials. Each trial transmits an independent chain
//! segment of `trial_blocks` blocks, decodes it with the sliding window and
//! counts errors on the blocks emitted before the final flush. Trials are
//! processed in fixed-size batches and reduced in trial order, and the stop
//! rule is checked between batches, so results do not depend on the worker
//! count.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitBlock;
use crate::channel::{ChannelModel, NoiseSource};
use crate::code::{ratio_to_f64, SrscCode};
use crate::decoder::{DecodeMode, DecoderConfig, StallEvent, StreamDecoder};
use crate::error::{Error, Result};
use crate::par::map_ordered;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    /// Stop once this many bit errors have been seen.
    pub min_errors: u64,
    /// Hard budget of counted bits.
    pub max_bits: u64,
    pub decoder: DecoderConfig,
    /// Transmit the all-zero chain. `None` picks the default for the mode:
    /// on for miscorrection-free decoding, off for plain decoding.
    pub zero_shortcut: Option<bool>,
    /// Blocks per trial (chain segment).
    pub trial_blocks: usize,
    /// Trials per batch.
    pub batch: usize,
    /// Worker threads; 0 means the default pool size.
    pub workers: usize,
    /// Stall events kept in the result.
    pub stall_log_cap: usize,
}

impl SimConfig {
    pub fn new(seed: u64, decoder: DecoderConfig) -> Self {
        Self {
            seed,
            min_errors: 100,
            max_bits: 1_000_000_000,
            decoder,
            zero_shortcut: None,
            trial_blocks: 100,
            batch: 8,
            workers: 0,
            stall_log_cap: 1000,
        }
    }

    pub fn uses_zero_shortcut(&self) -> bool {
        self.zero_shortcut.unwrap_or(self.decoder.mode == DecodeMode::MiscorrectionFree)
    }

    pub fn validate(&self, code: &SrscCode) -> Result<()> {
        self.decoder.validate(code.w())?;
        if self.min_errors == 0 || self.max_bits == 0 {
            return Err(Error::SimConfig("stop rule must be positive".into()));
        }
        if self.batch == 0 {
            return Err(Error::SimConfig("batch size must be positive".into()));
        }
        if self.trial_blocks <= self.decoder.window {
            return Err(Error::SimConfig(format!(
                "trial of {} blocks emits nothing before the flush of a {}-block window",
                self.trial_blocks, self.decoder.window
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallRecord {
    pub trial: u64,
    pub event: StallEvent,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    /// Counted code bits.
    pub bits: u64,
    pub errors: u64,
    pub blocks: u64,
    pub block_errors: u64,
    pub stalls: u64,
    pub stall_log: Vec<StallRecord>,
    /// The error target was reached before the bit budget ran out.
    pub reached_target: bool,
    pub seconds: f64,
}

impl SimResult {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    pub fn fer(&self) -> f64 {
        if self.blocks == 0 {
            0.0
        } else {
            self.block_errors as f64 / self.blocks as f64
        }
    }

    fn absorb(&mut self, t: TrialResult, cap: usize) {
        self.trials += 1;
        self.bits += t.bits;
        self.errors += t.errors;
        self.blocks += t.blocks;
        self.block_errors += t.block_errors;
        self.stalls += t.stalls.len() as u64;
        for event in t.stalls {
            if self.stall_log.len() >= cap {
                break;
            }
            self.stall_log.push(StallRecord { trial: t.trial, event });
        }
    }
}

struct TrialResult {
    trial: u64,
    bits: u64,
    errors: u64,
    blocks: u64,
    block_errors: u64,
    stalls: Vec<StallEvent>,
}

fn info_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_da7a_0000_0001);
    rng.set_stream(trial);
    rng
}

/// Transmits, corrupts and decodes one chain segment.
fn run_trial(code: &SrscCode, cfg: &SimConfig, noise: &NoiseSource, trial: u64) -> Result<TrialResult> {
    let zero = cfg.uses_zero_shortcut();
    let mut dec = StreamDecoder::new(code, cfg.decoder)?;
    let mut encoder = code.encoder();
    let mut rng = info_rng(cfg.seed, trial);
    let mut out = TrialResult { trial, bits: 0, errors: 0, blocks: 0, block_errors: 0, stalls: Vec::new() };
    for i in 1..=cfg.trial_blocks as i64 {
        let emitted = if zero {
            let (r, c) = code.block_dims(i);
            let mut y = BitBlock::zeros(r, c);
            noise.apply(trial, i as u64, y.as_mut_slice());
            dec.push_zero_truth(y)?
        } else {
            let rows = code.block_dims(i).0;
            let info = BitBlock::from_fn(rows, code.fresh_width(i), |_, _| rng.random::<bool>());
            let x = encoder.encode_next(&info)?;
            let mut y = x.clone();
            noise.apply(trial, i as u64, y.as_mut_slice());
            dec.push(y, Some(x))?
        };
        for e in emitted {
            let residual = e.residual.unwrap_or(0) as u64;
            out.bits += e.block.len() as u64;
            out.errors += residual;
            out.blocks += 1;
            out.block_errors += u64::from(residual > 0);
        }
    }
    dec.finish();
    out.stalls = dec.take_stats().1;
    Ok(out)
}

/// Simulates `code` over `channel` until the stop rule fires.
pub fn run_sim(code: &SrscCode, channel: &ChannelModel, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate(code)?;
    let noise = NoiseSource::for_channel(cfg.seed, channel)?;
    let start = Instant::now();
    let mut result = SimResult::default();
    let mut next = 0u64;
    while result.errors < cfg.min_errors && result.bits < cfg.max_bits {
        let trials: Vec<u64> = (next..next + cfg.batch as u64).collect();
        next += cfg.batch as u64;
        let batch = map_ordered(&trials, cfg.workers, |&t| run_trial(code, cfg, &noise, t));
        for t in batch {
            result.absorb(t?, cfg.stall_log_cap);
        }
        log::debug!("{channel}: {} trials, {} errors / {} bits", result.trials, result.errors, result.bits);
    }
    result.reached_target = result.errors >= cfg.min_errors;
    if !result.reached_target {
        log::info!("{channel}: bit budget exhausted with {} errors", result.errors);
    }
    result.seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// One result per channel point, each with its own fresh stop rule.
pub fn sweep(code: &SrscCode, grid: &[ChannelModel], cfg: &SimConfig) -> Result<Vec<SimResult>> {
    if grid.is_empty() {
        return Err(Error::SimConfig("empty channel grid".into()));
    }
    grid.iter().map(|ch| run_sim(code, ch, cfg)).collect()
}

pub const CSV_HEADER: [&str; 22] = [
    "label", "m1", "m2", "q1", "q2", "w", "t1", "t2", "nu1", "nu2", "W", "iters", "mode", "channel", "param", "p",
    "ber", "fer", "bits", "errors", "stalls", "seconds",
];

/// CSV writer for simulation results.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    timing: bool,
}

impl<W: Write> CsvSink<W> {
    /// Writes the header. The `seconds` column is 0 unless `timing` is set,
    /// which keeps output reproducible by default.
    pub fn new(out: W, timing: bool) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_HEADER).map_err(csv_error)?;
        Ok(Self { writer, timing })
    }

    pub fn row(
        &mut self,
        label: &str,
        code: &SrscCode,
        cfg: &SimConfig,
        channel: &ChannelModel,
        r: &SimResult,
    ) -> Result<()> {
        let p = code.params();
        let seconds = if self.timing { r.seconds } else { 0.0 };
        let record = [
            label.to_string(),
            p.m1.to_string(),
            p.m2.to_string(),
            p.q1.to_string(),
            p.q2.to_string(),
            p.w.to_string(),
            p.t1.to_string(),
            p.t2.to_string(),
            p.nu1.to_string(),
            p.nu2.to_string(),
            cfg.decoder.window.to_string(),
            cfg.decoder.max_iters.to_string(),
            cfg.decoder.mode.as_str().to_string(),
            channel.kind().to_string(),
            channel.param().to_string(),
            channel.crossover().to_string(),
            r.ber().to_string(),
            r.fer().to_string(),
            r.bits.to_string(),
            r.errors.to_string(),
            r.stalls.to_string(),
            seconds.to_string(),
        ];
        self.writer.write_record(&record).map_err(csv_error)?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.writer.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// Channel grid from swept values: crossover probabilities for the BSC,
/// Eb/N0 in dB (at the code rate) otherwise.
pub fn channel_grid(code: &SrscCode, kind: &str, values: &[f64]) -> Result<Vec<ChannelModel>> {
    let rate = ratio_to_f64(code.params().rate());
    let grid: Vec<ChannelModel> = match kind {
        "bsc" => values.iter().map(|&p| ChannelModel::Bsc { p }).collect(),
        "awgn-hard" | "awgn" => values.iter().map(|&ebn0_db| ChannelModel::BiAwgnHard { ebn0_db, rate }).collect(),
        other => return Err(Error::Channel(format!("unknown channel kind {other:?}"))),
    };
    for ch in &grid {
        ch.validate()?;
    }
    Ok(grid)
}
