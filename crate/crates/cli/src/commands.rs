use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srsc::bits::{read_blocks, write_blocks};
use srsc::channel::{apply_channel, ChannelModel, NoiseSource};
use srsc::code::{rate_from_redundancy, ratio_to_f64};
use srsc::de::{threshold_m, threshold_m_windowed, threshold_p, DeConfig};
use srsc::decoder::{decode_stream, DecodeMode, DecoderConfig};
use srsc::design::design_search;
use srsc::floor::{floor_estimate, FloorParams};
use srsc::sim::{channel_grid, run_sim, CsvSink, SimConfig, SimResult};
use srsc::{encode_chain, BitBlock, Error, Result, SrscCode, SrscParams};

use crate::args::*;
use crate::design_file;

type Csv<'a> = csv::Writer<&'a mut dyn Write>;

fn csv_out(out: &mut dyn Write) -> Csv<'_> {
    csv::Writer::from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn record<I, S>(w: &mut Csv<'_>, fields: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).map_err(csv_err)
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate(a) => validate(&a, out),
        Command::Rate(a) => rate(&a, out),
        Command::Encode(a) => encode(&a, out),
        Command::Decode(a) => decode(&a, out),
        Command::Threshold(a) => threshold(&a, out),
        Command::Design(a) => design(&a, out),
        Command::Floor(a) => floor(&a, out),
        Command::Simulate(a) => simulate(&a, out),
        Command::Sweep(a) => sweep(&a, out),
    }
}

fn validate(a: &CodeArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.params();
    let code = SrscCode::new(p.clone())?;
    let mut w = csv_out(out);
    record(
        &mut w,
        [
            "m1",
            "m2",
            "q1",
            "q2",
            "w",
            "t1",
            "t2",
            "nu1",
            "nu2",
            "n1",
            "n2",
            "k1",
            "k2",
            "e1",
            "e2",
            "rate",
            "block_bits1",
            "block_bits2",
        ],
    )?;
    record(
        &mut w,
        [
            p.m1.to_string(),
            p.m2.to_string(),
            p.q1.to_string(),
            p.q2.to_string(),
            p.w.to_string(),
            p.t1.to_string(),
            p.t2.to_string(),
            p.nu1.to_string(),
            p.nu2.to_string(),
            p.n(1).to_string(),
            p.n(2).to_string(),
            p.k(1).to_string(),
            p.k(2).to_string(),
            p.e(1).to_string(),
            p.e(2).to_string(),
            format!("{:.6}", ratio_to_f64(p.rate())),
            code.block_bits(1).to_string(),
            code.block_bits(2).to_string(),
        ],
    )?;
    w.flush()?;
    Ok(())
}

fn rate(a: &RateArgs, out: &mut dyn Write) -> Result<()> {
    let (m2, nu2, t2) = (a.m2.unwrap_or(a.m1), a.nu2.unwrap_or(a.nu1), a.t2.unwrap_or(a.t1));
    if a.m1 == 0 || m2 == 0 {
        return Err(Error::InvalidParams(vec![srsc::Violation::Zero("m")]));
    }
    let r1 = a.nu1 as usize * a.t1 as usize + a.extension;
    let r2 = nu2 as usize * t2 as usize + a.extension;
    let r = rate_from_redundancy(a.m1, m2, r1, r2);
    if a.exact {
        writeln!(out, "{r}")?;
    } else {
        writeln!(out, "{:.*}", a.digits, ratio_to_f64(r))?;
    }
    Ok(())
}

fn read_block_file(path: &Path) -> Result<Vec<BitBlock>> {
    read_blocks(&mut BufReader::new(File::open(path)?))
}

fn write_block_file(path: &Path, blocks: &[BitBlock]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_blocks(&mut w, blocks)?;
    w.flush()?;
    Ok(())
}

fn encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let code = SrscCode::new(a.code.params())?;
    let needed = code.info_bits_for_chain(code.params().chain_len);
    let info: Vec<u8> = match &a.info {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let bits: Vec<u8> = text
                .chars()
                .filter_map(|c| match c {
                    '0' => Some(0),
                    '1' => Some(1),
                    _ => None,
                })
                .collect();
            if bits.len() > needed {
                log::warn!("ignoring {} trailing information bits", bits.len() - needed);
            }
            bits
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..needed).map(|_| rng.random_range(0..2u8)).collect()
        }
    };
    let blocks = encode_chain(&code, &info)?;
    write_block_file(&a.output, &blocks)?;
    let mut flips = String::new();
    if let (Some(p), Some(path)) = (a.p, &a.noisy) {
        let noise = NoiseSource::new(a.seed, p)?;
        let noisy: Vec<BitBlock> =
            blocks.iter().enumerate().map(|(k, b)| apply_channel(&noise, b, 0, k as u64 + 1)).collect();
        let n: usize = noisy.iter().zip(&blocks).map(|(y, x)| y.distance(x)).sum();
        flips = n.to_string();
        write_block_file(path, &noisy)?;
    }
    let code_bits: usize = blocks.iter().map(BitBlock::len).sum();
    let mut w = csv_out(out);
    record(&mut w, ["blocks", "info_bits", "code_bits", "channel_flips"])?;
    record(&mut w, [blocks.len().to_string(), needed.to_string(), code_bits.to_string(), flips])?;
    w.flush()?;
    Ok(())
}

fn decoder_config(d: &DecoderArgs) -> DecoderConfig {
    DecoderConfig::new(d.window, d.iters, d.mode.into())
}

fn decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<()> {
    let code = SrscCode::new(a.code.params())?;
    let received = read_block_file(&a.input)?;
    let truth = a.truth.as_deref().map(read_block_file).transpose()?;
    let cfg = decoder_config(&a.decoder);
    if cfg.mode == DecodeMode::MiscorrectionFree && truth.is_none() {
        return Err(Error::MissingTruth);
    }
    for (k, b) in received.iter().enumerate() {
        let want = code.block_dims(k as i64 + 1);
        if (b.rows(), b.cols()) != want {
            return Err(Error::DimensionMismatch {
                expected_rows: want.0,
                expected_cols: want.1,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
    }
    let report = decode_stream(&code, &cfg, &received, truth.as_deref())?;
    if let Some(path) = &a.output {
        write_block_file(path, &report.blocks)?;
    }
    let changed: usize = report.blocks.iter().zip(&received).map(|(x, y)| x.distance(y)).sum();
    let residual = report.residuals.as_ref().map(|r| r.iter().sum::<usize>().to_string()).unwrap_or_default();
    let ber = report.ber().map(|b| b.to_string()).unwrap_or_default();
    let mut w = csv_out(out);
    record(&mut w, ["blocks", "steady_blocks", "windows", "stalls", "flipped", "residual_errors", "ber"])?;
    record(
        &mut w,
        [
            report.blocks.len().to_string(),
            report.steady_blocks.to_string(),
            report.windows.len().to_string(),
            report.stalls.len().to_string(),
            changed.to_string(),
            residual,
            ber,
        ],
    )?;
    w.flush()?;
    Ok(())
}

fn threshold(a: &ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    let t2 = a.t2.unwrap_or(a.t1);
    let cfg = DeConfig { chain_len: a.chain_len, max_iters: a.iters, ..DeConfig::default() };
    let mut w = csv_out(out);
    match (a.m1, a.nu1) {
        (Some(m1), Some(nu1)) => {
            if a.window.is_some() {
                return Err(Error::DensityEvolution("--W is only supported without --m1".into()));
            }
            let params = SrscParams {
                m1,
                m2: a.m2.unwrap_or(m1),
                q1: a.q1,
                q2: a.q2.unwrap_or(a.q1),
                w: a.w,
                nu1,
                nu2: a.nu2.unwrap_or(nu1),
                t1: a.t1,
                t2,
                chain_len: a.chain_len,
            };
            let r = threshold_p(&params, &cfg, a.tol)?;
            record(&mut w, ["t1", "t2", "w", "m_bar", "p_bar", "ebn0_db", "rate"])?;
            record(
                &mut w,
                [
                    a.t1.to_string(),
                    t2.to_string(),
                    a.w.to_string(),
                    format!("{:.4}", r.m_bar),
                    format!("{:.4e}", r.p_bar),
                    format!("{:.4}", r.ebn0_db),
                    format!("{:.4}", ratio_to_f64(params.rate())),
                ],
            )?;
        }
        _ => {
            let m_bar = match a.window {
                Some(window) => threshold_m_windowed(a.t1, t2, a.w, window, &cfg, a.tol)?,
                None => threshold_m(a.t1, t2, a.w, &cfg, a.tol)?,
            };
            record(&mut w, ["t1", "t2", "w", "m_bar"])?;
            record(&mut w, [a.t1.to_string(), t2.to_string(), a.w.to_string(), format!("{m_bar:.4}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn design(a: &DesignArgs, out: &mut dyn Write) -> Result<()> {
    let queries = design_file::parse(&std::fs::read_to_string(&a.spec)?)?;
    let mut w = csv_out(out);
    record(
        &mut w,
        ["nu", "t", "q", "w", "beta", "a", "b", "m_low", "feasible", "recommended_m", "count", "m_bar", "m_bar_ref"],
    )?;
    for q in &queries {
        let r = design_search(q, &DeConfig::default(), a.tol)?;
        let c = q.candidate;
        record(
            &mut w,
            [
                c.nu.to_string(),
                c.t.to_string(),
                c.q.to_string(),
                c.w.to_string(),
                r.beta.to_string(),
                r.a.to_string(),
                format!("{:.2}", r.b),
                r.m_low.to_string(),
                r.feasible.to_string(),
                r.recommended_m.map(|m| m.to_string()).unwrap_or_default(),
                r.count.to_string(),
                format!("{:.4}", r.m_bar),
                format!("{:.4}", r.m_bar_ref),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

fn floor(a: &FloorArgs, out: &mut dyn Write) -> Result<()> {
    let params = FloorParams {
        m1: a.m1,
        m2: a.m2.unwrap_or(a.m1),
        q1: a.q1,
        q2: a.q2.unwrap_or(a.q1),
        w: a.w,
        t1: a.t1,
        t2: a.t2.unwrap_or(a.t1),
    };
    let est = floor_estimate(&params)?;
    let tightness = est.tightness.map(|t| t.as_str()).unwrap_or("exact");
    let mut w = csv_out(out);
    record(&mut w, ["p", "s_min", "a_min", "block_bits", "tightness", "upper_bound", "ber_floor"])?;
    for &p in &a.p {
        if !(0.0..0.5).contains(&p) {
            return Err(Error::Channel(format!("crossover probability {p} outside [0, 0.5)")));
        }
        record(
            &mut w,
            [
                p.to_string(),
                est.s_min.to_string(),
                est.a_min.to_string(),
                est.block_bits.to_string(),
                tightness.to_string(),
                est.is_upper_bound().to_string(),
                format!("{:.6e}", est.ber_floor(p)),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

fn sim_setup(a: &SimArgs) -> Result<(SrscCode, SimConfig)> {
    let mut params = a.code.params();
    params.chain_len = a.trial_blocks;
    let code = SrscCode::new(params)?;
    let mut cfg = SimConfig::new(a.seed, decoder_config(&a.decoder));
    cfg.workers = a.workers;
    cfg.min_errors = a.min_errors;
    cfg.max_bits = a.max_bits;
    cfg.trial_blocks = a.trial_blocks;
    if a.random_data {
        cfg.zero_shortcut = Some(false);
    }
    if cfg.min_errors == 0 || cfg.max_bits == 0 {
        return Err(Error::SimConfig("stop rule must be positive".into()));
    }
    Ok((code, cfg))
}

fn write_stall_log(path: &Path, results: &[(String, SimResult)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["label", "trial", "block", "weight", "coords"]).map_err(csv_err)?;
    for (label, r) in results {
        for s in &r.stall_log {
            let coords: Vec<String> = s.event.coords.iter().map(|(r, c)| format!("{r}:{c}")).collect();
            w.write_record([
                label.clone(),
                s.trial.to_string(),
                s.event.block.to_string(),
                s.event.weight.to_string(),
                coords.join(";"),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_points(a: &SimArgs, grid: &[ChannelModel], out: &mut dyn Write) -> Result<()> {
    let (code, cfg) = sim_setup(a)?;
    let mut sink = CsvSink::new(out, a.timing)?;
    let mut results = Vec::new();
    for (k, ch) in grid.iter().enumerate() {
        let r = run_sim(&code, ch, &cfg)?;
        let label = format!("point{k}");
        sink.row(&label, &code, &cfg, ch, &r)?;
        results.push((label, r));
    }
    if let Some(path) = &a.stall_log {
        write_stall_log(path, &results)?;
    }
    Ok(())
}

fn channel_points(a: &SimArgs, p: &[f64], ebn0: &[f64]) -> Result<Vec<ChannelModel>> {
    let code = SrscCode::new(a.code.params())?;
    if p.is_empty() {
        channel_grid(&code, "awgn-hard", ebn0)
    } else {
        channel_grid(&code, "bsc", p)
    }
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let grid = channel_points(&a.sim, a.p.as_slice(), a.ebn0.as_slice())?;
    run_points(&a.sim, &grid, out)
}

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let grid = channel_points(&a.sim, &a.p, &a.ebn0)?;
    run_points(&a.sim, &grid, out)
}
