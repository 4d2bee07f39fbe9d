use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srsc::bch::generator_degree;
use srsc::channel::ChannelModel;
use srsc::code::rearranged_position;
use srsc::de::{de_run, threshold_m, DeConfig};
use srsc::decoder::{decode_window, DecodeMode, DecoderConfig};
use srsc::floor::{s_min_lb_wide, s_min_w2};
use srsc::sim::{run_sim, SimConfig};
use srsc::{encode_chain, rearrange, BchCode, BitBlock, SrscCode, SrscParams};

/// DE settings with a fixed iteration count.
fn fixed_iters(iters: usize) -> DeConfig {
    DeConfig { chain_len: 30, max_iters: iters, eps_num: f64::MIN_POSITIVE, stall_tol: 0.0, ..DeConfig::default() }
}

/// Pointwise `a ≤ b`, ignoring differences in the subnormal range.
fn dominated(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= *y + 1e-300)
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// Small valid parameter sets; `w > 2` forces a symmetric code.
fn small_params() -> impl Strategy<Value = SrscParams> {
    (1usize..=3, 1usize..=3, 2usize..=4, 1u32..=2, 1u32..=2, 1usize..=2).prop_map(|(q1, q2, w, t1, t2, k)| {
        let (q2, t2) = if w > 2 { (q1, t1) } else { (q2, t2) };
        let m = 24 * (w - 1) * k;
        let nu = |qa: usize, qb: usize| (usize::BITS - (m + m * qb / qa).leading_zeros()).max(5);
        SrscParams { m1: m, m2: m, q1, q2, w, nu1: nu(q1, q2), nu2: nu(q2, q1), t1, t2, chain_len: w + 3 }
    })
}

fn code_rows_ok(code: &SrscCode, chain: &[BitBlock]) -> bool {
    let mut enc = code.encoder();
    for (idx, b) in chain.iter().enumerate() {
        let i = idx as i64 + 1;
        for r in 0..b.rows() {
            let mut word = enc.coupled_row(r);
            word.extend_from_slice(b.row(r));
            if !code.component(i).is_codeword(&word) {
                return false;
            }
        }
        let info = BitBlock::from_fn(b.rows(), code.fresh_width(i), |r, c| b.get(r, c) == 1);
        enc.encode_next(&info).unwrap();
    }
    true
}

fn noisy(chain: &[BitBlock], rng: &mut ChaCha8Rng, p: f64) -> Vec<BitBlock> {
    chain
        .iter()
        .map(|b| {
            let mut y = b.clone();
            for r in 0..y.rows() {
                for c in 0..y.cols() {
                    if rng.random_bool(p) {
                        y.flip(r, c);
                    }
                }
            }
            y
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn de_monotone_in_iterations(m in 0.0f64..8.0, t in 1u32..=4, w in 2usize..=5, iters in 1usize..20) {
        let a = de_run(m, m, t, t, w, &fixed_iters(iters)).unwrap().x;
        let b = de_run(m, m, t, t, w, &fixed_iters(iters + 1)).unwrap().x;
        prop_assert!(dominated(&b, &a));
    }

    #[test]
    fn de_monotone_in_m(m in 0.0f64..8.0, dm in 0.0f64..2.0, t in 1u32..=4, w in 2usize..=5, iters in 1usize..20) {
        let lo = de_run(m, m, t, t, w, &fixed_iters(iters)).unwrap().x;
        let hi = de_run(m + dm, m + dm, t, t, w, &fixed_iters(iters)).unwrap().x;
        prop_assert!(dominated(&lo, &hi));
    }

    #[test]
    fn de_monotone_in_m_asymmetric(m1 in 0.0f64..6.0, m2 in 0.0f64..6.0, d in 0.0f64..1.0, t1 in 1u32..=3, t2 in 1u32..=3) {
        let lo = de_run(m1, m2, t1, t2, 2, &fixed_iters(10)).unwrap().x;
        let hi = de_run(m1 + d, m2, t1, t2, 2, &fixed_iters(10)).unwrap().x;
        prop_assert!(dominated(&lo, &hi));
    }

    #[test]
    fn rearrange_is_a_bijection(rows in 1usize..8, sub in 1usize..6, q in 1usize..4, seed: u64) {
        let cols = sub * q;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = BitBlock::from_vec(rows, cols, random_bits(&mut rng, rows * cols)).unwrap();
        // Reference: split into column sub-blocks, transpose, concatenate.
        let parts: Vec<BitBlock> = (0..q)
            .map(|k| BitBlock::from_fn(rows, sub, |r, c| block.get(r, k * sub + c) == 1).transpose())
            .collect();
        let want = BitBlock::from_fn(sub, rows * q, |r, c| parts[c / rows].get(r, c % rows) == 1);
        prop_assert_eq!(rearrange(&block, q).unwrap(), want);
        let image: HashSet<_> = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| rearranged_position(rows, cols, q, r, c)))
            .collect();
        prop_assert_eq!(image.len(), rows * cols);
        prop_assert!(image.iter().all(|&(r, c)| r < sub && c < rows * q));
    }

    #[test]
    fn encoded_rows_have_zero_syndrome(params in small_params(), seed: u64) {
        let code = SrscCode::new(params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = random_bits(&mut rng, code.info_bits_for_chain(code.params().chain_len));
        let chain = encode_chain(&code, &info).unwrap();
        prop_assert!(code_rows_ok(&code, &chain));
    }

    #[test]
    fn decoder_fixed_points_are_stable(params in small_params(), seed: u64, p in 0.0f64..0.08, genie: bool) {
        let code = SrscCode::new(params).unwrap();
        let len = code.params().chain_len;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = random_bits(&mut rng, code.info_bits_for_chain(len));
        let chain = encode_chain(&code, &info).unwrap();
        let y = noisy(&chain, &mut rng, p);
        let mode = if genie { DecodeMode::MiscorrectionFree } else { DecodeMode::Plain };
        let cfg = DecoderConfig::new(len + 1, 100, mode);
        let truth = genie.then_some(chain.as_slice());
        let (out, stats) = decode_window(&code, &cfg, &y, truth).unwrap();
        prop_assume!(stats.fixed_point);
        let (again, stats2) = decode_window(&code, &cfg, &out, truth).unwrap();
        prop_assert_eq!(&again, &out);
        prop_assert_eq!(stats2.corrections, 0);
        if genie {
            // Genie decoding never moves away from the transmitted chain.
            let before: usize = y.iter().zip(&chain).map(|(a, b)| a.distance(b)).sum();
            let after: usize = out.iter().zip(&chain).map(|(a, b)| a.distance(b)).sum();
            prop_assert!(after <= before);
        }
    }

    #[test]
    fn bch_round_trip_and_sphere(nu in 4u32..=8, t in 1u32..=3, short in 0usize..8, seed: u64) {
        prop_assume!(generator_degree(nu, t) == (nu * t) as usize);
        let n = (1usize << nu) - 1 - short;
        prop_assume!(n > (nu * t) as usize);
        let code = BchCode::new(nu, t, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cw = code.encode(&random_bits(&mut rng, code.k())).unwrap();
        prop_assert!(code.is_codeword(&cw));
        let weight = rng.random_range(0..=2 * t as usize + 2).min(n);
        let mut y = cw.clone();
        for p in rand::seq::index::sample(&mut rng, n, weight) {
            y[p] ^= 1;
        }
        let plain = code.decode(&y);
        if weight <= t as usize {
            prop_assert!(plain.is_corrected());
            prop_assert_eq!(&plain.word, &cw);
        }
        if plain.is_corrected() {
            let moved = plain.word.iter().zip(&y).filter(|(a, b)| a != b).count();
            prop_assert!(code.is_codeword(&plain.word));
            prop_assert!(moved <= t as usize);
            prop_assert_eq!(moved, plain.errors_corrected);
        } else {
            prop_assert_eq!(&plain.word, &y);
        }
        let genie = code.decode_genie(&y, &cw);
        prop_assert_eq!(genie.is_corrected(), code.genie_corrects(weight));
        if genie.is_corrected() {
            prop_assert_eq!(&genie.word, &cw);
            prop_assert!(plain.is_corrected());
        }
    }

    #[test]
    fn s_min_swap_symmetric(t1 in 1u32..=12, t2 in 1u32..=12, q1 in 1usize..=6, q2 in 1usize..=6) {
        prop_assert_eq!(s_min_w2(t1, t2, q1, q2), s_min_w2(t2, t1, q2, q1));
    }
}
proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn threshold_bounded_and_nondecreasing_in_w(t in 1u32..=6, w in 2usize..=4) {
        let cfg = DeConfig::default();
        let tol = 1e-2;
        let a = threshold_m(t, t, w, &cfg, tol).unwrap();
        let b = threshold_m(t, t, w + 1, &cfg, tol).unwrap();
        prop_assert!(a <= (2 * t) as f64);
        prop_assert!(b <= (2 * t) as f64);
        prop_assert!(b + tol >= a, "w={} {} > w+1 {}", w, a, b);
    }

    #[test]
    fn simulation_independent_of_workers(seed: u64, workers in 2usize..=4, genie: bool) {
        let code = SrscCode::new(SrscParams::symmetric(16, 2, 2, 6, 1, 0)).unwrap();
        let mode = if genie { DecodeMode::MiscorrectionFree } else { DecodeMode::Plain };
        let mut cfg = SimConfig::new(seed, DecoderConfig::new(4, 5, mode));
        cfg.trial_blocks = 10;
        cfg.batch = 3;
        cfg.min_errors = 40;
        cfg.max_bits = 100_000;
        cfg.workers = 1;
        let channel = ChannelModel::Bsc { p: 0.03 };
        let one = run_sim(&code, &channel, &cfg).unwrap();
        cfg.workers = workers;
        let many = run_sim(&code, &channel, &cfg).unwrap();
        prop_assert_eq!(
            (one.trials, one.bits, one.errors, one.block_errors, one.stalls, &one.stall_log),
            (many.trials, many.bits, many.errors, many.block_errors, many.stalls, &many.stall_log)
        );
    }
}

/// Designs with `w = 2`, `q ≥ 2` and `|t1 − t2| ≤ 1`: the exact `w = 2` minimum
/// never exceeds the wide-coupling lower bound, and meets it exactly when
/// `⌈(t+1)/q⌉ = (t+2)/2`.
#[test]
fn w2_minimum_at_most_wide_bound_on_designs() {
    let mut equal = Vec::new();
    for (t1, t2, q) in [(5, 5, 2), (5, 5, 3), (6, 5, 4), (6, 6, 2), (4, 4, 2), (4, 3, 3), (4, 4, 4), (5, 4, 4)] {
        let s = s_min_w2(t1, t2, q, q);
        let lb = s_min_lb_wide(t1, t2);
        assert!(s <= lb, "({t1},{t2},{q}): {s} > {lb}");
        if s == lb {
            equal.push((t1, t2, q));
        }
    }
    assert_eq!(equal, [(6, 6, 2), (4, 4, 2), (4, 3, 3)]);
}

#[test]
fn threshold_nondecreasing_in_w_for_large_unequal_t() {
    let cfg = DeConfig::default();
    for (t1, t2) in [(5, 6), (7, 8)] {
        let m: Vec<f64> = (2..=6).map(|w| threshold_m(t1, t2, w, &cfg, 1e-3).unwrap()).collect();
        assert!(m.windows(2).all(|p| p[1] + 1e-3 >= p[0]), "({t1},{t2}): {m:?}");
        assert!(m.iter().all(|&v| v <= (t1 + t2) as f64));
    }
}

/// With a single-error-correcting side the threshold is not monotone in `w`.
#[test]
fn threshold_can_drop_with_w_for_small_unequal_t() {
    let cfg = DeConfig::default();
    let m2 = threshold_m(1, 2, 2, &cfg, 1e-3).unwrap();
    let m3 = threshold_m(1, 2, 3, &cfg, 1e-3).unwrap();
    assert!(m3 < m2 - 0.2, "{m2} vs {m3}");
}
