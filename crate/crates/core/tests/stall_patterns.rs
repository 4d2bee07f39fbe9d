use srsc::decoder::{decode_window, DecodeMode, DecoderConfig};
use srsc::floor::{brute_force_stall_oracle, find_stall_pattern, OracleQuery, StallPattern};
use srsc::{BitBlock, SrscCode, SrscParams};

fn decode_pattern(code: &SrscCode, pattern: &StallPattern, len: usize) -> Vec<BitBlock> {
    let errors = pattern.error_blocks(code.geometry(), len);
    let zeros: Vec<BitBlock> = errors.iter().map(|b| BitBlock::zeros(b.rows(), b.cols())).collect();
    let cfg = DecoderConfig::new(len + 1, 50, DecodeMode::MiscorrectionFree);
    decode_window(code, &cfg, &errors, Some(&zeros)).unwrap().0
}

fn weight(blocks: &[BitBlock]) -> usize {
    blocks.iter().map(|b| b.weight()).sum()
}

fn check(code: &SrscCode, pattern: &StallPattern, len: usize) {
    let errors = pattern.error_blocks(code.geometry(), len);
    assert_eq!(decode_pattern(code, pattern, len), errors, "planted pattern moved");
    for skip in 0..pattern.weight() {
        let mut smaller = pattern.clone();
        smaller.coords.remove(skip);
        assert_eq!(weight(&decode_pattern(code, &smaller, len)), 0, "sub-pattern not corrected");
    }
}

#[test]
fn every_minimal_staircase_stall_is_a_decoder_fixed_point() {
    let code = SrscCode::new(SrscParams::symmetric(4, 1, 2, 4, 1, 4)).unwrap();
    let mut query = OracleQuery::new(code.geometry().clone(), 1, 1, 1, 4);
    query.keep = 1000;
    let r = brute_force_stall_oracle(&query).unwrap();
    assert_eq!((r.min_weight, r.count, r.patterns.len()), (Some(4), 132, 132));
    for p in &r.patterns {
        check(&code, p, 4);
    }
}

#[test]
fn minimal_stall_survives_full_size_decoder() {
    let code = SrscCode::new(SrscParams::symmetric(126, 2, 2, 8, 2, 4)).unwrap();
    let query = OracleQuery::new(code.geometry().clone(), 2, 2, 1, 6);
    let p = find_stall_pattern(&query, 6).unwrap().expect("weight-6 stall");
    check(&code, &p, 4);
}

#[test]
fn wide_stall_survives_full_size_decoder() {
    let code = SrscCode::new(SrscParams::symmetric(126, 2, 3, 8, 2, 5)).unwrap();
    let query = OracleQuery::new(code.geometry().clone(), 2, 2, 1, 8);
    let p = find_stall_pattern(&query, 8).unwrap().expect("weight-8 stall");
    check(&code, &p, 5);
}
