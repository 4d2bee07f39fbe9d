use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_srsc");

fn srsc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("SRSC_LOG").output().expect("run srsc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = srsc(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let r = rows(csv);
    let idx = r[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    r[1..].iter().map(|row| row[idx].clone()).collect()
}

const SMALL: [&str; 8] = ["--m1", "16", "--q1", "2", "--t1", "1", "--nu1", "6"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn threshold_example() {
    let out = ok(&["threshold", "--t1", "2", "--t2", "2", "--w", "2"]);
    assert_eq!(column(&out, "m_bar"), ["3.5880"]);
}

#[test]
fn rate_example() {
    let out = ok(&["rate", "--m1", "876", "--m2", "876", "--nu1", "11", "--nu2", "11", "--t1", "5", "--t2", "5"]);
    assert_eq!(out.trim(), "0.9372");
    let exact = ok(&["rate", "--m1", "748", "--nu1", "11", "--t1", "4", "--exact"]);
    assert_eq!(exact.trim(), "16/17");
}

#[test]
fn missing_flag_is_usage_error() {
    let o = srsc(&["rate", "--m1", "876"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("Usage") && err.contains("--t1"), "{err}");
    assert!(o.stdout.is_empty());
    assert_eq!(srsc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(srsc(&["floor", "--m1", "12", "--t1", "2"]).status.code(), Some(2));
}

#[test]
fn domain_error_names_constraint() {
    let o = srsc(&["validate", "--m1", "10", "--q1", "3", "--t1", "2", "--nu1", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m1 = 10 is not divisible by 3"));
    let o = srsc(&["validate", "--m1", "40", "--t1", "2", "--nu1", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds 2^nu1 - 1"));
}

#[test]
fn validate_reports_dimensions() {
    let out = ok(&["validate", "--m1", "936", "--q1", "2", "--t1", "5", "--nu1", "11"]);
    assert_eq!(column(&out, "n1"), ["1872"]);
    assert_eq!(column(&out, "e1"), ["175"]);
    assert_eq!(column(&out, "block_bits1"), ["438048"]);
}

#[test]
fn floor_csv() {
    let out = ok(&["floor", "--m1", "126", "--q1", "2", "--t1", "2", "--p", "0.01,0.009"]);
    assert_eq!(column(&out, "s_min"), ["6", "6"]);
    assert_eq!(column(&out, "a_min"), ["92525328", "92525328"]);
    assert_eq!(column(&out, "tightness"), ["exact", "exact"]);
    let wide = ok(&["floor", "--m1", "126", "--q1", "2", "--w", "3", "--t1", "2", "--p", "0.009"]);
    assert_eq!(column(&wide, "upper_bound"), ["true"]);
    assert_eq!(column(&wide, "tightness"), ["strictly-larger"]);
}

#[test]
fn design_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bench.txt");
    std::fs::write(&spec, "# staircase benchmark\nm_ref = 748\nnu_ref = 11\nt_ref = 4\ncandidate = 11,5,2,2\n")
        .unwrap();
    let out = ok(&["design", spec.to_str().unwrap()]);
    assert_eq!(column(&out, "recommended_m"), ["936"]);
    std::fs::write(&spec, "m_ref = 748\n").unwrap();
    assert_eq!(srsc(&["design", spec.to_str().unwrap()]).status.code(), Some(1));
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, z) = (path(dir.path(), "x.blk"), path(dir.path(), "y.blk"), path(dir.path(), "z.blk"));
    let enc =
        ok(&[&["encode"][..], &with(&SMALL, &["--L", "12", "--seed", "4", "-o", &x, "--p", "0.01", "--noisy", &y])]
            .concat());
    assert_eq!(column(&enc, "blocks"), ["12"]);
    let flips: usize = column(&enc, "channel_flips")[0].parse().unwrap();
    assert!(flips > 0);

    let clean = ok(&[&["decode"][..], &with(&SMALL, &["--W", "4", "-i", &x, "--truth", &x])].concat());
    assert_eq!(column(&clean, "residual_errors"), ["0"]);
    assert_eq!(column(&clean, "flipped"), ["0"]);

    let dec = ok(&[&["decode"][..], &with(&SMALL, &["--W", "4", "-i", &y, "--truth", &x, "-o", &z])].concat());
    assert_eq!(column(&dec, "residual_errors"), ["0"]);
    assert_eq!(std::fs::read(&z).unwrap(), std::fs::read(&x).unwrap());

    let genie = ok(&[&["decode"][..], &with(&SMALL, &["--W", "4", "--mode", "mf", "-i", &y, "--truth", &x])].concat());
    assert_eq!(column(&genie, "residual_errors"), ["0"]);

    // Genie decoding without the transmitted chain is a domain error.
    let o = srsc(&[&["decode"][..], &with(&SMALL, &["--W", "4", "--mode", "mf", "-i", &y])].concat());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn encode_reads_info_file() {
    let dir = tempfile::tempdir().unwrap();
    let (info, x) = (path(dir.path(), "info.txt"), path(dir.path(), "x.blk"));
    std::fs::write(&info, "10".repeat(400)).unwrap();
    let out = ok(&[&["encode"][..], &with(&SMALL, &["--L", "6", "--info", &info, "-o", &x])].concat());
    assert_eq!(column(&out, "info_bits"), ["480"]);
    std::fs::write(&info, "1").unwrap();
    let o = srsc(&[&["encode"][..], &with(&SMALL, &["--L", "6", "--info", &info, "-o", &x])].concat());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let log = path(dir.path(), "stalls.csv");
    let args = |workers: &'static str| {
        [
            &["simulate"][..],
            &with(
                &SMALL,
                &["--p", "0.03", "--W", "4", "--trial-blocks", "12", "--max-bits", "50000", "--workers", workers],
            ),
        ]
        .concat()
    };
    let a = ok(&args("1"));
    let b = ok(&args("1"));
    let c = ok(&args("3"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(column(&a, "seconds"), ["0"]);
    let errors: u64 = column(&a, "errors")[0].parse().unwrap();
    assert!(errors > 0);

    let mut genie = args("1");
    genie.extend(["--mode", "mf", "--stall-log", &log]);
    ok(&genie);
    assert!(std::fs::read_to_string(&log).unwrap().starts_with("label,trial,block,weight,coords"));
}

#[test]
fn sweep_emits_one_row_per_point() {
    let out = ok(&[
        &["sweep"][..],
        &with(&SMALL, &["--p", "0.001,0.02,0.04", "--W", "4", "--trial-blocks", "12", "--max-bits", "20000"]),
    ]
    .concat());
    assert_eq!(column(&out, "p"), ["0.001", "0.02", "0.04"]);
    let awgn = ok(&[
        &["sweep"][..],
        &with(&SMALL, &["--ebn0", "5,6", "--W", "4", "--trial-blocks", "12", "--max-bits", "20000"]),
    ]
    .concat());
    assert_eq!(column(&awgn, "channel"), ["awgn-hard", "awgn-hard"]);
    assert_eq!(srsc(&[&["sweep"][..], &with(&SMALL, &["--p", "0.01", "--ebn0", "5"])].concat()).status.code(), Some(2));
}
