use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use srsc::channel::ChannelModel;
use srsc::decoder::{DecodeMode, DecoderConfig};
use srsc::par::{default_workers, map_ordered};
use srsc::sim::{run_sim, SimConfig};
use srsc::{SrscCode, SrscParams};

fn sim_config(workers: usize, mode: DecodeMode) -> SimConfig {
    let mut cfg = SimConfig::new(1, DecoderConfig::new(7, 10, mode));
    cfg.trial_blocks = 40;
    cfg.batch = 16;
    cfg.min_errors = u64::MAX;
    cfg.max_bits = match mode {
        DecodeMode::Plain => 300_000,
        DecodeMode::MiscorrectionFree => 2_000_000,
    };
    cfg.workers = workers;
    cfg
}

fn bench_sim(c: &mut Criterion) {
    let code = SrscCode::new(SrscParams::symmetric(126, 2, 2, 8, 2, 0)).unwrap();
    let channel = ChannelModel::Bsc { p: 0.012 };
    let parallel = default_workers().max(2);
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for mode in [DecodeMode::Plain, DecodeMode::MiscorrectionFree] {
        group.throughput(Throughput::Elements(sim_config(1, mode).max_bits));
        for (label, workers) in [("sequential", 1), ("parallel", parallel)] {
            let cfg = sim_config(workers, mode);
            group.bench_with_input(BenchmarkId::new(label, mode.as_str()), &cfg, |b, cfg| {
                b.iter(|| black_box(run_sim(&code, &channel, cfg).unwrap().errors))
            });
        }
    }
    group.finish();
}

fn bench_map(c: &mut Criterion) {
    let items: Vec<u64> = (0..256).collect();
    let work = |&x: &u64| (0..20_000u64).fold(x, |acc, k| acc.wrapping_mul(6364136223846793005).wrapping_add(k));
    let mut group = c.benchmark_group("map_ordered");
    for (label, workers) in [("sequential", 1), ("parallel", default_workers().max(2))] {
        group.bench_function(label, |b| b.iter(|| black_box(map_ordered(&items, workers, work))));
    }
    group.finish();
}

criterion_group!(benches, bench_sim, bench_map);
criterion_main!(benches);
