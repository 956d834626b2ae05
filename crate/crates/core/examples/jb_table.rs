//! Regenerates `src/stats/jb_table.rs`: Monte-Carlo upper quantiles of the
//! Jarque-Bera statistic for Gaussian samples of size 6..=100.
//!
//! cargo run --release -p jnd-core --example jb_table > crates/core/src/stats/jb_table.rs

use jnd_core::stats::jb_statistic;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

const SEED: u64 = 0x4A42_5441_424C_4521;
const REPLICATES: usize = 200_000;
const ALPHAS: [f64; 3] = [0.01, 0.05, 0.10];

fn main() {
    println!("// Generated by `examples/jb_table.rs` (seed {SEED:#x}, {REPLICATES} replicates per size).");
    println!("// Do not edit by hand.");
    println!();
    println!("pub(super) const JB_TABLE_MIN_N: usize = 6;");
    println!("pub(super) const JB_TABLE_MAX_N: usize = 100;");
    println!("pub(super) const JB_TABLE_ALPHAS: [f64; 3] = [0.01, 0.05, 0.10];");
    println!();
    println!("/// Rows are sample sizes 6..=100; columns follow `JB_TABLE_ALPHAS`.");
    println!("#[rustfmt::skip]");
    println!("pub(super) const JB_CRITICAL: [[f64; 3]; 95] = [");
    for n in 6..=100usize {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        rng.set_stream(n as u64);
        let mut xs = vec![0.0; n];
        let mut stats: Vec<f64> = (0..REPLICATES)
            .map(|_| {
                for x in xs.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                jb_statistic(&xs).expect("continuous samples have variance").0
            })
            .collect();
        stats.sort_by(f64::total_cmp);
        let q = ALPHAS.map(|a| {
            let k = ((1.0 - a) * REPLICATES as f64).ceil() as usize;
            stats[k - 1]
        });
        println!("    [{:.4}, {:.4}, {:.4}], // n = {n}", q[0], q[1], q[2]);
    }
    println!("];");
}
