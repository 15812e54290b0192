//! The decomposition bound `φ(n)` next to measured minimum covers of periodic partitions.
//!
//! Run with `cargo run --example partition`.

use delta_calc::corpus::DEFAULT_SEED;
use delta_calc::theorems::{double_exp_bound, partition_experiment, phi_with_argmax, random_partition, PartitionSpec};
use delta_calc::Ideal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> delta_calc::Result<()> {
    for n in 2..=8 {
        let v = phi_with_argmax(n)?;
        println!("φ({n}) = {} at x = {}, double exponential bound {}", v.value, v.argmax, double_exp_bound(n)?);
    }
    let fixed = PartitionSpec::parse_parts(6, "0,3|1,4|2,5")?;
    let r = partition_experiment(&fixed, Ideal::Fin)?;
    println!("{fixed}: best part {} needs {} translates (≤ φ: {}, ≤ n: {})", r.best_part + 1, r.min_cover, r.leq_phi, r.leq_n);

    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..5 {
        let spec = random_partition(&mut rng, 12, 4)?;
        let r = partition_experiment(&spec, Ideal::Fin)?;
        println!("{spec}: min cover {} against φ(4) = {}", r.min_cover, r.phi_n);
    }
    Ok(())
}
