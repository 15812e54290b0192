//! Both cover lemmas checked over every subset of the shipped small groups.
//!
//! Run with `cargo run --release --example finite_groups`.

use std::sync::Arc;

use delta_calc::derivation::delta_finite_group;
use delta_calc::theorems::{exhaustive_finite_validation, FiniteValidationConfig};
use delta_calc::{FiniteGroup, FiniteSubset, Ideal};

fn main() -> delta_calc::Result<()> {
    let s3 = Arc::new(FiniteGroup::s3());
    let a = FiniteSubset::new(&s3, [0, 1])?;
    println!("in S3, Δ({:?}) = {:?}", a.elements(), delta_finite_group(&a, Ideal::Trivial)?.elements());

    let cfg = FiniteValidationConfig { union_samples: 20_000, ..FiniteValidationConfig::default() };
    for g in FiniteGroup::shipped() {
        let r = exhaustive_finite_validation(&Arc::new(g), &cfg)?;
        println!(
            "{:<3} order {}: {} large pairs, {} union triples ({}), {} counterexamples",
            r.group,
            r.order,
            r.large_pairs,
            r.union_triples,
            if r.union_exhaustive { "all" } else { "sampled" },
            r.counterexamples()
        );
    }
    Ok(())
}
