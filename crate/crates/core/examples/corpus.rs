//! Parse set expressions, report diagnostics, and summarize the shipped corpus.
//!
//! Run with `cargo run --example corpus`.

use std::collections::BTreeMap;

use delta_calc::classify::classify_all;
use delta_calc::corpus::{corpus, DEFAULT_SEED};
use delta_calc::dsl::parse_set_expr;
use delta_calc::Ideal;

fn main() -> delta_calc::Result<()> {
    for text in ["union(ap(p=2, r=0), translate(fin({1, 5}), g=-3))", "blocks(s=1, b=1, len=linear)", "ap(p=3 r=0)"] {
        match parse_set_expr(text) {
            Ok(e) => println!("parsed {e}"),
            Err(d) => println!("{text}\n  {d}"),
        }
    }
    let mut tally: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for entry in corpus(DEFAULT_SEED, 40) {
        let r = classify_all(&entry.set()?, Ideal::Fin)?;
        let t = tally.entry(format!("{:?}", entry.category)).or_default();
        t.0 += 1;
        t.1 += r.small.value as usize;
        t.2 += r.delta_large.value as usize;
    }
    for (category, (sets, small, delta_large)) in tally {
        println!("{category:<9} {sets:>3} sets, {small:>3} small, {delta_large:>3} Δ-large");
    }
    Ok(())
}
