//! The two cover lemmas on concrete sets: a large witness transfers to `Δ_I(A)`,
//! and a large union splits into a Δ cover or a shifted cover of the other part.
//!
//! Run with `cargo run --example lemmas`.

use delta_calc::dsl::parse_set;
use delta_calc::theorems::{lemma_large_verify, lemma_union_decompose, LemmaUnionTrace};
use delta_calc::{Ideal, SymbolicSet};

fn main() -> delta_calc::Result<()> {
    let class = parse_set("ap(p=3, r=1)")?;
    let r = lemma_large_verify(&class, &[0, 1, 2], Ideal::Fin)?;
    println!("F = {:?}: Δ = {}, F + Δ = Z decided exactly: {}", r.f, r.delta, r.cover_exact);

    let cases = [("ap(p=2, r=0)", "ap(p=2, r=1)", vec![0, 1]), ("blocks(s=1, b=2, len=const(0))", "complement(blocks(s=1, b=2, len=const(0)))", vec![0])];
    for (a, b, f) in cases {
        let (a, b) = (parse_set(a)?, parse_set(b)?);
        let x = a.union(&b);
        match lemma_union_decompose(&x, &a, &b, &f, Ideal::Fin)? {
            LemmaUnionTrace::DeltaCover { f, delta, verified } => {
                println!("A = {a}: F = {f:?} already covers with Δ = {delta} (verified: {verified})");
            }
            LemmaUnionTrace::Shift { g, translates, verified, .. } => {
                let cover = SymbolicSet::minkowski_finite(&translates, &b);
                println!("A = {a}: {g} ∉ F + Δ, so T = {translates:?} gives T + B = {cover} (verified: {verified})");
            }
        }
    }
    Ok(())
}
