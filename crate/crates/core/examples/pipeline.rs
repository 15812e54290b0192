//! From a non-small set to an explicit finite `F` with `F + Δ_I(A ∩ L) = Z`.
//!
//! Run with `cargo run --example pipeline`.

use delta_calc::classify::is_small;
use delta_calc::dsl::parse_set;
use delta_calc::theorems::theorem_nonsmall_pipeline;
use delta_calc::verify::verify_certificate;
use delta_calc::Ideal;

fn main() -> delta_calc::Result<()> {
    for expr in ["blocks(s=1, b=2, len=linear)", "union(ap(p=3, r=0), blocks(s=1, b=2, len=const(0)))", "up(p=1, rpos={0}, rneg={})", "blocks(s=1, b=2, len=const(0))"] {
        let a = parse_set(expr)?;
        if is_small(&a, Ideal::Fin)?.value {
            println!("{a} is small, so the theorem says nothing about it");
            continue;
        }
        let r = theorem_nonsmall_pipeline(&a, Ideal::Fin)?;
        let check = verify_certificate(&r.a_cap_l, Ideal::Fin, &r.witness);
        println!("{a}\n  L = {}\n  F = {:?}\n  Δ(A ∩ L) ⊇ {}\n  independent check: {check:?}", r.l, r.f, r.delta);
    }
    Ok(())
}
