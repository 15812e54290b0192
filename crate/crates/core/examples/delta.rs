//! Compute `Δ_I(A)` symbolically and print the rule that produced each contribution.
//!
//! Run with `cargo run --example delta`.

use delta_calc::derivation::delta_symbolic;
use delta_calc::dsl::parse_set;
use delta_calc::Ideal;

fn main() -> delta_calc::Result<()> {
    for expr in ["ap(p=6, r=1)", "union(ap(p=5, r=0), fin({1, 2}))", "blocks(s=1, b=2, len=linear)", "blocks(s=1, b=3, len=const(1), mirror)"] {
        let a = parse_set(expr)?;
        for ideal in [Ideal::Fin, Ideal::Trivial] {
            let d = delta_symbolic(&a, ideal)?;
            println!("Δ_{ideal}({a}) = {}  (exact: {})", d.set, d.exact);
            for t in &d.trace {
                println!("    {} × {} by {}: {}", t.left, t.right, t.rule, t.contribution);
            }
        }
    }
    Ok(())
}
