//! Compare symbolic verdicts with window statistics at growing scales.
//!
//! Run with `cargo run --release --example oracle`.

use delta_calc::dsl::parse_set;
use delta_calc::oracle::{cross_validate, SCALES};
use delta_calc::Ideal;

fn main() -> delta_calc::Result<()> {
    for expr in ["ap(p=4, r=1)", "blocks(s=1, b=2, len=linear)", "blocks(s=1, b=2, len=const(0))"] {
        let a = parse_set(expr)?;
        let cv = cross_validate(&a, Ideal::Fin, &SCALES)?;
        println!("{a}");
        println!("  large {} (gaps {:?}), thick {} (runs {:?})", cv.large.verdict, cv.large.trend, cv.thick.verdict, cv.thick.trend);
        println!("  Δ shifts checked {}, confirmed {}, contradicted {:?}", cv.delta.checked, cv.delta.confirmed.len(), cv.delta.contradicted);
        for f in &cv.findings {
            println!("  {:?} {}: {}", f.severity, f.property, f.detail);
        }
    }
    Ok(())
}
