//! Decide the size notions of a few sets under both ideals and re-check every certificate.
//!
//! Run with `cargo run --example classify`.

use delta_calc::classify::classify_all;
use delta_calc::dsl::parse_set;
use delta_calc::verify::verify_certificate;
use delta_calc::Ideal;

fn main() -> delta_calc::Result<()> {
    let exprs = [
        "ap(p=3, r=1)",
        "blocks(s=1, b=2, len=const(0))",
        "blocks(s=1, b=2, len=linear)",
        "union(ap(p=4, r=0), blocks(s=1, b=2, len=const(0)))",
        "up(p=5, rpos={1,2}, rneg={})",
    ];
    for expr in exprs {
        let a = parse_set(expr)?;
        for ideal in [Ideal::Fin, Ideal::Trivial] {
            let r = classify_all(&a, ideal)?;
            println!("{a}  [{ideal}]");
            for (name, d) in [("large", &r.large), ("thick", &r.thick), ("prethick", &r.prethick), ("small", &r.small), ("delta-large", &r.delta_large)] {
                let check = verify_certificate(&a, ideal, &d.certificate);
                println!("  {name:<12} {:<5} exact={:<5} check={check:?}", d.value, d.exact);
            }
        }
    }
    Ok(())
}
