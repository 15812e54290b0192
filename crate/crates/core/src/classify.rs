//! Large, thick, prethick, small and Δ-large, each decided with a certificate.

use serde::Serialize;

use crate::cover::greedy_translate_cover;
use crate::derivation::{delta_symbolic, DeltaResult};
use crate::error::Result;
use crate::ideal::Ideal;
use crate::num::{lcm, Int};
use crate::oracle::{max_gap_with_edges, max_run, SCALES};
use crate::symbolic::{BlockFamily, Direction, LenLaw, Periodic, SymbolicSet};

/// Radius of the window used to bound short-range behaviour in certificates.
pub const LOCAL_RADIUS: Int = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotLargeReason {
    /// No members toward this end.
    EmptyTail,
    /// Members toward this end, with gaps growing without bound.
    UnboundedGaps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ThickRule {
    /// Every residue class is present toward this end.
    FullResidueSide { direction: Direction },
    /// Blocks of unbounded length.
    GrowingBlocks { direction: Direction },
}

/// Why a component keeps a set small.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRule {
    pub component: String,
    pub rule: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `F + A` equals Z modulo the ideal.
    LargeWitness { f: Vec<Int> },
    NotLarge { direction: Direction, reason: NotLargeReason },
    ThickWitness { rule: ThickRule },
    /// Runs of members never exceed `run_bound`.
    NotThick { run_bound: Int },
    /// `F + A` is thick.
    PrethickWitness { f: Vec<Int>, rule: ThickRule },
    /// Every component is finite or a family of bounded blocks.
    SmallWitness { components: Vec<ComponentRule> },
    /// `L` is large with witness `f_l`, and `(Z \ A) ∩ L` is not large toward `direction`.
    NonSmallWitness { l: SymbolicSet, f_l: Vec<Int>, direction: Direction, failure: String },
    /// `F + Δ(A) = Z`.
    DeltaLargeWitness { f: Vec<Int>, delta: SymbolicSet },
    NotDeltaLarge { delta: SymbolicSet, direction: Direction, reason: NotLargeReason },
    /// Decided from window statistics only.
    Window { note: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub value: bool,
    pub exact: bool,
    pub certificate: Certificate,
}

impl Decision {
    fn exact(value: bool, certificate: Certificate) -> Decision {
        Decision { value, exact: true, certificate }
    }
    fn window(value: bool, note: String) -> Decision {
        Decision { value, exact: false, certificate: Certificate::Window { note } }
    }
}

/// Periodic material that is dense toward one end, with its holes.
struct Dense<'a> {
    base: &'a Periodic,
    holes: &'a [BlockFamily],
}

enum Side {
    /// Bounded gaps toward this end, with the components responsible.
    Syndetic,
    Sparse(NotLargeReason),
    Unknown,
}

fn up_like(a: &SymbolicSet) -> Vec<Dense<'_>> {
    let mut v = vec![Dense { base: a.base(), holes: &[] }];
    for c in a.coblocks() {
        v.push(Dense { base: c.base(), holes: c.minus() });
    }
    v
}

fn growing_hole<'a>(d: &Dense<'a>, dir: Direction) -> Option<&'a BlockFamily> {
    d.holes.iter().find(|h| h.side() == dir && h.len_law() == LenLaw::Linear)
}

fn syndetic_parts<'a>(a: &'a SymbolicSet, dir: Direction) -> Vec<Dense<'a>> {
    up_like(a).into_iter().filter(|d| !d.base.tail_empty(dir) && growing_hole(d, dir).is_none()).collect()
}

fn side_status(a: &SymbolicSet, dir: Direction) -> Side {
    if !syndetic_parts(a, dir).is_empty() {
        return Side::Syndetic;
    }
    if !a.is_exact() {
        return Side::Unknown;
    }
    let partial: Vec<Dense<'_>> = up_like(a).into_iter().filter(|d| !d.base.tail_empty(dir)).collect();
    let fams: Vec<&BlockFamily> = a.block_families().iter().filter(|f| f.side() == dir).collect();
    match partial.as_slice() {
        [] if fams.is_empty() => Side::Sparse(NotLargeReason::EmptyTail),
        [] => Side::Sparse(NotLargeReason::UnboundedGaps),
        [d] => {
            let h = growing_hole(d, dir).expect("non-syndetic dense part has a growing hole");
            // the other families must stay far from the hole's blocks
            let separated = fams
                .iter()
                .all(|f| f.len_law() != LenLaw::Linear || (f.base() == h.base() && f.frame().0 != h.frame().0));
            if separated {
                Side::Sparse(NotLargeReason::UnboundedGaps)
            } else {
                Side::Unknown
            }
        }
        _ => Side::Unknown,
    }
}

fn scale_trend_bounded(values: &[Int]) -> bool {
    values.windows(2).last().is_some_and(|w| w[0] == w[1])
}

/// Gap statistics of the members of `a` toward one end, including the window edge.
fn side_gaps(a: &SymbolicSet, dir: Direction) -> Vec<Int> {
    SCALES
        .iter()
        .map(|&n| {
            let bits = match dir {
                Direction::Pos => a.materialize(0, n),
                Direction::Neg => a.materialize(-n, 0),
            };
            let mut prev = bits.lo() - 1;
            let mut best = 0;
            for x in bits.ones().chain(std::iter::once(bits.hi() + 1)) {
                best = best.max(x - prev);
                prev = x;
            }
            best
        })
        .collect()
}

fn cover_for_side(parts: &[Dense<'_>], dir: Direction) -> Vec<Int> {
    let p = parts.iter().fold(1, |acc, d| lcm(acc, d.base.period()));
    let mut res = vec![false; p as usize];
    let mut mass: u64 = 0;
    for d in parts {
        let q = d.base.period();
        for r in 0..p {
            if d.base.tail_bits(dir)[(r % q) as usize] {
                res[r as usize] = true;
            }
        }
        for h in d.holes.iter().filter(|h| h.side() == dir) {
            if let LenLaw::Const(c) = h.len_law() {
                mass += c + 1;
            }
        }
    }
    let rs: Vec<u64> = (0..p).filter(|&r| res[r as usize]).collect();
    let f0 = greedy_translate_cover(&rs, p).expect("nonempty residues");
    // each f + k p with k <= mass steps over any cluster of removed class members
    let mut f: Vec<Int> = Vec::new();
    for &x in &f0 {
        for k in 0..=mass {
            f.push(x as Int + (k * p) as Int);
        }
    }
    f
}

/// Largeness witness: `F` with `F + A` equal to Z modulo the ideal.
pub fn is_large(a: &SymbolicSet, ideal: Ideal) -> Result<Decision> {
    let pos = side_status(a, Direction::Pos);
    let neg = side_status(a, Direction::Neg);
    for (s, dir) in [(&pos, Direction::Pos), (&neg, Direction::Neg)] {
        if let Side::Sparse(reason) = s {
            return Ok(Decision::exact(false, Certificate::NotLarge { direction: dir, reason: *reason }));
        }
    }
    if let (Side::Syndetic, Side::Syndetic) = (&pos, &neg) {
        let mut f = cover_for_side(&syndetic_parts(a, Direction::Pos), Direction::Pos);
        f.extend(cover_for_side(&syndetic_parts(a, Direction::Neg), Direction::Neg));
        f.sort_unstable();
        f.dedup();
        let covered = SymbolicSet::minkowski_finite(&f, a);
        let missing = SymbolicSet::integers().difference(&covered);
        if missing.is_finite_exact() {
            if ideal == Ideal::Trivial {
                let pts = missing.base().points().unwrap_or_default();
                if !pts.is_empty() {
                    let a0 = nearest_member(a);
                    f.extend(pts.iter().map(|x| x - a0));
                    f.sort_unstable();
                    f.dedup();
                }
            }
            return Ok(Decision::exact(true, Certificate::LargeWitness { f }));
        }
        return Ok(Decision::window(true, format!("cover F = {f:?} not confirmed structurally")));
    }
    let (gp, gn) = (side_gaps(a, Direction::Pos), side_gaps(a, Direction::Neg));
    let value = scale_trend_bounded(&gp) && scale_trend_bounded(&gn);
    Ok(Decision::window(value, format!("edge gaps toward +inf {gp:?}, toward -inf {gn:?}")))
}

/// A member of `a` closest to 0 (searching outward).
fn nearest_member(a: &SymbolicSet) -> Int {
    let mut r: Int = 64;
    loop {
        if let Some(x) = a.materialize(-r, r).ones().min_by_key(|x| (x.abs(), *x)) {
            return x;
        }
        r *= 4;
    }
}

fn dense_residue_union(a: &SymbolicSet, dir: Direction) -> bool {
    let parts = up_like(a);
    let p = parts.iter().fold(1, |acc, d| lcm(acc, d.base.period()));
    (0..p).all(|r| parts.iter().any(|d| d.base.tail_bits(dir)[(r % d.base.period()) as usize]))
}

fn growing_family(a: &SymbolicSet) -> Option<&BlockFamily> {
    a.block_families().iter().find(|f| f.len_law() == LenLaw::Linear)
}

fn thick_rule(a: &SymbolicSet) -> Option<ThickRule> {
    for dir in [Direction::Pos, Direction::Neg] {
        if dense_residue_union(a, dir) {
            return Some(ThickRule::FullResidueSide { direction: dir });
        }
    }
    growing_family(a).map(|f| ThickRule::GrowingBlocks { direction: f.side() })
}

pub fn is_thick(a: &SymbolicSet) -> Result<Decision> {
    if let Some(rule) = thick_rule(a) {
        return Ok(Decision::exact(true, Certificate::ThickWitness { rule }));
    }
    if !a.is_exact() {
        let runs: Vec<Int> = SCALES.iter().map(|&n| max_run(&crate::oracle::materialize(a, n).expect("scale within cap"))).collect();
        let value = runs.windows(2).all(|w| w[1] > w[0]);
        return Ok(Decision::window(value, format!("max runs {runs:?}")));
    }
    let parts = up_like(a);
    let p = parts.iter().fold(1, |acc, d| lcm(acc, d.base.period())) as Int;
    let mass: Int = a
        .block_families()
        .iter()
        .map(|f| match f.len_law() {
            LenLaw::Const(c) => c as Int + 1,
            LenLaw::Linear => 0,
        })
        .sum();
    let local = max_run(&crate::oracle::materialize(a, LOCAL_RADIUS).expect("local radius within cap"));
    Ok(Decision::exact(false, Certificate::NotThick { run_bound: local.max(p * (mass + 1) + mass) }))
}

fn prethick_witness(a: &SymbolicSet) -> Option<(Vec<Int>, ThickRule)> {
    for d in up_like(a) {
        for dir in [Direction::Pos, Direction::Neg] {
            if !d.base.tail_empty(dir) {
                let f = (0..d.base.period() as Int).collect();
                return Some((f, ThickRule::FullResidueSide { direction: dir }));
            }
        }
    }
    growing_family(a).map(|f| (vec![0], ThickRule::GrowingBlocks { direction: f.side() }))
}

fn small_rules(a: &SymbolicSet) -> Vec<ComponentRule> {
    let mut out = Vec::new();
    if !a.base().is_empty() {
        out.push(ComponentRule { component: SymbolicSet::from(a.base().clone()).to_string(), rule: "finite".into() });
    }
    for f in a.block_families() {
        let c = match f.len_law() {
            LenLaw::Const(c) => c,
            LenLaw::Linear => unreachable!("growing families are prethick"),
        };
        out.push(ComponentRule {
            component: SymbolicSet::from_family(f.clone()).to_string(),
            rule: format!("blocks of length at most {}", c + 1),
        });
    }
    out
}

pub fn is_prethick(a: &SymbolicSet) -> Result<Decision> {
    if let Some((f, rule)) = prethick_witness(a) {
        return Ok(Decision::exact(true, Certificate::PrethickWitness { f, rule }));
    }
    if !a.is_exact() {
        let d = is_small_window(a);
        return Ok(Decision::window(!d.0, d.1));
    }
    Ok(Decision::exact(false, Certificate::SmallWitness { components: small_rules(a) }))
}

fn is_small_window(a: &SymbolicSet) -> (bool, String) {
    let f: Vec<Int> = (0..8).collect();
    let spread = SymbolicSet::minkowski_finite(&f, a);
    let runs: Vec<Int> =
        SCALES.iter().map(|&n| max_run(&crate::oracle::materialize(&spread, n).expect("scale within cap"))).collect();
    (scale_trend_bounded(&runs), format!("runs of [0,7] + A: {runs:?}"))
}

/// Smallness in Z: small exactly when not prethick. The ideal does not change the verdict
/// since a nonempty set is `I`-large for both shipped ideals exactly when it is large.
pub fn is_small(a: &SymbolicSet, _ideal: Ideal) -> Result<Decision> {
    if let Some(cert) = non_small_witness(a) {
        return Ok(Decision::exact(false, cert));
    }
    if !a.is_exact() {
        let (small, note) = is_small_window(a);
        return Ok(Decision::window(small, note));
    }
    Ok(Decision::exact(true, Certificate::SmallWitness { components: small_rules(a) }))
}

/// Explicit large `L` with `(Z \ A) ∩ L` not large, when a structural reason exists.
pub fn non_small_witness(a: &SymbolicSet) -> Option<Certificate> {
    for d in up_like(a) {
        for dir in [Direction::Pos, Direction::Neg] {
            let rs = d.base.residues(dir);
            if let Some(&r) = rs.first() {
                let p = d.base.period();
                let l = SymbolicSet::progression(p, r).expect("valid progression");
                return Some(Certificate::NonSmallWitness {
                    l,
                    f_l: (0..p as Int).collect(),
                    direction: dir,
                    failure: format!(
                        "A contains the class {r} mod {p} toward {dir} up to sparse holes, so (Z \\ A) ∩ L has unbounded gaps there"
                    ),
                });
            }
        }
    }
    growing_family(a).map(|f| Certificate::NonSmallWitness {
        l: SymbolicSet::integers(),
        f_l: vec![0],
        direction: f.side(),
        failure: "Z \\ A misses every block of a family with unbounded block length".into(),
    })
}

/// Δ-largeness, with the Δ computation it was based on.
pub fn is_delta_large_with(a: &SymbolicSet, ideal: Ideal) -> Result<(Decision, DeltaResult)> {
    let d = delta_symbolic(a, ideal)?;
    let lower = is_large(&d.lower, Ideal::Trivial)?;
    if lower.value && lower.exact {
        let Certificate::LargeWitness { f } = lower.certificate else { unreachable!("exact large verdicts carry F") };
        let cert = Certificate::DeltaLargeWitness { f, delta: d.lower.clone() };
        return Ok((Decision::exact(true, cert), d));
    }
    if d.exact && lower.exact {
        let Certificate::NotLarge { direction, reason } = lower.certificate else {
            unreachable!("exact not-large verdicts carry a direction")
        };
        let cert = Certificate::NotDeltaLarge { delta: d.set.clone(), direction, reason };
        return Ok((Decision::exact(false, cert), d));
    }
    let approx = is_large(&d.set, Ideal::Trivial)?;
    Ok((Decision::window(approx.value, format!("Δ not exact; window estimate {}", d.set)), d))
}

pub fn is_delta_large(a: &SymbolicSet, ideal: Ideal) -> Result<Decision> {
    Ok(is_delta_large_with(a, ideal)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub set: SymbolicSet,
    pub ideal: Ideal,
    pub exact_set: bool,
    pub large: Decision,
    pub thick: Decision,
    pub prethick: Decision,
    pub small: Decision,
    pub delta_large: Decision,
    pub delta: SymbolicSet,
    pub delta_exact: bool,
    /// Violated consistency laws among the exact verdicts; empty when all hold.
    pub inconsistencies: Vec<String>,
}

pub fn classify_all(a: &SymbolicSet, ideal: Ideal) -> Result<ClassificationReport> {
    let large = is_large(a, ideal)?;
    let thick = is_thick(a)?;
    let prethick = is_prethick(a)?;
    let small = is_small(a, ideal)?;
    let (delta_large, d) = is_delta_large_with(a, ideal)?;
    let mut bad = Vec::new();
    let mut law = |holds: bool, deps: &[&Decision], name: &str| {
        if deps.iter().all(|d| d.exact) && !holds {
            bad.push(name.to_string());
        }
    };
    law(small.value != prethick.value, &[&small, &prethick], "small xor prethick");
    law(!large.value || prethick.value, &[&large, &prethick], "large implies prethick");
    law(!thick.value || prethick.value, &[&thick, &prethick], "thick implies prethick");
    law(!large.value || !small.value, &[&large, &small], "large implies not small");
    law(!thick.value || !small.value, &[&thick, &small], "thick implies not small");
    law(small.value || delta_large.value, &[&small, &delta_large], "not small implies delta-large");
    law(!large.value || delta_large.value, &[&large, &delta_large], "large implies delta-large");
    Ok(ClassificationReport {
        set: a.clone(),
        ideal,
        exact_set: a.is_exact(),
        large,
        thick,
        prethick,
        small,
        delta_large,
        delta: d.set,
        delta_exact: d.exact,
        inconsistencies: bad,
    })
}

/// Edge-inclusive gap statistic of a whole window, for reports.
pub fn window_gap(a: &SymbolicSet, n: Int) -> Result<Int> {
    Ok(max_gap_with_edges(&crate::oracle::materialize(a, n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow2() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 0, false).unwrap()
    }
    fn growing() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, false).unwrap()
    }
    fn witness(d: &Decision) -> Vec<Int> {
        match &d.certificate {
            Certificate::LargeWitness { f } => f.clone(),
            Certificate::DeltaLargeWitness { f, .. } => f.clone(),
            c => panic!("unexpected {c:?}"),
        }
    }

    #[test]
    fn large_examples() {
        let d = is_large(&SymbolicSet::progression(2, 0).unwrap(), Ideal::Fin).unwrap();
        assert!(d.value && d.exact);
        assert_eq!(witness(&d), vec![0, 1]);
        let d = is_large(&pow2(), Ideal::Fin).unwrap();
        assert!(!d.value && d.exact);
        assert!(matches!(
            d.certificate,
            Certificate::NotLarge { direction: Direction::Neg, reason: NotLargeReason::EmptyTail }
                | Certificate::NotLarge { direction: Direction::Pos, reason: NotLargeReason::UnboundedGaps }
        ));
        let mixed = SymbolicSet::progression(3, 0).unwrap().union(&pow2());
        let d = is_large(&mixed, Ideal::Fin).unwrap();
        assert!(d.value && d.exact);
        assert_eq!(witness(&d), vec![0, 1, 2]);
    }

    #[test]
    fn large_with_holes_and_trivial_patch() {
        let a = SymbolicSet::integers().difference(&pow2());
        let d = is_large(&a, Ideal::Trivial).unwrap();
        assert!(d.value && d.exact);
        let f = witness(&d);
        assert!(SymbolicSet::minkowski_finite(&f, &a).is_integers(), "{f:?}");
        let e = SymbolicSet::integers().difference(&SymbolicSet::finite(-5..=5));
        let d = is_large(&e, Ideal::Trivial).unwrap();
        assert!(SymbolicSet::minkowski_finite(&witness(&d), &e).is_integers());
        let d = is_large(&e, Ideal::Fin).unwrap();
        assert_eq!(witness(&d), vec![0]);
    }

    #[test]
    fn complement_of_growing_blocks_is_not_large() {
        let a = growing().complement();
        let d = is_large(&a, Ideal::Fin).unwrap();
        assert!(d.exact && !d.value, "{d:?}");
    }

    #[test]
    fn thick_examples() {
        assert!(is_thick(&growing()).unwrap().value);
        let e = is_thick(&SymbolicSet::progression(2, 0).unwrap()).unwrap();
        assert!(!e.value && e.exact);
        assert!(is_thick(&SymbolicSet::integers()).unwrap().value);
    }

    #[test]
    fn prethick_examples() {
        let d = is_prethick(&SymbolicSet::progression(3, 1).unwrap()).unwrap();
        assert!(d.value);
        assert!(matches!(&d.certificate, Certificate::PrethickWitness { f, .. } if f == &vec![0, 1, 2]));
        assert!(!is_prethick(&pow2()).unwrap().value);
        assert!(!is_prethick(&SymbolicSet::finite([4, 9])).unwrap().value);
    }

    #[test]
    fn small_examples() {
        assert!(is_small(&pow2(), Ideal::Fin).unwrap().value);
        let d = is_small(&growing(), Ideal::Fin).unwrap();
        assert!(!d.value);
        assert!(matches!(&d.certificate, Certificate::NonSmallWitness { l, .. } if l.is_integers()));
        let d = is_small(&SymbolicSet::progression(3, 1).unwrap(), Ideal::Fin).unwrap();
        assert!(matches!(&d.certificate, Certificate::NonSmallWitness { l, .. } if *l == SymbolicSet::progression(3, 1).unwrap()));
    }

    #[test]
    fn delta_large_examples() {
        let d = is_delta_large(&SymbolicSet::progression(2, 0).unwrap(), Ideal::Fin).unwrap();
        assert!(d.value && d.exact);
        assert_eq!(witness(&d), vec![0, 1]);
        assert!(!is_delta_large(&pow2(), Ideal::Fin).unwrap().value);
        let d = is_delta_large(&growing(), Ideal::Fin).unwrap();
        assert!(d.value);
        assert_eq!(witness(&d), vec![0]);
    }

    #[test]
    fn classify_all_examples() {
        let z = classify_all(&SymbolicSet::integers(), Ideal::Fin).unwrap();
        assert!(z.large.value && z.thick.value && z.prethick.value && !z.small.value && z.delta_large.value);
        let e = classify_all(&SymbolicSet::empty(), Ideal::Fin).unwrap();
        assert!(!e.large.value && !e.thick.value && !e.prethick.value && e.small.value && !e.delta_large.value);
        let p = classify_all(&pow2(), Ideal::Fin).unwrap();
        assert!(!p.large.value && !p.thick.value && !p.prethick.value && p.small.value && !p.delta_large.value);
        for r in [z, e, p] {
            assert!(r.inconsistencies.is_empty(), "{:?}", r.inconsistencies);
        }
    }
}
