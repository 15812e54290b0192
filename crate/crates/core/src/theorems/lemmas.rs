//! Executable forms of the cover lemmas and the non-small theorem over Z.

use serde::Serialize;

use crate::classify::{is_large, is_small, Certificate};
use crate::derivation::delta_symbolic;
use crate::error::{Error, Result};
use crate::ideal::{Ideal, Verdict};
use crate::num::{residue, Int};
use crate::symbolic::{Direction, Equality, SymbolicSet};

/// Radius of the pointwise re-checks done by independent membership queries.
pub const CHECK_RADIUS: Int = 10_000;

/// Radius scanned for a shift outside `F + Δ`.
pub const SHIFT_SEARCH_RADIUS: Int = 1_000_000;

/// For one residue class of `g`, the index `i` with `g - f_i ∈ Δ` on each tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueWitness {
    pub residue: u64,
    pub pos_index: usize,
    pub neg_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaLargeReport {
    pub f: Vec<Int>,
    pub ideal: Ideal,
    pub delta: SymbolicSet,
    pub delta_exact: bool,
    /// `F + Δ = Z` decided symbolically, as an equality of sets.
    pub cover_exact: bool,
    pub period: u64,
    pub residue_witnesses: Vec<ResidueWitness>,
    /// Every `g` in `[-window, window]` has an index with `g - f_i ∈ Δ`.
    pub window: Int,
}

fn tail_index(f: &[Int], delta: &SymbolicSet, r: u64, dir: Direction) -> Option<usize> {
    let base = delta.base();
    let p = base.period();
    let bits = base.tail_bits(dir);
    f.iter().position(|&fi| bits[residue(r as Int - fi, p)])
}

fn margin(f: &[Int]) -> Int {
    f.iter().map(|x| x.abs()).max().unwrap_or(0)
}

fn pointwise_cover(f: &[Int], delta: &SymbolicSet, radius: Int) -> Option<Int> {
    let m = margin(f);
    let bits = delta.materialize(-radius - m, radius + m);
    (-radius..=radius).find(|&g| !f.iter().any(|&fi| bits.get(g - fi)))
}

fn check_witness(f: &[Int]) -> Result<()> {
    if f.is_empty() {
        return Err(Error::Precondition("F must be nonempty".into()));
    }
    Ok(())
}

/// Checks that `F + A =_I Z` forces `F + Δ_I(A) = Z`, with the index behind every `g`.
pub fn lemma_large_verify(a: &SymbolicSet, f: &[Int], ideal: Ideal) -> Result<LemmaLargeReport> {
    check_witness(f)?;
    let fa = SymbolicSet::minkowski_finite(f, a);
    let pre = ideal.i_equal(&fa, &SymbolicSet::integers());
    if !pre.value {
        return Err(Error::Precondition(format!("F + A is not {ideal}-equal to Z for F = {f:?}")));
    }
    let d = delta_symbolic(a, ideal)?;
    let cover = SymbolicSet::minkowski_finite(f, &d.lower);
    if !cover.is_integers() {
        return Err(if d.exact && pre.exact {
            Error::Verification(format!("F + Δ = {cover} is not Z although F + A =_I Z"))
        } else {
            Error::UnsupportedExact(format!("certified part of Δ({a}) is too small to cover Z"))
        });
    }
    let delta = d.lower;
    let period = delta.base().period();
    let mut residue_witnesses = Vec::new();
    for r in 0..period {
        let pos = tail_index(f, &delta, r, Direction::Pos);
        let neg = tail_index(f, &delta, r, Direction::Neg);
        match (pos, neg) {
            (Some(pos_index), Some(neg_index)) => residue_witnesses.push(ResidueWitness { residue: r, pos_index, neg_index }),
            _ => return Err(Error::Verification(format!("residue {r} mod {period} has no index on some tail"))),
        }
    }
    if let Some(g) = pointwise_cover(f, &delta, CHECK_RADIUS) {
        return Err(Error::Verification(format!("no i with {g} - f_i in Δ")));
    }
    Ok(LemmaLargeReport {
        f: f.to_vec(),
        ideal,
        delta,
        delta_exact: d.exact,
        cover_exact: true,
        period,
        residue_witnesses,
        window: CHECK_RADIUS,
    })
}

/// Outcome of splitting an `I`-large `X = A ∪ B`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum LemmaUnionTrace {
    /// `F + Δ_I(A) = Z`.
    DeltaCover { f: Vec<Int>, delta: SymbolicSet, verified: bool },
    /// `g ∉ F + Δ_I(A)`, and `X` is covered by `T + B` with `T = (F - g) ∪ {0}` up to `I`.
    Shift {
        g: Int,
        translates: Vec<Int>,
        i1: SymbolicSet,
        i2: SymbolicSet,
        i1_in_ideal: Verdict,
        i2_in_ideal: Verdict,
        /// `X \ (T + B)`.
        uncovered: SymbolicSet,
        uncovered_in_ideal: Verdict,
        /// `(T + B) \ X` lies in the ideal too, so that `T + B =_I X`.
        surplus_in_ideal: Verdict,
        window: Int,
        verified: bool,
    },
}

impl LemmaUnionTrace {
    pub fn verified(&self) -> bool {
        match self {
            LemmaUnionTrace::DeltaCover { verified, .. } | LemmaUnionTrace::Shift { verified, .. } => *verified,
        }
    }
}

fn nearest_member(s: &SymbolicSet, radius: Int) -> Option<Int> {
    let mut r = 64;
    loop {
        let r_now = r.min(radius);
        let bits = s.materialize(-r_now, r_now);
        let hit = (0..=r_now).flat_map(|k| [k, -k]).find(|&g| bits.get(g));
        if hit.is_some() || r_now == radius {
            return hit;
        }
        r *= 64;
    }
}

/// Splits `X = A ∪ B` with `F + X =_I Z`: either `F + Δ_I(A) = Z`, or some `g` makes
/// `((F - g) ∪ {0}) + B` cover `X` up to `I`.
pub fn lemma_union_decompose(x: &SymbolicSet, a: &SymbolicSet, b: &SymbolicSet, f: &[Int], ideal: Ideal) -> Result<LemmaUnionTrace> {
    lemma_union_decompose_strict(x, a, b, f, ideal, false)
}

pub fn lemma_union_decompose_strict(
    x: &SymbolicSet,
    a: &SymbolicSet,
    b: &SymbolicSet,
    f: &[Int],
    ideal: Ideal,
    strict: bool,
) -> Result<LemmaUnionTrace> {
    check_witness(f)?;
    match a.union(b).compare(x) {
        Equality::Equal => {}
        Equality::EqualAtHorizon(_) if !strict => {}
        Equality::EqualAtHorizon(h) => return Err(Error::UnsupportedExact(format!("A ∪ B = X only checked up to {h}"))),
        Equality::Unequal(p) => return Err(Error::Precondition(format!("A ∪ B differs from X at {p}"))),
    }
    let pre = ideal.i_equal(&SymbolicSet::minkowski_finite(f, x), &SymbolicSet::integers());
    if !pre.value || (strict && !pre.exact) {
        return Err(Error::Precondition(format!("F + X is not {ideal}-equal to Z for F = {f:?}")));
    }
    let d = delta_symbolic(a, ideal)?;
    if strict && !d.exact {
        return Err(Error::UnsupportedExact(format!("Δ of {a} has no closed form")));
    }
    if SymbolicSet::minkowski_finite(f, &d.lower).is_integers() {
        let verified = pointwise_cover(f, &d.lower, CHECK_RADIUS).is_none();
        return Ok(LemmaUnionTrace::DeltaCover { f: f.to_vec(), delta: d.lower, verified });
    }
    let outside = SymbolicSet::minkowski_finite(f, &d.set).complement();
    let g = nearest_member(&outside, SHIFT_SEARCH_RADIUS)
        .ok_or_else(|| Error::Verification(format!("no g within {SHIFT_SEARCH_RADIUS} outside F + Δ")))?;
    Ok(shift_branch(x, a, b, f, ideal, g))
}

fn shift_branch(x: &SymbolicSet, a: &SymbolicSet, b: &SymbolicSet, f: &[Int], ideal: Ideal, g: Int) -> LemmaUnionTrace {
    let t: Vec<Int> = f.iter().map(|&fi| g - fi).collect();
    let i1 = SymbolicSet::union_all(&t.iter().map(|&ti| a.intersection(&a.translate(-ti))).collect::<Vec<_>>());
    let reach = SymbolicSet::union_all(&t.iter().map(|&ti| x.translate(-ti)).collect::<Vec<_>>());
    let i2 = x.difference(&reach);
    let mut translates: Vec<Int> = f.iter().map(|&fi| fi - g).chain(std::iter::once(0)).collect();
    translates.sort_unstable();
    translates.dedup();
    let tb = SymbolicSet::minkowski_finite(&translates, b);
    let uncovered = x.difference(&tb);
    let i1_in_ideal = ideal.contains(&i1);
    let i2_in_ideal = ideal.contains(&i2);
    let uncovered_in_ideal = ideal.contains(&uncovered);
    let surplus_in_ideal = ideal.contains(&tb.difference(x));
    let (lo, hi) = (-CHECK_RADIUS, CHECK_RADIUS);
    let m = margin(&t).max(margin(&translates));
    let (wa, wx, wb) = (a.materialize(lo - m, hi + m), x.materialize(lo - m, hi + m), b.materialize(lo - m, hi + m));
    let (w1, w2) = (i1.materialize(lo, hi), i2.materialize(lo, hi));
    let window_ok = (lo..=hi).all(|h| {
        let in_i1 = wa.get(h) && t.iter().any(|&ti| wa.get(h + ti));
        let in_i2 = wx.get(h) && t.iter().all(|&ti| !wx.get(h + ti));
        let covered = translates.iter().any(|&s| wb.get(h - s));
        in_i1 == w1.get(h) && in_i2 == w2.get(h) && (!wx.get(h) || covered || in_i1 || in_i2)
    });
    let verified = i1_in_ideal.value && i2_in_ideal.value && uncovered_in_ideal.value && window_ok;
    LemmaUnionTrace::Shift {
        g,
        translates,
        i1,
        i2,
        i1_in_ideal,
        i2_in_ideal,
        uncovered,
        uncovered_in_ideal,
        surplus_in_ideal,
        window: CHECK_RADIUS,
        verified,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub set: SymbolicSet,
    pub ideal: Ideal,
    pub l: SymbolicSet,
    pub f: Vec<Int>,
    pub a_cap_l: SymbolicSet,
    /// Certified part of `Δ_I(A ∩ L)` with `F + Δ = Z`.
    pub delta: SymbolicSet,
    /// `Δ_I(A ∩ L) ⊆ Δ_I(A)` was checked pointwise on `[-window, window]`.
    pub window: Int,
    pub witness: Certificate,
}

/// From a non-small `A` to an explicit `F` with `F + Δ_I(A ∩ L) = Z`.
pub fn theorem_nonsmall_pipeline(a: &SymbolicSet, ideal: Ideal) -> Result<PipelineReport> {
    let small = is_small(a, ideal)?;
    if small.value {
        return Err(Error::Precondition(format!("{a} is {ideal}-small")));
    }
    let Certificate::NonSmallWitness { l, f_l, .. } = small.certificate else {
        return Err(Error::UnsupportedExact(format!("non-smallness of {a} has no structural witness")));
    };
    let a_l = a.intersection(&l);
    let rest = l.difference(a);
    let rest_large = is_large(&rest, ideal)?;
    if rest_large.value {
        return Err(Error::Verification(format!("L \\ A = {rest} is large, so L does not witness non-smallness")));
    }
    match lemma_union_decompose(&l, &a_l, &rest, &f_l, ideal)? {
        LemmaUnionTrace::DeltaCover { delta, verified: true, .. } => {
            let full = delta_symbolic(a, ideal)?;
            let (wd, wf) = (delta.materialize(-CHECK_RADIUS, CHECK_RADIUS), full.set.materialize(-CHECK_RADIUS, CHECK_RADIUS));
            if let Some(g) = (-CHECK_RADIUS..=CHECK_RADIUS).find(|&g| wd.get(g) && !wf.get(g)) {
                return Err(Error::Verification(format!("{g} is in Δ(A ∩ L) but not in Δ(A)")));
            }
            let witness = Certificate::DeltaLargeWitness { f: f_l.clone(), delta: delta.clone() };
            Ok(PipelineReport { set: a.clone(), ideal, l, f: f_l, a_cap_l: a_l, delta, window: CHECK_RADIUS, witness })
        }
        LemmaUnionTrace::DeltaCover { .. } => Err(Error::Verification("F + Δ(A ∩ L) = Z failed its window check".into())),
        LemmaUnionTrace::Shift { g, verified, .. } => Err(Error::Verification(format!(
            "shift branch at g = {g} (verified: {verified}) would make L \\ A large, contradicting the witness"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::LenLaw;

    fn pow2() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 0, false).unwrap()
    }

    #[test]
    fn lemma_large_examples() {
        let a = SymbolicSet::progression(3, 0).unwrap();
        let r = lemma_large_verify(&a, &[0, 1, 2], Ideal::Fin).unwrap();
        assert_eq!(r.delta, a);
        assert_eq!(r.residue_witnesses.len(), 3);
        assert_eq!(r.residue_witnesses[1], ResidueWitness { residue: 1, pos_index: 1, neg_index: 1 });
        let z = lemma_large_verify(&SymbolicSet::integers(), &[0], Ideal::Fin).unwrap();
        assert!(z.delta.is_integers());
        assert!(matches!(lemma_large_verify(&a, &[0, 1], Ideal::Fin), Err(Error::Precondition(_))));
    }

    #[test]
    fn lemma_union_shift_branch_for_powers_of_two() {
        let x = SymbolicSet::integers();
        let a = pow2();
        let b = a.complement();
        let t = lemma_union_decompose(&x, &a, &b, &[0], Ideal::Fin).unwrap();
        let LemmaUnionTrace::Shift { g, i1, i2, uncovered, translates, .. } = &t else { panic!("{t:?}") };
        assert_eq!(*g, 1);
        assert_eq!(*i1, SymbolicSet::finite([1]));
        assert!(i2.is_empty_exact());
        assert_eq!(*uncovered, SymbolicSet::finite([1]));
        assert_eq!(translates, &vec![-1, 0]);
        assert!(t.verified());
    }

    #[test]
    fn lemma_union_delta_cover_branch() {
        let x = SymbolicSet::progression(2, 0).unwrap();
        let t = lemma_union_decompose(&x, &x, &SymbolicSet::empty(), &[0, 1], Ideal::Fin).unwrap();
        let LemmaUnionTrace::DeltaCover { delta, verified, .. } = t else { panic!() };
        assert_eq!(delta, x);
        assert!(verified);
        let bad = lemma_union_decompose(&x, &x, &SymbolicSet::empty(), &[0], Ideal::Fin);
        assert!(matches!(bad, Err(Error::Precondition(_))));
    }

    #[test]
    fn pipeline_examples() {
        let a = SymbolicSet::progression(3, 1).unwrap();
        let r = theorem_nonsmall_pipeline(&a, Ideal::Fin).unwrap();
        assert_eq!(r.f, vec![0, 1, 2]);
        assert_eq!(r.delta, SymbolicSet::progression(3, 0).unwrap());
        let g = SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, false).unwrap();
        let r = theorem_nonsmall_pipeline(&g, Ideal::Fin).unwrap();
        assert_eq!(r.f, vec![0]);
        assert!(r.delta.is_integers());
        let r = theorem_nonsmall_pipeline(&SymbolicSet::integers(), Ideal::Trivial).unwrap();
        assert_eq!(r.f, vec![0]);
        assert!(matches!(theorem_nonsmall_pipeline(&pow2(), Ideal::Fin), Err(Error::Precondition(_))));
    }
}
