//! `Δ_I(A) = {g : (g + A) ∩ A ∉ I}` over symbolic subsets of Z and over finite groups.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::group::{difference_set, FiniteSubset};
use crate::ideal::Ideal;
use crate::num::{lcm, power_cycle, residue, Int};
use crate::oracle::{infinite_looking, pair_counts_many, scale_bitmap, SCALES, SHIFT_RADIUS};
use crate::symbolic::{BlockFamily, CoBlock, Direction, LenLaw, Opaque, Periodic, SymbolicSet};

/// Stand-in for an unbounded end of an offset interval.
const INF: Int = Int::MAX / 8;

/// Radius searched for certified differences when `Δ` under the trivial ideal
/// leaves the exact fragment.
pub const TRIVIAL_SEARCH_RADIUS: Int = 1 << 16;

/// Which rule decided a pair of components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Residues of two periodic tails.
    TailResidue,
    /// Offsets of two block families sharing a frame.
    BlockOverlap,
    /// Residues `s * b^n mod p` of block anchors against a periodic tail.
    CrossCycle,
    /// Families on opposite sides meet in finitely many points.
    OppositeSides,
    /// Exact difference set of a periodic set.
    DifferenceSet,
    /// Window counts; not a proof.
    Window,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::TailResidue => "tail-residue",
            Rule::BlockOverlap => "block-overlap",
            Rule::CrossCycle => "cross-cycle",
            Rule::OppositeSides => "opposite-sides",
            Rule::DifferenceSet => "difference-set",
            Rule::Window => "window",
        };
        f.write_str(s)
    }
}

/// One pairwise contribution to `Δ`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub left: String,
    pub right: String,
    pub rule: Rule,
    pub exact: bool,
    pub contribution: String,
}

#[derive(Clone, Debug)]
pub struct DeltaResult {
    /// Best available description of `Δ_I(A)`.
    pub set: SymbolicSet,
    /// Part of `set` certified to lie in `Δ_I(A)`; equals `set` when `exact`.
    pub lower: SymbolicSet,
    /// Every contribution was decided by a closed-form rule.
    pub exact: bool,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Debug)]
enum Part {
    Up(Periodic),
    Block(BlockFamily),
    Co(CoBlock),
    Opaque(Opaque),
}

impl Part {
    fn to_set(&self) -> SymbolicSet {
        match self {
            Part::Up(p) => SymbolicSet::from(p.clone()),
            Part::Block(f) => SymbolicSet::from_family(f.clone()),
            Part::Co(c) => SymbolicSet::from_coblock(c.clone()),
            Part::Opaque(o) => SymbolicSet::from_opaque(o.clone()),
        }
    }

    /// The periodic set a part is built on, when holes have density zero.
    fn up_like(&self) -> Option<&Periodic> {
        match self {
            Part::Up(p) => Some(p),
            Part::Co(c) => Some(c.base()),
            _ => None,
        }
    }
}

/// Infinite parts of `a`; its finite points never matter modulo finite sets.
fn parts(a: &SymbolicSet) -> Vec<Part> {
    let mut out = Vec::new();
    if !a.base().is_finite() {
        out.push(Part::Up(a.base().clone()));
    }
    out.extend(a.block_families().iter().cloned().map(Part::Block));
    out.extend(a.coblocks().iter().cloned().map(Part::Co));
    out.extend(a.opaque_parts().iter().cloned().map(Part::Opaque));
    out
}

fn add(a: Int, b: Int) -> Int {
    if a.abs() >= INF || b.abs() >= INF {
        if a.abs() >= INF { a } else { b }
    } else {
        a + b
    }
}

/// `[lo, hi]` with `±INF` ends as a periodic set.
fn interval_set(lo: Int, hi: Int) -> Periodic {
    match (lo <= -INF, hi >= INF) {
        (true, true) => Periodic::all(),
        (true, false) => Periodic::half_line_class(1, 0, hi, Direction::Neg),
        (false, true) => Periodic::half_line_class(1, 0, lo, Direction::Pos),
        (false, false) if lo <= hi => Periodic::finite(lo..=hi),
        _ => Periodic::empty(),
    }
}

/// Offset interval of a family in its frame, with `±INF` for a growing end.
fn offset_interval(f: &BlockFamily) -> (Int, Int) {
    let (lo, hi) = f.limit_offsets();
    (lo.unwrap_or(-INF), hi.unwrap_or(INF))
}

fn interval_minus(j: (Int, Int), holes: &[(Int, Int)]) -> Vec<(Int, Int)> {
    let mut cur = vec![j];
    for &(hl, hr) in holes {
        let mut next = Vec::new();
        for (l, r) in cur {
            if hr < l || hl > r {
                next.push((l, r));
                continue;
            }
            if hl > l {
                next.push((l, hl - 1));
            }
            if hr < r {
                next.push((hr + 1, r));
            }
        }
        cur = next;
    }
    cur
}

/// Data for deciding `(g + F) ∩ (U \ holes)` infinite, `F` a block family.
struct CrossCycle<'a> {
    offsets: (Int, Int),
    sign: Int,
    tail: &'a [bool],
    period: u64,
    cycle: Vec<usize>,
    holes: Vec<(Int, Int)>,
}

impl CrossCycle<'_> {
    fn holds(&self, g: Int) -> bool {
        if !self.tail.iter().any(|&b| b) {
            return false;
        }
        let j = (add(g, self.offsets.0), add(g, self.offsets.1));
        for (l, r) in interval_minus(j, &self.holes) {
            if r >= INF || l <= -INF || r - l + 1 >= self.period as Int {
                return true;
            }
            for d in l..=r {
                for &v in &self.cycle {
                    if self.tail[residue(d + self.sign * v as Int, self.period)] {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn shift_set(&self) -> Result<Periodic> {
        let p = self.period as Int;
        let mut ends: Vec<Int> = vec![0];
        for &(l, r) in &self.holes {
            ends.extend([l, r].into_iter().filter(|v| v.abs() < INF));
        }
        let m = [self.offsets.0, self.offsets.1].into_iter().filter(|v| v.abs() < INF).map(|v| v.abs()).max().unwrap_or(0);
        let lo = ends.iter().min().unwrap() - m - p - 2;
        let hi = ends.iter().max().unwrap() + m + p + 2;
        let pos: Vec<u64> = (hi + 1..=hi + p).filter(|&g| self.holds(g)).map(|g| residue(g, self.period) as u64).collect();
        let neg: Vec<u64> = (lo - p..lo).filter(|&g| self.holds(g)).map(|g| residue(g, self.period) as u64).collect();
        let base = Periodic::new(self.period, &pos, &neg)?;
        let (mut on, mut off) = (Vec::new(), Vec::new());
        for g in lo..=hi {
            match (self.holds(g), base.contains(g)) {
                (true, false) => on.push(g),
                (false, true) => off.push(g),
                _ => {}
            }
        }
        Ok(base.union(&Periodic::finite(on)).difference(&Periodic::finite(off)))
    }
}

/// Outcome for one pair: shifts `g` with `(g + X) ∩ Y` infinite, or `None`
/// when no closed form applies.
fn pair_rule(x: &Part, y: &Part) -> Result<Option<(Periodic, Rule)>> {
    match (x, y) {
        (Part::Opaque(_), _) | (_, Part::Opaque(_)) => Ok(None),
        (Part::Block(f), Part::Block(h)) => {
            if f.side() != h.side() {
                return Ok(Some((Periodic::empty(), Rule::OppositeSides)));
            }
            if f.frame().0 != h.frame().0 {
                return Ok(None);
            }
            let (a0, a1) = offset_interval(f);
            let (h0, h1) = offset_interval(h);
            let lo = if h0 <= -INF || a1 >= INF { -INF } else { h0 - a1 };
            let hi = if h1 >= INF || a0 <= -INF { INF } else { h1 - a0 };
            Ok(Some((interval_set(lo, hi), Rule::BlockOverlap)))
        }
        (Part::Block(f), other) | (other, Part::Block(f)) => {
            let u = other.up_like().expect("periodic-like part");
            let mut holes = Vec::new();
            if let Part::Co(c) = other {
                for m in c.minus() {
                    if m.side() != f.side() {
                        continue;
                    }
                    if m.frame().0 != f.frame().0 {
                        return Ok(None);
                    }
                    holes.push(offset_interval(m));
                }
            }
            let (fr, _) = f.frame();
            let cc = CrossCycle {
                offsets: offset_interval(f),
                sign: f.side().sign(),
                tail: u.tail_bits(f.side()),
                period: u.period(),
                cycle: power_cycle(fr.scale, fr.base, f.global_start(), u.period()),
                holes,
            };
            let s = cc.shift_set()?;
            // shifts were computed for (g + F) ∩ U; flip when F is the right-hand part
            let s = if matches!(x, Part::Block(_)) { s } else { s.negate() };
            Ok(Some((s, Rule::CrossCycle)))
        }
        _ => {
            let (u, v) = (x.up_like().expect("periodic-like"), y.up_like().expect("periodic-like"));
            let l = lcm(u.period(), v.period());
            let mut cls = BTreeSet::new();
            for dir in [Direction::Pos, Direction::Neg] {
                let (tu, tv) = (u.tail_bits(dir), v.tail_bits(dir));
                for r in 0..l {
                    if !tu[(r % u.period()) as usize] {
                        continue;
                    }
                    for c in 0..l {
                        if tv[((r + c) % v.period()) as usize] {
                            cls.insert(c);
                        }
                    }
                }
            }
            let cls: Vec<u64> = cls.into_iter().collect();
            Ok(Some((Periodic::new(l, &cls, &cls)?, Rule::TailResidue)))
        }
    }
}

fn describe(p: &Part) -> String {
    p.to_set().to_string()
}

/// Shifts `g` in `[-SHIFT_RADIUS, SHIFT_RADIUS]` whose window counts look infinite.
fn window_shifts(x: &Bits, y: &Bits) -> Vec<Int> {
    let shifts: Vec<Int> = (-SHIFT_RADIUS..=SHIFT_RADIUS).collect();
    let counts = pair_counts_many(x, y, &shifts, &SCALES);
    shifts.into_iter().zip(counts).filter(|(_, c)| infinite_looking(c)).map(|(g, _)| g).collect()
}

/// `Δ_I(A)` for a symbolic set.
pub fn delta_symbolic(a: &SymbolicSet, ideal: Ideal) -> Result<DeltaResult> {
    match ideal {
        Ideal::Fin => delta_fin(a),
        Ideal::Trivial => delta_trivial(a),
    }
}

/// As [`delta_symbolic`], failing with `UnsupportedExact` instead of approximating when `strict`.
pub fn delta_symbolic_strict(a: &SymbolicSet, ideal: Ideal, strict: bool) -> Result<DeltaResult> {
    let r = delta_symbolic(a, ideal)?;
    if strict && !r.exact {
        return Err(Error::UnsupportedExact(format!("Δ of {a} has no closed form")));
    }
    Ok(r)
}

fn delta_fin(a: &SymbolicSet) -> Result<DeltaResult> {
    let ps = parts(a);
    let mut bitmaps: Vec<Option<Bits>> = vec![None; ps.len()];
    let mut set = Periodic::empty();
    let mut lower = Periodic::empty();
    let mut approx: BTreeSet<Int> = BTreeSet::new();
    let mut trace = Vec::new();
    let mut exact = true;
    for i in 0..ps.len() {
        for j in i..ps.len() {
            let (x, y) = (&ps[i], &ps[j]);
            let entry = match pair_rule(x, y)? {
                Some((s, rule)) => {
                    let c = s.union(&s.negate());
                    set = set.union(&c);
                    lower = lower.union(&c);
                    TraceEntry { left: describe(x), right: describe(y), rule, exact: true, contribution: SymbolicSet::from(c).to_string() }
                }
                None => {
                    exact = false;
                    for k in [i, j] {
                        if bitmaps[k].is_none() {
                            bitmaps[k] = Some(scale_bitmap(&ps[k].to_set()));
                        }
                    }
                    let (bx, by) = (bitmaps[i].as_ref().unwrap(), bitmaps[j].as_ref().unwrap());
                    let found: BTreeSet<Int> = window_shifts(bx, by).into_iter().flat_map(|g| [g, -g]).collect();
                    approx.extend(found.iter().copied());
                    TraceEntry {
                        left: describe(x),
                        right: describe(y),
                        rule: Rule::Window,
                        exact: false,
                        contribution: SymbolicSet::finite(found).to_string(),
                    }
                }
            };
            trace.push(entry);
        }
    }
    let set = SymbolicSet::from(set.union(&Periodic::finite(approx)));
    Ok(DeltaResult { lower: SymbolicSet::from(lower), exact, set, trace })
}

fn delta_trivial(a: &SymbolicSet) -> Result<DeltaResult> {
    if a.is_periodic_only() {
        let d = difference_set_up(a)?;
        let trace = vec![TraceEntry {
            left: a.to_string(),
            right: a.to_string(),
            rule: Rule::DifferenceSet,
            exact: true,
            contribution: d.to_string(),
        }];
        return Ok(DeltaResult { set: d.clone(), lower: d, exact: true, trace });
    }
    let fin = delta_fin(a)?;
    let r = TRIVIAL_SEARCH_RADIUS;
    let w = SHIFT_RADIUS;
    let bits = a.materialize(-r - w, r + w);
    let found: Vec<Int> = (-w..=w).filter(|&g| bits.shifted_overlap_counts(&bits, g, &[r])[0] > 0).collect();
    let found = SymbolicSet::finite(found);
    let lower = fin.lower.union(&found);
    let set = fin.set.union(&found);
    let exact = lower.is_integers();
    let mut trace = fin.trace;
    trace.push(TraceEntry {
        left: a.to_string(),
        right: a.to_string(),
        rule: Rule::Window,
        exact: false,
        contribution: found.to_string(),
    });
    Ok(DeltaResult { set: if exact { lower.clone() } else { set }, lower, exact, trace })
}

/// Exact `A - A` for a set with only periodic and finite material.
pub fn difference_set_up(a: &SymbolicSet) -> Result<SymbolicSet> {
    if !a.is_periodic_only() {
        return Err(Error::UnsupportedExact(format!("difference set of {a} leaves the periodic class")));
    }
    let u = a.base();
    let p = u.period();
    let pi = p as Int;
    let w = u.window() as Int;
    let core: Vec<Int> = u.members_in(-w, w).collect();
    // first tail element beyond the window for each residue, per side
    let first_pos: Vec<Int> = u
        .residues(Direction::Pos)
        .into_iter()
        .map(|r| {
            let x = w + 1;
            x + (r as Int - x).rem_euclid(pi)
        })
        .collect();
    let first_neg: Vec<Int> = u
        .residues(Direction::Neg)
        .into_iter()
        .map(|r| {
            let y = -w - 1;
            y - (y - r as Int).rem_euclid(pi)
        })
        .collect();
    let mut out = Periodic::finite(core.iter().flat_map(|x| core.iter().map(move |y| x - y)));
    let full_classes = |firsts: &[Int]| -> Result<Periodic> {
        let cls: BTreeSet<u64> =
            firsts.iter().flat_map(|x| firsts.iter().map(move |y| residue(x - y, p) as u64)).collect();
        let cls: Vec<u64> = cls.into_iter().collect();
        Periodic::new(p, &cls, &cls)
    };
    out = out.union(&full_classes(&first_pos)?).union(&full_classes(&first_neg)?);
    for &x in &first_pos {
        for &y in &first_neg {
            let h = Periodic::half_line_class(p, x - y, x - y, Direction::Pos);
            out = out.union(&h).union(&h.negate());
        }
    }
    for &e in &core {
        for &x in &first_pos {
            let h = Periodic::half_line_class(p, x - e, x - e, Direction::Pos);
            out = out.union(&h).union(&h.negate());
        }
        for &y in &first_neg {
            let h = Periodic::half_line_class(p, y - e, y - e, Direction::Neg);
            out = out.union(&h).union(&h.negate());
        }
    }
    Ok(SymbolicSet::from(out))
}

/// `{g : gA ∩ A ≠ ∅}` by enumeration; checked against `AA^-1`.
pub fn delta_finite_group(a: &FiniteSubset, ideal: Ideal) -> Result<FiniteSubset> {
    ideal.require_proper_on_finite()?;
    let ctx = a.context();
    let members = (0..ctx.order()).filter(|&g| a.left_translate(g).bits() & a.bits() != 0);
    let d = FiniteSubset::new(ctx, members)?;
    let aa = difference_set(a);
    if d != aa {
        return Err(Error::Verification(format!("Δ({a:?}) = {d:?} differs from AA^-1 = {aa:?}")));
    }
    Ok(d)
}

/// Whether a block family has blocks of unbounded length.
pub fn is_growing(f: &BlockFamily) -> bool {
    f.len_law() == LenLaw::Linear
}
