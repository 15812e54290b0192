//! Symbolic subsets of Z built from periodic parts, block families, co-blocks
//! (a periodic set with block families removed) and, outside the exact
//! fragment, opaque boolean combinations.
//!
//! Membership is always exact. The structural rules in `derivation` and
//! `classify` need the exact fragment; [`SymbolicSet::is_exact`] reports
//! whether a value stayed inside it.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use super::blocks::{BlockFamily, LenLaw};
use super::periodic::{Direction, Periodic};
use crate::bits::Bits;
use crate::error::Result;
use crate::num::Int;

/// A periodic set minus a union of block families.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CoBlock {
    base: Periodic,
    minus: Vec<BlockFamily>,
}

impl CoBlock {
    pub fn base(&self) -> &Periodic {
        &self.base
    }
    pub fn minus(&self) -> &[BlockFamily] {
        &self.minus
    }
    fn contains(&self, x: Int) -> bool {
        self.base.contains(x) && !self.minus.iter().any(|m| m.contains(x))
    }
    fn contains_big(&self, x: &BigInt) -> bool {
        self.base.contains_big(x) && !self.minus.iter().any(|m| m.contains_big(x))
    }
}

/// Boolean combination kept by membership only.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Opaque {
    Difference(Box<SymbolicSet>, Box<SymbolicSet>),
    Intersection(Box<SymbolicSet>, Box<SymbolicSet>),
}

impl Opaque {
    fn contains(&self, x: Int) -> bool {
        match self {
            Opaque::Difference(a, b) => a.contains(x) && !b.contains(x),
            Opaque::Intersection(a, b) => a.contains(x) && b.contains(x),
        }
    }
    fn contains_big(&self, x: &BigInt) -> bool {
        match self {
            Opaque::Difference(a, b) => a.contains_big(x) && !b.contains_big(x),
            Opaque::Intersection(a, b) => a.contains_big(x) && b.contains_big(x),
        }
    }
    fn translate(&self, g: Int) -> Opaque {
        match self {
            Opaque::Difference(a, b) => Opaque::Difference(Box::new(a.translate(g)), Box::new(b.translate(g))),
            Opaque::Intersection(a, b) => Opaque::Intersection(Box::new(a.translate(g)), Box::new(b.translate(g))),
        }
    }
    fn negate(&self) -> Opaque {
        match self {
            Opaque::Difference(a, b) => Opaque::Difference(Box::new(a.negate()), Box::new(b.negate())),
            Opaque::Intersection(a, b) => Opaque::Intersection(Box::new(a.negate()), Box::new(b.negate())),
        }
    }
    fn fill(&self, bits: &mut Bits) {
        let (a, b, diff) = match self {
            Opaque::Difference(a, b) => (a, b, true),
            Opaque::Intersection(a, b) => (a, b, false),
        };
        let mut x = a.materialize(bits.lo(), bits.hi());
        let y = b.materialize(bits.lo(), bits.hi());
        if diff {
            x.andnot_with(&y);
        } else {
            x.and_with(&y);
        }
        bits.or_with(&x);
    }
}

/// Read-only view of one component.
#[derive(Debug)]
pub enum Component<'a> {
    Finite(Vec<Int>),
    Periodic(&'a Periodic),
    Blocks(&'a BlockFamily),
    CoBlocks(&'a CoBlock),
    Opaque(&'a Opaque),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicSet {
    base: Periodic,
    blocks: Vec<BlockFamily>,
    coblocks: Vec<CoBlock>,
    opaque: Vec<Opaque>,
}

/// Outcome of comparing two symbolic sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equality {
    /// Canonical forms coincide.
    Equal,
    /// No difference found on the horizon `[-h, h]`; not a proof of equality.
    EqualAtHorizon(Int),
    /// A point in exactly one of the two sets.
    Unequal(Int),
}

#[derive(Clone, Debug)]
enum Piece {
    Up(Periodic),
    Blocks(BlockFamily),
    Co(CoBlock),
    Opaque(Opaque),
}

impl Piece {
    fn into_set(self) -> SymbolicSet {
        let mut s = SymbolicSet::empty();
        match self {
            Piece::Up(p) => s.base = p,
            Piece::Blocks(b) => s.blocks.push(b),
            Piece::Co(c) => s.coblocks.push(c),
            Piece::Opaque(o) => s.opaque.push(o),
        }
        s.canonical()
    }
}

fn opaque_diff(a: SymbolicSet, b: SymbolicSet) -> SymbolicSet {
    let mut s = SymbolicSet::empty();
    s.opaque.push(Opaque::Difference(Box::new(a), Box::new(b)));
    s
}

fn opaque_inter(a: SymbolicSet, b: SymbolicSet) -> SymbolicSet {
    let mut s = SymbolicSet::empty();
    s.opaque.push(Opaque::Intersection(Box::new(a), Box::new(b)));
    s
}

fn family_set(f: BlockFamily, early: Vec<Int>) -> SymbolicSet {
    let mut s = SymbolicSet::empty();
    s.base = Periodic::finite(early);
    s.blocks.push(f);
    s.canonical()
}

/// `B \ V` for a periodic `V`; exact when V's tail on B's side is empty or full.
fn blocks_minus_up(b: &BlockFamily, v: &Periodic) -> SymbolicSet {
    let side = b.side();
    let empty_tail = v.tail_empty(side);
    let full_tail = v.tail_full(side);
    if !empty_tail && !full_tail {
        return opaque_diff(Piece::Blocks(b.clone()).into_set(), SymbolicSet::from(v.clone()));
    }
    let k = b.first_beyond(v.window() as Int + 1);
    let Ok((tail, early)) = b.split_at(k) else {
        return opaque_diff(Piece::Blocks(b.clone()).into_set(), SymbolicSet::from(v.clone()));
    };
    let pts: Vec<Int> = early.into_iter().filter(|&x| !v.contains(x)).collect();
    let mut s = SymbolicSet::from(Periodic::finite(pts));
    if empty_tail {
        s.blocks.push(tail);
    }
    s.canonical()
}

fn blocks_intersect_up(b: &BlockFamily, v: &Periodic) -> SymbolicSet {
    blocks_minus_up(b, &v.complement())
}

fn blocks_minus_blocks(b: &BlockFamily, a: &BlockFamily) -> SymbolicSet {
    if b.side() != a.side() {
        if let Some(pts) = b.intersect_opposite(a) {
            return blocks_minus_up(b, &Periodic::finite(pts));
        }
    } else if let Some((fams, pts)) = b.minus_same_frame(a) {
        let mut s = SymbolicSet::from(Periodic::finite(pts));
        s.blocks.extend(fams);
        return s.canonical();
    }
    opaque_diff(Piece::Blocks(b.clone()).into_set(), Piece::Blocks(a.clone()).into_set())
}

fn blocks_intersect_blocks(b: &BlockFamily, a: &BlockFamily) -> SymbolicSet {
    if b.side() != a.side() {
        if let Some(pts) = b.intersect_opposite(a) {
            return SymbolicSet::from(Periodic::finite(pts));
        }
    } else if let Some((fams, pts)) = b.intersect_same_frame(a) {
        let mut s = SymbolicSet::from(Periodic::finite(pts));
        s.blocks.extend(fams);
        return s.canonical();
    }
    opaque_inter(Piece::Blocks(b.clone()).into_set(), Piece::Blocks(a.clone()).into_set())
}

/// Finite intersection of two families if it can be certified exactly.
fn finite_intersection(b: &BlockFamily, a: &BlockFamily) -> Option<Vec<Int>> {
    let s = blocks_intersect_blocks(b, a);
    if s.is_exact() && s.blocks.is_empty() && s.coblocks.is_empty() {
        s.base.points()
    } else {
        None
    }
}

fn piece_minus(s: &Piece, a: &Piece) -> SymbolicSet {
    use Piece::*;
    match (s, a) {
        (Opaque(_), _) | (_, Opaque(_)) => opaque_diff(s.clone().into_set(), a.clone().into_set()),
        (Up(x), Up(y)) => SymbolicSet::from(x.difference(y)),
        (Up(x), Blocks(b)) => {
            if x.is_finite() {
                let pts = x.points().unwrap_or_default();
                SymbolicSet::from(Periodic::finite(pts.into_iter().filter(|&p| !b.contains(p))))
            } else {
                Co(CoBlock { base: x.clone(), minus: vec![b.clone()] }).into_set()
            }
        }
        (Up(x), Co(c)) => {
            let mut out = SymbolicSet::from(x.difference(&c.base));
            let w = x.intersection(&c.base);
            for m in &c.minus {
                out = out.union_raw(blocks_intersect_up(m, &w));
            }
            out.canonical()
        }
        (Blocks(b), Up(v)) => blocks_minus_up(b, v),
        (Blocks(b), Blocks(a)) => blocks_minus_blocks(b, a),
        (Blocks(b), Co(c)) => {
            let mut out = blocks_minus_up(b, &c.base);
            for m in &c.minus {
                let bm = blocks_intersect_blocks(b, m);
                out = out.union_raw(bm.intersection(&SymbolicSet::from(c.base.clone())));
            }
            out.canonical()
        }
        (Co(c), Up(v)) => Co(CoBlock { base: c.base.difference(v), minus: c.minus.clone() }).into_set(),
        (Co(c), Blocks(b)) => {
            let mut minus = c.minus.clone();
            minus.push(b.clone());
            Co(CoBlock { base: c.base.clone(), minus }).into_set()
        }
        (Co(c), Co(d)) => {
            let mut out = Co(CoBlock { base: c.base.difference(&d.base), minus: c.minus.clone() }).into_set();
            let w = c.base.intersection(&d.base);
            let c_minus = SymbolicSet { blocks: c.minus.clone(), ..SymbolicSet::empty() };
            for m in &d.minus {
                let part = blocks_intersect_up(m, &w).difference(&c_minus);
                out = out.union_raw(part);
            }
            out.canonical()
        }
    }
}

fn piece_intersect(s: &Piece, a: &Piece) -> SymbolicSet {
    use Piece::*;
    match (s, a) {
        (Opaque(_), _) | (_, Opaque(_)) => opaque_inter(s.clone().into_set(), a.clone().into_set()),
        (Up(x), Up(y)) => SymbolicSet::from(x.intersection(y)),
        (Up(v), Blocks(b)) | (Blocks(b), Up(v)) => blocks_intersect_up(b, v),
        (Up(v), Co(c)) | (Co(c), Up(v)) => {
            Co(CoBlock { base: v.intersection(&c.base), minus: c.minus.clone() }).into_set()
        }
        (Blocks(b), Blocks(a)) => blocks_intersect_blocks(b, a),
        (Blocks(b), Co(c)) | (Co(c), Blocks(b)) => {
            let within = blocks_intersect_up(b, &c.base);
            within.difference(&SymbolicSet { blocks: c.minus.clone(), ..SymbolicSet::empty() })
        }
        (Co(c), Co(d)) => {
            let mut minus = c.minus.clone();
            minus.extend(d.minus.iter().cloned());
            Co(CoBlock { base: c.base.intersection(&d.base), minus }).into_set()
        }
    }
}

impl From<Periodic> for SymbolicSet {
    fn from(p: Periodic) -> Self {
        SymbolicSet { base: p, blocks: Vec::new(), coblocks: Vec::new(), opaque: Vec::new() }
    }
}

impl SymbolicSet {
    pub fn empty() -> Self {
        SymbolicSet::from(Periodic::empty())
    }

    pub fn integers() -> Self {
        SymbolicSet::from(Periodic::all())
    }

    pub fn finite<I: IntoIterator<Item = Int>>(points: I) -> Self {
        SymbolicSet::from(Periodic::finite(points))
    }

    /// `r + pZ`.
    pub fn progression(p: u64, r: u64) -> Result<Self> {
        Ok(SymbolicSet::from(Periodic::progression(p, r % p.max(1))?))
    }

    /// Block family `t + [s*b^n, s*b^n + len(n)]`, `n >= n0`; `mirror` adds the
    /// reflection of that family through 0.
    pub fn blocks(s: u64, b: u64, len: LenLaw, t: Int, n0: u32, mirror: bool) -> Result<Self> {
        let (f, early) = BlockFamily::new(s, b, t, n0, len, Direction::Pos)?;
        let mut out = family_set(f.clone(), early.clone());
        if mirror {
            let neg = family_set(f.negate(), early.iter().map(|x| -x).collect());
            out = out.union(&neg);
        }
        Ok(out)
    }

    /// A single family on the given side, as built by [`BlockFamily::new`].
    pub fn block_family(s: u64, b: u64, len: LenLaw, t: Int, n0: u32, side: Direction) -> Result<Self> {
        let (f, early) = BlockFamily::new(s, b, t, n0, len, side)?;
        Ok(family_set(f, early))
    }

    pub fn from_family(f: BlockFamily) -> SymbolicSet {
        Piece::Blocks(f).into_set()
    }

    pub fn from_coblock(c: CoBlock) -> SymbolicSet {
        Piece::Co(c).into_set()
    }

    pub fn from_opaque(o: Opaque) -> SymbolicSet {
        Piece::Opaque(o).into_set()
    }

    pub fn base(&self) -> &Periodic {
        &self.base
    }
    pub fn block_families(&self) -> &[BlockFamily] {
        &self.blocks
    }
    pub fn coblocks(&self) -> &[CoBlock] {
        &self.coblocks
    }
    pub fn opaque_parts(&self) -> &[Opaque] {
        &self.opaque
    }

    pub fn components(&self) -> Vec<Component<'_>> {
        let mut out = Vec::new();
        if !self.base.is_empty() {
            match self.base.points() {
                Some(pts) => out.push(Component::Finite(pts)),
                None => out.push(Component::Periodic(&self.base)),
            }
        }
        out.extend(self.blocks.iter().map(Component::Blocks));
        out.extend(self.coblocks.iter().map(Component::CoBlocks));
        out.extend(self.opaque.iter().map(Component::Opaque));
        out
    }

    /// No opaque components: every structural rule applies.
    pub fn is_exact(&self) -> bool {
        self.opaque.is_empty()
    }

    pub fn is_empty_exact(&self) -> bool {
        self.base.is_empty() && self.blocks.is_empty() && self.coblocks.is_empty() && self.opaque.is_empty()
    }

    pub fn is_integers(&self) -> bool {
        self.base.is_all()
    }

    /// Structurally finite (only meaningful for exact sets).
    pub fn is_finite_exact(&self) -> bool {
        self.base.is_finite() && self.blocks.is_empty() && self.coblocks.is_empty() && self.opaque.is_empty()
    }

    /// Only periodic/finite material.
    pub fn is_periodic_only(&self) -> bool {
        self.blocks.is_empty() && self.coblocks.is_empty() && self.opaque.is_empty()
    }

    pub fn contains(&self, x: Int) -> bool {
        self.base.contains(x)
            || self.blocks.iter().any(|b| b.contains(x))
            || self.coblocks.iter().any(|c| c.contains(x))
            || self.opaque.iter().any(|o| o.contains(x))
    }

    pub fn contains_big(&self, x: &BigInt) -> bool {
        self.base.contains_big(x)
            || self.blocks.iter().any(|b| b.contains_big(x))
            || self.coblocks.iter().any(|c| c.contains_big(x))
            || self.opaque.iter().any(|o| o.contains_big(x))
    }

    fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        if !self.base.is_empty() {
            out.push(Piece::Up(self.base.clone()));
        }
        out.extend(self.blocks.iter().cloned().map(Piece::Blocks));
        out.extend(self.coblocks.iter().cloned().map(Piece::Co));
        out.extend(self.opaque.iter().cloned().map(Piece::Opaque));
        out
    }

    fn union_raw(mut self, other: SymbolicSet) -> SymbolicSet {
        self.base = self.base.union(&other.base);
        self.blocks.extend(other.blocks);
        self.coblocks.extend(other.coblocks);
        self.opaque.extend(other.opaque);
        self
    }

    pub fn union(&self, other: &SymbolicSet) -> SymbolicSet {
        self.clone().union_raw(other.clone()).canonical()
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a SymbolicSet>>(sets: I) -> SymbolicSet {
        sets.into_iter().fold(SymbolicSet::empty(), |acc, s| acc.union_raw(s.clone())).canonical()
    }

    pub fn translate(&self, g: Int) -> SymbolicSet {
        SymbolicSet {
            base: self.base.translate(g),
            blocks: self.blocks.iter().map(|b| b.translate(g)).collect(),
            coblocks: self
                .coblocks
                .iter()
                .map(|c| CoBlock {
                    base: c.base.translate(g),
                    minus: c.minus.iter().map(|m| m.translate(g)).collect(),
                })
                .collect(),
            opaque: self.opaque.iter().map(|o| o.translate(g)).collect(),
        }
        .canonical()
    }

    /// `{-x : x in self}`.
    pub fn negate(&self) -> SymbolicSet {
        SymbolicSet {
            base: self.base.negate(),
            blocks: self.blocks.iter().map(|b| b.negate()).collect(),
            coblocks: self
                .coblocks
                .iter()
                .map(|c| CoBlock { base: c.base.negate(), minus: c.minus.iter().map(|m| m.negate()).collect() })
                .collect(),
            opaque: self.opaque.iter().map(|o| o.negate()).collect(),
        }
        .canonical()
    }

    /// `F + A` for a finite nonempty `F`.
    pub fn minkowski_finite(f: &[Int], a: &SymbolicSet) -> SymbolicSet {
        f.iter().fold(SymbolicSet::empty(), |acc, &g| acc.union_raw(a.translate(g))).canonical()
    }

    /// `self \ other`.
    pub fn difference(&self, other: &SymbolicSet) -> SymbolicSet {
        let mut acc = self.pieces();
        for a in other.pieces() {
            let mut next = SymbolicSet::empty();
            for s in &acc {
                next = next.union_raw(piece_minus(s, &a));
            }
            acc = next.canonical().pieces();
        }
        let mut out = SymbolicSet::empty();
        for p in acc {
            out = out.union_raw(p.into_set());
        }
        out.canonical()
    }

    /// `X \ A` with `X = within`.
    pub fn complement_within(&self, within: &SymbolicSet) -> SymbolicSet {
        within.difference(self)
    }

    /// `Z \ self`.
    pub fn complement(&self) -> SymbolicSet {
        SymbolicSet::integers().difference(self)
    }

    pub fn intersection(&self, other: &SymbolicSet) -> SymbolicSet {
        let mut out = SymbolicSet::empty();
        for s in self.pieces() {
            for a in other.pieces() {
                out = out.union_raw(piece_intersect(&s, &a));
            }
        }
        out.canonical()
    }

    pub fn symmetric_difference(&self, other: &SymbolicSet) -> SymbolicSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Normal form: one periodic base, deduplicated families, co-blocks disjoint from
    /// the base, and families absorbed wherever a containing tail makes them finite.
    pub fn canonicalize(&self) -> SymbolicSet {
        self.clone().canonical()
    }

    fn canonical(mut self) -> SymbolicSet {
        for _ in 0..16 {
            let before = self.clone();
            self.canonical_step();
            if self == before {
                break;
            }
        }
        self
    }

    fn canonical_step(&mut self) {
        // co-blocks
        let mut cos: Vec<CoBlock> = Vec::new();
        for mut cb in std::mem::take(&mut self.coblocks) {
            cb.minus.sort();
            cb.minus.dedup();
            cb.minus.retain(|m| !self.blocks.contains(m));
            cb.base = cb.base.difference(&self.base);
            // families on a side where the base has no tail only remove finitely many points
            let mut kept = Vec::new();
            for m in std::mem::take(&mut cb.minus) {
                if cb.base.tail_empty(m.side()) {
                    let inter = blocks_intersect_up(&m, &cb.base);
                    if let Some(pts) = inter.is_finite_exact().then(|| inter.base.points()).flatten() {
                        cb.base = cb.base.difference(&Periodic::finite(pts));
                        continue;
                    }
                }
                kept.push(m);
            }
            cb.minus = kept;
            if cb.base.is_empty() {
                continue;
            }
            if cb.minus.is_empty() {
                self.base = self.base.union(&cb.base);
                continue;
            }
            if let Some(pts) = cb.base.points() {
                let keep: Vec<Int> = pts.into_iter().filter(|&x| !cb.minus.iter().any(|m| m.contains(x))).collect();
                self.base = self.base.union(&Periodic::finite(keep));
                continue;
            }
            cos.push(cb);
        }
        // co-blocks whose bases differ in finitely many points merge when the
        // pairwise family intersections are exact:
        // (U1 \ M1) ∪ (U2 \ M2) = (U1 ∩ U2 \ (M1 ∩ M2)) ∪ (U1 \ U2 \ M1) ∪ (U2 \ U1 \ M2)
        let mut merged: Vec<CoBlock> = Vec::new();
        let mut loose: Vec<Int> = Vec::new();
        'outer: for cb in cos {
            for m in merged.iter_mut() {
                let Some(odd) = m.base.combine(&cb.base, |a, b| a != b).points() else {
                    continue;
                };
                if let Some((fams, pts)) = merge_minus(&m.minus, &cb.minus) {
                    loose.extend(odd.into_iter().filter(|&x| m.contains(x) || cb.contains(x)));
                    m.base = m.base.intersection(&cb.base).difference(&Periodic::finite(pts));
                    m.minus = fams;
                    continue 'outer;
                }
            }
            merged.push(cb);
        }
        self.base = self.base.union(&Periodic::finite(loose));
        // co-blocks that lost all families fold into the base next round
        self.coblocks = merged;

        // block families
        let mut fams: Vec<BlockFamily> = std::mem::take(&mut self.blocks);
        fams.sort();
        fams.dedup();
        let mut kept = Vec::new();
        for f in fams {
            if self.base.tail_full(f.side()) {
                let rest = blocks_minus_up(&f, &self.base);
                if let Some(pts) = rest.is_finite_exact().then(|| rest.base.points()).flatten() {
                    self.base = self.base.union(&Periodic::finite(pts));
                    continue;
                }
            }
            let mut absorbed = false;
            for cb in &self.coblocks {
                if !cb.base.tail_full(f.side()) {
                    continue;
                }
                let outside = blocks_minus_up(&f, &cb.base);
                let Some(mut pts) = outside.is_finite_exact().then(|| outside.base.points()).flatten() else {
                    continue;
                };
                let mut ok = true;
                for m in &cb.minus {
                    match finite_intersection(&f, m) {
                        Some(p) => pts.extend(p),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    self.base = self.base.union(&Periodic::finite(pts));
                    absorbed = true;
                    break;
                }
            }
            if !absorbed {
                kept.push(f);
            }
        }
        self.blocks = kept;
        self.coblocks.sort();
        self.coblocks.dedup();
        self.opaque.sort();
        self.opaque.dedup();
        // opaque parts that became exactly empty are dropped by callers building them;
        // an opaque part identical to an exact one is left alone.
    }

    /// Dense bitmap of members in `[lo, hi]`.
    pub fn materialize(&self, lo: Int, hi: Int) -> Bits {
        let mut bits = Bits::new(lo, hi);
        if bits.is_empty() {
            return bits;
        }
        self.base.fill(&mut bits);
        for b in &self.blocks {
            for (l, h) in b.ranges_in(lo, hi) {
                bits.set_range(l, h);
            }
        }
        for c in &self.coblocks {
            let mut tmp = Bits::new(lo, hi);
            c.base.fill(&mut tmp);
            for m in &c.minus {
                for (l, h) in m.ranges_in(lo, hi) {
                    tmp.clear_range(l, h);
                }
            }
            bits.or_with(&tmp);
        }
        for o in &self.opaque {
            o.fill(&mut bits);
        }
        bits
    }

    /// All block families appearing anywhere in the set.
    fn all_families(&self) -> Vec<&BlockFamily> {
        let mut out: Vec<&BlockFamily> = self.blocks.iter().collect();
        for c in &self.coblocks {
            out.extend(c.minus.iter());
        }
        for o in &self.opaque {
            let (a, b) = match o {
                Opaque::Difference(a, b) | Opaque::Intersection(a, b) => (a, b),
            };
            out.extend(a.all_families());
            out.extend(b.all_families());
        }
        out
    }

    fn all_periodics(&self) -> Vec<&Periodic> {
        let mut out = vec![&self.base];
        for c in &self.coblocks {
            out.push(&c.base);
        }
        for o in &self.opaque {
            let (a, b) = match o {
                Opaque::Difference(a, b) | Opaque::Intersection(a, b) => (a, b),
            };
            out.extend(a.all_periodics());
            out.extend(b.all_periodics());
        }
        out
    }

    /// Comparison horizon: `max(s * b^(n0+20), 10 * p * W)` over the components.
    pub fn horizon(&self, other: &SymbolicSet) -> Int {
        let mut h: Int = 1024;
        for f in self.all_families().into_iter().chain(other.all_families()) {
            let a = (f.base() as Int)
                .checked_pow(f.start() + 20)
                .and_then(|v| v.checked_mul(f.scale() as Int))
                .unwrap_or(Int::MAX / 4);
            h = h.max(a.saturating_add(f.offset().abs()));
        }
        for p in self.all_periodics().into_iter().chain(other.all_periodics()) {
            h = h.max(10 * p.period() as Int * p.window().max(1) as Int);
        }
        h
    }

    /// Canonical equality, else a bounded search for a separating point.
    pub fn compare(&self, other: &SymbolicSet) -> Equality {
        let a = self.canonicalize();
        let b = other.canonicalize();
        if a == b {
            return Equality::Equal;
        }
        let h = a.horizon(&b);
        let dense = h.min(1 << 20);
        let wa = a.materialize(-dense, dense);
        let wb = b.materialize(-dense, dense);
        if wa != wb {
            let x = (-dense..=dense).find(|&x| wa.get(x) != wb.get(x)).expect("bitmaps differ");
            return Equality::Unequal(x);
        }
        // beyond the dense window, probe around every block up to the horizon
        for f in a.all_families().into_iter().chain(b.all_families()) {
            let mut n = f.start();
            while let Some((l, r)) = f.block(n) {
                if l.abs() > h && r.abs() > h {
                    break;
                }
                let probe: Vec<Int> = if r - l <= 64 {
                    (l - 2..=r + 2).collect()
                } else {
                    (l - 2..l + 30).chain(r - 30..=r + 2).collect()
                };
                for x in probe {
                    if a.contains(x) != b.contains(x) {
                        return Equality::Unequal(x);
                    }
                }
                n += 1;
            }
        }
        Equality::EqualAtHorizon(h)
    }
}

/// `(U \ M1) ∪ (U \ M2) = U \ (M1 ∩ M2)`, when every pairwise intersection is exact.
fn merge_minus(m1: &[BlockFamily], m2: &[BlockFamily]) -> Option<(Vec<BlockFamily>, Vec<Int>)> {
    let mut fams = Vec::new();
    let mut pts = Vec::new();
    for a in m1 {
        for b in m2 {
            let s = blocks_intersect_blocks(a, b);
            if !s.is_exact() || !s.coblocks.is_empty() || !s.base.is_finite() {
                return None;
            }
            fams.extend(s.blocks.iter().cloned());
            pts.extend(s.base.points().unwrap_or_default());
        }
    }
    fams.sort();
    fams.dedup();
    // points still covered by a surviving family need no separate removal
    pts.retain(|&x| !fams.iter().any(|f| f.contains(x)));
    let pts: BTreeSet<Int> = pts.into_iter().collect();
    Some((fams, pts.into_iter().collect()))
}

fn fmt_set(f: &mut fmt::Formatter<'_>, xs: impl IntoIterator<Item = Int>) -> fmt::Result {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    write!(f, "{{{}}}", v.join(","))
}

fn fmt_periodic(f: &mut fmt::Formatter<'_>, p: &Periodic) -> fmt::Result {
    if p.is_all() {
        return f.write_str("Z");
    }
    if p.is_empty() {
        return f.write_str("empty");
    }
    if let Some(pts) = p.points() {
        f.write_str("fin(")?;
        fmt_set(f, pts)?;
        return f.write_str(")");
    }
    write!(f, "up(p={}, rpos=", p.period())?;
    fmt_set(f, p.residues(Direction::Pos).into_iter().map(|r| r as Int))?;
    f.write_str(", rneg=")?;
    fmt_set(f, p.residues(Direction::Neg).into_iter().map(|r| r as Int))?;
    let w = p.window() as Int;
    if !p.exceptions().is_empty() {
        f.write_str(", except=")?;
        fmt_set(f, (-w..=w).filter(|&x| p.contains(x)))?;
        write!(f, ", window={w}")?;
    }
    f.write_str(")")
}

fn fmt_family(f: &mut fmt::Formatter<'_>, b: &BlockFamily) -> fmt::Result {
    let len = match b.len_law() {
        LenLaw::Const(c) => format!("const({c})"),
        LenLaw::Linear => "linear".to_string(),
    };
    write!(f, "blocks(s={}, b={}, len={}, t={}, n0={}", b.scale(), b.base(), len, b.offset(), b.start())?;
    if b.side() == Direction::Neg {
        f.write_str(", side=neg")?;
    }
    f.write_str(")")
}

impl fmt::Display for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        struct P<'a>(&'a Periodic);
        impl fmt::Display for P<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_periodic(f, self.0)
            }
        }
        struct B<'a>(&'a BlockFamily);
        impl fmt::Display for B<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt_family(f, self.0)
            }
        }
        if !self.base.is_empty() {
            parts.push(P(&self.base).to_string());
        }
        for b in &self.blocks {
            parts.push(B(b).to_string());
        }
        for c in &self.coblocks {
            let inner: Vec<String> = std::iter::once(format!("complement({})", P(&c.base)))
                .chain(c.minus.iter().map(|m| B(m).to_string()))
                .collect();
            parts.push(format!("complement(union({}))", inner.join(", ")));
        }
        for o in &self.opaque {
            match o {
                Opaque::Difference(a, b) => parts.push(format!("complement(union(complement({a}), {b}))")),
                Opaque::Intersection(a, b) => {
                    parts.push(format!("complement(union(complement({a}), complement({b})))"))
                }
            }
        }
        match parts.len() {
            0 => f.write_str("empty"),
            1 => f.write_str(&parts[0]),
            _ => write!(f, "union({})", parts.join(", ")),
        }
    }
}

impl serde::Serialize for SymbolicSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> SymbolicSet {
        SymbolicSet::progression(2, 0).unwrap()
    }
    fn pow2() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 0, false).unwrap()
    }
    fn growing() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, false).unwrap()
    }

    fn agree(a: &SymbolicSet, f: impl Fn(Int) -> bool, r: Int) {
        for x in -r..=r {
            assert_eq!(a.contains(x), f(x), "x={x} set={a}");
        }
    }

    #[test]
    fn membership_examples() {
        assert!(evens().contains(10));
        assert!(pow2().contains(1024));
        assert!(!pow2().contains(1023));
    }

    #[test]
    fn translate_examples() {
        let t = SymbolicSet::progression(3, 0).unwrap().translate(1);
        assert_eq!(t, SymbolicSet::progression(3, 1).unwrap());
        assert_eq!(pow2().translate(0), pow2());
        let t = pow2().translate(5);
        assert!(t.block_families().iter().all(|b| b.offset() == 5));
        agree(&t, |x| x > 5 && ((x - 5) as u128).is_power_of_two(), 5000);
    }

    #[test]
    fn minkowski_examples() {
        let z = SymbolicSet::minkowski_finite(&[0, 1, 2], &SymbolicSet::progression(3, 0).unwrap());
        assert!(z.is_integers());
        assert!(SymbolicSet::minkowski_finite(&[0, 1], &evens()).is_integers());
        assert_eq!(SymbolicSet::minkowski_finite(&[0], &pow2()), pow2());
    }

    #[test]
    fn union_and_complement_examples() {
        let odds = SymbolicSet::progression(2, 1).unwrap();
        assert!(evens().union(&odds).is_integers());
        assert_eq!(pow2().union(&SymbolicSet::empty()), pow2());
        let u = SymbolicSet::progression(3, 0).unwrap().union(&pow2());
        assert_eq!(u.components().len(), 2);
        assert_eq!(evens().complement_within(&SymbolicSet::integers()), odds);
        let c = pow2().complement();
        assert!(c.is_exact());
        assert_eq!(c.coblocks().len(), 1);
        let w = 1 << 20;
        let bits = c.materialize(-w, w);
        for x in -w..=w {
            let want = !(x > 0 && (x as u128).is_power_of_two());
            assert_eq!(bits.get(x), want, "x={x}");
        }
        assert!(pow2().complement_within(&pow2()).is_empty_exact());
        assert!(c.union(&pow2()).is_integers());
    }

    #[test]
    fn canonical_period_reduction() {
        let a = SymbolicSet::from(Periodic::new(4, &[0, 2], &[0, 2]).unwrap());
        assert_eq!(a.canonicalize(), evens());
    }

    #[test]
    fn lemma_union_shift_set_is_cofinite() {
        // {-1, 0} + (Z \ {2^n}) = Z \ {1}
        let b = pow2().complement();
        let s = SymbolicSet::minkowski_finite(&[-1, 0], &b);
        let rest = SymbolicSet::integers().difference(&s);
        assert!(rest.is_finite_exact(), "{rest}");
        assert_eq!(rest.base().points().unwrap(), vec![1]);
    }

    #[test]
    fn intersections_with_blocks() {
        let i = pow2().intersection(&pow2().translate(-1));
        assert!(i.is_finite_exact());
        assert_eq!(i.base().points().unwrap(), vec![1]);
        let g = growing().intersection(&SymbolicSet::integers());
        assert_eq!(g, growing());
        let m = growing().intersection(&SymbolicSet::progression(2, 0).unwrap());
        assert!(!m.is_exact());
        agree(&m, |x| x % 2 == 0 && growing().contains(x), 3000);
    }

    #[test]
    fn compare_reports_horizon_equality() {
        let a = growing();
        let b = growing().union(&SymbolicSet::finite([1]));
        assert_eq!(a.compare(&b), Equality::Equal);
        let c = SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 3, false).unwrap();
        assert!(matches!(pow2().compare(&c), Equality::Unequal(_)));
    }
}
