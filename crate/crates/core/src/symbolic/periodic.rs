//! Two-sided ultimately periodic subsets of Z.
//!
//! A [`Periodic`] set is described by a period `p`, a residue set used for
//! `x >= 0` (the `+inf` tail), a residue set used for `x < 0` (the `-inf`
//! tail), and a finite set of exception points where membership is flipped
//! relative to that baseline. The constructor reduces the period to its
//! minimum, and the exception set is determined by the residue sets, so two
//! values describe the same subset of Z exactly when they are field-equal.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::num::{divisors, lcm, residue, Int};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Periodic {
    period: u64,
    pos: Vec<bool>,
    neg: Vec<bool>,
    flips: BTreeSet<Int>,
}

/// Which tail of Z a statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Direction {
    #[serde(rename = "+inf")]
    Pos,
    #[serde(rename = "-inf")]
    Neg,
}

impl Direction {
    pub fn sign(self) -> Int {
        match self {
            Direction::Pos => 1,
            Direction::Neg => -1,
        }
    }

    pub fn flip(self) -> Direction {
        match self {
            Direction::Pos => Direction::Neg,
            Direction::Neg => Direction::Pos,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Pos => f.write_str("+inf"),
            Direction::Neg => f.write_str("-inf"),
        }
    }
}

fn bits(p: u64, residues: &[u64]) -> Result<Vec<bool>> {
    let mut v = vec![false; p as usize];
    for &r in residues {
        if r >= p {
            return Err(Error::InvalidSet(format!("residue {r} is not < period {p}")));
        }
        v[r as usize] = true;
    }
    Ok(v)
}

impl Periodic {
    fn raw(period: u64, pos: Vec<bool>, neg: Vec<bool>, flips: BTreeSet<Int>) -> Self {
        let mut s = Periodic { period, pos, neg, flips };
        s.reduce_period();
        s
    }

    /// Build from tail residue sets with no exceptions.
    pub fn new(period: u64, pos: &[u64], neg: &[u64]) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidSet("p must be >= 1".into()));
        }
        Ok(Self::raw(period, bits(period, pos)?, bits(period, neg)?, BTreeSet::new()))
    }

    /// Build from tail residues plus an explicit membership list for the
    /// window `[-window, window]`, which overrides the periodic rule there.
    pub fn with_window(
        period: u64,
        pos: &[u64],
        neg: &[u64],
        window: u64,
        members: &BTreeSet<Int>,
    ) -> Result<Self> {
        let base = Self::new(period, pos, neg)?;
        let w = window as Int;
        if let Some(&x) = members.iter().find(|&&x| x.abs() > w) {
            return Err(Error::InvalidSet(format!("exception {x} lies outside window {window}")));
        }
        let mut flips = BTreeSet::new();
        for x in -w..=w {
            if base.baseline(x) != members.contains(&x) {
                flips.insert(x);
            }
        }
        Ok(Self::raw(base.period, base.pos, base.neg, flips))
    }

    /// Residue class `r + pZ` on both tails.
    pub fn progression(period: u64, r: u64) -> Result<Self> {
        Self::new(period, &[r], &[r])
    }

    pub fn empty() -> Self {
        Self::raw(1, vec![false], vec![false], BTreeSet::new())
    }

    pub fn all() -> Self {
        Self::raw(1, vec![true], vec![true], BTreeSet::new())
    }

    pub fn finite<I: IntoIterator<Item = Int>>(points: I) -> Self {
        Self::raw(1, vec![false], vec![false], points.into_iter().collect())
    }

    /// `{x : x ≡ c (mod p), x >= bound}` for `Pos`, or `x <= bound` for `Neg`.
    pub fn half_line_class(period: u64, c: Int, bound: Int, dir: Direction) -> Self {
        let r = residue(c, period);
        let mut on = vec![false; period as usize];
        on[r] = true;
        let off = vec![false; period as usize];
        let (pos, neg) = match dir {
            Direction::Pos => (on, off),
            Direction::Neg => (off, on),
        };
        let mut s = Periodic { period, pos, neg, flips: BTreeSet::new() };
        // Baseline already matches far from 0; fix the stretch between 0 and bound.
        let (lo, hi) = (bound.min(0) - period as Int, bound.max(0) + period as Int);
        for x in lo..=hi {
            let want = residue(x, period) == r
                && match dir {
                    Direction::Pos => x >= bound,
                    Direction::Neg => x <= bound,
                };
            if s.baseline(x) != want {
                s.flips.insert(x);
            }
        }
        s.reduce_period();
        s
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Residues (mod period) present toward the given tail.
    pub fn residues(&self, dir: Direction) -> Vec<u64> {
        let v = match dir {
            Direction::Pos => &self.pos,
            Direction::Neg => &self.neg,
        };
        v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
    }

    pub fn tail_bits(&self, dir: Direction) -> &[bool] {
        match dir {
            Direction::Pos => &self.pos,
            Direction::Neg => &self.neg,
        }
    }

    pub fn tail_empty(&self, dir: Direction) -> bool {
        !self.tail_bits(dir).iter().any(|&b| b)
    }

    pub fn tail_full(&self, dir: Direction) -> bool {
        self.tail_bits(dir).iter().all(|&b| b)
    }

    /// Points where membership differs from the residue baseline.
    pub fn exceptions(&self) -> &BTreeSet<Int> {
        &self.flips
    }

    /// Smallest `W >= 0` such that the tail rules hold for `|x| > W`.
    pub fn window(&self) -> u64 {
        self.flips.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u64
    }

    pub fn is_finite(&self) -> bool {
        self.tail_empty(Direction::Pos) && self.tail_empty(Direction::Neg)
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.flips.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.tail_full(Direction::Pos) && self.tail_full(Direction::Neg) && self.flips.is_empty()
    }

    /// Members when the set is finite.
    pub fn points(&self) -> Option<Vec<Int>> {
        self.is_finite().then(|| self.flips.iter().copied().collect())
    }

    #[inline]
    fn baseline(&self, x: Int) -> bool {
        let r = residue(x, self.period);
        if x >= 0 {
            self.pos[r]
        } else {
            self.neg[r]
        }
    }

    #[inline]
    pub fn contains(&self, x: Int) -> bool {
        self.baseline(x) != self.flips.contains(&x)
    }

    pub fn contains_big(&self, x: &num_bigint::BigInt) -> bool {
        use num_traits::{Signed, ToPrimitive};
        if let Some(v) = x.to_i128() {
            return self.contains(v);
        }
        let r = crate::num::big_residue(x, self.period);
        if x.is_negative() {
            self.neg[r]
        } else {
            self.pos[r]
        }
    }

    fn reduce_period(&mut self) {
        for d in divisors(self.period) {
            if d == self.period {
                break;
            }
            let du = d as usize;
            let ok = (0..self.period as usize)
                .all(|i| self.pos[i] == self.pos[i % du] && self.neg[i] == self.neg[i % du]);
            if ok {
                self.pos.truncate(du);
                self.neg.truncate(du);
                self.period = d;
                return;
            }
        }
    }

    fn expanded(&self, p: u64) -> (Vec<bool>, Vec<bool>) {
        let n = self.period as usize;
        let pos = (0..p as usize).map(|i| self.pos[i % n]).collect();
        let neg = (0..p as usize).map(|i| self.neg[i % n]).collect();
        (pos, neg)
    }

    /// Pointwise boolean combination. Exceptions of the result lie within
    /// the union of both exception sets since the baselines combine residue-wise.
    pub fn combine(&self, other: &Periodic, op: impl Fn(bool, bool) -> bool) -> Periodic {
        let p = lcm(self.period, other.period);
        let (ap, an) = self.expanded(p);
        let (bp, bn) = other.expanded(p);
        let pos: Vec<bool> = ap.iter().zip(&bp).map(|(&a, &b)| op(a, b)).collect();
        let neg: Vec<bool> = an.iter().zip(&bn).map(|(&a, &b)| op(a, b)).collect();
        let mut out = Periodic { period: p, pos, neg, flips: BTreeSet::new() };
        for &x in self.flips.iter().chain(other.flips.iter()) {
            let want = op(self.contains(x), other.contains(x));
            if out.baseline(x) != want {
                out.flips.insert(x);
            }
        }
        out.reduce_period();
        out
    }

    pub fn union(&self, other: &Periodic) -> Periodic {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Periodic) -> Periodic {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Periodic) -> Periodic {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Periodic {
        Periodic {
            period: self.period,
            pos: self.pos.iter().map(|b| !b).collect(),
            neg: self.neg.iter().map(|b| !b).collect(),
            flips: self.flips.clone(),
        }
    }

    pub fn is_subset(&self, other: &Periodic) -> bool {
        self.difference(other).is_empty()
    }

    /// `{g + x : x in self}`.
    pub fn translate(&self, g: Int) -> Periodic {
        if g == 0 {
            return self.clone();
        }
        let p = self.period as usize;
        let shift = residue(g, self.period);
        let pos: Vec<bool> = (0..p).map(|r| self.pos[(r + p - shift) % p]).collect();
        let neg: Vec<bool> = (0..p).map(|r| self.neg[(r + p - shift) % p]).collect();
        let mut out = Periodic { period: self.period, pos, neg, flips: BTreeSet::new() };
        // Shifted exceptions, then points where the tail used before and after
        // the shift differ (those between 0 and g).
        let mut candidates: BTreeSet<Int> = self.flips.iter().map(|x| x + g).collect();
        let (lo, hi) = if g > 0 { (0, g - 1) } else { (g, -1) };
        let differ = (0..p).any(|r| out.pos[r] != out.neg[r]);
        if differ {
            for x in lo..=hi {
                candidates.insert(x);
            }
        }
        for x in candidates {
            let want = self.contains(x - g);
            if out.baseline(x) != want {
                out.flips.insert(x);
            }
        }
        out
    }

    /// `{-x : x in self}`.
    pub fn negate(&self) -> Periodic {
        let p = self.period as usize;
        let pos: Vec<bool> = (0..p).map(|r| self.neg[(p - r) % p]).collect();
        let neg: Vec<bool> = (0..p).map(|r| self.pos[(p - r) % p]).collect();
        let mut out = Periodic { period: self.period, pos, neg, flips: BTreeSet::new() };
        let mut candidates: BTreeSet<Int> = self.flips.iter().map(|x| -x).collect();
        candidates.insert(0);
        for x in candidates {
            if out.baseline(x) != self.contains(-x) {
                out.flips.insert(x);
            }
        }
        out
    }

    /// Set the bits of all members inside the bitmap's range.
    pub fn fill(&self, bits: &mut crate::bits::Bits) {
        if bits.is_empty() {
            return;
        }
        let (lo, hi) = (bits.lo(), bits.hi());
        bits.set_periodic(lo, hi.min(-1), &self.neg);
        bits.set_periodic(lo.max(0), hi, &self.pos);
        for &x in self.flips.range(lo..=hi) {
            if self.contains(x) {
                bits.set(x);
            } else {
                bits.clear(x);
            }
        }
    }

    /// Members of the set within `[lo, hi]`.
    pub fn members_in(&self, lo: Int, hi: Int) -> impl Iterator<Item = Int> + '_ {
        (lo..=hi).filter(move |&x| self.contains(x))
    }
}

impl fmt::Debug for Periodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "UP(p={}, rpos={:?}, rneg={:?}, flips={:?})",
            self.period,
            self.residues(Direction::Pos),
            self.residues(Direction::Neg),
            self.flips
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(a: &Periodic, lo: Int, hi: Int) -> Vec<Int> {
        a.members_in(lo, hi).collect()
    }

    #[test]
    fn period_is_minimised() {
        let a = Periodic::new(4, &[0, 2], &[0, 2]).unwrap();
        assert_eq!(a.period(), 2);
        assert_eq!(a, Periodic::progression(2, 0).unwrap());
    }

    #[test]
    fn exception_matching_rule_is_dropped() {
        let members: BTreeSet<Int> = [-2, 0, 2].into_iter().collect();
        let a = Periodic::with_window(2, &[0], &[0], 2, &members).unwrap();
        assert_eq!(a.window(), 0);
        assert!(a.exceptions().is_empty());
        let members: BTreeSet<Int> = [-2, 0, 1, 2].into_iter().collect();
        let b = Periodic::with_window(2, &[0], &[0], 2, &members).unwrap();
        assert_eq!(b.window(), 1);
    }

    #[test]
    fn translate_shifts_residues() {
        let a = Periodic::progression(3, 0).unwrap().translate(1);
        assert_eq!(a, Periodic::progression(3, 1).unwrap());
        let half = Periodic::new(2, &[0], &[]).unwrap();
        let t = half.translate(7);
        for x in -40..40 {
            assert_eq!(t.contains(x), half.contains(x - 7), "x={x}");
        }
    }

    #[test]
    fn negate_and_half_lines() {
        let h = Periodic::half_line_class(3, 1, 10, Direction::Pos);
        assert_eq!(brute(&h, -5, 20), vec![10, 13, 16, 19]);
        let n = h.negate();
        assert_eq!(brute(&n, -20, 5), vec![-19, -16, -13, -10]);
        let h = Periodic::half_line_class(2, 0, -3, Direction::Neg);
        assert_eq!(brute(&h, -8, 8), vec![-8, -6, -4]);
    }

    #[test]
    fn boolean_ops_agree_pointwise() {
        let a = Periodic::new(3, &[0, 1], &[2]).unwrap().union(&Periodic::finite([5, -4, 100]));
        let b = Periodic::new(2, &[1], &[0, 1]).unwrap();
        let u = a.union(&b);
        let i = a.intersection(&b);
        let d = a.difference(&b);
        let c = a.complement();
        for x in -200..200 {
            assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
            assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
            assert_eq!(d.contains(x), a.contains(x) && !b.contains(x));
            assert_eq!(c.contains(x), !a.contains(x));
        }
    }
}
