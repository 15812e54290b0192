//! Geometric block families: `offset + side * [s*b^n, s*b^n + len(n)]` for `n >= start`.
//!
//! Constant-length families are the standard small infinite sets; families
//! whose block length grows with `n` are thick without being large.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::periodic::Direction;
use crate::error::{Error, Result};
use crate::num::Int;

/// Length law of block `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LenLaw {
    Const(u64),
    Linear,
}

/// Upper bound on the number of points an early block prefix may expand to.
const EARLY_POINT_CAP: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockFamily {
    side: Direction,
    scale: u64,
    base: u64,
    offset: Int,
    start: u32,
    len: LenLaw,
}

/// Reduced coordinates shared by families whose anchors coincide: two
/// families with equal frames place their blocks at the same points `side * scale * base^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    pub side: Direction,
    pub scale: u64,
    pub base: u64,
}

impl BlockFamily {
    /// Validate and normalise. The returned points are the blocks below the
    /// disjointness threshold, which are split off as an explicit finite part.
    pub fn new(
        scale: u64,
        base: u64,
        offset: Int,
        start: u32,
        len: LenLaw,
        side: Direction,
    ) -> Result<(BlockFamily, Vec<Int>)> {
        if scale == 0 {
            return Err(Error::InvalidSet("s must be >= 1".into()));
        }
        if base < 2 {
            return Err(Error::InvalidSet("b must be >= 2".into()));
        }
        let fam = BlockFamily { side, scale, base, offset, start, len };
        let mut n = start;
        loop {
            let gap = fam
                .anchor(n)
                .and_then(|a| a.checked_mul(base as Int - 1))
                .ok_or_else(|| Error::InvalidSet("block coordinates overflow".into()))?;
            if gap > (fam.len_at(n) + fam.len_at(n + 1) + 1) as Int {
                break;
            }
            n += 1;
        }
        fam.split_at(n)
    }

    /// Move blocks `start..n` into an explicit point list.
    pub fn split_at(&self, n: u32) -> Result<(BlockFamily, Vec<Int>)> {
        let mut pts = Vec::new();
        let mut count = 0u64;
        for k in self.start..n.max(self.start) {
            count += self.len_at(k) + 1;
            if count > EARLY_POINT_CAP {
                return Err(Error::InvalidSet("block prefix too large to expand".into()));
            }
            let (lo, hi) = self
                .block(k)
                .ok_or_else(|| Error::InvalidSet("block coordinates overflow".into()))?;
            pts.extend(lo..=hi);
        }
        let mut fam = self.clone();
        fam.start = n.max(self.start);
        Ok((fam, pts))
    }

    pub fn side(&self) -> Direction {
        self.side
    }
    pub fn scale(&self) -> u64 {
        self.scale
    }
    pub fn base(&self) -> u64 {
        self.base
    }
    pub fn offset(&self) -> Int {
        self.offset
    }
    pub fn start(&self) -> u32 {
        self.start
    }
    pub fn len_law(&self) -> LenLaw {
        self.len
    }

    pub fn len_at(&self, n: u32) -> u64 {
        match self.len {
            LenLaw::Const(c) => c,
            LenLaw::Linear => n as u64,
        }
    }

    /// `s * b^n`, if it fits.
    pub fn anchor(&self, n: u32) -> Option<Int> {
        (self.base as Int).checked_pow(n)?.checked_mul(self.scale as Int)
    }

    /// Closed coordinate range of block `n`.
    pub fn block(&self, n: u32) -> Option<(Int, Int)> {
        let a = self.anchor(n)?;
        let l = self.len_at(n) as Int;
        match self.side {
            Direction::Pos => Some((self.offset.checked_add(a)?, self.offset.checked_add(a)?.checked_add(l)?)),
            Direction::Neg => Some((self.offset.checked_sub(a)?.checked_sub(l)?, self.offset.checked_sub(a)?)),
        }
    }

    pub fn translate(&self, g: Int) -> BlockFamily {
        BlockFamily { offset: self.offset + g, ..self.clone() }
    }

    pub fn negate(&self) -> BlockFamily {
        BlockFamily { offset: -self.offset, side: self.side.flip(), ..self.clone() }
    }

    /// Index of the block whose anchor is the largest one `<= y`, given `y >= s*b^start`.
    fn index_below(&self, y: Int) -> Option<u32> {
        let mut n = self.start;
        let mut a = self.anchor(n)?;
        if y < a {
            return None;
        }
        loop {
            match a.checked_mul(self.base as Int) {
                Some(next) if next <= y => {
                    a = next;
                    n += 1;
                }
                _ => return Some(n),
            }
        }
    }

    pub fn contains(&self, x: Int) -> bool {
        let y = match self.side {
            Direction::Pos => x.checked_sub(self.offset),
            Direction::Neg => self.offset.checked_sub(x),
        };
        let Some(y) = y else { return false };
        match self.index_below(y) {
            Some(n) => {
                let a = self.anchor(n).expect("anchor below y fits");
                y - a <= self.len_at(n) as Int
            }
            None => false,
        }
    }

    pub fn contains_big(&self, x: &BigInt) -> bool {
        if let Some(v) = x.to_i128() {
            if v.unsigned_abs() < 1u128 << 100 && self.offset.unsigned_abs() < 1u128 << 100 {
                return self.contains(v);
            }
        }
        let t = BigInt::from(self.offset);
        let y = match self.side {
            Direction::Pos => x - &t,
            Direction::Neg => &t - x,
        };
        if !y.is_positive() {
            return false;
        }
        let s = BigInt::from(self.scale);
        let b = BigInt::from(self.base);
        let q = &y / &s;
        if q.is_zero() {
            return false;
        }
        let log2b = (self.base as f64).log2();
        let mut n = ((q.bits() as f64 - 1.0) / log2b).floor().max(0.0) as u32;
        let mut p = num_traits::pow(b.clone(), n as usize);
        while &p * &b <= q {
            p *= &b;
            n += 1;
        }
        while p > q && n > 0 {
            p /= &b;
            n -= 1;
        }
        if n < self.start || p > q {
            return false;
        }
        let a = &s * &p;
        (&y - &a) <= BigInt::from(self.len_at(n))
    }

    /// Block ranges clipped to `[lo, hi]`.
    pub fn ranges_in(&self, lo: Int, hi: Int) -> Vec<(Int, Int)> {
        let mut out = Vec::new();
        let mut n = self.start;
        while let Some((a, b)) = self.block(n) {
            let beyond = match self.side {
                Direction::Pos => a > hi,
                Direction::Neg => b < lo,
            };
            if beyond {
                break;
            }
            let (l, h) = (a.max(lo), b.min(hi));
            if l <= h {
                out.push((l, h));
            }
            n += 1;
        }
        out
    }

    /// First block index whose block lies entirely beyond `w` on the family's side.
    pub fn first_beyond(&self, w: Int) -> u32 {
        let mut n = self.start;
        while let Some((a, b)) = self.block(n) {
            let beyond = match self.side {
                Direction::Pos => a > w,
                Direction::Neg => b < -w,
            };
            if beyond {
                return n;
            }
            n += 1;
        }
        n
    }

    /// Points of the family inside `[lo, hi]`, in increasing block index order.
    pub fn points_in(&self, lo: Int, hi: Int) -> Vec<Int> {
        let mut out = Vec::new();
        let mut n = self.start;
        while let Some((a, b)) = self.block(n) {
            let beyond = match self.side {
                Direction::Pos => a > hi,
                Direction::Neg => b < lo,
            };
            if beyond {
                break;
            }
            let (l, h) = (a.max(lo), b.min(hi));
            if l <= h {
                out.extend(l..=h);
            }
            n += 1;
        }
        out
    }

    /// The frame and the index shift `e` with `scale = frame.scale * base^e`.
    pub fn frame(&self) -> (Frame, u32) {
        let mut s = self.scale;
        let mut e = 0;
        while s % self.base == 0 {
            s /= self.base;
            e += 1;
        }
        (Frame { side: self.side, scale: s, base: self.base }, e)
    }

    /// First global index `j = n + e` carried by the family.
    pub fn global_start(&self) -> u32 {
        self.start + self.frame().1
    }

    /// Offsets of block at global index `j`, relative to its frame anchor `side * s' * b^j`.
    pub fn offsets_at(&self, j: u32) -> (Int, Int) {
        let n = j - self.frame().1;
        let l = self.len_at(n) as Int;
        match self.side {
            Direction::Pos => (self.offset, self.offset + l),
            Direction::Neg => (self.offset - l, self.offset),
        }
    }

    /// Limit of the offset interval as `j` grows; `None` marks an end that
    /// moves without bound (outward for growing blocks).
    pub fn limit_offsets(&self) -> (Option<Int>, Option<Int>) {
        match (self.len, self.side) {
            (LenLaw::Const(c), Direction::Pos) => (Some(self.offset), Some(self.offset + c as Int)),
            (LenLaw::Const(c), Direction::Neg) => (Some(self.offset - c as Int), Some(self.offset)),
            (LenLaw::Linear, Direction::Pos) => (Some(self.offset), None),
            (LenLaw::Linear, Direction::Neg) => (None, Some(self.offset)),
        }
    }

    /// A global index from which blocks of this family and `other` (same frame)
    /// only meet block-for-block and both offset intervals have settled.
    fn settled_index(&self, other: &BlockFamily) -> u32 {
        let (fr, _) = self.frame();
        let mut j = self.global_start().max(other.global_start());
        loop {
            let (a0, a1) = self.offsets_at(j);
            let (b0, b1) = other.offsets_at(j);
            let spread = [a0, a1, b0, b1].iter().map(|v| v.abs()).max().unwrap() + 2;
            // next anchor distance s' b^j (b-1) must dominate both spreads of block j+1
            let (c0, c1) = self.offsets_at(j + 1);
            let (d0, d1) = other.offsets_at(j + 1);
            let spread1 = [c0, c1, d0, d1].iter().map(|v| v.abs()).max().unwrap() + 2;
            let gap = (fr.base as Int)
                .checked_pow(j)
                .and_then(|v| v.checked_mul(fr.scale as Int * (fr.base as Int - 1)));
            let stable = match (self.len, other.len) {
                (LenLaw::Linear, LenLaw::Const(_)) | (LenLaw::Const(_), LenLaw::Linear) => {
                    // the growing interval must already cover the constant one's far end
                    let (lin, con) = if self.len == LenLaw::Linear { (self, other) } else { (other, self) };
                    let (l0, l1) = lin.offsets_at(j);
                    let (c0, c1) = con.offsets_at(j);
                    match fr.side {
                        Direction::Pos => l1 >= c1.max(l0),
                        Direction::Neg => l0 <= c0.min(l1),
                    }
                }
                _ => true,
            };
            match gap {
                Some(g) if g > 2 * (spread + spread1) && stable => return j,
                None => return j,
                _ => j += 1,
            }
        }
    }

    /// Exact intersection with a family of the same frame. Returns `None` when
    /// the result is not expressible as block families plus finitely many points.
    pub fn intersect_same_frame(&self, other: &BlockFamily) -> Option<(Vec<BlockFamily>, Vec<Int>)> {
        let (fr, _) = self.frame();
        if fr != other.frame().0 {
            return None;
        }
        let j = self.settled_index(other);
        let (a0, a1) = self.limit_offsets();
        let (b0, b1) = other.limit_offsets();
        let lo = max_opt(a0, b0);
        let hi = min_opt(a1, b1);
        let mut fams = Vec::new();
        let mut pts = Vec::new();
        if let Some(f) = family_for_offsets(fr, lo, hi, j, &[self, other])? {
            let (f, early) = f;
            fams.push(f);
            pts.extend(early);
        }
        pts.extend(self.early_common(other, j));
        Some((fams, pts))
    }

    /// Exact `self \ other` for a family of the same frame.
    pub fn minus_same_frame(&self, other: &BlockFamily) -> Option<(Vec<BlockFamily>, Vec<Int>)> {
        let (fr, _) = self.frame();
        if fr != other.frame().0 {
            return None;
        }
        let j = self.settled_index(other);
        let (a0, a1) = self.limit_offsets();
        let (b0, b1) = other.limit_offsets();
        // Two growing ends on the same side: the leftover strip would be anchored
        // at the moving end, which no family can express.
        if self.len == LenLaw::Linear && other.len == LenLaw::Linear {
            let (se, oe) = (self.frame().1 as Int, other.frame().1 as Int);
            let fits = match fr.side {
                Direction::Pos => self.offset - se <= other.offset - oe,
                Direction::Neg => self.offset + se >= other.offset + oe,
            };
            if !fits {
                return None;
            }
        }
        let mut fams = Vec::new();
        let mut pts = Vec::new();
        // left piece [a0, b0 - 1]
        let left_hi = b0.map(|v| v - 1);
        let left = match (a0, left_hi) {
            (_, None) => None,
            (a, Some(h)) => Some((a, min_opt(a1, Some(h)))),
        };
        let right_lo = b1.map(|v| v + 1);
        let right = match right_lo {
            None => None,
            Some(l) => Some((max_opt(a0, Some(l)), a1)),
        };
        for (lo, hi) in [left, right].into_iter().flatten() {
            if let Some((f, early)) = family_for_offsets(fr, lo, hi, j, &[self])? {
                fams.push(f);
                pts.extend(early);
            }
        }
        // early region: points of self below j not in other
        for k in self.start..(j - self.frame().1) {
            if let Some((l, h)) = self.block(k) {
                pts.extend((l..=h).filter(|&x| !other.contains(x)));
            }
        }
        Some((fams, pts))
    }

    /// Points of both families lying in blocks with global index `< j`.
    fn early_common(&self, other: &BlockFamily, j: u32) -> Vec<Int> {
        let mut pts = Vec::new();
        for f in [self, other] {
            let e = f.frame().1;
            for k in f.start..j.saturating_sub(e).max(f.start) {
                if let Some((l, h)) = f.block(k) {
                    pts.extend((l..=h).filter(|&x| self.contains(x) && other.contains(x)));
                }
            }
        }
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    /// Intersection with a family on the opposite side: finitely many points.
    pub fn intersect_opposite(&self, other: &BlockFamily) -> Option<Vec<Int>> {
        if self.side == other.side {
            return None;
        }
        let (p, n) = if self.side == Direction::Pos { (self, other) } else { (other, self) };
        let lo = p.block(p.start)?.0;
        let hi = n.block(n.start)?.1;
        if lo > hi {
            return Some(Vec::new());
        }
        Some(p.points_in(lo, hi).into_iter().filter(|&x| n.contains(x)).collect())
    }
}

fn max_opt(a: Option<Int>, b: Option<Int>) -> Option<Int> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn min_opt(a: Option<Int>, b: Option<Int>) -> Option<Int> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Build a family in frame `fr` whose offsets at global indices `>= j` are the
/// limit interval `[lo, hi]`. `None` bounds refer to growing ends, whose exact
/// position is taken from `sources` (the families that produced them).
/// Returns `Some(None)` for an empty interval and `None` when the growing end
/// cannot be written with a non-negative index shift.
#[allow(clippy::type_complexity)]
fn family_for_offsets(
    fr: Frame,
    lo: Option<Int>,
    hi: Option<Int>,
    j: u32,
    sources: &[&BlockFamily],
) -> Option<Option<(BlockFamily, Vec<Int>)>> {
    let sign = fr.side;
    match (lo, hi, sign) {
        (Some(l), Some(h), _) => {
            if l > h {
                return Some(None);
            }
            let (offset, c) = match sign {
                Direction::Pos => (l, h - l),
                Direction::Neg => (h, h - l),
            };
            let f = BlockFamily {
                side: sign,
                scale: fr.scale,
                base: fr.base,
                offset,
                start: j,
                len: LenLaw::Const(c as u64),
            };
            let (f, early) = BlockFamily::new(f.scale, f.base, f.offset, f.start, f.len, f.side).ok()?;
            Some(Some((f, early)))
        }
        (Some(l), None, Direction::Pos) => {
            // growing top end: min over linear sources of t_k + j - e_k
            let top = sources
                .iter()
                .filter(|f| f.len == LenLaw::Linear)
                .map(|f| f.offset - f.frame().1 as Int)
                .min()?;
            let e = l - top;
            if e < 0 || e > 64 {
                return None;
            }
            let scale = fr.scale.checked_mul(fr.base.checked_pow(e as u32)?)?;
            let start = j.checked_sub(e as u32)?;
            let f = BlockFamily::new(scale, fr.base, l, start, LenLaw::Linear, sign).ok()?;
            Some(Some(f))
        }
        (None, Some(h), Direction::Neg) => {
            let bottom = sources
                .iter()
                .filter(|f| f.len == LenLaw::Linear)
                .map(|f| f.offset + f.frame().1 as Int)
                .max()?;
            let e = bottom - h;
            if e < 0 || e > 64 {
                return None;
            }
            let scale = fr.scale.checked_mul(fr.base.checked_pow(e as u32)?)?;
            let start = j.checked_sub(e as u32)?;
            let f = BlockFamily::new(scale, fr.base, h, start, LenLaw::Linear, sign).ok()?;
            Some(Some(f))
        }
        _ => None,
    }
}

impl fmt::Debug for BlockFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "blocks(s={}, b={}, t={}, n0={}, len={:?}, side={})",
            self.scale, self.base, self.offset, self.start, self.len, self.side
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: u64, b: u64, t: Int, len: LenLaw, side: Direction) -> (BlockFamily, Vec<Int>) {
        BlockFamily::new(s, b, t, 0, len, side).unwrap()
    }

    fn member_union(f: &BlockFamily, early: &[Int], x: Int) -> bool {
        f.contains(x) || early.contains(&x)
    }

    #[test]
    fn powers_of_two() {
        let (f, early) = fam(1, 2, 0, LenLaw::Const(0), Direction::Pos);
        assert_eq!(early, vec![1]);
        assert!(member_union(&f, &early, 1024));
        assert!(!member_union(&f, &early, 1023));
        let big = BigInt::from(2).pow(200);
        assert!(f.contains_big(&big));
        assert!(!f.contains_big(&(big + 1)));
    }

    #[test]
    fn growing_blocks_membership() {
        let (f, early) = fam(1, 2, 0, LenLaw::Linear, Direction::Pos);
        for n in 0..20u32 {
            let a = 1i128 << n;
            for d in 0..=n as Int {
                assert!(member_union(&f, &early, a + d));
            }
            if n >= 2 {
                assert!(!member_union(&f, &early, a + n as Int + 1));
            }
        }
        let n = 300u32;
        let big = BigInt::from(2).pow(n);
        assert!(f.contains_big(&(big.clone() + 300)));
        assert!(!f.contains_big(&(big + 301)));
    }

    #[test]
    fn negative_side_mirrors() {
        let (p, pe) = fam(1, 3, 2, LenLaw::Const(1), Direction::Pos);
        let (n, ne) = (p.negate(), pe.iter().map(|x| -x).collect::<Vec<_>>());
        for x in -500..500 {
            assert_eq!(member_union(&p, &pe, x), member_union(&n, &ne, -x));
        }
        let big = BigInt::from(-3).pow(101) - 2; // -(3^101) - 2
        assert!(n.contains_big(&big));
    }

    #[test]
    fn same_frame_intersection_and_difference() {
        let cases = [
            (fam(1, 2, 0, LenLaw::Linear, Direction::Pos), fam(1, 2, 3, LenLaw::Const(4), Direction::Pos)),
            (fam(1, 2, 3, LenLaw::Const(4), Direction::Pos), fam(1, 2, 0, LenLaw::Linear, Direction::Pos)),
            (fam(1, 2, 0, LenLaw::Const(6), Direction::Pos), fam(1, 2, 2, LenLaw::Const(1), Direction::Pos)),
            (fam(3, 2, 1, LenLaw::Const(2), Direction::Neg), fam(3, 2, 0, LenLaw::Const(5), Direction::Neg)),
            (fam(1, 2, 0, LenLaw::Linear, Direction::Pos), fam(1, 2, 0, LenLaw::Linear, Direction::Pos)),
        ];
        for ((a, ae), (b, be)) in cases {
            let (fams, pts) = a.intersect_same_frame(&b).unwrap();
            let diff = a.minus_same_frame(&b);
            for x in -5000..5000 {
                // early points of either family are handled by the caller
                if ae.contains(&x) || be.contains(&x) {
                    continue;
                }
                let in_a = member_union(&a, &ae, x);
                let in_b = member_union(&b, &be, x);
                let in_i = fams.iter().any(|f| f.contains(x)) || pts.contains(&x);
                assert_eq!(in_i, in_a && in_b, "intersection x={x} {a:?} {b:?}");
                if let Some((dfams, dpts)) = &diff {
                    let in_d = dfams.iter().any(|f| f.contains(x)) || dpts.contains(&x);
                    assert_eq!(in_d, in_a && !in_b, "difference x={x} {a:?} {b:?}");
                }
            }
        }
        // a linear strip minus a bounded one leaves a strip pinned to the moving end
        let (a, _) = fam(1, 2, 0, LenLaw::Linear, Direction::Pos);
        let (b, _) = fam(1, 2, 3, LenLaw::Const(4), Direction::Pos);
        assert!(a.minus_same_frame(&b).is_none());
        let (c, _) = fam(1, 2, 0, LenLaw::Const(6), Direction::Pos);
        let (d, _) = fam(1, 2, 2, LenLaw::Const(1), Direction::Pos);
        assert!(c.minus_same_frame(&d).is_some());
    }

    #[test]
    fn scale_reduction_shares_frames() {
        let (a, _) = fam(4, 2, 0, LenLaw::Const(0), Direction::Pos);
        let (b, _) = fam(1, 2, 0, LenLaw::Const(0), Direction::Pos);
        assert_eq!(a.frame().0, b.frame().0);
        assert_eq!(a.frame().1, 2);
    }
}
