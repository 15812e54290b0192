//! Dense membership bitmap over an integer interval.

use crate::num::Int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits {
    lo: Int,
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    /// All-zero bitmap covering `[lo, hi]`.
    pub fn new(lo: Int, hi: Int) -> Bits {
        let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
        Bits { lo, len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn lo(&self) -> Int {
        self.lo
    }

    pub fn hi(&self) -> Int {
        self.lo + self.len as Int - 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn in_range(&self, x: Int) -> bool {
        x >= self.lo && x < self.lo + self.len as Int
    }

    #[inline]
    pub fn set(&mut self, x: Int) {
        if self.in_range(x) {
            let i = (x - self.lo) as usize;
            self.words[i / 64] |= 1 << (i % 64);
        }
    }

    #[inline]
    pub fn clear(&mut self, x: Int) {
        if self.in_range(x) {
            let i = (x - self.lo) as usize;
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn get(&self, x: Int) -> bool {
        if !self.in_range(x) {
            return false;
        }
        let i = (x - self.lo) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set_range(&mut self, a: Int, b: Int) {
        let (a, b) = (a.max(self.lo), b.min(self.hi()));
        let mut x = a;
        while x <= b {
            let i = (x - self.lo) as usize;
            if i % 64 == 0 && x + 63 <= b {
                self.words[i / 64] = u64::MAX;
                x += 64;
            } else {
                self.set(x);
                x += 1;
            }
        }
    }

    pub fn clear_range(&mut self, a: Int, b: Int) {
        for x in a.max(self.lo)..=b.min(self.hi()) {
            self.clear(x);
        }
    }

    fn assert_same(&self, other: &Bits) {
        assert!(self.lo == other.lo && self.len == other.len, "bitmaps over different ranges");
    }

    pub fn or_with(&mut self, other: &Bits) {
        self.assert_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_with(&mut self, other: &Bits) {
        self.assert_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn andnot_with(&mut self, other: &Bits) {
        self.assert_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = Int> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let base = self.lo + (wi * 64) as Int;
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros();
                w &= w - 1;
                Some(base + t as Int)
            })
        })
    }

    /// Bit `i` of the word sequence read from bit position `start` (may be negative or past the end).
    #[inline]
    fn word_at(&self, start: i64) -> u64 {
        // 64 bits beginning at bit index `start`
        let wlen = self.words.len() as i64;
        let q = start.div_euclid(64);
        let r = start.rem_euclid(64) as u32;
        let get = |k: i64| if k >= 0 && k < wlen { self.words[k as usize] } else { 0 };
        if r == 0 {
            get(q)
        } else {
            (get(q) >> r) | (get(q + 1) << (64 - r))
        }
    }

    /// For each radius in `radii`, the number of `x` in `[-r, r]` with `x` in
    /// `self` and `x - shift` in `other`.
    ///
    /// Both bitmaps must share the same range, which must contain every
    /// `[-r - |shift|, r + |shift|]`.
    pub fn shifted_overlap_counts(&self, other: &Bits, shift: Int, radii: &[Int]) -> Vec<u64> {
        self.shifted_overlap_counts_many(other, &[shift], radii).pop().expect("one shift")
    }

    /// [`Bits::shifted_overlap_counts`] for several shifts, scanning member lists
    /// when either bitmap is sparse.
    pub fn shifted_overlap_counts_many(&self, other: &Bits, shifts: &[Int], radii: &[Int]) -> Vec<Vec<u64>> {
        self.assert_same(other);
        let (cs, co) = (self.count(), other.count());
        let sparse_limit = self.words.len() / 16;
        if cs.min(co) < sparse_limit {
            let self_sparse = cs <= co;
            let members: Vec<Int> = if self_sparse { self.ones().collect() } else { other.ones().collect() };
            let top = radii.iter().copied().max().unwrap_or(0);
            return shifts
                .iter()
                .map(|&shift| {
                    let mut out = vec![0u64; radii.len()];
                    for &y in &members {
                        // scanning self gives x = y; scanning other gives x = y + shift
                        let (x, hit) = if self_sparse { (y, other.get(y - shift)) } else { (y + shift, self.get(y + shift)) };
                        if hit && x.abs() <= top {
                            for (k, &r) in radii.iter().enumerate() {
                                if x.abs() <= r {
                                    out[k] += 1;
                                }
                            }
                        }
                    }
                    out
                })
                .collect();
        }
        shifts
            .iter()
            .map(|&shift| {
                radii
                    .iter()
                    .map(|&r| {
                        let a = (-r - self.lo) as i64;
                        let b = (r - self.lo) as i64;
                        let mut total = 0u64;
                        let mut i = a;
                        while i <= b {
                            let take = (b - i + 1).min(64) as u32;
                            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
                            let w = self.word_at(i) & other.word_at(i - shift as i64) & mask;
                            total += w.count_ones() as u64;
                            i += 64;
                        }
                        total
                    })
                    .collect()
            })
            .collect()
    }

    /// Sets every `x` in `[a, b]` with `pattern[residue(x, pattern.len())]`.
    pub fn set_periodic(&mut self, a: Int, b: Int, pattern: &[bool]) {
        let p = pattern.len();
        let (a, b) = (a.max(self.lo), b.min(self.hi()));
        if a > b || p == 0 {
            return;
        }
        let mut x = a;
        let mut r = crate::num::residue(x, p as u64);
        let step = |this: &mut Bits, x: &mut Int, r: &mut usize| {
            if pattern[*r] {
                this.set(*x);
            }
            *x += 1;
            *r = if *r + 1 == p { 0 } else { *r + 1 };
        };
        while x <= b && (x - self.lo) % 64 != 0 {
            step(self, &mut x, &mut r);
        }
        let first_word = ((x - self.lo) / 64) as usize;
        // after p whole words the bit pattern repeats word for word
        let seed_end = x + 64 * p as Int - 1;
        if seed_end + 64 * p as Int > b {
            while x <= b {
                step(self, &mut x, &mut r);
            }
            return;
        }
        while x <= seed_end {
            step(self, &mut x, &mut r);
        }
        let last_full = ((b - self.lo + 1) / 64) as usize;
        for k in first_word + p..last_full {
            self.words[k] |= self.words[k - p];
        }
        x = self.lo + 64 * last_full as Int;
        r = crate::num::residue(x, p as u64);
        while x <= b {
            step(self, &mut x, &mut r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_counts_match_naive() {
        let mut a = Bits::new(-300, 300);
        let mut b = Bits::new(-300, 300);
        for x in -300..=300 {
            if x % 3 == 0 || x % 7 == 1 {
                a.set(x);
            }
            if x % 2 == 0 {
                b.set(x);
            }
        }
        let mut sparse = Bits::new(-300, 300);
        for x in [-250, -64, -1, 0, 3, 77, 200] {
            sparse.set(x);
        }
        for (x, y) in [(&a, &b), (&sparse, &b), (&a, &sparse), (&sparse, &sparse)] {
            for shift in [-13i128, 0, 1, 5, 64, -65] {
                let got = x.shifted_overlap_counts(y, shift, &[10, 100, 200]);
                for (k, r) in [10, 100, 200].into_iter().enumerate() {
                    let want = (-r..=r).filter(|&t| x.get(t) && y.get(t - shift)).count() as u64;
                    assert_eq!(got[k], want, "shift={shift} r={r}");
                }
            }
        }
    }

    #[test]
    fn periodic_fill_matches_pointwise() {
        for (lo, hi) in [(-5000, 7000), (-3, 40), (-100_003, 99_999)] {
            for pat in [vec![true, false, false], vec![false, true, true, false, true], vec![true]] {
                let mut fast = Bits::new(lo, hi);
                fast.set_periodic(lo + 7, hi - 11, &pat);
                let p = pat.len() as u64;
                for x in lo..=hi {
                    let want = x >= lo + 7 && x <= hi - 11 && pat[crate::num::residue(x, p)];
                    assert_eq!(fast.get(x), want, "x={x} p={p}");
                }
            }
        }
    }

    #[test]
    fn ranges_and_iteration() {
        let mut a = Bits::new(-10, 200);
        a.set_range(-3, 150);
        assert_eq!(a.count(), 154);
        a.clear_range(0, 9);
        assert_eq!(a.ones().take(4).collect::<Vec<_>>(), vec![-3, -2, -1, 10]);
    }
}
