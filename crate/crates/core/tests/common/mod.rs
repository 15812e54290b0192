//! Helpers shared by the integration tests: independent checks that use set
//! membership only.

#![allow(dead_code)]

use delta_calc::bits::Bits;
use delta_calc::symbolic::BlockFamily;
use delta_calc::{Direction, Int, LenLaw, SymbolicSet};
use num_bigint::BigInt;

/// Radius of the pointwise invariant checks.
pub const POINTWISE_RADIUS: Int = 10_000;

/// Radius searched for a pair `x, x - g` of members witnessing `g ∈ A - A`.
pub const WITNESS_RADIUS: Int = 1_000_000;

/// Closed range of block `n` of `f` in arbitrary precision.
fn big_block(f: &BlockFamily, n: u32) -> (BigInt, BigInt) {
    let anchor = BigInt::from(f.scale()) * num_traits::pow(BigInt::from(f.base()), n as usize);
    let len = BigInt::from(f.len_at(n));
    let t = BigInt::from(f.offset());
    match f.side() {
        Direction::Pos => (&t + &anchor, &t + &anchor + len),
        Direction::Neg => (&t - &anchor - len, &t - &anchor),
    }
}

/// Radius of the first, cheap witness scan.
const NEAR_RADIUS: Int = 20_000;

/// Shifts `g` in `candidates` with no `x` in `[-reach, reach]` such that `x` and `x - g` are set.
fn without_pair(bits: &Bits, candidates: Vec<Int>, reach: Int) -> Vec<Int> {
    candidates.into_iter().filter(|&g| bits.shifted_overlap_counts(bits, g, &[reach])[0] == 0).collect()
}

/// Members `g` of `delta` in `[-radius, radius]` for which no `x` with `x ∈ A` and
/// `x - g ∈ A` is found. Candidates come from one far block of each growing
/// family and from `A ∩ [-WITNESS_RADIUS, WITNESS_RADIUS]`; every candidate pair
/// is checked by membership in `A`.
pub fn delta_outside_difference_set(a: &SymbolicSet, delta: &SymbolicSet, radius: Int) -> Vec<Int> {
    let d = delta.materialize(-radius, radius);
    let near = a.materialize(-NEAR_RADIUS - radius, NEAR_RADIUS + radius);
    let mut missing = without_pair(&near, d.ones().collect(), NEAR_RADIUS);
    let reach = missing.iter().map(|g| g.abs()).max().unwrap_or(0);
    for f in a.block_families().iter().filter(|f| f.len_law() == LenLaw::Linear) {
        if missing.is_empty() {
            break;
        }
        let n = f.start().max(u32::try_from(reach).expect("radius fits in u32"));
        let (lo, _) = big_block(f, n);
        if !a.contains_big(&lo) {
            continue;
        }
        let mut sizes: Vec<Int> = missing.iter().map(|g| g.abs()).filter(|&s| s as u128 <= f.len_at(n) as u128).collect();
        sizes.sort_unstable();
        sizes.dedup();
        // x = lo + s and lo are both members, so s and -s are differences
        let found: Vec<Int> = sizes.into_iter().filter(|&s| a.contains_big(&(&lo + BigInt::from(s)))).collect();
        missing.retain(|g| found.binary_search(&g.abs()).is_err());
    }
    if !missing.is_empty() {
        let wide = a.materialize(-WITNESS_RADIUS - radius, WITNESS_RADIUS + radius);
        missing = without_pair(&wide, missing, WITNESS_RADIUS);
    }
    missing.truncate(5);
    missing
}

/// Points of `[-radius, radius]` where `delta` and `-delta` disagree.
pub fn asymmetric_points(delta: &SymbolicSet, radius: Int) -> Vec<Int> {
    let d = delta.materialize(-radius, radius);
    (-radius..=radius).filter(|&g| d.get(g) != d.get(-g)).take(5).collect()
}

/// Whether `delta` has a member in `[-radius, radius]`.
pub fn has_member(delta: &SymbolicSet, radius: Int) -> bool {
    delta.materialize(-radius, radius).count() > 0
}
