//! Independent re-checking of certificates from membership and window counts only.

use serde::Serialize;

use crate::bits::Bits;
use crate::classify::{Certificate, NotLargeReason};
use crate::ideal::Ideal;
use crate::num::Int;
use crate::oracle::{infinite_looking, member_trend, pair_counts_many, run_trend, side_gap_trend, MemberTrend, SCALES};
use crate::symbolic::{Direction, SymbolicSet};

/// Radius over which cover certificates are checked point by point.
pub const COVER_RADIUS: Int = 100_000;

/// Shifts checked for Δ-cover certificates.
pub const DELTA_CHECK_RADIUS: Int = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "snake_case")]
pub enum Check {
    Passed,
    Failed(String),
    /// The windows carry no evidence either way.
    Inconclusive(String),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Passed)
    }
    pub fn failed(&self) -> bool {
        matches!(self, Check::Failed(_))
    }
}

/// Points of `[-n, n]` not in `F + A`.
pub fn uncovered(f: &[Int], a: &SymbolicSet, n: Int) -> Vec<Int> {
    let m = f.iter().map(|x| x.abs()).max().unwrap_or(0);
    let bits = a.materialize(-n - m, n + m);
    (-n..=n).filter(|&x| !f.iter().any(|&t| bits.get(x - t))).collect()
}

fn cover_check(f: &[Int], a: &SymbolicSet, ideal: Ideal) -> Check {
    let miss = uncovered(f, a, COVER_RADIUS);
    let far: Vec<Int> = miss.iter().copied().filter(|x| x.abs() > COVER_RADIUS / 10).take(5).collect();
    match ideal {
        Ideal::Trivial if miss.is_empty() => Check::Passed,
        Ideal::Trivial => Check::Failed(format!("F + A misses {:?}", &miss[..miss.len().min(5)])),
        Ideal::Fin if far.is_empty() => Check::Passed,
        Ideal::Fin => Check::Failed(format!("F + A misses far points {far:?}")),
    }
}

fn top_window(a: &SymbolicSet) -> Bits {
    let n = SCALES[SCALES.len() - 1];
    a.materialize(-n, n)
}

fn grows(v: &[Int]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) && v.last() > v.first()
}

fn gap_trend(a: &SymbolicSet, dir: Direction) -> Vec<Int> {
    side_gap_trend(&top_window(a), dir, &SCALES)
}

fn runs(a: &SymbolicSet) -> Vec<Int> {
    run_trend(&top_window(a), &SCALES)
}

fn not_large_check(a: &SymbolicSet, dir: Direction, reason: NotLargeReason) -> Check {
    match reason {
        NotLargeReason::EmptyTail => {
            let bits = top_window(a);
            let counts: Vec<usize> = SCALES
                .iter()
                .map(|&n| bits.ones().filter(|&x| x * dir.sign() >= 0 && x.abs() <= n).count())
                .collect();
            if counts.windows(2).all(|w| w[0] == w[1]) {
                Check::Passed
            } else {
                Check::Failed(format!("members toward {dir} keep appearing: {counts:?}"))
            }
        }
        NotLargeReason::UnboundedGaps => {
            let g = gap_trend(a, dir);
            if grows(&g) {
                Check::Passed
            } else {
                Check::Failed(format!("gaps toward {dir} do not grow: {g:?}"))
            }
        }
    }
}

/// Window consistency of a claimed `Δ` on `[-radius, radius]`: a non-member must
/// not look like a member. Members that show no growth are reported, not failed.
pub fn delta_window_consistency(a: &SymbolicSet, ideal: Ideal, delta: &SymbolicSet, radius: Int) -> Check {
    let r = SCALES[SCALES.len() - 1] + radius;
    let bits = a.materialize(-r, r);
    let mut quiet = Vec::new();
    let shifts: Vec<Int> = (-radius..=radius).collect();
    let all_counts = pair_counts_many(&bits, &bits, &shifts, &SCALES);
    for (&g, counts) in shifts.iter().zip(all_counts) {
        let inside = delta.contains(g);
        let (looks_member, confirmed) = match ideal {
            Ideal::Fin => (infinite_looking(&counts), member_trend(&counts) == MemberTrend::Growing),
            Ideal::Trivial => (counts[counts.len() - 1] > 0, counts[counts.len() - 1] > 0),
        };
        if looks_member && !inside {
            return Check::Failed(format!("shift {g} outside Δ has counts {counts:?}"));
        }
        if inside && !confirmed {
            quiet.push(g);
        }
    }
    if quiet.is_empty() {
        Check::Passed
    } else {
        Check::Inconclusive(format!("members {quiet:?} show no growth in the windows"))
    }
}

fn delta_cover_check(a: &SymbolicSet, ideal: Ideal, f: &[Int], delta: &SymbolicSet) -> Check {
    let cover = cover_check(f, delta, Ideal::Trivial);
    if !cover.passed() {
        return cover;
    }
    match delta_window_consistency(a, ideal, delta, DELTA_CHECK_RADIUS) {
        Check::Failed(m) => Check::Failed(m),
        _ => Check::Passed,
    }
}

/// Re-checks a certificate for `a` using windows of the set only.
pub fn verify_certificate(a: &SymbolicSet, ideal: Ideal, cert: &Certificate) -> Check {
    match cert {
        Certificate::LargeWitness { f } => cover_check(f, a, ideal),
        Certificate::NotLarge { direction, reason } => not_large_check(a, *direction, *reason),
        Certificate::ThickWitness { .. } => {
            let r = runs(a);
            if grows(&r) {
                Check::Passed
            } else {
                Check::Failed(format!("runs do not grow: {r:?}"))
            }
        }
        Certificate::NotThick { run_bound } => {
            let r = runs(a);
            if r.iter().all(|x| x <= run_bound) {
                Check::Passed
            } else {
                Check::Failed(format!("runs {r:?} exceed bound {run_bound}"))
            }
        }
        Certificate::PrethickWitness { f, .. } => {
            let r = runs(&SymbolicSet::minkowski_finite(f, a));
            if grows(&r) {
                Check::Passed
            } else {
                Check::Failed(format!("runs of F + A do not grow: {r:?}"))
            }
        }
        Certificate::SmallWitness { .. } => {
            let spread: Vec<Int> = (0..8).collect();
            let r = runs(&SymbolicSet::minkowski_finite(&spread, a));
            if r[r.len() - 1] == r[r.len() - 2] {
                Check::Passed
            } else {
                Check::Failed(format!("runs of [0,7] + A keep growing: {r:?}"))
            }
        }
        Certificate::NonSmallWitness { l, f_l, direction, .. } => {
            let large = cover_check(f_l, l, Ideal::Trivial);
            if !large.passed() {
                return large;
            }
            let rest = a.complement().intersection(l);
            let g = gap_trend(&rest, *direction);
            if grows(&g) {
                Check::Passed
            } else {
                Check::Failed(format!("(Z \\ A) ∩ L has gaps {g:?} toward {direction}"))
            }
        }
        Certificate::DeltaLargeWitness { f, delta } => delta_cover_check(a, ideal, f, delta),
        Certificate::NotDeltaLarge { delta, direction, reason } => {
            if let Check::Failed(m) = delta_window_consistency(a, ideal, delta, 64) {
                return Check::Failed(m);
            }
            not_large_check(delta, *direction, *reason)
        }
        Certificate::Window { .. } => Check::Inconclusive("verdict from window statistics".into()),
    }
}
