//! Brute-force window machinery used to cross-check every structural rule.

use serde::Serialize;

use crate::bits::Bits;
use crate::classify::classify_all;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::num::Int;
use crate::symbolic::{Direction, SymbolicSet};

/// Window radii used for trend checks.
pub const SCALES: [Int; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// An intersection looks infinite when its count at the largest scale is at
/// least this and it grew at every scale step.
pub const MIN_INFINITE_COUNT: u64 = 32;

/// Largest radius [`materialize`] accepts by default.
pub const DEFAULT_RADIUS_CAP: u64 = 10_000_000;

/// Range of shifts `g` examined by window heuristics and cross-checks.
pub const SHIFT_RADIUS: Int = 64;

/// Membership bitmap of a set over `[-n, n]`.
#[derive(Clone, Debug)]
pub struct WindowView {
    radius: Int,
    bits: Bits,
}

impl WindowView {
    pub fn radius(&self) -> Int {
        self.radius
    }
    pub fn bits(&self) -> &Bits {
        &self.bits
    }
    pub fn contains(&self, x: Int) -> bool {
        self.bits.get(x)
    }
    pub fn members(&self) -> Vec<Int> {
        self.bits.ones().collect()
    }
    pub fn count(&self) -> usize {
        self.bits.count()
    }
    /// The same window cut down to a smaller radius.
    pub fn restrict(&self, radius: Int) -> WindowView {
        let r = radius.min(self.radius);
        let mut bits = Bits::new(-r, r);
        for x in self.bits.ones().filter(|x| x.abs() <= r) {
            bits.set(x);
        }
        WindowView { radius: r, bits }
    }
}

pub fn materialize(a: &SymbolicSet, n: Int) -> Result<WindowView> {
    materialize_with_cap(a, n, DEFAULT_RADIUS_CAP)
}

pub fn materialize_with_cap(a: &SymbolicSet, n: Int, cap: u64) -> Result<WindowView> {
    if n < 0 || n as u128 > cap as u128 {
        return Err(Error::BudgetExceeded { radius: n.max(0) as u64, cap });
    }
    Ok(WindowView { radius: n, bits: a.materialize(-n, n) })
}

/// Largest distance between consecutive members; the stretches before the
/// first and after the last member are not counted.
pub fn max_gap(w: &WindowView) -> Result<Int> {
    let mut prev: Option<Int> = None;
    let mut best = None;
    for x in w.bits.ones() {
        if let Some(p) = prev {
            best = Some(best.map_or(x - p, |b: Int| b.max(x - p)));
        }
        prev = Some(x);
    }
    best.ok_or_else(|| Error::Precondition("max_gap needs at least two members".into()))
}

/// Largest distance between consecutive members, counting the window edges
/// as members.
pub fn max_gap_with_edges(w: &WindowView) -> Int {
    let mut prev = -w.radius - 1;
    let mut best = 0;
    for x in w.bits.ones().chain(std::iter::once(w.radius + 1)) {
        best = best.max(x - prev);
        prev = x;
    }
    best
}

/// Longest run of consecutive members.
pub fn max_run(w: &WindowView) -> Int {
    let mut best = 0;
    let mut cur = 0;
    let mut prev = None;
    for x in w.bits.ones() {
        cur = if prev == Some(x - 1) { cur + 1 } else { 1 };
        best = best.max(cur);
        prev = Some(x);
    }
    best
}

/// `|(g + A) ∩ A ∩ (-n, n]|`; the half-open window holds exactly `n` points of each parity.
pub fn delta_window_estimate(a: &SymbolicSet, g: Int, n: Int) -> Result<u64> {
    if n < 1 {
        return Err(Error::Precondition("window radius must be positive".into()));
    }
    let r = n + g.abs();
    let bits = materialize(a, r)?.bits;
    let closed = bits.shifted_overlap_counts(&bits, g, &[n])[0];
    let edge = u64::from(bits.get(-n) && bits.get(-n - g));
    Ok(closed - edge)
}

/// `|(g + X) ∩ Y ∩ [-N, N]|` for each `N` in `scales`.
pub fn pair_counts(x: &Bits, y: &Bits, g: Int, scales: &[Int]) -> Vec<u64> {
    y.shifted_overlap_counts(x, g, scales)
}

/// [`pair_counts`] for every shift in `shifts`.
pub fn pair_counts_many(x: &Bits, y: &Bits, shifts: &[Int], scales: &[Int]) -> Vec<Vec<u64>> {
    y.shifted_overlap_counts_many(x, shifts, scales)
}

/// Materializes a set once with enough margin for shifted counts over [`SCALES`].
pub fn scale_bitmap(a: &SymbolicSet) -> Bits {
    let r = SCALES[SCALES.len() - 1] + 2 * SHIFT_RADIUS;
    a.materialize(-r, r)
}

/// Counts at increasing scales look like an infinite intersection.
pub fn infinite_looking(counts: &[u64]) -> bool {
    counts.last().is_some_and(|&c| c >= MIN_INFINITE_COUNT) && counts.windows(2).all(|w| w[1] > w[0])
}

/// Trend of counts for a shift asserted to be in `Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberTrend {
    /// The count grew between the last two scales.
    Growing,
    /// All counts are zero: any overlap starts beyond the largest window.
    Unobservable,
    /// Nonzero counts that did not grow at the last step; finite early
    /// coincidences look like this when the infinite part starts late.
    Stalled,
}

pub fn member_trend(counts: &[u64]) -> MemberTrend {
    match counts {
        c if c.iter().all(|&x| x == 0) => MemberTrend::Unobservable,
        [.., a, b] if b > a => MemberTrend::Growing,
        _ => MemberTrend::Stalled,
    }
}

/// Shifts examined by [`cross_validate`].
pub const CROSS_SHIFT_RADIUS: Int = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// An exact verdict contradicted by the windows.
    Hard,
    /// An approximate verdict contradicted, or an exact one left unconfirmed.
    Soft,
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub property: String,
    pub severity: Severity,
    pub detail: String,
}

/// A symbolic verdict next to the window statistic that should confirm it.
#[derive(Clone, Debug, Serialize)]
pub struct TrendCheck {
    pub verdict: bool,
    pub exact: bool,
    /// Per scale; for `large` the larger of the two one-sided edge gaps.
    pub trend: Vec<Int>,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaAgreement {
    pub exact: bool,
    pub checked: usize,
    /// Members of `Δ` whose counts grew at the last scale step.
    pub confirmed: Vec<Int>,
    /// Members of `Δ` without visible growth.
    pub unconfirmed: Vec<Int>,
    /// Non-members whose counts look like an infinite intersection.
    pub contradicted: Vec<Int>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub set: SymbolicSet,
    pub ideal: Ideal,
    pub scales: Vec<Int>,
    pub large: TrendCheck,
    pub thick: TrendCheck,
    pub delta: DeltaAgreement,
    pub findings: Vec<Finding>,
}

impl CrossValidation {
    pub fn hard_failures(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Hard).count()
    }
    pub fn soft_notes(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Soft).count()
    }
}

/// For each `n` in `scales`, the largest gap in `[0, n]` (or `[-n, 0]`), counting
/// the window ends as members. `bits` must cover `[-max, max]`.
pub fn side_gap_trend(bits: &Bits, dir: Direction, scales: &[Int]) -> Vec<Int> {
    let top = scales.iter().copied().max().unwrap_or(0);
    let mut members: Vec<Int> = match dir {
        Direction::Pos => bits.ones().filter(|&x| (0..=top).contains(&x)).collect(),
        Direction::Neg => bits.ones().filter(|&x| (-top..=0).contains(&x)).map(|x| -x).collect(),
    };
    if dir == Direction::Neg {
        members.reverse();
    }
    scales
        .iter()
        .map(|&n| {
            let mut prev = -1;
            let mut best = 0;
            for &x in members.iter().take_while(|&&x| x <= n) {
                best = best.max(x - prev);
                prev = x;
            }
            best.max(n + 1 - prev)
        })
        .collect()
}

/// For each `n` in `scales`, the longest run of members inside `[-n, n]`.
pub fn run_trend(bits: &Bits, scales: &[Int]) -> Vec<Int> {
    let mut best = vec![0; scales.len()];
    let mut close = |l: Int, r: Int| {
        for (k, &n) in scales.iter().enumerate() {
            let len = r.min(n) - l.max(-n) + 1;
            best[k] = best[k].max(len);
        }
    };
    let mut run: Option<(Int, Int)> = None;
    for x in bits.ones() {
        run = match run {
            Some((l, r)) if r + 1 == x => Some((l, x)),
            Some((l, r)) => {
                close(l, r);
                Some((x, x))
            }
            None => Some((x, x)),
        };
    }
    if let Some((l, r)) = run {
        close(l, r);
    }
    best
}

fn strictly_grows(v: &[Int]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) && v.last() > v.first()
}

fn settles(v: &[Int]) -> bool {
    matches!(v, [.., a, b] if a == b)
}

/// Compares the symbolic large, thick and `Δ` verdicts for `a` with window
/// trends over `scales`.
pub fn cross_validate(a: &SymbolicSet, ideal: Ideal, scales: &[Int]) -> Result<CrossValidation> {
    cross_validate_with_cap(a, ideal, scales, DEFAULT_RADIUS_CAP)
}

/// [`cross_validate`] with an explicit bound on the materialized radius.
pub fn cross_validate_with_cap(a: &SymbolicSet, ideal: Ideal, scales: &[Int], cap: u64) -> Result<CrossValidation> {
    if scales.is_empty() || scales.windows(2).any(|w| w[0] >= w[1]) || scales[0] < 1 {
        return Err(Error::Precondition("scales must be positive and strictly ascending".into()));
    }
    let top = scales[scales.len() - 1];
    let r = top + CROSS_SHIFT_RADIUS;
    if r as u128 > cap as u128 {
        return Err(Error::BudgetExceeded { radius: r as u64, cap });
    }
    let bits = a.materialize(-r, r);
    let report = classify_all(a, ideal)?;
    let mut findings = Vec::new();
    let mut note = |property: &str, exact: bool, detail: String| {
        let severity = if exact { Severity::Hard } else { Severity::Soft };
        findings.push(Finding { property: property.into(), severity, detail });
    };

    let pos = side_gap_trend(&bits, Direction::Pos, scales);
    let neg = side_gap_trend(&bits, Direction::Neg, scales);
    let gaps: Vec<Int> = pos.iter().zip(&neg).map(|(p, q)| *p.max(q)).collect();
    let large_ok = if report.large.value {
        settles(&pos) && settles(&neg)
    } else {
        strictly_grows(&pos) || strictly_grows(&neg)
    };
    if !large_ok {
        note("large", report.large.exact, format!("verdict {} with gaps +{pos:?} -{neg:?}", report.large.value));
    }
    let large = TrendCheck { verdict: report.large.value, exact: report.large.exact, trend: gaps, agrees: large_ok };

    let runs = run_trend(&bits, scales);
    let thick_ok = if report.thick.value { strictly_grows(&runs) } else { settles(&runs) };
    if !thick_ok {
        note("thick", report.thick.exact, format!("verdict {} with runs {runs:?}", report.thick.value));
    }
    let thick = TrendCheck { verdict: report.thick.value, exact: report.thick.exact, trend: runs, agrees: thick_ok };

    let mut delta = DeltaAgreement {
        exact: report.delta_exact,
        checked: 0,
        confirmed: Vec::new(),
        unconfirmed: Vec::new(),
        contradicted: Vec::new(),
    };
    let shifts: Vec<Int> = (-CROSS_SHIFT_RADIUS..=CROSS_SHIFT_RADIUS).collect();
    let all_counts = pair_counts_many(&bits, &bits, &shifts, scales);
    for (&g, counts) in shifts.iter().zip(all_counts) {
        let last = counts[counts.len() - 1];
        let (looks_member, confirmed) = match ideal {
            Ideal::Fin => (infinite_looking(&counts), member_trend(&counts) == MemberTrend::Growing),
            Ideal::Trivial => (last > 0, last > 0),
        };
        delta.checked += 1;
        match (report.delta.contains(g), looks_member, confirmed) {
            (true, _, true) => delta.confirmed.push(g),
            (true, _, false) => delta.unconfirmed.push(g),
            (false, true, _) => {
                delta.contradicted.push(g);
                note("delta", report.delta_exact, format!("shift {g} outside Δ has counts {counts:?}"));
            }
            (false, false, _) => {}
        }
    }
    if !delta.unconfirmed.is_empty() {
        findings.push(Finding {
            property: "delta".into(),
            severity: Severity::Soft,
            detail: format!("members {:?} show no growth in the windows", delta.unconfirmed),
        });
    }
    Ok(CrossValidation { set: a.clone(), ideal, scales: scales.to_vec(), large, thick, delta, findings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::LenLaw;

    fn pow2() -> SymbolicSet {
        SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 0, false).unwrap()
    }

    #[test]
    fn materialize_examples() {
        let evens = SymbolicSet::progression(2, 0).unwrap();
        assert_eq!(materialize(&evens, 4).unwrap().members(), vec![-4, -2, 0, 2, 4]);
        assert_eq!(materialize(&SymbolicSet::empty(), 100).unwrap().count(), 0);
        assert_eq!(materialize(&pow2(), 10).unwrap().members(), vec![1, 2, 4, 8]);
        assert!(matches!(materialize(&evens, 20_000_000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn gap_and_run_examples() {
        let evens = materialize(&SymbolicSet::progression(2, 0).unwrap(), 1000).unwrap();
        assert_eq!(max_gap(&evens).unwrap(), 2);
        assert_eq!(max_run(&evens), 1);
        let z = materialize(&SymbolicSet::integers(), 1000).unwrap();
        assert_eq!(max_gap(&z).unwrap(), 1);
        assert_eq!(max_run(&z), 2001);
        assert_eq!(max_gap(&materialize(&pow2(), 1024).unwrap()).unwrap(), 512);
        let grow = SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, false).unwrap();
        assert_eq!(max_run(&materialize(&grow, 1 << 20).unwrap()), 20);
        assert!(max_gap(&materialize(&SymbolicSet::finite([3]), 10).unwrap()).is_err());
    }

    #[test]
    fn window_estimate_examples() {
        let evens = SymbolicSet::progression(2, 0).unwrap();
        assert_eq!(delta_window_estimate(&evens, 2, 100).unwrap(), 100);
        assert_eq!(delta_window_estimate(&evens, 1, 100).unwrap(), 0);
        assert_eq!(delta_window_estimate(&pow2(), 0, 1024).unwrap(), 11);
    }

    #[test]
    fn trend_rules() {
        assert!(infinite_looking(&[10, 100, 1000, 10000]));
        assert!(!infinite_looking(&[10, 14, 17, 20]));
        assert!(!infinite_looking(&[40, 40, 40, 40]));
        assert_eq!(member_trend(&[0, 0, 3, 9]), MemberTrend::Growing);
        assert_eq!(member_trend(&[9, 9, 10, 19]), MemberTrend::Growing);
        assert_eq!(member_trend(&[9, 9, 9, 9]), MemberTrend::Stalled);
        assert_eq!(member_trend(&[0, 0, 0, 0]), MemberTrend::Unobservable);
        assert_eq!(member_trend(&[2, 2, 2, 2]), MemberTrend::Stalled);
    }

    #[test]
    fn cross_validation_examples() {
        let evens = SymbolicSet::progression(2, 0).unwrap();
        let r = cross_validate(&evens, Ideal::Fin, &SCALES).unwrap();
        assert!(r.findings.is_empty(), "{:?}", r.findings);
        assert_eq!(r.delta.confirmed.len(), 51);

        let pow2 = SymbolicSet::blocks(1, 2, LenLaw::Const(0), 0, 0, false).unwrap();
        let r = cross_validate(&pow2, Ideal::Fin, &SCALES).unwrap();
        assert!(!r.large.verdict && r.large.agrees);
        assert!(r.large.trend.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(r.hard_failures(), 0);

        let growing = SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, false).unwrap();
        let r = cross_validate(&growing, Ideal::Fin, &SCALES).unwrap();
        assert!(r.thick.verdict && r.thick.agrees);
        assert!(r.thick.trend.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(r.hard_failures(), 0);
    }

    #[test]
    fn cross_validation_rejects_bad_scales() {
        let z = SymbolicSet::integers();
        assert!(cross_validate(&z, Ideal::Fin, &[10, 5]).is_err());
        assert!(cross_validate(&z, Ideal::Fin, &[]).is_err());
    }

    #[test]
    fn one_bitmap_trends_match_per_scale_windows() {
        let sets = [
            SymbolicSet::blocks(1, 2, LenLaw::Linear, 0, 0, true).unwrap(),
            SymbolicSet::blocks(1, 3, LenLaw::Const(0), 2, 0, false).unwrap(),
            SymbolicSet::progression(5, 2).unwrap(),
            SymbolicSet::finite([-7, 3, 40]),
            SymbolicSet::empty(),
        ];
        let scales = [10, 100, 1000, 5000];
        for a in &sets {
            let bits = a.materialize(-5000, 5000);
            let runs: Vec<Int> = scales.iter().map(|&n| max_run(&materialize(a, n).unwrap())).collect();
            assert_eq!(run_trend(&bits, &scales), runs, "{a}");
            for dir in [Direction::Pos, Direction::Neg] {
                let direct: Vec<Int> = scales
                    .iter()
                    .map(|&n| {
                        let side: Vec<Int> = match dir {
                            Direction::Pos => (0..=n).filter(|&x| a.contains(x)).collect(),
                            Direction::Neg => (-n..=0).rev().filter(|&x| a.contains(x)).map(|x| -x).collect(),
                        };
                        let mut pts = vec![-1];
                        pts.extend(side);
                        pts.push(n + 1);
                        pts.windows(2).map(|w| w[1] - w[0]).max().unwrap()
                    })
                    .collect();
                assert_eq!(side_gap_trend(&bits, dir, &scales), direct, "{a} {dir}");
            }
        }
    }
}
