//! The cover lemmas over small finite groups under the trivial ideal, checked by exhaustion.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::derivation::delta_finite_group;
use crate::error::{Error, Result};
use crate::group::{left_product_set, FiniteGroup, FiniteSubset, DEFAULT_ENUMERATION_CAP};
use crate::ideal::Ideal;

/// Bitmask arithmetic for one group, precomputed from its table.
struct Masks {
    n: usize,
    full: u64,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl Masks {
    fn new(g: &FiniteGroup) -> Masks {
        let n = g.order();
        let mul = (0..n).map(|a| (0..n).map(|b| g.mul(a, b)).collect()).collect();
        let inv = (0..n).map(|a| g.inv(a)).collect();
        Masks { n, full: (1u64 << n) - 1, mul, inv }
    }
    fn translate(&self, g: usize, a: u64) -> u64 {
        ones(a).fold(0, |m, x| m | 1 << self.mul[g][x])
    }
    fn product(&self, f: u64, a: u64) -> u64 {
        ones(f).fold(0, |m, x| m | self.translate(x, a))
    }
    fn delta(&self, a: u64) -> u64 {
        (0..self.n).filter(|&g| self.translate(g, a) & a != 0).fold(0, |m, g| m | 1 << g)
    }
}

fn ones(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| m >> i & 1 == 1)
}

/// Pairs `(g, f_i)` with `f_i^-1 g ∈ Δ(A)`, one per group element.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteLemmaLarge {
    pub group: String,
    pub delta: Vec<usize>,
    pub witnesses: Vec<(usize, usize)>,
}

/// `FA = G` forces `FΔ(A) = G`; returns the element of `F` used for every `g`.
pub fn lemma_large_verify_finite(a: &FiniteSubset, f: &FiniteSubset, ideal: Ideal) -> Result<FiniteLemmaLarge> {
    ideal.require_proper_on_finite()?;
    if !left_product_set(f, a)?.is_full() {
        return Err(Error::Precondition(format!("F{a:?} is not the whole group")));
    }
    let ctx = a.context();
    let delta = delta_finite_group(a, ideal)?;
    let mut witnesses = Vec::new();
    for g in 0..ctx.order() {
        let fi = f
            .elements()
            .into_iter()
            .find(|&fi| delta.contains(ctx.mul(ctx.inv(fi), g)))
            .ok_or_else(|| Error::Verification(format!("no f in F with f^-1 {g} in Δ")))?;
        witnesses.push((g, fi));
    }
    if !left_product_set(f, &delta)?.is_full() {
        return Err(Error::Verification("FΔ(A) is not the whole group".into()));
    }
    Ok(FiniteLemmaLarge { group: ctx.name().to_string(), delta: delta.elements(), witnesses })
}

/// [`crate::theorems::LemmaUnionTrace`] over a finite group, with sets as element lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum FiniteUnionTrace {
    DeltaCover { delta: Vec<usize> },
    Shift { g: usize, translates: Vec<usize>, i1: Vec<usize>, i2: Vec<usize> },
}

fn union_masks(m: &Masks, x: u64, a: u64, b: u64, f: u64) -> std::result::Result<FiniteUnionTrace, String> {
    let delta = m.delta(a);
    if m.product(f, delta) == m.full {
        return Ok(FiniteUnionTrace::DeltaCover { delta: ones(delta).collect() });
    }
    let g = (0..m.n).find(|&g| m.product(f, delta) >> g & 1 == 0).expect("product is not full");
    // t_i = f_i^-1 g
    let t: Vec<usize> = ones(f).map(|fi| m.mul[m.inv[fi]][g]).collect();
    let i1 = ones(a).filter(|&h| t.iter().any(|&ti| a >> m.mul[ti][h] & 1 == 1)).fold(0u64, |s, h| s | 1 << h);
    let i2 = ones(x).filter(|&h| t.iter().all(|&ti| x >> m.mul[ti][h] & 1 == 0)).fold(0u64, |s, h| s | 1 << h);
    // g^-1 F ∪ {e}
    let ginv = m.inv[g];
    let translates = ones(f).fold(1u64 << identity(m), |s, fi| s | 1 << m.mul[ginv][fi]);
    let tb = m.product(translates, b);
    if i1 != 0 || i2 != 0 {
        return Err(format!("g = {g}: I1 = {i1:#b}, I2 = {i2:#b} are not empty"));
    }
    if x & !tb != 0 {
        return Err(format!("g = {g}: (g^-1 F ∪ {{e}}) B misses {:#b} of X", x & !tb));
    }
    Ok(FiniteUnionTrace::Shift { g, translates: ones(translates).collect(), i1: vec![], i2: vec![] })
}

fn identity(m: &Masks) -> usize {
    (0..m.n).find(|&e| (0..m.n).all(|x| m.mul[e][x] == x)).expect("groups have an identity")
}

/// Either `FΔ(A) = G` or a `g` with `(g^-1 F ∪ {e}) B = X`, for `X = A ∪ B` and `FX = G`.
pub fn lemma_union_finite(x: &FiniteSubset, a: &FiniteSubset, b: &FiniteSubset, f: &FiniteSubset, ideal: Ideal) -> Result<FiniteUnionTrace> {
    ideal.require_proper_on_finite()?;
    if a.union(b)? != *x {
        return Err(Error::Precondition("X is not A ∪ B".into()));
    }
    if !left_product_set(f, x)?.is_full() {
        return Err(Error::Precondition("FX is not the whole group".into()));
    }
    let m = Masks::new(x.context());
    union_masks(&m, x.bits(), a.bits(), b.bits(), f.bits()).map_err(Error::Verification)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteValidationConfig {
    /// Groups up to this order get every decomposition; larger ones are sampled.
    pub exhaustive_union_max_order: usize,
    pub union_samples: usize,
    pub seed: u64,
}

impl Default for FiniteValidationConfig {
    fn default() -> Self {
        FiniteValidationConfig { exhaustive_union_max_order: 6, union_samples: 100_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteValidationReport {
    pub group: String,
    pub order: usize,
    pub large_pairs: u64,
    pub large_counterexamples: u64,
    pub union_triples: u64,
    pub union_exhaustive: bool,
    pub union_delta_cover: u64,
    pub union_shift: u64,
    pub union_counterexamples: u64,
    pub seed: u64,
    /// Up to five counterexamples, for inspection.
    pub examples: Vec<String>,
}

impl FiniteValidationReport {
    pub fn counterexamples(&self) -> u64 {
        self.large_counterexamples + self.union_counterexamples
    }
}

/// Both lemmas over every `A ⊆ G` and `F` with `FA = G`, and over decompositions `X = A ∪ B`.
pub fn exhaustive_finite_validation(ctx: &Arc<FiniteGroup>, cfg: &FiniteValidationConfig) -> Result<FiniteValidationReport> {
    let order = ctx.order();
    if order > DEFAULT_ENUMERATION_CAP {
        return Err(Error::CapExceeded { order, cap: DEFAULT_ENUMERATION_CAP });
    }
    let m = Masks::new(ctx);
    let mut r = FiniteValidationReport {
        group: ctx.name().to_string(),
        order,
        large_pairs: 0,
        large_counterexamples: 0,
        union_triples: 0,
        union_exhaustive: order <= cfg.exhaustive_union_max_order,
        union_delta_cover: 0,
        union_shift: 0,
        union_counterexamples: 0,
        seed: cfg.seed,
        examples: Vec::new(),
    };
    let deltas: Vec<u64> = (0..=m.full).map(|a| m.delta(a)).collect();
    let products: Vec<Vec<u64>> = (0..=m.full).map(|f| (0..=m.full).map(|a| m.product(f, a)).collect()).collect();
    for a in 0..=m.full {
        for f in 0..=m.full {
            if products[f as usize][a as usize] != m.full {
                continue;
            }
            r.large_pairs += 1;
            if products[f as usize][deltas[a as usize] as usize] != m.full {
                r.large_counterexamples += 1;
                if r.examples.len() < 5 {
                    r.examples.push(format!("lemma large: A = {a:#b}, F = {f:#b}"));
                }
            }
        }
    }
    let run = |x: u64, a: u64, b: u64, f: u64, r: &mut FiniteValidationReport| {
        r.union_triples += 1;
        match union_masks(&m, x, a, b, f) {
            Ok(FiniteUnionTrace::DeltaCover { .. }) => r.union_delta_cover += 1,
            Ok(FiniteUnionTrace::Shift { .. }) => r.union_shift += 1,
            Err(e) => {
                r.union_counterexamples += 1;
                if r.examples.len() < 5 {
                    r.examples.push(format!("lemma union: X = {x:#b}, A = {a:#b}, B = {b:#b}, F = {f:#b}: {e}"));
                }
            }
        }
    };
    if r.union_exhaustive {
        // each element lies in A only, B only, both, or outside X
        for code in 0..4u64.pow(order as u32) {
            let (mut a, mut b, mut c) = (0u64, 0u64, code);
            for i in 0..order {
                match c % 4 {
                    0 => a |= 1 << i,
                    1 => b |= 1 << i,
                    2 => {
                        a |= 1 << i;
                        b |= 1 << i;
                    }
                    _ => {}
                }
                c /= 4;
            }
            let x = a | b;
            for f in 0..=m.full {
                if products[f as usize][x as usize] == m.full {
                    run(x, a, b, f, &mut r);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        while r.union_triples < cfg.union_samples as u64 {
            let (a, b) = (rng.gen::<u64>() & m.full, rng.gen::<u64>() & m.full);
            let x = a | b;
            let f = rng.gen::<u64>() & m.full;
            if products[f as usize][x as usize] == m.full {
                run(x, a, b, f, &mut r);
            }
        }
    }
    Ok(r)
}
