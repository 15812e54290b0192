//! Curated and seeded random set expressions used by the corpus runner and tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::parse_set;
use crate::error::Result;
use crate::symbolic::SymbolicSet;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_RANDOM_COUNT: usize = 200;
/// Largest block base used by the random generator.
pub const MAX_RANDOM_BASE: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Finite,
    Periodic,
    Blocks,
    Mixed,
    /// Drawn by the seeded generator.
    Random,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub expr: String,
    pub category: Category,
}

impl CorpusEntry {
    pub fn set(&self) -> Result<SymbolicSet> {
        parse_set(&self.expr)
    }
}

const CURATED: &[(&str, &str, Category)] = &[
    ("empty", "empty", Category::Finite),
    ("integers", "Z", Category::Periodic),
    ("singleton", "fin({0})", Category::Finite),
    ("scattered points", "fin({-3, 1, 4, 100})", Category::Finite),
    ("evens", "ap(p=2, r=0)", Category::Periodic),
    ("3Z+1", "ap(p=3, r=1)", Category::Periodic),
    ("one-sided classes", "up(p=5, rpos={1,2}, rneg={})", Category::Periodic),
    ("naturals", "up(p=1, rpos={0}, rneg={})", Category::Periodic),
    ("two-sided mix", "up(p=6, rpos={0,1,3}, rneg={2})", Category::Periodic),
    ("4Z with a window", "up(p=4, rpos={0}, rneg={0}, except={-1,1,2}, window=2)", Category::Periodic),
    ("powers of two", "blocks(s=1, b=2, len=const(0))", Category::Blocks),
    ("mirrored powers of two", "blocks(s=1, b=2, len=const(0), mirror)", Category::Blocks),
    ("short blocks base 3", "blocks(s=1, b=3, len=const(2))", Category::Blocks),
    ("growing blocks", "blocks(s=1, b=2, len=linear)", Category::Blocks),
    ("mirrored growing blocks", "blocks(s=1, b=2, len=linear, mirror)", Category::Blocks),
    ("shifted growing blocks base 4", "blocks(s=3, b=4, len=linear, t=-2)", Category::Blocks),
    ("negative growing blocks", "blocks(s=1, b=2, len=linear, side=neg)", Category::Blocks),
    ("3Z and powers of two", "union(ap(p=3, r=0), blocks(s=1, b=2, len=const(0)))", Category::Mixed),
    ("4Z and powers of two", "union(ap(p=4, r=0), blocks(s=1, b=2, len=const(0)))", Category::Mixed),
    ("non-powers of two", "complement(blocks(s=1, b=2, len=const(0)))", Category::Mixed),
    ("gaps of growing length", "complement(blocks(s=1, b=2, len=linear))", Category::Mixed),
    ("complement of 3Z", "complement(ap(p=3, r=0))", Category::Periodic),
    ("growing blocks with points", "union(fin({1, 2, 3}), blocks(s=1, b=2, len=linear))", Category::Mixed),
    ("thickened powers of two", "minkowski(f={0,1,2}, blocks(s=1, b=2, len=const(0)))", Category::Blocks),
    ("translated pairs base 5", "translate(blocks(s=1, b=5, len=const(1)), g=7)", Category::Blocks),
    (
        "naturals and negative powers",
        "union(up(p=1, rpos={0}, rneg={}), blocks(s=1, b=2, len=const(0), side=neg))",
        Category::Mixed,
    ),
    ("evens without powers of two", "intersection(ap(p=2, r=0), complement(blocks(s=1, b=2, len=const(0))))", Category::Mixed),
    ("5Z+2 and growing blocks base 3", "union(ap(p=5, r=2), blocks(s=1, b=3, len=linear))", Category::Mixed),
    ("evens minus growing blocks", "complement(union(ap(p=2, r=1), blocks(s=1, b=2, len=linear)))", Category::Mixed),
    (
        "powers of two and three",
        "union(blocks(s=1, b=2, len=const(0)), blocks(s=1, b=3, len=const(0)))",
        Category::Blocks,
    ),
    ("positive half with 3Z below", "up(p=3, rpos={0,1,2}, rneg={0})", Category::Periodic),
    ("two classes mod 10", "minkowski(f={0,5}, ap(p=10, r=3))", Category::Periodic),
    ("7Z+6 with far points", "union(fin({-1000, 1000}), ap(p=7, r=6))", Category::Mixed),
    ("negative half-line", "complement(up(p=1, rpos={0}, rneg={}))", Category::Periodic),
    ("holes of growing length on both sides", "complement(blocks(s=2, b=2, len=linear, t=1, mirror))", Category::Mixed),
    ("odd non-powers", "intersection(ap(p=2, r=1), complement(blocks(s=1, b=3, len=const(0))))", Category::Mixed),
];

pub fn curated() -> Vec<CorpusEntry> {
    CURATED
        .iter()
        .map(|&(name, expr, category)| CorpusEntry { name: name.into(), expr: expr.into(), category })
        .collect()
}

fn random_residues<R: Rng>(rng: &mut R, p: u64, allow_empty: bool) -> Vec<u64> {
    loop {
        let v: Vec<u64> = (0..p).filter(|_| rng.gen_bool(0.4)).collect();
        if allow_empty || !v.is_empty() {
            return v;
        }
    }
}

fn fmt_set(v: &[impl ToString]) -> String {
    format!("{{{}}}", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn random_up<R: Rng>(rng: &mut R) -> String {
    let p = rng.gen_range(1..=6);
    if rng.gen_bool(0.5) {
        return format!("ap(p={p}, r={})", rng.gen_range(0..p));
    }
    let pos = random_residues(rng, p, true);
    let neg = if rng.gen_bool(0.5) { pos.clone() } else { random_residues(rng, p, true) };
    format!("up(p={p}, rpos={}, rneg={})", fmt_set(&pos), fmt_set(&neg))
}

fn random_fin<R: Rng>(rng: &mut R) -> String {
    let k = rng.gen_range(1..=4);
    let v: Vec<i64> = (0..k).map(|_| rng.gen_range(-40..=40)).collect();
    format!("fin({})", fmt_set(&v))
}

fn random_blocks<R: Rng>(rng: &mut R) -> String {
    let s = rng.gen_range(1..=3);
    let b = rng.gen_range(2..=MAX_RANDOM_BASE);
    let len = if rng.gen_bool(0.5) { "linear".to_string() } else { format!("const({})", rng.gen_range(0..=2)) };
    let t = rng.gen_range(-5..=5);
    let tail = match rng.gen_range(0..4) {
        0 => ", mirror",
        1 => ", side=neg",
        _ => "",
    };
    format!("blocks(s={s}, b={b}, len={len}, t={t}{tail})")
}

fn random_component<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..5) {
        0 | 1 => random_up(rng),
        2 => random_fin(rng),
        _ => random_blocks(rng),
    }
}

/// One random expression; the shape is drawn first, then its parameters.
pub fn random_expr<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..9) {
        0 => random_component(rng),
        1 | 2 => {
            let k = rng.gen_range(2..=3);
            let parts: Vec<String> = (0..k).map(|_| random_component(rng)).collect();
            format!("union({})", parts.join(", "))
        }
        3 => format!("complement({})", random_blocks(rng)),
        4 => format!("union({}, complement({}))", random_up(rng), random_blocks(rng)),
        5 => format!("translate({}, g={})", random_component(rng), rng.gen_range(-20..=20)),
        6 => {
            let mut f: Vec<i64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(-4..=4)).collect();
            f.sort_unstable();
            f.dedup();
            format!("minkowski(f={}, {})", fmt_set(&f), random_component(rng))
        }
        7 => format!("intersection({}, complement({}))", random_up(rng), random_blocks(rng)),
        _ => {
            let parts = [random_blocks(rng), random_up(rng)];
            let mut parts = parts.to_vec();
            parts.shuffle(rng);
            format!("union({})", parts.join(", "))
        }
    }
}

/// `count` random entries determined by `seed`.
pub fn random(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| CorpusEntry { name: format!("random-{seed}-{i}"), expr: random_expr(&mut rng), category: Category::Random })
        .collect()
}

/// Curated entries followed by the random ones.
pub fn corpus(seed: u64, random_count: usize) -> Vec<CorpusEntry> {
    let mut v = curated();
    v.extend(random(seed, random_count));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for e in corpus(DEFAULT_SEED, DEFAULT_RANDOM_COUNT) {
            e.set().unwrap_or_else(|err| panic!("{}: {} -> {err}", e.name, e.expr));
        }
        assert!(curated().len() >= 30);
    }

    #[test]
    fn random_corpus_is_deterministic() {
        let a: Vec<String> = random(5, 50).into_iter().map(|e| e.expr).collect();
        let b: Vec<String> = random(5, 50).into_iter().map(|e| e.expr).collect();
        assert_eq!(a, b);
        let c: Vec<String> = random(6, 50).into_iter().map(|e| e.expr).collect();
        assert_ne!(a, c);
    }
}
