//! Small finite groups given by full multiplication tables, and subsets of them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest order accepted by [`FiniteGroup::from_table`].
pub const MAX_ORDER: usize = 12;

/// Default cap for [`enumerate_subsets`].
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// A finite group with a validated Cayley table. Elements are indices `0..order`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Builds a group from its table (`mul[g][h] = g*h`) and checks the group axioms.
    pub fn from_table(name: &str, mul: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = mul.len();
        let bad = |m: String| Error::InvalidGroup(format!("{name}: {m}"));
        if n == 0 || n > MAX_ORDER {
            return Err(bad(format!("order {n} outside 1..={MAX_ORDER}")));
        }
        for (g, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("row {g} has {} entries, expected {n}", row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(bad(format!("row {g} is not a permutation")));
                }
            }
        }
        for h in 0..n {
            let mut seen = vec![false; n];
            for row in &mul {
                if std::mem::replace(&mut seen[row[h]], true) {
                    return Err(bad(format!("column {h} is not a permutation")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or_else(|| bad("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(bad(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let inv = (0..n).map(|g| (0..n).find(|&h| mul[g][h] == identity).expect("latin rows")).collect();
        Ok(FiniteGroup { name: name.to_string(), mul, inv, identity })
    }

    /// Parses `order n` followed by `n` rows of `n` space-separated indices.
    pub fn parse_table(name: &str, text: &str) -> Result<FiniteGroup> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty group table".into()))?;
        let n: usize = header
            .strip_prefix("order")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected `order n`, found `{header}`")))?;
        let mut mul = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let row: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            mul.push(row.map_err(|e| Error::Parse(format!("row {i}: {e}")))?);
        }
        if mul.len() != n {
            return Err(Error::Parse(format!("expected {n} rows, found {}", mul.len())));
        }
        FiniteGroup::from_table(name, mul)
    }

    /// Renders the table in the format read by [`FiniteGroup::parse_table`].
    pub fn to_table(&self) -> String {
        let mut s = format!("order {}\n", self.order());
        for row in &self.mul {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        s
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(&format!("Z{n}"), mul)
    }

    /// Group of permutations closed under composition, generated from `gens`.
    fn permutation_group(name: &str, gens: &[Vec<usize>]) -> Result<FiniteGroup> {
        let k = gens[0].len();
        let id: Vec<usize> = (0..k).collect();
        let mut elems = vec![id];
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                // (x then g) written as composition g ∘ x
                let prod: Vec<usize> = (0..k).map(|p| g[elems[i][p]]).collect();
                if !elems.contains(&prod) {
                    elems.push(prod);
                }
            }
            i += 1;
        }
        let index = |p: &Vec<usize>| elems.iter().position(|q| q == p).expect("closed");
        let mul = elems
            .iter()
            .map(|a| elems.iter().map(|b| index(&(0..k).map(|p| a[b[p]]).collect())).collect())
            .collect();
        FiniteGroup::from_table(name, mul)
    }

    /// Symmetric group on three letters; element 0 is the identity.
    pub fn s3() -> FiniteGroup {
        Self::permutation_group("S3", &[vec![1, 0, 2], vec![1, 2, 0]]).expect("valid S3")
    }

    /// Dihedral group of order 8 (symmetries of a square); element 0 is the identity.
    pub fn d4() -> FiniteGroup {
        Self::permutation_group("D4", &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]).expect("valid D4")
    }

    /// `Z1..Z8`, `S3`, `D4`.
    pub fn shipped() -> Vec<FiniteGroup> {
        let mut v: Vec<FiniteGroup> = (1..=8).map(|n| Self::cyclic(n).expect("cyclic")).collect();
        v.push(Self::s3());
        v.push(Self::d4());
        v
    }

    /// Looks up a shipped group by name (`Z1`..`Z8`, `S3`, `D4`).
    pub fn by_name(name: &str) -> Result<FiniteGroup> {
        Self::shipped()
            .into_iter()
            .find(|g| g.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidGroup(format!("unknown group `{name}`")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn order(&self) -> usize {
        self.mul.len()
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }
}

/// A subset of a finite group, stored as a bitmask over element indices.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSubset {
    ctx: Arc<FiniteGroup>,
    bits: u64,
}

impl fmt::Debug for FiniteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.ctx.name, self.elements())
    }
}

impl FiniteSubset {
    pub fn new<I: IntoIterator<Item = usize>>(ctx: &Arc<FiniteGroup>, elems: I) -> Result<FiniteSubset> {
        let mut bits = 0u64;
        for e in elems {
            if e >= ctx.order() {
                return Err(Error::InvalidSet(format!("element {e} not in {}", ctx.name)));
            }
            bits |= 1 << e;
        }
        Ok(FiniteSubset { ctx: ctx.clone(), bits })
    }

    pub fn from_bits(ctx: &Arc<FiniteGroup>, bits: u64) -> FiniteSubset {
        let mask = if ctx.order() == 64 { u64::MAX } else { (1u64 << ctx.order()) - 1 };
        FiniteSubset { ctx: ctx.clone(), bits: bits & mask }
    }

    pub fn empty(ctx: &Arc<FiniteGroup>) -> FiniteSubset {
        FiniteSubset { ctx: ctx.clone(), bits: 0 }
    }

    pub fn full(ctx: &Arc<FiniteGroup>) -> FiniteSubset {
        Self::from_bits(ctx, u64::MAX)
    }

    pub fn context(&self) -> &Arc<FiniteGroup> {
        &self.ctx
    }
    pub fn bits(&self) -> u64 {
        self.bits
    }
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }
    pub fn is_full(&self) -> bool {
        self.len() == self.ctx.order()
    }
    pub fn contains(&self, g: usize) -> bool {
        g < 64 && self.bits >> g & 1 == 1
    }
    pub fn elements(&self) -> Vec<usize> {
        (0..self.ctx.order()).filter(|&g| self.contains(g)).collect()
    }

    fn check(&self, other: &FiniteSubset) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.ctx.name.clone(), other.ctx.name.clone()))
        }
    }

    pub fn union(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        Ok(FiniteSubset { ctx: self.ctx.clone(), bits: self.bits | other.bits })
    }
    pub fn intersection(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        Ok(FiniteSubset { ctx: self.ctx.clone(), bits: self.bits & other.bits })
    }
    pub fn difference(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        Ok(FiniteSubset { ctx: self.ctx.clone(), bits: self.bits & !other.bits })
    }
    pub fn is_subset(&self, other: &FiniteSubset) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// `gA = {g*a}`.
    pub fn left_translate(&self, g: usize) -> FiniteSubset {
        let mut bits = 0u64;
        for a in self.elements() {
            bits |= 1 << self.ctx.mul(g, a);
        }
        FiniteSubset { ctx: self.ctx.clone(), bits }
    }

    /// `{a^-1 : a in A}`.
    pub fn inverse(&self) -> FiniteSubset {
        let mut bits = 0u64;
        for a in self.elements() {
            bits |= 1 << self.ctx.inv(a);
        }
        FiniteSubset { ctx: self.ctx.clone(), bits }
    }
}

/// `FA = {f*a : f in F, a in A}`.
pub fn left_product_set(f: &FiniteSubset, a: &FiniteSubset) -> Result<FiniteSubset> {
    f.check(a)?;
    let mut bits = 0u64;
    for x in f.elements() {
        bits |= a.left_translate(x).bits;
    }
    Ok(FiniteSubset { ctx: f.ctx.clone(), bits })
}

/// `AA^-1 = {a*b^-1 : a, b in A}`.
pub fn difference_set(a: &FiniteSubset) -> FiniteSubset {
    left_product_set(a, &a.inverse()).expect("same context")
}

/// Every subset of the group exactly once, in bitmask order.
pub fn enumerate_subsets(ctx: &Arc<FiniteGroup>, cap: usize) -> Result<impl Iterator<Item = FiniteSubset>> {
    let order = ctx.order();
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    let ctx = ctx.clone();
    Ok((0..1u64 << order).map(move |bits| FiniteSubset { ctx: ctx.clone(), bits }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    #[test]
    fn product_set_examples() {
        let z6 = arc(FiniteGroup::cyclic(6).unwrap());
        let f = FiniteSubset::new(&z6, [0, 1, 2]).unwrap();
        let a = FiniteSubset::new(&z6, [0, 3]).unwrap();
        assert!(left_product_set(&f, &a).unwrap().is_full());
        let e = FiniteSubset::new(&z6, [0]).unwrap();
        assert_eq!(left_product_set(&e, &a).unwrap(), a);
        assert!(left_product_set(&FiniteSubset::empty(&z6), &a).unwrap().is_empty());
        assert_eq!(difference_set(&a), a);
    }

    #[test]
    fn s3_transposition_difference_set() {
        let s3 = arc(FiniteGroup::s3());
        assert_eq!(s3.identity(), 0);
        assert!(!s3.is_abelian());
        let t = (1..6).find(|&g| s3.mul(g, g) == 0).unwrap();
        let a = FiniteSubset::new(&s3, [0, t]).unwrap();
        assert_eq!(difference_set(&a), a);
    }

    #[test]
    fn shipped_groups_are_valid() {
        let gs = FiniteGroup::shipped();
        assert_eq!(gs.len(), 10);
        let d4 = FiniteGroup::by_name("D4").unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        let again = FiniteGroup::parse_table("D4", &d4.to_table()).unwrap();
        assert_eq!(again, d4);
    }

    #[test]
    fn enumeration_counts_and_cap() {
        assert_eq!(enumerate_subsets(&arc(FiniteGroup::cyclic(2).unwrap()), 8).unwrap().count(), 4);
        assert_eq!(enumerate_subsets(&arc(FiniteGroup::cyclic(6).unwrap()), 8).unwrap().count(), 64);
        assert_eq!(enumerate_subsets(&arc(FiniteGroup::d4()), 8).unwrap().count(), 256);
        assert!(matches!(
            enumerate_subsets(&arc(FiniteGroup::d4()), 6),
            Err(Error::CapExceeded { order: 8, cap: 6 })
        ));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(FiniteGroup::parse_table("x", "order 2\n0 1\n0 1\n").is_err());
        assert!(FiniteGroup::parse_table("x", "order 3\n0 1 2\n1 2 0\n").is_err());
        assert!(FiniteGroup::parse_table("x", "rank 2\n0 1\n1 0\n").is_err());
        // latin square without associativity
        let t = "order 5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
        assert!(matches!(FiniteGroup::parse_table("x", t), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = FiniteSubset::new(&arc(FiniteGroup::cyclic(3).unwrap()), [0]).unwrap();
        let b = FiniteSubset::new(&arc(FiniteGroup::cyclic(4).unwrap()), [0]).unwrap();
        assert!(matches!(left_product_set(&a, &b), Err(Error::ContextMismatch(_, _))));
    }

    #[test]
    fn laws_over_all_subsets() {
        for g in FiniteGroup::shipped() {
            let ctx = arc(g);
            let e = FiniteSubset::new(&ctx, [ctx.identity()]).unwrap();
            for a in enumerate_subsets(&ctx, 8).unwrap() {
                assert_eq!(left_product_set(&e, &a).unwrap(), a);
                let d = difference_set(&a);
                assert_eq!(d.inverse(), d);
                if !a.is_empty() {
                    assert!(d.contains(ctx.identity()));
                }
            }
        }
    }
}
