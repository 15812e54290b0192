//! Partitions of Z into residue-class unions, and the smallest `F` with `F + Δ(A_i) = Z`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::cover::min_translate_cover;
use crate::derivation::{delta_symbolic, difference_set_up};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::num::Int;
use crate::symbolic::{Direction, SymbolicSet};
use crate::theorems::bounds::{double_exp_bound, phi};

pub const MAX_PARTITION_MODULUS: u64 = 16;
pub const MAX_PARTS: usize = 6;

/// `Z = A_1 ∪ ... ∪ A_n`, where residue `r` mod `p` goes to part `assignment[r]`,
/// except that each `(x, j)` in `perturbations` moves the single point `x` to part `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionSpec {
    pub p: u64,
    pub n: usize,
    pub assignment: Vec<usize>,
    pub perturbations: Vec<(Int, usize)>,
}

impl PartitionSpec {
    pub fn new(p: u64, n: usize, assignment: Vec<usize>) -> Result<PartitionSpec> {
        let s = PartitionSpec { p, n, assignment, perturbations: Vec::new() };
        s.validate()?;
        Ok(s)
    }

    /// Parts as residue lists separated by `|`, for example `0,1|2,3` with `p = 4`.
    pub fn parse_parts(p: u64, text: &str) -> Result<PartitionSpec> {
        let mut assignment = vec![usize::MAX; p as usize];
        let groups: Vec<&str> = text.split('|').collect();
        for (i, g) in groups.iter().enumerate() {
            for tok in g.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let r: u64 = tok.parse().map_err(|_| Error::Parse(format!("bad residue '{tok}' in part {}", i + 1)))?;
                if r >= p {
                    return Err(Error::InvalidSet(format!("residue {r} is not below p = {p}")));
                }
                if assignment[r as usize] != usize::MAX {
                    return Err(Error::InvalidSet(format!("residue {r} appears in two parts")));
                }
                assignment[r as usize] = i;
            }
        }
        if let Some(r) = assignment.iter().position(|&x| x == usize::MAX) {
            return Err(Error::InvalidSet(format!("residue {r} is in no part")));
        }
        PartitionSpec::new(p, groups.len(), assignment)
    }

    pub fn with_perturbations(mut self, moves: Vec<(Int, usize)>) -> Result<PartitionSpec> {
        self.perturbations = moves;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p > MAX_PARTITION_MODULUS {
            return Err(Error::Precondition(format!("p = {} outside 1..={MAX_PARTITION_MODULUS}", self.p)));
        }
        if self.n < 2 || self.n > MAX_PARTS {
            return Err(Error::Precondition(format!("n = {} outside 2..={MAX_PARTS}", self.n)));
        }
        if self.assignment.len() != self.p as usize {
            return Err(Error::InvalidSet(format!("assignment has {} entries for p = {}", self.assignment.len(), self.p)));
        }
        if let Some(&j) = self.assignment.iter().chain(self.perturbations.iter().map(|(_, j)| j)).find(|&&j| j >= self.n) {
            return Err(Error::InvalidSet(format!("part index {j} is not below n = {}", self.n)));
        }
        if let Some(i) = (0..self.n).find(|i| !self.assignment.contains(i)) {
            return Err(Error::InvalidSet(format!("part {i} has no residue class")));
        }
        Ok(())
    }

    pub fn residues(&self, part: usize) -> Vec<u64> {
        (0..self.p).filter(|&r| self.assignment[r as usize] == part).collect()
    }

    /// Part `i` as a set, perturbations included.
    pub fn part(&self, i: usize) -> SymbolicSet {
        let classes: Vec<SymbolicSet> =
            self.residues(i).into_iter().map(|r| SymbolicSet::progression(self.p, r).expect("validated")).collect();
        let mut s = SymbolicSet::union_all(&classes);
        for &(x, j) in &self.perturbations {
            let point = SymbolicSet::finite([x]);
            s = if j == i { s.union(&point) } else { s.difference(&point) };
        }
        s
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.n)
            .map(|i| self.residues(i).iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "p={} parts={}", self.p, parts.join("|"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartRow {
    pub part: usize,
    pub residues: Vec<u64>,
    /// Residues of `Δ_I(A_i)`, that is `R_i - R_i` mod `p`.
    pub delta_residues: Vec<u64>,
    pub cover: Vec<u64>,
    pub cover_size: usize,
    /// Minimum cover size of `A_i - A_i`.
    pub aa_inv_cover_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub spec: String,
    pub p: u64,
    pub n: usize,
    pub ideal: Ideal,
    pub parts: Vec<PartRow>,
    pub best_part: usize,
    pub min_cover: usize,
    pub phi_n: String,
    pub double_exp: String,
    pub leq_phi: bool,
    pub leq_double_exp: bool,
    /// The open question: can `|F| <= n` always be achieved.
    pub leq_n: bool,
    /// Runs with at least three parts, where the `φ(n)` bound is asserted.
    pub admissible: bool,
}

impl PartitionReport {
    pub const CSV_HEADER: &'static str = "p,n,part,cover_size,phi_n,double_exp,leq_n";

    pub fn csv_rows(&self) -> Vec<String> {
        self.parts
            .iter()
            .map(|row| {
                format!(
                    "{},{},{},{},{},{},{}",
                    self.p,
                    self.n,
                    row.part + 1,
                    row.cover_size,
                    self.phi_n,
                    self.double_exp,
                    row.cover_size <= self.n
                )
            })
            .collect()
    }
}

fn residue_diffs(rs: &[u64], p: u64) -> Vec<u64> {
    let mut d: Vec<u64> = rs.iter().flat_map(|&a| rs.iter().map(move |&b| (a + p - b) % p)).collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// Minimum covers for `Δ_I` of every part, and how the best compares with the bounds.
pub fn partition_experiment(spec: &PartitionSpec, ideal: Ideal) -> Result<PartitionReport> {
    spec.validate()?;
    if ideal == Ideal::Trivial && !spec.perturbations.is_empty() {
        return Err(Error::Precondition("perturbed partitions need the finite-set ideal".into()));
    }
    let p = spec.p;
    let mut parts = Vec::new();
    for i in 0..spec.n {
        let residues = spec.residues(i);
        let delta_residues = residue_diffs(&residues, p);
        let expected = SymbolicSet::union_all(
            &delta_residues.iter().map(|&r| SymbolicSet::progression(p, r).expect("valid")).collect::<Vec<_>>(),
        );
        let d = delta_symbolic(&spec.part(i), ideal)?;
        if !d.exact || d.set != expected {
            return Err(Error::Verification(format!("Δ of part {} is {} rather than {expected}", i + 1, d.set)));
        }
        let cover = min_translate_cover(&delta_residues, p)?;
        let unperturbed = SymbolicSet::union_all(
            &residues.iter().map(|&r| SymbolicSet::progression(p, r).expect("valid")).collect::<Vec<_>>(),
        );
        let aa = difference_set_up(&unperturbed)?;
        let aa_cover = min_translate_cover(&aa.base().residues(Direction::Pos), aa.base().period())?;
        parts.push(PartRow {
            part: i,
            residues,
            delta_residues,
            cover_size: cover.len(),
            cover,
            aa_inv_cover_size: aa_cover.len(),
        });
    }
    let (best_part, min_cover) =
        parts.iter().map(|r| (r.part, r.cover_size)).min_by_key(|&(i, c)| (c, i)).expect("n >= 2 parts");
    let phi_n = phi(spec.n as u32)?;
    let de = double_exp_bound(spec.n as u32)?;
    Ok(PartitionReport {
        spec: spec.to_string(),
        p,
        n: spec.n,
        ideal,
        leq_phi: phi_n >= min_cover.into(),
        leq_double_exp: de >= min_cover.into(),
        leq_n: min_cover <= spec.n,
        admissible: spec.n >= 3,
        phi_n: phi_n.to_string(),
        double_exp: de.to_string(),
        parts,
        best_part,
        min_cover,
    })
}

/// A uniformly assigned partition with every part nonempty, `n <= p <= p_max`.
pub fn random_partition<R: Rng>(rng: &mut R, p_max: u64, n: usize) -> Result<PartitionSpec> {
    if (n as u64) > p_max {
        return Err(Error::Precondition(format!("{n} parts need p >= {n}, but p_max = {p_max}")));
    }
    let p = rng.gen_range(n as u64..=p_max);
    let mut residues: Vec<usize> = (0..p as usize).collect();
    residues.shuffle(rng);
    let mut assignment = vec![0; p as usize];
    for (k, &r) in residues.iter().enumerate() {
        assignment[r] = if k < n { k } else { rng.gen_range(0..n) };
    }
    PartitionSpec::new(p, n, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let s = PartitionSpec::parse_parts(3, "0|1,2").unwrap();
        let r = partition_experiment(&s, Ideal::Fin).unwrap();
        assert_eq!((r.parts[0].cover_size, r.parts[1].cover_size), (3, 1));
        assert_eq!((r.best_part, r.min_cover), (1, 1));
        assert!(r.leq_n);

        let s = PartitionSpec::parse_parts(4, "0,1|2,3").unwrap();
        let r = partition_experiment(&s, Ideal::Fin).unwrap();
        assert_eq!(r.parts[0].delta_residues, vec![0, 1, 3]);
        assert_eq!(r.min_cover, 2);
    }

    #[test]
    fn two_classes_exceed_integer_phi() {
        let s = PartitionSpec::parse_parts(2, "0|1").unwrap();
        let r = partition_experiment(&s, Ideal::Fin).unwrap();
        assert_eq!(r.min_cover, 2);
        assert!(!r.leq_phi && !r.admissible);
    }

    #[test]
    fn perturbations_keep_delta_under_fin() {
        let s = PartitionSpec::parse_parts(4, "0,1|2,3").unwrap().with_perturbations(vec![(5, 1), (-8, 1)]).unwrap();
        let r = partition_experiment(&s, Ideal::Fin).unwrap();
        assert_eq!(r.min_cover, 2);
        assert!(partition_experiment(&s, Ideal::Trivial).is_err());
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(PartitionSpec::parse_parts(4, "0,1|2").is_err());
        assert!(PartitionSpec::parse_parts(4, "0,1|1,2,3").is_err());
        assert!(PartitionSpec::parse_parts(17, "0|1").is_err());
        assert!(PartitionSpec::parse_parts(3, "0,1,2").is_err());
    }

    #[test]
    fn random_partitions_respect_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..40 {
            let n = 3 + k % 3;
            let s = random_partition(&mut rng, 12, n).unwrap();
            let r = partition_experiment(&s, Ideal::Fin).unwrap();
            assert!(r.leq_phi, "{}", r.spec);
            for row in &r.parts {
                assert_eq!(row.cover_size, row.aa_inv_cover_size);
            }
        }
    }
}
