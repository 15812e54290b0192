//! Translation-invariant ideals: the trivial ideal `{∅}` and the finite sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteSubset;
use crate::symbolic::SymbolicSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ideal {
    /// Only the empty set.
    Trivial,
    /// All finite sets.
    Fin,
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ideal::Trivial => "trivial",
            Ideal::Fin => "fin",
        })
    }
}

impl FromStr for Ideal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Ideal> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" => Ok(Ideal::Trivial),
            "fin" => Ok(Ideal::Fin),
            _ => Err(Error::Parse(format!("unknown ideal `{s}` (expected trivial or fin)"))),
        }
    }
}

/// A membership verdict together with whether it was decided structurally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: bool,
    pub exact: bool,
}

/// Window used to judge membership of sets outside the exact fragment.
pub const MEMBERSHIP_WINDOW: i128 = 1 << 16;

impl Ideal {
    /// Membership of a symbolic set in the ideal.
    ///
    /// Exact sets are decided from their structure. Sets with opaque parts are
    /// judged on `[-MEMBERSHIP_WINDOW, MEMBERSHIP_WINDOW]` plus the structural
    /// part, and reported with `exact = false`.
    pub fn contains(&self, a: &SymbolicSet) -> Verdict {
        if a.is_exact() {
            let value = match self {
                Ideal::Trivial => a.is_empty_exact(),
                Ideal::Fin => a.is_finite_exact(),
            };
            return Verdict { value, exact: true };
        }
        let w = MEMBERSHIP_WINDOW;
        let count = a.materialize(-w, w).count();
        let value = match self {
            Ideal::Trivial => count == 0,
            // members near the window edge suggest an infinite set
            Ideal::Fin => {
                let inner = a.materialize(-w / 2, w / 2).count();
                count == inner
            }
        };
        Verdict { value, exact: false }
    }

    /// Like [`Ideal::contains`], failing instead of guessing when `strict`.
    pub fn contains_strict(&self, a: &SymbolicSet, strict: bool) -> Result<bool> {
        let v = self.contains(a);
        if strict && !v.exact {
            return Err(Error::UnsupportedExact(format!("ideal membership of {a}")));
        }
        Ok(v.value)
    }

    /// `A =_I B`, that is, the symmetric difference lies in the ideal.
    pub fn i_equal(&self, a: &SymbolicSet, b: &SymbolicSet) -> Verdict {
        self.contains(&a.symmetric_difference(b))
    }

    pub fn i_equal_strict(&self, a: &SymbolicSet, b: &SymbolicSet, strict: bool) -> Result<bool> {
        self.contains_strict(&a.symmetric_difference(b), strict)
    }

    /// Membership for subsets of a finite group; only the trivial ideal is proper there.
    pub fn contains_finite(&self, a: &FiniteSubset) -> Result<bool> {
        self.require_proper_on_finite()?;
        Ok(a.is_empty())
    }

    pub fn i_equal_finite(&self, a: &FiniteSubset, b: &FiniteSubset) -> Result<bool> {
        self.require_proper_on_finite()?;
        Ok(a.bits() == b.bits() && a.context() == b.context())
    }

    pub fn require_proper_on_finite(&self) -> Result<()> {
        match self {
            Ideal::Trivial => Ok(()),
            Ideal::Fin => Err(Error::ImproperIdeal("the finite-set ideal contains every subset of a finite group".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use std::sync::Arc;

    #[test]
    fn membership_examples() {
        assert!(Ideal::Fin.contains(&SymbolicSet::finite([1, 2, 3])).value);
        assert!(!Ideal::Fin.contains(&SymbolicSet::progression(2, 0).unwrap()).value);
        assert!(Ideal::Trivial.contains(&SymbolicSet::empty()).value);
        assert!(!Ideal::Trivial.contains(&SymbolicSet::finite([0])).value);
    }

    #[test]
    fn equality_examples() {
        let z = SymbolicSet::integers();
        let punctured = z.difference(&SymbolicSet::finite([0]));
        assert!(Ideal::Fin.i_equal(&z, &punctured).value);
        assert!(!Ideal::Trivial.i_equal(&z, &punctured).value);
        assert!(!Ideal::Fin.i_equal(&SymbolicSet::progression(2, 0).unwrap(), &z).value);
        let a = SymbolicSet::progression(5, 2).unwrap();
        assert!(Ideal::Trivial.i_equal(&a, &a).value);
    }

    #[test]
    fn fin_is_improper_on_finite_groups() {
        let ctx = Arc::new(FiniteGroup::cyclic(4).unwrap());
        let a = FiniteSubset::new(&ctx, [1]).unwrap();
        assert!(matches!(Ideal::Fin.contains_finite(&a), Err(Error::ImproperIdeal(_))));
        assert!(!Ideal::Trivial.contains_finite(&a).unwrap());
    }

    #[test]
    fn parse_names() {
        assert_eq!("fin".parse::<Ideal>().unwrap(), Ideal::Fin);
        assert_eq!("Trivial".parse::<Ideal>().unwrap(), Ideal::Trivial);
        assert!("dense".parse::<Ideal>().is_err());
    }
}
