//! The decomposition bounds `φ(n)` and `2^(2^(n-1) - 1)`, in exact arithmetic.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`phi`].
pub const MAX_PHI_N: u32 = 4096;

/// Largest `n` accepted by [`double_exp_bound`]; the value has `2^(n-1)` bits.
pub const MAX_DOUBLE_EXP_N: u32 = 24;

fn check_n(n: u32, max: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!("n must be at least 2, got {n}")));
    }
    if n > max {
        return Err(Error::Precondition(format!("n = {n} exceeds the cap {max}")));
    }
    Ok(())
}

/// `(x^(n+1-x) - 1) / (x - 1)` for an integer `x` in `2..=n`.
pub fn phi_term(n: u32, x: u32) -> BigUint {
    let num = BigUint::from(x).pow(n + 1 - x) - BigUint::one();
    num / BigUint::from(x - 1)
}

/// The maximizing `x` (smallest on ties) and `φ(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiValue {
    pub n: u32,
    pub argmax: u32,
    #[serde(serialize_with = "crate::theorems::bounds::ser_big")]
    pub value: BigUint,
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `φ(n) = max over integers 1 < x <= n of (x^(n+1-x) - 1) / (x - 1)`.
pub fn phi_with_argmax(n: u32) -> Result<PhiValue> {
    check_n(n, MAX_PHI_N)?;
    let (argmax, value) = (2..=n)
        .map(|x| (x, phi_term(n, x)))
        .fold(None, |best: Option<(u32, BigUint)>, (x, v)| match best {
            Some((bx, bv)) if bv >= v => Some((bx, bv)),
            _ => Some((x, v)),
        })
        .expect("n >= 2 gives at least one term");
    Ok(PhiValue { n, argmax, value })
}

pub fn phi(n: u32) -> Result<BigUint> {
    Ok(phi_with_argmax(n)?.value)
}

/// The same maximum taken over real `x` in `(1, n]`, as a float for comparison.
/// Near `x = 1` the expression tends to `n`, so the supremum is at least `n`.
pub fn phi_real(n: u32) -> Result<f64> {
    check_n(n, 1000)?;
    let nf = f64::from(n);
    let f = |x: f64| {
        if x - 1.0 < 1e-9 {
            nf
        } else {
            (x.powf(nf + 1.0 - x) - 1.0) / (x - 1.0)
        }
    };
    let steps = 20_000;
    let h = (nf - 1.0) / f64::from(steps);
    let mut best = (nf, 1.0);
    for k in 1..=steps {
        let x = 1.0 + h * f64::from(k);
        let v = f(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let (mut lo, mut hi) = ((best.1 - h).max(1.0), (best.1 + h).min(nf));
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    Ok(best.0.max(f((lo + hi) / 2.0)))
}

/// `2^(2^(n-1) - 1)`.
pub fn double_exp_bound(n: u32) -> Result<BigUint> {
    check_n(n, MAX_DOUBLE_EXP_N)?;
    Ok(BigUint::one() << ((1u64 << (n - 1)) - 1))
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation with machine integers, independent of the big-integer path.
    fn phi_u128(n: u32) -> u128 {
        (2..=n).map(|x| ((x as u128).pow(n + 1 - x) - 1) / (x as u128 - 1)).max().unwrap()
    }

    #[test]
    fn phi_values() {
        let got: Vec<String> = (2..=6).map(|n| phi(n).unwrap().to_string()).collect();
        assert_eq!(got, ["1", "3", "7", "15", "40"]);
        for n in 2..=30 {
            assert_eq!(phi(n).unwrap(), BigUint::from(phi_u128(n)), "n = {n}");
        }
        assert_eq!(phi_with_argmax(6).unwrap().argmax, 3);
        assert!(phi(1).is_err());
    }

    #[test]
    fn phi_below_factorial_and_above_floor() {
        for n in 4..=12 {
            assert!(phi(n).unwrap() < factorial(n), "n = {n}");
        }
        for n in 2..=40 {
            let floor = (BigUint::one() << (n - 1)) - BigUint::one();
            assert!(phi(n).unwrap() >= floor);
        }
    }

    #[test]
    fn double_exp_values() {
        let got: Vec<String> = (2..=4).map(|n| double_exp_bound(n).unwrap().to_string()).collect();
        assert_eq!(got, ["2", "8", "128"]);
        assert!(double_exp_bound(MAX_DOUBLE_EXP_N + 1).is_err());
    }

    #[test]
    fn real_maximum_dominates_integer_maximum() {
        assert!((phi_real(2).unwrap() - 2.0).abs() < 1e-6);
        for n in 2..=12 {
            let int = phi_u128(n) as f64;
            assert!(phi_real(n).unwrap() >= int - 1e-6, "n = {n}");
        }
    }
}
