//! Small integer helpers shared by the set algebra.

/// Integer coordinate on Z.
pub type Int = i128;

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Least non-negative residue of `x` modulo `p`.
#[inline]
pub fn residue(x: Int, p: u64) -> usize {
    x.rem_euclid(p as Int) as usize
}

/// Least non-negative residue of a big integer modulo `p`.
pub fn big_residue(x: &num_bigint::BigInt, p: u64) -> usize {
    use num_traits::{Signed, ToPrimitive};
    let m = num_bigint::BigInt::from(p);
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u64().unwrap_or(0) as usize
}

/// Values of `s * b^n mod p` that occur for infinitely many `n >= start`.
///
/// The sequence is eventually periodic with pre-period plus period at most `p`,
/// so one pass until the first repeated value finds the cycle.
pub fn power_cycle(s: u64, b: u64, start: u32, p: u64) -> Vec<usize> {
    if p == 1 {
        return vec![0];
    }
    let p128 = p as u128;
    let mut v = (s as u128) % p128;
    let bb = (b as u128) % p128;
    for _ in 0..start {
        v = v * bb % p128;
    }
    let mut seen = vec![usize::MAX; p as usize];
    let mut seq = Vec::new();
    loop {
        let r = v as usize;
        if seen[r] != usize::MAX {
            let mut cyc: Vec<usize> = seq[seen[r]..].to_vec();
            cyc.sort_unstable();
            cyc.dedup();
            return cyc;
        }
        seen[r] = seq.len();
        seq.push(r);
        v = v * bb % p128;
    }
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_of_powers_of_two_mod_three() {
        // 2^n mod 3 alternates 1, 2.
        assert_eq!(power_cycle(1, 2, 0, 3), vec![1, 2]);
        // 2^n mod 4 is 0 from n = 2 on.
        assert_eq!(power_cycle(1, 2, 0, 4), vec![0]);
        assert_eq!(power_cycle(3, 10, 0, 7).len(), 6);
    }

    #[test]
    fn lcm_and_divisors() {
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(residue(-1, 3), 2);
    }
}
