//! Translate covers of cyclic groups: `F + D = Z_p`.

use crate::error::{Error, Result};

/// Largest modulus accepted by [`min_translate_cover`].
pub const MAX_COVER_MODULUS: u64 = 24;

fn mask_of(d: &[u64], p: u64) -> u32 {
    d.iter().fold(0u32, |m, &x| m | 1 << (x % p))
}

fn rotate(mask: u32, f: u64, p: u64) -> u32 {
    let full = if p == 32 { u32::MAX } else { (1u32 << p) - 1 };
    let f = f % p;
    if f == 0 {
        mask
    } else {
        ((mask << f) | (mask >> (p - f))) & full
    }
}

/// Smallest `F ⊆ Z_p` with `F + D = Z_p`, lexicographically least among the
/// minimum-size covers.
pub fn min_translate_cover(d: &[u64], p: u64) -> Result<Vec<u64>> {
    if p == 0 || p > MAX_COVER_MODULUS {
        return Err(Error::Precondition(format!("modulus {p} outside 1..={MAX_COVER_MODULUS}")));
    }
    let dm = mask_of(d, p);
    if dm == 0 {
        return Err(Error::Precondition("cover of an empty residue set".into()));
    }
    let full = (1u32 << p) - 1;
    let shifts: Vec<u32> = (0..p).map(|f| rotate(dm, f, p)).collect();
    let dsize = dm.count_ones() as u64;
    let mut k = p.div_ceil(dsize);
    loop {
        let mut chosen = Vec::new();
        if search(&shifts, full, p, k as usize, 0, 0, &mut chosen) {
            return Ok(chosen);
        }
        k += 1;
    }
}

fn search(shifts: &[u32], full: u32, p: u64, k: usize, covered: u32, next: u64, chosen: &mut Vec<u64>) -> bool {
    if covered == full {
        return true;
    }
    if chosen.len() == k {
        return false;
    }
    let per = shifts[0].count_ones();
    let missing = (full & !covered).count_ones();
    if missing > (k - chosen.len()) as u32 * per {
        return false;
    }
    let u = (full & !covered).trailing_zeros() as u64;
    for f in next..p {
        // some later element has to cover u; skip f when none can
        if !(f..p).any(|h| shifts[h as usize] >> u & 1 == 1) {
            return false;
        }
        chosen.push(f);
        if search(shifts, full, p, k, covered | shifts[f as usize], f + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Some cover of `Z_p` by translates of `D`, not necessarily minimum; works for any `p`.
pub fn greedy_translate_cover(d: &[u64], p: u64) -> Result<Vec<u64>> {
    if p == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let dset: Vec<u64> = d.iter().map(|x| x % p).collect();
    if dset.is_empty() {
        return Err(Error::Precondition("cover of an empty residue set".into()));
    }
    if p <= MAX_COVER_MODULUS {
        return min_translate_cover(&dset, p);
    }
    let mut covered = vec![false; p as usize];
    let mut left = p as usize;
    let mut f = Vec::new();
    while left > 0 {
        let best = (0..p)
            .max_by_key(|&t| (dset.iter().filter(|&&x| !covered[((x + t) % p) as usize]).count(), std::cmp::Reverse(t)))
            .expect("p > 0");
        for &x in &dset {
            let r = ((x + best) % p) as usize;
            if !covered[r] {
                covered[r] = true;
                left -= 1;
            }
        }
        f.push(best);
    }
    f.sort_unstable();
    Ok(f)
}

/// `F + D` covers `Z_p`.
pub fn is_cover(f: &[u64], d: &[u64], p: u64) -> bool {
    let mut seen = vec![false; p as usize];
    for &a in f {
        for &x in d {
            seen[((a + x) % p) as usize] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(min_translate_cover(&[0], 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(min_translate_cover(&[0, 1], 4).unwrap(), vec![0, 2]);
        assert_eq!(min_translate_cover(&[0, 1, 2, 3, 4], 5).unwrap(), vec![0]);
        assert!(min_translate_cover(&[], 4).is_err());
        assert!(min_translate_cover(&[0], 25).is_err());
    }

    #[test]
    fn no_perfect_tiling_needs_extra_translate() {
        // {0,1,3} mod 7 is a perfect difference set, but covering needs 3 translates
        let f = min_translate_cover(&[0, 1, 3], 7).unwrap();
        assert_eq!(f.len(), 3);
        assert!(is_cover(&f, &[0, 1, 3], 7));
    }

    fn brute(d: &[u64], p: u64) -> Vec<u64> {
        let mut best: Option<Vec<u64>> = None;
        for m in 1u32..(1 << p) {
            let f: Vec<u64> = (0..p).filter(|&i| m >> i & 1 == 1).collect();
            if is_cover(&f, d, p) {
                let better = match &best {
                    None => true,
                    Some(b) => f.len() < b.len() || (f.len() == b.len() && f < *b),
                };
                if better {
                    best = Some(f);
                }
            }
        }
        best.unwrap()
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search(p in 1u64..=10, bits in 1u32..1024) {
            let d: Vec<u64> = (0..p).filter(|&i| bits >> i & 1 == 1).collect();
            prop_assume!(!d.is_empty());
            prop_assert_eq!(min_translate_cover(&d, p).unwrap(), brute(&d, p));
        }

        #[test]
        fn greedy_always_covers(p in 1u64..=60, seed in any::<u64>()) {
            let d: Vec<u64> = (0..p).filter(|&i| (seed >> (i % 64)) & 1 == 1).collect();
            prop_assume!(!d.is_empty());
            let f = greedy_translate_cover(&d, p).unwrap();
            prop_assert!(is_cover(&f, &d, p));
        }
    }
}
