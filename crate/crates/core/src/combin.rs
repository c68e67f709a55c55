//! k-subsets of `{0..n}` in colexicographic order.

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// The combination of colex rank `rank` among k-subsets, ascending.
pub fn colex_unrank(mut rank: u64, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in (0..k).rev() {
        let size = slot + 1;
        // largest c with C(c, size) <= rank
        let mut c = slot;
        while binomial(c + 1, size).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binomial(c, size).expect("bounded by rank");
        out[slot] = c;
    }
    out
}

/// Colex rank of an ascending combination.
pub fn colex_rank(comb: &[usize]) -> u64 {
    comb.iter().enumerate().map(|(i, &c)| binomial(c, i + 1).expect("rank fits u64")).sum()
}

/// Advances to the next combination of `{0..n}` in colex order; `false` after
/// the last one.
pub fn colex_next(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in 0..k {
        let limit = if i + 1 < k { comb[i + 1] } else { n };
        if comb[i] + 1 < limit {
            comb[i] += 1;
            for (j, c) in comb.iter_mut().enumerate().take(i) {
                *c = j;
            }
            return true;
        }
    }
    false
}
