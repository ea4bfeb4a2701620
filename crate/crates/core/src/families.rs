//! Exhaustive poset families used by the verification sweeps.
//!
//! Every naturally labeled poset on `[n]` arises exactly once by adding the
//! element `n` on top of a down-closed subset of a naturally labeled poset on
//! `[n − 1]`. Isomorphism classes are separated by a brute-force canonical
//! form (minimum over all relabelings), which is fine for `n ≤ 8`.

use std::collections::HashSet;

use crate::poset::Poset;

/// All naturally labeled posets on `[n]`, in generation order.
pub fn naturally_labeled_posets(n: usize) -> Vec<Poset> {
    // Strict order as bitmasks: below[i] = set of j with j ≺ i.
    let mut layer: Vec<Vec<u64>> = vec![Vec::new()];
    for size in 0..n {
        let mut next = Vec::new();
        for below in &layer {
            for mask in 0u64..(1 << size) {
                let down_closed = (0..size)
                    .filter(|&i| mask >> i & 1 == 1)
                    .all(|i| below[i] & !mask == 0);
                if down_closed {
                    let mut b = below.clone();
                    b.push(mask);
                    next.push(b);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|below| from_below_masks(below)).collect()
}

fn from_below_masks(below: &[u64]) -> Poset {
    let n = below.len();
    let rel: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| below[i] >> j & 1 == 1).map(move |j| (j + 1, i + 1)))
        .collect();
    Poset::new(n, &rel).expect("generated relation is a natural partial order")
}

/// One naturally labeled representative per isomorphism class of posets on
/// `n` elements, sorted by [`Poset::encoding`].
pub fn iso_distinct_posets(n: usize) -> Vec<Poset> {
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for p in naturally_labeled_posets(n) {
        if seen.insert(canonical_form(&p, &perms)) {
            reps.push(p);
        }
    }
    reps.sort_by_key(|p| p.encoding());
    reps
}

/// Iso-distinct rooted forests on `n` elements.
pub fn rooted_forests(n: usize) -> Vec<Poset> {
    iso_distinct_posets(n)
        .into_iter()
        .filter(|p| p.is_rooted_forest())
        .collect()
}

/// Iso-distinct posets on `n` elements that are not rooted forests.
pub fn non_forests(n: usize) -> Vec<Poset> {
    iso_distinct_posets(n)
        .into_iter()
        .filter(|p| !p.is_rooted_forest())
        .collect()
}

/// Every consecutively labeled union of chains of total size `n`, one per
/// composition of `n` (chain order matters for the labeling).
pub fn consecutive_chain_unions(n: usize) -> Vec<Poset> {
    fn compositions(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        (1..=n)
            .flat_map(|first| {
                compositions(n - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    compositions(n).iter().map(|c| Poset::union_of_chains(c)).collect()
}

fn canonical_form(p: &Poset, perms: &[Vec<usize>]) -> u64 {
    let n = p.size();
    perms
        .iter()
        .map(|perm| {
            let mut bits = 0u64;
            for a in 1..=n {
                for b in 1..=n {
                    if p.lt(a, b) {
                        bits |= 1 << (perm[a - 1] * n + perm[b - 1]);
                    }
                }
            }
            bits
        })
        .min()
        .unwrap_or(0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out
}

fn heap_permute(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, cur, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, cur, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequences() {
        // Naturally labeled posets: 1, 1, 2, 7, 40, 357.
        let labeled: Vec<usize> = (0..=5).map(|n| naturally_labeled_posets(n).len()).collect();
        assert_eq!(labeled, [1, 1, 2, 7, 40, 357]);
        // Unlabeled posets: 1, 2, 5, 16, 63.
        let unlabeled: Vec<usize> = (1..=5).map(|n| iso_distinct_posets(n).len()).collect();
        assert_eq!(unlabeled, [1, 2, 5, 16, 63]);
        // Rooted forests are counted by A000081 shifted: 1, 2, 4, 9, 20.
        let forests: Vec<usize> = (1..=5).map(|n| rooted_forests(n).len()).collect();
        assert_eq!(forests, [1, 2, 4, 9, 20]);
        assert_eq!(consecutive_chain_unions(4).len(), 8);
    }
}
