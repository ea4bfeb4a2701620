//! The lattice of upper sets of a poset, ordered by inclusion.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poset::{Poset, DEFAULT_UPPER_SET_CAP};

/// Upper sets of a poset as bitmasks (bit `i − 1` set when `i ∈ S`).
///
/// Sets are stored sorted by `(|S|, mask)`, which is a linear extension of
/// inclusion, so the bottom `∅` comes first and the top `[n]` last. The
/// covering relation of the lattice (adding one element) is kept as an
/// explicit adjacency list.
#[derive(Debug, Clone)]
pub struct UpperSetLattice {
    n: usize,
    sets: Vec<u64>,
    index: HashMap<u64, usize>,
    up: Vec<Vec<usize>>,
}

impl UpperSetLattice {
    pub fn new(poset: &Poset) -> Result<Self> {
        Self::with_cap(poset, DEFAULT_UPPER_SET_CAP)
    }

    pub fn with_cap(poset: &Poset, cap: usize) -> Result<Self> {
        let n = poset.size();
        assert!(n <= 64, "upper-set lattice supports at most 64 elements");
        let strictly_above: Vec<u64> = (1..=n)
            .map(|i| {
                (1..=n)
                    .filter(|&j| poset.lt(i, j))
                    .fold(0u64, |m, j| m | 1 << (j - 1))
            })
            .collect();
        let mut sets = vec![0u64];
        let mut index = HashMap::from([(0u64, 0usize)]);
        let mut head = 0;
        while head < sets.len() {
            let s = sets[head];
            head += 1;
            for i in 0..n {
                let t = s | 1 << i;
                if t != s && strictly_above[i] & !s == 0 && !index.contains_key(&t) {
                    if sets.len() == cap {
                        return Err(Error::SizeLimitExceeded {
                            what: "number of upper sets",
                            cap,
                        });
                    }
                    index.insert(t, sets.len());
                    sets.push(t);
                }
            }
        }
        sets.sort_by_key(|&m| (m.count_ones(), m));
        let index: HashMap<u64, usize> = sets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let up = sets
            .iter()
            .map(|&s| {
                (0..n)
                    .filter_map(|i| index.get(&(s | 1 << i)).copied().filter(|_| s >> i & 1 == 0))
                    .collect()
            })
            .collect();
        Ok(UpperSetLattice { n, sets, index, up })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.sets
    }

    /// Members as sorted element lists.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|&m| mask_to_set(m)).collect()
    }

    pub fn top(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn index_of(&self, set: &[usize]) -> Result<usize> {
        let mask = set_to_mask(set);
        self.index
            .get(&mask)
            .copied()
            .ok_or_else(|| Error::NotInLattice(mask_to_set(mask)))
    }

    pub fn mask(&self, idx: usize) -> u64 {
        self.sets[idx]
    }

    /// Lattice elements covering `idx`.
    pub fn covers_above(&self, idx: usize) -> &[usize] {
        &self.up[idx]
    }

    /// Möbius values `μ(S, T)` for every `T ⊇ S`, from the recursion
    /// `μ(S,S) = 1`, `μ(S,T) = −Σ_{S ⊆ U ⊊ T} μ(S,U)`.
    pub fn mobius_from(&self, s: usize) -> Vec<(usize, i64)> {
        let base = self.sets[s];
        let interval: Vec<usize> = (s..self.sets.len())
            .filter(|&t| self.sets[t] & base == base)
            .collect();
        let mut mu: Vec<i64> = Vec::with_capacity(interval.len());
        for (k, &t) in interval.iter().enumerate() {
            let tm = self.sets[t];
            let value = if k == 0 {
                1
            } else {
                -interval[..k]
                    .iter()
                    .zip(&mu)
                    .filter(|(&u, _)| {
                        let um = self.sets[u];
                        um & tm == um && um != tm
                    })
                    .map(|(_, &m)| m)
                    .sum::<i64>()
            };
            mu.push(value);
        }
        interval.into_iter().zip(mu).collect()
    }

    pub fn mobius(&self, s: &[usize], t: &[usize]) -> Result<i64> {
        let (si, ti) = (self.index_of(s)?, self.index_of(t)?);
        let (sm, tm) = (self.sets[si], self.sets[ti]);
        if sm & tm != sm {
            return Ok(0);
        }
        Ok(self
            .mobius_from(si)
            .into_iter()
            .find(|&(u, _)| u == ti)
            .map_or(0, |(_, m)| m))
    }

    /// `f([S, 1̂])` for every lattice element: the number of maximal chains from
    /// `S` up to `[n]`, by dynamic programming over the cover adjacency.
    pub fn chain_counts(&self) -> Vec<u128> {
        let mut f = vec![0u128; self.sets.len()];
        for idx in (0..self.sets.len()).rev() {
            f[idx] = if idx == self.top() {
                1
            } else {
                self.up[idx].iter().map(|&t| f[t]).sum()
            };
        }
        f
    }

    pub fn maximal_chain_count(&self, s: &[usize]) -> Result<u128> {
        let idx = self.index_of(s)?;
        Ok(self.chain_counts()[idx])
    }
}

pub(crate) fn set_to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &i| m | 1 << (i - 1))
}

pub(crate) fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}
