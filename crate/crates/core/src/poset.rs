//! Finite posets on `[n]`, their linear extensions and structural classification.
//!
//! Elements are the integers `1..=n`. A [`Poset`] is always naturally labeled
//! (`a ≺ b ⇒ a < b`) and stores its cover relations in reduced form together
//! with the strict order relation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{LinearExtension, Word};

/// Default cap on the number of enumerated linear extensions.
pub const DEFAULT_EXTENSION_CAP: usize = 1_000_000;
/// Default cap on the number of enumerated upper sets.
pub const DEFAULT_UPPER_SET_CAP: usize = 1 << 20;

/// Enumeration caps. Exceeding a cap is an error, never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_extensions: usize,
    pub max_upper_sets: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_extensions: DEFAULT_EXTENSION_CAP,
            max_upper_sets: DEFAULT_UPPER_SET_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    covers: Vec<(usize, usize)>,
    // less[a][b] for 0-based a, b: a ≺ b strictly.
    less: Vec<Vec<bool>>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
}

/// The result of building a poset from possibly redundant relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Input pairs that were implied by transitivity and dropped.
    pub removed: Vec<(usize, usize)>,
}

/// Flags describing which structural classes a poset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub is_rooted_forest: bool,
    pub is_union_of_chains: bool,
    pub is_consecutively_labeled_chains: bool,
    pub is_antichain: bool,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    n: usize,
    covers: Vec<[usize; 2]>,
}

impl Poset {
    /// Builds a poset from relations `(a, b)` meaning `a ≺ b`. Transitively
    /// implied pairs are reduced away silently; use [`Poset::with_reduction`]
    /// to learn which.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        Self::with_reduction(n, relations).map(|(p, _)| p)
    }

    pub fn with_reduction(n: usize, relations: &[(usize, usize)]) -> Result<(Self, Reduction)> {
        let less = closure(n, relations)?;
        for a in 0..n {
            for b in 0..n {
                if less[a][b] && a > b {
                    return Err(Error::NotNaturallyLabeled(a + 1, b + 1));
                }
            }
        }
        let poset = Self::from_closure(n, less);
        let kept: BTreeSet<(usize, usize)> = poset.covers.iter().copied().collect();
        let mut removed: Vec<(usize, usize)> = relations
            .iter()
            .copied()
            .filter(|pair| !kept.contains(pair))
            .collect();
        removed.sort_unstable();
        removed.dedup();
        Ok((poset, Reduction { removed }))
    }

    fn from_closure(n: usize, less: Vec<Vec<bool>>) -> Self {
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if less[a][b] && !(0..n).any(|c| less[a][c] && less[c][b]) {
                    covers.push((a + 1, b + 1));
                }
            }
        }
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for &(a, b) in &covers {
            upper_covers[a - 1].push(b);
            lower_covers[b - 1].push(a);
        }
        Poset {
            n,
            covers,
            less,
            upper_covers,
            lower_covers,
        }
    }

    /// The antichain on `n` elements.
    pub fn antichain(n: usize) -> Self {
        Self::from_closure(n, vec![vec![false; n]; n])
    }

    /// The chain `1 ≺ 2 ≺ … ≺ n`.
    pub fn chain(n: usize) -> Self {
        let rel: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        Self::new(n, &rel).expect("chain is naturally labeled")
    }

    /// Disjoint union of chains of the given lengths, labeled consecutively.
    pub fn union_of_chains(lengths: &[usize]) -> Self {
        let n = lengths.iter().sum();
        let mut rel = Vec::new();
        let mut start = 1;
        for &len in lengths {
            for i in start..start + len.saturating_sub(1) {
                rel.push((i, i + 1));
            }
            start += len;
        }
        Self::new(n, &rel).expect("consecutive chains are naturally labeled")
    }

    /// Builds a poset from an arbitrary acyclic relation, relabeling it
    /// naturally. Returns the poset and `map`, where `map[old - 1]` is the
    /// new label of `old`. Among natural relabelings the lexicographically
    /// smallest topological order is used.
    pub fn relabel(n: usize, relations: &[(usize, usize)]) -> Result<(Self, Vec<usize>)> {
        let less = closure(n, relations)?;
        let mut placed = vec![false; n];
        let mut map = vec![0; n];
        for next in 1..=n {
            let x = (0..n)
                .find(|&x| !placed[x] && (0..n).all(|y| !less[y][x] || placed[y]))
                .expect("acyclic relation has a minimal element");
            placed[x] = true;
            map[x] = next;
        }
        let renamed: Vec<(usize, usize)> = relations
            .iter()
            .map(|&(a, b)| (map[a - 1], map[b - 1]))
            .collect();
        Ok((Self::new(n, &renamed)?, map))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Cover pairs `(a, b)`, meaning `b` covers `a`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Strict order `a ≺ b`.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.less[a - 1][b - 1]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    /// Elements covering `a` (its successors).
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper_covers[a - 1]
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower_covers[a - 1]
    }

    /// `{ j : j ⪯ i }`.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.le(j, i)).collect()
    }

    pub fn up_set(&self, i: usize) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.le(i, j)).collect()
    }

    pub fn is_linear_extension(&self, word: &Word) -> bool {
        if word.len() != self.n {
            return false;
        }
        let pos = word.inverse();
        self.covers
            .iter()
            .all(|&(a, b)| pos.at(a) < pos.at(b))
    }

    /// All linear extensions in lexicographic order; the identity comes first.
    pub fn linear_extensions(&self) -> Result<Vec<LinearExtension>> {
        self.linear_extensions_capped(DEFAULT_EXTENSION_CAP)
    }

    pub fn linear_extensions_capped(&self, cap: usize) -> Result<Vec<LinearExtension>> {
        let mut out = Vec::new();
        let mut indeg: Vec<usize> = (0..self.n).map(|i| self.lower_covers[i].len()).collect();
        let mut used = vec![false; self.n];
        let mut prefix = Vec::with_capacity(self.n);
        self.extend(&mut prefix, &mut indeg, &mut used, &mut out, cap)?;
        Ok(out)
    }

    // Choosing the smallest available element first yields lexicographic order.
    fn extend(
        &self,
        prefix: &mut Vec<u8>,
        indeg: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<Word>,
        cap: usize,
    ) -> Result<()> {
        if prefix.len() == self.n {
            if out.len() == cap {
                return Err(Error::SizeLimitExceeded {
                    what: "number of linear extensions",
                    cap,
                });
            }
            out.push(Word::from_vec_unchecked(prefix.clone()));
            return Ok(());
        }
        for x in 0..self.n {
            if used[x] || indeg[x] > 0 {
                continue;
            }
            used[x] = true;
            for &y in &self.upper_covers[x] {
                indeg[y - 1] -= 1;
            }
            prefix.push(x as u8 + 1);
            self.extend(prefix, indeg, used, out, cap)?;
            prefix.pop();
            for &y in &self.upper_covers[x] {
                indeg[y - 1] += 1;
            }
            used[x] = false;
        }
        Ok(())
    }

    pub fn classify(&self) -> Classification {
        let is_rooted_forest = self.upper_covers.iter().all(|c| c.len() <= 1);
        let is_union_of_chains =
            is_rooted_forest && self.lower_covers.iter().all(|c| c.len() <= 1);
        Classification {
            is_rooted_forest,
            is_union_of_chains,
            is_consecutively_labeled_chains: is_union_of_chains
                && self.covers.iter().all(|&(a, b)| b == a + 1),
            is_antichain: self.covers.is_empty(),
        }
    }

    pub fn is_rooted_forest(&self) -> bool {
        self.classify().is_rooted_forest
    }

    /// Number of fixed-point-free linear extensions. The empty poset counts 1.
    pub fn derangement_count(&self) -> Result<u64> {
        self.derangement_count_capped(DEFAULT_EXTENSION_CAP)
    }

    pub fn derangement_count_capped(&self, cap: usize) -> Result<u64> {
        if self.n == 0 {
            return Ok(1);
        }
        Ok(self
            .linear_extensions_capped(cap)?
            .iter()
            .filter(|w| !w.has_fixed_point())
            .count() as u64)
    }

    /// The subposet induced on `elements`, relabeled `1..=k` preserving the
    /// integer order of the labels (so natural labeling is preserved).
    pub fn induced(&self, elements: &[usize]) -> Poset {
        let mut elems = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let k = elems.len();
        let less = (0..k)
            .map(|i| (0..k).map(|j| self.lt(elems[i], elems[j])).collect())
            .collect();
        Self::from_closure(k, less)
    }

    /// Canonical text encoding, e.g. `4:1-3,1-4,2-3`.
    pub fn encoding(&self) -> String {
        let covers: Vec<String> = self.covers.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        format!("{}:{}", self.n, covers.join(","))
    }

    /// The line-oriented text format accepted by [`parse_poset`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (a, b) in &self.covers {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PosetJson {
            n: self.n,
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        })
        .expect("poset serializes")
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

fn closure(n: usize, relations: &[(usize, usize)]) -> Result<Vec<Vec<bool>>> {
    let mut less = vec![vec![false; n]; n];
    for &(a, b) in relations {
        if a == 0 || b == 0 || a > n || b > n {
            return Err(Error::malformed(
                0,
                format!("relation ({a}, {b}) mentions an element outside 1..={n}"),
            ));
        }
        if a == b {
            return Err(Error::CycleDetected);
        }
        less[a - 1][b - 1] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if less[i][k] {
                for j in 0..n {
                    if less[k][j] {
                        less[i][j] = true;
                    }
                }
            }
        }
    }
    if (0..n).any(|i| less[i][i]) {
        return Err(Error::CycleDetected);
    }
    Ok(less)
}

/// Parses the poset text format, or its JSON equivalent
/// `{"n": 4, "covers": [[1,3],[1,4],[2,3]]}`.
///
/// Text format: the first meaningful line is `n`; each further nonempty line
/// is `a b`, meaning `b` covers `a`. `#` starts a comment.
pub fn parse_poset(text: &str) -> Result<Poset> {
    parse_poset_with_reduction(text).map(|(p, _)| p)
}

pub fn parse_poset_with_reduction(text: &str) -> Result<(Poset, Reduction)> {
    if text.trim_start().starts_with('{') {
        let json: PosetJson =
            serde_json::from_str(text).map_err(|e| Error::malformed(e.line(), e.to_string()))?;
        let rel: Vec<(usize, usize)> = json.covers.iter().map(|&[a, b]| (a, b)).collect();
        return Poset::with_reduction(json.n, &rel);
    }
    let mut n = None;
    let mut rel = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::malformed(line_no, format!("expected an integer, got {t:?}")))
        };
        match (n, fields.as_slice()) {
            (None, [count]) => {
                let count = parse(count)?;
                if count == 0 {
                    return Err(Error::malformed(line_no, "poset size must be positive"));
                }
                n = Some(count);
            }
            (None, _) => {
                return Err(Error::malformed(line_no, "first line must be the element count"))
            }
            (Some(size), [a, b]) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a == 0 || b == 0 || a > size || b > size {
                    return Err(Error::malformed(
                        line_no,
                        format!("element out of range 1..={size}"),
                    ));
                }
                rel.push((a, b));
            }
            (Some(_), _) => return Err(Error::malformed(line_no, "expected `a b`")),
        }
    }
    let n = n.ok_or_else(|| Error::malformed(0, "empty poset description"))?;
    Poset::with_reduction(n, &rel)
}
