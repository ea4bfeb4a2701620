//! Promotion on arbitrary subsets of the symmetric group.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::chain::{ProductWeight, TransitionMatrix};
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::promotion::{apply_promotion, strongly_connected, Mode, PromotionSystem, SwapRule};
use crate::weights::WeightVector;
use crate::word::Word;

/// A nonempty set of permutations of `[n]`, kept sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermSubset {
    n: usize,
    perms: Vec<Word>,
    members: HashSet<Vec<u8>>,
    sorting_network_union: bool,
}

impl SwapRule for PermSubset {
    fn can_swap(&self, word: &[u8], i: usize) -> bool {
        let mut w = word.to_vec();
        w.swap(i - 1, i);
        self.members.contains(&w)
    }
}

impl PermSubset {
    pub fn new(perms: Vec<Word>) -> Result<Self> {
        let Some(n) = perms.first().map(Word::len) else {
            return Err(Error::MalformedInput {
                line: 0,
                msg: "permutation subset is empty".into(),
            });
        };
        if let Some(bad) = perms.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let perms: Vec<Word> = perms.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let members = perms.iter().map(|p| p.letters().to_vec()).collect();
        Ok(PermSubset {
            n,
            perms,
            members,
            sorting_network_union: false,
        })
    }

    /// One permutation per line in one-line notation; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut perms = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w: Word = line.parse().map_err(|e: Error| Error::MalformedInput {
                line: k + 1,
                msg: e.to_string(),
            })?;
            perms.push(w);
        }
        Self::new(perms)
    }

    /// `𝓛(P)` as a permutation subset.
    pub fn from_poset(poset: &Poset) -> Result<Self> {
        Self::new(poset.linear_extensions()?)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn perms(&self) -> &[Word] {
        &self.perms
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w.letters())
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&Word::identity(self.n))
    }

    pub fn is_sorting_network_union(&self) -> bool {
        self.sorting_network_union
    }

    pub fn to_text(&self) -> String {
        self.perms.iter().map(|p| format!("{p}\n")).collect()
    }

    fn check_member(&self, pi: &Word) -> Result<()> {
        if self.contains(pi) {
            Ok(())
        } else {
            Err(Error::NotInSubset(pi.to_string()))
        }
    }

    /// `π σ_i`: swaps positions `i, i+1` when the result lies in `A`.
    pub fn sigma(&self, pi: &Word, i: usize) -> Result<Word> {
        self.check_member(pi)?;
        if !(1..self.n).contains(&i) {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n.saturating_sub(1),
            });
        }
        Ok(if self.can_swap(pi.letters(), i) {
            pi.swapped(i)
        } else {
            pi.clone()
        })
    }

    /// `π ∂_j = π σ_j σ_{j+1} ⋯ σ_{n−1}`.
    pub fn promotion(&self, pi: &Word, j: usize) -> Result<Word> {
        self.check_member(pi)?;
        if !(1..=self.n).contains(&j) {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.n,
            });
        }
        let mut w = pi.letters().to_vec();
        apply_promotion(self, &mut w, j);
        Word::new(w)
    }

    pub fn system(&self) -> PromotionSystem {
        PromotionSystem::build(self.n, self.perms.clone(), self)
    }

    pub fn transition_matrix(&self, mode: Mode) -> TransitionMatrix {
        TransitionMatrix::from_system(&self.system(), mode)
    }

    pub fn is_strongly_connected(&self) -> bool {
        let sys = self.system();
        let edges = (0..sys.len()).flat_map(|s| (1..=self.n).map(move |j| (s, j)));
        strongly_connected(sys.len(), edges.map(|(s, j)| (s, sys.promote(s, j))))
    }
}

/// Value inversions `(a, b)` with `a < b` and `b` before `a`, as a bitset
/// indexed by `a·n + b` (0-based letters).
fn inversion_set(w: &[u8]) -> Vec<bool> {
    let n = w.len();
    let mut inv = vec![false; n * n];
    for i in 0..n {
        for j in i + 1..n {
            if w[i] > w[j] {
                inv[(w[j] as usize - 1) * n + w[i] as usize - 1] = true;
            }
        }
    }
    inv
}

/// A target for [`sorting_network_union`]: either an explicit chain from the
/// identity or every geodesic to the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTarget {
    pub target: Word,
    pub chain: Option<Vec<Word>>,
}

impl NetworkTarget {
    pub fn all_geodesics(target: Word) -> Self {
        NetworkTarget { target, chain: None }
    }

    pub fn chain(chain: Vec<Word>) -> Result<Self> {
        let target = chain
            .last()
            .cloned()
            .ok_or_else(|| Error::NotAGeodesic("empty chain".into()))?;
        Ok(NetworkTarget {
            target,
            chain: Some(chain),
        })
    }
}

/// Union of sorting networks from the identity to each target.
pub fn sorting_network_union(targets: &[NetworkTarget]) -> Result<PermSubset> {
    let n = targets
        .first()
        .map(|t| t.target.len())
        .ok_or_else(|| Error::NotAGeodesic("no targets".into()))?;
    let mut all: BTreeSet<Word> = BTreeSet::new();
    for t in targets {
        if t.target.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.target.len(),
            });
        }
        match &t.chain {
            Some(chain) => {
                check_geodesic(chain, &t.target)?;
                all.extend(chain.iter().cloned());
            }
            None => all.extend(geodesic_interval(&t.target)),
        }
    }
    let mut subset = PermSubset::new(all.into_iter().collect())?;
    subset.sorting_network_union = true;
    Ok(subset)
}

fn check_geodesic(chain: &[Word], target: &Word) -> Result<()> {
    let n = target.len();
    if chain.first() != Some(&Word::identity(n)) {
        return Err(Error::NotAGeodesic("chain must start at the identity".into()));
    }
    if chain.last() != Some(target) {
        return Err(Error::NotAGeodesic(format!("chain must end at {target}")));
    }
    for pair in chain.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let step = (1..n).find(|&i| a.swapped(i) == *b);
        if step.is_none() || b.inversions() != a.inversions() + 1 {
            return Err(Error::NotAGeodesic(format!("{a} -> {b} is not a length-increasing adjacent swap")));
        }
    }
    Ok(())
}

/// Every permutation on some shortest path of adjacent swaps from the
/// identity to `target`: those whose inversion set lies inside the
/// target's.
pub fn geodesic_interval(target: &Word) -> Vec<Word> {
    let n = target.len();
    let inv_t = inversion_set(target.letters());
    let mut seen: BTreeSet<Word> = BTreeSet::from([Word::identity(n)]);
    let mut frontier = vec![Word::identity(n)];
    while let Some(w) = frontier.pop() {
        for i in 1..n {
            let (a, b) = (w.at(i), w.at(i + 1));
            if a < b && inv_t[(a - 1) * n + b - 1] {
                let next = w.swapped(i);
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// The stationary formula on `A`: `1/|A|` in uniform mode, the unnormalized
/// product `∏ (x_1 + ⋯ + x_i)/(x_{π_1} + ⋯ + x_{π_i})` in promotion mode.
pub fn subset_stationary(subset: &PermSubset, mode: Mode, w: &WeightVector) -> Result<Vec<BigRational>> {
    if w.len() != subset.size() {
        return Err(Error::DimensionMismatch {
            expected: subset.size(),
            found: w.len(),
        });
    }
    match mode {
        Mode::Uniform => Ok(vec![
            BigRational::new(BigInt::one(), BigInt::from(subset.len()));
            subset.len()
        ]),
        Mode::Promotion => {
            if !w.is_positive() {
                return Err(Error::InvalidWeights("weights must be positive".into()));
            }
            subset
                .perms()
                .iter()
                .map(|p| ProductWeight::of_word(p).eval(w))
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetSummary {
    pub n: usize,
    pub size: usize,
    pub contains_identity: bool,
    pub sorting_network_union: bool,
    pub strongly_connected: bool,
    /// Every `∂_j` permutes `A`.
    pub bijective: bool,
}

pub fn summarize(subset: &PermSubset) -> SubsetSummary {
    let sys = subset.system();
    let bijective = (1..=subset.size()).all(|j| {
        let mut image: Vec<usize> = sys.promotion_map(j).to_vec();
        image.sort_unstable();
        image.dedup();
        image.len() == sys.len()
    });
    SubsetSummary {
        n: subset.size(),
        size: subset.len(),
        contains_identity: subset.contains_identity(),
        sorting_network_union: subset.is_sorting_network_union(),
        strongly_connected: subset.is_strongly_connected(),
        bijective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::verify_master_equation;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn five_step_chain() -> Vec<Word> {
        ["12345", "12435", "21435", "24135", "24153"].iter().map(|s| w(s)).collect()
    }

    #[test]
    fn sigma_examples() {
        let a = PermSubset::new(vec![w("123"), w("213")]).unwrap();
        assert_eq!(a.sigma(&w("123"), 1).unwrap(), w("213"));
        assert_eq!(a.sigma(&w("123"), 2).unwrap(), w("123"));
        assert_eq!(a.sigma(&w("132"), 1), Err(Error::NotInSubset("132".into())));
        assert!(matches!(a.sigma(&w("123"), 3), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(a.promotion(&w("213"), 3).unwrap(), w("213"));
    }

    #[test]
    fn five_step_sorting_network() {
        let t = NetworkTarget::chain(five_step_chain()).unwrap();
        let a = sorting_network_union(&[t]).unwrap();
        assert_eq!(a.perms(), five_step_chain().as_slice());
        assert!(a.is_sorting_network_union() && a.contains_identity());
        let s = summarize(&a);
        assert!(s.strongly_connected && s.bijective);
        let mut cur = w("12345");
        for i in 1..5 {
            cur = a.sigma(&cur, i).unwrap();
            assert!(a.contains(&cur));
        }
    }

    #[test]
    fn bad_chains_are_rejected() {
        let chain = vec![w("123"), w("321")];
        assert!(matches!(
            sorting_network_union(&[NetworkTarget::chain(chain).unwrap()]),
            Err(Error::NotAGeodesic(_))
        ));
        let back = vec![w("123"), w("213"), w("123"), w("213")];
        assert!(sorting_network_union(&[NetworkTarget::chain(back).unwrap()]).is_err());
    }

    #[test]
    fn geodesic_intervals() {
        assert_eq!(geodesic_interval(&w("123")), vec![w("123")]);
        assert_eq!(geodesic_interval(&w("21")), vec![w("12"), w("21")]);
        assert_eq!(geodesic_interval(&w("321")).len(), 6);
        let iv = geodesic_interval(&w("24153"));
        for c in five_step_chain() {
            assert!(iv.contains(&c));
        }
    }

    #[test]
    fn stationary_formulas() {
        let a = sorting_network_union(&[NetworkTarget::chain(five_step_chain()).unwrap()]).unwrap();
        let wt = WeightVector::from_ratios(&[(1, 15), (2, 15), (3, 15), (4, 15), (5, 15)]).unwrap();
        let m = a.transition_matrix(Mode::Promotion);
        let v = subset_stationary(&a, Mode::Promotion, &wt).unwrap();
        assert!(verify_master_equation(&m, &v, &wt).unwrap());
        let u = subset_stationary(&a, Mode::Uniform, &wt).unwrap();
        assert!(verify_master_equation(&a.transition_matrix(Mode::Uniform), &u, &wt).unwrap());
        assert_eq!(u[0], BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn parse_subset_file() {
        let a = PermSubset::parse("# targets\n213\n123\n\n213\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.to_text(), "123\n213\n");
        assert!(PermSubset::parse("12\n123\n").is_err());
        assert!(PermSubset::parse("").is_err());
    }
}
