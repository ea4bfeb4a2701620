//! Extended promotion on linear extensions and the promotion graphs.
//!
//! Operators act on the right and compose left to right:
//! `π ∂_j = ((π τ_j) τ_{j+1}) ⋯ τ_{n−1}`.

use std::collections::HashMap;
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Poset, DEFAULT_EXTENSION_CAP};
use crate::word::{LinearExtension, Word};

/// Edge weighting of a promotion graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The edge `π → π∂_j` carries `x_j`.
    Uniform,
    /// The edge `π → π∂_j` carries `x_{π_j}`.
    Promotion,
}

/// Decides whether swapping positions `i, i+1` (1-based) of a word is allowed.
pub trait SwapRule {
    fn can_swap(&self, word: &[u8], i: usize) -> bool;
}

impl SwapRule for Poset {
    fn can_swap(&self, word: &[u8], i: usize) -> bool {
        !self.comparable(word[i - 1] as usize, word[i] as usize)
    }
}

pub(crate) fn apply_tau<R: SwapRule + ?Sized>(rule: &R, word: &mut [u8], i: usize) {
    if rule.can_swap(word, i) {
        word.swap(i - 1, i);
    }
}

pub(crate) fn apply_promotion<R: SwapRule + ?Sized>(rule: &R, word: &mut [u8], j: usize) {
    for i in j..word.len() {
        apply_tau(rule, word, i);
    }
}

fn check_extension(poset: &Poset, pi: &Word) -> Result<()> {
    if poset.is_linear_extension(pi) {
        Ok(())
    } else {
        Err(Error::NotALinearExtension(pi.to_string()))
    }
}

fn check_index(index: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&index) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, max })
    }
}

/// `π τ_i`: swaps positions `i, i+1` when their letters are incomparable.
pub fn tau(poset: &Poset, pi: &LinearExtension, i: usize) -> Result<LinearExtension> {
    check_extension(poset, pi)?;
    check_index(i, poset.size().saturating_sub(1))?;
    let mut w = pi.letters().to_vec();
    apply_tau(poset, &mut w, i);
    Ok(Word::from_vec_unchecked(w))
}

/// `π ∂_j = π τ_j τ_{j+1} ⋯ τ_{n−1}`; `∂_n` is the identity.
pub fn extended_promotion(poset: &Poset, pi: &LinearExtension, j: usize) -> Result<LinearExtension> {
    check_extension(poset, pi)?;
    check_index(j, poset.size())?;
    let mut w = pi.letters().to_vec();
    apply_promotion(poset, &mut w, j);
    Ok(Word::from_vec_unchecked(w))
}

/// `π ∂_j` computed by sliding labels instead of composing `τ`s.
///
/// Each element `k` carries the label `π⁻¹(k)`. The label `j` is removed,
/// leaving a hole at `π_j`; the hole then repeatedly takes the smallest label
/// among the elements covering it, until it reaches an element with nothing
/// above it. That element receives the label `n`, and every label in
/// `j+1..=n` that moved or stayed is shifted down by one.
pub fn extended_promotion_jdt(
    poset: &Poset,
    pi: &LinearExtension,
    j: usize,
) -> Result<LinearExtension> {
    check_extension(poset, pi)?;
    let n = poset.size();
    check_index(j, n)?;
    // label[k - 1] = position of element k.
    let mut label: Vec<usize> = pi.inverse().letters().iter().map(|&l| l as usize).collect();
    let mut hole = pi.at(j);
    loop {
        let next = poset
            .upper_covers(hole)
            .iter()
            .copied()
            .min_by_key(|&c| label[c - 1]);
        match next {
            Some(c) => {
                label[hole - 1] = label[c - 1];
                hole = c;
            }
            None => break,
        }
    }
    // The hole stands for the sentinel n + 1, which becomes n after the shift.
    label[hole - 1] = n + 1;
    let mut word = vec![0u8; n];
    for (k, &l) in label.iter().enumerate() {
        let l = if l > j { l - 1 } else { l };
        word[l - 1] = k as u8 + 1;
    }
    Ok(Word::from_vec_unchecked(word))
}

/// `π ∂̂_i = π ∂_{π⁻¹(i)}`, indexed by the letter rather than the position.
pub fn hat_promotion(poset: &Poset, pi: &LinearExtension, i: usize) -> Result<LinearExtension> {
    check_extension(poset, pi)?;
    check_index(i, poset.size())?;
    let pos = pi.position(i).expect("permutation contains every letter");
    extended_promotion(poset, pi, pos)
}

/// The promotion operators tabulated over a finite state space of words
/// (the linear extensions of a poset, or a permutation subset).
///
/// `table[j - 1][s]` is the index of `state_s ∂_j`.
#[derive(Debug, Clone)]
pub struct PromotionSystem {
    n: usize,
    states: Vec<Word>,
    index: HashMap<Word, usize>,
    table: Vec<Vec<usize>>,
}

impl PromotionSystem {
    pub fn from_poset(poset: &Poset) -> Result<Self> {
        Self::from_poset_capped(poset, DEFAULT_EXTENSION_CAP)
    }

    pub fn from_poset_capped(poset: &Poset, cap: usize) -> Result<Self> {
        let states = poset.linear_extensions_capped(cap)?;
        Ok(Self::build(poset.size(), states, poset))
    }

    /// States must be sorted and closed under the rule's swaps.
    pub(crate) fn build<R: SwapRule + ?Sized>(n: usize, states: Vec<Word>, rule: &R) -> Self {
        let index: HashMap<Word, usize> =
            states.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let table = (1..=n)
            .map(|j| {
                states
                    .iter()
                    .map(|s| {
                        let mut w = s.letters().to_vec();
                        apply_promotion(rule, &mut w, j);
                        index[&Word::from_vec_unchecked(w)]
                    })
                    .collect()
            })
            .collect();
        PromotionSystem {
            n,
            states,
            index,
            table,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Index of `state ∂_j`.
    pub fn promote(&self, state: usize, j: usize) -> usize {
        self.table[j - 1][state]
    }

    /// Index of `state ∂̂_i`.
    pub fn hat(&self, state: usize, letter: usize) -> usize {
        let pos = self.states[state]
            .position(letter)
            .expect("letter occurs in every state");
        self.table[pos - 1][state]
    }

    /// The map `π ↦ π∂_j` as an image table.
    pub fn promotion_map(&self, j: usize) -> &[usize] {
        &self.table[j - 1]
    }

    /// The map `π ↦ π∂̂_i` as an image table.
    pub fn hat_map(&self, letter: usize) -> Vec<usize> {
        (0..self.states.len()).map(|s| self.hat(s, letter)).collect()
    }

    /// Label of the edge for `∂_j` leaving `state`.
    pub fn edge_label(&self, state: usize, j: usize, mode: Mode) -> usize {
        match mode {
            Mode::Uniform => j,
            Mode::Promotion => self.states[state].at(j),
        }
    }

    pub fn graph(&self, mode: Mode) -> PromotionGraph {
        let edges = (0..self.states.len())
            .flat_map(|s| {
                (1..=self.n).map(move |j| Edge {
                    source: s,
                    target: self.promote(s, j),
                    label: self.edge_label(s, j, mode),
                })
            })
            .collect();
        PromotionGraph {
            vertices: self.states.clone(),
            edges,
            mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Index `k` of the formal variable `x_k`.
    pub label: usize,
}

/// Directed multigraph on words with one edge per operator `∂_j` at every
/// vertex, self-loops included. Parallel edges are kept separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromotionGraph {
    pub vertices: Vec<Word>,
    pub edges: Vec<Edge>,
    pub mode: Mode,
}

impl PromotionGraph {
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in &self.edges {
            d[e.source] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in &self.edges {
            d[e.target] += 1;
        }
        d
    }

    /// Graphviz rendering; `no_loops` drops self-loops.
    pub fn to_dot(&self, no_loops: bool) -> String {
        let mut s = String::from("digraph promotion {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{v}\"];");
        }
        for e in &self.edges {
            if no_loops && e.source == e.target {
                continue;
            }
            let _ = writeln!(s, "  v{} -> v{} [label=\"x{}\"];", e.source, e.target, e.label);
        }
        s.push_str("}\n");
        s
    }
}

/// The promotion graph of a poset over its lexicographically ordered
/// linear extensions.
pub fn build_promotion_graph(poset: &Poset, mode: Mode) -> Result<PromotionGraph> {
    Ok(PromotionSystem::from_poset(poset)?.graph(mode))
}

/// True iff every ordered pair of vertices is joined by a directed path.
pub fn is_strongly_connected(graph: &PromotionGraph) -> bool {
    strongly_connected(graph.vertices.len(), graph.edges.iter().map(|e| (e.source, e.target)))
}

pub(crate) fn strongly_connected(
    vertices: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> bool {
    if vertices == 0 {
        return true;
    }
    let mut g = DiGraph::<(), ()>::with_capacity(vertices, 0);
    let nodes: Vec<_> = (0..vertices).map(|_| g.add_node(())).collect();
    for (a, b) in edges {
        g.add_edge(nodes[a], nodes[b], ());
    }
    tarjan_scc(&g).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::parse_poset;

    fn running() -> Poset {
        parse_poset("4\n1 3\n1 4\n2 3").unwrap()
    }

    fn labeled_example() -> Poset {
        Poset::new(
            9,
            &[(1, 3), (2, 3), (1, 4), (3, 6), (3, 7), (4, 5), (4, 8), (6, 9), (7, 9)],
        )
        .unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn tau_examples() {
        let p = running();
        assert_eq!(tau(&p, &w("1234"), 1).unwrap(), w("2134"));
        assert_eq!(tau(&p, &w("1234"), 2).unwrap(), w("1234"));
        assert!(matches!(tau(&p, &w("1234"), 4), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(tau(&p, &w("3124"), 1), Err(Error::NotALinearExtension(_))));
    }

    #[test]
    fn promotion_examples() {
        let fig = labeled_example();
        let id = Word::identity(9);
        assert_eq!(extended_promotion(&fig, &id, 1).unwrap(), w("214537869"));
        assert_eq!(extended_promotion_jdt(&fig, &id, 1).unwrap(), w("214537869"));
        let p = running();
        assert_eq!(extended_promotion(&p, &w("1234"), 1).unwrap(), w("2143"));
        assert_eq!(extended_promotion(&p, &w("1423"), 4).unwrap(), w("1423"));
        assert_eq!(extended_promotion_jdt(&p, &w("1234"), 4).unwrap(), w("1234"));
    }

    #[test]
    fn hat_examples() {
        let p = Poset::union_of_chains(&[3, 2]);
        assert_eq!(hat_promotion(&p, &w("41235"), 1).unwrap(), w("41253"));
        let a = Poset::antichain(3);
        assert_eq!(hat_promotion(&a, &w("213"), 2).unwrap(), w("132"));
        assert_eq!(hat_promotion(&a, &w("213"), 3).unwrap(), w("213"));
    }

    #[test]
    fn uniform_graph_of_running_example() {
        let g = build_promotion_graph(&running(), Mode::Uniform).unwrap();
        let has = |s: &str, t: &str, x: usize| {
            let (si, ti) = (
                g.vertices.iter().position(|v| v == &w(s)).unwrap(),
                g.vertices.iter().position(|v| v == &w(t)).unwrap(),
            );
            g.edges.iter().any(|e| e.source == si && e.target == ti && e.label == x)
        };
        assert!(has("1234", "2143", 1));
        for v in ["1234", "1243", "1423", "2134", "2143"] {
            assert!(has(v, v, 4));
        }
        assert!(g.out_degrees().iter().all(|&d| d == 4));
        assert!(g.in_degrees().iter().all(|&d| d == 4));
        assert!(is_strongly_connected(&g));
    }

    #[test]
    fn promotion_graph_parallel_edges() {
        let g = build_promotion_graph(&running(), Mode::Promotion).unwrap();
        let (a, b) = (2, 0); // 1423 -> 1234
        let labels: Vec<usize> = g
            .edges
            .iter()
            .filter(|e| e.source == a && e.target == b)
            .map(|e| e.label)
            .collect();
        assert_eq!(labels, vec![1, 4]);
        let dot = g.to_dot(true);
        assert!(dot.contains("v2 -> v0 [label=\"x1\"]"));
        assert!(!dot.contains("v0 -> v0"));
    }

    #[test]
    fn chain_graph_is_single_vertex() {
        let g = build_promotion_graph(&Poset::chain(4), Mode::Uniform).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 4);
        assert!(g.edges.iter().all(|e| e.source == 0 && e.target == 0));
        assert!(is_strongly_connected(&g));
    }
}
