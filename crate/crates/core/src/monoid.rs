//! The transformation monoid generated by the maps `π ↦ π∂̂_i`, its Green
//! classes and egg-box pictures, and the `rfactor` statistics.
//!
//! Two multiplication conventions are supported. With [`Product::Matrix`],
//! `x·y` is the matrix product of the 0/1 column maps, so `y` is applied
//! first. With [`Product::Action`], `x·y` applies `x` and then `y`, as for
//! operators acting on the right. The two monoids are anti-isomorphic, so
//! each one's R-classes are the other's L-classes.

use std::collections::HashMap;
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::promotion::PromotionSystem;

/// Default bound on the number of generated elements.
pub const DEFAULT_MONOID_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    /// `x·y = x ∘ y`: apply `y`, then `x`.
    Matrix,
    /// `x·y = y ∘ x`: apply `x`, then `y`.
    Action,
}

/// A total map on the basis, stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoidElement {
    image: Vec<u32>,
}

impl MonoidElement {
    pub fn new(image: Vec<u32>) -> Result<Self> {
        let len = image.len();
        if let Some(&bad) = image.iter().find(|&&v| v as usize >= len) {
            return Err(Error::IndexOutOfRange {
                index: bad as usize,
                max: len.saturating_sub(1),
            });
        }
        Ok(MonoidElement { image })
    }

    pub fn from_map(map: &[usize]) -> Self {
        MonoidElement {
            image: map.iter().map(|&v| v as u32).collect(),
        }
    }

    pub fn identity(len: usize) -> Self {
        MonoidElement {
            image: (0..len as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn apply(&self, state: usize) -> usize {
        self.image[state] as usize
    }

    /// Apply `self`, then `other`.
    pub fn then(&self, other: &MonoidElement) -> MonoidElement {
        MonoidElement {
            image: self.image.iter().map(|&s| other.image[s as usize]).collect(),
        }
    }

    pub fn mul(&self, other: &MonoidElement, product: Product) -> MonoidElement {
        match product {
            Product::Action => self.then(other),
            Product::Matrix => other.then(self),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.then(self) == *self
    }

    pub fn is_constant(&self) -> bool {
        self.image.windows(2).all(|w| w[0] == w[1])
    }

    /// 0/1 matrix whose column `π` has its single 1 in row `π·x`.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.image.len();
        let mut rows = vec![vec![0u8; n]; n];
        for (c, &r) in self.image.iter().enumerate() {
            rows[r as usize][c] = 1;
        }
        rows
    }
}

/// `G_i : π ↦ π∂̂_i` for `i = 1, …, n`.
pub fn generators_of(system: &PromotionSystem) -> Vec<MonoidElement> {
    (1..=system.size())
        .map(|i| MonoidElement::from_map(&system.hat_map(i)))
        .collect()
}

pub fn generators(poset: &Poset) -> Result<Vec<MonoidElement>> {
    Ok(generators_of(&PromotionSystem::from_poset(poset)?))
}

/// A finite monoid with a distinguished generating set and precomputed
/// Cayley tables.
#[derive(Debug, Clone)]
pub struct Monoid {
    product: Product,
    elements: Vec<MonoidElement>,
    index: HashMap<MonoidElement, usize>,
    generators: Vec<usize>,
    // right[x][k] = x·g_k, left[x][k] = g_k·x.
    right: Vec<Vec<usize>>,
    left: Vec<Vec<usize>>,
}

/// Closure of `gens` and the identity, discovered breadth first: the
/// identity, then products by generator words in shortlex order.
pub fn generate_monoid(gens: &[MonoidElement], cap: usize, product: Product) -> Result<Monoid> {
    let len = gens.first().map_or(0, MonoidElement::len);
    if gens.iter().any(|g| g.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: gens.iter().map(MonoidElement::len).find(|&l| l != len).unwrap_or(len),
        });
    }
    let mut elements = vec![MonoidElement::identity(len)];
    let mut index = HashMap::from([(elements[0].clone(), 0usize)]);
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for g in gens {
            let y = elements[head].mul(g, product);
            let next = index.len();
            let id = *index.entry(y.clone()).or_insert(next);
            if id == next {
                if elements.len() == cap {
                    return Err(Error::CapExceeded(cap));
                }
                elements.push(y);
            }
            row.push(id);
        }
        right.push(row);
        head += 1;
    }
    let generators = gens.iter().map(|g| index[g]).collect();
    let left = left_table(&elements, &index, gens, product)?;
    Ok(Monoid {
        product,
        elements,
        index,
        generators,
        right,
        left,
    })
}

fn left_table(
    elements: &[MonoidElement],
    index: &HashMap<MonoidElement, usize>,
    gens: &[MonoidElement],
    product: Product,
) -> Result<Vec<Vec<usize>>> {
    elements
        .iter()
        .map(|x| {
            gens.iter()
                .map(|g| index.get(&g.mul(x, product)).copied().ok_or(Error::NotClosed))
                .collect()
        })
        .collect()
}

impl Monoid {
    pub fn from_poset(poset: &Poset, product: Product) -> Result<Self> {
        generate_monoid(&generators(poset)?, DEFAULT_MONOID_CAP, product)
    }

    /// Wraps an explicit element list; fails with [`Error::NotClosed`] unless
    /// it contains the identity and is closed under multiplication by the
    /// generators on both sides.
    pub fn from_elements(
        elements: Vec<MonoidElement>,
        gens: &[MonoidElement],
        product: Product,
    ) -> Result<Self> {
        let len = elements.first().map_or(0, MonoidElement::len);
        let index: HashMap<MonoidElement, usize> =
            elements.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        if index.len() != elements.len() || !index.contains_key(&MonoidElement::identity(len)) {
            return Err(Error::NotClosed);
        }
        let generators = gens
            .iter()
            .map(|g| index.get(g).copied().ok_or(Error::NotClosed))
            .collect::<Result<Vec<_>>>()?;
        let right = elements
            .iter()
            .map(|x| {
                gens.iter()
                    .map(|g| index.get(&x.mul(g, product)).copied().ok_or(Error::NotClosed))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let left = left_table(&elements, &index, gens, product)?;
        Ok(Monoid {
            product,
            elements,
            index,
            generators,
            right,
            left,
        })
    }

    pub fn product(&self) -> Product {
        self.product
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[MonoidElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &MonoidElement {
        &self.elements[i]
    }

    pub fn index_of(&self, x: &MonoidElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Element indices of the generators, in order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    /// Index of `x·g_k` (`k` is 0-based).
    pub fn times_generator(&self, x: usize, k: usize) -> usize {
        self.right[x][k]
    }

    /// Index of `x·y`.
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.index[&self.elements[x].mul(&self.elements[y], self.product)]
    }

    pub fn green_classes(&self) -> GreenClasses {
        let r = scc_labels(&self.right);
        let l = scc_labels(&self.left);
        let mut h_key: HashMap<(usize, usize), usize> = HashMap::new();
        let h_raw: Vec<usize> = r
            .iter()
            .zip(&l)
            .map(|(&a, &b)| {
                let next = h_key.len();
                *h_key.entry((a, b)).or_insert(next)
            })
            .collect();
        // D = R ∨ L; for finite monoids D = R∘L, so a union-find over the
        // two partitions suffices.
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while p[root] != root {
                root = p[root];
            }
            let mut cur = x;
            while p[cur] != root {
                let next = p[cur];
                p[cur] = root;
                cur = next;
            }
            root
        }
        for labels in [&r, &l] {
            let mut first: HashMap<usize, usize> = HashMap::new();
            for (x, &c) in labels.iter().enumerate() {
                let rep = *first.entry(c).or_insert(x);
                let (a, b) = (find(&mut parent, rep), find(&mut parent, x));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let d_raw: Vec<usize> = (0..self.len()).map(|x| find(&mut parent, x)).collect();
        GreenClasses {
            r: canonical(&r),
            l: canonical(&l),
            h: canonical(&h_raw),
            d: canonical(&d_raw),
        }
    }

    pub fn is_r_trivial(&self) -> bool {
        self.green_classes().r_trivial()
    }

    pub fn is_l_trivial(&self) -> bool {
        self.green_classes().l_trivial()
    }

    pub fn is_aperiodic(&self) -> bool {
        self.green_classes().h_trivial()
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.elements[x].is_idempotent())
            .collect()
    }

    pub fn eggbox(&self) -> EggBox {
        EggBox::new(self, &self.green_classes())
    }
}

// Strongly connected components of the Cayley graph, labeled arbitrarily.
fn scc_labels(table: &[Vec<usize>]) -> Vec<usize> {
    let mut g = DiGraph::<(), ()>::with_capacity(table.len(), 0);
    let nodes: Vec<_> = (0..table.len()).map(|_| g.add_node(())).collect();
    for (x, row) in table.iter().enumerate() {
        for &y in row {
            if x != y {
                g.add_edge(nodes[x], nodes[y], ());
            }
        }
    }
    let mut labels = vec![0; table.len()];
    for (c, comp) in tarjan_scc(&g).into_iter().enumerate() {
        for v in comp {
            labels[v.index()] = c;
        }
    }
    labels
}

// Relabels classes 0, 1, … in order of their smallest element.
fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    labels
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Class label of every element for each of Green's relations. Labels are
/// numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenClasses {
    pub r: Vec<usize>,
    pub l: Vec<usize>,
    pub h: Vec<usize>,
    pub d: Vec<usize>,
}

impl GreenClasses {
    fn count(labels: &[usize]) -> usize {
        labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn r_count(&self) -> usize {
        Self::count(&self.r)
    }

    pub fn l_count(&self) -> usize {
        Self::count(&self.l)
    }

    pub fn h_count(&self) -> usize {
        Self::count(&self.h)
    }

    pub fn d_count(&self) -> usize {
        Self::count(&self.d)
    }

    pub fn r_trivial(&self) -> bool {
        self.r_count() == self.r.len()
    }

    pub fn l_trivial(&self) -> bool {
        self.l_count() == self.l.len()
    }

    pub fn h_trivial(&self) -> bool {
        self.h_count() == self.h.len()
    }

    /// Members of each class, indexed by label.
    pub fn members(labels: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); Self::count(labels)];
        for (x, &c) in labels.iter().enumerate() {
            out[c].push(x);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EggCell {
    /// Elements of the H-class.
    pub elements: Vec<usize>,
    pub idempotent: bool,
}

/// One D-class: rows are R-classes, columns L-classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DClassGrid {
    pub cells: Vec<Vec<EggCell>>,
}

/// Grid dimensions, star count and H-class size of a D-class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
    pub stars: usize,
    pub h_size: usize,
}

impl DClassGrid {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn stars(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.idempotent).count()
    }

    pub fn size(&self) -> usize {
        self.cells.iter().flatten().map(|c| c.elements.len()).sum()
    }

    pub fn shape(&self) -> GridShape {
        GridShape {
            rows: self.rows(),
            cols: self.cols(),
            stars: self.stars(),
            h_size: self.cells[0][0].elements.len(),
        }
    }

    fn min_element(&self) -> usize {
        self.cells.iter().flatten().flat_map(|c| c.elements.iter()).copied().min().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EggBox {
    pub grids: Vec<DClassGrid>,
}

impl EggBox {
    pub fn new(monoid: &Monoid, classes: &GreenClasses) -> Self {
        let mut grids: Vec<DClassGrid> = GreenClasses::members(&classes.d)
            .into_iter()
            .map(|members| {
                let mut rows: Vec<usize> = Vec::new();
                let mut cols: Vec<usize> = Vec::new();
                for &x in &members {
                    if !rows.contains(&classes.r[x]) {
                        rows.push(classes.r[x]);
                    }
                    if !cols.contains(&classes.l[x]) {
                        cols.push(classes.l[x]);
                    }
                }
                let cells = rows
                    .iter()
                    .map(|&r| {
                        cols.iter()
                            .map(|&l| {
                                let elements: Vec<usize> = members
                                    .iter()
                                    .copied()
                                    .filter(|&x| classes.r[x] == r && classes.l[x] == l)
                                    .collect();
                                let idempotent =
                                    elements.iter().any(|&x| monoid.element(x).is_idempotent());
                                EggCell {
                                    elements,
                                    idempotent,
                                }
                            })
                            .collect()
                    })
                    .collect();
                DClassGrid { cells }
            })
            .collect();
        grids.sort_by_key(|g| (g.size(), g.min_element()));
        EggBox { grids }
    }

    pub fn shapes(&self) -> Vec<GridShape> {
        self.grids.iter().map(DClassGrid::shape).collect()
    }

    /// Box-drawing rendering, one grid per D-class; `⋆` marks an H-class
    /// containing an idempotent and a number gives the H-class size when it
    /// exceeds one.
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        for (k, g) in self.grids.iter().enumerate() {
            let _ = writeln!(out, "D{k}: {}x{}", g.rows(), g.cols());
            let labels: Vec<Vec<String>> = g
                .cells
                .iter()
                .map(|row| row.iter().map(cell_label).collect())
                .collect();
            let width = labels.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1).max(1);
            let rule = format!("+{}\n", vec!["-".repeat(width + 2); g.cols()].join("+") + "+");
            out.push_str(&rule);
            for row in labels {
                out.push('|');
                for cell in row {
                    let _ = write!(out, " {cell:^width$} |");
                }
                out.push('\n');
                out.push_str(&rule);
            }
        }
        out
    }

    /// Graphviz rendering with one HTML-table node per D-class.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph eggbox {\n  node [shape=plaintext];\n");
        for (k, g) in self.grids.iter().enumerate() {
            let _ = write!(out, "  d{k} [label=<<table border=\"0\" cellborder=\"1\" cellspacing=\"0\">");
            for row in &g.cells {
                out.push_str("<tr>");
                for cell in row {
                    let _ = write!(out, "<td>{}</td>", cell_label(cell));
                }
                out.push_str("</tr>");
            }
            out.push_str("</table>>];\n");
        }
        out.push_str("}\n");
        out
    }
}

fn cell_label(cell: &EggCell) -> String {
    let star = if cell.idempotent { "⋆" } else { "" };
    if cell.elements.len() > 1 {
        format!("{star}{}", cell.elements.len())
    } else {
        star.to_string()
    }
}

/// The `rfactor` statistics of a monoid element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RfactorStats {
    /// Longest common suffix of all image words.
    pub rfactor: Vec<u8>,
    /// Letters of `rfactor`, sorted.
    pub rfactor_set: Vec<usize>,
    /// `{i : x·G_i = x}`.
    pub des: Vec<usize>,
    /// `(n − |Rfactor|, |des|)`.
    pub u: (usize, usize),
}

/// Statistics of element `x` of a monoid generated by `G_1, …, G_n` over
/// the states of `system`.
pub fn rfactor_stats(monoid: &Monoid, system: &PromotionSystem, x: usize) -> RfactorStats {
    let n = system.size();
    let states = system.states();
    let elem = monoid.element(x);
    let mut images = elem.image().iter().map(|&s| states[s as usize].letters());
    let first = images.next().expect("nonempty basis");
    let suffix_len = images.fold(first.len(), |len, w| {
        first
            .iter()
            .rev()
            .zip(w.iter().rev())
            .take(len)
            .take_while(|(a, b)| a == b)
            .count()
    });
    let rfactor = first[first.len() - suffix_len..].to_vec();
    let mut rfactor_set: Vec<usize> = rfactor.iter().map(|&l| l as usize).collect();
    rfactor_set.sort_unstable();
    let des: Vec<usize> = (0..monoid.generator_indices().len())
        .filter(|&k| monoid.times_generator(x, k) == x)
        .map(|k| k + 1)
        .collect();
    RfactorStats {
        u: (n - rfactor_set.len(), des.len()),
        rfactor,
        rfactor_set,
        des,
    }
}

/// Outcome of checking the `u` statistic over a whole monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatisticCheck {
    /// `u(x·y) ≤ u(x)` lexicographically for every pair.
    pub monotone: bool,
    /// Every non-constant `x` has a generator `G_i` with `u(x·G_i) < u(x)`.
    pub strict_descent: bool,
}

pub fn check_statistic(monoid: &Monoid, system: &PromotionSystem) -> StatisticCheck {
    let u: Vec<(usize, usize)> = (0..monoid.len()).map(|x| rfactor_stats(monoid, system, x).u).collect();
    let monotone = (0..monoid.len()).all(|x| (0..monoid.len()).all(|y| u[monoid.mul(x, y)] <= u[x]));
    let strict_descent = (0..monoid.len())
        .filter(|&x| !monoid.element(x).is_constant())
        .all(|x| (0..monoid.generator_indices().len()).any(|k| u[monoid.times_generator(x, k)] < u[x]));
    StatisticCheck {
        monotone,
        strict_descent,
    }
}
