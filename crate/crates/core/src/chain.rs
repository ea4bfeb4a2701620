//! Transition matrices, stationary distributions and partition functions.

use std::fmt;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, RatMatrix};
use crate::linear_form::LinearForm;
use crate::poset::Poset;
use crate::promotion::{Mode, PromotionSystem};
use crate::weights::WeightVector;
use crate::word::{LinearExtension, Word};

/// Matrix of linear forms over a lexicographically ordered basis.
///
/// Entry `(π′, π)` is the total weight of the edges `π → π′`, so columns
/// are indexed by the source state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    n: usize,
    mode: Mode,
    basis: Vec<Word>,
    // cols[π] = sorted (π′, weight).
    cols: Vec<Vec<(usize, LinearForm)>>,
}

impl TransitionMatrix {
    pub fn from_system(system: &PromotionSystem, mode: Mode) -> Self {
        let n = system.size();
        let cols = (0..system.len())
            .map(|s| {
                let mut col: Vec<(usize, LinearForm)> = Vec::new();
                for j in 1..=n {
                    let t = system.promote(s, j);
                    let label = system.edge_label(s, j, mode);
                    match col.iter_mut().find(|(r, _)| *r == t) {
                        Some((_, f)) => *f += &LinearForm::var(n, label),
                        None => col.push((t, LinearForm::var(n, label))),
                    }
                }
                col.sort_by_key(|(r, _)| *r);
                col
            })
            .collect();
        TransitionMatrix {
            n,
            mode,
            basis: system.states().to_vec(),
            cols,
        }
    }

    /// Number of variables `x_1, …, x_n`.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn entry(&self, row: usize, col: usize) -> LinearForm {
        self.cols[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| LinearForm::zero(self.n))
    }

    /// Nonzero entries of the column of `col`, as `(row, form)`.
    pub fn column(&self, col: usize) -> &[(usize, LinearForm)] {
        &self.cols[col]
    }

    pub fn column_sums(&self) -> Vec<LinearForm> {
        self.cols
            .iter()
            .map(|col| {
                col.iter()
                    .fold(LinearForm::zero(self.n), |acc, (_, f)| &acc + f)
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<LinearForm> {
        let mut sums = vec![LinearForm::zero(self.n); self.dim()];
        for col in &self.cols {
            for (r, f) in col {
                sums[*r] += f;
            }
        }
        sums
    }

    /// Substitutes `x_i = w_i` in every entry.
    pub fn evaluate(&self, w: &WeightVector) -> Result<RatMatrix> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: w.len(),
            });
        }
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|(r, f)| (*r, f.eval(w.values()))).collect())
            .collect();
        Ok(RatMatrix::from_column_entries(self.dim(), cols))
    }

    /// Plain-text rendering: the basis, then one row per line with
    /// symbolic entries in aligned columns.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.entry(r, c).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        let basis: Vec<String> = self.basis.iter().map(Word::to_string).collect();
        let _ = writeln!(out, "basis: {}", basis.join(" "));
        for row in cells {
            let padded: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        }
        out
    }

    /// `{"basis": [...], "entries": [[[coeffs]]]}` with rows outermost.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<LinearForm>> = (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.entry(r, c)).collect())
            .collect();
        serde_json::json!({
            "mode": self.mode,
            "basis": self.basis,
            "entries": entries,
        })
    }
}

/// The transition matrix of the promotion chain on `𝓛(P)`.
pub fn transition_matrix(poset: &Poset, mode: Mode) -> Result<TransitionMatrix> {
    Ok(TransitionMatrix::from_system(&PromotionSystem::from_poset(poset)?, mode))
}

/// A ratio `∏ numerators / ∏ denominators` of linear forms, with common
/// factors cancelled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductWeight {
    pub numerators: Vec<LinearForm>,
    pub denominators: Vec<LinearForm>,
}

impl ProductWeight {
    /// `∏_i (x_1 + ⋯ + x_i) / (x_{π_1} + ⋯ + x_{π_i})`.
    pub fn of_word(pi: &Word) -> Self {
        let n = pi.len();
        let mut numerators = Vec::new();
        let mut denominators = Vec::new();
        for i in 1..=n {
            let num = LinearForm::indicator(n, &(1..=i).collect::<Vec<_>>());
            let den = LinearForm::indicator(
                n,
                &pi.letters()[..i].iter().map(|&l| l as usize).collect::<Vec<_>>(),
            );
            if num != den {
                numerators.push(num);
                denominators.push(den);
            }
        }
        let mut weight = ProductWeight {
            numerators,
            denominators,
        };
        weight.cancel();
        weight
    }

    fn cancel(&mut self) {
        let mut i = 0;
        while i < self.numerators.len() {
            if let Some(j) = self.denominators.iter().position(|d| *d == self.numerators[i]) {
                self.numerators.remove(i);
                self.denominators.remove(j);
            } else {
                i += 1;
            }
        }
        self.numerators.sort();
        self.denominators.sort();
    }

    pub fn is_one(&self) -> bool {
        self.numerators.is_empty() && self.denominators.is_empty()
    }

    pub fn eval(&self, w: &WeightVector) -> Result<BigRational> {
        let num: BigRational = self.numerators.iter().map(|f| f.eval(w.values())).product();
        let den: BigRational = self.denominators.iter().map(|f| f.eval(w.values())).product();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(num / den)
    }
}

impl fmt::Display for ProductWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn product(fs: &[LinearForm]) -> String {
            let parts: Vec<String> = fs
                .iter()
                .map(|x| {
                    let s = x.to_string();
                    if fs.len() > 1 && s.contains(['+', '-']) {
                        format!("({s})")
                    } else {
                        s
                    }
                })
                .collect();
            parts.join("")
        }
        if self.is_one() {
            return f.write_str("1");
        }
        let num = if self.numerators.is_empty() {
            "1".to_string()
        } else {
            product(&self.numerators)
        };
        if self.denominators.is_empty() {
            return f.write_str(&num);
        }
        let wrap = |s: String, many: bool| {
            if many || s.contains(['+', '-']) && !s.starts_with('(') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(
            f,
            "{}/{}",
            wrap(num, false),
            wrap(product(&self.denominators), self.denominators.len() > 1)
        )
    }
}

/// The unnormalized stationary weight of `π`, with `w(e) = 1`.
pub fn stationary_weight(poset: &Poset, pi: &LinearExtension) -> Result<ProductWeight> {
    if pi.len() != poset.size() || !poset.is_linear_extension(pi) {
        return Err(Error::NotALinearExtension(pi.to_string()));
    }
    Ok(ProductWeight::of_word(pi))
}

/// `[w(π) / Σ w]` over the given states.
pub fn normalized_product_weights(states: &[Word], w: &WeightVector) -> Result<Vec<BigRational>> {
    let raw = states
        .iter()
        .map(|pi| ProductWeight::of_word(pi).eval(w))
        .collect::<Result<Vec<_>>>()?;
    let total: BigRational = raw.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(raw.into_iter().map(|x| x / &total).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    /// `∏_i x_{⪯i} / (x_1 + ⋯ + x_i)`; rooted forests only.
    Formula,
    /// `1 / Σ_π w(π)`.
    Brute,
}

/// The constant `Z_P` with `Σ_π w(π) Z_P = 1`.
pub fn partition_function(poset: &Poset, w: &WeightVector, mode: PartitionMode) -> Result<BigRational> {
    let n = poset.size();
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len(),
        });
    }
    match mode {
        PartitionMode::Formula => {
            if !poset.is_rooted_forest() {
                return Err(Error::NotRootedForest);
            }
            let mut z = BigRational::one();
            let mut prefix = BigRational::zero();
            for i in 1..=n {
                prefix += w.get(i);
                if prefix.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                let below: BigRational = poset.down_set(i).iter().map(|&j| w.get(j)).sum();
                z *= below / &prefix;
            }
            Ok(z)
        }
        PartitionMode::Brute => {
            let mut total = BigRational::zero();
            for pi in poset.linear_extensions()? {
                total += ProductWeight::of_word(&pi).eval(w)?;
            }
            if total.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Ok(total.recip())
        }
    }
}

/// The unique stationary probability vector of a column-stochastic matrix.
pub fn stationary_solve(m: &RatMatrix) -> Result<Vec<BigRational>> {
    exact::stationary_vector(m)
}

/// Checks the balance `Σ_{π′} M_{π,π′} w(π′) = Σ_{π′} M_{π′,π} w(π)` at
/// every state.
pub fn verify_master_equation(
    m: &TransitionMatrix,
    candidate: &[BigRational],
    w: &WeightVector,
) -> Result<bool> {
    if candidate.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: candidate.len(),
        });
    }
    let mnum = m.evaluate(w)?;
    let inflow = mnum.mul_vec(candidate);
    let outflow = mnum.column_sums();
    Ok(inflow
        .iter()
        .zip(outflow.iter().zip(candidate))
        .all(|(i, (o, c))| *i == o * c))
}
