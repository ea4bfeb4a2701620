//! Eigenvalue predictions for promotion chains and exact checks against
//! characteristic polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{transition_matrix, TransitionMatrix};
use crate::error::{Error, Result};
use crate::exact::{self, Certainty, IntMatrix, CERTIFIED_WORK_BUDGET};
use crate::lattice::{mask_to_set, UpperSetLattice};
use crate::linear_form::LinearForm;
use crate::poset::Poset;
use crate::promotion::Mode;
use crate::weights::WeightVector;

/// Largest poset size accepted by [`probe_linear_spectrum`].
pub const PROBE_MAX_N: usize = 12;

/// `d_S = Σ_{T ⊇ S} μ(S, T) · f([T, 1̂])`.
pub fn derangement_number(lattice: &UpperSetLattice, set: &[usize]) -> Result<i128> {
    let idx = lattice.index_of(set)?;
    Ok(derangement_at(lattice, idx, &lattice.chain_counts()))
}

fn derangement_at(lattice: &UpperSetLattice, idx: usize, chains: &[u128]) -> i128 {
    lattice
        .mobius_from(idx)
        .into_iter()
        .map(|(t, mu)| mu as i128 * chains[t] as i128)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumItem {
    pub upper_set: Vec<usize>,
    /// `x_S`, rendered as text.
    pub form: String,
    pub coeffs: LinearForm,
    pub multiplicity: u64,
    /// True when the multiplicity is zero; such items are kept because the
    /// prediction ranges over all upper sets.
    pub zero_multiplicity: bool,
}

impl SpectrumItem {
    fn new(n: usize, upper_set: Vec<usize>, multiplicity: u64) -> Self {
        let coeffs = LinearForm::indicator(n, &upper_set);
        SpectrumItem {
            form: coeffs.to_string(),
            upper_set,
            coeffs,
            multiplicity,
            zero_multiplicity: multiplicity == 0,
        }
    }
}

/// Predicted eigenvalues `x_S` with multiplicities, one item per upper set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumPrediction {
    pub n: usize,
    pub items: Vec<SpectrumItem>,
}

impl SpectrumPrediction {
    pub fn total_multiplicity(&self) -> u64 {
        self.items.iter().map(|i| i.multiplicity).sum()
    }

    /// Items with nonzero multiplicity.
    pub fn eigenvalues(&self) -> impl Iterator<Item = &SpectrumItem> {
        self.items.iter().filter(|i| i.multiplicity > 0)
    }

    /// `(form, multiplicity)` pairs with nonzero multiplicity.
    pub fn factors(&self) -> Vec<(LinearForm, usize)> {
        self.eigenvalues()
            .map(|i| (i.coeffs.clone(), i.multiplicity as usize))
            .collect()
    }
}

/// Multiplicities `d_S` from the upper-set lattice of a rooted forest.
pub fn predicted_spectrum(poset: &Poset) -> Result<SpectrumPrediction> {
    if !poset.is_rooted_forest() {
        return Err(Error::NotRootedForest);
    }
    let lattice = UpperSetLattice::new(poset)?;
    let chains = lattice.chain_counts();
    let items = (0..lattice.len())
        .map(|idx| {
            let d = derangement_at(&lattice, idx, &chains);
            debug_assert!(d >= 0, "derangement numbers are nonnegative on forests");
            SpectrumItem::new(poset.size(), mask_to_set(lattice.mask(idx)), d.max(0) as u64)
        })
        .collect();
    Ok(SpectrumPrediction {
        n: poset.size(),
        items,
    })
}

/// Multiplicities `𝔡_{P∖S}` (poset derangements of the complement) for a
/// union of chains labeled consecutively within each chain.
pub fn predicted_spectrum_chains(poset: &Poset) -> Result<SpectrumPrediction> {
    if !poset.classify().is_consecutively_labeled_chains {
        return Err(Error::NotUnionOfChains);
    }
    let n = poset.size();
    let lattice = UpperSetLattice::new(poset)?;
    let items = (0..lattice.len())
        .map(|idx| {
            let upper = mask_to_set(lattice.mask(idx));
            let rest: Vec<usize> = (1..=n).filter(|i| !upper.contains(i)).collect();
            let d = poset.induced(&rest).derangement_count()?;
            Ok(SpectrumItem::new(n, upper, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumPrediction { n, items })
}

/// Controls how [`verify_spectrum_report`] establishes the polynomial identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Work budget (prime count × dimension³) for a certified comparison.
    pub budget: f64,
    /// Random primes used when the certified comparison exceeds the budget.
    pub random_primes: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: CERTIFIED_WORK_BUDGET,
            random_primes: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumCheck {
    pub matches: bool,
    pub certainty: Certainty,
}

/// True iff `det(λI − M(w)) = ∏ (λ − x_S(w))^{d_S}` for the promotion
/// matrix of `P`.
pub fn verify_spectrum(poset: &Poset, pred: &SpectrumPrediction, w: &WeightVector) -> Result<bool> {
    Ok(verify_spectrum_report(poset, pred, w, &VerifyOptions::default())?.matches)
}

pub fn verify_spectrum_report(
    poset: &Poset,
    pred: &SpectrumPrediction,
    w: &WeightVector,
    opts: &VerifyOptions,
) -> Result<SpectrumCheck> {
    if pred.n != poset.size() {
        return Err(Error::DimensionMismatch {
            expected: poset.size(),
            found: pred.n,
        });
    }
    let m = transition_matrix(poset, Mode::Promotion)?;
    verify_factors(&m, &pred.factors(), w, opts)
}

/// Compares the characteristic polynomial of `M(w)` with `∏ (λ − f(w))^m`.
pub fn verify_factors(
    m: &TransitionMatrix,
    factors: &[(LinearForm, usize)],
    w: &WeightVector,
    opts: &VerifyOptions,
) -> Result<SpectrumCheck> {
    let (a, roots) = integer_instance(m, factors, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (matches, certainty) =
        exact::charpoly_equals_roots(&a, &roots, opts.budget, opts.random_primes, &mut rng);
    Ok(SpectrumCheck { matches, certainty })
}

// Scales M(w) and the roots by a common denominator so both are integral.
fn integer_instance(
    m: &TransitionMatrix,
    factors: &[(LinearForm, usize)],
    w: &WeightVector,
) -> Result<(IntMatrix, Vec<(BigInt, usize)>)> {
    let mnum = m.evaluate(w)?;
    let values: Vec<(BigRational, usize)> = factors
        .iter()
        .map(|(f, k)| {
            if f.len() != w.len() {
                return Err(Error::DimensionMismatch {
                    expected: w.len(),
                    found: f.len(),
                });
            }
            Ok((f.eval(w.values()), *k))
        })
        .collect::<Result<_>>()?;
    let d = values
        .iter()
        .fold(mnum.common_denominator(), |acc, (v, _)| acc.lcm(v.denom()));
    let a = mnum.scaled(&d).expect("common denominator clears entries");
    let dr = BigRational::from_integer(d);
    let roots = values
        .into_iter()
        .map(|(v, k)| ((v * &dr).to_integer(), k))
        .collect();
    Ok((a, roots))
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    /// Number of independent random weight samples.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { samples: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeFactor {
    pub form: String,
    pub coeffs: LinearForm,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub linear: bool,
    /// Accepted factors in candidate order; `None` when the spectrum is not
    /// linear over the candidate set.
    pub factors: Option<Vec<ProbeFactor>>,
    /// The weight samples used, as strings.
    pub samples: Vec<String>,
}

impl ProbeReport {
    /// Eigenvalue forms other than `x_1 + ⋯ + x_n`, one entry per unit of
    /// multiplicity.
    pub fn nontrivial_eigenvalues(&self) -> Option<Vec<LinearForm>> {
        let factors = self.factors.as_ref()?;
        let n = factors.first().map_or(0, |f| f.coeffs.len());
        let total = LinearForm::total(n);
        let mut out = Vec::new();
        for f in factors {
            let copies = if f.coeffs == total {
                f.multiplicity - 1
            } else {
                f.multiplicity
            };
            out.extend(std::iter::repeat(f.coeffs.clone()).take(copies));
        }
        Some(out)
    }

    /// Converts a nonlinear outcome into [`Error::CandidateSetExhausted`].
    pub fn into_factors(self) -> Result<Vec<ProbeFactor>> {
        self.factors.ok_or(Error::CandidateSetExhausted)
    }
}

/// Searches for an eigenvalue factorization of the promotion matrix into
/// linear forms with coefficients in `{−1, 0, 1}`.
pub fn probe_linear_spectrum(poset: &Poset, opts: &ProbeOptions) -> Result<ProbeReport> {
    probe_matrix(&transition_matrix(poset, Mode::Promotion)?, opts)
}

/// [`probe_linear_spectrum`] for an arbitrary transition matrix.
///
/// For each of `k` random weight vectors the exact characteristic
/// polynomial is computed; a candidate form gets the smallest root
/// multiplicity it has across the samples. The result is accepted only if
/// the multiplicities account for the full degree and the product of the
/// factors equals the characteristic polynomial at every sample.
pub fn probe_matrix(m: &TransitionMatrix, opts: &ProbeOptions) -> Result<ProbeReport> {
    let n = m.size();
    if n > PROBE_MAX_N {
        return Err(Error::SizeLimitExceeded {
            what: "poset size for probing",
            cap: PROBE_MAX_N,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let samples: Vec<WeightVector> = (0..opts.samples.max(1))
        .map(|_| WeightVector::random(n, &mut rng))
        .collect();
    let sample_text = samples.iter().map(ToString::to_string).collect();
    // (common denominator, integer charpoly) per sample.
    let polys: Vec<(BigRational, Vec<BigInt>)> = samples
        .par_iter()
        .map(|w| {
            let mnum = m.evaluate(w)?;
            let d = mnum.common_denominator().lcm(&w.common_denominator());
            let a = mnum.scaled(&d).expect("common denominator clears entries");
            Ok((BigRational::from_integer(d), exact::char_poly_int(&a)))
        })
        .collect::<Result<_>>()?;
    let dim = m.dim();
    let mut factors: Vec<(LinearForm, usize)> = Vec::new();
    let mut total = 0usize;
    for coeffs in candidates(n) {
        let form = LinearForm::from_integers(&coeffs);
        let mult = samples
            .iter()
            .zip(&polys)
            .map(|(w, (d, cp))| {
                let root = (form.eval(w.values()) * d).to_integer();
                exact::int_root_multiplicity(cp, &root)
            })
            .min()
            .unwrap_or(0);
        if mult > 0 {
            total += mult;
            factors.push((form, mult));
        }
    }
    let linear = total == dim
        && samples.iter().zip(&polys).all(|(w, (d, cp))| {
            let roots: Vec<(BigInt, usize)> = factors
                .iter()
                .map(|(f, k)| ((f.eval(w.values()) * d).to_integer(), *k))
                .collect();
            exact::int_poly_from_roots(&roots) == *cp
        });
    Ok(ProbeReport {
        linear,
        factors: linear.then(|| {
            factors
                .into_iter()
                .map(|(coeffs, multiplicity)| ProbeFactor {
                    form: coeffs.to_string(),
                    coeffs,
                    multiplicity,
                })
                .collect()
        }),
        samples: sample_text,
    })
}

// {−1, 0, 1}^n in odometer order starting from all −1.
fn candidates(n: usize) -> impl Iterator<Item = Vec<i64>> {
    let count = 3usize.pow(n as u32);
    (0..count).map(move |mut k| {
        let mut c = vec![0i64; n];
        for slot in c.iter_mut().rev() {
            *slot = (k % 3) as i64 - 1;
            k /= 3;
        }
        c
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    /// The conjecture's hypothesis: `P` is not a rooted forest.
    pub applies: bool,
    pub linear: bool,
    pub coeffs_pm1: bool,
    pub max_two_successors: bool,
    pub neg_coeff_condition: bool,
    /// Condition (3) with "successor" read as any strictly greater element.
    pub neg_coeff_condition_transitive: bool,
    pub conjecture_consistent: bool,
    pub consistent_transitive: bool,
}

/// Evaluates the three necessary conditions conjectured for posets that are
/// not rooted forests but have linear eigenvalues.
pub fn check_conjecture(poset: &Poset, opts: &ProbeOptions) -> Result<ConjectureReport> {
    let report = probe_linear_spectrum(poset, opts)?;
    Ok(conjecture_from_probe(poset, &report))
}

pub fn conjecture_from_probe(poset: &Poset, report: &ProbeReport) -> ConjectureReport {
    let n = poset.size();
    let factors: &[ProbeFactor] = report.factors.as_deref().unwrap_or(&[]);
    let coeffs_pm1 = factors
        .iter()
        .flat_map(|f| f.coeffs.coeffs())
        .all(|c| c.is_zero() || c.abs().is_one());
    let successors = |i: usize| poset.upper_covers(i).len();
    let max_two_successors = (1..=n).all(|i| successors(i) <= 2);
    let neg_coeff_condition = (1..=n)
        .filter(|&i| factors.iter().any(|f| f.coeffs.coeff(i).is_negative()))
        .all(|i| successors(i) == 2 || poset.upper_covers(i).iter().any(|&j| successors(j) == 2));
    let neg_coeff_condition_transitive = (1..=n)
        .filter(|&i| factors.iter().any(|f| f.coeffs.coeff(i).is_negative()))
        .all(|i| (1..=n).any(|j| poset.le(i, j) && successors(j) == 2));
    let pm1_and_two = coeffs_pm1 && max_two_successors;
    ConjectureReport {
        applies: !poset.is_rooted_forest(),
        linear: report.linear,
        coeffs_pm1,
        max_two_successors,
        neg_coeff_condition,
        neg_coeff_condition_transitive,
        conjecture_consistent: !report.linear || (pm1_and_two && neg_coeff_condition),
        consistent_transitive: !report.linear || (pm1_and_two && neg_coeff_condition_transitive),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::parse_poset;

    fn ints(c: &[i64]) -> LinearForm {
        LinearForm::from_integers(c)
    }

    #[test]
    fn derangement_numbers_small() {
        let l = UpperSetLattice::new(&Poset::antichain(3)).unwrap();
        assert_eq!(derangement_number(&l, &[]).unwrap(), 2);
        assert_eq!(derangement_number(&l, &[1, 2, 3]).unwrap(), 1);
        let c = Poset::chain(4);
        let lc = UpperSetLattice::new(&c).unwrap();
        for s in lc.sets() {
            let expected = i128::from(s.len() == 4);
            assert_eq!(derangement_number(&lc, &s).unwrap(), expected);
        }
        assert!(derangement_number(&lc, &[1]).is_err());
    }

    #[test]
    fn antichain_two_prediction() {
        let pred = predicted_spectrum(&Poset::antichain(2)).unwrap();
        let got: Vec<(Vec<usize>, u64)> =
            pred.items.iter().map(|i| (i.upper_set.clone(), i.multiplicity)).collect();
        assert_eq!(got, vec![(vec![], 1), (vec![1], 0), (vec![2], 0), (vec![1, 2], 1)]);
        assert!(pred.items[1].zero_multiplicity);
        assert_eq!(predicted_spectrum_chains(&Poset::antichain(2)).unwrap(), pred);
    }

    #[test]
    fn chain_plus_point_via_complement_derangements() {
        let p = Poset::union_of_chains(&[2, 1]);
        let pred = predicted_spectrum_chains(&p).unwrap();
        assert_eq!(pred.items.len(), 6);
        assert_eq!(pred.total_multiplicity(), 3);
        assert_eq!(pred, predicted_spectrum(&p).unwrap());
        let rp = parse_poset("4\n1 3\n1 4\n2 3").unwrap();
        assert_eq!(predicted_spectrum_chains(&rp), Err(Error::NotUnionOfChains));
        assert_eq!(predicted_spectrum(&rp), Err(Error::NotRootedForest));
    }

    #[test]
    fn verify_detects_wrong_multiplicity() {
        let p = Poset::antichain(3);
        let pred = predicted_spectrum(&p).unwrap();
        let w = WeightVector::from_ratios(&[(1, 6), (1, 3), (1, 2)]).unwrap();
        assert!(verify_spectrum(&p, &pred, &w).unwrap());
        let mut bad = pred.clone();
        let i = bad.items.iter().position(|i| i.multiplicity == 0).unwrap();
        bad.items[i].multiplicity = 1;
        let j = bad.items.iter().position(|i| i.multiplicity == 2).unwrap();
        bad.items[j].multiplicity = 1;
        assert!(!verify_spectrum(&p, &bad, &w).unwrap());
    }

    #[test]
    fn running_example_probe() {
        let p = parse_poset("4\n1 3\n1 4\n2 3").unwrap();
        let report = probe_linear_spectrum(&p, &ProbeOptions::default()).unwrap();
        let mut got = report.nontrivial_eigenvalues().unwrap();
        got.sort();
        let mut expected =
            vec![ints(&[0, 0, 1, 1]), ints(&[0, 0, 1, 0]), ints(&[0; 4]), ints(&[-1, 0, 0, 0])];
        expected.sort();
        assert_eq!(got, expected);
        let c = conjecture_from_probe(&p, &report);
        assert!(c.applies && c.linear && c.conjecture_consistent && c.neg_coeff_condition);
    }

    #[test]
    fn star_is_nonlinear() {
        let p = parse_poset("4\n1 2\n1 3\n1 4").unwrap();
        let report = probe_linear_spectrum(&p, &ProbeOptions::default()).unwrap();
        assert!(!report.linear);
        assert_eq!(report.samples.len(), 4);
        assert_eq!(report.into_factors(), Err(Error::CandidateSetExhausted));
    }

    #[test]
    fn candidate_order() {
        let c: Vec<Vec<i64>> = candidates(2).collect();
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], vec![-1, -1]);
        assert_eq!(c[8], vec![1, 1]);
    }
}
