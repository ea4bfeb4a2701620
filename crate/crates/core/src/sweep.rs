//! Exhaustive verification sweeps over poset families.
//!
//! Each poset is checked independently with a random source derived from the
//! sweep seed and the poset encoding, so reports do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{normalized_product_weights, partition_function, stationary_solve, transition_matrix, PartitionMode};
use crate::error::{Error, Result};
use crate::families::iso_distinct_posets;
use crate::mixing::check_convergence_bound;
use crate::monoid::{check_statistic, generate_monoid, generators_of, Product, DEFAULT_MONOID_CAP};
use crate::poset::Poset;
use crate::promotion::{build_promotion_graph, is_strongly_connected, Mode, PromotionSystem};
use crate::spectral::{
    check_conjecture, predicted_spectrum, predicted_spectrum_chains, verify_spectrum_report, ProbeOptions,
    VerifyOptions,
};
use crate::weights::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    All,
    RootedForests,
    NonForests,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Family::All),
            "rooted-forests" => Ok(Family::RootedForests),
            "non-forests" => Ok(Family::NonForests),
            _ => Err(Error::malformed(0, format!("unknown family {s:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::All => "all",
            Family::RootedForests => "rooted-forests",
            Family::NonForests => "non-forests",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_max: usize,
    pub family: Family,
    pub seed: u64,
    /// Random weight vectors per poset.
    pub samples: usize,
    pub monoid_n_max: usize,
    pub statistic_n_max: usize,
    pub mixing_n_max: usize,
    pub conjecture_n_max: usize,
    #[serde(skip)]
    pub verify: VerifyOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_max: 5,
            family: Family::All,
            seed: 0,
            samples: 3,
            monoid_n_max: 6,
            statistic_n_max: 5,
            mixing_n_max: 4,
            conjecture_n_max: 5,
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetResult {
    pub encoding: String,
    pub n: usize,
    pub rooted_forest: bool,
    pub extensions: usize,
    pub checks: Vec<CheckResult>,
    /// Whether the exact distance decayed monotonically in the mixing check.
    /// Recorded, not asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_monotone: Option<bool>,
    /// The conjecture for non-forests under the cover and the transitive
    /// reading of "successor". Recorded, not asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjecture: Option<(bool, bool)>,
}

impl PosetResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub posets: Vec<PosetResult>,
    /// Check name to `(passed, total)`.
    pub summary: BTreeMap<&'static str, (usize, usize)>,
    /// Encodings of linear non-forests violating the conjecture as stated.
    pub conjecture_counterexamples: Vec<String>,
    pub all_passed: bool,
}

impl SweepReport {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!("sweep n_max={} family={} seed={} samples={}\n", c.n_max, c.family, c.seed, c.samples);
        for p in &self.posets {
            out.push_str(&format!(
                "{} forest={} extensions={}",
                p.encoding,
                if p.rooted_forest { "yes" } else { "no" },
                p.extensions
            ));
            for check in &p.checks {
                out.push_str(&format!(" {}={}", check.name, if check.passed { "pass" } else { "FAIL" }));
            }
            if p.tv_monotone == Some(false) {
                out.push_str(" tv-monotone=no");
            }
            match p.conjecture {
                Some((true, _)) => out.push_str(" conjecture=consistent"),
                Some((false, transitive)) => out.push_str(if transitive {
                    " conjecture=counterexample(transitive-reading=consistent)"
                } else {
                    " conjecture=counterexample(transitive-reading=counterexample)"
                }),
                None => {}
            }
            out.push('\n');
        }
        for (name, (passed, total)) in &self.summary {
            out.push_str(&format!("{name}: {passed}/{total}\n"));
        }
        let checked = self.posets.iter().filter(|p| p.conjecture.is_some()).count();
        out.push_str(&format!(
            "conjecture counterexamples: {}/{}\n",
            self.conjecture_counterexamples.len(),
            checked
        ));
        out.push_str(if self.all_passed { "result: PASS\n" } else { "result: FAIL\n" });
        out
    }
}

/// The posets a sweep visits, sorted by encoding.
pub fn sweep_posets(config: &SweepConfig) -> Vec<Poset> {
    let mut posets: Vec<Poset> = (1..=config.n_max)
        .flat_map(iso_distinct_posets)
        .filter(|p| match config.family {
            Family::All => true,
            Family::RootedForests => p.is_rooted_forest(),
            Family::NonForests => !p.is_rooted_forest(),
        })
        .collect();
    posets.sort_by_key(Poset::encoding);
    posets
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let posets = sweep_posets(config);
    let mut results: Vec<PosetResult> = posets
        .par_iter()
        .map(|p| check_poset(p, config))
        .collect::<Result<_>>()?;
    results.sort_by(|a, b| a.encoding.cmp(&b.encoding));
    let mut summary: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
    for r in &results {
        for c in &r.checks {
            let entry = summary.entry(c.name).or_default();
            entry.0 += usize::from(c.passed);
            entry.1 += 1;
        }
    }
    let all_passed = results.iter().all(PosetResult::passed);
    let conjecture_counterexamples = results
        .iter()
        .filter(|r| matches!(r.conjecture, Some((false, _))))
        .map(|r| r.encoding.clone())
        .collect();
    Ok(SweepReport {
        config: *config,
        posets: results,
        summary,
        conjecture_counterexamples,
        all_passed,
    })
}

fn poset_rng(seed: u64, encoding: &str) -> ChaCha8Rng {
    // FNV-1a of the encoding.
    let stream = encoding
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs every applicable check on one poset.
pub fn check_poset(poset: &Poset, config: &SweepConfig) -> Result<PosetResult> {
    let encoding = poset.encoding();
    let n = poset.size();
    let forest = poset.is_rooted_forest();
    let mut rng = poset_rng(config.seed, &encoding);
    let weights: Vec<WeightVector> = (0..config.samples)
        .map(|_| WeightVector::random_normalized(n, &mut rng))
        .collect();
    let system = PromotionSystem::from_poset(poset)?;
    let size = system.len();
    let mut checks = Vec::new();
    let mut push = |name: &'static str, passed: bool| checks.push(CheckResult { name, passed });

    push("strongly-connected", is_strongly_connected(&build_promotion_graph(poset, Mode::Promotion)?));

    let promotion = transition_matrix(poset, Mode::Promotion)?;
    let mut stationary = true;
    for w in &weights {
        let solved = stationary_solve(&promotion.evaluate(w)?)?;
        stationary &= solved == normalized_product_weights(system.states(), w)?;
    }
    push("stationary-promotion", stationary);

    let uniform = transition_matrix(poset, Mode::Uniform)?;
    let mut flat = true;
    let expected = BigRational::new(BigInt::from(1), BigInt::from(size));
    for w in &weights {
        flat &= stationary_solve(&uniform.evaluate(w)?)?.iter().all(|x| *x == expected);
    }
    push("stationary-uniform", flat);

    let mut tv_monotone = None;
    let mut conjecture = None;
    if forest {
        let mut z = true;
        for w in &weights {
            z &= partition_function(poset, w, PartitionMode::Formula)? == partition_function(poset, w, PartitionMode::Brute)?;
        }
        push("partition-function", z);

        let pred = predicted_spectrum(poset)?;
        let mut spectrum = pred.total_multiplicity() == size as u64;
        for (k, w) in weights.iter().enumerate() {
            let opts = VerifyOptions {
                seed: config.seed.wrapping_add(k as u64),
                ..config.verify
            };
            spectrum &= verify_spectrum_report(poset, &pred, w, &opts)?.matches;
        }
        push("spectrum", spectrum);

        if let Ok(chains) = predicted_spectrum_chains(poset) {
            let mut a = chains.factors();
            let mut b = pred.factors();
            a.sort();
            b.sort();
            push("chain-multiplicities", a == b);
        }

        if n <= config.monoid_n_max {
            let gens = generators_of(&system);
            let matrix = generate_monoid(&gens, DEFAULT_MONOID_CAP, Product::Matrix)?;
            push("r-trivial", matrix.is_r_trivial());
            let action = generate_monoid(&gens, DEFAULT_MONOID_CAP, Product::Action)?;
            push("dual-l-trivial", action.is_l_trivial());
            if n <= config.statistic_n_max {
                let stat = check_statistic(&matrix, &system);
                push("statistic", stat.monotone && stat.strict_descent);
            }
        }

        if n <= config.mixing_n_max {
            let w = WeightVector::random_with_floor(n, 8, &mut rng);
            let check = check_convergence_bound(poset, &w, None)?;
            push("mixing-bound", check.all_hold);
            tv_monotone = Some(check.monotone);
        }
    } else if n <= config.conjecture_n_max {
        let opts = ProbeOptions {
            seed: config.seed,
            ..ProbeOptions::default()
        };
        let report = check_conjecture(poset, &opts)?;
        conjecture = Some((report.conjecture_consistent, report.consistent_transitive));
    }

    Ok(PosetResult {
        encoding,
        n,
        rooted_forest: forest,
        extensions: size,
        checks,
        tv_monotone,
        conjecture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes_and_is_sorted() {
        let config = SweepConfig {
            n_max: 3,
            ..SweepConfig::default()
        };
        let report = run_sweep(&config).unwrap();
        assert!(report.all_passed, "{}", report.to_text());
        assert_eq!(report.posets.len(), 1 + 2 + 5);
        let enc: Vec<&str> = report.posets.iter().map(|p| p.encoding.as_str()).collect();
        let mut sorted = enc.clone();
        sorted.sort();
        assert_eq!(enc, sorted);
        assert_eq!(report.to_text(), run_sweep(&config).unwrap().to_text());
    }

    #[test]
    fn family_filters() {
        let forests = SweepConfig {
            n_max: 4,
            family: Family::RootedForests,
            ..SweepConfig::default()
        };
        assert!(sweep_posets(&forests).iter().all(Poset::is_rooted_forest));
        let others = SweepConfig {
            family: Family::NonForests,
            ..forests
        };
        assert!(sweep_posets(&others).iter().all(|p| !p.is_rooted_forest()));
        assert_eq!("non-forests".parse::<Family>().unwrap(), Family::NonForests);
        assert!("trees".parse::<Family>().is_err());
    }
}
