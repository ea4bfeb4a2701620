//! Exact `k`-step distributions, total variation, the convergence bound and
//! seeded random walks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{stationary_solve, transition_matrix};
use crate::error::{Error, Result};
use crate::exact::RatMatrix;
use crate::linear_form::RationalJson;
use crate::poset::Poset;
use crate::promotion::{Mode, PromotionSystem};
use crate::weights::WeightVector;

/// A probability vector with exact entries over a fixed basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    probs: Vec<BigRational>,
}

impl Distribution {
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        if probs.iter().any(Signed::is_negative) || !probs.iter().sum::<BigRational>().is_one() {
            return Err(Error::InvalidWeights("not a probability vector".into()));
        }
        Ok(Distribution { probs })
    }

    pub fn point_mass(dim: usize, at: usize) -> Self {
        let mut probs = vec![BigRational::zero(); dim];
        probs[at] = BigRational::one();
        Distribution { probs }
    }

    pub fn uniform(dim: usize) -> Self {
        Distribution {
            probs: vec![BigRational::new(BigInt::one(), BigInt::from(dim)); dim],
        }
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `M^k · init`.
pub fn power_distribution(m: &RatMatrix, init: &Distribution, k: u64) -> Result<Distribution> {
    if init.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: init.len(),
        });
    }
    let mut v = init.probs.clone();
    for _ in 0..k {
        v = m.mul_vec(&v);
    }
    Ok(Distribution { probs: v })
}

/// `½ Σ |p_i − q_i|`.
pub fn total_variation(p: &[BigRational], q: &[BigRational]) -> Result<BigRational> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let sum: BigRational = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / BigRational::from_integer(2.into()))
}

/// `exp(−(k p − (n² − 1))² / (2 k p))` once `k ≥ (n² − 1)/p`; `None` below
/// that threshold.
pub fn convergence_bound(n: usize, p_x: &BigRational, k: u64) -> Result<Option<f64>> {
    Ok(bound_exponent(n, p_x, k)?.map(|e| (-e).exp()))
}

// The exponent (k p − (n² − 1))² / (2 k p), evaluated exactly and rounded.
fn bound_exponent(n: usize, p_x: &BigRational, k: u64) -> Result<Option<f64>> {
    if !p_x.is_positive() {
        return Err(Error::NonPositiveRate);
    }
    let kp = p_x * BigRational::from_integer(k.into());
    let offset = BigRational::from_integer((n * n - 1).into());
    if kp < offset || k == 0 {
        return Ok(None);
    }
    let a = &kp - offset;
    let e = &a * &a / (kp * BigRational::from_integer(2.into()));
    Ok(Some(e.to_f64().expect("finite exponent")))
}

/// `2 (n² + c − 1) / p_x`.
pub fn mixing_time_upper(n: usize, p_x: &BigRational, c: u64) -> Result<BigRational> {
    if !p_x.is_positive() {
        return Err(Error::NonPositiveRate);
    }
    let top = BigRational::from_integer((2 * (n as u64 * n as u64 + c - 1)).into());
    Ok(top / p_x)
}

/// One step of the bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: u64,
    /// Largest exact distance over all point-mass starts.
    #[serde(serialize_with = "ser_rational")]
    pub tv_exact: BigRational,
    pub tv: f64,
    pub bound: Option<f64>,
    /// `None` below the threshold, otherwise whether `tv ≤ bound`.
    pub holds: Option<bool>,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&RationalJson(v), s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub weights: String,
    pub k_max: u64,
    pub rows: Vec<BoundRow>,
    /// Every applicable row satisfies the bound.
    pub all_hold: bool,
    /// The distance never increased from one step to the next.
    pub monotone: bool,
}

impl BoundCheck {
    /// `k,tv_exact,bound` with one row per step; the bound column is empty
    /// below the threshold.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,tv_exact,bound\n");
        for r in &self.rows {
            let bound = r.bound.map(|b| format!("{b:e}")).unwrap_or_default();
            out.push_str(&format!("{},{:e},{}\n", r.k, r.tv, bound));
        }
        out
    }
}

/// Relative slack subtracted from the float bound before the exact
/// comparison.
const BOUND_MARGIN: f64 = 1e-12;

/// Checks the convergence bound for the promotion chain of `P` at every
/// `k ≤ k_max` from every point-mass start. `k_max` defaults to twice the
/// `c = 1` mixing-time bound.
pub fn check_convergence_bound(poset: &Poset, w: &WeightVector, k_max: Option<u64>) -> Result<BoundCheck> {
    if !w.is_positive() || !w.is_normalized() {
        return Err(Error::InvalidWeights("weights must be positive and sum to 1".into()));
    }
    let n = poset.size();
    let p_x = w.min().clone();
    let k_max = match k_max {
        Some(k) => k,
        None => (mixing_time_upper(n, &p_x, 1)? * BigRational::from_integer(2.into()))
            .ceil()
            .to_integer()
            .to_u64()
            .ok_or(Error::SizeLimitExceeded {
                what: "step count",
                cap: usize::MAX,
            })?,
    };
    let m = transition_matrix(poset, Mode::Promotion)?.evaluate(w)?;
    let stationary = stationary_solve(&m)?;
    let dim = m.dim();
    let (d, a) = m.to_integer_matrix();
    // stationary[i] = s[i] / s_den.
    let s_den = stationary.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let s: Vec<BigInt> = stationary
        .iter()
        .map(|x| (x * BigRational::from_integer(s_den.clone())).to_integer())
        .collect();
    // v[start][i] = D^k · P^k(start → i).
    let mut v: Vec<Vec<BigInt>> = (0..dim)
        .map(|start| {
            let mut e = vec![BigInt::zero(); dim];
            e[start] = BigInt::one();
            e
        })
        .collect();
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        if k > 0 {
            for vec in v.iter_mut() {
                let mut next = vec![BigInt::zero(); dim];
                for (c, x) in vec.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (r, entry) in a.column(c) {
                        next[*r] += entry * x;
                    }
                }
                *vec = next;
            }
            scale *= &d;
        }
        // 2·TV·scale·s_den = Σ |v_i s_den − s_i scale|.
        let worst = v
            .iter()
            .map(|vec| {
                vec.iter()
                    .zip(&s)
                    .map(|(x, si)| (x * &s_den - si * &scale).abs())
                    .sum::<BigInt>()
            })
            .max()
            .unwrap_or_else(BigInt::zero);
        let tv_exact = BigRational::new(worst, BigInt::from(2) * &scale * &s_den);
        let exponent = bound_exponent(n, &p_x, k)?;
        let bound = exponent.map(|e| (-e).exp());
        let holds = exponent.map(|e| tv_within_bound(&tv_exact, e));
        rows.push(BoundRow {
            k,
            tv: tv_exact.to_f64().unwrap_or(f64::NAN),
            tv_exact,
            bound,
            holds,
        });
    }
    let all_hold = rows.iter().all(|r| r.holds != Some(false));
    let monotone = rows.windows(2).all(|p| p[1].tv_exact <= p[0].tv_exact);
    Ok(BoundCheck {
        n,
        weights: w.to_string(),
        k_max,
        rows,
        all_hold,
        monotone,
    })
}

// tv ≤ exp(−e), tested exactly against a slightly smaller rational bound, or
// in log space when the bound underflows.
fn tv_within_bound(tv: &BigRational, e: f64) -> bool {
    if tv.is_zero() {
        return true;
    }
    let bound = (-e).exp() * (1.0 - BOUND_MARGIN);
    if bound >= f64::MIN_POSITIVE {
        let b = BigRational::from_float(bound).expect("finite bound");
        return *tv <= b;
    }
    ln_big(tv.numer()) - ln_big(tv.denom()) <= -e - BOUND_MARGIN * e.max(1.0)
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_f64().expect("fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Output of [`simulate_walk`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Walk {
    /// State indices (lexicographic basis), starting at the identity.
    pub trajectory: Vec<usize>,
    pub empirical: Vec<f64>,
}

/// Runs the promotion chain: at each step draw a label `i` with probability
/// `w_i` and apply `∂̂_i`. Uses ChaCha8 seeded with `seed`.
pub fn simulate_walk(poset: &Poset, w: &WeightVector, steps: usize, seed: u64) -> Result<Walk> {
    if w.len() != poset.size() {
        return Err(Error::DimensionMismatch {
            expected: poset.size(),
            found: w.len(),
        });
    }
    if !w.is_positive() || !w.is_normalized() {
        return Err(Error::InvalidWeights("weights must be positive and sum to 1".into()));
    }
    let system = PromotionSystem::from_poset(poset)?;
    let (_, ints) = w.scaled_integers();
    let ints: Vec<u64> = ints
        .iter()
        .map(|x| x.to_u64().ok_or_else(|| Error::InvalidWeights("weight denominators too large".into())))
        .collect::<Result<_>>()?;
    let picker = WeightedIndex::new(&ints).map_err(|e| Error::InvalidWeights(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = 0usize;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(state);
    let mut counts = vec![0u64; system.len()];
    for _ in 0..steps {
        let label = picker.sample(&mut rng) + 1;
        state = system.hat(state, label);
        counts[state] += 1;
        trajectory.push(state);
    }
    let empirical = if steps == 0 {
        let mut e = vec![0.0; system.len()];
        e[0] = 1.0;
        e
    } else {
        counts.iter().map(|&c| c as f64 / steps as f64).collect()
    };
    Ok(Walk { trajectory, empirical })
}
