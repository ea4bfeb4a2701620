//! Exact weight vectors `(x_1, …, x_n)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest numerator or denominator drawn by [`WeightVector::random`].
pub const SAMPLE_BOUND: i64 = 97;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    w: Vec<BigRational>,
}

impl WeightVector {
    pub fn new(w: Vec<BigRational>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        Ok(WeightVector { w })
    }

    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self> {
        if ratios.iter().any(|&(_, d)| d == 0) {
            return Err(Error::InvalidWeights("zero denominator".into()));
        }
        Self::new(
            ratios
                .iter()
                .map(|&(a, b)| BigRational::new(a.into(), b.into()))
                .collect(),
        )
    }

    /// `x_i = 1/n` for all `i`.
    pub fn uniform(n: usize) -> Self {
        WeightVector {
            w: vec![BigRational::new(BigInt::one(), BigInt::from(n)); n],
        }
    }

    /// The unit vector `e_k` (1-based).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut w = vec![BigRational::zero(); n];
        w[k - 1] = BigRational::one();
        WeightVector { w }
    }

    /// Parses `"1/4,1/4,1/2"` or `"uniform"` (which needs `n`). Decimal
    /// notation is rejected so that exact commands stay exact.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("uniform") {
            return Ok(Self::uniform(n));
        }
        let w = text
            .split(',')
            .map(|t| {
                let t = t.trim();
                if t.contains(['.', 'e', 'E']) {
                    return Err(Error::InvalidWeights(format!(
                        "{t:?}: floating-point weights are not accepted, write a fraction"
                    )));
                }
                let (num, den) = match t.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (t, "1"),
                };
                let num: BigInt = num
                    .parse()
                    .map_err(|_| Error::InvalidWeights(format!("bad numerator in {t:?}")))?;
                let den: BigInt = den
                    .parse()
                    .map_err(|_| Error::InvalidWeights(format!("bad denominator in {t:?}")))?;
                if den.is_zero() {
                    return Err(Error::InvalidWeights(format!("zero denominator in {t:?}")));
                }
                Ok(BigRational::new(num, den))
            })
            .collect::<Result<Vec<_>>>()?;
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        Self::new(w)
    }

    /// Random positive weights `a_i / b_i` with `1 ≤ a_i, b_i ≤ 97` and
    /// pairwise distinct values. Not normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut w: Vec<BigRational> = Vec::with_capacity(n);
        while w.len() < n {
            let a = rng.gen_range(1..=SAMPLE_BOUND);
            let b = rng.gen_range(1..=SAMPLE_BOUND);
            let v = BigRational::new(a.into(), b.into());
            if !w.contains(&v) {
                w.push(v);
            }
        }
        WeightVector { w }
    }

    /// Random probability vector `a_i / Σ a` with distinct integers
    /// `1 ≤ a_i ≤ 97`.
    pub fn random_normalized<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n as i64 <= SAMPLE_BOUND, "too many weights for distinct sampling");
        let mut a: Vec<i64> = Vec::with_capacity(n);
        while a.len() < n {
            let v = rng.gen_range(1..=SAMPLE_BOUND);
            if !a.contains(&v) {
                a.push(v);
            }
        }
        let total: i64 = a.iter().sum();
        WeightVector {
            w: a.iter().map(|&v| BigRational::new(v.into(), total.into())).collect(),
        }
    }

    /// Random probability vector with every entry at least `1/floor_den`,
    /// with entries `a_i / (floor_den · n)`.
    pub fn random_with_floor<R: Rng + ?Sized>(n: usize, floor_den: usize, rng: &mut R) -> Self {
        assert!(floor_den >= n, "floor 1/{floor_den} is infeasible for {n} weights");
        let total = floor_den * n;
        // Each entry gets at least n / total = 1/floor_den; distribute the rest.
        let mut parts = vec![n; n];
        let mut rest = total - n * n;
        let mut order: Vec<usize> = (0..n).collect();
        while rest > 0 {
            order.shuffle(rng);
            let take = rng.gen_range(1..=rest);
            parts[order[0]] += take;
            rest -= take;
        }
        WeightVector {
            w: parts
                .iter()
                .map(|&a| BigRational::new(a.into(), total.into()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.w
    }

    pub fn get(&self, k: usize) -> &BigRational {
        &self.w[k - 1]
    }

    pub fn total(&self) -> BigRational {
        self.w.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.w.iter().all(Signed::is_positive)
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        if t.is_zero() {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        Ok(WeightVector {
            w: self.w.iter().map(|x| x / &t).collect(),
        })
    }

    /// `min_i x_i`.
    pub fn min(&self) -> &BigRational {
        self.w.iter().min().expect("nonempty")
    }

    /// Least common multiple of the denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// The weights scaled by [`WeightVector::common_denominator`], as integers.
    pub fn scaled_integers(&self) -> (BigInt, Vec<BigInt>) {
        let d = self.common_denominator();
        let ints = self
            .w
            .iter()
            .map(|x| (x * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        (d, ints)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}
