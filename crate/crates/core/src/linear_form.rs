use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// A formal linear combination `Σ c_i x_i` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<BigRational>,
}

impl LinearForm {
    pub fn zero(n: usize) -> Self {
        LinearForm {
            coeffs: vec![BigRational::zero(); n],
        }
    }

    /// The single variable `x_k` (1-based).
    pub fn var(n: usize, k: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[k - 1] = BigRational::one();
        f
    }

    /// `x_S = Σ_{i ∈ S} x_i`.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut f = Self::zero(n);
        for &i in set {
            f.coeffs[i - 1] += BigRational::one();
        }
        f
    }

    /// `x_1 + ⋯ + x_n`.
    pub fn total(n: usize) -> Self {
        Self::indicator(n, &(1..=n).collect::<Vec<_>>())
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        LinearForm {
            coeffs: coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        LinearForm { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Integer coefficients, if all coefficients are integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn scale(&self, by: &BigRational) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| c * by).collect(),
        }
    }

    /// Substitutes `x_i = values[i - 1]`.
    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        assert_eq!(values.len(), self.coeffs.len(), "weight vector length");
        self.coeffs
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }

    pub fn eval_integers(&self, values: &[BigInt]) -> BigRational {
        let values: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
        self.eval(&values)
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LinearForm> for LinearForm {
    fn add_assign(&mut self, rhs: &LinearForm) {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "linear form length");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        self + &(-rhs)
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Renders as `x1+x2`, `x4-x1`, `-x1-x2`, `2x3`, `1/2x1` or `0`. Positive
/// terms are written before negative ones.
impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i + 1, c))
            .collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let ordered = terms
            .iter()
            .filter(|(_, c)| c.is_positive())
            .chain(terms.iter().filter(|(_, c)| c.is_negative()));
        let mut first = true;
        for (k, c) in ordered {
            let mag = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "x{k}")?;
            first = false;
        }
        Ok(())
    }
}

/// Serializes the coefficient vector; integral coefficients become JSON
/// integers, others strings like `"1/2"`.
impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&RationalJson(c))?;
        }
        seq.end()
    }
}

pub(crate) struct RationalJson<'a>(pub &'a BigRational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        if self.0.is_integer() {
            if let Some(v) = self.0.to_integer().to_i64() {
                return serializer.serialize_i64(v);
            }
        }
        serializer.serialize_str(&self.0.to_string())
    }
}
