//! Exact linear algebra over `ℚ`: sparse rational matrices, characteristic
//! polynomials and stationary vectors.
//!
//! The heavy lifting is done modulo word-size primes (Montgomery arithmetic)
//! and lifted back with the Chinese remainder theorem. Characteristic
//! polynomials are certified by a coefficient bound; stationary vectors are
//! recovered by rational reconstruction and then checked exactly over `ℚ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Square matrix with exact rational entries, stored sparsely by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    dim: usize,
    // cols[c] = sorted (row, value) with value != 0.
    cols: Vec<Vec<(usize, BigRational)>>,
}

impl RatMatrix {
    pub fn zeros(dim: usize) -> Self {
        RatMatrix {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        RatMatrix {
            dim,
            cols: (0..dim).map(|c| vec![(c, BigRational::one())]).collect(),
        }
    }

    pub fn from_dense(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        let mut cols = vec![Vec::new(); dim];
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (c, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    cols[c].push((r, v));
                }
            }
        }
        Ok(RatMatrix { dim, cols })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Builds from per-column entries; duplicate rows within a column are summed.
    pub fn from_column_entries(dim: usize, cols: Vec<Vec<(usize, BigRational)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut col| {
                col.sort_by_key(|(r, _)| *r);
                let mut merged: Vec<(usize, BigRational)> = Vec::with_capacity(col.len());
                for (r, v) in col {
                    match merged.last_mut() {
                        Some((lr, lv)) if *lr == r => *lv += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|(_, v)| !v.is_zero());
                merged
            })
            .collect();
        RatMatrix { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, c: usize) -> &[(usize, BigRational)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.cols[c]
            .binary_search_by_key(&r, |(row, _)| *row)
            .map(|i| self.cols[c][i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<BigRational>> {
        let mut rows = vec![vec![BigRational::zero(); self.dim]; self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                rows[*r][c] = v.clone();
            }
        }
        rows
    }

    pub fn column_sums(&self) -> Vec<BigRational> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|(_, v)| v).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<BigRational> {
        let mut sums = vec![BigRational::zero(); self.dim];
        for col in &self.cols {
            for (r, v) in col {
                sums[*r] += v;
            }
        }
        sums
    }

    pub fn is_column_stochastic(&self) -> bool {
        self.cols
            .iter()
            .all(|col| col.iter().all(|(_, v)| !v.is_negative()))
            && self.column_sums().iter().all(One::is_one)
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut out = vec![BigRational::zero(); self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for (r, m) in col {
                out[*r] += m * &v[c];
            }
        }
        out
    }

    /// Returns `(d, A)` with `A = d·M` integral and `d` the least common
    /// denominator of the entries.
    pub fn to_integer_matrix(&self) -> (BigInt, IntMatrix) {
        let d = self.common_denominator();
        let a = self.scaled(&d).expect("lcm clears every denominator");
        (d, a)
    }

    /// Least common multiple of the entry denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.cols
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()))
    }

    /// `d·M` as an integer matrix, or `None` if some entry stays fractional.
    pub fn scaled(&self, d: &BigInt) -> Option<IntMatrix> {
        let dr = BigRational::from_integer(d.clone());
        let cols = self
            .cols
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(r, v)| {
                        let s = v * &dr;
                        s.is_integer().then(|| (*r, s.to_integer()))
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix { dim: self.dim, cols })
    }
}

/// Square integer matrix, stored sparsely by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    cols: Vec<Vec<(usize, BigInt)>>,
}

impl IntMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, c: usize) -> &[(usize, BigInt)] {
        &self.cols[c]
    }

    /// Largest absolute column sum; bounds every eigenvalue in modulus.
    pub fn max_abs_column_sum(&self) -> BigInt {
        self.cols
            .iter()
            .map(|col| col.iter().map(|(_, v)| v.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    fn to_dense_mod(&self, m: &Montgomery) -> Vec<u64> {
        let mut a = vec![0u64; self.dim * self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                a[r * self.dim + c] = m.to_mont(reduce_bigint(v, m.p));
            }
        }
        a
    }
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// `∏ (λ − r)^m`.
    pub fn from_roots(roots: &[(BigRational, usize)]) -> Self {
        let mut coeffs = vec![BigRational::one()];
        for (r, m) in roots {
            for _ in 0..*m {
                let mut next = vec![BigRational::zero(); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * r;
                }
                coeffs = next;
            }
        }
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Largest `m` such that `(λ − r)^m` divides the polynomial.
    pub fn root_multiplicity(&self, r: &BigRational) -> usize {
        let mut m = 0;
        let mut cur = self.coeffs.clone();
        while cur.len() > 1 {
            // Synthetic division by (λ − r).
            let mut quotient = vec![BigRational::zero(); cur.len() - 1];
            let mut acc = BigRational::zero();
            for k in (0..cur.len()).rev() {
                acc = acc * r + &cur[k];
                if k > 0 {
                    quotient[k - 1] = acc.clone();
                }
            }
            if !acc.is_zero() {
                break;
            }
            m += 1;
            cur = quotient;
        }
        m
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(first && k == 0) {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                f.write_str(if first { "-" } else { " - " })?;
            } else if !first {
                f.write_str(" + ")?;
            }
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("λ")?,
                _ => write!(f, "λ^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `det(λI − M)`, computed exactly.
///
/// `M` is scaled to an integer matrix `A = dM`; the characteristic
/// polynomial of `A` is computed modulo enough primes that the product of
/// the moduli exceeds twice the coefficient bound `(1 + B)^N`, where `B`
/// bounds the spectral radius, and then lifted. Finally `λ ↦ dλ` is undone.
pub fn char_poly(m: &RatMatrix) -> Polynomial {
    let n = m.dim();
    let (d, a) = m.to_integer_matrix();
    // c_k is the coefficient of μ^k for A; for M it is c_k · d^{k−N}.
    let coeffs = char_poly_int(&a)
        .into_iter()
        .enumerate()
        .map(|(k, c)| BigRational::new(c, num_traits::pow(d.clone(), n - k)))
        .collect();
    Polynomial::new(coeffs)
}

/// `det(μI − A)` for an integer matrix, lowest degree first.
pub fn char_poly_int(a: &IntMatrix) -> Vec<BigInt> {
    let n = a.dim();
    let bound_bits = charpoly_bound_bits(a, &BigInt::zero());
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for p in certified_primes() {
        if modulus.bits() > bound_bits {
            break;
        }
        let mont = Montgomery::new(p);
        let cp = charpoly_mod(&a.to_dense_mod(&mont), n, &mont);
        crt_accumulate(&mut acc, &mut modulus, &cp, p);
    }
    let half = &modulus >> 1;
    acc.into_iter()
        .map(|c| if c > half { c - &modulus } else { c })
        .collect()
}

/// Largest `m` with `(μ − r)^m` dividing the integer polynomial `coeffs`.
pub fn int_root_multiplicity(coeffs: &[BigInt], r: &BigInt) -> usize {
    let mut m = 0;
    let mut cur = coeffs.to_vec();
    while cur.len() > 1 {
        let mut quotient = vec![BigInt::zero(); cur.len() - 1];
        let mut acc = BigInt::zero();
        for k in (0..cur.len()).rev() {
            acc = acc * r + &cur[k];
            if k > 0 {
                quotient[k - 1] = acc.clone();
            }
        }
        if !acc.is_zero() {
            break;
        }
        m += 1;
        cur = quotient;
    }
    m
}

/// Coefficients of `∏ (μ − r)^m`, lowest degree first.
pub fn int_poly_from_roots(roots: &[(BigInt, usize)]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for (r, m) in roots {
        for _ in 0..*m {
            let mut next = vec![BigInt::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
    }
    coeffs
}

/// How a modular identity check was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Certainty {
    /// Enough primes were used that agreement modulo all of them forces
    /// equality of the integer polynomials.
    Exact { primes: usize },
    /// Agreement modulo this many independently drawn random 62-bit primes.
    Probabilistic { primes: usize },
}

/// Default work budget (in modular multiply-adds) for certified checks.
pub const CERTIFIED_WORK_BUDGET: f64 = 4.0e9;

/// Compares `det(μI − A)` with `∏ (μ − r)^m` for an integer matrix `A` and
/// integer roots.
///
/// Uses a certified prime set when its cost fits the budget; otherwise falls
/// back to `random_primes` randomly drawn primes.
pub fn charpoly_equals_roots<R: Rng + ?Sized>(
    a: &IntMatrix,
    roots: &[(BigInt, usize)],
    budget: f64,
    random_primes: usize,
    rng: &mut R,
) -> (bool, Certainty) {
    let n = a.dim();
    if roots.iter().map(|(_, m)| m).sum::<usize>() != n {
        return (false, Certainty::Exact { primes: 0 });
    }
    let max_root = roots.iter().map(|(r, _)| r.abs()).max().unwrap_or_else(BigInt::zero);
    let bits = charpoly_bound_bits(a, &max_root);
    let primes_needed = (bits / 61 + 1) as usize;
    let cost = primes_needed as f64 * (n as f64).powi(3);
    let primes: Vec<u64> = if cost <= budget {
        certified_primes().take(primes_needed).collect()
    } else {
        (0..random_primes).map(|_| random_prime(rng)).collect()
    };
    let certainty = if cost <= budget {
        Certainty::Exact { primes: primes.len() }
    } else {
        Certainty::Probabilistic { primes: primes.len() }
    };
    for &p in &primes {
        let mont = Montgomery::new(p);
        let cp = charpoly_mod(&a.to_dense_mod(&mont), n, &mont);
        let mut predicted = vec![mont.to_mont(1)];
        for (r, m) in roots {
            let r = mont.to_mont(reduce_bigint(r, p));
            for _ in 0..*m {
                predicted.push(0);
                for k in (0..predicted.len()).rev() {
                    let lower = if k > 0 { predicted[k - 1] } else { 0 };
                    let shifted = mont.sub(lower, mont.mul(predicted[k], r));
                    predicted[k] = shifted;
                }
            }
        }
        let predicted: Vec<u64> = predicted.iter().map(|&c| mont.from_mont(c)).collect();
        if predicted != cp {
            return (false, certainty);
        }
    }
    (true, certainty)
}

// Bits of 2·(1 + max(B, R))^N, bounding both polynomials' coefficients.
fn charpoly_bound_bits(a: &IntMatrix, max_root: &BigInt) -> u64 {
    let b = a.max_abs_column_sum().max(max_root.clone()) + 1u32;
    b.bits() * a.dim() as u64 + 2
}

/// Solves `M v = v` for a column-stochastic `M`, returning the unique
/// stationary probability vector.
///
/// The system is solved with `v_0 = 1` modulo successive primes; each entry
/// is lifted by CRT and rational reconstruction, and the candidate is
/// accepted only once `Mv = v` holds exactly. A full-rank reduction modulo a
/// prime implies the kernel over `ℚ` is one-dimensional, so the answer is
/// unique.
pub fn stationary_vector(m: &RatMatrix) -> Result<Vec<BigRational>> {
    if !m.is_column_stochastic() {
        return Err(Error::NotStochastic);
    }
    let n = m.dim();
    if n == 1 {
        return Ok(vec![BigRational::one()]);
    }
    let mut modulus = BigInt::one();
    let mut acc = vec![BigInt::zero(); n];
    let mut singular_primes = 0;
    for p in certified_primes() {
        let mont = Montgomery::new(p);
        let Some(a) = dense_mod_minus_identity(m, &mont) else {
            continue;
        };
        match kernel_with_first_one(a, n, &mont) {
            Some(v) => {
                crt_accumulate(&mut acc, &mut modulus, &v, p);
                if let Some(candidate) = reconstruct_vector(&acc, &modulus) {
                    if m.mul_vec(&candidate) == candidate {
                        let total: BigRational = candidate.iter().sum();
                        return Ok(candidate.into_iter().map(|x| x / &total).collect());
                    }
                }
            }
            None => {
                singular_primes += 1;
                if singular_primes >= 3 {
                    return Err(Error::SolverSingular);
                }
            }
        }
    }
    unreachable!("prime supply is unbounded")
}

fn dense_mod_minus_identity(m: &RatMatrix, mont: &Montgomery) -> Option<Vec<u64>> {
    let n = m.dim();
    let mut a = vec![0u64; n * n];
    for c in 0..n {
        for (r, v) in m.column(c) {
            let den = reduce_bigint(v.denom(), mont.p);
            if den == 0 {
                return None;
            }
            let num = mont.to_mont(reduce_bigint(v.numer(), mont.p));
            a[r * n + c] = mont.mul(num, mont.inv(mont.to_mont(den)));
        }
        a[c * n + c] = mont.sub(a[c * n + c], mont.to_mont(1));
    }
    Some(a)
}

// Solves A v = 0 with v_0 = 1, where A is n×n in Montgomery form. Returns
// None unless the remaining n − 1 columns have full rank.
fn kernel_with_first_one(mut a: Vec<u64>, n: usize, mont: &Montgomery) -> Option<Vec<u64>> {
    // Augmented system: columns 1..n are unknowns, rhs = −column 0.
    let width = n;
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|r| {
            let mut row = Vec::with_capacity(width);
            row.extend_from_slice(&a[r * n + 1..r * n + n]);
            row.push(mont.sub(0, a[r * n]));
            row
        })
        .collect();
    a.clear();
    let unknowns = n - 1;
    let mut pivot_row = 0;
    for col in 0..unknowns {
        let pr = (pivot_row..n).find(|&r| rows[r][col] != 0)?;
        rows.swap(pivot_row, pr);
        let inv = mont.inv(rows[pivot_row][col]);
        for v in rows[pivot_row][col..].iter_mut() {
            *v = mont.mul(*v, inv);
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pivot_row || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (x, &pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x = mont.sub(*x, mont.mul(f, pv));
            }
        }
        pivot_row += 1;
    }
    // Remaining equations must be consistent.
    if rows[unknowns..].iter().any(|row| row[unknowns] != 0) {
        return None;
    }
    let mut v = Vec::with_capacity(n);
    v.push(1);
    v.extend(rows[..unknowns].iter().map(|row| mont.from_mont(row[unknowns])));
    Some(v)
}

fn reconstruct_vector(acc: &[BigInt], modulus: &BigInt) -> Option<Vec<BigRational>> {
    acc.iter().map(|r| rational_reconstruct(r, modulus)).collect()
}

/// Finds `a/b ≡ r (mod m)` with `|a|, b ≤ √(m/2)`, if one exists.
pub(crate) fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn crt_accumulate(acc: &mut [BigInt], modulus: &mut BigInt, residues: &[u64], p: u64) {
    let pb = BigInt::from(p);
    let mont = Montgomery::new(p);
    let m_mod_p = reduce_bigint(modulus, p);
    let inv = mont.from_mont(mont.inv(mont.to_mont(m_mod_p)));
    for (x, &r) in acc.iter_mut().zip(residues) {
        let x_mod_p = reduce_bigint(x, p);
        let diff = (r + p - x_mod_p) % p;
        let h = mulmod(diff, inv, p);
        *x += &*modulus * BigInt::from(h);
    }
    *modulus *= pb;
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Arithmetic modulo an odd prime `p < 2^62` in Montgomery form (`R = 2^64`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Montgomery {
    pub p: u64,
    neg_inv: u64,
    r2: u64,
}

impl Montgomery {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 62);
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = mulmod(r, r, p);
        Montgomery {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

/// Characteristic polynomial `det(λI − A)` modulo `p`, lowest degree first,
/// in normal (non-Montgomery) form. `a` is row-major in Montgomery form.
///
/// Reduces to upper Hessenberg form by elementary similarity transforms,
/// then expands along the subdiagonal.
pub(crate) fn charpoly_mod(a: &[u64], n: usize, mont: &Montgomery) -> Vec<u64> {
    let mut h = a.to_vec();
    let at = |r: usize, c: usize| r * n + c;
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[at(i, m - 1)] != 0) else {
            continue;
        };
        if i != m {
            for c in 0..n {
                h.swap(at(i, c), at(m, c));
            }
            for r in 0..n {
                h.swap(at(r, i), at(r, m));
            }
        }
        let t = mont.inv(h[at(m, m - 1)]);
        for i in m + 1..n {
            let u = mont.mul(h[at(i, m - 1)], t);
            if u == 0 {
                continue;
            }
            for c in m - 1..n {
                let v = mont.mul(u, h[at(m, c)]);
                h[at(i, c)] = mont.sub(h[at(i, c)], v);
            }
            for r in 0..n {
                let v = mont.mul(u, h[at(r, i)]);
                h[at(r, m)] = mont.add(h[at(r, m)], v);
            }
        }
    }
    let one = mont.to_mont(1);
    let mut polys: Vec<Vec<u64>> = vec![vec![one]];
    for m in 1..=n {
        // (λ − h_{m,m}) p_{m−1}
        let prev = &polys[m - 1];
        let hmm = h[at(m - 1, m - 1)];
        let mut next = vec![0u64; m + 1];
        for (k, &c) in prev.iter().enumerate() {
            next[k + 1] = mont.add(next[k + 1], c);
            next[k] = mont.sub(next[k], mont.mul(c, hmm));
        }
        let mut t = one;
        for i in (1..m).rev() {
            t = mont.mul(t, h[at(i, i - 1)]);
            let f = mont.mul(h[at(i - 1, m - 1)], t);
            if f == 0 {
                continue;
            }
            for (k, &c) in polys[i - 1].iter().enumerate() {
                next[k] = mont.sub(next[k], mont.mul(f, c));
            }
        }
        polys.push(next);
    }
    polys[n].iter().map(|&c| mont.from_mont(c)).collect()
}

/// Deterministic primes descending from `2^62`.
pub(crate) fn certified_primes() -> impl Iterator<Item = u64> {
    let mut candidate = (1u64 << 62) - 1;
    std::iter::from_fn(move || loop {
        candidate -= 2;
        if is_prime(candidate) {
            return Some(candidate);
        }
    })
}

pub(crate) fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    // Laplace expansion over ℚ; independent of the modular route.
    fn det(m: &[Vec<Polynomial>]) -> Polynomial {
        let n = m.len();
        if n == 0 {
            return Polynomial::from_integers(&[1]);
        }
        let mut total = Polynomial::from_integers(&[0]);
        for c in 0..n {
            let minor: Vec<Vec<Polynomial>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != c)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let term = poly_mul(&m[0][c], &det(&minor));
            total = if c % 2 == 0 {
                poly_add(&total, &term)
            } else {
                poly_add(&total, &poly_neg(&term))
            };
        }
        total
    }

    fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = vec![BigRational::zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Polynomial::new(out)
    }

    fn poly_add(a: &Polynomial, b: &Polynomial) -> Polynomial {
        let len = a.coeffs().len().max(b.coeffs().len());
        let get = |p: &Polynomial, k: usize| p.coeffs().get(k).cloned().unwrap_or_else(BigRational::zero);
        Polynomial::new((0..len).map(|k| get(a, k) + get(b, k)).collect())
    }

    fn poly_neg(a: &Polynomial) -> Polynomial {
        Polynomial::new(a.coeffs().iter().map(|c| -c).collect())
    }

    fn laplace_charpoly(m: &RatMatrix) -> Polynomial {
        let n = m.dim();
        let rows: Vec<Vec<Polynomial>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let v = -m.get(r, c);
                        if r == c {
                            Polynomial::new(vec![v, BigRational::one()])
                        } else {
                            Polynomial::new(vec![v])
                        }
                    })
                    .collect()
            })
            .collect();
        det(&rows)
    }

    #[test]
    fn charpoly_small_examples() {
        assert_eq!(char_poly(&RatMatrix::identity(2)), Polynomial::from_integers(&[1, -2, 1]));
        let one = RatMatrix::from_integer_rows(&[vec![1]]).unwrap();
        assert_eq!(char_poly(&one), Polynomial::from_integers(&[-1, 1]));
        let tsetlin = RatMatrix::from_dense(vec![
            vec![q(1, 3), q(1, 3)],
            vec![q(2, 3), q(2, 3)],
        ])
        .unwrap();
        assert_eq!(char_poly(&tsetlin), Polynomial::from_integers(&[0, -1, 1]));
        assert_eq!(char_poly(&tsetlin).to_string(), "λ^2 - λ");
    }

    #[test]
    fn charpoly_agrees_with_laplace_expansion() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..5 {
                let rows: Vec<Vec<BigRational>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                if rng.gen_bool(0.3) {
                                    BigRational::zero()
                                } else {
                                    q(rng.gen_range(-20..=20), rng.gen_range(1..=9))
                                }
                            })
                            .collect()
                    })
                    .collect();
                let m = RatMatrix::from_dense(rows).unwrap();
                assert_eq!(char_poly(&m), laplace_charpoly(&m));
            }
        }
    }

    #[test]
    fn root_multiplicity_and_eval() {
        let p = Polynomial::from_roots(&[(q(1, 2), 2), (q(-3, 1), 1)]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.root_multiplicity(&q(1, 2)), 2);
        assert_eq!(p.root_multiplicity(&q(-3, 1)), 1);
        assert_eq!(p.root_multiplicity(&q(0, 1)), 0);
        assert!(p.eval(&q(-3, 1)).is_zero());
    }

    #[test]
    fn modular_root_comparison() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let m = RatMatrix::from_integer_rows(&[vec![2, 1], vec![0, 3]]).unwrap();
        let (_, a) = m.to_integer_matrix();
        let roots = [(BigInt::from(2), 1), (BigInt::from(3), 1)];
        let (ok, cert) = charpoly_equals_roots(&a, &roots, CERTIFIED_WORK_BUDGET, 3, &mut rng);
        assert!(ok);
        assert!(matches!(cert, Certainty::Exact { .. }));
        let wrong = [(BigInt::from(2), 2)];
        assert!(!charpoly_equals_roots(&a, &wrong, CERTIFIED_WORK_BUDGET, 3, &mut rng).0);
        let (ok, cert) = charpoly_equals_roots(&a, &roots, 0.0, 3, &mut rng);
        assert!(ok);
        assert_eq!(cert, Certainty::Probabilistic { primes: 3 });
    }

    #[test]
    fn stationary_of_small_chain() {
        // Columns sum to one; stationary vector is (2/5, 3/5).
        let m = RatMatrix::from_dense(vec![vec![q(1, 4), q(1, 2)], vec![q(3, 4), q(1, 2)]]).unwrap();
        let v = stationary_vector(&m).unwrap();
        assert_eq!(v, vec![q(2, 5), q(3, 5)]);
        assert_eq!(stationary_vector(&RatMatrix::identity(1)).unwrap(), vec![q(1, 1)]);
        assert_eq!(stationary_vector(&RatMatrix::identity(2)), Err(Error::SolverSingular));
        let bad = RatMatrix::from_dense(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 4), q(1, 2)]]).unwrap();
        assert_eq!(stationary_vector(&bad), Err(Error::NotStochastic));
    }

    #[test]
    fn reconstruction_recovers_fractions() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let target = q(-355, 113);
        let inv = BigInt::from(113).extended_gcd(&m).x;
        let r = (BigInt::from(-355) * inv).mod_floor(&m);
        assert_eq!(rational_reconstruct(&r, &m), Some(target));
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(998_244_353) && !is_prime(1));
        assert!(!is_prime(561));
        let p = certified_primes().next().unwrap();
        assert!(p < 1 << 62 && is_prime(p));
    }
}
