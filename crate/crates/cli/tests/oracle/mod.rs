//! Brute-force reference implementations written directly from the
//! definitions, sharing no code with the library beyond `Poset::lt`.

#![allow(dead_code)]

use linext::Poset;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 1..=n {
            if !used[v - 1] {
                used[v - 1] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v - 1] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All permutations compatible with the order, lexicographic.
pub fn extensions(p: &Poset) -> Vec<Vec<usize>> {
    let n = p.size();
    permutations(n)
        .into_iter()
        .filter(|w| (0..n).all(|i| (i + 1..n).all(|j| !p.lt(w[j], w[i]))))
        .collect()
}

pub fn tau(p: &Poset, w: &[usize], i: usize) -> Vec<usize> {
    let mut v = w.to_vec();
    let (a, b) = (v[i - 1], v[i]);
    if !p.lt(a, b) && !p.lt(b, a) {
        v.swap(i - 1, i);
    }
    v
}

pub fn partial(p: &Poset, w: &[usize], j: usize) -> Vec<usize> {
    let mut v = w.to_vec();
    for i in j..p.size() {
        v = tau(p, &v, i);
    }
    v
}

/// Sparse columns of the transition matrix: entry `(target, source)`.
pub fn matrix(p: &Poset, promotion_mode: bool, x: &[Q]) -> (Vec<Vec<usize>>, Vec<Vec<(usize, Q)>>) {
    let states = extensions(p);
    let index = |w: &Vec<usize>| states.binary_search(w).expect("closed");
    let cols = states
        .iter()
        .map(|w| {
            let mut col: Vec<(usize, Q)> = Vec::new();
            for j in 1..=p.size() {
                let t = index(&partial(p, w, j));
                let weight = if promotion_mode { x[w[j - 1] - 1].clone() } else { x[j - 1].clone() };
                match col.iter_mut().find(|(r, _)| *r == t) {
                    Some((_, v)) => *v += weight,
                    None => col.push((t, weight)),
                }
            }
            col
        })
        .collect();
    (states, cols)
}

pub fn dense(cols: &[Vec<(usize, Q)>]) -> Vec<Vec<Q>> {
    let n = cols.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col {
            m[*r][c] += v;
        }
    }
    m
}

pub fn apply(cols: &[Vec<(usize, Q)>], v: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); v.len()];
    for (c, col) in cols.iter().enumerate() {
        if v[c].is_zero() {
            continue;
        }
        for (r, m) in col {
            out[*r] += m * &v[c];
        }
    }
    out
}

/// `∏ (x_1 + ⋯ + x_i) / (x_{w_1} + ⋯ + x_{w_i})`.
pub fn product_weight(w: &[usize], x: &[Q]) -> Q {
    let mut num = Q::zero();
    let mut den = Q::zero();
    let mut acc = Q::one();
    for (i, &l) in w.iter().enumerate() {
        num += &x[i];
        den += &x[l - 1];
        acc *= &num / &den;
    }
    acc
}

pub fn normalize(v: &[Q]) -> Vec<Q> {
    let total: Q = v.iter().sum();
    v.iter().map(|a| a / &total).collect()
}

pub fn tv(a: &[Q], b: &[Q]) -> Q {
    let s: Q = a.iter().zip(b).map(|(u, v)| num_traits::Signed::abs(&(u - v))).sum();
    s / q(2, 1)
}

/// Characteristic polynomial `det(λI − A)` by Faddeev–LeVerrier, constant
/// term first.
pub fn charpoly(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1} I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for t in 0..n {
                    if !a[i][t].is_zero() && !m[t][j].is_zero() {
                        s += &a[i][t] * &m[t][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut trace = Q::zero();
        for i in 0..n {
            for t in 0..n {
                if !a[i][t].is_zero() && !m[t][i].is_zero() {
                    trace += &a[i][t] * &m[t][i];
                }
            }
        }
        coeffs[n - k] = -trace / Q::from_integer(BigInt::from(k as i64));
    }
    coeffs
}

/// `∏ (λ − r)^m`, constant term first.
pub fn from_roots(roots: &[(Q, usize)]) -> Vec<Q> {
    let mut p = vec![Q::one()];
    for (r, m) in roots {
        for _ in 0..*m {
            let mut next = vec![Q::zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            p = next;
        }
    }
    p
}

/// Fixed-point-free extensions of the subposet on `elems`, relabeled
/// order-preservingly to `1..=k`.
pub fn derangements_of_subposet(p: &Poset, elems: &[usize]) -> u64 {
    let k = elems.len();
    permutations(k)
        .into_iter()
        .filter(|w| (0..k).all(|i| (i + 1..k).all(|j| !p.lt(elems[w[j] - 1], elems[w[i] - 1]))))
        .filter(|w| w.iter().enumerate().all(|(i, &v)| v != i + 1))
        .count() as u64
}
