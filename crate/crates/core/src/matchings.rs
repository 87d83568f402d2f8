//! k-noncrossing perfect matchings.
//!
//! `f_k(2n, 0)` is read off the exponential generating function
//! `det[I_{i-j}(2z) - I_{i+j}(2z)]` over `i, j = 1..k-1`, where
//! `I_r(2z) = sum_j z^(2j+r) / (j! (j+r)!)`. A brute-force enumerator serves as
//! the independent oracle.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::Diagram;
use crate::error::{check_range, Error, Result};
use crate::limits::EnumLimits;
use crate::numeric;
use crate::reference::Q0_TABLE;
use crate::series::{ratio, ExactRational, Poly, USeries};

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingTable {
    pub k: usize,
    /// `f_k(2n, 0)` for `n = 0..=N`.
    #[serde(serialize_with = "serialize_bigints")]
    pub values: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Truncation of `I_r(2z)`.
pub fn bessel_series(r: usize, order: usize) -> USeries {
    let mut s = USeries::zero(order);
    let mut coeffs = s.coeffs().to_vec();
    let mut j = 0;
    while 2 * j + r <= order {
        let den = factorial(j) * factorial(j + r);
        coeffs[2 * j + r] = ExactRational::new(BigInt::one(), den);
        j += 1;
    }
    s = USeries::from_coeffs(order, coeffs);
    s
}

/// Determinant of a square matrix of series by Gaussian elimination along the
/// diagonal. Every pivot must be invertible; for the Bessel matrix the matrix
/// is the identity at `z = 0`, so every Schur complement keeps unit pivots.
fn series_determinant(mut m: Vec<Vec<USeries>>, order: usize) -> Result<USeries> {
    let n = m.len();
    let mut det = USeries::one(order);
    for col in 0..n {
        let pivot = m[col][col].clone();
        let inv = pivot.recip()?;
        det = det.mul(&pivot);
        for row in col + 1..n {
            let factor = m[row][col].mul(&inv);
            if factor.valuation().is_none() {
                continue;
            }
            for c in col..n {
                let delta = factor.mul(&m[col][c]);
                m[row][c] = m[row][c].sub(&delta)?;
            }
        }
    }
    Ok(det)
}

/// `H_k(z) = sum_n f_k(2n,0) z^(2n) / (2n)!` modulo `z^(order+1)`.
pub fn matching_egf(k: usize, order: usize) -> Result<USeries> {
    check_range("k", k, MIN_K, MAX_K)?;
    let dim = k - 1;
    let bessel: Vec<USeries> = (0..=2 * dim).map(|r| bessel_series(r, order)).collect();
    let matrix = (1..=dim)
        .map(|i| {
            (1..=dim)
                .map(|j| bessel[i.abs_diff(j)].sub(&bessel[i + j]))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    series_determinant(matrix, order)
}

/// `f_k(2n, 0)` for `n = 0..=n_max`.
pub fn fk_counts(k: usize, n_max: usize) -> Result<MatchingTable> {
    let egf = matching_egf(k, 2 * n_max)?;
    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let scaled = egf.coeff(2 * n) * ExactRational::from_integer(factorial(2 * n));
        if !scaled.is_integer() {
            return Err(Error::NonInteger { index: 2 * n });
        }
        values.push(scaled.to_integer());
    }
    Ok(MatchingTable { k, values })
}

/// Ordinary generating function `F_k(z) = sum_n f_k(2n,0) z^n` to `z^order`.
pub fn fk_ogf(k: usize, order: usize) -> Result<USeries> {
    let table = fk_counts(k, order)?;
    Ok(USeries::from_coeffs(
        order,
        table
            .values
            .into_iter()
            .map(ExactRational::from_integer)
            .collect(),
    ))
}

/// Size of the largest set of mutually crossing arcs.
pub fn crossing_number(d: &Diagram) -> usize {
    crossing_number_of(&d.arcs)
}

/// [`crossing_number`] on a bare arc list (any order).
///
/// Arcs `a_1..a_r` (sorted by left end) cross pairwise exactly when both ends
/// increase and every left end precedes the first right end. Fixing the first
/// arc, the rest is a longest chain increasing in both ends among the arcs that
/// start inside it and end outside it.
pub fn crossing_number_of(arcs: &[(usize, usize)]) -> usize {
    if arcs.is_empty() {
        return 0;
    }
    let mut sorted = arcs.to_vec();
    sorted.sort_unstable();
    let mut best = 1;
    let mut chain = vec![0usize; sorted.len()];
    for (f, &(i1, j1)) in sorted.iter().enumerate() {
        let cands: Vec<(usize, usize)> = sorted[f + 1..]
            .iter()
            .copied()
            .filter(|&(i, j)| i < j1 && j > j1 && i > i1)
            .collect();
        for a in 0..cands.len() {
            chain[a] = 1;
            for b in 0..a {
                if cands[b].1 < cands[a].1 && chain[b] + 1 > chain[a] {
                    chain[a] = chain[b] + 1;
                }
            }
            best = best.max(chain[a] + 1);
        }
    }
    best
}

/// Number of perfect matchings on `[2n]` with no k-crossing, by exhaustive
/// enumeration. Parallel over the partner of vertex 1.
pub fn brute_force_matchings(k: usize, n: usize) -> Result<u64> {
    brute_force_matchings_with(k, n, &EnumLimits::from_env())
}

pub fn brute_force_matchings_with(k: usize, n: usize, limits: &EnumLimits) -> Result<u64> {
    check_range("k", k, MIN_K, MAX_K)?;
    limits.check_matching_pairs(n)?;
    if n == 0 {
        return Ok(1);
    }
    let total = (2..=2 * n)
        .into_par_iter()
        .map(|partner| {
            let mut used = vec![false; 2 * n + 1];
            used[1] = true;
            used[partner] = true;
            let mut arcs = vec![(1, partner)];
            count_matchings(k, 2 * n, &mut used, &mut arcs)
        })
        .sum();
    Ok(total)
}

fn count_matchings(k: usize, len: usize, used: &mut [bool], arcs: &mut Vec<(usize, usize)>) -> u64 {
    let Some(first) = (1..=len).find(|&v| !used[v]) else {
        return 1;
    };
    let mut total = 0;
    used[first] = true;
    for partner in first + 1..=len {
        if used[partner] {
            continue;
        }
        arcs.push((first, partner));
        if crossing_number_of(arcs) < k {
            used[partner] = true;
            total += count_matchings(k, len, used, arcs);
            used[partner] = false;
        }
        arcs.pop();
    }
    used[first] = false;
    total
}

/// Leading ODE coefficient of `F_k` with its listed nonzero roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q0Data {
    pub k: usize,
    pub q0: Poly,
    pub roots: Vec<ExactRational>,
}

pub fn q0_data(k: usize) -> Result<Q0Data> {
    check_range("k", k, 2, 7)?;
    let (coeffs, roots) = Q0_TABLE[k - 2];
    Ok(Q0Data {
        k,
        q0: Poly::from_ints(coeffs),
        roots: roots.iter().map(|&(n, d)| ratio(n, d)).collect(),
    })
}

/// `rho_k^2 = 1 / (2k - 2)^2`.
pub fn rho_squared(k: usize) -> ExactRational {
    let d = 2 * k as i64 - 2;
    ratio(1, d * d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Q0Report {
    pub k: usize,
    /// Whether `q0` vanishes exactly at each listed root, in listed order.
    pub roots_vanish: Vec<bool>,
    pub rho_squared_listed: bool,
    pub rho_squared_minimal: bool,
}

impl Q0Report {
    pub fn passed(&self) -> bool {
        self.roots_vanish.iter().all(|&b| b) && self.rho_squared_listed && self.rho_squared_minimal
    }
}

pub fn q0_roots_check(k: usize) -> Result<Q0Report> {
    let data = q0_data(k)?;
    let rho2 = rho_squared(k);
    let roots_vanish = data.roots.iter().map(|r| data.q0.eval(r).is_zero()).collect();
    Ok(Q0Report {
        k,
        roots_vanish,
        rho_squared_listed: data.roots.contains(&rho2),
        rho_squared_minimal: data.roots.iter().min() == Some(&rho2),
    })
}

/// Growth of `f_k(2n, 0)` against `(2(k-1))^(2n) n^alpha` with
/// `alpha = -((k-1)^2 + (k-1)/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub k: usize,
    pub n: usize,
    /// `f_k(2n) / f_k(2n-2)`.
    pub ratio: f64,
    pub ratio_target: f64,
    pub exponent_estimate: f64,
    pub exponent_target: f64,
}

pub fn subexponential_exponent(k: usize) -> f64 {
    let m = (k - 1) as f64;
    -(m * m + m / 2.0)
}

/// Richardson-extrapolated exponent from successive ratios.
///
/// With `a_n ~ C n^alpha R^n`, `alpha_n = ln(a_(n+1) / (R a_n)) / ln(1 + 1/n)`
/// equals `alpha + c/n + O(1/n^2)`, and `(n+1) alpha_(n+1) - n alpha_n`
/// cancels the `1/n` term. `growth` is `R` and `coeffs[i]` is `a_i`; the
/// estimate uses the last three entries.
pub fn exponent_estimate(coeffs: &[ExactRational], growth: &ExactRational, n: usize) -> f64 {
    let alpha = |m: usize| -> f64 {
        let r = &coeffs[m + 1] / (&coeffs[m] * growth);
        numeric::ln(&r) / (1.0 + 1.0 / m as f64).ln()
    };
    let a1 = alpha(n - 2);
    let a2 = alpha(n - 1);
    (n - 1) as f64 * a2 - (n - 2) as f64 * a1
}

pub fn asymptotic_check(k: usize, n: usize) -> Result<AsymptoticReport> {
    check_range("k", k, 2, 7)?;
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic check needs n >= 4, got {n}"
        )));
    }
    let table = fk_counts(k, n)?;
    let coeffs: Vec<ExactRational> = table
        .values
        .iter()
        .cloned()
        .map(ExactRational::from_integer)
        .collect();
    let base = 2 * (k as i64 - 1);
    let growth = ratio(base * base, 1);
    let ratio_now = &coeffs[n] / &coeffs[n - 1];
    Ok(AsymptoticReport {
        k,
        n,
        ratio: ratio_now.to_f64().unwrap_or(f64::NAN),
        ratio_target: (base * base) as f64,
        exponent_estimate: exponent_estimate(&coeffs, &growth, n),
        exponent_target: subexponential_exponent(k),
    })
}
