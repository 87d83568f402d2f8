//! Finite-n checks of the asymptotics: coefficient growth against `1/γ(0)`
//! and exact loop-count distributions against the normal law.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::loopgf::{check_k_tau, loop_gf, loop_gf_at, GfRequest, LoopKind};
use crate::matchings::{exponent_estimate, subexponential_exponent};
use crate::numeric::{to_decimal, to_f64};
use crate::series::{ExactRational, UPoly};

use super::{mu_sigma, solve_gamma0};

fn fixed<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:.9}"))
}

fn fixed_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => fixed(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub n: usize,
    /// `a_n / a_(n-1)` for the total counts.
    #[serde(serialize_with = "fixed")]
    pub ratio: f64,
    /// `1 / γ(0)`.
    #[serde(serialize_with = "fixed")]
    pub target: f64,
    #[serde(serialize_with = "fixed")]
    pub relative_error: f64,
    /// Whether `|a_m / a_(m-1) - 1/γ(0)|` is nonincreasing over the last
    /// quarter of the range.
    pub trend_monotone: bool,
    #[serde(serialize_with = "fixed")]
    pub exponent_estimate: f64,
    #[serde(serialize_with = "fixed")]
    pub exponent_target: f64,
}

impl GrowthReport {
    pub fn ratio_within(&self, rel: f64) -> bool {
        self.relative_error < rel
    }

    pub fn exponent_within(&self, rel: f64) -> bool {
        (self.exponent_estimate - self.exponent_target).abs() <= rel * self.exponent_target.abs()
    }
}

/// Growth of the total counts `a_n = [z^n]` of the generating function at
/// `u = 1` against `a_n ~ C n^α γ(0)^-n`.
pub fn growth_check(kind: LoopKind, k: usize, tau: usize, n: usize) -> Result<GrowthReport> {
    check_k_tau(k, tau)?;
    if n < 8 {
        return Err(Error::InvalidArgument(format!("growth check needs n >= 8, got {n}")));
    }
    let gamma0 = solve_gamma0(kind, k, tau)?;
    let growth = gamma0.recip();
    let series = loop_gf_at(kind, k, tau, n, &ExactRational::one())?;
    let a = series.coeffs();
    let target = to_f64(&growth);
    let gap = |m: usize| (to_f64(&(&a[m] / &a[m - 1])) - target).abs();
    let start = n - n / 4;
    let trend_monotone = (start + 1..=n).all(|m| gap(m) <= gap(m - 1));
    let ratio = to_f64(&(&a[n] / &a[n - 1]));
    Ok(GrowthReport {
        kind,
        k,
        tau,
        n,
        ratio,
        target,
        relative_error: (ratio - target).abs() / target,
        trend_monotone,
        exponent_estimate: exponent_estimate(a, &growth, n - 1),
        exponent_target: subexponential_exponent(k),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltRow {
    pub n: usize,
    /// Exact mean and variance of the loop count, rendered.
    pub mean: String,
    pub variance: String,
    #[serde(serialize_with = "fixed")]
    pub mean_over_n: f64,
    #[serde(serialize_with = "fixed")]
    pub var_over_n: f64,
    /// `|mean/n - μ|`.
    #[serde(serialize_with = "fixed")]
    pub mean_gap: f64,
    /// Kolmogorov distance of `(X - μn)/sqrt(σ²n)` to the standard normal;
    /// undefined for `n = 0`.
    #[serde(serialize_with = "fixed_opt")]
    pub kolmogorov: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    #[serde(serialize_with = "fixed")]
    pub mu: f64,
    #[serde(serialize_with = "fixed")]
    pub sigma2: f64,
    pub rows: Vec<CltRow>,
    pub mean_gap_decreasing: bool,
    pub distance_decreasing: bool,
}

impl CltReport {
    pub fn passed(&self) -> bool {
        self.mean_gap_decreasing && self.distance_decreasing
    }
}

/// Exact distributions of the loop count at each `n` in `n_list` (taken in
/// the given order) compared with the limit law.
pub fn clt_empirical(kind: LoopKind, k: usize, tau: usize, n_list: &[usize]) -> Result<CltReport> {
    let params = mu_sigma(kind, k, tau)?;
    let (mu, sigma2) = (to_f64(&params.mu), to_f64(&params.sigma2));
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let gf = loop_gf(&GfRequest::new(kind, k, tau, n_max))?;
    let rows: Vec<CltRow> = n_list
        .iter()
        .map(|&n| clt_row(gf.coeff(n), n, mu, sigma2))
        .collect();
    let decreasing = |f: &dyn Fn(&CltRow) -> Option<f64>| {
        rows.windows(2).all(|w| match (f(&w[0]), f(&w[1])) {
            (Some(a), Some(b)) => b < a,
            _ => true,
        })
    };
    let mean_gap_decreasing = decreasing(&|r| Some(r.mean_gap));
    let distance_decreasing = decreasing(&|r| r.kolmogorov);
    Ok(CltReport {
        kind,
        k,
        tau,
        mu,
        sigma2,
        rows,
        mean_gap_decreasing,
        distance_decreasing,
    })
}

fn clt_row(dist: &UPoly, n: usize, mu: f64, sigma2: f64) -> CltRow {
    let counts = dist.coeffs();
    let total: ExactRational = counts.iter().sum();
    let mut mean = ExactRational::zero();
    let mut second = ExactRational::zero();
    for (t, c) in counts.iter().enumerate() {
        let t = ExactRational::from_integer(BigInt::from(t));
        mean += c * &t;
        second += c * &t * &t;
    }
    mean /= &total;
    second /= &total;
    let variance = &second - &mean * &mean;
    let nn = n.max(1) as f64;
    let kolmogorov = (n > 0).then(|| kolmogorov_distance(counts, &total, n as f64 * mu, (n as f64 * sigma2).sqrt()));
    CltRow {
        n,
        mean: to_decimal(&mean, 12),
        variance: to_decimal(&variance, 12),
        mean_over_n: if n == 0 { 0.0 } else { to_f64(&mean) / nn },
        var_over_n: if n == 0 { 0.0 } else { to_f64(&variance) / nn },
        mean_gap: if n == 0 { mu } else { (to_f64(&mean) / nn - mu).abs() },
        kolmogorov,
    }
}

/// `sup_x |P(X <= x) - Φ((x - center)/scale)|` for a lattice distribution on
/// `0, 1, 2, ...`, checked on both sides of every atom.
fn kolmogorov_distance(counts: &[ExactRational], total: &ExactRational, center: f64, scale: f64) -> f64 {
    let normal = Normal::standard();
    let mut cumulative = ExactRational::zero();
    let mut worst: f64 = 0.0;
    for (t, c) in counts.iter().enumerate() {
        let phi = normal.cdf((t as f64 - center) / scale);
        let before = to_f64(&(&cumulative / total));
        cumulative += c;
        let after = to_f64(&(&cumulative / total));
        worst = worst.max((before - phi).abs()).max((after - phi).abs());
    }
    worst
}

/// Number of structures of length `n`.
pub fn total_count(dist: &UPoly) -> BigInt {
    dist.coeffs().iter().sum::<ExactRational>().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_at_zero() {
        let row = clt_row(&UPoly::one(), 0, 0.1, 0.03);
        assert_eq!(row.mean, "0.000000000000");
        assert_eq!(row.variance, "0.000000000000");
        assert!(row.kolmogorov.is_none());
    }

    #[test]
    fn kolmogorov_of_a_point_mass() {
        let d = kolmogorov_distance(&[ExactRational::one()], &ExactRational::one(), 0.0, 1.0);
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn secondary_structure_growth() {
        let r = growth_check(LoopKind::Hairpin, 2, 1, 120).unwrap();
        assert!(r.ratio_within(0.02), "{r:?}");
        assert!((r.exponent_estimate + 1.5).abs() < 0.2, "{r:?}");
        assert!(r.trend_monotone);
    }

    #[test]
    fn hairpin_distribution_trend() {
        let r = clt_empirical(LoopKind::Hairpin, 2, 1, &[0, 20, 40]).unwrap();
        assert!(r.mean_gap_decreasing, "{r:?}");
        assert_eq!(r.rows[0].n, 0);
    }
}
