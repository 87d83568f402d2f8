//! Dominant singularities of the loop generating functions and the
//! central-limit parameters derived from them.
//!
//! For a kind with closed form `prefactor * F_k(Ψ(z, u))`, the dominant
//! singularity `γ(s)` at `u = e^s` solves `Ψ(γ(s), e^s) = ρ_k^2`. Then
//! `μ = -γ'(0)/γ(0)` and `σ² = (γ'(0)/γ(0))² - γ''(0)/γ(0)`.
//!
//! `γ(0)` is a real algebraic number, located by Sturm counting and
//! refined by exact bisection; the derivatives come from exact partials of
//! `Ψ`, with a finite-difference re-solve kept as an independent check.

pub mod clt;
pub mod roots;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loopgf::{check_k_tau, LoopForm, LoopKind};
use crate::matchings::rho_squared;
use crate::numeric::{exp_approx, to_decimal, to_f64, to_scientific};
use crate::reference;
use crate::series::{ratio, BiPoly, ExactRational, Poly};

pub use clt::{clt_empirical, growth_check, CltReport, CltRow, GrowthReport};

/// Bits of precision for roots. `γ` enters μ and σ² through ratios, so this
/// is far beyond the six printed decimals.
pub const WORKING_BITS: u32 = 256;

/// Largest τ with published parameters.
pub const VALIDATED_TAU_MAX: usize = 4;

/// Digits used when a report is serialized without an explicit precision.
pub const DEFAULT_DIGITS: usize = 40;

/// `num / den` in `z` and `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFn {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl RationalFn {
    /// Quotient rule in `z`.
    pub fn partial_z(&self) -> RationalFn {
        RationalFn {
            num: &(&self.num.partial_z() * &self.den) - &(&self.num * &self.den.partial_z()),
            den: self.den.pow(2),
        }
    }

    /// Quotient rule in `u`.
    pub fn partial_u(&self) -> RationalFn {
        RationalFn {
            num: &(&self.num.partial_u() * &self.den) - &(&self.num * &self.den.partial_u()),
            den: self.den.pow(2),
        }
    }

    pub fn eval(&self, z: &ExactRational, u: &ExactRational) -> Result<ExactRational> {
        let d = self.den.eval(z, u);
        if d.is_zero() {
            return Err(Error::Degenerate("denominator vanishes at the evaluation point".into()));
        }
        Ok(self.num.eval(z, u) / d)
    }
}

/// The `F_k`-argument `Ψ(z, u)` of one loop kind.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub psi: RationalFn,
}

impl PsiFunction {
    pub fn new(kind: LoopKind, k: usize, tau: usize) -> Result<Self> {
        check_k_tau(k, tau)?;
        let form = LoopForm::new(kind, tau);
        Ok(PsiFunction {
            kind,
            k,
            tau,
            psi: RationalFn {
                num: form.arg_num,
                den: form.arg_den,
            },
        })
    }

    /// `ρ_k^2`, the singularity of `F_k`.
    pub fn target(&self) -> ExactRational {
        rho_squared(self.k)
    }

    /// Numerator of `Ψ(z, 1) - c` with the roots it shares with the
    /// denominator removed.
    pub fn equation_at_one(&self, c: &ExactRational) -> Poly {
        let one = ExactRational::one();
        let num = self.psi.num.specialize_u(&one);
        let den = self.psi.den.specialize_u(&one);
        let g = &num - &den.scale(c);
        roots::without_common_roots(&g, &den)
    }

    /// Numerator of `Ψ(z, u) - ρ_k^2` at a fixed marker value.
    fn equation_at(&self, u: &ExactRational) -> Poly {
        let num = self.psi.num.specialize_u(u);
        let den = self.psi.den.specialize_u(u);
        &num - &den.scale(&self.target())
    }

    /// `|Ψ(z, 1) - ρ_k^2|`.
    pub fn residual(&self, z: &ExactRational) -> Result<ExactRational> {
        Ok((self.psi.eval(z, &ExactRational::one())? - self.target()).abs())
    }
}

/// `γ(0)`: the smallest root in `(0, 1)` of `Ψ(z, 1) = ρ_k^2` that is not a
/// pole. The coefficients are nonnegative, so the dominant singularity is on
/// the positive real axis.
pub fn solve_gamma0(kind: LoopKind, k: usize, tau: usize) -> Result<ExactRational> {
    solve_gamma0_for(&PsiFunction::new(kind, k, tau)?)
}

fn solve_gamma0_for(psi: &PsiFunction) -> Result<ExactRational> {
    let eq = psi.equation_at_one(&psi.target());
    let found = roots::smallest_root(&eq, &ExactRational::zero(), &ExactRational::one(), WORKING_BITS);
    match found {
        Some(r) if r < ExactRational::one() => Ok(r),
        _ => Err(Error::NoRoot(format!(
            "Ψ(z,1) = ρ² has no root in (0,1) for {} k={} tau={}",
            psi.kind, psi.k, psi.tau
        ))),
    }
}

/// `γ'(0)` and `γ''(0)` with respect to `s`, where `u = e^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub dgamma: ExactRational,
    pub d2gamma: ExactRational,
}

/// Implicit differentiation of `G(z, s) = Ψ(z, e^s) - ρ_k^2 = 0` at `s = 0`,
/// using `∂_s = u ∂_u` and `∂_ss = u ∂_u + u² ∂_uu`.
pub fn implicit_derivatives(psi: &PsiFunction, gamma0: &ExactRational) -> Result<Derivatives> {
    let one = ExactRational::one();
    let f_z = psi.psi.partial_z();
    let f_u = psi.psi.partial_u();
    let g_z = f_z.eval(gamma0, &one)?;
    if g_z.is_zero() {
        return Err(Error::Degenerate(format!(
            "∂zΨ vanishes at γ(0) for {} k={} tau={}",
            psi.kind, psi.k, psi.tau
        )));
    }
    let g_u = f_u.eval(gamma0, &one)?;
    let g_uu = f_u.partial_u().eval(gamma0, &one)?;
    let g_zu = f_z.partial_u().eval(gamma0, &one)?;
    let g_zz = f_z.partial_z().eval(gamma0, &one)?;
    let g_s = g_u.clone();
    let g_ss = &g_u + &g_uu;
    let d1 = -(&g_s / &g_z);
    let two = ExactRational::from_integer(2.into());
    let d2 = -((g_ss + two * &g_zu * &d1 + &g_zz * &d1 * &d1) / &g_z);
    Ok(Derivatives {
        dgamma: d1,
        d2gamma: d2,
    })
}

/// Central differences of `γ(s)` from re-solving at `u = e^{±h}`. The root is
/// tracked by a sign change in `γ(0) ± 10^-5`.
pub fn finite_difference_derivatives(
    psi: &PsiFunction,
    gamma0: &ExactRational,
    h: &ExactRational,
) -> Result<Derivatives> {
    let window = ratio(1, 100_000);
    let (lo, hi) = (gamma0 - &window, gamma0 + &window);
    let solve = |s: &ExactRational| -> Result<ExactRational> {
        let u = exp_approx(s, WORKING_BITS);
        let eq = psi.equation_at(&u);
        bisect_sign_change(&eq, &lo, &hi, WORKING_BITS).ok_or_else(|| {
            Error::NoRoot(format!("root left the window around γ(0) at s = {}", to_f64(s)))
        })
    };
    let plus = solve(h)?;
    let minus = solve(&-h)?;
    let two = ExactRational::from_integer(2.into());
    Ok(Derivatives {
        dgamma: (&plus - &minus) / (&two * h),
        d2gamma: (&plus - &two * gamma0 + &minus) / (h * h),
    })
}

/// Root of `p` in `[lo, hi]` by bisection, given a sign change at the ends.
fn bisect_sign_change(p: &Poly, lo: &ExactRational, hi: &ExactRational, bits: u32) -> Option<ExactRational> {
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let (fa, fb) = (p.eval(&a), p.eval(&b));
    if fa.is_zero() {
        return Some(a);
    }
    if fb.is_zero() {
        return Some(b);
    }
    if fa.is_positive() == fb.is_positive() {
        return None;
    }
    let a_positive = fa.is_positive();
    let tol = ExactRational::new(1.into(), num_bigint::BigInt::from(1) << bits);
    let two = ExactRational::from_integer(2.into());
    while &b - &a > tol {
        let mid = (&a + &b) / &two;
        let v = p.eval(&mid);
        if v.is_zero() {
            return Some(mid);
        }
        if v.is_positive() == a_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some((a + b) / two)
}

/// One candidate singularity that must lie strictly beyond `γ(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Competitor {
    pub label: String,
    /// Smallest positive root; `None` when there is none.
    pub root: Option<ExactRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub gamma0: ExactRational,
    pub competitors: Vec<Competitor>,
    pub passed: bool,
}

/// Checks that `γ(0)` is smaller than every other candidate singularity:
/// the solutions of `Ψ(z, 1) = ρ_i^2` for `2 <= i < k`, and the poles of the
/// argument and of the prefactor.
pub fn dominance_check(kind: LoopKind, k: usize, tau: usize) -> Result<DominanceReport> {
    let psi = PsiFunction::new(kind, k, tau)?;
    let gamma0 = solve_gamma0_for(&psi)?;
    dominance_for(&psi, &gamma0)
}

fn dominance_for(psi: &PsiFunction, gamma0: &ExactRational) -> Result<DominanceReport> {
    let one = ExactRational::one();
    let mut competitors = Vec::new();
    for i in 2..psi.k {
        let eq = psi.equation_at_one(&rho_squared(i));
        competitors.push(Competitor {
            label: format!("matching singularity k={i}"),
            root: roots::smallest_positive_root(&eq, WORKING_BITS),
        });
    }
    let form = LoopForm::new(psi.kind, psi.tau);
    for (label, den) in [
        ("argument denominator", &form.arg_den),
        ("prefactor denominator", &form.prefactor_den),
    ] {
        competitors.push(Competitor {
            label: label.to_string(),
            root: roots::smallest_positive_root(&den.specialize_u(&one), WORKING_BITS),
        });
    }
    let passed = competitors
        .iter()
        .all(|c| c.root.as_ref().is_none_or(|r| r > gamma0));
    Ok(DominanceReport {
        kind: psi.kind,
        k: psi.k,
        tau: psi.tau,
        gamma0: gamma0.clone(),
        competitors,
        passed,
    })
}

/// Everything computed for one `(kind, k, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub gamma0: ExactRational,
    pub dgamma: ExactRational,
    pub d2gamma: ExactRational,
    pub mu: ExactRational,
    pub sigma2: ExactRational,
    /// `|Ψ(γ(0), 1) - ρ_k^2|`.
    pub residual: ExactRational,
    /// Finite-difference derivatives with `h = 10^-6`.
    pub fd: Derivatives,
    pub dominance: DominanceReport,
    /// Whether published parameters exist for this case.
    pub validated: bool,
}

impl SingularityReport {
    /// Symbolic and finite-difference derivatives agree to `digits`
    /// significant digits.
    pub fn derivatives_agree(&self, digits: i32) -> bool {
        let tol = 10f64.powi(-digits);
        let close = |a: &ExactRational, b: &ExactRational| {
            let (a, b) = (to_f64(a), to_f64(b));
            (a - b).abs() <= tol * a.abs().max(b.abs())
        };
        close(&self.dgamma, &self.fd.dgamma) && close(&self.d2gamma, &self.fd.d2gamma)
    }

    pub fn residual_below(&self, bound: &ExactRational) -> bool {
        &self.residual < bound
    }

    pub fn render(&self, digits: usize) -> RenderedReport {
        RenderedReport {
            kind: self.kind,
            k: self.k,
            tau: self.tau,
            gamma0: to_decimal(&self.gamma0, digits),
            dgamma: to_decimal(&self.dgamma, digits),
            d2gamma: to_decimal(&self.d2gamma, digits),
            mu: to_decimal(&self.mu, digits),
            sigma2: to_decimal(&self.sigma2, digits),
            residual: to_scientific(&self.residual, 3),
            fd_dgamma: to_decimal(&self.fd.dgamma, digits.min(12)),
            fd_d2gamma: to_decimal(&self.fd.d2gamma, digits.min(12)),
            derivatives_agree: self.derivatives_agree(6),
            dominance: self.dominance.passed,
            competitors: self
                .dominance
                .competitors
                .iter()
                .map(|c| RenderedCompetitor {
                    label: c.label.clone(),
                    root: c.root.as_ref().map(|r| to_decimal(r, digits.min(20))),
                })
                .collect(),
            validated: self.validated,
        }
    }
}

impl Serialize for SingularityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.render(DEFAULT_DIGITS).serialize(s)
    }
}

/// A [`SingularityReport`] with all numbers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub gamma0: String,
    pub dgamma: String,
    pub d2gamma: String,
    pub mu: String,
    pub sigma2: String,
    pub residual: String,
    pub fd_dgamma: String,
    pub fd_d2gamma: String,
    pub derivatives_agree: bool,
    pub dominance: bool,
    pub competitors: Vec<RenderedCompetitor>,
    pub validated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedCompetitor {
    pub label: String,
    pub root: Option<String>,
}

/// `(μ, σ²)` with all supporting data.
pub fn mu_sigma(kind: LoopKind, k: usize, tau: usize) -> Result<SingularityReport> {
    let psi = PsiFunction::new(kind, k, tau)?;
    let gamma0 = solve_gamma0_for(&psi)?;
    let d = implicit_derivatives(&psi, &gamma0)?;
    let fd = finite_difference_derivatives(&psi, &gamma0, &ratio(1, 1_000_000))?;
    let dominance = dominance_for(&psi, &gamma0)?;
    let q = &d.dgamma / &gamma0;
    let mu = -q.clone();
    let sigma2 = &q * &q - &d.d2gamma / &gamma0;
    Ok(SingularityReport {
        kind,
        k,
        tau,
        residual: psi.residual(&gamma0)?,
        gamma0,
        dgamma: d.dgamma,
        d2gamma: d.d2gamma,
        mu,
        sigma2,
        fd,
        dominance,
        validated: tau <= VALIDATED_TAU_MAX,
    })
}

/// `computed` rounds to within one unit in the last place of `published`.
pub fn within_last_digit(computed: &ExactRational, published: &str) -> bool {
    let places = published.split_once('.').map_or(0, |(_, f)| f.len());
    let mine = to_decimal(computed, places);
    let as_units = |s: &str| s.replace('.', "").parse::<i128>().ok();
    match (as_units(&mine), as_units(published)) {
        (Some(a), Some(b)) => (a - b).abs() <= 1,
        _ => false,
    }
}

/// One cell of the reproduced parameter tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableCell {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub mu: String,
    pub sigma2: String,
    pub published_mu: Option<String>,
    pub published_sigma2: Option<String>,
    /// Both values within one unit of the sixth decimal; `None` without
    /// published data.
    pub matches: Option<bool>,
    pub derivatives_agree: bool,
    pub dominance: bool,
}

impl TableCell {
    fn from_report(r: &SingularityReport, digits: usize) -> Self {
        let published = reference::published(r.kind, r.k, r.tau);
        let matches = published.map(|(m, s)| within_last_digit(&r.mu, m) && within_last_digit(&r.sigma2, s));
        TableCell {
            kind: r.kind,
            k: r.k,
            tau: r.tau,
            mu: to_decimal(&r.mu, digits),
            sigma2: to_decimal(&r.sigma2, digits),
            published_mu: published.map(|p| p.0.to_string()),
            published_sigma2: published.map(|p| p.1.to_string()),
            matches,
            derivatives_agree: r.derivatives_agree(6),
            dominance: r.dominance.passed,
        }
    }

    pub fn passed(&self) -> bool {
        self.matches.unwrap_or(true) && self.derivatives_agree && self.dominance
    }
}

/// Reports for every `(kind, k, τ)` in the given ranges, computed in
/// parallel and returned sorted by kind, then τ, then k.
pub fn batch(
    kinds: &[LoopKind],
    ks: std::ops::RangeInclusive<usize>,
    taus: std::ops::RangeInclusive<usize>,
) -> Result<Vec<SingularityReport>> {
    let mut cases = Vec::new();
    for &kind in kinds {
        for tau in taus.clone() {
            for k in ks.clone() {
                cases.push((kind, k, tau));
            }
        }
    }
    cases
        .into_par_iter()
        .map(|(kind, k, tau)| mu_sigma(kind, k, tau))
        .collect()
}

/// The published grid (k = 2..7, τ = 1..4) for the given kinds.
pub fn tables(kinds: &[LoopKind], digits: usize) -> Result<Vec<TableCell>> {
    Ok(batch(kinds, 2..=7, 1..=VALIDATED_TAU_MAX)?
        .iter()
        .map(|r| TableCell::from_report(r, digits))
        .collect())
}
