//! Bivariate generating functions of hairpin-loops, interior-loops and bulges.
//!
//! Each kind has a closed form `prefactor(z, u) * F_k(arg(z, u))` with
//! rational prefactor and argument ([`LoopForm`]). The same series is also
//! assembled from scratch as a sum over shapes, each shape inflated into
//! structures ([`stem_inflation`]), which is what [`cross_derivation_check`]
//! compares against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{check_range, Error, Result};
use crate::matchings::fk_ogf;
use crate::series::{compose, rational_to_series, rational_to_useries_at, BSeries, BiPoly, ExactRational, UPoly, USeries};

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 7;
pub const MIN_TAU: usize = 1;
pub const MAX_TAU: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    Hairpin,
    Interior,
    Bulge,
}

impl LoopKind {
    pub const ALL: [LoopKind; 3] = [LoopKind::Hairpin, LoopKind::Interior, LoopKind::Bulge];

    pub fn name(self) -> &'static str {
        match self {
            LoopKind::Hairpin => "hairpin",
            LoopKind::Interior => "interior",
            LoopKind::Bulge => "bulge",
        }
    }
}

impl fmt::Display for LoopKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LoopKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hairpin" => Ok(LoopKind::Hairpin),
            "interior" => Ok(LoopKind::Interior),
            "bulge" => Ok(LoopKind::Bulge),
            other => Err(Error::InvalidArgument(format!(
                "unknown loop kind {other:?}, expected hairpin, interior or bulge"
            ))),
        }
    }
}

/// A generating-function request: kind, `k`, `τ`, truncation order `N` and
/// `u`-cap `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfRequest {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub order: usize,
    pub u_cap: usize,
}

impl GfRequest {
    /// Request with the default cap `ceil(N / 2)`.
    pub fn new(kind: LoopKind, k: usize, tau: usize, order: usize) -> Self {
        GfRequest {
            kind,
            k,
            tau,
            order,
            u_cap: order.div_ceil(2),
        }
    }

    pub fn with_u_cap(mut self, u_cap: usize) -> Self {
        self.u_cap = u_cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_k_tau(self.k, self.tau)
    }
}

pub(crate) fn check_k_tau(k: usize, tau: usize) -> Result<()> {
    check_range("k", k, MIN_K, MAX_K)?;
    check_range("tau", tau, MIN_TAU, MAX_TAU)
}

/// Closed form `prefactor_num / prefactor_den * F_k(arg_num / arg_den)`, all
/// four pieces integer polynomials in `z` and the marker `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopForm {
    pub kind: LoopKind,
    pub tau: usize,
    pub prefactor_num: BiPoly,
    pub prefactor_den: BiPoly,
    pub arg_num: BiPoly,
    pub arg_den: BiPoly,
}

fn zp(coeffs: &[i64]) -> BiPoly {
    BiPoly::from_z_poly(&UPoly::from_ints(coeffs))
}

fn zpow(e: usize) -> BiPoly {
    BiPoly::term(1, e, 0)
}

/// `ϑ(z, u) = (1-z)^2 (1 - z^2 + z^{2τ}) + z^{2τ} - z^{2τ+1} u`.
pub fn theta(tau: usize) -> BiPoly {
    let t = 2 * tau;
    let one_minus_z = zp(&[1, -1]);
    let p = &zp(&[1, 0, -1]) + &zpow(t);
    &(&(&one_minus_z.pow(2) * &p) + &zpow(t)) - &BiPoly::term(1, t + 1, 1)
}

impl LoopForm {
    pub fn new(kind: LoopKind, tau: usize) -> Self {
        let t = 2 * tau;
        let one_minus_z = zp(&[1, -1]);
        let z2t = zpow(t);
        let (prefactor_num, prefactor_den, arg_num, arg_den) = match kind {
            LoopKind::Hairpin => {
                let th = theta(tau);
                let p = &zp(&[1, 0, -1]) + &z2t;
                (
                    &one_minus_z * &p,
                    th.clone(),
                    &(&z2t * &one_minus_z.pow(2)) * &p,
                    th.pow(2),
                )
            }
            LoopKind::Interior => {
                let base = &(&zp(&[1, 0, -1]) * &one_minus_z.pow(2)) - &BiPoly::term(1, t + 2, 1);
                let a = &base + &(&zp(&[1, -2, 2]) * &z2t);
                let b = &base + &(&zp(&[2, -3, 2]) * &z2t);
                (a.clone(), &one_minus_z * &b, &z2t * &a, b.pow(2))
            }
            LoopKind::Bulge => {
                let base = &(&zp(&[1, 0, -1]) * &one_minus_z) - &BiPoly::term(2, t + 1, 1);
                let a = &base + &(&zp(&[1, 1]) * &z2t);
                let b = &base + &(&zp(&[2, 1]) * &z2t);
                (
                    a.clone(),
                    &one_minus_z * &b,
                    &z2t * &a,
                    &one_minus_z * &b.pow(2),
                )
            }
        };
        LoopForm {
            kind,
            tau,
            prefactor_num,
            prefactor_den,
            arg_num,
            arg_den,
        }
    }
}

/// `η(u2, u3) = z^{2τ} / ((1-z^2)(1-z)^2 - (2 u3 z (1-z) + u2 z^2) z^{2τ})`
/// with at most one marker active; inactive markers are set to 1.
pub fn eta_series(
    tau: usize,
    order: usize,
    u_cap: usize,
    u2_active: bool,
    u3_active: bool,
) -> Result<BSeries> {
    eta_bipoly(tau, u2_active, u3_active)
        .and_then(|(num, den)| Ok(rational_to_series(&num, &den, order, u_cap)?))
}

fn eta_bipoly(tau: usize, u2_active: bool, u3_active: bool) -> Result<(BiPoly, BiPoly)> {
    if u2_active && u3_active {
        return Err(Error::InvalidArgument(
            "only one marker can be active in a bivariate series".into(),
        ));
    }
    let t = 2 * tau;
    let u3 = if u3_active { 1 } else { 0 };
    let u2 = if u2_active { 1 } else { 0 };
    // 2 u3 z (1 - z) + u2 z^2
    let inner = &(&BiPoly::term(2, 1, u3) - &BiPoly::term(2, 2, u3)) + &BiPoly::term(1, 2, u2);
    let den = &(&zp(&[1, 0, -1]) * &zp(&[1, -1]).pow(2)) - &(&inner * &zpow(t));
    Ok((zpow(t), den))
}

/// Generating function of all structures inflated from a fixed shape with
/// `s` arcs of which `m` are 1-arcs:
/// `(1-z)^{-1} η^s (u1 z)^m`, with the marker of `kind` active.
pub fn stem_inflation(
    s: usize,
    m: usize,
    tau: usize,
    order: usize,
    u_cap: usize,
    kind: LoopKind,
) -> Result<BSeries> {
    if m > s {
        return Err(Error::InvalidArgument(format!(
            "a shape with {s} arcs cannot have {m} 1-arcs"
        )));
    }
    let (x, y) = substitutions(kind, tau, order, u_cap)?;
    let mut out = geometric(order, u_cap);
    for _ in 0..s {
        out = out.mul(&x)?;
    }
    for _ in 0..m {
        out = out.mul(&y)?;
    }
    Ok(out)
}

/// The shape variables `(x, y)` for a marker: `x = η(..)` and `y = u z` for
/// hairpins, `y = z` otherwise.
fn substitutions(kind: LoopKind, tau: usize, order: usize, u_cap: usize) -> Result<(BSeries, BSeries)> {
    let x = eta_series(
        tau,
        order,
        u_cap,
        kind == LoopKind::Interior,
        kind == LoopKind::Bulge,
    )?;
    let y = match kind {
        LoopKind::Hairpin => BiPoly::term(1, 1, 1),
        _ => BiPoly::z(),
    }
    .to_bseries(order, u_cap)?;
    Ok((x, y))
}

fn geometric(order: usize, u_cap: usize) -> BSeries {
    let ones = vec![UPoly::one(); order + 1];
    BSeries::from_coeffs(order, u_cap, ones).expect("constant coefficients")
}

/// Shape counts `i_k(s, m)`: stack-free k-noncrossing matchings with `s` arcs
/// of which `m` are 1-arcs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeGfTable {
    pub k: usize,
    pub s_max: usize,
    /// `entries[s][m]` for `m <= s`.
    #[serde(serialize_with = "as_strings")]
    pub entries: Vec<Vec<BigInt>>,
}

fn as_strings<S: Serializer>(rows: &[Vec<BigInt>], ser: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(BigInt::to_string).collect())
        .collect();
    text.serialize(ser)
}

impl ShapeGfTable {
    pub fn zeros(k: usize, s_max: usize) -> Self {
        ShapeGfTable {
            k,
            s_max,
            entries: (0..=s_max).map(|s| vec![BigInt::zero(); s + 1]).collect(),
        }
    }

    /// `i_k(s, m)`, zero outside the table.
    pub fn get(&self, s: usize, m: usize) -> BigInt {
        self.entries
            .get(s)
            .and_then(|row| row.get(m))
            .cloned()
            .unwrap_or_default()
    }

    /// Small-value accessor for tests and display.
    pub fn get_u64(&self, s: usize, m: usize) -> u64 {
        self.get(s, m).to_u64().expect("count fits in u64")
    }

    pub fn add(&mut self, s: usize, m: usize, count: u64) {
        self.entries[s][m] += count;
    }
}

/// `i_k(s, m)` for `s <= s_max` from
/// `I_k(x, y) = (1+x)/(1+2x-xy) * F_k(x(1+x)/(1+2x-xy)^2)`,
/// computed as a series in `x` with `y` as the marker.
pub fn shape_gf(k: usize, s_max: usize) -> Result<ShapeGfTable> {
    check_range("k", k, MIN_K, crate::matchings::MAX_K)?;
    // z plays x, u plays y
    let one_plus_x = zp(&[1, 1]);
    let d = &zp(&[1, 2]) - &BiPoly::term(1, 1, 1);
    let pre = rational_to_series(&one_plus_x, &d, s_max, s_max)?;
    let arg = rational_to_series(&(&BiPoly::z() * &one_plus_x), &d.pow(2), s_max, s_max)?;
    let fk = fk_ogf(k, s_max)?;
    let gf = pre.mul(&compose(&fk, &arg)?)?;
    let mut table = ShapeGfTable::zeros(k, s_max);
    for s in 0..=s_max {
        let row = gf.coeff(s);
        for m in 0..=s {
            let c = row.coeff(m);
            if !c.is_integer() {
                return Err(Error::Degenerate(format!("i_{k}({s},{m}) = {c} is not an integer")));
            }
            table.entries[s][m] = c.to_integer();
        }
        if row.degree().is_some_and(|d| d > s) {
            return Err(Error::Degenerate(format!("shape row {s} has more 1-arcs than arcs")));
        }
    }
    Ok(table)
}

/// `[z^0..z^N]` of the closed form, coefficients being polynomials in `u`.
pub fn loop_gf(req: &GfRequest) -> Result<BSeries> {
    req.validate()?;
    let form = LoopForm::new(req.kind, req.tau);
    let (n, cap) = (req.order, req.u_cap);
    let pre = rational_to_series(&form.prefactor_num, &form.prefactor_den, n, cap)?;
    let arg = rational_to_series(&form.arg_num, &form.arg_den, n, cap)?;
    let fk = fk_ogf(req.k, n / (2 * req.tau))?;
    Ok(pre.mul(&compose(&fk, &arg)?)?)
}

/// The closed form with the marker fixed to a value; `u = 1` gives the total
/// structure counts. Much cheaper than [`loop_gf`] for large `N`.
pub fn loop_gf_at(kind: LoopKind, k: usize, tau: usize, order: usize, u: &ExactRational) -> Result<USeries> {
    check_k_tau(k, tau)?;
    let form = LoopForm::new(kind, tau);
    let pre = rational_to_useries_at(&form.prefactor_num, &form.prefactor_den, u, order)?;
    let arg = rational_to_useries_at(&form.arg_num, &form.arg_den, u, order)?;
    let fk = fk_ogf(k, order / (2 * tau))?;
    Ok(pre.mul(&compose(&fk, &arg)?))
}

/// `Σ_{s,m} i_k(s,m) T_{s,m}`: the loop generating function assembled from
/// shapes, independent of the closed form.
pub fn shape_sum(req: &GfRequest) -> Result<BSeries> {
    req.validate()?;
    let (n, cap) = (req.order, req.u_cap);
    let s_max = n / (2 * req.tau);
    let table = shape_gf(req.k, s_max)?;
    let (x, y) = substitutions(req.kind, req.tau, n, cap)?;
    let mut y_pows = vec![BSeries::one(n, cap)];
    for m in 1..=s_max {
        y_pows.push(y_pows[m - 1].mul(&y)?);
    }
    let mut total = BSeries::zero(n, cap);
    let mut x_pow = BSeries::one(n, cap);
    for s in 0..=s_max {
        let mut by_m = BSeries::zero(n, cap);
        for m in 0..=s {
            let c = table.get(s, m);
            if !c.is_zero() {
                by_m = by_m.add(&y_pows[m].scale(&ExactRational::from_integer(c)))?;
            }
        }
        total = total.add(&x_pow.mul(&by_m)?)?;
        x_pow = x_pow.mul(&x)?;
    }
    Ok(total.mul(&geometric(n, cap))?)
}

/// Outcome of comparing the closed form with the shape sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossDerivationReport {
    pub kind: LoopKind,
    pub k: usize,
    pub tau: usize,
    pub order: usize,
    pub matches: bool,
    /// First `n` where `[z^n]` differs.
    pub first_mismatch: Option<usize>,
}

pub fn cross_derivation_check(req: &GfRequest) -> Result<CrossDerivationReport> {
    let closed = loop_gf(req)?;
    let summed = shape_sum(req)?;
    let first_mismatch = (0..=req.order).find(|&n| closed.coeff(n) != summed.coeff(n));
    Ok(CrossDerivationReport {
        kind: req.kind,
        k: req.k,
        tau: req.tau,
        order: req.order,
        matches: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Smallest `n` whose coefficient has a nonzero `u`-linear term.
pub fn first_marked_degree(gf: &BSeries) -> Option<usize> {
    gf.coeffs().iter().position(|p| !p.coeff(1).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn kind_names_round_trip() {
        for kind in LoopKind::ALL {
            assert_eq!(kind.name().parse::<LoopKind>().unwrap(), kind);
            assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{kind}\""));
        }
        assert!("stem".parse::<LoopKind>().is_err());
    }

    #[test]
    fn eta_low_terms() {
        let eta = eta_series(1, 6, 3, false, false).unwrap();
        let low: Vec<_> = (0..4).map(|n| eta.coeff(n).clone()).collect();
        assert_eq!(low, vec![UPoly::zero(), UPoly::zero(), UPoly::one(), UPoly::from_ints(&[2])]);
        for tau in 1..=4 {
            let eta = eta_series(tau, 2 * tau + 2, 2, true, false).unwrap();
            assert_eq!(eta.valuation(), Some(2 * tau));
            assert!(eta.coeff(2 * tau).is_one());
        }
        assert!(eta_series(1, 4, 2, true, true).is_err());
    }

    #[test]
    fn inflation_examples() {
        let empty = stem_inflation(0, 0, 1, 5, 2, LoopKind::Hairpin).unwrap();
        assert!(empty.coeffs().iter().all(UPoly::is_one));

        let t = stem_inflation(1, 1, 1, 6, 3, LoopKind::Hairpin).unwrap();
        assert_eq!(t.valuation(), Some(3));
        assert_eq!(t.coeff(3), &UPoly::from_ints(&[0, 1]));

        let t = stem_inflation(1, 1, 2, 8, 4, LoopKind::Hairpin).unwrap();
        assert_eq!(t.valuation(), Some(5));
        assert_eq!(t.coeff(5), &UPoly::from_ints(&[0, 1]));

        assert!(stem_inflation(1, 2, 1, 6, 3, LoopKind::Bulge).is_err());
    }

    #[test]
    fn shape_table_examples() {
        let t = shape_gf(2, 3).unwrap();
        assert_eq!(t.get_u64(0, 0), 1);
        assert_eq!((t.get_u64(1, 0), t.get_u64(1, 1)), (0, 1));
        assert_eq!((t.get_u64(2, 0), t.get_u64(2, 1), t.get_u64(2, 2)), (0, 0, 1));
        let t = shape_gf(3, 2).unwrap();
        assert_eq!((t.get_u64(2, 0), t.get_u64(2, 2)), (1, 1));
    }

    #[test]
    fn hairpin_length_three() {
        let gf = loop_gf(&GfRequest::new(LoopKind::Hairpin, 2, 1, 6)).unwrap();
        assert_eq!(gf.coeff(3), &UPoly::from_ints(&[1, 1]));
        assert_eq!(gf.coeff(3).to_string(), "1 + u");
    }

    #[test]
    fn short_lengths_are_unpaired() {
        for kind in LoopKind::ALL {
            for (k, tau) in [(2, 1), (3, 2), (7, 10)] {
                let gf = loop_gf(&GfRequest::new(kind, k, tau, 2)).unwrap();
                assert!(gf.coeffs().iter().all(UPoly::is_one), "{kind} {k} {tau}");
            }
        }
    }

    #[test]
    fn kinds_agree_at_one() {
        for (k, tau) in [(2, 1), (3, 1), (4, 2)] {
            let totals: Vec<USeries> = LoopKind::ALL
                .iter()
                .map(|&kind| loop_gf(&GfRequest::new(kind, k, tau, 16)).unwrap().specialize(&rat(1)))
                .collect();
            assert_eq!(totals[0], totals[1]);
            assert_eq!(totals[0], totals[2]);
            let direct = loop_gf_at(LoopKind::Bulge, k, tau, 16, &rat(1)).unwrap();
            assert_eq!(direct, totals[0]);
        }
    }

    #[test]
    fn secondary_structure_totals() {
        let t = loop_gf_at(LoopKind::Hairpin, 2, 1, 7, &rat(1)).unwrap();
        assert_eq!(t, USeries::from_ints(7, &[1, 1, 1, 2, 4, 8, 17, 37]));
    }

    #[test]
    fn no_hairpins_means_no_arcs() {
        let gf = loop_gf(&GfRequest::new(LoopKind::Hairpin, 2, 1, 20)).unwrap();
        assert!(gf.specialize(&rat(0)).coeffs().iter().all(|c| *c == rat(1)));
        // with crossings allowed, {(1,4),(2,5)} has no hairpin-loop
        let gf = loop_gf(&GfRequest::new(LoopKind::Hairpin, 3, 1, 5)).unwrap();
        assert!(gf.coeff(5).coeff(0) > rat(1));
    }

    #[test]
    fn marked_valuations() {
        for tau in 1..=3 {
            let order = 4 * tau + 6;
            let first = |kind| first_marked_degree(&loop_gf(&GfRequest::new(kind, 3, tau, order)).unwrap());
            assert_eq!(first(LoopKind::Hairpin), Some(2 * tau + 1));
            assert_eq!(first(LoopKind::Interior), Some(4 * tau + 3));
            assert_eq!(first(LoopKind::Bulge), Some(4 * tau + 2));
        }
    }

    #[test]
    fn nonnegative_integer_coefficients() {
        for kind in LoopKind::ALL {
            let gf = loop_gf(&GfRequest::new(kind, 3, 1, 18)).unwrap();
            for p in gf.coeffs() {
                assert!(p.coeffs().iter().all(|c| c.is_integer() && *c >= rat(0)));
            }
        }
    }

    #[test]
    fn shape_sum_matches_closed_form() {
        for kind in LoopKind::ALL {
            let r = cross_derivation_check(&GfRequest::new(kind, 2, 1, 10)).unwrap();
            assert!(r.matches, "{r:?}");
        }
        let r = cross_derivation_check(&GfRequest::new(LoopKind::Bulge, 3, 2, 12)).unwrap();
        assert!(r.matches, "{r:?}");
        let r = cross_derivation_check(&GfRequest::new(LoopKind::Interior, 4, 1, 0)).unwrap();
        assert!(r.matches);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for kind in LoopKind::ALL {
            let gf = loop_gf(&GfRequest::new(kind, 3, 1, 9)).unwrap();
            for n in 0..=9 {
                let h = crate::enumerate::histogram(3, 1, n, kind).unwrap();
                assert_eq!(gf.coeff(n), &h, "{kind} n={n}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(loop_gf(&GfRequest::new(LoopKind::Hairpin, 8, 1, 4)).is_err());
        assert!(loop_gf(&GfRequest::new(LoopKind::Hairpin, 2, 11, 4)).is_err());
        assert!(loop_gf(&GfRequest::new(LoopKind::Hairpin, 2, 0, 4)).is_err());
    }
}
