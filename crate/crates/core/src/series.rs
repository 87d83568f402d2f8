//! Exact polynomials and truncated power series over big rationals.
//!
//! Everything here is exact. A [`USeries`] is a power series in `z` truncated
//! after `z^N`; a [`BSeries`] additionally carries a polynomial in the marker
//! variable `u` at every power of `z`, with an explicit cap on the `u`-degree.
//! Neither type ever grows its truncation order or cap on its own: a product
//! that would need a larger cap is rejected with
//! [`SeriesError::UDegreeOverflow`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// Polynomial in the marker variable `u`.
pub type UPoly = Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("u-caps differ: {left} vs {right}")]
    CapMismatch { left: usize, right: usize },
    #[error("u-degree {degree} exceeds the cap {cap}; raise the u-cap")]
    UDegreeOverflow { degree: usize, cap: usize },
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("inner series of a composition must have zero constant term")]
    NonZeroConstant,
}

pub(crate) fn rat(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

pub(crate) fn ratio(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

/// Brings a slice of rationals over a common denominator.
fn common_denominator(values: &[ExactRational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for v in values {
        if !v.denom().is_one() {
            den = den.lcm(v.denom());
        }
    }
    let nums = values
        .iter()
        .map(|v| {
            if v.denom() == &den {
                v.numer().clone()
            } else {
                v.numer() * (&den / v.denom())
            }
        })
        .collect();
    (nums, den)
}

fn from_common(nums: Vec<BigInt>, den: &BigInt) -> Vec<ExactRational> {
    if den.is_one() {
        nums.into_iter().map(ExactRational::from_integer).collect()
    } else {
        nums.into_iter()
            .map(|n| ExactRational::new(n, den.clone()))
            .collect()
    }
}

/// Truncated product of two coefficient lists; only the first `len`
/// coefficients are produced.
fn convolve(a: &[ExactRational], b: &[ExactRational], len: usize) -> Vec<ExactRational> {
    let len = len.min((a.len() + b.len()).saturating_sub(1));
    if len == 0 || a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (an, ad) = common_denominator(a);
    let (bn, bd) = common_denominator(b);
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in an.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in bn.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    from_common(out, &(ad * bd))
}

// ---------------------------------------------------------------------------
// Poly

/// Dense univariate polynomial with exact rational coefficients.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient list and `degree()` is the index of the last entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<ExactRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(ExactRational::one())
    }

    pub fn constant(c: ExactRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::monomial(ExactRational::one(), 1)
    }

    pub fn monomial(c: ExactRational, degree: usize) -> Self {
        let mut coeffs = vec![ExactRational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ExactRational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ExactRational {
        self.coeffs.get(i).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&ExactRational> {
        self.coeffs.last()
    }

    /// Value at `x`. Horner's scheme runs on integers: with `x = a/b` and
    /// coefficients over a common denominator `D`, the value is
    /// `sum c_i a^i b^(d-i) / (D b^d)`, reduced once at the end.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let Some(d) = self.degree() else {
            return ExactRational::zero();
        };
        let (nums, den) = common_denominator(&self.coeffs);
        let (a, b) = (x.numer(), x.denom());
        let mut acc = nums[d].clone();
        let mut b_pow = BigInt::one();
        for c in nums[..d].iter().rev() {
            b_pow *= b;
            acc = acc * a + c * &b_pow;
        }
        ExactRational::new(acc, den * b_pow)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &ExactRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Product reduced modulo `x^(max_degree + 1)`.
    pub fn mul_trunc(&self, other: &Poly, max_degree: usize) -> Poly {
        Poly::from_coeffs(convolve(&self.coeffs, &other.coeffs, max_degree + 1))
    }

    pub fn truncate(&self, max_degree: usize) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if sd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![ExactRational::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Scales to a polynomial with coprime integer coefficients and positive
    /// leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let (nums, _) = common_denominator(&self.coeffs);
        let mut g = BigInt::zero();
        for n in &nums {
            g = g.gcd(n);
        }
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        Poly::from_coeffs(
            nums.into_iter()
                .map(|n| ExactRational::from_integer(n / &g))
                .collect(),
        )
    }

    /// Greatest common divisor, normalized with [`Poly::primitive`].
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Human-readable rendering in ascending powers, e.g. `1 + 3*u + u^2`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let monomial = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if monomial.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&monomial);
            } else {
                out.push_str(&format!("{mag}*{monomial}"));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("u"))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::from_coeffs(convolve(&self.coeffs, &rhs.coeffs, usize::MAX))
    }
}

// ---------------------------------------------------------------------------
// BiPoly

/// Polynomial in `z` whose coefficients are polynomials in `u`.
///
/// Used for the numerators and denominators of the rational closed forms and
/// for the singularity equations built from them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BiPoly {
    coeffs: Vec<UPoly>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        BiPoly::from_coeffs(vec![UPoly::one()])
    }

    pub fn constant(c: i64) -> Self {
        BiPoly::from_coeffs(vec![UPoly::constant(rat(c))])
    }

    pub fn z() -> Self {
        BiPoly::from_coeffs(vec![UPoly::zero(), UPoly::one()])
    }

    pub fn u() -> Self {
        BiPoly::from_coeffs(vec![UPoly::x()])
    }

    /// `c * z^i * u^j`
    pub fn term(c: i64, z_degree: usize, u_degree: usize) -> Self {
        let mut coeffs = vec![UPoly::zero(); z_degree + 1];
        coeffs[z_degree] = UPoly::monomial(rat(c), u_degree);
        BiPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<UPoly>) -> Self {
        while coeffs.last().is_some_and(UPoly::is_zero) {
            coeffs.pop();
        }
        BiPoly { coeffs }
    }

    /// Lifts a polynomial in `z` (no `u`).
    pub fn from_z_poly(p: &Poly) -> Self {
        BiPoly::from_coeffs(p.coeffs().iter().cloned().map(UPoly::constant).collect())
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn z_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn u_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(UPoly::degree).max()
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut acc = BiPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &ExactRational) -> BiPoly {
        BiPoly::from_coeffs(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn partial_z(&self) -> BiPoly {
        BiPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, p)| p.scale(&rat(i as i64)))
                .collect(),
        )
    }

    pub fn partial_u(&self) -> BiPoly {
        BiPoly::from_coeffs(self.coeffs.iter().map(UPoly::derivative).collect())
    }

    /// Substitutes a value for `u`, leaving a polynomial in `z`.
    pub fn specialize_u(&self, u: &ExactRational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|p| p.eval(u)).collect())
    }

    pub fn eval(&self, z: &ExactRational, u: &ExactRational) -> ExactRational {
        self.specialize_u(u).eval(z)
    }

    pub fn to_bseries(&self, order: usize, u_cap: usize) -> Result<BSeries, SeriesError> {
        BSeries::from_coeffs(order, u_cap, self.coeffs.clone())
    }

    pub fn to_useries_at(&self, u: &ExactRational, order: usize) -> USeries {
        USeries::from_poly(&self.specialize_u(u), order)
    }
}

impl<'a> Add<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = UPoly::zero();
        BiPoly::from_coeffs(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly {
            coeffs: self.coeffs.iter().map(|p| -p).collect(),
        }
    }
}

impl<'a> Mul<&'a BiPoly> for &'a BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![UPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        BiPoly::from_coeffs(out)
    }
}

macro_rules! forward_owned_ops {
    ($ty:ty) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                &self + &rhs
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                &self - &rhs
            }
        }
        impl Mul for $ty {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                &self * &rhs
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                -&self
            }
        }
    };
}

forward_owned_ops!(Poly);
forward_owned_ops!(BiPoly);

// ---------------------------------------------------------------------------
// Series

/// Operations shared by [`USeries`] and [`BSeries`], enough to drive
/// composition and determinant-style elimination generically.
pub trait TruncatedSeries: Clone + Sized {
    fn order(&self) -> usize;
    /// Index of the first nonzero coefficient; `None` for the zero series.
    fn valuation(&self) -> Option<usize>;
    /// A constant series of the given order, shaped like `self`.
    fn constant_like(&self, c: &ExactRational, order: usize) -> Self;
    /// Product truncated to the given order (at most the operands' orders).
    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError>;
    fn add_constant(&mut self, c: &ExactRational);
    fn extended_to(&self, order: usize) -> Self;
}

/// Power series in `z` with exact rational coefficients, truncated after
/// `z^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct USeries {
    coeffs: Vec<ExactRational>,
}

impl USeries {
    pub fn zero(order: usize) -> Self {
        USeries {
            coeffs: vec![ExactRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        USeries::constant(ExactRational::one(), order)
    }

    pub fn constant(c: ExactRational, order: usize) -> Self {
        let mut s = USeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * z^degree`, vanishing if the degree is past the order.
    pub fn monomial(c: ExactRational, degree: usize, order: usize) -> Self {
        let mut s = USeries::zero(order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    /// Pads with zeros or drops terms past `z^order`.
    pub fn from_coeffs(order: usize, mut coeffs: Vec<ExactRational>) -> Self {
        coeffs.resize(order + 1, ExactRational::zero());
        USeries { coeffs }
    }

    pub fn from_ints(order: usize, coeffs: &[i64]) -> Self {
        USeries::from_coeffs(order, coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        USeries::from_coeffs(order, p.coeffs().iter().take(order + 1).cloned().collect())
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &ExactRational {
        &self.coeffs[n]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check_order(&self, other: &USeries) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &USeries) -> Result<USeries, SeriesError> {
        self.check_order(other)?;
        Ok(USeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &USeries) -> Result<USeries, SeriesError> {
        self.check_order(other)?;
        Ok(USeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Product; the result has the smaller of the two orders.
    pub fn mul(&self, other: &USeries) -> USeries {
        let order = self.order().min(other.order());
        USeries::from_coeffs(order, convolve(&self.coeffs, &other.coeffs, order + 1))
    }

    pub fn scale(&self, c: &ExactRational) -> USeries {
        USeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// d/dz. The top coefficient is unknown after differentiation, so the
    /// order drops by one (an order-0 series differentiates to zero).
    pub fn diff(&self) -> USeries {
        let order = self.order().saturating_sub(1);
        USeries::from_coeffs(
            order,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn recip(&self) -> Result<USeries, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = c0.recip();
        let n = self.order();
        let mut out: Vec<ExactRational> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = ExactRational::zero();
            for i in 1..=k {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc += a * &out[k - i];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(USeries { coeffs: out })
    }

    pub fn truncate(&self, order: usize) -> USeries {
        USeries::from_coeffs(order, self.coeffs.iter().take(order + 1).cloned().collect())
    }

    /// Lifts to a bivariate series with no `u` dependence.
    pub fn to_bseries(&self, u_cap: usize) -> BSeries {
        BSeries {
            u_cap,
            coeffs: self.coeffs.iter().cloned().map(UPoly::constant).collect(),
        }
    }
}

impl TruncatedSeries for USeries {
    fn order(&self) -> usize {
        USeries::order(self)
    }
    fn valuation(&self) -> Option<usize> {
        USeries::valuation(self)
    }
    fn constant_like(&self, c: &ExactRational, order: usize) -> Self {
        USeries::constant(c.clone(), order)
    }
    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        Ok(USeries::from_coeffs(
            order,
            convolve(&self.coeffs, &other.coeffs, order + 1),
        ))
    }
    fn add_constant(&mut self, c: &ExactRational) {
        self.coeffs[0] += c;
    }
    fn extended_to(&self, order: usize) -> Self {
        self.truncate(order)
    }
}

/// Power series in `z` whose coefficients are polynomials in the marker `u`,
/// truncated after `z^N`, with every `u`-degree at most the cap `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BSeries {
    u_cap: usize,
    coeffs: Vec<UPoly>,
}

impl BSeries {
    pub fn zero(order: usize, u_cap: usize) -> Self {
        BSeries {
            u_cap,
            coeffs: vec![UPoly::zero(); order + 1],
        }
    }

    pub fn one(order: usize, u_cap: usize) -> Self {
        let mut s = BSeries::zero(order, u_cap);
        s.coeffs[0] = UPoly::one();
        s
    }

    /// Pads or truncates in `z`; rejects coefficients over the cap.
    pub fn from_coeffs(
        order: usize,
        u_cap: usize,
        mut coeffs: Vec<UPoly>,
    ) -> Result<Self, SeriesError> {
        coeffs.resize(order + 1, UPoly::zero());
        if let Some(degree) = coeffs.iter().filter_map(UPoly::degree).max() {
            if degree > u_cap {
                return Err(SeriesError::UDegreeOverflow {
                    degree,
                    cap: u_cap,
                });
            }
        }
        Ok(BSeries { u_cap, coeffs })
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &UPoly {
        &self.coeffs[n]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn u_cap(&self) -> usize {
        self.u_cap
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check_shape(&self, other: &BSeries) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        if self.u_cap != other.u_cap {
            return Err(SeriesError::CapMismatch {
                left: self.u_cap,
                right: other.u_cap,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &BSeries) -> Result<BSeries, SeriesError> {
        self.check_shape(other)?;
        Ok(BSeries {
            u_cap: self.u_cap,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &BSeries) -> Result<BSeries, SeriesError> {
        self.check_shape(other)?;
        Ok(BSeries {
            u_cap: self.u_cap,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Product with the smaller of the two orders. Caps must agree.
    pub fn mul(&self, other: &BSeries) -> Result<BSeries, SeriesError> {
        if self.u_cap != other.u_cap {
            return Err(SeriesError::CapMismatch {
                left: self.u_cap,
                right: other.u_cap,
            });
        }
        self.mul_to(other, self.order().min(other.order()))
    }

    /// Truncated product; every `u`-polynomial is flattened onto one common
    /// denominator so the inner loop is integer-only.
    fn product(&self, other: &BSeries, order: usize) -> Result<BSeries, SeriesError> {
        let cap = self.u_cap;
        let (a, ad) = flatten(&self.coeffs[..=order.min(self.order())]);
        let (b, bd) = flatten(&other.coeffs[..=order.min(other.order())]);
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new(); order + 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_empty() {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
                if bj.is_empty() {
                    continue;
                }
                let target = &mut out[i + j];
                let width = ai.len() + bj.len() - 1;
                if target.len() < width {
                    target.resize(width, BigInt::zero());
                }
                for (s, x) in ai.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (t, y) in bj.iter().enumerate() {
                        if !y.is_zero() {
                            target[s + t] += x * y;
                        }
                    }
                }
            }
        }
        let den = ad * bd;
        let coeffs: Vec<UPoly> = out
            .into_iter()
            .map(|row| UPoly::from_coeffs(from_common(row, &den)))
            .collect();
        BSeries::from_coeffs(order, cap, coeffs)
    }

    pub fn scale(&self, c: &ExactRational) -> BSeries {
        BSeries {
            u_cap: self.u_cap,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiplies every coefficient by the same `u`-polynomial.
    pub fn scale_poly(&self, p: &UPoly) -> Result<BSeries, SeriesError> {
        BSeries::from_coeffs(
            self.order(),
            self.u_cap,
            self.coeffs.iter().map(|c| c * p).collect(),
        )
    }

    /// d/dz, dropping the order by one like [`USeries::diff`].
    pub fn diff(&self) -> BSeries {
        let order = self.order().saturating_sub(1);
        let mut coeffs: Vec<UPoly> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, p)| p.scale(&rat(i as i64)))
            .collect();
        coeffs.resize(order + 1, UPoly::zero());
        BSeries {
            u_cap: self.u_cap,
            coeffs,
        }
    }

    /// Multiplicative inverse modulo `z^(N+1)` and `u^(U+1)`.
    ///
    /// When the constant term is a plain number the inverse is exact and
    /// overflowing the cap is an error; when it depends on `u` the inverse is
    /// an infinite series in `u` and is truncated at the cap.
    pub fn recip(&self) -> Result<BSeries, SeriesError> {
        let c0 = &self.coeffs[0];
        let u0 = c0.coeff(0);
        if u0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let cap = self.u_cap;
        let truncate_u = c0.degree().unwrap_or(0) > 0;
        let inv0 = if truncate_u {
            truncated_poly_inverse(c0, cap)
        } else {
            UPoly::constant(u0.recip())
        };
        let n = self.order();
        let mut out: Vec<UPoly> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = UPoly::zero();
            for i in 1..=k {
                let a = &self.coeffs[i];
                if !a.is_zero() && !out[k - i].is_zero() {
                    acc = &acc + &(a * &out[k - i]);
                }
            }
            let next = -(&acc * &inv0);
            out.push(if truncate_u { next.truncate(cap) } else { next });
        }
        BSeries::from_coeffs(n, cap, out)
    }

    /// Substitutes a value for `u`.
    pub fn specialize(&self, u: &ExactRational) -> USeries {
        USeries {
            coeffs: self.coeffs.iter().map(|p| p.eval(u)).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> BSeries {
        let mut coeffs: Vec<UPoly> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, UPoly::zero());
        BSeries {
            u_cap: self.u_cap,
            coeffs,
        }
    }

    /// Same series under a different cap; fails if a coefficient would not
    /// fit.
    pub fn with_u_cap(&self, u_cap: usize) -> Result<BSeries, SeriesError> {
        BSeries::from_coeffs(self.order(), u_cap, self.coeffs.clone())
    }
}

impl TruncatedSeries for BSeries {
    fn order(&self) -> usize {
        BSeries::order(self)
    }
    fn valuation(&self) -> Option<usize> {
        BSeries::valuation(self)
    }
    fn constant_like(&self, c: &ExactRational, order: usize) -> Self {
        let mut s = BSeries::zero(order, self.u_cap);
        s.coeffs[0] = UPoly::constant(c.clone());
        s
    }
    fn mul_to(&self, other: &Self, order: usize) -> Result<Self, SeriesError> {
        if self.u_cap != other.u_cap {
            return Err(SeriesError::CapMismatch {
                left: self.u_cap,
                right: other.u_cap,
            });
        }
        self.product(other, order)
    }
    fn add_constant(&mut self, c: &ExactRational) {
        self.coeffs[0] = &self.coeffs[0] + &UPoly::constant(c.clone());
    }
    fn extended_to(&self, order: usize) -> Self {
        self.truncate(order)
    }
}

/// Flattens a list of `u`-polynomials onto one common denominator.
fn flatten(polys: &[UPoly]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut den = BigInt::one();
    for p in polys {
        for c in p.coeffs() {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
    }
    let rows = polys
        .iter()
        .map(|p| {
            p.coeffs()
                .iter()
                .map(|c| c.numer() * (&den / c.denom()))
                .collect()
        })
        .collect();
    (rows, den)
}

/// Inverse of `p` in `Q[u] / u^(cap+1)`; requires `p(0) != 0`.
fn truncated_poly_inverse(p: &UPoly, cap: usize) -> UPoly {
    let inv0 = p.coeff(0).recip();
    let mut out = vec![inv0.clone()];
    for k in 1..=cap {
        let mut acc = ExactRational::zero();
        for i in 1..=k.min(p.degree().unwrap_or(0)) {
            acc += p.coeff(i) * &out[k - i];
        }
        out.push(-acc * &inv0);
    }
    UPoly::from_coeffs(out)
}

/// `outer(inner(z))` modulo `z^(N+1)`, `N` being the inner series' order.
///
/// Horner's scheme over the series ring. Since `inner` has valuation `v >= 1`,
/// outer coefficients past `N / v` cannot contribute and are skipped, and the
/// accumulator at depth `j` only needs precision `N - j*v`.
pub fn compose<S: TruncatedSeries>(outer: &USeries, inner: &S) -> Result<S, SeriesError> {
    let n = inner.order();
    let v = match inner.valuation() {
        Some(0) => return Err(SeriesError::NonZeroConstant),
        Some(v) => v,
        None => return Ok(inner.constant_like(outer.coeff(0), n)),
    };
    let top = outer.order().min(n / v);
    let mut acc = inner.constant_like(outer.coeff(top), n - top * v);
    for j in (0..top).rev() {
        let prec = n - j * v;
        let inner_j = inner.extended_to(prec);
        let acc_j = acc.extended_to(prec);
        acc = inner_j.mul_to(&acc_j, prec)?;
        acc.add_constant(outer.coeff(j));
    }
    Ok(acc.extended_to(n))
}

/// `num / den` expanded to a bivariate series.
pub fn rational_to_series(
    num: &BiPoly,
    den: &BiPoly,
    order: usize,
    u_cap: usize,
) -> Result<BSeries, SeriesError> {
    let d = den.to_bseries(order, u_cap)?.recip()?;
    num.to_bseries(order, u_cap)?.mul(&d)
}

/// Univariate counterpart of [`rational_to_series`] at a fixed marker value.
pub fn rational_to_useries_at(
    num: &BiPoly,
    den: &BiPoly,
    u: &ExactRational,
    order: usize,
) -> Result<USeries, SeriesError> {
    let d = den.to_useries_at(u, order).recip()?;
    Ok(num.to_useries_at(u, order).mul(&d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn useries(order: usize, c: &[i64]) -> USeries {
        USeries::from_ints(order, c)
    }

    fn upoly(c: &[i64]) -> UPoly {
        UPoly::from_ints(c)
    }

    #[test]
    fn difference_of_squares() {
        let a = useries(2, &[1, 1]);
        let b = useries(2, &[1, -1]);
        assert_eq!(a.mul(&b), useries(2, &[1, 0, -1]));
    }

    #[test]
    fn power_rule() {
        let s = useries(3, &[0, 0, 0, 1]);
        assert_eq!(s.diff(), useries(2, &[0, 0, 3]));
    }

    #[test]
    fn binomial_in_u() {
        let s = BSeries::from_coeffs(2, 2, vec![upoly(&[1]), upoly(&[0, 1])]).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.coeff(0), &upoly(&[1]));
        assert_eq!(sq.coeff(1), &upoly(&[0, 2]));
        assert_eq!(sq.coeff(2), &upoly(&[0, 0, 1]));
    }

    #[test]
    fn u_overflow_is_rejected() {
        let s = BSeries::from_coeffs(2, 1, vec![upoly(&[1]), upoly(&[0, 1])]).unwrap();
        assert_eq!(
            s.mul(&s),
            Err(SeriesError::UDegreeOverflow { degree: 2, cap: 1 })
        );
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let a = useries(2, &[1]);
        let b = useries(3, &[1]);
        assert!(matches!(a.add(&b), Err(SeriesError::OrderMismatch { .. })));
        // multiplication drops to the smaller order instead
        assert_eq!(a.mul(&b).order(), 2);
    }

    #[test]
    fn geometric_reciprocals() {
        let s = useries(5, &[1, -1]);
        assert_eq!(s.recip().unwrap(), useries(5, &[1, 1, 1, 1, 1, 1]));
        assert_eq!(useries(4, &[1]).recip().unwrap(), useries(4, &[1]));
        assert_eq!(useries(3, &[0, 1]).recip(), Err(SeriesError::NotInvertible));

        let b = BSeries::from_coeffs(4, 4, vec![upoly(&[1]), upoly(&[0, -1])]).unwrap();
        let r = b.recip().unwrap();
        for n in 0..=4 {
            assert_eq!(r.coeff(n), &UPoly::monomial(rat(1), n));
        }
    }

    #[test]
    fn reciprocal_with_u_dependent_constant_truncates_in_u() {
        // 1/(1+u) in Q[u]/u^4 is 1 - u + u^2 - u^3
        let b = BSeries::from_coeffs(2, 3, vec![upoly(&[1, 1])]).unwrap();
        let r = b.recip().unwrap();
        assert_eq!(r.coeff(0), &upoly(&[1, -1, 1, -1]));
        assert!(r.coeff(1).is_zero());
    }

    #[test]
    fn composition_examples() {
        let geo = useries(8, &[1; 9]);
        let z2 = useries(8, &[0, 0, 1]);
        assert_eq!(
            compose(&geo, &z2).unwrap(),
            useries(8, &[1, 0, 1, 0, 1, 0, 1, 0, 1])
        );

        let outer = useries(6, &[3, -1, 4, 1, -5, 9, 2]);
        let z = useries(6, &[0, 1]);
        assert_eq!(compose(&outer, &z).unwrap(), outer);

        assert_eq!(
            compose(&outer, &useries(6, &[1, 1])),
            Err(SeriesError::NonZeroConstant)
        );
    }

    #[test]
    fn catalan_composed_with_z_minus_z_squared() {
        // Direct expansion: sum_n C_n z^n (1-z)^n up to z^3.
        //   z^0: 1
        //   z^1: C_1 = 1
        //   z^2: C_2 - C_1 = 1
        //   z^3: C_3 - 2 C_2 = 5 - 4 = 1
        // (indeed C(z(1-z)) = 1/(1-z)).
        let catalan = useries(3, &[1, 1, 2, 5]);
        let inner = useries(3, &[0, 1, -1]);
        assert_eq!(compose(&catalan, &inner).unwrap(), useries(3, &[1, 1, 1, 1]));
    }

    #[test]
    fn rational_expansions() {
        let z = BiPoly::z();
        let one = BiPoly::one();
        let two_z = BiPoly::term(2, 1, 0);
        let s = rational_to_series(&(&z * &z), &(&one - &two_z), 5, 0).unwrap();
        assert_eq!(s.specialize(&rat(7)), useries(5, &[0, 0, 1, 2, 4, 8]));

        let s = rational_to_series(&(&one + &z), &one, 3, 0).unwrap();
        assert_eq!(s.specialize(&rat(0)), useries(3, &[1, 1]));

        let uz = BiPoly::term(1, 1, 1);
        let s = rational_to_series(&uz, &(&one - &z), 4, 1).unwrap();
        assert!(s.coeff(0).is_zero());
        for n in 1..=4 {
            assert_eq!(s.coeff(n), &upoly(&[0, 1]));
        }
    }

    #[test]
    fn poly_division_and_gcd() {
        // (x-1)(x-2) and (x-1)(x+3)
        let a = Poly::from_ints(&[2, -3, 1]);
        let b = Poly::from_ints(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-1, 1]));
        let (q, r) = a.div_rem(&Poly::from_ints(&[-1, 1]));
        assert_eq!(q, Poly::from_ints(&[-2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(upoly(&[1, 1]).to_string(), "1 + u");
        assert_eq!(upoly(&[1, 3, 0, -2]).to_string(), "1 + 3*u - 2*u^3");
        assert_eq!(UPoly::zero().to_string(), "0");
        assert_eq!(
            UPoly::from_coeffs(vec![ratio(-1, 2)]).display_in("z"),
            "-1/2"
        );
    }
}
