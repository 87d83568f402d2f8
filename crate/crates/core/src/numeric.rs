//! Rendering and small numeric helpers on exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::series::ExactRational;

/// Decimal string with exactly `digits` places after the point, rounded half
/// away from zero. Platform independent: no binary floats are involved.
pub fn to_decimal(x: &ExactRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = x.abs() * ExactRational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2;
    let rounded = if twice >= *scaled.denom() { q + 1 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded_is_zero(&int_part, &frac_part) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// Decimal string with `digits` significant digits in scientific notation
/// (`d.ddd...e±x`) when the magnitude is small; used for residuals.
pub fn to_scientific(x: &ExactRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let mut exp: i64 = 0;
    let mut m = x.abs();
    let ten = ExactRational::from_integer(BigInt::from(10));
    while m >= ten {
        m /= &ten;
        exp += 1;
    }
    while m < ExactRational::one() {
        m *= &ten;
        exp -= 1;
    }
    let mut mantissa = to_decimal(&m, digits.saturating_sub(1));
    if mantissa.starts_with("10") {
        // rounding carried into a new digit
        m /= &ten;
        exp += 1;
        mantissa = to_decimal(&m, digits.saturating_sub(1));
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{mantissa}e{exp}")
}

pub fn to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational for a finite double.
pub fn from_f64(x: f64) -> ExactRational {
    ExactRational::from_float(x).expect("finite value")
}

/// `exp(x)` to within `2^-bits`, for `|x| <= 1`, by a truncated Taylor sum.
pub fn exp_approx(x: &ExactRational, bits: u32) -> ExactRational {
    let tol = ExactRational::new(BigInt::one(), BigInt::one() << bits);
    let mut term = ExactRational::one();
    let mut sum = ExactRational::one();
    let mut k = 1i64;
    loop {
        term = term * x / ExactRational::from_integer(BigInt::from(k));
        sum += &term;
        if term.abs() < tol {
            return sum;
        }
        k += 1;
    }
}

/// Natural log of a positive big rational as f64, safe for values far outside
/// the f64 range.
pub fn ln(x: &ExactRational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("positive").ln();
    }
    let shift = bits - 900;
    let top: BigInt = n >> shift;
    top.to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Rounds to a dyadic rational with the given number of fractional bits.
pub fn round_dyadic(x: &ExactRational, bits: u32) -> ExactRational {
    let scale = BigInt::one() << bits;
    let scaled = x * ExactRational::from_integer(scale.clone());
    ExactRational::new(scaled.round().to_integer(), scale)
}
