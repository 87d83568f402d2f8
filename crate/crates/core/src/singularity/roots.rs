//! Real root isolation for rational polynomials: Sturm sequences for
//! counting, bisection for refinement. All arithmetic is exact.

use num_traits::{Signed, Zero};

use crate::series::{ExactRational, Poly};

/// `p / gcd(p, p')`, made primitive. Same roots, all simple.
pub fn squarefree(p: &Poly) -> Poly {
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return p.primitive();
    }
    p.div_rem(&g).0.primitive()
}

/// Removes from `p` every root shared with `q`.
pub fn without_common_roots(p: &Poly, q: &Poly) -> Poly {
    let mut p = p.clone();
    loop {
        let g = p.gcd(q);
        if g.degree().unwrap_or(0) == 0 {
            return p;
        }
        p = p.div_rem(&g).0;
    }
}

/// Coprime integer coefficients, same sign as `p`. Sturm sequences need the
/// signs, so [`Poly::primitive`] (which normalizes the leading sign) won't do.
fn shrink(p: &Poly) -> Poly {
    let q = p.primitive();
    if p.leading().is_some_and(|l| l.is_negative()) {
        -q
    } else {
        q
    }
}

#[derive(Debug, Clone)]
pub struct Sturm {
    seq: Vec<Poly>,
}

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        let mut seq = vec![shrink(p)];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(shrink(&d));
        }
        while seq.len() >= 2 {
            let (a, b) = (&seq[seq.len() - 2], &seq[seq.len() - 1]);
            let r = a.div_rem(b).1;
            if r.is_zero() {
                break;
            }
            seq.push(shrink(&-r));
        }
        Sturm { seq }
    }

    pub fn poly(&self) -> &Poly {
        &self.seq[0]
    }

    fn sign_changes(&self, x: &ExactRational) -> usize {
        let mut changes = 0;
        let mut last: Option<bool> = None;
        for p in &self.seq {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if last.is_some_and(|l| l != pos) {
                changes += 1;
            }
            last = Some(pos);
        }
        changes
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &ExactRational, b: &ExactRational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}

/// `1 + max |a_i / a_n|`, an upper bound on the moduli of the roots.
pub fn cauchy_bound(p: &Poly) -> ExactRational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let max = p
        .coeffs()
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_default();
    max + ExactRational::from_integer(1.into())
}

/// The smallest root of `p` in `(lo, hi]`, to within `2^-bits`.
pub fn smallest_root(p: &Poly, lo: &ExactRational, hi: &ExactRational, bits: u32) -> Option<ExactRational> {
    if p.degree().unwrap_or(0) == 0 {
        return None;
    }
    let sf = squarefree(p);
    let sturm = Sturm::new(&sf);
    let (mut a, mut b) = (lo.clone(), hi.clone());
    if sturm.count(&a, &b) == 0 {
        return None;
    }
    let two = ExactRational::from_integer(2.into());
    while sturm.count(&a, &b) > 1 {
        let mid = (&a + &b) / &two;
        if sturm.count(&a, &mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(refine(&sf, a, b, bits))
}

/// Bisects an interval `(a, b]` holding exactly one simple root.
fn refine(p: &Poly, mut a: ExactRational, mut b: ExactRational, bits: u32) -> ExactRational {
    let two = ExactRational::from_integer(2.into());
    let tol = ExactRational::new(1.into(), num_bigint::BigInt::from(1) << bits);
    let pb = p.eval(&b);
    if pb.is_zero() {
        return b;
    }
    let b_positive = pb.is_positive();
    while &b - &a > tol {
        let mid = (&a + &b) / &two;
        let v = p.eval(&mid);
        if v.is_zero() {
            return mid;
        }
        if v.is_positive() == b_positive {
            b = mid;
        } else {
            a = mid;
        }
    }
    (a + b) / two
}

/// Smallest positive root, if any.
pub fn smallest_positive_root(p: &Poly, bits: u32) -> Option<ExactRational> {
    let p = strip_zero_roots(p);
    if p.degree().unwrap_or(0) == 0 {
        return None;
    }
    let bound = cauchy_bound(&p);
    smallest_root(&p, &ExactRational::zero(), &bound, bits)
}

/// Divides out the largest power of `x` dividing `p`.
pub fn strip_zero_roots(p: &Poly) -> Poly {
    let skip = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    Poly::from_coeffs(p.coeffs()[skip..].to_vec())
}
