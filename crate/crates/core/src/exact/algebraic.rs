//! Real algebraic numbers as (square-free polynomial, isolating interval).

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};

use super::upoly::{sturm_count, UPoly};
use crate::scalar::{Rational, Real, Sign};

#[derive(Clone, Debug)]
pub enum RealAlgebraic {
    Rational(Rational),
    /// The unique root of `poly` in the open interval `(lo, hi)`. `poly` is
    /// square-free and does not vanish at either endpoint.
    Root { poly: UPoly, lo: Rational, hi: Rational },
}

impl RealAlgebraic {
    pub fn rational(r: Rational) -> Self {
        Self::Rational(r)
    }

    /// Builds a root from an isolating interval, switching to an exact
    /// rational when a low-height rational root turns up while refining.
    pub(crate) fn from_isolating(poly: UPoly, lo: Rational, hi: Rational) -> Self {
        let mut this = Self::Root { poly, lo, hi };
        for _ in 0..48 {
            let Self::Root { poly, lo, hi } = &this else { break };
            let c = simplest_between(lo, hi);
            if poly.eval(&c).is_zero() {
                return Self::Rational(c);
            }
            this.refine();
        }
        this
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Self::Rational(r) => Some(r),
            Self::Root { .. } => None,
        }
    }

    pub fn lower(&self) -> &Rational {
        match self {
            Self::Rational(r) => r,
            Self::Root { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            Self::Rational(r) => r,
            Self::Root { hi, .. } => hi,
        }
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        let Self::Root { poly, lo, hi } = self else { return };
        let mid = (&*lo + &*hi) / Rational::from_integer(2.into());
        let s_mid = poly.sign_at(&mid);
        if s_mid == Sign::Zero {
            *self = Self::Rational(mid);
            return;
        }
        if poly.sign_at(lo) != s_mid {
            *hi = mid;
        } else {
            *lo = mid;
        }
    }

    fn refine_to_width(&mut self, width: &Rational) {
        while let Self::Root { lo, hi, .. } = self {
            if &(&*hi - &*lo) < width {
                break;
            }
            self.refine();
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Rational(r) => Real::to_f64(r),
            Self::Root { lo, hi, .. } => {
                let scale = Real::to_f64(&lo.abs()).max(Real::to_f64(&hi.abs())).max(1e-300);
                let mut tight = self.clone();
                let tol = Rational::from_float(scale * 1e-18).unwrap_or_else(Rational::zero);
                let tol = if tol.is_zero() { Rational::new(1.into(), num::pow(num::BigInt::from(2), 1100)) } else { tol };
                tight.refine_to_width(&tol);
                let mid = (tight.lower() + tight.upper()) / Rational::from_integer(2.into());
                Real::to_f64(&mid)
            }
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign_of_poly(&UPoly::x())
    }

    /// Exact sign of `q` evaluated at this number.
    pub fn sign_of_poly(&self, q: &UPoly) -> Sign {
        if q.is_zero() {
            return Sign::Zero;
        }
        let Self::Root { poly, lo, hi } = self else {
            return q.sign_at(self.as_rational().unwrap());
        };
        let g = UPoly::gcd(poly, q);
        if g.degree().unwrap_or(0) >= 1 && g.count_roots_between(lo, hi) >= 1 {
            return Sign::Zero;
        }
        let qs = q.square_free();
        if qs.degree().unwrap_or(0) == 0 {
            return q.sign_at(lo);
        }
        let seq = qs.sturm_sequence();
        let mut this = self.clone();
        loop {
            match &this {
                Self::Rational(r) => return q.sign_at(r),
                Self::Root { lo, hi, .. } => {
                    if sturm_count(&seq, lo, hi) == 0 {
                        return q.sign_at(hi);
                    }
                }
            }
            this.refine();
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Rational(a), Self::Rational(b)) => a.cmp(b),
            (Self::Rational(r), b @ Self::Root { .. }) => cmp_rational_root(r, b),
            (a @ Self::Root { .. }, Self::Rational(r)) => cmp_rational_root(r, a).reverse(),
            (Self::Root { .. }, Self::Root { poly: pb, .. }) => {
                if self.sign_of_poly(pb) == Sign::Zero {
                    // `self` is some root of pb; it equals `other` iff it lies in other's interval.
                    let (blo, bhi) = (other.lower().clone(), other.upper().clone());
                    let mut a = self.clone();
                    loop {
                        if let Self::Rational(r) = &a {
                            return cmp_rational_root(r, other).reverse();
                        }
                        if a.lower() >= &blo && a.upper() <= &bhi {
                            return Ordering::Equal;
                        }
                        if a.upper() <= &blo {
                            return Ordering::Less;
                        }
                        if a.lower() >= &bhi {
                            return Ordering::Greater;
                        }
                        a.refine();
                    }
                }
                let (mut a, mut b) = (self.clone(), other.clone());
                loop {
                    if let Self::Rational(r) = &a {
                        return cmp_rational_root(r, &b);
                    }
                    if let Self::Rational(r) = &b {
                        return cmp_rational_root(r, &a).reverse();
                    }
                    if a.upper() <= b.lower() {
                        return Ordering::Less;
                    }
                    if b.upper() <= a.lower() {
                        return Ordering::Greater;
                    }
                    a.refine();
                    b.refine();
                }
            }
        }
    }

    /// A rational strictly between `a < b`, preferring small height.
    pub fn rational_between(a: &Self, b: &Self) -> Rational {
        assert_eq!(a.cmp_exact(b), Ordering::Less, "rational_between needs a < b");
        let (mut a, mut b) = (a.clone(), b.clone());
        loop {
            if a.upper() < b.lower() {
                return simplest_between(a.upper(), b.lower());
            }
            if matches!(a, Self::Rational(_)) && matches!(b, Self::Rational(_)) {
                unreachable!("ordered rationals always separate");
            }
            a.refine();
            b.refine();
        }
    }
}

fn cmp_rational_root(r: &Rational, b: &RealAlgebraic) -> Ordering {
    let mut b = b.clone();
    loop {
        match &b {
            RealAlgebraic::Rational(s) => return r.cmp(s),
            RealAlgebraic::Root { poly, lo, hi } => {
                if r <= lo {
                    return Ordering::Less;
                }
                if r >= hi {
                    return Ordering::Greater;
                }
                if poly.eval(r).is_zero() {
                    return Ordering::Equal;
                }
            }
        }
        b.refine();
    }
}

/// The rational of least height in the open interval `(lo, hi)`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    if lo.is_negative() && hi.is_positive() {
        return Rational::zero();
    }
    if !hi.is_positive() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    let next = &fl + Rational::one();
    if &next < hi {
        return next;
    }
    if &fl == lo {
        let inv = Rational::one() / (hi - &fl);
        return fl + Rational::one() / (inv.floor() + Rational::one());
    }
    let a = Rational::one() / (hi - &fl);
    let b = Rational::one() / (lo - &fl);
    fl + Rational::one() / simplest_between(&a, &b)
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => write!(f, "{r}"),
            Self::Root { poly, .. } => write!(f, "root of {} near {:.12}", poly, self.to_f64()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(2, 3)), rat(1, 2));
        assert_eq!(simplest_between(&rat(-5, 2), &rat(7, 2)), int(0));
        assert_eq!(simplest_between(&rat(31, 10), &rat(33, 10)), rat(13, 4));
        assert_eq!(simplest_between(&int(2), &rat(5, 2)), rat(7, 3));
        let s = simplest_between(&rat(-9, 4), &int(-2));
        assert!(s > rat(-9, 4) && s < int(-2));
    }

    #[test]
    fn sign_of_poly_at_sqrt2() {
        let roots = UPoly::from_ints(&[-2, 0, 1]).real_roots();
        let s2 = &roots[1];
        // x^2 - 2 vanishes, x - 1 is positive, 2x^2 - 4 vanishes, x - 3/2 negative
        assert_eq!(s2.sign_of_poly(&UPoly::from_ints(&[-2, 0, 1])), Sign::Zero);
        assert_eq!(s2.sign_of_poly(&UPoly::from_ints(&[-1, 1])), Sign::Positive);
        assert_eq!(s2.sign_of_poly(&UPoly::from_ints(&[-4, 0, 2])), Sign::Zero);
        assert_eq!(s2.sign_of_poly(&UPoly::new(vec![rat(-3, 2), int(1)])), Sign::Negative);
        // (x^2-2)(x-5): vanishes at sqrt2 too
        let q = UPoly::from_ints(&[-2, 0, 1]).mul(&UPoly::from_ints(&[-5, 1]));
        assert_eq!(s2.sign_of_poly(&q), Sign::Zero);
        assert_eq!(roots[0].sign(), Sign::Negative);
    }

    #[test]
    fn comparisons() {
        let r2 = UPoly::from_ints(&[-2, 0, 1]).real_roots();
        let r3 = UPoly::from_ints(&[-3, 0, 1]).real_roots();
        assert_eq!(r2[1].cmp_exact(&r3[1]), Ordering::Less);
        assert_eq!(r3[0].cmp_exact(&r2[0]), Ordering::Less);
        // the same number presented by a different polynomial: x^4 - 4
        let alt = UPoly::from_ints(&[-4, 0, 0, 0, 1]).real_roots();
        assert_eq!(alt.len(), 2);
        assert_eq!(alt[1].cmp_exact(&r2[1]), Ordering::Equal);
        let q = RealAlgebraic::rational(rat(7, 5));
        assert_eq!(q.cmp_exact(&r2[1]), Ordering::Less);
        let between = RealAlgebraic::rational_between(&r2[1], &r3[1]);
        assert!(between > rat(141, 100) && Real::to_f64(&between) < 3f64.sqrt());
    }
}
