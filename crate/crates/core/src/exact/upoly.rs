//! Univariate polynomials over Q with Sturm-sequence root isolation.

use std::fmt;

use num::{One, Signed, Zero};

use super::algebraic::RealAlgebraic;
use crate::scalar::{int, Rational, Real, Sign};

/// Dense univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + Real::to_f64(c))
    }

    pub fn sign_at(&self, x: &Rational) -> Sign {
        Sign::of_rational(&self.eval(x))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.lead().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) => self.scale(&(Rational::one() / l)),
            None => Self::zero(),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, monic. Same distinct roots, all simple.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    /// Strict bound on the absolute value of every root.
    pub fn root_bound(&self) -> Rational {
        let lead = self.lead().expect("root bound of zero polynomial").abs();
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |m, c| if c > m { c } else { m });
        max + Rational::one()
    }

    /// Distinct real roots in increasing order.
    pub fn real_roots(&self) -> Vec<RealAlgebraic> {
        let p = self.square_free();
        match p.degree() {
            None | Some(0) => return Vec::new(),
            Some(1) => {
                return vec![RealAlgebraic::rational(-&p.coeffs[0] / &p.coeffs[1])];
            }
            _ => {}
        }
        let seq = p.sturm_sequence();
        let b = p.root_bound();
        let mut roots = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let count = sturm_count(&seq, &lo, &hi);
            if count == 0 {
                continue;
            }
            if count == 1 {
                roots.push(RealAlgebraic::from_isolating(p.clone(), lo, hi));
                continue;
            }
            let mid = split_point(&p, &lo, &hi);
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        roots.sort_by(|a, b| a.cmp_exact(b));
        roots
    }

    /// Number of distinct roots of `self` in the open interval `(lo, hi)`;
    /// endpoints must not be roots.
    pub fn count_roots_between(&self, lo: &Rational, hi: &Rational) -> usize {
        let p = self.square_free();
        if p.degree().unwrap_or(0) == 0 {
            return 0;
        }
        sturm_count(&p.sturm_sequence(), lo, hi)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({})", self.to_string_in("x"))
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

fn sign_changes(seq: &[UPoly], x: &Rational) -> usize {
    let mut last = Sign::Zero;
    let mut changes = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == Sign::Zero {
            continue;
        }
        if last != Sign::Zero && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Distinct roots in `(lo, hi]` for the Sturm sequence `seq` of a square-free polynomial.
pub(crate) fn sturm_count(seq: &[UPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_changes(seq, lo).saturating_sub(sign_changes(seq, hi))
}

/// A point strictly inside `(lo, hi)` that is not a root of `p`.
pub(crate) fn split_point(p: &UPoly, lo: &Rational, hi: &Rational) -> Rational {
    let width = hi - lo;
    let mut k: i64 = 2;
    loop {
        for j in 1..k {
            let t = lo + &width * Rational::new(j.into(), k.into());
            if !p.eval(&t).is_zero() {
                return t;
            }
        }
        k += 1;
    }
}
