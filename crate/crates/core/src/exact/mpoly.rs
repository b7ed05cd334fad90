//! Sparse multivariate polynomials over Q.
//!
//! Variables are indices; exponent vectors carry no trailing zeros, so a
//! polynomial does not need to know how many variables exist.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use super::upoly::UPoly;
use crate::scalar::{int, Rational, Real, Ring};

type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn exp(m: &Monomial, var: usize) -> u32 {
    m.get(var).copied().unwrap_or(0)
}

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self { terms }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(int(c))
    }

    pub fn var(i: usize) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = 1;
        Self { terms: BTreeMap::from([(m, Rational::one())]) }
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        match self.terms.entry(trim(m)) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| exp(m, var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Coefficient of `var^d`, a polynomial in the remaining variables.
    pub fn coefficient_in(&self, var: usize, d: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if exp(m, var) == d {
                let mut m = m.clone();
                if var < m.len() {
                    m[var] = 0;
                }
                out.insert(m, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }

    /// Substitutes `var := value`.
    pub fn substitute(&self, var: usize, value: &Self) -> Self {
        let d = self.degree_in(var);
        let mut out = Self::zero();
        for k in (0..=d).rev() {
            out = out * value.clone() + self.coefficient_in(var, k);
        }
        out
    }

    /// `self(var := num/den) * den^k`; `k` must be at least the degree in `var`.
    pub fn substitute_fraction(&self, var: usize, num: &Self, den: &Self, k: u32) -> Self {
        let d = self.degree_in(var);
        assert!(k >= d);
        let mut out = Self::zero();
        for j in 0..=d {
            let c = self.coefficient_in(var, j);
            if c.is_zero() {
                continue;
            }
            out = out + c * num.pow(j) * den.pow(k - j);
        }
        out
    }

    pub fn substitute_rational(&self, var: usize, value: &Rational) -> Self {
        self.substitute(var, &Self::constant(value.clone()))
    }

    /// Replaces `var^(2e)` by `var^e`; callers check [`Poly::is_even_in`] first.
    pub fn halve_in(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut m = m.clone();
            if var < m.len() {
                debug_assert!(m[var] % 2 == 0);
                m[var] /= 2;
            }
            out.insert(m, c.clone());
        }
        out
    }

    pub fn is_even_in(&self, var: usize) -> bool {
        self.terms.keys().all(|m| exp(m, var).is_multiple_of(2))
    }

    /// Largest monomial dividing every term, restricted to `allowed` variables.
    pub fn monomial_content(&self, allowed: &dyn Fn(usize) -> bool) -> Monomial {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else { return Vec::new() };
        let mut g: Monomial = first.iter().enumerate().map(|(i, &e)| if allowed(i) { e } else { 0 }).collect();
        for m in iter {
            for (i, e) in g.iter_mut().enumerate() {
                *e = (*e).min(exp(m, i));
            }
        }
        trim(g)
    }

    pub fn divide_monomial(&self, d: &Monomial) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut m = m.clone();
            for (i, &e) in d.iter().enumerate() {
                m[i] -= e;
            }
            out.insert(m, c.clone());
        }
        out
    }

    pub fn monomial_to_string(d: &Monomial, names: &[String]) -> String {
        let parts: Vec<String> = d
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Converts a polynomial in at most one variable `var` to dense form.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly> {
        let mut coeffs = vec![Rational::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            if m.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
                return None;
            }
            coeffs[exp(m, var) as usize] = c.clone();
        }
        Some(UPoly::new(coeffs))
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut out = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            out += t;
        }
        out
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .enumerate()
                    .fold(Real::to_f64(c), |acc, (i, &e)| acc * point[i].powi(e as i32))
            })
            .sum()
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = Self::monomial_to_string(m, names);
            if mono == "1" {
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

impl Zero for Poly {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Self::int(1)
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
        self
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let n = ma.len().max(mb.len());
                let m: Monomial = (0..n).map(|i| exp(ma, i) + exp(mb, i)).collect();
                out.insert(m, ca * cb);
            }
        }
        out
    }
}

impl Ring for Poly {
    fn from_ratio(num: i64, den: i64) -> Self {
        Poly::constant(crate::scalar::rat(num, den))
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.terms.keys().map(Vec::len).max().unwrap_or(0);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        write!(f, "Poly({})", self.to_string_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = (x.clone() + y.clone()) * (x.clone() - y.clone());
        assert_eq!(p.to_string_with(&names()), "x^2 - y^2");
        let q = p.clone() - x.clone() * x.clone() + y.clone() * y.clone();
        assert!(q.is_zero());
        assert_eq!(p.degree_in(1), 2);
        assert!(p.is_homogeneous());
        assert!(p.is_even_in(0) && p.is_even_in(1));
        assert_eq!(p.halve_in(0).to_string_with(&names()), "x - y^2");
    }

    #[test]
    fn substitution() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.clone() * x.clone() * y.clone() + Poly::int(3);
        // x := y + 1
        let s = p.substitute(0, &(y.clone() + Poly::int(1)));
        assert_eq!(s.to_string_with(&names()), "y^3 + 2*y^2 + y + 3");
        // x := 1/y, cleared with y^2
        let f = p.substitute_fraction(0, &Poly::int(1), &y, 2);
        assert_eq!(f.to_string_with(&names()), "3*y^2 + y");
        assert_eq!(p.eval(&[int(2), rat(1, 2)]), int(5));
        assert!((p.eval_f64(&[2.0, 0.5]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn content_and_univariate() {
        let x = Poly::var(0);
        let z = Poly::var(2);
        let p = x.clone() * x.clone() * z.clone() + x.clone() * z.clone() * z.clone();
        let c = p.monomial_content(&|_| true);
        assert_eq!(c, vec![1, 0, 1]);
        assert_eq!(p.divide_monomial(&c).to_string_with(&names()), "x + z");
        let u = (x.clone() * x.clone() - Poly::int(2)).to_upoly(0).unwrap();
        assert_eq!(u, UPoly::from_ints(&[-2, 0, 1]));
        assert!(p.to_upoly(0).is_none());
        assert_eq!(p.coefficient_in(0, 1).to_string_with(&names()), "z^2");
    }
}
