//! Exact case-split solver for small polynomial systems with sign conditions.
//!
//! The engine eliminates variables one at a time (linear substitution with a
//! vanishing-coefficient branch, even-power reduction, univariate root
//! isolation) and finishes with a one-dimensional cylindrical decomposition
//! over the last free variable. Every dead branch is recorded with the
//! equation or condition it violates, so an empty result is a certificate.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};
use rand::Rng;

use super::algebraic::RealAlgebraic;
use super::mpoly::Poly;
use super::upoly::UPoly;
use crate::scalar::{Rational, Real, Sign};

const BRANCH_BUDGET: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Positive,
    Negative,
    NonZero,
}

impl Constraint {
    pub fn admits(self, s: Sign) -> bool {
        match self {
            Constraint::Positive => s == Sign::Positive,
            Constraint::Negative => s == Sign::Negative,
            Constraint::NonZero => s != Sign::Zero,
        }
    }

    fn relation(self) -> &'static str {
        match self {
            Constraint::Positive => "> 0",
            Constraint::Negative => "< 0",
            Constraint::NonZero => "!= 0",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Equation {
    pub poly: Poly,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Condition {
    pub poly: Poly,
    pub constraint: Constraint,
    pub label: String,
}

/// A rational function whose value is reported at every sample.
#[derive(Clone, Debug)]
pub struct Observable {
    pub label: String,
    pub num: Poly,
    pub den: Poly,
}

#[derive(Clone, Debug, Default)]
pub struct CaseSystem {
    pub names: Vec<String>,
    pub nonzero: Vec<bool>,
    pub equations: Vec<Equation>,
    pub conditions: Vec<Condition>,
    pub observables: Vec<Observable>,
}

impl CaseSystem {
    pub fn new(names: &[&str]) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            nonzero: vec![false; names.len()],
            ..Self::default()
        }
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::var(self.names.iter().position(|n| n == name).expect("unknown variable"))
    }

    pub fn require_nonzero(&mut self, var: usize) {
        self.nonzero[var] = true;
    }

    pub fn equation(&mut self, poly: Poly, label: impl Into<String>) {
        self.equations.push(Equation { poly, label: label.into() });
    }

    pub fn condition(&mut self, poly: Poly, constraint: Constraint, label: impl Into<String>) {
        self.conditions.push(Condition { poly, constraint, label: label.into() });
    }

    pub fn observe(&mut self, label: impl Into<String>, poly: Poly) {
        self.observables.push(Observable { label: label.into(), num: poly, den: Poly::one() });
    }

    pub fn solve(&self) -> Result<CaseAnalysis, CaseSplitError> {
        let n = self.names.len();
        let state = State {
            names: self.names.iter().map(|s| s.to_string()).collect(),
            eqs: self.equations.clone(),
            conds: self.conditions.clone(),
            obs: self.observables.clone(),
            nonzero: self.nonzero.clone(),
            halved: vec![false; n],
            resolved: vec![false; n],
            log: Vec::new(),
            path: Vec::new(),
        };
        let mut out = CaseAnalysis::default();
        let mut budget = BRANCH_BUDGET;
        run(state, &mut out, &mut budget)?;
        Ok(out)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CaseSplitError {
    #[error("case split cannot proceed: {0}")]
    Unsupported(String),
    #[error("case split exceeded its branch budget")]
    Budget,
}

/// A coordinate value recovered by back-substitution.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Algebraic(RealAlgebraic),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Real::to_f64(r),
            Value::Algebraic(a) => a.to_f64(),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Algebraic(a) => a.as_rational(),
            Value::Approx(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Algebraic(a) => write!(f, "{a}"),
            Value::Approx(x) => write!(f, "{x:.15}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObservedValue {
    pub sign: Sign,
    pub approx: f64,
    pub exact: Option<Rational>,
}

#[derive(Clone, Debug)]
enum Step {
    Fixed { var: usize, value: Value },
    Ratio { var: usize, num: Poly, den: Poly },
    Halve { var: usize },
}

/// Where a sample lives: an isolated point, or an open interval of the
/// remaining free variable (bounds `None` are infinite).
#[derive(Clone, Debug)]
pub enum Cell {
    Point,
    Interval { var: usize, lo: Option<RealAlgebraic>, hi: Option<RealAlgebraic> },
}

#[derive(Clone, Debug)]
pub struct Sample {
    /// Original variables, with the positive root taken for sign-free ones.
    pub values: Vec<Value>,
    /// Variables whose sign can be flipped independently.
    pub sign_free: Vec<usize>,
    pub observed: Vec<ObservedValue>,
    pub cell: Cell,
    pub path: Vec<String>,
    log: Vec<Step>,
    final_obs: Vec<Observable>,
    final_conds: Vec<Condition>,
    nvars: usize,
}

impl Sample {
    pub fn is_interval(&self) -> bool {
        matches!(self.cell, Cell::Interval { .. })
    }

    /// Re-evaluates the sample with the free variable of an interval cell set
    /// to `t`. Returns `None` for point cells or when `t` leaves the cell.
    pub fn instantiate(&self, t: &Rational) -> Option<(Vec<Value>, Vec<ObservedValue>)> {
        let Cell::Interval { var, lo, hi } = &self.cell else { return None };
        let tv = RealAlgebraic::rational(t.clone());
        if lo.as_ref().is_some_and(|l| tv.cmp_exact(l) != Ordering::Greater)
            || hi.as_ref().is_some_and(|h| tv.cmp_exact(h) != Ordering::Less)
        {
            return None;
        }
        for c in &self.final_conds {
            let s = Sign::of_rational(&c.poly.substitute_rational(*var, t).constant_value()?);
            if !c.constraint.admits(s) {
                return None;
            }
        }
        let observed = self
            .final_obs
            .iter()
            .map(|o| observe_at(o, *var, &Value::Exact(t.clone())))
            .collect::<Option<Vec<_>>>()?;
        let mut log = self.log.clone();
        log.pop();
        log.push(Step::Fixed { var: *var, value: Value::Exact(t.clone()) });
        Some((back_substitute(&log, self.nvars), observed))
    }

    /// Every choice of signs for the sign-free variables, with the variables
    /// that depend on them recomputed. The first variant equals `values`.
    pub fn sign_variants(&self) -> Vec<Vec<Value>> {
        (0..1usize << self.sign_free.len())
            .map(|bits| {
                let negative: Vec<usize> =
                    self.sign_free.iter().enumerate().filter(|(b, _)| bits & (1 << b) != 0).map(|(_, &v)| v).collect();
                back_substitute_signed(&self.log, self.nvars, &negative)
            })
            .collect()
    }

    /// A random rational inside an interval cell.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Option<Rational> {
        let Cell::Interval { lo, hi, .. } = &self.cell else { return None };
        for _ in 0..64 {
            let u: f64 = rng.random_range(0.02..0.98);
            let t = match (lo, hi) {
                (Some(l), Some(h)) => {
                    let (a, b) = (l.to_f64(), h.to_f64());
                    a + u * (b - a)
                }
                (Some(l), None) => l.to_f64() + 0.1 + 4.0 * u,
                (None, Some(h)) => h.to_f64() - 0.1 - 4.0 * u,
                (None, None) => 8.0 * u - 4.0,
            };
            // round to a short dyadic so draws print cleanly
            let t = Rational::from_float((t * 1024.0).round() / 1024.0)?;
            let tv = RealAlgebraic::rational(t.clone());
            let inside = lo.as_ref().is_none_or(|l| tv.cmp_exact(l) == Ordering::Greater)
                && hi.as_ref().is_none_or(|h| tv.cmp_exact(h) == Ordering::Less);
            if inside {
                return Some(t);
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pub path: Vec<String>,
    pub reason: String,
}

impl fmt::Display for Elimination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.reason)
        } else {
            write!(f, "[{}] {}", self.path.join("; "), self.reason)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CaseAnalysis {
    pub samples: Vec<Sample>,
    pub eliminations: Vec<Elimination>,
}

#[derive(Clone)]
struct State {
    names: Vec<String>,
    eqs: Vec<Equation>,
    conds: Vec<Condition>,
    obs: Vec<Observable>,
    nonzero: Vec<bool>,
    halved: Vec<bool>,
    resolved: Vec<bool>,
    log: Vec<Step>,
    path: Vec<String>,
}

impl State {
    fn show(&self, p: &Poly) -> String {
        p.to_string_with(&self.names)
    }

    fn eliminate(&self, out: &mut CaseAnalysis, reason: String) {
        out.eliminations.push(Elimination { path: self.path.clone(), reason });
    }

    fn all_polys(&self) -> impl Iterator<Item = &Poly> {
        self.eqs
            .iter()
            .map(|e| &e.poly)
            .chain(self.conds.iter().map(|c| &c.poly))
            .chain(self.obs.iter().flat_map(|o| [&o.num, &o.den]))
    }

    fn live_vars(&self) -> Vec<usize> {
        let mut vars = std::collections::BTreeSet::new();
        for p in self.all_polys() {
            vars.extend(p.vars());
        }
        vars.into_iter().filter(|&v| !self.resolved[v]).collect()
    }

    fn positive_by_construction(&self, v: usize) -> bool {
        self.nonzero[v] || self.halved[v]
    }

    /// Applies `v := num/den` to everything, clearing denominators in a
    /// sign-preserving way (`den` is known to be nonzero).
    fn substitute(&mut self, v: usize, num: &Poly, den: &Poly) {
        let den_const = den.constant_value();
        for e in &mut self.eqs {
            let d = e.poly.degree_in(v);
            e.poly = e.poly.substitute_fraction(v, num, den, d);
        }
        for c in &mut self.conds {
            let d = c.poly.degree_in(v);
            let k = if den_const.is_some() { d } else { d + d % 2 };
            c.poly = c.poly.substitute_fraction(v, num, den, k);
            if let Some(dc) = &den_const {
                if dc.is_negative() && d % 2 == 1 {
                    c.poly = -c.poly.clone();
                }
            }
        }
        for o in &mut self.obs {
            let nd = o.num.degree_in(v);
            let dd = o.den.degree_in(v);
            let n = o.num.substitute_fraction(v, num, den, nd);
            let d = o.den.substitute_fraction(v, num, den, dd);
            let e = nd.min(dd);
            o.num = n * den.pow(dd - e);
            o.den = d * den.pow(nd - e);
        }
        self.resolved[v] = true;
        self.log.push(Step::Ratio { var: v, num: num.clone(), den: den.clone() });
    }

    fn fix(&mut self, v: usize, value: &Rational) {
        self.substitute(v, &Poly::constant(value.clone()), &Poly::one());
        self.log.pop();
        self.log.push(Step::Fixed { var: v, value: Value::Exact(value.clone()) });
    }
}

fn run(mut st: State, out: &mut CaseAnalysis, budget: &mut usize) -> Result<(), CaseSplitError> {
    if *budget == 0 {
        return Err(CaseSplitError::Budget);
    }
    *budget -= 1;

    if !normalize(&mut st, out) {
        return Ok(());
    }

    if !st.eqs.is_empty() {
        if let Some((ei, v)) = pick_linear(&st) {
            return split_linear(st, ei, v, out, budget);
        }
        if let Some(ei) = pick_univariate(&st) {
            return split_univariate(st, ei, out, budget);
        }
        let eq = &st.eqs[0];
        return Err(CaseSplitError::Unsupported(format!(
            "no linear or univariate equation to eliminate ({}: {} = 0)",
            eq.label,
            st.show(&eq.poly)
        )));
    }
    finish(st, out)
}

/// Simplifies equations and conditions; returns `false` when the branch dies.
fn normalize(st: &mut State, out: &mut CaseAnalysis) -> bool {
    loop {
        let mut eqs: Vec<Equation> = Vec::new();
        for e in std::mem::take(&mut st.eqs) {
            let content = e.poly.monomial_content(&|v| st.positive_by_construction(v));
            let mut poly = e.poly.clone();
            let mut note = String::new();
            if !content.is_empty() {
                poly = poly.divide_monomial(&content);
                note = format!(" after dividing by nonzero {}", Poly::monomial_to_string(&content, &st.names));
            }
            if poly.is_zero() {
                continue;
            }
            if let Some(c) = poly.constant_value() {
                st.eliminate(out, format!("{}: reduces to {} = 0{}", e.label, c, note));
                return false;
            }
            if !eqs.iter().any(|x| x.poly == poly || x.poly == -poly.clone()) {
                eqs.push(Equation { poly, label: e.label });
            }
        }
        st.eqs = eqs;

        let mut conds = Vec::new();
        for mut c in std::mem::take(&mut st.conds) {
            // a factor known to be nonzero never changes whether c.poly vanishes;
            // a positive one never changes its sign
            let nonzero = c.constraint == Constraint::NonZero;
            let divisible = |v: usize| st.halved[v] || (nonzero && st.nonzero[v]);
            let content = c.poly.monomial_content(&divisible);
            if !content.is_empty() {
                let reduced = c.poly.divide_monomial(&content);
                // `(v^2) > 0` style conditions define the halved variables; keep them
                if nonzero || reduced.constant_value().is_none() {
                    c.poly = reduced;
                }
            }
            if let Some(value) = c.poly.constant_value() {
                if !c.constraint.admits(Sign::of_rational(&value)) {
                    st.eliminate(out, format!("{}: requires {} {} but it equals {}", c.label, "value", c.constraint.relation(), value));
                    return false;
                }
                continue;
            }
            conds.push(c);
        }
        st.conds = conds;

        // even-power reduction
        let live = st.live_vars();
        let mut changed = false;
        for v in live {
            if st.halved[v] || !st.nonzero[v] {
                continue;
            }
            if st.all_polys().all(|p| p.is_even_in(v)) && st.all_polys().any(|p| p.degree_in(v) > 0) {
                for e in &mut st.eqs {
                    e.poly = e.poly.halve_in(v);
                }
                for c in &mut st.conds {
                    c.poly = c.poly.halve_in(v);
                }
                for o in &mut st.obs {
                    o.num = o.num.halve_in(v);
                    o.den = o.den.halve_in(v);
                }
                st.halved[v] = true;
                st.log.push(Step::Halve { var: v });
                let name = format!("({}^2)", st.names[v]);
                st.names[v] = name.clone();
                st.conds.push(Condition { poly: Poly::var(v), constraint: Constraint::Positive, label: format!("{name} > 0") });
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
}

fn pick_linear(st: &State) -> Option<(usize, usize)> {
    let mut best: Option<((u8, usize, usize), usize, usize)> = None;
    for (ei, e) in st.eqs.iter().enumerate() {
        for v in e.poly.vars() {
            if e.poly.degree_in(v) != 1 {
                continue;
            }
            let c = e.poly.coefficient_in(v, 1);
            let rank = if c.is_constant() { 0 } else if c.vars().len() == 1 { 1 } else { 2 };
            let key = (rank, c.num_terms(), e.poly.num_terms());
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, ei, v));
            }
        }
    }
    best.map(|(_, ei, v)| (ei, v))
}

fn pick_univariate(st: &State) -> Option<usize> {
    st.eqs
        .iter()
        .enumerate()
        .filter(|(_, e)| e.poly.vars().len() == 1)
        .min_by_key(|(_, e)| e.poly.total_degree())
        .map(|(i, _)| i)
}

fn split_linear(mut st: State, ei: usize, v: usize, out: &mut CaseAnalysis, budget: &mut usize) -> Result<(), CaseSplitError> {
    let eq = st.eqs.remove(ei);
    let c = eq.poly.coefficient_in(v, 1);
    let d = eq.poly.coefficient_in(v, 0);
    let name = st.names[v].clone();

    if let Some(cv) = c.constant_value() {
        let num = d.scale(&(-Rational::one() / cv));
        let mut next = st;
        if next.nonzero[v] && !next.halved[v] {
            next.conds.push(Condition { poly: num.clone(), constraint: Constraint::NonZero, label: format!("{name} != 0") });
        }
        next.path.push(format!("{name} = {}", next.show(&num)));
        next.substitute(v, &num, &Poly::one());
        return run(next, out, budget);
    }

    // coefficient of v vanishes
    let mut zero = st.clone();
    zero.path.push(format!("{} = 0", st.show(&c)));
    zero.eqs.push(Equation { poly: c.clone(), label: format!("coefficient of {name} in {}", eq.label) });
    zero.eqs.push(Equation { poly: d.clone(), label: eq.label.clone() });
    run(zero, out, budget)?;

    // coefficient nonzero: v = -d/c
    let (mut cn, mut dn) = (c.clone(), d.clone());
    if let (Some(u), true) = (c.vars().iter().next().copied(), c.vars().len() == 1) {
        if d.vars().iter().all(|&w| w == u) {
            let g = UPoly::gcd(&c.to_upoly(u).unwrap(), &d.to_upoly(u).unwrap());
            if g.degree().unwrap_or(0) >= 1 {
                cn = upoly_to_poly(&c.to_upoly(u).unwrap().div_rem(&g).0, u);
                dn = upoly_to_poly(&d.to_upoly(u).unwrap().div_rem(&g).0, u);
            }
        }
    }
    let mut next = st;
    next.conds.push(Condition { poly: c.clone(), constraint: Constraint::NonZero, label: format!("coefficient of {name} in {}", eq.label) });
    let num = -dn.clone();
    if next.nonzero[v] && !next.halved[v] {
        next.conds.push(Condition { poly: num.clone(), constraint: Constraint::NonZero, label: format!("{name} != 0") });
    }
    let value = if cn.is_one() { next.show(&num) } else { format!("({})/({})", next.show(&num), next.show(&cn)) };
    next.path.push(format!("{} != 0, {name} = {value}", next.show(&c)));
    next.substitute(v, &num, &cn);
    run(next, out, budget)
}

fn split_univariate(mut st: State, ei: usize, out: &mut CaseAnalysis, budget: &mut usize) -> Result<(), CaseSplitError> {
    let eq = st.eqs.remove(ei);
    let v = *eq.poly.vars().iter().next().unwrap();
    let name = st.names[v].clone();
    let u = eq.poly.to_upoly(v).unwrap();
    let roots = u.real_roots();
    if roots.is_empty() {
        st.eliminate(out, format!("{}: {} = 0 has no real root", eq.label, u.to_string_in(&name)));
        return Ok(());
    }
    for root in roots {
        let mut next = st.clone();
        match root.as_rational() {
            Some(r) => {
                if next.positive_by_construction(v) && r.is_zero() {
                    next.path.push(format!("{name} = 0"));
                    next.eliminate(out, format!("{}: root {name} = 0 contradicts {name} != 0", eq.label));
                    continue;
                }
                next.path.push(format!("{name} = {r}"));
                let r = r.clone();
                next.fix(v, &r);
                run(next, out, budget)?;
            }
            None => {
                next.path.push(format!("{name} = {root}"));
                if next.live_vars().iter().any(|&w| w != v) {
                    return Err(CaseSplitError::Unsupported(format!(
                        "irrational root {name} = {root} while other variables remain"
                    )));
                }
                finish_at_algebraic(next, v, root, out)?;
            }
        }
    }
    Ok(())
}

fn finish_at_algebraic(mut st: State, v: usize, alpha: RealAlgebraic, out: &mut CaseAnalysis) -> Result<(), CaseSplitError> {
    for e in &st.eqs {
        let u = e.poly.to_upoly(v).unwrap();
        if alpha.sign_of_poly(&u) != Sign::Zero {
            st.eliminate(out, format!("{}: nonzero at {} = {}", e.label, st.names[v], alpha));
            return Ok(());
        }
    }
    for c in &st.conds {
        let s = alpha.sign_of_poly(&c.poly.to_upoly(v).unwrap());
        if !c.constraint.admits(s) {
            st.eliminate(out, format!("{}: {} {} fails at {} = {}", c.label, st.show(&c.poly), c.constraint.relation(), st.names[v], alpha));
            return Ok(());
        }
    }
    let value = Value::Algebraic(alpha);
    let observed = st.obs.iter().map(|o| observe_at(o, v, &value)).collect::<Option<Vec<_>>>();
    let Some(observed) = observed else {
        st.eliminate(out, "observable denominator vanishes".into());
        return Ok(());
    };
    st.log.push(Step::Fixed { var: v, value });
    emit(st, observed, Cell::Point, out);
    Ok(())
}

fn finish(mut st: State, out: &mut CaseAnalysis) -> Result<(), CaseSplitError> {
    let live = st.live_vars();
    let n = st.names.len();
    let mut silent: Vec<usize> = (0..n).filter(|&v| !st.resolved[v] && !live.contains(&v)).collect();
    let mut free = live.clone();
    if free.is_empty() && !silent.is_empty() {
        free.push(silent.remove(0));
    }
    for v in silent {
        st.path.push(format!("{} free (sampled at 1)", st.names[v]));
        st.log.push(Step::Fixed { var: v, value: Value::Exact(Rational::one()) });
        st.resolved[v] = true;
    }
    match free.len() {
        0 => {
            let observed = st.obs.iter().map(observe_const).collect::<Option<Vec<_>>>();
            match observed {
                Some(obs) => emit(st, obs, Cell::Point, out),
                None => st.eliminate(out, "observable denominator vanishes".into()),
            }
            Ok(())
        }
        1 => cad_1d(st, free[0], out),
        _ => Err(CaseSplitError::Unsupported(format!(
            "{} free variables remain ({})",
            free.len(),
            free.iter().map(|&v| st.names[v].clone()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn cad_1d(st: State, v: usize, out: &mut CaseAnalysis) -> Result<(), CaseSplitError> {
    let to_u = |p: &Poly| p.to_upoly(v).ok_or_else(|| CaseSplitError::Unsupported("non-univariate residue".into()));
    let mut polys = Vec::new();
    for c in &st.conds {
        polys.push(to_u(&c.poly)?);
    }
    for o in &st.obs {
        polys.push(to_u(&o.num)?);
        polys.push(to_u(&o.den)?);
    }
    if st.positive_by_construction(v) {
        polys.push(UPoly::x());
    }
    let mut roots: Vec<RealAlgebraic> = Vec::new();
    for p in &polys {
        for r in p.real_roots() {
            if !roots.iter().any(|q| q.cmp_exact(&r) == Ordering::Equal) {
                roots.push(r);
            }
        }
    }
    roots.sort_by(|a, b| a.cmp_exact(b));

    let mut cells: Vec<(Value, Cell)> = Vec::new();
    if roots.is_empty() {
        cells.push((Value::Exact(Rational::one()), Cell::Interval { var: v, lo: None, hi: None }));
    } else {
        let below = roots[0].lower().floor() - Rational::one();
        cells.push((Value::Exact(below), Cell::Interval { var: v, lo: None, hi: Some(roots[0].clone()) }));
        for (i, r) in roots.iter().enumerate() {
            let value = match r.as_rational() {
                Some(q) => Value::Exact(q.clone()),
                None => Value::Algebraic(r.clone()),
            };
            cells.push((value, Cell::Point));
            let (t, hi) = match roots.get(i + 1) {
                Some(next) => (RealAlgebraic::rational_between(r, next), Some(next.clone())),
                None => (r.upper().ceil() + Rational::one(), None),
            };
            cells.push((Value::Exact(t), Cell::Interval { var: v, lo: Some(r.clone()), hi }));
        }
    }

    let mut any = false;
    'cells: for (value, cell) in cells {
        for c in &st.conds {
            let s = sign_at(&c.poly, v, &value);
            if !c.constraint.admits(s) {
                continue 'cells;
            }
        }
        let Some(observed) = st.obs.iter().map(|o| observe_at(o, v, &value)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let mut next = st.clone();
        if let Cell::Interval { .. } = cell {
            next.path.push(format!("{} in open cell around {}", st.names[v], value));
        } else {
            next.path.push(format!("{} = {}", st.names[v], value));
        }
        next.log.push(Step::Fixed { var: v, value });
        emit(next, observed, cell, out);
        any = true;
    }
    if !any {
        let labels: Vec<String> = st.conds.iter().map(|c| format!("{} ({} {})", c.label, st.show(&c.poly), c.constraint.relation())).collect();
        st.eliminate(out, format!("conditions on {} are jointly unsatisfiable: {}", st.names[v], labels.join(", ")));
    }
    Ok(())
}

fn sign_at(p: &Poly, v: usize, value: &Value) -> Sign {
    match value {
        Value::Exact(r) => Sign::of_rational(&p.substitute_rational(v, r).constant_value().unwrap()),
        Value::Algebraic(a) => a.sign_of_poly(&p.to_upoly(v).unwrap()),
        Value::Approx(x) => Sign::of_f64(p.eval_f64(&point_with(v, *x))),
    }
}

fn point_with(v: usize, x: f64) -> Vec<f64> {
    let mut pt = vec![0.0; v + 1];
    pt[v] = x;
    pt
}

fn observe_const(o: &Observable) -> Option<ObservedValue> {
    let num = o.num.constant_value()?;
    let den = o.den.constant_value()?;
    if den.is_zero() {
        return None;
    }
    let q = num / den;
    Some(ObservedValue { sign: Sign::of_rational(&q), approx: Real::to_f64(&q), exact: Some(q) })
}

fn observe_at(o: &Observable, v: usize, value: &Value) -> Option<ObservedValue> {
    if o.num.is_constant() && o.den.is_constant() {
        return observe_const(o);
    }
    match value {
        Value::Exact(r) => {
            let num = o.num.substitute_rational(v, r).constant_value()?;
            let den = o.den.substitute_rational(v, r).constant_value()?;
            if den.is_zero() {
                return None;
            }
            let q = num / den;
            Some(ObservedValue { sign: Sign::of_rational(&q), approx: Real::to_f64(&q), exact: Some(q) })
        }
        _ => {
            let sn = sign_at(&o.num, v, value);
            let sd = sign_at(&o.den, v, value);
            if sd == Sign::Zero {
                return None;
            }
            let x = value.to_f64();
            let pt = point_with(v, x);
            let approx = if sn == Sign::Zero { 0.0 } else { o.num.eval_f64(&pt) / o.den.eval_f64(&pt) };
            Some(ObservedValue { sign: sn.times(sd), approx, exact: None })
        }
    }
}

fn emit(st: State, observed: Vec<ObservedValue>, cell: Cell, out: &mut CaseAnalysis) {
    let nvars = st.names.len();
    let values = back_substitute(&st.log, nvars);
    let sign_free = st.log.iter().filter_map(|s| match s { Step::Halve { var } => Some(*var), _ => None }).collect();
    out.samples.push(Sample {
        values,
        sign_free,
        observed,
        cell,
        path: st.path,
        log: st.log,
        final_obs: st.obs,
        final_conds: st.conds,
        nvars,
    });
}

fn back_substitute(log: &[Step], nvars: usize) -> Vec<Value> {
    back_substitute_signed(log, nvars, &[])
}

/// Back-substitution taking the negative root for the halved variables in `negative`.
fn back_substitute_signed(log: &[Step], nvars: usize, negative: &[usize]) -> Vec<Value> {
    let mut values: Vec<Option<Value>> = vec![None; nvars];
    for step in log.iter().rev() {
        match step {
            Step::Fixed { var, value } => values[*var] = Some(value.clone()),
            Step::Ratio { var, num, den } => {
                let exact: Option<Vec<Rational>> = (0..nvars)
                    .map(|i| match &values[i] {
                        Some(v) => v.exact().cloned(),
                        None => Some(Rational::zero()),
                    })
                    .collect();
                values[*var] = Some(match exact {
                    Some(pt) => Value::Exact(num.eval(&pt) / den.eval(&pt)),
                    None => {
                        let pt: Vec<f64> = values.iter().map(|v| v.as_ref().map_or(0.0, Value::to_f64)).collect();
                        Value::Approx(num.eval_f64(&pt) / den.eval_f64(&pt))
                    }
                });
            }
            Step::Halve { var } => {
                let w = values[*var].take().unwrap_or(Value::Exact(Rational::zero()));
                let sign = if negative.contains(var) { -1.0 } else { 1.0 };
                values[*var] = Some(match w.exact().and_then(rational_sqrt) {
                    Some(r) if sign < 0.0 => Value::Exact(-r),
                    Some(r) => Value::Exact(r),
                    None => Value::Approx(sign * w.to_f64().max(0.0).sqrt()),
                });
            }
        }
    }
    values.into_iter().map(|v| v.unwrap_or(Value::Exact(Rational::zero()))).collect()
}

fn upoly_to_poly(u: &UPoly, var: usize) -> Poly {
    u.coeffs()
        .iter()
        .enumerate()
        .fold(Poly::zero(), |acc, (i, c)| acc + Poly::var(var).pow(i as u32).scale(c))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

pub fn is_exact_square(q: &Rational) -> bool {
    rational_sqrt(q).is_some()
}
