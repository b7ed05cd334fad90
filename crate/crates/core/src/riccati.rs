//! Global solutions of the scalar Riccati equation `f' − f²/m = λ`.
//!
//! This is the equation satisfied by `φ(t) = g(X, γ')` along a unit-speed
//! geodesic when `½ L_X g − (1/m) X♭⊗X♭ = λ g`, so its global behaviour
//! decides which fields survive on complete manifolds.

use std::io;

use serde::Serialize;

/// Trajectories whose magnitude exceeds this are treated as escaping.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RiccatiError {
    #[error("m must be nonzero")]
    ZeroM,
    #[error("λ and m must be finite")]
    NonFinite,
    #[error("no global solution to evaluate")]
    NoGlobalSolution,
    #[error("the integrator needs an initial value f0")]
    MissingInitialValue,
    #[error("step must be positive, got {0}")]
    BadStep(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiccatiProblem {
    pub lambda: f64,
    pub m: f64,
    pub f0: Option<f64>,
}

impl RiccatiProblem {
    pub fn new(lambda: f64, m: f64, f0: Option<f64>) -> Result<Self, RiccatiError> {
        if m == 0.0 {
            return Err(RiccatiError::ZeroM);
        }
        if !lambda.is_finite() || !m.is_finite() || f0.is_some_and(|f| !f.is_finite()) {
            return Err(RiccatiError::NonFinite);
        }
        Ok(Self { lambda, m, f0 })
    }

    /// `√(−λm)`, defined when `λm ≤ 0`.
    pub fn bound(&self) -> Option<f64> {
        let p = -self.lambda * self.m;
        (p >= 0.0).then(|| p.sqrt())
    }

    /// `f' = λ + f²/m`.
    pub fn rhs(&self, f: f64) -> f64 {
        self.lambda + f * f / self.m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiccatiKind {
    IdenticallyZero,
    ConstantPlus,
    ConstantMinus,
    /// `f(t) = −√(−λm) tanh((√(−λm)/m)(t + shift))`.
    TanhBranch { shift: f64 },
    NoGlobalSolution,
}

/// A branch shape without its shift parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchType {
    IdenticallyZero,
    ConstantPlus,
    ConstantMinus,
    Tanh,
}

impl RiccatiKind {
    pub fn branch_type(&self) -> Option<BranchType> {
        match self {
            RiccatiKind::IdenticallyZero => Some(BranchType::IdenticallyZero),
            RiccatiKind::ConstantPlus => Some(BranchType::ConstantPlus),
            RiccatiKind::ConstantMinus => Some(BranchType::ConstantMinus),
            RiccatiKind::TanhBranch { .. } => Some(BranchType::Tanh),
            RiccatiKind::NoGlobalSolution => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            RiccatiKind::IdenticallyZero => "identically zero",
            RiccatiKind::ConstantPlus => "constant +sqrt(-lambda m)",
            RiccatiKind::ConstantMinus => "constant -sqrt(-lambda m)",
            RiccatiKind::TanhBranch { .. } => "tanh branch",
            RiccatiKind::NoGlobalSolution => "no global solutions",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiccatiClassification {
    pub lambda: f64,
    pub m: f64,
    pub kind: RiccatiKind,
}

/// Global branches of the problem. With `f0` the single branch through it is
/// returned (or `NoGlobalSolution` when that solution escapes); without it,
/// every global branch shape, the tanh family represented by shift 0.
pub fn classify_global(p: &RiccatiProblem) -> Vec<RiccatiClassification> {
    let wrap = |kind| RiccatiClassification { lambda: p.lambda, m: p.m, kind };
    let lm = p.lambda * p.m;
    if lm > 0.0 {
        return vec![wrap(RiccatiKind::NoGlobalSolution)];
    }
    if p.lambda == 0.0 {
        return match p.f0 {
            Some(f0) if f0 != 0.0 => vec![wrap(RiccatiKind::NoGlobalSolution)],
            _ => vec![wrap(RiccatiKind::IdenticallyZero)],
        };
    }
    let s = (-lm).sqrt();
    match p.f0 {
        None => vec![wrap(RiccatiKind::ConstantPlus), wrap(RiccatiKind::ConstantMinus), wrap(RiccatiKind::TanhBranch { shift: 0.0 })],
        Some(f0) if f0 == s => vec![wrap(RiccatiKind::ConstantPlus)],
        Some(f0) if f0 == -s => vec![wrap(RiccatiKind::ConstantMinus)],
        Some(f0) if f0.abs() < s => {
            // −s tanh((s/m) C) = f0
            let shift = (p.m / s) * (-f0 / s).atanh();
            vec![wrap(RiccatiKind::TanhBranch { shift })]
        }
        Some(_) => vec![wrap(RiccatiKind::NoGlobalSolution)],
    }
}

/// Value and derivative of a global branch at `t`.
pub fn evaluate_with_derivative(cls: &RiccatiClassification, t: f64) -> Result<(f64, f64), RiccatiError> {
    let s = (-cls.lambda * cls.m).max(0.0).sqrt();
    match cls.kind {
        RiccatiKind::IdenticallyZero => Ok((0.0, 0.0)),
        RiccatiKind::ConstantPlus => Ok((s, 0.0)),
        RiccatiKind::ConstantMinus => Ok((-s, 0.0)),
        RiccatiKind::TanhBranch { shift } => {
            let k = s / cls.m;
            let th = (k * (t + shift)).tanh();
            Ok((-s * th, -s * k * (1.0 - th * th)))
        }
        RiccatiKind::NoGlobalSolution => Err(RiccatiError::NoGlobalSolution),
    }
}

pub fn evaluate_closed_form(cls: &RiccatiClassification, t: f64) -> Result<f64, RiccatiError> {
    evaluate_with_derivative(cls, t).map(|(f, _)| f)
}

/// `f' − f²/m − λ` using the analytic derivative.
pub fn ode_residual(cls: &RiccatiClassification, t: f64) -> Result<f64, RiccatiError> {
    let (f, df) = evaluate_with_derivative(cls, t)?;
    Ok(df - f * f / cls.m - cls.lambda)
}

/// Time at which the solution through `f0` at `t = 0` leaves every bounded
/// set going forward, when it does.
pub fn forward_escape_time(p: &RiccatiProblem) -> Option<f64> {
    let f0 = p.f0?;
    let lm = p.lambda * p.m;
    if lm > 0.0 {
        // f = a tan(ω (t + C)) with a = √(λm), ω = a/m
        let a = lm.sqrt();
        let w = a / p.m;
        let c = (f0 / a).atan() / w;
        // forward blow-up when ω(t + C) reaches ±π/2 in the direction of travel
        let target = if w > 0.0 { std::f64::consts::FRAC_PI_2 } else { -std::f64::consts::FRAC_PI_2 };
        return Some(target / w - c);
    }
    if p.lambda == 0.0 {
        if f0 == 0.0 {
            return None;
        }
        // f = 1/(C − t/m), C = 1/f0
        let t = p.m / f0;
        return (t > 0.0).then_some(t);
    }
    let s = (-lm).sqrt();
    if f0.abs() <= s {
        return None;
    }
    // f = −s coth((s/m)(t + C)); the pole sits at t = −C
    let k = s / p.m;
    let c = (-s / f0).atanh() / k;
    (-c > 0.0).then_some(-c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowUp {
    pub time: f64,
    /// Also detected with half the step, at a time within two steps.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub blow_up: Option<BlowUp>,
}

impl Trajectory {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "f"])?;
        for (t, f) in self.t.iter().zip(&self.f) {
            w.write_record([format!("{t:.6}"), format!("{f:.12e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn rk4_step(p: &RiccatiProblem, f: f64, h: f64) -> f64 {
    let k1 = p.rhs(f);
    let k2 = p.rhs(f + 0.5 * h * k1);
    let k3 = p.rhs(f + 0.5 * h * k2);
    let k4 = p.rhs(f + h * k3);
    f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates from `t = 0` towards `t_end` (either sign); stops at blow-up.
fn integrate_direction(p: &RiccatiProblem, f0: f64, t_end: f64, step: f64) -> (Vec<f64>, Vec<f64>, Option<f64>) {
    let dir = if t_end >= 0.0 { 1.0 } else { -1.0 };
    let n = (t_end.abs() / step).round() as usize;
    let mut ts = vec![0.0];
    let mut fs = vec![f0];
    let mut f = f0;
    for i in 1..=n {
        f = rk4_step(p, f, dir * step);
        let t = dir * step * i as f64;
        if !f.is_finite() || f.abs() > BLOW_UP_THRESHOLD {
            return (ts, fs, Some(t));
        }
        ts.push(t);
        fs.push(f);
    }
    (ts, fs, None)
}

/// Fixed-step RK4 over `t_span` (containing 0) starting from `f(0) = f0`.
pub fn rk4_oracle(p: &RiccatiProblem, t_span: (f64, f64), step: f64) -> Result<Trajectory, RiccatiError> {
    let f0 = p.f0.ok_or(RiccatiError::MissingInitialValue)?;
    if !(step > 0.0) {
        return Err(RiccatiError::BadStep(step));
    }
    let (lo, hi) = (t_span.0.min(0.0), t_span.1.max(0.0));
    let (bt, bf, back_blow) = integrate_direction(p, f0, lo, step);
    let (ft, ff, fwd_blow) = integrate_direction(p, f0, hi, step);
    let mut t: Vec<f64> = bt.iter().rev().copied().collect();
    let mut f: Vec<f64> = bf.iter().rev().copied().collect();
    t.extend(ft.iter().skip(1));
    f.extend(ff.iter().skip(1));
    let detected = fwd_blow.or(back_blow);
    let blow_up = detected.map(|time| {
        let end = if time > 0.0 { hi } else { lo };
        let (_, _, again) = integrate_direction(p, f0, end, step / 2.0);
        let confirmed = again.is_some_and(|t2| (t2 - time).abs() <= 2.0 * step);
        BlowUp { time, confirmed }
    });
    Ok(Trajectory { t, f, blow_up })
}

/// Which shapes of `φ` are compatible with the geodesic data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportVerdict {
    pub allowed: Vec<BranchType>,
    pub reason: String,
}

pub fn transport_verdict(lambda: f64, m: f64, periodic: bool, has_zero: bool) -> Result<TransportVerdict, RiccatiError> {
    if m == 0.0 {
        return Err(RiccatiError::ZeroM);
    }
    let lm = lambda * m;
    let (allowed, reason) = if lm > 0.0 {
        (vec![], "riccati-blow-up (λm>0): every solution escapes in finite time")
    } else if lambda == 0.0 {
        (vec![BranchType::IdenticallyZero], "λ=0: the only global solution is φ≡0")
    } else if periodic && has_zero {
        (vec![], "periodic geodesic: φ must be constant, and a zero of φ rules out ±√(−λm)")
    } else if periodic {
        (vec![BranchType::ConstantPlus, BranchType::ConstantMinus], "periodic geodesic: the tanh branch is not periodic")
    } else {
        (vec![BranchType::ConstantPlus, BranchType::ConstantMinus, BranchType::Tanh], "λm<0 on a line: constants and the tanh branch")
    };
    Ok(TransportVerdict { allowed, reason: reason.to_string() })
}

/// `φ(t) = g(X_{γ(t)}, γ'(t))` realized by a global branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicTransport {
    pub branch: RiccatiClassification,
}

impl GeodesicTransport {
    pub fn phi(&self, t: f64) -> Result<f64, RiccatiError> {
        evaluate_closed_form(&self.branch, t)
    }

    /// `φ' − φ²/m − λ` with a central difference of width `h`.
    pub fn finite_difference_residual(&self, t: f64, h: f64) -> Result<f64, RiccatiError> {
        let d = (self.phi(t + h)? - self.phi(t - h)?) / (2.0 * h);
        let f = self.phi(t)?;
        Ok(d - f * f / self.branch.m - self.branch.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(lambda: f64, m: f64, f0: Option<f64>) -> RiccatiProblem {
        RiccatiProblem::new(lambda, m, f0).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_global(&problem(0.0, 1.0, Some(0.0)))[0].kind, RiccatiKind::IdenticallyZero);
        assert_eq!(classify_global(&problem(1.0, 1.0, None))[0].kind, RiccatiKind::NoGlobalSolution);
        assert_eq!(classify_global(&problem(-1.0, 1.0, Some(0.0)))[0].kind, RiccatiKind::TanhBranch { shift: 0.0 });
        assert_eq!(classify_global(&problem(-1.0, 1.0, Some(1.0)))[0].kind, RiccatiKind::ConstantPlus);
        assert_eq!(classify_global(&problem(-1.0, 1.0, Some(3.0)))[0].kind, RiccatiKind::NoGlobalSolution);
        assert_eq!(classify_global(&problem(-1.0, 1.0, None)).len(), 3);
        assert_eq!(RiccatiProblem::new(1.0, 0.0, None).unwrap_err(), RiccatiError::ZeroM);
    }

    #[test]
    fn tanh_branch_is_negative_tanh() {
        let cls = classify_global(&problem(-1.0, 1.0, Some(0.0)))[0];
        for t in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert!((evaluate_closed_form(&cls, t).unwrap() + f64::tanh(t)).abs() < 1e-15);
        }
        assert!((evaluate_closed_form(&cls, 40.0).unwrap() + 1.0).abs() < 1e-15);
        let shifted = RiccatiClassification { kind: RiccatiKind::TanhBranch { shift: 0.8 }, ..cls };
        assert_eq!(evaluate_closed_form(&shifted, -0.8).unwrap(), 0.0);
    }

    #[test]
    fn printed_unsigned_form_fails_the_ode() {
        // +s tanh((s/m) t) has derivative of the wrong sign
        let (lambda, m) = (-1.0, 1.0);
        let f = |t: f64| f64::tanh(t);
        let h = 1e-5;
        let t = 0.3;
        let res = (f(t + h) - f(t - h)) / (2.0 * h) - f(t) * f(t) / m - lambda;
        assert!(res.abs() > 0.5);
    }

    #[test]
    fn residuals_vanish_for_negative_m() {
        let p = problem(2.0, -3.0, Some(0.4));
        let cls = classify_global(&p)[0];
        assert!(matches!(cls.kind, RiccatiKind::TanhBranch { .. }));
        assert!((evaluate_closed_form(&cls, 0.0).unwrap() - 0.4).abs() < 1e-14);
        for i in 0..50 {
            let t = -5.0 + 0.2 * i as f64;
            assert!(ode_residual(&cls, t).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn rk4_matches_tanh_and_constant() {
        let p = problem(-1.0, 1.0, Some(0.0));
        let traj = rk4_oracle(&p, (-5.0, 5.0), 1e-3).unwrap();
        assert!(traj.blow_up.is_none());
        let worst = traj.t.iter().zip(&traj.f).map(|(t, f)| (f + t.tanh()).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6);
        let p = problem(-1.0, 1.0, Some(1.0));
        let traj = rk4_oracle(&p, (-5.0, 5.0), 1e-3).unwrap();
        assert!(traj.f.iter().all(|f| (f - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rk4_blow_up_for_zero_lambda() {
        let p = problem(0.0, 1.0, Some(0.5));
        let traj = rk4_oracle(&p, (0.0, 5.0), 1e-4).unwrap();
        let b = traj.blow_up.unwrap();
        assert!((b.time - 2.0).abs() < 0.01, "{}", b.time);
        assert!(b.confirmed);
        assert_eq!(forward_escape_time(&p), Some(2.0));
    }

    #[test]
    fn escape_time_bounds() {
        let p = problem(1.0, 1.0, Some(0.0));
        let t = forward_escape_time(&p).unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let p = problem(-1.0, -2.0, Some(-7.0));
        let t = forward_escape_time(&p).unwrap();
        assert!(t > 0.0 && t <= std::f64::consts::PI / (0.5f64).sqrt());
    }

    #[test]
    fn csv_export() {
        let p = problem(-1.0, 1.0, Some(0.0));
        let traj = rk4_oracle(&p, (0.0, 0.002), 1e-3).unwrap();
        let text = traj.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,f"));
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn transport_examples() {
        assert!(transport_verdict(-1.0, 1.0, true, true).unwrap().allowed.is_empty());
        assert_eq!(transport_verdict(0.0, 2.0, true, false).unwrap().allowed, vec![BranchType::IdenticallyZero]);
        assert_eq!(transport_verdict(-1.0, 1.0, false, true).unwrap().allowed.len(), 3);
        assert_eq!(transport_verdict(-1.0, 1.0, true, false).unwrap().allowed, vec![BranchType::ConstantPlus, BranchType::ConstantMinus]);
        assert!(transport_verdict(1.0, 1.0, false, false).unwrap().allowed.is_empty());
    }

    #[test]
    fn transport_function_residual() {
        let cls = classify_global(&problem(-2.0, 0.5, Some(0.3)))[0];
        let phi = GeodesicTransport { branch: cls };
        assert!(phi.finite_difference_residual(0.4, 1e-4).unwrap().abs() < 1e-8);
    }
}
