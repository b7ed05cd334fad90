//! Exact solution of `ric_X^m = A g` for one metric and one value of `m`.

use std::cmp::Ordering;

use num::{One, Signed, Zero};
use serde::Serialize;

use super::symbolic::killing_reduction;
use super::{check_m, LieGeometry, MetricFrame, SolverError};
use crate::bakry_emery::{combine, is_killing, lie_derivative_metric, one_form_square, qe_residual, BakryEmeryInput};
use crate::curvature::ricci_tensor;
use crate::exact::casesplit::rational_sqrt;
use crate::exact::{CaseSystem, Poly};
use crate::scalar::{rat, Rational, Real};
use crate::tensor::SymTensor3;

/// Residual bound every reported solution satisfies.
pub const SOLUTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QeSolution {
    #[serde(rename = "X")]
    pub x: [f64; 3],
    #[serde(rename = "A")]
    pub a: f64,
    pub residual: f64,
    pub killing: bool,
    pub killing_residual: f64,
    pub constraint: String,
    /// Exact `A` when it is rational.
    pub a_exact: Option<String>,
    /// Exact squares `a_i²`.
    pub x_squared_exact: [String; 3],
    /// The residual was verified to vanish in exact arithmetic.
    pub exact_verified: bool,
}

impl QeSolution {
    /// Index of the nonzero coefficient, or `None` for `X = 0`.
    pub fn axis(&self) -> Option<usize> {
        (0..3).find(|&i| self.x[i] != 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.x.iter().filter(|v| **v != 0.0).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedMetricSolutions {
    #[serde(skip)]
    pub frame: MetricFrame,
    pub m: f64,
    /// Killing solutions, sorted.
    pub solutions: Vec<QeSolution>,
    /// Solutions of the tensor equation whose field is not Killing; they do
    /// not descend to compact quotients.
    pub non_killing: Vec<QeSolution>,
    /// One line per eliminated support branch.
    pub certificates: Vec<String>,
}

impl FixedMetricSolutions {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.frame.to_json();
        let obj = v.as_object_mut().expect("frame json is an object");
        obj.insert("m".into(), serde_json::json!(self.m));
        obj.insert("solutions".into(), serde_json::to_value(&self.solutions).expect("serializable"));
        obj.insert("non_killing".into(), serde_json::to_value(&self.non_killing).expect("serializable"));
        obj.insert("certificates".into(), serde_json::json!(self.certificates));
        v
    }
}

fn support_label(mask: usize) -> String {
    let parts: Vec<String> = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| format!("a{}", i + 1)).collect();
    format!("support {{{}}}", parts.join(","))
}

fn cmp_solutions(a: &QeSolution, b: &QeSolution) -> Ordering {
    let key = |s: &QeSolution| (s.support_size(), s.axis());
    key(a)
        .cmp(&key(b))
        .then_with(|| b.x.iter().zip(&a.x).fold(Ordering::Equal, |o, (p, q)| o.then(p.total_cmp(q))))
        .then(a.a.total_cmp(&b.a))
}

/// Solves the six equations `ric_X^m − A g = 0` in `(a₁, a₂, a₃, A)` by
/// enumerating the supports of `(a₁, a₂, a₃)` and running the exact case
/// split on each. Killing is checked afterwards, not assumed.
pub fn solve_fixed_metric(frame: &MetricFrame, m: f64) -> Result<FixedMetricSolutions, SolverError> {
    check_m(m)?;
    let sc_q = frame.exact_structure();
    let m_q = <Rational as Real>::from_f64(m).expect("finite m");
    let sc_p = sc_q.map(|c| Poly::constant(c.clone()));
    let ric_q = ricci_tensor(&sc_q);
    let ric = ric_q.map(|c| Poly::constant(c.clone()));
    let a: [Poly; 3] = std::array::from_fn(Poly::var);
    let lie = lie_derivative_metric(&sc_p, &a);
    let inv_m = Poly::constant(Rational::one() / m_q.clone());
    let f = ric.add(&lie.scale(&Poly::constant(rat(1, 2)))).sub(&one_form_square(&a).scale(&inv_m));

    let axis_constraints = match frame {
        MetricFrame::Milnor(fr) => killing_reduction(LieGeometry::Unimodular(fr.group))?,
        MetricFrame::H2xR { .. } => killing_reduction(LieGeometry::H2xR)?,
    };
    let sc_f = frame.structure();

    let mut solutions = Vec::new();
    let mut non_killing = Vec::new();
    let mut certificates = Vec::new();
    for mask in 0..8usize {
        let mut sys = CaseSystem::new(&["a1", "a2", "a3"]);
        for i in 0..3 {
            if mask & (1 << i) != 0 {
                sys.require_nonzero(i);
            } else {
                sys.equation(Poly::var(i), format!("support: a{} = 0", i + 1));
            }
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            sys.equation(f.get(i, j).clone(), format!("ric_X^m(e{}, e{}) = 0", i + 1, j + 1));
        }
        for j in [1, 2] {
            sys.equation(f.get(0, 0).clone() - f.get(j, j).clone(), format!("ric_X^m(e1, e1) = ric_X^m(e{0}, e{0})", j + 1));
        }
        sys.observe("A", f.get(0, 0).clone());
        for i in 0..3 {
            sys.observe(format!("a{}^2", i + 1), Poly::var(i) * Poly::var(i));
        }
        let analysis = sys.solve().map_err(|e| SolverError::Reduction(format!("{}: {e}", support_label(mask))))?;
        for e in &analysis.eliminations {
            certificates.push(format!("{}: {}", support_label(mask), e));
        }
        for sample in &analysis.samples {
            if sample.is_interval() {
                return Err(SolverError::Reduction(format!("{}: continuum of solutions", support_label(mask))));
            }
            for values in sample.sign_variants() {
                let mut x: [f64; 3] = std::array::from_fn(|i| values[i].to_f64());
                let a_obs = &sample.observed[0];
                let sq: Vec<_> = sample.observed[1..4].to_vec();
                // magnitudes from the exact squares where available
                for i in 0..3 {
                    if let Some(q) = &sq[i].exact {
                        x[i] = x[i].signum() * Real::to_f64(q).sqrt();
                        if q.is_zero() {
                            x[i] = 0.0;
                        }
                    }
                }
                let a_val = a_obs.exact.as_ref().map_or(a_obs.approx, Real::to_f64);
                let input = BakryEmeryInput::new(sc_f.clone(), x, m).expect("m checked");
                let residual = qe_residual(&input, a_val).sup_norm;
                let kc = is_killing(&sc_f, &x);
                let exact_verified = exact_check(&sc_q, &ric_q, &m_q, &sq, &x, a_obs.exact.as_ref());
                let constraint = if x.iter().all(|v| *v == 0.0) {
                    "X = 0 (Einstein metric)".to_string()
                } else if !kc.killing {
                    "not Killing (excluded on compact quotients)".to_string()
                } else {
                    let k = (0..3).find(|&i| x[i] != 0.0).expect("nonzero field");
                    axis_constraints
                        .iter()
                        .find(|ax| ax.axis == k)
                        .filter(|ax| !ax.constraint.is_empty())
                        .map_or("none".to_string(), |ax| ax.constraint.join(", "))
                };
                let sol = QeSolution {
                    x,
                    a: a_val,
                    residual,
                    killing: kc.killing,
                    killing_residual: kc.residual,
                    constraint,
                    a_exact: a_obs.exact.as_ref().map(ToString::to_string),
                    x_squared_exact: std::array::from_fn(|i| {
                        sq[i].exact.as_ref().map_or_else(|| format!("{:.15}", sq[i].approx), ToString::to_string)
                    }),
                    exact_verified,
                };
                if sol.killing {
                    solutions.push(sol);
                } else {
                    non_killing.push(sol);
                }
            }
        }
    }
    solutions.sort_by(cmp_solutions);
    non_killing.sort_by(cmp_solutions);
    Ok(FixedMetricSolutions { frame: *frame, m, solutions, non_killing, certificates })
}

/// Re-evaluates the tensor equation exactly when every `a_i` is rational.
fn exact_check(
    sc: &crate::algebra::StructureConstants<Rational>,
    ric: &SymTensor3<Rational>,
    m: &Rational,
    sq: &[crate::exact::ObservedValue],
    x: &[f64; 3],
    a: Option<&Rational>,
) -> bool {
    let Some(a) = a else { return false };
    let mut xs: [Rational; 3] = std::array::from_fn(|_| Rational::zero());
    for i in 0..3 {
        let Some(q) = sq[i].exact.as_ref().and_then(rational_sqrt) else { return false };
        xs[i] = if x[i] < 0.0 { -q } else { q.abs() };
    }
    let lie = lie_derivative_metric(sc, &xs);
    let t = combine(ric, &lie, &xs, m).sub(&SymTensor3::identity().scale(a));
    t.as_array().iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupTag;

    fn solve(g: GroupTag, l: [f64; 3], m: f64) -> FixedMetricSolutions {
        solve_fixed_metric(&MetricFrame::milnor(g, l).unwrap(), m).unwrap()
    }

    #[test]
    fn nil_axis_solutions() {
        let s = solve(GroupTag::Nil, [2.0, 0.0, 0.0], 1.0);
        let xs: Vec<_> = s.solutions.iter().map(|s| (s.x, s.a)).collect();
        assert_eq!(xs, [([2.0, 0.0, 0.0], -2.0), ([-2.0, 0.0, 0.0], -2.0)]);
        assert!(s.solutions.iter().all(|s| s.exact_verified && s.residual < SOLUTION_TOL));
        assert_eq!(s.solutions[0].constraint, "none");
        assert!(s.non_killing.is_empty());
        assert!(solve(GroupTag::Nil, [2.0, 0.0, 0.0], -1.0).solutions.is_empty());
    }

    #[test]
    fn flat_and_einstein_metrics() {
        for m in [-3.0, 0.5, 2.0] {
            let s = solve(GroupTag::R3, [0.0; 3], m);
            assert_eq!(s.solutions.len(), 1);
            assert_eq!((s.solutions[0].x, s.solutions[0].a), ([0.0; 3], 0.0));
        }
        let s = solve(GroupTag::Su2, [2.0, 2.0, 2.0], 1.0);
        assert_eq!(s.solutions.len(), 1);
        assert_eq!((s.solutions[0].x, s.solutions[0].a), ([0.0; 3], 2.0));
        assert_eq!(s.solutions[0].constraint, "X = 0 (Einstein metric)");
    }

    #[test]
    fn sl2r_killing_axis_branch() {
        let s = solve(GroupTag::Sl2r, [2.0, 2.0, -2.0], 2.0);
        let xs: Vec<_> = s.solutions.iter().map(|s| (s.x, s.a)).collect();
        assert_eq!(xs, [([0.0, 0.0, 4.0], -6.0), ([0.0, 0.0, -4.0], -6.0)]);
        assert_eq!(s.solutions[0].constraint, "λ1 = λ2");
        assert!(solve(GroupTag::Sl2r, [2.0, 2.0, -2.0], -2.0).solutions.is_empty());
    }

    #[test]
    fn e11_has_nothing() {
        for m in [-1.0, 1.0] {
            let s = solve(GroupTag::E11, [1.0, -1.0, 0.0], m);
            assert!(s.solutions.is_empty() && s.non_killing.is_empty());
            assert!(!s.certificates.is_empty());
        }
    }

    #[test]
    fn h2xr_killing_and_non_killing() {
        let f = MetricFrame::h2xr_from_rho(1.0).unwrap();
        let s = solve_fixed_metric(&f, 4.0).unwrap();
        let xs: Vec<_> = s.solutions.iter().map(|s| (s.x, s.a)).collect();
        assert_eq!(xs, [([0.0, 0.0, 2.0], -1.0), ([0.0, 0.0, -2.0], -1.0)]);
        let s = solve_fixed_metric(&f, -1.0).unwrap();
        assert!(s.solutions.is_empty());
        assert_eq!(s.non_killing.len(), 1);
        assert_eq!((s.non_killing[0].x, s.non_killing[0].a), ([-1.0, 0.0, 0.0], 0.0));
        assert!(s.non_killing[0].residual < SOLUTION_TOL);
    }

    #[test]
    fn su2_berger_sphere() {
        // Ric = diag(-5/2, -5/2, 25/2), so a3² = m(r3 - r1) = 15
        let s = solve(GroupTag::Su2, [2.0, 2.0, 5.0], 1.0);
        assert_eq!(s.solutions.len(), 2);
        for sol in &s.solutions {
            assert_eq!(sol.axis(), Some(2));
            assert_eq!(sol.x_squared_exact[2], "15");
            assert_eq!(sol.a_exact.as_deref(), Some("-5/2"));
            assert!(!sol.exact_verified);
            assert!(sol.residual < SOLUTION_TOL && sol.killing);
        }
    }

    #[test]
    fn zero_m_rejected() {
        let f = MetricFrame::milnor(GroupTag::Nil, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(solve_fixed_metric(&f, 0.0).unwrap_err(), SolverError::ZeroM);
    }
}
