//! Symbolic curvature over the bracket parameters and the Killing reduction.

use num::{One, Zero};
use serde::Serialize;

use super::{LieGeometry, MetricFrame, SolverError};
use crate::algebra::StructureConstants;
use crate::bakry_emery::{lie_derivative_metric, trace_q_ad};
use crate::curvature::ricci_tensor;
use crate::exact::{CaseSystem, Constraint, Poly};
use crate::scalar::{Rational, Sign};
use crate::tensor::SymTensor3;

/// Curvature data of a group with its bracket parameters kept as variables.
#[derive(Clone, Debug)]
pub(crate) struct SymbolicGroup {
    pub lie: LieGeometry,
    pub names: Vec<String>,
    pub sc: StructureConstants<Poly>,
    pub ric: SymTensor3<Poly>,
    /// `L_{e_k} g` for each basis vector.
    pub lie_axis: [SymTensor3<Poly>; 3],
}

fn basis(k: usize) -> [Poly; 3] {
    std::array::from_fn(|i| if i == k { Poly::one() } else { Poly::zero() })
}

impl SymbolicGroup {
    pub fn new(lie: LieGeometry) -> Self {
        let (names, sc) = match lie {
            LieGeometry::Unimodular(_) => (
                vec!["λ1".to_string(), "λ2".to_string(), "λ3".to_string()],
                StructureConstants::milnor([Poly::var(0), Poly::var(1), Poly::var(2)]),
            ),
            LieGeometry::H2xR => (vec!["κ".to_string()], StructureConstants::h2xr(Poly::var(0))),
        };
        let ric = ricci_tensor(&sc);
        let lie_axis = std::array::from_fn(|k| lie_derivative_metric(&sc, &basis(k)));
        Self { lie, names, sc, ric, lie_axis }
    }

    /// Substitutes the parameters the group pattern forces to vanish.
    pub fn reduce(&self, p: &Poly) -> Poly {
        match self.lie {
            LieGeometry::Unimodular(g) => g
                .pattern()
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == Sign::Zero)
                .fold(p.clone(), |acc, (i, _)| acc.substitute_rational(i, &Rational::zero())),
            LieGeometry::H2xR => p.clone(),
        }
    }

    pub fn show(&self, p: &Poly) -> String {
        p.to_string_with(&self.names)
    }

    /// Renders `p = 0`, as `x = y` when `p` is a difference of two variables.
    pub fn show_equation(&self, p: &Poly) -> String {
        let vars: Vec<usize> = p.vars().into_iter().collect();
        if vars.len() == 2 && p.num_terms() == 2 && p.total_degree() == 1 {
            let (x, y) = (vars[0], vars[1]);
            let cx = p.coefficient_in(x, 1).constant_value();
            let cy = p.coefficient_in(y, 1).constant_value();
            if let (Some(cx), Some(cy)) = (cx, cy) {
                if cx == -cy {
                    return format!("{} = {}", self.names[x], self.names[y]);
                }
            }
        }
        format!("{} = 0", self.show(p))
    }

    /// The group's sign pattern and a homothety normalization, ready for
    /// branch equations.
    pub fn base_system(&self) -> CaseSystem {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        let mut sys = CaseSystem::new(&names);
        match self.lie {
            LieGeometry::Unimodular(g) => {
                let pattern = g.pattern();
                for (i, s) in pattern.iter().enumerate() {
                    let name = &self.names[i];
                    match s {
                        Sign::Zero => sys.equation(Poly::var(i), format!("group pattern: {name} = 0")),
                        Sign::Positive => {
                            sys.require_nonzero(i);
                            sys.condition(Poly::var(i), Constraint::Positive, format!("group pattern: {name} > 0"));
                        }
                        Sign::Negative => {
                            sys.require_nonzero(i);
                            sys.condition(Poly::var(i), Constraint::Negative, format!("group pattern: {name} < 0"));
                        }
                    }
                }
                if pattern[0] == Sign::Positive {
                    sys.equation(Poly::var(0) - Poly::one(), "homothety: λ1 = 1");
                }
            }
            LieGeometry::H2xR => {
                sys.require_nonzero(0);
                sys.condition(Poly::var(0), Constraint::Positive, "orientation of e1: κ > 0");
                sys.equation(Poly::var(0) - Poly::one(), "homothety: κ = 1");
            }
        }
        sys
    }

    /// Entries of `L_{e_k} g` that survive the group pattern.
    pub fn killing_equations(&self, k: usize) -> Vec<(Poly, String)> {
        let mut out: Vec<(Poly, String)> = Vec::new();
        for i in 0..3 {
            for j in i..3 {
                let p = self.reduce(self.lie_axis[k].get(i, j));
                if !p.is_zero() && !out.iter().any(|(q, _)| *q == p || *q == -p.clone()) {
                    out.push((p, format!("L_(e{}) g(e{}, e{}) = 0", k + 1, i + 1, j + 1)));
                }
            }
        }
        out
    }

    /// Why it suffices to look at `X = 0` and `X = a_k e_k` with `e_k`
    /// Killing. Fails if a structural premise does not hold identically.
    pub fn justification(&self) -> Result<Vec<String>, SolverError> {
        let mut lines = Vec::new();
        match self.lie {
            LieGeometry::Unimodular(_) => {
                for k in 0..3 {
                    let e = basis(k);
                    let tr_ad = self.sc.trace_ad_basis(k);
                    let tr_ric = trace_q_ad(&self.ric, &self.sc, &e);
                    if !tr_ad.is_zero() || !tr_ric.is_zero() {
                        return Err(SolverError::Reduction(format!("trace identity premise fails on e{}", k + 1)));
                    }
                }
                lines.push(
                    "tr(ad_ek) and tr(Ric·ad_ek) vanish identically, so tr(q·ad_X) = -1/4 |L_X g|^2 for q = ric_X^m - A g; \
                     a solution has q = 0, hence X is Killing"
                        .to_string(),
                );
            }
            LieGeometry::H2xR => {
                lines.push(format!(
                    "tr(ad_e1) = {} is nonzero, so the trace identity is unavailable; X is required to be Killing \
                     (compact-quotient admissibility)",
                    self.show(&self.sc.trace_ad_basis(0))
                ));
            }
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if !self.reduce(self.ric.get(i, j)).is_zero() {
                return Err(SolverError::Reduction(format!("Ric(e{}, e{}) is not identically zero", i + 1, j + 1)));
            }
        }
        lines.push("Ric is diagonal in the frame for every parameter value".to_string());
        let supports: Vec<Vec<(usize, usize)>> = (0..3)
            .map(|k| {
                let mut s = Vec::new();
                for i in 0..3 {
                    for j in i..3 {
                        if !self.lie_axis[k].get(i, j).is_zero() {
                            s.push((i, j));
                        }
                    }
                }
                s
            })
            .collect();
        for a in 0..3 {
            for b in a + 1..3 {
                if supports[a].iter().any(|s| supports[b].contains(s)) {
                    return Err(SolverError::Reduction(format!("L_(e{}) g and L_(e{}) g overlap", a + 1, b + 1)));
                }
            }
        }
        lines.push("the L_(ek) g have pairwise disjoint supports, so L_X g = 0 forces a_k L_(ek) g = 0 for each k".to_string());
        lines.push(
            "for Killing X the off-diagonal equations read a_i a_j / m = 0, so at most one a_k is nonzero".to_string(),
        );
        Ok(lines)
    }
}

/// A basis direction whose left-invariant field can be Killing, with the
/// parameter constraint that makes it so.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KillingAxis {
    /// Zero-based axis index.
    pub axis: usize,
    /// Equations on the bracket parameters; empty when none are needed.
    pub constraint: Vec<String>,
}

impl KillingAxis {
    pub fn describe(&self) -> String {
        if self.constraint.is_empty() {
            format!("e{} (no constraint)", self.axis + 1)
        } else {
            format!("e{} ({})", self.axis + 1, self.constraint.join(", "))
        }
    }
}

/// Axes `k` for which `L_{e_k} g = 0` is satisfiable on the group, with the
/// constraint it imposes. An empty result means only `X = 0` is Killing
/// among axis fields.
pub fn killing_reduction(lie: LieGeometry) -> Result<Vec<KillingAxis>, SolverError> {
    let sym = SymbolicGroup::new(lie);
    let mut out = Vec::new();
    for k in 0..3 {
        let eqs = sym.killing_equations(k);
        let mut sys = sym.base_system();
        for (p, label) in &eqs {
            sys.equation(p.clone(), label.clone());
        }
        if !sys.solve()?.samples.is_empty() {
            out.push(KillingAxis { axis: k, constraint: eqs.iter().map(|(p, _)| sym.show_equation(p)).collect() });
        }
    }
    Ok(out)
}

/// Axes whose basis field is Killing for this particular metric (exact test).
pub fn killing_axes(frame: &MetricFrame) -> Vec<usize> {
    let sc = frame.exact_structure();
    (0..3)
        .filter(|&k| {
            let e: [Rational; 3] = std::array::from_fn(|i| if i == k { Rational::one() } else { Rational::zero() });
            lie_derivative_metric(&sc, &e).as_array().iter().all(Zero::is_zero)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupTag;

    fn axes(lie: LieGeometry) -> Vec<String> {
        killing_reduction(lie).unwrap().iter().map(KillingAxis::describe).collect()
    }

    #[test]
    fn reduction_per_group() {
        use GroupTag::*;
        assert_eq!(axes(LieGeometry::Unimodular(Nil)), ["e1 (no constraint)"]);
        assert!(axes(LieGeometry::Unimodular(E11)).is_empty());
        assert_eq!(axes(LieGeometry::Unimodular(Sl2r)), ["e3 (λ1 = λ2)"]);
        assert_eq!(axes(LieGeometry::Unimodular(E2)), ["e3 (λ1 = λ2)"]);
        assert_eq!(axes(LieGeometry::Unimodular(Su2)), ["e1 (λ2 = λ3)", "e2 (λ1 = λ3)", "e3 (λ1 = λ2)"]);
        assert_eq!(axes(LieGeometry::Unimodular(R3)), ["e1 (no constraint)", "e2 (no constraint)", "e3 (no constraint)"]);
        assert_eq!(axes(LieGeometry::H2xR), ["e3 (no constraint)"]);
    }

    #[test]
    fn killing_axes_of_a_concrete_metric() {
        let f = MetricFrame::milnor(GroupTag::Su2, [2.0, 2.0, 5.0]).unwrap();
        assert_eq!(killing_axes(&f), [2]);
        let bi = MetricFrame::milnor(GroupTag::Su2, [1.0, 1.0, 1.0]).unwrap();
        assert_eq!(killing_axes(&bi), [0, 1, 2]);
        assert_eq!(killing_axes(&MetricFrame::H2xR { kappa: 1.0 }), [2]);
    }

    #[test]
    fn justification_holds_for_every_group() {
        for g in GroupTag::ALL {
            let lines = SymbolicGroup::new(LieGeometry::Unimodular(g)).justification().unwrap();
            assert!(lines[0].contains("Killing"));
        }
        assert!(SymbolicGroup::new(LieGeometry::H2xR).justification().unwrap()[0].contains("nonzero"));
    }
}
