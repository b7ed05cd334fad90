//! Sign-cell classification over all metrics of a group.
//!
//! Every solution is `X = 0` on an Einstein metric or `X = a_k e_k` with
//! `e_k` Killing (see [`SymbolicGroup::justification`]). On the axis branch
//! the diagonal equations give `A = r(e_i)` for the two axes orthogonal to
//! `X` and `a_k² = m (r(e_k) − r(e_i))`, so a cell `(sign m, sign A)` is
//! realized exactly when the case split finds parameters with
//! `sign A = sign(r(e_i))` and `sign m = sign(r(e_k) − r(e_i))`.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fixed::{solve_fixed_metric, SOLUTION_TOL};
use super::symbolic::SymbolicGroup;
use super::{Geometry, LieGeometry, MetricFrame, SignCell, SolverError, Verdict};
use crate::algebra::MilnorFrame;
use crate::bakry_emery::{is_killing, qe_residual, BakryEmeryInput};
use crate::curvature::ricci_tensor;
use crate::exact::casesplit::Observable;
use crate::exact::{CaseSystem, Constraint, Poly, Sample, Value};
use crate::scalar::{Rational, Sign};

const DRAWS: usize = 10;

/// A closed-form solution family, in the unnormalized bracket parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QeSolutionFamily {
    /// Zero-based axis carrying `X`, `None` for `X = 0`.
    pub axis: Option<usize>,
    pub coefficient: String,
    #[serde(rename = "A")]
    pub a: String,
    pub constraint: Vec<String>,
    /// Case-split path of the parameter region realizing this cell.
    pub region: Vec<String>,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseOutcome {
    /// No parameters satisfy the branch; `violated` names the equation or
    /// condition that failed.
    Eliminated { violated: String },
    /// Parameters exist but give the wrong signs for this cell.
    Mismatch { reason: String },
    /// Parameters exist but the metric belongs to another row.
    Routed { reason: String },
    /// Parameters exist and realize the cell.
    Realized { a_sign: Sign, g_sign: Option<Sign> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    pub branch: String,
    pub path: Vec<String>,
    /// Principal Ricci signs at the sample, e.g. `(+,-,-)`.
    pub signature: Option<String>,
    pub outcome: CaseOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub justification: Vec<String>,
    pub cases: Vec<CaseRecord>,
    pub notes: Vec<String>,
}

impl Certificate {
    /// Every branch (`X = 0` and each axis) has at least one record.
    pub fn is_complete(&self) -> bool {
        branch_labels().iter().all(|b| self.cases.iter().any(|c| &c.branch == b))
    }

    /// Cases that actually realize the cell.
    pub fn realized(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| matches!(c.outcome, CaseOutcome::Realized { .. }))
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.justification.iter().map(|j| format!("premise: {j}")).collect();
        for c in &self.cases {
            let sig = c.signature.as_deref().map(|s| format!(" signature {s}")).unwrap_or_default();
            let what = match &c.outcome {
                CaseOutcome::Eliminated { violated } => format!("eliminated: {violated}"),
                CaseOutcome::Mismatch { reason } => format!("wrong cell: {reason}"),
                CaseOutcome::Routed { reason } => format!("routed: {reason}"),
                CaseOutcome::Realized { .. } => "realizes the cell".to_string(),
            };
            let path = if c.path.is_empty() { String::new() } else { format!(" [{}]", c.path.join("; ")) };
            out.push(format!("{}{}{}: {}", c.branch, sig, path, what));
        }
        out.extend(self.notes.iter().map(|n| format!("note: {n}")));
        out
    }
}

/// A numeric check of one member of a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DrawCheck {
    pub frame: serde_json::Value,
    pub m: f64,
    #[serde(rename = "X")]
    pub x: [f64; 3],
    #[serde(rename = "A")]
    pub a: f64,
    pub residual: f64,
    pub killing: bool,
    /// `(sign m, sign A)` of the draw equals the cell.
    pub in_cell: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip)]
    pub metric: MetricFrame,
    pub frame: serde_json::Value,
    pub m: f64,
    #[serde(rename = "X")]
    pub x: [f64; 3],
    #[serde(rename = "A")]
    pub a: f64,
    pub residual: f64,
    pub killing_residual: f64,
    /// The exact fixed-metric solver returns this solution as well.
    pub confirmed_by_solver: bool,
    pub draws: Vec<DrawCheck>,
}

impl Witness {
    pub fn is_valid(&self) -> bool {
        self.residual < SOLUTION_TOL
            && self.confirmed_by_solver
            && self.draws.len() == DRAWS
            && self.draws.iter().all(|d| d.residual < SOLUTION_TOL && d.killing && d.in_cell)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellVerdict {
    pub geometry: Geometry,
    pub cell: SignCell,
    pub verdict: Verdict,
    pub families: Vec<QeSolutionFamily>,
    /// Present for `Exists` (a nontrivial field) and `TrivialOnly` (`X = 0`).
    pub witness: Option<Witness>,
    pub certificate: Certificate,
}

fn branch_labels() -> [String; 4] {
    ["X = 0".to_string(), "X = a1 e1".to_string(), "X = a2 e2".to_string(), "X = a3 e3".to_string()]
}

fn others(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn relation(s: Sign) -> &'static str {
    match s {
        Sign::Positive => "> 0",
        Sign::Zero => "= 0",
        Sign::Negative => "< 0",
    }
}

fn signature_string(signs: &[Sign]) -> String {
    let s: Vec<String> = signs.iter().map(|s| s.symbol().to_string()).collect();
    format!("({})", s.join(","))
}

/// Zero test scaled to the size of the curvature.
fn sign_with_tol(x: f64, scale: f64) -> Sign {
    if x.abs() <= 1e-10 * (1.0 + scale) {
        Sign::Zero
    } else {
        Sign::of_f64(x)
    }
}

struct Branch {
    axis: Option<usize>,
    label: String,
    system: CaseSystem,
}

fn branches(sym: &SymbolicGroup) -> Vec<Branch> {
    let mut out = Vec::new();
    let mut sys = sym.base_system();
    for j in [1, 2] {
        sys.equation(sym.ric.get(0, 0).clone() - sym.ric.get(j, j).clone(), format!("Einstein: r(e1) = r(e{})", j + 1));
    }
    sys.observe("A", sym.ric.get(0, 0).clone());
    sys.observe("G", Poly::zero());
    for i in 0..3 {
        sys.observe(format!("r(e{})", i + 1), sym.ric.get(i, i).clone());
    }
    out.push(Branch { axis: None, label: branch_labels()[0].clone(), system: sys });
    for k in 0..3 {
        let (i, j) = others(k);
        let mut sys = sym.base_system();
        for (p, label) in sym.killing_equations(k) {
            sys.equation(p, label);
        }
        sys.equation(
            sym.ric.get(i, i).clone() - sym.ric.get(j, j).clone(),
            format!("ric_X^m(e{0}, e{0}) = ric_X^m(e{1}, e{1})", i + 1, j + 1),
        );
        sys.observe("A", sym.ric.get(i, i).clone());
        sys.observe("G", sym.ric.get(k, k).clone() - sym.ric.get(i, i).clone());
        for t in 0..3 {
            sys.observe(format!("r(e{})", t + 1), sym.ric.get(t, t).clone());
        }
        out.push(Branch { axis: Some(k), label: branch_labels()[k + 1].clone(), system: sys });
    }
    out
}

fn frame_at(lie: LieGeometry, values: &[f64]) -> MetricFrame {
    match lie {
        LieGeometry::Unimodular(g) => {
            MetricFrame::Milnor(MilnorFrame { group: g, lambda_star: [values[0], values[1], values[2]] })
        }
        LieGeometry::H2xR => MetricFrame::H2xR { kappa: values[0] },
    }
}

/// Field, constant and residual of the branch member on `frame` at `m`.
fn member(frame: &MetricFrame, axis: Option<usize>, m: f64) -> ([f64; 3], f64, Sign, f64, bool) {
    let sc = frame.structure();
    let ric = ricci_tensor(&sc);
    let scale = ric.sup_norm();
    let mut x = [0.0; 3];
    let a = match axis {
        None => *ric.get(0, 0),
        Some(k) => {
            let (i, _) = others(k);
            let g = ric.get(k, k) - ric.get(i, i);
            x[k] = (m * g).max(0.0).sqrt();
            *ric.get(i, i)
        }
    };
    let input = BakryEmeryInput::new(sc.clone(), x, m).expect("nonzero m");
    let residual = qe_residual(&input, a).sup_norm;
    let killing = is_killing(&sc, &x).killing;
    (x, a, sign_with_tol(a, scale), residual, killing)
}

fn build_witness(lie: LieGeometry, geometry: Geometry, cell: SignCell, axis: Option<usize>, sample: &Sample) -> Witness {
    let m = if cell.m == Sign::Positive { 1.0 } else { -1.0 };
    let values: Vec<f64> = sample.values.iter().map(Value::to_f64).collect();
    let metric = frame_at(lie, &values);
    let (x, a, _, residual, _) = member(&metric, axis, m);
    let killing_residual = is_killing(&metric.structure(), &x).residual;
    let confirmed_by_solver = solve_fixed_metric(&metric, m).is_ok_and(|s| {
        s.solutions.iter().any(|sol| {
            (sol.a - a).abs() < 1e-9 && sol.x.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9)
        })
    });

    let seed = 1000 * geometry as u64 + SignCell::ALL.iter().position(|c| *c == cell).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(DRAWS);
    for _ in 0..DRAWS {
        let vals: Vec<f64> = match sample.draw(&mut rng).and_then(|t| sample.instantiate(&t)) {
            Some((vs, _)) => vs.iter().map(Value::to_f64).collect(),
            None => values.clone(),
        };
        let c: f64 = rng.random_range(0.5..2.0);
        let m_draw = m * rng.random_range(0.25..4.0);
        let frame = frame_at(lie, &vals).scaled(1.0 / c);
        let (x, a, a_sign, residual, killing) = member(&frame, axis, m_draw);
        let nontrivial = axis.is_none() || x.iter().any(|v| *v != 0.0);
        draws.push(DrawCheck {
            frame: frame.to_json(),
            m: m_draw,
            x,
            a,
            residual,
            killing,
            in_cell: a_sign == cell.a && nontrivial,
        });
    }
    Witness { metric, frame: metric.to_json(), m, x, a, residual, killing_residual, confirmed_by_solver, draws }
}

/// The family of a branch with the Killing constraint substituted, in the
/// unnormalized parameters.
fn family(sym: &SymbolicGroup, axis: Option<usize>, region: &[String]) -> QeSolutionFamily {
    let provenance = "case split over the bracket parameters".to_string();
    match axis {
        None => {
            let constraint = [1, 2]
                .iter()
                .filter_map(|&j| {
                    let p = sym.reduce(&(sym.ric.get(0, 0).clone() - sym.ric.get(j, j).clone()));
                    (!p.is_zero()).then(|| format!("r(e1) = r(e{}): {}", j + 1, sym.show_equation(&p)))
                })
                .collect();
            QeSolutionFamily {
                axis: None,
                coefficient: "X = 0".into(),
                a: format!("A = {}", sym.show(&sym.reduce(sym.ric.get(0, 0)))),
                constraint,
                region: region.to_vec(),
                provenance,
            }
        }
        Some(k) => {
            let (i, j) = others(k);
            let mut subst: Vec<(usize, Poly)> = Vec::new();
            let mut constraint = Vec::new();
            for (p, _) in sym.killing_equations(k) {
                constraint.push(sym.show_equation(&p));
                let vars: Vec<usize> = p.vars().into_iter().collect();
                if vars.len() == 2 && p.total_degree() == 1 && p.num_terms() == 2 {
                    subst.push((vars[1], Poly::var(vars[0])));
                }
            }
            let apply = |p: &Poly| subst.iter().fold(sym.reduce(p), |acc, (v, by)| acc.substitute(*v, by));
            let rest = apply(&(sym.ric.get(i, i).clone() - sym.ric.get(j, j).clone()));
            if !rest.is_zero() {
                constraint.push(format!("r(e{}) = r(e{}): {}", i + 1, j + 1, sym.show_equation(&rest)));
            }
            let g = apply(&(sym.ric.get(k, k).clone() - sym.ric.get(i, i).clone()));
            QeSolutionFamily {
                axis: Some(k),
                coefficient: format!("a{}^2 = m*({})", k + 1, sym.show(&g)),
                a: format!("A = {}", sym.show(&apply(sym.ric.get(i, i)))),
                constraint,
                region: region.to_vec(),
                provenance,
            }
        }
    }
}

/// Non-Killing solutions on H²×ℝ at κ = 1 with `m` left free. They solve the
/// tensor equation on the simply connected space only.
fn h2xr_non_killing(cell: SignCell) -> Result<Vec<String>, SolverError> {
    let sym = SymbolicGroup::new(LieGeometry::H2xR);
    let sc = sym.sc.map(|p| p.substitute_rational(0, &Rational::one()));
    let ric = ricci_tensor(&sc);
    let a: [Poly; 3] = std::array::from_fn(Poly::var);
    let m = Poly::var(3);
    let lie = crate::bakry_emery::lie_derivative_metric(&sc, &a);
    // m·ric_X^m, cleared of the denominator
    let f = ric
        .scale(&m)
        .add(&lie.scale(&(m.clone() * Poly::constant(Rational::new(1.into(), 2.into())))))
        .sub(&crate::bakry_emery::one_form_square(&a));
    let mut notes = Vec::new();
    for mask in [1usize, 2, 3, 5, 6, 7] {
        let mut sys = CaseSystem::new(&["a1", "a2", "a3", "m"]);
        sys.require_nonzero(3);
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
        sys.observe("m", m.clone());
        sys.observables.push(Observable { label: "A".into(), num: f.get(0, 0).clone(), den: m.clone() });
        for sample in sys.solve()?.samples {
            let (sm, sa) = (sample.observed[0].sign, sample.observed[1].sign);
            if sm != cell.m || sa != cell.a {
                continue;
            }
            let x: Vec<String> = (0..3).map(|i| sample.values[i].to_string()).collect();
            notes.push(format!(
                "non-Killing solution at κ = 1: m = {}, X = ({}), A = {}; excluded because X must be Killing on a compact quotient",
                sample.values[3],
                x.join(", "),
                sample.observed[1].exact.as_ref().map_or_else(|| sample.observed[1].approx.to_string(), ToString::to_string)
            ));
        }
    }
    Ok(notes)
}

/// Decides whether some left-invariant metric on the group carries a
/// solution with the given signs of `m` and `A`.
pub fn classify_cell(geometry: Geometry, cell: SignCell) -> Result<CellVerdict, SolverError> {
    let lie = geometry.lie().ok_or(SolverError::NotLieGroup(geometry))?;
    if cell.m == Sign::Zero {
        return Err(SolverError::ZeroSignM);
    }
    let sym = SymbolicGroup::new(lie);
    let justification = sym.justification()?;
    let mut cases = Vec::new();
    let mut families = Vec::new();
    let mut exists: Option<(usize, Sample)> = None;
    let mut trivial: Option<Sample> = None;

    for branch in branches(&sym) {
        let analysis = branch.system.solve()?;
        for e in &analysis.eliminations {
            cases.push(CaseRecord {
                branch: branch.label.clone(),
                path: e.path.clone(),
                signature: None,
                outcome: CaseOutcome::Eliminated { violated: e.reason.clone() },
            });
        }
        // interval cells first: they give the most useful witnesses
        let mut samples = analysis.samples.clone();
        samples.sort_by_key(|s| !s.is_interval());
        let mut family_added = false;
        for sample in samples {
            let a_sign = sample.observed[0].sign;
            let g_sign = sample.observed[1].sign;
            let r: Vec<Sign> = sample.observed[2..5].iter().map(|o| o.sign).collect();
            let signature = Some(signature_string(&r));
            let flat = r.iter().all(|s| *s == Sign::Zero);
            let outcome = if flat && geometry != Geometry::R3 {
                CaseOutcome::Routed { reason: "flat metric, counted under R3".into() }
            } else if let Some(k) = branch.axis {
                let (i, _) = others(k);
                if g_sign != cell.m {
                    let what = if g_sign == Sign::Zero {
                        format!("r(e{}) = r(e{}) forces a{} = 0", k + 1, i + 1, k + 1)
                    } else {
                        format!("a{0}^2 = m*(r(e{0}) - r(e{1})) needs r(e{0}) - r(e{1}) {2}, found {3}", k + 1, i + 1, relation(cell.m), relation(g_sign))
                    };
                    CaseOutcome::Mismatch { reason: what }
                } else if a_sign != cell.a {
                    CaseOutcome::Mismatch { reason: format!("A = r(e{}) {}, cell needs A {}", i + 1, relation(a_sign), relation(cell.a)) }
                } else {
                    CaseOutcome::Realized { a_sign, g_sign: Some(g_sign) }
                }
            } else if a_sign != cell.a {
                CaseOutcome::Mismatch { reason: format!("Einstein constant {}, cell needs A {}", relation(a_sign), relation(cell.a)) }
            } else {
                CaseOutcome::Realized { a_sign, g_sign: None }
            };
            if matches!(outcome, CaseOutcome::Realized { .. }) {
                if !family_added {
                    families.push(family(&sym, branch.axis, &sample.path));
                    family_added = true;
                }
                match branch.axis {
                    Some(k) if exists.is_none() => exists = Some((k, sample.clone())),
                    None if trivial.is_none() => trivial = Some(sample.clone()),
                    _ => {}
                }
            }
            cases.push(CaseRecord { branch: branch.label.clone(), path: sample.path.clone(), signature, outcome });
        }
    }

    let notes = if lie == LieGeometry::H2xR { h2xr_non_killing(cell)? } else { Vec::new() };
    let (verdict, witness) = match (exists, trivial) {
        (Some((k, s)), _) => (Verdict::Exists, Some(build_witness(lie, geometry, cell, Some(k), &s))),
        (None, Some(s)) => (Verdict::TrivialOnly, Some(build_witness(lie, geometry, cell, None, &s))),
        (None, None) => (Verdict::None, None),
    };
    Ok(CellVerdict { geometry, cell, verdict, families, witness, certificate: Certificate { justification, cases, notes } })
}

/// The Ricci-signature branch with two vanishing principal curvatures and
/// `X` along the third axis, as used by the `A = 0` families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureBranchReport {
    /// Zero-based axis carrying the nonzero principal curvature.
    pub axis: usize,
    /// Some metric of the group has `r(e_j) = r(e_k) = 0 ≠ r(e_axis)`.
    pub attainable: bool,
    pub sample: Option<Vec<f64>>,
    /// Sign of `r(e_axis)` at the sample.
    pub sign: Option<Sign>,
    /// Some such metric also has `e_axis` Killing.
    pub killing_compatible: bool,
    /// Why the Killing-constrained system has no admissible member.
    pub violated: Vec<String>,
}

/// Examines, for each axis, the metrics whose other two principal Ricci
/// curvatures vanish, and whether that axis can be Killing on them.
pub fn zero_ricci_branch(lie: LieGeometry) -> Result<Vec<SignatureBranchReport>, SolverError> {
    let sym = SymbolicGroup::new(lie);
    let mut out = Vec::new();
    for k in 0..3 {
        let (i, j) = others(k);
        // r(e_i) = 2 μ_k μ_j and r(e_j) = 2 μ_k μ_i with μ_t = ½(Σλ) − λ_t,
        // so the product equations split into linear ones
        let splits: Vec<Vec<(Poly, String)>> = match lie {
            LieGeometry::Unimodular(_) => {
                let half = Poly::constant(Rational::new(1.into(), 2.into()));
                let sum = Poly::var(0) + Poly::var(1) + Poly::var(2);
                let mu = |t: usize| (sum.clone() - Poly::var(t) - Poly::var(t)) * half.clone();
                vec![
                    vec![(mu(k), format!("μ{} = 0", k + 1))],
                    vec![(mu(i), format!("μ{} = 0", i + 1)), (mu(j), format!("μ{} = 0", j + 1))],
                ]
            }
            LieGeometry::H2xR => vec![vec![]],
        };
        let mut report = SignatureBranchReport {
            axis: k,
            attainable: false,
            sample: None,
            sign: None,
            killing_compatible: false,
            violated: Vec::new(),
        };
        for with_killing in [false, true] {
            for split in &splits {
                let mut sys = sym.base_system();
                for (p, label) in split {
                    sys.equation(p.clone(), label.clone());
                }
                sys.equation(sym.ric.get(i, i).clone(), format!("r(e{}) = 0", i + 1));
                sys.equation(sym.ric.get(j, j).clone(), format!("r(e{}) = 0", j + 1));
                sys.condition(sym.ric.get(k, k).clone(), Constraint::NonZero, format!("r(e{}) != 0", k + 1));
                if with_killing {
                    for (p, label) in sym.killing_equations(k) {
                        sys.equation(p, label);
                    }
                }
                sys.observe(format!("r(e{})", k + 1), sym.ric.get(k, k).clone());
                let analysis = sys.solve()?;
                if with_killing {
                    report.killing_compatible |= !analysis.samples.is_empty();
                    report.violated.extend(analysis.eliminations.iter().map(ToString::to_string));
                } else if let Some(s) = analysis.samples.first() {
                    report.attainable = true;
                    report.sample = Some(s.values.iter().map(Value::to_f64).collect());
                    report.sign = Some(s.observed[0].sign);
                }
            }
        }
        if report.killing_compatible {
            report.violated.clear();
        }
        out.push(report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupTag;

    const PP: SignCell = SignCell { m: Sign::Positive, a: Sign::Positive };
    const PZ: SignCell = SignCell { m: Sign::Positive, a: Sign::Zero };
    const PN: SignCell = SignCell { m: Sign::Positive, a: Sign::Negative };
    const NP: SignCell = SignCell { m: Sign::Negative, a: Sign::Positive };
    const NZ: SignCell = SignCell { m: Sign::Negative, a: Sign::Zero };
    const NN: SignCell = SignCell { m: Sign::Negative, a: Sign::Negative };

    fn row(g: Geometry) -> Vec<Verdict> {
        SignCell::ALL.iter().map(|c| classify_cell(g, *c).unwrap().verdict).collect()
    }

    #[test]
    fn nil_row() {
        use Verdict::*;
        assert_eq!(row(Geometry::Nil), [None, None, Exists, None, None, None]);
        let v = classify_cell(Geometry::Nil, PN).unwrap();
        let w = v.witness.as_ref().unwrap();
        assert!(w.is_valid(), "{w:#?}");
        assert_eq!(v.families[0].coefficient, "a1^2 = m*(λ1^2)");
        assert_eq!(v.families[0].a, "A = -1/2*λ1^2");
    }

    #[test]
    fn empty_and_trivial_rows() {
        use Verdict::*;
        assert_eq!(row(Geometry::E11), [None; 6]);
        assert_eq!(row(Geometry::E2), [None; 6]);
        assert_eq!(row(Geometry::R3), [None, TrivialOnly, None, None, TrivialOnly, None]);
        let v = classify_cell(Geometry::E11, NZ).unwrap();
        assert!(v.certificate.is_complete());
        assert!(v.certificate.realized().next().is_none());
    }

    #[test]
    fn su2_row() {
        use Verdict::*;
        assert_eq!(row(Geometry::Su2), [Exists, Exists, Exists, Exists, None, None]);
        for c in [PP, PZ, PN, NP] {
            assert!(classify_cell(Geometry::Su2, c).unwrap().witness.unwrap().is_valid());
        }
    }

    #[test]
    fn sl2r_row_follows_the_computation() {
        use Verdict::*;
        assert_eq!(row(Geometry::Sl2r), [None, None, Exists, None, None, None]);
        let v = classify_cell(Geometry::Sl2r, NZ).unwrap();
        assert!(v.certificate.is_complete());
    }

    #[test]
    fn h2xr_row_and_non_killing_note() {
        use Verdict::*;
        assert_eq!(row(Geometry::H2xR), [None, None, Exists, None, None, None]);
        let v = classify_cell(Geometry::H2xR, NZ).unwrap();
        assert_eq!(v.certificate.notes.len(), 1, "{:?}", v.certificate.notes);
        assert!(v.certificate.notes[0].contains("m = -1"));
        assert!(classify_cell(Geometry::H2xR, NN).unwrap().certificate.notes.is_empty());
    }

    #[test]
    fn products_are_rejected() {
        assert_eq!(classify_cell(Geometry::H3, PP).unwrap_err(), SolverError::NotLieGroup(Geometry::H3));
        let bad = SignCell { m: Sign::Zero, a: Sign::Zero };
        assert_eq!(classify_cell(Geometry::Nil, bad).unwrap_err(), SolverError::ZeroSignM);
    }

    #[test]
    fn sl2r_zero_ricci_branch_is_not_killing() {
        let reports = zero_ricci_branch(LieGeometry::Unimodular(GroupTag::Sl2r)).unwrap();
        let attained: Vec<_> = reports.iter().filter(|r| r.attainable).collect();
        assert!(!attained.is_empty());
        assert!(attained.iter().all(|r| r.sign == Some(Sign::Negative)));
        assert!(reports.iter().all(|r| !r.killing_compatible));
        assert!(attained.iter().all(|r| !r.violated.is_empty()));
    }
}
