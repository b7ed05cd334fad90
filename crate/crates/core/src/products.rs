//! Einstein products `M × N`, space forms and the circle.
//!
//! Factors are described by their dimension, Einstein constant and whether
//! their geodesics close up; the arguments below only use these data. Each
//! verdict carries the chain of rules that produced it.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::qe_solver::Verdict;
use crate::riccati::{classify_global, transport_verdict, RiccatiKind, RiccatiProblem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProductError {
    #[error("m must be nonzero")]
    ZeroM,
    #[error("inputs must be finite")]
    NonFinite,
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}

fn check(values: &[f64], m: f64) -> Result<(), ProductError> {
    if values.iter().chain(std::iter::once(&m)).any(|v| !v.is_finite()) {
        return Err(ProductError::NonFinite);
    }
    if m == 0.0 {
        return Err(ProductError::ZeroM);
    }
    Ok(())
}

/// A simply connected complete Einstein manifold, `Ric = ρ g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EinsteinFactor {
    pub dim: usize,
    pub rho: f64,
    pub periodic_geodesics: bool,
    pub is_line: bool,
}

impl EinsteinFactor {
    pub fn new(dim: usize, rho: f64, periodic_geodesics: bool) -> Result<Self, ProductError> {
        if !rho.is_finite() {
            return Err(ProductError::NonFinite);
        }
        match dim {
            0 => Err(ProductError::InvalidFactor("dimension must be positive".into())),
            // the only simply connected complete 1-manifold
            1 if rho != 0.0 || periodic_geodesics => {
                Err(ProductError::InvalidFactor("a 1-dimensional factor is the line: ρ = 0, geodesics not periodic".into()))
            }
            1 => Ok(Self::line()),
            _ => Ok(Self { dim, rho, periodic_geodesics, is_line: false }),
        }
    }

    pub fn line() -> Self {
        Self { dim: 1, rho: 0.0, periodic_geodesics: false, is_line: true }
    }

    /// Round sphere `S^dim` with Einstein constant `rho > 0`.
    pub fn sphere(dim: usize, rho: f64) -> Result<Self, ProductError> {
        if !(rho > 0.0) || dim < 2 {
            return Err(ProductError::InvalidFactor(format!("sphere needs dim ≥ 2 and ρ > 0, got dim {dim}, ρ {rho}")));
        }
        Self::new(dim, rho, true)
    }

    /// Hyperbolic space `H^dim` with Einstein constant `rho < 0`.
    pub fn hyperbolic(dim: usize, rho: f64) -> Result<Self, ProductError> {
        if !(rho < 0.0) || dim < 2 {
            return Err(ProductError::InvalidFactor(format!("hyperbolic space needs dim ≥ 2 and ρ < 0, got dim {dim}, ρ {rho}")));
        }
        Self::new(dim, rho, false)
    }

    pub fn label(&self) -> String {
        if self.is_line {
            "R".into()
        } else {
            format!("M^{}(ρ={})", self.dim, self.rho)
        }
    }
}

/// `X = c ∂r` along the line factor, by Riccati branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineField {
    /// `√(−A m)`.
    pub coefficient: f64,
    pub branches: Vec<String>,
    /// Sup norm of `ric_X^m − A g` for the constant branch, assembled blockwise.
    pub block_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductVerdict {
    pub verdict: Verdict,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub field: Option<LineField>,
    pub reasoning: Vec<String>,
}

impl ProductVerdict {
    fn none(reasoning: Vec<String>) -> Self {
        Self { verdict: Verdict::None, a: None, field: None, reasoning }
    }

    fn trivial(a: f64, reasoning: Vec<String>) -> Self {
        Self { verdict: Verdict::TrivialOnly, a: Some(a), field: None, reasoning }
    }
}

/// `ric_X^m − A g` on `M × ℝ` for `X = c ∂r`, assembled from blocks:
/// `Ric = diag(ρ g_M, 0)`, `L_X g = 0`, `X♭⊗X♭ = c² dr²`.
pub fn block_residual(factor: &EinsteinFactor, c: f64, m: f64, a: f64) -> f64 {
    let n = factor.dim + 1;
    let mut ric = DMatrix::<f64>::zeros(n, n);
    for i in 0..factor.dim {
        ric[(i, i)] = factor.rho;
    }
    let lie = DMatrix::<f64>::zeros(n, n);
    let mut xx = DMatrix::<f64>::zeros(n, n);
    xx[(n - 1, n - 1)] = c * c;
    let q = ric + lie * 0.5 - xx / m - DMatrix::<f64>::identity(n, n) * a;
    q.amax()
}

/// Solutions on the Riemannian product `M × N` of simply connected Einstein
/// factors. With `compact` set, only branches that descend to a compact
/// quotient are kept.
pub fn product_qe(fm: &EinsteinFactor, fn_: &EinsteinFactor, m: f64, compact: bool) -> Result<ProductVerdict, ProductError> {
    check(&[fm.rho, fn_.rho], m)?;
    let mut why = vec![format!("product {} x {}, m = {m}", fm.label(), fn_.label())];
    let dichotomy = |f: &EinsteinFactor, why: &mut Vec<String>| {
        why.push(format!(
            "line-factor dichotomy: {} has dimension {} ≥ 2, so it has a geodesic orthogonal to X at some point and X restricted to it vanishes",
            f.label(),
            f.dim
        ));
    };

    match (fm.is_line, fn_.is_line) {
        (true, true) => {
            why.push("riccati-zero (λ=0): on the flat plane φ' = φ²/m has only φ ≡ 0 globally".into());
            Ok(ProductVerdict::trivial(0.0, why))
        }
        (false, false) => {
            dichotomy(fm, &mut why);
            dichotomy(fn_, &mut why);
            if fm.rho == fn_.rho {
                why.push(format!("X = 0 and the product is Einstein: A = ρ = {}", fm.rho));
                Ok(ProductVerdict::trivial(fm.rho, why))
            } else {
                why.push(format!("X = 0 needs Ric = A g, impossible with ρ_M = {} ≠ ρ_N = {}", fm.rho, fn_.rho));
                Ok(ProductVerdict::none(why))
            }
        }
        _ => {
            let other = if fm.is_line { fn_ } else { fm };
            let rho = other.rho;
            dichotomy(other, &mut why);
            why.push(format!("X is tangent to the line, so restricting to {} gives A = ρ = {rho}", other.label()));
            if other.periodic_geodesics {
                let t = transport_verdict(0.0, m, true, true).map_err(|_| ProductError::ZeroM)?;
                why.push(format!("periodic transport on {} (λ = A − ρ = 0): {}", other.label(), t.reason));
            }
            why.push("along the line φ' − φ²/m = A".into());
            let problem = RiccatiProblem::new(rho, m, None).map_err(|_| ProductError::NonFinite)?;
            let branches = classify_global(&problem);
            if branches.iter().any(|b| b.kind == RiccatiKind::NoGlobalSolution) {
                why.push(format!("riccati-blow-up (λm>0): λm = {} > 0, every nonzero φ escapes in finite time", rho * m));
                why.push(format!("X = 0 needs Ric = A g, impossible with ρ = {rho} ≠ 0 on a factor and 0 on the line"));
                return Ok(ProductVerdict::none(why));
            }
            if rho == 0.0 {
                why.push("riccati-zero (λ=0): the only global solution is φ ≡ 0, so X = 0 and A = 0".into());
                return Ok(ProductVerdict::trivial(0.0, why));
            }
            let c = (-rho * m).sqrt();
            why.push(format!("riccati-constant (λm<0): φ = ±√(−ρm) = ±{c}"));
            let mut shapes = vec![format!("X = +{c} ∂r"), format!("X = -{c} ∂r")];
            if compact {
                why.push("compact quotient: the tanh branch is not bounded away from its limits, constant branches only".into());
            } else {
                shapes.push(format!("X = -{c} tanh(({c}/{m})(r + C)) ∂r"));
                why.push("simply connected total space: the tanh branch is also global".into());
            }
            let block = block_residual(other, c, m, rho);
            Ok(ProductVerdict {
                verdict: Verdict::Exists,
                a: Some(rho),
                field: Some(LineField { coefficient: c, branches: shapes, block_residual: block }),
                reasoning: why,
            })
        }
    }
}

/// Compact quotients of hyperbolic space, `Ric = −ρ g` with `ρ > 0`: the
/// solution set is `X = 0, A = −ρ` for every `m`.
pub fn space_form_verdict(rho: f64, m: f64) -> Result<ProductVerdict, ProductError> {
    check(&[rho], m)?;
    if !(rho > 0.0) {
        return Err(ProductError::InvalidFactor(format!("ρ must be positive (Ric = −ρg), got {rho}")));
    }
    let mut why = vec![format!("Ric = -{rho} g, m = {m}: the equation reads ½ L_X g − (1/m) X♭⊗X♭ = (A + ρ) g")];
    why.push("A + ρ = 0: riccati-zero (λ=0) forces X = 0".into());
    why.push("(A + ρ) m > 0: riccati-blow-up (λm>0)".into());
    why.push("(A + ρ) m < 0: compact-constant-norm forces dimension 1, but the space has dimension 3".into());
    Ok(ProductVerdict::trivial(-rho, why))
}

/// The same analysis at a fixed `A`.
pub fn space_form_verdict_at(rho: f64, m: f64, a: f64) -> Result<ProductVerdict, ProductError> {
    check(&[rho, a], m)?;
    if !(rho > 0.0) {
        return Err(ProductError::InvalidFactor(format!("ρ must be positive (Ric = −ρg), got {rho}")));
    }
    let lambda = a + rho;
    let mut why = vec![format!("Ric = -{rho} g, m = {m}, A = {a}: ½ L_X g − (1/m) X♭⊗X♭ = λ g with λ = A + ρ = {lambda}")];
    if lambda == 0.0 {
        why.push("riccati-zero (λ=0): φ ≡ 0 along every geodesic, so X = 0".into());
        return Ok(ProductVerdict::trivial(a, why));
    }
    if lambda * m > 0.0 {
        why.push(format!("riccati-blow-up (λm>0): λm = {} > 0", lambda * m));
        return Ok(ProductVerdict::none(why));
    }
    let d = compact_constant_norm_dichotomy(3, lambda, m, true)?;
    why.extend(d.reasoning);
    Ok(ProductVerdict::none(why))
}

/// `X = c ∂θ` on the unit-speed circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleSolution {
    pub coefficient: f64,
    /// `|ric_X^m − λ g|`; on `S¹`, `Ric = 0` and `L_X g = 0`.
    pub residual: f64,
    /// `div X − λ(n − 1)` with `n = 1`.
    pub divergence_gap: f64,
}

pub fn circle_solution(lambda: f64, m: f64) -> Result<CircleSolution, ProductError> {
    check(&[lambda], m)?;
    if lambda * m > 0.0 {
        return Err(ProductError::NoSolution(format!("λm = {} > 0", lambda * m)));
    }
    let c = (-lambda * m).sqrt();
    let residual = (-c * c / m - lambda).abs();
    // constant coefficient, so div X = 0
    let (n, div_x) = (1.0, 0.0);
    let divergence_gap = (div_x - lambda * (n - 1.0)).abs();
    Ok(CircleSolution { coefficient: c, residual, divergence_gap })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyVerdict {
    pub verdict: Verdict,
    /// `"S1"` when the space is forced to be a circle.
    pub space: Option<String>,
    pub reasoning: Vec<String>,
}

/// A compact `n`-manifold with `½ L_X g − (1/m) X♭⊗X♭ = λ g`.
pub fn compact_constant_norm_dichotomy(n: usize, lambda: f64, m: f64, x_nonzero: bool) -> Result<DichotomyVerdict, ProductError> {
    check(&[lambda], m)?;
    if n == 0 {
        return Err(ProductError::InvalidFactor("dimension must be positive".into()));
    }
    let mut why = Vec::new();
    if lambda == 0.0 {
        why.push("riccati-zero (λ=0): X = 0 is forced".into());
        let verdict = if x_nonzero { Verdict::None } else { Verdict::TrivialOnly };
        return Ok(DichotomyVerdict { verdict, space: None, reasoning: why });
    }
    if lambda * m > 0.0 {
        why.push(format!("riccati-blow-up (λm>0): λm = {} > 0", lambda * m));
        return Ok(DichotomyVerdict { verdict: Verdict::None, space: None, reasoning: why });
    }
    why.push(format!("compact-constant-norm: |X|² is 0 or −λm = {}", -lambda * m));
    if !x_nonzero {
        why.push("X = 0 leaves 0 = λ g with λ ≠ 0".into());
        return Ok(DichotomyVerdict { verdict: Verdict::None, space: None, reasoning: why });
    }
    why.push(format!("tracing gives div X = λ(n − 1) = {}, whose integral over a compact space vanishes", lambda * (n as f64 - 1.0)));
    if n == 1 {
        why.push("n = 1: the space is the circle".into());
        Ok(DichotomyVerdict { verdict: Verdict::Exists, space: Some("S1".into()), reasoning: why })
    } else {
        why.push(format!("n = {n} ≠ 1 contradicts λ ≠ 0"));
        Ok(DichotomyVerdict { verdict: Verdict::None, space: None, reasoning: why })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(rho: f64) -> EinsteinFactor {
        EinsteinFactor::sphere(2, rho).unwrap()
    }

    #[test]
    fn sphere_times_line() {
        let line = EinsteinFactor::line();
        let v = product_qe(&s2(1.0), &line, -1.0, false).unwrap();
        assert_eq!(v.verdict, Verdict::Exists);
        assert_eq!(v.a, Some(1.0));
        let f = v.field.unwrap();
        assert_eq!(f.coefficient, 1.0);
        assert_eq!(f.branches.len(), 3);
        assert!(f.block_residual < 1e-12);
        let compact = product_qe(&line, &s2(1.0), -1.0, true).unwrap();
        assert_eq!(compact.field.unwrap().branches.len(), 2);
        let v = product_qe(&s2(1.0), &line, 1.0, false).unwrap();
        assert_eq!(v.verdict, Verdict::None);
        assert!(v.reasoning.iter().any(|r| r.starts_with("riccati-blow-up")));
    }

    #[test]
    fn einstein_products() {
        let m4 = EinsteinFactor::new(3, 4.0, true).unwrap();
        for m in [-2.0, 0.5, 3.0] {
            let v = product_qe(&m4, &m4, m, false).unwrap();
            assert_eq!((v.verdict, v.a), (Verdict::TrivialOnly, Some(4.0)));
        }
        let h = EinsteinFactor::hyperbolic(2, -1.0).unwrap();
        assert_eq!(product_qe(&m4, &h, 1.0, false).unwrap().verdict, Verdict::None);
        let flat = EinsteinFactor::new(2, 0.0, false).unwrap();
        let v = product_qe(&flat, &EinsteinFactor::line(), 1.0, false).unwrap();
        assert_eq!((v.verdict, v.a), (Verdict::TrivialOnly, Some(0.0)));
    }

    #[test]
    fn hyperbolic_line_product_matches_h2xr() {
        // H²(−1) × ℝ with m = 4: X = ±2 ∂r, A = −1
        let h = EinsteinFactor::hyperbolic(2, -1.0).unwrap();
        let v = product_qe(&h, &EinsteinFactor::line(), 4.0, true).unwrap();
        assert_eq!((v.verdict, v.a), (Verdict::Exists, Some(-1.0)));
        assert_eq!(v.field.unwrap().coefficient, 2.0);
    }

    #[test]
    fn hyperbolic_space_forms() {
        let v = space_form_verdict(1.0, 2.0).unwrap();
        assert_eq!((v.verdict, v.a), (Verdict::TrivialOnly, Some(-1.0)));
        assert_eq!(space_form_verdict_at(1.0, 2.0, -1.0).unwrap().verdict, Verdict::TrivialOnly);
        for m in [-2.0, 2.0] {
            assert_eq!(space_form_verdict_at(1.0, m, 0.0).unwrap().verdict, Verdict::None);
        }
        let v = space_form_verdict_at(1.0, -2.0, -2.0).unwrap();
        assert_eq!(v.verdict, Verdict::None);
        assert!(v.reasoning.iter().any(|r| r.starts_with("riccati-blow-up")));
        assert_eq!(space_form_verdict(-1.0, 1.0).unwrap_err(), ProductError::InvalidFactor("ρ must be positive (Ric = −ρg), got -1".into()));
    }

    #[test]
    fn circle() {
        let c = circle_solution(1.0, -1.0).unwrap();
        assert_eq!((c.coefficient, c.residual), (1.0, 0.0));
        assert_eq!(circle_solution(0.0, 3.0).unwrap().coefficient, 0.0);
        assert_eq!(circle_solution(4.0, -1.0).unwrap().coefficient, 2.0);
        assert!(circle_solution(1.0, 1.0).is_err());
        assert_eq!(circle_solution(1.0, 0.0).unwrap_err(), ProductError::ZeroM);
    }

    #[test]
    fn dichotomy() {
        let d = compact_constant_norm_dichotomy(1, 1.0, -1.0, true).unwrap();
        assert_eq!((d.verdict, d.space.as_deref()), (Verdict::Exists, Some("S1")));
        assert_eq!(compact_constant_norm_dichotomy(3, 1.0, -1.0, true).unwrap().verdict, Verdict::None);
        assert_eq!(compact_constant_norm_dichotomy(3, 0.0, -1.0, false).unwrap().verdict, Verdict::TrivialOnly);
    }

    #[test]
    fn factor_validation() {
        assert!(EinsteinFactor::new(1, 1.0, false).is_err());
        assert!(EinsteinFactor::new(0, 0.0, false).is_err());
        assert!(EinsteinFactor::new(1, 0.0, false).unwrap().is_line);
        assert!(EinsteinFactor::sphere(2, -1.0).is_err());
    }
}
