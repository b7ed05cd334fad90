//! The m-Bakry-Émery Ricci tensor `ric + ½ L_X g − (1/m) X♭⊗X♭` for
//! left-invariant fields, Killing tests, and the trace identity that forces
//! solutions on unimodular groups to be Killing.

use crate::algebra::{ad_matrix, StructureConstants};
use crate::curvature::ricci_tensor;
use crate::scalar::{Field, Ring, STRUCTURAL_TOL};
use crate::tensor::SymTensor3;

/// Threshold for `L_X g = 0`.
pub const KILLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BakryEmeryError {
    #[error("m must be nonzero")]
    ZeroM,
    #[error("supplied Ricci tensor differs from the one computed from the structure constants by {0:e}")]
    InconsistentRicci(f64),
    #[error("hypothesis ½L_Xg − (1/m)X♭⊗X♭ = q fails with residual {0:e}")]
    Precondition(f64),
}

/// `L_X g(e_i, e_j) = Σ_k a_k ( g([e_i,e_k],e_j) + g([e_j,e_k],e_i) )`.
pub fn lie_derivative_metric<T: Ring>(sc: &StructureConstants<T>, x: &[T; 3]) -> SymTensor3<T> {
    SymTensor3::from_fn(|i, j| {
        (0..3).fold(T::zero(), |acc, k| {
            acc + x[k].clone() * (sc.c_low(i, k, j).clone() + sc.c_low(j, k, i).clone())
        })
    })
}

pub fn one_form_square<T: Ring>(x: &[T; 3]) -> SymTensor3<T> {
    SymTensor3::from_fn(|i, j| x[i].clone() * x[j].clone())
}

/// `ric + ½ L − (1/m) X♭⊗X♭` from precomputed ingredients.
pub fn combine<T: Field>(ric: &SymTensor3<T>, lie: &SymTensor3<T>, x: &[T; 3], m: &T) -> SymTensor3<T> {
    let inv_m = T::one() / m.clone();
    ric.add(&lie.scale(&T::half())).sub(&one_form_square(x).scale(&inv_m))
}

/// Validated input for [`bakry_emery_tensor`].
#[derive(Clone, Debug)]
pub struct BakryEmeryInput {
    pub sc: StructureConstants<f64>,
    pub ric: SymTensor3<f64>,
    pub x: [f64; 3],
    pub m: f64,
}

impl BakryEmeryInput {
    pub fn new(sc: StructureConstants<f64>, x: [f64; 3], m: f64) -> Result<Self, BakryEmeryError> {
        if m == 0.0 {
            return Err(BakryEmeryError::ZeroM);
        }
        let ric = ricci_tensor(&sc);
        Ok(Self { sc, ric, x, m })
    }

    /// Uses a caller-supplied Ricci tensor after checking it against the
    /// structure constants.
    pub fn with_ricci(sc: StructureConstants<f64>, ric: SymTensor3<f64>, x: [f64; 3], m: f64) -> Result<Self, BakryEmeryError> {
        if m == 0.0 {
            return Err(BakryEmeryError::ZeroM);
        }
        let gap = ricci_tensor(&sc).sub(&ric).sup_norm();
        if gap > STRUCTURAL_TOL * (1.0 + ric.sup_norm()) {
            return Err(BakryEmeryError::InconsistentRicci(gap));
        }
        Ok(Self { sc, ric, x, m })
    }
}

pub fn bakry_emery_tensor(input: &BakryEmeryInput) -> SymTensor3<f64> {
    combine(&input.ric, &lie_derivative_metric(&input.sc, &input.x), &input.x, &input.m)
}

/// `ric_X^m − A g` and its sup norm.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct QeResidual {
    pub tensor: SymTensor3<f64>,
    pub a: f64,
    pub sup_norm: f64,
}

impl QeResidual {
    pub fn is_solution(&self, tol: f64) -> bool {
        self.sup_norm < tol
    }
}

pub fn qe_residual(input: &BakryEmeryInput, a: f64) -> QeResidual {
    let tensor = bakry_emery_tensor(input).sub(&SymTensor3::identity().scale(&a));
    let sup_norm = tensor.sup_norm();
    QeResidual { tensor, a, sup_norm }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KillingCheck {
    pub killing: bool,
    pub residual: f64,
}

pub fn is_killing(sc: &StructureConstants<f64>, x: &[f64; 3]) -> KillingCheck {
    let residual = lie_derivative_metric(sc, x).sup_norm();
    KillingCheck { killing: residual < KILLING_TOL, residual }
}

/// `max |ad_X + ad_Xᵀ|`, the same test phrased on the adjoint matrix.
pub fn ad_skew_residual(sc: &StructureConstants<f64>, x: &[f64; 3]) -> f64 {
    let m = ad_matrix(sc, x);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((m[i][j] + m[j][i]).abs());
        }
    }
    worst
}

/// `tr(q · ad_X)`.
pub fn trace_q_ad<T: Ring>(q: &SymTensor3<T>, sc: &StructureConstants<T>, x: &[T; 3]) -> T {
    let m = ad_matrix(sc, x);
    let mut s = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            s = s + q.get(i, j).clone() * m[j][i].clone();
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KillingIdentity {
    /// `tr(q · ad_X)`.
    pub trace_q_ad: f64,
    /// `¼ tr((ad_X + ad_Xᵀ)²)`.
    pub quarter_sym_square: f64,
    /// `(|X|²/m) tr(proj_X · ad_X)`; vanishes because `ad_X X = 0`.
    pub projection_term: f64,
    /// `¼ tr((ad_X + ad_Xᵀ)²) − (|X|²/m) tr(proj_X · ad_X)`.
    pub expression: f64,
    /// `tr(q · ad_X) + expression`, zero by the identity.
    pub identity_gap: f64,
}

/// Evaluates both sides of `tr(q·ad_X) = −¼ tr((ad_X+ad_Xᵀ)²) + (|X|²/m) tr(proj_X·ad_X)`
/// for `q = ½ L_X g − (1/m) X♭⊗X♭`, after checking that hypothesis.
pub fn killing_identity_check(q: &SymTensor3<f64>, sc: &StructureConstants<f64>, x: &[f64; 3], m: f64) -> Result<KillingIdentity, BakryEmeryError> {
    if m == 0.0 {
        return Err(BakryEmeryError::ZeroM);
    }
    let lhs = lie_derivative_metric(sc, x).scale(&0.5).sub(&one_form_square(x).scale(&(1.0 / m)));
    let gap = lhs.sub(q).sup_norm();
    if gap > 1e-10 * (1.0 + q.sup_norm()) {
        return Err(BakryEmeryError::Precondition(gap));
    }
    let ad = ad_matrix(sc, x);
    let mut sym = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            sym[i][j] = ad[i][j] + ad[j][i];
        }
    }
    let mut sq = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            sq += sym[i][j] * sym[j][i];
        }
    }
    let norm2: f64 = x.iter().map(|a| a * a).sum();
    // (|X|²/m) tr(proj_X ad_X) = (1/m) Xᵀ ad_X X
    let mut xmx = 0.0;
    for j in 0..3 {
        for i in 0..3 {
            xmx += x[j] * ad[j][i] * x[i];
        }
    }
    let projection_term = if norm2 == 0.0 { 0.0 } else { xmx / m };
    let quarter_sym_square = 0.25 * sq;
    let expression = quarter_sym_square - projection_term;
    let t = trace_q_ad(q, sc, x);
    Ok(KillingIdentity { trace_q_ad: t, quarter_sym_square, projection_term, expression, identity_gap: t + expression })
}
