//! Levi-Civita connection, Riemann and Ricci curvature of left-invariant
//! metrics from structure constants, plus the hyperbolic-plane chart fixture.

use serde::Serialize;

use crate::algebra::{GroupTag, StructureConstants};
use crate::scalar::{Ring, Sign};
use crate::tensor::SymTensor3;

/// Relative threshold for classifying principal Ricci curvatures as zero.
pub const SIGNATURE_REL_TOL: f64 = 1e-10;
/// Absolute floor for the same classification.
pub const SIGNATURE_ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurvatureError {
    #[error("Ricci tensor is not diagonal in this frame (off-diagonal {off:e} above threshold {threshold:e})")]
    NotDiagonal { off: f64, threshold: f64 },
}

/// `gamma[i][j][k] = g(∇_{e_i} e_j, e_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoefficients<T = f64> {
    pub gamma: [[[T; 3]; 3]; 3],
}

type Riemann<T> = [[[[T; 3]; 3]; 3]; 3];

pub fn levi_civita<T: Ring>(sc: &StructureConstants<T>) -> ConnectionCoefficients<T> {
    let half = T::half();
    let gamma = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let s = sc.c_low(i, j, k).clone() - sc.c_low(j, k, i).clone() + sc.c_low(k, i, j).clone();
                half.clone() * s
            })
        })
    });
    ConnectionCoefficients { gamma }
}

impl<T: Ring> ConnectionCoefficients<T> {
    /// `gamma[i][j][k] + gamma[i][k][j]`, zero for a metric connection.
    pub fn compatibility_defects(&self) -> Vec<T> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.push(self.gamma[i][j][k].clone() + self.gamma[i][k][j].clone());
                }
            }
        }
        out
    }

    /// `∇_{e_i}e_j − ∇_{e_j}e_i − [e_i,e_j]`, zero for a torsion-free connection.
    pub fn torsion_defects(&self, sc: &StructureConstants<T>) -> Vec<T> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.push(self.gamma[i][j][k].clone() - self.gamma[j][i][k].clone() - sc.get(k, i, j).clone());
                }
            }
        }
        out
    }

    /// `riemann[a][b][c][l]`: the `e_l`-component of `R(e_a, e_b) e_c`.
    pub fn riemann(&self, sc: &StructureConstants<T>) -> Riemann<T> {
        let g = &self.gamma;
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                std::array::from_fn(|c| {
                    std::array::from_fn(|l| {
                        let mut s = T::zero();
                        for k in 0..3 {
                            s = s + g[b][c][k].clone() * g[a][k][l].clone();
                            s = s - g[a][c][k].clone() * g[b][k][l].clone();
                            s = s - sc.get(k, a, b).clone() * g[k][c][l].clone();
                        }
                        s
                    })
                })
            })
        })
    }
}

/// `Ric(e_i, e_j) = Σ_k g(R(e_k, e_i) e_j, e_k)`.
pub fn ricci_tensor<T: Ring>(sc: &StructureConstants<T>) -> SymTensor3<T> {
    let conn = levi_civita(sc);
    let r = conn.riemann(sc);
    SymTensor3::from_fn(|i, j| (0..3).fold(T::zero(), |acc, k| acc + r[k][i][j][k].clone()))
}

/// Sectional curvature `g(R(e_i, e_j) e_j, e_i)` of the plane spanned by `e_i, e_j`.
pub fn sectional_curvature<T: Ring>(sc: &StructureConstants<T>, i: usize, j: usize) -> T {
    let r = levi_civita(sc).riemann(sc);
    r[i][j][j][i].clone()
}

/// Principal Ricci values `r(eᵢ) = 2 μⱼ μₖ`, `μᵢ = ½(λ₁*+λ₂*+λ₃*) − λᵢ*`.
pub fn milnor_ricci_closed_form(lambda: &[f64; 3]) -> [f64; 3] {
    let s = 0.5 * (lambda[0] + lambda[1] + lambda[2]);
    let mu = lambda.map(|l| s - l);
    [2.0 * mu[1] * mu[2], 2.0 * mu[0] * mu[2], 2.0 * mu[0] * mu[1]]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RicciSignature {
    pub signs: [Sign; 3],
    pub threshold: f64,
}

impl RicciSignature {
    /// Signs sorted as a multiset (positive first), matching how the
    /// classification lists rows.
    pub fn multiset(&self) -> [Sign; 3] {
        let mut s = self.signs;
        s.sort_by(|a, b| b.cmp(a));
        s
    }

    pub fn is_flat(&self) -> bool {
        self.signs == [Sign::Zero; 3]
    }
}

impl std::fmt::Display for RicciSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.signs[0], self.signs[1], self.signs[2])
    }
}

pub fn signature_threshold(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (SIGNATURE_REL_TOL * max).max(SIGNATURE_ABS_FLOOR)
}

pub fn ricci_signature(ric: &SymTensor3<f64>) -> Result<RicciSignature, CurvatureError> {
    let threshold = signature_threshold(ric.as_array());
    let off = ric.off_diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if off > threshold {
        return Err(CurvatureError::NotDiagonal { off, threshold });
    }
    let signs = ric.diagonal().map(|r| if r.abs() <= threshold { Sign::Zero } else { Sign::of_f64(r) });
    Ok(RicciSignature { signs, threshold })
}

/// Ricci signature rows listed for each unimodular group, as sorted multisets.
///
/// The abelian row is listed as flat; the printed (0,0,−) for it contradicts
/// Ric ≡ 0 on the abelian group.
pub fn listed_signatures(group: GroupTag) -> Vec<[Sign; 3]> {
    use Sign::*;
    let mixed = [Positive, Negative, Negative];
    match group {
        GroupTag::Nil => vec![mixed],
        GroupTag::E11 | GroupTag::Sl2r => vec![mixed, [Zero, Zero, Negative]],
        GroupTag::E2 => vec![mixed],
        GroupTag::R3 => vec![[Zero, Zero, Zero]],
        GroupTag::Su2 => vec![[Positive, Positive, Positive], [Positive, Zero, Zero], mixed],
    }
}

/// Whether a computed signature is accounted for by the listed rows. Flat
/// E(2) metrics (λ₁ = λ₂) are isometric to flat space and are checked
/// against the abelian row instead.
pub fn signature_is_listed(group: GroupTag, sig: &RicciSignature) -> bool {
    let routed = if group == GroupTag::E2 && sig.is_flat() { GroupTag::R3 } else { group };
    listed_signatures(routed).contains(&sig.multiset())
}

/// Chart fixture for `g = dr² + e^{2r} dx²` on the hyperbolic plane, symbolic in `r`.
///
/// Every quantity is `coefficient · e^{k r}`; coordinates are ordered `(r, x)`.
pub mod h2_chart {
    /// `c · e^{k r}`.
    #[derive(Clone, Copy, Debug, PartialEq)]
    pub struct ExpTerm {
        pub coef: f64,
        pub k: i32,
    }

    impl ExpTerm {
        pub const ZERO: ExpTerm = ExpTerm { coef: 0.0, k: 0 };

        pub fn eval(&self, r: f64) -> f64 {
            self.coef * (self.k as f64 * r).exp()
        }

        pub fn is_zero(&self) -> bool {
            self.coef == 0.0
        }
    }

    pub const R: usize = 0;
    pub const X: usize = 1;

    /// Metric components: `g_rr = 1`, `g_xx = e^{2r}`.
    pub fn metric(i: usize, j: usize) -> ExpTerm {
        match (i, j) {
            (R, R) => ExpTerm { coef: 1.0, k: 0 },
            (X, X) => ExpTerm { coef: 1.0, k: 2 },
            _ => ExpTerm::ZERO,
        }
    }

    /// Christoffel symbols `Γ^k_{ij}`, from `Γ^k_{ij} = ½ g^{kk}(∂_i g_{jk} + ∂_j g_{ik} − ∂_k g_{ij})`
    /// for the diagonal metric whose only non-constant entry is `g_xx(r)`.
    pub fn christoffel(k: usize, i: usize, j: usize) -> ExpTerm {
        // ∂_r g_xx = 2 e^{2r}; every other derivative vanishes.
        let d = |a: usize, b: usize, c: usize| -> ExpTerm {
            if a == R && b == X && c == X {
                ExpTerm { coef: 2.0, k: 2 }
            } else {
                ExpTerm::ZERO
            }
        };
        let (t1, t2, t3) = (d(i, j, k), d(j, i, k), d(k, i, j));
        let mut coef = 0.0;
        let mut exp = 0;
        for (t, s) in [(t1, 1.0), (t2, 1.0), (t3, -1.0)] {
            if !t.is_zero() {
                coef += s * t.coef;
                exp = t.k;
            }
        }
        if coef == 0.0 {
            return ExpTerm::ZERO;
        }
        // g^{kk}: 1 for r, e^{-2r} for x
        let inv_k = if k == X { -2 } else { 0 };
        ExpTerm { coef: 0.5 * coef, k: exp + inv_k }
    }

    /// `∇_{∂_i} ∂_j` as components along `(∂r, ∂x)`.
    pub fn covariant(i: usize, j: usize) -> [ExpTerm; 2] {
        [christoffel(R, i, j), christoffel(X, i, j)]
    }

    /// Ricci tensor `Ric(∂_i, ∂_j)`, from the constant sectional curvature −1
    /// of this metric: `Ric = −g`.
    pub fn ricci(i: usize, j: usize) -> ExpTerm {
        let g = metric(i, j);
        ExpTerm { coef: -g.coef, k: g.k }
    }

    /// Gaussian curvature from the chart formula `K = −(√G)'' / √G` with
    /// `√G = e^{r}`, evaluated symbolically.
    pub fn gaussian_curvature() -> f64 {
        // (e^{r})'' / e^{r} = 1
        -1.0
    }

    /// Components of `ric_X^m` for `X = c ∂r` at radius `r`: `Ric + ½ L_X g − (1/m) X♭⊗X♭`.
    ///
    /// `L_X g(∂_i,∂_j) = X(g_ij) + g([∂_i, X], ∂_j) + g(∂_i, [∂_j, X])`; with
    /// constant `c` only `X(g_xx) = 2c e^{2r}` survives.
    pub fn bakry_emery(c: f64, m: f64, r: f64) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let ric = ricci(i, j).eval(r);
                let lie = if i == X && j == X { 2.0 * c * (2.0 * r).exp() } else { 0.0 };
                let xi = if i == R { c } else { 0.0 };
                let xj = if j == R { c } else { 0.0 };
                out[i][j] = ric + 0.5 * lie - xi * xj / m;
            }
        }
        out
    }
}
