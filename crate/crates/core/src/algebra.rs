//! Three-dimensional Lie algebras in an orthonormal frame.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::{Ring, Sign, STRUCTURAL_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("sign pattern {pattern} of {lambda:?} does not match {group} (expected {expected})")]
    InvalidSignPattern { group: GroupTag, lambda: [f64; 3], pattern: String, expected: String },
    #[error("bracket coefficients must be finite, got {0:?}")]
    NonFinite([f64; 3]),
    #[error("field coefficients must be finite, got {0:?}")]
    NonFiniteField([f64; 3]),
    #[error("unknown group tag {0:?}")]
    UnknownGroup(String),
    #[error("structure constants violate antisymmetry by {0:e}")]
    Antisymmetry(f64),
    #[error("structure constants violate the Jacobi identity by {0:e}")]
    Jacobi(f64),
}

/// The six unimodular simply connected three-dimensional Lie groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    Nil,
    Sl2r,
    E11,
    E2,
    R3,
    Su2,
}

impl GroupTag {
    pub const ALL: [GroupTag; 6] = [GroupTag::Nil, GroupTag::Sl2r, GroupTag::E11, GroupTag::E2, GroupTag::R3, GroupTag::Su2];

    /// Canonical signs of (λ₁*, λ₂*, λ₃*).
    pub fn pattern(self) -> [Sign; 3] {
        use Sign::*;
        match self {
            GroupTag::Nil => [Positive, Zero, Zero],
            GroupTag::Sl2r => [Positive, Positive, Negative],
            GroupTag::E11 => [Positive, Negative, Zero],
            GroupTag::E2 => [Positive, Positive, Zero],
            GroupTag::R3 => [Zero, Zero, Zero],
            GroupTag::Su2 => [Positive, Positive, Positive],
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            GroupTag::Nil => "nil",
            GroupTag::Sl2r => "sl2r",
            GroupTag::E11 => "e11",
            GroupTag::E2 => "e2",
            GroupTag::R3 => "r3",
            GroupTag::Su2 => "su2",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            GroupTag::Nil => "Nil",
            GroupTag::Sl2r => "SL2R~",
            GroupTag::E11 => "E(1,1)",
            GroupTag::E2 => "E(2)",
            GroupTag::R3 => "R3",
            GroupTag::Su2 => "SU(2)",
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for GroupTag {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nil" => Ok(GroupTag::Nil),
            "sl2r" | "sl2r~" | "sl2" => Ok(GroupTag::Sl2r),
            "e11" | "e(1,1)" => Ok(GroupTag::E11),
            "e2" | "e(2)" => Ok(GroupTag::E2),
            "r3" => Ok(GroupTag::R3),
            "su2" | "su(2)" => Ok(GroupTag::Su2),
            _ => Err(AlgebraError::UnknownGroup(s.to_string())),
        }
    }
}

fn pattern_string(p: &[Sign; 3]) -> String {
    format!("({},{},{})", p[0], p[1], p[2])
}

/// Coefficients `c[k][i][j]` with `[e_i, e_j] = Σ_k c[k][i][j] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<T = f64> {
    c: [[[T; 3]; 3]; 3],
}

impl<T: Ring> StructureConstants<T> {
    pub fn zero() -> Self {
        Self { c: std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))) }
    }

    /// Builds constants from brackets `[e_i, e_j] = coef · e_k` given as
    /// `(i, j, k, coef)`; the antisymmetric partner is filled in.
    pub fn from_brackets(brackets: &[(usize, usize, usize, T)]) -> Self {
        let mut sc = Self::zero();
        for (i, j, k, coef) in brackets {
            sc.c[*k][*i][*j] = sc.c[*k][*i][*j].clone() + coef.clone();
            sc.c[*k][*j][*i] = sc.c[*k][*j][*i].clone() - coef.clone();
        }
        sc
    }

    /// Milnor presentation `[e₂,e₃]=λ₁e₁, [e₃,e₁]=λ₂e₂, [e₁,e₂]=λ₃e₃`.
    pub fn milnor(lambda: [T; 3]) -> Self {
        let [l1, l2, l3] = lambda;
        Self::from_brackets(&[(1, 2, 0, l1), (2, 0, 1, l2), (0, 1, 2, l3)])
    }

    /// The solvable algebra `[e₁,e₂] = κ e₂` with a central `e₃`.
    pub fn h2xr(kappa: T) -> Self {
        Self::from_brackets(&[(0, 1, 1, kappa)])
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &T {
        &self.c[k][i][j]
    }

    /// `g([e_a, e_b], e_d)` in the orthonormal frame.
    pub fn c_low(&self, a: usize, b: usize, d: usize) -> &T {
        &self.c[d][a][b]
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> StructureConstants<U> {
        StructureConstants {
            c: std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| f(&self.c[k][i][j])))),
        }
    }

    pub fn bracket(&self, u: &[T; 3], v: &[T; 3]) -> [T; 3] {
        std::array::from_fn(|k| {
            let mut s = T::zero();
            for i in 0..3 {
                for j in 0..3 {
                    s = s + u[i].clone() * v[j].clone() * self.c[k][i][j].clone();
                }
            }
            s
        })
    }

    /// Reads back (λ₁*, λ₂*, λ₃*) when the brackets have Milnor form.
    pub fn milnor_lambda(&self, tol: f64) -> Option<[T; 3]> {
        let lambda = [self.c[0][1][2].clone(), self.c[1][2][0].clone(), self.c[2][0][1].clone()];
        let rebuilt = Self::milnor(lambda.clone());
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    if !(self.c[k][i][j].clone() - rebuilt.c[k][i][j].clone()).is_negligible(tol) {
                        return None;
                    }
                }
            }
        }
        Some(lambda)
    }

    /// Entries of `c[k][i][j] + c[k][j][i]`.
    pub fn antisymmetry_defects(&self) -> Vec<T> {
        let mut out = Vec::new();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out.push(self.c[k][i][j].clone() + self.c[k][j][i].clone());
                }
            }
        }
        out
    }

    /// Components of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_defects(&self) -> Vec<T> {
        let basis = |i: usize| -> [T; 3] { std::array::from_fn(|a| if a == i { T::one() } else { T::zero() }) };
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let a = self.bracket(&self.bracket(&basis(i), &basis(j)), &basis(k));
                    let b = self.bracket(&self.bracket(&basis(j), &basis(k)), &basis(i));
                    let c = self.bracket(&self.bracket(&basis(k), &basis(i)), &basis(j));
                    for l in 0..3 {
                        out.push(a[l].clone() + b[l].clone() + c[l].clone());
                    }
                }
            }
        }
        out
    }

    pub fn trace_ad_basis(&self, k: usize) -> T {
        (0..3).fold(T::zero(), |acc, i| acc + self.c[i][k][i].clone())
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (0..3).all(|k| self.trace_ad_basis(k).is_negligible(tol))
    }
}

impl StructureConstants<f64> {
    pub fn h2xr_unit() -> Self {
        Self::h2xr(1.0)
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let anti = self.antisymmetry_defects().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if anti >= STRUCTURAL_TOL {
            return Err(AlgebraError::Antisymmetry(anti));
        }
        let jac = self.jacobi_defects().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if jac >= STRUCTURAL_TOL {
            return Err(AlgebraError::Jacobi(jac));
        }
        Ok(())
    }
}

/// Matrix of `ad_X` with `M[j][i]` the `e_j`-coefficient of `[X, e_i]`.
pub fn ad_matrix<T: Ring>(sc: &StructureConstants<T>, x: &[T; 3]) -> [[T; 3]; 3] {
    std::array::from_fn(|j| {
        std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, k| acc + x[k].clone() * sc.c[j][k][i].clone()))
    })
}

pub fn trace3<T: Ring>(m: &[[T; 3]; 3]) -> T {
    m[0][0].clone() + m[1][1].clone() + m[2][2].clone()
}

/// A left-invariant vector field `X = Σ aᵢ eᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeftInvariantField {
    pub a: [f64; 3],
}

impl LeftInvariantField {
    pub fn new(a: [f64; 3]) -> Result<Self, AlgebraError> {
        if a.iter().all(|x| x.is_finite()) {
            Ok(Self { a })
        } else {
            Err(AlgebraError::NonFiniteField(a))
        }
    }

    pub fn zero() -> Self {
        Self { a: [0.0; 3] }
    }

    pub fn axis(k: usize, coef: f64) -> Self {
        let mut a = [0.0; 3];
        a[k] = coef;
        Self { a }
    }

    pub fn norm_squared(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }
}

/// How an arbitrary λ-triple was brought to the canonical sign pattern:
/// canonical `λ'_i = ε λ_{perm[i]}` with `ε = -1` iff `negated`. Both moves
/// are orthonormal frame changes (an axis flip negates every λ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canonicalization {
    pub permutation: [usize; 3],
    pub negated: bool,
}

impl Canonicalization {
    pub fn identity() -> Self {
        Self { permutation: [0, 1, 2], negated: false }
    }

    fn is_odd(&self) -> bool {
        let p = self.permutation;
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        inversions % 2 == 1
    }

    /// Signs `s_i` with new frame `e'_i = s_i e_{perm[i]}`.
    pub fn axis_signs(&self) -> [f64; 3] {
        if self.is_odd() != self.negated {
            [1.0, 1.0, -1.0]
        } else {
            [1.0, 1.0, 1.0]
        }
    }

    /// Maps coefficients of a field in the canonical frame back to the input frame.
    pub fn field_to_input(&self, canonical: &[f64; 3]) -> [f64; 3] {
        let s = self.axis_signs();
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[self.permutation[i]] = s[i] * canonical[i];
        }
        out
    }

    pub fn apply(&self, lambda: &[f64; 3]) -> [f64; 3] {
        let e = if self.negated { -1.0 } else { 1.0 };
        std::array::from_fn(|i| e * lambda[self.permutation[i]])
    }
}

/// Milnor frame data; the canonical sign pattern is enforced on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilnorFrame {
    pub group: GroupTag,
    pub lambda_star: [f64; 3],
}

impl MilnorFrame {
    pub fn new(group: GroupTag, lambda_star: [f64; 3]) -> Result<Self, AlgebraError> {
        if !lambda_star.iter().all(|x| x.is_finite()) {
            return Err(AlgebraError::NonFinite(lambda_star));
        }
        let signs = lambda_star.map(Sign::of_f64);
        if signs != group.pattern() {
            return Err(AlgebraError::InvalidSignPattern {
                group,
                lambda: lambda_star,
                pattern: pattern_string(&signs),
                expected: pattern_string(&group.pattern()),
            });
        }
        Ok(Self { group, lambda_star })
    }

    /// Accepts any ordering and orientation, returning the canonical frame
    /// together with the frame change used.
    pub fn canonicalize(lambda_star: [f64; 3]) -> Result<(Self, Canonicalization), AlgebraError> {
        if !lambda_star.iter().all(|x| x.is_finite()) {
            return Err(AlgebraError::NonFinite(lambda_star));
        }
        let (group, canon) = classify_group_from_signs(&lambda_star);
        let frame = Self::new(group, canon.apply(&lambda_star))?;
        Ok((frame, canon))
    }

    /// Parses `{"group": "<tag>", "lambda_star": [x, y, z]}`.
    pub fn from_json(text: &str) -> Result<Self, FrameJsonError> {
        let frame: MilnorFrame = serde_json::from_str(text)?;
        Ok(Self::new(frame.group, frame.lambda_star)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frames always serialize")
    }

    pub fn structure(&self) -> StructureConstants<f64> {
        milnor_to_structure(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameJsonError {
    #[error("malformed frame JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn milnor_to_structure(frame: &MilnorFrame) -> StructureConstants<f64> {
    StructureConstants::milnor(frame.lambda_star)
}

/// Identifies the group from the signs of λ*. Every sign multiset occurs in
/// the classification (up to an overall flip), so this never fails.
pub fn classify_group_from_signs(lambda_star: &[f64; 3]) -> (GroupTag, Canonicalization) {
    let signs = lambda_star.map(Sign::of_f64);
    let positives = signs.iter().filter(|&&s| s == Sign::Positive).count();
    let negatives = signs.iter().filter(|&&s| s == Sign::Negative).count();
    let negated = negatives > positives;
    let oriented: [Sign; 3] = if negated { signs.map(Sign::flip) } else { signs };
    let (pos, neg) = if negated { (negatives, positives) } else { (positives, negatives) };
    let group = match (pos, neg) {
        (0, 0) => GroupTag::R3,
        (1, 0) => GroupTag::Nil,
        (2, 0) => GroupTag::E2,
        (3, 0) => GroupTag::Su2,
        (1, 1) => GroupTag::E11,
        (2, 1) => GroupTag::Sl2r,
        _ => unreachable!("positives always outnumber negatives after orienting"),
    };
    let target = group.pattern();
    // stable assignment: for each canonical slot take the first unused axis with the wanted sign
    let mut used = [false; 3];
    let mut permutation = [0usize; 3];
    for (slot, want) in target.iter().enumerate() {
        let axis = (0..3).find(|&a| !used[a] && oriented[a] == *want).expect("sign multiset matches");
        used[axis] = true;
        permutation[slot] = axis;
    }
    (group, Canonicalization { permutation, negated })
}
