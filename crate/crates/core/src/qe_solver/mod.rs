//! Solving `ric_X^m = A g` for left-invariant fields on the Lie-group
//! geometries, exactly by case split and numerically by least squares.

mod cells;
mod fixed;
mod oracle;
mod symbolic;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use cells::{
    classify_cell, zero_ricci_branch, CaseOutcome, CaseRecord, CellVerdict, Certificate, DrawCheck, QeSolutionFamily,
    SignatureBranchReport, Witness,
};
pub use fixed::{solve_fixed_metric, FixedMetricSolutions, QeSolution, SOLUTION_TOL};
pub use oracle::{numeric_oracle, OracleCluster, OracleResult, CLUSTER_TOL};
pub use symbolic::{killing_axes, killing_reduction, KillingAxis};

use crate::algebra::{AlgebraError, GroupTag, MilnorFrame, StructureConstants};
use crate::exact::CaseSplitError;
use crate::scalar::{Rational, Real, Sign};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("m must be nonzero")]
    ZeroM,
    #[error("m must be finite")]
    NonFiniteM,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    CaseSplit(#[from] CaseSplitError),
    #[error("{0} is not a Lie-group geometry handled by the solver")]
    NotLieGroup(Geometry),
    #[error("sign cell needs a nonzero sign for m")]
    ZeroSignM,
    #[error("H2xR needs ρ > 0, got {0}")]
    BadRho(f64),
    #[error("reduction to axis fields failed: {0}")]
    Reduction(String),
    #[error("unknown geometry {0:?}")]
    UnknownGeometry(String),
}

/// The nine model geometries, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Geometry {
    R3,
    Su2,
    Sl2r,
    Nil,
    E11,
    E2,
    H2xR,
    S2xR,
    H3,
}

impl Geometry {
    pub const ALL: [Geometry; 9] = [
        Geometry::R3,
        Geometry::Su2,
        Geometry::Sl2r,
        Geometry::Nil,
        Geometry::E11,
        Geometry::E2,
        Geometry::H2xR,
        Geometry::S2xR,
        Geometry::H3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Geometry::R3 => "R3",
            Geometry::Su2 => "SU(2)",
            Geometry::Sl2r => "SL2R~",
            Geometry::Nil => "Nil",
            Geometry::E11 => "E(1,1)",
            Geometry::E2 => "E(2)",
            Geometry::H2xR => "H2xR",
            Geometry::S2xR => "S2xR",
            Geometry::H3 => "H3",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Geometry::R3 => "r3",
            Geometry::Su2 => "su2",
            Geometry::Sl2r => "sl2r",
            Geometry::Nil => "nil",
            Geometry::E11 => "e11",
            Geometry::E2 => "e2",
            Geometry::H2xR => "h2xr",
            Geometry::S2xR => "s2xr",
            Geometry::H3 => "h3",
        }
    }

    pub fn lie(self) -> Option<LieGeometry> {
        Some(match self {
            Geometry::R3 => LieGeometry::Unimodular(GroupTag::R3),
            Geometry::Su2 => LieGeometry::Unimodular(GroupTag::Su2),
            Geometry::Sl2r => LieGeometry::Unimodular(GroupTag::Sl2r),
            Geometry::Nil => LieGeometry::Unimodular(GroupTag::Nil),
            Geometry::E11 => LieGeometry::Unimodular(GroupTag::E11),
            Geometry::E2 => LieGeometry::Unimodular(GroupTag::E2),
            Geometry::H2xR => LieGeometry::H2xR,
            Geometry::S2xR | Geometry::H3 => return None,
        })
    }

    pub fn from_group(g: GroupTag) -> Self {
        match g {
            GroupTag::Nil => Geometry::Nil,
            GroupTag::Sl2r => Geometry::Sl2r,
            GroupTag::E11 => Geometry::E11,
            GroupTag::E2 => Geometry::E2,
            GroupTag::R3 => Geometry::R3,
            GroupTag::Su2 => Geometry::Su2,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        if let Some(g) = Geometry::ALL.iter().find(|g| g.slug() == lower || g.name().to_ascii_lowercase() == lower) {
            return Ok(*g);
        }
        match lower.as_str() {
            "h2r" | "h2xr" | "h2×r" => Ok(Geometry::H2xR),
            "s2r" | "s2×r" => Ok(Geometry::S2xR),
            _ => GroupTag::from_str(s).map(Geometry::from_group).map_err(|_| SolverError::UnknownGeometry(s.to_string())),
        }
    }
}

/// Lie groups the solver handles: unimodular Milnor presentations and H²×ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LieGeometry {
    Unimodular(GroupTag),
    H2xR,
}

impl LieGeometry {
    pub fn geometry(self) -> Geometry {
        match self {
            LieGeometry::Unimodular(g) => Geometry::from_group(g),
            LieGeometry::H2xR => Geometry::H2xR,
        }
    }
}

/// A sign cell `(sign m, sign A)`; `m` is never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignCell {
    pub m: Sign,
    pub a: Sign,
}

impl SignCell {
    pub const ALL: [SignCell; 6] = [
        SignCell { m: Sign::Positive, a: Sign::Positive },
        SignCell { m: Sign::Positive, a: Sign::Zero },
        SignCell { m: Sign::Positive, a: Sign::Negative },
        SignCell { m: Sign::Negative, a: Sign::Positive },
        SignCell { m: Sign::Negative, a: Sign::Zero },
        SignCell { m: Sign::Negative, a: Sign::Negative },
    ];

    pub fn label(&self) -> String {
        let rel = |s: Sign| match s {
            Sign::Positive => ">0",
            Sign::Zero => "=0",
            Sign::Negative => "<0",
        };
        format!("m{},A{}", rel(self.m), rel(self.a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    None,
    TrivialOnly,
    Exists,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::None => "None",
            Verdict::TrivialOnly => "Trivial",
            Verdict::Exists => "Exists",
        })
    }
}

/// A concrete left-invariant metric: a Milnor frame or the H²×ℝ frame
/// `[e₁,e₂] = κ e₂` (curvature −κ² on the hyperbolic factor).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricFrame {
    Milnor(MilnorFrame),
    H2xR { kappa: f64 },
}

impl MetricFrame {
    pub fn milnor(group: GroupTag, lambda_star: [f64; 3]) -> Result<Self, SolverError> {
        Ok(MetricFrame::Milnor(MilnorFrame::new(group, lambda_star)?))
    }

    /// H²(−ρ) × ℝ, i.e. Ric = diag(−ρ, −ρ, 0).
    pub fn h2xr_from_rho(rho: f64) -> Result<Self, SolverError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(SolverError::BadRho(rho));
        }
        Ok(MetricFrame::H2xR { kappa: rho.sqrt() })
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            MetricFrame::Milnor(f) => Geometry::from_group(f.group),
            MetricFrame::H2xR { .. } => Geometry::H2xR,
        }
    }

    pub fn structure(&self) -> StructureConstants<f64> {
        match self {
            MetricFrame::Milnor(f) => f.structure(),
            MetricFrame::H2xR { kappa } => StructureConstants::h2xr(*kappa),
        }
    }

    /// The same constants read exactly (every finite float is rational).
    pub fn exact_structure(&self) -> StructureConstants<Rational> {
        self.structure().map(|x| <Rational as Real>::from_f64(*x).expect("frames hold finite values"))
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self, MetricFrame::Milnor(_))
    }

    /// The homothetic metric `c² g`, which divides every bracket coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            MetricFrame::Milnor(f) => MetricFrame::Milnor(MilnorFrame { group: f.group, lambda_star: f.lambda_star.map(|l| l / c) }),
            MetricFrame::H2xR { kappa } => MetricFrame::H2xR { kappa: kappa / c },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            MetricFrame::Milnor(f) => serde_json::json!({ "group": f.group.slug(), "lambda_star": f.lambda_star }),
            MetricFrame::H2xR { kappa } => serde_json::json!({ "group": "h2xr", "kappa": kappa }),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MetricFrame::Milnor(f) => format!("{} λ*=({}, {}, {})", f.group, f.lambda_star[0], f.lambda_star[1], f.lambda_star[2]),
            MetricFrame::H2xR { kappa } => format!("H2xR κ={kappa}"),
        }
    }
}

pub(crate) fn check_m(m: f64) -> Result<(), SolverError> {
    if m == 0.0 {
        return Err(SolverError::ZeroM);
    }
    if !m.is_finite() {
        return Err(SolverError::NonFiniteM);
    }
    Ok(())
}
