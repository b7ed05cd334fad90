//! Independent numeric check: multi-start Levenberg–Marquardt on the six
//! equations `ric_X^m − A g = 0` in `(a₁, a₂, a₃, A)`.

use nalgebra::{Matrix4, SMatrix, Vector4, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fixed::{QeSolution, SOLUTION_TOL};
use super::{check_m, MetricFrame, SolverError};
use crate::bakry_emery::{is_killing, lie_derivative_metric};
use crate::curvature::ricci_tensor;
use crate::tensor::SymTensor3;

/// Distance below which converged points are merged.
pub const CLUSTER_TOL: f64 = 1e-6;

const MAX_ITERS: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCluster {
    #[serde(rename = "X")]
    pub x: [f64; 3],
    #[serde(rename = "A")]
    pub a: f64,
    pub residual: f64,
    pub killing: bool,
    /// Number of starts that converged here.
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub clusters: Vec<OracleCluster>,
    /// Starts that did not reach residual `1e-10`.
    pub discarded: usize,
}

impl OracleResult {
    /// Whether a solution is among the clusters, up to [`CLUSTER_TOL`].
    pub fn contains(&self, x: &[f64; 3], a: f64) -> bool {
        self.clusters.iter().any(|c| distance(&c.x, c.a, x, a) < CLUSTER_TOL)
    }

    /// Pairs the clusters with exact solutions. Returns the exact solutions
    /// the oracle missed and the clusters that match none of them.
    pub fn compare<'a>(&'a self, exact: &'a [QeSolution]) -> (Vec<&'a QeSolution>, Vec<&'a OracleCluster>) {
        let missed = exact.iter().filter(|s| !self.contains(&s.x, s.a)).collect();
        let extra = self
            .clusters
            .iter()
            .filter(|c| !exact.iter().any(|s| distance(&c.x, c.a, &s.x, s.a) < CLUSTER_TOL))
            .collect();
        (missed, extra)
    }
}

fn distance(x: &[f64; 3], a: f64, y: &[f64; 3], b: f64) -> f64 {
    let scale = 1.0 + a.abs().max(b.abs()).max(x.iter().chain(y).fold(0.0f64, |m, v| m.max(v.abs())));
    (x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>() + (a - b).powi(2)).sqrt() / scale
}

struct Model {
    ric: SymTensor3<f64>,
    lie: [SymTensor3<f64>; 3],
    m: f64,
}

const SLOTS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

impl Model {
    fn residual(&self, p: &Vector4<f64>) -> Vector6<f64> {
        Vector6::from_fn(|r, _| {
            let (i, j) = SLOTS[r];
            let lie: f64 = (0..3).map(|k| p[k] * self.lie[k].get(i, j)).sum();
            let diag = if i == j { p[3] } else { 0.0 };
            self.ric.get(i, j) + 0.5 * lie - p[i] * p[j] / self.m - diag
        })
    }

    fn jacobian(&self, p: &Vector4<f64>) -> SMatrix<f64, 6, 4> {
        SMatrix::from_fn(|r, c| {
            let (i, j) = SLOTS[r];
            if c == 3 {
                return if i == j { -1.0 } else { 0.0 };
            }
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            0.5 * self.lie[c].get(i, j) - (d(i, c) * p[j] + p[i] * d(j, c)) / self.m
        })
    }

    fn solve_from(&self, mut p: Vector4<f64>) -> Option<Vector4<f64>> {
        let mut mu = 1e-3;
        let mut cost = self.residual(&p).norm_squared();
        for _ in 0..MAX_ITERS {
            if cost < 1e-28 {
                break;
            }
            let r = self.residual(&p);
            let j = self.jacobian(&p);
            let jt = j.transpose();
            let jtj = jt * j;
            let g = jt * r;
            if g.norm() < 1e-14 * (1.0 + cost.sqrt()) {
                // stationary but not a zero of the residual
                break;
            }
            let damped = jtj + Matrix4::from_diagonal(&jtj.diagonal().map(|d| mu * (d + 1e-12)));
            let Some(step) = damped.lu().solve(&(-g)) else {
                mu *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = self.residual(&trial).norm_squared();
            if trial_cost < cost {
                p = trial;
                cost = trial_cost;
                mu = (mu * 0.3).max(1e-15);
            } else {
                mu *= 4.0;
                if mu > 1e12 {
                    break;
                }
            }
        }
        (self.residual(&p).amax() < SOLUTION_TOL).then_some(p)
    }
}

/// Runs `n_starts` seeded starts and clusters the converged points.
pub fn numeric_oracle(frame: &MetricFrame, m: f64, n_starts: usize, seed: u64) -> Result<OracleResult, SolverError> {
    check_m(m)?;
    let sc = frame.structure();
    let ric = ricci_tensor(&sc);
    let lie = std::array::from_fn(|k| {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        lie_derivative_metric(&sc, &e)
    });
    let model = Model { ric, lie, m };
    let scale = model.ric.sup_norm().sqrt() + frame_scale(frame);
    let radius = 3.0 * (1.0 + scale) * (1.0 + m.abs()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clusters: Vec<OracleCluster> = Vec::new();
    let mut discarded = 0;
    for _ in 0..n_starts {
        let start = Vector4::from_fn(|i, _| {
            if i < 3 {
                rng.random_range(-radius..radius)
            } else {
                rng.random_range(-radius * radius..radius * radius) / (1.0 + m.abs())
            }
        });
        let Some(p) = model.solve_from(start) else {
            discarded += 1;
            continue;
        };
        let x = [p[0], p[1], p[2]];
        let a = p[3];
        match clusters.iter_mut().find(|c| distance(&c.x, c.a, &x, a) < CLUSTER_TOL) {
            Some(c) => c.hits += 1,
            None => {
                let residual = model.residual(&p).amax();
                clusters.push(OracleCluster { x, a, residual, killing: is_killing(&sc, &x).killing, hits: 1 });
            }
        }
    }
    // snap values that are zero to within the clustering tolerance
    for c in &mut clusters {
        for v in c.x.iter_mut().chain(std::iter::once(&mut c.a)) {
            if v.abs() < CLUSTER_TOL * CLUSTER_TOL {
                *v = 0.0;
            }
        }
    }
    clusters.sort_by(|p, q| {
        p.x.iter().zip(&q.x).fold(std::cmp::Ordering::Equal, |o, (u, v)| o.then(u.total_cmp(v))).then(p.a.total_cmp(&q.a))
    });
    Ok(OracleResult { clusters, discarded })
}

fn frame_scale(frame: &MetricFrame) -> f64 {
    match frame {
        MetricFrame::Milnor(f) => f.lambda_star.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        MetricFrame::H2xR { kappa } => kappa.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::solve_fixed_metric;
    use super::*;
    use crate::algebra::GroupTag;

    fn run(frame: MetricFrame, m: f64) -> OracleResult {
        numeric_oracle(&frame, m, 200, 7).unwrap()
    }

    #[test]
    fn nil_clusters_at_the_closed_form() {
        let r = run(MetricFrame::milnor(GroupTag::Nil, [2.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(r.clusters.len(), 2, "{r:?}");
        assert!(r.contains(&[2.0, 0.0, 0.0], -2.0));
        assert!(r.contains(&[-2.0, 0.0, 0.0], -2.0));
    }

    #[test]
    fn e11_is_empty() {
        for m in [-1.0, 1.0] {
            let r = run(MetricFrame::milnor(GroupTag::E11, [1.0, -1.0, 0.0]).unwrap(), m);
            assert!(r.clusters.is_empty(), "{r:?}");
        }
    }

    #[test]
    fn sl2r_discrepancy_branch_is_found() {
        let r = run(MetricFrame::milnor(GroupTag::Sl2r, [2.0, 2.0, -2.0]).unwrap(), 2.0);
        assert!(r.contains(&[0.0, 0.0, 4.0], -6.0));
        assert!(r.contains(&[0.0, 0.0, -4.0], -6.0));
        assert_eq!(r.clusters.len(), 2);
    }

    #[test]
    fn agrees_with_exact_solver_including_non_killing() {
        let f = MetricFrame::h2xr_from_rho(1.0).unwrap();
        let r = run(f, -1.0);
        let exact = solve_fixed_metric(&f, -1.0).unwrap();
        let (missed, extra) = r.compare(&exact.non_killing);
        assert!(missed.is_empty() && extra.is_empty(), "{r:?}");
        assert!(r.clusters.iter().all(|c| !c.killing));
    }
}
