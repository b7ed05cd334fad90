//! Symmetric bilinear forms on a three-dimensional frame.

use serde::{Deserialize, Serialize};

use crate::scalar::Ring;

/// Index of `(i, j)` in the storage order `[t11, t22, t33, t12, t13, t23]`.
const fn slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

/// Symmetric form stored by its six independent entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymTensor3<T = f64> {
    t: [T; 6],
}

impl<T: Ring> SymTensor3<T> {
    pub fn zero() -> Self {
        Self { t: std::array::from_fn(|_| T::zero()) }
    }

    pub fn identity() -> Self {
        Self::diag([T::one(), T::one(), T::one()])
    }

    pub fn diag(d: [T; 3]) -> Self {
        let [a, b, c] = d;
        Self { t: [a, b, c, T::zero(), T::zero(), T::zero()] }
    }

    pub fn from_array(t: [T; 6]) -> Self {
        Self { t }
    }

    /// Symmetrizes `f` by reading the upper triangle.
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Self { t: [f(0, 0), f(1, 1), f(2, 2), f(0, 1), f(0, 2), f(1, 2)] }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.t[slot(i, j)]
    }

    pub fn as_array(&self) -> &[T; 6] {
        &self.t
    }

    pub fn diagonal(&self) -> [T; 3] {
        [self.t[0].clone(), self.t[1].clone(), self.t[2].clone()]
    }

    pub fn off_diagonal(&self) -> [T; 3] {
        [self.t[3].clone(), self.t[4].clone(), self.t[5].clone()]
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { t: std::array::from_fn(|i| self.t[i].clone() * s.clone()) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { t: std::array::from_fn(|i| self.t[i].clone() + other.t[i].clone()) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { t: std::array::from_fn(|i| self.t[i].clone() - other.t[i].clone()) }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> SymTensor3<U> {
        SymTensor3 { t: std::array::from_fn(|i| f(&self.t[i])) }
    }

    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j).clone()))
    }
}

impl SymTensor3<f64> {
    pub fn sup_norm(&self) -> f64 {
        self.t.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.t.iter().all(|x| x.is_finite())
    }

    pub fn to_nalgebra(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|i, j| *self.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_order_and_symmetry() {
        let t = SymTensor3::from_fn(|i, j| (10 * (i + 1) + (j + 1)) as f64);
        assert_eq!(t.as_array(), &[11.0, 22.0, 33.0, 12.0, 13.0, 23.0]);
        assert_eq!(t.get(2, 1), t.get(1, 2));
        assert_eq!(serde_json::to_string(&t).unwrap(), "[11.0,22.0,33.0,12.0,13.0,23.0]");
        assert_eq!(t.sup_norm(), 33.0);
    }
}
