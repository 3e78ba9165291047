//! Affine hulls of point clouds.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::hull::PointCloud;
use crate::linalg::{dot, norm};

/// `base + span(basis)` with an orthonormal basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineSubspace {
    pub base: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AffineSubspace {
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { base: vec![0.0; dim], basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Dimension of the direction space.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Orthogonal projection of a direction onto the direction space.
    pub fn project_direction(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for b in &self.basis {
            let c = dot(b, v);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// Norm of the component of `v` orthogonal to the direction space.
    pub fn direction_residual(&self, v: &[f64]) -> f64 {
        if self.is_full() {
            return 0.0;
        }
        let p = self.project_direction(v);
        v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Distance from `x` to the subspace.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        self.direction_residual(&d)
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let p = self.project_direction(&d);
        self.base.iter().zip(&p).map(|(a, b)| a + b).collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.residual(x) <= tol
    }

    /// Coordinates of a direction in the basis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// Direction with the given basis coordinates.
    pub fn lift(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim()];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// Largest deviation of `basis` from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            worst = worst.max((norm(a) - 1.0).abs());
            for b in &self.basis[i + 1..] {
                worst = worst.max(dot(a, b).abs());
            }
        }
        worst
    }
}

/// Smallest affine subspace containing the cloud, up to `tol` in distance.
///
/// Uses the eigendecomposition of the scatter matrix around the centroid; a
/// direction is dropped when the total squared spread along it is below
/// `len * tol^2`.
pub fn affine_hull(cloud: &PointCloud, tol: f64) -> AffineSubspace {
    let n = cloud.dim();
    let base = cloud.centroid();
    let mut scatter = DMatrix::<f64>::zeros(n, n);
    for p in cloud.iter() {
        for i in 0..n {
            let di = p[i] - base[i];
            for j in i..n {
                scatter[(i, j)] += di * (p[j] - base[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            scatter[(i, j)] = scatter[(j, i)];
        }
    }
    let eig = SymmetricEigen::new(scatter);
    let threshold = cloud.len() as f64 * tol * tol;
    let mut dirs: Vec<(f64, Vec<f64>)> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > threshold)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    dirs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let basis = dirs
        .into_iter()
        .map(|(_, mut v): (f64, Vec<f64>)| {
            // Fix the sign so that the first significant entry is positive.
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();
    AffineSubspace { base, basis }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_full_dimensional() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let a = affine_hull(&PointCloud::from_points(2, pts.iter().map(|p| &p[..])), 1e-9);
        assert_eq!(a.dim(), 2);
        assert!(a.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn single_point_is_zero_dimensional() {
        let a = affine_hull(&PointCloud::from_points(3, [&[1.0, 2.0, 3.0][..]]), 1e-9);
        assert_eq!(a.dim(), 0);
        assert_eq!(a.base, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn tilted_segment_residuals() {
        let a = affine_hull(&PointCloud::from_points(2, [&[0.0, 0.0][..], &[1.0, 1.0][..]]), 1e-9);
        assert_eq!(a.dim(), 1);
        assert!(a.residual(&[2.0, 2.0]) < 1e-12);
        assert!((a.residual(&[1.0, 0.0]) - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
