//! Idempotent linear maps on the five coordinates.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{q_from_f64, Poly, Q};
use crate::tol;

pub const N: usize = 5;

/// A 5x5 matrix, optionally with exact entries and the normal-form
/// parameters `(a1, a2, a3, b1, b2, b3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdempotentMap {
    pub name: String,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<[f64; 6]>,
}

impl IdempotentMap {
    pub fn new(name: &str, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.len() != N || matrix.iter().any(|r| r.len() != N) {
            return Err(Error::InvalidBody("map must be 5x5".into()));
        }
        if matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("map has a non-finite entry".into()));
        }
        Ok(Self { name: name.into(), matrix, params: None })
    }

    /// `(l + a1 z + b1 s, x + a2 z + b2 s, y + a3 z + b3 s, 0, 0)`.
    pub fn normal_form(params: [f64; 6]) -> Self {
        let [a1, a2, a3, b1, b2, b3] = params;
        let matrix = vec![
            vec![1.0, 0.0, 0.0, a1, b1],
            vec![0.0, 1.0, 0.0, a2, b2],
            vec![0.0, 0.0, 1.0, a3, b3],
            vec![0.0; N],
            vec![0.0; N],
        ];
        Self { name: "normal_form".into(), matrix, params: Some(params) }
    }

    /// The map fixing `F1`: `(l, x - z, y, 0, 0)`.
    pub fn p1() -> Self {
        Self { name: "P1".into(), ..Self::normal_form([0.0, -1.0, 0.0, 0.0, 0.0, 0.0]) }
    }

    /// `R P1 R` with `R` negating `x`.
    pub fn p2() -> Self {
        let r = reflection();
        let m = matmul(&matmul(&r, &Self::p1().matrix), &r);
        let mut p = Self::new("P2", m).expect("5x5");
        p.params = Some([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        p
    }

    pub fn identity() -> Self {
        let m = (0..N).map(|i| (0..N).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new("identity", m).expect("5x5")
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Max-norm of `P P - P`.
    pub fn idempotency_defect(&self) -> f64 {
        let pp = matmul(&self.matrix, &self.matrix);
        pp.iter()
            .zip(&self.matrix)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn check_idempotent(&self) -> Result<()> {
        let d = self.idempotency_defect();
        if d > tol::EXACT {
            return Err(Error::NotIdempotent(d));
        }
        Ok(())
    }

    /// Exact entries (every double is a rational).
    pub fn exact(&self) -> Vec<Vec<Q>> {
        self.matrix.iter().map(|r| r.iter().map(|&x| q_from_f64(x).expect("finite")).collect()).collect()
    }

    /// `P` applied to a vector of polynomials in `t`.
    pub fn apply_poly(&self, v: &[Poly]) -> Vec<Poly> {
        self.exact()
            .iter()
            .map(|r| r.iter().zip(v).fold(Poly::zero(), |acc, (a, p)| &acc + &p.scale(a)))
            .collect()
    }

    /// Exact idempotency.
    pub fn is_exactly_idempotent(&self) -> bool {
        let e = self.exact();
        let mut ok = true;
        for i in 0..N {
            for j in 0..N {
                let s = (0..N).fold(Q::zero(), |acc, k| acc + &e[i][k] * &e[k][j]);
                ok &= s == e[i][j];
            }
        }
        ok
    }
}

/// `diag(1, -1, 1, 1, 1)`.
pub fn reflection() -> Vec<Vec<f64>> {
    (0..N)
        .map(|i| (0..N).map(|j| if i != j { 0.0 } else if i == 1 { -1.0 } else { 1.0 }).collect())
        .collect()
}

pub fn reflect(v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    w[1] = -w[1];
    w
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a.len())
        .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Exact value of a polynomial vector at `t`, as doubles.
pub fn eval_poly_vec(v: &[Poly], t: f64) -> Vec<f64> {
    v.iter().map(|p| p.eval_f64(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_and_p2_are_idempotent() {
        for p in [IdempotentMap::p1(), IdempotentMap::p2(), IdempotentMap::identity()] {
            assert_eq!(p.idempotency_defect(), 0.0);
            assert!(p.is_exactly_idempotent());
        }
        assert_eq!(IdempotentMap::p2().matrix[1], vec![0.0, 1.0, 0.0, 1.0, 0.0]);
        let nf = IdempotentMap::normal_form([0.3, -2.0, 1.5, 4.0, -1.0, 0.25]);
        assert!(nf.idempotency_defect() <= tol::EXACT);
    }

    #[test]
    fn rejects_non_idempotent() {
        let mut m = IdempotentMap::identity().matrix;
        m[0][0] = 2.0;
        let p = IdempotentMap::new("twice", m).unwrap();
        assert!(matches!(p.check_idempotent(), Err(Error::NotIdempotent(_))));
    }

    #[test]
    fn p1_images() {
        let p = IdempotentMap::p1();
        assert_eq!(p.apply(&[1.0, 0.0, 0.25, 0.5, 0.125]), vec![1.0, -0.5, 0.25, 0.0, 0.0]);
        assert_eq!(p.apply(&[1.0, -0.5, 1.0, -0.5, 1.0]), vec![1.0, 0.0, 1.0, 0.0, 0.0]);
    }
}
