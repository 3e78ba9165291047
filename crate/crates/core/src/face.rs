//! Designated faces of a body.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::tol;

/// A face of a parent body given by a subset of its generators and,
/// optionally, a linear functional minimized exactly on it.
#[derive(Clone, Debug)]
pub struct FaceSpec {
    indices: Vec<usize>,
    exposing: Option<Vec<f64>>,
    body: ConvexBody,
}

impl FaceSpec {
    /// Validates that the generators listed by `indices` span a proper face
    /// of `parent` (exposed by `exposing` when given).
    pub fn new(parent: &ConvexBody, mut indices: Vec<usize>, exposing: Option<Vec<f64>>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidFace("empty generator set".into()));
        }
        let ngen = parent.generators().len();
        if let Some(&bad) = indices.iter().find(|&&i| i >= ngen) {
            return Err(Error::InvalidFace(format!("generator index {bad} out of range (body has {ngen})")));
        }
        if let Some(u) = &exposing {
            if u.len() != parent.dim() {
                return Err(Error::InvalidFace("exposing functional has the wrong length".into()));
            }
            if u.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidFace("exposing functional is zero".into()));
            }
        }
        let pts: Vec<Vec<f64>> = indices.iter().map(|&i| parent.generators()[i].clone()).collect();
        let body = ConvexBody::from_points(parent.dim(), pts)?;
        let face = Self { indices, exposing, body };
        face.validate(parent)?;
        Ok(face)
    }

    fn is_member(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    fn validate(&self, parent: &ConvexBody) -> Result<()> {
        let cloud = parent.cloud();
        match &self.exposing {
            Some(u) => {
                let vals: Vec<f64> = self.body.generators().iter().map(|g| dot(u, g)).collect();
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let slack = tol::SAMPLE * (1.0 + crate::linalg::norm(u) * parent.scale());
                if hi - lo > slack {
                    return Err(Error::NotAFace(format!("functional varies by {:e} across the face", hi - lo)));
                }
                // Rounding bound on a computed pairing; a point counts as lying
                // on the hyperplane only within it, since faces with
                // high-order contact have points arbitrarily close above the
                // hyperplane yet far from the face.
                let n = parent.dim() as f64;
                let round = |x: &[f64]| 2.0 * n * f64::EPSILON * u.iter().zip(x).map(|(a, b)| (a * b).abs()).sum::<f64>();
                let lo_round = self.body.generators().iter().map(|g| round(g)).fold(0.0, f64::max);
                let mut proper = false;
                for i in 0..cloud.len() {
                    let v = dot(u, cloud.point(i));
                    if v < lo - slack {
                        return Err(Error::NotAFace(format!(
                            "point {i} lies below the exposing hyperplane by {:e}",
                            lo - v
                        )));
                    }
                    if v > lo + slack {
                        proper = true;
                    }
                    let on_plane = v - hi <= round(cloud.point(i)) + lo_round;
                    if on_plane && !self.is_member(i) && !self.body.membership(cloud.point(i), tol::SAMPLE) {
                        return Err(Error::NotAFace(format!(
                            "point {i} lies on the exposing hyperplane but outside the face"
                        )));
                    }
                }
                if !proper {
                    return Err(Error::ImproperFace);
                }
            }
            None => {
                let outside: Vec<usize> = (0..cloud.len())
                    .filter(|&i| !self.is_member(i) && !self.body.membership(cloud.point(i), tol::SAMPLE))
                    .collect();
                if outside.is_empty() {
                    return Err(Error::ImproperFace);
                }
                // If m lies in relint F and g in C \ F, then m + eps (m - g) must
                // leave C; otherwise [g, m + eps(m - g)] would put g in F.
                let m = self.body.interior_point().to_vec();
                let step = outside.len().div_ceil(512).max(1);
                for &i in outside.iter().step_by(step) {
                    let g = cloud.point(i);
                    let probe: Vec<f64> = m.iter().zip(g).map(|(a, b)| a + 1e-3 * (a - b)).collect();
                    if parent.membership(&probe, tol::EXACT) {
                        return Err(Error::NotAFace(format!(
                            "the face's relative interior continues past itself towards point {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn exposing(&self) -> Option<&[f64]> {
        self.exposing.as_deref()
    }

    /// The face as a body in its own right.
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        self.body.generators()
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.body.distance(x)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.body.membership(x, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn edge_is_a_face() {
        let f = FaceSpec::new(&square(), vec![0, 2], Some(vec![1.0, 0.0])).unwrap();
        assert_eq!(f.generators().len(), 2);
        assert!(FaceSpec::new(&square(), vec![0, 2], None).is_ok());
    }

    #[test]
    fn whole_body_is_improper() {
        assert!(matches!(FaceSpec::new(&square(), vec![0, 1, 2, 3], None), Err(Error::ImproperFace)));
    }

    #[test]
    fn diagonal_is_not_a_face() {
        assert!(matches!(FaceSpec::new(&square(), vec![0, 3], None), Err(Error::NotAFace(_))));
        assert!(FaceSpec::new(&square(), vec![0, 3], Some(vec![1.0, -1.0])).is_err());
    }

    #[test]
    fn wrong_functional_is_rejected() {
        assert!(FaceSpec::new(&square(), vec![0, 2], Some(vec![0.0, 1.0])).is_err());
    }
}
