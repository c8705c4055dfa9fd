//! Linear subspaces of R^d given by a basis, the constraint sets centers are
//! sought in. The user basis is kept as given; an orthonormalized copy
//! drives projections and coordinates.

use crate::error::{Error, Result};
use crate::linalg;

const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
    ortho: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        if basis.is_empty() {
            return Err(Error::EmptyInput("subspace basis"));
        }
        if basis.len() > ambient_dim {
            return Err(Error::InvalidParameter(format!(
                "{} basis vectors cannot be independent in dimension {}",
                basis.len(),
                ambient_dim
            )));
        }
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    context: "subspace basis vector",
                    expected: ambient_dim,
                    actual: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("subspace basis vector"));
            }
        }
        let ortho = linalg::orthonormalize(&basis, RANK_TOL)
            .map_err(|index| Error::RankDeficient { index })?;
        Ok(Subspace {
            ambient_dim,
            basis,
            ortho,
        })
    }

    /// The whole of R^d, as the trivial constraint.
    pub fn full_space(dim: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Subspace {
            ambient_dim: dim,
            basis: basis.clone(),
            ortho: basis,
        }
    }

    /// The coordinate axis `index` in R^d.
    pub fn axis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "axis {index} out of range for dimension {dim}"
            )));
        }
        let mut e = vec![0.0; dim];
        e[index] = 1.0;
        Subspace::new(dim, vec![e])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.ortho.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn orthonormal_basis(&self) -> &[Vec<f64>] {
        &self.ortho
    }

    /// Coordinates of `x` in the orthonormal basis (the rank-r coefficient
    /// vector of the orthogonal projection).
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.ortho.iter().map(|q| linalg::dot(q, x)).collect()
    }

    /// Point of the subspace with the given orthonormal coordinates.
    pub fn from_coords(&self, c: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ambient_dim];
        for (ci, q) in c.iter().zip(&self.ortho) {
            linalg::axpy(&mut y, *ci, q);
        }
        y
    }

    /// Orthogonal (Euclidean) projection onto the subspace.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.from_coords(&self.coords(x))
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        linalg::dist2(&self.project(x), x)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance_to(x) <= tol * (1.0 + linalg::norm2(x))
    }
}
