//! Linear operators between free p-spaces, stored as matrices in delta
//! coordinates.
//!
//! A base-preserving point map `f` induces the operator sending `delta(x)`
//! to `delta(f(x))` with norm equal to `Lip(f)`. Since the unit ball is the
//! p-convex hull of the elementary molecules, any operator's norm is the
//! maximum of the codomain norms of the images of elementary molecules,
//! which makes desk-scale operator norms exact whenever the codomain norm
//! oracle is.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::molecule::{elementary_molecules, Molecule};
use crate::norm::{self, NormOptions};
use crate::space::PMetricSpace;

/// A linear map between free p-spaces in delta coordinates:
/// `(n_cod - 1) x (n_dom - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeOperator {
    domain: Arc<PMetricSpace>,
    codomain: Arc<PMetricSpace>,
    matrix: Array2<f64>,
}

/// An operator norm measurement with its attaining elementary molecule.
#[derive(Debug, Clone)]
pub struct OperatorNorm {
    pub value: f64,
    /// Pair `(x, y)` of the elementary molecule attaining the maximum.
    pub witness: (usize, usize),
}

impl FreeOperator {
    pub fn from_matrix(
        domain: Arc<PMetricSpace>,
        codomain: Arc<PMetricSpace>,
        matrix: Array2<f64>,
    ) -> Result<Self> {
        if matrix.nrows() != codomain.n() - 1 || matrix.ncols() != domain.n() - 1 {
            return Err(Error::Structural(format!(
                "operator matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                codomain.n() - 1,
                domain.n() - 1
            )));
        }
        Ok(FreeOperator {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(space: Arc<PMetricSpace>) -> Self {
        let k = space.n() - 1;
        FreeOperator {
            domain: space.clone(),
            codomain: space,
            matrix: Array2::eye(k),
        }
    }

    pub fn zero(domain: Arc<PMetricSpace>, codomain: Arc<PMetricSpace>) -> Self {
        let matrix = Array2::zeros((codomain.n() - 1, domain.n() - 1));
        FreeOperator {
            domain,
            codomain,
            matrix,
        }
    }

    /// Operator induced by a base-preserving point map (`map[0] == 0`).
    pub fn from_point_map(
        domain: Arc<PMetricSpace>,
        codomain: Arc<PMetricSpace>,
        map: &[usize],
    ) -> Result<Self> {
        if map.len() != domain.n() {
            return Err(Error::structural("point map length mismatch"));
        }
        if map[0] != 0 {
            return Err(Error::structural(
                "point map must send the base point to the base point",
            ));
        }
        let mut matrix = Array2::zeros((codomain.n() - 1, domain.n() - 1));
        for x in 1..domain.n() {
            let fx = map[x];
            if fx >= codomain.n() {
                return Err(Error::structural("point map image out of range"));
            }
            if fx != 0 {
                matrix[(fx - 1, x - 1)] = 1.0;
            }
        }
        Ok(FreeOperator {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn domain(&self) -> &Arc<PMetricSpace> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<PMetricSpace> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn apply(&self, molecule: &Molecule) -> Result<Molecule> {
        if molecule.space().as_ref() != self.domain.as_ref() {
            return Err(Error::structural("molecule not in operator domain"));
        }
        let v = ndarray::Array1::from(molecule.delta_coords());
        let w = self.matrix.dot(&v);
        Molecule::from_delta(self.codomain.clone(), w.as_slice().expect("contiguous"))
    }

    /// `self` after `other` (usual composition order).
    pub fn compose(&self, other: &FreeOperator) -> Result<FreeOperator> {
        if self.domain.as_ref() != other.codomain.as_ref() {
            return Err(Error::structural(
                "composition shape mismatch: inner codomain differs from outer domain",
            ));
        }
        Ok(FreeOperator {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn add_scaled(&self, other: &FreeOperator, c: f64) -> Result<FreeOperator> {
        if self.domain.as_ref() != other.domain.as_ref()
            || self.codomain.as_ref() != other.codomain.as_ref()
        {
            return Err(Error::structural("operator sum shape mismatch"));
        }
        Ok(FreeOperator {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix + &(c * &other.matrix),
        })
    }

    pub fn sub(&self, other: &FreeOperator) -> Result<FreeOperator> {
        self.add_scaled(other, -1.0)
    }

    /// Largest absolute entry of `self - other`; `INFINITY` on shape
    /// mismatch.
    pub fn max_abs_diff(&self, other: &FreeOperator) -> f64 {
        if self.matrix.dim() != other.matrix.dim() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_identity_within(&self, tol: f64) -> bool {
        if self.matrix.nrows() != self.matrix.ncols() {
            return false;
        }
        let eye = Array2::<f64>::eye(self.matrix.nrows());
        (&self.matrix - &eye).iter().all(|v| v.abs() <= tol)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().sum()
    }

    /// Exact operator norm: maximum codomain norm over the images of the
    /// domain's elementary molecules.
    ///
    /// Always uses an exact codomain oracle (transport at p = 1, forest
    /// enumeration otherwise), so a codomain beyond the enumeration cap
    /// surfaces as a resource error rather than a silent upper estimate.
    pub fn operator_norm(&self, opts: &NormOptions) -> Result<OperatorNorm> {
        let method = if self.codomain.p() == 1.0 {
            norm::Method::Lp
        } else {
            norm::Method::Enumerate
        };
        let mut best = OperatorNorm {
            value: 0.0,
            witness: (0, 0),
        };
        for (x, y, z) in elementary_molecules(&self.domain) {
            let image = self.apply(&z)?;
            let cert = norm::norm_with(&image, method, opts)?;
            if cert.value > best.value {
                best = OperatorNorm {
                    value: cert.value,
                    witness: (x, y),
                };
            }
        }
        Ok(best)
    }
}

/// `max over x != y of d_cod(map(x), map(y)) / d_dom(x, y)`.
pub fn lipschitz_constant(domain: &PMetricSpace, codomain: &PMetricSpace, map: &[usize]) -> f64 {
    let n = domain.n();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            best = best.max(codomain.dist(map[x], map[y]) / domain.dist(x, y));
        }
    }
    best
}

/// Builds the operator of a base-preserving Lipschitz point map and returns
/// it with the map's Lipschitz constant (which equals the operator norm).
pub fn operator_from_lipschitz(
    domain: Arc<PMetricSpace>,
    codomain: Arc<PMetricSpace>,
    map: &[usize],
) -> Result<(FreeOperator, f64)> {
    let lip = lipschitz_constant(&domain, &codomain, map);
    let op = FreeOperator::from_point_map(domain, codomain, map)?;
    Ok((op, lip))
}
