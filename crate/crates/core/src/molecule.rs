//! Molecules (zero-sum point masses) and real Lipschitz functions on a
//! finite pointed p-metric space.
//!
//! In delta coordinates a molecule is its coefficient vector on the points
//! other than the base; the base coefficient is determined by balance.
//! `delta(x)` as a vector of the free space means the molecule
//! `delta(x) - delta(0)`, so the base maps to the zero vector.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::PMetricSpace;
use crate::tol;

/// A finitely supported signed measure with total mass zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    space: Arc<PMetricSpace>,
    coeffs: Vec<f64>,
}

impl Molecule {
    /// Builds a molecule from full coefficients, enforcing balance.
    pub fn new(space: Arc<PMetricSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n() {
            return Err(Error::Structural(format!(
                "molecule has {} coefficients on a {}-point space",
                coeffs.len(),
                space.n()
            )));
        }
        let sum: f64 = coeffs.iter().sum();
        let mass: f64 = coeffs.iter().map(|c| c.abs()).sum();
        if sum.abs() > tol::MOLECULE_BALANCE * mass.max(1.0) {
            return Err(Error::Structural(format!(
                "molecule coefficients sum to {sum:.3e}, not zero"
            )));
        }
        Ok(Molecule { space, coeffs })
    }

    /// Builds a molecule from delta coordinates (entries on points 1..n).
    pub fn from_delta(space: Arc<PMetricSpace>, delta: &[f64]) -> Result<Self> {
        if delta.len() + 1 != space.n() {
            return Err(Error::Structural(format!(
                "expected {} delta coordinates, got {}",
                space.n() - 1,
                delta.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(space.n());
        coeffs.push(-delta.iter().sum::<f64>());
        coeffs.extend_from_slice(delta);
        Ok(Molecule { space, coeffs })
    }

    /// `delta(y) - delta(x)`, unnormalized.
    pub fn dirac_diff(space: Arc<PMetricSpace>, y: usize, x: usize) -> Result<Self> {
        let n = space.n();
        if x >= n || y >= n {
            return Err(Error::structural("dirac index out of range"));
        }
        let mut coeffs = vec![0.0; n];
        coeffs[y] += 1.0;
        coeffs[x] -= 1.0;
        Ok(Molecule { space, coeffs })
    }

    /// The elementary molecule `(delta(y) - delta(x)) / d(x, y)`.
    pub fn elementary(space: Arc<PMetricSpace>, y: usize, x: usize) -> Result<Self> {
        if x == y {
            return Err(Error::structural("elementary molecule needs x != y"));
        }
        let d = space.dist(x, y);
        let mut m = Self::dirac_diff(space, y, x)?;
        for c in &mut m.coeffs {
            *c /= d;
        }
        Ok(m)
    }

    pub fn zero(space: Arc<PMetricSpace>) -> Self {
        let n = space.n();
        Molecule {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Arc<PMetricSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs[i]
    }

    /// Delta coordinates: coefficients on points 1..n.
    pub fn delta_coords(&self) -> Vec<f64> {
        self.coeffs[1..].to_vec()
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != 0.0)
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Molecule {
        Molecule {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Molecule) -> Result<Molecule> {
        if self.space != other.space {
            return Err(Error::structural("molecules live on different spaces"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Molecule {
            space: self.space.clone(),
            coeffs,
        })
    }

    /// Linear combination `sum_k weights[k] * terms[k]`, summed per
    /// coordinate in term order.
    pub fn combine(terms: &[Molecule], weights: &[f64]) -> Result<Molecule> {
        if terms.is_empty() {
            return Err(Error::structural("empty combination"));
        }
        if terms.len() != weights.len() {
            return Err(Error::structural("weights/terms length mismatch"));
        }
        let space = terms[0].space.clone();
        let mut coeffs = vec![0.0; space.n()];
        for (t, &w) in terms.iter().zip(weights) {
            if t.space != space {
                return Err(Error::structural("molecules live on different spaces"));
            }
            for (c, v) in coeffs.iter_mut().zip(&t.coeffs) {
                *c += w * v;
            }
        }
        Ok(Molecule { space, coeffs })
    }

    /// Image under a point map between spaces (mass transported pointwise).
    pub fn push_forward(&self, target: Arc<PMetricSpace>, map: &[usize]) -> Result<Molecule> {
        if map.len() != self.space.n() {
            return Err(Error::structural("point map length mismatch"));
        }
        let mut coeffs = vec![0.0; target.n()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let j = map[i];
            if j >= target.n() {
                return Err(Error::structural("point map index out of range"));
            }
            coeffs[j] += c;
        }
        Ok(Molecule {
            space: target,
            coeffs,
        })
    }

    /// Total variation `sum |coeffs|`.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Every elementary molecule `(delta(y) - delta(x)) / d(x,y)` with `x < y`,
/// together with its pair; the sign convention is absorbed by coefficients
/// downstream.
pub fn elementary_molecules(space: &Arc<PMetricSpace>) -> Vec<(usize, usize, Molecule)> {
    let n = space.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for x in 0..n {
        for y in (x + 1)..n {
            let m = Molecule::elementary(space.clone(), y, x).expect("distinct indices");
            out.push((x, y, m));
        }
    }
    out
}

/// A real function on the points with `f(base) = 0`; its Lipschitz
/// constant is computed on demand, never stored stale.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFunction {
    values: Vec<f64>,
}

impl LipschitzFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            Some(&0.0) => Ok(LipschitzFunction { values }),
            Some(_) => Err(Error::structural("Lipschitz function must vanish at base")),
            None => Err(Error::structural("empty value vector")),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `max over x != y of |f(x) - f(y)| / d(x, y)`.
    pub fn lip(&self, space: &PMetricSpace) -> f64 {
        let n = space.n();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max((self.values[i] - self.values[j]).abs() / space.dist(i, j));
            }
        }
        best
    }

    /// Dual pairing `<f, mu> = sum f(x) mu(x)`.
    pub fn pairing(&self, molecule: &Molecule) -> f64 {
        self.values
            .iter()
            .zip(molecule.coeffs())
            .map(|(f, c)| f * c)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_grid, GridKind};

    #[test]
    fn elementary_molecule_on_two_points() {
        let g = make_grid(GridKind::Custom(vec![0.0, 1.0]), 0.5).unwrap();
        let ms = elementary_molecules(&g.space);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].2.coeffs(), &[-1.0, 1.0]);
    }

    #[test]
    fn three_point_space_has_three_elementary_molecules() {
        let g = make_grid(GridKind::IntegerSegment(2), 1.0).unwrap();
        assert_eq!(elementary_molecules(&g.space).len(), 3);
    }

    #[test]
    fn dyadic_one_elementary_endpoints() {
        let g = make_grid(GridKind::Dyadic(1), 1.0).unwrap();
        let m = Molecule::elementary(g.space.clone(), 2, 0).unwrap();
        assert_eq!(m.coeffs(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn unbalanced_coefficients_rejected() {
        let g = make_grid(GridKind::IntegerSegment(1), 1.0).unwrap();
        assert!(Molecule::new(g.space.clone(), vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn delta_coordinate_roundtrip() {
        let g = make_grid(GridKind::IntegerSegment(3), 1.0).unwrap();
        let m = Molecule::new(g.space.clone(), vec![-2.0, 1.0, 0.5, 0.5]).unwrap();
        let d = m.delta_coords();
        let back = Molecule::from_delta(g.space.clone(), &d).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn lipschitz_constant_of_coordinate_function() {
        let g = make_grid(GridKind::IntegerSegment(3), 1.0).unwrap();
        let f = LipschitzFunction::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.lip(&g.space), 1.0);
        let m = Molecule::dirac_diff(g.space.clone(), 3, 0).unwrap();
        assert_eq!(f.pairing(&m), 3.0);
    }
}
