//! Schauder bases of free p-spaces over integer segments and dyadic grids.
//!
//! The natural basis of the integer chain is `x_n = delta(n) - delta(n-1)`
//! with partial sums induced by clamp retractions; it is normalized and
//! bi-monotone. On `[0,1]` grids the interpolation projections
//! `P_{K1,K2}` (each of norm at most `3^(1/p-1)`) turn the Haar molecules
//! `delta(a) + delta(b) - 2 delta((a+b)/2)`, ordered coarse-to-fine, into
//! a Schauder basis with the same constant bound. All claims are checked
//! as matrix identities and exact norm measurements at desk scale.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::molecule::Molecule;
use crate::norm::{self, NormOptions};
use crate::operator::FreeOperator;
use crate::space::{make_grid, Grid, GridKind, PMetricSpace};

/// Which basis a [`BasisSystem`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    NaturalInteger,
    HaarDyadic,
}

/// An ordered basis with its partial-sum projections.
///
/// `projections[k]` projects onto the span of the first `k` vectors, so
/// `projections[0]` is zero and `projections[len]` is the identity.
#[derive(Debug, Clone)]
pub struct BasisSystem {
    pub ambient: Arc<PMetricSpace>,
    pub vectors: Vec<Molecule>,
    pub projections: Vec<FreeOperator>,
    pub kind: BasisKind,
}

/// Worst deviations from the basis-system identities.
#[derive(Debug, Clone)]
pub struct SystemCheck {
    /// `max ||P_i P_j - P_min(i,j)||` entrywise.
    pub compose_err: f64,
    /// `max |P_k v_i - v_i|` over `i < k`.
    pub fix_err: f64,
    /// `max |P_k v_k|` (each projection annihilates the next vector).
    pub annihilate_err: f64,
    /// `max |trace(P_k) - k|`; projections are idempotent, so the trace
    /// is the rank and pins the range dimension.
    pub rank_err: f64,
}

impl BasisSystem {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Verifies the partial-sum identities as matrix equalities.
    pub fn check(&self) -> Result<SystemCheck> {
        let len = self.vectors.len();
        if self.projections.len() != len + 1 {
            return Err(Error::structural("expected one projection per prefix"));
        }
        let mut compose_err = 0.0f64;
        for i in 0..=len {
            for j in 0..=len {
                let pij = self.projections[i].compose(&self.projections[j])?;
                compose_err = compose_err.max(pij.max_abs_diff(&self.projections[i.min(j)]));
            }
        }
        let mut fix_err = 0.0f64;
        let mut annihilate_err = 0.0f64;
        for k in 0..=len {
            for (i, v) in self.vectors.iter().enumerate() {
                if i > k {
                    continue;
                }
                let image = self.projections[k].apply(v)?;
                let err = image
                    .coeffs()
                    .iter()
                    .zip(v.coeffs())
                    .map(|(a, b)| if i < k { (a - b).abs() } else { a.abs() })
                    .fold(0.0f64, f64::max);
                if i < k {
                    fix_err = fix_err.max(err);
                } else {
                    annihilate_err = annihilate_err.max(err);
                }
            }
        }
        let mut rank_err = 0.0f64;
        for (k, p) in self.projections.iter().enumerate() {
            rank_err = rank_err.max((p.trace() - k as f64).abs());
        }
        Ok(SystemCheck {
            compose_err,
            fix_err,
            annihilate_err,
            rank_err,
        })
    }
}

/// The window projection on the integer chain `0..=m_max`:
/// `delta(n)` maps to `delta(clamp(n, k, m)) - delta(k)`.
pub fn window_projection(space: &Arc<PMetricSpace>, k: usize, m: usize) -> Result<FreeOperator> {
    let n = space.n();
    if !(k <= m && m < n) {
        return Err(Error::structural("window out of range"));
    }
    let mut matrix = Array2::zeros((n - 1, n - 1));
    for col in 1..n {
        let r = col.clamp(k, m);
        if r != 0 {
            matrix[(r - 1, col - 1)] += 1.0;
        }
        if k != 0 {
            matrix[(k - 1, col - 1)] -= 1.0;
        }
    }
    FreeOperator::from_matrix(space.clone(), space.clone(), matrix)
}

/// The natural basis `x_n = delta(n) - delta(n-1)` on the integer chain
/// `0..=m`, with partial-sum projections from clamp retractions.
pub fn natural_basis(m: usize, p: f64) -> Result<BasisSystem> {
    if m < 1 {
        return Err(Error::structural("need at least one basis vector"));
    }
    let grid = make_grid(GridKind::IntegerSegment(m), p)?;
    let ambient = grid.space;
    let vectors: Vec<Molecule> = (1..=m)
        .map(|n| Molecule::dirac_diff(ambient.clone(), n, n - 1))
        .collect::<Result<_>>()?;
    let projections: Vec<FreeOperator> = (0..=m)
        .map(|j| window_projection(&ambient, 0, j))
        .collect::<Result<_>>()?;
    Ok(BasisSystem {
        ambient,
        vectors,
        projections,
        kind: BasisKind::NaturalInteger,
    })
}

/// The interpolation operator from the free space of a finer `[0,1]` grid
/// onto a coarser one: grid points of the subgrid map to themselves, other
/// points split linearly between their subgrid neighbors.
pub fn interval_projection(fine: &Grid, coarse: &Grid) -> Result<FreeOperator> {
    check_unit_grid(fine)?;
    check_unit_grid(coarse)?;
    for pt in &coarse.points {
        if fine.index_of(*pt).is_none() {
            return Err(Error::Structural(format!(
                "subgrid point {pt} is missing from the fine grid"
            )));
        }
    }
    let n1 = fine.space.n();
    let n2 = coarse.space.n();
    let mut matrix = Array2::zeros((n2 - 1, n1 - 1));
    for col in 1..n1 {
        let x = fine.points[col];
        if let Some(i2) = coarse.index_of(x) {
            if i2 != 0 {
                matrix[(i2 - 1, col - 1)] = 1.0;
            }
            continue;
        }
        let hi = coarse
            .points
            .iter()
            .position(|&z| z > x)
            .ok_or_else(|| Error::internal("grid point beyond the unit interval"))?;
        let (a, b) = (coarse.points[hi - 1], coarse.points[hi]);
        let wa = (b - x) / (b - a);
        let wb = (x - a) / (b - a);
        if hi - 1 != 0 {
            matrix[(hi - 2, col - 1)] = wa;
        }
        matrix[(hi - 1, col - 1)] = wb;
    }
    FreeOperator::from_matrix(fine.space.clone(), coarse.space.clone(), matrix)
}

/// The canonical embedding of the free space of a coarser grid into a
/// finer one (inclusion of points).
pub fn canonical_embedding(coarse: &Grid, fine: &Grid) -> Result<FreeOperator> {
    check_unit_grid(fine)?;
    check_unit_grid(coarse)?;
    let n1 = fine.space.n();
    let n2 = coarse.space.n();
    let mut matrix = Array2::zeros((n1 - 1, n2 - 1));
    for col in 1..n2 {
        let x = coarse.points[col];
        let i1 = fine.index_of(x).ok_or_else(|| {
            Error::Structural(format!("subgrid point {x} is missing from the fine grid"))
        })?;
        matrix[(i1 - 1, col - 1)] = 1.0;
    }
    FreeOperator::from_matrix(coarse.space.clone(), fine.space.clone(), matrix)
}

fn check_unit_grid(grid: &Grid) -> Result<()> {
    if grid.points.first() != Some(&0.0) || grid.points.last() != Some(&1.0) {
        return Err(Error::structural("grid must span [0, 1]"));
    }
    Ok(())
}

/// One Haar entry: the fundamental vector or an interval molecule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HaarEntry {
    /// `delta(1) - delta(0)`.
    Fundamental,
    /// `delta(a) + delta(b) - 2 delta(mid)`.
    Interval { a: f64, b: f64, mid: f64 },
}

/// The ordering of the Haar system: fundamental vector first, then levels
/// coarse to fine, left to right within a level.
#[derive(Debug, Clone)]
pub struct HaarIndex {
    pub entries: Vec<HaarEntry>,
}

pub fn haar_index(level: u32) -> HaarIndex {
    let mut entries = vec![HaarEntry::Fundamental];
    for l in 0..level {
        let pieces = 1usize << l;
        for i in 0..pieces {
            let a = i as f64 / pieces as f64;
            let b = (i + 1) as f64 / pieces as f64;
            entries.push(HaarEntry::Interval {
                a,
                b,
                mid: 0.5 * (a + b),
            });
        }
    }
    HaarIndex { entries }
}

/// Default cap on the dyadic level (17 ambient points).
pub const HAAR_LEVEL_CAP: u32 = 4;

/// The Haar system through the given dyadic level, with partial-sum
/// projections `L . P` through the accumulated midpoint grids.
pub fn haar_system(level: u32, p: f64) -> Result<BasisSystem> {
    if level > HAAR_LEVEL_CAP {
        return Err(Error::resource(format!(
            "haar level capped at {HAAR_LEVEL_CAP}"
        )));
    }
    let fine = make_grid(GridKind::Dyadic(level), p)?;
    let index = haar_index(level);
    let vectors: Vec<Molecule> = index
        .entries
        .iter()
        .map(|e| match e {
            HaarEntry::Fundamental => {
                let one = fine.index_of(1.0).expect("grid holds 1");
                Molecule::dirac_diff(fine.space.clone(), one, 0)
            }
            HaarEntry::Interval { a, b, mid } => {
                let mut coeffs = vec![0.0; fine.space.n()];
                coeffs[fine.index_of(*a).expect("grid holds a")] += 1.0;
                coeffs[fine.index_of(*b).expect("grid holds b")] += 1.0;
                coeffs[fine.index_of(*mid).expect("grid holds mid")] -= 2.0;
                Molecule::new(fine.space.clone(), coeffs)
            }
        })
        .collect::<Result<_>>()?;

    let mut projections = Vec::with_capacity(vectors.len() + 1);
    projections.push(FreeOperator::zero(fine.space.clone(), fine.space.clone()));
    let mut knots = vec![0.0, 1.0];
    for k in 1..=vectors.len() {
        // the span of the first k vectors lives on {0,1} plus the first
        // k-1 midpoints
        if k >= 2 {
            if let HaarEntry::Interval { mid, .. } = index.entries[k - 1] {
                knots.push(mid);
            }
        }
        let mut pts = knots.clone();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let coarse = make_grid(GridKind::Custom(pts), p)?;
        let proj = interval_projection(&fine, &coarse)?;
        let emb = canonical_embedding(&coarse, &fine)?;
        projections.push(emb.compose(&proj)?);
    }
    Ok(BasisSystem {
        ambient: fine.space,
        vectors,
        projections,
        kind: BasisKind::HaarDyadic,
    })
}

/// Basis constant data: the largest partial-sum projection norm, and the
/// largest window norm `||P_m - P_k||` witnessing (bi)monotonicity.
#[derive(Debug, Clone)]
pub struct BasisConstantReport {
    pub max_projection_norm: f64,
    pub argmax: usize,
    pub max_window_norm: f64,
}

pub fn basis_constant(system: &BasisSystem, opts: &NormOptions) -> Result<BasisConstantReport> {
    let mut max_projection_norm = 0.0f64;
    let mut argmax = 0usize;
    for (k, p) in system.projections.iter().enumerate().skip(1) {
        let v = p.operator_norm(opts)?.value;
        if v > max_projection_norm {
            max_projection_norm = v;
            argmax = k;
        }
    }
    let mut max_window_norm = 0.0f64;
    for k in 0..system.projections.len() {
        for m in (k + 1)..system.projections.len() {
            let window = system.projections[m].sub(&system.projections[k])?;
            let v = window.operator_norm(opts)?.value;
            max_window_norm = max_window_norm.max(v);
        }
    }
    Ok(BasisConstantReport {
        max_projection_norm,
        argmax,
        max_window_norm,
    })
}

/// One row of the conditionality growth table on the integer chain.
#[derive(Debug, Clone)]
pub struct ConditionalityRow {
    pub m: usize,
    /// `||sum x_n|| = m`.
    pub plain: f64,
    /// `(sum ||x_n||^p)^(1/p) = m^(1/p)`.
    pub lp_aggregate: f64,
    /// `||sum (-1)^n x_n||`.
    pub alternating: f64,
    /// `alternating / plain`; strictly increasing in `m` when p < 1 is
    /// the finite trace of conditionality.
    pub ratio: f64,
}

/// Plain, aggregate, and alternating-sign norms of the natural basis
/// prefixes for `m = 1..=m_max`.
pub fn conditionality_witness(
    m_max: usize,
    p: f64,
    opts: &NormOptions,
) -> Result<Vec<ConditionalityRow>> {
    if m_max < 1 {
        return Err(Error::structural("need m >= 1"));
    }
    let system = natural_basis(m_max, p)?;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let plain_vec = Molecule::combine(&system.vectors[..m], &vec![1.0; m])?;
        let alt_weights: Vec<f64> = (1..=m)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let alt_vec = Molecule::combine(&system.vectors[..m], &alt_weights)?;
        let plain = norm::norm_with(&plain_vec, norm::Method::Auto, opts)?.value;
        let alternating = norm::norm_with(&alt_vec, norm::Method::Auto, opts)?.value;
        rows.push(ConditionalityRow {
            m,
            plain,
            lp_aggregate: (m as f64).powf(1.0 / p),
            alternating,
            ratio: alternating / plain,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn natural_basis_of_length_one_is_trivial() {
        let system = natural_basis(1, 0.5).unwrap();
        assert_eq!(system.vectors.len(), 1);
        assert_eq!(system.vectors[0].coeffs(), &[-1.0, 1.0]);
        assert!(system.projections[1].is_identity_within(0.0));
        let check = system.check().unwrap();
        assert_eq!(check.compose_err, 0.0);
    }

    #[test]
    fn natural_basis_identities_hold_exactly() {
        let system = natural_basis(6, 0.5).unwrap();
        let check = system.check().unwrap();
        assert!(check.compose_err <= tol::MATRIX_ID_EXACT);
        assert!(check.fix_err <= tol::MATRIX_ID_EXACT);
        assert!(check.annihilate_err <= tol::MATRIX_ID_EXACT);
        assert!(check.rank_err <= tol::MATRIX_ID_EXACT);
    }

    #[test]
    fn window_projections_have_norm_one() {
        let system = natural_basis(5, 0.5).unwrap();
        for k in 0..5 {
            for m in (k + 1)..=5 {
                let w = window_projection(&system.ambient, k, m).unwrap();
                let v = w.operator_norm(&NormOptions::default()).unwrap().value;
                assert!((v - 1.0).abs() <= 1e-9, "k={k} m={m}: {v}");
            }
        }
    }

    #[test]
    fn interval_projection_identity_when_grids_match() {
        let g = make_grid(GridKind::Dyadic(2), 0.5).unwrap();
        let p = interval_projection(&g, &g).unwrap();
        assert!(p.is_identity_within(0.0));
    }

    #[test]
    fn midpoint_splits_evenly_to_endpoints() {
        let fine = make_grid(GridKind::Custom(vec![0.0, 0.5, 1.0]), 0.5).unwrap();
        let coarse = make_grid(GridKind::Custom(vec![0.0, 1.0]), 0.5).unwrap();
        let p = interval_projection(&fine, &coarse).unwrap();
        // delta(0.5) -> 0.5 delta(0) + 0.5 delta(1); in delta coordinates
        // only the delta(1) half survives.
        assert_eq!(p.matrix().shape(), &[1, 2]);
        assert_eq!(p.matrix()[(0, 0)], 0.5);
        assert_eq!(p.matrix()[(0, 1)], 1.0);
        let l = canonical_embedding(&coarse, &fine).unwrap();
        let pl = p.compose(&l).unwrap();
        assert!(pl.is_identity_within(0.0));
    }

    #[test]
    fn interval_projection_tower_property() {
        let g3 = make_grid(GridKind::Dyadic(3), 0.5).unwrap();
        let g2 = make_grid(GridKind::Dyadic(2), 0.5).unwrap();
        let g1 = make_grid(GridKind::Dyadic(1), 0.5).unwrap();
        let p32 = interval_projection(&g3, &g2).unwrap();
        let p21 = interval_projection(&g2, &g1).unwrap();
        let p31 = interval_projection(&g3, &g1).unwrap();
        let composed = p21.compose(&p32).unwrap();
        assert!(composed.max_abs_diff(&p31) <= tol::MATRIX_ID_EXACT);
        // embeddings compose contravariantly with the projections
        let l32 = canonical_embedding(&g2, &g3).unwrap();
        let via = p31.compose(&l32).unwrap();
        assert!(via.max_abs_diff(&p21) <= tol::MATRIX_ID_EXACT);
        let l31 = canonical_embedding(&g1, &g3).unwrap();
        let l21 = canonical_embedding(&g1, &g2).unwrap();
        let via2 = p32.compose(&l31).unwrap();
        assert!(via2.max_abs_diff(&l21) <= tol::MATRIX_ID_EXACT);
    }

    #[test]
    fn haar_level_zero_is_the_fundamental_vector() {
        let system = haar_system(0, 0.5).unwrap();
        assert_eq!(system.vectors.len(), 1);
        assert_eq!(system.vectors[0].coeffs(), &[-1.0, 1.0]);
    }

    #[test]
    fn first_projection_annihilates_the_top_interval_molecule() {
        let system = haar_system(1, 0.5).unwrap();
        assert_eq!(system.vectors.len(), 2);
        let image = system.projections[1].apply(&system.vectors[1]).unwrap();
        assert!(image.coeffs().iter().all(|c| c.abs() <= 1e-15));
    }

    #[test]
    fn haar_identities_hold_on_level_three() {
        let system = haar_system(3, 0.5).unwrap();
        assert_eq!(system.vectors.len(), 8);
        let check = system.check().unwrap();
        assert!(check.compose_err <= tol::MATRIX_ID_EXACT, "{check:?}");
        assert!(check.fix_err <= tol::MATRIX_ID_EXACT, "{check:?}");
        assert!(check.annihilate_err <= tol::MATRIX_ID_EXACT, "{check:?}");
        assert!(check.rank_err <= tol::MATRIX_ID_EXACT, "{check:?}");
    }

    #[test]
    fn haar_level_cap_is_enforced() {
        assert!(matches!(
            haar_system(5, 0.5),
            Err(crate::error::Error::Resource { .. })
        ));
    }

    #[test]
    fn haar_level_four_works_through_the_transport_oracle() {
        // 17 ambient points: beyond the enumeration cap, fine at p = 1
        let system = haar_system(4, 1.0).unwrap();
        assert_eq!(system.vectors.len(), 16);
        let check = system.check().unwrap();
        assert!(check.compose_err <= tol::MATRIX_ID_EXACT);
        let report = basis_constant(&system, &NormOptions::default()).unwrap();
        assert!(report.max_projection_norm <= 1.0 + 1e-9);
        // at p < 1 the exact oracle is capped and the resource error
        // propagates out of the norm measurement
        let system = haar_system(4, 0.5).unwrap();
        assert!(matches!(
            basis_constant(&system, &NormOptions::default()),
            Err(crate::error::Error::Resource { .. })
        ));
    }

    #[test]
    fn conditionality_table_shows_growth_at_small_p() {
        let rows = conditionality_witness(4, 0.5, &NormOptions::default()).unwrap();
        for row in &rows {
            assert!((row.plain - row.m as f64).abs() < 1e-10);
        }
        for w in rows.windows(2) {
            assert!(
                w[1].ratio > w[0].ratio + 1e-9,
                "ratio must grow: {} then {}",
                w[0].ratio,
                w[1].ratio
            );
        }
        // at p = 1 the alternating norm matches the plain norm
        let rows = conditionality_witness(4, 1.0, &NormOptions::default()).unwrap();
        for row in rows {
            assert!((row.ratio - 1.0).abs() < 1e-9);
        }
    }
}
