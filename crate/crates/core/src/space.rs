//! Finite pointed p-metric spaces and the space-level constructions:
//! snowflakes, p-sums glued at the base point, metric quotients, the
//! shortest-path metric envelope, and grids on the line.
//!
//! A `(M, d, 0)` here is a finite point set with index 0 as base point, a
//! symmetric positive off-diagonal distance matrix, and an exponent
//! `p in (0, 1]` for which `d^p` satisfies the triangle inequality.
//! Constructions re-validate their outputs instead of trusting theory:
//! that catches both implementation bugs and float drift.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A finite pointed p-metric space.
///
/// Invariants (enforced by [`PMetricSpace::new`] and re-checked by
/// [`PMetricSpace::validate`]):
/// - `dist` is square, zero on the diagonal, symmetric, positive elsewhere;
/// - `dist[i][j]^p <= dist[i][k]^p + dist[k][j]^p` for all triples, within
///   [`tol::TRIANGLE_ABS`];
/// - index 0 is the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
    p: f64,
}

/// One violated axiom found by validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension {
        rows: usize,
        expected: usize,
    },
    ExponentOutOfRange {
        p: f64,
    },
    Diagonal {
        i: usize,
    },
    Symmetry {
        i: usize,
        j: usize,
    },
    NonPositive {
        i: usize,
        j: usize,
    },
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        excess: f64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Dimension { rows, expected } => {
                write!(f, "distance matrix has {rows} rows, expected {expected}")
            }
            Violation::ExponentOutOfRange { p } => write!(f, "exponent {p} outside (0, 1]"),
            Violation::Diagonal { i } => write!(f, "nonzero diagonal entry at {i}"),
            Violation::Symmetry { i, j } => write!(f, "dist({i},{j}) != dist({j},{i})"),
            Violation::NonPositive { i, j } => write!(f, "dist({i},{j}) not positive"),
            Violation::Triangle { i, j, k, excess } => write!(
                f,
                "p-triangle violated for ({i},{j}) through {k}, excess {excess:.3e}"
            ),
        }
    }
}

/// Outcome of checking every p-metric axiom on a candidate space.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            let mut msg = format!("{} violated axiom(s):", self.violations.len());
            for v in self.violations.iter().take(8) {
                msg.push_str(&format!(" [{v}]"));
            }
            Err(Error::Structural(msg))
        }
    }
}

/// Separation, diameter, and per-point isolation radii of a finite space.
#[derive(Debug, Clone, Serialize)]
pub struct SpaceStats {
    pub separation: f64,
    pub diameter: f64,
    /// `(index, isolation radius d(i, M \ {i}))` for every point; in a
    /// finite space with positive off-diagonal distances every point is
    /// isolated.
    pub isolated: Vec<(usize, f64)>,
}

impl PMetricSpace {
    /// Builds a space and validates every axiom.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>, p: f64) -> Result<Self> {
        let space = PMetricSpace { labels, dist, p };
        space.validate().into_result()?;
        Ok(space)
    }

    /// Builds a space with numeric labels `"0".."n-1"`.
    pub fn with_default_labels(dist: Vec<Vec<f64>>, p: f64) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(labels, dist, p)
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    /// `d(i, j)^p`, the quantity the triangle law constrains.
    pub fn dist_p(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.dist[i][j].powf(self.p)
        }
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Distance from a point to a nonempty subset.
    pub fn dist_to_set(&self, i: usize, set: &[usize]) -> f64 {
        set.iter()
            .map(|&j| self.dist(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks every axiom and reports all violating entries and triples.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.dist.len();
        if n == 0 {
            violations.push(Violation::Dimension {
                rows: 0,
                expected: 1,
            });
            return ValidationReport::from_violations(violations);
        }
        if self.labels.len() != n {
            violations.push(Violation::Dimension {
                rows: self.labels.len(),
                expected: n,
            });
        }
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != n {
                violations.push(Violation::Dimension {
                    rows: row.len(),
                    expected: n,
                });
                return ValidationReport::from_violations(violations);
            }
            if row[i] != 0.0 {
                violations.push(Violation::Diagonal { i });
            }
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            violations.push(Violation::ExponentOutOfRange { p: self.p });
            return ValidationReport::from_violations(violations);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.dist[i][j] != self.dist[j][i] {
                    violations.push(Violation::Symmetry { i, j });
                }
                if !(self.dist[i][j] > 0.0) || !self.dist[i][j].is_finite() {
                    violations.push(Violation::NonPositive { i, j });
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport::from_violations(violations);
        }
        // p-triangle law on all ordered triples with distinct endpoints.
        let dp: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.dist_p(i, j)).collect())
            .collect();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let excess = dp[i][j] - dp[i][k] - dp[k][j];
                    if excess > tol::TRIANGLE_ABS {
                        violations.push(Violation::Triangle { i, j, k, excess });
                    }
                }
            }
        }
        ValidationReport::from_violations(violations)
    }

    pub fn stats(&self) -> SpaceStats {
        let n = self.n();
        let mut separation = f64::INFINITY;
        let mut diameter: f64 = 0.0;
        let mut isolated = Vec::with_capacity(n);
        for i in 0..n {
            let mut radius = f64::INFINITY;
            for j in 0..n {
                if i == j {
                    continue;
                }
                radius = radius.min(self.dist(i, j));
            }
            for j in (i + 1)..n {
                separation = separation.min(self.dist(i, j));
                diameter = diameter.max(self.dist(i, j));
            }
            isolated.push((i, if n > 1 { radius } else { f64::INFINITY }));
        }
        SpaceStats {
            separation,
            diameter,
            isolated,
        }
    }

    /// Returns the same point set with all distances scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<PMetricSpace> {
        if !(c > 0.0) {
            return Err(Error::structural("scale factor must be positive"));
        }
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d * c).collect())
            .collect();
        PMetricSpace::new(self.labels.clone(), dist, self.p)
    }

    /// Restriction to a subset of points; `subset[0]` becomes the new base.
    pub fn restrict(&self, subset: &[usize]) -> Result<PMetricSpace> {
        if subset.is_empty() {
            return Err(Error::structural("restriction to empty subset"));
        }
        let labels = subset.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.dist(i, j)).collect())
            .collect();
        PMetricSpace::new(labels, dist, self.p)
    }

    pub fn into_arc(self) -> Arc<PMetricSpace> {
        Arc::new(self)
    }
}

/// Raises all distances to the power `r > 0` and revalidates at exponent
/// `new_p`.
///
/// `r < 1` flattens the space (a metric stays a metric); `r > 1` sharpens
/// it and is how genuinely non-convex p-metric instances are produced from
/// metric ones (`d^(1/p)` at exponent `p`). The round trip `r` then `1/r`
/// recovers the original matrix up to float drift.
pub fn snowflake(space: &PMetricSpace, r: f64, new_p: f64) -> Result<PMetricSpace> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::structural(format!(
            "snowflake exponent must be positive, got {r}"
        )));
    }
    let n = space.n();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i][j] = space.dist(i, j).powf(r);
            }
        }
    }
    PMetricSpace::new(space.labels().to_vec(), dist, new_p)
}

/// How [`p_sum`] combines its parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Glue the parts at a single shared base point; cross-part distance
    /// `(d^p(x,0) + d^p(y,0))^(1/p)`.
    Maltese,
    /// Full product restricted to finitely many tuples, with distance
    /// `(sum_a d_a^p(x_a, y_a))^(1/p)`. The product size is capped.
    FullPSum { cap: usize },
}

/// Default cap on the full p-sum product size.
pub const FULL_P_SUM_CAP: usize = 10_000;

/// A p-sum together with the isometric copy of each part.
#[derive(Debug, Clone)]
pub struct PSum {
    pub space: PMetricSpace,
    /// `part_maps[a][local_index] = index in the sum`. Each map is an
    /// isometry of the part onto its copy; local index 0 maps to base 0.
    pub part_maps: Vec<Vec<usize>>,
}

/// Combines pointed p-metric spaces sharing the same exponent.
pub fn p_sum(parts: &[PMetricSpace], mode: SumMode) -> Result<PSum> {
    if parts.is_empty() {
        return Err(Error::structural("p-sum of zero parts"));
    }
    let p = parts[0].p();
    for (a, part) in parts.iter().enumerate() {
        if part.p() != p {
            return Err(Error::Structural(format!(
                "mixed exponents in p-sum: part 0 has p={p}, part {a} has p={}",
                part.p()
            )));
        }
    }
    match mode {
        SumMode::Maltese => maltese_sum(parts, p),
        SumMode::FullPSum { cap } => full_p_sum(parts, p, cap),
    }
}

fn maltese_sum(parts: &[PMetricSpace], p: f64) -> Result<PSum> {
    let mut labels = vec!["0".to_string()];
    let mut origin: Vec<(usize, usize)> = vec![(usize::MAX, 0)]; // (part, local)
    let mut part_maps = Vec::with_capacity(parts.len());
    for (a, part) in parts.iter().enumerate() {
        let mut map = vec![0usize; part.n()];
        for local in 1..part.n() {
            map[local] = labels.len();
            labels.push(format!("{a}:{}", part.label(local)));
            origin.push((a, local));
        }
        part_maps.push(map);
    }
    let n = labels.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 1..n {
        let (ai, xi) = origin[i];
        dist[i][0] = parts[ai].dist(xi, 0);
        dist[0][i] = dist[i][0];
        for j in (i + 1)..n {
            let (aj, xj) = origin[j];
            let d = if ai == aj {
                parts[ai].dist(xi, xj)
            } else {
                (parts[ai].dist_p(xi, 0) + parts[aj].dist_p(xj, 0)).powf(1.0 / p)
            };
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let space = PMetricSpace::new(labels, dist, p)?;
    Ok(PSum { space, part_maps })
}

fn full_p_sum(parts: &[PMetricSpace], p: f64, cap: usize) -> Result<PSum> {
    let mut size: usize = 1;
    for part in parts {
        size = size
            .checked_mul(part.n())
            .ok_or_else(|| Error::resource("full p-sum product size overflows"))?;
        if size > cap {
            return Err(Error::resource(format!(
                "full p-sum product has more than {cap} points"
            )));
        }
    }
    // Enumerate tuples in mixed-radix order, last part fastest.
    let mut tuples: Vec<Vec<usize>> = Vec::with_capacity(size);
    let mut current = vec![0usize; parts.len()];
    loop {
        tuples.push(current.clone());
        let mut k = parts.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            current[k] += 1;
            if current[k] < parts[k].n() {
                break;
            }
            current[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }
    debug_assert_eq!(tuples.len(), size);
    let labels: Vec<String> = tuples
        .iter()
        .map(|t| {
            let parts_str: Vec<String> = t
                .iter()
                .enumerate()
                .map(|(a, &x)| parts[a].label(x).to_string())
                .collect();
            format!("({})", parts_str.join(","))
        })
        .collect();
    let mut dist = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in (i + 1)..size {
            // tuples differing in one coordinate keep the part distance
            // exactly (no power round trip)
            let mut acc = 0.0;
            let mut only: Option<(usize, usize, usize)> = Some((usize::MAX, 0, 0));
            for (a, part) in parts.iter().enumerate() {
                let (x, y) = (tuples[i][a], tuples[j][a]);
                if x != y {
                    acc += part.dist_p(x, y);
                    only = match only {
                        Some((usize::MAX, _, _)) => Some((a, x, y)),
                        _ => None,
                    };
                }
            }
            let d = match only {
                Some((a, x, y)) if a != usize::MAX => parts[a].dist(x, y),
                _ => acc.powf(1.0 / p),
            };
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    // The copy of part a varies coordinate a and keeps the others at base.
    let mut part_maps = Vec::with_capacity(parts.len());
    let mut stride = vec![1usize; parts.len()];
    for a in (0..parts.len().saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * parts[a + 1].n();
    }
    for (a, part) in parts.iter().enumerate() {
        part_maps.push((0..part.n()).map(|x| x * stride[a]).collect());
    }
    let space = PMetricSpace::new(labels, dist, p)?;
    Ok(PSum { space, part_maps })
}

/// A metric quotient together with the point map from the original space.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub space: PMetricSpace,
    /// `map[old_index] = new_index`; every collapsed point maps to 0.
    pub map: Vec<usize>,
}

/// Collapses a subset `N` (which must contain the base point) to the base,
/// with quotient distance `min{ d(x,y), (d^p(x,N) + d^p(y,N))^(1/p) }`.
pub fn quotient(space: &PMetricSpace, collapsed: &[usize]) -> Result<Quotient> {
    if collapsed.is_empty() {
        return Err(Error::structural("quotient by empty subset"));
    }
    if !collapsed.contains(&0) {
        return Err(Error::structural(
            "quotient subset must contain the base point 0",
        ));
    }
    let n = space.n();
    let mut in_n = vec![false; n];
    for &i in collapsed {
        if i >= n {
            return Err(Error::Structural(format!(
                "quotient subset index {i} out of range"
            )));
        }
        in_n[i] = true;
    }
    let subset: Vec<usize> = (0..n).filter(|&i| in_n[i]).collect();

    let mut map = vec![0usize; n];
    let mut survivors = vec![0usize]; // new index -> old index, base stays 0
    for i in 1..n {
        if !in_n[i] {
            map[i] = survivors.len();
            survivors.push(i);
        }
    }
    let m = survivors.len();
    let p = space.p();
    // d^p(x, N) for every original point.
    let dpn: Vec<f64> = (0..n)
        .map(|i| {
            if in_n[i] {
                0.0
            } else {
                space.dist_to_set(i, &subset).powf(p)
            }
        })
        .collect();
    let mut labels = vec!["0".to_string()];
    labels.extend(survivors[1..].iter().map(|&i| space.label(i).to_string()));
    let mut dist = vec![vec![0.0; m]; m];
    for a in 1..m {
        let x = survivors[a];
        dist[a][0] = dpn[x].powf(1.0 / p);
        dist[0][a] = dist[a][0];
        for b in (a + 1)..m {
            let y = survivors[b];
            let through = (dpn[x] + dpn[y]).powf(1.0 / p);
            let d = space.dist(x, y).min(through);
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    // Verified rather than trusted: the construction is supposed to satisfy
    // the p-triangle law by itself.
    let space = PMetricSpace::new(labels, dist, p)?;
    Ok(Quotient { space, map })
}

/// Largest metric dominated by the given distances: the all-pairs
/// shortest-path metric, returned with exponent 1.
pub fn metric_envelope(space: &PMetricSpace) -> Result<PMetricSpace> {
    let n = space.n();
    let mut dist: Vec<Vec<f64>> = space.matrix().to_vec();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = dist[i][k] + dist[k][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    PMetricSpace::new(space.labels().to_vec(), dist, 1.0)
}

/// Which grid on the line to build.
#[derive(Debug, Clone)]
pub enum GridKind {
    /// `{0, 1, ..., m}` with Euclidean distance.
    IntegerSegment(usize),
    /// `{i * 2^-n : 0 <= i <= 2^n}`.
    Dyadic(u32),
    /// Arbitrary points of `[0, 1]`; must contain 0 and 1.
    Custom(Vec<f64>),
}

/// A grid space paired with its underlying coordinates.
#[derive(Debug, Clone)]
pub struct Grid {
    pub space: Arc<PMetricSpace>,
    /// Strictly increasing; `points[0]` is the base point.
    pub points: Vec<f64>,
}

/// Builds a grid on the line with Euclidean distance; the Euclidean line
/// satisfies the p-triangle law for every `p <= 1`.
pub fn make_grid(kind: GridKind, p: f64) -> Result<Grid> {
    let points: Vec<f64> = match kind {
        GridKind::IntegerSegment(m) => {
            if m < 1 {
                return Err(Error::structural("integer segment needs m >= 1"));
            }
            (0..=m).map(|i| i as f64).collect()
        }
        GridKind::Dyadic(level) => {
            if level > 20 {
                return Err(Error::resource("dyadic level too deep"));
            }
            let steps = 1usize << level;
            (0..=steps).map(|i| i as f64 / steps as f64).collect()
        }
        GridKind::Custom(mut pts) => {
            pts.sort_by(|a, b| a.partial_cmp(b).expect("grid points must be ordered"));
            for w in pts.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Structural(format!("duplicate grid point {}", w[0])));
                }
            }
            if pts.first() != Some(&0.0) || pts.last() != Some(&1.0) {
                return Err(Error::structural("custom grid must contain 0 and 1"));
            }
            pts
        }
    };
    let n = points.len();
    let labels = points.iter().map(|x| format!("{x}")).collect();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = (points[i] - points[j]).abs();
        }
    }
    let space = PMetricSpace::new(labels, dist, p)?.into_arc();
    Ok(Grid { space, points })
}

impl Grid {
    /// Index of a coordinate value, by exact float equality (grid
    /// coordinates are dyadic or caller-supplied and compare exactly).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.points.iter().position(|&v| v == x)
    }
}
