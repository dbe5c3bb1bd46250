//! Seeded generators for valid p-metric spaces, molecules, and retractions.
//!
//! All randomness flows through ChaCha8 with caller-fixed seeds, so suites
//! and golden files are reproducible across platforms.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::molecule::Molecule;
use crate::space::PMetricSpace;

/// Families of random valid spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// Points on the line with Euclidean distance (a metric, hence a
    /// p-metric for every p <= 1).
    Line,
    /// Random symmetric matrix repaired to a metric by shortest paths.
    RepairedMetric,
    /// A repaired metric raised to the power 1/p: a genuine p-metric that
    /// usually violates the ordinary triangle inequality.
    Snowflaked,
    /// Path-maximum ultrametric.
    Ultrametric,
    /// Tight clusters far apart (every cluster sits inside a small ball).
    Clustered,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid space with `n` points and exponent `p`.
pub fn random_space(seed: u64, n: usize, p: f64, kind: SpaceKind) -> PMetricSpace {
    let mut rng = rng(seed);
    let dist = match kind {
        SpaceKind::Line => {
            let mut pts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // enforce separation so distances stay positive
            for i in 1..n {
                let lo = pts[i - 1] + 0.05;
                if pts[i] < lo {
                    pts[i] = lo;
                }
            }
            from_points(&pts)
        }
        SpaceKind::RepairedMetric => repaired(&mut rng, n),
        SpaceKind::Snowflaked => {
            let mut dist = repaired(&mut rng, n);
            for row in &mut dist {
                for v in row.iter_mut() {
                    *v = v.powf(1.0 / p);
                }
            }
            dist
        }
        SpaceKind::Ultrametric => {
            // Path-maximum over a random chain of merge heights.
            let heights: Vec<f64> = (0..n.saturating_sub(1))
                .map(|_| rng.gen_range(0.5..2.0))
                .collect();
            let mut dist = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let h = heights[i..j].iter().cloned().fold(0.0f64, f64::max);
                    dist[i][j] = h;
                    dist[j][i] = h;
                }
            }
            dist
        }
        SpaceKind::Clustered => {
            let clusters = (n / 3).max(1);
            let mut pts = Vec::with_capacity(n);
            for i in 0..n {
                let c = i % clusters;
                pts.push(20.0 * c as f64 + rng.gen_range(0.0..0.4) + 0.05 * (i / clusters) as f64);
            }
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for i in 1..n {
                let lo = pts[i - 1] + 0.01;
                if pts[i] < lo {
                    pts[i] = lo;
                }
            }
            from_points(&pts)
        }
    };
    PMetricSpace::with_default_labels(dist, p)
        .expect("generated space must satisfy the p-metric axioms")
}

fn from_points(pts: &[f64]) -> Vec<Vec<f64>> {
    let n = pts.len();
    (0..n)
        .map(|i| (0..n).map(|j| (pts[i] - pts[j]).abs()).collect())
        .collect()
}

fn repaired(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.gen_range(0.5..2.0);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    // Floyd-Warshall repair: the shortest-path metric of positive weights.
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let t = dist[i][k] + dist[k][j];
                if t < dist[i][j] {
                    dist[i][j] = t;
                }
            }
        }
    }
    dist
}

/// A random balanced molecule with coefficients in `[-1, 1]`.
pub fn random_molecule(seed: u64, space: &Arc<PMetricSpace>) -> Result<Molecule> {
    let mut rng = rng(seed);
    let n = space.n();
    let mut coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = coeffs.iter().sum::<f64>() / n as f64;
    for c in &mut coeffs {
        *c -= mean;
    }
    // kill the float residue so the balance is exact where possible
    let residue: f64 = coeffs.iter().sum();
    coeffs[0] -= residue;
    Molecule::new(space.clone(), coeffs)
}

/// A random idempotent base-preserving point map: picks an image set
/// containing 0 and sends every other point to a random image point.
pub fn random_retraction(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = rng(seed);
    let keep: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.5)).collect();
    let mut image = vec![0usize];
    image.extend(keep);
    (0..n)
        .map(|x| {
            if image.contains(&x) {
                x
            } else {
                image[rng.gen_range(0..image.len())]
            }
        })
        .collect()
}

/// The retraction onto a subset sending every point to its nearest point
/// of the subset (ties to the lowest index).
pub fn nearest_point_retraction(space: &PMetricSpace, subset: &[usize]) -> Vec<usize> {
    (0..space.n())
        .map(|x| {
            if subset.contains(&x) {
                x
            } else {
                *subset
                    .iter()
                    .min_by(|&&a, &&b| {
                        space
                            .dist(x, a)
                            .partial_cmp(&space.dist(x, b))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .expect("nonempty subset")
            }
        })
        .collect()
}

/// Random coefficient vector with entries in `[-1, 1] \ (-eps, eps)`.
pub fn random_coeffs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let v: f64 = rng.gen_range(-1.0..1.0);
            if v.abs() < 0.05 {
                0.05f64.copysign(v)
            } else {
                v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_kinds_produce_valid_spaces_over_many_seeds() {
        for kind in [
            SpaceKind::Line,
            SpaceKind::RepairedMetric,
            SpaceKind::Snowflaked,
            SpaceKind::Ultrametric,
            SpaceKind::Clustered,
        ] {
            for seed in 0..25 {
                for &p in &[1.0, 0.5] {
                    let s = random_space(seed, 6, p, kind);
                    assert!(s.validate().ok, "{kind:?} seed {seed} p {p}");
                }
            }
        }
    }

    #[test]
    fn retraction_is_idempotent_and_base_preserving() {
        for seed in 0..50 {
            let r = random_retraction(seed, 7);
            assert_eq!(r[0], 0);
            for x in 0..7 {
                assert_eq!(r[r[x]], r[x]);
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_space(42, 6, 0.5, SpaceKind::Snowflaked);
        let b = random_space(42, 6, 0.5, SpaceKind::Snowflaked);
        assert_eq!(a, b);
    }
}
