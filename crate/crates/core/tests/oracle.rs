//! Independent oracle for the decomposition norm, deliberately written
//! with a different algorithm shape than the library: enumerate every
//! pair subset of size below the point count, keep the forests (checked
//! by union-find), read the forced flows off each tree by leaf peeling,
//! and take the cheapest balanced decomposition. Slow and only usable for
//! tiny spaces, which is exactly what makes it a trustworthy referee.

use std::sync::Arc;

use lipfree::gen::{self, SpaceKind};
use lipfree::norm::{self, Method, NormOptions};
use lipfree::space::PMetricSpace;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Cost of the unique flow on a forest matching `masses`, or None when
/// some component is unbalanced.
fn forest_cost(
    n: usize,
    edges: &[(usize, usize)],
    masses: &[f64],
    dist: &dyn Fn(usize, usize) -> f64,
    p: f64,
    zero_tol: f64,
) -> Option<f64> {
    let mut degree = vec![0usize; n];
    let mut adjacency = vec![Vec::new(); n];
    for (idx, &(a, b)) in edges.iter().enumerate() {
        degree[a] += 1;
        degree[b] += 1;
        adjacency[a].push((b, idx));
        adjacency[b].push((a, idx));
    }
    let mut residual = masses.to_vec();
    let mut alive = vec![true; edges.len()];
    let mut cost = 0.0f64;
    // peel leaves until no edges remain
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let &(u, idx) = adjacency[v]
            .iter()
            .find(|&&(_, idx)| alive[idx])
            .expect("leaf has one live edge");
        alive[idx] = false;
        degree[v] -= 1;
        degree[u] -= 1;
        // the leaf's whole residual crosses its only edge
        cost += residual[v].abs().powf(p) * dist(v, u).powf(p);
        residual[u] += residual[v];
        residual[v] = 0.0;
        if degree[u] == 1 {
            stack.push(u);
        }
    }
    // every point must now be settled
    if residual.iter().any(|r| r.abs() > zero_tol) {
        return None;
    }
    Some(cost)
}

/// Minimum over all pair subsets that form forests.
fn naive_norm(space: &PMetricSpace, masses: &[f64]) -> f64 {
    let n = space.n();
    let p = space.p();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let scale: f64 = masses.iter().map(|m| m.abs()).sum();
    let zero_tol = 1e-11 * scale + 1e-12;
    let dist = |a: usize, b: usize| space.dist(a, b);
    let mut best = f64::INFINITY;
    // subsets by bitmask over at most 21 pairs (7 points)
    assert!(pairs.len() <= 21, "naive oracle needs a tiny space");
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() as usize >= n {
            continue;
        }
        let chosen: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| pairs[i])
            .collect();
        let mut uf = UnionFind::new(n);
        if !chosen.iter().all(|&(a, b)| uf.union(a, b)) {
            continue; // cycle
        }
        if let Some(cost) = forest_cost(n, &chosen, masses, &dist, p, zero_tol) {
            best = best.min(cost);
        }
    }
    best.powf(1.0 / p)
}

#[test]
fn enumeration_norm_matches_the_naive_forest_referee() {
    let kinds = [
        SpaceKind::Line,
        SpaceKind::RepairedMetric,
        SpaceKind::Snowflaked,
        SpaceKind::Ultrametric,
        SpaceKind::Clustered,
    ];
    let mut checked = 0usize;
    for seed in 0..60u64 {
        for &p in &[0.4, 0.5, 2.0 / 3.0, 1.0] {
            let n = 3 + (seed as usize % 4);
            let kind = kinds[seed as usize % kinds.len()];
            let space = Arc::new(gen::random_space(seed, n, p, kind));
            let mu = gen::random_molecule(seed.wrapping_mul(31) ^ 0x0c, &space).unwrap();
            let fast = norm::norm_with(&mu, Method::Enumerate, &NormOptions::default())
                .unwrap()
                .value;
            let slow = naive_norm(&space, mu.coeffs());
            assert!(
                (fast - slow).abs() <= 1e-10 * slow.max(1.0),
                "seed {seed}, p {p}, kind {kind:?}: fast {fast:.15e} vs naive {slow:.15e}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 240);
}

#[test]
fn referee_confirms_the_frozen_alternating_value() {
    // the m = 6 alternating molecule still fits the naive oracle
    let grid = lipfree::make_grid(lipfree::GridKind::IntegerSegment(6), 0.5).unwrap();
    let mut coeffs = vec![0.0f64; 7];
    for k in 1..=6usize {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[k] += s;
        coeffs[k - 1] -= s;
    }
    let slow = naive_norm(&grid.space, &coeffs);
    assert!((slow - 36.0).abs() < 1e-10, "{slow}");
}
