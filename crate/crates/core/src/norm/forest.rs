//! Exact minimization of `sum |lambda_e|^p` over decompositions of a
//! molecule into elementary molecules.
//!
//! The objective is concave in the pair flows on each orthant and coercive,
//! so some optimum is a basic solution of the divergence system; columns of
//! the elementary-molecule matrix are independent exactly when the pair set
//! is a forest, so the optimum is attained on a forest-supported flow. On a
//! tree the flow of each edge is forced: it is the net mass on the far side
//! of the edge. This module therefore minimizes over rooted spanning
//! structures with a subset dynamic program (Dreyfus–Wagner style) instead
//! of enumerating column subsets one by one; both searches visit exactly
//! the basic solutions, this one in O(3^n * n).
//!
//! A forest may use several components; each must carry (numerically) zero
//! net mass. Points whose coefficient is zero may be skipped or used as
//! junction points inside a component.

/// One edge of the optimal forest: the decomposition term is
/// `flow * (delta(child) - delta(parent))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ForestEdge {
    pub child: usize,
    pub parent: usize,
    pub flow: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct ForestSolution {
    /// `sum_e |flow_e|^p * w_p(e)`, i.e. the p-th power of the norm.
    pub cost_p: f64,
    pub edges: Vec<ForestEdge>,
}

/// Hard bound on the subset DP width.
pub const MAX_POINTS: usize = 16;

/// Minimizes `sum |t_e|^p w_p(e)` over forests whose divergence matches
/// `masses` up to `zero_tol` per component.
///
/// `w_p[i][j]` must hold `d(i,j)^p`; `p` in (0, 1].
pub(crate) fn min_forest(
    masses: &[f64],
    w_p: &[Vec<f64>],
    p: f64,
    zero_tol: f64,
) -> ForestSolution {
    let n = masses.len();
    assert!(
        n <= MAX_POINTS,
        "forest search capped at {MAX_POINTS} points"
    );
    if n == 0 {
        return ForestSolution {
            cost_p: 0.0,
            edges: Vec::new(),
        };
    }
    let full: usize = (1usize << n) - 1;

    // Subset masses and their p-th powers.
    let mut mass = vec![0.0f64; full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        mass[s] = mass[s & (s - 1)] + masses[low];
    }
    let pow_p = |x: f64| -> f64 {
        if p == 1.0 {
            x
        } else {
            x.powf(p)
        }
    };
    let mass_p: Vec<f64> = mass.iter().map(|m| pow_p(m.abs())).collect();

    // tree[s * n + v]: best cost of a tree spanning s rooted at v.
    // Choice encoding for reconstruction: LEAF, extend via u, or merge
    // with a submask containing v.
    const LEAF: i64 = 0;
    let inf = f64::INFINITY;
    let mut tree = vec![inf; (full + 1) * n];
    let mut tree_choice = vec![LEAF; (full + 1) * n];
    for v in 0..n {
        tree[(1usize << v) * n + v] = 0.0;
    }
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        for v in 0..n {
            if s & (1 << v) == 0 {
                continue;
            }
            let rest = s & !(1 << v);
            let mut best = inf;
            let mut choice = LEAF;
            // v is a leaf-root: single child subtree on `rest`.
            let edge_mass = mass_p[rest];
            let mut u_bits = rest;
            while u_bits != 0 {
                let u = u_bits.trailing_zeros() as usize;
                u_bits &= u_bits - 1;
                let c = tree[rest * n + u] + edge_mass * w_p[u][v];
                if c < best {
                    best = c;
                    choice = -((u as i64) + 1);
                }
            }
            // v has several children: split into two rooted trees sharing v.
            // Force the lowest bit of `rest` into the first part so each
            // split is visited once.
            let anchor = rest & rest.wrapping_neg();
            let mut t = rest;
            while t != 0 {
                if t & anchor != 0 && t != rest {
                    let part = t | (1 << v);
                    let other = (rest & !t) | (1 << v);
                    let c = tree[part * n + v] + tree[other * n + v];
                    if c < best {
                        best = c;
                        choice = part as i64;
                    }
                }
                t = (t - 1) & rest;
            }
            tree[s * n + v] = best;
            tree_choice[s * n + v] = choice;
        }
    }

    // Component cost: best rooted tree over a mass-balanced subset.
    let mut comp = vec![inf; full + 1];
    let mut comp_root = vec![usize::MAX; full + 1];
    for s in 1..=full {
        if mass[s].abs() > zero_tol {
            continue;
        }
        let mut best = inf;
        let mut root = usize::MAX;
        let mut v_bits = s;
        while v_bits != 0 {
            let v = v_bits.trailing_zeros() as usize;
            v_bits &= v_bits - 1;
            let c = tree[s * n + v];
            if c < best {
                best = c;
                root = v;
            }
        }
        comp[s] = best;
        comp_root[s] = root;
    }

    // Assemble components over subsets; a point may stay unused only if
    // its own coefficient is (numerically) zero.
    let mut assemble = vec![inf; full + 1];
    let mut assemble_choice = vec![0usize; full + 1]; // 0 = drop lowest point
    assemble[0] = 0.0;
    for u in 1..=full {
        let low = u & u.wrapping_neg();
        let low_idx = low.trailing_zeros() as usize;
        let mut best = inf;
        let mut choice = 0usize;
        if masses[low_idx].abs() <= zero_tol {
            best = assemble[u & !low];
        }
        // Submasks of u containing `low`.
        let rest = u & !low;
        let mut t = rest;
        loop {
            let s = t | low;
            if comp[s] < inf {
                let c = comp[s] + assemble[u & !s];
                if c < best {
                    best = c;
                    choice = s;
                }
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        assemble[u] = best;
        assemble_choice[u] = choice;
    }

    // Reconstruction.
    let mut edges = Vec::new();
    let mut u = full;
    while u != 0 {
        let s = assemble_choice[u];
        if s == 0 {
            u &= u - 1; // drop the lowest (zero-mass) point
            continue;
        }
        collect_edges(s, comp_root[s], n, &tree_choice, &mass, &mut edges);
        u &= !s;
    }
    edges.retain(|e| e.flow != 0.0);

    ForestSolution {
        cost_p: assemble[full],
        edges,
    }
}

fn collect_edges(
    s: usize,
    v: usize,
    n: usize,
    tree_choice: &[i64],
    mass: &[f64],
    edges: &mut Vec<ForestEdge>,
) {
    let choice = tree_choice[s * n + v];
    if choice == 0 {
        return; // single point
    }
    if choice < 0 {
        let u = (-choice - 1) as usize;
        let rest = s & !(1 << v);
        edges.push(ForestEdge {
            child: u,
            parent: v,
            flow: mass[rest],
        });
        collect_edges(rest, u, n, tree_choice, mass, edges);
    } else {
        let part = choice as usize;
        let other = (s & !part) | (1 << v);
        collect_edges(part, v, n, tree_choice, mass, edges);
        collect_edges(other, v, n, tree_choice, mass, edges);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(pts: &[f64], p: f64) -> Vec<Vec<f64>> {
        let n = pts.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            (pts[i] - pts[j]).abs().powf(p)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn check_divergence(masses: &[f64], sol: &ForestSolution, tol: f64) {
        let mut div = vec![0.0; masses.len()];
        for e in &sol.edges {
            div[e.child] += e.flow;
            div[e.parent] -= e.flow;
        }
        for (d, m) in div.iter().zip(masses) {
            assert!((d - m).abs() <= tol, "divergence {d} vs mass {m}");
        }
    }

    #[test]
    fn single_edge_beats_unit_steps_for_p_below_one() {
        // delta(m) - delta(0) on the integer segment: the straight edge has
        // cost m^p while the chain of unit steps costs m; the p-th power of
        // the optimum is m^p, so the norm is exactly m.
        let pts: Vec<f64> = (0..=5).map(|i| i as f64).collect();
        let p = 0.5;
        let mut masses = vec![0.0; 6];
        masses[0] = -1.0;
        masses[5] = 1.0;
        let sol = min_forest(&masses, &weights(&pts, p), p, 1e-12);
        assert!((sol.cost_p - 5f64.powf(p)).abs() < 1e-12);
        assert_eq!(sol.edges.len(), 1);
        check_divergence(&masses, &sol, 1e-12);
    }

    #[test]
    fn p_one_matches_cumulative_mass_on_the_line() {
        let pts = [0.0, 1.0, 2.5, 4.0];
        let masses = [0.75, -1.5, 0.5, 0.25];
        let sol = min_forest(&masses, &weights(&pts, 1.0), 1.0, 1e-12);
        let mut acc = 0.0;
        let mut expect = 0.0;
        for i in 0..3 {
            acc += masses[i];
            expect += acc.abs() * (pts[i + 1] - pts[i]);
        }
        assert!((sol.cost_p - expect).abs() < 1e-12);
        check_divergence(&masses, &sol, 1e-12);
    }

    #[test]
    fn disjoint_pairs_split_into_components() {
        // Two far-apart balanced pairs: the optimal forest keeps them in
        // separate components, cost 1^p * 1 + 1^p * 1.
        let pts = [0.0, 1.0, 100.0, 101.0];
        let masses = [-1.0, 1.0, -1.0, 1.0];
        let p = 0.5;
        let sol = min_forest(&masses, &weights(&pts, p), p, 1e-12);
        assert!((sol.cost_p - 2.0).abs() < 1e-12);
        assert_eq!(sol.edges.len(), 2);
        check_divergence(&masses, &sol, 1e-12);
    }

    #[test]
    fn junction_points_with_zero_mass_are_used_when_cheaper() {
        // Hub-and-spokes p-metric (distances through a zero-mass hub are
        // p-triangle tight): three unit sources on short spokes, one sink of
        // mass 3 on a long spoke. Gathering the three units at the hub uses
        // three cheap edges plus one shared long edge and beats both the
        // direct matching and gathering at a source. Index 0 is the hub.
        let p = 0.5;
        let spoke = [0.0f64, 0.1, 0.1, 0.1, 10.0];
        let n = 5;
        let mut w_p = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w_p[i][j] = if i == 0 || j == 0 {
                        spoke[i.max(j)].powf(p)
                    } else {
                        spoke[i].powf(p) + spoke[j].powf(p)
                    };
                }
            }
        }
        let masses = [0.0, 1.0, 1.0, 1.0, -3.0];
        let sol = min_forest(&masses, &w_p, p, 1e-12);
        let via_hub = 3.0 * 0.1f64.powf(p) + 3f64.powf(p) * 10f64.powf(p);
        let gather_at_source =
            2.0 * (2.0 * 0.1f64.powf(p)) + 3f64.powf(p) * (0.1f64.powf(p) + 10f64.powf(p));
        let direct = 3.0 * (0.1f64.powf(p) + 10f64.powf(p));
        assert!(via_hub < gather_at_source && via_hub < direct);
        assert!((sol.cost_p - via_hub).abs() < 1e-12, "{}", sol.cost_p);
        check_divergence(&masses, &sol, 1e-12);
        assert!(sol.edges.iter().any(|e| e.child == 0 || e.parent == 0));
    }

    #[test]
    fn zero_molecule_costs_nothing() {
        let pts = [0.0, 1.0, 2.0];
        let masses = [0.0, 0.0, 0.0];
        let sol = min_forest(&masses, &weights(&pts, 0.5), 0.5, 1e-12);
        assert_eq!(sol.cost_p, 0.0);
        assert!(sol.edges.is_empty());
    }
}
