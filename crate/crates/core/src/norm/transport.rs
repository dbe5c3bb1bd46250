//! Uncapacitated min-cost transshipment on the complete graph, solved by a
//! network simplex with Bland's pivoting rule.
//!
//! This is the flow form of the p = 1 free-space norm: minimize
//! `sum |f_xy| d(x,y)` over signed pair flows with divergence equal to the
//! molecule. The optimal basis also yields node potentials, which after a
//! sign flip are a feasible point of the inequality form
//! (`|f(x) - f(y)| <= d(x,y)`, `f(0) = 0`) with matching objective; the
//! equality of the two objectives certifies optimality of both.

use crate::error::{Error, Result};

pub(crate) struct Transport {
    /// Optimal cost `sum flow * dist`.
    pub cost: f64,
    /// Directed arcs `(from, to, flow)` with positive flow; the molecule
    /// decomposes as `sum flow * (delta(from) - delta(to))`.
    pub flows: Vec<(usize, usize, f64)>,
    /// Values of an optimal inequality-form solution: `pot[0] = 0`,
    /// `|pot[i] - pot[j]| <= d(i,j)`, and `sum supply[i] * pot[i] = cost`
    /// up to rounding.
    pub potentials: Vec<f64>,
}

const MAX_PIVOTS: usize = 200_000;

/// Solves the transshipment problem with supplies `supply` (summing to
/// zero up to molecule tolerance) and symmetric positive costs `dist`.
pub(crate) fn solve(
    dist: &dyn Fn(usize, usize) -> f64,
    n: usize,
    supply: &[f64],
) -> Result<Transport> {
    if n == 0 {
        return Err(Error::internal("transport on empty space"));
    }
    if n == 1 {
        return Ok(Transport {
            cost: 0.0,
            flows: Vec::new(),
            potentials: vec![0.0],
        });
    }

    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            scale = scale.max(dist(i, j));
        }
    }
    let opt_tol = 1e-12 * scale.max(1.0);

    // Spanning tree state rooted at 0: each non-root node has a tree edge
    // to its parent, oriented `up` (node -> parent) or down, carrying a
    // nonnegative flow.
    let mut parent = vec![0usize; n];
    let mut up = vec![false; n];
    let mut flow = vec![0.0f64; n];
    for v in 1..n {
        if supply[v] >= 0.0 {
            up[v] = true;
            flow[v] = supply[v];
        } else {
            up[v] = false;
            flow[v] = -supply[v];
        }
    }

    let mut pi = vec![0.0f64; n];
    let mut depth = vec![0usize; n];
    rebuild_potentials(dist, n, &parent, &up, &mut pi, &mut depth)?;

    let mut pivots = 0usize;
    loop {
        // Bland: first arc (lexicographic) with negative reduced cost.
        let mut entering: Option<(usize, usize)> = None;
        'scan: for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let tree_arc = (parent[i] == j && up[i]) || (parent[j] == i && !up[j]);
                if tree_arc {
                    continue;
                }
                if dist(i, j) + pi[i] - pi[j] < -opt_tol {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(arc) => arc,
            None => break,
        };

        // The cycle is the entering arc i->j plus the tree path j..i.
        // Pushing theta units i->j raises flow on path arcs aligned with
        // the travel direction and lowers it on the others.
        let mut a = ei;
        let mut b = ej;
        let mut side_i = Vec::new(); // nodes on the i-side path (travel parent -> node)
        let mut side_j = Vec::new(); // nodes on the j-side path (travel node -> parent)
        while depth[a] > depth[b] {
            side_i.push(a);
            a = parent[a];
        }
        while depth[b] > depth[a] {
            side_j.push(b);
            b = parent[b];
        }
        while a != b {
            side_i.push(a);
            a = parent[a];
            side_j.push(b);
            b = parent[b];
        }

        // theta is blocked by arcs whose flow decreases; ties go to the
        // lowest node index (anti-cycling).
        let mut theta = f64::INFINITY;
        let mut leaving: Option<usize> = None;
        let consider = |v: usize, theta: &mut f64, leaving: &mut Option<usize>| {
            if flow[v] < *theta || (flow[v] == *theta && Some(v) < *leaving) {
                *theta = flow[v];
                *leaving = Some(v);
            }
        };
        for &v in &side_j {
            // travel v -> parent(v); arc aligned iff it points up
            if !up[v] {
                consider(v, &mut theta, &mut leaving);
            }
        }
        for &v in &side_i {
            // travel parent(v) -> v; arc aligned iff it points down
            if up[v] {
                consider(v, &mut theta, &mut leaving);
            }
        }
        let leaving = leaving.ok_or_else(|| {
            Error::internal("unbounded transport pivot; costs should be positive")
        })?;

        for &v in &side_j {
            if !up[v] {
                flow[v] -= theta;
            } else {
                flow[v] += theta;
            }
        }
        for &v in &side_i {
            if up[v] {
                flow[v] -= theta;
            } else {
                flow[v] += theta;
            }
        }

        // Swap the leaving edge for the entering arc by reversing the
        // parent chain from the entering endpoint down to the leaving node.
        let (attach, other, entering_up, mut carry) = if side_i.contains(&leaving) {
            // leaving edge is on the i side; i's component reattaches at i,
            // whose new parent is j, arc i -> j.
            (ei, ej, true, theta)
        } else {
            // leaving edge on the j side; arc i -> j points into j, so the
            // reattached component hangs below j with a downward arc.
            (ej, ei, false, theta)
        };
        let mut chain = Vec::new();
        {
            let mut v = attach;
            while v != leaving {
                chain.push(v);
                v = parent[v];
            }
            chain.push(leaving);
        }
        let mut prev = other;
        let mut prev_up = entering_up;
        for &v in &chain {
            let old_up = up[v];
            let old_flow = flow[v];
            parent[v] = prev;
            up[v] = prev_up;
            flow[v] = carry;
            carry = old_flow;
            prev = v;
            // Reversing an edge flips its orientation relative to the new
            // child.
            prev_up = !old_up;
        }

        rebuild_potentials(dist, n, &parent, &up, &mut pi, &mut depth)?;

        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::internal("network simplex exceeded pivot budget"));
        }
    }

    let mut cost = 0.0;
    let mut flows = Vec::new();
    for v in 1..n {
        if flow[v] > 0.0 {
            cost += flow[v] * dist(v, parent[v]);
            if up[v] {
                flows.push((v, parent[v], flow[v]));
            } else {
                flows.push((parent[v], v, flow[v]));
            }
        }
    }
    // Tree arcs satisfy d(i,j) + pi_i - pi_j = 0 along the flow direction,
    // so -pi is 1-Lipschitz for d and pairs to +cost against the supplies.
    let potentials = pi.iter().map(|v| -v).collect();
    Ok(Transport {
        cost,
        flows,
        potentials,
    })
}

fn rebuild_potentials(
    dist: &dyn Fn(usize, usize) -> f64,
    n: usize,
    parent: &[usize],
    up: &[bool],
    pi: &mut [f64],
    depth: &mut [usize],
) -> Result<()> {
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        children[parent[v]].push(v);
    }
    pi[0] = 0.0;
    depth[0] = 0;
    let mut stack = vec![0usize];
    let mut seen = 1usize;
    while let Some(u) = stack.pop() {
        for &v in &children[u] {
            pi[v] = if up[v] {
                pi[u] - dist(v, u)
            } else {
                pi[u] + dist(u, v)
            };
            depth[v] = depth[u] + 1;
            seen += 1;
            stack.push(v);
        }
    }
    if seen != n {
        return Err(Error::internal("spanning tree lost connectivity"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_dist(pts: &[f64]) -> impl Fn(usize, usize) -> f64 + '_ {
        move |i, j| (pts[i] - pts[j]).abs()
    }

    #[test]
    fn two_point_shipment() {
        let pts = [0.0, 2.5];
        let t = solve(&line_dist(&pts), 2, &[-1.0, 1.0]).unwrap();
        assert!((t.cost - 2.5).abs() < 1e-12);
        assert_eq!(t.flows, vec![(1, 0, 1.0)]);
        // dual value matches the primal cost
        let dual: f64 = t.potentials[1] - t.potentials[0];
        assert!((dual - t.cost).abs() < 1e-12);
        assert!((t.potentials[1] - t.potentials[0]).abs() <= 2.5 + 1e-12);
    }

    #[test]
    fn line_transport_equals_cumulative_mass() {
        // On the line the optimal cost is the integral of |cumulative mass|.
        let pts = [0.0, 1.0, 3.0, 4.0];
        let supply = [1.5, -0.5, -2.0, 1.0];
        let t = solve(&line_dist(&pts), 4, &supply).unwrap();
        let mut acc = 0.0;
        let mut expect = 0.0;
        for i in 0..3 {
            acc += supply[i];
            expect += acc.abs() * (pts[i + 1] - pts[i]);
        }
        assert!((t.cost - expect).abs() < 1e-10, "{} vs {expect}", t.cost);
        // decomposition reproduces the supplies
        let mut div = [0.0; 4];
        for (a, b, f) in &t.flows {
            div[*a] += f;
            div[*b] -= f;
        }
        for i in 0..4 {
            assert!((div[i] - supply[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn potentials_are_lipschitz_feasible_and_tight() {
        // Non-metric costs (a p-metric snowflake) still solve fine.
        let pts = [0.0f64, 1.0, 2.0, 3.5, 5.0];
        let dist = |i: usize, j: usize| (pts[i] - pts[j]).abs().powf(2.0);
        let supply = [2.0, -1.0, 0.25, -0.75, -0.5];
        let t = solve(&dist, 5, &supply).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(t.potentials[i] - t.potentials[j] <= dist(i, j) + 1e-9);
                }
            }
        }
        let dual: f64 = (0..5).map(|i| supply[i] * t.potentials[i]).sum();
        assert!((dual - t.cost).abs() <= 1e-9 * t.cost.max(1.0));
    }

    #[test]
    fn zero_supply_costs_nothing_even_on_nonmetric_costs() {
        // degenerate pivots may fire to reach dual feasibility; the cost
        // stays zero and the potentials stay feasible
        let pts = [0.0f64, 0.3, 0.5, 2.0];
        let dist = |i: usize, j: usize| (pts[i] - pts[j]).abs().powf(2.0);
        let t = solve(&dist, 4, &[0.0; 4]).unwrap();
        assert_eq!(t.cost, 0.0);
        assert!(t.flows.is_empty());
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(t.potentials[i] - t.potentials[j] <= dist(i, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn many_seeds_satisfy_duality_on_random_nonmetric_instances() {
        use rand::{Rng, SeedableRng};
        for seed in 0..200u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..8);
            let mut costs = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = rng.gen_range(0.05..3.0);
                    costs[i][j] = c;
                    costs[j][i] = c;
                }
            }
            let mut supply: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s: f64 = supply.iter().sum();
            supply[0] -= s;
            let dist = |i: usize, j: usize| costs[i][j];
            let t = solve(&dist, n, &supply).unwrap();
            let dual: f64 = (0..n).map(|i| supply[i] * t.potentials[i]).sum();
            assert!(
                (dual - t.cost).abs() <= 1e-9 * t.cost.max(1.0),
                "seed {seed}: gap {}",
                dual - t.cost
            );
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(
                            t.potentials[i] - t.potentials[j] <= dist(i, j) + 1e-9,
                            "seed {seed}: infeasible potential pair ({i},{j})"
                        );
                    }
                }
            }
        }
    }
}
