//! Property tests over seeded random instances: norm axioms, construction
//! validity, and coordinate bookkeeping that must survive any refactor.

use std::sync::Arc;

use proptest::prelude::*;

use lipfree::embed::StepFunction;
use lipfree::gen::{self, SpaceKind};
use lipfree::molecule::Molecule;
use lipfree::norm::{self, Method, NormOptions};
use lipfree::space::{quotient, snowflake};

fn kind_from(index: u8) -> SpaceKind {
    match index % 5 {
        0 => SpaceKind::Line,
        1 => SpaceKind::RepairedMetric,
        2 => SpaceKind::Snowflaked,
        3 => SpaceKind::Ultrametric,
        _ => SpaceKind::Clustered,
    }
}

fn p_from(index: u8) -> f64 {
    [1.0, 2.0 / 3.0, 0.5][index as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_spaces_validate(seed in any::<u64>(), n in 3usize..8, k in any::<u8>(), pi in any::<u8>()) {
        let space = gen::random_space(seed, n, p_from(pi), kind_from(k));
        prop_assert!(space.validate().ok);
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), n in 3usize..7, k in any::<u8>(), pi in any::<u8>(), c in 0.1f64..4.0) {
        let space = Arc::new(gen::random_space(seed, n, p_from(pi), kind_from(k)));
        let mu = gen::random_molecule(seed, &space).unwrap();
        let opts = NormOptions::default();
        let v = norm::norm_with(&mu, Method::Auto, &opts).unwrap().value;
        let vc = norm::norm_with(&mu.scaled(c), Method::Auto, &opts).unwrap().value;
        prop_assert!((vc - c * v).abs() <= 1e-9 * (c * v).max(1.0));
    }

    #[test]
    fn norm_is_p_subadditive(seed in any::<u64>(), n in 3usize..7, k in any::<u8>(), pi in any::<u8>()) {
        let p = p_from(pi);
        let space = Arc::new(gen::random_space(seed, n, p, kind_from(k)));
        let mu = gen::random_molecule(seed, &space).unwrap();
        let nu = gen::random_molecule(seed ^ 0xabcd, &space).unwrap();
        let opts = NormOptions::default();
        let a = norm::norm_with(&mu, Method::Auto, &opts).unwrap().value;
        let b = norm::norm_with(&nu, Method::Auto, &opts).unwrap().value;
        let ab = norm::norm_with(&mu.add(&nu).unwrap(), Method::Auto, &opts).unwrap().value;
        prop_assert!(ab.powf(p) <= a.powf(p) + b.powf(p) + 1e-9);
    }

    #[test]
    fn certificates_sandwich_and_rebuild(seed in any::<u64>(), n in 3usize..7, k in any::<u8>(), pi in any::<u8>()) {
        let space = Arc::new(gen::random_space(seed, n, p_from(pi), kind_from(k)));
        let mu = gen::random_molecule(seed, &space).unwrap();
        let cert = norm::norm(&mu).unwrap();
        prop_assert!(cert.lower <= cert.value + 1e-9 * cert.value.max(1.0));
        prop_assert!(cert.value <= cert.upper + 1e-9 * cert.value.max(1.0));
        prop_assert!(cert.dual_pairing <= cert.value + 1e-9 * cert.value.max(1.0));
        // rebuild the molecule from the primal terms
        let mut rebuilt = vec![0.0f64; space.n()];
        for t in &cert.primal {
            let unit = t.lambda / space.dist(t.x, t.y);
            rebuilt[t.y] += unit;
            rebuilt[t.x] -= unit;
        }
        for (r, c) in rebuilt.iter().zip(mu.coeffs()) {
            prop_assert!((r - c).abs() <= 1e-10 * mu.mass().max(1.0));
        }
    }

    #[test]
    fn lp_equals_enumeration_at_p_one(seed in any::<u64>(), n in 3usize..8, k in any::<u8>()) {
        let space = Arc::new(gen::random_space(seed, n, 1.0, kind_from(k)));
        let mu = gen::random_molecule(seed, &space).unwrap();
        let opts = NormOptions::default();
        let a = norm::norm_with(&mu, Method::Lp, &opts).unwrap().value;
        let b = norm::norm_with(&mu, Method::Enumerate, &opts).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0));
    }

    #[test]
    fn snowflake_roundtrip_recovers_distances(seed in any::<u64>(), n in 3usize..8, k in any::<u8>(), r in 0.3f64..0.95) {
        let space = gen::random_space(seed, n, 1.0, kind_from(k));
        let flaked = snowflake(&space, r, 1.0).unwrap();
        let back = snowflake(&flaked, 1.0 / r, 1.0).unwrap();
        for i in 0..n {
            for j in 0..n {
                let orig = space.dist(i, j);
                prop_assert!((back.dist(i, j) - orig).abs() <= 1e-12 * orig.max(1.0));
            }
        }
    }

    #[test]
    fn quotient_pushforward_keeps_molecules_balanced(seed in any::<u64>(), n in 4usize..8, k in any::<u8>(), pi in any::<u8>()) {
        let space = Arc::new(gen::random_space(seed, n, p_from(pi), kind_from(k)));
        let collapsed: Vec<usize> = (0..n).filter(|&i| i == 0 || i % 2 == 0).collect();
        let q = quotient(&space, &collapsed).unwrap();
        let mu = gen::random_molecule(seed, &space).unwrap();
        let target = Arc::new(q.space.clone());
        let image = mu.push_forward(target, &q.map).unwrap();
        let sum: f64 = image.coeffs().iter().sum();
        prop_assert!(sum.abs() <= 1e-12 * mu.mass().max(1.0));
        // quotient never increases distances between surviving points
        for a in 0..n {
            for b in 0..n {
                if q.map[a] != q.map[b] {
                    prop_assert!(
                        q.space.dist(q.map[a], q.map[b]) <= space.dist(a, b) + 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn step_functions_satisfy_the_p_triangle_law(
        heights in prop::collection::vec(-3.0f64..3.0, 2..6),
        cuts in prop::collection::vec(0.01f64..2.0, 2..6),
        pi in any::<u8>(),
    ) {
        let p = p_from(pi);
        let k = heights.len().min(cuts.len());
        let mut breaks = vec![0.0f64];
        for c in cuts.iter().take(k) {
            breaks.push(breaks.last().unwrap() + c);
        }
        let f = StepFunction::new(breaks.clone(), heights[..k].to_vec()).unwrap();
        let g = StepFunction::new(
            breaks.iter().map(|b| b * 0.7 + 0.1).collect(),
            heights[..k].iter().map(|h| h * -0.5 + 0.2).collect(),
        ).unwrap();
        let fg = f.add(&g);
        prop_assert!(
            fg.quasinorm(p).powf(p) <= f.quasinorm(p).powf(p) + g.quasinorm(p).powf(p) + 1e-9
        );
        // subtraction is consistent with addition
        let back = fg.sub(&g);
        prop_assert!(back.sub_quasinorm(&f, p) <= 1e-9);
    }

    #[test]
    fn dual_function_is_feasible(seed in any::<u64>(), n in 3usize..7, k in any::<u8>(), pi in any::<u8>()) {
        let space = Arc::new(gen::random_space(seed, n, p_from(pi), kind_from(k)));
        let mu = gen::random_molecule(seed, &space).unwrap();
        let (value, f) = norm::dual_lower_bound(&mu).unwrap();
        prop_assert!(f.lip(&space) <= 1.0 + 1e-9);
        prop_assert!((f.pairing(&mu) - value).abs() <= 1e-9 * value.abs().max(1.0));
        prop_assert_eq!(f.value(0), 0.0);
    }
}

#[test]
fn norm_monotone_as_exponent_drops() {
    // same distance matrix, p shrinking: the admissible decompositions
    // shrink, so the gauge grows
    for seed in 0..20u64 {
        let metric = gen::random_space(seed, 6, 1.0, SpaceKind::RepairedMetric);
        let coeffs = gen::random_molecule(seed, &Arc::new(metric.clone()))
            .unwrap()
            .coeffs()
            .to_vec();
        let mut last = 0.0f64;
        for &p in &[1.0, 2.0 / 3.0, 0.5, 0.4] {
            let space = Arc::new(
                lipfree::PMetricSpace::new(metric.labels().to_vec(), metric.matrix().to_vec(), p)
                    .unwrap(),
            );
            let mu = Molecule::new(space, coeffs.clone()).unwrap();
            let v = norm::norm(&mu).unwrap().value;
            assert!(
                v >= last - 1e-9 * v.max(1.0),
                "seed {seed}: p={p} gave {v} below {last}"
            );
            last = v;
        }
    }
}
