//! Named verification suites: every quantitative claim the library makes,
//! run as measured rows with explicit bounds and margins.
//!
//! The fourteen `c01`..`c14` functions are the acceptance criteria; the
//! suite runners bundle them with additional per-module property batteries.
//! All randomness is seeded, all iteration orders fixed, so reports are
//! byte-identical across runs and worker counts.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::bases;
use crate::complement::{self, BumpStyle, ChainMode};
use crate::embed::{self, Bump};
use crate::error::{Error, Result};
use crate::exact;
use crate::gen::{self, SpaceKind};
use crate::io;
use crate::molecule::{LipschitzFunction, Molecule};
use crate::norm::{self, Method, NormOptions};
use crate::operator::FreeOperator;
use crate::space::{
    make_grid, metric_envelope, p_sum, quotient, snowflake, Grid, GridKind, PMetricSpace, SumMode,
};
use crate::tol;

/// Configuration shared by all suites.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Exponents used where a criterion does not fix its own set.
    pub p_values: Vec<f64>,
    /// Cap for the enumeration norm oracle.
    pub max_points: usize,
    /// Overrides the additive slack on bound rows when set.
    pub slack: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            p_values: vec![0.5, 2.0 / 3.0, 1.0],
            max_points: 9,
            slack: None,
        }
    }
}

impl SuiteConfig {
    fn opts(&self) -> NormOptions {
        NormOptions {
            enumerate_cap: self.max_points,
        }
    }

    fn slack_or(&self, default: f64) -> f64 {
        self.slack.unwrap_or(default)
    }
}

/// One measured assertion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckRow {
    pub id: String,
    pub instance: String,
    pub p: f64,
    /// For bound rows the proved bound; for equality rows the target.
    pub bound: f64,
    pub measured: f64,
    /// Slack remaining before the row would fail.
    pub margin: f64,
    pub pass: bool,
}

fn le_row(id: &str, instance: String, p: f64, measured: f64, bound: f64, slack: f64) -> CheckRow {
    let margin = bound + slack - measured;
    CheckRow {
        id: id.to_string(),
        instance,
        p,
        bound,
        measured,
        margin,
        pass: margin >= 0.0,
    }
}

fn eq_row(id: &str, instance: String, p: f64, measured: f64, target: f64, tol: f64) -> CheckRow {
    let margin = tol - (measured - target).abs();
    CheckRow {
        id: id.to_string(),
        instance,
        p,
        bound: target,
        measured,
        margin,
        pass: margin >= 0.0,
    }
}

/// A named suite outcome.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<CheckRow>,
    pub passed: usize,
    pub failed: usize,
    /// Exact norm values worth pinning, for golden files.
    pub goldens: Vec<(String, f64)>,
    /// Extra CSV tables: `(file name, content)`.
    pub tables: Vec<(String, String)>,
}

impl SuiteReport {
    fn new(suite: &str, rows: Vec<CheckRow>, goldens: Vec<(String, f64)>) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        let failed = rows.len() - passed;
        SuiteReport {
            suite: suite.to_string(),
            rows,
            passed,
            failed,
            goldens,
            tables: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    /// Fixed-header CSV with 17-significant-digit floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,instance,p,bound,measured,margin,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.id,
                r.instance.replace(',', ";"),
                io::fmt_f64(r.p),
                io::fmt_f64(r.bound),
                io::fmt_f64(r.measured),
                io::fmt_f64(r.margin),
                r.pass
            ));
        }
        out
    }
}

/// Suite names accepted by the runner.
pub const SUITES: [&str; 6] = [
    "qmetric",
    "norms",
    "complement",
    "embed",
    "bases",
    "acceptance",
];

/// Runs one suite, or all of them.
pub fn run(name: &str, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    match name {
        "qmetric" => Ok(vec![suite_qmetric(cfg)?]),
        "norms" => Ok(vec![suite_norms(cfg)?]),
        "complement" => Ok(vec![suite_complement(cfg)?]),
        "embed" => Ok(vec![suite_embed(cfg)?]),
        "bases" => Ok(vec![suite_bases(cfg)?]),
        "acceptance" => {
            let mut rows = Vec::new();
            for (_, f) in acceptance_criteria(cfg) {
                rows.extend(f(cfg)?);
            }
            Ok(vec![SuiteReport::new("acceptance", rows, Vec::new())])
        }
        "all" => Ok(vec![
            suite_qmetric(cfg)?,
            suite_norms(cfg)?,
            suite_complement(cfg)?,
            suite_embed(cfg)?,
            suite_bases(cfg)?,
        ]),
        other => Err(Error::Structural(format!(
            "unknown suite {other}; expected one of {SUITES:?} or all"
        ))),
    }
}

// ---------------------------------------------------------------------------
// acceptance criteria
// ---------------------------------------------------------------------------

/// c01: the transport program and the forest enumeration agree at p = 1 on
/// seeded random spaces with up to 7 points.
pub fn c01_oracle_agreement(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let kinds = [
        SpaceKind::Line,
        SpaceKind::RepairedMetric,
        SpaceKind::Ultrametric,
        SpaceKind::Clustered,
    ];
    let instances: Vec<(u64, usize, SpaceKind)> = (0..100u64)
        .map(|i| {
            (
                cfg.seed.wrapping_add(i),
                3 + (i as usize % 5),
                kinds[i as usize % kinds.len()],
            )
        })
        .collect();
    let opts = cfg.opts();
    instances
        .par_iter()
        .map(|&(seed, n, kind)| {
            let space = Arc::new(gen::random_space(seed, n, 1.0, kind));
            let mu = gen::random_molecule(seed ^ 0x9e3779b9, &space)?;
            let lp = norm::norm_with(&mu, Method::Lp, &opts)?.value;
            let en = norm::norm_with(&mu, Method::Enumerate, &opts)?.value;
            let rel = (lp - en).abs() / lp.abs().max(1.0);
            Ok(le_row(
                "c01-oracle-agreement",
                format!("seed={seed};n={n};kind={kind:?}"),
                1.0,
                rel,
                0.0,
                cfg.slack_or(tol::ORACLE_EQ_REL),
            ))
        })
        .collect()
}

/// c02: telescoping sums on the integer chain have norm exactly `m - k`.
pub fn c02_telescoping(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 2.0 / 3.0, 1.0] {
        let grid = make_grid(GridKind::IntegerSegment(8), p)?;
        for k in 0..8usize {
            for m in (k + 1)..=8usize {
                let mu = Molecule::dirac_diff(grid.space.clone(), m, k)?;
                let v = norm::norm_with(&mu, Method::Auto, &cfg.opts())?.value;
                rows.push(eq_row(
                    "c02-telescoping",
                    format!("k={k};m={m}"),
                    p,
                    v,
                    (m - k) as f64,
                    cfg.slack_or(1e-8),
                ));
            }
        }
    }
    Ok(rows)
}

/// c03: even and odd subbases of the natural basis are isometrically the
/// unit vector basis of the sequence space.
pub fn c03_even_odd_subbasis(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 1.0] {
        let system = bases::natural_basis(8, p)?;
        let mut rng = gen::rng(cfg.seed);
        for trial in 0..50usize {
            for (name, start) in [("even", 1usize), ("odd", 0usize)] {
                let picks: Vec<usize> = (0..4).map(|k| 2 * k + 1 - start).collect();
                let vectors: Vec<Molecule> =
                    picks.iter().map(|&i| system.vectors[i].clone()).collect();
                let coeffs = gen::random_coeffs(&mut rng, vectors.len());
                let combo = Molecule::combine(&vectors, &coeffs)?;
                let v = norm::norm_with(&combo, Method::Auto, &cfg.opts())?.value;
                let lp: f64 = coeffs
                    .iter()
                    .map(|c| c.abs().powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p);
                let rel = (v - lp).abs() / lp.max(1e-9);
                rows.push(le_row(
                    "c03-even-odd-subbasis",
                    format!("trial={trial};{name}"),
                    p,
                    rel,
                    0.0,
                    cfg.slack_or(1e-8),
                ));
            }
        }
    }
    Ok(rows)
}

/// c04: every window projection on the integer chain has norm one.
pub fn c04_window_projections(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut jobs = Vec::new();
    for &p in &[0.5, 2.0 / 3.0, 1.0] {
        for k in 0..8usize {
            for m in (k + 1)..=8usize {
                jobs.push((p, k, m));
            }
        }
    }
    let opts = cfg.opts();
    jobs.par_iter()
        .map(|&(p, k, m)| {
            let grid = make_grid(GridKind::IntegerSegment(8), p)?;
            let w = bases::window_projection(&grid.space, k, m)?;
            let v = w.operator_norm(&opts)?.value;
            Ok(eq_row(
                "c04-window-projection-norm",
                format!("k={k};m={m}"),
                p,
                v,
                1.0,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ))
        })
        .collect()
}

/// c05: interpolation projections between all nested dyadic(3) subgrids
/// satisfy the `3^(1/p-1)` bound, and the tower identities hold as matrix
/// equalities.
pub fn c05_interval_projections(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let interior: Vec<f64> = (1..8).map(|i| i as f64 / 8.0).collect();
    let grid_points = |mask: u32| -> Vec<f64> {
        let mut pts = vec![0.0, 1.0];
        for (b, &x) in interior.iter().enumerate() {
            if mask & (1 << b) != 0 {
                pts.push(x);
            }
        }
        pts
    };
    let mut rows = Vec::new();
    for &p in &[0.5, 2.0 / 3.0, 1.0] {
        let bound = 3f64.powf(1.0 / p - 1.0);
        let grids: Vec<Grid> = (0u32..128)
            .map(|mask| make_grid(GridKind::Custom(grid_points(mask)), p))
            .collect::<Result<_>>()?;
        // norm bound over all nested pairs
        let mut pairs = Vec::new();
        for m1 in 0u32..128 {
            let mut m2 = m1;
            loop {
                pairs.push((m1, m2));
                if m2 == 0 {
                    break;
                }
                m2 = (m2 - 1) & m1;
            }
        }
        let opts = cfg.opts();
        let norm_rows: Vec<CheckRow> = pairs
            .par_iter()
            .map(|&(m1, m2)| {
                let proj = bases::interval_projection(&grids[m1 as usize], &grids[m2 as usize])?;
                let v = proj.operator_norm(&opts)?.value;
                Ok(le_row(
                    "c05-interval-projection-bound",
                    format!("fine={m1:07b};coarse={m2:07b}"),
                    p,
                    v,
                    bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ))
            })
            .collect::<Result<_>>()?;
        rows.extend(norm_rows);
        // tower identities over all nested triples, summarized per p
        let mut proj_cache: HashMap<(u32, u32), FreeOperator> = HashMap::new();
        let mut emb_cache: HashMap<(u32, u32), FreeOperator> = HashMap::new();
        for &(m1, m2) in &pairs {
            proj_cache.insert(
                (m1, m2),
                bases::interval_projection(&grids[m1 as usize], &grids[m2 as usize])?,
            );
            emb_cache.insert(
                (m1, m2),
                bases::canonical_embedding(&grids[m2 as usize], &grids[m1 as usize])?,
            );
        }
        let mut worst_tower = 0.0f64;
        let mut worst_mixed = 0.0f64;
        let mut retract_err = 0.0f64;
        for m1 in 0u32..128 {
            let mut m2 = m1;
            loop {
                let p12 = &proj_cache[&(m1, m2)];
                let l12 = &emb_cache[&(m1, m2)];
                retract_err = retract_err.max(
                    p12.compose(l12)?
                        .max_abs_diff(&FreeOperator::identity(grids[m2 as usize].space.clone())),
                );
                let mut m3 = m2;
                loop {
                    let p23 = &proj_cache[&(m2, m3)];
                    let p13 = &proj_cache[&(m1, m3)];
                    worst_tower = worst_tower.max(p23.compose(p12)?.max_abs_diff(p13));
                    worst_mixed = worst_mixed.max(p13.compose(l12)?.max_abs_diff(p23));
                    let l13 = &emb_cache[&(m1, m3)];
                    let l23 = &emb_cache[&(m2, m3)];
                    worst_mixed = worst_mixed.max(p12.compose(l13)?.max_abs_diff(l23));
                    if m3 == 0 {
                        break;
                    }
                    m3 = (m3 - 1) & m2;
                }
                if m2 == 0 {
                    break;
                }
                m2 = (m2 - 1) & m1;
            }
        }
        for (name, v) in [
            ("tower-composition", worst_tower),
            ("mixed-identities", worst_mixed),
            ("projection-retracts", retract_err),
        ] {
            rows.push(le_row(
                "c05-interval-projection-identities",
                format!("{name};all-nested-triples"),
                p,
                v,
                0.0,
                cfg.slack_or(tol::MATRIX_ID_EXACT),
            ));
        }
    }
    Ok(rows)
}

/// c06: the Haar system on dyadic(3) has projection norms within
/// `3^(1/p-1)`, annihilation holds exactly, and at p = 1 the constant is 1.
pub fn c06_haar_system(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 2.0 / 3.0, 1.0] {
        let system = bases::haar_system(3, p)?;
        let check = system.check()?;
        rows.push(le_row(
            "c06-haar-annihilation",
            "max |P_n h_(n+1)|".to_string(),
            p,
            check
                .annihilate_err
                .max(check.fix_err)
                .max(check.compose_err),
            0.0,
            cfg.slack_or(tol::MATRIX_ID_EXACT),
        ));
        let bound = 3f64.powf(1.0 / p - 1.0);
        let opts = cfg.opts();
        let norms: Vec<f64> = system
            .projections
            .par_iter()
            .skip(1)
            .map(|proj| Ok(proj.operator_norm(&opts)?.value))
            .collect::<Result<_>>()?;
        for (k, v) in norms.iter().enumerate() {
            rows.push(le_row(
                "c06-haar-projection-bound",
                format!("prefix={}", k + 1),
                p,
                *v,
                bound,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
        if p == 1.0 {
            let max = norms.iter().cloned().fold(0.0f64, f64::max);
            rows.push(le_row(
                "c06-haar-monotone-at-one",
                "max projection norm".to_string(),
                p,
                max,
                1.0,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
    }
    Ok(rows)
}

/// c07: retraction complements compose to the identity and satisfy the
/// `(L^p + 1)^(1/p)` norm bounds on seeded instances.
pub fn c07_retraction_complements(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let kinds = [
        SpaceKind::Line,
        SpaceKind::RepairedMetric,
        SpaceKind::Snowflaked,
        SpaceKind::Ultrametric,
        SpaceKind::Clustered,
    ];
    let instances: Vec<(u64, usize, SpaceKind, f64)> = (0..50u64)
        .map(|i| {
            (
                cfg.seed.wrapping_add(1000 + i),
                4 + (i as usize % 4),
                kinds[i as usize % kinds.len()],
                if i % 2 == 0 { 0.5 } else { 1.0 },
            )
        })
        .collect();
    let opts = cfg.opts();
    let rows: Vec<Vec<CheckRow>> = instances
        .par_iter()
        .map(|&(seed, n, kind, p)| {
            let space = Arc::new(gen::random_space(seed, n, p, kind));
            let r = gen::random_retraction(seed, n);
            let rc = complement::retraction_complement(&space, &r)?;
            let rep = rc.verify(&opts)?;
            let inst = format!("seed={seed};n={n};kind={kind:?}");
            Ok(vec![
                le_row(
                    "c07-retraction-identities",
                    format!("{inst};ST-and-TS"),
                    p,
                    rep.st_identity_err.max(rep.ts_identity_err),
                    0.0,
                    cfg.slack_or(tol::MATRIX_ID),
                ),
                le_row(
                    "c07-retraction-t-bound",
                    inst.clone(),
                    p,
                    rep.t_norm,
                    rep.t_bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ),
                le_row(
                    "c07-retraction-s-bound",
                    inst,
                    p,
                    rep.s_norm,
                    rep.s_bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// c08: bump families complement the sequence space within `2^(1/p) C t`;
/// metric-ball families within `2^(1/p)`.
pub fn c08_bump_complementation(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 1.0] {
        // isolated points on separated spaces
        for (idx, kind) in [
            SpaceKind::Ultrametric,
            SpaceKind::RepairedMetric,
            SpaceKind::Line,
        ]
        .iter()
        .enumerate()
        {
            for trial in 0..6u64 {
                let seed = cfg.seed.wrapping_add(2000 + trial + 100 * idx as u64);
                let n = 5 + (trial as usize % 5);
                let space = Arc::new(gen::random_space(seed, n, p, *kind));
                let t = 1.0 + 0.25 * (1 + trial % 3) as f64;
                // candidate centers must leave partners over: keep the odd
                // points whose nearest non-candidate lies within t * iso
                let candidates: Vec<usize> = (1..n).filter(|i| i % 2 == 1).collect();
                let mut centers: Vec<usize> = candidates
                    .iter()
                    .cloned()
                    .filter(|&x| {
                        let iso = (0..n)
                            .filter(|&z| z != x)
                            .map(|z| space.dist(x, z))
                            .fold(f64::INFINITY, f64::min);
                        let near = (0..n)
                            .filter(|&z| z != x && !candidates.contains(&z))
                            .map(|z| space.dist(x, z))
                            .fold(f64::INFINITY, f64::min);
                        near <= t * iso
                    })
                    .collect();
                if centers.is_empty() {
                    // the closest pair always works with its far end free
                    let mut best = (1usize, f64::INFINITY);
                    for x in 1..n {
                        for z in 0..n {
                            if z != x && space.dist(x, z) < best.1 {
                                best = (x, space.dist(x, z));
                            }
                        }
                    }
                    centers = vec![best.0];
                }
                let data =
                    complement::bump_family(&space, &centers, None, BumpStyle::Isolated { t })?;
                let ops = complement::condition2_operators(&data)?;
                let rep = complement::verify_condition2(&data, &ops, &cfg.opts())?;
                let inst = format!("isolated;seed={seed};n={n};t={t}");
                rows.push(le_row(
                    "c08-bump-identity",
                    inst.clone(),
                    p,
                    rep.ps_identity_err,
                    0.0,
                    cfg.slack_or(tol::MATRIX_ID),
                ));
                rows.push(le_row(
                    "c08-bump-projection-bound",
                    inst,
                    p,
                    rep.p_norm,
                    rep.p_bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ));
            }
        }
        // disjoint metric balls on clustered spaces: t = 1, C = 1. Clusters
        // occupy contiguous index ranges; the base's own cluster is skipped
        // because supports must avoid the base point.
        for trial in 0..6u64 {
            let seed = cfg.seed.wrapping_add(3000 + trial);
            let n = 6 + (trial as usize % 4);
            let space = Arc::new(gen::random_space(seed, n, p, SpaceKind::Clustered));
            let clusters = (n / 3).max(1);
            let mut centers = Vec::new();
            let mut start = 0usize;
            for c in 0..clusters {
                let size = (0..n).filter(|i| i % clusters == c).count();
                if c > 0 {
                    centers.push(start);
                }
                start += size;
            }
            let data = complement::bump_family(&space, &centers, None, BumpStyle::MetricBall)?;
            let ops = complement::condition2_operators(&data)?;
            let rep = complement::verify_condition2(&data, &ops, &cfg.opts())?;
            let inst = format!("metric-ball;seed={seed};n={n}");
            rows.push(le_row(
                "c08-bump-identity",
                inst.clone(),
                p,
                rep.ps_identity_err,
                0.0,
                cfg.slack_or(tol::MATRIX_ID),
            ));
            rows.push(le_row(
                "c08-bump-projection-bound",
                inst.clone(),
                p,
                rep.p_norm,
                rep.p_bound,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
            rows.push(le_row(
                "c08-metric-ball-two-to-the-inv-p",
                inst,
                p,
                rep.p_norm,
                2f64.powf(1.0 / p),
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
        // separated snowflakes via the p-th power tents
        if p < 1.0 {
            for trial in 0..4u64 {
                let seed = cfg.seed.wrapping_add(4000 + trial);
                let n = 6;
                let space = Arc::new(gen::random_space(seed, n, p, SpaceKind::Snowflaked));
                let centers: Vec<usize> = (1..n).collect();
                let data =
                    complement::bump_family(&space, &centers, None, BumpStyle::Condition3PSep)?;
                let ops = complement::condition2_operators(&data)?;
                let rep = complement::verify_condition2(&data, &ops, &cfg.opts())?;
                let inst = format!("psep;seed={seed};n={n}");
                rows.push(le_row(
                    "c08-bump-identity",
                    inst.clone(),
                    p,
                    rep.ps_identity_err,
                    0.0,
                    cfg.slack_or(tol::MATRIX_ID),
                ));
                rows.push(le_row(
                    "c08-bump-projection-bound",
                    inst,
                    p,
                    rep.p_norm,
                    rep.p_bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ));
            }
        }
    }
    Ok(rows)
}

/// c09: the canonical identification on a maltese sum of three random
/// parts is an isometry with inverse bounded by the measured `K`.
pub fn c09_sum_isometry(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 1.0] {
        for trial in 0..10u64 {
            let seed = cfg.seed.wrapping_add(5000 + trial);
            let sizes = [2usize, 3, 3];
            let parts: Vec<Arc<PMetricSpace>> = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    Arc::new(gen::random_space(
                        seed.wrapping_add(i as u64),
                        n,
                        p,
                        if i % 2 == 0 {
                            SpaceKind::RepairedMetric
                        } else {
                            SpaceKind::Line
                        },
                    ))
                })
                .collect();
            let iso = complement::maltese_isometry(&parts)?;
            let rep = iso.verify(&cfg.opts())?;
            let inst = format!("seed={seed};total={}", iso.sum.space.n());
            rows.push(eq_row(
                "c09-sum-forward-isometry",
                inst.clone(),
                p,
                rep.t_norm,
                1.0,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
            rows.push(le_row(
                "c09-sum-inverse-bound",
                inst,
                p,
                rep.t_inv_norm,
                rep.k_bound,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
    }
    Ok(rows)
}

/// Geometric chain space with coordinate ratio 4, snowflaked to exponent p.
fn geometric_chain_space(p: f64, points: usize) -> Result<Arc<PMetricSpace>> {
    let top = 4f64.powi(points as i32 - 2);
    let pts: Vec<f64> = std::iter::once(0.0)
        .chain((0..points - 1).map(|k| 4f64.powi(k as i32) / top))
        .collect();
    let line = make_grid(GridKind::Custom(pts), 1.0)?;
    if p < 1.0 {
        Ok(Arc::new(snowflake(&line.space, 1.0 / p, p)?))
    } else {
        Ok(line.space)
    }
}

/// c10: chain molecules over a geometric chain satisfy the two-sided
/// sequence-space sandwich.
pub fn c10_chain_sandwich(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let t = 25.0 / 9.0;
    for &p in &[0.5, 1.0] {
        let space = geometric_chain_space(p, 6)?;
        let seq = complement::tonin_select(&space, t, ChainMode::Unbounded, 5)?;
        let mut rng = gen::rng(cfg.seed ^ 0xc10);
        let vectors: Vec<Vec<f64>> = (0..50)
            .map(|_| gen::random_coeffs(&mut rng, seq.points.len() - 1))
            .collect();
        let reports = embed::chain_sandwich(&space, &seq, &vectors, &cfg.opts())?;
        for (i, row) in reports.iter().enumerate() {
            rows.push(le_row(
                "c10-chain-lower",
                format!("vector={i}"),
                p,
                row.lower,
                row.norm,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
            rows.push(le_row(
                "c10-chain-upper",
                format!("vector={i}"),
                p,
                row.norm,
                row.upper,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
    }
    Ok(rows)
}

/// Ultrametric chain clustering at the base point with level ratio `c`.
fn ultrametric_chain(c: f64, points: usize) -> Result<Arc<PMetricSpace>> {
    let n = points;
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            // base point is index 0; levels fall off geometrically
            let level = if i == 0 { j - 1 } else { i.min(j) - 1 };
            let d = c.powi(level as i32);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    Ok(Arc::new(PMetricSpace::with_default_labels(dist, 1.0)?))
}

/// c11: chain spans in ultrametric spaces approach the sequence space in
/// distortion as `t` drops to 1.
pub fn c11_ultrametric_distortion(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut measured_by_t = Vec::new();
    for &t in &[1.1f64, 1.01] {
        let sqrt_t = t.sqrt();
        let s = (sqrt_t - 1.0) / (sqrt_t + 1.0);
        let c = (0.8 * s).min(0.02); // strictly inside the admissible ratio
        let space = ultrametric_chain(c, 6)?;
        let seq = complement::tonin_select(&space, t, ChainMode::LimitPoint, 5)?;
        let mut rng = gen::rng(cfg.seed ^ 0xc11);
        let vectors: Vec<Vec<f64>> = (0..50)
            .map(|_| gen::random_coeffs(&mut rng, seq.points.len() - 1))
            .collect();
        let reports = embed::chain_sandwich(&space, &seq, &vectors, &cfg.opts())?;
        let distortion = reports
            .iter()
            .map(|r| r.upper / r.norm)
            .fold(0.0f64, f64::max);
        rows.push(le_row(
            "c11-ultrametric-distortion",
            format!("t={t};c={c}"),
            1.0,
            distortion,
            t,
            cfg.slack_or(tol::DISTORTION_SLACK),
        ));
        measured_by_t.push(distortion);
    }
    rows.push(le_row(
        "c11-distortion-decreases",
        "t=1.01 vs t=1.1".to_string(),
        1.0,
        measured_by_t[1],
        measured_by_t[0],
        cfg.slack_or(tol::DISTORTION_SLACK),
    ));
    Ok(rows)
}

/// c12: sampled sums of disjointly supported bump maps never exceed the
/// doubling bound `L 2^(1/q - 1)`.
pub fn c12_disjoint_sums(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let base: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    for &q in &[0.5, 1.0] {
        for (name, bumps) in [
            (
                "two-opposite",
                vec![
                    Bump {
                        center: 0.25,
                        radius: 0.24,
                        sign: 1.0,
                    },
                    Bump {
                        center: 0.75,
                        radius: 0.24,
                        sign: -1.0,
                    },
                ],
            ),
            (
                "three-alternating",
                vec![
                    Bump {
                        center: 0.15,
                        radius: 0.12,
                        sign: 1.0,
                    },
                    Bump {
                        center: 0.5,
                        radius: 0.2,
                        sign: -1.0,
                    },
                    Bump {
                        center: 0.85,
                        radius: 0.12,
                        sign: 1.0,
                    },
                ],
            ),
        ] {
            let rep = embed::disjoint_sum_check(&bumps, q, &base, 8)?;
            rows.push(le_row(
                "c12-disjoint-sum-lipschitz",
                format!("{name};samples={}", rep.samples),
                q,
                rep.measured,
                rep.bound * (1.0 + cfg.slack_or(tol::SUM_LIP_REL)),
                0.0,
            ));
        }
    }
    Ok(rows)
}

/// c13: quotient spaces validate and quotient Lipschitz constants agree
/// with the originals for functions vanishing on the collapsed set.
pub fn c13_quotient_preservation(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let kinds = [
        SpaceKind::Line,
        SpaceKind::RepairedMetric,
        SpaceKind::Snowflaked,
        SpaceKind::Ultrametric,
    ];
    let instances: Vec<(u64, usize, SpaceKind, f64)> = (0..100u64)
        .map(|i| {
            (
                cfg.seed.wrapping_add(6000 + i),
                4 + (i as usize % 4),
                kinds[i as usize % kinds.len()],
                if i % 2 == 0 { 0.5 } else { 1.0 },
            )
        })
        .collect();
    instances
        .par_iter()
        .map(|&(seed, n, kind, p)| {
            let space = Arc::new(gen::random_space(seed, n, p, kind));
            let mut rng = gen::rng(seed ^ 0xc13);
            let mut collapsed = vec![0usize];
            for i in 1..n {
                if rng.gen_bool(0.4) {
                    collapsed.push(i);
                }
            }
            if collapsed.len() == n {
                collapsed.pop();
            }
            let q = quotient(&space, &collapsed)?;
            // quotient() validates its output; measure the worst Lipschitz
            // mismatch over functions vanishing on the collapsed set
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let mut values = vec![0.0f64; n];
                for (i, v) in values.iter_mut().enumerate() {
                    if !collapsed.contains(&i) {
                        *v = rng.gen_range(-1.0..1.0);
                    }
                }
                let f = LipschitzFunction::new(values.clone())?;
                let lip_m = f.lip(&space);
                let mut q_values = vec![0.0f64; q.space.n()];
                for (old, &new) in q.map.iter().enumerate() {
                    if new != 0 {
                        q_values[new] = values[old];
                    }
                }
                let fq = LipschitzFunction::new(q_values)?;
                let lip_q = fq.lip(&q.space);
                worst = worst.max((lip_m - lip_q).abs() / lip_m.max(1.0));
            }
            Ok(le_row(
                "c13-quotient-lipschitz",
                format!(
                    "seed={seed};n={n};kind={kind:?};collapsed={}",
                    collapsed.len()
                ),
                p,
                worst,
                0.0,
                cfg.slack_or(tol::LIP_EQ),
            ))
        })
        .collect()
}

/// c14: norms on the dyadic grid equal the dilated norms on the integer
/// chain with the same coefficients.
pub fn c14_dilation_bridge(cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for &p in &[0.5, 1.0] {
        for level in 0u32..=3 {
            let dyadic = make_grid(GridKind::Dyadic(level), p)?;
            let chain = make_grid(GridKind::IntegerSegment(1 << level), p)?;
            let scale = 2f64.powi(-(level as i32));
            let mut rng = gen::rng(cfg.seed ^ (0xc14 + level as u64));
            for trial in 0..10usize {
                let n = dyadic.space.n();
                let mut coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let s: f64 = coeffs.iter().sum();
                coeffs[0] -= s;
                let mu_d = Molecule::new(dyadic.space.clone(), coeffs.clone())?;
                let mu_z = Molecule::new(chain.space.clone(), coeffs)?;
                let v_d = norm::norm_with(&mu_d, Method::Auto, &cfg.opts())?.value;
                let v_z = norm::norm_with(&mu_z, Method::Auto, &cfg.opts())?.value;
                let rel = (v_d - scale * v_z).abs() / (scale * v_z).max(1e-12);
                rows.push(le_row(
                    "c14-dilation-bridge",
                    format!("level={level};trial={trial}"),
                    p,
                    rel,
                    0.0,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                ));
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// per-module suites
// ---------------------------------------------------------------------------

fn suite_qmetric(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    // constructions validate over seeded inputs
    let kinds = [
        SpaceKind::Line,
        SpaceKind::RepairedMetric,
        SpaceKind::Snowflaked,
        SpaceKind::Ultrametric,
        SpaceKind::Clustered,
    ];
    for i in 0..100u64 {
        let seed = cfg.seed.wrapping_add(i);
        let p = cfg.p_values[i as usize % cfg.p_values.len()];
        let kind = kinds[i as usize % kinds.len()];
        let space = gen::random_space(seed, 4 + (i as usize % 4), p, kind);
        let ok = space.validate().ok;
        rows.push(le_row(
            "qm-random-space-valid",
            format!("seed={seed};kind={kind:?}"),
            p,
            if ok { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        // snowflake round trip
        let r = 0.7;
        let flaked = snowflake(&space, r, p)?;
        let back = snowflake(&flaked, 1.0 / r, p)?;
        let mut worst = 0.0f64;
        for a in 0..space.n() {
            for b in 0..space.n() {
                let orig = space.dist(a, b);
                worst = worst.max((back.dist(a, b) - orig).abs() / orig.max(1.0));
            }
        }
        rows.push(le_row(
            "qm-snowflake-roundtrip",
            format!("seed={seed};r={r}"),
            p,
            worst,
            0.0,
            cfg.slack_or(tol::ROUNDTRIP_REL),
        ));
        // quotient contraction and base distances
        let subset: Vec<usize> = (0..space.n()).filter(|&x| x == 0 || x % 3 == 0).collect();
        let q = quotient(&Arc::new(space.clone()), &subset)?;
        let mut contraction_ok = true;
        for a in 0..space.n() {
            for b in 0..space.n() {
                let da = q.space.dist(q.map[a], q.map[b]);
                if da > space.dist(a, b) + tol::TRIANGLE_ABS && a != b && q.map[a] != q.map[b] {
                    contraction_ok = false;
                }
            }
            let expect = space.dist_to_set(a, &subset);
            if (q.space.dist(q.map[a], 0) - if subset.contains(&a) { 0.0 } else { expect }).abs()
                > 1e-12 * expect.max(1.0)
            {
                contraction_ok = false;
            }
        }
        rows.push(le_row(
            "qm-quotient-contracts",
            format!("seed={seed}"),
            p,
            if contraction_ok { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        // collapsing only the base point changes nothing: the detour term
        // dominates by the p-triangle law
        if i < 50 {
            let trivial = quotient(&Arc::new(space.clone()), &[0])?;
            let mut worst = 0.0f64;
            for a in 0..space.n() {
                for b in 0..space.n() {
                    let before = space.dist(a, b);
                    let after = trivial.space.dist(trivial.map[a], trivial.map[b]);
                    worst = worst.max((before - after).abs());
                }
            }
            rows.push(le_row(
                "qm-quotient-by-base-isometric",
                format!("seed={seed}"),
                p,
                worst,
                0.0,
                cfg.slack_or(tol::TRIANGLE_ABS),
            ));
        }
        // envelope: ordinary triangle, dominated, idempotent
        let env = metric_envelope(&space)?;
        let env2 = metric_envelope(&env)?;
        let mut env_ok = env.validate().ok;
        for a in 0..space.n() {
            for b in 0..space.n() {
                if env.dist(a, b) > space.dist(a, b) + tol::TRIANGLE_ABS {
                    env_ok = false;
                }
                if (env2.dist(a, b) - env.dist(a, b)).abs() > tol::TRIANGLE_ABS {
                    env_ok = false;
                }
            }
        }
        rows.push(le_row(
            "qm-envelope-properties",
            format!("seed={seed}"),
            p,
            if env_ok { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        // maltese sum: parts embed isometrically, cross distances exact
        let part_a = gen::random_space(seed ^ 1, 3, p, kinds[(i as usize + 1) % kinds.len()]);
        let part_b = gen::random_space(seed ^ 2, 3, p, kinds[(i as usize + 2) % kinds.len()]);
        let sum = p_sum(&[part_a.clone(), part_b.clone()], SumMode::Maltese)?;
        let mut sum_ok = sum.space.validate().ok;
        for (a, part) in [&part_a, &part_b].iter().enumerate() {
            for x in 0..part.n() {
                for y in 0..part.n() {
                    let (gx, gy) = (sum.part_maps[a][x], sum.part_maps[a][y]);
                    if (sum.space.dist(gx, gy) - part.dist(x, y)).abs() > 1e-12 {
                        sum_ok = false;
                    }
                }
            }
        }
        for x in 1..part_a.n() {
            for y in 1..part_b.n() {
                let (gx, gy) = (sum.part_maps[0][x], sum.part_maps[1][y]);
                let expect = (part_a.dist_p(x, 0) + part_b.dist_p(y, 0)).powf(1.0 / p);
                if (sum.space.dist(gx, gy) - expect).abs() > 1e-12 * expect.max(1.0) {
                    sum_ok = false;
                }
            }
        }
        rows.push(le_row(
            "qm-maltese-isometric-parts",
            format!("seed={seed}"),
            p,
            if sum_ok { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
    }
    rows.extend(c13_quotient_preservation(cfg)?);
    Ok(SuiteReport::new("qmetric", rows, Vec::new()))
}

fn suite_norms(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = c01_oracle_agreement(cfg)?;
    let mut goldens = Vec::new();
    let kinds = [
        SpaceKind::Line,
        SpaceKind::Snowflaked,
        SpaceKind::Ultrametric,
    ];
    for i in 0..30u64 {
        let seed = cfg.seed.wrapping_add(7000 + i);
        let p = cfg.p_values[i as usize % cfg.p_values.len()];
        let kind = kinds[i as usize % kinds.len()];
        let space = Arc::new(gen::random_space(seed, 5, p, kind));
        let mu = gen::random_molecule(seed, &space)?;
        let nu = gen::random_molecule(seed ^ 7, &space)?;
        let opts = cfg.opts();
        let v_mu = norm::norm_with(&mu, Method::Auto, &opts)?;
        let v_nu = norm::norm_with(&nu, Method::Auto, &opts)?.value;
        // homogeneity
        let c = 0.3 + (i as f64) * 0.1;
        let v_scaled = norm::norm_with(&mu.scaled(c), Method::Auto, &opts)?.value;
        rows.push(le_row(
            "nm-homogeneity",
            format!("seed={seed};c={c}"),
            p,
            (v_scaled - c * v_mu.value).abs() / (c * v_mu.value).max(1e-12),
            0.0,
            cfg.slack_or(tol::CERT_GAP_REL),
        ));
        // p-subadditivity
        let v_sum = norm::norm_with(&mu.add(&nu)?, Method::Auto, &opts)?.value;
        rows.push(le_row(
            "nm-p-subadditivity",
            format!("seed={seed}"),
            p,
            v_sum.powf(p),
            v_mu.value.powf(p) + v_nu.powf(p),
            cfg.slack_or(tol::NORM_BOUND_SLACK),
        ));
        // certificate sandwich
        rows.push(le_row(
            "nm-certificate-sandwich",
            format!("seed={seed}"),
            p,
            (v_mu.lower - v_mu.value).max(v_mu.value - v_mu.upper),
            0.0,
            cfg.slack_or(tol::CERT_GAP_REL * v_mu.value.max(1.0)),
        ));
        rows.push(le_row(
            "nm-dual-below-norm",
            format!("seed={seed}"),
            p,
            v_mu.dual_pairing - v_mu.value,
            0.0,
            cfg.slack_or(tol::CERT_GAP_REL * v_mu.value.max(1.0)),
        ));
        // dilation
        let scaled_space = Arc::new(space.scaled(2.5)?);
        let mu_scaled = Molecule::new(scaled_space, mu.coeffs().to_vec())?;
        let v_dil = norm::norm_with(&mu_scaled, Method::Auto, &opts)?.value;
        rows.push(le_row(
            "nm-dilation",
            format!("seed={seed}"),
            p,
            (v_dil - 2.5 * v_mu.value).abs() / (2.5 * v_mu.value).max(1e-12),
            0.0,
            cfg.slack_or(tol::CERT_GAP_REL),
        ));
    }
    // monotonicity in the exponent: same metric, smaller p, larger norm
    for i in 0..20u64 {
        let seed = cfg.seed.wrapping_add(7100 + i);
        let metric = gen::random_space(seed, 5, 1.0, SpaceKind::RepairedMetric);
        let coeffs = gen::random_molecule(seed, &Arc::new(metric.clone()))?
            .coeffs()
            .to_vec();
        let mut previous: Option<f64> = None;
        for &p in &[1.0, 2.0 / 3.0, 0.5] {
            let space = Arc::new(PMetricSpace::new(
                metric.labels().to_vec(),
                metric.matrix().to_vec(),
                p,
            )?);
            let mu = Molecule::new(space, coeffs.clone())?;
            let v = norm::norm_with(&mu, Method::Auto, &cfg.opts())?.value;
            if let Some(prev) = previous {
                rows.push(le_row(
                    "nm-monotone-in-p",
                    format!("seed={seed};p={p}"),
                    p,
                    prev - v,
                    0.0,
                    cfg.slack_or(tol::CERT_GAP_REL * v.max(1.0)),
                ));
            }
            previous = Some(v);
        }
    }
    // exact rational agreement at p = 1
    for i in 0..10u64 {
        let seed = cfg.seed.wrapping_add(7200 + i);
        let space = Arc::new(gen::random_space(seed, 6, 1.0, SpaceKind::RepairedMetric));
        let mu = gen::random_molecule(seed, &space)?;
        let float = norm::norm_with(&mu, Method::Lp, &cfg.opts())?.value;
        // re-balance the base coefficient exactly in rational arithmetic
        let mut coeffs: Vec<num_rational::BigRational> = mu
            .coeffs()
            .iter()
            .map(|&c| exact::rational_from_f64(c))
            .collect::<Result<_>>()?;
        let tail: num_rational::BigRational = coeffs[1..].iter().sum();
        coeffs[0] = -tail;
        let n = space.n();
        let mut dist = vec![vec![num_traits::Zero::zero(); n]; n];
        for (a, row) in dist.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = exact::rational_from_f64(space.dist(a, b))?;
            }
        }
        let exact_value = exact::rational_to_f64(&exact::exact_norm_p1(&dist, &coeffs)?);
        rows.push(le_row(
            "nm-exact-rational-agreement",
            format!("seed={seed}"),
            1.0,
            (float - exact_value).abs() / exact_value.max(1e-12),
            0.0,
            cfg.slack_or(1e-10),
        ));
        if i == 0 {
            goldens.push(("exact-p1-seed0".to_string(), exact_value));
        }
    }
    // induced operators never exceed the Lipschitz constant of their map
    for i in 0..20u64 {
        let seed = cfg.seed.wrapping_add(7300 + i);
        let p = cfg.p_values[i as usize % cfg.p_values.len()];
        let space = Arc::new(gen::random_space(
            seed,
            6,
            p,
            kinds[i as usize % kinds.len()],
        ));
        let mut rng = gen::rng(seed ^ 0x0b);
        let map: Vec<usize> = (0..6)
            .map(|x| if x == 0 { 0 } else { rng.gen_range(0..6) })
            .collect();
        let (op, lip) =
            crate::operator::operator_from_lipschitz(space.clone(), space.clone(), &map)?;
        let measured = op.operator_norm(&cfg.opts())?.value;
        rows.push(le_row(
            "nm-operator-norm-below-lip",
            format!("seed={seed}"),
            p,
            measured,
            lip,
            cfg.slack_or(tol::NORM_BOUND_SLACK * lip.max(1.0)),
        ));
    }
    rows.extend(c02_telescoping(cfg)?);
    Ok(SuiteReport::new("norms", rows, goldens))
}

fn suite_complement(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = c07_retraction_complements(cfg)?;
    rows.extend(c08_bump_complementation(cfg)?);
    rows.extend(c09_sum_isometry(cfg)?);
    Ok(SuiteReport::new("complement", rows, Vec::new()))
}

fn suite_embed(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = c10_chain_sandwich(cfg)?;
    rows.extend(c11_ultrametric_distortion(cfg)?);
    rows.extend(c12_disjoint_sums(cfg)?);
    // indicator embedding maps: 1-Lipschitz with disjoint supports
    for &p in &[0.5, 1.0] {
        let space = geometric_chain_space(p, 6)?;
        let seq = complement::tonin_select(&space, 25.0 / 9.0, ChainMode::Unbounded, 5)?;
        let built = embed::lp_embedding_maps(&space, &seq);
        rows.push(le_row(
            "em-indicator-maps",
            "geometric-chain".to_string(),
            p,
            if built.is_ok() { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
    }
    // block extraction on an exact sequence-space basis and on the even
    // subbasis of the integer chain
    let exact_seq = embed::LpSequence {
        p: 0.5,
        weights: vec![1.0; 6],
    };
    let basis = embed::extract_blocks(&exact_seq, &embed::BlockParams::default())?;
    rows.push(le_row(
        "em-blocks-exact-sequence",
        format!("achieved={:.6}", basis.achieved),
        0.5,
        basis.shortfall,
        0.0,
        cfg.slack_or(tol::NORM_BOUND_SLACK),
    ));
    let system = bases::natural_basis(8, 0.5)?;
    let even: Vec<Molecule> = (0..4).map(|k| system.vectors[2 * k + 1].clone()).collect();
    let mol_seq = embed::MoleculeSequence {
        molecules: even,
        opts: cfg.opts(),
    };
    let basis = embed::extract_blocks(&mol_seq, &embed::BlockParams::default())?;
    rows.push(le_row(
        "em-blocks-even-subbasis",
        format!("achieved={:.6}", basis.achieved),
        0.5,
        basis.shortfall,
        0.0,
        cfg.slack_or(tol::NORM_BOUND_SLACK),
    ));
    Ok(SuiteReport::new("embed", rows, Vec::new()))
}

fn suite_bases(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = c02_telescoping(cfg)?;
    rows.extend(c03_even_odd_subbasis(cfg)?);
    rows.extend(c04_window_projections(cfg)?);
    rows.extend(c05_interval_projections(cfg)?);
    rows.extend(c06_haar_system(cfg)?);
    rows.extend(c14_dilation_bridge(cfg)?);
    let mut goldens = Vec::new();
    // conditionality witness: the alternating/plain ratio grows strictly
    for &p in &[0.5, 2.0 / 3.0] {
        let table = bases::conditionality_witness(8, p, &cfg.opts())?;
        for w in table.windows(2) {
            rows.push(le_row(
                "bs-conditionality-growth",
                format!("m={} to {}", w[0].m, w[1].m),
                p,
                w[0].ratio,
                w[1].ratio,
                0.0,
            ));
        }
        for row in &table {
            goldens.push((format!("alternating-p{:.4}-m{}", p, row.m), row.alternating));
        }
    }
    // at p = 1 the natural basis is the classical sequence space basis
    let table = bases::conditionality_witness(8, 1.0, &cfg.opts())?;
    for row in &table {
        rows.push(eq_row(
            "bs-envelope-alternating",
            format!("m={}", row.m),
            1.0,
            row.alternating,
            row.m as f64,
            cfg.slack_or(tol::NORM_BOUND_SLACK),
        ));
    }
    // one-sided positive-part bound for combinations of point evaluations
    for &p in &[0.5, 1.0] {
        let grid = make_grid(GridKind::IntegerSegment(7), p)?;
        let mut rng = gen::rng(cfg.seed ^ 0xba5e5);
        for trial in 0..25usize {
            let mut coeffs = vec![0.0f64; 8];
            let mut pos = 0.0f64;
            for c in coeffs.iter_mut().skip(1) {
                let v: f64 = rng.gen_range(-1.0f64..1.0);
                *c = v;
                if v > 0.0 {
                    pos += v.powf(p);
                }
            }
            coeffs[0] = -coeffs[1..].iter().sum::<f64>();
            let mu = Molecule::new(grid.space.clone(), coeffs)?;
            let v = norm::norm_with(&mu, Method::Auto, &cfg.opts())?.value;
            rows.push(le_row(
                "bs-positive-part-lower-bound",
                format!("trial={trial}"),
                p,
                pos.powf(1.0 / p),
                v,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
    }
    // natural basis internal identities
    for &p in &[0.5, 1.0] {
        let system = bases::natural_basis(8, p)?;
        let check = system.check()?;
        rows.push(le_row(
            "bs-natural-identities",
            "m=8".to_string(),
            p,
            check
                .compose_err
                .max(check.fix_err)
                .max(check.annihilate_err)
                .max(check.rank_err),
            0.0,
            cfg.slack_or(tol::MATRIX_ID_EXACT),
        ));
        for (n, v) in system.vectors.iter().enumerate() {
            let value = norm::norm_with(v, Method::Auto, &cfg.opts())?.value;
            rows.push(eq_row(
                "bs-natural-normalized",
                format!("n={}", n + 1),
                p,
                value,
                1.0,
                cfg.slack_or(tol::NORM_BOUND_SLACK),
            ));
        }
    }
    // basis constants of both systems, also emitted as a dedicated table
    let mut table = String::from("system,p,N_or_m,basis_constant,bound,margin\n");
    let jobs: Vec<(&str, usize, f64)> = [0.5, 2.0 / 3.0, 1.0]
        .iter()
        .flat_map(|&p| {
            [
                ("natural", 6usize, p),
                ("natural", 8, p),
                ("haar", 2, p),
                ("haar", 3, p),
            ]
        })
        .collect();
    let opts = cfg.opts();
    let results: Vec<(String, f64, f64, CheckRow)> = jobs
        .par_iter()
        .map(|&(system, size, p)| {
            let (sys, bound) = match system {
                "natural" => (bases::natural_basis(size, p)?, 1.0),
                _ => (
                    bases::haar_system(size as u32, p)?,
                    3f64.powf(1.0 / p - 1.0),
                ),
            };
            let report = bases::basis_constant(&sys, &opts)?;
            let row = if system == "natural" {
                // bi-monotone: projections and their windows all have norm 1
                eq_row(
                    "bs-basis-constant",
                    format!("system={system};m={size}"),
                    p,
                    report.max_projection_norm.max(report.max_window_norm),
                    1.0,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                )
            } else {
                le_row(
                    "bs-basis-constant",
                    format!("system={system};level={size}"),
                    p,
                    report.max_projection_norm,
                    bound,
                    cfg.slack_or(tol::NORM_BOUND_SLACK),
                )
            };
            Ok((system.to_string(), report.max_projection_norm, bound, row))
        })
        .collect::<Result<_>>()?;
    for ((system, constant, bound, row), &(_, size, p)) in results.into_iter().zip(&jobs) {
        table.push_str(&format!(
            "{system},{},{size},{},{},{}\n",
            io::fmt_f64(p),
            io::fmt_f64(constant),
            io::fmt_f64(bound),
            io::fmt_f64(bound - constant),
        ));
        goldens.push((format!("basis-constant-{system}-{size}-p{p:.4}"), constant));
        rows.push(row);
    }
    let mut report = SuiteReport::new("bases", rows, goldens);
    report
        .tables
        .push(("bases-constants.csv".to_string(), table));
    Ok(report)
}

/// A named acceptance criterion.
pub type Criterion = (&'static str, fn(&SuiteConfig) -> Result<Vec<CheckRow>>);

/// All fourteen acceptance criteria as one labeled list.
pub fn acceptance_criteria(cfg: &SuiteConfig) -> Vec<Criterion> {
    let _ = cfg;
    vec![
        ("c01-oracle-agreement", c01_oracle_agreement),
        ("c02-telescoping", c02_telescoping),
        ("c03-even-odd-subbasis", c03_even_odd_subbasis),
        ("c04-window-projections", c04_window_projections),
        ("c05-interval-projections", c05_interval_projections),
        ("c06-haar-system", c06_haar_system),
        ("c07-retraction-complements", c07_retraction_complements),
        ("c08-bump-complementation", c08_bump_complementation),
        ("c09-sum-isometry", c09_sum_isometry),
        ("c10-chain-sandwich", c10_chain_sandwich),
        ("c11-ultrametric-distortion", c11_ultrametric_distortion),
        ("c12-disjoint-sums", c12_disjoint_sums),
        ("c13-quotient-preservation", c13_quotient_preservation),
        ("c14-dilation-bridge", c14_dilation_bridge),
    ]
}
