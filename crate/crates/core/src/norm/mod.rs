//! The free p-space norm of a molecule, with primal/dual certificates.
//!
//! The unit ball of the free p-space over a finite space is the closed
//! absolutely p-convex hull of the elementary molecules
//! `(delta(y) - delta(x)) / d(x,y)`, so the norm is the gauge
//! `min (sum |lambda_e|^p)^(1/p)` over decompositions into elementary
//! molecules. Two exact routes are implemented:
//!
//! - `Lp` (p = 1 only): the transport linear program in flow form, with
//!   optimal node potentials as the matching inequality-form solution;
//! - `Enumerate` (any p <= 1): exact search over forest-supported basic
//!   decompositions over forest supports.
//!
//! `BoundsOnly` pairs a greedy peel decomposition (upper bound) with the
//! transport dual (lower bound) for instances beyond the enumeration cap.

mod forest;
mod transport;

pub use forest::MAX_POINTS;

use crate::error::{Error, Result};
use crate::molecule::{LipschitzFunction, Molecule};
use crate::tol;

/// Norm computation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// `Lp` at p = 1; otherwise `Enumerate` when the space fits the cap,
    /// else `BoundsOnly`.
    #[default]
    Auto,
    /// Transport linear program; requires p = 1.
    Lp,
    /// Exact concave minimization over forest supports; capped size.
    Enumerate,
    /// Greedy upper bound plus transport dual lower bound.
    BoundsOnly,
}

/// Which route actually produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Lp,
    Enumerate,
    BoundsOnly,
    Trivial,
}

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    /// Largest point count accepted by `Enumerate` (default 9).
    pub enumerate_cap: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { enumerate_cap: 9 }
    }
}

/// One term of a primal decomposition: `lambda * (delta(y) - delta(x)) / d(x,y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimalTerm {
    pub x: usize,
    pub y: usize,
    pub lambda: f64,
}

/// A norm value sandwiched by certificates.
///
/// `upper` is the p-cost of the reported primal decomposition, which always
/// reproduces the molecule; `lower` is a certified lower bound. For the
/// exact methods the two coincide with `value` (exhaustive search over
/// basic decompositions is itself the optimality certificate at p < 1).
/// `dual` is the best transport-dual Lipschitz function; its pairing equals
/// the norm at p = 1 and is only a lower bound below that.
#[derive(Debug, Clone)]
pub struct NormCertificate {
    pub value: f64,
    pub upper: f64,
    pub lower: f64,
    pub primal: Vec<PrimalTerm>,
    pub dual: LipschitzFunction,
    pub dual_pairing: f64,
    pub gap: f64,
    pub method: MethodUsed,
}

/// Norm with automatic method choice and default caps.
pub fn norm(molecule: &Molecule) -> Result<NormCertificate> {
    norm_with(molecule, Method::Auto, &NormOptions::default())
}

/// Norm with an explicit method and caps.
pub fn norm_with(
    molecule: &Molecule,
    method: Method,
    opts: &NormOptions,
) -> Result<NormCertificate> {
    let space = molecule.space();
    let n = space.n();
    let p = space.p();
    if n == 1 {
        return Ok(trivial_certificate(molecule));
    }
    match method {
        Method::Auto => {
            if p == 1.0 {
                lp_norm(molecule)
            } else if n <= opts.enumerate_cap && n <= MAX_POINTS {
                enumerate_norm(molecule)
            } else {
                bounds_only(molecule)
            }
        }
        Method::Lp => {
            if p != 1.0 {
                return Err(Error::Structural(format!(
                    "the lp method solves the p = 1 norm; this space has p = {p} \
                     (use enumerate or bounds_only)"
                )));
            }
            lp_norm(molecule)
        }
        Method::Enumerate => {
            if n > opts.enumerate_cap || n > MAX_POINTS {
                return Err(Error::resource(format!(
                    "enumerate is capped at {} points but the space has {n}; \
                     use bounds_only for a certified sandwich",
                    opts.enumerate_cap.min(MAX_POINTS)
                )));
            }
            enumerate_norm(molecule)
        }
        Method::BoundsOnly => bounds_only(molecule),
    }
}

/// Best lower bound from a real Lipschitz function: maximizes `<f, mu>`
/// over `|f(x) - f(y)| <= d(x,y)`, `f(0) = 0`.
///
/// This equals the p = 1 norm over the same distance matrix, hence it is
/// the exact norm at p = 1 and a lower bound when p < 1.
pub fn dual_lower_bound(molecule: &Molecule) -> Result<(f64, LipschitzFunction)> {
    let space = molecule.space();
    let n = space.n();
    if n == 1 {
        return Ok((0.0, LipschitzFunction::new(vec![0.0])?));
    }
    let t = transport::solve(&|i, j| space.dist(i, j), n, molecule.coeffs())?;
    let f = anchored(t.potentials);
    let f = LipschitzFunction::new(f)?;
    let value = f.pairing(molecule);
    Ok((value, f))
}

fn anchored(mut values: Vec<f64>) -> Vec<f64> {
    let base = values[0];
    for v in &mut values {
        *v -= base;
    }
    values[0] = 0.0;
    values
}

fn trivial_certificate(molecule: &Molecule) -> NormCertificate {
    NormCertificate {
        value: 0.0,
        upper: 0.0,
        lower: 0.0,
        primal: Vec::new(),
        dual: LipschitzFunction::new(vec![0.0; molecule.space().n().max(1)])
            .unwrap_or_else(|_| LipschitzFunction::new(vec![0.0]).unwrap()),
        dual_pairing: 0.0,
        gap: 0.0,
        method: MethodUsed::Trivial,
    }
}

fn lp_norm(molecule: &Molecule) -> Result<NormCertificate> {
    let space = molecule.space();
    let n = space.n();
    let t = transport::solve(&|i, j| space.dist(i, j), n, molecule.coeffs())?;
    let primal = flows_to_primal(&t.flows, &|i, j| space.dist(i, j));
    check_primal(molecule, &primal)?;
    let upper: f64 = primal.iter().map(|t| t.lambda.abs()).sum();
    let dual = LipschitzFunction::new(anchored(t.potentials))?;
    let dual_pairing = dual.pairing(molecule);
    let value = t.cost;
    let gap = upper - dual_pairing;
    if gap.abs() > tol::CERT_GAP_REL * value.max(1.0) {
        return Err(Error::Internal(format!(
            "transport duality gap {gap:.3e} exceeds tolerance"
        )));
    }
    Ok(NormCertificate {
        value,
        upper,
        lower: dual_pairing,
        primal,
        dual,
        dual_pairing,
        gap,
        method: MethodUsed::Lp,
    })
}

fn enumerate_norm(molecule: &Molecule) -> Result<NormCertificate> {
    let space = molecule.space();
    let n = space.n();
    let p = space.p();
    let w_p: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| space.dist_p(i, j)).collect())
        .collect();
    let mass = molecule.mass();
    let zero_tol = tol::MASS_ZERO_REL * mass + tol::MOLECULE_BALANCE;
    let sol = forest::min_forest(molecule.coeffs(), &w_p, p, zero_tol);
    if !sol.cost_p.is_finite() {
        return Err(Error::internal("forest search found no balanced partition"));
    }
    let primal: Vec<PrimalTerm> = merge_terms(sol.edges.iter().map(|e| {
        let (x, y, sign) = if e.child < e.parent {
            (e.child, e.parent, -1.0)
        } else {
            (e.parent, e.child, 1.0)
        };
        PrimalTerm {
            x,
            y,
            lambda: sign * e.flow * space.dist(x, y),
        }
    }));
    check_primal(molecule, &primal)?;
    let upper = p_cost(&primal, p);
    // Exhaustion over basic decompositions certifies the optimum, so the
    // certified lower bound is the value itself; the transport dual is
    // reported for reference and is strictly weaker when p < 1.
    let (dual_pairing, dual) = dual_lower_bound(molecule)?;
    if dual_pairing > upper * (1.0 + tol::CERT_GAP_REL) + tol::CERT_GAP_REL {
        return Err(Error::Internal(format!(
            "transport dual {dual_pairing:.12e} exceeds enumerated norm {upper:.12e}"
        )));
    }
    Ok(NormCertificate {
        value: upper,
        upper,
        lower: upper,
        primal,
        dual,
        dual_pairing,
        gap: 0.0,
        method: MethodUsed::Enumerate,
    })
}

fn bounds_only(molecule: &Molecule) -> Result<NormCertificate> {
    let space = molecule.space();
    let p = space.p();
    // Greedy peel: repeatedly ship the largest positive coefficient to the
    // most negative one.
    let mut residual = molecule.coeffs().to_vec();
    let total = molecule.mass();
    let stop = tol::MASS_ZERO_REL * total + tol::MOLECULE_BALANCE;
    let mut primal = Vec::new();
    loop {
        let (mut hi, mut lo) = (usize::MAX, usize::MAX);
        let (mut hi_v, mut lo_v) = (0.0f64, 0.0f64);
        for (i, &c) in residual.iter().enumerate() {
            if c > hi_v {
                hi_v = c;
                hi = i;
            }
            if c < lo_v {
                lo_v = c;
                lo = i;
            }
        }
        if hi == usize::MAX || lo == usize::MAX || hi_v.min(-lo_v) <= stop {
            break;
        }
        let t = hi_v.min(-lo_v);
        residual[hi] -= t;
        residual[lo] += t;
        // Shipping t from hi to lo is t * (delta(hi) - delta(lo)).
        let (x, y, sign) = if hi < lo {
            (hi, lo, -1.0)
        } else {
            (lo, hi, 1.0)
        };
        primal.push(PrimalTerm {
            x,
            y,
            lambda: sign * t * space.dist(x, y),
        });
    }
    let primal = merge_terms(primal.into_iter());
    check_primal(molecule, &primal)?;
    let upper = p_cost(&primal, p);
    let (dual_pairing, dual) = dual_lower_bound(molecule)?;
    Ok(NormCertificate {
        value: upper,
        upper,
        lower: dual_pairing,
        primal,
        dual,
        dual_pairing,
        gap: upper - dual_pairing,
        method: MethodUsed::BoundsOnly,
    })
}

fn flows_to_primal(
    flows: &[(usize, usize, f64)],
    dist: &dyn Fn(usize, usize) -> f64,
) -> Vec<PrimalTerm> {
    merge_terms(flows.iter().map(|&(a, b, f)| {
        // f * (delta(a) - delta(b))
        let (x, y, sign) = if a < b { (a, b, -1.0) } else { (b, a, 1.0) };
        PrimalTerm {
            x,
            y,
            lambda: sign * f * dist(x, y),
        }
    }))
}

/// Merges repeated pairs and sorts terms by pair for deterministic output.
fn merge_terms(iter: impl Iterator<Item = PrimalTerm>) -> Vec<PrimalTerm> {
    let mut terms: Vec<PrimalTerm> = Vec::new();
    for t in iter {
        if let Some(existing) = terms.iter_mut().find(|e| e.x == t.x && e.y == t.y) {
            existing.lambda += t.lambda;
        } else {
            terms.push(t);
        }
    }
    terms.retain(|t| t.lambda != 0.0);
    terms.sort_by_key(|t| (t.x, t.y));
    terms
}

fn p_cost(terms: &[PrimalTerm], p: f64) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let s: f64 = terms
        .iter()
        .map(|t| {
            if p == 1.0 {
                t.lambda.abs()
            } else {
                t.lambda.abs().powf(p)
            }
        })
        .sum();
    if p == 1.0 {
        s
    } else {
        s.powf(1.0 / p)
    }
}

/// Verifies that a primal decomposition reproduces its molecule.
fn check_primal(molecule: &Molecule, terms: &[PrimalTerm]) -> Result<()> {
    let space = molecule.space();
    let mut rebuilt = vec![0.0f64; space.n()];
    for t in terms {
        let unit = t.lambda / space.dist(t.x, t.y);
        rebuilt[t.y] += unit;
        rebuilt[t.x] -= unit;
    }
    let scale = molecule.mass().max(1.0);
    for (i, (&r, &c)) in rebuilt.iter().zip(molecule.coeffs()).enumerate() {
        if (r - c).abs() > tol::PRIMAL_REPRO * scale {
            return Err(Error::Internal(format!(
                "primal decomposition misses coefficient {i}: {r:.12e} vs {c:.12e}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::elementary_molecules;
    use crate::space::{make_grid, GridKind};

    #[test]
    fn elementary_molecules_have_norm_one_for_every_method() {
        for &p in &[1.0, 2.0 / 3.0, 0.5] {
            let g = make_grid(GridKind::IntegerSegment(4), p).unwrap();
            for (_, _, m) in elementary_molecules(&g.space) {
                let cert = norm(&m).unwrap();
                assert!(
                    (cert.value - 1.0).abs() < 1e-12,
                    "p={p}: got {}",
                    cert.value
                );
            }
        }
    }

    #[test]
    fn telescoping_sum_has_norm_m_minus_k() {
        for &p in &[0.5, 2.0 / 3.0, 1.0] {
            let g = make_grid(GridKind::IntegerSegment(8), p).unwrap();
            for k in 0..8 {
                for m in (k + 1)..=8 {
                    let mu = Molecule::dirac_diff(g.space.clone(), m, k).unwrap();
                    let cert = norm(&mu).unwrap();
                    let expect = (m - k) as f64;
                    assert!(
                        (cert.value - expect).abs() < 1e-10,
                        "p={p}, k={k}, m={m}: {} vs {expect}",
                        cert.value
                    );
                }
            }
        }
    }

    #[test]
    fn lp_method_rejects_p_below_one() {
        let g = make_grid(GridKind::IntegerSegment(2), 0.5).unwrap();
        let mu = Molecule::dirac_diff(g.space.clone(), 2, 0).unwrap();
        assert!(matches!(
            norm_with(&mu, Method::Lp, &NormOptions::default()),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn enumerate_cap_produces_resource_error() {
        let g = make_grid(GridKind::IntegerSegment(11), 0.5).unwrap();
        let mu = Molecule::dirac_diff(g.space.clone(), 11, 0).unwrap();
        let err = norm_with(&mu, Method::Enumerate, &NormOptions::default());
        match err {
            Err(Error::Resource { message }) => {
                assert!(message.contains("bounds_only"), "{message}");
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn bounds_only_sandwiches_the_exact_value() {
        let g = make_grid(GridKind::IntegerSegment(6), 0.5).unwrap();
        let mut coeffs = vec![0.0; 7];
        coeffs[1] = 1.0;
        coeffs[3] = -2.0;
        coeffs[6] = 1.0;
        let mu = Molecule::new(g.space.clone(), coeffs).unwrap();
        let exact = norm_with(&mu, Method::Enumerate, &NormOptions::default()).unwrap();
        let bounds = norm_with(&mu, Method::BoundsOnly, &NormOptions::default()).unwrap();
        assert!(bounds.lower <= exact.value + 1e-12);
        assert!(bounds.upper >= exact.value - 1e-12);
    }

    #[test]
    fn dual_function_on_segment_is_the_coordinate() {
        let g = make_grid(GridKind::IntegerSegment(3), 1.0).unwrap();
        let mu = Molecule::dirac_diff(g.space.clone(), 3, 0).unwrap();
        let (value, f) = dual_lower_bound(&mu).unwrap();
        assert!((value - 3.0).abs() < 1e-12);
        assert!(f.lip(&g.space) <= 1.0 + 1e-12);
        assert!((f.pairing(&mu) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lp_and_enumerate_agree_at_p_one() {
        let g = make_grid(GridKind::IntegerSegment(5), 1.0).unwrap();
        let mut coeffs = vec![0.5, -1.25, 0.25, 0.0, 1.0, -0.5];
        coeffs[0] -= coeffs.iter().sum::<f64>();
        let mu = Molecule::new(g.space.clone(), coeffs).unwrap();
        let a = norm_with(&mu, Method::Lp, &NormOptions::default()).unwrap();
        let b = norm_with(&mu, Method::Enumerate, &NormOptions::default()).unwrap();
        assert!((a.value - b.value).abs() <= 1e-10 * a.value.max(1.0));
    }
}
