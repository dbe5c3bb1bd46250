//! Embeddings of sequence spaces into free p-spaces and their witnesses:
//! finite step functions with exact p-quasinorms, disjoint-support
//! Lipschitz sums, the indicator embedding built from a chain with radii,
//! the lower-bound sandwich for chain molecules, and a block-basis
//! extractor with honest measured constants.

use std::sync::Arc;

use rand::Rng;

use crate::complement::ToninSequence;
use crate::error::{Error, Result};
use crate::gen;
use crate::molecule::Molecule;
use crate::norm::{self, NormOptions};
use crate::space::PMetricSpace;
use crate::tol;

/// A piecewise-constant function on the line: value `values[i]` on
/// `(breaks[i], breaks[i+1]]`, zero outside. Canonical form merges
/// adjacent equal values and trims zero tails.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::structural(
                "breakpoints must outnumber values by one",
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::structural("breakpoints must be strictly increasing"));
        }
        Ok(StepFunction { breaks, values }.canonical())
    }

    pub fn zero() -> Self {
        StepFunction {
            breaks: vec![0.0],
            values: Vec::new(),
        }
    }

    /// Indicator of `(0, r]`; zero when `r <= 0`.
    pub fn indicator_to(r: f64) -> Self {
        if r > 0.0 {
            StepFunction {
                breaks: vec![0.0, r],
                values: vec![1.0],
            }
        } else {
            Self::zero()
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn canonical(self) -> Self {
        if self.values.is_empty() {
            return StepFunction {
                breaks: vec![0.0],
                values: Vec::new(),
            };
        }
        let mut breaks = vec![self.breaks[0]];
        let mut values: Vec<f64> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            if values.last() == Some(&v) {
                // extend the previous piece's right end
                *breaks.last_mut().expect("nonempty") = self.breaks[i + 1];
            } else {
                values.push(v);
                breaks.push(self.breaks[i + 1]);
            }
        }
        // zero outside is implicit, so trim zero pieces at both ends
        while values.first() == Some(&0.0) {
            values.remove(0);
            breaks.remove(0);
        }
        while values.last() == Some(&0.0) {
            values.pop();
            breaks.pop();
        }
        if values.is_empty() {
            breaks = vec![0.0];
        }
        StepFunction { breaks, values }
    }

    /// `(sum |c_i|^p (t_i - t_{i-1}))^(1/p)`.
    pub fn quasinorm(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            if *v != 0.0 {
                acc += v.abs().powf(p) * (self.breaks[i + 1] - self.breaks[i]);
            }
        }
        acc.powf(1.0 / p)
    }

    pub fn scaled(&self, c: f64) -> Self {
        StepFunction {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
        .canonical()
    }

    fn value_at(&self, t: f64) -> f64 {
        // value on (breaks[i], breaks[i+1]]
        for (i, v) in self.values.iter().enumerate() {
            if t > self.breaks[i] && t <= self.breaks[i + 1] {
                return *v;
            }
        }
        0.0
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        let mut cuts: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .cloned()
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        if cuts.len() < 2 {
            return StepFunction::zero();
        }
        let values: Vec<f64> = cuts
            .windows(2)
            .map(|w| self.value_at(w[1]) + other.value_at(w[1]))
            .collect();
        StepFunction {
            breaks: cuts,
            values,
        }
        .canonical()
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.add(&other.scaled(-1.0))
    }

    /// `||self - other||_p` without building the difference.
    pub fn sub_quasinorm(&self, other: &StepFunction, p: f64) -> f64 {
        self.sub(other).quasinorm(p)
    }
}

/// One tent bump on the line: center, support radius (in the underlying
/// coordinate), and a sign for the indicator it produces.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub sign: f64,
}

impl Bump {
    /// Tent height at `x`: `max(radius - |x - center|, 0)`.
    pub fn height(&self, x: f64) -> f64 {
        (self.radius - (x - self.center).abs()).max(0.0)
    }

    /// The map into step functions: `sign * indicator (0, height]`.
    pub fn map(&self, x: f64) -> StepFunction {
        StepFunction::indicator_to(self.height(x)).scaled(self.sign)
    }
}

/// Measured Lipschitz data for a sum of disjointly supported maps.
#[derive(Debug, Clone)]
pub struct SumLipReport {
    /// Largest sampled ratio for the sum map.
    pub measured: f64,
    /// Sample pair attaining it.
    pub witness: (f64, f64),
    /// Largest sampled ratio over the individual maps.
    pub individual: f64,
    /// `individual * 2^(1/q - 1)`.
    pub bound: f64,
    pub samples: usize,
}

/// Samples the Lipschitz constant of `sum_i f_i` for tent-indicator maps
/// with disjoint supports, against the domain distance `|x - y|^(1/q)`
/// (the line viewed at the same exponent as the codomain).
///
/// The intermediate points used by the two-sided estimate come from
/// recursive midpoint insertion (depth `midpoint_depth`), which keeps the
/// sample segment-closed.
pub fn disjoint_sum_check(
    bumps: &[Bump],
    q: f64,
    base_samples: &[f64],
    midpoint_depth: u32,
) -> Result<SumLipReport> {
    if bumps.is_empty() {
        return Err(Error::structural("no maps to sum"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::structural("codomain exponent must lie in (0, 1]"));
    }
    for (i, a) in bumps.iter().enumerate() {
        if !(a.radius > 0.0) {
            return Err(Error::Structural(format!("bump {i} has empty support")));
        }
        for (j, b) in bumps.iter().enumerate().skip(i + 1) {
            if (a.center - b.center).abs() < a.radius + b.radius {
                return Err(Error::Structural(format!(
                    "supports of bumps {i} and {j} overlap"
                )));
            }
        }
    }
    let mut samples: Vec<f64> = base_samples.to_vec();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples.dedup();
    for _ in 0..midpoint_depth {
        let mut denser = Vec::with_capacity(samples.len() * 2);
        for w in samples.windows(2) {
            denser.push(w[0]);
            denser.push(0.5 * (w[0] + w[1]));
        }
        denser.push(*samples.last().expect("nonempty samples"));
        samples = denser;
        if samples.len() > 6000 {
            break;
        }
    }
    let dist = |x: f64, y: f64| (x - y).abs().powf(1.0 / q);

    let images: Vec<StepFunction> = samples
        .iter()
        .map(|&x| {
            bumps
                .iter()
                .fold(StepFunction::zero(), |acc, b| acc.add(&b.map(x)))
        })
        .collect();
    let mut measured = 0.0f64;
    let mut witness = (0.0, 0.0);
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = dist(samples[i], samples[j]);
            if d == 0.0 {
                continue;
            }
            let r = images[i].sub_quasinorm(&images[j], q) / d;
            if r > measured {
                measured = r;
                witness = (samples[i], samples[j]);
            }
        }
    }
    let mut individual = 0.0f64;
    for b in bumps {
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                let d = dist(samples[i], samples[j]);
                if d == 0.0 {
                    continue;
                }
                let r = b.map(samples[i]).sub_quasinorm(&b.map(samples[j]), q) / d;
                individual = individual.max(r);
            }
        }
    }
    let bound = individual * 2f64.powf(1.0 / q - 1.0);
    Ok(SumLipReport {
        measured,
        witness,
        individual,
        bound,
        samples: samples.len(),
    })
}

/// The indicator embedding attached to a chain: point `x` maps to the
/// indicator of `(0, g_n(x)]` with `g_n(x) = max(r_n - d^p(x, x_n), 0)`.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    pub center: usize,
    pub radius: f64,
    /// `g_n` evaluated at every point of the space.
    pub heights: Vec<f64>,
}

impl EmbeddingMap {
    pub fn image(&self, point: usize) -> StepFunction {
        StepFunction::indicator_to(self.heights[point])
    }
}

/// Builds the embedding maps of a chain and verifies that each is
/// 1-Lipschitz into the step functions, sends its center to the indicator
/// of `(0, r_n]`, and that supports are pairwise disjoint.
pub fn lp_embedding_maps(
    space: &Arc<PMetricSpace>,
    seq: &ToninSequence,
) -> Result<Vec<EmbeddingMap>> {
    seq.validate(space)?;
    let p = space.p();
    let n = space.n();
    let maps: Vec<EmbeddingMap> = seq
        .points
        .iter()
        .zip(&seq.radii)
        .map(|(&c, &r)| EmbeddingMap {
            center: c,
            radius: r,
            heights: (0..n).map(|x| (r - space.dist_p(x, c)).max(0.0)).collect(),
        })
        .collect();
    for (k, m) in maps.iter().enumerate() {
        if (m.heights[m.center] - m.radius).abs() > tol::NORM_BOUND_SLACK * m.radius.max(1.0) {
            return Err(Error::Internal(format!(
                "map {k} does not hit the full indicator at its center"
            )));
        }
        for x in 0..n {
            for y in (x + 1)..n {
                let lhs = m.image(x).sub_quasinorm(&m.image(y), p);
                let d = space.dist(x, y);
                if lhs > d * (1.0 + tol::NORM_BOUND_SLACK) {
                    return Err(Error::Internal(format!(
                        "map {k} is not 1-Lipschitz on pair ({x},{y}): {lhs:.6e} > {d:.6e}"
                    )));
                }
            }
        }
    }
    for a in 0..maps.len() {
        for b in (a + 1)..maps.len() {
            for x in 0..n {
                if maps[a].heights[x] > 0.0 && maps[b].heights[x] > 0.0 {
                    return Err(Error::Internal(format!(
                        "supports of maps {a} and {b} meet at point {x}"
                    )));
                }
            }
        }
    }
    Ok(maps)
}

/// One row of a chain sandwich report.
#[derive(Debug, Clone)]
pub struct SandwichRow {
    pub norm: f64,
    pub lower: f64,
    pub upper: f64,
}

/// For each coefficient vector `a`, computes the exact norm of
/// `sum a_n b_n` over the consecutive chain molecules and checks
/// `(2 / 2^(1/p)) (1/t) ||a||_p <= norm <= ||a||_p`.
pub fn chain_sandwich(
    space: &Arc<PMetricSpace>,
    seq: &ToninSequence,
    coeff_vectors: &[Vec<f64>],
    opts: &NormOptions,
) -> Result<Vec<SandwichRow>> {
    let p = space.p();
    let k = seq.points.len();
    if k < 2 {
        return Err(Error::structural("chain too short"));
    }
    if seq.radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::structural(
            "chain sandwich needs radii increasing along the chain",
        ));
    }
    // restrict to the chain points; base point is the anchor
    let chain_space = Arc::new(space.restrict(&seq.points)?);
    let molecules: Vec<Molecule> = (1..k)
        .map(|i| Molecule::elementary(chain_space.clone(), i - 1, i))
        .collect::<Result<_>>()?;
    let factor = (2.0 / 2f64.powf(1.0 / p)) / seq.t;
    let mut rows = Vec::with_capacity(coeff_vectors.len());
    for a in coeff_vectors {
        if a.len() != k - 1 {
            return Err(Error::structural("coefficient length mismatch"));
        }
        let combo = Molecule::combine(&molecules, a)?;
        let value = norm::norm_with(&combo, norm::Method::Auto, opts)?.value;
        let lp: f64 = a.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        rows.push(SandwichRow {
            norm: value,
            lower: factor * lp,
            upper: lp,
        });
    }
    Ok(rows)
}

/// An abstract normalized sequence with an exact norm for finite
/// combinations.
pub trait NormedSequence {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn p(&self) -> f64;
    /// Norm of `sum_j coeffs[j] * x_j`.
    fn norm(&self, coeffs: &[f64]) -> Result<f64>;
}

/// The unit vector basis of a weighted sequence space (closed form).
pub struct LpSequence {
    pub p: f64,
    pub weights: Vec<f64>,
}

impl NormedSequence for LpSequence {
    fn len(&self) -> usize {
        self.weights.len()
    }
    fn p(&self) -> f64 {
        self.p
    }
    fn norm(&self, coeffs: &[f64]) -> Result<f64> {
        Ok(coeffs
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| (c * w).abs().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p))
    }
}

/// A sequence of molecules in a free p-space, normed by the exact oracle.
pub struct MoleculeSequence {
    pub molecules: Vec<Molecule>,
    pub opts: NormOptions,
}

impl NormedSequence for MoleculeSequence {
    fn len(&self) -> usize {
        self.molecules.len()
    }
    fn p(&self) -> f64 {
        self.molecules[0].space().p()
    }
    fn norm(&self, coeffs: &[f64]) -> Result<f64> {
        let combo = Molecule::combine(&self.molecules, coeffs)?;
        Ok(norm::norm_with(&combo, norm::Method::Auto, &self.opts)?.value)
    }
}

/// Parameters of the block-basis extraction.
#[derive(Debug, Clone, Copy)]
pub struct BlockParams {
    pub epsilon: f64,
    pub blocks: usize,
    pub seed: u64,
    /// Random restarts per inner maximization.
    pub restarts: usize,
}

impl Default for BlockParams {
    fn default() -> Self {
        BlockParams {
            epsilon: 0.25,
            blocks: 2,
            seed: 42,
            restarts: 24,
        }
    }
}

/// Result of the block extraction: disjoint normalized blocks, tail
/// domination estimates, and the honestly measured lower constant.
#[derive(Debug, Clone)]
pub struct BlockBasis {
    /// `windows[k] = (lo, hi)`: block `k` is supported on indices
    /// `lo..hi`.
    pub windows: Vec<(usize, usize)>,
    /// Block coefficient vectors over the ambient sequence (normalized).
    pub blocks: Vec<Vec<f64>>,
    /// Estimated tail domination constants, nonincreasing.
    pub m_hat: Vec<f64>,
    /// Smallest sampled ratio `norm / ||a||_p` over random coefficient
    /// vectors on the blocks.
    pub achieved: f64,
    /// `max(0, (1 - epsilon) - achieved)`, reported rather than hidden.
    pub shortfall: f64,
    pub requested: f64,
}

/// Extracts normalized blocks with disjoint supports whose lower
/// `l_p`-domination constant approaches the best the tail allows.
///
/// The inner maximizations are seeded random searches with coordinate
/// ascent, so `m_hat` and the lower constant are estimates; the output
/// reports the measured constant and the shortfall against `1 - epsilon`
/// instead of asserting the limit statement.
pub fn extract_blocks(seq: &dyn NormedSequence, params: &BlockParams) -> Result<BlockBasis> {
    let j = seq.len();
    if j < 2 {
        return Err(Error::structural("ambient sequence too short"));
    }
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(Error::structural("epsilon must lie in (0, 1)"));
    }
    let p = seq.p();
    let mut rng = gen::rng(params.seed);

    // m_hat[n]: estimated best ratio ||a||_p / ||sum a x|| over vectors
    // supported past n; suffix maximum keeps it monotone.
    let mut m_hat = vec![1.0f64; j];
    for n in (0..j).rev() {
        let est = estimate_tail_ratio(seq, n, params.restarts, &mut rng)?.0;
        m_hat[n] = if n + 1 < j {
            est.max(m_hat[n + 1])
        } else {
            est
        };
    }
    let m_limit = m_hat[j - 1];
    let threshold = (1.0 - params.epsilon).powf(-0.5) * m_limit;
    let n0 = (0..j).find(|&n| m_hat[n] <= threshold).unwrap_or(j - 1);

    let mut windows = Vec::new();
    let mut blocks = Vec::new();
    let target = (1.0 - params.epsilon).sqrt() * m_limit;
    let mut lo = n0;
    while blocks.len() < params.blocks && lo < j {
        let mut hi = lo + 1;
        let mut found: Option<Vec<f64>> = None;
        while hi <= j {
            let (ratio, best) = estimate_window_ratio(seq, lo, hi, params.restarts, &mut rng)?;
            if ratio >= target * (1.0 - 1e-9) {
                found = Some(best);
                break;
            }
            hi += 1;
        }
        match found {
            Some(coeffs) => {
                // normalize to unit norm
                let nrm = seq.norm(&coeffs)?;
                let block: Vec<f64> = coeffs.iter().map(|c| c / nrm).collect();
                let renormed = seq.norm(&block)?;
                if (renormed - 1.0).abs() > tol::NORM_BOUND_SLACK {
                    return Err(Error::Internal(format!(
                        "block failed to normalize: {renormed:.12e}"
                    )));
                }
                windows.push((lo, hi));
                blocks.push(block);
                lo = hi;
            }
            None => break, // window exhausted; report what was achieved
        }
    }
    if blocks.is_empty() {
        return Err(Error::structural(
            "no block reached the target ratio inside the ambient sequence",
        ));
    }

    // measure the lower constant on sampled coefficient vectors
    let mut achieved = f64::INFINITY;
    for _ in 0..64 {
        let a: Vec<f64> = (0..blocks.len())
            .map(|_| {
                let v: f64 = rng.gen_range(-1.0f64..1.0);
                if v.abs() < 0.05 {
                    0.05f64.copysign(v)
                } else {
                    v
                }
            })
            .collect();
        let mut combo = vec![0.0f64; j];
        for (k, block) in blocks.iter().enumerate() {
            for (idx, c) in combo.iter_mut().enumerate() {
                *c += a[k] * block[idx];
            }
        }
        let nrm = seq.norm(&combo)?;
        let lp: f64 = a.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        achieved = achieved.min(nrm / lp);
    }
    let requested = 1.0 - params.epsilon;
    Ok(BlockBasis {
        windows,
        blocks,
        m_hat,
        achieved,
        shortfall: (requested - achieved).max(0.0),
        requested,
    })
}

/// Best ratio `||a||_p / norm` over vectors supported past `n`.
fn estimate_tail_ratio(
    seq: &dyn NormedSequence,
    n: usize,
    restarts: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    estimate_window_ratio(seq, n, seq.len(), restarts, rng)
}

/// Best ratio `||a||_p / norm` over vectors supported on `lo..hi`, by
/// random restarts plus coordinate ascent.
fn estimate_window_ratio(
    seq: &dyn NormedSequence,
    lo: usize,
    hi: usize,
    restarts: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    let j = seq.len();
    let p = seq.p();
    let ratio = |coeffs: &[f64]| -> Result<f64> {
        let lp: f64 = coeffs
            .iter()
            .map(|v| v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        if lp == 0.0 {
            return Ok(0.0);
        }
        Ok(lp / seq.norm(coeffs)?)
    };
    let mut best_ratio = 0.0f64;
    let mut best = vec![0.0f64; j];
    for restart in 0..restarts.max(1) {
        let mut a = vec![0.0f64; j];
        if restart == 0 {
            // unit vector starts are good seeds
            a[lo] = 1.0;
        } else {
            for item in a.iter_mut().take(hi).skip(lo) {
                *item = rng.gen_range(-1.0f64..1.0);
            }
        }
        let mut current = ratio(&a)?;
        let mut improved = true;
        while improved {
            improved = false;
            for idx in lo..hi {
                for &factor in &[-1.0f64, 0.5, 0.9, 1.1, 2.0, 0.0] {
                    let old = a[idx];
                    let candidate = if old == 0.0 {
                        // re-enter a dropped coordinate on the growth move
                        if factor == 2.0 {
                            0.5
                        } else {
                            continue;
                        }
                    } else if factor == 0.0 {
                        0.0
                    } else {
                        old * factor
                    };
                    if candidate == old {
                        continue;
                    }
                    a[idx] = candidate;
                    let r = ratio(&a)?;
                    if r > current * (1.0 + 1e-12) {
                        current = r;
                        improved = true;
                    } else {
                        a[idx] = old;
                    }
                }
            }
        }
        if current > best_ratio {
            best_ratio = current;
            best = a;
        }
    }
    Ok((best_ratio, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complement::{tonin_select, ChainMode};
    use crate::space::{make_grid, snowflake, GridKind};

    #[test]
    fn step_function_canonical_form_merges_and_trims() {
        let f = StepFunction::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.breaks(), &[0.0, 2.0]);
        assert_eq!(f.values(), &[1.0]);
        let g = StepFunction::indicator_to(2.0);
        assert_eq!(f, g.scaled(1.0));
    }

    #[test]
    fn quasinorm_of_indicator_difference() {
        let a = StepFunction::indicator_to(3.0);
        let b = StepFunction::indicator_to(1.0);
        // difference is the indicator of (1, 3]
        for &p in &[1.0, 0.5] {
            let d = a.sub_quasinorm(&b, p);
            assert!((d - 2f64.powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bump_is_one_lipschitz() {
        let bump = Bump {
            center: 0.5,
            radius: 0.4,
            sign: 1.0,
        };
        let samples: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let rep = disjoint_sum_check(&[bump], 1.0, &samples, 4).unwrap();
        assert!(rep.measured <= rep.individual + 1e-12);
        assert!(rep.individual <= 1.0 + 1e-9);
    }

    #[test]
    fn opposite_bumps_at_q_one_stay_within_l() {
        let bumps = [
            Bump {
                center: 0.25,
                radius: 0.2,
                sign: 1.0,
            },
            Bump {
                center: 0.75,
                radius: 0.2,
                sign: -1.0,
            },
        ];
        let samples: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let rep = disjoint_sum_check(&bumps, 1.0, &samples, 5).unwrap();
        assert!(rep.measured <= rep.individual * (1.0 + tol::SUM_LIP_REL));
    }

    #[test]
    fn half_exponent_pays_the_doubling_factor_and_no_more() {
        let bumps = [
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
        ];
        let samples: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let rep = disjoint_sum_check(&bumps, 0.5, &samples, 5).unwrap();
        // bound is individual * 2
        assert!(rep.measured <= rep.bound * (1.0 + tol::SUM_LIP_REL));
        assert!(rep.bound <= rep.individual * 2.0 + 1e-12);
    }

    #[test]
    fn overlapping_bumps_rejected() {
        let bumps = [
            Bump {
                center: 0.4,
                radius: 0.3,
                sign: 1.0,
            },
            Bump {
                center: 0.6,
                radius: 0.3,
                sign: 1.0,
            },
        ];
        assert!(disjoint_sum_check(&bumps, 1.0, &[0.0, 1.0], 3).is_err());
    }

    fn geometric_chain(p: f64) -> (Arc<PMetricSpace>, ToninSequence) {
        let pts: Vec<f64> = vec![0.0, 1.0 / 64.0, 4.0 / 64.0, 16.0 / 64.0, 1.0];
        let line = make_grid(GridKind::Custom(pts), 1.0).unwrap();
        let space = if p < 1.0 {
            Arc::new(snowflake(&line.space, 1.0 / p, p).unwrap())
        } else {
            line.space
        };
        let seq = tonin_select(&space, 9.0, ChainMode::Unbounded, 4).unwrap();
        (space, seq)
    }

    #[test]
    fn embedding_maps_are_disjoint_indicator_valued() {
        for &p in &[1.0, 0.5] {
            let (space, seq) = geometric_chain(p);
            let maps = lp_embedding_maps(&space, &seq).unwrap();
            assert_eq!(maps.len(), seq.points.len());
            // the anchor has radius zero, so its map is the zero map
            assert_eq!(maps[0].image(0), StepFunction::zero());
            for (m, &r) in maps.iter().zip(&seq.radii).skip(1) {
                assert_eq!(m.image(m.center), StepFunction::indicator_to(r));
            }
        }
    }

    #[test]
    fn chain_sandwich_holds_on_unit_vectors() {
        for &p in &[1.0, 0.5] {
            let (space, seq) = geometric_chain(p);
            let k = seq.points.len() - 1;
            let mut vectors = Vec::new();
            for i in 0..k {
                let mut e = vec![0.0; k];
                e[i] = 1.0;
                vectors.push(e);
            }
            let rows = chain_sandwich(&space, &seq, &vectors, &NormOptions::default()).unwrap();
            for row in rows {
                assert!((row.norm - 1.0).abs() < 1e-9, "p={p}: {}", row.norm);
                assert!(row.lower <= row.norm + 1e-9);
                assert!(row.norm <= row.upper + 1e-9);
            }
        }
    }

    #[test]
    fn exact_lp_basis_extracts_singleton_blocks_with_constant_one() {
        let seq = LpSequence {
            p: 0.5,
            weights: vec![1.0; 6],
        };
        let basis = extract_blocks(
            &seq,
            &BlockParams {
                epsilon: 0.25,
                blocks: 3,
                seed: 42,
                restarts: 8,
            },
        )
        .unwrap();
        assert_eq!(basis.blocks.len(), 3);
        assert!(basis.achieved >= 1.0 - 1e-9);
        assert_eq!(basis.shortfall, 0.0);
        for w in basis.windows.windows(2) {
            assert!(w[0].1 <= w[1].0, "blocks must not overlap");
        }
    }

    #[test]
    fn decaying_weights_make_m_hat_decrease() {
        // weights rise, so tail domination constants 1/w shrink
        let seq = LpSequence {
            p: 0.5,
            weights: vec![0.4, 0.55, 0.7, 0.85, 1.0, 1.0],
        };
        let basis = extract_blocks(
            &seq,
            &BlockParams {
                epsilon: 0.5,
                blocks: 2,
                seed: 42,
                restarts: 12,
            },
        )
        .unwrap();
        for w in basis.m_hat.windows(2) {
            assert!(w[0] >= w[1] - 1e-9);
        }
        assert!(basis.m_hat[0] > basis.m_hat[basis.m_hat.len() - 1] + 0.1);
    }
}
