//! Complemented copies of sequence spaces inside free p-spaces.
//!
//! Three engines live here:
//!
//! - the canonical isometry between the free space of a sum glued at the
//!   base point and the p-sum of the part free spaces, with the measured
//!   constants of its general almost-p-sum form;
//! - the decomposition `F_p(M) ~ F_p(N) (+) F_p(M/N)` induced by a
//!   Lipschitz retraction, realized by an explicit operator pair whose
//!   compositions are the identity;
//! - the projection pair `(S, P)` built from disjointly supported bump
//!   functions, which exhibits `l_p(Gamma)` as a `2^(1/p) C t`-complemented
//!   subspace, together with the bump families realizing it on spaces with
//!   isolated points, metric balls, and separated snowflakes.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::molecule::{elementary_molecules, LipschitzFunction, Molecule};
use crate::norm::{self, NormOptions};
use crate::operator::{lipschitz_constant, FreeOperator};
use crate::space::{p_sum, quotient, PMetricSpace, PSum, Quotient, SumMode};
use crate::tol;

/// The canonical identification between the p-sum of part free spaces and
/// the free space of their maltese sum, as explicit matrices.
#[derive(Debug, Clone)]
pub struct MalteseIsometry {
    pub parts: Vec<Arc<PMetricSpace>>,
    pub sum: PSum,
    /// Assembles the part inclusions; square in delta coordinates.
    pub forward: Array2<f64>,
    pub inverse: Array2<f64>,
}

/// Measured operator norms for a maltese identification.
#[derive(Debug, Clone)]
pub struct IsometryReport {
    /// `max ||T z||` over the p-sum's norming set (part elementary
    /// molecules); equals 1 for a true maltese sum.
    pub t_norm: f64,
    /// `max ||T^-1 z||` over the sum space's elementary molecules,
    /// measured in the p-sum norm.
    pub t_inv_norm: f64,
    /// `K` from the almost-p-sum inequality
    /// `K^p d^p(x,y) >= d^p(x,0) + d^p(y,0)` over cross-part pairs.
    pub k_bound: f64,
}

/// Builds the maltese sum of the parts and the canonical identification.
pub fn maltese_isometry(parts: &[Arc<PMetricSpace>]) -> Result<MalteseIsometry> {
    let owned: Vec<PMetricSpace> = parts.iter().map(|p| p.as_ref().clone()).collect();
    let sum = p_sum(&owned, SumMode::Maltese)?;
    let k = sum.space.n() - 1;
    // Under the index maps the identification is a permutation matrix; the
    // maltese construction enumerates part points in order, so it is the
    // identity. Built explicitly from the maps to keep the contract honest.
    let mut forward = Array2::zeros((k, k));
    let mut col = 0usize;
    for map in &sum.part_maps {
        for &global in &map[1..] {
            forward[(global - 1, col)] = 1.0;
            col += 1;
        }
    }
    if col != k {
        return Err(Error::internal("maltese index maps do not cover the sum"));
    }
    let inverse = forward.t().to_owned();
    Ok(MalteseIsometry {
        parts: parts.to_vec(),
        sum,
        forward,
        inverse,
    })
}

impl MalteseIsometry {
    /// Measures both operator norms with the exact norm oracles and the
    /// almost-p-sum constant of the glued space.
    pub fn verify(&self, opts: &NormOptions) -> Result<IsometryReport> {
        let sum_space = Arc::new(self.sum.space.clone());
        let p = self.sum.space.p();

        // ||T||: the norming set of the p-sum is the union of the part
        // elementary molecules (each of norm one); push each into the sum.
        let mut t_norm: f64 = 0.0;
        for (a, part) in self.parts.iter().enumerate() {
            for (_, _, z) in elementary_molecules(part) {
                let image = z.push_forward(sum_space.clone(), &self.sum.part_maps[a])?;
                let v = norm::norm_with(&image, norm::Method::Auto, opts)?.value;
                t_norm = t_norm.max(v);
            }
        }

        // ||T^-1||: split each elementary molecule of the sum into part
        // blocks and combine the part norms in l_p.
        let mut owner = vec![usize::MAX; self.sum.space.n()];
        let mut local = vec![usize::MAX; self.sum.space.n()];
        for (a, map) in self.sum.part_maps.iter().enumerate() {
            for (loc, &g) in map.iter().enumerate() {
                if g != 0 || loc == 0 {
                    owner[g] = if g == 0 { usize::MAX } else { a };
                    if g != 0 {
                        local[g] = loc;
                    }
                }
            }
        }
        let mut t_inv_norm: f64 = 0.0;
        for (x, y, z) in elementary_molecules(&sum_space) {
            let mut acc = 0.0f64;
            for (a, part) in self.parts.iter().enumerate() {
                // block of z on part a, as a molecule over the part
                let mut coeffs = vec![0.0f64; part.n()];
                let mut mass = 0.0f64;
                for &g in [x, y].iter() {
                    if g != 0 && owner[g] == a {
                        coeffs[local[g]] = z.coeff(g);
                        mass += z.coeff(g);
                    }
                }
                if mass.abs() > 0.0 || coeffs.iter().any(|c| *c != 0.0) {
                    coeffs[0] = -mass;
                    let block = Molecule::new(Arc::new(part.as_ref().clone()), coeffs)?;
                    let v = norm::norm_with(&block, norm::Method::Auto, opts)?.value;
                    acc += v.powf(p);
                }
            }
            t_inv_norm = t_inv_norm.max(acc.powf(1.0 / p));
        }

        let partition: Vec<Vec<usize>> =
            self.sum.part_maps.iter().map(|m| m[1..].to_vec()).collect();
        let k_bound = partition_k_bound(&self.sum.space, &partition);
        Ok(IsometryReport {
            t_norm,
            t_inv_norm,
            k_bound,
        })
    }
}

/// Smallest `K` with `K^p d^p(x,y) >= d^p(x,0) + d^p(y,0)` over pairs in
/// different groups of a partition of the nonbase points.
pub fn partition_k_bound(space: &PMetricSpace, groups: &[Vec<usize>]) -> f64 {
    let p = space.p();
    let mut worst: f64 = 0.0;
    for (a, ga) in groups.iter().enumerate() {
        for gb in groups.iter().skip(a + 1) {
            for &x in ga {
                for &y in gb {
                    let ratio = (space.dist_p(x, 0) + space.dist_p(y, 0)) / space.dist_p(x, y);
                    worst = worst.max(ratio);
                }
            }
        }
    }
    if worst == 0.0 {
        1.0
    } else {
        worst.powf(1.0 / p).max(1.0)
    }
}

/// The retraction-induced decomposition of a free space.
#[derive(Debug, Clone)]
pub struct RetractionComplement {
    pub retraction: Vec<usize>,
    pub lip: f64,
    /// Image of the retraction, ascending; contains the base point.
    pub image: Vec<usize>,
    pub quotient: Quotient,
    /// The glued space `N (*) M/N` of the retract and the quotient.
    pub sum: PSum,
    pub to_sum: FreeOperator,
    pub from_sum: FreeOperator,
}

/// Report for one retraction-complement instance.
#[derive(Debug, Clone)]
pub struct RetractionReport {
    pub st_identity_err: f64,
    pub ts_identity_err: f64,
    pub t_norm: f64,
    pub s_norm: f64,
    pub t_bound: f64,
    pub s_bound: f64,
}

/// Builds the operator pair realizing
/// `F_p(M) ~ F_p(N) (+) F_p(M/N)` for a Lipschitz retraction `r` with
/// image `N`: `T` sends `delta(x)` to `delta(r(x), 0) + delta(0, Q(x))`,
/// and `S` sends the two kinds of glued points back to `delta(x1)` and
/// `delta(x2) - delta(r(x2))`.
pub fn retraction_complement(
    space: &Arc<PMetricSpace>,
    retraction: &[usize],
) -> Result<RetractionComplement> {
    let n = space.n();
    if retraction.len() != n {
        return Err(Error::structural("retraction length mismatch"));
    }
    if retraction[0] != 0 {
        return Err(Error::structural("retraction must fix the base point"));
    }
    for (x, &rx) in retraction.iter().enumerate() {
        if rx >= n {
            return Err(Error::structural("retraction image out of range"));
        }
        if retraction[rx] != rx {
            return Err(Error::Structural(format!(
                "map is not idempotent: r(r({x})) != r({x})"
            )));
        }
    }
    let lip = lipschitz_constant(space, space, retraction);
    let mut image: Vec<usize> = retraction.to_vec();
    image.sort_unstable();
    image.dedup();

    let retract_space = space.restrict(&image)?;
    let q = quotient(space, &image)?;
    let sum = p_sum(&[retract_space.clone(), q.space.clone()], SumMode::Maltese)?;
    let sum_space = Arc::new(sum.space.clone());

    // local index of an old point inside N
    let mut n_local = vec![usize::MAX; n];
    for (loc, &old) in image.iter().enumerate() {
        n_local[old] = loc;
    }

    let k_dom = n - 1;
    let k_sum = sum.space.n() - 1;
    let mut t_matrix = Array2::zeros((k_sum, k_dom));
    for x in 1..n {
        let rx = retraction[x];
        if rx != 0 {
            let g = sum.part_maps[0][n_local[rx]];
            t_matrix[(g - 1, x - 1)] += 1.0;
        }
        let qx = q.map[x];
        if qx != 0 {
            let g = sum.part_maps[1][qx];
            t_matrix[(g - 1, x - 1)] += 1.0;
        }
    }
    let to_sum = FreeOperator::from_matrix(space.clone(), sum_space.clone(), t_matrix)?;

    // old index of each quotient survivor
    let mut q_old = vec![usize::MAX; q.space.n()];
    for (old, &new) in q.map.iter().enumerate() {
        if new != 0 {
            q_old[new] = old;
        }
    }
    let mut s_matrix = Array2::zeros((k_dom, k_sum));
    for (loc, &old) in image.iter().enumerate().skip(1) {
        let g = sum.part_maps[0][loc];
        s_matrix[(old - 1, g - 1)] = 1.0;
    }
    for new in 1..q.space.n() {
        let old = q_old[new];
        let g = sum.part_maps[1][new];
        s_matrix[(old - 1, g - 1)] += 1.0;
        let r_old = retraction[old];
        if r_old != 0 {
            s_matrix[(r_old - 1, g - 1)] -= 1.0;
        }
    }
    let from_sum = FreeOperator::from_matrix(sum_space, space.clone(), s_matrix)?;

    Ok(RetractionComplement {
        retraction: retraction.to_vec(),
        lip,
        image,
        quotient: q,
        sum,
        to_sum,
        from_sum,
    })
}

impl RetractionComplement {
    /// Checks both composition identities and both norm bounds.
    pub fn verify(&self, opts: &NormOptions) -> Result<RetractionReport> {
        let p = self.to_sum.domain().p();
        let st = self.from_sum.compose(&self.to_sum)?;
        let ts = self.to_sum.compose(&self.from_sum)?;
        let eye_dom = FreeOperator::identity(self.to_sum.domain().clone());
        let eye_sum = FreeOperator::identity(self.to_sum.codomain().clone());
        let st_identity_err = st.max_abs_diff(&eye_dom);
        let ts_identity_err = ts.max_abs_diff(&eye_sum);
        let t_norm = self.to_sum.operator_norm(opts)?.value;
        let s_norm = self.from_sum.operator_norm(opts)?.value;
        let l_p = self.lip.powf(p);
        let t_bound = (l_p + 1.0).powf(1.0 / p);
        let s_bound = (1.0 + l_p).powf(1.0 / p);
        Ok(RetractionReport {
            st_identity_err,
            ts_identity_err,
            t_norm,
            s_norm,
            t_bound,
            s_bound,
        })
    }
}

/// Data for the bump-function complementation: centers `x_g`, partners
/// `y_g`, disjointly supported functions `f_g` with `Lip(f_g) <= C` and
/// `f_g(x_g) / d(x_g, y_g) >= 1/t`.
#[derive(Debug, Clone)]
pub struct Condition2Data {
    pub space: Arc<PMetricSpace>,
    pub centers: Vec<usize>,
    pub partners: Vec<usize>,
    pub functions: Vec<LipschitzFunction>,
    pub lip_bound: f64,
    pub t: f64,
}

impl Condition2Data {
    /// Checks every clause; errors name the violated one.
    pub fn validate(&self) -> Result<()> {
        let g = self.centers.len();
        if g == 0 {
            return Err(Error::structural("empty index set"));
        }
        if self.partners.len() != g || self.functions.len() != g {
            return Err(Error::structural(
                "centers/partners/functions length mismatch",
            ));
        }
        let n = self.space.n();
        for (i, (&x, &y)) in self.centers.iter().zip(&self.partners).enumerate() {
            if x >= n || y >= n {
                return Err(Error::Structural(format!(
                    "index out of range in family {i}"
                )));
            }
            if x == 0 {
                return Err(Error::Structural(format!(
                    "center {i} is the base point; bump functions must vanish there"
                )));
            }
            if x == y {
                return Err(Error::Structural(format!("family {i} has x = y")));
            }
        }
        // disjoint supports
        let supports: Vec<Vec<usize>> = self
            .functions
            .iter()
            .map(|f| (0..n).filter(|&x| f.value(x) != 0.0).collect())
            .collect();
        for i in 0..g {
            for j in (i + 1)..g {
                if let Some(&x) = supports[i].iter().find(|x| supports[j].contains(x)) {
                    return Err(Error::Structural(format!(
                        "supports of bumps {i} and {j} overlap at point {x}"
                    )));
                }
            }
        }
        for i in 0..g {
            if self.functions[i].value(self.centers[i]) == 0.0 {
                return Err(Error::Structural(format!(
                    "bump {i} vanishes at its own center"
                )));
            }
            for j in 0..g {
                if i != j && self.functions[i].value(self.centers[j]) != 0.0 {
                    return Err(Error::Structural(format!(
                        "bump {i} does not vanish at center {j}"
                    )));
                }
                if self.functions[i].value(self.partners[j]) != 0.0 {
                    return Err(Error::Structural(format!(
                        "bump {i} does not vanish at partner {j}"
                    )));
                }
            }
        }
        let slack = 1.0 + tol::NORM_BOUND_SLACK;
        for (i, f) in self.functions.iter().enumerate() {
            let lip = f.lip(&self.space);
            if lip > self.lip_bound * slack {
                return Err(Error::Structural(format!(
                    "bump {i} has Lipschitz constant {lip:.6e} above the bound {}",
                    self.lip_bound
                )));
            }
        }
        for i in 0..g {
            let ratio = self.functions[i].value(self.centers[i]).abs()
                / self.space.dist(self.centers[i], self.partners[i]);
            if ratio * self.t < 1.0 - tol::NORM_BOUND_SLACK {
                return Err(Error::Structural(format!(
                    "bump {i} has f(x)/d(x,y) = {ratio:.6e} below 1/t"
                )));
            }
        }
        Ok(())
    }
}

/// The operator pair of the bump complementation: `S e_g = b_g` and
/// `P delta(x) = sum_g (d_g / f_g(x_g)) f_g(x) e_g`.
#[derive(Debug, Clone)]
pub struct Condition2Operators {
    /// `(n-1) x |Gamma|`, sequence space into the free space.
    pub into_free: Array2<f64>,
    /// `|Gamma| x (n-1)`, free space onto the sequence space.
    pub onto_seq: Array2<f64>,
}

/// Report for one bump-complementation instance.
#[derive(Debug, Clone)]
pub struct Condition2Report {
    pub ps_identity_err: f64,
    pub s_norm: f64,
    pub p_norm: f64,
    /// `2^(1/p) C t`.
    pub p_bound: f64,
}

pub fn condition2_operators(data: &Condition2Data) -> Result<Condition2Operators> {
    data.validate()?;
    let n = data.space.n();
    let g = data.centers.len();
    let mut into_free = Array2::zeros((n - 1, g));
    for (col, (&x, &y)) in data.centers.iter().zip(&data.partners).enumerate() {
        let d = data.space.dist(x, y);
        into_free[(x - 1, col)] += 1.0 / d;
        if y != 0 {
            into_free[(y - 1, col)] -= 1.0 / d;
        }
    }
    let mut onto_seq = Array2::zeros((g, n - 1));
    for (row, f) in data.functions.iter().enumerate() {
        let scale =
            data.space.dist(data.centers[row], data.partners[row]) / f.value(data.centers[row]);
        for x in 1..n {
            onto_seq[(row, x - 1)] = scale * f.value(x);
        }
    }
    Ok(Condition2Operators {
        into_free,
        onto_seq,
    })
}

/// Measures the identity `P S = Id`, the column norms of `S`, and the
/// operator norm of `P` against `2^(1/p) C t`.
pub fn verify_condition2(
    data: &Condition2Data,
    ops: &Condition2Operators,
    opts: &NormOptions,
) -> Result<Condition2Report> {
    let p = data.space.p();
    let g = data.centers.len();
    let ps = ops.onto_seq.dot(&ops.into_free);
    let eye = Array2::<f64>::eye(g);
    let ps_identity_err = (&ps - &eye).iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // ||S||: the l_p(Gamma) ball is the p-convex hull of the unit vectors,
    // so the norm is the largest free norm of a column.
    let mut s_norm: f64 = 0.0;
    for (&x, &y) in data.centers.iter().zip(&data.partners) {
        let b = Molecule::elementary(data.space.clone(), x, y)?;
        let v = norm::norm_with(&b, norm::Method::Auto, opts)?.value;
        s_norm = s_norm.max(v);
    }

    // ||P||: maximum l_p norm of the image of an elementary molecule.
    let mut p_norm: f64 = 0.0;
    for (x, y, z) in elementary_molecules(&data.space) {
        let _ = (x, y);
        let delta = z.delta_coords();
        let mut acc = 0.0f64;
        for row in 0..g {
            let mut val = 0.0;
            for (k, &c) in delta.iter().enumerate() {
                if c != 0.0 {
                    val += ops.onto_seq[(row, k)] * c;
                }
            }
            acc += val.abs().powf(p);
        }
        p_norm = p_norm.max(acc.powf(1.0 / p));
    }
    let p_bound = 2f64.powf(1.0 / p) * data.lip_bound * data.t;
    Ok(Condition2Report {
        ps_identity_err,
        s_norm,
        p_norm,
        p_bound,
    })
}

/// Bump family construction styles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpStyle {
    /// Scaled indicators of isolated points; the partner is the nearest
    /// distinct point and must satisfy `d(x,y) <= t * d(x, M\{x})`.
    Isolated { t: f64 },
    /// Tents `max(d(x_i,y_i) - d(x, x_i), 0)` on disjoint balls of a
    /// metric space; `t = 1`.
    MetricBall,
    /// Tents `max(r_g - d(x, x_g), 0)` against the base point, on a
    /// metric space.
    Condition3Metric,
    /// Tents `max(r_g - d^p(x, x_g), 0)` on a uniformly separated
    /// p-metric space; the Lipschitz bound degrades to `sep^(p-1)`.
    Condition3PSep,
}

/// Greedy radii: half the distance to the nearest other center (or of its
/// p-th power), capped by the distance to the base point.
pub fn auto_radii(space: &PMetricSpace, centers: &[usize], p_power: bool) -> Vec<f64> {
    let d = |a: usize, b: usize| {
        if p_power {
            space.dist_p(a, b)
        } else {
            space.dist(a, b)
        }
    };
    centers
        .iter()
        .map(|&x| {
            let half_min = centers
                .iter()
                .filter(|&&y| y != x)
                .map(|&y| d(x, y) / 2.0)
                .fold(f64::INFINITY, f64::min);
            half_min.min(d(x, 0))
        })
        .collect()
}

/// Builds a validated bump family over the given centers.
///
/// Radii are required by the tent styles; pass `None` for the greedy
/// default. Centers must avoid the base point.
pub fn bump_family(
    space: &Arc<PMetricSpace>,
    centers: &[usize],
    radii: Option<&[f64]>,
    style: BumpStyle,
) -> Result<Condition2Data> {
    if centers.is_empty() {
        return Err(Error::structural("no centers"));
    }
    if centers.contains(&0) {
        return Err(Error::structural("centers must avoid the base point"));
    }
    let n = space.n();
    if n < 2 {
        return Err(Error::structural("space too small for bumps"));
    }
    let is_metric = || -> bool {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j
                        && k != i
                        && k != j
                        && space.dist(i, j)
                            > space.dist(i, k) + space.dist(k, j) + tol::TRIANGLE_ABS
                    {
                        return false;
                    }
                }
            }
        }
        true
    };
    let nearest_distinct = |x: usize| -> usize {
        (0..n)
            .filter(|&y| y != x)
            .min_by(|&a, &b| {
                space
                    .dist(x, a)
                    .partial_cmp(&space.dist(x, b))
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .expect("n >= 2")
    };

    let data = match style {
        BumpStyle::Isolated { t } => {
            if !(t >= 1.0) {
                return Err(Error::structural("isolated style needs t >= 1"));
            }
            let mut partners = Vec::new();
            let mut functions = Vec::new();
            for &x in centers {
                let iso = space.dist(x, nearest_distinct(x));
                // the partner must dodge every center, or some bump fails
                // to vanish at it
                let y = (0..n)
                    .filter(|&z| z != x && !centers.contains(&z))
                    .min_by(|&a, &b| {
                        space
                            .dist(x, a)
                            .partial_cmp(&space.dist(x, b))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .ok_or_else(|| Error::structural("every point is a center"))?;
                if space.dist(x, y) > t * iso * (1.0 + tol::NORM_BOUND_SLACK) {
                    return Err(Error::Structural(format!(
                        "no non-center partner within t * isolation radius of center {x}"
                    )));
                }
                let mut values = vec![0.0; n];
                values[x] = iso;
                partners.push(y);
                functions.push(LipschitzFunction::new(values)?);
            }
            Condition2Data {
                space: space.clone(),
                centers: centers.to_vec(),
                partners,
                functions,
                lip_bound: 1.0,
                t,
            }
        }
        BumpStyle::MetricBall => {
            if !is_metric() {
                return Err(Error::structural(
                    "metric_ball bumps need the ordinary triangle inequality",
                ));
            }
            let auto = auto_radii(space, centers, false);
            let radii = radii.unwrap_or(&auto);
            if radii.len() != centers.len() {
                return Err(Error::structural("radii length mismatch"));
            }
            let mut partners = Vec::new();
            let mut functions = Vec::new();
            for (&x, &r) in centers.iter().zip(radii) {
                let y = (0..n)
                    .filter(|&z| z != x && !centers.contains(&z))
                    .min_by(|&a, &b| {
                        space
                            .dist(x, a)
                            .partial_cmp(&space.dist(x, b))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .ok_or_else(|| Error::structural("every point is a center"))?;
                // partners at distance exactly r are fine: the support is
                // the open ball of radius d(x, y)
                if space.dist(x, y) > r {
                    return Err(Error::Structural(format!(
                        "ball of radius {r} around center {x} contains no second non-center point"
                    )));
                }
                let h = space.dist(x, y);
                let values: Vec<f64> = (0..n).map(|z| (h - space.dist(z, x)).max(0.0)).collect();
                partners.push(y);
                functions.push(LipschitzFunction::new(values)?);
            }
            Condition2Data {
                space: space.clone(),
                centers: centers.to_vec(),
                partners,
                functions,
                lip_bound: 1.0,
                t: 1.0,
            }
        }
        BumpStyle::Condition3Metric | BumpStyle::Condition3PSep => {
            let p_power = style == BumpStyle::Condition3PSep;
            if !p_power && !is_metric() {
                return Err(Error::structural(
                    "condition3_metric bumps need the ordinary triangle inequality",
                ));
            }
            let auto = auto_radii(space, centers, p_power);
            let radii = radii.unwrap_or(&auto);
            if radii.len() != centers.len() {
                return Err(Error::structural("radii length mismatch"));
            }
            let d = |a: usize, b: usize| {
                if p_power {
                    space.dist_p(a, b)
                } else {
                    space.dist(a, b)
                }
            };
            // separation conditions, base point included with radius 0
            for (i, (&xi, &ri)) in centers.iter().zip(radii).enumerate() {
                if !(ri > 0.0) {
                    return Err(Error::Structural(format!("radius {i} not positive")));
                }
                if d(xi, 0) < ri - tol::TRIANGLE_ABS {
                    return Err(Error::Structural(format!(
                        "center {xi} is closer to the base than its radius"
                    )));
                }
                for (j, (&xj, &rj)) in centers.iter().zip(radii).enumerate() {
                    if i < j && d(xi, xj) < ri + rj - tol::TRIANGLE_ABS {
                        return Err(Error::Structural(format!(
                            "radii of centers {xi} and {xj} overlap: d = {:.6e} < {:.6e}",
                            d(xi, xj),
                            ri + rj
                        )));
                    }
                }
            }
            let lip_bound = if p_power {
                let sep = space.stats().separation;
                sep.powf(space.p() - 1.0)
            } else {
                1.0
            };
            let t = centers
                .iter()
                .zip(radii)
                .map(|(&x, &r)| space.dist(x, 0) / r)
                .fold(0.0f64, f64::max);
            let functions = centers
                .iter()
                .zip(radii)
                .map(|(&x, &r)| {
                    let values: Vec<f64> = (0..n).map(|z| (r - d(z, x)).max(0.0)).collect();
                    LipschitzFunction::new(values)
                })
                .collect::<Result<Vec<_>>>()?;
            Condition2Data {
                space: space.clone(),
                centers: centers.to_vec(),
                partners: vec![0; centers.len()],
                functions,
                lip_bound,
                t,
            }
        }
    };
    data.validate()?;
    Ok(data)
}

/// A chain with radii satisfying `d^p(x_n, x_m) >= r_n + r_m` and
/// `|r_n - r_m| / d^p(x_n, x_m) >= 1/t`; index 0 is the anchor with
/// `r_0 = 0` and the radii increase along the chain.
#[derive(Debug, Clone)]
pub struct ToninSequence {
    pub points: Vec<usize>,
    pub radii: Vec<f64>,
    pub t: f64,
}

/// Whether the chain walks away from the anchor or down into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Unbounded,
    LimitPoint,
}

/// Selects the longest chain anchored at the base point whose consecutive
/// anchor distances have ratio at most `s^(1/p)`, where
/// `sqrt(t) = (1+s)/(1-s)`, and assigns radii `r_n = d^p(x_n, 0)/sqrt(t)`.
pub fn tonin_select(
    space: &Arc<PMetricSpace>,
    t: f64,
    mode: ChainMode,
    min_len: usize,
) -> Result<ToninSequence> {
    if !(t > 1.0) {
        return Err(Error::structural("chain selection needs t > 1"));
    }
    let p = space.p();
    let sqrt_t = t.sqrt();
    let s = (sqrt_t - 1.0) / (sqrt_t + 1.0);
    let ratio_bound = s.powf(1.0 / p) * (1.0 + tol::ROUNDTRIP_REL);
    let n = space.n();
    let mut order: Vec<usize> = (1..n).collect();
    order.sort_by(|&a, &b| space.dist(a, 0).partial_cmp(&space.dist(b, 0)).unwrap());
    if mode == ChainMode::LimitPoint {
        order.reverse();
    }
    // longest admissible chain: consecutive ratio of anchor distances
    // (smaller over larger) at most ratio_bound
    let m = order.len();
    let mut best_len = vec![1usize; m];
    let mut prev = vec![usize::MAX; m];
    let admissible = |from: usize, to: usize| -> bool {
        let a = space.dist(order[from], 0);
        let b = space.dist(order[to], 0);
        let (small, large) = if a < b { (a, b) } else { (b, a) };
        small / large <= ratio_bound
    };
    let mut best_end = 0usize;
    for i in 0..m {
        for j in 0..i {
            if admissible(j, i) && best_len[j] + 1 > best_len[i] {
                best_len[i] = best_len[j] + 1;
                prev[i] = j;
            }
        }
        if best_len[i] > best_len[best_end] {
            best_end = i;
        }
    }
    if m == 0 || best_len[best_end] < min_len {
        return Err(Error::Structural(format!(
            "no chain of {min_len} points with consecutive anchor-distance \
             ratios below {ratio_bound:.6} (best found: {})",
            if m == 0 { 0 } else { best_len[best_end] }
        )));
    }
    let mut chain = Vec::new();
    let mut i = best_end;
    loop {
        chain.push(order[i]);
        if prev[i] == usize::MAX {
            break;
        }
        i = prev[i];
    }
    // Reindex by increasing anchor distance: the interval-disjointness
    // behind the lower bounds needs the radii monotone above r_0 = 0.
    chain.sort_by(|&a, &b| space.dist(a, 0).partial_cmp(&space.dist(b, 0)).unwrap());
    let mut points = vec![0usize];
    points.extend(chain);
    let radii: Vec<f64> = points
        .iter()
        .map(|&x| {
            if x == 0 {
                0.0
            } else {
                space.dist_p(x, 0) / sqrt_t
            }
        })
        .collect();
    let seq = ToninSequence { points, radii, t };
    seq.validate(space)?;
    Ok(seq)
}

impl ToninSequence {
    /// Numerically verifies both chain inequalities on all pairs.
    pub fn validate(&self, space: &PMetricSpace) -> Result<()> {
        let k = self.points.len();
        if self.radii.len() != k {
            return Err(Error::structural("points/radii length mismatch"));
        }
        for a in 0..k {
            for b in (a + 1)..k {
                let dp = space.dist_p(self.points[a], self.points[b]);
                let slack = tol::NORM_BOUND_SLACK * dp.max(1.0);
                if dp < self.radii[a] + self.radii[b] - slack {
                    return Err(Error::Structural(format!(
                        "chain pair ({a},{b}) violates d^p >= r_a + r_b"
                    )));
                }
                if (self.radii[a] - self.radii[b]).abs() * self.t < dp - slack * self.t {
                    return Err(Error::Structural(format!(
                        "chain pair ({a},{b}) violates |r_a - r_b| / d^p >= 1/t"
                    )));
                }
            }
        }
        Ok(())
    }
}
