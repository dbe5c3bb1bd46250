//! Exact rational evaluation of the p = 1 norm.
//!
//! Every f64 is a dyadic rational, so a float distance matrix and molecule
//! convert losslessly; the forest search then runs in exact arithmetic with
//! exact zero tests. Only p = 1 admits an exact path: for p < 1 the costs
//! involve irrational powers of rationals. Golden tests pin float results
//! against this oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::molecule::Molecule;
use crate::norm::MAX_POINTS;

/// Exact conversion; fails only on NaN or infinity.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::structural(format!("{x} has no rational value")))
}

/// Exact p = 1 free-space norm of rational data.
///
/// `dist` must be symmetric with zero diagonal; `coeffs` must sum to zero
/// exactly. The minimum of `sum |t_e| d(e)` over forest-supported
/// decompositions is computed with exact comparisons.
pub fn exact_norm_p1(dist: &[Vec<BigRational>], coeffs: &[BigRational]) -> Result<BigRational> {
    let n = coeffs.len();
    if n == 0 || dist.len() != n || dist.iter().any(|r| r.len() != n) {
        return Err(Error::structural("dimension mismatch in exact norm"));
    }
    if n > MAX_POINTS {
        return Err(Error::resource(format!(
            "exact norm capped at {MAX_POINTS} points"
        )));
    }
    if !coeffs.iter().sum::<BigRational>().is_zero() {
        return Err(Error::structural(
            "exact norm requires coefficients summing to zero exactly",
        ));
    }
    if n == 1 {
        return Ok(BigRational::zero());
    }
    let full = (1usize << n) - 1;

    let mut mass = vec![BigRational::zero(); full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        mass[s] = &mass[s & (s - 1)] + &coeffs[low];
    }
    let mass_abs: Vec<BigRational> = mass.iter().map(|m| m.abs()).collect();

    // tree[s][v]: cheapest tree spanning s rooted at v, or None.
    let mut tree: Vec<Option<BigRational>> = vec![None; (full + 1) * n];
    for v in 0..n {
        tree[(1usize << v) * n + v] = Some(BigRational::zero());
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
            let mut best: Option<BigRational> = None;
            let mut u_bits = rest;
            while u_bits != 0 {
                let u = u_bits.trailing_zeros() as usize;
                u_bits &= u_bits - 1;
                if let Some(sub) = &tree[rest * n + u] {
                    let c = sub + &mass_abs[rest] * &dist[u][v];
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
            let anchor = rest & rest.wrapping_neg();
            let mut t = rest;
            while t != 0 {
                if t & anchor != 0 && t != rest {
                    let part = t | (1 << v);
                    let other = (rest & !t) | (1 << v);
                    if let (Some(a), Some(b)) = (&tree[part * n + v], &tree[other * n + v]) {
                        let c = a + b;
                        if best.as_ref().is_none_or(|bst| c < *bst) {
                            best = Some(c);
                        }
                    }
                }
                t = (t - 1) & rest;
            }
            tree[s * n + v] = best;
        }
    }

    let mut comp: Vec<Option<BigRational>> = vec![None; full + 1];
    for s in 1..=full {
        if !mass[s].is_zero() {
            continue;
        }
        let mut best: Option<BigRational> = None;
        let mut v_bits = s;
        while v_bits != 0 {
            let v = v_bits.trailing_zeros() as usize;
            v_bits &= v_bits - 1;
            if let Some(c) = &tree[s * n + v] {
                if best.as_ref().is_none_or(|b| c < b) {
                    best = Some(c.clone());
                }
            }
        }
        comp[s] = best;
    }

    let mut assemble: Vec<Option<BigRational>> = vec![None; full + 1];
    assemble[0] = Some(BigRational::zero());
    for u in 1..=full {
        let low = u & u.wrapping_neg();
        let low_idx = low.trailing_zeros() as usize;
        let mut best: Option<BigRational> = None;
        if coeffs[low_idx].is_zero() {
            best = assemble[u & !low].clone();
        }
        let rest = u & !low;
        let mut t = rest;
        loop {
            let s = t | low;
            if let (Some(c), Some(g)) = (&comp[s], &assemble[u & !s]) {
                let v = c + g;
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        assemble[u] = best;
    }

    assemble[full]
        .clone()
        .ok_or_else(|| Error::internal("exact norm found no balanced partition"))
}

/// Exact p = 1 norm of a float molecule, via lossless conversion.
///
/// Requires the space exponent to be 1 and the float coefficients to sum
/// to zero exactly (true for difference molecules; callers with rounded
/// coefficients should re-balance first).
pub fn norm_exact_p1(molecule: &Molecule) -> Result<BigRational> {
    let space = molecule.space();
    if space.p() != 1.0 {
        return Err(Error::structural(
            "exact arithmetic is only available at p = 1; fractional p needs irrational powers",
        ));
    }
    let n = space.n();
    let mut dist = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = rational_from_f64(space.dist(i, j))?;
        }
    }
    let coeffs: Vec<BigRational> = molecule
        .coeffs()
        .iter()
        .map(|&c| rational_from_f64(c))
        .collect::<Result<_>>()?;
    exact_norm_p1(&dist, &coeffs)
}

/// Nearest f64 to an exact rational (for report output).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    big_to_f64(numer) / big_to_f64(denom)
}

fn big_to_f64(b: &BigInt) -> f64 {
    // Values in this crate stay well inside f64 range.
    let s = b.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::Molecule;
    use crate::space::{make_grid, GridKind};
    use num_traits::FromPrimitive;

    #[test]
    fn matches_float_oracle_on_the_segment() {
        let g = make_grid(GridKind::IntegerSegment(5), 1.0).unwrap();
        let mu = Molecule::new(g.space.clone(), vec![0.5, -1.0, 0.25, 0.0, 0.75, -0.5]).unwrap();
        let exact = norm_exact_p1(&mu).unwrap();
        let float = crate::norm::norm(&mu).unwrap().value;
        assert!((rational_to_f64(&exact) - float).abs() <= 1e-12 * float.max(1.0));
    }

    #[test]
    fn exact_value_of_a_unit_shipment() {
        let g = make_grid(GridKind::IntegerSegment(4), 1.0).unwrap();
        let mu = Molecule::dirac_diff(g.space.clone(), 4, 0).unwrap();
        let exact = norm_exact_p1(&mu).unwrap();
        assert_eq!(exact, BigRational::from_u64(4).unwrap());
    }

    #[test]
    fn rejects_fractional_exponent() {
        let g = make_grid(GridKind::IntegerSegment(2), 0.5).unwrap();
        let mu = Molecule::dirac_diff(g.space.clone(), 2, 0).unwrap();
        assert!(norm_exact_p1(&mu).is_err());
    }
}
