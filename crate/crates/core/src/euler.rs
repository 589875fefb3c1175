//! Euler classes in the periodic K-theory of lens spaces and the
//! nonvanishing oracle built on lattice membership.
//!
//! The line with exponent `t` has Euler class `1 − z^t`; a representation
//! contributes the product over its summands. The oracle asks whether
//! `e(V)·(1 − z)^j` survives in `Z[z]/(z^N − 1, (1 − z)^n)`. Independently
//! of the oracle, this module can rebuild the cyclotomic-style factor
//! `φ(z)` and the integral polynomials `a_l` used by the hand argument, so
//! the two routes can be compared.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclic_ring::{is_zero_in_quotient, CyclicPoly, Locality, QuotientCache, QuotientCtx};
use crate::cyclic_ring::binomial_row;
use crate::error::{Error, Result};
use crate::group_rep::{delta, GroupSpec, RepSpec};

/// `Π (1 − z^{t_i})` folded mod `z^N − 1`.
pub fn euler_class(rep: &RepSpec) -> CyclicPoly {
    rep.exponents()
        .iter()
        .fold(CyclicPoly::one(rep.group()), |acc, &t| acc.mul_one_minus_power(t))
}

/// `e(V) · (1 − z)^j`.
pub fn euler_class_twisted(rep: &RepSpec, j: u32) -> CyclicPoly {
    (0..j).fold(euler_class(rep), |acc, _| acc.mul_one_minus_power(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerQuery {
    pub rep: RepSpec,
    /// truncation exponent: the ideal is `((1 − z)^n)`
    pub n: i64,
    /// power of the line class `1 − z`
    pub j: u32,
    pub locality: Locality,
}

impl EulerQuery {
    pub fn new(rep: RepSpec, n: i64, j: u32, locality: Locality) -> Result<Self> {
        if n < 1 {
            return Err(Error::TruncationTooSmall(n));
        }
        Ok(Self { rep, n, j, locality })
    }
}

/// Decides non-vanishing against a prepared quotient context.
pub fn lemma41_nonvanishing_in(q: &EulerQuery, ctx: &QuotientCtx) -> Result<bool> {
    delta(&q.rep)?;
    if ctx.n() != q.n as u64 {
        return Err(Error::InvalidBound(format!("context built for n = {}, query has n = {}", ctx.n(), q.n)));
    }
    let class = euler_class_twisted(&q.rep, q.j);
    Ok(!is_zero_in_quotient(&class, ctx, q.locality)?)
}

/// True iff `e(V)(1 − z)^j` is non-zero in the quotient at truncation `n`.
pub fn lemma41_nonvanishing(q: &EulerQuery) -> Result<bool> {
    delta(&q.rep)?;
    let ctx = QuotientCtx::new(q.rep.group(), q.n)?;
    lemma41_nonvanishing_in(q, &ctx)
}

/// The `p`-local threshold predicted by the hand argument: non-zero iff
/// `n ≥ j + 1 + δ(V)`.
pub fn predicted_p_local_nonzero(rep: &RepSpec, n: i64, j: u32) -> Result<bool> {
    Ok(n > i64::from(j) + delta(rep)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub j: u32,
    pub integral: bool,
    pub p_local: bool,
}

impl ScanRow {
    pub fn verdict(&self, locality: Locality) -> bool {
        match locality {
            Locality::Integral => self.integral,
            Locality::PLocal => self.p_local,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharpnessScan {
    pub delta: i64,
    pub n: i64,
    pub locality: Locality,
    /// largest `j` with a non-zero class, `None` if already zero at `j = 0`
    pub j_max: Option<u32>,
    /// `n − 1 − δ` when positive: where the `p`-local answer must land
    pub predicted_p_local_j_max: Option<u32>,
    pub table: Vec<ScanRow>,
}

impl SharpnessScan {
    /// Rows on which the integral and `p`-local verdicts disagree.
    pub fn divergent_rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.table.iter().filter(|r| r.integral != r.p_local)
    }
}

/// Table of verdicts for `0 ≤ j ≤ n` at fixed `n`, evaluated in parallel on
/// the ambient rayon pool; row order is by `j`.
pub fn sharpness_scan(rep: &RepSpec, n: i64, locality: Locality) -> Result<SharpnessScan> {
    sharpness_scan_cached(rep, n, locality, &QuotientCache::new())
}

pub fn sharpness_scan_cached(
    rep: &RepSpec,
    n: i64,
    locality: Locality,
    cache: &QuotientCache,
) -> Result<SharpnessScan> {
    let d = delta(rep)?;
    let ctx = cache.get(rep.group(), n)?;
    let js: Vec<u32> = (0..=n as u32).collect();
    let table = js
        .par_iter()
        .map(|&j| {
            let class = euler_class_twisted(rep, j);
            Ok(ScanRow {
                j,
                integral: !is_zero_in_quotient(&class, &ctx, Locality::Integral)?,
                p_local: !is_zero_in_quotient(&class, &ctx, Locality::PLocal)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let j_max = table.iter().filter(|r| r.verdict(locality)).map(|r| r.j).max();
    let predicted = if n > d { Some((n - 1 - d) as u32) } else { None };
    Ok(SharpnessScan { delta: d, n, locality, j_max, predicted_p_local_j_max: predicted, table })
}

/// `φ(z) = 1 + z^{p^k} + ... + z^{(p−1)p^k}`.
pub fn phi_poly(group: GroupSpec) -> CyclicPoly {
    let step = group.p_pow(group.k()) as usize;
    let mut coeffs = vec![0i64; group.order()];
    for i in 0..group.p() as usize {
        coeffs[i * step] = 1;
    }
    CyclicPoly::from_poly(group, coeffs)
}

// Plain polynomials in Z[z], lowest degree first, no folding.

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        v.push(BigInt::zero());
    }
    v
}

/// `(1 − z^e)^power`.
fn one_minus_monomial_pow(e: usize, power: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); e * power as usize + 1];
    for (i, c) in binomial_row(power).into_iter().enumerate() {
        out[i * e] = if i % 2 == 0 { c } else { -c };
    }
    out
}

fn sub_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    let zero = BigInt::zero();
    (0..len).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect()
}

/// `r / (1 − z)` when exact; the quotient coefficients are prefix sums.
fn div_one_minus_z(r: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut q = Vec::with_capacity(r.len());
    let mut acc = BigInt::zero();
    for c in r {
        acc += c;
        q.push(acc.clone());
    }
    // the final prefix sum is r(1) and must vanish
    if !q.pop().unwrap_or_default().is_zero() {
        return None;
    }
    Some(q)
}

fn phi_plain(group: GroupSpec) -> Vec<BigInt> {
    let step = group.p_pow(group.k()) as usize;
    let mut v = vec![BigInt::zero(); (group.p() as usize - 1) * step + 1];
    for i in 0..group.p() as usize {
        v[i * step] = BigInt::one();
    }
    v
}

/// Solves `(1 − z^{p^l})^{(p−1)p^{k−l}} = −p(1 + (1 − z)a_l(z)) + φ(z)` for
/// `a_l ∈ Z[z]` and returns its coefficients.
pub fn verify_identity_a(group: GroupSpec, l: u32) -> Result<Vec<BigInt>> {
    let k = group.k();
    if l > k {
        return Err(Error::LevelOutOfRange { l, k });
    }
    let p = group.p();
    let e = group.p_pow(l) as usize;
    let power = (p - 1) * group.p_pow(k - l);
    let lhs = one_minus_monomial_pow(e, power);
    let phi = phi_plain(group);
    let diff = sub_poly(&lhs, &phi);

    let minus_p = BigInt::from(-(p as i64));
    let mut unit_part = Vec::with_capacity(diff.len());
    for (i, c) in diff.iter().enumerate() {
        let (q, r) = c.div_rem(&minus_p);
        if !r.is_zero() {
            return Err(Error::IdentityFailed(format!("coefficient {i} of LHS − φ is {c}, not divisible by −{p}")));
        }
        unit_part.push(q);
    }
    unit_part[0] -= 1;
    let a = div_one_minus_z(&unit_part)
        .ok_or_else(|| Error::IdentityFailed("(LHS − φ)/(−p) − 1 is not divisible by 1 − z".into()))?;
    Ok(trim(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic_ring::cyclic_mul;

    fn g(p: u64, k: i64) -> GroupSpec {
        GroupSpec::new(p, k).unwrap()
    }

    fn rep(p: u64, k: i64, e: &[i64]) -> RepSpec {
        RepSpec::new(g(p, k), e).unwrap()
    }

    fn poly(group: GroupSpec, c: &[i64]) -> CyclicPoly {
        CyclicPoly::from_poly(group, c.iter().copied())
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn euler_class_examples() {
        assert_eq!(euler_class(&rep(2, 1, &[1])), poly(g(2, 1), &[1, -1]));
        assert_eq!(euler_class(&rep(2, 0, &[1, 1])), poly(g(2, 0), &[2, -2]));
        assert_eq!(euler_class(&rep(2, 1, &[2])), poly(g(2, 1), &[1, 0, -1]));
    }

    #[test]
    fn euler_class_is_multiplicative() {
        let a = rep(3, 1, &[1, 3, 4]);
        let b = rep(3, 1, &[2, 6]);
        let ab = a.direct_sum(&b).unwrap();
        assert_eq!(euler_class(&ab), cyclic_mul(&euler_class(&a), &euler_class(&b)).unwrap());
    }

    #[test]
    fn oracle_examples() {
        let q = |e: &[i64], j, n| EulerQuery::new(rep(2, 0, e), n, j, Locality::PLocal).unwrap();
        assert!(!lemma41_nonvanishing(&q(&[1], 0, 1)).unwrap());
        assert!(lemma41_nonvanishing(&q(&[1], 0, 2)).unwrap());
        assert!(lemma41_nonvanishing(&q(&[1, 1], 1, 4)).unwrap());
        assert!(!lemma41_nonvanishing(&q(&[1, 1], 1, 3)).unwrap());
        let integral = EulerQuery::new(rep(2, 0, &[1, 1]), 4, 1, Locality::Integral).unwrap();
        assert!(lemma41_nonvanishing(&integral).unwrap());
    }

    #[test]
    fn oracle_refuses_empty_top_level() {
        let q = EulerQuery::new(rep(2, 1, &[1]), 3, 0, Locality::PLocal).unwrap();
        assert!(matches!(lemma41_nonvanishing(&q), Err(Error::TopLevelEmpty { .. })));
        assert!(EulerQuery::new(rep(2, 0, &[1]), 0, 0, Locality::PLocal).is_err());
    }

    #[test]
    fn scan_examples() {
        let s = sharpness_scan(&rep(2, 0, &[1, 1]), 4, Locality::PLocal).unwrap();
        assert_eq!(s.j_max, Some(1));
        assert_eq!(s.table.len(), 5);
        let s = sharpness_scan(&rep(2, 0, &[1, 1]), 2, Locality::PLocal).unwrap();
        assert_eq!(s.j_max, None);
        assert_eq!(s.predicted_p_local_j_max, None);
        let s = sharpness_scan(&rep(2, 1, &[2]), 3, Locality::PLocal).unwrap();
        assert_eq!(s.j_max, Some(1));
        assert_eq!(s.predicted_p_local_j_max, Some(1));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_poly(g(2, 0)), poly(g(2, 0), &[1, 1]));
        assert_eq!(phi_poly(g(2, 1)), poly(g(2, 1), &[1, 0, 1, 0]));
        assert_eq!(phi_poly(g(3, 0)), poly(g(3, 0), &[1, 1, 1]));
        for (p, k) in [(2, 2), (3, 1), (5, 1)] {
            let group = g(p, k);
            let step = group.p_pow(group.k()) as u64;
            assert!(phi_poly(group).mul_one_minus_power(step).is_zero());
        }
    }

    #[test]
    fn identity_a_examples() {
        assert_eq!(ints(&verify_identity_a(g(2, 0), 0).unwrap()), vec![-1]);
        assert_eq!(ints(&verify_identity_a(g(3, 0), 0).unwrap()), vec![-1]);
        assert_eq!(ints(&verify_identity_a(g(2, 1), 1).unwrap()), vec![-1, -1]);
        assert_eq!(verify_identity_a(g(2, 1), 2), Err(Error::LevelOutOfRange { l: 2, k: 1 }));
    }

    #[test]
    fn plain_division_rejects_non_multiples() {
        let r: Vec<BigInt> = [1, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert!(div_one_minus_z(&r).is_none());
    }
}
