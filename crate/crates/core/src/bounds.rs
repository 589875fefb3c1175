//! Zero-set dimension bounds and comparisons with earlier bounds.
//!
//! `n` is always a complex dimension (of the source module `nL`); every
//! bound returned here is a real covering dimension.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::constructions::{plan_theorem13, worst_case_c};
use crate::error::{Error, Result};
use crate::group_rep::{delta, effective_reduction, GroupSpec, RepSpec};

/// `2(n − 1 − δ(V))` when `n > δ(V)`, otherwise `None`.
pub fn zero_set_lower_bound(rep: &RepSpec, n: i64) -> Result<Option<i64>> {
    let d = delta(rep)?;
    Ok((n > d).then(|| 2 * (n - 1 - d)))
}

/// A map `S(nL) → S(V)` can only exist if `n ≤ δ(V)`.
pub fn sphere_map_necessary(rep: &RepSpec, n: i64) -> Result<bool> {
    Ok(n <= delta(rep)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointBound {
    pub bound: i64,
    /// profile of the normal representation, `m_l = r(p−1)p^{k−l}/2`
    pub profile: Vec<usize>,
    pub delta: i64,
    /// extra hypothesis needed for `p = 2`
    pub note: Option<String>,
}

/// `d ≥ 2(n + (p^k − 1) − 1) − r(k+1)(p−1)p^k` for maps from a free
/// `Z/p^{k+1}`-space into an `r`-manifold, cross-checked against the generic
/// bound on the wreath profile.
pub fn corollary37_report(p: u64, k: u32, r: u64, n: i64) -> Result<FixedPointBound> {
    let group = GroupSpec::new(p, i64::from(k))?;
    if r == 0 {
        return Err(Error::InvalidBound("manifold dimension r must be positive".into()));
    }
    let note = if p == 2 {
        if r % 2 == 1 {
            return Err(Error::InvalidBound(format!(
                "p = 2 needs a complex structure on the tangent bundle, so r must be even (got {r})"
            )));
        }
        Some("p = 2: assumes the tangent bundle of the manifold admits a complex structure".to_string())
    } else {
        None
    };
    let profile: Vec<usize> =
        (0..=k).map(|l| (r * (p - 1) * p.pow(k - l) / 2) as usize).collect();
    let rep = RepSpec::from_profile(group, &profile)?;
    let d = delta(&rep)?;
    let generic = 2 * (n - 1 - d);
    let pk = p.pow(k) as i64;
    let closed = 2 * (n + (pk - 1) - 1) - r as i64 * (i64::from(k) + 1) * (p as i64 - 1) * pk;
    if generic != closed {
        return Err(Error::InvalidBound(format!("closed form {closed} disagrees with generic bound {generic}")));
    }
    Ok(FixedPointBound { bound: closed, profile, delta: d, note })
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub value: Option<i64>,
    pub applicable: bool,
    pub note: Option<String>,
}

impl ComparisonRow {
    fn applies(value: i64, note: Option<String>) -> Self {
        Self { value: Some(value), applicable: true, note }
    }

    fn not_applicable(note: impl Into<String>) -> Self {
        Self { value: None, applicable: false, note: Some(note.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparisons {
    pub ours: ComparisonRow,
    pub bms: ComparisonRow,
    pub crabb2019: ComparisonRow,
}

/// Our bound next to the Błaszczak–Marzantowicz–Singh bound
/// `2⌈(n − 1 − p^{k'}m)/p^{k'}⌉` and, for `p = 2` with every summand at the
/// top valuation, the bound `2(n − 2^k m − 1)`.
pub fn compare_remark310(rep: &RepSpec, n: i64) -> Comparisons {
    let eff = effective_reduction(rep);
    let group = rep.group();
    let m = rep.dim() as i64;

    let ours = if n > eff.delta {
        ComparisonRow::applies(2 * (n - 1 - eff.delta), (eff.k < group.k()).then(|| format!("reduced to k' = {}", eff.k)))
    } else {
        ComparisonRow::not_applicable(format!("n = {n} ≤ δ = {}", eff.delta))
    };

    let pk_eff = group.p_pow(eff.k) as i64;
    let r = Integer::div_ceil(&(n - 1 - pk_eff * m), &pk_eff);
    let bms = ComparisonRow::applies(2 * r, Some(format!("k' = {}", eff.k)));

    let top = rep.profile()[group.k() as usize];
    let crabb2019 = if group.p() != 2 {
        ComparisonRow::not_applicable("requires p = 2")
    } else if top != rep.dim() {
        ComparisonRow::not_applicable("requires m_k = m")
    } else {
        let pk = group.p_pow(group.k()) as i64;
        ComparisonRow::applies(2 * (n - pk * m - 1), None)
    };

    Comparisons { ours, bms, crabb2019 }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceModuleBound {
    pub n: i64,
    pub bound: Option<i64>,
    /// `r_1 ⋯ r_n` over the exponents of `U`
    pub gamma_order: BigInt,
}

/// Zero-set bound for maps `S(U) → V`, `n = dim U`.
pub fn corollary39_bound(source: &RepSpec, target: &RepSpec) -> Result<SourceModuleBound> {
    if source.group() != target.group() {
        return Err(Error::GroupMismatch { left: source.group().order(), right: target.group().order() });
    }
    let n = source.dim() as i64;
    let bound = zero_set_lower_bound(target, n)?;
    let gamma_order = source.exponents().iter().fold(BigInt::one(), |acc, &r| acc * BigInt::from(r));
    Ok(SourceModuleBound { n, bound, gamma_order })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionSummary {
    pub n0: u64,
    pub c_achieved: i64,
    pub c_worst: i64,
    /// real dimension of the zero-set sphere on `S(nL)`; `None` if `n ≤ n_0`
    pub zero_set_dim: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Units {
    pub n: &'static str,
    pub bounds: &'static str,
}

pub const UNITS: Units = Units { n: "complex", bounds: "real" };

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub delta: i64,
    pub n: i64,
    pub lower_bound_dim: Option<i64>,
    pub necessary: bool,
    pub construction: Option<ConstructionSummary>,
    pub comparisons: Comparisons,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_k: Option<u32>,
    pub units: Units,
}

/// Full report. Inputs with `m_k = 0` are reduced first and the report
/// names the level it refers to in `effective_k`.
pub fn bounds_report(rep: &RepSpec, n: i64) -> BoundsReport {
    let eff = effective_reduction(rep);
    let reduced = &eff.rep;
    let construction = plan_theorem13(reduced).ok().map(|plan| ConstructionSummary {
        n0: plan.n0,
        c_achieved: plan.c_achieved,
        c_worst: worst_case_c(reduced.group().p(), reduced.group().k()),
        zero_set_dim: (n > plan.n0 as i64).then(|| 2 * (n - plan.n0 as i64) - 1),
    });
    BoundsReport {
        delta: eff.delta,
        n,
        lower_bound_dim: zero_set_lower_bound(reduced, n).expect("reduced rep has m_k != 0"),
        necessary: sphere_map_necessary(reduced, n).expect("reduced rep has m_k != 0"),
        construction,
        comparisons: compare_remark310(rep, n),
        effective_k: (eff.k < rep.group().k()).then_some(eff.k),
        units: UNITS,
    }
}
