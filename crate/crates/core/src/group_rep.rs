//! The cyclic group `Z/p^{k+1}` and its complex representations.
//!
//! A representation is a direct sum of tensor powers `L^t` of the basic
//! character `L`, stored as the multiset of exponents `t` reduced into
//! `[1, N-1]`. Everything the bounds need is read off the valuation
//! profile `(m_0, ..., m_k)` where `m_l` counts exponents of `p`-adic
//! valuation exactly `l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The cyclic group of order `p^{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    p: u64,
    k: u32,
    order: usize,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p`-adic valuation of a non-zero integer.
pub fn valuation(p: u64, mut t: u64) -> u32 {
    debug_assert!(t != 0);
    let mut v = 0;
    while t % p == 0 {
        t /= p;
        v += 1;
    }
    v
}

impl GroupSpec {
    pub fn new(p: u64, k: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 0 {
            return Err(Error::NegativeLevel(k));
        }
        let exp = u32::try_from(k + 1).map_err(|_| Error::OrderOverflow { p, exp: u32::MAX })?;
        let order = usize::try_from(p)
            .ok()
            .and_then(|p| p.checked_pow(exp))
            .filter(|&n| n <= i64::MAX as usize)
            .ok_or(Error::OrderOverflow { p, exp })?;
        Ok(Self { p, k: exp - 1, order })
    }

    /// Group of order `p^kappa`, `kappa >= 1`.
    pub fn with_order_exponent(p: u64, kappa: u32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::NegativeLevel(-1));
        }
        Self::new(p, i64::from(kappa) - 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `kappa = k + 1`, so that the order is `p^kappa`.
    pub fn kappa(&self) -> u32 {
        self.k + 1
    }

    /// `N = p^{k+1}`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `p^e` as a plain integer; callers keep `e <= k + 1`.
    pub fn p_pow(&self, e: u32) -> u64 {
        self.p.pow(e)
    }

    /// Fold an arbitrary integer exponent into `[0, N-1]`.
    pub fn reduce(&self, t: i64) -> u64 {
        t.rem_euclid(self.order as i64) as u64
    }
}

/// A complex representation `V = ⊕ L^{t_i}` with `V^G = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepSpec {
    group: GroupSpec,
    exponents: Vec<u64>,
    profile: Vec<usize>,
}

impl RepSpec {
    /// Builds a representation from raw exponents, folding them mod `N`.
    pub fn new(group: GroupSpec, exponents: &[i64]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptyRepresentation);
        }
        let mut reduced = Vec::with_capacity(exponents.len());
        for &t in exponents {
            let r = group.reduce(t);
            if r == 0 {
                return Err(Error::TrivialSummand { exponent: t, order: group.order() });
            }
            reduced.push(r);
        }
        reduced.sort_unstable();
        let mut profile = vec![0usize; group.kappa() as usize];
        for &t in &reduced {
            profile[valuation(group.p(), t) as usize] += 1;
        }
        Ok(Self { group, exponents: reduced, profile })
    }

    /// Expands a profile into canonical exponents: `m_l` copies of `p^l`.
    pub fn from_profile(group: GroupSpec, profile: &[usize]) -> Result<Self> {
        if profile.len() != group.kappa() as usize {
            return Err(Error::ProfileLength { got: profile.len(), expected: group.kappa() as usize });
        }
        let exps: Vec<i64> = profile
            .iter()
            .enumerate()
            .flat_map(|(l, &m)| std::iter::repeat(group.p_pow(l as u32) as i64).take(m))
            .collect();
        Self::new(group, &exps)
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    /// Exponents in `[1, N-1]`, sorted ascending.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `(m_0, ..., m_k)`.
    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    /// Complex dimension `m`.
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// `Σ p^l m_l`.
    pub fn weighted_sum(&self) -> i64 {
        self.profile
            .iter()
            .enumerate()
            .map(|(l, &m)| self.group.p_pow(l as u32) as i64 * m as i64)
            .sum()
    }

    /// Largest valuation present among the exponents.
    pub fn top_valuation(&self) -> u32 {
        self.profile.iter().rposition(|&m| m > 0).unwrap_or(0) as u32
    }

    pub fn top_level_nonempty(&self) -> bool {
        self.profile[self.group.k() as usize] != 0
    }

    /// Concatenation of two exponent multisets over the same group.
    pub fn direct_sum(&self, other: &RepSpec) -> Result<RepSpec> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group.order(), right: other.group.order() });
        }
        let exps: Vec<i64> =
            self.exponents.iter().chain(&other.exponents).map(|&t| t as i64).collect();
        RepSpec::new(self.group, &exps)
    }
}

/// `δ(V) = Σ p^l m_l − (p^k − 1)`, defined only when `m_k ≠ 0`.
pub fn delta(rep: &RepSpec) -> Result<i64> {
    let g = rep.group();
    if !rep.top_level_nonempty() {
        return Err(Error::TopLevelEmpty { k: g.k(), effective_k: rep.top_valuation() });
    }
    Ok(rep.weighted_sum() - (g.p_pow(g.k()) as i64 - 1))
}

/// Result of restricting to the subgroup on which the top valuation level
/// is occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveRep {
    pub k: u32,
    pub rep: RepSpec,
    pub delta: i64,
}

/// Restricts `V` to the subgroup of order `p^{k'+1}`, `k'` the largest
/// valuation present, and evaluates `δ` there. Identity when `m_k ≠ 0`.
pub fn effective_reduction(rep: &RepSpec) -> EffectiveRep {
    if rep.top_level_nonempty() {
        let delta = delta(rep).expect("top level occupied");
        return EffectiveRep { k: rep.group().k(), rep: rep.clone(), delta };
    }
    let g = rep.group();
    let k_eff = rep.top_valuation();
    let sub = GroupSpec::new(g.p(), i64::from(k_eff)).expect("subgroup of a valid group");
    let exps: Vec<i64> = rep.exponents().iter().map(|&t| t as i64).collect();
    // valuations are all <= k_eff, so nothing folds to zero
    let reduced = RepSpec::new(sub, &exps).expect("valuations below k' survive reduction");
    let delta = delta(&reduced).expect("top valuation occupied after reduction");
    EffectiveRep { k: k_eff, rep: reduced, delta }
}

/// Wire form shared with the command line: `{"p", "k", "exponents"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepInput {
    pub p: u64,
    pub k: i64,
    pub exponents: Vec<i64>,
}

impl RepInput {
    pub fn build(&self) -> Result<RepSpec> {
        RepSpec::new(GroupSpec::new(self.p, self.k)?, &self.exponents)
    }
}

impl From<&RepSpec> for RepInput {
    fn from(rep: &RepSpec) -> Self {
        Self {
            p: rep.group().p(),
            k: i64::from(rep.group().k()),
            exponents: rep.exponents().iter().map(|&t| t as i64).collect(),
        }
    }
}
