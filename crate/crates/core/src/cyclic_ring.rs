//! Exact arithmetic in `Z[z]/(z^N − 1)` and membership in the ideal
//! generated by `(1 − z)^n`.
//!
//! The quotient `Z[z]/(z^N − 1, (1 − z)^n)` is presented as `Z^N` modulo
//! the lattice spanned by the cyclic shifts of `(1 − z)^n`. The lattice sits
//! inside the augmentation sublattice, where it has full rank; a Hermite
//! basis there answers membership (integral or after inverting every prime
//! other than `p`) and a Smith form modulo its determinant gives the abelian
//! group structure of the quotient.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_rep::GroupSpec;
use crate::smith::{determinant, hermite_rows, hermite_rows_mod, invariant_factors_mod, Echelon, IntMatrix};

/// An element of `Z[z]/(z^N − 1)`; index `i` holds the coefficient of `z^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicPoly {
    group: GroupSpec,
    coeffs: Vec<BigInt>,
}

impl CyclicPoly {
    pub fn zero(group: GroupSpec) -> Self {
        Self { group, coeffs: vec![BigInt::zero(); group.order()] }
    }

    pub fn one(group: GroupSpec) -> Self {
        Self::monomial(group, 0, BigInt::one())
    }

    /// `c · z^e`, the exponent folded mod `N`.
    pub fn monomial(group: GroupSpec, e: i64, c: BigInt) -> Self {
        let mut out = Self::zero(group);
        out.coeffs[group.reduce(e) as usize] = c;
        out
    }

    /// Folds an ordinary polynomial (coefficient of `z^i` at index `i`).
    pub fn from_poly<I, T>(group: GroupSpec, coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut out = Self::zero(group);
        let n = group.order();
        for (i, c) in coeffs.into_iter().enumerate() {
            out.coeffs[i % n] += c.into();
        }
        out
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Value at `z = 1`, the augmentation.
    pub fn coefficient_sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    fn check_group(&self, other: &CyclicPoly) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { left: self.group.order(), right: other.group.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &CyclicPoly) -> Result<CyclicPoly> {
        self.check_group(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { group: self.group, coeffs })
    }

    pub fn sub(&self, other: &CyclicPoly) -> Result<CyclicPoly> {
        self.check_group(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { group: self.group, coeffs })
    }

    pub fn scale(&self, c: &BigInt) -> CyclicPoly {
        Self { group: self.group, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplication by `z^e`: a cyclic rotation.
    pub fn shift(&self, e: i64) -> CyclicPoly {
        let n = self.group.order();
        let s = self.group.reduce(e) as usize;
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(i + s) % n] = c.clone();
        }
        Self { group: self.group, coeffs }
    }

    /// Multiplication by `1 − z^t`, cheaper than a full convolution.
    pub fn mul_one_minus_power(&self, t: u64) -> CyclicPoly {
        let n = self.group.order();
        let t = (t % n as u64) as usize;
        let coeffs = (0..n).map(|i| &self.coeffs[i] - &self.coeffs[(i + n - t) % n]).collect();
        Self { group: self.group, coeffs }
    }

    pub fn mul(&self, other: &CyclicPoly) -> Result<CyclicPoly> {
        cyclic_mul(self, other)
    }
}

/// Cyclic convolution: exact product with exponents folded mod `N`.
pub fn cyclic_mul(a: &CyclicPoly, b: &CyclicPoly) -> Result<CyclicPoly> {
    a.check_group(b)?;
    let n = a.group.order();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % n] += x * y;
            }
        }
    }
    Ok(CyclicPoly { group: a.group, coeffs: out })
}

/// Binomial coefficients `C(n, 0..=n)`.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for i in 1..=n {
        c = c * BigInt::from(n - i + 1) / BigInt::from(i);
        row.push(c.clone());
    }
    row
}

/// `(1 − z)^n` expanded with exact binomials and folded mod `z^N − 1`.
pub fn binomial_one_minus_z(group: GroupSpec, n: i64) -> Result<CyclicPoly> {
    if n < 0 {
        return Err(Error::NegativeExponent(n));
    }
    let row = binomial_row(n as u64);
    let signed = row.into_iter().enumerate().map(|(i, c)| if i % 2 == 0 { c } else { -c });
    Ok(CyclicPoly::from_poly(group, signed))
}

/// Whether membership is tested over `Z` or over `Z_(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Integral,
    PLocal,
}

impl Locality {
    pub fn name(self) -> &'static str {
        match self {
            Locality::Integral => "integral",
            Locality::PLocal => "p_local",
        }
    }
}

fn p_part(d: &BigInt, p: u64) -> BigInt {
    let p = BigInt::from(p);
    let mut rest = d.clone();
    let mut part = BigInt::one();
    while rest.is_multiple_of(&p) {
        rest /= &p;
        part *= &p;
    }
    part
}

/// Coordinates of an augmentation-zero vector in the basis `e_i − e_{i+1}`,
/// which are its prefix sums; the final (total) sum is dropped.
fn augmentation_coords(x: &[BigInt]) -> Vec<BigInt> {
    let mut acc = BigInt::zero();
    let mut out = Vec::with_capacity(x.len().saturating_sub(1));
    for v in &x[..x.len() - 1] {
        acc += v;
        out.push(acc.clone());
    }
    out
}

/// The relation lattice of `((1 − z)^n)` in `Z[z]/(z^N − 1)`.
#[derive(Debug)]
pub struct QuotientCtx {
    group: GroupSpec,
    n: u64,
    generators: IntMatrix,
    /// Hermite basis in augmentation coordinates
    basis: Echelon,
    factors: OnceLock<Vec<BigInt>>,
}

impl QuotientCtx {
    pub fn new(group: GroupSpec, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::TruncationTooSmall(n));
        }
        let base = binomial_one_minus_z(group, n)?;
        let columns: Vec<Vec<BigInt>> =
            (0..group.order()).map(|i| base.shift(i as i64).coeffs).collect();
        let rows: Vec<Vec<BigInt>> = columns.iter().map(|c| augmentation_coords(c)).collect();
        let m = group.order() - 1;
        // the last shift is minus the sum of the others, so the first m
        // shifts already span the lattice and their determinant is its index
        let square = IntMatrix::from_columns(m, &rows[..m]);
        let det = determinant(&square);
        let basis = if det.is_zero() { hermite_rows(rows, m) } else { hermite_rows_mod(rows, m, &det) };
        let generators = IntMatrix::from_columns(group.order(), &columns);
        Ok(Self { group, n: n as u64, generators, basis, factors: OnceLock::new() })
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Column `i` is `z^i (1 − z)^n`.
    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    /// Hermite basis of the lattice in the coordinates `e_i − e_{i+1}`.
    pub fn hermite_basis(&self) -> &Echelon {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows.len()
    }

    /// Invariant factors `d_1 | d_2 | ...` of the lattice, one per rank.
    pub fn invariant_factors(&self) -> &[BigInt] {
        self.factors.get_or_init(|| {
            let m = self.group.order() - 1;
            if self.rank() < m {
                // never happens for n >= 1: z = 1 is the only common root
                let a = IntMatrix::from_columns(m, &self.basis.rows);
                return crate::smith::smith_normal_form(&a).invariant_factors;
            }
            let det = self.basis.rows.iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i]);
            let mut a = IntMatrix::zeros(m, m);
            for (i, row) in self.basis.rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    a[(i, j)] = v.clone();
                }
            }
            invariant_factors_mod(&a, &det)
        })
    }

    /// Solves against the Hermite basis; in `p`-local mode the vector may be
    /// rescaled by integers prime to `p`.
    fn contains(&self, x: &[BigInt], locality: Locality) -> bool {
        if !x.iter().sum::<BigInt>().is_zero() {
            return false;
        }
        let mut c = augmentation_coords(x);
        for (row, &j) in self.basis.rows.iter().zip(&self.basis.pivots) {
            if c[..j].iter().any(|v| !v.is_zero()) {
                return false;
            }
            if c[j].is_zero() {
                continue;
            }
            let h = &row[j];
            if locality == Locality::PLocal {
                let ppart = p_part(h, self.group.p());
                if !c[j].is_multiple_of(&ppart) {
                    return false;
                }
                let unit = h / &ppart;
                let scale = &unit / unit.gcd(&c[j]);
                if !scale.is_one() {
                    for v in c.iter_mut() {
                        *v *= &scale;
                    }
                }
            } else if !c[j].is_multiple_of(h) {
                return false;
            }
            let q = &c[j] / h;
            for (v, r) in c.iter_mut().zip(row) {
                if !r.is_zero() {
                    *v -= &q * r;
                }
            }
        }
        c.iter().all(|v| v.is_zero())
    }
}

pub fn make_quotient_ctx(group: GroupSpec, n: i64) -> Result<QuotientCtx> {
    QuotientCtx::new(group, n)
}

/// True iff `x` lies in the relation lattice (tensored with `Z_(p)` in
/// `p`-local mode), i.e. `x` is zero in the quotient ring.
pub fn is_zero_in_quotient(x: &CyclicPoly, ctx: &QuotientCtx, locality: Locality) -> Result<bool> {
    if x.group() != ctx.group {
        return Err(Error::GroupMismatch { left: x.group().order(), right: ctx.group.order() });
    }
    Ok(ctx.contains(x.coeffs(), locality))
}

/// `Z^N / lattice ≅ Z^free_rank ⊕ ⊕ Z/d` over the invariant factors `d > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientStructure {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn quotient_invariants(ctx: &QuotientCtx) -> QuotientStructure {
    QuotientStructure {
        free_rank: ctx.group.order() - ctx.rank(),
        torsion: ctx.invariant_factors().iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// Memoises one `QuotientCtx` per `(group, n)`; safe to share across threads.
#[derive(Debug, Default)]
pub struct QuotientCache {
    slots: Mutex<HashMap<(GroupSpec, i64), Arc<OnceLock<Arc<QuotientCtx>>>>>,
}

impl QuotientCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, group: GroupSpec, n: i64) -> Result<Arc<QuotientCtx>> {
        if n < 1 {
            return Err(Error::TruncationTooSmall(n));
        }
        let slot = {
            let mut slots = self.slots.lock().expect("cache lock poisoned");
            slots.entry((group, n)).or_default().clone()
        };
        Ok(slot
            .get_or_init(|| Arc::new(QuotientCtx::new(group, n).expect("n checked above")))
            .clone())
    }
}
