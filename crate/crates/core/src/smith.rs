//! Dense integer matrices and Smith normal form over `Z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major dense matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j];
            if !v.is_zero() {
                let d = q * v;
                self.data[dst * self.cols + j] -= d;
            }
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src];
            if !v.is_zero() {
                let d = q * v;
                self.data[i * self.cols + dst] -= d;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// `U · A · W = diag(d_1, ..., d_r, 0, ...)` with `U`, `W` unimodular and
/// `d_1 | d_2 | ... | d_r`, all positive.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// The diagonal matrix `U·A·W` as it should come out.
    pub fn diagonal(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, f) in self.invariant_factors.iter().enumerate() {
            d[(i, i)] = f.clone();
        }
        d
    }
}

/// Quotient rounded to nearest, so remainders stay at most half the pivot.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    // the floor remainder carries the sign of b; stepping q up by one
    // replaces r with r - b
    let (q, r) = a.div_mod_floor(b);
    if r.abs() * 2 > b.abs() {
        q + 1
    } else {
        q
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut w = IntMatrix::identity(n);
    let mut factors = Vec::new();

    for t in 0..m.min(n) {
        // smallest non-zero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let v = &d[(i, j)];
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        w.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                while !d[(i, t)].is_zero() {
                    let q = nearest_quotient(&d[(i, t)], &d[(t, t)]);
                    d.row_axpy(i, t, &q);
                    u.row_axpy(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        d.swap_rows(i, t);
                        u.swap_rows(i, t);
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                while !d[(t, j)].is_zero() {
                    let q = nearest_quotient(&d[(t, j)], &d[(t, t)]);
                    d.col_axpy(j, t, &q);
                    w.col_axpy(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(j, t);
                        w.swap_cols(j, t);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a non-divisible row into the pivot row
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    d.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        factors.push(d[(t, t)].clone());
    }

    SmithForm { left: u, right: w, invariant_factors: factors }
}

/// Row echelon basis of a lattice: pivots are positive and the entries above
/// each pivot are reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

fn row_sub(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// Hermite normal form of the lattice spanned by `rows`.
pub fn hermite_rows(mut a: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..cols {
        if r == a.len() {
            break;
        }
        for i in r + 1..a.len() {
            if a[i][j].is_zero() {
                continue;
            }
            if a[r][j].is_zero() {
                a.swap(r, i);
                continue;
            }
            let (x, y) = (a[r][j].clone(), a[i][j].clone());
            let e = x.extended_gcd(&y);
            let (u, v) = (&x / &e.gcd, &y / &e.gcd);
            // [s t; -v u] has determinant 1 and clears column j of row i
            let top: Vec<BigInt> = a[r].iter().zip(&a[i]).map(|(p, q)| &e.x * p + &e.y * q).collect();
            let bottom: Vec<BigInt> = a[r].iter().zip(&a[i]).map(|(p, q)| &u * q - &v * p).collect();
            a[r] = top;
            a[i] = bottom;
        }
        if a[r][j].is_zero() {
            continue;
        }
        if a[r][j].is_negative() {
            for v in a[r].iter_mut() {
                *v = -std::mem::take(v);
            }
        }
        let (above, rest) = a.split_at_mut(r);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            let q = row[j].div_floor(&pivot_row[j]);
            if !q.is_zero() {
                row_sub(row, pivot_row, &q);
            }
        }
        pivots.push(j);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    let m = a.rows();
    assert_eq!(m, a.cols(), "square matrix expected");
    let mut d = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for t in 0..m {
        let Some(pi) = (t..m).find(|&i| !d[(i, t)].is_zero()) else {
            return BigInt::zero();
        };
        if pi != t {
            d.swap_rows(t, pi);
            sign = -sign;
        }
        for i in t + 1..m {
            for j in t + 1..m {
                let v = (&d[(i, j)] * &d[(t, t)] - &d[(i, t)] * &d[(t, j)]) / &prev;
                d[(i, j)] = v;
            }
            d[(i, t)] = BigInt::zero();
        }
        prev = d[(t, t)].clone();
    }
    sign * prev
}

/// Hermite normal form of a full-rank lattice in `Z^cols` spanned by `rows`,
/// given a non-zero multiple `det` of its determinant. Entries stay below
/// `det` throughout because `det·Z^cols` lies in the lattice.
pub fn hermite_rows_mod(rows: Vec<Vec<BigInt>>, cols: usize, det: &BigInt) -> Echelon {
    let reduce = |row: &mut Vec<BigInt>, r: &BigInt| {
        for v in row.iter_mut() {
            *v = v.mod_floor(r);
        }
    };
    let mut r = det.abs();
    assert!(!r.is_zero(), "determinant multiple must be non-zero");
    let mut work = rows;
    for row in work.iter_mut() {
        reduce(row, &r);
    }
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(cols);
    for i in 0..cols {
        // gather the gcd of column i into the first working row
        let mut first = work.iter().position(|row| !row[i].is_zero());
        if let Some(f) = first {
            work.swap(0, f);
            first = Some(0);
            for k in 1..work.len() {
                if work[k][i].is_zero() {
                    continue;
                }
                let (x, y) = (work[0][i].clone(), work[k][i].clone());
                let e = x.extended_gcd(&y);
                let (u, v) = (&x / &e.gcd, &y / &e.gcd);
                let mut top: Vec<BigInt> = work[0].iter().zip(&work[k]).map(|(p, q)| &e.x * p + &e.y * q).collect();
                let mut bottom: Vec<BigInt> = work[0].iter().zip(&work[k]).map(|(p, q)| &u * q - &v * p).collect();
                reduce(&mut top, &r);
                reduce(&mut bottom, &r);
                work[0] = top;
                work[k] = bottom;
            }
        }
        let pivot_row = match first {
            Some(_) => work.remove(0),
            None => vec![BigInt::zero(); cols],
        };
        let a = if pivot_row[i].is_zero() { r.clone() } else { pivot_row[i].clone() };
        let e = a.extended_gcd(&r);
        let mut w: Vec<BigInt> = pivot_row.iter().map(|v| (&e.x * v).mod_floor(&r)).collect();
        w[i] = e.gcd.clone();
        r /= &e.gcd;
        for row in work.iter_mut() {
            reduce(row, &r);
        }
        basis.push(w);
    }
    // exact reduction above each pivot
    for j in 0..cols {
        let (above, rest) = basis.split_at_mut(j);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            let q = row[j].div_floor(&pivot_row[j]);
            if !q.is_zero() {
                row_sub(row, pivot_row, &q);
            }
        }
    }
    Echelon { rows: basis, pivots: (0..cols).collect() }
}

/// Invariant factors of a full-rank square lattice basis `a` whose
/// determinant is `±det`. All arithmetic is done modulo `det`, which is
/// legitimate because `det·Z^m` lies in the lattice.
pub fn invariant_factors_mod(a: &IntMatrix, det: &BigInt) -> Vec<BigInt> {
    let m = a.rows();
    assert_eq!(m, a.cols(), "square matrix expected");
    let modulus = det.abs();
    let mut d = a.clone();
    for v in d.data.iter_mut() {
        *v = v.mod_floor(&modulus);
    }
    let reduce_row = |d: &mut IntMatrix, i: usize| {
        for j in 0..m {
            let v = &mut d[(i, j)];
            *v = v.mod_floor(&modulus);
        }
    };
    let reduce_col = |d: &mut IntMatrix, j: usize| {
        for i in 0..m {
            let v = &mut d[(i, j)];
            *v = v.mod_floor(&modulus);
        }
    };
    let mut factors = Vec::with_capacity(m);
    for t in 0..m {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..m {
                let v = &d[(i, j)];
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v < &d[(bi, bj)]) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            factors.extend(std::iter::repeat_n(modulus.clone(), m - t));
            break;
        };
        d.swap_rows(t, pi);
        d.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                while !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    d.row_axpy(i, t, &q);
                    reduce_row(&mut d, i);
                    if !d[(i, t)].is_zero() {
                        d.swap_rows(i, t);
                        clean = false;
                    }
                }
            }
            for j in t + 1..m {
                while !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.col_axpy(j, t, &q);
                    reduce_col(&mut d, j);
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(j, t);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..m).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    d.row_axpy(t, i, &-BigInt::one());
                    reduce_row(&mut d, t);
                }
                None => break,
            }
        }
        factors.push(d[(t, t)].gcd(&modulus));
    }
    factors
}
