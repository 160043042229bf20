//! Exact rational matrices, minors, total nonnegativity, and evaluation of
//! the quadratic expression attached to a pair of families.

use std::collections::BTreeSet;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Context, Family};
use crate::rational::{rat_one, rat_zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn from_entries(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![rat_zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 1-based entry accessor.
    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.data[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: Rational) {
        self.data[(i - 1) * self.cols + (j - 1)] = v;
    }

    /// Determinant of the square submatrix on rows `i_set` and columns
    /// `j_set`; the empty minor is 1 by convention.
    pub fn minor(&self, i_set: &BTreeSet<usize>, j_set: &BTreeSet<usize>) -> Result<Rational> {
        if i_set.len() != j_set.len() {
            return Err(Error::SizeMismatch {
                rows: i_set.len(),
                cols: j_set.len(),
            });
        }
        for &i in i_set {
            if i == 0 || i > self.rows {
                return Err(Error::Range { what: "rows", index: i, limit: self.rows });
            }
        }
        for &j in j_set {
            if j == 0 || j > self.cols {
                return Err(Error::Range { what: "columns", index: j, limit: self.cols });
            }
        }
        let k = i_set.len();
        if k == 0 {
            return Ok(rat_one());
        }
        let mut sub: Vec<Rational> = Vec::with_capacity(k * k);
        for &i in i_set {
            for &j in j_set {
                sub.push(self.entry(i, j).clone());
            }
        }
        Ok(determinant(&mut sub, k))
    }

    /// True iff every minor over all index pairs is nonnegative. Exhaustive
    /// by definition; intended for desk-scale dimensions.
    pub fn is_tnn(&self) -> bool {
        let max_k = self.rows.min(self.cols);
        for k in 1..=max_k {
            for i_set in combinations(self.rows, k) {
                for j_set in combinations(self.cols, k) {
                    let m = self
                        .minor(&i_set, &j_set)
                        .expect("index sets are in range by construction");
                    if m.is_negative() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Gaussian elimination with exact rational pivoting.
fn determinant(a: &mut [Rational], k: usize) -> Rational {
    let mut det = rat_one();
    for col in 0..k {
        let pivot_row = match (col..k).find(|&r| !a[r * k + col].is_zero()) {
            Some(r) => r,
            None => return rat_zero(),
        };
        if pivot_row != col {
            for j in 0..k {
                a.swap(pivot_row * k + j, col * k + j);
            }
            det = -det;
        }
        let pivot = a[col * k + col].clone();
        det *= pivot.clone();
        for r in (col + 1)..k {
            if a[r * k + col].is_zero() {
                continue;
            }
            let factor = &a[r * k + col] / &pivot;
            for j in col..k {
                let delta = &factor * &a[col * k + j];
                a[r * k + j] -= delta;
            }
        }
    }
    det
}

/// All k-element subsets of {1, …, n} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if current.len() == k {
            out.push(current.iter().copied().collect());
            return;
        }
        for v in start..=n {
            if n - v + 1 < k - current.len() {
                break;
            }
            current.push(v);
            rec(v + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(1, n, k, &mut current, &mut out);
    out
}

/// Exact value of the quadratic expression: the positive family's sum of
/// minor products minus the negative family's, multiplicities respected.
pub fn evaluate_inequality(q: &Matrix, ctx: &Context, a: &Family, b: &Family) -> Result<Rational> {
    if q.rows() != ctx.n_rows() || q.cols() != ctx.n_cols() {
        return Err(Error::Dimension {
            rows: q.rows(),
            cols: q.cols(),
            expected_rows: ctx.n_rows(),
            expected_cols: ctx.n_cols(),
        });
    }
    let family_sum = |fam: &Family| -> Result<Rational> {
        let mut acc = rat_zero();
        for (pair, mult) in fam.entries() {
            let first = q.minor(&pair.minor_rows(ctx), &pair.minor_cols(ctx))?;
            let second = q.minor(&pair.co_minor_rows(ctx), &pair.co_minor_cols(ctx))?;
            acc += first * second * crate::rational::rat(*mult as i64);
        }
        Ok(acc)
    };
    Ok(family_sum(a)? - family_sum(b)?)
}
