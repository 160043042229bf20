//! Ground data: contexts, proper pairs and families.
//!
//! A context fixes matrix dimensions `n x n'` together with disjoint row sets
//! `X` (fixed) and `Y` (free/exchangeable), and column sets `X'`, `Y'`
//! likewise. A proper pair selects subsets `C ⊆ Y`, `C' ⊆ Y'` so that the two
//! minors `Δ(X∪C | X'∪C')` and `Δ(X∪(Y−C) | X'∪(Y'−C'))` are both square.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the matrix an index lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Row,
    Col,
}

/// A row or column index, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ground {
    pub side: Side,
    pub index: usize,
}

impl Ground {
    pub fn row(index: usize) -> Self {
        Ground { side: Side::Row, index }
    }

    pub fn col(index: usize) -> Self {
        Ground { side: Side::Col, index }
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Row => write!(f, "{}", self.index),
            Side::Col => write!(f, "{}'", self.index),
        }
    }
}

/// Parses `"3"` as a row index and `"3'"` as a column index.
pub fn parse_ground(s: &str) -> Result<Ground> {
    let s = s.trim();
    let (body, side) = match s.strip_suffix('\'') {
        Some(b) => (b, Side::Col),
        None => (s, Side::Row),
    };
    let index: usize = body
        .parse()
        .map_err(|_| Error::Parse(format!("bad ground element {s:?}")))?;
    if index == 0 {
        return Err(Error::Parse("ground indices are 1-based".into()));
    }
    Ok(Ground { side, index })
}

/// The tuple (n, n', X, Y, X', Y') all operations are relative to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    n_rows: usize,
    n_cols: usize,
    fixed_rows: BTreeSet<usize>,
    free_rows: BTreeSet<usize>,
    fixed_cols: BTreeSet<usize>,
    free_cols: BTreeSet<usize>,
}

impl Context {
    /// Validates and builds a context.
    ///
    /// Requires `X ∩ Y = ∅`, `X' ∩ Y' = ∅`, nonempty `Y` and `Y'`, all indices
    /// within range, and the cardinality balance `2|X| + |Y| = 2|X'| + |Y'|`
    /// (without it no pair is proper).
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        fixed_rows: BTreeSet<usize>,
        free_rows: BTreeSet<usize>,
        fixed_cols: BTreeSet<usize>,
        free_cols: BTreeSet<usize>,
    ) -> Result<Self> {
        check_range(&fixed_rows, n_rows, "rows")?;
        check_range(&free_rows, n_rows, "rows")?;
        check_range(&fixed_cols, n_cols, "columns")?;
        check_range(&free_cols, n_cols, "columns")?;
        if !fixed_rows.is_disjoint(&free_rows) {
            return Err(Error::Overlap { what: "rows" });
        }
        if !fixed_cols.is_disjoint(&free_cols) {
            return Err(Error::Overlap { what: "columns" });
        }
        if free_rows.is_empty() || free_cols.is_empty() {
            return Err(Error::EmptyY);
        }
        let lhs = 2 * fixed_rows.len() + free_rows.len();
        let rhs = 2 * fixed_cols.len() + free_cols.len();
        if lhs != rhs {
            return Err(Error::Balance { lhs, rhs });
        }
        debug_assert_eq!((free_rows.len() + free_cols.len()) % 2, 0);
        Ok(Context {
            n_rows,
            n_cols,
            fixed_rows,
            free_rows,
            fixed_cols,
            free_cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn fixed_rows(&self) -> &BTreeSet<usize> {
        &self.fixed_rows
    }

    pub fn free_rows(&self) -> &BTreeSet<usize> {
        &self.free_rows
    }

    pub fn fixed_cols(&self) -> &BTreeSet<usize> {
        &self.fixed_cols
    }

    pub fn free_cols(&self) -> &BTreeSet<usize> {
        &self.free_cols
    }

    /// The difference |C| − |C'| every proper pair must realize.
    pub fn required_size_difference(&self) -> i64 {
        (self.free_rows.len() as i64 - self.free_cols.len() as i64) / 2
    }

    /// The circular arrangement of `Y ⊔ Y'`: free rows left to right along the
    /// lower arc, then free columns right to left along the upper arc.
    pub fn circular_order(&self) -> Vec<Ground> {
        let mut order: Vec<Ground> = self.free_rows.iter().map(|&i| Ground::row(i)).collect();
        order.extend(self.free_cols.iter().rev().map(|&j| Ground::col(j)));
        order
    }

    /// True iff `(C, C')` satisfies the two cardinality equalities of a
    /// proper pair. Errors when the arguments are not subsets of `Y`, `Y'`.
    pub fn is_proper(&self, rows: &BTreeSet<usize>, cols: &BTreeSet<usize>) -> Result<bool> {
        if !rows.is_subset(&self.free_rows) {
            return Err(Error::NotSubset { what: "C is not contained in Y" });
        }
        if !cols.is_subset(&self.free_cols) {
            return Err(Error::NotSubset { what: "C' is not contained in Y'" });
        }
        Ok(rows.len() as i64 - cols.len() as i64 == self.required_size_difference())
    }

    /// All proper pairs, ordered lexicographically by the characteristic
    /// vectors of `C` (over sorted `Y`) and then `C'`.
    pub fn proper_pairs(&self) -> Vec<ProperPair> {
        let mut out = Vec::new();
        for rows in subsets_lex(&self.free_rows) {
            for cols in subsets_lex(&self.free_cols) {
                if rows.len() as i64 - cols.len() as i64 == self.required_size_difference() {
                    out.push(ProperPair {
                        white_rows: rows.clone(),
                        white_cols: cols,
                    });
                }
            }
        }
        out
    }
}

fn check_range(set: &BTreeSet<usize>, limit: usize, what: &'static str) -> Result<()> {
    for &i in set {
        if i == 0 || i > limit {
            return Err(Error::Range { what, index: i, limit });
        }
    }
    Ok(())
}

/// Subsets of `set` in characteristic-vector counting order: the i-th
/// smallest element is bit i, so ∅, {1}, {2}, {1,2}, {3}, … for {1,2,3}.
pub fn subsets_lex(set: &BTreeSet<usize>) -> impl Iterator<Item = BTreeSet<usize>> + '_ {
    let elems: Vec<usize> = set.iter().copied().collect();
    let m = elems.len();
    (0u64..(1u64 << m)).map(move |k| {
        elems
            .iter()
            .enumerate()
            .filter(|(i, _)| (k >> i) & 1 == 1)
            .map(|(_, &e)| e)
            .collect()
    })
}

/// A proper pair `(C, C')`. Elements of `C ∪ C'` are the "white" points of
/// the matching picture; the complements are "black".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProperPair {
    white_rows: BTreeSet<usize>,
    white_cols: BTreeSet<usize>,
}

impl ProperPair {
    pub fn new(ctx: &Context, rows: BTreeSet<usize>, cols: BTreeSet<usize>) -> Result<Self> {
        if !ctx.is_proper(&rows, &cols)? {
            return Err(Error::NotProper {
                got: rows.len() as i64 - cols.len() as i64,
                required: ctx.required_size_difference(),
            });
        }
        Ok(ProperPair {
            white_rows: rows,
            white_cols: cols,
        })
    }

    pub fn white_rows(&self) -> &BTreeSet<usize> {
        &self.white_rows
    }

    pub fn white_cols(&self) -> &BTreeSet<usize> {
        &self.white_cols
    }

    /// `Y − C`.
    pub fn black_rows(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.free_rows().difference(&self.white_rows).copied().collect()
    }

    /// `Y' − C'`.
    pub fn black_cols(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.free_cols().difference(&self.white_cols).copied().collect()
    }

    pub fn is_white(&self, g: Ground) -> bool {
        match g.side {
            Side::Row => self.white_rows.contains(&g.index),
            Side::Col => self.white_cols.contains(&g.index),
        }
    }

    /// Row set of the first minor, `X ∪ C`.
    pub fn minor_rows(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.fixed_rows().union(&self.white_rows).copied().collect()
    }

    /// Column set of the first minor, `X' ∪ C'`.
    pub fn minor_cols(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.fixed_cols().union(&self.white_cols).copied().collect()
    }

    /// Row set of the complementary minor, `X ∪ (Y−C)`.
    pub fn co_minor_rows(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.fixed_rows().union(&self.black_rows(ctx)).copied().collect()
    }

    /// Column set of the complementary minor, `X' ∪ (Y'−C')`.
    pub fn co_minor_cols(&self, ctx: &Context) -> BTreeSet<usize> {
        ctx.fixed_cols().union(&self.black_cols(ctx)).copied().collect()
    }
}

impl fmt::Display for ProperPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let rows: Vec<String> = self.white_rows.iter().map(|i| i.to_string()).collect();
        let cols: Vec<String> = self.white_cols.iter().map(|j| format!("{j}'")).collect();
        write!(f, "{{{}}}, {{{}}})", rows.join(","), cols.join(","))
    }
}

/// A multiset of proper pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Family {
    entries: Vec<(ProperPair, u64)>,
}

impl Family {
    pub fn new(entries: Vec<(ProperPair, u64)>) -> Self {
        Family { entries }
    }

    pub fn push(&mut self, pair: ProperPair, multiplicity: u64) {
        self.entries.push((pair, multiplicity));
    }

    pub fn entries(&self) -> &[(ProperPair, u64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    /// The five-point worked example: n = n' = 5, X = X' = ∅, Y = Y' = [5].
    pub fn five_point_context() -> Context {
        Context::new(5, 5, set(&[]), set(&[1, 2, 3, 4, 5]), set(&[]), set(&[1, 2, 3, 4, 5]))
            .unwrap()
    }

    #[test]
    fn builds_valid_contexts() {
        five_point_context();
        // 2*0 + 3 = 2*1 + 1
        Context::new(3, 2, set(&[]), set(&[1, 2, 3]), set(&[1]), set(&[2])).unwrap();
    }

    #[test]
    fn rejects_unbalanced_context() {
        let err = Context::new(2, 2, set(&[]), set(&[1, 2]), set(&[]), set(&[1])).unwrap_err();
        assert!(matches!(err, Error::Balance { lhs: 2, rhs: 1 }));
    }

    #[test]
    fn rejects_overlap_range_and_empty() {
        assert!(matches!(
            Context::new(3, 3, set(&[1]), set(&[1, 2]), set(&[]), set(&[1])).unwrap_err(),
            Error::Overlap { .. }
        ));
        assert!(matches!(
            Context::new(2, 2, set(&[]), set(&[1, 5]), set(&[]), set(&[1, 2])).unwrap_err(),
            Error::Range { .. }
        ));
        assert!(matches!(
            Context::new(2, 2, set(&[1, 2]), set(&[]), set(&[]), set(&[1, 2])).unwrap_err(),
            Error::EmptyY
        ));
    }

    #[test]
    fn properness_matches_size_rule() {
        let ctx = five_point_context();
        assert!(ctx.is_proper(&set(&[1, 2]), &set(&[4, 5])).unwrap());
        assert!(!ctx.is_proper(&set(&[]), &set(&[1])).unwrap());

        // X = ∅, X' = {1'}, Y = {1,2,3}, Y' = {2'}: C = {1,3}, C' = {2'}.
        let ctx2 = Context::new(3, 2, set(&[]), set(&[1, 2, 3]), set(&[1]), set(&[2])).unwrap();
        assert!(ctx2.is_proper(&set(&[1, 3]), &set(&[2])).unwrap());
        assert!(matches!(
            ctx2.is_proper(&set(&[4]), &set(&[2])),
            Err(Error::NotSubset { .. })
        ));
    }

    #[test]
    fn proper_pairs_small_enumeration() {
        let ctx = Context::new(2, 2, set(&[]), set(&[1, 2]), set(&[]), set(&[1, 2])).unwrap();
        let pairs = ctx.proper_pairs();
        let as_sets: Vec<(Vec<usize>, Vec<usize>)> = pairs
            .iter()
            .map(|p| {
                (
                    p.white_rows().iter().copied().collect(),
                    p.white_cols().iter().copied().collect(),
                )
            })
            .collect();
        assert_eq!(
            as_sets,
            vec![
                (vec![], vec![]),
                (vec![1], vec![1]),
                (vec![1], vec![2]),
                (vec![2], vec![1]),
                (vec![2], vec![2]),
                (vec![1, 2], vec![1, 2]),
            ]
        );
    }

    #[test]
    fn proper_pairs_single_point() {
        let ctx = Context::new(1, 1, set(&[]), set(&[1]), set(&[]), set(&[1])).unwrap();
        assert_eq!(ctx.proper_pairs().len(), 2);
    }

    #[test]
    fn proper_pair_count_matches_vandermonde() {
        // Sum over k of C(5,k)^2 = C(10,5) = 252.
        let ctx = five_point_context();
        assert_eq!(ctx.proper_pairs().len(), 252);
    }

    #[test]
    fn every_enumerated_pair_is_proper() {
        let ctx = Context::new(4, 3, set(&[]), set(&[1, 2, 3, 4]), set(&[1]), set(&[2, 3])).unwrap();
        for p in ctx.proper_pairs() {
            assert!(ctx.is_proper(p.white_rows(), p.white_cols()).unwrap());
        }
    }
}
