//! The decision procedure: count feasible matchings over families and
//! compare. A pair of families generates a universal inequality iff every
//! matching occurring for the negative family occurs at least as often for
//! the positive one.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::matching::{feasible_matchings, Matching};
use crate::model::{Context, Family, ProperPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Universal,
    NotUniversal,
}

/// Outcome of the universality check, with the full count table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Present iff `NotUniversal`: the matching with the most negative
    /// deficit `count_a − count_b`, ties broken by matching order.
    pub witness: Option<Matching>,
    /// For every matching occurring in either family: (count in A, count in B).
    pub counts: BTreeMap<Matching, (u64, u64)>,
}

/// Counts, multiplicities included, how often each matching occurs among
/// the feasible-matching sets of a family's pairs.
pub fn matching_multiset(ctx: &Context, family: &Family) -> Result<BTreeMap<Matching, u64>> {
    let mut counts: BTreeMap<Matching, u64> = BTreeMap::new();
    for (pair, mult) in family.entries() {
        for m in feasible_matchings(ctx, pair)? {
            *counts.entry(m).or_insert(0) += mult;
        }
    }
    Ok(counts)
}

/// Decides whether `(A, B)` generates a universal quadratic inequality.
pub fn check_universal(ctx: &Context, a: &Family, b: &Family) -> Result<Verdict> {
    let count_a = matching_multiset(ctx, a)?;
    let count_b = matching_multiset(ctx, b)?;

    let mut counts: BTreeMap<Matching, (u64, u64)> = BTreeMap::new();
    for (m, &ca) in &count_a {
        counts.entry(m.clone()).or_insert((0, 0)).0 = ca;
    }
    for (m, &cb) in &count_b {
        counts.entry(m.clone()).or_insert((0, 0)).1 = cb;
    }

    let mut witness: Option<(i64, &Matching)> = None;
    for (m, &(ca, cb)) in &counts {
        if cb > 0 && ca < cb {
            let deficit = ca as i64 - cb as i64;
            let better = match witness {
                None => true,
                Some((best, _)) => deficit < best,
            };
            if better {
                witness = Some((deficit, m));
            }
        }
    }

    Ok(match witness {
        None => Verdict {
            status: Status::Universal,
            witness: None,
            counts,
        },
        Some((_, m)) => Verdict {
            status: Status::NotUniversal,
            witness: Some(m.clone()),
            counts: counts.clone(),
        },
    })
}

/// The order-preserving relabeling applied by [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pub row_map: BTreeMap<usize, usize>,
    pub col_map: BTreeMap<usize, usize>,
    /// How many fixed row/column indices were dropped from each side.
    pub dropped_fixed: usize,
}

/// Rewrites the instance so that `Y = [m]`, `Y' = [m']` and
/// `min(|X|, |X'|) = 0`, preserving the verdict.
///
/// Only the cardinality of the fixed sets enters the matching criterion, so
/// `min(|X|, |X'|)` paired elements are dropped from both sides and the
/// survivors are re-placed above the free indices.
pub fn canonicalize(
    ctx: &Context,
    a: &Family,
    b: &Family,
) -> Result<(Context, Family, Family, Relabeling)> {
    let m = ctx.free_rows().len();
    let m_prime = ctx.free_cols().len();
    let drop = ctx.fixed_rows().len().min(ctx.fixed_cols().len());
    let kept_rows = ctx.fixed_rows().len() - drop;
    let kept_cols = ctx.fixed_cols().len() - drop;

    let row_map: BTreeMap<usize, usize> = ctx
        .free_rows()
        .iter()
        .enumerate()
        .map(|(i, &y)| (y, i + 1))
        .collect();
    let col_map: BTreeMap<usize, usize> = ctx
        .free_cols()
        .iter()
        .enumerate()
        .map(|(j, &y)| (y, j + 1))
        .collect();

    let new_fixed_rows: BTreeSet<usize> = (m + 1..=m + kept_rows).collect();
    let new_fixed_cols: BTreeSet<usize> = (m_prime + 1..=m_prime + kept_cols).collect();
    let new_ctx = Context::new(
        m + kept_rows,
        m_prime + kept_cols,
        new_fixed_rows,
        (1..=m).collect(),
        new_fixed_cols,
        (1..=m_prime).collect(),
    )?;

    let relabel_family = |fam: &Family| -> Result<Family> {
        let mut out = Family::default();
        for (pair, mult) in fam.entries() {
            let rows: BTreeSet<usize> = pair.white_rows().iter().map(|y| row_map[y]).collect();
            let cols: BTreeSet<usize> = pair.white_cols().iter().map(|y| col_map[y]).collect();
            out.push(ProperPair::new(&new_ctx, rows, cols)?, *mult);
        }
        Ok(out)
    };

    let new_a = relabel_family(a)?;
    let new_b = relabel_family(b)?;
    Ok((
        new_ctx,
        new_a,
        new_b,
        Relabeling {
            row_map,
            col_map,
            dropped_fixed: drop,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{Couple, Matching};
    use crate::model::Ground;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn five_point_context() -> Context {
        Context::new(5, 5, set(&[]), set(&[1, 2, 3, 4, 5]), set(&[]), set(&[1, 2, 3, 4, 5]))
            .unwrap()
    }

    fn pair(ctx: &Context, rows: &[usize], cols: &[usize]) -> ProperPair {
        ProperPair::new(ctx, set(rows), set(cols)).unwrap()
    }

    fn five_point_families(ctx: &Context) -> (Family, Family) {
        let a = Family::new(vec![
            (pair(ctx, &[1, 2], &[4, 5]), 1),
            (pair(ctx, &[1, 2], &[3, 4]), 1),
        ]);
        let b = Family::new(vec![(pair(ctx, &[1, 2], &[3, 5]), 1)]);
        (a, b)
    }

    fn m3() -> Matching {
        Matching::new(vec![
            Couple::new(Ground::row(1), Ground::row(4)),
            Couple::new(Ground::row(2), Ground::row(3)),
            Couple::new(Ground::col(1), Ground::col(4)),
            Couple::new(Ground::col(2), Ground::col(3)),
            Couple::new(Ground::row(5), Ground::col(5)),
        ])
    }

    #[test]
    fn five_point_count_table() {
        let ctx = five_point_context();
        let (a, b) = five_point_families(&ctx);
        let ca = matching_multiset(&ctx, &a).unwrap();
        let cb = matching_multiset(&ctx, &b).unwrap();
        assert_eq!(ca.len(), 3);
        assert_eq!(cb.len(), 2);
        assert!(ca.values().all(|&c| c == 1));
        assert!(cb.values().all(|&c| c == 1));
        assert!(ca.contains_key(&m3()));
        assert!(!cb.contains_key(&m3()));
    }

    #[test]
    fn multiplicities_double_counts() {
        let ctx = five_point_context();
        let fam = Family::new(vec![(pair(&ctx, &[1, 2], &[4, 5]), 2)]);
        let counts = matching_multiset(&ctx, &fam).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(*counts.values().next().unwrap(), 2);
    }

    #[test]
    fn five_point_is_universal() {
        let ctx = five_point_context();
        let (a, b) = five_point_families(&ctx);
        let verdict = check_universal(&ctx, &a, &b).unwrap();
        assert_eq!(verdict.status, Status::Universal);
        assert!(verdict.witness.is_none());
    }

    #[test]
    fn swapped_families_fail_with_witness() {
        let ctx = five_point_context();
        let (a, b) = five_point_families(&ctx);
        let verdict = check_universal(&ctx, &b, &a).unwrap();
        assert_eq!(verdict.status, Status::NotUniversal);
        assert_eq!(verdict.witness, Some(m3()));
        assert_eq!(verdict.counts[&m3()], (0, 1));
    }

    #[test]
    fn identical_families_are_universal() {
        let ctx = five_point_context();
        let (a, _) = five_point_families(&ctx);
        let verdict = check_universal(&ctx, &a, &a.clone()).unwrap();
        assert_eq!(verdict.status, Status::Universal);
    }

    #[test]
    fn adding_to_a_preserves_universal() {
        let ctx = five_point_context();
        let (mut a, b) = five_point_families(&ctx);
        a.push(pair(&ctx, &[4, 5], &[1, 2]), 3);
        let verdict = check_universal(&ctx, &a, &b).unwrap();
        assert_eq!(verdict.status, Status::Universal);
    }

    #[test]
    fn canonicalize_relabels_sparse_indices() {
        let ctx = Context::new(9, 7, set(&[]), set(&[2, 5, 9]), set(&[]), set(&[3, 4, 7])).unwrap();
        let a = Family::new(vec![(pair(&ctx, &[2], &[4]), 1)]);
        let b = Family::new(vec![(pair(&ctx, &[5], &[3]), 1)]);
        let (cctx, ca, cb, relab) = canonicalize(&ctx, &a, &b).unwrap();
        assert_eq!(cctx.free_rows(), &set(&[1, 2, 3]));
        assert_eq!(cctx.free_cols(), &set(&[1, 2, 3]));
        assert_eq!(relab.row_map[&2], 1);
        assert_eq!(relab.row_map[&9], 3);
        let before = check_universal(&ctx, &a, &b).unwrap().status;
        let after = check_universal(&cctx, &ca, &cb).unwrap().status;
        assert_eq!(before, after);
    }

    #[test]
    fn canonicalize_drops_paired_fixed_indices() {
        let ctx = Context::new(3, 3, set(&[1]), set(&[2, 3]), set(&[2]), set(&[1, 3])).unwrap();
        let a = Family::new(vec![(pair(&ctx, &[2], &[1]), 1)]);
        let b = Family::new(vec![(pair(&ctx, &[3], &[3]), 1)]);
        let (cctx, ca, cb, relab) = canonicalize(&ctx, &a, &b).unwrap();
        assert_eq!(relab.dropped_fixed, 1);
        assert!(cctx.fixed_rows().is_empty());
        assert!(cctx.fixed_cols().is_empty());
        assert_eq!(
            check_universal(&ctx, &a, &b).unwrap().status,
            check_universal(&cctx, &ca, &cb).unwrap().status
        );
    }

    #[test]
    fn canonicalize_fixes_already_canonical_context() {
        let ctx = five_point_context();
        let (a, b) = five_point_families(&ctx);
        let (cctx, ca, cb, _) = canonicalize(&ctx, &a, &b).unwrap();
        assert_eq!(cctx, ctx);
        assert_eq!(ca, a);
        assert_eq!(cb, b);
    }
}
