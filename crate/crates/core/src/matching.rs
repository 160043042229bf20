//! Noncrossing perfect matchings on the circularly arranged free indices,
//! feasibility with respect to a proper pair, and the exchange operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Context, Ground, ProperPair, Side};

/// An unordered pair of distinct ground elements, stored normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Couple {
    a: Ground,
    b: Ground,
}

impl Couple {
    pub fn new(x: Ground, y: Ground) -> Self {
        assert_ne!(x, y, "a couple joins two distinct elements");
        if x <= y {
            Couple { a: x, b: y }
        } else {
            Couple { a: y, b: x }
        }
    }

    pub fn first(&self) -> Ground {
        self.a
    }

    pub fn second(&self) -> Ground {
        self.b
    }

    pub fn contains(&self, g: Ground) -> bool {
        self.a == g || self.b == g
    }

    pub fn same_side(&self) -> bool {
        self.a.side == self.b.side
    }
}

impl fmt::Display for Couple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// A perfect matching on `Y ⊔ Y'`, stored as a sorted couple list.
///
/// `Ord` on matchings (lexicographic on the sorted couples) is the
/// deterministic order used for tie-breaking and table output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    couples: Vec<Couple>,
}

impl Matching {
    pub fn new(mut couples: Vec<Couple>) -> Self {
        couples.sort();
        couples.dedup();
        Matching { couples }
    }

    pub fn couples(&self) -> &[Couple] {
        &self.couples
    }

    pub fn len(&self) -> usize {
        self.couples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couples.is_empty()
    }

    pub fn contains(&self, c: &Couple) -> bool {
        self.couples.binary_search(c).is_ok()
    }

    /// All matched elements.
    pub fn ground_set(&self) -> BTreeSet<Ground> {
        self.couples
            .iter()
            .flat_map(|c| [c.first(), c.second()])
            .collect()
    }

    /// True iff the couples partition `Y ⊔ Y'` of the context exactly.
    pub fn is_perfect_on(&self, ctx: &Context) -> bool {
        let mut expected: BTreeSet<Ground> =
            ctx.free_rows().iter().map(|&i| Ground::row(i)).collect();
        expected.extend(ctx.free_cols().iter().map(|&j| Ground::col(j)));
        let mut seen = BTreeSet::new();
        for c in &self.couples {
            if !seen.insert(c.first()) || !seen.insert(c.second()) {
                return false;
            }
        }
        seen == expected
    }

    /// Renders couples sorted by their first endpoint in circular order,
    /// rows before primed columns inside each couple.
    pub fn render(&self, ctx: &Context) -> String {
        let pos = position_map(&ctx.circular_order());
        let mut sorted = self.couples.clone();
        sorted.sort_by_key(|c| {
            let pa = pos.get(&c.first()).copied().unwrap_or(usize::MAX);
            let pb = pos.get(&c.second()).copied().unwrap_or(usize::MAX);
            pa.min(pb)
        });
        let parts: Vec<String> = sorted.iter().map(|c| c.to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.couples.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn position_map(order: &[Ground]) -> BTreeMap<Ground, usize> {
    order.iter().enumerate().map(|(i, &g)| (g, i)).collect()
}

/// Chord crossing on the circle: `{a,b}` and `{c,d}` cross iff exactly one of
/// `c`, `d` lies strictly inside the arc between `a` and `b`.
pub fn couples_cross(order: &[Ground], x: &Couple, y: &Couple) -> bool {
    let pos = position_map(order);
    let (pa, pb) = (pos[&x.first()], pos[&x.second()]);
    let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
    let inside = |p: usize| lo < p && p < hi;
    inside(pos[&y.first()]) != inside(pos[&y.second()])
}

/// True iff no two chords of the matching cross.
pub fn is_noncrossing(ctx: &Context, m: &Matching) -> bool {
    let order = ctx.circular_order();
    let cs = m.couples();
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            if couples_cross(&order, &cs[i], &cs[j]) {
                return false;
            }
        }
    }
    true
}

/// The color/half rule: differently colored endpoints must share a half,
/// equally colored endpoints must join the two halves.
pub fn couple_color_rule(pair: &ProperPair, c: &Couple) -> bool {
    let same_color = pair.is_white(c.first()) == pair.is_white(c.second());
    same_color != c.same_side()
}

/// Full feasibility test for a matching against a proper pair.
pub fn is_feasible_for(ctx: &Context, pair: &ProperPair, m: &Matching) -> bool {
    m.is_perfect_on(ctx)
        && m.couples().iter().all(|c| couple_color_rule(pair, c))
        && is_noncrossing(ctx, m)
}

/// Enumerates exactly the feasible matchings of a proper pair:
/// noncrossing perfect matchings whose couples obey the color/half rule.
///
/// The circular sequence is cut at the first free row and matched
/// recursively: the first point pairs with a partner at odd offset, which
/// splits what remains into two independent arcs. Output is sorted in the
/// deterministic matching order.
pub fn feasible_matchings(ctx: &Context, pair: &ProperPair) -> Result<Vec<Matching>> {
    if !ctx.is_proper(pair.white_rows(), pair.white_cols())? {
        return Err(Error::NotProper {
            got: pair.white_rows().len() as i64 - pair.white_cols().len() as i64,
            required: ctx.required_size_difference(),
        });
    }
    let order = ctx.circular_order();
    assert!(order.len() % 2 == 0, "balance keeps |Y| + |Y'| even");
    let mut out: Vec<Matching> = segment_matchings(&order, pair)
        .into_iter()
        .map(Matching::new)
        .collect();
    out.sort();
    Ok(out)
}

/// Constrained noncrossing matchings of a circular-order segment. The first
/// point pairs with a partner at odd offset, splitting the rest into an
/// inner and an outer arc that are matched independently; this is exactly
/// the noncrossing condition.
fn segment_matchings(points: &[Ground], pair: &ProperPair) -> Vec<Vec<Couple>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let first = points[0];
    let mut out = Vec::new();
    for offset in (1..points.len()).step_by(2) {
        let couple = Couple::new(first, points[offset]);
        if !couple_color_rule(pair, &couple) {
            continue;
        }
        let inner = segment_matchings(&points[1..offset], pair);
        if inner.is_empty() {
            continue;
        }
        let outer = segment_matchings(&points[offset + 1..], pair);
        for m_in in &inner {
            for m_out in &outer {
                let mut v = Vec::with_capacity(points.len() / 2);
                v.push(couple);
                v.extend_from_slice(m_in);
                v.extend_from_slice(m_out);
                out.push(v);
            }
        }
    }
    out
}

/// The exchange of a proper pair along a subset of a feasible matching:
/// `D = C △ (V(M₀) ∩ Y)`, `D' = C' △ (V(M₀) ∩ Y')`.
pub fn exchange(
    ctx: &Context,
    pair: &ProperPair,
    m: &Matching,
    m0: &[Couple],
) -> Result<ProperPair> {
    for c in m0 {
        if !m.contains(c) {
            return Err(Error::NotSubset { what: "M0 is not contained in M" });
        }
    }
    let mut rows = pair.white_rows().clone();
    let mut cols = pair.white_cols().clone();
    for c in m0 {
        for g in [c.first(), c.second()] {
            match g.side {
                Side::Row => toggle(&mut rows, g.index),
                Side::Col => toggle(&mut cols, g.index),
            }
        }
    }
    ProperPair::new(ctx, rows, cols)
}

fn toggle(set: &mut BTreeSet<usize>, i: usize) {
    if !set.remove(&i) {
        set.insert(i);
    }
}
