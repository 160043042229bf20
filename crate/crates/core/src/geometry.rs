//! Exact predicates on rational points and segments. No floating point.

use num::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }
}

/// Sign of the cross product (b−a) × (c−a): positive for a left turn,
/// negative for a right turn, zero when collinear.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i32 {
    let v = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// True iff `p` lies on the closed segment `[a, b]` (the three assumed or
/// tested collinear inside).
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let in_range = |lo: &Rational, hi: &Rational, v: &Rational| {
        if lo <= hi {
            lo <= v && v <= hi
        } else {
            hi <= v && v <= lo
        }
    };
    in_range(&a.x, &b.x, &p.x) && in_range(&a.y, &b.y, &p.y)
}

/// How two closed segments intersect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentMeet {
    Disjoint,
    /// They meet in exactly one point which is an endpoint of both.
    SharedEndpoint,
    /// Any other nonempty intersection: a proper crossing, a T-junction,
    /// or a collinear overlap.
    Improper,
}

pub fn segments_meet(a: &Point, b: &Point, c: &Point, d: &Point) -> SegmentMeet {
    let shares = |p: &Point| p == c || p == d;
    let shared_count = usize::from(shares(a)) + usize::from(shares(b));

    if shared_count == 2 || (a == b) || (c == d) {
        // Degenerate or doubled segment.
        return SegmentMeet::Improper;
    }

    if shared_count == 1 {
        // One common endpoint; any further contact means overlap.
        let (joint, free_ab) = if shares(a) { (a, b) } else { (b, a) };
        let free_cd = if joint == c { d } else { c };
        if orient(joint, free_ab, free_cd) == 0 {
            // Collinear: overlapping iff the free ends extend the same way.
            let dot = (&free_ab.x - &joint.x) * (&free_cd.x - &joint.x)
                + (&free_ab.y - &joint.y) * (&free_cd.y - &joint.y);
            if dot.is_positive() {
                return SegmentMeet::Improper;
            }
        }
        return SegmentMeet::SharedEndpoint;
    }

    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return SegmentMeet::Improper;
    }
    if (d1 == 0 && on_segment(c, d, a))
        || (d2 == 0 && on_segment(c, d, b))
        || (d3 == 0 && on_segment(a, b, c))
        || (d4 == 0 && on_segment(a, b, d))
    {
        return SegmentMeet::Improper;
    }
    SegmentMeet::Disjoint
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(x: i64, y: i64) -> Point {
        Point::new(rat(x), rat(y))
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
        assert_eq!(orient(&p(0, 0), &p(1, 1), &p(2, 2)), 0);
    }

    #[test]
    fn proper_crossing_is_improper() {
        assert_eq!(
            segments_meet(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0)),
            SegmentMeet::Improper
        );
    }

    #[test]
    fn shared_endpoint_is_fine() {
        assert_eq!(
            segments_meet(&p(0, 0), &p(1, 1), &p(1, 1), &p(2, 0)),
            SegmentMeet::SharedEndpoint
        );
    }

    #[test]
    fn collinear_overlap_detected() {
        assert_eq!(
            segments_meet(&p(0, 0), &p(2, 0), &p(1, 0), &p(3, 0)),
            SegmentMeet::Improper
        );
        // Shared endpoint but extending the same way.
        assert_eq!(
            segments_meet(&p(0, 0), &p(2, 0), &p(0, 0), &p(1, 0)),
            SegmentMeet::Improper
        );
        // Shared endpoint, opposite directions: touching only.
        assert_eq!(
            segments_meet(&p(0, 0), &p(2, 0), &p(0, 0), &p(-1, 0)),
            SegmentMeet::SharedEndpoint
        );
    }

    #[test]
    fn t_junction_detected() {
        assert_eq!(
            segments_meet(&p(0, 0), &p(2, 0), &p(1, 0), &p(1, 2)),
            SegmentMeet::Improper
        );
    }

    #[test]
    fn disjoint_segments() {
        assert_eq!(
            segments_meet(&p(0, 0), &p(1, 0), &p(0, 1), &p(1, 1)),
            SegmentMeet::Disjoint
        );
    }
}
