use super::axis::{overlap_with_frame, AxisFrame, Overlap};
use super::{Classification, GTree};
use crate::error::Result;

/// Closed convex subsets of a tree that arise as characteristic sets and
/// their finite intersections.
#[derive(Debug, Clone)]
pub enum ConvexSet<T: GTree> {
    Whole,
    Empty,
    Point(T::V),
    Segment(T::V, T::V),
    Axis(AxisFrame<T>),
}

impl<T: GTree> ConvexSet<T> {
    /// Char(g): the whole tree for the identity, the fixed vertex for an
    /// elliptic element, the axis otherwise.
    pub fn char_set(t: &T, g: &T::G) -> Result<Self> {
        if t.is_identity(g) {
            return Ok(ConvexSet::Whole);
        }
        Ok(match t.classify(g)? {
            Classification::Elliptic { fixed } => ConvexSet::Point(fixed),
            Classification::Loxodromic { .. } => ConvexSet::Axis(AxisFrame::new(t, g)?),
        })
    }

    pub fn segment(a: T::V, b: T::V) -> Self {
        if a == b {
            ConvexSet::Point(a)
        } else {
            ConvexSet::Segment(a, b)
        }
    }

    pub fn contains(&self, t: &T, v: &T::V) -> bool {
        match self {
            ConvexSet::Whole => true,
            ConvexSet::Empty => false,
            ConvexSet::Point(p) => p == v,
            ConvexSet::Segment(a, b) => t.distance(a, v) + t.distance(v, b) == t.distance(a, b),
            ConvexSet::Axis(f) => f.contains(t, v),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ConvexSet::Empty)
    }

    /// Equality as vertex sets, for the finite cases.
    pub fn same_finite_set(&self, other: &Self) -> bool {
        match (self, other) {
            (ConvexSet::Empty, ConvexSet::Empty) => true,
            (ConvexSet::Point(a), ConvexSet::Point(b)) => a == b,
            (ConvexSet::Segment(a, b), ConvexSet::Segment(c, d)) => {
                (a == c && b == d) || (a == d && b == c)
            }
            _ => false,
        }
    }

    fn clip_segment(t: &T, a: &T::V, b: &T::V, keep: impl Fn(&T::V) -> bool) -> Self {
        let path = t.geodesic(a, b);
        let mut first = None;
        let mut last = None;
        for (i, x) in path.iter().enumerate() {
            if keep(x) {
                if first.is_none() {
                    first = Some(i);
                }
                last = Some(i);
            }
        }
        match (first, last) {
            (Some(i), Some(j)) => Self::segment(path[i].clone(), path[j].clone()),
            _ => ConvexSet::Empty,
        }
    }

    pub fn intersect(&self, t: &T, other: &Self) -> Result<Self> {
        use ConvexSet::*;
        Ok(match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (Whole, x) | (x, Whole) => x.clone(),
            (Point(p), x) | (x, Point(p)) => {
                if x.contains(t, p) {
                    Point(p.clone())
                } else {
                    Empty
                }
            }
            (Segment(a, b), Segment(..)) => Self::clip_segment(t, a, b, |x| other.contains(t, x)),
            (Segment(a, b), Axis(f)) | (Axis(f), Segment(a, b)) => {
                Self::clip_segment(t, a, b, |x| f.contains(t, x))
            }
            (Axis(f), Axis(g)) => match overlap_with_frame(t, f, &g.element)? {
                Overlap::SameAxis => Axis(f.clone()),
                Overlap::Disjoint { .. } => Empty,
                Overlap::Overlap(s) => Self::segment(s.start, s.end),
            },
        })
    }
}
