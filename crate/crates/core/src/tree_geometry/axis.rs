use super::{Classification, GTree};
use crate::error::{Error, Result};

/// Parametrization p ↦ x_p of the axis of a loxodromic element, with x_0 the
/// base vertex and x_{p+L} = g·x_p.
#[derive(Debug, Clone)]
pub struct AxisFrame<T: GTree> {
    pub element: T::G,
    pub translation_length: usize,
    fund: Vec<T::V>,
}

impl<T: GTree> AxisFrame<T> {
    pub fn new(t: &T, g: &T::G) -> Result<Self> {
        match t.classify(g)? {
            Classification::Loxodromic {
                translation_length,
                base,
            } => {
                let gx = t.act(g, &base);
                let fund = t.geodesic(&base, &gx);
                debug_assert_eq!(fund.len(), translation_length + 1);
                Ok(AxisFrame {
                    element: g.clone(),
                    translation_length,
                    fund,
                })
            }
            Classification::Elliptic { .. } => Err(Error::Elliptic),
        }
    }

    pub fn base(&self) -> &T::V {
        &self.fund[0]
    }

    pub fn vertex_at(&self, t: &T, p: i64) -> T::V {
        let l = self.translation_length as i64;
        let (q, r) = (p.div_euclid(l), p.rem_euclid(l) as usize);
        if q == 0 {
            self.fund[r].clone()
        } else {
            t.act(&t.pow(&self.element, q), &self.fund[r])
        }
    }

    pub fn contains(&self, t: &T, v: &T::V) -> bool {
        t.distance(v, &t.act(&self.element, v)) == self.translation_length
    }

    /// Position of a vertex known to lie on the axis.
    pub fn position(&self, t: &T, v: &T::V) -> i64 {
        let d0 = t.distance(&self.fund[0], v) as i64;
        let d1 = t.distance(&self.fund[self.translation_length], v) as i64;
        if d0 > 0 && d1 == d0 + self.translation_length as i64 {
            -d0
        } else {
            d0
        }
    }

    /// Closest-point projection onto the axis: (foot, distance).
    pub fn project(&self, t: &T, v: &T::V) -> (T::V, usize) {
        let gv = t.act(&self.element, v);
        let d = t.distance(v, &gv);
        let k = (d - self.translation_length) / 2;
        if k == 0 {
            return (v.clone(), 0);
        }
        (t.geodesic(v, &gv).swap_remove(k), k)
    }
}

pub fn on_axis<T: GTree>(t: &T, v: &T::V, g: &T::G) -> Result<bool> {
    Ok(AxisFrame::new(t, g)?.contains(t, v))
}

pub fn project_to_axis<T: GTree>(t: &T, v: &T::V, g: &T::G) -> Result<(T::V, usize)> {
    Ok(AxisFrame::new(t, g)?.project(t, v))
}

/// Segment on the axis of the first element, in positions relative to its base vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisSegment<V> {
    pub start: V,
    pub end: V,
    pub start_offset: i64,
    pub end_offset: i64,
}

impl<V> AxisSegment<V> {
    pub fn length(&self) -> usize {
        (self.end_offset - self.start_offset) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Overlap<V> {
    /// `near` is on the axis of g, `far` on the characteristic set of h.
    Disjoint { near: V, far: V, length: usize },
    Overlap(AxisSegment<V>),
    SameAxis,
}

impl<V> Overlap<V> {
    /// Overlap length; `None` for coinciding axes.
    pub fn length(&self) -> Option<usize> {
        match self {
            Overlap::Disjoint { .. } => Some(0),
            Overlap::Overlap(s) => Some(s.length()),
            Overlap::SameAxis => None,
        }
    }

    pub fn is_disjoint(&self) -> bool {
        matches!(self, Overlap::Disjoint { .. })
    }
}

/// Exact intersection of Axis(g) with Char(h).
pub fn axis_overlap<T: GTree>(t: &T, g: &T::G, h: &T::G) -> Result<Overlap<T::V>> {
    let fg = AxisFrame::new(t, g)?;
    overlap_with_frame(t, &fg, h)
}

pub(crate) fn overlap_with_frame<T: GTree>(
    t: &T,
    fg: &AxisFrame<T>,
    h: &T::G,
) -> Result<Overlap<T::V>> {
    if t.is_identity(h) {
        return Err(Error::Identity);
    }
    match t.classify(h)? {
        Classification::Elliptic { fixed } => {
            if fg.contains(t, &fixed) {
                let p = fg.position(t, &fixed);
                Ok(Overlap::Overlap(AxisSegment {
                    start: fixed.clone(),
                    end: fixed,
                    start_offset: p,
                    end_offset: p,
                }))
            } else {
                let (near, length) = fg.project(t, &fixed);
                Ok(Overlap::Disjoint {
                    near,
                    far: fixed,
                    length,
                })
            }
        }
        Classification::Loxodromic {
            translation_length: lh,
            base,
        } => {
            // Axes of loxodromics coincide iff the elements commute when edge
            // stabilizers are trivial.
            if t.commute(&fg.element, h) {
                return Ok(Overlap::SameAxis);
            }
            let fh = AxisFrame::new(t, h)?;
            let (foot, _) = fg.project(t, &base);
            if !fh.contains(t, &foot) {
                let (far, length) = fh.project(t, &foot);
                return Ok(Overlap::Disjoint {
                    near: foot,
                    far,
                    length,
                });
            }
            let p0 = fg.position(t, &foot);
            let cap = 2 * (fg.translation_length + lh) as i64 + 4;
            let mut hi = p0;
            while fh.contains(t, &fg.vertex_at(t, hi + 1)) {
                hi += 1;
                if hi - p0 > cap {
                    return Err(Error::Precondition(
                        "overlap exceeds the bound for non-commuting elements".into(),
                    ));
                }
            }
            let mut lo = p0;
            while fh.contains(t, &fg.vertex_at(t, lo - 1)) {
                lo -= 1;
                if p0 - lo > cap {
                    return Err(Error::Precondition(
                        "overlap exceeds the bound for non-commuting elements".into(),
                    ));
                }
            }
            Ok(Overlap::Overlap(AxisSegment {
                start: fg.vertex_at(t, lo),
                end: fg.vertex_at(t, hi),
                start_offset: lo,
                end_offset: hi,
            }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainCount {
    Finite(usize),
    Unbounded,
}

/// floor(|Axis(g) ∩ Char(h)| / ‖g‖).
pub fn count_fundamental_domains<T: GTree>(t: &T, g: &T::G, h: &T::G) -> Result<DomainCount> {
    let fg = AxisFrame::new(t, g)?;
    Ok(match overlap_with_frame(t, &fg, h)? {
        Overlap::SameAxis => DomainCount::Unbounded,
        o => DomainCount::Finite(o.length().unwrap_or(0) / fg.translation_length),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{parse_word, GroupPresentation, ReducedWord};
    use crate::tree_geometry::{TreeModel, Vertex, VertexClass};

    fn f2() -> TreeModel {
        TreeModel::cayley(GroupPresentation::free(2)).unwrap()
    }

    fn w(t: &TreeModel, s: &str) -> ReducedWord {
        parse_word(t.presentation(), s).unwrap()
    }

    fn v(t: &TreeModel, s: &str) -> Vertex {
        t.vertex(w(t, s), VertexClass::Base).unwrap()
    }

    #[test]
    fn axis_membership() {
        let t = f2();
        let g = w(&t, "ab");
        assert!(on_axis(&t, &v(&t, "a"), &g).unwrap());
        assert!(!on_axis(&t, &v(&t, "b"), &g).unwrap());
        assert!(on_axis(&t, &v(&t, "abab"), &g).unwrap());
        assert!(on_axis(&t, &v(&t, "BA"), &g).unwrap());
    }

    #[test]
    fn projection_examples() {
        let t = f2();
        let g = w(&t, "ab");
        assert_eq!(project_to_axis(&t, &v(&t, "b"), &g).unwrap(), (v(&t, "1"), 1));
        assert_eq!(project_to_axis(&t, &v(&t, "a"), &g).unwrap(), (v(&t, "a"), 0));
        let (f, d) = project_to_axis(&t, &v(&t, "bbaab"), &g).unwrap();
        assert_eq!((f, d), (v(&t, "1"), 5));
    }

    #[test]
    fn overlap_examples() {
        let t = f2();
        match axis_overlap(&t, &w(&t, "a"), &w(&t, "baB")).unwrap() {
            Overlap::Disjoint { near, far, length } => {
                assert_eq!((near, far, length), (v(&t, "1"), v(&t, "b"), 1));
            }
            o => panic!("{o:?}"),
        }
        let o = axis_overlap(&t, &w(&t, "ab"), &w(&t, "ababa")).unwrap();
        assert_eq!(o.length(), Some(5));
        assert_eq!(
            axis_overlap(&t, &w(&t, "ab"), &w(&t, "ababab")).unwrap(),
            Overlap::SameAxis
        );
        assert_eq!(
            count_fundamental_domains(&t, &w(&t, "ab"), &w(&t, "ababa")).unwrap(),
            DomainCount::Finite(2)
        );
        assert_eq!(
            count_fundamental_domains(&t, &w(&t, "ab"), &w(&t, "ab")).unwrap(),
            DomainCount::Unbounded
        );
        assert!(axis_overlap(&t, &w(&t, "ab"), &ReducedWord::identity()).is_err());
    }

    #[test]
    fn positions_are_consistent() {
        let t = f2();
        let fr = AxisFrame::new(&t, &w(&t, "aBBa")).unwrap();
        for p in -9..9 {
            let x = fr.vertex_at(&t, p);
            assert!(fr.contains(&t, &x));
            assert_eq!(fr.position(&t, &x), p);
        }
    }

    #[test]
    fn elliptic_overlap_in_bass_serre_tree() {
        let q = GroupPresentation::new(0, vec![2, 3]).unwrap();
        let t = TreeModel::bass_serre(q.clone()).unwrap();
        let g = parse_word(&q, "s1 s2").unwrap();
        let s = parse_word(&q, "s1").unwrap();
        assert_eq!(axis_overlap(&t, &g, &s).unwrap().length(), Some(0));
        assert!(!axis_overlap(&t, &g, &s).unwrap().is_disjoint());
        let far = parse_word(&q, "s2 s1 s2 s1 s2^2").unwrap();
        let o = axis_overlap(&t, &g, &far).unwrap();
        assert!(o.is_disjoint(), "{o:?}");
    }
}
