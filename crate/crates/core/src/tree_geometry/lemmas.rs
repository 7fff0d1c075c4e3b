//! Checkable forms of the basic lemmas on isometries of trees.

use super::axis::{overlap_with_frame, AxisFrame, Overlap};
use super::{Classification, ConvexSet, GTree, TreeModel, Vertex};
use crate::error::{Error, Result};
use crate::free_group::{format_word, ReducedWord};
use crate::report::LemmaReport;

pub const PAULIN: &str = "paulin_bridge";
pub const FAR_PROJECTIONS: &str = "far_projections";
pub const DIRECTION: &str = "direction";
pub const AXIS_INTERSECTION: &str = "axis_intersection";
pub const OVERLAP_WPD: &str = "overlap_wpd";

fn fw(t: &TreeModel, w: &ReducedWord) -> String {
    format_word(t.presentation(), w)
}

/// Bridge between Char(g) and Char(h) as (endpoint on Char(g), endpoint on
/// Char(h)), or `None` when the characteristic sets meet.
pub fn char_bridge(t: &TreeModel, g: &ReducedWord, h: &ReducedWord) -> Result<Option<(Vertex, Vertex)>> {
    if g.is_identity() || h.is_identity() {
        return Err(Error::Identity);
    }
    match (t.classify(g)?, t.classify(h)?) {
        (Classification::Elliptic { fixed: a }, Classification::Elliptic { fixed: b }) => {
            Ok((a != b).then_some((a, b)))
        }
        (Classification::Elliptic { .. }, Classification::Loxodromic { .. }) => {
            Ok(match super::axis_overlap(t, h, g)? {
                Overlap::Disjoint { near, far, .. } => Some((far, near)),
                _ => None,
            })
        }
        _ => Ok(match super::axis_overlap(t, g, h)? {
            Overlap::Disjoint { near, far, .. } => Some((near, far)),
            _ => None,
        }),
    }
}

/// If Char(g) and Char(h) are disjoint then gh is loxodromic and its axis
/// contains the bridge.
pub fn bridge_product_check(t: &TreeModel, g: &ReducedWord, h: &ReducedWord) -> Result<LemmaReport> {
    let Some((x, y)) = char_bridge(t, g, h)? else {
        return Err(Error::Precondition(
            "characteristic sets intersect".into(),
        ));
    };
    let p = t.presentation();
    let gh = p.mul(g, h);
    let bridge = t.geodesic(&x, &y);
    let mut rep = LemmaReport::new(PAULIN)
        .input("g", fw(t, g))
        .input("h", fw(t, h))
        .quantity("bridge_length", bridge.len() - 1)
        .witness("bridge_start", t.format_vertex(&x))
        .witness("bridge_end", t.format_vertex(&y));
    let frame = match AxisFrame::new(t, &gh) {
        Ok(f) => f,
        Err(_) => return Ok(rep.fail("gh is not loxodromic")),
    };
    rep = rep.quantity("translation_length_gh", frame.translation_length);
    if let Some(bad) = bridge.iter().find(|v| !frame.contains(t, v)) {
        let v = t.format_vertex(bad);
        return Ok(rep.witness("vertex_off_axis", v).fail("bridge leaves Axis(gh)"));
    }
    Ok(rep)
}

/// Projection of Char(h) onto Axis(g) as a position interval, `None` for a
/// common axis.
pub fn projection_interval<T: GTree>(t: &T, fg: &AxisFrame<T>, h: &T::G) -> Result<Option<(i64, i64)>> {
    Ok(match overlap_with_frame(t, fg, h)? {
        Overlap::SameAxis => None,
        Overlap::Overlap(s) => Some((s.start_offset, s.end_offset)),
        Overlap::Disjoint { near, .. } => {
            let p = fg.position(t, &near);
            Some((p, p))
        }
    })
}

pub fn interval_gap(a: (i64, i64), b: (i64, i64)) -> u64 {
    (b.0 - a.1).max(a.0 - b.1).max(0) as u64
}

/// If the projections of Axis(h) and Axis(h′) onto Axis(g) are more than ‖g‖
/// apart then Char(gh) and Axis(h′) are disjoint.
pub fn far_projections_check(
    t: &TreeModel,
    g: &ReducedWord,
    h: &ReducedWord,
    h2: &ReducedWord,
) -> Result<LemmaReport> {
    let rep = LemmaReport::new(FAR_PROJECTIONS)
        .input("g", fw(t, g))
        .input("h", fw(t, h))
        .input("h_prime", fw(t, h2));
    for (name, x) in [("g", g), ("h", h), ("h_prime", h2)] {
        if x.is_identity() || !matches!(t.classify(x)?, Classification::Loxodromic { .. }) {
            return Ok(rep.skip(format!("{name} is not loxodromic")));
        }
    }
    let fg = AxisFrame::new(t, g)?;
    let (Some(i1), Some(i2)) = (projection_interval(t, &fg, h)?, projection_interval(t, &fg, h2)?)
    else {
        return Ok(rep.skip("an axis coincides with Axis(g)"));
    };
    let gap = interval_gap(i1, i2);
    let rep = rep
        .quantity("projection_gap", gap)
        .quantity("translation_length_g", fg.translation_length)
        .witness("proj_h", vec![i1.0, i1.1])
        .witness("proj_h_prime", vec![i2.0, i2.1]);
    if gap <= fg.translation_length as u64 {
        return Ok(rep.skip("projection gap does not exceed the translation length of g"));
    }
    let gh = t.presentation().mul(g, h);
    let c = ConvexSet::char_set(t, &gh)?;
    let a = ConvexSet::Axis(AxisFrame::new(t, h2)?);
    let meet = c.intersect(t, &a)?;
    Ok(rep.check(meet.is_empty(), "Char(gh) meets Axis(h')"))
}

/// Strict containment g·d ⊊ d for the direction at x containing the neighbour y.
pub fn direction_strictly_contained(t: &TreeModel, x: &Vertex, y: &Vertex, g: &ReducedWord) -> bool {
    let gx = t.act(g, x);
    if gx == *x {
        return false;
    }
    let gy = t.act(g, y);
    let fwd = t.geodesic(x, &gx);
    let back = t.geodesic(&gx, x);
    fwd[1] == *y && back[1] != gy
}

/// If g·d ⊊ d for a direction d at x then g is loxodromic and [x, gx] ⊆ Axis(g).
pub fn direction_lemma_check(t: &TreeModel, x: &Vertex, y: &Vertex, g: &ReducedWord) -> Result<LemmaReport> {
    if t.distance(x, y) != 1 {
        return Err(Error::InvalidParameter(
            "direction must be given by a neighbour of x".into(),
        ));
    }
    let rep = LemmaReport::new(DIRECTION)
        .input("x", t.format_vertex(x))
        .input("direction", t.format_vertex(y))
        .input("g", fw(t, g));
    if g.is_identity() || !direction_strictly_contained(t, x, y, g) {
        return Ok(rep.skip("g·d is not strictly contained in d"));
    }
    let frame = match AxisFrame::new(t, g) {
        Ok(f) => f,
        Err(_) => return Ok(rep.fail("g is elliptic")),
    };
    let gx = t.act(g, x);
    let seg = t.geodesic(x, &gx);
    let rep = rep.quantity("translation_length", frame.translation_length);
    match seg.iter().find(|v| !frame.contains(t, v)) {
        Some(v) => Ok(rep.witness("vertex_off_axis", t.format_vertex(v)).fail("[x,gx] leaves Axis(g)")),
        None => Ok(rep),
    }
}

/// Exponent pairs (n, m), 0 < |n|, |m| ≤ bound, in a fixed order that puts
/// the small pairs first.
pub fn exponent_pairs(bound: u32) -> Vec<(i64, i64)> {
    let b = bound as i64;
    let mut v: Vec<(i64, i64)> = (-b..=b)
        .flat_map(|n| (-b..=b).map(move |m| (n, m)))
        .filter(|&(n, m)| n != 0 && m != 0)
        .collect();
    v.sort_by_key(|&(n, m)| (n.abs().max(m.abs()), n.abs() + m.abs(), -n, -m));
    v
}

/// ∩ Char(gⁿhᵐ) over 0 < |n|, |m| ≤ bound.
pub fn bounded_char_intersection<T: GTree>(t: &T, g: &T::G, h: &T::G, bound: u32) -> Result<ConvexSet<T>> {
    let mut acc = ConvexSet::Whole;
    for (n, m) in exponent_pairs(bound) {
        let k = t.mul(&t.pow(g, n), &t.pow(h, m));
        acc = acc.intersect(t, &ConvexSet::char_set(t, &k)?)?;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Classification branch of a pair of loxodromics with distinct axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionBranch {
    Disjoint,
    Touching,
    Overlapping,
}

/// The intersection of Char(gⁿhᵐ) is empty for a nondegenerate overlap and
/// equals the bridge otherwise.
pub fn axis_intersection_lemma_check(
    t: &TreeModel,
    g: &ReducedWord,
    h: &ReducedWord,
    bound: u32,
) -> Result<LemmaReport> {
    let fg = AxisFrame::new(t, g)?;
    let fh = AxisFrame::new(t, h)?;
    let ov = overlap_with_frame(t, &fg, h)?;
    let rep = LemmaReport::new(AXIS_INTERSECTION)
        .input("g", fw(t, g))
        .input("h", fw(t, h))
        .input("exponent_bound", bound);
    let (branch, expected) = match &ov {
        Overlap::SameAxis => return Err(Error::Precondition("axes coincide".into())),
        Overlap::Disjoint { near, far, .. } => (
            IntersectionBranch::Disjoint,
            ConvexSet::Segment(near.clone(), far.clone()),
        ),
        Overlap::Overlap(s) if s.length() == 0 => {
            (IntersectionBranch::Touching, ConvexSet::Point(s.start.clone()))
        }
        Overlap::Overlap(_) => (IntersectionBranch::Overlapping, ConvexSet::Empty),
    };
    let got = bounded_char_intersection(t, g, h, bound)?;
    let describe = |c: &ConvexSet<TreeModel>| -> String {
        match c {
            ConvexSet::Empty => "empty".into(),
            ConvexSet::Whole => "tree".into(),
            ConvexSet::Point(v) => t.format_vertex(v),
            ConvexSet::Segment(a, b) => format!("[{}, {}]", t.format_vertex(a), t.format_vertex(b)),
            ConvexSet::Axis(f) => format!("axis({})", fw(t, &f.element)),
        }
    };
    let mut rep = rep
        .quantity("branch", serde_json::to_value(branch).expect("serializable"))
        .quantity("overlap_length", ov.length().unwrap_or(0))
        .quantity("intersection", describe(&got))
        .quantity("expected", describe(&expected));
    if branch == IntersectionBranch::Overlapping {
        let d = ov.length().unwrap_or(0);
        let n = (d / fg.translation_length.min(fh.translation_length) + 1) as i64;
        rep = rep.quantity("witness_exponent", n);
        if n <= bound as i64 {
            for (a, b) in [(n, -n), (n, n)] {
                let k1 = t.mul(&t.pow(g, a), &t.pow(h, b));
                let k2 = t.mul(&t.pow(g, -a), &t.pow(h, -b));
                let c = ConvexSet::char_set(t, &k1)?.intersect(t, &ConvexSet::char_set(t, &k2)?)?;
                if c.is_empty() {
                    rep = rep.witness("pair", vec![a, b]).witness("pair_opposite", vec![-a, -b]);
                    break;
                }
            }
        }
    }
    Ok(rep.check(got.same_finite_set(&expected), "intersection differs from the predicted set"))
}

/// If the overlap of Axis(g) and Char(h) is at least (N+2)·L·max(‖g‖,‖h‖)
/// then h ∈ E(g).
pub fn overlap_lemma_check(
    t: &TreeModel,
    g: &ReducedWord,
    h: &ReducedWord,
    l: u32,
    n: u32,
) -> Result<LemmaReport> {
    if l == 0 || n == 0 {
        return Err(Error::InvalidParameter("L and N must be positive".into()));
    }
    let fg = AxisFrame::new(t, g)?;
    let ov = overlap_with_frame(t, &fg, h)?;
    let lh = t.translation_length(h);
    let threshold = (n as usize + 2) * l as usize * fg.translation_length.max(lh);
    let rep = LemmaReport::new(OVERLAP_WPD)
        .input("g", fw(t, g))
        .input("h", fw(t, h))
        .input("L", l)
        .input("N", n)
        .quantity("threshold", threshold);
    let (reached, rep) = match ov.length() {
        None => (true, rep.quantity("overlap_length", "infinite")),
        Some(len) => (len >= threshold, rep.quantity("overlap_length", len)),
    };
    if !reached {
        return Ok(rep.skip("overlap below threshold; no claim"));
    }
    let member = t.presentation().in_elementary_closure(h, g)?;
    Ok(rep
        .quantity("in_elementary_closure", member)
        .check(member, "long overlap but h is not in E(g)"))
}
