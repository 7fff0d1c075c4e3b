//! Points of universal covers as tight paths from the basepoint lift.

use super::{push_tight, GraphMorphism, Length, MarkedGraph, OEdge};
use crate::error::{Error, Result};
use crate::free_group::{GroupPresentation, ReducedWord};
use crate::tree_geometry::{Classification, GTree};
use num_traits::{Signed, Zero};

/// The lift reached by the tight path `path`, moved a further `offset`
/// (strictly inside the edge) along `along` when present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverPoint {
    pub path: Vec<OEdge>,
    pub along: Option<(OEdge, Length)>,
}

impl CoverPoint {
    pub fn vertex(path: Vec<OEdge>) -> Self {
        CoverPoint { path, along: None }
    }

    /// Point at distance `offset` along `d` from the end of `path`,
    /// normalized so the path part is tight with `d`.
    pub fn on_edge(g: &MarkedGraph, mut path: Vec<OEdge>, d: OEdge, offset: Length) -> Self {
        if offset.is_zero() {
            return CoverPoint::vertex(path);
        }
        if offset == g.length(d) {
            push_tight(&mut path, d);
            return CoverPoint::vertex(path);
        }
        if path.last() == Some(&d.inv()) {
            path.pop();
            return CoverPoint {
                path,
                along: Some((d.inv(), g.length(d) - offset)),
            };
        }
        CoverPoint {
            path,
            along: Some((d, offset)),
        }
    }

    fn segments(&self, g: &MarkedGraph) -> (Vec<OEdge>, Vec<Length>) {
        let mut edges = self.path.clone();
        let mut lens: Vec<Length> = self.path.iter().map(|&d| g.length(d)).collect();
        if let Some((d, t)) = self.along {
            edges.push(d);
            lens.push(t);
        }
        (edges, lens)
    }
}

/// Distance in the universal cover.
pub fn cover_distance(g: &MarkedGraph, a: &CoverPoint, b: &CoverPoint) -> Length {
    let (ea, la) = a.segments(g);
    let (eb, lb) = b.segments(g);
    let k = ea.iter().zip(&eb).take_while(|(x, y)| x == y).count();
    let tail = |l: &[Length], from: usize| -> Length { l[from..].iter().copied().sum() };
    let partial_a = a.along.is_some();
    let partial_b = b.along.is_some();
    if k == ea.len() && k == eb.len() {
        return match (partial_a, partial_b) {
            (true, true) => (la[k - 1] - lb[k - 1]).abs(),
            (true, false) => g.length(ea[k - 1]) - la[k - 1],
            (false, true) => g.length(eb[k - 1]) - lb[k - 1],
            (false, false) => Length::zero(),
        };
    }
    // One extended path runs through the other's partial edge.
    if k == ea.len() && partial_a {
        return g.length(ea[k - 1]) - la[k - 1] + tail(&lb, k);
    }
    if k == eb.len() && partial_b {
        return g.length(eb[k - 1]) - lb[k - 1] + tail(&la, k);
    }
    tail(&la, k) + tail(&lb, k)
}

/// Image of a cover point under the lift fixing the basepoint lifts.
pub fn image_point(f: &GraphMorphism, p: &CoverPoint) -> CoverPoint {
    let base = f.image_path(&p.path);
    let Some((d, t)) = p.along else {
        return CoverPoint::vertex(base);
    };
    let img = f.image_of(d);
    if img.is_empty() {
        return CoverPoint::vertex(base);
    }
    let total = f.target.path_length(&img);
    let mut s = t * total / f.source.length(d);
    let mut path = base;
    for &x in &img {
        let l = f.target.length(x);
        if s < l {
            return CoverPoint::on_edge(&f.target, path, x, s);
        }
        s -= l;
        push_tight(&mut path, x);
    }
    CoverPoint::vertex(path)
}

/// Distance from `p` to the geodesic [a, b].
pub fn distance_to_geodesic(g: &MarkedGraph, p: &CoverPoint, a: &CoverPoint, b: &CoverPoint) -> Length {
    (cover_distance(g, p, a) + cover_distance(g, p, b) - cover_distance(g, a, b)) / Length::from_integer(2)
}

/// Oriented edges of the geodesic between two cover vertices, each with the
/// tight path to its starting vertex.
pub fn geodesic_edges(x: &[OEdge], y: &[OEdge]) -> Vec<(Vec<OEdge>, OEdge)> {
    let k = x.iter().zip(y).take_while(|(a, b)| a == b).count();
    let mut out = Vec::new();
    let mut cur = x.to_vec();
    for i in (k..x.len()).rev() {
        let d = x[i].inv();
        out.push((cur.clone(), d));
        cur.pop();
    }
    for &d in &y[k..] {
        out.push((cur.clone(), d));
        cur.push(d);
    }
    out
}

/// Unit-length universal cover of a marked graph with F_n acting through the
/// marking.
#[derive(Debug, Clone)]
pub struct GraphCover {
    graph: MarkedGraph,
    group: GroupPresentation,
}

impl GraphCover {
    pub fn new(graph: &MarkedGraph) -> Self {
        GraphCover {
            group: graph.free_group(),
            graph: graph.with_unit_lengths(),
        }
    }

    pub fn graph(&self) -> &MarkedGraph {
        &self.graph
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.group
    }

    /// Closed path of g at the basepoint, split as α·β·ᾱ with β cyclically tight.
    fn cyclic_split(&self, g: &ReducedWord) -> (Vec<OEdge>, Vec<OEdge>) {
        let l = self.graph.loop_of(g);
        let mut i = 0;
        while 2 * i + 1 < l.len() && l[i] == l[l.len() - 1 - i].inv() {
            i += 1;
        }
        (l[..i].to_vec(), l[i..l.len() - i].to_vec())
    }
}

impl GTree for GraphCover {
    type V = Vec<OEdge>;
    type G = ReducedWord;

    fn act(&self, g: &ReducedWord, v: &Vec<OEdge>) -> Vec<OEdge> {
        let mut out = self.graph.loop_of(g);
        v.iter().for_each(|&d| push_tight(&mut out, d));
        out
    }

    fn distance(&self, a: &Vec<OEdge>, b: &Vec<OEdge>) -> usize {
        let k = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        a.len() + b.len() - 2 * k
    }

    fn geodesic(&self, a: &Vec<OEdge>, b: &Vec<OEdge>) -> Vec<Vec<OEdge>> {
        let mut out = vec![a.clone()];
        for (mut p, d) in geodesic_edges(a, b) {
            push_tight(&mut p, d);
            out.push(p);
        }
        out
    }

    fn classify(&self, g: &ReducedWord) -> Result<Classification<Vec<OEdge>>> {
        if g.is_identity() {
            return Err(Error::Identity);
        }
        let (alpha, beta) = self.cyclic_split(g);
        Ok(Classification::Loxodromic {
            translation_length: beta.len(),
            base: alpha,
        })
    }

    fn mul(&self, g: &ReducedWord, h: &ReducedWord) -> ReducedWord {
        self.group.mul(g, h)
    }

    fn inverse(&self, g: &ReducedWord) -> ReducedWord {
        self.group.inverse(g)
    }

    fn is_identity(&self, g: &ReducedWord) -> bool {
        g.is_identity()
    }

    fn neighbors(&self, v: &Vec<OEdge>) -> Vec<Vec<OEdge>> {
        let end = self
            .graph
            .path_end(self.graph.base, v)
            .expect("cover vertices are paths from the basepoint");
        let mut out = Vec::new();
        if let Some((_, rest)) = v.split_last() {
            out.push(rest.to_vec());
        }
        for d in self.graph.directions(end) {
            if v.last() != Some(&d.inv()) {
                let mut p = v.clone();
                p.push(d);
                out.push(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;
    use crate::tree_geometry::{axis_overlap, Overlap};

    fn q(n: i64, d: i64) -> Length {
        Length::new(n, d)
    }

    #[test]
    fn distances_with_partial_edges() {
        let g = MarkedGraph::rose(&[q(1, 1), q(2, 1)]).unwrap();
        let a = OEdge::fwd(0);
        let b = OEdge::fwd(1);
        let x = CoverPoint::on_edge(&g, vec![a], b, q(1, 2));
        let y = CoverPoint::on_edge(&g, vec![a], b, q(3, 2));
        assert_eq!(cover_distance(&g, &x, &y), q(1, 1));
        let z = CoverPoint::vertex(vec![a, b, a]);
        assert_eq!(cover_distance(&g, &x, &z), q(3, 2) + q(1, 1));
        let w = CoverPoint::vertex(vec![]);
        assert_eq!(cover_distance(&g, &x, &w), q(3, 2));
        // Walking back along the last edge normalizes the representation.
        let back = CoverPoint::on_edge(&g, vec![a, b], b.inv(), q(1, 2));
        assert_eq!(back, y);
    }

    #[test]
    fn rose_cover_matches_cayley_tree() {
        let g = MarkedGraph::unit_rose(2).unwrap();
        let c = GraphCover::new(&g);
        let p = c.presentation().clone();
        let w = |s: &str| parse_word(&p, s).unwrap();
        assert_eq!(axis_overlap(&c, &w("ab"), &w("ababa")).unwrap().length(), Some(5));
        assert!(matches!(axis_overlap(&c, &w("a"), &w("baB")).unwrap(), Overlap::Disjoint { length: 1, .. }));
    }
}
