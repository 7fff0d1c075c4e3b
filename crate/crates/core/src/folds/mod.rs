//! Marked metric graphs, morphisms between them, Stallings fold
//! decompositions and bounded backtracking.
//!
//! A marked graph presents a free-action F_n-tree: its universal cover. A
//! morphism presents the equivariant map between the covers that is linear
//! on each edge. Lengths are exact rationals throughout.

mod bbt;
mod cover;
mod decompose;
mod random;
mod text;

pub use bbt::{bbt_empirical, bbt_report, bbt_triple, collapse_counting_check, fold_turn_witnesses, BbtEstimate, BBT, COLLAPSE_COUNTING};
pub use cover::{CoverPoint, GraphCover};
pub use decompose::{apply_move, decomposition_report, fold_decompose, replay, verify_recomposition, FoldMove, FoldSequence, Identification, MoveCounts, FOLD_DECOMPOSITION};
pub use random::{collapse_morphism, random_morphism, single_fold_witness};
pub use text::{
    format_fold_sequence, format_graph, format_morphism, parse_fold_sequence, parse_graph, parse_morphism,
};

use crate::error::{Error, Result};
use crate::free_group::{is_basis, GroupPresentation, Letter, ReducedWord};
use num_rational::Ratio;
use num_traits::Zero;
use std::collections::VecDeque;
use std::fmt;

pub type Length = Ratio<i64>;

/// An edge with an orientation; `rev` runs it from head to tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OEdge {
    pub edge: usize,
    pub rev: bool,
}

impl OEdge {
    pub fn fwd(edge: usize) -> Self {
        OEdge { edge, rev: false }
    }

    pub fn bwd(edge: usize) -> Self {
        OEdge { edge, rev: true }
    }

    pub fn inv(self) -> Self {
        OEdge {
            edge: self.edge,
            rev: !self.rev,
        }
    }
}

impl fmt::Display for OEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge, if self.rev { '-' } else { '+' })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: Length,
}

/// Free reduction of an edge path.
pub fn tighten(path: &[OEdge]) -> Vec<OEdge> {
    let mut out: Vec<OEdge> = Vec::with_capacity(path.len());
    for &d in path {
        push_tight(&mut out, d);
    }
    out
}

pub(crate) fn push_tight(path: &mut Vec<OEdge>, d: OEdge) {
    if path.last() == Some(&d.inv()) {
        path.pop();
    } else {
        path.push(d);
    }
}

pub fn reverse_path(path: &[OEdge]) -> Vec<OEdge> {
    path.iter().rev().map(|d| d.inv()).collect()
}

/// A connected finite graph with positive rational edge lengths and, for
/// each free generator, a tight closed path at the basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedGraph {
    pub num_vertices: usize,
    pub edges: Vec<Edge>,
    pub base: usize,
    pub marking: Vec<Vec<OEdge>>,
}

impl MarkedGraph {
    /// Validating constructor; marking loops are tightened first.
    pub fn new(num_vertices: usize, edges: Vec<Edge>, base: usize, marking: Vec<Vec<OEdge>>) -> Result<Self> {
        let g = MarkedGraph {
            num_vertices,
            edges,
            base,
            marking: marking.iter().map(|m| tighten(m)).collect(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Rose with one petal per length, marked by its petals.
    pub fn rose(lengths: &[Length]) -> Result<Self> {
        let edges = lengths
            .iter()
            .map(|&length| Edge {
                tail: 0,
                head: 0,
                length,
            })
            .collect();
        let marking = (0..lengths.len()).map(|i| vec![OEdge::fwd(i)]).collect();
        Self::new(1, edges, 0, marking)
    }

    /// Unit-length rose.
    pub fn unit_rose(n: usize) -> Result<Self> {
        Self::rose(&vec![Length::from_integer(1); n])
    }

    /// Theta graph: three edges from vertex 0 to vertex 1, marked by the
    /// spanning-tree basis.
    pub fn theta(lengths: [Length; 3]) -> Result<Self> {
        let mut g = MarkedGraph {
            num_vertices: 2,
            edges: lengths
                .iter()
                .map(|&length| Edge {
                    tail: 0,
                    head: 1,
                    length,
                })
                .collect(),
            base: 0,
            marking: Vec::new(),
        };
        g.marking = g.spanning_tree_basis()?;
        g.validate()?;
        Ok(g)
    }

    pub fn rank(&self) -> isize {
        self.edges.len() as isize - self.num_vertices as isize + 1
    }

    pub fn free_group(&self) -> GroupPresentation {
        GroupPresentation::free(self.marking.len())
    }

    pub fn volume(&self) -> Length {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn origin(&self, d: OEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.rev {
            e.head
        } else {
            e.tail
        }
    }

    pub fn terminus(&self, d: OEdge) -> usize {
        self.origin(d.inv())
    }

    pub fn length(&self, d: OEdge) -> Length {
        self.edges[d.edge].length
    }

    pub fn path_length(&self, path: &[OEdge]) -> Length {
        path.iter().map(|&d| self.length(d)).sum()
    }

    /// Oriented edges leaving `v`; a loop contributes both orientations.
    pub fn directions(&self, v: usize) -> Vec<OEdge> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail == v {
                out.push(OEdge::fwd(i));
            }
            if e.head == v {
                out.push(OEdge::bwd(i));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.directions(v).len()
    }

    /// End vertex of a path starting at `from`, or an error if consecutive
    /// edges do not meet.
    pub fn path_end(&self, from: usize, path: &[OEdge]) -> Result<usize> {
        let mut cur = from;
        for &d in path {
            if d.edge >= self.edges.len() {
                return Err(Error::InvalidGraph(format!("edge {} out of range", d.edge)));
            }
            if self.origin(d) != cur {
                return Err(Error::InvalidGraph(format!("path breaks at edge {d}")));
            }
            cur = self.terminus(d);
        }
        Ok(cur)
    }

    fn bfs_tree(&self) -> (Vec<Option<OEdge>>, Vec<bool>) {
        let mut parent: Vec<Option<OEdge>> = vec![None; self.num_vertices];
        let mut seen = vec![false; self.num_vertices];
        let mut tree = vec![false; self.edges.len()];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for d in self.directions(v) {
                let w = self.terminus(d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(d);
                    tree[d.edge] = true;
                    queue.push_back(w);
                }
            }
        }
        (parent, tree)
    }

    pub fn is_connected(&self) -> bool {
        let (parent, _) = self.bfs_tree();
        (0..self.num_vertices).all(|v| v == self.base || parent[v].is_some())
    }

    /// Tree path from the basepoint to `v` in the breadth-first spanning tree.
    pub fn tree_path(&self, v: usize) -> Vec<OEdge> {
        let (parent, _) = self.bfs_tree();
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(d) = parent[cur] {
            out.push(d);
            cur = self.origin(d);
        }
        out.reverse();
        out
    }

    /// One loop per edge outside the breadth-first spanning tree.
    pub fn spanning_tree_basis(&self) -> Result<Vec<Vec<OEdge>>> {
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        let (_, tree) = self.bfs_tree();
        Ok((0..self.edges.len())
            .filter(|&i| !tree[i])
            .map(|i| {
                let d = OEdge::fwd(i);
                let mut p = self.tree_path(self.origin(d));
                p.push(d);
                p.extend(reverse_path(&self.tree_path(self.terminus(d))));
                tighten(&p)
            })
            .collect())
    }

    /// Closed paths at the basepoint as words in the free basis of π₁ given
    /// by the edges outside the spanning tree.
    fn loop_words(&self, loops: &[Vec<OEdge>]) -> Vec<ReducedWord> {
        let (_, tree) = self.bfs_tree();
        let mut index = vec![None; self.edges.len()];
        let mut k = 0;
        for i in 0..self.edges.len() {
            if !tree[i] {
                index[i] = Some(k);
                k += 1;
            }
        }
        let p = GroupPresentation::free(k.max(1));
        loops
            .iter()
            .map(|l| {
                let letters: Vec<Letter> = l
                    .iter()
                    .filter_map(|d| index[d.edge].map(|j| Letter::new(j as u32, if d.rev { -1 } else { 1 })))
                    .collect();
                p.reduce(&letters).expect("valid letters")
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_vertices == 0 || self.base >= self.num_vertices {
            return Err(Error::InvalidGraph("basepoint out of range".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= self.num_vertices || e.head >= self.num_vertices {
                return Err(Error::InvalidGraph(format!("edge {i} has an endpoint out of range")));
            }
            if e.length <= Length::zero() {
                return Err(Error::InvalidGraph(format!("edge {i} has nonpositive length")));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        let rank = self.rank();
        if rank < 1 {
            return Err(Error::InvalidGraph("graph is a tree".into()));
        }
        if self.marking.len() != rank as usize {
            return Err(Error::InconsistentMarking(format!(
                "{} marking loops for a graph of rank {rank}",
                self.marking.len()
            )));
        }
        for (i, m) in self.marking.iter().enumerate() {
            if self.path_end(self.base, m).map_err(|e| Error::InconsistentMarking(format!("loop {i}: {e}")))?
                != self.base
            {
                return Err(Error::InconsistentMarking(format!("loop {i} is not closed")));
            }
            if tighten(m) != *m {
                return Err(Error::InconsistentMarking(format!("loop {i} is not tight")));
            }
        }
        let words = self.loop_words(&self.marking);
        if !is_basis(&GroupPresentation::free(rank as usize), &words)? {
            return Err(Error::InconsistentMarking(
                "marking loops do not form a basis of the fundamental group".into(),
            ));
        }
        Ok(())
    }

    /// Tight closed path at the basepoint representing a word in the marking.
    pub fn loop_of(&self, w: &ReducedWord) -> Vec<OEdge> {
        let mut out = Vec::new();
        for l in w.letters() {
            let m = &self.marking[l.factor as usize];
            if l.exp > 0 {
                m.iter().for_each(|&d| push_tight(&mut out, d));
            } else {
                m.iter().rev().for_each(|&d| push_tight(&mut out, d.inv()));
            }
        }
        out
    }

    /// Same graph with every edge of length 1.
    pub fn with_unit_lengths(&self) -> MarkedGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length = Length::from_integer(1);
        }
        g
    }
}

/// A morphism of marked graphs: vertices to vertices, each edge to a tight
/// edge path traversed at constant speed, basepoint to basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    pub source: MarkedGraph,
    pub target: MarkedGraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Vec<OEdge>>,
}

impl GraphMorphism {
    /// Validating constructor: the map must be a graph map whose action on
    /// marking loops tightens to the target's marking loops.
    pub fn new(
        source: MarkedGraph,
        target: MarkedGraph,
        vertex_map: Vec<usize>,
        edge_map: Vec<Vec<OEdge>>,
    ) -> Result<Self> {
        if vertex_map.len() != source.num_vertices || edge_map.len() != source.edges.len() {
            return Err(Error::InvalidGraph("map sizes do not match the source graph".into()));
        }
        if vertex_map.iter().any(|&v| v >= target.num_vertices) {
            return Err(Error::InvalidGraph("vertex image out of range".into()));
        }
        if vertex_map[source.base] != target.base {
            return Err(Error::InconsistentMarking("basepoint not mapped to basepoint".into()));
        }
        for (i, (e, p)) in source.edges.iter().zip(&edge_map).enumerate() {
            if tighten(p) != *p {
                return Err(Error::InvalidGraph(format!("image of edge {i} is not tight")));
            }
            if target.path_end(vertex_map[e.tail], p)? != vertex_map[e.head] {
                return Err(Error::InvalidGraph(format!("image of edge {i} has wrong endpoints")));
            }
        }
        if source.marking.len() != target.marking.len() {
            return Err(Error::InconsistentMarking("ranks differ".into()));
        }
        let f = GraphMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        };
        for (i, (m, t)) in f.source.marking.iter().zip(&f.target.marking).enumerate() {
            if f.image_path(m) != *t {
                return Err(Error::InconsistentMarking(format!(
                    "image of marking loop {i} does not tighten to the target loop"
                )));
            }
        }
        Ok(f)
    }

    pub fn identity(g: &MarkedGraph) -> Self {
        GraphMorphism {
            source: g.clone(),
            target: g.clone(),
            vertex_map: (0..g.num_vertices).collect(),
            edge_map: (0..g.edges.len()).map(|i| vec![OEdge::fwd(i)]).collect(),
        }
    }

    pub fn image_of(&self, d: OEdge) -> Vec<OEdge> {
        let p = &self.edge_map[d.edge];
        if d.rev {
            reverse_path(p)
        } else {
            p.clone()
        }
    }

    /// Tightened image of a path.
    pub fn image_path(&self, path: &[OEdge]) -> Vec<OEdge> {
        let mut out = Vec::new();
        for &d in path {
            for x in self.image_of(d) {
                push_tight(&mut out, x);
            }
        }
        out
    }

    /// max |f(e)| / ℓ(e) over edges.
    pub fn lipschitz_constant(&self) -> Length {
        self.source
            .edges
            .iter()
            .zip(&self.edge_map)
            .map(|(e, p)| self.target.path_length(p) / e.length)
            .max()
            .unwrap_or_else(Length::zero)
    }

    /// 2·K·Lip(f)·vol(S/G) with K = 1 (trivial edge stabilizers).
    pub fn bbt_bound(&self) -> Length {
        Length::from_integer(2) * self.lipschitz_constant() * self.source.volume()
    }

    /// `next ∘ self`, with tightened edge images.
    pub fn then(&self, next: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|p| next.image_path(p)).collect(),
        }
    }

    /// Bijective on vertices and edges, each edge onto one edge of equal length.
    pub fn is_isometry(&self) -> bool {
        if self.source.num_vertices != self.target.num_vertices || self.source.edges.len() != self.target.edges.len()
        {
            return false;
        }
        let mut hit_v = vec![false; self.target.num_vertices];
        for &v in &self.vertex_map {
            if std::mem::replace(&mut hit_v[v], true) {
                return false;
            }
        }
        let mut hit_e = vec![false; self.target.edges.len()];
        for (e, p) in self.source.edges.iter().zip(&self.edge_map) {
            if p.len() != 1 || self.target.length(p[0]) != e.length {
                return false;
            }
            if std::mem::replace(&mut hit_e[p[0].edge], true) {
                return false;
            }
        }
        true
    }
}
