//! Cayley trees of free groups and Bass–Serre trees of free products.
//!
//! All queries reduce to word combinatorics on canonical coset
//! representatives; no portion of the infinite tree is ever built except by
//! the ball helpers used for debugging and test oracles.

mod axis;
pub mod cayley;
mod convex;
mod dot;
pub mod lemmas;
pub mod sweeps;

pub use axis::{
    axis_overlap, count_fundamental_domains, on_axis, project_to_axis, AxisFrame, AxisSegment,
    DomainCount, Overlap,
};
pub use convex::ConvexSet;
pub use dot::ball_dot;

use crate::error::{Error, Result};
use crate::free_group::{format_word, GroupPresentation, ReducedWord};
use serde::Serialize;
use std::fmt::Debug;
use std::hash::Hash;

/// A tree with a simplicial action. Distances are in edge units.
pub trait GTree: Clone + Debug {
    type V: Clone + Eq + Hash + Ord + Debug;
    type G: Clone + Eq + Debug;

    fn act(&self, g: &Self::G, v: &Self::V) -> Self::V;
    fn distance(&self, a: &Self::V, b: &Self::V) -> usize;
    /// Vertex sequence from `a` to `b`, both included.
    fn geodesic(&self, a: &Self::V, b: &Self::V) -> Vec<Self::V>;
    fn classify(&self, g: &Self::G) -> Result<Classification<Self::V>>;
    fn mul(&self, g: &Self::G, h: &Self::G) -> Self::G;
    fn inverse(&self, g: &Self::G) -> Self::G;
    fn is_identity(&self, g: &Self::G) -> bool;
    /// Finite list of neighbours; may be truncated for vertices of infinite valence.
    fn neighbors(&self, v: &Self::V) -> Vec<Self::V>;

    fn pow(&self, g: &Self::G, n: i64) -> Self::G {
        let base = if n < 0 { self.inverse(g) } else { g.clone() };
        let id = self.mul(g, &self.inverse(g));
        (0..n.unsigned_abs()).fold(id, |acc, _| self.mul(&acc, &base))
    }

    fn commute(&self, g: &Self::G, h: &Self::G) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification<V> {
    Loxodromic { translation_length: usize, base: V },
    Elliptic { fixed: V },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TreeKind {
    Cayley,
    BassSerre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexClass {
    /// Group element (Cayley tree) or the trivial-stabilizer orbit (star model).
    Base,
    /// Coset g·G_i of a free factor.
    Factor(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub rep: ReducedWord,
    pub class: VertexClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisDescriptor {
    pub element: ReducedWord,
    pub translation_length: usize,
    pub base_vertex: Vertex,
    /// Cyclic core read along one fundamental domain.
    pub period_word: ReducedWord,
    pub conjugator: ReducedWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSetDescriptor {
    pub element: ReducedWord,
    /// The unique fixed vertex; w·g·w⁻¹ fixes w·vertex.
    pub vertex: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharSet {
    Axis(AxisDescriptor),
    Fixed(FixedSetDescriptor),
}

/// Valence cap used when listing neighbours of a vertex stabilized by Z.
pub const INFINITE_VALENCE_CAP: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeModel {
    presentation: GroupPresentation,
    kind: TreeKind,
}

/// Half-open letter ranges of maximal same-factor runs.
pub fn syllables(w: &ReducedWord) -> Vec<(usize, usize)> {
    let ls = w.letters();
    let mut out = Vec::new();
    let mut i = 0;
    while i < ls.len() {
        let f = ls[i].factor;
        let mut j = i + 1;
        while j < ls.len() && ls[j].factor == f {
            j += 1;
        }
        out.push((i, j));
        i = j;
    }
    out
}

impl TreeModel {
    pub fn new(presentation: GroupPresentation, kind: TreeKind) -> Result<Self> {
        presentation.validate()?;
        match kind {
            TreeKind::Cayley => {
                if !presentation.is_pure_free() {
                    return Err(Error::InvalidPresentation(
                        "a Cayley tree needs a free group".into(),
                    ));
                }
            }
            TreeKind::BassSerre => {
                if presentation.num_factors() < 2 {
                    return Err(Error::InvalidPresentation(
                        "a Bass-Serre tree needs at least two free factors".into(),
                    ));
                }
            }
        }
        Ok(TreeModel { presentation, kind })
    }

    pub fn cayley(p: GroupPresentation) -> Result<Self> {
        Self::new(p, TreeKind::Cayley)
    }

    pub fn bass_serre(p: GroupPresentation) -> Result<Self> {
        Self::new(p, TreeKind::BassSerre)
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    /// With exactly two factors the Bass–Serre tree has one vertex orbit per
    /// factor and edges indexed by group elements.
    pub fn is_segment_model(&self) -> bool {
        self.kind == TreeKind::BassSerre && self.presentation.num_factors() == 2
    }

    pub fn root_vertex(&self) -> Vertex {
        let class = if self.is_segment_model() {
            VertexClass::Factor(0)
        } else {
            VertexClass::Base
        };
        Vertex {
            rep: ReducedWord::identity(),
            class,
        }
    }

    pub fn vertex(&self, rep: ReducedWord, class: VertexClass) -> Result<Vertex> {
        self.presentation.check_word(&rep)?;
        match (self.kind, class) {
            (TreeKind::Cayley, VertexClass::Factor(_)) => Err(Error::InvalidParameter(
                "Cayley tree vertices have no factor class".into(),
            )),
            (TreeKind::BassSerre, VertexClass::Base) if self.is_segment_model() => Err(
                Error::InvalidParameter("two-factor trees have only factor vertices".into()),
            ),
            (_, VertexClass::Factor(f)) if f as usize >= self.presentation.num_factors() => {
                Err(Error::PresentationMismatch(format!("factor {f} out of range")))
            }
            _ => Ok(self.canon(rep, class)),
        }
    }

    pub(crate) fn canon(&self, rep: ReducedWord, class: VertexClass) -> Vertex {
        match class {
            VertexClass::Base => Vertex { rep, class },
            VertexClass::Factor(f) => {
                let ls = rep.letters();
                let mut n = ls.len();
                while n > 0 && ls[n - 1].factor == f {
                    n -= 1;
                }
                let rep = if n == ls.len() { rep } else { rep.prefix(n) };
                Vertex { rep, class }
            }
        }
    }

    /// Conjugates until the first and last syllables lie in different factors.
    /// Returns `(core, conjugator)` with `w = conjugator · core · conjugator⁻¹`.
    pub fn syllable_cyclic_reduce(&self, w: &ReducedWord) -> (ReducedWord, ReducedWord) {
        let p = &self.presentation;
        let mut conj = ReducedWord::identity();
        let mut cur = w.clone();
        loop {
            let syl = syllables(&cur);
            if syl.len() >= 2 {
                let (a, b) = syl[0];
                let last = syl[syl.len() - 1];
                if cur.letters()[a].factor == cur.letters()[last.0].factor {
                    let s = ReducedWord::from_reduced_unchecked(cur.letters()[a..b].to_vec());
                    conj = p.mul(&conj, &s);
                    cur = p.mul3(&p.inverse(&s), &cur, &s);
                    continue;
                }
            }
            return (cur, conj);
        }
    }

    fn star_distance(&self, a: &Vertex, b: &Vertex) -> usize {
        if a == b {
            return 0;
        }
        let p = &self.presentation;
        let w = p.mul(&p.inverse(&a.rep), &b.rep);
        let syl = syllables(&w);
        let fac = |k: usize| w.letters()[syl[k].0].factor;
        let (mut lo, mut hi) = (0, syl.len());
        if let VertexClass::Factor(i) = a.class {
            if hi > 0 && fac(0) == i {
                lo = 1;
            }
        }
        if let VertexClass::Factor(j) = b.class {
            if hi > lo && fac(hi - 1) == j {
                hi -= 1;
            }
        }
        let ends = matches!(a.class, VertexClass::Factor(_)) as usize
            + matches!(b.class, VertexClass::Factor(_)) as usize;
        2 * (hi - lo) + ends
    }

    fn star_path(&self, a: &Vertex, b: &Vertex) -> Vec<Vertex> {
        if a == b {
            return vec![a.clone()];
        }
        let p = &self.presentation;
        let w = p.mul(&p.inverse(&a.rep), &b.rep);
        let syl = syllables(&w);
        let fac = |k: usize| w.letters()[syl[k].0].factor;
        let (mut lo, mut hi) = (0, syl.len());
        let mut cur = a.rep.clone();
        if let VertexClass::Factor(i) = a.class {
            if hi > 0 && fac(0) == i {
                cur = p.mul(&a.rep, &w.prefix(syl[0].1));
                lo = 1;
            }
        }
        if let VertexClass::Factor(j) = b.class {
            if hi > lo && fac(hi - 1) == j {
                hi -= 1;
            }
        }
        let mut path = Vec::with_capacity(2 * (hi - lo) + 3);
        if matches!(a.class, VertexClass::Factor(_)) {
            path.push(a.clone());
        }
        path.push(Vertex {
            rep: cur.clone(),
            class: VertexClass::Base,
        });
        for (k, &(_, end)) in syl.iter().enumerate().take(hi).skip(lo) {
            path.push(self.canon(cur.clone(), VertexClass::Factor(fac(k))));
            cur = p.mul(&a.rep, &w.prefix(end));
            path.push(Vertex {
                rep: cur.clone(),
                class: VertexClass::Base,
            });
        }
        if matches!(b.class, VertexClass::Factor(_)) {
            path.push(b.clone());
        }
        debug_assert_eq!(path.len(), self.star_distance(a, b) + 1);
        path
    }

    pub fn format_vertex(&self, v: &Vertex) -> String {
        let p = &self.presentation;
        let w = format_word(p, &v.rep);
        match v.class {
            VertexClass::Base => w,
            VertexClass::Factor(f) => {
                let name = format_word(p, &p.factor_generator(f));
                format!("{w}<{name}>")
            }
        }
    }

    pub fn char_set(&self, g: &ReducedWord) -> Result<CharSet> {
        self.presentation.check_word(g)?;
        match self.classify(g)? {
            Classification::Loxodromic {
                translation_length,
                base,
            } => {
                let (core, conj) = self.core_and_conjugator(g);
                Ok(CharSet::Axis(AxisDescriptor {
                    element: g.clone(),
                    translation_length,
                    base_vertex: base,
                    period_word: core,
                    conjugator: conj,
                }))
            }
            Classification::Elliptic { fixed } => Ok(CharSet::Fixed(FixedSetDescriptor {
                element: g.clone(),
                vertex: fixed,
            })),
        }
    }

    pub fn axis(&self, g: &ReducedWord) -> Result<AxisDescriptor> {
        match self.char_set(g)? {
            CharSet::Axis(a) => Ok(a),
            CharSet::Fixed(_) => Err(Error::Elliptic),
        }
    }

    fn core_and_conjugator(&self, g: &ReducedWord) -> (ReducedWord, ReducedWord) {
        match self.kind {
            TreeKind::Cayley => self.presentation.cyclic_reduce(g),
            TreeKind::BassSerre => self.syllable_cyclic_reduce(g),
        }
    }

    pub fn translation_length(&self, g: &ReducedWord) -> usize {
        match self.classify(g) {
            Ok(Classification::Loxodromic {
                translation_length, ..
            }) => translation_length,
            _ => 0,
        }
    }
}

impl GTree for TreeModel {
    type V = Vertex;
    type G = ReducedWord;

    fn act(&self, g: &ReducedWord, v: &Vertex) -> Vertex {
        self.canon(self.presentation.mul(g, &v.rep), v.class)
    }

    fn distance(&self, a: &Vertex, b: &Vertex) -> usize {
        match self.kind {
            TreeKind::Cayley => {
                let (x, y) = (a.rep.letters(), b.rep.letters());
                let common = x.iter().zip(y).take_while(|(u, v)| u == v).count();
                x.len() + y.len() - 2 * common
            }
            TreeKind::BassSerre if self.is_segment_model() => self.star_distance(a, b) / 2,
            TreeKind::BassSerre => self.star_distance(a, b),
        }
    }

    fn geodesic(&self, a: &Vertex, b: &Vertex) -> Vec<Vertex> {
        match self.kind {
            TreeKind::Cayley => {
                let p = &self.presentation;
                let w = p.mul(&p.inverse(&a.rep), &b.rep);
                (0..=w.len())
                    .map(|k| Vertex {
                        rep: p.mul(&a.rep, &w.prefix(k)),
                        class: VertexClass::Base,
                    })
                    .collect()
            }
            TreeKind::BassSerre if self.is_segment_model() => self
                .star_path(a, b)
                .into_iter()
                .filter(|v| v.class != VertexClass::Base)
                .collect(),
            TreeKind::BassSerre => self.star_path(a, b),
        }
    }

    fn classify(&self, g: &ReducedWord) -> Result<Classification<Vertex>> {
        if g.is_identity() {
            return Err(Error::Identity);
        }
        match self.kind {
            TreeKind::Cayley => {
                let (core, conj) = self.presentation.cyclic_reduce(g);
                Ok(Classification::Loxodromic {
                    translation_length: core.len(),
                    base: Vertex {
                        rep: conj,
                        class: VertexClass::Base,
                    },
                })
            }
            TreeKind::BassSerre => {
                let (core, conj) = self.syllable_cyclic_reduce(g);
                let syl = syllables(&core);
                let first = core.letters()[0].factor;
                if syl.len() == 1 {
                    return Ok(Classification::Elliptic {
                        fixed: self.canon(conj, VertexClass::Factor(first)),
                    });
                }
                let n = syl.len();
                if self.is_segment_model() {
                    let last = core.letters()[core.len() - 1].factor;
                    Ok(Classification::Loxodromic {
                        translation_length: n,
                        base: self.canon(conj, VertexClass::Factor(last)),
                    })
                } else {
                    Ok(Classification::Loxodromic {
                        translation_length: 2 * n,
                        base: Vertex {
                            rep: conj,
                            class: VertexClass::Base,
                        },
                    })
                }
            }
        }
    }

    fn mul(&self, g: &ReducedWord, h: &ReducedWord) -> ReducedWord {
        self.presentation.mul(g, h)
    }

    fn inverse(&self, g: &ReducedWord) -> ReducedWord {
        self.presentation.inverse(g)
    }

    fn is_identity(&self, g: &ReducedWord) -> bool {
        g.is_identity()
    }

    fn pow(&self, g: &ReducedWord, n: i64) -> ReducedWord {
        self.presentation.pow(g, n)
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let p = &self.presentation;
        let factor_elements = |f: u32| -> Vec<ReducedWord> {
            match p.order(f) {
                Some(m) => (1..m as i64)
                    .map(|e| p.reduce_powers(&[(f, e)]).expect("valid factor"))
                    .collect(),
                None => (-INFINITE_VALENCE_CAP..=INFINITE_VALENCE_CAP)
                    .filter(|&e| e != 0)
                    .map(|e| p.reduce_powers(&[(f, e)]).expect("valid factor"))
                    .collect(),
            }
        };
        match (self.kind, v.class) {
            (TreeKind::Cayley, _) => (0..p.free_rank)
                .flat_map(|i| [false, true].map(|inv| (i, inv)))
                .map(|(i, inv)| {
                    let l = ReducedWord::from_reduced_unchecked(vec![p.gen(i, inv)]);
                    Vertex {
                        rep: p.mul(&v.rep, &l),
                        class: VertexClass::Base,
                    }
                })
                .collect(),
            (TreeKind::BassSerre, VertexClass::Base) => (0..p.num_factors() as u32)
                .map(|f| self.canon(v.rep.clone(), VertexClass::Factor(f)))
                .collect(),
            (TreeKind::BassSerre, VertexClass::Factor(f)) => {
                let mut reps = vec![v.rep.clone()];
                reps.extend(factor_elements(f).iter().map(|s| p.mul(&v.rep, s)));
                if self.is_segment_model() {
                    let other = 1 - f;
                    reps.into_iter()
                        .map(|r| self.canon(r, VertexClass::Factor(other)))
                        .collect()
                } else {
                    reps.into_iter()
                        .map(|rep| Vertex {
                            rep,
                            class: VertexClass::Base,
                        })
                        .collect()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;
    use std::collections::{HashMap, VecDeque};

    fn bfs_dist(t: &TreeModel, a: &Vertex, radius: usize) -> HashMap<Vertex, usize> {
        let mut seen = HashMap::new();
        seen.insert(a.clone(), 0);
        let mut q = VecDeque::from([a.clone()]);
        while let Some(v) = q.pop_front() {
            let d = seen[&v];
            if d == radius {
                continue;
            }
            for n in t.neighbors(&v) {
                if !seen.contains_key(&n) {
                    seen.insert(n.clone(), d + 1);
                    q.push_back(n);
                }
            }
        }
        seen
    }

    #[test]
    fn translation_lengths() {
        let f2 = TreeModel::cayley(GroupPresentation::free(2)).unwrap();
        let p = f2.presentation().clone();
        assert_eq!(f2.translation_length(&parse_word(&p, "abA").unwrap()), 1);
        let q = GroupPresentation::new(0, vec![2, 2]).unwrap();
        let bs = TreeModel::bass_serre(q.clone()).unwrap();
        assert_eq!(bs.translation_length(&parse_word(&q, "s1 s2").unwrap()), 2);
        assert_eq!(bs.translation_length(&parse_word(&q, "s1").unwrap()), 0);
    }

    #[test]
    fn segment_model_distances_match_bfs() {
        let q = GroupPresentation::new(0, vec![2, 3]).unwrap();
        let t = TreeModel::bass_serre(q).unwrap();
        let root = t.root_vertex();
        let ball = bfs_dist(&t, &root, 5);
        for (v, d) in &ball {
            assert_eq!(t.distance(&root, v), *d, "{v:?}");
            let path = t.geodesic(&root, v);
            assert_eq!(path.len(), d + 1);
            for w in path.windows(2) {
                assert!(t.neighbors(&w[0]).contains(&w[1]));
            }
        }
    }

    #[test]
    fn star_model_distances_match_bfs() {
        let q = GroupPresentation::new(0, vec![2, 2, 3]).unwrap();
        let t = TreeModel::bass_serre(q).unwrap();
        let start = t
            .vertex(ReducedWord::identity(), VertexClass::Factor(2))
            .unwrap();
        let ball = bfs_dist(&t, &start, 6);
        for (v, d) in &ball {
            assert_eq!(t.distance(&start, v), *d);
            assert_eq!(t.geodesic(&start, v).len(), d + 1);
        }
    }

    #[test]
    fn cayley_distances_match_bfs() {
        let t = TreeModel::cayley(GroupPresentation::free(2)).unwrap();
        let a = t
            .vertex(parse_word(t.presentation(), "aB").unwrap(), VertexClass::Base)
            .unwrap();
        for (v, d) in bfs_dist(&t, &a, 4) {
            assert_eq!(t.distance(&a, &v), d);
        }
    }

    #[test]
    fn base_vertex_is_minimally_displaced() {
        let q = GroupPresentation::new(1, vec![2, 3]).unwrap();
        let t = TreeModel::bass_serre(q.clone()).unwrap();
        for s in ["s1 s2", "a s1 a s2^2", "s2 a s1 s2 A", "a s2 A"] {
            let g = parse_word(&q, s).unwrap();
            match t.classify(&g).unwrap() {
                Classification::Loxodromic {
                    translation_length,
                    base,
                } => assert_eq!(t.distance(&base, &t.act(&g, &base)), translation_length),
                Classification::Elliptic { fixed } => assert_eq!(t.act(&g, &fixed), fixed),
            }
        }
    }

    #[test]
    fn model_preconditions() {
        assert!(TreeModel::cayley(GroupPresentation::new(1, vec![2]).unwrap()).is_err());
        assert!(TreeModel::bass_serre(GroupPresentation::new(0, vec![2]).unwrap()).is_err());
        let t = TreeModel::cayley(GroupPresentation::free(2)).unwrap();
        assert!(t.char_set(&ReducedWord::identity()).is_err());
    }
}
