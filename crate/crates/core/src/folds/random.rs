//! Random morphisms, built by running fold moves backwards from a target.

use super::decompose::{apply_move, FoldMove};
use super::{tighten, Edge, GraphMorphism, Length, MarkedGraph, OEdge};
use crate::error::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_EDGES: usize = 6;

fn random_length(rng: &mut ChaCha8Rng) -> Length {
    const CHOICES: [(i64, i64); 6] = [(1, 2), (1, 1), (3, 2), (2, 1), (5, 2), (3, 1)];
    let (n, d) = CHOICES[rng.gen_range(0..CHOICES.len())];
    Length::new(n, d)
}

fn edge(tail: usize, head: usize, length: Length) -> Edge {
    Edge { tail, head, length }
}

fn with_tree_marking(num_vertices: usize, edges: Vec<Edge>, base: usize) -> Result<MarkedGraph> {
    let mut g = MarkedGraph {
        num_vertices,
        edges,
        base,
        marking: Vec::new(),
    };
    g.marking = g.spanning_tree_basis()?;
    g.validate()?;
    Ok(g)
}

/// Rose, theta or barbell in rank 2; rose or a loop plus theta in rank 3.
fn random_target(rng: &mut ChaCha8Rng) -> Result<MarkedGraph> {
    let rank = rng.gen_range(2..=3);
    let shape = rng.gen_range(0..3);
    let mut l = || random_length(rng);
    let (n, edges) = match (rank, shape) {
        (2, 0) => (1, vec![edge(0, 0, l()), edge(0, 0, l())]),
        (2, 1) => (2, vec![edge(0, 1, l()), edge(0, 1, l()), edge(0, 1, l())]),
        (2, _) => (2, vec![edge(0, 0, l()), edge(0, 1, l()), edge(1, 1, l())]),
        (_, 0) => (1, vec![edge(0, 0, l()), edge(0, 0, l()), edge(0, 0, l())]),
        _ => (2, vec![edge(0, 0, l()), edge(0, 1, l()), edge(0, 1, l()), edge(0, 1, l())]),
    };
    with_tree_marking(n, edges, 0)
}

/// Source graph under construction with its map to the fixed target.
struct Builder {
    num_vertices: usize,
    edges: Vec<Edge>,
    base: usize,
    vmap: Vec<usize>,
    emap: Vec<Vec<OEdge>>,
}

impl Builder {
    fn origin(&self, d: OEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.rev {
            e.head
        } else {
            e.tail
        }
    }

    fn directions(&self, v: usize) -> Vec<OEdge> {
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

    fn move_direction(&mut self, d: OEdge, to: usize) {
        let e = &mut self.edges[d.edge];
        if d.rev {
            e.head = to;
        } else {
            e.tail = to;
        }
    }

    fn image(&self, d: OEdge) -> Vec<OEdge> {
        let p = &self.emap[d.edge];
        if d.rev {
            super::reverse_path(p)
        } else {
            p.clone()
        }
    }

    fn new_vertex(&mut self, image: usize) -> usize {
        self.vmap.push(image);
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    /// Splits the far end of a non-loop edge, doubling the edge.
    fn unfold(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let mut cands = Vec::new();
        for i in 0..self.edges.len() {
            for d in [OEdge::fwd(i), OEdge::bwd(i)] {
                let w = self.origin(d.inv());
                if self.origin(d) != w && self.directions(w).len() >= 3 {
                    cands.push(d);
                }
            }
        }
        let Some(&d) = cands.choose(rng) else { return false };
        let (v, w) = (self.origin(d), self.origin(d.inv()));
        let mut others: Vec<OEdge> = self.directions(w).into_iter().filter(|&x| x != d.inv()).collect();
        others.shuffle(rng);
        let cut = rng.gen_range(1..others.len());
        let w2 = self.new_vertex(self.vmap[w]);
        for &x in &others[cut..] {
            self.move_direction(x, w2);
        }
        let img = self.image(d);
        self.edges.push(edge(v, w2, self.edges[d.edge].length));
        self.emap.push(img);
        true
    }

    /// Blows a vertex up into an edge mapped to a point.
    fn uncollapse(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let cands: Vec<usize> = (0..self.num_vertices).filter(|&v| self.directions(v).len() >= 3).collect();
        let Some(&v) = cands.choose(rng) else { return false };
        let mut dirs = self.directions(v);
        dirs.shuffle(rng);
        let k = rng.gen_range(2..dirs.len());
        let v2 = self.new_vertex(self.vmap[v]);
        for &x in &dirs[..k] {
            self.move_direction(x, v2);
        }
        let l = random_length(rng);
        self.edges.push(edge(v, v2, l));
        self.emap.push(Vec::new());
        true
    }

    /// Merges the two edges at a valence-two vertex when the joined image
    /// stays tight.
    fn unsubdivide(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let mut cands = Vec::new();
        for u in 0..self.num_vertices {
            let dirs = self.directions(u);
            if u == self.base || dirs.len() != 2 || dirs[0].edge == dirs[1].edge {
                continue;
            }
            let (a, b) = (dirs[0].inv(), dirs[1]);
            let mut img = self.image(a);
            img.extend(self.image(b));
            if tighten(&img) == img {
                cands.push((u, a, b, img));
            }
        }
        let Some((u, a, b, img)) = cands.choose(rng).cloned() else { return false };
        let (from, to) = (self.origin(a), self.origin(b.inv()));
        let length = self.edges[a.edge].length + self.edges[b.edge].length;
        self.edges[a.edge] = edge(from, to, length);
        self.emap[a.edge] = img;
        self.edges.remove(b.edge);
        self.emap.remove(b.edge);
        self.vmap.remove(u);
        self.num_vertices -= 1;
        for e in &mut self.edges {
            for x in [&mut e.tail, &mut e.head] {
                if *x > u {
                    *x -= 1;
                }
            }
        }
        if self.base > u {
            self.base -= 1;
        }
        true
    }

    fn relength(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let i = rng.gen_range(0..self.edges.len());
        self.edges[i].length = random_length(rng);
        true
    }
}

/// A random morphism between marked graphs of rank 2 or 3 with at most six
/// source edges, obtained from a random target by undoing folds, collapses
/// and subdivisions and by changing source lengths.
pub fn random_morphism(seed: u64) -> Result<GraphMorphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = random_target(&mut rng)?;
    let mut b = Builder {
        num_vertices: target.num_vertices,
        edges: target.edges.clone(),
        base: target.base,
        vmap: (0..target.num_vertices).collect(),
        emap: (0..target.edges.len()).map(|i| vec![OEdge::fwd(i)]).collect(),
    };
    let steps = rng.gen_range(2..=7);
    for _ in 0..steps {
        for _attempt in 0..8 {
            let room = b.edges.len() < MAX_EDGES;
            let done = match rng.gen_range(0..4) {
                0 if room => b.unfold(&mut rng),
                1 if room => b.uncollapse(&mut rng),
                2 => b.unsubdivide(&mut rng),
                3 => b.relength(&mut rng),
                _ => false,
            };
            if done {
                break;
            }
        }
    }
    let source = with_tree_marking(b.num_vertices, b.edges, b.base)?;
    let image_marking = source
        .marking
        .iter()
        .map(|m| {
            let mut out = Vec::new();
            for &d in m {
                let p = &b.emap[d.edge];
                let img = if d.rev { super::reverse_path(p) } else { p.clone() };
                out.extend(img);
            }
            tighten(&out)
        })
        .collect();
    let target = MarkedGraph::new(target.num_vertices, target.edges, target.base, image_marking)?;
    GraphMorphism::new(source, target, b.vmap, b.emap)
}

/// The fold of two edges of length `l` leaving the basepoint, whose
/// backtracking constant is exactly `l`.
pub fn single_fold_witness(l: Length) -> Result<GraphMorphism> {
    let one = Length::from_integer(1);
    let source = with_tree_marking(3, vec![edge(0, 1, l), edge(0, 2, l), edge(1, 2, one), edge(0, 0, one)], 0)?;
    let target_edges = vec![edge(0, 1, l), edge(1, 1, one), edge(0, 0, one)];
    let edge_map = vec![vec![OEdge::fwd(0)], vec![OEdge::fwd(0)], vec![OEdge::fwd(1)], vec![OEdge::fwd(2)]];
    let marking = source
        .marking
        .iter()
        .map(|m| {
            let mut out = Vec::new();
            for &d in m {
                out.push(if d.rev { edge_map[d.edge][0].inv() } else { edge_map[d.edge][0] });
            }
            tighten(&out)
        })
        .collect();
    let target = MarkedGraph::new(2, target_edges, 0, marking)?;
    GraphMorphism::new(source, target, vec![0, 1, 1], edge_map)
}

/// Collapse of one non-loop edge of a random marked graph.
pub fn collapse_morphism(seed: u64) -> Result<GraphMorphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f_6c6c);
    let mut source = random_morphism(seed)?.source;
    let mut non_loops: Vec<usize> = (0..source.edges.len())
        .filter(|&i| source.edges[i].tail != source.edges[i].head)
        .collect();
    if non_loops.is_empty() {
        let l = [random_length(&mut rng), random_length(&mut rng), random_length(&mut rng)];
        source = MarkedGraph::theta(l)?;
        non_loops = vec![0, 1, 2];
    }
    let e = *non_loops.choose(&mut rng).expect("nonempty");
    let (target, vmap, emap) = apply_move(
        &source,
        &FoldMove::Collapse {
            edge: e,
            length: Length::from_integer(0),
        },
    )?;
    GraphMorphism::new(source, target, vmap, emap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_morphisms_are_valid_and_varied() {
        let mut non_iso = 0;
        for seed in 0..100 {
            let f = random_morphism(seed).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert!(f.source.edges.len() <= MAX_EDGES);
            assert!((2..=3).contains(&f.source.rank()));
            non_iso += usize::from(!f.is_isometry());
        }
        assert!(non_iso > 50, "only {non_iso} non-isometries");
    }

    #[test]
    fn collapse_morphisms_collapse_one_edge() {
        for seed in 0..20 {
            let f = collapse_morphism(seed).unwrap();
            assert_eq!(f.edge_map.iter().filter(|p| p.is_empty()).count(), 1);
            assert_eq!(f.target.edges.len() + 1, f.source.edges.len());
        }
    }
}
