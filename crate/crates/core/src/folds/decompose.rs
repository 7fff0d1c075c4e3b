use super::{push_tight, reverse_path, Edge, GraphMorphism, Length, MarkedGraph, OEdge};
use crate::error::{Error, Result};
use crate::report::LemmaReport;
use num_traits::Zero;
use serde::Serialize;

/// Elementary moves. `Rescale` only occurs in the prefix and lengthens an
/// edge; `Collapse` shortens an edge, to nothing when `length` is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoldMove {
    Rescale { edge: usize, length: Length },
    /// Splits the edge at distance `at` from its tail. The tail piece keeps
    /// the index; the head piece and the new vertex get the next free indices.
    Subdivide { edge: usize, at: Length },
    Collapse { edge: usize, length: Length },
    /// Identifies `second` with `first`; both leave the same vertex and have
    /// the same length.
    Fold { first: OEdge, second: OEdge },
}

/// Final isometry from the folded graph onto the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<OEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSequence {
    pub moves: Vec<FoldMove>,
    pub identification: Identification,
    /// Number of moves before the first collapse or fold.
    pub prefix_len: usize,
    /// Edge count once the prefix has been applied.
    pub subdivided_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct MoveCounts {
    pub rescale: usize,
    pub subdivide: usize,
    pub collapse: usize,
    pub fold: usize,
}

impl FoldSequence {
    pub fn counts(&self) -> MoveCounts {
        let mut c = MoveCounts::default();
        for m in &self.moves {
            match m {
                FoldMove::Rescale { .. } => c.rescale += 1,
                FoldMove::Subdivide { .. } => c.subdivide += 1,
                FoldMove::Collapse { .. } => c.collapse += 1,
                FoldMove::Fold { .. } => c.fold += 1,
            }
        }
        c
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Rebuilds `g` after deleting `remove_edge` and merging vertex `merge.1`
/// into `merge.0`. `removed_image` is the path (in old indices) that the
/// deleted edge maps to. Returns the new graph and the maps on vertices and
/// edges.
fn rebuild(
    g: &MarkedGraph,
    remove_edge: usize,
    merge: Option<(usize, usize)>,
    removed_image: &[OEdge],
) -> Result<(MarkedGraph, Vec<usize>, Vec<Vec<OEdge>>)> {
    let n = g.num_vertices;
    let vmap: Vec<usize> = match merge {
        None => (0..n).collect(),
        Some((a, b)) => {
            let (keep, gone) = (a.min(b), a.max(b));
            (0..n)
                .map(|v| {
                    let v = if v == gone { keep } else { v };
                    if v > gone {
                        v - 1
                    } else {
                        v
                    }
                })
                .collect()
        }
    };
    let new_n = if merge.is_some() { n - 1 } else { n };
    let renum = |i: usize| if i > remove_edge { i - 1 } else { i };
    let mut edges = Vec::with_capacity(g.edges.len() - 1);
    for (i, e) in g.edges.iter().enumerate() {
        if i != remove_edge {
            edges.push(Edge {
                tail: vmap[e.tail],
                head: vmap[e.head],
                length: e.length,
            });
        }
    }
    let emap: Vec<Vec<OEdge>> = (0..g.edges.len())
        .map(|i| {
            let src: Vec<OEdge> = if i == remove_edge {
                removed_image.to_vec()
            } else {
                vec![OEdge::fwd(i)]
            };
            src.iter()
                .map(|d| OEdge {
                    edge: renum(d.edge),
                    rev: d.rev,
                })
                .collect()
        })
        .collect();
    let ng = push_marking(g, new_n, edges, vmap[g.base], &emap)?;
    Ok((ng, vmap, emap))
}

fn push_marking(
    g: &MarkedGraph,
    num_vertices: usize,
    edges: Vec<Edge>,
    base: usize,
    emap: &[Vec<OEdge>],
) -> Result<MarkedGraph> {
    let image = |d: OEdge| {
        if d.rev {
            reverse_path(&emap[d.edge])
        } else {
            emap[d.edge].clone()
        }
    };
    let marking = g
        .marking
        .iter()
        .map(|m| {
            let mut out = Vec::new();
            for &d in m {
                image(d).into_iter().for_each(|x| push_tight(&mut out, x));
            }
            out
        })
        .collect();
    MarkedGraph::new(num_vertices, edges, base, marking)
}

/// Applies one move, returning the new graph (with pushed-forward marking)
/// and the elementary map on vertices and edges.
pub fn apply_move(g: &MarkedGraph, m: &FoldMove) -> Result<(MarkedGraph, Vec<usize>, Vec<Vec<OEdge>>)> {
    let check_edge = |e: usize| {
        if e < g.edges.len() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("edge {e} out of range")))
        }
    };
    let id_maps = || {
        (
            (0..g.num_vertices).collect::<Vec<_>>(),
            (0..g.edges.len()).map(|i| vec![OEdge::fwd(i)]).collect::<Vec<_>>(),
        )
    };
    match *m {
        FoldMove::Rescale { edge, length } | FoldMove::Collapse { edge, length } if !length.is_zero() => {
            check_edge(edge)?;
            let cur = g.edges[edge].length;
            let ok = match m {
                FoldMove::Rescale { .. } => length > cur,
                _ => length < cur,
            };
            if !ok || length < Length::zero() {
                return Err(Error::InvalidParameter(format!("bad new length {length} for edge {edge}")));
            }
            let mut ng = g.clone();
            ng.edges[edge].length = length;
            let (v, e) = id_maps();
            Ok((ng, v, e))
        }
        FoldMove::Rescale { .. } => Err(Error::InvalidParameter("rescale to zero length".into())),
        FoldMove::Collapse { edge, .. } => {
            check_edge(edge)?;
            let e = &g.edges[edge];
            if e.tail == e.head {
                return Err(Error::InvalidParameter(format!("edge {edge} is a loop")));
            }
            rebuild(g, edge, Some((e.tail, e.head)), &[])
        }
        FoldMove::Subdivide { edge, at } => {
            check_edge(edge)?;
            let e = g.edges[edge].clone();
            if at <= Length::zero() || at >= e.length {
                return Err(Error::InvalidParameter(format!("subdivision point {at} outside edge {edge}")));
            }
            let nv = g.num_vertices;
            let k = g.edges.len();
            let mut edges = g.edges.clone();
            edges[edge] = Edge {
                tail: e.tail,
                head: nv,
                length: at,
            };
            edges.push(Edge {
                tail: nv,
                head: e.head,
                length: e.length - at,
            });
            let (vmap, mut emap) = id_maps();
            emap[edge] = vec![OEdge::fwd(edge), OEdge::fwd(k)];
            let ng = push_marking(g, nv + 1, edges, g.base, &emap)?;
            Ok((ng, vmap, emap))
        }
        FoldMove::Fold { first, second } => {
            check_edge(first.edge)?;
            check_edge(second.edge)?;
            if first.edge == second.edge {
                return Err(Error::InvalidParameter("cannot fold an edge with itself".into()));
            }
            if g.origin(first) != g.origin(second) {
                return Err(Error::InvalidParameter("folded edges do not share their origin".into()));
            }
            if g.length(first) != g.length(second) {
                return Err(Error::InvalidParameter("folded edges have different lengths".into()));
            }
            let (t1, t2) = (g.terminus(first), g.terminus(second));
            if t1 == t2 {
                return Err(Error::InconsistentMarking(
                    "fold would identify a closed loop; the map is not injective on fundamental groups".into(),
                ));
            }
            let img = if second.rev { first.inv() } else { first };
            rebuild(g, second.edge, Some((t1, t2)), &[img])
        }
    }
}

/// Stallings decomposition of a morphism: rescale edges that are stretched,
/// subdivide at preimages of target vertices, collapse edges crushed to a
/// point and shorten the rest, fold until the map is an immersion, and
/// check that the remainder is an isometry.
pub fn fold_decompose(f: &GraphMorphism) -> Result<FoldSequence> {
    // Re-validate the morphism; inconsistent markings surface here.
    let f = GraphMorphism::new(f.source.clone(), f.target.clone(), f.vertex_map.clone(), f.edge_map.clone())?;
    let t = &f.target;
    let mut g = f.source.clone();
    let mut phi = f.edge_map.clone();
    let mut pv = f.vertex_map.clone();
    let mut moves = Vec::new();

    let step = |g: &mut MarkedGraph, m: FoldMove, moves: &mut Vec<FoldMove>| -> Result<(Vec<usize>, Vec<Vec<OEdge>>)> {
        let (ng, vmap, emap) = apply_move(g, &m)?;
        *g = ng;
        moves.push(m);
        Ok((vmap, emap))
    };

    let images: Vec<Length> = phi.iter().map(|d| t.path_length(d)).collect();
    for (i, img) in images.into_iter().enumerate() {
        if img > g.edges[i].length {
            step(&mut g, FoldMove::Rescale { edge: i, length: img }, &mut moves)?;
        }
    }
    let mut i = 0;
    while i < g.edges.len() {
        if phi[i].len() >= 2 {
            let first = phi[i][0];
            let at = g.edges[i].length * t.length(first) / t.path_length(&phi[i]);
            step(&mut g, FoldMove::Subdivide { edge: i, at }, &mut moves)?;
            let rest = phi[i].split_off(1);
            phi.push(rest);
            pv.push(t.terminus(first));
        }
        i += 1;
    }
    let prefix_len = moves.len();
    let subdivided_edges = g.edges.len();

    while let Some(i) = (0..g.edges.len()).find(|&i| phi[i].is_empty()) {
        let e = &g.edges[i];
        if e.tail == e.head {
            return Err(Error::InconsistentMarking(format!(
                "loop edge {i} is mapped to a point; the map is not a homotopy equivalence"
            )));
        }
        let (vmap, emap) = step(&mut g, FoldMove::Collapse { edge: i, length: Length::zero() }, &mut moves)?;
        let surviving = surviving_images(&emap, i);
        remap_collapse(&mut phi, &mut pv, &vmap, &surviving, g.num_vertices);
    }
    let firsts: Vec<Length> = phi[..g.edges.len()].iter().map(|d| t.length(d[0])).collect();
    for (i, target_len) in firsts.into_iter().enumerate() {
        if g.edges[i].length > target_len {
            step(&mut g, FoldMove::Collapse { edge: i, length: target_len }, &mut moves)?;
        }
    }

    loop {
        let mut found = None;
        'search: for v in 0..g.num_vertices {
            let dirs = g.directions(v);
            for a in 0..dirs.len() {
                for b in a + 1..dirs.len() {
                    if dirs[a].edge != dirs[b].edge && image(&phi, dirs[a]) == image(&phi, dirs[b]) {
                        found = Some((dirs[a], dirs[b]));
                        break 'search;
                    }
                }
            }
        }
        let Some((first, second)) = found else { break };
        let (vmap, emap) = step(&mut g, FoldMove::Fold { first, second }, &mut moves)?;
        let surviving = surviving_images(&emap, second.edge);
        remap_collapse(&mut phi, &mut pv, &vmap, &surviving, g.num_vertices);
    }

    let residual = GraphMorphism {
        source: g,
        target: t.clone(),
        vertex_map: pv,
        edge_map: phi,
    };
    if !residual.is_isometry() {
        return Err(Error::InconsistentMarking(
            "folded map is not an isomorphism; the morphism is not a homotopy equivalence".into(),
        ));
    }
    Ok(FoldSequence {
        moves,
        identification: Identification {
            vertex_map: residual.vertex_map,
            edge_map: residual.edge_map.iter().map(|p| p[0]).collect(),
        },
        prefix_len,
        subdivided_edges,
    })
}

fn image(phi: &[Vec<OEdge>], d: OEdge) -> Vec<OEdge> {
    if d.rev {
        reverse_path(&phi[d.edge])
    } else {
        phi[d.edge].clone()
    }
}

/// For each old edge other than `removed`, its new index.
fn surviving_images(emap: &[Vec<OEdge>], removed: usize) -> Vec<Option<usize>> {
    emap.iter()
        .enumerate()
        .map(|(i, p)| if i == removed { None } else { Some(p[0].edge) })
        .collect()
}

fn remap_collapse(
    phi: &mut Vec<Vec<OEdge>>,
    pv: &mut Vec<usize>,
    vmap: &[usize],
    surviving: &[Option<usize>],
    n: usize,
) {
    let mut new_pv = vec![0; n];
    for (old, &new) in vmap.iter().enumerate() {
        new_pv[new] = pv[old];
    }
    let mut new_phi = vec![Vec::new(); surviving.iter().flatten().count()];
    for (old, s) in surviving.iter().enumerate() {
        if let Some(new) = s {
            new_phi[*new] = std::mem::take(&mut phi[old]);
        }
    }
    *phi = new_phi;
    *pv = new_pv;
}

/// Replays the moves from `source`, returning every intermediate graph
/// (the source first).
pub fn replay(source: &MarkedGraph, seq: &FoldSequence) -> Result<Vec<MarkedGraph>> {
    let mut out = vec![source.clone()];
    for m in &seq.moves {
        let (ng, _, _) = apply_move(out.last().expect("nonempty"), m)?;
        out.push(ng);
    }
    Ok(out)
}

/// Replays the decomposition and checks that the identification carries the
/// resulting marking exactly onto the target marking.
pub fn verify_recomposition(f: &GraphMorphism, seq: &FoldSequence) -> Result<bool> {
    let graphs = replay(&f.source, seq)?;
    let last = graphs.last().expect("nonempty").clone();
    let ident = &seq.identification;
    if ident.vertex_map.len() != last.num_vertices || ident.edge_map.len() != last.edges.len() {
        return Ok(false);
    }
    let m = GraphMorphism::new(
        last,
        f.target.clone(),
        ident.vertex_map.clone(),
        ident.edge_map.iter().map(|&d| vec![d]).collect(),
    );
    match m {
        Ok(m) => Ok(m.is_isometry()),
        Err(Error::InconsistentMarking(_)) | Err(Error::InvalidGraph(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

pub const FOLD_DECOMPOSITION: &str = "fold_decomposition";

/// Decomposes `f`, replays the moves and checks that the markings are
/// reproduced exactly and that no move kind occurs more often than the
/// number of edges after subdivision.
pub fn decomposition_report(f: &GraphMorphism) -> Result<LemmaReport> {
    let seq = fold_decompose(f)?;
    let c = seq.counts();
    let exact = verify_recomposition(f, &seq)?;
    let budget = seq.subdivided_edges;
    let within = [c.rescale, c.subdivide, c.collapse, c.fold].iter().all(|&k| k <= budget);
    Ok(LemmaReport::new(FOLD_DECOMPOSITION)
        .input("source_edges", f.source.edges.len())
        .input("target_edges", f.target.edges.len())
        .quantity("rescale", c.rescale)
        .quantity("subdivide", c.subdivide)
        .quantity("collapse", c.collapse)
        .quantity("fold", c.fold)
        .quantity("subdivided_edges", budget)
        .quantity("recomposition_exact", exact)
        .check(exact, "replayed moves do not reproduce the target marking")
        .check(within, "a move kind exceeds the subdivided-edge budget"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Length {
        Length::new(n, d)
    }

    #[test]
    fn isometry_needs_no_moves() {
        let r = MarkedGraph::unit_rose(2).unwrap();
        let s = fold_decompose(&GraphMorphism::identity(&r)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn petals_fold_together() {
        // a ↦ c, b ↦ c·d on R_2 → R_2 with petals c, d: the folds identify the
        // initial segment of b with a.
        let r = MarkedGraph::unit_rose(2).unwrap();
        let mut target = r.clone();
        target.marking = vec![vec![OEdge::fwd(0)], vec![OEdge::fwd(0), OEdge::fwd(1)]];
        let f = GraphMorphism::new(r, target, vec![0], vec![vec![OEdge::fwd(0)], vec![OEdge::fwd(0), OEdge::fwd(1)]])
            .unwrap();
        let s = fold_decompose(&f).unwrap();
        let c = s.counts();
        assert_eq!((c.rescale, c.subdivide, c.fold), (1, 1, 1));
        assert!(verify_recomposition(&f, &s).unwrap());
    }

    #[test]
    fn half_speed_petal() {
        // Petal of length 2 cut in two, mapped onto a unit petal.
        let src = MarkedGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, length: q(1, 1) },
                Edge { tail: 1, head: 0, length: q(1, 1) },
                Edge { tail: 0, head: 0, length: q(1, 1) },
            ],
            0,
            vec![vec![OEdge::fwd(0), OEdge::fwd(1)], vec![OEdge::fwd(2)]],
        )
        .unwrap();
        let tgt = MarkedGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, length: q(1, 2) },
                Edge { tail: 1, head: 0, length: q(1, 2) },
                Edge { tail: 0, head: 0, length: q(1, 1) },
            ],
            0,
            vec![vec![OEdge::fwd(0), OEdge::fwd(1)], vec![OEdge::fwd(2)]],
        )
        .unwrap();
        let f = GraphMorphism::new(src, tgt, vec![0, 1], (0..3).map(|i| vec![OEdge::fwd(i)]).collect()).unwrap();
        let s = fold_decompose(&f).unwrap();
        assert_eq!(s.counts().collapse, 2);
        assert_eq!(s.counts().fold, 0);
        assert!(verify_recomposition(&f, &s).unwrap());
    }

    #[test]
    fn rejects_bad_moves() {
        let r = MarkedGraph::unit_rose(2).unwrap();
        assert!(apply_move(&r, &FoldMove::Collapse { edge: 0, length: Length::zero() }).is_err());
        assert!(apply_move(&r, &FoldMove::Subdivide { edge: 0, at: q(1, 1) }).is_err());
        assert!(apply_move(&r, &FoldMove::Fold { first: OEdge::fwd(0), second: OEdge::fwd(1) }).is_err());
    }
}
