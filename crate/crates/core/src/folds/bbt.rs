use super::cover::{distance_to_geodesic, geodesic_edges, image_point, CoverPoint, GraphCover};
use super::{push_tight, GraphMorphism, Length, OEdge};
use crate::error::Result;
use crate::free_group::{format_word, ReducedWord};
use crate::report::LemmaReport;
use crate::tree_geometry::{count_fundamental_domains, DomainCount};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BBT: &str = "bbt_bound";
pub const COLLAPSE_COUNTING: &str = "collapse_counting";

/// Largest backtracking found, with the triple that attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbtEstimate {
    pub value: Length,
    pub bound: Length,
    pub triples: usize,
    pub witness: Option<(Vec<OEdge>, Vec<OEdge>, CoverPoint)>,
}

/// max over z ∈ [x, y] of d(f(z), [f(x), f(y)]) for cover vertices x, y.
/// The distance is piecewise linear in z with breaks only at source vertices
/// and at preimages of target vertices, so those points give the exact
/// maximum.
pub fn bbt_triple(f: &GraphMorphism, x: &[OEdge], y: &[OEdge]) -> (Length, CoverPoint) {
    let fx = CoverPoint::vertex(f.image_path(x));
    let fy = CoverPoint::vertex(f.image_path(y));
    let mut best = (Length::zero(), CoverPoint::vertex(x.to_vec()));
    let mut consider = |z: CoverPoint| {
        let fz = image_point(f, &z);
        let d = distance_to_geodesic(&f.target, &fz, &fx, &fy);
        if d > best.0 {
            best = (d, z);
        }
    };
    for (pu, d) in geodesic_edges(x, y) {
        consider(CoverPoint::vertex(pu.clone()));
        let img = f.image_of(d);
        if img.len() >= 2 {
            let total = f.target.path_length(&img);
            let len = f.source.length(d);
            let mut acc = Length::zero();
            for &e in &img[..img.len() - 1] {
                acc += f.target.length(e);
                consider(CoverPoint::on_edge(&f.source, pu.clone(), d, acc * len / total));
            }
        }
    }
    consider(CoverPoint::vertex(y.to_vec()));
    best
}

fn random_path(f: &GraphMorphism, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<OEdge> {
    let g = &f.source;
    let n = rng.gen_range(0..=max_len);
    let mut path: Vec<OEdge> = Vec::with_capacity(n);
    let mut v = g.base;
    while path.len() < n {
        let dirs: Vec<OEdge> = g
            .directions(v)
            .into_iter()
            .filter(|&d| path.last() != Some(&d.inv()))
            .collect();
        if dirs.is_empty() {
            break;
        }
        let d = dirs[rng.gen_range(0..dirs.len())];
        path.push(d);
        v = g.terminus(d);
    }
    path
}

/// Triples through every turn whose two directions have images starting
/// with the same edge, extended by up to one more edge on each side.
pub fn fold_turn_witnesses(f: &GraphMorphism) -> Vec<(Vec<OEdge>, Vec<OEdge>)> {
    let g = &f.source;
    let mut out = Vec::new();
    for v in 0..g.num_vertices {
        let to_v = g.tree_path(v);
        let dirs = g.directions(v);
        for (i, &d1) in dirs.iter().enumerate() {
            for &d2 in &dirs[i + 1..] {
                let (i1, i2) = (f.image_of(d1), f.image_of(d2));
                if i1.is_empty() || i2.is_empty() || i1[0] != i2[0] {
                    continue;
                }
                let ext = |d: OEdge| {
                    let mut v = vec![vec![d]];
                    for e in g.directions(g.terminus(d)) {
                        if e != d.inv() {
                            v.push(vec![d, e]);
                        }
                    }
                    v
                };
                for a in ext(d1) {
                    for b in ext(d2) {
                        let mut x = to_v.clone();
                        a.iter().for_each(|&d| push_tight(&mut x, d));
                        let mut y = to_v.clone();
                        b.iter().for_each(|&d| push_tight(&mut y, d));
                        out.push((x, y));
                    }
                }
            }
        }
    }
    out
}

/// Empirical BBT over `samples` random vertex pairs (paths of at most
/// `length_budget` edges) plus all fold-turn witnesses.
pub fn bbt_empirical(f: &GraphMorphism, samples: usize, length_budget: usize, seed: u64) -> BbtEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = BbtEstimate {
        value: Length::zero(),
        bound: f.bbt_bound(),
        triples: 0,
        witness: None,
    };
    let mut pairs: Vec<(Vec<OEdge>, Vec<OEdge>)> = (0..samples)
        .map(|_| (random_path(f, &mut rng, length_budget), random_path(f, &mut rng, length_budget)))
        .collect();
    pairs.extend(fold_turn_witnesses(f));
    for (x, y) in pairs {
        est.triples += 1;
        let (d, z) = bbt_triple(f, &x, &y);
        if d > est.value {
            est.value = d;
            est.witness = Some((x, y, z));
        }
    }
    est
}

/// Report for one morphism: empirical BBT against the bound.
pub fn bbt_report(f: &GraphMorphism, samples: usize, length_budget: usize, seed: u64) -> LemmaReport {
    let est = bbt_empirical(f, samples, length_budget, seed);
    let mut r = LemmaReport::new(BBT)
        .input("samples", samples)
        .input("length_budget", length_budget)
        .input("seed", seed)
        .quantity("bbt_empirical", est.value.to_string())
        .quantity("bbt_bound", est.bound.to_string())
        .quantity("lipschitz", f.lipschitz_constant().to_string())
        .quantity("volume", f.source.volume().to_string())
        .quantity("triples", est.triples);
    if let Some((x, y, z)) = &est.witness {
        let fmt = |p: &[OEdge]| p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
        r = r
            .witness("x", fmt(x))
            .witness("y", fmt(y))
            .witness("z_path", fmt(&z.path))
            .witness(
                "z_offset",
                z.along.map_or("0".to_string(), |(d, t)| format!("{d} {t}")),
            );
    }
    r.check(est.value <= est.bound, "empirical backtracking exceeds the bound")
}

/// n_S ≤ n_T ≤ n_S + 2 for a single-edge collapse f, with n the number of
/// fundamental domains of Axis(g) inside Axis(g) ∩ Axis(h) (unit lengths).
pub fn collapse_counting_check(f: &GraphMorphism, g: &ReducedWord, h: &ReducedWord) -> Result<LemmaReport> {
    let p = f.source.free_group();
    let mut r = LemmaReport::new(COLLAPSE_COUNTING)
        .input("g", format_word(&p, g))
        .input("h", format_word(&p, h));
    let collapsed = f.edge_map.iter().filter(|e| e.is_empty()).count();
    if collapsed != 1 || f.edge_map.iter().any(|e| e.len() > 1) {
        return Ok(r.skip("morphism is not a single-edge collapse"));
    }
    if g.is_identity() || h.is_identity() {
        return Ok(r.skip("identity element"));
    }
    let cs = GraphCover::new(&f.source);
    let ct = GraphCover::new(&f.target);
    let ns = count_fundamental_domains(&cs, g, h)?;
    let nt = count_fundamental_domains(&ct, g, h)?;
    let (DomainCount::Finite(ns), DomainCount::Finite(nt)) = (ns, nt) else {
        return Ok(r.skip("common axis; both counts unbounded"));
    };
    r = r.quantity("n_S", ns).quantity("n_T", nt);
    Ok(r.check(ns <= nt && nt <= ns + 2, "fundamental-domain counts out of range"))
}

#[cfg(test)]
mod tests {
    use super::super::{random::single_fold_witness, MarkedGraph};
    use super::*;

    #[test]
    fn identity_has_no_backtracking() {
        let r = MarkedGraph::unit_rose(2).unwrap();
        let est = bbt_empirical(&GraphMorphism::identity(&r), 200, 6, 1);
        assert_eq!(est.value, Length::zero());
        assert_eq!(est.bound, Length::from_integer(4));
    }

    #[test]
    fn single_fold_attains_edge_length() {
        let l = Length::new(3, 2);
        let f = single_fold_witness(l).unwrap();
        let est = bbt_empirical(&f, 300, 6, 2);
        assert_eq!(est.value, l);
        let (d, _) = bbt_triple(&f, &[OEdge::fwd(0)], &[OEdge::fwd(1)]);
        assert_eq!(d, l);
    }
}
