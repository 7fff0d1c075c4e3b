use super::{Automorphism, GroupPresentation, Move, ReducedWord};
use std::collections::HashSet;

/// Right transvections x_i ↦ x_i x_j^(±1), i ≠ j, over the free generators.
pub fn right_transvections(p: &GroupPresentation) -> Vec<Move> {
    let n = p.free_rank as u32;
    let mut out = Vec::new();
    for target in 0..n {
        for by in 0..n {
            if by == target {
                continue;
            }
            for inverse in [false, true] {
                out.push(Move::RightMul {
                    target,
                    by,
                    inverse,
                });
            }
        }
    }
    out
}

/// All compositions of at most `max_len` right transvections that never place
/// a move next to its inverse, deduplicated by generator images. Order is by
/// length, then by move-index sequence; the first occurrence of each image
/// tuple is kept.
pub fn nielsen_pool(p: &GroupPresentation, max_len: usize) -> Vec<Automorphism> {
    let gens = right_transvections(p);
    let inverse_idx: Vec<usize> = gens
        .iter()
        .map(|m| {
            let inv = m.inverse(p);
            gens.iter().position(|x| *x == inv).expect("closed under inverse")
        })
        .collect();
    let mut seen: HashSet<Vec<ReducedWord>> = HashSet::new();
    let mut pool = Vec::new();
    let id = Automorphism::identity();
    seen.insert(id.images(p).images);
    pool.push(id);
    let mut frontier: Vec<(Vec<usize>, Vec<ReducedWord>)> =
        vec![(Vec::new(), Automorphism::identity().images(p).images)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (seq, _) in &frontier {
            for (k, _) in gens.iter().enumerate() {
                if seq.last().is_some_and(|&l| inverse_idx[l] == k) {
                    continue;
                }
                let mut s = seq.clone();
                s.push(k);
                let phi = Automorphism::from_moves(s.iter().map(|&i| gens[i].clone()).collect());
                let imgs = phi.images(p).images;
                if seen.insert(imgs.clone()) {
                    pool.push(phi);
                }
                next.push((s, imgs));
            }
        }
        frontier = next;
    }
    pool
}
