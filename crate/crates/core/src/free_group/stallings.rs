//! Stallings folding of a finite set of words over the free part.

use super::{GroupPresentation, ReducedWord};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub type LabelledEdges = BTreeSet<(usize, u32, usize)>;

/// Core of the folded graph of the subgroup generated by `words`, as a
/// vertex count and the set of labelled edges (source, generator, target)
/// with vertex 0 the basepoint. Hanging trees are kept.
pub fn stallings_graph(p: &GroupPresentation, words: &[ReducedWord]) -> Result<(usize, LabelledEdges)> {
    if !p.is_pure_free() {
        return Err(Error::Unsupported("folding needs a free group".into()));
    }
    let mut edges: Vec<(usize, u32, bool, usize)> = Vec::new();
    let mut n = 1;
    for w in words {
        let ls = w.letters();
        let mut cur = 0;
        for (k, l) in ls.iter().enumerate() {
            let next = if k + 1 == ls.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            // x⁻¹ from cur to next is x from next to cur.
            if l.exp > 0 {
                edges.push((cur, l.factor, true, next));
            } else {
                edges.push((next, l.factor, true, cur));
            }
            cur = next;
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    loop {
        let mut seen: BTreeMap<(usize, u32, bool), usize> = BTreeMap::new();
        let mut merge = None;
        for &(u, x, _, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (key, target) in [((u, x, true), v), ((v, x, false), u)] {
                match seen.get(&key) {
                    Some(&t) if t != target => {
                        merge = Some((t, target));
                        break;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, target);
                    }
                }
            }
            if merge.is_some() {
                break;
            }
        }
        match merge {
            Some((a, b)) => {
                let (a, b) = (find(&mut parent, a), find(&mut parent, b));
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
            None => break,
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    ids.insert(find(&mut parent, 0), 0);
    let mut out = BTreeSet::new();
    for &(u, x, _, v) in &edges {
        let (u, v) = (find(&mut parent, u), find(&mut parent, v));
        let next = ids.len();
        let u = *ids.entry(u).or_insert(next);
        let next = ids.len();
        let v = *ids.entry(v).or_insert(next);
        out.insert((u, x, v));
    }
    Ok((ids.len(), out))
}

/// True iff `words` is a free basis of the free group.
pub fn is_basis(p: &GroupPresentation, words: &[ReducedWord]) -> Result<bool> {
    if words.len() != p.free_rank {
        return Ok(false);
    }
    let (n, edges) = stallings_graph(p, words)?;
    let labels: BTreeSet<u32> = edges.iter().map(|e| e.1).collect();
    Ok(n == 1 && edges.len() == p.free_rank && labels.len() == p.free_rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_words;

    fn basis(p: &GroupPresentation, s: &str) -> bool {
        is_basis(p, &parse_words(p, s).unwrap()).unwrap()
    }

    #[test]
    fn bases_and_non_bases() {
        let p = GroupPresentation::free(2);
        assert!(basis(&p, "a\nb"));
        assert!(basis(&p, "ab\nb"));
        assert!(basis(&p, "aba\nab"));
        assert!(!basis(&p, "aa\nb"));
        assert!(!basis(&p, "ab\nba"));
        assert!(!basis(&p, "a\nbab"));
        let q = GroupPresentation::free(3);
        assert!(basis(&q, "abc\nbc\nc"));
        assert!(!basis(&q, "ab\nbc\nca"));
    }

    #[test]
    fn folded_graph_of_conjugate() {
        let p = GroupPresentation::free(2);
        let (n, e) = stallings_graph(&p, &parse_words(&p, "bab").unwrap()).unwrap();
        assert_eq!((n, e.len()), (3, 3));
    }
}
