//! Compact overlap arithmetic for axes in the Cayley tree of a free group.
//!
//! Letters are byte codes `2i` (x_i) and `2i+1` (x_i⁻¹), so inversion is `^ 1`.
//! After conjugating by the first conjugator, Axis(g) is the line through the
//! identity whose two rays read c^∞ and (c⁻¹)^∞; Axis(h) is v·Axis(d) with
//! v = u_g⁻¹u_h. Everything is decided by common prefixes with periodic
//! sequences, in time linear in the word lengths.

use crate::error::{Error, Result};
use crate::free_group::{GroupPresentation, Letter, ReducedWord};

pub fn encode(p: &GroupPresentation, w: &ReducedWord) -> Result<Vec<u8>> {
    if !p.is_pure_free() {
        return Err(Error::Unsupported("byte codes need a free group".into()));
    }
    Ok(w.letters()
        .iter()
        .map(|l| (2 * l.factor + (l.exp < 0) as u32) as u8)
        .collect())
}

pub fn decode(codes: &[u8]) -> ReducedWord {
    ReducedWord::from_reduced_unchecked(
        codes
            .iter()
            .map(|&c| Letter::new((c >> 1) as u32, if c & 1 == 0 { 1 } else { -1 }))
            .collect(),
    )
}

/// g = conj · core · conj⁻¹ with `core` cyclically reduced and nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyAxis {
    pub conj: Vec<u8>,
    pub core: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastOverlap {
    Same,
    /// `near_prefix` letters of v lead from the base of Axis(g) to the near
    /// bridge endpoint; `foot` is its position on Axis(g).
    Disjoint {
        foot: i64,
        near_prefix: usize,
        distance: usize,
    },
    Overlap { lo: i64, hi: i64 },
}

impl FastOverlap {
    pub fn length(&self) -> Option<usize> {
        match self {
            FastOverlap::Same => None,
            FastOverlap::Disjoint { .. } => Some(0),
            FastOverlap::Overlap { lo, hi } => Some((hi - lo) as usize),
        }
    }
}

impl CayleyAxis {
    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        let n = codes.len();
        let mut i = 0;
        while 2 * i + 1 < n && codes[i] == codes[n - 1 - i] ^ 1 {
            i += 1;
        }
        if i * 2 >= n {
            return Err(Error::Identity);
        }
        Ok(CayleyAxis {
            conj: codes[..i].to_vec(),
            core: codes[i..n - i].to_vec(),
        })
    }

    pub fn from_word(p: &GroupPresentation, w: &ReducedWord) -> Result<Self> {
        Self::from_codes(&encode(p, w)?)
    }

    pub fn translation_length(&self) -> usize {
        self.core.len()
    }

    /// Letter of the edge x_p → x_{p+1} on the axis through the identity.
    #[inline]
    fn label(&self, p: i64) -> u8 {
        self.core[p.rem_euclid(self.core.len() as i64) as usize]
    }

    /// Word of the vertex at position p on this axis (original frame).
    pub fn vertex_at(&self, p: i64) -> Vec<u8> {
        let mut out = self.conj.clone();
        if p >= 0 {
            for k in 0..p {
                push_reduced(&mut out, self.label(k));
            }
        } else {
            for k in 1..=(-p) {
                push_reduced(&mut out, self.label(-k) ^ 1);
            }
        }
        out
    }
}

#[inline]
pub(crate) fn push_reduced(w: &mut Vec<u8>, c: u8) {
    if w.last() == Some(&(c ^ 1)) {
        w.pop();
    } else {
        w.push(c);
    }
}

/// Writes v = u_g⁻¹ u_h into `buf`.
pub fn relative_conjugator(g: &CayleyAxis, h: &CayleyAxis, buf: &mut Vec<u8>) {
    buf.clear();
    let l = g
        .conj
        .iter()
        .zip(&h.conj)
        .take_while(|(a, b)| a == b)
        .count();
    buf.extend(g.conj[l..].iter().rev().map(|&c| c ^ 1));
    buf.extend_from_slice(&h.conj[l..]);
}

/// Longest common prefix of `s` with the forward (c^∞) and backward
/// ((c⁻¹)^∞) rays of the axis through the identity.
#[inline]
fn ray_prefix(ax: &CayleyAxis, s: impl Iterator<Item = u8> + Clone) -> (usize, usize) {
    let fwd = s
        .clone()
        .enumerate()
        .take_while(|&(k, c)| c == ax.label(k as i64))
        .count();
    let bwd = s
        .enumerate()
        .take_while(|&(k, c)| c == ax.label(-(k as i64) - 1) ^ 1)
        .count();
    (fwd, bwd)
}

#[inline]
fn run(cap: usize, mut f: impl FnMut(i64) -> bool) -> usize {
    let mut t = 0;
    while t < cap && f(t as i64) {
        t += 1;
    }
    t
}

/// Exact overlap of Axis(g) and Axis(h). `buf` is scratch space.
pub fn fast_overlap(g: &CayleyAxis, h: &CayleyAxis, buf: &mut Vec<u8>) -> FastOverlap {
    relative_conjugator(g, h, buf);
    let v = &buf[..];
    let (kf, kb) = ray_prefix(g, v.iter().copied());
    let (k, p0) = if kf >= kb {
        (kf, kf as i64)
    } else {
        (kb, -(kb as i64))
    };
    // f = v[..k]; f ∈ Axis(h) iff s⁻¹ lies on Axis(d), where s = v[k..].
    let s_len = v.len() - k;
    let s_inv = v[k..].iter().rev().map(|&c| c ^ 1);
    let (jf, jb) = ray_prefix(h, s_inv);
    if jf.max(jb) < s_len {
        return FastOverlap::Disjoint {
            foot: p0,
            near_prefix: k,
            distance: s_len - jf.max(jb),
        };
    }
    let q0 = if s_len == 0 {
        0
    } else if jf == s_len {
        s_len as i64
    } else {
        -(s_len as i64)
    };
    let cap = g.core.len() + h.core.len();
    let fwd_same = run(cap, |t| g.label(p0 + t) == h.label(q0 + t));
    let bwd_same = run(cap, |t| g.label(p0 - 1 - t) == h.label(q0 - 1 - t));
    let fwd_opp = run(cap, |t| g.label(p0 + t) == h.label(q0 - 1 - t) ^ 1);
    let bwd_opp = run(cap, |t| g.label(p0 - 1 - t) ^ 1 == h.label(q0 + t));
    let (fwd, bwd) = if fwd_same > 0 || bwd_same > 0 {
        (fwd_same, bwd_same)
    } else {
        (fwd_opp, bwd_opp)
    };
    if fwd >= cap || bwd >= cap {
        return FastOverlap::Same;
    }
    FastOverlap::Overlap {
        lo: p0 - bwd as i64,
        hi: p0 + fwd as i64,
    }
}

/// Bridge vertices (near endpoint first) for a disjoint pair, as codes.
pub fn bridge_vertices(g: &CayleyAxis, h: &CayleyAxis, near_prefix: usize, distance: usize) -> Vec<Vec<u8>> {
    let mut v = Vec::new();
    relative_conjugator(g, h, &mut v);
    (0..=distance)
        .map(|t| {
            let mut w = g.conj.clone();
            for &c in &v[..near_prefix + t] {
                push_reduced(&mut w, c);
            }
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;
    use crate::tree_geometry::{axis_overlap, Overlap, TreeModel};

    fn ax(p: &GroupPresentation, s: &str) -> CayleyAxis {
        CayleyAxis::from_word(p, &parse_word(p, s).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let p = GroupPresentation::free(2);
        let mut buf = Vec::new();
        assert_eq!(
            fast_overlap(&ax(&p, "ab"), &ax(&p, "ababa"), &mut buf).length(),
            Some(5)
        );
        assert_eq!(
            fast_overlap(&ax(&p, "ab"), &ax(&p, "ababab"), &mut buf),
            FastOverlap::Same
        );
        assert_eq!(
            fast_overlap(&ax(&p, "ab"), &ax(&p, "BA"), &mut buf),
            FastOverlap::Same
        );
        match fast_overlap(&ax(&p, "a"), &ax(&p, "baB"), &mut buf) {
            FastOverlap::Disjoint { distance, foot, .. } => assert_eq!((distance, foot), (1, 0)),
            o => panic!("{o:?}"),
        }
        assert!(CayleyAxis::from_word(&p, &ReducedWord::identity()).is_err());
    }

    #[test]
    fn agrees_with_generic_walk() {
        let p = GroupPresentation::free(2);
        let t = TreeModel::cayley(p.clone()).unwrap();
        let words = ["a", "ab", "abA", "aBAb", "bbA", "abab", "BaabA", "aaB", "Ab", "bAba", "baaBA"];
        let mut buf = Vec::new();
        for g in words {
            for h in words {
                let (gw, hw) = (parse_word(&p, g).unwrap(), parse_word(&p, h).unwrap());
                let slow = axis_overlap(&t, &gw, &hw).unwrap();
                let fast = fast_overlap(&ax(&p, g), &ax(&p, h), &mut buf);
                match (&slow, &fast) {
                    (Overlap::SameAxis, FastOverlap::Same) => {}
                    (Overlap::Disjoint { length, .. }, FastOverlap::Disjoint { distance, .. }) => {
                        assert_eq!(length, distance, "{g} {h}")
                    }
                    (Overlap::Overlap(s), FastOverlap::Overlap { lo, hi }) => {
                        assert_eq!((s.start_offset, s.end_offset), (*lo, *hi), "{g} {h}")
                    }
                    _ => panic!("{g} {h}: {slow:?} vs {fast:?}"),
                }
            }
        }
    }
}
