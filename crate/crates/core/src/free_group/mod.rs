//! Words in free groups and free products of cyclic groups.
//!
//! A presentation has `free_rank` copies of Z followed by finite cyclic
//! factors. Factor indices run over free generators first, then the finite
//! factors in declaration order.

mod automorphism;
mod nielsen;
mod random;
mod stallings;
mod text;
mod whitehead;

pub use automorphism::{Automorphism, GeneratorImages, Move};
pub use nielsen::{nielsen_pool, right_transvections};
pub use random::{random_cyclically_reduced, random_reduced_word};
pub use stallings::{is_basis, stallings_graph, LabelledEdges};
pub use text::{format_automorphism, format_word, parse_automorphism, parse_automorphism_list, parse_word, parse_words};
pub use whitehead::{is_primitive, sample_candidate_generic, whitehead_minimize, WhiteheadResult};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default exponent bound for the elementary-closure search with torsion.
pub const DEFAULT_CLOSURE_BOUND: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub free_rank: usize,
    #[serde(default)]
    pub finite_orders: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: u32,
    pub exp: i32,
}

impl Letter {
    pub const fn new(factor: u32, exp: i32) -> Self {
        Letter { factor, exp }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Wraps letters that the caller guarantees are already in normal form.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        ReducedWord(letters)
    }

    pub fn prefix(&self, n: usize) -> ReducedWord {
        ReducedWord(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> ReducedWord {
        ReducedWord(self.0[n..].to_vec())
    }

    /// Shortlex comparison: length first, then letters.
    pub fn shortlex_cmp(&self, other: &ReducedWord) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "[{}^{}]", l.factor, l.exp)?;
        }
        Ok(())
    }
}

/// Result of `root`: `w = root^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub root: ReducedWord,
    pub exponent: u32,
}

/// Description of E(g). In a free group `torsion_flag` is false and
/// E(g) is exactly the cyclic group generated by `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryClosure {
    pub root: ReducedWord,
    pub torsion_flag: bool,
}

/// Answer of the elementary-closure membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub member: bool,
    /// `None` when the answer is exact; otherwise the exponent bound searched.
    pub search_bound: Option<u32>,
}

impl GroupPresentation {
    pub fn new(free_rank: usize, finite_orders: Vec<u32>) -> Result<Self> {
        let p = GroupPresentation {
            free_rank,
            finite_orders,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn free(rank: usize) -> Self {
        GroupPresentation {
            free_rank: rank,
            finite_orders: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.free_rank + self.finite_orders.len() == 0 {
            return Err(Error::InvalidPresentation(
                "at least one free factor is required".into(),
            ));
        }
        if let Some(m) = self.finite_orders.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidPresentation(format!(
                "finite order {m} is below 2"
            )));
        }
        if self.free_rank > 18 {
            return Err(Error::InvalidPresentation(
                "free rank above 18 is not representable in the word syntax".into(),
            ));
        }
        Ok(())
    }

    pub fn num_factors(&self) -> usize {
        self.free_rank + self.finite_orders.len()
    }

    pub fn is_pure_free(&self) -> bool {
        self.finite_orders.is_empty()
    }

    pub fn is_free_factor(&self, factor: u32) -> bool {
        (factor as usize) < self.free_rank
    }

    /// Order of a finite factor, `None` for a free generator.
    pub fn order(&self, factor: u32) -> Option<u32> {
        let f = factor as usize;
        if f < self.free_rank {
            None
        } else {
            self.finite_orders.get(f - self.free_rank).copied()
        }
    }

    pub fn finite_factor_index(&self, k: usize) -> u32 {
        (self.free_rank + k) as u32
    }

    pub fn check_letter(&self, l: Letter) -> Result<()> {
        let f = l.factor as usize;
        if f >= self.num_factors() {
            return Err(Error::PresentationMismatch(format!(
                "factor index {} out of range (presentation has {} factors)",
                l.factor,
                self.num_factors()
            )));
        }
        match self.order(l.factor) {
            None if l.exp == 1 || l.exp == -1 => Ok(()),
            None => Err(Error::PresentationMismatch(format!(
                "free letter exponent {} is not ±1",
                l.exp
            ))),
            Some(m) if l.exp >= 1 && (l.exp as u32) < m => Ok(()),
            Some(m) => Err(Error::PresentationMismatch(format!(
                "exponent {} invalid for factor of order {m}",
                l.exp
            ))),
        }
    }

    pub fn check_word(&self, w: &ReducedWord) -> Result<()> {
        w.0.iter().try_for_each(|&l| self.check_letter(l))
    }

    /// Letter for a free generator with sign.
    pub fn gen(&self, i: usize, inverse: bool) -> Letter {
        debug_assert!(i < self.free_rank);
        Letter::new(i as u32, if inverse { -1 } else { 1 })
    }

    pub fn gen_word(&self, i: usize) -> ReducedWord {
        ReducedWord(vec![self.gen(i, false)])
    }

    /// Base generator of a factor (exponent 1) as a word.
    pub fn factor_generator(&self, factor: u32) -> ReducedWord {
        ReducedWord(vec![Letter::new(factor, 1)])
    }

    pub fn letter_inverse(&self, l: Letter) -> Letter {
        match self.order(l.factor) {
            None => Letter::new(l.factor, -l.exp),
            Some(m) => Letter::new(l.factor, m as i32 - l.exp),
        }
    }

    /// Normalizes an arbitrary integer exponent for a factor.
    /// Returns `None` when the power is trivial.
    pub fn normalize_power(&self, factor: u32, exp: i64) -> Option<Vec<Letter>> {
        match self.order(factor) {
            None => {
                if exp == 0 {
                    None
                } else {
                    let s = if exp > 0 { 1 } else { -1 };
                    Some(vec![Letter::new(factor, s); exp.unsigned_abs() as usize])
                }
            }
            Some(m) => {
                let e = exp.rem_euclid(m as i64) as i32;
                (e != 0).then(|| vec![Letter::new(factor, e)])
            }
        }
    }

    fn push_letter(&self, stack: &mut Vec<Letter>, l: Letter) {
        if let Some(top) = stack.last_mut() {
            if top.factor == l.factor {
                match self.order(l.factor) {
                    None => {
                        if top.exp == -l.exp {
                            stack.pop();
                            return;
                        }
                    }
                    Some(m) => {
                        let e = (top.exp + l.exp).rem_euclid(m as i32);
                        if e == 0 {
                            stack.pop();
                        } else {
                            top.exp = e;
                        }
                        return;
                    }
                }
            }
        }
        stack.push(l);
    }

    pub(crate) fn push_word(&self, stack: &mut Vec<Letter>, w: &ReducedWord) {
        for &l in &w.0 {
            self.push_letter(stack, l);
        }
    }

    /// Reduces a raw letter sequence, validating each letter.
    pub fn reduce(&self, letters: &[Letter]) -> Result<ReducedWord> {
        let mut stack = Vec::with_capacity(letters.len());
        for &l in letters {
            self.check_letter(l)?;
            self.push_letter(&mut stack, l);
        }
        Ok(ReducedWord(stack))
    }

    /// Like `reduce` but accepts arbitrary nonzero exponents on any factor.
    pub fn reduce_powers(&self, letters: &[(u32, i64)]) -> Result<ReducedWord> {
        let mut stack = Vec::with_capacity(letters.len());
        for &(f, e) in letters {
            if f as usize >= self.num_factors() {
                return Err(Error::PresentationMismatch(format!(
                    "factor index {f} out of range"
                )));
            }
            if let Some(ls) = self.normalize_power(f, e) {
                for l in ls {
                    self.push_letter(&mut stack, l);
                }
            }
        }
        Ok(ReducedWord(stack))
    }

    pub fn mul(&self, a: &ReducedWord, b: &ReducedWord) -> ReducedWord {
        let mut stack = a.0.clone();
        stack.reserve(b.len());
        for &l in &b.0 {
            self.push_letter(&mut stack, l);
        }
        ReducedWord(stack)
    }

    pub fn mul3(&self, a: &ReducedWord, b: &ReducedWord, c: &ReducedWord) -> ReducedWord {
        let mut stack = a.0.clone();
        for &l in b.0.iter().chain(c.0.iter()) {
            self.push_letter(&mut stack, l);
        }
        ReducedWord(stack)
    }

    pub fn product<'a>(&self, words: impl IntoIterator<Item = &'a ReducedWord>) -> ReducedWord {
        let mut stack = Vec::new();
        for w in words {
            for &l in &w.0 {
                self.push_letter(&mut stack, l);
            }
        }
        ReducedWord(stack)
    }

    pub fn inverse(&self, w: &ReducedWord) -> ReducedWord {
        ReducedWord(w.0.iter().rev().map(|&l| self.letter_inverse(l)).collect())
    }

    /// `u · w · u⁻¹`
    pub fn conjugate(&self, u: &ReducedWord, w: &ReducedWord) -> ReducedWord {
        self.mul3(u, w, &self.inverse(u))
    }

    pub fn pow(&self, w: &ReducedWord, n: i64) -> ReducedWord {
        let base = if n < 0 { self.inverse(w) } else { w.clone() };
        let mut stack = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            for &l in &base.0 {
                self.push_letter(&mut stack, l);
            }
        }
        ReducedWord(stack)
    }

    pub fn commute(&self, a: &ReducedWord, b: &ReducedWord) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Returns `(core, conjugator)` with `w = conjugator · core · conjugator⁻¹`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self, w: &ReducedWord) -> (ReducedWord, ReducedWord) {
        let ls = &w.0;
        let mut conj: Vec<Letter> = Vec::new();
        let (mut i, mut j) = (0usize, ls.len());
        // Peel inverse free letters from the two ends.
        while j >= i + 2 {
            let (first, last) = (ls[i], ls[j - 1]);
            if first.factor == last.factor
                && self.is_free_factor(first.factor)
                && first.exp == -last.exp
            {
                conj.push(first);
                i += 1;
                j -= 1;
            } else {
                break;
            }
        }
        let core: Vec<Letter> = ls[i..j].to_vec();
        if core.len() >= 2 {
            let (first, last) = (core[0], core[core.len() - 1]);
            if first.factor == last.factor && !self.is_free_factor(first.factor) {
                // s^p M s^q = s^p (M s^(p+q)) s^-p
                conj.push(first);
                let mut rest: Vec<Letter> = core[1..].to_vec();
                self.push_letter(&mut rest, first);
                let rest = ReducedWord(rest);
                let (inner_core, inner_conj) = self.cyclic_reduce(&rest);
                let conj = self.mul(&ReducedWord(conj), &inner_conj);
                return (inner_core, conj);
            }
        }
        (ReducedWord(core), ReducedWord(conj))
    }

    /// Cyclic length, i.e. length of the cyclically reduced core.
    pub fn cyclic_length(&self, w: &ReducedWord) -> usize {
        self.cyclic_reduce(w).0.len()
    }

    /// True when the element is nontrivial of finite order.
    pub fn has_finite_order(&self, w: &ReducedWord) -> bool {
        let (core, _) = self.cyclic_reduce(w);
        core.len() == 1 && !self.is_free_factor(core.0[0].factor)
    }

    pub fn root(&self, w: &ReducedWord) -> Result<Root> {
        let (core, conj) = self.cyclic_reduce(w);
        if core.is_empty() {
            return Err(Error::Identity);
        }
        if core.len() == 1 && !self.is_free_factor(core.0[0].factor) {
            return Err(Error::FiniteOrder);
        }
        let n = core.len();
        let period = (1..=n)
            .find(|&p| n % p == 0 && (p..n).all(|k| core.0[k] == core.0[k - p]))
            .unwrap_or(n);
        let r = ReducedWord(core.0[..period].to_vec());
        Ok(Root {
            root: self.conjugate(&conj, &r),
            exponent: (n / period) as u32,
        })
    }

    pub fn elementary_closure(&self, g: &ReducedWord) -> Result<ElementaryClosure> {
        let r = self.root(g)?;
        Ok(ElementaryClosure {
            root: r.root,
            torsion_flag: !self.is_pure_free(),
        })
    }

    /// Whether `h` lies in E(g). Exact for free groups.
    pub fn in_elementary_closure(&self, h: &ReducedWord, g: &ReducedWord) -> Result<bool> {
        Ok(self
            .in_elementary_closure_bounded(h, g, DEFAULT_CLOSURE_BOUND)?
            .member)
    }

    /// Membership in E(g). For free products with torsion a negative answer
    /// comes from a search over `0 < |n|, |m| ≤ bound` and is reported as such.
    pub fn in_elementary_closure_bounded(
        &self,
        h: &ReducedWord,
        g: &ReducedWord,
        bound: u32,
    ) -> Result<ClosureVerdict> {
        let rg = self.root(g)?;
        if h.is_identity() {
            return Ok(ClosureVerdict {
                member: true,
                search_bound: None,
            });
        }
        if let Ok(rh) = self.root(h) {
            if rh.root == rg.root || rh.root == self.inverse(&rg.root) {
                return Ok(ClosureVerdict {
                    member: true,
                    search_bound: None,
                });
            }
        }
        if self.is_pure_free() {
            return Ok(ClosureVerdict {
                member: false,
                search_bound: None,
            });
        }
        // Conjugation preserves cyclic length, so h g^n h^-1 = g^m forces |m| = |n|.
        let hinv = self.inverse(h);
        for n in 1..=bound as i64 {
            let gn = self.pow(g, n);
            let c = self.mul3(h, &gn, &hinv);
            if c == gn || c == self.inverse(&gn) {
                return Ok(ClosureVerdict {
                    member: true,
                    search_bound: Some(bound),
                });
            }
        }
        Ok(ClosureVerdict {
            member: false,
            search_bound: Some(bound),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupPresentation {
        GroupPresentation::free(2)
    }

    fn w(p: &GroupPresentation, s: &str) -> ReducedWord {
        parse_word(p, s).unwrap()
    }

    #[test]
    fn free_cancellation() {
        let p = f2();
        let r = p
            .reduce(&[Letter::new(0, 1), Letter::new(0, -1), Letter::new(1, 1)])
            .unwrap();
        assert_eq!(r, w(&p, "b"));
        assert!(p.reduce(&[]).unwrap().is_identity());
    }

    #[test]
    fn torsion_exponents_add() {
        let p = GroupPresentation::new(1, vec![3]).unwrap();
        let r = p.reduce(&[Letter::new(1, 1), Letter::new(1, 2)]).unwrap();
        assert!(r.is_identity());
        let r = p.reduce(&[Letter::new(1, 2), Letter::new(1, 2)]).unwrap();
        assert_eq!(r.letters(), &[Letter::new(1, 1)]);
    }

    #[test]
    fn mismatch_errors() {
        let p = f2();
        assert!(matches!(
            p.reduce(&[Letter::new(5, 1)]),
            Err(Error::PresentationMismatch(_))
        ));
        assert!(matches!(
            p.reduce(&[Letter::new(0, 2)]),
            Err(Error::PresentationMismatch(_))
        ));
        let q = GroupPresentation::new(0, vec![2, 3]).unwrap();
        assert!(q.reduce(&[Letter::new(0, 2)]).is_err());
        assert!(GroupPresentation::new(0, vec![]).is_err());
        assert!(GroupPresentation::new(1, vec![1]).is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        let p = f2();
        let (c, u) = p.cyclic_reduce(&w(&p, "abA"));
        assert_eq!((c, u), (w(&p, "b"), w(&p, "a")));
        let (c, u) = p.cyclic_reduce(&w(&p, "ab"));
        assert_eq!((c, u), (w(&p, "ab"), ReducedWord::identity()));
    }

    #[test]
    fn cyclic_reduce_torsion_merge() {
        let p = GroupPresentation::new(1, vec![3]).unwrap();
        let x = w(&p, "s1 a s1");
        let (c, u) = p.cyclic_reduce(&x);
        assert_eq!(p.conjugate(&u, &c), x);
        assert_eq!(c.len(), 2);
        let y = w(&p, "s1 a s1^2");
        let (c, u) = p.cyclic_reduce(&y);
        assert_eq!(c, w(&p, "a"));
        assert_eq!(p.conjugate(&u, &c), y);
    }

    #[test]
    fn root_examples() {
        let p = f2();
        let r = p.root(&w(&p, "abab")).unwrap();
        assert_eq!((r.root, r.exponent), (w(&p, "ab"), 2));
        let r = p.root(&w(&p, "ab")).unwrap();
        assert_eq!(r.exponent, 1);
        let r = p.root(&w(&p, "Abba")).unwrap();
        assert_eq!((r.root, r.exponent), (w(&p, "Aba"), 2));
        assert_eq!(p.root(&ReducedWord::identity()), Err(Error::Identity));
        let q = GroupPresentation::new(0, vec![2, 3]).unwrap();
        assert_eq!(q.root(&w(&q, "s1")), Err(Error::FiniteOrder));
    }

    #[test]
    fn closure_examples() {
        let p = f2();
        let g = w(&p, "abab");
        assert!(p.in_elementary_closure(&w(&p, "ab"), &g).unwrap());
        assert!(!p.in_elementary_closure(&w(&p, "ba"), &g).unwrap());
        assert!(p
            .in_elementary_closure(&ReducedWord::identity(), &g)
            .unwrap());
        assert!(p
            .in_elementary_closure(&g, &ReducedWord::identity())
            .is_err());
    }

    #[test]
    fn closure_with_torsion_uses_bounded_search() {
        let p = GroupPresentation::new(0, vec![2, 2]).unwrap();
        let g = w(&p, "s1 s2");
        let v = p
            .in_elementary_closure_bounded(&w(&p, "s1"), &g, 4)
            .unwrap();
        assert!(v.member);
        assert_eq!(v.search_bound, Some(4));
        assert!(p.elementary_closure(&g).unwrap().torsion_flag);
    }
}
