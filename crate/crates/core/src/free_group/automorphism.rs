use super::{GroupPresentation, Letter, ReducedWord};
use crate::error::{Error, Result};

/// Elementary automorphism. Generator indices refer to factor indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    /// x_i ↦ x_i⁻¹
    Invert(u32),
    /// x_i ↔ x_j
    Swap(u32, u32),
    /// x_i ↦ x_i · x_j^(±1)
    RightMul { target: u32, by: u32, inverse: bool },
    /// x_i ↦ x_j^(±1) · x_i
    LeftMul { target: u32, by: u32, inverse: bool },
    /// s_k ↦ w s_k w⁻¹ where w avoids factor k.
    ConjugateFactor { factor: u32, word: ReducedWord },
    /// s_k ↔ s_l for factors of equal order.
    PermuteFactors(u32, u32),
    /// x ↦ w x w⁻¹ on every generator.
    Inner(ReducedWord),
}

impl Move {
    pub fn inverse(&self, p: &GroupPresentation) -> Move {
        match self {
            Move::Invert(_) | Move::Swap(..) | Move::PermuteFactors(..) => self.clone(),
            Move::RightMul { target, by, inverse } => Move::RightMul {
                target: *target,
                by: *by,
                inverse: !inverse,
            },
            Move::LeftMul { target, by, inverse } => Move::LeftMul {
                target: *target,
                by: *by,
                inverse: !inverse,
            },
            Move::ConjugateFactor { factor, word } => Move::ConjugateFactor {
                factor: *factor,
                word: p.inverse(word),
            },
            Move::Inner(w) => Move::Inner(p.inverse(w)),
        }
    }

    pub fn validate(&self, p: &GroupPresentation) -> Result<()> {
        let n = p.num_factors() as u32;
        let free = |i: u32| -> Result<()> {
            if p.is_free_factor(i) {
                Ok(())
            } else {
                Err(Error::PresentationMismatch(format!(
                    "move refers to non-free generator {i}"
                )))
            }
        };
        match self {
            Move::Invert(i) => free(*i),
            Move::Swap(i, j) => {
                free(*i)?;
                free(*j)
            }
            Move::RightMul { target, by, .. } | Move::LeftMul { target, by, .. } => {
                free(*target)?;
                free(*by)?;
                if target == by {
                    return Err(Error::PresentationMismatch(
                        "transvection needs distinct generators".into(),
                    ));
                }
                Ok(())
            }
            Move::ConjugateFactor { factor, word } => {
                if *factor >= n {
                    return Err(Error::PresentationMismatch(format!(
                        "factor {factor} out of range"
                    )));
                }
                p.check_word(word)?;
                if word.letters().iter().any(|l| l.factor == *factor) {
                    return Err(Error::PresentationMismatch(
                        "conjugating word involves the conjugated factor".into(),
                    ));
                }
                Ok(())
            }
            Move::PermuteFactors(k, l) => {
                if *k >= n || *l >= n {
                    return Err(Error::PresentationMismatch("factor out of range".into()));
                }
                if p.order(*k) != p.order(*l) {
                    return Err(Error::PresentationMismatch(
                        "permuted factors must be isomorphic".into(),
                    ));
                }
                Ok(())
            }
            Move::Inner(w) => p.check_word(w),
        }
    }

    /// Replaces the images of ψ by those of ψ ∘ self.
    fn precompose(&self, p: &GroupPresentation, old: &mut [ReducedWord]) {
        let sign = |w: &ReducedWord, inv: bool| if inv { p.inverse(w) } else { w.clone() };
        match self {
            Move::Invert(i) => {
                let i = *i as usize;
                old[i] = p.inverse(&old[i]);
            }
            Move::Swap(i, j) | Move::PermuteFactors(i, j) => old.swap(*i as usize, *j as usize),
            Move::RightMul { target, by, inverse } => {
                let m = sign(&old[*by as usize], *inverse);
                let t = *target as usize;
                old[t] = p.mul(&old[t], &m);
            }
            Move::LeftMul { target, by, inverse } => {
                let m = sign(&old[*by as usize], *inverse);
                let t = *target as usize;
                old[t] = p.mul(&m, &old[t]);
            }
            Move::ConjugateFactor { factor, word } => {
                let img = apply_images(p, old, word);
                let k = *factor as usize;
                old[k] = p.conjugate(&img, &old[k]);
            }
            Move::Inner(w) => {
                let img = apply_images(p, old, w);
                let inv = p.inverse(&img);
                for x in old.iter_mut() {
                    *x = p.mul3(&img, x, &inv);
                }
            }
        }
    }
}

/// φ = m_k ∘ … ∘ m_1 where `moves = [m_1, …, m_k]`; m_1 acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Automorphism {
    pub moves: Vec<Move>,
}

/// Images of each factor's base generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorImages {
    pub images: Vec<ReducedWord>,
}

fn apply_images(p: &GroupPresentation, images: &[ReducedWord], w: &ReducedWord) -> ReducedWord {
    let mut stack: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        let img = &images[l.factor as usize];
        match p.order(l.factor) {
            None if l.exp > 0 => p.push_word(&mut stack, img),
            None => p.push_word(&mut stack, &p.inverse(img)),
            Some(_) => {
                for _ in 0..l.exp {
                    p.push_word(&mut stack, img);
                }
            }
        }
    }
    ReducedWord::from_reduced_unchecked(stack)
}

impl GeneratorImages {
    pub fn identity(p: &GroupPresentation) -> Self {
        GeneratorImages {
            images: (0..p.num_factors() as u32)
                .map(|f| p.factor_generator(f))
                .collect(),
        }
    }

    pub fn apply(&self, p: &GroupPresentation, w: &ReducedWord) -> ReducedWord {
        apply_images(p, &self.images, w)
    }
}

impl Automorphism {
    pub fn identity() -> Self {
        Automorphism { moves: Vec::new() }
    }

    pub fn from_moves(moves: Vec<Move>) -> Self {
        Automorphism { moves }
    }

    pub fn single(m: Move) -> Self {
        Automorphism { moves: vec![m] }
    }

    pub fn inner(w: ReducedWord) -> Self {
        Automorphism::single(Move::Inner(w))
    }

    pub fn is_trivially_identity(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn validate(&self, p: &GroupPresentation) -> Result<()> {
        self.moves.iter().try_for_each(|m| m.validate(p))
    }

    pub fn inverse(&self, p: &GroupPresentation) -> Automorphism {
        Automorphism {
            moves: self.moves.iter().rev().map(|m| m.inverse(p)).collect(),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let mut moves = other.moves.clone();
        moves.extend(self.moves.iter().cloned());
        Automorphism { moves }
    }

    /// Generator images; moves must be valid for `p`.
    pub fn images(&self, p: &GroupPresentation) -> GeneratorImages {
        let mut imgs = GeneratorImages::identity(p).images;
        for m in self.moves.iter().rev() {
            m.precompose(p, &mut imgs);
        }
        GeneratorImages { images: imgs }
    }

    pub fn try_images(&self, p: &GroupPresentation) -> Result<GeneratorImages> {
        self.validate(p)?;
        Ok(self.images(p))
    }

    pub fn apply(&self, p: &GroupPresentation, w: &ReducedWord) -> Result<ReducedWord> {
        p.check_word(w)?;
        Ok(self.try_images(p)?.apply(p, w))
    }
}
