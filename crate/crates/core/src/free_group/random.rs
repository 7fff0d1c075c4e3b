//! Random normal forms.

use super::{GroupPresentation, Letter, ReducedWord};
use rand::Rng;

fn random_letter<R: Rng>(p: &GroupPresentation, rng: &mut R) -> Letter {
    let f = rng.gen_range(0..p.num_factors() as u32);
    match p.order(f) {
        None => Letter::new(f, if rng.gen_bool(0.5) { 1 } else { -1 }),
        Some(m) => Letter::new(f, rng.gen_range(1..m as i32)),
    }
}

/// Random reduced word with exactly `len` letters (syllables for finite
/// factors). A lone finite cyclic group has no normal forms longer than one
/// letter, so there `len` is capped at 1.
pub fn random_reduced_word<R: Rng>(p: &GroupPresentation, rng: &mut R, len: usize) -> ReducedWord {
    let len = if p.num_factors() == 1 && !p.is_free_factor(0) { len.min(1) } else { len };
    let mut ls: Vec<Letter> = Vec::with_capacity(len);
    while ls.len() < len {
        let l = random_letter(p, rng);
        if let Some(&t) = ls.last() {
            let clash = if p.is_free_factor(l.factor) {
                t == p.letter_inverse(l)
            } else {
                t.factor == l.factor
            };
            if clash {
                continue;
            }
        }
        ls.push(l);
    }
    ReducedWord::from_reduced_unchecked(ls)
}

/// Random word of exactly `len` letters whose cyclic core is itself, capped
/// as for [`random_reduced_word`]. Normal forms in a product of two finite
/// cyclic groups alternate, so there odd lengths above 1 drop by one.
pub fn random_cyclically_reduced<R: Rng>(p: &GroupPresentation, rng: &mut R, len: usize) -> ReducedWord {
    let alternating = p.num_factors() == 2 && !p.is_free_factor(0) && !p.is_free_factor(1);
    let len = if alternating && len > 1 && len % 2 == 1 { len - 1 } else { len };
    loop {
        let w = random_reduced_word(p, rng, len);
        if p.cyclic_length(&w) == w.len() {
            return w;
        }
    }
}
