use super::{Automorphism, GeneratorImages, GroupPresentation, Letter, Move, ReducedWord};
use crate::error::{Error, Result};
use super::random::random_cyclically_reduced;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhiteheadResult {
    /// Cyclically reduced word of least length found in the orbit.
    pub minimal: ReducedWord,
    /// Whitehead automorphisms applied in order; their composite maps the
    /// input to a conjugate of `minimal`.
    pub moves: Vec<Automorphism>,
    pub primitive: bool,
}

/// Choice for a non-multiplier generator x: fix, x·m, m⁻¹·x, or m⁻¹·x·m.
fn whitehead_automorphism(n: usize, j: usize, inv: bool, choice: &[u8]) -> Automorphism {
    let mut moves = Vec::new();
    let mut k = 0;
    for i in 0..n {
        if i == j {
            continue;
        }
        let c = choice[k];
        k += 1;
        if c & 1 != 0 {
            moves.push(Move::RightMul {
                target: i as u32,
                by: j as u32,
                inverse: inv,
            });
        }
        if c & 2 != 0 {
            moves.push(Move::LeftMul {
                target: i as u32,
                by: j as u32,
                inverse: !inv,
            });
        }
    }
    Automorphism::from_moves(moves)
}

fn whitehead_images(p: &GroupPresentation, j: usize, inv: bool, choice: &[u8]) -> GeneratorImages {
    let n = p.free_rank;
    let m = Letter::new(j as u32, if inv { -1 } else { 1 });
    let minv = p.letter_inverse(m);
    let mut images = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        if i == j {
            images.push(p.gen_word(i));
            continue;
        }
        let c = choice[k];
        k += 1;
        let x = Letter::new(i as u32, 1);
        let mut ls = Vec::with_capacity(3);
        if c & 2 != 0 {
            ls.push(minv);
        }
        ls.push(x);
        if c & 1 != 0 {
            ls.push(m);
        }
        images.push(ReducedWord::from_reduced_unchecked(ls));
    }
    GeneratorImages { images }
}

/// Greedy Whitehead descent on cyclic length for pure free groups.
pub fn whitehead_minimize(p: &GroupPresentation, w: &ReducedWord) -> Result<WhiteheadResult> {
    if !p.is_pure_free() {
        return Err(Error::Unsupported(
            "Whitehead minimization requires a free group".into(),
        ));
    }
    p.check_word(w)?;
    let n = p.free_rank;
    let mut current = p.cyclic_reduce(w).0;
    let mut moves = Vec::new();
    if n >= 2 {
        let combos = 4usize.pow((n - 1) as u32);
        loop {
            if current.len() <= 1 {
                break;
            }
            let mut best: Option<(ReducedWord, usize, bool, Vec<u8>)> = None;
            for j in 0..n {
                for inv in [false, true] {
                    for code in 1..combos {
                        let choice: Vec<u8> =
                            (0..n - 1).map(|t| ((code >> (2 * t)) & 3) as u8).collect();
                        let img = whitehead_images(p, j, inv, &choice);
                        let cand = p.cyclic_reduce(&img.apply(p, &current)).0;
                        let better = match &best {
                            None => true,
                            Some((b, ..)) => cand.shortlex_cmp(b).is_lt(),
                        };
                        if better {
                            best = Some((cand, j, inv, choice));
                        }
                    }
                }
            }
            match best {
                Some((cand, j, inv, choice)) if cand.len() < current.len() => {
                    moves.push(whitehead_automorphism(n, j, inv, &choice));
                    current = cand;
                }
                _ => break,
            }
        }
    }
    let primitive = current.len() == 1;
    Ok(WhiteheadResult {
        minimal: current,
        moves,
        primitive,
    })
}

pub fn is_primitive(p: &GroupPresentation, w: &ReducedWord) -> Result<bool> {
    Ok(whitehead_minimize(p, w)?.primitive)
}

fn uses_every_generator_both_ways(p: &GroupPresentation, w: &ReducedWord) -> bool {
    (0..p.free_rank as u32).all(|i| {
        [1, -1]
            .iter()
            .all(|&e| w.letters().contains(&Letter::new(i, e)))
    })
}

/// Random cyclically reduced word of exactly `length_budget` letters that uses
/// every generator and its inverse, is not a proper power and is not primitive.
pub fn sample_candidate_generic(
    p: &GroupPresentation,
    seed: u64,
    length_budget: usize,
) -> Result<ReducedWord> {
    if !p.is_pure_free() {
        return Err(Error::Unsupported(
            "generic sampling requires a free group".into(),
        ));
    }
    if p.free_rank < 2 {
        return Err(Error::Budget(
            "rank below 2 has no non-primitive non-power words".into(),
        ));
    }
    let need = (2 * p.free_rank).max(8);
    if length_budget < need {
        return Err(Error::Budget(format!(
            "length budget {length_budget} below the minimum {need}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let w = random_cyclically_reduced(p, &mut rng, length_budget);
        if !uses_every_generator_both_ways(p, &w) {
            continue;
        }
        if p.root(&w)?.exponent != 1 {
            continue;
        }
        if is_primitive(p, &w)? {
            continue;
        }
        return Ok(w);
    }
    Err(Error::Budget(
        "no word passing the filters found within the retry limit".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;

    #[test]
    fn generators_are_primitive() {
        let p = GroupPresentation::free(2);
        let r = whitehead_minimize(&p, &parse_word(&p, "a").unwrap()).unwrap();
        assert!(r.primitive && r.moves.is_empty());
        assert!(is_primitive(&p, &parse_word(&p, "abA").unwrap()).unwrap());
        assert!(is_primitive(&p, &parse_word(&p, "aab").unwrap()).unwrap());
        assert!(is_primitive(&p, &parse_word(&p, "abaab").unwrap()).unwrap());
    }

    #[test]
    fn commutator_like_words_are_not_primitive() {
        let p = GroupPresentation::free(2);
        let r = whitehead_minimize(&p, &parse_word(&p, "abaB").unwrap()).unwrap();
        assert!(!r.primitive);
        assert_eq!(r.minimal.len(), 4);
        assert!(!is_primitive(&p, &parse_word(&p, "abAB").unwrap()).unwrap());
        assert!(!is_primitive(&p, &parse_word(&p, "aa").unwrap()).unwrap());
    }

    #[test]
    fn moves_witness_the_reduction() {
        let p = GroupPresentation::free(3);
        let w = parse_word(&p, "abcAbcBBcab").unwrap();
        let r = whitehead_minimize(&p, &w).unwrap();
        let mut phi = Automorphism::identity();
        for m in &r.moves {
            phi = m.compose(&phi);
        }
        let img = phi.apply(&p, &w).unwrap();
        assert_eq!(p.cyclic_reduce(&img).0, r.minimal);
    }

    #[test]
    fn torsion_unsupported() {
        let p = GroupPresentation::new(1, vec![2]).unwrap();
        assert!(matches!(
            whitehead_minimize(&p, &ReducedWord::identity()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sampler_filters() {
        let p = GroupPresentation::free(2);
        let w = sample_candidate_generic(&p, 7, 12).unwrap();
        assert_eq!(w.len(), 12);
        assert_eq!(p.cyclic_length(&w), 12);
        assert_eq!(p.root(&w).unwrap().exponent, 1);
        assert!(!is_primitive(&p, &w).unwrap());
        assert!(matches!(
            sample_candidate_generic(&p, 7, 1),
            Err(Error::Budget(_))
        ));
    }
}
