//! Empirical persistence of long axis intersections under automorphisms of a
//! free group, and the Dehn-twist failure for basis elements.

use crate::error::{Error, Result};
use crate::free_group::{
    format_word, random_reduced_word, Automorphism, GeneratorImages, GroupPresentation, Move, ReducedWord,
};
use crate::report::LemmaReport;
use crate::tree_geometry::cayley::{fast_overlap, CayleyAxis, FastOverlap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub const BASIS_COUNTEREXAMPLE: &str = "basis_dehn_twist";
pub const TWIST_CONTRAST: &str = "generic_dehn_twist";

/// Caveats attached to every estimate.
pub const RESTRICTIONS: [&str; 2] = [
    "singleton partner sets only",
    "automorphisms restricted to the supplied pool",
];

/// Overlap length of two axes in the Cayley tree; `None` when they coincide.
pub fn cayley_overlap(p: &GroupPresentation, g: &ReducedWord, h: &ReducedWord) -> Result<Option<usize>> {
    let (ag, ah) = (CayleyAxis::from_word(p, g)?, CayleyAxis::from_word(p, h)?);
    Ok(fast_overlap(&ag, &ah, &mut Vec::new()).length())
}

fn check_free(p: &GroupPresentation) -> Result<()> {
    if p.is_pure_free() {
        Ok(())
    } else {
        Err(Error::Unsupported("persistence experiments need a free group".into()))
    }
}

/// h = gᵐ·t with a random tail t that causes no cancellation and keeps h
/// cyclically reduced, such that Axis(h) ∩ Axis(g) has length ≥ m‖g‖ and
/// h ∉ E(g).
pub fn generate_partner(p: &GroupPresentation, g: &ReducedWord, m: usize, seed: u64) -> Result<ReducedWord> {
    check_free(p)?;
    if g.is_identity() {
        return Err(Error::Identity);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("partner multiple must be at least 1".into()));
    }
    let (core, conj) = p.cyclic_reduce(g);
    if !conj.is_identity() || core != *g {
        return Err(Error::Precondition("base element must be cyclically reduced".into()));
    }
    let (first, last) = (g.letters()[0], *g.letters().last().expect("nonempty"));
    let gm = p.pow(g, m as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let len = rng.gen_range(1..=g.len().max(2));
        let t = random_reduced_word(p, &mut rng, len);
        let (Some(&t0), Some(&t1)) = (t.letters().first(), t.letters().last()) else { continue };
        if t0 == p.letter_inverse(last) || t1 == p.letter_inverse(first) {
            continue;
        }
        let h = p.mul(&gm, &t);
        if h.len() != gm.len() + t.len() || p.in_elementary_closure(&h, g)? {
            continue;
        }
        if cayley_overlap(p, g, &h)?.is_some_and(|o| o >= m * g.len()) {
            return Ok(h);
        }
    }
    Err(Error::Budget(format!("no partner at multiple {m} within the retry limit")))
}

#[derive(Debug, Clone)]
pub struct PersistenceExperiment {
    pub g: ReducedWord,
    pub c_values: Vec<usize>,
    pub pool: Vec<Automorphism>,
    /// Partners are generated at multiples 1..=max_multiple.
    pub max_multiple: usize,
    pub partners_per_multiple: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trial {
    /// Index into the experiment pool.
    pub automorphism: usize,
    pub h: String,
    pub multiple: usize,
    pub overlap_in: usize,
    pub overlap_out: usize,
    pub image_translation_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistenceFailure {
    pub c: usize,
    pub trial: Trial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersistenceEstimate {
    pub g: String,
    pub translation_length: usize,
    pub c_range: Vec<usize>,
    pub pool_size: usize,
    pub max_multiple: usize,
    /// Smallest m such that every trial with overlap ≥ m‖g‖ kept an image
    /// overlap ≥ C‖φ(g)‖; `None` when not certified on the tested range.
    pub n_hat: BTreeMap<usize, Option<usize>>,
    pub failures: Vec<PersistenceFailure>,
    pub trial_count: usize,
    pub restriction_caveats: Vec<String>,
    #[serde(skip)]
    pub trials: Vec<Trial>,
}

impl PersistenceEstimate {
    pub fn n_hat(&self, c: usize) -> Option<usize> {
        self.n_hat.get(&c).copied().flatten()
    }

    /// Raw trials as CSV.
    pub fn trials_csv(&self) -> String {
        let mut s = String::from("pool_index,h,multiple,overlap_in,overlap_out,image_translation_length\n");
        for t in &self.trials {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.automorphism, t.h, t.multiple, t.overlap_in, t.overlap_out, t.image_translation_length
            ));
        }
        s
    }
}

pub fn estimate(p: &GroupPresentation, exp: &PersistenceExperiment) -> Result<PersistenceEstimate> {
    check_free(p)?;
    if exp.pool.is_empty() {
        return Err(Error::InvalidParameter("automorphism pool is empty".into()));
    }
    let lg = p.cyclic_length(&exp.g);
    let mut partners = Vec::new();
    for m in 1..=exp.max_multiple {
        for k in 0..exp.partners_per_multiple {
            let seed = exp.seed ^ ((m as u64) << 32) ^ k as u64;
            let h = generate_partner(p, &exp.g, m, seed)?;
            let o = cayley_overlap(p, &exp.g, &h)?.expect("partner outside E(g)");
            partners.push((m, h, o));
        }
    }
    let images: Vec<GeneratorImages> = exp.pool.iter().map(|phi| phi.try_images(p)).collect::<Result<_>>()?;
    let trials: Vec<Trial> = images
        .par_iter()
        .enumerate()
        .map(|(i, im)| -> Result<Vec<Trial>> {
            let fg = CayleyAxis::from_word(p, &im.apply(p, &exp.g))?;
            let mut buf = Vec::new();
            partners
                .iter()
                .map(|(m, h, o)| {
                    let fh = CayleyAxis::from_word(p, &im.apply(p, h))?;
                    let out = match fast_overlap(&fg, &fh, &mut buf) {
                        FastOverlap::Same => {
                            return Err(Error::Precondition("automorphism merged distinct axes".into()))
                        }
                        f => f.length().unwrap_or(0),
                    };
                    Ok(Trial {
                        automorphism: i,
                        h: format_word(p, h),
                        multiple: *m,
                        overlap_in: *o,
                        overlap_out: out,
                        image_translation_length: fg.translation_length(),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut n_hat = BTreeMap::new();
    let mut failures = Vec::new();
    for &c in &exp.c_values {
        let failing: Vec<&Trial> = trials
            .iter()
            .filter(|t| t.overlap_out < c * t.image_translation_length)
            .collect();
        let worst = failing.iter().map(|t| t.overlap_in / lg).max();
        let n = worst.map_or(1, |w| w + 1);
        if n <= exp.max_multiple {
            n_hat.insert(c, Some(n));
        } else {
            n_hat.insert(c, None);
            failures.extend(
                failing
                    .iter()
                    .filter(|t| t.overlap_in / lg >= exp.max_multiple)
                    .map(|&t| PersistenceFailure { c, trial: t.clone() }),
            );
        }
    }
    Ok(PersistenceEstimate {
        g: format_word(p, &exp.g),
        translation_length: lg,
        c_range: exp.c_values.clone(),
        pool_size: exp.pool.len(),
        max_multiple: exp.max_multiple,
        n_hat,
        failures,
        trial_count: trials.len(),
        restriction_caveats: RESTRICTIONS.iter().map(|s| s.to_string()).collect(),
        trials,
    })
}

/// φ_N: a ↦ a, b ↦ a⁻ᴺ·b.
pub fn dehn_twist(n: usize) -> Automorphism {
    Automorphism::from_moves(
        (0..n)
            .map(|_| Move::LeftMul {
                target: 1,
                by: 0,
                inverse: true,
            })
            .collect(),
    )
}

/// g = a, h = aᴺ·b in F_2: the overlap N is undone by φ_N, which sends h to b.
pub fn basis_element_counterexample(n: usize) -> Result<LemmaReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("twist power must be at least 1".into()));
    }
    let p = GroupPresentation::free(2);
    let (a, b) = (p.gen_word(0), p.gen_word(1));
    let h = p.mul(&p.pow(&a, n as i64), &b);
    let phi = dehn_twist(n);
    let (fg, fh) = (phi.apply(&p, &a)?, phi.apply(&p, &h)?);
    let before = cayley_overlap(&p, &a, &h)?.unwrap_or(usize::MAX);
    let after = cayley_overlap(&p, &fg, &fh)?;
    let r = LemmaReport::new(BASIS_COUNTEREXAMPLE)
        .input("n", n)
        .input("g", "a")
        .input("h", format_word(&p, &h))
        .quantity("overlap_in", before)
        .quantity("overlap_out", after.map_or(-1, |o| o as i64))
        .witness("image_g", format_word(&p, &fg))
        .witness("image_h", format_word(&p, &fh));
    Ok(r.check(fg == a && fh == b && before >= n, "twist images differ from a and b")
        .check(after == Some(0), "image overlap is not zero"))
}

/// The same twist on a generic g with a partner at multiple N: the image
/// overlap should still reach one period of φ_N(g).
pub fn twist_contrast(p: &GroupPresentation, g: &ReducedWord, n: usize, seed: u64) -> Result<LemmaReport> {
    if p.free_rank != 2 || !p.is_pure_free() {
        return Err(Error::Unsupported("the twist contrast is defined in F_2".into()));
    }
    let h = generate_partner(p, g, n, seed)?;
    let phi = dehn_twist(n);
    let (fg, fh) = (phi.apply(p, g)?, phi.apply(p, &h)?);
    let before = cayley_overlap(p, g, &h)?.expect("partner outside E(g)");
    let after = cayley_overlap(p, &fg, &fh)?;
    let lf = p.cyclic_length(&fg);
    let r = LemmaReport::new(TWIST_CONTRAST)
        .input("n", n)
        .input("g", format_word(p, g))
        .input("h", format_word(p, &h))
        .quantity("overlap_in", before)
        .quantity("overlap_out", after.map_or(-1, |o| o as i64))
        .quantity("image_translation_length", lf);
    Ok(r.check(after.is_some_and(|o| o >= lf), "image overlap below one period"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{nielsen_pool, parse_word, sample_candidate_generic};

    #[test]
    fn partner_example_and_preconditions() {
        let p = GroupPresentation::free(2);
        let g = parse_word(&p, "ab").unwrap();
        let h = parse_word(&p, "abababa").unwrap();
        assert!(cayley_overlap(&p, &g, &h).unwrap().unwrap() >= 6);
        assert!(generate_partner(&p, &g, 0, 1).is_err());
        for seed in 0..20 {
            let h = generate_partner(&p, &g, 3, seed).unwrap();
            assert!(!p.in_elementary_closure(&h, &g).unwrap());
            assert!(cayley_overlap(&p, &g, &h).unwrap().unwrap() >= 6);
        }
        assert!(generate_partner(&p, &parse_word(&p, "baB").unwrap(), 1, 0).is_err());
    }

    #[test]
    fn basis_element_loses_overlap() {
        for n in [1, 10, 50] {
            let r = basis_element_counterexample(n).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.quantities["overlap_out"], 0);
            assert_eq!(r.quantities["overlap_in"], n);
        }
    }

    #[test]
    fn identity_pool_gives_n_hat_at_least_c() {
        let p = GroupPresentation::free(2);
        let g = sample_candidate_generic(&p, 3, 8).unwrap();
        let exp = PersistenceExperiment {
            g: g.clone(),
            c_values: vec![1, 2, 3],
            pool: nielsen_pool(&p, 2),
            max_multiple: 8,
            partners_per_multiple: 2,
            seed: 5,
        };
        let est = estimate(&p, &exp).unwrap();
        assert!(est.failures.is_empty(), "{:?}", est.failures);
        for c in 1..=3 {
            assert!(est.n_hat(c).unwrap() >= c);
        }
        assert!(est.n_hat(1) <= est.n_hat(2) && est.n_hat(2) <= est.n_hat(3));
    }
}
