use super::ProjectionFamily;
use crate::error::Result;
use crate::free_group::{format_automorphism, format_word, Automorphism, GroupPresentation, ReducedWord};
use crate::report::LemmaReport;
use crate::tree_geometry::cayley::{push_reduced, CayleyAxis};

pub const Y_EQUALITY: &str = "y_equality";
pub const STABILIZER: &str = "stabilizer_intersection";

/// First `n` letters of the end u·c^∞ (or u·(c⁻¹)^∞) of an axis.
fn end_prefix(a: &CayleyAxis, negative: bool, n: usize) -> Vec<u8> {
    let mut w = a.conj.clone();
    let c: Vec<u8> = if negative {
        a.core.iter().rev().map(|&x| x ^ 1).collect()
    } else {
        a.core.clone()
    };
    let mut i = 0;
    while w.len() < n {
        push_reduced(&mut w, c[i % c.len()]);
        i += 1;
    }
    w.truncate(n);
    w
}

/// Whether two loxodromics have the same axis, decided on the boundary: the
/// axes coincide iff their pairs of ends coincide. Eventually periodic ends
/// u·c^∞ agree iff they agree on max(|u|,|u'|) + |c| + |c'| letters.
pub fn axes_equal_by_ends(p: &GroupPresentation, g: &ReducedWord, h: &ReducedWord) -> Result<bool> {
    let (a, b) = (CayleyAxis::from_word(p, g)?, CayleyAxis::from_word(p, h)?);
    let n = a.conj.len().max(b.conj.len()) + a.core.len() + b.core.len();
    let ends = |x: &CayleyAxis| [end_prefix(x, false, n), end_prefix(x, true, n)];
    let (ea, eb) = (ends(&a), ends(&b));
    Ok((ea[0] == eb[0] && ea[1] == eb[1]) || (ea[0] == eb[1] && ea[1] == eb[0]))
}

/// φ₁⁻¹φ₂(g) ∈ E(g) against Axis(φ₁(g)) = Axis(φ₂(g)).
pub fn y_equality_check(
    p: &GroupPresentation,
    phi1: &Automorphism,
    phi2: &Automorphism,
    g: &ReducedWord,
) -> Result<LemmaReport> {
    let (i1, i2) = (phi1.apply(p, g)?, phi2.apply(p, g)?);
    let pulled = phi1.inverse(p).apply(p, &i2)?;
    let algebraic = p.in_elementary_closure(&pulled, g)?;
    let geometric = axes_equal_by_ends(p, &i1, &i2)?;
    let r = LemmaReport::new(Y_EQUALITY)
        .input("g", format_word(p, g))
        .input("phi1", format_automorphism(p, phi1))
        .input("phi2", format_automorphism(p, phi2))
        .quantity("in_elementary_closure", algebraic)
        .quantity("same_axis", geometric)
        .witness("pulled_back", format_word(p, &pulled));
    Ok(r.check(algebraic == geometric, "membership and axis equality disagree"))
}

/// Searches `pool` for automorphisms ξ with ξ·Y = Y for two distinct classes
/// Y; ξ·Y_φ = Y_{ξφ}, which equals Y_φ iff φ⁻¹ξφ(g) ∈ E(g). Such witnesses
/// exist (finite-order symmetries of the tree), but with root(g) = g each one
/// must act on every stabilized class by φ⁻¹ξφ(g) = g^±1.
pub fn stabilizer_intersection_probe(family: &ProjectionFamily, pool: &[Automorphism]) -> Result<LemmaReport> {
    let p = &family.presentation;
    let g = &family.g;
    let g_inv = p.inverse(g);
    let root_is_g = p.root(g)?.exponent == 1;
    let mut witnesses = Vec::new();
    let mut off_symmetry = Vec::new();
    let mut stabilized_total = 0usize;
    for xi in pool {
        let images = xi.try_images(p)?;
        let mut stab = Vec::new();
        let mut twisted = false;
        for (k, r) in family.representatives.iter().enumerate() {
            let pulled = r.pull_back(p, &images.apply(p, &r.image));
            if p.in_elementary_closure(&pulled, g)? {
                stab.push(k);
                twisted |= pulled != *g && pulled != g_inv;
            }
        }
        stabilized_total += stab.len();
        if stab.len() >= 2 {
            let line = format!("{} fixes classes {:?}", format_automorphism(p, xi), stab);
            if twisted {
                off_symmetry.push(line.clone());
            }
            witnesses.push(line);
        }
    }
    let mut r = LemmaReport::new(STABILIZER)
        .input("g", format_word(p, g))
        .input("pool_size", pool.len())
        .input("classes", family.len())
        .quantity("witnesses", witnesses.len())
        .quantity("stabilized_pairs", stabilized_total);
    if let Some(w) = off_symmetry.first().or(witnesses.first()) {
        r = r.witness("first", w.clone());
    }
    Ok(r.check(!root_is_g || off_symmetry.is_empty(), "a common stabilizer moves g off g^±1"))
}

#[cfg(test)]
mod tests {
    use super::super::build_family;
    use super::*;
    use crate::free_group::{parse_word, Move};

    #[test]
    fn ends_decide_axis_equality() {
        let p = GroupPresentation::free(2);
        let w = |s: &str| parse_word(&p, s).unwrap();
        assert!(axes_equal_by_ends(&p, &w("ab"), &w("abab")).unwrap());
        assert!(axes_equal_by_ends(&p, &w("ab"), &w("BA")).unwrap());
        assert!(axes_equal_by_ends(&p, &w("ab"), &w("ba")).is_ok_and(|e| !e));
        assert!(!axes_equal_by_ends(&p, &w("aab"), &w("aaab")).unwrap());
        assert!(axes_equal_by_ends(&p, &w("aB"), &w("aBaB")).unwrap());
    }

    #[test]
    fn y_equality_on_conjugations() {
        let p = GroupPresentation::free(2);
        let g = parse_word(&p, "abaBB").unwrap();
        let id = Automorphism::identity();
        let ad_g = Automorphism::inner(g.clone());
        let ad_b = Automorphism::inner(p.gen_word(1));
        let r = y_equality_check(&p, &id, &ad_g, &g).unwrap();
        assert!(r.passed() && r.quantities["same_axis"] == true);
        let r = y_equality_check(&p, &id, &ad_b, &g).unwrap();
        assert!(r.passed() && r.quantities["same_axis"] == false);
        assert!(y_equality_check(&p, &ad_b, &ad_b, &g).unwrap().passed());
    }

    #[test]
    fn stabilizers() {
        let p = GroupPresentation::free(2);
        let g = parse_word(&p, "ab").unwrap();
        // a ↦ b⁻¹, b ↦ a⁻¹ sends ab to its inverse.
        let flip = Automorphism::from_moves(vec![Move::Swap(0, 1), Move::Invert(0), Move::Invert(1)]);
        assert_eq!(flip.apply(&p, &g).unwrap(), p.inverse(&g));
        let inner = |s: &str| Automorphism::inner(parse_word(&p, s).unwrap());
        let small = build_family(&p, &g, &[Automorphism::identity(), inner("a")]).unwrap();
        let probe = stabilizer_intersection_probe(&small, &[inner("ab"), flip.clone()]).unwrap();
        assert!(probe.passed());
        assert_eq!(probe.quantities["witnesses"], 0);
        assert_eq!(probe.quantities["stabilized_pairs"], 2);

        // The flip also preserves b·Axis(ab) = Axis(ba).
        let pool: Vec<Automorphism> = ["a", "b", "ab", "aab"].iter().map(|s| inner(s)).chain([Automorphism::identity()]).collect();
        let fam = build_family(&p, &g, &pool).unwrap();
        let probe = stabilizer_intersection_probe(&fam, &[inner("ab"), flip]).unwrap();
        assert!(probe.passed(), "{probe:?}");
        assert_eq!(probe.quantities["witnesses"], 1);

        let words = crate::tree_geometry::sweeps::all_normal_forms(&p, 5);
        let ads: Vec<Automorphism> = words.iter().filter(|w| !w.is_empty()).map(|w| Automorphism::inner(w.clone())).collect();
        let probe = stabilizer_intersection_probe(&fam, &ads).unwrap();
        assert!(probe.passed());
        assert_eq!(probe.quantities["witnesses"], 0);
    }
}
