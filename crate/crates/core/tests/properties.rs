use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treeaxes::folds::{bbt_empirical, fold_decompose, random_morphism, verify_recomposition};
use treeaxes::free_group::{is_primitive, random_cyclically_reduced, random_reduced_word, right_transvections, Automorphism, GroupPresentation, Letter, ReducedWord};
use treeaxes::tree_geometry::{axis_overlap, AxisFrame, GTree, TreeModel};

fn f2() -> GroupPresentation {
    GroupPresentation::free(2)
}

fn z2z3() -> GroupPresentation {
    GroupPresentation::new(0, vec![2, 3]).unwrap()
}

fn word(p: &GroupPresentation, seed: u64, len: usize) -> ReducedWord {
    random_reduced_word(p, &mut ChaCha8Rng::seed_from_u64(seed), len)
}

fn tree(p: &GroupPresentation) -> TreeModel {
    if p.is_pure_free() {
        TreeModel::cayley(p.clone()).unwrap()
    } else {
        TreeModel::bass_serre(p.clone()).unwrap()
    }
}

fn presentation(free: bool) -> GroupPresentation {
    if free {
        f2()
    } else {
        z2z3()
    }
}

fn automorphism(p: &GroupPresentation, picks: &[usize]) -> Automorphism {
    let gens = right_transvections(p);
    Automorphism::from_moves(picks.iter().map(|&i| gens[i % gens.len()].clone()).collect())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn reduction_is_idempotent_and_agrees_with_multiplication(raw in prop::collection::vec((0u32..2, prop::bool::ANY), 0..24)) {
        let p = f2();
        let letters: Vec<Letter> = raw.iter().map(|&(f, neg)| Letter { factor: f, exp: if neg { -1 } else { 1 } }).collect();
        let w = p.reduce(&letters).unwrap();
        prop_assert_eq!(&p.reduce(w.letters()).unwrap(), &w);
        for pair in w.letters().windows(2) {
            prop_assert!(pair[0] != p.letter_inverse(pair[1]));
        }
        let by_mul = letters.iter().fold(ReducedWord::identity(), |acc, &l| p.mul(&acc, &p.reduce(&[l]).unwrap()));
        prop_assert_eq!(by_mul, w);
    }

    #[test]
    fn group_laws(free in prop::bool::ANY, s in any::<u64>(), n in 0usize..12) {
        let p = presentation(free);
        let (a, b, c) = (word(&p, s, n), word(&p, s ^ 1, n + 1), word(&p, s ^ 2, 3));
        prop_assert_eq!(p.mul(&p.mul(&a, &b), &c), p.mul(&a, &p.mul(&b, &c)));
        prop_assert!(p.mul(&a, &p.inverse(&a)).is_identity());
        prop_assert_eq!(p.inverse(&p.mul(&a, &b)), p.mul(&p.inverse(&b), &p.inverse(&a)));
    }

    #[test]
    fn root_powers_back(free in prop::bool::ANY, s in any::<u64>(), n in 1usize..8, k in 1i64..4) {
        let p = presentation(free);
        let g = p.pow(&random_cyclically_reduced(&p, &mut ChaCha8Rng::seed_from_u64(s), n), k);
        prop_assume!(!g.is_identity() && !p.has_finite_order(&g));
        let r = p.root(&g).unwrap();
        prop_assert_eq!(p.pow(&r.root, r.exponent as i64), g);
        prop_assert!(r.exponent as i64 >= k && r.exponent as i64 % k == 0);
        prop_assert_eq!(p.root(&r.root).unwrap().exponent, 1);
    }

    #[test]
    fn automorphisms_are_invertible_homomorphisms(picks in prop::collection::vec(0usize..16, 0..8), s in any::<u64>()) {
        let p = f2();
        let phi = automorphism(&p, &picks);
        let inv = phi.inverse(&p);
        let (u, v) = (word(&p, s, 6), word(&p, s ^ 7, 5));
        let pu = phi.apply(&p, &u).unwrap();
        prop_assert_eq!(&inv.apply(&p, &pu).unwrap(), &u);
        prop_assert_eq!(phi.apply(&p, &p.mul(&u, &v)).unwrap(), p.mul(&pu, &phi.apply(&p, &v).unwrap()));
        prop_assert!(is_primitive(&p, &phi.apply(&p, &p.gen_word(0)).unwrap()).unwrap());
    }

    #[test]
    fn translation_length_is_a_conjugacy_invariant(free in prop::bool::ANY, s in any::<u64>(), n in 1usize..10, k in 1i64..4) {
        let p = presentation(free);
        let t = tree(&p);
        let (g, u) = (word(&p, s, n), word(&p, s ^ 3, 5));
        let l = t.translation_length(&g);
        prop_assert_eq!(t.translation_length(&p.conjugate(&u, &g)), l);
        prop_assert_eq!(t.translation_length(&p.pow(&g, k)), k as usize * l);
        if free {
            prop_assert_eq!(l, p.cyclic_length(&g));
        }
    }

    #[test]
    fn displacement_is_length_plus_twice_the_distance_to_the_axis(free in prop::bool::ANY, s in any::<u64>(), n in 1usize..9) {
        let p = presentation(free);
        let t = tree(&p);
        let g = word(&p, s, n);
        prop_assume!(t.translation_length(&g) > 0);
        let frame = AxisFrame::new(&t, &g).unwrap();
        let l = frame.translation_length;
        for i in 0..4u64 {
            let v = t.act(&word(&p, s ^ (11 + i), 6), &t.root_vertex());
            let (foot, d) = frame.project(&t, &v);
            prop_assert_eq!(t.distance(&v, &foot), d);
            prop_assert!(frame.contains(&t, &foot));
            prop_assert_eq!(t.distance(&v, &t.act(&g, &v)), l + 2 * d);
            let q = frame.position(&t, &foot);
            prop_assert_eq!(t.act(&g, &foot), frame.vertex_at(&t, q + l as i64));
        }
    }

    #[test]
    fn overlap_length_is_symmetric_and_conjugation_equivariant(free in prop::bool::ANY, s in any::<u64>(), n in 1usize..8) {
        let p = presentation(free);
        let t = tree(&p);
        let (g, h, u) = (word(&p, s, n), word(&p, s ^ 5, n + 1), word(&p, s ^ 9, 4));
        prop_assume!(t.translation_length(&g) > 0 && t.translation_length(&h) > 0);
        let o = axis_overlap(&t, &g, &h).unwrap().length();
        prop_assert_eq!(axis_overlap(&t, &h, &g).unwrap().length(), o);
        let (cg, ch) = (p.conjugate(&u, &g), p.conjugate(&u, &h));
        prop_assert_eq!(axis_overlap(&t, &cg, &ch).unwrap().length(), o);
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn fold_sequences_recompose_and_bbt_is_bounded(seed in any::<u64>()) {
        let f = random_morphism(seed).unwrap();
        let seq = fold_decompose(&f).unwrap();
        prop_assert!(verify_recomposition(&f, &seq).unwrap());
        let est = bbt_empirical(&f, 40, 6, seed);
        prop_assert!(est.value >= 0.into());
        prop_assert!(est.value <= est.bound, "{} > {}", est.value, est.bound);
        prop_assert_eq!(est.bound, f.bbt_bound());
    }
}
