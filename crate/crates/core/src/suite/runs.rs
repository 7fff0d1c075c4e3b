use super::{Budgets, CheckEntry, Recorder, SuiteResult};
use crate::error::{Error, Result};
use crate::folds::{
    bbt_empirical, collapse_counting_check, collapse_morphism, decomposition_report, random_morphism, single_fold_witness,
    GraphMorphism, Length, BBT, COLLAPSE_COUNTING, FOLD_DECOMPOSITION,
};
use crate::free_group::{
    format_automorphism, format_word, is_primitive, nielsen_pool, random_reduced_word, sample_candidate_generic,
    Automorphism, GroupPresentation, ReducedWord,
};
use crate::persistence::{self, PersistenceExperiment, BASIS_COUNTEREXAMPLE, TWIST_CONTRAST};
use crate::projection_complex::{
    build_family, classes_in_prefix, distance_sandwich_check, hyperbolicity_probe, stabilizer_intersection_probe,
    verify_axioms, y_equality_check, ProjectionFamily, ProjectionTable, QuasiTreeGraph, Y_EQUALITY,
};
use crate::report::{LemmaReport, Verdict};
use crate::tree_geometry::lemmas::PAULIN;
use crate::tree_geometry::sweeps::{self, SweepSummary};
use crate::tree_geometry::{CharSet, TreeModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Independent stream for a named sub-run.
pub(super) fn sub_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sweep_part(name: &str, s: &SweepSummary) -> (String, Verdict, Value) {
    (name.to_string(), s.verdict(), serde_json::to_value(s).expect("serializable"))
}

fn error_entry(name: &str, e: &Error) -> CheckEntry {
    CheckEntry::new(name, Verdict::Fail, json!({ "error": e.to_string() })).with_reason(e.to_string())
}

fn entry_or_error(name: &str, r: Result<CheckEntry>) -> CheckEntry {
    r.unwrap_or_else(|e| error_entry(name, &e))
}

fn tree_for(p: &GroupPresentation) -> Result<TreeModel> {
    if p.is_pure_free() {
        TreeModel::cayley(p.clone())
    } else {
        TreeModel::bass_serre(p.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordAnalysis {
    pub input: String,
    pub reduced: String,
    pub length: usize,
    pub cyclic_core: String,
    pub conjugator: String,
    /// identity, finite_order, elliptic or loxodromic.
    pub kind: String,
    pub root: Option<String>,
    pub exponent: Option<u32>,
    pub translation_length: usize,
    pub primitive: Option<bool>,
    pub axis: Option<Value>,
    pub fixed_vertex: Option<String>,
}

pub fn analyze_word(p: &GroupPresentation, w: &ReducedWord) -> Result<WordAnalysis> {
    let t = tree_for(p)?;
    let (core, conj) = p.cyclic_reduce(w);
    let mut a = WordAnalysis {
        input: format_word(p, w),
        reduced: format_word(p, w),
        length: w.len(),
        cyclic_core: format_word(p, &core),
        conjugator: format_word(p, &conj),
        kind: "identity".into(),
        root: None,
        exponent: None,
        translation_length: 0,
        primitive: None,
        axis: None,
        fixed_vertex: None,
    };
    if w.is_identity() {
        return Ok(a);
    }
    if p.has_finite_order(w) {
        a.kind = "finite_order".into();
    }
    if let Ok(r) = p.root(w) {
        a.root = Some(format_word(p, &r.root));
        a.exponent = Some(r.exponent);
    }
    if p.is_pure_free() {
        a.primitive = Some(is_primitive(p, w)?);
    }
    match t.char_set(w)? {
        CharSet::Axis(ax) => {
            a.kind = "loxodromic".into();
            a.translation_length = ax.translation_length;
            a.axis = Some(json!({
                "base_vertex": t.format_vertex(&ax.base_vertex),
                "period_word": format_word(p, &ax.period_word),
                "conjugator": format_word(p, &ax.conjugator),
                "translation_length": ax.translation_length,
            }));
        }
        CharSet::Fixed(f) => {
            if a.kind == "identity" {
                a.kind = "elliptic".into();
            }
            a.fixed_vertex = Some(t.format_vertex(&f.vertex));
        }
    }
    Ok(a)
}

/// One entry per word; analysis never fails a suite.
pub fn analyze(spec: &str, words: &[ReducedWord], seed: u64, budgets: &Budgets) -> Result<SuiteResult> {
    let p = GroupPresentation::from_spec(spec)?;
    let mut rec = Recorder::new("analyze", spec, seed, budgets);
    for (i, w) in words.iter().enumerate() {
        let a = analyze_word(&p, w)?;
        rec.run(|| CheckEntry::new(&format!("word_{i}"), Verdict::Pass, a));
    }
    Ok(rec.finish())
}

pub(super) fn paulin_checks(budgets: &Budgets) -> CheckEntry {
    entry_or_error(PAULIN, (|| {
        let free = sweeps::paulin_sweep_cayley(2, budgets.paulin_length);
        let q = GroupPresentation::new(0, vec![2, 3])?;
        let t = TreeModel::bass_serre(q.clone())?;
        let words = sweeps::all_normal_forms(&q, budgets.paulin_free_product_letters);
        let scope = format!("Z/2*Z/3, all pairs of normal forms with <= {} letters", budgets.paulin_free_product_letters);
        let product = sweeps::paulin_sweep(&t, &words, &scope)?;
        Ok(CheckEntry::from_parts(PAULIN, vec![sweep_part("free", &free), sweep_part("free_product", &product)]))
    })())
}

pub(super) fn overlap_check(budgets: &Budgets) -> CheckEntry {
    let name = crate::tree_geometry::lemmas::OVERLAP_WPD;
    entry_or_error(name, sweeps::overlap_lemma_sweep_cayley(2, budgets.overlap_length, 1, 1).map(|s| CheckEntry::from_sweep(name, &s)))
}

pub(super) fn axis_intersection_check(budgets: &Budgets, seed: u64) -> CheckEntry {
    let name = crate::tree_geometry::lemmas::AXIS_INTERSECTION;
    entry_or_error(name, (|| {
        if budgets.random_instances == 0 {
            return Ok(CheckEntry::new(name, Verdict::Skipped, json!({})));
        }
        let m = sweeps::random_axis_intersection_sweep(2, budgets.random_instances, budgets.exponent_bound, sub_seed(seed, 3))?;
        let parts = m.iter().map(|(b, s)| sweep_part(&format!("{b:?}").to_lowercase(), s)).collect();
        Ok(CheckEntry::from_parts(name, parts))
    })())
}

fn direction_and_far_projection_checks(budgets: &Budgets, seed: u64) -> Vec<CheckEntry> {
    use crate::tree_geometry::lemmas::{DIRECTION, FAR_PROJECTIONS};
    let n = budgets.random_instances;
    let dir = entry_or_error(DIRECTION, (|| {
        let t = TreeModel::cayley(GroupPresentation::free(2))?;
        let q = GroupPresentation::new(0, vec![2, 3])?;
        let tq = TreeModel::bass_serre(q.clone())?;
        let words = sweeps::all_normal_forms(&q, budgets.paulin_free_product_letters.min(3));
        Ok(CheckEntry::from_parts(
            DIRECTION,
            vec![
                sweep_part("free", &sweeps::random_direction_sweep(&t, n, sub_seed(seed, 4))?),
                sweep_part("free_product", &sweeps::random_direction_sweep(&tq, n, sub_seed(seed, 5))?),
                sweep_part("elliptic", &sweeps::direction_elliptic_sweep(&tq, &words, budgets.direction_radius)?),
            ],
        ))
    })());
    let far = entry_or_error(FAR_PROJECTIONS, (|| {
        let t = TreeModel::cayley(GroupPresentation::free(2))?;
        Ok(CheckEntry::from_sweep(FAR_PROJECTIONS, &sweeps::random_far_projection_sweep(&t, n, sub_seed(seed, 6))?))
    })());
    vec![dir, far]
}

/// The random morphisms shared by the decomposition and BBT checks.
pub(super) fn morphisms(budgets: &Budgets, seed: u64) -> Result<Vec<GraphMorphism>> {
    (0..budgets.morphisms as u64).map(|i| random_morphism(sub_seed(seed, 100 + i))).collect()
}

pub(super) fn decomposition_check(ms: &[GraphMorphism]) -> CheckEntry {
    let mut s = SweepSummary::new(FOLD_DECOMPOSITION, format!("{} random morphisms", ms.len()));
    let mut max_moves = 0usize;
    for f in ms {
        match decomposition_report(f) {
            Ok(r) => {
                let moves: usize = ["rescale", "subdivide", "collapse", "fold"]
                    .iter()
                    .map(|k| r.quantities[*k].as_u64().unwrap_or(0) as usize)
                    .sum();
                max_moves = max_moves.max(moves);
                s.record(r);
            }
            Err(e) => s.record(LemmaReport::new(FOLD_DECOMPOSITION).fail(e.to_string())),
        }
    }
    CheckEntry::from_sweep(FOLD_DECOMPOSITION, &s.stat("max_moves", max_moves))
}

pub(super) fn bbt_check(ms: &[GraphMorphism], budgets: &Budgets, seed: u64) -> CheckEntry {
    let reports: Vec<(LemmaReport, f64)> = ms
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let est = bbt_empirical(f, budgets.bbt_triples, budgets.path_length, sub_seed(seed, 300 + i as u64));
            let ratio = ratio_f64(est.value) / ratio_f64(est.bound);
            let r = LemmaReport::new(BBT)
                .input("morphism", i)
                .quantity("bbt_empirical", est.value.to_string())
                .quantity("bbt_bound", est.bound.to_string())
                .quantity("triples", est.triples)
                .check(est.value <= est.bound, "empirical BBT exceeds the bound");
            (r, ratio)
        })
        .collect();
    let mut s = SweepSummary::new(BBT, format!("{} random morphisms, {} triples each", ms.len(), budgets.bbt_triples));
    let mut max_ratio = 0f64;
    for (r, q) in reports {
        max_ratio = max_ratio.max(q);
        s.record(r);
    }
    let s = s.stat("max_ratio_to_bound", format!("{max_ratio:.4}"));
    let mut witnesses = SweepSummary::new(BBT, "single-fold witnesses");
    if budgets.bbt_triples > 0 {
        for (k, l) in [(1, 2), (1, 1), (3, 2), (2, 1), (5, 2)].into_iter().enumerate() {
            let l = Length::new(l.0, l.1);
            let r = match single_fold_witness(l) {
                Ok(f) => {
                    let est = bbt_empirical(&f, budgets.bbt_triples, budgets.path_length, sub_seed(seed, 400 + k as u64));
                    LemmaReport::new(BBT)
                        .input("fold_length", l.to_string())
                        .quantity("bbt_empirical", est.value.to_string())
                        .quantity("bbt_bound", est.bound.to_string())
                        .check(est.value == l, "witness does not attain the fold length")
                        .check(est.value <= est.bound, "empirical BBT exceeds the bound")
                }
                Err(e) => LemmaReport::new(BBT).fail(e.to_string()),
            };
            witnesses.record(r);
        }
    }
    CheckEntry::from_parts(BBT, vec![sweep_part("random", &s), sweep_part("single_fold", &witnesses)])
}

fn ratio_f64(x: Length) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Draws (g, h) until `collapse_pairs` pairs are actually evaluated; pairs
/// with a common axis or a trivial element are skipped and counted.
pub(super) fn collapse_check(budgets: &Budgets, seed: u64) -> CheckEntry {
    let scope = format!("{} evaluated pairs over {} collapse morphisms", budgets.collapse_pairs, budgets.collapse_morphisms);
    let mut s = SweepSummary::new(COLLAPSE_COUNTING, scope);
    if budgets.collapse_morphisms == 0 || budgets.collapse_pairs == 0 {
        return CheckEntry::from_sweep(COLLAPSE_COUNTING, &s);
    }
    let fs: Result<Vec<GraphMorphism>> =
        (0..budgets.collapse_morphisms as u64).map(|i| collapse_morphism(sub_seed(seed, 500 + i))).collect();
    let fs = match fs {
        Ok(fs) => fs,
        Err(e) => return error_entry(COLLAPSE_COUNTING, &e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 7));
    let cap = 20 * budgets.collapse_pairs;
    let mut draws = 0;
    while (s.checked as usize) < budgets.collapse_pairs && draws < cap {
        draws += 1;
        let f = &fs[draws % fs.len()];
        let p = f.source.free_group();
        let (lg, lh) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let g = random_reduced_word(&p, &mut rng, lg);
        let h = random_reduced_word(&p, &mut rng, lh);
        match collapse_counting_check(f, &g, &h) {
            Ok(r) => s.record(r),
            Err(e) => s.record(LemmaReport::new(COLLAPSE_COUNTING).fail(e.to_string())),
        }
    }
    let short = (s.checked as usize) < budgets.collapse_pairs;
    let e = CheckEntry::from_sweep(COLLAPSE_COUNTING, &s.stat("draws", draws));
    if short {
        CheckEntry { verdict: Verdict::Fail, ..e }.with_reason("too many skipped pairs")
    } else {
        e
    }
}

pub fn lemma_suite(budgets: &Budgets, seed: u64) -> SuiteResult {
    let mut rec = Recorder::new("lemmas", "F2; Z2*Z3", seed, budgets);
    rec.run(|| paulin_checks(budgets));
    rec.run(|| overlap_check(budgets));
    rec.run(|| axis_intersection_check(budgets, seed));
    for e in direction_and_far_projection_checks(budgets, seed) {
        rec.run(|| e);
    }
    let ms = morphisms(budgets, seed);
    match &ms {
        Ok(ms) => {
            rec.run(|| decomposition_check(ms));
            rec.run(|| bbt_check(ms, budgets, seed));
        }
        Err(e) => rec.run(|| error_entry(FOLD_DECOMPOSITION, e)),
    }
    rec.run(|| collapse_check(budgets, seed));
    rec.finish()
}

/// Decomposition, BBT and collapse counting only.
pub fn folds_suite(budgets: &Budgets, seed: u64) -> SuiteResult {
    let mut rec = Recorder::new("folds", "F2; F3", seed, budgets);
    match morphisms(budgets, seed) {
        Ok(ms) => {
            rec.run(|| decomposition_check(&ms));
            rec.run(|| bbt_check(&ms, budgets, seed));
        }
        Err(e) => rec.run(|| error_entry(FOLD_DECOMPOSITION, &e)),
    }
    rec.run(|| collapse_check(budgets, seed));
    rec.finish()
}

/// Both oracles over every ordered pair of the pool.
pub(super) fn y_equality_sweep(p: &GroupPresentation, g: &ReducedWord, pool: &[Automorphism]) -> CheckEntry {
    let scope = format!("all ordered pairs of a pool of {} automorphisms", pool.len());
    let s = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            let mut s = SweepSummary::new(Y_EQUALITY, "");
            let mut same = 0u64;
            for j in 0..pool.len() {
                match y_equality_check(p, &pool[i], &pool[j], g) {
                    Ok(r) => {
                        same += u64::from(r.quantities["same_axis"] == true);
                        s.record(r);
                    }
                    Err(e) => s.record(LemmaReport::new(Y_EQUALITY).fail(e.to_string())),
                }
            }
            s.stat("same_axis_pairs", same)
        })
        .reduce(|| SweepSummary::new(Y_EQUALITY, ""), SweepSummary::merge);
    let s = SweepSummary { scope, ..s };
    CheckEntry::from_sweep(Y_EQUALITY, &s)
}

pub(super) type NielsenFamily = (Vec<Automorphism>, ProjectionFamily, ProjectionTable, Vec<(usize, usize)>);

/// Family, table and the nested (pool length, classes) prefixes for g over
/// the Nielsen pool of the given length.
pub(super) fn nielsen_family(
    p: &GroupPresentation,
    g: &ReducedWord,
    len: usize,
) -> Result<NielsenFamily> {
    let pool = nielsen_pool(p, len);
    let fam = build_family(p, g, &pool)?;
    let table = fam.projection_table()?;
    let nested = (2..=len).map(|l| (l, classes_in_prefix(&fam, nielsen_pool(p, l).len()))).collect();
    Ok((pool, fam, table, nested))
}

pub(super) fn axioms_check(fam: &ProjectionFamily, table: &ProjectionTable, nested: &[(usize, usize)], seed: u64) -> CheckEntry {
    let name = "projection_axioms";
    match verify_axioms(fam, table, nested, Some(sub_seed(seed, 8))) {
        Ok(r) => {
            let ok = r.passed();
            let e = CheckEntry::new(name, if ok { Verdict::Pass } else { Verdict::Fail }, &r);
            if ok {
                e
            } else {
                e.with_reason("axioms, formula comparison or P2 growth failed")
            }
        }
        Err(e) => error_entry(name, &e),
    }
}

pub(super) fn stabilizer_check(fam: &ProjectionFamily, budgets: &Budgets) -> CheckEntry {
    let name = crate::projection_complex::STABILIZER;
    let p = &fam.presentation;
    let pool: Vec<Automorphism> = sweeps::all_normal_forms(p, budgets.stabilizer_word_length)
        .into_iter()
        .map(Automorphism::inner)
        .collect();
    entry_or_error(name, stabilizer_intersection_probe(fam, &pool).map(|r| CheckEntry::from_report(name, &r)))
}

pub(super) fn window_radius(fam: &ProjectionFamily, table: &ProjectionTable, budgets: &Budgets) -> i64 {
    budgets.window_radius.unwrap_or_else(|| QuasiTreeGraph::default_radius(fam, table))
}

/// Sandwich at K = 11θ + 1; returns the graph for optional export.
pub(super) fn sandwich_check(
    table: &ProjectionTable,
    radius: i64,
    budgets: &Budgets,
    seed: u64,
) -> (CheckEntry, Option<QuasiTreeGraph>) {
    let name = crate::projection_complex::SANDWICH;
    let theta = table.theta_empirical();
    match QuasiTreeGraph::build(table, 11 * theta + 1, radius) {
        Ok(graph) => {
            let (r, stats) = distance_sandwich_check(&graph, theta, budgets.sandwich_samples, sub_seed(seed, 9));
            let mut e = CheckEntry::new(name, r.verdict, json!({ "report": r, "stats": stats, "window_radius": radius }));
            e.reason = r.reason.clone();
            (e, Some(graph))
        }
        Err(e) => (error_entry(name, &e), None),
    }
}

/// δ̂ at K = max(1, 4θ).
pub(super) fn hyperbolicity_check(table: &ProjectionTable, radius: i64, budgets: &Budgets, seed: u64) -> CheckEntry {
    let name = crate::projection_complex::HYPERBOLICITY;
    let k = (4 * table.theta_empirical()).max(1);
    match QuasiTreeGraph::build(table, k, radius) {
        Ok(graph) => {
            let (r, est) = hyperbolicity_probe(&graph, budgets.delta_points, budgets.delta_quadruples, sub_seed(seed, 10));
            let mut e = CheckEntry::new(name, r.verdict, json!({ "report": r, "estimate": est, "window_radius": radius }));
            e.reason = r.reason.clone();
            e
        }
        Err(e) => error_entry(name, &e),
    }
}

/// g defaults to a generic word drawn from the seed; the pool defaults to
/// the Nielsen pool of the budgeted length. With `dot` the C_K graph used
/// for the sandwich is returned as DOT.
pub fn complex_suite(
    spec: &str,
    g: Option<ReducedWord>,
    pool: Option<Vec<Automorphism>>,
    budgets: &Budgets,
    seed: u64,
    dot: bool,
) -> Result<(SuiteResult, Option<String>)> {
    let p = GroupPresentation::from_spec(spec)?;
    let g = match g {
        Some(g) => g,
        None => sample_candidate_generic(&p, sub_seed(seed, 1), budgets.generic_length)?,
    };
    let (pool, fam, table, nested) = match pool {
        Some(pool) => {
            let fam = build_family(&p, &g, &pool)?;
            let table = fam.projection_table()?;
            let nested = vec![(pool.len(), fam.len())];
            (pool, fam, table, nested)
        }
        None => nielsen_family(&p, &g, budgets.nielsen_length)?,
    };
    if fam.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "the pool yields {} class(es) of axes Axis(phi(g)); automorphisms whose images of g share an axis \
             are identified, and the axioms need at least 3 classes",
            fam.len()
        )));
    }
    let mut rec = Recorder::new("complex", spec, seed, budgets);
    let info = json!({
        "g": format_word(&p, &g),
        "pool_size": pool.len(),
        "classes": fam.len(),
        "representatives": fam.representatives.iter().map(|r| format_automorphism(&p, &r.automorphism)).collect::<Vec<_>>(),
    });
    rec.run(|| CheckEntry::new("family", Verdict::Pass, info));
    rec.run(|| axioms_check(&fam, &table, &nested, seed));
    rec.run(|| y_equality_sweep(&p, &g, &pool));
    rec.run(|| stabilizer_check(&fam, budgets));
    let radius = window_radius(&fam, &table, budgets);
    let mut graph = None;
    rec.run(|| {
        let (e, gr) = sandwich_check(&table, radius, budgets, seed);
        graph = gr;
        e
    });
    rec.run(|| hyperbolicity_check(&table, radius, budgets, seed));
    let dot = if dot { graph.map(|g| g.to_dot()) } else { None };
    Ok((rec.finish(), dot))
}

/// Dehn-twist counterexample for N ∈ [1, twist_max]; `a` stands in for any
/// primitive element.
pub(super) fn basis_check(budgets: &Budgets) -> CheckEntry {
    let mut s = SweepSummary::new(BASIS_COUNTEREXAMPLE, format!("g = a, N in 1..={}", budgets.twist_max));
    for n in 1..=budgets.twist_max {
        s.record(persistence::basis_element_counterexample(n).unwrap_or_else(|e| LemmaReport::new(BASIS_COUNTEREXAMPLE).fail(e.to_string())));
    }
    CheckEntry::from_sweep(BASIS_COUNTEREXAMPLE, &s)
}

pub(super) fn contrast_check(p: &GroupPresentation, g: &ReducedWord, budgets: &Budgets, seed: u64) -> CheckEntry {
    let scope = format!("g = {}, N in 1..={}", format_word(p, g), budgets.twist_max);
    let mut s = SweepSummary::new(TWIST_CONTRAST, scope);
    for n in 1..=budgets.twist_max {
        let r = persistence::twist_contrast(p, g, n, sub_seed(seed, 600 + n as u64));
        s.record(r.unwrap_or_else(|e| LemmaReport::new(TWIST_CONTRAST).fail(e.to_string())));
    }
    CheckEntry::from_sweep(TWIST_CONTRAST, &s)
}

/// Estimates n̂(C); also returns the raw trials as CSV.
pub fn persistence_suite(spec: &str, g: Option<ReducedWord>, budgets: &Budgets, seed: u64) -> Result<(SuiteResult, String)> {
    let p = GroupPresentation::from_spec(spec)?;
    let g = match g {
        Some(g) => g,
        None => sample_candidate_generic(&p, sub_seed(seed, 1), budgets.generic_length)?,
    };
    let (core, _) = p.cyclic_reduce(&g);
    let mut rec = Recorder::new("persistence", spec, seed, budgets);
    let mut csv = String::new();
    if is_primitive(&p, &core)? {
        rec.run(|| basis_check(budgets).with_reason(format!("{} is primitive", format_word(&p, &g))));
    } else {
        let exp = PersistenceExperiment {
            g: core.clone(),
            c_values: budgets.persistence_c.clone(),
            pool: nielsen_pool(&p, budgets.nielsen_length),
            max_multiple: budgets.persistence_c.iter().max().copied().unwrap_or(1) + 8,
            partners_per_multiple: 2,
            seed: sub_seed(seed, 11),
        };
        rec.run(|| {
            entry_or_error("persistence_estimate", (|| {
                let est = persistence::estimate(&p, &exp)?;
                csv = est.trials_csv();
                let ok = est.n_hat.values().all(Option::is_some);
                let e = CheckEntry::new("persistence_estimate", if ok { Verdict::Pass } else { Verdict::Fail }, &est);
                Ok(if ok { e } else { e.with_reason("n_hat(C) not certified within the multiple budget") })
            })())
        });
        if p.free_rank == 2 {
            rec.run(|| contrast_check(&p, &core, budgets, seed));
        }
    }
    Ok((rec.finish(), csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::parse_word;

    #[test]
    fn analysis_examples() {
        let p = GroupPresentation::free(2);
        let a = analyze_word(&p, &parse_word(&p, "abAB").unwrap()).unwrap();
        assert_eq!((a.translation_length, a.exponent, a.primitive), (4, Some(1), Some(false)));
        let a = analyze_word(&p, &parse_word(&p, "aA").unwrap()).unwrap();
        assert_eq!(a.kind, "identity");
        let a = analyze_word(&p, &parse_word(&p, "abab").unwrap()).unwrap();
        assert_eq!((a.root.as_deref(), a.exponent), (Some("ab"), Some(2)));
        let q = GroupPresentation::from_spec("Z2*Z3").unwrap();
        let a = analyze_word(&q, &parse_word(&q, "s1").unwrap()).unwrap();
        assert!(a.fixed_vertex.is_some());
    }

    #[test]
    fn zero_budgets_skip() {
        let b = Budgets {
            paulin_length: 0,
            paulin_free_product_letters: 0,
            overlap_length: 0,
            random_instances: 0,
            morphisms: 0,
            bbt_triples: 0,
            collapse_pairs: 0,
            direction_radius: 0,
            ..Budgets::quick()
        };
        let r = lemma_suite(&b, 1);
        assert_eq!(r.verdict, Verdict::Skipped, "{}", r.to_text());
    }

    #[test]
    fn quick_suites_pass() {
        let b = Budgets::quick();
        let r = lemma_suite(&b, 3);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_text());
        let (r, dot) = complex_suite("F2", None, None, &b, 3, true).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_text());
        assert!(dot.unwrap().starts_with("graph C_K {"));
        let (r, csv) = persistence_suite("F2", None, &b, 3).unwrap();
        assert_eq!(r.check("persistence_estimate").unwrap().verdict, Verdict::Pass);
        assert_eq!(r.check(TWIST_CONTRAST).unwrap().detail["cases"], b.twist_max);
        assert!(csv.lines().count() > 1);
        let p = GroupPresentation::free(2);
        let (r, _) = persistence_suite("F2", Some(parse_word(&p, "a").unwrap()), &b, 3).unwrap();
        assert_eq!(r.checks[0].name, BASIS_COUNTEREXAMPLE);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn single_class_pool_is_an_error() {
        let b = Budgets::quick();
        let err = complex_suite("F2", None, Some(vec![Automorphism::identity()]), &b, 1, false).unwrap_err();
        assert!(err.to_string().contains("class"));
    }
}
