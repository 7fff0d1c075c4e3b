//! Full-scale acceptance run: one line per criterion, nonzero exit on failure.

use serde_json::Value;
use std::process::ExitCode;
use treeaxes::free_group::{GroupPresentation, ReducedWord};
use treeaxes::persistence::dehn_twist;
use treeaxes::report::Verdict;
use treeaxes::suite::{acceptance_pipeline, Budgets, SuiteResult, ACCEPTANCE_CHECKS};
use treeaxes::tree_geometry::{axis_overlap, TreeModel};

const SEED: u64 = 1;

struct Ledger {
    failed: usize,
}

impl Ledger {
    fn line(&mut self, n: usize, name: &str, problems: Vec<String>, summary: String) {
        if problems.is_empty() {
            println!("criterion {n:>2} {name:<22} PASS  {summary}");
        } else {
            self.failed += 1;
            println!("criterion {n:>2} {name:<22} FAIL  {}", problems.join("; "));
        }
    }
}

/// Collects unmet requirements for one criterion.
#[derive(Default)]
struct Req(Vec<String>);

impl Req {
    fn ok(&mut self, cond: bool, what: impl Into<String>) -> &mut Self {
        if !cond {
            self.0.push(what.into());
        }
        self
    }
}

fn int(v: &Value) -> i64 {
    v.as_i64().unwrap_or(i64::MIN)
}

fn sweep_clean(r: &mut Req, label: &str, v: &Value, at_least: i64) {
    r.ok(int(&v["failure_count"]) == 0, format!("{label}: {} failures", v["failure_count"]));
    r.ok(int(&v["checked"]) >= at_least, format!("{label}: {} checked, need {at_least}", v["checked"]));
}

fn ms(run: &SuiteResult, name: &str) -> u64 {
    run.timing.checks_ms.get(name).copied().unwrap_or(u64::MAX)
}

fn main() -> ExitCode {
    let b = Budgets::default();
    let scale = [
        b.paulin_length == 6,
        b.paulin_free_product_letters == 4,
        b.overlap_length == 8,
        b.random_instances == 1000 && b.exponent_bound == 4,
        b.morphisms == 100 && b.bbt_triples == 1000,
        b.collapse_morphisms == 10 && b.collapse_pairs == 1000,
        b.nielsen_length == 4,
        b.sandwich_samples == 1000,
        b.delta_quadruples == 10_000,
        b.twist_max == 50,
    ];
    assert!(scale.iter().all(|&x| x), "default budgets are below acceptance scale");

    let first = acceptance_pipeline(&b, SEED);
    let second = acceptance_pipeline(&b, SEED);
    let names: Vec<&str> = first.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ACCEPTANCE_CHECKS);
    let d = |name: &str| &first.check(name).expect("check present").detail;
    let verdict = |name: &str| first.check(name).map(|c| c.verdict);
    let mut out = Ledger { failed: 0 };

    let mut r = Req::default();
    let v = d("paulin_bridge");
    sweep_clean(&mut r, "F_2", &v["free"], 1);
    sweep_clean(&mut r, "Z/2*Z/3", &v["free_product"], 1);
    r.ok(ms(&first, "paulin_bridge") < 120_000, "over 2 minutes");
    r.ok(verdict("paulin_bridge") == Some(Verdict::Pass), "verdict");
    let summary = format!("{} + {} pairs, 0 failures, {} ms", v["free"]["checked"], v["free_product"]["checked"], ms(&first, "paulin_bridge"));
    out.line(1, "paulin_bridge", r.0, summary);

    let mut r = Req::default();
    let v = d("overlap_wpd");
    sweep_clean(&mut r, "F_2", v, 1);
    r.ok(ms(&first, "overlap_wpd") < 300_000, "over 5 minutes");
    r.ok(verdict("overlap_wpd") == Some(Verdict::Pass), "verdict");
    out.line(2, "overlap_wpd", r.0, format!("{} pairs at (1,1), {} ms", v["checked"], ms(&first, "overlap_wpd")));

    let mut r = Req::default();
    let v = d("axis_intersection");
    for branch in ["disjoint", "touching", "overlapping"] {
        sweep_clean(&mut r, branch, &v[branch], 1000);
    }
    r.ok(verdict("axis_intersection") == Some(Verdict::Pass), "verdict");
    out.line(3, "axis_intersection", r.0, "1000 per branch, exponent bound 4".into());

    let mut r = Req::default();
    let v = d("fold_decomposition");
    sweep_clean(&mut r, "morphisms", v, 100);
    r.ok(verdict("fold_decomposition") == Some(Verdict::Pass), "verdict");
    out.line(4, "fold_decomposition", r.0, format!("100 morphisms recomposed exactly, max {} moves", v["stats"]["max_moves"]));

    let mut r = Req::default();
    let v = d("bbt_bound");
    sweep_clean(&mut r, "random", &v["random"], 100);
    sweep_clean(&mut r, "single fold", &v["single_fold"], 1);
    let ratio: f64 = v["random"]["stats"]["max_ratio_to_bound"].as_str().and_then(|s| s.parse().ok()).unwrap_or(f64::INFINITY);
    r.ok(ratio <= 1.0, format!("ratio {ratio} above the bound"));
    r.ok(verdict("bbt_bound") == Some(Verdict::Pass), "verdict");
    out.line(5, "bbt_bound", r.0, format!("10^3 triples per morphism, max ratio {ratio}, single-fold witnesses exact"));

    let mut r = Req::default();
    let v = d("collapse_counting");
    sweep_clean(&mut r, "pairs", v, 1000);
    r.ok(first.budgets.collapse_morphisms == 10, "collapse morphisms");
    r.ok(verdict("collapse_counting") == Some(Verdict::Pass), "verdict");
    out.line(6, "collapse_counting", r.0, format!("{} pairs over 10 morphisms", v["checked"]));

    let mut r = Req::default();
    let v = d("y_equality");
    sweep_clean(&mut r, "pool pairs", v, 1);
    r.ok(verdict("y_equality") == Some(Verdict::Pass), "verdict");
    out.line(7, "y_equality", r.0, format!("{} pairs, g = {}", v["checked"], v["g"]));

    let mut r = Req::default();
    let v = d("projection_axioms");
    let (te, tf) = (int(&v["theta_empirical"]), int(&v["formula"]["theta"]));
    r.ok(v["violations_at_theta"] == serde_json::json!([0, 0]), "(P0)/(P1) violated at theta_emp");
    r.ok(te <= tf, format!("theta_emp {te} > theta_formula {tf}"));
    r.ok(v["p2_bounded"] == true, "P2 count grows");
    let levels: Vec<i64> = v["p2_levels"].as_array().map(|a| a.iter().map(|l| int(&l["pool_length"])).collect()).unwrap_or_default();
    r.ok(levels == [2, 3, 4], format!("nested pools {levels:?}"));
    r.ok(verdict("projection_axioms") == Some(Verdict::Pass), "verdict");
    out.line(8, "projection_axioms", r.0, format!("theta_emp {te} <= theta_formula {tf}, P2 bounded over pools 2,3,4"));

    let mut r = Req::default();
    let v = d("distance_sandwich");
    let s = &v["stats"];
    let (k, theta, samples) = (int(&s["k"]), int(&s["theta"]), int(&s["samples"]));
    r.ok(k > 11 * theta, format!("K = {k} not above 11 theta"));
    r.ok(samples >= 1000 && int(&s["checked"]) == samples, "sample count");
    r.ok(int(&s["lower_violations"]) == 0 && int(&s["upper_violations"]) == 0, "sandwich violated");
    r.ok(20 * int(&s["window_artifacts"]) < samples, format!("{} window artifacts", s["window_artifacts"]));
    r.ok(verdict("distance_sandwich") == Some(Verdict::Pass), "verdict");
    out.line(9, "distance_sandwich", r.0, format!("K {k}, {samples} pairs, {} artifacts", s["window_artifacts"]));

    let mut r = Req::default();
    let v = &d("hyperbolicity")["estimate"];
    let k = int(&v["k"]);
    r.ok(k == (4 * theta).max(1), format!("K = {k}"));
    r.ok(int(&v["quadruples"]) >= 10_000, "quadruples");
    r.ok(int(&v["twice_delta"]) <= 4 * k, format!("2 delta = {} > 4K", v["twice_delta"]));
    r.ok(verdict("hyperbolicity") == Some(Verdict::Pass), "verdict");
    out.line(10, "hyperbolicity", r.0, format!("delta {} <= 2K = {}", int(&v["twice_delta"]) as f64 / 2.0, 2 * k));

    let mut r = Req::default();
    let v = d("persistence_control");
    sweep_clean(&mut r, "basis", &v["basis"], 50);
    sweep_clean(&mut r, "generic", &v["generic"], 50);
    let p = GroupPresentation::free(2);
    let t = TreeModel::cayley(p.clone()).unwrap();
    let a = p.gen_word(0);
    for n in 1..=50usize {
        let h: ReducedWord = p.mul(&p.pow(&a, n as i64), &p.gen_word(1));
        let phi = dehn_twist(n);
        let (fa, fh) = (phi.apply(&p, &a).unwrap(), phi.apply(&p, &h).unwrap());
        let before = axis_overlap(&t, &a, &h).unwrap().length();
        let after = axis_overlap(&t, &fa, &fh).unwrap().length();
        r.ok(before == Some(n) && after == Some(0), format!("N = {n}: overlap {before:?} -> {after:?}"));
    }
    r.ok(verdict("persistence_control") == Some(Verdict::Pass), "verdict");
    out.line(11, "persistence_control", r.0, "g = a: overlap_out 0 for N in 1..50; generic g keeps a full period".into());

    let mut r = Req::default();
    r.ok(first.to_json_without_timing() == second.to_json_without_timing(), "outputs differ between runs");
    let total = first.timing.total_ms + second.timing.total_ms;
    r.ok(total < 20 * 60 * 1000, format!("two runs took {total} ms"));
    out.line(12, "determinism", r.0, format!("two runs identical modulo timing, {total} ms total"));

    if out.failed == 0 {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria fail", out.failed);
        ExitCode::FAILURE
    }
}
