use super::runs::{self, sub_seed};
use super::{Budgets, CheckEntry, Recorder, SuiteResult};
use crate::free_group::{format_word, sample_candidate_generic, GroupPresentation};
use crate::report::Verdict;
use serde_json::{json, Value};

/// Check names of the acceptance pipeline, in run order. Determinism is a
/// property of two runs and is checked by comparing their outputs.
pub const ACCEPTANCE_CHECKS: [&str; 11] = [
    "paulin_bridge",
    "overlap_wpd",
    "axis_intersection",
    "fold_decomposition",
    "bbt_bound",
    "collapse_counting",
    "y_equality",
    "projection_axioms",
    "distance_sandwich",
    "hyperbolicity",
    "persistence_control",
];

/// Every tree, fold and projection-complex check at the given budgets on F_2
/// (and Z/2*Z/3 for the Paulin and direction sweeps), with the generic g
/// drawn from the seed.
pub fn acceptance_pipeline(budgets: &Budgets, seed: u64) -> SuiteResult {
    let mut rec = Recorder::new("acceptance", "F2; Z2*Z3", seed, budgets);
    rec.run(|| runs::paulin_checks(budgets));
    rec.run(|| runs::overlap_check(budgets));
    rec.run(|| runs::axis_intersection_check(budgets, seed));
    match runs::morphisms(budgets, seed) {
        Ok(ms) => {
            rec.run(|| runs::decomposition_check(&ms));
            rec.run(|| runs::bbt_check(&ms, budgets, seed));
        }
        Err(e) => {
            for name in ["fold_decomposition", "bbt_bound"] {
                rec.run(|| CheckEntry::new(name, Verdict::Fail, json!({ "error": e.to_string() })).with_reason(e.to_string()));
            }
        }
    }
    rec.run(|| runs::collapse_check(budgets, seed));

    let p = GroupPresentation::free(2);
    let family = sample_candidate_generic(&p, sub_seed(seed, 1), budgets.generic_length)
        .and_then(|g| runs::nielsen_family(&p, &g, budgets.nielsen_length).map(|f| (g, f)));
    match family {
        Ok((g, (pool, fam, table, nested))) => {
            rec.run(|| {
                let mut e = runs::y_equality_sweep(&p, &g, &pool);
                if let Value::Object(m) = &mut e.detail {
                    m.insert("g".into(), format_word(&p, &g).into());
                }
                e
            });
            rec.run(|| runs::axioms_check(&fam, &table, &nested, seed));
            let radius = runs::window_radius(&fam, &table, budgets);
            rec.run(|| runs::sandwich_check(&table, radius, budgets, seed).0);
            rec.run(|| runs::hyperbolicity_check(&table, radius, budgets, seed));
            rec.run(|| {
                let basis = runs::basis_check(budgets);
                let contrast = runs::contrast_check(&p, &g, budgets, seed);
                CheckEntry::from_parts(
                    "persistence_control",
                    vec![
                        ("basis".into(), basis.verdict, basis.detail),
                        ("generic".into(), contrast.verdict, contrast.detail),
                    ],
                )
            });
        }
        Err(e) => {
            for name in &ACCEPTANCE_CHECKS[6..] {
                rec.run(|| CheckEntry::new(name, Verdict::Fail, json!({ "error": e.to_string() })).with_reason(e.to_string()));
            }
        }
    }
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_pipeline_names_and_passes() {
        let r = acceptance_pipeline(&Budgets::quick(), 5);
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ACCEPTANCE_CHECKS);
        for c in &r.checks[..10] {
            assert_eq!(c.verdict, Verdict::Pass, "{}", r.to_text());
        }
        let control = r.check("persistence_control").unwrap();
        assert_eq!(control.detail["basis"]["failure_count"], 0);
        assert_eq!(control.detail["generic"]["cases"], 5);
    }
}
