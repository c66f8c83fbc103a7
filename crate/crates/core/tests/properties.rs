//! Property tests for suite-level invariants, CLI exit codes and the
//! Killing-field identity on the flat unit tangent bundle.

use nalgebra::DVector;
use proptest::prelude::*;
use std::process::Command;
use weakfs::checks::{nullity_fit, Verdict};
use weakfs::examples::ExampleConfig;
use weakfs::fields::VectorField;
use weakfs::sampling::{vec_residual, SampleSet};
use weakfs::structure::LocalSamples;
use weakfs::suite::{from_json, run_suite, to_json, ReportDocument, RunConfig};

fn run(ex: &ExampleConfig, seed: u64, samples: usize, checks: &[&str]) -> ReportDocument {
    let run = RunConfig { seed, samples, checks: checks.iter().map(|s| s.to_string()).collect(), ..RunConfig::default() };
    run_suite(ex, &run).unwrap()
}

fn paper_instance() -> impl Strategy<Value = ExampleConfig> {
    (1usize..=2, 1usize..=3, prop_oneof![Just(1.0), 0.3f64..3.0]).prop_map(|(n, s, b)| ExampleConfig::paper(n, s, b))
}

/// Groups whose residuals do not depend on a fitted quantity.
const FIT_FREE: &[&str] = &["axioms", "reeb_geometry", "nabla_f_formula", "h_tensor", "splitting", "reeb_curvature"];

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn reports_are_byte_identical(ex in paper_instance(), seed in any::<u64>(), samples in 1usize..4) {
        let a = to_json(&run(&ex, seed, samples, &["all"])).unwrap();
        let b = to_json(&run(&ex, seed, samples, &["all"])).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reports_round_trip(ex in paper_instance(), seed in any::<u64>()) {
        let doc = run(&ex, seed, 2, &["all"]);
        let text = to_json(&doc).unwrap();
        prop_assert_eq!(from_json(&text).unwrap(), doc);
    }

    #[test]
    fn verdicts_follow_residuals_and_hypotheses(ex in paper_instance(), seed in any::<u64>()) {
        let doc = run(&ex, seed, 3, &["all"]);
        for c in &doc.checks {
            let met = c.hypotheses.iter().all(|h| h.holds);
            match c.verdict {
                Verdict::Pass => prop_assert!(met && c.max_residual.is_some_and(|r| r <= c.tolerance), "{}", c.name),
                Verdict::Fail => prop_assert!(met && c.max_residual.is_none_or(|r| !(r <= c.tolerance)), "{}", c.name),
                Verdict::Skipped => prop_assert!(!met, "{} skipped with all hypotheses met", c.name),
                Verdict::Vacuous => prop_assert!(c.max_residual.is_none(), "{}", c.name),
            }
        }
        let any_fail = doc.checks.iter().any(|c| c.verdict == Verdict::Fail);
        prop_assert_eq!(doc.passed(), !any_fail);
    }

    #[test]
    fn twisted_identities_skip_when_condition_b_fails(n in 1usize..=2, s in 1usize..=3, beta in 1.05f64..3.0, seed in any::<u64>()) {
        let doc = run(&ExampleConfig::paper(n, s, beta), seed, 3, &["nabla_f_full", "reeb_curvature_long"]);
        prop_assert_eq!(doc.checks.len(), 2);
        for c in &doc.checks {
            prop_assert_eq!(c.verdict, Verdict::Skipped);
            prop_assert!(c.hypotheses.iter().any(|h| !h.holds));
        }
        prop_assert!(doc.passed());
    }

    #[test]
    fn doubling_samples_keeps_verdicts(ex in paper_instance(), seed in any::<u64>(), k in 2usize..6) {
        let one = run(&ex, seed, k, FIT_FREE);
        let two = run(&ex, seed, 2 * k, FIT_FREE);
        prop_assert_eq!(one.checks.len(), two.checks.len());
        for (a, b) in one.checks.iter().zip(&two.checks) {
            prop_assert_eq!(&a.name, &b.name);
            prop_assert!(!(a.verdict == Verdict::Pass && b.verdict == Verdict::Fail), "{}", a.name);
            if let (Some(ra), Some(rb)) = (a.max_residual, b.max_residual) {
                // the smaller sample set is a prefix of the larger one
                prop_assert!(rb >= ra, "{}: {rb} < {ra}", a.name);
                prop_assert!(rb <= 10.0 * ra.max(1e-13), "{}: {ra} -> {rb}", a.name);
            }
        }
    }

    #[test]
    fn reeb_curvature_two_ways_agree(ex in paper_instance(), seed in any::<u64>()) {
        let doc = run(&ex, seed, 4, &["reeb_curvature_formula"]);
        let c = &doc.checks[0];
        if c.hypotheses.iter().all(|h| h.holds) {
            prop_assert_eq!(c.verdict, Verdict::Pass);
            prop_assert!(c.max_residual.unwrap() <= 1e-8);
        }
    }

    #[test]
    fn nullity_residual_is_nonnegative(ex in paper_instance(), seed in any::<u64>()) {
        let st = ex.build().unwrap();
        let ls = LocalSamples::new(&st, &SampleSet::generate(&st.chart, 4, seed).unwrap()).unwrap();
        let fit = nullity_fit(&ls).unwrap();
        prop_assert!(fit.residual >= 0.0);
        // h = 0 on the paper family
        prop_assert!(!fit.mu_identifiable);
    }
}

#[test]
fn paper_family_runs_match_expected_overall() {
    let at_one = run(&ExampleConfig::paper(1, 1, 1.0), 0, 10, &["all"]);
    assert!(at_one.passed());
    let at_two = run(&ExampleConfig::paper(1, 1, 2.0), 0, 10, &["all"]);
    assert!(at_two.passed());
    for name in ["nabla f with its f-twisted companion", "Reeb curvature with f-twisted terms"] {
        let c = at_two.checks.iter().find(|c| c.name == name).unwrap();
        assert_eq!(c.verdict, Verdict::Skipped, "{name}");
    }
}

#[test]
fn coefficient_flags_appear_in_every_paper_report() {
    for (n, s, b) in [(1, 1, 1.0), (2, 3, 0.7)] {
        let doc = run(&ExampleConfig::paper(n, s, b), 1, 2, &["axioms"]);
        for flag in ["bracket coefficient", "nabla_E1 F1 coefficient", "splitting tensor sign"] {
            assert!(doc.flags.iter().any(|f| f.name == flag), "{flag} missing");
        }
    }
}

/// Translations in the base are Killing on the flat unit tangent bundle, so
/// `∇_X ∇_Y V − ∇_{∇_X Y} V = R_{X,V} Y` must hold for `V = ∂_{x_1}`.
#[test]
fn killing_identity_for_base_translation() {
    for n in [1, 2] {
        let st = ExampleConfig::unit_tangent(n).build().unwrap();
        let smp = SampleSet::generate(&st.chart, 20, 17).unwrap();
        let ls = LocalSamples::new(&st, &smp).unwrap();
        let d = st.dim();
        let v = DVector::from_fn(d, |k, _| if k == 0 { 1.0 } else { 0.0 });
        let field = VectorField::constant(&v);
        let mut worst = 0.0f64;
        for (loc, vs) in ls.iter() {
            let jet = field.jet(&loc.point).unwrap();
            let nabla_v = loc.conn.gamma_along(&v);
            for k in 0..vs.len() {
                let (x, y) = (&vs[k], &vs[(k + 1) % vs.len()]);
                let killing = loc.conn.pair(&(&nabla_v * x), y) + loc.conn.pair(&(&nabla_v * y), x);
                worst = worst.max(killing.abs());
                let nxy = loc.conn.gamma_along(x) * y;
                let lhs = loc.conn.nabla_nabla_const(&jet, x, y) - loc.conn.gamma_along(&nxy) * &v;
                worst = worst.max(vec_residual(&lhs, &loc.conn.riemann(x, &v, y)));
            }
        }
        assert!(worst <= 1e-7, "n = {n}: residual {worst:e}");
    }
}

fn cli(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_weakfs")).args(args).output().unwrap().status.code()
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["check", "axioms", "--samples", "3"]), Some(0));
    assert_eq!(cli(&["check", "all", "--samples", "2", "--beta", "2"]), Some(0));
    // a tolerance far below round-off turns passes into failures
    assert_eq!(cli(&["check", "nabla_f_formula", "--samples", "3", "--n", "2", "--s", "2", "--tol", "identity=1e-300"]), Some(1));
    assert_eq!(cli(&["check", "no_such_check"]), Some(2));
    assert_eq!(cli(&["check", "axioms", "--tol", "bogus=1"]), Some(2));
    assert_eq!(cli(&["check", "axioms", "--beta", "-1"]), Some(2));
    assert_eq!(cli(&["validate", "--example", "unit_tangent_flat", "--s", "2"]), Some(2));
    assert_eq!(cli(&["frobnicate"]), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"family": "paper_R2ns", "n": 1, "s": 1, "checks": []}"#).unwrap();
    assert_eq!(cli(&["suite", "--config", cfg.to_str().unwrap()]), Some(2));
    std::fs::write(&cfg, r#"{"family": "paper_R2ns", "n": 1, "s": 1, "samples": 2}"#).unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(cli(&["suite", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), Some(0));
    assert!(from_json(&std::fs::read_to_string(out).unwrap()).unwrap().passed());
}
