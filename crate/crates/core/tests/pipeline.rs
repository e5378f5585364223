//! Pipeline runs through the library API, including sabotaged inputs.

use fpgroup::pipeline::{
    run_paper_pipeline, Fixtures, MeridianImage, PipelineOptions, StageSelection,
};
use fpgroup::EnumerationConfig;

fn run(
    fixtures: Fixtures,
    stage: StageSelection,
    max_cosets: usize,
) -> fpgroup::pipeline::PipelineReport {
    run_paper_pipeline(&PipelineOptions {
        fixtures,
        config: EnumerationConfig::default().with_max_cosets(max_cosets),
        stage,
    })
}

#[test]
fn full_run_passes() {
    let r = run(Fixtures::embedded(), StageSelection::All, 1_000_000);
    assert!(r.passed(), "{:?}", r.failed_stages());
    for name in ["pi1_X", "pi1_U", "pi1_X_golden", "pi1_U_golden"] {
        assert_eq!(
            r.stage(name).unwrap().triviality.as_deref(),
            Some("Trivial"),
            "{name}"
        );
    }
    assert_eq!(r.scripts.len(), 19);
    assert!(r.scripts.iter().all(|s| s.verified));
    assert!(r.characteristic_numbers.as_ref().unwrap().passed());
}

#[test]
fn tiny_coset_limit_is_inconclusive() {
    let r = run(Fixtures::embedded(), StageSelection::All, 10);
    for name in ["pi1_X", "pi1_U"] {
        let t = r.stage(name).unwrap().triviality.clone().unwrap();
        assert!(t.starts_with("Inconclusive"), "{name}: {t}");
    }
    for name in ["pi1_X_golden", "pi1_U_golden"] {
        assert_eq!(
            r.stage(name).unwrap().triviality.as_deref(),
            Some("Inconclusive")
        );
    }
    assert!(!r.passed());
}

#[test]
fn changed_gluing_word_is_flagged() {
    let fx = Fixtures::embedded();
    let mut g = fx.gluing("x").unwrap();
    // b^-1 a b a^-1 ~ alpha2 becomes b^-1 a ~ alpha2.
    g.identifications[1].0 = fpgroup::Word::parse_simple("b^-1 a");
    let r = run(fx.with_gluing("x", g), StageSelection::X, 1_000_000);
    assert!(
        r.failed_stages().contains(&"pi1_X"),
        "{:?}",
        r.failed_stages()
    );
}

#[test]
fn meridian_not_killed_is_flagged() {
    let fx = Fixtures::embedded();
    let mut g = fx.gluing("u").unwrap();
    g.meridian_right = MeridianImage::Word(g.meridian_left.clone());
    let r = run(fx.with_gluing("u", g), StageSelection::U, 1_000_000);
    assert!(!r.stage("pi1_U").unwrap().passed);
}

#[test]
fn charnum_only() {
    let r = run(Fixtures::embedded(), StageSelection::Charnum, 1_000_000);
    assert_eq!(r.stages.len(), 1);
    assert!(r.passed());
}
