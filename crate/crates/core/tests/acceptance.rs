//! Acceptance run: prints one PASS or FAIL line per criterion and fails if
//! any criterion fails.
//!
//! cargo test --test acceptance -- --nocapture

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use fpgroup::charnum::{freedman_type, reproduce_paper_table, CharNumbers, HomeoType};
use fpgroup::coset::{CosetTable, WordVerdict};
use fpgroup::derivation::{check_in_order, oracle_with_table, Verdict};
use fpgroup::pipeline::{fixture, script_groups, Fixtures};
use fpgroup::presentation::AbelianGroup;
use fpgroup::snf::{smith_normal_form, IntMatrix};
use fpgroup::{
    check_script, enumerate, DerivationEnvironment, EnumerationConfig, EnumerationResult,
    Presentation, Strategy, Word,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn w(s: &str) -> Word {
    Word::parse_simple(s)
}

fn complete(p: &Presentation, strategy: Strategy) -> Result<(usize, CosetTable, Duration), String> {
    let cfg = EnumerationConfig {
        strategy,
        ..Default::default()
    };
    let t = Instant::now();
    match enumerate(p, &[], &cfg).map_err(|e| e.to_string())? {
        EnumerationResult::Completed { index, table } => Ok((index, table, t.elapsed())),
        EnumerationResult::Overflow { cosets_used } => Err(format!(
            "{} {strategy:?}: overflow after {cosets_used} cosets",
            p.label()
        )),
    }
}

fn trivial_under_both(name: &str) -> Check {
    let p = fixture(name).map_err(|e| e.to_string())?.explicit_part();
    let mut parts = Vec::new();
    for strategy in [Strategy::Hlt, Strategy::Felsch] {
        let (index, _, dt) = complete(&p, strategy)?;
        ensure(index == 1, format!("{name} {strategy:?}: index {index}"))?;
        ensure(
            dt < Duration::from_secs(5),
            format!("{name} {strategy:?}: took {dt:.2?}"),
        )?;
        parts.push(format!("{strategy:?} Completed(1) in {dt:.1?}"));
    }
    Ok(format!(
        "{name}, {} generators: {}",
        p.generators().len(),
        parts.join(", ")
    ))
}

fn derivation_corpus() -> Check {
    let fx = Fixtures::embedded();
    let (mut verified, mut oracle_true, mut inconclusive, mut mutants) = (0, 0, 0, 0);
    for (label, names) in script_groups() {
        let p = fixture(label).map_err(|e| e.to_string())?;
        let scripts: Vec<_> = names
            .iter()
            .map(|n| fx.script(n).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let table = match enumerate(
            &p.explicit_part(),
            &[],
            &EnumerationConfig::default().with_max_cosets(200_000),
        )
        .map_err(|e| e.to_string())?
        {
            EnumerationResult::Completed { table, .. } => Some(table),
            EnumerationResult::Overflow { .. } => None,
        };
        let mut env = DerivationEnvironment::new();
        let mut envs = Vec::new();
        for (s, (name, r)) in scripts
            .iter()
            .zip(check_in_order(&scripts, &p, &mut env.clone()))
        {
            envs.push(env.clone());
            ensure(r.is_verified(), format!("{name}: {:?}", r.verdict))?;
            env.admit(s, &r);
            verified += 1;
            match &table {
                Some(t) => {
                    ensure(
                        oracle_with_table(s, t) == WordVerdict::True,
                        format!("{name}: oracle disagrees"),
                    )?;
                    oracle_true += 1;
                }
                None => inconclusive += 1,
            }
        }
        for (s, env) in scripts.iter().zip(&envs) {
            for i in 0..s.steps.len() {
                let mut m = s.clone();
                m.steps[i].exponent = -m.steps[i].exponent;
                let failed = matches!(check_script(&m, &p, env).verdict, Verdict::Failed { .. });
                let mismatch = table
                    .as_ref()
                    .is_some_and(|t| oracle_with_table(&m, t) != WordVerdict::True);
                ensure(
                    failed || mismatch,
                    format!("{} with step {i} flipped still passes", s.name),
                )?;
                mutants += 1;
            }
        }
    }
    Ok(format!(
        "{verified} scripts verified, oracle true for {oracle_true} ({inconclusive} in an infinite group), {mutants} mutants rejected"
    ))
}

fn characteristic_numbers() -> Check {
    let t = reproduce_paper_table();
    let row = |n: &str| {
        t.rows
            .iter()
            .find(|r| r.name == n)
            .cloned()
            .ok_or(format!("no row {n}"))
    };
    let x = row("X")?;
    let u = row("U")?;
    ensure(
        (x.e, x.sigma, x.c1_sq, x.chi_h) == (10, -2, 14, Some(2)),
        format!("X: {x:?}"),
    )?;
    ensure(
        (u.e, u.sigma, u.c1_sq, u.chi_h) == (6, -2, 6, Some(1)),
        format!("U: {u:?}"),
    )?;
    let (xk, yk, y, q) = (row("X_K")?, row("Y_K")?, row("Y")?, row("Q")?);
    ensure(xk.e == 4 && xk.c1_sq == 8, format!("X_K: {xk:?}"))?;
    ensure(yk.e == 0, format!("Y_K: {yk:?}"))?;
    ensure(
        y.e == 2 && q.e == 2 && y.sigma == -2 && q.sigma == -2,
        format!("Y, Q: {y:?} {q:?}"),
    )?;
    ensure(t.passed(), format!("{:?}", t.failures()))?;
    Ok(format!(
        "X = (10, -2, 14, 2), U = (6, -2, 6, 1), {} checks in the table",
        t.checks.len()
    ))
}

fn homeomorphism_types() -> Check {
    ensure(
        freedman_type(CharNumbers::new(10, -2)) == Ok(HomeoType { m: 3, n: 5 }),
        "(10, -2)",
    )?;
    ensure(
        freedman_type(CharNumbers::new(6, -2)) == Ok(HomeoType { m: 1, n: 3 }),
        "(6, -2)",
    )?;
    for m in 0..=100 {
        for n in 0..=100 {
            let h = HomeoType { m, n };
            ensure(
                freedman_type(h.char_numbers()) == Ok(h),
                format!("round trip fails at {m}, {n}"),
            )?;
        }
    }
    Ok("(10,-2) -> 3 CP2 # 5 CP2-bar, (6,-2) -> 1 CP2 # 3 CP2-bar, 101 x 101 round trips".into())
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        failure_persistence: None,
        ..Config::with_cases(cases)
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn abelianization_suite() -> Check {
    let ab = |n: &str| fixture(n).map(|p| p.abelianization().map(|a| a.group));
    let expect = [
        (
            "trefoil",
            AbelianGroup {
                free_rank: 1,
                torsion: vec![],
            },
        ),
        (
            "mk_s1",
            AbelianGroup {
                free_rank: 2,
                torsion: vec![],
            },
        ),
        ("pi1_X_golden", AbelianGroup::default()),
        ("pi1_U_golden", AbelianGroup::default()),
    ];
    for (name, g) in &expect {
        let got = ab(name)
            .map_err(|e| e.to_string())?
            .map_err(|e| e.to_string())?;
        ensure(got == *g, format!("{name}: {got}"))?;
    }
    runner(1000)
        .run(
            &(presentation(), prop::collection::vec(moves(), 1..8)),
            |(p, ms)| {
                let before = p.abelianization().unwrap().group;
                let mut q = p;
                let mut added = Vec::new();
                for m in &ms {
                    q = apply(&q, m, &mut added);
                    prop_assert_eq!(&q.abelianization().unwrap().group, &before);
                }
                Ok(())
            },
        )
        .map_err(|e| format!("invariance: {e}"))?;
    runner(1000)
        .run(&matrix(), |(cols, rows)| {
            let snf = smith_normal_form(&IntMatrix::from_rows(&rows)).unwrap();
            let (rank, factors) = minors_oracle(&rows, cols);
            prop_assert_eq!(snf.rank, rank);
            prop_assert_eq!(snf.diagonal, factors);
            Ok(())
        })
        .map_err(|e| format!("snf: {e}"))?;
    Ok("trefoil Z, mk_s1 Z^2, both goldens 0; 1000 move sequences; 1000 SNF vs minors".into())
}

fn battery_case(p: &Presentation, names: &[&str], perms: &[Perm]) -> Result<(), String> {
    for r in p.relator_words() {
        ensure(
            eval(r, names, perms) == identity(perms[0].len()),
            format!("{}: {r} not satisfied", p.label()),
        )?;
    }
    let order = closure_order(perms);
    for strategy in [Strategy::Hlt, Strategy::Felsch] {
        let (index, table, _) = complete(p, strategy)?;
        ensure(
            index == order,
            format!("{} {strategy:?}: {index} vs {order}", p.label()),
        )?;
        for c in 1..=table.num_cosets() {
            for r in p.relator_words() {
                ensure(
                    table.trace(c, r).map_err(|e| e.to_string())? == c,
                    format!("{}: {r} moves coset {c}", p.label()),
                )?;
            }
        }
    }
    Ok(())
}

fn enumeration_battery() -> Check {
    for n in 1..=50usize {
        let p = Presentation::from_words(&format!("C{n}"), &["a"], &[w("a").pow(n as i64)]);
        battery_case(&p, &["a"], &[rotation(n)])?;
    }
    for n in 1..=12usize {
        let p = Presentation::from_words(
            &format!("D{n}"),
            &["a", "b"],
            &[w("a^2"), w("b^2"), w("a b").pow(n as i64)],
        );
        battery_case(&p, &["a", "b"], &[affine(n, -1, 0), affine(n, -1, 1)])?;
    }
    let s3 = Presentation::from_words("S3", &["a", "b"], &[w("a^2"), w("b^3"), w("a b a b")]);
    battery_case(&s3, &["a", "b"], &[vec![1, 0, 2], vec![1, 2, 0]])?;
    Ok("cyclic n <= 50, dihedral n <= 12 and S3 agree with permutation closures".into())
}

fn copy_dir(from: &Path, to: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(to)?;
    for e in std::fs::read_dir(from)? {
        let e = e?;
        if e.file_type()?.is_dir() {
            copy_dir(&e.path(), &to.join(e.file_name()))?;
        } else {
            std::fs::copy(e.path(), to.join(e.file_name()))?;
        }
    }
    Ok(())
}

fn paper(args: &[&str], fixtures_dir: Option<&Path>) -> Result<(i32, String), String> {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fpg"));
    c.arg("paper").args(args).env_remove("FPG_FIXTURES");
    if let Some(d) = fixtures_dir {
        c.env("FPG_FIXTURES", d);
    }
    let o = c.output().map_err(|e| e.to_string())?;
    Ok((
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    ))
}

fn sabotaged(
    edit: impl FnOnce(&Path) -> std::io::Result<()>,
    stage: &str,
    expect: &str,
) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    copy_dir(&src, dir.path()).map_err(|e| e.to_string())?;
    edit(dir.path()).map_err(|e| e.to_string())?;
    let (code, stderr) = paper(&["--stage", stage], Some(dir.path()))?;
    ensure(code == 1, format!("sabotage exit code {code}"))?;
    ensure(
        stderr.contains(&format!("stage {expect} failed")),
        format!("stage {expect} not named: {stderr}"),
    )
}

fn pipeline_integrity() -> Check {
    let (code, stderr) = paper(&["--stage", "all"], None)?;
    ensure(
        code == 0,
        format!("paper --stage all exited {code}: {stderr}"),
    )?;
    sabotaged(
        |d| {
            let f = d.join("groups/pi1_X_golden.grp");
            let text = std::fs::read_to_string(&f)?;
            let kept: Vec<&str> = text
                .lines()
                .filter(|l| !l.trim_start().starts_with("dx:"))
                .collect();
            std::fs::write(&f, kept.join("\n"))
        },
        "all",
        "pi1_X_golden",
    )?;
    sabotaged(
        |d| {
            let f = d.join("gluings/u.glu");
            let text = std::fs::read_to_string(&f)?;
            std::fs::write(&f, text.replacen("d ~ g^-1 h", "d ~ h", 1))
        },
        "all",
        "pi1_U",
    )?;
    Ok("exit 0 on the shipped fixtures; dropped dx and a changed gluing word each exit 1 naming the stage".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("pi1(X) is trivial", || trivial_under_both("pi1_X_golden")),
        ("pi1(U) is trivial", || trivial_under_both("pi1_U_golden")),
        ("derivation corpus and mutation suite", derivation_corpus),
        ("characteristic numbers", characteristic_numbers),
        ("homeomorphism types", homeomorphism_types),
        ("abelianization suite", abelianization_suite),
        ("enumeration oracle battery", enumeration_battery),
        ("pipeline integrity", pipeline_integrity),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {title}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {} FAIL {title}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
