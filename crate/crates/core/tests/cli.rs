//! The `fpg` binary: exit codes, report shape, and sabotaged fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fpgroup::report::{strip_timing, validate_report};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fpg(args: &[&str], fixtures_dir: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fpg"));
    c.args(args).env_remove("FPG_FIXTURES");
    if let Some(d) = fixtures_dir {
        c.env("FPG_FIXTURES", d);
    }
    c.output().expect("binary runs")
}

fn report(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not a report ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    });
    validate_report(&v).unwrap();
    v
}

fn path(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let dest = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &dest);
        } else {
            std::fs::copy(e.path(), dest).unwrap();
        }
    }
}

#[test]
fn parse_exit_codes() {
    let o = fpg(&["parse", &path("groups/trefoil.grp")], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        report(&o)["results"]["generators"],
        serde_json::json!(["a", "b"])
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, "group B { gens: a; rels: a b = 1; }").unwrap();
    let o = fpg(&["parse", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let v = report(&o);
    assert!(v["results"]["violations"][0]
        .as_str()
        .unwrap()
        .contains("undeclared symbol b"));

    std::fs::write(&bad, "group B { gens: a; rels: a = ; }").unwrap();
    let o = fpg(&["parse", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["results"]["error"]["column"], 30);

    let o = fpg(
        &["parse", dir.path().join("missing.grp").to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(&o)["results"]["error"]["kind"], "io");

    for f in ["derivations/dbd.drv", "gluings/x.glu"] {
        assert_eq!(
            fpg(&["parse", &path(f)], None).status.code(),
            Some(0),
            "{f}"
        );
    }
}

#[test]
fn abelianize_and_enumerate() {
    for (f, rank) in [
        ("trefoil", 1),
        ("mk_s1", 2),
        ("pi1_X_golden", 0),
        ("pi1_U_golden", 0),
    ] {
        let o = fpg(&["abelianize", &path(&format!("groups/{f}.grp"))], None);
        assert_eq!(o.status.code(), Some(0));
        let v = report(&o);
        assert_eq!(v["results"]["free_rank"], rank, "{f}");
        assert_eq!(v["results"]["torsion"], serde_json::json!([]), "{f}");
    }
    for f in ["pi1_X_golden", "pi1_U_golden"] {
        for s in ["hlt", "felsch"] {
            let o = fpg(
                &[
                    "enumerate",
                    &path(&format!("groups/{f}.grp")),
                    "--strategy",
                    s,
                ],
                None,
            );
            assert_eq!(o.status.code(), Some(0));
            assert_eq!(report(&o)["results"]["index"], 1, "{f} {s}");
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.grp");
    std::fs::write(&c5, "group C5 { gens: a; rels: a^5 = 1; }").unwrap();
    let o = fpg(&["enumerate", c5.to_str().unwrap()], None);
    assert_eq!(report(&o)["results"]["index"], 5);

    // Overflow is a result, not an error.
    let o = fpg(
        &[
            "enumerate",
            &path("groups/trefoil.grp"),
            "--max-cosets",
            "100",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["results"]["verdict"], "Inconclusive");

    let o = fpg(
        &[
            "enumerate",
            &path("groups/trefoil.grp"),
            "--strategy",
            "nope",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_scripts() {
    let o = fpg(
        &[
            "check",
            &path("derivations/dbd.drv"),
            &path("groups/pi1_X_golden.grp"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["results"]["verdict"], "verified");

    let o = fpg(
        &[
            "check",
            &path("derivations/d_squared.drv"),
            &path("groups/pi1_U_golden.grp"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["results"]["end"], "b^-1 d b d b^-1");

    // bsb uses bsb_split, which only the environment directory provides.
    let o = fpg(
        &[
            "check",
            &path("derivations/bsb.drv"),
            &path("groups/pi1_X_golden.grp"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let o = fpg(
        &[
            "check",
            &path("derivations/bsb.drv"),
            &path("groups/pi1_X_golden.grp"),
            "--env",
            &path("derivations"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("dbd.drv");
    let text = std::fs::read_to_string(fixtures().join("derivations/dbd.drv")).unwrap();
    std::fs::write(&m, text.replacen("exp=+1", "exp=-1", 1)).unwrap();
    let o = fpg(
        &[
            "check",
            m.to_str().unwrap(),
            &path("groups/pi1_X_golden.grp"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let v = report(&o);
    assert_eq!(v["results"]["verdict"], "failed");
    assert!(v["results"]["step_index"].is_u64());
}

#[test]
fn paper_stages() {
    let o = fpg(&["paper", "--stage", "all"], None);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = report(&o);
    assert_eq!(v["results"]["failed_stages"], serde_json::json!([]));
    for s in v["results"]["scripts"].as_array().unwrap() {
        assert_eq!(s["verified"], true);
    }

    let o = fpg(&["paper", "--stage", "charnum"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    let rows = v["results"]["characteristic_numbers"]["rows"]
        .as_array()
        .unwrap();
    let x = rows.iter().find(|r| r["name"] == "X").unwrap();
    assert_eq!((x["e"].as_i64(), x["sigma"].as_i64()), (Some(10), Some(-2)));

    let o = fpg(&["paper", "--stage", "X"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    let pi1 = v["results"]["stages"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "pi1_X")
        .unwrap();
    assert_eq!(pi1["triviality"], "Trivial");
    assert_eq!(pi1["golden_match"], true);

    let o = fpg(&["paper", "--max-cosets", "10"], None);
    assert_eq!(o.status.code(), Some(1));
    let v = report(&o);
    for s in v["results"]["stages"].as_array().unwrap() {
        if s["name"] == "pi1_X_golden" || s["name"] == "pi1_U_golden" {
            assert_eq!(s["triviality"], "Inconclusive", "{}", s["name"]);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let mut a = report(&fpg(&["paper"], None));
    let mut b = report(&fpg(&["paper"], None));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
}

fn failed_stages(o: &Output) -> Vec<String> {
    report(o)["results"]["failed_stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn sabotage_dropped_relator() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixtures(), dir.path());
    let f = dir.path().join("groups/pi1_X_golden.grp");
    let text = std::fs::read_to_string(&f).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("dx:"))
        .collect();
    assert_eq!(kept.len() + 1, text.lines().count());
    std::fs::write(&f, kept.join("\n")).unwrap();

    let o = fpg(&["paper", "--stage", "all"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    let failed = failed_stages(&o);
    assert!(failed.contains(&"pi1_X".to_string()), "{failed:?}");
    assert!(failed.contains(&"pi1_X_golden".to_string()), "{failed:?}");
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("stage pi1_X_golden failed"), "{stderr}");
    let v = report(&o);
    let golden = v["results"]["stages"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == "pi1_X_golden")
        .unwrap();
    assert_ne!(golden["triviality"], "Trivial");
}

#[test]
fn sabotage_gluing_word() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixtures(), dir.path());
    let f = dir.path().join("gluings/u.glu");
    let text = std::fs::read_to_string(&f).unwrap();
    let changed = text.replacen("d ~ g^-1 h", "d ~ h", 1);
    assert_ne!(changed, text);
    std::fs::write(&f, changed).unwrap();

    let o = fpg(&["paper", "--stage", "U"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    let failed = failed_stages(&o);
    assert!(failed.contains(&"pi1_U".to_string()), "{failed:?}");
}

#[test]
fn missing_fixtures_directory_is_io() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpg(&["paper"], Some(&dir.path().join("absent")));
    assert_eq!(o.status.code(), Some(3));
}
