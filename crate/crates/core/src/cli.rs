//! The `fpg` command line. Each subcommand writes one [`RunReport`] to
//! stdout (JSON by default, a short text summary with `--format text`) and
//! diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 check failure (or, for `parse`, a syntax
//! error), 2 invalid input, 3 I/O error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::coset::{enumerate, EnumerationConfig, EnumerationResult, Strategy};
use crate::derivation::{
    check_script, DerivationEnvironment, DerivationScript, StepSource, Verdict,
};
use crate::parser::{parse_derivation, parse_gluing, parse_presentation, parse_word, ParseError};
use crate::pipeline::{
    run_paper_pipeline, Fixtures, PipelineOptions, PipelineReport, StageSelection,
};
use crate::presentation::Presentation;
use crate::report::RunReport;
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fpg", version, about = "Finitely presented group toolkit")]
pub struct Cli {
    /// Output format for the report on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a .grp file (.drv and .glu files are parsed only).
    Parse { path: PathBuf },
    /// Free rank and torsion of the abelianization.
    Abelianize { path: PathBuf },
    /// Todd-Coxeter enumeration of the cosets of a subgroup.
    Enumerate {
        path: PathBuf,
        /// Subgroup generator, as a word; repeat for several.
        #[arg(long = "subgroup", value_name = "WORD")]
        subgroup: Vec<String>,
        #[arg(long, default_value = "hlt")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1_000_000)]
        max_cosets: usize,
        /// Write the completed table here (`coset TAB generator TAB image`).
        #[arg(long, value_name = "PATH")]
        dump_table: Option<PathBuf>,
    },
    /// Check a derivation script against a presentation.
    Check {
        script: PathBuf,
        presentation: PathBuf,
        /// Directory of .drv scripts whose identities may be used.
        #[arg(long, value_name = "DIR")]
        env: Option<PathBuf>,
    },
    /// Run the gluing pipeline and its checks.
    Paper {
        #[arg(long, default_value = "all")]
        stage: StageSelection,
        #[arg(long, default_value_t = 1_000_000)]
        max_cosets: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Abelianize { .. } => "abelianize",
            Command::Enumerate { .. } => "enumerate",
            Command::Check { .. } => "check",
            Command::Paper { .. } => "paper",
        }
    }
}

/// Why a command stopped early.
#[derive(Debug)]
enum Stop {
    Io(PathBuf, std::io::Error),
    Syntax(PathBuf, ParseError),
    Invalid(String),
}

impl Stop {
    fn message(&self) -> String {
        match self {
            Stop::Io(p, e) => format!("{}: {e}", p.display()),
            Stop::Syntax(p, e) => format!("{}:{e}", p.display()),
            Stop::Invalid(m) => m.clone(),
        }
    }
}

fn read(path: &Path) -> Result<String, Stop> {
    std::fs::read_to_string(path).map_err(|e| Stop::Io(path.to_path_buf(), e))
}

fn load_presentation(path: &Path) -> Result<Presentation, Stop> {
    let text = read(path)?;
    let p = parse_presentation(&text).map_err(|e| Stop::Syntax(path.to_path_buf(), e))?;
    p.validate().map_err(|v| {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        Stop::Invalid(format!("{}: {}", path.display(), list.join("; ")))
    })?;
    Ok(p)
}

fn load_script(path: &Path) -> Result<DerivationScript, Stop> {
    parse_derivation(&read(path)?).map_err(|e| Stop::Syntax(path.to_path_buf(), e))
}

fn words(ws: impl IntoIterator<Item = impl std::borrow::Borrow<Word>>) -> Vec<String> {
    ws.into_iter().map(|w| w.borrow().to_string()).collect()
}

fn parse_error_json(e: &ParseError) -> Value {
    json!({
        "line": e.span.line,
        "column": e.span.column,
        "message": e.message,
        "expected": e.expected,
    })
}

fn presentation_json(p: &Presentation) -> Value {
    json!({
        "label": p.label(),
        "generators": p.generators().iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        "relators": p.relators().iter().map(|r| json!({"name": r.name, "word": r.word.to_string()})).collect::<Vec<_>>(),
        "annotations": p.annotations().iter().map(|a| json!({
            "description": a.aux_description,
            "base_words": words(&a.base_words),
        })).collect::<Vec<_>>(),
    })
}

/// Outcome of one command: results, text rendering, exit code.
struct Outcome {
    results: Value,
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(results: Value, text: String) -> Self {
        Outcome {
            results,
            text,
            code: EXIT_OK,
        }
    }
}

fn cmd_parse(path: &Path, diag: &mut Vec<String>) -> Result<Outcome, Stop> {
    let text = read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("grp");
    let parsed: Result<(Value, String), ParseError> = match ext {
        "drv" => parse_derivation(&text).map(|d| {
            let v = json!({
                "kind": "derivation",
                "name": d.name,
                "presentation": d.presentation_label,
                "start": d.start.to_string(),
                "steps": d.steps.len(),
                "end": d.end.to_string(),
            });
            (
                v,
                format!("derivation {}: {} steps\n", d.name, d.steps.len()),
            )
        }),
        "glu" => parse_gluing(&text).map(|g| {
            let v = json!({
                "kind": "gluing",
                "name": g.name,
                "left": g.left_label,
                "right": g.right_label,
                "identifications": g.identifications.len(),
            });
            (
                v,
                format!(
                    "gluing {}: {} identifications\n",
                    g.name,
                    g.identifications.len()
                ),
            )
        }),
        _ => parse_presentation(&text).map(|p| {
            let mut v = presentation_json(&p);
            v["kind"] = json!("presentation");
            let violations: Vec<String> = p
                .validate()
                .err()
                .unwrap_or_default()
                .iter()
                .map(ToString::to_string)
                .collect();
            v["violations"] = json!(violations);
            let t = format!(
                "{}: {} generators, {} relators, {} annotations\n",
                p.label(),
                p.generators().len(),
                p.relators().len(),
                p.annotations().len()
            );
            (v, t)
        }),
    };
    match parsed {
        Ok((v, mut t)) => {
            let invalid = v
                .get("violations")
                .and_then(Value::as_array)
                .is_some_and(|a| !a.is_empty());
            let mut out = Outcome::ok(v, String::new());
            if invalid {
                for m in out.results["violations"].as_array().expect("checked") {
                    let m = m.as_str().unwrap_or_default();
                    diag.push(format!("{}: {m}", path.display()));
                    let _ = writeln!(t, "violation: {m}");
                }
                out.code = EXIT_INVALID;
            }
            out.text = t;
            Ok(out)
        }
        Err(e) => {
            diag.push(format!("{}:{e}", path.display()));
            Ok(Outcome {
                results: json!({ "error": parse_error_json(&e) }),
                text: format!("syntax error at {e}\n"),
                code: EXIT_CHECK_FAILED,
            })
        }
    }
}

fn cmd_abelianize(path: &Path) -> Result<Outcome, Stop> {
    let p = load_presentation(path)?;
    let ab = p
        .abelianization()
        .map_err(|e| Stop::Invalid(format!("{}: {e}", path.display())))?;
    let results = json!({
        "label": p.label(),
        "free_rank": ab.group.free_rank,
        "torsion": ab.group.torsion,
        "group": ab.group.to_string(),
        "explicit_part_only": ab.explicit_part_only,
        "warnings": ab.warnings,
    });
    let mut text = format!("{}: {}", p.label(), ab.group);
    if ab.explicit_part_only {
        text.push_str(" (explicit part)");
    }
    text.push('\n');
    Ok(Outcome::ok(results, text))
}

fn write_atomically(path: &Path, contents: &str) -> Result<(), Stop> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)
        .and_then(|()| std::fs::rename(&tmp, path))
        .map_err(|e| Stop::Io(path.to_path_buf(), e))
}

fn cmd_enumerate(
    path: &Path,
    subgroup: &[String],
    cfg: &EnumerationConfig,
    dump: Option<&Path>,
) -> Result<Outcome, Stop> {
    let p = load_presentation(path)?;
    let mut gens = Vec::new();
    for s in subgroup {
        let w = parse_word(s).map_err(|e| Stop::Invalid(format!("subgroup word {s:?}: {e}")))?;
        p.check_word(&w)
            .map_err(|e| Stop::Invalid(format!("subgroup word {s:?}: {e}")))?;
        gens.push(w);
    }
    let r = enumerate(&p.explicit_part(), &gens, cfg).map_err(|e| Stop::Invalid(e.to_string()))?;
    let (results, text) = match &r {
        EnumerationResult::Completed { index, table } => {
            if let Some(d) = dump {
                write_atomically(d, &table.dump())?;
            }
            (
                json!({"outcome": "completed", "index": index, "verdict": format!("Completed({index})")}),
                format!("{}: index {index}\n", p.label()),
            )
        }
        EnumerationResult::Overflow { cosets_used } => (
            json!({"outcome": "overflow", "cosets_used": cosets_used, "verdict": "Inconclusive"}),
            format!(
                "{}: inconclusive, overflow at {cosets_used} cosets\n",
                p.label()
            ),
        ),
    };
    let mut results = results;
    results["label"] = json!(p.label());
    results["subgroup"] = json!(words(&gens));
    Ok(Outcome::ok(results, text))
}

fn identities_used(s: &DerivationScript) -> BTreeSet<&str> {
    s.steps
        .iter()
        .filter_map(|st| match &st.source {
            StepSource::Identity(n) => Some(n.as_str()),
            StepSource::Relator(_) => None,
        })
        .collect()
}

/// Loads the `.drv` files of `dir` and checks them against `p`, each once
/// the identities it uses are available. Returns one entry per script.
fn load_environment(
    dir: &Path,
    p: &Presentation,
    skip: &str,
    env: &mut DerivationEnvironment,
    diag: &mut Vec<String>,
) -> Result<Vec<Value>, Stop> {
    let entries = std::fs::read_dir(dir).map_err(|e| Stop::Io(dir.to_path_buf(), e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for e in entries {
        let e = e.map_err(|e| Stop::Io(dir.to_path_buf(), e))?;
        if e.path().extension().is_some_and(|x| x == "drv") {
            paths.push(e.path());
        }
    }
    paths.sort();
    let mut pending = Vec::new();
    let mut out = Vec::new();
    for path in paths {
        let s = load_script(&path)?;
        if s.name == skip {
            continue;
        }
        if s.presentation_label != p.label() {
            out.push(json!({"name": s.name, "status": "skipped", "reason": format!("written for {}", s.presentation_label)}));
            continue;
        }
        pending.push(s);
    }
    let mut failed: BTreeSet<String> = BTreeSet::new();
    loop {
        let ready = pending.iter().position(|s| {
            identities_used(s)
                .iter()
                .all(|n| env.get(n).is_some() || failed.contains(*n))
        });
        let Some(i) = ready else { break };
        let s = pending.remove(i);
        let r = check_script(&s, p, env);
        if env.admit(&s, &r) {
            out.push(json!({"name": s.name, "status": "verified"}));
        } else {
            diag.push(format!("environment script {} does not verify", s.name));
            out.push(json!({"name": s.name, "status": "failed"}));
            failed.insert(s.name.clone());
        }
    }
    for s in pending {
        diag.push(format!(
            "environment script {} depends on unavailable identities",
            s.name
        ));
        out.push(json!({"name": s.name, "status": "unresolved"}));
    }
    Ok(out)
}

fn cmd_check(
    script: &Path,
    presentation: &Path,
    env_dir: Option<&Path>,
    diag: &mut Vec<String>,
) -> Result<Outcome, Stop> {
    let s = load_script(script)?;
    let p = load_presentation(presentation)?;
    if s.presentation_label != p.label() {
        diag.push(format!(
            "script {} is written for {}, checking against {}",
            s.name,
            s.presentation_label,
            p.label()
        ));
    }
    let mut env = DerivationEnvironment::new();
    let env_report = match env_dir {
        Some(d) => load_environment(d, &p, &s.name, &mut env, diag)?,
        None => Vec::new(),
    };
    let r = check_script(&s, &p, &env);
    let mut results = json!({
        "script": s.name,
        "presentation": p.label(),
        "start": s.start.to_string(),
        "end": s.end.to_string(),
        "steps": s.steps.len(),
        "trace": words(&r.trace),
        "environment": env_report,
    });
    let (text, code) = match &r.verdict {
        Verdict::Verified => {
            results["verdict"] = json!("verified");
            (
                format!("{}: verified {} = {}\n", s.name, s.start, s.end),
                EXIT_OK,
            )
        }
        Verdict::Failed {
            step_index,
            reason,
            word_before,
        } => {
            results["verdict"] = json!("failed");
            results["step_index"] = json!(step_index);
            results["reason"] = json!(reason);
            results["word_before"] = json!(word_before.to_string());
            diag.push(format!("{}: step {step_index}: {reason}", s.name));
            (
                format!("{}: failed at step {step_index}: {reason}\n", s.name),
                EXIT_CHECK_FAILED,
            )
        }
    };
    Ok(Outcome {
        results,
        text,
        code,
    })
}

fn paper_text(r: &PipelineReport) -> String {
    let mut t = String::new();
    for s in &r.stages {
        let mark = if s.passed { "ok  " } else { "FAIL" };
        let _ = write!(t, "{mark} {}", s.name);
        if let Some(v) = &s.triviality {
            let _ = write!(t, ": {v}");
        }
        t.push('\n');
        if !s.passed {
            for n in &s.notes {
                let _ = writeln!(t, "     {n}");
            }
        }
    }
    for s in &r.scripts {
        let v = if s.verified { "verified" } else { "FAILED" };
        let _ = writeln!(
            t,
            "script {} ({}): {v}, oracle {}",
            s.name, s.presentation, s.oracle
        );
    }
    if let Some(c) = &r.characteristic_numbers {
        for row in &c.rows {
            let chi = row.chi_h.map_or("-".to_string(), |x| x.to_string());
            let _ = writeln!(
                t,
                "{}: e={} sigma={} c1^2={} chi_h={chi}",
                row.name, row.e, row.sigma, row.c1_sq
            );
        }
    }
    t
}

fn cmd_paper(
    stage: StageSelection,
    max_cosets: usize,
    diag: &mut Vec<String>,
) -> Result<Outcome, Stop> {
    let fixtures = Fixtures::from_env();
    if let Some(d) = fixtures.dir() {
        if !d.is_dir() {
            return Err(Stop::Io(
                d.to_path_buf(),
                std::io::Error::new(std::io::ErrorKind::NotFound, "fixtures directory not found"),
            ));
        }
    }
    let opts = PipelineOptions {
        fixtures,
        config: EnumerationConfig::default().with_max_cosets(max_cosets),
        stage,
    };
    let report = run_paper_pipeline(&opts);
    let failed = report.failed_stages();
    for name in &failed {
        diag.push(format!("stage {name} failed"));
    }
    let mut results = serde_json::to_value(&report).expect("report serializes");
    results["failed_stages"] = json!(failed);
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome {
        results,
        text: paper_text(&report),
        code,
    })
}

fn inputs(cmd: &Command) -> Value {
    let fixtures = std::env::var("FPG_FIXTURES").ok().filter(|s| !s.is_empty());
    match cmd {
        Command::Parse { path } | Command::Abelianize { path } => json!({"path": path}),
        Command::Enumerate {
            path,
            subgroup,
            strategy,
            max_cosets,
            dump_table,
        } => json!({
            "path": path,
            "subgroup": subgroup,
            "strategy": strategy,
            "max_cosets": max_cosets,
            "dump_table": dump_table,
        }),
        Command::Check {
            script,
            presentation,
            env,
        } => json!({"script": script, "presentation": presentation, "env": env}),
        Command::Paper { stage, max_cosets } => json!({
            "stage": stage,
            "max_cosets": max_cosets,
            "fixtures": fixtures,
        }),
    }
}

/// Runs a parsed command and builds its report.
pub fn execute(cli: &Cli) -> (RunReport, String) {
    let started = Instant::now();
    let mut report = RunReport::new(cli.command.name());
    report.inputs = inputs(&cli.command);
    let mut diag = Vec::new();
    let outcome = match &cli.command {
        Command::Parse { path } => cmd_parse(path, &mut diag),
        Command::Abelianize { path } => cmd_abelianize(path),
        Command::Enumerate {
            path,
            subgroup,
            strategy,
            max_cosets,
            dump_table,
        } => {
            let cfg = EnumerationConfig {
                strategy: *strategy,
                ..EnumerationConfig::default().with_max_cosets(*max_cosets)
            };
            cmd_enumerate(path, subgroup, &cfg, dump_table.as_deref())
        }
        Command::Check {
            script,
            presentation,
            env,
        } => cmd_check(script, presentation, env.as_deref(), &mut diag),
        Command::Paper { stage, max_cosets } => cmd_paper(*stage, *max_cosets, &mut diag),
    };
    let text = match outcome {
        Ok(o) => {
            report.results = o.results;
            report.exit_code = o.code;
            o.text
        }
        Err(stop) => {
            let msg = stop.message();
            let (code, kind) = match (&stop, &cli.command) {
                (Stop::Io(..), _) => (EXIT_IO, "io"),
                (Stop::Syntax(_, e), _) => {
                    report.results = json!({"error": parse_error_json(e)});
                    (EXIT_INVALID, "syntax")
                }
                (Stop::Invalid(_), _) => (EXIT_INVALID, "invalid"),
            };
            if report.results.get("error").is_none() {
                report.results = json!({"error": {"message": msg}});
            }
            report.results["error"]["kind"] = json!(kind);
            report.exit_code = code;
            diag.push(msg.clone());
            format!("error: {msg}\n")
        }
    };
    report.passed = report.exit_code == EXIT_OK;
    report.diagnostics = diag;
    report.timing_ms = u64::try_from(started.elapsed().as_millis()).unwrap_or(u64::MAX);
    (report, text)
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            // --help and --version go to stdout with exit 0.
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{rendered}");
            return EXIT_INVALID;
        }
    };
    let (report, text) = execute(&cli);
    for d in &report.diagnostics {
        let _ = writeln!(stderr, "{d}");
    }
    let body = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => text,
    };
    let _ = stdout.write_all(body.as_bytes());
    let _ = stdout.flush();
    report.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_path(rel: &str) -> String {
        format!("{}/fixtures/{rel}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_json(args: &[&str]) -> (i32, Value) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["fpg"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        let v = serde_json::from_slice(&out).unwrap_or(Value::Null);
        (code, v)
    }

    #[test]
    fn abelianize_trefoil() {
        let (code, v) = run_json(&["abelianize", &fixture_path("groups/trefoil.grp")]);
        assert_eq!(code, 0);
        assert_eq!(v["results"]["free_rank"], 1);
        crate::report::validate_report(&v).unwrap();
    }

    #[test]
    fn enumerate_with_subgroup() {
        let dir = tempfile::tempdir().unwrap();
        let grp = dir.path().join("s3.grp");
        std::fs::write(
            &grp,
            "group S3 { gens: a, b; rels: a^2 = 1, b^3 = 1, (a b)^2 = 1; }",
        )
        .unwrap();
        let dump = dir.path().join("t.tsv");
        let (code, v) = run_json(&[
            "enumerate",
            grp.to_str().unwrap(),
            "--subgroup",
            "a",
            "--dump-table",
            dump.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(v["results"]["index"], 3);
        assert_eq!(
            std::fs::read_to_string(&dump).unwrap().lines().count(),
            3 * 4
        );
        let (code, v) = run_json(&["enumerate", grp.to_str().unwrap(), "--subgroup", "c"]);
        assert_eq!(code, 2);
        assert_eq!(v["results"]["error"]["kind"], "invalid");
    }

    #[test]
    fn usage_errors_are_invalid_input() {
        let (code, _) = run_json(&["enumerate"]);
        assert_eq!(code, 2);
        let (code, _) = run_json(&["paper", "--stage", "Z"]);
        assert_eq!(code, 2);
        let mut out = Vec::new();
        assert_eq!(run(["fpg", "--version"], &mut out, &mut Vec::new()), 0);
        assert!(String::from_utf8(out)
            .unwrap()
            .contains(env!("CARGO_PKG_VERSION")));
    }

    #[test]
    fn text_format() {
        let mut out = Vec::new();
        let code = run(
            [
                "fpg",
                "--format",
                "text",
                "abelianize",
                &fixture_path("groups/mk_s1.grp"),
            ],
            &mut out,
            &mut Vec::new(),
        );
        assert_eq!(code, 0);
        assert_eq!(String::from_utf8(out).unwrap(), "mk_s1: Z^2\n");
    }
}
