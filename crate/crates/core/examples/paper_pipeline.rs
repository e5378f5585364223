//! Runs every stage of the gluing pipeline and prints a summary per stage.
//!
//! cargo run --release --example paper_pipeline

use std::time::Instant;

use fpgroup::pipeline::{run_paper_pipeline, PipelineOptions};

fn main() {
    let t = Instant::now();
    let report = run_paper_pipeline(&PipelineOptions::default());
    for s in &report.stages {
        let mark = if s.passed { "ok  " } else { "FAIL" };
        println!(
            "{mark} {:<18} {:>3} gens {:>3} rels  ab={:<16} {}",
            s.name,
            s.generators.map_or("-".into(), |n| n.to_string()),
            s.relators.map_or("-".into(), |n| n.to_string()),
            s.abelianization.as_deref().unwrap_or("-"),
            s.triviality.as_deref().unwrap_or(""),
        );
        for n in &s.notes {
            println!("       {n}");
        }
    }
    for sc in &report.scripts {
        println!(
            "script {:<22} {:<14} {:>2} steps  verified={} oracle={}",
            sc.name, sc.presentation, sc.steps, sc.verified, sc.oracle
        );
    }
    println!("passed: {}  ({:.2?})", report.passed(), t.elapsed());
}
