//! Characteristic numbers of the building blocks and of the two glued
//! manifolds, and their homeomorphism types.

use fpgroup::charnum::reproduce_paper_table;

fn main() {
    let t = reproduce_paper_table();
    println!(
        "{:<4} {:>4} {:>6} {:>6} {:>6}",
        "", "e", "sigma", "c1^2", "chi_h"
    );
    for r in &t.rows {
        let chi = r.chi_h.map_or("-".into(), |x| x.to_string());
        println!(
            "{:<4} {:>4} {:>6} {:>6} {:>6}",
            r.name, r.e, r.sigma, r.c1_sq, chi
        );
    }
    for (name, ty) in &t.types {
        match ty {
            Some(h) => println!("{name} ~ {} CP2 # {} CP2-bar", h.m, h.n),
            None => println!("{name}: no standard type"),
        }
    }
    println!("{} checks, all passed: {}", t.checks.len(), t.passed());
}
