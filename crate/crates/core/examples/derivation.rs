//! Checks the shipped derivation scripts in dependency order and shows the
//! word after every step of one of them.

use fpgroup::derivation::{check_in_order, oracle_check};
use fpgroup::pipeline::{fixture, script_groups, Fixtures};
use fpgroup::{check_script, DerivationEnvironment, EnumerationConfig};

fn main() {
    let fx = Fixtures::embedded();
    for (label, names) in script_groups() {
        let p = fixture(label).unwrap();
        let scripts: Vec<_> = names.iter().map(|n| fx.script(n).unwrap()).collect();
        let mut env = DerivationEnvironment::new();
        for (name, report) in check_in_order(&scripts, &p, &mut env) {
            println!("{label}: {name} verified={}", report.is_verified());
        }
    }

    let p = fixture("pi1_X_golden").unwrap();
    let s = fx.script("dbd").unwrap();
    let r = check_script(&s, &p, &DerivationEnvironment::new());
    for (i, w) in r.trace.iter().enumerate() {
        println!("  {i}: {w}");
    }
    println!(
        "oracle: {:?}",
        oracle_check(&s, &p, &EnumerationConfig::default())
    );
}
