//! Todd-Coxeter enumeration: small groups, a subgroup index, and the two
//! trivial fundamental groups under both strategies.

use std::time::Instant;

use fpgroup::pipeline::fixture;
use fpgroup::{enumerate, parse_presentation, EnumerationConfig, Strategy, Word};

fn main() {
    let s3 = parse_presentation("group S3 { gens: a, b; rels: a^2 = 1, b^2 = 1, (a b)^3 = 1; }")
        .unwrap();
    let r = enumerate(&s3, &[], &EnumerationConfig::default()).unwrap();
    println!("|S3| = {:?}", r.index());
    let r = enumerate(
        &s3,
        &[Word::parse_simple("a")],
        &EnumerationConfig::default(),
    )
    .unwrap();
    println!("[S3 : <a>] = {:?}", r.index());
    print!("{}", r.table().unwrap().dump());

    for name in ["pi1_X_golden", "pi1_U_golden"] {
        let p = fixture(name).unwrap().explicit_part();
        for strategy in [Strategy::Hlt, Strategy::Felsch] {
            let cfg = EnumerationConfig {
                strategy,
                ..Default::default()
            };
            let t = Instant::now();
            let r = enumerate(&p, &[], &cfg).unwrap();
            println!(
                "{name} {strategy:?}: index {:?} in {:.2?}",
                r.index(),
                t.elapsed()
            );
        }
    }

    let trefoil = fixture("trefoil").unwrap();
    let r = enumerate(
        &trefoil,
        &[],
        &EnumerationConfig::default().with_max_cosets(500),
    )
    .unwrap();
    println!("trefoil group with 500 rows: {r:?}");
}
