//! Builds the fundamental groups step by step from the gluing fixtures.

use fpgroup::parser::serialize_presentation;
use fpgroup::pipeline::{build_pi1_u_chain, build_pi1_x_chain, Fixtures};

fn main() {
    let fx = Fixtures::embedded();
    let x = build_pi1_x_chain(&fx).unwrap();
    for p in [&x.y_k, &x.y_k_complement, &x.x_k_complement, &x.pi1_x] {
        let ab = p.abelianization().unwrap();
        println!(
            "{:<18} {:>2} gens {:>2} rels  H1 = {}",
            p.label(),
            p.generators().len(),
            p.relators().len(),
            ab.group
        );
    }
    println!("killed meridian: {}", x.killed_meridian);
    let u = build_pi1_u_chain(&fx).unwrap();
    print!("{}", serialize_presentation(&u.pi1_u));
}
