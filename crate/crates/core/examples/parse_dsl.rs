//! The presentation and derivation DSLs: parsing, error spans and
//! serialization.

use fpgroup::parser::{parse_derivation, parse_presentation, serialize_presentation};

fn main() {
    let src = "group G {
  gens: x, a, b;
  rels: [x, a] = [x, b] = 1, a b a = b a b;
  annotate \"aux\" normal_closure([x, b]);
}";
    let p = parse_presentation(src).unwrap();
    print!("{}", serialize_presentation(&p));

    let err = parse_presentation("group G { gens: a; rels: a^ = 1; }").unwrap_err();
    println!("error at {}: {}", err.span, err.message);

    let d = parse_derivation(
        "derive braid in T { start: b a b; insert rel=1 exp=+1 at 0; end: a b a; }",
    )
    .unwrap();
    println!("{} has {} step(s)", d.name, d.steps.len());
}
