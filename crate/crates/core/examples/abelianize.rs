//! Abelianizations of the shipped fixtures via Smith normal form.

use fpgroup::pipeline::{fixture, fixture_names};

fn main() {
    for name in fixture_names() {
        let p = fixture(name).expect("shipped fixture");
        let ab = p.abelianization().expect("small coefficients");
        let note = if ab.explicit_part_only {
            "  (explicit part)"
        } else {
            ""
        };
        println!(
            "{name:<16} {:>2} gens {:>2} rels   H1 = {}{note}",
            p.generators().len(),
            p.relators().len(),
            ab.group
        );
    }
}
