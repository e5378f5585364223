//! Free reduction, commutators, conjugates and cyclic reduction.

use fpgroup::Word;

fn main() {
    let a = Word::parse_simple("a");
    let b = Word::parse_simple("b");
    let w = Word::parse_simple("a b b^-1 a^-1 b a");
    println!("reduce(a b b^-1 a^-1 b a) = {w}");
    println!("[a,b] = {}", Word::commutator(&a, &b));
    println!("conjugate of a by b = {}", a.conjugate(&b));
    let u = Word::parse_simple("b a b^2 a b^-4 b^-1");
    let (core, c) = u.cyclic_reduce();
    println!("{u} = ({c}) ({core}) ({c})^-1");
    println!(
        "relator normal form of a b a b^-1 a^-1 b^-1: {}",
        Word::parse_simple("a b a b^-1 a^-1 b^-1").relator_normal_form()
    );
    println!("(a b)^-3 = {}", Word::parse_simple("a b").pow(-3));
}
