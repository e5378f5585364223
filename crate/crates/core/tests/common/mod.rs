//! Helpers shared by the integration tests: brute-force permutation
//! groups, a determinantal-divisor oracle for Smith normal form, and random
//! group-preserving moves on presentations.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use fpgroup::{Presentation, Relator, Symbol, Word};
use proptest::prelude::*;

pub type Perm = Vec<usize>;

pub fn compose(p: &Perm, q: &Perm) -> Perm {
    // Apply p, then q.
    p.iter().map(|&i| q[i]).collect()
}

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn inverse(p: &Perm) -> Perm {
    let mut q = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        q[j] = i;
    }
    q
}

/// Order of the group generated by `gens`, by breadth-first closure.
pub fn closure_order(gens: &[Perm]) -> usize {
    let n = gens[0].len();
    let mut seen = BTreeSet::from([identity(n)]);
    let mut queue = VecDeque::from([identity(n)]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = compose(&g, s);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen.len()
}

/// Evaluates a word on named permutations.
pub fn eval(w: &Word, names: &[&str], perms: &[Perm]) -> Perm {
    let mut acc = identity(perms[0].len());
    for l in w.letters() {
        let i = names.iter().position(|n| *n == l.symbol.as_str()).unwrap();
        let p = if l.inverse {
            inverse(&perms[i])
        } else {
            perms[i].clone()
        };
        acc = compose(&acc, &p);
    }
    acc
}

pub fn rotation(n: usize) -> Perm {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// Regular representation of the affine maps `x -> e x + k` of Z/n, with
/// `(e, k)` stored at index `k + n * [e = -1]`. Returns the permutation of
/// the 2n elements given by right multiplication with `(e, k)`.
pub fn affine(n: usize, e: i64, k: usize) -> Perm {
    let decode = |i: usize| (if i < n { 1 } else { -1 }, i % n);
    let encode = |e: i64, k: usize| k + if e == 1 { 0 } else { n };
    (0..2 * n)
        .map(|i| {
            let (e1, k1) = decode(i);
            // Apply (e1, k1) then (e, k): x -> e (e1 x + k1) + k.
            let k2 = ((e * k1 as i64 + k as i64).rem_euclid(n as i64)) as usize;
            encode(e * e1, k2)
        })
        .collect()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors as ratios of consecutive gcds of k-by-k minors.
pub fn minors_oracle(m: &[Vec<i64>], cols: usize) -> (usize, Vec<i64>) {
    let rows = m.len();
    let mut prev = 1i128;
    let mut factors = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| i128::from(m[r][c])).collect())
                    .collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        factors.push(i64::try_from(g / prev).unwrap());
        prev = g;
    }
    (factors.len(), factors)
}

/// Random matrices up to 4 by 4 with small entries, with their column count.
pub fn matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        (
            Just(c),
            prop::collection::vec(prop::collection::vec(-9i64..=9, c), r),
        )
    })
}

pub const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

pub fn word_over(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..n, any::<bool>()), 0..=max_len).prop_map(|v| {
        let parts: Vec<String> = v
            .into_iter()
            .map(|(g, inv)| {
                if inv {
                    format!("{}^-1", NAMES[g])
                } else {
                    NAMES[g].to_string()
                }
            })
            .collect();
        Word::parse_simple(&parts.join(" "))
    })
}

pub fn presentation() -> impl Strategy<Value = Presentation> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(word_over(n, 6), 0..=4)
            .prop_map(move |rels| Presentation::from_words("P", &NAMES[..n], &rels))
    })
}

#[derive(Debug, Clone)]
pub enum Move {
    Multiply {
        target: usize,
        other: usize,
        inverse: bool,
    },
    AddConjugate {
        which: usize,
        inverse: bool,
        by: Word,
    },
    RemoveDuplicate,
    Rotate {
        which: usize,
        by: usize,
    },
    Invert {
        which: usize,
    },
    AddGenerator {
        definition: Word,
    },
    EliminateNewest,
}

pub fn moves() -> impl Strategy<Value = Move> {
    prop_oneof![
        (any::<usize>(), any::<usize>(), any::<bool>()).prop_map(|(target, other, inverse)| {
            Move::Multiply {
                target,
                other,
                inverse,
            }
        }),
        (any::<usize>(), any::<bool>(), word_over(5, 3))
            .prop_map(|(which, inverse, by)| Move::AddConjugate { which, inverse, by }),
        Just(Move::RemoveDuplicate),
        (any::<usize>(), any::<usize>()).prop_map(|(which, by)| Move::Rotate { which, by }),
        any::<usize>().prop_map(|which| Move::Invert { which }),
        word_over(5, 4).prop_map(|definition| Move::AddGenerator { definition }),
        Just(Move::EliminateNewest),
    ]
}

/// Restricts a random word to the current alphabet by dropping other letters.
pub fn restrict(w: &Word, p: &Presentation) -> Word {
    Word::reduce(
        w.letters()
            .iter()
            .filter(|l| p.generators().contains(&l.symbol))
            .cloned(),
    )
}

pub fn replace_relator(p: &Presentation, i: usize, w: Word) -> Presentation {
    let mut rels = p.relators().to_vec();
    rels[i] = Relator {
        word: w,
        name: rels[i].name.clone(),
    };
    Presentation::new(
        p.label(),
        p.generators().to_vec(),
        rels,
        p.annotations().to_vec(),
    )
}

/// Applies a move that preserves the group; returns `p` unchanged when the
/// move does not apply.
pub fn apply(p: &Presentation, m: &Move, added: &mut Vec<(Symbol, Word)>) -> Presentation {
    let n = p.relators().len();
    match m {
        Move::Multiply {
            target,
            other,
            inverse,
        } if n >= 2 => {
            let t = target % n;
            let o = other % n;
            if t == o {
                return p.clone();
            }
            p.multiply_relator(t, o, if *inverse { -1 } else { 1 })
                .unwrap()
        }
        Move::AddConjugate { which, inverse, by } if n >= 1 => {
            let r = &p.relators()[which % n].word;
            let r = if *inverse { r.inverse() } else { r.clone() };
            p.add_relator(&r.conjugate(&restrict(by, p))).unwrap()
        }
        Move::RemoveDuplicate => {
            let nf: Vec<Word> = p.relator_words().map(Word::relator_normal_form).collect();
            for j in (0..n).rev() {
                if nf[..j].contains(&nf[j]) {
                    return p.remove_relator(j).unwrap();
                }
            }
            p.clone()
        }
        Move::Rotate { which, by } if n >= 1 => {
            let i = which % n;
            let w = &p.relators()[i].word;
            replace_relator(p, i, w.rotate(by % w.len().max(1)))
        }
        Move::Invert { which } if n >= 1 => {
            let i = which % n;
            replace_relator(p, i, p.relators()[i].word.inverse())
        }
        Move::AddGenerator { definition } => {
            let t = Symbol::new(&format!("t{}", added.len())).unwrap();
            let def = restrict(definition, p);
            let mut gens = p.generators().to_vec();
            gens.push(t.clone());
            let mut rels = p.relators().to_vec();
            rels.push(Relator::new(
                Word::generator(t.clone()).concat(&def.inverse()),
            ));
            added.push((t, def));
            Presentation::new(p.label(), gens, rels, p.annotations().to_vec())
        }
        Move::EliminateNewest => match added.last() {
            // The defining relator may have been rewritten by other moves,
            // in which case elimination is refused and nothing changes.
            Some((t, def)) => match p.tietze_eliminate(t, def) {
                Ok(q) => {
                    added.pop();
                    q
                }
                Err(_) => p.clone(),
            },
            None => p.clone(),
        },
        _ => p.clone(),
    }
}
