//! Free-group words over named generators.
//!
//! A [`Word`] is always stored freely reduced. Products, inverses, conjugates
//! and commutators all return reduced words, so equality of `Word` values is
//! equality in the free group.
//!
//! Conventions used throughout the crate:
//!
//! * commutator `[u, v] = u v u^-1 v^-1`
//! * conjugate of `w` by `u` is `u w u^-1`

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid generator name {0:?}: expected [A-Za-z][A-Za-z0-9_]*")]
    InvalidName(String),
    #[error("generator {0} is not in the alphabet")]
    UnknownSymbol(Symbol),
}

/// A generator name such as `a`, `gamma1p` or `alpha3`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, WordError> {
        if is_valid_name(name) {
            Ok(Symbol(Arc::from(name)))
        } else {
            Err(WordError::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A generator or its inverse.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub symbol: Symbol,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: Symbol, inverse: bool) -> Self {
        Letter { symbol, inverse }
    }

    /// +1 or -1.
    pub fn sign(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverted(&self) -> Letter {
        Letter {
            symbol: self.symbol.clone(),
            inverse: !self.inverse,
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.symbol == other.symbol && self.inverse != other.inverse
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn generator(symbol: Symbol) -> Self {
        Word {
            letters: vec![Letter::new(symbol, false)],
        }
    }

    /// Convenience for tests and fixtures: parses a whitespace separated list of
    /// tokens `g`, `g^k` (k may be negative). Panics on malformed input.
    pub fn parse_simple(text: &str) -> Self {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().expect("bad exponent")),
                None => (tok, 1),
            };
            if name == "1" {
                continue;
            }
            let sym = Symbol::new(name).expect("bad generator name");
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(sym.clone(), exp < 0));
            }
        }
        Word::reduce(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverted).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        // Only the boundary can cancel since both halves are reduced.
        let mut left = self.letters.len();
        let mut right = 0;
        while left > 0
            && right < other.letters.len()
            && self.letters[left - 1].cancels(&other.letters[right])
        {
            left -= 1;
            right += 1;
        }
        let mut letters = Vec::with_capacity(left + other.letters.len() - right);
        letters.extend_from_slice(&self.letters[..left]);
        letters.extend_from_slice(&other.letters[right..]);
        Word { letters }
    }

    /// `u w u^-1` where `self` is `w`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.inverse())
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Splits `self` as `prefix · suffix` at `pos` (no reduction needed).
    pub fn split_at(&self, pos: usize) -> (Word, Word) {
        let (a, b) = self.letters.split_at(pos);
        (
            Word {
                letters: a.to_vec(),
            },
            Word {
                letters: b.to_vec(),
            },
        )
    }

    /// Returns `(core, conjugator)` with `self = conjugator · core · conjugator^-1`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(&self.letters[n - 1 - k]) {
            k += 1;
        }
        let conj = Word {
            letters: self.letters[..k].to_vec(),
        };
        let core = Word {
            letters: self.letters[k..n - k].to_vec(),
        };
        (core, conj)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) if self.letters.len() > 1 => !f.cancels(l),
            _ => true,
        }
    }

    /// Left rotation by `k` letters. Only meaningful on cyclically reduced words,
    /// where it yields a conjugate.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return Word::identity();
        }
        let k = k % self.letters.len();
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// Canonical representative of the conjugacy class of `self` and its
    /// inverse: the lexicographically least rotation of the cyclic core of
    /// either. Two relators with the same normal form generate the same normal
    /// closure.
    pub fn relator_normal_form(&self) -> Word {
        let (core, _) = self.cyclic_reduce();
        let inv = core.inverse();
        (0..core.len().max(1))
            .flat_map(|k| [core.rotate(k), inv.rotate(k)])
            .min_by(|x, y| x.letters.cmp(&y.letters))
            .unwrap_or_default()
    }

    /// Signed occurrence count of each alphabet symbol.
    pub fn exponent_vector(&self, alphabet: &[Symbol]) -> Result<Vec<i64>, WordError> {
        let mut v = vec![0i64; alphabet.len()];
        for l in &self.letters {
            let i = alphabet
                .iter()
                .position(|s| *s == l.symbol)
                .ok_or_else(|| WordError::UnknownSymbol(l.symbol.clone()))?;
            v[i] += l.sign();
        }
        Ok(v)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.letters.iter().map(|l| &l.symbol)
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.symbols().any(|x| x == s)
    }

    /// Replaces every occurrence of generator `g` by `image` (and `g^-1` by the
    /// inverse of `image`), then reduces.
    pub fn substitute(&self, g: &Symbol, image: &Word) -> Word {
        let inv = image.inverse();
        let mut out = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            if &l.symbol == g {
                out.extend_from_slice(if l.inverse {
                    &inv.letters
                } else {
                    &image.letters
                });
            } else {
                out.push(l.clone());
            }
        }
        Word::reduce(out)
    }

    /// Applies a generator renaming. Symbols absent from the map are kept.
    pub fn rename(&self, map: &dyn Fn(&Symbol) -> Symbol) -> Word {
        Word::reduce(
            self.letters
                .iter()
                .map(|l| Letter::new(map(&l.symbol), l.inverse)),
        )
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::reduce(iter)
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

/// Renders in the DSL syntax with run-length exponents, e.g. `a b^2 a b^-4`.
/// The identity renders as `1`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = &self.letters[i];
            let mut j = i + 1;
            while j < self.letters.len() && self.letters[j] == *l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{}", l.symbol)?;
            } else {
                write!(f, "{}^{}", l.symbol, run)?;
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
