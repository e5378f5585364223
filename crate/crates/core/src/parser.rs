//! Text formats for presentations (`.grp`), gluing specifications (`.glu`)
//! and derivation scripts (`.drv`).
//!
//! ```text
//! # trefoil
//! group T {
//!   gens: a, b;
//!   rels: a b a = b a b, lon: a b^2 a b^-4 = 1;
//!   annotate "aux generators" normal_closure([x, b]);
//! }
//! ```
//!
//! Words are juxtaposed terms. `g^k` binds tighter than juxtaposition,
//! `[u, v]` is `u v u^-1 v^-1`, parentheses group, and `1` is the identity.
//! A relation `u = v` becomes the relator `u v^-1`; a chain `u = v = w`
//! becomes `u v^-1` and `v w^-1`. A relation may carry a label `name:`,
//! which derivation scripts use to refer to it (chains number the later
//! links `name_2`, `name_3`, ...).
//!
//! A gluing pairs words of two presentations and says what the meridian of
//! the left side is sent to:
//!
//! ```text
//! glue x { left: x_k; right: y4;
//!   identify: a^-1 b ~ alpha1, d ~ alpha3;
//!   meridian: [x, b] [z, f]^-1 ~ killed; }
//! ```

use std::fmt::{self, Write as _};

use crate::derivation::{DerivationScript, DerivationStep, StepSource};
use crate::pipeline::{GluingSpec, MeridianImage};
use crate::presentation::{NormalClosureAnnotation, Presentation, Relator};
use crate::word::{Symbol, Word};

/// 1-based position of a token in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Punct(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut last_span = SourceSpan {
        line: 1,
        column: 1,
        length: 1,
    };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan {
            line,
            column: col,
            length: 1,
        };
        if c == '\n' {
            last_span = start;
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            last_span = start;
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                last_span = SourceSpan {
                    line,
                    column: col,
                    length: 1,
                };
                i += 1;
                col += 1;
            }
            continue;
        }
        let begin = i;
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[begin..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[begin..i].iter().collect();
            match digits.parse() {
                Ok(n) => Tok::Int(n),
                Err(_) => {
                    return Err(ParseError {
                        span: SourceSpan {
                            length: i - begin,
                            ..start
                        },
                        message: "integer literal too large".into(),
                        expected: vec![],
                    })
                }
            }
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(ParseError {
                    span: start,
                    message: "unterminated string".into(),
                    expected: vec!["`\"`".into()],
                });
            }
            i += 1;
            Tok::Str(chars[begin + 1..i - 1].iter().collect())
        } else if "{}()[],;:=^+-~".contains(c) {
            i += 1;
            Tok::Punct(c)
        } else {
            return Err(ParseError {
                span: start,
                message: format!("unexpected character {c:?}"),
                expected: vec![],
            });
        };
        let span = SourceSpan {
            length: i - begin,
            ..start
        };
        col += i - begin;
        last_span = SourceSpan {
            line,
            column: col - 1,
            length: 1,
        };
        out.push(Token { tok, span });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: last_span,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if self.is_punct(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    /// `kw:` section header.
    fn expect_section(&mut self, kw: &str) -> PResult<()> {
        self.expect_keyword(kw)?;
        self.expect_punct(':')
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn symbol(&mut self) -> PResult<Symbol> {
        let (name, span) = self.ident()?;
        Symbol::new(&name).map_err(|e| ParseError {
            span,
            message: e.to_string(),
            expected: vec![],
        })
    }

    fn int(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = if self.is_punct('-') {
            self.bump();
            true
        } else {
            if self.is_punct('+') {
                self.bump();
            }
            false
        };
        let span = self.span();
        let n = self.int()?;
        let n = i64::try_from(n).map_err(|_| ParseError {
            span,
            message: "exponent out of range".into(),
            expected: vec![],
        })?;
        Ok(if neg { -n } else { n })
    }

    fn at_word_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Int(1))
            || self.is_punct('(')
            || self.is_punct('[')
    }

    /// wordexpr := term+
    fn word(&mut self) -> PResult<Word> {
        if !self.at_word_start() {
            return Err(self.unexpected(&["word"]));
        }
        let mut w = Word::identity();
        while self.at_word_start() {
            w = w.concat(&self.term()?);
        }
        Ok(w)
    }

    /// term := atom ("^" INT)?
    fn term(&mut self) -> PResult<Word> {
        let base = self.atom()?;
        if self.is_punct('^') {
            self.bump();
            let braced = self.is_punct('{');
            if braced {
                self.bump();
            }
            let span = self.span();
            let k = self.signed_int()?;
            if k.unsigned_abs() > 1 << 20 {
                return Err(ParseError {
                    span,
                    message: "exponent too large".into(),
                    expected: vec![],
                });
            }
            if braced {
                self.expect_punct('}')?;
            }
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> PResult<Word> {
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok(Word::identity())
            }
            Tok::Ident(_) => Ok(Word::generator(self.symbol()?)),
            Tok::Punct('(') => {
                self.bump();
                let w = self.word()?;
                self.expect_punct(')')?;
                Ok(w)
            }
            Tok::Punct('[') => {
                self.bump();
                let u = self.word()?;
                self.expect_punct(',')?;
                let v = self.word()?;
                self.expect_punct(']')?;
                Ok(Word::commutator(&u, &v))
            }
            _ => Err(self.unexpected(&["generator", "`1`", "`(`", "`[`"])),
        }
    }

    /// rel := (IDENT ":")? wordexpr ("=" wordexpr)+
    fn relation(&mut self, out: &mut Vec<Relator>) -> PResult<()> {
        let label = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Ident(name), Tok::Punct(':')) => {
                self.bump();
                self.bump();
                Some(name)
            }
            _ => None,
        };
        let mut prev = self.word()?;
        if !self.is_punct('=') {
            return Err(self.unexpected(&["`=`"]));
        }
        let mut k = 1;
        while self.is_punct('=') {
            self.bump();
            let next = self.word()?;
            let name = label.as_ref().map(|l| {
                if k == 1 {
                    l.clone()
                } else {
                    format!("{l}_{k}")
                }
            });
            out.push(Relator {
                word: prev.concat(&next.inverse()),
                name,
            });
            prev = next;
            k += 1;
        }
        Ok(())
    }

    fn presentation(&mut self) -> PResult<Presentation> {
        self.expect_keyword("group")?;
        let (label, _) = self.ident()?;
        self.expect_punct('{')?;
        self.expect_section("gens")?;
        let mut gens = Vec::new();
        if !self.is_punct(';') {
            gens.push(self.symbol()?);
            while self.is_punct(',') {
                self.bump();
                gens.push(self.symbol()?);
            }
        }
        self.expect_punct(';')?;
        self.expect_section("rels")?;
        let mut rels = Vec::new();
        if !self.is_punct(';') {
            self.relation(&mut rels)?;
            while self.is_punct(',') {
                self.bump();
                self.relation(&mut rels)?;
            }
        }
        self.expect_punct(';')?;
        let mut annotations = Vec::new();
        while self.is_keyword("annotate") {
            self.bump();
            let desc = match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    s
                }
                _ => return Err(self.unexpected(&["string"])),
            };
            self.expect_keyword("normal_closure")?;
            self.expect_punct('(')?;
            let mut base_words = vec![self.word()?];
            while self.is_punct(',') {
                self.bump();
                base_words.push(self.word()?);
            }
            self.expect_punct(')')?;
            self.expect_punct(';')?;
            annotations.push(NormalClosureAnnotation {
                aux_description: desc,
                base_words,
            });
        }
        if !self.is_punct('}') {
            return Err(self.unexpected(&["`annotate`", "`}`"]));
        }
        self.bump();
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok(Presentation::new(label, gens, rels, annotations))
    }

    fn gluing(&mut self) -> PResult<GluingSpec> {
        self.expect_keyword("glue")?;
        let (name, _) = self.ident()?;
        self.expect_punct('{')?;
        self.expect_section("left")?;
        let (left_label, _) = self.ident()?;
        self.expect_punct(';')?;
        self.expect_section("right")?;
        let (right_label, _) = self.ident()?;
        self.expect_punct(';')?;
        self.expect_section("identify")?;
        let mut identifications = Vec::new();
        if !self.is_punct(';') {
            loop {
                let u = self.word()?;
                self.expect_punct('~')?;
                let v = self.word()?;
                identifications.push((u, v));
                if !self.is_punct(',') {
                    break;
                }
                self.bump();
            }
        }
        self.expect_punct(';')?;
        self.expect_section("meridian")?;
        let meridian_left = self.word()?;
        self.expect_punct('~')?;
        let meridian_right = if self.is_keyword("killed") && *self.peek_at(1) == Tok::Punct(';') {
            self.bump();
            MeridianImage::Killed
        } else {
            MeridianImage::Word(self.word()?)
        };
        self.expect_punct(';')?;
        self.expect_punct('}')?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok(GluingSpec {
            name,
            left_label,
            right_label,
            identifications,
            meridian_left,
            meridian_right,
        })
    }

    fn exponent_sign(&mut self) -> PResult<i8> {
        self.expect_keyword("exp")?;
        self.expect_punct('=')?;
        let sign = match self.peek() {
            Tok::Punct('+') => 1,
            Tok::Punct('-') => -1,
            _ => return Err(self.unexpected(&["`+1`", "`-1`"])),
        };
        self.bump();
        if *self.peek() != Tok::Int(1) {
            return Err(self.unexpected(&["`1`"]));
        }
        self.bump();
        Ok(sign)
    }

    fn step_tail(&mut self, source: StepSource) -> PResult<DerivationStep> {
        let exponent = self.exponent_sign()?;
        self.expect_keyword("at")?;
        let span = self.span();
        let position = usize::try_from(self.int()?).map_err(|_| ParseError {
            span,
            message: "position out of range".into(),
            expected: vec![],
        })?;
        let conjugator = if self.is_keyword("conj") {
            self.bump();
            self.expect_punct('=')?;
            self.word()?
        } else {
            Word::identity()
        };
        self.expect_punct(';')?;
        Ok(DerivationStep {
            source,
            exponent,
            position,
            conjugator,
        })
    }

    fn derivation(&mut self) -> PResult<DerivationScript> {
        self.expect_keyword("derive")?;
        let (name, _) = self.ident()?;
        self.expect_keyword("in")?;
        let (presentation_label, _) = self.ident()?;
        self.expect_punct('{')?;
        self.expect_section("start")?;
        let start = self.word()?;
        self.expect_punct(';')?;
        let mut steps = Vec::new();
        loop {
            if self.is_keyword("insert") {
                self.bump();
                self.expect_keyword("rel")?;
                self.expect_punct('=')?;
                let reference = match self.peek().clone() {
                    Tok::Int(n) => n.to_string(),
                    Tok::Ident(s) if !(s == "exp" && *self.peek_at(1) == Tok::Punct('=')) => s,
                    _ => return Err(self.unexpected(&["relator index", "relator name"])),
                };
                self.bump();
                steps.push(self.step_tail(StepSource::Relator(reference))?);
            } else if self.is_keyword("use") {
                self.bump();
                let (ident, _) = self.ident()?;
                steps.push(self.step_tail(StepSource::Identity(ident))?);
            } else {
                break;
            }
        }
        if !self.is_keyword("end") {
            return Err(self.unexpected(&["`insert`", "`use`", "`end`"]));
        }
        self.expect_section("end")?;
        let end = self.word()?;
        self.expect_punct(';')?;
        self.expect_punct('}')?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok(DerivationScript {
            name,
            presentation_label,
            start,
            steps,
            end,
        })
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    Parser::new(text)?.presentation()
}

/// Parses a single word in the DSL syntax.
pub fn parse_word(text: &str) -> Result<Word, ParseError> {
    let mut p = Parser::new(text)?;
    let w = p.word()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(w)
}

pub fn parse_derivation(text: &str) -> Result<DerivationScript, ParseError> {
    Parser::new(text)?.derivation()
}

pub fn parse_gluing(text: &str) -> Result<GluingSpec, ParseError> {
    Parser::new(text)?.gluing()
}

pub fn serialize_gluing(g: &GluingSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "glue {} {{", g.name);
    let _ = writeln!(s, "  left: {};", g.left_label);
    let _ = writeln!(s, "  right: {};", g.right_label);
    let pairs: Vec<String> = g
        .identifications
        .iter()
        .map(|(u, v)| format!("{u} ~ {v}"))
        .collect();
    let _ = writeln!(s, "  identify: {};", pairs.join(", "));
    let right = match &g.meridian_right {
        MeridianImage::Killed => "killed".to_string(),
        MeridianImage::Word(w) => w.to_string(),
    };
    let _ = writeln!(s, "  meridian: {} ~ {right};", g.meridian_left);
    s.push_str("}\n");
    s
}

/// Canonical text: one relator per line as `w = 1`, then annotations.
pub fn serialize_presentation(p: &Presentation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group {} {{", p.label());
    let gens: Vec<&str> = p.generators().iter().map(Symbol::as_str).collect();
    if gens.is_empty() {
        let _ = writeln!(s, "  gens: ;");
    } else {
        let _ = writeln!(s, "  gens: {};", gens.join(", "));
    }
    if p.relators().is_empty() {
        let _ = writeln!(s, "  rels: ;");
    } else {
        let _ = writeln!(s, "  rels:");
        let n = p.relators().len();
        for (i, r) in p.relators().iter().enumerate() {
            let sep = if i + 1 == n { ";" } else { "," };
            match &r.name {
                Some(name) => {
                    let _ = writeln!(s, "    {name}: {} = 1{sep}", r.word);
                }
                None => {
                    let _ = writeln!(s, "    {} = 1{sep}", r.word);
                }
            }
        }
    }
    for a in p.annotations() {
        let words: Vec<String> = a.base_words.iter().map(Word::to_string).collect();
        let _ = writeln!(
            s,
            "  annotate \"{}\" normal_closure({});",
            a.aux_description.replace('"', "'"),
            words.join(", ")
        );
    }
    s.push_str("}\n");
    s
}

pub fn serialize_derivation(d: &DerivationScript) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "derive {} in {} {{", d.name, d.presentation_label);
    let _ = writeln!(s, "  start: {};", d.start);
    for step in &d.steps {
        let head = match &step.source {
            StepSource::Relator(r) => format!("insert rel={r}"),
            StepSource::Identity(n) => format!("use {n}"),
        };
        let sign = if step.exponent > 0 { "+1" } else { "-1" };
        let _ = write!(s, "  {head} exp={sign} at {}", step.position);
        if !step.conjugator.is_identity() {
            let _ = write!(s, " conj={}", step.conjugator);
        }
        s.push_str(";\n");
    }
    let _ = writeln!(s, "  end: {};", d.end);
    s.push_str("}\n");
    s
}
