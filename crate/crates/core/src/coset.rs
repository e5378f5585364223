//! Todd-Coxeter coset enumeration (HLT and Felsch strategies).
//!
//! The table has one column per generator and one per inverse. Coincidences
//! are resolved with a union-find forwarding array and a merge queue; dead
//! rows stay in place until the table runs out of room or the enumeration
//! finishes, at which point live cosets are renumbered in their original
//! order. Everything is sequential and deterministic: the same presentation,
//! subgroup and config always produce the same table.

use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::presentation::{NormalClosureAnnotation, Presentation, PresentationError};
use crate::word::{Symbol, Word};

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Hlt,
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!(
                "unknown strategy {other:?} (expected hlt or felsch)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub strategy: Strategy,
    /// Maximum number of table rows (live plus not yet reclaimed dead cosets).
    pub max_cosets: usize,
    /// HLT only: when the table is full, scan every relator at every coset
    /// without defining new cosets before giving up.
    pub lookahead: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            strategy: Strategy::Hlt,
            max_cosets: 1_000_000,
            lookahead: true,
        }
    }
}

impl EnumerationConfig {
    pub fn felsch() -> Self {
        EnumerationConfig {
            strategy: Strategy::Felsch,
            ..Default::default()
        }
    }

    pub fn with_max_cosets(self, max_cosets: usize) -> Self {
        EnumerationConfig {
            max_cosets: max_cosets.max(1),
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("coset {0} does not exist (table has {1} cosets)")]
    NoSuchCoset(usize, usize),
    #[error("generator {0} is not a column of the table")]
    UnknownGenerator(Symbol),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A complete coset table. Cosets are numbered from 1; coset 1 is the
/// subgroup itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    generators: Vec<Symbol>,
    num_cosets: usize,
    /// Row-major, `2 * generators.len()` columns, 0-based images.
    entries: Vec<u32>,
}

impl CosetTable {
    pub fn num_cosets(&self) -> usize {
        self.num_cosets
    }

    pub fn generators(&self) -> &[Symbol] {
        &self.generators
    }

    fn ncols(&self) -> usize {
        2 * self.generators.len()
    }

    /// Image of `coset` (1-based) under `g` or `g^-1`.
    pub fn action(&self, coset: usize, g: &Symbol, inverse: bool) -> Result<usize, CosetError> {
        self.check(coset)?;
        let gi = self
            .generators
            .iter()
            .position(|s| s == g)
            .ok_or_else(|| CosetError::UnknownGenerator(g.clone()))?;
        let col = 2 * gi + usize::from(inverse);
        Ok(self.entries[(coset - 1) * self.ncols() + col] as usize + 1)
    }

    fn check(&self, coset: usize) -> Result<(), CosetError> {
        if coset == 0 || coset > self.num_cosets {
            Err(CosetError::NoSuchCoset(coset, self.num_cosets))
        } else {
            Ok(())
        }
    }

    /// Image of `start` under the word, applied left to right.
    pub fn trace(&self, start: usize, w: &Word) -> Result<usize, CosetError> {
        self.check(start)?;
        let mut c = start;
        for l in w.letters() {
            c = self.action(c, &l.symbol, l.inverse)?;
        }
        Ok(c)
    }

    /// Text dump: `coset TAB generator TAB image`, one line per entry, with
    /// inverse columns written `g^-1`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for c in 0..self.num_cosets {
            for (gi, g) in self.generators.iter().enumerate() {
                for inv in [false, true] {
                    let img = self.entries[c * self.ncols() + 2 * gi + usize::from(inv)];
                    let col = if inv {
                        format!("{g}^-1")
                    } else {
                        g.to_string()
                    };
                    let _ = writeln!(s, "{}\t{col}\t{}", c + 1, img + 1);
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerationResult {
    Completed { index: usize, table: CosetTable },
    Overflow { cosets_used: usize },
}

impl EnumerationResult {
    pub fn index(&self) -> Option<usize> {
        match self {
            EnumerationResult::Completed { index, .. } => Some(*index),
            EnumerationResult::Overflow { .. } => None,
        }
    }

    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            EnumerationResult::Completed { table, .. } => Some(table),
            EnumerationResult::Overflow { .. } => None,
        }
    }
}

struct Full;

struct Enumerator {
    ncols: usize,
    max_rows: usize,
    table: Vec<u32>,
    forward: Vec<u32>,
    queue: Vec<u32>,
    /// Felsch deduction stack; unused by HLT.
    deductions: Vec<(u32, u32)>,
    record_deductions: bool,
    relators: Rc<Vec<Vec<u32>>>,
    /// Felsch: cyclic conjugates of relators and inverses, by first column.
    conjugates: Rc<Vec<Vec<Vec<u32>>>>,
}

#[inline]
fn inv(col: u32) -> u32 {
    col ^ 1
}

impl Enumerator {
    fn new(ngens: usize, relators: Vec<Vec<u32>>, max_rows: usize) -> Self {
        let ncols = 2 * ngens;
        let mut e = Enumerator {
            ncols,
            max_rows: max_rows.max(1),
            table: Vec::new(),
            forward: Vec::new(),
            queue: Vec::new(),
            deductions: Vec::new(),
            record_deductions: false,
            relators: Rc::new(relators),
            conjugates: Rc::new(vec![Vec::new(); ncols]),
        };
        e.push_row();
        e
    }

    fn rows(&self) -> usize {
        self.forward.len()
    }

    fn push_row(&mut self) -> u32 {
        let c = self.forward.len() as u32;
        self.forward.push(c);
        self.table.extend(std::iter::repeat_n(UNDEF, self.ncols));
        c
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, v: u32) {
        self.table[c as usize * self.ncols + x as usize] = v;
    }

    #[inline]
    fn alive(&self, c: u32) -> bool {
        self.forward[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.forward[root as usize] != root {
            root = self.forward[root as usize];
        }
        let mut c = c;
        while self.forward[c as usize] != root {
            let next = self.forward[c as usize];
            self.forward[c as usize] = root;
            c = next;
        }
        root
    }

    fn define(&mut self, c: u32, x: u32) -> Result<u32, Full> {
        if self.rows() >= self.max_rows {
            return Err(Full);
        }
        let d = self.push_row();
        self.set(c, x, d);
        self.set(d, inv(x), c);
        if self.record_deductions {
            self.deductions.push((c, x));
        }
        Ok(d)
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.forward[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.ncols as u32 {
                let d = self.get(g, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, inv(x), UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                if mu_x != UNDEF {
                    self.merge(nu, mu_x);
                } else {
                    let nu_inv = self.get(nu, inv(x));
                    if nu_inv != UNDEF {
                        self.merge(mu, nu_inv);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, inv(x), mu);
                        if self.record_deductions {
                            self.deductions.push((mu, x));
                        }
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` at `c`, closing a one-entry gap as a deduction. With `fill`,
    /// defines new cosets until the relator closes.
    fn scan(&mut self, c: u32, w: &[u32], fill: bool) -> Result<(), Full> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len());
        loop {
            while i < j {
                let n = self.get(f, w[i]);
                if n == UNDEF {
                    break;
                }
                f = n;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let n = self.get(b, inv(w[j - 1]));
                if n == UNDEF {
                    break;
                }
                b = n;
                j -= 1;
            }
            if i == j {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, inv(w[i]), f);
                if self.record_deductions {
                    self.deductions.push((f, w[i]));
                }
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            f = self.define(f, w[i])?;
            i += 1;
        }
    }

    fn compact(&mut self) -> Vec<u32> {
        let n = self.rows();
        let mut newnum = vec![UNDEF; n];
        let mut k = 0u32;
        for (c, slot) in newnum.iter_mut().enumerate() {
            if self.forward[c] == c as u32 {
                *slot = k;
                k += 1;
            }
        }
        let mut table = Vec::with_capacity(k as usize * self.ncols);
        for c in 0..n {
            if newnum[c] == UNDEF {
                continue;
            }
            for x in 0..self.ncols {
                let v = self.table[c * self.ncols + x];
                table.push(if v == UNDEF {
                    UNDEF
                } else {
                    newnum[v as usize]
                });
            }
        }
        self.table = table;
        self.forward = (0..k).collect();
        newnum
    }

    fn live(&self) -> usize {
        (0..self.rows()).filter(|&c| self.alive(c as u32)).count()
    }

    /// Reclaims dead rows, optionally after a lookahead pass. Returns the
    /// renumbering, or `None` if no room could be made.
    fn recover(&mut self, lookahead: bool) -> Option<Vec<u32>> {
        if lookahead {
            let rels = Rc::clone(&self.relators);
            for c in 0..self.rows() as u32 {
                for r in rels.iter() {
                    if !self.alive(c) {
                        break;
                    }
                    let _ = self.scan(c, r, false);
                }
            }
        }
        if self.live() >= self.max_rows {
            return None;
        }
        Some(self.compact())
    }

    fn is_complete_row(&self, c: u32) -> bool {
        (0..self.ncols as u32).all(|x| self.get(c, x) != UNDEF)
    }

    fn run_hlt(&mut self, subgroup: &[Vec<u32>], lookahead: bool) -> Result<(), usize> {
        for w in subgroup {
            self.scan_fill_recover(0, w, lookahead)?;
        }
        let rels = Rc::clone(&self.relators);
        let mut c: u32 = 0;
        while (c as usize) < self.rows() {
            if self.alive(c) {
                let mut r = 0;
                while r < rels.len() && self.alive(c) {
                    match self.scan(c, &rels[r], true) {
                        Ok(()) => r += 1,
                        Err(Full) => {
                            let map = self.recover(lookahead).ok_or(self.rows())?;
                            c = remap_pointer(&map, c);
                            if (c as usize) >= self.rows() {
                                return Ok(());
                            }
                            r = 0;
                        }
                    }
                }
                let mut x = 0;
                while x < self.ncols as u32 && self.alive(c) {
                    if self.get(c, x) == UNDEF && self.define(c, x).is_err() {
                        let map = self.recover(lookahead).ok_or(self.rows())?;
                        c = remap_pointer(&map, c);
                        if (c as usize) >= self.rows() {
                            return Ok(());
                        }
                        continue;
                    }
                    x += 1;
                }
            }
            c += 1;
        }
        Ok(())
    }

    /// Scans a subgroup generator at coset 0. Nothing else is in flight, so
    /// compaction cannot invalidate coset 0 (it is never merged away).
    fn scan_fill_recover(&mut self, c: u32, w: &[u32], lookahead: bool) -> Result<(), usize> {
        loop {
            match self.scan(c, w, true) {
                Ok(()) => return Ok(()),
                Err(Full) => {
                    if self.recover(lookahead).is_none() {
                        return Err(self.rows());
                    }
                }
            }
        }
    }

    fn build_conjugates(&mut self) {
        let mut seen = std::collections::HashSet::new();
        let mut conjugates = vec![Vec::new(); self.ncols];
        for r in self.relators.iter() {
            let inverse: Vec<u32> = r.iter().rev().map(|&x| inv(x)).collect();
            for w in [r.clone(), inverse] {
                for k in 0..w.len() {
                    let mut rot = w[k..].to_vec();
                    rot.extend_from_slice(&w[..k]);
                    if seen.insert(rot.clone()) {
                        conjugates[rot[0] as usize].push(rot);
                    }
                }
            }
        }
        self.conjugates = Rc::new(conjugates);
    }

    fn process_deductions(&mut self) {
        let conj = Rc::clone(&self.conjugates);
        while let Some((c, x)) = self.deductions.pop() {
            if !self.alive(c) {
                continue;
            }
            for r in &conj[x as usize] {
                let _ = self.scan(c, r, false);
                if !self.alive(c) {
                    break;
                }
            }
            if !self.alive(c) {
                continue;
            }
            let d = self.get(c, x);
            if d == UNDEF || !self.alive(d) {
                continue;
            }
            for r in &conj[inv(x) as usize] {
                let _ = self.scan(d, r, false);
                if !self.alive(d) {
                    break;
                }
            }
        }
    }

    fn run_felsch(&mut self, subgroup: &[Vec<u32>]) -> Result<(), usize> {
        self.build_conjugates();
        self.record_deductions = true;
        for w in subgroup {
            self.scan_fill_recover(0, w, false)?;
            self.process_deductions();
        }
        let mut c: u32 = 0;
        while (c as usize) < self.rows() {
            let mut x = 0;
            while self.alive(c) && x < self.ncols as u32 {
                if self.get(c, x) == UNDEF {
                    match self.define(c, x) {
                        Ok(_) => self.process_deductions(),
                        Err(Full) => {
                            let map = self.recover(false).ok_or(self.rows())?;
                            c = remap_pointer(&map, c);
                            if (c as usize) >= self.rows() {
                                return Ok(());
                            }
                            continue;
                        }
                    }
                }
                x += 1;
            }
            c += 1;
        }
        Ok(())
    }
}

/// New index of the first live coset at or after `c`.
fn remap_pointer(map: &[u32], c: u32) -> u32 {
    map[c as usize..]
        .iter()
        .copied()
        .find(|&v| v != UNDEF)
        .unwrap_or_else(|| map.iter().filter(|&&v| v != UNDEF).count() as u32)
}

fn word_columns(p: &Presentation, w: &Word) -> Result<Vec<u32>, CosetError> {
    w.letters()
        .iter()
        .map(|l| {
            p.generators()
                .iter()
                .position(|g| *g == l.symbol)
                .map(|i| 2 * i as u32 + u32::from(l.inverse))
                .ok_or_else(|| {
                    PresentationError::UnknownSymbol(l.symbol.clone(), p.label().to_string()).into()
                })
        })
        .collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by the explicit part of `p`.
pub fn enumerate(
    p: &Presentation,
    subgroup: &[Word],
    cfg: &EnumerationConfig,
) -> Result<EnumerationResult, CosetError> {
    let relators = p
        .relator_words()
        .map(|w| word_columns(p, w))
        .collect::<Result<Vec<_>, _>>()?;
    let subgroup = subgroup
        .iter()
        .map(|w| word_columns(p, w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut e = Enumerator::new(p.generators().len(), relators, cfg.max_cosets);
    let run = match cfg.strategy {
        Strategy::Hlt => e.run_hlt(&subgroup, cfg.lookahead),
        Strategy::Felsch => e.run_felsch(&subgroup),
    };
    if let Err(used) = run {
        return Ok(EnumerationResult::Overflow { cosets_used: used });
    }
    e.compact();
    debug_assert!((0..e.rows() as u32).all(|c| e.is_complete_row(c)));
    let n = e.rows();
    Ok(EnumerationResult::Completed {
        index: n,
        table: CosetTable {
            generators: p.generators().to_vec(),
            num_cosets: n,
            entries: e.table,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    NontrivialFinite(usize),
    Inconclusive,
}

pub fn is_trivial(p: &Presentation, cfg: &EnumerationConfig) -> Triviality {
    match enumerate(&p.explicit_part(), &[], cfg) {
        Ok(EnumerationResult::Completed { index: 1, .. }) => Triviality::Trivial,
        Ok(EnumerationResult::Completed { index, .. }) => Triviality::NontrivialFinite(index),
        _ => Triviality::Inconclusive,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnotatedVerdict {
    Trivial,
    Inconclusive,
}

/// Result of deciding triviality of a presentation whose annotations stand
/// for generators and relators that are not written down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedTriviality {
    pub verdict: AnnotatedVerdict,
    pub explicit: Triviality,
    pub justification: Vec<String>,
}

/// Decides triviality of the full group from its explicit part: if the
/// explicit part is trivial, so is every annotation base word, so every
/// normal closure is trivial and with it every auxiliary generator. Any
/// auxiliary relator then holds automatically.
pub fn is_trivial_with_annotations(
    p: &Presentation,
    cfg: &EnumerationConfig,
) -> Result<AnnotatedTriviality, CosetError> {
    for a in p.annotations() {
        for w in &a.base_words {
            p.check_word(w)?;
        }
    }
    let explicit = is_trivial(p, cfg);
    let mut justification = Vec::new();
    let verdict = match explicit {
        Triviality::Trivial => {
            justification.push(format!(
                "explicit part of {} ({} generators, {} relators) enumerates to a single coset",
                p.label(),
                p.generators().len(),
                p.relators().len()
            ));
            for a in p.annotations() {
                justification.push(annotation_argument(a));
            }
            if !p.annotations().is_empty() {
                justification.push(
                    "all auxiliary generators are trivial, so the full group is trivial".into(),
                );
            }
            AnnotatedVerdict::Trivial
        }
        Triviality::NontrivialFinite(n) => {
            justification.push(format!(
                "explicit part has order {n}; the annotated group is not determined"
            ));
            AnnotatedVerdict::Inconclusive
        }
        Triviality::Inconclusive => {
            justification.push("enumeration of the explicit part did not complete".into());
            AnnotatedVerdict::Inconclusive
        }
    };
    Ok(AnnotatedTriviality {
        verdict,
        explicit,
        justification,
    })
}

fn annotation_argument(a: &NormalClosureAnnotation) -> String {
    let bases: Vec<String> = a.base_words.iter().map(|w| format!("[{w}]")).collect();
    format!(
        "{}: base words {} are trivial, so their normal closure is trivial",
        a.aux_description,
        bases.join(", ")
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordVerdict {
    True,
    False,
    Inconclusive,
}

/// Decides `w = 1` when the enumeration over the trivial subgroup completes.
pub fn word_is_identity(
    p: &Presentation,
    w: &Word,
    cfg: &EnumerationConfig,
) -> Result<WordVerdict, CosetError> {
    p.check_word(w)?;
    match enumerate(&p.explicit_part(), &[], cfg)? {
        EnumerationResult::Completed { table, .. } => {
            for c in 1..=table.num_cosets() {
                if table.trace(c, w)? != c {
                    return Ok(WordVerdict::False);
                }
            }
            Ok(WordVerdict::True)
        }
        EnumerationResult::Overflow { .. } => Ok(WordVerdict::Inconclusive),
    }
}
