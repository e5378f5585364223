//! Group presentations and the constructive moves used to assemble them:
//! free products, amalgamation, Tietze elimination and abelianization.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::snf::{smith_normal_form, IntMatrix, SnfError};
use crate::word::{Symbol, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("generator {0} is not in the alphabet of {1}")]
    UnknownSymbol(Symbol, String),
    #[error("no relator of the form {generator} = {defining} found")]
    NoDefiningRelator { generator: Symbol, defining: Word },
    #[error("defining word {defining} for {generator} mentions {generator}")]
    SelfReferentialDefinition { generator: Symbol, defining: Word },
    #[error("relator index {0} out of range")]
    RelatorIndex(usize),
    #[error("rename produces duplicate generator {0}")]
    RenameCollision(Symbol),
    #[error(transparent)]
    Snf(#[from] SnfError),
}

/// A relator together with an optional label used by derivation scripts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub word: Word,
    pub name: Option<String>,
}

impl Relator {
    pub fn new(word: Word) -> Self {
        Relator { word, name: None }
    }

    pub fn named(word: Word, name: impl Into<String>) -> Self {
        Relator {
            word,
            name: Some(name.into()),
        }
    }
}

/// Records that some auxiliary generators and relators of unknown form all lie
/// in the normal closure of `base_words`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalClosureAnnotation {
    pub aux_description: String,
    pub base_words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyName,
    InvalidName(String),
    DuplicateGenerator(Symbol),
    UndeclaredSymbol { relator: usize, symbol: Symbol },
    AnnotationWithoutBase(usize),
    UndeclaredAnnotationSymbol { annotation: usize, symbol: Symbol },
    DuplicateRelatorName(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyName => write!(f, "presentation label is empty"),
            Violation::InvalidName(n) => write!(f, "invalid name {n:?}"),
            Violation::DuplicateGenerator(s) => write!(f, "duplicate generator {s}"),
            Violation::UndeclaredSymbol { relator, symbol } => {
                write!(f, "relator {} uses undeclared symbol {symbol}", relator + 1)
            }
            Violation::AnnotationWithoutBase(i) => {
                write!(f, "annotation {} has no base words", i + 1)
            }
            Violation::UndeclaredAnnotationSymbol { annotation, symbol } => write!(
                f,
                "annotation {} uses undeclared symbol {symbol}",
                annotation + 1
            ),
            Violation::DuplicateRelatorName(n) => write!(f, "duplicate relator name {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Invariant factors `d1 | d2 | ...`, each at least 2.
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        // Recompute invariant factors of the combined diagonal.
        let n = self.torsion.len() + other.torsion.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, d) in self.torsion.iter().chain(&other.torsion).enumerate() {
            m.set(i, i, *d);
        }
        let snf = smith_normal_form(&m).expect("torsion coefficients are small");
        AbelianGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: snf.diagonal.into_iter().filter(|&d| d > 1).collect(),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Abelianization of the explicit part of a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub group: AbelianGroup,
    /// True when the presentation carries normal-closure annotations, whose
    /// auxiliary generators are not represented in `group`.
    pub explicit_part_only: bool,
    /// Annotation base words with a nonzero exponent vector. Every annotation
    /// in the shipped fixtures has commutator bases, so this is normally empty.
    pub warnings: Vec<String>,
}

/// Renames applied to the right factor of a free product.
pub type RenameReport = Vec<(Symbol, Symbol)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    label: String,
    generators: Vec<Symbol>,
    relators: Vec<Relator>,
    annotations: Vec<NormalClosureAnnotation>,
}

impl Presentation {
    /// Builds a presentation, cyclically reducing relators and dropping empty
    /// ones. No validation is performed; see [`Presentation::validate`].
    pub fn new(
        label: impl Into<String>,
        generators: Vec<Symbol>,
        relators: Vec<Relator>,
        annotations: Vec<NormalClosureAnnotation>,
    ) -> Self {
        let relators = relators
            .into_iter()
            .filter_map(|r| {
                let (core, _) = r.word.cyclic_reduce();
                (!core.is_identity()).then_some(Relator {
                    word: core,
                    name: r.name,
                })
            })
            .collect();
        Presentation {
            label: label.into(),
            generators,
            relators,
            annotations,
        }
    }

    /// Presentation from bare relator words.
    pub fn from_words(label: &str, generators: &[&str], relators: &[Word]) -> Self {
        let gens = generators
            .iter()
            .map(|g| Symbol::new(g).expect("valid generator name"))
            .collect();
        Presentation::new(
            label,
            gens,
            relators.iter().cloned().map(Relator::new).collect(),
            Vec::new(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[Symbol] {
        &self.generators
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn relator_words(&self) -> impl Iterator<Item = &Word> {
        self.relators.iter().map(|r| &r.word)
    }

    pub fn annotations(&self) -> &[NormalClosureAnnotation] {
        &self.annotations
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn generator(&self, name: &str) -> Option<&Symbol> {
        self.generators.iter().find(|g| g.as_str() == name)
    }

    /// Looks a relator up by name, falling back to a 1-based index.
    pub fn find_relator(&self, reference: &str) -> Option<&Relator> {
        if let Some(r) = self
            .relators
            .iter()
            .find(|r| r.name.as_deref() == Some(reference))
        {
            return Some(r);
        }
        let idx: usize = reference.parse().ok()?;
        idx.checked_sub(1).and_then(|i| self.relators.get(i))
    }

    /// The same presentation without annotations.
    pub fn explicit_part(&self) -> Presentation {
        Presentation {
            annotations: Vec::new(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        if self.label.is_empty() {
            v.push(Violation::EmptyName);
        } else if !crate::word::is_valid_name(&self.label) {
            v.push(Violation::InvalidName(self.label.clone()));
        }
        let mut seen = HashSet::new();
        for g in &self.generators {
            if !seen.insert(g) {
                v.push(Violation::DuplicateGenerator(g.clone()));
            }
        }
        let mut reported = HashSet::new();
        for (i, r) in self.relators.iter().enumerate() {
            for s in r.word.symbols() {
                if !seen.contains(s) && reported.insert((i, s.clone())) {
                    v.push(Violation::UndeclaredSymbol {
                        relator: i,
                        symbol: s.clone(),
                    });
                }
            }
        }
        let mut names = HashSet::new();
        for r in &self.relators {
            if let Some(n) = &r.name {
                if !names.insert(n) {
                    v.push(Violation::DuplicateRelatorName(n.clone()));
                }
            }
        }
        for (i, a) in self.annotations.iter().enumerate() {
            if a.base_words.is_empty() {
                v.push(Violation::AnnotationWithoutBase(i));
            }
            let mut reported = HashSet::new();
            for s in a.base_words.iter().flat_map(Word::symbols) {
                if !seen.contains(s) && reported.insert(s.clone()) {
                    v.push(Violation::UndeclaredAnnotationSymbol {
                        annotation: i,
                        symbol: s.clone(),
                    });
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<(), PresentationError> {
        match w.symbols().find(|s| !self.generators.contains(s)) {
            Some(s) => Err(PresentationError::UnknownSymbol(
                s.clone(),
                self.label.clone(),
            )),
            None => Ok(()),
        }
    }

    /// Appends the relator `w` (cyclically reduced; the identity is a no-op).
    pub fn add_relator(&self, w: &Word) -> Result<Presentation, PresentationError> {
        self.add_relator_named(w, None)
    }

    pub fn add_relator_named(
        &self,
        w: &Word,
        name: Option<String>,
    ) -> Result<Presentation, PresentationError> {
        self.check_word(w)?;
        let mut p = self.clone();
        let (core, _) = w.cyclic_reduce();
        if !core.is_identity() {
            p.relators.push(Relator { word: core, name });
        }
        Ok(p)
    }

    /// Free product. Generators of `other` that collide with ours are renamed
    /// with a `_2` suffix (or `_3`, ... if that is taken too).
    pub fn free_product(&self, other: &Presentation) -> (Presentation, RenameReport) {
        let mut taken: BTreeSet<Symbol> = self.generators.iter().cloned().collect();
        taken.extend(other.generators.iter().cloned());
        let mut renames: BTreeMap<Symbol, Symbol> = BTreeMap::new();
        let mut report = Vec::new();
        for g in &other.generators {
            if self.generators.contains(g) {
                let fresh = (2..)
                    .map(|k| Symbol::new(&format!("{}_{k}", g.as_str())).expect("valid"))
                    .find(|s| !taken.contains(s))
                    .expect("unbounded");
                taken.insert(fresh.clone());
                renames.insert(g.clone(), fresh.clone());
                report.push((g.clone(), fresh));
            }
        }
        let map = |s: &Symbol| renames.get(s).cloned().unwrap_or_else(|| s.clone());
        let right = other.rename_unchecked(&map);

        let mut generators = self.generators.clone();
        generators.extend(right.generators);
        let mut relators = self.relators.clone();
        let names: HashSet<String> = relators.iter().filter_map(|r| r.name.clone()).collect();
        relators.extend(right.relators.into_iter().map(|mut r| {
            if r.name.as_ref().is_some_and(|n| names.contains(n)) {
                r.name = r.name.map(|n| format!("{n}_2"));
            }
            r
        }));
        let mut annotations = self.annotations.clone();
        annotations.extend(right.annotations);
        let label = format!("{}_{}", self.label, other.label);
        (
            Presentation {
                label,
                generators,
                relators,
                annotations,
            },
            report,
        )
    }

    /// Appends `u v^-1` for each identification `(u, v)`.
    pub fn amalgamate(
        &self,
        identifications: &[(Word, Word)],
    ) -> Result<Presentation, PresentationError> {
        let mut p = self.clone();
        for (u, v) in identifications {
            self.check_word(u)?;
            self.check_word(v)?;
            p = p.add_relator(&u.concat(&v.inverse()))?;
        }
        Ok(p)
    }

    /// Renames generators through `map`. Fails if two generators collide.
    pub fn rename(
        &self,
        map: &dyn Fn(&Symbol) -> Symbol,
    ) -> Result<Presentation, PresentationError> {
        let mut seen = HashSet::new();
        for g in &self.generators {
            let n = map(g);
            if !seen.insert(n.clone()) {
                return Err(PresentationError::RenameCollision(n));
            }
        }
        Ok(self.rename_unchecked(map))
    }

    fn rename_unchecked(&self, map: &dyn Fn(&Symbol) -> Symbol) -> Presentation {
        Presentation {
            label: self.label.clone(),
            generators: self.generators.iter().map(map).collect(),
            relators: self
                .relators
                .iter()
                .map(|r| Relator {
                    word: r.word.rename(map),
                    name: r.name.clone(),
                })
                .collect(),
            annotations: self
                .annotations
                .iter()
                .map(|a| NormalClosureAnnotation {
                    aux_description: a.aux_description.clone(),
                    base_words: a.base_words.iter().map(|w| w.rename(map)).collect(),
                })
                .collect(),
        }
    }

    /// Removes generator `g` using a relator that says `g = defining`.
    ///
    /// The defining relator may appear as any cyclic rotation of
    /// `g defining^-1` or of its inverse. It is dropped, `g` is substituted
    /// everywhere else, and relators that become trivial are discarded.
    pub fn tietze_eliminate(
        &self,
        g: &Symbol,
        defining: &Word,
    ) -> Result<Presentation, PresentationError> {
        if !self.generators.contains(g) {
            return Err(PresentationError::UnknownSymbol(
                g.clone(),
                self.label.clone(),
            ));
        }
        self.check_word(defining)?;
        if defining.contains_symbol(g) {
            return Err(PresentationError::SelfReferentialDefinition {
                generator: g.clone(),
                defining: defining.clone(),
            });
        }
        let target = Word::generator(g.clone()).concat(&defining.inverse());
        let target_nf = target.relator_normal_form();
        let idx = self
            .relators
            .iter()
            .position(|r| r.word.len() == target.len() && r.word.relator_normal_form() == target_nf)
            .ok_or_else(|| PresentationError::NoDefiningRelator {
                generator: g.clone(),
                defining: defining.clone(),
            })?;

        let relators = self
            .relators
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, r)| Relator {
                word: r.word.substitute(g, defining),
                name: r.name.clone(),
            })
            .collect();
        let annotations = self
            .annotations
            .iter()
            .map(|a| NormalClosureAnnotation {
                aux_description: a.aux_description.clone(),
                base_words: a
                    .base_words
                    .iter()
                    .map(|w| w.substitute(g, defining))
                    .collect(),
            })
            .collect();
        Ok(Presentation::new(
            self.label.clone(),
            self.generators
                .iter()
                .filter(|s| *s != g)
                .cloned()
                .collect(),
            relators,
            annotations,
        ))
    }

    /// Replaces relator `target` by `other^exp · target`, where `other` is
    /// another relator. The group is unchanged since the old relator is
    /// recovered as `other^-exp` times the new one.
    pub fn multiply_relator(
        &self,
        target: usize,
        other: usize,
        exp: i64,
    ) -> Result<Presentation, PresentationError> {
        let n = self.relators.len();
        if target >= n {
            return Err(PresentationError::RelatorIndex(target));
        }
        if other >= n || other == target {
            return Err(PresentationError::RelatorIndex(other));
        }
        let mut p = self.clone();
        let w = self.relators[other]
            .word
            .pow(exp)
            .concat(&self.relators[target].word);
        p.relators[target].word = w.cyclic_reduce().0;
        p.relators.retain(|r| !r.word.is_identity());
        Ok(p)
    }

    pub fn remove_relator(&self, index: usize) -> Result<Presentation, PresentationError> {
        if index >= self.relators.len() {
            return Err(PresentationError::RelatorIndex(index));
        }
        let mut p = self.clone();
        p.relators.remove(index);
        Ok(p)
    }

    pub fn add_annotation(
        &self,
        a: NormalClosureAnnotation,
    ) -> Result<Presentation, PresentationError> {
        for w in &a.base_words {
            self.check_word(w)?;
        }
        let mut p = self.clone();
        p.annotations.push(a);
        Ok(p)
    }

    /// Index of the first relator with the same normal form as `w`.
    pub fn position_of(&self, w: &Word) -> Option<usize> {
        let nf = w.relator_normal_form();
        self.relators
            .iter()
            .position(|r| r.word.relator_normal_form() == nf)
    }

    /// Relator normal forms with duplicates removed, for syntactic comparison.
    pub fn normalized_relators(&self) -> BTreeSet<Word> {
        self.relators
            .iter()
            .map(|r| r.word.relator_normal_form())
            .collect()
    }

    fn exponents(&self, w: &Word) -> Result<Vec<i64>, PresentationError> {
        w.exponent_vector(&self.generators).map_err(|e| match e {
            WordError::UnknownSymbol(s) => PresentationError::UnknownSymbol(s, self.label.clone()),
            WordError::InvalidName(_) => unreachable!("symbols are validated on construction"),
        })
    }

    /// Relation matrix: one row per relator, one column per generator.
    pub fn relation_matrix(&self) -> Result<IntMatrix, PresentationError> {
        let mut m = IntMatrix::zeros(self.relators.len(), self.generators.len());
        for (i, r) in self.relators.iter().enumerate() {
            for (j, v) in self.exponents(&r.word)?.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// H1 of the explicit part.
    pub fn abelianization(&self) -> Result<Abelianization, PresentationError> {
        let snf = smith_normal_form(&self.relation_matrix()?)?;
        let mut warnings = Vec::new();
        for a in &self.annotations {
            for w in &a.base_words {
                if self.exponents(w)?.iter().any(|&x| x != 0) {
                    warnings.push(format!(
                        "annotation '{}' has base word {w} with nonzero exponent vector",
                        a.aux_description
                    ));
                }
            }
        }
        Ok(Abelianization {
            group: AbelianGroup {
                free_rank: self.generators.len() - snf.rank,
                torsion: snf.diagonal.into_iter().filter(|&d| d > 1).collect(),
            },
            explicit_part_only: !self.annotations.is_empty(),
            warnings,
        })
    }
}

/// Difference between a built presentation and a golden one, compared as sets
/// of relator normal forms over the same alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenComparison {
    pub same_generators: bool,
    pub missing: Vec<Word>,
    pub extra: Vec<Word>,
}

impl GoldenComparison {
    pub fn compare(built: &Presentation, golden: &Presentation) -> Self {
        let bg: BTreeSet<_> = built.generators().iter().collect();
        let gg: BTreeSet<_> = golden.generators().iter().collect();
        let b = built.normalized_relators();
        let g = golden.normalized_relators();
        GoldenComparison {
            same_generators: bg == gg,
            missing: g.difference(&b).cloned().collect(),
            extra: b.difference(&g).cloned().collect(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.same_generators && self.missing.is_empty() && self.extra.is_empty()
    }

    /// True when the only differences are extra relators from `allowed`.
    pub fn matches_allowing(&self, allowed: &[Word]) -> bool {
        let allowed: BTreeSet<Word> = allowed.iter().map(Word::relator_normal_form).collect();
        self.same_generators
            && self.missing.is_empty()
            && self.extra.iter().all(|w| allowed.contains(w))
    }
}
