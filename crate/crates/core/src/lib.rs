//! Finitely presented groups: free-group words, presentations with Tietze
//! moves and abelianization, a presentation DSL, Todd-Coxeter coset
//! enumeration, an equational-proof checker, and the gluing pipeline that
//! computes the fundamental groups of two fiber-sum 4-manifolds.

pub mod charnum;
pub mod cli;
pub mod coset;
pub mod derivation;
pub mod parser;
pub mod pipeline;
pub mod presentation;
pub mod report;
pub mod snf;
pub mod word;

pub use coset::{enumerate, CosetTable, EnumerationConfig, EnumerationResult, Strategy};
pub use derivation::{
    check_script, DerivationEnvironment, DerivationScript, DerivationStep, StepSource,
};
pub use parser::{parse_derivation, parse_presentation, parse_word, ParseError};
pub use presentation::{AbelianGroup, Presentation, Relator};
pub use word::{Letter, Symbol, Word};
