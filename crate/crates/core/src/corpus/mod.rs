//! Data model, ingestion and text preprocessing.

mod dedupe;
pub mod discipline;
pub mod io;
pub mod model;
pub mod text;

pub use dedupe::{dedupe_applicants, DedupeReport};
pub use discipline::{Area, Discipline, DisciplineCode, DisciplineTable};
pub use io::{load_corpus, load_corpus_lenient, load_corpus_with, save_corpus, Format, LoadOptions, LoadReport, Reject};
pub use model::*;
pub use text::{normalize_text, word_count};
