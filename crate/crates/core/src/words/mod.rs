//! Words in the twist, rotation and reflection symbols, and their images in
//! the mod-2 and signed representations.
//!
//! Mod 2 a twist and its inverse have the same image, so nothing here can
//! tell `A` from `A^-1`.

mod eval;
mod word;

use thiserror::Error;

use crate::f2linalg::LinalgError;
use crate::surface::SurfaceError;

pub use eval::{evaluate_mod2, evaluate_signed, Environment, Evaluator};
pub use word::{format_word, parse_word, Atom, AtomKind, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error in `{text}` at byte {pos}: unexpected `{found}`")]
    Syntax { text: String, pos: usize, found: String },
    #[error("unknown generator `{0}`")]
    UnknownName(String),
    #[error("unresolved label `${0}`")]
    Unresolved(String),
    #[error("label `{0}` is already defined")]
    Duplicate(String),
    #[error("no integer representation for twists")]
    TwistInSigned,
    #[error("genus or layout mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
