//! Proof chains as step lists over words, a runner that checks each step in
//! the mod-2 representation, and a constructive conjugator finder.
//!
//! Scripts are written in a line-oriented language:
//!
//! ```text
//! script t29
//! requires g % 2 == 1 && g >= 27
//! bound g = 2r+1 >= 27
//! layout rotation
//! def G1 = Gm10 * C2^-1 * F18 * C12^-1
//! assert_img T^-4 : gm10->gm6, c2->a1, f18->f14, c12->c10
//! assert_eq T^-4 * $G1 * T^4 == Gm6 * A1^-1 * F14 * C10^-1
//! when g == 27: assert_eq ...
//! assert_gen [T, $G1] == omori
//! ```
//!
//! `{expr}` is replaced by the value of an integer expression in `g`, `r`
//! and `k` before a step is parsed.

mod conjugator;
mod dsl;
mod run;

use thiserror::Error;

use crate::expr::ExprError;
use crate::surface::{CurveId, GenusModel, Layout, SeedProfile, SurfaceError};
use crate::words::{Word, WordError};

pub use conjugator::{conjugator_plan, find_conjugator, realize_transvection, ConjugatorError};
pub use dsl::{parse_script, ScriptSource};
pub use run::{
    generation_inputs, run_script, Level, RunContext, RunReport, StepReport, StepStatus, Verdict, SEMANTICS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("{id} needs {bound}; got g={g}")]
    OutOfRange { id: String, bound: String, g: usize },
    #[error("unknown script `{0}`")]
    Unknown(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ExprError },
    #[error("line {line}: {source}")]
    Word { line: usize, source: WordError },
    #[error("line {line}: {msg}")]
    Step { line: usize, msg: String },
    #[error("script is for g={script}, context is g={context}")]
    Mismatch { script: usize, context: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// One proof step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// Binds a label to a word.
    Define { label: String, word: Word },
    /// Both sides have the same mod-2 matrix.
    AssertRepEqual { lhs: Word, rhs: Word },
    /// The word sends the class of each left curve to the class of the right.
    AssertClassImage { word: Word, pairs: Vec<(CurveId, CurveId)> },
    /// The two lists generate the same subgroup of `GL(g, 2)`.
    AssertGeneration { gens: Vec<Word>, reference: Vec<Word> },
    /// The quotient determinant of a twist-free word.
    AssertDet { word: Word, value: i64 },
    /// Binds a label to a word in twists that carries each left class to
    /// the right one.
    FindConjugator { label: String, pairs: Vec<(CurveId, CurveId)> },
}

impl Step {
    pub fn kind(&self) -> &'static str {
        match self {
            Step::Define { .. } => "def",
            Step::AssertRepEqual { .. } => "assert_eq",
            Step::AssertClassImage { .. } => "assert_img",
            Step::AssertGeneration { .. } => "assert_gen",
            Step::AssertDet { .. } => "assert_det",
            Step::FindConjugator { .. } => "find",
        }
    }

    pub fn is_assertion(&self) -> bool {
        !matches!(self, Step::Define { .. } | Step::FindConjugator { .. })
    }

    /// The label this step binds, if any.
    pub fn binds(&self) -> Option<&str> {
        match self {
            Step::Define { label, .. } | Step::FindConjugator { label, .. } => Some(label),
            _ => None,
        }
    }

    /// Labels the step reads.
    pub fn reads(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        match self {
            Step::Define { word, .. }
            | Step::AssertClassImage { word, .. }
            | Step::AssertDet { word, .. } => push_labels(&mut out, word),
            Step::AssertRepEqual { lhs, rhs } => {
                push_labels(&mut out, lhs);
                push_labels(&mut out, rhs);
            }
            Step::AssertGeneration { gens, reference } => {
                for w in gens.iter().chain(reference) {
                    push_labels(&mut out, w);
                }
            }
            Step::FindConjugator { .. } => {}
        }
        out
    }
}

fn push_labels<'a>(out: &mut Vec<&'a str>, w: &'a Word) {
    for l in w.labels() {
        if !out.contains(&l) {
            out.push(l);
        }
    }
}

/// A step with the source line it came from, after template expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub line: usize,
    pub text: String,
    pub step: Step,
}

/// A script instantiated at one genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub id: String,
    pub title: String,
    pub bound: String,
    pub genus: GenusModel,
    pub layout: Layout,
    pub profile: SeedProfile,
    /// Conditions of the `when` lines that were selected.
    pub variants: Vec<(usize, String)>,
    pub steps: Vec<ScriptStep>,
}

impl Script {
    /// Indices of the assertion steps that read `label`, directly or through
    /// other labels.
    pub fn dependents(&self, label: &str) -> Vec<usize> {
        let mut tainted = vec![label.to_string()];
        let mut out = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            let hit = s.step.reads().iter().any(|l| tainted.iter().any(|t| t == l));
            if !hit {
                continue;
            }
            match s.step.binds() {
                Some(b) => tainted.push(b.to_string()),
                None => out.push(i),
            }
        }
        out
    }

    /// Replaces the first occurrence of curve `from` by `to` in one step and
    /// predicts which steps fail: the step itself if it is an assertion,
    /// otherwise every assertion that depends on the label it binds.
    /// Generation checks are never tamper targets and are left out of
    /// predictions, since a corrupted generator list can still generate.
    pub fn tamper(&self, index: usize, from: CurveId, to: CurveId) -> Result<(Script, Vec<usize>), ScriptError> {
        let s = self.steps.get(index).ok_or_else(|| ScriptError::Syntax {
            line: 0,
            msg: format!("no step {index}"),
        })?;
        let mut hit = false;
        let mut swap = |w: &Word| -> Word {
            let atoms = w
                .atoms
                .iter()
                .map(|a| {
                    let mut a = a.clone();
                    if !hit && a.kind == crate::words::AtomKind::Twist(from) {
                        a.kind = crate::words::AtomKind::Twist(to);
                        hit = true;
                    }
                    a
                })
                .collect();
            Word::from_atoms(atoms)
        };
        let step = match &s.step {
            Step::Define { label, word } => Step::Define {
                label: label.clone(),
                word: swap(word),
            },
            Step::AssertRepEqual { lhs, rhs } => {
                let lhs = swap(lhs);
                let rhs = swap(rhs);
                Step::AssertRepEqual { lhs, rhs }
            }
            Step::AssertClassImage { word, pairs } => {
                let word = swap(word);
                let mut pairs = pairs.clone();
                if !hit {
                    swap_first(&mut pairs, from, to, &mut hit);
                }
                Step::AssertClassImage { word, pairs }
            }
            Step::AssertDet { word, value } => Step::AssertDet {
                word: swap(word),
                value: *value,
            },
            Step::FindConjugator { label, pairs } => {
                let mut pairs = pairs.clone();
                swap_first(&mut pairs, from, to, &mut hit);
                Step::FindConjugator {
                    label: label.clone(),
                    pairs,
                }
            }
            Step::AssertGeneration { .. } => {
                return Err(ScriptError::Syntax {
                    line: s.line,
                    msg: "generation steps are not tamper targets".into(),
                })
            }
        };
        if !hit {
            return Err(ScriptError::Syntax {
                line: s.line,
                msg: format!("step does not mention {from}"),
            });
        }
        let predicted = match step.binds() {
            Some(label) => self
                .dependents(label)
                .into_iter()
                .filter(|&i| !matches!(self.steps[i].step, Step::AssertGeneration { .. }))
                .collect(),
            None => vec![index],
        };
        let mut out = self.clone();
        out.steps[index] = ScriptStep {
            line: s.line,
            text: format!("{} (tampered: {from} -> {to})", s.text),
            step,
        };
        Ok((out, predicted))
    }
}

fn swap_first(pairs: &mut [(CurveId, CurveId)], from: CurveId, to: CurveId, hit: &mut bool) {
    for (a, b) in pairs.iter_mut() {
        for c in [a, b] {
            if !*hit && *c == from {
                *c = to;
                *hit = true;
            }
        }
    }
}

const BUILTIN: &[(&str, &str)] = &[
    ("t29", include_str!("../../scripts/t29.proof")),
    ("t42", include_str!("../../scripts/t42.proof")),
    ("t9odd", include_str!("../../scripts/t9odd.proof")),
    ("t8even", include_str!("../../scripts/t8even.proof")),
    ("t4k2", include_str!("../../scripts/t4k2.proof")),
    ("t4k3", include_str!("../../scripts/t4k3.proof")),
    ("t4k2_10", include_str!("../../scripts/t4k2_10.proof")),
    ("t4k3_7", include_str!("../../scripts/t4k3_7.proof")),
    ("prop41", include_str!("../../scripts/prop41.proof")),
    ("com_t42", include_str!("../../scripts/com_t42.proof")),
    ("com_t29", include_str!("../../scripts/com_t29.proof")),
    ("com_t4k2", include_str!("../../scripts/com_t4k2.proof")),
    ("com_t4k3", include_str!("../../scripts/com_t4k3.proof")),
    ("com_t8even", include_str!("../../scripts/com_t8even.proof")),
    ("com_t9odd", include_str!("../../scripts/com_t9odd.proof")),
    ("com_t4k2_10", include_str!("../../scripts/com_t4k2_10.proof")),
    ("com_t4k3_7", include_str!("../../scripts/com_t4k3_7.proof")),
];

/// Ids of the shipped scripts.
pub fn builtin_ids() -> Vec<&'static str> {
    BUILTIN.iter().map(|(id, _)| *id).collect()
}

/// The source text of a shipped script.
pub fn builtin_source(id: &str) -> Result<ScriptSource, ScriptError> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(i, _)| *i == id)
        .ok_or_else(|| ScriptError::Unknown(id.to_string()))?;
    parse_script(text)
}

/// A shipped script instantiated at genus `g`.
pub fn builtin_script(id: &str, g: usize) -> Result<Script, ScriptError> {
    builtin_source(id)?.instantiate(g)
}

/// The commutator script for genus `g`: the two- or three-commutator form
/// where it applies, else the small-genus form.
pub fn commutator_scripts(g: usize) -> Result<Script, ScriptError> {
    let (large, small) = match g % 4 {
        0 => ("com_t42", "com_t8even"),
        1 => ("com_t29", "com_t9odd"),
        2 => ("com_t4k2", "com_t4k2_10"),
        _ => ("com_t4k3", "com_t4k3_7"),
    };
    let large = builtin_source(large)?;
    if large.applies(g)? {
        return large.instantiate(g);
    }
    builtin_script(small, g)
}

/// The reference twists: `A1, A2, B1..Br, C1..C(r-1)`, then `D(g-1)` for
/// even `g`, then `E`.
pub fn omori_words(genus: GenusModel) -> Vec<Word> {
    let g = genus.g();
    let r = genus.r();
    let mut ids = vec![CurveId::a(1), CurveId::a(2)];
    ids.extend((1..=r).map(CurveId::b));
    ids.extend((1..r).map(CurveId::c));
    if g % 2 == 0 {
        ids.push(CurveId::d(g - 1));
    }
    ids.push(CurveId::e());
    ids.into_iter()
        .map(|c| Word::atom(crate::words::Atom::twist(c)))
        .collect()
}

#[cfg(test)]
mod tests;
