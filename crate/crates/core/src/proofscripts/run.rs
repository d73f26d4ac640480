use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{find_conjugator, Script, ScriptError, Step};
use crate::f2group::{compare_groups, BsgsConfig, GenSet};
use crate::f2linalg::{BitMat, BitVec};
use crate::surface::{
    build_catalog, d_hom, default_seed_sets, seeds_for, CurveCatalog, CurveId, MappingClassSpec,
};
use crate::words::{Environment, Evaluator, Word, WordError};

/// Stated at the top of every report.
pub const SEMANTICS: &str = "A pass certifies the mod-2 homology shadow of each step and exact \
generation of the mod-2 image group; it does not certify equality of mapping classes.";

/// Which representation `assert_eq` steps are checked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// The mod-2 homology action.
    #[default]
    Mod2,
    /// The mod-2 action and, for twist-free words, the signed permutation
    /// action on crosscap classes.
    Signed,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mod2" => Ok(Level::Mod2),
            "signed" => Ok(Level::Signed),
            _ => Err(format!("unknown level `{s}` (mod2 or signed)")),
        }
    }
}

/// Catalog, maps and limits a script runs against.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub catalog: CurveCatalog,
    pub spec: MappingClassSpec,
    pub config: BsgsConfig,
    pub level: Level,
}

impl RunContext {
    /// The shipped seeds for the script's genus, layout and profile, with
    /// the chain cap taken from the environment.
    pub fn for_script(script: &Script) -> Result<Self, ScriptError> {
        let seeds = seeds_for(&default_seed_sets(), script.profile, script.genus, script.layout)?;
        let catalog = build_catalog(script.genus, script.layout, seeds)?;
        Self::with_catalog(catalog)
    }

    pub fn with_catalog(catalog: CurveCatalog) -> Result<Self, ScriptError> {
        let spec = MappingClassSpec::new(catalog.genus(), catalog.layout())?;
        Ok(Self {
            catalog,
            spec,
            config: BsgsConfig::from_env(),
            level: Level::Mod2,
        })
    }

    pub fn level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }

    pub fn config(mut self, config: BsgsConfig) -> Self {
        self.config = config;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Pass,
    Fail,
    /// A generation check above the chain cap, not run.
    Deferred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub line: usize,
    pub kind: &'static str,
    pub text: String,
    pub status: StepStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// SHA-256 of the matrices the step compared or produced.
    pub witness: Vec<String>,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub script: String,
    pub title: String,
    pub genus: usize,
    pub layout: String,
    pub profile: String,
    pub bound: String,
    pub level: Level,
    pub semantics: &'static str,
    pub variants: Vec<String>,
    pub steps: Vec<StepReport>,
    pub passed: usize,
    pub failed: usize,
    pub deferred: usize,
    pub verdict: Verdict,
    pub millis: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// 0 on pass, 1 on failure.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Indices of the failed steps.
    pub fn failures(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.status == StepStatus::Fail)
            .map(|s| s.index)
            .collect()
    }

    /// Plain-text rendering, one line per step.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.semantics);
        let _ = writeln!(
            s,
            "script {} at g={} ({} layout, profile {}, level {:?}): {}",
            self.script,
            self.genus,
            self.layout,
            self.profile,
            self.level,
            self.title
        );
        for v in &self.variants {
            let _ = writeln!(s, "variant {v}");
        }
        for st in &self.steps {
            let tag = match st.status {
                StepStatus::Pass => "pass",
                StepStatus::Fail => "FAIL",
                StepStatus::Deferred => "deferred",
            };
            let _ = writeln!(s, "[{tag:>8}] {:>3}: {}", st.line, st.text);
            if let Some(d) = &st.detail {
                let _ = writeln!(s, "           {d}");
            }
        }
        let _ = writeln!(
            s,
            "verdict: {} ({} passed, {} failed, {} deferred) in {:.1} ms",
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            },
            self.passed,
            self.failed,
            self.deferred,
            self.millis
        );
        s
    }
}

fn hash(m: &BitMat) -> String {
    hex(&Sha256::digest(m.to_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Outcome {
    status: StepStatus,
    detail: Option<String>,
    witness: Vec<String>,
}

impl Outcome {
    fn pass(witness: Vec<String>) -> Self {
        Self {
            status: StepStatus::Pass,
            detail: None,
            witness,
        }
    }

    fn fail(detail: impl Into<String>, witness: Vec<String>) -> Self {
        Self {
            status: StepStatus::Fail,
            detail: Some(detail.into()),
            witness,
        }
    }
}

fn class(cat: &CurveCatalog, c: &CurveId) -> Result<BitVec, WordError> {
    Ok(cat.class(c)?)
}

/// Runs every step; evaluation errors fail the step and the run goes on.
pub fn run_script(script: &Script, ctx: &RunContext) -> Result<RunReport, ScriptError> {
    let cat = &ctx.catalog;
    if cat.genus() != script.genus || cat.layout() != script.layout {
        return Err(ScriptError::Mismatch {
            script: script.genus.g(),
            context: format!("{} {}", cat.genus(), cat.layout()),
        });
    }
    let start = Instant::now();
    let mut ev = Evaluator::new(Environment::new(script.genus), cat, &ctx.spec)
        .map_err(|source| ScriptError::Word { line: 0, source })?;
    let mut steps = Vec::with_capacity(script.steps.len());
    for (index, s) in script.steps.iter().enumerate() {
        let t = Instant::now();
        if let (Some(p), Step::AssertGeneration { .. }) = (&ctx.config.progress, &s.step) {
            p(&format!("{} g={}: generation check at line {}", script.id, script.genus.g(), s.line));
        }
        let out = match run_step(&s.step, &mut ev, ctx) {
            Ok(o) => o,
            Err(e) => Outcome::fail(e.to_string(), Vec::new()),
        };
        steps.push(StepReport {
            index,
            line: s.line,
            kind: s.step.kind(),
            text: s.text.clone(),
            status: out.status,
            detail: out.detail,
            witness: out.witness,
            millis: t.elapsed().as_secs_f64() * 1e3,
        });
    }
    let count = |st| steps.iter().filter(|s| s.status == st).count();
    let (passed, failed, deferred) = (
        count(StepStatus::Pass),
        count(StepStatus::Fail),
        count(StepStatus::Deferred),
    );
    Ok(RunReport {
        script: script.id.clone(),
        title: script.title.clone(),
        genus: script.genus.g(),
        layout: script.layout.to_string(),
        profile: script.profile.to_string(),
        bound: script.bound.clone(),
        level: ctx.level,
        semantics: SEMANTICS,
        variants: script
            .variants
            .iter()
            .map(|(line, cond)| format!("line {line}: {cond}"))
            .collect(),
        steps,
        passed,
        failed,
        deferred,
        verdict: if failed == 0 { Verdict::Pass } else { Verdict::Fail },
        millis: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn find_word(pairs: &[(CurveId, CurveId)], cat: &CurveCatalog) -> Result<Result<Word, String>, WordError> {
    let classes = pairs
        .iter()
        .map(|(a, b)| Ok((class(cat, a)?, class(cat, b)?)))
        .collect::<Result<Vec<_>, WordError>>()?;
    let gens = cat
        .entries()
        .into_iter()
        .map(|c| Ok((c, class(cat, &c)?)))
        .collect::<Result<Vec<_>, WordError>>()?;
    Ok(find_conjugator(&classes, &gens).map_err(|e| e.to_string()))
}

/// Matrices of both sides of the script's last generation step, after
/// replaying the definitions and conjugator searches before it.
pub fn generation_inputs(script: &Script, ctx: &RunContext) -> Result<(Vec<BitMat>, Vec<BitMat>), ScriptError> {
    let last = script
        .steps
        .iter()
        .rposition(|s| matches!(s.step, Step::AssertGeneration { .. }))
        .ok_or_else(|| ScriptError::Step {
            line: 0,
            msg: format!("{} has no generation step", script.id),
        })?;
    let mut ev = Evaluator::new(Environment::new(script.genus), &ctx.catalog, &ctx.spec)
        .map_err(|source| ScriptError::Word { line: 0, source })?;
    for s in &script.steps[..=last] {
        let werr = |source| ScriptError::Word { line: s.line, source };
        match &s.step {
            Step::Define { label, word } => ev.define(label, word.clone()).map_err(werr)?,
            Step::FindConjugator { label, pairs } => {
                let w = find_word(pairs, &ctx.catalog)
                    .map_err(werr)?
                    .map_err(|msg| ScriptError::Step { line: s.line, msg })?;
                ev.define(label, w).map_err(werr)?;
            }
            Step::AssertGeneration { gens, reference } => {
                let all = |ws: &[Word]| ws.iter().map(|w| ev.evaluate_mod2(w)).collect::<Result<Vec<_>, _>>();
                return Ok((all(gens).map_err(werr)?, all(reference).map_err(werr)?));
            }
            _ => {}
        }
    }
    unreachable!("the last generation step returns")
}

fn run_step(step: &Step, ev: &mut Evaluator<'_>, ctx: &RunContext) -> Result<Outcome, WordError> {
    let cat = &ctx.catalog;
    Ok(match step {
        Step::Define { label, word } => {
            ev.define(label, word.clone())?;
            let m = ev.evaluate_mod2(&Word::atom(crate::words::Atom::named(label)))?;
            Outcome::pass(vec![hash(&m)])
        }
        Step::FindConjugator { label, pairs } => {
            let word = match find_word(pairs, cat)? {
                Ok(w) => w,
                Err(e) => return Ok(Outcome::fail(e, Vec::new())),
            };
            let classes = pairs
                .iter()
                .map(|(a, b)| Ok((class(cat, a)?, class(cat, b)?)))
                .collect::<Result<Vec<_>, WordError>>()?;
            let len = word.len();
            ev.define(label, word)?;
            let m = ev.evaluate_mod2(&Word::atom(crate::words::Atom::named(label)))?;
            for ((a, b), (u, v)) in pairs.iter().zip(&classes) {
                if m.apply(u)? != *v {
                    return Ok(Outcome::fail(format!("${label} does not send {a} to {b}"), vec![hash(&m)]));
                }
            }
            Outcome {
                status: StepStatus::Pass,
                detail: Some(format!("${label} is a word of {len} twists")),
                witness: vec![hash(&m)],
            }
        }
        Step::AssertRepEqual { lhs, rhs } => {
            let (l, r) = (ev.evaluate_mod2(lhs)?, ev.evaluate_mod2(rhs)?);
            let witness = vec![hash(&l), hash(&r)];
            if l != r {
                return Ok(Outcome::fail("mod-2 matrices differ", witness));
            }
            if ctx.level == Level::Signed {
                let (ls, rs) = (ev.evaluate_signed(lhs)?, ev.evaluate_signed(rhs)?);
                if ls != rs {
                    return Ok(Outcome::fail("signed matrices differ", witness));
                }
            }
            Outcome::pass(witness)
        }
        Step::AssertClassImage { word, pairs } => {
            let m = ev.evaluate_mod2(word)?;
            let mut bad = Vec::new();
            for (a, b) in pairs {
                let got = m.apply(&class(cat, a)?)?;
                let want = class(cat, b)?;
                if got != want {
                    bad.push(format!("{a} goes to {got}, not {b} = {want}"));
                }
            }
            let witness = vec![hash(&m)];
            if bad.is_empty() {
                Outcome::pass(witness)
            } else {
                Outcome::fail(bad.join("; "), witness)
            }
        }
        Step::AssertDet { word, value } => {
            let p = ev.evaluate_signed(word)?;
            let d = d_hom(&p)?;
            let witness = vec![hash(&p.to_mod2())];
            if d == *value {
                Outcome::pass(witness)
            } else {
                Outcome::fail(format!("D = {d}, expected {value}"), witness)
            }
        }
        Step::AssertGeneration { gens, reference } => {
            let g = cat.genus().g();
            let eval_all = |ws: &[Word]| ws.iter().map(|w| ev.evaluate_mod2(w)).collect::<Result<Vec<_>, _>>();
            let (a, b) = (eval_all(gens)?, eval_all(reference)?);
            let mut h = Sha256::new();
            for m in &a {
                h.update(m.to_bytes());
            }
            let witness = vec![hex(&h.finalize())];
            if !ctx.config.allows(g) {
                return Ok(Outcome {
                    status: StepStatus::Deferred,
                    detail: Some(format!(
                        "g={g} is above the chain cap {}; rerun with --force or TWISTGEN_CAP",
                        ctx.config.cap()
                    )),
                    witness,
                });
            }
            let run = || -> Result<_, crate::f2group::GroupError> {
                let (sa, sb) = (GenSet::new(g, a)?, GenSet::new(g, b)?);
                compare_groups(&sa, &sb, &ctx.config, false)
            };
            match run() {
                Ok(c) if c.same => Outcome {
                    status: StepStatus::Pass,
                    detail: Some(format!("same group, order {}", c.order_b)),
                    witness,
                },
                Ok(c) => Outcome::fail(
                    format!(
                        "different groups: gens in reference {}, reference in gens {}",
                        c.a_in_b, c.b_in_a
                    ),
                    witness,
                ),
                Err(e) => Outcome::fail(e.to_string(), witness),
            }
        }
    })
}
