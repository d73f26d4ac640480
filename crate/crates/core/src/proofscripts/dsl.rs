use std::collections::HashSet;

use super::{omori_words, Script, ScriptError, ScriptStep, Step};
use crate::expr;
use crate::surface::{CurveId, GenusModel, Layout, SeedProfile};
use crate::words::{parse_word, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Line {
    no: usize,
    guard: Option<String>,
    body: String,
}

/// A parsed script, not yet bound to a genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSource {
    pub id: String,
    pub title: String,
    pub requires: String,
    pub bound: String,
    pub layout: Layout,
    pub profile: Option<SeedProfile>,
    lines: Vec<Line>,
}

const STEP_WORDS: [&str; 6] = ["def", "find", "assert_eq", "assert_img", "assert_gen", "assert_det"];

fn syntax(line: usize, msg: impl Into<String>) -> ScriptError {
    ScriptError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses script text. Step bodies are only parsed by
/// [`ScriptSource::instantiate`], once their templates can be expanded.
pub fn parse_script(text: &str) -> Result<ScriptSource, ScriptError> {
    let mut id = None;
    let mut title = String::new();
    let mut requires = None;
    let mut bound = None;
    let mut layout = None;
    let mut profile = None;
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "script" => id = Some(rest.to_string()),
            "title" => title = rest.to_string(),
            "requires" => requires = Some(rest.to_string()),
            "bound" => bound = Some(rest.to_string()),
            "layout" => {
                layout = Some(
                    rest.parse::<Layout>()
                        .map_err(|e| syntax(no, e.to_string()))?,
                )
            }
            "profile" => {
                profile = Some(
                    rest.parse::<SeedProfile>()
                        .map_err(|e| syntax(no, e.to_string()))?,
                )
            }
            "when" => {
                let (cond, body) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(no, "`when` needs `:`"))?;
                check_step_word(no, body.trim())?;
                lines.push(Line {
                    no,
                    guard: Some(cond.trim().to_string()),
                    body: body.trim().to_string(),
                });
            }
            _ => {
                check_step_word(no, line)?;
                lines.push(Line {
                    no,
                    guard: None,
                    body: line.to_string(),
                });
            }
        }
    }
    let missing = |what: &str| syntax(0, format!("missing `{what}` line"));
    Ok(ScriptSource {
        id: id.ok_or_else(|| missing("script"))?,
        title,
        requires: requires.ok_or_else(|| missing("requires"))?,
        bound: bound.ok_or_else(|| missing("bound"))?,
        layout: layout.ok_or_else(|| missing("layout"))?,
        profile,
        lines,
    })
}

fn check_step_word(no: usize, body: &str) -> Result<(), ScriptError> {
    let head = body.split_whitespace().next().unwrap_or("");
    if STEP_WORDS.contains(&head) {
        Ok(())
    } else {
        Err(syntax(no, format!("unknown step `{head}`")))
    }
}

impl ScriptSource {
    /// Whether the script's genus condition holds at `g`.
    pub fn applies(&self, g: usize) -> Result<bool, ScriptError> {
        let Ok(genus) = GenusModel::new(g) else {
            return Ok(false);
        };
        expr::holds(&self.requires, &genus.vars()).map_err(|source| ScriptError::Expr { line: 0, source })
    }

    /// Selects the `when` variants for `g`, expands templates and parses
    /// every step.
    pub fn instantiate(&self, g: usize) -> Result<Script, ScriptError> {
        if !self.applies(g)? {
            return Err(ScriptError::OutOfRange {
                id: self.id.clone(),
                bound: self.bound.clone(),
                g,
            });
        }
        let genus = GenusModel::new(g)?;
        let profile = self
            .profile
            .unwrap_or_else(|| SeedProfile::default_for(genus, self.layout));
        if !profile.applies(genus, self.layout) {
            return Err(syntax(
                0,
                format!("profile {profile} does not apply to the {} layout at {genus}", self.layout),
            ));
        }
        let vars = genus.vars();
        let mut steps = Vec::new();
        let mut variants = Vec::new();
        let mut bound: HashSet<String> = HashSet::new();
        for line in &self.lines {
            if let Some(cond) = &line.guard {
                let on = expr::holds(cond, &vars).map_err(|source| ScriptError::Expr {
                    line: line.no,
                    source,
                })?;
                if !on {
                    continue;
                }
                variants.push((line.no, cond.clone()));
            }
            let text = expr::expand(&line.body, &vars).map_err(|source| ScriptError::Expr {
                line: line.no,
                source,
            })?;
            let step = parse_step(line.no, &text, genus)?;
            for l in step.reads() {
                if !bound.contains(l) {
                    return Err(syntax(line.no, format!("label `${l}` is not defined above")));
                }
            }
            if let Some(l) = step.binds() {
                if !bound.insert(l.to_string()) {
                    return Err(syntax(line.no, format!("label `{l}` is defined twice")));
                }
            }
            steps.push(ScriptStep {
                line: line.no,
                text,
                step,
            });
        }
        Ok(Script {
            id: self.id.clone(),
            title: self.title.clone(),
            bound: self.bound.clone(),
            genus,
            layout: self.layout,
            profile,
            variants,
            steps,
        })
    }
}

fn word(no: usize, text: &str) -> Result<Word, ScriptError> {
    parse_word(text.trim()).map_err(|source| ScriptError::Word { line: no, source })
}

fn label(no: usize, text: &str) -> Result<String, ScriptError> {
    let t = text.trim();
    let ok = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if ok {
        Ok(t.to_string())
    } else {
        Err(syntax(no, format!("bad label `{t}`")))
    }
}

fn pairs(no: usize, text: &str) -> Result<Vec<(CurveId, CurveId)>, ScriptError> {
    let mut out = Vec::new();
    for p in text.split(',') {
        let (a, b) = p
            .split_once("->")
            .ok_or_else(|| syntax(no, format!("expected `a->b`, found `{}`", p.trim())))?;
        let a = CurveId::parse_lower(a.trim())?;
        let b = CurveId::parse_lower(b.trim())?;
        out.push((a, b));
    }
    Ok(out)
}

fn word_list(no: usize, text: &str) -> Result<Vec<Word>, ScriptError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(no, format!("expected `[w, ...]`, found `{t}`")))?;
    inner.split(',').map(|w| word(no, w)).collect()
}

fn two_sides(no: usize, text: &str) -> Result<(&str, &str), ScriptError> {
    let parts: Vec<&str> = text.split("==").collect();
    match parts.as_slice() {
        [l, r] => Ok((l, r)),
        _ => Err(syntax(no, "expected exactly one `==`")),
    }
}

fn parse_step(no: usize, text: &str, genus: GenusModel) -> Result<Step, ScriptError> {
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    Ok(match head {
        "def" => {
            let (l, w) = rest
                .split_once('=')
                .ok_or_else(|| syntax(no, "`def` needs `=`"))?;
            Step::Define {
                label: label(no, l)?,
                word: word(no, w)?,
            }
        }
        "find" => {
            let (l, p) = rest
                .split_once(':')
                .ok_or_else(|| syntax(no, "`find` needs `:`"))?;
            Step::FindConjugator {
                label: label(no, l)?,
                pairs: pairs(no, p)?,
            }
        }
        "assert_eq" => {
            let (l, r) = two_sides(no, rest)?;
            Step::AssertRepEqual {
                lhs: word(no, l)?,
                rhs: word(no, r)?,
            }
        }
        "assert_img" => {
            let (w, p) = rest
                .split_once(':')
                .ok_or_else(|| syntax(no, "`assert_img` needs `:`"))?;
            Step::AssertClassImage {
                word: word(no, w)?,
                pairs: pairs(no, p)?,
            }
        }
        "assert_gen" => {
            let (l, r) = two_sides(no, rest)?;
            let reference = if r.trim() == "omori" {
                omori_words(genus)
            } else {
                word_list(no, r)?
            };
            Step::AssertGeneration {
                gens: word_list(no, l)?,
                reference,
            }
        }
        "assert_det" => {
            let (l, r) = two_sides(no, rest)?;
            let value = r
                .trim()
                .parse()
                .map_err(|_| syntax(no, format!("expected an integer, found `{}`", r.trim())))?;
            Step::AssertDet {
                word: word(no, l)?,
                value,
            }
        }
        other => return Err(syntax(no, format!("unknown step `{other}`"))),
    })
}
