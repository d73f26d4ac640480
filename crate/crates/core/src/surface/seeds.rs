use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GenusModel, Layout, SurfaceError};
use crate::expr;
use crate::f2linalg::BitVec;

const DEFAULT_SEEDS: &str = include_str!("../../data/seeds.txt");

/// Which picture the seed classes of `a2` and `f1` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeedProfile {
    /// The rotation pictures (any genus; also the reflection layout at
    /// `g = 4k, 4k+1`, where the two agree).
    #[serde(rename = "rot")]
    Rot,
    /// Reflection layout, `g = 4k+2`.
    #[serde(rename = "r4k2")]
    R4k2,
    /// Reflection layout, `g = 4k+3`, three-generator picture.
    #[serde(rename = "r4k3")]
    R4k3,
    /// Reflection layout, `g = 4k+3`, four-generator picture.
    #[serde(rename = "r4k3-7")]
    R4k3Small,
}

impl SeedProfile {
    pub const ALL: [SeedProfile; 4] = [
        SeedProfile::Rot,
        SeedProfile::R4k2,
        SeedProfile::R4k3,
        SeedProfile::R4k3Small,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            SeedProfile::Rot => "rot",
            SeedProfile::R4k2 => "r4k2",
            SeedProfile::R4k3 => "r4k3",
            SeedProfile::R4k3Small => "r4k3-7",
        }
    }

    /// Whether the profile describes this genus and layout.
    pub fn applies(&self, genus: GenusModel, layout: Layout) -> bool {
        let c = genus.class_mod4();
        match self {
            SeedProfile::Rot => layout == Layout::Rotation || c <= 1,
            SeedProfile::R4k2 => layout == Layout::Reflection && c == 2,
            SeedProfile::R4k3 | SeedProfile::R4k3Small => layout == Layout::Reflection && c == 3,
        }
    }

    /// Default profile for a genus and layout.
    pub fn default_for(genus: GenusModel, layout: Layout) -> SeedProfile {
        match (layout, genus.class_mod4()) {
            (Layout::Reflection, 2) => SeedProfile::R4k2,
            (Layout::Reflection, 3) => SeedProfile::R4k3,
            _ => SeedProfile::Rot,
        }
    }

    /// Every profile that applies at this genus, with its layout.
    pub fn all_for(genus: GenusModel) -> Vec<(SeedProfile, Layout)> {
        let mut out = vec![(SeedProfile::Rot, Layout::Rotation)];
        for p in [SeedProfile::R4k2, SeedProfile::R4k3, SeedProfile::R4k3Small] {
            if p.applies(genus, Layout::Reflection) {
                out.push((p, Layout::Reflection));
            }
        }
        out
    }
}

impl fmt::Display for SeedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SeedProfile {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SeedProfile::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| SurfaceError::Parse(format!("unknown seed profile `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Single(String),
    Run(String, String),
}

/// A genus-independent description of a class: `x1..x4 + x{g}`.
///
/// A run `xa..xb` with both ends inside the rotated block is read cyclically
/// in that block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedTemplate {
    text: String,
    terms: Vec<Term>,
}

fn strip_x(s: &str) -> Result<String, SurfaceError> {
    let body = s
        .trim()
        .strip_prefix('x')
        .ok_or_else(|| SurfaceError::Parse(format!("bad seed term `{s}`")))?;
    let body = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .unwrap_or(body);
    if body.is_empty() {
        return Err(SurfaceError::Parse(format!("bad seed term `{s}`")));
    }
    Ok(body.to_string())
}

impl SeedTemplate {
    pub fn parse(text: &str) -> Result<Self, SurfaceError> {
        let mut terms = Vec::new();
        for part in text.split('+') {
            let part = part.trim();
            if let Some((a, b)) = part.split_once("..") {
                terms.push(Term::Run(strip_x(a)?, strip_x(b)?));
            } else {
                terms.push(Term::Single(strip_x(part)?));
            }
        }
        Ok(Self {
            text: text.trim().to_string(),
            terms,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn instantiate(&self, genus: GenusModel, layout: Layout) -> Result<BitVec, SurfaceError> {
        let n = layout.cycle_len(genus);
        let vars = genus.vars().with("n", n as i64);
        let idx = |e: &str| -> Result<usize, SurfaceError> {
            let v = expr::eval(e, &vars)?;
            if v < 1 || v as usize > genus.g() {
                return Err(SurfaceError::Parse(format!(
                    "seed index {v} out of range at {genus}"
                )));
            }
            Ok(v as usize)
        };
        let mut indices = Vec::new();
        for t in &self.terms {
            match t {
                Term::Single(e) => indices.push(idx(e)?),
                Term::Run(a, b) => {
                    let (a, b) = (idx(a)?, idx(b)?);
                    if a <= n && b <= n {
                        let mut i = a;
                        loop {
                            indices.push(i);
                            if i == b {
                                break;
                            }
                            i = i % n + 1;
                        }
                    } else if a <= b {
                        indices.extend(a..=b);
                    } else {
                        return Err(SurfaceError::Parse(format!(
                            "run x{a}..x{b} leaves the rotated block"
                        )));
                    }
                }
            }
        }
        Ok(BitVec::from_indices(genus.g(), &indices)?)
    }
}

impl fmt::Display for SeedTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// One profile's templates from a seed file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    pub profile: SeedProfile,
    pub layout: Layout,
    pub a2: SeedTemplate,
    pub f1: SeedTemplate,
    pub note: String,
}

/// Seed classes instantiated at one genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds {
    pub profile: SeedProfile,
    pub a2: BitVec,
    pub f1: BitVec,
    pub note: String,
}

impl SeedSet {
    pub fn instantiate(&self, genus: GenusModel, layout: Layout) -> Result<Seeds, SurfaceError> {
        let a2 = self.a2.instantiate(genus, layout)?;
        let f1 = self.f1.instantiate(genus, layout)?;
        for (name, v) in [("a2", a2), ("f1", f1)] {
            if !v.is_two_sided() {
                return Err(SurfaceError::OneSided(format!("{name} = {v}")));
            }
        }
        Ok(Seeds {
            profile: self.profile,
            a2,
            f1,
            note: self.note.clone(),
        })
    }
}

/// Parses a seed file: blocks of `profile`, `layout`, `a2 =`, `f1 =`,
/// `note =` lines; `#` starts a comment.
pub fn parse_seed_file(text: &str) -> Result<Vec<SeedSet>, SurfaceError> {
    let mut out = Vec::new();
    let mut cur: Option<(SeedProfile, Option<Layout>, Option<SeedTemplate>, Option<SeedTemplate>, String)> =
        None;
    let finish = |c: Option<(SeedProfile, Option<Layout>, Option<SeedTemplate>, Option<SeedTemplate>, String)>,
                  out: &mut Vec<SeedSet>|
     -> Result<(), SurfaceError> {
        if let Some((profile, layout, a2, f1, note)) = c {
            let missing = |what: &str| SurfaceError::Parse(format!("profile {profile}: missing {what}"));
            out.push(SeedSet {
                profile,
                layout: layout.ok_or_else(|| missing("layout"))?,
                a2: a2.ok_or_else(|| missing("a2"))?,
                f1: f1.ok_or_else(|| missing("f1"))?,
                note,
            });
        }
        Ok(())
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| SurfaceError::Parse(format!("seed file line {}: {m}", lineno + 1));
        if let Some(p) = line.strip_prefix("profile ") {
            finish(cur.take(), &mut out)?;
            cur = Some((p.trim().parse()?, None, None, None, String::new()));
            continue;
        }
        let Some(c) = cur.as_mut() else {
            return Err(err("record before any `profile` line".into()));
        };
        if let Some(l) = line.strip_prefix("layout ") {
            c.1 = Some(l.trim().parse()?);
        } else if let Some((key, val)) = line.split_once('=') {
            match key.trim() {
                "a2" => c.2 = Some(SeedTemplate::parse(val)?),
                "f1" => c.3 = Some(SeedTemplate::parse(val)?),
                "note" => c.4 = val.trim().to_string(),
                k => return Err(err(format!("unknown key `{k}`"))),
            }
        } else {
            return Err(err(format!("cannot read `{line}`")));
        }
    }
    finish(cur, &mut out)?;
    Ok(out)
}

/// The shipped seed sets.
pub fn default_seed_sets() -> Vec<SeedSet> {
    parse_seed_file(DEFAULT_SEEDS).expect("shipped seed file parses")
}

/// Looks up a profile in a list of seed sets and instantiates it.
pub fn seeds_for(
    sets: &[SeedSet],
    profile: SeedProfile,
    genus: GenusModel,
    layout: Layout,
) -> Result<Seeds, SurfaceError> {
    let set = sets
        .iter()
        .find(|s| s.profile == profile)
        .ok_or_else(|| SurfaceError::Parse(format!("no seeds for profile {profile}")))?;
    set.instantiate(genus, layout)
}
