use std::fmt;
use std::str::FromStr;

use super::WordError;
use crate::surface::{CurveId, Family};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Twist(CurveId),
    Rot,
    Refl1,
    Refl2,
    Named(String),
}

impl AtomKind {
    pub fn is_twist(&self) -> bool {
        matches!(self, AtomKind::Twist(_))
    }
}

impl fmt::Display for AtomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomKind::Twist(c) => f.write_str(&c.word_name()),
            AtomKind::Rot => f.write_str("T"),
            AtomKind::Refl1 => f.write_str("R1"),
            AtomKind::Refl2 => f.write_str("R2"),
            AtomKind::Named(l) => write!(f, "${l}"),
        }
    }
}

/// A generator symbol raised to a nonzero power.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    pub exp: i64,
}

impl Atom {
    pub fn new(kind: AtomKind, exp: i64) -> Self {
        debug_assert!(exp != 0);
        Self { kind, exp }
    }

    pub fn twist(c: CurveId) -> Self {
        Self::new(AtomKind::Twist(c), 1)
    }

    pub fn named(label: &str) -> Self {
        Self::new(AtomKind::Named(label.to_string()), 1)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.kind.clone(), -self.exp)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}^{}", self.kind, self.exp)
        }
    }
}

/// A finite product of atoms, read as a composition of maps: the rightmost
/// atom acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub atoms: Vec<Atom>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn atom(a: Atom) -> Self {
        Self { atoms: vec![a] }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// Labels referenced by `$name` atoms, in order of first use.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in &self.atoms {
            if let AtomKind::Named(l) = &a.kind {
                if !out.contains(&l.as_str()) {
                    out.push(l);
                }
            }
        }
        out
    }

    pub fn has_twist(&self) -> bool {
        self.atoms.iter().any(|a| a.kind.is_twist())
    }

    /// `self * other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Word { atoms }
    }

    /// Merges adjacent atoms of the same kind and drops zero powers.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            match out.last_mut() {
                Some(top) if top.kind == a.kind => {
                    top.exp += a.exp;
                    if top.exp == 0 {
                        out.pop();
                    }
                }
                _ => out.push(a.clone()),
            }
        }
        Word { atoms: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            atoms: self.atoms.iter().rev().map(Atom::inverse).collect(),
        }
    }

    pub fn power(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut atoms = Vec::with_capacity(base.atoms.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            atoms.extend(base.atoms.iter().cloned());
        }
        Word { atoms }.reduce()
    }

    /// `by * self * by^-1`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.inverse()).reduce()
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse()).reduce()
    }

    pub fn parse(text: &str) -> Result<Word, WordError> {
        parse_word(text)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self))
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Parses `T^-4 * G10 * C2^-1`. Atoms are separated by `*` or whitespace.
/// An empty string (or `1`) is the empty word.
pub fn parse_word(text: &str) -> Result<Word, WordError> {
    let syntax = |pos: usize, found: &str| WordError::Syntax {
        text: text.to_string(),
        pos,
        found: found.to_string(),
    };
    let mut atoms = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let mut expect_atom = true;
    let mut saw_star = false;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '*' {
            if expect_atom {
                return Err(syntax(pos, "*"));
            }
            expect_atom = true;
            saw_star = true;
            i += 1;
            continue;
        }
        let start = i;
        if c == '$' {
            i += 1;
        }
        while i < chars.len() && is_label_char(chars[i].1) {
            i += 1;
        }
        if i == start || (c == '$' && i == start + 1) {
            return Err(syntax(pos, &c.to_string()));
        }
        let end = chars.get(i).map_or(text.len(), |&(p, _)| p);
        let name = &text[pos..end];
        let mut exp = 1i64;
        if i < chars.len() && chars[i].1 == '^' {
            let epos = chars[i].0;
            i += 1;
            let nstart = i;
            if i < chars.len() && (chars[i].1 == '-' || chars[i].1 == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let nend = chars.get(i).map_or(text.len(), |&(p, _)| p);
            let nbeg = chars.get(nstart).map_or(text.len(), |&(p, _)| p);
            exp = text[nbeg..nend]
                .parse()
                .map_err(|_| syntax(epos, &text[epos..nend]))?;
        }
        if name == "1" && exp == 1 {
            expect_atom = false;
            continue;
        }
        let kind = atom_kind(name).map_err(|e| match e {
            WordError::Syntax { .. } => syntax(pos, name),
            other => other,
        })?;
        if exp != 0 {
            atoms.push(Atom::new(kind, exp));
        }
        expect_atom = false;
    }
    if expect_atom && saw_star {
        return Err(syntax(text.len(), "end of input"));
    }
    Ok(Word { atoms })
}

fn atom_kind(name: &str) -> Result<AtomKind, WordError> {
    if let Some(label) = name.strip_prefix('$') {
        return Ok(AtomKind::Named(label.to_string()));
    }
    match name {
        "T" => return Ok(AtomKind::Rot),
        "R1" => return Ok(AtomKind::Refl1),
        "R2" => return Ok(AtomKind::Refl2),
        _ => {}
    }
    // `Gm10` is accepted as a spelling of `G10`
    if let Some(rest) = name.strip_prefix("Gm") {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            let i: usize = rest
                .parse()
                .map_err(|_| WordError::UnknownName(name.to_string()))?;
            return Ok(AtomKind::Twist(CurveId::new(Family::Gamma, i)?));
        }
    }
    Ok(AtomKind::Twist(CurveId::parse_upper(name)?))
}

/// Canonical spelling: atoms joined by ` * `, exponent omitted when 1.
pub fn format_word(w: &Word) -> String {
    if w.atoms.is_empty() {
        return "1".into();
    }
    w.atoms
        .iter()
        .map(Atom::to_string)
        .collect::<Vec<_>>()
        .join(" * ")
}
