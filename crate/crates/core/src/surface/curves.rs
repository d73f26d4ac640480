use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SurfaceError;

/// Curve families, in catalog sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    Gamma,
    U,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::Gamma,
        Family::U,
    ];

    /// Lowercase prefix used in catalogs and class-image pairs.
    pub fn lower(&self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::E => "e",
            Family::F => "f",
            Family::Gamma => "gm",
            Family::U => "u",
        }
    }

    /// Uppercase prefix used for the twist in words.
    pub fn upper(&self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
            Family::F => "F",
            Family::Gamma => "G",
            Family::U => "U",
        }
    }
}

/// A named curve such as `b3` or `gm10`. `E` carries index 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveId {
    pub family: Family,
    pub index: usize,
}

impl CurveId {
    pub fn new(family: Family, index: usize) -> Result<Self, SurfaceError> {
        if index == 0 {
            return Err(SurfaceError::Curve {
                name: format!("{}0", family.lower()),
                reason: "index 0".into(),
            });
        }
        if family == Family::A && index > 2 {
            return Err(SurfaceError::Curve {
                name: format!("a{index}"),
                reason: "only a1 and a2 exist".into(),
            });
        }
        if family == Family::E && index != 1 {
            return Err(SurfaceError::Curve {
                name: format!("e{index}"),
                reason: "e takes no index".into(),
            });
        }
        Ok(Self { family, index })
    }

    pub fn a(i: usize) -> Self {
        Self::new(Family::A, i).expect("a1 or a2")
    }
    pub fn b(i: usize) -> Self {
        Self::new(Family::B, i).expect("positive index")
    }
    pub fn c(i: usize) -> Self {
        Self::new(Family::C, i).expect("positive index")
    }
    pub fn d(i: usize) -> Self {
        Self::new(Family::D, i).expect("positive index")
    }
    pub fn e() -> Self {
        Self {
            family: Family::E,
            index: 1,
        }
    }
    pub fn f(i: usize) -> Self {
        Self::new(Family::F, i).expect("positive index")
    }
    pub fn gamma(i: usize) -> Self {
        Self::new(Family::Gamma, i).expect("positive index")
    }
    pub fn u(i: usize) -> Self {
        Self::new(Family::U, i).expect("positive index")
    }

    /// Uppercase spelling for words: `A1`, `G10`, `E`.
    pub fn word_name(&self) -> String {
        if self.family == Family::E {
            "E".into()
        } else {
            format!("{}{}", self.family.upper(), self.index)
        }
    }

    /// Parses the uppercase word spelling (`A1`, `B3`, `G10`, `E`).
    pub fn parse_upper(s: &str) -> Result<Self, SurfaceError> {
        parse_with(s, Family::upper)
    }

    /// Parses the lowercase catalog spelling (`a1`, `b3`, `gm10`, `e`).
    pub fn parse_lower(s: &str) -> Result<Self, SurfaceError> {
        parse_with(s, Family::lower)
    }
}

fn parse_with(s: &str, prefix: fn(&Family) -> &'static str) -> Result<CurveId, SurfaceError> {
    let bad = |reason: &str| SurfaceError::Curve {
        name: s.to_string(),
        reason: reason.to_string(),
    };
    // longest prefix first so that `gm` wins over a hypothetical `g`
    let mut fams = Family::ALL;
    fams.sort_by_key(|f| std::cmp::Reverse(prefix(f).len()));
    for fam in fams {
        let p = prefix(&fam);
        if let Some(rest) = s.strip_prefix(p) {
            if fam == Family::E {
                if rest.is_empty() {
                    return Ok(CurveId::e());
                }
                continue;
            }
            if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                continue;
            }
            let index: usize = rest.parse().map_err(|_| bad("index too large"))?;
            return CurveId::new(fam, index);
        }
    }
    Err(bad("unknown curve family"))
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family == Family::E {
            f.write_str("e")
        } else {
            write!(f, "{}{}", self.family.lower(), self.index)
        }
    }
}

impl FromStr for CurveId {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CurveId::parse_lower(s)
    }
}
