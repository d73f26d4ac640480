use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SurfaceError;
use crate::expr::Vars;
use crate::f2linalg::MAX_DIM;

/// Smallest genus the surface model accepts.
pub const MIN_GENUS: usize = 5;

/// The genus together with its derived parameters `r` and `k`.
///
/// `g = 2r + 1` or `g = 2r + 2`, and `g` is one of `4k, 4k+1, 4k+2, 4k+3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenusModel {
    g: usize,
}

impl GenusModel {
    pub fn new(g: usize) -> Result<Self, SurfaceError> {
        if !(MIN_GENUS..=MAX_DIM).contains(&g) {
            return Err(SurfaceError::Genus(g));
        }
        Ok(Self { g })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn is_odd(&self) -> bool {
        self.g % 2 == 1
    }

    pub fn r(&self) -> usize {
        if self.is_odd() {
            (self.g - 1) / 2
        } else {
            (self.g - 2) / 2
        }
    }

    pub fn k(&self) -> usize {
        self.g / 4
    }

    /// `g mod 4`.
    pub fn class_mod4(&self) -> usize {
        self.g % 4
    }

    /// Bindings `g`, `r`, `k` for templates.
    pub fn vars(&self) -> Vars {
        Vars::new()
            .with("g", self.g as i64)
            .with("r", self.r() as i64)
            .with("k", self.k() as i64)
    }
}

impl fmt::Display for GenusModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={}", self.g)
    }
}

/// Which picture of the rotation `T` is in force.
///
/// `Rotation` is the rotation by `2pi/g` (odd g) or `2pi/(g-1)` (even g).
/// `Reflection` is `T = rho2 rho1` from the reflection models, which fix one,
/// three, or two crosscaps when `g` is `4k`, `4k+2`, `4k+3`. The two agree for
/// `g = 4k` and `g = 4k+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Rotation,
    Reflection,
}

impl Layout {
    /// Number of crosscaps cycled by `T`; the rest are fixed.
    pub fn cycle_len(&self, genus: GenusModel) -> usize {
        let g = genus.g();
        match self {
            Layout::Rotation => {
                if genus.is_odd() {
                    g
                } else {
                    g - 1
                }
            }
            Layout::Reflection => match g % 4 {
                0 => g - 1,
                1 => g,
                2 => g - 3,
                _ => g - 2,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Layout::Rotation => "rotation",
            Layout::Reflection => "reflection",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Layout {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rotation" => Ok(Layout::Rotation),
            "reflection" => Ok(Layout::Reflection),
            _ => Err(SurfaceError::Parse(format!("unknown layout `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        let g29 = GenusModel::new(29).unwrap();
        assert_eq!((g29.r(), g29.k(), g29.class_mod4()), (14, 7, 1));
        let g44 = GenusModel::new(44).unwrap();
        assert_eq!((g44.r(), g44.k()), (21, 11));
        let g30 = GenusModel::new(30).unwrap();
        assert_eq!((g30.r(), g30.k(), g30.class_mod4()), (14, 7, 2));
        assert!(GenusModel::new(4).is_err());
        assert!(GenusModel::new(65).is_err());
    }

    #[test]
    fn cycle_lengths() {
        let len = |g, l: Layout| l.cycle_len(GenusModel::new(g).unwrap());
        assert_eq!(len(9, Layout::Rotation), 9);
        assert_eq!(len(8, Layout::Rotation), 7);
        assert_eq!(len(30, Layout::Rotation), 29);
        assert_eq!(len(30, Layout::Reflection), 27);
        assert_eq!(len(43, Layout::Reflection), 41);
        for g in [8, 9, 12, 13, 44, 45] {
            assert_eq!(len(g, Layout::Rotation), len(g, Layout::Reflection));
        }
    }
}
