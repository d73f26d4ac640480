use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{CurveId, Family, GenusModel, Layout, SeedProfile, Seeds, SurfaceError};
use crate::f2linalg::BitVec;

/// Mod-2 classes of every named curve at one genus.
///
/// Classes are computed on demand from the chain positions, the rotation and
/// the two seed classes. Explicit overrides (from a catalog file, or a
/// deliberate corruption) take precedence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveCatalog {
    genus: GenusModel,
    layout: Layout,
    seeds: Seeds,
    overrides: BTreeMap<CurveId, BitVec>,
}

/// Builds the catalog for a genus, layout and seed classes.
pub fn build_catalog(
    genus: GenusModel,
    layout: Layout,
    seeds: Seeds,
) -> Result<CurveCatalog, SurfaceError> {
    for (name, v) in [("a2", &seeds.a2), ("f1", &seeds.f1)] {
        if v.dim() != genus.g() {
            return Err(SurfaceError::Parse(format!(
                "seed {name} has dimension {} at {genus}",
                v.dim()
            )));
        }
        if !v.is_two_sided() {
            return Err(SurfaceError::OneSided(format!("{name} = {v}")));
        }
    }
    Ok(CurveCatalog {
        genus,
        layout,
        seeds,
        overrides: BTreeMap::new(),
    })
}

impl CurveCatalog {
    pub fn genus(&self) -> GenusModel {
        self.genus
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn profile(&self) -> SeedProfile {
        self.seeds.profile
    }

    pub fn seeds(&self) -> &Seeds {
        &self.seeds
    }

    pub fn cycle_len(&self) -> usize {
        self.layout.cycle_len(self.genus)
    }

    /// Largest chain position: `g` when the whole surface rotates, else `g - 1`.
    pub fn max_position(&self) -> usize {
        let g = self.genus.g();
        if self.cycle_len() == g {
            g
        } else {
            g - 1
        }
    }

    /// `T^p` applied to packed bits.
    pub fn rotate_bits(&self, bits: u64, p: i64) -> u64 {
        let n = self.cycle_len();
        let block = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let shift = p.rem_euclid(n as i64) as usize;
        let inner = bits & block;
        let rotated = if shift == 0 {
            inner
        } else {
            ((inner << shift) | (inner >> (n - shift))) & block
        };
        rotated | (bits & !block)
    }

    pub fn rotate(&self, v: &BitVec, p: i64) -> BitVec {
        BitVec::from_bits(self.genus.g(), self.rotate_bits(v.bits(), p)).expect("same dimension")
    }

    fn position(&self, p: usize) -> BitVec {
        let g = self.genus.g();
        let idx = if p < g { [p, p + 1] } else { [g, 1] };
        BitVec::from_indices(g, &idx).expect("position in range")
    }

    fn reduce(&self, i: usize) -> usize {
        (i - 1) % self.cycle_len() + 1
    }

    fn has_u(&self) -> bool {
        self.layout == Layout::Reflection && self.genus.class_mod4() == 3
    }

    /// Reduces cyclic indices and rejects indices outside the family's range.
    pub fn canonical(&self, id: &CurveId) -> Result<CurveId, SurfaceError> {
        let g = self.genus.g();
        let n = self.cycle_len();
        let out_of_range = |why: String| SurfaceError::Curve {
            name: id.to_string(),
            reason: why,
        };
        let index = match id.family {
            Family::A | Family::E => id.index,
            Family::B => {
                if 2 * id.index > self.max_position() {
                    return Err(out_of_range(format!("b runs to b{} at g={g}", self.max_position() / 2)));
                }
                id.index
            }
            Family::C => {
                if 2 * id.index + 1 > self.max_position() {
                    return Err(out_of_range(format!(
                        "c runs to c{} at g={g}",
                        (self.max_position() - 1) / 2
                    )));
                }
                id.index
            }
            Family::D => {
                if id.index < g {
                    id.index
                } else if n < g {
                    self.reduce(id.index)
                } else {
                    return Err(out_of_range(format!("d runs to d{} at g={g}", g - 1)));
                }
            }
            Family::F | Family::Gamma => self.reduce(id.index),
            Family::U => {
                if !self.has_u() {
                    return Err(out_of_range(
                        "u curves exist only in the reflection layout with g = 4k+3".into(),
                    ));
                }
                self.reduce(id.index)
            }
        };
        Ok(CurveId {
            family: id.family,
            index,
        })
    }

    fn computed(&self, id: &CurveId) -> BitVec {
        let g = self.genus.g();
        match id.family {
            Family::A if id.index == 1 => self.position(1),
            Family::A => self.seeds.a2,
            Family::B => self.position(2 * id.index),
            Family::C => self.position(2 * id.index + 1),
            Family::D => BitVec::from_indices(g, &[id.index, g]).expect("d in range"),
            Family::E => {
                let a1 = self.class(&CurveId::a(1)).expect("a1 exists");
                let f1 = self.class(&CurveId::f(1)).expect("f1 exists");
                if a1.dot(&f1).expect("same dimension") {
                    a1.add(&f1).expect("same dimension")
                } else {
                    f1
                }
            }
            Family::F => self.rotate(&self.seeds.f1, id.index as i64 - 1),
            Family::Gamma => self.rotate(&self.seeds.a2, id.index as i64 - 1),
            Family::U => {
                BitVec::from_indices(g, &[id.index, g - 1]).expect("u in range")
            }
        }
    }

    /// The mod-2 class of a curve.
    pub fn class(&self, id: &CurveId) -> Result<BitVec, SurfaceError> {
        let id = self.canonical(id)?;
        Ok(match self.overrides.get(&id) {
            Some(v) => *v,
            None => self.computed(&id),
        })
    }

    /// Replaces the class of one curve.
    pub fn set_class(&mut self, id: &CurveId, v: BitVec) -> Result<(), SurfaceError> {
        let id = self.canonical(id)?;
        if v.dim() != self.genus.g() {
            return Err(SurfaceError::Parse(format!("class {v} has the wrong dimension")));
        }
        if self.computed(&id) == v {
            self.overrides.remove(&id);
        } else {
            self.overrides.insert(id, v);
        }
        Ok(())
    }

    pub fn overrides(&self) -> &BTreeMap<CurveId, BitVec> {
        &self.overrides
    }

    /// Every curve in its canonical index range, in catalog order.
    pub fn entries(&self) -> Vec<CurveId> {
        let g = self.genus.g();
        let n = self.cycle_len();
        let mp = self.max_position();
        let mut out = vec![CurveId::a(1), CurveId::a(2)];
        out.extend((1..=mp / 2).map(CurveId::b));
        out.extend((1..=(mp - 1) / 2).map(CurveId::c));
        out.extend((1..g).map(CurveId::d));
        out.push(CurveId::e());
        out.extend((1..=n).map(CurveId::f));
        out.extend((1..=n).map(CurveId::gamma));
        if self.has_u() {
            out.extend((1..=n).map(CurveId::u));
        }
        out
    }

    /// Canonical catalog text: header, then `name = x..` records in order.
    pub fn to_file_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# mod-2 curve classes\n");
        let _ = writeln!(s, "genus {}", self.genus.g());
        let _ = writeln!(s, "layout {}", self.layout);
        let _ = writeln!(s, "profile {}", self.profile());
        for id in self.entries() {
            let _ = writeln!(s, "{id} = {}", self.class(&id).expect("entry is canonical"));
        }
        s
    }

    /// Reads catalog text. The records `a2` and `f1` become the seeds; every
    /// other record that differs from the computed class is kept as an override.
    pub fn from_file_text(text: &str) -> Result<CurveCatalog, SurfaceError> {
        let mut genus = None;
        let mut layout = Layout::Rotation;
        let mut profile = None;
        let mut records: Vec<(usize, CurveId, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| SurfaceError::Parse(format!("catalog line {}: {m}", lineno + 1));
            if let Some(v) = line.strip_prefix("genus ") {
                let g: usize = v.trim().parse().map_err(|_| err(format!("bad genus `{v}`")))?;
                genus = Some(GenusModel::new(g)?);
            } else if let Some(v) = line.strip_prefix("layout ") {
                layout = v.trim().parse()?;
            } else if let Some(v) = line.strip_prefix("profile ") {
                profile = Some(v.trim().parse::<SeedProfile>()?);
            } else if let Some((name, class)) = line.split_once('=') {
                let id = CurveId::parse_lower(name.trim())?;
                if records.iter().any(|(_, r, _)| *r == id) {
                    return Err(err(format!("duplicate record for {id}")));
                }
                records.push((lineno + 1, id, class.trim().to_string()));
            } else {
                return Err(err(format!("cannot read `{line}`")));
            }
        }
        let genus = genus.ok_or_else(|| SurfaceError::Parse("catalog has no genus line".into()))?;
        let profile = profile.unwrap_or_else(|| SeedProfile::default_for(genus, layout));
        let find = |id: CurveId| -> Result<BitVec, SurfaceError> {
            let (_, _, c) = records
                .iter()
                .find(|(_, r, _)| *r == id)
                .ok_or_else(|| SurfaceError::Parse(format!("catalog has no record for {id}")))?;
            Ok(BitVec::parse(genus.g(), c)?)
        };
        let seeds = Seeds {
            profile,
            a2: find(CurveId::a(2))?,
            f1: find(CurveId::f(1))?,
            note: "read from catalog file".into(),
        };
        let mut cat = build_catalog(genus, layout, seeds)?;
        for (lineno, id, class) in &records {
            let v = BitVec::parse(genus.g(), class)
                .map_err(|e| SurfaceError::Parse(format!("catalog line {lineno}: {e}")))?;
            cat.set_class(id, v)?;
        }
        Ok(cat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{default_seed_sets, seeds_for};

    fn cat(g: usize, layout: Layout, profile: SeedProfile) -> CurveCatalog {
        let genus = GenusModel::new(g).unwrap();
        let seeds = seeds_for(&default_seed_sets(), profile, genus, layout).unwrap();
        build_catalog(genus, layout, seeds).unwrap()
    }

    fn idx(c: &CurveCatalog, s: &str) -> Vec<usize> {
        c.class(&CurveId::parse_lower(s).unwrap()).unwrap().indices()
    }

    #[test]
    fn chain_positions() {
        let c = cat(29, Layout::Rotation, SeedProfile::Rot);
        assert_eq!(idx(&c, "a1"), vec![1, 2]);
        assert_eq!(idx(&c, "b1"), vec![2, 3]);
        assert_eq!(idx(&c, "c1"), vec![3, 4]);
        assert_eq!(idx(&c, "b14"), vec![28, 29]);
        assert_eq!(idx(&c, "c14"), vec![1, 29]);
        assert!(c.class(&CurveId::b(15)).is_err());
    }

    #[test]
    fn odd_rotation_anchors() {
        // T^2 b_r = a1 and T a1 = b1
        for g in [9, 27, 29, 31] {
            let c = cat(g, Layout::Rotation, SeedProfile::Rot);
            let r = (g - 1) / 2;
            let br = c.class(&CurveId::b(r)).unwrap();
            assert_eq!(c.rotate(&br, 2), c.class(&CurveId::a(1)).unwrap());
            assert_eq!(
                c.rotate(&c.class(&CurveId::a(1)).unwrap(), 1),
                c.class(&CurveId::b(1)).unwrap()
            );
        }
    }

    #[test]
    fn d_indices_reduce_in_even_genus() {
        let c = cat(44, Layout::Rotation, SeedProfile::Rot);
        let d33 = c.class(&CurveId::d(33)).unwrap();
        assert_eq!(c.rotate(&d33, -33), c.class(&CurveId::d(43)).unwrap());
        assert_eq!(c.class(&CurveId::d(44)).unwrap(), c.class(&CurveId::d(1)).unwrap());
        let c42 = cat(42, Layout::Rotation, SeedProfile::Rot);
        assert_eq!(c42.class(&CurveId::d(44)).unwrap(), c42.class(&CurveId::d(3)).unwrap());
        // the odd rotation has no reduction for d
        let c27 = cat(27, Layout::Rotation, SeedProfile::Rot);
        assert_eq!(c27.class(&CurveId::d(1)).unwrap(), c27.class(&CurveId::c(13)).unwrap());
        assert!(c27.class(&CurveId::d(27)).is_err());
    }

    #[test]
    fn u_anchor() {
        for g in [7, 11, 43, 47] {
            let c = cat(g, Layout::Reflection, SeedProfile::R4k3);
            let k = g / 4;
            assert_eq!(
                c.class(&CurveId::u(4 * k + 1)).unwrap(),
                c.class(&CurveId::c(2 * k)).unwrap()
            );
        }
        assert!(cat(29, Layout::Rotation, SeedProfile::Rot).class(&CurveId::u(1)).is_err());
    }

    #[test]
    fn cyclic_families() {
        let c = cat(29, Layout::Rotation, SeedProfile::Rot);
        assert_eq!(c.class(&CurveId::gamma(1)).unwrap(), c.class(&CurveId::a(2)).unwrap());
        assert_eq!(c.class(&CurveId::f(30)).unwrap(), c.class(&CurveId::f(1)).unwrap());
        let g10 = c.class(&CurveId::gamma(10)).unwrap();
        assert_eq!(c.rotate(&g10, -4), c.class(&CurveId::gamma(6)).unwrap());
        for id in c.entries() {
            assert!(c.class(&id).unwrap().is_two_sided(), "{id}");
        }
    }

    #[test]
    fn e_is_a1_twist_of_f1() {
        let c = cat(9, Layout::Rotation, SeedProfile::Rot);
        // f1 = x2+x3 meets a1 = x1+x2 once
        assert_eq!(idx(&c, "e"), vec![1, 3]);
    }

    #[test]
    fn file_round_trip() {
        for (g, layout, p) in [
            (29, Layout::Rotation, SeedProfile::Rot),
            (30, Layout::Reflection, SeedProfile::R4k2),
            (11, Layout::Reflection, SeedProfile::R4k3Small),
        ] {
            let c = cat(g, layout, p);
            let text = c.to_file_text();
            let back = CurveCatalog::from_file_text(&text).unwrap();
            assert_eq!(back.to_file_text(), text);
            assert!(back.overrides().is_empty());
        }
    }

    #[test]
    fn file_overrides_are_kept() {
        let c = cat(9, Layout::Rotation, SeedProfile::Rot);
        let text = c.to_file_text().replace("b3 = x6+x7", "b3 = x5+x7");
        let back = CurveCatalog::from_file_text(&text).unwrap();
        assert_eq!(back.class(&CurveId::b(3)).unwrap().indices(), vec![5, 7]);
        assert_eq!(back.overrides().len(), 1);
        assert!(CurveCatalog::from_file_text("genus 9\nb1 = x2+x3\n").is_err());
    }
}
