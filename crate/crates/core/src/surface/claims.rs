use std::collections::BTreeSet;

use serde::Serialize;

use super::{
    build_catalog, CurveCatalog, CurveId, GenusModel, Layout, MappingClassSpec, SeedProfile, Seeds,
    SurfaceError,
};
use crate::expr;
use crate::f2linalg::{BitMat, BitVec};

/// One factor of a class-level word: a power of `T`, or a twist (odd
/// exponent) about a named curve. Even twist powers act trivially mod 2 and
/// are dropped when parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimOp {
    Rot(i64),
    Twist(CurveId),
}

/// "The word maps each curve on the left to the curve on the right."
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub text: String,
    pub word: Vec<ClaimOp>,
    pub pairs: Vec<(CurveId, CurveId)>,
}

impl Claim {
    /// Parses `T^-4 : gm10->gm6, c2->a1`. The word `1` is the identity.
    pub fn parse(text: &str) -> Result<Claim, SurfaceError> {
        let (w, p) = text
            .split_once(':')
            .ok_or_else(|| SurfaceError::Parse(format!("claim without `:`: {text}")))?;
        let mut word = Vec::new();
        for tok in w.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| SurfaceError::Parse(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            if name == "T" {
                word.push(ClaimOp::Rot(exp));
            } else if exp % 2 != 0 {
                word.push(ClaimOp::Twist(CurveId::parse_lower(name)?));
            }
        }
        let mut pairs = Vec::new();
        for pair in p.split(',') {
            let (a, b) = pair
                .split_once("->")
                .ok_or_else(|| SurfaceError::Parse(format!("bad pair `{pair}`")))?;
            pairs.push((CurveId::parse_lower(a.trim())?, CurveId::parse_lower(b.trim())?));
        }
        Ok(Claim {
            text: text.trim().to_string(),
            word,
            pairs,
        })
    }

    /// Applies the word (rightmost factor first) to a class.
    pub fn apply(&self, cat: &CurveCatalog, v: &BitVec) -> Result<BitVec, SurfaceError> {
        let mut x = *v;
        for op in self.word.iter().rev() {
            x = match op {
                ClaimOp::Rot(e) => cat.rotate(&x, *e),
                ClaimOp::Twist(c) => {
                    let a = cat.class(c)?;
                    if x.dot(&a)? {
                        x.add(&a)?
                    } else {
                        x
                    }
                }
            };
        }
        Ok(x)
    }

    /// `Ok(None)` when every pair maps correctly, else a description of the
    /// first mismatch.
    pub fn check(&self, cat: &CurveCatalog) -> Result<Option<String>, SurfaceError> {
        for (a, b) in &self.pairs {
            let got = self.apply(cat, &cat.class(a)?)?;
            let want = cat.class(b)?;
            if got != want {
                return Ok(Some(format!("{a} -> {got}, expected {b} = {want}")));
            }
        }
        Ok(None)
    }
}

// (condition, claim) rows; `{...}` expands over g, k, r.
const ROT_ODD: &[(&str, &str)] = &[
    ("g >= 27", "T^-4 : gm10->gm6, c2->a1, f18->f14, c12->c10"),
    ("g >= 27", "gm6 a1 f14 c10 gm10 c2 f18 c12 : gm6->c2, a1->a1, f14->f14, c10->c10"),
    ("g >= 27", "T^-1 : c4->b4, c2->b2, f18->f17, c12->b12"),
    ("g >= 27", "c4 c2 f18 c12 b4 b2 f17 b12 : c2->b2, a1->a1, f14->f14, c10->c10"),
    ("g >= 27", "T^-2 : c4->c3, c2->c1, f18->f16, c12->c11"),
    ("g >= 27", "T^4 : c3->c5, c1->c3, f16->f20, c11->c13"),
    ("g >= 27", "c3 c1 f16 c11 b4 b2 f17 b12 : c5->c5, c3->b4, f20->f20, c13->c13"),
    ("g >= 27", "T^-4 : b3->b1, b4->b2, c5->c3, f20->f16, c13->c11"),
    ("g >= 27", "T^-3 : c3->b2, c2->b1, f16->f13, c11->b10"),
    ("g >= 27", "T^5 : f13->f18, b10->c12"),
    ("g >= 27", "T^-2 : gm10->gm8, c2->c1, c4->c3"),
    ("g >= 27", "T^-7 : gm8->gm1, b4->a1"),
    ("g >= 27", "T^-17 : f18->f1"),
    ("g == 27", "1 : c13->d1"),
    ("g >= 9", "T^-3 : f1->f{g-2}, b2->a1"),
    ("g >= 9", "a1 f{g-2} f1 b2 : f{g-2}->f{g-2}, a1->f1"),
    ("g >= 9", "T^-2 : b2->b1, a2->gm{g-1}"),
    ("g >= 9", "a1 b2 b1 gm{g-1} : a1->b1, b2->b2"),
    ("g >= 5", "1 : gm1->a2"),
];

const ROT_EVEN: &[(&str, &str)] = &[
    ("g >= 42", "T^11 : gm10->gm21, c2->b8, f18->f29, d33->d44"),
    ("g >= 42", "gm21 b8 f29 d44 gm10 c2 f18 d33 : gm21->gm21, b8->b8, f29->f29, d44->d33"),
    ("g >= 42", "T : gm21->gm22, b8->c8, f29->f30, d33->d34"),
    ("g >= 42", "gm22 c8 f30 d34 gm10 c2 f18 d33 : gm22->gm22, c8->c8, f30->f30, d34->d33"),
    ("g >= 42", "T^-4 : gm10->gm6, c2->a1, f18->f14, d33->d29"),
    ("g >= 42", "gm6 a1 f14 d33 gm10 c2 f18 d33 : gm6->c2, a1->a1, f14->f14, d33->d33"),
    ("g >= 42", "T^-1 : c4->b4, c2->b2, f18->f17, d33->d32"),
    ("g >= 42", "c4 c2 f18 d33 b4 b2 f17 d33 : c2->b2, a1->a1, f14->f14, d33->d33"),
    ("g >= 42", "c3 c1 f16 d33 b4 b2 f17 d33 : c5->c5, c3->b4, f20->f20, d33->d33"),
    ("g >= 42", "T^-3 : c3->b2, c2->b1, f16->f13, d33->d30"),
    ("g >= 42", "T^5 : f13->f18, d33->d38"),
    ("g >= 42", "T^-7 : gm8->gm1, b4->a1"),
    ("g >= 42", "f18 d33 b16 : f18->f18, d33->b16"),
    ("g >= 42", "T^-17 : f18->f1"),
    ("g >= 42", "T^-33 : d33->d{g-1}"),
    ("g >= 8", "T^-3 : f1->f{g-3}, b2->a1"),
    ("g >= 8", "f{g-3} a1 d{g-1} a2 : f{g-3}->d{g-1}, a1->a1"),
    ("g >= 8", "a1 d{g-1} f1 b2 : a1->f1, d{g-1}->d{g-1}"),
    ("g >= 8", "T^2 : a1->c1, b2->b3"),
    ("g >= 8", "c1 b3 b2 a1 : b3->b3, c1->b2"),
    ("g >= 8", "T^-2 : b3->b2, b2->b1"),
    ("g >= 6", "1 : gm1->a2"),
];

const R4K2: &[(&str, &str)] = &[
    ("g >= 30", "T^-4 : gm10->gm6, c2->a1, f18->f14, b{2*k}->b{2*k}"),
    ("g >= 30", "gm6 a1 f14 b{2*k} gm10 c2 f18 b{2*k} : gm6->c2, a1->a1, f14->f14, b{2*k}->b{2*k}"),
    ("g >= 30", "c4 c2 f18 b{2*k} b4 b2 f17 b{2*k} : c2->b2, a1->a1, f14->f14, b{2*k}->b{2*k}"),
    ("g >= 30", "c3 c1 f16 b{2*k} b4 b2 f17 b{2*k} : c5->c5, c3->b4, f20->f20, b{2*k}->b{2*k}"),
    ("g >= 30", "T^-3 : c3->b2, c2->b1, f16->f13"),
    ("g >= 30", "T^5 : f13->f18"),
    ("g >= 30", "T^-7 : gm8->gm1, b4->a1"),
    ("g >= 30", "f18 b{2*k} d{4*k+1} : f18->f18, b{2*k}->d{4*k+1}"),
    ("g >= 30", "T^-17 : f18->f1"),
    ("g >= 10", "T : a1->b1, b{2*k}->b{2*k}, d{4*k+1}->d{4*k+1}"),
    ("g >= 10", "c{2*k-1} d{4*k+1} b{2*k-1} : c{2*k-1}->b{2*k-1}, d{4*k+1}->d{4*k+1}"),
    ("g >= 10", "T^3 : f1->f4, b{2*k}->b{2*k}"),
    ("g >= 10", "a1 a2 b{2*k} f4 : a1->a1, a2->f4"),
    ("g >= 10", "T^2 : b1->b2, b{2*k}->b{2*k}"),
    ("g >= 10", "1 : gm1->a2"),
];

const R4K3: &[(&str, &str)] = &[
    ("g >= 43", "T^11 : gm10->gm21, c2->b8, f18->f29, u33->u44"),
    ("g >= 43", "gm21 b8 f29 u44 gm10 c2 f18 u33 : gm21->gm21, b8->b8, f29->f29, u44->u33"),
    ("g >= 43", "T : gm21->gm22, b8->c8, f29->f30, u33->u34"),
    ("g >= 43", "gm22 c8 f30 u34 gm10 c2 f18 u33 : gm22->gm22, c8->c8, f30->f30, u34->u33"),
    ("g >= 43", "T^-4 : gm10->gm6, c2->a1, f18->f14, u33->u29"),
    ("g >= 43", "gm6 a1 f14 u33 gm10 c2 f18 u33 : gm6->c2, a1->a1, f14->f14, u33->u33"),
    ("g >= 43", "c4 c2 f18 u33 b4 b2 f17 u33 : c2->b2, a1->a1, f14->f14, u33->u33"),
    ("g >= 43", "c3 c1 f16 u33 b4 b2 f17 u33 : c5->c5, c3->b4, f20->f20, u33->u33"),
    ("g >= 43", "T^-7 : gm8->gm1, b4->a1"),
    ("g >= 43", "f18 u33 b16 : f18->f18, u33->b16"),
    ("g >= 43", "T^-17 : f18->f1"),
    ("g >= 43", "T^{4*k-32} : u33->u{4*k+1}"),
    ("g >= 7", "1 : u{4*k+1}->c{2*k}"),
    ("g >= 7", "1 : gm1->a2"),
];

const R4K3_SMALL: &[(&str, &str)] = &[
    ("g >= 7", "f{g-2} u3 a1 a2 : f{g-2}->f{g-2}, u3->a2"),
    ("g >= 7", "b{2*k} b{2*k+1} a1 u3 : b{2*k}->b{2*k}, b{2*k+1}->u3"),
    ("g >= 7", "T^3 : b{2*k}->b1, a1->b2"),
    ("g >= 7", "T^-3 : u3->c{2*k}"),
    (
        "g >= 7",
        "T^3 c{2*k} b{2*k+1} c{2*k-1} b{2*k} c{2*k} u{g-4}^-1 T^-2 : f{g-2}->f1",
    ),
    ("g >= 7", "1 : u{4*k+1}->c{2*k}"),
    ("g >= 7", "1 : gm1->a2"),
];

/// The curve-image statements that apply to a profile at a genus.
pub fn profile_claims(
    genus: GenusModel,
    profile: SeedProfile,
) -> Result<Vec<Claim>, SurfaceError> {
    let rows = match profile {
        SeedProfile::Rot if genus.is_odd() => ROT_ODD,
        SeedProfile::Rot => ROT_EVEN,
        SeedProfile::R4k2 => R4K2,
        SeedProfile::R4k3 => R4K3,
        SeedProfile::R4k3Small => R4K3_SMALL,
    };
    let vars = genus.vars();
    let mut out = Vec::new();
    for (cond, text) in rows {
        if expr::holds(cond, &vars)? {
            out.push(Claim::parse(&expr::expand(text, &vars)?)?);
        }
    }
    Ok(out)
}

/// One checked constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub genus: usize,
    pub layout: Layout,
    pub profile: SeedProfile,
    pub results: Vec<ConstraintResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    fn push(&mut self, name: String, outcome: Result<Option<String>, SurfaceError>) {
        let (passed, detail) = match outcome {
            Ok(None) => (true, None),
            Ok(Some(d)) => (false, Some(d)),
            Err(e) => (false, Some(e.to_string())),
        };
        self.results.push(ConstraintResult { name, passed, detail });
    }
}

fn position_name(p: usize) -> String {
    if p == 1 {
        "a1".into()
    } else if p % 2 == 0 {
        format!("b{}", p / 2)
    } else {
        format!("c{}", (p - 1) / 2)
    }
}

fn position_id(p: usize) -> CurveId {
    CurveId::parse_lower(&position_name(p)).expect("position names parse")
}

fn expect_eq(t: &BitMat, cat: &CurveCatalog, from: CurveId, to: CurveId) -> Result<Option<String>, SurfaceError> {
    let got = t.apply(&cat.class(&from)?)?;
    let want = cat.class(&to)?;
    Ok((got != want).then(|| format!("T({from}) = {got}, {to} = {want}")))
}

/// Checks two-sidedness, `T`-equivariance of every family, and every
/// curve-image statement of the catalog's profile.
pub fn validate_catalog(cat: &CurveCatalog, spec: &MappingClassSpec) -> ValidationReport {
    let mut report = ValidationReport {
        genus: cat.genus().g(),
        layout: cat.layout(),
        profile: cat.profile(),
        results: Vec::new(),
    };
    if spec.genus() != cat.genus() || spec.layout() != cat.layout() {
        report.push(
            "catalog and rotation agree on genus and layout".into(),
            Ok(Some(format!(
                "catalog {} {}, rotation {} {}",
                cat.genus(),
                cat.layout(),
                spec.genus(),
                spec.layout()
            ))),
        );
        return report;
    }
    let g = cat.genus().g();
    let n = cat.cycle_len();
    let t = spec.t_mod2();

    for id in cat.entries() {
        let outcome = cat
            .class(&id)
            .map(|v| (!v.is_two_sided()).then(|| format!("{id} = {v} has odd weight")));
        report.push(format!("two-sided({id})"), outcome);
    }

    let rotation_ok = (1..=g).all(|i| {
        let x = BitVec::basis(g, i).expect("in range");
        t.apply(&x).expect("same dim") == cat.rotate(&x, 1)
    });
    report.push(
        "catalog rotation agrees with T".into(),
        Ok((!rotation_ok).then(|| "rotate_bits differs from the matrix of T".to_string())),
    );

    let mp = cat.max_position();
    for p in 1..=mp {
        let next = if n == g {
            Some(p % g + 1)
        } else if p + 1 < n {
            Some(p + 1)
        } else if p > n {
            Some(p)
        } else {
            None
        };
        if let Some(q) = next {
            let (a, b) = (position_id(p), position_id(q));
            report.push(format!("T({a})={b}"), expect_eq(t, cat, a, b));
        }
    }
    for i in 1..=n {
        let j = i % n + 1;
        report.push(
            format!("T(gm{i})=gm{j}"),
            expect_eq(t, cat, CurveId::gamma(i), CurveId::gamma(j)),
        );
        report.push(format!("T(f{i})=f{j}"), expect_eq(t, cat, CurveId::f(i), CurveId::f(j)));
        if n < g {
            report.push(format!("T(d{i})=d{j}"), expect_eq(t, cat, CurveId::d(i), CurveId::d(j)));
        }
        if cat.layout() == Layout::Reflection && cat.genus().class_mod4() == 3 {
            report.push(format!("T(u{i})=u{j}"), expect_eq(t, cat, CurveId::u(i), CurveId::u(j)));
        }
    }
    for i in n + 1..g {
        report.push(format!("T(d{i})=d{i}"), expect_eq(t, cat, CurveId::d(i), CurveId::d(i)));
    }
    report.push("e = A1(f1)".into(), (|| {
        let a1 = cat.class(&CurveId::a(1))?;
        let f1 = cat.class(&CurveId::f(1))?;
        let want = BitMat::transvection(&a1)?.apply(&f1)?;
        let e = cat.class(&CurveId::e())?;
        Ok((e != want).then(|| format!("e = {e}, A1(f1) = {want}")))
    })());

    match profile_claims(cat.genus(), cat.profile()) {
        Ok(claims) => {
            for c in claims {
                let outcome = c.check(cat);
                report.push(c.text.clone(), outcome);
            }
        }
        Err(e) => report.push("claims table".into(), Err(e)),
    }
    report
}

/// Candidate seed classes: a run of consecutive crosscaps in the rotated
/// block (starting near either end, length up to 10), plus any subset of the
/// fixed crosscaps, with even total weight. Sorted by weight, then indices.
pub fn seed_candidates(genus: GenusModel, layout: Layout) -> Vec<BitVec> {
    let g = genus.g();
    let n = layout.cycle_len(genus);
    let fixed: Vec<usize> = (n + 1..=g).collect();
    let mut starts: BTreeSet<usize> = (1..=8.min(n)).collect();
    starts.extend(n.saturating_sub(7).max(1)..=n);
    let mut seen = BTreeSet::new();
    for &s in &starts {
        for len in 0..=10.min(n) {
            let run: Vec<usize> = (0..len).map(|j| (s - 1 + j) % n + 1).collect();
            for mask in 0..(1u32 << fixed.len()) {
                let mut idx = run.clone();
                idx.extend(
                    fixed
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &x)| x),
                );
                let v = BitVec::from_indices(g, &idx).expect("in range");
                if !v.is_zero() && v.is_two_sided() {
                    seen.insert((v.weight(), v.indices(), v));
                }
            }
        }
    }
    seen.into_iter().map(|(_, _, v)| v).collect()
}

/// A consistent pair of seed classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedCandidate {
    pub a2: String,
    pub f1: String,
}

/// Every `(a2, f1)` in the candidate space for which all of the profile's
/// curve-image statements hold. With `fixed_a2`, only `f1` is searched.
pub fn infer_seed_classes(
    genus: GenusModel,
    layout: Layout,
    profile: SeedProfile,
    fixed_a2: Option<BitVec>,
) -> Result<Vec<(BitVec, BitVec)>, SurfaceError> {
    let claims = profile_claims(genus, profile)?;
    let cands = seed_candidates(genus, layout);
    let a2s = match fixed_a2 {
        Some(v) => vec![v],
        None => cands.clone(),
    };
    let mut out = Vec::new();
    for a2 in &a2s {
        for f1 in &cands {
            let seeds = Seeds {
                profile,
                a2: *a2,
                f1: *f1,
                note: String::new(),
            };
            let cat = build_catalog(genus, layout, seeds)?;
            let ok = claims
                .iter()
                .all(|c| matches!(c.check(&cat), Ok(None)));
            if ok {
                out.push((*a2, *f1));
            }
        }
    }
    if out.is_empty() {
        return Err(SurfaceError::NoCandidates);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{default_seed_sets, seeds_for};

    fn setup(g: usize, layout: Layout, p: SeedProfile) -> (CurveCatalog, MappingClassSpec) {
        let genus = GenusModel::new(g).unwrap();
        let seeds = seeds_for(&default_seed_sets(), p, genus, layout).unwrap();
        (
            build_catalog(genus, layout, seeds).unwrap(),
            MappingClassSpec::new(genus, layout).unwrap(),
        )
    }

    #[test]
    fn parse_claim() {
        let c = Claim::parse("T^-4 A1^2 b3^-1 : gm10->gm6, c2->a1").unwrap();
        assert_eq!(c.word, vec![ClaimOp::Rot(-4), ClaimOp::Twist(CurveId::b(3))]);
        assert_eq!(c.pairs.len(), 2);
        assert!(Claim::parse("T^-4 gm10->gm6").is_err());
    }

    #[test]
    fn default_catalogs_validate() {
        for (g, layout, p) in [
            (9, Layout::Rotation, SeedProfile::Rot),
            (29, Layout::Rotation, SeedProfile::Rot),
            (44, Layout::Rotation, SeedProfile::Rot),
            (30, Layout::Reflection, SeedProfile::R4k2),
            (43, Layout::Reflection, SeedProfile::R4k3),
            (11, Layout::Reflection, SeedProfile::R4k3Small),
        ] {
            let (cat, spec) = setup(g, layout, p);
            let r = validate_catalog(&cat, &spec);
            let bad: Vec<_> = r.failures().collect();
            assert!(bad.is_empty(), "g={g} {p}: {bad:?}");
        }
    }

    #[test]
    fn corrupted_b3_is_caught() {
        let (mut cat, spec) = setup(29, Layout::Rotation, SeedProfile::Rot);
        cat.set_class(&CurveId::b(3), BitVec::from_indices(29, &[5, 7]).unwrap())
            .unwrap();
        let r = validate_catalog(&cat, &spec);
        let names: Vec<&str> = r.failures().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"T(b3)=c3"), "{names:?}");
        assert!(names.contains(&"T(c2)=b3"), "{names:?}");
    }

    #[test]
    fn mismatched_spec_is_reported() {
        let (cat, _) = setup(29, Layout::Rotation, SeedProfile::Rot);
        let spec = MappingClassSpec::new(GenusModel::new(31).unwrap(), Layout::Rotation).unwrap();
        assert!(!validate_catalog(&cat, &spec).passed());
    }

    #[test]
    fn candidates_are_even_and_sorted() {
        let genus = GenusModel::new(30).unwrap();
        let c = seed_candidates(genus, Layout::Reflection);
        assert!(c.iter().all(|v| v.is_two_sided() && !v.is_zero()));
        assert!(c.windows(2).all(|w| (w[0].weight(), w[0].indices()) < (w[1].weight(), w[1].indices())));
    }

    #[test]
    fn inference_recovers_shipped_seeds_at_29() {
        let genus = GenusModel::new(29).unwrap();
        let (cat, _) = setup(29, Layout::Rotation, SeedProfile::Rot);
        let found = infer_seed_classes(genus, Layout::Rotation, SeedProfile::Rot, None).unwrap();
        assert!(found.contains(&(cat.seeds().a2, cat.seeds().f1)));
        let at44 = infer_seed_classes(
            GenusModel::new(44).unwrap(),
            Layout::Rotation,
            SeedProfile::Rot,
            None,
        )
        .unwrap();
        assert_eq!(at44.len(), 3);
    }

    #[test]
    fn r4k3_f1_choices_with_fixed_a2() {
        let genus = GenusModel::new(43).unwrap();
        let a2 = BitVec::from_indices(43, &[1, 2, 3, 4]).unwrap();
        let found = infer_seed_classes(genus, Layout::Reflection, SeedProfile::R4k3, Some(a2)).unwrap();
        let f1s: Vec<Vec<usize>> = found.iter().map(|(_, f)| f.indices()).collect();
        assert_eq!(f1s, vec![vec![2, 3], vec![6, 7]]);
    }
}
