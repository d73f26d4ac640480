use std::cell::RefCell;
use std::collections::HashMap;

use super::{Atom, AtomKind, Word, WordError};
use crate::f2linalg::{BitMat, BitVec, SignedPermMat};
use crate::surface::{CurveCatalog, CurveId, GenusModel, MappingClassSpec};

/// Named definitions in the order they were made. A definition may only
/// reference earlier labels, so the environment is acyclic by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    genus: GenusModel,
    defs: Vec<(String, Word)>,
    index: HashMap<String, usize>,
}

impl Environment {
    pub fn new(genus: GenusModel) -> Self {
        Self {
            genus,
            defs: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn genus(&self) -> GenusModel {
        self.genus
    }

    pub fn define(&mut self, label: &str, word: Word) -> Result<(), WordError> {
        if self.index.contains_key(label) {
            return Err(WordError::Duplicate(label.to_string()));
        }
        for l in word.labels() {
            if !self.index.contains_key(l) {
                return Err(WordError::Unresolved(l.to_string()));
            }
        }
        self.index.insert(label.to_string(), self.defs.len());
        self.defs.push((label.to_string(), word));
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&Word> {
        self.index.get(label).map(|&i| &self.defs[i].1)
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&str, &Word)> {
        self.defs.iter().map(|(l, w)| (l.as_str(), w))
    }

    /// Substitutes every label until only generator atoms remain.
    pub fn expand(&self, w: &Word) -> Result<Word, WordError> {
        let mut atoms = Vec::new();
        for a in &w.atoms {
            match &a.kind {
                AtomKind::Named(l) => {
                    let def = self
                        .get(l)
                        .ok_or_else(|| WordError::Unresolved(l.clone()))?;
                    let inner = self.expand(def)?.power(a.exp);
                    atoms.extend(inner.atoms);
                }
                _ => atoms.push(a.clone()),
            }
        }
        Ok(Word::from_atoms(atoms).reduce())
    }
}

/// Evaluates words at one genus against one catalog, memoizing twist
/// matrices and named definitions. Not shared across threads.
pub struct Evaluator<'a> {
    env: Environment,
    cat: &'a CurveCatalog,
    spec: &'a MappingClassSpec,
    twists: RefCell<HashMap<CurveId, BitMat>>,
    named: RefCell<HashMap<String, BitMat>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        env: Environment,
        cat: &'a CurveCatalog,
        spec: &'a MappingClassSpec,
    ) -> Result<Self, WordError> {
        if env.genus() != cat.genus() || spec.genus() != cat.genus() || spec.layout() != cat.layout() {
            return Err(WordError::Mismatch(format!(
                "environment {}, catalog {} {}, rotation {} {}",
                env.genus(),
                cat.genus(),
                cat.layout(),
                spec.genus(),
                spec.layout()
            )));
        }
        Ok(Self {
            env,
            cat,
            spec,
            twists: RefCell::new(HashMap::new()),
            named: RefCell::new(HashMap::new()),
        })
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn catalog(&self) -> &CurveCatalog {
        self.cat
    }

    pub fn spec(&self) -> &MappingClassSpec {
        self.spec
    }

    pub fn define(&mut self, label: &str, word: Word) -> Result<(), WordError> {
        self.env.define(label, word)
    }

    pub fn twist_matrix(&self, c: &CurveId) -> Result<BitMat, WordError> {
        if let Some(m) = self.twists.borrow().get(c) {
            return Ok(m.clone());
        }
        let m = BitMat::transvection(&self.cat.class(c)?)?;
        self.twists.borrow_mut().insert(*c, m.clone());
        Ok(m)
    }

    fn atom_mod2(&self, a: &Atom) -> Result<BitMat, WordError> {
        Ok(match &a.kind {
            AtomKind::Twist(c) => {
                let m = self.twist_matrix(c)?;
                if a.exp % 2 == 0 {
                    BitMat::identity(m.dim())?
                } else {
                    m
                }
            }
            AtomKind::Rot => self.spec.t_mod2().pow(a.exp)?,
            AtomKind::Refl1 => self.spec.rho(1)?.to_mod2().pow(a.exp)?,
            AtomKind::Refl2 => self.spec.rho(2)?.to_mod2().pow(a.exp)?,
            AtomKind::Named(l) => self.label_mod2(l)?.pow(a.exp)?,
        })
    }

    fn label_mod2(&self, label: &str) -> Result<BitMat, WordError> {
        if let Some(m) = self.named.borrow().get(label) {
            return Ok(m.clone());
        }
        let def = self
            .env
            .get(label)
            .ok_or_else(|| WordError::Unresolved(label.to_string()))?;
        let m = self.evaluate_mod2(def)?;
        self.named.borrow_mut().insert(label.to_string(), m.clone());
        Ok(m)
    }

    /// The mod-2 matrix of a word; the rightmost atom acts first.
    pub fn evaluate_mod2(&self, w: &Word) -> Result<BitMat, WordError> {
        let mut acc = BitMat::identity(self.cat.genus().g())?;
        for a in &w.atoms {
            acc = acc.mul(&self.atom_mod2(a)?)?;
        }
        Ok(acc)
    }

    /// Applies a word to a class.
    pub fn apply_mod2(&self, w: &Word, v: &BitVec) -> Result<BitVec, WordError> {
        Ok(self.evaluate_mod2(w)?.apply(v)?)
    }

    /// The signed permutation matrix of a twist-free word.
    pub fn evaluate_signed(&self, w: &Word) -> Result<SignedPermMat, WordError> {
        let mut acc = SignedPermMat::identity(self.cat.genus().g())?;
        for a in &w.atoms {
            let m = match &a.kind {
                AtomKind::Named(l) => {
                    let def = self
                        .env
                        .get(l)
                        .ok_or_else(|| WordError::Unresolved(l.clone()))?;
                    self.evaluate_signed(def)?.pow(a.exp)
                }
                _ => signed_atom(a, self.spec)?,
            };
            acc = acc.mul(&m)?;
        }
        Ok(acc)
    }
}

fn signed_atom(a: &Atom, spec: &MappingClassSpec) -> Result<SignedPermMat, WordError> {
    Ok(match &a.kind {
        AtomKind::Rot => spec.t_signed().pow(a.exp),
        AtomKind::Refl1 => spec.rho(1)?.pow(a.exp),
        AtomKind::Refl2 => spec.rho(2)?.pow(a.exp),
        AtomKind::Twist(_) => return Err(WordError::TwistInSigned),
        AtomKind::Named(l) => return Err(WordError::Unresolved(l.clone())),
    })
}

/// One-shot mod-2 evaluation.
pub fn evaluate_mod2(
    w: &Word,
    env: &Environment,
    cat: &CurveCatalog,
    spec: &MappingClassSpec,
) -> Result<BitMat, WordError> {
    Evaluator::new(env.clone(), cat, spec)?.evaluate_mod2(w)
}

/// Signed evaluation of a word over `T`, `R1`, `R2` with no labels.
pub fn evaluate_signed(w: &Word, spec: &MappingClassSpec) -> Result<SignedPermMat, WordError> {
    let mut acc = SignedPermMat::identity(spec.genus().g())?;
    for a in &w.atoms {
        acc = acc.mul(&signed_atom(a, spec)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_catalog, default_seed_sets, seeds_for, Layout, SeedProfile};
    use crate::words::parse_word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(g: usize, layout: Layout) -> (CurveCatalog, MappingClassSpec) {
        let genus = GenusModel::new(g).unwrap();
        let p = SeedProfile::default_for(genus, layout);
        let seeds = seeds_for(&default_seed_sets(), p, genus, layout).unwrap();
        (
            build_catalog(genus, layout, seeds).unwrap(),
            MappingClassSpec::new(genus, layout).unwrap(),
        )
    }

    fn random_word(rng: &mut ChaCha8Rng, g: usize) -> Word {
        let names = ["A1", "A2", "B2", "C3", "E", "F4", "G7", "T", "R1", "R2"];
        let n = rng.gen_range(0..10);
        let text: Vec<String> = (0..n)
            .map(|_| {
                let name = names[rng.gen_range(0..names.len())];
                let e = rng.gen_range(-3i64..=3);
                let e = if e == 0 { 1 } else { e };
                format!("{name}^{e}")
            })
            .collect();
        let _ = g;
        parse_word(&text.join(" ")).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let (cat, spec) = ctx(29, Layout::Rotation);
        let env = Environment::new(cat.genus());
        assert!(evaluate_mod2(&Word::empty(), &env, &cat, &spec).unwrap().is_identity());
    }

    #[test]
    fn conjugated_label_at_29() {
        let (cat, spec) = ctx(29, Layout::Rotation);
        let mut ev = Evaluator::new(Environment::new(cat.genus()), &cat, &spec).unwrap();
        ev.define("G1", parse_word("G10 * C2^-1 * F18 * C12^-1").unwrap()).unwrap();
        let lhs = ev.evaluate_mod2(&parse_word("T^-4 * $G1 * T^4").unwrap()).unwrap();
        let rhs = ev.evaluate_mod2(&parse_word("G6 * A1^-1 * F14 * C10^-1").unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homomorphism_and_inverse() {
        let (cat, spec) = ctx(13, Layout::Reflection);
        let ev = Evaluator::new(Environment::new(cat.genus()), &cat, &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = random_word(&mut rng, 13);
            let v = random_word(&mut rng, 13);
            let eu = ev.evaluate_mod2(&u).unwrap();
            let evv = ev.evaluate_mod2(&v).unwrap();
            // independent product: compose column images by hand
            let by_hand: Vec<BitVec> = (1..=13)
                .map(|i| eu.apply(&evv.image(i)).unwrap())
                .collect();
            assert_eq!(ev.evaluate_mod2(&u.concat(&v)).unwrap(), BitMat::from_images(&by_hand).unwrap());
            assert_eq!(ev.evaluate_mod2(&u.inverse()).unwrap(), eu.inv().unwrap());
            assert_eq!(
                ev.evaluate_mod2(&Word::commutator(&u, &v)).unwrap(),
                eu.commutator(&evv).unwrap()
            );
            assert!(eu.preserves_form());
        }
    }

    #[test]
    fn conjugation_image_law() {
        let (cat, spec) = ctx(29, Layout::Rotation);
        let ev = Evaluator::new(Environment::new(cat.genus()), &cat, &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in ["a1", "b5", "c12", "f18", "gm10", "e"] {
            let c: CurveId = id.parse().unwrap();
            let w = random_word(&mut rng, 29);
            let conj = Word::atom(Atom::twist(c)).conjugate(&w);
            let moved = ev.apply_mod2(&w, &cat.class(&c).unwrap()).unwrap();
            assert_eq!(ev.evaluate_mod2(&conj).unwrap(), BitMat::transvection(&moved).unwrap());
        }
    }

    #[test]
    fn signed_evaluation() {
        for g in [7, 9, 12, 13] {
            let (_, spec) = ctx(g, Layout::Reflection);
            let prod = evaluate_signed(&parse_word("R2 * R1").unwrap(), &spec).unwrap();
            assert_eq!(&prod, spec.t_signed());
        }
        let (_, spec) = ctx(9, Layout::Rotation);
        assert!(evaluate_signed(&parse_word("T^9").unwrap(), &spec).unwrap().is_identity());
        assert_eq!(
            evaluate_signed(&parse_word("A1").unwrap(), &spec),
            Err(WordError::TwistInSigned)
        );
    }

    #[test]
    fn environment_rules() {
        let mut env = Environment::new(GenusModel::new(9).unwrap());
        assert!(matches!(
            env.define("H1", parse_word("$H2").unwrap()),
            Err(WordError::Unresolved(_))
        ));
        env.define("H1", parse_word("A1 * T").unwrap()).unwrap();
        env.define("H2", parse_word("$H1^-1 * B2").unwrap()).unwrap();
        assert!(matches!(env.define("H1", Word::empty()), Err(WordError::Duplicate(_))));
        assert_eq!(
            env.expand(&parse_word("$H2").unwrap()).unwrap().to_string(),
            "T^-1 * A1^-1 * B2"
        );
    }

    #[test]
    fn reflections_missing_in_rotation_layout() {
        let (cat, spec) = ctx(11, Layout::Rotation);
        let ev = Evaluator::new(Environment::new(cat.genus()), &cat, &spec).unwrap();
        assert!(ev.evaluate_mod2(&parse_word("R1").unwrap()).is_err());
    }
}
