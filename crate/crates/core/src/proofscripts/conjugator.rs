use std::collections::VecDeque;

use thiserror::Error;

use crate::f2linalg::{BitMat, BitVec, LinalgError};
use crate::surface::CurveId;
use crate::words::{Atom, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjugatorError {
    #[error("pairs not equivalent: {0}")]
    NotEquivalent(String),
    #[error("no bridge class for pair {0}")]
    NoBridge(usize),
    #[error("cannot reach {0} with the available classes")]
    Unreachable(String),
    #[error("constructed word fails its own check at pair {0}")]
    SelfCheck(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn index_lex_key(v: &BitVec) -> Vec<usize> {
    v.indices()
}

/// Solves `rows` (mask, rhs) over GF(2); returns one solution.
fn solve(dim: usize, rows: &[(u64, bool)]) -> Option<u64> {
    let mut rows: Vec<(u64, bool)> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        let bit = 1u64 << col;
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let (m, b) = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0 & bit != 0 {
                row.0 ^= m;
                row.1 ^= b;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|&(m, b)| m == 0 && b) {
        return None;
    }
    let mut x = 0u64;
    for &(row, col) in &pivots {
        if rows[row].1 {
            x |= 1 << col;
        }
    }
    Some(x)
}

/// Index-lexicographically least solution: compares sorted index lists, a
/// proper prefix being smaller.
fn least_solution(dim: usize, rows: &[(u64, bool)]) -> Option<u64> {
    solve(dim, rows)?;
    let mut fixed: Vec<(u64, bool)> = rows.to_vec();
    let mut p = 0;
    loop {
        let rest: Vec<(u64, bool)> = (p..dim).map(|i| (1u64 << i, false)).collect();
        let mut all_zero = fixed.clone();
        all_zero.extend(rest);
        if let Some(x) = solve(dim, &all_zero) {
            return Some(x);
        }
        let mut q = p;
        loop {
            let mut trial = fixed.clone();
            trial.extend((p..q).map(|i| (1u64 << i, false)));
            trial.push((1u64 << q, true));
            if solve(dim, &trial).is_some() {
                fixed = trial;
                break;
            }
            q += 1;
            if q >= dim {
                return None;
            }
        }
        p = q + 1;
    }
}

fn rank(vectors: impl Iterator<Item = u128>) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn check_pairs(pairs: &[(BitVec, BitVec)]) -> Result<usize, ConjugatorError> {
    let Some(dim) = pairs.first().map(|p| p.0.dim()) else {
        return Ok(0);
    };
    for (i, (u, v)) in pairs.iter().enumerate() {
        if u.dim() != dim || v.dim() != dim {
            return Err(ConjugatorError::NotEquivalent(format!("pair {i} has the wrong dimension")));
        }
        for (name, x) in [("source", u), ("target", v)] {
            if x.is_zero() || !x.is_two_sided() {
                return Err(ConjugatorError::NotEquivalent(format!(
                    "{name} {x} of pair {i} is not a nonzero even class"
                )));
            }
        }
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if pairs[i].0.dot(&pairs[j].0)? != pairs[i].1.dot(&pairs[j].1)? {
                return Err(ConjugatorError::NotEquivalent(format!(
                    "pairs {i} and {j} meet differently"
                )));
            }
        }
    }
    let src = rank(pairs.iter().map(|p| p.0.bits() as u128));
    let dst = rank(pairs.iter().map(|p| p.1.bits() as u128));
    let both = rank(pairs.iter().map(|p| p.0.bits() as u128 | (p.1.bits() as u128) << 64));
    if src != both || dst != both {
        return Err(ConjugatorError::NotEquivalent(
            "linear relations among the sources and targets differ".into(),
        ));
    }
    Ok(dim)
}

fn transvect(x: &BitVec, y: &BitVec) -> Result<BitVec, LinalgError> {
    if y.dot(x)? {
        y.add(x)
    } else {
        Ok(*y)
    }
}

/// Transvection vectors, in the order they act, whose product carries each
/// source class to its target. Each move is orthogonal to the targets
/// already placed, so it keeps them fixed.
pub fn conjugator_plan(
    pairs: &[(BitVec, BitVec)],
    classes: &[BitVec],
) -> Result<Vec<BitVec>, ConjugatorError> {
    let dim = check_pairs(pairs)?;
    let mut bridges: Vec<BitVec> = classes
        .iter()
        .filter(|c| c.dim() == dim && !c.is_zero() && c.is_two_sided())
        .copied()
        .collect();
    bridges.sort_by_key(index_lex_key);
    bridges.dedup();
    let mut plan: Vec<BitVec> = Vec::new();
    let apply = |plan: &[BitVec], v: &BitVec| -> Result<BitVec, LinalgError> {
        plan.iter().try_fold(*v, |acc, x| transvect(x, &acc))
    };
    for (i, (u, v)) in pairs.iter().enumerate() {
        let y = apply(&plan, u)?;
        if y == *v {
            continue;
        }
        if y.dot(v)? {
            plan.push(y.add(v)?);
            continue;
        }
        let placed = &pairs[..i];
        let fits = |w: &BitVec| -> Result<bool, LinalgError> {
            if !(w.dot(&y)? && w.dot(v)?) {
                return Ok(false);
            }
            for (_, vj) in placed {
                if w.dot(vj)? != v.dot(vj)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut chosen = None;
        for w in &bridges {
            if fits(w)? {
                chosen = Some(*w);
                break;
            }
        }
        if chosen.is_none() {
            let mut rows = vec![(y.bits(), true), (v.bits(), true), (BitVec::all_ones(dim)?.bits(), false)];
            for (_, vj) in placed {
                rows.push((vj.bits(), v.dot(vj)?));
            }
            if let Some(bits) = least_solution(dim, &rows) {
                chosen = Some(BitVec::from_bits(dim, bits)?);
            }
        }
        let w = chosen.ok_or(ConjugatorError::NoBridge(i))?;
        plan.push(y.add(&w)?);
        plan.push(w.add(v)?);
    }
    Ok(plan)
}

struct Moves<'a> {
    dim: usize,
    gens: &'a [(CurveId, BitVec)],
    /// `adj[p]` lists `(q, gen index)` for weight-2 classes `x_p + x_q`.
    adj: Vec<Vec<(usize, usize)>>,
}

impl<'a> Moves<'a> {
    fn new(dim: usize, gens: &'a [(CurveId, BitVec)]) -> Self {
        let mut adj = vec![Vec::new(); dim];
        for (gi, (_, c)) in gens.iter().enumerate() {
            if c.dim() == dim && c.weight() == 2 {
                let ix = c.indices();
                let (p, q) = (ix[0] - 1, ix[1] - 1);
                adj[p].push((q, gi));
                adj[q].push((p, gi));
            }
        }
        Self { dim, gens, adj }
    }

    /// Generator indices whose transvections, applied in order, swap
    /// coordinates `s` and `t` (0-based) and fix every other coordinate.
    fn transposition(&self, s: usize, t: usize) -> Result<Vec<usize>, ConjugatorError> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.dim];
        let mut seen = vec![false; self.dim];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(p) = queue.pop_front() {
            if p == t {
                break;
            }
            for &(q, gi) in &self.adj[p] {
                if !seen[q] {
                    seen[q] = true;
                    prev[q] = Some((p, gi));
                    queue.push_back(q);
                }
            }
        }
        if !seen[t] {
            return Err(ConjugatorError::Unreachable(format!(
                "x{} from x{} by weight-2 classes",
                t + 1,
                s + 1
            )));
        }
        let mut edges = Vec::new();
        let mut cur = t;
        while let Some((p, gi)) = prev[cur] {
            edges.push(gi);
            cur = p;
        }
        edges.reverse();
        let mut out = edges.clone();
        out.extend(edges.iter().rev().skip(1));
        Ok(out)
    }

    fn run(&self, seq: &[usize], y: &mut BitVec) -> Result<(), LinalgError> {
        for &gi in seq {
            *y = transvect(&self.gens[gi].1, y)?;
        }
        Ok(())
    }

    /// Generator indices, in the order they act, carrying `x` to the class
    /// of `gens[base]`.
    fn to_base(&self, x: &BitVec, base: usize, quad: usize) -> Result<Vec<usize>, ConjugatorError> {
        let unreachable = || ConjugatorError::Unreachable(x.to_string());
        let mut y = *x;
        let mut seq = Vec::new();
        let swap = |y: &mut BitVec, s: usize, t: usize, seq: &mut Vec<usize>| -> Result<(), ConjugatorError> {
            if s != t {
                let moves = self.transposition(s, t)?;
                self.run(&moves, y)?;
                seq.extend(moves);
            }
            Ok(())
        };
        let q: Vec<usize> = self.gens[quad].1.indices().iter().map(|i| i - 1).collect();
        while y.weight() > 2 {
            for &t in &q[..3] {
                if !y.get(t + 1) {
                    let s = (0..self.dim)
                        .find(|&s| y.get(s + 1) && !q[..3].contains(&s))
                        .ok_or_else(unreachable)?;
                    swap(&mut y, s, t, &mut seq)?;
                }
            }
            if y.get(q[3] + 1) {
                let z = (0..self.dim)
                    .find(|&z| !y.get(z + 1) && !q.contains(&z))
                    .ok_or_else(unreachable)?;
                swap(&mut y, q[3], z, &mut seq)?;
            }
            y = transvect(&self.gens[quad].1, &y)?;
            seq.push(quad);
        }
        let b: Vec<usize> = self.gens[base].1.indices().iter().map(|i| i - 1).collect();
        for (k, &t) in b.iter().enumerate() {
            if !y.get(t + 1) {
                let other = b[1 - k];
                let s = (0..self.dim)
                    .find(|&s| y.get(s + 1) && s != other)
                    .ok_or_else(unreachable)?;
                swap(&mut y, s, t, &mut seq)?;
            }
        }
        if y != self.gens[base].1 {
            return Err(unreachable());
        }
        Ok(seq)
    }
}

fn atom(gens: &[(CurveId, BitVec)], gi: usize) -> Word {
    Word::atom(Atom::twist(gens[gi].0))
}

/// A word in the named twists whose mod-2 image is the transvection by `x`:
/// the twist itself when `x` is a named class, else a conjugate
/// `M * C * M^-1` of a weight-2 twist `C` with `M` built from coordinate
/// swaps and one weight-4 twist.
pub fn realize_transvection(x: &BitVec, gens: &[(CurveId, BitVec)]) -> Result<Word, ConjugatorError> {
    if let Some(gi) = gens.iter().position(|(_, c)| c == x) {
        return Ok(atom(gens, gi));
    }
    let dim = x.dim();
    let missing = |what: &str| ConjugatorError::Unreachable(format!("{x}: no {what} among the classes"));
    let base = gens
        .iter()
        .position(|(_, c)| c.dim() == dim && c.weight() == 2)
        .ok_or_else(|| missing("weight-2 class"))?;
    let quad = gens
        .iter()
        .position(|(_, c)| c.dim() == dim && c.weight() == 4)
        .ok_or_else(|| missing("weight-4 class"))?;
    let moves = Moves::new(dim, gens);
    let seq = moves.to_base(x, base, quad)?;
    // `w` sends x to the base class, so x is the image of the base under w^-1
    let w = Word::from_atoms(seq.iter().rev().map(|&gi| Atom::twist(gens[gi].0)).collect());
    Ok(atom(gens, base).conjugate(&w.inverse()))
}

/// A word in the named twists whose mod-2 image sends each source class to
/// its target. Checks itself before returning.
pub fn find_conjugator(
    pairs: &[(BitVec, BitVec)],
    gens: &[(CurveId, BitVec)],
) -> Result<Word, ConjugatorError> {
    let classes: Vec<BitVec> = gens.iter().map(|(_, c)| *c).collect();
    let plan = conjugator_plan(pairs, &classes)?;
    let mut word = Word::empty();
    for x in &plan {
        word = realize_transvection(x, gens)?.concat(&word);
    }
    let word = word.reduce();
    if let Some(dim) = pairs.first().map(|p| p.0.dim()) {
        let mut m = BitMat::identity(dim)?;
        for a in &word.atoms {
            if a.exp % 2 != 0 {
                let crate::words::AtomKind::Twist(c) = a.kind else {
                    unreachable!("only twists are emitted")
                };
                let class = gens
                    .iter()
                    .find(|(id, _)| *id == c)
                    .map(|(_, v)| *v)
                    .expect("atoms come from gens");
                m = m.mul(&BitMat::transvection(&class)?)?;
            }
        }
        for (i, (u, v)) in pairs.iter().enumerate() {
            if m.apply(u)? != *v {
                return Err(ConjugatorError::SelfCheck(i));
            }
        }
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_catalog, default_seed_sets, seeds_for, GenusModel, Layout, SeedProfile};

    fn catalog_gens(g: usize, layout: Layout) -> Vec<(CurveId, BitVec)> {
        let genus = GenusModel::new(g).unwrap();
        let profile = SeedProfile::default_for(genus, layout);
        let seeds = seeds_for(&default_seed_sets(), profile, genus, layout).unwrap();
        let cat = build_catalog(genus, layout, seeds).unwrap();
        cat.entries()
            .into_iter()
            .map(|c| (c, cat.class(&c).unwrap()))
            .collect()
    }

    fn v(g: usize, ix: &[usize]) -> BitVec {
        BitVec::from_indices(g, ix).unwrap()
    }

    fn image(word: &Word, gens: &[(CurveId, BitVec)], x: &BitVec) -> BitVec {
        let mut y = *x;
        for a in word.atoms.iter().rev() {
            if a.exp % 2 != 0 {
                let crate::words::AtomKind::Twist(c) = a.kind else { panic!() };
                let class = gens.iter().find(|(id, _)| *id == c).unwrap().1;
                y = transvect(&class, &y).unwrap();
            }
        }
        y
    }

    #[test]
    fn meeting_pair_is_one_move() {
        let (u, w) = (v(9, &[1, 2]), v(9, &[2, 3]));
        let plan = conjugator_plan(&[(u, w)], &[]).unwrap();
        assert_eq!(plan, vec![v(9, &[1, 3])]);
        // x + <x, u+v>(u+v) at x = u
        let x = transvect(&plan[0], &u).unwrap();
        assert_eq!(x, w);
    }

    #[test]
    fn identical_tuples_give_empty_word() {
        let gens = catalog_gens(9, Layout::Rotation);
        let pairs = vec![(gens[0].1, gens[0].1), (gens[3].1, gens[3].1)];
        assert!(find_conjugator(&pairs, &gens).unwrap().is_empty());
    }

    #[test]
    fn disjoint_pair_needs_a_bridge() {
        let gens = catalog_gens(13, Layout::Rotation);
        let (u, w) = (v(13, &[1, 2]), v(13, &[5, 6]));
        let plan = conjugator_plan(&[(u, w)], &gens.iter().map(|g| g.1).collect::<Vec<_>>()).unwrap();
        assert_eq!(plan.len(), 2);
        let word = find_conjugator(&[(u, w)], &gens).unwrap();
        assert_eq!(image(&word, &gens, &u), w);
    }

    #[test]
    fn rejects_inequivalent_pairs() {
        let gens = catalog_gens(9, Layout::Rotation);
        let a = v(9, &[1, 2]);
        let b = v(9, &[2, 3]);
        let c = v(9, &[5, 6]);
        // a, b meet; their targets do not
        let err = find_conjugator(&[(a, a), (b, c)], &gens).unwrap_err();
        assert!(err.to_string().starts_with("pairs not equivalent"));
        assert!(find_conjugator(&[(v(9, &[1]), a)], &gens).is_err());
        // same source twice with two targets
        assert!(matches!(
            find_conjugator(&[(a, b), (a, v(9, &[1, 3]))], &gens),
            Err(ConjugatorError::NotEquivalent(_))
        ));
    }

    #[test]
    fn realized_transvection_has_the_right_image() {
        let gens = catalog_gens(12, Layout::Rotation);
        for ix in [&[3, 7][..], &[1, 5, 9, 11], &[2, 3, 4, 5, 6, 12]] {
            let x = v(12, ix);
            let w = realize_transvection(&x, &gens).unwrap();
            let want = BitMat::transvection(&x).unwrap();
            for i in 1..=12 {
                let e = v(12, &[i]);
                assert_eq!(image(&w, &gens, &e), want.apply(&e).unwrap(), "{x} at x{i}");
            }
        }
    }

    #[test]
    fn least_solution_is_index_lex_least() {
        // w1 + w2 = 1 over 4 bits: candidates {1}, {2}, {1,3}, ...; least is {1}
        assert_eq!(least_solution(4, &[(0b0011, true)]), Some(0b0001));
        // w1 = 0, w2 + w3 = 1: least is {2}
        assert_eq!(least_solution(4, &[(0b0001, false), (0b0110, true)]), Some(0b0010));
        assert_eq!(least_solution(3, &[(0b001, true), (0b001, false)]), None);
    }
}
