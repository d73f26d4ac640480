use std::collections::HashMap;

use num_bigint::BigUint;

use super::{BsgsConfig, GenSet, GroupError};
use crate::f2linalg::BitMat;

// Point index table: 0 = not in orbit, otherwise position in `points` + 1.
const ABSENT: u32 = 0;
// Tree parent marker for the base point.
const ROOT: u16 = u16::MAX;

/// Words of transversal storage allowed across a chain before levels fall
/// back to walking the Schreier tree.
const STORED_WORDS: usize = 1 << 26;

#[derive(Debug, Clone)]
enum Index {
    Sparse(HashMap<u64, u32>),
    Dense(Vec<u32>),
}

impl Index {
    fn get(&self, p: u64) -> u32 {
        match self {
            Index::Sparse(m) => m.get(&p).copied().unwrap_or(ABSENT),
            Index::Dense(v) => v[p as usize],
        }
    }

    fn set(&mut self, p: u64, l: u32) {
        match self {
            Index::Sparse(m) => {
                m.insert(p, l);
            }
            Index::Dense(v) => v[p as usize] = l,
        }
    }
}

/// One level of the chain: a base point, the strong generators fixing all
/// earlier base points, and a Schreier tree for the base point's orbit.
/// When memory allows, the inverse transversal element of every orbit point
/// is stored as well.
#[derive(Debug, Clone)]
struct Level {
    dim: usize,
    base: u64,
    gens: Vec<BitMat>,
    inv: Vec<BitMat>,
    points: Vec<u64>,
    parent: Vec<u16>,
    index: Index,
    // `u_p^-1` images, `dim` words per point, aligned with `points`
    inv_trans: Option<Vec<u64>>,
}

impl Level {
    fn new(dim: usize, base: u64, store: bool) -> Self {
        let mut index = Index::Sparse(HashMap::new());
        index.set(base, 1);
        let inv_trans = store.then(|| (0..dim).map(|i| 1u64 << i).collect());
        Self {
            dim,
            base,
            gens: Vec::new(),
            inv: Vec::new(),
            points: vec![base],
            parent: vec![ROOT],
            index,
            inv_trans,
        }
    }

    fn contains(&self, p: u64) -> bool {
        self.index.get(p) != ABSENT
    }

    fn push_point(&mut self, q: u64, from: usize, j: usize) {
        self.points.push(q);
        self.parent.push(j as u16);
        self.index.set(q, self.points.len() as u32);
        if let Some(t) = &mut self.inv_trans {
            // u_q^-1 = u_p^-1 s_j^-1
            let d = self.dim;
            let sinv = self.inv[j].raw_images();
            for c in 0..d {
                let mut bits = sinv[c];
                let mut out = 0u64;
                while bits != 0 {
                    let r = bits.trailing_zeros() as usize;
                    out ^= t[from * d + r];
                    bits &= bits - 1;
                }
                t.push(out);
            }
        }
    }

    fn maybe_densify(&mut self) {
        if let Index::Sparse(m) = &self.index {
            if self.dim <= 30 && m.len() > (1usize << self.dim) / 8 {
                let mut v = vec![ABSENT; 1usize << self.dim];
                for (&p, &l) in m {
                    v[p as usize] = l;
                }
                self.index = Index::Dense(v);
            }
        }
    }

    /// `u_p^-1 * m`, where `u_p` maps the base point to `p`.
    fn strip(&self, p: u64, m: &mut BitMat) {
        let idx = self.index.get(p) as usize - 1;
        if let Some(t) = &self.inv_trans {
            let d = self.dim;
            let u = &t[idx * d..(idx + 1) * d];
            for col in m.raw_images_mut() {
                let mut bits = *col;
                let mut out = 0u64;
                while bits != 0 {
                    out ^= u[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                *col = out;
            }
            return;
        }
        let mut idx = idx;
        let mut p = p;
        while self.parent[idx] != ROOT {
            let j = self.parent[idx] as usize;
            *m = self.inv[j].mul_unchecked(m);
            p = self.inv[j].apply_bits(p);
            idx = self.index.get(p) as usize - 1;
        }
    }

    /// The transversal element `u_p`.
    fn transversal(&self, p: u64) -> BitMat {
        let idx = self.index.get(p) as usize - 1;
        if let Some(t) = &self.inv_trans {
            // members of the group preserve the form, so the inverse is the transpose
            let d = self.dim;
            return BitMat::from_raw_images(d, t[idx * d..(idx + 1) * d].to_vec()).transpose();
        }
        let mut path = Vec::new();
        let (mut idx, mut p) = (idx, p);
        while self.parent[idx] != ROOT {
            let j = self.parent[idx] as usize;
            path.push(j);
            p = self.inv[j].apply_bits(p);
            idx = self.index.get(p) as usize - 1;
        }
        let mut u = BitMat::identity(self.dim).expect("valid dim");
        for &j in path.iter().rev() {
            u = self.gens[j].mul_unchecked(&u);
        }
        u
    }
}

/// A base and strong generating set for a group acting on `Z_2^g`.
///
/// Base points are basis vectors, chosen as the first basis vector moved by
/// the generator that forced a new level.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    dim: usize,
    levels: Vec<Level>,
    complete: bool,
    stored_words: usize,
}

type Stop<'s> = Option<&'s dyn Fn(&StabilizerChain) -> bool>;

impl StabilizerChain {
    /// A complete chain for `<gens>`.
    pub fn build(gens: &GenSet, cfg: &BsgsConfig) -> Result<Self, GroupError> {
        Self::build_inner(gens, cfg, None)
    }

    /// Builds until `stop` holds or the chain is complete. `stop` is polled
    /// whenever an orbit grows. A stopped chain is partial: its order is a
    /// lower bound and sifting to the identity still proves membership.
    pub fn build_until(
        gens: &GenSet,
        cfg: &BsgsConfig,
        stop: &dyn Fn(&StabilizerChain) -> bool,
    ) -> Result<Self, GroupError> {
        Self::build_inner(gens, cfg, Some(stop))
    }

    fn build_inner(gens: &GenSet, cfg: &BsgsConfig, stop: Stop<'_>) -> Result<Self, GroupError> {
        cfg.check(gens.dim())?;
        let mut chain = Self {
            dim: gens.dim(),
            levels: Vec::new(),
            complete: false,
            stored_words: 0,
        };
        if stop.is_some_and(|f| f(&chain)) {
            return Ok(chain);
        }
        for (i, h) in gens.gens().iter().enumerate() {
            if chain.sift(h).0.is_identity() {
                continue;
            }
            let stopped = chain.extend(0, h.clone(), stop)?;
            if let Some(p) = &cfg.progress {
                p(&format!("generator {}/{}: order so far {}", i + 1, gens.len(), chain.order()));
            }
            if stopped {
                return Ok(chain);
            }
        }
        chain.complete = true;
        Ok(chain)
    }

    /// Grows a partial chain from a fixed product-replacement stream over
    /// the generators, adding every nontrivial sift residue, until `stop`
    /// holds. Returns `None` once the stream yields `64 + 8 g` trivial sifts
    /// in a row. The stream has a fixed seed, so runs are reproducible; only
    /// positive answers come out of this, so nothing here is probabilistic.
    pub fn build_fast(
        gens: &GenSet,
        cfg: &BsgsConfig,
        stop: &dyn Fn(&StabilizerChain) -> bool,
    ) -> Result<Option<Self>, GroupError> {
        cfg.check(gens.dim())?;
        let dim = gens.dim();
        let mut chain = Self {
            dim,
            levels: Vec::new(),
            complete: false,
            stored_words: 0,
        };
        if stop(&chain) {
            return Ok(Some(chain));
        }
        let nontrivial: Vec<&BitMat> = gens.gens().iter().filter(|m| !m.is_identity()).collect();
        if nontrivial.is_empty() {
            return Ok(None);
        }
        let mut pool: Vec<BitMat> = (0..nontrivial.len().max(10))
            .map(|i| nontrivial[i % nontrivial.len()].clone())
            .collect();
        let mut acc = BitMat::identity(dim)?;
        let mut state: u64 = 0x2545_F491_4F6C_DD1D;
        let mut next = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            state.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        };
        let idle_limit = 64 + 8 * dim;
        let mut idle = 0;
        let mut queue: Vec<BitMat> = nontrivial.iter().map(|m| (*m).clone()).collect();
        queue.reverse();
        loop {
            let x = match queue.pop() {
                Some(x) => x,
                None => {
                    let n = pool.len();
                    let i = (next() % n as u64) as usize;
                    let mut j = (next() % (n as u64 - 1)) as usize;
                    if j >= i {
                        j += 1;
                    }
                    pool[i] = if next() & 1 == 0 {
                        pool[i].mul_unchecked(&pool[j])
                    } else {
                        pool[j].mul_unchecked(&pool[i])
                    };
                    acc = acc.mul_unchecked(&pool[i]);
                    acc.clone()
                }
            };
            let (res, level) = chain.sift(&x);
            if res.is_identity() {
                idle += 1;
                if idle > idle_limit {
                    return Ok(None);
                }
                continue;
            }
            idle = 0;
            chain.add_generator(level, res)?;
            if stop(&chain) {
                return Ok(Some(chain));
            }
        }
    }

    /// Whether every Schreier generator was sifted, so that the order is
    /// exact and failed sifts prove non-membership.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Base points as 1-based basis indices.
    pub fn base(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| l.base.trailing_zeros() as usize + 1)
            .collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.points.len()).collect()
    }

    pub fn strong_generators(&self) -> usize {
        self.levels.iter().map(|l| l.gens.len()).sum()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.points.len()))
    }

    /// Sifts from the top; returns the residue and the level where it
    /// stopped (`levels.len()` if it went through).
    fn sift(&self, m: &BitMat) -> (BitMat, usize) {
        self.sift_from(0, m.clone())
    }

    fn sift_from(&self, start: usize, mut m: BitMat) -> (BitMat, usize) {
        for (i, lvl) in self.levels.iter().enumerate().skip(start) {
            let p = m.apply_bits(lvl.base);
            if !lvl.contains(p) {
                return (m, i);
            }
            lvl.strip(p, &mut m);
        }
        let n = self.levels.len();
        (m, n)
    }

    pub fn contains(&self, m: &BitMat) -> bool {
        m.dim() == self.dim && self.sift(m).0.is_identity()
    }

    /// Adds `h` to level `i` and restores the chain below. Returns `true`
    /// if `stop` fired.
    /// Appends `h` to the strong generators of level `i` (creating the level
    /// if needed) and grows its orbit. Returns the old orbit length.
    fn add_generator(&mut self, i: usize, h: BitMat) -> Result<usize, GroupError> {
        if i == self.levels.len() {
            let moved = (0..self.dim)
                .map(|b| 1u64 << b)
                .find(|&e| h.apply_bits(e) != e)
                .expect("non-identity element moves a basis vector");
            self.levels.push(Level::new(self.dim, moved, true));
        }
        let old_len = {
            let budget = STORED_WORDS.saturating_sub(self.stored_words);
            let lvl = &mut self.levels[i];
            if lvl.gens.len() + 1 >= ROOT as usize {
                return Err(GroupError::TooManyGenerators);
            }
            let old_len = lvl.points.len();
            lvl.inv.push(h.inv().expect("generators are invertible"));
            lvl.gens.push(h);
            let new_j = lvl.gens.len() - 1;
            // the new generator on old points, then everything on new points
            for idx in 0..old_len {
                let q = lvl.gens[new_j].apply_bits(lvl.points[idx]);
                if !lvl.contains(q) {
                    lvl.push_point(q, idx, new_j);
                }
            }
            let mut idx = old_len;
            while idx < lvl.points.len() {
                let p = lvl.points[idx];
                for j in 0..lvl.gens.len() {
                    let q = lvl.gens[j].apply_bits(p);
                    if !lvl.contains(q) {
                        lvl.push_point(q, idx, j);
                    }
                }
                idx += 1;
                if idx % 4096 == 0 {
                    lvl.maybe_densify();
                    if lvl.inv_trans.as_ref().is_some_and(|t| t.len() > budget) {
                        lvl.inv_trans = None;
                    }
                }
            }
            lvl.maybe_densify();
            if lvl.inv_trans.as_ref().is_some_and(|t| t.len() > budget) {
                lvl.inv_trans = None;
            }
            old_len
        };
        self.stored_words = self
            .levels
            .iter()
            .map(|l| l.inv_trans.as_ref().map_or(0, Vec::len))
            .sum();
        Ok(old_len)
    }

    fn extend(&mut self, i: usize, h: BitMat, stop: Stop<'_>) -> Result<bool, GroupError> {
        let old_len = self.add_generator(i, h)?;
        if self.levels[i].points.len() > old_len && stop.is_some_and(|f| f(self)) {
            return Ok(true);
        }

        // Schreier generators s * u_p for the new pairs
        let n_points = self.levels[i].points.len();
        let n_gens = self.levels[i].gens.len();
        let pairs = (0..old_len)
            .map(|p| (p, n_gens - 1))
            .chain((old_len..n_points).flat_map(move |p| (0..n_gens).map(move |j| (p, j))));
        let mut cached: Option<(usize, BitMat)> = None;
        for (pi, j) in pairs {
            let sch = {
                let lvl = &self.levels[i];
                let p = lvl.points[pi];
                let s = &lvl.gens[j];
                let q = s.apply_bits(p);
                // a tree edge gives the identity
                let qi = lvl.index.get(q) as usize - 1;
                if lvl.parent[qi] == j as u16 && lvl.inv[j].apply_bits(q) == p {
                    continue;
                }
                if cached.as_ref().is_none_or(|(c, _)| *c != pi) {
                    cached = Some((pi, lvl.transversal(p)));
                }
                let u = &cached.as_ref().expect("just set").1;
                let mut m = s.mul_unchecked(u);
                lvl.strip(q, &mut m);
                m
            };
            let (res, _) = self.sift_from(i + 1, sch);
            if !res.is_identity() && self.extend(i + 1, res, stop)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Order of the group generated by `gens`, with its chain.
pub fn bsgs_order(gens: &GenSet, cfg: &BsgsConfig) -> Result<(BigUint, StabilizerChain), GroupError> {
    let chain = StabilizerChain::build(gens, cfg)?;
    Ok((chain.order(), chain))
}

/// `true` iff `m` sifts to the identity.
pub fn membership(m: &BitMat, chain: &StabilizerChain) -> bool {
    chain.contains(m)
}

/// Whether two generating sets generate the same group: every generator of
/// each sifts through the other's chain.
pub fn same_group(a: &GenSet, b: &GenSet, cfg: &BsgsConfig) -> Result<bool, GroupError> {
    Ok(compare_groups(a, b, cfg, false)?.same)
}

/// The data behind a [`same_group`] decision.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub same: bool,
    pub a_in_b: bool,
    pub b_in_a: bool,
    pub order_a: BigUint,
    pub order_b: BigUint,
    /// Whether the orders are exact; otherwise they are lower bounds.
    pub orders_exact: bool,
}

/// Decides `<a> = <b>` by sifting each side's generators through the other
/// side's chain. Sifting to the identity through any partial chain proves
/// membership, so each chain is first grown by [`StabilizerChain::build_fast`]
/// and only completed when that does not settle containment, or when
/// `exact_orders` asks for it. A `false` always comes from a complete chain.
pub fn compare_groups(
    a: &GenSet,
    b: &GenSet,
    cfg: &BsgsConfig,
    exact_orders: bool,
) -> Result<Comparison, GroupError> {
    if a.dim() != b.dim() {
        return Err(GroupError::DimensionMismatch(a.dim(), b.dim()));
    }
    let side = |host: &GenSet, guest: &GenSet| -> Result<(StabilizerChain, bool), GroupError> {
        let chain = if exact_orders {
            StabilizerChain::build(host, cfg)?
        } else {
            let all_in = |c: &StabilizerChain| guest.gens().iter().all(|m| c.contains(m));
            match StabilizerChain::build_fast(host, cfg, &all_in)? {
                Some(c) => c,
                None => StabilizerChain::build_until(host, cfg, &all_in)?,
            }
        };
        let inside = guest.gens().iter().all(|m| chain.contains(m));
        Ok((chain, inside))
    };
    let (cb, a_in_b) = side(b, a)?;
    let (ca, b_in_a) = side(a, b)?;
    Ok(Comparison {
        same: a_in_b && b_in_a,
        a_in_b,
        b_in_a,
        order_a: ca.order(),
        order_b: cb.order(),
        orders_exact: ca.is_complete() && cb.is_complete(),
    })
}
