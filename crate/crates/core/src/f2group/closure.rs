use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use super::{GenSet, GroupError};
use crate::f2linalg::BitMat;

/// Element count of `<gens>` by breadth-first multiplication.
pub fn brute_closure(gens: &GenSet, cap: usize) -> Result<usize, GroupError> {
    let id = BitMat::identity(gens.dim())?;
    let mut seen: HashSet<BitMat> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(m) = queue.pop_front() {
        for s in gens.gens() {
            let n = s.mul(&m)?;
            if !seen.contains(&n) {
                if seen.len() >= cap {
                    return Err(GroupError::ClosureCap(cap));
                }
                seen.insert(n.clone());
                queue.push_back(n);
            }
        }
    }
    Ok(seen.len())
}

/// `|Sp(2h, 2)| = 2^(h^2) prod_{i=1..h} (4^i - 1)` for `g = 2h + 1`, times
/// `2^(2h+1)` for `g = 2h + 2`.
pub fn target_order(g: usize) -> BigUint {
    let h = (g - 1) / 2;
    let mut n = BigUint::from(1u32) << (h * h);
    for i in 1..=h {
        n *= (BigUint::from(1u32) << (2 * i)) - 1u32;
    }
    if g % 2 == 0 {
        n <<= 2 * h + 1;
    }
    n
}
