//! Linear algebra over GF(2) for the mod-2 homology action, plus signed
//! permutation matrices for determinant checks over the integers.
//!
//! Vectors and matrices pack one crosscap class per bit of a `u64`, so the
//! ambient genus is capped at [`MAX_DIM`]. Matrices act on column vectors and
//! compose functionally: in `a.mul(&b)` the factor `b` acts first.
//!
//! The determinant homomorphism lives on `H_1(N_g; R)`, which has rank
//! `g - 1`. It is realised here as the quotient `R^g / span(w)` with
//! `w = x_1 + ... + x_g`; see [`quotient_det`].

mod bitmat;
mod bitvec;
mod signed;

use thiserror::Error;

pub use bitmat::{mat_inv, mat_mul, preserves_form, transvection_matrix, BitMat};
pub use bitvec::{dot_form, BitVec, MAX_DIM};
pub use signed::{int_det, quotient_det, SignedPermMat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported dimension {0} (must be 1..=64)")]
    UnsupportedDim(usize),
    #[error("index x{index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("malformed class `{0}`")]
    BadClass(String),
    #[error("one-sided class has no Dehn twist: {0}")]
    OneSided(String),
    #[error("matrix is singular")]
    Singular,
    #[error("not a signed permutation matrix")]
    NotAPermutation,
    #[error("does not descend to H1(N;R): w is not an eigenvector")]
    NotDescending,
}

/// The standard mod-2 intersection pairing on `Z_2^g`, `<x_i, x_j> = delta_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormSpec {
    pub dim: usize,
}

impl FormSpec {
    pub fn new(dim: usize) -> Result<Self, LinalgError> {
        BitVec::zero(dim)?;
        Ok(Self { dim })
    }

    pub fn pair(&self, u: &BitVec, v: &BitVec) -> Result<bool, LinalgError> {
        bitvec::same_dim(self.dim, u.dim())?;
        u.dot(v)
    }

    pub fn preserved_by(&self, m: &BitMat) -> bool {
        m.dim() == self.dim && m.preserves_form()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn even_vec(dim: usize) -> impl Strategy<Value = BitVec> {
        (0u64..(1u64 << dim)).prop_map(move |b| {
            let b = if b.count_ones() % 2 == 1 { b ^ 1 } else { b };
            BitVec::from_bits(dim, b).unwrap()
        })
    }

    /// Product of random transvections: always an isometry.
    fn isometry(dim: usize) -> impl Strategy<Value = BitMat> {
        prop::collection::vec(even_vec(dim), 0..12).prop_map(move |vs| {
            vs.iter().fold(BitMat::identity(dim).unwrap(), |m, a| {
                m.mul(&BitMat::transvection(a).unwrap()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn transvections_are_involutive_isometries(a in even_vec(11)) {
            let t = BitMat::transvection(&a).unwrap();
            prop_assert!(t.mul(&t).unwrap().is_identity());
            prop_assert!(t.preserves_form());
        }

        #[test]
        fn conjugating_a_twist_moves_its_class(m in isometry(9), a in even_vec(9)) {
            let lhs = m
                .mul(&BitMat::transvection(&a).unwrap()).unwrap()
                .mul(&m.inv().unwrap()).unwrap();
            let rhs = BitMat::transvection(&m.apply(&a).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn isometries_fix_the_characteristic_class(m in isometry(8)) {
            let w = BitVec::all_ones(8).unwrap();
            prop_assert_eq!(m.apply(&w).unwrap(), w);
        }
    }

    fn random_invertible(rng: &mut ChaCha8Rng, dim: usize) -> BitMat {
        loop {
            let images: Vec<BitVec> = (0..dim)
                .map(|_| {
                    let bits = rng.gen::<u64>() & bitvec::mask(dim);
                    BitVec::from_bits(dim, bits).unwrap()
                })
                .collect();
            let m = BitMat::from_images(&images).unwrap();
            if m.is_invertible() {
                return m;
            }
        }
    }

    #[test]
    fn inverse_is_two_sided_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7715);
        for dim in [1, 2, 5, 13, 31, 64] {
            for _ in 0..100 {
                let a = random_invertible(&mut rng, dim);
                let ai = a.inv().unwrap();
                assert!(a.mul(&ai).unwrap().is_identity());
                assert!(ai.mul(&a).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn inverse_agrees_with_solving_each_column() {
        // Oracle: solve A y = e_j by brute force over all 2^6 candidates.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_invertible(&mut rng, 6);
            let ai = a.inv().unwrap();
            for j in 1..=6 {
                let e = BitVec::basis(6, j).unwrap();
                let y = (0..64u64)
                    .map(|b| BitVec::from_bits(6, b).unwrap())
                    .find(|y| a.apply(y).unwrap() == e)
                    .unwrap();
                assert_eq!(ai.image(j), y);
            }
        }
    }

    #[test]
    fn form_spec_pairs_and_checks() {
        let f = FormSpec::new(4).unwrap();
        let a = BitVec::from_indices(4, &[1, 2]).unwrap();
        assert!(f.preserved_by(&BitMat::transvection(&a).unwrap()));
        assert!(!f.pair(&a, &a).unwrap());
        assert!(f.pair(&a, &BitVec::from_indices(5, &[1]).unwrap()).is_err());
    }
}
