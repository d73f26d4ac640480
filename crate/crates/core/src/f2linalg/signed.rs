use std::fmt;

use super::bitvec::{check_dim, same_dim};
use super::{BitMat, LinalgError};

/// A signed permutation matrix: `x_i -> signs[i] * x_{perm[i]}`.
///
/// Indices are stored 0-based; the public constructors take 1-based images.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedPermMat {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermMat {
    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self {
            perm: (0..dim).collect(),
            signs: vec![1; dim],
        })
    }

    /// `images[i - 1] = j` means `x_i -> signs[i - 1] * x_j` (1-based `j`).
    pub fn new(images: &[usize], signs: &[i8]) -> Result<Self, LinalgError> {
        let dim = images.len();
        check_dim(dim)?;
        same_dim(dim, signs.len())?;
        let mut seen = vec![false; dim];
        let mut perm = Vec::with_capacity(dim);
        for &j in images {
            if j == 0 || j > dim || seen[j - 1] {
                return Err(LinalgError::NotAPermutation);
            }
            seen[j - 1] = true;
            perm.push(j - 1);
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(LinalgError::NotAPermutation);
        }
        Ok(Self {
            perm,
            signs: signs.to_vec(),
        })
    }

    /// Unsigned permutation matrix.
    pub fn permutation(images: &[usize]) -> Result<Self, LinalgError> {
        Self::new(images, &vec![1; images.len()])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// 1-based image index of `x_i`.
    pub fn image_index(&self, i: usize) -> usize {
        self.perm[i - 1] + 1
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i - 1]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Composition `self * other`; `other` acts first.
    pub fn mul(&self, other: &SignedPermMat) -> Result<SignedPermMat, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        let mut perm = Vec::with_capacity(self.dim());
        let mut signs = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let mid = other.perm[i];
            perm.push(self.perm[mid]);
            signs.push(other.signs[i] * self.signs[mid]);
        }
        Ok(SignedPermMat { perm, signs })
    }

    pub fn inv(&self) -> SignedPermMat {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermMat { perm, signs }
    }

    pub fn pow(&self, exp: i64) -> SignedPermMat {
        let base = if exp < 0 { self.inv() } else { self.clone() };
        let mut acc = SignedPermMat {
            perm: (0..self.dim()).collect(),
            signs: vec![1; self.dim()],
        };
        for _ in 0..exp.unsigned_abs() {
            acc = base.mul(&acc).expect("same dimension");
        }
        acc
    }

    pub fn neg(&self) -> SignedPermMat {
        SignedPermMat {
            perm: self.perm.clone(),
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    /// Sign of the underlying permutation, `(-1)^(n - cycles)`.
    pub fn perm_sign(&self) -> i64 {
        let n = self.dim();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
            }
        }
        if (n - cycles) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Reduction mod 2 (signs vanish).
    pub fn to_mod2(&self) -> BitMat {
        let images = self.perm.iter().map(|&p| 1u64 << p).collect();
        BitMat::from_raw_images(self.dim(), images)
    }

    /// Eigenvalue on `w = x_1 + ... + x_g`, if `w` is an eigenvector.
    pub fn eigenvalue_on_w(&self) -> Option<i64> {
        let first = self.signs[0];
        if self.signs.iter().all(|&s| s == first) {
            Some(first as i64)
        } else {
            None
        }
    }
}

/// Determinant as an integer matrix: permutation sign times the product of signs.
pub fn int_det(p: &SignedPermMat) -> i64 {
    let prod: i64 = p.signs.iter().map(|&s| s as i64).product();
    p.perm_sign() * prod
}

/// Determinant of the map induced on `R^g / span(w)`.
pub fn quotient_det(p: &SignedPermMat) -> Result<i64, LinalgError> {
    let lambda = p.eigenvalue_on_w().ok_or(LinalgError::NotDescending)?;
    // lambda is +-1, so dividing by it is multiplying by it
    Ok(int_det(p) * lambda)
}

impl fmt::Debug for SignedPermMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.dim())
            .map(|i| {
                let s = if self.signs[i] < 0 { "-" } else { "" };
                format!("x{}->{}x{}", i + 1, s, self.perm[i] + 1)
            })
            .collect();
        write!(f, "SignedPerm[{}]", parts.join(", "))
    }
}
