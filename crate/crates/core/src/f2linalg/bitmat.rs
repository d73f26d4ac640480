use std::fmt;

use super::bitvec::{check_dim, same_dim};
use super::{BitVec, LinalgError};

/// A `g x g` matrix over GF(2) acting on column vectors.
///
/// Stored by images: `images[i]` packs the coordinates of `M x_{i+1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMat {
    dim: usize,
    images: Vec<u64>,
}

impl BitMat {
    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            images: (0..dim).map(|i| 1u64 << i).collect(),
        })
    }

    /// Builds the matrix sending `x_i` to `images[i - 1]`.
    pub fn from_images(images: &[BitVec]) -> Result<Self, LinalgError> {
        let dim = images.len();
        check_dim(dim)?;
        for v in images {
            same_dim(dim, v.dim())?;
        }
        Ok(Self {
            dim,
            images: images.iter().map(BitVec::bits).collect(),
        })
    }

    pub(crate) fn from_raw_images(dim: usize, images: Vec<u64>) -> Self {
        debug_assert_eq!(images.len(), dim);
        Self { dim, images }
    }

    /// The mod-2 Dehn twist action `x -> x + <x, a> a` for a two-sided class.
    pub fn transvection(a: &BitVec) -> Result<Self, LinalgError> {
        if !a.is_two_sided() {
            return Err(LinalgError::OneSided(a.to_string()));
        }
        let dim = a.dim();
        let images = (0..dim)
            .map(|i| {
                let e = 1u64 << i;
                if a.bits() & e != 0 {
                    e ^ a.bits()
                } else {
                    e
                }
            })
            .collect();
        Ok(Self { dim, images })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M x_i` for 1-based `i`.
    pub fn image(&self, i: usize) -> BitVec {
        BitVec::raw(self.dim, self.images[i - 1])
    }

    pub fn images(&self) -> impl Iterator<Item = BitVec> + '_ {
        self.images.iter().map(move |&b| BitVec::raw(self.dim, b))
    }

    pub(crate) fn apply_bits(&self, mut bits: u64) -> u64 {
        let mut out = 0u64;
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            out ^= self.images[t];
            bits &= bits - 1;
        }
        out
    }

    pub fn apply(&self, v: &BitVec) -> Result<BitVec, LinalgError> {
        same_dim(self.dim, v.dim())?;
        Ok(BitVec::raw(self.dim, self.apply_bits(v.bits())))
    }

    /// Composition `self * other`: `other` acts first.
    pub fn mul(&self, other: &BitMat) -> Result<BitMat, LinalgError> {
        same_dim(self.dim, other.dim)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &BitMat) -> BitMat {
        BitMat {
            dim: self.dim,
            images: other.images.iter().map(|&b| self.apply_bits(b)).collect(),
        }
    }

    pub fn transpose(&self) -> BitMat {
        BitMat::from_raw_images(self.dim, self.rows())
    }

    pub(crate) fn raw_images(&self) -> &[u64] {
        &self.images
    }

    pub(crate) fn raw_images_mut(&mut self) -> &mut [u64] {
        &mut self.images
    }

    /// Row-major packing: bit `c` of row `r` is the `(r, c)` entry.
    pub fn rows(&self) -> Vec<u64> {
        let mut rows = vec![0u64; self.dim];
        for (c, &img) in self.images.iter().enumerate() {
            let mut b = img;
            while b != 0 {
                let r = b.trailing_zeros() as usize;
                rows[r] |= 1 << c;
                b &= b - 1;
            }
        }
        rows
    }

    fn from_rows(dim: usize, rows: &[u64]) -> BitMat {
        let mut images = vec![0u64; dim];
        for (r, &row) in rows.iter().enumerate() {
            let mut b = row;
            while b != 0 {
                let c = b.trailing_zeros() as usize;
                images[c] |= 1 << r;
                b &= b - 1;
            }
        }
        BitMat { dim, images }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows();
        let mut rank = 0;
        for col in 0..self.dim {
            let bit = 1u64 << col;
            if let Some(p) = (rank..self.dim).find(|&r| rows[r] & bit != 0) {
                rows.swap(rank, p);
                let pivot = rows[rank];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && *row & bit != 0 {
                        *row ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim
    }

    /// Gauss-Jordan inverse.
    pub fn inv(&self) -> Result<BitMat, LinalgError> {
        let n = self.dim;
        let mut rows = self.rows();
        let mut aug: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for col in 0..n {
            let bit = 1u64 << col;
            let p = (col..n)
                .find(|&r| rows[r] & bit != 0)
                .ok_or(LinalgError::Singular)?;
            rows.swap(col, p);
            aug.swap(col, p);
            let (pr, pa) = (rows[col], aug[col]);
            for r in 0..n {
                if r != col && rows[r] & bit != 0 {
                    rows[r] ^= pr;
                    aug[r] ^= pa;
                }
            }
        }
        Ok(BitMat::from_rows(n, &aug))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Result<BitMat, LinalgError> {
        let mut base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = BitMat::identity(self.dim)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &b)| b == 1u64 << i)
    }

    /// True iff `<M x_i, M x_j> = delta_ij` for every pair of basis classes.
    pub fn preserves_form(&self) -> bool {
        for i in 0..self.dim {
            for j in i..self.dim {
                let pairing = (self.images[i] & self.images[j]).count_ones() % 2 == 1;
                if pairing != (i == j) {
                    return false;
                }
            }
        }
        true
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(&self, other: &BitMat) -> Result<BitMat, LinalgError> {
        let ai = self.inv()?;
        let bi = other.inv()?;
        Ok(self.mul(other)?.mul(&ai)?.mul(&bi)?)
    }

    /// One hex word per row, row-major, most significant column last.
    pub fn hex_rows(&self) -> Vec<String> {
        let width = self.dim.div_ceil(4);
        self.rows()
            .iter()
            .map(|r| format!("{:0width$x}", r, width = width))
            .collect()
    }

    /// Packed images, little-endian, for hashing witnesses.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.dim + 1);
        out.push(self.dim as u8);
        for b in &self.images {
            out.extend_from_slice(&b.to_le_bytes());
        }
        out
    }
}

/// `A * B`.
pub fn mat_mul(a: &BitMat, b: &BitMat) -> Result<BitMat, LinalgError> {
    a.mul(b)
}

pub fn mat_inv(a: &BitMat) -> Result<BitMat, LinalgError> {
    a.inv()
}

pub fn transvection_matrix(a: &BitVec) -> Result<BitMat, LinalgError> {
    BitMat::transvection(a)
}

pub fn preserves_form(m: &BitMat) -> bool {
    m.preserves_form()
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat[{}]", self.dim)?;
        for row in self.rows() {
            let line: String = (0..self.dim)
                .map(|c| if row >> c & 1 == 1 { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(dim: usize, idx: &[usize]) -> BitVec {
        BitVec::from_indices(dim, idx).unwrap()
    }

    #[test]
    fn zero_class_gives_identity() {
        let t = BitMat::transvection(&BitVec::zero(6).unwrap()).unwrap();
        assert!(t.is_identity());
    }

    #[test]
    fn twist_about_adjacent_pair_swaps() {
        let t = BitMat::transvection(&v(4, &[1, 2])).unwrap();
        assert_eq!(t.image(1), v(4, &[2]));
        assert_eq!(t.image(2), v(4, &[1]));
        assert_eq!(t.image(3), v(4, &[3]));
        assert_eq!(t.image(4), v(4, &[4]));
    }

    #[test]
    fn one_sided_class_rejected() {
        let err = BitMat::transvection(&v(5, &[1, 2, 3])).unwrap_err();
        assert!(matches!(err, LinalgError::OneSided(_)));
        assert_eq!(
            err.to_string(),
            "one-sided class has no Dehn twist: x1+x2+x3"
        );
    }

    #[test]
    fn twist_fixes_its_own_class() {
        let a = v(7, &[2, 3, 5, 7]);
        let t = BitMat::transvection(&a).unwrap();
        assert_eq!(t.apply(&a).unwrap(), a);
    }

    #[test]
    fn twist_is_an_involution() {
        let a = v(9, &[1, 4, 5, 9]);
        let t = BitMat::transvection(&a).unwrap();
        assert_eq!(t.inv().unwrap(), t);
        assert!(t.mul(&t).unwrap().is_identity());
    }

    #[test]
    fn non_isometry_detected() {
        // x1 -> x1 + x2, x2 -> x2
        let m = BitMat::from_images(&[v(2, &[1, 2]), v(2, &[2])]).unwrap();
        assert!(m.is_invertible());
        assert!(!m.preserves_form());
    }

    #[test]
    fn singular_inverse_is_an_error() {
        let m = BitMat::from_images(&[v(3, &[1, 2]), v(3, &[1, 2]), v(3, &[3])]).unwrap();
        assert_eq!(m.inv().unwrap_err(), LinalgError::Singular);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn identity_is_neutral() {
        let a = BitMat::from_images(&[v(3, &[2]), v(3, &[1, 3]), v(3, &[3])]).unwrap();
        let id = BitMat::identity(3).unwrap();
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&id).unwrap(), a);
    }

    #[test]
    fn negative_powers() {
        let cyc = BitMat::from_images(&[v(3, &[2]), v(3, &[3]), v(3, &[1])]).unwrap();
        assert!(cyc.pow(3).unwrap().is_identity());
        assert_eq!(cyc.pow(-1).unwrap(), cyc.pow(2).unwrap());
        assert!(cyc.pow(0).unwrap().is_identity());
    }

    #[test]
    fn hex_rows_layout() {
        let cyc = BitMat::from_images(&[v(3, &[2]), v(3, &[3]), v(3, &[1])]).unwrap();
        // row 1 has the entry in column 3 (x3 -> x1)
        assert_eq!(cyc.hex_rows(), vec!["4", "1", "2"]);
    }
}
