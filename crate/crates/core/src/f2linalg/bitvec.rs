use std::fmt;

use super::LinalgError;

/// Largest ambient dimension supported by the packed representation.
pub const MAX_DIM: usize = 64;

/// A vector in `Z_2^g`, one bit per crosscap class.
///
/// Bit `i - 1` of `bits` is the coefficient of `x_i`. Bits at or above `dim`
/// are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    dim: usize,
    bits: u64,
}

pub(crate) fn mask(dim: usize) -> u64 {
    if dim == 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<(), LinalgError> {
    if dim == 0 || dim > MAX_DIM {
        return Err(LinalgError::UnsupportedDim(dim));
    }
    Ok(())
}

impl BitVec {
    pub fn zero(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self { dim, bits: 0 })
    }

    /// The basis class `x_i` (1-based).
    pub fn basis(dim: usize, i: usize) -> Result<Self, LinalgError> {
        Self::from_indices(dim, &[i])
    }

    /// Sum of the basis classes with the given 1-based indices. Repeated
    /// indices cancel.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        let mut bits = 0u64;
        for &i in indices {
            if i == 0 || i > dim {
                return Err(LinalgError::IndexOutOfRange { index: i, dim });
            }
            bits ^= 1 << (i - 1);
        }
        Ok(Self { dim, bits })
    }

    /// Builds a vector from raw packed bits; high bits beyond `dim` are rejected.
    pub fn from_bits(dim: usize, bits: u64) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        if bits & !mask(dim) != 0 {
            return Err(LinalgError::IndexOutOfRange {
                index: 64 - bits.leading_zeros() as usize,
                dim,
            });
        }
        Ok(Self { dim, bits })
    }

    pub(crate) fn raw(dim: usize, bits: u64) -> Self {
        debug_assert!(bits & !mask(dim) == 0);
        Self { dim, bits }
    }

    /// The all-ones vector `w = x_1 + ... + x_g`.
    pub fn all_ones(dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        Ok(Self { dim, bits: mask(dim) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Two-sided classes are exactly the ones of even weight.
    pub fn is_two_sided(&self) -> bool {
        self.weight() % 2 == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i >= 1 && i <= self.dim && (self.bits >> (i - 1)) & 1 == 1
    }

    /// 1-based indices of the nonzero coefficients, ascending.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        let mut b = self.bits;
        while b != 0 {
            let t = b.trailing_zeros() as usize;
            out.push(t + 1);
            b &= b - 1;
        }
        out
    }

    pub fn add(&self, other: &BitVec) -> Result<BitVec, LinalgError> {
        same_dim(self.dim, other.dim)?;
        Ok(Self::raw(self.dim, self.bits ^ other.bits))
    }

    /// The mod-2 intersection pairing `<u, v> = sum u_i v_i`.
    pub fn dot(&self, other: &BitVec) -> Result<bool, LinalgError> {
        same_dim(self.dim, other.dim)?;
        Ok((self.bits & other.bits).count_ones() % 2 == 1)
    }

    /// Parses `x1+x3+x4` (or `0`) as a class in dimension `dim`.
    pub fn parse(dim: usize, text: &str) -> Result<BitVec, LinalgError> {
        let text = text.trim();
        if text == "0" {
            return Self::zero(dim);
        }
        let mut indices = Vec::new();
        for term in text.split('+') {
            let term = term.trim();
            let idx = term
                .strip_prefix('x')
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| LinalgError::BadClass(text.to_string()))?;
            indices.push(idx);
        }
        Self::from_indices(dim, &indices)
    }
}

/// Free-function form of [`BitVec::dot`].
pub fn dot_form(u: &BitVec, v: &BitVec) -> Result<bool, LinalgError> {
    u.dot(v)
}

pub(crate) fn same_dim(a: usize, b: usize) -> Result<(), LinalgError> {
    if a != b {
        return Err(LinalgError::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("x{i}")).collect();
        f.write_str(&parts.join("+"))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(dim: usize, idx: &[usize]) -> BitVec {
        BitVec::from_indices(dim, idx).unwrap()
    }

    #[test]
    fn basis_self_pairing() {
        assert!(v(4, &[1]).dot(&v(4, &[1])).unwrap());
    }

    #[test]
    fn single_shared_index_pairs_to_one() {
        assert!(v(4, &[1, 2]).dot(&v(4, &[2, 3])).unwrap());
    }

    #[test]
    fn diagonal_form_is_weight_parity() {
        for bits in 0..(1u64 << 7) {
            let x = BitVec::from_bits(7, bits).unwrap();
            assert_eq!(x.dot(&x).unwrap(), x.weight() % 2 == 1);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = v(4, &[1]).dot(&v(5, &[1])).unwrap_err();
        assert_eq!(err, LinalgError::DimensionMismatch { left: 4, right: 5 });
    }

    #[test]
    fn parse_and_display() {
        let x = BitVec::parse(9, "x1+x2+x9").unwrap();
        assert_eq!(x.indices(), vec![1, 2, 9]);
        assert_eq!(x.to_string(), "x1+x2+x9");
        assert!(BitVec::parse(9, "x10").is_err());
        assert!(BitVec::parse(9, "y1").is_err());
        assert_eq!(BitVec::parse(9, "0").unwrap().weight(), 0);
    }

    #[test]
    fn repeated_indices_cancel() {
        assert!(v(5, &[2, 2]).is_zero());
    }

    #[test]
    fn full_width_dimension() {
        let w = BitVec::all_ones(64).unwrap();
        assert_eq!(w.weight(), 64);
        assert!(BitVec::zero(65).is_err());
        assert!(BitVec::zero(0).is_err());
    }
}
