//! Tensor-factor bookkeeping: which subsystem has which dimension, which
//! party (A or B) holds it, and the index arithmetic that follows.
//!
//! Composite indices use the row-major Kronecker convention: the FIRST
//! factor varies slowest. All index arithmetic in the crate derives from
//! [`SubsystemLayout::strides`].

use serde::{Deserialize, Serialize};

use crate::error::{BekError, Result};

/// The two parties of the bipartite cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Ordered list of tensor factors, each a (dimension, party) pair.
///
/// The product of the factor dimensions is the total dimension every
/// `Ket`/`Operator` carrying this layout must have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemLayout {
    factors: Vec<(usize, Party)>,
}

impl SubsystemLayout {
    pub fn new(factors: Vec<(usize, Party)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(BekError::EmptyLayout);
        }
        if factors.iter().any(|&(d, _)| d == 0) {
            return Err(BekError::ZeroFactorDim);
        }
        Ok(Self { factors })
    }

    /// The 3 (x) 3 layout [(3, A), (3, B)] used by every single-copy state here.
    pub fn two_qutrits() -> Self {
        Self {
            factors: vec![(3, Party::A), (3, Party::B)],
        }
    }

    pub fn factors(&self) -> &[(usize, Party)] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self, factor: usize) -> usize {
        self.factors[factor].0
    }

    pub fn party(&self, factor: usize) -> Party {
        self.factors[factor].1
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|&(d, _)| d).product()
    }

    /// Concatenation: the layout of a tensor product.
    pub fn concat(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { factors }
    }

    /// Row-major strides: `strides[k]` is the index step of factor `k`.
    /// The first factor varies slowest.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.factors.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].0;
        }
        strides
    }

    /// Composite index of the given per-factor digits.
    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        self.strides().iter().zip(digits).map(|(s, d)| s * d).sum()
    }

    /// Per-factor digits of a composite index.
    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.factors.len()];
        for (k, s) in self.strides().iter().enumerate() {
            digits[k] = index / s;
            index %= s;
        }
        digits
    }

    /// Checks `perm` is a bijection on factor indices.
    pub fn validate_permutation(&self, perm: &[usize]) -> Result<()> {
        let n = self.factors.len();
        if perm.len() != n {
            return Err(BekError::InvalidPermutation {
                expected: n,
                detail: format!("length {}", perm.len()),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n {
                return Err(BekError::InvalidPermutation {
                    expected: n,
                    detail: format!("index {p} out of range"),
                });
            }
            if seen[p] {
                return Err(BekError::InvalidPermutation {
                    expected: n,
                    detail: format!("index {p} repeated"),
                });
            }
            seen[p] = true;
        }
        Ok(())
    }

    /// Layout with factors reordered: new factor `k` is old factor `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        self.validate_permutation(perm)?;
        Ok(Self {
            factors: perm.iter().map(|&p| self.factors[p]).collect(),
        })
    }

    pub fn has_party(&self, party: Party) -> bool {
        self.factors.iter().any(|&(_, p)| p == party)
    }

    /// Indices of the factors belonging to `party`, in layout order.
    pub fn party_indices(&self, party: Party) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &(_, p))| p == party)
            .map(|(k, _)| k)
            .collect()
    }

    /// Product of the dimensions held by `party`.
    pub fn party_dim(&self, party: Party) -> usize {
        self.factors
            .iter()
            .filter(|&&(_, p)| p == party)
            .map(|&(d, _)| d)
            .product()
    }

    /// Permutation bringing all A factors (in order) before all B factors
    /// (in order). Errors if either party is absent, since the A|B cut is
    /// then undefined.
    pub fn party_block_permutation(&self) -> Result<Vec<usize>> {
        if !self.has_party(Party::A) {
            return Err(BekError::SingleParty(Party::A));
        }
        if !self.has_party(Party::B) {
            return Err(BekError::SingleParty(Party::B));
        }
        let mut perm = self.party_indices(Party::A);
        perm.extend(self.party_indices(Party::B));
        Ok(perm)
    }
}

/// Inverse of a permutation already known to be valid.
pub(crate) fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}
