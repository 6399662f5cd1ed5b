//! Subsystem-aware dense complex vectors and square operators: tensor
//! products, factor permutation, partial transpose, partial trace, and
//! Hermitian eigensolving.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{BekError, Result};
use crate::layout::{Party, SubsystemLayout};
use crate::{TOL_HERM, TOL_PSD, TOL_TRACE};

/// A complex vector with a subsystem layout. The norm is not constrained;
/// witness vectors are deliberately unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    layout: SubsystemLayout,
    amps: DVector<Complex64>,
}

impl Ket {
    pub fn new(layout: SubsystemLayout, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(BekError::DimensionMismatch {
                expected: layout.total_dim(),
                actual: amps.len(),
            });
        }
        Ok(Self { layout, amps })
    }

    pub fn zero(layout: SubsystemLayout) -> Self {
        let dim = layout.total_dim();
        Self {
            layout,
            amps: DVector::zeros(dim),
        }
    }

    /// Computational-basis state |digits[0], digits[1], ...>.
    pub fn basis_state(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.num_factors()
            || digits.iter().enumerate().any(|(k, &d)| d >= layout.dim(k))
        {
            return Err(BekError::DimensionMismatch {
                expected: layout.num_factors(),
                actual: digits.len(),
            });
        }
        let index = layout.encode(digits);
        let mut ket = Self::zero(layout);
        ket.amps[index] = Complex64::new(1.0, 0.0);
        Ok(ket)
    }

    pub fn from_real(layout: SubsystemLayout, amps: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(layout, v)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Same amplitudes under a different layout of equal total dimension.
    pub fn relabeled(&self, layout: SubsystemLayout) -> Result<Self> {
        Self::new(layout, self.amps.clone())
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(BekError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            amps: &self.amps * Complex64::new(s, 0.0),
        }
    }

    pub fn scaled_c(&self, s: Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            amps: &self.amps * s,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(BekError::ZeroVector);
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Tensor product; layouts concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            layout: self.layout.concat(&other.layout),
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// |self><self| as an operator.
    pub fn outer(&self) -> Operator {
        Operator {
            layout: self.layout.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Reorders tensor factors: new factor `k` is old factor `perm[k]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let new_layout = self.layout.permuted(perm)?;
        let map = index_map(&self.layout, perm);
        let mut amps = DVector::zeros(self.amps.len());
        for (new_idx, &old_idx) in map.iter().enumerate() {
            amps[new_idx] = self.amps[old_idx];
        }
        Ok(Self {
            layout: new_layout,
            amps,
        })
    }
}

impl std::ops::Add for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        assert_eq!(
            self.layout, rhs.layout,
            "ket addition requires equal layouts"
        );
        Ket {
            layout: self.layout.clone(),
            amps: &self.amps + &rhs.amps,
        }
    }
}

impl std::ops::Sub for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        assert_eq!(
            self.layout, rhs.layout,
            "ket subtraction requires equal layouts"
        );
        Ket {
            layout: self.layout.clone(),
            amps: &self.amps - &rhs.amps,
        }
    }
}

/// A square complex matrix with a subsystem layout, the carrier for both
/// states and operators acting on them.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: SubsystemLayout,
    mat: DMatrix<Complex64>,
}

/// For each composite index of the permuted layout, the corresponding
/// composite index of the original layout.
fn index_map(layout: &SubsystemLayout, perm: &[usize]) -> Vec<usize> {
    let new_layout = layout
        .permuted(perm)
        .expect("permutation validated by caller");
    let old_strides = layout.strides();
    let dim = layout.total_dim();
    let mut map = vec![0usize; dim];
    for (new_idx, entry) in map.iter_mut().enumerate() {
        let digits = new_layout.decode(new_idx);
        let mut old_idx = 0usize;
        for (k, &d) in digits.iter().enumerate() {
            old_idx += d * old_strides[perm[k]];
        }
        *entry = old_idx;
    }
    map
}

impl Operator {
    pub fn new(layout: SubsystemLayout, mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(BekError::NonSquareMatrix {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() != layout.total_dim() {
            return Err(BekError::DimensionMismatch {
                expected: layout.total_dim(),
                actual: mat.nrows(),
            });
        }
        Ok(Self { layout, mat })
    }

    pub fn identity(layout: SubsystemLayout) -> Self {
        let dim = layout.total_dim();
        Self {
            layout,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(layout: SubsystemLayout) -> Self {
        let dim = layout.total_dim();
        Self {
            layout,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn mat(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            mat: &self.mat * Complex64::new(s, 0.0),
        }
    }

    /// Same matrix under a different layout of equal total dimension.
    pub fn relabeled(&self, layout: SubsystemLayout) -> Result<Self> {
        Self::new(layout, self.mat.clone())
    }

    /// Max-entry |X - X^dag|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > TOL_HERM {
            return Err(BekError::NotHermitian { deviation: dev });
        }
        Ok(())
    }

    /// Checks the three density-matrix requirements: Hermiticity, unit
    /// trace, and positive semidefiniteness, at the crate tolerances.
    pub fn ensure_density(&self) -> Result<()> {
        self.ensure_hermitian()?;
        let tr = self.trace();
        let deviation = (tr - Complex64::new(1.0, 0.0)).norm();
        if deviation > TOL_TRACE {
            return Err(BekError::TraceNotUnit { deviation });
        }
        let min_eig = self.eigvalsh()?[0];
        if min_eig < -TOL_PSD {
            return Err(BekError::NotPositive { min_eig });
        }
        Ok(())
    }

    /// Kronecker product; layouts concatenate in factor order.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            layout: self.layout.concat(&other.layout),
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Reorders tensor factors: new factor `k` is old factor `perm[k]`.
    /// A pure entry permutation; composing with the inverse permutation
    /// restores the input bit-exactly.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let new_layout = self.layout.permuted(perm)?;
        let map = index_map(&self.layout, perm);
        let n = self.dim();
        let mut mat = DMatrix::zeros(n, n);
        for new_c in 0..n {
            let old_c = map[new_c];
            for new_r in 0..n {
                mat[(new_r, new_c)] = self.mat[(map[new_r], old_c)];
            }
        }
        Ok(Self {
            layout: new_layout,
            mat,
        })
    }

    /// Permutes all A factors (stable) before all B factors. Returns the
    /// realigned operator together with the permutation used, so callers
    /// can map results back.
    pub fn to_party_blocks(&self) -> Result<(Self, Vec<usize>)> {
        let perm = self.layout.party_block_permutation()?;
        Ok((self.permute_subsystems(&perm)?, perm))
    }

    /// Transposes the matrix indices of the chosen factors only. The empty
    /// subset is the identity map; the full subset is the ordinary
    /// transpose. Involutive and trace-preserving by construction.
    pub fn partial_transpose(&self, subset: &[usize]) -> Result<Self> {
        let n_factors = self.layout.num_factors();
        for &k in subset {
            if k >= n_factors {
                return Err(BekError::FactorIndexOutOfRange {
                    index: k,
                    count: n_factors,
                });
            }
        }
        let strides = self.layout.strides();
        let dim = self.dim();
        // digit_table[k][idx]: digit of factor k in composite index idx
        let digit_table: Vec<Vec<usize>> = (0..n_factors)
            .map(|k| {
                (0..dim)
                    .map(|idx| (idx / strides[k]) % self.layout.dim(k))
                    .collect()
            })
            .collect();
        let mut mat = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            for r in 0..dim {
                let mut r_out = r;
                let mut c_out = c;
                for &k in subset {
                    let (rd, cd) = (digit_table[k][r], digit_table[k][c]);
                    // swap the factor-k digit between row and column
                    r_out = r_out + cd * strides[k] - rd * strides[k];
                    c_out = c_out + rd * strides[k] - cd * strides[k];
                }
                mat[(r_out, c_out)] = self.mat[(r, c)];
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            mat,
        })
    }

    /// Partial transpose over every factor held by `party`.
    pub fn partial_transpose_party(&self, party: Party) -> Self {
        let subset = self.layout.party_indices(party);
        self.partial_transpose(&subset)
            .expect("party indices are always in range")
    }

    /// Traces out the chosen factors; the result keeps the remaining
    /// factors in their original order. Tracing out everything is
    /// rejected; use `trace` for that.
    pub fn partial_trace(&self, subset: &[usize]) -> Result<Self> {
        let n_factors = self.layout.num_factors();
        for &k in subset {
            if k >= n_factors {
                return Err(BekError::FactorIndexOutOfRange {
                    index: k,
                    count: n_factors,
                });
            }
        }
        let traced: Vec<bool> = {
            let mut t = vec![false; n_factors];
            for &k in subset {
                t[k] = true;
            }
            t
        };
        if traced.iter().all(|&t| t) {
            return Err(BekError::TraceAllFactors);
        }
        let kept: Vec<usize> = (0..n_factors).filter(|&k| !traced[k]).collect();
        let kept_layout =
            SubsystemLayout::new(kept.iter().map(|&k| self.layout.factors()[k]).collect())?;
        let traced_dims: Vec<usize> = subset.iter().map(|&k| self.layout.dim(k)).collect();
        let traced_dim: usize = traced_dims.iter().product();
        let strides = self.layout.strides();

        // Composite-index embeddings of the kept and traced digit groups.
        let kept_dim = kept_layout.total_dim();
        let embed_kept: Vec<usize> = (0..kept_dim)
            .map(|idx| {
                let digits = kept_layout.decode(idx);
                digits
                    .iter()
                    .zip(&kept)
                    .map(|(&d, &k)| d * strides[k])
                    .sum()
            })
            .collect();
        let embed_traced: Vec<usize> = (0..traced_dim)
            .map(|mut idx| {
                let mut offset = 0usize;
                for (pos, &k) in subset.iter().enumerate().rev() {
                    let d = idx % traced_dims[pos];
                    idx /= traced_dims[pos];
                    offset += d * strides[k];
                }
                offset
            })
            .collect();

        let mut mat = DMatrix::zeros(kept_dim, kept_dim);
        for ck in 0..kept_dim {
            for rk in 0..kept_dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for &t in &embed_traced {
                    sum += self.mat[(embed_kept[rk] + t, embed_kept[ck] + t)];
                }
                mat[(rk, ck)] = sum;
            }
        }
        Ok(Self {
            layout: kept_layout,
            mat,
        })
    }

    /// Traces out every factor held by `party`.
    pub fn partial_trace_party(&self, party: Party) -> Result<Self> {
        self.partial_trace(&self.layout.party_indices(party))
    }

    /// Ascending eigenvalues of a Hermitian operator.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        self.ensure_hermitian()?;
        let eig = hermitian_eigen(&self.mat);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        Ok(vals)
    }

    /// Smallest eigenvalue and a unit-norm eigenvector of a Hermitian
    /// operator.
    pub fn min_eigpair(&self) -> Result<(f64, Ket)> {
        self.ensure_hermitian()?;
        let (min_val, v) = hermitian_min_pair(&self.mat);
        Ok((min_val, Ket::new(self.layout.clone(), v)?))
    }

    /// True iff the smallest eigenvalue is >= -tol.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.eigvalsh()?[0] >= -tol)
    }

    /// M |psi>.
    pub fn apply(&self, psi: &Ket) -> Result<Ket> {
        if psi.dim() != self.dim() {
            return Err(BekError::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ket::new(self.layout.clone(), &self.mat * psi.amps())
    }

    /// <left| M |right>.
    pub fn matrix_element(&self, left: &Ket, right: &Ket) -> Result<Complex64> {
        if left.dim() != self.dim() || right.dim() != self.dim() {
            return Err(BekError::DimensionMismatch {
                expected: self.dim(),
                actual: left.dim().max(right.dim()),
            });
        }
        Ok(left.amps().dotc(&(&self.mat * right.amps())))
    }

    /// <psi| M |psi>.
    pub fn quadratic_form(&self, psi: &Ket) -> Result<Complex64> {
        if psi.dim() != self.dim() {
            return Err(BekError::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(psi.amps().dotc(&(&self.mat * psi.amps())))
    }

    /// Max-entry |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "operator dimensions must match");
        let mut dev: f64 = 0.0;
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            dev = dev.max((a - b).norm());
        }
        dev
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.layout, rhs.layout,
            "operator addition requires equal layouts"
        );
        Operator {
            layout: self.layout.clone(),
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.layout, rhs.layout,
            "operator subtraction requires equal layouts"
        );
        Operator {
            layout: self.layout.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }
}

fn hermitian_eigen(mat: &DMatrix<Complex64>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    // Symmetrize first so accumulated round-off below TOL_HERM cannot leak
    // imaginary parts into the eigenvalues.
    let sym = (mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym)
}

/// Smallest eigenpair of a raw Hermitian matrix, for internal callers
/// that work outside the `Operator` layout wrapper. The matrix is
/// symmetrized; the eigenvector comes back unit-norm.
pub(crate) fn hermitian_min_pair(mat: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let eig = hermitian_eigen(mat);
    let (argmin, &min_val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .expect("nonempty spectrum");
    let v = eig.eigenvectors.column(argmin).into_owned();
    let norm = v.norm();
    (min_val, v / Complex64::new(norm, 0.0))
}
