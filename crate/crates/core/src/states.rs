//! Constructors for the concrete states and operators under study: the
//! qutrit Werner family and its parameter maps, the swap operator, the
//! maximally entangled state, the pentagon product basis with its
//! complement state, flagged mixtures, and tensor powers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{BekError, Result};
use crate::layout::{Party, SubsystemLayout};
use crate::operator::{Ket, Operator};

/// Hard cap on the total Hilbert-space dimension of constructed operators.
pub const DIM_CAP: usize = 1024;

fn two_qutrits() -> SubsystemLayout {
    SubsystemLayout::two_qutrits()
}

/// The swap operator on 3x3: H|i,j> = |j,i>. Hermitian, involutive,
/// trace 3 (one fixed point per diagonal pair).
pub fn swap_operator() -> Operator {
    let layout = two_qutrits();
    let mut mat = DMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            let row = layout.encode(&[j, i]);
            let col = layout.encode(&[i, j]);
            mat[(row, col)] = Complex64::new(1.0, 0.0);
        }
    }
    Operator::new(layout, mat).expect("swap operator is 9x9 on a 9-dim layout")
}

/// The qutrit Werner state
///
///   rho_W(lambda) = (lambda*I - ((lambda+1)/3)*H) / (8*lambda - 1),
///
/// with eigenvalue (2l-1)/(3(8l-1)) on the 6-dim symmetric subspace and
/// (4l+1)/(3(8l-1)) on the 3-dim antisymmetric subspace. Rejected below
/// lambda = 1/2 where the construction stops being positive semidefinite.
pub fn werner(lambda: f64) -> Result<Operator> {
    let norm = 8.0 * lambda - 1.0;
    if norm.abs() < f64::EPSILON {
        return Err(BekError::SingularWernerNormalization { lambda });
    }
    if lambda < 0.5 {
        return Err(BekError::WernerLambdaBelowHalf { lambda });
    }
    let h = swap_operator();
    let id = DMatrix::<Complex64>::identity(9, 9);
    let mat = (id * Complex64::new(lambda, 0.0)
        - h.mat() * Complex64::new((lambda + 1.0) / 3.0, 0.0))
        / Complex64::new(norm, 0.0);
    Operator::new(two_qutrits(), mat)
}

/// Converts the mixing parameter b in (1/6, 1/5] to the Werner parameter
/// lambda = (b + 1/3)/(8b - 4/3), which covers lambda in [2, infinity).
pub fn lambda_from_b(b: f64) -> Result<f64> {
    if !(b > 1.0 / 6.0 && b <= 0.2) {
        return Err(BekError::BOutOfRange { b });
    }
    Ok((b + 1.0 / 3.0) / (8.0 * b - 4.0 / 3.0))
}

/// Inverse of [`lambda_from_b`]: b = (4*lambda + 1)/(3(8*lambda - 1)),
/// defined for lambda >= 2.
pub fn b_from_lambda(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 2.0 {
        return Err(BekError::LambdaOutOfRange { lambda });
    }
    Ok((4.0 * lambda + 1.0) / (3.0 * (8.0 * lambda - 1.0)))
}

/// The maximally entangled two-qutrit state (1/sqrt(3)) * sum_i |i,i>.
pub fn max_entangled() -> Ket {
    let layout = two_qutrits();
    let c = Complex64::new(1.0 / 3.0_f64.sqrt(), 0.0);
    let mut amps = DVector::zeros(9);
    for i in 0..3 {
        amps[layout.encode(&[i, i])] = c;
    }
    Ket::new(layout, amps).expect("9 amplitudes on a 9-dim layout")
}

/// The five pentagon vectors |v_i> = N(cos(2*pi*i/5), sin(2*pi*i/5), h)
/// together with the five product vectors |v_i> (x) |v_{2i mod 5}>.
///
/// With N = 2/sqrt(5 + sqrt 5) and h = (1/2)sqrt(1 + sqrt 5) the vectors
/// are unit norm, next-nearest neighbors are orthogonal, and the five
/// products form an orthogonal product family whose complement carries no
/// product vector.
#[derive(Debug, Clone)]
pub struct PentBasis {
    vectors: Vec<Ket>,
    products: Vec<Ket>,
}

impl PentBasis {
    /// The standard family with h = (1/2)sqrt(1 + sqrt 5).
    pub fn new() -> Self {
        Self::with_height(0.5 * (1.0 + 5.0_f64.sqrt()).sqrt())
    }

    /// The same construction with an arbitrary third component. With any
    /// h other than the standard one the pentagon-orthogonality and norm
    /// invariants break; verification code uses this to prove its checks
    /// can fail.
    pub fn with_height(h: f64) -> Self {
        let n = 2.0 / (5.0 + 5.0_f64.sqrt()).sqrt();
        let qutrit_a = SubsystemLayout::new(vec![(3, Party::A)]).expect("3-dim layout");
        let qutrit_b = SubsystemLayout::new(vec![(3, Party::B)]).expect("3-dim layout");
        let vectors: Vec<Ket> = (0..5)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64) / 5.0;
                Ket::from_real(qutrit_a.clone(), &[n * theta.cos(), n * theta.sin(), n * h])
                    .expect("3 amplitudes on a 3-dim layout")
            })
            .collect();
        let products: Vec<Ket> = (0..5)
            .map(|i| {
                let second = vectors[Self::partner(i)]
                    .relabeled(qutrit_b.clone())
                    .expect("equal dimension");
                vectors[i].tensor(&second)
            })
            .collect();
        Self { vectors, products }
    }

    /// Index of the second factor paired with |v_i>: 2i mod 5.
    pub fn partner(i: usize) -> usize {
        (2 * i) % 5
    }

    pub fn vector(&self, i: usize) -> &Ket {
        &self.vectors[i]
    }

    pub fn product(&self, i: usize) -> &Ket {
        &self.products[i]
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn products(&self) -> &[Ket] {
        &self.products
    }

    /// The two-qutrit product |v_i> (x) |v_j> for arbitrary indices, not
    /// restricted to the paired family.
    pub fn product_of(&self, i: usize, j: usize) -> Ket {
        let qutrit_b = SubsystemLayout::new(vec![(3, Party::B)]).expect("3-dim layout");
        let second = self.vectors[j]
            .relabeled(qutrit_b)
            .expect("equal dimension");
        self.vectors[i].tensor(&second)
    }
}

impl Default for PentBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// The standard pentagon family.
pub fn pent_basis() -> PentBasis {
    PentBasis::new()
}

/// The normalized projector onto the orthogonal complement of the five
/// pentagon products: (1/4)(I - sum_i |p_i><p_i|). Spectrum {1/4 x4, 0 x5};
/// annihilates every member product; invariant under partial transpose
/// because all amplitudes are real.
pub fn rho_pent() -> Operator {
    rho_pent_with(&pent_basis())
}

/// The complement-state construction over an arbitrary pentagon family;
/// only the standard family yields a density matrix.
pub fn rho_pent_with(basis: &PentBasis) -> Operator {
    let mut mat = DMatrix::<Complex64>::identity(9, 9);
    for p in basis.products() {
        mat -= p.outer().mat();
    }
    Operator::new(two_qutrits(), mat * Complex64::new(0.25, 0.0)).expect("9x9 on a 9-dim layout")
}

/// Mixes two equal-layout states with a classical flag on the A side:
/// (1/2) rho1 (x) |0><0|_flag + (1/2) rho2 (x) |1><1|_flag, the flag
/// appended as a final (2, A) factor. Projecting the flag and doubling
/// recovers each branch exactly.
pub fn flagged_mixture(rho1: &Operator, rho2: &Operator) -> Result<Operator> {
    if rho1.layout() != rho2.layout() {
        return Err(BekError::LayoutMismatch);
    }
    let flag = SubsystemLayout::new(vec![(2, Party::A)])?;
    let f0 = Ket::basis_state(flag.clone(), &[0])?.outer();
    let f1 = Ket::basis_state(flag, &[1])?.outer();
    Ok(&rho1.scaled(0.5).tensor(&f0) + &rho2.scaled(0.5).tensor(&f1))
}

/// n-fold tensor power with per-copy party labels preserved. The total
/// dimension is capped at [`DIM_CAP`].
pub fn tensor_power(rho: &Operator, n: usize) -> Result<Operator> {
    if n == 0 {
        return Err(BekError::CopyCountOutOfRange(0));
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(rho.dim());
        if dim > DIM_CAP {
            return Err(BekError::DimensionCapExceeded { dim, cap: DIM_CAP });
        }
    }
    let mut out = rho.clone();
    for _ in 1..n {
        out = out.tensor(rho);
    }
    Ok(out)
}
