//! The Schmidt-rank-2 distillability witness: the parametrized rank-2
//! vector family, its closed-form pentagon instance, expectation values
//! against partially transposed states, the closed-form value and its
//! sign-change threshold, and Schmidt-rank utilities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{BekError, Result};
use crate::layout::{Party, SubsystemLayout};
use crate::operator::{Ket, Operator};
use crate::states::{pent_basis, rho_pent, rho_pent_with, PentBasis};

/// Relative singular-value threshold for Schmidt-rank counting.
pub const SCHMIDT_REL_TOL: f64 = 1e-10;

/// A vector family generating the rank-2 state
///
///   psi = sum_{i,j} |i,j> (x) (|x_i>(x)|y_j> + |z_i>(x)|u_j>),
///
/// where |i> and |j> run over label factors held by A and B, the x/z
/// vectors live on a payload A factor and the y/u vectors on a payload B
/// factor. Across the (labels+payload A) | (labels+payload B) cut the
/// assembled vector always has Schmidt rank <= 2.
#[derive(Debug, Clone)]
pub struct Rank2Witness {
    xs: Vec<DVector<Complex64>>,
    zs: Vec<DVector<Complex64>>,
    ys: Vec<DVector<Complex64>>,
    us: Vec<DVector<Complex64>>,
}

impl Rank2Witness {
    /// Validates matching list lengths and uniform vector dimensions.
    pub fn new(
        xs: Vec<DVector<Complex64>>,
        zs: Vec<DVector<Complex64>>,
        ys: Vec<DVector<Complex64>>,
        us: Vec<DVector<Complex64>>,
    ) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() {
            return Err(BekError::WitnessFamilySize {
                expected: 1,
                actual: 0,
            });
        }
        if zs.len() != xs.len() {
            return Err(BekError::WitnessFamilySize {
                expected: xs.len(),
                actual: zs.len(),
            });
        }
        if us.len() != ys.len() {
            return Err(BekError::WitnessFamilySize {
                expected: ys.len(),
                actual: us.len(),
            });
        }
        let dx = xs[0].len();
        let dy = ys[0].len();
        if dx == 0 || dy == 0 {
            return Err(BekError::ZeroFactorDim);
        }
        for v in xs.iter().chain(&zs) {
            if v.len() != dx {
                return Err(BekError::DimensionMismatch {
                    expected: dx,
                    actual: v.len(),
                });
            }
        }
        for v in ys.iter().chain(&us) {
            if v.len() != dy {
                return Err(BekError::DimensionMismatch {
                    expected: dy,
                    actual: v.len(),
                });
            }
        }
        Ok(Self { xs, zs, ys, us })
    }

    /// (number of A labels, number of B labels).
    pub fn label_dims(&self) -> (usize, usize) {
        (self.xs.len(), self.ys.len())
    }

    /// (payload A dimension, payload B dimension).
    pub fn payload_dims(&self) -> (usize, usize) {
        (self.xs[0].len(), self.ys[0].len())
    }

    /// The component |x_i>(x)|y_j> + |z_i>(x)|u_j> on the payload factors.
    pub fn component(&self, i: usize, j: usize) -> Ket {
        let (dx, dy) = self.payload_dims();
        let layout =
            SubsystemLayout::new(vec![(dx, Party::A), (dy, Party::B)]).expect("nonzero dims");
        let amps = self.xs[i].kronecker(&self.ys[j]) + self.zs[i].kronecker(&self.us[j]);
        Ket::new(layout, amps).expect("dx*dy amplitudes")
    }

    /// The global vector on layout [(nx,A),(ny,B),(dx,A),(dy,B)] — label
    /// factors first, payload factors second. Unnormalized by design.
    pub fn assemble(&self) -> Ket {
        let (nx, ny) = self.label_dims();
        let (dx, dy) = self.payload_dims();
        let layout = SubsystemLayout::new(vec![
            (nx, Party::A),
            (ny, Party::B),
            (dx, Party::A),
            (dy, Party::B),
        ])
        .expect("nonzero dims");
        let mut amps = DVector::zeros(layout.total_dim());
        for i in 0..nx {
            for j in 0..ny {
                for p in 0..dx {
                    for q in 0..dy {
                        amps[layout.encode(&[i, j, p, q])] =
                            self.xs[i][p] * self.ys[j][q] + self.zs[i][p] * self.us[j][q];
                    }
                }
            }
        }
        Ket::new(layout, amps).expect("amplitudes sized to layout")
    }

    /// The explicit rank-2 cut decomposition: the assembled vector, with
    /// factors permuted to all-A-then-all-B order, equals
    /// a1 (x) b1 + a2 (x) b2 for these stacked vectors.
    pub fn cut_vectors(
        &self,
    ) -> (
        DVector<Complex64>,
        DVector<Complex64>,
        DVector<Complex64>,
        DVector<Complex64>,
    ) {
        let (nx, ny) = self.label_dims();
        let (dx, dy) = self.payload_dims();
        let stack_a =
            |vs: &[DVector<Complex64>]| DVector::from_fn(nx * dx, |k, _| vs[k / dx][k % dx]);
        let stack_b =
            |vs: &[DVector<Complex64>]| DVector::from_fn(ny * dy, |k, _| vs[k / dy][k % dy]);
        (
            stack_a(&self.xs),
            stack_a(&self.zs),
            stack_b(&self.ys),
            stack_b(&self.us),
        )
    }
}

/// The closed-form pentagon witness family: labels and payloads are all
/// qutrits, and the sixteen family vectors are built from the pentagon
/// vectors so that the (0,1) and (1,0) components cancel and the four
/// nonzero off-diagonal components are member products of the pentagon
/// family (hence annihilated by the complement state).
pub fn analytic_witness() -> Rank2Witness {
    let basis = pent_basis();
    let v = |i: usize| basis.vector(i).amps().clone();
    let half = Complex64::new(0.5, 0.0);
    let xs = vec![v(4), -v(1), (v(3) + v(2)) * half];
    let zs = vec![v(4), v(1), (v(3) - v(2)) * half];
    let ys = vec![v(1) * half, v(4) * half, v(3) - v(2)];
    let us = vec![v(1) * half, -(v(4) * half), v(3) + v(2)];
    Rank2Witness::new(xs, zs, ys, us).expect("fixed-size pentagon family")
}

/// The same global vector written as its seven-term expansion:
///
///   2|0,2>|v4,v3> + (1/2)|2,0>|v3,v1> + 2|1,2>|v1,v2> + (1/2)|2,1>|v2,v4>
///   + |0,0>|v4,v1> - |1,1>|v1,v4> + |2,2>(|v3,v3> - |v2,v2>),
///
/// with squared norm 9.5 + sqrt 5.
pub fn analytic_psi2() -> Ket {
    let basis = pent_basis();
    let labels = SubsystemLayout::two_qutrits();
    let term = |coeff: f64, i: usize, j: usize, pa: usize, pb: usize| {
        Ket::basis_state(labels.clone(), &[i, j])
            .expect("two-qutrit digits")
            .tensor(&basis.product_of(pa, pb))
            .scaled(coeff)
    };
    let mut psi = term(2.0, 0, 2, 4, 3);
    psi = &psi + &term(0.5, 2, 0, 3, 1);
    psi = &psi + &term(2.0, 1, 2, 1, 2);
    psi = &psi + &term(0.5, 2, 1, 2, 4);
    psi = &psi + &term(1.0, 0, 0, 4, 1);
    psi = &psi - &term(1.0, 1, 1, 1, 4);
    psi = &psi + &term(1.0, 2, 2, 3, 3);
    psi = &psi - &term(1.0, 2, 2, 2, 2);
    psi
}

/// Number of singular values of the bipartite coefficient matrix above
/// [`SCHMIDT_REL_TOL`] relative to the largest, together with the full
/// singular spectrum (descending). The cut is defined by party labels;
/// factors are realigned A-before-B internally.
pub fn schmidt_rank(psi: &Ket) -> Result<(usize, Vec<f64>)> {
    if psi.norm() == 0.0 {
        return Err(BekError::ZeroVector);
    }
    let perm = psi.layout().party_block_permutation()?;
    let aligned = psi.permute_subsystems(&perm)?;
    let d_a = aligned.layout().party_dim(Party::A);
    let d_b = aligned.layout().party_dim(Party::B);
    let coeff = DMatrix::from_fn(d_a, d_b, |a, b| aligned.amps()[a * d_b + b]);
    let mut sigma: Vec<f64> = coeff
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let rank = sigma
        .iter()
        .filter(|&&s| s > SCHMIDT_REL_TOL * sigma[0])
        .count();
    Ok((rank, sigma))
}

/// <psi| PT(rho) |psi> with the partial transpose taken over every factor
/// of the given parties. The result must be real up to 1e-12; the
/// imaginary part is checked and discarded.
pub fn expectation(psi: &Ket, rho: &Operator, pt_parties: &[Party]) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(BekError::DimensionMismatch {
            expected: rho.dim(),
            actual: psi.dim(),
        });
    }
    rho.ensure_hermitian()?;
    let mut subset: Vec<usize> = Vec::new();
    for &party in pt_parties {
        subset.extend(rho.layout().party_indices(party));
    }
    subset.sort_unstable();
    subset.dedup();
    let pt = rho.partial_transpose(&subset)?;
    let value = pt.quadratic_form(psi)?;
    if value.im.abs() > 1e-12 {
        return Err(BekError::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// The three ingredients of the witness expectation against the
/// complement state, computed from the pentagon family components:
/// diagonal sum_i <c_ii|rho|c_ii>, the full label-diagonal cross sum
/// sum_{ik} <c_kk|rho|c_ii>, and the off-diagonal sum_{i!=j} <c_ij|rho|c_ij>.
fn analytic_terms() -> Result<(f64, f64, f64)> {
    let family = analytic_witness();
    let rho = rho_pent();
    let (n, _) = family.label_dims();
    let components: Vec<Vec<Ket>> = (0..n)
        .map(|i| (0..n).map(|j| family.component(i, j)).collect())
        .collect();
    let mut diag = Complex64::new(0.0, 0.0);
    let mut cross = Complex64::new(0.0, 0.0);
    let mut off = Complex64::new(0.0, 0.0);
    for i in 0..n {
        diag += rho.quadratic_form(&components[i][i])?;
        for k in 0..n {
            cross += rho.matrix_element(&components[k][k], &components[i][i])?;
        }
        for (j, component) in components[i].iter().enumerate() {
            if i != j {
                off += rho.quadratic_form(component)?;
            }
        }
    }
    for (name, v) in [("diagonal", diag), ("cross", cross), ("off-diagonal", off)] {
        debug_assert!(
            v.im.abs() < 1e-12,
            "{name} term has imaginary part {}",
            v.im
        );
        if v.im.abs() > 1e-12 {
            return Err(BekError::ImaginaryExpectation { imag: v.im });
        }
    }
    Ok((diag.re, cross.re, off.re))
}

/// The witness expectation in the analytic convention: the global
/// normalization 1/(8 lambda - 1) is dropped and the witness vector is
/// unnormalized. Negative values certify distillability of the pair.
pub fn witness_value_raw(lambda: f64) -> Result<f64> {
    ensure_lambda_above_pole(lambda)?;
    let (diag, cross, off) = analytic_terms()?;
    Ok(lambda * diag - (lambda + 1.0) / 3.0 * cross + lambda * off)
}

/// The off-diagonal contribution alone; vanishes for the pentagon family
/// because every nonzero off-diagonal component is a member product.
pub fn off_diagonal_term() -> Result<f64> {
    let (_, _, off) = analytic_terms()?;
    Ok(off)
}

/// The witness expectation in the normalized convention: the state
/// carries its 1/(8 lambda - 1) factor and the witness vector is divided
/// by its norm. Matches a direct evaluation of
/// <psi/||psi|| | PT(werner (x) complement) | psi/||psi||>.
pub fn witness_value_normalized(lambda: f64) -> Result<f64> {
    let raw = witness_value_raw(lambda)?;
    let norm_sq = analytic_psi2().norm_squared();
    Ok(raw / ((8.0 * lambda - 1.0) * norm_sq))
}

/// Closed form for the raw witness value:
/// (1/12)(lambda (17 sqrt5 - 37) + 20 - 10 sqrt5).
pub fn closed_form(lambda: f64) -> f64 {
    let s5 = 5.0_f64.sqrt();
    (lambda * (17.0 * s5 - 37.0) + 20.0 - 10.0 * s5) / 12.0
}

/// The zero of [`closed_form`]: (10 sqrt5 - 20)/(17 sqrt5 - 37), about
/// 2.3300. Below this the witness certifies distillability of the
/// Werner/complement pair.
pub fn threshold_lambda() -> f64 {
    let s5 = 5.0_f64.sqrt();
    (10.0 * s5 - 20.0) / (17.0 * s5 - 37.0)
}

fn ensure_lambda_above_pole(lambda: f64) -> Result<()> {
    if lambda <= 0.125 {
        return Err(BekError::WitnessLambdaPole { lambda });
    }
    Ok(())
}

/// One verified matrix element of the complement state.
#[derive(Debug, Clone)]
pub struct TableEntry {
    /// Human-readable bra/ket description.
    pub label: &'static str,
    /// Numerically computed value.
    pub computed: f64,
    /// Closed-form value.
    pub expected: f64,
}

impl TableEntry {
    pub fn deviation(&self) -> f64 {
        (self.computed - self.expected).abs()
    }
}

/// The six closed-form matrix elements of the complement state against
/// the non-member diagonal products and the (2,2) witness component
/// q22 = |v3,v3> - |v2,v2>. Each computed value must match its closed
/// form to 1e-12.
pub fn inner_product_table() -> Vec<TableEntry> {
    inner_product_table_with(&pent_basis())
}

/// [`inner_product_table`] evaluated against an arbitrary pentagon basis
/// (the verification suite uses this to prove the checks can fail).
pub fn inner_product_table_with(basis: &PentBasis) -> Vec<TableEntry> {
    let rho = rho_pent_with(basis);
    let s5 = 5.0_f64.sqrt();
    let p14 = basis.product_of(1, 4);
    let p41 = basis.product_of(4, 1);
    let q22 = &basis.product_of(3, 3) - &basis.product_of(2, 2);
    let element = |left: &Ket, right: &Ket| {
        rho.matrix_element(left, right)
            .expect("dimensions agree by construction")
            .re
    };
    vec![
        TableEntry {
            label: "<v1,v4| rho |v1,v4>",
            computed: element(&p14, &p14),
            expected: s5 / 2.0 - 1.0,
        },
        TableEntry {
            label: "<v4,v1| rho |v4,v1>",
            computed: element(&p41, &p41),
            expected: s5 / 2.0 - 1.0,
        },
        TableEntry {
            label: "<v4,v1| rho |v1,v4>",
            computed: element(&p41, &p14),
            expected: (3.0 * s5 - 7.0) / 8.0,
        },
        TableEntry {
            label: "<q22| rho |q22>",
            computed: element(&q22, &q22),
            expected: s5 - 2.0 - (3.0 - s5) / 4.0,
        },
        TableEntry {
            label: "<q22| rho |v4,v1>",
            computed: element(&q22, &p41),
            expected: (s5 - 2.0) / 4.0,
        },
        TableEntry {
            label: "<q22| rho |v1,v4>",
            computed: element(&q22, &p14),
            expected: (2.0 - s5) / 4.0,
        },
    ]
}
