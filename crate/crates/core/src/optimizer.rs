//! Rank-constrained see-saw minimization: the smallest Rayleigh quotient
//! <psi|M|psi>/<psi|psi> over vectors psi = a1 (x) b1 + a2 (x) b2 across
//! the party cut of a Hermitian operator. Each half-step fixes one side
//! and solves a 2d-dimensional generalized Hermitian eigenproblem in the
//! other; multistart with per-start RNG streams keeps runs reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BekError, Result};
use crate::layout::Party;
use crate::operator::{hermitian_min_pair, Ket, Operator};
use crate::states::{lambda_from_b, rho_pent, tensor_power, werner};
use crate::witness::analytic_witness;

/// Default RNG seed for reproducible runs.
pub const DEFAULT_SEED: u64 = 20011;

/// Metric condition number above which a start counts as collapsed to
/// rank 1.
const GRAM_COND_LIMIT: f64 = 1e12;

/// How many times a random start may be redrawn after a collapse before
/// it is written off as degenerate.
const MAX_REDRAWS: usize = 8;

/// Multistart see-saw parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SeeSawConfig {
    /// Maximum alternations per start.
    pub max_iters: usize,
    /// Stop when the objective changes by less than
    /// rel_tol * (1 + |objective|) over one alternation.
    pub rel_tol: f64,
    /// Total number of starts, seeded starts included.
    pub num_starts: usize,
    /// Base seed; start k draws from stream k of this seed.
    pub rng_seed: u64,
    /// Ridge added to the pair metric before each generalized eigensolve.
    pub gram_regularization: f64,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            rel_tol: 1e-12,
            num_starts: 32,
            rng_seed: DEFAULT_SEED,
            gram_regularization: 1e-12,
        }
    }
}

impl SeeSawConfig {
    /// The wider multistart default used for tensor-power evidence runs.
    pub fn evidence_default() -> Self {
        Self {
            num_starts: 64,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(BekError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(BekError::InvalidConfig("rel_tol must be > 0".into()));
        }
        if self.num_starts == 0 {
            return Err(BekError::InvalidConfig("num_starts must be >= 1".into()));
        }
        if self.gram_regularization.is_nan() || self.gram_regularization < 0.0 {
            return Err(BekError::InvalidConfig(
                "gram_regularization must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// A rank-2 vector in cut coordinates: psi = a1 (x) b1 + a2 (x) b2 with
/// the A factors stacked before the B factors.
#[derive(Debug, Clone)]
pub struct RankTwoVector {
    pub a1: DVector<Complex64>,
    pub a2: DVector<Complex64>,
    pub b1: DVector<Complex64>,
    pub b2: DVector<Complex64>,
}

impl RankTwoVector {
    /// The global amplitude vector a1 (x) b1 + a2 (x) b2.
    pub fn global_amps(&self) -> DVector<Complex64> {
        self.a1.kronecker(&self.b1) + self.a2.kronecker(&self.b2)
    }
}

/// Result of a multistart minimization.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    /// Smallest Rayleigh quotient found over all starts.
    pub value: f64,
    /// Unit-norm minimizer on the operator's original layout, so that a
    /// plain quadratic form against the operator reproduces `value`.
    pub vector: Ket,
    /// The minimizer in cut coordinates (A block stacked before B).
    pub cut: RankTwoVector,
    /// Index of the winning start (ties go to the lowest index).
    pub best_start: usize,
    /// Alternations used by the winning start.
    pub iterations: usize,
    /// Whether the winning start met the relative-change tolerance.
    pub converged: bool,
    /// Final objective per start; +inf marks a degenerate start.
    pub start_values: Vec<f64>,
    /// Objective after each accepted half-step, per start, led by the
    /// start's initial value (used by monotonicity checks).
    pub start_traces: Vec<Vec<f64>>,
    /// Total number of random redraws caused by metric collapses.
    pub restarts: usize,
}

/// One row of the activation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub b: f64,
    pub lambda: f64,
    /// Minimized Rayleigh quotient of the transposed two-state product.
    pub min_value: f64,
    pub best_start: usize,
    pub iterations: usize,
    pub converged: bool,
}

struct StartRun {
    value: f64,
    point: Option<RankTwoVector>,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    redraws: usize,
}

fn degenerate_run(redraws: usize) -> StartRun {
    StartRun {
        value: f64::INFINITY,
        point: None,
        iterations: 0,
        converged: false,
        trace: Vec::new(),
        redraws,
    }
}

/// Minimizes the rank-2 Rayleigh quotient of a Hermitian operator across
/// its party cut from random starts only.
pub fn minimize_rank2(m: &Operator, cfg: &SeeSawConfig) -> Result<MinimizeOutcome> {
    minimize_rank2_seeded(m, cfg, &[])
}

/// Like [`minimize_rank2`], but the first `seeds.len()` starts begin from
/// the given cut-coordinate vectors instead of random draws. A seeded
/// start that collapses immediately counts as degenerate rather than
/// being redrawn.
pub fn minimize_rank2_seeded(
    m: &Operator,
    cfg: &SeeSawConfig,
    seeds: &[RankTwoVector],
) -> Result<MinimizeOutcome> {
    cfg.validate()?;
    m.ensure_hermitian()?;
    let (aligned, perm) = m.to_party_blocks()?;
    let d_a = aligned.layout().party_dim(Party::A);
    let d_b = aligned.layout().party_dim(Party::B);
    for seed in seeds {
        for (v, d) in [
            (&seed.a1, d_a),
            (&seed.a2, d_a),
            (&seed.b1, d_b),
            (&seed.b2, d_b),
        ] {
            if v.len() != d {
                return Err(BekError::DimensionMismatch {
                    expected: d,
                    actual: v.len(),
                });
            }
        }
    }

    let mat = aligned.mat();
    let runs: Vec<StartRun> = (0..cfg.num_starts)
        .into_par_iter()
        .map(|k| run_start(mat, d_a, d_b, cfg, k, seeds.get(k)))
        .collect();

    let mut best: Option<usize> = None;
    for (k, run) in runs.iter().enumerate() {
        if run.point.is_none() {
            continue;
        }
        match best {
            None => best = Some(k),
            // ties within 1e-14 keep the earlier start
            Some(b) if run.value < runs[b].value - 1e-14 => best = Some(k),
            Some(_) => {}
        }
    }
    let best = best.ok_or(BekError::AllStartsDegenerate(cfg.num_starts))?;
    let winner = &runs[best];
    let cut = winner.point.clone().expect("winner has a point");

    // Map the minimizer back to the operator's original factor order and
    // normalize, so a plain quadratic form reproduces the value.
    let amps = cut.global_amps();
    let norm = amps.norm();
    let aligned_ket = Ket::new(aligned.layout().clone(), amps / Complex64::new(norm, 0.0))?;
    let inverse = crate::layout::invert_permutation(&perm);
    let vector = aligned_ket.permute_subsystems(&inverse)?;

    Ok(MinimizeOutcome {
        value: winner.value,
        vector,
        cut,
        best_start: best,
        iterations: winner.iterations,
        converged: winner.converged,
        start_values: runs.iter().map(|r| r.value).collect(),
        start_traces: runs.iter().map(|r| r.trace.clone()).collect(),
        restarts: runs.iter().map(|r| r.redraws).sum(),
    })
}

fn run_start(
    m: &DMatrix<Complex64>,
    d_a: usize,
    d_b: usize,
    cfg: &SeeSawConfig,
    start_index: usize,
    seed: Option<&RankTwoVector>,
) -> StartRun {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(start_index as u64);

    if let Some(point) = seed {
        let Some(point) = normalize_point(point.clone()) else {
            return degenerate_run(0);
        };
        return match iterate(m, d_a, d_b, cfg, point) {
            Some(run) => run,
            None => degenerate_run(0),
        };
    }

    let mut redraws = 0usize;
    loop {
        let attempt =
            random_point(d_a, d_b, &mut rng).and_then(|point| iterate(m, d_a, d_b, cfg, point));
        match attempt {
            Some(mut run) => {
                run.redraws = redraws;
                return run;
            }
            None => {
                redraws += 1;
                if redraws > MAX_REDRAWS {
                    return degenerate_run(redraws);
                }
            }
        }
    }
}

/// Draws all four vectors with standard complex Gaussian entries and
/// orthonormalizes the B pair, which keeps the first metric perfectly
/// conditioned.
fn random_point(d_a: usize, d_b: usize, rng: &mut ChaCha8Rng) -> Option<RankTwoVector> {
    let mut draw = |d: usize| {
        DVector::from_fn(d, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        })
    };
    let a1 = draw(d_a);
    let a2 = draw(d_a);
    let b1 = draw(d_b);
    let mut b2 = draw(d_b);
    let n1 = b1.norm();
    if n1 < 1e-8 {
        return None;
    }
    let b1 = b1 / Complex64::new(n1, 0.0);
    let overlap = b1.dotc(&b2);
    b2 -= &b1 * overlap;
    let n2 = b2.norm();
    if n2 < 1e-8 {
        return None;
    }
    let b2 = b2 / Complex64::new(n2, 0.0);
    normalize_point(RankTwoVector { a1, a2, b1, b2 })
}

/// Scales each side pair to joint unit norm (objective-invariant), so
/// pair metrics have unit trace and the collapse test is scale-free.
fn normalize_point(mut point: RankTwoVector) -> Option<RankTwoVector> {
    for (v1, v2) in [
        (&mut point.a1, &mut point.a2),
        (&mut point.b1, &mut point.b2),
    ] {
        let scale = (v1.norm_squared() + v2.norm_squared()).sqrt();
        if scale < 1e-12 {
            return None;
        }
        let inv = Complex64::new(1.0 / scale, 0.0);
        *v1 *= inv;
        *v2 *= inv;
    }
    Some(point)
}

/// Rayleigh quotient evaluated directly from the definition; `None` when
/// the global vector has (numerically) cancelled to zero.
fn objective(m: &DMatrix<Complex64>, point: &RankTwoVector) -> Option<f64> {
    let v = point.global_amps();
    let den = v.norm_squared();
    if den < 1e-8 {
        return None;
    }
    let num = v.dotc(&(m * &v)).re;
    Some(num / den)
}

/// Alternating minimization from one starting point. Returns `None` when
/// the point cannot produce even one half-step (a degenerate start); a
/// collapse after progress has been made ends the run with the best
/// iterate found so far.
fn iterate(
    m: &DMatrix<Complex64>,
    d_a: usize,
    d_b: usize,
    cfg: &SeeSawConfig,
    mut point: RankTwoVector,
) -> Option<StartRun> {
    let mut value = objective(m, &point)?;
    let mut trace = vec![value];
    let mut iterations = 0usize;
    let mut converged = false;
    let mut steps_taken = 0usize;

    'outer: for it in 1..=cfg.max_iters {
        iterations = it;
        let before = value;
        for side in [Side::A, Side::B] {
            let solved = half_step(m, d_a, d_b, cfg.gram_regularization, &point, side);
            let Some((v1, v2)) = solved else {
                if steps_taken == 0 {
                    return None;
                }
                // the iterate collapsed to rank 1; the run still counts
                // as converged when this alternation had already stalled
                converged = (before - value).abs() <= cfg.rel_tol * (1.0 + value.abs());
                break 'outer;
            };
            let mut candidate = point.clone();
            match side {
                Side::A => {
                    candidate.a1 = v1;
                    candidate.a2 = v2;
                }
                Side::B => {
                    candidate.b1 = v1;
                    candidate.b2 = v2;
                }
            }
            let Some(new_value) = objective(m, &candidate) else {
                if steps_taken == 0 {
                    return None;
                }
                converged = (before - value).abs() <= cfg.rel_tol * (1.0 + value.abs());
                break 'outer;
            };
            // exact alternation never increases the objective; an
            // increase is round-off stagnation, so keep the old iterate
            if new_value > value + 1e-12 * (1.0 + value.abs()) {
                converged = true;
                break 'outer;
            }
            point = candidate;
            value = new_value;
            trace.push(value);
            steps_taken += 1;
        }
        if (before - value).abs() <= cfg.rel_tol * (1.0 + value.abs()) {
            converged = true;
            break;
        }
    }

    Some(StartRun {
        value,
        point: Some(point),
        iterations,
        converged,
        trace,
        redraws: 0,
    })
}

#[derive(Clone, Copy)]
enum Side {
    A,
    B,
}

/// One generalized-eigenproblem half-step: with the opposite pair fixed,
/// returns the stacked-pair minimizer for the moving side, or `None` when
/// the fixed pair's metric has collapsed.
fn half_step(
    m: &DMatrix<Complex64>,
    d_a: usize,
    d_b: usize,
    reg: f64,
    point: &RankTwoVector,
    side: Side,
) -> Option<(DVector<Complex64>, DVector<Complex64>)> {
    let (fixed1, fixed2, dim) = match side {
        Side::A => (&point.b1, &point.b2, d_a),
        Side::B => (&point.a1, &point.a2, d_b),
    };
    let g11 = fixed1.norm_squared();
    let g22 = fixed2.norm_squared();
    let g12 = fixed1.dotc(fixed2);
    if gram_condition(g11, g22, &g12) > GRAM_COND_LIMIT {
        return None;
    }
    let g11 = g11 + reg;
    let g22 = g22 + reg;

    // Cholesky of the 2x2 metric [[g11, g12], [conj(g12), g22]]
    let l11 = g11.sqrt();
    let l21 = g12.conj() / Complex64::new(l11, 0.0);
    let pivot = g22 - l21.norm_sqr();
    if pivot <= 0.0 {
        return None;
    }
    let l22 = pivot.sqrt();
    let il11 = 1.0 / l11;
    let il22 = 1.0 / l22;
    let il21 = -l21 * Complex64::new(il11 * il22, 0.0);

    let (k11, k12, k22) = match side {
        Side::A => contract_fixed_b(m, d_a, d_b, fixed1, fixed2),
        Side::B => contract_fixed_a(m, d_a, d_b, fixed1, fixed2),
    };
    let k21 = k12.adjoint();

    // congruence transform K~ = Linv K Linv^dag, assembled blockwise
    let t11 = &k11 * Complex64::new(il11 * il11, 0.0);
    let t12 = (&k11 * il21.conj() + &k12 * Complex64::new(il22, 0.0)) * Complex64::new(il11, 0.0);
    let t22 = &k11 * Complex64::new(il21.norm_sqr(), 0.0)
        + &k12 * (il21 * Complex64::new(il22, 0.0))
        + &k21 * (il21.conj() * Complex64::new(il22, 0.0))
        + &k22 * Complex64::new(il22 * il22, 0.0);

    let mut stacked = DMatrix::zeros(2 * dim, 2 * dim);
    stacked.view_mut((0, 0), (dim, dim)).copy_from(&t11);
    stacked.view_mut((0, dim), (dim, dim)).copy_from(&t12);
    stacked
        .view_mut((dim, 0), (dim, dim))
        .copy_from(&t12.adjoint());
    stacked.view_mut((dim, dim), (dim, dim)).copy_from(&t22);

    let (_, beta) = hermitian_min_pair(&stacked);
    let beta1 = beta.rows(0, dim).into_owned();
    let beta2 = beta.rows(dim, dim).into_owned();

    // back-substitute alpha = Linv^dag beta
    let v1 = &beta1 * Complex64::new(il11, 0.0) + &beta2 * il21.conj();
    let v2 = &beta2 * Complex64::new(il22, 0.0);

    let scale = (v1.norm_squared() + v2.norm_squared()).sqrt();
    if scale < 1e-12 {
        return None;
    }
    let inv = Complex64::new(1.0 / scale, 0.0);
    Some((v1 * inv, v2 * inv))
}

/// Condition number of the Hermitian 2x2 pair metric.
fn gram_condition(g11: f64, g22: f64, g12: &Complex64) -> f64 {
    let half_trace = 0.5 * (g11 + g22);
    let det = g11 * g22 - g12.norm_sqr();
    let disc = (half_trace * half_trace - det).max(0.0).sqrt();
    let min = half_trace - disc;
    let max = half_trace + disc;
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// K_{kl} = (I (x) b_k)^dag M (I (x) b_l) for the A-side eigenproblem.
/// Returns (K11, K12, K22); K21 is the adjoint of K12.
fn contract_fixed_b(
    m: &DMatrix<Complex64>,
    d_a: usize,
    d_b: usize,
    b1: &DVector<Complex64>,
    b2: &DVector<Complex64>,
) -> (DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>) {
    let dim = d_a * d_b;
    // T_l[:, c] = M[:, c*d_b .. (c+1)*d_b] b_l
    let mut t1 = DMatrix::zeros(dim, d_a);
    let mut t2 = DMatrix::zeros(dim, d_a);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for c in 0..d_a {
        let block = m.view((0, c * d_b), (dim, d_b));
        t1.column_mut(c).gemv(one, &block, b1, zero);
        t2.column_mut(c).gemv(one, &block, b2, zero);
    }
    let project = |bk: &DVector<Complex64>, t: &DMatrix<Complex64>| {
        DMatrix::from_fn(d_a, d_a, |r, c| bk.dotc(&t.column(c).rows(r * d_b, d_b)))
    };
    (project(b1, &t1), project(b1, &t2), project(b2, &t2))
}

/// K_{kl} = (a_k (x) I)^dag M (a_l (x) I) for the B-side eigenproblem.
fn contract_fixed_a(
    m: &DMatrix<Complex64>,
    d_a: usize,
    d_b: usize,
    a1: &DVector<Complex64>,
    a2: &DVector<Complex64>,
) -> (DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>) {
    let dim = d_a * d_b;
    // U_l = sum_c a_l[c] * M[:, c*d_b .. (c+1)*d_b]
    let mut u1 = DMatrix::zeros(dim, d_b);
    let mut u2 = DMatrix::zeros(dim, d_b);
    for c in 0..d_a {
        let block = m.view((0, c * d_b), (dim, d_b));
        u1 += block * a1[c];
        u2 += block * a2[c];
    }
    let project = |ak: &DVector<Complex64>, u: &DMatrix<Complex64>| {
        DMatrix::from_fn(d_b, d_b, |p, q| {
            let mut sum = Complex64::new(0.0, 0.0);
            for r in 0..d_a {
                sum += ak[r].conj() * u[(r * d_b + p, q)];
            }
            sum
        })
    };
    (project(a1, &u1), project(a1, &u2), project(a2, &u2))
}

/// The closed-form pentagon witness as a cut-coordinate seed.
pub fn analytic_seed() -> RankTwoVector {
    let (a1, a2, b1, b2) = analytic_witness().cut_vectors();
    RankTwoVector { a1, a2, b1, b2 }
}

/// The partially transposed activation product for one isotropic-noise
/// parameter: the two-qutrit state at that lambda, tensored with the
/// tile-complement state, then transposed on the B factors.
pub fn activation_operator(lambda: f64) -> Result<Operator> {
    Ok(werner(lambda)?
        .tensor(&rho_pent())
        .partial_transpose_party(Party::B))
}

/// Runs the activation minimization over a grid of mixing parameters b.
/// Each grid point gets the closed-form witness as start 0 plus random
/// starts; out-of-range points yield per-point errors and the sweep
/// continues.
pub fn sweep_b(b_grid: &[f64], cfg: &SeeSawConfig) -> Vec<Result<SweepRecord>> {
    let seed_point = analytic_seed();
    b_grid
        .iter()
        .map(|&b| {
            let lambda = lambda_from_b(b)?;
            let m = activation_operator(lambda)?;
            let outcome = minimize_rank2_seeded(&m, cfg, std::slice::from_ref(&seed_point))?;
            Ok(SweepRecord {
                b,
                lambda,
                min_value: outcome.value,
                best_start: outcome.best_start,
                iterations: outcome.iterations,
                converged: outcome.converged,
            })
        })
        .collect()
}

/// Minimizes over the B-transposed n-copy tensor power of the two-qutrit
/// state at `lambda`. A nonnegative minimum is evidence (an upper bound,
/// never proof) that the rank-2 search finds no negative direction.
pub fn conjecture_evidence(n: usize, lambda: f64, cfg: &SeeSawConfig) -> Result<MinimizeOutcome> {
    if !(1..=3).contains(&n) {
        return Err(BekError::CopyCountOutOfRange(n));
    }
    let m = tensor_power(&werner(lambda)?, n)?.partial_transpose_party(Party::B);
    minimize_rank2(&m, cfg)
}

/// `steps` evenly spaced grid points from `b_min` to `b_max` inclusive.
pub fn linear_grid(b_min: f64, b_max: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![b_min];
    }
    let h = (b_max - b_min) / (steps - 1) as f64;
    (0..steps).map(|k| b_min + h * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::SubsystemLayout;
    use crate::witness::{expectation, schmidt_rank, witness_value_normalized};
    use rand::Rng;

    fn small_cfg(num_starts: usize) -> SeeSawConfig {
        SeeSawConfig {
            max_iters: 200,
            num_starts,
            ..SeeSawConfig::default()
        }
    }

    fn random_hermitian_op(dims: &[(usize, Party)], seed: u64) -> Operator {
        let layout = SubsystemLayout::new(dims.to_vec()).unwrap();
        let dim = layout.total_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        Operator::new(layout, h).unwrap()
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        for cfg in [
            SeeSawConfig {
                max_iters: 0,
                ..SeeSawConfig::default()
            },
            SeeSawConfig {
                rel_tol: 0.0,
                ..SeeSawConfig::default()
            },
            SeeSawConfig {
                num_starts: 0,
                ..SeeSawConfig::default()
            },
            SeeSawConfig {
                gram_regularization: -1.0,
                ..SeeSawConfig::default()
            },
        ] {
            assert!(matches!(
                minimize_rank2(&Operator::identity(SubsystemLayout::two_qutrits()), &cfg),
                Err(BekError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn identity_has_constant_quotient() {
        let m = Operator::identity(SubsystemLayout::two_qutrits());
        let outcome = minimize_rank2(&m, &small_cfg(4)).unwrap();
        assert!((outcome.value - 1.0).abs() < 1e-12);
        assert!(outcome.converged);
    }

    #[test]
    fn two_qubit_cut_reaches_the_true_minimum() {
        // with 2x2 local dimensions every vector has Schmidt rank <= 2,
        // so the constrained minimum is the bottom eigenvalue
        for seed in [1u64, 2, 3] {
            let m = random_hermitian_op(&[(2, Party::A), (2, Party::B)], seed);
            let truth = m.eigvalsh().unwrap()[0];
            let outcome = minimize_rank2(&m, &small_cfg(8)).unwrap();
            assert!(
                (outcome.value - truth).abs() < 1e-9,
                "seed {seed}: {} vs {truth}",
                outcome.value
            );
        }
    }

    #[test]
    fn transposed_state_at_two_has_vanishing_minimum() {
        // the transposed lambda=2 state equals (2I - 3P)/15 for the
        // projector P onto the maximally entangled vector; rank-2 vectors
        // reach overlap 2/3 with it and no more, so the minimum is 0
        let m = werner(2.0).unwrap().partial_transpose_party(Party::B);
        let outcome = minimize_rank2(&m, &small_cfg(16)).unwrap();
        assert!(outcome.value >= -1e-9, "found {}", outcome.value);
        assert!(outcome.value <= 1e-6, "found {}", outcome.value);
    }

    #[test]
    fn transposed_state_at_one_reaches_minus_one_twenty_first() {
        // at lambda=1 the transposed state is (I - 2P)/7, so the rank-2
        // minimum is (1 - 2*(2/3))/7 = -1/21
        let m = werner(1.0).unwrap().partial_transpose_party(Party::B);
        let outcome = minimize_rank2(&m, &small_cfg(16)).unwrap();
        assert!(
            (outcome.value - (-1.0 / 21.0)).abs() < 1e-9,
            "found {}",
            outcome.value
        );
    }

    #[test]
    fn certificate_reproduces_value_and_rank() {
        let m = activation_operator(2.0).unwrap();
        let outcome = minimize_rank2_seeded(&m, &small_cfg(4), &[analytic_seed()]).unwrap();
        let reproduced = expectation(&outcome.vector, &m, &[]).unwrap();
        assert!(
            (reproduced - outcome.value).abs() < 1e-10,
            "{reproduced} vs {}",
            outcome.value
        );
        let (rank, _) = schmidt_rank(&outcome.vector).unwrap();
        assert!(rank <= 2);
    }

    #[test]
    fn seeding_guarantees_the_analytic_bound() {
        let m = activation_operator(2.0).unwrap();
        let outcome = minimize_rank2_seeded(&m, &small_cfg(2), &[analytic_seed()]).unwrap();
        let bound = witness_value_normalized(2.0).unwrap();
        assert!(
            outcome.value <= bound + 1e-12,
            "{} vs bound {bound}",
            outcome.value
        );
        assert!(outcome.value <= -1.58e-4);
    }

    #[test]
    fn traces_never_increase() {
        for seed in 0..10u64 {
            let m = random_hermitian_op(&[(3, Party::A), (3, Party::B)], 100 + seed);
            let outcome = minimize_rank2(
                &m,
                &SeeSawConfig {
                    num_starts: 3,
                    rng_seed: seed,
                    ..SeeSawConfig::default()
                },
            )
            .unwrap();
            for trace in &outcome.start_traces {
                for pair in trace.windows(2) {
                    assert!(
                        pair[1] <= pair[0] + 1e-12 * (1.0 + pair[0].abs()),
                        "increase {} -> {}",
                        pair[0],
                        pair[1]
                    );
                }
            }
        }
    }

    #[test]
    fn identical_configs_give_identical_results() {
        let m = activation_operator(2.0).unwrap();
        let cfg = small_cfg(6);
        let first = minimize_rank2_seeded(&m, &cfg, &[analytic_seed()]).unwrap();
        let second = minimize_rank2_seeded(&m, &cfg, &[analytic_seed()]).unwrap();
        assert_eq!(first.value.to_bits(), second.value.to_bits());
        assert_eq!(first.best_start, second.best_start);
        assert_eq!(first.iterations, second.iterations);
        for (x, y) in first.start_values.iter().zip(second.start_values.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn parallel_seed_pair_is_degenerate() {
        let m = activation_operator(2.0).unwrap();
        let good = analytic_seed();
        let collapsed = RankTwoVector {
            b2: good.b1.clone(),
            ..good
        };
        let cfg = SeeSawConfig {
            num_starts: 1,
            ..SeeSawConfig::default()
        };
        assert!(matches!(
            minimize_rank2_seeded(&m, &cfg, &[collapsed]),
            Err(BekError::AllStartsDegenerate(1))
        ));
    }

    #[test]
    fn sweep_records_are_consistent() {
        let cfg = SeeSawConfig {
            num_starts: 3,
            max_iters: 300,
            ..SeeSawConfig::default()
        };
        let grid = [0.2, 0.19, 0.15];
        let records = sweep_b(&grid, &cfg);
        assert_eq!(records.len(), 3);
        let first = records[0].as_ref().unwrap();
        assert!((first.lambda - 2.0).abs() < 1e-12);
        assert!(first.min_value <= -1.58e-4);
        let second = records[1].as_ref().unwrap();
        assert!((second.lambda - lambda_from_b(0.19).unwrap()).abs() < 1e-12);
        assert!(matches!(records[2], Err(BekError::BOutOfRange { .. })));
    }

    #[test]
    fn single_copy_evidence_is_nonnegative() {
        let cfg = SeeSawConfig {
            num_starts: 8,
            ..SeeSawConfig::default()
        };
        let outcome = conjecture_evidence(1, 2.0, &cfg).unwrap();
        assert!(outcome.value >= -1e-9, "found {}", outcome.value);
        assert!(matches!(
            conjecture_evidence(0, 2.0, &cfg),
            Err(BekError::CopyCountOutOfRange(0))
        ));
        assert!(matches!(
            conjecture_evidence(4, 2.0, &cfg),
            Err(BekError::CopyCountOutOfRange(4))
        ));
    }

    #[test]
    fn grid_builder_spaces_points_evenly() {
        let grid = linear_grid(0.17, 0.2, 4);
        assert_eq!(grid.len(), 4);
        assert!((grid[0] - 0.17).abs() < 1e-15);
        assert!((grid[3] - 0.2).abs() < 1e-15);
        assert!((grid[2] - grid[1] - 0.01).abs() < 1e-12);
    }
}
