//! Named self-checks over the analytic results: pentagon geometry, the
//! complement state's structure, the closed-form witness identities, and
//! the positivity criteria. Each check carries a numeric residual so a
//! report can show how much margin a pass has, and the whole suite can be
//! pointed at a corrupted pentagon basis to prove the checks can fail.

use serde::Serialize;

use crate::criteria::{peres_horodecki, ppt_invariance, reduction_criterion};
use crate::layout::Party;
use crate::states::{b_from_lambda, lambda_from_b, pent_basis, rho_pent_with, werner, PentBasis};
use crate::witness::{
    analytic_psi2, closed_form, expectation, inner_product_table_with, off_diagonal_term,
    schmidt_rank, threshold_lambda, witness_value_normalized, witness_value_raw,
};

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    /// Stable check identifier.
    pub name: &'static str,
    /// The measured quantity; for residual checks, the deviation from the
    /// closed form, and for sign/verdict checks, the underlying value.
    pub residual: f64,
    /// The bound the residual was compared against.
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    /// A check that passes when |residual| is within tolerance.
    fn within(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
            passed: residual.abs() <= tolerance,
        }
    }

    /// A check that passes when the value is at least the bound.
    fn at_least(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            residual: value,
            tolerance: bound,
            passed: value >= bound,
        }
    }

    /// A check that passes when the value is at most the bound.
    fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            residual: value,
            tolerance: bound,
            passed: value <= bound,
        }
    }
}

/// Runs the full suite against the shipped pentagon basis.
pub fn default_suite() -> Vec<CheckResult> {
    run_suite(&pent_basis())
}

/// Runs the full suite. Pentagon and complement-state checks use the
/// given basis; the closed-form witness identities are basis-independent
/// and always test the shipped construction.
pub fn run_suite(basis: &PentBasis) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    pentagon_checks(basis, &mut checks);
    complement_state_checks(basis, &mut checks);
    witness_checks(basis, &mut checks);
    state_family_checks(&mut checks);
    criteria_checks(&mut checks);
    checks
}

fn pentagon_checks(basis: &PentBasis, out: &mut Vec<CheckResult>) {
    let norm_dev = basis
        .vectors()
        .iter()
        .map(|v| (v.norm_squared() - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::within(
        "pentagon-vector-norms",
        norm_dev,
        1e-12,
    ));

    let mut ortho_dev: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            if i == j {
                continue;
            }
            let overlap = basis
                .product(i)
                .inner(basis.product(j))
                .expect("equal layouts")
                .norm();
            ortho_dev = ortho_dev.max(overlap);
        }
    }
    out.push(CheckResult::within(
        "pentagon-product-orthogonality",
        ortho_dev,
        1e-12,
    ));

    let golden = (5.0_f64.sqrt() - 1.0) / 2.0;
    let golden_dev = (0..5)
        .map(|i| {
            let overlap = basis
                .vector(i)
                .inner(basis.vector((i + 1) % 5))
                .expect("equal layouts")
                .re;
            (overlap - golden).abs()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::within(
        "pentagon-adjacent-overlaps",
        golden_dev,
        1e-12,
    ));
}

fn complement_state_checks(basis: &PentBasis, out: &mut Vec<CheckResult>) {
    let rho = rho_pent_with(basis);

    let spectrum_dev = match rho.eigvalsh() {
        Ok(eigs) => eigs
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let expected = if k < 5 { 0.0 } else { 0.25 };
                (e - expected).abs()
            })
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    out.push(CheckResult::within(
        "complement-state-spectrum",
        spectrum_dev,
        1e-12,
    ));

    let annihilation_dev = basis
        .products()
        .iter()
        .map(|p| {
            rho.quadratic_form(p)
                .expect("dimensions agree by construction")
                .norm()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::within(
        "complement-state-annihilation",
        annihilation_dev,
        1e-12,
    ));

    let (_, pt_dev) = ppt_invariance(&rho).expect("two-party state");
    out.push(CheckResult::within(
        "complement-state-pt-invariance",
        pt_dev,
        1e-12,
    ));

    let table_dev = inner_product_table_with(basis)
        .iter()
        .map(|entry| entry.deviation())
        .fold(0.0, f64::max);
    out.push(CheckResult::within("inner-product-table", table_dev, 1e-12));
}

fn witness_checks(basis: &PentBasis, out: &mut Vec<CheckResult>) {
    let grid_dev = (0..11)
        .map(|k| {
            let lambda = 2.0 + k as f64 * 0.1;
            let raw = witness_value_raw(lambda).expect("lambda above the pole");
            (raw - closed_form(lambda)).abs()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::within(
        "witness-closed-form-grid",
        grid_dev,
        1e-10,
    ));

    let s5 = 5.0_f64.sqrt();
    let at_two = witness_value_raw(2.0).expect("lambda above the pole");
    out.push(CheckResult::within(
        "witness-value-at-lambda-2",
        at_two - (2.0 * s5 - 4.5),
        1e-12,
    ));

    out.push(CheckResult::within(
        "witness-off-diagonal-term",
        off_diagonal_term().expect("family is well-formed"),
        1e-12,
    ));

    out.push(CheckResult::within(
        "witness-threshold-value",
        threshold_lambda() - 2.3300,
        5e-5,
    ));
    out.push(CheckResult::at_most(
        "witness-negative-below-threshold",
        witness_value_raw(2.32).expect("lambda above the pole"),
        0.0,
    ));
    out.push(CheckResult::at_least(
        "witness-positive-above-threshold",
        witness_value_raw(2.34).expect("lambda above the pole"),
        0.0,
    ));

    let psi = analytic_psi2();
    let (rank, _) = schmidt_rank(&psi).expect("nonzero vector");
    out.push(CheckResult::within(
        "witness-certificate-schmidt-rank",
        rank as f64 - 2.0,
        0.0,
    ));

    // the full-dimensional contraction must reproduce the closed form
    let product = werner(2.0)
        .expect("lambda in range")
        .tensor(&rho_pent_with(basis));
    let normalized = psi.normalized().expect("nonzero vector");
    let contracted = expectation(&normalized, &product, &[Party::B]).expect("hermitian product");
    let predicted = witness_value_normalized(2.0).expect("lambda above the pole");
    out.push(CheckResult::within(
        "witness-contraction-identity",
        contracted - predicted,
        1e-10,
    ));
}

fn state_family_checks(out: &mut Vec<CheckResult>) {
    let checks: [(&'static str, f64); 4] = [
        ("state-spectrum-lambda-0.5", 0.5),
        ("state-spectrum-lambda-2", 2.0),
        ("state-spectrum-lambda-5", 5.0),
        ("state-spectrum-lambda-100", 100.0),
    ];
    for (name, lambda) in checks {
        let dev = match werner(lambda).and_then(|rho| rho.eigvalsh()) {
            Ok(eigs) => {
                let sym = (2.0 * lambda - 1.0) / (3.0 * (8.0 * lambda - 1.0));
                let anti = (4.0 * lambda + 1.0) / (3.0 * (8.0 * lambda - 1.0));
                eigs.iter()
                    .enumerate()
                    .map(|(k, &e)| {
                        let expected = if k < 6 { sym } else { anti };
                        (e - expected).abs()
                    })
                    .fold(0.0, f64::max)
            }
            Err(_) => f64::INFINITY,
        };
        out.push(CheckResult::within(name, dev, 1e-12));
    }

    for (name, lambda) in [
        ("state-pt-floor-lambda-2", 2.0),
        ("state-pt-floor-lambda-5", 5.0),
    ] {
        let dev = match werner(lambda).and_then(|rho| peres_horodecki(&rho)) {
            Ok((_, min_eig)) => (min_eig + 1.0 / (8.0 * lambda - 1.0)).abs(),
            Err(_) => f64::INFINITY,
        };
        out.push(CheckResult::within(name, dev, 1e-12));
    }

    let roundtrip = match (b_from_lambda(2.0), lambda_from_b(0.2)) {
        (Ok(b), Ok(lambda)) => (b - 0.2).abs().max((lambda - 2.0).abs()),
        _ => f64::INFINITY,
    };
    out.push(CheckResult::within(
        "parameter-map-round-trip",
        roundtrip,
        1e-12,
    ));
}

fn criteria_checks(out: &mut Vec<CheckResult>) {
    let werner2 = werner(2.0).expect("lambda in range");
    let pent = rho_pent_with(&pent_basis());
    let product = werner2.tensor(&pent);

    for (name, rho) in [
        ("reduction-isotropic-state", &werner2),
        ("reduction-complement-state", &pent),
        ("reduction-product-cut", &product),
    ] {
        let floor = match reduction_criterion(rho) {
            Ok((_, min_a, min_b)) => min_a.min(min_b),
            Err(_) => f64::NEG_INFINITY,
        };
        out.push(CheckResult::at_least(name, floor, -1e-9));
    }

    let (_, min_pt) = peres_horodecki(&werner2).expect("two-party state");
    out.push(CheckResult::within(
        "transpose-floor-at-lambda-2",
        min_pt + 1.0 / 15.0,
        1e-12,
    ));

    let (_, pent_min_pt) = peres_horodecki(&pent).expect("two-party state");
    out.push(CheckResult::at_least(
        "complement-state-ppt",
        pent_min_pt,
        -1e-9,
    ));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_everything() {
        let results = default_suite();
        assert!(results.len() >= 20, "only {} checks", results.len());
        for check in &results {
            assert!(
                check.passed,
                "{} failed: residual {} vs tolerance {}",
                check.name, check.residual, check.tolerance
            );
        }
    }

    #[test]
    fn check_names_are_unique() {
        let results = default_suite();
        let mut names: Vec<_> = results.iter().map(|c| c.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), results.len());
    }

    #[test]
    fn corrupted_height_fails_product_orthogonality() {
        let wrong = PentBasis::with_height(0.5 * (5.0_f64.sqrt() - 1.0).sqrt());
        let results = run_suite(&wrong);
        let ortho = results
            .iter()
            .find(|c| c.name == "pentagon-product-orthogonality")
            .expect("check present");
        assert!(!ortho.passed);
        assert!(ortho.residual > 1e-3);
        // basis-independent identities still hold
        let grid = results
            .iter()
            .find(|c| c.name == "witness-closed-form-grid")
            .expect("check present");
        assert!(grid.passed);
    }

    #[test]
    fn sign_checks_bracket_the_threshold() {
        let results = default_suite();
        let below = results
            .iter()
            .find(|c| c.name == "witness-negative-below-threshold")
            .expect("check present");
        assert!(below.residual < 0.0);
        let above = results
            .iter()
            .find(|c| c.name == "witness-positive-above-threshold")
            .expect("check present");
        assert!(above.residual > 0.0);
    }
}
