//! Partial-transpose entanglement criteria: the positive-partial-transpose
//! test, the reduction criterion, and partial-transpose invariance
//! reporting. The bipartite cut is always derived from party labels, so
//! interleaved layouts are realigned internally.

use serde::Serialize;

use crate::error::{BekError, Result};
use crate::layout::Party;
use crate::operator::Operator;
use crate::TOL_PSD;

/// Max-entry tolerance below which a state counts as PT-invariant.
pub const PT_INVARIANCE_TOL: f64 = 1e-12;

/// Combined verdicts of all three criteria for one state.
#[derive(Debug, Clone, Serialize)]
pub struct CriteriaReport {
    /// True iff the partial transpose has an eigenvalue below -TOL_PSD.
    pub npt: bool,
    /// Smallest eigenvalue of the partial transpose.
    pub min_pt_eigenvalue: f64,
    /// True iff both reduction operators are positive semidefinite.
    pub reduction_ok: bool,
    /// Smallest eigenvalues of (1_A (x) rho_B - rho, rho_A (x) 1_B - rho).
    pub min_reduction_eigenvalues: (f64, f64),
    /// True iff the partial transpose equals the state to PT_INVARIANCE_TOL.
    pub ppt_invariant: bool,
}

fn ensure_bipartite(rho: &Operator) -> Result<()> {
    for party in [Party::A, Party::B] {
        if !rho.layout().has_party(party) {
            return Err(BekError::SingleParty(party));
        }
    }
    Ok(())
}

/// Partial-transpose test: transposes all B factors and reports
/// (is-NPT, smallest eigenvalue). A negative eigenvalue below tolerance
/// certifies entanglement; a nonnegative spectrum proves nothing beyond
/// undistillability of pure entanglement via this criterion.
pub fn peres_horodecki(rho: &Operator) -> Result<(bool, f64)> {
    ensure_bipartite(rho)?;
    let pt = rho.partial_transpose_party(Party::B);
    let min = pt.eigvalsh()?[0];
    Ok((min < -TOL_PSD, min))
}

/// Reduction criterion: checks 1_A (x) rho_B - rho >= 0 and
/// rho_A (x) 1_B - rho >= 0 across the party cut, returning the verdict
/// and both minimum eigenvalues (A-identity side first). Violation
/// implies distillability.
pub fn reduction_criterion(rho: &Operator) -> Result<(bool, f64, f64)> {
    ensure_bipartite(rho)?;
    let (aligned, _) = rho.to_party_blocks()?;
    let rho_a = aligned.partial_trace_party(Party::B)?;
    let rho_b = aligned.partial_trace_party(Party::A)?;
    let id_a = Operator::identity(rho_a.layout().clone());
    let id_b = Operator::identity(rho_b.layout().clone());
    let a_side = &id_a.tensor(&rho_b) - &aligned;
    let b_side = &rho_a.tensor(&id_b) - &aligned;
    let min_a = a_side.eigvalsh()?[0];
    let min_b = b_side.eigvalsh()?[0];
    Ok((min_a >= -TOL_PSD && min_b >= -TOL_PSD, min_a, min_b))
}

/// Whether the state equals its own partial transpose, with the max-entry
/// deviation. The deviation is basis-dependent; only the verdict is
/// stable under real orthogonal local rotations.
pub fn ppt_invariance(rho: &Operator) -> Result<(bool, f64)> {
    rho.ensure_hermitian()?;
    let pt = rho.partial_transpose_party(Party::B);
    let dev = pt.max_abs_diff(rho);
    Ok((dev <= PT_INVARIANCE_TOL, dev))
}

/// Runs all three criteria and bundles the results.
pub fn criteria_report(rho: &Operator) -> Result<CriteriaReport> {
    let (npt, min_pt_eigenvalue) = peres_horodecki(rho)?;
    let (reduction_ok, min_a, min_b) = reduction_criterion(rho)?;
    let (ppt_invariant, _) = ppt_invariance(rho)?;
    Ok(CriteriaReport {
        npt,
        min_pt_eigenvalue,
        reduction_ok,
        min_reduction_eigenvalues: (min_a, min_b),
        ppt_invariant,
    })
}
