//! Numerical rank of the Jacobian of a list of invariants with respect to
//! the real and imaginary parts of every amplitude.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::invariant::{InvariantIndex, InvariantPlan};

/// Singular values at or below this fraction of the largest are treated as zero.
pub const RANK_THRESHOLD: f64 = 1e-7;
/// Central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Singular values of the central-difference Jacobian, in descending order.
pub fn jacobian_singular_values(
    indices: &[InvariantIndex],
    state: &AlgebraElement,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {step} must be positive"
        )));
    }
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    if state.n() > 4 {
        return Err(Error::Size(format!(
            "Jacobian rank limited to n <= 4, got {}",
            state.n()
        )));
    }
    let plans: Vec<InvariantPlan> = indices
        .iter()
        .map(InvariantPlan::new)
        .collect::<Result<_>>()?;
    for plan in &plans {
        if plan.index().n() != state.n() {
            return Err(Error::Shape(format!(
                "index {} vs {} sites",
                plan.index(),
                state.n()
            )));
        }
    }
    let base = state.coeffs();
    let params = 2 * base.len();
    let mut jac = DMatrix::<f64>::zeros(plans.len(), params);
    let mut amps = base.to_vec();
    for p in 0..params {
        let delta = if p % 2 == 0 {
            Complex64::new(step, 0.0)
        } else {
            Complex64::new(0.0, step)
        };
        let slot = p / 2;
        amps[slot] = base[slot] + delta;
        let plus: Vec<f64> = plans
            .iter()
            .map(|pl| pl.evaluate_amplitudes(&amps))
            .collect();
        amps[slot] = base[slot] - delta;
        let minus: Vec<f64> = plans
            .iter()
            .map(|pl| pl.evaluate_amplitudes(&amps))
            .collect();
        amps[slot] = base[slot];
        for (row, (a, b)) in plus.iter().zip(&minus).enumerate() {
            jac[(row, p)] = (a - b) / (2.0 * step);
        }
    }
    let mut sv: Vec<f64> = jac.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Number of singular values above [`RANK_THRESHOLD`] times the largest.
pub fn jacobian_rank(
    indices: &[InvariantIndex],
    state: &AlgebraElement,
    step: f64,
) -> Result<usize> {
    let sv = jacobian_singular_values(indices, state, step)?;
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > RANK_THRESHOLD * largest).count())
}
