use super::{eigh, CMatrix, DensityMatrix, HermitianOperator, LinalgError};

const TRACE_GROWTH_LIMIT: f64 = 1e-6;
const NEGATIVITY_LIMIT: f64 = -1e-6;

/// Fixed-step classical RK4 for `drho/dt = deriv(rho)`.
///
/// Returns `n_steps + 1` states starting with `rho0`. Each step is
/// re-symmetrised; a step is rejected with [`LinalgError::StepTooLarge`] when
/// the trace grows beyond `1 + 1e-6` or an eigenvalue drops below `-1e-6`.
pub fn rk4_evolve<F, E>(mut deriv: F, rho0: &DensityMatrix, dt: f64, n_steps: usize) -> Result<Vec<DensityMatrix>, E>
where
    F: FnMut(&CMatrix) -> Result<CMatrix, E>,
    E: From<LinalgError>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LinalgError::InvalidTimeStep(dt).into());
    }
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    for step in 1..=n_steps {
        let k1 = deriv(&rho)?;
        let k2 = deriv(&rho.add_scaled(&k1, dt / 2.0))?;
        let k3 = deriv(&rho.add_scaled(&k2, dt / 2.0))?;
        let k4 = deriv(&rho.add_scaled(&k3, dt))?;
        let mut next = rho.clone();
        for (((r, a), (b, c)), d) in next
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice().iter().zip(k3.as_slice()))
            .zip(k4.as_slice())
        {
            *r += (a + b * 2.0 + c * 2.0 + d) * (dt / 6.0);
        }
        if !next.is_finite() {
            return Err(LinalgError::NonFinite.into());
        }
        let next = next.hermitian_part();
        let trace = next.trace().re;
        if trace > 1.0 + TRACE_GROWTH_LIMIT {
            return Err(LinalgError::StepTooLarge { step, reason: format!("trace grew to {trace}") }.into());
        }
        let min = eigh(&HermitianOperator::new(next.clone())?)?.values.first().copied().unwrap_or(0.0);
        if min < NEGATIVITY_LIMIT {
            return Err(LinalgError::StepTooLarge {
                step,
                reason: format!("eigenvalue {min:e} below {NEGATIVITY_LIMIT:e}"),
            }
            .into());
        }
        out.push(DensityMatrix::from_matrix_unchecked(next.clone()));
        rho = next;
    }
    Ok(out)
}
