use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{DensityMatrix, SimError};

const CLAMP: f64 = -1e-10;

/// Square root of a density matrix. Eigenvalues at round-off level are set to zero so that
/// their square roots do not leak into the result.
fn sqrt_psd(m: &DMatrix<C64>) -> Result<DMatrix<C64>, SimError> {
    let floor = 8.0 * m.nrows() as f64 * f64::EPSILON;
    let eig = m.clone().symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < CLAMP {
            return Err(SimError::InvalidDensity(format!("negative eigenvalue {v}")));
        }
        *v = if *v <= floor { 0.0 } else { v.sqrt() };
    }
    let d = DMatrix::from_diagonal(&vals.map(|v| C64::new(v, 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2`, evaluated as the squared trace
/// norm of `sqrt(rho1) sqrt(rho2)`, which is the same quantity and symmetric in its arguments.
pub fn state_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64, SimError> {
    if rho1.num_qubits() != rho2.num_qubits() {
        return Err(SimError::DimensionMismatch(
            rho1.num_qubits(),
            rho2.num_qubits(),
        ));
    }
    rho1.check_valid(1e-8)?;
    rho2.check_valid(1e-8)?;
    let prod = sqrt_psd(&rho1.to_nalgebra())? * sqrt_psd(&rho2.to_nalgebra())?;
    let tr: f64 = prod.singular_values().iter().sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::PAULI_X;

    #[test]
    fn orthogonal_and_identical() {
        let a = DensityMatrix::zero_state(1);
        let mut b = a.clone();
        b.apply_single(&PAULI_X, 0);
        assert!(state_fidelity(&a, &b).unwrap() < 1e-12);
        assert!((state_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let r = state_fidelity(&DensityMatrix::zero_state(1), &DensityMatrix::zero_state(2));
        assert_eq!(r, Err(SimError::DimensionMismatch(1, 2)));
    }
}
