use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::gates::{single_qubit_matrix, Mat2};
use super::SimError;
use crate::circuit::{CircuitError, Gate, GateKind};

/// Row-major `2^n x 2^n` density matrix; basis index bit `q` is the state of qubit `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero_state(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        data[0] = C64::new(1.0, 0.0);
        Self { n, data }
    }

    /// `|psi><psi|`; `psi` must have length `2^n`.
    pub fn from_pure(psi: &[C64]) -> Self {
        let dim = psi.len();
        assert!(dim.is_power_of_two(), "state length must be a power of two");
        let n = dim.trailing_zeros() as usize;
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        Self { n, data }
    }

    /// Wrap raw row-major entries; `data.len()` must be `4^n`.
    pub fn from_raw(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), 1usize << (2 * n), "raw data has the wrong size");
        Self { n, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.get(i, i).re.max(0.0))
            .collect()
    }

    /// `rho -> U rho U^dagger` on qubit `q`.
    pub fn apply_single(&mut self, u: &Mat2, q: usize) {
        let dim = self.dim();
        let m = 1usize << q;
        for i0 in (0..dim).filter(|i| i & m == 0) {
            let i1 = i0 | m;
            for j in 0..dim {
                let (r0, r1) = (self.data[i0 * dim + j], self.data[i1 * dim + j]);
                self.data[i0 * dim + j] = u[0][0] * r0 + u[0][1] * r1;
                self.data[i1 * dim + j] = u[1][0] * r0 + u[1][1] * r1;
            }
        }
        for i in 0..dim {
            let row = &mut self.data[i * dim..(i + 1) * dim];
            for j0 in (0..dim).filter(|j| j & m == 0) {
                let j1 = j0 | m;
                let (a0, a1) = (row[j0], row[j1]);
                row[j0] = a0 * u[0][0].conj() + a1 * u[0][1].conj();
                row[j1] = a0 * u[1][0].conj() + a1 * u[1][1].conj();
            }
        }
    }

    /// Conjugate by a basis permutation `perm` (an involution for cx and swap).
    fn permute(&mut self, perm: impl Fn(usize) -> usize) {
        let dim = self.dim();
        let old = self.data.clone();
        for i in 0..dim {
            let pi = perm(i);
            for j in 0..dim {
                self.data[pi * dim + perm(j)] = old[i * dim + j];
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        self.permute(|i| if i & c != 0 { i ^ t } else { i });
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        self.permute(|i| {
            let (x, y) = (i >> a & 1, i >> b & 1);
            if x == y {
                i
            } else {
                i ^ (1 << a) ^ (1 << b)
            }
        });
    }

    /// Apply a bound unitary gate.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), CircuitError> {
        match g.kind {
            GateKind::CX => self.apply_cx(g.qubits[0], g.qubits[1]),
            GateKind::Swap => self.apply_swap(g.qubits[0], g.qubits[1]),
            _ => {
                if let Some(u) = single_qubit_matrix(&g.kind)? {
                    self.apply_single(&u, g.qubits[0]);
                }
            }
        }
        Ok(())
    }

    /// Trace out qubit `q` and re-prepare it in `|0>`.
    pub fn reset(&mut self, q: usize) {
        let dim = self.dim();
        let m = 1usize << q;
        let old = self.data.clone();
        for i in 0..dim {
            for j in 0..dim {
                self.data[i * dim + j] = if i & m == 0 && j & m == 0 {
                    old[i * dim + j] + old[(i | m) * dim + (j | m)]
                } else {
                    C64::new(0.0, 0.0)
                };
            }
        }
    }

    /// Pauli conjugation helpers used by the noise channels.
    pub(crate) fn pauli_conjugated(&self, q: usize, pauli: char) -> Vec<C64> {
        let dim = self.dim();
        let m = 1usize << q;
        let sign = |i: usize| if i & m != 0 { -1.0 } else { 1.0 };
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = match pauli {
                    'X' => self.data[(i ^ m) * dim + (j ^ m)],
                    // Y rho Y picks up the sign pattern of Z on the flipped entries.
                    'Y' => self.data[(i ^ m) * dim + (j ^ m)] * (sign(i) * sign(j)),
                    _ => self.data[i * dim + j] * (sign(i) * sign(j)),
                };
            }
        }
        out
    }

    pub(crate) fn mix(&mut self, keep: f64, terms: &[(f64, Vec<C64>)]) {
        for (k, v) in self.data.iter_mut().enumerate() {
            let mut acc = *v * keep;
            for (w, t) in terms {
                acc += t[k] * *w;
            }
            *v = acc;
        }
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        let d = self.dim();
        nalgebra::DMatrix::from_row_slice(d, d, &self.data)
    }

    /// Check Hermiticity, unit trace and positivity within `tol`.
    pub fn check_valid(&self, tol: f64) -> Result<(), SimError> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return Err(SimError::InvalidDensity(format!(
                        "not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(SimError::InvalidDensity(format!("trace {tr}")));
        }
        let eig = self.to_nalgebra().symmetric_eigenvalues();
        if let Some(l) = eig.iter().find(|l| **l < -tol) {
            return Err(SimError::InvalidDensity(format!("negative eigenvalue {l}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::PAULI_X;

    #[test]
    fn x_flips_ground_state() {
        let mut r = DensityMatrix::zero_state(1);
        r.apply_single(&PAULI_X, 0);
        assert_eq!(r.get(1, 1), C64::new(1.0, 0.0));
        assert_eq!(r.get(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn cx_creates_bell_populations() {
        let mut r = DensityMatrix::zero_state(2);
        r.apply_single(&crate::sim::gates::hadamard(), 0);
        r.apply_cx(0, 1);
        let p = r.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
        assert!((r.get(0, 3).re - 0.5).abs() < 1e-12);
        r.check_valid(1e-10).unwrap();
    }
}
