//! Batched pure-state simulator.
//!
//! A [`StateBatch`] holds one 2^n-dimensional complex amplitude vector per
//! sample, and every gate is applied to all rows in one pass with a per-row
//! angle. Gates touch amplitudes in place through bit-indexed strided
//! updates; no 2^n x 2^n matrix is ever built on this path. The dense
//! matrix route exists only as [`dense_unitary`], a brute-force oracle for
//! cross-checking the strided updates on small registers.
//!
//! Amplitude layout: qubit 0 is the most significant bit of the basis
//! index, so for n qubits the stride of qubit q is `1 << (n - 1 - q)`.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result};

/// Hard cap on register width (2^24 amplitudes per row).
pub const MAX_QUBITS: usize = 24;

/// Cap for the dense-unitary oracle; above this the matrices get silly.
pub const MAX_ORACLE_QUBITS: usize = 6;

/// One concrete gate with bound angles, as used by the dense oracle and by
/// single-state walks. The batched path never materializes these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Rz { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl GateOp {
    /// The same operation inverted: rotations negate their angle, CNOT is
    /// its own inverse.
    pub fn inverse(self) -> Self {
        match self {
            GateOp::Rz { qubit, angle } => GateOp::Rz {
                qubit,
                angle: -angle,
            },
            GateOp::Ry { qubit, angle } => GateOp::Ry {
                qubit,
                angle: -angle,
            },
            cnot @ GateOp::Cnot { .. } => cnot,
        }
    }
}

#[inline]
pub(crate) fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

fn check_qubit(n_qubits: usize, qubit: usize) -> Result<()> {
    if qubit >= n_qubits {
        return Err(Error::QubitOutOfRange { qubit, n_qubits });
    }
    Ok(())
}

// --- row-level kernels -------------------------------------------------
//
// These operate on a single 2^n amplitude slice and are the only place
// that owns the bit conventions. The batch methods and the gradient
// engines both call into them.

pub(crate) fn apply_rz_row(amps: &mut [Complex64], n_qubits: usize, qubit: usize, angle: f64) {
    let mask = qubit_mask(n_qubits, qubit);
    let phase0 = Complex64::from_polar(1.0, -angle / 2.0);
    let phase1 = Complex64::from_polar(1.0, angle / 2.0);
    for (idx, amp) in amps.iter_mut().enumerate() {
        *amp *= if idx & mask == 0 { phase0 } else { phase1 };
    }
}

pub(crate) fn apply_ry_row(amps: &mut [Complex64], n_qubits: usize, qubit: usize, angle: f64) {
    let mask = qubit_mask(n_qubits, qubit);
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    for idx in 0..amps.len() {
        if idx & mask == 0 {
            let a = amps[idx];
            let b = amps[idx | mask];
            amps[idx] = c * a - s * b;
            amps[idx | mask] = s * a + c * b;
        }
    }
}

/// Fused general rotation RZ(omega) * RY(theta) * RZ(phi) as one 2x2 update.
pub(crate) fn apply_rot_row(
    amps: &mut [Complex64],
    n_qubits: usize,
    qubit: usize,
    phi: f64,
    theta: f64,
    omega: f64,
) {
    let mask = qubit_mask(n_qubits, qubit);
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let u00 = Complex64::from_polar(c, -(phi + omega) / 2.0);
    let u01 = -Complex64::from_polar(s, (phi - omega) / 2.0);
    let u10 = Complex64::from_polar(s, -(phi - omega) / 2.0);
    let u11 = Complex64::from_polar(c, (phi + omega) / 2.0);
    for idx in 0..amps.len() {
        if idx & mask == 0 {
            let a = amps[idx];
            let b = amps[idx | mask];
            amps[idx] = u00 * a + u01 * b;
            amps[idx | mask] = u10 * a + u11 * b;
        }
    }
}

pub(crate) fn apply_cnot_row(
    amps: &mut [Complex64],
    n_qubits: usize,
    control: usize,
    target: usize,
) {
    let cmask = qubit_mask(n_qubits, control);
    let tmask = qubit_mask(n_qubits, target);
    for idx in 0..amps.len() {
        if idx & cmask != 0 && idx & tmask == 0 {
            amps.swap(idx, idx | tmask);
        }
    }
}

// --- batched state -----------------------------------------------------

/// A batch of pure states, one row of 2^n amplitudes per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBatch {
    amplitudes: Vec<Complex64>,
    batch_size: usize,
    n_qubits: usize,
}

impl StateBatch {
    /// Every row initialized to the all-zeros basis state.
    pub fn zero_state(batch_size: usize, n_qubits: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be >= 1".into()));
        }
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1 << n_qubits;
        let mut amplitudes = vec![Complex64::ZERO; batch_size * dim];
        for row in 0..batch_size {
            amplitudes[row * dim] = Complex64::ONE;
        }
        Ok(StateBatch {
            amplitudes,
            batch_size,
            n_qubits,
        })
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Amplitudes per row.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let dim = self.dim();
        &self.amplitudes[i * dim..(i + 1) * dim]
    }

    /// Squared 2-norm of each row.
    pub fn row_norms_sqr(&self) -> Vec<f64> {
        self.amplitudes
            .chunks_exact(self.dim())
            .map(|row| row.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    fn check_angles(&self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.batch_size {
            return Err(Error::DimensionMismatch {
                expected: self.batch_size,
                got: angles.len(),
            });
        }
        Ok(())
    }

    /// RZ(angle_i) on the given qubit of every row i.
    pub fn rz(&mut self, qubit: usize, angles: &[f64]) -> Result<()> {
        check_qubit(self.n_qubits, qubit)?;
        self.check_angles(angles)?;
        let (n, dim) = (self.n_qubits, self.dim());
        self.amplitudes
            .par_chunks_mut(dim)
            .zip(angles.par_iter())
            .for_each(|(row, &angle)| apply_rz_row(row, n, qubit, angle));
        Ok(())
    }

    /// RY(angle_i) on the given qubit of every row i.
    pub fn ry(&mut self, qubit: usize, angles: &[f64]) -> Result<()> {
        check_qubit(self.n_qubits, qubit)?;
        self.check_angles(angles)?;
        let (n, dim) = (self.n_qubits, self.dim());
        self.amplitudes
            .par_chunks_mut(dim)
            .zip(angles.par_iter())
            .for_each(|(row, &angle)| apply_ry_row(row, n, qubit, angle));
        Ok(())
    }

    /// General rotation RZ(omega) RY(theta) RZ(phi), rightmost factor first,
    /// with per-row angle triples.
    pub fn rot(&mut self, qubit: usize, phi: &[f64], theta: &[f64], omega: &[f64]) -> Result<()> {
        check_qubit(self.n_qubits, qubit)?;
        self.check_angles(phi)?;
        self.check_angles(theta)?;
        self.check_angles(omega)?;
        let (n, dim) = (self.n_qubits, self.dim());
        self.amplitudes
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, row)| apply_rot_row(row, n, qubit, phi[i], theta[i], omega[i]));
        Ok(())
    }

    /// CNOT with the same wiring on every row.
    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_qubit(self.n_qubits, control)?;
        check_qubit(self.n_qubits, target)?;
        if control == target {
            return Err(Error::ControlTargetOverlap(control));
        }
        let (n, dim) = (self.n_qubits, self.dim());
        self.amplitudes
            .par_chunks_mut(dim)
            .for_each(|row| apply_cnot_row(row, n, control, target));
        Ok(())
    }

    /// Apply a bound gate sequence to every row (all rows get the same
    /// angles; used for inverse-circuit checks, not the encoding path).
    pub fn apply_ops(&mut self, ops: &[GateOp]) -> Result<()> {
        for &op in ops {
            match op {
                GateOp::Rz { qubit, angle } => self.rz(qubit, &vec![angle; self.batch_size])?,
                GateOp::Ry { qubit, angle } => self.ry(qubit, &vec![angle; self.batch_size])?,
                GateOp::Cnot { control, target } => self.cnot(control, target)?,
            }
        }
        Ok(())
    }

    /// Complex overlaps <reference|psi_i> for every row.
    pub(crate) fn overlaps(&self, reference: &[Complex64]) -> Result<Vec<Complex64>> {
        if reference.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: reference.len(),
            });
        }
        Ok(self
            .amplitudes
            .chunks_exact(self.dim())
            .map(|row| {
                row.iter()
                    .zip(reference.iter())
                    .map(|(a, r)| r.conj() * a)
                    .sum()
            })
            .collect())
    }

    /// Fidelities |<reference|psi_i>|^2 against a single reference state.
    pub fn fidelity(&self, reference: &[Complex64]) -> Result<Vec<f64>> {
        Ok(self
            .overlaps(reference)?
            .into_iter()
            .map(|o| o.norm_sqr())
            .collect())
    }
}

// --- dense oracle ------------------------------------------------------

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

fn identity(dim: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(dim, Complex64::ONE)
}

fn single_qubit_matrix(op: GateOp) -> Array2<Complex64> {
    match op {
        GateOp::Rz { angle, .. } => {
            let mut m = Array2::zeros((2, 2));
            m[[0, 0]] = Complex64::from_polar(1.0, -angle / 2.0);
            m[[1, 1]] = Complex64::from_polar(1.0, angle / 2.0);
            m
        }
        GateOp::Ry { angle, .. } => {
            let c = (angle / 2.0).cos();
            let s = (angle / 2.0).sin();
            let mut m = Array2::zeros((2, 2));
            m[[0, 0]] = Complex64::new(c, 0.0);
            m[[0, 1]] = Complex64::new(-s, 0.0);
            m[[1, 0]] = Complex64::new(s, 0.0);
            m[[1, 1]] = Complex64::new(c, 0.0);
            m
        }
        GateOp::Cnot { .. } => unreachable!("CNOT is not a single-qubit gate"),
    }
}

/// Full 2^n x 2^n matrix of one gate, by explicit Kronecker products
/// (permutation matrix for CNOT).
pub fn gate_matrix(n_qubits: usize, op: GateOp) -> Result<Array2<Complex64>> {
    let dim = 1 << n_qubits;
    match op {
        GateOp::Rz { qubit, .. } | GateOp::Ry { qubit, .. } => {
            check_qubit(n_qubits, qubit)?;
            let left = identity(1 << qubit);
            let right = identity(1 << (n_qubits - 1 - qubit));
            Ok(kron(&kron(&left, &single_qubit_matrix(op)), &right))
        }
        GateOp::Cnot { control, target } => {
            check_qubit(n_qubits, control)?;
            check_qubit(n_qubits, target)?;
            if control == target {
                return Err(Error::ControlTargetOverlap(control));
            }
            let cmask = qubit_mask(n_qubits, control);
            let tmask = qubit_mask(n_qubits, target);
            let mut m = Array2::zeros((dim, dim));
            for col in 0..dim {
                let row = if col & cmask != 0 { col ^ tmask } else { col };
                m[[row, col]] = Complex64::ONE;
            }
            Ok(m)
        }
    }
}

/// Brute-force unitary of a whole gate sequence, later gates multiplied on
/// the left. Verification only; capped at [`MAX_ORACLE_QUBITS`].
pub fn dense_unitary(n_qubits: usize, ops: &[GateOp]) -> Result<Array2<Complex64>> {
    if n_qubits == 0 || n_qubits > MAX_ORACLE_QUBITS {
        return Err(Error::QubitCount {
            n_qubits,
            max: MAX_ORACLE_QUBITS,
        });
    }
    let mut u = identity(1 << n_qubits);
    for &op in ops {
        u = gate_matrix(n_qubits, op)?.dot(&u);
    }
    Ok(u)
}

/// Apply a dense matrix to the all-zeros basis state (its first column).
pub fn dense_apply_zero(u: &Array2<Complex64>) -> Vec<Complex64> {
    u.column(0).to_vec()
}
