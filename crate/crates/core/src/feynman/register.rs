//! Two-qubit register: reduced density matrices, entropy and Bell fidelity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::layout::{PeresBasis, RegisterLabel};
use crate::error::{Error, Result};
use crate::lindblad::hermitian_eigenvalues;

/// 4x4 register density matrix in the basis
/// `{|-1,-1>, |-1,+1>, |+1,-1>, |+1,+1>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState(pub DMatrix<Complex64>);

impl RegisterState {
    pub fn zero() -> Self {
        RegisterState(DMatrix::zeros(4, 4))
    }

    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        let v = DVector::from_column_slice(&amplitudes);
        RegisterState(&v * v.adjoint())
    }

    pub fn basis(label: RegisterLabel) -> Self {
        let mut m = DMatrix::zeros(4, 4);
        m[(label.index(), label.index())] = Complex64::new(1.0, 0.0);
        RegisterState(m)
    }

    /// Diagonal mixture of classical labels.
    pub fn mixture(weights: &[(RegisterLabel, f64)]) -> Self {
        let mut state = Self::zero();
        for &(label, w) in weights {
            state.0[(label.index(), label.index())] += Complex64::new(w, 0.0);
        }
        state
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, label: RegisterLabel) -> f64 {
        self.0[(label.index(), label.index())].re
    }

    /// Divides by the trace; `None` for a zero matrix.
    pub fn normalized(&self) -> Option<Self> {
        let tr = self.trace();
        (tr > 0.0).then(|| RegisterState(self.0.map(|z| z / tr)))
    }
}

/// `|Phi+> = (|-1,-1> + |+1,+1>) / sqrt 2`.
pub fn bell_phi_plus() -> [Complex64; 4] {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [r, z, z, r]
}

/// `-sum lambda ln lambda` (natural log), skipping non-positive eigenvalues.
pub fn von_neumann_entropy(rho: &RegisterState) -> f64 {
    hermitian_eigenvalues(&rho.0)
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

/// `<Phi+| rho |Phi+>`.
pub fn bell_fidelity(rho: &RegisterState) -> f64 {
    let phi = DVector::from_column_slice(&bell_phi_plus());
    (phi.adjoint() * &rho.0 * &phi)[(0, 0)].re
}

/// Site-basis (path-coordinate) blocks of a state spread over both
/// computational subspaces: `uu` and `dd` are the branch density matrices,
/// `ud[(j_u, j_d)] = <j_u, R^U| rho |j_d, R^D>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionBlocks {
    pub uu: DMatrix<Complex64>,
    pub dd: DMatrix<Complex64>,
    pub ud: DMatrix<Complex64>,
}

/// Traces out the cursor in the physical-site basis, keeping only sites
/// accepted by `cursor`. Cross-branch terms survive only on sites that both
/// paths visit.
pub fn register_reduced_state<F>(
    blocks: &PositionBlocks,
    up: &PeresBasis,
    down: &PeresBasis,
    cursor: F,
) -> Result<RegisterState>
where
    F: Fn(usize) -> bool,
{
    let n = up.len();
    for m in [&blocks.uu, &blocks.dd, &blocks.ud] {
        if m.nrows() != n || m.ncols() != n || down.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
    }
    let mut reg = RegisterState::zero();
    for (j, e) in up
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| cursor(e.site))
    {
        let l = e.label.index();
        reg.0[(l, l)] += blocks.uu[(j, j)];
    }
    for (j, e) in down
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| cursor(e.site))
    {
        let l = e.label.index();
        reg.0[(l, l)] += blocks.dd[(j, j)];
    }
    for (ju, eu) in up
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| cursor(e.site))
    {
        if let Some(jd) = down.entries.iter().position(|ed| ed.site == eu.site) {
            let (lu, ld) = (eu.label.index(), down.entries[jd].label.index());
            let c = blocks.ud[(ju, jd)];
            reg.0[(lu, ld)] += c;
            reg.0[(ld, lu)] += c.conj();
        }
    }
    Ok(reg)
}
