//! Lindblad evolution in the energy representation.
//!
//! With jump operators `|m><n|` between eigenstates and nearest-level rates,
//! the master equation splits into a classical rate equation for the
//! populations and independent exponential decay of each coherence.

mod populations;
mod rates;

pub use populations::{
    integrate_populations, propagate_populations, IntegratorTolerance, PopulationPropagator,
    NEGATIVE_TOLERANCE,
};
pub use rates::{bose_factor, thermal_fixed_point, transition_rates, BathSpec, TransitionRates};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chain::HamiltonianOperator;
use crate::eigen::EigenSystem;
use crate::error::{Error, Result};
use crate::series::{validate_time_grid, ObservableSeries};
use crate::unitary::{distribution_moments, region_probability, PureState};

/// `exp{[-i (e_m - e_n) - zeta (w_m + w_n) / 2] t}` for one coherence.
pub fn coherence_factor(energy_difference: f64, width_sum: f64, zeta: f64, t: f64) -> Complex64 {
    Complex64::from_polar((-0.5 * zeta * width_sum * t).exp(), -energy_difference * t)
}

/// Density matrix in the energy eigenbasis of a chain Hamiltonian, split
/// into populations and a zero-diagonal coherence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRepDensity {
    pub populations: DVector<f64>,
    pub coherences: DMatrix<Complex64>,
}

impl EnergyRepDensity {
    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn from_matrix(rho: &DMatrix<Complex64>) -> Self {
        let n = rho.nrows();
        let populations = DVector::from_fn(n, |m, _| rho[(m, m)].re);
        let mut coherences = rho.clone();
        coherences.fill_diagonal(Complex64::new(0.0, 0.0));
        EnergyRepDensity {
            populations,
            coherences,
        }
    }

    /// `|c><c|` with `c = V^T psi`.
    pub fn from_pure(eig: &EigenSystem, psi: &PureState) -> Result<Self> {
        let amps = DVector::from_column_slice(psi.amplitudes());
        if amps.len() != eig.dim() {
            return Err(Error::DimensionMismatch {
                expected: eig.dim(),
                found: amps.len(),
            });
        }
        let c = eig.eigenvectors.map(|v| Complex64::new(v, 0.0)).transpose() * amps;
        Ok(Self::from_matrix(&(&c * c.adjoint())))
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: DVector<f64>) -> Self {
        let n = populations.len();
        EnergyRepDensity {
            populations,
            coherences: DMatrix::zeros(n, n),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let mut rho = self.coherences.clone();
        for m in 0..self.dim() {
            rho[(m, m)] = Complex64::new(self.populations[m], 0.0);
        }
        rho
    }

    pub fn trace(&self) -> f64 {
        self.populations.sum()
    }
}

/// Evolves every off-diagonal entry by its closed-form factor; the returned
/// matrix has a zero diagonal.
pub fn propagate_coherences(
    eigenvalues: &[f64],
    rates: &TransitionRates,
    bath: &BathSpec,
    coherences: &DMatrix<Complex64>,
    t: f64,
) -> Result<DMatrix<Complex64>> {
    let n = eigenvalues.len();
    if coherences.nrows() != n || coherences.ncols() != n || rates.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coherences.nrows(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |m, k| {
        if m == k {
            Complex64::new(0.0, 0.0)
        } else {
            coherences[(m, k)]
                * coherence_factor(
                    eigenvalues[m] - eigenvalues[k],
                    rates.widths[m] + rates.widths[k],
                    bath.zeta,
                    t,
                )
        }
    }))
}

/// Hermitian density matrix in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub DMatrix<Complex64>);

impl DensityMatrix {
    pub fn pure(psi: &PureState) -> Self {
        let v = DVector::from_column_slice(psi.amplitudes());
        DensityMatrix(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.0)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    nalgebra::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

fn rotate(v: &DMatrix<f64>, rho: &DMatrix<Complex64>, transpose_first: bool) -> DMatrix<Complex64> {
    let re = rho.map(|z| z.re);
    let im = rho.map(|z| z.im);
    let (re, im) = if transpose_first {
        (v.transpose() * re * v, v.transpose() * im * v)
    } else {
        (v * re * v.transpose(), v * im * v.transpose())
    };
    re.zip_map(&im, Complex64::new)
}

/// `V rho V^T`.
pub fn to_position_representation(
    eig: &EigenSystem,
    rho: &EnergyRepDensity,
) -> Result<DensityMatrix> {
    if rho.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            found: rho.dim(),
        });
    }
    Ok(DensityMatrix(rotate(
        &eig.eigenvectors,
        &rho.to_matrix(),
        false,
    )))
}

/// `V^T rho V`.
pub fn to_energy_representation(
    eig: &EigenSystem,
    rho: &DensityMatrix,
) -> Result<EnergyRepDensity> {
    if rho.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            found: rho.dim(),
        });
    }
    Ok(EnergyRepDensity::from_matrix(&rotate(
        &eig.eigenvectors,
        &rho.0,
        true,
    )))
}

/// Site-basis diagonal `rho_xx = sum_{m,n} V_xm rho_mn V_xn` without forming
/// the whole rotated matrix.
pub fn position_probabilities(eig: &EigenSystem, rho: &EnergyRepDensity) -> Vec<f64> {
    let v = &eig.eigenvectors;
    let n = eig.dim();
    let re = rho.to_matrix().map(|z| z.re);
    let w = v * re;
    (0..n)
        .map(|x| (0..n).map(|m| w[(x, m)] * v[(x, m)]).sum())
        .collect()
}

/// `(Tr(Q rho), Tr(Q^2 rho) - Tr(Q rho)^2, sum_{x in region} rho_xx)`.
pub fn density_observables(rho: &DensityMatrix, region: &[usize]) -> Result<(f64, f64, f64)> {
    let probs = rho.diagonal();
    let (mean, var) = distribution_moments(&probs);
    Ok((mean, var, region_probability(&probs, region)?))
}

/// A diagonalized chain coupled to a bath, ready to evolve energy-basis
/// density matrices.
#[derive(Debug, Clone)]
pub struct OpenChain {
    pub eig: EigenSystem,
    pub rates: TransitionRates,
    pub bath: BathSpec,
    populations: PopulationPropagator,
}

impl OpenChain {
    pub fn new(h: &HamiltonianOperator, bath: BathSpec) -> Result<Self> {
        Self::from_eigensystem(h.diagonalize()?, bath)
    }

    pub fn from_eigensystem(eig: EigenSystem, bath: BathSpec) -> Result<Self> {
        let rates = if bath.zeta == 0.0 {
            TransitionRates::zero(eig.dim())
        } else {
            TransitionRates::new(eig.eigenvalues.as_slice(), &bath)?
        };
        let populations = PopulationPropagator::new(&rates, &bath);
        Ok(OpenChain {
            eig,
            rates,
            bath,
            populations,
        })
    }

    /// Unitary evolution expressed through the same machinery.
    pub fn closed(eig: EigenSystem) -> Self {
        let rates = TransitionRates::zero(eig.dim());
        let bath = BathSpec {
            beta: 1.0,
            zeta: 0.0,
        };
        let populations = PopulationPropagator::new(&rates, &bath);
        OpenChain {
            eig,
            rates,
            bath,
            populations,
        }
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn coherences_at(&self, coherences: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        propagate_coherences(
            self.eig.eigenvalues.as_slice(),
            &self.rates,
            &self.bath,
            coherences,
            t,
        )
        .expect("dimensions fixed at construction")
    }

    pub fn evolve(&self, rho0: &EnergyRepDensity, t: f64) -> EnergyRepDensity {
        EnergyRepDensity {
            populations: self.populations.at(&rho0.populations, t),
            coherences: self.coherences_at(&rho0.coherences, t),
        }
    }

    /// Energy-basis states on an increasing time grid.
    pub fn evolve_on_grid(
        &self,
        rho0: &EnergyRepDensity,
        times: &[f64],
    ) -> Result<Vec<EnergyRepDensity>> {
        validate_time_grid(times)?;
        populations::check_probabilities(&rho0.populations)?;
        Ok(self
            .populations
            .on_grid(&rho0.populations, times)
            .into_iter()
            .zip(times)
            .map(|(populations, &t)| EnergyRepDensity {
                populations,
                coherences: self.coherences_at(&rho0.coherences, t),
            })
            .collect())
    }
}

/// Diagonalize, rotate the initial state to the energy basis, propagate
/// populations and coherences, rotate back and record observables.
pub fn dissipative_transport_run(
    h: &HamiltonianOperator,
    bath: &BathSpec,
    psi0: &PureState,
    times: &[f64],
    region: &[usize],
) -> Result<ObservableSeries> {
    let chain = OpenChain::new(h, *bath)?;
    let rho0 = EnergyRepDensity::from_pure(&chain.eig, psi0)?;
    let mut series = ObservableSeries::with_capacity(times.len());
    for (rho, &t) in chain.evolve_on_grid(&rho0, times)?.iter().zip(times) {
        let probs = position_probabilities(&chain.eig, rho);
        let (mean, var) = distribution_moments(&probs);
        series.push(t, mean, var, region_probability(&probs, region)?);
    }
    Ok(series)
}
