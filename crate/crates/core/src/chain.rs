//! Tight-binding chain Hamiltonians (free, disordered, tilted) and
//! localization diagnostics.
//!
//! Sites are labelled `1..=s` in the public API; vectors store site `x` at
//! index `x - 1`. Units have hbar = 1 and hopping amplitude 1/2.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::eigen::{tridiagonal_eigen, EigenSystem};
use crate::error::{Error, Result};

/// Nearest-neighbour hopping of every chain in this crate.
pub const HOPPING: f64 = -0.5;

/// Seed used when a run does not name one.
pub const DEFAULT_SEED: u64 = 1;

/// Chain length, disorder strength, tilt and disorder seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub s: usize,
    pub sigma: f64,
    pub g: f64,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(s: usize, sigma: f64, g: f64, seed: u64) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidDimension { dim: s, min: 2 });
        }
        if !(sigma >= 0.0) {
            return Err(Error::Domain {
                name: "sigma",
                value: sigma,
                requirement: "sigma >= 0",
            });
        }
        if !(g >= 0.0) {
            return Err(Error::Domain {
                name: "g",
                value: g,
                requirement: "g >= 0",
            });
        }
        Ok(ChainSpec { s, sigma, g, seed })
    }

    /// `H_0 + V_R + V_L` for this spec's disorder realization and tilt.
    pub fn hamiltonian(&self) -> Result<HamiltonianOperator> {
        let disorder = sample_disorder(self);
        assemble_hamiltonian(
            &build_free_chain(self.s)?,
            &[
                disorder.to_potential(),
                build_linear_potential(self.s, self.g)?,
            ],
        )
    }
}

/// Static on-site energies `eps_x`, one per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DisorderRealization {
    pub epsilons: Vec<f64>,
}

impl DisorderRealization {
    pub fn zeros(s: usize) -> Self {
        DisorderRealization {
            epsilons: vec![0.0; s],
        }
    }

    pub fn len(&self) -> usize {
        self.epsilons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty()
    }

    /// Energy at 1-based site `x`.
    pub fn at(&self, x: usize) -> f64 {
        self.epsilons[x - 1]
    }

    pub fn to_potential(&self) -> PotentialProfile {
        PotentialProfile {
            values: self.epsilons.clone(),
        }
    }
}

/// Diagonal potential `f(x)`, one value per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub values: Vec<f64>,
}

impl PotentialProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Real symmetric tridiagonal Hamiltonian in the site (or path-coordinate)
/// basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianOperator {
    pub diagonal: Vec<f64>,
    pub hopping: Vec<f64>,
}

impl HamiltonianOperator {
    /// Chain with uniform hopping `-1/2` and the given diagonal.
    pub fn with_diagonal(diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        let hopping = vec![HOPPING; diagonal.len() - 1];
        Ok(HamiltonianOperator { diagonal, hopping })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal));
        for (i, &t) in self.hopping.iter().enumerate() {
            h[(i, i + 1)] = t;
            h[(i + 1, i)] = t;
        }
        debug_assert_eq!(h.nrows(), n);
        h
    }

    /// `H psi` without forming the dense matrix.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|x| {
                let mut acc = psi[x] * self.diagonal[x];
                if x > 0 {
                    acc += psi[x - 1] * self.hopping[x - 1];
                }
                if x + 1 < n {
                    acc += psi[x + 1] * self.hopping[x];
                }
                acc
            })
            .collect()
    }

    pub fn diagonalize(&self) -> Result<EigenSystem> {
        diagonalize(self)
    }
}

pub fn build_free_chain(s: usize) -> Result<HamiltonianOperator> {
    if s < 2 {
        return Err(Error::InvalidDimension { dim: s, min: 2 });
    }
    HamiltonianOperator::with_diagonal(vec![0.0; s])
}

/// Closed-form spectrum of the free chain: `e_k = -cos(k pi / (s + 1))` with
/// `v_k(x) = sqrt(2 / (s + 1)) sin(k pi x / (s + 1))`.
pub fn free_eigensystem(s: usize) -> Result<EigenSystem> {
    if s < 2 {
        return Err(Error::InvalidDimension { dim: s, min: 2 });
    }
    let denom = (s + 1) as f64;
    let eigenvalues = DVector::from_fn(s, |k, _| -((k + 1) as f64 * PI / denom).cos());
    let norm = (2.0 / denom).sqrt();
    let eigenvectors = DMatrix::from_fn(s, s, |x, k| {
        norm * (((k + 1) * (x + 1)) as f64 * PI / denom).sin()
    });
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Draws `s` i.i.d. `N(0, sigma^2)` energies from ChaCha20 seeded with
/// `ChaCha20Rng::seed_from_u64(spec.seed)`, one normal draw per site in
/// site order.
pub fn sample_disorder(spec: &ChainSpec) -> DisorderRealization {
    if spec.sigma == 0.0 {
        return DisorderRealization::zeros(spec.s);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.sigma).expect("sigma validated by ChainSpec");
    DisorderRealization {
        epsilons: (0..spec.s).map(|_| normal.sample(&mut rng)).collect(),
    }
}

/// `V_L(x) = -g x` for `x = 1..=s`.
pub fn build_linear_potential(s: usize, g: f64) -> Result<PotentialProfile> {
    if !(g >= 0.0) {
        return Err(Error::Domain {
            name: "g",
            value: g,
            requirement: "g >= 0",
        });
    }
    Ok(PotentialProfile {
        values: (1..=s).map(|x| -g * x as f64).collect(),
    })
}

/// Adds the potentials onto the diagonal of `free`.
pub fn assemble_hamiltonian(
    free: &HamiltonianOperator,
    potentials: &[PotentialProfile],
) -> Result<HamiltonianOperator> {
    let mut h = free.clone();
    for potential in potentials {
        if potential.len() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: potential.len(),
            });
        }
        for (d, v) in h.diagonal.iter_mut().zip(&potential.values) {
            *d += v;
        }
    }
    Ok(h)
}

pub fn diagonalize(h: &HamiltonianOperator) -> Result<EigenSystem> {
    tridiagonal_eigen(&h.diagonal, &h.hopping)
}

/// `(2 pi^2 / sigma)^(2/3)`, the localization length for Gaussian disorder.
pub fn localization_length_gaussian(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain {
            name: "sigma",
            value: sigma,
            requirement: "sigma > 0",
        });
    }
    Ok((2.0 * PI * PI / sigma).powf(2.0 / 3.0))
}

/// Bloch localization length `bandwidth / g`.
pub fn localization_length_bloch(bandwidth: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Domain {
            name: "g",
            value: g,
            requirement: "g > 0",
        });
    }
    if !(bandwidth >= 0.0) {
        return Err(Error::Domain {
            name: "bandwidth",
            value: bandwidth,
            requirement: "bandwidth >= 0",
        });
    }
    Ok(bandwidth / g)
}

/// Bloch length for a spec: uses the bandwidth of the diagonalized `H_R`
/// (`H_0` when `sigma = 0`).
pub fn bloch_length_for(spec: &ChainSpec) -> Result<f64> {
    let h_r = assemble_hamiltonian(
        &build_free_chain(spec.s)?,
        &[sample_disorder(spec).to_potential()],
    )?;
    localization_length_bloch(diagonalize(&h_r)?.bandwidth(), spec.g)
}

/// Anything with a squared modulus.
pub trait Amplitude: Copy {
    fn norm_sqr(self) -> f64;
}

impl Amplitude for f64 {
    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Amplitude for Complex64 {
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// Inverse participation `1 / sum |psi_x|^4`, between 1 and `dim`.
pub fn participation_ratio<A: Amplitude>(state: &[A]) -> Result<f64> {
    let norm_sqr: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let quartic: f64 = state.iter().map(|a| a.norm_sqr().powi(2)).sum();
    Ok(1.0 / quartic)
}
