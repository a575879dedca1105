//! Closed-system propagation by spectral decomposition and position
//! observables.

use num_complex::Complex64;

use crate::eigen::EigenSystem;
use crate::error::{Error, Result};
use crate::series::{validate_time_grid, ObservableSeries};

/// Default grid step for [`arrival_peak`] scans.
pub const DEFAULT_PEAK_DT: f64 = 0.05;

const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized amplitudes over sites `1..=dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(PureState { amplitudes })
    }

    /// `|x>` for 1-based site `x`.
    pub fn site(dim: usize, x: usize) -> Result<Self> {
        if x == 0 || x > dim {
            return Err(Error::SiteOutOfRange { site: x, dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[x - 1] = Complex64::new(1.0, 0.0);
        Ok(PureState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Mean and variance of the site operator `Q = sum x |x><x|` for a
/// distribution over sites `1..=dim`.
pub fn distribution_moments(probabilities: &[f64]) -> (f64, f64) {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (i, p) in probabilities.iter().enumerate() {
        let x = (i + 1) as f64;
        m1 += x * p;
        m2 += x * x * p;
    }
    (m1, (m2 - m1 * m1).max(0.0))
}

pub fn position_moments(psi: &PureState) -> (f64, f64) {
    distribution_moments(&psi.probabilities())
}

/// Probability mass on a set of 1-based sites.
pub fn region_probability(probabilities: &[f64], region: &[usize]) -> Result<f64> {
    let dim = probabilities.len();
    region.iter().try_fold(0.0, |acc, &x| {
        if x == 0 || x > dim {
            Err(Error::SiteOutOfRange { site: x, dim })
        } else {
            Ok(acc + probabilities[x - 1])
        }
    })
}

pub fn site_probability(psi: &PureState, region: &[usize]) -> Result<f64> {
    region_probability(&psi.probabilities(), region)
}

/// An initial state expanded once in an eigenbasis, ready to be evaluated
/// at arbitrary times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator<'a> {
    eig: &'a EigenSystem,
    coefficients: Vec<Complex64>,
}

impl<'a> SpectralPropagator<'a> {
    pub fn new(eig: &'a EigenSystem, psi0: &PureState) -> Result<Self> {
        let n = eig.dim();
        if psi0.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi0.dim(),
            });
        }
        let coefficients = (0..n)
            .map(|k| {
                eig.eigenvector(k)
                    .iter()
                    .zip(psi0.amplitudes())
                    .map(|(v, a)| a * *v)
                    .sum()
            })
            .collect();
        Ok(SpectralPropagator { eig, coefficients })
    }

    fn phased(&self, t: f64) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .zip(self.eig.eigenvalues.iter())
            .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    /// `psi_t = sum_k exp(-i e_k t) v_k <v_k|psi_0>`.
    pub fn state_at(&self, t: f64) -> PureState {
        let n = self.eig.dim();
        let phased = self.phased(t);
        let v = &self.eig.eigenvectors;
        let amplitudes = (0..n)
            .map(|x| (0..n).map(|k| phased[k] * v[(x, k)]).sum())
            .collect();
        PureState { amplitudes }
    }

    /// Amplitude on a single 1-based site, O(dim) per call.
    pub fn amplitude_at(&self, x: usize, t: f64) -> Complex64 {
        let row = self.eig.eigenvectors.row(x - 1);
        self.coefficients
            .iter()
            .zip(self.eig.eigenvalues.iter())
            .zip(row.iter())
            .map(|((c, e), v)| c * Complex64::from_polar(*v, -e * t))
            .sum()
    }
}

pub fn evolve_pure(eig: &EigenSystem, psi0: &PureState, t: f64) -> Result<PureState> {
    Ok(SpectralPropagator::new(eig, psi0)?.state_at(t))
}

/// Grid scan of `P(Q = dim)(t)` over `0, dt, ..., t_max`; returns the first
/// time attaining the maximum and the maximum itself.
pub fn arrival_peak(
    eig: &EigenSystem,
    psi0: &PureState,
    t_max: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    if !(dt > 0.0) {
        return Err(Error::Domain {
            name: "dt",
            value: dt,
            requirement: "dt > 0",
        });
    }
    if !(t_max > 0.0) {
        return Err(Error::Domain {
            name: "t_max",
            value: t_max,
            requirement: "t_max > 0",
        });
    }
    let prop = SpectralPropagator::new(eig, psi0)?;
    let last = eig.dim();
    let steps = (t_max / dt).round() as usize;
    let mut best = (0.0, prop.amplitude_at(last, 0.0).norm_sqr());
    for i in 1..=steps {
        let t = i as f64 * dt;
        let p = prop.amplitude_at(last, t).norm_sqr();
        if p > best.1 {
            best = (t, p);
        }
    }
    Ok(best)
}

/// `E(Q)`, `var(Q)` and the region probability along a time grid.
pub fn unitary_series(
    eig: &EigenSystem,
    psi0: &PureState,
    times: &[f64],
    region: &[usize],
    keep_distribution: bool,
) -> Result<ObservableSeries> {
    validate_time_grid(times)?;
    let prop = SpectralPropagator::new(eig, psi0)?;
    let mut series = ObservableSeries::with_capacity(times.len());
    let mut distributions = Vec::new();
    for &t in times {
        let probs = prop.state_at(t).probabilities();
        let (mean, var) = distribution_moments(&probs);
        series.push(t, mean, var, region_probability(&probs, region)?);
        if keep_distribution {
            distributions.push(probs);
        }
    }
    if keep_distribution {
        series.site_probabilities = Some(distributions);
    }
    Ok(series)
}
