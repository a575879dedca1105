use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse temperature and system-bath coupling.
///
/// `zeta = 0` is admitted as the closed-system limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub beta: f64,
    pub zeta: f64,
}

impl BathSpec {
    pub fn new(beta: f64, zeta: f64) -> Result<Self> {
        if !(beta > 0.0) || beta.is_infinite() {
            return Err(Error::Domain {
                name: "beta",
                value: beta,
                requirement: "0 < beta < inf",
            });
        }
        if !(zeta >= 0.0) || zeta.is_infinite() {
            return Err(Error::Domain {
                name: "zeta",
                value: zeta,
                requirement: "0 <= zeta < inf",
            });
        }
        Ok(BathSpec { beta, zeta })
    }
}

/// `gamma[(m, n)]` is the rate of the jump `n -> m` between energy levels
/// (ascending order); `widths[m] = sum_j gamma[(j, m)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRates {
    pub gamma: DMatrix<f64>,
    pub widths: DVector<f64>,
}

/// Bose occupation `1 / (exp(beta omega) - 1)`.
pub fn bose_factor(beta: f64, omega: f64) -> f64 {
    1.0 / (beta * omega).exp_m1()
}

impl TransitionRates {
    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    /// All-zero rates, for closed evolution.
    pub fn zero(dim: usize) -> Self {
        TransitionRates {
            gamma: DMatrix::zeros(dim, dim),
            widths: DVector::zeros(dim),
        }
    }

    /// Absorption `n -> n+1` at `1/(e^{beta omega} - 1)` and emission
    /// `n+1 -> n` at that plus one; only nearest levels are connected.
    pub fn new(eigenvalues: &[f64], bath: &BathSpec) -> Result<Self> {
        let n = eigenvalues.len();
        let mut gamma = DMatrix::zeros(n, n);
        for k in 0..n.saturating_sub(1) {
            let omega = eigenvalues[k + 1] - eigenvalues[k];
            if !(omega > 0.0) {
                return Err(Error::DegenerateGap {
                    lower: k + 1,
                    upper: k + 2,
                    omega,
                });
            }
            let occupation = bose_factor(bath.beta, omega);
            gamma[(k + 1, k)] = occupation;
            gamma[(k, k + 1)] = occupation + 1.0;
        }
        let widths = DVector::from_fn(n, |m, _| gamma.column(m).sum());
        Ok(TransitionRates { gamma, widths })
    }

    /// Rate matrix `A` of `dp/dt = A p`: `A[(m, c)] = zeta gamma[(m, c)]`
    /// off the diagonal and `-zeta widths[m]` on it.
    pub fn generator(&self, zeta: f64) -> DMatrix<f64> {
        let mut a = &self.gamma * zeta;
        for m in 0..self.dim() {
            a[(m, m)] -= zeta * self.widths[m];
        }
        a
    }
}

pub fn transition_rates(eigenvalues: &[f64], bath: &BathSpec) -> Result<TransitionRates> {
    TransitionRates::new(eigenvalues, bath)
}

/// Gibbs populations `p_m ~ exp(-beta e_m)`.
pub fn thermal_fixed_point(eigenvalues: &[f64], beta: f64) -> Result<DVector<f64>> {
    if !(beta > 0.0) {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            requirement: "beta > 0",
        });
    }
    let e_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights = DVector::from_iterator(
        eigenvalues.len(),
        eigenvalues.iter().map(|e| (-beta * (e - e_min)).exp()),
    );
    let z = weights.sum();
    Ok(weights / z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bath(beta: f64) -> BathSpec {
        BathSpec::new(beta, 1.0).unwrap()
    }

    #[test]
    fn bose_rates_at_unit_gap() {
        // 1 / (e - 1) = 0.5819767...
        let r = transition_rates(&[0.0, 1.0], &bath(1.0)).unwrap();
        assert_abs_diff_eq!(r.gamma[(1, 0)], 0.58198, epsilon = 1e-5);
        assert_abs_diff_eq!(r.gamma[(0, 1)], 1.58198, epsilon = 1e-5);
        assert_eq!(r.gamma[(0, 0)], 0.0);
        assert_abs_diff_eq!(r.widths[0], r.gamma[(1, 0)], epsilon = 0.0);
        assert_abs_diff_eq!(r.widths[1], r.gamma[(0, 1)], epsilon = 0.0);
    }

    #[test]
    fn cold_limit() {
        let r = transition_rates(&[0.0, 1.0], &bath(50.0)).unwrap();
        assert!(r.gamma[(1, 0)] < 1e-20);
        assert_abs_diff_eq!(r.gamma[(0, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn detailed_balance_and_sparsity() {
        let e = [-3.1, -1.0, -0.2, 0.9, 2.4];
        let b = bath(1.3);
        let r = transition_rates(&e, &b).unwrap();
        for m in 0..5usize {
            for n in 0..5 {
                if m.abs_diff(n) != 1 {
                    assert_eq!(r.gamma[(m, n)], 0.0);
                }
                assert!(r.gamma[(m, n)] >= 0.0);
            }
        }
        for k in 0..4 {
            let ratio = r.gamma[(k + 1, k)] / r.gamma[(k, k + 1)];
            assert_abs_diff_eq!(ratio, (-b.beta * (e[k + 1] - e[k])).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn degenerate_gap_is_rejected() {
        assert!(matches!(
            transition_rates(&[0.0, 0.5, 0.5], &bath(1.0)),
            Err(Error::DegenerateGap {
                lower: 2,
                upper: 3,
                ..
            })
        ));
    }

    #[test]
    fn gibbs_vector() {
        let p = thermal_fixed_point(&[0.0, 1.0], 1.0).unwrap();
        assert_abs_diff_eq!(p[0], 0.73106, epsilon = 1e-5);
        assert_abs_diff_eq!(p[1], 0.26894, epsilon = 1e-5);
        let p = thermal_fixed_point(&[-2.0, 0.3, 1.0, 5.0], 1e-12).unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-10);
        }
        assert!(thermal_fixed_point(&[0.0], 0.0).is_err());
    }

    #[test]
    fn gibbs_is_stationary() {
        let e = [-40.1, -38.3, -36.2, -33.9, -32.5, -30.0];
        let b = BathSpec::new(1.0, 0.05).unwrap();
        let r = transition_rates(&e, &b).unwrap();
        let residual = r.generator(b.zeta) * thermal_fixed_point(&e, b.beta).unwrap();
        assert!(residual.amax() < 1e-12);
    }

    #[test]
    fn bath_validation() {
        assert!(BathSpec::new(0.0, 0.1).is_err());
        assert!(BathSpec::new(1.0, -0.1).is_err());
        assert!(BathSpec::new(1.0, 0.0).is_ok());
    }
}
