//! Population (diagonal) master equation `dp/dt = A p`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::rates::{BathSpec, TransitionRates};
use crate::error::{Error, Result};

/// Populations may dip below zero by rounding; anything lower is an error.
pub const NEGATIVE_TOLERANCE: f64 = -1e-12;

pub(crate) fn check_probabilities(p: &DVector<f64>) -> Result<()> {
    for (index, &value) in p.iter().enumerate() {
        if !(value >= NEGATIVE_TOLERANCE) {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    Ok(())
}

fn check_dims(rates: &TransitionRates, p0: &DVector<f64>) -> Result<()> {
    if rates.dim() != p0.len() {
        return Err(Error::DimensionMismatch {
            expected: rates.dim(),
            found: p0.len(),
        });
    }
    Ok(())
}

/// `exp(A t) p0` via Pade scaling-and-squaring.
pub fn propagate_populations(
    rates: &TransitionRates,
    bath: &BathSpec,
    p0: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    check_dims(rates, p0)?;
    check_probabilities(p0)?;
    if t == 0.0 || bath.zeta == 0.0 {
        return Ok(p0.clone());
    }
    Ok((rates.generator(bath.zeta) * t).exp() * p0)
}

/// Population evolution along time grids; one matrix exponential per
/// distinct grid spacing.
#[derive(Debug, Clone)]
pub struct PopulationPropagator {
    generator: DMatrix<f64>,
    closed: bool,
}

impl PopulationPropagator {
    pub fn new(rates: &TransitionRates, bath: &BathSpec) -> Self {
        PopulationPropagator {
            generator: rates.generator(bath.zeta),
            closed: bath.zeta == 0.0,
        }
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn at(&self, p0: &DVector<f64>, t: f64) -> DVector<f64> {
        if self.closed || t == 0.0 {
            return p0.clone();
        }
        (&self.generator * t).exp() * p0
    }

    /// Populations at every time of an increasing grid, starting from `p0`
    /// at `t = 0`.
    pub fn on_grid(&self, p0: &DVector<f64>, times: &[f64]) -> Vec<DVector<f64>> {
        let mut steps: HashMap<u64, DMatrix<f64>> = HashMap::new();
        let mut out = Vec::with_capacity(times.len());
        let mut p = p0.clone();
        let mut last = 0.0;
        for &t in times {
            let dt = t - last;
            if !self.closed && dt != 0.0 {
                let e = steps
                    .entry(dt.to_bits())
                    .or_insert_with(|| (&self.generator * dt).exp());
                p = &*e * &p;
            }
            last = t;
            out.push(p.clone());
        }
        out
    }
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances for [`integrate_populations`].
#[derive(Debug, Clone, Copy)]
pub struct IntegratorTolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorTolerance {
    fn default() -> Self {
        IntegratorTolerance {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 5_000_000,
        }
    }
}

/// Adaptive Dormand-Prince integration of the same population equation,
/// used to cross-check [`propagate_populations`].
pub fn integrate_populations(
    rates: &TransitionRates,
    bath: &BathSpec,
    p0: &DVector<f64>,
    t: f64,
    tol: IntegratorTolerance,
) -> Result<DVector<f64>> {
    check_dims(rates, p0)?;
    check_probabilities(p0)?;
    let a = rates.generator(bath.zeta);
    let scale = a.amax().max(1e-300);
    let mut h = (0.01 / scale).min(t.max(f64::MIN_POSITIVE));
    let mut time = 0.0;
    let mut y = p0.clone();
    let mut k: [DVector<f64>; 7] = std::array::from_fn(|_| DVector::zeros(p0.len()));
    let mut steps = 0;
    while time < t {
        if steps == tol.max_steps {
            return Err(Error::Convergence {
                index: 0,
                iterations: steps,
                residual: t - time,
            });
        }
        steps += 1;
        h = h.min(t - time);
        k[0] = &a * &y;
        for stage in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(stage) {
                if A[stage][j] != 0.0 {
                    ys.axpy(h * A[stage][j], kj, 1.0);
                }
            }
            k[stage] = &a * &ys;
        }
        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for (j, kj) in k.iter().enumerate() {
            y5.axpy(h * B5[j], kj, 1.0);
            err.axpy(h * (B5[j] - B4[j]), kj, 1.0);
        }
        let norm = err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (y0, y1))| {
                let sc = tol.atol + tol.rtol * y0.abs().max(y1.abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / y.len() as f64;
        let norm = norm.sqrt();
        if norm <= 1.0 {
            time += h;
            y = y5;
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(y)
}
