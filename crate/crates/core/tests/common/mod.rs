//! Full register (x) cursor Hamiltonian of the CNOT circuit, used only as a
//! reference for the reduced path-coordinate model.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use spinchain::feynman::{CircuitLayout, RegisterLabel, RegisterState, Spin};
use spinchain::DisorderRealization;

pub struct FullSpaceMachine {
    pub layout: CircuitLayout,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

fn idx(x: usize, label: usize) -> usize {
    (x - 1) * 4 + label
}

fn control_up(label: usize) -> bool {
    label >= 2
}

impl FullSpaceMachine {
    /// `H_C + V_R + V_L'` on the `4 s` dimensional space, register basis
    /// index `2 [c = +1] + [p = +1]`.
    pub fn new(layout: CircuitLayout, disorder: &DisorderRealization, g: f64) -> Self {
        let (s, a, b) = (layout.s, layout.a, layout.b());
        let n = 4 * s;
        let mut h = DMatrix::<f64>::zeros(n, n);
        let mut link = |x: usize, y: usize, op: &dyn Fn(usize) -> Option<usize>| {
            for l in 0..4 {
                if let Some(k) = op(l) {
                    h[(idx(x, k), idx(y, l))] += -0.5;
                    h[(idx(y, l), idx(x, k))] += -0.5;
                }
            }
        };
        let identity = |l: usize| Some(l);
        let up = |l: usize| control_up(l).then_some(l);
        let down = |l: usize| (!control_up(l)).then_some(l);
        let not_p = |l: usize| Some(l ^ 1);
        for x in 1..a {
            link(x + 1, x, &identity);
        }
        link(a + 1, a, &up);
        link(a + 2, a + 1, &not_p);
        link(b, a + 2, &up);
        link(a + 3, a, &down);
        link(a + 4, a + 3, &identity);
        link(b, a + 4, &down);
        for x in b..s {
            link(x + 1, x, &identity);
        }
        for x in 1..=s {
            let j = if x <= a + 2 { x } else { x - 2 };
            for l in 0..4 {
                h[(idx(x, l), idx(x, l))] += disorder.at(x) - g * j as f64;
            }
        }
        FullSpaceMachine {
            layout,
            eig: SymmetricEigen::new(h),
        }
    }

    /// `|1> (x) (up |+1,t> + down |-1,t>)`.
    pub fn initial(&self, up: f64, down: f64, target: Spin) -> DVector<Complex64> {
        let mut psi = DVector::zeros(4 * self.layout.s);
        psi[idx(1, RegisterLabel::new(Spin::Up, target).index())] = Complex64::new(up, 0.0);
        psi[idx(1, RegisterLabel::new(Spin::Down, target).index())] = Complex64::new(down, 0.0);
        psi
    }

    pub fn evolve(&self, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let v = self.eig.eigenvectors.map(|z| Complex64::new(z, 0.0));
        let mut c = v.transpose() * psi0;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= Complex64::from_polar(1.0, -self.eig.eigenvalues[k] * t);
        }
        v * c
    }

    pub fn cursor_distribution(&self, psi: &DVector<Complex64>) -> Vec<f64> {
        (1..=self.layout.s)
            .map(|x| (0..4).map(|l| psi[idx(x, l)].norm_sqr()).sum())
            .collect()
    }

    /// Register state with the cursor traced out over sites accepted by
    /// `cursor`.
    pub fn register<F: Fn(usize) -> bool>(
        &self,
        psi: &DVector<Complex64>,
        cursor: F,
    ) -> RegisterState {
        let mut reg = RegisterState::zero();
        for x in (1..=self.layout.s).filter(|&x| cursor(x)) {
            for k in 0..4 {
                for l in 0..4 {
                    reg.0[(k, l)] += psi[idx(x, k)] * psi[idx(x, l)].conj();
                }
            }
        }
        reg
    }
}
