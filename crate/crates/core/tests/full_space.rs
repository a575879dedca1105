mod common;

use common::FullSpaceMachine;
use num_complex::Complex64;
use proptest::prelude::*;
use spinchain::chain::{sample_disorder, ChainSpec};
use spinchain::feynman::{run_classical_input, CircuitLayout, CnotMachine, RegisterLabel, Spin};
use spinchain::lindblad::{hermitian_eigenvalues, BathSpec};
use spinchain::series::uniform_grid;

#[test]
fn reduced_truth_table_matches_full_space() {
    let layout = CircuitLayout::new(10, 2).unwrap();
    let eps = sample_disorder(&ChainSpec::new(10, 0.3, 0.0, 4).unwrap());
    let full = FullSpaceMachine::new(layout, &eps, 0.0);
    for i in 0..4 {
        let input = RegisterLabel::from_index(i);
        let psi0 = match input.control {
            Spin::Up => full.initial(1.0, 0.0, input.target),
            Spin::Down => full.initial(0.0, 1.0, input.target),
        };
        let psi = full.evolve(&psi0, 12.0);
        let reg = full.register(&psi, |x| x >= layout.b());
        let p = reg.trace();
        assert!(p > 1e-3);
        assert!((reg.population(input.cnot()) - p).abs() < 1e-12);
    }
}

#[test]
fn classical_series_matches_full_space_with_tilt() {
    let layout = CircuitLayout::new(9, 2).unwrap();
    let eps = sample_disorder(&ChainSpec::new(9, 0.4, 0.0, 8).unwrap());
    let full = FullSpaceMachine::new(layout, &eps, 1.3);
    let input = RegisterLabel::new(Spin::Up, Spin::Up);
    let times = uniform_grid(20.0, 0.5);
    let reduced = run_classical_input(&layout, &eps, 1.3, None, input, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let psi = full.evolve(&full.initial(1.0, 0.0, Spin::Up), t);
        let beyond: f64 = full.cursor_distribution(&psi)[layout.b() - 1..]
            .iter()
            .sum();
        assert!((beyond - reduced.p_beyond_gate[i]).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_density_stays_physical(
        seed in 0u64..1000,
        sigma in 0.0f64..1.0,
        g in 0.5f64..3.0,
        zeta in 0.0f64..0.3,
        beta in 0.2f64..3.0,
        t in 0.0f64..500.0,
    ) {
        let layout = CircuitLayout::new(12, 3).unwrap();
        let eps = sample_disorder(&ChainSpec::new(12, sigma, 0.0, seed).unwrap());
        let machine = CnotMachine::new(layout, &eps, g, Some(BathSpec::new(beta, zeta).unwrap()), Spin::Down).unwrap();
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let block = machine.evolve(&machine.initial_block(r, r), t);
        prop_assert!((block.trace_uu() + block.trace_dd() - 1.0).abs() < 1e-9);
        let full = block.full_matrix();
        let defect = (&full - full.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-12);
        let min = hermitian_eigenvalues(&full).into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(min > -1e-9, "min eigenvalue {}", min);
    }
}
