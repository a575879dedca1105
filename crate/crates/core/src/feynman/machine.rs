//! Dynamics of the CNOT machine in its two computational subspaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::{
    peres_basis, reduced_chain_hamiltonian, Branch, CircuitLayout, PeresBasis, RegisterLabel, Spin,
};
use super::register::{
    bell_fidelity, register_reduced_state, von_neumann_entropy, PositionBlocks, RegisterState,
};
use crate::chain::DisorderRealization;
use crate::error::{Error, Result};
use crate::lindblad::{coherence_factor, BathSpec, EnergyRepDensity, OpenChain};
use crate::series::{validate_time_grid, ObservableSeries, Tabular};
use crate::unitary::{distribution_moments, PureState, SpectralPropagator};

/// Below this cursor probability beyond the gate the conditional register
/// state is rounding noise and is reported as NaN.
pub const CONDITIONING_FLOOR: f64 = 1e-12;

/// Density matrix over both computational subspaces, each block in the
/// energy basis of its own reduced Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensity {
    pub uu: EnergyRepDensity,
    pub dd: EnergyRepDensity,
    /// `ud[(m, n)] = <m_U| rho |n_D>`.
    pub ud: DMatrix<Complex64>,
}

impl BlockDensity {
    pub fn trace_uu(&self) -> f64 {
        self.uu.trace()
    }

    pub fn trace_dd(&self) -> f64 {
        self.dd.trace()
    }

    /// `[[UU, UD], [UD^dagger, DD]]`.
    pub fn full_matrix(&self) -> DMatrix<Complex64> {
        let n = self.uu.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.uu.to_matrix());
        m.view_mut((n, n), (n, n)).copy_from(&self.dd.to_matrix());
        m.view_mut((0, n), (n, n)).copy_from(&self.ud);
        m.view_mut((n, 0), (n, n)).copy_from(&self.ud.adjoint());
        m
    }
}

/// Per-sample observables of a CNOT run. `p_region` and `p_beyond_gate`
/// both hold the probability of the cursor on sites `b..=s`; entropy is
/// that of the full register, fidelity that of the register conditioned on
/// the cursor beyond the gate.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct CircuitSeries {
    pub times: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub var_q: Vec<f64>,
    pub p_region: Vec<f64>,
    pub p_beyond_gate: Vec<f64>,
    pub entropy: Vec<f64>,
    pub bell_fidelity: Vec<f64>,
    pub trace_uu: Vec<f64>,
    pub trace_dd: Vec<f64>,
}

impl CircuitSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, s: CircuitSample) {
        self.times.push(t);
        self.mean_q.push(s.mean_q);
        self.var_q.push(s.var_q);
        self.p_region.push(s.p_beyond_gate);
        self.p_beyond_gate.push(s.p_beyond_gate);
        self.entropy.push(s.entropy);
        self.bell_fidelity.push(s.bell_fidelity);
        self.trace_uu.push(s.trace_uu);
        self.trace_dd.push(s.trace_dd);
    }

    pub fn observables(&self) -> ObservableSeries {
        ObservableSeries {
            times: self.times.clone(),
            mean_q: self.mean_q.clone(),
            var_q: self.var_q.clone(),
            p_region: self.p_region.clone(),
            site_probabilities: None,
        }
    }
}

impl Tabular for CircuitSeries {
    fn columns(&self) -> Vec<(&str, &[f64])> {
        vec![
            ("t", &self.times),
            ("mean_Q", &self.mean_q),
            ("var_Q", &self.var_q),
            ("p_region", &self.p_region),
            ("p_beyond_gate", &self.p_beyond_gate),
            ("entropy", &self.entropy),
            ("bell_fidelity", &self.bell_fidelity),
            ("trace_UU", &self.trace_uu),
            ("trace_DD", &self.trace_dd),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct CircuitSample {
    mean_q: f64,
    var_q: f64,
    p_beyond_gate: f64,
    entropy: f64,
    bell_fidelity: f64,
    trace_uu: f64,
    trace_dd: f64,
}

/// Both reduced chains of a CNOT circuit with their Peres bases and bath.
#[derive(Debug, Clone)]
pub struct CnotMachine {
    pub layout: CircuitLayout,
    pub up_basis: PeresBasis,
    pub down_basis: PeresBasis,
    pub up: OpenChain,
    pub down: OpenChain,
}

impl CnotMachine {
    /// `target` is the initial state of the controlled qubit; `bath = None`
    /// gives unitary evolution.
    pub fn new(
        layout: CircuitLayout,
        disorder: &DisorderRealization,
        g: f64,
        bath: Option<BathSpec>,
        target: Spin,
    ) -> Result<Self> {
        let chain = |branch| -> Result<OpenChain> {
            let eig = reduced_chain_hamiltonian(&layout, branch, disorder, g)?.diagonalize()?;
            match bath {
                Some(b) => OpenChain::from_eigensystem(eig, b),
                None => Ok(OpenChain::closed(eig)),
            }
        };
        Ok(CnotMachine {
            layout,
            up_basis: peres_basis(&layout, Branch::Up, RegisterLabel::new(Spin::Up, target))?,
            down_basis: peres_basis(
                &layout,
                Branch::Down,
                RegisterLabel::new(Spin::Down, target),
            )?,
            up: chain(Branch::Up)?,
            down: chain(Branch::Down)?,
        })
    }

    pub fn path_len(&self) -> usize {
        self.layout.path_len()
    }

    pub fn basis(&self, branch: Branch) -> &PeresBasis {
        match branch {
            Branch::Up => &self.up_basis,
            Branch::Down => &self.down_basis,
        }
    }

    pub fn chain(&self, branch: Branch) -> &OpenChain {
        match branch {
            Branch::Up => &self.up,
            Branch::Down => &self.down,
        }
    }

    /// `up |1, R^U_1> + down |1, R^D_1>` expressed blockwise.
    pub fn initial_block(&self, up: Complex64, down: Complex64) -> BlockDensity {
        let n = self.path_len();
        let cu = nalgebra::DVector::from_fn(n, |m, _| up * self.up.eig.eigenvectors[(0, m)]);
        let cd = nalgebra::DVector::from_fn(n, |m, _| down * self.down.eig.eigenvectors[(0, m)]);
        BlockDensity {
            uu: EnergyRepDensity::from_matrix(&(&cu * cu.adjoint())),
            dd: EnergyRepDensity::from_matrix(&(&cd * cd.adjoint())),
            ud: &cu * cd.adjoint(),
        }
    }

    /// Cross-subspace coherences only dephase:
    /// `ud_mn(t) = ud_mn(0) exp{[-i (e^U_m - e^D_n) - zeta (w^U_m + w^D_n)/2] t}`.
    pub fn evolve_cross(&self, ud0: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        let n = self.path_len();
        let zeta = self.up.bath.zeta;
        DMatrix::from_fn(n, n, |m, k| {
            ud0[(m, k)]
                * coherence_factor(
                    self.up.eig.eigenvalues[m] - self.down.eig.eigenvalues[k],
                    self.up.rates.widths[m] + self.down.rates.widths[k],
                    zeta,
                    t,
                )
        })
    }

    pub fn evolve(&self, block0: &BlockDensity, t: f64) -> BlockDensity {
        BlockDensity {
            uu: self.up.evolve(&block0.uu, t),
            dd: self.down.evolve(&block0.dd, t),
            ud: self.evolve_cross(&block0.ud, t),
        }
    }

    pub fn evolve_on_grid(
        &self,
        block0: &BlockDensity,
        times: &[f64],
    ) -> Result<Vec<BlockDensity>> {
        let uu = self.up.evolve_on_grid(&block0.uu, times)?;
        let dd = self.down.evolve_on_grid(&block0.dd, times)?;
        Ok(uu
            .into_iter()
            .zip(dd)
            .zip(times)
            .map(|((uu, dd), &t)| BlockDensity {
                uu,
                dd,
                ud: self.evolve_cross(&block0.ud, t),
            })
            .collect())
    }

    pub fn position_blocks(&self, block: &BlockDensity) -> PositionBlocks {
        let vu = self.up.eig.eigenvectors.map(|v| Complex64::new(v, 0.0));
        let vd = self.down.eig.eigenvectors.map(|v| Complex64::new(v, 0.0));
        PositionBlocks {
            uu: &vu * block.uu.to_matrix() * vu.transpose(),
            dd: &vd * block.dd.to_matrix() * vd.transpose(),
            ud: &vu * &block.ud * vd.transpose(),
        }
    }

    /// Cursor distribution over physical sites `1..=s`.
    pub fn cursor_distribution(&self, blocks: &PositionBlocks) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.s];
        for (j, e) in self.up_basis.entries.iter().enumerate() {
            p[e.site - 1] += blocks.uu[(j, j)].re;
        }
        for (j, e) in self.down_basis.entries.iter().enumerate() {
            p[e.site - 1] += blocks.dd[(j, j)].re;
        }
        p
    }

    pub fn register_state<F: Fn(usize) -> bool>(
        &self,
        blocks: &PositionBlocks,
        cursor: F,
    ) -> RegisterState {
        register_reduced_state(blocks, &self.up_basis, &self.down_basis, cursor)
            .expect("blocks built from this machine")
    }

    /// Register state given that the cursor sits beyond the switch, with the
    /// probability of that event.
    pub fn conditional_register(&self, blocks: &PositionBlocks) -> (Option<RegisterState>, f64) {
        let b = self.layout.b();
        let reg = self.register_state(blocks, |x| x >= b);
        let p = reg.trace();
        let cond = if p >= CONDITIONING_FLOOR {
            reg.normalized()
        } else {
            None
        };
        (cond, p)
    }

    fn sample(&self, block: &BlockDensity) -> CircuitSample {
        let blocks = self.position_blocks(block);
        let dist = self.cursor_distribution(&blocks);
        let (mean_q, var_q) = distribution_moments(&dist);
        let (cond, p_beyond_gate) = self.conditional_register(&blocks);
        CircuitSample {
            mean_q,
            var_q,
            p_beyond_gate,
            entropy: von_neumann_entropy(&self.register_state(&blocks, |_| true)),
            bell_fidelity: cond.map_or(f64::NAN, |r| bell_fidelity(&r)),
            trace_uu: block.trace_uu(),
            trace_dd: block.trace_dd(),
        }
    }

    pub fn series(&self, block0: &BlockDensity, times: &[f64]) -> Result<CircuitSeries> {
        let mut series = CircuitSeries::default();
        for (block, &t) in self.evolve_on_grid(block0, times)?.iter().zip(times) {
            series.push(t, self.sample(block));
        }
        Ok(series)
    }

    /// Unitary evolution of a classical input using the branch's pure state.
    fn classical_unitary_series(
        &self,
        input: RegisterLabel,
        times: &[f64],
    ) -> Result<CircuitSeries> {
        validate_time_grid(times)?;
        let branch = Branch::for_control(input.control);
        let basis = self.basis(branch);
        let eig = &self.chain(branch).eig;
        let psi0 = PureState::site(self.path_len(), 1)?;
        let prop = SpectralPropagator::new(eig, &psi0)?;
        let b = self.layout.b();
        let mut series = CircuitSeries::default();
        for &t in times {
            let probs = prop.state_at(t).probabilities();
            let mut dist = vec![0.0; self.layout.s];
            let mut reg = RegisterState::zero();
            let mut beyond = RegisterState::zero();
            for (e, p) in basis.entries.iter().zip(&probs) {
                dist[e.site - 1] += p;
                let l = e.label.index();
                reg.0[(l, l)] += p;
                if e.site >= b {
                    beyond.0[(l, l)] += p;
                }
            }
            let (mean_q, var_q) = distribution_moments(&dist);
            let p_beyond_gate = beyond.trace();
            let cond = (p_beyond_gate >= CONDITIONING_FLOOR)
                .then(|| beyond.normalized())
                .flatten();
            let (trace_uu, trace_dd) = match branch {
                Branch::Up => (1.0, 0.0),
                Branch::Down => (0.0, 1.0),
            };
            series.push(
                t,
                CircuitSample {
                    mean_q,
                    var_q,
                    p_beyond_gate,
                    entropy: von_neumann_entropy(&reg),
                    bell_fidelity: cond.map_or(f64::NAN, |r| bell_fidelity(&r)),
                    trace_uu,
                    trace_dd,
                },
            );
        }
        Ok(series)
    }
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Evolves `|1> (x) |input>`: the control qubit selects the branch and the
/// cursor starts at path coordinate 1.
pub fn run_classical_input(
    layout: &CircuitLayout,
    disorder: &DisorderRealization,
    g: f64,
    bath: Option<&BathSpec>,
    input: RegisterLabel,
    times: &[f64],
) -> Result<CircuitSeries> {
    let machine = CnotMachine::new(*layout, disorder, g, bath.copied(), input.target)?;
    match bath {
        None => machine.classical_unitary_series(input, times),
        Some(_) => {
            let block0 = match input.control {
                Spin::Up => machine.initial_block(unit(), zero()),
                Spin::Down => machine.initial_block(zero(), unit()),
            };
            machine.series(&block0, times)
        }
    }
}

/// Block density series for the control qubit in `(|+1> + |-1>)/sqrt 2`.
pub fn run_superposed_input(
    layout: &CircuitLayout,
    disorder: &DisorderRealization,
    g: f64,
    bath: Option<&BathSpec>,
    target: Spin,
    times: &[f64],
) -> Result<(CnotMachine, Vec<BlockDensity>)> {
    let machine = CnotMachine::new(*layout, disorder, g, bath.copied(), target)?;
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let blocks = machine.evolve_on_grid(&machine.initial_block(r, r), times)?;
    Ok((machine, blocks))
}

/// Observable series of the superposed-control run.
pub fn superposed_series(
    layout: &CircuitLayout,
    disorder: &DisorderRealization,
    g: f64,
    bath: Option<&BathSpec>,
    target: Spin,
    times: &[f64],
) -> Result<CircuitSeries> {
    let machine = CnotMachine::new(*layout, disorder, g, bath.copied(), target)?;
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    machine.series(&machine.initial_block(r, r), times)
}

/// Register state at the time of maximal arrival probability beyond the
/// gate, conditioned on the cursor having passed it (unitary dynamics).
pub fn truth_table_output(
    layout: &CircuitLayout,
    disorder: &DisorderRealization,
    g: f64,
    input: RegisterLabel,
    times: &[f64],
) -> Result<(f64, RegisterState)> {
    let series = run_classical_input(layout, disorder, g, None, input, times)?;
    let (i, _) = series
        .p_beyond_gate
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::TimeGrid { index: 0 })?;
    let machine = CnotMachine::new(*layout, disorder, g, None, input.target)?;
    let branch = Branch::for_control(input.control);
    let psi = SpectralPropagator::new(
        &machine.chain(branch).eig,
        &PureState::site(layout.path_len(), 1)?,
    )?
    .state_at(series.times[i]);
    let mut reg = RegisterState::zero();
    for (e, a) in machine.basis(branch).entries.iter().zip(psi.amplitudes()) {
        if e.site >= layout.b() {
            let l = e.label.index();
            reg.0[(l, l)] += a.norm_sqr();
        }
    }
    let p = reg.trace();
    Ok((p, reg.normalized().unwrap_or_else(RegisterState::zero)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{sample_disorder, ChainSpec};
    use crate::feynman::register::bell_fidelity;
    use crate::lindblad::{hermitian_eigenvalues, max_abs};
    use approx::assert_abs_diff_eq;

    fn gate_layout() -> CircuitLayout {
        CircuitLayout::new(22, 9).unwrap()
    }

    fn grid(t_max: f64, dt: f64) -> Vec<f64> {
        crate::series::uniform_grid(t_max, dt)
    }

    const UP_DOWN: RegisterLabel = RegisterLabel::new(Spin::Up, Spin::Down);

    #[test]
    fn clean_ballistic_passage_nearly_completes() {
        let l = gate_layout();
        let s = run_classical_input(
            &l,
            &DisorderRealization::zeros(22),
            0.0,
            None,
            UP_DOWN,
            &grid(200.0, 0.05),
        )
        .unwrap();
        let peak = s.p_beyond_gate.iter().copied().fold(0.0, f64::max);
        assert!(peak >= 0.9, "{peak}");
    }

    #[test]
    fn unitary_block_path_matches_pure_path() {
        let l = gate_layout();
        let eps = sample_disorder(&ChainSpec::new(22, 0.5, 0.0, 11).unwrap());
        let times = grid(30.0, 0.5);
        let pure = run_classical_input(&l, &eps, 1.0, None, UP_DOWN, &times).unwrap();
        let machine = CnotMachine::new(l, &eps, 1.0, None, Spin::Down).unwrap();
        let block = machine
            .series(&machine.initial_block(unit(), zero()), &times)
            .unwrap();
        for (a, b) in pure.mean_q.iter().zip(&block.mean_q) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        for (a, b) in pure.entropy.iter().zip(&block.entropy) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn superposed_blocks_stay_physical() {
        let l = gate_layout();
        let eps = sample_disorder(&ChainSpec::new(22, 0.5, 2.0, 1).unwrap());
        let bath = BathSpec::new(1.0, 0.05).unwrap();
        let (_, blocks) =
            run_superposed_input(&l, &eps, 2.0, Some(&bath), Spin::Down, &grid(400.0, 20.0))
                .unwrap();
        for block in &blocks {
            assert_abs_diff_eq!(block.trace_uu() + block.trace_dd(), 1.0, epsilon = 1e-9);
            let full = block.full_matrix();
            assert!(max_abs(&(&full - full.adjoint())) < 1e-12);
            let min = hermitian_eigenvalues(&full)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-9, "{min}");
        }
        let first = blocks[0].ud.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let last = blocks
            .last()
            .unwrap()
            .ud
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(first > 0.1);
        assert!(last < 1e-3 * first, "{last}");
    }

    #[test]
    fn clean_coherent_superposition_produces_phi_plus() {
        let l = gate_layout();
        let times = grid(60.0, 0.5);
        let (machine, blocks) = run_superposed_input(
            &l,
            &DisorderRealization::zeros(22),
            0.0,
            None,
            Spin::Down,
            &times,
        )
        .unwrap();
        for block in &blocks {
            let ud_norm: f64 = block.ud.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert_abs_diff_eq!(ud_norm, 0.5, epsilon = 1e-12);
            let (cond, _) = machine.conditional_register(&machine.position_blocks(block));
            if let Some(reg) = cond {
                assert_abs_diff_eq!(bell_fidelity(&reg), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn truth_table() {
        let l = CircuitLayout::new(12, 3).unwrap();
        let eps = sample_disorder(&ChainSpec::new(12, 0.2, 0.0, 2).unwrap());
        for i in 0..4 {
            let input = RegisterLabel::from_index(i);
            let (p, reg) = truth_table_output(&l, &eps, 0.0, input, &grid(40.0, 0.1)).unwrap();
            assert!(p > 0.1);
            assert_eq!(reg.population(input.cnot()), 1.0);
        }
    }
}
