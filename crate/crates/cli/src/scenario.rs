//! One realization of a scenario: disorder draw, dynamics, output table.

use spinchain::chain::{sample_disorder, ChainSpec};
use spinchain::feynman::{run_classical_input, superposed_series, CircuitSeries};
use spinchain::lindblad::dissipative_transport_run;
use spinchain::series::{uniform_grid, Tabular};
use spinchain::unitary::{arrival_peak, unitary_series, PureState};
use spinchain::{ObservableSeries, Result};

use crate::config::{ExperimentConfig, Scenario};

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_tabular<T: Tabular + ?Sized>(t: &T) -> Self {
        let (names, columns) = t
            .columns()
            .into_iter()
            .map(|(n, c)| (n.to_string(), c.to_vec()))
            .unzip();
        Table { names, columns }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }
}

impl Tabular for Table {
    fn columns(&self) -> Vec<(&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub index: usize,
    pub seed: u64,
    pub table: Table,
}

impl Realization {
    /// Scalar figures of merit: `(name, value)` in fixed order.
    pub fn summary(&self) -> Vec<(&'static str, f64)> {
        summary_metrics(&self.table)
    }
}

fn last(c: &[f64]) -> f64 {
    c.last().copied().unwrap_or(f64::NAN)
}

fn argmax(c: &[f64]) -> Option<usize> {
    c.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

pub fn summary_metrics(table: &Table) -> Vec<(&'static str, f64)> {
    if let (Some(t), Some(p)) = (table.column("t_star"), table.column("p_star")) {
        return vec![("t_star", last(t)), ("p_star", last(p))];
    }
    let col = |n| table.column(n).unwrap_or(&[]);
    let (t, p) = (col("t"), col("p_region"));
    let peak = argmax(p);
    let mut out = vec![
        ("final_mean_Q", last(col("mean_Q"))),
        ("final_p_region", last(p)),
        ("max_p_region", peak.map_or(f64::NAN, |i| p[i])),
        ("t_max_p_region", peak.map_or(f64::NAN, |i| t[i])),
    ];
    if let Some(s) = table.column("entropy") {
        out.push(("final_entropy", last(s)));
        out.push(("max_entropy", argmax(s).map_or(f64::NAN, |i| s[i])));
        out.push(("final_bell_fidelity", last(col("bell_fidelity"))));
    }
    out
}

fn circuit_table(s: &CircuitSeries) -> Table {
    Table::from_tabular(s)
}

fn observable_table(s: &ObservableSeries) -> Table {
    Table::from_tabular(s)
}

pub fn time_grid(config: &ExperimentConfig) -> Vec<f64> {
    uniform_grid(config.time.t_max, config.time.dt)
}

/// Runs realization `index` with disorder seed `seed`.
pub fn run_realization(config: &ExperimentConfig, index: usize, seed: u64) -> Result<Realization> {
    let c = config.chain;
    let spec = ChainSpec::new(c.s, c.sigma, c.g, seed)?;
    let bath = config.bath_spec();
    let table = match config.scenario {
        Scenario::Ballistic | Scenario::Localized | Scenario::Bloch => {
            let eig = spec.hamiltonian()?.diagonalize()?;
            let psi0 = PureState::site(c.s, 1)?;
            observable_table(&unitary_series(
                &eig,
                &psi0,
                &time_grid(config),
                &[c.s],
                false,
            )?)
        }
        Scenario::DissipativeTransport => {
            let bath = bath.expect("validated config has a bath");
            let psi0 = PureState::site(c.s, 1)?;
            observable_table(&dissipative_transport_run(
                &spec.hamiltonian()?,
                &bath,
                &psi0,
                &time_grid(config),
                &[c.s],
            )?)
        }
        Scenario::CnotClassical | Scenario::CnotSuperposed => {
            let layout = config
                .circuit_layout()
                .expect("validated config has a layout");
            let params = config.layout.expect("validated config has a layout");
            let disorder = sample_disorder(&spec);
            let times = time_grid(config);
            let series = if config.scenario == Scenario::CnotClassical {
                run_classical_input(
                    &layout,
                    &disorder,
                    c.g,
                    bath.as_ref(),
                    params.register_input,
                    &times,
                )?
            } else {
                superposed_series(
                    &layout,
                    &disorder,
                    c.g,
                    bath.as_ref(),
                    params.target,
                    &times,
                )?
            };
            circuit_table(&series)
        }
        Scenario::PeakScaling => {
            let eig = spec.hamiltonian()?.diagonalize()?;
            let psi0 = PureState::site(c.s, 1)?;
            let (t_star, p_star) = arrival_peak(&eig, &psi0, 1.5 * c.s as f64, config.time.dt)?;
            Table {
                names: vec!["s".into(), "t_star".into(), "p_star".into()],
                columns: vec![vec![c.s as f64], vec![t_star], vec![p_star]],
            }
        }
    };
    Ok(Realization { index, seed, table })
}
