//! Ensemble runs and parameter sweeps: parallel dispatch, file output and
//! the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use spinchain::series::{format_real, to_csv};
use thiserror::Error;

use crate::aggregate::{aggregate, mean};
use crate::config::{ConfigErrors, ExperimentConfig, SweepParam};
use crate::scenario::{run_realization, summary_metrics, Realization, Table};

pub const SEED_RULE: &str = "seed_i = first u64 of ChaCha20(seed_from_u64(master)) on stream i";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("numerical failure: {0}")]
    Numeric(#[from] spinchain::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } | CliError::ThreadPool(_) => 1,
        }
    }
}

/// Per-realization seed, independent of scheduling order and of any swept
/// parameter.
pub fn realization_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedEntry {
    pub index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepInfo {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
    pub directories: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub code_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub seed_rule: String,
    pub realizations: Vec<SeedEntry>,
    pub sweep: Option<SweepInfo>,
    pub threads: usize,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileDigest>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub directory: PathBuf,
    pub manifest: RunManifest,
    pub aggregate: Table,
    pub realizations: Vec<Realization>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub directory: PathBuf,
    pub manifest: RunManifest,
    pub table: Table,
}

struct Writer {
    root: PathBuf,
    files: Vec<FileDigest>,
}

impl Writer {
    fn new(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Writer {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, relative: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(relative);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.files.push(FileDigest {
            path: relative.to_string(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
        });
        Ok(())
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::ThreadPool(e.to_string()))
}

fn summary_csv(realizations: &[Realization]) -> String {
    let mut out = String::new();
    let Some(first) = realizations.first() else {
        return out;
    };
    let names: Vec<&str> = first.summary().iter().map(|m| m.0).collect();
    out.push_str("realization,seed,");
    out.push_str(&names.join(","));
    out.push('\n');
    for r in realizations {
        let values: Vec<String> = r.summary().iter().map(|m| format_real(m.1)).collect();
        out.push_str(&format!("{},{},{}\n", r.index, r.seed, values.join(",")));
    }
    out
}

/// Writes realization CSVs, the aggregate and the per-realization summary
/// under `prefix`.
fn write_ensemble(
    w: &mut Writer,
    prefix: &str,
    realizations: &[Realization],
) -> Result<Table, CliError> {
    for r in realizations {
        w.write(
            &format!("{prefix}realization_{:04}.csv", r.index),
            &to_csv(&r.table),
        )?;
    }
    let tables: Vec<&Table> = realizations.iter().map(|r| &r.table).collect();
    let agg = aggregate(&tables);
    w.write(&format!("{prefix}aggregate.csv"), &to_csv(&agg))?;
    w.write(&format!("{prefix}summary.csv"), &summary_csv(realizations))?;
    Ok(agg)
}

fn seeds(config: &ExperimentConfig) -> Vec<SeedEntry> {
    (0..config.ensemble_size)
        .map(|index| SeedEntry {
            index,
            seed: realization_seed(config.seed, index),
        })
        .collect()
}

fn started() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn write_manifest(w: &mut Writer, mut manifest: RunManifest) -> Result<RunManifest, CliError> {
    manifest.files = w.files.clone();
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    w.write("manifest.json", &(json + "\n"))?;
    Ok(manifest)
}

/// Runs every realization of `config` and writes its output directory.
pub fn run_scenario(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<RunOutput, CliError> {
    let t0 = Instant::now();
    let started_unix_seconds = started();
    let seeds = seeds(config);
    let pool = pool(threads)?;
    let realizations: Vec<Realization> = pool.install(|| {
        seeds
            .par_iter()
            .map(|s| run_realization(config, s.index, s.seed))
            .collect::<spinchain::Result<_>>()
    })?;
    let mut w = Writer::new(&config.output)?;
    let aggregate = write_ensemble(&mut w, "", &realizations)?;
    let manifest = write_manifest(
        &mut w,
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            master_seed: config.seed,
            seed_rule: SEED_RULE.to_string(),
            realizations: seeds,
            sweep: None,
            threads: pool.current_num_threads(),
            started_unix_seconds,
            wall_clock_seconds: t0.elapsed().as_secs_f64(),
            files: Vec::new(),
        },
    )?;
    Ok(RunOutput {
        directory: config.output.clone(),
        manifest,
        aggregate,
        realizations,
    })
}

/// Runs the ensemble once per value of `param`, all realizations dispatched
/// together. Each value gets its own subdirectory laid out like a single
/// run; `sweep.csv` holds one row of ensemble-mean summary metrics per value.
pub fn sweep(
    config: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    threads: Option<usize>,
) -> Result<SweepOutput, CliError> {
    if values.is_empty() {
        return Err(ConfigErrors::single("values", "at least one value is required").into());
    }
    let t0 = Instant::now();
    let started_unix_seconds = started();
    let mut errors = Vec::new();
    let configs: Vec<ExperimentConfig> = values
        .iter()
        .filter_map(|&v| match config.with_parameter(param, v) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.extend(e.0.into_iter().map(|mut viol| {
                    viol.message = format!("{} = {}: {}", param.name(), v, viol.message);
                    viol
                }));
                None
            }
        })
        .collect();
    if !errors.is_empty() {
        return Err(ConfigErrors(errors).into());
    }
    let seeds = seeds(config);
    let jobs: Vec<(usize, &SeedEntry)> = (0..configs.len())
        .flat_map(|k| seeds.iter().map(move |s| (k, s)))
        .collect();
    let pool = pool(threads)?;
    let results: Vec<Realization> = pool.install(|| {
        jobs.par_iter()
            .map(|&(k, s)| run_realization(&configs[k], s.index, s.seed))
            .collect::<spinchain::Result<_>>()
    })?;

    let mut w = Writer::new(&config.output)?;
    let mut directories = Vec::new();
    let mut table = Table::default();
    for (k, chunk) in results.chunks(seeds.len()).enumerate() {
        let dir = format!("{}_{k:03}", param.name());
        write_ensemble(&mut w, &format!("{dir}/"), chunk)?;
        directories.push(dir);
        let per_metric: Vec<Vec<(&str, f64)>> =
            chunk.iter().map(|r| summary_metrics(&r.table)).collect();
        if k == 0 {
            table.names.push(param.name().to_string());
            table.columns.push(Vec::new());
            for (name, _) in &per_metric[0] {
                table.names.push(name.to_string());
                table.columns.push(Vec::new());
            }
        }
        table.columns[0].push(values[k]);
        for m in 0..per_metric[0].len() {
            let v: Vec<f64> = per_metric.iter().map(|r| r[m].1).collect();
            table.columns[m + 1].push(mean(&v));
        }
    }
    w.write("sweep.csv", &to_csv(&table))?;
    let manifest = write_manifest(
        &mut w,
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            master_seed: config.seed,
            seed_rule: SEED_RULE.to_string(),
            realizations: seeds,
            sweep: Some(SweepInfo {
                parameter: param,
                values: values.to_vec(),
                directories,
            }),
            threads: pool.current_num_threads(),
            started_unix_seconds,
            wall_clock_seconds: t0.elapsed().as_secs_f64(),
            files: Vec::new(),
        },
    )?;
    Ok(SweepOutput {
        directory: config.output.clone(),
        manifest,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| realization_seed(7, i)).collect();
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_eq!(a[3], realization_seed(7, 3));
        assert_ne!(realization_seed(7, 0), realization_seed(8, 0));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::from(ConfigErrors::single("x", "y")).exit_code(),
            2
        );
        assert_eq!(
            CliError::from(spinchain::Error::TimeGrid { index: 1 }).exit_code(),
            3
        );
    }
}
