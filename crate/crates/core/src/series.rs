//! Time series of position observables and their CSV/JSON encodings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `E(Q)`, `var(Q)` and the probability of a site region sampled on a time
/// grid. `site_probabilities[i]` holds the full position distribution at
/// `times[i]` when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub var_q: Vec<f64>,
    pub p_region: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_probabilities: Option<Vec<Vec<f64>>>,
}

impl ObservableSeries {
    pub fn with_capacity(n: usize) -> Self {
        ObservableSeries {
            times: Vec::with_capacity(n),
            mean_q: Vec::with_capacity(n),
            var_q: Vec::with_capacity(n),
            p_region: Vec::with_capacity(n),
            site_probabilities: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, mean_q: f64, var_q: f64, p_region: f64) {
        self.times.push(t);
        self.mean_q.push(mean_q);
        self.var_q.push(var_q);
        self.p_region.push(p_region);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series is always serializable")
    }
}

/// A set of equally long named columns; the first column is time.
pub trait Tabular {
    fn columns(&self) -> Vec<(&str, &[f64])>;
}

impl Tabular for ObservableSeries {
    fn columns(&self) -> Vec<(&str, &[f64])> {
        vec![
            ("t", &self.times),
            ("mean_Q", &self.mean_q),
            ("var_Q", &self.var_q),
            ("p_region", &self.p_region),
        ]
    }
}

/// Formats a real with 17 significant digits so that parsing it back gives
/// the identical `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{v:.16e}")
    }
}

/// Header row plus one row per sample, comma separated.
pub fn to_csv<T: Tabular + ?Sized>(table: &T) -> String {
    let columns = table.columns();
    let rows = columns.first().map_or(0, |(_, c)| c.len());
    let mut out = String::new();
    let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, (_, col)) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_real(col[i]));
        }
        out.push('\n');
    }
    out
}

/// Checks that a time grid is non-empty, finite and strictly increasing.
pub fn validate_time_grid(times: &[f64]) -> Result<()> {
    for (i, t) in times.iter().enumerate() {
        if !t.is_finite() || (i > 0 && *t <= times[i - 1]) {
            return Err(Error::TimeGrid { index: i });
        }
    }
    Ok(())
}

/// `0, dt, 2 dt, ..., t_max` (inclusive, rounded to the nearest step count).
pub fn uniform_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt).round() as usize;
    (0..=steps).map(|i| i as f64 * dt).collect()
}
