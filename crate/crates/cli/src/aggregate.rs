//! Ensemble statistics across realizations.

use crate::scenario::Table;

pub const QUANTILES: [(f64, &str); 3] = [(0.05, "q05"), (0.5, "q50"), (0.95, "q95")];

/// Linear interpolation between order statistics; `values` sorted, finite.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * q;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// Mean over non-NaN values, summed in order; NaN when none remain.
pub fn mean(values: &[f64]) -> f64 {
    let finite: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    }
}

/// Keeps the first (key) column of the first table and replaces every
/// other column by its pointwise mean and quantiles.
pub fn aggregate(tables: &[&Table]) -> Table {
    let Some(first) = tables.first() else {
        return Table::default();
    };
    let mut out = Table {
        names: vec![first.names[0].clone()],
        columns: vec![first.columns[0].clone()],
    };
    let rows = first.rows();
    for (c, name) in first.names.iter().enumerate().skip(1) {
        let mut means = Vec::with_capacity(rows);
        let mut qs = vec![Vec::with_capacity(rows); QUANTILES.len()];
        for r in 0..rows {
            let values: Vec<f64> = tables.iter().map(|t| t.columns[c][r]).collect();
            means.push(mean(&values));
            let mut sorted: Vec<f64> = values.into_iter().filter(|v| !v.is_nan()).collect();
            sorted.sort_by(f64::total_cmp);
            for (k, (q, _)) in QUANTILES.iter().enumerate() {
                qs[k].push(quantile(&sorted, *q));
            }
        }
        out.names.push(format!("{name}_mean"));
        out.columns.push(means);
        for ((_, suffix), col) in QUANTILES.iter().zip(qs) {
            out.names.push(format!("{name}_{suffix}"));
            out.columns.push(col);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(values: Vec<f64>) -> Table {
        Table {
            names: vec!["t".into(), "x".into()],
            columns: vec![(0..values.len()).map(|i| i as f64).collect(), values],
        }
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert!((quantile(&[0.0, 1.0], 0.05) - 0.05).abs() < 1e-15);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn nan_entries_are_skipped() {
        let a = table(vec![1.0, f64::NAN]);
        let b = table(vec![3.0, f64::NAN]);
        let agg = aggregate(&[&a, &b]);
        assert_eq!(agg.names, ["t", "x_mean", "x_q05", "x_q50", "x_q95"]);
        assert_eq!(agg.columns[1][0], 2.0);
        assert!(agg.columns[1][1].is_nan());
    }

    proptest! {
        #[test]
        fn single_realization_is_reproduced_exactly(values in proptest::collection::vec(-1e6f64..1e6, 1..20)) {
            let t = table(values.clone());
            let agg = aggregate(&[&t]);
            for c in 1..agg.columns.len() {
                prop_assert_eq!(&agg.columns[c], &values);
            }
        }
    }
}
