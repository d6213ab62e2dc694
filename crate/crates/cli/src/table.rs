//! Convergence tables with observed rates.

use crate::csv::{fmt_opt, Csv};

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub h: f64,
    pub err_inf: f64,
    pub err_l2: f64,
    pub err_h1: f64,
    /// Theoretical bound for err_inf, when one is known.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<TableRow>,
}

/// Observed order log(e_prev/e)/log(n/n_prev); log₂(e(n/2)/e(n)) when the
/// mesh is doubled.
pub fn rate(prev: (usize, f64), cur: (usize, f64)) -> Option<f64> {
    let (n0, e0) = prev;
    let (n1, e1) = cur;
    if e0 > 0.0 && e1 > 0.0 && e0.is_finite() && e1.is_finite() && n1 > n0 {
        Some((e0 / e1).ln() / (n1 as f64 / n0 as f64).ln())
    } else {
        None
    }
}

impl ConvergenceTable {
    pub fn new(mut rows: Vec<TableRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        Self { rows }
    }

    /// (rate_inf, rate_l2, rate_h1) for row k; undefined for the first row.
    pub fn rates(&self, k: usize) -> [Option<f64>; 3] {
        if k == 0 {
            return [None; 3];
        }
        let (a, b) = (&self.rows[k - 1], &self.rows[k]);
        [
            rate((a.n, a.err_inf), (b.n, b.err_inf)),
            rate((a.n, a.err_l2), (b.n, b.err_l2)),
            rate((a.n, a.err_h1), (b.n, b.err_h1)),
        ]
    }

    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&[
            "n",
            "h",
            "err_inf",
            "err_l2_window",
            "err_h1_window",
            "rate_inf",
            "rate_l2",
            "rate_h1",
            "bound_inf",
        ]);
        for (k, r) in self.rows.iter().enumerate() {
            let [ri, rl, rh] = self.rates(k);
            csv.push(vec![
                r.n.to_string(),
                fmt_opt(Some(r.h)),
                fmt_opt(Some(r.err_inf)),
                fmt_opt(Some(r.err_l2)),
                fmt_opt(Some(r.err_h1)),
                fmt_opt(ri),
                fmt_opt(rl),
                fmt_opt(rh),
                fmt_opt(r.bound),
            ]);
        }
        csv
    }
}
