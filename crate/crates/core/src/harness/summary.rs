use std::io::Write;

use super::sweep::SweepRow;
use crate::error::{Error, Result};
use crate::states::{Method, PointerKind};

pub const SUMMARY_HEADER: [&str; 9] = [
    "method",
    "pointer",
    "d",
    "phi",
    "N",
    "mean_D",
    "std_D",
    "mean_Dprime",
    "failures",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample standard deviation; `None` below two values.
    pub std: Option<f64>,
}

/// Mean and sample standard deviation.
pub fn group_stats(values: &[f64]) -> Result<GroupStats> {
    if values.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1).then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    Ok(GroupStats {
        count: values.len(),
        mean,
        std,
    })
}

/// Aggregate of the repetitions at one `(config, N)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub config: usize,
    pub grid: u64,
    pub method: Method,
    pub pointer: PointerKind,
    pub d: usize,
    pub phi: f64,
    pub n: u64,
    pub mean_d: Option<f64>,
    pub std_d: Option<f64>,
    pub mean_dprime: Option<f64>,
    pub failures: usize,
}

impl SummaryRow {
    pub fn to_record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        vec![
            self.method.to_string(),
            self.pointer.to_string(),
            self.d.to_string(),
            self.phi.to_string(),
            self.n.to_string(),
            opt(self.mean_d),
            opt(self.std_d),
            opt(self.mean_dprime),
            self.failures.to_string(),
        ]
    }
}

/// Groups rows by grid point, in order of first appearance. Means are over
/// successful rows; a group with no successes keeps empty statistics and its
/// failure count.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let grid = rows[start].grid;
        let end = start + rows[start..].iter().take_while(|r| r.grid == grid).count();
        let group = &rows[start..end];
        let first = &group[0];
        let ok: Vec<&SweepRow> = group.iter().filter(|r| r.is_ok()).collect();
        let ds: Vec<f64> = ok.iter().filter_map(|r| r.distance).collect();
        let dps: Vec<f64> = ok.iter().filter_map(|r| r.d_prime).collect();
        let stats = group_stats(&ds).ok();
        out.push(SummaryRow {
            config: first.config,
            grid,
            method: first.method,
            pointer: first.pointer,
            d: first.d,
            phi: first.phi,
            n: first.n,
            mean_d: stats.map(|s| s.mean),
            std_d: stats.and_then(|s| s.std),
            mean_dprime: group_stats(&dps).ok().map(|s| s.mean),
            failures: group.len() - ok.len(),
        });
        start = end;
    }
    out
}

pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER)?;
    for r in rows {
        out.write_record(r.to_record())?;
    }
    out.flush()?;
    Ok(())
}

/// Sample size at which the statistical trend `A/√N` meets the bias floor `D′`.
///
/// `points` are `(N, mean D)` pairs of one `(method, φ)` curve. `A` is fitted
/// in log space to the points with `D ≥ 2 D′`; the result `(A/D′)²` is
/// clamped to the sampled range of `N`.
pub fn detect_elbow(points: &[(u64, f64)], d_prime: f64) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            required: 3,
            got: points.len(),
        });
    }
    if !(d_prime.is_finite() && d_prime > 0.0) {
        return Err(Error::OutOfRange(format!("bias floor D' = {d_prime}")));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    if pts[0].1 <= d_prime {
        return Err(Error::NoStatisticalRegime);
    }
    let trend: Vec<f64> = pts
        .iter()
        .filter(|(_, d)| *d >= 2.0 * d_prime)
        .map(|&(n, d)| d.ln() + 0.5 * (n as f64).ln())
        .collect();
    if trend.is_empty() {
        return Err(Error::NoStatisticalRegime);
    }
    let log_a = trend.iter().sum::<f64>() / trend.len() as f64;
    let n_star = (log_a.exp() / d_prime).powi(2);
    let lo = pts[0].0 as f64;
    let hi = pts[pts.len() - 1].0 as f64;
    Ok(n_star.clamp(lo, hi))
}
