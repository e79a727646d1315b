//! Power-law decay fits of indicator series and thresholded stability maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Decay exponent in `L ≈ c·t^(−a)`.
    pub a: f64,
    pub c: f64,
    /// Population standard deviation of the raw series.
    pub e_deviation: f64,
    /// Samples used by the log fit.
    pub n_samples: usize,
    /// Samples dropped from the log fit because `L ≤ 0`.
    pub n_dropped: usize,
}

/// `√((1/N)·Σ(L_i − L̄)²)`.
pub fn e_deviation(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    // shifted by the first sample so a constant series gives exactly zero
    let n = values.len() as f64;
    let base = values[0];
    let mean = values.iter().map(|v| v - base).sum::<f64>() / n;
    (values.iter().map(|v| (v - base - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Least-squares fit of `log L = log c − a·log t`.
pub fn fit_power_law(series: &[(f64, f64)]) -> Result<FitResult> {
    if let Some(&(t, _)) = series.iter().find(|(t, _)| !(*t > 0.0)) {
        return Err(Error::Fit(format!("sample time {t} is not positive")));
    }
    if series.iter().any(|(t, l)| !t.is_finite() || !l.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, l)| *l > 0.0)
        .map(|&(t, l)| (t.ln(), l.ln()))
        .collect();
    let n_dropped = series.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 positive samples, have {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all sample times are equal".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let raw: Vec<f64> = series.iter().map(|p| p.1).collect();
    Ok(FitResult {
        a: -slope,
        c: (my - slope * mx).exp(),
        e_deviation: e_deviation(&raw),
        n_samples: pts.len(),
        n_dropped,
    })
}

/// Keeps samples with `t_start ≤ t ≤ t_end`.
pub fn window(series: &[(f64, f64)], t_start: f64, t_end: f64) -> Vec<(f64, f64)> {
    series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t_start && t <= t_end)
        .collect()
}

pub fn threshold_map(fits: &[FitResult], tol: f64) -> Vec<bool> {
    fits.iter().map(|f| f.e_deviation < tol).collect()
}
