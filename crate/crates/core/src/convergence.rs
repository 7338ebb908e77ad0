//! Residual-versus-scale tables with a fitted decay order and a
//! falsifiable convergence verdict.
//!
//! Limits are certified by a geometric schedule of scales, a monotone-decay
//! window over the tail of the table, and a log-log least-squares order fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residuals at or below this floor count as "exactly zero up to roundoff".
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// A residual-vs-scale table with its interpretation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceEstimate {
    /// Strictly decreasing scales.
    pub schedule: Vec<f64>,
    /// Nonnegative residual at each scale.
    pub residuals: Vec<f64>,
    /// Slope of the least-squares fit of log-residual against log-scale
    /// (positive = decays as the scale shrinks); 0 when underdetermined.
    pub fitted_order: f64,
    pub verdict: Verdict,
}

/// Scales `2^-k` for `k = lo..=hi` (strictly decreasing).
pub fn dyadic_schedule(lo: u32, hi: u32) -> Vec<f64> {
    assert!(lo <= hi, "schedule bounds out of order: {lo} > {hi}");
    (lo..=hi).map(|k| (2.0f64).powi(-(k as i32))).collect()
}

/// Least-squares slope of `ln(residual)` against `ln(scale)`, using only
/// entries above [`RESIDUAL_FLOOR`]. Returns 0 with fewer than two usable
/// points.
pub fn fit_order(schedule: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = schedule
        .iter()
        .zip(residuals)
        .filter(|(_, &r)| r > RESIDUAL_FLOOR)
        .map(|(&e, &r)| (e.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return 0.0;
    }
    (n * sxy - sx * sy) / denom
}

impl ConvergenceEstimate {
    /// Assembles the table and classifies it.
    ///
    /// * every residual at or below [`RESIDUAL_FLOOR`] → `Converges`;
    /// * otherwise the tail window (the last `max(4, len/2)` entries) must
    ///   be nonincreasing with a strict overall drop → `Converges`;
    /// * a nondecreasing tail that ends above its start → `Diverges`;
    /// * anything else → `Inconclusive`.
    pub fn from_residuals(schedule: Vec<f64>, residuals: Vec<f64>) -> Result<Self> {
        if schedule.len() != residuals.len() {
            return Err(Error::Argument(format!(
                "schedule has {} entries but residual table has {}",
                schedule.len(),
                residuals.len()
            )));
        }
        if schedule.is_empty() {
            return Err(Error::Argument("empty schedule".into()));
        }
        for w in schedule.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::Argument(format!(
                    "schedule must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (&e, &r) in schedule.iter().zip(&residuals) {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Argument(format!("scale {e} must be positive")));
            }
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Argument(format!(
                    "residual {r} must be finite and nonnegative"
                )));
            }
        }

        let fitted_order = fit_order(&schedule, &residuals);
        let max_res = residuals.iter().cloned().fold(0.0, f64::max);
        let verdict = if max_res <= RESIDUAL_FLOOR {
            Verdict::Converges
        } else {
            let win = residuals.len().min(residuals.len().div_ceil(2).max(4));
            let tail = &residuals[residuals.len() - win..];
            let tol = RESIDUAL_FLOOR * (1.0 + max_res);
            let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] + tol);
            let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0] - tol);
            let first = tail[0];
            let last = tail[tail.len() - 1];
            if nonincreasing && last < first {
                Verdict::Converges
            } else if nondecreasing && last > first {
                Verdict::Diverges
            } else {
                Verdict::Inconclusive
            }
        };

        Ok(Self {
            schedule,
            residuals,
            fitted_order,
            verdict,
        })
    }

    /// Builds a Cauchy-mode table: residual `i` compares consecutive scale
    /// entries, so the table is one shorter than the input schedule.
    pub fn from_cauchy(schedule: &[f64], consecutive_gaps: Vec<f64>) -> Result<Self> {
        if consecutive_gaps.len() + 1 != schedule.len() {
            return Err(Error::Argument(format!(
                "Cauchy table needs {} gaps for {} scales, got {}",
                schedule.len().saturating_sub(1),
                schedule.len(),
                consecutive_gaps.len()
            )));
        }
        Self::from_residuals(
            schedule[..schedule.len() - 1].to_vec(),
            consecutive_gaps,
        )
    }

    /// Residual at the finest (last) scale.
    pub fn finest_residual(&self) -> f64 {
        *self.residuals.last().expect("table is never empty")
    }

    pub fn converges(&self) -> bool {
        self.verdict == Verdict::Converges
    }
}
