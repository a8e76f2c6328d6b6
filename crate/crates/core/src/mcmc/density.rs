use serde::{Deserialize, Serialize};

use crate::distributions::special::LN_SQRT_2PI;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthRule {
    /// `0.9 · min(sd, IQR/1.34) · n^-1/5`
    Silverman,
    /// `1.06 · sd · n^-1/5`
    Scott,
    Fixed(f64),
}

impl BandwidthRule {
    pub fn bandwidth(self, trace: &[f64]) -> Result<f64> {
        let n = trace.len() as f64;
        let mean = trace.iter().sum::<f64>() / n;
        let sd =
            (trace.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        if !(sd > 0.0) {
            return Err(Error::DegenerateDensity);
        }
        let h = match self {
            BandwidthRule::Silverman => {
                let iqr = super::quantile(trace, 0.75) - super::quantile(trace, 0.25);
                let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
                0.9 * spread * n.powf(-0.2)
            }
            BandwidthRule::Scott => 1.06 * sd * n.powf(-0.2),
            BandwidthRule::Fixed(h) => h,
        };
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Validation(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityEstimate {
    /// Trapezoid-rule integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// Gaussian kernel density of `trace` on `grid_size` evenly spaced points
/// spanning `[min - 3h, max + 3h]`.
pub fn export_density(
    trace: &[f64],
    grid_size: usize,
    rule: BandwidthRule,
) -> Result<DensityEstimate> {
    if trace.is_empty() {
        return Err(Error::Validation("density needs a nonempty trace".into()));
    }
    if trace.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation(
            "density trace contains non-finite values".into(),
        ));
    }
    if grid_size < 2 {
        return Err(Error::Validation(
            "density grid needs at least 2 points".into(),
        ));
    }
    let h = rule.bandwidth(trace)?;
    let min = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let max = trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = min - 3.0 * h;
    let step = (max - min + 6.0 * h) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|k| lo + k as f64 * step).collect();
    let norm = (-(trace.len() as f64).ln() - h.ln() - LN_SQRT_2PI).exp();
    let density = grid
        .iter()
        .map(|&g| {
            norm * trace
                .iter()
                .map(|&x| {
                    let z = (g - x) / h;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(DensityEstimate {
        bandwidth: h,
        grid,
        density,
    })
}
