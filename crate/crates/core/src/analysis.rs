//! Central-charge fit of mid-chain entropies.

use ndarray::{Array1, Array2};
use ndarray_linalg::LeastSquaresSvd;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralChargeFit {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual over the input points.
    pub rms: f64,
}

impl CentralChargeFit {
    pub fn predict(&self, l: f64) -> f64 {
        self.c / 6.0 * l.ln() + self.a + self.b / l
    }
}

/// Least-squares fit of `S(L) = (c/6) ln L + a + b/L` with all three
/// coefficients free. Needs at least three distinct chain lengths.
pub fn fit_central_charge(points: &[(f64, f64)]) -> Result<CentralChargeFit> {
    let mut lengths: Vec<f64> = points.iter().map(|p| p.0).collect();
    if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) || points.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidArgument("lengths must be positive and entropies finite".into()));
    }
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();
    if lengths.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 distinct chain lengths, got {}",
            lengths.len()
        )));
    }
    let n = points.len();
    let design = Array2::from_shape_fn((n, 3), |(i, k)| {
        let l = points[i].0;
        match k {
            0 => l.ln() / 6.0,
            1 => 1.0,
            _ => 1.0 / l,
        }
    });
    let rhs = Array1::from_iter(points.iter().map(|p| p.1));
    let sol = design.least_squares(&rhs).map_err(|e| Error::Linalg(e.to_string()))?;
    let x = sol.solution;
    let fit = CentralChargeFit { c: x[0], a: x[1], b: x[2], rms: 0.0 };
    let ss: f64 = points.iter().map(|&(l, s)| (fit.predict(l) - s).powi(2)).sum();
    Ok(CentralChargeFit { rms: (ss / n as f64).sqrt(), ..fit })
}
