//! Log-log slope fitting for scaling experiments.

use crate::error::{Error, Result};

/// Least-squares slope of `log(y)` against `log(x)` over the upper half of
/// the points (the bounds are asymptotic; small scales carry constant
/// contamination).  Returns the slope and its standard error.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least 4 points".into(),
        ));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::NumericalDomain(
            "slope fit requires positive scales and ratios".into(),
        ));
    }
    let upper = &points[points.len() / 2..];
    let xs: Vec<f64> = upper.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = upper.iter().map(|&(_, y)| y.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    if sxx == 0.0 {
        return Err(Error::NumericalDomain("degenerate abscissae in slope fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let dof = (xs.len().saturating_sub(2)).max(1) as f64;
    let stderr = (ssr / dof / sxx).sqrt();
    Ok((slope, stderr))
}
