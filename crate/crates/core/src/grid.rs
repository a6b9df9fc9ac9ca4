//! Inclusive `lo:hi:step` parameter grids.

use crate::error::{Error, Result};

/// Step slack when deciding whether `hi` is an endpoint.
const ENDPOINT_SLACK: f64 = 1e-12;

/// Parses `lo:hi:step` into an inclusive, strictly increasing grid.
///
/// The upper endpoint is included when it lies within `1e-12` steps of a grid
/// point. Points are computed as `lo + i * step` so no error accumulates.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Grid(format!("expected lo:hi:step, got '{spec}'")));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Grid(format!("'{s}' is not a number in '{spec}'")))
    };
    let (lo, hi, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    linspace_step(lo, hi, step)
}

pub fn linspace_step(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(Error::Grid("range bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Grid(format!("step must be positive, got {step}")));
    }
    if hi < lo {
        return Err(Error::Grid(format!("hi ({hi}) is below lo ({lo})")));
    }
    let n = ((hi - lo) / step + ENDPOINT_SLACK).floor() as usize;
    if n > 10_000_000 {
        return Err(Error::Grid(format!("{n} points requested")));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// `n` evenly spaced points covering `[lo, hi]` inclusively.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Checks that a grid is non-empty and strictly increasing.
pub fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid(format!("{what} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Grid(format!("{what} grid has non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("{what} grid is not strictly increasing")));
    }
    Ok(())
}
