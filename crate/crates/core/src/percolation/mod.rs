//! Site percolation on open lattices and the loss-renormalization curve.

mod kcurve;
mod lattice;
mod union_find;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use kcurve::{k_curve, KCurve, KCurveConfig, KPoint, KSource, LOSS_TOLERANCE_2D};
pub use lattice::{brick_wall, square, square_octagon, Lattice, LatticeKind, LatticeSpec};
pub use union_find::UnionFind;

use crate::error::{Error, Result};
use crate::models::{parameter_for_deformation, Model};

/// Number of independent replicas behind a threshold estimate.
pub const REPLICAS: usize = 4;
/// Width of the final bisection bracket.
pub const BRACKET_WIDTH: f64 = 0.002;

pub(crate) fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Whether the occupied sites connect the left and right boundaries.
pub fn spans(lattice: &Lattice, occupied: &[bool]) -> bool {
    let n = lattice.num_sites();
    let (left, right) = (n, n + 1);
    let mut uf = UnionFind::new(n + 2);
    for s in (0..n).filter(|&s| occupied[s]) {
        if lattice.left[s] {
            uf.union(s, left);
        }
        if lattice.right[s] {
            uf.union(s, right);
        }
        for &t in lattice.neighbors(s) {
            if occupied[t as usize] {
                uf.union(s, t as usize);
            }
        }
    }
    uf.connected(left, right)
}

/// Occupation level at which a trial first spans. Site `i` is occupied at
/// `p` iff `u_i < p`, so the trial spans at `p` iff the result is `< p`.
pub fn critical_occupation(lattice: &Lattice, seed: u64, trial: u64) -> f64 {
    let n = lattice.num_sites();
    let mut rng = trial_rng(seed, trial);
    let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| u[a as usize].total_cmp(&u[b as usize]).then(a.cmp(&b)));
    let (left, right) = (n, n + 1);
    let mut uf = UnionFind::new(n + 2);
    let mut occupied = vec![false; n];
    for s in order {
        let s = s as usize;
        occupied[s] = true;
        if lattice.left[s] {
            uf.union(s, left);
        }
        if lattice.right[s] {
            uf.union(s, right);
        }
        for &t in lattice.neighbors(s) {
            if occupied[t as usize] {
                uf.union(s, t as usize);
            }
        }
        if uf.connected(left, right) {
            return u[s];
        }
    }
    f64::INFINITY
}

/// Critical occupations of trials `first..first + count`.
pub fn critical_occupations(lattice: &Lattice, seed: u64, first: u64, count: usize) -> Vec<f64> {
    (0..count as u64)
        .into_par_iter()
        .map(|t| critical_occupation(lattice, seed, first + t))
        .collect()
}

fn fraction_below(samples: &[f64], p: f64) -> f64 {
    samples.iter().filter(|&&u| u < p).count() as f64 / samples.len() as f64
}

pub fn spanning_probability(spec: &LatticeSpec, p: f64, trials: usize, seed: u64) -> Result<f64> {
    Ok(spanning_curve(spec, &[p], trials, seed)?[0])
}

/// Spanning probabilities on a grid of `p`, all from the same trials.
pub fn spanning_curve(spec: &LatticeSpec, ps: &[f64], trials: usize, seed: u64) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("occupation probability {p} outside [0, 1]")));
    }
    let lattice = spec.build();
    let samples = critical_occupations(&lattice, seed, 0, trials);
    Ok(ps
        .iter()
        .map(|&p| if p >= 1.0 { 1.0 } else { fraction_below(&samples, p) })
        .collect())
}

/// Bisect the empirical spanning curve for its 0.5 crossing.
fn bisect_crossing(samples: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if fraction_below(samples, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercolationEstimate {
    pub lattice: LatticeKind,
    pub size: usize,
    pub p_th: f64,
    pub stderr: f64,
    /// Trials per replica.
    pub trials: usize,
    pub replicas: Vec<f64>,
}

/// Spanning threshold from [`REPLICAS`] independent replicas of `trials`
/// trials each.
pub fn site_threshold(spec: &LatticeSpec, trials: usize, seed: u64) -> Result<PercolationEstimate> {
    if trials < 10 {
        return Err(Error::Domain(format!("need at least 10 trials per replica, got {trials}")));
    }
    let lattice = spec.build();
    let replicas: Vec<f64> = (0..REPLICAS)
        .map(|r| bisect_crossing(&critical_occupations(&lattice, seed, (r * trials) as u64, trials)))
        .collect();
    let n = replicas.len() as f64;
    let mean = replicas.iter().sum::<f64>() / n;
    let var = replicas.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let spread = replicas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - replicas.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread > 0.1 {
        return Err(Error::Bracket(format!(
            "replica crossings spread over {spread:.3}; increase --trials or --size"
        )));
    }
    Ok(PercolationEstimate {
        lattice: spec.kind,
        size: spec.size,
        p_th: mean,
        stderr: (var / n).sqrt().max(BRACKET_WIDTH / (2.0 * n.sqrt())),
        trials,
        replicas,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroTBoundary {
    pub model: Model,
    pub p_th: f64,
    pub a_squared: f64,
    /// Smallest `δ` (or `d_z`) with a percolating distilled lattice at `T = 0`.
    pub param: f64,
}

/// `a*² = p_th/(4 − p_th)`, mapped back to the model parameter.
pub fn zero_t_boundary(p_th: f64, model: Model) -> Result<ZeroTBoundary> {
    if !(0.0 < p_th && p_th < 1.0) {
        return Err(Error::Domain(format!("percolation threshold {p_th} outside (0, 1)")));
    }
    let a_squared = p_th / (4.0 - p_th);
    Ok(ZeroTBoundary {
        model,
        p_th,
        a_squared,
        param: parameter_for_deformation(a_squared.sqrt())?,
    })
}

/// `p,spanning_probability` rows.
pub fn write_spanning_csv<W: Write>(ps: &[f64], probs: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "p,spanning_probability")?;
    for (p, s) in ps.iter().zip(probs) {
        writeln!(out, "{p:.16e},{s:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::p_delete;

    fn bfs_spans(rows: usize, cols: usize, occupied: &[bool]) -> bool {
        let mut seen = vec![false; rows * cols];
        let mut stack: Vec<usize> = (0..rows).map(|r| r * cols).filter(|&i| occupied[i]).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            let (r, c) = (s / cols, s % cols);
            if c == cols - 1 {
                return true;
            }
            let mut next = vec![];
            if r > 0 {
                next.push(s - cols);
            }
            if r + 1 < rows {
                next.push(s + cols);
            }
            if c > 0 {
                next.push(s - 1);
            }
            next.push(s + 1);
            for t in next {
                if occupied[t] && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        false
    }

    #[test]
    fn union_find_matches_path_search_on_every_4x4_configuration() {
        let lat = square(4, 4);
        for mask in 0u32..(1 << 16) {
            let occ: Vec<bool> = (0..16).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(spans(&lat, &occ), bfs_spans(4, 4, &occ), "mask {mask:#06x}");
        }
    }

    #[test]
    fn critical_occupation_agrees_with_direct_spanning() {
        let spec = LatticeSpec::new(LatticeKind::Honeycomb, 12).unwrap();
        let lat = spec.build();
        for trial in 0..5 {
            let uc = critical_occupation(&lat, 3, trial);
            let mut rng = trial_rng(3, trial);
            let u: Vec<f64> = (0..lat.num_sites()).map(|_| rng.random::<f64>()).collect();
            let occ_at = |p: f64| u.iter().map(|&x| x < p).collect::<Vec<_>>();
            assert!(spans(&lat, &occ_at(uc + 1e-12)));
            assert!(!spans(&lat, &occ_at(uc)));
        }
    }

    #[test]
    fn trivial_occupations() {
        let spec = LatticeSpec::new(LatticeKind::Square, 16).unwrap();
        assert_eq!(spanning_probability(&spec, 1.0, 20, 1).unwrap(), 1.0);
        assert_eq!(spanning_probability(&spec, 0.0, 20, 1).unwrap(), 0.0);
        assert!(spanning_probability(&spec, 1.2, 20, 1).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let spec = LatticeSpec::new(LatticeKind::SquareOctagon, 16).unwrap();
        let a = site_threshold(&spec, 20, 11).unwrap();
        let b = site_threshold(&spec, 20, 11).unwrap();
        assert_eq!(a, b);
        let c = site_threshold(&spec, 20, 12).unwrap();
        assert_ne!(a.replicas, c.replicas);
    }

    #[test]
    fn too_few_trials() {
        let spec = LatticeSpec::new(LatticeKind::Square, 8).unwrap();
        assert!(site_threshold(&spec, 3, 0).is_err());
    }

    #[test]
    fn zero_temperature_boundary_from_known_threshold() {
        let b = zero_t_boundary(LatticeKind::Honeycomb.known_threshold(), Model::Xxz).unwrap();
        assert!((b.a_squared - 0.211).abs() < 5e-4);
        assert!((b.param + 1.2882).abs() < 5e-3);
        let a = b.a_squared.sqrt();
        assert!((p_delete(a) - (1.0 - b.p_th)).abs() < 1e-12);
        assert!(zero_t_boundary(1.5, Model::Aniso).is_err());
    }
}
