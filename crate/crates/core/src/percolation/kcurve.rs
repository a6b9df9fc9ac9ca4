//! Monte Carlo estimate of `k(p_l)`, the inverse mean path length between
//! neighbouring nodes of a coarse network carved out of a lossy square
//! lattice. This is an approximation of the loss renormalization, not a
//! reproduction of any particular published pipeline.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_rng, UnionFind};
use crate::error::{Error, Result};

/// Loss rate beyond which the 2D construction is treated as unusable.
pub const LOSS_TOLERANCE_2D: f64 = 0.40;
/// Largest loss rate the estimator accepts.
pub const MAX_LOSS: f64 = 0.45;
/// Pairs with no path are tolerated up to this fraction.
const MAX_DISCONNECTED: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KPoint {
    pub p_l: f64,
    pub k: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KSource {
    MonteCarlo {
        estimator: String,
        size: usize,
        trials: usize,
        seed: u64,
        c0: f64,
    },
    Table {
        path: String,
    },
}

impl KSource {
    pub fn tag(&self) -> String {
        match self {
            KSource::MonteCarlo { size, trials, seed, .. } => {
                format!("monte-carlo(L={size},trials={trials},seed={seed})")
            }
            KSource::Table { path } => format!("table({path})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCurve {
    pub points: Vec<KPoint>,
    pub source: KSource,
}

#[derive(Deserialize)]
struct KRow {
    p_l: f64,
    k: f64,
}

impl KCurve {
    pub fn from_points(points: Vec<KPoint>, source: KSource) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::KTable("need at least two rows".into()));
        }
        for w in points.windows(2) {
            if !(w[1].p_l > w[0].p_l) {
                return Err(Error::KTable(format!(
                    "p_l must be strictly increasing ({} then {})",
                    w[0].p_l, w[1].p_l
                )));
            }
        }
        for p in &points {
            if !(0.0..=1.0).contains(&p.p_l) {
                return Err(Error::KTable(format!("p_l {} outside [0, 1]", p.p_l)));
            }
            if !p.k.is_nan() && !(0.0..=1.0).contains(&p.k) {
                return Err(Error::KTable(format!("k {} outside [0, 1] at p_l {}", p.k, p.p_l)));
            }
        }
        Ok(Self { points, source })
    }

    /// Read a `p_l,k` table.
    pub fn from_csv_reader<R: Read>(reader: R, label: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::KTable(e.to_string()))?.clone();
        if headers.get(0) != Some("p_l") || headers.get(1) != Some("k") {
            return Err(Error::KTable(format!("expected header 'p_l,k', found '{}'", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut points = Vec::new();
        for row in rdr.deserialize::<KRow>() {
            let row = row.map_err(|e| Error::KTable(e.to_string()))?;
            points.push(KPoint {
                p_l: row.p_l,
                k: row.k,
                stderr: 0.0,
            });
        }
        Self::from_points(points, KSource::Table { path: label.to_string() })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::KTable(format!("cannot open {}: {e}", path.display())))?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    /// Linear interpolation; outside the table is an error.
    pub fn interpolate(&self, p_l: f64) -> Result<f64> {
        let first = self.points[0].p_l;
        let last = self.points[self.points.len() - 1].p_l;
        if p_l < first - 1e-12 || p_l > last + 1e-12 {
            return Err(Error::KTable(format!("p_l = {p_l} outside the table range [{first}, {last}]")));
        }
        let i = self
            .points
            .windows(2)
            .position(|w| p_l <= w[1].p_l)
            .unwrap_or(self.points.len() - 2);
        let (a, b) = (self.points[i], self.points[i + 1]);
        let t = ((p_l - a.p_l) / (b.p_l - a.p_l)).clamp(0.0, 1.0);
        if t == 0.0 {
            return Ok(a.k);
        }
        if t == 1.0 {
            return Ok(b.k);
        }
        Ok(a.k + t * (b.k - a.k))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "p_l,k,stderr")?;
        for p in &self.points {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p.p_l, p.k, p.stderr)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KCurveConfig {
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    /// Node spacing is `ceil(c0 / (1 − p_l))`.
    pub c0: f64,
}

impl Default for KCurveConfig {
    fn default() -> Self {
        Self {
            size: 64,
            trials: 20,
            seed: 0,
            c0: 1.0,
        }
    }
}

pub fn node_spacing(p_l: f64, c0: f64) -> usize {
    ((c0 / (1.0 - p_l)) - 1e-12).ceil().max(1.0) as usize
}

struct TrialPaths {
    lengths: Vec<u32>,
    disconnected: usize,
}

/// One lossy lattice: snap a brick-wall array of nodes to the largest
/// cluster and measure shortest paths between linked nodes.
fn trial_paths(p_l: f64, cfg: &KCurveConfig, stream: u64) -> TrialPaths {
    let l = cfg.size;
    let n = l * l;
    let mut rng = trial_rng(cfg.seed, stream);
    let alive: Vec<bool> = (0..n).map(|_| rng.random::<f64>() >= p_l).collect();

    let mut uf = UnionFind::new(n);
    for s in (0..n).filter(|&s| alive[s]) {
        let (r, c) = (s / l, s % l);
        if c + 1 < l && alive[s + 1] {
            uf.union(s, s + 1);
        }
        if r + 1 < l && alive[s + l] {
            uf.union(s, s + l);
        }
    }
    let giant = (0..n)
        .filter(|&s| alive[s])
        .max_by_key(|&s| (uf.component_size(s), std::cmp::Reverse(uf.find(s))))
        .map(|s| uf.find(s));
    let Some(giant) = giant else {
        return TrialPaths {
            lengths: Vec::new(),
            disconnected: 1,
        };
    };
    let in_giant: Vec<bool> = (0..n).map(|s| alive[s] && uf.find(s) == giant).collect();

    let spacing = node_spacing(p_l, cfg.c0);
    let m = (l - 1) / spacing + 1;
    let snap = |i: usize, j: usize| -> Option<usize> {
        let (r0, c0) = ((i * spacing) as i64, (j * spacing) as i64);
        for radius in 0..=spacing as i64 {
            let mut best: Option<(i64, usize)> = None;
            for dr in -radius..=radius {
                for dc in -radius..=radius {
                    if dr.abs().max(dc.abs()) != radius {
                        continue;
                    }
                    let (r, c) = (r0 + dr, c0 + dc);
                    if r < 0 || c < 0 || r >= l as i64 || c >= l as i64 {
                        continue;
                    }
                    let s = (r as usize) * l + c as usize;
                    let d2 = dr * dr + dc * dc;
                    if in_giant[s] && best.map_or(true, |b| (d2, s) < b) {
                        best = Some((d2, s));
                    }
                }
            }
            if let Some((_, s)) = best {
                return Some(s);
            }
        }
        None
    };
    let nodes: Vec<Option<usize>> = (0..m * m).map(|k| snap(k / m, k % m)).collect();

    let max_depth = (8 * spacing) as u32;
    let mut dist = vec![u32::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    let mut out = TrialPaths {
        lengths: Vec::new(),
        disconnected: 0,
    };
    for i in 0..m {
        for j in 0..m {
            let mut partners = Vec::new();
            if j + 1 < m {
                partners.push((i, j + 1));
            }
            if i + 1 < m && (i + j) % 2 == 0 {
                partners.push((i + 1, j));
            }
            for (pi, pj) in partners {
                let (Some(a), Some(b)) = (nodes[i * m + j], nodes[pi * m + pj]) else {
                    out.disconnected += 1;
                    continue;
                };
                if a == b {
                    continue;
                }
                for &t in &touched {
                    dist[t] = u32::MAX;
                }
                touched.clear();
                queue.clear();
                dist[a] = 0;
                touched.push(a);
                queue.push_back(a);
                let mut found = None;
                while let Some(s) = queue.pop_front() {
                    if s == b {
                        found = Some(dist[s]);
                        break;
                    }
                    if dist[s] >= max_depth {
                        continue;
                    }
                    let (r, c) = (s / l, s % l);
                    let mut step = |t: usize| {
                        if in_giant[t] && dist[t] == u32::MAX {
                            dist[t] = dist[s] + 1;
                            touched.push(t);
                            queue.push_back(t);
                        }
                    };
                    if c + 1 < l {
                        step(s + 1);
                    }
                    if c > 0 {
                        step(s - 1);
                    }
                    if r + 1 < l {
                        step(s + l);
                    }
                    if r > 0 {
                        step(s - l);
                    }
                }
                match found {
                    Some(d) => out.lengths.push(d),
                    None => out.disconnected += 1,
                }
            }
        }
    }
    out
}

fn k_point(index: usize, p_l: f64, cfg: &KCurveConfig) -> KPoint {
    if p_l > LOSS_TOLERANCE_2D {
        return KPoint {
            p_l,
            k: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let trials: Vec<TrialPaths> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| trial_paths(p_l, cfg, ((index as u64) << 32) | t))
        .collect();
    let lengths: Vec<f64> = trials.iter().flat_map(|t| t.lengths.iter().map(|&d| d as f64)).collect();
    let disconnected: usize = trials.iter().map(|t| t.disconnected).sum();
    let total = lengths.len() + disconnected;
    if lengths.is_empty() || disconnected as f64 > MAX_DISCONNECTED * total as f64 {
        return KPoint { p_l, k: 0.0, stderr: 0.0 };
    }
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let var = if n > 1.0 {
        lengths.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    KPoint {
        p_l,
        k: 1.0 / mean,
        stderr: (var / n).sqrt() / (mean * mean),
    }
}

/// `k(p_l)` on a grid of loss rates. Points above [`LOSS_TOLERANCE_2D`] are
/// NaN; points where too many node pairs are cut off are 0.
pub fn k_curve(loss_grid: &[f64], cfg: &KCurveConfig) -> Result<KCurve> {
    if cfg.size < 2 || cfg.trials == 0 {
        return Err(Error::Domain("k-curve needs size >= 2 and trials >= 1".into()));
    }
    if !(cfg.c0 > 0.0) {
        return Err(Error::Domain(format!("c0 must be positive, got {}", cfg.c0)));
    }
    if let Some(p) = loss_grid.iter().find(|p| !(0.0..=MAX_LOSS).contains(*p)) {
        return Err(Error::Domain(format!("loss rate {p} outside [0, {MAX_LOSS}]")));
    }
    let points = loss_grid.iter().enumerate().map(|(i, &p)| k_point(i, p, cfg)).collect();
    KCurve::from_points(
        points,
        KSource::MonteCarlo {
            estimator: "brick-wall node snapping, shortest paths".into(),
            size: cfg.size,
            trials: cfg.trials,
            seed: cfg.seed,
            c0: cfg.c0,
        },
    )
}
