//! Universality verdicts from the 2D and 3D threshold conditions, and the
//! boundary temperature `T*` per model parameter.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{cluster_error_rates, ClusterErrorRates};
use crate::distill::distill_channel;
use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::models::{deformation_parameter, Model, ModelParams};
use crate::pauli::{error_distribution, PauliErrorDistribution};
use crate::percolation::{KCurve, LOSS_TOLERANCE_2D};
use crate::thermal::thermal_state;

/// Effective phase-error threshold of the 2D construction.
pub const THRESHOLD_2D: f64 = 1e-7;
/// 3D loss threshold.
pub const LOSS_THRESHOLD_3D: f64 = 0.249;
/// 3D phase-error threshold.
pub const PHASE_THRESHOLD_3D: f64 = 0.0293;
/// Upper end of the temperature bracket.
pub const T_MAX: f64 = 5.0;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Dim {
    #[serde(rename = "2d")]
    Two,
    #[serde(rename = "3d")]
    Three,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dim::Two => "2d",
            Dim::Three => "3d",
        })
    }
}

impl FromStr for Dim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2d" | "2" => Ok(Dim::Two),
            "3d" | "3" => Ok(Dim::Three),
            other => Err(Error::Domain(format!("unknown dimension '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub params: ModelParams,
    pub temperature: f64,
    pub p_z: f64,
    pub p_l: f64,
    /// `k(p_l)` used for the 2D verdict, when one was available.
    pub k: Option<f64>,
    pub universal_2d: bool,
    pub universal_3d: bool,
    /// `min(1 − 3p_z/(k·10⁻⁷), 1 − p_l/0.40)`; `−∞` when unusable.
    pub margin_2d: f64,
    /// `1 − (p_l/0.249 + p_z/0.0293)`.
    pub margin_3d: f64,
    pub note: Option<String>,
    #[serde(skip)]
    pub distribution: Option<PauliErrorDistribution>,
}

impl PhasePoint {
    pub fn margin(&self, dim: Dim) -> f64 {
        match dim {
            Dim::Two => self.margin_2d,
            Dim::Three => self.margin_3d,
        }
    }

    pub fn universal(&self, dim: Dim) -> bool {
        match dim {
            Dim::Two => self.universal_2d,
            Dim::Three => self.universal_3d,
        }
    }
}

/// Error rates of the distilled cluster state at `(params, T)`.
pub fn cluster_rates(params: &ModelParams, temperature: f64) -> Result<(PauliErrorDistribution, ClusterErrorRates)> {
    let state = thermal_state(params, temperature)?;
    let a = deformation_parameter(params)?;
    let dist = error_distribution(&distill_channel(&state, a)?)?;
    let rates = cluster_error_rates(&dist)?;
    Ok((dist, rates))
}

pub fn margin_3d(p_z: f64, p_l: f64) -> f64 {
    1.0 - (p_l / LOSS_THRESHOLD_3D + p_z / PHASE_THRESHOLD_3D)
}

/// 2D verdict and margin, or the reason it cannot be given.
fn verdict_2d(p_z: f64, p_l: f64, kcurve: Option<&KCurve>) -> (Option<f64>, f64, Option<String>) {
    let loss_margin = 1.0 - p_l / LOSS_TOLERANCE_2D;
    if p_l > LOSS_TOLERANCE_2D {
        return (None, loss_margin, Some(format!("p_l = {p_l:.4} above the 2D loss tolerance")));
    }
    let k = if p_l == 0.0 {
        1.0
    } else {
        match kcurve.map(|c| c.interpolate(p_l)) {
            None => return (None, f64::NEG_INFINITY, Some("no k(p_l) available for p_l > 0".into())),
            Some(Err(e)) => return (None, f64::NEG_INFINITY, Some(e.to_string())),
            Some(Ok(k)) => k,
        }
    };
    if !(k > 0.0 && k.is_finite()) {
        return (Some(k), f64::NEG_INFINITY, Some(format!("k({p_l:.4}) unusable")));
    }
    let phase_margin = 1.0 - 3.0 * p_z / (k * THRESHOLD_2D);
    (Some(k), phase_margin.min(loss_margin), None)
}

pub fn evaluate_point(params: &ModelParams, temperature: f64, kcurve: Option<&KCurve>) -> Result<PhasePoint> {
    params.validate()?;
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::NegativeTemperature(temperature));
    }
    if !params.has_entangled_ground_state() {
        return Ok(PhasePoint {
            params: *params,
            temperature,
            p_z: f64::NAN,
            p_l: f64::NAN,
            k: None,
            universal_2d: false,
            universal_3d: false,
            margin_2d: f64::NEG_INFINITY,
            margin_3d: f64::NEG_INFINITY,
            note: Some("ground space is a product state; no resource".into()),
            distribution: None,
        });
    }
    let (dist, rates) = cluster_rates(params, temperature)?;
    let (p_z, p_l) = (rates.p_z, rates.p_l);
    let m3 = margin_3d(p_z, p_l);
    let (k, m2, note) = verdict_2d(p_z, p_l, kcurve);
    Ok(PhasePoint {
        params: *params,
        temperature,
        p_z,
        p_l,
        k,
        universal_2d: note.is_none() && m2 >= 0.0,
        universal_3d: m3 >= 0.0,
        margin_2d: m2,
        margin_3d: m3,
        note,
        distribution: Some(dist),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum BoundaryOutcome {
    Found { t_star: f64, margin: f64 },
    NotUniversalAtZero,
    /// Still universal at `T_MAX`.
    AboveTmax,
    /// The margin jumps across zero at `t_star` instead of crossing it.
    Discontinuous { t_star: f64, margin_below: f64, margin_above: f64 },
}

impl BoundaryOutcome {
    pub fn t_star(&self) -> Option<f64> {
        match self {
            BoundaryOutcome::Found { t_star, .. } => Some(*t_star),
            _ => None,
        }
    }
}

/// Bisect on `T ∈ [0, T_MAX]` for the zero of the margin.
pub fn boundary_temperature(params: &ModelParams, dim: Dim, kcurve: Option<&KCurve>, tol: f64) -> Result<BoundaryOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let margin = |t: f64| -> Result<f64> {
        let p = evaluate_point(params, t, kcurve)?;
        Ok(if p.universal(dim) { p.margin(dim) } else { p.margin(dim).min(-0.0) })
    };
    let at_zero = evaluate_point(params, 0.0, kcurve)?;
    if !at_zero.universal(dim) {
        return Ok(BoundaryOutcome::NotUniversalAtZero);
    }
    if margin(T_MAX)? >= 0.0 {
        return Ok(BoundaryOutcome::AboveTmax);
    }
    let (mut lo, mut hi) = (0.0, T_MAX);
    let (mut m_lo, mut m_hi) = (at_zero.margin(dim), margin(T_MAX)?);
    while hi - lo > 1e-14 * T_MAX {
        let mid = 0.5 * (lo + hi);
        let m = margin(mid)?;
        if m.abs() < tol {
            return Ok(BoundaryOutcome::Found { t_star: mid, margin: m });
        }
        if m >= 0.0 {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
    Ok(BoundaryOutcome::Discontinuous {
        t_star: 0.5 * (lo + hi),
        margin_below: m_lo,
        margin_above: m_hi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub param: f64,
    #[serde(flatten)]
    pub outcome: BoundaryOutcome,
    /// The point evaluated at the reported temperature.
    #[serde(skip)]
    pub point: Option<PhasePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub model: Model,
    pub dim: Dim,
    pub grid: Vec<PhasePoint>,
    pub boundary: Vec<BoundaryPoint>,
    pub k_source: Option<String>,
    pub tolerance: f64,
}

impl PhaseDiagram {
    /// `(param, T*)` for every parameter with a located boundary.
    pub fn boundary_curve(&self) -> Vec<(f64, f64)> {
        self.boundary
            .iter()
            .filter_map(|b| b.outcome.t_star().map(|t| (b.param, t)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "model,param,T,p_z,p_l,universal_2d,universal_3d,margin,row")?;
        for p in &self.grid {
            write_row(&mut out, p, self.dim, "grid")?;
        }
        for b in &self.boundary {
            let row = match b.outcome {
                BoundaryOutcome::Found { .. } => "boundary",
                BoundaryOutcome::AboveTmax => "above-tmax",
                BoundaryOutcome::Discontinuous { .. } => "discontinuous",
                BoundaryOutcome::NotUniversalAtZero => continue,
            };
            if let Some(p) = &b.point {
                write_row(&mut out, p, self.dim, row)?;
            }
        }
        Ok(())
    }
}

fn write_row<W: Write>(out: &mut W, p: &PhasePoint, dim: Dim, row: &str) -> Result<()> {
    writeln!(
        out,
        "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{}",
        p.params.model,
        p.params.param,
        p.temperature,
        p.p_z,
        p.p_l,
        p.universal_2d,
        p.universal_3d,
        p.margin(dim),
        row
    )?;
    Ok(())
}

/// Evaluate every `(param, T)` and locate `T*` for every param.
pub fn sweep(
    model: Model,
    params: &[f64],
    temperatures: &[f64],
    dim: Dim,
    kcurve: Option<&KCurve>,
    tol: f64,
) -> Result<PhaseDiagram> {
    if params.is_empty() {
        return Err(Error::Grid("parameter grid is empty".into()));
    }
    check_increasing(params, "parameter grid")?;
    if !temperatures.is_empty() {
        check_increasing(temperatures, "temperature grid")?;
    }
    let cells: Vec<(f64, f64)> = params
        .iter()
        .flat_map(|&p| temperatures.iter().map(move |&t| (p, t)))
        .collect();
    let grid = cells
        .par_iter()
        .map(|&(p, t)| evaluate_point(&ModelParams::new(model, p), t, kcurve))
        .collect::<Result<Vec<_>>>()?;
    let boundary = params
        .par_iter()
        .map(|&p| {
            let params = ModelParams::new(model, p);
            let outcome = boundary_temperature(&params, dim, kcurve, tol)?;
            let t = match outcome {
                BoundaryOutcome::Found { t_star, .. } | BoundaryOutcome::Discontinuous { t_star, .. } => Some(t_star),
                BoundaryOutcome::AboveTmax => Some(T_MAX),
                BoundaryOutcome::NotUniversalAtZero => None,
            };
            let point = t.map(|t| evaluate_point(&params, t, kcurve)).transpose()?;
            Ok(BoundaryPoint { param: p, outcome, point })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram {
        model,
        dim,
        grid,
        boundary,
        k_source: kcurve.map(|c| c.source.tag()),
        tolerance: tol,
    })
}
