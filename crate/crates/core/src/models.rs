//! Unit Hamiltonians of the two models, their spectra and ground states.
//!
//! Model 1 (XXZ): `Σ_j [S^x s_j^x + S^y s_j^y + (1+δ) S^z s_j^z]`.
//! Model 2 (anisotropic): `Σ_j S·s_j − d_z (S^z)²`.
//! Energies are in units of the coupling strength.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::spin::{center_dicke_product, Axis, CMatrix, CVector, UnitOperator, UnitSpins};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// XXZ coupling with `Δ = 1 + δ`.
    Xxz,
    /// Heisenberg coupling plus `−d_z (S^z_c)²` on the center.
    Aniso,
}

impl Model {
    pub fn param_name(self) -> &'static str {
        match self {
            Model::Xxz => "delta",
            Model::Aniso => "dz",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Xxz => "xxz",
            Model::Aniso => "aniso",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xxz" | "1" | "model1" => Ok(Model::Xxz),
            "aniso" | "anisotropic" | "2" | "model2" => Ok(Model::Aniso),
            _ => Err(Error::Domain(format!("unknown model '{s}' (xxz or aniso)"))),
        }
    }
}

/// A model together with its single parameter: `δ` for XXZ, `d_z` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model: Model,
    pub param: f64,
}

impl ModelParams {
    pub fn new(model: Model, param: f64) -> Self {
        Self { model, param }
    }

    pub fn xxz(delta: f64) -> Self {
        Self::new(Model::Xxz, delta)
    }

    pub fn aniso(dz: f64) -> Self {
        Self::new(Model::Aniso, dz)
    }

    pub fn delta(&self) -> Option<f64> {
        (self.model == Model::Xxz).then_some(self.param)
    }

    pub fn dz(&self) -> Option<f64> {
        (self.model == Model::Aniso).then_some(self.param)
    }

    pub fn validate(&self) -> Result<()> {
        if self.param.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} must be finite, got {}",
                self.model.param_name(),
                self.param
            )))
        }
    }

    /// Whether the ground state has the entangled form with a finite `a`.
    pub fn has_entangled_ground_state(&self) -> bool {
        match self.model {
            Model::Xxz => self.param > -2.0,
            Model::Aniso => true,
        }
    }

    fn cache_key(&self) -> (Model, u64) {
        (self.model, self.param.to_bits())
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}={}", self.model, self.model.param_name(), self.param)
    }
}

static SPINS: LazyLock<UnitSpins> = LazyLock::new(UnitSpins::new);

pub(crate) fn unit_spins() -> &'static UnitSpins {
    &SPINS
}

pub fn build_unit_hamiltonian(params: &ModelParams) -> Result<UnitOperator> {
    params.validate()?;
    let spins = unit_spins();
    let zz_weight = match params.model {
        Model::Xxz => 1.0 + params.param,
        Model::Aniso => 1.0,
    };
    let mut h = CMatrix::zeros(32, 32);
    for j in 1..=3 {
        h += spins.get(0, Axis::X) * spins.get(j, Axis::X);
        h += spins.get(0, Axis::Y) * spins.get(j, Axis::Y);
        h += (spins.get(0, Axis::Z) * spins.get(j, Axis::Z)).map(|z| z * zz_weight);
    }
    if params.model == Model::Aniso {
        let sz = spins.get(0, Axis::Z);
        h -= (sz * sz).map(|z| z * params.param);
    }
    // products of commuting Hermitian factors; symmetrize away rounding
    let h = (&h + h.adjoint()).map(|z| z * 0.5);
    Ok(UnitOperator { matrix: h })
}

/// Closed-form lowest energy of a unit.
pub fn analytic_ground_energy(params: &ModelParams) -> f64 {
    let p = params.param;
    match params.model {
        Model::Xxz if p <= -2.0 => 9.0 * (1.0 + p) / 4.0,
        _ => (-9.0 - 5.0 * p - 2.0 * (9.0 + 4.0 * p * p).sqrt()) / 4.0,
    }
}

/// Amplitude ratio `a` of the entangled ground state;
/// `1/a = (−2p + √(9 + 4p²))/3`.
pub fn deformation_parameter(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if !params.has_entangled_ground_state() {
        return Err(Error::Domain(format!(
            "deformation parameter undefined for δ = {} ≤ −2 (degenerate ferromagnetic ground space)",
            params.param
        )));
    }
    let p = params.param;
    Ok(3.0 / (-2.0 * p + (9.0 + 4.0 * p * p).sqrt()))
}

/// Parameter value (`δ` or `d_z`) producing deformation `a`.
pub fn parameter_for_deformation(a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    let b = 3.0 / a;
    Ok((9.0 - b * b) / (4.0 * b))
}

/// The entangled ground state written through the deformation `a`.
pub fn analytic_ground_state(params: &ModelParams) -> Result<CVector> {
    let a = deformation_parameter(params)?;
    let ket = |mc: f64, ms: f64| center_dicke_product(mc, ms).expect("valid projections");
    let ghz_part = ket(1.5, -1.5) - ket(-1.5, 1.5);
    let mid_part = ket(0.5, -0.5) - ket(-0.5, 0.5);
    let v = ghz_part.map(|z| -z) + mid_part.map(|z| z / a);
    let n = v.norm();
    Ok(v.map(|z| z / n))
}

/// Eigenvalues (ascending) and matching eigenvector columns of a unit.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub energies: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Number of levels within the degeneracy tolerance of the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.energies[0];
        self.energies
            .iter()
            .take_while(|&&e| e - e0 < tolerances::DEGENERACY)
            .count()
    }
}

pub fn eigensystem(params: &ModelParams) -> Result<Eigensystem> {
    let h = build_unit_hamiltonian(params)?.matrix;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(Eigensystem { energies, vectors })
}

static EIGEN_CACHE: LazyLock<RwLock<HashMap<(Model, u64), Arc<Eigensystem>>>> =
    LazyLock::new(Default::default);

/// Memoized [`eigensystem`]; entries are immutable once inserted.
pub fn cached_eigensystem(params: &ModelParams) -> Result<Arc<Eigensystem>> {
    let key = params.cache_key();
    if let Some(hit) = EIGEN_CACHE.read().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let fresh = Arc::new(eigensystem(params)?);
    let mut guard = EIGEN_CACHE.write().expect("cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(fresh)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub e0: f64,
    /// Lowest level above the ground space.
    pub e1: f64,
    pub gap: f64,
    pub ground_degeneracy: usize,
}

pub fn spectrum(params: &ModelParams) -> Result<SpectrumSummary> {
    let eig = cached_eigensystem(params)?;
    let e0 = eig.ground_energy();
    let deg = eig.ground_degeneracy();
    let e1 = eig.energies.get(deg).copied().unwrap_or(e0);
    Ok(SpectrumSummary {
        e0,
        e1,
        gap: e1 - e0,
        ground_degeneracy: deg,
    })
}

pub const DEFAULT_KINK_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Kink {
    pub location: f64,
    /// Right slope minus left slope of `E0`.
    pub slope_jump: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanStatus {
    Ok,
    /// Smooth curvature alone produces slope changes comparable to the
    /// threshold; kinks may be spurious or missed.
    CoarseGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionScan {
    pub kinks: Vec<Kink>,
    pub status: ScanStatus,
}

/// Locates first-order kinks of the numerical ground energy on a grid.
///
/// One-sided slopes are compared at every interior point; consecutive
/// flagged points are merged into one kink carrying their summed jump and
/// the location of the largest one.
pub fn detect_transition(model: Model, grid: &[f64], jump_threshold: f64) -> Result<TransitionScan> {
    check_increasing(grid, "parameter")?;
    if grid.len() < 3 {
        return Err(Error::Grid("kink detection needs at least 3 points".into()));
    }
    let e0: Vec<f64> = grid
        .iter()
        .map(|&p| eigensystem(&ModelParams::new(model, p)).map(|e| e.ground_energy()))
        .collect::<Result<_>>()?;

    let jumps: Vec<(usize, f64)> = (1..grid.len() - 1)
        .map(|i| {
            let left = (e0[i] - e0[i - 1]) / (grid[i] - grid[i - 1]);
            let right = (e0[i + 1] - e0[i]) / (grid[i + 1] - grid[i]);
            (i, right - left)
        })
        .collect();

    let mut kinks = Vec::new();
    let mut status = ScanStatus::Ok;
    let last = jumps.len() - 1;
    let mut start = 0;
    while start < jumps.len() {
        let (_, jump) = jumps[start];
        if jump.abs() <= jump_threshold {
            if jump.abs() > 0.5 * jump_threshold {
                status = ScanStatus::CoarseGrid;
            }
            start += 1;
            continue;
        }
        let mut end = start;
        while end < last && jumps[end + 1].1.abs() > jump_threshold {
            end += 1;
        }
        let cluster = &jumps[start..=end];
        // a kink between two grid points splits over at most two slopes and
        // needs a quiet point on each side to be told apart from curvature
        if cluster.len() > 2 || start == 0 || end == last {
            status = ScanStatus::CoarseGrid;
        }
        let peak = cluster
            .iter()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("non-empty");
        kinks.push(Kink {
            location: grid[peak.0],
            slope_jump: cluster.iter().map(|c| c.1).sum(),
        });
        start = end + 1;
    }
    Ok(TransitionScan { kinks, status })
}
