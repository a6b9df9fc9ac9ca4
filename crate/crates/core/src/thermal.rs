//! Gibbs state of a single unit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{cached_eigensystem, ModelParams};
use crate::spin::{CMatrix, CVector, C64};
use crate::tolerances;

#[derive(Clone, Debug, Serialize)]
pub struct ThermalState {
    #[serde(skip)]
    pub rho: CMatrix,
    pub temperature: f64,
    pub params: ModelParams,
}

impl ThermalState {
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn energy(&self, h: &CMatrix) -> f64 {
        (&self.rho * h).trace().re
    }
}

/// Boltzmann weights over the sorted spectrum, normalized to one.
///
/// Exponents are shifted by the ground energy; `T = 0` spreads the weight
/// uniformly over the (tolerance-defined) ground space.
pub fn boltzmann_weights(energies: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::NegativeTemperature(temperature));
    }
    let e0 = energies[0];
    let raw: Vec<f64> = if temperature == 0.0 {
        energies
            .iter()
            .map(|&e| if e - e0 < tolerances::DEGENERACY { 1.0 } else { 0.0 })
            .collect()
    } else {
        energies
            .iter()
            .map(|&e| (-(e - e0) / temperature).exp())
            .collect()
    };
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / z).collect())
}

pub fn thermal_state(params: &ModelParams, temperature: f64) -> Result<ThermalState> {
    let eig = cached_eigensystem(params)?;
    let w = boltzmann_weights(&eig.energies, temperature)?;
    let weights = CVector::from_iterator(w.len(), w.iter().map(|&x| C64::new(x, 0.0)));
    let v = &eig.vectors;
    let rho = v * CMatrix::from_diagonal(&weights) * v.adjoint();
    let rho = (&rho + rho.adjoint()).map(|z| z * 0.5);
    Ok(ThermalState {
        rho,
        temperature,
        params: *params,
    })
}
