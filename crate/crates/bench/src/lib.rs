//! Benchmark fixtures shared by the criterion targets.

use qcpower_core::ModelParams;

/// Parameter points spanning the standard and lossy distillation regimes.
pub fn sample_params() -> Vec<ModelParams> {
    vec![
        ModelParams::xxz(0.0),
        ModelParams::xxz(1.0),
        ModelParams::xxz(-1.0),
        ModelParams::aniso(-1.0),
    ]
}
