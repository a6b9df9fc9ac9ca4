//! GHZ distillation from one unit by a generalized measurement on the center.
//!
//! The deformation `D(a) = diag(1, a, a, 1)` undoes the amplitude ratio of
//! the ground state; the axis filters `F̃_α = √(2/3)·(|3/2⟩_α⟨3/2| +
//! |−3/2⟩_α⟨−3/2|)` then project onto a GHZ state along `α`. For
//! `3a² ≥ 1` all three outcomes succeed; below that the `z` outcome becomes a
//! loss event. Outcomes `x` and `y` are rotated back to the `z` basis by
//! `U_y` and `U_x` so the summed channel always targets
//! `(|0000⟩ + |1111⟩)/√2` under the logical encoding
//! `|0⟩ ≡ −|−3/2⟩`, `|1⟩ ≡ |3/2⟩` on the center and `|0⟩ ≡ |↑⟩` on qubits.

use std::f64::consts::FRAC_PI_2;
use std::sync::LazyLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::unit_spins;
use crate::spin::{embed, spin_operators, unitary_exp, Axis, CMatrix, CVector, C64, UNIT_DIMS};
use crate::thermal::ThermalState;
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PovmRegime {
    /// `a ≥ 1/√3`: every outcome yields a GHZ state.
    Standard,
    /// `a < 1/√3`: the `z` outcome deletes the unit.
    Lossy,
}

impl PovmRegime {
    pub fn for_deformation(a: f64) -> Self {
        if 3.0 * a * a >= 1.0 {
            PovmRegime::Standard
        } else {
            PovmRegime::Lossy
        }
    }
}

/// Outcome-labeled Kraus elements on the center spin.
#[derive(Clone, Debug)]
pub struct PovmSet {
    pub regime: PovmRegime,
    pub a: f64,
    /// Indexed by outcome `x`, `y`, `z`.
    pub elements: [CMatrix; 3],
}

impl PovmSet {
    pub fn element(&self, outcome: Axis) -> &CMatrix {
        &self.elements[outcome as usize]
    }

    /// `Σ_α F_α† F_α`.
    pub fn effect_sum(&self) -> CMatrix {
        self.elements
            .iter()
            .fold(CMatrix::zeros(4, 4), |acc, f| acc + f.adjoint() * f)
    }

    /// `‖Σ_α F_α† F_α − I‖` as a max-element norm.
    pub fn completeness_defect(&self) -> f64 {
        crate::spin::max_abs(&(self.effect_sum() - CMatrix::identity(4, 4)))
    }
}

pub fn deformation_operator(a: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(
        [1.0, a, a, 1.0].map(|x| C64::new(x, 0.0)).to_vec(),
    ))
}

/// Spin-3/2 rotation carrying `S_z` eigenvectors onto the `axis` eigenvectors
/// with the same eigenvalue.
fn axis_rotation(axis: Axis) -> CMatrix {
    let s = spin_operators(1.5).expect("spin-3/2 supported");
    match axis {
        // exp(−iπ/2 S_y): z → x
        Axis::X => unitary_exp(&s.sy, -FRAC_PI_2),
        // exp(+iπ/2 S_x): z → y
        Axis::Y => unitary_exp(&s.sx, FRAC_PI_2),
        Axis::Z => CMatrix::identity(4, 4),
    }
}

/// Projector onto `span{|3/2⟩_α, |−3/2⟩_α}`.
pub fn extremal_projector(axis: Axis) -> CMatrix {
    let r = axis_rotation(axis);
    let up = r.column(0).into_owned();
    let down = r.column(3).into_owned();
    &up * up.adjoint() + &down * down.adjoint()
}

/// The undeformed filter `F̃_α`.
pub fn axis_filter(axis: Axis) -> CMatrix {
    extremal_projector(axis).map(|z| z * (2.0f64 / 3.0).sqrt())
}

fn check_deformation(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("deformation a must be positive, got {a}")))
    }
}

/// `F_α = q_α F̃_α D(a)` with `q_x = q_y = 1/a`, `q_z = √((3a²−1)/(2a²))`.
pub fn povm_standard(a: f64) -> Result<PovmSet> {
    check_deformation(a)?;
    if 3.0 * a * a < 1.0 {
        return Err(Error::Domain(format!(
            "standard POVM needs a ≥ 1/√3, got a = {a}"
        )));
    }
    let d = deformation_operator(a);
    let qz = ((3.0 * a * a - 1.0) / (2.0 * a * a)).sqrt();
    let el = |axis: Axis, q: f64| (axis_filter(axis) * &d).map(|z| z * q);
    Ok(PovmSet {
        regime: PovmRegime::Standard,
        a,
        elements: [el(Axis::X, 1.0 / a), el(Axis::Y, 1.0 / a), el(Axis::Z, qz)],
    })
}

/// `F'_{x,y} = √3 F̃_{x,y} D(a)` and the loss element
/// `F'_z = diag(0, √(1−3a²), √(1−3a²), 0)`.
pub fn povm_lossy(a: f64) -> Result<PovmSet> {
    check_deformation(a)?;
    if 3.0 * a * a >= 1.0 {
        return Err(Error::Domain(format!(
            "lossy POVM needs a < 1/√3, got a = {a}"
        )));
    }
    let d = deformation_operator(a);
    let el = |axis: Axis| (axis_filter(axis) * &d).map(|z| z * 3f64.sqrt());
    let r = (1.0 - 3.0 * a * a).sqrt();
    let loss = CMatrix::from_diagonal(&CVector::from_vec(
        [0.0, r, r, 0.0].map(|x| C64::new(x, 0.0)).to_vec(),
    ));
    Ok(PovmSet {
        regime: PovmRegime::Lossy,
        a,
        elements: [el(Axis::X), el(Axis::Y), loss],
    })
}

/// The POVM family appropriate for `a`.
pub fn povm_for(a: f64) -> Result<PovmSet> {
    match PovmRegime::for_deformation(a) {
        PovmRegime::Standard => povm_standard(a),
        PovmRegime::Lossy => povm_lossy(a),
    }
}

/// Whole-unit rotations fixing the GHZ basis after `x` and `y` outcomes.
#[derive(Clone, Debug)]
pub struct BasisFixers {
    /// `exp[−i(π/2)(S^x_c + s^x_1 + s^x_2 + s^x_3)]`, applied after `F_y`.
    pub u_x: CMatrix,
    /// `exp[+i(π/2)(S^y_c + s^y_1 + s^y_2 + s^y_3)]`, applied after `F_x`.
    pub u_y: CMatrix,
}

static FIXERS: LazyLock<BasisFixers> = LazyLock::new(|| {
    let spins = unit_spins();
    BasisFixers {
        u_x: unitary_exp(&spins.total(Axis::X), -FRAC_PI_2),
        u_y: unitary_exp(&spins.total(Axis::Y), FRAC_PI_2),
    }
});

pub fn basis_fixers() -> &'static BasisFixers {
    &FIXERS
}

/// Logical 4-qubit state extracted from a unit state.
#[derive(Clone, Debug)]
pub struct EncodedState {
    pub rho16: CMatrix,
    /// Weight outside `span{|3/2⟩, |−3/2⟩}` on the center, relative to the
    /// input trace.
    pub leakage: f64,
}

/// Maps logical center bit to (physical center index, sign).
const CENTER_CODE: [(usize, f64); 2] = [(3, -1.0), (0, 1.0)];

/// Restricts a unit density matrix to the logical code space and
/// renormalizes.
pub fn encode_logical(rho32: &CMatrix) -> Result<EncodedState> {
    if rho32.shape() != (32, 32) {
        return Err(Error::DimensionMismatch {
            slot: 0,
            expected: 32,
            found: rho32.nrows(),
        });
    }
    let total = rho32.trace().re;
    if !(total > 0.0) {
        return Err(Error::Domain("cannot encode a state with zero trace".into()));
    }
    let mut rho16 = CMatrix::zeros(16, 16);
    for (c, &(pc, sc)) in CENTER_CODE.iter().enumerate() {
        for (d, &(pd, sd)) in CENTER_CODE.iter().enumerate() {
            for i in 0..8 {
                for j in 0..8 {
                    rho16[(8 * c + i, 8 * d + j)] = rho32[(8 * pc + i, 8 * pd + j)] * (sc * sd);
                }
            }
        }
    }
    let kept = rho16.trace().re;
    let leakage = ((total - kept) / total).max(0.0);
    if leakage > tolerances::LEAKAGE {
        return Err(Error::Leakage(leakage));
    }
    Ok(EncodedState {
        rho16: rho16.map(|z| z / kept),
        leakage,
    })
}

/// Noisy GHZ state on (center, q1, q2, q3) with its heralding probability.
#[derive(Clone, Debug)]
pub struct LogicalGhzState {
    pub rho16: CMatrix,
    pub p_s: f64,
    pub regime: PovmRegime,
}

impl LogicalGhzState {
    pub fn fidelity(&self) -> f64 {
        ghz_fidelity(&self.rho16)
    }
}

/// Successful-branch Kraus operators on the whole unit, basis fixers included.
fn success_branches(povm: &PovmSet) -> Vec<CMatrix> {
    let fix = basis_fixers();
    let on_center = |f: &CMatrix| embed(f, 0, &UNIT_DIMS).expect("4x4 center operator");
    let mut out = vec![
        &fix.u_y * on_center(povm.element(Axis::X)),
        &fix.u_x * on_center(povm.element(Axis::Y)),
    ];
    if povm.regime == PovmRegime::Standard {
        out.push(on_center(povm.element(Axis::Z)));
    }
    out
}

/// Outcome-averaged channel before encoding: the summed successful branches
/// and their total weight (the success probability).
pub fn distill_unnormalized(rho32: &CMatrix, a: f64) -> Result<(CMatrix, f64)> {
    let povm = povm_for(a)?;
    let out = success_branches(&povm)
        .iter()
        .fold(CMatrix::zeros(32, 32), |acc, k| acc + k * rho32 * k.adjoint());
    let p_s = out.trace().re;
    Ok((out, p_s))
}

/// Runs the averaged distillation channel on a thermal unit state.
pub fn distill_channel(state: &ThermalState, a: f64) -> Result<LogicalGhzState> {
    distill_density(&state.rho, a)
}

pub fn distill_density(rho32: &CMatrix, a: f64) -> Result<LogicalGhzState> {
    let regime = PovmRegime::for_deformation(a);
    let (out, weight) = distill_unnormalized(rho32, a)?;
    let p_s = match regime {
        PovmRegime::Standard => 1.0,
        PovmRegime::Lossy => weight,
    };
    let encoded = encode_logical(&out)?;
    Ok(LogicalGhzState {
        rho16: encoded.rho16,
        p_s,
        regime,
    })
}

/// Probability of the loss outcome on the zero-temperature ground state:
/// `(1 − 3a²)/(1 + a²)`, zero in the standard regime.
pub fn p_delete(a: f64) -> f64 {
    if 3.0 * a * a >= 1.0 {
        0.0
    } else {
        (1.0 - 3.0 * a * a) / (1.0 + a * a)
    }
}

/// `(|0000⟩ + |1111⟩)/√2`.
pub fn ghz_vector() -> CVector {
    let mut v = CVector::zeros(16);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = C64::new(r, 0.0);
    v[15] = C64::new(r, 0.0);
    v
}

pub fn ghz_fidelity(rho16: &CMatrix) -> f64 {
    let g = ghz_vector();
    g.dotc(&(rho16 * &g)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{analytic_ground_state, deformation_parameter, parameter_for_deformation, ModelParams};
    use crate::spin::{max_abs, UNIT_DIM};
    use crate::thermal::thermal_state;

    fn diag(values: [f64; 4]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(values.map(|x| C64::new(x, 0.0)).to_vec()))
    }

    #[test]
    fn deformation_operator_values() {
        assert_eq!(deformation_operator(1.0), CMatrix::identity(4, 4));
        assert_eq!(deformation_operator(0.5), diag([1.0, 0.5, 0.5, 1.0]));
    }

    #[test]
    fn deformation_restores_heisenberg_state() {
        let params = ModelParams::xxz(-1.1);
        let a = deformation_parameter(&params).unwrap();
        let psi = analytic_ground_state(&params).unwrap();
        let restored = embed(&deformation_operator(a), 0, &UNIT_DIMS).unwrap() * psi;
        let target = analytic_ground_state(&ModelParams::xxz(0.0)).unwrap();
        let ov = target.dotc(&restored).norm() / restored.norm();
        assert!((ov - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extremal_projectors_pick_axis_eigenvectors() {
        let s = spin_operators(1.5).unwrap();
        for axis in Axis::ALL {
            let p = extremal_projector(axis);
            let comp = s.component(axis);
            // S_α² = 9/4 on the range of the projector
            let sq = comp * comp;
            assert!(max_abs(&(&p * &sq * &p - p.map(|z| z * 2.25))) < 1e-12);
            assert!(max_abs(&(&p * comp - comp * &p)) < 1e-12);
            assert!((p.trace().re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn standard_povm_blocks_at_a_one() {
        let povm = povm_standard(1.0).unwrap();
        let fx = povm.element(Axis::X);
        let fy = povm.element(Axis::Y);
        let fz = povm.element(Axis::Z);
        let xy = fx.adjoint() * fx + fy.adjoint() * fy;
        assert!(max_abs(&(xy - diag([1.0 / 3.0, 1.0, 1.0, 1.0 / 3.0]))) < 1e-12);
        assert!(max_abs(&(fz.adjoint() * fz - diag([2.0 / 3.0, 0.0, 0.0, 2.0 / 3.0]))) < 1e-12);
    }

    #[test]
    fn standard_povm_blocks_general_a() {
        for a in [0.6, 0.8, 1.3, 2.7] {
            let povm = povm_standard(a).unwrap();
            let fx = povm.element(Axis::X);
            let fy = povm.element(Axis::Y);
            let xy = fx.adjoint() * fx + fy.adjoint() * fy;
            let e = 1.0 / (3.0 * a * a);
            assert!(max_abs(&(xy - diag([e, 1.0, 1.0, e]))) < 1e-12);
            assert!(povm.completeness_defect() < 1e-12);
        }
        assert!(povm_standard(0.5).is_err());
    }

    #[test]
    fn lossy_povm_blocks() {
        for a in [0.1, 0.3, 0.4, 0.57] {
            let povm = povm_lossy(a).unwrap();
            let fx = povm.element(Axis::X);
            let fy = povm.element(Axis::Y);
            let xy = fx.adjoint() * fx + fy.adjoint() * fy;
            let t = 3.0 * a * a;
            assert!(max_abs(&(xy - diag([1.0, t, t, 1.0]))) < 1e-12);
            assert!(povm.completeness_defect() < 1e-12);
        }
        assert!(povm_lossy(0.6).is_err());
        assert!(povm_lossy(-0.1).is_err());
        let edge = povm_lossy(1.0 / 3f64.sqrt() - 1e-12).unwrap();
        assert!(max_abs(edge.element(Axis::Z)) < 1e-5);
    }

    #[test]
    fn povm_elements_are_contractions() {
        for a in [0.2, 0.5, 0.58, 1.0, 3.0] {
            let povm = povm_for(a).unwrap();
            for f in &povm.elements {
                let top = (f.adjoint() * f).symmetric_eigenvalues().max();
                assert!(top.sqrt() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn basis_fixers_unitary_and_match_padé_exponential() {
        let fix = basis_fixers();
        let id = CMatrix::identity(UNIT_DIM, UNIT_DIM);
        for u in [&fix.u_x, &fix.u_y] {
            assert!(max_abs(&(u * u.adjoint() - &id)) < 1e-12);
        }
        // independent route: scaling-and-squaring exponential
        let spins = unit_spins();
        let gen = spins.total(Axis::Y).map(|z| z * C64::new(0.0, FRAC_PI_2));
        assert!(max_abs(&(gen.exp() - &fix.u_y)) < 1e-10);
    }

    fn center_support_off_extremal(rho: &CMatrix) -> f64 {
        (8..24).map(|i| rho[(i, i)].re).sum::<f64>() / rho.trace().re
    }

    #[test]
    fn fixers_rotate_outcomes_onto_z() {
        let params = ModelParams::xxz(0.0);
        let psi = analytic_ground_state(&params).unwrap();
        let rho = &psi * psi.adjoint();
        let povm = povm_standard(1.0).unwrap();
        let fix = basis_fixers();
        for (axis, u) in [(Axis::X, &fix.u_y), (Axis::Y, &fix.u_x)] {
            let k = u * embed(povm.element(axis), 0, &UNIT_DIMS).unwrap();
            let out = &k * &rho * k.adjoint();
            assert!(center_support_off_extremal(&out) < 1e-14);
            // without the fixer the support is spread
            let bare = embed(povm.element(axis), 0, &UNIT_DIMS).unwrap();
            assert!(center_support_off_extremal(&(&bare * &rho * bare.adjoint())) > 0.1);
        }
    }

    #[test]
    fn encoding_definition() {
        // |3/2⟩⟨3/2| ⊗ |↓↓↓⟩⟨↓↓↓| is unit index 7
        let mut rho = CMatrix::zeros(32, 32);
        rho[(7, 7)] = C64::new(1.0, 0.0);
        let enc = encode_logical(&rho).unwrap();
        assert!((enc.rho16[(15, 15)].re - 1.0).abs() < 1e-15);
        let mut leaky = CMatrix::zeros(32, 32);
        leaky[(7, 7)] = C64::new(0.5, 0.0);
        leaky[(9, 9)] = C64::new(0.5, 0.0);
        assert!(matches!(encode_logical(&leaky), Err(Error::Leakage(_))));
    }

    #[test]
    fn z_branch_gives_positive_phase_ghz() {
        let psi = analytic_ground_state(&ModelParams::xxz(0.0)).unwrap();
        let fz = embed(povm_standard(1.0).unwrap().element(Axis::Z), 0, &UNIT_DIMS).unwrap();
        let out = &fz * &psi;
        let rho = &out * out.adjoint();
        let enc = encode_logical(&rho).unwrap();
        assert!((ghz_fidelity(&enc.rho16) - 1.0).abs() < 1e-12);
        // relative phase +1: the coherence ⟨0000|ρ|1111⟩ is positive real
        assert!(enc.rho16[(0, 15)].re > 0.49);
    }

    #[test]
    fn zero_temperature_distillation_is_exact() {
        for p in [-0.8, -0.3, 0.0, 0.8, 3.0] {
            let params = ModelParams::aniso(p);
            let a = deformation_parameter(&params).unwrap();
            let st = thermal_state(&params, 0.0).unwrap();
            let out = distill_channel(&st, a).unwrap();
            assert!(out.fidelity() > 1.0 - 1e-9, "d_z = {p}");
            let (raw, w) = distill_unnormalized(&st.rho, a).unwrap();
            assert!((raw.trace().re - 1.0).abs() < 1e-12 && (w - 1.0).abs() < 1e-12);
            assert_eq!(out.p_s, 1.0);
        }
    }

    #[test]
    fn zero_temperature_lossy_success_probability() {
        for a2 in [0.05, 0.15, 0.211, 0.3] {
            let a: f64 = f64::sqrt(a2);
            let params = ModelParams::aniso(parameter_for_deformation(a).unwrap());
            let st = thermal_state(&params, 0.0).unwrap();
            let out = distill_channel(&st, a).unwrap();
            assert_eq!(out.regime, PovmRegime::Lossy);
            assert!(out.fidelity() > 1.0 - 1e-9);
            assert!((out.p_s - (1.0 - p_delete(a))).abs() < 1e-10);
        }
    }

    #[test]
    fn p_delete_values() {
        assert_eq!(p_delete(1.0 / 3f64.sqrt()), 0.0);
        assert!((p_delete(0.211f64.sqrt()) - 0.303).abs() < 1e-3);
        // a² = p/(4 − p) inverts to p = 4a²/(1 + a²) = 1 − p_delete
        let a2: f64 = 0.223;
        let p_th = 4.0 * a2 / (1.0 + a2);
        assert!((1.0 - p_delete(a2.sqrt()) - p_th).abs() < 1e-14);
        assert!((p_th - 0.7294).abs() < 1e-3);
    }

    #[test]
    fn table_temperature_fidelity() {
        let st = thermal_state(&ModelParams::xxz(0.0), 0.16).unwrap();
        let out = distill_channel(&st, 1.0).unwrap();
        assert!((out.fidelity() - 0.9942).abs() < 5e-5);
    }

    #[test]
    fn fidelity_decreases_with_temperature() {
        for params in [ModelParams::xxz(0.0), ModelParams::xxz(-1.5), ModelParams::aniso(1.0)] {
            let a = deformation_parameter(&params).unwrap();
            let mut last = f64::INFINITY;
            for t in crate::grid::linspace(0.0, 2.0, 41) {
                let f = distill_channel(&thermal_state(&params, t).unwrap(), a)
                    .unwrap()
                    .fidelity();
                assert!(f <= last + 1e-12, "{params} T={t}");
                last = f;
            }
        }
    }
}
