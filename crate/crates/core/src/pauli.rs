//! Stabilizer twirl of the noisy GHZ state and its Pauli error classes.
//!
//! Qubit 0 is the logical center and the most significant bit of the 16-dim
//! index; qubits 1–3 follow. The GHZ code is stabilized by `X0X1X2X3`,
//! `Z0Z1`, `Z0Z2`, `Z0Z3`. A `−1` eigenvalue of `X0X1X2X3` is booked as `Z0`,
//! a `−1` of `Z0Zi` as `Xi`, and `X1X2X3` is written `X0`.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::distill::{ghz_vector, LogicalGhzState};
use crate::error::{Error, Result};
use crate::spin::{CMatrix, CVector, C64};
use crate::tolerances;

/// A Pauli string on four qubits, `X^x Z^z` up to phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pauli4 {
    pub x: u8,
    pub z: u8,
}

const fn bit(q: u8) -> u8 {
    1 << (3 - q)
}

impl Pauli4 {
    pub const IDENTITY: Pauli4 = Pauli4 { x: 0, z: 0 };

    pub const fn new(x_qubits: &[u8], z_qubits: &[u8]) -> Self {
        let mut x = 0;
        let mut z = 0;
        let mut i = 0;
        while i < x_qubits.len() {
            x |= bit(x_qubits[i]);
            i += 1;
        }
        let mut i = 0;
        while i < z_qubits.len() {
            z |= bit(z_qubits[i]);
            i += 1;
        }
        Pauli4 { x, z }
    }

    /// `P|i⟩ = (−1)^{|z ∧ i|} |i ⊕ x⟩`.
    fn act(&self, i: usize) -> (usize, f64) {
        let sign = if (self.z as usize & i).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (i ^ self.x as usize, sign)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(16);
        for i in 0..16 {
            let (j, s) = self.act(i);
            out[j] = v[i] * s;
        }
        out
    }

    /// `P ρ P†`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(16, 16);
        for i in 0..16 {
            let (pi, si) = self.act(i);
            for j in 0..16 {
                let (pj, sj) = self.act(j);
                out[(pi, pj)] = rho[(i, j)] * (si * sj);
            }
        }
        out
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(16, 16);
        for i in 0..16 {
            let (j, s) = self.act(i);
            m[(j, i)] = C64::new(s, 0.0);
        }
        m
    }
}

/// The four GHZ stabilizer generators.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    pub generators: [Pauli4; 4],
}

impl StabilizerGroup {
    pub fn ghz() -> Self {
        Self {
            generators: [
                Pauli4::new(&[0, 1, 2, 3], &[]),
                Pauli4::new(&[], &[0, 1]),
                Pauli4::new(&[], &[0, 2]),
                Pauli4::new(&[], &[0, 3]),
            ],
        }
    }

    pub fn matrices(&self) -> [CMatrix; 4] {
        self.generators.map(|g| g.matrix())
    }
}

impl Default for StabilizerGroup {
    fn default() -> Self {
        Self::ghz()
    }
}

/// `ρ' = Π_K ½([I] + [K]) ρ` over the generators.
pub fn twirl(rho16: &CMatrix) -> CMatrix {
    StabilizerGroup::ghz()
        .generators
        .iter()
        .fold(rho16.clone(), |acc, k| (&acc + k.conjugate(&acc)).map(|z| z * 0.5))
}

/// Inequivalent Pauli errors on the GHZ code, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PauliClass {
    I,
    Z0,
    X1,
    Z0X1,
    X2,
    Z0X2,
    X3,
    Z0X3,
    X1X2,
    Z0X1X2,
    X2X3,
    Z0X2X3,
    X1X3,
    Z0X1X3,
    /// Same action on the code as `X1X2X3`.
    X0,
    Z0X0,
}

impl PauliClass {
    pub const ALL: [PauliClass; 16] = [
        PauliClass::I,
        PauliClass::Z0,
        PauliClass::X1,
        PauliClass::Z0X1,
        PauliClass::X2,
        PauliClass::Z0X2,
        PauliClass::X3,
        PauliClass::Z0X3,
        PauliClass::X1X2,
        PauliClass::Z0X1X2,
        PauliClass::X2X3,
        PauliClass::Z0X2X3,
        PauliClass::X1X3,
        PauliClass::Z0X1X3,
        PauliClass::X0,
        PauliClass::Z0X0,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PauliClass::I => "I",
            PauliClass::Z0 => "Z0",
            PauliClass::X1 => "X1",
            PauliClass::Z0X1 => "Z0X1",
            PauliClass::X2 => "X2",
            PauliClass::Z0X2 => "Z0X2",
            PauliClass::X3 => "X3",
            PauliClass::Z0X3 => "Z0X3",
            PauliClass::X1X2 => "X1X2",
            PauliClass::Z0X1X2 => "Z0X1X2",
            PauliClass::X2X3 => "X2X3",
            PauliClass::Z0X2X3 => "Z0X2X3",
            PauliClass::X1X3 => "X1X3",
            PauliClass::Z0X1X3 => "Z0X1X3",
            PauliClass::X0 => "X0",
            PauliClass::Z0X0 => "Z0X0",
        }
    }

    /// X-flip part, as qubit indices.
    fn x_qubits(self) -> &'static [u8] {
        use PauliClass::*;
        match self {
            I | Z0 => &[],
            X1 | Z0X1 => &[1],
            X2 | Z0X2 => &[2],
            X3 | Z0X3 => &[3],
            X1X2 | Z0X1X2 => &[1, 2],
            X2X3 | Z0X2X3 => &[2, 3],
            X1X3 | Z0X1X3 => &[1, 3],
            X0 | Z0X0 => &[0],
        }
    }

    pub fn has_z0(self) -> bool {
        (self as usize) % 2 == 1
    }

    pub fn pauli(self) -> Pauli4 {
        let z: &[u8] = if self.has_z0() { &[0] } else { &[] };
        Pauli4::new(self.x_qubits(), z)
    }

    /// `σ|GHZ⟩`.
    pub fn state(self) -> CVector {
        self.pauli().apply(&ghz_vector())
    }
}

impl fmt::Display for PauliClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliErrorDistribution {
    /// Indexed like [`PauliClass::ALL`].
    pub probs: [f64; 16],
    pub p_s: f64,
}

impl PauliErrorDistribution {
    pub fn get(&self, class: PauliClass) -> f64 {
        self.probs[class as usize]
    }

    pub fn set(&mut self, class: PauliClass, p: f64) {
        self.probs[class as usize] = p;
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliClass, f64)> + '_ {
        PauliClass::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    /// Distribution with all weight on one class.
    pub fn pure(class: PauliClass) -> Self {
        let mut d = Self::zero();
        d.set(class, 1.0);
        d
    }

    pub fn zero() -> Self {
        Self {
            probs: [0.0; 16],
            p_s: 1.0,
        }
    }

    /// Share of the error weight (everything but `I`) in classes other than
    /// `Z0`, `Xi`, `Z0Xi`.
    pub fn neglected_share(&self) -> f64 {
        use PauliClass::*;
        let errors = self.total() - self.get(I);
        if errors <= 0.0 {
            return 0.0;
        }
        let kept: f64 = [Z0, X1, X2, X3, Z0X1, Z0X2, Z0X3]
            .iter()
            .map(|&c| self.get(c))
            .sum();
        ((errors - kept) / errors).max(0.0)
    }
}

/// `p_σ = ⟨GHZ|σ† ρ' σ|GHZ⟩` over the 16 classes.
pub fn extract_error_probs(rho_twirled: &CMatrix, p_s: f64) -> Result<PauliErrorDistribution> {
    let mut probs = [0.0; 16];
    for class in PauliClass::ALL {
        let v = class.state();
        probs[class as usize] = v.dotc(&(rho_twirled * &v)).re;
    }
    let total: f64 = probs.iter().sum();
    let trace = rho_twirled.trace().re;
    if total < trace - tolerances::PAULI_COVERAGE || total < 1.0 - tolerances::PAULI_COVERAGE {
        return Err(Error::BasisCoverage(total));
    }
    Ok(PauliErrorDistribution { probs, p_s })
}

/// Twirl then extract, carrying the success probability along.
pub fn error_distribution(ghz: &LogicalGhzState) -> Result<PauliErrorDistribution> {
    extract_error_probs(&twirl(&ghz.rho16), ghz.p_s)
}

/// Display rounding used in the class report: probabilities at or
/// above 0.01 in fixed notation with four decimals, smaller ones with three
/// significant figures.
pub fn display_probability(p: f64) -> String {
    if p.abs() >= 0.01 {
        format!("{p:.4}")
    } else {
        format!("{p:.2e}")
    }
}

/// `class,probability` CSV with display rounding.
pub fn write_table_report<W: Write>(dist: &PauliErrorDistribution, mut out: W) -> Result<()> {
    writeln!(out, "class,probability")?;
    for (class, p) in dist.iter() {
        writeln!(out, "{},{}", class, display_probability(p))?;
    }
    Ok(())
}

/// Full-precision `class,probability` CSV.
pub fn write_table_csv<W: Write>(dist: &PauliErrorDistribution, mut out: W) -> Result<()> {
    writeln!(out, "class,probability")?;
    for (class, p) in dist.iter() {
        writeln!(out, "{},{:.16e}", class, p)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::distill_channel;
    use crate::models::ModelParams;
    use crate::spin::max_abs;
    use crate::thermal::thermal_state;

    fn projector(v: &CVector) -> CMatrix {
        v * v.adjoint()
    }

    #[test]
    fn stabilizers_commute_square_and_fix_ghz() {
        let mats = StabilizerGroup::ghz().matrices();
        let id = CMatrix::identity(16, 16);
        let g = ghz_vector();
        for a in &mats {
            assert!(max_abs(&(a * a - &id)) < 1e-15);
            assert!((a * &g - &g).norm() < 1e-15);
            for b in &mats {
                assert!(max_abs(&(a * b - b * a)) < 1e-15);
            }
        }
    }

    #[test]
    fn class_states_form_orthonormal_basis() {
        let states: Vec<CVector> = PauliClass::ALL.iter().map(|c| c.state()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ip = a.dotc(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_matrix_matches_action() {
        let p = PauliClass::Z0X1X3.pauli();
        let v = ghz_vector();
        assert!((p.matrix() * &v - p.apply(&v)).norm() < 1e-15);
        let rho = projector(&PauliClass::X2.state());
        let m = p.matrix();
        assert!(max_abs(&(&m * &rho * m.adjoint() - p.conjugate(&rho))) < 1e-15);
    }

    #[test]
    fn twirl_fixed_points() {
        let ghz = projector(&ghz_vector());
        assert!(max_abs(&(twirl(&ghz) - &ghz)) < 1e-15);
        let x1 = projector(&PauliClass::X1.state());
        assert!(max_abs(&(twirl(&x1) - &x1)) < 1e-15);
    }

    #[test]
    fn twirl_removes_coherence() {
        let v = (ghz_vector() + PauliClass::X1.state()).map(|z| z * std::f64::consts::FRAC_1_SQRT_2);
        let t = twirl(&projector(&v));
        let expect = (projector(&ghz_vector()) + projector(&PauliClass::X1.state())).map(|z| z * 0.5);
        assert!(max_abs(&(t - expect)) < 1e-15);
    }

    #[test]
    fn twirl_is_idempotent_and_diagonalizes() {
        let st = thermal_state(&ModelParams::aniso(0.4), 0.4).unwrap();
        let ghz = distill_channel(&st, crate::models::deformation_parameter(&st.params).unwrap()).unwrap();
        let once = twirl(&ghz.rho16);
        assert!(max_abs(&(twirl(&once) - &once)) < 1e-12);
        assert!((once.trace().re - 1.0).abs() < 1e-12);
        let states: Vec<CVector> = PauliClass::ALL.iter().map(|c| c.state()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                if i != j {
                    assert!(a.dotc(&(&once * b)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pure_inputs() {
        let d = extract_error_probs(&projector(&ghz_vector()), 1.0).unwrap();
        assert!((d.get(PauliClass::I) - 1.0).abs() < 1e-15);
        assert!(d.iter().skip(1).all(|(_, p)| p.abs() < 1e-15));
        let z0 = projector(&PauliClass::Z0.state());
        let d = extract_error_probs(&twirl(&z0), 1.0).unwrap();
        assert!((d.get(PauliClass::Z0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_on_any_qubit_books_as_z0() {
        let z2 = Pauli4::new(&[], &[2]).apply(&ghz_vector());
        let d = extract_error_probs(&projector(&z2), 1.0).unwrap();
        assert!((d.get(PauliClass::Z0) - 1.0).abs() < 1e-15);
        let x123 = Pauli4::new(&[1, 2, 3], &[]).apply(&ghz_vector());
        let d = extract_error_probs(&projector(&x123), 1.0).unwrap();
        assert!((d.get(PauliClass::X0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_error_on_subnormalized_input() {
        let half = projector(&ghz_vector()).map(|z| z * 0.5);
        assert!(matches!(extract_error_probs(&half, 1.0), Err(Error::BasisCoverage(_))));
    }

    #[test]
    fn table_temperature_distribution() {
        let st = thermal_state(&ModelParams::xxz(0.0), 0.16).unwrap();
        let d = error_distribution(&distill_channel(&st, 1.0).unwrap()).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-10);
        assert!(d.probs.iter().all(|&p| p >= -1e-12));
        assert!((d.get(PauliClass::Z0) / 3.45e-3 - 1.0).abs() < 5e-3);
        for c in [PauliClass::X1, PauliClass::X2, PauliClass::X3, PauliClass::Z0X1] {
            assert!((d.get(c) / 3.84e-4 - 1.0).abs() < 5e-3);
        }
        assert!(d.get(PauliClass::X0) < 1e-14);
        assert!(d.neglected_share() < 0.03);
    }

    #[test]
    fn report_formatting() {
        assert_eq!(display_probability(0.99424), "0.9942");
        assert_eq!(display_probability(3.4548e-3), "3.45e-3");
        let mut buf = Vec::new();
        write_table_report(&PauliErrorDistribution::pure(PauliClass::I), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("class,probability\nI,1.0000\nZ0,0.00e0\n"));
        assert_eq!(text.lines().count(), 17);
    }
}
