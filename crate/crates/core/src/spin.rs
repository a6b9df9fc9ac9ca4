//! Spin operators and the tensor-product layout of one unit.
//!
//! A unit is `center ⊗ q1 ⊗ q2 ⊗ q3` with a spin-3/2 center and three
//! spin-1/2 virtual qubits. Every basis is ordered by descending `m`
//! (`3/2, 1/2, -1/2, -3/2` and `↑, ↓`), so the unit basis index is
//! `8·i_center + 4·b1 + 2·b2 + b3` with `b = 0` for `↑`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Local dimensions of a unit, center first.
pub const UNIT_DIMS: [usize; 4] = [4, 2, 2, 2];
/// Hilbert-space dimension of a unit.
pub const UNIT_DIM: usize = 32;
/// Slot names in tensor order.
pub const SLOT_LABELS: [&str; 4] = ["center", "q1", "q2", "q3"];

pub const CENTER: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Half,
    ThreeHalves,
}

impl Spin {
    pub fn from_magnitude(s: f64) -> Result<Self> {
        if s == 0.5 {
            Ok(Spin::Half)
        } else if s == 1.5 {
            Ok(Spin::ThreeHalves)
        } else {
            Err(Error::UnsupportedSpin(s))
        }
    }

    pub fn magnitude(self) -> f64 {
        match self {
            Spin::Half => 0.5,
            Spin::ThreeHalves => 1.5,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Spin::Half => 2,
            Spin::ThreeHalves => 4,
        }
    }
}

/// Angular-momentum matrices for one spin, `ħ = 1`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub spin: Spin,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    pub splus: CMatrix,
    pub sminus: CMatrix,
}

impl SpinOperators {
    pub fn component(&self, axis: Axis) -> &CMatrix {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }
}

/// Standard spin matrices in the descending-`m` basis.
pub fn spin_operators(s: f64) -> Result<SpinOperators> {
    let spin = Spin::from_magnitude(s)?;
    let n = spin.dim();
    let m = |i: usize| s - i as f64;

    let mut splus = CMatrix::zeros(n, n);
    for i in 1..n {
        let mi = m(i);
        splus[(i - 1, i)] = C64::new((s * (s + 1.0) - mi * (mi + 1.0)).sqrt(), 0.0);
    }
    let sminus = splus.adjoint();
    let sx = (&splus + &sminus).map(|z| z * 0.5);
    let sy = (&splus - &sminus).map(|z| z * C64::new(0.0, -0.5));
    let sz = CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::new(m(r), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(SpinOperators {
        spin,
        sx,
        sy,
        sz,
        splus,
        sminus,
    })
}

/// Kronecker product over a list of factors.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = it.next().cloned().unwrap_or_else(|| CMatrix::identity(1, 1));
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Places `op` on `slot` of a tensor product with local dimensions `dims`,
/// identity elsewhere.
pub fn embed(op: &CMatrix, slot: usize, dims: &[usize]) -> Result<CMatrix> {
    let expected = *dims.get(slot).ok_or(Error::DimensionMismatch {
        slot,
        expected: 0,
        found: op.nrows(),
    })?;
    if !op.is_square() || op.nrows() != expected {
        return Err(Error::DimensionMismatch {
            slot,
            expected,
            found: op.nrows(),
        });
    }
    let factors: Vec<CMatrix> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i == slot {
                op.clone()
            } else {
                CMatrix::identity(d, d)
            }
        })
        .collect();
    Ok(kron_all(&factors))
}

/// A 32×32 operator on one unit in the canonical slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitOperator {
    pub matrix: CMatrix,
}

impl UnitOperator {
    pub fn embed(op: &CMatrix, slot: usize) -> Result<Self> {
        Ok(Self {
            matrix: embed(op, slot, &UNIT_DIMS)?,
        })
    }

    pub fn slot_labels(&self) -> [&'static str; 4] {
        SLOT_LABELS
    }

    pub fn identity() -> Self {
        Self {
            matrix: CMatrix::identity(UNIT_DIM, UNIT_DIM),
        }
    }
}

/// Embedded spin components for every slot of a unit.
#[derive(Clone, Debug)]
pub struct UnitSpins {
    /// `slots[k][axis]`, `k = 0` is the center.
    slots: Vec<[CMatrix; 3]>,
}

impl UnitSpins {
    pub fn new() -> Self {
        let center = spin_operators(1.5).expect("spin-3/2 supported");
        let qubit = spin_operators(0.5).expect("spin-1/2 supported");
        let slots = (0..4)
            .map(|k| {
                let ops = if k == CENTER { &center } else { &qubit };
                Axis::ALL.map(|a| embed(ops.component(a), k, &UNIT_DIMS).expect("dims match"))
            })
            .collect();
        Self { slots }
    }

    pub fn get(&self, slot: usize, axis: Axis) -> &CMatrix {
        &self.slots[slot][axis as usize]
    }

    /// Total spin component over the center and all three qubits.
    pub fn total(&self, axis: Axis) -> CMatrix {
        (0..4).fold(CMatrix::zeros(UNIT_DIM, UNIT_DIM), |acc, k| {
            acc + self.get(k, axis)
        })
    }
}

impl Default for UnitSpins {
    fn default() -> Self {
        Self::new()
    }
}

/// Index of the center state `|m⟩` in the descending-`m` basis.
pub fn center_index(m: f64) -> Result<usize> {
    match m {
        x if x == 1.5 => Ok(0),
        x if x == 0.5 => Ok(1),
        x if x == -0.5 => Ok(2),
        x if x == -1.5 => Ok(3),
        _ => Err(Error::InvalidProjection(m)),
    }
}

/// Symmetric three-qubit state with total `S_z = m`.
pub fn dicke_state(m: f64) -> Result<CVector> {
    // number of down spins
    let downs = match m {
        x if x == 1.5 => 0,
        x if x == 0.5 => 1,
        x if x == -0.5 => 2,
        x if x == -1.5 => 3,
        _ => return Err(Error::InvalidProjection(m)),
    };
    let members: Vec<usize> = (0..8usize)
        .filter(|b| b.count_ones() as usize == downs)
        .collect();
    let amp = 1.0 / (members.len() as f64).sqrt();
    let mut v = CVector::zeros(8);
    for b in members {
        v[b] = C64::new(amp, 0.0);
    }
    Ok(v)
}

/// `|m_c⟩ ⊗ |m_s⟩` with the qubit factor a Dicke state.
pub fn center_dicke_product(m_center: f64, m_qubits: f64) -> Result<CVector> {
    let ic = center_index(m_center)?;
    let d = dicke_state(m_qubits)?;
    let mut v = CVector::zeros(UNIT_DIM);
    v.rows_mut(8 * ic, 8).copy_from(&d);
    Ok(v)
}

/// Largest element-wise deviation of `m` from its adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest element modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(i θ A)` for Hermitian `A`, via its eigendecomposition.
pub fn unitary_exp(a: &CMatrix, theta: f64) -> CMatrix {
    let eig = a.clone().symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, theta * l)),
    );
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}
