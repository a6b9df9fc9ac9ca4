//! Numerical tolerances shared across the crate.

/// Algebraic identities: commutators, Hermiticity, completeness, unitarity.
pub const ALGEBRA: f64 = 1e-12;

/// Eigen-solves: energies, eigenvector residuals, state overlaps.
pub const EIGEN: f64 = 1e-9;

/// Two energies closer than this are counted as one degenerate level.
pub const DEGENERACY: f64 = 1e-7;

/// Largest weight a distilled state may carry outside the logical code space.
pub const LEAKAGE: f64 = 1e-8;

/// Minimum total weight the 16 Pauli classes must account for.
pub const PAULI_COVERAGE: f64 = 1e-8;
