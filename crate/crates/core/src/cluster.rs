//! From GHZ-level Pauli errors to cluster-qubit error rates.
//!
//! One cluster qubit `C` is built from two GHZ units, `0–3` and `0′–3′`.
//! Qubits 1 and 1′ are fused by a Bell measurement, center 0 is measured out
//! in the `±` basis, and 2, 3, 2′, 3′ are measured with a partner qubit of
//! the neighbors `U`, `L`, `D`, `R` in the `CZ|±±⟩` basis. The surviving
//! qubit 0′ carries `C`.

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliClass, PauliErrorDistribution};

/// Qubits of the final star-shaped fragment, in bit order `C, U, L, D, R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ClusterQubit {
    C,
    U,
    L,
    D,
    R,
}

impl ClusterQubit {
    pub const ALL: [ClusterQubit; 5] = [
        ClusterQubit::C,
        ClusterQubit::U,
        ClusterQubit::L,
        ClusterQubit::D,
        ClusterQubit::R,
    ];
    const NEIGHBORS: [ClusterQubit; 4] = [
        ClusterQubit::U,
        ClusterQubit::L,
        ClusterQubit::D,
        ClusterQubit::R,
    ];

    fn bit(self) -> u8 {
        1 << (4 - self as u8)
    }

    fn name(self) -> &'static str {
        match self {
            ClusterQubit::C => "C",
            ClusterQubit::U => "U",
            ClusterQubit::L => "L",
            ClusterQubit::D => "D",
            ClusterQubit::R => "R",
        }
    }
}

/// Pauli pattern on the fragment, `X^x Z^z` up to phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct ClusterPattern {
    pub x: u8,
    pub z: u8,
}

impl ClusterPattern {
    pub const IDENTITY: ClusterPattern = ClusterPattern { x: 0, z: 0 };

    pub fn z_on(qubits: &[ClusterQubit]) -> Self {
        Self {
            x: 0,
            z: qubits.iter().fold(0, |acc, q| acc | q.bit()),
        }
    }

    pub fn x_on(qubits: &[ClusterQubit]) -> Self {
        Self {
            x: qubits.iter().fold(0, |acc, q| acc | q.bit()),
            z: 0,
        }
    }

    pub fn compose(self, other: Self) -> Self {
        Self {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Pure-Z representative under the star stabilizers `X_C Z_U Z_L Z_D Z_R`
    /// and `X_N Z_C`.
    pub fn canonical(self) -> Self {
        let mut z = self.z;
        let c = ClusterQubit::C.bit();
        if self.x & c != 0 {
            z ^= ClusterQubit::NEIGHBORS.iter().fold(0, |acc, q| acc | q.bit());
        }
        for n in ClusterQubit::NEIGHBORS {
            if self.x & n.bit() != 0 {
                z ^= c;
            }
        }
        Self { x: 0, z }
    }

    pub fn equivalent(self, other: Self) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }
}

impl fmt::Display for ClusterPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x == 0 && self.z == 0 {
            return f.write_str("I");
        }
        for q in ClusterQubit::ALL {
            if self.x & q.bit() != 0 {
                write!(f, "X{}", q.name())?;
            }
        }
        for q in ClusterQubit::ALL {
            if self.z & q.bit() != 0 {
                write!(f, "Z{}", q.name())?;
            }
        }
        Ok(())
    }
}

/// Pauli on the eight block qubits. Bit `i` is qubit `i` of the first unit,
/// bit `4 + i` is qubit `i′` of the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct BlockPauli {
    pub x: u8,
    pub z: u8,
}

impl BlockPauli {
    pub fn x(qubit: u8, primed: bool) -> Self {
        Self {
            x: Self::bit(qubit, primed),
            z: 0,
        }
    }

    pub fn z(qubit: u8, primed: bool) -> Self {
        Self {
            x: 0,
            z: Self::bit(qubit, primed),
        }
    }

    fn bit(qubit: u8, primed: bool) -> u8 {
        assert!(qubit < 4, "block qubit index out of range");
        1 << (qubit + if primed { 4 } else { 0 })
    }

    pub fn compose(self, other: Self) -> Self {
        Self {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Embed a GHZ-level class acting on one of the two units.
    pub fn from_class(class: PauliClass, primed: bool) -> Self {
        let p = class.pauli();
        let shift = if primed { 4 } else { 0 };
        let spread = |m: u8| (0..4).filter(|q| m & (1 << (3 - q)) != 0).fold(0u8, |acc, q| acc | (1 << (q + shift)));
        Self {
            x: spread(p.x),
            z: spread(p.z),
        }
    }

    fn site_sets(self) -> impl Iterator<Item = (Site, bool, bool)> {
        (0..8u8).filter_map(move |b| {
            let (x, z) = (self.x >> b & 1 == 1, self.z >> b & 1 == 1);
            (x || z).then(|| {
                let site = if b < 4 { Site::A(b) } else { Site::B(b - 4) };
                (site, x, z)
            })
        })
    }
}

impl fmt::Display for BlockPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x == 0 && self.z == 0 {
            return f.write_str("I");
        }
        let name = |b: u8| if b < 4 { format!("{b}") } else { format!("{}'", b - 4) };
        for b in 0..8 {
            if self.z >> b & 1 == 1 {
                write!(f, "Z{}", name(b))?;
            }
        }
        for b in 0..8 {
            if self.x >> b & 1 == 1 {
                write!(f, "X{}", name(b))?;
            }
        }
        Ok(())
    }
}

/// One row of the propagation table.
#[derive(Clone, Debug, Serialize)]
pub struct PropagationRule {
    pub label: String,
    /// Every block error the row covers.
    pub sources: Vec<BlockPauli>,
    pub target: ClusterPattern,
}

impl PropagationRule {
    fn new(label: &str, sources: Vec<BlockPauli>, target: ClusterPattern) -> Self {
        Self {
            label: label.to_string(),
            sources,
            target,
        }
    }
}

/// The eight single-error rows.
pub fn propagation_table() -> Vec<PropagationRule> {
    use ClusterQubit::*;
    let all_z = (0..4)
        .flat_map(|q| [BlockPauli::z(q, false), BlockPauli::z(q, true)])
        .collect();
    vec![
        PropagationRule::new("X0", vec![BlockPauli::x(0, false)], ClusterPattern::IDENTITY),
        PropagationRule::new("X0'", vec![BlockPauli::x(0, true)], ClusterPattern::x_on(&[C])),
        PropagationRule::new(
            "X1 or X1'",
            vec![BlockPauli::x(1, false), BlockPauli::x(1, true)],
            ClusterPattern::z_on(&[U, L]),
        ),
        PropagationRule::new("X2", vec![BlockPauli::x(2, false)], ClusterPattern::z_on(&[U])),
        PropagationRule::new("X2'", vec![BlockPauli::x(2, true)], ClusterPattern::z_on(&[D])),
        PropagationRule::new("X3", vec![BlockPauli::x(3, false)], ClusterPattern::z_on(&[L])),
        PropagationRule::new("X3'", vec![BlockPauli::x(3, true)], ClusterPattern::z_on(&[R])),
        PropagationRule::new("Zi", all_z, ClusterPattern::z_on(&[C])),
    ]
}

/// `Z0Xi` rules for the first unit.
pub fn correlated_rules() -> Vec<PropagationRule> {
    use ClusterQubit::*;
    let z0 = BlockPauli::z(0, false);
    vec![
        PropagationRule::new("Z0X1", vec![z0.compose(BlockPauli::x(1, false))], ClusterPattern::z_on(&[C, U, L])),
        PropagationRule::new("Z0X2", vec![z0.compose(BlockPauli::x(2, false))], ClusterPattern::z_on(&[C, U])),
        PropagationRule::new("Z0X3", vec![z0.compose(BlockPauli::x(3, false))], ClusterPattern::z_on(&[C, L])),
    ]
}

pub fn phase_error_rate(dist: &PauliErrorDistribution) -> f64 {
    use PauliClass::*;
    let p = |c| dist.get(c);
    2.0 * (p(Z0) + 2.0 * p(X1) + p(X2) + p(X3) + 3.0 * p(Z0X1) + 2.0 * p(Z0X2) + 2.0 * p(Z0X3))
}

pub fn loss_rate(p_s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::Domain(format!("success probability {p_s} outside [0, 1]")));
    }
    Ok(1.0 - p_s * p_s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelatedError {
    pub pattern: ClusterPattern,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterErrorRates {
    pub p_z: f64,
    pub p_l: f64,
    pub correlated: Vec<CorrelatedError>,
}

pub fn cluster_error_rates(dist: &PauliErrorDistribution) -> Result<ClusterErrorRates> {
    use ClusterQubit::*;
    use PauliClass::*;
    let corr = |q: &[ClusterQubit], p: f64| CorrelatedError {
        pattern: ClusterPattern::z_on(q),
        probability: p,
    };
    Ok(ClusterErrorRates {
        p_z: phase_error_rate(dist),
        p_l: loss_rate(dist.p_s.clamp(0.0, 1.0))?,
        correlated: vec![
            corr(&[U, L], 2.0 * dist.get(X1)),
            corr(&[C, U], 2.0 * dist.get(Z0X2)),
            corr(&[C, L], 2.0 * dist.get(Z0X3)),
            corr(&[C, U, L], 2.0 * dist.get(Z0X1)),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Site {
    A(u8),
    B(u8),
    Node(ClusterQubit),
    Bond(ClusterQubit),
}

/// Real state vector over labelled qubits; `labels[0]` is the most
/// significant bit.
#[derive(Clone, Debug)]
struct QState {
    labels: Vec<Site>,
    amps: Vec<f64>,
}

impl QState {
    fn ghz(labels: Vec<Site>) -> Self {
        let n = labels.len();
        let mut amps = vec![0.0; 1 << n];
        amps[0] = std::f64::consts::FRAC_1_SQRT_2;
        amps[(1 << n) - 1] = std::f64::consts::FRAC_1_SQRT_2;
        Self { labels, amps }
    }

    fn tensor(&self, other: &QState) -> QState {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        QState { labels, amps }
    }

    fn shift(&self, site: Site) -> usize {
        let pos = self.labels.iter().position(|&l| l == site).expect("site present");
        self.labels.len() - 1 - pos
    }

    fn apply(&mut self, site: Site, x: bool, z: bool) {
        let m = 1usize << self.shift(site);
        if z {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & m != 0 {
                    *a = -*a;
                }
            }
        }
        if x {
            for i in 0..self.amps.len() {
                if i & m == 0 {
                    self.amps.swap(i, i | m);
                }
            }
        }
    }

    /// Project `sites` onto each basis vector in turn and drop them.
    fn measure(&self, sites: &[Site], basis: &[Vec<f64>]) -> Vec<(f64, QState)> {
        let shifts: Vec<usize> = sites.iter().map(|&s| self.shift(s)).collect();
        let kept: Vec<Site> = self.labels.iter().copied().filter(|l| !sites.contains(l)).collect();
        let kept_shifts: Vec<usize> = kept.iter().map(|&s| self.shift(s)).collect();
        let gather = |idx: usize, sh: &[usize]| sh.iter().fold(0, |acc, &s| (acc << 1) | (idx >> s & 1));
        basis
            .iter()
            .map(|b| {
                let mut amps = vec![0.0; 1 << kept.len()];
                for (idx, &a) in self.amps.iter().enumerate() {
                    if a != 0.0 {
                        amps[gather(idx, &kept_shifts)] += b[gather(idx, &shifts)] * a;
                    }
                }
                let prob: f64 = amps.iter().map(|a| a * a).sum();
                if prob > 0.0 {
                    let n = prob.sqrt();
                    amps.iter_mut().for_each(|a| *a /= n);
                }
                (
                    prob,
                    QState {
                        labels: kept.clone(),
                        amps,
                    },
                )
            })
            .collect()
    }

    fn amplitudes_in(&self, order: &[Site]) -> Vec<f64> {
        let shifts: Vec<usize> = order.iter().map(|&s| self.shift(s)).collect();
        let mut out = vec![0.0; self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            let j = shifts.iter().fold(0, |acc, &s| (acc << 1) | (idx >> s & 1));
            out[j] = a;
        }
        out
    }
}

static BELL_BASIS: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        vec![r, 0.0, 0.0, r],
        vec![r, 0.0, 0.0, -r],
        vec![0.0, r, r, 0.0],
        vec![0.0, r, -r, 0.0],
    ]
});

static PM_BASIS: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![r, r], vec![r, -r]]
});

/// `CZ|±±⟩`.
static CZ_BASIS: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    let mut out = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            out.push(vec![0.5, 0.5 * sb, 0.5 * sa, -0.5 * sa * sb]);
        }
    }
    out
});

const BRANCH_CUTOFF: f64 = 1e-12;
const FRAGMENT_FIDELITY: f64 = 1e-10;

fn attachment(n: ClusterQubit) -> Site {
    match n {
        ClusterQubit::U => Site::A(2),
        ClusterQubit::L => Site::A(3),
        ClusterQubit::D => Site::B(2),
        ClusterQubit::R => Site::B(3),
        ClusterQubit::C => unreachable!("C has no attachment qubit"),
    }
}

fn initial_block(error: BlockPauli) -> QState {
    let a = QState::ghz((0..4).map(Site::A).collect());
    let b = QState::ghz((0..4).map(Site::B).collect());
    let mut s = a.tensor(&b);
    for (site, x, z) in error.site_sets() {
        s.apply(site, x, z);
    }
    s
}

fn walk(state: QState, step: usize, outcomes: &mut Vec<u8>, visit: &mut dyn FnMut(&[u8], &QState)) {
    let branches = match step {
        0 => state.measure(&[Site::A(1), Site::B(1)], &BELL_BASIS),
        1 => state.measure(&[Site::A(0)], &PM_BASIS),
        2..=5 => {
            let n = ClusterQubit::NEIGHBORS[step - 2];
            let pair = QState::ghz(vec![Site::Node(n), Site::Bond(n)]);
            state.tensor(&pair).measure(&[attachment(n), Site::Bond(n)], &CZ_BASIS)
        }
        _ => {
            visit(outcomes, &state);
            return;
        }
    };
    for (k, (prob, next)) in branches.into_iter().enumerate() {
        if prob < BRANCH_CUTOFF {
            continue;
        }
        outcomes.push(k as u8);
        walk(next, step + 1, outcomes, visit);
        outcomes.pop();
    }
}

const FRAGMENT_ORDER: [Site; 5] = [
    Site::B(0),
    Site::Node(ClusterQubit::U),
    Site::Node(ClusterQubit::L),
    Site::Node(ClusterQubit::D),
    Site::Node(ClusterQubit::R),
];

/// Z pattern `s` with `|⟨star| Z^s |ψ⟩| ≈ 1`, and that overlap.
fn identify_frame(state: &QState) -> (Option<u8>, f64) {
    let amps = state.amplitudes_in(&FRAGMENT_ORDER);
    let parity = |v: usize| (v.count_ones() % 2) as i32;
    let mut best = (None, 0.0);
    for s in 0..32u8 {
        let mut overlap = 0.0;
        for (x, &a) in amps.iter().enumerate() {
            let star = if x & 16 != 0 && parity(x & 15) == 1 { -1.0 } else { 1.0 };
            let zs = if parity(x & s as usize) == 1 { -1.0 } else { 1.0 };
            overlap += star * zs * a;
        }
        let overlap: f64 = overlap.abs() / 32f64.sqrt();
        if overlap > best.1 {
            best = (Some(s), overlap);
        }
    }
    if 1.0 - best.1 > FRAGMENT_FIDELITY {
        (None, best.1)
    } else {
        best
    }
}

fn branch_label(outcomes: &[u8]) -> String {
    const BELL: [&str; 4] = ["Phi+", "Phi-", "Psi+", "Psi-"];
    const PM: [&str; 2] = ["+", "-"];
    let mut parts = Vec::new();
    for (i, &o) in outcomes.iter().enumerate() {
        match i {
            0 => parts.push(format!("merge={}", BELL[o as usize])),
            1 => parts.push(format!("shrink={}", PM[o as usize])),
            _ => {
                let n = ClusterQubit::NEIGHBORS[i - 2].name();
                parts.push(format!("{n}={}{}", PM[(o >> 1) as usize], PM[(o & 1) as usize]));
            }
        }
    }
    parts.join(",")
}

/// Byproduct frame of every branch of the error-free protocol.
static IDEAL_FRAMES: LazyLock<std::result::Result<HashMap<Vec<u8>, u8>, String>> = LazyLock::new(|| {
    let mut frames = HashMap::new();
    let mut failure = None;
    walk(initial_block(BlockPauli::default()), 0, &mut Vec::new(), &mut |o, s| {
        match identify_frame(s) {
            (Some(f), _) => {
                frames.insert(o.to_vec(), f);
            }
            (None, fid) if failure.is_none() => {
                failure = Some(format!("{}: best fidelity {fid:.3e}", branch_label(o)));
            }
            _ => {}
        }
    });
    match failure {
        Some(f) => Err(f),
        None => Ok(frames),
    }
});

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    /// Residual error in pure-Z form.
    pub pattern: ClusterPattern,
    pub branches: usize,
    /// Smallest overlap with a Pauli-corrected star fragment over all branches.
    pub min_fidelity: f64,
}

/// Run merge, shrink and the four CZ measurements on every outcome branch
/// with `error` applied to the fresh GHZ pair, and return the residual
/// Pauli frame relative to the error-free run.
pub fn simulate_block_protocol(error: BlockPauli) -> Result<ProtocolOutcome> {
    let source_label = error.to_string();
    let ideal = IDEAL_FRAMES.as_ref().map_err(|detail| Error::FrameMismatch {
        source_label: "I".into(),
        branch: "ideal".into(),
        detail: detail.clone(),
    })?;
    let mut residual: Option<u8> = None;
    let mut branches = 0;
    let mut min_fidelity = 1.0f64;
    let mut failure: Option<Error> = None;
    walk(initial_block(error), 0, &mut Vec::new(), &mut |o, s| {
        if failure.is_some() {
            return;
        }
        branches += 1;
        let mismatch = |detail: String| Error::FrameMismatch {
            source_label: source_label.clone(),
            branch: branch_label(o),
            detail,
        };
        let (frame, fid) = identify_frame(s);
        min_fidelity = min_fidelity.min(fid);
        let Some(frame) = frame else {
            failure = Some(mismatch(format!("no Pauli frame fits, best fidelity {fid:.3e}")));
            return;
        };
        let Some(&s0) = ideal.get(o) else {
            failure = Some(mismatch("branch absent from the error-free run".into()));
            return;
        };
        let r = frame ^ s0;
        match residual {
            None => residual = Some(r),
            Some(prev) if prev != r => {
                failure = Some(mismatch(format!(
                    "residual {} differs from {}",
                    ClusterPattern { x: 0, z: r },
                    ClusterPattern { x: 0, z: prev }
                )))
            }
            _ => {}
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ProtocolOutcome {
        pattern: ClusterPattern {
            x: 0,
            z: residual.unwrap_or(0),
        },
        branches,
        min_fidelity,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleCheck {
    pub label: String,
    pub expected: ClusterPattern,
    /// Simulated pattern per source, in rule order.
    pub found: Vec<(String, ClusterPattern)>,
    pub branches: usize,
    pub passed: bool,
    pub detail: Option<String>,
}

impl fmt::Display for RuleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<10} -> {:<12} ({} branches)",
            self.label,
            self.expected.to_string(),
            self.branches
        )?;
        if let Some(d) = &self.detail {
            write!(f, " {d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub rules: Vec<RuleCheck>,
    pub correlated: Vec<RuleCheck>,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.rules.iter().chain(&self.correlated).all(|r| r.passed)
    }

    pub fn rules_verified(&self) -> usize {
        self.rules.iter().filter(|r| r.passed).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}/{} rules verified, {}/{} correlated rules verified",
            self.rules_verified(),
            self.rules.len(),
            self.correlated.iter().filter(|r| r.passed).count(),
            self.correlated.len()
        )
    }
}

impl fmt::Display for PropagationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rules.iter().chain(&self.correlated) {
            writeln!(f, "{r}")?;
        }
        write!(f, "{}", self.summary())
    }
}

fn check_rule(rule: &PropagationRule) -> RuleCheck {
    let mut check = RuleCheck {
        label: rule.label.clone(),
        expected: rule.target,
        found: Vec::new(),
        branches: 0,
        passed: true,
        detail: None,
    };
    for &src in &rule.sources {
        match simulate_block_protocol(src) {
            Ok(out) => {
                check.branches += out.branches;
                check.found.push((src.to_string(), out.pattern));
                if !out.pattern.equivalent(rule.target) {
                    check.passed = false;
                    check.detail = Some(format!("{src} gave {}", out.pattern));
                }
            }
            Err(e) => {
                check.passed = false;
                check.detail = Some(e.to_string());
            }
        }
        if !check.passed {
            break;
        }
    }
    check
}

/// Simulate every table source on every branch and compare with the table.
pub fn verify_propagation_oracle() -> PropagationReport {
    use rayon::prelude::*;
    let rules = propagation_table();
    let correlated = correlated_rules();
    PropagationReport {
        rules: rules.par_iter().map(check_rule).collect(),
        correlated: correlated.par_iter().map(check_rule).collect(),
    }
}
