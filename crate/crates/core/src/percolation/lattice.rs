use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    /// Brick-wall embedding of the honeycomb lattice.
    Honeycomb,
    SquareOctagon,
    Square,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [
        LatticeKind::Honeycomb,
        LatticeKind::SquareOctagon,
        LatticeKind::Square,
    ];

    /// Literature site-percolation threshold.
    pub fn known_threshold(self) -> f64 {
        match self {
            LatticeKind::Honeycomb => 0.6970,
            LatticeKind::SquareOctagon => 0.729724,
            LatticeKind::Square => 0.592746,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Honeycomb => "honeycomb",
            LatticeKind::SquareOctagon => "square-octagon",
            LatticeKind::Square => "square",
        }
    }

    /// Interior coordination number.
    pub fn coordination(self) -> usize {
        match self {
            LatticeKind::Square => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "honeycomb" | "brickwall" | "brick-wall" => Ok(LatticeKind::Honeycomb),
            "square-octagon" | "squareoctagon" | "square_octagon" => Ok(LatticeKind::SquareOctagon),
            "square" => Ok(LatticeKind::Square),
            "cross" => Err(Error::Domain(
                "the cross lattice is not built in; pass its threshold with --p-th".into(),
            )),
            other => Err(Error::Domain(format!("unknown lattice '{other}'"))),
        }
    }
}

/// Lattice kind and linear size `L`. Boundaries are open; spanning is
/// measured left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub size: usize,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Domain(format!("lattice size must be at least 2, got {size}")));
        }
        Ok(Self { kind, size })
    }

    pub fn build(&self) -> Lattice {
        match self.kind {
            LatticeKind::Square => square(self.size, self.size),
            LatticeKind::Honeycomb => {
                let cols = ((3f64.sqrt() * self.size as f64).round() as usize).max(2);
                brick_wall(self.size, cols)
            }
            LatticeKind::SquareOctagon => square_octagon(self.size),
        }
    }
}

/// Site graph in compressed adjacency form with boundary flags.
#[derive(Clone, Debug)]
pub struct Lattice {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    pub left: Vec<bool>,
    pub right: Vec<bool>,
}

impl Lattice {
    fn from_edges(n: usize, edges: &[(usize, usize)], left: Vec<bool>, right: Vec<bool>) -> Self {
        let mut degree = vec![0u32; n];
        for &(a, b) in edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n] as usize];
        for &(a, b) in edges {
            neighbors[fill[a] as usize] = b as u32;
            fill[a] += 1;
            neighbors[fill[b] as usize] = a as u32;
            fill[b] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i] as usize..offsets[i + 1] as usize].sort_unstable();
        }
        Self {
            offsets,
            neighbors,
            left,
            right,
        }
    }

    pub fn num_sites(&self) -> usize {
        self.left.len()
    }

    pub fn neighbors(&self, site: usize) -> &[u32] {
        &self.neighbors[self.offsets[site] as usize..self.offsets[site + 1] as usize]
    }

    pub fn degree(&self, site: usize) -> usize {
        (self.offsets[site + 1] - self.offsets[site]) as usize
    }
}

/// `rows × cols` square grid, site `r * cols + c`.
pub fn square(rows: usize, cols: usize) -> Lattice {
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    let n = rows * cols;
    let left = (0..n).map(|i| i % cols == 0).collect();
    let right = (0..n).map(|i| i % cols == cols - 1).collect();
    Lattice::from_edges(n, &edges, left, right)
}

/// Brick wall: horizontal chains plus a rung below every site with even
/// `r + c`.
pub fn brick_wall(rows: usize, cols: usize) -> Lattice {
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows && (r + c) % 2 == 0 {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    let n = rows * cols;
    let left = (0..n).map(|i| i % cols == 0).collect();
    let right = (0..n).map(|i| i % cols == cols - 1).collect();
    Lattice::from_edges(n, &edges, left, right)
}

/// `L × L` cells of four sites (N, E, S, W) joined in a ring; E links to
/// the W of the next cell, S to the N of the cell below.
pub fn square_octagon(size: usize) -> Lattice {
    const N: usize = 0;
    const E: usize = 1;
    const S: usize = 2;
    const W: usize = 3;
    let idx = |r: usize, c: usize, k: usize| 4 * (r * size + c) + k;
    let mut edges = Vec::new();
    for r in 0..size {
        for c in 0..size {
            for (a, b) in [(N, E), (E, S), (S, W), (W, N)] {
                edges.push((idx(r, c, a), idx(r, c, b)));
            }
            if c + 1 < size {
                edges.push((idx(r, c, E), idx(r, c + 1, W)));
            }
            if r + 1 < size {
                edges.push((idx(r, c, S), idx(r + 1, c, N)));
            }
        }
    }
    let n = 4 * size * size;
    let left = (0..n).map(|i| i % 4 == W && (i / 4) % size == 0).collect();
    let right = (0..n).map(|i| i % 4 == E && (i / 4) % size == size - 1).collect();
    Lattice::from_edges(n, &edges, left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_degrees(lat: &Lattice, interior: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut d: Vec<usize> = (0..lat.num_sites()).filter(|&i| interior(i)).map(|i| lat.degree(i)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    #[test]
    fn coordination_numbers() {
        let sq = square(6, 6);
        assert_eq!(interior_degrees(&sq, |i| (1..5).contains(&(i / 6)) && (1..5).contains(&(i % 6))), vec![4]);
        let bw = brick_wall(6, 10);
        assert_eq!(interior_degrees(&bw, |i| (1..5).contains(&(i / 10)) && (1..9).contains(&(i % 10))), vec![3]);
        let so = square_octagon(5);
        let cell_interior = |i: usize| {
            let cell = i / 4;
            (1..4).contains(&(cell / 5)) && (1..4).contains(&(cell % 5))
        };
        assert_eq!(interior_degrees(&so, cell_interior), vec![3]);
    }

    #[test]
    fn adjacency_is_symmetric() {
        for kind in LatticeKind::ALL {
            let lat = LatticeSpec::new(kind, 5).unwrap().build();
            for i in 0..lat.num_sites() {
                for &j in lat.neighbors(i) {
                    assert!(lat.neighbors(j as usize).contains(&(i as u32)));
                }
            }
        }
    }

    #[test]
    fn honeycomb_aspect() {
        let lat = LatticeSpec::new(LatticeKind::Honeycomb, 10).unwrap().build();
        assert_eq!(lat.num_sites(), 10 * 17);
        assert_eq!(lat.left.iter().filter(|&&b| b).count(), 10);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("square-octagon".parse::<LatticeKind>().unwrap(), LatticeKind::SquareOctagon);
        assert!("cross".parse::<LatticeKind>().is_err());
        assert!(LatticeSpec::new(LatticeKind::Square, 1).is_err());
    }
}
