//! Contextuality degree: the fewest line constraints that every ±1 valuation
//! of the points must violate.
//!
//! Writing `A` for the line-point incidence matrix over GF(2) and `b` for the
//! vector of negative-line bits, an assignment `x` violates exactly the lines
//! in the support of `A·x ⊕ b`, so the degree is the minimum weight of the
//! coset `b + im(A)`. Three solvers are provided: plain enumeration of `x`,
//! enumeration of `im(A)` through a column basis, and a seeded local search
//! that only gives an upper bound.

mod gray;
mod heuristic;
mod hexagon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::Sign;

pub use gray::{min_weight_coset, MAX_WORDS};
pub use heuristic::{heuristic_degree, heuristic_restarts};
pub use hexagon::{verify_hexagon_shape, HexagonReport};

/// A ±1 valuation of a geometry's points; bit `i` set means point `i` is −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    len: usize,
    words: Vec<u64>,
}

impl Assignment {
    /// All points +1.
    pub fn new(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut a = Self::new(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            a.set(i, b);
        }
        a
    }

    /// Low `len` bits of `code`.
    pub fn from_code(len: usize, code: u64) -> Self {
        Self::from_bits((0..len).map(|i| i < 64 && code >> i & 1 == 1))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn value(&self, i: usize) -> Sign {
        Sign::from_bit(self.get(i))
    }

    pub fn xor_with(&mut self, other: &Assignment) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Hex string of the bytes `b_0 b_1 ...`, where byte `k` holds points
    /// `8k .. 8k+7` with the lowest index in the least significant bit.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = (0..self.len.div_ceil(8))
            .map(|k| (self.words[k / 8] >> (8 * (k % 8))) as u8)
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Config(format!("bad witness hex: {e}")))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Config(format!(
                "witness has {} bytes, expected {}",
                bytes.len(),
                len.div_ceil(8)
            )));
        }
        let a = Self::from_bits((0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1));
        if a.to_hex() != s.to_ascii_lowercase() {
            return Err(Error::Config("witness has bits beyond its length".into()));
        }
        Ok(a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    RankReduced,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Largest search dimension (points, or incidence rank) run without
    /// `long_running`.
    pub point_cap: usize,
    /// Total single-bit flips for the heuristic.
    pub budget: u64,
    pub seed: u64,
    pub long_running: bool,
}

/// Hard ceiling on the enumeration dimension even with `long_running`.
pub const LONG_RUNNING_CAP: usize = 40;
pub const FLIPS_PER_RESTART: u64 = 10_000;

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Exhaustive,
            point_cap: 30,
            budget: 100_000,
            seed: 0,
            long_running: false,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    fn effective_cap(&self) -> usize {
        if self.long_running {
            LONG_RUNNING_CAP.max(self.point_cap)
        } else {
            self.point_cap
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeResult {
    pub degree: usize,
    pub witness: Assignment,
    /// Ids of the lines the witness violates, ascending.
    pub unsatisfied: Vec<usize>,
    pub exact: bool,
    pub method: Method,
}

/// Serialized form of [`DegreeResult`], with the witness as a hex string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub geometry: String,
    pub points: usize,
    pub lines: usize,
    pub degree: usize,
    pub exact: bool,
    pub method: Method,
    pub witness_hex: String,
    pub unsatisfied: Vec<usize>,
    pub nchv_bound: i64,
}

impl DegreeResult {
    pub fn report(&self, geom: &IncidenceGeometry) -> DegreeReport {
        DegreeReport {
            geometry: geom.name().to_owned(),
            points: geom.num_points(),
            lines: geom.num_lines(),
            degree: self.degree,
            exact: self.exact,
            method: self.method,
            witness_hex: self.witness.to_hex(),
            unsatisfied: self.unsatisfied.clone(),
            nchv_bound: geom.num_lines() as i64 - 2 * self.degree as i64,
        }
    }

    fn from_witness(geom: &IncidenceGeometry, witness: Assignment, exact: bool, method: Method) -> Self {
        let unsatisfied = unsatisfied_lines(geom, &witness).expect("witness sized to geometry");
        Self {
            degree: unsatisfied.len(),
            witness,
            unsatisfied,
            exact,
            method,
        }
    }
}

fn check_len(geom: &IncidenceGeometry, a: &Assignment) -> Result<()> {
    if a.len() != geom.num_points() {
        return Err(Error::Dimension {
            expected: geom.num_points(),
            actual: a.len(),
        });
    }
    Ok(())
}

fn violates(line_points: &[usize; 3], sign: Sign, a: &Assignment) -> bool {
    let parity = line_points.iter().fold(false, |acc, &p| acc ^ a.get(p));
    parity != sign.bit()
}

pub fn unsatisfied_lines(geom: &IncidenceGeometry, a: &Assignment) -> Result<Vec<usize>> {
    check_len(geom, a)?;
    Ok(geom
        .lines()
        .iter()
        .enumerate()
        .filter(|(_, l)| violates(&l.points, l.sign, a))
        .map(|(i, _)| i)
        .collect())
}

/// Lines whose product of assigned values differs from the line sign.
pub fn unsatisfied_count(geom: &IncidenceGeometry, a: &Assignment) -> Result<usize> {
    unsatisfied_lines(geom, a).map(|v| v.len())
}

/// Line-indexed bit masks.
pub(crate) struct LineMasks {
    /// Per point, the lines through it.
    pub incident: Vec<Vec<u64>>,
    /// The negative lines.
    pub negative: Vec<u64>,
}

impl LineMasks {
    pub fn new(geom: &IncidenceGeometry) -> Self {
        let words = geom.num_lines().div_ceil(64);
        let mut incident = vec![vec![0u64; words]; geom.num_points()];
        let mut negative = vec![0u64; words];
        for (id, l) in geom.lines().iter().enumerate() {
            for &p in &l.points {
                incident[p][id / 64] |= 1 << (id % 64);
            }
            if l.sign == Sign::Minus {
                negative[id / 64] |= 1 << (id % 64);
            }
        }
        Self { incident, negative }
    }
}

fn check_width(geom: &IncidenceGeometry) -> Result<()> {
    if geom.num_lines() > 64 * MAX_WORDS {
        return Err(Error::Config(format!(
            "exact solvers handle at most {} lines, {} has {}",
            64 * MAX_WORDS,
            geom.name(),
            geom.num_lines()
        )));
    }
    Ok(())
}

/// Exact degree by Gray-code enumeration of all `2^|P|` assignments.
pub fn exhaustive_degree(geom: &IncidenceGeometry, config: &SolverConfig) -> Result<DegreeResult> {
    let n = geom.num_points();
    if n > config.effective_cap() {
        return Err(Error::Config(format!(
            "{} has {n} points, above the exhaustive cap of {}; use the rank-reduced or \
             heuristic method, or pass --long-running",
            geom.name(),
            config.effective_cap()
        )));
    }
    check_width(geom)?;
    let masks = LineMasks::new(geom);
    let (_, subset) = min_weight_coset(&masks.incident, &masks.negative);
    Ok(DegreeResult::from_witness(
        geom,
        Assignment::from_code(n, subset),
        true,
        Method::Exhaustive,
    ))
}

/// Exact degree by enumerating the image of the incidence matrix through a
/// basis of its column space: `2^rank(A)` candidates instead of `2^|P|`.
pub fn rank_reduced_degree(geom: &IncidenceGeometry, config: &SolverConfig) -> Result<DegreeResult> {
    check_width(geom)?;
    let masks = LineMasks::new(geom);
    let n = geom.num_points();

    // Column reduction keeping, for each basis vector, the set of points
    // whose columns sum to it.
    let mut basis: Vec<(Vec<u64>, Assignment)> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for (p, col) in masks.incident.iter().enumerate() {
        let mut v = col.clone();
        let mut combo = Assignment::new(n);
        combo.set(p, true);
        for ((b, bc), &piv) in basis.iter().zip(&pivots) {
            if v[piv / 64] >> (piv % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
                combo.xor_with(bc);
            }
        }
        if let Some(piv) = first_set_bit(&v) {
            basis.push((v, combo));
            pivots.push(piv);
        }
    }
    let rank = basis.len();
    if rank > config.effective_cap() {
        return Err(Error::Config(format!(
            "incidence rank {rank} of {} exceeds the cap of {}",
            geom.name(),
            config.effective_cap()
        )));
    }
    let gens: Vec<Vec<u64>> = basis.iter().map(|(v, _)| v.clone()).collect();
    let (_, subset) = min_weight_coset(&gens, &masks.negative);
    let mut witness = Assignment::new(n);
    for (i, (_, combo)) in basis.iter().enumerate() {
        if subset >> i & 1 == 1 {
            witness.xor_with(combo);
        }
    }
    Ok(DegreeResult::from_witness(geom, witness, true, Method::RankReduced))
}

/// GF(2) rank of the line-point incidence matrix.
pub fn incidence_rank(geom: &IncidenceGeometry) -> usize {
    let masks = LineMasks::new(geom);
    let mut basis: Vec<(Vec<u64>, usize)> = Vec::new();
    for col in masks.incident {
        let mut v = col;
        for (b, piv) in &basis {
            if v[piv / 64] >> (piv % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
        }
        if let Some(piv) = first_set_bit(&v) {
            basis.push((v, piv));
        }
    }
    basis.len()
}

fn first_set_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| 64 * i + w.trailing_zeros() as usize)
}

pub fn compute_degree(geom: &IncidenceGeometry, config: &SolverConfig) -> Result<DegreeResult> {
    match config.method {
        Method::Exhaustive => exhaustive_degree(geom, config),
        Method::RankReduced => rank_reduced_degree(geom, config),
        Method::Heuristic => heuristic_degree(geom, config),
    }
}
