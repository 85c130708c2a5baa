//! Point-line geometries labelled by Pauli operators.
//!
//! Points are stored sorted by [`PointId`]; a line refers to its points by
//! index into that order and line ids are positions in the sorted line list.
//! Both orders are canonical, so two geometries built from the same operator
//! sets are identical values.

mod embed;
mod quadric;
mod symplectic;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::{line_sign, PauliOperator, Sign};

pub use embed::{enumerate_subgeometries, Embedding, ModelKind};
pub use quadric::{build_quadric, enumerate_quadrics, QuadricKind, QuadricSpec};
pub use symplectic::{build_doily, build_mermin_square, build_symplectic_space, MAX_SPACE_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineRecord {
    /// Point indices, ascending.
    pub points: [usize; 3],
    pub sign: Sign,
}

impl LineRecord {
    pub fn contains(&self, point: usize) -> bool {
        self.points.contains(&point)
    }

    /// Position of `point` within the sorted triple.
    pub fn position(&self, point: usize) -> Option<usize> {
        self.points.iter().position(|&p| p == point)
    }
}

#[derive(Clone, Debug)]
pub struct IncidenceGeometry {
    name: String,
    n_qubits: usize,
    points: Vec<PauliOperator>,
    lines: Vec<LineRecord>,
    index: HashMap<PauliOperator, usize>,
    through: Vec<Vec<usize>>,
}

impl PartialEq for IncidenceGeometry {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.n_qubits == other.n_qubits
            && self.points == other.points
            && self.lines == other.lines
    }
}

impl IncidenceGeometry {
    /// Builds a geometry from operator-labelled points and lines. Every line
    /// must be a commuting triple closing to the identity with all three points
    /// in the point set; its sign is computed here.
    pub fn from_operators(
        name: impl Into<String>,
        n_qubits: usize,
        points: impl IntoIterator<Item = PauliOperator>,
        lines: impl IntoIterator<Item = [PauliOperator; 3]>,
    ) -> Result<Self> {
        let mut pts: Vec<PauliOperator> = points.into_iter().collect();
        for p in &pts {
            if p.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    actual: p.n_qubits(),
                });
            }
            if p.is_identity() {
                return Err(Error::Config("the identity is not a point".into()));
            }
        }
        pts.sort_by_key(PauliOperator::point_id);
        let before = pts.len();
        pts.dedup();
        if pts.len() != before {
            return Err(Error::Config("duplicate points".into()));
        }
        let index: HashMap<_, _> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();

        let mut recs = Vec::new();
        for triple in lines {
            let mut idx = [0usize; 3];
            for (slot, op) in idx.iter_mut().zip(&triple) {
                *slot = *index
                    .get(op)
                    .ok_or_else(|| Error::Config(format!("line point {op} not in point set")))?;
            }
            idx.sort_unstable();
            let sign = line_sign(&pts[idx[0]], &pts[idx[1]], &pts[idx[2]])?;
            recs.push(LineRecord { points: idx, sign });
        }
        recs.sort();
        let before = recs.len();
        recs.dedup_by_key(|l| l.points);
        if recs.len() != before {
            return Err(Error::Config("duplicate lines".into()));
        }
        Ok(Self::assemble(name.into(), n_qubits, pts, recs, index))
    }

    fn assemble(
        name: String,
        n_qubits: usize,
        points: Vec<PauliOperator>,
        lines: Vec<LineRecord>,
        index: HashMap<PauliOperator, usize>,
    ) -> Self {
        let mut through = vec![Vec::new(); points.len()];
        for (id, line) in lines.iter().enumerate() {
            for &p in &line.points {
                through[p].push(id);
            }
        }
        Self {
            name,
            n_qubits,
            points,
            lines,
            index,
            through,
        }
    }

    /// The subgeometry on `point_indices` (indices into `self`) together with
    /// every line of `self` lying wholly inside it.
    pub fn induced(&self, name: impl Into<String>, point_indices: &[usize]) -> Self {
        let mut keep: Vec<usize> = point_indices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut remap = vec![usize::MAX; self.points.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let points: Vec<_> = keep.iter().map(|&i| self.points[i]).collect();
        let lines: Vec<_> = self
            .lines
            .iter()
            .filter(|l| l.points.iter().all(|&p| remap[p] != usize::MAX))
            .map(|l| LineRecord {
                points: l.points.map(|p| remap[p]),
                sign: l.sign,
            })
            .collect();
        let index = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Self::assemble(name.into(), self.n_qubits, points, lines, index)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn points(&self) -> &[PauliOperator] {
        &self.points
    }

    pub fn point(&self, i: usize) -> PauliOperator {
        self.points[i]
    }

    pub fn lines(&self) -> &[LineRecord] {
        &self.lines
    }

    pub fn line(&self, id: usize) -> &LineRecord {
        &self.lines[id]
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn negative_lines(&self) -> usize {
        self.lines.iter().filter(|l| l.sign == Sign::Minus).count()
    }

    pub fn index_of(&self, op: &PauliOperator) -> Option<usize> {
        self.index.get(op).copied()
    }

    /// Ids of the lines through point `i`, ascending.
    pub fn lines_through(&self, i: usize) -> &[usize] {
        &self.through[i]
    }

    pub fn line_operators(&self, id: usize) -> [PauliOperator; 3] {
        self.lines[id].points.map(|p| self.points[p])
    }

    /// Id of the line containing both points, if any.
    pub fn line_joining(&self, a: usize, b: usize) -> Option<usize> {
        self.through[a]
            .iter()
            .copied()
            .find(|&l| self.lines[l].contains(b))
    }

    /// Common point of two distinct lines, if they meet.
    pub fn intersection(&self, l1: usize, l2: usize) -> Option<usize> {
        if l1 == l2 {
            return None;
        }
        let b = &self.lines[l2];
        self.lines[l1].points.iter().copied().find(|&p| b.contains(p))
    }

    pub fn point_set(&self) -> BTreeSet<PauliOperator> {
        self.points.iter().copied().collect()
    }

    pub fn to_dump(&self) -> GeometryDump {
        GeometryDump {
            name: self.name.clone(),
            n_qubits: self.n_qubits,
            points: self.points.clone(),
            lines: self.lines.clone(),
        }
    }

    pub fn from_dump(dump: GeometryDump) -> Result<Self> {
        let triples = dump
            .lines
            .iter()
            .map(|l| {
                let mut ops = [dump.points[0]; 3];
                for (op, &i) in ops.iter_mut().zip(&l.points) {
                    *op = *dump.points.get(i).ok_or_else(|| {
                        Error::Config(format!("line references missing point {i}"))
                    })?;
                }
                Ok(ops)
            })
            .collect::<Result<Vec<_>>>()?;
        let geom = Self::from_operators(dump.name, dump.n_qubits, dump.points.clone(), triples)?;
        // Stored signs must agree with the operator algebra.
        for l in &dump.lines {
            let ops = l.points.map(|i| dump.points[i]);
            let sign = line_sign(&ops[0], &ops[1], &ops[2])?;
            if sign != l.sign {
                return Err(Error::Consistency(format!(
                    "stored sign of line {}·{}·{} disagrees with its product",
                    ops[0], ops[1], ops[2]
                )));
            }
        }
        Ok(geom)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_dump()).expect("geometry dump serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_dump(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical JSON dump, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Serialized form: `{name, n_qubits, points: [operator strings], lines: [{points: [indices], sign}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryDump {
    pub name: String,
    pub n_qubits: usize,
    pub points: Vec<PauliOperator>,
    pub lines: Vec<LineRecord>,
}
