//! N-qubit Pauli operators in the binary symplectic representation.
//!
//! An operator is a pair of bit vectors `(x | z)` over GF(2); the letter on a
//! qubit is `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`, `Y = (1,1)`. Qubit 0 is the
//! leftmost letter of the string form and occupies the most significant bit of
//! each vector, so that reading the `x` (or `z`) bits of a string left to right
//! gives the integer value directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register supported; point ids must fit in 64 bits.
pub const MAX_QUBITS: usize = 16;

/// Canonical integer label of a non-phased operator: the value of the
/// concatenated bit string `x ∥ z`.
pub type PointId = u64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    n_qubits: u8,
    x: u64,
    z: u64,
}

impl PauliOperator {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        Self {
            n_qubits: n_qubits as u8,
            x: 0,
            z: 0,
        }
    }

    /// Builds an operator from raw bit vectors. Bit `n - 1 - i` of each vector
    /// belongs to qubit `i`.
    pub fn from_bits(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mask = Self::mask(n_qubits);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Config(format!(
                "bit vectors exceed {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits: n_qubits as u8,
            x,
            z,
        })
    }

    /// Inverse of [`PauliOperator::point_id`].
    pub fn from_point_id(n_qubits: usize, id: PointId) -> Result<Self> {
        let mask = Self::mask(n_qubits);
        Self::from_bits(n_qubits, (id >> n_qubits) & mask, id & mask).and_then(|op| {
            if op.point_id() == id {
                Ok(op)
            } else {
                Err(Error::Config(format!(
                    "point id {id} out of range for {n_qubits} qubits"
                )))
            }
        })
    }

    fn mask(n_qubits: usize) -> u64 {
        if n_qubits >= 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn point_id(&self) -> PointId {
        (self.x << self.n_qubits) | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits carrying a `Y`.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Letter acting on `qubit` (0 = leftmost).
    pub fn letter(&self, qubit: usize) -> char {
        let shift = self.n_qubits as usize - 1 - qubit;
        match ((self.x >> shift) & 1, (self.z >> shift) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    /// The same operator placed on qubits `offset..offset + n` of a register
    /// of `total` qubits, identity elsewhere.
    pub fn embed(&self, total: usize, offset: usize) -> Result<Self> {
        let n = self.n_qubits();
        if offset + n > total {
            return Err(Error::Dimension {
                expected: total,
                actual: offset + n,
            });
        }
        let shift = total - offset - n;
        Self::from_bits(total, self.x << shift, self.z << shift)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                actual: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// Product of the binary vectors, ignoring phase.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        })
    }
}

/// `⟨u, v⟩ = Σ (u.x_i v.z_i + u.z_i v.x_i) mod 2`; zero iff `u` and `v` commute.
pub fn symplectic_form(u: &PauliOperator, v: &PauliOperator) -> Result<u8> {
    u.check_dims(v)?;
    Ok(symplectic_bits(u.x, u.z, v.x, v.z))
}

#[inline]
pub(crate) fn symplectic_bits(ux: u64, uz: u64, vx: u64, vz: u64) -> u8 {
    (((ux & vz).count_ones() + (uz & vx).count_ones()) & 1) as u8
}

pub fn commutes(u: &PauliOperator, v: &PauliOperator) -> Result<bool> {
    symplectic_form(u, v).map(|b| b == 0)
}

/// Even number of `Y` letters. The identity is symmetric.
pub fn is_symmetric(p: &PauliOperator) -> bool {
    p.y_count() % 2 == 0
}

/// A Pauli operator with a phase `i^phase_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub op: PauliOperator,
    pub phase_exp: u8,
}

impl PhasedPauli {
    pub fn new(op: PauliOperator, phase_exp: u8) -> Self {
        Self {
            op,
            phase_exp: phase_exp & 3,
        }
    }

    pub fn mul(&self, rhs: &PhasedPauli) -> Result<PhasedPauli> {
        let prod = multiply(&self.op, &rhs.op)?;
        Ok(PhasedPauli::new(
            prod.op,
            self.phase_exp + rhs.phase_exp + prod.phase_exp,
        ))
    }
}

impl From<PauliOperator> for PhasedPauli {
    fn from(op: PauliOperator) -> Self {
        PhasedPauli { op, phase_exp: 0 }
    }
}

/// Phase-tracked product `u · v`.
///
/// Writing each letter as `i^{xz} X^x Z^z` (so `Y = iXZ`), the product picks up
/// `i^{x1 z1 + x2 z2 - x3 z3} (-1)^{z1 x2}` on every qubit, which reproduces
/// `XZ = -iY`, `ZX = iY`, `XY = iZ`, `YX = -iZ`, `YZ = iX`, `ZY = -iX`.
pub fn multiply(u: &PauliOperator, v: &PauliOperator) -> Result<PhasedPauli> {
    u.check_dims(v)?;
    let x = u.x ^ v.x;
    let z = u.z ^ v.z;
    let phase = (u.x & u.z).count_ones() + (v.x & v.z).count_ones() + 2 * (u.z & v.x).count_ones()
        + 3 * (x & z).count_ones();
    Ok(PhasedPauli {
        op: PauliOperator {
            n_qubits: u.n_qubits,
            x,
            z,
        },
        phase_exp: (phase & 3) as u8,
    })
}

/// Sign of a context constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `true` for `-1`, matching the bit convention of assignments.
    pub fn bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_bit(!self.bit())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("invalid sign {v}")))
    }
}

/// The scalar `s` with `a · b · c = s · I` for a commuting triple that closes
/// to the identity.
pub fn line_sign(a: &PauliOperator, b: &PauliOperator, c: &PauliOperator) -> Result<Sign> {
    let ops = [a, b, c];
    for (i, u) in ops.iter().enumerate() {
        for v in &ops[i + 1..] {
            if !commutes(u, v)? {
                return Err(Error::NotALine(format!("{u} and {v} anticommute")));
            }
        }
    }
    let ab = multiply(a, b)?;
    let abc = PhasedPauli::from(ab.op).mul(&(*c).into())?;
    if !abc.op.is_identity() {
        return Err(Error::NotALine(format!("{a}·{b}·{c} is not proportional to identity")));
    }
    match (ab.phase_exp + abc.phase_exp) & 3 {
        0 => Ok(Sign::Plus),
        2 => Ok(Sign::Minus),
        odd => Err(Error::Internal(format!(
            "odd phase i^{odd} for commuting triple {a}, {b}, {c}"
        ))),
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(s.to_owned()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for c in s.chars() {
            let (bx, bz) = match c {
                'I' => (0, 0),
                'X' => (1, 0),
                'Z' => (0, 1),
                'Y' => (1, 1),
                _ => return Err(Error::Parse(s.to_owned())),
            };
            x = (x << 1) | bx;
            z = (z << 1) | bz;
        }
        Self::from_bits(n, x, z)
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
