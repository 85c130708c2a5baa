use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::{symplectic_bits, PauliOperator};

pub const MAX_SPACE_QUBITS: usize = 4;

/// W(2N−1, 2): every nontrivial N-qubit operator, with a line through each
/// pair of commuting points closed by their product.
pub fn build_symplectic_space(n_qubits: usize) -> Result<IncidenceGeometry> {
    if !(1..=MAX_SPACE_QUBITS).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "symplectic space needs 1..={MAX_SPACE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let count = 1u64 << (2 * n_qubits);
    let mask = (1u64 << n_qubits) - 1;
    let split = |id: u64| (id >> n_qubits, id & mask);
    let points: Vec<_> = (1..count)
        .map(|id| PauliOperator::from_point_id(n_qubits, id))
        .collect::<Result<_>>()?;

    let mut lines = Vec::new();
    for a in 1..count {
        let (ax, az) = split(a);
        for b in a + 1..count {
            let (bx, bz) = split(b);
            let c = a ^ b;
            if c > b && symplectic_bits(ax, az, bx, bz) == 0 {
                lines.push([a, b, c].map(|id| points[id as usize - 1]));
            }
        }
    }
    let name = format!("W({},2)", 2 * n_qubits - 1);
    IncidenceGeometry::from_operators(name, n_qubits, points.iter().copied(), lines)
}

/// W(3,2) labelled by all nontrivial 2-qubit operators.
pub fn build_doily() -> IncidenceGeometry {
    build_symplectic_space(2)
        .expect("2-qubit space is in range")
        .with_name("doily")
}

/// The Peres–Mermin square, i.e. the hyperbolic quadric `H_IX` of the doily:
///
/// ```text
/// XI  IX  XX
/// IY  ZI  ZY
/// XY  ZX  YZ
/// ```
///
/// Rows and columns are the six contexts; the bottom row is the negative one.
pub fn build_mermin_square() -> IncidenceGeometry {
    const GRID: [[&str; 3]; 3] = [["XI", "IX", "XX"], ["IY", "ZI", "ZY"], ["XY", "ZX", "YZ"]];
    let op = |s: &str| s.parse::<PauliOperator>().expect("valid label");
    let points = GRID.iter().flatten().map(|s| op(s));
    let rows = (0..3).map(|r| [0, 1, 2].map(|c| op(GRID[r][c])));
    let cols = (0..3).map(|c| [0, 1, 2].map(|r| op(GRID[r][c])));
    IncidenceGeometry::from_operators("square", 2, points, rows.chain(cols).collect::<Vec<_>>())
        .expect("the magic square is a valid geometry")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{multiply, Sign};

    #[test]
    fn space_sizes() {
        let w1 = build_symplectic_space(1).unwrap();
        assert_eq!((w1.num_points(), w1.num_lines()), (3, 0));
        let w3 = build_symplectic_space(2).unwrap();
        assert_eq!((w3.num_points(), w3.num_lines()), (15, 15));
        let w5 = build_symplectic_space(3).unwrap();
        assert_eq!((w5.num_points(), w5.num_lines(), w5.negative_lines()), (63, 315, 90));
        let w7 = build_symplectic_space(4).unwrap();
        assert_eq!(w7.num_points(), 255);
        // each point lies on 4^{N-1} - 1 lines
        assert_eq!(w7.num_lines(), 255 * 63 / 3);
        assert!(build_symplectic_space(0).is_err());
        assert!(build_symplectic_space(5).is_err());
    }

    #[test]
    fn w52_regular_and_closed() {
        let w = build_symplectic_space(3).unwrap();
        for i in 0..w.num_points() {
            assert_eq!(w.lines_through(i).len(), 15);
            let mut collinear: Vec<usize> = w
                .lines_through(i)
                .iter()
                .flat_map(|&l| w.line(l).points)
                .filter(|&p| p != i)
                .collect();
            collinear.sort_unstable();
            collinear.dedup();
            assert_eq!(collinear.len(), 30);
        }
        for id in 0..w.num_lines() {
            let [a, b, c] = w.line_operators(id);
            assert_eq!(multiply(&a, &b).unwrap().op, c);
        }
    }

    #[test]
    fn square_structure() {
        let sq = build_mermin_square();
        assert_eq!(sq.num_points(), 9);
        assert_eq!(sq.num_lines(), 6);
        assert_eq!(sq.negative_lines(), 1);
        for i in 0..9 {
            assert_eq!(sq.lines_through(i).len(), 2);
        }
        let op = |s: &str| sq.index_of(&s.parse().unwrap()).unwrap();
        let neg = sq.lines().iter().find(|l| l.sign == Sign::Minus).unwrap();
        let mut expect = [op("YZ"), op("ZX"), op("XY")];
        expect.sort_unstable();
        assert_eq!(neg.points, expect);
        let pos = sq.line_joining(op("XI"), op("IX")).unwrap();
        assert!(sq.line(pos).contains(op("XX")));
        assert_eq!(sq.line(pos).sign, Sign::Plus);
    }
}
