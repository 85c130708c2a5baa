use serde::{Deserialize, Serialize};

use crate::geometry::IncidenceGeometry;

/// Structural checks a split Cayley hexagon of order 2 passes: 63 lines
/// covering all 63 points, three through each. Passing does not establish
/// isomorphism with the hexagon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonReport {
    pub line_count: usize,
    pub count_ok: bool,
    pub covers_all_points: bool,
    pub three_regular: bool,
}

impl HexagonReport {
    pub fn passed(&self) -> bool {
        self.count_ok && self.covers_all_points && self.three_regular
    }
}

pub fn verify_hexagon_shape(geom: &IncidenceGeometry, unsatisfied: &[usize]) -> HexagonReport {
    let mut degree = vec![0usize; geom.num_points()];
    for &l in unsatisfied {
        for &p in &geom.line(l).points {
            degree[p] += 1;
        }
    }
    HexagonReport {
        line_count: unsatisfied.len(),
        count_ok: unsatisfied.len() == 63,
        covers_all_points: degree.iter().all(|&d| d > 0),
        three_regular: degree.iter().all(|&d| d == 3),
    }
}
