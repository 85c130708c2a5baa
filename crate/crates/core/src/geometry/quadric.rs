use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::{is_symmetric, symplectic_form, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricKind {
    Hyperbolic,
    Elliptic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadricSpec {
    pub center: PauliOperator,
    pub kind: QuadricKind,
}

impl QuadricSpec {
    /// Symmetric centers (the identity included) give hyperbolic quadrics,
    /// skew ones elliptic.
    pub fn new(center: PauliOperator) -> Self {
        let kind = if is_symmetric(&center) {
            QuadricKind::Hyperbolic
        } else {
            QuadricKind::Elliptic
        };
        Self { center, kind }
    }

    pub fn label(&self) -> String {
        let prefix = match self.kind {
            QuadricKind::Hyperbolic => 'H',
            QuadricKind::Elliptic => 'E',
        };
        format!("{prefix}_{}", self.center)
    }

    /// `q` belongs to the quadric when it commutes with the center and is
    /// symmetric, or anticommutes with it and is skew.
    pub fn contains(&self, q: &PauliOperator) -> Result<bool> {
        let anticommutes = symplectic_form(&self.center, q)? == 1;
        Ok(anticommutes != is_symmetric(q))
    }
}

fn check_ambient(ambient: &IncidenceGeometry) -> Result<()> {
    let n = ambient.n_qubits();
    if ambient.num_points() as u64 != (1u64 << (2 * n)) - 1 {
        return Err(Error::Config(format!(
            "{} is not a full symplectic polar space",
            ambient.name()
        )));
    }
    Ok(())
}

pub fn build_quadric(spec: &QuadricSpec, ambient: &IncidenceGeometry) -> Result<IncidenceGeometry> {
    if spec.center.n_qubits() != ambient.n_qubits() {
        return Err(Error::Dimension {
            expected: ambient.n_qubits(),
            actual: spec.center.n_qubits(),
        });
    }
    if QuadricSpec::new(spec.center).kind != spec.kind {
        return Err(Error::Config(format!(
            "center {} does not define a {:?} quadric",
            spec.center, spec.kind
        )));
    }
    check_ambient(ambient)?;
    let mut members = Vec::new();
    for (i, q) in ambient.points().iter().enumerate() {
        if spec.contains(q)? {
            members.push(i);
        }
    }
    Ok(ambient.induced(spec.label(), &members))
}

/// One quadric per center in `{I} ∪ points`, dropping any whose point set
/// repeats an earlier one.
pub fn enumerate_quadrics(
    ambient: &IncidenceGeometry,
) -> Result<Vec<(QuadricSpec, IncidenceGeometry)>> {
    check_ambient(ambient)?;
    let centers =
        std::iter::once(PauliOperator::identity(ambient.n_qubits())).chain(ambient.points().iter().copied());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for center in centers {
        let spec = QuadricSpec::new(center);
        let q = build_quadric(&spec, ambient)?;
        if seen.insert(q.point_set()) {
            out.push((spec, q));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mermin_square, build_symplectic_space};

    fn op(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn three_qubit_quadrics() {
        let w = build_symplectic_space(3).unwrap();
        let e = build_quadric(&QuadricSpec::new(op("YYY")), &w).unwrap();
        assert_eq!((e.name(), e.num_points(), e.num_lines()), ("E_YYY", 27, 45));
        let h = build_quadric(&QuadricSpec::new(op("IXI")), &w).unwrap();
        assert_eq!((h.num_points(), h.num_lines()), (35, 105));
        let h0 = build_quadric(&QuadricSpec::new(PauliOperator::identity(3)), &w).unwrap();
        assert_eq!((h0.num_points(), h0.num_lines()), (35, 105));
        for i in 0..e.num_points() {
            assert_eq!(e.lines_through(i).len(), 5);
        }
    }

    #[test]
    fn hyperplane_property() {
        let w = build_symplectic_space(3).unwrap();
        for (spec, _) in enumerate_quadrics(&w).unwrap() {
            for l in w.lines() {
                let hits = l
                    .points
                    .iter()
                    .filter(|&&p| spec.contains(&w.point(p)).unwrap())
                    .count();
                assert!(hits == 1 || hits == 3, "{} meets a line in {hits}", spec.label());
            }
        }
    }

    #[test]
    fn enumeration_counts_and_injectivity() {
        let w = build_symplectic_space(3).unwrap();
        let qs = enumerate_quadrics(&w).unwrap();
        // every center yields a distinct point set
        assert_eq!(qs.len(), 64);
        let ell = qs.iter().filter(|(s, _)| s.kind == QuadricKind::Elliptic).count();
        assert_eq!((ell, qs.len() - ell), (28, 36));

        let d = build_symplectic_space(2).unwrap();
        let qs = enumerate_quadrics(&d).unwrap();
        let hyp: Vec<_> = qs.iter().filter(|(s, _)| s.kind == QuadricKind::Hyperbolic).collect();
        assert_eq!(hyp.len(), 10);
        assert!(hyp.iter().all(|(_, g)| g.num_points() == 9 && g.num_lines() == 6));
        let ell: Vec<_> = qs.iter().filter(|(s, _)| s.kind == QuadricKind::Elliptic).collect();
        assert_eq!(ell.len(), 6);
        assert!(ell.iter().all(|(_, g)| g.num_points() == 5 && g.num_lines() == 0));
    }

    #[test]
    fn h_ix_is_the_magic_square() {
        let d = build_symplectic_space(2).unwrap();
        let h = build_quadric(&QuadricSpec::new(op("IX")), &d).unwrap();
        let sq = build_mermin_square();
        assert_eq!(h.point_set(), sq.point_set());
        assert_eq!(h.lines(), sq.lines());
    }

    #[test]
    fn rejects_bad_centers() {
        let w = build_symplectic_space(3).unwrap();
        assert!(matches!(
            build_quadric(&QuadricSpec::new(op("IX")), &w),
            Err(Error::Dimension { .. })
        ));
        let wrong = QuadricSpec {
            center: op("YYY"),
            kind: QuadricKind::Hyperbolic,
        };
        assert!(build_quadric(&wrong, &w).is_err());
    }
}
