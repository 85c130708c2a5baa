use std::path::Path;

use contextuality::geometry::{
    build_doily, build_mermin_square, build_quadric, build_symplectic_space, IncidenceGeometry,
    QuadricKind, QuadricSpec,
};
use contextuality::pauli::PauliOperator;
use contextuality::{Error, Result};

/// Resolves `square | doily | w52 | w:N | elliptic:<center> |
/// hyperbolic:<center>` or a path to a geometry dump.
pub fn resolve(selector: &str) -> Result<IncidenceGeometry> {
    match selector {
        "square" => return Ok(build_mermin_square()),
        "doily" => return Ok(build_doily()),
        "w52" => return build_symplectic_space(3),
        _ => {}
    }
    if let Some(n) = selector.strip_prefix("w:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Config(format!("w:N needs a qubit count, got {n:?}")))?;
        return build_symplectic_space(n);
    }
    for (prefix, kind) in [("elliptic:", QuadricKind::Elliptic), ("hyperbolic:", QuadricKind::Hyperbolic)] {
        if let Some(center) = selector.strip_prefix(prefix) {
            let center: PauliOperator = center.parse()?;
            let spec = QuadricSpec::new(center);
            if spec.kind != kind {
                return Err(Error::Config(format!(
                    "{center} has {} Y letters, so it centers a {:?} quadric, not a {kind:?} one",
                    center.y_count(),
                    spec.kind
                )));
            }
            let ambient = build_symplectic_space(center.n_qubits())?;
            return build_quadric(&spec, &ambient);
        }
    }
    if Path::new(selector).is_file() {
        return IncidenceGeometry::load(selector);
    }
    Err(Error::Config(format!(
        "unknown geometry {selector:?}: expected square, doily, w52, w:N, elliptic:<center>, hyperbolic:<center> or a dump file"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(resolve("square").unwrap().num_lines(), 6);
        assert_eq!(resolve("w:2").unwrap().num_points(), 15);
        let e = resolve("elliptic:YYY").unwrap();
        assert_eq!((e.num_points(), e.num_lines()), (27, 45));
        assert_eq!(resolve("hyperbolic:III").unwrap().num_points(), 35);
    }

    #[test]
    fn rejects_wrong_symmetry_class() {
        assert!(matches!(resolve("elliptic:XXX"), Err(Error::Config(_))));
        assert!(matches!(resolve("hyperbolic:YII"), Err(Error::Config(_))));
        assert!(resolve("elliptic:QQ").is_err());
        assert!(matches!(resolve("nowhere.json"), Err(Error::Config(_))));
    }
}
