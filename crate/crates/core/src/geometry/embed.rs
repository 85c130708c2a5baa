//! Embedded copies of a small model geometry inside a larger one.
//!
//! A copy is an injective map of model points to ambient points sending
//! model lines onto ambient lines, where two model points are collinear
//! exactly when their images are. Copies are reported by image point set.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// 3×3 grid: 9 points, 6 lines, 2 lines per point.
    Square,
    /// GQ(2,2): 15 points, 15 lines, 3 lines per point.
    Doily,
}

impl ModelKind {
    pub fn detect(model: &IncidenceGeometry) -> Result<Self> {
        let per_point = |k: usize| (0..model.num_points()).all(|i| model.lines_through(i).len() == k);
        match (model.num_points(), model.num_lines()) {
            (9, 6) if per_point(2) => Ok(ModelKind::Square),
            (15, 15) if per_point(3) => Ok(ModelKind::Doily),
            (p, l) => Err(Error::Config(format!(
                "unsupported model {} ({p} points, {l} lines); expected a square or a doily",
                model.name()
            ))),
        }
    }
}

/// One embedded copy: ambient point indices and ambient line ids, ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
}

struct Search<'a> {
    ambient: &'a IncidenceGeometry,
    collinear: Vec<bool>,
    n_amb: usize,
    order: Vec<usize>,
    /// For each step, the earlier steps whose model points are collinear with this one.
    adjacent: Vec<Vec<usize>>,
    /// For each step, pairs of earlier steps completing a model line with this one.
    closing: Vec<Vec<(usize, usize)>>,
}

impl<'a> Search<'a> {
    fn new(ambient: &'a IncidenceGeometry, model: &IncidenceGeometry) -> Self {
        let n_amb = ambient.num_points();
        let mut collinear = vec![false; n_amb * n_amb];
        for l in ambient.lines() {
            for &a in &l.points {
                for &b in &l.points {
                    if a != b {
                        collinear[a * n_amb + b] = true;
                    }
                }
            }
        }

        // Greedy order: each next model point shares as many lines with the
        // placed ones as possible, so most placements are forced.
        let n_mod = model.num_points();
        let mcol = |a: usize, b: usize| a != b && model.line_joining(a, b).is_some();
        let mut order = vec![0usize];
        while order.len() < n_mod {
            let next = (0..n_mod)
                .filter(|v| !order.contains(v))
                .max_by_key(|&v| {
                    let closes = model
                        .lines_through(v)
                        .iter()
                        .filter(|&&l| {
                            model.line(l).points.iter().filter(|p| order.contains(p)).count() == 2
                        })
                        .count();
                    let adj = order.iter().filter(|&&u| mcol(u, v)).count();
                    (closes, adj, std::cmp::Reverse(v))
                })
                .expect("unplaced point exists");
            order.push(next);
        }
        let step_of = |v: usize| order.iter().position(|&u| u == v).unwrap();
        let adjacent = (0..n_mod)
            .map(|s| (0..s).filter(|&t| mcol(order[s], order[t])).collect())
            .collect();
        let closing = (0..n_mod)
            .map(|s| {
                model
                    .lines_through(order[s])
                    .iter()
                    .filter_map(|&l| {
                        let others: Vec<usize> = model
                            .line(l)
                            .points
                            .iter()
                            .filter(|&&p| p != order[s])
                            .map(|&p| step_of(p))
                            .collect();
                        (others[0] < s && others[1] < s).then(|| (others[0], others[1]))
                    })
                    .collect()
            })
            .collect();
        Self {
            ambient,
            collinear,
            n_amb,
            order,
            adjacent,
            closing,
        }
    }

    fn is_collinear(&self, a: usize, b: usize) -> bool {
        self.collinear[a * self.n_amb + b]
    }

    fn third(&self, a: usize, b: usize) -> Option<usize> {
        let line = self.ambient.line_joining(a, b)?;
        self.ambient.line(line).points.iter().copied().find(|&p| p != a && p != b)
    }

    fn accepts(&self, step: usize, cand: usize, image: &[usize]) -> bool {
        if image.contains(&cand) {
            return false;
        }
        let adj = &self.adjacent[step];
        for (t, &img) in image.iter().enumerate() {
            if self.is_collinear(img, cand) != adj.contains(&t) {
                return false;
            }
        }
        self.closing[step]
            .iter()
            .all(|&(a, b)| self.third(image[a], image[b]) == Some(cand))
    }

    fn extend(&self, image: &mut Vec<usize>, found: &mut BTreeSet<Vec<usize>>) {
        let step = image.len();
        if step == self.order.len() {
            let mut pts = image.clone();
            pts.sort_unstable();
            found.insert(pts);
            return;
        }
        if let Some(&(a, b)) = self.closing[step].first() {
            if let Some(c) = self.third(image[a], image[b]) {
                if self.accepts(step, c, image) {
                    image.push(c);
                    self.extend(image, found);
                    image.pop();
                }
            }
            return;
        }
        let candidates: Vec<usize> = match self.adjacent[step].first() {
            Some(&t) => {
                let anchor = image[t];
                self.ambient
                    .lines_through(anchor)
                    .iter()
                    .flat_map(|&l| self.ambient.line(l).points)
                    .filter(|&p| p != anchor)
                    .collect()
            }
            None => (0..self.n_amb).collect(),
        };
        for c in candidates {
            if self.accepts(step, c, image) {
                image.push(c);
                self.extend(image, found);
                image.pop();
            }
        }
    }
}

/// Every copy of `model` (a square or a doily) inside `ambient`, sorted by
/// point set.
pub fn enumerate_subgeometries(
    ambient: &IncidenceGeometry,
    model: &IncidenceGeometry,
) -> Result<Vec<Embedding>> {
    ModelKind::detect(model)?;
    let search = Search::new(ambient, model);
    let per_root: Vec<BTreeSet<Vec<usize>>> = (0..ambient.num_points())
        .into_par_iter()
        .map(|root| {
            let mut found = BTreeSet::new();
            let mut image = vec![root];
            search.extend(&mut image, &mut found);
            found
        })
        .collect();
    let sets: BTreeSet<Vec<usize>> = per_root.into_iter().flatten().collect();

    // Recover one structure per point set to report its lines. Within a copy,
    // ambient lines among its points are exactly the model's lines.
    Ok(sets
        .into_iter()
        .map(|points| {
            let sub = ambient.induced("copy", &points);
            let lines = sub
                .lines()
                .iter()
                .map(|l| {
                    ambient
                        .line_joining(points[l.points[0]], points[l.points[1]])
                        .expect("induced line is ambient")
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            Embedding { points, lines }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_doily, build_mermin_square, build_symplectic_space};

    #[test]
    fn doily_contains_itself_once() {
        let d = build_doily();
        let copies = enumerate_subgeometries(&d, &d).unwrap();
        assert_eq!(copies.len(), 1);
        assert_eq!(copies[0].points, (0..15).collect::<Vec<_>>());
        assert_eq!(copies[0].lines.len(), 15);
    }

    #[test]
    fn squares_in_doily() {
        let d = build_doily();
        let copies = enumerate_subgeometries(&d, &build_mermin_square()).unwrap();
        assert_eq!(copies.len(), 10);
        assert!(copies.iter().all(|c| c.lines.len() == 6));
    }

    #[test]
    fn unsupported_model() {
        let w = build_symplectic_space(3).unwrap();
        let err = enumerate_subgeometries(&w, &w).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn search_order_forces_closures() {
        let sq = build_mermin_square();
        let d = build_doily();
        let s = Search::new(&d, &sq);
        // The last point of a 3×3 grid closes two lines.
        assert_eq!(s.closing[8].len(), 2);
    }
}
