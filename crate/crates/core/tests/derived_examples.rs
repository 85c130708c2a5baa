//! Values that follow from counting or from direct amplitude arithmetic,
//! checked against independent computations done here from operator strings.

mod oracle;

use std::collections::BTreeSet;

use num_complex::Complex;
use num_rational::Ratio;

use contextuality::degree::{
    exhaustive_degree, unsatisfied_count, verify_hexagon_shape, Assignment, SolverConfig,
};
use contextuality::games::{
    classical_from_assignment, enumerate_questions, play_classical, GameKind, PlayMode,
};
use contextuality::geometry::{
    build_doily, build_mermin_square, build_quadric, build_symplectic_space, enumerate_quadrics,
    IncidenceGeometry, QuadricKind, QuadricSpec,
};
use contextuality::pauli::{PauliOperator, Sign};
use contextuality::quantum::{bell_resource, ghz_resource, mirror_op};
use contextuality::StateVector;

fn nontrivial(n: usize) -> Vec<String> {
    oracle::all_strings(n).into_iter().filter(|s| s.contains(|c| c != 'I')).collect()
}

/// Lines among `points` found by brute force over triples.
fn oracle_lines(points: &[String]) -> Vec<([usize; 3], i8)> {
    let mats: Vec<_> = points.iter().map(|s| oracle::pauli(s)).collect();
    let k = points.len();
    let mut comm = vec![false; k * k];
    for i in 0..k {
        for j in 0..k {
            comm[i * k + j] = oracle::commute(&mats[i], &mats[j]);
        }
    }
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if !comm[a * k + b] {
                continue;
            }
            for c in b + 1..k {
                if comm[a * k + c] && comm[b * k + c] {
                    if let Some(s) = oracle::triple_sign(&points[a], &points[b], &points[c]) {
                        out.push(([a, b, c], s));
                    }
                }
            }
        }
    }
    out
}

fn quadric_member(center: &str, q: &str) -> bool {
    let commute = oracle::commute(&oracle::pauli(center), &oracle::pauli(q));
    let symmetric = oracle::y_count(q) % 2 == 0;
    commute == symmetric
}

fn library_lines(g: &IncidenceGeometry) -> BTreeSet<(BTreeSet<String>, i8)> {
    g.lines()
        .iter()
        .map(|l| (l.points.iter().map(|&p| g.point(p).to_string()).collect(), l.sign.value()))
        .collect()
}

fn oracle_line_set(points: &[String]) -> BTreeSet<(BTreeSet<String>, i8)> {
    oracle_lines(points)
        .into_iter()
        .map(|(t, s)| (t.iter().map(|&i| points[i].clone()).collect(), s))
        .collect()
}

#[test]
fn doily_lines_match_brute_force() {
    let points = nontrivial(2);
    let want = oracle_line_set(&points);
    assert_eq!(want.len(), 15);
    assert_eq!(library_lines(&build_doily()), want);
}

#[test]
fn all_plus_assignment_violates_exactly_the_negative_doily_lines() {
    let d = build_doily();
    let negative = oracle_lines(&nontrivial(2)).iter().filter(|(_, s)| *s < 0).count();
    let all_plus = Assignment::new(d.num_points());
    assert_eq!(unsatisfied_count(&d, &all_plus).unwrap(), negative);
}

#[test]
fn quadric_sizes_by_enumeration() {
    let w = build_symplectic_space(3).unwrap();
    let points = nontrivial(3);
    for (center, kind, np, nl) in [("YYY", QuadricKind::Elliptic, 27, 45), ("IXI", QuadricKind::Hyperbolic, 35, 105)] {
        let members: Vec<String> = points.iter().filter(|q| quadric_member(center, q)).cloned().collect();
        assert_eq!(members.len(), np, "{center}");
        let want = oracle_line_set(&members);
        assert_eq!(want.len(), nl, "{center}");
        let spec = QuadricSpec::new(center.parse().unwrap());
        assert_eq!(spec.kind, kind);
        let q = build_quadric(&spec, &w).unwrap();
        assert_eq!(library_lines(&q), want, "{center}");
    }
}

#[test]
fn quadric_counts_follow_from_symmetry_classes() {
    let all = oracle::all_strings(3);
    let symmetric = all.iter().filter(|s| oracle::y_count(s) % 2 == 0).count();
    let skew = all.len() - symmetric;
    // identity included among the symmetric centers
    assert_eq!((symmetric, skew), (36, 28));
    let w = build_symplectic_space(3).unwrap();
    let qs = enumerate_quadrics(&w).unwrap();
    let h = qs.iter().filter(|(s, _)| s.kind == QuadricKind::Hyperbolic).count();
    let e = qs.iter().filter(|(s, _)| s.kind == QuadricKind::Elliptic).count();
    assert_eq!((h, e), (symmetric, skew));
}

#[test]
fn w52_regularity() {
    let w = build_symplectic_space(3).unwrap();
    let mats: Vec<_> = w.points().iter().map(|p| oracle::pauli(&p.to_string())).collect();
    for i in 0..w.num_points() {
        let commuting = (0..w.num_points()).filter(|&j| j != i && oracle::commute(&mats[i], &mats[j])).count();
        assert_eq!(commuting, 30);
        assert_eq!(w.lines_through(i).len(), 15);
        let collinear: BTreeSet<usize> = w
            .lines_through(i)
            .iter()
            .flat_map(|&l| w.line(l).points)
            .filter(|&p| p != i)
            .collect();
        assert_eq!(collinear.len(), commuting);
    }
}

#[test]
fn hexagon_check_flags_wrong_line_sets() {
    let w = build_symplectic_space(3).unwrap();
    let r = verify_hexagon_shape(&w, &(0..64).collect::<Vec<_>>());
    assert!(!r.count_ok && !r.passed());
    // all 15 lines through one point: right shape nowhere
    let r = verify_hexagon_shape(&w, w.lines_through(0));
    assert!(!r.covers_all_points && !r.three_regular);
}

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

#[test]
fn bell_pair_correlations() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = vec![c(h), c(0.0), c(0.0), c(h)];
    let bell: StateVector = bell_resource(1).unwrap();
    for (i, a) in bell.amplitudes().iter().enumerate() {
        assert!((a - phi[i]).norm() < 1e-12);
    }
    for (s, want) in [("XX", 1.0), ("YY", -1.0), ("ZZ", 1.0)] {
        let oracle_value = oracle::expectation(&oracle::pauli(s), &phi);
        assert!((oracle_value - c(want)).norm() < 1e-12, "{s}");
        let got = bell.expectation(&s.parse().unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12, "{s}");
    }
}

#[test]
fn mirrored_observables_correlate_perfectly() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = vec![c(h), c(0.0), c(0.0), c(h)];
    for (letter, sign) in [("X", Sign::Plus), ("Y", Sign::Minus), ("Z", Sign::Plus)] {
        let p: PauliOperator = letter.parse().unwrap();
        let (m, s) = mirror_op(&p);
        assert_eq!((m, s), (p, sign), "{letter}");
        // ⟨P ⊗ s·P⟩ = 1 means the A outcome equals the sign-corrected B outcome
        let joint = oracle::pauli(&format!("{letter}{letter}"));
        let v = oracle::expectation(&joint, &phi) * c(s.value() as f64);
        assert!((v - c(1.0)).norm() < 1e-12, "{letter}");
    }
}

#[test]
fn two_pair_resource_amplitudes() {
    // pairs (0,2) and (1,3): |b0 b1 b2 b3⟩ with b0 = b2, b1 = b3, each 1/2
    let mut want = vec![c(0.0); 16];
    for b0 in 0..2usize {
        for b1 in 0..2usize {
            want[(b0 << 3) | (b1 << 2) | (b0 << 1) | b1] = c(0.5);
        }
    }
    let got: StateVector = ghz_resource(2, 2).unwrap();
    for (i, a) in got.amplitudes().iter().enumerate() {
        assert!((a - want[i]).norm() < 1e-12, "amplitude {i}");
    }
    let xx = oracle::expectation(&oracle::pauli("XIXI"), &want);
    assert!((xx - c(1.0)).norm() < 1e-12);
    assert!((got.expectation(&"XIXI".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
}

fn shares_point(g: &IncidenceGeometry, a: usize, b: usize) -> bool {
    g.line(a).points.iter().any(|p| g.line(b).points.contains(p))
}

#[test]
fn question_counts() {
    let sq = build_mermin_square();
    let d = build_doily();
    let incidences = |g: &IncidenceGeometry| g.lines().len() * 3;
    let pairs = |g: &IncidenceGeometry| {
        (0..g.num_lines())
            .flat_map(|a| (a + 1..g.num_lines()).map(move |b| (a, b)))
            .filter(|&(a, b)| shares_point(g, a, b))
            .count()
    };
    assert_eq!(incidences(&sq), 18);
    assert_eq!(pairs(&sq), 9);
    assert_eq!(pairs(&d), 45);
    assert_eq!(enumerate_questions(&sq, GameKind::Pl).unwrap().len(), 18);
    assert_eq!(enumerate_questions(&sq, GameKind::Ll).unwrap().len(), 9);
    assert_eq!(enumerate_questions(&d, GameKind::Ll).unwrap().len(), 45);
}

/// Line-line win rate of a point assignment where each violated line flips
/// one of its points; every question is dealt both ways.
fn oracle_ll_rate(g: &IncidenceGeometry, values: &[i8]) -> Ratio<u64> {
    let answer = |l: usize, p: usize| {
        let line = g.line(l);
        let prod: i8 = line.points.iter().map(|&q| values[q]).product();
        let flipped = line.points[2];
        if prod != line.sign.value() && p == flipped {
            -values[p]
        } else {
            values[p]
        }
    };
    let (mut wins, mut total) = (0u64, 0u64);
    for a in 0..g.num_lines() {
        for b in 0..g.num_lines() {
            if a == b || !shares_point(g, a, b) {
                continue;
            }
            let p = *g.line(a).points.iter().find(|p| g.line(b).points.contains(p)).unwrap();
            total += 1;
            wins += (answer(a, p) == answer(b, p)) as u64;
        }
    }
    Ratio::new(wins, total)
}

#[test]
fn all_plus_square_table_scores_eight_ninths() {
    let sq = build_mermin_square();
    let a = Assignment::new(9);
    let table = classical_from_assignment(&sq, &a).unwrap();
    table.validate(&sq).unwrap();
    let (r, _) = play_classical(&sq, GameKind::Ll, &[table], PlayMode::Exhaustive).unwrap();
    assert_eq!(r.rate, Ratio::new(8, 9));
    assert_eq!(oracle_ll_rate(&sq, &[1; 9]), Ratio::new(8, 9));
}

#[test]
fn doily_witness_table_clears_the_sanity_bound() {
    let d = build_doily();
    let w = exhaustive_degree(&d, &SolverConfig::default()).unwrap();
    assert_eq!(w.degree, 3);
    let table = classical_from_assignment(&d, &w.witness).unwrap();
    let (r, _) = play_classical(&d, GameKind::Ll, &[table], PlayMode::Exhaustive).unwrap();
    let floor = Ratio::new(45 - 2 * 3, 45);
    assert!(r.rate >= floor, "{}", r.rate);
    let values: Vec<i8> = (0..15).map(|i| w.witness.value(i).value()).collect();
    assert_eq!(oracle_ll_rate(&d, &values), r.rate);
}
