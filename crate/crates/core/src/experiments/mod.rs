//! Rio Negro runs: estimate every context, form χ = Σ⟨C⟩ − Σ⟨C'⟩ and hold it
//! against the NCHV bound `L − 2d` and the quantum bound `L`.

mod render;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::{incidence_rank, rank_reduced_degree, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{
    build_doily, build_mermin_square, enumerate_quadrics, enumerate_subgeometries, Embedding,
    IncidenceGeometry, QuadricKind,
};
use crate::pauli::Sign;
use crate::quantum::{measure_line, NoiseParams, StateVec};
use crate::scalar::Real;

pub use render::{contexts_csv, histogram_csv, histogram_svg, members_csv};

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_BINS: usize = 24;

/// Width of the band, in standard errors, inside which χ may sit above `L`
/// before the run is declared impossible.
pub const QM_SIGMA_LIMIT: f64 = 5.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Zeros,
    /// Haar-random, drawn from the run seed.
    Random,
}

impl std::str::FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeros" => Ok(InitialState::Zeros),
            "random" => Ok(InitialState::Random),
            other => Err(Error::Config(format!("unknown initial state {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RioNegroConfig {
    /// Shots per context; contexts never share shots.
    pub shots: u64,
    pub noise: NoiseParams,
    pub state: InitialState,
    pub seed: u64,
}

impl Default for RioNegroConfig {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            noise: NoiseParams::noiseless(),
            state: InitialState::Zeros,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextEstimate {
    pub line: usize,
    pub shots: u64,
    /// Mean of the product of the three reported outcomes.
    pub mean_product: f64,
    /// Sample standard deviation over √shots.
    pub stderr: f64,
}

impl ContextEstimate {
    fn from_counts(line: usize, shots: u64, minus: u64) -> Self {
        let n = shots as f64;
        let mean = (shots as i64 - 2 * minus as i64) as f64 / n;
        let var = if shots > 1 {
            ((1.0 - mean * mean) * n / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            line,
            shots,
            mean_product: mean,
            stderr: (var / n).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSource {
    /// Computed in this run.
    Exact,
    /// Known value for the geometry, not recomputed.
    Reference,
    /// Given by the caller.
    Supplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownDegree {
    pub value: usize,
    pub source: DegreeSource,
}

/// Degree used for bounds: exact by rank reduction when the incidence rank is
/// small enough, otherwise the established value for W(5,2).
pub fn known_degree(geom: &IncidenceGeometry) -> Result<KnownDegree> {
    let config = SolverConfig::default();
    if incidence_rank(geom) <= config.point_cap {
        let r = rank_reduced_degree(geom, &config)?;
        return Ok(KnownDegree {
            value: r.degree,
            source: DegreeSource::Exact,
        });
    }
    if geom.n_qubits() == 3 && geom.num_points() == 63 && geom.num_lines() == 315 {
        return Ok(KnownDegree {
            value: 63,
            source: DegreeSource::Reference,
        });
    }
    Err(Error::Config(format!(
        "no exact or reference degree for {}; supply one",
        geom.name()
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ViolatesNchv,
    ConsistentWithNchv,
    /// Above `L` but within the tolerance band; points at a simulator bug.
    ExceedsQm,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ViolatesNchv => "violates NCHV",
            Verdict::ConsistentWithNchv => "consistent with NCHV",
            Verdict::ExceedsQm => "exceeds QM",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub verdict: Verdict,
    /// Distance from the relevant bound in standard errors; absent when the
    /// standard error is zero.
    pub sigma: Option<f64>,
}

fn slack(lines: usize) -> f64 {
    1e-9 * lines.max(1) as f64
}

/// Places `chi` against `L − 2d` and `L`.
pub fn bound_check(chi: f64, lines: usize, degree: usize, stderr: f64) -> Result<BoundCheck> {
    let l = lines as f64;
    let nchv = l - 2.0 * degree as f64;
    let tol = slack(lines);
    let sigma = |gap: f64| (stderr > 0.0).then(|| gap / stderr);
    let excess = chi - l;
    if excess > QM_SIGMA_LIMIT * stderr + tol {
        return Err(Error::Internal(format!(
            "χ = {chi} exceeds the quantum bound {lines} by more than {QM_SIGMA_LIMIT} standard errors"
        )));
    }
    Ok(if excess > tol {
        BoundCheck {
            verdict: Verdict::ExceedsQm,
            sigma: sigma(excess),
        }
    } else if chi > nchv + tol {
        BoundCheck {
            verdict: Verdict::ViolatesNchv,
            sigma: sigma(chi - nchv),
        }
    } else {
        BoundCheck {
            verdict: Verdict::ConsistentWithNchv,
            sigma: sigma(chi - nchv),
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiReport {
    pub geometry: String,
    pub chi: f64,
    pub stderr: f64,
    pub lines: usize,
    pub degree: usize,
    pub degree_source: DegreeSource,
    pub nchv_bound: i64,
    pub qm_bound: usize,
    pub violated: bool,
    pub verdict: Verdict,
    pub sigma: Option<f64>,
    pub shots: u64,
    pub noise: NoiseParams,
    pub state: InitialState,
}

impl ChiReport {
    fn new(geom: &IncidenceGeometry, estimates: &[ContextEstimate], degree: KnownDegree, config: &RioNegroConfig) -> Result<Self> {
        let (chi, stderr) = chi_of(geom, estimates, 0..geom.num_lines())?;
        let check = bound_check(chi, geom.num_lines(), degree.value, stderr)?;
        Ok(Self {
            geometry: geom.name().to_owned(),
            chi,
            stderr,
            lines: geom.num_lines(),
            degree: degree.value,
            degree_source: degree.source,
            nchv_bound: geom.num_lines() as i64 - 2 * degree.value as i64,
            qm_bound: geom.num_lines(),
            violated: check.verdict == Verdict::ViolatesNchv,
            verdict: check.verdict,
            sigma: check.sigma,
            shots: config.shots,
            noise: config.noise,
            state: config.state,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RioNegroRun {
    pub estimates: Vec<ContextEstimate>,
    pub report: ChiReport,
}

/// Signed sum of context means over `lines` with its standard error, summed
/// in the order given.
pub fn chi_of(
    geom: &IncidenceGeometry,
    estimates: &[ContextEstimate],
    lines: impl IntoIterator<Item = usize>,
) -> Result<(f64, f64)> {
    let mut chi = 0.0;
    let mut var = 0.0;
    for id in lines {
        let e = estimates.get(id).filter(|e| e.line == id).ok_or_else(|| {
            Error::Consistency(format!("line {id} has no context estimate in this run"))
        })?;
        let sign = geom.line(id).sign.value() as f64;
        chi += sign * e.mean_product;
        var += e.stderr * e.stderr;
    }
    Ok((chi, var.sqrt()))
}

fn initial_state<T: Real>(n: usize, config: &RioNegroConfig) -> Result<StateVec<T>> {
    match config.state {
        InitialState::Zeros => StateVec::zeros(n),
        InitialState::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            // keep the state draw off the per-context streams
            rng.set_stream(1);
            StateVec::random(n, &mut rng)
        }
    }
}

/// Measures every line of `geom` `config.shots` times. Line `i` draws from
/// the stream seeded with `seed + i`, so runs are reproducible regardless of
/// thread scheduling.
pub fn rio_negro_run<T: Real>(
    geom: &IncidenceGeometry,
    config: &RioNegroConfig,
    degree: Option<KnownDegree>,
) -> Result<RioNegroRun> {
    if config.shots == 0 {
        return Err(Error::Config("at least one shot per context is needed".into()));
    }
    config.noise.validate()?;
    let state = initial_state::<T>(geom.n_qubits(), config)?;
    let estimates = (0..geom.num_lines())
        .into_par_iter()
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(id as u64));
            let mut minus = 0u64;
            for _ in 0..config.shots {
                let mut s = state.clone();
                let recs = measure_line(&mut s, geom, id, &config.noise, &mut rng)?;
                let product = recs[0].outcome * recs[1].outcome * recs[2].outcome;
                if product == Sign::Minus {
                    minus += 1;
                }
            }
            Ok(ContextEstimate::from_counts(id, config.shots, minus))
        })
        .collect::<Result<Vec<_>>>()?;
    let degree = match degree {
        Some(d) => d,
        None => known_degree(geom)?,
    };
    let report = ChiReport::new(geom, &estimates, degree, config)?;
    Ok(RioNegroRun { estimates, report })
}

/// Families of subgeometries read out of a single W(5,2) run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Squares,
    Doilies,
    Elliptic,
    Hyperbolic,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Squares, Family::Doilies, Family::Elliptic, Family::Hyperbolic];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Squares => "squares",
            Family::Doilies => "doilies",
            Family::Elliptic => "elliptic",
            Family::Hyperbolic => "hyperbolic",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown subgeometry family {s:?}")))
    }
}

/// A labelled copy inside the ambient geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub label: String,
    pub embedding: Embedding,
}

/// Ambient point and line ids of `sub`, whose operators must all appear in
/// `ambient`.
pub fn embedding_of(ambient: &IncidenceGeometry, sub: &IncidenceGeometry) -> Result<Embedding> {
    let missing = |what: String| Error::Consistency(format!("{what} of {} is not in {}", sub.name(), ambient.name()));
    let mut points = sub
        .points()
        .iter()
        .map(|op| ambient.index_of(op).ok_or_else(|| missing(format!("point {op}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut lines = sub
        .lines()
        .iter()
        .map(|l| {
            let a = points[l.points[0]];
            let b = points[l.points[1]];
            ambient
                .line_joining(a, b)
                .ok_or_else(|| missing(format!("line {:?}", l.points)))
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_unstable();
    lines.sort_unstable();
    Ok(Embedding { points, lines })
}

/// All members of `family` inside `ambient`.
pub fn family_members(ambient: &IncidenceGeometry, family: Family) -> Result<Vec<Member>> {
    let numbered = |prefix: &str, embs: Vec<Embedding>| {
        embs.into_iter()
            .enumerate()
            .map(|(i, embedding)| Member {
                label: format!("{prefix}#{i}"),
                embedding,
            })
            .collect()
    };
    Ok(match family {
        Family::Squares => numbered("square", enumerate_subgeometries(ambient, &build_mermin_square())?),
        Family::Doilies => numbered("doily", enumerate_subgeometries(ambient, &build_doily())?),
        Family::Elliptic | Family::Hyperbolic => {
            let want = if family == Family::Elliptic {
                QuadricKind::Elliptic
            } else {
                QuadricKind::Hyperbolic
            };
            enumerate_quadrics(ambient)?
                .into_iter()
                .filter(|(spec, _)| spec.kind == want)
                .map(|(spec, q)| {
                    Ok(Member {
                        label: spec.label(),
                        embedding: embedding_of(ambient, &q)?,
                    })
                })
                .collect::<Result<_>>()?
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberChi {
    pub label: String,
    pub chi: f64,
    pub stderr: f64,
    pub violates: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub ambient: String,
    pub family: Family,
    /// Lines per member.
    pub lines: usize,
    pub degree: usize,
    pub degree_source: DegreeSource,
    pub nchv_bound: i64,
    pub qm_bound: usize,
    pub members: Vec<MemberChi>,
    /// `bins + 1` ascending edges spanning `[L − 2d − 1, L]`.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Members below the first edge, counted in the first bin.
    pub below_range: u64,
    pub max: f64,
    /// Label of the member reaching `max`.
    pub best: String,
    pub min: f64,
    pub mean: f64,
    pub violation_fraction: f64,
}

/// χ of every member, summed from the run's context means without measuring
/// again, and binned.
pub fn extract_subgeometry_chi(
    ambient: &IncidenceGeometry,
    estimates: &[ContextEstimate],
    family: Family,
    members: &[Member],
    bins: usize,
) -> Result<HistogramData> {
    if estimates.len() != ambient.num_lines() {
        return Err(Error::Consistency(format!(
            "run covers {} of the {} contexts of {}",
            estimates.len(),
            ambient.num_lines(),
            ambient.name()
        )));
    }
    let first = members
        .first()
        .ok_or_else(|| Error::Config(format!("no {family} in {}", ambient.name())))?;
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let lines = first.embedding.lines.len();
    if let Some(m) = members.iter().find(|m| m.embedding.lines.len() != lines) {
        return Err(Error::Consistency(format!("{} has {} lines, expected {lines}", m.label, m.embedding.lines.len())));
    }
    // every member is isomorphic to the first, so one degree serves all
    let degree = known_degree(&ambient.induced(first.label.clone(), &first.embedding.points))?;
    let nchv = lines as i64 - 2 * degree.value as i64;
    let tol = slack(lines);
    let chis = members
        .iter()
        .map(|m| {
            let (chi, stderr) = chi_of(ambient, estimates, m.embedding.lines.iter().copied())?;
            Ok(MemberChi {
                label: m.label.clone(),
                chi,
                stderr,
                violates: chi > nchv as f64 + tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let lo = nchv as f64 - 1.0;
    let hi = lines as f64;
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + i as f64 * width }).collect();
    let mut counts = vec![0u64; bins];
    let mut below_range = 0;
    for c in &chis {
        if c.chi < lo {
            below_range += 1;
        }
        let k = ((c.chi - lo) / width).floor().clamp(0.0, (bins - 1) as f64) as usize;
        counts[k] += 1;
    }
    let (best, max) = chis
        .iter()
        .fold((&chis[0], chis[0].chi), |(b, m), c| if c.chi > m { (c, c.chi) } else { (b, m) });
    let min = chis.iter().map(|c| c.chi).fold(f64::INFINITY, f64::min);
    let mean = chis.iter().map(|c| c.chi).sum::<f64>() / chis.len() as f64;
    let violation_fraction = chis.iter().filter(|c| c.violates).count() as f64 / chis.len() as f64;
    Ok(HistogramData {
        ambient: ambient.name().to_owned(),
        family,
        lines,
        degree: degree.value,
        degree_source: degree.source,
        nchv_bound: nchv,
        qm_bound: lines,
        best: best.label.clone(),
        members: chis,
        bin_edges,
        counts,
        below_range,
        max,
        min,
        mean,
        violation_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_quadric, build_symplectic_space, QuadricSpec};

    fn quick(shots: u64, p_dep: f64, p_ro: f64, seed: u64) -> RioNegroConfig {
        RioNegroConfig {
            shots,
            noise: NoiseParams::new(p_dep, p_ro).unwrap(),
            state: InitialState::Zeros,
            seed,
        }
    }

    #[test]
    fn bound_check_examples() {
        let v = bound_check(264.22, 315, 63, 0.5).unwrap();
        assert_eq!(v.verdict, Verdict::ViolatesNchv);
        assert!(v.sigma.unwrap() > 5.0);
        assert_eq!(bound_check(5.3076, 6, 1, 0.0).unwrap().verdict, Verdict::ViolatesNchv);
        assert_eq!(bound_check(188.0, 315, 63, 1.0).unwrap().verdict, Verdict::ConsistentWithNchv);
        assert_eq!(bound_check(189.0, 315, 63, 0.0).unwrap().verdict, Verdict::ConsistentWithNchv);
        assert_eq!(bound_check(315.5, 315, 63, 1.0).unwrap().verdict, Verdict::ExceedsQm);
        assert!(bound_check(320.0, 315, 63, 0.5).unwrap_err().is_internal());
        assert!(bound_check(315.0 + 1e-12, 315, 63, 0.0).is_ok());
    }

    #[test]
    fn estimate_statistics() {
        let e = ContextEstimate::from_counts(0, 4, 1);
        assert_eq!(e.mean_product, 0.5);
        // sample variance 4/3 · (1 − 1/4) = 1
        assert!((e.stderr - 0.5).abs() < 1e-12);
        let all = ContextEstimate::from_counts(0, 10, 0);
        assert_eq!((all.mean_product, all.stderr), (1.0, 0.0));
    }

    #[test]
    fn noiseless_chi_is_l() {
        for g in [build_mermin_square(), build_doily()] {
            let run = rio_negro_run::<f64>(&g, &quick(50, 0.0, 0.0, 3), None).unwrap();
            assert_eq!(run.report.chi, g.num_lines() as f64);
            assert_eq!(run.report.stderr, 0.0);
            assert!(run.report.violated);
            assert_eq!(run.report.degree_source, DegreeSource::Exact);
        }
    }

    #[test]
    fn state_independence_on_random_states() {
        let d = build_doily();
        for seed in 0..10 {
            let config = RioNegroConfig {
                state: InitialState::Random,
                ..quick(20, 0.0, 0.0, seed)
            };
            let run = rio_negro_run::<f64>(&d, &config, None).unwrap();
            assert_eq!(run.report.chi, 15.0, "seed {seed}");
        }
    }

    #[test]
    fn full_readout_noise_gives_zero() {
        let d = build_doily();
        let run = rio_negro_run::<f64>(&d, &quick(2000, 0.0, 0.5, 1), None).unwrap();
        assert!(run.report.chi.abs() < 5.0 * run.report.stderr, "{:?}", run.report);
        assert_eq!(run.report.verdict, Verdict::ConsistentWithNchv);
    }

    #[test]
    fn chi_decreases_with_readout_noise() {
        let d = build_doily();
        let lo = rio_negro_run::<f64>(&d, &quick(10_000, 0.0, 0.02, 5), None).unwrap().report;
        let hi = rio_negro_run::<f64>(&d, &quick(10_000, 0.0, 0.08, 5), None).unwrap().report;
        let spread = (lo.stderr.powi(2) + hi.stderr.powi(2)).sqrt();
        assert!(lo.chi - hi.chi > 5.0 * spread, "{} vs {}", lo.chi, hi.chi);
    }

    #[test]
    fn runs_are_reproducible() {
        let sq = build_mermin_square();
        let a = rio_negro_run::<f64>(&sq, &quick(300, 0.01, 0.02, 8), None).unwrap();
        let b = rio_negro_run::<f64>(&sq, &quick(300, 0.01, 0.02, 8), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn f32_run_matches_noiselessly() {
        let d = build_doily();
        let run = rio_negro_run::<f32>(&d, &quick(20, 0.0, 0.0, 0), None).unwrap();
        assert_eq!(run.report.chi, 15.0);
    }

    #[test]
    fn quadric_embeddings_round_trip() {
        let w = build_symplectic_space(3).unwrap();
        let q = build_quadric(&QuadricSpec::new("YYY".parse().unwrap()), &w).unwrap();
        let e = embedding_of(&w, &q).unwrap();
        assert_eq!((e.points.len(), e.lines.len()), (27, 45));
        for &l in &e.lines {
            assert!(w.line(l).points.iter().all(|p| e.points.binary_search(p).is_ok()));
        }
    }

    #[test]
    fn chi_is_additive_over_a_partition() {
        let w = build_symplectic_space(3).unwrap();
        let run = rio_negro_run::<f64>(&w, &quick(40, 0.02, 0.02, 2), None).unwrap();
        let total = run.report.chi;
        let (even, _) = chi_of(&w, &run.estimates, (0..315).step_by(2)).unwrap();
        let (odd, _) = chi_of(&w, &run.estimates, (1..315).step_by(2)).unwrap();
        assert!((even + odd - total).abs() < 1e-9);
    }

    #[test]
    fn extraction_rejects_a_partial_run() {
        let w = build_symplectic_space(3).unwrap();
        let members = family_members(&w, Family::Elliptic).unwrap();
        let estimates: Vec<_> = (0..10).map(|l| ContextEstimate::from_counts(l, 1, 0)).collect();
        let err = extract_subgeometry_chi(&w, &estimates, Family::Elliptic, &members, 8).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn noiseless_extraction_is_degenerate() {
        let w = build_symplectic_space(3).unwrap();
        let run = rio_negro_run::<f64>(&w, &quick(4, 0.0, 0.0, 0), None).unwrap();
        assert_eq!(run.report.chi, 315.0);
        assert_eq!(run.report.degree_source, DegreeSource::Reference);
        for (family, count, l, d) in [(Family::Elliptic, 28, 45, 9), (Family::Squares, 3360, 6, 1)] {
            let members = family_members(&w, family).unwrap();
            let h = extract_subgeometry_chi(&w, &run.estimates, family, &members, DEFAULT_BINS).unwrap();
            assert_eq!(h.counts.iter().sum::<u64>(), count);
            assert_eq!((h.lines, h.degree), (l, d));
            assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
            assert_eq!(*h.counts.last().unwrap(), count);
            assert!(h.members.iter().all(|m| m.chi == l as f64));
            assert_eq!(h.violation_fraction, 1.0);
            assert_eq!(h.bin_edges.len(), DEFAULT_BINS + 1);
            assert_eq!(h.bin_edges[0], (l - 2 * d - 1) as f64);
        }
    }
}
