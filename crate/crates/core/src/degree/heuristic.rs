use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Assignment, DegreeResult, Method, SolverConfig, FLIPS_PER_RESTART};
use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;

const T_START: f64 = 2.0;
const T_END: f64 = 0.05;

/// Upper bound on the degree from restarted simulated annealing over
/// single-point flips. Restart `r` draws from its own stream seeded with
/// `seed + r`; the best restart wins, ties going to the lowest index.
pub fn heuristic_degree(geom: &IncidenceGeometry, config: &SolverConfig) -> Result<DegreeResult> {
    if config.budget == 0 {
        return Err(Error::Config("heuristic budget must be positive".into()));
    }
    let n = geom.num_points();
    if n == 0 || geom.num_lines() == 0 {
        return Ok(DegreeResult::from_witness(geom, Assignment::new(n), false, Method::Heuristic));
    }
    let restarts = (config.budget / FLIPS_PER_RESTART).max(1);
    let flips = config.budget / restarts;
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| anneal(geom, flips, config.seed.wrapping_add(r)))
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    Ok(DegreeResult::from_witness(geom, best.1, false, Method::Heuristic))
}

/// Result of every restart, in restart order.
pub fn heuristic_restarts(geom: &IncidenceGeometry, config: &SolverConfig) -> Vec<DegreeResult> {
    let restarts = (config.budget / FLIPS_PER_RESTART).max(1);
    let flips = config.budget / restarts;
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let (_, a) = anneal(geom, flips, config.seed.wrapping_add(r));
            DegreeResult::from_witness(geom, a, false, Method::Heuristic)
        })
        .collect()
}

fn anneal(geom: &IncidenceGeometry, flips: u64, seed: u64) -> (usize, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = geom.num_points();
    let lines = geom.lines();
    let mut state = Assignment::from_bits((0..n).map(|_| rng.random::<bool>()));
    let mut violated: Vec<bool> = lines
        .iter()
        .map(|l| l.points.iter().fold(false, |acc, &p| acc ^ state.get(p)) != l.sign.bit())
        .collect();
    let mut current = violated.iter().filter(|&&v| v).count();
    let mut best = (current, state.clone());

    let cooling = if flips > 1 {
        (T_END / T_START).powf(1.0 / (flips - 1) as f64)
    } else {
        1.0
    };
    let mut temperature = T_START;
    for _ in 0..flips {
        let p = rng.random_range(0..n);
        let through = geom.lines_through(p);
        let bad = through.iter().filter(|&&l| violated[l]).count() as i64;
        let delta = through.len() as i64 - 2 * bad;
        if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp() {
            state.flip(p);
            for &l in through {
                violated[l] = !violated[l];
            }
            current = (current as i64 + delta) as usize;
            if current < best.0 {
                best = (current, state.clone());
            }
        }
        temperature *= cooling;
    }
    best
}
