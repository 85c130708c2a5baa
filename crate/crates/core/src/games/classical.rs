use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    answers_valid, enumerate_dealings, reference_value, wins, Answer, GameKind, GameResult, Part,
    PlayMode, Question, TranscriptRow,
};
use crate::degree::Assignment;
use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::Sign;

/// A deterministic player: a value for every point and a constraint-valid
/// triple for every line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyTable {
    pub points: Vec<Sign>,
    pub lines: Vec<[Sign; 3]>,
}

impl StrategyTable {
    fn answer(&self, part: Part) -> Answer {
        match part {
            Part::Point(p) => Answer::Point(self.points[p]),
            Part::Line(l) => Answer::Line(self.lines[l]),
        }
    }

    pub fn validate(&self, geom: &IncidenceGeometry) -> Result<()> {
        if self.points.len() != geom.num_points() || self.lines.len() != geom.num_lines() {
            return Err(Error::Config("strategy table does not match the geometry".into()));
        }
        for (id, t) in self.lines.iter().enumerate() {
            if t[0] * t[1] * t[2] != geom.line(id).sign {
                return Err(Error::Config(format!("strategy answer for line {id} breaks its constraint")));
            }
        }
        Ok(())
    }
}

/// Values read off the assignment; on a violated line the highest-indexed
/// point of the triple is flipped so the answer is valid.
pub fn classical_from_assignment(geom: &IncidenceGeometry, a: &Assignment) -> Result<StrategyTable> {
    if a.len() != geom.num_points() {
        return Err(Error::Dimension {
            expected: geom.num_points(),
            actual: a.len(),
        });
    }
    let points: Vec<Sign> = (0..a.len()).map(|i| a.value(i)).collect();
    let lines = geom
        .lines()
        .iter()
        .map(|l| {
            let mut t = l.points.map(|p| points[p]);
            if t[0] * t[1] * t[2] != l.sign {
                t[2] = -t[2];
            }
            t
        })
        .collect();
    Ok(StrategyTable { points, lines })
}

/// Plays fixed tables. One table is shared by every player; otherwise one
/// per player.
pub fn play_classical(
    geom: &IncidenceGeometry,
    kind: GameKind,
    strategies: &[StrategyTable],
    mode: PlayMode,
) -> Result<(GameResult, Vec<TranscriptRow>)> {
    let players = kind.players();
    if strategies.len() != 1 && strategies.len() != players {
        return Err(Error::Config(format!(
            "{kind} needs 1 shared or {players} strategy tables, got {}",
            strategies.len()
        )));
    }
    for s in strategies {
        s.validate(geom)?;
    }
    let questions = enumerate_dealings(geom, kind)?;
    let table = |k: usize| &strategies[k.min(strategies.len() - 1)];
    let play = |round: u64, q: &Question| {
        let answers: Vec<Answer> = q
            .parts()
            .iter()
            .enumerate()
            .map(|(k, &part)| table(k).answer(part))
            .collect();
        let win = wins(geom, q, &answers);
        (TranscriptRow::new(round, q, &answers, win), answers_valid(geom, q, &answers))
    };
    let rows: Vec<(TranscriptRow, bool)> = match mode {
        PlayMode::Exhaustive => questions
            .iter()
            .enumerate()
            .map(|(i, q)| play(i as u64, q))
            .collect(),
        PlayMode::Sampled { rounds, seed } => (0..rounds)
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r));
                play(r, &questions[rng.random_range(0..questions.len())])
            })
            .collect(),
    };
    let won = rows.iter().filter(|(r, _)| r.win).count() as u64;
    let invalid = rows.iter().filter(|(_, ok)| !ok).count() as u64;
    let result = GameResult::new(
        geom,
        kind,
        "classical",
        rows.len() as u64,
        won,
        invalid,
        mode == PlayMode::Exhaustive,
    );
    Ok((result, rows.into_iter().map(|(r, _)| r).collect()))
}

/// Limits on the exact classical search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassicalSearch {
    /// Largest number of first-player tables enumerated by default.
    pub max_strategies: u64,
    /// Lifts the limit to `2^34`.
    pub long_running: bool,
}

impl Default for ClassicalSearch {
    fn default() -> Self {
        Self {
            max_strategies: 1 << 22,
            long_running: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalOptimum {
    pub value: Ratio<u64>,
    pub wins: u64,
    pub questions: u64,
    /// Tables for the first and second player.
    pub strategies: [StrategyTable; 2],
}

/// Exact optimal deterministic value under uniform questions and dealings.
pub fn optimal_classical(
    geom: &IncidenceGeometry,
    kind: GameKind,
    search: ClassicalSearch,
) -> Result<ClassicalOptimum> {
    if kind == GameKind::Llll {
        return Err(Error::Intractable {
            reason: format!("exact classical value of the four-player game on {}", geom.name()),
            reference: reference_value(geom.name(), kind).map(|r| r.to_string()),
        });
    }
    optimal_classical_over(geom, &enumerate_dealings(geom, kind)?, search).map_err(|e| match e {
        Error::Intractable { reason, .. } => Error::Intractable {
            reason,
            reference: reference_value(geom.name(), kind).map(|r| r.to_string()),
        },
        other => other,
    })
}

/// Valid triples for a line of the given sign, as 3-bit masks (bit `j` set ⇔
/// position `j` answers −1), in ascending order.
fn valid_triples(sign: Sign) -> [u8; 4] {
    let mut out = [0u8; 4];
    let mut k = 0;
    for t in 0u8..8 {
        if (t.count_ones() % 2 == 1) == sign.bit() {
            out[k] = t;
            k += 1;
        }
    }
    out
}

fn triple_signs(t: u8) -> [Sign; 3] {
    [0, 1, 2].map(|j| Sign::from_bit(t >> j & 1 == 1))
}

/// Two-player optimum over an arbitrary question list: enumerate the first
/// player's tables on the parts they can receive, and best-respond for the
/// second player line by line (each second-player line only affects the
/// questions containing it).
pub fn optimal_classical_over(
    geom: &IncidenceGeometry,
    questions: &[Question],
    search: ClassicalSearch,
) -> Result<ClassicalOptimum> {
    // First-player parts with their bit offsets in the strategy code.
    let mut a_parts: Vec<Part> = Vec::new();
    let mut b_lines: Vec<usize> = Vec::new();
    for q in questions {
        let parts = q.parts();
        if parts.len() != 2 {
            return Err(Error::Config("exact search handles two-player games only".into()));
        }
        if !a_parts.contains(&parts[0]) {
            a_parts.push(parts[0]);
        }
        match parts[1] {
            Part::Line(l) if !b_lines.contains(&l) => b_lines.push(l),
            Part::Line(_) => {}
            Part::Point(_) => return Err(Error::Config("second player must receive lines".into())),
        }
    }
    a_parts.sort_by_key(|p| match *p {
        Part::Point(i) => (0, i),
        Part::Line(i) => (1, i),
    });
    b_lines.sort_unstable();
    let mut offsets = Vec::with_capacity(a_parts.len());
    let mut bits = 0u32;
    for part in &a_parts {
        offsets.push(bits);
        bits += match part {
            Part::Point(_) => 1,
            Part::Line(_) => 2,
        };
    }
    let limit = if search.long_running {
        search.max_strategies.max(1 << 34)
    } else {
        search.max_strategies
    };
    if bits >= 63 || (1u64 << bits) > limit {
        return Err(Error::Intractable {
            reason: format!(
                "2^{bits} first-player tables on {} exceed the limit of {limit}; pass --long-running",
                geom.name()
            ),
            reference: None,
        });
    }

    // Per first-player part: how a code field maps to a 3-bit value mask.
    let decoders: Vec<(u32, Option<[u8; 4]>)> = a_parts
        .iter()
        .zip(&offsets)
        .map(|(p, &off)| match *p {
            Part::Point(_) => (off, None),
            Part::Line(l) => (off, Some(valid_triples(geom.line(l).sign))),
        })
        .collect();
    // Per second-player line: (position on B's line, A part index, position on A's part).
    let checks: Vec<Vec<(u32, usize, u32)>> = b_lines
        .iter()
        .map(|&bl| {
            questions
                .iter()
                .filter(|q| q.parts()[1] == Part::Line(bl))
                .map(|q| {
                    let point = q.shared_point(geom);
                    let first = q.parts()[0];
                    let ai = a_parts.iter().position(|p| *p == first).unwrap();
                    let pos_a = match first {
                        Part::Point(_) => 0,
                        Part::Line(l) => geom.line(l).position(point).unwrap() as u32,
                    };
                    (geom.line(bl).position(point).unwrap() as u32, ai, pos_a)
                })
                .collect()
        })
        .collect();
    let b_triples: Vec<[u8; 4]> = b_lines.iter().map(|&l| valid_triples(geom.line(l).sign)).collect();

    let score = |code: u64, choices: Option<&mut Vec<u8>>| -> u64 {
        let a_bit = |ai: usize, pos: u32| -> u8 {
            let (off, dec) = decoders[ai];
            match dec {
                None => (code >> off & 1) as u8,
                Some(ts) => ts[(code >> off & 3) as usize] >> pos & 1,
            }
        };
        let mut total = 0u64;
        let mut chosen = Vec::new();
        for (bi, list) in checks.iter().enumerate() {
            let mut best = (0u64, 0u8);
            for (k, &t) in b_triples[bi].iter().enumerate() {
                let hits = list
                    .iter()
                    .filter(|&&(pb, ai, pa)| (t >> pb & 1) == a_bit(ai, pa))
                    .count() as u64;
                if hits > best.0 || k == 0 {
                    best = (hits, t);
                }
            }
            total += best.0;
            chosen.push(best.1);
        }
        if let Some(out) = choices {
            *out = chosen;
        }
        total
    };

    const CHUNK: u64 = 1 << 12;
    let count = 1u64 << bits;
    let (best_wins, best_code) = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut best = (0u64, c * CHUNK);
            for code in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let s = score(code, None);
                if s > best.0 {
                    best = (s, code);
                }
            }
            best
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap_or((0, 0));

    let mut b_choice = Vec::new();
    score(best_code, Some(&mut b_choice));
    let default_table = || StrategyTable {
        points: vec![Sign::Plus; geom.num_points()],
        lines: geom
            .lines()
            .iter()
            .map(|l| triple_signs(valid_triples(l.sign)[0]))
            .collect(),
    };
    let mut a_table = default_table();
    for (part, (off, dec)) in a_parts.iter().zip(&decoders) {
        match (*part, dec) {
            (Part::Point(p), None) => a_table.points[p] = Sign::from_bit(best_code >> off & 1 == 1),
            (Part::Line(l), Some(ts)) => {
                a_table.lines[l] = triple_signs(ts[(best_code >> off & 3) as usize])
            }
            _ => unreachable!(),
        }
    }
    let mut b_table = default_table();
    for (&l, &t) in b_lines.iter().zip(&b_choice) {
        b_table.lines[l] = triple_signs(t);
    }
    let n = questions.len() as u64;
    Ok(ClassicalOptimum {
        value: Ratio::new(best_wins, n.max(1)),
        wins: best_wins,
        questions: n,
        strategies: [a_table, b_table],
    })
}

/// Best exact value among `samples` independently drawn random strategy
/// profiles (one uniformly random valid table per player). Sample `i` uses
/// the stream seeded with `seed + i`.
pub fn random_strategy_search(
    geom: &IncidenceGeometry,
    kind: GameKind,
    samples: u64,
    seed: u64,
) -> Result<(Ratio<u64>, Vec<StrategyTable>)> {
    let questions = enumerate_dealings(geom, kind)?;
    let players = kind.players();
    // (is_point, index, position) per player per question
    let plan: Vec<Vec<(bool, usize, u32)>> = questions
        .iter()
        .map(|q| {
            let point = q.shared_point(geom);
            q.parts()
                .iter()
                .map(|part| match *part {
                    Part::Point(p) => (true, p, 0),
                    Part::Line(l) => (false, l, geom.line(l).position(point).unwrap() as u32),
                })
                .collect()
        })
        .collect();
    let triples: Vec<[u8; 4]> = geom.lines().iter().map(|l| valid_triples(l.sign)).collect();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<(Vec<u8>, Vec<u8>)> {
        (0..players)
            .map(|_| {
                let pts = (0..geom.num_points()).map(|_| rng.random_range(0..2u8)).collect();
                let lns = triples.iter().map(|ts| ts[rng.random_range(0..4)]).collect();
                (pts, lns)
            })
            .collect()
    };
    let evaluate = |profile: &[(Vec<u8>, Vec<u8>)]| -> u64 {
        plan.iter()
            .filter(|q| {
                let mut parity = 0u8;
                let mut first = None;
                let mut agree = true;
                for (k, &(is_point, idx, pos)) in q.iter().enumerate() {
                    let (pts, lns) = &profile[k];
                    let v = if is_point { pts[idx] } else { lns[idx] >> pos & 1 };
                    parity ^= v;
                    match first {
                        None => first = Some(v),
                        Some(f) => agree &= f == v,
                    }
                }
                if kind == GameKind::Llll {
                    parity == 0
                } else {
                    agree
                }
            })
            .count() as u64
    };

    let best = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            (evaluate(&draw(&mut rng)), i)
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a });
    let Some((wins, index)) = best else {
        return Ok((Ratio::new(0, 1), Vec::new()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index));
    let tables = draw(&mut rng)
        .into_iter()
        .map(|(pts, lns)| StrategyTable {
            points: pts.into_iter().map(|b| Sign::from_bit(b == 1)).collect(),
            lines: lns.into_iter().map(triple_signs).collect(),
        })
        .collect();
    Ok((Ratio::new(wins, questions.len() as u64), tables))
}
