//! Pseudotelepathy games played on operator-labelled geometries.
//!
//! * `pl`: one player gets a point, the other a line through it; they win
//!   when both give the same value to the point.
//! * `ll`: two players get distinct intersecting lines; they win when they
//!   agree on the common point.
//! * `llll`: four players get four distinct lines through a common point;
//!   they win when the product of their values for that point is +1.
//!
//! Line answers are triples ordered like the line's sorted points and must
//! multiply to the line's sign. Questions are drawn uniformly.

mod classical;
mod quantum;

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::Sign;

pub use classical::{
    classical_from_assignment, optimal_classical, optimal_classical_over, play_classical,
    random_strategy_search, ClassicalOptimum, ClassicalSearch, StrategyTable,
};
pub use quantum::{play_quantum, QuantumPlay};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Pl,
    Ll,
    Llll,
}

impl GameKind {
    pub fn players(self) -> usize {
        match self {
            GameKind::Pl | GameKind::Ll => 2,
            GameKind::Llll => 4,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Pl => "pl",
            GameKind::Ll => "ll",
            GameKind::Llll => "llll",
        })
    }
}

impl std::str::FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pl" => Ok(GameKind::Pl),
            "ll" => Ok(GameKind::Ll),
            "llll" => Ok(GameKind::Llll),
            other => Err(Error::Config(format!("unknown game kind {other:?}"))),
        }
    }
}

/// What each player is told. Line entries are line ids of the game geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Question {
    PointLine { point: usize, line: usize },
    LineLine { first: usize, second: usize },
    FourLines { point: usize, lines: [usize; 4] },
}

/// A part of a question handed to a single player.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Point(usize),
    Line(usize),
}

impl Question {
    pub fn parts(&self) -> Vec<Part> {
        match *self {
            Question::PointLine { point, line } => vec![Part::Point(point), Part::Line(line)],
            Question::LineLine { first, second } => vec![Part::Line(first), Part::Line(second)],
            Question::FourLines { lines, .. } => lines.iter().map(|&l| Part::Line(l)).collect(),
        }
    }

    /// The point every player's answer is compared on.
    pub fn shared_point(&self, geom: &IncidenceGeometry) -> usize {
        match *self {
            Question::PointLine { point, .. } | Question::FourLines { point, .. } => point,
            Question::LineLine { first, second } => geom
                .intersection(first, second)
                .expect("line-line questions use intersecting lines"),
        }
    }

    pub fn label(&self) -> String {
        self.parts()
            .iter()
            .map(|p| match p {
                Part::Point(i) => format!("P{i}"),
                Part::Line(l) => format!("L{l}"),
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Point(Sign),
    Line([Sign; 3]),
}

impl Answer {
    /// Value given to `point`, which the answered part contains.
    pub fn value_at(&self, geom: &IncidenceGeometry, part: Part, point: usize) -> Sign {
        match (self, part) {
            (Answer::Point(s), _) => *s,
            (Answer::Line(t), Part::Line(l)) => {
                t[geom.line(l).position(point).expect("point lies on the line")]
            }
            (Answer::Line(_), Part::Point(_)) => unreachable!("point parts get point answers"),
        }
    }

    pub fn label(&self) -> String {
        let c = |s: &Sign| if *s == Sign::Plus { '+' } else { '-' };
        match self {
            Answer::Point(s) => c(s).to_string(),
            Answer::Line(t) => t.iter().map(c).collect(),
        }
    }
}

/// Line answers multiply to their line's sign.
pub fn answers_valid(geom: &IncidenceGeometry, q: &Question, answers: &[Answer]) -> bool {
    q.parts().iter().zip(answers).all(|(part, ans)| match (part, ans) {
        (Part::Line(l), Answer::Line(t)) => t[0] * t[1] * t[2] == geom.line(*l).sign,
        (Part::Point(_), Answer::Point(_)) => true,
        _ => false,
    })
}

/// The referee's verdict.
pub fn wins(geom: &IncidenceGeometry, q: &Question, answers: &[Answer]) -> bool {
    let point = q.shared_point(geom);
    let values: Vec<Sign> = q
        .parts()
        .iter()
        .zip(answers)
        .map(|(&part, ans)| ans.value_at(geom, part, point))
        .collect();
    match q {
        Question::PointLine { .. } | Question::LineLine { .. } => values[0] == values[1],
        Question::FourLines { .. } => values.iter().fold(Sign::Plus, |a, &b| a * b) == Sign::Plus,
    }
}

pub fn enumerate_questions(geom: &IncidenceGeometry, kind: GameKind) -> Result<Vec<Question>> {
    let mut qs = Vec::new();
    match kind {
        GameKind::Pl => {
            for point in 0..geom.num_points() {
                for &line in geom.lines_through(point) {
                    qs.push(Question::PointLine { point, line });
                }
            }
        }
        GameKind::Ll => {
            for first in 0..geom.num_lines() {
                for second in first + 1..geom.num_lines() {
                    if geom.intersection(first, second).is_some() {
                        qs.push(Question::LineLine { first, second });
                    }
                }
            }
        }
        GameKind::Llll => {
            if geom.num_points() == 0
                || (0..geom.num_points()).any(|p| geom.lines_through(p).len() != 5)
            {
                return Err(Error::Config(format!(
                    "the llll game needs exactly 5 lines through every point; {} does not qualify",
                    geom.name()
                )));
            }
            for point in 0..geom.num_points() {
                let through = geom.lines_through(point);
                // 4-subsets in lexicographic order, i.e. dropping the last line first
                for skip in (0..5).rev() {
                    let mut lines = [0usize; 4];
                    let mut k = 0;
                    for (i, &l) in through.iter().enumerate() {
                        if i != skip {
                            lines[k] = l;
                            k += 1;
                        }
                    }
                    qs.push(Question::FourLines { point, lines });
                }
            }
        }
    }
    Ok(qs)
}

/// Every way the referee hands out the questions. A line-line question is
/// dealt in both orders with equal probability; with a fixed order, a player
/// who only ever receives a line as "first" can tailor its answer to that
/// role, and the square becomes classically winnable. Other questions are
/// dealt as listed.
pub fn dealings(questions: &[Question]) -> Vec<Question> {
    questions
        .iter()
        .flat_map(|q| match *q {
            Question::LineLine { first, second } => vec![
                Question::LineLine { first, second },
                Question::LineLine {
                    first: second,
                    second: first,
                },
            ],
            other => vec![other],
        })
        .collect()
}

/// Dealt rounds of `kind` on `geom`, in the order exhaustive play visits them.
pub fn enumerate_dealings(geom: &IncidenceGeometry, kind: GameKind) -> Result<Vec<Question>> {
    enumerate_questions(geom, kind).map(|qs| dealings(&qs))
}

/// Both orders of every intersecting pair of distinct lines, first line
/// ascending.
pub fn ordered_line_pairs(geom: &IncidenceGeometry) -> Vec<Question> {
    let mut qs = Vec::new();
    for first in 0..geom.num_lines() {
        for second in 0..geom.num_lines() {
            if geom.intersection(first, second).is_some() {
                qs.push(Question::LineLine { first, second });
            }
        }
    }
    qs
}

/// Outcome of a batch of rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub geometry: String,
    pub kind: GameKind,
    pub strategy: String,
    pub rounds: u64,
    pub wins: u64,
    /// Exact win fraction, as `"wins/rounds"` reduced.
    #[serde(with = "ratio_string")]
    pub rate: Ratio<u64>,
    pub rate_value: f64,
    /// Rounds where some line answer broke its constraint.
    pub invalid_answers: u64,
    pub exhaustive: bool,
}

impl GameResult {
    pub(crate) fn new(
        geom: &IncidenceGeometry,
        kind: GameKind,
        strategy: &str,
        rounds: u64,
        wins: u64,
        invalid_answers: u64,
        exhaustive: bool,
    ) -> Self {
        let rate = if rounds == 0 {
            Ratio::new(0, 1)
        } else {
            Ratio::new(wins, rounds)
        };
        Self {
            geometry: geom.name().to_owned(),
            kind,
            strategy: strategy.to_owned(),
            rounds,
            wins,
            rate,
            rate_value: if rounds == 0 { 0.0 } else { wins as f64 / rounds as f64 },
            invalid_answers,
            exhaustive,
        }
    }
}

/// One played round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub round: u64,
    pub question: String,
    pub answers: String,
    pub win: bool,
}

impl TranscriptRow {
    pub(crate) fn new(round: u64, q: &Question, answers: &[Answer], win: bool) -> Self {
        Self {
            round,
            question: q.label(),
            answers: answers.iter().map(Answer::label).collect::<Vec<_>>().join("|"),
            win,
        }
    }
}

/// Whether to run every question once or sample rounds uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlayMode {
    Exhaustive,
    Sampled { rounds: u64, seed: u64 },
}

/// Classical value of each game as published; used where exact search is
/// out of reach.
pub fn reference_value(geometry: &str, kind: GameKind) -> Option<Ratio<u64>> {
    let g = if geometry.starts_with("E_") { "elliptic" } else { geometry };
    match (g, kind) {
        ("square", GameKind::Pl) => Some(Ratio::new(17, 18)),
        ("doily", GameKind::Pl) => Some(Ratio::new(14, 15)),
        ("square", GameKind::Ll) => Some(Ratio::new(8, 9)),
        ("doily", GameKind::Ll) => Some(Ratio::new(13, 15)),
        ("elliptic", GameKind::Ll) => Some(Ratio::new(13, 15)),
        ("elliptic", GameKind::Llll) => Some(Ratio::new(11, 15)),
        _ => None,
    }
}

pub(crate) mod ratio_string {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        let (n, m) = s
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom(format!("bad ratio {s:?}")))?;
        let n: u64 = n.trim().parse().map_err(serde::de::Error::custom)?;
        let m: u64 = m.trim().parse().map_err(serde::de::Error::custom)?;
        if m == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n, m))
    }
}
