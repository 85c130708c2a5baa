//! Quantum strategies over shared entanglement.
//!
//! Two-player games share `n` Bell pairs. Player A measures the operators of
//! its part directly; player B measures the same operators on its half and
//! reports each outcome times `(-1)^{#Y}`, because `P ⊗ Pᵀ` stabilises the
//! Bell resource and `Pᵀ = (-1)^{#Y} P`.
//!
//! The four-player game shares `n` four-qubit GHZ blocks. `P^{⊗4}` stabilises
//! that resource for every Pauli `P` (even for `Y`, since `Y^{⊗4}` maps
//! `|0000⟩ ↔ |1111⟩` with phase `i^4 = 1`), so the four values reported for
//! the common point always multiply to +1 and nobody mirrors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    answers_valid, enumerate_dealings, wins, Answer, GameKind, GameResult, Part, PlayMode,
    Question, TranscriptRow,
};
use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::{PauliOperator, Sign};
use crate::quantum::{ghz_resource, measure_sequence, mirror_op, NoiseParams, StateVec, MAX_SIM_QUBITS};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct QuantumPlay {
    pub result: GameResult,
    pub transcript: Vec<TranscriptRow>,
}

struct Resource<T: Real> {
    state: StateVec<T>,
    n: usize,
    mirrored: Vec<bool>,
}

impl<T: Real> Resource<T> {
    fn for_game(n: usize, kind: GameKind) -> Result<Self> {
        let parties = kind.players();
        if n * parties > MAX_SIM_QUBITS {
            return Err(Error::Config(format!(
                "{parties} parties × {n} qubits exceeds the {MAX_SIM_QUBITS}-qubit simulator"
            )));
        }
        let mirrored = (0..parties).map(|k| parties == 2 && k == 1).collect();
        Ok(Self {
            state: ghz_resource(n, parties)?,
            n,
            mirrored,
        })
    }

    fn play_round<R: Rng>(
        &self,
        geom: &IncidenceGeometry,
        q: &Question,
        noise: &NoiseParams,
        rng: &mut R,
    ) -> Result<Vec<Answer>> {
        let mut state = self.state.clone();
        let total = state.n_qubits();
        q.parts()
            .iter()
            .enumerate()
            .map(|(k, &part)| {
                let ops: Vec<PauliOperator> = match part {
                    Part::Point(p) => vec![geom.point(p)],
                    Part::Line(l) => geom.line_operators(l).to_vec(),
                };
                let embedded = ops
                    .iter()
                    .map(|op| op.embed(total, k * self.n))
                    .collect::<Result<Vec<_>>>()?;
                let recs = measure_sequence(
                    &mut state,
                    &embedded,
                    k * self.n..(k + 1) * self.n,
                    noise,
                    rng,
                )?;
                let values: Vec<Sign> = recs
                    .iter()
                    .zip(&ops)
                    .map(|(rec, op)| {
                        if self.mirrored[k] {
                            rec.outcome * mirror_op(op).1
                        } else {
                            rec.outcome
                        }
                    })
                    .collect();
                Ok(match part {
                    Part::Point(_) => Answer::Point(values[0]),
                    Part::Line(_) => Answer::Line([values[0], values[1], values[2]]),
                })
            })
            .collect()
    }
}

/// Plays the quantum strategy. Round `r` (or dealing `r` in exhaustive mode)
/// uses the random stream seeded with `seed + r`; exhaustive mode uses seed 0.
pub fn play_quantum<T: Real>(
    geom: &IncidenceGeometry,
    kind: GameKind,
    noise: &NoiseParams,
    mode: PlayMode,
) -> Result<QuantumPlay> {
    noise.validate()?;
    let questions = enumerate_dealings(geom, kind)?;
    if questions.is_empty() {
        return Err(Error::Config(format!("{} has no {kind} questions", geom.name())));
    }
    let resource = Resource::<T>::for_game(geom.n_qubits(), kind)?;
    let run = |round: u64, seed: u64, pick: Option<usize>| -> Result<(TranscriptRow, bool)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(round));
        let q = match pick {
            Some(i) => &questions[i],
            None => &questions[rng.random_range(0..questions.len())],
        };
        let answers = resource.play_round(geom, q, noise, &mut rng)?;
        let win = wins(geom, q, &answers);
        Ok((TranscriptRow::new(round, q, &answers, win), answers_valid(geom, q, &answers)))
    };
    let rows: Vec<(TranscriptRow, bool)> = match mode {
        PlayMode::Exhaustive => (0..questions.len())
            .into_par_iter()
            .map(|i| run(i as u64, 0, Some(i)))
            .collect::<Result<_>>()?,
        PlayMode::Sampled { rounds, seed } => (0..rounds)
            .into_par_iter()
            .map(|r| run(r, seed, None))
            .collect::<Result<_>>()?,
    };
    let won = rows.iter().filter(|(r, _)| r.win).count() as u64;
    let invalid = rows.iter().filter(|(_, ok)| !ok).count() as u64;
    let result = GameResult::new(
        geom,
        kind,
        "quantum",
        rows.len() as u64,
        won,
        invalid,
        mode == PlayMode::Exhaustive,
    );
    Ok(QuantumPlay {
        result,
        transcript: rows.into_iter().map(|(r, _)| r).collect(),
    })
}
