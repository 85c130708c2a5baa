//! Dense statevector simulation of Pauli measurements with Monte Carlo noise.
//!
//! Basis index bit `n - 1 - q` holds qubit `q`, matching the operator bit
//! layout, so a Pauli with bit vectors `(x | z)` acts as
//! `P|b⟩ = i^{#Y} (-1)^{|z ∧ b|} |b ⊕ x⟩`.

use std::ops::Range;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;
use crate::pauli::{commutes, PauliOperator, Sign};
use crate::scalar::Real;

pub const MAX_SIM_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVec<T: Real> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

fn i_pow<T: Real>(k: u32) -> Complex<T> {
    match k & 3 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SIM_QUBITS {
        return Err(Error::Config(format!(
            "simulator supports 1..={MAX_SIM_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

impl<T: Real> StateVec<T> {
    /// `|0…0⟩`.
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(n_qubits: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Dimension {
                expected: 1 << n_qubits,
                actual: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        if norm <= T::epsilon() {
            return Err(Error::Config("zero vector is not a state".into()));
        }
        for a in &mut amps {
            *a = *a / norm;
        }
        Ok(Self { n_qubits, amps })
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::from_amplitudes(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    fn check_op(&self, op: &PauliOperator) -> Result<()> {
        if op.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                actual: op.n_qubits(),
            });
        }
        Ok(())
    }

    fn pauli_image(&self, op: &PauliOperator) -> Vec<Complex<T>> {
        let (x, z) = (op.x_bits() as usize, op.z_bits() as usize);
        let phase = i_pow::<T>(op.y_count());
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let v = phase * a;
            out[b ^ x] = if (z & b).count_ones() & 1 == 1 { -v } else { v };
        }
        out
    }

    pub fn apply_pauli(&mut self, op: &PauliOperator) -> Result<()> {
        self.check_op(op)?;
        self.amps = self.pauli_image(op);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`, which is real for Hermitian `P`.
    pub fn expectation(&self, op: &PauliOperator) -> Result<T> {
        self.check_op(op)?;
        let image = self.pauli_image(op);
        let inner = self
            .amps
            .iter()
            .zip(&image)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        debug_assert!(inner.im.abs() <= T::tolerance() * T::lit(10.0));
        Ok(inner.re.max(-T::one()).min(T::one()))
    }

    /// Projective measurement of `op`: outcome `s` with probability
    /// `(1 + s⟨P⟩)/2`, leaving the state in `(I + sP)|ψ⟩`, renormalised.
    pub fn measure<R: Rng + ?Sized>(&mut self, op: &PauliOperator, rng: &mut R) -> Result<MeasurementRecord> {
        self.check_op(op)?;
        if op.is_identity() {
            return Err(Error::Config("cannot measure the identity".into()));
        }
        let image = self.pauli_image(op);
        let exp = self
            .amps
            .iter()
            .zip(&image)
            .fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re);
        let half = T::lit(0.5);
        let mut p_plus = (T::one() + exp) * half;
        // snap numerically certain outcomes so a zero-probability branch is never drawn
        let snap = T::tolerance();
        if p_plus < snap {
            p_plus = T::zero();
        } else if p_plus > T::one() - snap {
            p_plus = T::one();
        }
        let u: f64 = rng.random();
        let outcome = if T::lit(u) < p_plus { Sign::Plus } else { Sign::Minus };
        let prob = if outcome == Sign::Plus { p_plus } else { T::one() - p_plus };
        let scale = half / prob.sqrt();
        let s = T::lit(outcome.value() as f64);
        for (a, b) in self.amps.iter_mut().zip(image) {
            *a = (*a + b * s) * scale;
        }
        Ok(MeasurementRecord {
            observable: *op,
            outcome,
        })
    }

    /// With probability `p` per qubit in `qubits`, applies a uniformly random
    /// non-identity single-qubit Pauli.
    pub fn depolarize<R: Rng + ?Sized>(&mut self, qubits: Range<usize>, p: f64, rng: &mut R) {
        if p <= 0.0 {
            return;
        }
        for q in qubits {
            if rng.random::<f64>() < p {
                let bit = 1u64 << (self.n_qubits - 1 - q);
                let (x, z) = match rng.random_range(0..3) {
                    0 => (bit, 0),
                    1 => (bit, bit),
                    _ => (0, bit),
                };
                let err = PauliOperator::from_bits(self.n_qubits, x, z).expect("qubit in range");
                self.amps = self.pauli_image(&err);
            }
        }
    }
}

/// A reported measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub observable: PauliOperator,
    pub outcome: Sign,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Per qubit, per measured observable: chance of a random Pauli error
    /// just before the measurement.
    pub p_depolarize: f64,
    /// Chance each reported outcome is flipped.
    pub p_readout: f64,
}

impl NoiseParams {
    pub fn new(p_depolarize: f64, p_readout: f64) -> Result<Self> {
        let n = Self {
            p_depolarize,
            p_readout,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_depolarize", self.p_depolarize), ("p_readout", self.p_readout)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_depolarize == 0.0 && self.p_readout == 0.0
    }
}

/// Measures `ops` in order on `state`, injecting noise on `noisy_qubits`
/// before each measurement and flipping each reported outcome with the
/// readout probability.
pub fn measure_sequence<T: Real, R: Rng + ?Sized>(
    state: &mut StateVec<T>,
    ops: &[PauliOperator],
    noisy_qubits: Range<usize>,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>> {
    ops.iter()
        .map(|op| {
            state.depolarize(noisy_qubits.clone(), noise.p_depolarize, rng);
            let mut rec = state.measure(op, rng)?;
            if noise.p_readout > 0.0 && rng.random::<f64>() < noise.p_readout {
                rec.outcome = -rec.outcome;
            }
            Ok(rec)
        })
        .collect()
}

/// Sequential measurement of the three observables of one context.
pub fn measure_context<T: Real, R: Rng + ?Sized>(
    state: &mut StateVec<T>,
    ops: &[PauliOperator; 3],
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<[MeasurementRecord; 3]> {
    for i in 0..3 {
        for j in i + 1..3 {
            if !commutes(&ops[i], &ops[j])? {
                return Err(Error::NotALine(format!("{} and {} anticommute", ops[i], ops[j])));
            }
        }
    }
    let n = state.n_qubits();
    let recs = measure_sequence(state, ops, 0..n, noise, rng)?;
    Ok([recs[0], recs[1], recs[2]])
}

/// Measures line `line_id` of `geom` on `state`.
pub fn measure_line<T: Real, R: Rng + ?Sized>(
    state: &mut StateVec<T>,
    geom: &IncidenceGeometry,
    line_id: usize,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<[MeasurementRecord; 3]> {
    measure_context(state, &geom.line_operators(line_id), noise, rng)
}

/// `n` Bell pairs on `2n` qubits: party A holds qubits `0..n`, party B holds
/// `n..2n`, and pair `i` is `(i, n + i)`.
pub fn bell_resource<T: Real>(n: usize) -> Result<StateVec<T>> {
    ghz_resource(n, 2)
}

/// `n` GHZ blocks shared by `parties` parties: party `k` holds qubits
/// `k·n .. (k+1)·n` and block `i` is `(|0…0⟩ + |1…1⟩)/√2` on qubits
/// `i, n + i, …`. With two parties this is [`bell_resource`].
pub fn ghz_resource<T: Real>(n: usize, parties: usize) -> Result<StateVec<T>> {
    if n == 0 || parties < 2 {
        return Err(Error::Config("resource needs n ≥ 1 and at least 2 parties".into()));
    }
    let total = n * parties;
    check_qubits(total)?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << total];
    let amp = Complex::new(T::one() / T::lit((1u64 << n) as f64).sqrt(), T::zero());
    for block in 0..1usize << n {
        let index = (0..parties).fold(0usize, |acc, _| (acc << n) | block);
        amps[index] = amp;
    }
    Ok(StateVec {
        n_qubits: total,
        amps,
    })
}

/// The observable party B measures to stay correlated with party A's `op` on
/// a Bell resource: `op` itself, reported with sign `(-1)^{#Y}` (the
/// transpose of a Pauli picks up one sign per `Y`).
pub fn mirror_op(op: &PauliOperator) -> (PauliOperator, Sign) {
    (*op, Sign::from_bit(op.y_count() % 2 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVec::<f64>::zeros(1).unwrap();
        assert_eq!(zero.expectation(&p("Z")).unwrap(), 1.0);
        assert_eq!(zero.expectation(&p("X")).unwrap(), 0.0);
        let bell = bell_resource::<f64>(1).unwrap();
        assert!((bell.expectation(&p("XX")).unwrap() - 1.0).abs() < 1e-12);
        assert!((bell.expectation(&p("YY")).unwrap() + 1.0).abs() < 1e-12);
        assert!((bell.expectation(&p("ZZ")).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.expectation(&p("ZZ")).is_err());
    }

    #[test]
    fn bell_amplitudes() {
        let b = bell_resource::<f64>(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = b.amplitudes();
        assert!((a[0].re - h).abs() < 1e-15 && (a[3].re - h).abs() < 1e-15);
        assert_eq!(a[1].norm_sqr() + a[2].norm_sqr(), 0.0);
        let b2 = bell_resource::<f64>(2).unwrap();
        assert!((b2.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((b2.expectation(&p("XIXI")).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_basics() {
        let mut r = rng();
        let mut s = StateVec::<f64>::zeros(1).unwrap();
        for _ in 0..20 {
            assert_eq!(s.measure(&p("Z"), &mut r).unwrap().outcome, Sign::Plus);
        }
        let mut plus = 0;
        for _ in 0..2000 {
            let mut s = StateVec::<f64>::from_amplitudes(
                1,
                vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)],
            )
            .unwrap();
            let first = s.measure(&p("Z"), &mut r).unwrap().outcome;
            assert_eq!(s.measure(&p("Z"), &mut r).unwrap().outcome, first);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            plus += (first == Sign::Plus) as i32;
        }
        // 2000 fair coins: 5σ ≈ 112
        assert!((plus - 1000).abs() < 112, "{plus}");
        assert!(s.measure(&p("I"), &mut r).is_err());
    }

    #[test]
    fn context_product_is_state_independent() {
        let mut r = rng();
        let ops = [p("XIZ"), p("IXZ"), p("XXI")];
        for _ in 0..50 {
            let mut s = StateVec::<f64>::random(3, &mut r).unwrap();
            let recs = measure_context(&mut s, &ops, &NoiseParams::noiseless(), &mut r).unwrap();
            let prod = recs.iter().fold(Sign::Plus, |acc, m| acc * m.outcome);
            assert_eq!(prod, Sign::Plus);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let bad = [p("XII"), p("ZII"), p("YII")];
        let mut s = StateVec::<f64>::zeros(3).unwrap();
        assert!(matches!(
            measure_context(&mut s, &bad, &NoiseParams::noiseless(), &mut r),
            Err(Error::NotALine(_))
        ));
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror_op(&p("X")), (p("X"), Sign::Plus));
        assert_eq!(mirror_op(&p("Y")), (p("Y"), Sign::Minus));
        assert_eq!(mirror_op(&p("Z")), (p("Z"), Sign::Plus));
        assert_eq!(mirror_op(&p("YY")).1, Sign::Plus);
    }

    #[test]
    fn ghz_four_party_correlations() {
        let g = ghz_resource::<f64>(1, 4).unwrap();
        for s in ["XXXX", "YYYY", "ZZZZ", "ZZII"] {
            assert!((g.expectation(&p(s)).unwrap() - 1.0).abs() < 1e-12, "{s}");
        }
        assert!((g.expectation(&p("XXYY")).unwrap() + 1.0).abs() < 1e-12);
        assert!(ghz_resource::<f64>(4, 4).is_err());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseParams::new(0.1, 0.2).is_ok());
        assert!(NoiseParams::new(-0.1, 0.2).is_err());
        assert!(NoiseParams::new(0.1, 1.5).is_err());
    }

    #[test]
    fn single_precision_state() {
        let mut r = rng();
        let mut s = StateVec::<f32>::random(3, &mut r).unwrap();
        let ops = [p("ZZI"), p("IZZ"), p("ZIZ")];
        let recs = measure_context(&mut s, &ops, &NoiseParams::noiseless(), &mut r).unwrap();
        assert_eq!(recs.iter().fold(Sign::Plus, |a, m| a * m.outcome), Sign::Plus);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-5);
    }
}
