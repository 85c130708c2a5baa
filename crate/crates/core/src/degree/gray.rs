//! Minimum-weight coset search by Gray-code enumeration.
//!
//! Given generator vectors `g_0 .. g_{n-1}` and a target `t` (all line masks),
//! finds the subset `S` minimising `popcount(t ⊕ Σ_{i∈S} g_i)`. Consecutive
//! Gray codes differ in one generator, so each step is one XOR and one
//! popcount. The top bits of the subset index are fixed per partition and the
//! partitions run in parallel.

use rayon::prelude::*;

/// Line masks wider than this are not handled by the exhaustive engines.
pub const MAX_WORDS: usize = 5;

/// Best weight and the subset (bit `i` set ⇔ generator `i` used) attaining
/// it. Ties resolve to the first subset in enumeration order.
pub fn min_weight_coset(generators: &[Vec<u64>], target: &[u64]) -> (u32, u64) {
    let words = target.len();
    assert!(words <= MAX_WORDS, "line mask too wide");
    assert!(generators.iter().all(|g| g.len() == words));
    match words {
        0 => (0, 0),
        1 => run::<1>(generators, target),
        2 => run::<2>(generators, target),
        3 => run::<3>(generators, target),
        4 => run::<4>(generators, target),
        _ => run::<5>(generators, target),
    }
}

fn to_array<const W: usize>(v: &[u64]) -> [u64; W] {
    let mut out = [0u64; W];
    out.copy_from_slice(v);
    out
}

#[inline]
fn weight<const W: usize>(v: &[u64; W]) -> u32 {
    v.iter().map(|w| w.count_ones()).sum()
}

fn run<const W: usize>(generators: &[Vec<u64>], target: &[u64]) -> (u32, u64) {
    let n = generators.len();
    assert!(n < 64, "subset index must fit in 64 bits");
    let gens: Vec<[u64; W]> = generators.iter().map(|g| to_array(g)).collect();
    let target: [u64; W] = to_array(target);

    let high = n.saturating_sub(18).min(8);
    let low = n - high;
    (0..1u64 << high)
        .into_par_iter()
        .map(|part| {
            let mut cur = target;
            for h in 0..high {
                if part >> h & 1 == 1 {
                    xor_into(&mut cur, &gens[low + h]);
                }
            }
            let (best, k) = gray_scan(&gens[..low], cur);
            (best, (part << low) | (k ^ (k >> 1)))
        })
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .unwrap_or((weight(&target), 0))
}

#[inline]
fn xor_into<const W: usize>(acc: &mut [u64; W], g: &[u64; W]) {
    for (a, b) in acc.iter_mut().zip(g) {
        *a ^= b;
    }
}

/// Returns the best weight and the Gray step `k` at which it was first seen.
fn gray_scan<const W: usize>(gens: &[[u64; W]], mut cur: [u64; W]) -> (u32, u64) {
    let mut best = weight(&cur);
    let mut best_k = 0u64;
    if best == 0 {
        return (0, 0);
    }
    for k in 1..1u64 << gens.len() {
        xor_into(&mut cur, &gens[k.trailing_zeros() as usize]);
        let w = weight(&cur);
        if w < best {
            best = w;
            best_k = k;
            if w == 0 {
                break;
            }
        }
    }
    (best, best_k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(generators: &[Vec<u64>], target: &[u64]) -> u32 {
        (0..1u64 << generators.len())
            .map(|s| {
                let mut v = target.to_vec();
                for (i, g) in generators.iter().enumerate() {
                    if s >> i & 1 == 1 {
                        for (a, b) in v.iter_mut().zip(g) {
                            *a ^= b;
                        }
                    }
                }
                v.iter().map(|w| w.count_ones()).sum()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for words in 1..=3 {
            for n in [0usize, 1, 5, 12, 20] {
                let gens: Vec<Vec<u64>> =
                    (0..n).map(|_| (0..words).map(|_| rng.random()).collect()).collect();
                let target: Vec<u64> = (0..words).map(|_| rng.random()).collect();
                let (w, subset) = min_weight_coset(&gens, &target);
                assert_eq!(w, brute(&gens, &target));
                let mut v = target.clone();
                for (i, g) in gens.iter().enumerate() {
                    if subset >> i & 1 == 1 {
                        for (a, b) in v.iter_mut().zip(g) {
                            *a ^= b;
                        }
                    }
                }
                assert_eq!(v.iter().map(|x| x.count_ones()).sum::<u32>(), w);
            }
        }
    }
}
