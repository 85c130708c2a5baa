//! Dense complex-matrix reference for Pauli strings. Deliberately naive: it
//! knows nothing about bit vectors, only the four 2×2 matrices and Kronecker
//! products, with the leftmost letter as the most significant tensor factor.
#![allow(dead_code)]

use num_complex::Complex;

pub type C = Complex<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C>,
}

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

pub fn letter(ch: char) -> Mat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let data = match ch {
        'I' => vec![o, z, z, o],
        'X' => vec![z, o, o, z],
        'Y' => vec![z, -i, i, z],
        'Z' => vec![o, z, z, -o],
        _ => panic!("bad letter {ch}"),
    };
    Mat { dim: 2, data }
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let dim = a.dim * b.dim;
    let mut data = vec![c(0.0, 0.0); dim * dim];
    for ar in 0..a.dim {
        for ac in 0..a.dim {
            for br in 0..b.dim {
                for bc in 0..b.dim {
                    data[(ar * b.dim + br) * dim + ac * b.dim + bc] = a.data[ar * a.dim + ac] * b.data[br * b.dim + bc];
                }
            }
        }
    }
    Mat { dim, data }
}

pub fn pauli(s: &str) -> Mat {
    let mut chars = s.chars();
    let mut m = letter(chars.next().expect("non-empty"));
    for ch in chars {
        m = kron(&m, &letter(ch));
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.dim;
    let mut data = vec![c(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let x = a.data[r * d + k];
            if x == c(0.0, 0.0) {
                continue;
            }
            for col in 0..d {
                data[r * d + col] += x * b.data[k * d + col];
            }
        }
    }
    Mat { dim: d, data }
}

pub fn scale(a: &Mat, s: C) -> Mat {
    Mat {
        dim: a.dim,
        data: a.data.iter().map(|x| x * s).collect(),
    }
}

pub fn close(a: &Mat, b: &Mat) -> bool {
    a.dim == b.dim && a.data.iter().zip(&b.data).all(|(x, y)| (x - y).norm() < 1e-12)
}

/// `k` with `m = i^k · p`, if any.
pub fn phase_between(m: &Mat, p: &Mat) -> Option<u8> {
    let mut unit = c(1.0, 0.0);
    for k in 0..4u8 {
        if close(m, &scale(p, unit)) {
            return Some(k);
        }
        unit *= c(0.0, 1.0);
    }
    None
}

pub fn commute(a: &Mat, b: &Mat) -> bool {
    close(&mul(a, b), &mul(b, a))
}

/// `s` with `a · b · c = s · I`, if the product is ±identity.
pub fn triple_sign(a: &str, b: &str, c3: &str) -> Option<i8> {
    let m = mul(&mul(&pauli(a), &pauli(b)), &pauli(c3));
    let id = pauli(&"I".repeat(a.len()));
    match phase_between(&m, &id)? {
        0 => Some(1),
        2 => Some(-1),
        _ => None,
    }
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    (0..m.dim)
        .map(|r| (0..m.dim).map(|k| m.data[r * m.dim + k] * v[k]).sum())
        .collect()
}

/// `⟨v|m|v⟩`.
pub fn expectation(m: &Mat, v: &[C]) -> C {
    apply(m, v).iter().zip(v).map(|(a, b)| b.conj() * a).sum()
}

/// Every length-`n` string over `IXYZ`, identity first.
pub fn all_strings(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|s| "IXYZ".chars().map(move |ch| format!("{s}{ch}")))
            .collect();
    }
    out
}

pub fn y_count(s: &str) -> usize {
    s.chars().filter(|&ch| ch == 'Y').count()
}
