//! Shared test support: a truncated two-mode Fock-space oracle for Weyl
//! words, plus seeded random draws used by several suites.
//!
//! The oracle represents each Weyl factor exp(i field(h)) as a dense matrix
//! exponential on (C^{N+1})^{⊗2} and applies words factor by factor to the
//! vacuum, collapsing onto |0,0> at every projector insertion. It shares no
//! code with the Gaussian engine under test beyond the vector type.

#![allow(dead_code)]

use modular_bell::modular_space::ModularVector;
use modular_bell::weyl_engine::{VacuumWord, WeylFactor};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense square complex matrix, row-major.
#[derive(Clone)]
pub struct FockMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl FockMatrix {
    fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    fn mul(&self, other: &FockMatrix) -> FockMatrix {
        let n = self.dim;
        let mut out = FockMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Right-multiplication by the transpose of `other`, used to apply the
    /// second mode's factor to a state matrix.
    fn mul_transpose(&self, other: &FockMatrix) -> FockMatrix {
        let n = self.dim;
        let mut out = FockMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += self.data[i * n + k] * other.data[j * n + k];
                }
                out.data[i * n + j] = acc;
            }
        }
        out
    }

    fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    fn one_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// exp(X) by scaling and squaring with a Taylor series on the scaled matrix.
/// The scaled norm is kept below 1/2, where 24 terms leave a remainder far
/// under f64 resolution even after the squarings.
fn expm(x: &FockMatrix) -> FockMatrix {
    let norm = x.one_norm();
    let squarings = if norm <= 0.5 { 0 } else { (norm / 0.5).log2().ceil() as u32 };
    let mut scaled = x.clone();
    scaled.scale(0.5f64.powi(squarings as i32));

    let mut result = FockMatrix::identity(x.dim);
    let mut term = FockMatrix::identity(x.dim);
    for k in 1..=24 {
        term = term.mul(&scaled);
        term.scale(1.0 / k as f64);
        for (r, t) in result.data.iter_mut().zip(&term.data) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

/// Single-mode Weyl factor exp(i h a† + i conj(h) a) truncated at occupation
/// `n_max`.
fn weyl_mode_matrix(h: Complex64, n_max: usize) -> FockMatrix {
    let dim = n_max + 1;
    let mut x = FockMatrix::zeros(dim);
    for n in 0..n_max {
        let c = ((n + 1) as f64).sqrt();
        x.set(n + 1, n, Complex64::i() * h * c);
        x.set(n, n + 1, Complex64::i() * h.conj() * c);
    }
    expm(&x)
}

/// Vacuum expectation of a word, evaluated entirely in the truncated Fock
/// space. The state is a coefficient matrix V with |psi> = sum V[n1][n2]
/// |n1>|n2>; a two-mode factor W1 ⊗ W2 acts as V -> W1 · V · W2^T, and a
/// projector insertion collapses V to V[0][0] |0,0>.
pub fn fock_word_expectation(w: &VacuumWord, n_max: usize) -> Complex64 {
    let dim = n_max + 1;
    let mut v = FockMatrix::zeros(dim);
    v.set(0, 0, Complex64::ONE);
    for (count, seg) in w.segments.iter().rev().enumerate() {
        if count > 0 {
            let amp = v.at(0, 0);
            v = FockMatrix::zeros(dim);
            v.set(0, 0, amp);
        }
        for factor in seg.iter().rev() {
            let m0 = weyl_mode_matrix(factor.h.a, n_max);
            let m1 = weyl_mode_matrix(factor.h.b, n_max);
            v = m0.mul(&v).mul_transpose(&m1);
        }
    }
    v.at(0, 0)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vector with each component's real and imaginary parts uniform in
/// [-scale, scale]; the norm is bounded by 2 scale.
pub fn random_vector(rng: &mut ChaCha8Rng, scale: f64) -> ModularVector {
    let part = |r: &mut ChaCha8Rng| r.gen_range(-scale..=scale);
    ModularVector::new(
        Complex64::new(part(rng), part(rng)),
        Complex64::new(part(rng), part(rng)),
    )
}

/// Word with 1..=3 segments of 0..=3 factors each, every factor bounded by
/// norm 1.5 so the N = 32 truncation stays far from saturation.
pub fn random_word(rng: &mut ChaCha8Rng) -> VacuumWord {
    let n_segments = rng.gen_range(1..=3);
    let segments = (0..n_segments)
        .map(|_| {
            let n_factors = rng.gen_range(0..=3);
            (0..n_factors)
                .map(|_| WeylFactor { h: random_vector(rng, 0.75) })
                .collect()
        })
        .collect();
    VacuumWord::new(segments)
}
