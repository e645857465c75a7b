//! Two-dimensional model of the modular data on test functions.
//!
//! Everything in this module lives in the complex span of a unit vector `phi`
//! and its modular conjugate `j phi`, which are orthonormal. The modular
//! scaling acts diagonally on that basis with eigenvalues (lambda, 1/lambda),
//! lambda strictly between 0 and 1. This is the exact spectral-window limit:
//! no residual window width appears anywhere.
//!
//! Conventions: the inner product is conjugate-linear in the first argument.
//! `j` is antilinear and swaps the basis vectors. The closure operator is
//! `s = j . delta_half` and its adjoint is `s_dagger = j . delta_half^{-1}`.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Element of the model space, with `a` the coefficient of `phi` and `b` the
/// coefficient of `j phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularVector {
    pub a: Complex64,
    pub b: Complex64,
}

impl ModularVector {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::ZERO, Complex64::ZERO)
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }
}

impl Add for ModularVector {
    type Output = ModularVector;
    fn add(self, rhs: ModularVector) -> ModularVector {
        ModularVector::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for ModularVector {
    type Output = ModularVector;
    fn sub(self, rhs: ModularVector) -> ModularVector {
        ModularVector::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for ModularVector {
    type Output = ModularVector;
    fn neg(self) -> ModularVector {
        ModularVector::new(-self.a, -self.b)
    }
}

impl Mul<ModularVector> for f64 {
    type Output = ModularVector;
    fn mul(self, v: ModularVector) -> ModularVector {
        ModularVector::new(self * v.a, self * v.b)
    }
}

impl Mul<ModularVector> for Complex64 {
    type Output = ModularVector;
    fn mul(self, v: ModularVector) -> ModularVector {
        ModularVector::new(self * v.a, self * v.b)
    }
}

/// Spectral parameter and the two free test-function amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParams {
    pub lambda: f64,
    pub eta: f64,
    pub eta_prime: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("lambda must lie strictly inside (0, 1), got {0}")]
    LambdaOutOfRange(f64),
}

impl ModularParams {
    /// Validates the spectral parameter. The endpoints are rejected rather
    /// than clamped: the inverse scaling diverges at 0, and 1 is a boundary
    /// an optimizer may approach but not attain.
    pub fn new(lambda: f64, eta: f64, eta_prime: f64) -> Result<Self, ModularError> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(ModularError::LambdaOutOfRange(lambda));
        }
        Ok(Self { lambda, eta, eta_prime })
    }
}

/// The four canonical test functions built from the parameters: Alice's pair
/// and their modular conjugates on Bob's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctions {
    pub f: ModularVector,
    pub f_prime: ModularVector,
    pub jf: ModularVector,
    pub jf_prime: ModularVector,
}

/// Inner product, conjugate-linear in the first argument.
pub fn inner(u: &ModularVector, v: &ModularVector) -> Complex64 {
    u.a.conj() * v.a + u.b.conj() * v.b
}

/// The antilinear modular conjugation: swaps the basis coefficients and
/// conjugates them.
pub fn apply_j(v: &ModularVector) -> ModularVector {
    ModularVector::new(v.b.conj(), v.a.conj())
}

/// The positive square root of the modular operator, acting diagonally with
/// eigenvalues (lambda, 1/lambda).
pub fn apply_delta_half(v: &ModularVector, params: &ModularParams) -> ModularVector {
    ModularVector::new(params.lambda * v.a, v.b / params.lambda)
}

/// The closure operator `s = j . delta_half` (antilinear).
pub fn apply_s(v: &ModularVector, params: &ModularParams) -> ModularVector {
    apply_j(&apply_delta_half(v, params))
}

/// The adjoint closure `s_dagger = j . delta_half^{-1}` (antilinear).
pub fn apply_s_dagger(v: &ModularVector, params: &ModularParams) -> ModularVector {
    let inv = ModularVector::new(v.a / params.lambda, params.lambda * v.b);
    apply_j(&inv)
}

/// Builds the canonical test functions
/// `f = eta (phi + lambda j phi)` and `f' = i eta' (phi - lambda j phi)`,
/// together with their images under `j`. Both are fixed by `s`, and their
/// conjugates are fixed by `s_dagger`.
pub fn build_test_functions(params: &ModularParams) -> TestFunctions {
    let l = params.lambda;
    let e = params.eta;
    let ep = params.eta_prime;
    let f = ModularVector::new(Complex64::new(e, 0.0), Complex64::new(e * l, 0.0));
    let f_prime = ModularVector::new(Complex64::new(0.0, ep), Complex64::new(0.0, -ep * l));
    TestFunctions {
        f,
        f_prime,
        jf: apply_j(&f),
        jf_prime: apply_j(&f_prime),
    }
}

/// The symplectic (commutator) form `2 Im <u|v>`. Vanishing of this form
/// between two families of test functions is what lets the corresponding Weyl
/// operators commute.
pub fn pauli_jordan_form(u: &ModularVector, v: &ModularVector) -> f64 {
    2.0 * inner(u, v).im
}
