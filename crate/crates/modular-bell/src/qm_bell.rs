//! Spin-1/2 singlet reference for the CHSH inequality.
//!
//! Matrix conventions: the qubit basis is ordered (|+>, |->), operators are
//! 2x2 complex matrices stored row-major, and the singlet is the explicit
//! 4-vector (0, 1, -1, 0)/sqrt(2) in the product basis ordered
//! (++, +-, -+, --).

use num_complex::Complex64;

/// The four measurement angles, Alice's pair first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellAngles {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// 2x2 complex matrix acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOperator {
    pub entries: [[Complex64; 2]; 2],
}

impl SpinOperator {
    pub fn matmul(&self, rhs: &SpinOperator) -> SpinOperator {
        let mut out = [[Complex64::ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.entries[i][0] * rhs.entries[0][j]
                    + self.entries[i][1] * rhs.entries[1][j];
            }
        }
        SpinOperator { entries: out }
    }

    pub fn dagger(&self) -> SpinOperator {
        let e = &self.entries;
        SpinOperator {
            entries: [
                [e[0][0].conj(), e[1][0].conj()],
                [e[0][1].conj(), e[1][1].conj()],
            ],
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dagger();
        self.entries
            .iter()
            .flatten()
            .zip(d.entries.iter().flatten())
            .all(|(x, y)| (x - y).norm() <= tol)
    }

    pub fn is_dichotomic(&self, tol: f64) -> bool {
        let sq = self.matmul(self);
        let id = [[Complex64::ONE, Complex64::ZERO], [Complex64::ZERO, Complex64::ONE]];
        sq.entries
            .iter()
            .flatten()
            .zip(id.iter().flatten())
            .all(|(x, y)| (x - y).norm() <= tol)
    }
}

/// Measurement operator at the given angle: zero diagonal, off-diagonal
/// phases e^{-i theta} (upper) and e^{i theta} (lower). The same matrix form
/// serves both parties; the party tag records which tensor slot it acts on.
pub fn build_bell_operator(angle: f64, _party: Party) -> SpinOperator {
    let ph = Complex64::from_polar(1.0, angle);
    SpinOperator {
        entries: [[Complex64::ZERO, ph.conj()], [ph, Complex64::ZERO]],
    }
}

/// The same operator obtained by conjugating the reference flip with the
/// diagonal unitary U = diag(1, e^{-i theta}): returns U^dag A0 U.
pub fn conjugate_by_unitary(angle: f64, party: Party) -> SpinOperator {
    let a0 = build_bell_operator(0.0, party);
    let u = SpinOperator {
        entries: [
            [Complex64::ONE, Complex64::ZERO],
            [Complex64::ZERO, Complex64::from_polar(1.0, -angle)],
        ],
    };
    u.dagger().matmul(&a0).matmul(&u)
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Expectation of A(alpha) (x) B(beta) in the singlet state, computed by the
/// explicit tensor-product action on the 4-vector. Equals -cos(alpha - beta).
pub fn singlet_correlator(alpha: f64, beta: f64) -> f64 {
    let a = build_bell_operator(alpha, Party::Alice);
    let b = build_bell_operator(beta, Party::Bob);
    let psi = [
        Complex64::ZERO,
        Complex64::new(INV_SQRT2, 0.0),
        Complex64::new(-INV_SQRT2, 0.0),
        Complex64::ZERO,
    ];
    // (A (x) B) psi, indices (i, j) flattened as 2*i + j.
    let mut out = [Complex64::ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::ZERO;
            for ip in 0..2 {
                for jp in 0..2 {
                    acc += a.entries[i][ip] * b.entries[j][jp] * psi[2 * ip + jp];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    let mut val = Complex64::ZERO;
    for (c, o) in psi.iter().zip(out.iter()) {
        val += c.conj() * o;
    }
    val.re
}

/// Singlet expectation of (A + A') (x) B + (A - A') (x) B'.
pub fn chsh_value(angles: BellAngles) -> f64 {
    singlet_correlator(angles.alpha, angles.beta)
        + singlet_correlator(angles.alpha_prime, angles.beta)
        + singlet_correlator(angles.alpha, angles.beta_prime)
        - singlet_correlator(angles.alpha_prime, angles.beta_prime)
}
