//! Vacuum expectations of Weyl-operator words.
//!
//! A Weyl factor is exp(i field(h)) for a test function h in the model space.
//! Products of factors have Gaussian vacuum expectations; inserting vacuum
//! projectors between factors makes the expectation factorize across the
//! segments. That is all the machinery the correlator formulas need, and it
//! is checked independently against a truncated Fock-space oracle in the
//! test suite.

use crate::modular_space::{inner, pauli_jordan_form, ModularVector};
use num_complex::Complex64;

/// One exponentiated smeared field, exp(i field(h)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylFactor {
    pub h: ModularVector,
}

/// Product of Weyl factors with vacuum projectors between consecutive
/// segments. A word with one segment is a plain operator product; an empty
/// segment is a bare projector insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumWord {
    pub segments: Vec<Vec<WeylFactor>>,
}

impl VacuumWord {
    pub fn new(segments: Vec<Vec<WeylFactor>>) -> Self {
        assert!(!segments.is_empty(), "a vacuum word needs at least one segment");
        Self { segments }
    }
}

/// Vacuum expectation of a product of Weyl factors:
/// exp(-(i/2) sum_{i<j} pj(h_i, h_j)) * exp(-1/2 |sum_i h_i|^2).
pub fn weyl_string_expectation(hs: &[ModularVector]) -> Complex64 {
    let mut phase = 0.0;
    for i in 0..hs.len() {
        for j in (i + 1)..hs.len() {
            phase += pauli_jordan_form(&hs[i], &hs[j]);
        }
    }
    let total = hs
        .iter()
        .fold(ModularVector::zero(), |acc, h| acc + *h);
    let gauss = (-0.5 * total.norm_sq()).exp();
    gauss * Complex64::from_polar(1.0, -0.5 * phase)
}

/// Vacuum expectation of a full word: the projector insertions factorize the
/// expectation into a product over segments.
pub fn vacuum_word_expectation(w: &VacuumWord) -> Complex64 {
    w.segments
        .iter()
        .map(|seg| {
            let hs: Vec<ModularVector> = seg.iter().map(|f| f.h).collect();
            weyl_string_expectation(&hs)
        })
        .product()
}

/// Test function of a projector conjugated by the two-parameter unitary
/// family: (1 + c1) f + c2 f_prime. The conjugated projector is again a
/// Weyl-dressed vacuum projector with this combination as its exponent.
pub fn dressed_vector(
    f: &ModularVector,
    f_prime: &ModularVector,
    c1: f64,
    c2: f64,
) -> ModularVector {
    (1.0 + c1) * *f + c2 * *f_prime
}

/// Expectation of the product of an Alice projector (exponent F) and a Bob
/// projector (exponent G), as the three-segment word [[-F], [F, G], [-G]]:
/// exp(-1/2 |F|^2 - 1/2 |F+G|^2 - 1/2 |G|^2) times the commutator phase of
/// the middle segment. For commuting sides the phase is absent and the value
/// is the Gaussian product itself.
pub fn projector_pair_expectation(big_f: &ModularVector, big_g: &ModularVector) -> f64 {
    let nf = big_f.norm_sq();
    let ng = big_g.norm_sq();
    let cross = inner(big_f, big_g);
    let nfg = nf + ng + 2.0 * cross.re;
    let gauss = (-0.5 * (nf + nfg + ng)).exp();
    let phase = pauli_jordan_form(big_f, big_g);
    gauss * (0.5 * phase).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_space::{build_test_functions, ModularParams};

    fn tf(l: f64, e: f64, ep: f64) -> crate::modular_space::TestFunctions {
        build_test_functions(&ModularParams::new(l, e, ep).unwrap())
    }

    #[test]
    fn single_factor_gaussian() {
        let v = ModularVector::new(Complex64::ONE, Complex64::ONE);
        let got = weyl_string_expectation(&[v]);
        assert!((got.re - (-1.0f64).exp()).abs() < 1e-15);
        assert!(got.im == 0.0);
    }

    #[test]
    fn empty_string_is_identity() {
        assert_eq!(weyl_string_expectation(&[]), Complex64::ONE);
    }

    #[test]
    fn commuting_pair_is_phase_free() {
        let t = tf(0.6, 1.2, 0.4);
        let got = weyl_string_expectation(&[t.f, t.jf]);
        let expect = (-0.5 * (t.f + t.jf).norm_sq()).exp();
        assert!((got.re - expect).abs() < 1e-15);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn word_with_only_projector() {
        let w = VacuumWord::new(vec![vec![]]);
        assert_eq!(vacuum_word_expectation(&w), Complex64::ONE);
    }

    #[test]
    fn projector_word_matches_closed_form() {
        let t = tf(0.55, 0.9, 0.3);
        let w = VacuumWord::new(vec![
            vec![WeylFactor { h: t.f }],
            vec![WeylFactor { h: t.f + t.jf }],
            vec![WeylFactor { h: t.jf }],
        ]);
        let l = 0.55f64;
        let e = 0.9f64;
        let expect = (-2.0 * e * e * ((1.0 + l * l) + l)).exp();
        let got = vacuum_word_expectation(&w);
        assert!((got.re - expect).abs() < 1e-15);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn dressing_degenerate_cases() {
        let t = tf(0.5, 1.0, 2.0);
        assert_eq!(dressed_vector(&t.f, &t.f_prime, 0.0, 0.0), t.f);
        let collapsed = dressed_vector(&t.f, &t.f_prime, -1.0, 0.0);
        assert_eq!(collapsed, ModularVector::zero());
    }

    #[test]
    fn projector_pair_examples() {
        let l = 0.62;
        let e = 1.1;
        let ep = 0.45;
        let t = tf(l, e, ep);
        assert!((projector_pair_expectation(&ModularVector::zero(), &ModularVector::zero()) - 1.0).abs() < 1e-15);

        let got = projector_pair_expectation(&t.f, &t.jf);
        let expect = (-2.0 * e * e * ((1.0 + l * l) + l)).exp();
        assert!((got - expect).abs() < 1e-15);

        let got = projector_pair_expectation(&t.f_prime, &t.jf);
        let expect = (-(1.0 + l * l) * (e * e + ep * ep)).exp();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn pair_expectation_matches_word_path() {
        let t = tf(0.71, 0.8, 1.3);
        for (cf, cg) in [(0.3, -0.7), (1.1, 0.2), (-0.4, 0.9)] {
            let big_f = dressed_vector(&t.f, &t.f_prime, cf, cg);
            let big_g = dressed_vector(&t.jf, &t.jf_prime, cg, cf);
            let w = VacuumWord::new(vec![
                vec![WeylFactor { h: -big_f }],
                vec![WeylFactor { h: big_f + big_g }],
                vec![WeylFactor { h: -big_g }],
            ]);
            let via_word = vacuum_word_expectation(&w);
            let direct = projector_pair_expectation(&big_f, &big_g);
            assert!((via_word.re - direct).abs() < 1e-15);
            assert!(via_word.im.abs() < 1e-15);
        }
    }

    #[test]
    fn word_hermiticity() {
        let t = tf(0.37, 1.4, -0.6);
        let word = VacuumWord::new(vec![
            vec![WeylFactor { h: t.f }, WeylFactor { h: Complex64::i() * t.f_prime }],
            vec![WeylFactor { h: t.jf + t.f }],
        ]);
        let mut reversed_segments: Vec<Vec<WeylFactor>> = word
            .segments
            .iter()
            .rev()
            .map(|seg| seg.iter().rev().map(|w| WeylFactor { h: -w.h }).collect())
            .collect();
        let adjoint = VacuumWord::new(std::mem::take(&mut reversed_segments));
        let a = vacuum_word_expectation(&word);
        let b = vacuum_word_expectation(&adjoint);
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn projector_idempotence_at_word_level() {
        let t = tf(0.44, 0.7, 0.9);
        let f = t.f;
        let single = VacuumWord::new(vec![vec![WeylFactor { h: -f }], vec![WeylFactor { h: f }]]);
        let doubled = VacuumWord::new(vec![
            vec![WeylFactor { h: -f }],
            vec![WeylFactor { h: f }, WeylFactor { h: -f }],
            vec![WeylFactor { h: f }],
        ]);
        let a = vacuum_word_expectation(&single);
        let b = vacuum_word_expectation(&doubled);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn projectors_commute_in_vacuum() {
        let t = tf(0.58, 1.05, 0.77);
        for x in [t.f, t.f_prime] {
            for y in [t.jf, t.jf_prime] {
                let ab = VacuumWord::new(vec![
                    vec![WeylFactor { h: -x }],
                    vec![WeylFactor { h: x }, WeylFactor { h: y }],
                    vec![WeylFactor { h: -y }],
                ]);
                let ba = VacuumWord::new(vec![
                    vec![WeylFactor { h: y }],
                    vec![WeylFactor { h: -y }, WeylFactor { h: -x }],
                    vec![WeylFactor { h: x }],
                ]);
                let d = vacuum_word_expectation(&ab) - vacuum_word_expectation(&ba);
                assert!(d.norm() < 1e-14);
            }
        }
    }
}
