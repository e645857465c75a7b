//! Bell-CHSH correlators for free scalar and Proca fields in 1+1 dimensions.
//!
//! The library has three layers. `qm_bell` is the finite-dimensional spin
//! reference: singlet correlators and the CHSH combination. `modular_space`,
//! `weyl_engine`, and `chsh_qft` build the field-theory side: a two-dimensional
//! model of the modular data on test functions, vacuum expectations of Weyl
//! operator words, and closed forms for the CHSH correlator with optional
//! unitary dressing. `kernels` and `proca` validate the construction from
//! position space: Pauli-Jordan and Hadamard kernels with compactly supported
//! smearing functions, microcausality checks, and the reduction of the Proca
//! inner product to the scalar one on transverse test functions. `optimizer`
//! supplies the deterministic multistart simplex search used to maximize the
//! correlators.

pub mod chsh_qft;
pub mod kernels;
pub mod modular_space;
pub mod optimizer;
pub mod proca;
pub mod qm_bell;
pub mod weyl_engine;
