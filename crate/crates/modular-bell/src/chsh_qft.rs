//! The vacuum CHSH correlator of the free scalar field.
//!
//! Alice's dichotomic operators are 1 - 2P with P a Weyl-dressed vacuum
//! projector built from the test functions f and f'; Bob's use the modular
//! conjugates. The correlator assembles to
//! chsh = 2 + 4 script_p - 4 p_a - 4 p_b, where script_p collects the four
//! projector pair expectations and p_a, p_b are the unprimed singles (the
//! primed singles cancel in the CHSH combination). An optional unitary
//! dressing shifts the projector exponents by linear combinations of the
//! test functions without leaving this family.

use crate::modular_space::{build_test_functions, ModularError, ModularParams, ModularVector};
use crate::weyl_engine::{dressed_vector, projector_pair_expectation};

/// The eight dressing parameters: (alpha, beta) deform Alice's first
/// operator, (alpha_prime, beta_prime) her second, and (sigma, tau),
/// (sigma_prime, tau_prime) do the same on Bob's side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UnitaryParams {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    pub sigma: f64,
    pub tau: f64,
    pub sigma_prime: f64,
    pub tau_prime: f64,
}

impl UnitaryParams {
    pub fn zeros() -> Self {
        Self::default()
    }

    /// True when no dressing is applied at all.
    pub fn is_zero(&self) -> bool {
        [
            self.alpha,
            self.beta,
            self.alpha_prime,
            self.beta_prime,
            self.sigma,
            self.tau,
            self.sigma_prime,
            self.tau_prime,
        ]
        .iter()
        .all(|&v| v == 0.0)
    }
}

/// Every intermediate expectation entering the correlator, so disagreements
/// between evaluation paths can be localized term by term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorBreakdown {
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    pub p_apb: f64,
    pub p_abp: f64,
    pub p_apbp: f64,
    pub script_p: f64,
    pub chsh: f64,
}

fn check(params: &ModularParams) -> Result<(), ModularError> {
    if !(params.lambda > 0.0 && params.lambda < 1.0) {
        return Err(ModularError::LambdaOutOfRange(params.lambda));
    }
    Ok(())
}

/// Closed form of the projector correlation
/// (P_A + P_A') P_B + (P_A - P_A') P_B' in the vacuum.
pub fn script_p(params: &ModularParams) -> Result<f64, ModularError> {
    check(params)?;
    let l2 = params.lambda * params.lambda;
    let e2 = params.eta * params.eta;
    let ep2 = params.eta_prime * params.eta_prime;
    let t_ab = (-2.0 * e2 * ((1.0 + l2) + params.lambda)).exp();
    let t_cross = (-(1.0 + l2) * (e2 + ep2)).exp();
    let t_apbp = (-2.0 * ep2 * ((1.0 + l2) + params.lambda)).exp();
    Ok(t_ab + 2.0 * t_cross - t_apbp)
}

/// CHSH correlator with bare projectors, via the closed exponential forms.
pub fn chsh_base(params: &ModularParams) -> Result<CorrelatorBreakdown, ModularError> {
    check(params)?;
    let l2 = params.lambda * params.lambda;
    let e2 = params.eta * params.eta;
    let ep2 = params.eta_prime * params.eta_prime;
    let p_ab = (-2.0 * e2 * ((1.0 + l2) + params.lambda)).exp();
    let p_cross = (-(1.0 + l2) * (e2 + ep2)).exp();
    let p_apbp = (-2.0 * ep2 * ((1.0 + l2) + params.lambda)).exp();
    let p_single = (-e2 * (1.0 + l2)).exp();
    let script = p_ab + 2.0 * p_cross - p_apbp;
    Ok(CorrelatorBreakdown {
        p_a: p_single,
        p_b: p_single,
        p_ab,
        p_apb: p_cross,
        p_abp: p_cross,
        p_apbp,
        script_p: script,
        chsh: 2.0 + 4.0 * script - 8.0 * p_single,
    })
}

/// CHSH correlator with unitarily dressed projectors. The dressed exponents
/// are F_A = (1+alpha) f + beta f', F_A' = (1+alpha') f' + beta' f, and the
/// analogous combinations of jf, jf' on Bob's side. All zeros reproduces the
/// bare correlator.
pub fn chsh_unitary(
    params: &ModularParams,
    u: &UnitaryParams,
) -> Result<CorrelatorBreakdown, ModularError> {
    check(params)?;
    let tf = build_test_functions(params);
    let f_a = dressed_vector(&tf.f, &tf.f_prime, u.alpha, u.beta);
    let f_ap = dressed_vector(&tf.f_prime, &tf.f, u.alpha_prime, u.beta_prime);
    let g_b = dressed_vector(&tf.jf, &tf.jf_prime, u.sigma, u.tau);
    let g_bp = dressed_vector(&tf.jf_prime, &tf.jf, u.sigma_prime, u.tau_prime);
    Ok(assemble(&f_a, &f_ap, &g_b, &g_bp))
}

fn assemble(
    f_a: &ModularVector,
    f_ap: &ModularVector,
    g_b: &ModularVector,
    g_bp: &ModularVector,
) -> CorrelatorBreakdown {
    let p_a = (-f_a.norm_sq()).exp();
    let p_b = (-g_b.norm_sq()).exp();
    let p_ab = projector_pair_expectation(f_a, g_b);
    let p_apb = projector_pair_expectation(f_ap, g_b);
    let p_abp = projector_pair_expectation(f_a, g_bp);
    let p_apbp = projector_pair_expectation(f_ap, g_bp);
    let script = p_ab + p_apb + p_abp - p_apbp;
    CorrelatorBreakdown {
        p_a,
        p_b,
        p_ab,
        p_apb,
        p_abp,
        p_apbp,
        script_p: script,
        chsh: 2.0 + 4.0 * script - 4.0 * p_a - 4.0 * p_b,
    }
}

/// Which base parameter a surface axis sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceAxis {
    Lambda,
    Eta,
    EtaPrime,
}

impl SurfaceAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceAxis::Lambda => "lambda",
            SurfaceAxis::Eta => "eta",
            SurfaceAxis::EtaPrime => "eta_prime",
        }
    }
}

/// Sampling specification for one surface axis: `n` evenly spaced values
/// from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: SurfaceAxis,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn value_at(&self, i: usize) -> f64 {
        if self.n == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * (i as f64) / ((self.n - 1) as f64)
    }
}

/// Rectangular grid of chsh values; `values[i * axis2.n + j]` corresponds to
/// (axis1.value_at(i), axis2.value_at(j)).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub values: Vec<f64>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("surface axes must differ")]
    DuplicateAxes,
    #[error("axis resolution must be at least 1, got {0}")]
    BadResolution(usize),
    #[error("axis range for {axis} is invalid: [{lo}, {hi}]")]
    BadRange { axis: &'static str, lo: f64, hi: f64 },
    #[error(transparent)]
    Domain(#[from] ModularError),
}

/// Sweeps two of the three base parameters over a rectangular grid, holding
/// the remaining one at its value in `fixed`, and records chsh everywhere.
pub fn surface_grid(
    axis1: &AxisSpec,
    axis2: &AxisSpec,
    fixed: &ModularParams,
    u: &UnitaryParams,
) -> Result<SurfaceGrid, SurfaceError> {
    if axis1.axis == axis2.axis {
        return Err(SurfaceError::DuplicateAxes);
    }
    for ax in [axis1, axis2] {
        if ax.n == 0 {
            return Err(SurfaceError::BadResolution(ax.n));
        }
        if !(ax.lo.is_finite() && ax.hi.is_finite()) || ax.lo > ax.hi {
            return Err(SurfaceError::BadRange { axis: ax.axis.name(), lo: ax.lo, hi: ax.hi });
        }
        if ax.axis == SurfaceAxis::Lambda && !(ax.lo > 0.0 && ax.hi < 1.0) {
            return Err(SurfaceError::BadRange { axis: ax.axis.name(), lo: ax.lo, hi: ax.hi });
        }
    }
    // Undressed surfaces go through the closed form: identical analytically,
    // cheaper, and bitwise stable against the general assembly path.
    let plain = u.is_zero();
    let mut values = Vec::with_capacity(axis1.n * axis2.n);
    for i in 0..axis1.n {
        for j in 0..axis2.n {
            let mut p = *fixed;
            set_axis(&mut p, axis1.axis, axis1.value_at(i));
            set_axis(&mut p, axis2.axis, axis2.value_at(j));
            let breakdown = if plain { chsh_base(&p)? } else { chsh_unitary(&p, u)? };
            values.push(breakdown.chsh);
        }
    }
    Ok(SurfaceGrid { axis1: *axis1, axis2: *axis2, values })
}

fn set_axis(p: &mut ModularParams, axis: SurfaceAxis, value: f64) {
    match axis {
        SurfaceAxis::Lambda => p.lambda = value,
        SurfaceAxis::Eta => p.eta = value,
        SurfaceAxis::EtaPrime => p.eta_prime = value,
    }
}
