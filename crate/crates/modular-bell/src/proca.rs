//! Massive vector (Proca) field in 1+1 dimensions and its duality with the
//! free scalar.
//!
//! In two spacetime dimensions the Proca field has a single physical
//! polarization. On shell (k0 = w_k) the polarization tensor
//! eta_{mu nu} - k_mu k_nu / M^2 projects any smearing vector onto its
//! transverse part, and contracting two transverse vectors built from scalar
//! test functions reproduces the scalar inner product exactly:
//!
//!   <f|g>_V = - int dk/(2 pi 2 w) conj(fhat^mu) ghat^nu
//!             (eta_{mu nu} - k_mu k_nu / M^2)
//!
//! with fhat_mu the componentwise positive-frequency transform. Vector
//! components are stored with lower indices, signature (+, -), so
//! fhat^0 = fhat_0 and fhat^1 = -fhat_1, and the on-shell contraction
//! k . fhat = w fhat_0 + k fhat_1.
//!
//! For a scalar test function f the dual transverse smearing is
//! f_mu = (1/M) (d_x f, d_t f); a pure gauge gradient f_mu = d_mu s is
//! annihilated by the polarization tensor on shell. Both facts are exposed
//! as numerical reports here and drive the duality checks in the tests.

use num_complex::Complex64;

use crate::chsh_qft::{chsh_base, CorrelatorBreakdown};
use crate::kernels::momentum::{
    gk_panel, oscillatory_panels, phase_extent, scalar_inner, ComponentPlan,
};
use crate::kernels::{BumpFunction, KernelError};
use crate::modular_space::{ModularError, ModularParams};

/// Validated Proca mass, strictly positive.
#[derive(Debug, Clone, Copy)]
pub struct ProcaMass(f64);

impl ProcaMass {
    pub fn new(m: f64) -> Result<ProcaMass, KernelError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(KernelError::InvalidMass(m));
        }
        Ok(ProcaMass(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One component of a vector test function: a symbolic expression built from
/// bumps and their analytic derivatives, evaluated exactly (no numerical
/// differentiation anywhere).
#[derive(Debug, Clone)]
pub enum ScalarComponent {
    Zero,
    Bump(BumpFunction),
    /// d/dt of a bump.
    DtBump(BumpFunction),
    /// d/dx of a bump.
    DxBump(BumpFunction),
    Scaled(f64, Box<ScalarComponent>),
    Sum(Box<ScalarComponent>, Box<ScalarComponent>),
}

impl ScalarComponent {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            ScalarComponent::Zero => 0.0,
            ScalarComponent::Bump(b) => b.eval(t, x),
            ScalarComponent::DtBump(b) => b.eval_dt(t, x),
            ScalarComponent::DxBump(b) => b.eval_dx(t, x),
            ScalarComponent::Scaled(c, inner) => c * inner.eval(t, x),
            ScalarComponent::Sum(a, b) => a.eval(t, x) + b.eval(t, x),
        }
    }

    /// Bounding box of the support, if the component is not identically zero.
    pub fn support(&self) -> Option<(f64, f64, f64, f64)> {
        match self {
            ScalarComponent::Zero => None,
            ScalarComponent::Bump(b) | ScalarComponent::DtBump(b) | ScalarComponent::DxBump(b) => {
                Some(b.support())
            }
            ScalarComponent::Scaled(c, inner) => {
                if *c == 0.0 {
                    None
                } else {
                    inner.support()
                }
            }
            ScalarComponent::Sum(a, b) => match (a.support(), b.support()) {
                (None, s) | (s, None) => s,
                (Some((a0, a1, a2, a3)), Some((b0, b1, b2, b3))) => {
                    Some((a0.min(b0), a1.max(b1), a2.min(b2), a3.max(b3)))
                }
            },
        }
    }
}

/// Momentum-space projection applied to a vector test function when it is
/// paired. The longitudinal part keeps k_mu k_nu / k^2 of the transform; near
/// the cone |k^2| < `EXCLUSION` the projector is undefined and the sample is
/// dropped (and counted).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Projection {
    Full,
    Longitudinal,
    Transverse,
}

const EXCLUSION: f64 = 1e-8;

/// A two-component smearing vector for the Proca field, components indexed
/// with lower Lorentz indices: `mu0` couples to V_0, `mu1` to V_1.
#[derive(Debug, Clone)]
pub struct VectorTestFunction {
    mu0: ScalarComponent,
    mu1: ScalarComponent,
    projection: Projection,
}

impl VectorTestFunction {
    pub fn new(mu0: ScalarComponent, mu1: ScalarComponent) -> VectorTestFunction {
        VectorTestFunction { mu0, mu1, projection: Projection::Full }
    }

    pub fn mu0(&self) -> &ScalarComponent {
        &self.mu0
    }

    pub fn mu1(&self) -> &ScalarComponent {
        &self.mu1
    }

    /// The transverse vector dual to a scalar test function:
    /// f_mu = (1/M) (d_x f, d_t f). Divergence-free identically.
    pub fn transverse_from_scalar(f: &BumpFunction, mass: ProcaMass) -> VectorTestFunction {
        let inv_m = 1.0 / mass.value();
        VectorTestFunction::new(
            ScalarComponent::Scaled(inv_m, Box::new(ScalarComponent::DxBump(*f))),
            ScalarComponent::Scaled(inv_m, Box::new(ScalarComponent::DtBump(*f))),
        )
    }

    /// Pure gauge vector f_mu = d_mu s.
    pub fn gradient_of(s: &BumpFunction) -> VectorTestFunction {
        VectorTestFunction::new(
            ScalarComponent::DtBump(*s),
            ScalarComponent::DxBump(*s),
        )
    }

    /// Componentwise sum.
    pub fn add(&self, other: &VectorTestFunction) -> VectorTestFunction {
        VectorTestFunction::new(
            ScalarComponent::Sum(Box::new(self.mu0.clone()), Box::new(other.mu0.clone())),
            ScalarComponent::Sum(Box::new(self.mu1.clone()), Box::new(other.mu1.clone())),
        )
    }

    /// Pointwise divergence d^mu f_mu = d_t f_0 - d_x f_1, by Richardson-
    /// extrapolated central differences; used to spot-check transversality.
    pub fn divergence_fd(&self, t: f64, x: f64, h: f64) -> f64 {
        let central = |h: f64| {
            let d0 = (self.mu0.eval(t + h, x) - self.mu0.eval(t - h, x)) / (2.0 * h);
            let d1 = (self.mu1.eval(t, x + h) - self.mu1.eval(t, x - h)) / (2.0 * h);
            d0 - d1
        };
        (4.0 * central(0.5 * h) - central(h)) / 3.0
    }

    fn support(&self) -> Option<(f64, f64, f64, f64)> {
        match (self.mu0.support(), self.mu1.support()) {
            (None, s) | (s, None) => s,
            (Some((a0, a1, a2, a3)), Some((b0, b1, b2, b3))) => {
                Some((a0.min(b0), a1.max(b1), a2.min(b2), a3.max(b3)))
            }
        }
    }
}

/// The longitudinal (pure gauge) part of a vector test function, realized as
/// the momentum-space projector k_mu k_nu / k^2 applied on pairing.
pub fn longitudinal_projection(h: &VectorTestFunction) -> VectorTestFunction {
    VectorTestFunction { projection: Projection::Longitudinal, ..h.clone() }
}

/// The complement h - h^L.
pub fn transverse_projection(h: &VectorTestFunction) -> VectorTestFunction {
    VectorTestFunction { projection: Projection::Transverse, ..h.clone() }
}

/// Planned transforms for both components of one vector test function.
struct VectorPlan {
    p0: ComponentPlan,
    p1: ComponentPlan,
    projection: Projection,
}

impl VectorPlan {
    fn build(v: &VectorTestFunction, k_cap: f64) -> VectorPlan {
        let make = |c: &ScalarComponent| match c.support() {
            None => ComponentPlan::zero(),
            Some(support) => {
                ComponentPlan::build_with_floor(&|t, x| c.eval(t, x), support, k_cap, 16)
            }
        };
        VectorPlan { p0: make(&v.mu0), p1: make(&v.mu1), projection: v.projection }
    }

    /// Lower-component transforms (fhat_0, fhat_1) at momentum (k0, k1),
    /// with the projection applied. The boolean reports exclusion near the
    /// light cone (longitudinal/transverse projections only).
    fn transform(&self, k0: f64, k1: f64) -> (Complex64, Complex64, bool) {
        let t0 = self.p0.transform(k0, k1);
        let t1 = self.p1.transform(k0, k1);
        match self.projection {
            Projection::Full => (t0, t1, false),
            Projection::Longitudinal | Projection::Transverse => {
                let k_sq = k0 * k0 - k1 * k1;
                if k_sq.abs() < EXCLUSION {
                    return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), true);
                }
                // k . fhat = k0 fhat_0 + k1 fhat_1 (one index raised).
                let k_dot = t0 * k0 + t1 * k1;
                let l0 = k_dot * (k0 / k_sq);
                let l1 = k_dot * (-k1 / k_sq);
                match self.projection {
                    Projection::Longitudinal => (l0, l1, false),
                    _ => (t0 - l0, t1 - l1, false),
                }
            }
        }
    }
}

/// Result of a Proca inner product.
#[derive(Debug, Clone, Copy)]
pub struct ProcaInner {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Momentum cutoff at which the integral was truncated.
    pub k_max: f64,
    /// Number of momentum points evaluated.
    pub evaluations: u64,
    /// Total k-measure dropped by the light-cone exclusion of projected
    /// vectors; identically zero for unprojected arguments since on shell
    /// k^2 = M^2.
    pub excluded_measure: f64,
}

const K_INITIAL: f64 = 8.0;
const K_LIMIT: f64 = 1024.0;

/// Vacuum inner product of two Proca smearing vectors,
/// -(eta - kk/M^2)-contracted over dk/(2 pi 2 w). Hermitian: swapping the
/// arguments conjugates the value.
pub fn proca_inner(
    f: &VectorTestFunction,
    g: &VectorTestFunction,
    mass: ProcaMass,
    tol: f64,
) -> Result<ProcaInner, KernelError> {
    if !(tol > 0.0) {
        return Err(KernelError::InvalidTolerance(tol));
    }
    let m = mass.value();
    let (fs, gs) = match (f.support(), g.support()) {
        (Some(fs), Some(gs)) => (fs, gs),
        _ => {
            return Ok(ProcaInner {
                value: Complex64::new(0.0, 0.0),
                error_estimate: 0.0,
                k_max: 0.0,
                evaluations: 0,
                excluded_measure: 0.0,
            })
        }
    };
    let extent = phase_extent(fs) + phase_extent(gs);
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut evaluations = 0u64;
    let mut excluded_measure = 0.0;
    let mut k_lo = 0.0f64;
    let mut k_hi = K_INITIAL;
    loop {
        let plan_f = VectorPlan::build(f, k_hi);
        let plan_g = VectorPlan::build(g, k_hi);
        let mut shell = Complex64::new(0.0, 0.0);
        for (lo, hi) in [(k_lo, k_hi), (-k_hi, -k_lo)] {
            for (a, b) in oscillatory_panels(lo, hi, extent) {
                let width = b - a;
                let (val, err) = gk_panel(a, b, |k| {
                    evaluations += 1;
                    let w = (k * k + m * m).sqrt();
                    let (f0, f1, fex) = plan_f.transform(w, k);
                    let (g0, g1, gex) = plan_g.transform(w, k);
                    if fex || gex {
                        // Crude measure bookkeeping: one dropped node out of
                        // fifteen on this panel.
                        excluded_measure += width / 15.0;
                        return Complex64::new(0.0, 0.0);
                    }
                    let k_dot_f = f0 * w + f1 * k;
                    let k_dot_g = g0 * w + g1 * k;
                    let contracted = -(f0.conj() * g0 - f1.conj() * g1)
                        + k_dot_f.conj() * k_dot_g / (m * m);
                    contracted / (4.0 * std::f64::consts::PI * w)
                });
                shell += val;
                quad_err += err;
            }
        }
        value += shell;
        if shell.norm() < 0.1 * tol && k_lo > 0.0 {
            return Ok(ProcaInner {
                value,
                error_estimate: quad_err + shell.norm(),
                k_max: k_hi,
                evaluations,
                excluded_measure,
            });
        }
        k_lo = k_hi;
        k_hi *= 2.0;
        if k_hi > K_LIMIT {
            return Err(KernelError::NotConverged {
                value: value.re,
                error_estimate: quad_err + shell.norm(),
                tolerance: tol,
            });
        }
    }
}

/// Off-shell sample of the longitudinal/transverse split of one vector test
/// function over a uniform momentum grid.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionSample {
    /// max over the grid of |hhat^L(k)| (euclidean norm of the pair).
    pub max_longitudinal: f64,
    /// max over the grid of |hhat^T(k)|.
    pub max_transverse: f64,
    /// max over the grid of |hhat - (hhat^L + hhat^T)|; zero wiring check.
    pub max_reconstruction_error: f64,
    /// Fraction of grid points dropped by the |k^2| exclusion.
    pub excluded_fraction: f64,
}

/// Samples the momentum-space projector decomposition of `h` on an
/// (2n+1) x (2n+1) grid over [-k_max, k_max]^2.
pub fn projection_sample(h: &VectorTestFunction, k_max: f64, n: usize) -> ProjectionSample {
    let full =
        VectorPlan::build(&VectorTestFunction { projection: Projection::Full, ..h.clone() }, k_max);
    let long = VectorPlan {
        p0: full.p0.clone(),
        p1: full.p1.clone(),
        projection: Projection::Longitudinal,
    };
    let trans = VectorPlan {
        p0: full.p0.clone(),
        p1: full.p1.clone(),
        projection: Projection::Transverse,
    };
    let mut max_l = 0.0f64;
    let mut max_t = 0.0f64;
    let mut max_rec = 0.0f64;
    let mut excluded = 0usize;
    let mut total = 0usize;
    let steps = 2 * n + 1;
    for i in 0..steps {
        let k0 = -k_max + 2.0 * k_max * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let k1 = -k_max + 2.0 * k_max * j as f64 / (steps - 1) as f64;
            total += 1;
            let (t0, t1, _) = full.transform(k0, k1);
            let (l0, l1, ex) = long.transform(k0, k1);
            if ex {
                excluded += 1;
                continue;
            }
            let (r0, r1, _) = trans.transform(k0, k1);
            let norm = |a: Complex64, b: Complex64| (a.norm_sqr() + b.norm_sqr()).sqrt();
            max_l = max_l.max(norm(l0, l1));
            max_t = max_t.max(norm(r0, r1));
            max_rec = max_rec.max(norm(t0 - (l0 + r0), t1 - (l1 + r1)));
        }
    }
    ProjectionSample {
        max_longitudinal: max_l,
        max_transverse: max_t,
        max_reconstruction_error: max_rec,
        excluded_fraction: excluded as f64 / total as f64,
    }
}

/// Side-by-side evaluation of the Proca inner product of the transverse
/// vectors dual to (f, g) and the plain scalar inner product of (f, g).
#[derive(Debug, Clone, Copy)]
pub struct DualityReport {
    pub proca_value: Complex64,
    pub scalar_value: Complex64,
    /// |proca - scalar| / max(|scalar|, 1e-12).
    pub relative_error: f64,
    pub proca_k_max: f64,
    pub scalar_k_max: f64,
}

pub fn duality_report(
    f: &BumpFunction,
    g: &BumpFunction,
    mass: ProcaMass,
    tol: f64,
) -> Result<DualityReport, KernelError> {
    let fv = VectorTestFunction::transverse_from_scalar(f, mass);
    let gv = VectorTestFunction::transverse_from_scalar(g, mass);
    let proca = proca_inner(&fv, &gv, mass, tol)?;
    let fe = |t: f64, x: f64| f.eval(t, x);
    let ge = |t: f64, x: f64| g.eval(t, x);
    let scalar = scalar_inner(&fe, f.support(), &ge, g.support(), mass.value(), tol)?;
    let relative_error =
        (proca.value - scalar.value).norm() / scalar.value.norm().max(1e-12);
    Ok(DualityReport {
        proca_value: proca.value,
        scalar_value: scalar.value,
        relative_error,
        proca_k_max: proca.k_max,
        scalar_k_max: scalar.k_max,
    })
}

/// Bell-CHSH correlator for the Proca field. The unique physical
/// polarization pairs exactly like the scalar, so the whole modular
/// construction carries over unchanged; this delegates to the scalar
/// pipeline and exists so callers can tag results by field content.
pub fn proca_chsh_base(params: &ModularParams) -> Result<CorrelatorBreakdown, ModularError> {
    chsh_base(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn bump(t0: f64, x0: f64, r: f64, a: f64) -> BumpFunction {
        BumpFunction::new(t0, x0, r, a).unwrap()
    }

    #[test]
    fn mass_validation() {
        assert!(ProcaMass::new(0.0).is_err());
        assert!(ProcaMass::new(-1.0).is_err());
        assert!(ProcaMass::new(f64::NAN).is_err());
        assert!(ProcaMass::new(1.5).is_ok());
    }

    #[test]
    fn transverse_vector_is_divergence_free() {
        let mass = ProcaMass::new(1.3).unwrap();
        let f = bump(0.2, -0.4, 0.9, 1.1);
        let v = VectorTestFunction::transverse_from_scalar(&f, mass);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            // Stay off the support edge where high derivatives blow up and
            // finite differences lose their footing.
            let rho = 0.9 * 0.8 * rng.gen_range(0.0f64..1.0).sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = 0.2 + rho * phi.cos();
            let x = -0.4 + rho * phi.sin();
            let div = v.divergence_fd(t, x, 5e-4);
            assert!(div.abs() < 1e-10, "divergence {div} at ({t}, {x})");
        }
    }

    #[test]
    fn zero_vector_pairs_to_zero() {
        let mass = ProcaMass::new(1.0).unwrap();
        let z = VectorTestFunction::new(ScalarComponent::Zero, ScalarComponent::Zero);
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let v = VectorTestFunction::transverse_from_scalar(&f, mass);
        let p = proca_inner(&z, &v, mass, 1e-8).unwrap();
        assert_eq!(p.value, Complex64::new(0.0, 0.0));
        assert_eq!(p.evaluations, 0);
    }

    #[test]
    fn proca_inner_is_hermitian() {
        let mass = ProcaMass::new(0.8).unwrap();
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let g = bump(0.5, 0.7, 0.8, -1.2);
        let fv = VectorTestFunction::transverse_from_scalar(&f, mass);
        let gv = VectorTestFunction::transverse_from_scalar(&g, mass);
        let tol = 1e-8;
        let fg = proca_inner(&fv, &gv, mass, tol).unwrap();
        let gf = proca_inner(&gv, &fv, mass, tol).unwrap();
        assert!(
            (fg.value - gf.value.conj()).norm() <= 2.0 * tol,
            "hermiticity: {} vs conj {}",
            fg.value,
            gf.value.conj()
        );
        assert_eq!(fg.excluded_measure, 0.0);
    }

    #[test]
    fn duality_on_a_sample_pair() {
        let mass = ProcaMass::new(1.0).unwrap();
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let g = bump(0.4, 0.9, 0.7, 1.3);
        let report = duality_report(&f, &g, mass, 1e-8).unwrap();
        assert!(
            report.relative_error < 1e-6,
            "duality relative error {} (proca {}, scalar {})",
            report.relative_error,
            report.proca_value,
            report.scalar_value
        );
    }

    #[test]
    fn gradient_pairs_to_nothing() {
        let mass = ProcaMass::new(1.1).unwrap();
        let s = bump(0.1, 0.2, 0.8, 2.0);
        let g = bump(0.4, -0.3, 0.9, 1.0);
        let grad = VectorTestFunction::gradient_of(&s);
        let gv = VectorTestFunction::transverse_from_scalar(&g, mass);
        let tol = 1e-8;
        let p = proca_inner(&grad, &gv, mass, tol).unwrap();
        assert!(p.value.norm() < tol, "gauge direction leaked: {}", p.value);
    }

    #[test]
    fn adding_a_gradient_does_not_change_pairings() {
        let mass = ProcaMass::new(0.9).unwrap();
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let s = bump(0.2, 0.1, 0.6, 3.0);
        let g = bump(0.5, 0.4, 0.8, 1.0);
        let fv = VectorTestFunction::transverse_from_scalar(&f, mass);
        let gv = VectorTestFunction::transverse_from_scalar(&g, mass);
        let shifted = fv.add(&VectorTestFunction::gradient_of(&s));
        let tol = 1e-8;
        let plain = proca_inner(&fv, &gv, mass, tol).unwrap();
        let moved = proca_inner(&shifted, &gv, mass, tol).unwrap();
        assert!(
            (plain.value - moved.value).norm() < 10.0 * tol,
            "gradient shifted the pairing: {} vs {}",
            plain.value,
            moved.value
        );
    }

    #[test]
    fn projector_splits_transverse_and_gauge_inputs() {
        let mass = ProcaMass::new(1.0).unwrap();
        let f = bump(0.0, 0.0, 0.9, 1.4);
        let tv = VectorTestFunction::transverse_from_scalar(&f, mass);
        let sample = projection_sample(&tv, 6.0, 24);
        assert!(sample.max_reconstruction_error < 1e-12);
        // Transverse input: longitudinal content is pure quadrature noise,
        // many orders below the transverse scale.
        assert!(
            sample.max_longitudinal < 1e-8 * sample.max_transverse.max(1e-30),
            "longitudinal {} vs transverse {}",
            sample.max_longitudinal,
            sample.max_transverse
        );

        let grad = VectorTestFunction::gradient_of(&f);
        let sample = projection_sample(&grad, 6.0, 24);
        assert!(
            sample.max_transverse < 1e-8 * sample.max_longitudinal.max(1e-30),
            "transverse {} vs longitudinal {}",
            sample.max_transverse,
            sample.max_longitudinal
        );
    }

    #[test]
    fn proca_tagged_correlator_is_the_scalar_one() {
        let params = ModularParams::new(0.7, 0.4, -0.2).unwrap();
        let a = proca_chsh_base(&params).unwrap();
        let b = chsh_base(&params).unwrap();
        assert_eq!(a.chsh.to_bits(), b.chsh.to_bits());
    }
}
