//! Momentum-space evaluation of smeared two-point functions.
//!
//! The positive-frequency transform used throughout is
//!
//!   fhat(k0, k1) = int f(t, x) e^{+i (k0 t - k1 x)} dt dx,
//!
//! and the vacuum inner product of two real test functions is
//!
//!   <f|g> = int dk / (2 pi 2 w_k)  conj(fhat(w_k, k)) ghat(w_k, k),
//!
//! with w_k = sqrt(k^2 + m^2). Test functions are compactly supported and
//! smooth, so fhat decays faster than any power and the k integral is
//! truncated at a cutoff K chosen by doubling until the outermost shell
//! contributes less than a tenth of the requested tolerance.
//!
//! Each transform is a 2-D oscillatory integral over the support box. The
//! integrand factorizes as e^{i k0 t} e^{-i k1 x} times a fixed sample grid,
//! so a plan precomputes the function values on a tensor Gauss grid once and
//! each transform costs one pass over the grid with separable phase vectors.

use num_complex::Complex64;

use super::quad::{gl15, G7_WEIGHTS, GK15_NODES, GK15_WEIGHTS};
use super::KernelError;

/// Precomputed sample grid of one real function over its support box.
#[derive(Clone)]
pub struct ComponentPlan {
    ts: Vec<f64>,
    xs: Vec<f64>,
    wts: Vec<f64>,
    wxs: Vec<f64>,
    vals: Vec<f64>,
}

/// Number of 15-point panels per dimension needed to resolve phases up to
/// `k_cap` across a box of width `width`: roughly seven radians of phase per
/// panel, with a floor for the non-oscillatory envelope.
fn panels_for(width: f64, k_cap: f64, floor: usize) -> usize {
    let osc = (k_cap * width / 7.0).ceil() as usize;
    osc.max(floor)
}

impl ComponentPlan {
    /// Samples `f` on a tensor Gauss grid over `(t_lo, t_hi, x_lo, x_hi)`,
    /// resolving oscillations up to wavenumber `k_cap` in either variable.
    pub fn build(
        f: &dyn Fn(f64, f64) -> f64,
        support: (f64, f64, f64, f64),
        k_cap: f64,
    ) -> ComponentPlan {
        Self::build_with_floor(f, support, k_cap, 12)
    }

    /// As `build`, but with an explicit floor on panels per dimension;
    /// derivative-like components need a denser base grid because their
    /// transforms enter contractions with strong pointwise cancellation.
    pub fn build_with_floor(
        f: &dyn Fn(f64, f64) -> f64,
        support: (f64, f64, f64, f64),
        k_cap: f64,
        floor: usize,
    ) -> ComponentPlan {
        let (t_lo, t_hi, x_lo, x_hi) = support;
        let (nodes, weights) = gl15();
        let build_axis = |lo: f64, hi: f64| {
            let n_pan = panels_for(hi - lo, k_cap, floor);
            let h = (hi - lo) / n_pan as f64;
            let mut pts = Vec::with_capacity(n_pan * nodes.len());
            let mut wts = Vec::with_capacity(n_pan * nodes.len());
            for p in 0..n_pan {
                let a = lo + p as f64 * h;
                let c = a + 0.5 * h;
                for (&u, &w) in nodes.iter().zip(weights) {
                    pts.push(c + 0.5 * h * u);
                    wts.push(0.5 * h * w);
                }
            }
            (pts, wts)
        };
        let (ts, wts) = build_axis(t_lo, t_hi);
        let (xs, wxs) = build_axis(x_lo, x_hi);
        let mut vals = Vec::with_capacity(ts.len() * xs.len());
        for &t in &ts {
            for &x in &xs {
                vals.push(f(t, x));
            }
        }
        ComponentPlan { ts, xs, wts, wxs, vals }
    }

    /// A plan that transforms to identically zero, for absent components.
    pub fn zero() -> ComponentPlan {
        ComponentPlan {
            ts: vec![],
            xs: vec![],
            wts: vec![],
            wxs: vec![],
            vals: vec![],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// fhat(k0, k1) for this component.
    pub fn transform(&self, k0: f64, k1: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let nx = self.xs.len();
        let phase_x: Vec<Complex64> = self
            .xs
            .iter()
            .zip(&self.wxs)
            .map(|(&x, &w)| Complex64::from_polar(w, -k1 * x))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, (&t, &wt)) in self.ts.iter().zip(&self.wts).enumerate() {
            let row = &self.vals[i * nx..(i + 1) * nx];
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, p) in row.iter().zip(&phase_x) {
                acc += p * *v;
            }
            total += Complex64::from_polar(wt, k0 * t) * acc;
        }
        total
    }
}

/// Oscillation scale of a support box: the largest |t| + |x| over its
/// corners bounds the phase derivative d(w t - k x)/dk.
pub fn phase_extent(support: (f64, f64, f64, f64)) -> f64 {
    let (t_lo, t_hi, x_lo, x_hi) = support;
    let t = t_lo.abs().max(t_hi.abs());
    let x = x_lo.abs().max(x_hi.abs());
    t + x
}

/// Splits [lo, hi] into panels short enough that the on-shell phase varies
/// by at most about seven radians per panel.
pub fn oscillatory_panels(lo: f64, hi: f64, extent: f64) -> Vec<(f64, f64)> {
    let span = hi - lo;
    let n = ((span * extent.max(0.5) / 7.0).ceil() as usize).max(2);
    let h = span / n as f64;
    (0..n).map(|i| (lo + i as f64 * h, lo + (i + 1) as f64 * h)).collect()
}

/// One Gauss-Kronrod pass over [lo, hi]: returns (kronrod value, |K - G|).
pub fn gk_panel(
    lo: f64,
    hi: f64,
    mut f: impl FnMut(f64) -> Complex64,
) -> (Complex64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (idx, (&u, &wk)) in GK15_NODES.iter().zip(&GK15_WEIGHTS).enumerate() {
        let v = f(c + h * u);
        kron += v * wk;
        if idx % 2 == 1 {
            gauss += v * G7_WEIGHTS[idx / 2];
        }
    }
    (kron * h, (kron - gauss).norm() * h)
}

/// Result of a momentum-space inner product.
#[derive(Debug, Clone, Copy)]
pub struct MomentumInner {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Cutoff at which the k integral was truncated.
    pub k_max: f64,
    /// Number of integrand evaluations (k points).
    pub evaluations: u64,
}

const K_INITIAL: f64 = 8.0;
const K_LIMIT: f64 = 1024.0;

/// Vacuum inner product <f|g> of two smeared field operators, computed
/// entirely in momentum space. Serves as the independent cross-check for the
/// position-space kernel pairings.
pub fn scalar_inner(
    f: &dyn Fn(f64, f64) -> f64,
    f_support: (f64, f64, f64, f64),
    g: &dyn Fn(f64, f64) -> f64,
    g_support: (f64, f64, f64, f64),
    mass: f64,
    tol: f64,
) -> Result<MomentumInner, KernelError> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(KernelError::InvalidMass(mass));
    }
    if !(tol > 0.0) {
        return Err(KernelError::InvalidTolerance(tol));
    }
    let extent = phase_extent(f_support) + phase_extent(g_support);
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut evaluations = 0u64;
    let mut k_lo = 0.0f64;
    let mut k_hi = K_INITIAL;
    loop {
        let plan_f = ComponentPlan::build(f, f_support, k_hi);
        let plan_g = ComponentPlan::build(g, g_support, k_hi);
        let mut shell = Complex64::new(0.0, 0.0);
        for (lo, hi) in [(k_lo, k_hi), (-k_hi, -k_lo)] {
            for (a, b) in oscillatory_panels(lo, hi, extent) {
                let (val, err) = gk_panel(a, b, |k| {
                    evaluations += 1;
                    let w = (k * k + mass * mass).sqrt();
                    plan_f.transform(w, k).conj() * plan_g.transform(w, k)
                        / (4.0 * std::f64::consts::PI * w)
                });
                shell += val;
                quad_err += err;
            }
        }
        value += shell;
        if shell.norm() < 0.1 * tol && k_lo > 0.0 {
            let error_estimate = quad_err + shell.norm();
            return Ok(MomentumInner { value, error_estimate, k_max: k_hi, evaluations });
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BumpFunction;

    fn bump(t0: f64, x0: f64, r: f64, a: f64) -> BumpFunction {
        BumpFunction::new(t0, x0, r, a).unwrap()
    }

    #[test]
    fn transform_at_zero_is_plain_integral() {
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let plan = ComponentPlan::build(&|t, x| f.eval(t, x), f.support(), 10.0);
        let got = plan.transform(0.0, 0.0);
        // int_{disc} exp(-1/(1-r^2)) over the unit disc, radially:
        // 2 pi int_0^1 r exp(-1/(1-r^2)) dr; reference by dense midpoint rule.
        let n = 200_000;
        let mut want = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) / n as f64;
            want += r * (-1.0 / (1.0 - r * r)).exp();
        }
        want *= 2.0 * std::f64::consts::PI / n as f64;
        assert!((got.re - want).abs() < 1e-9, "{} vs {want}", got.re);
        assert!(got.im.abs() < 1e-14);
    }

    #[test]
    fn transform_translation_phase() {
        // Shifting the bump multiplies the transform by e^{i(k0 dt - k1 dx)}.
        let f0 = bump(0.0, 0.0, 0.8, 1.3);
        let f1 = bump(0.7, -0.4, 0.8, 1.3);
        let p0 = ComponentPlan::build(&|t, x| f0.eval(t, x), f0.support(), 12.0);
        let p1 = ComponentPlan::build(&|t, x| f1.eval(t, x), f1.support(), 12.0);
        for (k0, k1) in [(0.3, 1.1), (2.0, -3.5), (7.7, 4.2)] {
            let a = p1.transform(k0, k1);
            let b = p0.transform(k0, k1)
                * Complex64::from_polar(1.0, k0 * 0.7 - k1 * (-0.4));
            assert!((a - b).norm() < 1e-11, "k=({k0},{k1}): {a} vs {b}");
        }
    }

    #[test]
    fn transform_of_real_function_conjugate_symmetry() {
        let f = bump(0.2, 0.5, 0.9, 1.0);
        let plan = ComponentPlan::build(&|t, x| f.eval(t, x), f.support(), 10.0);
        for (k0, k1) in [(1.0, 2.0), (0.4, -1.7), (5.0, 3.0)] {
            let a = plan.transform(k0, k1);
            let b = plan.transform(-k0, -k1).conj();
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn inner_product_is_hermitian_and_positive_on_diagonal() {
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let g = bump(0.3, 0.6, 0.7, -0.8);
        let fe = |t: f64, x: f64| f.eval(t, x);
        let ge = |t: f64, x: f64| g.eval(t, x);
        let fg = scalar_inner(&fe, f.support(), &ge, g.support(), 1.0, 1e-9).unwrap();
        let gf = scalar_inner(&ge, g.support(), &fe, f.support(), 1.0, 1e-9).unwrap();
        assert!((fg.value - gf.value.conj()).norm() < 1e-10);
        let ff = scalar_inner(&fe, f.support(), &fe, f.support(), 1.0, 1e-9).unwrap();
        assert!(ff.value.re > 0.0);
        assert!(ff.value.im.abs() < 1e-10);
    }

    #[test]
    fn inner_product_scales_bilinearly() {
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let f3 = bump(0.0, 0.0, 1.0, 3.0);
        let fe = |t: f64, x: f64| f.eval(t, x);
        let f3e = |t: f64, x: f64| f3.eval(t, x);
        let a = scalar_inner(&fe, f.support(), &f3e, f3.support(), 0.7, 1e-9).unwrap();
        let b = scalar_inner(&fe, f.support(), &fe, f.support(), 0.7, 1e-9).unwrap();
        assert!((a.value - b.value * 3.0).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = bump(0.0, 0.0, 1.0, 1.0);
        let fe = |t: f64, x: f64| f.eval(t, x);
        assert!(scalar_inner(&fe, f.support(), &fe, f.support(), 0.0, 1e-8).is_err());
        assert!(scalar_inner(&fe, f.support(), &fe, f.support(), 1.0, 0.0).is_err());
    }
}
