//! Subcommand implementations. Each runner validates its inputs, delegates
//! to the library, and packages the result for the envelope layer.

use std::str::FromStr;

use modular_bell::chsh_qft::{
    chsh_base, chsh_unitary, surface_grid, AxisSpec, CorrelatorBreakdown, SurfaceAxis,
    SurfaceError, UnitaryParams,
};
use modular_bell::kernels::{
    smeared_pairing, BumpFunction, KernelChoice, KernelError, KernelKind,
};
use modular_bell::modular_space::{ModularError, ModularParams};
use modular_bell::optimizer::{
    base_problem, maximize_unitary, multistart_with_opts, NmOptions, OptResult,
};
use modular_bell::proca::{
    duality_report, proca_chsh_base, proca_inner, ProcaMass, VectorTestFunction,
};
use modular_bell::qm_bell::{chsh_value, BellAngles};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{
    Command, Failure, FieldKind, KernelsCheckArgs, OptimizeArgs, ProcaCheckArgs, QftChshArgs,
    QmChshArgs, SurfaceArgs, Target,
};

/// Everything the envelope layer needs: the pieces of the result record,
/// the optional CSV grid payload, and whether a check battery failed.
pub struct CommandOutput {
    pub subcommand: &'static str,
    pub inputs: Value,
    pub outputs: Value,
    pub error_estimates: Value,
    pub csv: Option<String>,
    pub numerical_failure: bool,
}

impl From<ModularError> for Failure {
    fn from(e: ModularError) -> Failure {
        Failure::Config(e.to_string())
    }
}

impl From<SurfaceError> for Failure {
    fn from(e: SurfaceError) -> Failure {
        Failure::Config(e.to_string())
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Failure {
        match e {
            KernelError::NotConverged { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

pub fn dispatch(command: &Command) -> Result<CommandOutput, Failure> {
    match command {
        Command::QmChsh(args) => qm_chsh(args),
        Command::QftChsh(args) => qft_chsh(args),
        Command::Optimize(args) => optimize(args),
        Command::KernelsCheck(args) => kernels_check(args),
        Command::ProcaCheck(args) => proca_check(args),
        Command::Surface(args) => surface(args),
    }
}

/// Round-off scale for values produced by closed-form arithmetic.
fn round_off(v: f64) -> f64 {
    16.0 * f64::EPSILON * v.abs().max(1.0)
}

fn breakdown_json(b: &CorrelatorBreakdown) -> Value {
    json!({
        "p_a": b.p_a,
        "p_b": b.p_b,
        "p_ab": b.p_ab,
        "p_apb": b.p_apb,
        "p_abp": b.p_abp,
        "p_apbp": b.p_apbp,
        "script_p": b.script_p,
        "chsh": b.chsh,
    })
}

fn qm_chsh(args: &QmChshArgs) -> Result<CommandOutput, Failure> {
    let parts: Vec<f64> = args
        .angles
        .split(',')
        .map(|s| f64::from_str(s.trim()))
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Config(format!("angles must be numbers, got '{}'", args.angles)))?;
    if parts.len() != 4 {
        return Err(Failure::Config(format!(
            "angles takes exactly four comma-separated values, got {}",
            parts.len()
        )));
    }
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Config("angles must be finite".into()));
    }
    let chsh = chsh_value(BellAngles {
        alpha: parts[0],
        alpha_prime: parts[1],
        beta: parts[2],
        beta_prime: parts[3],
    });
    Ok(CommandOutput {
        subcommand: "qm-chsh",
        inputs: json!({ "angles": parts }),
        outputs: json!({ "chsh": chsh, "magnitude": chsh.abs() }),
        error_estimates: json!({ "chsh": round_off(chsh) }),
        csv: None,
        numerical_failure: false,
    })
}

fn field_name(field: FieldKind) -> &'static str {
    match field {
        FieldKind::Scalar => "scalar",
        FieldKind::Proca => "proca",
    }
}

fn qft_chsh(args: &QftChshArgs) -> Result<CommandOutput, Failure> {
    let params = ModularParams::new(args.lambda, args.eta, args.eta_prime)?;
    let u = UnitaryParams {
        alpha: args.alpha,
        beta: args.beta,
        alpha_prime: args.alpha_prime,
        beta_prime: args.beta_prime,
        sigma: args.sigma,
        tau: args.tau,
        sigma_prime: args.sigma_prime,
        tau_prime: args.tau_prime,
    };
    let b = match args.field {
        FieldKind::Proca if u.is_zero() => proca_chsh_base(&params)?,
        _ => chsh_unitary(&params, &u)?,
    };
    Ok(CommandOutput {
        subcommand: "qft-chsh",
        inputs: json!({
            "lambda": args.lambda,
            "eta": args.eta,
            "eta_prime": args.eta_prime,
            "dressing": {
                "alpha": u.alpha,
                "beta": u.beta,
                "alpha_prime": u.alpha_prime,
                "beta_prime": u.beta_prime,
                "sigma": u.sigma,
                "tau": u.tau,
                "sigma_prime": u.sigma_prime,
                "tau_prime": u.tau_prime,
            },
            "field": field_name(args.field),
        }),
        outputs: json!({
            "field": field_name(args.field),
            "breakdown": breakdown_json(&b),
            "chsh": b.chsh,
        }),
        error_estimates: json!({ "chsh": round_off(b.chsh) }),
        csv: None,
        numerical_failure: false,
    })
}

/// Names for the coordinates of an optimizer point, in problem order.
const BASE_COORDS: [&str; 3] = ["lambda", "eta", "eta_prime"];
const UNITARY_COORDS: [&str; 11] = [
    "lambda",
    "eta",
    "eta_prime",
    "alpha",
    "beta",
    "alpha_prime",
    "beta_prime",
    "sigma",
    "tau",
    "sigma_prime",
    "tau_prime",
];

fn named_point(names: &[&str], point: &[f64]) -> Value {
    let map: serde_json::Map<String, Value> = names
        .iter()
        .zip(point)
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    Value::Object(map)
}

fn optimize(args: &OptimizeArgs) -> Result<CommandOutput, Failure> {
    let starts = args.starts.unwrap_or(match args.target {
        Target::Base => 64,
        Target::Unitary => 256,
    });
    if starts < 2 {
        return Err(Failure::Config(format!(
            "optimize needs at least 2 starts, got {starts}"
        )));
    }
    let opts = NmOptions { max_iter: 400, ftol: 1e-13, xtol: 1e-10 };
    let (target_name, coords, result): (&str, &[&str], OptResult) = match args.target {
        Target::Base => (
            "base",
            &BASE_COORDS,
            multistart_with_opts(&base_problem(), starts, args.seed, &opts),
        ),
        Target::Unitary => ("unitary", &UNITARY_COORDS, maximize_unitary(starts, args.seed)),
    };
    if !result.best_value.is_finite() {
        return Err(Failure::Numerical(format!(
            "optimizer returned a non-finite best value after {} evaluations",
            result.evaluations
        )));
    }
    Ok(CommandOutput {
        subcommand: "optimize",
        inputs: json!({ "target": target_name, "starts": starts, "seed": args.seed }),
        outputs: json!({
            "best_value": result.best_value,
            "best_point": named_point(coords, &result.best_point),
            "evaluations": result.evaluations,
            "starts": result.starts,
            "converged": result.converged,
            "ab_symmetric": result.ab_symmetric,
            "history": result.history,
        }),
        error_estimates: json!({ "best_value": 10.0 * opts.ftol }),
        csv: None,
        numerical_failure: false,
    })
}

/// A bump supported strictly inside the right (sign +) or left (sign -)
/// wedge: the spatial offset exceeds |t| everywhere on the support.
fn wedge_bump(rng: &mut ChaCha8Rng, right: bool) -> Result<BumpFunction, Failure> {
    let radius: f64 = rng.gen_range(0.2..0.6);
    let t0: f64 = rng.gen_range(-1.0..1.0);
    let margin: f64 = rng.gen_range(0.05..1.0);
    let x_mag = t0.abs() + 2.0 * radius + margin;
    let x0 = if right { x_mag } else { -x_mag };
    let amplitude = rng.gen_range(0.5..1.5);
    Ok(BumpFunction::new(t0, x0, radius, amplitude)?)
}

fn kernels_check(args: &KernelsCheckArgs) -> Result<CommandOutput, Failure> {
    if args.pairs == 0 {
        return Err(Failure::Config("kernels-check needs at least one pair".into()));
    }
    let pj = KernelChoice { kind: KernelKind::PauliJordan, mass: args.mass };
    let had = KernelChoice { kind: KernelKind::Hadamard, mass: args.mass };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let mut wedge_values = Vec::with_capacity(args.pairs);
    let mut max_wedge = 0.0f64;
    let mut max_wedge_estimate = 0.0f64;
    for _ in 0..args.pairs {
        let f = wedge_bump(&mut rng, true)?;
        let g = wedge_bump(&mut rng, false)?;
        let p = smeared_pairing(&f, &g, pj, args.tol)?;
        max_wedge = max_wedge.max(p.value.abs());
        max_wedge_estimate = max_wedge_estimate.max(p.error_estimate);
        wedge_values.push(p.value);
    }

    // Overlapping, partly timelike-separated pair for the symmetry checks.
    let f = BumpFunction::new(0.0, 0.0, 1.0, 1.0)?;
    let g = BumpFunction::new(1.5, 0.3, 0.8, 1.0)?;
    let pj_fg = smeared_pairing(&f, &g, pj, args.tol)?;
    let pj_gf = smeared_pairing(&g, &f, pj, args.tol)?;
    let antisymmetry_defect = (pj_fg.value + pj_gf.value).abs();
    let had_fg = smeared_pairing(&f, &g, had, args.tol)?;
    let had_gf = smeared_pairing(&g, &f, had, args.tol)?;
    let symmetry_defect = (had_fg.value - had_gf.value).abs();

    let pass = max_wedge <= args.tol
        && antisymmetry_defect <= 2.0 * args.tol
        && symmetry_defect <= 2.0 * args.tol;
    Ok(CommandOutput {
        subcommand: "kernels-check",
        inputs: json!({
            "mass": args.mass,
            "tol": args.tol,
            "pairs": args.pairs,
            "seed": args.seed,
        }),
        outputs: json!({
            "wedge_pairings": wedge_values,
            "max_wedge_pairing": max_wedge,
            "timelike_pairing": pj_fg.value,
            "antisymmetry_defect": antisymmetry_defect,
            "hadamard_pairing": had_fg.value,
            "symmetry_defect": symmetry_defect,
            "pass": pass,
        }),
        error_estimates: json!({
            "wedge_pairings": max_wedge_estimate,
            "timelike_pairing": pj_fg.error_estimate,
            "antisymmetry_defect": pj_fg.error_estimate + pj_gf.error_estimate,
            "hadamard_pairing": had_fg.error_estimate,
            "symmetry_defect": had_fg.error_estimate + had_gf.error_estimate,
        }),
        csv: None,
        numerical_failure: !pass,
    })
}

fn random_bump(rng: &mut ChaCha8Rng) -> Result<BumpFunction, Failure> {
    let t0 = rng.gen_range(-0.8..0.8);
    let x0 = rng.gen_range(-0.8..0.8);
    let radius = rng.gen_range(0.5..1.0);
    let amplitude = rng.gen_range(0.6..1.2);
    Ok(BumpFunction::new(t0, x0, radius, amplitude)?)
}

fn proca_check(args: &ProcaCheckArgs) -> Result<CommandOutput, Failure> {
    if args.pairs == 0 {
        return Err(Failure::Config("proca-check needs at least one pair".into()));
    }
    let mass = ProcaMass::new(args.mass)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    let mut relative_errors = Vec::with_capacity(args.pairs);
    let mut max_relative = 0.0f64;
    let mut first_pair = None;
    for _ in 0..args.pairs {
        let f = random_bump(&mut rng)?;
        let g = random_bump(&mut rng)?;
        let report = duality_report(&f, &g, mass, args.tol)?;
        max_relative = max_relative.max(report.relative_error);
        relative_errors.push(report.relative_error);
        if first_pair.is_none() {
            first_pair = Some((f, g));
        }
    }

    // Adding a pure gradient to one argument must leave the inner product
    // unchanged: the longitudinal part decouples.
    let (f, g) = first_pair.expect("pairs >= 1");
    let chi = random_bump(&mut rng)?;
    let fv = VectorTestFunction::transverse_from_scalar(&f, mass);
    let gv = VectorTestFunction::transverse_from_scalar(&g, mass);
    let base = proca_inner(&fv, &gv, mass, args.tol)?.value;
    let shifted = proca_inner(&fv.add(&VectorTestFunction::gradient_of(&chi)), &gv, mass, args.tol)?.value;
    let longitudinal_shift = (shifted - base).norm();

    // The transverse Proca correlator delegates to the scalar pipeline, so
    // the tagged values must agree bit for bit.
    let point = ModularParams::new(0.998634, 0.00100492, 0.318599)?;
    let scalar = chsh_base(&point)?;
    let proca = proca_chsh_base(&point)?;
    let bit_identical = scalar.chsh.to_bits() == proca.chsh.to_bits()
        && scalar.script_p.to_bits() == proca.script_p.to_bits();

    let pass = max_relative < 100.0 * args.tol
        && longitudinal_shift < 10.0 * args.tol
        && bit_identical;
    Ok(CommandOutput {
        subcommand: "proca-check",
        inputs: json!({
            "mass": args.mass,
            "tol": args.tol,
            "pairs": args.pairs,
            "seed": args.seed,
        }),
        outputs: json!({
            "relative_errors": relative_errors,
            "max_relative_error": max_relative,
            "longitudinal_shift": longitudinal_shift,
            "proca_scalar_bit_identical": bit_identical,
            "pass": pass,
        }),
        error_estimates: json!({
            "inner_products": args.tol,
        }),
        csv: None,
        numerical_failure: !pass,
    })
}

fn parse_axis(spec: &str, which: &str) -> Result<AxisSpec, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(Failure::Config(format!(
            "{which} must look like name:lo:hi:n, got '{spec}'"
        )));
    }
    let axis = match parts[0] {
        "lambda" => SurfaceAxis::Lambda,
        "eta" => SurfaceAxis::Eta,
        "eta-prime" | "eta_prime" => SurfaceAxis::EtaPrime,
        other => {
            return Err(Failure::Config(format!(
                "{which} names an unknown axis '{other}'; use lambda, eta, or eta-prime"
            )))
        }
    };
    let lo = f64::from_str(parts[1])
        .map_err(|_| Failure::Config(format!("{which} has a bad lower bound '{}'", parts[1])))?;
    let hi = f64::from_str(parts[2])
        .map_err(|_| Failure::Config(format!("{which} has a bad upper bound '{}'", parts[2])))?;
    let n = usize::from_str(parts[3])
        .map_err(|_| Failure::Config(format!("{which} has a bad resolution '{}'", parts[3])))?;
    Ok(AxisSpec { axis, lo, hi, n })
}

fn axis_json(a: &AxisSpec) -> Value {
    json!({ "name": a.axis.name(), "lo": a.lo, "hi": a.hi, "n": a.n })
}

fn surface(args: &SurfaceArgs) -> Result<CommandOutput, Failure> {
    let axis1 = parse_axis(&args.param1, "param1")?;
    let axis2 = parse_axis(&args.param2, "param2")?;
    let fixed = ModularParams::new(args.lambda, args.eta, args.eta_prime)?;
    let grid = surface_grid(&axis1, &axis2, &fixed, &UnitaryParams::zeros())?;

    let mut csv = format!("{},{},chsh\n", axis1.axis.name(), axis2.axis.name());
    let mut rows = Vec::with_capacity(axis1.n);
    let mut max_abs = 0.0f64;
    for i in 0..axis1.n {
        let v1 = axis1.value_at(i);
        let mut row = Vec::with_capacity(axis2.n);
        for j in 0..axis2.n {
            let v2 = axis2.value_at(j);
            let chsh = grid.values[i * axis2.n + j];
            max_abs = max_abs.max(chsh.abs());
            csv.push_str(&format!("{v1},{v2},{chsh}\n"));
            row.push(chsh);
        }
        rows.push(row);
    }
    Ok(CommandOutput {
        subcommand: "surface",
        inputs: json!({
            "param1": args.param1,
            "param2": args.param2,
            "fixed": {
                "lambda": args.lambda,
                "eta": args.eta,
                "eta_prime": args.eta_prime,
            },
        }),
        outputs: json!({
            "axis1": axis_json(&axis1),
            "axis2": axis_json(&axis2),
            "values": rows,
        }),
        error_estimates: json!({ "chsh": round_off(max_abs) }),
        csv: Some(csv),
        numerical_failure: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_non_convergence_maps_to_numerical_failure() {
        let err = KernelError::NotConverged {
            value: 0.1,
            error_estimate: 1e-3,
            tolerance: 1e-8,
        };
        assert!(matches!(Failure::from(err), Failure::Numerical(_)));
        let err = KernelError::InvalidMass(-1.0);
        assert!(matches!(Failure::from(err), Failure::Config(_)));
    }

    #[test]
    fn axis_parser_accepts_both_eta_prime_spellings() {
        let a = parse_axis("eta-prime:0:1:5", "param1").unwrap();
        let b = parse_axis("eta_prime:0:1:5", "param1").unwrap();
        assert_eq!(a.axis, SurfaceAxis::EtaPrime);
        assert_eq!(b.axis, SurfaceAxis::EtaPrime);
        assert!(parse_axis("theta:0:1:5", "param1").is_err());
        assert!(parse_axis("eta:0:1", "param1").is_err());
        assert!(parse_axis("eta:0:x:5", "param1").is_err());
    }

    #[test]
    fn optimize_rejects_degenerate_start_counts() {
        let args = OptimizeArgs { target: Target::Base, starts: Some(1), seed: 17 };
        assert!(matches!(optimize(&args), Err(Failure::Config(_))));
    }
}
