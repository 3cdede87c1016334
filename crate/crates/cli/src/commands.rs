//! The four commands. Each returns an [`Outcome`]; `main` does the I/O.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use nalgebra::DVector;
use ncyclo_core::dynamics::{fit_angular_frequency, kinetic_energy};
use ncyclo_core::heisenberg::{CommutatorTables, Table};
use ncyclo_core::{
    classify_spectrum, cyclotron_frequencies, decompose, dual_momentum_value, dynamics_matrix,
    evolve_rk4, orbit_decomposition, CanonicalForm, ExactPropagator, ParticleState,
};
use serde_json::{json, Value};

use crate::config::{rows_of, Format, Method, RunConfig, System};

/// Default reporting tolerance for `simulate`; overridden by `NCYCLO_TOL`.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Float-mode tolerance for `verify`.
pub const VERIFY_TOL: f64 = 1e-12;
/// Relative reconstruction bound for `decompose`.
pub const DECOMPOSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// The main document (CSV or JSON).
    pub document: String,
    /// Secondary structured report (simulate in CSV mode).
    pub report: Option<String>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    /// Names of violated invariants; non-empty means exit code 1.
    pub failures: Vec<String>,
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn form_of(system: &System) -> Result<CanonicalForm> {
    Ok(decompose(&system.field, &system.gamma)?)
}

pub fn decompose_cmd(config: &RunConfig) -> Result<Outcome> {
    let system = config.system()?;
    let form = form_of(&system)?;
    let scale = system.field.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual = form.reconstruction_residual(&system.field);
    let doc = json!({
        "n": system.n,
        "N": form.block_count(),
        "free_dims": form.free_dims(),
        "chis": form.chis(),
        "basis": rows_of(form.basis()),
        "theta": rows_of(&form.theta()),
        "reconstruction_residual": residual,
        "orthonormality_residual": form.orthonormality_residual(),
        "g_singular_basis_vectors": form.g_singular_vectors(&system.metric),
        "radiation_gauge_residual": system.radiation_residual,
    });
    let mut failures = Vec::new();
    if residual > DECOMPOSE_TOL * scale {
        failures.push(format!("reconstruction residual {residual:e}"));
    }
    if form.orthonormality_residual() > DECOMPOSE_TOL {
        failures.push("basis orthonormality".into());
    }
    Ok(Outcome {
        document: pretty(&doc),
        report: None,
        notes: system.warnings,
        failures,
    })
}

pub fn spectrum_cmd(config: &RunConfig, levels: usize) -> Result<Outcome> {
    let system = config.system()?;
    let form = form_of(&system)?;
    let report = classify_spectrum(&form, &system.constants, &system.metric);
    let fully_discrete = match report.fully_discrete() {
        Some(b) => json!(b),
        None => json!("not applicable"),
    };
    let listed: Vec<Value> = report
        .lowest_levels(levels)
        .into_iter()
        .map(|l| json!({"energy": l.energy, "quantum_numbers": l.quantum_numbers}))
        .collect();
    let doc = json!({
        "n": system.n,
        "omegas": report.omegas,
        "N": report.block_count,
        "free_count": report.free_count,
        "fully_discrete": fully_discrete,
        "ground_energy": report.ground_energy,
        "levels": listed,
    });
    Ok(Outcome {
        document: pretty(&doc),
        report: None,
        notes: system.warnings,
        failures: Vec::new(),
    })
}

fn table_json(t: &Table) -> Value {
    Value::Array(
        t.iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn table_text(name: &str, t: &Table) -> String {
    let mut s = format!("{name}:\n");
    for row in t {
        let cells: Vec<String> = row
            .iter()
            .map(|z| format!("{:>10.4}{:+.4}i", z.re + 0.0, z.im + 0.0))
            .collect();
        let _ = writeln!(s, "  {}", cells.join("  "));
    }
    s
}

fn is_integral(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() < 1e6
}

pub fn verify_cmd(config: &RunConfig) -> Result<Outcome> {
    let system = config.system()?;
    let c = &system.constants;
    let tables = CommutatorTables::compute(&system.gauge, c)?;
    let dev = tables.deviations(&system.gauge, c);
    let exact_mode = system.gauge.matrix().iter().all(|&v| is_integral(v))
        && [c.charge, c.light_speed, c.hbar].iter().all(|&v| is_integral(v))
        && c.light_speed == 1.0;
    let threshold = if exact_mode { 0.0 } else { VERIFY_TOL };
    let mut failures = Vec::new();
    for (name, value) in [
        ("[p_j, p_k] = i hbar (q/c) H_jk", dev.momentum),
        ("[pT_j, pT_k] = -i hbar (q/c) H_jk", dev.dual),
        ("[p_j, pT_k] = 0", dev.mixed),
    ] {
        let ok = if exact_mode { value == 0.0 } else { value < threshold };
        if !ok {
            failures.push(format!("{name} (deviation {value:e})"));
        }
    }
    let doc = json!({
        "n": system.n,
        "exact_mode": exact_mode,
        "tolerance": threshold,
        "tables": {
            "p_p": table_json(&tables.momentum),
            "pT_pT": table_json(&tables.dual),
            "p_pT": table_json(&tables.mixed),
        },
        "max_deviation": {
            "p_p": dev.momentum,
            "pT_pT": dev.dual,
            "p_pT": dev.mixed,
        },
        "passed": failures.is_empty(),
    });
    let mut notes = system.warnings;
    notes.push(table_text("[p_j, p_k]", &tables.momentum));
    notes.push(table_text("[pT_j, pT_k]", &tables.dual));
    notes.push(table_text("[p_j, pT_k]", &tables.mixed));
    notes.push(format!(
        "max deviations: [p,p] {:e}, [pT,pT] {:e}, [p,pT] {:e}",
        dev.momentum, dev.dual, dev.mixed
    ));
    Ok(Outcome {
        document: pretty(&doc),
        report: None,
        notes,
        failures,
    })
}

/// 17 significant digits, locale-free.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn trajectory_csv(system: &System, traj: &[ParticleState]) -> Result<String> {
    let n = system.n;
    let mut out = String::from("t");
    for prefix in ["x", "p", "pT"] {
        for i in 1..=n {
            let _ = write!(out, ",{prefix}{i}");
        }
    }
    out.push_str(",E_total\n");
    for st in traj {
        let dual = dual_momentum_value(st, &system.field, &system.constants)?;
        let energy = kinetic_energy(st, &system.metric, &system.constants)?;
        out.push_str(&num(st.t));
        for v in st.x.iter().chain(st.p.iter()).chain(dual.iter()) {
            out.push(',');
            out.push_str(&num(*v));
        }
        out.push(',');
        out.push_str(&num(energy));
        out.push('\n');
    }
    Ok(out)
}

fn max_rel_drift(values: &[DVector<f64>], scale: f64) -> f64 {
    let first = &values[0];
    values
        .iter()
        .map(|v| (v - first).amax() / scale)
        .fold(0.0, f64::max)
}

pub fn simulate_cmd(config: &RunConfig, format: Format, tolerance: f64) -> Result<Outcome> {
    let system = config.system()?;
    let state = config.initial_state()?;
    let integration = config.integration()?;
    let (g, c, h) = (&system.metric, &system.constants, &system.field);
    let k = dynamics_matrix(h, g, c)?;
    let traj = match integration.method {
        Method::Exact => ExactPropagator::new(&k, g, c, integration.dt)?
            .trajectory(&state, integration.steps)?,
        Method::Rk4 => evolve_rk4(&state, &k, g, c, integration.dt, integration.steps)?,
    };

    let form = form_of(&system)?;
    let orbits = traj
        .iter()
        .map(|st| orbit_decomposition(st, &form, h, g, c))
        .collect::<Result<Vec<_>, _>>()?;
    let first = &orbits[0];
    let geometric = first.geometric_interpretation_valid;
    let omegas = cyclotron_frequencies(&form, c);
    let times: Vec<f64> = traj.iter().map(|s| s.t).collect();

    // conservation residuals
    let duals = traj
        .iter()
        .map(|st| dual_momentum_value(st, h, c))
        .collect::<Result<Vec<_>, _>>()?;
    let dual_scale = duals[0].amax().max(state.p.amax()).max(f64::MIN_POSITIVE);
    let dual_drift = max_rel_drift(&duals, dual_scale);
    let energies = traj
        .iter()
        .map(|st| kinetic_energy(st, g, c))
        .collect::<Result<Vec<_>, _>>()?;
    let e_scale = energies[0].abs().max(f64::MIN_POSITIVE);
    let energy_drift = energies
        .iter()
        .map(|e| (e - energies[0]).abs() / e_scale)
        .fold(0.0, f64::max);
    let center_scale = first
        .centers
        .iter()
        .flatten()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let center_drift = orbits
        .iter()
        .flat_map(|o| o.centers.iter().zip(&first.centers))
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) / center_scale)
        .fold(0.0, f64::max);

    let mut failures = Vec::new();
    let mut check = |name: &str, value: f64| {
        if value.is_nan() || value >= tolerance {
            failures.push(format!("{name} (residual {value:e}, tolerance {tolerance:e})"));
        }
    };
    check("dual_momentum_conservation", dual_drift);
    check("energy_conservation", energy_drift);
    check("orbit_center_conservation", center_drift);

    let mut blocks = Vec::new();
    for (l, (&chi, &omega)) in form.chis().iter().zip(&omegas).enumerate() {
        let relatives: Vec<[f64; 2]> = orbits.iter().map(|o| o.relatives[l]).collect();
        // sampling must resolve the rotation for the angle fit
        let resolvable = omega * integration.dt < std::f64::consts::PI;
        let measured = if geometric && resolvable {
            fit_angular_frequency(&times, &relatives).map(f64::abs)
        } else {
            None
        };
        let radii: Vec<f64> = relatives.iter().map(|r| r[0].hypot(r[1])).collect();
        let radius = radii[0];
        let radius_drift = radii
            .iter()
            .map(|r| (r - radius).abs() / radius.max(1.0))
            .fold(0.0, f64::max);
        if let Some(m) = measured {
            check(
                &format!("block_{}_frequency", l + 1),
                (m - omega).abs() / omega,
            );
        }
        if geometric {
            check(&format!("block_{}_radius", l + 1), radius_drift);
        }
        blocks.push(json!({
            "chi": chi,
            "omega": omega,
            "measured_omega": measured,
            "center": first.centers[l],
            "radius": radius,
            "radius_drift": radius_drift,
        }));
    }

    let last = traj.last().expect("non-empty");
    let report = json!({
        "n": system.n,
        "method": integration.method,
        "dt": integration.dt,
        "steps": integration.steps,
        "final_time": last.t,
        "geometric_interpretation_valid": geometric,
        "geometric_note": if geometric {
            "g equals gamma; blocks are independent planar rotations"
        } else {
            "geometric interpretation not valid: g differs from gamma"
        },
        "g_singular_basis_vectors": form.g_singular_vectors(g),
        "N": form.block_count(),
        "free_dims": form.free_dims(),
        "blocks": blocks,
        "free_velocity": first.free_velocity.as_slice(),
        "residuals": {
            "dual_momentum": dual_drift,
            "energy": energy_drift,
            "orbit_centers": center_drift,
        },
        "tolerance": tolerance,
        "passed": failures.is_empty(),
        "failures": failures,
    });

    let (document, report) = match format {
        Format::Csv => (trajectory_csv(&system, &traj)?, Some(pretty(&report))),
        Format::Structured => {
            let samples: Vec<Value> = traj
                .iter()
                .zip(&duals)
                .zip(&energies)
                .map(|((st, d), e)| {
                    json!({"t": st.t, "x": st.x.as_slice(), "p": st.p.as_slice(), "pT": d.as_slice(), "E_total": e})
                })
                .collect();
            (pretty(&json!({"report": report, "trajectory": samples})), None)
        }
    };
    Ok(Outcome {
        document,
        report,
        notes: system.warnings,
        failures,
    })
}

/// Ensures commands other than `simulate` only produce structured output.
pub fn require_structured(format: Format, command: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("--format csv is only supported by `simulate`, not `{command}`");
    }
    Ok(())
}
