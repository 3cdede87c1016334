//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use ncyclo_core::dynamics::fit_angular_frequency;
use ncyclo_core::heisenberg::{CommutatorTables, Table};
use ncyclo_core::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1. Decomposition round trip against an independent eigensolver.
fn decomposition_round_trip() -> Outcome {
    let mut r = rng(1);
    let (mut worst_rec, mut worst_orth, mut worst_chi) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let n = 2 + i % 7;
        let h = random_field(&mut r, n);
        let form = decompose(&h, &GammaTensor::identity(n)).map_err(|e| e.to_string())?;
        let rec = form.reconstruction_residual(&h) / h.frobenius_norm();
        let orth = form.orthonormality_residual();
        let oracle = eigen_oracle_chis(h.matrix(), 1e-7);
        check(oracle.len() == form.block_count(), || {
            format!("case {i}: block count {} vs oracle {}", form.block_count(), oracle.len())
        })?;
        let chi_err = oracle
            .iter()
            .zip(form.chis())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_rec = worst_rec.max(rec);
        worst_orth = worst_orth.max(orth);
        worst_chi = worst_chi.max(chi_err);
    }
    check(worst_rec <= 1e-10, || format!("reconstruction {worst_rec:e}"))?;
    check(worst_orth <= 1e-10, || format!("orthonormality {worst_orth:e}"))?;
    check(worst_chi <= 1e-8, || format!("chi vs oracle {worst_chi:e}"))?;
    Ok(format!(
        "rel. reconstruction {worst_rec:.1e}, |B^T B - I| {worst_orth:.1e}, chi error {worst_chi:.1e}"
    ))
}

fn table_deviation(a: &Table, b: &Table) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
}

/// 2. Commutator identities in small-integer (exact) and float mode.
fn commutator_identities() -> Outcome {
    let mut r = rng(2);
    for i in 0..100 {
        let n = 2 + i % 6;
        let a = GaugeMatrix::new(random_integer_matrix(&mut r, n, 7)).unwrap();
        let q = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0][r.random_range(0..6)];
        let c = PhysicalConstants::new(1.0, q, 1.0, 1.0).unwrap();
        let tables = CommutatorTables::compute(&a, &c).map_err(|e| e.to_string())?;
        let dev = tables.deviations(&a, &c);
        check(dev.max() == 0.0, || format!("integer case {i}: {dev:?}"))?;
    }
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 7;
        let a = random_gauge(&mut r, n);
        let c = PhysicalConstants::new(
            r.random_range(0.5..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(0.5..2.0),
            r.random_range(0.5..2.0),
        )
        .unwrap();
        let tables = CommutatorTables::compute(&a, &c).map_err(|e| e.to_string())?;
        worst = worst.max(tables.deviations(&a, &c).max());
    }
    check(worst <= 1e-12, || format!("float mode deviation {worst:e}"))?;
    Ok(format!("integer mode exact, float mode max deviation {worst:.1e}"))
}

fn relative_change(v: &DVector<f64>, v0: &DVector<f64>, scale: f64) -> f64 {
    (v - v0).amax() / scale
}

/// 3. Dual momentum and orbit centers are conserved over 10^4 steps.
fn conservation() -> Outcome {
    let mut r = rng(3);
    let steps = 10_000;
    let dt = 0.01;
    let (mut worst_dual, mut worst_center) = (0.0f64, 0.0f64);
    for n in [2usize, 3, 4, 5] {
        let h = random_field(&mut r, n);
        let g = MetricTensor::euclidean(n);
        let c = PhysicalConstants::new(1.2, -0.8, 1.1, 1.0).unwrap();
        let s = random_state(&mut r, n);
        let k = dynamics_matrix(&h, &g, &c).unwrap();
        let form = decompose(&h, &GammaTensor::identity(n)).unwrap();
        let exact = ExactPropagator::new(&k, &g, &c, dt)
            .and_then(|p| p.trajectory(&s, steps))
            .map_err(|e| e.to_string())?;
        let rk4 = evolve_rk4(&s, &k, &g, &c, dt, steps).map_err(|e| e.to_string())?;
        let d0 = dual_momentum_value(&s, &h, &c).unwrap();
        let scale = d0.amax().max(s.p.amax());
        let o0 = orbit_decomposition(&s, &form, &h, &g, &c).unwrap();
        let center_scale = o0.centers.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for traj in [&exact, &rk4] {
            for st in traj.iter() {
                let d = dual_momentum_value(st, &h, &c).unwrap();
                worst_dual = worst_dual.max(relative_change(&d, &d0, scale));
                let o = orbit_decomposition(st, &form, &h, &g, &c).unwrap();
                for (a, b) in o.centers.iter().zip(&o0.centers) {
                    let diff = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
                    worst_center = worst_center.max(diff / center_scale);
                }
            }
        }
    }
    check(worst_dual <= 1e-10, || format!("dual momentum drift {worst_dual:e}"))?;
    check(worst_center <= 1e-10, || format!("center drift {worst_center:e}"))?;
    Ok(format!(
        "max rel. p^T drift {worst_dual:.1e}, max rel. center drift {worst_center:.1e}"
    ))
}

/// 4. Three-dimensional field reduces to textbook cyclotron motion.
fn textbook_reduction() -> Outcome {
    let b0 = 1.7;
    let h = field_from_3d_vector([0.0, 0.0, b0]);
    let g = MetricTensor::euclidean(3);
    let mut worst_freq = 0.0f64;
    let mut worst_axis = 0.0f64;
    for c in [
        PhysicalConstants::default(),
        PhysicalConstants::new(2.5, -1.5, 3.0, 1.0).unwrap(),
        PhysicalConstants::new(0.4, 0.9, 0.7, 2.0).unwrap(),
    ] {
        let expected = c.charge.abs() * b0 / (c.mass * c.light_speed);
        let form = decompose(&h, &GammaTensor::identity(3)).unwrap();
        let spectral = cyclotron_frequencies(&form, &c);
        check(spectral.len() == 1, || format!("expected one block, got {spectral:?}"))?;
        worst_freq = worst_freq.max((spectral[0] - expected).abs());

        let s = ParticleState::new(vec![0.3, -0.2, 1.0], vec![0.8, 0.5, 0.6]).unwrap();
        let k = dynamics_matrix(&h, &g, &c).unwrap();
        let samples = 600;
        let dt = 3.0 * TAU / expected / samples as f64;
        let traj = ExactPropagator::new(&k, &g, &c, dt)
            .and_then(|p| p.trajectory(&s, samples))
            .map_err(|e| e.to_string())?;
        let times: Vec<f64> = traj.iter().map(|st| st.t).collect();
        let relatives: Vec<[f64; 2]> = traj
            .iter()
            .map(|st| orbit_decomposition(st, &form, &h, &g, &c).unwrap().relatives[0])
            .collect();
        let measured = fit_angular_frequency(&times, &relatives).ok_or("frequency fit failed")?;
        worst_freq = worst_freq.max((measured.abs() - expected).abs());

        let v3 = s.p[2] / c.mass;
        for st in &traj {
            worst_axis = worst_axis.max((st.x[2] - s.x[2] - v3 * st.t).abs());
        }
    }
    check(worst_freq <= 1e-8, || format!("frequency error {worst_freq:e}"))?;
    check(worst_axis <= 1e-10, || format!("axial motion non-uniform by {worst_axis:e}"))?;
    Ok(format!(
        "frequency error {worst_freq:.1e}, axial deviation {worst_axis:.1e}"
    ))
}

/// 5. RK4 endpoint converges to the exact solution at fourth order.
fn rk4_convergence() -> Outcome {
    let h = field_from_3d_vector([0.0, 0.0, 1.3]);
    let g = MetricTensor::euclidean(3);
    let c = PhysicalConstants::new(1.1, -0.9, 1.0, 1.0).unwrap();
    let k = dynamics_matrix(&h, &g, &c).unwrap();
    let s = ParticleState::new(vec![0.1, 0.2, 0.3], vec![0.7, -0.4, 0.2]).unwrap();
    let period = TAU / (c.charge.abs() * 1.3 / (c.mass * c.light_speed));
    let exact = evolve_exact(&s, &k, &g, &c, period).map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    let mut previous: Option<f64> = None;
    let mut constants = Vec::new();
    for steps in [50usize, 100, 200, 400] {
        let dt = period / steps as f64;
        let traj = evolve_rk4(&s, &k, &g, &c, dt, steps).map_err(|e| e.to_string())?;
        let err = (&traj.last().unwrap().x - &exact.x).norm();
        constants.push(err / dt.powi(4));
        if let Some(prev) = previous {
            let ratio = prev / err;
            report.push(format!("{ratio:.2}"));
            check((ratio - 16.0).abs() <= 0.2 * 16.0, || {
                format!("ratio {ratio} at {steps} steps")
            })?;
        }
        previous = Some(err);
    }
    let c0 = constants[0];
    check(constants.iter().all(|&ci| ci <= 1.2 * c0), || {
        format!("error constants {constants:?}")
    })?;
    Ok(format!("halving ratios [{}], C = {c0:.2e}", report.join(", ")))
}

/// 6. Canonical identity, center/relative split and energy split.
fn decomposition_identity() -> Outcome {
    let mut r = rng(6);
    let (mut w_theta, mut w_split, mut w_energy) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..500 {
        let n = 2 + i % 7;
        let h = random_field(&mut r, n);
        let s = random_state(&mut r, n);
        let c = PhysicalConstants::new(
            r.random_range(0.5..2.0),
            r.random_range(0.5..2.0),
            r.random_range(0.5..2.0),
            1.0,
        )
        .unwrap();
        let g = MetricTensor::euclidean(n);
        let form = decompose(&h, &GammaTensor::identity(n)).unwrap();
        let orbit = orbit_decomposition(&s, &form, &h, &g, &c).map_err(|e| e.to_string())?;
        w_theta = w_theta.max(orbit.coords.identity_residual(&form));
        w_split = w_split.max(orbit.split_residual());
        let total = kinetic_energy(&s, &g, &c).unwrap();
        w_energy = w_energy.max((orbit.total_split_energy() - total).abs());
    }
    check(w_theta <= 1e-10, || format!("Theta xi residual {w_theta:e}"))?;
    check(w_split <= 1e-10, || format!("center + relative residual {w_split:e}"))?;
    check(w_energy <= 1e-12, || format!("energy split residual {w_energy:e}"))?;
    Ok(format!(
        "Theta xi {w_theta:.1e}, split {w_split:.1e}, energy {w_energy:.1e}"
    ))
}

/// 7. Discreteness classification.
fn spectrum_classification() -> Outcome {
    let mut r = rng(7);
    let c = PhysicalConstants::default();
    let classify = |h: &FieldTensor| {
        let n = h.dim();
        classify_spectrum(
            &decompose(h, &GammaTensor::identity(n)).unwrap(),
            &c,
            &MetricTensor::euclidean(n),
        )
    };
    let two = classify(&random_field(&mut r, 2));
    check(two.fully_discrete() == Some(true), || format!("n = 2: {two:?}"))?;
    let three = classify(&random_field(&mut r, 3));
    check(
        three.fully_discrete() == Some(false) && three.free_count == 1,
        || format!("n = 3: {three:?}"),
    )?;
    let four = classify(&random_field(&mut r, 4));
    check(
        four.block_count == 2 && four.fully_discrete() == Some(true),
        || format!("n = 4: {four:?}"),
    )?;
    Ok("n=2 discrete, n=3 one continuous direction, n=4 discrete".into())
}

/// 8. Antisymmetric and triangular gauges give identical physics.
fn gauge_invariance() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for n in 2..=7 {
        let h = random_field(&mut r, n);
        let c = PhysicalConstants::new(1.3, 0.7, 1.9, 1.1).unwrap();
        let g = MetricTensor::euclidean(n);
        let (a1, a2) = (gauge_antisymmetric(&h), gauge_triangular(&h));
        let (h1, h2) = (field_from_gauge(&a1), field_from_gauge(&a2));
        worst = worst.max((h1.matrix() - h2.matrix()).amax());

        let t1 = CommutatorTables::compute(&a1, &c).unwrap();
        let t2 = CommutatorTables::compute(&a2, &c).unwrap();
        worst = worst.max(table_deviation(&t1.momentum, &t2.momentum));
        worst = worst.max(table_deviation(&t1.dual, &t2.dual));
        worst = worst.max(table_deviation(&t1.mixed, &t2.mixed));

        let s = random_state(&mut r, n);
        let run = |h: &FieldTensor| {
            let k = dynamics_matrix(h, &g, &c).unwrap();
            ExactPropagator::new(&k, &g, &c, 0.05)
                .and_then(|p| p.trajectory(&s, 200))
                .unwrap()
        };
        for (u, v) in run(&h1).iter().zip(run(&h2).iter()) {
            worst = worst.max((&u.x - &v.x).amax()).max((&u.p - &v.p).amax());
        }

        let spec = |h: &FieldTensor| {
            classify_spectrum(&decompose(h, &GammaTensor::identity(n)).unwrap(), &c, &g)
        };
        let (s1, s2) = (spec(&h1), spec(&h2));
        check(s1.block_count == s2.block_count, || format!("n={n}: block counts differ"))?;
        for (u, v) in s1.omegas.iter().zip(&s2.omegas) {
            worst = worst.max((u - v).abs());
        }
    }
    check(worst <= 1e-12, || format!("max gauge discrepancy {worst:e}"))?;
    Ok(format!("max discrepancy {worst:.1e}"))
}

/// 9. Magnetic-translation phase is an antisymmetric additive cocycle.
fn translation_cocycle() -> Outcome {
    let mut r = rng(9);
    let (mut w_anti, mut w_cocycle) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let n = 2 + i % 7;
        let h = random_field(&mut r, n);
        let c = PhysicalConstants::default();
        let (x, y, z) = (
            random_vector(&mut r, n, 1.0),
            random_vector(&mut r, n, 1.0),
            random_vector(&mut r, n, 1.0),
        );
        let phi = |a: &DVector<f64>, b: &DVector<f64>| translation_phase(a, b, &h, &c).unwrap();
        w_anti = w_anti.max((phi(&x, &y) + phi(&y, &x)).abs());
        let lhs = phi(&x, &y) + phi(&(&x + &y), &z);
        let rhs = phi(&y, &z) + phi(&x, &(&y + &z));
        w_cocycle = w_cocycle.max((lhs - rhs).abs());
    }
    check(w_anti <= 1e-12, || format!("antisymmetry {w_anti:e}"))?;
    check(w_cocycle <= 1e-12, || format!("cocycle {w_cocycle:e}"))?;
    Ok(format!("antisymmetry {w_anti:.1e}, cocycle {w_cocycle:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("decomposition round trip", decomposition_round_trip),
        ("commutator identities", commutator_identities),
        ("conservation of p^T and centers", conservation),
        ("3-D textbook reduction", textbook_reduction),
        ("RK4 vs exact, 4th order", rk4_convergence),
        ("canonical identities and energy split", decomposition_identity),
        ("spectrum classification", spectrum_classification),
        ("gauge invariance", gauge_invariance),
        ("translation cocycle", translation_cocycle),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS  [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
