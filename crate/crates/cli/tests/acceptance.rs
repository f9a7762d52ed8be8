//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, LN_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qmeas_core::experiments::{
    chsh_pasted_aspect, chsh_single_setup, martens_sweep, whichway_povm, EprBellConfig, WhichWayConfig,
};
use qmeas_core::nonideality::{check_heisenberg, recover_nonideality};
use qmeas_core::povm::{is_pvm, marginal, validate_povm, Axis, Povm};
use qmeas_core::premeasurement::{
    controlled_shift, induced_povm, pointer_consistency, PremeasurementModel,
};
use qmeas_core::state::{
    entangled_pair_state, polarization_projector, polarization_pvm, pure_state, pure_state_real,
    spectral_pvm, DensityOperator, Pvm,
};
use qmeas_core::Operator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_matrix(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::from_vec(dim, (0..dim * dim).map(|_| complex(rng)).collect()).unwrap()
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Operator {
    random_matrix(rng, dim).hermitian_part()
}

fn random_density(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let a = random_matrix(rng, dim);
    let aa = &a * &a.adjoint();
    let tr = aa.trace().re;
    DensityOperator::new(aa.scale_real(1.0 / tr)).unwrap()
}

/// Modified Gram-Schmidt on the columns of a random matrix.
fn random_unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex(rng)).collect();
        for c in &cols {
            let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut u = Operator::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

fn within(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{label} took {elapsed:?}, limit {limit:?}"))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (theta, theta_prime) = (0.0, FRAC_PI_4);
    let mut worst: f64 = 0.0;
    for k in 0..=10 {
        let gamma = k as f64 / 10.0;
        let grid = whichway_povm(&WhichWayConfig::new(theta, theta_prime, gamma).unwrap()).unwrap();
        let lambda =
            recover_nonideality(&marginal(&grid, Axis::Row), &Povm::from(&polarization_pvm(theta))).unwrap();
        let mu = recover_nonideality(&marginal(&grid, Axis::Col), &Povm::from(&polarization_pvm(theta_prime)))
            .unwrap();
        let lambda_expected = [[gamma, 0.0], [1.0 - gamma, 1.0]];
        let mu_expected = [[1.0 - gamma, 0.0], [gamma, 1.0]];
        for m in 0..2 {
            for n in 0..2 {
                worst = worst.max((lambda.get(m, n) - lambda_expected[m][n]).abs());
                worst = worst.max((mu.get(m, n) - mu_expected[m][n]).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    if worst >= 1e-6 {
        return Err(format!("max entry error {worst:e} >= 1e-6"));
    }
    within("recovery", elapsed, Duration::from_secs(1))?;
    Ok(format!("11 gamma values, max entry error {worst:.2e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rows = martens_sweep(0.0, FRAC_PI_4, 101).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if rows.len() != 101 {
        return Err(format!("{} rows", rows.len()));
    }
    let (first, last, mid) = (rows[0], rows[100], rows[50]);
    let endpoint_error = [
        (first.j_lambda - LN_2).abs(),
        first.j_mu.abs(),
        last.j_lambda.abs(),
        (last.j_mu - LN_2).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if endpoint_error >= 1e-6 {
        return Err(format!("endpoint error {endpoint_error:e}"));
    }
    if let Some(r) = rows[1..100].iter().find(|r| r.slack <= 0.0) {
        return Err(format!("interior point gamma={} has slack {:e}", r.gamma, r.slack));
    }
    let midpoint = 0.75 * 3f64.ln() - 0.5 * LN_2;
    let mid_error = (mid.j_lambda - midpoint).abs().max((mid.j_mu - midpoint).abs());
    if mid_error >= 1e-6 {
        return Err(format!("midpoint ({}, {}) vs {midpoint}", mid.j_lambda, mid.j_mu));
    }
    within("sweep", elapsed, Duration::from_secs(5))?;
    let min_interior = rows[1..100].iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "endpoint error {endpoint_error:.2e}, midpoint J = {:.6}, min interior slack {min_interior:.3e}, {elapsed:.2?}",
        mid.j_lambda
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let theta = rng.gen_range(0.0..PI);
        let theta_prime = rng.gen_range(0.0..PI);
        let rows = martens_sweep(theta, theta_prime, 101).map_err(|e| e.to_string())?;
        worst = rows.iter().map(|r| r.slack).fold(worst, f64::min);
    }
    let elapsed = start.elapsed();
    if worst < -1e-6 {
        return Err(format!("min slack {worst:e} < -1e-6"));
    }
    within("property suite", elapsed, Duration::from_secs(60))?;
    Ok(format!("100 angle pairs x 101 gamma, min slack {worst:.3e}, {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=4);
        let rho = random_density(&mut rng, dim);
        let a = random_hermitian(&mut rng, dim);
        let b = random_hermitian(&mut rng, dim);
        let report = check_heisenberg(&rho, &a, &b).map_err(|e| e.to_string())?;
        worst = worst.min(report.slack);
    }
    if worst < -1e-9 {
        return Err(format!("min slack {worst:e} < -1e-9"));
    }
    let up = pure_state_real(&[1.0, 0.0]).unwrap();
    let sx = Operator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let sy = Operator::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ])
    .unwrap();
    let spin = check_heisenberg(&up, &sx, &sy).map_err(|e| e.to_string())?;
    // Hand value: Δσx = Δσy = 1 and |⟨[σx, σy]⟩|/2 = |⟨2iσz⟩|/2 = 1.
    if (spin.lhs - 1.0).abs() > 1e-9 || (spin.rhs - 1.0).abs() > 1e-9 || spin.slack.abs() > 1e-9 {
        return Err(format!("spin-1/2 case lhs {} rhs {} slack {:e}", spin.lhs, spin.rhs, spin.slack));
    }
    Ok(format!("1000 triples, min slack {worst:.3e}; spin-1/2 slack {:.1e}", spin.slack))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let d_o = 2;
        let d_a = if k % 2 == 0 { 2 } else { 3 };
        let rho_a = random_density(&mut rng, d_a);
        let u = random_unitary(&mut rng, d_o * d_a);
        let pointer = spectral_pvm(&random_hermitian(&mut rng, d_a)).map_err(|e| e.to_string())?;
        let model = PremeasurementModel::new(rho_a, u, pointer, d_o).map_err(|e| e.to_string())?;
        let rho_o = random_density(&mut rng, d_o);
        worst = worst.max(pointer_consistency(&rho_o, &model).map_err(|e| e.to_string())?);
    }
    if worst >= 1e-9 {
        return Err(format!("max consistency residual {worst:e} >= 1e-9"));
    }
    let ready = pure_state_real(&[1.0, 0.0]).unwrap();
    let computational = Pvm::new(vec![Operator::diag(&[1.0, 0.0]), Operator::diag(&[0.0, 1.0])], vec![0.0, 1.0])
        .map_err(|e| e.to_string())?;
    let model = PremeasurementModel::new(ready, controlled_shift(2, 2), computational.clone(), 2)
        .map_err(|e| e.to_string())?;
    let povm = induced_povm(&model).map_err(|e| e.to_string())?;
    let ideal_error = povm
        .effects()
        .iter()
        .zip(computational.projectors())
        .map(|(m, p)| m.distance_max(p))
        .fold(0.0, f64::max);
    if ideal_error >= 1e-9 {
        return Err(format!("CNOT model deviates from the ideal PVM by {ideal_error:e}"));
    }
    Ok(format!("500 models, max residual {worst:.2e}; CNOT deviation {ideal_error:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut largest: f64 = 0.0;
    for _ in 0..2000 {
        let rho = if rng.gen_bool(0.5) {
            random_density(&mut rng, 4)
        } else {
            let v: Vec<Complex64> = (0..4).map(|_| complex(&mut rng)).collect();
            pure_state(&v).unwrap()
        };
        let arm = |rng: &mut ChaCha8Rng| {
            WhichWayConfig::new(
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..PI),
                rng.gen_range(0.01..0.99),
            )
            .unwrap()
        };
        let c = EprBellConfig::new(arm(&mut rng), arm(&mut rng)).unwrap();
        let result = chsh_single_setup(&rho, &c).map_err(|e| e.to_string())?;
        largest = largest.max(result.s_value.abs());
    }
    if largest > 2.0 + 1e-9 {
        return Err(format!("|S| reached {largest}"));
    }
    Ok(format!("2000 trials, max |S| = {largest:.6}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let d = PI / 180.0;
    let result = chsh_pasted_aspect(&entangled_pair_state(), 0.0, 45.0 * d, 22.5 * d, 67.5 * d)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = 2.0 * 2f64.sqrt();
    if (result.s_value - expected).abs() >= 1e-6 || !result.violates {
        return Err(format!("S = {}, violates = {}", result.s_value, result.violates));
    }
    within("pasted CHSH", elapsed, Duration::from_secs(1))?;
    Ok(format!("S = {:.9}, violates = true, {elapsed:.2?}", result.s_value))
}

fn criterion_8() -> Outcome {
    let theta = 0.0;
    let grid = whichway_povm(&WhichWayConfig::new(theta, FRAC_PI_4, 0.5).unwrap()).map_err(|e| e.to_string())?;
    let flat = grid.flatten();
    if is_pvm(&flat) {
        return Err("which-way POVM at gamma = 0.5 reported as a PVM".into());
    }
    let scaled = polarization_projector(theta).scale_real(0.5);
    let squared = &scaled * &scaled;
    let gap = scaled.distance_max(&squared);
    if gap < 0.2 {
        return Err(format!("gamma E differs from its square only by {gap:e}"));
    }
    for k in 0..=100 {
        let gamma = k as f64 / 100.0;
        let grid = whichway_povm(&WhichWayConfig::new(theta, FRAC_PI_4, gamma).unwrap()).map_err(|e| e.to_string())?;
        validate_povm(grid.flatten().effects().to_vec()).map_err(|e| format!("gamma = {gamma}: {e}"))?;
    }
    Ok(format!("is_pvm false at gamma = 0.5, |gE - (gE)^2| = {gap}; 101 flattened grids validate"))
}

fn criterion_9() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_qmeas");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        (
            "sample",
            r#"{"kind":"sample","arm1":{"theta_deg":0,"theta_prime_deg":45,"gamma":0.5},
               "arm2":{"theta_deg":22.5,"theta_prime_deg":67.5,"gamma":0.5},"n_samples":100000,"seed":2024}"#,
        ),
        ("martens-sweep", r#"{"kind":"martens-sweep"}"#),
        ("whichway", r#"{"kind":"whichway","theta_deg":0,"theta_prime_deg":45,"gamma":0.5}"#),
    ];
    let mut compared = 0;
    for (name, text) in configs {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        for format in ["csv", "json"] {
            let outputs: Vec<Vec<u8>> = (0..2)
                .map(|_| {
                    let out = Command::new(exe)
                        .args(["run", "--config"])
                        .arg(&path)
                        .args(["--format", format])
                        .output()
                        .expect("binary runs");
                    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
                    out.stdout
                })
                .collect();
            if outputs[0].is_empty() || outputs[0] != outputs[1] {
                return Err(format!("{name} ({format}) output differs between runs"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} config/format pairs byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "nonideality recovery", criterion_1),
        (2, "entropy curve", criterion_2),
        (3, "Martens property suite", criterion_3),
        (4, "Heisenberg property suite", criterion_4),
        (5, "pointer consistency", criterion_5),
        (6, "single-setup CHSH", criterion_6),
        (7, "pasted CHSH", criterion_7),
        (8, "which-way is not a PVM", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut failures = 0;
    for (number, name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("criterion {number} PASS {name}: {detail}"),
            Ok(Err(detail)) => {
                failures += 1;
                println!("criterion {number} FAIL {name}: {detail}");
            }
            Err(_) => {
                failures += 1;
                println!("criterion {number} FAIL {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
