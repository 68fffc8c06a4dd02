//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nhq::{Scenario, ScenarioConfig};
use nhq_core::dynamics::{normalize, propagate, propagate_rho};
use nhq_core::entropy::EntropySample;
use nhq_core::wigner::{propagate_field, Sequential, WignerField};
use nhq_core::{
    ComplexMatrix, DensityState, HermitianOperator, IntegratorSpec, NonHermitianHamiltonian, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    id: &'static str,
    what: &'static str,
    value: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

fn preset(name: &str, overrides: &[&str]) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name);
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    Scenario::prepare(ScenarioConfig::load(&path, &o).unwrap()).unwrap()
}

/// Runs a scenario single-threaded and returns column names and rows.
fn run(s: &Scenario) -> (Vec<String>, Vec<Vec<f64>>, Duration) {
    let start = Instant::now();
    let (_, buf) = s.run(Vec::new(), &Sequential).unwrap();
    let elapsed = start.elapsed();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows, elapsed)
}

fn col(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

fn max_dev(a: &[f64], b: impl Fn(usize) -> f64) -> f64 {
    a.iter()
        .enumerate()
        .map(|(i, x)| (x - b(i)).abs())
        .fold(0.0, f64::max)
}

fn random_model(seed: u64) -> (NonHermitianHamiltonian, HermitianOperator) {
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = |r: &mut ChaCha8Rng| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        h[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = c(&mut rng);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let gram = |rng: &mut ChaCha8Rng| {
        let mut a = ComplexMatrix::zeros(n);
        for v in a.as_mut_slice() {
            *v = c(rng);
        }
        a.matmul(&a.adjoint())
    };
    let mut g = gram(&mut rng).scale(0.4 / n as f64);
    g.axpy(0.02, &ComplexMatrix::identity(n));
    let mut rho = gram(&mut rng);
    rho.axpy(0.3, &ComplexMatrix::identity(n));
    let tr = rho.trace().re;
    let model = NonHermitianHamiltonian::new(
        HermitianOperator::new(h).unwrap(),
        HermitianOperator::new(g).unwrap(),
    )
    .unwrap();
    (model, HermitianOperator::new(rho.scale(1.0 / tr)).unwrap())
}

type Series = fn(&EntropySample) -> f64;

fn samples(
    model: &NonHermitianHamiltonian,
    rho0: &HermitianOperator,
    dt: f64,
    steps: usize,
) -> Vec<EntropySample> {
    let traj = propagate(
        model,
        DensityState::new(rho0.clone(), 0.0).unwrap(),
        &IntegratorSpec::new(dt, steps).unwrap(),
    )
    .unwrap();
    traj.samples
        .iter()
        .map(|s| EntropySample::evaluate(model, s).unwrap())
        .collect()
}

/// Worst relative mismatch between a rate and the centred difference of its
/// series, endpoints excluded. Denominators are floored at 1e-3 of the
/// largest rate so that zero crossings do not dominate.
fn fd_mismatch(xs: &[EntropySample], dt: f64, value: Series, rate: Series) -> f64 {
    let floor = 1e-3 * xs.iter().map(|s| rate(s).abs()).fold(0.0, f64::max);
    xs.windows(3)
        .map(|w| {
            let fd = (value(&w[2]) - value(&w[0])) / (2.0 * dt);
            (fd - rate(&w[1])).abs() / rate(&w[1]).abs().max(floor)
        })
        .fold(0.0, f64::max)
}

fn quantum_constant_decay(out: &mut Vec<Check>) {
    let gamma0 = 1.0;
    let s = preset("qubit-constant-decay.toml", &["integrator.sample_every=1"]);
    let (h, rows, elapsed) = run(&s);
    let t = col(&h, &rows, "time");
    let decay = |i: usize| (-gamma0 * t[i]).exp();
    out.push(Check {
        id: "1",
        what: "constant-decay trace max|Tr Omega - exp(-g t)|",
        value: max_dev(&col(&h, &rows, "trace_omega"), decay),
        tol: 1e-8,
    });
    out.push(Check {
        id: "1",
        what: "constant-decay run time [s]",
        value: elapsed.as_secs_f64(),
        tol: 1.0,
    });
    out.push(Check {
        id: "2",
        what: "max|S_vN|",
        value: max_dev(&col(&h, &rows, "s_vn"), |_| 0.0),
        tol: 1e-8,
    });
    out.push(Check {
        id: "2",
        what: "max|S_NH - g t|",
        value: max_dev(&col(&h, &rows, "s_nh"), |i| gamma0 * t[i]),
        tol: 1e-6,
    });
    out.push(Check {
        id: "2",
        what: "max|S_lin|",
        value: max_dev(&col(&h, &rows, "s_lin"), |_| 0.0),
        tol: 1e-8,
    });
    out.push(Check {
        id: "3",
        what: "max|S_lin^NH - (1 - exp(-g t))|",
        value: max_dev(&col(&h, &rows, "s_lin_nh"), |i| 1.0 - decay(i)),
        tol: 1e-6,
    });

    // run long enough for exp(-g t) to drop below the tolerance
    let s = preset(
        "qubit-constant-decay.toml",
        &["integrator.steps=20000", "integrator.sample_every=1000"],
    );
    let (h, rows, _) = run(&s);
    let plateau = *col(&h, &rows, "s_lin_nh").last().unwrap();
    let purity0 = col(&h, &rows, "purity_omega")[0];
    out.push(Check {
        id: "3",
        what: "plateau |S_lin^NH(20) - Tr Omega^2(0)|",
        value: (plateau - purity0).abs(),
        tol: 1e-6,
    });
}

fn random_models(out: &mut Vec<Check>) {
    let dt = 2.5e-4;
    let (mut identity, mut rate) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let (model, rho0) = random_model(seed);
        assert!(model.constant_decay_rate().is_none());
        let xs = samples(&model, &rho0, dt, 8000);
        for s in &xs {
            identity = identity.max(s.identity_defect(model.kb()));
        }
        let checks: [(Series, Series); 4] = [
            (|s| s.s_vn, |s| s.rate_vn),
            (|s| s.s_nh, |s| s.rate_nh),
            (|s| s.s_lin, |s| s.rate_lin),
            (|s| s.s_lin_nh, |s| s.rate_lin_nh),
        ];
        for (v, r) in checks {
            rate = rate.max(fd_mismatch(&xs, dt, v, r));
        }
    }
    out.push(Check {
        id: "4",
        what: "max|S_vN - S_NH - k_B ln Tr Omega| (20 models)",
        value: identity,
        tol: 1e-8,
    });
    out.push(Check {
        id: "5",
        what: "max relative rate vs centred difference (20 models)",
        value: rate,
        tol: 1e-4,
    });
}

fn cross_path(out: &mut Vec<Check>) {
    let spec = IntegratorSpec::new(1e-3, 5000).unwrap();
    let mut worst = 0.0f64;
    for seed in 100..105 {
        let (model, rho0) = random_model(seed);
        let omega =
            propagate(&model, DensityState::new(rho0.clone(), 0.0).unwrap(), &spec).unwrap();
        let rho = propagate_rho(&model, &rho0, &spec).unwrap();
        for (a, b) in omega.samples.iter().zip(&rho) {
            worst = worst.max(normalize(a).unwrap().matrix().max_abs_diff(b.matrix()));
        }
    }
    out.push(Check {
        id: "6",
        what: "max entrywise |normalize(Omega) - rho| over t in [0, 5]",
        value: worst,
        tol: 1e-6,
    });
}

fn wigner_constant_decay(out: &mut Vec<Check>) {
    let gamma0 = 0.5;
    let s = preset("wigner-constant-decay.toml", &["integrator.sample_every=1"]);
    let (h, rows, elapsed) = run(&s);
    let t = col(&h, &rows, "time");
    assert!((t.last().unwrap() - 3.0).abs() < 1e-9);
    let decay = |i: usize| (-gamma0 * t[i]).exp();
    out.push(Check {
        id: "7",
        what: "max|tilde_trace - exp(-g t)|",
        value: max_dev(&col(&h, &rows, "tilde_trace"), decay),
        tol: 1e-4,
    });
    out.push(Check {
        id: "7",
        what: "phase-space run time, one thread [s]",
        value: elapsed.as_secs_f64(),
        tol: 60.0,
    });
    let slw = col(&h, &rows, "s_lin_w");
    out.push(Check {
        id: "8",
        what: "max|S_lin,W(t) - S_lin,W(0)|",
        value: max_dev(&slw, |_| slw[0]),
        tol: 1e-4,
    });
    let (_, field0) = s.wigner.as_ref().unwrap();
    let purity0 = nhq_core::wigner::phase_space_unit(1.0, 1) * field0.tilde_trace_square();
    out.push(Check {
        id: "8",
        what: "max|S_lin,W^NH - K Tr~[Omega_W(0)^2](1 - exp(-g t))|",
        value: max_dev(&col(&h, &rows, "s_lin_w_nh"), |i| {
            purity0 * (1.0 - decay(i))
        }),
        tol: 1e-3,
    });
}

fn wigner_snapshots(gamma0: f64) -> Vec<WignerField> {
    let s = preset(
        "wigner-constant-decay.toml",
        &[&format!("decay.gamma0={gamma0:?}")],
    );
    let (rhs, field) = s.wigner.as_ref().unwrap();
    let it = s.config.integrator;
    propagate_field(
        rhs,
        field.clone(),
        &IntegratorSpec::new(it.dt, it.steps).unwrap(),
        10,
        &Sequential,
    )
    .unwrap()
}

fn factorization(out: &mut Vec<Check>) {
    let gamma0 = 0.5;
    let free = wigner_snapshots(0.0);
    let damped = wigner_snapshots(gamma0);
    assert_eq!(free.len(), damped.len());
    let worst = free
        .iter()
        .zip(&damped)
        .map(|(a, b)| b.max_abs_diff(&a.scale((-gamma0 * a.time()).exp())))
        .fold(0.0, f64::max);
    out.push(Check {
        id: "9",
        what: "max entrywise |Omega_W[g] - exp(-g t) Omega_W[0]|",
        value: worst,
        tol: 1e-8,
    });

    let tr = free
        .iter()
        .map(|f| (f.tilde_trace() - free[0].tilde_trace()).abs())
        .fold(0.0, f64::max);
    let sq = free
        .iter()
        .map(|f| (f.tilde_trace_square() - free[0].tilde_trace_square()).abs())
        .fold(0.0, f64::max);
    out.push(Check {
        id: "10",
        what: "phase-space unitary Tr~ Omega drift",
        value: tr,
        tol: 1e-9,
    });
    out.push(Check {
        id: "10",
        what: "phase-space unitary Tr~ Omega^2 drift",
        value: sq,
        tol: 1e-8,
    });
}

fn quantum_unitary(out: &mut Vec<Check>) {
    let (model, rho0) = random_model(7);
    let unitary =
        NonHermitianHamiltonian::new(model.h().clone(), HermitianOperator::zeros(3)).unwrap();
    let xs = samples(&unitary, &rho0, 1e-3, 5000);
    let tr = max_dev(
        &xs.iter().map(|s| s.trace_omega).collect::<Vec<_>>(),
        |_| xs[0].trace_omega,
    );
    let sq = max_dev(
        &xs.iter().map(|s| s.purity_omega).collect::<Vec<_>>(),
        |_| xs[0].purity_omega,
    );
    out.push(Check {
        id: "10",
        what: "quantum unitary Tr Omega drift",
        value: tr,
        tol: 1e-9,
    });
    out.push(Check {
        id: "10",
        what: "quantum unitary Tr Omega^2 drift",
        value: sq,
        tol: 1e-8,
    });
}

fn main() -> ExitCode {
    let mut checks = Vec::new();
    quantum_constant_decay(&mut checks);
    random_models(&mut checks);
    cross_path(&mut checks);
    wigner_constant_decay(&mut checks);
    factorization(&mut checks);
    quantum_unitary(&mut checks);

    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!c.passed());
        println!(
            "criterion {:>2}: {tag}  {}  value={:.3e}  tol={:.0e}",
            c.id, c.what, c.value, c.tol
        );
    }
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
