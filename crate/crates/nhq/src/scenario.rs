use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nhq_core::dynamics::{generator_rate, Propagator};
use nhq_core::entropy::{s_lin, s_lin_nh, s_nh, s_vn, EntropySample};
use nhq_core::integrator::check_stability;
use nhq_core::oracle::{self, ConstantDecayModel};
use nhq_core::wigner::{
    phase_space_unit, FieldPropagator, RowExecutor, Sequential, WignerField, WignerRhs,
    WignerSample,
};
use nhq_core::{ComplexMatrix, DensityState, HermitianOperator, NonHermitianHamiltonian, C64};

use crate::config::{validate_config, DecayKind, InitialKind, Mode, ScenarioConfig, Violation};
use crate::error::CliError;
use crate::executor::RayonRows;
use crate::output::{config_hash, CsvSink};

pub const BASE_COLUMNS: [&str; 12] = [
    "time",
    "trace_omega",
    "purity_rho",
    "purity_omega",
    "s_vn",
    "s_nh",
    "s_lin",
    "s_lin_nh",
    "rate_vn",
    "rate_nh",
    "rate_lin",
    "rate_lin_nh",
];

pub const ANALYTIC_COLUMNS: [&str; 10] = [
    "analytic_trace",
    "analytic_s_vn",
    "analytic_s_nh",
    "analytic_s_lin",
    "analytic_s_lin_nh",
    "dev_trace",
    "dev_s_vn",
    "dev_s_nh",
    "dev_s_lin",
    "dev_s_lin_nh",
];

pub const WIGNER_COLUMNS: [&str; 6] = [
    "tilde_trace",
    "s_lin_w",
    "s_lin_w_nh",
    "rate_s_lin_w",
    "rate_s_lin_w_nh",
    "leakage",
];

pub const WIGNER_ANALYTIC_COLUMNS: [&str; 4] = [
    "analytic_qc_trace",
    "analytic_qc_s_lin_nh",
    "dev_qc_trace",
    "dev_qc_s_lin_nh",
];

/// A validated scenario with all operators built.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hash: String,
    pub model: NonHermitianHamiltonian,
    pub rho0: HermitianOperator,
    pub wigner: Option<(WignerRhs, WignerField)>,
}

fn violation(field: &str, constraint: String) -> CliError {
    CliError::Invalid(vec![Violation {
        field: field.into(),
        constraint,
    }])
}

fn initial_state(cfg: &ScenarioConfig) -> Result<HermitianOperator, CliError> {
    let init = &cfg.initial;
    let state = match init.kind {
        InitialKind::Pure => {
            let v: Vec<C64> = init
                .vector
                .as_ref()
                .expect("validated")
                .iter()
                .map(|&[a, b]| C64::new(a, b))
                .collect();
            DensityState::pure(&v)
        }
        InitialKind::Diagonal => {
            DensityState::diagonal(init.probabilities.as_ref().expect("validated"))
        }
    };
    state
        .map(|s| s.omega().clone())
        .map_err(|e| violation("initial", e.to_string()))
}

impl Scenario {
    /// Validates and builds everything; stability guards are reported as
    /// violations of `integrator.dt`.
    pub fn prepare(config: ScenarioConfig) -> Result<Self, CliError> {
        let violations = validate_config(&config);
        if !violations.is_empty() {
            return Err(CliError::Invalid(violations));
        }
        let n = config.dim;
        let units = config.units;
        let h = config
            .hamiltonian
            .build()
            .ok_or_else(|| violation("hamiltonian", "cannot build operator".into()))?;
        let gamma = match config.decay.kind {
            DecayKind::ConstantIdentity => HermitianOperator::identity(n)
                .scale(0.5 * units.hbar * config.decay.gamma0.expect("validated")),
            DecayKind::Zero => HermitianOperator::zeros(n),
            DecayKind::Matrix => {
                let rows = config.decay.matrix.as_ref().expect("validated");
                let data = rows
                    .iter()
                    .flatten()
                    .map(|&[a, b]| C64::new(a, b))
                    .collect();
                ComplexMatrix::from_vec(n, data)
                    .and_then(HermitianOperator::new)
                    .map_err(|e| violation("decay.matrix", e.to_string()))?
            }
        };
        let model =
            NonHermitianHamiltonian::with_units(h.clone(), gamma.clone(), units.hbar, units.kb)
                .map_err(|e| violation("hamiltonian", e.to_string()))?;
        let rho0 = initial_state(&config)?;
        let dt = config.integrator.dt;

        let wigner = match config.mode {
            Mode::Quantum => {
                check_stability(dt, generator_rate(&model))
                    .map_err(|e| violation("integrator.dt", e.to_string()))?;
                None
            }
            Mode::QuantumClassical => {
                let grid = config.grid().expect("validated");
                let bath = config
                    .bath
                    .as_ref()
                    .expect("validated")
                    .build(h)
                    .ok_or_else(|| violation("bath", "cannot build bath".into()))?;
                let rhs = WignerRhs::new(&bath, grid, gamma, units.hbar)
                    .map_err(|e| violation("bath", e.to_string()))?;
                rhs.check_step(dt)
                    .map_err(|e| violation("integrator.dt", e.to_string()))?;
                let w = (0.5 * units.hbar).sqrt();
                let [r0, p0] = config.initial.center.unwrap_or([0.0, 0.0]);
                let [sr, sp] = config.initial.widths.unwrap_or([w, w]);
                let field = WignerField::gaussian(&rho0, (r0, p0), (sr, sp), grid)
                    .map_err(|e| violation("initial", e.to_string()))?;
                Some((rhs, field))
            }
        };
        // the output location does not change the physics
        let hash = config_hash(
            &ScenarioConfig {
                output: Default::default(),
                ..config.clone()
            }
            .to_toml(),
        );
        Ok(Self {
            config,
            hash,
            model,
            rho0,
            wigner,
        })
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let mut c: Vec<&str> = BASE_COLUMNS.to_vec();
        let constant = self.config.decay.kind == DecayKind::ConstantIdentity;
        if self.wigner.is_some() {
            c.extend(WIGNER_COLUMNS);
            if constant {
                c.extend(WIGNER_ANALYTIC_COLUMNS);
            }
        } else if constant {
            c.extend(ANALYTIC_COLUMNS);
        }
        c
    }

    pub fn output_path(&self) -> PathBuf {
        Path::new(&self.config.output.dir).join(&self.config.output.file)
    }

    fn gamma0(&self) -> Option<f64> {
        (self.config.decay.kind == DecayKind::ConstantIdentity)
            .then(|| self.config.decay.gamma0.expect("validated"))
    }

    /// Runs the scenario, writing rows to `out`. Returns the number of data rows.
    pub fn run<W: Write>(&self, out: W, exec: &dyn RowExecutor) -> Result<(usize, W), CliError> {
        let mode = match self.config.mode {
            Mode::Quantum => "quantum",
            Mode::QuantumClassical => "quantum-classical",
        };
        let mut sink = CsvSink::new(out, &self.columns(), &self.hash, mode)?;
        let result = match &self.wigner {
            None => self.run_quantum(&mut sink),
            Some((rhs, field)) => self.run_wigner(rhs, field.clone(), exec, &mut sink),
        };
        match result {
            Ok(rows) => Ok((rows, sink.finish()?)),
            Err(e) => {
                sink.fail(&e.to_string())?;
                Err(e)
            }
        }
    }

    fn run_quantum<W: Write>(&self, sink: &mut CsvSink<W>) -> Result<usize, CliError> {
        let it = self.config.integrator;
        let kb = self.model.kb();
        let mut prop = Propagator::new(
            &self.model,
            DensityState::new(self.rho0.clone(), 0.0).expect("validated"),
            it.dt,
        )
        .map_err(|source| CliError::Numerical { step: 0, source })?;
        let first = EntropySample::evaluate(&self.model, prop.state())
            .map_err(|source| CliError::Numerical { step: 0, source })?;
        let oracle = self
            .gamma0()
            .map(|g| ConstantDecayModel::quantum(g, first.s_vn, first.purity_omega));

        let mut rows = 0;
        let mut emit = |s: &EntropySample, sink: &mut CsvSink<W>| -> Result<(), CliError> {
            let mut v = vec![
                s.time,
                s.trace_omega,
                s.purity_rho,
                s.purity_omega,
                s.s_vn,
                s.s_nh,
                s.s_lin,
                s.s_lin_nh,
                s.rate_vn,
                s.rate_nh,
                s.rate_lin,
                s.rate_lin_nh,
            ];
            if let Some(m) = &oracle {
                let t = s.time;
                let a = [
                    oracle::analytic_trace(m, t),
                    oracle::analytic_s_vn(m, t),
                    oracle::analytic_s_nh(m, t, kb),
                    oracle::analytic_s_lin(m, t),
                    oracle::analytic_s_lin_nh_from_initial(m, t),
                ];
                let got = [s.trace_omega, s.s_vn, s.s_nh, s.s_lin, s.s_lin_nh];
                v.extend(a);
                v.extend(a.iter().zip(got).map(|(x, y)| (x - y).abs()));
            }
            sink.row(&v)?;
            rows += 1;
            Ok(())
        };
        emit(&first, sink)?;
        for step in 1..=it.steps {
            let state = prop
                .advance()
                .map_err(|source| CliError::Numerical { step, source })?;
            if step % it.sample_every == 0 {
                let s = EntropySample::evaluate(&self.model, state)
                    .map_err(|source| CliError::Numerical { step, source })?;
                emit(&s, sink)?;
            }
        }
        Ok(rows)
    }

    fn run_wigner<W: Write>(
        &self,
        rhs: &WignerRhs,
        field: WignerField,
        exec: &dyn RowExecutor,
        sink: &mut CsvSink<W>,
    ) -> Result<usize, CliError> {
        let it = self.config.integrator;
        let hbar = self.model.hbar();
        let kb = self.model.kb();
        let gamma = self.model.gamma().matrix().clone();
        let k = phase_space_unit(hbar, field.grid().n_dof());
        let oracle = self.gamma0().map(|g| {
            ConstantDecayModel::quantum_classical(g, 0.0, 0.0, k * field.tilde_trace_square())
        });
        let mut prop = FieldPropagator::new(rhs, field, it.dt, exec)
            .map_err(|source| CliError::Numerical { step: 0, source })?;

        let mut rows = 0;
        let mut emit =
            |f: &WignerField, step: usize, sink: &mut CsvSink<W>| -> Result<(), CliError> {
                let w = WignerSample::evaluate(f, &gamma, hbar)
                    .map_err(|source| CliError::Numerical { step, source })?;
                let mut v = vec![f.time()];
                v.extend(reduced_columns(&f.reduced(), kb));
                v.extend([f64::NAN; 4]);
                v.extend([
                    w.tilde_trace,
                    w.s_lin_w,
                    w.s_lin_w_nh,
                    w.rate_s_lin_w,
                    w.rate_s_lin_w_nh,
                    w.leakage,
                ]);
                if let Some(m) = &oracle {
                    let a = [
                        oracle::analytic_qc_trace(m, f.time()),
                        oracle::analytic_qc_s_lin_nh_from_initial(m, f.time()),
                    ];
                    v.extend(a);
                    v.extend([(a[0] - w.tilde_trace).abs(), (a[1] - w.s_lin_w_nh).abs()]);
                }
                sink.row(&v)?;
                rows += 1;
                Ok(())
            };
        emit(prop.field(), 0, sink)?;
        for step in 1..=it.steps {
            prop.advance()
                .map_err(|source| CliError::Numerical { step, source })?;
            if step % it.sample_every == 0 {
                emit(prop.field(), step, sink)?;
            }
        }
        Ok(rows)
    }
}

/// trace, purities and entropies of Ω_S; NaN where Ω_S is not positive.
fn reduced_columns(omega_s: &ComplexMatrix, kb: f64) -> [f64; 7] {
    let nan = [f64::NAN; 7];
    let Ok(omega) = HermitianOperator::new(omega_s.clone()) else {
        return nan;
    };
    let tr = omega.trace_re();
    if !(tr > 0.0) || omega.check_psd().is_err() {
        return nan;
    }
    let rho = omega.scale(1.0 / tr);
    let (Ok(svn), Ok(snh), Ok(sl), Ok(slnh)) = (
        s_vn(&rho, kb),
        s_nh(&omega, kb),
        s_lin(&rho),
        s_lin_nh(&omega),
    ) else {
        return nan;
    };
    [
        tr,
        1.0 - sl,
        omega.trace_product(&omega).re,
        svn,
        snh,
        sl,
        slnh,
    ]
}

/// Validates, runs and writes the output file. `out_dir` replaces
/// `output.dir`; `threads` sizes the phase-space worker pool.
pub fn run_scenario(
    mut config: ScenarioConfig,
    out_dir: Option<&Path>,
    threads: usize,
) -> Result<(PathBuf, usize), CliError> {
    if let Some(d) = out_dir {
        config.output.dir = d.display().to_string();
    }
    let scenario = Scenario::prepare(config)?;
    let path = scenario.output_path();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = BufWriter::new(File::create(&path)?);
    let rows = if threads > 1 && scenario.wigner.is_some() {
        let pool =
            RayonRows::new(threads).map_err(|e| CliError::Output(std::io::Error::other(e)))?;
        scenario.run(file, &pool)?.0
    } else {
        scenario.run(file, &Sequential)?.0
    };
    log::info!("wrote {rows} rows to {}", path.display());
    Ok((path, rows))
}
