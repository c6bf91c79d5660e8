//! Run orchestration: initial data, budget, stepping loop, diagnostics and
//! checkpoints.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::checkpoint::{checkpoint_path, read_checkpoint, write_checkpoint};
use super::config::{InitialCondition, SimConfig};
use crate::error::{Error, Result};
use crate::norms::{l2_norm, poincare_constant};
use crate::spectral::random::{random_field, sample_rng};
use crate::spectral::{SpectralField, WaveGrid};
use crate::stability::{
    compute_budget, default_cw, min_window, step_tolerance, DiagnosticsRecord, Monitor, StabilityBudget, StepNorms,
};
use crate::state::SolverState;
use crate::stepper::Stepper;

/// Initial vorticity for `cfg`. Checkpoints must match the configured
/// scheme, resolution and viscosity.
pub fn initial_state(cfg: &SimConfig) -> Result<SolverState> {
    let grid = WaveGrid::new(cfg.n, cfg.points())?;
    let c = |re, im| Complex64::new(re, im);
    let omega = match &cfg.initial {
        InitialCondition::Zero => SpectralField::zeros(grid),
        InitialCondition::SinX => SpectralField::from_modes(grid, &[(1, 0, c(0.0, -0.5))])?,
        InitialCondition::TaylorGreen => {
            SpectralField::from_modes(grid, &[(1, 1, c(-0.5, 0.0)), (1, -1, c(0.5, 0.0))])?
        }
        InitialCondition::Random { l2, kmin, kmax } => {
            random_field(grid, *kmin, *kmax, 1.0, &mut sample_rng(cfg.seed, 0)).scaled(*l2)
        }
        InitialCondition::Modes(modes) => {
            if modes.iter().any(|(k, l, a)| *k == 0 && *l == 0 && a.norm() > 0.0) {
                return Err(Error::Config {
                    line: None,
                    key: "initial_modes".into(),
                    message: "initial vorticity must be mean-zero".into(),
                });
            }
            SpectralField::from_modes(grid, modes).map_err(|e| Error::Config {
                line: None,
                key: "initial_modes".into(),
                message: e.to_string(),
            })?
        }
        InitialCondition::Checkpoint(path) => {
            let ck = read_checkpoint(path)?;
            let mismatch = |what: String| Error::Checkpoint {
                path: path.clone(),
                message: format!("does not match the configuration: {what}"),
            };
            if ck.scheme != cfg.scheme {
                return Err(mismatch(format!("scheme {} vs {}", ck.scheme, cfg.scheme)));
            }
            if ck.state.omega().grid() != grid {
                let g = ck.state.omega().grid();
                return Err(mismatch(format!("N = {}, P = {} vs N = {}, P = {}", g.n(), g.p(), grid.n(), grid.p())));
            }
            if ck.nu != cfg.nu {
                return Err(mismatch(format!("nu = {} vs {}", ck.nu, cfg.nu)));
            }
            return Ok(ck.state);
        }
    };
    SolverState::initial(omega)
}

/// Budget from the initial L² norm, the forcing sup norm and the
/// configured (or default) `C_w`, with the smallest admissible window.
pub fn budget_for(cfg: &SimConfig, initial: &SolverState) -> Result<StabilityBudget> {
    let grid = initial.omega().grid();
    let c0 = poincare_constant(grid);
    let f_inf = cfg.forcing.resolve(grid)?.sup_l2();
    let cw = cfg.cw_override.unwrap_or_else(default_cw);
    compute_budget(l2_norm(initial.omega()), cfg.nu, f_inf, c0, cw, min_window(cfg.nu, c0))
}

/// Worst step-inequality residuals seen during a run, as multiples of the
/// tolerance `1e-10·max(1, norm²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub steps_taken: u64,
    pub final_step: u64,
    pub records_emitted: u64,
    pub max_l2: f64,
    pub max_res_l2_ratio: f64,
    pub max_res_h1_ratio: f64,
    pub l2_violations: u64,
    pub h1_violations: u64,
}

pub struct Simulation {
    cfg: SimConfig,
    stepper: Stepper,
    monitor: Monitor,
    state: SolverState,
    norms: StepNorms,
    total_steps: u64,
    fresh: bool,
    checkpoint_dir: Option<PathBuf>,
    last_checkpoint: Option<PathBuf>,
}

impl Simulation {
    /// Fails with [`Error::BudgetExceeded`] when `enforce_k0` is set and
    /// `dt > k0`; otherwise exceeding `k0` only logs a warning.
    pub fn new(cfg: SimConfig) -> Result<Self> {
        Self::build(cfg, None)
    }

    /// Uses a budget computed earlier, typically the one saved by the run
    /// being resumed, so that monitored residuals continue unchanged.
    pub fn with_budget(cfg: SimConfig, budget: StabilityBudget) -> Result<Self> {
        Self::build(cfg, Some(budget))
    }

    fn build(cfg: SimConfig, budget: Option<StabilityBudget>) -> Result<Self> {
        cfg.validate()?;
        let state = initial_state(&cfg)?;
        let budget = match budget {
            Some(b) => b,
            None => budget_for(&cfg, &state)?,
        };
        if cfg.dt > budget.k0 {
            if cfg.enforce_k0 {
                return Err(Error::BudgetExceeded {
                    dt: cfg.dt,
                    k0: budget.k0,
                    m0: budget.m0,
                    cw: budget.cw,
                });
            }
            log::warn!(
                "dt = {} exceeds the stability budget k0 = {:.6e}; the long-time bounds are not guaranteed",
                cfg.dt,
                budget.k0
            );
        }
        let grid = state.omega().grid();
        let stepper = Stepper::new(cfg.scheme, grid, &cfg.forcing, cfg.dt, cfg.nu)?;
        let monitor = Monitor::new(budget, cfg.dt, cfg.scheme == crate::stepper::Scheme::Collocation);
        let total_steps = cfg.total_steps()?;
        if state.step() > total_steps {
            return Err(Error::Config {
                line: None,
                key: "t_final".into(),
                message: format!("checkpoint is at step {} beyond the final step {total_steps}", state.step()),
            });
        }
        Ok(Self {
            fresh: !matches!(cfg.initial, InitialCondition::Checkpoint(_)),
            norms: StepNorms::of(&state),
            cfg,
            stepper,
            monitor,
            state,
            total_steps,
            checkpoint_dir: None,
            last_checkpoint: None,
        })
    }

    /// Directory for `ckpt_<step>.bin` files.
    pub fn with_checkpoint_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.checkpoint_dir = Some(dir.into());
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn budget(&self) -> &StabilityBudget {
        self.monitor.budget()
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    pub fn last_checkpoint(&self) -> Option<&Path> {
        self.last_checkpoint.as_deref()
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }

    pub fn checkpoint_now(&mut self) -> Result<PathBuf> {
        let dir = self
            .checkpoint_dir
            .as_ref()
            .ok_or_else(|| Error::invalid("no checkpoint directory configured"))?;
        let path = checkpoint_path(dir, self.state.step());
        write_checkpoint(&path, self.cfg.scheme, self.cfg.nu, &self.state)?;
        self.last_checkpoint = Some(path.clone());
        Ok(path)
    }

    /// Runs to the configured final time.
    pub fn run(&mut self, sink: impl FnMut(&DiagnosticsRecord) -> Result<()>) -> Result<RunSummary> {
        self.run_until(self.total_steps, sink)
    }

    /// Steps until `step == min(limit, final step)`, passing every
    /// `output_every`-th record to `sink`. A fresh run also emits the
    /// initial record; a resumed run does not, so concatenated outputs
    /// match an uninterrupted run.
    pub fn run_until(
        &mut self,
        limit: u64,
        mut sink: impl FnMut(&DiagnosticsRecord) -> Result<()>,
    ) -> Result<RunSummary> {
        let every = self.cfg.output_every;
        let mut summary = RunSummary {
            steps_taken: 0,
            final_step: self.state.step(),
            records_emitted: 0,
            max_l2: self.norms.l2,
            max_res_l2_ratio: f64::NEG_INFINITY,
            max_res_h1_ratio: f64::NEG_INFINITY,
            l2_violations: 0,
            h1_violations: 0,
        };
        if self.fresh && self.state.step() % every == 0 {
            sink(&self.monitor.initial(&self.state))?;
            summary.records_emitted += 1;
        }
        self.fresh = false;
        let limit = limit.min(self.total_steps);
        while self.state.step() < limit {
            let f_l2 = self.stepper.forcing().l2_at(self.state.t());
            let next = self.stepper.step(&self.state).map_err(|e| match e {
                Error::NumericalFailure { step, .. } => Error::NumericalFailure {
                    step,
                    last_checkpoint: self.last_checkpoint.clone(),
                },
                other => other,
            })?;
            let emit = next.step() % every == 0;
            let (rec, norms) = self.monitor.record_fast(&self.state, &self.norms, &next, f_l2, emit)?;
            let r_l2 = rec.res_l2 / step_tolerance(self.norms.l2 * self.norms.l2);
            let r_h1 = rec.res_h1 / step_tolerance(self.norms.h1 * self.norms.h1);
            summary.max_res_l2_ratio = summary.max_res_l2_ratio.max(r_l2);
            summary.max_res_h1_ratio = summary.max_res_h1_ratio.max(r_h1);
            summary.l2_violations += u64::from(r_l2 > 1.0);
            summary.h1_violations += u64::from(r_h1 > 1.0);
            summary.max_l2 = summary.max_l2.max(norms.l2);
            self.state = next;
            self.norms = norms;
            summary.steps_taken += 1;
            if emit {
                sink(&rec)?;
                summary.records_emitted += 1;
            }
            let ce = self.cfg.checkpoint_every;
            if ce > 0 && self.state.step() % ce == 0 && self.checkpoint_dir.is_some() {
                self.checkpoint_now()?;
            }
        }
        summary.final_step = self.state.step();
        Ok(summary)
    }
}

/// `‖sin x‖₂ = √2 π`, the L² norm of the `sin_x` preset.
pub const SIN_X_L2: f64 = std::f64::consts::SQRT_2 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::ForcingSpec;
    use crate::stepper::Scheme;

    fn decay_config(scheme: Scheme) -> SimConfig {
        let mut c = SimConfig::new(scheme, 8, 1.0, 0.1, 1.0);
        c.initial = InitialCondition::SinX;
        c
    }

    #[test]
    fn sin_x_decay_records() {
        for scheme in [Scheme::Galerkin, Scheme::Collocation] {
            let mut sim = Simulation::new(decay_config(scheme)).unwrap();
            let mut recs = Vec::new();
            let s = sim
                .run(|r| {
                    recs.push(*r);
                    Ok(())
                })
                .unwrap();
            assert_eq!(recs.len(), 11);
            assert_eq!(s.steps_taken, 10);
            for (n, r) in recs.iter().enumerate() {
                assert_eq!(r.step, n as u64);
                let want = 1.1f64.powi(-(n as i32)) * SIN_X_L2;
                assert!((r.l2 - want).abs() <= 1e-12 * want);
            }
            assert_eq!(s.l2_violations + s.h1_violations, 0);
        }
    }

    #[test]
    fn zero_run_stays_zero() {
        let mut c = SimConfig::new(Scheme::Galerkin, 4, 0.1, 0.05, 0.5);
        c.output_every = 2;
        let mut sim = Simulation::new(c).unwrap();
        let mut n = 0;
        sim.run(|r| {
            n += 1;
            assert_eq!((r.l2, r.h1, r.energy, r.enstrophy), (0.0, 0.0, 0.0, 0.0));
            assert_eq!(r.skew_res, -1.0);
            assert!(r.in_ball);
            Ok(())
        })
        .unwrap();
        assert_eq!(n, 6);
    }

    #[test]
    fn taylor_green_enstrophy_ratio() {
        let mut c = SimConfig::new(Scheme::Collocation, 4, 0.5, 0.2, 20.0);
        c.initial = InitialCondition::TaylorGreen;
        let mut recs = Vec::new();
        Simulation::new(c)
            .unwrap()
            .run(|r| {
                recs.push(*r);
                Ok(())
            })
            .unwrap();
        let q = 1.2f64.powi(-2);
        for w in recs.windows(2) {
            assert!((w[1].enstrophy / w[0].enstrophy - q).abs() < 1e-12);
            assert!(w[1].skew_res < 1e-12);
        }
    }

    #[test]
    fn enforce_k0_refuses() {
        let mut c = SimConfig::new(Scheme::Galerkin, 4, 0.1, 0.01, 0.1);
        c.initial = InitialCondition::Modes(vec![(1, 0, Complex64::new(0.0, -1.0 / (2.0 * SIN_X_L2)))]);
        c.forcing = ForcingSpec::steady(vec![(1, 0, Complex64::new(0.0, -0.1 / (2.0 * SIN_X_L2)))]).unwrap();
        c.enforce_k0 = true;
        // ‖ω0‖ = 1, ‖f‖ = 0.1, ν = 0.1: k0 = 1/120.
        match Simulation::new(c.clone()) {
            Err(Error::BudgetExceeded { k0, m0, .. }) => {
                assert!((k0 - 1.0 / 120.0).abs() < 1e-15);
                assert!((m0 - 3f64.sqrt()).abs() < 1e-14);
            }
            other => panic!("expected refusal, got {:?}", other.err()),
        }
        c.dt = 1.0 / 200.0;
        assert!(Simulation::new(c.clone()).is_ok());
        c.dt = 0.01;
        c.enforce_k0 = false;
        assert!(Simulation::new(c).is_ok());
    }

    #[test]
    fn interrupted_run_resumes_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = SimConfig::new(Scheme::Collocation, 6, 0.05, 0.01, 2.0);
        c.initial = InitialCondition::Random { l2: 3.0, kmin: 1, kmax: 4 };
        c.forcing = ForcingSpec::kolmogorov(0.5, 2).unwrap();
        c.seed = 9;
        c.output_every = 3;
        c.checkpoint_every = 50;
        let mut full = Vec::new();
        Simulation::new(c.clone())
            .unwrap()
            .run(|r| {
                full.push(r.csv_row());
                Ok(())
            })
            .unwrap();

        let mut parts = Vec::new();
        let mut first = Simulation::new(c.clone()).unwrap().with_checkpoint_dir(dir.path());
        first
            .run_until(120, |r| {
                parts.push(r.csv_row());
                Ok(())
            })
            .unwrap();
        let ck = first.last_checkpoint().unwrap().to_path_buf();
        let budget = *first.budget();
        assert!(ck.ends_with("ckpt_100.bin"));
        // Output past the checkpoint is lost with the interrupted process.
        parts.retain(|row| row.split(',').next().unwrap().parse::<u64>().unwrap() <= 100);
        c.initial = InitialCondition::Checkpoint(ck);
        Simulation::with_budget(c, budget)
            .unwrap()
            .run(|r| {
                parts.push(r.csv_row());
                Ok(())
            })
            .unwrap();
        assert_eq!(parts, full);
    }

    #[test]
    fn checkpoint_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = decay_config(Scheme::Galerkin);
        c.checkpoint_every = 5;
        Simulation::new(c.clone())
            .unwrap()
            .with_checkpoint_dir(dir.path())
            .run(|_| Ok(()))
            .unwrap();
        let mut other = decay_config(Scheme::Collocation);
        other.initial = InitialCondition::Checkpoint(dir.path().join("ckpt_5.bin"));
        assert!(matches!(Simulation::new(other), Err(Error::Checkpoint { .. })));
    }
}
