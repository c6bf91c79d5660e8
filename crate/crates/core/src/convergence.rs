//! Temporal convergence against a fine-step reference, and time-averaged
//! statistics across time steps.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::galerkin::GalerkinKernel;
use crate::norms::l2_norm;
use crate::parallel::ordered_map;
use crate::runner::{SimConfig, Simulation};
use crate::spectral::SpectralField;
use crate::state::SolverState;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub order: f64,
    pub t_star: f64,
    pub dt_ref: f64,
}

impl ErrorCurve {
    pub fn is_monotone(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub window: (f64, f64),
    pub mean_energy: f64,
    pub mean_enstrophy: f64,
    pub mean_h1: f64,
    pub dt: f64,
    pub samples: usize,
}

/// State at `t_star` from `cfg` advanced with step `dt`; output cadence
/// and checkpoints of `cfg` are ignored.
pub fn integrate(cfg: &SimConfig, dt: f64, t_star: f64) -> Result<SolverState> {
    let mut c = cfg.clone();
    c.dt = dt;
    c.t_final = t_star;
    c.output_every = u64::MAX;
    c.checkpoint_every = 0;
    c.enforce_k0 = false;
    let mut sim = Simulation::new(c)?;
    sim.run(|_| Ok(()))?;
    Ok(sim.into_state())
}

/// Same scheme and resolution at the fine step `dt_ref`.
pub fn reference_solution(cfg: &SimConfig, dt_ref: f64, t_star: f64) -> Result<SolverState> {
    integrate(cfg, dt_ref, t_star)
}

/// Least-squares slope of `ln error` against `ln dt`.
pub fn fit_order(dts: &[f64], errors: &[f64]) -> f64 {
    let n = dts.len() as f64;
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// L² errors at `t_star` of runs with each `dt` against the reference.
pub fn error_curve(cfg: &SimConfig, dts: &[f64], dt_ref: f64, t_star: f64) -> Result<ErrorCurve> {
    if dts.len() < 2 {
        return Err(Error::invalid("an error curve needs at least two time steps"));
    }
    if !dts.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::invalid("time steps must be strictly decreasing"));
    }
    if !(t_star > 0.0) {
        return Err(Error::invalid("t_star must be positive"));
    }
    if t_star > 1.0 {
        log::warn!("t_star = {t_star} lies beyond the unit horizon of the error estimate");
    }
    let dt_min = dts[dts.len() - 1];
    if !(dt_ref > 0.0) || dt_ref > dt_min / 16.0 * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "reference step {dt_ref} must be at most min(dts)/16 = {}",
            dt_min / 16.0
        )));
    }
    for &dt in dts.iter().chain([dt_ref].iter()) {
        if crate::runner::steps_for_time(t_star, dt).is_none() {
            return Err(Error::invalid(format!("dt = {dt} does not divide t_star = {t_star}")));
        }
    }
    let all: Vec<f64> = std::iter::once(dt_ref).chain(dts.iter().copied()).collect();
    let states = ordered_map(all.len(), |i| integrate(cfg, all[i], t_star));
    let mut states = states.into_iter();
    let reference = states.next().expect("reference run")?;
    let mut errors = Vec::with_capacity(dts.len());
    for s in states {
        let s = s?;
        errors.push(l2_norm(&s.omega().sub(reference.omega())?));
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::invalid("an error vanished; the order is undefined"));
    }
    Ok(ErrorCurve {
        order: fit_order(dts, &errors),
        dts: dts.to_vec(),
        errors,
        t_star,
        dt_ref,
    })
}

/// Time averages of energy, enstrophy and `‖ω‖_{H¹}` over records with
/// `t ∈ [t_a, t_b]`, from a run of `cfg` with step `dt` to `t_b`.
pub fn long_time_statistics(cfg: &SimConfig, dt: f64, window: (f64, f64)) -> Result<StatSummary> {
    let (ta, tb) = window;
    if !(ta >= 0.0 && tb > ta) {
        return Err(Error::invalid(format!("invalid averaging window [{ta}, {tb}]")));
    }
    let mut c = cfg.clone();
    c.dt = dt;
    c.t_final = tb;
    c.output_every = 1;
    c.checkpoint_every = 0;
    c.enforce_k0 = false;
    let mut sim = Simulation::new(c)?;
    if ta < sim.budget().t0 {
        log::warn!("averaging window starts at {ta}, before the absorbing time {}", sim.budget().t0);
    }
    let tol = 1e-9 * dt;
    let (mut e, mut z, mut h, mut count) = (0.0, 0.0, 0.0, 0usize);
    sim.run(|r| {
        if r.t >= ta - tol && r.t <= tb + tol {
            e += r.energy;
            z += r.enstrophy;
            h += r.h1;
            count += 1;
        }
        Ok(())
    })?;
    if count == 0 {
        return Err(Error::invalid("averaging window contains no steps"));
    }
    let n = count as f64;
    Ok(StatSummary {
        window,
        mean_energy: e / n,
        mean_enstrophy: z / n,
        mean_h1: h / n,
        dt,
        samples: count,
    })
}

pub const ERROR_CSV_HEADER: &str = "dt,error,order_so_far";
pub const STATS_CSV_HEADER: &str = "dt,window_start,window_end,mean_energy,mean_enstrophy,mean_h1";

/// One row per step size; `order_so_far` fits all rows up to that one and
/// is empty on the first.
pub fn error_curve_csv(curve: &ErrorCurve) -> String {
    let mut s = format!("{ERROR_CSV_HEADER}\n");
    for i in 0..curve.dts.len() {
        let order = if i == 0 {
            String::new()
        } else {
            format!("{}", fit_order(&curve.dts[..=i], &curve.errors[..=i]))
        };
        let _ = writeln!(s, "{},{:e},{order}", curve.dts[i], curve.errors[i]);
    }
    s
}

pub fn stats_csv(summaries: &[StatSummary]) -> String {
    let mut s = format!("{STATS_CSV_HEADER}\n");
    for m in summaries {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e},{:e}",
            m.dt, m.window.0, m.window.1, m.mean_energy, m.mean_enstrophy, m.mean_h1
        );
    }
    s
}

/// Classical explicit four-stage integration of the Galerkin system
/// `dω/dt = -P_N(∇⊥ψ·∇ω) + νΔω + f(t)`, for cross-checking references.
pub fn rk4_galerkin(
    initial: &SolverState,
    forcing: &ForcingSpec,
    nu: f64,
    dt: f64,
    steps: u64,
) -> Result<SolverState> {
    let grid = initial.omega().grid();
    let f = forcing.resolve(grid)?;
    let mut kernel = GalerkinKernel::new(grid);
    let mut rhs = |w: &SpectralField, t: f64| -> SpectralField {
        let psi = crate::spectral::inverse_laplacian(w);
        let nl = kernel.evaluate(&psi, w);
        let s = f.factor(t);
        let fb = f.base().coefficients();
        let mut out = SpectralField::zeros(grid);
        let (dst, nlc, wc) = (out.coefficients_mut(), nl.coefficients(), w.coefficients());
        for (k, l, i) in grid.modes() {
            let k2 = (k * k + l * l) as f64;
            dst[i] = -nlc[i] - wc[i] * (nu * k2) + fb[i] * s;
        }
        out.zero_mean();
        out
    };
    let mut w = initial.omega().clone();
    let mut t = initial.t();
    for _ in 0..steps {
        let k1 = rhs(&w, t);
        let mut y = w.clone();
        y.add_scaled(0.5 * dt, &k1)?;
        let k2 = rhs(&y, t + 0.5 * dt);
        let mut y = w.clone();
        y.add_scaled(0.5 * dt, &k2)?;
        let k3 = rhs(&y, t + 0.5 * dt);
        let mut y = w.clone();
        y.add_scaled(dt, &k3)?;
        let k4 = rhs(&y, t + dt);
        w.add_scaled(dt / 6.0, &k1)?;
        w.add_scaled(dt / 3.0, &k2)?;
        w.add_scaled(dt / 3.0, &k3)?;
        w.add_scaled(dt / 6.0, &k4)?;
        t += dt;
        if !w.is_finite() {
            return Err(Error::NumericalFailure {
                step: initial.step(),
                last_checkpoint: None,
            });
        }
    }
    SolverState::new(w, t, initial.step() + steps)
}
