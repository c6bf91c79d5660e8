//! Explicit long-time stability budget, per-step energy inequalities,
//! the discrete uniform Gronwall lemma and absorbing-ball detection.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::norms::{sobolev_norm, SobolevOrder};
use crate::state::SolverState;

/// Largest Wente ratio (phiH2) over 10⁴ multiscale samples at `N = 32`
/// with seed [`WENTE_SEED`].
pub const WENTE_SUP_RATIO_N32: f64 = 0.1430032625185518;
pub const WENTE_SEED: u64 = 2024;
pub const WENTE_SAFETY: f64 = 1.25;

/// Relative slack for inequalities between accumulated floating-point sums.
const ROUNDING_SLACK: f64 = 1e-12;

/// Default `C_w`: the safety-scaled sampled sup, raised to 1 since the
/// budget formulas assume `C_w >= 1`.
pub fn default_cw() -> f64 {
    (WENTE_SAFETY * WENTE_SUP_RATIO_N32).max(1.0)
}

/// Smallest admissible Gronwall window `r = 8 c0² / ν`.
pub fn min_window(nu: f64, c0: f64) -> f64 {
    8.0 * c0 * c0 / nu
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityBudget {
    pub c0: f64,
    pub cw: f64,
    /// Uniform L² bound.
    pub m0: f64,
    /// Absorbing radius; the ball is `‖ω‖₂² <= 2 rho0²`.
    pub rho0: f64,
    /// Largest time step covered by the bounds.
    pub k0: f64,
    /// Absorbing time; `+∞` when the forcing vanishes and `ω0 ≠ 0`.
    pub t0: f64,
    pub r: f64,
    /// `ln M1²`; the bound itself overflows for realistic parameters.
    pub log_m1_sq: f64,
    pub nu: f64,
    pub f_inf: f64,
    pub omega0_l2: f64,
}

impl StabilityBudget {
    /// Flat `key=value` report, one entry per line.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("c0", self.c0),
            ("cw", self.cw),
            ("m0", self.m0),
            ("rho0", self.rho0),
            ("k0", self.k0),
            ("t0", self.t0),
            ("r", self.r),
            ("log_m1_sq", self.log_m1_sq),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Every field as `key=value` lines, exactly round-tripping through
    /// [`StabilityBudget::parse_record`].
    pub fn record(&self) -> String {
        let mut s = self.report();
        for (k, v) in [("nu", self.nu), ("f_inf", self.f_inf), ("omega0_l2", self.omega0_l2)] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn parse_record(text: &str) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("budget line '{line}' is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("budget value for '{k}' is not a number")))?;
            map.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| Error::invalid(format!("budget record lacks '{k}'")))
        };
        Ok(Self {
            c0: get("c0")?,
            cw: get("cw")?,
            m0: get("m0")?,
            rho0: get("rho0")?,
            k0: get("k0")?,
            t0: get("t0")?,
            r: get("r")?,
            log_m1_sq: get("log_m1_sq")?,
            nu: get("nu")?,
            f_inf: get("f_inf")?,
            omega0_l2: get("omega0_l2")?,
        })
    }

    pub fn ball_radius_sq(&self) -> f64 {
        2.0 * self.rho0 * self.rho0
    }

    /// `‖ω^n‖₂² <= α^{-n} ‖ω0‖₂² + (2 c0⁴ f²/ν²)(1 - α^{-n})`,
    /// `α = 1 + ν dt / (2 c0²)`.
    pub fn envelope_sq(&self, n: u64, dt: f64) -> f64 {
        let alpha = 1.0 + self.nu * dt / (2.0 * self.c0 * self.c0);
        let decay = alpha.powf(-(n as f64));
        let c4 = self.c0.powi(4);
        let forced = 2.0 * c4 * self.f_inf * self.f_inf / (self.nu * self.nu);
        decay * self.omega0_l2 * self.omega0_l2 + forced * (1.0 - decay)
    }
}

pub fn compute_budget(omega0_l2: f64, nu: f64, f_inf: f64, c0: f64, cw: f64, r: f64) -> Result<StabilityBudget> {
    let finite = [omega0_l2, nu, f_inf, c0, cw, r].iter().all(|x| x.is_finite());
    if !finite {
        return Err(Error::invalid("budget inputs must be finite"));
    }
    if nu <= 0.0 {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    if c0 <= 0.0 {
        return Err(Error::invalid(format!("c0 must be positive, got {c0}")));
    }
    if cw < 1.0 {
        return Err(Error::invalid(format!("cw must be at least 1, got {cw}")));
    }
    if f_inf < 0.0 || omega0_l2 < 0.0 {
        return Err(Error::invalid("norms must be nonnegative"));
    }
    let r_min = min_window(nu, c0);
    if r < r_min * (1.0 - ROUNDING_SLACK) {
        return Err(Error::invalid(format!("window r = {r} is below 8 c0²/nu = {r_min}")));
    }
    let c2 = c0 * c0;
    let m0 = (omega0_l2 * omega0_l2 + 2.0 * c2 * c2 * f_inf * f_inf / (nu * nu)).sqrt();
    let rho0 = 2f64.sqrt() * c2 * f_inf / nu;
    let k0 = (nu / (4.0 * cw * cw * m0 * m0)).min(2.0 * c2 / nu);
    let t0 = if omega0_l2 <= rho0 {
        0.0
    } else if rho0 == 0.0 {
        f64::INFINITY
    } else {
        8.0 * c2 / nu * (omega0_l2 / rho0).ln()
    };
    let lambda1 = 1.0 / c2;
    let f2 = f_inf * f_inf;
    let inner = 4.0 / nu * (2.0 * rho0 * rho0 / r + f2 / (nu * lambda1)) + 2.0 / nu * f2 * r;
    let log_m1_sq = inner.ln() + 16.0 * cw * cw / nu * rho0 * rho0 * r;
    Ok(StabilityBudget {
        c0,
        cw,
        m0,
        rho0,
        k0,
        t0,
        r,
        log_m1_sq,
        nu,
        f_inf,
        omega0_l2,
    })
}

/// Norms of `ω` at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepNorms {
    pub l2: f64,
    pub h1: f64,
    /// `‖ω‖_{H²} = ‖Δω‖₂`.
    pub h2: f64,
}

impl StepNorms {
    pub fn of(state: &SolverState) -> Self {
        let w = state.omega();
        Self {
            l2: sobolev_norm(w, SobolevOrder::L2),
            h1: sobolev_norm(w, SobolevOrder::H1),
            h2: sobolev_norm(w, SobolevOrder::H2),
        }
    }
}

/// Norms of the increment `ω^{n+1} - ω^n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepIncrement {
    pub l2: f64,
    pub h1: f64,
}

impl StepIncrement {
    pub fn between(prev: &SolverState, next: &SolverState) -> Result<Self> {
        let d = next.omega().sub(prev.omega())?;
        Ok(Self {
            l2: sobolev_norm(&d, SobolevOrder::L2),
            h1: sobolev_norm(&d, SobolevOrder::H1),
        })
    }
}

/// Tolerance `1e-10 · max(1, norm²)` for the step residuals.
pub fn step_tolerance(norm_sq: f64) -> f64 {
    1e-10 * norm_sq.max(1.0)
}

/// LHS − RHS of the L² step inequality
/// `‖ω'‖² - ‖ω‖² + ½‖ω'-ω‖² + (ν/2) dt ‖ω'‖²_{H¹} <= (c0²/ν) dt ‖f^n‖²`.
pub fn check_step_inequality_l2(
    prev: &StepNorms,
    next: &StepNorms,
    inc: &StepIncrement,
    dt: f64,
    nu: f64,
    c0: f64,
    f_l2: f64,
) -> f64 {
    next.l2 * next.l2 - prev.l2 * prev.l2 + 0.5 * inc.l2 * inc.l2 + 0.5 * nu * dt * next.h1 * next.h1
        - c0 * c0 / nu * dt * f_l2 * f_l2
}

/// LHS − RHS of the H¹ step inequality
/// `(1 - (2C_w²/ν)‖ω‖₂² dt)‖ω'‖²_{H¹} - ‖ω‖²_{H¹} + ½‖ω'-ω‖²_{H¹}
///  + (ν - 2C_w² dt M0²) dt ‖Δω'‖₂² <= (2/ν) dt ‖f^n‖²`.
#[allow(clippy::too_many_arguments)]
pub fn check_step_inequality_h1(
    prev: &StepNorms,
    next: &StepNorms,
    inc: &StepIncrement,
    dt: f64,
    nu: f64,
    cw: f64,
    m0: f64,
    f_l2: f64,
) -> f64 {
    let cw2 = cw * cw;
    (1.0 - 2.0 * cw2 / nu * prev.l2 * prev.l2 * dt) * next.h1 * next.h1 - prev.h1 * prev.h1
        + 0.5 * inc.h1 * inc.h1
        + (nu - 2.0 * cw2 * dt * m0 * m0) * dt * next.h2 * next.h2
        - 2.0 / nu * dt * f_l2 * f_l2
}

/// Sequences and window budgets for the discrete uniform Gronwall lemma.
/// Sequences are indexed by step, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallInput {
    pub dt: f64,
    pub n0: usize,
    pub n1: usize,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallOutcome {
    pub premise_ok: bool,
    pub bound: f64,
    pub conclusion_ok: bool,
}

pub fn gronwall_bound(dt: f64, n1: usize, a1: f64, a2: f64, a3: f64) -> f64 {
    (a3 / (dt * n1 as f64) + a2) * (4.0 * a1).exp()
}

fn le(a: f64, b: f64) -> bool {
    a <= b + ROUNDING_SLACK * a.abs().max(b.abs())
}

/// Checks the premises on the supplied data and the conclusion
/// `ξ_j <= (a3/(dt n1) + a2) e^{4 a1}` for every `j >= n0 + n1 + 2`.
pub fn uniform_gronwall_check(inp: &GronwallInput) -> Result<GronwallOutcome> {
    let len = inp.xi.len();
    if inp.eta.len() != len || inp.zeta.len() != len {
        return Err(Error::invalid("xi, eta and zeta must have equal length"));
    }
    if inp.n1 == 0 {
        return Err(Error::invalid("n1 must be positive"));
    }
    if !(inp.dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let need = inp.n0 + 2 * (inp.n1 + 1);
    if len < need {
        return Err(Error::invalid(format!(
            "sequences of length {len} are too short: need at least n0 + 2(n1 + 1) = {need}"
        )));
    }
    let all = inp.xi.iter().chain(&inp.eta).chain(&inp.zeta);
    if all.clone().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid("sequences must be finite and nonnegative"));
    }
    let dt = inp.dt;
    let mut premise_ok = true;
    for n in inp.n0..len - 1 {
        let e = dt * inp.eta[n + 1];
        premise_ok &= e < 0.5;
        premise_ok &= le((1.0 - e) * inp.xi[n + 1], inp.xi[n] + dt * inp.zeta[n + 1]);
    }
    let w = inp.n1 + 2;
    let window = |s: &[f64], start: usize| dt * s[start..start + w].iter().sum::<f64>();
    for n2 in inp.n0..=len - w {
        premise_ok &= le(window(&inp.eta, n2), inp.a1);
        premise_ok &= le(window(&inp.zeta, n2), inp.a2);
        premise_ok &= le(window(&inp.xi, n2), inp.a3);
    }
    let bound = gronwall_bound(dt, inp.n1, inp.a1, inp.a2, inp.a3);
    let conclusion_ok = inp.xi[inp.n0 + inp.n1 + 2..].iter().all(|&x| le(x, bound));
    Ok(GronwallOutcome {
        premise_ok,
        bound,
        conclusion_ok,
    })
}

/// One row of the diagnostics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    /// `½‖∇ψ‖₂²`
    pub energy: f64,
    /// `½‖ω‖₂²`
    pub enstrophy: f64,
    /// Residual of the L² step inequality for the step ending here
    /// (0 at the initial state).
    pub res_l2: f64,
    pub res_h1: f64,
    /// Collocation orthogonality residual, `-1` for Galerkin runs.
    pub skew_res: f64,
    pub in_ball: bool,
}

pub const CSV_HEADER: &str = "step,t,l2,h1,h2,energy,enstrophy,res_l2,res_h1,skew_res,in_ball";

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.step,
            self.t,
            self.l2,
            self.h1,
            self.h2,
            self.energy,
            self.enstrophy,
            self.res_l2,
            self.res_h1,
            self.skew_res,
            u8::from(self.in_ball)
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.trim().split(',').collect();
        if cols.len() != 11 {
            return Err(Error::invalid(format!("expected 11 columns, got {}", cols.len())));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|_| Error::invalid(format!("column {i}: '{}' is not a number", cols[i])))
        };
        Ok(Self {
            step: cols[0]
                .parse()
                .map_err(|_| Error::invalid(format!("bad step '{}'", cols[0])))?,
            t: f(1)?,
            l2: f(2)?,
            h1: f(3)?,
            h2: f(4)?,
            energy: f(5)?,
            enstrophy: f(6)?,
            res_l2: f(7)?,
            res_h1: f(8)?,
            skew_res: f(9)?,
            in_ball: match cols[10] {
                "1" => true,
                "0" => false,
                other => return Err(Error::invalid(format!("bad in_ball flag '{other}'"))),
            },
        })
    }

    pub fn norms(&self) -> StepNorms {
        StepNorms {
            l2: self.l2,
            h1: self.h1,
            h2: self.h2,
        }
    }
}

/// Builds diagnostics records and evaluates the step inequalities along a run.
#[derive(Debug, Clone)]
pub struct Monitor {
    budget: StabilityBudget,
    dt: f64,
    collocation: bool,
}

impl Monitor {
    pub fn new(budget: StabilityBudget, dt: f64, collocation: bool) -> Self {
        Self {
            budget,
            dt,
            collocation,
        }
    }

    pub fn budget(&self) -> &StabilityBudget {
        &self.budget
    }

    /// `skew_res` is `-1` for Galerkin runs and `NaN` for collocation
    /// records where the check was skipped.
    fn base_record(&self, state: &SolverState, norms: StepNorms, with_skew: bool) -> DiagnosticsRecord {
        let energy = 0.5 * sobolev_norm(state.omega(), SobolevOrder::H_MINUS_1).powi(2);
        DiagnosticsRecord {
            step: state.step(),
            t: state.t(),
            l2: norms.l2,
            h1: norms.h1,
            h2: norms.h2,
            energy,
            enstrophy: 0.5 * norms.l2 * norms.l2,
            res_l2: 0.0,
            res_h1: 0.0,
            skew_res: match (self.collocation, with_skew) {
                (false, _) => -1.0,
                (true, true) => crate::collocation::check_skew_orthogonality(state),
                (true, false) => f64::NAN,
            },
            in_ball: norms.l2 * norms.l2 <= self.budget.ball_radius_sq(),
        }
    }

    pub fn initial(&self, state: &SolverState) -> DiagnosticsRecord {
        self.base_record(state, StepNorms::of(state), true)
    }

    /// Record for `next`, with residuals of the step from `prev`; `f_l2` is
    /// `‖f^n‖₂` at the left endpoint.
    pub fn record(&self, prev: &SolverState, next: &SolverState, f_l2: f64) -> Result<DiagnosticsRecord> {
        let p = StepNorms::of(prev);
        let q = StepNorms::of(next);
        let inc = StepIncrement::between(prev, next)?;
        let b = &self.budget;
        let mut rec = self.base_record(next, q, true);
        rec.res_l2 = check_step_inequality_l2(&p, &q, &inc, self.dt, b.nu, b.c0, f_l2);
        rec.res_h1 = check_step_inequality_h1(&p, &q, &inc, self.dt, b.nu, b.cw, b.m0, f_l2);
        Ok(rec)
    }

    /// As [`Monitor::record`] when the previous norms are already known;
    /// skips the collocation residual unless `with_skew`.
    pub fn record_fast(
        &self,
        prev: &SolverState,
        prev_norms: &StepNorms,
        next: &SolverState,
        f_l2: f64,
        with_skew: bool,
    ) -> Result<(DiagnosticsRecord, StepNorms)> {
        let q = StepNorms::of(next);
        let inc = StepIncrement::between(prev, next)?;
        let b = &self.budget;
        let l2 = check_step_inequality_l2(prev_norms, &q, &inc, self.dt, b.nu, b.c0, f_l2);
        let h1 = check_step_inequality_h1(prev_norms, &q, &inc, self.dt, b.nu, b.cw, b.m0, f_l2);
        let mut rec = self.base_record(next, q, with_skew);
        rec.res_l2 = l2;
        rec.res_h1 = h1;
        Ok((rec, q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEntry {
    pub t_entry: Option<f64>,
    pub stayed_in: bool,
}

/// First time with `‖ω‖₂² <= 2 rho0²` and whether every later record stays
/// inside.
pub fn detect_absorbing_ball(records: &[DiagnosticsRecord], budget: &StabilityBudget) -> BallEntry {
    let r2 = budget.ball_radius_sq();
    let inside = |r: &DiagnosticsRecord| r.l2 * r.l2 <= r2;
    match records.iter().position(inside) {
        Some(i) => BallEntry {
            t_entry: Some(records[i].t),
            stayed_in: records[i..].iter().all(inside),
        },
        None => BallEntry {
            t_entry: None,
            stayed_in: false,
        },
    }
}

/// Largest relative excess of `‖ω^n‖₂²` over the envelope; `<= 0` when the
/// envelope holds everywhere.
pub fn envelope_violation(records: &[DiagnosticsRecord], budget: &StabilityBudget, dt: f64) -> f64 {
    records
        .iter()
        .map(|r| {
            let env = budget.envelope_sq(r.step, dt);
            (r.l2 * r.l2 - env) / env.max(f64::MIN_POSITIVE)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// LHS − RHS of `(ν/2) dt Σ_{n=i}^{m} ‖ω^n‖²_{H¹} <= ‖ω^{i-1}‖₂² + (c0²/ν) f² (m-i+1) dt`
/// for records indexed by step (`records[n].step == n`), `1 <= i <= m`.
pub fn time_average_residual(
    records: &[DiagnosticsRecord],
    budget: &StabilityBudget,
    dt: f64,
    i: usize,
    m: usize,
) -> Result<f64> {
    if i == 0 || i > m || m >= records.len() {
        return Err(Error::invalid(format!("invalid window i = {i}, m = {m}")));
    }
    let sum: f64 = records[i..=m].iter().map(|r| r.h1 * r.h1).sum();
    let lhs = 0.5 * budget.nu * dt * sum;
    let prev = records[i - 1].l2;
    let c2 = budget.c0 * budget.c0;
    let rhs = prev * prev + c2 / budget.nu * budget.f_inf * budget.f_inf * (m - i + 1) as f64 * dt;
    Ok(lhs - rhs)
}
