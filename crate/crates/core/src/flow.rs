//! Real-time integration of `ẋ = F(x)` on complex state.
//!
//! The integrator is the Dormand–Prince 5(4) pair with FSAL, propagating the
//! fifth-order solution. Jacobians of the time-τ map come from the variational
//! equation `J̇ = F′(x) J`, `J(0) = I`, integrated jointly with the state and
//! included in step-size control.
//!
//! Complex time directions are handled by rescaling the field
//! ([`PolynomialMap::scale_time`]); the integrator itself only steps in real time.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HoloMap, PolynomialMap};
use crate::linalg::{all_finite, vec_norm, vec_sub, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Integration aborts with [`Error::Blowup`] once `|x(t)|` exceeds this.
    pub escape_radius: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.5, max_steps: 200_000, escape_radius: 10.0 }
    }
}

impl IntegratorConfig {
    /// Escape radius set to ten times the radius of the analysis ball.
    pub fn for_ball(radius: f64) -> Self {
        Self { escape_radius: 10.0 * radius, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::invalid("integrator tolerances must be positive"));
        }
        if !positive(self.max_step) || !positive(self.escape_radius) {
            return Err(Error::invalid("max_step and escape_radius must be positive"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        Ok(())
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Right-hand side on the (optionally augmented) state `[x, vec(J)]`.
struct System<'a> {
    field: &'a PolynomialMap,
    n: usize,
    with_jacobian: bool,
}

impl System<'_> {
    fn rhs(&self, y: &[C64]) -> Vec<C64> {
        let n = self.n;
        let x = &y[..n];
        let mut out = self.field.evaluate(x).expect("state dimension fixed by construction");
        if self.with_jacobian {
            let a = self.field.jacobian_at(x).expect("state dimension fixed by construction");
            let j = &y[n..];
            out.reserve(n * n);
            for r in 0..n {
                for col in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += a[(r, k)] * j[k * n + col];
                    }
                    out.push(acc);
                }
            }
        }
        out
    }

    fn initial(&self, x0: &[C64]) -> Vec<C64> {
        let mut y = x0.to_vec();
        if self.with_jacobian {
            y.extend_from_slice(CMatrix::identity(self.n).as_slice());
        }
        y
    }
}

fn axpy_stage(y: &[C64], h: f64, terms: &[(f64, &[C64])]) -> Vec<C64> {
    let mut out = y.to_vec();
    for (coef, k) in terms {
        if *coef == 0.0 {
            continue;
        }
        let s = h * coef;
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * s;
        }
    }
    out
}

/// One Dormand–Prince step. Returns the new state, its derivative (FSAL), and the error vector.
fn dp_step(sys: &System, y: &[C64], k1: &[C64], h: f64) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let k2 = sys.rhs(&axpy_stage(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(&axpy_stage(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(&axpy_stage(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(&axpy_stage(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(&axpy_stage(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy_stage(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.rhs(&y_new);
    let err: Vec<C64> = (0..y.len())
        .map(|i| (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h)
        .collect();
    (y_new, k7, err)
}

fn error_norm(err: &[C64], y: &[C64], y_new: &[C64], cfg: &IntegratorConfig) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

fn check_escape(y: &[C64], n: usize, t: f64, cfg: &IntegratorConfig) -> Result<()> {
    let norm = vec_norm(&y[..n]);
    if !all_finite(y) || norm > cfg.escape_radius {
        return Err(Error::Blowup { t, norm, radius: cfg.escape_radius });
    }
    Ok(())
}

fn initial_step(sys: &System, y0: &[C64], f0: &[C64], span: f64, cfg: &IntegratorConfig) -> f64 {
    let scale = |v: &[C64]| {
        let s: f64 = v
            .iter()
            .zip(y0)
            .map(|(a, y)| (a.norm() / (cfg.abs_tol + cfg.rel_tol * y.norm())).powi(2))
            .sum();
        (s / v.len() as f64).sqrt()
    };
    let d0 = scale(y0);
    let d1 = scale(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span).min(cfg.max_step);
    let y1 = axpy_stage(y0, h0, &[(1.0, f0)]);
    let f1 = sys.rhs(&y1);
    let d2 = scale(&vec_sub(&f1, f0)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span).min(cfg.max_step)
}

struct AdaptiveOutcome {
    y: Vec<C64>,
    steps: Vec<f64>,
}

fn integrate_adaptive(sys: &System, y0: Vec<C64>, span: f64, cfg: &IntegratorConfig) -> Result<AdaptiveOutcome> {
    cfg.validate()?;
    check_escape(&y0, sys.n, 0.0, cfg)?;
    let mut steps = Vec::new();
    if span == 0.0 {
        return Ok(AdaptiveOutcome { y: y0, steps });
    }
    let mut y = y0;
    let mut k1 = sys.rhs(&y);
    let mut t = 0.0;
    let mut h = initial_step(sys, &y, &k1, span, cfg);
    let mut rejected_last = false;
    let mut attempts = 0usize;
    while t < span {
        attempts += 1;
        if attempts > cfg.max_steps {
            return Err(Error::StepLimit { t, max_steps: cfg.max_steps });
        }
        let remaining = span - t;
        let last = h >= remaining * (1.0 - 1e-12);
        let h_try = if last { remaining } else { h };
        let (y_new, k_new, err) = dp_step(sys, &y, &k1, h_try);
        let en = if all_finite(&y_new) { error_norm(&err, &y, &y_new, cfg) } else { f64::INFINITY };
        if en <= 1.0 {
            t = if last { span } else { t + h_try };
            steps.push(h_try);
            check_escape(&y_new, sys.n, t, cfg)?;
            y = y_new;
            k1 = k_new;
            let grow = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            let grow = if rejected_last { grow.min(1.0) } else { grow };
            h = (h_try * grow).min(cfg.max_step);
            rejected_last = false;
        } else {
            if !en.is_finite() {
                check_escape(&y_new, sys.n, t + h_try, cfg)?;
            }
            let shrink = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
            h = h_try * shrink;
            rejected_last = true;
            if h < 1e-14 * span.max(1.0) {
                return Err(Error::StepLimit { t, max_steps: cfg.max_steps });
            }
        }
    }
    Ok(AdaptiveOutcome { y, steps })
}

fn check_inputs(field: &PolynomialMap, tau: f64, x0: &[C64]) -> Result<()> {
    if x0.len() != field.n() {
        return Err(Error::invalid(format!(
            "initial condition has length {}, field dimension is {}",
            x0.len(),
            field.n()
        )));
    }
    if !all_finite(x0) {
        return Err(Error::invalid("initial condition has non-finite entries"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("integration time must be finite and non-negative, got {tau}")));
    }
    Ok(())
}

/// `φ(τ, x0)`.
pub fn flow_map(field: &PolynomialMap, tau: f64, x0: &[C64], cfg: &IntegratorConfig) -> Result<Vec<C64>> {
    check_inputs(field, tau, x0)?;
    let sys = System { field, n: field.n(), with_jacobian: false };
    Ok(integrate_adaptive(&sys, sys.initial(x0), tau, cfg)?.y)
}

/// `φ(τ, x0)` together with `∂φ(τ, x)/∂x` at `x0`.
pub fn flow_with_jacobian(
    field: &PolynomialMap,
    tau: f64,
    x0: &[C64],
    cfg: &IntegratorConfig,
) -> Result<(Vec<C64>, CMatrix)> {
    check_inputs(field, tau, x0)?;
    let n = field.n();
    let sys = System { field, n, with_jacobian: true };
    let y = integrate_adaptive(&sys, sys.initial(x0), tau, cfg)?.y;
    split_augmented(y, n)
}

fn split_augmented(mut y: Vec<C64>, n: usize) -> Result<(Vec<C64>, CMatrix)> {
    let jac = CMatrix::new(n, y.split_off(n))?;
    Ok((y, jac))
}

pub fn flow_jacobian(field: &PolynomialMap, tau: f64, x0: &[C64], cfg: &IntegratorConfig) -> Result<CMatrix> {
    Ok(flow_with_jacobian(field, tau, x0, cfg)?.1)
}

/// `|φ(τ, x) − x|`.
pub fn return_error(field: &PolynomialMap, tau: f64, x: &[C64], cfg: &IntegratorConfig) -> Result<f64> {
    let y = flow_map(field, tau, x, cfg)?;
    Ok(vec_norm(&vec_sub(&y, x)))
}

/// A fixed sequence of step sizes.
///
/// With the step sequence frozen, the discrete flow is a polynomial, hence
/// holomorphic, function of the initial condition. Fits of invariant sets over
/// many initial conditions then see smooth discretization error instead of the
/// jitter produced by per-sample step selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMesh {
    pub steps: Vec<f64>,
}

impl StepMesh {
    pub fn span(&self) -> f64 {
        self.steps.iter().sum()
    }

    /// Adaptive mesh recorded from a reference trajectory with its variational equation.
    pub fn adaptive(field: &PolynomialMap, tau: f64, x_ref: &[C64], cfg: &IntegratorConfig) -> Result<Self> {
        check_inputs(field, tau, x_ref)?;
        let sys = System { field, n: field.n(), with_jacobian: true };
        let out = integrate_adaptive(&sys, sys.initial(x_ref), tau, cfg)?;
        Ok(Self { steps: out.steps })
    }

    /// Each step split into `k` equal substeps.
    pub fn refined(&self, k: usize) -> Self {
        let k = k.max(1);
        Self { steps: self.steps.iter().flat_map(|&h| std::iter::repeat(h / k as f64).take(k)).collect() }
    }

    fn run(&self, sys: &System, x0: &[C64], cfg: &IntegratorConfig) -> Result<Vec<C64>> {
        let mut y = sys.initial(x0);
        check_escape(&y, sys.n, 0.0, cfg)?;
        let mut k1 = sys.rhs(&y);
        let mut t = 0.0;
        for &h in &self.steps {
            let (y_new, k_new, _) = dp_step(sys, &y, &k1, h);
            t += h;
            check_escape(&y_new, sys.n, t, cfg)?;
            y = y_new;
            k1 = k_new;
        }
        Ok(y)
    }

    pub fn flow_map(&self, field: &PolynomialMap, x0: &[C64], cfg: &IntegratorConfig) -> Result<Vec<C64>> {
        check_inputs(field, 0.0, x0)?;
        let sys = System { field, n: field.n(), with_jacobian: false };
        self.run(&sys, x0, cfg)
    }

    pub fn flow_with_jacobian(
        &self,
        field: &PolynomialMap,
        x0: &[C64],
        cfg: &IntegratorConfig,
    ) -> Result<(Vec<C64>, CMatrix)> {
        check_inputs(field, 0.0, x0)?;
        let n = field.n();
        let sys = System { field, n, with_jacobian: true };
        split_augmented(self.run(&sys, x0, cfg)?, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

impl Trajectory {
    /// `t,re_1,im_1,…,re_n,im_n` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map(Vec::len).unwrap_or(0);
        let mut out = String::from("t");
        for l in 1..=n {
            let _ = write!(out, ",re_{l},im_{l}");
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:.16e}");
            for z in x {
                let _ = write!(out, ",{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

/// Samples at `samples` equally spaced times in `[0, t_end]`, endpoints included.
pub fn integrate_trajectory(
    field: &PolynomialMap,
    x0: &[C64],
    t_end: f64,
    samples: usize,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if samples < 2 {
        return Err(Error::invalid("a trajectory needs at least 2 samples"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid(format!("t_end must be positive, got {t_end}")));
    }
    check_inputs(field, t_end, x0)?;
    let sys = System { field, n: field.n(), with_jacobian: false };
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut y = x0.to_vec();
    let segments = samples - 1;
    for k in 1..=segments {
        let t_prev = t_end * (k - 1) as f64 / segments as f64;
        let t_next = t_end * k as f64 / segments as f64;
        y = integrate_adaptive(&sys, y, t_next - t_prev, cfg).map_err(|e| match e {
            Error::Blowup { t, norm, radius } => Error::Blowup { t: t + t_prev, norm, radius },
            other => other,
        })?.y;
        times.push(t_next);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

/// The holomorphic map `Φ_τ(x) = φ(τ, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTMap {
    pub field: PolynomialMap,
    pub tau: f64,
    pub config: IntegratorConfig,
}

impl TimeTMap {
    pub fn new(field: PolynomialMap, tau: f64, config: IntegratorConfig) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid(format!("time-T map needs tau > 0, got {tau}")));
        }
        config.validate()?;
        Ok(Self { field, tau, config })
    }
}

impl HoloMap for TimeTMap {
    fn dim(&self) -> usize {
        self.field.n()
    }

    fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        flow_map(&self.field, self.tau, x, &self.config)
    }

    fn jacobian(&self, x: &[C64]) -> Result<CMatrix> {
        flow_jacobian(&self.field, self.tau, x, &self.config)
    }

    fn eval_with_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        flow_with_jacobian(&self.field, self.tau, x, &self.config)
    }
}

/// `Φ_τ` applied `m` times.
pub fn map_iterate(map: &TimeTMap, m: usize, x: &[C64]) -> Result<Vec<C64>> {
    if m == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    let mut y = x.to_vec();
    for _ in 0..m {
        y = map.eval(&y)?;
    }
    Ok(y)
}
