//! Newton iterations shared by the index and center engines.

use crate::error::{Error, Result};
use crate::linalg::{linsolve, vec_norm, vec_sub, CMatrix, C64};

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonOptions {
    /// Residual required for acceptance.
    pub tol: f64,
    pub max_iter: usize,
    /// Iteration stops once the step is below `step_tol · (1 + |x|)` (with residual ≤ tol).
    pub step_tol: f64,
    /// Abandon the iteration once `|x − anchor|` exceeds this.
    pub escape: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonRoot {
    pub x: Vec<C64>,
    pub residual: f64,
}

/// Solve `f(x) = target` for square systems.
///
/// Returns `Ok(None)` when the iteration diverges, escapes, hits a singular
/// Jacobian, or ends with a residual above `tol`. Only integration failures
/// inside `f` propagate as errors.
pub(crate) fn newton_square<F>(
    f: F,
    target: &[C64],
    x0: &[C64],
    anchor: &[C64],
    opts: &NewtonOptions,
) -> Result<Option<NewtonRoot>>
where
    F: Fn(&[C64]) -> Result<(Vec<C64>, CMatrix)>,
{
    let mut x = x0.to_vec();
    let mut best: Option<NewtonRoot> = None;
    for _ in 0..opts.max_iter {
        let (fx, jac) = match f(&x) {
            Ok(v) => v,
            Err(Error::Blowup { .. }) | Err(Error::StepLimit { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let r = vec_sub(&fx, target);
        let res = vec_norm(&r);
        if !res.is_finite() {
            return Ok(None);
        }
        if res <= opts.tol && best.as_ref().map_or(true, |b| res <= b.residual) {
            best = Some(NewtonRoot { x: x.clone(), residual: res });
        }
        if res == 0.0 {
            break;
        }
        let dx = match linsolve(&jac, &r) {
            Ok(d) => d,
            Err(Error::SingularSystem { .. }) => break,
            Err(e) => return Err(e),
        };
        let step = vec_norm(&dx);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi -= di;
        }
        if vec_norm(&vec_sub(&x, anchor)) > opts.escape || !step.is_finite() {
            return Ok(None);
        }
        if res <= opts.tol && step <= opts.step_tol * (1.0 + vec_norm(&x)) {
            // one more evaluation to record the final residual
            if let Ok((fx, _)) = f(&x) {
                let res_new = vec_norm(&vec_sub(&fx, target));
                if res_new <= opts.tol && best.as_ref().map_or(true, |b| res_new <= b.residual) {
                    best = Some(NewtonRoot { x: x.clone(), residual: res_new });
                }
            }
            break;
        }
    }
    Ok(best)
}

/// Levenberg–Marquardt with a small fixed damping; finds a nearby point of a
/// possibly non-isolated zero set of `x ↦ f(x) − x`-type residuals.
pub(crate) fn newton_damped<F>(f: F, x0: &[C64], opts: &NewtonOptions, anchor: &[C64]) -> Result<Option<NewtonRoot>>
where
    F: Fn(&[C64]) -> Result<(Vec<C64>, CMatrix)>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut best: Option<NewtonRoot> = None;
    for _ in 0..opts.max_iter {
        let (r, jac) = match f(&x) {
            Ok(v) => v,
            Err(Error::Blowup { .. }) | Err(Error::StepLimit { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let res = vec_norm(&r);
        if !res.is_finite() {
            return Ok(None);
        }
        if best.as_ref().map_or(true, |b| res < b.residual) {
            best = Some(NewtonRoot { x: x.clone(), residual: res });
        }
        if res <= opts.tol * 1e-3 {
            break;
        }
        // (J^H J + μ I) dx = J^H r
        let mut normal = CMatrix::zeros(n);
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += jac[(k, i)].conj() * jac[(k, j)];
                }
                normal[(i, j)] = acc;
            }
            for k in 0..n {
                rhs[i] += jac[(k, i)].conj() * r[k];
            }
        }
        let mu = 1e-12 * jac.frobenius().powi(2).max(1e-300);
        for i in 0..n {
            normal[(i, i)] += mu;
        }
        let dx = match linsolve(&normal, &rhs) {
            Ok(d) => d,
            Err(_) => break,
        };
        let step = vec_norm(&dx);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi -= di;
        }
        if vec_norm(&vec_sub(&x, anchor)) > opts.escape || !step.is_finite() {
            break;
        }
        if step <= opts.step_tol * (1.0 + vec_norm(&x)) {
            if let Ok((r, _)) = f(&x) {
                let res = vec_norm(&r);
                if best.as_ref().map_or(true, |b| res < b.residual) {
                    best = Some(NewtonRoot { x: x.clone(), residual: res });
                }
            }
            break;
        }
    }
    Ok(best)
}
