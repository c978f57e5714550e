//! Periodic-orbit families through a singularity with a pure-imaginary eigenvalue.
//!
//! Given `F′(0)` with eigenvalue `ωi`, the time-`2π/|ω|` map `Φ` of the flow has
//! `0` as an accumulation point of fixed points. When no other eigenvalue `λ`
//! satisfies `λ/(ωi) ∈ ℤ`, the fixed points near `0` form a single analytic disk
//! `x_l = x_l(x_1)`, `l ≥ 2`, obtained from `φ_l(x_1, x_2, …, x_n) = x_l` by the
//! implicit function theorem. [`build_disk`] solves those equations on rings of
//! `x_1` values and fits the coefficients; [`verify_disk`] checks that sampled
//! disk points return after one period and not after any of its integer
//! fractions.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PolynomialMap;
use crate::flow::{flow_map, flow_with_jacobian, return_error, IntegratorConfig, StepMesh};
use crate::index::sphere_samples;
use crate::linalg::{eigenvalues, least_squares, vec_norm, vec_sub, CMatrix, Lu, C64};
use crate::newton::{newton_damped, newton_square, NewtonOptions};

/// Default relative tolerance for "pure imaginary" and "integer ratio" tests.
pub const DEFAULT_TOL_IMAG: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CenterConfig {
    pub integrator: IntegratorConfig,
    pub newton_tol: f64,
    pub max_newton_iter: usize,
    /// Return error at the full period must stay below this.
    pub pass_tol: f64,
    /// Return errors at period/k, k ≥ 2, must stay above this.
    pub fail_floor: f64,
    /// Ring radii as fractions of `delta`.
    pub rings: [f64; 3],
    pub ring_angles: usize,
    /// Maximum acceptable least-squares residual of a disk fit.
    pub fit_tol: f64,
    pub verify_samples: usize,
    pub scan_times: usize,
}

impl Default for CenterConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            newton_tol: 1e-11,
            max_newton_iter: 50,
            pass_tol: 1e-7,
            fail_floor: 1e-3,
            rings: [0.25, 0.5, 1.0],
            ring_angles: 32,
            fit_tol: 1e-8,
            verify_samples: 16,
            scan_times: 32,
        }
    }
}

impl CenterConfig {
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if !(self.newton_tol > 0.0 && self.pass_tol > 0.0 && self.fail_floor > 0.0 && self.fit_tol > 0.0) {
            return Err(Error::invalid("center tolerances must be positive"));
        }
        if self.ring_angles < 4 || self.verify_samples < 16 || self.scan_times == 0 || self.max_newton_iter == 0 {
            return Err(Error::invalid("ring_angles ≥ 4, verify_samples ≥ 16 and scan_times ≥ 1 are required"));
        }
        if self.rings.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::invalid("ring fractions must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offending {
    pub eigenvalue: C64,
    pub integer: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<C64>,
    pub omega: Option<f64>,
    /// `λ_l / (ωi)` for every eigenvalue other than the selected `ωi`.
    pub ratios: Vec<C64>,
    pub thm11_necessary: bool,
    pub thm12_ok: bool,
    pub thm13_ok: bool,
    pub offending: Vec<Offending>,
    pub tol_imag: f64,
    pub k_max: usize,
}

impl SpectralReport {
    pub fn period(&self) -> Option<f64> {
        self.omega.map(|w| 2.0 * PI / w.abs())
    }
}

/// Spectral center conditions of `F′(0)`.
///
/// `ω` is the pure-imaginary eigenvalue of smallest nonzero `|Im|`, ties broken
/// toward positive imaginary part. `k_max = None` uses `⌈max|λ|/|ω|⌉ + 2`.
pub fn analyze_spectrum(field: &PolynomialMap, tol_imag: f64, k_max: Option<usize>) -> Result<SpectralReport> {
    if !field.is_singular_at_origin() {
        return Err(Error::invalid("field must vanish at the origin"));
    }
    if !(tol_imag > 0.0) {
        return Err(Error::invalid("tol_imag must be positive"));
    }
    let a = field.linear_part();
    let eigs = eigenvalues(&a)?.sorted();
    let scale = 1.0 + a.frobenius();
    let chosen = eigs
        .iter()
        .enumerate()
        .filter(|(_, l)| l.re.abs() <= tol_imag * scale && l.im.abs() > tol_imag * scale)
        .min_by(|(_, x), (_, y)| {
            x.im.abs().total_cmp(&y.im.abs()).then_with(|| y.im.total_cmp(&x.im))
        })
        .map(|(i, l)| (i, l.im));
    let Some((chosen_idx, omega)) = chosen else {
        return Ok(SpectralReport {
            eigenvalues: eigs,
            omega: None,
            ratios: Vec::new(),
            thm11_necessary: false,
            thm12_ok: false,
            thm13_ok: false,
            offending: Vec::new(),
            tol_imag,
            k_max: k_max.unwrap_or(0),
        });
    };
    let max_abs = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let k_max = k_max.unwrap_or((max_abs / omega.abs()).ceil() as usize + 2);
    let wi = C64::new(0.0, omega);
    let mut ratios = Vec::new();
    let mut offending = Vec::new();
    for (i, l) in eigs.iter().enumerate() {
        if i == chosen_idx {
            continue;
        }
        let ratio = l / wi;
        ratios.push(ratio);
        let k = ratio.re.round();
        if k.abs() <= k_max as f64 && (ratio - C64::new(k, 0.0)).norm() <= tol_imag {
            offending.push(Offending { eigenvalue: *l, integer: k as i64 });
        }
    }
    let thm13_ok = offending.is_empty();
    let thm12_ok = offending.iter().all(|o| o.integer.abs() < 2);
    Ok(SpectralReport {
        eigenvalues: eigs,
        omega: Some(omega),
        ratios,
        thm11_necessary: true,
        thm12_ok,
        thm13_ok,
        offending,
        tol_imag,
        k_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub scale: f64,
    pub found: bool,
    pub point: Option<Vec<C64>>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub omega: f64,
    pub period: f64,
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    pub fn found_at_all_scales(&self) -> bool {
        self.entries.iter().all(|e| e.found)
    }

    pub fn found_at_no_scale(&self) -> bool {
        self.entries.iter().all(|e| !e.found)
    }
}

/// Looks for nonzero fixed points of the time-`2π/|ω|` map at decreasing scales.
pub fn accumulation_probe(
    field: &PolynomialMap,
    omega: f64,
    scales: &[f64],
    cfg: &CenterConfig,
) -> Result<ProbeReport> {
    cfg.validate()?;
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::invalid("omega must be finite and nonzero"));
    }
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::invalid("probe scales must be positive"));
    }
    let n = field.n();
    let period = 2.0 * PI / omega.abs();
    let zero = vec![C64::new(0.0, 0.0); n];
    let residual_map = |x: &[C64]| -> Result<(Vec<C64>, CMatrix)> {
        let (y, j) = flow_with_jacobian(field, period, x, &cfg.integrator)?;
        Ok((vec_sub(&y, x), j.sub(&CMatrix::identity(n))))
    };
    let mut entries = Vec::with_capacity(scales.len());
    for &s in scales {
        let opts =
            NewtonOptions { tol: cfg.newton_tol, max_iter: cfg.max_newton_iter, step_tol: 1e-14, escape: 4.0 * s };
        let mut starts = Vec::new();
        for frac in [0.5, 0.75, 1.0] {
            starts.extend(sphere_samples(&zero, frac * s, 4 * n));
        }
        let mut entry = ProbeEntry { scale: s, found: false, point: None, residual: None };
        for x0 in starts {
            let Some(root) = newton_damped(residual_map, &x0, &opts, &zero)? else { continue };
            let norm = vec_norm(&root.x);
            let accept_tol = cfg.newton_tol + 1e-6 * norm;
            if root.residual <= accept_tol && norm > 10.0 * cfg.newton_tol && norm <= s {
                entry = ProbeEntry { scale: s, found: true, point: Some(root.x), residual: Some(root.residual) };
                break;
            }
        }
        entries.push(entry);
    }
    Ok(ProbeReport { omega, period, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskCoefficient {
    /// Coordinate index, 1-based (the parameter coordinate is `l = 1`).
    pub l: usize,
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

/// `x_l = Σ_k c_{l,k} x_1^k` for `l = 2..n`, with no constant terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskModel {
    pub n: usize,
    pub omega: f64,
    pub period: f64,
    pub delta: f64,
    pub degree: usize,
    pub coeffs: Vec<DiskCoefficient>,
    pub residual_max: f64,
    /// Largest `|φ_1(x) − x_1|` over the solved samples.
    pub first_coordinate_residual: f64,
}

impl DiskModel {
    pub fn coefficient(&self, l: usize, k: usize) -> C64 {
        self.coeffs
            .iter()
            .find(|c| c.l == l && c.k == k)
            .map(|c| C64::new(c.re, c.im))
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// The disk point over parameter `x_1`.
    pub fn point(&self, x1: C64) -> Vec<C64> {
        let mut x = vec![x1];
        for l in 2..=self.n {
            let mut acc = C64::new(0.0, 0.0);
            let mut pw = x1;
            for k in 1..=self.degree {
                acc += self.coefficient(l, k) * pw;
                pw *= x1;
            }
            x.push(acc);
        }
        x
    }
}

fn ring_parameters(delta: f64, cfg: &CenterConfig) -> Vec<Vec<C64>> {
    // one warm-start chain per angle, radii increasing outward
    let mut radii = cfg.rings.to_vec();
    radii.sort_by(f64::total_cmp);
    (0..cfg.ring_angles)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / cfg.ring_angles as f64;
            radii.iter().map(|r| C64::from_polar(r * delta, th)).collect()
        })
        .collect()
}

struct DiskSample {
    x1: C64,
    transverse: Vec<C64>,
    first_residual: f64,
}

/// Solve `φ_l(x_1, y) = y_l` for the transverse coordinates along one chain of `x_1` values.
fn solve_chain(
    field: &PolynomialMap,
    mesh: &StepMesh,
    chain: &[C64],
    cfg: &CenterConfig,
    delta: f64,
) -> Result<Vec<DiskSample>> {
    let n = field.n();
    let m = n - 1;
    let opts = NewtonOptions { tol: cfg.newton_tol, max_iter: cfg.max_newton_iter, step_tol: 1e-15, escape: 10.0 * delta };
    let mut out = Vec::with_capacity(chain.len());
    let mut prev: Option<(C64, Vec<C64>)> = None;
    for &x1 in chain {
        let guess: Vec<C64> = match &prev {
            Some((p1, y)) => y.iter().map(|v| v * (x1 / p1) * (x1 / p1)).collect(),
            None => vec![C64::new(0.0, 0.0); m],
        };
        let g = |y: &[C64]| -> Result<(Vec<C64>, CMatrix)> {
            let mut x = vec![x1];
            x.extend_from_slice(y);
            let (phi, jac) = mesh.flow_with_jacobian(field, &x, &cfg.integrator)?;
            let idx: Vec<usize> = (1..n).collect();
            let block = jac.principal_submatrix(&idx)?.sub(&CMatrix::identity(m));
            Ok((vec_sub(&phi[1..], y), block))
        };
        let zero = vec![C64::new(0.0, 0.0); m];
        let root = newton_square(g, &zero, &guess, &zero, &opts)?.ok_or_else(|| {
            Error::DiskNotFound(format!("Newton diverged at |x_1| = {:.3e}; delta too large", x1.norm()))
        })?;
        let mut x = vec![x1];
        x.extend_from_slice(&root.x);
        let phi = mesh.flow_map(field, &x, &cfg.integrator)?;
        out.push(DiskSample { x1, transverse: root.x.clone(), first_residual: (phi[0] - x1).norm() });
        prev = Some((x1, root.x));
    }
    Ok(out)
}

/// Constructs the periodic analytic disk over the first coordinate.
pub fn build_disk(
    field: &PolynomialMap,
    report: &SpectralReport,
    delta: f64,
    degree: usize,
    cfg: &CenterConfig,
) -> Result<DiskModel> {
    cfg.validate()?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    if degree == 0 || degree >= cfg.ring_angles {
        return Err(Error::invalid(format!("fit degree must lie in 1..{}", cfg.ring_angles)));
    }
    let omega = report.omega.ok_or_else(|| Error::DiskNotFound("F'(0) has no nonzero pure imaginary eigenvalue".into()))?;
    if !report.thm13_ok {
        return Err(Error::DiskNotFound(format!(
            "integer eigenvalue ratios {:?}; the implicit-function construction does not apply",
            report.offending.iter().map(|o| o.integer).collect::<Vec<_>>()
        )));
    }
    let n = field.n();
    let period = 2.0 * PI / omega.abs();
    let integrator = IntegratorConfig { escape_radius: cfg.integrator.escape_radius.max(10.0 * delta), ..cfg.integrator };
    let cfg = CenterConfig { integrator, ..*cfg };
    let chains = ring_parameters(delta, &cfg);

    if n == 1 {
        let residuals: Vec<Result<f64>> = chains
            .par_iter()
            .flatten()
            .map(|x1| return_error(field, period, &[*x1], &cfg.integrator))
            .collect();
        let mut worst: f64 = 0.0;
        for r in residuals {
            worst = worst.max(r?);
        }
        if worst > cfg.pass_tol {
            return Err(Error::InconsistentDisk { residual: worst, tol: cfg.pass_tol });
        }
        return Ok(DiskModel {
            n,
            omega,
            period,
            delta,
            degree,
            coeffs: Vec::new(),
            residual_max: 0.0,
            first_coordinate_residual: worst,
        });
    }

    let zero = vec![C64::new(0.0, 0.0); n];
    let (_, j0) = flow_with_jacobian(field, period, &zero, &cfg.integrator)?;
    let idx: Vec<usize> = (1..n).collect();
    let transverse = j0.principal_submatrix(&idx)?.sub(&CMatrix::identity(n - 1));
    match Lu::factor(&transverse) {
        Ok(lu) if lu.rcond >= 1e-10 => {}
        _ => {
            return Err(Error::DiskNotFound(
                "transverse block of Φ'(0) − I is singular; x_1 does not parametrize the fixed-point set".into(),
            ))
        }
    }

    let mut x_ref = zero.clone();
    x_ref[0] = C64::new(delta, 0.0);
    let mesh = StepMesh::adaptive(field, period, &x_ref, &cfg.integrator)?;

    let solved: Vec<Result<Vec<DiskSample>>> =
        chains.par_iter().map(|chain| solve_chain(field, &mesh, chain, &cfg, delta)).collect();
    let mut samples = Vec::new();
    for s in solved {
        samples.extend(s?);
    }
    let first_coordinate_residual = samples.iter().map(|s| s.first_residual).fold(0.0, f64::max);
    if first_coordinate_residual > cfg.pass_tol {
        return Err(Error::InconsistentDisk { residual: first_coordinate_residual, tol: cfg.pass_tol });
    }

    let rows = samples.len();
    let m = n - 1;
    let mut a = Vec::with_capacity(rows * degree);
    let mut b = Vec::with_capacity(rows * m);
    for s in &samples {
        let u = s.x1 / delta;
        let mut pw = u;
        for _ in 0..degree {
            a.push(pw);
            pw *= u;
        }
        b.extend_from_slice(&s.transverse);
    }
    let scaled = least_squares(&a, rows, degree, &b, m)?;
    let mut coeffs = Vec::with_capacity(m * degree);
    for l in 0..m {
        for k in 0..degree {
            let cst = scaled[k * m + l] / delta.powi(k as i32 + 1);
            coeffs.push(DiskCoefficient { l: l + 2, k: k + 1, re: cst.re, im: cst.im });
        }
    }
    let mut model = DiskModel {
        n,
        omega,
        period,
        delta,
        degree,
        coeffs,
        residual_max: 0.0,
        first_coordinate_residual,
    };
    model.residual_max = samples
        .iter()
        .map(|s| vec_norm(&vec_sub(&model.point(s.x1)[1..], &s.transverse)))
        .fold(0.0, f64::max);
    if model.residual_max > cfg.fit_tol {
        return Err(Error::DiskNotFound(format!(
            "fit residual {:.3e} exceeds {:.3e}; raise the degree or shrink delta",
            model.residual_max, cfg.fit_tol
        )));
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityEntry {
    pub k: usize,
    pub min_return_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub samples: Vec<Vec<C64>>,
    pub period: f64,
    pub t0: f64,
    pub mstar: usize,
    pub max_return_error: f64,
    pub minimality: Vec<MinimalityEntry>,
    pub pass_tol: f64,
    pub fail_floor: f64,
    /// Every sampled orbit closes at the period and not at any period/k, `2 ≤ k ≤ m*`.
    pub all_periods_equal: bool,
}

/// Samples on the disk with `|x_1| ∈ [δ/4, δ]`.
pub fn disk_samples(disk: &DiskModel, count: usize) -> Vec<Vec<C64>> {
    let radii = [0.25, 0.5, 0.75, 1.0];
    let per_radius = count.div_ceil(radii.len());
    let mut out = Vec::with_capacity(per_radius * radii.len());
    for (ri, r) in radii.iter().enumerate() {
        for j in 0..per_radius {
            let th = 2.0 * PI * (j as f64 + ri as f64 / radii.len() as f64) / per_radius as f64;
            out.push(disk.point(C64::from_polar(r * disk.delta, th)));
        }
    }
    out
}

pub fn verify_disk(field: &PolynomialMap, disk: &DiskModel, t0: f64, cfg: &CenterConfig) -> Result<PeriodicityReport> {
    cfg.validate()?;
    if disk.n != field.n() {
        return Err(Error::invalid("disk dimension does not match the field"));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::invalid("T0 must be positive"));
    }
    let mstar = (2.0 * PI / (t0 * disk.omega.abs())).floor() as usize;
    if mstar == 0 {
        return Err(Error::invalid("T0 must not exceed the period 2π/|ω|"));
    }
    let integrator = IntegratorConfig { escape_radius: cfg.integrator.escape_radius.max(10.0 * disk.delta), ..cfg.integrator };
    let samples = disk_samples(disk, cfg.verify_samples);
    let errs_at = |t: f64| -> Result<Vec<f64>> {
        samples.par_iter().map(|x| return_error(field, t, x, &integrator)).collect()
    };
    let max_return_error = errs_at(disk.period)?.into_iter().fold(0.0, f64::max);
    let mut minimality = Vec::new();
    for k in 2..=mstar {
        let min_err = errs_at(disk.period / k as f64)?.into_iter().fold(f64::INFINITY, f64::min);
        minimality.push(MinimalityEntry { k, min_return_error: min_err });
    }
    let all_periods_equal =
        max_return_error <= cfg.pass_tol && minimality.iter().all(|e| e.min_return_error >= cfg.fail_floor);
    Ok(PeriodicityReport {
        samples,
        period: disk.period,
        t0,
        mstar,
        max_return_error,
        minimality,
        pass_tol: cfg.pass_tol,
        fail_floor: cfg.fail_floor,
        all_periods_equal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub t: f64,
    /// `min_x |φ(t, x) − x| / t` over the sphere samples.
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rho: f64,
    pub t0: f64,
    pub samples: usize,
    pub boundary_min_field: f64,
    /// `½ · min |F|` on the sphere.
    pub bound: f64,
    pub entries: Vec<ScanEntry>,
    pub passed: bool,
}

impl ScanReport {
    pub fn min_ratio(&self) -> f64 {
        self.entries.iter().map(|e| e.min_ratio).fold(f64::INFINITY, f64::min)
    }
}

/// Quantitative form of "no short periods near the singularity".
pub fn min_period_scan(
    field: &PolynomialMap,
    rho: f64,
    t0: f64,
    samples: usize,
    cfg: &CenterConfig,
) -> Result<ScanReport> {
    cfg.validate()?;
    if !(rho.is_finite() && rho > 0.0) || !(t0.is_finite() && t0 > 0.0) || samples == 0 {
        return Err(Error::invalid("rho and T0 must be positive and samples ≥ 1"));
    }
    if field.is_singular_at_origin() {
        let spec = analyze_spectrum(field, DEFAULT_TOL_IMAG, None)?;
        if let Some(period) = spec.period() {
            if t0 >= period {
                return Err(Error::invalid(format!(
                    "T0 = {t0} must be below the period 2π/|ω| = {period}"
                )));
            }
        }
    }
    let zero = vec![C64::new(0.0, 0.0); field.n()];
    let points = sphere_samples(&zero, rho, samples);
    let mut bmin = f64::INFINITY;
    for x in &points {
        bmin = bmin.min(vec_norm(&field.evaluate(x)?));
    }
    if !(bmin > 1e-12 * (1.0 + rho)) {
        return Err(Error::PreconditionFailed(format!(
            "min |F| on the sphere is {bmin:.3e}; another singularity is too close"
        )));
    }
    let integrator = IntegratorConfig { escape_radius: cfg.integrator.escape_radius.max(10.0 * rho), ..cfg.integrator };
    let mut entries = Vec::with_capacity(cfg.scan_times);
    for j in 1..=cfg.scan_times {
        let t = t0 * j as f64 / cfg.scan_times as f64;
        let errs: Result<Vec<f64>> = points.par_iter().map(|x| flow_map(field, t, x, &integrator).map(|y| vec_norm(&vec_sub(&y, x)))).collect();
        let min_ratio = errs?.into_iter().fold(f64::INFINITY, f64::min) / t;
        entries.push(ScanEntry { t, min_ratio });
    }
    let bound = 0.5 * bmin;
    let passed = entries.iter().all(|e| e.min_ratio >= bound);
    Ok(ScanReport { rho, t0, samples, boundary_min_field: bmin, bound, entries, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn diag_field(d: &[C64]) -> PolynomialMap {
        PolynomialMap::linear(&CMatrix::from_diag(d))
    }

    fn planar() -> PolynomialMap {
        PolynomialMap::from_terms(
            2,
            &[(0, c(0.0, 1.0), &[1, 0]), (1, c(-1.0, 0.0), &[0, 1]), (1, c(1.0, 0.0), &[2, 0])],
        )
        .unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let r = analyze_spectrum(&diag_field(&[c(0.0, 1.0), c(-1.0, 0.0)]), DEFAULT_TOL_IMAG, None).unwrap();
        assert_eq!(r.omega, Some(1.0));
        assert!(r.thm11_necessary && r.thm12_ok && r.thm13_ok);
        assert!((r.ratios[0] - c(0.0, 1.0)).norm() < 1e-14);

        let r = analyze_spectrum(&diag_field(&[c(0.0, 1.0), c(0.0, 2.0)]), DEFAULT_TOL_IMAG, None).unwrap();
        assert_eq!(r.omega, Some(1.0));
        assert!(!r.thm12_ok && !r.thm13_ok);
        assert_eq!(r.offending, vec![Offending { eigenvalue: c(0.0, 2.0), integer: 2 }]);

        let r = analyze_spectrum(&diag_field(&[c(1.0, 0.0), c(2.0, 0.0)]), DEFAULT_TOL_IMAG, None).unwrap();
        assert_eq!(r.omega, None);
        assert!(!r.thm11_necessary && !r.thm12_ok && !r.thm13_ok);
    }

    #[test]
    fn spectrum_conjugate_pair_violates_only_the_stronger_condition() {
        let r = analyze_spectrum(&diag_field(&[c(0.0, 1.0), c(0.0, -1.0)]), DEFAULT_TOL_IMAG, None).unwrap();
        assert_eq!(r.omega, Some(1.0));
        assert!(r.thm12_ok && !r.thm13_ok);
        assert_eq!(r.offending[0].integer, -1);

        let r = analyze_spectrum(&diag_field(&[c(0.0, 1.0), c(0.0, 0.0)]), DEFAULT_TOL_IMAG, None).unwrap();
        assert!(r.thm12_ok && !r.thm13_ok);
        assert_eq!(r.offending[0].integer, 0);
    }

    #[test]
    fn probe_examples() {
        let cfg = CenterConfig::default();
        let scales = [1e-1, 1e-2, 1e-3, 1e-4];
        let p = accumulation_probe(&planar(), 1.0, &scales, &cfg).unwrap();
        assert!(p.found_at_all_scales(), "{p:?}");

        let expanding = diag_field(&[c(1.0, 0.0)]);
        let p = accumulation_probe(&expanding, 1.0, &scales, &cfg).unwrap();
        assert!(p.found_at_no_scale(), "{p:?}");

        let rot = diag_field(&[c(0.0, 1.0)]);
        let p = accumulation_probe(&rot, 1.0, &scales, &cfg).unwrap();
        assert!(p.found_at_all_scales());
    }

    #[test]
    fn disk_for_decoupled_linear_field_is_the_axis() {
        let f = diag_field(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        let cfg = CenterConfig::default();
        let spec = analyze_spectrum(&f, DEFAULT_TOL_IMAG, None).unwrap();
        let disk = build_disk(&f, &spec, 0.05, 4, &cfg).unwrap();
        assert!(disk.coeffs.iter().all(|cf| C64::new(cf.re, cf.im).norm() <= 1e-9), "{disk:?}");
        let report = verify_disk(&f, &disk, disk.period / 4.0, &cfg).unwrap();
        assert!(report.max_return_error <= 1e-8);
        // half period: z -> -z, error = 2 |x_1|
        let half = &report.minimality[0];
        assert_eq!(half.k, 2);
        assert!((half.min_return_error - 2.0 * 0.25 * 0.05).abs() < 1e-6);
        assert!(report.all_periods_equal);
    }

    #[test]
    fn disk_for_scalar_field_is_the_parameter_disk() {
        let p = PolynomialMap::from_terms(1, &[(0, c(0.0, 1.0), &[1]), (0, c(1.0, 0.0), &[2])]).unwrap();
        let cfg = CenterConfig::default();
        let spec = analyze_spectrum(&p, DEFAULT_TOL_IMAG, None).unwrap();
        let disk = build_disk(&p, &spec, 0.1, 3, &cfg).unwrap();
        assert!(disk.coeffs.is_empty());
        let report = verify_disk(&p, &disk, 2.0, &cfg).unwrap();
        assert!(report.max_return_error <= 1e-8);
        assert!(report.all_periods_equal);
    }

    #[test]
    fn disk_refused_for_resonant_spectrum() {
        let f = diag_field(&[c(0.0, 1.0), c(0.0, 2.0)]);
        let spec = analyze_spectrum(&f, DEFAULT_TOL_IMAG, None).unwrap();
        let err = build_disk(&f, &spec, 0.05, 4, &CenterConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DiskNotFound(_)));
    }

    #[test]
    fn scan_examples() {
        let cfg = CenterConfig::default();
        let rot = diag_field(&[c(0.0, 1.0)]);
        let r = min_period_scan(&rot, 0.5, PI, 64, &cfg).unwrap();
        for e in &r.entries {
            let exact = 2.0 * (e.t / 2.0).sin() * 0.5 / e.t;
            assert!((e.min_ratio - exact).abs() < 1e-8);
        }
        assert!(r.min_ratio() >= 0.318);
        assert!(r.passed);

        let err = min_period_scan(&rot, 0.5, 2.0 * PI, 64, &cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));

        // z (z - 0.5) has a second singularity on the sphere |z| = 0.5
        let near = PolynomialMap::from_terms(1, &[(0, c(-0.5, 0.0), &[1]), (0, c(1.0, 0.0), &[2])]).unwrap();
        let err = min_period_scan(&near, 0.5, 0.5, 64, &cfg).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(_)));
    }
}
