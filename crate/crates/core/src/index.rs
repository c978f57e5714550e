//! Zero indices and fixed-point indices of holomorphic maps.
//!
//! The zero index of an isolated zero `p` of a holomorphic `f` is the number of
//! preimages of a small regular value `q` near `p`. Because every such preimage
//! counts `+1` for holomorphic maps, counting distinct converged Newton roots of
//! `f(x) = q` inside a ball gives the index once `|q|` is below the minimum of
//! `|f|` on the boundary sphere.
//!
//! A count is certified only when every run agrees: at least two independent
//! draws of `q` on the full radius and one more on `0.8 ×` the radius. Any
//! disagreement yields [`IndexValue::Undetermined`] instead of a guessed integer.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{HoloMap, PolynomialMap, DEGREE_CAP};
use crate::flow::{map_iterate, TimeTMap};
use crate::linalg::{eigenvalues, vec_norm, vec_sub, CMatrix, C64};
use crate::newton::{newton_square, NewtonOptions, NewtonRoot};

/// Eigenvalue distance from 1 below which a fixed point is treated as non-simple.
pub const SIMPLE_EIGEN_TOL: f64 = 1e-8;

/// Truncated-series coefficients below this are treated as zero.
pub const SERIES_ZERO_TOL: f64 = 1e-10;

const BOUNDARY_SAMPLES_PER_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRegion {
    pub center: Vec<C64>,
    pub radius: f64,
}

impl BallRegion {
    pub fn new(center: Vec<C64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("region radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn at_origin(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); n], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.center.len() != n {
            return Err(Error::invalid(format!(
                "region center has dimension {}, map dimension is {n}",
                self.center.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    pub q_radius_factor: f64,
    pub newton_tol: f64,
    pub starts_per_dim: usize,
    /// Number of certification runs; at least 3 are always performed.
    pub retries: usize,
    pub separation_tol: f64,
    pub max_newton_iter: usize,
    pub seed: u64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            q_radius_factor: 0.1,
            newton_tol: 1e-11,
            starts_per_dim: 24,
            retries: 3,
            separation_tol: 1e-7,
            max_newton_iter: 100,
            seed: 0,
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_radius_factor > 0.0 && self.q_radius_factor < 1.0) {
            return Err(Error::invalid("q_radius_factor must lie in (0, 1)"));
        }
        if !(self.newton_tol > 0.0) || !(self.separation_tol > 0.0) {
            return Err(Error::invalid("newton_tol and separation_tol must be positive"));
        }
        if self.starts_per_dim == 0 || self.retries == 0 || self.max_newton_iter == 0 {
            return Err(Error::invalid("starts_per_dim, retries and max_newton_iter must be positive"));
        }
        Ok(())
    }

    fn newton_options(&self, radius: f64) -> NewtonOptions {
        NewtonOptions { tol: self.newton_tol, max_iter: self.max_newton_iter, step_tol: 1e-13, escape: 2.0 * radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexValue {
    Count(usize),
    Undetermined,
}

impl IndexValue {
    pub fn count(&self) -> Option<usize> {
        match self {
            IndexValue::Count(k) => Some(*k),
            IndexValue::Undetermined => None,
        }
    }
}

impl Serialize for IndexValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IndexValue::Count(k) => s.serialize_u64(*k as u64),
            IndexValue::Undetermined => s.serialize_str("undetermined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRun {
    pub radius: f64,
    pub q: Vec<C64>,
    pub boundary_min: f64,
    pub starts: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexDiagnostics {
    pub residuals: Vec<f64>,
    /// `|det f′(x)|` at each root; all nonzero when `q` is a regular value.
    pub jacobian_dets: Vec<f64>,
    pub min_separation: Option<f64>,
    pub runs: Vec<IndexRun>,
    pub agreed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexResult {
    pub value: IndexValue,
    #[serde(rename = "q")]
    pub q_used: Vec<C64>,
    pub roots: Vec<Vec<C64>>,
    pub diagnostics: IndexDiagnostics,
}

/// `x ↦ f(x) − x`.
pub struct MinusIdentity<'a, M: ?Sized>(pub &'a M);

impl<M: HoloMap + ?Sized> HoloMap for MinusIdentity<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        Ok(vec_sub(&self.0.eval(x)?, x))
    }

    fn jacobian(&self, x: &[C64]) -> Result<CMatrix> {
        Ok(self.0.jacobian(x)?.sub(&CMatrix::identity(x.len())))
    }

    fn eval_with_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        let (fx, j) = self.0.eval_with_jacobian(x)?;
        Ok((vec_sub(&fx, x), j.sub(&CMatrix::identity(x.len()))))
    }
}

/// `f^m` by direct iteration, Jacobian by the chain rule.
pub struct Iterate<'a, M: ?Sized> {
    pub map: &'a M,
    pub m: usize,
}

impl<M: HoloMap + ?Sized> HoloMap for Iterate<'_, M> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        let mut y = x.to_vec();
        for _ in 0..self.m {
            y = self.map.eval(&y)?;
        }
        Ok(y)
    }

    fn jacobian(&self, x: &[C64]) -> Result<CMatrix> {
        Ok(self.eval_with_jacobian(x)?.1)
    }

    fn eval_with_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        let mut y = x.to_vec();
        let mut jac = CMatrix::identity(x.len());
        for _ in 0..self.m {
            let (fy, jy) = self.map.eval_with_jacobian(&y)?;
            jac = jy.matmul(&jac);
            y = fy;
        }
        Ok((y, jac))
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Deterministic points on the sphere `|x − center| = radius` in `Cⁿ`.
pub(crate) fn sphere_samples(center: &[C64], radius: f64, count: usize) -> Vec<Vec<C64>> {
    let n = center.len();
    if n == 1 {
        return (0..count)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count as f64;
                vec![center[0] + C64::from_polar(radius, th)]
            })
            .collect();
    }
    // Kronecker sequence in [0,1)^{2n}, pushed through Box–Muller and normalized.
    let d = 2 * n;
    let alphas: Vec<f64> = (0..d).map(|j| (((j + 2) as f64).sqrt()).fract()).collect();
    (0..count)
        .map(|k| {
            let u: Vec<f64> = alphas
                .iter()
                .map(|a| ((k as f64 + 0.5) * a).fract().clamp(1e-12, 1.0 - 1e-12))
                .collect();
            let mut g = Vec::with_capacity(d);
            for pair in u.chunks(2) {
                let r = (-2.0 * pair[0].ln()).sqrt();
                g.push(r * (2.0 * PI * pair[1]).cos());
                g.push(r * (2.0 * PI * pair[1]).sin());
            }
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            (0..n).map(|j| center[j] + C64::new(g[2 * j], g[2 * j + 1]) * (radius / norm)).collect()
        })
        .collect()
}

/// Tensor grid of `per_dim^(2n)` cell centers in the bounding cube, restricted to the ball.
fn start_grid(center: &[C64], radius: f64, per_dim: usize, shift: f64) -> Vec<Vec<C64>> {
    let n = center.len();
    let d = 2 * n;
    let total = per_dim.pow(d as u32);
    let coord = |k: usize| -radius + (k as f64 + shift) * 2.0 * radius / per_dim as f64;
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut offs = vec![0.0; d];
        for o in offs.iter_mut() {
            *o = coord(rem % per_dim);
            rem /= per_dim;
        }
        if offs.iter().map(|v| v * v).sum::<f64>() > radius * radius {
            continue;
        }
        out.push((0..n).map(|j| center[j] + C64::new(offs[2 * j], offs[2 * j + 1])).collect());
    }
    if out.is_empty() {
        out.push(center.to_vec());
    }
    out
}

fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|_| {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let u3: f64 = rng.gen_range(1e-12..1.0);
            let u4: f64 = rng.gen::<f64>();
            let s = (-2.0 * u3.ln()).sqrt();
            C64::new(r * (2.0 * PI * u2).cos(), s * (2.0 * PI * u4).cos())
        })
        .collect();
    let norm = vec_norm(&v);
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

/// All distinct Newton roots of `f(x) = target` reached from the start grid, sorted lexicographically.
fn find_roots<M: HoloMap + ?Sized>(
    f: &M,
    target: &[C64],
    center: &[C64],
    radius: f64,
    cfg: &IndexConfig,
    shift: f64,
) -> Result<(Vec<NewtonRoot>, usize)> {
    let starts = start_grid(center, radius, cfg.starts_per_dim, shift);
    let opts = cfg.newton_options(radius);
    let results: Vec<Result<Option<NewtonRoot>>> = starts
        .par_iter()
        .map(|x0| newton_square(|x| f.eval_with_jacobian(x), target, x0, center, &opts))
        .collect();
    let mut roots = Vec::new();
    for r in results {
        if let Some(root) = r? {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| lex_cmp(&a.x, &b.x));
    let mut kept: Vec<NewtonRoot> = Vec::new();
    for r in roots {
        match kept.iter_mut().find(|k| vec_norm(&vec_sub(&k.x, &r.x)) <= cfg.separation_tol) {
            Some(k) => {
                if r.residual < k.residual {
                    *k = r;
                }
            }
            None => kept.push(r),
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.x, &b.x));
    Ok((kept, starts.len()))
}

/// Roots strictly inside the ball; roots within `separation_tol` of the sphere are an error.
fn interior_roots(roots: Vec<NewtonRoot>, center: &[C64], radius: f64, tol: f64) -> Result<Vec<NewtonRoot>> {
    let mut inside = Vec::new();
    for r in roots {
        let dist = vec_norm(&vec_sub(&r.x, center));
        if (dist - radius).abs() <= tol {
            return Err(Error::BoundaryAmbiguity { distance: (dist - radius).abs() });
        }
        if dist < radius {
            inside.push(r);
        }
    }
    Ok(inside)
}

fn min_pairwise_separation(points: &[Vec<C64>]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = vec_norm(&vec_sub(&points[i], &points[j]));
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best
}

/// `π_f(p)`: number of solutions of `f(x) = q` in the region for a small regular value `q`.
pub fn zero_index<M: HoloMap + ?Sized>(
    f: &M,
    p: &[C64],
    region: &BallRegion,
    cfg: &IndexConfig,
) -> Result<IndexResult> {
    cfg.validate()?;
    let n = f.dim();
    region.check_dim(n)?;
    if p.len() != n {
        return Err(Error::invalid("point dimension does not match the map"));
    }
    let runs_total = cfg.retries.max(3);
    let mut runs = Vec::with_capacity(runs_total);
    let mut first: Option<(Vec<C64>, Vec<NewtonRoot>)> = None;
    for run in 0..runs_total {
        let radius = if run == 2 { 0.8 * region.radius } else { region.radius };
        let mut bmin = f64::INFINITY;
        for x in sphere_samples(p, radius, BOUNDARY_SAMPLES_PER_DIM * n) {
            bmin = bmin.min(vec_norm(&f.eval(&x)?));
        }
        if !(bmin > 1e-14) {
            return Err(Error::BoundaryAmbiguity { distance: 0.0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(run as u64));
        let q: Vec<C64> =
            random_unit_vector(n, &mut rng).into_iter().map(|z| z * (cfg.q_radius_factor * bmin)).collect();
        let (roots, starts) = find_roots(f, &q, p, radius, cfg, 0.5)?;
        let inside = interior_roots(roots, p, radius, cfg.separation_tol)?;
        runs.push(IndexRun { radius, q: q.clone(), boundary_min: bmin, starts, count: inside.len() });
        if first.is_none() {
            first = Some((q, inside));
        }
    }
    let (q_used, roots) = first.expect("at least one run");
    let agreed = runs.iter().all(|r| r.count == runs[0].count);
    let value = if agreed { IndexValue::Count(roots.len()) } else { IndexValue::Undetermined };
    let mut jacobian_dets = Vec::with_capacity(roots.len());
    for r in &roots {
        jacobian_dets.push(f.jacobian(&r.x)?.det().norm());
    }
    let points: Vec<Vec<C64>> = roots.iter().map(|r| r.x.clone()).collect();
    Ok(IndexResult {
        value,
        q_used,
        diagnostics: IndexDiagnostics {
            residuals: roots.iter().map(|r| r.residual).collect(),
            jacobian_dets,
            min_separation: min_pairwise_separation(&points),
            runs,
            agreed,
        },
        roots: points,
    })
}

/// `μ_f(p) = π_{f−I}(p)`.
pub fn fixed_point_index<M: HoloMap + ?Sized>(
    f: &M,
    p: &[C64],
    region: &BallRegion,
    cfg: &IndexConfig,
) -> Result<IndexResult> {
    zero_index(&MinusIdentity(f), p, region, cfg)
}

/// No eigenvalue of `f′(p)` within [`SIMPLE_EIGEN_TOL`] of 1.
pub fn is_simple_fixed_point<M: HoloMap + ?Sized>(f: &M, p: &[C64]) -> Result<bool> {
    let spec = eigenvalues(&f.jacobian(p)?)?;
    Ok(spec.values.iter().all(|l| (l - C64::new(1.0, 0.0)).norm() > SIMPLE_EIGEN_TOL))
}

/// Maps whose iterates can be tested for being the identity near a point.
pub trait IterableMap: HoloMap {
    /// True when `f^m` is indistinguishable from the identity on the region.
    fn iterate_is_identity(&self, m: usize, p: &[C64], region: &BallRegion) -> Result<bool>;
}

/// `y ↦ f(y + p) − p` as a polynomial.
fn recentered(f: &PolynomialMap, p: &[C64]) -> Result<PolynomialMap> {
    let n = f.n();
    if p.iter().all(|z| z.norm() == 0.0) {
        return Ok(f.clone());
    }
    let mut terms: Vec<(usize, C64, Vec<u32>)> = Vec::new();
    for l in 0..n {
        let mut e = vec![0u32; n];
        e[l] = 1;
        terms.push((l, C64::new(1.0, 0.0), e));
        terms.push((l, p[l], vec![0u32; n]));
    }
    let shift_refs: Vec<(usize, C64, &[u32])> = terms.iter().map(|(l, c, e)| (*l, *c, e.as_slice())).collect();
    let shift = PolynomialMap::from_terms(n, &shift_refs)?;
    let composed = f.compose_truncated(&shift, DEGREE_CAP)?;
    let zero = vec![0u32; n];
    let minus_p: Vec<(usize, C64, &[u32])> = (0..n).map(|l| (l, p[l], zero.as_slice())).collect();
    composed.sub(&PolynomialMap::from_terms(n, &minus_p)?)
}

impl IterableMap for PolynomialMap {
    fn iterate_is_identity(&self, m: usize, p: &[C64], _region: &BallRegion) -> Result<bool> {
        let g = recentered(self, p)?;
        let diff = g.iterate_truncated(m, DEGREE_CAP)?.sub(&PolynomialMap::identity(self.n()))?;
        Ok(diff.coords().iter().flatten().all(|t| t.coeff.norm() <= SERIES_ZERO_TOL))
    }
}

impl IterableMap for TimeTMap {
    fn iterate_is_identity(&self, m: usize, p: &[C64], region: &BallRegion) -> Result<bool> {
        let rho = 0.5 * region.radius;
        let cfg = &self.config;
        let threshold = 10.0 * m as f64 * (cfg.abs_tol + cfg.rel_tol * (vec_norm(p) + rho));
        for x in sphere_samples(p, rho, 16 * self.dim()) {
            let y = map_iterate(self, m, &x)?;
            if vec_norm(&vec_sub(&y, &x)) > threshold {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `μ_{f^m}(p)`.
pub fn iterated_index<M: IterableMap + ?Sized>(
    f: &M,
    m: usize,
    p: &[C64],
    region: &BallRegion,
    cfg: &IndexConfig,
) -> Result<IndexResult> {
    if m == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    region.check_dim(f.dim())?;
    if f.iterate_is_identity(m, p, region)? {
        return Err(Error::NonIsolated(format!("f^{m} is the identity near the point")));
    }
    fixed_point_index(&Iterate { map: f, m }, p, region, cfg)
}

/// Vanishing order at 0 of `f^m(z) − z` for a one-dimensional germ with `f(0) = 0`.
pub fn series_order_1d(f: &PolynomialMap, m: usize) -> Result<usize> {
    if f.n() != 1 {
        return Err(Error::invalid("series order oracle requires a one-dimensional map"));
    }
    if !f.is_singular_at_origin() {
        return Err(Error::invalid("series order oracle requires f(0) = 0"));
    }
    if m == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    let g = f.iterate_truncated(m, DEGREE_CAP)?;
    for k in 1..=DEGREE_CAP {
        let mut coeff = g.coefficient(0, &[k as u32]);
        if k == 1 {
            coeff -= C64::new(1.0, 0.0);
        }
        if coeff.norm() > SERIES_ZERO_TOL {
            return Ok(k);
        }
    }
    Err(Error::NonIsolatedOrCapExceeded { cap: DEGREE_CAP })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapOrbit {
    pub points: Vec<Vec<C64>>,
    pub period: usize,
}

fn proper_divisors(m: usize) -> Vec<usize> {
    (1..m).filter(|d| m % d == 0).collect()
}

/// Orbits of exact period `m` whose points include a root of `f^m(x) = x` in the region.
pub fn periodic_points<M: HoloMap + ?Sized>(
    f: &M,
    m: usize,
    region: &BallRegion,
    cfg: &IndexConfig,
) -> Result<Vec<MapOrbit>> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    let n = f.dim();
    region.check_dim(n)?;
    let g = MinusIdentity(&Iterate { map: f, m });
    let zero = vec![C64::new(0.0, 0.0); n];
    let fixed_tol = 1e3 * cfg.newton_tol;
    let mut tallies = Vec::new();
    let mut result = None;
    for shift in [0.5, 0.25] {
        let (roots, _) = find_roots(&g, &zero, &region.center, region.radius, cfg, shift)?;
        let inside = interior_roots(roots, &region.center, region.radius, cfg.separation_tol)?;
        let mut exact = Vec::new();
        'roots: for r in inside {
            for d in proper_divisors(m) {
                let y = Iterate { map: f, m: d }.eval(&r.x)?;
                if vec_norm(&vec_sub(&y, &r.x)) <= fixed_tol {
                    continue 'roots;
                }
            }
            exact.push(r.x);
        }
        let orbits = group_orbits(f, m, exact, cfg)?;
        tallies.push(orbits.len());
        if result.is_none() {
            result = Some(orbits);
        }
    }
    if tallies.iter().any(|&t| t != tallies[0]) {
        return Err(Error::Undetermined(format!("orbit counts disagree across start grids: {tallies:?}")));
    }
    Ok(result.unwrap_or_default())
}

fn group_orbits<M: HoloMap + ?Sized>(
    f: &M,
    m: usize,
    roots: Vec<Vec<C64>>,
    cfg: &IndexConfig,
) -> Result<Vec<MapOrbit>> {
    let match_tol = 1e3 * cfg.separation_tol;
    let mut assigned = vec![false; roots.len()];
    let mut orbits = Vec::new();
    for i in 0..roots.len() {
        if assigned[i] {
            continue;
        }
        let mut pts = vec![roots[i].clone()];
        for _ in 1..m {
            let next = f.eval(pts.last().unwrap())?;
            pts.push(next);
        }
        for (j, r) in roots.iter().enumerate() {
            if pts.iter().any(|p| vec_norm(&vec_sub(p, r)) <= match_tol) {
                assigned[j] = true;
            }
        }
        if min_pairwise_separation(&pts).is_some_and(|s| s <= cfg.separation_tol) {
            continue;
        }
        // start the cycle at its lexicographically smallest point
        let start = (0..m).min_by(|&a, &b| lex_cmp(&pts[a], &pts[b])).unwrap_or(0);
        pts.rotate_left(start);
        orbits.push(MapOrbit { points: pts, period: m });
    }
    orbits.sort_by(|a, b| lex_cmp(&a.points[0], &b.points[0]));
    Ok(orbits)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedFixedPoint {
    pub point: Vec<C64>,
    /// `|det(g′(x) − I)|`
    pub det_abs: f64,
    pub simple: bool,
    pub index: IndexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub eps: Vec<C64>,
    pub fixed_points: Vec<PerturbedFixedPoint>,
    pub all_simple: bool,
    pub index_sum: Option<usize>,
}

/// Fixed points of `f + diag(ε) x` in the region with their local indices.
///
/// When the perturbation is small on the boundary, the local indices sum to
/// the index of the unperturbed fixed point.
pub fn perturbed_index_sum(
    f: &PolynomialMap,
    eps: &[C64],
    region: &BallRegion,
    cfg: &IndexConfig,
) -> Result<PerturbationReport> {
    let g = f.perturb_linear(eps)?;
    let fixed: Vec<Vec<C64>> = periodic_points(&g, 1, region, cfg)?.into_iter().map(|o| o.points[0].clone()).collect();
    let mut out = Vec::with_capacity(fixed.len());
    for (i, x) in fixed.iter().enumerate() {
        let det_abs = g.jacobian_at(x)?.sub(&CMatrix::identity(g.n())).det().norm();
        let simple = is_simple_fixed_point(&g, x)?;
        let nearest = fixed
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, y)| vec_norm(&vec_sub(x, y)))
            .fold(f64::INFINITY, f64::min);
        let to_boundary = region.radius - vec_norm(&vec_sub(x, &region.center));
        let local_radius = 0.4 * nearest.min(to_boundary).min(region.radius);
        let local = BallRegion::new(x.clone(), local_radius)?;
        let index = fixed_point_index(&g, x, &local, cfg)?.value;
        out.push(PerturbedFixedPoint { point: x.clone(), det_abs, simple, index });
    }
    let all_simple = out.iter().all(|p| p.simple);
    let index_sum = out.iter().map(|p| p.index.count()).sum::<Option<usize>>();
    Ok(PerturbationReport { eps: eps.to_vec(), fixed_points: out, all_simple, index_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn poly1(terms: &[(C64, u32)]) -> PolynomialMap {
        let t: Vec<(usize, C64, Vec<u32>)> = terms.iter().map(|(cf, e)| (0, *cf, vec![*e])).collect();
        let r: Vec<(usize, C64, &[u32])> = t.iter().map(|(l, cf, e)| (*l, *cf, e.as_slice())).collect();
        PolynomialMap::from_terms(1, &r).unwrap()
    }

    fn small_cfg() -> IndexConfig {
        IndexConfig { starts_per_dim: 12, ..Default::default() }
    }

    #[test]
    fn zero_index_of_cube_and_identity() {
        let cube = poly1(&[(c(1.0, 0.0), 3)]);
        let region = BallRegion::at_origin(1, 0.5).unwrap();
        let r = zero_index(&cube, &[c(0.0, 0.0)], &region, &IndexConfig::default()).unwrap();
        assert_eq!(r.value, IndexValue::Count(3));
        assert_eq!(r.roots.len(), 3);
        // brute force: the cube roots of q
        let q = r.q_used[0];
        for k in 0..3 {
            let w = C64::from_polar(q.norm().cbrt(), (q.arg() + 2.0 * PI * k as f64) / 3.0);
            assert!(r.roots.iter().any(|x| (x[0] - w).norm() < 1e-9));
        }

        let id = PolynomialMap::identity(2);
        let region = BallRegion::at_origin(2, 0.3).unwrap();
        let r = zero_index(&id, &[c(0.0, 0.0); 2], &region, &small_cfg()).unwrap();
        assert_eq!(r.value, IndexValue::Count(1));
    }

    #[test]
    fn zero_index_of_planar_squares() {
        let f = PolynomialMap::from_terms(2, &[(0, c(1.0, 0.0), &[0, 2]), (1, c(1.0, 0.0), &[2, 0])]).unwrap();
        let region = BallRegion::at_origin(2, 0.5).unwrap();
        let r = zero_index(&f, &[c(0.0, 0.0); 2], &region, &small_cfg()).unwrap();
        assert_eq!(r.value, IndexValue::Count(4));
        // brute force: y = ±sqrt(q1), x = ±sqrt(q2)
        let (q1, q2) = (r.q_used[0], r.q_used[1]);
        for sy in [1.0, -1.0] {
            for sx in [1.0, -1.0] {
                let expected = [q2.sqrt() * sx, q1.sqrt() * sy];
                assert!(r.roots.iter().any(|x| vec_norm(&vec_sub(x, &expected)) < 1e-9));
            }
        }
    }

    #[test]
    fn fixed_point_index_examples() {
        let region = BallRegion::at_origin(1, 0.5).unwrap();
        let cfg = IndexConfig::default();
        let double = poly1(&[(c(2.0, 0.0), 1)]);
        assert_eq!(fixed_point_index(&double, &[c(0.0, 0.0)], &region, &cfg).unwrap().value, IndexValue::Count(1));
        let cubic = poly1(&[(c(1.0, 0.0), 1), (c(1.0, 0.0), 3)]);
        assert_eq!(fixed_point_index(&cubic, &[c(0.0, 0.0)], &region, &cfg).unwrap().value, IndexValue::Count(3));
    }

    #[test]
    fn boundary_zero_is_ambiguous() {
        // f(z) = z (z - 0.5) has a zero on |z| = 0.5
        let f = poly1(&[(c(-0.5, 0.0), 1), (c(1.0, 0.0), 2)]);
        let region = BallRegion::at_origin(1, 0.5).unwrap();
        let err = zero_index(&f, &[c(0.0, 0.0)], &region, &IndexConfig::default()).unwrap_err();
        assert!(matches!(err, Error::BoundaryAmbiguity { .. }));
    }

    #[test]
    fn series_order_examples() {
        let f = poly1(&[(c(-1.0, 0.0), 1), (c(1.0, 0.0), 2)]);
        assert_eq!(series_order_1d(&f, 2).unwrap(), 3);
        assert_eq!(series_order_1d(&poly1(&[(c(2.0, 0.0), 1)]), 1).unwrap(), 1);
        assert_eq!(series_order_1d(&poly1(&[(c(1.0, 0.0), 1), (c(1.0, 0.0), 5)]), 1).unwrap(), 5);
        let rot = poly1(&[(c(0.0, 1.0), 1)]);
        assert!(matches!(series_order_1d(&rot, 4), Err(Error::NonIsolatedOrCapExceeded { .. })));
    }

    #[test]
    fn iterated_index_examples() {
        let region = BallRegion::at_origin(1, 0.5).unwrap();
        let cfg = IndexConfig::default();
        let f = poly1(&[(c(-1.0, 0.0), 1), (c(1.0, 0.0), 2)]);
        assert_eq!(iterated_index(&f, 2, &[c(0.0, 0.0)], &region, &cfg).unwrap().value, IndexValue::Count(3));

        let rot = poly1(&[(c(0.0, 1.0), 1)]);
        let err = iterated_index(&rot, 4, &[c(0.0, 0.0)], &region, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonIsolated(_)));
    }

    #[test]
    fn periodic_points_examples() {
        let cfg = IndexConfig::default();
        let region = BallRegion::at_origin(1, 1.0).unwrap();
        let f = poly1(&[(c(-1.0, 0.0), 1), (c(1.0, 0.0), 2)]);
        assert!(periodic_points(&f, 2, &region, &cfg).unwrap().is_empty());

        let g = poly1(&[(c(-0.9, 0.0), 1), (c(1.0, 0.0), 2)]);
        let orbits = periodic_points(&g, 2, &region, &cfg).unwrap();
        assert_eq!(orbits.len(), 1);
        // roots of z^2 + 0.1 z + 0.1
        let im = 0.39f64.sqrt() / 2.0;
        let pts = &orbits[0].points;
        assert!((pts[0][0] - c(-0.05, -im)).norm() < 1e-9);
        assert!((pts[1][0] - c(-0.05, im)).norm() < 1e-9);

        let d = poly1(&[(c(2.0, 0.0), 1)]);
        let fixed = periodic_points(&d, 1, &region, &cfg).unwrap();
        assert_eq!(fixed.len(), 1);
        assert!(fixed[0].points[0][0].norm() < 1e-12);
    }

    #[test]
    fn iterate_adapter_chain_rule() {
        let f = poly1(&[(c(0.3, 0.2), 1), (c(1.0, -0.5), 2)]);
        let it = Iterate { map: &f, m: 3 };
        let x = [c(0.1, -0.05)];
        let (y, j) = it.eval_with_jacobian(&x).unwrap();
        let f3 = f.iterate_truncated(3, DEGREE_CAP).unwrap();
        assert!((y[0] - f3.evaluate(&x).unwrap()[0]).norm() < 1e-14);
        assert!((j[(0, 0)] - f3.jacobian_at(&x).unwrap()[(0, 0)]).norm() < 1e-13);
    }

    #[test]
    fn recentered_map_is_conjugate() {
        let f = poly1(&[(c(0.5, 0.0), 1), (c(1.0, 0.0), 2)]);
        let p = [c(0.5, 0.0)]; // fixed point: 0.5 * 0.5 + 0.25 = 0.5
        let g = recentered(&f, &p).unwrap();
        let y = [c(0.01, 0.02)];
        let lhs = g.evaluate(&y).unwrap()[0];
        let rhs = f.evaluate(&[y[0] + p[0]]).unwrap()[0] - p[0];
        assert!((lhs - rhs).norm() < 1e-15);
        assert!(g.is_singular_at_origin());
    }
}
