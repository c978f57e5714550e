//! Built-in acceptance suite. Every criterion compares the engines against a
//! closed form or an independent brute-force computation.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::center::{
    accumulation_probe, analyze_spectrum, build_disk, min_period_scan, verify_disk, CenterConfig, DEFAULT_TOL_IMAG,
};
use crate::error::Result;
use crate::field::PolynomialMap;
use crate::flow::{flow_jacobian, return_error, IntegratorConfig};
use crate::index::{
    fixed_point_index, iterated_index, perturbed_index_sum, series_order_1d, BallRegion, IndexConfig, IndexResult,
    IndexValue,
};
use crate::linalg::{c, eigenvalues, CMatrix, Lu, C64};

const SEED: u64 = 0x5EED_2024;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} ({:.2} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

const CRITERIA: [(u32, &str, Check); 8] = [
    (1, "flow Jacobian at the singularity equals the linear exponential", flow_jacobian_check),
    (2, "isochronicity of iz + z^2 with minimal period 2π", isochronous_scalar),
    (3, "fixed-point index suite against oracles", index_suite),
    (4, "iterated index exceeds the iteration count", iterated_suite),
    (5, "closed-form periodic disk of (iz, -w + z^2)", disk_closed_form),
    (6, "no accumulation without a pure imaginary eigenvalue", necessity_control),
    (7, "simple fixed points have index 1; perturbed indices sum", simple_and_perturbed),
    (8, "no short periods for iz + z^2 near the origin", short_period_scan),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|(id, _, _)| *id).collect()
}

pub fn run(id: u32) -> Option<CriterionOutcome> {
    let (id, name, check) = CRITERIA.iter().find(|(i, _, _)| *i == id)?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionOutcome { id: *id, name, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    criterion_ids().into_iter().filter_map(run).collect()
}

fn planar_field() -> PolynomialMap {
    PolynomialMap::from_terms(2, &[(0, c(0.0, 1.0), &[1, 0]), (1, c(-1.0, 0.0), &[0, 1]), (1, c(1.0, 0.0), &[2, 0])])
        .expect("valid field")
}

fn scalar_center() -> PolynomialMap {
    PolynomialMap::from_terms(1, &[(0, c(0.0, 1.0), &[1]), (0, c(1.0, 0.0), &[2])]).expect("valid field")
}

fn random_c64(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn certified(r: &IndexResult) -> Option<usize> {
    if r.diagnostics.agreed {
        r.value.count()
    } else {
        None
    }
}

fn flow_jacobian_check() -> Result<(bool, String)> {
    let cfg = IntegratorConfig::default();
    let zero = [C64::new(0.0, 0.0); 2];
    let j = flow_jacobian(&planar_field(), 2.0 * PI, &zero, &cfg)?;
    let expected = CMatrix::from_diag(&[c(1.0, 0.0), c((-2.0 * PI).exp(), 0.0)]);
    let mut worst = j.sub(&expected).frobenius();
    let mut ok = worst <= 1e-8;
    let first = worst;

    // A = S D S⁻¹, so exp(τA) = S exp(τD) S⁻¹ in closed form
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tau = 1.5;
    for trial in 0..5 {
        let n = 1 + trial % 3;
        let s = loop {
            let s = CMatrix::new(n, (0..n * n).map(|_| random_c64(&mut rng, 1.0)).collect())?;
            if matches!(Lu::factor(&s), Ok(lu) if lu.rcond > 0.1) {
                break s;
            }
        };
        let d: Vec<C64> = (0..n).map(|_| random_c64(&mut rng, 1.0)).collect();
        let lu = Lu::factor(&s)?;
        let s_inv = lu.solve_matrix(&CMatrix::identity(n));
        let a = s.matmul(&CMatrix::from_diag(&d)).matmul(&s_inv);
        let exp_d: Vec<C64> = d.iter().map(|l| (l * tau).exp()).collect();
        let oracle = s.matmul(&CMatrix::from_diag(&exp_d)).matmul(&s_inv);
        let field = PolynomialMap::linear(&a);
        let j = flow_jacobian(&field, tau, &vec![C64::new(0.0, 0.0); n], &cfg)?;
        let err = j.sub(&oracle).frobenius();
        worst = worst.max(err);
        ok &= err <= 1e-8;
    }
    Ok((ok, format!("planar field error {first:.2e}; worst over 5 random linear fields {worst:.2e} (tol 1e-8)")))
}

fn isochronous_scalar() -> Result<(bool, String)> {
    let p = scalar_center();
    let cfg = IntegratorConfig::default();
    let starts = [c(0.02, 0.0), c(0.05, 0.0), C64::from_polar(0.1, PI / 3.0)];
    let mut ok = true;
    let mut max_full: f64 = 0.0;
    let mut min_frac = f64::INFINITY;
    for z in starts {
        let e = return_error(&p, 2.0 * PI, &[z], &cfg)?;
        max_full = max_full.max(e);
        ok &= e <= 1e-8;
        for k in [2.0, 3.0] {
            let e = return_error(&p, 2.0 * PI / k, &[z], &cfg)?;
            min_frac = min_frac.min(e);
            ok &= e >= 1e-3;
        }
    }
    Ok((ok, format!("max return error at 2π {max_full:.2e} (≤ 1e-8); min at 2π/2, 2π/3 {min_frac:.2e} (≥ 1e-3)")))
}

/// Roots of `(y², x²) = q`, all four written down directly.
fn quadratic_oracle(q: &[C64]) -> Vec<[C64; 2]> {
    let sx = q[1].sqrt();
    let sy = q[0].sqrt();
    let mut out = Vec::new();
    for x in [sx, -sx] {
        for y in [sy, -sy] {
            out.push([x, y]);
        }
    }
    out
}

fn index_suite() -> Result<(bool, String)> {
    let cfg = IndexConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();

    let one_d = [
        ("2z", PolynomialMap::from_terms(1, &[(0, c(2.0, 0.0), &[1])])?, 1usize),
        ("z + z^3", PolynomialMap::from_terms(1, &[(0, c(1.0, 0.0), &[1]), (0, c(1.0, 0.0), &[3])])?, 3),
    ];
    let region = BallRegion::at_origin(1, 0.5)?;
    for (name, f, expected) in &one_d {
        let r = fixed_point_index(f, &[c(0.0, 0.0)], &region, &cfg)?;
        let oracle = series_order_1d(f, 1)?;
        let got = certified(&r);
        ok &= got == Some(*expected) && oracle == *expected;
        notes.push(format!("{name}: {:?} oracle {oracle}", got));
    }

    let f = PolynomialMap::from_terms(
        2,
        &[(0, c(1.0, 0.0), &[1, 0]), (0, c(1.0, 0.0), &[0, 2]), (1, c(1.0, 0.0), &[0, 1]), (1, c(1.0, 0.0), &[2, 0])],
    )?;
    let region = BallRegion::at_origin(2, 0.5)?;
    let r = fixed_point_index(&f, &[c(0.0, 0.0); 2], &region, &cfg)?;
    let oracle = quadratic_oracle(&r.q_used);
    let inside: Vec<_> = oracle.iter().filter(|x| (x[0].norm_sqr() + x[1].norm_sqr()).sqrt() < 0.5).collect();
    let matched = inside.iter().all(|x| {
        r.roots.iter().any(|y| ((y[0] - x[0]).norm_sqr() + (y[1] - x[1]).norm_sqr()).sqrt() <= 1e-8)
    });
    let got = certified(&r);
    ok &= got == Some(4) && inside.len() == 4 && matched;
    notes.push(format!("(x+y^2, y+x^2): {got:?} oracle {} roots matched {matched}", inside.len()));
    Ok((ok, notes.join("; ")))
}

fn iterated_suite() -> Result<(bool, String)> {
    let cfg = IndexConfig::default();
    let region = BallRegion::at_origin(1, 0.1)?;
    let rot3 = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let cases = [
        (PolynomialMap::from_terms(1, &[(0, c(-1.0, 0.0), &[1]), (0, c(1.0, 0.0), &[2])])?, 2usize, 3usize),
        (PolynomialMap::from_terms(1, &[(0, rot3, &[1]), (0, c(1.0, 0.0), &[2])])?, 3, 4),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (f, m, expected) in &cases {
        let r = iterated_index(f, *m, &[c(0.0, 0.0)], &region, &cfg)?;
        let oracle = series_order_1d(f, *m)?;
        let got = certified(&r);
        ok &= got == Some(*expected) && oracle == *expected && *expected > *m;
        notes.push(format!("m={m}: {got:?} oracle {oracle}"));
    }
    Ok((ok, notes.join("; ")))
}

fn disk_closed_form() -> Result<(bool, String)> {
    let f = planar_field();
    let cfg = CenterConfig::default();
    let spec = analyze_spectrum(&f, DEFAULT_TOL_IMAG, None)?;
    let disk = build_disk(&f, &spec, 0.05, 6, &cfg)?;
    // w = a z² with 2ia·z² = −a z² + z², a = 1/(1 + 2i)
    let a = C64::new(1.0, 0.0) / C64::new(1.0, 2.0);
    let c22 = disk.coefficient(2, 2);
    let c22_err = (c22 - a).norm();
    let others = disk
        .coeffs
        .iter()
        .filter(|cf| cf.k != 2)
        .map(|cf| C64::new(cf.re, cf.im).norm())
        .fold(0.0, f64::max);
    let report = verify_disk(&f, &disk, disk.period / 8.0, &cfg)?;
    let min_minimality = report.minimality.iter().map(|e| e.min_return_error).fold(f64::INFINITY, f64::min);
    let ok = c22_err <= 1e-6
        && others <= 1e-6
        && report.max_return_error <= 1e-7
        && !report.minimality.is_empty()
        && min_minimality >= 1e-3;
    Ok((
        ok,
        format!(
            "c22 = {:.9}{:+.9}i (err {c22_err:.2e}); max other |c| {others:.2e}; return error {:.2e}; min minimality {min_minimality:.2e} over k=2..{}",
            c22.re, c22.im, report.max_return_error, report.mstar
        ),
    ))
}

fn necessity_control() -> Result<(bool, String)> {
    let f = PolynomialMap::linear(&CMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)]));
    let spec = analyze_spectrum(&f, DEFAULT_TOL_IMAG, None)?;
    let probe = accumulation_probe(&f, 1.0, &[1e-1, 1e-2, 1e-3, 1e-4], &CenterConfig::default())?;
    let ok = spec.omega.is_none() && !spec.thm11_necessary && probe.found_at_no_scale();
    Ok((ok, format!("omega {:?}; fixed points found at {} of 4 scales", spec.omega, probe.entries.iter().filter(|e| e.found).count())))
}

/// `λ`-linear part plus small quadratic and cubic terms, `σ_min(A − I) ≥ 0.5`.
fn random_nondegenerate_map(rng: &mut ChaCha8Rng, n: usize) -> Result<PolynomialMap> {
    let a = loop {
        let a = CMatrix::new(n, (0..n * n).map(|_| random_c64(rng, 1.5)).collect())?;
        let b = a.sub(&CMatrix::identity(n));
        let mut bh = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                bh[(i, j)] = b[(j, i)].conj();
            }
        }
        let gram = bh.matmul(&b);
        let smin = eigenvalues(&gram)?.values.iter().map(|l| l.re).fold(f64::INFINITY, f64::min).max(0.0).sqrt();
        if smin >= 0.5 {
            break a;
        }
    };
    let mut terms: Vec<(usize, C64, Vec<u32>)> = Vec::new();
    for l in 0..n {
        for i in 0..n {
            let mut e = vec![0u32; n];
            e[i] = 1;
            terms.push((l, a[(l, i)], e));
        }
        let nonlinear: Vec<Vec<u32>> = if n == 1 {
            vec![vec![2], vec![3]]
        } else {
            vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![3, 0], vec![0, 3]]
        };
        let k = nonlinear.len() as f64;
        for e in nonlinear {
            terms.push((l, random_c64(rng, 0.5 / k), e));
        }
    }
    let refs: Vec<(usize, C64, &[u32])> = terms.iter().map(|(l, cf, e)| (*l, *cf, e.as_slice())).collect();
    PolynomialMap::from_terms(n, &refs)
}

fn simple_and_perturbed() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let cfg = IndexConfig::default();
    let mut failures = Vec::new();
    for trial in 0..50 {
        let n = 1 + trial % 2;
        let f = random_nondegenerate_map(&mut rng, n)?;
        let region = BallRegion::at_origin(n, 0.2)?;
        let r = fixed_point_index(&f, &vec![c(0.0, 0.0); n], &region, &cfg)?;
        if certified(&r) != Some(1) {
            failures.push(format!("map {trial} gave {:?}", r.value));
        }
    }

    let f = PolynomialMap::from_terms(1, &[(0, c(1.0, 0.0), &[1]), (0, c(1.0, 0.0), &[3])])?;
    let region = BallRegion::at_origin(1, 0.5)?;
    let mut sums = Vec::new();
    for eps in [1e-3, 1e-2] {
        let rep = perturbed_index_sum(&f, &[c(eps, 0.0)], &region, &cfg)?;
        let indices_one = rep.fixed_points.iter().all(|p| p.index == IndexValue::Count(1));
        if rep.fixed_points.len() != 3 || !rep.all_simple || !indices_one || rep.index_sum != Some(3) {
            failures.push(format!("eps {eps}: {} fixed points, sum {:?}", rep.fixed_points.len(), rep.index_sum));
        }
        sums.push(format!("eps {eps}: sum {:?}", rep.index_sum));
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("50 random maps certified index 1; {}", sums.join(", "))
    } else {
        failures.join("; ")
    };
    Ok((ok, detail))
}

fn short_period_scan() -> Result<(bool, String)> {
    let report = min_period_scan(&scalar_center(), 0.5, 1.0, 64, &CenterConfig::default())?;
    let min_ratio = report.min_ratio();
    let ok = min_ratio >= 0.1 && report.entries.len() == CenterConfig::default().scan_times;
    Ok((ok, format!("min ratio {min_ratio:.4} over {} times (≥ 0.1); bound ½·min|F| = {:.4}", report.entries.len(), report.bound)))
}
