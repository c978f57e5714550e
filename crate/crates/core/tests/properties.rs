use std::f64::consts::PI;

use holocenter_core::center::{analyze_spectrum, build_disk, CenterConfig, DEFAULT_TOL_IMAG};
use holocenter_core::field::{parse_field, serialize_field, HoloMap, Monomial, PolynomialMap};
use holocenter_core::flow::{flow_jacobian, flow_map, IntegratorConfig};
use holocenter_core::index::{fixed_point_index, series_order_1d, BallRegion, IndexConfig};
use holocenter_core::linalg::{eigenvalues, expm, linsolve, vec_norm, CMatrix, Lu, C64};
use proptest::prelude::*;

fn cplx(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(n: usize, range: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(cplx(range), n * n).prop_map(move |d| CMatrix::new(n, d).unwrap())
}

fn sized_matrix(range: f64) -> impl Strategy<Value = CMatrix> {
    (1usize..=4).prop_flat_map(move |n| matrix(n, range))
}

/// Random polynomial map in `n` variables, degree ≤ 3, zero at the origin.
fn poly_map(n: usize) -> impl Strategy<Value = PolynomialMap> {
    let term = (0..n, cplx(1.0), prop::collection::vec(0u32..=2, n));
    prop::collection::vec(term, 1..8).prop_map(move |terms| {
        let terms: Vec<(usize, C64, Vec<u32>)> = terms
            .into_iter()
            .map(|(l, c, mut e)| {
                if e.iter().all(|&k| k == 0) {
                    e[0] = 1;
                }
                (l, c, e)
            })
            .collect();
        let refs: Vec<(usize, C64, &[u32])> = terms.iter().map(|(l, c, e)| (*l, *c, e.as_slice())).collect();
        PolynomialMap::from_terms(n, &refs).unwrap()
    })
}

fn point(n: usize, range: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(cplx(range), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_is_similarity_invariant(a in sized_matrix(1.0), seed in matrix(4, 1.0)) {
        let n = a.dim();
        let mut s = CMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += seed[(i, j)] * 0.3;
            }
        }
        let lu = Lu::factor(&s);
        prop_assume!(matches!(&lu, Ok(l) if l.rcond > 0.05));
        let s_inv = lu.unwrap().solve_matrix(&CMatrix::identity(n));
        let b = s.matmul(&a).matmul(&s_inv);
        let ea = eigenvalues(&a).unwrap();
        let eb = eigenvalues(&b).unwrap();
        // defective clusters split like ε^(1/n)
        prop_assert!(ea.matches(&eb, 1e-5 * (1.0 + a.frobenius())));
    }

    #[test]
    fn expm_determinant_is_exp_trace(a in sized_matrix(1.0), t in -2.0f64..2.0) {
        let e = expm(&a, C64::new(t, 0.0)).unwrap();
        let expected = (a.trace() * t).exp();
        prop_assert!((e.det() - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    }

    #[test]
    fn expm_group_law(a in sized_matrix(1.0), s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let lhs = expm(&a, C64::new(s + t, 0.0)).unwrap();
        let rhs = expm(&a, C64::new(s, 0.0)).unwrap().matmul(&expm(&a, C64::new(t, 0.0)).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * (1.0 + lhs.frobenius()));
    }

    #[test]
    fn polynomial_jacobian_matches_complex_differences(f in poly_map(3), x in point(3, 0.8), dir in 0usize..4) {
        let h = 1e-5;
        let step = [C64::new(h, 0.0), C64::new(0.0, h), C64::new(-h, 0.0), C64::new(0.0, -h)][dir];
        let jac = f.jacobian_at(&x).unwrap();
        for j in 0..3 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += step;
            xm[j] -= step;
            let fp = f.evaluate(&xp).unwrap();
            let fm = f.evaluate(&xm).unwrap();
            for i in 0..3 {
                let fd = (fp[i] - fm[i]) / (step * 2.0);
                prop_assert!((fd - jac[(i, j)]).norm() <= 1e-7 * (1.0 + jac[(i, j)].norm()));
            }
        }
    }

    #[test]
    fn perturbation_shifts_the_linear_diagonal(f in poly_map(3), eps in point(3, 0.1)) {
        let g = f.perturb_linear(&eps).unwrap();
        let expected = f.linear_part().add(&CMatrix::from_diag(&eps));
        prop_assert!(g.linear_part().max_abs_diff(&expected) <= 1e-15);
    }

    #[test]
    fn linsolve_residual_is_small(a in sized_matrix(1.0), b in point(4, 1.0)) {
        let n = a.dim();
        let b = &b[..n];
        let lu = Lu::factor(&a);
        prop_assume!(lu.is_ok());
        let x = linsolve(&a, b).unwrap();
        let r: f64 = a.mul_vec(&x).iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(r <= 1e-10 * (1.0 + a.frobenius() * vec_norm(&x)));
    }

    #[test]
    fn serialize_then_parse_is_identity(f in (1usize..=3).prop_flat_map(poly_map)) {
        let back = parse_field(&serialize_field(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn untruncated_composition_evaluates_like_nesting(f in poly_map(2), g in poly_map(2), x in point(2, 0.7)) {
        let deg = f.degree() * g.degree();
        prop_assume!(deg <= 12);
        let h = f.compose_truncated(&g, deg).unwrap();
        let direct = f.evaluate(&g.evaluate(&x).unwrap()).unwrap();
        let composed = h.evaluate(&x).unwrap();
        let diff: f64 = direct.iter().zip(&composed).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-10 * (1.0 + vec_norm(&direct)));
    }

    #[test]
    fn truncated_composition_error_is_high_order(f in poly_map(1), g in poly_map(1), d in 1usize..4) {
        let h = f.compose_truncated(&g, d).unwrap();
        // the discarded tail is O(|x|^(d+1)): halving x shrinks it at least 2^d times
        let err = |r: f64| {
            let x = [C64::new(r, 0.3 * r)];
            let direct = f.evaluate(&g.evaluate(&x).unwrap()).unwrap();
            (direct[0] - h.evaluate(&x).unwrap()[0]).norm()
        };
        let e1 = err(1e-2);
        let e2 = err(5e-3);
        prop_assert!(e2 <= e1 / (1u64 << d) as f64 * 1.05 + 1e-15);
    }
}

fn small_field(n: usize) -> impl Strategy<Value = PolynomialMap> {
    (poly_map(n), matrix(n, 1.0)).prop_map(move |(f, a)| {
        let mut coords = PolynomialMap::linear(&a.scale(C64::new(0.3, 0.0))).coords().to_vec();
        for (l, monos) in f.coords().iter().enumerate() {
            for m in monos {
                coords[l].push(Monomial::new(m.coeff * 0.3, m.exp.clone()));
            }
        }
        PolynomialMap::new(n, coords).unwrap()
    })
}

/// Rotation-type linear part with small nonlinear terms; orbits stay bounded over a few periods.
fn center_field() -> impl Strategy<Value = PolynomialMap> {
    (0.5f64..2.0, -2.0f64..-0.5, poly_map(2)).prop_map(|(w1, w2, f)| {
        let mut coords = PolynomialMap::linear(&CMatrix::from_diag(&[C64::new(0.0, w1), C64::new(0.0, w2)])).coords().to_vec();
        for (l, monos) in f.coords().iter().enumerate() {
            for m in monos.iter().filter(|m| m.degree() >= 2) {
                coords[l].push(Monomial::new(m.coeff * 0.2, m.exp.clone()));
            }
        }
        PolynomialMap::new(2, coords).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_composes(f in center_field(), x in point(2, 0.2), s in 1e-3f64..(2.0 * PI), t in 1e-3f64..(2.0 * PI)) {
        let cfg = IntegratorConfig::default();
        let whole = flow_map(&f, s + t, &x, &cfg);
        prop_assume!(whole.is_ok());
        let whole = whole.unwrap();
        let split = flow_map(&f, t, &flow_map(&f, s, &x, &cfg).unwrap(), &cfg).unwrap();
        let diff: f64 = whole.iter().zip(&split).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 10.0 * cfg.rel_tol * (1.0 + vec_norm(&whole)), "diff {diff:e}");
    }

    #[test]
    fn flow_jacobian_is_complex_linear(f in small_field(2), x in point(2, 0.2)) {
        let cfg = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..IntegratorConfig::default() };
        let tau = 0.7;
        let jac = flow_jacobian(&f, tau, &x, &cfg);
        prop_assume!(jac.is_ok());
        let jac = jac.unwrap();
        let h = 1e-5;
        for j in 0..2 {
            for step in [C64::new(h, 0.0), C64::new(0.0, h)] {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += step;
                xm[j] -= step;
                let fp = flow_map(&f, tau, &xp, &cfg).unwrap();
                let fm = flow_map(&f, tau, &xm, &cfg).unwrap();
                for i in 0..2 {
                    let fd = (fp[i] - fm[i]) / (step * 2.0);
                    prop_assert!((fd - jac[(i, j)]).norm() <= 1e-6 * (1.0 + jac[(i, j)].norm()));
                }
            }
        }
    }

    #[test]
    fn flow_jacobian_at_singularity_is_exponential(a in (1usize..=3).prop_flat_map(|n| matrix(n, 1.0)), tau in 0.1f64..(2.0 * PI)) {
        let n = a.dim();
        let mut f = PolynomialMap::linear(&a).coords().to_vec();
        // quadratic terms do not change the linearization at 0
        f[0].push(Monomial::new(C64::new(0.5, -0.2), {
            let mut e = vec![0; n];
            e[n - 1] = 2;
            e
        }));
        let field = PolynomialMap::new(n, f).unwrap();
        let j = flow_jacobian(&field, tau, &vec![C64::new(0.0, 0.0); n], &IntegratorConfig::default()).unwrap();
        let e = expm(&a, C64::new(tau, 0.0)).unwrap();
        prop_assert!(j.max_abs_diff(&e) <= 1e-8 * (1.0 + e.frobenius()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nondegenerate_scalar_fixed_point_has_index_one(
        lam in cplx(2.0),
        a2 in cplx(0.3),
        a3 in cplx(0.3),
    ) {
        prop_assume!((lam - C64::new(1.0, 0.0)).norm() >= 0.5);
        let f = PolynomialMap::from_terms(1, &[(0, lam, &[1]), (0, a2, &[2]), (0, a3, &[3])]).unwrap();
        let region = BallRegion::at_origin(1, 0.2).unwrap();
        let r = fixed_point_index(&f, &[C64::new(0.0, 0.0)], &region, &IndexConfig::default()).unwrap();
        prop_assert!(r.diagnostics.agreed);
        prop_assert_eq!(r.value.count(), Some(1));
    }

    #[test]
    fn index_agrees_with_series_order(k in 2u32..=5, a in cplx(1.0), b in cplx(1.0)) {
        prop_assume!(a.norm() > 0.2);
        let f = PolynomialMap::from_terms(1, &[(0, C64::new(1.0, 0.0), &[1]), (0, a, &[k]), (0, b * 0.1, &[k + 1])]).unwrap();
        let region = BallRegion::at_origin(1, 0.05 * a.norm()).unwrap();
        let r = fixed_point_index(&f, &[C64::new(0.0, 0.0)], &region, &IndexConfig::default()).unwrap();
        prop_assert_eq!(r.value.count(), Some(series_order_1d(&f, 1).unwrap()));
        prop_assert_eq!(r.value.count(), Some(k as usize));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn disk_is_unique_across_fit_degrees(lam in -2.0f64..-0.3, b in cplx(1.0)) {
        // (iz, λw + b z²) has the disk w = b/(2i − λ) z²
        let f = PolynomialMap::from_terms(
            2,
            &[(0, C64::new(0.0, 1.0), &[1, 0]), (1, C64::new(lam, 0.0), &[0, 1]), (1, b, &[2, 0])],
        ).unwrap();
        let cfg = CenterConfig::default();
        let spec = analyze_spectrum(&f, DEFAULT_TOL_IMAG, None).unwrap();
        let low = build_disk(&f, &spec, 0.05, 4, &cfg).unwrap();
        let high = build_disk(&f, &spec, 0.05, 6, &cfg).unwrap();
        for k in 1..=4 {
            prop_assert!((low.coefficient(2, k) - high.coefficient(2, k)).norm() <= 1e-6);
        }
        let exact = b / (C64::new(-lam, 2.0));
        prop_assert!((high.coefficient(2, 2) - exact).norm() <= 1e-6);
        let omega = spec.omega.unwrap();
        prop_assert!((high.period - 2.0 * PI / omega.abs()).abs() <= 1e-14);
    }
}

#[test]
fn holomap_trait_matches_inherent_evaluation() {
    let f = PolynomialMap::from_terms(2, &[(0, C64::new(1.0, 1.0), &[1, 1]), (1, C64::new(0.0, 2.0), &[2, 0])]).unwrap();
    let x = [C64::new(0.1, 0.2), C64::new(-0.3, 0.05)];
    assert_eq!(HoloMap::eval(&f, &x).unwrap(), f.evaluate(&x).unwrap());
    assert_eq!(HoloMap::jacobian(&f, &x).unwrap(), f.jacobian_at(&x).unwrap());
}
