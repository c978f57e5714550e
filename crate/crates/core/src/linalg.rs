//! Dense complex linear algebra for small dimensions.
//!
//! Everything here works on row-major `n × n` complex matrices with `n` at most
//! [`MAX_DIM`]. The spectra are computed by Householder reduction to upper
//! Hessenberg form followed by Wilkinson-shifted QR sweeps; `n ≤ 2` uses the
//! quadratic formula directly. The exponential uses scaling and squaring around
//! a diagonal `[8/8]` Padé approximant.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard cap on ambient dimension shared by every module.
pub const MAX_DIM: usize = 16;

/// Pivot ratio below which a factorization is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

const PADE_ORDER: usize = 8;
const PADE_NORM_TARGET: f64 = 0.5;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn all_finite(x: &[C64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::invalid(format!("matrix dimension {n} outside 1..={MAX_DIM}")));
        }
        if data.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} outside 1..={MAX_DIM}");
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must all have length n"));
        }
        Self::new(n, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("matrix has non-finite entries"))
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, x.len());
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        vec_norm(&self.data)
    }

    /// Square sub-block on the given index set (rows and columns alike).
    pub fn principal_submatrix(&self, idx: &[usize]) -> Result<Self> {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                data.push(self[(i, j)]);
            }
        }
        Self::new(k, data)
    }

    pub fn det(&self) -> C64 {
        match Lu::factor(self) {
            Ok(lu) => lu.det(),
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Eigenvalues with algebraic multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiset comparison: every value is paired with a distinct partner within `tol`.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut used = vec![false; other.len()];
        for a in &self.values {
            let best = other
                .values
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, b)| (j, (a - b).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            match best {
                Some((j, d)) if d <= tol => used[j] = true,
                _ => return false,
            }
        }
        true
    }

    /// Values sorted by (re, im), for deterministic presentation.
    pub fn sorted(&self) -> Vec<C64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }
}

pub fn eigenvalues(m: &CMatrix) -> Result<Spectrum> {
    m.check_finite()?;
    let n = m.dim();
    let values = match n {
        1 => vec![m[(0, 0)]],
        2 => {
            let (a, b, cc, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let (l1, l2) = quadratic_eigs(a, b, cc, d);
            vec![l1, l2]
        }
        _ => {
            let mut h = m.clone();
            hessenberg_in_place(&mut h);
            hessenberg_qr_eigs(h)?
        }
    };
    Ok(Spectrum { values })
}

fn quadratic_eigs(a: C64, b: C64, cc: C64, d: C64) -> (C64, C64) {
    let mean = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let s = (half_diff * half_diff + b * cc).sqrt();
    (mean + s, mean - s)
}

fn hessenberg_in_place(h: &mut CMatrix) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= *vr * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v^H)
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| h[(i, k + 1 + r)] * vr).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if rho == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    (an / rho, (a / an) * b.conj() / rho)
}

fn hessenberg_qr_eigs(mut h: CMatrix) -> Result<Vec<C64>> {
    let n = h.dim();
    let mut eigs = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let max_total = 200 * n;
    loop {
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * diag.max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = quadratic_eigs(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs[lo] = l1;
            eigs[hi] = l2;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter_since_deflation = 0;
            continue;
        }
        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > max_total {
            return Err(Error::invalid("QR iteration failed to converge"));
        }
        let shift = if iter_since_deflation % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            let (l1, l2) = quadratic_eigs(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };
        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * cs + sn * b;
                h[(k + 1, j)] = -sn.conj() * a + b * cs;
            }
            rots.push((cs, sn));
        }
        for (off, (cs, sn)) in rots.into_iter().enumerate() {
            let k = lo + off;
            let row_end = (k + 2).min(hi);
            for i in lo..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * cs + b * sn.conj();
                h[(i, k + 1)] = -a * sn + b * cs;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eigs)
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
    /// min |u_ii| / max |u_ii|
    pub rcond: f64,
}

impl Lu {
    pub fn factor(m: &CMatrix) -> Result<Self> {
        m.check_finite()?;
        let n = m.dim();
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pmax == 0.0 {
                return Err(Error::SingularSystem { rcond: 0.0 });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| lu[i * n + i].norm()).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let rcond = if dmax > 0.0 { dmin / dmax } else { 0.0 };
        if !(rcond >= SINGULAR_RCOND) {
            return Err(Error::SingularSystem { rcond });
        }
        Ok(Self { n, lu, perm, sign, rcond })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            let col: Vec<C64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn det(&self) -> C64 {
        let n = self.n;
        (0..n).map(|i| self.lu[i * n + i]).fold(C64::new(self.sign, 0.0), |acc, d| acc * d)
    }
}

/// Solve `m x = b`.
pub fn linsolve(m: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != m.dim() {
        return Err(Error::invalid(format!(
            "right-hand side has length {}, matrix is {}x{}",
            b.len(),
            m.dim(),
            m.dim()
        )));
    }
    if !all_finite(b) {
        return Err(Error::invalid("right-hand side has non-finite entries"));
    }
    Ok(Lu::factor(m)?.solve(b))
}

fn pade_coefficients(p: usize) -> Vec<f64> {
    // c_k = (2p-k)! p! / ((2p)! k! (p-k)!), built by the recurrence c_{k+1} = c_k (p-k) / ((2p-k) (k+1))
    let mut coeffs = vec![1.0; p + 1];
    for k in 0..p {
        coeffs[k + 1] = coeffs[k] * (p - k) as f64 / (((2 * p - k) * (k + 1)) as f64);
    }
    coeffs
}

/// `e^{t M}` by scaling and squaring.
pub fn expm(m: &CMatrix, t: C64) -> Result<CMatrix> {
    m.check_finite()?;
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(Error::invalid("non-finite time argument"));
    }
    let n = m.dim();
    let a = m.scale(t);
    let norm = a.norm1();
    let squarings = if norm > PADE_NORM_TARGET {
        (norm / PADE_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(C64::new(2f64.powi(-squarings), 0.0));

    let coeffs = pade_coefficients(PADE_ORDER);
    let mut num = CMatrix::identity(n);
    let mut den = CMatrix::identity(n);
    let mut power = CMatrix::identity(n);
    for (k, ck) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&a);
        let term = power.scale(C64::new(*ck, 0.0));
        num = num.add(&term);
        den = if k % 2 == 0 { den.add(&term) } else { den.sub(&term) };
    }
    let mut result = Lu::factor(&den)?.solve_matrix(&num);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Complex least squares `min ‖A X − B‖` by Householder QR.
///
/// `a` has `rows × cols` entries (row-major), `b` has `rows × nrhs`; returns `cols × nrhs`.
pub fn least_squares(
    a: &[C64],
    rows: usize,
    cols: usize,
    b: &[C64],
    nrhs: usize,
) -> Result<Vec<C64>> {
    if a.len() != rows * cols || b.len() != rows * nrhs {
        return Err(Error::invalid("least-squares operand sizes do not match"));
    }
    if rows < cols {
        return Err(Error::invalid("least squares needs at least as many rows as columns"));
    }
    let mut r = a.to_vec();
    let mut rhs = b.to_vec();
    let mut diag_max: f64 = 0.0;
    for k in 0..cols {
        let xnorm = (k..rows).map(|i| r[i * cols + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            return Err(Error::SingularSystem { rcond: 0.0 });
        }
        let x0 = r[k * cols + k];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = (k..rows).map(|i| r[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm = vec_norm(&v);
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        for j in k..cols {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * r[(k + t) * cols + j]).sum();
            for (t, vt) in v.iter().enumerate() {
                r[(k + t) * cols + j] -= *vt * dot * 2.0;
            }
        }
        for j in 0..nrhs {
            let dot: C64 =
                v.iter().enumerate().map(|(t, vt)| vt.conj() * rhs[(k + t) * nrhs + j]).sum();
            for (t, vt) in v.iter().enumerate() {
                rhs[(k + t) * nrhs + j] -= *vt * dot * 2.0;
            }
        }
        diag_max = diag_max.max(r[k * cols + k].norm());
    }
    let diag_min = (0..cols).map(|k| r[k * cols + k].norm()).fold(f64::INFINITY, f64::min);
    let rcond = diag_min / diag_max;
    if !(rcond >= SINGULAR_RCOND) {
        return Err(Error::SingularSystem { rcond });
    }
    let mut x = vec![C64::new(0.0, 0.0); cols * nrhs];
    for j in 0..nrhs {
        for i in (0..cols).rev() {
            let mut acc = rhs[i * nrhs + j];
            for t in (i + 1)..cols {
                acc -= r[i * cols + t] * x[t * nrhs + j];
            }
            x[i * nrhs + j] = acc / r[i * cols + i];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn diag(vals: &[C64]) -> CMatrix {
        CMatrix::from_diag(vals)
    }

    #[test]
    fn eigenvalues_of_diagonal_rotation_and_jordan_block() {
        let s = eigenvalues(&diag(&[c(0.0, 1.0), c(-1.0, 0.0)])).unwrap();
        assert!(s.matches(&Spectrum { values: vec![c(0.0, 1.0), c(-1.0, 0.0)] }, 1e-14));

        let rot = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let s = eigenvalues(&rot).unwrap();
        assert!(s.matches(&Spectrum { values: vec![c(0.0, 1.0), c(0.0, -1.0)] }, 1e-14));

        let jordan = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]])
            .unwrap();
        let s = eigenvalues(&jordan).unwrap();
        assert!(s.matches(&Spectrum { values: vec![c(2.0, 0.0), c(2.0, 0.0)] }, 1e-14));
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // roots 1, 2, 3, 4 of (z-1)(z-2)(z-3)(z-4) = z^4 - 10z^3 + 35z^2 - 50z + 24
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = CMatrix::from_rows(&[
            vec![c(10.0, 0.0), c(-35.0, 0.0), c(50.0, 0.0), c(-24.0, 0.0)],
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, one, z],
        ])
        .unwrap();
        let s = eigenvalues(&m).unwrap();
        let expected = Spectrum { values: (1..=4).map(|k| c(k as f64, 0.0)).collect() };
        assert!(s.matches(&expected, 1e-9), "{:?}", s);
    }

    #[test]
    fn eigenvalues_reject_non_finite() {
        let m = diag(&[c(f64::NAN, 0.0), c(1.0, 0.0)]);
        assert!(matches!(eigenvalues(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn expm_closed_forms() {
        let z = expm(&CMatrix::zeros(3), c(1.7, -0.3)).unwrap();
        assert!(z.max_abs_diff(&CMatrix::identity(3)) < 1e-15);

        let e = expm(&diag(&[c(0.0, 1.0), c(-1.0, 0.0)]), c(2.0 * PI, 0.0)).unwrap();
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((e[(1, 1)] - c((-2.0 * PI).exp(), 0.0)).norm() < 1e-12 * (-2.0 * PI).exp());
        assert!(e[(0, 1)].norm() < 1e-15 && e[(1, 0)].norm() < 1e-15);

        let nil = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let e = expm(&nil, c(1.0, 0.0)).unwrap();
        let expected =
            CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(e.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn linsolve_cases() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5)];
        let x = linsolve(&CMatrix::identity(2), &b).unwrap();
        assert_eq!(x, b);

        let x = linsolve(&diag(&[c(2.0, 0.0), c(-1.0, 0.0)]), &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15 && (x[1] - c(-3.0, 0.0)).norm() < 1e-15);

        let err = linsolve(&CMatrix::zeros(2), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }

    #[test]
    fn least_squares_recovers_exact_fit() {
        // y = (1+i) t + 2 t^2 sampled at 5 points
        let ts = [0.1, 0.2, 0.5, -0.3, 0.7];
        let mut a = Vec::new();
        let mut b = Vec::new();
        for t in ts {
            a.push(c(t, 0.0));
            a.push(c(t * t, 0.0));
            b.push(c(1.0, 1.0) * t + c(2.0, 0.0) * t * t);
        }
        let x = least_squares(&a, 5, 2, &b, 1).unwrap();
        assert!((x[0] - c(1.0, 1.0)).norm() < 1e-13);
        assert!((x[1] - c(2.0, 0.0)).norm() < 1e-13);
    }
}
