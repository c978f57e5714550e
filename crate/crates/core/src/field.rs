//! Holomorphic polynomial maps `Cⁿ → Cⁿ`.
//!
//! A [`PolynomialMap`] holds one list of monomials per output coordinate. The
//! same type represents vector fields (`ẋ = F(x)`) and discrete maps whose fixed
//! points are being counted. Terms are kept normalized: one monomial per
//! exponent tuple, magnitudes below [`DROP_TOL`] removed, sorted by total degree
//! and then lexicographically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, CMatrix, C64, MAX_DIM};

/// Default cap on total degree of any monomial.
pub const DEGREE_CAP: usize = 12;

/// Coefficients with magnitude below this are dropped during normalization.
pub const DROP_TOL: f64 = 1e-15;

/// Anything that can be evaluated together with its complex Jacobian.
///
/// Evaluation is fallible because time-T maps of flows can blow up.
pub trait HoloMap: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[C64]) -> Result<Vec<C64>>;
    fn jacobian(&self, x: &[C64]) -> Result<CMatrix>;

    fn eval_with_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        Ok((self.eval(x)?, self.jacobian(x)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: C64,
    pub exp: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: C64, exp: Vec<u32>) -> Self {
        Self { coeff, exp }
    }

    pub fn degree(&self) -> usize {
        self.exp.iter().map(|&e| e as usize).sum()
    }
}

type Poly = BTreeMap<Vec<u32>, C64>;

fn degree_of(exp: &[u32]) -> usize {
    exp.iter().map(|&e| e as usize).sum()
}

fn poly_mul_truncated(a: &Poly, b: &Poly, degree: usize) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        let da = degree_of(ea);
        for (eb, cb) in b {
            if da + degree_of(eb) > degree {
                continue;
            }
            let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(exp).or_insert(C64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out
}

fn poly_from_terms(terms: &[Monomial]) -> Poly {
    let mut p = Poly::new();
    for t in terms {
        *p.entry(t.exp.clone()).or_insert(C64::new(0.0, 0.0)) += t.coeff;
    }
    p
}

fn normalize_terms(p: Poly) -> Vec<Monomial> {
    let mut terms: Vec<Monomial> = p
        .into_iter()
        .filter(|(_, c)| c.norm() >= DROP_TOL)
        .map(|(exp, coeff)| Monomial { coeff, exp })
        .collect();
    terms.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.exp.cmp(&b.exp)));
    terms
}

/// A polynomial map with one monomial list per output coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    n: usize,
    coords: Vec<Vec<Monomial>>,
    name: Option<String>,
}

impl PolynomialMap {
    /// Build and normalize. Exponent tuples must have length `n`, total degree ≤ [`DEGREE_CAP`].
    pub fn new(n: usize, coords: Vec<Vec<Monomial>>) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::invalid(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if coords.len() != n {
            return Err(Error::invalid(format!("expected {n} coordinates, got {}", coords.len())));
        }
        for (l, terms) in coords.iter().enumerate() {
            for t in terms {
                if t.exp.len() != n {
                    return Err(Error::invalid(format!(
                        "coordinate {l}: exponent tuple of length {} in dimension {n}",
                        t.exp.len()
                    )));
                }
                if t.degree() > DEGREE_CAP {
                    return Err(Error::invalid(format!(
                        "coordinate {l}: monomial degree {} exceeds cap {DEGREE_CAP}",
                        t.degree()
                    )));
                }
                if !all_finite(&[t.coeff]) {
                    return Err(Error::invalid(format!("coordinate {l}: non-finite coefficient")));
                }
            }
        }
        Ok(Self::from_polys(n, coords.iter().map(|t| poly_from_terms(t)).collect()))
    }

    fn from_polys(n: usize, polys: Vec<Poly>) -> Self {
        Self { n, coords: polys.into_iter().map(normalize_terms).collect(), name: None }
    }

    /// Convenience constructor from `(coordinate, coefficient, exponents)` triples.
    pub fn from_terms(n: usize, terms: &[(usize, C64, &[u32])]) -> Result<Self> {
        let mut coords = vec![Vec::new(); n];
        for (l, coeff, exp) in terms {
            if *l >= n {
                return Err(Error::invalid(format!("coordinate index {l} out of range for n = {n}")));
            }
            coords[*l].push(Monomial::new(*coeff, exp.to_vec()));
        }
        Self::new(n, coords)
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(&CMatrix::identity(n))
    }

    /// The linear map `x ↦ A x`.
    pub fn linear(a: &CMatrix) -> Self {
        let n = a.dim();
        let coords = (0..n)
            .map(|l| {
                let mut p = Poly::new();
                for j in 0..n {
                    let mut exp = vec![0u32; n];
                    exp[j] = 1;
                    p.insert(exp, a[(l, j)]);
                }
                p
            })
            .collect();
        Self::from_polys(n, coords)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[Vec<Monomial>] {
        &self.coords
    }

    /// Highest total degree over all coordinates (0 for the zero map).
    pub fn degree(&self) -> usize {
        self.coords.iter().flatten().map(Monomial::degree).max().unwrap_or(0)
    }

    /// `F(0) = 0`: every constant term vanishes.
    pub fn is_singular_at_origin(&self) -> bool {
        self.coords.iter().flatten().all(|t| t.degree() > 0)
    }

    fn check_point(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "point has length {}, map dimension is {}",
                x.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn power_table(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let max_deg = self.degree();
        x.iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(max_deg + 1);
                let mut p = C64::new(1.0, 0.0);
                for _ in 0..=max_deg {
                    row.push(p);
                    p *= xi;
                }
                row
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_point(x)?;
        let pw = self.power_table(x);
        Ok(self
            .coords
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        t.exp
                            .iter()
                            .enumerate()
                            .fold(t.coeff, |acc, (j, &e)| acc * pw[j][e as usize])
                    })
                    .sum()
            })
            .collect())
    }

    pub fn jacobian_at(&self, x: &[C64]) -> Result<CMatrix> {
        self.check_point(x)?;
        let n = self.n;
        let pw = self.power_table(x);
        let mut jac = CMatrix::zeros(n);
        for (l, terms) in self.coords.iter().enumerate() {
            for t in terms {
                for k in 0..n {
                    let ek = t.exp[k];
                    if ek == 0 {
                        continue;
                    }
                    let mut v = t.coeff * ek as f64;
                    for (j, &e) in t.exp.iter().enumerate() {
                        let e = if j == k { e - 1 } else { e };
                        v *= pw[j][e as usize];
                    }
                    jac[(l, k)] += v;
                }
            }
        }
        Ok(jac)
    }

    /// `F′(0)`.
    pub fn linear_part(&self) -> CMatrix {
        self.jacobian_at(&vec![C64::new(0.0, 0.0); self.n]).expect("dimension matches by construction")
    }

    /// Taylor truncation of `self ∘ inner` to total degree `degree`.
    pub fn compose_truncated(&self, inner: &PolynomialMap, degree: usize) -> Result<PolynomialMap> {
        if inner.n != self.n {
            return Err(Error::invalid(format!(
                "cannot compose maps of dimension {} and {}",
                self.n, inner.n
            )));
        }
        if degree > DEGREE_CAP {
            return Err(Error::invalid(format!("truncation degree {degree} exceeds cap {DEGREE_CAP}")));
        }
        let n = self.n;
        let inner_polys: Vec<Poly> = inner
            .coords
            .iter()
            .map(|t| poly_from_terms(t).into_iter().filter(|(e, _)| degree_of(e) <= degree).collect())
            .collect();
        let max_exp: Vec<u32> = (0..n)
            .map(|j| self.coords.iter().flatten().map(|t| t.exp[j]).max().unwrap_or(0))
            .collect();
        let one: Poly = std::iter::once((vec![0u32; n], C64::new(1.0, 0.0))).collect();
        // powers[j][e] = inner_j^e truncated
        let powers: Vec<Vec<Poly>> = (0..n)
            .map(|j| {
                let mut list = vec![one.clone()];
                for e in 1..=max_exp[j] as usize {
                    let next = poly_mul_truncated(&list[e - 1], &inner_polys[j], degree);
                    list.push(next);
                }
                list
            })
            .collect();
        let polys = self
            .coords
            .iter()
            .map(|terms| {
                let mut acc = Poly::new();
                for t in terms {
                    let mut prod: Poly = std::iter::once((vec![0u32; n], t.coeff)).collect();
                    for (j, &e) in t.exp.iter().enumerate() {
                        if e > 0 {
                            prod = poly_mul_truncated(&prod, &powers[j][e as usize], degree);
                        }
                    }
                    for (exp, cf) in prod {
                        *acc.entry(exp).or_insert(C64::new(0.0, 0.0)) += cf;
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_polys(n, polys))
    }

    /// `m`-fold self-composition truncated to `degree`.
    pub fn iterate_truncated(&self, m: usize, degree: usize) -> Result<PolynomialMap> {
        if m == 0 {
            return Err(Error::invalid("iteration count must be at least 1"));
        }
        let mut acc = self.compose_truncated(&Self::identity(self.n), degree)?;
        for _ in 1..m {
            acc = self.compose_truncated(&acc, degree)?;
        }
        Ok(acc)
    }

    /// `c·F`: reparametrizes time by the complex factor `c`.
    pub fn scale_time(&self, factor: C64) -> Result<PolynomialMap> {
        if factor.norm() == 0.0 || !all_finite(&[factor]) {
            return Err(Error::invalid("time scale factor must be finite and nonzero"));
        }
        let polys = self
            .coords
            .iter()
            .map(|terms| terms.iter().map(|t| (t.exp.clone(), t.coeff * factor)).collect())
            .collect();
        let mut out = Self::from_polys(self.n, polys);
        out.name = self.name.clone();
        Ok(out)
    }

    /// Adds `ε_l x_l` to coordinate `l`.
    pub fn perturb_linear(&self, eps: &[C64]) -> Result<PolynomialMap> {
        if eps.len() != self.n {
            return Err(Error::invalid(format!(
                "perturbation has length {}, map dimension is {}",
                eps.len(),
                self.n
            )));
        }
        let polys = self
            .coords
            .iter()
            .enumerate()
            .map(|(l, terms)| {
                let mut p = poly_from_terms(terms);
                let mut exp = vec![0u32; self.n];
                exp[l] = 1;
                *p.entry(exp).or_insert(C64::new(0.0, 0.0)) += eps[l];
                p
            })
            .collect();
        let mut out = Self::from_polys(self.n, polys);
        out.name = self.name.clone();
        Ok(out)
    }

    /// `self − other`, coordinatewise.
    pub fn sub(&self, other: &PolynomialMap) -> Result<PolynomialMap> {
        if other.n != self.n {
            return Err(Error::invalid("dimension mismatch in subtraction"));
        }
        let polys = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let mut p = poly_from_terms(a);
                for t in b {
                    *p.entry(t.exp.clone()).or_insert(C64::new(0.0, 0.0)) -= t.coeff;
                }
                p
            })
            .collect();
        Ok(Self::from_polys(self.n, polys))
    }

    /// Coefficient of the given exponent tuple in coordinate `l` (zero if absent).
    pub fn coefficient(&self, l: usize, exp: &[u32]) -> C64 {
        self.coords[l]
            .iter()
            .find(|t| t.exp == exp)
            .map(|t| t.coeff)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn to_document(&self) -> FieldDocument {
        FieldDocument {
            name: self.name.clone(),
            n: self.n,
            coords: self
                .coords
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|t| MonomialDocument { re: t.coeff.re, im: t.coeff.im, exp: t.exp.clone() })
                        .collect()
                })
                .collect(),
        }
    }
}

impl HoloMap for PolynomialMap {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.evaluate(x)
    }

    fn jacobian(&self, x: &[C64]) -> Result<CMatrix> {
        self.jacobian_at(x)
    }
}

/// On-disk JSON form of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDocument {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    pub n: usize,
    pub coords: Vec<Vec<MonomialDocument>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialDocument {
    pub re: f64,
    pub im: f64,
    pub exp: Vec<u32>,
}

pub fn serialize_field(map: &PolynomialMap) -> String {
    serde_json::to_string(&map.to_document()).expect("field documents always serialize")
}

pub fn parse_field(text: &str) -> Result<PolynomialMap> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    parse_field_value(&value, "$")
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

/// Parse an already-decoded JSON value; `root` prefixes error paths.
pub fn parse_field_value(value: &Value, root: &str) -> Result<PolynomialMap> {
    let obj = value.as_object().ok_or_else(|| parse_err(root, "field document must be an object"))?;
    let n_path = format!("{root}.n");
    let n = obj
        .get("n")
        .ok_or_else(|| parse_err(&n_path, "missing"))?
        .as_u64()
        .ok_or_else(|| parse_err(&n_path, "must be a positive integer"))? as usize;
    if n == 0 || n > MAX_DIM {
        return Err(parse_err(&n_path, format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(parse_err(format!("{root}.name"), "must be a string")),
    };
    let coords_path = format!("{root}.coords");
    let coords_val = obj
        .get("coords")
        .ok_or_else(|| parse_err(&coords_path, "missing"))?
        .as_array()
        .ok_or_else(|| parse_err(&coords_path, "must be an array"))?;
    if coords_val.len() != n {
        return Err(parse_err(
            &coords_path,
            format!("expected {n} coordinate arrays, got {}", coords_val.len()),
        ));
    }
    let mut coords = Vec::with_capacity(n);
    for (l, terms_val) in coords_val.iter().enumerate() {
        let lpath = format!("{coords_path}[{l}]");
        let terms_arr = terms_val.as_array().ok_or_else(|| parse_err(&lpath, "must be an array"))?;
        let mut terms = Vec::with_capacity(terms_arr.len());
        for (k, term) in terms_arr.iter().enumerate() {
            let tpath = format!("{lpath}[{k}]");
            let tobj = term.as_object().ok_or_else(|| parse_err(&tpath, "monomial must be an object"))?;
            let num = |key: &str| -> Result<f64> {
                let p = format!("{tpath}.{key}");
                let v = tobj
                    .get(key)
                    .ok_or_else(|| parse_err(&p, "missing"))?
                    .as_f64()
                    .ok_or_else(|| parse_err(&p, "must be a number"))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(&p, "must be finite"))
                }
            };
            let re = num("re")?;
            let im = num("im")?;
            let epath = format!("{tpath}.exp");
            let exp_arr = tobj
                .get("exp")
                .ok_or_else(|| parse_err(&epath, "missing"))?
                .as_array()
                .ok_or_else(|| parse_err(&epath, "must be an array"))?;
            if exp_arr.len() != n {
                return Err(parse_err(&epath, format!("expected {n} exponents, got {}", exp_arr.len())));
            }
            let mut exp = Vec::with_capacity(n);
            for (j, e) in exp_arr.iter().enumerate() {
                let ep = format!("{epath}[{j}]");
                match e.as_u64() {
                    Some(v) if v <= u32::MAX as u64 => exp.push(v as u32),
                    _ => {
                        let msg = if e.as_i64().is_some_and(|v| v < 0) {
                            "negative exponent"
                        } else {
                            "exponent must be a non-negative integer"
                        };
                        return Err(parse_err(ep, msg));
                    }
                }
            }
            let deg: usize = exp.iter().map(|&e| e as usize).sum();
            if deg > DEGREE_CAP {
                return Err(parse_err(&epath, format!("total degree {deg} exceeds cap {DEGREE_CAP}")));
            }
            terms.push(Monomial::new(C64::new(re, im), exp));
        }
        coords.push(terms);
    }
    let map = PolynomialMap::new(n, coords).map_err(|e| parse_err(root, e.to_string()))?;
    Ok(match name {
        Some(s) => map.with_name(s),
        None => map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn p_center() -> PolynomialMap {
        PolynomialMap::from_terms(1, &[(0, c(0.0, 1.0), &[1]), (0, c(1.0, 0.0), &[2])]).unwrap()
    }

    fn f_planar() -> PolynomialMap {
        PolynomialMap::from_terms(
            2,
            &[(0, c(0.0, 1.0), &[1, 0]), (1, c(-1.0, 0.0), &[0, 1]), (1, c(1.0, 0.0), &[2, 0])],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p_center().evaluate(&[c(1.0, 0.0)]).unwrap(), vec![c(1.0, 1.0)]);
        assert_eq!(
            f_planar().evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            vec![c(0.0, 1.0), c(1.0, 0.0)]
        );
        assert_eq!(f_planar().evaluate(&[c(0.0, 0.0); 2]).unwrap(), vec![c(0.0, 0.0); 2]);
        assert!(f_planar().evaluate(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j0 = f_planar().jacobian_at(&[c(0.0, 0.0); 2]).unwrap();
        let expected = CMatrix::from_diag(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        assert_eq!(j0, expected);
        let j1 = f_planar().jacobian_at(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(j1[(1, 0)], c(2.0, 0.0));
        assert_eq!(j1[(0, 0)], c(0.0, 1.0));
        let z = c(0.3, -0.2);
        let jp = p_center().jacobian_at(&[z]).unwrap();
        assert!((jp[(0, 0)] - (c(0.0, 1.0) + z * 2.0)).norm() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        // f(z) = -z + z^2; f∘f = z - 2z^3 + z^4, worked by hand:
        // -(−z+z²) + (−z+z²)² = z − z² + z² − 2z³ + z⁴
        let f = PolynomialMap::from_terms(1, &[(0, c(-1.0, 0.0), &[1]), (0, c(1.0, 0.0), &[2])]).unwrap();
        let ff = f.compose_truncated(&f, 4).unwrap();
        let expected = PolynomialMap::from_terms(
            1,
            &[(0, c(1.0, 0.0), &[1]), (0, c(-2.0, 0.0), &[3]), (0, c(1.0, 0.0), &[4])],
        )
        .unwrap();
        assert_eq!(ff, expected);

        assert_eq!(f.compose_truncated(&PolynomialMap::identity(1), 12).unwrap(), f);

        let lam = c(0.3, 0.7);
        let g = PolynomialMap::from_terms(1, &[(0, lam, &[1]), (0, c(1.0, 0.0), &[2])]).unwrap();
        let gg = g.compose_truncated(&g, 1).unwrap();
        assert_eq!(gg.coords()[0].len(), 1);
        assert!((gg.coefficient(0, &[1]) - lam * lam).norm() < 1e-15);

        assert!(f.compose_truncated(&f, DEGREE_CAP + 1).is_err());
    }

    #[test]
    fn scale_time_examples() {
        let p = p_center();
        assert_eq!(p.scale_time(c(1.0, 0.0)).unwrap(), p);
        let q = p.scale_time(c(0.0, -1.0)).unwrap();
        let expected =
            PolynomialMap::from_terms(1, &[(0, c(1.0, 0.0), &[1]), (0, c(0.0, -1.0), &[2])]).unwrap();
        assert_eq!(q, expected);
        assert!(p.scale_time(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn perturb_linear_examples() {
        let f = PolynomialMap::from_terms(1, &[(0, c(-1.0, 0.0), &[1]), (0, c(1.0, 0.0), &[2])]).unwrap();
        assert_eq!(f.perturb_linear(&[c(0.0, 0.0)]).unwrap(), f);
        let g = f.perturb_linear(&[c(0.1, 0.0)]).unwrap();
        assert!((g.coefficient(0, &[1]) - c(-0.9, 0.0)).norm() < 1e-15);
        assert_eq!(g.coefficient(0, &[2]), c(1.0, 0.0));

        let h = PolynomialMap::from_terms(
            2,
            &[
                (0, c(1.0, 0.0), &[1, 0]),
                (0, c(1.0, 0.0), &[0, 2]),
                (1, c(1.0, 0.0), &[0, 1]),
                (1, c(1.0, 0.0), &[2, 0]),
            ],
        )
        .unwrap();
        let hp = h.perturb_linear(&[c(0.1, 0.0), c(-0.2, 0.0)]).unwrap();
        assert!((hp.coefficient(0, &[1, 0]) - c(1.1, 0.0)).norm() < 1e-15);
        assert!((hp.coefficient(1, &[0, 1]) - c(0.8, 0.0)).norm() < 1e-15);
        assert_eq!(hp.coefficient(0, &[0, 2]), c(1.0, 0.0));
        assert!(h.perturb_linear(&[c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn parse_examples() {
        let doc = r#"{"n":1,"coords":[[{"re":0,"im":1,"exp":[1]},{"re":1,"im":0,"exp":[2]}]]}"#;
        assert_eq!(parse_field(doc).unwrap(), p_center());

        let bad = r#"{"n":2,"coords":[[{"re":1,"im":0,"exp":[1]}],[]]}"#;
        match parse_field(bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "$.coords[0][0].exp"),
            other => panic!("expected parse error, got {other:?}"),
        }

        let dup = r#"{"n":1,"coords":[[{"re":1,"im":0,"exp":[2]},{"re":0.5,"im":2,"exp":[2]}]]}"#;
        let m = parse_field(dup).unwrap();
        assert_eq!(m.coords()[0].len(), 1);
        assert_eq!(m.coefficient(0, &[2]), c(1.5, 2.0));
    }

    #[test]
    fn parse_rejects_negative_exponents_and_wrong_arity() {
        let neg = r#"{"n":1,"coords":[[{"re":1,"im":0,"exp":[-1]}]]}"#;
        match parse_field(neg) {
            Err(Error::Parse { path, message }) => {
                assert_eq!(path, "$.coords[0][0].exp[0]");
                assert!(message.contains("negative"));
            }
            other => panic!("{other:?}"),
        }
        let arity = r#"{"n":2,"coords":[[]]}"#;
        assert!(matches!(parse_field(arity), Err(Error::Parse { .. })));
        let too_high = r#"{"n":1,"coords":[[{"re":1,"im":0,"exp":[13]}]]}"#;
        assert!(matches!(parse_field(too_high), Err(Error::Parse { .. })));
        assert!(matches!(parse_field("{not json"), Err(Error::Parse { .. })));
    }

    #[test]
    fn normalization_drops_cancelled_terms() {
        let m = PolynomialMap::from_terms(1, &[(0, c(1.0, 0.0), &[3]), (0, c(-1.0, 0.0), &[3])]).unwrap();
        assert!(m.coords()[0].is_empty());
        assert!(m.is_singular_at_origin());
        let k = PolynomialMap::from_terms(1, &[(0, c(1.0, 0.0), &[0])]).unwrap();
        assert!(!k.is_singular_at_origin());
    }
}
