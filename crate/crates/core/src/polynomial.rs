//! Sparse multivariate polynomials over Gaussian rationals, and matrices of
//! them.
//!
//! These represent matrices of multipliers at polynomial level. Coefficients
//! stay exact so that row-equation residuals are identically zero or
//! identically not, never "small".

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::number::{crat_from_rat, crat_to_c64, rat_to_string, CRat, Rat, C64};

/// Sparse multivariate polynomial with exact complex-rational coefficients.
///
/// Invariant: stored coefficients are nonzero and every exponent vector has
/// length `vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, CRat>,
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, value: CRat) -> Self {
        let mut p = Self::zero(vars);
        if !value.is_zero() {
            p.terms.insert(vec![0; vars], value);
        }
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, CRat::one())
    }

    pub fn rational(vars: usize, value: Rat) -> Self {
        Self::constant(vars, crat_from_rat(value))
    }

    /// The coordinate polynomial for variable `index`.
    pub fn variable(vars: usize, index: usize) -> Self {
        assert!(index < vars, "variable index out of range");
        let mut exps = vec![0; vars];
        exps[index] = 1;
        Self::monomial(vars, exps, CRat::one())
    }

    pub fn monomial(vars: usize, exps: Vec<u32>, coeff: CRat) -> Self {
        assert_eq!(exps.len(), vars, "exponent vector length must equal vars");
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &CRat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> CRat {
        self.terms.get(exps).cloned().unwrap_or_else(CRat::zero)
    }

    /// Largest total degree of any term; zero for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn insert_term(&mut self, exps: Vec<u32>, coeff: CRat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars);
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_term(exps, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, factor: &CRat) -> MultiPoly {
        if factor.is_zero() {
            return MultiPoly::zero(self.vars);
        }
        MultiPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    pub fn eval_exact(&self, point: &[CRat]) -> CRat {
        assert_eq!(point.len(), self.vars);
        let mut acc = CRat::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term *= x.clone();
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_c64(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.vars);
        let mut acc = C64::new(0.0, 0.0);
        for (exps, coeff) in &self.terms {
            let mut term = crat_to_c64(coeff);
            for (x, &e) in point.iter().zip(exps) {
                term *= x.powu(e);
            }
            acc += term;
        }
        acc
    }

    /// Squared L² norm on the torus: the coefficient ℓ² sum, by Parseval.
    pub fn l2_norm_sq(&self) -> Rat {
        self.terms
            .values()
            .map(|c| c.re.clone() * c.re.clone() + c.im.clone() * c.im.clone())
            .fold(Rat::zero(), |a, b| a + b)
    }
}

fn var_name(vars: usize, index: usize) -> String {
    match (vars, index) {
        (1, 0) => "z".into(),
        (2, 0) => "z".into(),
        (2, 1) => "w".into(),
        _ => format!("z{}", index + 1),
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff_str = if coeff.im.is_zero() {
                rat_to_string(&coeff.re)
            } else {
                format!("({}+{}i)", rat_to_string(&coeff.re), rat_to_string(&coeff.im))
            };
            let mut parts: Vec<String> = Vec::new();
            if exps.iter().all(|&e| e == 0) || coeff_str != "1" {
                parts.push(coeff_str);
            }
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(var_name(self.vars, i)),
                    _ => parts.push(format!("{}^{}", var_name(self.vars, i), e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<u32>,
    /// `[re, im]` as `p/q` strings.
    coeff: [String; 2],
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exps: e.clone(),
                    coeff: [rat_to_string(&c.re), rat_to_string(&c.im)],
                })
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(de)?;
        let mut p = MultiPoly::zero(repr.vars);
        for t in repr.terms {
            if t.exps.len() != repr.vars {
                return Err(D::Error::custom("exponent vector length must equal vars"));
            }
            let re = crate::number::rat_from_str(&t.coeff[0])
                .ok_or_else(|| D::Error::custom(format!("invalid rational `{}`", t.coeff[0])))?;
            let im = crate::number::rat_from_str(&t.coeff[1])
                .ok_or_else(|| D::Error::custom(format!("invalid rational `{}`", t.coeff[1])))?;
            p.insert_term(t.exps, CRat::new(re, im));
        }
        Ok(p)
    }
}

/// Rectangular matrix of multivariate polynomials sharing one variable count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMatrix {
    rows: usize,
    cols: usize,
    vars: usize,
    /// Row-major entries, `rows * cols` of them.
    entries: Vec<MultiPoly>,
}

impl PolynomialMatrix {
    pub fn zero(rows: usize, cols: usize, vars: usize) -> Self {
        PolynomialMatrix {
            rows,
            cols,
            vars,
            entries: vec![MultiPoly::zero(vars); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(CoreError::Validation(
                "polynomial matrix must be nonempty".into(),
            ));
        }
        let ncols = rows[0].len();
        let vars = rows[0][0].vars();
        for r in &rows {
            if r.len() != ncols {
                return Err(CoreError::ShapeMismatch {
                    detail: "ragged polynomial matrix".into(),
                });
            }
            for p in r {
                if p.vars() != vars {
                    return Err(CoreError::ShapeMismatch {
                        detail: "entries disagree on variable count".into(),
                    });
                }
            }
        }
        Ok(PolynomialMatrix {
            rows: rows.len(),
            cols: ncols,
            vars,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// A 1×n row of polynomials.
    pub fn row_vector(entries: Vec<MultiPoly>) -> Result<Self> {
        Self::from_rows(vec![entries])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: MultiPoly) {
        assert_eq!(p.vars(), self.vars);
        self.entries[i * self.cols + j] = p;
    }

    /// Largest total degree over all entries.
    pub fn degree_bound(&self) -> usize {
        self.entries.iter().map(|p| p.total_degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn matmul(&self, other: &PolynomialMatrix) -> Result<PolynomialMatrix> {
        if self.cols != other.rows || self.vars != other.vars {
            return Err(CoreError::ShapeMismatch {
                detail: format!(
                    "cannot multiply {}x{} ({} vars) by {}x{} ({} vars)",
                    self.rows, self.cols, self.vars, other.rows, other.cols, other.vars
                ),
            });
        }
        let mut out = PolynomialMatrix::zero(self.rows, other.cols, self.vars);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = MultiPoly::zero(self.vars);
                for k in 0..self.cols {
                    acc = acc.add(&self.entry(i, k).mul(other.entry(k, j)));
                }
                out.set_entry(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolynomialMatrix) -> Result<PolynomialMatrix> {
        if self.rows != other.rows || self.cols != other.cols || self.vars != other.vars {
            return Err(CoreError::ShapeMismatch {
                detail: "polynomial matrix shapes differ".into(),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.sub(b);
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolynomialMatrix) -> Result<PolynomialMatrix> {
        self.sub(&other.scale_rat(&crate::number::rat_int(-1)))
    }

    pub fn scale_rat(&self, factor: &Rat) -> PolynomialMatrix {
        let f = crat_from_rat(factor.clone());
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(&f);
        }
        out
    }

    pub fn scale(&self, factor: &CRat) -> PolynomialMatrix {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(factor);
        }
        out
    }

    /// Evaluates every entry at a point, as a complex matrix.
    pub fn eval_c64(&self, point: &[C64]) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).eval_c64(point))
    }

    pub fn eval_exact(&self, point: &[CRat]) -> Vec<Vec<CRat>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entry(i, j).eval_exact(point))
                    .collect()
            })
            .collect()
    }
}
