//! Exact-rational truncated models of the coordinate multiplication
//! operators on weighted monomial bases, and the operator identities they
//! satisfy.
//!
//! Operators live on the *unnormalized* monomial basis with an explicit
//! weight vector (the squared norms), so every matrix entry is rational and
//! the identity checks are exact: a defect is a nonzero rational, never a
//! small float. Identities are asserted only on monomials whose full orbit
//! under the longest operator word stays within the truncation degree.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::number::{binomial, factorial, rat_int, rat_string, Rat};
use crate::polynomial::MultiPoly;

/// The three weighted monomial spaces the models cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    BergmanDisk,
    HardyBidisk,
    HardyBall2,
}

impl Space {
    pub fn variables(&self) -> usize {
        match self {
            Space::BergmanDisk => 1,
            Space::HardyBidisk | Space::HardyBall2 => 2,
        }
    }

    /// Squared norm of the monomial `z^a w^b`.
    pub fn weight(&self, a: u32, b: u32) -> Rat {
        match self {
            Space::BergmanDisk => {
                debug_assert_eq!(b, 0);
                rat_int(1) / rat_int(a as i64 + 1)
            }
            Space::HardyBidisk => rat_int(1),
            Space::HardyBall2 => factorial(a) * factorial(b) / factorial(a + b + 1),
        }
    }
}

/// Which coordinate the operator multiplies by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Z,
    W,
}

/// Sparse coefficient vector over the monomial basis.
pub type SparseVec = BTreeMap<usize, Rat>;

fn sparse_add_scaled(acc: &mut SparseVec, v: &SparseVec, factor: &Rat) {
    if factor.is_zero() {
        return;
    }
    for (&i, c) in v {
        let entry = acc.entry(i).or_insert_with(Rat::zero);
        *entry += c.clone() * factor.clone();
        if entry.is_zero() {
            acc.remove(&i);
        }
    }
}

/// Truncated matrix model of multiplication by one coordinate.
///
/// `columns[j]` holds the single `(row, coefficient)` the shift sends basis
/// vector `j` to, or `None` past the truncation degree. The adjoint acts
/// exactly through the weight vector.
#[derive(Debug, Clone)]
pub struct OperatorModel {
    pub space: Space,
    pub variable: Variable,
    pub max_degree: usize,
    /// Basis index → exponent pair (second component 0 in one variable).
    basis: Vec<(u32, u32)>,
    index: BTreeMap<(u32, u32), usize>,
    columns: Vec<Option<(usize, Rat)>>,
    weights: Vec<Rat>,
    /// Indices whose action is uncorrupted by truncation (degree ≤ D−1).
    exact_rows: Vec<usize>,
}

/// Enumerates the monomial exponents of total degree ≤ `max_degree`.
fn enumerate_basis(space: Space, max_degree: usize) -> Vec<(u32, u32)> {
    let d = max_degree as u32;
    match space.variables() {
        1 => (0..=d).map(|a| (a, 0)).collect(),
        _ => {
            let mut out = Vec::new();
            for total in 0..=d {
                for a in (0..=total).rev() {
                    out.push((a, total - a));
                }
            }
            out
        }
    }
}

/// Builds the truncated shift for one coordinate on the chosen space.
pub fn build_shift(space: Space, variable: Variable, max_degree: usize) -> Result<OperatorModel> {
    if max_degree < 1 {
        return Err(CoreError::Validation(
            "truncation degree must be at least 1".into(),
        ));
    }
    if space.variables() == 1 && variable == Variable::W {
        return Err(CoreError::Validation(
            "the Bergman-disk model has a single coordinate".into(),
        ));
    }
    let basis = enumerate_basis(space, max_degree);
    let index: BTreeMap<(u32, u32), usize> =
        basis.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let weights: Vec<Rat> = basis.iter().map(|&(a, b)| space.weight(a, b)).collect();
    let columns: Vec<Option<(usize, Rat)>> = basis
        .iter()
        .map(|&(a, b)| {
            let target = match variable {
                Variable::Z => (a + 1, b),
                Variable::W => (a, b + 1),
            };
            index.get(&target).map(|&row| (row, Rat::one()))
        })
        .collect();
    let exact_rows = basis
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| ((a + b) as usize) < max_degree)
        .map(|(i, _)| i)
        .collect();
    Ok(OperatorModel {
        space,
        variable,
        max_degree,
        basis,
        index,
        columns,
        weights,
        exact_rows,
    })
}

impl OperatorModel {
    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn exponents_of(&self, idx: usize) -> (u32, u32) {
        self.basis[idx]
    }

    pub fn index_of(&self, exps: (u32, u32)) -> Option<usize> {
        self.index.get(&exps).copied()
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn exact_rows(&self) -> &[usize] {
        &self.exact_rows
    }

    /// Matrix entry `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> Rat {
        match &self.columns[col] {
            Some((r, c)) if *r == row => c.clone(),
            _ => Rat::zero(),
        }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, c) in v {
            if let Some((row, coeff)) = &self.columns[j] {
                let entry = out.entry(*row).or_insert_with(Rat::zero);
                *entry += c.clone() * coeff.clone();
                if entry.is_zero() {
                    out.remove(row);
                }
            }
        }
        out
    }

    /// Adjoint action of the truncated matrix, exact through the weights:
    /// `(M*)_{mn} = M_{nm} · w_n / w_m`.
    pub fn apply_adjoint(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&n, c) in v {
            let (a, b) = self.basis[n];
            let source = match self.variable {
                Variable::Z if a >= 1 => Some((a - 1, b)),
                Variable::W if b >= 1 => Some((a, b - 1)),
                _ => None,
            };
            if let Some(exps) = source {
                let m = self.index[&exps];
                // Truncated column m must actually reach n.
                if let Some((row, coeff)) = &self.columns[m] {
                    if *row == n {
                        let factor =
                            coeff.clone() * self.weights[n].clone() / self.weights[m].clone();
                        let entry = out.entry(m).or_insert_with(Rat::zero);
                        *entry += c.clone() * factor;
                        if entry.is_zero() {
                            out.remove(&m);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply_power(&self, v: &SparseVec, k: usize) -> SparseVec {
        let mut out = v.clone();
        for _ in 0..k {
            out = self.apply(&out);
        }
        out
    }

    pub fn apply_adjoint_power(&self, v: &SparseVec, k: usize) -> SparseVec {
        let mut out = v.clone();
        for _ in 0..k {
            out = self.apply_adjoint(&out);
        }
        out
    }

    /// Weighted inner product `⟨u, v⟩ = Σ u_i v_i w_i` (real coefficients).
    pub fn inner_product(&self, u: &SparseVec, v: &SparseVec) -> Rat {
        let mut acc = Rat::zero();
        for (&i, a) in u {
            if let Some(b) = v.get(&i) {
                acc += a.clone() * b.clone() * self.weights[i].clone();
            }
        }
        acc
    }

    fn monomial_name(&self, idx: usize) -> String {
        let (a, b) = self.basis[idx];
        let one_var = self.space.variables() == 1;
        let mut parts = Vec::new();
        match a {
            0 => {}
            1 => parts.push("z".to_string()),
            _ => parts.push(format!("z^{a}")),
        }
        if !one_var {
            match b {
                0 => {}
                1 => parts.push("w".to_string()),
                _ => parts.push(format!("w^{b}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Identity label used by reports and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    /// Bergman-disk identity `I + N B^{N+1}B*^{N+1} − (N+1)B^N B*^N = Proj`.
    Bergman,
    /// Bidisk identity with the two shift families.
    Bidisk,
    /// Ball inequality whose difference is the low-degree projection.
    Ball,
}

impl LemmaId {
    pub fn label(&self) -> &'static str {
        match self {
            LemmaId::Bergman => "4.1",
            LemmaId::Bidisk => "4.2",
            LemmaId::Ball => "4.3",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl std::str::FromStr for LemmaId {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "4.1" | "bergman" => Ok(LemmaId::Bergman),
            "4.2" | "bidisk" => Ok(LemmaId::Bidisk),
            "4.3" | "ball" => Ok(LemmaId::Ball),
            other => Err(CoreError::Validation(format!(
                "unknown identity `{other}`; expected 4.1/bergman, 4.2/bidisk, or 4.3/ball"
            ))),
        }
    }
}

impl Serialize for LemmaId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for LemmaId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nonzero defect at one monomial, exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub monomial: String,
    #[serde(with = "rat_string")]
    pub value: Rat,
}

/// Outcome of an exact identity verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lemma_id: LemmaId,
    pub n: usize,
    pub max_degree: usize,
    pub exact_zero: bool,
    /// Monomials where `LHS − RHS − Projection ≠ 0`, with the exact values.
    pub defect_entries: Vec<DefectEntry>,
    /// Smallest diagonal entry of `LHS − RHS` (ball inequality mode only).
    #[serde(
        with = "rat_option_string",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub min_diagonal: Option<Rat>,
}

mod rat_option_string {
    use crate::number::{rat_from_str, rat_to_string, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rat>, ser: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => ser.serialize_some(&rat_to_string(v)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Rat>, D::Error> {
        let s = Option::<String>::deserialize(de)?;
        match s {
            None => Ok(None),
            Some(s) => rat_from_str(&s)
                .map(Some)
                .ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`"))),
        }
    }
}

fn require_degree(n: usize, degree: usize) -> Result<()> {
    if n < 1 {
        return Err(CoreError::Validation("identity index must be ≥ 1".into()));
    }
    if degree < n + 2 {
        return Err(CoreError::TruncationTooSmall {
            degree,
            required: n + 2,
        });
    }
    Ok(())
}

fn unit(idx: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(idx, Rat::one());
    v
}

/// Left side of the Bergman-disk identity applied to each monomial, as exact
/// diagonal entries: `z^m ↦ 1 + N·c_{N+1}(m) − (N+1)·c_N(m)` where `c_j(m)`
/// is the coefficient of `B^j B*^j` on `z^m`. Windowed to degree `D − N − 1`.
pub fn bergman_lhs_diagonal(n: usize, degree: usize) -> Result<Vec<Rat>> {
    require_degree(n, degree)?;
    let model = build_shift(Space::BergmanDisk, Variable::Z, degree)?;
    let window = degree - (n + 1);
    let mut out = Vec::with_capacity(window + 1);
    for m in 0..=window {
        let idx = model.index_of((m as u32, 0)).unwrap();
        let v = unit(idx);
        let mut lhs = v.clone();
        let t1 = model.apply_power(&model.apply_adjoint_power(&v, n + 1), n + 1);
        sparse_add_scaled(&mut lhs, &t1, &rat_int(n as i64));
        let t2 = model.apply_power(&model.apply_adjoint_power(&v, n), n);
        sparse_add_scaled(&mut lhs, &t2, &rat_int(-(n as i64 + 1)));
        out.push(lhs.get(&idx).cloned().unwrap_or_else(Rat::zero));
        debug_assert!(lhs.len() <= 1, "expression must be diagonal");
    }
    Ok(out)
}

/// Verifies `I + N B^{N+1}B*^{N+1} − (N+1) B^N B*^N = Proj[1, …, z^{N−1}]`
/// exactly on the truncation-safe monomials.
pub fn verify_bergman_identity(n: usize, degree: usize) -> Result<IdentityReport> {
    require_degree(n, degree)?;
    let model = build_shift(Space::BergmanDisk, Variable::Z, degree)?;
    let diag = bergman_lhs_diagonal(n, degree)?;
    let mut defects = Vec::new();
    for (m, value) in diag.iter().enumerate() {
        let projection = if m < n { Rat::one() } else { Rat::zero() };
        let defect = value.clone() - projection;
        if !defect.is_zero() {
            let idx = model.index_of((m as u32, 0)).unwrap();
            defects.push(DefectEntry {
                monomial: model.monomial_name(idx),
                value: defect,
            });
        }
    }
    Ok(IdentityReport {
        lemma_id: LemmaId::Bergman,
        n,
        max_degree: degree,
        exact_zero: defects.is_empty(),
        defect_entries: defects,
        min_diagonal: None,
    })
}

/// Verifies the bidisk identity
/// `I + Σ_{j=1}^N S^j W^{N−j+1}W*^{N−j+1}S*^j − Σ_{j=0}^N S^j W^{N−j}W*^{N−j}S*^j
///  = Proj[z^a w^b : a+b ≤ N−1]` exactly.
pub fn verify_bidisk_identity(n: usize, degree: usize) -> Result<IdentityReport> {
    require_degree(n, degree)?;
    let s = build_shift(Space::HardyBidisk, Variable::Z, degree)?;
    let w = build_shift(Space::HardyBidisk, Variable::W, degree)?;
    let window = degree - (n + 1);
    let mut defects = Vec::new();
    for idx in 0..s.basis_len() {
        let (a, b) = s.exponents_of(idx);
        if (a + b) as usize > window {
            continue;
        }
        let v = unit(idx);
        let mut lhs = v.clone();
        for j in 1..=n {
            let word = s.apply_power(
                &w.apply_power(
                    &w.apply_adjoint_power(&s.apply_adjoint_power(&v, j), n - j + 1),
                    n - j + 1,
                ),
                j,
            );
            sparse_add_scaled(&mut lhs, &word, &rat_int(1));
        }
        for j in 0..=n {
            let word = s.apply_power(
                &w.apply_power(
                    &w.apply_adjoint_power(&s.apply_adjoint_power(&v, j), n - j),
                    n - j,
                ),
                j,
            );
            sparse_add_scaled(&mut lhs, &word, &rat_int(-1));
        }
        let projection = if ((a + b) as usize) < n {
            Rat::one()
        } else {
            Rat::zero()
        };
        let defect = lhs.get(&idx).cloned().unwrap_or_else(Rat::zero) - projection;
        debug_assert!(lhs.len() <= 1, "expression must be diagonal");
        if !defect.is_zero() {
            defects.push(DefectEntry {
                monomial: s.monomial_name(idx),
                value: defect,
            });
        }
    }
    Ok(IdentityReport {
        lemma_id: LemmaId::Bidisk,
        n,
        max_degree: degree,
        exact_zero: defects.is_empty(),
        defect_entries: defects,
        min_diagonal: None,
    })
}

/// Verifies the ball inequality
/// `I + Σ_{j=0}^{N+1} N·C(N+1,j)·S^{N+1−j}W^j W*^j S*^{N+1−j}
///  ⪰ Σ_{j=0}^{N} (N+1)·C(N,j)·S^{N−j}W^j W*^j S*^{N−j}`
/// and the stronger claim that the difference equals the projection onto
/// total degree < N, all in exact arithmetic.
pub fn verify_ball_identity(n: usize, degree: usize) -> Result<IdentityReport> {
    require_degree(n, degree)?;
    let s = build_shift(Space::HardyBall2, Variable::Z, degree)?;
    let w = build_shift(Space::HardyBall2, Variable::W, degree)?;
    let window = degree - (n + 1);
    let mut defects = Vec::new();
    let mut min_diagonal: Option<Rat> = None;
    for idx in 0..s.basis_len() {
        let (a, b) = s.exponents_of(idx);
        if (a + b) as usize > window {
            continue;
        }
        let v = unit(idx);
        let mut diff = v.clone();
        for j in 0..=(n as u32 + 1) {
            let word = s.apply_power(
                &w.apply_power(
                    &w.apply_adjoint_power(
                        &s.apply_adjoint_power(&v, (n as u32 + 1 - j) as usize),
                        j as usize,
                    ),
                    j as usize,
                ),
                (n as u32 + 1 - j) as usize,
            );
            sparse_add_scaled(&mut diff, &word, &(rat_int(n as i64) * binomial(n as u32 + 1, j)));
        }
        for j in 0..=(n as u32) {
            let word = s.apply_power(
                &w.apply_power(
                    &w.apply_adjoint_power(
                        &s.apply_adjoint_power(&v, (n as u32 - j) as usize),
                        j as usize,
                    ),
                    j as usize,
                ),
                (n as u32 - j) as usize,
            );
            sparse_add_scaled(
                &mut diff,
                &word,
                &(-rat_int(n as i64 + 1) * binomial(n as u32, j)),
            );
        }
        debug_assert!(diff.len() <= 1, "expression must be diagonal");
        let diag = diff.get(&idx).cloned().unwrap_or_else(Rat::zero);
        min_diagonal = Some(match min_diagonal {
            None => diag.clone(),
            Some(cur) => cur.min(diag.clone()),
        });
        let projection = if ((a + b) as usize) < n {
            Rat::one()
        } else {
            Rat::zero()
        };
        let defect = diag - projection;
        if !defect.is_zero() {
            defects.push(DefectEntry {
                monomial: s.monomial_name(idx),
                value: defect,
            });
        }
    }
    Ok(IdentityReport {
        lemma_id: LemmaId::Ball,
        n,
        max_degree: degree,
        exact_zero: defects.is_empty(),
        defect_entries: defects,
        min_diagonal,
    })
}

/// Dispatches to the identity verifier for the given label.
pub fn verify_identity(lemma: LemmaId, n: usize, degree: usize) -> Result<IdentityReport> {
    match lemma {
        LemmaId::Bergman => verify_bergman_identity(n, degree),
        LemmaId::Bidisk => verify_bidisk_identity(n, degree),
        LemmaId::Ball => verify_ball_identity(n, degree),
    }
}

/// Exact coefficient comparison of the scalar generating-function identities
/// behind the Bergman and bidisk operator identities:
///
/// - one variable: `1 + N x^{N+1} − (N+1)x^N = (1−x)² Σ_{j=0}^{N−1} (j+1)x^j`
/// - two variables: `1 + Σ_{j=1}^N x^{N−j+1}y^j − Σ_{j=0}^N x^{N−j}y^j
///    = (1−x)(1−y) Σ_{j=0}^{N−1} Σ_{p=0}^{N−1−j} x^j y^p`
pub fn poly_identity_check(lemma: LemmaId, n: usize) -> Result<bool> {
    if n < 1 {
        return Err(CoreError::Validation("identity index must be ≥ 1".into()));
    }
    let nu = n as u32;
    match lemma {
        LemmaId::Bergman => {
            let one = MultiPoly::one(1);
            let x = MultiPoly::variable(1, 0);
            let mut lhs = one.clone();
            lhs = lhs.add(
                &MultiPoly::monomial(1, vec![nu + 1], crate::number::crat_from_rat(rat_int(n as i64))),
            );
            lhs = lhs.sub(&MultiPoly::monomial(
                1,
                vec![nu],
                crate::number::crat_from_rat(rat_int(n as i64 + 1)),
            ));
            let mut sum = MultiPoly::zero(1);
            for j in 0..nu {
                sum = sum.add(&MultiPoly::monomial(
                    1,
                    vec![j],
                    crate::number::crat_from_rat(rat_int(j as i64 + 1)),
                ));
            }
            let omx = one.sub(&x);
            let rhs = omx.mul(&omx).mul(&sum);
            Ok(lhs == rhs)
        }
        LemmaId::Bidisk => {
            let one = MultiPoly::one(2);
            let x = MultiPoly::variable(2, 0);
            let y = MultiPoly::variable(2, 1);
            let mono =
                |a: u32, b: u32, c: i64| MultiPoly::monomial(2, vec![a, b], crate::number::crat_from_rat(rat_int(c)));
            let mut lhs = one.clone();
            for j in 1..=nu {
                lhs = lhs.add(&mono(nu - j + 1, j, 1));
            }
            for j in 0..=nu {
                lhs = lhs.add(&mono(nu - j, j, -1));
            }
            let mut sum = MultiPoly::zero(2);
            for j in 0..nu {
                for p in 0..=(nu - 1 - j) {
                    sum = sum.add(&mono(j, p, 1));
                }
            }
            let rhs = one.sub(&x).mul(&one.sub(&y)).mul(&sum);
            Ok(lhs == rhs)
        }
        LemmaId::Ball => Err(CoreError::Validation(
            "the ball inequality has no scalar generating identity; use verify-identity".into(),
        )),
    }
}
