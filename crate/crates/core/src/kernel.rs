//! Kernel definitions, Gram matrices, projection-compressed Gram matrices,
//! and reciprocal power series.
//!
//! Kernels are symbolic: closed-form builtins plus diagonal coefficient
//! sequences and tensor products. Every builtin except the Fock kernel has a
//! rational closed form, so Gram entries at floating-point points (which are
//! themselves rationals) are assembled in exact Gaussian-rational arithmetic
//! and rounded once at the end. The Fock kernel evaluates through `exp` and
//! takes the floating-point path.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::number::{
    crat_from_c64, crat_from_rat, crat_one, crat_to_c64, rat_int, rat_to_f64, rat_vec_string,
    CRat, Rat, C64,
};

/// Margin by which points must sit inside the open domain.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// Asymmetry beyond this (scaled by the max entry) rejects a Hermitian matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Symbolic description of a reproducing kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `1 / (1 - z w̄)` on the unit disk.
    SzegoDisk,
    /// `1 / (1 - z w̄)^2` on the unit disk.
    BergmanDisk,
    /// `1 / ((1 - z₁w̄₁)(1 - z₂w̄₂))` on the bidisk.
    HardyBidisk,
    /// `1 / (1 - ⟨z, w⟩)^2` on the unit ball in two variables.
    HardyBall2,
    /// `exp(z w̄)` on the plane.
    FockPlane,
    /// The sandwich kernel `1 + 2 z w̄ / (1 - z w̄)` on the unit disk.
    Example51,
    /// `Σ aₙ ⟨z, w⟩ⁿ` with nonnegative rational coefficients, truncated.
    Diagonal {
        #[serde(with = "rat_vec_string")]
        coeffs: Vec<Rat>,
        domain_radius: f64,
        #[serde(default = "default_dimension")]
        dimension: usize,
    },
    /// Tensor product of two kernels on the concatenated variables.
    Product {
        left: Box<KernelSpec>,
        right: Box<KernelSpec>,
    },
}

fn default_dimension() -> usize {
    1
}

impl KernelSpec {
    pub fn diagonal(coeffs: Vec<Rat>, domain_radius: f64) -> Self {
        KernelSpec::Diagonal {
            coeffs,
            domain_radius,
            dimension: 1,
        }
    }

    pub fn product(left: KernelSpec, right: KernelSpec) -> Self {
        KernelSpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of complex variables.
    pub fn dimension(&self) -> usize {
        match self {
            KernelSpec::SzegoDisk
            | KernelSpec::BergmanDisk
            | KernelSpec::FockPlane
            | KernelSpec::Example51 => 1,
            KernelSpec::HardyBidisk | KernelSpec::HardyBall2 => 2,
            KernelSpec::Diagonal { dimension, .. } => *dimension,
            KernelSpec::Product { left, right } => left.dimension() + right.dimension(),
        }
    }

    /// Checks the construction invariants: diagonal coefficients start
    /// positive and stay nonnegative, radii and dimensions are positive.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Diagonal {
                coeffs,
                domain_radius,
                dimension,
            } => {
                if coeffs.is_empty() || !coeffs[0].is_positive() {
                    return Err(CoreError::Validation(
                        "diagonal kernel requires a_0 > 0".into(),
                    ));
                }
                if coeffs.iter().any(|c| c.is_negative()) {
                    return Err(CoreError::Validation(
                        "diagonal kernel coefficients must be nonnegative".into(),
                    ));
                }
                if !domain_radius.is_finite() || *domain_radius <= 0.0 {
                    return Err(CoreError::Validation(
                        "diagonal kernel requires a positive finite domain radius".into(),
                    ));
                }
                if *dimension == 0 {
                    return Err(CoreError::Validation(
                        "kernel dimension must be positive".into(),
                    ));
                }
                Ok(())
            }
            KernelSpec::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            _ => Ok(()),
        }
    }

    /// True when every factor has a rational closed form (everything except
    /// the Fock kernel).
    pub fn supports_exact(&self) -> bool {
        match self {
            KernelSpec::FockPlane => false,
            KernelSpec::Product { left, right } => {
                left.supports_exact() && right.supports_exact()
            }
            _ => true,
        }
    }

    /// Diagonal power-series coefficients `a_0..a_order` of the kernel as a
    /// function of the Hermitian pairing, when it is such a function.
    pub fn diagonal_coefficients(&self, order: usize) -> Option<Vec<Rat>> {
        match self {
            KernelSpec::SzegoDisk => Some(vec![rat_int(1); order + 1]),
            // 1/(1-x)^2 = Σ (n+1) xⁿ; the ball kernel is the same series in ⟨z,w⟩.
            KernelSpec::BergmanDisk | KernelSpec::HardyBall2 => {
                Some((0..=order).map(|n| rat_int(n as i64 + 1)).collect())
            }
            KernelSpec::FockPlane => Some(
                (0..=order)
                    .map(|n| rat_int(1) / crate::number::factorial(n as u32))
                    .collect(),
            ),
            KernelSpec::Example51 => Some(
                (0..=order)
                    .map(|n| if n == 0 { rat_int(1) } else { rat_int(2) })
                    .collect(),
            ),
            KernelSpec::Diagonal { coeffs, .. } => {
                let mut out: Vec<Rat> = coeffs.iter().take(order + 1).cloned().collect();
                out.resize(order + 1, Rat::zero());
                Some(out)
            }
            KernelSpec::HardyBidisk | KernelSpec::Product { .. } => None,
        }
    }

    /// Validates that a point lies strictly inside the kernel's domain.
    pub fn check_point(&self, pt: &[C64]) -> Result<()> {
        if pt.len() != self.dimension() {
            return Err(CoreError::ShapeMismatch {
                detail: format!(
                    "point has {} coordinates, kernel has dimension {}",
                    pt.len(),
                    self.dimension()
                ),
            });
        }
        if pt.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(CoreError::Validation(
                "point coordinates must be finite".into(),
            ));
        }
        self.check_point_inner(pt)
    }

    fn check_point_inner(&self, pt: &[C64]) -> Result<()> {
        let inside_disk = |c: &C64, radius: f64| c.norm_sqr() < (radius - DOMAIN_MARGIN).powi(2);
        match self {
            KernelSpec::SzegoDisk | KernelSpec::BergmanDisk | KernelSpec::Example51 => {
                if inside_disk(&pt[0], 1.0) {
                    Ok(())
                } else {
                    Err(domain_err(0, "|z| must be < 1"))
                }
            }
            KernelSpec::HardyBidisk => {
                for (i, c) in pt.iter().enumerate() {
                    if !inside_disk(c, 1.0) {
                        return Err(domain_err(i, "each coordinate must satisfy |z_i| < 1"));
                    }
                }
                Ok(())
            }
            KernelSpec::HardyBall2 => {
                let norm_sq: f64 = pt.iter().map(|c| c.norm_sqr()).sum();
                if norm_sq < (1.0 - DOMAIN_MARGIN).powi(2) {
                    Ok(())
                } else {
                    Err(domain_err(0, "Euclidean norm must be < 1"))
                }
            }
            KernelSpec::FockPlane => Ok(()),
            KernelSpec::Diagonal { domain_radius, .. } => {
                let norm_sq: f64 = pt.iter().map(|c| c.norm_sqr()).sum();
                if norm_sq < (domain_radius - DOMAIN_MARGIN).powi(2) {
                    Ok(())
                } else {
                    Err(domain_err(
                        0,
                        &format!("Euclidean norm must be < {domain_radius}"),
                    ))
                }
            }
            KernelSpec::Product { left, right } => {
                let split = left.dimension();
                left.check_point_inner(&pt[..split])?;
                right.check_point_inner(&pt[split..])
            }
        }
    }

    /// Exact kernel evaluation over Gaussian rationals. Fails for the Fock
    /// kernel, which has no rational closed form.
    pub fn eval_exact(&self, z: &[CRat], w: &[CRat]) -> Result<CRat> {
        match self {
            KernelSpec::SzegoDisk => {
                let x = pairing_exact(z, w);
                Ok(crat_one() / (crat_one() - x))
            }
            KernelSpec::BergmanDisk => {
                let d = crat_one() - pairing_exact(z, w);
                Ok(crat_one() / (d.clone() * d))
            }
            KernelSpec::HardyBidisk => {
                let x1 = z[0].clone() * w[0].conj();
                let x2 = z[1].clone() * w[1].conj();
                Ok(crat_one() / ((crat_one() - x1) * (crat_one() - x2)))
            }
            KernelSpec::HardyBall2 => {
                let d = crat_one() - pairing_exact(z, w);
                Ok(crat_one() / (d.clone() * d))
            }
            KernelSpec::FockPlane => Err(CoreError::UnsupportedVariant {
                variant: "fock_plane (no exact closed form; use floating evaluation)".into(),
            }),
            KernelSpec::Example51 => {
                let x = pairing_exact(z, w);
                Ok(crat_one() + crat_from_rat(rat_int(2)) * x.clone() / (crat_one() - x))
            }
            KernelSpec::Diagonal {
                coeffs,
                domain_radius,
                ..
            } => {
                let x = pairing_exact(z, w);
                let mag = crat_to_c64(&x).norm();
                if mag >= domain_radius * domain_radius {
                    return Err(CoreError::Convergence {
                        magnitude: mag,
                        radius: domain_radius * domain_radius,
                    });
                }
                // Horner over the truncated series.
                let mut acc = crat_from_rat(coeffs.last().cloned().unwrap_or_else(Rat::zero));
                for a in coeffs.iter().rev().skip(1) {
                    acc = acc * x.clone() + crat_from_rat(a.clone());
                }
                Ok(acc)
            }
            KernelSpec::Product { left, right } => {
                let split = left.dimension();
                Ok(left.eval_exact(&z[..split], &w[..split])?
                    * right.eval_exact(&z[split..], &w[split..])?)
            }
        }
    }

    /// Floating-point evaluation without domain checks; callers validate.
    pub(crate) fn eval_f64(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        self.eval_f64_inner(z, w)
    }

    /// Floating-point evaluation, used where no rational closed form exists.
    fn eval_f64_inner(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        match self {
            KernelSpec::FockPlane => Ok((z[0] * w[0].conj()).exp()),
            KernelSpec::Product { left, right } => {
                let split = left.dimension();
                Ok(left.eval_f64_inner(&z[..split], &w[..split])?
                    * right.eval_f64_inner(&z[split..], &w[split..])?)
            }
            _ => {
                let (ze, we) = (to_exact_point(z)?, to_exact_point(w)?);
                Ok(crat_to_c64(&self.eval_exact(&ze, &we)?))
            }
        }
    }
}

fn domain_err(index: usize, detail: &str) -> CoreError {
    CoreError::DomainViolation {
        index,
        detail: detail.to_string(),
    }
}

fn pairing_exact(z: &[CRat], w: &[CRat]) -> CRat {
    z.iter()
        .zip(w)
        .fold(CRat::zero(), |acc, (a, b)| acc + a.clone() * b.conj())
}

pub(crate) fn to_exact_point(pt: &[C64]) -> Result<Vec<CRat>> {
    pt.iter()
        .map(|c| {
            crat_from_c64(*c)
                .ok_or_else(|| CoreError::Validation("point coordinates must be finite".into()))
        })
        .collect()
}

/// Evaluates `k(z, w)` after validating both points against the domain.
pub fn kernel_eval(spec: &KernelSpec, z: &[C64], w: &[C64]) -> Result<C64> {
    spec.validate()?;
    spec.check_point(z)?;
    spec.check_point(w)?;
    spec.eval_f64_inner(z, w)
}

/// A finite sample of the kernel's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    #[serde(with = "crate::number::point_list_pairs")]
    points: Vec<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<C64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if points.is_empty() {
            return Err(CoreError::Validation("point set must be nonempty".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(CoreError::Validation(
                "points must have at least one coordinate".into(),
            ));
        }
        for p in &points {
            if p.len() != dim {
                return Err(CoreError::ShapeMismatch {
                    detail: "all points must share one dimension".into(),
                });
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(CoreError::Validation(
                    "point coordinates must be finite".into(),
                ));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(CoreError::Validation(format!(
                        "points {i} and {j} coincide; points must be pairwise distinct"
                    )));
                }
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != points.len() {
                return Err(CoreError::ShapeMismatch {
                    detail: "label count must match point count".into(),
                });
            }
        }
        Ok(PointSet { points, labels })
    }

    /// One-variable convenience constructor.
    pub fn from_scalars(values: &[C64]) -> Result<Self> {
        Self::new(values.iter().map(|v| vec![*v]).collect(), None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[C64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<C64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Checks dimension agreement and domain membership for every point.
    pub fn validate_for(&self, spec: &KernelSpec) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            spec.check_point(p).map_err(|e| match e {
                CoreError::DomainViolation { detail, .. } => {
                    CoreError::DomainViolation { index: i, detail }
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Parses the CSV format: one point per line, columns `re1,im1[,re2,im2,...]`,
    /// optional header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut expected: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if points.is_empty() && expected.is_none() => continue, // header row
                Err(_) => {
                    return Err(CoreError::Parse {
                        line: lineno + 1,
                        detail: format!("expected comma-separated numbers, got `{line}`"),
                    })
                }
            };
            if values.len() % 2 != 0 || values.is_empty() {
                return Err(CoreError::Parse {
                    line: lineno + 1,
                    detail: format!(
                        "expected an even, positive number of columns (re,im pairs), got {}",
                        values.len()
                    ),
                });
            }
            if let Some(d) = expected {
                if values.len() != 2 * d {
                    return Err(CoreError::Parse {
                        line: lineno + 1,
                        detail: format!("expected {} columns, got {}", 2 * d, values.len()),
                    });
                }
            } else {
                expected = Some(values.len() / 2);
            }
            points.push(values.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
        }
        PointSet::new(points, None)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let cols: Vec<String> = p.iter().flat_map(|c| [c.re, c.im]).map(|v| v.to_string()).collect();
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }

    /// Draws `size` distinct points from the interior of the kernel's domain.
    /// Sampling stays at 95% of each radius so Gram matrices remain
    /// reasonably conditioned.
    pub fn sample<R: Rng>(spec: &KernelSpec, size: usize, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        if size == 0 {
            return Err(CoreError::Validation("sample size must be positive".into()));
        }
        let mut points: Vec<Vec<C64>> = Vec::with_capacity(size);
        let mut attempts = 0;
        while points.len() < size {
            attempts += 1;
            if attempts > 1000 * size {
                return Err(CoreError::Validation(
                    "failed to sample distinct in-domain points".into(),
                ));
            }
            let p = sample_point(spec, rng);
            if spec.check_point(&p).is_ok() && !points.contains(&p) {
                points.push(p);
            }
        }
        PointSet::new(points, None)
    }
}

fn sample_point<R: Rng>(spec: &KernelSpec, rng: &mut R) -> Vec<C64> {
    fn disk<R: Rng>(rng: &mut R, radius: f64) -> C64 {
        loop {
            let re = rng.random_range(-radius..radius);
            let im = rng.random_range(-radius..radius);
            let c = C64::new(re, im);
            if c.norm_sqr() < radius * radius {
                return c;
            }
        }
    }
    fn ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<C64> {
        loop {
            let p: Vec<C64> = (0..dim)
                .map(|_| {
                    C64::new(
                        rng.random_range(-radius..radius),
                        rng.random_range(-radius..radius),
                    )
                })
                .collect();
            if p.iter().map(|c| c.norm_sqr()).sum::<f64>() < radius * radius {
                return p;
            }
        }
    }
    match spec {
        KernelSpec::SzegoDisk | KernelSpec::BergmanDisk | KernelSpec::Example51 => {
            vec![disk(rng, 0.95)]
        }
        KernelSpec::HardyBidisk => vec![disk(rng, 0.95), disk(rng, 0.95)],
        KernelSpec::HardyBall2 => ball(rng, 2, 0.95),
        KernelSpec::FockPlane => vec![disk(rng, 2.0)],
        KernelSpec::Diagonal {
            domain_radius,
            dimension,
            ..
        } => ball(rng, *dimension, 0.95 * domain_radius),
        KernelSpec::Product { left, right } => {
            let mut p = sample_point(left, rng);
            p.extend(sample_point(right, rng));
            p
        }
    }
}

/// Square complex matrix with validated conjugate symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Validates conjugate symmetry (within `HERMITIAN_TOL`, scaled by the
    /// largest entry) and canonicalizes: off-diagonal pairs are averaged with
    /// their mirror conjugates and diagonal imaginary parts dropped.
    pub fn try_new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(CoreError::ShapeMismatch {
                detail: format!("{}x{} matrix is not square", entries.nrows(), entries.ncols()),
            });
        }
        let n = entries.nrows();
        let scale = entries
            .iter()
            .map(|c| c.norm())
            .fold(1.0f64, f64::max);
        for i in 0..n {
            for j in i..n {
                let asym = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if asym > HERMITIAN_TOL * scale {
                    return Err(CoreError::NonHermitian {
                        row: i,
                        col: j,
                        asymmetry: asym,
                    });
                }
            }
        }
        let mut m = entries;
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Ok(HermitianMatrix { entries: m })
    }

    /// Builds from the upper triangle; the mirror entries are exact
    /// conjugates by construction.
    pub fn from_fn_upper<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<C64>,
    {
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j)?;
                if i == j {
                    m[(i, i)] = C64::new(v.re, 0.0);
                } else {
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        Ok(HermitianMatrix { entries: m })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.size() != other.size() {
            return Err(CoreError::ShapeMismatch {
                detail: format!("sizes {} and {} differ", self.size(), other.size()),
            });
        }
        Ok(HermitianMatrix {
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            entries: self.entries.map(|c| c * factor),
        }
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.size())
            .map(|i| {
                (0..self.size())
                    .map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(de)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix rows must be square"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
        HermitianMatrix::try_new(m).map_err(serde::de::Error::custom)
    }
}

/// Builds a Hermitian matrix entrywise, through the exact path when the
/// kernel admits one and through floats otherwise.
pub(crate) fn build_hermitian<FE, FF>(
    n: usize,
    exact: bool,
    mut exact_entry: FE,
    mut float_entry: FF,
) -> Result<HermitianMatrix>
where
    FE: FnMut(usize, usize) -> Result<CRat>,
    FF: FnMut(usize, usize) -> Result<C64>,
{
    if exact {
        HermitianMatrix::from_fn_upper(n, |i, j| Ok(crat_to_c64(&exact_entry(i, j)?)))
    } else {
        HermitianMatrix::from_fn_upper(n, &mut float_entry)
    }
}

/// Gram matrix `[k(p_i, p_j)]` on a point set.
pub fn gram(spec: &KernelSpec, pts: &PointSet) -> Result<HermitianMatrix> {
    spec.validate()?;
    pts.validate_for(spec)?;
    let n = pts.len();
    if spec.supports_exact() {
        let exact_pts: Vec<Vec<CRat>> = pts
            .points()
            .iter()
            .map(|p| to_exact_point(p))
            .collect::<Result<_>>()?;
        build_hermitian(
            n,
            true,
            |i, j| spec.eval_exact(&exact_pts[i], &exact_pts[j]),
            |_, _| unreachable!(),
        )
    } else {
        build_hermitian(
            n,
            false,
            |_, _| unreachable!(),
            |i, j| spec.eval_f64_inner(pts.point(i), pts.point(j)),
        )
    }
}

/// Gram matrix of the kernel sections projected off `k(·, base)`:
/// `k(p_i, p_j) - k(p_i, base) k(base, p_j) / k(base, base)`.
pub fn compress_gram(spec: &KernelSpec, pts: &PointSet, base: &[C64]) -> Result<HermitianMatrix> {
    spec.validate()?;
    pts.validate_for(spec)?;
    spec.check_point(base)?;
    let n = pts.len();
    if spec.supports_exact() {
        let exact_pts: Vec<Vec<CRat>> = pts
            .points()
            .iter()
            .map(|p| to_exact_point(p))
            .collect::<Result<_>>()?;
        let base_e = to_exact_point(base)?;
        let kbb = spec.eval_exact(&base_e, &base_e)?;
        if !kbb.im.is_zero() || !kbb.re.is_positive() {
            return Err(CoreError::DegenerateBase {
                value: rat_to_f64(&kbb.re),
            });
        }
        build_hermitian(
            n,
            true,
            |i, j| {
                let kij = spec.eval_exact(&exact_pts[i], &exact_pts[j])?;
                let kib = spec.eval_exact(&exact_pts[i], &base_e)?;
                let kbj = spec.eval_exact(&base_e, &exact_pts[j])?;
                Ok(kij - kib * kbj / kbb.clone())
            },
            |_, _| unreachable!(),
        )
    } else {
        let kbb = spec.eval_f64_inner(base, base)?;
        if kbb.re <= 0.0 || kbb.im.abs() > HERMITIAN_TOL * kbb.re.abs().max(1.0) {
            return Err(CoreError::DegenerateBase { value: kbb.re });
        }
        build_hermitian(
            n,
            false,
            |_, _| unreachable!(),
            |i, j| {
                let kij = spec.eval_f64_inner(pts.point(i), pts.point(j))?;
                let kib = spec.eval_f64_inner(pts.point(i), base)?;
                let kbj = spec.eval_f64_inner(base, pts.point(j))?;
                // Dividing before multiplying keeps the projection of a
                // section off itself exactly zero.
                Ok(kij - kib * (kbj / kbb))
            },
        )
    }
}

/// Formal reciprocal of a diagonal kernel's power series, split by sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalSeries {
    #[serde(with = "rat_vec_string")]
    pub coeffs: Vec<Rat>,
    pub order: usize,
    /// Indices with strictly positive coefficients.
    pub positive_part: Vec<usize>,
    /// Indices with strictly negative coefficients.
    pub negative_part: Vec<usize>,
}

/// Coefficients `c_0..c_order` with `(Σ aₙ xⁿ)(Σ cₙ xⁿ) = 1` through the
/// given order, computed by the exact convolution recurrence.
pub fn reciprocal_series(spec: &KernelSpec, order: usize) -> Result<ReciprocalSeries> {
    spec.validate()?;
    let a = spec
        .diagonal_coefficients(order)
        .ok_or_else(|| CoreError::UnsupportedVariant {
            variant: format!("{spec:?} has no diagonal power-series form"),
        })?;
    if a[0].is_zero() || a[0].is_negative() {
        return Err(CoreError::Validation(
            "reciprocal series requires a_0 > 0".into(),
        ));
    }
    let mut c: Vec<Rat> = Vec::with_capacity(order + 1);
    c.push(Rat::one() / a[0].clone());
    for m in 1..=order {
        let mut acc = Rat::zero();
        for j in 1..=m {
            acc += a[j].clone() * c[m - j].clone();
        }
        c.push(-acc / a[0].clone());
    }
    let positive_part = (0..=order).filter(|&n| c[n].is_positive()).collect();
    let negative_part = (0..=order).filter(|&n| c[n].is_negative()).collect();
    Ok(ReciprocalSeries {
        coeffs: c,
        order,
        positive_part,
        negative_part,
    })
}

impl ReciprocalSeries {
    /// Exact convolution check: `(a * c)[m] = [m == 0]` for all `m ≤ order`.
    pub fn convolution_holds(&self, a: &[Rat]) -> bool {
        for m in 0..=self.order {
            let mut acc = Rat::zero();
            for j in 0..=m {
                if j < a.len() {
                    acc += a[j].clone() * self.coeffs[m - j].clone();
                }
            }
            let expect = if m == 0 { Rat::one() } else { Rat::zero() };
            if acc != expect {
                return false;
            }
        }
        true
    }
}
