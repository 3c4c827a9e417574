//! Complete-Pick positivity testing at finite point-set resolution.
//!
//! The Schur-complement kernel
//! `L(y, x) = [k(y, x) k(ω, ω) − k(y, ω) k(ω, x)] / k(y, x)`
//! is positive semi-definite on every finite point set exactly when the
//! kernel has the complete Pick property there. A non-PSD Schur matrix at any
//! `(points, base)` certifies the kernel non-Pick; a PSD outcome is evidence
//! only, and reports say so. For diagonal kernels the classical
//! one-positive-square criterion on the reciprocal series provides an
//! independent oracle.

use nalgebra::SymmetricEigen;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::kernel::{gram, to_exact_point, HermitianMatrix, KernelSpec, PointSet};
use crate::number::{crat_to_c64, rat_to_f64, CRat, C64};
use crate::ReciprocalSeries;

/// Default floor on the minimum eigenvalue, before scaling by the matrix
/// max-abs entry. Gram matrices at nearby points are ill-conditioned, so the
/// effective tolerance grows with the entries.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Eigenvalue-based positivity verdict with a witness vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector attaining the minimum eigenvalue.
    #[serde(with = "crate::number::point_pairs")]
    pub witness: Vec<C64>,
    /// Effective tolerance after scaling: `is_psd ⇔ min_eigenvalue ≥ -tolerance`.
    pub tolerance: f64,
}

impl PsdVerdict {
    /// Quadratic form of `m` at the witness; equals the minimum eigenvalue up
    /// to eigensolver accuracy.
    pub fn witness_quadratic_form(&self, m: &HermitianMatrix) -> f64 {
        let n = self.witness.len();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.witness[i].conj() * m.entry(i, j) * self.witness[j];
            }
        }
        acc.re
    }
}

/// Smallest eigenvalue of a Hermitian matrix, with witness.
///
/// The tolerance is scaled by `max(1, max-abs entry)`; the scaled value is
/// what the verdict records.
pub fn psd_check(m: &HermitianMatrix, tol: f64) -> Result<PsdVerdict> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(CoreError::Validation(
            "tolerance must be a nonnegative finite number".into(),
        ));
    }
    if m.size() == 0 {
        return Err(CoreError::Validation("matrix must be nonempty".into()));
    }
    let eig = SymmetricEigen::new(m.matrix().clone());
    let mut min_idx = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
            min_idx = i;
        }
    }
    let min_eigenvalue = eig.eigenvalues[min_idx];
    let witness: Vec<C64> = eig.eigenvectors.column(min_idx).iter().copied().collect();
    let tolerance = tol * m.max_abs().max(1.0);
    Ok(PsdVerdict {
        is_psd: min_eigenvalue >= -tolerance,
        min_eigenvalue,
        witness,
        tolerance,
    })
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.matrix().clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Outcome of a Schur-complement positivity test.
///
/// `verdict` and `schur_matrix` are populated together, exactly when no
/// kernel value vanished on a pair of test points.
#[derive(Debug, Clone)]
pub struct NpReport {
    pub kernel: KernelSpec,
    pub base_point: Vec<C64>,
    pub points: Vec<Vec<C64>>,
    pub verdict: Option<PsdVerdict>,
    pub schur_matrix: Option<HermitianMatrix>,
    /// Index pairs `(i, j)`, `i ≤ j`, where `k(p_i, p_j) = 0`.
    pub kernel_zero_pairs: Vec<(usize, usize)>,
    /// Seed of the randomized search that produced this report, if any.
    pub seed: Option<u64>,
}

impl NpReport {
    /// A PSD outcome at finite resolution never certifies the Pick property.
    pub fn evidence_only(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.is_psd)
    }

    pub fn is_psd(&self) -> Option<bool> {
        self.verdict.as_ref().map(|v| v.is_psd)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.verdict.as_ref().map(|v| v.min_eigenvalue)
    }
}

impl Serialize for NpReport {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("NpReport", 8)?;
        st.serialize_field("kernel", &self.kernel)?;
        let base: Vec<[f64; 2]> = self.base_point.iter().map(|c| [c.re, c.im]).collect();
        st.serialize_field("base", &base)?;
        let points: Vec<Vec<[f64; 2]>> = self
            .points
            .iter()
            .map(|p| p.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        st.serialize_field("points", &points)?;
        st.serialize_field("min_eigenvalue", &self.min_eigenvalue())?;
        st.serialize_field("is_psd", &self.is_psd())?;
        st.serialize_field("evidence_only", &self.evidence_only())?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("kernel_zero_pairs", &self.kernel_zero_pairs)?;
        st.end()
    }
}

/// Tests the Schur-complement kernel for positivity on a point set.
///
/// Entry `(i, j)` of the tested matrix is
/// `[k(p_i, p_j) k(ω, ω) − k(p_i, ω) k(ω, p_j)] / k(p_i, p_j)`,
/// assembled in exact arithmetic whenever the kernel admits it and rounded
/// once per entry. Vanishing `k(p_i, p_j)` yields a report with no verdict.
pub fn np_test(
    spec: &KernelSpec,
    pts: &PointSet,
    base: &[C64],
    tol: f64,
) -> Result<NpReport> {
    spec.validate()?;
    pts.validate_for(spec)?;
    spec.check_point(base)?;
    let n = pts.len();

    let (schur, zero_pairs) = if spec.supports_exact() {
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
        let mut pair_values = vec![vec![CRat::zero(); n]; n];
        let mut zeros = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = spec.eval_exact(&exact_pts[i], &exact_pts[j])?;
                if v.is_zero() {
                    zeros.push((i, j));
                }
                pair_values[i][j] = v;
            }
        }
        if !zeros.is_empty() {
            (None, zeros)
        } else {
            let schur = HermitianMatrix::from_fn_upper(n, |i, j| {
                let kij = pair_values[i][j].clone();
                let kib = spec.eval_exact(&exact_pts[i], &base_e)?;
                let kbj = spec.eval_exact(&base_e, &exact_pts[j])?;
                let num = kij.clone() * kbb.clone() - kib * kbj;
                Ok(crat_to_c64(&(num / kij)))
            })?;
            (Some(schur), Vec::new())
        }
    } else {
        let kbb = spec.eval_f64(base, base)?;
        if kbb.re <= 0.0 || kbb.im.abs() > 1e-12 * kbb.re.abs().max(1.0) {
            return Err(CoreError::DegenerateBase { value: kbb.re });
        }
        let mut pair_values = vec![vec![C64::new(0.0, 0.0); n]; n];
        let mut zeros = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = spec.eval_f64(pts.point(i), pts.point(j))?;
                if v.norm() < 1e-300 {
                    zeros.push((i, j));
                }
                pair_values[i][j] = v;
            }
        }
        if !zeros.is_empty() {
            (None, zeros)
        } else {
            let schur = HermitianMatrix::from_fn_upper(n, |i, j| {
                let kij = pair_values[i][j];
                let kib = spec.eval_f64(pts.point(i), base)?;
                let kbj = spec.eval_f64(base, pts.point(j))?;
                Ok((kij * kbb - kib * kbj) / kij)
            })?;
            (Some(schur), Vec::new())
        }
    };

    let verdict = match &schur {
        Some(m) => Some(psd_check(m, tol)?),
        None => None,
    };
    Ok(NpReport {
        kernel: spec.clone(),
        base_point: base.to_vec(),
        points: pts.points().to_vec(),
        verdict,
        schur_matrix: schur,
        kernel_zero_pairs: zero_pairs,
        seed: None,
    })
}

/// Verdict of the diagonal-coefficient oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub order: usize,
    /// Pick-at-this-order: every reciprocal coefficient `c_n`, `n ≥ 1`, is ≤ 0.
    pub is_np_at_order: bool,
    /// Smallest `n ≥ 1` with `c_n > 0`, when any.
    pub first_failing_index: Option<usize>,
    pub series: ReciprocalSeries,
}

/// Classical one-positive-square criterion for diagonal kernels: the kernel
/// is Pick at order `M` exactly when the reciprocal series has no positive
/// coefficient past the constant term.
pub fn diagonal_np_oracle(spec: &KernelSpec, order: usize) -> Result<OracleReport> {
    let series = crate::kernel::reciprocal_series(spec, order)?;
    let first_failing_index = (1..=order).find(|&n| series.coeffs[n].is_positive());
    Ok(OracleReport {
        order,
        is_np_at_order: first_failing_index.is_none(),
        first_failing_index,
        series,
    })
}

/// Seeded randomized search for a non-PSD Schur matrix.
///
/// Draws point sets of sizes `2..=max_set_size` from the kernel's domain and
/// returns the first report whose verdict is non-PSD, with the seed recorded.
/// Deterministic per seed.
pub fn np_search(
    spec: &KernelSpec,
    base: &[C64],
    tol: f64,
    max_set_size: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<NpReport>> {
    if max_set_size < 2 {
        return Err(CoreError::Validation(
            "search needs point sets of size at least 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let size = rng.random_range(2..=max_set_size);
        let pts = PointSet::sample(spec, size, &mut rng)?;
        let mut report = np_test(spec, &pts, base, tol)?;
        report.seed = Some(seed);
        if report.is_psd() == Some(false) {
            return Ok(Some(report));
        }
    }
    Ok(None)
}

/// Gram-difference positivity: checks `gram(upper) − gram(lower) ⪰ 0` on a
/// point set, the finite-section meaning of `lower ⪯ upper` for kernels.
pub fn kernel_dominates(
    upper: &KernelSpec,
    lower: &KernelSpec,
    pts: &PointSet,
    tol: f64,
) -> Result<PsdVerdict> {
    let gu = gram(upper, pts)?;
    let gl = gram(lower, pts)?;
    psd_check(&gu.sub(&gl)?, tol)
}
