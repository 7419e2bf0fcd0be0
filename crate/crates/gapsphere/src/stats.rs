//! Statistical machinery shared by every verification suite: empirical
//! covariance, trace distance, test-function discrepancies, KS tests, phase
//! uniformity, and stationarity checks.
//!
//! Reports serialize to JSON with stable field ordering, so a seeded run
//! produces byte-identical output.

use crate::error::{Error, Result};
use crate::gap::WeightedSample;
use crate::hilbert::{
    haar_orthonormal_system, CMatrix, DensityMatrix, HermitianOperator, RngStream, StateVector,
    C64,
};
use serde::Serialize;

/// Default per-check z threshold where a criterion pins 3 sigma explicitly.
pub const Z_THRESHOLD: f64 = 3.0;
/// Default threshold for whole suites. Calibrated so that a battery of a few
/// hundred true-null z statistics has under 1% false-failure probability
/// (two-sided normal tail at 4.2 is 2.7e-5).
pub const SUITE_Z_THRESHOLD: f64 = 4.2;
/// Cap applied to z-scores so reports stay JSON-representable when the
/// pooled standard error is zero but the estimates differ.
pub const Z_CAP: f64 = 1e9;

/// A bounded test function on the unit sphere, evaluated against samples.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// `|<phi|psi>|^2`
    Marginal { phi: StateVector },
    /// `|<phi|psi>|^{2r}`
    Polynomial { phi: StateVector, power: u32 },
    /// `Re <phi|psi><psi|phi2>`
    OffDiagonal { phi: StateVector, phi2: StateVector },
}

impl TestFunction {
    pub fn evaluate(&self, psi: &StateVector) -> f64 {
        match self {
            TestFunction::Marginal { phi } => phi.inner(psi).norm_sqr(),
            TestFunction::Polynomial { phi, power } => phi.inner(psi).norm_sqr().powi(*power as i32),
            TestFunction::OffDiagonal { phi, phi2 } => {
                let a = phi.inner(psi);
                let b = psi.inner(phi2);
                (a * b).re
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Marginal { .. } => "marginal".into(),
            TestFunction::Polynomial { power, .. } => format!("poly{power}"),
            TestFunction::OffDiagonal { .. } => "offdiag".into(),
        }
    }
}

/// The default dictionary for dimension `d`: marginals against a reference
/// basis and 8 Haar-random vectors, polynomial powers 2 and 3 against the
/// basis vectors, and 4 off-diagonal real parts. Spans the low-order moments
/// that separate the measures treated in this crate at small d.
pub fn default_dictionary(basis: &CMatrix, rng: &mut RngStream) -> Result<Vec<TestFunction>> {
    let d = basis.nrows();
    let mut fns = Vec::new();
    let mut basis_states = Vec::with_capacity(d);
    for k in 0..d {
        let col = crate::hilbert::CVector::from_column_slice(basis.column(k).as_slice());
        basis_states.push(crate::hilbert::project_to_sphere(&col)?);
    }
    for phi in &basis_states {
        fns.push(TestFunction::Marginal { phi: phi.clone() });
    }
    let haar = haar_orthonormal_system(d.max(8), 8.min(d.max(8)), rng)?;
    let mut haar_states = Vec::new();
    for k in 0..8.min(haar.len()) {
        // random directions in C^d: take Haar vectors in C^max(d,8) truncated
        // and renormalized when d < 8
        let full = haar.vector(k)?;
        let v = crate::hilbert::CVector::from_fn(d, |i, _| full.as_vector()[i]);
        if v.norm() > 1e-6 {
            haar_states.push(crate::hilbert::project_to_sphere(&v)?);
        }
    }
    for phi in &haar_states {
        fns.push(TestFunction::Marginal { phi: phi.clone() });
    }
    for phi in &basis_states {
        for power in [2u32, 3] {
            fns.push(TestFunction::Polynomial {
                phi: phi.clone(),
                power,
            });
        }
    }
    let mut pairs = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            pairs.push((i, j));
        }
    }
    for &(i, j) in pairs.iter().take(4) {
        fns.push(TestFunction::OffDiagonal {
            phi: basis_states[i].clone(),
            phi2: basis_states[j].clone(),
        });
    }
    // pad with Haar pairs when the basis provides fewer than 4
    let mut k = 0;
    while pairs.len() + k < 4 && k + 1 < haar_states.len() {
        fns.push(TestFunction::OffDiagonal {
            phi: haar_states[k].clone(),
            phi2: haar_states[k + 1].clone(),
        });
        k += 1;
    }
    Ok(fns)
}

/// Self-normalized covariance `sum w |psi><psi| / sum w` of unit vectors.
pub fn empirical_covariance(samples: &[StateVector]) -> Result<DensityMatrix> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = samples[0].dim();
    let mut acc = CMatrix::zeros(d, d);
    for s in samples {
        let v = s.as_vector();
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        for i in 0..d {
            let a = v[i];
            for j in 0..d {
                acc[(i, j)] += a * v[j].conj();
            }
        }
    }
    acc /= C64::new(samples.len() as f64, 0.0);
    DensityMatrix::new(acc)
}

/// Weighted covariance of (generally unnormalized) vectors, self-normalized
/// by the total weight: `sum w |psi><psi| / sum w ||psi||^2`.
///
/// Feeding the raw Gaussian draws with weights `||psi||^2` reproduces the
/// covariance of the sphere measure obtained by adjust-and-project.
pub fn weighted_covariance(samples: &[WeightedSample]) -> Result<DensityMatrix> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = samples[0].vector.len();
    let mut acc = CMatrix::zeros(d, d);
    let mut total = 0.0;
    for s in samples {
        if s.weight < 0.0 || !s.weight.is_finite() {
            return Err(Error::InvalidWeights);
        }
        let norm_sq = s.vector.norm_squared();
        if norm_sq == 0.0 {
            continue;
        }
        // weight applies to the normalized direction
        let w = s.weight / norm_sq;
        for i in 0..d {
            let a = s.vector[i];
            for j in 0..d {
                acc[(i, j)] += C64::new(w, 0.0) * a * s.vector[j].conj();
            }
        }
        total += s.weight;
    }
    if total <= 0.0 {
        return Err(Error::InvalidWeights);
    }
    acc /= C64::new(total, 0.0);
    DensityMatrix::new(acc)
}

/// Trace distance `(1/2) sum |eigenvalues(rho - sigma)|`, a metric on
/// density matrices with values in [0, 1].
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.as_matrix() - sigma.as_matrix();
    let h = HermitianOperator::new(diff)?;
    Ok(0.5 * h.spectral().eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
}

/// The reference side of a discrepancy comparison: either a second sample
/// set or an analytic evaluator returning the exact mean of each function.
pub enum Reference<'a> {
    Samples(&'a [StateVector]),
    Analytic(&'a dyn Fn(&TestFunction) -> f64),
}

/// One test function's comparison inside a [`DiscrepancyReport`].
#[derive(Debug, Clone, Serialize)]
pub struct FunctionCheck {
    pub label: String,
    pub estimate_a: f64,
    pub estimate_b: f64,
    pub std_error: f64,
    pub z_score: f64,
    /// Set for functions with degenerate variance on both sides; they do not
    /// count toward the verdict.
    pub excluded: bool,
}

/// Per-function mean differences with pooled standard errors and z-scores.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub checks: Vec<FunctionCheck>,
    pub threshold: f64,
    pub max_abs_z: f64,
    pub pass: bool,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Compares sample means of every test function between `a` and the
/// reference, at the given z threshold.
pub fn discrepancy(
    a: &[StateVector],
    reference: Reference<'_>,
    functions: &[TestFunction],
    threshold: f64,
) -> Result<DiscrepancyReport> {
    if a.is_empty() || functions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut checks = Vec::with_capacity(functions.len());
    let mut max_abs_z = 0.0f64;
    for f in functions {
        let va: Vec<f64> = a.iter().map(|s| f.evaluate(s)).collect();
        let (mean_a, var_a) = mean_and_var(&va);
        let (mean_b, var_b, n_b) = match &reference {
            Reference::Samples(b) => {
                let vb: Vec<f64> = b.iter().map(|s| f.evaluate(s)).collect();
                let (m, v) = mean_and_var(&vb);
                (m, v, vb.len() as f64)
            }
            Reference::Analytic(eval) => (eval(f), 0.0, 1.0),
        };
        let se = (var_a / va.len() as f64 + var_b / n_b).sqrt();
        let diff = mean_a - mean_b;
        let (z, excluded) = if se == 0.0 {
            if diff.abs() < 1e-14 {
                (0.0, true)
            } else {
                (Z_CAP, false)
            }
        } else {
            ((diff / se).clamp(-Z_CAP, Z_CAP), false)
        };
        if !excluded {
            max_abs_z = max_abs_z.max(z.abs());
        }
        checks.push(FunctionCheck {
            label: f.label(),
            estimate_a: mean_a,
            estimate_b: mean_b,
            std_error: se,
            z_score: z,
            excluded,
        });
    }
    Ok(DiscrepancyReport {
        checks,
        threshold,
        max_abs_z,
        pass: max_abs_z <= threshold,
    })
}

/// Two-sided Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

// Asymptotic Kolmogorov distribution tail: P(sqrt(n) D > lambda).
fn ks_p_value(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample two-sided KS test of `samples` against a reference CDF, using
/// the asymptotic p-value with the standard finite-sample correction.
/// Requires at least 100 samples.
pub fn ks_test(samples: &[f64], reference_cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.len() < 100 {
        return Err(Error::TooFewSamples {
            min: 100,
            got: samples.len(),
        });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d_stat = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = reference_cdf(x).clamp(0.0, 1.0);
        d_stat = d_stat
            .max(f - i as f64 / n)
            .max((i + 1) as f64 / n - f);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d_stat;
    Ok(KsResult {
        statistic: d_stat,
        p_value: ks_p_value(lambda),
    })
}

/// Phase-uniformity verdict for one eigenbasis coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseCheck {
    pub coefficient: usize,
    /// Circular KS p-value of the phases, or None when the coefficient is
    /// identically zero (outside the support).
    pub ks_p_value: Option<f64>,
    /// Largest |Pearson correlation| between this phase's cos/sin and all
    /// moduli and other phases. None when the coefficient is skipped.
    pub max_abs_correlation: Option<f64>,
    /// Moduli with zero variance are legitimate for fixed-modulus measures;
    /// flagged rather than failed.
    pub zero_variance_modulus: bool,
    pub pass: bool,
}

/// Report of [`phase_uniformity`].
#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub checks: Vec<PhaseCheck>,
    pub alpha: f64,
    pub correlation_bound: f64,
    pub pass: bool,
}

// KS distance of phases against the uniform law on the circle, maximized
// over a 64-point grid of origins so the verdict cannot depend on where the
// circle is cut.
fn circular_ks_statistic(phases: &[f64]) -> f64 {
    let n = phases.len() as f64;
    let mut worst = 0.0f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    for origin_idx in 0..64 {
        let origin = two_pi * origin_idx as f64 / 64.0;
        let mut xs: Vec<f64> = phases
            .iter()
            .map(|&t| {
                let mut s = (t - origin) % two_pi;
                if s < 0.0 {
                    s += two_pi;
                }
                s / two_pi
            })
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d_stat = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            d_stat = d_stat.max(x - i as f64 / n).max((i + 1) as f64 / n - x);
        }
        worst = worst.max(d_stat);
    }
    worst
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let (ma, va) = mean_and_var(a);
    let (mb, vb) = mean_and_var(b);
    if va <= 1e-20 || vb <= 1e-20 {
        return None;
    }
    let cov = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / n;
    Some(cov / (va * vb).sqrt())
}

/// Tests, coefficient by coefficient in the given eigenbasis, that phases
/// are uniform on the circle and uncorrelated with all moduli and with each
/// other. `alpha` is the per-coefficient KS level; correlations must stay
/// within `4 / sqrt(N)`.
pub fn phase_uniformity(
    samples: &[StateVector],
    eigenbasis: &CMatrix,
    alpha: f64,
) -> Result<PhaseReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = eigenbasis.ncols();
    let n = samples.len();
    if n < 100 {
        return Err(Error::TooFewSamples { min: 100, got: n });
    }
    // coefficient table: coeffs[k][sample]
    let mut phases: Vec<Vec<f64>> = vec![Vec::with_capacity(n); d];
    let mut moduli: Vec<Vec<f64>> = vec![Vec::with_capacity(n); d];
    for s in samples {
        let z = eigenbasis.adjoint() * s.as_vector();
        for k in 0..d {
            moduli[k].push(z[k].norm());
            phases[k].push(z[k].arg());
        }
    }
    let correlation_bound = 4.0 / (n as f64).sqrt();
    let mut checks = Vec::with_capacity(d);
    let mut all_pass = true;
    for k in 0..d {
        let max_modulus = moduli[k].iter().cloned().fold(0.0, f64::max);
        if max_modulus < 1e-12 {
            checks.push(PhaseCheck {
                coefficient: k,
                ks_p_value: None,
                max_abs_correlation: None,
                zero_variance_modulus: true,
                pass: true,
            });
            continue;
        }
        let d_stat = circular_ks_statistic(&phases[k]);
        let lambda = ((n as f64).sqrt() + 0.12 + 0.11 / (n as f64).sqrt()) * d_stat;
        let p = ks_p_value(lambda);

        let cos_k: Vec<f64> = phases[k].iter().map(|t| t.cos()).collect();
        let sin_k: Vec<f64> = phases[k].iter().map(|t| t.sin()).collect();
        let mut max_corr = 0.0f64;
        let mut zero_variance = false;
        for m in 0..d {
            match pearson(&cos_k, &moduli[m]) {
                Some(c) => max_corr = max_corr.max(c.abs()),
                None => zero_variance = true,
            }
            if let Some(c) = pearson(&sin_k, &moduli[m]) {
                max_corr = max_corr.max(c.abs());
            }
        }
        for m in 0..d {
            if m == k {
                continue;
            }
            let cos_m: Vec<f64> = phases[m].iter().map(|t| t.cos()).collect();
            if let Some(c) = pearson(&cos_k, &cos_m) {
                max_corr = max_corr.max(c.abs());
            }
            if let Some(c) = pearson(&sin_k, &cos_m) {
                max_corr = max_corr.max(c.abs());
            }
        }
        let pass = p >= alpha && max_corr <= correlation_bound;
        all_pass &= pass;
        checks.push(PhaseCheck {
            coefficient: k,
            ks_p_value: Some(p),
            max_abs_correlation: Some(max_corr),
            zero_variance_modulus: zero_variance,
            pass,
        });
    }
    Ok(PhaseReport {
        checks,
        alpha,
        correlation_bound,
        pass: all_pass,
    })
}

/// Stationarity report: one paired discrepancy per evolution time.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub times: Vec<f64>,
    pub reports: Vec<DiscrepancyReport>,
    /// True when the commutator [H, covariance] is negligible, i.e. the
    /// stationarity claim applies.
    pub commutes: bool,
    pub pass: bool,
}

/// Evolves each draw by `exp(-i H t)` (hbar = 1) and compares test-function
/// statistics to the unevolved draws with a paired z-test, which is exact at
/// `t = 0`. Warns (via `commutes`) when the empirical covariance does not
/// commute with `H`, in which case stationarity is not expected.
pub fn stationarity_check(
    samples: &[StateVector],
    hamiltonian: &HermitianOperator,
    times: &[f64],
    functions: &[TestFunction],
    threshold: f64,
) -> Result<StationarityReport> {
    if samples.is_empty() || functions.is_empty() || times.is_empty() {
        return Err(Error::EmptyInput);
    }
    let cov = empirical_covariance(samples)?;
    let commutator =
        hamiltonian.as_matrix() * cov.as_matrix() - cov.as_matrix() * hamiltonian.as_matrix();
    // sampling noise in the covariance is O(1/sqrt(N)); scale the verdict
    let commutes =
        commutator.norm() <= 10.0 * hamiltonian.as_matrix().norm() / (samples.len() as f64).sqrt();

    let spec = hamiltonian.spectral();
    let base: Vec<Vec<f64>> = functions
        .iter()
        .map(|f| samples.iter().map(|s| f.evaluate(s)).collect())
        .collect();

    let mut reports = Vec::with_capacity(times.len());
    let mut pass = true;
    for &t in times {
        let u_t = spec.apply_function(|e| C64::from_polar(1.0, -e * t));
        let evolved: Vec<StateVector> = samples
            .iter()
            .map(|s| {
                crate::hilbert::project_to_sphere(&(&u_t * s.as_vector()))
                    .expect("unitary preserves the norm")
            })
            .collect();
        let mut checks = Vec::with_capacity(functions.len());
        let mut max_abs_z = 0.0f64;
        for (fi, f) in functions.iter().enumerate() {
            let diffs: Vec<f64> = evolved
                .iter()
                .zip(base[fi].iter())
                .map(|(s, &b)| f.evaluate(s) - b)
                .collect();
            let (mean_d, var_d) = mean_and_var(&diffs);
            let se = (var_d / diffs.len() as f64).sqrt();
            // functions that commute with the evolution change only by
            // rounding; below this floor the difference is exact invariance,
            // not a statistical effect
            let scale = base[fi].iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
            let noise_floor = 1e-12 * scale;
            let (z, excluded) = if se <= noise_floor && mean_d.abs() <= noise_floor {
                (0.0, false)
            } else if se == 0.0 {
                (Z_CAP, false)
            } else {
                ((mean_d / se).clamp(-Z_CAP, Z_CAP), false)
            };
            if !excluded {
                max_abs_z = max_abs_z.max(z.abs());
            }
            checks.push(FunctionCheck {
                label: format!("{}@t={t}", f.label()),
                estimate_a: mean_d,
                estimate_b: 0.0,
                std_error: se,
                z_score: z,
                excluded,
            });
        }
        let report = DiscrepancyReport {
            checks,
            threshold,
            max_abs_z,
            pass: max_abs_z <= threshold,
        };
        pass &= report.pass;
        reports.push(report);
    }
    Ok(StationarityReport {
        times: times.to_vec(),
        reports,
        commutes,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::canonical_rho;
    use crate::gap::{sample_g, sample_gap, GapSpec, WeightedSample};
    use crate::hilbert::{haar_unitary, project_to_sphere, CVector};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn uniform_state(d: usize, rng: &mut RngStream) -> StateVector {
        let v = CVector::from_fn(d, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        project_to_sphere(&v).unwrap()
    }

    #[test]
    fn single_sample_covariance_is_projector() {
        let mut rng = RngStream::new(80, 0);
        let psi = uniform_state(3, &mut rng);
        let cov = empirical_covariance(&[psi.clone()]).unwrap();
        let pure = DensityMatrix::pure(&psi);
        assert!((cov.as_matrix() - pure.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn uniform_sphere_covariance_clt_rate() {
        let mut rng = RngStream::new(81, 0);
        let d = 4;
        let n = 100_000;
        let draws: Vec<StateVector> = (0..n).map(|_| uniform_state(d, &mut rng)).collect();
        let cov = empirical_covariance(&draws).unwrap();
        let mixed = DensityMatrix::maximally_mixed(d).unwrap();
        let dist = trace_distance(&cov, &mixed).unwrap();
        assert!(
            dist <= 5.0 * d as f64 / (n as f64).sqrt(),
            "trace distance {dist}"
        );
    }

    #[test]
    fn weighted_g_draws_recover_rho() {
        let mut rng = RngStream::new(82, 0);
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let spec = GapSpec::new(rho.clone()).unwrap();
        let n = 50_000;
        let samples: Vec<WeightedSample> = (0..n)
            .map(|_| {
                let v = sample_g(&spec, &mut rng);
                let w = v.norm_squared();
                WeightedSample { vector: v, weight: w }
            })
            .collect();
        let cov = weighted_covariance(&samples).unwrap();
        let dist = trace_distance(&cov, &rho).unwrap();
        assert!(dist < 5.0 * 3.0 / (n as f64).sqrt(), "trace distance {dist}");
    }

    #[test]
    fn trace_distance_basics() {
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let sigma = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-14);
        assert!((trace_distance(&rho, &sigma).unwrap() - 0.1).abs() < 1e-12);
        let e0 = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let e1 = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!((trace_distance(&e0, &e1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_same_samples_is_exactly_zero() {
        let mut rng = RngStream::new(83, 0);
        let draws: Vec<StateVector> = (0..2000).map(|_| uniform_state(3, &mut rng)).collect();
        let mut dict_rng = RngStream::new(83, 1);
        let fns = default_dictionary(&CMatrix::identity(3, 3), &mut dict_rng).unwrap();
        let report = discrepancy(&draws, Reference::Samples(&draws), &fns, 3.0).unwrap();
        assert!(report.pass);
        for c in &report.checks {
            assert_eq!(c.estimate_a, c.estimate_b);
        }
    }

    #[test]
    fn discrepancy_separates_distinct_measures() {
        let mut rng = RngStream::new(84, 0);
        let spec = GapSpec::new(DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap()).unwrap();
        let n = 100_000;
        let gap_draws: Vec<StateVector> = (0..n).map(|_| sample_gap(&spec, &mut rng)).collect();
        let uniform_draws: Vec<StateVector> = (0..n).map(|_| uniform_state(2, &mut rng)).collect();
        let e1 = StateVector::basis_state(2, 0).unwrap();
        let fns = vec![TestFunction::Marginal { phi: e1 }];
        let report =
            discrepancy(&gap_draws, Reference::Samples(&uniform_draws), &fns, 5.0).unwrap();
        assert!(!report.pass, "measures with means 0.9 vs 0.5 must separate");
        assert!(report.max_abs_z > 5.0);
    }

    #[test]
    fn discrepancy_against_analytic_reference() {
        let mut rng = RngStream::new(85, 0);
        let n = 20_000;
        let draws: Vec<StateVector> = (0..n).map(|_| uniform_state(4, &mut rng)).collect();
        let e1 = StateVector::basis_state(4, 0).unwrap();
        let fns = vec![TestFunction::Marginal { phi: e1 }];
        // uniform sphere: E|<e1|psi>|^2 = 1/4
        let evaluator = |_: &TestFunction| 0.25;
        let report = discrepancy(&draws, Reference::Analytic(&evaluator), &fns, 4.0).unwrap();
        assert!(report.pass, "z = {}", report.max_abs_z);
    }

    #[test]
    fn ks_calibration_and_power() {
        let mut rng = RngStream::new(86, 0);
        let n = 10_000;
        let uniform: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let res = ks_test(&uniform, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(res.p_value > 0.01, "calibration p {}", res.p_value);

        let shifted: Vec<f64> = uniform.iter().map(|x| (x + 0.1).min(1.0)).collect();
        let res = ks_test(&shifted, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(res.p_value < 1e-6, "power p {}", res.p_value);

        assert!(matches!(
            ks_test(&uniform[..50], |x| x),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn phase_uniformity_gap_passes_and_deterministic_fails() {
        let mut rng = RngStream::new(87, 0);
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let spec = GapSpec::new(rho).unwrap();
        let n = 20_000;
        let draws: Vec<StateVector> = (0..n).map(|_| sample_gap(&spec, &mut rng)).collect();
        let report = phase_uniformity(&draws, &CMatrix::identity(2, 2), 0.001).unwrap();
        assert!(report.pass, "{report:?}");

        // a deterministic state repeated has degenerate phases
        let psi = uniform_state(2, &mut rng);
        let stuck: Vec<StateVector> = (0..1000).map(|_| psi.clone()).collect();
        let report = phase_uniformity(&stuck, &CMatrix::identity(2, 2), 0.001).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn phase_uniformity_extremal_flags_zero_variance_moduli() {
        use crate::ensembles::{sample_extremal, ExtremalSpec};
        let h = HermitianOperator::from_diagonal(&[0.0, 1.0]).unwrap();
        let spec = ExtremalSpec::thermal(&h, 1.0).unwrap();
        let mut rng = RngStream::new(88, 0);
        let draws: Vec<StateVector> = (0..5000)
            .map(|_| sample_extremal(&spec, &mut rng).unwrap())
            .collect();
        let report = phase_uniformity(&draws, &CMatrix::identity(2, 2), 0.001).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.checks.iter().any(|c| c.zero_variance_modulus));
    }

    #[test]
    fn stationarity_thermal_gap_passes() {
        let h = HermitianOperator::from_diagonal(&[0.0, 0.7, 1.9]).unwrap();
        let rho = canonical_rho(&h, 1.2).unwrap();
        let spec = GapSpec::new(rho).unwrap();
        let mut rng = RngStream::new(89, 0);
        let draws: Vec<StateVector> = (0..20_000).map(|_| sample_gap(&spec, &mut rng)).collect();
        let mut dict_rng = RngStream::new(89, 1);
        let fns = default_dictionary(&CMatrix::identity(3, 3), &mut dict_rng).unwrap();
        let report = stationarity_check(&draws, &h, &[0.0, 0.5, 2.0], &fns, 4.2).unwrap();
        assert!(report.commutes);
        assert!(report.pass, "max z {:?}", report.reports.iter().map(|r| r.max_abs_z).collect::<Vec<_>>());
        // t = 0 is an exact identity
        assert_eq!(report.reports[0].max_abs_z, 0.0);
    }

    #[test]
    fn stationarity_noncommuting_covariance_conjugates() {
        // GAP(rho) with [H, rho] != 0: the evolved covariance must be the
        // conjugated rho, not rho itself
        let mut rng = RngStream::new(90, 0);
        let u = haar_unitary(2, &mut rng);
        let rho = DensityMatrix::from_eigensystem(&[0.85, 0.15], u.as_matrix()).unwrap();
        let h = HermitianOperator::from_diagonal(&[0.0, 3.0]).unwrap();
        let spec = GapSpec::new(rho.clone()).unwrap();
        let n = 30_000;
        let draws: Vec<StateVector> = (0..n).map(|_| sample_gap(&spec, &mut rng)).collect();
        let t = 0.7;
        let u_t = h.spectral().apply_function(|e| C64::from_polar(1.0, -e * t));
        let evolved: Vec<StateVector> = draws
            .iter()
            .map(|s| project_to_sphere(&(&u_t * s.as_vector())).unwrap())
            .collect();
        let cov_t = empirical_covariance(&evolved).unwrap();
        let conjugated = DensityMatrix::new(
            &u_t * rho.as_matrix() * u_t.adjoint(),
        )
        .unwrap();
        let dist = trace_distance(&cov_t, &conjugated).unwrap();
        assert!(dist < 5.0 * 2.0 / (n as f64).sqrt(), "{dist}");
        let dist_wrong = trace_distance(&cov_t, &rho).unwrap();
        assert!(dist_wrong > 10.0 * dist, "evolution must move the covariance");
    }

    #[test]
    fn report_serialization_is_stable() {
        let mut rng = RngStream::new(91, 0);
        let draws: Vec<StateVector> = (0..500).map(|_| uniform_state(2, &mut rng)).collect();
        let e1 = StateVector::basis_state(2, 0).unwrap();
        let fns = vec![TestFunction::Marginal { phi: e1 }];
        let r1 = discrepancy(&draws, Reference::Samples(&draws), &fns, 3.0).unwrap();
        let r2 = discrepancy(&draws, Reference::Samples(&draws), &fns, 3.0).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }
}
