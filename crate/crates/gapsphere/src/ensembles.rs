//! Canonical and microcanonical density matrices, plus the rival
//! constructions of a thermal wave-function distribution: the eigenvector
//! mixture EIG, the fixed-modulus extremal (torus) measure, the
//! Guerra-Loffredo coherent-state distribution for the harmonic oscillator,
//! the maximum-entropy exponential family, and the Brody-Hughston density
//! with its Metropolis sampler.

use crate::error::{Error, Result};
use crate::hilbert::{
    project_to_sphere, CMatrix, CVector, DensityMatrix, HermitianOperator, RngStream, StateVector,
    C64,
};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::PI;

/// Eigenvalues closer than this are grouped into one eigenspace when a
/// measure depends on the degeneracy structure.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// The canonical ensemble at inverse temperature beta: `exp(-beta H) / Z`.
#[derive(Debug, Clone)]
pub struct CanonicalSpec {
    pub beta: f64,
    /// Partition function `tr exp(-beta H)`.
    pub z: f64,
    pub rho: DensityMatrix,
}

/// Builds `exp(-beta H) / tr exp(-beta H)` through the spectral
/// decomposition, shifting by the ground-state energy so the exponentials
/// cannot overflow.
pub fn canonical_spec(hamiltonian: &HermitianOperator, beta: f64) -> Result<CanonicalSpec> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(
            "inverse temperature must be finite and nonnegative".into(),
        ));
    }
    let spec = hamiltonian.spectral();
    let e0 = spec.eigenvalues[0];
    let weights: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .collect();
    let shifted_z: f64 = weights.iter().sum();
    let rho = DensityMatrix::from_eigensystem(&weights, &spec.eigenvectors)?;
    Ok(CanonicalSpec {
        beta,
        z: shifted_z * (-beta * e0).exp(),
        rho,
    })
}

/// The canonical density matrix alone.
pub fn canonical_rho(hamiltonian: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    Ok(canonical_spec(hamiltonian, beta)?.rho)
}

// Groups ascending eigenvalues into clusters of width DEGENERACY_TOL.
fn eigenvalue_clusters(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (n, &p) in eigenvalues.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if (p - eigenvalues[c[0]]).abs() <= DEGENERACY_TOL => c.push(n),
            _ => clusters.push(vec![n]),
        }
    }
    clusters
}

fn uniform_in_span(columns: &CMatrix, indices: &[usize], rng: &mut RngStream) -> CVector {
    let d = columns.nrows();
    let mut v = CVector::zeros(d);
    for &n in indices {
        let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        v += columns.column(n) * z;
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Draws from EIG(rho): pick an eigenspace with probability
/// `eigenvalue * dim(eigenspace)` and sample uniformly on its unit sphere.
/// For nondegenerate `rho` this is an eigenvector `|n>` with probability
/// `p_n` and a uniform phase.
pub fn sample_eig(rho: &DensityMatrix, rng: &mut RngStream) -> Result<StateVector> {
    let spec = rho.spectral()?;
    let clusters = eigenvalue_clusters(&spec.eigenvalues);
    let weights: Vec<f64> = clusters
        .iter()
        .map(|c| spec.eigenvalues[c[0]] * c.len() as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut chosen = clusters.len() - 1;
    for (k, &w) in weights.iter().enumerate() {
        if pick < w {
            chosen = k;
            break;
        }
        pick -= w;
    }
    StateVector::new(uniform_in_span(
        &spec.eigenvectors,
        &clusters[chosen],
        rng,
    ))
}

/// The extremal (torus) measure: fixed weight on each eigenspace, uniform
/// direction within it. In the nondegenerate case the coefficient moduli are
/// frozen at `sqrt(p_n)` and only the phases are random.
#[derive(Debug, Clone)]
pub struct ExtremalSpec {
    /// One weight per distinct eigenvalue; sums to 1.
    weights: Vec<f64>,
    /// Eigenvector columns, clustered per weight.
    eigenvectors: CMatrix,
    clusters: Vec<Vec<usize>>,
}

impl ExtremalSpec {
    /// Level weights from a density matrix: each distinct eigenvalue `p`
    /// with multiplicity `g` gets weight `p * g`, so the covariance of the
    /// sampled vector is the density matrix itself.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let spec = rho.spectral()?;
        let clusters = eigenvalue_clusters(&spec.eigenvalues);
        let weights = clusters
            .iter()
            .map(|c| spec.eigenvalues[c[0]] * c.len() as f64)
            .collect();
        Ok(ExtremalSpec {
            weights,
            eigenvectors: spec.eigenvectors,
            clusters,
        })
    }

    /// Thermal weights `p(E) proportional to g(E) exp(-beta E)` on the
    /// spectrum of `H`; this is the extremal measure matching the canonical
    /// density matrix.
    pub fn thermal(hamiltonian: &HermitianOperator, beta: f64) -> Result<Self> {
        Self::from_density(&canonical_rho(hamiltonian, beta)?)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Draws `Psi = sum_p sqrt(w_p) Psi_p` with independent uniform `Psi_p` on
/// each eigenspace sphere.
pub fn sample_extremal(spec: &ExtremalSpec, rng: &mut RngStream) -> Result<StateVector> {
    let d = spec.eigenvectors.nrows();
    let mut v = CVector::zeros(d);
    for (k, cluster) in spec.clusters.iter().enumerate() {
        if spec.weights[k] <= 0.0 {
            continue;
        }
        let part = uniform_in_span(&spec.eigenvectors, cluster, rng);
        v += part * C64::new(spec.weights[k].sqrt(), 0.0);
    }
    project_to_sphere(&v)
}

/// Harmonic-oscillator parameters and the Fock-space truncation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OscillatorParams {
    pub mass: f64,
    pub frequency: f64,
    pub hbar: f64,
    pub cutoff: usize,
}

impl OscillatorParams {
    pub fn new(mass: f64, frequency: f64, hbar: f64, cutoff: usize) -> Result<Self> {
        if !(mass > 0.0 && frequency > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter(
                "mass, frequency, hbar must be positive".into(),
            ));
        }
        if cutoff < 2 {
            return Err(Error::InvalidParameter("cutoff must be at least 2".into()));
        }
        Ok(OscillatorParams {
            mass,
            frequency,
            hbar,
            cutoff,
        })
    }

    /// Natural units: m = omega = hbar = 1.
    pub fn natural(cutoff: usize) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, cutoff)
    }

    /// The oscillator Hamiltonian `hbar omega (n + 1/2)` on the truncated
    /// Fock space.
    pub fn hamiltonian(&self) -> HermitianOperator {
        let levels: Vec<f64> = (0..self.cutoff)
            .map(|n| self.hbar * self.frequency * (n as f64 + 0.5))
            .collect();
        HermitianOperator::from_diagonal(&levels).expect("cutoff >= 2")
    }
}

/// The coherent state for the phase-space point `(q, p)` in the truncated
/// Fock basis: coefficients `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` with
/// `alpha = (m omega q + i p) / sqrt(2 m omega hbar)`.
///
/// Errors if `|alpha|^2 > cutoff / 4` or if the truncated norm falls below
/// `1 - 1e-8`; otherwise the truncated vector is renormalized.
pub fn coherent_state(q: f64, p: f64, params: &OscillatorParams) -> Result<StateVector> {
    let scale = (2.0 * params.mass * params.frequency * params.hbar).sqrt();
    let alpha = C64::new(params.mass * params.frequency * q / scale, p / scale);
    let amp2 = alpha.norm_sqr();
    if amp2 > params.cutoff as f64 / 4.0 {
        return Err(Error::InsufficientCutoff {
            cutoff: params.cutoff,
            reason: format!("|alpha|^2 = {amp2:.3} exceeds cutoff/4"),
        });
    }
    let mut coeffs = CVector::zeros(params.cutoff);
    let mut c = C64::new((-amp2 / 2.0).exp(), 0.0);
    coeffs[0] = c;
    for n in 1..params.cutoff {
        c = c * alpha / C64::new((n as f64).sqrt(), 0.0);
        coeffs[n] = c;
    }
    let norm = coeffs.norm();
    if norm * norm < 1.0 - 1e-8 {
        return Err(Error::InsufficientCutoff {
            cutoff: params.cutoff,
            reason: format!("truncated norm^2 = {:.10}", norm * norm),
        });
    }
    project_to_sphere(&coeffs)
}

/// Draws a coherent state whose phase-space point follows the classical
/// canonical distribution at the shifted inverse temperature
/// `beta' = (e^{beta hbar omega} - 1) / (hbar omega)`. The covariance of the
/// resulting state distribution is the quantum canonical density matrix of
/// the oscillator.
pub fn sample_guerra_loffredo(
    beta: f64,
    params: &OscillatorParams,
    rng: &mut RngStream,
) -> Result<StateVector> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(
            "inverse temperature must be positive".into(),
        ));
    }
    let hw = params.hbar * params.frequency;
    let beta_prime = ((beta * hw).exp() - 1.0) / hw;
    // classical Gaussian: var(q) = 1/(beta' m omega^2), var(p) = m/beta'
    let sigma_q = (1.0 / (beta_prime * params.mass * params.frequency * params.frequency)).sqrt();
    let sigma_p = (params.mass / beta_prime).sqrt();
    let q = sigma_q * rng.sample::<f64, _>(StandardNormal);
    let p = sigma_p * rng.sample::<f64, _>(StandardNormal);
    coherent_state(q, p, params)
}

/// Log-density (unnormalized, relative to the uniform sphere measure) of the
/// Brody-Hughston thermal distribution: `-beta <psi|H|psi>`. Constant on
/// rays, so it descends to projective space.
pub fn brody_hughston_log_density(
    psi: &StateVector,
    hamiltonian: &HermitianOperator,
    beta: f64,
) -> f64 {
    -beta * hamiltonian.expectation(psi)
}

/// Log-density of the entropy-maximizing exponential family relative to the
/// uniform sphere measure: `<psi|L|psi>`, unnormalized.
#[derive(Debug, Clone)]
pub struct EntropyFamilySpec {
    pub l: HermitianOperator,
}

pub fn entropy_family_log_density(psi: &StateVector, spec: &EntropyFamilySpec) -> f64 {
    spec.l.expectation(psi)
}

/// Random-walk Metropolis configuration for sphere samplers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainConfig {
    /// Initial geodesic step size (radians); adapted during burn-in.
    pub step_size: f64,
    pub burn_in: usize,
    pub thinning: usize,
    pub n_samples: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            step_size: 0.5,
            burn_in: 2_000,
            thinning: 5,
            n_samples: 10_000,
        }
    }
}

/// Chain diagnostics attached to an MCMC sample batch.
#[derive(Debug, Clone, Serialize)]
pub struct ChainDiagnostics {
    pub acceptance_rate: f64,
    pub final_step_size: f64,
    /// Effective sample size of the energy series.
    pub effective_sample_size: f64,
    /// Set when the post-burn-in acceptance rate leaves [0.1, 0.9].
    pub acceptance_warning: bool,
}

/// A seeded batch of draws from one measure.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub measure: String,
    pub seed: u64,
    pub stream_index: u64,
    pub samples: Vec<StateVector>,
    pub diagnostics: Option<ChainDiagnostics>,
}

// Geodesic step on the unit sphere of C^d viewed as S^{2d-1}: rotate by a
// Gaussian angle toward a uniform tangent direction. The proposal density
// depends only on the geodesic distance, hence is symmetric.
fn geodesic_step(psi: &CVector, step: f64, rng: &mut RngStream) -> CVector {
    let d = psi.len();
    let mut t = CVector::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    // remove the real-inner-product component along psi
    let overlap = psi.dotc(&t);
    t -= psi * overlap;
    let norm = t.norm();
    if norm < 1e-14 {
        return psi.clone();
    }
    t /= C64::new(norm, 0.0);
    let angle: f64 = step * rng.sample::<f64, _>(StandardNormal);
    psi * C64::new(angle.cos(), 0.0) + t * C64::new(angle.sin(), 0.0)
}

// Initial-positive-sequence estimate of the effective sample size.
fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 10 {
        return n as f64;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return n as f64;
    }
    let mut rho_sum = 0.0;
    for lag in 1..n / 2 {
        let mut acf = 0.0;
        for i in 0..n - lag {
            acf += (series[i] - mean) * (series[i + lag] - mean);
        }
        acf /= n as f64 * var;
        if acf <= 0.0 {
            break;
        }
        rho_sum += acf;
    }
    n as f64 / (1.0 + 2.0 * rho_sum)
}

/// Markov-chain draws targeting the Brody-Hughston density: random-walk
/// Metropolis with geodesic proposals, step size adapted toward a 0.3
/// acceptance rate during burn-in and frozen afterwards.
pub fn sample_brody_hughston(
    hamiltonian: &HermitianOperator,
    beta: f64,
    config: &ChainConfig,
    rng: &mut RngStream,
) -> Result<SampleBatch> {
    if config.n_samples == 0 || config.thinning == 0 {
        return Err(Error::InvalidParameter(
            "chain needs n_samples >= 1 and thinning >= 1".into(),
        ));
    }
    if !(config.step_size > 0.0) {
        return Err(Error::InvalidParameter("step size must be positive".into()));
    }
    let d = hamiltonian.dim();
    let mut step = config.step_size;

    let mut current = {
        let v = CVector::from_fn(d, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        v / C64::new(n, 0.0)
    };
    let log_dens = |v: &CVector| -> f64 {
        let hv = hamiltonian.as_matrix() * v;
        -beta * hv.dotc(v).re
    };
    let mut current_ld = log_dens(&current);

    // burn-in with step adaptation every 50 proposals
    let mut accepted_window = 0usize;
    for it in 0..config.burn_in {
        let proposal = geodesic_step(&current, step, rng);
        let ld = log_dens(&proposal);
        if (ld - current_ld) >= 0.0 || rng.gen::<f64>().ln() < ld - current_ld {
            current = proposal;
            current_ld = ld;
            accepted_window += 1;
        }
        if (it + 1) % 50 == 0 {
            let rate = accepted_window as f64 / 50.0;
            step *= if rate > 0.3 { 1.1 } else { 0.9 };
            step = step.clamp(1e-3, PI);
            accepted_window = 0;
        }
    }

    let mut samples = Vec::with_capacity(config.n_samples);
    let mut energies = Vec::with_capacity(config.n_samples);
    let mut accepted = 0usize;
    let mut proposals = 0usize;
    while samples.len() < config.n_samples {
        for _ in 0..config.thinning {
            let proposal = geodesic_step(&current, step, rng);
            let ld = log_dens(&proposal);
            proposals += 1;
            if (ld - current_ld) >= 0.0 || rng.gen::<f64>().ln() < ld - current_ld {
                current = proposal;
                current_ld = ld;
                accepted += 1;
            }
        }
        let state = project_to_sphere(&current)?;
        energies.push(hamiltonian.expectation(&state));
        samples.push(state);
    }
    let acceptance_rate = accepted as f64 / proposals as f64;
    let diagnostics = ChainDiagnostics {
        acceptance_rate,
        final_step_size: step,
        effective_sample_size: effective_sample_size(&energies),
        acceptance_warning: !(0.1..=0.9).contains(&acceptance_rate),
    };
    Ok(SampleBatch {
        measure: format!("brody-hughston(beta={beta})"),
        seed: rng.seed(),
        stream_index: rng.index(),
        samples,
        diagnostics: Some(diagnostics),
    })
}
