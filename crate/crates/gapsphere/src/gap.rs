//! The Gaussian family G, GA, GAP and the adjust-and-project map.
//!
//! For a density matrix `rho` with eigenpairs `(p_n, |n>)`:
//!
//! * `G(rho)` is the mean-zero complex Gaussian on Hilbert space with
//!   covariance `rho`: independent coefficients `Z_n` with `E|Z_n|^2 = p_n`.
//! * `GA(rho)` reweights `G(rho)` by `||psi||^2`, compensating in advance
//!   for the covariance distortion that radial projection would introduce.
//! * `GAP(rho)` is the pushforward of `GA(rho)` to the unit sphere; its
//!   covariance is exactly `rho`.
//!
//! All mass lives in `support(rho)`, the span of eigenvectors with `p_n`
//! above [`RANK_TOL`](crate::hilbert::RANK_TOL).

use crate::error::{Error, Result};
use crate::hilbert::{
    project_to_sphere, CMatrix, CVector, DensityMatrix, RawVector, RngStream, StateVector, C64,
    RANK_TOL,
};
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Components of `psi` outside `support(rho)` larger than this make the
/// densities vanish (reported with a flag rather than an error).
pub const COMPONENT_TOL: f64 = 1e-8;

/// A density matrix together with its cached eigensystem and numerical rank,
/// ready for repeated sampling and density evaluation.
#[derive(Debug, Clone)]
pub struct GapSpec {
    rho: DensityMatrix,
    /// Ascending eigenvalues, clamped to [0, 1].
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    /// Indices (into `eigenvalues`) of the support, i.e. `p_n > RANK_TOL`.
    support: Vec<usize>,
    in_support: Vec<bool>,
}

impl GapSpec {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        let spec = rho.spectral()?;
        Self::from_parts(rho, spec.eigenvalues, spec.eigenvectors)
    }

    /// Builds the spec from a caller-chosen eigensystem. Degenerate density
    /// matrices admit many eigenbases; the measures do not depend on the
    /// choice, and this entry point lets tests exercise exactly that.
    pub fn from_parts(
        rho: DensityMatrix,
        eigenvalues: Vec<f64>,
        eigenvectors: CMatrix,
    ) -> Result<Self> {
        let d = rho.dim();
        if eigenvalues.len() != d || eigenvectors.nrows() != d || eigenvectors.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: eigenvalues.len(),
            });
        }
        let support: Vec<usize> = (0..d).filter(|&n| eigenvalues[n] > RANK_TOL).collect();
        if support.is_empty() {
            return Err(Error::InvalidParameter(
                "density matrix has empty support".into(),
            ));
        }
        let mut in_support = vec![false; d];
        for &n in &support {
            in_support[n] = true;
        }
        Ok(GapSpec {
            rho,
            eigenvalues,
            eigenvectors,
            support,
            in_support,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// Numerical rank k' = dim support(rho).
    pub fn rank(&self) -> usize {
        self.support.len()
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Support eigenvalues in the order used by the samplers.
    fn support_weights(&self) -> Vec<f64> {
        self.support.iter().map(|&n| self.eigenvalues[n]).collect()
    }

    /// Coefficients of `psi` in the eigenbasis.
    fn coefficients(&self, psi: &CVector) -> CVector {
        self.eigenvectors.adjoint() * psi
    }

    /// Largest coefficient magnitude outside the support.
    fn off_support_mass(&self, coeffs: &CVector) -> f64 {
        (0..self.dim())
            .filter(|&n| !self.in_support[n])
            .map(|n| coeffs[n].norm())
            .fold(0.0, f64::max)
    }

    /// `<psi|rho_+^{-1}|psi>` over the support, plus the off-support check.
    fn support_quadratic(&self, psi: &CVector) -> (f64, bool) {
        let coeffs = self.coefficients(psi);
        let outside = self.off_support_mass(&coeffs);
        let quad: f64 = self
            .support
            .iter()
            .map(|&n| coeffs[n].norm_sqr() / self.eigenvalues[n])
            .sum();
        (quad, outside <= COMPONENT_TOL)
    }

    fn log_det_support(&self) -> f64 {
        self.support.iter().map(|&n| self.eigenvalues[n].ln()).sum()
    }
}

/// Draws `Psi^G = sum_n Z_n |n>` from `G(rho)`: independent rotationally
/// symmetric complex Gaussians with `E|Z_n|^2 = p_n`.
pub fn sample_g(spec: &GapSpec, rng: &mut RngStream) -> RawVector {
    use rand_distr::StandardNormal;
    let mut psi = CVector::zeros(spec.dim());
    for &n in &spec.support {
        let sigma = (spec.eigenvalues[n] / 2.0).sqrt();
        let z = C64::new(
            sigma * rng.sample::<f64, _>(StandardNormal),
            sigma * rng.sample::<f64, _>(StandardNormal),
        );
        psi += spec.eigenvectors.column(n) * z;
    }
    psi
}

// Moduli for one GA draw. The GA law of s_n = |Z_n|^2 has density
// (sum_n s_n) prod_m exp(-s_m / p_m) / p_m, a mixture over a distinguished
// index n with weight p_n where s_n is Gamma(2, p_n) and the rest stay
// exponential. This samples it exactly, without rejection.
fn ga_moduli_squared(weights: &[f64], rng: &mut RngStream) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut distinguished = weights.len() - 1;
    for (n, &w) in weights.iter().enumerate() {
        if pick < w {
            distinguished = n;
            break;
        }
        pick -= w;
    }
    weights
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            if n == distinguished {
                Gamma::new(2.0, p).expect("valid shape/scale").sample(rng)
            } else {
                Exp::new(1.0 / p).expect("positive rate").sample(rng)
            }
        })
        .collect()
}

/// Draws from the adjusted Gaussian `GA(rho)(dpsi) = ||psi||^2 G(rho)(dpsi)`,
/// exactly (no rejection step).
pub fn sample_ga(spec: &GapSpec, rng: &mut RngStream) -> RawVector {
    let weights = spec.support_weights();
    let moduli = ga_moduli_squared(&weights, rng);
    let mut psi = CVector::zeros(spec.dim());
    for (k, &n) in spec.support.iter().enumerate() {
        let theta = rng.gen::<f64>() * 2.0 * PI;
        let z = C64::from_polar(moduli[k].sqrt(), theta);
        psi += spec.eigenvectors.column(n) * z;
    }
    psi
}

/// Draws from `GAP(rho)`: a GA draw projected to the unit sphere.
pub fn sample_gap(spec: &GapSpec, rng: &mut RngStream) -> StateVector {
    let psi = sample_ga(spec, rng);
    project_to_sphere(&psi).expect("GA draw is nonzero almost surely")
}

/// Which reference measure a density value is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceMeasure {
    /// Lebesgue measure on `support(rho)` identified with C^{k'}.
    LebesgueOnSupport,
    /// Unnormalized surface (area) measure on the unit sphere of the support.
    SurfaceOnSupportSphere,
}

/// A density value tagged with its reference measure. `in_support` is false
/// when the argument had components outside `support(rho)` beyond
/// [`COMPONENT_TOL`]; the value is then 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub reference: ReferenceMeasure,
    pub in_support: bool,
}

/// Density of `G(rho)` at `psi` relative to Lebesgue measure on the support:
/// `exp(-<psi|rho_+^{-1}|psi>) / (pi^{k'} det rho_+)`.
pub fn density_g(spec: &GapSpec, psi: &RawVector) -> DensityValue {
    let (quad, in_support) = spec.support_quadratic(psi);
    if !in_support {
        return DensityValue {
            value: 0.0,
            reference: ReferenceMeasure::LebesgueOnSupport,
            in_support: false,
        };
    }
    let k = spec.rank() as f64;
    let log_density = -quad - spec.log_det_support() - k * PI.ln();
    DensityValue {
        value: log_density.exp(),
        reference: ReferenceMeasure::LebesgueOnSupport,
        in_support: true,
    }
}

/// Density of `GA(rho)`: the G density times `||psi||^2`.
pub fn density_ga(spec: &GapSpec, psi: &RawVector) -> DensityValue {
    let g = density_g(spec, psi);
    DensityValue {
        value: g.value * psi.norm_squared(),
        ..g
    }
}

/// Density of `GAP(rho)` at a unit vector, relative to the unnormalized
/// surface measure on the sphere of the support:
/// `k'! / (2 pi^{k'} det rho_+) * <psi|rho_+^{-1}|psi>^{-(k'+1)}`.
pub fn density_gap(spec: &GapSpec, psi: &StateVector) -> DensityValue {
    let (quad, in_support) = spec.support_quadratic(psi.as_vector());
    if !in_support {
        return DensityValue {
            value: 0.0,
            reference: ReferenceMeasure::SurfaceOnSupportSphere,
            in_support: false,
        };
    }
    let k = spec.rank() as f64;
    let log_density = ln_gamma(k + 1.0)
        - (2.0f64).ln()
        - k * PI.ln()
        - spec.log_det_support()
        - (k + 1.0) * quad.ln();
    DensityValue {
        value: log_density.exp(),
        reference: ReferenceMeasure::SurfaceOnSupportSphere,
        in_support: true,
    }
}

/// A sample with an importance weight.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub vector: CVector,
    pub weight: f64,
}

impl WeightedSample {
    pub fn unit(vector: CVector) -> Self {
        WeightedSample {
            vector,
            weight: 1.0,
        }
    }
}

/// The adjust-and-project map on weighted samples: multiplies each weight by
/// `||psi||^2` and normalizes each vector. Applied to draws from any measure
/// `mu` it realizes `P_*(A(mu))`, which preserves the covariance of `mu`.
pub fn adjust_and_project(samples: &[WeightedSample]) -> Result<Vec<WeightedSample>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    samples
        .iter()
        .map(|s| {
            let norm_sq = s.vector.norm_squared();
            if norm_sq == 0.0 {
                return Err(Error::ZeroVector);
            }
            Ok(WeightedSample {
                vector: &s.vector / C64::new(norm_sq.sqrt(), 0.0),
                weight: s.weight * norm_sq,
            })
        })
        .collect()
}
