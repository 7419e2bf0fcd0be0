//! Contrasts between the measure families: stationarity of the extremal
//! measure, how far GAP draws sit from eigenvector rays, the thermal
//! mismatch of the Brody-Hughston distribution, the Guerra-Loffredo
//! covariance, and the functional-form split between the entropy family and
//! the sphere density of the Gaussian construction.

use gapsphere::ensembles::{
    canonical_rho, entropy_family_log_density, sample_brody_hughston, sample_eig,
    sample_extremal, sample_guerra_loffredo, ChainConfig, EntropyFamilySpec, ExtremalSpec,
    OscillatorParams,
};
use gapsphere::gap::{density_gap, sample_gap, GapSpec};
use gapsphere::hilbert::{
    project_to_sphere, CMatrix, CVector, DensityMatrix, HermitianOperator, RngStream, StateVector,
    C64,
};
use gapsphere::stats::{
    default_dictionary, empirical_covariance, phase_uniformity, stationarity_check,
    trace_distance, SUITE_Z_THRESHOLD,
};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn extremal_measure_is_stationary() {
    let h = HermitianOperator::from_diagonal(&[0.0, 0.73, 1.91]).unwrap();
    let beta = 1.0;
    let spec = ExtremalSpec::thermal(&h, beta).unwrap();
    let mut rng = RngStream::new(220, 0);
    let n = 20_000;
    let draws: Vec<StateVector> = (0..n)
        .map(|_| sample_extremal(&spec, &mut rng).unwrap())
        .collect();

    // moduli are exact constants of the motion
    let rho = canonical_rho(&h, beta).unwrap();
    let u_t = h
        .spectral()
        .apply_function(|e| C64::from_polar(1.0, -e * 1.7));
    for s in draws.iter().take(100) {
        let evolved = project_to_sphere(&(&u_t * s.as_vector())).unwrap();
        for k in 0..3 {
            assert!(
                (evolved.as_vector()[k].norm() - rho.as_matrix()[(k, k)].re.sqrt()).abs() < 1e-10
            );
        }
    }

    // full statistics stay put under the evolution
    let mut dict_rng = RngStream::new(220, 1);
    let fns = default_dictionary(&CMatrix::identity(3, 3), &mut dict_rng).unwrap();
    let report = stationarity_check(&draws, &h, &[0.5, 2.0, 10.0], &fns, SUITE_Z_THRESHOLD).unwrap();
    assert!(report.pass, "stationarity failed");
    // and the phases stay uniform after evolution
    let evolved: Vec<StateVector> = draws
        .iter()
        .map(|s| project_to_sphere(&(&u_t * s.as_vector())).unwrap())
        .collect();
    let phase = phase_uniformity(&evolved, &CMatrix::identity(3, 3), 0.001).unwrap();
    assert!(phase.pass);
}

#[test]
fn gap_draws_avoid_eigenvector_rays_eig_draws_sit_on_them() {
    // chordal distance to the nearest eigenvector ray:
    // min_n sqrt(2 - 2 |<n|psi>|). EIG concentrates at distance zero; GAP
    // keeps nearly all mass away from the rays. The two-level marginal puts
    // roughly 2% of draws within 0.1 of a ray, so the bar is 95%.
    let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
    let spec = GapSpec::new(rho.clone()).unwrap();
    let mut rng = RngStream::new(221, 0);
    let n = 50_000;
    let mut far = 0usize;
    for _ in 0..n {
        let psi = sample_gap(&spec, &mut rng);
        let dist = (0..2)
            .map(|k| (2.0 - 2.0 * psi.as_vector()[k].norm()).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min);
        if dist > 0.1 {
            far += 1;
        }
    }
    let fraction = far as f64 / n as f64;
    assert!(fraction >= 0.95, "GAP fraction far from rays: {fraction}");

    for _ in 0..200 {
        let psi = sample_eig(&rho, &mut rng).unwrap();
        let dist = (0..2)
            .map(|k| (2.0 - 2.0 * psi.as_vector()[k].norm()).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(dist < 1e-7, "EIG draw off the rays: {dist}");
    }
}

#[test]
fn brody_hughston_covariance_misses_the_canonical_ensemble() {
    // two-level system at beta * eps = 2: the projective canonical density
    // produces a density matrix measurably different from exp(-beta H)/Z
    let h = HermitianOperator::from_diagonal(&[0.0, 1.0]).unwrap();
    let beta = 2.0;
    let rho_beta = canonical_rho(&h, beta).unwrap();
    let config = ChainConfig {
        n_samples: 20_000,
        burn_in: 3_000,
        thinning: 5,
        step_size: 0.5,
    };
    let mut rng = RngStream::new(222, 0);
    let batch = sample_brody_hughston(&h, beta, &config, &mut rng).unwrap();
    let diag = batch.diagnostics.as_ref().unwrap();
    assert!(!diag.acceptance_warning, "acceptance {}", diag.acceptance_rate);

    let values: Vec<f64> = batch
        .samples
        .iter()
        .map(|s| s.as_vector()[0].norm_sqr())
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / values.len() as f64;
    // deflate by the effective sample size: MCMC draws are correlated
    let ess = diag.effective_sample_size.min(values.len() as f64);
    let se = (var / ess).sqrt();
    let target = rho_beta.as_matrix()[(0, 0)].re;
    let z = (mean - target) / se;
    assert!(
        z.abs() > 5.0,
        "Brody-Hughston should misrepresent the thermal weight: z = {z} (mean {mean} vs {target})"
    );
}

#[test]
fn guerra_loffredo_covariance_matches_truncated_thermal_state() {
    let params = OscillatorParams::natural(64).unwrap();
    let beta = 1.0;
    let rho_beta = canonical_rho(&params.hamiltonian(), beta).unwrap();
    let mut rng = RngStream::new(223, 0);
    let n = 20_000;
    let draws: Vec<StateVector> = (0..n)
        .map(|_| sample_guerra_loffredo(beta, &params, &mut rng).unwrap())
        .collect();
    let cov = empirical_covariance(&draws).unwrap();
    let dist = trace_distance(&cov, &rho_beta).unwrap();
    // the formal bound max(truncation tail, 5 d / sqrt(N)) is loose here;
    // the observed distance should be small outright
    let tail = (-beta * params.cutoff as f64).exp();
    let bound = tail.max(5.0 * 64.0 / (n as f64).sqrt());
    assert!(dist <= bound, "{dist} > {bound}");
    assert!(dist < 0.05, "trace distance {dist} unexpectedly large");
}

#[test]
fn entropy_family_is_not_a_power_law_on_the_sphere() {
    // GAP's sphere density is a pure power law in q = <psi|rho_+^{-1}|psi>:
    // log-density vs log q is exactly linear with slope -(k+1). The
    // entropy-family density is exponential in a quadratic form, which is
    // linear in q, not in log q. Regressions tell them apart cleanly.
    let weights = [0.7, 0.3];
    let rho = DensityMatrix::from_diagonal(&weights).unwrap();
    let spec = GapSpec::new(rho).unwrap();
    // a comparable exponential-family tilt
    let l = HermitianOperator::from_diagonal(&[-1.0 / weights[0], -1.0 / weights[1]]).unwrap();
    let family = EntropyFamilySpec { l };

    let mut rng = RngStream::new(224, 0);
    let n = 4_000;
    let mut xs = Vec::with_capacity(n); // log q
    let mut y_gap = Vec::with_capacity(n);
    let mut y_family = Vec::with_capacity(n);
    for _ in 0..n {
        let z = CVector::from_fn(2, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let psi = project_to_sphere(&z).unwrap();
        let q: f64 = (0..2)
            .map(|k| psi.as_vector()[k].norm_sqr() / weights[k])
            .sum();
        xs.push(q.ln());
        y_gap.push(density_gap(&spec, &psi).value.ln());
        y_family.push(entropy_family_log_density(&psi, &family));
    }

    let fit = |x: &[f64], y: &[f64]| -> (f64, f64) {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - (intercept + slope * a)).powi(2))
            .sum();
        let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        (slope, 1.0 - ss_res / ss_tot)
    };

    let (slope_gap, r2_gap) = fit(&xs, &y_gap);
    assert!(
        (slope_gap + 3.0).abs() < 1e-9,
        "GAP log-log slope {slope_gap} should be -(k+1) = -3"
    );
    assert!(r2_gap > 1.0 - 1e-12, "GAP law must be exactly log-linear");

    let (_, r2_family) = fit(&xs, &y_family);
    assert!(
        r2_family < 0.999,
        "exponential family must not be log-linear in q: R^2 = {r2_family}"
    );
    // but it IS exactly linear in q itself
    let qs: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
    let (slope_q, r2_q) = fit(&qs, &y_family);
    assert!((slope_q + 1.0).abs() < 1e-9, "slope in q: {slope_q}");
    assert!(r2_q > 1.0 - 1e-12);
}

#[test]
fn eig_covariance_equivariance() {
    // EIG has the covariance and conjugation equivariance of the Gaussian
    // family; check covariance after a unitary rotation of rho
    let mut rng = RngStream::new(225, 0);
    let u = gapsphere::hilbert::haar_unitary(3, &mut rng);
    let rho = DensityMatrix::from_eigensystem(&[0.5, 0.3, 0.2], u.as_matrix()).unwrap();
    let n = 30_000;
    let draws: Vec<StateVector> = (0..n).map(|_| sample_eig(&rho, &mut rng).unwrap()).collect();
    let cov = empirical_covariance(&draws).unwrap();
    let dist = trace_distance(&cov, &rho).unwrap();
    assert!(dist <= 5.0 * 3.0 / (n as f64).sqrt(), "{dist}");
}
