//! Closed-form results for the thermal two-level system.
//!
//! For `rho_beta` on C^2 the squared coefficient `s = |<1|Psi>|^2` of a
//! GAP-distributed state has the explicit density
//! `f(s) = (alpha_1 s + alpha_2 (1 - s))^{-3}` on (0, 1), with
//! `alpha_1 = (d^{-1}(d^{-1}+1)/2)^{1/3}`, `alpha_2 = (d(d+1)/2)^{1/3}` and
//! `d = exp(beta (E_2 - E_1))` the Boltzmann ratio. Everything here is that
//! formula, its antiderivative, and grid evaluation for plotting.

use crate::error::{Error, Result};
use serde::Serialize;

/// Deltas used by the reference plot: 1/3, 1/2, 1, 2, 3.
pub const FIGURE1_DELTAS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];

/// Two-level thermal parameters in the `delta` parameterization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoLevelSpec {
    pub e1: f64,
    pub e2: f64,
    pub beta: f64,
    /// `exp(beta (e2 - e1))`, the primary parameter.
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl TwoLevelSpec {
    /// Spec from the dimensionless ratio `delta` alone (energies are then a
    /// convention: `e1 = 0`, `e2 = ln(delta)`, `beta = 1`).
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(
                "delta must be positive and finite".into(),
            ));
        }
        let alpha1 = ((1.0 / delta) * (1.0 / delta + 1.0) / 2.0).cbrt();
        let alpha2 = (delta * (delta + 1.0) / 2.0).cbrt();
        Ok(TwoLevelSpec {
            e1: 0.0,
            e2: delta.ln(),
            beta: 1.0,
            delta,
            alpha1,
            alpha2,
        })
    }

    /// Spec from energies and inverse temperature; consistent with
    /// `from_delta(exp(beta (e2 - e1)))`.
    pub fn from_energies(e1: f64, e2: f64, beta: f64) -> Result<Self> {
        if !beta.is_finite() || !e1.is_finite() || !e2.is_finite() {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        let delta = (beta * (e2 - e1)).exp();
        let base = Self::from_delta(delta)?;
        Ok(TwoLevelSpec {
            e1,
            e2,
            beta,
            ..base
        })
    }

    /// Ground-level occupation `E|Z_1|^2 = delta / (1 + delta)`.
    pub fn p1(&self) -> f64 {
        self.delta / (1.0 + self.delta)
    }
}

/// Joint density of the squared moduli `(|Z_1|^2, |Z_2|^2)` of an adjusted
/// Gaussian draw at weights `(p1, p2)`:
/// `(s1 + s2) / (p1 p2) * exp(-s1/p1 - s2/p2)`.
pub fn joint_ga_moduli_density(s1: f64, s2: f64, p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::InvalidParameter("weights must be positive".into()));
    }
    if s1 < 0.0 || s2 < 0.0 {
        return Err(Error::InvalidParameter(
            "moduli squared must be nonnegative".into(),
        ));
    }
    Ok((s1 + s2) / (p1 * p2) * (-s1 / p1 - s2 / p2).exp())
}

/// The marginal density `f(s) = (alpha_1 s + alpha_2 (1-s))^{-3}` of
/// `|Z_1|^2` for a GAP draw, on the open interval (0, 1).
pub fn f_density(s: f64, spec: &TwoLevelSpec) -> Result<f64> {
    if !(0.0 < s && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} outside the open interval (0, 1)"
        )));
    }
    Ok(f_density_clamped(s, spec))
}

// Continuous extension to [0, 1]; used for plotting and quadrature.
fn f_density_clamped(s: f64, spec: &TwoLevelSpec) -> f64 {
    let g = spec.alpha1 * s + spec.alpha2 * (1.0 - s);
    g.powi(-3)
}

/// Closed-form CDF of `f` on [0, 1] (the antiderivative of the power law).
pub fn f_cdf(s: f64, spec: &TwoLevelSpec) -> f64 {
    let s = s.clamp(0.0, 1.0);
    let (a1, a2) = (spec.alpha1, spec.alpha2);
    if (a1 - a2).abs() < 1e-12 {
        // delta = 1: f is identically alpha^{-3} = 1
        return s * a1.powi(-3);
    }
    let g = a2 + (a1 - a2) * s;
    (a2.powi(-2) - g.powi(-2)) / (2.0 * (a1 - a2))
}

/// Mean of `f` by composite Simpson quadrature (the density is smooth on
/// [0, 1], so the grid error is far below 1e-10).
pub fn f_mean(spec: &TwoLevelSpec) -> f64 {
    simpson(|s| s * f_density_clamped(s, spec), 0.0, 1.0, 4096)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2; // even
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        sum += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// One row of the reference-plot table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Figure1Row {
    pub delta: f64,
    pub s: f64,
    pub f: f64,
}

/// Evaluates `f(s)` on an inclusive grid of `grid` points for each delta
/// (endpoints by continuous extension). Defaults to [`FIGURE1_DELTAS`].
pub fn figure1_data(deltas: &[f64], grid: usize) -> Result<Vec<Figure1Row>> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len() * grid);
    for &delta in deltas {
        let spec = TwoLevelSpec::from_delta(delta)?;
        for i in 0..grid {
            let s = i as f64 / (grid - 1) as f64;
            rows.push(Figure1Row {
                delta,
                s,
                f: f_density_clamped(s, &spec),
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with the header `delta,s,f` ('.' decimal separator).
pub fn write_figure1_csv<W: std::io::Write>(w: &mut W, rows: &[Figure1Row]) -> std::io::Result<()> {
    writeln!(w, "delta,s,f")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.delta, r.s, r.f)?;
    }
    Ok(())
}
