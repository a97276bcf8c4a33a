//! Identity suites behind `check-identities`.

use std::f64::consts::PI;
use std::time::Instant;

use abpauli::greenfn::{green_friedrichs, partial_wave_green, GreenFunction};
use abpauli::oracle::{connection_residual, continuity_gap, kk_product_residual, residue_residual};
use abpauli::{FluxAlpha, PolarPoint, Result, SpectralParameter, SpinChannel};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub cases: usize,
    /// Largest residual, or largest relative slope error for `kk-order`.
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
    pub seconds: f64,
}

fn finish(suite: &'static str, start: Instant, values: Result<Vec<f64>>, tol: f64) -> CheckResult {
    let seconds = start.elapsed().as_secs_f64();
    match values {
        Ok(v) => {
            let worst = v.iter().copied().fold(0.0, f64::max);
            let finite = v.iter().all(|x| x.is_finite());
            CheckResult { suite, cases: v.len(), worst, tol, pass: finite && worst <= tol, seconds }
        }
        Err(e) => {
            log::error!("{suite}: {e}");
            CheckResult { suite, cases: 0, worst: f64::INFINITY, tol, pass: false, seconds }
        }
    }
}

fn al(a: f64) -> FluxAlpha {
    FluxAlpha::new(a).expect("alpha in (0, 1)")
}

pub const RESIDUE_ALPHAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Residue identity at 50 angles per flux, midpoints of a uniform split of `(-pi, pi)`.
pub fn residue_suite() -> CheckResult {
    let start = Instant::now();
    let values = RESIDUE_ALPHAS
        .iter()
        .flat_map(|&a| (0..50).map(move |j| (a, -PI + (j as f64 + 0.5) * 2.0 * PI / 50.0)))
        .map(|(a, phi)| residue_residual(al(a), phi))
        .collect();
    finish("residue", start, values, 1e-8)
}

/// A deterministic sample `(alpha, z, x, x0)` for the partial-wave comparison.
/// Radii are kept apart by a factor of at least 1.4 so that 80 modes converge.
pub fn green_sample(k: usize) -> (f64, f64, PolarPoint, PolarPoint) {
    let u = |g: f64| ((k as f64 + 1.0) * g).fract();
    let alpha = 0.05 + 0.9 * u(2f64.sqrt());
    let z = -(0.05f64.ln() * (1.0 - u(3f64.sqrt())) + 4f64.ln() * u(3f64.sqrt())).exp();
    let r = 0.3 + 1.5 * u(5f64.sqrt());
    let mut r0 = r * (1.4 + 1.6 * u(7f64.sqrt()));
    if u(17f64.sqrt()) < 0.5 {
        r0 = r * r / r0;
    }
    let theta = PI * (2.0 * u(11f64.sqrt()) - 1.0);
    let theta0 = PI * (2.0 * u(13f64.sqrt()) - 1.0);
    let x = PolarPoint::new(r, theta).expect("radius positive");
    let x0 = PolarPoint::new(r0, theta0).expect("radius positive");
    (alpha, z, x, x0)
}

/// Closed-form Friedrichs kernel against its partial-wave series, `m_max = 80`.
pub fn green_oracle_suite(samples: usize) -> CheckResult {
    let start = Instant::now();
    let values = (0..samples)
        .map(|k| {
            let (a, z, x, x0) = green_sample(k);
            let zp = SpectralParameter::real(z)?;
            let g = green_friedrichs(al(a), zp, x, x0)?;
            let p = partial_wave_green(al(a), zp, x, x0, 80)?;
            Ok((g - p.value).norm())
        })
        .collect();
    finish("green-oracle", start, values, 1e-8)
}

/// Jump of the Friedrichs kernel across the cut at `+-pi`, relative to its size.
pub fn continuity_suite() -> CheckResult {
    let start = Instant::now();
    let values = [0.3, 0.7]
        .into_iter()
        .map(|a| {
            let z = SpectralParameter::real(-1.0)?;
            let g = GreenFunction::new(al(a), z).friedrichs_relative(1.0, 1.5, PI - 1e-4)?.norm();
            Ok(continuity_gap(al(a), z, 1.0, 1.5, 1e-4)? / g)
        })
        .collect();
    finish("continuity", start, values, 1e-3)
}

/// Fourier coefficients of the Pauli kernels against the channel products.
pub fn connection_suite() -> CheckResult {
    let start = Instant::now();
    let cases = [(SpinChannel::Minus, 0), (SpinChannel::Minus, 1), (SpinChannel::Plus, -1), (SpinChannel::Plus, 2)];
    let values = [0.3, 0.6]
        .into_iter()
        .flat_map(|a| cases.iter().map(move |&(s, m)| (a, s, m)))
        .map(|(a, spin, m)| connection_residual(al(a), -1.0, 0.8, 1.3, spin, m, 256))
        .collect();
    finish("connection", start, values, 1e-8)
}

/// Relative error of the fitted order of the product expansion remainder, expected `1 - nu`.
pub fn kk_suite() -> CheckResult {
    let start = Instant::now();
    let zs: [f64; 3] = [1e-4, 1e-6, 1e-8];
    let values = [0.3, 0.5, 0.7]
        .into_iter()
        .flat_map(|a| SpinChannel::BOTH.into_iter().map(move |s| (a, s)))
        .map(|(a, spin)| {
            let xs: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
            let ys = zs
                .iter()
                .map(|&z| kk_product_residual(al(a), -z, 1.0, 2.0, spin).map(f64::ln))
                .collect::<Result<Vec<f64>>>()?;
            let want = 1.0 - al(a).nu(spin);
            Ok((slope(&xs, &ys) - want).abs() / want)
        })
        .collect();
    finish("kk-order", start, values, 0.1)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn run_all() -> Vec<CheckResult> {
    vec![residue_suite(), green_oracle_suite(20), continuity_suite(), connection_suite(), kk_suite()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_well_separated() {
        for k in 0..200 {
            let (a, z, x, x0) = green_sample(k);
            assert!(a > 0.0 && a < 1.0 && z < 0.0);
            let rho = x.r.min(x0.r) / x.r.max(x0.r);
            assert!(rho <= 1.0 / 1.4 + 1e-12, "{k}: {rho}");
        }
    }

    #[test]
    fn residue_suite_passes() {
        let r = residue_suite();
        assert_eq!(r.cases, 250);
        assert!(r.pass, "{r:?}");
    }
}
