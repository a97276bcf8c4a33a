//! Resolvent kernels of the Aharonov–Bohm Hamiltonian (Friedrichs extension)
//! and of the two Pauli spin blocks, their singular/regular split, the
//! partial-wave series and extraction of boundary coefficients at the origin.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_kronrod, GkOptions};
use crate::specfun::{k_ladder, k_minus_leading, k_nu};

/// Smallest flux fraction used; inputs in `(0, ALPHA_MIN)` are clamped.
pub const ALPHA_MIN: f64 = 1e-3;

/// Fractional flux `alpha`, clamped to `[ALPHA_MIN, 1 - ALPHA_MIN]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FluxAlpha(f64);

impl FluxAlpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("flux alpha must lie in (0, 1), got {alpha}"));
        }
        Ok(Self(alpha.clamp(ALPHA_MIN, 1.0 - ALPHA_MIN)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `C_alpha = sin(pi alpha) / (4 pi^2)`.
    pub fn c_alpha(self) -> f64 {
        (PI * self.0).sin() / (4.0 * PI * PI)
    }

    /// Order of the zero-mode singularity of the given spin block.
    pub fn nu(self, spin: SpinChannel) -> f64 {
        match spin {
            SpinChannel::Plus => 1.0 - self.0,
            SpinChannel::Minus => self.0,
        }
    }
}

/// Spectral parameter `z` off the half-line `[0, inf)`, with `kappa = sqrt(-z)`, `Re kappa > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    z: Complex64,
    kappa: Complex64,
}

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return domain(format!("spectral parameter {z} is not finite"));
        }
        if z.im == 0.0 && z.re >= 0.0 {
            return domain(format!("spectral parameter {z} lies on [0, inf)"));
        }
        let kappa = (-z).sqrt();
        Ok(Self { z, kappa })
    }

    pub fn real(z: f64) -> Result<Self> {
        Self::new(Complex64::new(z, 0.0))
    }

    pub fn z(self) -> Complex64 {
        self.z
    }

    pub fn kappa(self) -> Complex64 {
        self.kappa
    }

    pub fn is_real(self) -> bool {
        self.z.im == 0.0
    }
}

/// A point in the plane in polar form, `r >= 0`, `theta` in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite()) || r < 0.0 {
            return domain(format!("invalid polar point ({r}, {theta})"));
        }
        let mut t = theta.rem_euclid(TAU);
        if t > PI {
            t -= TAU;
        }
        Ok(Self { r, theta: t })
    }

    pub fn cartesian(self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// Spin block of the Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinChannel {
    Plus,
    Minus,
}

impl SpinChannel {
    pub const BOTH: [SpinChannel; 2] = [SpinChannel::Plus, SpinChannel::Minus];

    /// Angular mode carrying the zero-mode singularity.
    pub fn critical_mode(self) -> i32 {
        match self {
            SpinChannel::Plus => -1,
            SpinChannel::Minus => 0,
        }
    }

    /// Angular factor of the rank-one correction.
    pub fn phase(self, phi: f64) -> Complex64 {
        match self {
            SpinChannel::Plus => Complex64::from_polar(1.0, -phi),
            SpinChannel::Minus => Complex64::new(1.0, 0.0),
        }
    }

    pub fn index(self) -> usize {
        match self {
            SpinChannel::Plus => 0,
            SpinChannel::Minus => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinChannel::Plus => "plus",
            SpinChannel::Minus => "minus",
        }
    }
}

/// Piecewise constant coefficient of the free term: `(1/2pi)` on `|phi| < pi`,
/// `(1/2pi) e^{-2 pi i alpha}` on `(-2pi, -pi)` and `(1/2pi) e^{2 pi i alpha}` on `(pi, 2pi)`.
pub fn c_hat(phi: f64, alpha: FluxAlpha) -> Result<Complex64> {
    if !phi.is_finite() || phi.abs() >= TAU {
        return domain(format!("angle difference {phi} outside (-2pi, 2pi)"));
    }
    if (phi.abs() - PI).abs() < 1e-9 {
        return domain(format!("c_hat is discontinuous at phi = {phi}"));
    }
    let a = alpha.value();
    let v = if phi.abs() < PI {
        Complex64::new(1.0, 0.0)
    } else if phi > 0.0 {
        Complex64::from_polar(1.0, TAU * a)
    } else {
        Complex64::from_polar(1.0, -TAU * a)
    };
    Ok(v / TAU)
}

/// Numerical settings for kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    /// Relative tolerance of the `s`-integral.
    pub quad_tol: f64,
    /// Angle differences within this distance of `+-pi` are moved to that distance.
    pub phi_eps: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { quad_tol: 1e-12, phi_eps: 1e-6 }
    }
}

/// Kernels at fixed flux and spectral parameter.
#[derive(Debug, Clone, Copy)]
pub struct GreenFunction {
    pub alpha: FluxAlpha,
    pub z: SpectralParameter,
    pub opts: GreenOptions,
}

impl GreenFunction {
    pub fn new(alpha: FluxAlpha, z: SpectralParameter) -> Self {
        Self { alpha, z, opts: GreenOptions::default() }
    }

    pub fn with_options(mut self, opts: GreenOptions) -> Self {
        self.opts = opts;
        self
    }

    pub(crate) fn clamp_phi(&self, phi: f64) -> f64 {
        let eps = self.opts.phi_eps;
        for c in [PI, -PI] {
            if (phi - c).abs() < eps {
                return if phi < c || (phi == c && c > 0.0) { c - eps } else { c + eps };
            }
        }
        phi
    }

    /// Friedrichs resolvent kernel between two points.
    pub fn friedrichs(&self, x: PolarPoint, x0: PolarPoint) -> Result<Complex64> {
        self.friedrichs_relative(x.r, x0.r, x.theta - x0.theta)
    }

    /// Friedrichs kernel as a function of `r`, `r0` and `phi = theta - theta0` in `(-2pi, 2pi)`.
    pub fn friedrichs_relative(&self, r: f64, r0: f64, phi: f64) -> Result<Complex64> {
        let phi = self.clamp_phi(phi);
        let a = self.alpha.value();
        let gauge = Complex64::from_polar(1.0, a * phi);
        Ok(gauge * self.gauge_free(r, r0, phi)?)
    }

    /// `e^{-i alpha phi} G(r, r0, phi)`: the 2pi-periodic form of the Friedrichs kernel.
    pub(crate) fn gauge_free(&self, r: f64, r0: f64, phi: f64) -> Result<Complex64> {
        if !(r > 0.0 && r0 > 0.0) {
            return domain(format!("radii must be positive, got {r}, {r0}"));
        }
        let ch = c_hat(phi, self.alpha)?;
        let a = self.alpha.value();
        let d2 = (r - r0) * (r - r0) + 2.0 * r * r0 * (1.0 - phi.cos());
        if d2 <= 0.0 {
            return Err(Error::DiagonalSingularity);
        }
        let d = d2.sqrt();
        let kappa = self.z.kappa();
        let real_kappa = self.z.is_real();
        let k0 = |x: f64| -> Complex64 {
            if real_kappa {
                Complex64::new(k_nu(0.0, kappa.re * x), 0.0)
            } else {
                k_nu(0.0, kappa * x)
            }
        };
        let free = ch * Complex64::from_polar(1.0, -a * phi) * k0(d);
        let scale = k_nu(0.0, kappa.re * d).max(1e-300);
        Ok(free + self.integral_term(r, r0, phi, scale)?)
    }

    /// The `s`-integral contribution to `e^{-i alpha phi} G`; `scale` sets the absolute tolerance.
    pub(crate) fn integral_term(&self, r: f64, r0: f64, phi: f64, scale: f64) -> Result<Complex64> {
        let a = self.alpha.value();
        let kappa = self.z.kappa();
        let real_kappa = self.z.is_real();
        let k0 = |x: f64| -> Complex64 {
            if real_kappa {
                Complex64::new(k_nu(0.0, kappa.re * x), 0.0)
            } else {
                k_nu(0.0, kappa * x)
            }
        };
        let m = a.min(1.0 - a);
        let rr = r * r + r0 * r0;
        let two = 2.0 * r * r0;
        let radius = |s: f64| (rr + two * s.cosh()).sqrt();
        let thresh = 1e-3 * self.opts.quad_tol * scale;
        let mut s_max = 1.0;
        while s_max < 700.0 {
            let bound = k_nu(0.0, kappa.re * radius(s_max)) * (-m * s_max).exp();
            if bound < thresh {
                break;
            }
            s_max *= 1.5;
        }
        let s_max = s_max.min(700.0);
        let e_phi = Complex64::from_polar(1.0, phi);
        let integrand_pos = |s: f64| {
            let den = 1.0 + (-s).exp() * e_phi;
            k0(radius(s)) * (-a * s).exp() / den
        };
        let integrand_neg = |s: f64| {
            // s < 0 written without overflow: e^{(1-a)s} / (e^{s} + e^{i phi})
            let den = s.exp() + e_phi;
            k0(radius(s)) * ((1.0 - a) * s).exp() / den
        };
        let opts = GkOptions { abs_tol: self.opts.quad_tol * scale, rel_tol: self.opts.quad_tol, max_intervals: 4000 };
        let pos = gauss_kronrod(integrand_pos, 0.0, s_max, opts)?;
        let neg = gauss_kronrod(integrand_neg, -s_max, 0.0, opts)?;
        Ok(-(pos.value + neg.value) * ((PI * a).sin() / (2.0 * PI * PI)))
    }

    /// Limit of `e^{-i alpha phi} G - K_0(kappa |x - x0|) / 2pi` as `x0 -> x` at radius `r`.
    pub(crate) fn coincident_smooth(&self, r: f64) -> Result<Complex64> {
        let scale = k_nu(0.0, self.z.kappa().re * r).max(1e-300);
        self.integral_term(r, r, 0.0, scale)
    }

    pub(crate) fn rank_one(&self, spin: SpinChannel, r: f64, r0: f64) -> Complex64 {
        let nu = self.alpha.nu(spin);
        let kappa = self.z.kappa();
        let (a, b) = if self.z.is_real() {
            (Complex64::new(k_nu(nu, kappa.re * r), 0.0), Complex64::new(k_nu(nu, kappa.re * r0), 0.0))
        } else {
            (k_nu(nu, kappa * r), k_nu(nu, kappa * r0))
        };
        a * b * (4.0 * self.alpha.c_alpha())
    }

    /// Pauli kernel of one spin block as a function of `(r, r0, phi)`.
    pub fn pauli_relative(&self, spin: SpinChannel, r: f64, r0: f64, phi: f64) -> Result<Complex64> {
        let phi = self.clamp_phi(phi);
        let g = self.gauge_free(r, r0, phi)?;
        Ok(g + self.rank_one(spin, r, r0) * spin.phase(phi))
    }

    /// Pauli kernel `G^{+-}(x, x0)`.
    pub fn pauli(&self, spin: SpinChannel, x: PolarPoint, x0: PolarPoint) -> Result<Complex64> {
        self.pauli_relative(spin, x.r, x0.r, x.theta - x0.theta)
    }

    /// Leading singular part `C_alpha Gamma(nu)^2 (-z r r0 / 4)^{-nu}` times the angular phase.
    pub fn leading_relative(&self, spin: SpinChannel, r: f64, r0: f64, phi: f64) -> Complex64 {
        let nu = self.alpha.nu(spin);
        let g = statrs::function::gamma::gamma(nu);
        let base = -self.z.z() * (r * r0 / 4.0);
        base.powf(-nu) * (self.alpha.c_alpha() * g * g) * spin.phase(phi)
    }

    pub fn leading(&self, spin: SpinChannel, x: PolarPoint, x0: PolarPoint) -> Complex64 {
        self.leading_relative(spin, x.r, x0.r, x.theta - x0.theta)
    }

    /// Pauli kernel minus its leading singular part, computed without cancellation.
    pub fn regular_relative(&self, spin: SpinChannel, r: f64, r0: f64, phi: f64) -> Result<Complex64> {
        let phi = self.clamp_phi(phi);
        let g = self.gauge_free(r, r0, phi)?;
        Ok(g + self.rank_one_regular(spin, r, r0) * spin.phase(phi))
    }

    pub fn regular(&self, spin: SpinChannel, x: PolarPoint, x0: PolarPoint) -> Result<Complex64> {
        self.regular_relative(spin, x.r, x0.r, x.theta - x0.theta)
    }

    /// `4 C_alpha (K K - A A)` with `A(w) = (Gamma(nu)/2)(w/2)^{-nu}`.
    pub(crate) fn rank_one_regular(&self, spin: SpinChannel, r: f64, r0: f64) -> Complex64 {
        let nu = self.alpha.nu(spin);
        let kappa = self.z.kappa();
        let (xi, zeta) = (kappa * r, kappa * r0);
        let lead = |w: Complex64| (w * 0.5).powf(-nu) * (statrs::function::gamma::gamma(nu) * 0.5);
        let (d_xi, k_zeta) = if self.z.is_real() {
            (Complex64::new(k_minus_leading(nu, xi.re), 0.0), Complex64::new(k_nu(nu, zeta.re), 0.0))
        } else {
            (k_minus_leading(nu, xi), k_nu(nu, zeta))
        };
        let d_zeta = if self.z.is_real() {
            Complex64::new(k_minus_leading(nu, zeta.re), 0.0)
        } else {
            k_minus_leading(nu, zeta)
        };
        (d_xi * k_zeta + lead(xi) * d_zeta) * (4.0 * self.alpha.c_alpha())
    }
}

/// Friedrichs kernel with default options.
pub fn green_friedrichs(alpha: FluxAlpha, z: SpectralParameter, x: PolarPoint, x0: PolarPoint) -> Result<Complex64> {
    GreenFunction::new(alpha, z).friedrichs(x, x0)
}

/// Pauli kernel of one spin block with default options.
pub fn green_pauli(
    alpha: FluxAlpha,
    z: SpectralParameter,
    x: PolarPoint,
    x0: PolarPoint,
    spin: SpinChannel,
) -> Result<Complex64> {
    GreenFunction::new(alpha, z).pauli(spin, x, x0)
}

/// Regular part of the Pauli kernel with default options.
pub fn green_regular(
    alpha: FluxAlpha,
    z: SpectralParameter,
    x: PolarPoint,
    x0: PolarPoint,
    spin: SpinChannel,
) -> Result<Complex64> {
    GreenFunction::new(alpha, z).regular(spin, x, x0)
}

/// Leading singular part of the Pauli kernel.
pub fn leading_singularity(
    alpha: FluxAlpha,
    z: SpectralParameter,
    x: PolarPoint,
    x0: PolarPoint,
    spin: SpinChannel,
) -> Complex64 {
    GreenFunction::new(alpha, z).leading(spin, x, x0)
}

/// Bessel order `|m + alpha|` of angular mode `m`.
pub fn mode_order(alpha: FluxAlpha, m: i32) -> f64 {
    (m as f64 + alpha.value()).abs()
}

/// Radial kernel of angular mode `m` in a spin block (no `1/2pi`):
/// `I_mu(kappa r_<) K_|m+alpha|(kappa r_>)`, where `mu = -|m+alpha|` in the
/// critical mode of the block and `|m+alpha|` otherwise.
pub fn channel_green(
    alpha: FluxAlpha,
    z: SpectralParameter,
    spin: Option<SpinChannel>,
    m: i32,
    r: f64,
    r0: f64,
) -> Result<Complex64> {
    if !(r > 0.0 && r0 > 0.0) {
        return domain(format!("radii must be positive, got {r}, {r0}"));
    }
    let nu = mode_order(alpha, m);
    let mu = match spin {
        Some(s) if s.critical_mode() == m => -nu,
        _ => nu,
    };
    let kappa = z.kappa();
    let (lo, hi) = if r <= r0 { (r, r0) } else { (r0, r) };
    let i = crate::specfun::bessel_i(mu, kappa * lo)?;
    Ok(i * k_nu(nu, kappa * hi))
}

/// Truncated partial-wave series of the Friedrichs kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWaveSum {
    pub value: Complex64,
    /// Estimate of the omitted terms `|m| > m_max`.
    pub tail_bound: f64,
}

/// `G(x, x0) = e^{i alpha phi} (1/2pi) sum_m e^{i m phi} I_|m+alpha|(kappa r_<) K_|m+alpha|(kappa r_>)`.
pub fn partial_wave_green(
    alpha: FluxAlpha,
    z: SpectralParameter,
    x: PolarPoint,
    x0: PolarPoint,
    m_max: usize,
) -> Result<PartialWaveSum> {
    if !(x.r > 0.0 && x0.r > 0.0) {
        return domain("partial waves need both radii positive");
    }
    let a = alpha.value();
    let phi = x.theta - x0.theta;
    let kappa = z.kappa();
    let (lo, hi) = if x.r <= x0.r { (x.r, x0.r) } else { (x0.r, x.r) };
    let k_up = k_ladder(a, m_max, kappa * hi);
    let k_down = k_ladder(1.0 - a, m_max, kappa * hi);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for m in -(m_max as i64)..=(m_max as i64) {
        let (nu, k) = if m >= 0 {
            (m as f64 + a, k_up[m as usize])
        } else {
            ((-m - 1) as f64 + 1.0 - a, k_down[(-m - 1) as usize])
        };
        let i = crate::specfun::bessel_i(nu, kappa * lo)?;
        let term = i * k;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::Integration(format!("partial-wave term m = {m} overflowed")));
        }
        sum += term * Complex64::from_polar(1.0, m as f64 * phi);
        if m.unsigned_abs() as usize == m_max {
            last += term.norm();
        }
    }
    let rho = lo / hi;
    let tail_bound = if rho < 1.0 { last * rho / (1.0 - rho) / TAU } else { f64::INFINITY };
    Ok(PartialWaveSum { value: Complex64::from_polar(1.0, a * phi) * sum / TAU, tail_bound })
}

/// Settings for [`boundary_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFitOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// Fits with a larger condition number are rejected.
    pub max_cond: f64,
}

impl Default for BoundaryFitOptions {
    fn default() -> Self {
        Self { r_min: 1e-6, r_max: 1e-3, n_r: 24, n_theta: 32, max_cond: 1e8 }
    }
}

/// Boundary coefficients of the two lowest angular modes near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFit {
    /// Mode `-1`: coefficients of `r^{-(1-alpha)}` and `r^{1-alpha}`.
    pub phi1_m1: Complex64,
    pub phi2_m1: Complex64,
    /// Mode `0`: coefficients of `r^{-alpha}` and `r^{alpha}`.
    pub phi1_0: Complex64,
    pub phi2_0: Complex64,
    /// Largest relative least-squares residual of the two fits.
    pub residual: f64,
    pub cond: f64,
}

/// Projects `f` onto angular modes `-1` and `0` on circles near the origin and
/// fits `c1 r^{-nu} + c2 r^{nu}` (with the `r^2` companions of both powers) on
/// a logarithmic radial grid.
pub fn boundary_fit<F>(f: F, alpha: FluxAlpha, opts: BoundaryFitOptions) -> Result<BoundaryFit>
where
    F: Fn(PolarPoint) -> Result<Complex64>,
{
    if !(opts.r_min > 0.0 && opts.r_max > opts.r_min) || opts.n_r < 6 || opts.n_theta < 4 {
        return domain("boundary fit needs 0 < r_min < r_max, n_r >= 6, n_theta >= 4");
    }
    let a = alpha.value();
    let n = opts.n_theta;
    let radii: Vec<f64> = (0..opts.n_r)
        .map(|k| {
            let t = k as f64 / (opts.n_r - 1) as f64;
            opts.r_min * (opts.r_max / opts.r_min).powf(t)
        })
        .collect();
    let mut mode_m1 = Vec::with_capacity(radii.len());
    let mut mode_0 = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut c_m1 = Complex64::new(0.0, 0.0);
        let mut c_0 = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let theta = -PI + (j as f64 + 0.5) * TAU / n as f64;
            let v = f(PolarPoint::new(r, theta)?)?;
            c_m1 += v * Complex64::from_polar(1.0, theta);
            c_0 += v;
        }
        mode_m1.push(c_m1 / n as f64);
        mode_0.push(c_0 / n as f64);
    }
    let (p1m, p2m, res_m, cond_m) = fit_powers(&radii, &mode_m1, 1.0 - a, opts.max_cond)?;
    let (p10, p20, res_0, cond_0) = fit_powers(&radii, &mode_0, a, opts.max_cond)?;
    Ok(BoundaryFit {
        phi1_m1: p1m,
        phi2_m1: p2m,
        phi1_0: p10,
        phi2_0: p20,
        residual: res_m.max(res_0),
        cond: cond_m.max(cond_0),
    })
}

/// Least squares for `c1 r^{-nu} + c2 r^{nu} + c3 r^{2-nu} + c4 r^{2+nu}`, rows
/// weighted by `r^{nu}` and columns normalised.
fn fit_powers(radii: &[f64], data: &[Complex64], nu: f64, max_cond: f64) -> Result<(Complex64, Complex64, f64, f64)> {
    let exps = [-nu, nu, 2.0 - nu, 2.0 + nu];
    let rows = radii.len();
    let mut a = DMatrix::<f64>::zeros(rows, 4);
    for (i, &r) in radii.iter().enumerate() {
        let w = r.powf(nu);
        for (j, &e) in exps.iter().enumerate() {
            a[(i, j)] = w * r.powf(e);
        }
    }
    let mut col_scale = [0.0; 4];
    for (j, s) in col_scale.iter_mut().enumerate() {
        *s = a.column(j).norm();
        a.column_mut(j).scale_mut(1.0 / *s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = smax / smin;
    if !(cond <= max_cond) {
        return Err(Error::FitFailure { cond });
    }
    let solve =
        |rhs: DVector<f64>| -> Result<DVector<f64>> { svd.solve(&rhs, 0.0).map_err(|_| Error::FitFailure { cond }) };
    let bre = DVector::from_iterator(rows, radii.iter().zip(data).map(|(&r, d)| r.powf(nu) * d.re));
    let bim = DVector::from_iterator(rows, radii.iter().zip(data).map(|(&r, d)| r.powf(nu) * d.im));
    let xre = solve(bre.clone())?;
    let xim = solve(bim.clone())?;
    let rre = &a * &xre - &bre;
    let rim = &a * &xim - &bim;
    let bnorm = (bre.norm_squared() + bim.norm_squared()).sqrt().max(1e-300);
    let residual = (rre.norm_squared() + rim.norm_squared()).sqrt() / bnorm;
    let coef = |j: usize| Complex64::new(xre[j], xim[j]) / col_scale[j];
    Ok((coef(0), coef(1), residual, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(alpha: f64, z: f64) -> GreenFunction {
        GreenFunction::new(FluxAlpha::new(alpha).unwrap(), SpectralParameter::real(z).unwrap())
    }

    #[test]
    fn flux_validation_and_clamp() {
        assert!(FluxAlpha::new(0.0).is_err());
        assert!(FluxAlpha::new(1.0).is_err());
        assert!(FluxAlpha::new(f64::NAN).is_err());
        assert_eq!(FluxAlpha::new(1e-5).unwrap().value(), ALPHA_MIN);
        assert_eq!(FluxAlpha::new(0.99999).unwrap().value(), 1.0 - ALPHA_MIN);
    }

    #[test]
    fn spectral_parameter_validation() {
        assert!(SpectralParameter::real(0.0).is_err());
        assert!(SpectralParameter::real(2.0).is_err());
        let s = SpectralParameter::new(Complex64::new(1.0, 1e-3)).unwrap();
        assert!(s.kappa().re > 0.0);
        assert!((s.kappa() * s.kappa() + s.z()).norm() < 1e-15);
    }

    #[test]
    fn c_hat_values() {
        let a = FluxAlpha::new(0.5).unwrap();
        assert!((c_hat(0.3, a).unwrap() - 1.0 / TAU).norm() < 1e-16);
        assert!((c_hat(4.0, a).unwrap() + 1.0 / TAU).norm() < 1e-15);
        assert!(c_hat(PI, a).is_err());
        assert!(c_hat(7.0, a).is_err());
    }

    #[test]
    fn coincident_points_error() {
        let g = setup(0.3, -1.0);
        let x = PolarPoint::new(1.0, 0.2).unwrap();
        assert_eq!(g.friedrichs(x, x), Err(Error::DiagonalSingularity));
    }

    #[test]
    fn symmetric_in_radii() {
        let g = setup(0.3, -0.7);
        let a = g.gauge_free(0.4, 1.3, 2.0).unwrap();
        let b = g.gauge_free(1.3, 0.4, 2.0).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm());
    }

    #[test]
    fn periodic_kernel_conjugate_symmetry() {
        let g = setup(0.37, -0.9);
        for phi in [0.3, 1.7, 3.0] {
            let a = g.gauge_free(0.6, 1.1, phi).unwrap();
            let b = g.gauge_free(0.6, 1.1, -phi).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm());
            let c = g.gauge_free(0.6, 1.1, phi - TAU).unwrap();
            assert!((a - c).norm() < 1e-12 * a.norm(), "phi = {phi}");
        }
    }

    #[test]
    fn regular_plus_leading_is_pauli() {
        let g = setup(0.3, -1.0);
        let x = PolarPoint::new(0.8, 0.4).unwrap();
        let y = PolarPoint::new(0.5, -1.1).unwrap();
        for spin in SpinChannel::BOTH {
            let p = g.pauli(spin, x, y).unwrap();
            let r = g.regular(spin, x, y).unwrap();
            let l = g.leading(spin, x, y);
            assert!((p - r - l).norm() <= 1e-10 * l.norm());
        }
    }

    #[test]
    fn half_order_closed_form_plus_block() {
        // at alpha = 1/2 both blocks share orders 1/2 and K_{1/2} is elementary
        let g = setup(0.5, -2.0);
        let kappa = 2f64.sqrt();
        let (r, r0) = (0.3, 0.9);
        let want = 4.0
            * g.alpha.c_alpha()
            * (PI / (2.0 * kappa * r)).sqrt()
            * (PI / (2.0 * kappa * r0)).sqrt()
            * (-kappa * (r + r0)).exp();
        assert!((g.rank_one(SpinChannel::Plus, r, r0).re - want).abs() < 1e-14 * want);
    }
}
