//! Reference computations that reach the same quantities by a different route:
//! the residue identity of the free coefficient, small-argument Bessel
//! products, brute-force quadrature for `U`, a radial finite-difference
//! eigenvalue solver and the decay of cutoff forms at criticality.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::bsolver::{BoundState, PotentialComponent, PotentialSpec};
use crate::error::{domain, Error, Result};
use crate::greenfn::{c_hat, FluxAlpha, GreenFunction, SpectralParameter, SpinChannel};
use crate::quad::{exp_sinh, gauss_kronrod_real, gauss_legendre, GkOptions};
use crate::specfun::{bessel_i, bessel_k_real, gamma_real};
use crate::weakcoupling::{d_matrix, CouplingMatrix};
use crate::PolarPoint;

type C64 = Complex64;

/// `|2 pi C(phi) - (sin(pi alpha)/pi) e^{i alpha phi} int_R e^{-alpha s} / (1 + e^{-s + i phi}) ds|`.
///
/// The integral is folded onto `[0, inf)` and evaluated with the exp-sinh rule.
pub fn residue_residual(alpha: FluxAlpha, phi: f64) -> Result<f64> {
    if !phi.is_finite() || phi.abs() >= TAU {
        return domain(format!("angle {phi} outside (-2pi, 2pi)"));
    }
    if (phi - PI).abs() <= 1e-3 || (phi + PI).abs() <= 1e-3 {
        return domain(format!("angle {phi} too close to +-pi"));
    }
    let a = alpha.value();
    let e = C64::from_polar(1.0, phi);
    let integrand = |s: f64| {
        // s and -s together; the second term is rewritten to avoid overflow
        let pos = (-a * s).exp() / (1.0 + (-s).exp() * e);
        let neg = (-(1.0 - a) * s).exp() / ((-s).exp() + e);
        pos + neg
    };
    let integral = exp_sinh(integrand, 0.0, 1e-13)?.value;
    let lhs = c_hat(phi, alpha)? * TAU;
    let rhs = C64::from_polar((PI * a).sin() / PI, a * phi) * integral;
    Ok((lhs - rhs).norm())
}

/// `|K_nu(kappa r) K_nu(kappa r0) - (three leading terms)|` with `nu = alpha.nu(spin)`:
/// `(Gamma(nu)/2)^2 (kappa^2 r r0/4)^{-nu}
///  - Gamma(nu) Gamma(1-nu) / (4 nu) ((r0/r)^nu + (r/r0)^nu)
///  + (Gamma(1-nu)/(2 nu))^2 (kappa^2 r r0/4)^nu`.
pub fn kk_product_residual(alpha: FluxAlpha, z: f64, r: f64, r0: f64, spin: SpinChannel) -> Result<f64> {
    if !(z < 0.0 && z.is_finite()) {
        return domain(format!("z = {z} must be real and negative"));
    }
    if !(r > 0.0 && r0 > 0.0) {
        return domain(format!("radii must be positive, got {r}, {r0}"));
    }
    let nu = alpha.nu(spin);
    let kappa = (-z).sqrt();
    let exact = bessel_k_real(nu, kappa * r)? * bessel_k_real(nu, kappa * r0)?;
    let (g, g1) = (gamma_real(nu)?, gamma_real(1.0 - nu)?);
    let q = -z * r * r0 / 4.0;
    let ratio = r0 / r;
    let first = (0.5 * g).powi(2) * q.powf(-nu);
    let middle = g * g1 / (4.0 * nu) * (ratio.powf(nu) + ratio.powf(-nu));
    let last = (g1 / (2.0 * nu)).powi(2) * q.powf(nu);
    Ok((exact - (first - middle + last)).abs())
}

/// `|G(pi - offset) - G(pi + offset)|`, both sides from the Friedrichs kernel at `phi = theta - theta0`.
pub fn continuity_gap(alpha: FluxAlpha, z: SpectralParameter, r: f64, r0: f64, offset: f64) -> Result<f64> {
    if !(offset > 0.0 && offset < PI) {
        return domain(format!("offset {offset} must lie in (0, pi)"));
    }
    let g = GreenFunction::new(alpha, z);
    let left = g.friedrichs_relative(r, r0, PI - offset)?;
    let right = g.friedrichs_relative(r, r0, PI + offset)?;
    Ok((left - right).norm())
}

/// Deviation of the `m`-th angular Fourier coefficient of the periodic Pauli kernel
/// from `(1/2pi) I_mu(kappa r_<) K_nu(kappa r_>)`, with `mu = -nu` on the critical
/// mode of the block. The coefficient is taken with an `n_phi`-point midpoint rule,
/// the Bessel side from the ascending series and `K_nu`.
pub fn connection_residual(
    alpha: FluxAlpha,
    z: f64,
    r: f64,
    r0: f64,
    spin: SpinChannel,
    m: i32,
    n_phi: usize,
) -> Result<f64> {
    if n_phi < 8 {
        return domain("need at least 8 angular points");
    }
    let zp = SpectralParameter::real(z)?;
    let g = GreenFunction::new(alpha, zp);
    let h = TAU / n_phi as f64;
    let mut coef = C64::new(0.0, 0.0);
    for k in 0..n_phi {
        let phi = -PI + (k as f64 + 0.5) * h;
        coef += g.pauli_relative(spin, r, r0, phi)? * C64::from_polar(1.0, -(m as f64) * phi);
    }
    coef *= h / TAU;
    let nu = (m as f64 + alpha.value()).abs();
    let mu = if m == spin.critical_mode() { -nu } else { nu };
    let kappa = (-z).sqrt();
    let (lo, hi) = if r <= r0 { (r, r0) } else { (r0, r) };
    let want = bessel_i(mu, C64::new(kappa * lo, 0.0))? * (bessel_k_real(nu, kappa * hi)? / TAU);
    Ok((coef - want).norm())
}

/// `U = int D V D^* dw` by the midpoint rule on polar cells, `n` in angle and
/// about `n` in radius.
///
/// Radial cells are uniform between the breakpoints of `V` except on the
/// innermost segment, where they are graded as `r = b t^q` with
/// `q = 1 / (1 - nu)` for the entry of order `nu`, which makes the
/// `r^{1 - 2 nu}` weight linear in `t`.
pub fn brute_u(alpha: FluxAlpha, potential: &PotentialSpec, n: usize) -> Result<CouplingMatrix> {
    if n < 64 {
        return domain(format!("resolution {n} below 64"));
    }
    let mut u = Matrix2::<C64>::zeros();
    let dth = TAU / n as f64;
    for spin in SpinChannel::BOTH {
        let comp = potential.component(spin);
        let r_max = comp.support_radius();
        if comp.is_zero() || r_max == 0.0 {
            continue;
        }
        let mut edges = vec![0.0];
        edges.extend(comp.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_max));
        edges.push(r_max);
        let k = spin.index();
        let mut acc = C64::new(0.0, 0.0);
        for (r, dr) in radial_cells(&edges, n, 1.0 / (1.0 - alpha.nu(spin))) {
            let v = comp.value(r);
            for j in 0..n {
                let theta = -PI + (j as f64 + 0.5) * dth;
                let d = d_matrix(alpha, PolarPoint::new(r, theta)?)?[(k, k)];
                acc += d * v * d.conj() * (r * dr * dth);
            }
        }
        u[(k, k)] = acc;
    }
    Ok(CouplingMatrix { u, w_eps: None })
}

/// Midpoints and effective widths of the radial cells of [`brute_u`]. The
/// innermost segment `[0, b]` uses the midpoint rule in `t`, `r = b t^q`.
fn radial_cells(edges: &[f64], n: usize, q: f64) -> Vec<(f64, f64)> {
    let span = edges[edges.len() - 1] - edges[0];
    let mut out = Vec::with_capacity(n + edges.len());
    for (s, e) in edges.windows(2).enumerate() {
        let len = e[1] - e[0];
        let count = ((n as f64 * len / span).round() as usize).max(4);
        if s == 0 {
            let dt = 1.0 / count as f64;
            for k in 0..count {
                let t = (k as f64 + 0.5) * dt;
                out.push((e[1] * t.powf(q), q * e[1] * t.powf(q - 1.0) * dt));
            }
        } else {
            let h = len / count as f64;
            out.extend((0..count).map(|k| (e[0] + (k as f64 + 0.5) * h, h)));
        }
    }
    out
}

/// Boundary condition at `r_min` selecting the admitted power `f ~ r^{-mu}` or `r^{mu}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialBoundary {
    Maximal,
    Friedrichs,
}

/// Log-spaced radial nodes for [`radial_fd_ground_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid1D {
    pub r_min: f64,
    pub r_max: f64,
    /// Number of intervals; nodes are `r_min e^{k h}`, `k = 0..=count`.
    pub count: usize,
    pub boundary: RadialBoundary,
}

impl Default for RadialGrid1D {
    fn default() -> Self {
        Self { r_min: 1e-4, r_max: 1e4, count: 4000, boundary: RadialBoundary::Maximal }
    }
}

impl RadialGrid1D {
    pub fn new(r_min: f64, r_max: f64, count: usize, boundary: RadialBoundary) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return domain(format!("need 0 < r_min < r_max, got {r_min}, {r_max}"));
        }
        if count < 8 {
            return domain("need at least 8 intervals");
        }
        Ok(Self { r_min, r_max, count, boundary })
    }

    pub fn with_boundary(mut self, boundary: RadialBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = (self.r_max / self.r_min).ln() / self.count as f64;
        (0..=self.count).map(|k| self.r_min * (k as f64 * h).exp()).collect()
    }
}

/// Lowest eigenvalue below zero of `-u'' + ((mu^2 - 1/4)/r^2) u + eps v u` on the
/// grid, `u = sqrt(r) f`, `mu = alpha.nu(spin)`, with `u'/u = (1/2 -+ mu)/r_min`
/// at `r_min` and Dirichlet at `r_max`.
///
/// The three-point scheme is written for `g = r^mu f`, in which the form reads
/// `int r^{1 - 2 mu} (|g'|^2 + eps v |g|^2) dr` plus `2 mu r_min^{-2 mu} |g(r_min)|^2`
/// for the Friedrichs condition; the maximal condition is `g'(r_min) = 0`.
/// Working with `u` directly loses all digits for `mu > 1/2`, where `u` blows up
/// at `r_min` and the gradient and boundary terms cancel. Coefficients are exact
/// cell integrals of the weight, the matrix is symmetric in the lumped mass inner
/// product and the lowest eigenvalue comes from Sturm bisection. The matrix
/// entries grow like `r_min^{-2} h^{-2}`; below `r_min ~ 1e-6` bisection in
/// double precision no longer resolves small `|z|`.
pub fn radial_fd_ground_state(
    alpha: FluxAlpha,
    eps: f64,
    component: &PotentialComponent,
    spin: SpinChannel,
    grid: &RadialGrid1D,
) -> Result<BoundState> {
    if !component.is_real() {
        return Err(Error::Unsupported("the radial solver needs a real potential".into()));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return domain(format!("coupling must be finite and >= 0, got {eps}"));
    }
    let grid = RadialGrid1D::new(grid.r_min, grid.r_max, grid.count, grid.boundary)?;
    let mu = alpha.nu(spin);
    let r = grid.nodes();
    let n = grid.count; // unknowns g_0 .. g_{n-1}; g_n = 0
    let weight = |r: f64| r.powf(1.0 - 2.0 * mu);
    // int_a^b r^{1 - 2 mu} dr
    let weight_integral = |a: f64, b: f64| (b.powf(2.0 - 2.0 * mu) - a.powf(2.0 - 2.0 * mu)) / (2.0 - 2.0 * mu);
    let gl = gauss_legendre(6, 0.0, 1.0);
    let weighted_v = |a: f64, b: f64| -> f64 {
        // cells may straddle a jump of v; split at the breakpoints inside
        let mut cuts = vec![a];
        cuts.extend(component.breakpoints().into_iter().filter(|&p| p > a && p < b));
        cuts.push(b);
        cuts.windows(2)
            .map(|c| {
                let len = c[1] - c[0];
                gl.iter()
                    .map(|&(x, w)| {
                        let s = c[0] + x * len;
                        w * weight(s) * component.value(s).re
                    })
                    .sum::<f64>()
                    * len
            })
            .sum()
    };
    // flux coefficient h / int dr / p, exact for (p g')' = 0
    let stiff: Vec<f64> = r.windows(2).map(|w| 2.0 * mu / (w[1].powf(2.0 * mu) - w[0].powf(2.0 * mu))).collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut mass = vec![0.0; n];
    for i in 0..n {
        // under the maximal condition g is flat below r_min, so the first cell reaches the origin
        let lo = match (i, grid.boundary) {
            (0, RadialBoundary::Maximal) => 0.0,
            (0, RadialBoundary::Friedrichs) => r[0],
            _ => 0.5 * (r[i - 1] + r[i]),
        };
        let hi = 0.5 * (r[i] + r[i + 1]);
        mass[i] = weight_integral(lo, hi);
        let mut k = eps * weighted_v(lo, hi) + stiff[i];
        if i == 0 {
            if grid.boundary == RadialBoundary::Friedrichs {
                k += 2.0 * mu * grid.r_min.powf(-2.0 * mu);
            }
        } else {
            k += stiff[i - 1];
        }
        diag[i] = k;
        if i + 1 < n {
            off[i] = -stiff[i];
        }
    }
    // symmetric form M^{-1/2} K M^{-1/2}
    for i in 0..n {
        diag[i] /= mass[i];
        if i + 1 < n {
            off[i] /= (mass[i] * mass[i + 1]).sqrt();
        }
    }
    if sturm_count(&diag, &off, 0.0) == 0 {
        return Ok(BoundState::NoEigenvalue);
    }
    let floor = (0..n)
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let u = if i + 1 < n { off[i].abs() } else { 0.0 };
            diag[i] - l - u
        })
        .fold(f64::INFINITY, f64::min);
    // bisect in ln(-x) between a tiny energy and the Gershgorin floor
    let mut a = (1e-300f64).ln();
    let mut b = (-floor).max(1e-300).ln() + 1.0;
    while b - a > 1e-13 * b.abs().max(1.0) {
        let c = 0.5 * (a + b);
        if sturm_count(&diag, &off, -c.exp()) >= 1 {
            a = c;
        } else {
            b = c;
        }
    }
    Ok(BoundState::Found(-(0.5 * (a + b)).exp()))
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
        q = diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The cutoff `xi(t) = psi(2 - t) / (psi(2 - t) + psi(t - 1))`, `psi(x) = e^{-1/x}` for `x > 0`:
/// smooth, `1` on `[0, 1]`, `0` on `[2, inf)`. Returns `xi'(t)`.
pub fn cutoff_derivative(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        return 0.0;
    }
    let (x, y) = (2.0 - t, t - 1.0);
    let (a, b) = ((-1.0 / x).exp(), (-1.0 / y).exp());
    -a * b * (1.0 / (x * x) + 1.0 / (y * y)) / ((a + b) * (a + b))
}

/// Form values of the cut-off virtual states and their log-log slope.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffDecay {
    pub n: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
}

/// `2 pi int_n^{2n} r^{2 alpha - 1} |xi'(r/n)|^2 / n^2 dr` for spin plus and
/// `2 pi int_n^{2n} r^{1 - 2 alpha} |xi'(r/n)|^2 / n^2 dr` for spin minus, for each `n`.
pub fn cutoff_form_decay(alpha: FluxAlpha, spin: SpinChannel, n_list: &[f64]) -> Result<CutoffDecay> {
    if n_list.is_empty() || n_list.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        return domain("n_list must hold positive values");
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain("n_list must be increasing");
    }
    let a = alpha.value();
    let power = match spin {
        SpinChannel::Plus => 2.0 * a - 1.0,
        SpinChannel::Minus => 1.0 - 2.0 * a,
    };
    let opts = GkOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 200 };
    let values = n_list
        .iter()
        .map(|&n| {
            let f = |r: f64| r.powf(power) * cutoff_derivative(r / n).powi(2) / (n * n);
            Ok(TAU * gauss_kronrod_real(f, n, 2.0 * n, opts)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = if n_list.len() < 2 {
        f64::NAN
    } else {
        let xs: Vec<f64> = n_list.iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        least_squares_slope(&xs, &ys)
    };
    Ok(CutoffDecay { n: n_list.to_vec(), values, slope })
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsolver::RadialTerm;
    use crate::weakcoupling::compute_u;

    fn al(a: f64) -> FluxAlpha {
        FluxAlpha::new(a).unwrap()
    }

    fn disk(amp: f64) -> PotentialComponent {
        PotentialComponent::new(vec![RadialTerm::disk(1.0, C64::new(amp, 0.0)).unwrap()])
    }

    #[test]
    fn residue_identity_holds() {
        assert!(residue_residual(al(0.3), 1.0).unwrap() <= 1e-10);
        assert!(residue_residual(al(0.7), -2.0).unwrap() <= 1e-10);
        assert!(residue_residual(al(0.5), 4.0).unwrap() <= 1e-10);
        assert!(residue_residual(al(0.5), PI).is_err());
        assert!(residue_residual(al(0.5), 7.0).is_err());
    }

    #[test]
    fn kk_residual_order() {
        // residual ~ |z|^{1 - nu}: alpha for plus, 1 - alpha for minus
        for (spin, want) in [(SpinChannel::Plus, 0.3), (SpinChannel::Minus, 0.7)] {
            let zs = [1e-4, 1e-6, 1e-8];
            let ys: Vec<f64> =
                zs.iter().map(|&z| kk_product_residual(al(0.3), -z, 1.0, 2.0, spin).unwrap().ln()).collect();
            let xs: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
            let s = least_squares_slope(&xs, &ys);
            assert!((s - want).abs() < 0.1 * want, "{spin:?}: slope {s}");
        }
        let r = kk_product_residual(al(0.3), -1e-6, 1.0, 2.0, SpinChannel::Minus).unwrap();
        assert!(r <= (1e-6f64).powf(0.3));
    }

    #[test]
    fn kk_symmetric_at_half() {
        for z in [-1e-3, -1e-6] {
            let p = kk_product_residual(al(0.5), z, 0.5, 1.5, SpinChannel::Plus).unwrap();
            let m = kk_product_residual(al(0.5), z, 0.5, 1.5, SpinChannel::Minus).unwrap();
            assert_eq!(p, m);
        }
    }

    #[test]
    fn continuity_across_the_cut() {
        let z = SpectralParameter::real(-1.0).unwrap();
        let g = GreenFunction::new(al(0.3), z).friedrichs_relative(1.0, 1.5, PI - 1e-4).unwrap().norm();
        let d1 = continuity_gap(al(0.3), z, 1.0, 1.5, 1e-4).unwrap();
        let d2 = continuity_gap(al(0.3), z, 1.0, 1.5, 1e-5).unwrap();
        assert!(d1 <= 1e-3 * g, "{d1} vs {g}");
        assert!((d1 / d2 - 10.0).abs() < 1.0, "gap ratio {}", d1 / d2);
    }

    #[test]
    fn channel_coefficients() {
        let a = al(0.3);
        assert!(connection_residual(a, -1.0, 0.8, 1.3, SpinChannel::Minus, 0, 256).unwrap() <= 1e-8);
        assert!(connection_residual(a, -1.0, 0.8, 1.3, SpinChannel::Plus, -1, 256).unwrap() <= 1e-8);
        assert!(connection_residual(a, -1.0, 0.8, 1.3, SpinChannel::Plus, 2, 256).unwrap() <= 1e-8);
    }

    #[test]
    fn brute_u_for_disks() {
        let d = PotentialSpec::both(disk(-1.0));
        let u = brute_u(al(0.5), &d, 512).unwrap().u;
        assert!((u[(0, 0)].re + 1.0).abs() < 1e-4 && (u[(1, 1)].re + 1.0).abs() < 1e-4, "{u}");
        assert!(u[(0, 1)].norm() < 1e-12);
        let d = PotentialSpec::new(PotentialComponent::zero(), disk(-1.0));
        let u = brute_u(al(0.25), &d, 512).unwrap().u;
        assert!((u[(1, 1)].re + 1.3945).abs() < 1e-3, "{u}");
        assert_eq!(u[(0, 0)], C64::new(0.0, 0.0));
        let zero = PotentialSpec::new(PotentialComponent::zero(), PotentialComponent::zero());
        assert_eq!(brute_u(al(0.3), &zero, 64).unwrap().u, Matrix2::zeros());
        assert!(brute_u(al(0.3), &zero, 10).is_err());
    }

    #[test]
    fn brute_u_agrees_with_quadrature() {
        let g = PotentialComponent::new(vec![RadialTerm::gaussian(0.8, C64::new(-1.0, 0.0)).unwrap()]);
        let v = PotentialSpec::new(g.clone(), disk(-0.5));
        let a = al(0.3);
        let exact = compute_u(a, &v).unwrap().u;
        let err = |n| (brute_u(a, &v, n).unwrap().u - exact).norm() / exact.norm();
        let (e256, e512) = (err(256), err(512));
        assert!(e512 <= 1e-5, "{e512}");
        // second order once the weight is graded away
        assert!((3.5..4.5).contains(&(e256 / e512)), "ratio {}", e256 / e512);
    }

    #[test]
    fn radial_fd_disk() {
        let a = al(0.5);
        let grid = RadialGrid1D::default();
        let z = radial_fd_ground_state(a, 0.1, &disk(-1.0), SpinChannel::Minus, &grid).unwrap().value().unwrap();
        assert!((-0.013..=-0.008).contains(&z), "{z}");
        let fr = grid.with_boundary(RadialBoundary::Friedrichs);
        assert_eq!(
            radial_fd_ground_state(a, 0.1, &disk(-1.0), SpinChannel::Minus, &fr).unwrap(),
            BoundState::NoEigenvalue
        );
        let z2 = radial_fd_ground_state(a, 0.05, &disk(-1.0), SpinChannel::Minus, &grid).unwrap().value().unwrap();
        assert!((z2 / z - 0.25).abs() < 0.025, "ratio {}", z2 / z);
        assert_eq!(
            radial_fd_ground_state(a, 0.1, &disk(1.0), SpinChannel::Minus, &grid).unwrap(),
            BoundState::NoEigenvalue
        );
    }

    #[test]
    fn radial_fd_refinement() {
        let a = al(0.5);
        let coarse = RadialGrid1D::default();
        let fine = RadialGrid1D { count: 2 * coarse.count, ..coarse };
        let z1 = radial_fd_ground_state(a, 0.1, &disk(-1.0), SpinChannel::Plus, &coarse).unwrap().value().unwrap();
        let z2 = radial_fd_ground_state(a, 0.1, &disk(-1.0), SpinChannel::Plus, &fine).unwrap().value().unwrap();
        assert!(((z1 - z2) / z2).abs() <= 0.02);
    }

    #[test]
    fn sturm_counts_known_spectrum() {
        // tridiag(-1, 2, -1) of size 4: 2 - 2 cos(k pi / 5)
        let d = [2.0; 4];
        let e = [-1.0; 3];
        for k in 1..=4 {
            let ev = 2.0 - 2.0 * (k as f64 * PI / 5.0).cos();
            assert_eq!(sturm_count(&d, &e, ev - 1e-9), k - 1);
            assert_eq!(sturm_count(&d, &e, ev + 1e-9), k);
        }
    }

    #[test]
    fn cutoff_shape_and_slopes() {
        assert_eq!(cutoff_derivative(0.5), 0.0);
        assert_eq!(cutoff_derivative(2.5), 0.0);
        assert!(cutoff_derivative(1.5) < 0.0);
        // xi' integrates to -1
        let total = gauss_kronrod_real(cutoff_derivative, 1.0, 2.0, GkOptions::default()).unwrap();
        assert!((total + 1.0).abs() < 1e-12);
        let ns = [10.0, 20.0, 40.0, 80.0];
        for a in [0.3, 0.5, 0.7] {
            let p = cutoff_form_decay(al(a), SpinChannel::Plus, &ns).unwrap();
            let m = cutoff_form_decay(al(a), SpinChannel::Minus, &ns).unwrap();
            assert!((p.slope - (2.0 * a - 2.0)).abs() < 1e-8);
            assert!((m.slope + 2.0 * a).abs() < 1e-8);
        }
        assert!(cutoff_form_decay(al(0.3), SpinChannel::Plus, &[2.0, 1.0]).is_err());
    }
}
