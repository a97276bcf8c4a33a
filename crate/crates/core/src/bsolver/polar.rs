//! Nyström discretisation of the Birman–Schwinger operator on the polar product grid.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bsolver::channels::mode_corrections;
use crate::bsolver::grid::QuadGrid;
use crate::bsolver::kernel::{CirculantBlock, KernelLayout, KernelMatrix};
use crate::bsolver::potential::{polar_factors, PotentialSpec};
use crate::error::{domain, Result};
use crate::greenfn::{FluxAlpha, GreenFunction, GreenOptions, SpectralParameter, SpinChannel};
use crate::specfun::EULER_GAMMA;

/// `-(1/4pi) ln(r^2 + r'^2 - 2 r r' cos phi)`, the logarithmic part of `K_0(kappa |x - x'|) / 2pi`.
fn log_kernel(r: f64, rp: f64, phi: f64) -> f64 {
    let (hi, lo) = if r >= rp { (r, rp) } else { (rp, r) };
    let rho = lo / hi;
    // written in rho to keep precision when the points nearly coincide
    let q = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * (0.5 * phi).sin().powi(2);
    -(2.0 * hi.ln() + q.ln()) / (4.0 * PI)
}

/// Values at `phi_d = 2 pi d / n` of the degree-`n/2` trigonometric interpolant whose
/// Fourier coefficients are the exact integrals of [`log_kernel`] over `(-pi, pi]`:
/// `-ln r_>` for mode 0 and `rho^|k| / (2|k|)` otherwise.
fn log_kernel_band(r: f64, rp: f64, n: usize) -> Vec<f64> {
    let (hi, lo) = if r >= rp { (r, rp) } else { (rp, r) };
    let rho = lo / hi;
    let half = n / 2;
    let mut coef = Vec::with_capacity(half + 1);
    coef.push(-hi.ln());
    let mut p = 1.0;
    for k in 1..=half {
        p *= rho;
        let c = p / (2.0 * k as f64);
        coef.push(if k == half { c } else { 2.0 * c });
    }
    (0..=half)
        .map(|d| {
            let s: f64 = coef.iter().enumerate().map(|(k, c)| c * (TAU * (k * d) as f64 / n as f64).cos()).sum();
            s / TAU
        })
        .collect()
}

/// Angle difference of circulant index `d`; `d = n/2` is handled separately.
fn angle(d: usize, n: usize) -> f64 {
    TAU * d as f64 / n as f64
}

/// Two-dimensional Birman–Schwinger matrix for both spin blocks at real `z < 0`.
pub fn assemble_bs_2d(
    alpha: FluxAlpha,
    z: SpectralParameter,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
) -> Result<KernelMatrix> {
    assemble_polar(alpha, z, eps, potential, grid, &SpinChannel::BOTH, GreenOptions::default())
}

/// Polar-grid matrix restricted to the given spin blocks.
///
/// The gauge-free kernel `P(r, r', phi)` depends on the angle difference only,
/// so each spin block is block-circulant and only `i <= j`, `0 <= d <= n/2`
/// are evaluated. The logarithmic part of `K_0` is integrated exactly in the
/// angle (product integration through its Fourier series); the remainder is
/// smooth and taken at the nodes, with its limit on the coincident node.
/// Each angular mode then gets the radial kink correction of its channel.
pub fn assemble_polar(
    alpha: FluxAlpha,
    z: SpectralParameter,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spins: &[SpinChannel],
    opts: GreenOptions,
) -> Result<KernelMatrix> {
    if !z.is_real() {
        return domain("the polar Nyström path needs a real negative spectral parameter");
    }
    let nr = grid.n_r();
    let nt = grid.n_theta;
    let half = nt / 2;
    let h = grid.angular_weight();
    let green = GreenFunction::new(alpha, z).with_options(opts);
    let kappa = z.kappa().re;
    let active: Vec<SpinChannel> = spins.iter().copied().filter(|s| !potential.component(*s).is_zero()).collect();

    // P0 with its log part replaced by the band-limited exact one, on i <= j, d <= n/2; index [i][j - i][d]
    let p0: Vec<Vec<Vec<Complex64>>> = if active.is_empty() {
        Vec::new()
    } else {
        (0..nr)
            .into_par_iter()
            .map(|i| -> Result<Vec<Vec<Complex64>>> {
                let ri = grid.r[i];
                (i..nr)
                    .map(|j| {
                        let rj = grid.r[j];
                        (0..=half)
                            .map(|d| {
                                if i == j && d == 0 {
                                    return Ok(Complex64::new(0.0, 0.0));
                                }
                                if d == half {
                                    let v = green.gauge_free(ri, rj, PI - opts.phi_eps)?;
                                    return Ok(Complex64::new(v.re - log_kernel(ri, rj, PI), 0.0));
                                }
                                let phi = angle(d, nt);
                                Ok(green.gauge_free(ri, rj, phi)? - log_kernel(ri, rj, phi))
                            })
                            .zip(log_kernel_band(ri, rj, nt))
                            .map(|(v, band)| v.map(|v| v + band))
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    // coincident limit of P0 + (1/2pi) ln|x - x'|
    let log_const = (-(0.5 * kappa).ln() - EULER_GAMMA) / TAU;
    let smooth: Vec<Complex64> = if active.is_empty() {
        Vec::new()
    } else {
        grid.r.par_iter().map(|&r| Ok(green.coincident_smooth(r)? + log_const)).collect::<Result<_>>()?
    };

    let factors = polar_factors(potential);
    let mut blocks = Vec::new();
    let mut hermitian_sign = [None, None];
    for &spin in spins {
        hermitian_sign[spin.index()] = potential.component(spin).uniform_sign();
        let mut first = vec![DMatrix::<Complex64>::zeros(nr, nr); nt];
        if !active.contains(&spin) {
            blocks.push(CirculantBlock { spin, first });
            continue;
        }
        let (sa, sb): (Vec<f64>, Vec<Complex64>) = (0..nr)
            .map(|i| {
                let (a, b) = factors.at(spin, grid.r[i]);
                let s = (grid.w[i] * grid.r[i] * h).sqrt();
                (s * a, b * s)
            })
            .unzip();
        let rank: Vec<Vec<Complex64>> =
            (0..nr).map(|i| (i..nr).map(|j| green.rank_one(spin, grid.r[i], grid.r[j])).collect()).collect();
        for i in 0..nr {
            for j in i..nr {
                for d in 0..=half {
                    let phi = if d == half { PI } else { angle(d, nt) };
                    let p = if i == j && d == 0 {
                        p0[i][0][0] + smooth[i] + rank[i][0]
                    } else {
                        p0[i][j - i][d] + rank[i][j - i] * spin.phase(phi)
                    };
                    // symmetric in (r, r'), conjugate under phi -> -phi
                    first[d][(i, j)] = sb[j] * (p * (eps * sa[i]));
                    first[d][(j, i)] = sb[i] * (p * (eps * sa[j]));
                    if d != 0 && d != half {
                        let pc = p.conj();
                        first[nt - d][(i, j)] = sb[j] * (pc * (eps * sa[i]));
                        first[nt - d][(j, i)] = sb[i] * (pc * (eps * sa[j]));
                    }
                }
            }
        }
        // radial kink correction of each angular mode, moved to the circulant diagonals
        let modes: Vec<i32> = (0..nt).map(|k| if k < half { k as i32 } else { k as i32 - nt as i32 }).collect();
        let corr = mode_corrections(alpha, z, spin, &modes, grid)?;
        for (d, c) in first.iter_mut().enumerate() {
            for i in 0..nr {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, ck) in corr.iter().enumerate() {
                    acc += Complex64::from_polar(ck[i], TAU * ((k * d) % nt) as f64 / nt as f64);
                }
                let (a, b) = factors.at(spin, grid.r[i]);
                c[(i, i)] += b * a * eps * acc / nt as f64;
            }
        }
        blocks.push(CirculantBlock { spin, first });
    }
    Ok(KernelMatrix { alpha, z, eps, layout: KernelLayout::Polar { n_r: nr, n_theta: nt, blocks }, hermitian_sign })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_band_reproduces_smooth_samples() {
        // away from coincidence the interpolant converges to the kernel itself
        let (r, rp) = (1.0, 0.4);
        let n = 64;
        let band = log_kernel_band(r, rp, n);
        for (d, b) in band.iter().enumerate() {
            let want = log_kernel(r, rp, angle(d, n));
            assert!((b - want).abs() < 1e-14, "d={d}: {b} vs {want}");
        }
    }

    #[test]
    fn log_band_has_exact_mean() {
        // trapezoid mean of the band values equals the exact mean -ln r_> / 2pi, even at r = r'
        for (r, rp) in [(0.7, 0.7), (2.0, 1.9)] {
            let n = 32;
            let band = log_kernel_band(r, rp, n);
            let mut s = band[0] + band[n / 2];
            for b in &band[1..n / 2] {
                s += 2.0 * b;
            }
            let mean = s / n as f64;
            assert!((mean + r.max(rp).ln() / TAU).abs() < 1e-15);
        }
    }
}
