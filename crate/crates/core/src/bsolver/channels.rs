//! Radial channel kernels `g_m(r, r')` and the channel form of the
//! Birman–Schwinger matrix.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bsolver::grid::QuadGrid;
use crate::bsolver::kernel::{ChannelBlock, KernelLayout, KernelMatrix};
use crate::bsolver::potential::{polar_factors, PotentialSpec};
use crate::error::{domain, Result};
use crate::greenfn::{mode_order, FluxAlpha, SpectralParameter, SpinChannel};
use crate::quad::{gauss_kronrod_real, GkOptions};
use crate::specfun::{i_scaled, k_ladder_scaled, k_minus_leading};

/// Which part of the channel kernel to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Full,
    /// Critical channel with the leading `(-z r r'/4)^{-nu}` term removed; other channels unchanged.
    Regular,
}

/// Scaled Bessel data on the radial nodes at fixed `kappa`.
struct NodeTables {
    x: Vec<f64>,
    /// `ln(x/2)`
    lh: Vec<f64>,
    /// `K_{alpha + k}(x) (x/2)^{alpha + k} e^x`
    k_up: Vec<Vec<f64>>,
    /// `K_{1 - alpha + k}(x) (x/2)^{1 - alpha + k} e^x`
    k_down: Vec<Vec<f64>>,
}

impl NodeTables {
    fn new(alpha: FluxAlpha, kappa: f64, r: &[f64], levels: usize) -> Self {
        let a = alpha.value();
        let x: Vec<f64> = r.iter().map(|&r| kappa * r).collect();
        let lh = x.iter().map(|&x| (0.5 * x).ln()).collect();
        let k_up = x.iter().map(|&x| k_ladder_scaled(a, levels, x)).collect();
        let k_down = x.iter().map(|&x| k_ladder_scaled(1.0 - a, levels, x)).collect();
        Self { x, lh, k_up, k_down }
    }

    fn k_scaled(&self, m: i32, i: usize) -> f64 {
        if m >= 0 {
            self.k_up[i][m as usize]
        } else {
            self.k_down[i][(-m - 1) as usize]
        }
    }
}

fn kappa_of(z: SpectralParameter) -> Result<f64> {
    if !z.is_real() {
        return domain("radial channel kernels need a real negative spectral parameter");
    }
    Ok(z.kappa().re)
}

/// Mode data shared by every kernel entry.
struct ModeData {
    nu: f64,
    critical: bool,
    kind: KernelKind,
    gamma_nu: f64,
    sin_nu: f64,
}

impl ModeData {
    fn new(alpha: FluxAlpha, spin: SpinChannel, m: i32, kind: KernelKind) -> Self {
        let nu = mode_order(alpha, m);
        Self {
            nu,
            critical: spin.critical_mode() == m,
            kind,
            gamma_nu: statrs::function::gamma::gamma(nu),
            sin_nu: (PI * nu).sin(),
        }
    }

    /// Order of the `I` factor at the smaller radius.
    fn i_order(&self) -> f64 {
        if self.critical {
            -self.nu
        } else {
            self.nu
        }
    }

    /// `g(r_<, r_>)` from `x = kappa r`, `lh = ln(x/2)`, the scaled `I` of
    /// order [`Self::i_order`] at `x_<` and the scaled `K_nu` at `x_>`.
    /// `i_reg` is the scaled `I_nu(x_<)`, needed by the regular critical kernel.
    fn entry(&self, (xl, ll, il): (f64, f64, f64), (xg, lg, kg): (f64, f64, f64), i_reg: f64) -> f64 {
        let nu = self.nu;
        if !self.critical {
            return il * kg * (nu * (ll - lg) + xl - xg).exp();
        }
        let full = il * kg * (-nu * (ll + lg) + xl - xg).exp();
        if self.kind == KernelKind::Full {
            return full;
        }
        let a0 = |lh: f64| 0.5 * self.gamma_nu * (-nu * lh).exp();
        if xl <= 2.0 {
            // I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu with K = A0 + delta
            let ik = i_reg * kg * (nu * (ll - lg) + xl - xg).exp();
            let dl = k_minus_leading(nu, xl);
            let kbig = kg * (-xg - nu * lg).exp();
            let dg = if xg <= 2.0 { k_minus_leading(nu, xg) } else { kbig - a0(lg) };
            ik + (2.0 * self.sin_nu / PI) * (dl * kbig + a0(ll) * dg)
        } else {
            full - self.gamma_nu * self.gamma_nu * self.sin_nu / (2.0 * PI) * (-nu * (ll + lg)).exp()
        }
    }
}

/// Matrix `g(r_i, r_j)` of mode `m` on the given nodes (no `1/2pi`).
fn channel_kernel(alpha: FluxAlpha, tables: &NodeTables, spin: SpinChannel, m: i32, kind: KernelKind) -> DMatrix<f64> {
    let n = tables.x.len();
    let md = ModeData::new(alpha, spin, m, kind);
    let i_small: Vec<f64> = tables.x.iter().map(|&x| i_scaled(md.i_order(), x)).collect();
    let i_reg: Vec<f64> = if md.critical && kind == KernelKind::Regular {
        tables.x.iter().map(|&x| i_scaled(md.nu, x)).collect()
    } else {
        vec![0.0; n]
    };
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let lo = (tables.x[i], tables.lh[i], i_small[i]);
            let hi = (tables.x[j], tables.lh[j], tables.k_scaled(m, j));
            let v = md.entry(lo, hi, i_reg[i]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Regular kernel of one mode at a single pair of radii.
struct PointKernel {
    md: ModeData,
    kappa: f64,
    base: f64,
    idx: usize,
}

impl PointKernel {
    fn new(alpha: FluxAlpha, kappa: f64, spin: SpinChannel, m: i32) -> Self {
        let (base, idx) = if m >= 0 { (alpha.value(), m as usize) } else { (1.0 - alpha.value(), (-m - 1) as usize) };
        Self { md: ModeData::new(alpha, spin, m, KernelKind::Regular), kappa, base, idx }
    }

    /// `(x, ln(x/2), scaled I, scaled I_nu)` at the smaller radius.
    fn lower(&self, r: f64) -> (f64, f64, f64, f64) {
        let x = self.kappa * r;
        let i_reg = if self.md.critical { i_scaled(self.md.nu, x) } else { 0.0 };
        (x, (0.5 * x).ln(), i_scaled(self.md.i_order(), x), i_reg)
    }

    /// `(x, ln(x/2), scaled K)` at the larger radius.
    fn upper(&self, r: f64) -> (f64, f64, f64) {
        let x = self.kappa * r;
        (x, (0.5 * x).ln(), k_ladder_scaled(self.base, self.idx, x)[self.idx])
    }
}

/// Diagonal correction `c_i = int_0^R g(r_i, s) s ds - sum_j w_j r_j g(r_i, r_j)`.
///
/// Adding `c_i phi(r_i)` to the Nyström sum is singularity subtraction for
/// the derivative jump of `g` at `r = r'`. Only the regular kernel has the
/// jump, so `g_reg` is the [`KernelKind::Regular`] matrix; the row integral
/// is done adaptively on `[0, r_i]` and `[r_i, R]`.
fn kink_correction(
    alpha: FluxAlpha,
    kappa: f64,
    grid: &QuadGrid,
    spin: SpinChannel,
    m: i32,
    g_reg: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let pk = PointKernel::new(alpha, kappa, spin, m);
    let opts = GkOptions { abs_tol: 0.0, rel_tol: 1e-9, max_intervals: 400 };
    (0..grid.n_r())
        .map(|i| {
            let ri = grid.r[i];
            let (x, lh, il, ir) = pk.lower(ri);
            let up = pk.upper(ri);
            let left = |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                let (xs, ls, is, rs) = pk.lower(s);
                pk.md.entry((xs, ls, is), up, rs) * s
            };
            let right = |s: f64| pk.md.entry((x, lh, il), pk.upper(s), ir) * s;
            let exact = gauss_kronrod_real(left, 0.0, ri, opts)? + gauss_kronrod_real(right, ri, grid.r_max, opts)?;
            let discrete: f64 = (0..grid.n_r()).map(|j| grid.w[j] * grid.r[j] * g_reg[(i, j)]).sum();
            Ok(exact - discrete)
        })
        .collect()
}

/// Kink correction of mode `m`, reusing `g` when it already is the regular kernel.
fn correction_for(
    alpha: FluxAlpha,
    kappa: f64,
    tables: &NodeTables,
    grid: &QuadGrid,
    spin: SpinChannel,
    m: i32,
    g: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    if spin.critical_mode() == m {
        let g_reg = channel_kernel(alpha, tables, spin, m, KernelKind::Regular);
        kink_correction(alpha, kappa, grid, spin, m, &g_reg)
    } else {
        kink_correction(alpha, kappa, grid, spin, m, g)
    }
}

/// Kink corrections `c_i` of the given modes at real `z < 0`, one vector per mode.
pub(crate) fn mode_corrections(
    alpha: FluxAlpha,
    z: SpectralParameter,
    spin: SpinChannel,
    modes: &[i32],
    grid: &QuadGrid,
) -> Result<Vec<Vec<f64>>> {
    let kappa = kappa_of(z)?;
    let levels = modes.iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0) + 1;
    let t = NodeTables::new(alpha, kappa, &grid.r, levels);
    modes
        .iter()
        .map(|&m| {
            let g = channel_kernel(alpha, &t, spin, m, KernelKind::Full);
            correction_for(alpha, kappa, &t, grid, spin, m, &g)
        })
        .collect()
}

/// Symmetrised channel matrix `eps sqrt(r_i w_i) a_i g(r_i, r_j) b_j sqrt(r_j w_j)`.
fn weighted(
    eps: f64,
    g: &DMatrix<f64>,
    sa: &[f64],
    sb: &[Complex64],
    v: &[Complex64],
    corr: &[f64],
) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| sb[j] * (eps * sa[i] * g[(i, j)]));
    for i in 0..g.nrows() {
        out[(i, i)] += v[i] * (eps * corr[i]);
    }
    out
}

/// `sqrt(r w) a`, `sqrt(r w) b` and `v = b a` on the nodes for one spin component.
fn node_factors(
    potential: &PotentialSpec,
    spin: SpinChannel,
    grid: &QuadGrid,
) -> (Vec<f64>, Vec<Complex64>, Vec<Complex64>) {
    let f = polar_factors(potential);
    let mut sa = Vec::with_capacity(grid.n_r());
    let mut sb = Vec::with_capacity(grid.n_r());
    let mut v = Vec::with_capacity(grid.n_r());
    for (&r, &w) in grid.r.iter().zip(&grid.w) {
        let (a, b) = f.at(spin, r);
        let s = (r * w).sqrt();
        sa.push(s * a);
        sb.push(b * s);
        v.push(b * a);
    }
    (sa, sb, v)
}

/// Raw channel operator matrix `sqrt(r_i w_i) g(r_i, r_j) sqrt(r_j w_j)` without
/// potential factors, with the kink correction on its diagonal.
pub fn channel_operator(
    alpha: FluxAlpha,
    z: SpectralParameter,
    spin: SpinChannel,
    m: i32,
    grid: &QuadGrid,
    kind: KernelKind,
) -> Result<DMatrix<f64>> {
    let kappa = kappa_of(z)?;
    let t = NodeTables::new(alpha, kappa, &grid.r, m.unsigned_abs() as usize + 1);
    let g = channel_kernel(alpha, &t, spin, m, kind);
    let s: Vec<f64> = grid.r.iter().zip(&grid.w).map(|(r, w)| (r * w).sqrt()).collect();
    let mut out = DMatrix::from_fn(grid.n_r(), grid.n_r(), |i, j| s[i] * g[(i, j)] * s[j]);
    for (i, c) in correction_for(alpha, kappa, &t, grid, spin, m, &g)?.into_iter().enumerate() {
        out[(i, i)] += c;
    }
    Ok(out)
}

/// Kernel values `g(r_i, r_j)` at arbitrary ascending radii.
#[cfg(test)]
pub(crate) fn kernel_values(
    alpha: FluxAlpha,
    z: SpectralParameter,
    spin: SpinChannel,
    m: i32,
    r: &[f64],
    kind: KernelKind,
) -> Result<DMatrix<f64>> {
    let t = NodeTables::new(alpha, kappa_of(z)?, r, m.unsigned_abs() as usize + 1);
    Ok(channel_kernel(alpha, &t, spin, m, kind))
}

/// Hilbert–Schmidt norm of `A G_reg B` over the channels `|m| <= m_max`
/// (critical channels with the leading term removed), from the plain node values.
pub fn regular_hs_norm(
    alpha: FluxAlpha,
    z: SpectralParameter,
    potential: &PotentialSpec,
    grid: &QuadGrid,
) -> Result<f64> {
    let kappa = kappa_of(z)?;
    let mm = grid.m_max as i32;
    let t = NodeTables::new(alpha, kappa, &grid.r, grid.m_max + 1);
    let mut sq = 0.0;
    for spin in SpinChannel::BOTH {
        if potential.component(spin).is_zero() {
            continue;
        }
        let (sa, sb, _) = node_factors(potential, spin, grid);
        for m in -mm..=mm {
            let g = channel_kernel(alpha, &t, spin, m, KernelKind::Regular);
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    sq += (sa[i] * g[(i, j)] * sb[j].norm()).powi(2);
                }
            }
        }
    }
    Ok(sq.sqrt())
}

fn sign_of(potential: &PotentialSpec, spin: SpinChannel) -> Option<f64> {
    potential.component(spin).uniform_sign()
}

/// One radial channel in one spin block.
pub fn assemble_bs_radial_channel(
    alpha: FluxAlpha,
    z: SpectralParameter,
    eps: f64,
    potential: &PotentialSpec,
    m: i32,
    spin: SpinChannel,
    grid: &QuadGrid,
) -> Result<KernelMatrix> {
    let kappa = kappa_of(z)?;
    let t = NodeTables::new(alpha, kappa, &grid.r, m.unsigned_abs() as usize + 1);
    let (sa, sb, v) = node_factors(potential, spin, grid);
    let g = channel_kernel(alpha, &t, spin, m, KernelKind::Full);
    let corr = correction_for(alpha, kappa, &t, grid, spin, m, &g)?;
    let matrix = weighted(eps, &g, &sa, &sb, &v, &corr);
    let mut hermitian_sign = [None, None];
    hermitian_sign[spin.index()] = sign_of(potential, spin);
    Ok(KernelMatrix {
        alpha,
        z,
        eps,
        layout: KernelLayout::Channels(vec![ChannelBlock { spin, m, matrix }]),
        hermitian_sign,
    })
}

/// All channels `|m| <= grid.m_max` of the requested spin blocks. Components
/// that vanish identically contribute no blocks.
pub fn assemble_bs_channels(
    alpha: FluxAlpha,
    z: SpectralParameter,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spins: &[SpinChannel],
) -> Result<KernelMatrix> {
    let kappa = kappa_of(z)?;
    let mm = grid.m_max as i32;
    let t = NodeTables::new(alpha, kappa, &grid.r, grid.m_max + 1);
    let mut blocks = Vec::new();
    let mut hermitian_sign = [None, None];
    for &spin in spins {
        if potential.component(spin).is_zero() {
            continue;
        }
        hermitian_sign[spin.index()] = sign_of(potential, spin);
        let (sa, sb, v) = node_factors(potential, spin, grid);
        for m in -mm..=mm {
            let g = channel_kernel(alpha, &t, spin, m, KernelKind::Full);
            let corr = correction_for(alpha, kappa, &t, grid, spin, m, &g)?;
            blocks.push(ChannelBlock { spin, m, matrix: weighted(eps, &g, &sa, &sb, &v, &corr) });
        }
    }
    Ok(KernelMatrix { alpha, z, eps, layout: KernelLayout::Channels(blocks), hermitian_sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsolver::grid::GridSettings;
    use crate::bsolver::potential::{PotentialComponent, RadialTerm};
    use crate::greenfn::channel_green;

    #[test]
    fn kernel_matches_plain_bessel_products() {
        let alpha = FluxAlpha::new(0.3).unwrap();
        let z = SpectralParameter::real(-2.0).unwrap();
        let r = [1e-3, 0.2, 1.1, 3.0, 9.0];
        for spin in SpinChannel::BOTH {
            for m in [-3, -1, 0, 2, 5] {
                let op = kernel_values(alpha, z, spin, m, &r, KernelKind::Full).unwrap();
                for i in 0..5 {
                    for j in 0..5 {
                        let want = channel_green(alpha, z, Some(spin), m, r[i], r[j]).unwrap().re;
                        let got = op[(i, j)];
                        assert!(
                            (got - want).abs() < 1e-12 * want.abs().max(1e-300),
                            "{spin:?} m={m} ({i},{j}) {got} {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn regular_kernel_removes_leading_term() {
        let alpha = FluxAlpha::new(0.25).unwrap();
        let r = [1e-4, 0.3, 1.0, 2.5, 7.0];
        for zv in [-1e-6, -0.3, -4.0] {
            let z = SpectralParameter::real(zv).unwrap();
            for spin in SpinChannel::BOTH {
                let m = spin.critical_mode();
                let nu = mode_order(alpha, m);
                let full = kernel_values(alpha, z, spin, m, &r, KernelKind::Full).unwrap();
                let reg = kernel_values(alpha, z, spin, m, &r, KernelKind::Regular).unwrap();
                let g = statrs::function::gamma::gamma(nu);
                for i in 0..5 {
                    for j in 0..5 {
                        let lead = 2.0 * PI * alpha.c_alpha() * g * g * (-zv * r[i] * r[j] / 4.0).powf(-nu);
                        let diff = full[(i, j)] - reg[(i, j)];
                        assert!(
                            (diff - lead).abs() < 1e-10 * lead.max(full[(i, j)].abs()),
                            "z={zv} {spin:?} ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tiny_kappa_stays_finite() {
        let alpha = FluxAlpha::new(0.5).unwrap();
        let z = SpectralParameter::real(-1e-200).unwrap();
        let v = PotentialSpec::both(PotentialComponent::new(vec![
            RadialTerm::disk(1.0, Complex64::new(-1.0, 0.0)).unwrap()
        ]));
        let grid = QuadGrid::for_potential(&v, GridSettings { n_r: 24, ..Default::default() }).unwrap();
        let k = assemble_bs_channels(alpha, z, 0.1, &v, &grid, &SpinChannel::BOTH).unwrap();
        let mu = k.min_real_eigenvalue(SpinChannel::Minus).unwrap().unwrap();
        assert!(mu.is_finite() && mu < -1e40);
    }

    #[test]
    fn vanishing_potential_gives_no_blocks() {
        let alpha = FluxAlpha::new(0.4).unwrap();
        let z = SpectralParameter::real(-1.0).unwrap();
        let v = PotentialSpec::default();
        let grid = QuadGrid::radial(&[], 3.0, GridSettings { n_r: 12, ..Default::default() });
        let k = assemble_bs_channels(alpha, z, 1.0, &v, &grid, &SpinChannel::BOTH).unwrap();
        assert_eq!(k.dim(), 0);
        let one = assemble_bs_radial_channel(alpha, z, 1.0, &v, 0, SpinChannel::Minus, &grid).unwrap();
        assert!(one.to_dense().iter().all(|e| *e == Complex64::new(0.0, 0.0)));
    }
}
