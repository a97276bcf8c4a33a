//! Weak-coupling coefficients `U`, `W(eps)` and the eigenvalue equation
//! `eps^2 c (-z)^{-1} + eps (a (-z)^{alpha-1} + b (-z)^{-alpha}) + 1 = 0`.
//!
//! Powers of `-z` are taken on the principal branch, `(-z)^beta = exp(beta Log(-z))`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::bsolver::{
    channel_operator, polar_factors, regular_hs_norm, GridSettings, KernelKind, PotentialSpec, QuadGrid,
};
use crate::error::{domain, Error, Result};
use crate::greenfn::{FluxAlpha, PolarPoint, SpectralParameter, SpinChannel};
use crate::quad::{gauss_kronrod, GkOptions};

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `D(w) = sqrt(C_alpha) diag(Gamma(1 - alpha) (|w|/2)^{alpha - 1} e^{i theta}, Gamma(alpha) (|w|/2)^{-alpha})`.
pub fn d_matrix(alpha: FluxAlpha, w: PolarPoint) -> Result<Matrix2<C64>> {
    if !(w.r > 0.0) {
        return domain("D(w) needs |w| > 0");
    }
    let mut d = Matrix2::zeros();
    for spin in SpinChannel::BOTH {
        let k = spin.index();
        let v = d_radial(alpha, spin, w.r);
        d[(k, k)] = match spin {
            SpinChannel::Plus => C64::from_polar(v, w.theta),
            SpinChannel::Minus => C64::new(v, 0.0),
        };
    }
    Ok(d)
}

/// Modulus of the diagonal entry of `D` for one spin.
fn d_radial(alpha: FluxAlpha, spin: SpinChannel, r: f64) -> f64 {
    let nu = alpha.nu(spin);
    alpha.c_alpha().sqrt() * statrs::function::gamma::gamma(nu) * (0.5 * r).powf(-nu)
}

/// Coefficients of the eigenvalue equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl Coefficients {
    /// Data of a diagonal matrix, `c = a b`.
    pub fn diagonal(a: C64, b: C64) -> Self {
        Self { a, b, c: a * b }
    }

    /// `c = a b` up to rounding: the equation factorizes.
    pub fn factorizes(&self) -> bool {
        let ab = self.a * self.b;
        (self.c - ab).norm() <= 1e-14 * self.c.norm().max(ab.norm())
    }

    /// `F(zeta)` at `zeta = -z`.
    pub fn residual(&self, alpha: FluxAlpha, eps: f64, zeta: C64) -> C64 {
        let a = alpha.value();
        let l = zeta.ln();
        eps * eps * self.c * (-l).exp() + eps * (self.a * ((a - 1.0) * l).exp() + self.b * (-a * l).exp()) + 1.0
    }
}

/// `U` and optionally `W(eps) = U + U_1(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub u: Matrix2<C64>,
    pub w_eps: Option<Matrix2<C64>>,
}

impl CouplingMatrix {
    /// `W(eps)` when present, otherwise `U`.
    pub fn effective(&self) -> Matrix2<C64> {
        self.w_eps.unwrap_or(self.u)
    }

    pub fn coefficients(&self) -> Coefficients {
        let w = self.effective();
        Coefficients { a: w[(0, 0)], b: w[(1, 1)], c: w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)] }
    }

    /// Frobenius norm of `U_1(eps)`.
    pub fn correction_norm(&self) -> f64 {
        self.w_eps.map_or(0.0, |w| (w - self.u).norm())
    }
}

/// `C_alpha Gamma(nu)^2 int v(w) (|w|/2)^{-2 nu} dw` for one diagonal entry.
fn coupling_entry(alpha: FluxAlpha, potential: &PotentialSpec, spin: SpinChannel) -> Result<C64> {
    let comp = potential.component(spin);
    let r_max = comp.support_radius();
    if comp.is_zero() || r_max == 0.0 {
        return Ok(ZERO);
    }
    let nu = alpha.nu(spin);
    // u = r^p with p = 2 - 2 nu turns r^{1 - 2 nu} dr into du / p
    let p = 2.0 - 2.0 * nu;
    let mut edges = vec![0.0];
    edges.extend(comp.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_max).map(|b| b.powf(p)));
    edges.push(r_max.powf(p));
    let opts = GkOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 };
    let mut total = ZERO;
    for e in edges.windows(2) {
        total += gauss_kronrod(|u| comp.value(u.powf(1.0 / p)), e[0], e[1], opts)?.value;
    }
    let g = statrs::function::gamma::gamma(nu);
    Ok(total * (alpha.c_alpha() * g * g * 2f64.powf(2.0 * nu) * TAU / p))
}

/// `U = int D(w) V(w) D(w)^* dw`; diagonal for diagonal `V`.
pub fn compute_u(alpha: FluxAlpha, potential: &PotentialSpec) -> Result<CouplingMatrix> {
    let mut u = Matrix2::zeros();
    for spin in SpinChannel::BOTH {
        let k = spin.index();
        u[(k, k)] = coupling_entry(alpha, potential, spin)?;
    }
    Ok(CouplingMatrix { u, w_eps: None })
}

/// `W(eps) = int D B (eps Q_z + 1)^{-1} A D^* dw` at real `z < 0`, with
/// `Q_z = A G_reg B` discretized on the critical channel of each spin.
///
/// Only the critical channel couples to `D`, so
/// `U_1 = -2 pi eps q^T (1 + eps M)^{-1} M p` with `M = A g_reg B` on the grid.
pub fn compute_w(
    alpha: FluxAlpha,
    eps: f64,
    z: SpectralParameter,
    potential: &PotentialSpec,
    grid: &QuadGrid,
) -> Result<CouplingMatrix> {
    if !z.is_real() {
        return domain("W(eps) is evaluated at real z < 0; pass -|z| for a complex root");
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return domain(format!("coupling must be finite and >= 0, got {eps}"));
    }
    let base = compute_u(alpha, potential)?;
    if eps == 0.0 {
        return Ok(CouplingMatrix { u: base.u, w_eps: Some(base.u) });
    }
    let norm = eps * regular_hs_norm(alpha, z, potential, grid)?;
    if norm >= 1.0 {
        return Err(Error::NeumannInvalid { norm });
    }
    let factors = polar_factors(potential);
    let n = grid.n_r();
    let mut w = base.u;
    for spin in SpinChannel::BOTH {
        if potential.component(spin).is_zero() {
            continue;
        }
        let s = channel_operator(alpha, z, spin, spin.critical_mode(), grid, KernelKind::Regular)?;
        let ab: Vec<(f64, C64)> = grid.r.iter().map(|&r| factors.at(spin, r)).collect();
        let m = DMatrix::from_fn(n, n, |i, j| ab[j].1 * (ab[i].0 * s[(i, j)]));
        let dw: Vec<f64> = (0..n).map(|i| (grid.r[i] * grid.w[i]).sqrt() * d_radial(alpha, spin, grid.r[i])).collect();
        let p = DVector::from_fn(n, |i, _| C64::new(dw[i] * ab[i].0, 0.0));
        let q = DVector::from_fn(n, |i, _| ab[i].1 * dw[i]);
        let lhs = DMatrix::identity(n, n) + &m * C64::new(eps, 0.0);
        let x = lhs.lu().solve(&(&m * &p)).ok_or_else(|| Error::Eigen("singular 1 + eps Q_z in W(eps)".into()))?;
        let k = spin.index();
        w[(k, k)] -= q.dot(&x) * (TAU * eps);
    }
    Ok(CouplingMatrix { u: base.u, w_eps: Some(w) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    /// The principal branch has no solution: `|arg(-eps a)| >= beta pi`.
    Inadmissible,
    /// The coefficient vanishes.
    Absent,
}

/// Solution of `(-z)^beta = -eps k`, `beta = 1 - alpha` (plus) or `alpha` (minus).
pub fn branch_root(alpha: FluxAlpha, eps: f64, k: C64, spin: SpinChannel) -> (Option<C64>, Admissibility) {
    let beta = alpha.nu(spin);
    let t = -eps * k;
    if t == ZERO {
        return (None, Admissibility::Absent);
    }
    if t.arg().abs() >= beta * PI {
        return (None, Admissibility::Inadmissible);
    }
    (Some(-(t.ln() / beta).exp()), Admissibility::Admissible)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPair {
    pub z_plus: Option<C64>,
    pub z_minus: Option<C64>,
    pub plus: Admissibility,
    pub minus: Admissibility,
}

impl AsymptoticPair {
    pub fn get(&self, spin: SpinChannel) -> (Option<C64>, Admissibility) {
        match spin {
            SpinChannel::Plus => (self.z_plus, self.plus),
            SpinChannel::Minus => (self.z_minus, self.minus),
        }
    }
}

/// Leading terms `z_+ = -(-eps a_0)^{1/(1-alpha)}`, `z_- = -(-eps b_0)^{1/alpha}` from `U`.
/// At `eps = 0` both eigenvalues sit at the threshold `0`.
pub fn asymptotic_eigenvalues(alpha: FluxAlpha, eps: f64, u: &CouplingMatrix) -> AsymptoticPair {
    if eps == 0.0 {
        return AsymptoticPair {
            z_plus: Some(ZERO),
            z_minus: Some(ZERO),
            plus: Admissibility::Admissible,
            minus: Admissibility::Admissible,
        };
    }
    let (z_plus, plus) = branch_root(alpha, eps, u.u[(0, 0)], SpinChannel::Plus);
    let (z_minus, minus) = branch_root(alpha, eps, u.u[(1, 1)], SpinChannel::Minus);
    AsymptoticPair { z_plus, z_minus, plus, minus }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitRoot {
    pub z: C64,
    /// Factor (diagonal data) or initial guess (general data) the root belongs to.
    pub branch: SpinChannel,
    /// `|F(-z)|` of the unfactored equation.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<ImplicitRoot>,
    /// Branches whose defining equation has no principal-branch solution.
    pub inadmissible: Vec<SpinChannel>,
    /// Newton runs that were abandoned.
    pub diagnostics: Vec<String>,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Roots `z` of the eigenvalue equation in `C \ [0, inf)`.
pub fn implicit_roots(alpha: FluxAlpha, eps: f64, coeffs: Coefficients) -> RootSet {
    let mut out = RootSet::default();
    if !(eps > 0.0) {
        return out;
    }
    let guesses: Vec<(SpinChannel, C64)> = SpinChannel::BOTH
        .into_iter()
        .filter_map(|spin| {
            let k = if spin == SpinChannel::Plus { coeffs.a } else { coeffs.b };
            match branch_root(alpha, eps, k, spin) {
                (Some(z), _) => Some((spin, z)),
                (None, Admissibility::Inadmissible) => {
                    out.inadmissible.push(spin);
                    None
                }
                _ => None,
            }
        })
        .collect();
    if coeffs.factorizes() {
        for (branch, z) in guesses {
            let residual = coeffs.residual(alpha, eps, -z).norm();
            out.roots.push(ImplicitRoot { z, branch, residual });
        }
        return out;
    }
    for (branch, z0) in guesses {
        match newton_log(alpha, eps, coeffs, (-z0).ln()) {
            Ok(s) => {
                let z = -s.exp();
                if out.roots.iter().any(|r| (r.z - z).norm() <= 1e-8 * z.norm()) {
                    continue;
                }
                let residual = coeffs.residual(alpha, eps, -z).norm();
                out.roots.push(ImplicitRoot { z, branch, residual });
            }
            Err(msg) => out.diagnostics.push(format!("{} guess dropped: {msg}", branch.label())),
        }
    }
    out
}

/// Newton iteration for `F(e^s) = 0` in `s = Log(-z)`.
fn newton_log(alpha: FluxAlpha, eps: f64, k: Coefficients, mut s: C64) -> std::result::Result<C64, String> {
    let a = alpha.value();
    for _ in 0..NEWTON_MAX_ITER {
        let e1 = (-s).exp();
        let ea = ((a - 1.0) * s).exp();
        let eb = (-a * s).exp();
        let f = eps * eps * k.c * e1 + eps * (k.a * ea + k.b * eb) + 1.0;
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err("non-finite residual".into());
        }
        if f.norm() <= NEWTON_TOL {
            if s.im.abs() >= PI {
                return Err("left the principal branch".into());
            }
            return Ok(s);
        }
        let df = -eps * eps * k.c * e1 + eps * (k.a * (a - 1.0) * ea - k.b * a * eb);
        if df == ZERO {
            return Err("vanishing derivative".into());
        }
        s -= f / df;
    }
    Err(format!("no convergence in {NEWTON_MAX_ITER} iterations"))
}

/// Settings of the self-consistent solution with `W(eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSettings {
    pub grid: GridSettings,
    /// Re-evaluations of `W(eps)` at the current root.
    pub iterations: usize,
}

impl Default for ImplicitSettings {
    fn default() -> Self {
        Self { grid: GridSettings::default(), iterations: 2 }
    }
}

/// Root of one factor of the equation with `a_eps = W_11` or `b_eps = W_22`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfConsistentRoot {
    pub z: Option<C64>,
    pub admissibility: Admissibility,
    /// Coefficient used in the last step.
    pub coefficient: C64,
}

/// Solve each factor with `W(eps)` evaluated at `-|z|` of the current root, starting from `U`.
pub fn implicit_eigenvalues(
    alpha: FluxAlpha,
    eps: f64,
    potential: &PotentialSpec,
    settings: &ImplicitSettings,
) -> Result<[SelfConsistentRoot; 2]> {
    let grid = QuadGrid::for_potential(potential, settings.grid)?;
    let u = compute_u(alpha, potential)?;
    let mut out = [SelfConsistentRoot { z: None, admissibility: Admissibility::Absent, coefficient: ZERO }; 2];
    for spin in SpinChannel::BOTH {
        let k = spin.index();
        let mut coefficient = u.u[(k, k)];
        let (mut z, mut adm) = branch_root(alpha, eps, coefficient, spin);
        for _ in 0..settings.iterations {
            let Some(zc) = z else { break };
            let zr = SpectralParameter::real(-zc.norm())?;
            coefficient = compute_w(alpha, eps, zr, potential, &grid)?.effective()[(k, k)];
            (z, adm) = branch_root(alpha, eps, coefficient, spin);
        }
        out[k] = SelfConsistentRoot { z, admissibility: adm, coefficient };
    }
    Ok(out)
}
