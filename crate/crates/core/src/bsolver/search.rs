//! Bound states as zeros of `mu_min(z) + 1`, `mu_min` the lowest eigenvalue of
//! the Birman–Schwinger matrix of one spin block.

use crate::bsolver::channels::{assemble_bs_channels, assemble_bs_radial_channel};
use crate::bsolver::grid::{GridSettings, QuadGrid};
use crate::bsolver::polar::assemble_polar;
use crate::bsolver::potential::PotentialSpec;
use crate::error::{domain, Error, Result};
use crate::greenfn::{FluxAlpha, GreenOptions, SpectralParameter, SpinChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPath {
    Polar,
    Channels,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundState {
    Found(f64),
    NoEigenvalue,
}

impl BoundState {
    pub fn value(self) -> Option<f64> {
        match self {
            BoundState::Found(z) => Some(z),
            BoundState::NoEigenvalue => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStates {
    pub plus: BoundState,
    pub minus: BoundState,
}

impl BoundStates {
    pub fn get(&self, spin: SpinChannel) -> BoundState {
        match spin {
            SpinChannel::Plus => self.plus,
            SpinChannel::Minus => self.minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub grid: GridSettings,
    pub path: SearchPath,
    /// `(z_lo, z_hi)` with `z_lo < z_hi < 0`; by default `z_lo` is just below
    /// `eps * inf Re v` and `z_hi = -1e-200`.
    pub bracket: Option<(f64, f64)>,
    /// Stop when `|Delta ln(-z)|` falls below this.
    pub tol: f64,
    pub green: GreenOptions,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            grid: GridSettings::default(),
            path: SearchPath::Channels,
            bracket: None,
            tol: 1e-10,
            green: GreenOptions::default(),
        }
    }
}

/// Shallowest default search energy.
pub const Z_SHALLOW: f64 = -1e-200;

/// Lowest real eigenvalue of one spin block at `z`.
pub fn lowest_bs_eigenvalue(
    alpha: FluxAlpha,
    z: f64,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spin: SpinChannel,
    settings: &SearchSettings,
) -> Result<f64> {
    let zp = SpectralParameter::real(z)?;
    let k = match settings.path {
        SearchPath::Channels => assemble_bs_channels(alpha, zp, eps, potential, grid, &[spin])?,
        SearchPath::Polar => assemble_polar(alpha, zp, eps, potential, grid, &[spin], settings.green)?,
    };
    Ok(k.min_real_eigenvalue(spin)?.unwrap_or(0.0))
}

/// Ground state of each spin block of `H + eps V` below zero, for real `V`.
pub fn find_bound_state(
    alpha: FluxAlpha,
    eps: f64,
    potential: &PotentialSpec,
    settings: &SearchSettings,
) -> Result<BoundStates> {
    if !potential.is_real() {
        return Err(Error::Unsupported("bound-state search needs a real potential; use the implicit equation".into()));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return domain(format!("coupling must be finite and >= 0, got {eps}"));
    }
    if let Some((lo, hi)) = settings.bracket {
        if !(lo < hi && hi < 0.0 && lo.is_finite()) {
            return domain(format!("invalid bracket ({lo}, {hi}); need z_lo < z_hi < 0"));
        }
    }
    let grid = QuadGrid::for_potential(potential, settings.grid)?;
    let mut out = [BoundState::NoEigenvalue; 2];
    for spin in SpinChannel::BOTH {
        out[spin.index()] = search_spin(alpha, eps, potential, &grid, spin, settings)?;
    }
    Ok(BoundStates { plus: out[0], minus: out[1] })
}

/// Which part of the operator the root finder looks at.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    /// Critical radial channel only.
    Critical,
    All,
}

#[allow(clippy::too_many_arguments)]
fn lowest_in_scope(
    alpha: FluxAlpha,
    z: f64,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spin: SpinChannel,
    settings: &SearchSettings,
    scope: Scope,
) -> Result<f64> {
    if scope == Scope::All || settings.path == SearchPath::Polar {
        return lowest_bs_eigenvalue(alpha, z, eps, potential, grid, spin, settings);
    }
    let zp = SpectralParameter::real(z)?;
    let k = assemble_bs_radial_channel(alpha, zp, eps, potential, spin.critical_mode(), spin, grid)?;
    Ok(k.min_real_eigenvalue(spin)?.unwrap_or(0.0))
}

fn search_spin(
    alpha: FluxAlpha,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spin: SpinChannel,
    settings: &SearchSettings,
) -> Result<BoundState> {
    let comp = potential.component(spin);
    let floor = eps * comp.min_real_bound();
    if comp.is_zero() || eps == 0.0 || floor >= 0.0 {
        return Ok(BoundState::NoEigenvalue);
    }
    let (z_lo, z_hi) = settings.bracket.unwrap_or((1.01 * floor, Z_SHALLOW));
    if settings.path == SearchPath::Polar {
        return search_scoped(alpha, eps, potential, grid, spin, settings, (z_lo, z_hi), Scope::All);
    }
    // the ground state sits in the critical channel unless another channel
    // already exceeds the threshold where the critical root was found
    let crit = search_scoped(alpha, eps, potential, grid, spin, settings, (z_lo, z_hi), Scope::Critical)?;
    let probe = crit.value().unwrap_or(z_hi);
    let mu = lowest_bs_eigenvalue(alpha, probe, eps, potential, grid, spin, settings)?;
    if mu < -1.0 - 1e-9 {
        return search_scoped(alpha, eps, potential, grid, spin, settings, (z_lo, z_hi), Scope::All);
    }
    Ok(crit)
}

#[allow(clippy::too_many_arguments)]
fn search_scoped(
    alpha: FluxAlpha,
    eps: f64,
    potential: &PotentialSpec,
    grid: &QuadGrid,
    spin: SpinChannel,
    settings: &SearchSettings,
    (z_lo, z_hi): (f64, f64),
    scope: Scope,
) -> Result<BoundState> {
    // work with F(t) = ln(-mu_min) at z = -e^t; F decreases in t and crosses 0 at the bound state
    let f = |t: f64| -> Result<f64> {
        let mu = lowest_in_scope(alpha, -t.exp(), eps, potential, grid, spin, settings, scope)?;
        Ok((-mu).max(1e-300).ln())
    };
    let mut a = (-z_hi).ln();
    let mut b = (-z_lo).ln();
    let mut fa = f(a)?;
    if fa <= 0.0 {
        return Ok(BoundState::NoEigenvalue);
    }
    let mut fb = f(b)?;
    if fb > 0.0 {
        return domain(format!("bound state lies below the bracket end z = {z_lo:e}"));
    }
    // Illinois variant of regula falsi
    let mut side = 0;
    for _ in 0..200 {
        let c = if fa - fb != 0.0 { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(BoundState::Found(-c.exp()));
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if (b - a).abs() <= settings.tol {
            let t = (a * fb - b * fa) / (fb - fa);
            let t = if t.is_finite() && t >= a.min(b) && t <= a.max(b) { t } else { 0.5 * (a + b) };
            return Ok(BoundState::Found(-t.exp()));
        }
    }
    Err(Error::Integration("bound-state root finder did not converge".into()))
}
