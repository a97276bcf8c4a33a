//! Radial diagonal potentials `V = diag(v11, v22)` and their polar factors.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::greenfn::{FluxAlpha, SpinChannel};
use crate::quad::{gauss_kronrod_real, GkOptions};

/// Gaussians are treated as vanishing beyond `center + GAUSSIAN_CUTOFF * width`
/// (`exp(-6.5^2) < 5e-19`).
pub const GAUSSIAN_CUTOFF: f64 = 6.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `exp(-r^2 / width^2)`
    Gaussian,
    /// `exp(-(r - center)^2 / width^2)`
    AnnularGaussian,
    /// Indicator of `|r - center| <= width`; a disk of radius `width` when `center = 0`.
    DiskIndicator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerm {
    pub shape: Shape,
    pub amplitude: Complex64,
    pub width: f64,
    pub center_radius: f64,
}

impl RadialTerm {
    pub fn new(shape: Shape, amplitude: Complex64, width: f64, center_radius: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return domain(format!("term width must be positive, got {width}"));
        }
        if !(center_radius >= 0.0 && center_radius.is_finite()) {
            return domain(format!("center radius must be >= 0, got {center_radius}"));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return domain("term amplitude must be finite");
        }
        Ok(Self { shape, amplitude, width, center_radius })
    }

    pub fn disk(radius: f64, amplitude: Complex64) -> Result<Self> {
        Self::new(Shape::DiskIndicator, amplitude, radius, 0.0)
    }

    pub fn gaussian(width: f64, amplitude: Complex64) -> Result<Self> {
        Self::new(Shape::Gaussian, amplitude, width, 0.0)
    }

    pub fn profile(&self, r: f64) -> f64 {
        match self.shape {
            Shape::Gaussian => (-(r / self.width).powi(2)).exp(),
            Shape::AnnularGaussian => (-((r - self.center_radius) / self.width).powi(2)).exp(),
            Shape::DiskIndicator => {
                if (r - self.center_radius).abs() <= self.width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, r: f64) -> Complex64 {
        self.amplitude * self.profile(r)
    }

    /// Radii where the term is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            Shape::DiskIndicator => [self.center_radius - self.width, self.center_radius + self.width]
                .into_iter()
                .filter(|&b| b > 0.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Radius beyond which the term vanishes (numerically, for Gaussians).
    pub fn support_radius(&self) -> f64 {
        match self.shape {
            Shape::Gaussian => GAUSSIAN_CUTOFF * self.width,
            Shape::AnnularGaussian => self.center_radius + GAUSSIAN_CUTOFF * self.width,
            Shape::DiskIndicator => self.center_radius + self.width,
        }
    }
}

/// One diagonal entry of `V` as a sum of radial terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialComponent {
    pub terms: Vec<RadialTerm>,
}

impl PotentialComponent {
    pub fn new(terms: Vec<RadialTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn value(&self, r: f64) -> Complex64 {
        self.terms.iter().map(|t| t.value(r)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == Complex64::new(0.0, 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude.im == 0.0)
    }

    /// `Some(-1.0)` if every real amplitude is `<= 0`, `Some(1.0)` if all are `>= 0`.
    pub fn uniform_sign(&self) -> Option<f64> {
        if !self.is_real() {
            return None;
        }
        if self.terms.iter().all(|t| t.amplitude.re <= 0.0) {
            Some(-1.0)
        } else if self.terms.iter().all(|t| t.amplitude.re >= 0.0) {
            Some(1.0)
        } else {
            None
        }
    }

    /// Guaranteed lower bound of `Re v` (every profile lies in `[0, 1]`).
    pub fn min_real_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.re.min(0.0)).sum()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.terms.iter().flat_map(|t| t.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        b
    }

    pub fn support_radius(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.amplitude != Complex64::new(0.0, 0.0))
            .map(|t| t.support_radius())
            .fold(0.0, f64::max)
    }

    /// `int_0^R h(r) dr` split at the breakpoints of this component.
    pub(crate) fn integrate_radial<F: FnMut(f64) -> f64>(&self, mut h: F, r_max: f64) -> Result<f64> {
        let mut edges = vec![0.0];
        edges.extend(self.breakpoints().into_iter().filter(|&b| b < r_max));
        edges.push(r_max);
        let opts = GkOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
        let mut total = 0.0;
        for w in edges.windows(2) {
            total += gauss_kronrod_real(&mut h, w[0], w[1], opts)?;
        }
        Ok(total)
    }
}

/// Diagonal radial potential.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialSpec {
    pub v11: PotentialComponent,
    pub v22: PotentialComponent,
}

/// Integrability data recorded for a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMoments {
    /// `int |V| |x|^{2 nu} dx`, `nu = max(alpha, 1 - alpha)`.
    pub m_plus: f64,
    /// `int |V| |x|^{-2 nu} dx`.
    pub m_minus: f64,
    /// `int |V|^2 dx`.
    pub l2_squared: f64,
    pub assumption_ok: bool,
}

impl PotentialSpec {
    pub fn new(v11: PotentialComponent, v22: PotentialComponent) -> Self {
        Self { v11, v22 }
    }

    /// The same profile in both diagonal entries.
    pub fn both(component: PotentialComponent) -> Self {
        Self { v11: component.clone(), v22: component }
    }

    pub fn component(&self, spin: SpinChannel) -> &PotentialComponent {
        match spin {
            SpinChannel::Plus => &self.v11,
            SpinChannel::Minus => &self.v22,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v11.is_zero() && self.v22.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.v11.is_real() && self.v22.is_real()
    }

    pub fn support_radius(&self) -> f64 {
        self.v11.support_radius().max(self.v22.support_radius())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.v11.breakpoints();
        b.extend(self.v22.breakpoints());
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        b
    }

    /// Operator norm of `V(x)` at radius `r`.
    pub fn norm_at(&self, r: f64) -> f64 {
        self.v11.value(r).norm().max(self.v22.value(r).norm())
    }

    pub fn moments(&self, alpha: FluxAlpha) -> Result<PotentialMoments> {
        let a = alpha.value();
        let nu = a.max(1.0 - a);
        let r_max = self.support_radius();
        if r_max == 0.0 {
            return Ok(PotentialMoments { m_plus: 0.0, m_minus: 0.0, l2_squared: 0.0, assumption_ok: true });
        }
        let mut all = self.v11.clone();
        all.terms.extend(self.v22.terms.iter().copied());
        let m_plus = TAU * all.integrate_radial(|r| self.norm_at(r) * r.powf(2.0 * nu + 1.0), r_max)?;
        // substitute r = u^{1/(2 - 2 nu)} to remove the endpoint power
        let p = 2.0 - 2.0 * nu;
        let opts = GkOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
        let mut edges = vec![0.0];
        edges.extend(all.breakpoints().into_iter().filter(|&b| b < r_max).map(|b| b.powf(p)));
        edges.push(r_max.powf(p));
        let mut m_minus = 0.0;
        for w in edges.windows(2) {
            m_minus += gauss_kronrod_real(|u| self.norm_at(u.powf(1.0 / p)), w[0], w[1], opts)?;
        }
        let m_minus = TAU / p * m_minus;
        let l2_squared = TAU * all.integrate_radial(|r| self.norm_at(r).powi(2) * r, r_max)?;
        let assumption_ok = m_plus.is_finite() && m_minus.is_finite() && l2_squared.is_finite();
        Ok(PotentialMoments { m_plus, m_minus, l2_squared, assumption_ok })
    }
}

/// Pointwise polar factors `V = B A` with `A = |V|^{1/2}` and `B = V |V|^{-1/2}`.
#[derive(Debug, Clone)]
pub struct FactorPair {
    pub potential: PotentialSpec,
}

impl FactorPair {
    /// `(a, b)` for one diagonal entry at radius `r`.
    pub fn at(&self, spin: SpinChannel, r: f64) -> (f64, Complex64) {
        scalar_polar(self.potential.component(spin).value(r))
    }

    /// `A(x)` and `B(x)` as diagonal pairs `[plus, minus]`.
    pub fn matrices(&self, r: f64) -> ([f64; 2], [Complex64; 2]) {
        let (a1, b1) = self.at(SpinChannel::Plus, r);
        let (a2, b2) = self.at(SpinChannel::Minus, r);
        ([a1, a2], [b1, b2])
    }
}

pub fn polar_factors(potential: &PotentialSpec) -> FactorPair {
    FactorPair { potential: potential.clone() }
}

pub(crate) fn scalar_polar(v: Complex64) -> (f64, Complex64) {
    let m = v.norm();
    if m == 0.0 {
        return (0.0, Complex64::new(0.0, 0.0));
    }
    let a = m.sqrt();
    (a, v / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polar_factor_examples() {
        let (a, b) = scalar_polar(c(-2.0, 0.0));
        assert!((a - 2f64.sqrt()).abs() < 1e-15 && (b - c(-(2f64.sqrt()), 0.0)).norm() < 1e-15);
        let (a, b) = scalar_polar(c(0.0, 2.0));
        assert!((a - 2f64.sqrt()).abs() < 1e-15 && (b - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        assert_eq!(scalar_polar(c(0.0, 0.0)), (0.0, c(0.0, 0.0)));
    }

    #[test]
    fn disk_moments_closed_form() {
        let disk = PotentialComponent::new(vec![RadialTerm::disk(1.0, c(-1.0, 0.0)).unwrap()]);
        let v = PotentialSpec::both(disk);
        let m = v.moments(FluxAlpha::new(0.3).unwrap()).unwrap();
        // nu = 0.7: int_0^1 r^{1.4} r dr = 1/3.4, int r^{-1.4} r dr = 1/0.6
        assert!((m.m_plus - TAU / 3.4).abs() < 1e-10);
        assert!((m.m_minus - TAU / 0.6).abs() < 1e-10);
        assert!((m.l2_squared - PI).abs() < 1e-10);
        assert!(m.assumption_ok);
    }

    #[test]
    fn term_validation() {
        assert!(RadialTerm::disk(0.0, c(1.0, 0.0)).is_err());
        assert!(RadialTerm::new(Shape::AnnularGaussian, c(1.0, 0.0), 1.0, -1.0).is_err());
    }

    #[test]
    fn sign_classification() {
        let g = PotentialComponent::new(vec![
            RadialTerm::gaussian(1.0, c(-1.0, 0.0)).unwrap(),
            RadialTerm::disk(0.5, c(-0.2, 0.0)).unwrap(),
        ]);
        assert_eq!(g.uniform_sign(), Some(-1.0));
        assert!((g.min_real_bound() + 1.2).abs() < 1e-15);
        let mixed = PotentialComponent::new(vec![
            RadialTerm::gaussian(1.0, c(-1.0, 0.0)).unwrap(),
            RadialTerm::disk(0.5, c(0.2, 0.0)).unwrap(),
        ]);
        assert_eq!(mixed.uniform_sign(), None);
    }
}
