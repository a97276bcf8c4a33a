//! Radial Gauss–Legendre panels and the uniform angular rule.

use std::f64::consts::{PI, TAU};

use crate::bsolver::potential::PotentialSpec;
use crate::error::{domain, Result};
use crate::quad::gauss_legendre;

/// Discretisation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub n_r: usize,
    pub n_theta: usize,
    /// Upper radial cut; the grid stops earlier at the support of the potential.
    pub r_max: f64,
    /// Channels `|m| <= m_max` are kept on the radial path.
    pub m_max: usize,
    /// The first panel is mapped by `r = b t^grading` to absorb `r^{-nu}` behaviour at 0.
    pub grading: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { n_r: 96, n_theta: 64, r_max: 12.0, m_max: 12, grading: 3.0 }
    }
}

impl GridSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n_r < 4 || self.n_theta < 4 || self.n_theta % 2 != 0 {
            return domain("grid needs n_r >= 4 and an even n_theta >= 4");
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) || !(self.grading >= 1.0) {
            return domain("grid needs r_max > 0 and grading >= 1");
        }
        Ok(())
    }
}

/// Product grid: radial nodes `r_i` with weights `w_i` (for `dr`) and `n_theta`
/// equispaced angles `theta_a = -pi + (a + 1/2) 2pi / n_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub n_theta: usize,
    pub r_max: f64,
    pub m_max: usize,
}

impl QuadGrid {
    /// Grid on `[0, min(r_max, support)]` with panels split at the potential's breakpoints.
    pub fn for_potential(potential: &PotentialSpec, settings: GridSettings) -> Result<Self> {
        settings.validate()?;
        let support = potential.support_radius();
        let r_end = if support > 0.0 { settings.r_max.min(support) } else { settings.r_max };
        let breaks: Vec<f64> = potential.breakpoints().into_iter().filter(|&b| b < r_end * (1.0 - 1e-12)).collect();
        Ok(Self::radial(&breaks, r_end, settings))
    }

    /// Panels `[0, b_1], [b_1, b_2], ..., [b_k, r_end]`.
    pub fn radial(breaks: &[f64], r_end: f64, settings: GridSettings) -> Self {
        let mut edges = vec![0.0];
        edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < r_end));
        edges.push(r_end);
        let lens: Vec<f64> = edges.windows(2).map(|e| e[1] - e[0]).collect();
        let panels = lens.len();
        let mut counts: Vec<usize> =
            lens.iter().map(|l| ((settings.n_r as f64 * l / r_end).round() as usize).max(4)).collect();
        // absorb rounding in the longest panel
        let total: usize = counts.iter().sum();
        let longest = (0..panels).max_by(|&a, &b| lens[a].total_cmp(&lens[b])).unwrap_or(0);
        if total > settings.n_r {
            counts[longest] = counts[longest].saturating_sub(total - settings.n_r).max(4);
        } else {
            counts[longest] += settings.n_r - total;
        }
        let mut r = Vec::new();
        let mut w = Vec::new();
        for (k, e) in edges.windows(2).enumerate() {
            for (tau, wt) in gauss_legendre(counts[k], -1.0, 1.0) {
                if k == 0 {
                    let p = settings.grading;
                    let t = 0.5 * (tau + 1.0);
                    let dr = 0.5 * e[1] * p * t.powf(p - 1.0);
                    r.push(e[1] * t.powf(p));
                    w.push(dr * wt);
                } else {
                    let h = 0.5 * (e[1] - e[0]);
                    r.push(e[0] + h * (tau + 1.0));
                    w.push(h * wt);
                }
            }
        }
        Self { r, w, n_theta: settings.n_theta, r_max: r_end, m_max: settings.m_max }
    }

    pub fn n_r(&self) -> usize {
        self.r.len()
    }

    pub fn theta(&self, a: usize) -> f64 {
        -PI + (a as f64 + 0.5) * TAU / self.n_theta as f64
    }

    pub fn angular_weight(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Flattened area weights `w_i r_i 2pi/n_theta`, radial index fastest.
    pub fn area_weights(&self) -> Vec<f64> {
        let h = self.angular_weight();
        let mut out = Vec::with_capacity(self.n_r() * self.n_theta);
        for _ in 0..self.n_theta {
            out.extend(self.r.iter().zip(&self.w).map(|(r, w)| r * w * h));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsolver::potential::{PotentialComponent, RadialTerm};
    use num_complex::Complex64;

    #[test]
    fn area_of_disk_is_exact() {
        let g = QuadGrid::radial(&[0.7, 2.0], 5.0, GridSettings { n_r: 40, ..Default::default() });
        let area: f64 = g.area_weights().iter().sum();
        assert!((area - PI * 25.0).abs() < 1e-12 * PI * 25.0);
        assert!(g.w.iter().all(|&w| w > 0.0));
        assert!(g.r.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(g.n_r(), 40);
    }

    #[test]
    fn grid_stops_at_support_and_splits_at_edges() {
        let v = PotentialSpec::both(PotentialComponent::new(vec![
            RadialTerm::disk(1.0, Complex64::new(-1.0, 0.0)).unwrap(),
            RadialTerm::disk(0.5, Complex64::new(-1.0, 0.0)).unwrap(),
        ]));
        let g = QuadGrid::for_potential(&v, GridSettings::default()).unwrap();
        assert_eq!(g.r_max, 1.0);
        assert!(g.r.iter().all(|&r| r < 1.0));
        let inner: f64 = g.r.iter().zip(&g.w).filter(|(r, _)| **r < 0.5).map(|(_, w)| w).sum();
        assert!((inner - 0.5).abs() < 1e-14);
    }
}
