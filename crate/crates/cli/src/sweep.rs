//! The epsilon sweep: asymptotic, implicit and Birman–Schwinger eigenvalues per row.

use std::time::Instant;

use abpauli::bsolver::{find_bound_state, BoundState};
use abpauli::weakcoupling::{
    asymptotic_eigenvalues, compute_u, implicit_eigenvalues, implicit_roots, Admissibility, CouplingMatrix,
};
use abpauli::{Complex64, SpinChannel};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;

/// One row per epsilon; index 0 is spin plus, 1 is spin minus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub eps: f64,
    pub z_asym: [Option<Complex64>; 2],
    pub z_impl: [Option<Complex64>; 2],
    pub z_bs: [Option<Complex64>; 2],
    /// `|z_bs - z_asym| / |z_asym|`, present exactly when both values are.
    pub rel_err: [Option<f64>; 2],
    pub flags: Vec<String>,
    pub seconds: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    fn set_rel_err(&mut self) {
        for k in 0..2 {
            self.rel_err[k] = match (self.z_bs[k], self.z_asym[k]) {
                (Some(b), Some(a)) if a.norm() > 0.0 => Some((b - a).norm() / a.norm()),
                _ => None,
            };
        }
    }
}

/// Least-squares fit of `log|z|` against `log eps` for one spin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub r2: f64,
    pub points: usize,
    /// Column the fit was taken from: `bs`, `impl` or `asym`.
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FitSummary {
    pub plus: Option<ExponentFit>,
    pub minus: Option<ExponentFit>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: FitSummary,
}

impl SweepResult {
    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(SweepRow::failed)
    }
}

fn flag_admissibility(flags: &mut Vec<String>, spin: SpinChannel, adm: Admissibility) {
    match adm {
        Admissibility::Admissible => {}
        Admissibility::Inadmissible => flags.push(format!("{}_inadmissible", spin.label())),
        Admissibility::Absent => flags.push(format!("{}_absent", spin.label())),
    }
}

pub fn compute_row(cfg: &RunConfig, u: &Result<CouplingMatrix, String>, eps: f64) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow { eps, ..SweepRow::default() };
    let mut errors = Vec::new();
    let alpha = cfg.alpha;

    match u {
        Ok(u) => {
            let asym = asymptotic_eigenvalues(alpha, eps, u);
            for spin in SpinChannel::BOTH {
                let (z, adm) = asym.get(spin);
                row.z_asym[spin.index()] = z;
                flag_admissibility(&mut row.flags, spin, adm);
            }
            if cfg.sweep.w_correction {
                match implicit_eigenvalues(alpha, eps, &cfg.potential, &cfg.numerics.implicit()) {
                    Ok(roots) => {
                        for spin in SpinChannel::BOTH {
                            let r = roots[spin.index()];
                            row.z_impl[spin.index()] = r.z;
                            if r.admissibility != asym.get(spin).1 {
                                flag_admissibility(&mut row.flags, spin, r.admissibility);
                            }
                        }
                    }
                    Err(e) => errors.push(format!("implicit: {e}")),
                }
            } else {
                let set = implicit_roots(alpha, eps, u.coefficients());
                for r in &set.roots {
                    row.z_impl[r.branch.index()].get_or_insert(r.z);
                }
                for d in set.diagnostics {
                    log::debug!("eps = {eps:e}: {d}");
                }
            }
        }
        Err(e) => errors.push(format!("coupling matrix: {e}")),
    }

    if cfg.sweep.bound_states {
        if cfg.potential.is_real() {
            match find_bound_state(alpha, eps, &cfg.potential, &cfg.numerics.search()) {
                Ok(bs) => {
                    for spin in SpinChannel::BOTH {
                        match bs.get(spin) {
                            BoundState::Found(z) => row.z_bs[spin.index()] = Some(Complex64::new(z, 0.0)),
                            BoundState::NoEigenvalue => row.flags.push(format!("{}_no_eigenvalue", spin.label())),
                        }
                    }
                }
                Err(e) => errors.push(format!("bound state: {e}")),
            }
        } else {
            row.flags.push("bs_skipped_complex".into());
        }
    }

    row.set_rel_err();
    if !errors.is_empty() {
        row.flags.push("error".into());
        row.error = Some(errors.join("; "));
    }
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// Runs every epsilon of the config on a pool of `threads` workers (all cores when `None`).
/// Rows come back in epsilon order.
pub fn run_sweep(cfg: &RunConfig, threads: Option<usize>) -> SweepResult {
    let eps = cfg.sweep.eps_values();
    let u = compute_u(cfg.alpha, &cfg.potential).map_err(|e| e.to_string());
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let rows: Vec<SweepRow> = match builder.build() {
        Ok(pool) => pool.install(|| {
            eps.par_iter()
                .map(|&e| {
                    let row = compute_row(cfg, &u, e);
                    log::info!("eps = {e:.6e} done in {:.3} s", row.seconds);
                    row
                })
                .collect()
        }),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running serially");
            eps.iter().map(|&e| compute_row(cfg, &u, e)).collect()
        }
    };
    let fit = fit_exponents(&rows);
    SweepResult { rows, fit }
}

type Column = fn(&SweepRow) -> &[Option<Complex64>; 2];

/// Slope and R^2 of `log|z|` vs `log eps`, from the first column complete in every row.
pub fn fit_exponents(rows: &[SweepRow]) -> FitSummary {
    let spin_fit = |k: usize| -> Option<ExponentFit> {
        let columns: [(&'static str, Column); 3] =
            [("bs", |r| &r.z_bs), ("impl", |r| &r.z_impl), ("asym", |r| &r.z_asym)];
        for (source, col) in columns {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| {
                    col(r)[k].filter(|z| z.norm() > 0.0 && r.eps > 0.0).map(|z| (r.eps.ln(), z.norm().ln()))
                })
                .collect();
            if pts.len() >= 2 && pts.len() == rows.len() {
                let (slope, r2) = linear_fit(&pts);
                return Some(ExponentFit { slope, r2, points: pts.len(), source });
            }
        }
        None
    };
    FitSummary { plus: spin_fit(0), minus: spin_fit(1) }
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let rows: Vec<SweepRow> = [1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&e: &f64| SweepRow {
                eps: e,
                z_asym: [Some(Complex64::new(-e.powf(1.5), 0.0)), Some(Complex64::new(-2.0 * e * e, 0.0))],
                ..SweepRow::default()
            })
            .collect();
        let fit = fit_exponents(&rows);
        let m = fit.minus.unwrap();
        assert!((m.slope - 2.0).abs() < 1e-12 && (m.r2 - 1.0).abs() < 1e-12);
        assert_eq!(m.source, "asym");
        assert!((fit.plus.unwrap().slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn partial_column_is_skipped() {
        let mut rows: Vec<SweepRow> = [1e-2, 1e-1]
            .iter()
            .map(|&e| SweepRow { eps: e, z_asym: [None, Some(Complex64::new(-e * e, 0.0))], ..SweepRow::default() })
            .collect();
        rows[0].z_bs[1] = Some(Complex64::new(-1.0, 0.0));
        let fit = fit_exponents(&rows);
        assert_eq!(fit.minus.unwrap().source, "asym");
        assert!(fit.plus.is_none());
    }

    #[test]
    fn rel_err_only_with_both_values() {
        let mut r = SweepRow {
            z_bs: [Some(Complex64::new(-1.1, 0.0)), None],
            z_asym: [Some(Complex64::new(-1.0, 0.0)), Some(Complex64::new(-1.0, 0.0))],
            ..SweepRow::default()
        };
        r.set_rel_err();
        assert!((r.rel_err[0].unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(r.rel_err[1], None);
    }
}
