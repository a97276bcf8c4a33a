//! Assembled Birman–Schwinger matrices and their spectra.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::greenfn::{FluxAlpha, SpectralParameter, SpinChannel};
use crate::linalg::{eigenvalues_general, eigenvalues_hermitian};
use crate::Result;

/// Radial matrix of one angular mode in one spin block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    pub spin: SpinChannel,
    pub m: i32,
    pub matrix: DMatrix<Complex64>,
}

/// One spin block of the polar-grid matrix. The block is circulant in the
/// angular index: entry `((i, a), (j, b))` equals `first[(a - b) mod n_theta][(i, j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantBlock {
    pub spin: SpinChannel,
    pub first: Vec<DMatrix<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelLayout {
    /// Direct sum of radial channel matrices.
    Channels(Vec<ChannelBlock>),
    /// Two-dimensional Nyström matrix on the polar product grid.
    Polar { n_r: usize, n_theta: usize, blocks: Vec<CirculantBlock> },
}

/// `eps sqrt(w_i) A(x_i) G_z(x_i, x_j) B(x_j) sqrt(w_j)`, stored per spin block.
///
/// On the polar layout the kernel is taken in the periodic gauge
/// `e^{-i alpha (theta - theta0)} G`, which is a unitary similarity of the
/// plain matrix and leaves the spectrum unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub alpha: FluxAlpha,
    pub z: SpectralParameter,
    pub eps: f64,
    pub layout: KernelLayout,
    /// `Some(s)` when the spin block equals `s` times a Hermitian matrix.
    pub hermitian_sign: [Option<f64>; 2],
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        match &self.layout {
            KernelLayout::Channels(blocks) => blocks.iter().map(|b| b.matrix.nrows()).sum(),
            KernelLayout::Polar { n_r, n_theta, blocks } => blocks.len() * n_r * n_theta,
        }
    }

    /// Dense matrix. Polar rows are ordered `spin, theta index, radial index`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        match &self.layout {
            KernelLayout::Channels(blocks) => {
                let mut off = 0;
                for b in blocks {
                    let k = b.matrix.nrows();
                    out.view_mut((off, off), (k, k)).copy_from(&b.matrix);
                    off += k;
                }
            }
            KernelLayout::Polar { n_r, n_theta, blocks } => {
                let (nr, nt) = (*n_r, *n_theta);
                for (s, blk) in blocks.iter().enumerate() {
                    let base = s * nr * nt;
                    for a in 0..nt {
                        for b in 0..nt {
                            let d = (a + nt - b) % nt;
                            out.view_mut((base + a * nr, base + b * nr), (nr, nr)).copy_from(&blk.first[d]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Angular Fourier blocks `M_k = sum_d C_d e^{-2 pi i k d / n}` of a polar
    /// block, labelled by mode `m = k` (`k < n/2`) or `k - n`.
    pub fn mode_blocks(&self, spin: SpinChannel) -> Vec<(i32, DMatrix<Complex64>)> {
        match &self.layout {
            KernelLayout::Channels(blocks) => {
                blocks.iter().filter(|b| b.spin == spin).map(|b| (b.m, b.matrix.clone())).collect()
            }
            KernelLayout::Polar { n_r, n_theta, blocks } => {
                let Some(blk) = blocks.iter().find(|b| b.spin == spin) else {
                    return Vec::new();
                };
                let nt = *n_theta;
                (0..nt)
                    .map(|k| {
                        let mut m = DMatrix::zeros(*n_r, *n_r);
                        for (d, c) in blk.first.iter().enumerate() {
                            let ph = Complex64::from_polar(1.0, -TAU * ((k * d) % nt) as f64 / nt as f64);
                            m += c * ph;
                        }
                        let mode = if k < nt / 2 { k as i32 } else { k as i32 - nt as i32 };
                        (mode, m)
                    })
                    .collect()
            }
        }
    }

    /// All eigenvalues of one spin block.
    pub fn spin_eigenvalues(&self, spin: SpinChannel) -> Result<Vec<Complex64>> {
        let sign = self.hermitian_sign[spin.index()];
        let mut out = Vec::new();
        for (_, m) in self.mode_blocks(spin) {
            match sign {
                Some(s) => {
                    let h = &m * Complex64::new(s, 0.0);
                    out.extend(eigenvalues_hermitian(&h).into_iter().map(|e| Complex64::new(s * e, 0.0)));
                }
                None => out.extend(eigenvalues_general(&m)?),
            }
        }
        Ok(out)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut ev = self.spin_eigenvalues(SpinChannel::Plus)?;
        ev.extend(self.spin_eigenvalues(SpinChannel::Minus)?);
        Ok(ev)
    }

    /// Smallest real part over the spectrum of one spin block, `None` for an empty block.
    /// Eigenvalues with a non-negligible imaginary part are used only if no real one exists.
    pub fn min_real_eigenvalue(&self, spin: SpinChannel) -> Result<Option<f64>> {
        let ev = self.spin_eigenvalues(spin)?;
        let rho = ev.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let real = ev.iter().filter(|e| e.im.abs() <= 1e-9 * rho).map(|e| e.re).fold(None, min_opt);
        Ok(real.or_else(|| ev.iter().map(|e| e.re).fold(None, min_opt)))
    }
}

fn min_opt(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.min(x)))
}

/// Frobenius norm of the weighted matrix, the quadrature image of the Hilbert–Schmidt norm.
pub fn hs_norm(kernel: &KernelMatrix) -> f64 {
    let sq: f64 = match &kernel.layout {
        KernelLayout::Channels(blocks) => blocks.iter().map(|b| b.matrix.norm_squared()).sum(),
        KernelLayout::Polar { n_theta, blocks, .. } => {
            blocks.iter().flat_map(|b| b.first.iter()).map(|c| c.norm_squared()).sum::<f64>() * *n_theta as f64
        }
    };
    sq.sqrt()
}
