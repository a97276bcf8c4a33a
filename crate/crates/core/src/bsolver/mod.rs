//! Birman–Schwinger operator `eps A (H - z)^{-1} B` on quadrature grids and
//! the bound-state search built on it.

pub mod channels;
pub mod grid;
pub mod kernel;
pub mod polar;
pub mod potential;
pub mod search;

pub use channels::{assemble_bs_channels, assemble_bs_radial_channel, channel_operator, regular_hs_norm, KernelKind};
pub use grid::{GridSettings, QuadGrid};
pub use kernel::{hs_norm, ChannelBlock, CirculantBlock, KernelLayout, KernelMatrix};
pub use polar::{assemble_bs_2d, assemble_polar};
pub use potential::{
    polar_factors, FactorPair, PotentialComponent, PotentialMoments, PotentialSpec, RadialTerm, Shape,
};
pub use search::{find_bound_state, lowest_bs_eigenvalue, BoundState, BoundStates, SearchPath, SearchSettings};
