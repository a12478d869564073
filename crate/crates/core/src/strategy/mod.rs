//! Behavioral strategies, induced play laws, the strategy metric, simplex
//! grids and the coupled-play sampler.

mod behavioral;
mod coupling;
mod grid;
mod play;

pub use behavioral::{l1, strategy_distance, BehavioralStrategy};

pub use coupling::{coupled_sample, maximal_coupling, CoupledPlayPair};
pub use grid::{build_grids, snap_strategy, SimplexGrid, DEFAULT_GRID_CAP};
pub use play::{payoff, play_distribution, PlayDistribution};
