//! Random walks on finitely generated groups: growth, return probabilities
//! and the capacity `c₀`.

mod decay;
mod group;
mod growth;
mod returns;
mod sandwich;

pub use decay::{c0_from_series, c0_from_walk, decay_exponent, DecayClass, DecayFit, AGREEMENT, EXPONENTIAL_GAP};
pub use group::{Element, GroupModel, GroupSpec, LAMP_OFFSET};
pub use growth::{ball, ball_with_budget, bass_degree, growth_degree, growth_series, Ball, GrowthSeries, DEFAULT_BUDGET};
pub use returns::{
    return_series, return_series_with_budget, torus_return_probabilities, ReturnSeries, WalkSpec, PRUNE_BELOW,
};
pub use sandwich::{
    laplacian_density, sandwich_check, walk_symbol, LaplacianDensity, SandwichReport, SandwichRow,
    SANDWICH_TOLERANCE,
};
