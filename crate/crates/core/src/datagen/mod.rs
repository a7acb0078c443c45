//! Synthetic instance generation.
//!
//! Every stochastic ingredient of an instance is drawn from a documented
//! model: total uncovered-duration per day from a per-weekday duration
//! family, within-day demand shapes from a Dirichlet around rush-hour
//! templates, employee pattern rankings from a distance-weighted ball
//! around a modal ranking, and absence probabilities from a per-weekday
//! rate grid spanned by whisker statistics of historical rates. All draws
//! run on named substreams of one master seed, so regenerating with the
//! same [`GenConfig`] reproduces the instance byte for byte and growing
//! one knob (say scenarios per day) extends earlier draws instead of
//! reshuffling them.

mod duration;
mod generate;
mod grid;
mod known_demand;
mod preferences;
mod scenarios;
mod shapes;
mod stream;

pub use duration::{sample_durations, DurationFamily, DurationModel, WeekdayDuration};
pub use generate::{generate_instance, sample_desk_instance, sample_tiny_instance, GenConfig};
pub use grid::{
    assign_absence_probabilities, build_absence_grid, grid_from_whiskers, synth_history,
    AbsenceGenConfig, AbsenceRateGrid,
};
pub use known_demand::{demand_cap, sample_known_demand, KnownDemandConfig};
pub use preferences::{
    day_of_week_scores, kendall_distance, rank_weekdays, ranking_ball, sample_preferences,
    PreferenceGenConfig, RankingDistribution,
};
pub use scenarios::assemble_scenarios;
pub use shapes::{build_shape_library, sample_shapes, weekday_template, ShapeGenConfig, ShapeLibrary};
pub use stream::substream;

use crate::domain::DutyConfigError;
use thiserror::Error;

/// Errors raised while generating an instance.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("bad generator config: {0}")]
    BadConfig(String),
    #[error("weekday {weekday} has {got} historical rates, need at least 4")]
    TooFewSamples { weekday: u8, got: usize },
    #[error(transparent)]
    Duty(#[from] DutyConfigError),
    #[error("generated instance failed validation: {0}")]
    InvalidInstance(String),
}
