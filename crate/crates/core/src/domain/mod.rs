//! Instance data model.
//!
//! Everything a solve needs is collected in an [`Instance`]: the horizon,
//! the days-off pattern catalog, the duty catalog, known demand, demand
//! scenarios per day, employee preferences, absence probabilities and cost
//! coefficients. Instances serialize to a versioned JSON document and are
//! validated structurally by [`validate_instance`].

mod absence;
mod duty;
mod horizon;
mod instance;
mod money;
mod pattern;
mod preference;
mod scenario;
mod solution;

pub use absence::{AbsenceModel, AbsenceVariant};
pub use duty::{build_duty_catalog, duty_cost, Duty, DutyConfig, DutyConfigError};
pub use horizon::{weekday_name, Horizon, SATURDAY, SUNDAY};
pub use instance::{
    validate_instance, CostCoefficients, Instance, Provenance, Violation, SCHEMA_VERSION,
};
pub use money::Cost;
pub use pattern::{build_pattern_catalog, DaysOffPattern, NUM_PATTERNS};
pub use preference::PreferenceProfile;
pub use scenario::DailyScenario;
pub use solution::{FirstStageSolution, SecondStageSolution};
