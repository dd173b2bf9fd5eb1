//! Optimistic Hedge dynamics in two-player zero-sum matrix games: learners,
//! learning-rate planning from regret bounds, regret metering, lower-bound
//! instances, and an experiment harness.

pub mod analysis;
pub mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod optimizer;
pub mod play;
pub mod rates;

pub use analysis::{
    lb_dynamic, lb_dynamic_at, lb_external, lb_external_at, nash_gap, oracle_dynamic_regret,
    oracle_regret, oracle_x1, regret_report, Branch, LowerBoundValue, RegretMeter, RegretReport,
    RoundMetrics,
};
pub use error::{Error, Result};
pub use game::{gradients, PayoffMatrix, Strategy};
pub use learners::{
    build_learner, uniform_next, AveragedState, Dynamics, HedgeState, Learner, UniformLearner,
};
pub use optimizer::{
    coeff_unaware, eval_log_fg, gradient_check, minimize, Objective, OptimizeOptions,
    OptimizeResult,
};
pub use play::{play_match, play_match_observed, MatchTrace, Round, TraceMode};
pub use rates::{
    bound_fg, bound_fg_transformed, bound_omega, from_transformed, is_feasible, preset_rates,
    theoretical_upper, to_transformed, Bound, BoundInputs, Preset, RateParams, Target,
    TransformedParams,
};
