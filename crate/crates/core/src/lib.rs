//! Stackelberg prompt pricing for generative AI services.
//!
//! Users with prompt ambiguity `eps` pick a model and a prompt count to
//! maximize `(1 - eps^n) U - n p`; the platform sets per-prompt prices
//! anticipating those choices. [`user_strategy`] solves the user side,
//! [`homogeneous`] prices a population sharing one `eps`, and
//! [`heterogeneous`] prices a population with an ambiguity density.

pub mod distribution;
pub mod error;
pub mod heterogeneous;
pub mod homogeneous;
pub mod model;
pub mod numeric;
pub mod user_strategy;

pub use distribution::AmbiguityDistribution;
pub use error::{Error, Result};
pub use heterogeneous::{
    cost_based_pricing, grid_oracle, opp, opp_with_trace, platform_payoff, preference_threshold,
    price_upper_bound, segment_roots, single_model_price, utility_based_pricing, Method, OppConfig,
    OppTraceRow, PricingOutcome, SegmentRoots,
};
pub use homogeneous::{
    classify_cost_shape, homogeneous_payoff_curve, optimal_homogeneous_price, sigma, CostShape,
    HomogeneousPoint, HomogeneousSolution, Sigma,
};
pub use model::{Ambiguity, GaiModel, ModelSet, PriceSchedule};
pub use numeric::{find_root_bracketed, golden_section_max, integrate, QuadratureConfig};
pub use user_strategy::{
    classify_prompt_shape, optimal_prompt_count, optimal_user_payoff, prompt_upper_bound,
    select_model, user_payoff, PromptCount, PromptShape, UserDecision,
};
