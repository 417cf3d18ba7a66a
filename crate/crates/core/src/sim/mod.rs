//! Closed-loop simulation engine: state layout, system wiring, fixed-step
//! integration, and run summaries.

pub mod closed_loop;
pub mod integrate;
pub mod layout;
pub mod metrics;

pub use closed_loop::{ClosedLoop, EstimatorMode, EvalWorkspace, PlayerSim};
pub use integrate::{integrate, rk4_step, DivergenceReport, IntegrationParams, RunLog, WarmupParams};
pub use layout::{PlayerShape, Segment, StateLayout, StateParts};
pub use metrics::{compute as compute_metrics, error_series, ChannelMetrics, Metrics, StateMetric};
