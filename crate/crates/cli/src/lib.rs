//! Experiment plumbing for `sublinear-compress`: instance loading, estimator
//! dispatch, seeded campaigns comparing estimates with exact costs, and
//! query-budget audits.

pub mod audit;
pub mod campaign;
pub mod estimator;
pub mod instance;

pub use audit::{audit_queries, AuditRow, AuditTable};
pub use campaign::{run_campaign, CampaignConfig, CampaignFile, CampaignResult, TrialRow};
pub use estimator::{EstimatorSpec, Target};
pub use instance::{Instance, InstanceSpec};
