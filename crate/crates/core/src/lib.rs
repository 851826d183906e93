//! Payoff engine for a buyer, a seller and a tax authority around a single
//! VAT-liable sale.
//!
//! * [`model`]: domain types, exact payoffs per event, audit state and
//!   scenario, and Bayesian expectations.
//! * [`dominance`]: per-agent comparisons, dominant strategies and closed-form
//!   compliance thresholds.
//! * [`coalition`]: the buyer + seller coalition and its affine (θ, γ)
//!   compliance frontiers.
//! * [`oracle`]: brute-force enumeration and bisection that re-derive every
//!   closed form from payoffs alone.
//! * [`region`]: (θ, γ) grid rasterization.
//!
//! Batch work (validation, rasterization) runs on rayon when the `parallel`
//! feature is on; see [`Execution`].

pub mod coalition;
pub mod dominance;
pub mod error;
pub mod exec;
pub mod model;
pub mod oracle;
pub mod presets;
pub mod region;

pub use coalition::{ThresholdLine, Variant};
pub use dominance::{Agent, Preference, Setting, ThresholdResult, ThresholdValue, Verdict};
pub use error::{GridError, ModelError, OracleError};
pub use exec::Execution;
pub use model::{
    AuditRegime, AuditState, Event, PayoffVector, SanctionBaseMode, Scenario, TaxPolicy,
    TransactionEndowments,
};
