//! Buyer + seller coalition playing against an auditing government.
//!
//! Compliance is valued under the deduction scheme; evasion payoffs are the
//! same in the taxed and deduction scenarios. Frontiers are rebuilt from the
//! payoff engine by exploiting that the coalition payoff gap is affine in both
//! the deduction share and the audit probability.

use std::fmt;

use crate::dominance::{maximizers, ThresholdResult, ThresholdValue, TIE_TOLERANCE};
use crate::error::ModelError;
use crate::model::{
    expected_payoff, AuditRegime, AuditState, Event, SanctionBaseMode, Scenario, TaxPolicy,
    TransactionEndowments,
};

/// Seller evasion strategy the coalition could agree on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    LT1,
    LT2,
    WT,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::LT1, Variant::LT2, Variant::WT];

    pub fn event(self) -> Event {
        match self {
            Variant::LT1 => Event::EvadeLT1,
            Variant::LT2 => Event::EvadeLT2,
            Variant::WT => Event::EvadeWT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::LT1 => "LT1",
            Variant::LT2 => "LT2",
            Variant::WT => "WT",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Affine compliance frontier `θ(γ) = intercept + slope·γ`. Joint compliance
/// weakly dominates the variant for deduction shares on or above the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdLine {
    pub intercept: f64,
    pub slope: f64,
    pub variant: Variant,
    pub mode: SanctionBaseMode,
}

impl ThresholdLine {
    pub fn at(&self, gamma: f64) -> f64 {
        self.intercept + self.slope * gamma
    }
}

/// Summed buyer and seller expected payoff of a joint strategy.
pub fn coalition_payoff(
    event: Event,
    gamma: f64,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<f64, ModelError> {
    if event == Event::EvadeLTAppendix {
        return Err(ModelError::UndefinedEvent {
            event,
            scenario: Scenario::TaxWithDeductions,
            audit: AuditState::NotAudited,
        });
    }
    let scenario = if event == Event::Comply {
        Scenario::TaxWithDeductions
    } else {
        Scenario::Tax
    };
    let pv = expected_payoff(scenario, AuditRegime::Bayesian(gamma), event, policy, te, mode)?;
    Ok(pv.buyer + pv.seller)
}

/// Compliance frontier against one evasion variant.
///
/// Writes the coalition gap `Comply(θ) - Evade(γ)` as `a + b_θ·θ + b_γ·γ` from
/// payoff evaluations at θ ∈ {0, 1} and γ ∈ {0, 1}, then solves for θ.
/// Returns `None` when the deduction has no effect on the gap
/// (`x_O(1 + vδ) = 0`).
pub fn theta_frontier(
    variant: Variant,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<Option<ThresholdLine>, ModelError> {
    let with_share = |theta| TaxPolicy { deduction_share: theta, ..*policy };
    let comply0 = coalition_payoff(Event::Comply, 0.0, &with_share(0.0), te, mode)?;
    let comply1 = coalition_payoff(Event::Comply, 0.0, &with_share(1.0), te, mode)?;
    let evade0 = coalition_payoff(variant.event(), 0.0, policy, te, mode)?;
    let evade1 = coalition_payoff(variant.event(), 1.0, policy, te, mode)?;

    let base = comply0 - evade0;
    let per_theta = comply1 - comply0;
    let per_gamma = evade0 - evade1;
    if per_theta == 0.0 || te.output_value * (1.0 + policy.vat * policy.vat_discount) == 0.0 {
        return Ok(None);
    }
    Ok(Some(ThresholdLine {
        intercept: -base / per_theta,
        slope: -per_gamma / per_theta,
        variant,
        mode,
    }))
}

/// The three frontiers in variant order.
pub fn frontiers(
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<Vec<Option<ThresholdLine>>, ModelError> {
    Variant::ALL
        .iter()
        .map(|&v| theta_frontier(v, policy, te, mode))
        .collect()
}

/// Audit probability at which compliance holds with no deduction at all,
/// i.e. where the frontier crosses θ = 0.
pub fn gamma_for_compliance_without_deductions(
    variant: Variant,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<ThresholdResult, ModelError> {
    let Some(line) = theta_frontier(variant, policy, te, mode)? else {
        return Ok(ThresholdResult::undefined());
    };
    if line.intercept <= 0.0 {
        return Ok(ThresholdResult::lower_bound(0.0));
    }
    if line.slope == 0.0 {
        return Ok(ThresholdResult::sentinel(ThresholdValue::Undefined, false));
    }
    Ok(ThresholdResult::lower_bound(-line.intercept / line.slope))
}

/// Joint strategies with the highest coalition payoff, in canonical order.
pub fn coalition_best_event(
    gamma: f64,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<Vec<Event>, ModelError> {
    let values = Event::STRATEGIES
        .iter()
        .map(|&e| coalition_payoff(e, gamma, policy, te, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(maximizers(&Event::STRATEGIES, &values, TIE_TOLERANCE * te.scale()))
}
