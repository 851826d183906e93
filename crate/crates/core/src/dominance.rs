//! Pairwise strategy comparisons and closed-form compliance thresholds.

use std::fmt;

use crate::error::ModelError;
use crate::model::{
    expected_payoff, AuditRegime, Event, PayoffVector, SanctionBaseMode, Scenario, TaxPolicy,
    TransactionEndowments,
};

/// Relative tolerance for ties, scaled by [`TransactionEndowments::scale`].
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Agent {
    Buyer,
    Seller,
}

impl Agent {
    pub const ALL: [Agent; 2] = [Agent::Buyer, Agent::Seller];

    pub fn payoff(self, pv: &PayoffVector) -> f64 {
        match self {
            Agent::Buyer => pv.buyer,
            Agent::Seller => pv.seller,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Agent::Buyer => "buyer",
            Agent::Seller => "seller",
        }
    }
}

/// Scenario, audit regime and sanction mode under which payoffs are compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting {
    pub scenario: Scenario,
    pub regime: AuditRegime,
    pub mode: SanctionBaseMode,
}

impl Setting {
    pub fn new(scenario: Scenario, regime: AuditRegime, mode: SanctionBaseMode) -> Self {
        Setting { scenario, regime, mode }
    }

    pub fn with_regime(self, regime: AuditRegime) -> Self {
        Setting { regime, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FirstStrict,
    SecondStrict,
    Indifferent,
}

/// Outcome of comparing two events for one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preference {
    pub verdict: Verdict,
    /// Payoff of the first event minus payoff of the second.
    pub margin: f64,
}

impl Preference {
    pub fn classify(margin: f64, tolerance: f64) -> Self {
        let verdict = if margin.abs() <= tolerance {
            Verdict::Indifferent
        } else if margin > 0.0 {
            Verdict::FirstStrict
        } else {
            Verdict::SecondStrict
        };
        Preference { verdict, margin }
    }
}

/// Compares the agent's expected payoff under `first` against `second`.
pub fn compare(
    agent: Agent,
    first: Event,
    second: Event,
    setting: Setting,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<Preference, ModelError> {
    let payoff = |event| {
        expected_payoff(setting.scenario, setting.regime, event, policy, te, setting.mode)
            .map(|pv| agent.payoff(&pv))
    };
    let margin = payoff(first)? - payoff(second)?;
    Ok(Preference::classify(margin, TIE_TOLERANCE * te.scale()))
}

/// Expected payoff gain of each strategy over compliance, from the derived
/// payoff differences rather than from the payoff tables.
fn gains_over_compliance(
    agent: Agent,
    setting: Setting,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<[f64; 4], ModelError> {
    policy.check_finite()?;
    te.check_finite()?;
    setting.regime.validate()?;
    if setting.scenario == Scenario::NoTaxes {
        return Ok([0.0; 4]);
    }
    let gamma = setting.regime.gamma();
    let TaxPolicy {
        seller_tax: ts,
        vat: v,
        vat_discount: delta,
        deduction_share: theta,
        vat_sanction: s_v,
        income_sanction: s_ys,
        ..
    } = *policy;
    let (xo, xi) = (te.output_value, te.input_value);

    Ok(match agent {
        Agent::Buyer => {
            let sanction = match setting.mode {
                SanctionBaseMode::Corrected => xo * v * (1.0 + s_v),
                SanctionBaseMode::PaperLiteral => v * (1.0 + s_v),
            };
            // VAT saved by buying off the books, net of any forgone deduction.
            let saving = match setting.scenario {
                Scenario::TaxWithDeductions => xo * (delta * v - theta * (1.0 + delta * v)),
                _ => xo * v,
            };
            let g = saving - gamma * sanction;
            [0.0, g, g, g]
        }
        Agent::Seller => {
            let sanction = xo * ts * (1.0 + s_ys);
            [
                0.0,
                ts * xo - v * xi * (1.0 - ts) - gamma * sanction,
                ts * (xo - xi) - v * xi - gamma * sanction,
                ts * (xo - xi) - gamma * sanction,
            ]
        }
    })
}

/// Events maximizing the agent's expected payoff, in canonical order
/// `Comply < EvadeLT1 < EvadeLT2 < EvadeWT`. Ties within
/// [`TIE_TOLERANCE`] are all included.
pub fn dominant_events(
    agent: Agent,
    setting: Setting,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<Vec<Event>, ModelError> {
    let gains = gains_over_compliance(agent, setting, policy, te)?;
    Ok(maximizers(&Event::STRATEGIES, &gains, TIE_TOLERANCE * te.scale()))
}

/// Entries whose value is within `tolerance` of the maximum.
pub(crate) fn maximizers(events: &[Event], values: &[f64], tolerance: f64) -> Vec<Event> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    events
        .iter()
        .zip(values)
        .filter(|(_, &v)| v >= best - tolerance)
        .map(|(&e, _)| e)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdValue {
    Finite(f64),
    /// The condition holds for every admissible value.
    AlwaysSatisfied,
    /// The condition for evasion never holds.
    NeverSatisfied,
    /// The defining denominator vanishes.
    Undefined,
}

impl fmt::Display for ThresholdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdValue::Finite(x) => write!(f, "{x}"),
            ThresholdValue::AlwaysSatisfied => f.write_str("always_satisfied"),
            ThresholdValue::NeverSatisfied => f.write_str("never_satisfied"),
            ThresholdValue::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub value: ThresholdValue,
    /// Whether the condition can be met with the parameter inside `[0, 1]`.
    pub feasible_in_unit_interval: bool,
}

impl ThresholdResult {
    /// A rate-valued threshold; feasible when it lies in `[0, 1]`.
    pub fn rate(x: f64) -> Self {
        ThresholdResult {
            value: ThresholdValue::Finite(x),
            feasible_in_unit_interval: (0.0..=1.0).contains(&x),
        }
    }

    /// A lower bound that induces compliance; feasible when it does not exceed
    /// 1. A negative bound means every admissible value complies.
    pub fn lower_bound(x: f64) -> Self {
        ThresholdResult {
            value: ThresholdValue::Finite(x),
            feasible_in_unit_interval: x <= 1.0,
        }
    }

    pub fn sentinel(value: ThresholdValue, feasible: bool) -> Self {
        ThresholdResult {
            value,
            feasible_in_unit_interval: feasible,
        }
    }

    pub fn undefined() -> Self {
        Self::sentinel(ThresholdValue::Undefined, false)
    }

    pub fn finite(&self) -> Option<f64> {
        match self.value {
            ThresholdValue::Finite(x) => Some(x),
            _ => None,
        }
    }
}

/// Seller income-tax rate above which last-transaction evasion without a cost
/// shield beats compliance: `v·x_I / (x_O - x_I)`.
pub fn seller_tax_threshold(policy: &TaxPolicy, te: &TransactionEndowments) -> ThresholdResult {
    let spread = te.value_added();
    if spread == 0.0 {
        return ThresholdResult::undefined();
    }
    if te.input_value == 0.0 {
        return ThresholdResult::rate(0.0);
    }
    ThresholdResult::rate(policy.vat * te.input_value / spread)
}

/// VAT rate below which the same evasion pays: `t_S·(x_O - x_I) / x_I`.
pub fn vat_rate_threshold(policy: &TaxPolicy, te: &TransactionEndowments) -> ThresholdResult {
    if te.input_value == 0.0 {
        return ThresholdResult::sentinel(ThresholdValue::AlwaysSatisfied, true);
    }
    ThresholdResult::rate(policy.seller_tax * te.value_added() / te.input_value)
}

/// Deduction share above which the buyer prefers compliance with deductions:
/// `(vδ - γ·v(1+s_V)) / (1 + vδ)`.
///
/// No audit and certain audit are the `γ = 0` and `γ = 1` cases. In
/// PaperLiteral mode the expected sanction is not proportional to `x_O`, so
/// the sanction term is divided by `x_O`.
pub fn buyer_theta_threshold(
    regime: AuditRegime,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> ThresholdResult {
    if regime.validate().is_err() {
        return ThresholdResult::undefined();
    }
    let gamma = regime.gamma();
    let v = policy.vat;
    let discounted = v * policy.vat_discount;
    let denominator = 1.0 + discounted;
    let sanction = match mode {
        SanctionBaseMode::Corrected => v * (1.0 + policy.vat_sanction),
        SanctionBaseMode::PaperLiteral => {
            if te.output_value == 0.0 {
                return ThresholdResult::undefined();
            }
            v * (1.0 + policy.vat_sanction) / te.output_value
        }
    };
    if denominator == 0.0 {
        return ThresholdResult::undefined();
    }
    ThresholdResult::lower_bound((discounted - gamma * sanction) / denominator)
}

/// Audit probability above which the buyer pays VAT: `1 / (1 + s_V)`.
pub fn buyer_gamma_threshold(policy: &TaxPolicy) -> ThresholdResult {
    let denominator = 1.0 + policy.vat_sanction;
    if denominator == 0.0 {
        return ThresholdResult::undefined();
    }
    ThresholdResult::lower_bound(1.0 / denominator)
}

/// Audit probability above which the seller prefers compliance to
/// whole-transaction evasion: `(x_O - x_I) / (x_O·(1 + s_yS))`.
pub fn seller_gamma_threshold_ewt(policy: &TaxPolicy, te: &TransactionEndowments) -> ThresholdResult {
    let denominator = te.output_value * (1.0 + policy.income_sanction);
    if denominator == 0.0 {
        return ThresholdResult::undefined();
    }
    ThresholdResult::lower_bound(te.value_added() / denominator)
}

/// Audit probability above which the seller prefers compliance to
/// last-transaction evasion without a cost shield:
/// `(t_S(x_O - x_I) - v·x_I) / (t_S·x_O·(1 + s_yS))`.
pub fn seller_gamma_threshold_elt2(policy: &TaxPolicy, te: &TransactionEndowments) -> ThresholdResult {
    let ts = policy.seller_tax;
    let denominator = ts * te.output_value * (1.0 + policy.income_sanction);
    if ts * te.output_value == 0.0 || denominator == 0.0 {
        return ThresholdResult::undefined();
    }
    let gain = ts * te.value_added() - policy.vat * te.input_value;
    if gain < 0.0 {
        return ThresholdResult::sentinel(ThresholdValue::NeverSatisfied, true);
    }
    ThresholdResult::lower_bound(gain / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SanctionBaseMode::{Corrected, PaperLiteral};

    fn policy(ts: f64, v: f64) -> TaxPolicy {
        TaxPolicy {
            seller_tax: ts,
            buyer_tax: 0.33,
            vat: v,
            vat_discount: 1.0,
            deduction_share: 0.0,
            vat_sanction: 0.3,
            income_sanction: 0.3,
        }
    }

    fn te(xo: f64, xi: f64) -> TransactionEndowments {
        TransactionEndowments {
            output_value: xo,
            input_value: xi,
            seller_income: 10_000.0,
            buyer_income: 20_000.0,
        }
    }

    fn tax(regime: AuditRegime) -> Setting {
        Setting::new(Scenario::Tax, regime, Corrected)
    }

    #[test]
    fn buyer_evades_without_audit() {
        let p = compare(
            Agent::Buyer,
            Event::Comply,
            Event::EvadeLT1,
            tax(AuditRegime::NoAudit),
            &policy(0.24, 0.22),
            &te(100.0, 50.0),
        )
        .unwrap();
        assert_eq!(p.verdict, Verdict::SecondStrict);
        assert!((p.margin + 22.0).abs() < 1e-9);
    }

    #[test]
    fn seller_complies_under_certain_audit() {
        let p = compare(
            Agent::Seller,
            Event::Comply,
            Event::EvadeWT,
            tax(AuditRegime::CertainAudit),
            &policy(0.24, 0.22),
            &te(100.0, 50.0),
        )
        .unwrap();
        assert_eq!(p.verdict, Verdict::FirstStrict);
    }

    #[test]
    fn zero_vat_makes_buyer_indifferent() {
        let p = compare(
            Agent::Buyer,
            Event::Comply,
            Event::EvadeLT1,
            tax(AuditRegime::NoAudit),
            &policy(0.24, 0.0),
            &te(100.0, 50.0),
        )
        .unwrap();
        assert_eq!(p.verdict, Verdict::Indifferent);
    }

    #[test]
    fn seller_tax_threshold_cases() {
        let p = policy(0.24, 0.22);
        let r = seller_tax_threshold(&p, &te(10_000.0, 5_000.0));
        assert!((r.finite().unwrap() - 0.22).abs() < 1e-15);
        assert_eq!(seller_tax_threshold(&p, &te(100.0, 0.0)).finite(), Some(0.0));
        assert_eq!(seller_tax_threshold(&p, &te(100.0, 100.0)).value, ThresholdValue::Undefined);
    }

    #[test]
    fn vat_threshold_cases() {
        let r = vat_rate_threshold(&policy(0.24, 0.22), &te(10_000.0, 5_000.0));
        assert!((r.finite().unwrap() - 0.24).abs() < 1e-15);
        let r = vat_rate_threshold(&policy(0.24, 0.22), &te(100.0, 0.0));
        assert_eq!(r.value, ThresholdValue::AlwaysSatisfied);
        assert_eq!(vat_rate_threshold(&policy(0.0, 0.22), &te(100.0, 50.0)).finite(), Some(0.0));
    }

    #[test]
    fn buyer_theta_threshold_cases() {
        let p = policy(0.24, 0.22);
        let t = te(100.0, 50.0);
        let none = buyer_theta_threshold(AuditRegime::NoAudit, &p, &t, Corrected);
        assert!((none.finite().unwrap() - 0.180_327_868_852_459).abs() < 1e-12);
        assert_eq!(buyer_theta_threshold(AuditRegime::Bayesian(0.0), &p, &t, Corrected), none);
        let certain = buyer_theta_threshold(AuditRegime::CertainAudit, &p, &t, Corrected);
        assert!((certain.finite().unwrap() + 0.054_098_360_655_737_7).abs() < 1e-12);
        assert!(certain.feasible_in_unit_interval);
        assert_eq!(
            buyer_theta_threshold(AuditRegime::Bayesian(1.0), &p, &t, Corrected),
            certain
        );
        // gamma * 0.286 / 100 removed from the numerator
        let lit = buyer_theta_threshold(AuditRegime::CertainAudit, &p, &t, PaperLiteral);
        assert!((lit.finite().unwrap() - (0.22 - 0.00286) / 1.22).abs() < 1e-12);
    }

    #[test]
    fn buyer_gamma_threshold_cases() {
        let mut p = policy(0.24, 0.22);
        p.vat_sanction = 0.33;
        assert!((buyer_gamma_threshold(&p).finite().unwrap() - 0.751_879_699_248_12).abs() < 1e-12);
        p.vat_sanction = 0.0;
        assert_eq!(buyer_gamma_threshold(&p).finite(), Some(1.0));
        p.vat_sanction = 1.0;
        assert_eq!(buyer_gamma_threshold(&p).finite(), Some(0.5));
    }

    #[test]
    fn seller_gamma_ewt_cases() {
        let p = policy(0.24, 0.22);
        let r = seller_gamma_threshold_ewt(&p, &te(100.0, 50.0));
        assert!((r.finite().unwrap() - 50.0 / 130.0).abs() < 1e-15);
        assert_eq!(seller_gamma_threshold_ewt(&p, &te(100.0, 100.0)).finite(), Some(0.0));
        let mut q = p;
        q.income_sanction = 0.0;
        assert_eq!(seller_gamma_threshold_ewt(&q, &te(100.0, 0.0)).finite(), Some(1.0));
        assert_eq!(seller_gamma_threshold_ewt(&p, &te(0.0, 0.0)).value, ThresholdValue::Undefined);
    }

    #[test]
    fn seller_gamma_elt2_cases() {
        let p = policy(0.24, 0.22);
        let r = seller_gamma_threshold_elt2(&p, &te(100.0, 50.0));
        assert!((r.finite().unwrap() - 0.032_051_282_051_282).abs() < 1e-12);
        // t_S (x_O - x_I) = v x_I at x_I = t_S x_O / (t_S + v)
        let p = policy(0.25, 0.25);
        assert_eq!(seller_gamma_threshold_elt2(&p, &te(100.0, 50.0)).finite(), Some(0.0));
        let r = seller_gamma_threshold_elt2(&policy(0.1, 0.22), &te(100.0, 50.0));
        assert_eq!(r.value, ThresholdValue::NeverSatisfied);
        let r = seller_gamma_threshold_elt2(&policy(0.0, 0.22), &te(100.0, 50.0));
        assert_eq!(r.value, ThresholdValue::Undefined);
    }

    #[test]
    fn elt2_threshold_reduces_to_seller_tax_threshold_at_zero_audit() {
        // At gamma = 0 the seller is indifferent exactly when t_S equals t̄_S.
        let p = policy(0.22, 0.22);
        let t = te(10_000.0, 5_000.0);
        let tbar = seller_tax_threshold(&p, &t).finite().unwrap();
        let at_bar = TaxPolicy { seller_tax: tbar, ..p };
        assert!(seller_gamma_threshold_elt2(&at_bar, &t).finite().unwrap().abs() < 1e-15);
    }

    #[test]
    fn seller_prefers_lt1_without_audit() {
        let p = policy(0.33, 0.22);
        let set = dominant_events(Agent::Seller, tax(AuditRegime::NoAudit), &p, &te(100.0, 50.0)).unwrap();
        assert_eq!(set, vec![Event::EvadeLT1]);
    }

    #[test]
    fn deductions_above_bound_make_buyer_comply() {
        let mut p = policy(0.24, 0.22);
        p.deduction_share = 0.2;
        let s = Setting::new(Scenario::TaxWithDeductions, AuditRegime::NoAudit, Corrected);
        assert_eq!(dominant_events(Agent::Buyer, s, &p, &te(100.0, 50.0)).unwrap(), vec![Event::Comply]);
    }

    #[test]
    fn certain_audit_aligns_both_agents() {
        let p = policy(0.24, 0.22);
        for agent in Agent::ALL {
            let set = dominant_events(agent, tax(AuditRegime::CertainAudit), &p, &te(100.0, 50.0)).unwrap();
            assert_eq!(set, vec![Event::Comply], "{agent:?}");
        }
    }

    #[test]
    fn buyer_evasion_set_under_no_audit() {
        let set = dominant_events(Agent::Buyer, tax(AuditRegime::NoAudit), &policy(0.24, 0.22), &te(100.0, 50.0))
            .unwrap();
        assert_eq!(set, vec![Event::EvadeLT1, Event::EvadeLT2, Event::EvadeWT]);
    }

    #[test]
    fn no_taxes_all_tie() {
        let s = Setting::new(Scenario::NoTaxes, AuditRegime::NoAudit, Corrected);
        let set = dominant_events(Agent::Seller, s, &policy(0.24, 0.22), &te(100.0, 50.0)).unwrap();
        assert_eq!(set, Event::STRATEGIES.to_vec());
    }
}
