//! Domain types and the payoff engine.
//!
//! Every payoff is an exact closed-form function of the fiscal rates and the
//! transaction endowments. Bayesian expectations are built as γ-mixtures of
//! the not-audited and audited payoffs, never from separate formulas.

use std::fmt;

use crate::error::ModelError;

/// Fiscal rates in force for the transaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxPolicy {
    /// Seller's marginal income-tax rate.
    pub seller_tax: f64,
    /// Buyer's marginal income-tax rate.
    pub buyer_tax: f64,
    /// VAT rate.
    pub vat: f64,
    /// Multiplier on the VAT rate under the deduction scheme (1 = full VAT).
    pub vat_discount: f64,
    /// Share of the documented expense deductible from the buyer's income tax.
    pub deduction_share: f64,
    /// Surcharge on evaded VAT when audited.
    pub vat_sanction: f64,
    /// Surcharge on the seller's undeclared income tax when audited.
    pub income_sanction: f64,
}

/// Values of the transaction and the parties' incomes before it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransactionEndowments {
    pub output_value: f64,
    pub input_value: f64,
    pub seller_income: f64,
    pub buyer_income: f64,
}

impl TaxPolicy {
    /// Field names paired with values, in declaration order.
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("t_S", self.seller_tax),
            ("t_B", self.buyer_tax),
            ("v", self.vat),
            ("delta", self.vat_discount),
            ("theta", self.deduction_share),
            ("s_V", self.vat_sanction),
            ("s_yS", self.income_sanction),
        ]
    }

    pub fn check_finite(&self) -> Result<(), ModelError> {
        check_finite(&self.fields())
    }

    /// Checks the admissible ranges: income-tax and VAT rates in `[0, 1)`,
    /// discount and deduction share in `[0, 1]`, sanctions non-negative.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.check_finite()?;
        for (name, value) in self.fields() {
            let ok = match name {
                "t_S" | "t_B" | "v" => (0.0..1.0).contains(&value),
                "delta" | "theta" => (0.0..=1.0).contains(&value),
                _ => value >= 0.0,
            };
            if !ok {
                return Err(ModelError::Inadmissible { field: name, value });
            }
        }
        Ok(())
    }
}

impl TransactionEndowments {
    pub fn fields(&self) -> [(&'static str, f64); 4] {
        [
            ("x_O", self.output_value),
            ("x_I", self.input_value),
            ("y_S", self.seller_income),
            ("y_B", self.buyer_income),
        ]
    }

    pub fn check_finite(&self) -> Result<(), ModelError> {
        check_finite(&self.fields())
    }

    /// All fields finite and non-negative. `x_I <= x_O` is not required.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.check_finite()?;
        for (field, value) in self.fields() {
            if value < 0.0 {
                return Err(ModelError::Inadmissible { field, value });
            }
        }
        Ok(())
    }

    /// Taxable value added of the transaction, `x_O - x_I`.
    pub fn value_added(&self) -> f64 {
        self.output_value - self.input_value
    }

    /// Income that survives any reallocation: `y_B + y_S - x_I`.
    pub fn social_income(&self) -> f64 {
        self.buyer_income + self.seller_income - self.input_value
    }

    /// Magnitude used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.buyer_income.abs()
            + self.seller_income.abs()
            + self.output_value.abs()
            + self.input_value.abs()
            + 1.0
    }
}

fn check_finite(fields: &[(&'static str, f64)]) -> Result<(), ModelError> {
    match fields.iter().find(|(_, v)| !v.is_finite()) {
        Some(&(field, value)) => Err(ModelError::NonFinite { field, value }),
        None => Ok(()),
    }
}

/// Fiscal rules in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    NoTaxes,
    Tax,
    TaxWithDeductions,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::NoTaxes, Scenario::Tax, Scenario::TaxWithDeductions];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::NoTaxes => "no-taxes",
            Scenario::Tax => "tax",
            Scenario::TaxWithDeductions => "tax-with-deductions",
        }
    }
}

/// Realized audit state of a single play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuditState {
    NotAudited,
    Audited,
}

impl AuditState {
    pub const ALL: [AuditState; 2] = [AuditState::NotAudited, AuditState::Audited];
}

/// The tax authority's audit behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditRegime {
    NoAudit,
    CertainAudit,
    /// Audit with probability `gamma`.
    Bayesian(f64),
}

impl AuditRegime {
    /// Audit probability implied by the regime.
    pub fn gamma(self) -> f64 {
        match self {
            AuditRegime::NoAudit => 0.0,
            AuditRegime::CertainAudit => 1.0,
            AuditRegime::Bayesian(g) => g,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AuditRegime::NoAudit => "no-audit",
            AuditRegime::CertainAudit => "certain-audit",
            AuditRegime::Bayesian(_) => "bayesian",
        }
    }

    pub fn validate(self) -> Result<(), ModelError> {
        let g = self.gamma();
        if (0.0..=1.0).contains(&g) {
            Ok(())
        } else {
            Err(ModelError::InvalidProbability(g))
        }
    }
}

/// Joint buyer/seller strategy profile.
///
/// Only the diagonal of the buyer × seller matrix is defined; mixed profiles
/// such as "buyer complies, seller evades" cannot be expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Comply,
    /// Last-transaction evasion; the seller deducts input costs including
    /// input VAT from taxable income.
    EvadeLT1,
    /// Last-transaction evasion; the seller bears input costs without any
    /// tax shield.
    EvadeLT2,
    /// Whole-transaction evasion; no VAT on the chain, no cost deduction.
    EvadeWT,
    /// Last-transaction evasion as tabulated in the worked spreadsheet: input
    /// costs deducted from taxable income, input VAT unrecovered. Defined only
    /// for `(Tax, NotAudited)`.
    EvadeLTAppendix,
}

impl Event {
    /// The four strategy profiles of the game, in canonical order.
    pub const STRATEGIES: [Event; 4] = [Event::Comply, Event::EvadeLT1, Event::EvadeLT2, Event::EvadeWT];

    pub const ALL: [Event; 5] = [
        Event::Comply,
        Event::EvadeLT1,
        Event::EvadeLT2,
        Event::EvadeWT,
        Event::EvadeLTAppendix,
    ];

    pub fn is_evasion(self) -> bool {
        self != Event::Comply
    }

    pub fn name(self) -> &'static str {
        match self {
            Event::Comply => "comply",
            Event::EvadeLT1 => "evade-lt1",
            Event::EvadeLT2 => "evade-lt2",
            Event::EvadeWT => "evade-wt",
            Event::EvadeLTAppendix => "evade-lt-appendix",
        }
    }

    pub fn from_name(name: &str) -> Option<Event> {
        Event::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Whether the event has a payoff under the given scenario and audit state.
    pub fn is_defined(self, scenario: Scenario, audit: AuditState) -> bool {
        self != Event::EvadeLTAppendix
            || (scenario == Scenario::Tax && audit == AuditState::NotAudited)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the buyer's expected VAT sanction is valued in Bayesian expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SanctionBaseMode {
    /// `γ·x_O·v(1+s_V)`, the exact mixture of the audited and not-audited
    /// payoffs. Conserves total income.
    #[default]
    Corrected,
    /// `γ·v(1+s_V)` with the `x_O` factor dropped, as in the published
    /// Bayesian and coalition derivations. Does not conserve total income.
    PaperLiteral,
}

impl SanctionBaseMode {
    pub fn name(self) -> &'static str {
        match self {
            SanctionBaseMode::Corrected => "corrected",
            SanctionBaseMode::PaperLiteral => "paper-literal",
        }
    }
}

/// Net incomes of buyer, seller and government, in currency units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PayoffVector {
    pub buyer: f64,
    pub seller: f64,
    pub government: f64,
}

impl PayoffVector {
    pub fn total(&self) -> f64 {
        self.buyer + self.seller + self.government
    }

    /// `(1 - w)·self + w·other`, componentwise.
    pub fn mix(&self, other: &PayoffVector, w: f64) -> PayoffVector {
        PayoffVector {
            buyer: (1.0 - w) * self.buyer + w * other.buyer,
            seller: (1.0 - w) * self.seller + w * other.seller,
            government: (1.0 - w) * self.government + w * other.government,
        }
    }
}

/// Government revenue split by stream. Audit sanctions are booked with the
/// tax they surcharge: VAT sanctions under `vat`, income-tax sanctions under
/// `seller_income_tax`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RevenueBreakdown {
    pub seller_income_tax: f64,
    pub buyer_income_tax: f64,
    pub vat: f64,
}

impl RevenueBreakdown {
    pub fn total(&self) -> f64 {
        self.seller_income_tax + self.buyer_income_tax + self.vat
    }
}

/// Payoffs with the government's side itemized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Outcome {
    pub buyer: f64,
    pub seller: f64,
    pub revenue: RevenueBreakdown,
}

impl Outcome {
    pub fn payoffs(&self) -> PayoffVector {
        PayoffVector {
            buyer: self.buyer,
            seller: self.seller,
            government: self.revenue.total(),
        }
    }
}

/// Itemized payoffs of a single play with a realized audit state.
pub fn outcome(
    scenario: Scenario,
    audit: AuditState,
    event: Event,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<Outcome, ModelError> {
    policy.check_finite()?;
    te.check_finite()?;
    if !event.is_defined(scenario, audit) {
        return Err(ModelError::UndefinedEvent { event, scenario, audit });
    }

    let TaxPolicy {
        seller_tax: ts,
        buyer_tax: tb,
        vat: v,
        vat_discount: delta,
        deduction_share: theta,
        vat_sanction: s_v,
        income_sanction: s_ys,
    } = *policy;
    let TransactionEndowments {
        output_value: xo,
        input_value: xi,
        seller_income: ys,
        buyer_income: yb,
    } = *te;

    if scenario == Scenario::NoTaxes {
        return Ok(Outcome {
            buyer: yb - xo,
            seller: ys + xo - xi,
            revenue: RevenueBreakdown::default(),
        });
    }

    let buyer_net = (1.0 - tb) * yb;
    let buyer_tax = tb * yb;

    let mut out = match event {
        Event::Comply => {
            let (v_eff, deduction) = match scenario {
                Scenario::TaxWithDeductions => {
                    let v_eff = delta * v;
                    (v_eff, theta * xo * (1.0 + v_eff))
                }
                _ => (v, 0.0),
            };
            Outcome {
                buyer: buyer_net - xo * (1.0 + v_eff) + deduction,
                seller: (1.0 - ts) * (ys + xo - xi),
                revenue: RevenueBreakdown {
                    seller_income_tax: ts * (ys + xo - xi),
                    buyer_income_tax: buyer_tax - deduction,
                    vat: xo * v_eff,
                },
            }
        }
        Event::EvadeLT1 => {
            let base = ys - xi * (1.0 + v);
            Outcome {
                buyer: buyer_net - xo,
                seller: (1.0 - ts) * base + xo,
                revenue: RevenueBreakdown {
                    seller_income_tax: ts * base,
                    buyer_income_tax: buyer_tax,
                    vat: v * xi,
                },
            }
        }
        Event::EvadeLT2 => Outcome {
            buyer: buyer_net - xo,
            seller: (1.0 - ts) * ys - xi * (1.0 + v) + xo,
            revenue: RevenueBreakdown {
                seller_income_tax: ts * ys,
                buyer_income_tax: buyer_tax,
                vat: v * xi,
            },
        },
        Event::EvadeWT => Outcome {
            buyer: buyer_net - xo,
            seller: (1.0 - ts) * ys + xo - xi,
            revenue: RevenueBreakdown {
                seller_income_tax: ts * ys,
                buyer_income_tax: buyer_tax,
                vat: 0.0,
            },
        },
        Event::EvadeLTAppendix => Outcome {
            buyer: buyer_net - xo,
            seller: (1.0 - ts) * (ys - xi) + xo - v * xi,
            revenue: RevenueBreakdown {
                seller_income_tax: ts * (ys - xi),
                buyer_income_tax: buyer_tax,
                vat: v * xi,
            },
        },
    };

    if audit == AuditState::Audited && event.is_evasion() {
        let vat_penalty = xo * v * (1.0 + s_v);
        let income_penalty = xo * ts * (1.0 + s_ys);
        out.buyer -= vat_penalty;
        out.seller -= income_penalty;
        out.revenue.vat += vat_penalty;
        out.revenue.seller_income_tax += income_penalty;
    }
    Ok(out)
}

/// Payoffs of a single play with a realized audit state.
pub fn payoff_event(
    scenario: Scenario,
    audit: AuditState,
    event: Event,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<PayoffVector, ModelError> {
    outcome(scenario, audit, event, policy, te).map(|o| o.payoffs())
}

/// Expected payoffs under an audit regime.
///
/// Corrected mode returns `(1-γ)·P(NotAudited) + γ·P(Audited)`. PaperLiteral
/// mode replaces the buyer's expected evasion payoff with
/// `P_B(NotAudited) - γ·v(1+s_V)`. At `γ = 0` (resp. `1`) only the
/// not-audited (resp. audited) branch is evaluated.
pub fn expected_payoff(
    scenario: Scenario,
    regime: AuditRegime,
    event: Event,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<PayoffVector, ModelError> {
    regime.validate()?;
    let gamma = regime.gamma();
    let calm = || payoff_event(scenario, AuditState::NotAudited, event, policy, te);
    let audited = || payoff_event(scenario, AuditState::Audited, event, policy, te);

    let mut pv = if gamma == 0.0 {
        calm()?
    } else if gamma == 1.0 {
        audited()?
    } else {
        calm()?.mix(&audited()?, gamma)
    };

    if mode == SanctionBaseMode::PaperLiteral
        && event.is_evasion()
        && scenario != Scenario::NoTaxes
        && gamma != 0.0
    {
        let calm_buyer = calm()?.buyer;
        pv.buyer = calm_buyer - gamma * policy.vat * (1.0 + policy.vat_sanction);
    }
    Ok(pv)
}

/// `pv.total() - (y_B + y_S - x_I)`; zero whenever taxes and sanctions only
/// reallocate income.
pub fn conservation_residual(pv: &PayoffVector, te: &TransactionEndowments) -> f64 {
    pv.total() - te.social_income()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn appendix() -> (TaxPolicy, TransactionEndowments) {
        (
            TaxPolicy {
                seller_tax: 0.24,
                buyer_tax: 0.33,
                vat: 0.22,
                vat_discount: 1.0,
                deduction_share: 0.10,
                vat_sanction: 0.3,
                income_sanction: 0.3,
            },
            TransactionEndowments {
                output_value: 10_000.0,
                input_value: 5_000.0,
                seller_income: 10_000.0,
                buyer_income: 20_000.0,
            },
        )
    }

    fn assert_pv(pv: PayoffVector, b: f64, s: f64, g: f64) {
        assert!((pv.buyer - b).abs() < 1e-9, "buyer {} != {}", pv.buyer, b);
        assert!((pv.seller - s).abs() < 1e-9, "seller {} != {}", pv.seller, s);
        assert!((pv.government - g).abs() < 1e-9, "gov {} != {}", pv.government, g);
    }

    #[test]
    fn full_compliance_matches_spreadsheet() {
        let (p, te) = appendix();
        let pv = payoff_event(Scenario::Tax, AuditState::NotAudited, Event::Comply, &p, &te).unwrap();
        assert_pv(pv, 1200.0, 11400.0, 12400.0);
    }

    #[test]
    fn no_taxes_is_identity_reallocation() {
        let (p, te) = appendix();
        for event in Event::STRATEGIES {
            for audit in AuditState::ALL {
                let pv = payoff_event(Scenario::NoTaxes, audit, event, &p, &te).unwrap();
                assert_pv(pv, 10000.0, 15000.0, 0.0);
            }
        }
    }

    #[test]
    fn lt1_not_audited() {
        let (p, te) = appendix();
        let pv = payoff_event(Scenario::Tax, AuditState::NotAudited, Event::EvadeLT1, &p, &te).unwrap();
        assert_pv(pv, 3400.0, 12964.0, 8636.0);
    }

    #[test]
    fn wt_audited() {
        let (p, te) = appendix();
        let pv = payoff_event(Scenario::Tax, AuditState::Audited, Event::EvadeWT, &p, &te).unwrap();
        assert_pv(pv, 540.0, 9480.0, 14980.0);
        assert!(conservation_residual(&pv, &te).abs() < 1e-9);
    }

    #[test]
    fn compliance_with_deductions() {
        let (p, te) = appendix();
        let pv = payoff_event(Scenario::TaxWithDeductions, AuditState::NotAudited, Event::Comply, &p, &te)
            .unwrap();
        assert_pv(pv, 2420.0, 11400.0, 11180.0);
    }

    #[test]
    fn appendix_variant_only_in_its_cell() {
        let (p, te) = appendix();
        let pv = payoff_event(Scenario::Tax, AuditState::NotAudited, Event::EvadeLTAppendix, &p, &te)
            .unwrap();
        assert_pv(pv, 3400.0, 12700.0, 8900.0);
        for (scenario, audit) in [
            (Scenario::Tax, AuditState::Audited),
            (Scenario::NoTaxes, AuditState::NotAudited),
            (Scenario::TaxWithDeductions, AuditState::NotAudited),
        ] {
            let err = payoff_event(scenario, audit, Event::EvadeLTAppendix, &p, &te).unwrap_err();
            assert!(matches!(err, ModelError::UndefinedEvent { .. }));
        }
        let err = expected_payoff(
            Scenario::Tax,
            AuditRegime::Bayesian(0.5),
            Event::EvadeLTAppendix,
            &p,
            &te,
            SanctionBaseMode::Corrected,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::UndefinedEvent { .. }));
    }

    #[test]
    fn rejects_non_finite() {
        let (mut p, te) = appendix();
        p.vat = f64::NAN;
        let err = payoff_event(Scenario::Tax, AuditState::NotAudited, Event::Comply, &p, &te).unwrap_err();
        assert!(matches!(err, ModelError::NonFinite { field: "v", .. }));
        let (p, mut te) = appendix();
        te.input_value = f64::INFINITY;
        assert!(payoff_event(Scenario::Tax, AuditState::NotAudited, Event::Comply, &p, &te).is_err());
    }

    #[test]
    fn bayesian_endpoints_and_midpoint() {
        let (p, te) = appendix();
        let m = SanctionBaseMode::Corrected;
        let e0 = expected_payoff(Scenario::Tax, AuditRegime::Bayesian(0.0), Event::EvadeWT, &p, &te, m).unwrap();
        let calm = payoff_event(Scenario::Tax, AuditState::NotAudited, Event::EvadeWT, &p, &te).unwrap();
        assert_eq!(e0, calm);
        let half = expected_payoff(Scenario::Tax, AuditRegime::Bayesian(0.5), Event::EvadeWT, &p, &te, m).unwrap();
        assert!((half.buyer - 1970.0).abs() < 1e-9);
        let e1 = expected_payoff(Scenario::Tax, AuditRegime::Bayesian(1.0), Event::EvadeLT2, &p, &te, m).unwrap();
        let audited = payoff_event(Scenario::Tax, AuditState::Audited, Event::EvadeLT2, &p, &te).unwrap();
        assert_eq!(e1, audited);
    }

    #[test]
    fn gamma_outside_unit_interval_rejected() {
        let (p, te) = appendix();
        let err = expected_payoff(
            Scenario::Tax,
            AuditRegime::Bayesian(1.2),
            Event::Comply,
            &p,
            &te,
            SanctionBaseMode::Corrected,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidProbability(_)));
    }

    #[test]
    fn paper_literal_buyer_shortfall() {
        let (p, te) = appendix();
        let g = 0.4;
        let lit = expected_payoff(
            Scenario::Tax,
            AuditRegime::Bayesian(g),
            Event::EvadeLT1,
            &p,
            &te,
            SanctionBaseMode::PaperLiteral,
        )
        .unwrap();
        let expect = g * 0.22 * 1.3 * (10_000.0 - 1.0);
        assert!((conservation_residual(&lit, &te) - expect).abs() < 1e-9);
    }

    #[test]
    fn deductions_collapse_to_tax_at_zero_share() {
        let (mut p, te) = appendix();
        p.deduction_share = 0.0;
        p.vat_discount = 1.0;
        for audit in AuditState::ALL {
            let td = payoff_event(Scenario::TaxWithDeductions, audit, Event::Comply, &p, &te).unwrap();
            let t = payoff_event(Scenario::Tax, audit, Event::Comply, &p, &te).unwrap();
            assert_eq!(td, t);
        }
    }

    #[test]
    fn revenue_streams() {
        let (p, te) = appendix();
        let o = outcome(Scenario::Tax, AuditState::NotAudited, Event::EvadeLTAppendix, &p, &te).unwrap();
        assert!((o.revenue.seller_income_tax - 1200.0).abs() < 1e-9);
        assert!((o.revenue.buyer_income_tax - 6600.0).abs() < 1e-9);
        assert!((o.revenue.vat - 1100.0).abs() < 1e-9);
    }

    #[test]
    fn validate_ranges() {
        let (mut p, te) = appendix();
        assert!(p.validate().is_ok() && te.validate().is_ok());
        p.vat = 1.0;
        assert!(matches!(p.validate(), Err(ModelError::Inadmissible { field: "v", .. })));
        let (mut p, _) = appendix();
        p.income_sanction = -0.1;
        assert!(p.validate().is_err());
    }
}
