use proptest::prelude::*;

use vat_game::coalition::{coalition_payoff, theta_frontier, Variant};
use vat_game::dominance::{
    buyer_theta_threshold, compare, seller_gamma_threshold_elt2, seller_tax_threshold, Agent, Setting,
    Verdict,
};
use vat_game::model::{conservation_residual, expected_payoff, payoff_event};
use vat_game::{AuditRegime, AuditState, Event, SanctionBaseMode, Scenario, TaxPolicy, TransactionEndowments};

fn policy() -> impl Strategy<Value = TaxPolicy> {
    (
        (0.0..0.99f64, 0.0..0.99f64, 0.0..0.99f64),
        (0.0..=1.0f64, 0.0..=1.0f64),
        (0.0..3.0f64, 0.0..3.0f64),
    )
        .prop_map(|((ts, tb, v), (delta, theta), (sv, sy))| TaxPolicy {
            seller_tax: ts,
            buyer_tax: tb,
            vat: v,
            vat_discount: delta,
            deduction_share: theta,
            vat_sanction: sv,
            income_sanction: sy,
        })
}

fn endowments() -> impl Strategy<Value = TransactionEndowments> {
    (1.0..1e5f64, 0.0..1.5f64, 0.0..1e6f64, 0.0..1e6f64).prop_map(|(xo, ratio, ys, yb)| {
        TransactionEndowments {
            output_value: xo,
            input_value: xo * ratio,
            seller_income: ys,
            buyer_income: yb,
        }
    })
}

const MODES: [SanctionBaseMode; 2] = [SanctionBaseMode::Corrected, SanctionBaseMode::PaperLiteral];

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn every_defined_event_conserves_income(p in policy(), te in endowments()) {
        for scenario in Scenario::ALL {
            for audit in AuditState::ALL {
                for event in Event::ALL.into_iter().filter(|e| e.is_defined(scenario, audit)) {
                    let pv = payoff_event(scenario, audit, event, &p, &te).unwrap();
                    prop_assert!(conservation_residual(&pv, &te).abs() <= 1e-9 * te.scale());
                }
            }
        }
    }

    #[test]
    fn corrected_expectations_conserve_and_literal_leaks(
        p in policy(), te in endowments(), gamma in 0.0..=1.0f64
    ) {
        for scenario in Scenario::ALL {
            for event in Event::STRATEGIES {
                let regime = AuditRegime::Bayesian(gamma);
                let c = expected_payoff(scenario, regime, event, &p, &te, SanctionBaseMode::Corrected).unwrap();
                prop_assert!(conservation_residual(&c, &te).abs() <= 1e-9 * te.scale());
                let l = expected_payoff(scenario, regime, event, &p, &te, SanctionBaseMode::PaperLiteral).unwrap();
                let leak = if event.is_evasion() && scenario != Scenario::NoTaxes {
                    gamma * p.vat * (1.0 + p.vat_sanction) * (te.output_value - 1.0)
                } else {
                    0.0
                };
                prop_assert!((conservation_residual(&l, &te) - leak).abs() <= 1e-9 * te.scale());
                prop_assert_eq!(l.seller, c.seller);
                prop_assert_eq!(l.government, c.government);
            }
        }
    }

    #[test]
    fn expectations_are_affine_in_gamma(p in policy(), te in endowments(), gamma in 0.0..=1.0f64) {
        for mode in MODES {
            for scenario in Scenario::ALL {
                for event in Event::STRATEGIES {
                    let at = |g| expected_payoff(scenario, AuditRegime::Bayesian(g), event, &p, &te, mode).unwrap();
                    let mix = at(0.0).mix(&at(1.0), gamma);
                    let mid = at(gamma);
                    let tol = 1e-12 * te.scale();
                    prop_assert!((mid.buyer - mix.buyer).abs() <= tol);
                    prop_assert!((mid.seller - mix.seller).abs() <= tol);
                    prop_assert!((mid.government - mix.government).abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn compliance_ignores_audits_and_only_compliance_sees_deductions(p in policy(), te in endowments()) {
        for scenario in Scenario::ALL {
            let calm = payoff_event(scenario, AuditState::NotAudited, Event::Comply, &p, &te).unwrap();
            let audited = payoff_event(scenario, AuditState::Audited, Event::Comply, &p, &te).unwrap();
            prop_assert_eq!(calm, audited);
        }
        for audit in AuditState::ALL {
            for event in [Event::EvadeLT1, Event::EvadeLT2, Event::EvadeWT] {
                let t = payoff_event(Scenario::Tax, audit, event, &p, &te).unwrap();
                let td = payoff_event(Scenario::TaxWithDeductions, audit, event, &p, &te).unwrap();
                prop_assert_eq!(t, td);
            }
        }
    }

    #[test]
    fn buyer_theta_bound_falls_with_audit_probability(p in policy(), te in endowments(), g in 0.0..0.99f64) {
        prop_assume!(p.vat > 1e-6);
        for mode in MODES {
            let at = |g| buyer_theta_threshold(AuditRegime::Bayesian(g), &p, &te, mode).finite().unwrap();
            prop_assert!(at(g + 0.01) < at(g));
        }
    }

    #[test]
    fn seller_flips_at_closed_form_threshold(p in policy(), te in endowments()) {
        prop_assume!((te.output_value - te.input_value).abs() > 1e-3 * te.output_value);
        let Some(tbar) = seller_tax_threshold(&p, &te).finite() else { return Ok(()); };
        prop_assume!(tbar > 1e-4 && tbar < 0.99 && te.output_value > te.input_value);
        let setting = Setting::new(Scenario::Tax, AuditRegime::NoAudit, SanctionBaseMode::Corrected);
        let at = |ts: f64| {
            let q = TaxPolicy { seller_tax: ts, ..p };
            compare(Agent::Seller, Event::Comply, Event::EvadeLT2, setting, &q, &te).unwrap().verdict
        };
        prop_assert_eq!(at(tbar - 1e-4), Verdict::FirstStrict);
        prop_assert_eq!(at(tbar + 1e-4), Verdict::SecondStrict);
    }

    #[test]
    fn elt2_gamma_threshold_flips_seller(p in policy(), te in endowments()) {
        prop_assume!(p.seller_tax > 0.01);
        let Some(g) = seller_gamma_threshold_elt2(&p, &te).finite() else { return Ok(()); };
        prop_assume!(g > 1e-3 && g < 0.999);
        let at = |gamma| {
            let s = Setting::new(Scenario::Tax, AuditRegime::Bayesian(gamma), SanctionBaseMode::Corrected);
            compare(Agent::Seller, Event::Comply, Event::EvadeLT2, s, &p, &te).unwrap().verdict
        };
        prop_assert_eq!(at(g - 1e-3), Verdict::SecondStrict);
        prop_assert_eq!(at(g + 1e-3), Verdict::FirstStrict);
    }

    #[test]
    fn frontier_slopes_agree_and_comply_is_affine_in_theta(
        p in policy(), te in endowments(), theta in 0.0..=1.0f64
    ) {
        for mode in MODES {
            let slopes: Vec<f64> = Variant::ALL
                .iter()
                .map(|&v| theta_frontier(v, &p, &te, mode).unwrap().unwrap().slope)
                .collect();
            let scale = slopes[0].abs().max(1.0);
            prop_assert!((slopes[0] - slopes[1]).abs() <= 1e-12 * scale);
            prop_assert!((slopes[0] - slopes[2]).abs() <= 1e-12 * scale);
            prop_assert!(slopes[0] <= 0.0);

            let comply = |t| {
                let q = TaxPolicy { deduction_share: t, ..p };
                coalition_payoff(Event::Comply, 0.5, &q, &te, mode).unwrap()
            };
            let coefficient = te.output_value * (1.0 + p.vat * p.vat_discount);
            let predicted = comply(0.0) + theta * coefficient;
            prop_assert!((comply(theta) - predicted).abs() <= 1e-9 * te.scale());
        }
    }
}
