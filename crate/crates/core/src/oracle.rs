//! Brute-force validation of the closed forms.
//!
//! Everything here goes through [`expected_payoff`] and
//! [`coalition_payoff`] only: best responses by exhaustive enumeration,
//! thresholds by bisection on the sign of a payoff margin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::{coalition_best_event, coalition_payoff, theta_frontier, Variant};
use crate::dominance::{
    buyer_gamma_threshold, buyer_theta_threshold, dominant_events, maximizers,
    seller_gamma_threshold_elt2, seller_gamma_threshold_ewt, seller_tax_threshold,
    vat_rate_threshold, Agent, Setting, ThresholdResult, ThresholdValue, TIE_TOLERANCE,
};
use crate::error::{ModelError, OracleError};
use crate::exec::Execution;
use crate::model::{
    conservation_residual, expected_payoff, payoff_event, AuditRegime, AuditState, Event,
    SanctionBaseMode, Scenario, TaxPolicy, TransactionEndowments,
};

/// Number of evenly spaced samples used to check single crossing.
pub const MONOTONICITY_SAMPLES: usize = 33;
/// Width of the final bisection bracket.
pub const BISECTION_TOLERANCE: f64 = 1e-10;
/// Allowed gap between a closed-form threshold and its bisection estimate.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;
/// Relative tolerance for conservation residuals.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for the γ-affinity of expected payoffs.
pub const AFFINITY_TOLERANCE: f64 = 1e-12;

/// Where a draw came from, so any failure can be replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DrawTag {
    pub seed: u64,
    pub index: u64,
}

/// One random admissible parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterDraw {
    pub policy: TaxPolicy,
    pub te: TransactionEndowments,
    /// Audit probability used for Bayesian-regime checks.
    pub gamma: f64,
    pub tag: DrawTag,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

impl ParameterDraw {
    /// Draw `index` of the sequence for `seed`.
    ///
    /// Every draw has its own ChaCha stream, so the sequence does not depend
    /// on the order in which draws are generated. Rates are uniform on
    /// `[0, 0.6]`, sanctions on `[0, 1]`, `x_O` log-uniform on `[10, 1e5]`,
    /// `x_I` uniform on `[0, x_O]`, incomes log-uniform on `[1e3, 1e6]`.
    pub fn generate(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut rate = || rng.gen_range(0.0..=0.6);
        let policy = TaxPolicy {
            seller_tax: rate(),
            buyer_tax: rate(),
            vat: rate(),
            vat_discount: rate(),
            deduction_share: rate(),
            vat_sanction: rng.gen_range(0.0..=1.0),
            income_sanction: rng.gen_range(0.0..=1.0),
        };
        let output_value = log_uniform(&mut rng, 10.0, 1e5);
        let te = TransactionEndowments {
            output_value,
            input_value: rng.gen_range(0.0..=output_value),
            seller_income: log_uniform(&mut rng, 1e3, 1e6),
            buyer_income: log_uniform(&mut rng, 1e3, 1e6),
        };
        ParameterDraw {
            policy,
            te,
            gamma: rng.gen_range(0.0..=1.0),
            tag: DrawTag { seed, index },
        }
    }
}

/// Best responses by exhaustive enumeration of expected payoffs.
pub fn oracle_best_response(
    agent: Agent,
    setting: Setting,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
) -> Result<Vec<Event>, ModelError> {
    let payoffs = Event::STRATEGIES
        .iter()
        .map(|&e| {
            expected_payoff(setting.scenario, setting.regime, e, policy, te, setting.mode)
                .map(|pv| agent.payoff(&pv))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(maximizers(&Event::STRATEGIES, &payoffs, TIE_TOLERANCE * te.scale()))
}

/// Parameter swept by [`oracle_threshold`]. Every sweep covers `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariedParameter {
    SellerTax,
    Vat,
    DeductionShare,
    AuditProbability,
}

impl VariedParameter {
    pub const RANGE: (f64, f64) = (0.0, 1.0);
}

/// A pairwise comparison: `first` against `second` for `agent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub agent: Agent,
    pub first: Event,
    pub second: Event,
    pub scenario: Scenario,
    pub regime: AuditRegime,
}

impl Comparison {
    /// Payoff margin (first minus second) with `param` set to `x`.
    pub fn margin(
        &self,
        param: VariedParameter,
        x: f64,
        policy: &TaxPolicy,
        te: &TransactionEndowments,
        mode: SanctionBaseMode,
    ) -> Result<f64, ModelError> {
        let mut policy = *policy;
        let mut regime = self.regime;
        match param {
            VariedParameter::SellerTax => policy.seller_tax = x,
            VariedParameter::Vat => policy.vat = x,
            VariedParameter::DeductionShare => policy.deduction_share = x,
            VariedParameter::AuditProbability => regime = AuditRegime::Bayesian(x),
        }
        let payoff = |event| {
            expected_payoff(self.scenario, regime, event, &policy, te, mode).map(|pv| self.agent.payoff(&pv))
        };
        Ok(payoff(self.first)? - payoff(self.second)?)
    }
}

/// Locates the sign change of `margin` on `[lo, hi]` by bisection.
///
/// Samples [`MONOTONICITY_SAMPLES`] points first and fails with
/// [`OracleError::NonMonotone`] if the signs change more than once. Values
/// within `dead_zone` of zero carry no sign. Returns `None` when there is no
/// sign change.
pub fn bisect_crossing<F>(margin: F, lo: f64, hi: f64, dead_zone: f64) -> Result<Option<f64>, OracleError>
where
    F: Fn(f64) -> Result<f64, ModelError>,
{
    let sign = |m: f64| {
        if m.abs() <= dead_zone {
            0
        } else if m > 0.0 {
            1
        } else {
            -1
        }
    };
    let step = (hi - lo) / (MONOTONICITY_SAMPLES - 1) as f64;
    let mut changes = 0;
    let mut last = 0;
    for k in 0..MONOTONICITY_SAMPLES {
        let s = sign(margin(lo + step * k as f64)?);
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    if changes > 1 {
        return Err(OracleError::NonMonotone { lo, hi, changes });
    }

    let (f_lo, f_hi) = (margin(lo)?, margin(hi)?);
    if f_lo == 0.0 && f_hi != 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 && f_lo != 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    let lo_positive = f_lo > 0.0;
    let (mut a, mut b) = (lo, hi);
    while b - a > BISECTION_TOLERANCE {
        let mid = 0.5 * (a + b);
        let m = margin(mid)?;
        if m == 0.0 {
            return Ok(Some(mid));
        }
        if (m > 0.0) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

fn dead_zone(te: &TransactionEndowments) -> f64 {
    1e-12 * te.scale()
}

/// Value of `param` at which the comparison's margin changes sign, found by
/// bisection over `[0, 1]`.
pub fn oracle_threshold(
    param: VariedParameter,
    comparison: Comparison,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<Option<f64>, OracleError> {
    let (lo, hi) = VariedParameter::RANGE;
    bisect_crossing(|x| comparison.margin(param, x, policy, te, mode), lo, hi, dead_zone(te))
}

/// Deduction share at which joint compliance ties with the variant, by
/// bisection on the coalition payoff gap.
pub fn oracle_frontier_theta(
    variant: Variant,
    gamma: f64,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
) -> Result<Option<f64>, OracleError> {
    let evade = coalition_payoff(variant.event(), gamma, policy, te, mode)?;
    let gap = |theta: f64| {
        let p = TaxPolicy { deduction_share: theta, ..*policy };
        coalition_payoff(Event::Comply, gamma, &p, te, mode).map(|c| c - evade)
    };
    bisect_crossing(gap, 0.0, 1.0, dead_zone(te))
}

/// Aggregate of one named check across all draws.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub evaluated: usize,
    pub failures: usize,
    pub max_deviation: f64,
}

/// Result of [`run_validation`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub draws: usize,
    pub checks: Vec<CheckSummary>,
    /// Descriptions of the first failures, in draw order.
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn failure_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const MAX_REPORTED_FAILURES: usize = 25;

pub const CHECK_NAMES: [&str; 14] = [
    "conservation",
    "bayesian-conservation",
    "paper-literal-residual",
    "affinity",
    "dominance",
    "threshold-seller-tax",
    "threshold-vat-rate",
    "threshold-buyer-theta",
    "threshold-buyer-gamma",
    "threshold-seller-gamma-wt",
    "threshold-seller-gamma-lt2",
    "frontier",
    "coalition-classification",
    "oracle-errors",
];

/// Per-draw tallies, merged in draw order.
struct Tally {
    checks: Vec<CheckSummary>,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: CHECK_NAMES
                .iter()
                .map(|&name| CheckSummary { name, evaluated: 0, failures: 0, max_deviation: 0.0 })
                .collect(),
            failures: Vec::new(),
        }
    }

    fn record(&mut self, check: &'static str, deviation: f64, ok: bool, detail: impl FnOnce() -> String) {
        let c = self
            .checks
            .iter_mut()
            .find(|c| c.name == check)
            .expect("unknown check");
        c.evaluated += 1;
        if deviation.is_nan() || deviation > c.max_deviation {
            c.max_deviation = deviation;
        }
        if !ok {
            c.failures += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(format!("{check}: {}", detail()));
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        for (mine, theirs) in self.checks.iter_mut().zip(other.checks) {
            mine.evaluated += theirs.evaluated;
            mine.failures += theirs.failures;
            if theirs.max_deviation.is_nan() || theirs.max_deviation > mine.max_deviation {
                mine.max_deviation = theirs.max_deviation;
            }
        }
        let room = MAX_REPORTED_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

/// Runs every oracle check over `draws` seeded parameter draws.
///
/// The report is identical for both execution strategies.
pub fn run_validation(seed: u64, draws: usize, exec: Execution) -> ValidationReport {
    let tallies = exec.map_indexed(draws, |i| validate_draw(&ParameterDraw::generate(seed, i as u64)));
    let mut total = Tally::new();
    for t in tallies {
        total.merge(t);
    }
    ValidationReport {
        seed,
        draws,
        checks: total.checks,
        failures: total.failures,
    }
}

/// Threshold agreement: a crossing must match the closed form; no crossing
/// requires the closed form to be a sentinel or to lie outside the range.
fn threshold_agrees(closed: &ThresholdResult, oracle: Option<f64>) -> (bool, f64) {
    let (lo, hi) = VariedParameter::RANGE;
    match (closed.value, oracle) {
        (ThresholdValue::Finite(c), Some(x)) => {
            let d = (c - x).abs();
            (d <= THRESHOLD_TOLERANCE, d)
        }
        (ThresholdValue::Finite(c), None) => {
            let inside = c > lo + THRESHOLD_TOLERANCE && c < hi - THRESHOLD_TOLERANCE;
            (!inside, 0.0)
        }
        (_, Some(_)) => (false, f64::INFINITY),
        (_, None) => (true, 0.0),
    }
}

const GAMMA_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn validate_draw(draw: &ParameterDraw) -> Tally {
    let mut t = Tally::new();
    let (p, te) = (&draw.policy, &draw.te);
    let scale = te.scale();
    let tag = draw.tag;
    let modes = [SanctionBaseMode::Corrected, SanctionBaseMode::PaperLiteral];

    for scenario in Scenario::ALL {
        for audit in AuditState::ALL {
            for event in Event::ALL.into_iter().filter(|e| e.is_defined(scenario, audit)) {
                let rel = match payoff_event(scenario, audit, event, p, te) {
                    Ok(pv) => conservation_residual(&pv, te).abs() / scale,
                    Err(_) => f64::INFINITY,
                };
                t.record("conservation", rel, rel <= CONSERVATION_TOLERANCE, || {
                    format!("{tag:?} {scenario:?}/{audit:?}/{event} residual {rel:e}")
                });
            }
        }

        for &gamma in &GAMMA_GRID {
            let regime = AuditRegime::Bayesian(gamma);
            for event in Event::STRATEGIES {
                let residual = |mode| {
                    expected_payoff(scenario, regime, event, p, te, mode)
                        .map(|pv| conservation_residual(&pv, te))
                        .unwrap_or(f64::INFINITY)
                };
                let rel = residual(SanctionBaseMode::Corrected).abs() / scale;
                t.record("bayesian-conservation", rel, rel <= CONSERVATION_TOLERANCE, || {
                    format!("{tag:?} {scenario:?}/γ={gamma}/{event} residual {rel:e}")
                });

                let expected = if event.is_evasion() && scenario != Scenario::NoTaxes {
                    gamma * p.vat * (1.0 + p.vat_sanction) * (te.output_value - 1.0)
                } else {
                    0.0
                };
                let dev = (residual(SanctionBaseMode::PaperLiteral) - expected).abs() / scale;
                t.record("paper-literal-residual", dev, dev <= CONSERVATION_TOLERANCE, || {
                    format!("{tag:?} {scenario:?}/γ={gamma}/{event} deviation {dev:e}")
                });
            }
        }

        for mode in modes {
            for event in Event::STRATEGIES {
                let at = |g| expected_payoff(scenario, AuditRegime::Bayesian(g), event, p, te, mode);
                let dev = match (at(draw.gamma), at(0.0), at(1.0)) {
                    (Ok(mid), Ok(e0), Ok(e1)) => {
                        let mix = e0.mix(&e1, draw.gamma);
                        [mid.buyer - mix.buyer, mid.seller - mix.seller, mid.government - mix.government]
                            .iter()
                            .fold(0.0_f64, |acc, d| acc.max(d.abs()))
                            / scale
                    }
                    _ => f64::INFINITY,
                };
                t.record("affinity", dev, dev <= AFFINITY_TOLERANCE, || {
                    format!("{tag:?} {scenario:?}/{mode:?}/{event} deviation {dev:e}")
                });
            }
        }

        let regimes = [
            AuditRegime::NoAudit,
            AuditRegime::CertainAudit,
            AuditRegime::Bayesian(draw.gamma),
        ];
        for agent in Agent::ALL {
            for regime in regimes {
                for mode in modes {
                    let setting = Setting::new(scenario, regime, mode);
                    let closed = dominant_events(agent, setting, p, te);
                    let brute = oracle_best_response(agent, setting, p, te);
                    let ok = matches!((&closed, &brute), (Ok(a), Ok(b)) if a == b);
                    t.record("dominance", if ok { 0.0 } else { 1.0 }, ok, || {
                        format!("{tag:?} {agent:?} {setting:?}: closed {closed:?} vs oracle {brute:?}")
                    });
                }
            }
        }
    }

    let threshold = |t: &mut Tally,
                         name: &'static str,
                         param: VariedParameter,
                         cmp: Comparison,
                         mode: SanctionBaseMode,
                         closed: ThresholdResult| {
        let (lo, hi) = VariedParameter::RANGE;
        let m_lo = cmp.margin(param, lo, p, te, mode);
        let m_hi = cmp.margin(param, hi, p, te, mode);
        // Margin identically zero: the comparison carries no threshold.
        if let (Ok(a), Ok(b)) = (m_lo, m_hi) {
            if a.abs() <= dead_zone(te) && b.abs() <= dead_zone(te) {
                return;
            }
        }
        match oracle_threshold(param, cmp, p, te, mode) {
            Ok(found) => {
                let (ok, dev) = threshold_agrees(&closed, found);
                t.record(name, dev, ok, || {
                    format!("{tag:?} {mode:?}: closed {:?} vs bisection {found:?}", closed.value)
                });
            }
            Err(e) => t.record("oracle-errors", f64::INFINITY, false, || format!("{tag:?} {name}: {e}")),
        }
    };

    let seller_lt2 = |regime| Comparison {
        agent: Agent::Seller,
        first: Event::Comply,
        second: Event::EvadeLT2,
        scenario: Scenario::Tax,
        regime,
    };
    let corrected = SanctionBaseMode::Corrected;

    if te.output_value != te.input_value {
        threshold(
            &mut t,
            "threshold-seller-tax",
            VariedParameter::SellerTax,
            seller_lt2(AuditRegime::NoAudit),
            corrected,
            seller_tax_threshold(p, te),
        );
    }
    threshold(
        &mut t,
        "threshold-vat-rate",
        VariedParameter::Vat,
        seller_lt2(AuditRegime::NoAudit),
        corrected,
        vat_rate_threshold(p, te),
    );
    for regime in [AuditRegime::NoAudit, AuditRegime::CertainAudit, AuditRegime::Bayesian(draw.gamma)] {
        for mode in modes {
            let cmp = Comparison {
                agent: Agent::Buyer,
                first: Event::Comply,
                second: Event::EvadeLT1,
                scenario: Scenario::TaxWithDeductions,
                regime,
            };
            threshold(
                &mut t,
                "threshold-buyer-theta",
                VariedParameter::DeductionShare,
                cmp,
                mode,
                buyer_theta_threshold(regime, p, te, mode),
            );
        }
    }
    let bayes = AuditRegime::Bayesian(draw.gamma);
    threshold(
        &mut t,
        "threshold-buyer-gamma",
        VariedParameter::AuditProbability,
        Comparison {
            agent: Agent::Buyer,
            first: Event::Comply,
            second: Event::EvadeLT1,
            scenario: Scenario::Tax,
            regime: bayes,
        },
        corrected,
        buyer_gamma_threshold(p),
    );
    threshold(
        &mut t,
        "threshold-seller-gamma-wt",
        VariedParameter::AuditProbability,
        Comparison {
            agent: Agent::Seller,
            first: Event::Comply,
            second: Event::EvadeWT,
            scenario: Scenario::Tax,
            regime: bayes,
        },
        corrected,
        seller_gamma_threshold_ewt(p, te),
    );
    threshold(
        &mut t,
        "threshold-seller-gamma-lt2",
        VariedParameter::AuditProbability,
        seller_lt2(bayes),
        corrected,
        seller_gamma_threshold_elt2(p, te),
    );

    for mode in modes {
        let mut lines = Vec::new();
        for variant in Variant::ALL {
            let line = match theta_frontier(variant, p, te, mode) {
                Ok(Some(line)) => line,
                other => {
                    t.record("frontier", f64::INFINITY, false, || format!("{tag:?} {variant}: {other:?}"));
                    continue;
                }
            };
            lines.push(line);
            let closed = ThresholdResult::lower_bound(line.at(draw.gamma));
            match oracle_frontier_theta(variant, draw.gamma, p, te, mode) {
                Ok(found) => {
                    let (ok, dev) = threshold_agrees(&closed, found);
                    t.record("frontier", dev, ok, || {
                        format!("{tag:?} {variant}/{mode:?}: line {} vs bisection {found:?}", line.at(draw.gamma))
                    });
                }
                Err(e) => t.record("oracle-errors", f64::INFINITY, false, || format!("{tag:?} frontier: {e}")),
            }
        }
        if lines.len() == Variant::ALL.len() {
            let bound = lines.iter().map(|l| l.at(draw.gamma)).fold(f64::NEG_INFINITY, f64::max);
            let theta = p.deduction_share;
            if (theta - bound).abs() > THRESHOLD_TOLERANCE {
                let predicted = theta > bound;
                let best = coalition_best_event(draw.gamma, p, te, mode);
                let ok = matches!(&best, Ok(b) if b.contains(&Event::Comply) == predicted);
                t.record("coalition-classification", if ok { 0.0 } else { 1.0 }, ok, || {
                    format!("{tag:?} {mode:?} θ={theta} bound={bound}: best {best:?}")
                });
            }
        }
    }
    t
}
