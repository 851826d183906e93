//! One function per subcommand. Each returns tables; writing them out is the
//! caller's job.

use std::path::{Path, PathBuf};

use vat_game::coalition::{frontiers, gamma_for_compliance_without_deductions, Variant};
use vat_game::dominance::{
    buyer_gamma_threshold, buyer_theta_threshold, seller_gamma_threshold_elt2,
    seller_gamma_threshold_ewt, seller_tax_threshold, vat_rate_threshold,
};
use vat_game::model::{conservation_residual, expected_payoff, outcome};
use vat_game::oracle::{run_validation, ValidationReport};
use vat_game::region::{rasterize, Axis, RegionGrid};
use vat_game::{
    AuditRegime, AuditState, Event, Execution, SanctionBaseMode, Scenario, ThresholdResult,
    ThresholdValue,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::{Cell, Table};

pub const PAYOFF_COLUMNS: [&str; 9] = [
    "scenario", "regime", "gamma", "event", "y_buyer", "y_seller", "y_gov", "total", "residual",
];
pub const THRESHOLD_COLUMNS: [&str; 6] = ["name", "equation", "value", "slope", "feasible", "mode"];
pub const REGION_COLUMNS: [&str; 4] = ["theta", "gamma", "best_event", "complies"];
pub const FRONTIER_COLUMNS: [&str; 4] = ["variant", "intercept", "slope", "mode"];
pub const APPENDIX_COLUMNS: [&str; 5] = ["column", "row", "computed", "published", "deviation"];
pub const VALIDATION_COLUMNS: [&str; 4] = ["check", "evaluated", "failures", "max_deviation"];

pub fn parse_scenario(s: &str) -> Result<Scenario, CliError> {
    Scenario::ALL
        .into_iter()
        .find(|sc| sc.name() == s)
        .ok_or_else(|| CliError::Usage(format!("unknown scenario {s:?} (no-taxes, tax, tax-with-deductions)")))
}

pub fn parse_event(s: &str) -> Result<Event, CliError> {
    Event::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Event::ALL.iter().map(|e| e.name()).collect();
        CliError::Usage(format!("unknown event {s:?} ({})", names.join(", ")))
    })
}

/// `--regime` and `--gamma` together. A bare `--gamma` means a Bayesian audit.
pub fn parse_regime(name: Option<&str>, gamma: Option<f64>) -> Result<AuditRegime, CliError> {
    let regime = match (name, gamma) {
        (None, None) | (Some("no-audit"), None) => AuditRegime::NoAudit,
        (Some("certain-audit"), None) => AuditRegime::CertainAudit,
        (Some("bayesian") | None, Some(g)) => AuditRegime::Bayesian(g),
        (Some("bayesian"), None) => return Err(CliError::Usage("--regime bayesian needs --gamma".into())),
        (Some(r @ ("no-audit" | "certain-audit")), Some(_)) => {
            return Err(CliError::Usage(format!("--gamma only applies to --regime bayesian, not {r}")))
        }
        (Some(r), _) => {
            return Err(CliError::Usage(format!(
                "unknown regime {r:?} (no-audit, certain-audit, bayesian)"
            )))
        }
    };
    regime.validate()?;
    Ok(regime)
}

/// Parses `min,max,step`.
pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("axis {s:?} is not min,max,step")))?;
    match parts[..] {
        [min, max, step] => Ok(Axis::new(min, max, step)),
        _ => Err(CliError::Usage(format!("axis {s:?} is not min,max,step"))),
    }
}

/// Expected payoffs of every strategy, or of `event` alone. The appendix
/// variant is listed whenever it is defined for the request.
pub fn payoffs(
    cfg: &RunConfig,
    scenario: Scenario,
    regime: AuditRegime,
    event: Option<Event>,
) -> Result<Table, CliError> {
    let events = match event {
        Some(e) => vec![e],
        None => {
            let mut v = Event::STRATEGIES.to_vec();
            if regime.gamma() == 0.0 && Event::EvadeLTAppendix.is_defined(scenario, AuditState::NotAudited) {
                v.push(Event::EvadeLTAppendix);
            }
            v
        }
    };
    let mut table = Table::new(&PAYOFF_COLUMNS);
    for e in events {
        let pv = expected_payoff(scenario, regime, e, &cfg.policy, &cfg.endowments, cfg.mode)?;
        table.push(vec![
            scenario.name().into(),
            regime.name().into(),
            regime.gamma().into(),
            e.name().into(),
            pv.buyer.into(),
            pv.seller.into(),
            pv.government.into(),
            pv.total().into(),
            conservation_residual(&pv, &cfg.endowments).into(),
        ]);
    }
    Ok(table)
}

fn value_cell(r: &ThresholdResult) -> Cell {
    match r.value {
        ThresholdValue::Finite(x) => Cell::Num(x),
        other => Cell::Text(other.to_string()),
    }
}

/// Every closed-form threshold and the three coalition frontiers. `gamma` is
/// the audit probability used for the Bayesian buyer row.
pub fn thresholds(cfg: &RunConfig, gamma: f64) -> Result<Table, CliError> {
    let regime = AuditRegime::Bayesian(gamma);
    regime.validate()?;
    let (p, te, mode) = (&cfg.policy, &cfg.endowments, cfg.mode);
    let sanction = match mode {
        SanctionBaseMode::Corrected => "v*(1+s_V)",
        SanctionBaseMode::PaperLiteral => "v*(1+s_V)/x_O",
    };
    let rows: Vec<(String, String, ThresholdResult)> = vec![
        ("seller-tax".into(), "v*x_I/(x_O-x_I)".into(), seller_tax_threshold(p, te)),
        ("vat-rate".into(), "t_S*(x_O-x_I)/x_I".into(), vat_rate_threshold(p, te)),
        (
            "buyer-theta-no-audit".into(),
            "v*delta/(1+v*delta)".into(),
            buyer_theta_threshold(AuditRegime::NoAudit, p, te, mode),
        ),
        (
            "buyer-theta-certain-audit".into(),
            format!("(v*delta-{sanction})/(1+v*delta)"),
            buyer_theta_threshold(AuditRegime::CertainAudit, p, te, mode),
        ),
        (
            "buyer-theta-bayesian".into(),
            format!("(v*delta-gamma*{sanction})/(1+v*delta)"),
            buyer_theta_threshold(regime, p, te, mode),
        ),
        ("buyer-gamma".into(), "1/(1+s_V)".into(), buyer_gamma_threshold(p)),
        (
            "seller-gamma-wt".into(),
            "(x_O-x_I)/(x_O*(1+s_yS))".into(),
            seller_gamma_threshold_ewt(p, te),
        ),
        (
            "seller-gamma-lt2".into(),
            "(t_S*(x_O-x_I)-v*x_I)/(t_S*x_O*(1+s_yS))".into(),
            seller_gamma_threshold_elt2(p, te),
        ),
    ];

    let mut table = Table::new(&THRESHOLD_COLUMNS);
    for (name, equation, r) in rows {
        table.push(vec![
            name.into(),
            equation.into(),
            value_cell(&r),
            Cell::Empty,
            r.feasible_in_unit_interval.into(),
            mode.name().into(),
        ]);
    }
    for (variant, line) in Variant::ALL.iter().zip(frontiers(p, te, mode)?) {
        let name = format!("frontier-{}", variant.name().to_lowercase());
        let equation = "theta=intercept+slope*gamma".to_string();
        let row = match line {
            Some(l) => vec![
                name.into(),
                equation.into(),
                l.intercept.into(),
                l.slope.into(),
                (l.at(0.0).min(l.at(1.0)) <= 1.0).into(),
                mode.name().into(),
            ],
            None => vec![
                name.into(),
                equation.into(),
                "undefined".into(),
                Cell::Empty,
                false.into(),
                mode.name().into(),
            ],
        };
        table.push(row);
    }
    for variant in Variant::ALL {
        let r = gamma_for_compliance_without_deductions(variant, p, te, mode)?;
        table.push(vec![
            format!("gamma-no-deduction-{}", variant.name().to_lowercase()).into(),
            "gamma at which frontier theta=0".into(),
            value_cell(&r),
            Cell::Empty,
            r.feasible_in_unit_interval.into(),
            mode.name().into(),
        ]);
    }
    Ok(table)
}

pub struct RegionOutput {
    pub cells: Table,
    pub frontiers: Table,
}

/// Coalition best responses on the grid plus the frontier lines.
pub fn region(cfg: &RunConfig, grid: &RegionGrid, exec: Execution) -> Result<RegionOutput, CliError> {
    let cells = rasterize(grid, &cfg.policy, &cfg.endowments, cfg.mode, exec)?;
    let mut table = Table::new(&REGION_COLUMNS);
    for c in cells {
        let best: Vec<&str> = c.best.iter().map(|e| e.name()).collect();
        table.push(vec![c.theta.into(), c.gamma.into(), best.join("|").into(), c.complies.into()]);
    }
    let mut lines = Table::new(&FRONTIER_COLUMNS);
    for (variant, line) in Variant::ALL.iter().zip(frontiers(&cfg.policy, &cfg.endowments, cfg.mode)?) {
        let (intercept, slope) = match line {
            Some(l) => (l.intercept.into(), l.slope.into()),
            None => ("undefined".into(), "undefined".into()),
        };
        lines.push(vec![variant.name().into(), intercept, slope, cfg.mode.name().into()]);
    }
    Ok(RegionOutput { cells: table, frontiers: lines })
}

/// `region.csv` -> `region-frontiers.csv`.
pub fn frontier_path(out: &Path, extension: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| extension.to_string());
    out.with_file_name(format!("{stem}-frontiers.{ext}"))
}

pub const APPENDIX_ROWS: [&str; 8] = [
    "yf_net",
    "yb_net",
    "gov_yf",
    "gov_yb",
    "gov_vat",
    "ysoc",
    "private_income",
    "total_taxes",
];

/// Published worked example, one entry per strategy column.
pub const APPENDIX_PUBLISHED: [(&str, Scenario, Event, [f64; 8]); 5] = [
    (
        "no-taxes",
        Scenario::NoTaxes,
        Event::Comply,
        [15_000.0, 10_000.0, 0.0, 0.0, 0.0, 25_000.0, 25_000.0, 0.0],
    ),
    (
        "full-compliance",
        Scenario::Tax,
        Event::Comply,
        [11_400.0, 1_200.0, 3_600.0, 6_600.0, 2_200.0, 25_000.0, 12_600.0, 12_400.0],
    ),
    (
        "evasion-last-transaction",
        Scenario::Tax,
        Event::EvadeLTAppendix,
        [12_700.0, 3_400.0, 1_200.0, 6_600.0, 1_100.0, 25_000.0, 16_100.0, 8_900.0],
    ),
    (
        "evasion-all-transactions",
        Scenario::Tax,
        Event::EvadeWT,
        [12_600.0, 3_400.0, 2_400.0, 6_600.0, 0.0, 25_000.0, 16_000.0, 9_000.0],
    ),
    (
        "deductions",
        Scenario::TaxWithDeductions,
        Event::Comply,
        [11_400.0, 2_420.0, 3_600.0, 5_380.0, 2_200.0, 25_000.0, 13_820.0, 11_180.0],
    ),
];

pub const APPENDIX_TOLERANCE: f64 = 0.5;

pub struct AppendixReport {
    pub table: Table,
    /// One line per cell off by more than [`APPENDIX_TOLERANCE`].
    pub mismatches: Vec<String>,
}

/// Recomputes the worked example and diffs it cell by cell.
pub fn appendix(cfg: &RunConfig) -> Result<AppendixReport, CliError> {
    let mut table = Table::new(&APPENDIX_COLUMNS);
    let mut mismatches = Vec::new();
    for (column, scenario, event, published) in APPENDIX_PUBLISHED {
        let o = outcome(scenario, AuditState::NotAudited, event, &cfg.policy, &cfg.endowments)?;
        let private = o.buyer + o.seller;
        let taxes = o.revenue.total();
        let computed = [
            o.seller,
            o.buyer,
            o.revenue.seller_income_tax,
            o.revenue.buyer_income_tax,
            o.revenue.vat,
            private + taxes,
            private,
            taxes,
        ];
        for ((row, got), want) in APPENDIX_ROWS.iter().zip(computed).zip(published) {
            let deviation = got - want;
            if deviation.is_nan() || deviation.abs() > APPENDIX_TOLERANCE {
                mismatches.push(format!("{column}/{row}: computed {got}, published {want}"));
            }
            table.push(vec![column.into(), (*row).into(), got.into(), want.into(), deviation.into()]);
        }
    }
    Ok(AppendixReport { table, mismatches })
}

/// Runs the oracle suite.
pub fn validate(seed: u64, draws: usize, exec: Execution) -> Result<(Table, ValidationReport), CliError> {
    if draws == 0 {
        return Err(CliError::Usage("--draws must be at least 1".into()));
    }
    let report = run_validation(seed, draws, exec);
    let mut table = Table::new(&VALIDATION_COLUMNS);
    for c in &report.checks {
        table.push(vec![
            c.name.into(),
            c.evaluated.into(),
            c.failures.into(),
            format!("{:.3e}", c.max_deviation).into(),
        ]);
    }
    Ok((table, report))
}
