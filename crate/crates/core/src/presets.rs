//! Built-in parameter sets.

use crate::model::{TaxPolicy, TransactionEndowments};

/// A named, complete parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub policy: TaxPolicy,
    pub endowments: TransactionEndowments,
}

/// The worked spreadsheet example. It carries no sanctions.
pub const APPENDIX: Preset = Preset {
    name: "appendix",
    policy: TaxPolicy {
        seller_tax: 0.24,
        buyer_tax: 0.33,
        vat: 0.22,
        vat_discount: 1.0,
        deduction_share: 0.10,
        vat_sanction: 0.0,
        income_sanction: 0.0,
    },
    endowments: TransactionEndowments {
        output_value: 10_000.0,
        input_value: 5_000.0,
        seller_income: 10_000.0,
        buyer_income: 20_000.0,
    },
};

/// The coalition-frontier example. Incomes, `t_B` and `theta` are not part of
/// the example and are taken from [`APPENDIX`]; none of them moves a frontier.
pub const SECTION6: Preset = Preset {
    name: "section6",
    policy: TaxPolicy {
        seller_tax: 0.24,
        buyer_tax: 0.33,
        vat: 0.22,
        vat_discount: 1.0,
        deduction_share: 0.10,
        vat_sanction: 0.3,
        income_sanction: 0.3,
    },
    endowments: TransactionEndowments {
        output_value: 100.0,
        input_value: 50.0,
        seller_income: 10_000.0,
        buyer_income: 20_000.0,
    },
};

pub const ALL: [Preset; 2] = [APPENDIX, SECTION6];

pub fn by_name(name: &str) -> Option<Preset> {
    ALL.into_iter().find(|p| p.name == name)
}
