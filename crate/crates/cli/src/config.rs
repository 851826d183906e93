//! Run configuration: preset, then config file, then `--set` overrides, then
//! dedicated flags. Later layers win.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use vat_game::presets::{self, Preset};
use vat_game::{SanctionBaseMode, TaxPolicy, TransactionEndowments};

use crate::error::ConfigError;

/// Parameter keys in the order they are reported.
pub const PARAMETER_KEYS: [&str; 11] = [
    "t_S", "t_B", "v", "delta", "theta", "s_V", "s_yS", "x_O", "x_I", "y_S", "y_B",
];
const OPTION_KEYS: [&str; 4] = ["preset", "mode", "format", "precision"];

pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ConfigError::BadChoice {
                key: "format",
                value: s.to_string(),
                choices: "csv, json",
            }),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn parse_mode(s: &str) -> Result<SanctionBaseMode, ConfigError> {
    match s {
        "corrected" => Ok(SanctionBaseMode::Corrected),
        "paper-literal" => Ok(SanctionBaseMode::PaperLiteral),
        _ => Err(ConfigError::BadChoice {
            key: "mode",
            value: s.to_string(),
            choices: "corrected, paper-literal",
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<&'static str>,
    pub policy: TaxPolicy,
    pub endowments: TransactionEndowments,
    pub mode: SanctionBaseMode,
    pub format: Format,
    pub precision: usize,
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        RunConfig {
            preset: Some(preset.name),
            policy: preset.policy,
            endowments: preset.endowments,
            mode: SanctionBaseMode::default(),
            format: Format::default(),
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Inputs gathered from the command line; strings are validated here so that
/// file and flag values share one code path.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub config: Option<std::path::PathBuf>,
    pub set: Vec<String>,
    pub mode: Option<String>,
    pub format: Option<String>,
    pub precision: Option<usize>,
}

/// Parses `key = value` lines. `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

fn check_key(key: &str) -> Result<(), ConfigError> {
    if PARAMETER_KEYS.contains(&key) || OPTION_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.to_string()))
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::BadNumber { key: key.to_string(), value: value.to_string() })
}

fn parse_precision(value: &str) -> Result<usize, ConfigError> {
    let p = value.parse::<usize>().map_err(|_| ConfigError::BadNumber {
        key: "precision".into(),
        value: value.into(),
    })?;
    if p == 0 {
        return Err(ConfigError::Precision(p));
    }
    Ok(p)
}

/// Resolves the layered configuration. `default_preset` applies when neither
/// the command line nor the file names one.
pub fn resolve(o: &Overrides, default_preset: Option<&str>) -> Result<RunConfig, ConfigError> {
    let file_pairs = match &o.config {
        Some(path) => read_file(path)?,
        None => Vec::new(),
    };
    let mut seen = Vec::new();
    for (key, _) in &file_pairs {
        check_key(key)?;
        if seen.contains(key) {
            return Err(ConfigError::Duplicate(key.clone()));
        }
        seen.push(key.clone());
    }
    let set_pairs = o
        .set
        .iter()
        .map(|s| match s.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
                Ok((k.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(ConfigError::Syntax { line: 0, text: s.clone() }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (key, _) in &set_pairs {
        check_key(key)?;
    }

    let mut options: BTreeMap<&str, String> = BTreeMap::new();
    let mut params: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut preset_name = default_preset.map(str::to_string);
    for (key, value) in file_pairs.iter().chain(&set_pairs) {
        if let Some(&k) = PARAMETER_KEYS.iter().find(|&&k| k == key) {
            params.insert(k, parse_number(k, value)?);
        } else if key == "preset" {
            preset_name = Some(value.clone());
        } else {
            let k = OPTION_KEYS.iter().find(|&&k| k == key).expect("checked key");
            options.insert(k, value.clone());
        }
    }
    if let Some(p) = &o.preset {
        preset_name = Some(p.clone());
    }
    if let Some(m) = &o.mode {
        options.insert("mode", m.clone());
    }
    if let Some(f) = &o.format {
        options.insert("format", f.clone());
    }
    if let Some(p) = o.precision {
        options.insert("precision", p.to_string());
    }

    let preset = match preset_name {
        Some(name) => Some(presets::by_name(&name).ok_or(ConfigError::UnknownPreset(name))?),
        None => None,
    };
    let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
    if let Some(p) = &preset {
        values.extend(p.policy.fields());
        values.extend(p.endowments.fields());
    }
    values.extend(params);

    let missing: Vec<&'static str> = PARAMETER_KEYS
        .iter()
        .copied()
        .filter(|k| !values.contains_key(k))
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let policy = TaxPolicy {
        seller_tax: values["t_S"],
        buyer_tax: values["t_B"],
        vat: values["v"],
        vat_discount: values["delta"],
        deduction_share: values["theta"],
        vat_sanction: values["s_V"],
        income_sanction: values["s_yS"],
    };
    let endowments = TransactionEndowments {
        output_value: values["x_O"],
        input_value: values["x_I"],
        seller_income: values["y_S"],
        buyer_income: values["y_B"],
    };
    policy.validate()?;
    endowments.validate()?;

    Ok(RunConfig {
        preset: preset.map(|p| p.name),
        policy,
        endowments,
        mode: options.get("mode").map(|m| parse_mode(m)).transpose()?.unwrap_or_default(),
        format: options.get("format").map(|f| Format::parse(f)).transpose()?.unwrap_or_default(),
        precision: options
            .get("precision")
            .map(|p| parse_precision(p))
            .transpose()?
            .unwrap_or(DEFAULT_PRECISION),
    })
}

fn read_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pairs(&text)
}
