//! Recurrence files, inline recurrence flags and field elements.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use padic_recur::localfield::build_extension;
use padic_recur::recurrence::RecurrenceSpec;
use padic_recur::{Error, ExtensionField, PadicValue, Prime};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_PRECISION: u32 = 20;

/// An integer or a `"num/den"` string.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Int(i64),
    Text(String),
}

impl RationalJson {
    fn to_rational(&self) -> Result<BigRational, CliError> {
        match self {
            RationalJson::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
            RationalJson::Text(s) => parse_rational(s),
        }
    }
}

/// `{ "p", "order", "coeffs", "initial", "precision" }`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceJson {
    pub p: u64,
    pub order: Option<usize>,
    pub coeffs: Vec<RationalJson>,
    pub initial: Vec<RationalJson>,
    pub precision: Option<u32>,
}

pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    let bad = || CliError::config(format!("cannot parse rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(CliError::config(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_rational)
        .collect()
}

pub fn parse_int_list(s: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::config(format!("cannot parse integer '{t}'")))
        })
        .collect()
}

/// Where the recurrence comes from.
#[derive(Debug, Default, Clone)]
pub struct RecurrenceSource {
    pub path: Option<String>,
    pub p: Option<u64>,
    pub coeffs: Option<String>,
    pub initial: Option<String>,
    pub precision: Option<u32>,
    pub guard: Option<u32>,
}

impl RecurrenceSource {
    pub fn load(&self) -> Result<RecurrenceSpec, CliError> {
        let (p, coeffs, initial, file_precision) = match &self.path {
            Some(path) => {
                let rec = read_recurrence(Path::new(path))?;
                if let Some(order) = rec.order {
                    if order != rec.coeffs.len() {
                        return Err(CliError::config(format!(
                            "order {order} does not match {} coefficients",
                            rec.coeffs.len()
                        )));
                    }
                }
                let coeffs = rec
                    .coeffs
                    .iter()
                    .map(RationalJson::to_rational)
                    .collect::<Result<Vec<_>, _>>()?;
                let initial = rec
                    .initial
                    .iter()
                    .map(RationalJson::to_rational)
                    .collect::<Result<Vec<_>, _>>()?;
                let p = self.p.unwrap_or(rec.p);
                (p, coeffs, initial, rec.precision)
            }
            None => {
                let p = self
                    .p
                    .ok_or_else(|| CliError::config("give a recurrence file or --p".into()))?;
                let coeffs =
                    parse_list(self.coeffs.as_deref().ok_or_else(|| {
                        CliError::config("inline recurrences need --coeffs".into())
                    })?)?;
                let initial = parse_list(self.initial.as_deref().ok_or_else(|| {
                    CliError::config("inline recurrences need --initial".into())
                })?)?;
                (p, coeffs, initial, None)
            }
        };
        let precision = self
            .precision
            .or(file_precision)
            .unwrap_or(DEFAULT_PRECISION);
        let prime = Prime::new(p)?;
        let mut spec = RecurrenceSpec::new(prime, coeffs, initial, precision)?;
        if let Some(g) = self.guard {
            spec = spec.with_guard(g);
        }
        Ok(spec)
    }
}

fn read_recurrence(path: &Path) -> Result<RecurrenceJson, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid recurrence file {}: {e}", path.display())))
}

/// The field `Q_p[x]/(modulus)`, or `Q_p` without a modulus.
pub fn field_from(p: u64, modulus: Option<&str>) -> Result<ExtensionField, CliError> {
    let prime = Prime::new(p)?;
    match modulus {
        None => Ok(ExtensionField::base(prime)),
        Some(m) => {
            let coeffs = parse_list(m)?;
            if coeffs.last().map(|c| c.is_one()) != Some(true) {
                return Err(CliError::config(
                    "modulus must be monic (constant term first)".into(),
                ));
            }
            Ok(build_extension(prime, &coeffs)?)
        }
    }
}

/// `c0 + c1·θ` where `θ` is the root of the user modulus.
pub fn element_from(
    field: &ExtensionField,
    value: &str,
    precision_digits: u32,
) -> Result<PadicValue, CliError> {
    let n = precision_digits * field.e();
    let parts = parse_list(value)?;
    if parts.is_empty() || parts.len() > field.degree() as usize {
        return Err(CliError::config(format!(
            "expected {} coordinate(s) for the element",
            field.degree()
        )));
    }
    let mut acc = PadicValue::from_rational(field, &parts[0], n)?;
    if parts.len() == 2 {
        let theta = field.modulus_root(n)?;
        let c1 = PadicValue::from_rational(field, &parts[1], n)?;
        acc = acc.try_add(&c1.try_mul(&theta)?)?;
    }
    Ok(acc)
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
