use std::fmt::Write as _;
use std::fs;
use std::io::Read;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use padic_recur::analytic::{exp_p, log_p, sinh_p, teichmuller};
use padic_recur::density::{
    bracket_check, density_profile, exact_limiting_density, residue_tree, DensityMode,
};
use padic_recur::interpolation::{verify_algebraic, ResidueIndex, TwistedInterpolation};
use padic_recur::recurrence::{classify, RecurrenceSpec};
use padic_recur::{Error, PadicValue, Valuation};
use serde_json::{json, Value};

use crate::input::{element_from, field_from, parse_int_list, DEFAULT_PRECISION};
use crate::render::{
    density_json, digit_row, padic_from_json, padic_json, rational, tree_dot, tree_json, tree_text,
};
use crate::CliError;

/// What a command produced, in every format it supports.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub dot: Option<String>,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            dot: None,
        }
    }
}

pub enum TermQuery {
    Single(BigInt),
    Range(usize),
    List(Vec<BigInt>),
    /// `a · p^{f n} + b`.
    Large {
        a: BigInt,
        b: BigInt,
        n: u32,
    },
}

const DIRECT_LIMIT: u64 = 1_000_000;

/// `"= v"` or `"≥ v"` (π-units).
fn describe(v: Valuation) -> String {
    match v {
        Valuation::Exact(k) => format!("= {k}"),
        Valuation::AtLeast(k) => format!("≥ {k}"),
    }
}

pub fn terms(spec: &RecurrenceSpec, query: TermQuery) -> Result<Output, CliError> {
    let k = spec.precision();
    let p = spec.p().get();
    let indices: Vec<BigInt> = match query {
        TermQuery::Single(n) => vec![n],
        TermQuery::Range(m) => (0..=m).map(BigInt::from).collect(),
        TermQuery::List(v) => v,
        TermQuery::Large { a, b, n } => {
            let f = classify(spec)?.f.unwrap_or(1);
            vec![a * BigInt::from(p).pow(f * n) + b]
        }
    };
    let direct_max = indices
        .iter()
        .filter_map(|n| n.to_u64())
        .filter(|&n| n <= DIRECT_LIMIT)
        .max();
    let direct = direct_max.map(|m| spec.terms_mod(m as usize, k));
    let mut rows = Vec::new();
    let mut text = String::new();
    for n in &indices {
        let value = match (n.to_u64(), &direct) {
            (Some(i), Some(d)) if i <= DIRECT_LIMIT => d[i as usize].clone(),
            _ => spec.term_at(n, k)?.coeff(0).clone(),
        };
        writeln!(text, "s({n}) = {value}  (mod {p}^{k})").unwrap();
        rows.push(json!({"n": n.to_string(), "value": value.to_string()}));
    }
    Ok(Output::new(
        text,
        json!({"p": p, "precision": k, "terms": rows}),
    ))
}

pub fn classify_cmd(spec: &RecurrenceSpec) -> Result<Output, CliError> {
    let c = classify(spec)?;
    let json = json!({
        "tag": c.tag.to_string(),
        "has_twisted_interpolation": c.has_twisted_interpolation() && !c.unit_part_empty,
        "unit_part_empty": c.unit_part_empty,
        "witness": c.witness,
        "p": c.p,
        "e": c.e,
        "f": c.f,
        "q": c.q,
        "function_count": c.function_count(),
    });
    Ok(Output::new(format!("{c}\n"), json))
}

pub fn interp(
    spec: &RecurrenceSpec,
    eval: Option<&str>,
    agreement: Option<u64>,
) -> Result<Output, CliError> {
    let ti = TwistedInterpolation::build(spec)?;
    let mut text = format!(
        "q={}, f={}, {} functions (i < {}, r < {})\n",
        ti.q(),
        ti.f(),
        ti.function_count(),
        ti.period(),
        ti.q()
    );
    let mut units = Vec::new();
    for u in ti.units() {
        writeln!(
            text,
            "root {}: beta = {}, omega = {}, v(Lambda) {}",
            u.root,
            u.beta,
            u.omega,
            describe(u.lambda.valuation())
        )
        .unwrap();
        units.push(json!({
            "root": u.root,
            "beta": padic_json(&u.beta),
            "omega": padic_json(&u.omega),
            "lambda": padic_json(&u.lambda),
        }));
    }
    let ec = ti.error_constants();
    writeln!(text, "error constants: C = {}, D = {}", ec.c, ec.d).unwrap();
    let mut json = json!({
        "q": ti.q(),
        "f": ti.f(),
        "function_count": ti.function_count(),
        "all_units": ti.all_units(),
        "units": units,
        "error_constants": {"C": ec.c.to_string(), "D": ec.d.to_string()},
    });
    if let Some(spec_str) = eval {
        let parts = parse_int_list(spec_str)?;
        if parts.len() != 3 {
            return Err(CliError::config("--eval expects i,r,x".into()));
        }
        let idx = ResidueIndex {
            i: parts[0]
                .to_u64()
                .ok_or_else(|| CliError::config("bad i".into()))?,
            r: parts[1]
                .to_u64()
                .ok_or_else(|| CliError::config("bad r".into()))?,
        };
        if idx.i >= ti.period() || idx.r >= ti.q() {
            return Err(CliError::config("index (i, r) out of range".into()));
        }
        let z = padic_recur::ExtensionField::base(spec.p());
        let x = PadicValue::from_bigint(&z, parts[2].clone(), spec.working_precision());
        let v = ti.eval(idx, &x)?;
        writeln!(text, "s_({},{})({}) = {v}", idx.i, idx.r, parts[2]).unwrap();
        json["eval"] =
            json!({"i": idx.i, "r": idx.r, "x": parts[2].to_string(), "value": v.to_string()});
    }
    if let Some(n) = agreement {
        let report = ti.agreement_report(n)?;
        writeln!(
            text,
            "agreement for n <= {n}: within bound: {}, exact: {}",
            report.all_within_bound(),
            report.all_exact()
        )
        .unwrap();
        json["agreement"] = json!({
            "n_max": n,
            "within_bound": report.all_within_bound(),
            "exact": report.all_exact(),
        });
    }
    Ok(Output::new(text, json))
}

fn poly_highest_first(s: &str) -> Result<Vec<BigInt>, CliError> {
    let mut v = parse_int_list(s)?;
    if v.is_empty() {
        return Err(CliError::config("empty polynomial".into()));
    }
    v.reverse();
    Ok(v)
}

fn poly_string(constant_first: &[BigInt]) -> String {
    constant_first
        .iter()
        .rev()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn limit(
    spec: &RecurrenceSpec,
    a: i64,
    b: i64,
    check_poly: Option<&str>,
    verify_terms: Option<u32>,
) -> Result<Output, CliError> {
    let ti = TwistedInterpolation::build(spec)?;
    let field = ti.field().clone();
    let e = field.e();
    let n = spec.precision() * e;
    let lim = ti.padic_limit(&BigInt::from(a), &BigInt::from(b))?;
    let value = lim.to_padic(Some(n))?;
    let value = value.to_base().unwrap_or(value);
    let p = spec.p().get();
    let mut text = format!(
        "lim s({a}*{p}^({}n) + {b}) = {value}\ndigits: {}\n",
        ti.f(),
        digit_row(&value)
    );
    let mut json = json!({
        "a": a,
        "b": b,
        "limit": padic_json(&value),
        "algebraic_witness": Value::Null,
    });
    if let Some(s) = check_poly {
        let poly = poly_highest_first(s)?;
        let ok = verify_algebraic(&value, &poly);
        text.push_str(if ok {
            "root verified\n"
        } else {
            "root not verified\n"
        });
        json["algebraic_witness"] =
            json!(poly.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>());
        json["root_verified"] = json!(ok);
    }
    if let Some(k) = verify_terms {
        let mut rows = Vec::new();
        let mut all = true;
        for m in 1..=k {
            let idx = BigInt::from(a) * BigInt::from(p).pow(ti.f() * m) + BigInt::from(b);
            let term = spec.term_at(&idx, spec.precision())?;
            let term = if field.degree() == 1 {
                term
            } else {
                term.embed(&field)?
            };
            let lhs = if value.field().degree() == 1 && field.degree() != 1 {
                value.embed(&field)?
            } else {
                value.clone()
            };
            let diff = term.try_sub(&lhs.truncate(term.precision()))?;
            let v = diff.valuation();
            let ok = v.bound() >= m * e;
            all &= ok;
            writeln!(text, "n={m}: v_pi(s - L) {}", describe(v)).unwrap();
            rows.push(json!({"n": m, "valuation": describe(v), "ok": ok}));
        }
        writeln!(
            text,
            "terms check: |s(a p^(fn) + b) - L| <= p^-n for n <= {k}: {}",
            if all { "yes" } else { "no" }
        )
        .unwrap();
        json["terms_check"] = json!({"rows": rows, "ok": all});
    }
    Ok(Output::new(text, json))
}

pub fn verify(source: Option<&str>, poly: Option<&str>) -> Result<Output, CliError> {
    let text = match source {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::config(format!("cannot read stdin: {e}")))?;
            s
        }
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?,
    };
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
    let value_doc = doc.get("limit").unwrap_or(&doc);
    let value = padic_from_json(value_doc)?;
    let poly = match poly {
        Some(s) => poly_highest_first(s)?,
        None => {
            let w = doc
                .get("algebraic_witness")
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    CliError::config("no polynomial given and no algebraic_witness in input".into())
                })?;
            let mut v = w
                .iter()
                .map(|c| match c {
                    Value::String(s) => s
                        .parse()
                        .map_err(|_| CliError::config(format!("bad coefficient {s}"))),
                    Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| CliError::config(format!("bad coefficient {n}"))),
                    other => Err(CliError::config(format!("bad coefficient {other}"))),
                })
                .collect::<Result<Vec<BigInt>, _>>()?;
            v.reverse();
            v
        }
    };
    let ok = verify_algebraic(&value, &poly);
    let line = if ok {
        "root verified"
    } else {
        "root not verified"
    };
    Ok(Output::new(
        format!("{line}\n"),
        json!({"polynomial": poly_string(&poly), "root_verified": ok}),
    ))
}

pub fn density(
    spec: &RecurrenceSpec,
    alpha_max: u32,
    exact: bool,
    budget: u64,
) -> Result<Output, CliError> {
    let profile = density_profile(spec, alpha_max, budget)?;
    let row = profile
        .profile
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let mut text = format!("profile: {row}\n");
    let mut json = json!({"profile": density_json(&profile)});
    if exact {
        let report = exact_limiting_density(spec)?;
        let limit = report.exact_limit.clone().unwrap_or_else(Zero::zero);
        writeln!(text, "exact limit: {limit}").unwrap();
        for line in &report.trace {
            writeln!(text, "  {line}").unwrap();
        }
        let ok = bracket_check(&report, &profile);
        writeln!(text, "bracket check: {}", if ok { "pass" } else { "fail" }).unwrap();
        json["exact"] = density_json(&report);
        json["exact_limit"] = json!(rational(&limit));
        json["bracket_check"] = json!(ok);
    }
    Ok(Output::new(text, json))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMode {
    Exact,
    Empirical,
    /// Exact when the recurrence is in the supported class.
    Auto,
}

pub fn tree(
    spec: &RecurrenceSpec,
    alpha_max: u32,
    mode: TreeMode,
    budget: u64,
) -> Result<Output, CliError> {
    let t = match mode {
        TreeMode::Exact => residue_tree(spec, alpha_max, DensityMode::Exact, budget)?,
        TreeMode::Empirical => residue_tree(spec, alpha_max, DensityMode::Empirical, budget)?,
        TreeMode::Auto => match residue_tree(spec, alpha_max, DensityMode::Exact, budget) {
            Err(Error::ExactDensityUnsupported(_)) => {
                residue_tree(spec, alpha_max, DensityMode::Empirical, budget)?
            }
            other => other?,
        },
    };
    Ok(Output {
        text: tree_text(&t),
        json: tree_json(&t),
        dot: Some(tree_dot(&t)),
    })
}

pub fn omega(
    p: u64,
    value: &str,
    modulus: Option<&str>,
    precision: Option<u32>,
) -> Result<Output, CliError> {
    let field = field_from(p, modulus)?;
    let x = element_from(&field, value, precision.unwrap_or(DEFAULT_PRECISION))?;
    let w = teichmuller(&x)?;
    Ok(Output::new(
        format!("omega = {w}\ndigits: {}\n", digit_row(&w)),
        json!({"input": padic_json(&x), "omega": padic_json(&w)}),
    ))
}

pub fn explog(
    p: u64,
    value: &str,
    modulus: Option<&str>,
    function: &str,
    precision: Option<u32>,
) -> Result<Output, CliError> {
    let field = field_from(p, modulus)?;
    let x = element_from(&field, value, precision.unwrap_or(DEFAULT_PRECISION))?;
    let y = match function {
        "exp" => exp_p(&x)?,
        "log" => log_p(&x)?,
        "sinh" => sinh_p(&x)?,
        other => return Err(CliError::config(format!("unknown function '{other}'"))),
    };
    Ok(Output::new(
        format!("{function}_p = {y}\ndigits: {}\n", digit_row(&y)),
        json!({"function": function, "input": padic_json(&x), "value": padic_json(&y)}),
    ))
}
