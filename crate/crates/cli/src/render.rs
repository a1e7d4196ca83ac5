//! Text, JSON and DOT renderings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use padic_recur::density::{DensityReport, ResidueTree};
use padic_recur::localfield::{build_extension, pi_expansion};
use padic_recur::{Digit, PadicValue, Prime};
use serde_json::{json, Value};

use crate::input::parse_rational;
use crate::CliError;

/// `"num/den"`.
pub fn rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn digits(x: &PadicValue) -> Vec<Digit> {
    pi_expansion(x)
}

fn digit_json(d: &Digit) -> Value {
    match d {
        Digit::Int(a) => json!(a),
        Digit::Pair(a, b) => json!([a, b]),
    }
}

/// Little-endian digits separated by spaces.
pub fn digit_row(x: &PadicValue) -> String {
    digits(x)
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// `{ "p", "modulus", "precision_pi_units", "coeffs" }`, plus the digits.
pub fn padic_json(x: &PadicValue) -> Value {
    let field = x.field();
    let modulus: Vec<String> = if field.degree() == 1 {
        vec!["0".into(), "1".into()]
    } else {
        let [c, b] = field.generator_poly();
        vec![c.to_string(), b.to_string(), "1".into()]
    };
    let coeffs: Vec<String> = x.coeffs().iter().map(|c| c.to_string()).collect();
    json!({
        "p": field.p().get(),
        "modulus": modulus.iter().map(|s| int_value(s)).collect::<Vec<_>>(),
        "precision_pi_units": x.precision(),
        "coeffs": coeffs.iter().map(|s| int_value(s)).collect::<Vec<_>>(),
        "digits": digits(x).iter().map(digit_json).collect::<Vec<_>>(),
    })
}

/// Small integers as JSON numbers, large ones as strings.
fn int_value(s: &str) -> Value {
    match s.parse::<i64>() {
        Ok(n) => json!(n),
        Err(_) => json!(s),
    }
}

fn json_int(v: &Value) -> Result<BigInt, CliError> {
    let bad = || CliError::config(format!("expected an integer, got {v}"));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(bad),
        Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// Inverse of [`padic_json`].
pub fn padic_from_json(v: &Value) -> Result<PadicValue, CliError> {
    let field_err = |what: &str| CliError::config(format!("p-adic value is missing '{what}'"));
    let p = v
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| field_err("p"))?;
    let modulus = v
        .get("modulus")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("modulus"))?
        .iter()
        .map(|c| match c {
            Value::String(s) => parse_rational(s),
            _ => json_int(c).map(BigRational::from_integer),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let prec = v
        .get("precision_pi_units")
        .and_then(Value::as_u64)
        .ok_or_else(|| field_err("precision_pi_units"))? as u32;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("coeffs"))?
        .iter()
        .map(json_int)
        .collect::<Result<Vec<_>, _>>()?;
    let prime = Prime::new(p)?;
    let field = if modulus.len() == 2
        && modulus[0] == BigRational::from_integer(0.into())
        && modulus[1].is_one()
    {
        padic_recur::ExtensionField::base(prime)
    } else {
        build_extension(prime, &modulus)?
    };
    Ok(PadicValue::from_coeffs(&field, &coeffs, prec)?)
}

fn base_p(mut r: u64, p: u64, alpha: u32) -> String {
    let mut out = Vec::new();
    for _ in 0..alpha {
        out.push((r % p).to_string());
        r /= p;
    }
    out.join(".")
}

fn node_id(alpha: u32, r: u64) -> String {
    format!("n{alpha}_{r}")
}

/// Graphviz rendering; full-marked nodes are boxes.
pub fn tree_dot(tree: &ResidueTree) -> String {
    let mut out = String::from("digraph residues {\n  node [shape=ellipse];\n");
    out.push_str(&format!(
        "  {} [label=\"*\", shape=point];\n",
        node_id(0, 0)
    ));
    for e in &tree.edges {
        let alpha = e.alpha + 1;
        let shape = if tree.is_full(alpha, e.child) {
            "box"
        } else {
            "ellipse"
        };
        out.push_str(&format!(
            "  {} [label=\"{}\\n{}\", shape={shape}];\n",
            node_id(alpha, e.child),
            e.child,
            base_p(e.child, tree.p, alpha)
        ));
    }
    for e in &tree.edges {
        out.push_str(&format!(
            "  {} -> {} [label=\"{}\"];\n",
            node_id(e.alpha, e.parent),
            node_id(e.alpha + 1, e.child),
            e.digit
        ));
    }
    out.push_str("}\n");
    out
}

/// Indented text tree; `[r]` marks full nodes.
pub fn tree_text(tree: &ResidueTree) -> String {
    let mut out = String::new();
    fn walk(tree: &ResidueTree, alpha: u32, r: u64, out: &mut String) {
        for e in tree
            .edges
            .iter()
            .filter(|e| e.alpha == alpha && e.parent == r)
        {
            let depth = e.alpha as usize;
            let full = tree.is_full(e.alpha + 1, e.child);
            let label = if full {
                format!("[{}]", e.child)
            } else {
                e.child.to_string()
            };
            out.push_str(&format!(
                "{}{label} (digit {}, mod {}^{})\n",
                "  ".repeat(depth),
                e.digit,
                tree.p,
                e.alpha + 1
            ));
            walk(tree, e.alpha + 1, e.child, out);
        }
    }
    walk(tree, 0, 0, &mut out);
    out
}

pub fn tree_json(tree: &ResidueTree) -> Value {
    json!({
        "p": tree.p,
        "mode": format!("{:?}", tree.mode).to_lowercase(),
        "levels": tree.levels.iter().map(|l| json!({
            "alpha": l.alpha,
            "residues": l.residues,
            "density": rational(&l.density()),
        })).collect::<Vec<_>>(),
        "edges": tree.edges.iter().map(|e| json!({
            "alpha": e.alpha,
            "parent": e.parent,
            "digit": e.digit,
            "child": e.child,
        })).collect::<Vec<_>>(),
        "full": tree.full_marks.iter().map(|(a, r)| json!([a, r])).collect::<Vec<_>>(),
    })
}

pub fn density_json(r: &DensityReport) -> Value {
    json!({
        "p": r.p,
        "mode": format!("{:?}", r.mode).to_lowercase(),
        "profile": r.profile.iter().map(rational).collect::<Vec<_>>(),
        "exact_limit": r.exact_limit.as_ref().map(rational),
        "components": r.components.iter().map(|(i, m)| json!({"i": i, "measure": rational(m)})).collect::<Vec<_>>(),
        "trace": r.trace,
    })
}
