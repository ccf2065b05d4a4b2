//! Report documents: machine-readable renderings of analysis results.
//!
//! Every number in a report is an integer or a "num/den" string; floats
//! never appear. The JSON schema is versioned under the top-level key
//! "schema": "berklocus/1".

use crate::berk::BerkPoint;
use crate::error::{Error, Result};
use crate::field::{Ctx, FieldContext};
use crate::locus::{
    analyze, component_census, good_position, oracle_verify, AnalysisOptions, ComponentEnd,
    GridParams, LocusReport,
};
use crate::parse::parse_expression;
use crate::ratmap::{MobiusMap, MultiplierAbs, RationalMap, Type1FixedPoint};
use crate::val::{fmt_val, Val, ValOrInf};
use serde_json::{json, Value};

pub const SCHEMA: &str = "berklocus/1";

/// Parsed input: expression, tower parameters, and the resulting map.
#[derive(Clone, Debug)]
pub struct MapSpec {
    pub text: String,
    pub prime: u64,
    pub unram_degree: usize,
    pub ram_index: u64,
    pub precision: usize,
    pub conjugate: Option<String>,
}

impl MapSpec {
    pub fn new(text: &str, prime: u64) -> MapSpec {
        MapSpec {
            text: text.to_string(),
            prime,
            unram_degree: 1,
            ram_index: 1,
            precision: 64,
            conjugate: None,
        }
    }

    pub fn context(&self) -> Result<Ctx> {
        FieldContext::new(self.prime, self.unram_degree, self.ram_index, self.precision)
    }

    pub fn build(&self) -> Result<RationalMap> {
        let ctx = self.context()?;
        let f = parse_expression(&self.text, self.prime)?;
        let mut map = RationalMap::from_rat_func(&ctx, &f)?;
        if let Some(expr) = &self.conjugate {
            let sigma = parse_mobius(expr, self.prime, &ctx)?;
            map = map.conjugate(&sigma)?;
        }
        Ok(map)
    }
}

/// Parse a Moebius transformation "(a*z+b)/(c*z+d)" as an exact rational
/// expression of degree at most one over one.
pub fn parse_mobius(text: &str, prime: u64, ctx: &Ctx) -> Result<MobiusMap> {
    let f = parse_expression(text, prime)?;
    if f.num.degree() > 1 || f.den.degree() > 1 {
        return Err(Error::Parse {
            offset: 0,
            message: "a moebius map has degree at most one".into(),
        });
    }
    MobiusMap::from_rationals(
        ctx,
        [
            f.num.coeff(1),
            f.num.coeff(0),
            f.den.coeff(1),
            f.den.coeff(0),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Reduce,
    FixedPoints,
    Census,
    Verify,
    Sketch,
}

impl Command {
    pub fn parse(s: &str) -> Result<Command> {
        Ok(match s {
            "analyze" => Command::Analyze,
            "reduce" => Command::Reduce,
            "fixed-points" => Command::FixedPoints,
            "census" => Command::Census,
            "verify" => Command::Verify,
            "sketch" => Command::Sketch,
            other => {
                return Err(Error::Config(format!("unknown subcommand '{other}'")))
            }
        })
    }
}

/// A rendered report plus enough provenance to reproduce it.
#[derive(Clone, Debug)]
pub struct ReportDocument {
    pub value: Value,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.value).expect("reports are valid json")
    }

    pub fn from_json(text: &str) -> Result<ReportDocument> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            offset: 0,
            message: format!("invalid report json: {e}"),
        })?;
        Ok(ReportDocument { value })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        render_text(&self.value, 0, &mut out);
        out
    }

    /// DOT sketch of the census skeleton (only for sketch results).
    pub fn to_dot(&self) -> Option<String> {
        self.value
            .get("result")
            .and_then(|r| r.get("dot"))
            .and_then(|d| d.as_str())
            .map(|s| s.to_string())
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_str(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar_str(item))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_str(other))),
    }
}

fn scalar_str(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Run one subcommand over a parsed map specification.
pub fn run_subcommand(
    command: Command,
    spec: &MapSpec,
    grid: &GridParams,
) -> Result<ReportDocument> {
    let started = std::time::Instant::now();
    let map = spec.build()?;
    let result = match command {
        Command::Analyze => {
            let rep = analyze(
                &map,
                &AnalysisOptions {
                    grid: grid.clone(),
                    skip_oracle: false,
                },
            )?;
            locus_report_json(&rep)
        }
        Command::Reduce => {
            let red = map.reduce()?;
            json!({
                "residual_map": format!("({})/({})", red.num(), red.den()),
                "residual_degree": red.degree(),
                "good_reduction": map.is_good_reduction()?,
                "constant": red.is_constant(),
                "identity": red.is_identity(),
            })
        }
        Command::FixedPoints => {
            let pts = map.classify_fixed_points()?;
            Value::Array(pts.iter().map(fixed_point_json).collect())
        }
        Command::Census => {
            let pos = good_position(&map)?;
            let census = component_census(&map, &pos)?;
            let ends = crate::locus::component_ends(&map, &pos)?;
            let mut v = census_json(&census);
            if let Some(gc) = v
                .get_mut("gauss_component")
                .and_then(|g| g.as_object_mut())
            {
                gc.insert(
                    "ends".into(),
                    Value::Array(ends.iter().map(end_json).collect()),
                );
            }
            v
        }
        Command::Verify => {
            let pos = good_position(&map)?;
            let oracle = oracle_verify(&map, &pos, grid)?;
            oracle_json(&oracle)
        }
        Command::Sketch => {
            let rep = analyze(
                &map,
                &AnalysisOptions {
                    grid: grid.clone(),
                    skip_oracle: true,
                },
            )?;
            json!({ "dot": sketch_dot(&rep) })
        }
    };
    let doc = json!({
        "schema": SCHEMA,
        "command": format!("{command:?}").to_lowercase(),
        "input": {
            "expression": spec.text,
            "prime": spec.prime,
            "unram_degree": spec.unram_degree,
            "ram_index": spec.ram_index,
            "precision": spec.precision,
            "conjugate": spec.conjugate,
        },
        "version": env!("CARGO_PKG_VERSION"),
        "timing_ms": started.elapsed().as_millis() as u64,
        "result": result,
    });
    Ok(ReportDocument { value: doc })
}

/// Structured error object with a stable code.
pub fn error_json(err: &Error) -> Value {
    json!({
        "schema": SCHEMA,
        "error": {
            "code": err.code(),
            "message": format!("{err}"),
        }
    })
}

fn val_str(v: Val) -> Value {
    Value::String(fmt_val(v))
}

fn berk_point_json(p: &BerkPoint) -> Value {
    match p {
        BerkPoint::Type1(v) => json!({
            "type": 1,
            "value": format!("{p}"),
            "finite": !matches!(v, crate::ratmap::ProjValue::Infinity),
        }),
        BerkPoint::Type2 { center, rlog } => json!({
            "type": 2,
            "center": format!("{center}"),
            "rlog": fmt_val(*rlog),
        }),
    }
}

fn fixed_point_json(p: &Type1FixedPoint) -> Value {
    let multiplier = match &p.multiplier {
        MultiplierAbs::Zero => json!({"kind": "zero"}),
        MultiplierAbs::Pow(v) => json!({"kind": "power", "valuation": fmt_val(*v)}),
    };
    json!({
        "at_infinity": p.at_infinity,
        "value": p.value.as_ref().map(|v| format!("{v}")),
        "direction": format!("{}", p.direction),
        "valuation": p.valuation.map(|v| match v {
            ValOrInf::Finite(x) => fmt_val(x),
            ValOrInf::Infinite => "inf".into(),
        }),
        "multiplier_abs": multiplier,
        "class": format!("{}", p.class),
    })
}

fn census_json(census: &crate::locus::ComponentCensus) -> Value {
    json!({
        "count": census.count,
        "gauss_component": {
            "fixed_noncritical_directions": census
                .gauss_directions
                .iter()
                .map(|d| Value::String(format!("{d}")))
                .collect::<Vec<_>>(),
        },
        "isolated_points": census
            .isolated_points
            .iter()
            .map(|p| {
                let mut obj = fixed_point_json(&p.point);
                if let Value::Object(m) = &mut obj {
                    m.insert(
                        "chart_direction".into(),
                        Value::String(format!("{}", p.chart_direction)),
                    );
                    m.insert(
                        "directional_multiplicity".into(),
                        json!(p.directional_multiplicity),
                    );
                }
                obj
            })
            .collect::<Vec<_>>(),
    })
}

fn oracle_json(o: &crate::locus::OracleReport) -> Value {
    json!({
        "step": val_str(o.step),
        "depth": o.depth,
        "mismatches": 0,
        "arcs": o.arcs.iter().map(|a| json!({
            "target": if a.target.is_empty() { Value::Null } else { Value::String(a.target.clone()) },
            "direction": a.direction,
            "residually_fixed": a.residually_fixed,
            "critical": a.critical,
            "samples": a.samples.iter().map(|(rlog, fixed)| json!({
                "rlog": fmt_val(*rlog),
                "fixed": fixed,
            })).collect::<Vec<_>>(),
            "multiplicities": a.multiplicities,
        })).collect::<Vec<_>>(),
        "scalings": o.scalings.iter().map(|s| json!({
            "direction": s.direction,
            "directional_multiplicity": s.directional_multiplicity,
            "epsilon": fmt_val(s.epsilon),
        })).collect::<Vec<_>>(),
    })
}

fn end_json(e: &ComponentEnd) -> Value {
    match e {
        ComponentEnd::IndifferentType1 {
            chart_direction,
            point,
        } => json!({
            "kind": "indifferent_type1",
            "chart_direction": format!("{chart_direction}"),
            "point": fixed_point_json(point),
        }),
        ComponentEnd::InteriorIdentity { point } => json!({
            "kind": "interior_identity",
            "point": berk_point_json(point),
        }),
        ComponentEnd::TranslationType2 { point } => json!({
            "kind": "translation_type2",
            "point": berk_point_json(point),
        }),
        ComponentEnd::Undetected { chart_direction } => json!({
            "kind": "undetected_possibly_type4",
            "chart_direction": format!("{chart_direction}"),
        }),
    }
}

pub fn locus_report_json(rep: &LocusReport) -> Value {
    json!({
        "degree": rep.degree,
        "good_reduction": rep.good_reduction,
        "position": {
            "already_good": rep.position.already_good,
            "totally_ramified_point": berk_point_json(&rep.position.fixed_point),
            "conjugation": mobius_json(&rep.position.sigma),
        },
        "residual_fixed": rep.residual_fixed.iter().map(|r| json!({
            "point": format!("{}", r.point),
            "index": r.index,
            "local_multiplicity": r.local_multiplicity,
            "critical": r.critical,
        })).collect::<Vec<_>>(),
        "connected": rep.connected,
        "finite": rep.finite,
        "census": census_json(&rep.census),
        "ends": rep.ends.iter().map(end_json).collect::<Vec<_>>(),
        "witnesses": rep.witnesses.iter().map(|w| json!({
            "direction": w.direction,
            "point": w.point.as_ref().map(berk_point_json),
            "note": w.note,
        })).collect::<Vec<_>>(),
        "oracle": rep.oracle.as_ref().map(oracle_json),
    })
}

fn mobius_json(m: &MobiusMap) -> Value {
    match &m.shadow {
        Some(q) => {
            let fmt_q = |x: &crate::rational::Q| {
                if x.denom() == &num_bigint::BigInt::from(1) {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            };
            json!({
                "a": fmt_q(&q[0]), "b": fmt_q(&q[1]),
                "c": fmt_q(&q[2]), "d": fmt_q(&q[3]),
            })
        }
        None => json!({
            "a": format!("{}", m.entries[0]),
            "b": format!("{}", m.entries[1]),
            "c": format!("{}", m.entries[2]),
            "d": format!("{}", m.entries[3]),
        }),
    }
}

/// DOT digraph of the census skeleton: the totally ramified point, its
/// residually fixed directions (critical flagged), isolated points and
/// identity-tangent interior points.
pub fn sketch_dot(rep: &LocusReport) -> String {
    let mut out = String::from("digraph locus {\n");
    out.push_str("  gauss [label=\"totally ramified fixed point\", shape=doublecircle];\n");
    let mut dirs: Vec<(String, bool)> = vec![];
    for r in &rep.residual_fixed {
        dirs.push((format!("{}", r.point), r.critical));
    }
    for (label, critical) in &dirs {
        let color = if *critical { "red" } else { "green" };
        let kind = if *critical { "critical" } else { "non-critical" };
        out.push_str(&format!(
            "  \"dir:{label}\" [label=\"direction {label} ({kind})\", color={color}];\n"
        ));
        out.push_str(&format!("  gauss -> \"dir:{label}\";\n"));
    }
    for (i, p) in rep.census.isolated_points.iter().enumerate() {
        let label = if p.point.at_infinity {
            "inf".to_string()
        } else {
            p.point
                .value
                .as_ref()
                .map(|v| format!("{v}"))
                .unwrap_or_default()
        };
        out.push_str(&format!(
            "  \"iso:{i}\" [label=\"isolated {label}\", shape=box];\n"
        ));
        out.push_str(&format!(
            "  \"dir:{}\" -> \"iso:{i}\";\n",
            p.chart_direction
        ));
    }
    let mut interior = 0usize;
    for e in &rep.ends {
        if let ComponentEnd::InteriorIdentity { point } = e {
            out.push_str(&format!(
                "  \"int:{interior}\" [label=\"identity tangent at {point}\", shape=diamond];\n"
            ));
            out.push_str(&format!("  gauss -> \"int:{interior}\";\n"));
            interior += 1;
        }
    }
    out.push_str("}\n");
    out
}
