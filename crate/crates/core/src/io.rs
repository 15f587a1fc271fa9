//! Configuration parsing, CSV / VTK writers and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cell_solver::{CohomologyBasis, DecayReport};
use crate::error::{Error, Result};
use crate::experiments::SweepTable;
use crate::fdfd::{EMField, Polarization, SimulationConfig, SourceKind, SourceSpec, TransmissionReport};
use crate::geometry::{CaseId, Rational};

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::schema(field, message)
}

/// Parses `"p/q"`, `"p"` or an exactly representable JSON number.
pub fn parse_rational(field: &str, v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => {
            let s = s.trim();
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s, "1"),
            };
            let p: i64 = p.parse().map_err(|_| field_err(field, format!("`{s}` is not a rational p/q")))?;
            let q: i64 = q.parse().map_err(|_| field_err(field, format!("`{s}` is not a rational p/q")))?;
            if q == 0 {
                return Err(field_err(field, "zero denominator"));
            }
            Ok(Rational::new(p, q))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rational::from_integer(i));
            }
            let x = n.as_f64().ok_or_else(|| field_err(field, "not a number"))?;
            // binary fractions with moderate denominators are exact
            let scaled = x * (1u64 << 20) as f64;
            if scaled.fract() == 0.0 && scaled.abs() < 1e15 {
                return Ok(Rational::new(scaled as i64, 1 << 20));
            }
            Err(field_err(field, format!("{x} is not exactly representable; write it as \"p/q\"")))
        }
        _ => Err(field_err(field, "expected a rational \"p/q\" or a number")),
    }
}

fn parse_f64(field: &str, v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| field_err(field, "expected a number"))
}

fn parse_complex(field: &str, v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(_) => Ok(Complex64::new(parse_f64(field, v)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(parse_f64(field, &a[0])?, parse_f64(field, &a[1])?)),
        _ => Err(field_err(field, "expected [re, im]")),
    }
}

pub fn parse_polarization(field: &str, v: &Value) -> Result<Polarization> {
    match v {
        Value::String(s) => match s.as_str() {
            "e1" | "E1" => Ok(Polarization::E1),
            "e2" | "E2" => Ok(Polarization::E2),
            _ => Err(field_err(field, format!("unknown polarization `{s}`"))),
        },
        Value::Array(a) if a.len() == 2 => Polarization::new([parse_f64(field, &a[0])?, parse_f64(field, &a[1])?])
            .map_err(|_| field_err(field, "polarization must be a unit vector")),
        _ => Err(field_err(field, "expected \"e1\", \"e2\" or [p1, p2]")),
    }
}

fn parse_case(v: &Value) -> Result<Option<CaseId>> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) if s == "none" => Ok(None),
        Value::String(s) => s.parse().map(Some).map_err(|_| field_err("case", format!("unknown case `{s}`"))),
        _ => Err(field_err("case", "expected \"discrete\", \"wires\", \"mesh\" or null")),
    }
}

const KNOWN: [&str; 11] = ["omega", "epsilon", "delta", "case", "spacing", "X3", "source", "tol", "periods", "d", "seed"];

/// Parses and validates a JSON simulation configuration. Optional fields:
/// `X3`, `tol`, `periods`, `d` (defaults as in [`SimulationConfig::new`]).
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| field_err("<document>", e.to_string()))?;
    config_from_value(&value)
}

pub fn config_from_value(value: &Value) -> Result<SimulationConfig> {
    let obj = value.as_object().ok_or_else(|| field_err("<document>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(field_err(key, "unknown field"));
        }
    }
    let req = |k: &str| obj.get(k).ok_or_else(|| field_err(k, "missing required field"));
    let epsilon = parse_complex("epsilon", req("epsilon")?)?;
    if !(epsilon.re > 0.0 && epsilon.im > 0.0) {
        return Err(Error::InvalidEpsilon {
            re: epsilon.re,
            im: epsilon.im,
        });
    }
    let delta = parse_rational("delta", req("delta")?)?;
    let case = parse_case(req("case")?)?;
    let mut config = SimulationConfig::new(case, delta);
    config.omega = parse_f64("omega", req("omega")?)?;
    config.epsilon = epsilon;
    config.spacing = parse_rational("spacing", req("spacing")?)?;
    if let Some(v) = obj.get("X3") {
        config.x3 = parse_rational("X3", v)?;
    }
    if let Some(v) = obj.get("tol") {
        config.tolerance = parse_f64("tol", v)?;
    }
    if let Some(v) = obj.get("periods") {
        config.periods = v.as_u64().ok_or_else(|| field_err("periods", "expected a positive integer"))? as usize;
    }
    if let Some(v) = obj.get("d") {
        config.d = parse_rational("d", v)?;
    }
    let src = req("source")?.as_object().ok_or_else(|| field_err("source", "expected an object"))?;
    for key in src.keys() {
        if !["type", "a", "pol", "amp"].contains(&key.as_str()) {
            return Err(field_err(&format!("source.{key}"), "unknown field"));
        }
    }
    let kind = match src.get("type").and_then(Value::as_str) {
        Some("CurrentSheet") | Some("sheet") => SourceKind::CurrentSheet,
        Some("Dipole") | Some("dipole") => SourceKind::Dipole,
        Some(other) => return Err(field_err("source.type", format!("unknown source type `{other}`"))),
        None => return Err(field_err("source.type", "missing required field")),
    };
    config.source = SourceSpec {
        kind,
        a: match src.get("a") {
            Some(v) => parse_rational("source.a", v)?,
            None => return Err(field_err("source.a", "missing required field")),
        },
        polarization: match src.get("pol") {
            Some(v) => parse_polarization("source.pol", v)?,
            None => Polarization::E1,
        },
        amplitude: match src.get("amp") {
            Some(v) => parse_complex("source.amp", v)?,
            None => Complex64::new(1.0, 0.0),
        },
    };
    config.validate()?;
    Ok(config)
}

fn rational_string(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn pol_value(p: Polarization) -> Value {
    if p == Polarization::E1 || p == Polarization::E2 {
        Value::String(p.name())
    } else {
        json!([p.0[0], p.0[1]])
    }
}

/// Inverse of [`parse_config`].
pub fn config_to_value(c: &SimulationConfig) -> Value {
    json!({
        "omega": c.omega,
        "epsilon": [c.epsilon.re, c.epsilon.im],
        "delta": rational_string(c.delta),
        "case": c.case.map(|k| Value::String(k.name().into())).unwrap_or(Value::Null),
        "spacing": rational_string(c.spacing),
        "X3": rational_string(c.x3),
        "source": {
            "type": match c.source.kind { SourceKind::CurrentSheet => "CurrentSheet", SourceKind::Dipole => "Dipole" },
            "a": rational_string(c.source.a),
            "pol": pol_value(c.source.polarization),
            "amp": [c.source.amplitude.re, c.source.amplitude.im],
        },
        "tol": c.tolerance,
        "periods": c.periods,
        "d": rational_string(c.d),
    })
}

pub fn serialize_config(c: &SimulationConfig) -> String {
    serde_json::to_string_pretty(&config_to_value(c)).expect("config serializes")
}

// ---------------------------------------------------------------------------
// CSV

/// C-style `%.12g`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..P).contains(&exp) {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn vec3(v: [f64; 3]) -> String {
    format!("{} {} {}", fmt_g(v[0]), fmt_g(v[1]), fmt_g(v[2]))
}

pub const BASIS_COLUMNS: &str = "kind,limit+,limit-,dimension,gram_condition,decay_rate";
pub const REPORT_COLUMNS: &str = "case,delta,pol,incident,transmitted_re,transmitted_im,reflected_re,reflected_im,ratio";
pub const SWEEP_COLUMNS: &str = "case,delta,pol,shielding_ratio,far_field_error,stability_ratio";

/// One line per basis element; limit vectors are space-separated triples,
/// a missing decay rate is written as `na`.
pub fn basis_csv(basis: &CohomologyBasis, decay: &[DecayReport]) -> String {
    let mut out = format!("{BASIS_COLUMNS}\n");
    for (e, d) in basis.elements.iter().zip(decay) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.kind(),
            vec3(e.limit_plus),
            vec3(e.limit_minus),
            basis.dimension,
            fmt_g(basis.gram_condition),
            d.rate.map(fmt_g).unwrap_or_else(|| "na".into())
        );
    }
    out
}

pub fn report_line(case: Option<CaseId>, delta: Rational, r: &TransmissionReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        case.map(|c| c.name()).unwrap_or("none"),
        rational_string(delta),
        r.polarization.name(),
        fmt_g(r.incident.norm()),
        fmt_g(r.transmitted.re),
        fmt_g(r.transmitted.im),
        fmt_g(r.reflected.re),
        fmt_g(r.reflected.im),
        fmt_g(r.shielding_ratio)
    )
}

pub fn report_csv(rows: &[(Option<CaseId>, Rational, TransmissionReport)]) -> String {
    let mut out = format!("{REPORT_COLUMNS}\n");
    for (case, delta, r) in rows {
        out.push_str(&report_line(*case, *delta, r));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = format!("{SWEEP_COLUMNS}\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.case.name(),
            rational_string(r.delta),
            r.polarization.name(),
            fmt_g(r.shielding_ratio),
            fmt_g(r.far_field_error),
            fmt_g(r.stability_ratio)
        );
    }
    out
}

// ---------------------------------------------------------------------------
// VTK

/// Legacy ASCII structured-points dataset with point scalars.
pub fn vtk_structured_points(title: &str, dims: [usize; 3], origin: [f64; 3], spacing: f64, fields: &[(&str, Vec<f64>)]) -> String {
    let points = dims[0] * dims[1] * dims[2];
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(out, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]);
    let _ = writeln!(out, "ORIGIN {} {} {}", fmt_g(origin[0]), fmt_g(origin[1]), fmt_g(origin[2]));
    let _ = writeln!(out, "SPACING {0} {0} {0}", fmt_g(spacing));
    let _ = writeln!(out, "POINT_DATA {points}");
    for (name, values) in fields {
        assert_eq!(values.len(), points, "field {name} has the wrong size");
        let _ = writeln!(out, "SCALARS {name} double 1");
        let _ = writeln!(out, "LOOKUP_TABLE default");
        for v in values {
            out.push_str(&fmt_g(*v));
            out.push('\n');
        }
    }
    out
}

/// `|E1|, |E2|, |E3|` averaged from the edges onto the lattice nodes.
pub fn field_vtk(field: &EMField) -> String {
    let lat = &field.lattice;
    let (nx, ny, nz) = (lat.nx, lat.ny, lat.nz);
    let nodes = nx * ny * (nz + 1);
    let mut comps = [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]];
    for k in 0..=nz {
        for j in 0..ny {
            for i in 0..nx {
                let n = i + nx * (j + ny * k);
                comps[0][n] = 0.5 * (field.e[lat.edge(0, i, j, k)] + field.e[lat.edge(0, lat.xm(i), j, k)]).norm();
                comps[1][n] = 0.5 * (field.e[lat.edge(1, i, j, k)] + field.e[lat.edge(1, i, lat.ym(j), k)]).norm();
                let up = if k < nz { Some(field.e[lat.edge(2, i, j, k)]) } else { None };
                let down = if k > 0 { Some(field.e[lat.edge(2, i, j, k - 1)]) } else { None };
                comps[2][n] = match (up, down) {
                    (Some(a), Some(b)) => 0.5 * (a + b).norm(),
                    (Some(a), None) | (None, Some(a)) => a.norm(),
                    (None, None) => 0.0,
                };
            }
        }
    }
    let [e1, e2, e3] = comps;
    vtk_structured_points(
        "cage-lab electric field magnitude",
        [nx, ny, nz + 1],
        [0.0, 0.0, -(lat.mid_layer() as f64) * field.h],
        field.h,
        &[("E1_abs", e1), ("E2_abs", e2), ("E3_abs", e3)],
    )
}

// ---------------------------------------------------------------------------
// manifests

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub input: Value,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes every `(relative path, contents)` pair below `dir`, then
/// `manifest.json` listing them with their digests.
pub fn write_outputs(dir: &Path, input: &Value, files: &[(String, Vec<u8>)]) -> Result<RunManifest> {
    let started = unix_now();
    fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for (name, bytes) in files {
        let path: PathBuf = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        outputs.push(OutputDigest {
            path: name.clone(),
            sha256: sha256_hex(bytes),
        });
    }
    let canonical = serde_json::to_vec(&sort_keys(input)).expect("json serializes");
    let manifest = RunManifest {
        config_hash: sha256_hex(&canonical),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: unix_now(),
        input: input.clone(),
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), text)?;
    Ok(manifest)
}

fn sort_keys(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), sort_keys(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(sort_keys).collect()),
        other => other.clone(),
    }
}
