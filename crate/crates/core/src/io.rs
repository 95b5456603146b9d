//! JSON set and scenario formats, CSV writers.
//!
//! Sets are objects tagged by `"type"`; matrices are arrays of rows.
//!
//! ```json
//! {"type": "czono", "G": [[1, 0], [0, 1]], "c": [0, 0], "A": [[1, 1]], "b": [0]}
//! {"type": "ellipsoid", "G": [[0.1, 0], [0, 0.1]], "c": [0, 0]}
//! {"type": "hpoly", "H": [[1, 0], [-1, 0]], "k": [1, 1]}
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::models::{self, ChainDisturbance, ChainParams, DiDisturbance, GoalRepr};
use crate::rcset::{Approx, RcResult, RcScenario, RcStep, StateConstraint, Variant};
use crate::sets::{ConstrainedZonotope, HPolyhedron, Halfspace, SymmetricSet};

/// Any set the file format can carry.
#[derive(Clone, Debug)]
pub enum AnySet {
    CZono(ConstrainedZonotope),
    Symmetric(SymmetricSet),
    HPoly(HPolyhedron),
    Halfspace(Halfspace),
}

impl AnySet {
    pub fn dim(&self) -> usize {
        match self {
            AnySet::CZono(c) => c.dim(),
            AnySet::Symmetric(s) => s.dim(),
            AnySet::HPoly(p) => p.dim(),
            AnySet::Halfspace(h) => h.p.len(),
        }
    }

    /// Constrained zonotope view; zonotopes convert directly, a bounded
    /// H-Rep goes through the Invertible form.
    pub fn to_czono(&self) -> Result<ConstrainedZonotope> {
        match self {
            AnySet::CZono(c) => Ok(c.clone()),
            AnySet::Symmetric(s) => s
                .to_czono()
                .ok_or_else(|| Error::InvalidInput("only zonotopes convert to constrained zonotopes".into())),
            AnySet::HPoly(p) => crate::czops::invertible_from_hpoly(p),
            AnySet::Halfspace(_) => Err(Error::InvalidInput("a halfspace is unbounded".into())),
        }
    }

    /// Symmetric set view; a constrained zonotope qualifies only without
    /// constraints.
    pub fn to_symmetric(&self) -> Result<SymmetricSet> {
        match self {
            AnySet::Symmetric(s) => Ok(s.clone()),
            AnySet::CZono(c) if c.n_con() == 0 => SymmetricSet::zonotope(c.g().clone(), c.c().to_vec()),
            _ => Err(Error::InvalidInput("expected a zonotope, ellipsoid or l1ball".into())),
        }
    }
}

fn parse_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), msg: msg.into() }
}

fn matrix_field(v: &Value, path: &str, field: &str) -> Result<Matrix> {
    let rows = v
        .get(field)
        .ok_or_else(|| parse_err(path, format!("missing field `{field}`")))?
        .as_array()
        .ok_or_else(|| parse_err(path, format!("field `{field}` must be an array of rows")))?;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| parse_err(path, format!("`{field}[{i}]` must be an array")))?;
        let mut row = Vec::with_capacity(r.len());
        for (j, x) in r.iter().enumerate() {
            row.push(x.as_f64().ok_or_else(|| parse_err(path, format!("`{field}[{i}][{j}]` must be a number")))?);
        }
        if let Some(first) = out.first() {
            if first.len() != row.len() {
                return Err(parse_err(path, format!("`{field}[{i}]` has {} entries, row 0 has {}", row.len(), first.len())));
            }
        }
        out.push(row);
    }
    Ok(linalg::from_rows(&out))
}

fn vector_field(v: &Value, path: &str, field: &str) -> Result<Vec<f64>> {
    let xs = v
        .get(field)
        .ok_or_else(|| parse_err(path, format!("missing field `{field}`")))?
        .as_array()
        .ok_or_else(|| parse_err(path, format!("field `{field}` must be an array")))?;
    xs.iter()
        .enumerate()
        .map(|(i, x)| x.as_f64().ok_or_else(|| parse_err(path, format!("`{field}[{i}]` must be a number"))))
        .collect()
}

/// Matrix with an explicit column count, so that `[]` can mean `0 × cols`.
fn matrix_or_empty(v: &Value, path: &str, field: &str, cols: usize) -> Result<Matrix> {
    let m = matrix_field(v, path, field)?;
    if m.nrows() == 0 {
        return Ok(Matrix::zeros(0, cols));
    }
    Ok(m)
}

fn with_path<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Parse { .. } => e,
        e => parse_err(path, e.to_string()),
    })
}

/// Decodes a set object; `path` prefixes error messages.
pub fn set_from_value(v: &Value, path: &str) -> Result<AnySet> {
    let kind = v
        .get("type")
        .ok_or_else(|| parse_err(path, "missing field `type`"))?
        .as_str()
        .ok_or_else(|| parse_err(path, "field `type` must be a string"))?;
    let set = match kind {
        "czono" | "zonotope" => {
            let g = matrix_field(v, path, "G")?;
            let c = vector_field(v, path, "c")?;
            let ng = g.ncols();
            let has_a = v.get("A").is_some();
            if kind == "zonotope" || !has_a {
                if v.get("b").is_some() && !has_a {
                    return Err(parse_err(path, "field `b` given without `A`"));
                }
                AnySet::CZono(with_path(ConstrainedZonotope::zonotope(g, c), path)?)
            } else {
                let a = matrix_or_empty(v, path, "A", ng)?;
                let b = if v.get("b").is_some() { vector_field(v, path, "b")? } else { Vec::new() };
                AnySet::CZono(with_path(ConstrainedZonotope::new(g, c, a, b), path)?)
            }
        }
        "ellipsoid" => AnySet::Symmetric(with_path(
            SymmetricSet::ellipsoid(matrix_field(v, path, "G")?, vector_field(v, path, "c")?),
            path,
        )?),
        "l1ball" => AnySet::Symmetric(with_path(
            SymmetricSet::cross_polytope(matrix_field(v, path, "G")?, vector_field(v, path, "c")?),
            path,
        )?),
        "hpoly" => AnySet::HPoly(with_path(HPolyhedron::new(matrix_field(v, path, "H")?, vector_field(v, path, "k")?), path)?),
        "halfspace" => {
            let q = v
                .get("q")
                .ok_or_else(|| parse_err(path, "missing field `q`"))?
                .as_f64()
                .ok_or_else(|| parse_err(path, "field `q` must be a number"))?;
            AnySet::Halfspace(with_path(Halfspace::new(vector_field(v, path, "p")?, q), path)?)
        }
        other => {
            return Err(parse_err(
                path,
                format!("unknown set type `{other}` (expected czono, zonotope, ellipsoid, l1ball, hpoly, halfspace)"),
            ))
        }
    };
    Ok(set)
}

fn json_err(path: &str, e: serde_json::Error) -> Error {
    parse_err(path, format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_set(text: &str, path: &str) -> Result<AnySet> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_err(path, e))?;
    set_from_value(&v, path)
}

pub fn read_set(path: &Path) -> Result<AnySet> {
    let text = fs::read_to_string(path)?;
    parse_set(&text, &path.display().to_string())
}

fn rows(m: &Matrix) -> Value {
    serde_json::to_value(linalg::to_rows(m.as_ref())).expect("finite matrix")
}

fn vector(x: &[f64]) -> Value {
    serde_json::to_value(x).expect("finite vector")
}

pub fn czono_to_value(c: &ConstrainedZonotope) -> Value {
    serde_json::json!({
        "type": "czono",
        "G": rows(c.g()),
        "c": vector(c.c()),
        "A": rows(&c.a_dense()),
        "b": vector(c.b()),
    })
}

pub fn set_to_value(s: &AnySet) -> Result<Value> {
    Ok(match s {
        AnySet::CZono(c) => czono_to_value(c),
        AnySet::Symmetric(s) => {
            let kind = match s {
                SymmetricSet::Zonotope { .. } => "zonotope",
                SymmetricSet::Ellipsoid { .. } => "ellipsoid",
                SymmetricSet::CrossPolytope { .. } => "l1ball",
                SymmetricSet::Generic { .. } => {
                    return Err(Error::InvalidInput("generic symmetric sets have no file form".into()))
                }
            };
            serde_json::json!({"type": kind, "G": rows(s.generators().expect("closed-form kind")), "c": vector(s.center())})
        }
        AnySet::HPoly(p) => serde_json::json!({"type": "hpoly", "H": rows(&p.h), "k": vector(&p.k)}),
        AnySet::Halfspace(h) => serde_json::json!({"type": "halfspace", "p": vector(&h.p), "q": h.q}),
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string(v).expect("serializable value");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Disturbance selector in a scenario config: a named preset or a set
/// object.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum WConfig {
    Named(String),
    Set(Value),
}

/// Scenario config for the `rc` and `oracle-compare` commands.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcConfig {
    /// `double-integrator`, `stable-2d`, `chain`, `random-2d` or an explicit
    /// model object.
    pub model: Value,
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "W", default)]
    pub w: Option<WConfig>,
    #[serde(default = "default_approx")]
    pub approx: String,
    #[serde(default)]
    pub emit_boundary: bool,
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub masses: Option<usize>,
    #[serde(default)]
    pub goal: Option<String>,
    /// Methods for `oracle-compare`; all applicable ones when absent.
    #[serde(default)]
    pub methods: Option<Vec<String>>,
}

fn default_approx() -> String {
    "inner".into()
}

fn default_directions() -> usize {
    100
}

/// Explicit model: matrices plus set objects for `U`, `W`, `X` and `G`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitModel {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "F", default)]
    f: Option<Vec<Vec<f64>>>,
    #[serde(rename = "U")]
    u: Value,
    #[serde(rename = "W")]
    w: Value,
    #[serde(rename = "X")]
    x: Value,
    #[serde(rename = "G")]
    g: Value,
}

pub fn parse_config(text: &str, path: &str) -> Result<RcConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RcConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        parse_err(path, format!("field `{field}`: line {}, column {}: {inner}", inner.line(), inner.column()))
    })?;
    cfg.approx_kind().map_err(|e| parse_err(path, e.to_string()))?;
    if let Some(v) = &cfg.variant {
        parse_variant(v).map_err(|e| parse_err(path, e.to_string()))?;
    }
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<RcConfig> {
    let text = fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

fn parse_variant(s: &str) -> Result<Variant> {
    match s {
        "A" | "invertible-a" => Ok(Variant::InvertibleA),
        "B" | "polytopic-x" => Ok(Variant::PolytopicX),
        other => Err(Error::InvalidInput(format!("field `variant`: unknown `{other}` (expected A or B)"))),
    }
}

impl RcConfig {
    pub fn approx_kind(&self) -> Result<Approx> {
        match self.approx.as_str() {
            "inner" => Ok(Approx::Inner),
            "outer" => Ok(Approx::Outer),
            "two-stage" => Ok(Approx::TwoStage),
            other => Err(Error::InvalidInput(format!("field `approx`: unknown `{other}` (expected inner, outer, two-stage)"))),
        }
    }

    fn model_name(&self) -> Option<&str> {
        self.model.as_str()
    }

    /// Named double-integrator disturbance, if any.
    fn di_disturbance(&self, path: &str) -> Result<DiDisturbance> {
        match &self.w {
            None => Ok(DiDisturbance::Ball),
            Some(WConfig::Named(s)) => {
                DiDisturbance::parse(s).ok_or_else(|| parse_err(path, format!("field `W`: unknown preset `{s}`")))
            }
            Some(WConfig::Set(_)) => Err(parse_err(path, "field `W`: the double integrator takes a preset name")),
        }
    }

    /// Builds the scenario the config describes.
    pub fn scenario(&self, path: &str) -> Result<RcScenario> {
        let variant = self.variant.as_deref().map(parse_variant).transpose().map_err(|e| parse_err(path, e.to_string()))?;
        let sc = match self.model_name() {
            Some("double-integrator") => {
                let sc = models::double_integrator(self.dt.unwrap_or(0.1), self.di_disturbance(path)?, self.horizon)?;
                match variant {
                    Some(v) if v != sc.variant => RcScenario::new(sc.steps, sc.goal, v)?,
                    _ => sc,
                }
            }
            Some("stable-2d") => models::stable_2d_with(self.horizon, variant.unwrap_or(Variant::InvertibleA))?,
            Some("chain") => {
                let mut p = ChainParams::new(self.masses.unwrap_or(5));
                if let Some(dt) = self.dt {
                    p.dt = dt;
                }
                let goal = match self.goal.as_deref() {
                    None | Some("invertible") => GoalRepr::Invertible,
                    Some("zonotope") => GoalRepr::Zonotope,
                    Some(other) => return Err(parse_err(path, format!("field `goal`: unknown `{other}`"))),
                };
                let w = match &self.w {
                    None => ChainDisturbance::Box(1e-4),
                    Some(WConfig::Named(s)) if s == "box" => ChainDisturbance::Box(1e-4),
                    Some(WConfig::Named(s)) if s == "ball" => ChainDisturbance::Ball(1e-4),
                    Some(other) => return Err(parse_err(path, format!("field `W`: chain takes `box` or `ball`, got {other:?}"))),
                };
                models::spring_mass_chain(p, self.horizon, goal, w)?
            }
            Some("random-2d") => models::random_planar(self.seed, self.horizon, variant.unwrap_or(Variant::PolytopicX))?,
            Some(other) => {
                return Err(parse_err(
                    path,
                    format!("field `model`: unknown `{other}` (expected double-integrator, stable-2d, chain, random-2d)"),
                ))
            }
            None => self.explicit_scenario(path, variant)?,
        };
        // a set-valued W replaces the preset
        match &self.w {
            Some(WConfig::Set(v)) if self.model_name().is_some() && self.model_name() != Some("double-integrator") => {
                let w = set_from_value(v, &format!("{path}: W"))?.to_symmetric()?;
                sc.with_disturbance(w)
            }
            _ => Ok(sc),
        }
    }

    fn explicit_scenario(&self, path: &str, variant: Option<Variant>) -> Result<RcScenario> {
        let m: ExplicitModel = serde_json::from_value(self.model.clone()).map_err(|e| parse_err(path, format!("field `model`: {e}")))?;
        let a = linalg::from_rows(&m.a);
        let b = linalg::from_rows(&m.b);
        let f = match &m.f {
            Some(f) => linalg::from_rows(f),
            None => Matrix::identity(a.nrows(), a.nrows()),
        };
        let sub = |name: &str| format!("{path}: model.{name}");
        let u = set_from_value(&m.u, &sub("U"))?.to_czono()?;
        let w = set_from_value(&m.w, &sub("W"))?.to_symmetric()?;
        let x = match set_from_value(&m.x, &sub("X"))? {
            AnySet::HPoly(p) => StateConstraint::HPoly(p),
            other => StateConstraint::CZono(other.to_czono()?),
        };
        let g = set_from_value(&m.g, &sub("G"))?.to_czono()?;
        let variant = variant.unwrap_or(Variant::PolytopicX);
        let step = with_path(RcStep::new(a, b, f, u, w, x), path)?;
        RcScenario::time_invariant(step, self.horizon, g, variant)
    }
}

/// CSV with a header row, `.` decimals and LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text)?;
        Ok(())
    }
}

/// Deterministic per-step table: `t, M, N, dof, empty`.
pub fn summary_csv(res: &RcResult) -> Csv {
    let mut csv = Csv::new(&["t", "M", "N", "dof", "empty"]);
    for r in &res.records {
        match &r.complexity {
            Some(c) => csv.row(&[
                r.t.to_string(),
                c.constraints.to_string(),
                c.generators.to_string(),
                format_dof(c.dof_order()),
                "false".into(),
            ]),
            None => csv.row(&[r.t.to_string(), String::new(), String::new(), String::new(), "true".into()]),
        }
    }
    csv
}

fn format_dof(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        let mut s = format!("{x:.6}");
        while s.ends_with('0') {
            s.pop();
        }
        s
    }
}

/// Wall time per step: `t, millis`.
pub fn timings_csv(res: &RcResult) -> Csv {
    let mut csv = Csv::new(&["t", "millis"]);
    for r in &res.records {
        csv.row(&[r.t.to_string(), format!("{:.3}", r.millis)]);
    }
    csv
}

/// One point per line, `x,y`.
pub fn points_csv(points: &[[f64; 2]]) -> Csv {
    let mut csv = Csv::new(&["x", "y"]);
    for p in points {
        csv.row(&[format!("{}", p[0]), format!("{}", p[1])]);
    }
    csv
}

/// Renders rows of `f64` with a header; used for ad-hoc tables.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        for (i, x) in r.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{x}");
        }
        s.push('\n');
    }
    s
}

/// Metadata written next to a Pontryagin-difference result.
#[derive(Clone, Debug, Serialize)]
pub struct PdiffMeta {
    pub mode: String,
    pub empty: bool,
    pub diag: Option<Vec<f64>>,
    pub constraints: Option<usize>,
    pub generators: Option<usize>,
    pub dof: Option<f64>,
    pub millis: f64,
}
