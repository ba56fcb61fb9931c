//! JSON model-specification files: schema, validation and bridging to the
//! model builders.
//!
//! A spec file selects exactly one model kind and optionally a tolerance,
//! a gauge block and an `expect` map of check-name → expected boolean used
//! by the CLI exit-code logic. Complex numbers are accepted as JSON
//! numbers, two-element arrays `[re, im]`, or strings like `"1i"`,
//! `"-0.5+2i"`.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::check::{Error, Result};
use crate::gauge::{self, GaugeData};
use crate::linalg::{c, cr, CMat, CVec, C64};
use crate::models::{
    self, GraphConnection, M2Case, M2Connection, Measure, ModelBundle, PolygonConnection,
    PolygonLambda,
};

#[derive(Debug, Clone)]
pub enum ModelKind {
    Graph {
        vertices: Vec<String>,
        lambda: Vec<(String, String, f64)>,
        mu: MeasureSpec,
        connection: GraphConnSpec,
    },
    AnChain {
        n: usize,
        h: Vec<f64>,
    },
    Polygon {
        n: usize,
        lambda: PolygonLambda,
        connection: PolygonConnection,
    },
    M2 {
        case: M2Case,
        lambda: f64,
        rho: C64,
        connection: M2Connection,
    },
    FuzzySphere {
        n: usize,
        g_inv: [[f64; 3]; 3],
    },
}

#[derive(Debug, Clone)]
pub enum MeasureSpec {
    Auto,
    Explicit(BTreeMap<String, f64>),
}

#[derive(Debug, Clone)]
pub enum GraphConnSpec {
    Bare,
    /// Endpoint-pair keyed σ blocks, e.g. `"x,y": [[..], [..]]`.
    Sigma(BTreeMap<(String, String), Vec<Vec<C64>>>),
}

#[derive(Debug, Clone)]
pub enum GaugeSpec {
    /// Per-arrow coefficients `"x->y": c` (graph backends).
    GraphAlpha(BTreeMap<(String, String), C64>),
    /// k×k zeta matrix plus central alpha0 coefficients (free backends).
    Free { zeta: Vec<Vec<C64>>, alpha0: Vec<C64> },
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub tolerance: Option<f64>,
    pub expect: BTreeMap<String, bool>,
    pub gauge: Option<GaugeSpec>,
    /// The parsed document, echoed into reports.
    pub echo: Value,
}

/// Schema violations collected during parsing.
#[derive(Debug, Clone)]
pub struct SpecViolations(pub Vec<String>);

impl std::fmt::Display for SpecViolations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

const KINDS: [&str; 5] = ["graph", "an_chain", "polygon", "m2", "fuzzy_sphere"];

pub fn parse_model_str(text: &str) -> std::result::Result<ModelSpec, SpecViolations> {
    let mut errs = Vec::new();
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return Err(SpecViolations(vec![format!("invalid JSON: {e}")])),
    };
    let obj = match root.as_object() {
        Some(o) => o,
        None => return Err(SpecViolations(vec!["top level must be an object".into()])),
    };

    let kind_name = match obj.get("model").and_then(|v| v.as_str()) {
        Some(k) => k.to_string(),
        None => {
            errs.push("missing string field 'model'".into());
            String::new()
        }
    };
    if !kind_name.is_empty() && !KINDS.contains(&kind_name.as_str()) {
        errs.push(format!(
            "unknown model kind '{kind_name}' (known: {})",
            KINDS.join(", ")
        ));
    }
    for k in KINDS {
        if k != kind_name && obj.contains_key(k) {
            errs.push(format!("parameter block '{k}' does not match model '{kind_name}'"));
        }
    }

    let tolerance = match obj.get("tolerance") {
        None => None,
        Some(v) => match v.as_f64() {
            Some(t) if t.is_finite() && t > 0.0 => Some(t),
            _ => {
                errs.push("'tolerance' must be a positive finite number".into());
                None
            }
        },
    };

    let mut expect = BTreeMap::new();
    if let Some(v) = obj.get("expect") {
        match v.as_object() {
            Some(m) => {
                for (k, b) in m {
                    match b.as_bool() {
                        Some(x) => {
                            expect.insert(k.clone(), x);
                        }
                        None => errs.push(format!("'expect.{k}' must be a boolean")),
                    }
                }
            }
            None => errs.push("'expect' must be an object of booleans".into()),
        }
    }

    let params = obj.get(kind_name.as_str());
    let kind = match kind_name.as_str() {
        "graph" => parse_graph(params, &mut errs),
        "an_chain" => parse_an_chain(params, &mut errs),
        "polygon" => parse_polygon(params, &mut errs),
        "m2" => parse_m2(params, &mut errs),
        "fuzzy_sphere" => parse_fuzzy(params, &mut errs),
        _ => None,
    };

    let gauge = match obj.get("gauge") {
        None => None,
        Some(v) => parse_gauge(v, &mut errs),
    };

    match (kind, errs.is_empty()) {
        (Some(kind), true) => Ok(ModelSpec {
            kind,
            tolerance,
            expect,
            gauge,
            echo: root,
        }),
        _ => Err(SpecViolations(errs)),
    }
}

fn need_obj<'v>(v: Option<&'v Value>, name: &str, errs: &mut Vec<String>) -> Option<&'v serde_json::Map<String, Value>> {
    match v.and_then(|x| x.as_object()) {
        Some(o) => Some(o),
        None => {
            errs.push(format!("missing parameter object '{name}'"));
            None
        }
    }
}

fn parse_arrow_key(key: &str) -> Option<(String, String)> {
    let (a, b) = key.split_once("->")?;
    if a.is_empty() || b.is_empty() {
        return None;
    }
    Some((a.trim().to_string(), b.trim().to_string()))
}

fn parse_graph(v: Option<&Value>, errs: &mut Vec<String>) -> Option<ModelKind> {
    let o = need_obj(v, "graph", errs)?;
    let vertices: Vec<String> = match o.get("vertices").and_then(|x| x.as_array()) {
        Some(a) => a
            .iter()
            .filter_map(|x| x.as_str().map(|s| s.to_string()))
            .collect(),
        None => {
            errs.push("'graph.vertices' must be an array of strings".into());
            return None;
        }
    };
    let mut lambda = Vec::new();
    match o.get("lambda").and_then(|x| x.as_object()) {
        Some(m) => {
            for (k, val) in m {
                match (parse_arrow_key(k), val.as_f64()) {
                    (Some((a, b)), Some(l)) if l.is_finite() => lambda.push((a, b, l)),
                    (None, _) => errs.push(format!("'graph.lambda' key '{k}' is not of the form 'x->y'")),
                    _ => errs.push(format!("'graph.lambda.{k}' must be a finite number")),
                }
            }
        }
        None => {
            errs.push("'graph.lambda' must map arrows 'x->y' to weights".into());
        }
    }
    let mu = match o.get("mu") {
        None => MeasureSpec::Auto,
        Some(Value::String(s)) if s == "auto" => MeasureSpec::Auto,
        Some(Value::Object(m)) => {
            let mut out = BTreeMap::new();
            for (k, val) in m {
                match val.as_f64() {
                    Some(x) if x.is_finite() && x > 0.0 => {
                        out.insert(k.clone(), x);
                    }
                    _ => errs.push(format!("'graph.mu.{k}' must be a positive number")),
                }
            }
            MeasureSpec::Explicit(out)
        }
        Some(_) => {
            errs.push("'graph.mu' must be \"auto\" or an object of vertex weights".into());
            MeasureSpec::Auto
        }
    };
    let connection = match o.get("connection") {
        None => GraphConnSpec::Bare,
        Some(Value::String(s)) if s == "bare" => GraphConnSpec::Bare,
        Some(Value::Object(m)) => match m.get("sigma").and_then(|x| x.as_object()) {
            Some(blocks) => {
                let mut out = BTreeMap::new();
                for (k, val) in blocks {
                    let Some((a, b)) = k.split_once(',').map(|(a, b)| (a.trim().to_string(), b.trim().to_string())) else {
                        errs.push(format!("sigma block key '{k}' is not of the form 'x,y'"));
                        continue;
                    };
                    match parse_complex_matrix(val) {
                        Ok(mat) => {
                            out.insert((a, b), mat);
                        }
                        Err(e) => errs.push(format!("sigma block '{k}': {e}")),
                    }
                }
                GraphConnSpec::Sigma(out)
            }
            None => {
                errs.push("'graph.connection' object must contain 'sigma'".into());
                GraphConnSpec::Bare
            }
        },
        Some(_) => {
            errs.push("'graph.connection' must be \"bare\" or a sigma object".into());
            GraphConnSpec::Bare
        }
    };
    Some(ModelKind::Graph {
        vertices,
        lambda,
        mu,
        connection,
    })
}

fn parse_an_chain(v: Option<&Value>, errs: &mut Vec<String>) -> Option<ModelKind> {
    let o = need_obj(v, "an_chain", errs)?;
    let n = match o.get("n").and_then(|x| x.as_u64()) {
        Some(n) if n >= 2 => n as usize,
        _ => {
            errs.push("'an_chain.n' must be an integer ≥ 2".into());
            return None;
        }
    };
    let h = match o.get("h") {
        None => vec![-1.0; n - 1],
        Some(Value::Array(a)) => {
            let h: Vec<f64> = a.iter().filter_map(|x| x.as_f64()).collect();
            if h.len() != n - 1 {
                errs.push(format!("'an_chain.h' must have {} entries", n - 1));
            }
            h
        }
        Some(_) => {
            errs.push("'an_chain.h' must be an array of numbers".into());
            Vec::new()
        }
    };
    Some(ModelKind::AnChain { n, h })
}

fn parse_polygon(v: Option<&Value>, errs: &mut Vec<String>) -> Option<ModelKind> {
    let o = need_obj(v, "polygon", errs)?;
    let n = match o.get("n").and_then(|x| x.as_u64()) {
        Some(n) if n >= 3 => n as usize,
        _ => {
            errs.push("'polygon.n' must be an integer ≥ 3".into());
            return None;
        }
    };
    let lambda = match o.get("lambda") {
        Some(Value::Array(a)) => {
            let v: Vec<f64> = a.iter().filter_map(|x| x.as_f64()).collect();
            if v.len() != n {
                errs.push(format!("'polygon.lambda' must have {n} edge weights"));
            }
            PolygonLambda::PerEdge(v)
        }
        Some(x) => match x.as_f64() {
            Some(l) if l.is_finite() && l != 0.0 => PolygonLambda::Constant(l),
            _ => {
                errs.push("'polygon.lambda' must be a nonzero number or per-edge array".into());
                PolygonLambda::Constant(-1.0)
            }
        },
        None => PolygonLambda::Constant(-1.0),
    };
    let connection = match o.get("connection").and_then(|x| x.as_str()) {
        None | Some("bare") => PolygonConnection::Bare,
        Some("qlc") => PolygonConnection::Qlc,
        Some(other) => {
            errs.push(format!("'polygon.connection' must be 'bare' or 'qlc', got '{other}'"));
            PolygonConnection::Bare
        }
    };
    Some(ModelKind::Polygon {
        n,
        lambda,
        connection,
    })
}

fn parse_m2(v: Option<&Value>, errs: &mut Vec<String>) -> Option<ModelKind> {
    let o = need_obj(v, "m2", errs)?;
    let case = match o.get("case").and_then(|x| x.as_str()) {
        Some("i") => M2Case::I,
        Some("ii") => M2Case::II,
        _ => {
            errs.push("'m2.case' must be \"i\" or \"ii\"".into());
            return None;
        }
    };
    let lambda = match o.get("lambda").and_then(|x| x.as_f64()) {
        Some(l) if l.is_finite() && l != 0.0 => l,
        None => -1.0,
        _ => {
            errs.push("'m2.lambda' must be a nonzero real number".into());
            -1.0
        }
    };
    let rho = match o.get("rho") {
        None => cr(0.0),
        Some(v) => match parse_complex(v) {
            Ok(z) => z,
            Err(e) => {
                errs.push(format!("'m2.rho': {e}"));
                cr(0.0)
            }
        },
    };
    if rho.re != 0.0 {
        errs.push("'m2.rho' must be purely imaginary".into());
    }
    let connection = match o.get("connection").and_then(|x| x.as_str()) {
        None | Some("qlc") => M2Connection::Qlc,
        Some("bare") => M2Connection::Bare,
        Some(other) => {
            errs.push(format!("'m2.connection' must be 'bare' or 'qlc', got '{other}'"));
            M2Connection::Qlc
        }
    };
    Some(ModelKind::M2 {
        case,
        lambda,
        rho,
        connection,
    })
}

fn parse_fuzzy(v: Option<&Value>, errs: &mut Vec<String>) -> Option<ModelKind> {
    let o = need_obj(v, "fuzzy_sphere", errs)?;
    let n = match o.get("n").and_then(|x| x.as_u64()) {
        Some(n) if n >= 2 => n as usize,
        _ => {
            errs.push("'fuzzy_sphere.n' must be an integer ≥ 2".into());
            return None;
        }
    };
    let mut g_inv = [[0.0; 3]; 3];
    match o.get("g_inv") {
        None => {
            for (i, row) in g_inv.iter_mut().enumerate() {
                row[i] = 1.0;
            }
        }
        Some(Value::String(s)) if s == "round" => {
            for (i, row) in g_inv.iter_mut().enumerate() {
                row[i] = 1.0;
            }
        }
        Some(Value::Array(rows)) if rows.len() == 3 => {
            for (i, r) in rows.iter().enumerate() {
                match r.as_array() {
                    Some(cols) if cols.len() == 3 => {
                        for (j, x) in cols.iter().enumerate() {
                            match x.as_f64() {
                                Some(val) if val.is_finite() => g_inv[i][j] = val,
                                _ => errs.push("'fuzzy_sphere.g_inv' entries must be finite numbers".into()),
                            }
                        }
                    }
                    _ => errs.push("'fuzzy_sphere.g_inv' must be a 3×3 array".into()),
                }
            }
        }
        Some(_) => errs.push("'fuzzy_sphere.g_inv' must be \"round\" or a 3×3 array".into()),
    }
    Some(ModelKind::FuzzySphere { n, g_inv })
}

fn parse_gauge(v: &Value, errs: &mut Vec<String>) -> Option<GaugeSpec> {
    let o = match v.as_object() {
        Some(o) => o,
        None => {
            errs.push("'gauge' must be an object".into());
            return None;
        }
    };
    if let Some(alpha) = o.get("alpha") {
        let m = match alpha.as_object() {
            Some(m) => m,
            None => {
                errs.push("'gauge.alpha' must map arrows to coefficients".into());
                return None;
            }
        };
        let mut out = BTreeMap::new();
        for (k, val) in m {
            match (parse_arrow_key(k), parse_complex(val)) {
                (Some(pair), Ok(z)) => {
                    out.insert(pair, z);
                }
                (None, _) => errs.push(format!("'gauge.alpha' key '{k}' is not of the form 'x->y'")),
                (_, Err(e)) => errs.push(format!("'gauge.alpha.{k}': {e}")),
            }
        }
        return Some(GaugeSpec::GraphAlpha(out));
    }
    if o.contains_key("zeta") || o.contains_key("alpha0") {
        let zeta = match o.get("zeta") {
            None => Vec::new(),
            Some(v) => match parse_complex_matrix(v) {
                Ok(m) => m,
                Err(e) => {
                    errs.push(format!("'gauge.zeta': {e}"));
                    return None;
                }
            },
        };
        let alpha0 = match o.get("alpha0") {
            None => Vec::new(),
            Some(Value::Array(a)) => {
                let mut out = Vec::new();
                for x in a {
                    match parse_complex(x) {
                        Ok(z) => out.push(z),
                        Err(e) => errs.push(format!("'gauge.alpha0': {e}")),
                    }
                }
                out
            }
            Some(_) => {
                errs.push("'gauge.alpha0' must be an array of complex coefficients".into());
                Vec::new()
            }
        };
        return Some(GaugeSpec::Free { zeta, alpha0 });
    }
    errs.push("'gauge' must contain 'alpha' (graphs) or 'zeta'/'alpha0' (free backends)".into());
    None
}

// ----------------------------------------------------------------------
// complex literals

/// Parse a complex number from a JSON number, `[re, im]` pair, or a string
/// like `"1i"`, `"-0.5+2i"`, `"i"`.
pub fn parse_complex(v: &Value) -> std::result::Result<C64, String> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .map(cr)
            .ok_or_else(|| "number is not finite".into()),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or("real part must be a number")?;
            let im = a[1].as_f64().ok_or("imaginary part must be a number")?;
            if !re.is_finite() || !im.is_finite() {
                return Err("complex parts must be finite".into());
            }
            Ok(c(re, im))
        }
        Value::String(s) => parse_complex_str(s),
        _ => Err("expected a number, [re, im] pair, or complex string".into()),
    }
}

/// Parse complex literals of the forms `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex_str(s: &str) -> std::result::Result<C64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty complex literal".into());
    }
    let parse_real = |t: &str| -> std::result::Result<f64, String> {
        t.parse::<f64>()
            .map_err(|_| format!("cannot parse '{t}' as a number"))
            .and_then(|x| {
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(format!("'{t}' is not finite"))
                }
            })
    };
    if !compact.ends_with('i') {
        return parse_real(&compact).map(cr);
    }
    let body = &compact[..compact.len() - 1];
    // find a split between real and imaginary parts: a sign that is not the
    // leading character and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let ch = bytes[i] as char;
        if (ch == '+' || ch == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() { 0.0 } else { parse_real(re_str)? };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_real(t)?,
    };
    Ok(c(re, im))
}

fn parse_complex_matrix(v: &Value) -> std::result::Result<Vec<Vec<C64>>, String> {
    let rows = v.as_array().ok_or("expected an array of rows")?;
    let mut out = Vec::with_capacity(rows.len());
    let mut width = None;
    for r in rows {
        let cols = r.as_array().ok_or("expected an array row")?;
        match width {
            None => width = Some(cols.len()),
            Some(w) if w != cols.len() => return Err("ragged matrix rows".into()),
            _ => {}
        }
        let mut row = Vec::with_capacity(cols.len());
        for x in cols {
            row.push(parse_complex(x)?);
        }
        out.push(row);
    }
    Ok(out)
}

// ----------------------------------------------------------------------
// bridging to the builders

pub fn build_bundle(spec: &ModelSpec) -> Result<ModelBundle> {
    match &spec.kind {
        ModelKind::Graph {
            vertices,
            lambda,
            mu,
            connection,
        } => {
            let vrefs: Vec<&str> = vertices.iter().map(|s| s.as_str()).collect();
            let arrows: Vec<(&str, &str, f64)> = lambda
                .iter()
                .map(|(a, b, l)| (a.as_str(), b.as_str(), *l))
                .collect();
            let measure = match mu {
                MeasureSpec::Auto => Measure::Auto,
                MeasureSpec::Explicit(m) => {
                    let mut out = Vec::with_capacity(vertices.len());
                    for v in vertices {
                        let w = m.get(v).copied().ok_or_else(|| {
                            Error::InvalidModel(format!("measure missing vertex '{v}'"))
                        })?;
                        out.push(w);
                    }
                    Measure::Explicit(out)
                }
            };
            let conn = match connection {
                GraphConnSpec::Bare => GraphConnection::Bare,
                GraphConnSpec::Sigma(blocks) => {
                    let mut out = BTreeMap::new();
                    for ((a, b), rows) in blocks {
                        let d = rows.len();
                        let mut m = CMat::zeros(d, d);
                        for (i, r) in rows.iter().enumerate() {
                            if r.len() != d {
                                return Err(Error::Dimension(format!(
                                    "sigma block '{a},{b}' must be square"
                                )));
                            }
                            for (j, z) in r.iter().enumerate() {
                                m[(i, j)] = *z;
                            }
                        }
                        out.insert((a.clone(), b.clone()), m);
                    }
                    GraphConnection::SigmaBlocks(out)
                }
            };
            models::weighted_graph(&vrefs, &arrows, measure, conn)
        }
        ModelKind::AnChain { n, h } => models::an_chain(*n, h),
        ModelKind::Polygon {
            n,
            lambda,
            connection,
        } => models::polygon(*n, lambda.clone(), *connection),
        ModelKind::M2 {
            case,
            lambda,
            rho,
            connection,
        } => models::m2(*case, *lambda, *rho, *connection),
        ModelKind::FuzzySphere { n, g_inv } => models::fuzzy_sphere(*n, g_inv),
    }
}

/// Materialise the gauge data declared in a spec against a built bundle.
pub fn build_gauge(spec: &GaugeSpec, bundle: &ModelBundle, tol: f64) -> Result<GaugeData> {
    match spec {
        GaugeSpec::GraphAlpha(coeffs) => {
            let g = bundle.calc.as_graph().ok_or_else(|| {
                Error::InvalidModel("gauge.alpha needs a graph model".into())
            })?;
            let mut per_arrow = vec![cr(0.0); g.arrows.len()];
            for ((a, b), z) in coeffs {
                let x = g
                    .vertex_index(a)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{a}'")))?;
                let y = g
                    .vertex_index(b)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{b}'")))?;
                let idx = g.arrow_index(x, y).ok_or_else(|| {
                    Error::InvalidModel(format!("unknown arrow {a}->{b} in gauge.alpha"))
                })?;
                per_arrow[idx] = *z;
            }
            let zeta = gauge::graph_zeta(&bundle.calc, &per_arrow)?;
            let alpha0 = CVec::zeros(bundle.calc.dim_o1());
            gauge::make_gauge(&bundle.calc, zeta, alpha0, tol)
        }
        GaugeSpec::Free { zeta, alpha0 } => {
            let f = bundle.calc.as_free().ok_or_else(|| {
                Error::InvalidModel("gauge.zeta/alpha0 need a free-module model".into())
            })?;
            let k = f.k;
            let mut zk = CMat::zeros(k, k);
            if !zeta.is_empty() {
                if zeta.len() != k || zeta.iter().any(|r| r.len() != k) {
                    return Err(Error::Dimension(format!("gauge.zeta must be {k}×{k}")));
                }
                for (i, r) in zeta.iter().enumerate() {
                    for (j, z) in r.iter().enumerate() {
                        zk[(i, j)] = *z;
                    }
                }
            }
            let zeta_full = gauge::free_zeta(&bundle.calc, &zk)?;
            let mut a0 = CVec::zeros(bundle.calc.dim_o1());
            if !alpha0.is_empty() {
                if alpha0.len() != k {
                    return Err(Error::Dimension(format!("gauge.alpha0 must have {k} entries")));
                }
                for (i, z) in alpha0.iter().enumerate() {
                    a0 += bundle.calc.free_one_form(i, bundle.calc.algebra.unit()) * *z;
                }
            }
            gauge::make_gauge(&bundle.calc, zeta_full, a0, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_spec_parses() {
        let spec = parse_model_str(
            r#"{"model":"polygon","polygon":{"n":3,"lambda":-1,"connection":"qlc"}}"#,
        )
        .unwrap();
        match spec.kind {
            ModelKind::Polygon {
                n,
                lambda: PolygonLambda::Constant(l),
                connection,
            } => {
                assert_eq!(n, 3);
                assert_eq!(l, -1.0);
                assert_eq!(connection, PolygonConnection::Qlc);
            }
            other => panic!("unexpected kind {other:?}"),
        }
        assert!(build_bundle(&spec).is_ok());
    }

    #[test]
    fn m2_spec_parses_imaginary_rho() {
        let spec = parse_model_str(
            r#"{"model":"m2","m2":{"case":"ii","lambda":-1,"rho":"1i"}}"#,
        )
        .unwrap();
        match spec.kind {
            ModelKind::M2 { rho, .. } => assert_eq!(rho, c(0.0, 1.0)),
            other => panic!("unexpected kind {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_a_violation() {
        let err = parse_model_str(r#"{"model":"torus","torus":{}}"#).unwrap_err();
        assert!(err.0.iter().any(|m| m.contains("unknown model kind")));
    }

    #[test]
    fn missing_reverse_arrow_fails_at_build() {
        let spec = parse_model_str(
            r#"{"model":"graph","graph":{"vertices":["x","y"],"lambda":{"x->y":-1}}}"#,
        )
        .unwrap();
        let err = build_bundle(&spec).unwrap_err();
        assert!(err.to_string().contains("reverse"));
    }

    #[test]
    fn non_boolean_expect_rejected() {
        let err =
            parse_model_str(r#"{"model":"polygon","polygon":{"n":3},"expect":{"x":1}}"#)
                .unwrap_err();
        assert!(err.0.iter().any(|m| m.contains("boolean")));
    }

    #[test]
    fn mismatched_parameter_block_rejected() {
        let err = parse_model_str(
            r#"{"model":"polygon","polygon":{"n":3},"m2":{"case":"i"}}"#,
        )
        .unwrap_err();
        assert!(err.0.iter().any(|m| m.contains("does not match")));
    }

    #[test]
    fn complex_literal_forms() {
        assert_eq!(parse_complex_str("1i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex_str("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex_str("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex_str("2").unwrap(), cr(2.0));
        assert_eq!(parse_complex_str("-0.5+2i").unwrap(), c(-0.5, 2.0));
        assert_eq!(parse_complex_str("1e-3i").unwrap(), c(0.0, 1e-3));
        assert_eq!(parse_complex_str("1.5e2-2.5e-1i").unwrap(), c(150.0, -0.25));
        assert_eq!(parse_complex_str(" 1 + 2i ").unwrap(), c(1.0, 2.0));
        assert!(parse_complex_str("").is_err());
        assert!(parse_complex_str("foo").is_err());
        assert!(parse_complex_str("1+2j").is_err());
        assert!(parse_complex_str("inf").is_err());
        assert!(parse_complex_str("nani").is_err());
    }

    #[test]
    fn complex_json_forms() {
        assert_eq!(parse_complex(&serde_json::json!(2.5)).unwrap(), cr(2.5));
        assert_eq!(
            parse_complex(&serde_json::json!([1.0, -2.0])).unwrap(),
            c(1.0, -2.0)
        );
        assert!(parse_complex(&serde_json::json!([1.0])).is_err());
        assert!(parse_complex(&serde_json::json!({"re": 1.0})).is_err());
    }

    #[test]
    fn graph_gauge_spec_builds() {
        let spec = parse_model_str(
            r#"{
              "model": "graph",
              "graph": {
                "vertices": ["x", "y"],
                "lambda": {"x->y": -1, "y->x": -1}
              },
              "gauge": {"alpha": {"x->y": 1}}
            }"#,
        )
        .unwrap();
        let bundle = build_bundle(&spec).unwrap();
        let g = build_gauge(spec.gauge.as_ref().unwrap(), &bundle, 1e-9).unwrap();
        assert!((g.alpha.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fuzzy_round_shorthand() {
        let spec = parse_model_str(
            r#"{"model":"fuzzy_sphere","fuzzy_sphere":{"n":2,"g_inv":"round"}}"#,
        )
        .unwrap();
        match spec.kind {
            ModelKind::FuzzySphere { g_inv, .. } => {
                assert_eq!(g_inv, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
            }
            other => panic!("unexpected kind {other:?}"),
        }
    }
}
