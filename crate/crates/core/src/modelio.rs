//! The `.pts.json` model format.
//!
//! ```json
//! {
//!   "alphabet": ["a", "b"],
//!   "discrete": {
//!     "states": ["0", "1"],
//!     "termination": {"1": "1/2"},
//!     "transitions": [{"from": "0", "label": "a", "prob": "1", "to": "1"}]
//!   },
//!   "formatVersion": 1,
//!   "type": "infty"
//! }
//! ```
//!
//! Exactly one of `discrete`, `grid` or `builtin` carries the body. Grid
//! bodies hold `interval: [lo, hi]`, `cells: N`, `densities: {label: N×N}`
//! and optional `termination: [N weights]`; builtin bodies hold `name` and,
//! for `gaussian-jumper`, the horizon `T`. Probabilities are `"p/q"` or
//! decimal strings (plain JSON numbers are accepted on input).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::kernels::{BuiltinFamily, DiscreteModel, GridKernel};
use crate::model::Model;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::wordspace::{Alphabet, Letter, SpaceKind, WordError};
use crate::ExactModel;

pub const FORMAT_VERSION: u64 = 1;
pub const FILE_EXTENSION: &str = ".pts.json";

/// Machine-readable diagnostic class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Code {
    Syntax,
    UnsupportedVersion,
    UnknownField,
    MissingField,
    WrongType,
    BadKind,
    EmptyAlphabet,
    BadSymbol,
    DuplicateSymbol,
    BadRational,
    OutOfRange,
    UnknownLabel,
    UnknownState,
    DuplicateState,
    TerminationNotAllowed,
    Body,
    UnknownBuiltin,
    BadParameter,
    BadGrid,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "syntax",
            Code::UnsupportedVersion => "unsupported-version",
            Code::UnknownField => "unknown-field",
            Code::MissingField => "missing-field",
            Code::WrongType => "wrong-type",
            Code::BadKind => "bad-kind",
            Code::EmptyAlphabet => "empty-alphabet",
            Code::BadSymbol => "bad-symbol",
            Code::DuplicateSymbol => "duplicate-symbol",
            Code::BadRational => "bad-rational",
            Code::OutOfRange => "out-of-range",
            Code::UnknownLabel => "unknown-label",
            Code::UnknownState => "unknown-state",
            Code::DuplicateState => "duplicate-state",
            Code::TerminationNotAllowed => "termination-not-allowed",
            Code::Body => "body",
            Code::UnknownBuiltin => "unknown-builtin",
            Code::BadParameter => "bad-parameter",
            Code::BadGrid => "bad-grid",
        }
    }
}

/// Problem in a model document, located by line and column (1-based) and
/// by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{line}:{column}: [{}] {message}", code.as_str())]
pub struct Diagnostic {
    pub code: Code,
    pub line: usize,
    pub column: usize,
    pub pointer: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSpec {
    pub from: String,
    pub label: String,
    pub to: String,
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBody {
    pub states: Vec<String>,
    pub termination: BTreeMap<String, Rational>,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBody {
    pub interval: (f64, f64),
    pub cells: usize,
    pub densities: BTreeMap<String, Vec<Vec<f64>>>,
    pub termination: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Discrete(DiscreteBody),
    Grid(GridBody),
    Builtin(BuiltinFamily),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub format_version: u64,
    pub kind: SpaceKind,
    pub alphabet: Vec<String>,
    pub body: Body,
}

impl ModelDocument {
    pub fn builtin(family: BuiltinFamily) -> Self {
        let model = family.instantiate();
        ModelDocument {
            format_version: FORMAT_VERSION,
            kind: model.kind(),
            alphabet: model.alphabet().symbols().to_vec(),
            body: Body::Builtin(family),
        }
    }

    pub fn from_discrete(m: &ExactModel) -> Self {
        let names = m.state_names();
        let termination = (0..m.len())
            .filter(|&x| m.kind().has_termination() && !num_traits::Zero::is_zero(m.termination(x)))
            .map(|x| (names[x].clone(), m.termination(x).clone()))
            .collect();
        let transitions = (0..m.len())
            .flat_map(|x| {
                m.transitions(x).iter().map(move |t| TransitionSpec {
                    from: names[x].clone(),
                    label: m.alphabet().symbol(t.label).to_string(),
                    to: names[t.target].clone(),
                    prob: t.weight.clone(),
                })
            })
            .collect();
        ModelDocument {
            format_version: FORMAT_VERSION,
            kind: m.kind(),
            alphabet: m.alphabet().symbols().to_vec(),
            body: Body::Discrete(DiscreteBody {
                states: names.to_vec(),
                termination,
                transitions,
            }),
        }
    }

    /// Builds the model. Documents produced by [`parse`] always build.
    pub fn to_model(&self) -> Result<Model, Diagnostic> {
        let nowhere = |code, pointer: &str, message: String| Diagnostic {
            code,
            line: 0,
            column: 0,
            pointer: pointer.to_string(),
            message,
        };
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())
            .map_err(|e| nowhere(word_code(&e), "/alphabet", e.to_string()))?;
        match &self.body {
            Body::Discrete(d) => {
                let mut m = DiscreteModel::new(alphabet.clone(), self.kind, d.states.clone())
                    .map_err(|e| nowhere(Code::DuplicateState, "/discrete/states", e.to_string()))?;
                let state = |name: &str, p: &str| {
                    m.state_index(name)
                        .ok_or_else(|| nowhere(Code::UnknownState, p, format!("unknown state `{name}`")))
                };
                let mut edges = Vec::new();
                for (i, t) in d.transitions.iter().enumerate() {
                    let p = format!("/discrete/transitions/{i}");
                    let from = state(&t.from, &p)?;
                    let to = state(&t.to, &p)?;
                    let label = alphabet
                        .letter(&t.label)
                        .ok_or_else(|| nowhere(Code::UnknownLabel, &p, format!("unknown label `{}`", t.label)))?;
                    edges.push((from, label, to, t.prob.clone(), p));
                }
                let mut terms = Vec::new();
                for (name, w) in &d.termination {
                    let p = format!("/discrete/termination/{}", escape(name));
                    terms.push((state(name, &p)?, w.clone(), p));
                }
                for (from, label, to, w, p) in edges {
                    m.add_transition(from, label, to, w)
                        .map_err(|e| nowhere(Code::OutOfRange, &p, e.to_string()))?;
                }
                for (x, w, p) in terms {
                    m.set_termination(x, w).map_err(|e| {
                        let code = match e {
                            crate::kernels::ModelError::TerminationNotAllowed(_) => Code::TerminationNotAllowed,
                            _ => Code::OutOfRange,
                        };
                        nowhere(code, &p, e.to_string())
                    })?;
                }
                Ok(Model::Discrete(m))
            }
            Body::Grid(g) => {
                let mut densities = Vec::with_capacity(alphabet.len());
                for a in alphabet.letters() {
                    let sym = alphabet.symbol(a);
                    let m = g.densities.get(sym).ok_or_else(|| {
                        nowhere(Code::BadGrid, "/grid/densities", format!("no density matrix for label `{sym}`"))
                    })?;
                    densities.push(m.clone());
                }
                if let Some(extra) = g.densities.keys().find(|k| alphabet.letter(k).is_none()) {
                    return Err(nowhere(
                        Code::UnknownLabel,
                        &format!("/grid/densities/{}", escape(extra)),
                        format!("unknown label `{extra}`"),
                    ));
                }
                if densities.iter().any(|m| m.len() != g.cells) {
                    return Err(nowhere(
                        Code::BadGrid,
                        "/grid/densities",
                        format!("density matrices must be {0}x{0}", g.cells),
                    ));
                }
                let k = GridKernel::new(alphabet, self.kind, g.interval, densities, g.termination.clone())
                    .map_err(|e| {
                        let code = match e {
                            crate::kernels::GridError::TerminationNotAllowed(_) => Code::TerminationNotAllowed,
                            _ => Code::BadGrid,
                        };
                        nowhere(code, "/grid", e.to_string())
                    })?;
                Ok(Model::Continuous(Arc::new(k)))
            }
            Body::Builtin(f) => {
                let m = f.instantiate();
                if m.kind() != self.kind {
                    return Err(nowhere(
                        Code::BadKind,
                        "/type",
                        format!("{} has type {}, not {}", f.name(), m.kind(), self.kind),
                    ));
                }
                if m.alphabet() != &alphabet {
                    return Err(nowhere(
                        Code::BadSymbol,
                        "/alphabet",
                        format!("{} uses the alphabet {:?}", f.name(), m.alphabet().symbols()),
                    ));
                }
                Ok(Model::Continuous(Arc::from(m)))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match &self.body {
            Body::Discrete(d) => {
                let termination: Map<String, Value> = d
                    .termination
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(format_rational(v))))
                    .collect();
                let transitions: Vec<Value> = d
                    .transitions
                    .iter()
                    .map(|t| json!({"from": t.from, "label": t.label, "prob": format_rational(&t.prob), "to": t.to}))
                    .collect();
                ("discrete", json!({"states": d.states, "termination": termination, "transitions": transitions}))
            }
            Body::Grid(g) => {
                let mut o = json!({
                    "cells": g.cells,
                    "densities": g.densities,
                    "interval": [g.interval.0, g.interval.1],
                });
                if let Some(t) = &g.termination {
                    o["termination"] = json!(t);
                }
                ("grid", o)
            }
            Body::Builtin(BuiltinFamily::JumpGame) => ("builtin", json!({"name": "jump-game"})),
            Body::Builtin(BuiltinFamily::GaussianJumper { horizon }) => {
                ("builtin", json!({"T": horizon, "name": "gaussian-jumper"}))
            }
        };
        let mut root = Map::new();
        root.insert("alphabet".into(), json!(self.alphabet));
        root.insert(body.0.into(), body.1);
        root.insert("formatVersion".into(), json!(self.format_version));
        root.insert("type".into(), json!(self.kind.name()));
        Value::Object(root)
    }
}

/// Canonical text: keys sorted, rationals in lowest terms, two-space
/// indentation, trailing newline.
pub fn serialize(doc: &ModelDocument) -> String {
    let mut s = serde_json::to_string_pretty(&doc.to_json()).expect("json values serialize");
    s.push('\n');
    s
}

/// Parses a document. In `lax` mode unknown top-level keys are ignored.
pub fn parse(text: &str, lax: bool) -> Result<ModelDocument, Diagnostic> {
    let root: Value = serde_json::from_str(text).map_err(|e| Diagnostic {
        code: Code::Syntax,
        line: e.line(),
        column: e.column(),
        pointer: String::new(),
        message: e.to_string(),
    })?;
    let locator = Locator::new(text);
    let cx = Cx { locator: &locator };
    let doc = cx.document(&root, lax)?;
    doc.to_model().map_err(|d| cx.at(d.code, &d.pointer, d.message))?;
    Ok(doc)
}

/// Parses and builds in one go.
pub fn load(text: &str, lax: bool) -> Result<(ModelDocument, Model), Diagnostic> {
    let doc = parse(text, lax)?;
    let model = doc.to_model()?;
    Ok((doc, model))
}

/// `builtin:jump-game` or `builtin:gaussian-jumper?T=3`.
pub fn parse_builtin_ref(source: &str) -> Option<Result<BuiltinFamily, Diagnostic>> {
    let rest = source.strip_prefix("builtin:")?;
    let (name, query) = rest.split_once('?').unwrap_or((rest, ""));
    let mut params = BTreeMap::new();
    for kv in query.split('&').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
        params.insert(k.to_string(), Value::String(v.to_string()));
    }
    let fail = |code, message: String| Diagnostic {
        code,
        line: 0,
        column: 0,
        pointer: String::new(),
        message,
    };
    let horizon = match params.remove("T") {
        Some(Value::String(v)) => match v.parse::<u64>() {
            Ok(t) => Some(Value::from(t)),
            Err(_) => return Some(Err(fail(Code::BadParameter, format!("T must be an integer, got `{v}`")))),
        },
        _ => None,
    };
    if let Some(k) = params.keys().next() {
        return Some(Err(fail(Code::UnknownField, format!("unknown builtin parameter `{k}`"))));
    }
    Some(builtin_family(name, horizon.as_ref()).map_err(|(code, message)| fail(code, message)))
}

fn builtin_family(name: &str, horizon: Option<&Value>) -> Result<BuiltinFamily, (Code, String)> {
    match name {
        "jump-game" => match horizon {
            None => Ok(BuiltinFamily::JumpGame),
            Some(_) => Err((Code::BadParameter, "jump-game takes no parameters".into())),
        },
        "gaussian-jumper" => {
            let t = horizon.ok_or((Code::MissingField, "gaussian-jumper needs the horizon T".to_string()))?;
            match t.as_u64() {
                Some(t) if (2..=u32::MAX as u64).contains(&t) => Ok(BuiltinFamily::GaussianJumper { horizon: t as u32 }),
                _ => Err((Code::BadParameter, format!("T must be an integer ≥ 2, got {t}"))),
            }
        }
        other => Err((Code::UnknownBuiltin, format!("unknown builtin model `{other}`"))),
    }
}

fn word_code(e: &WordError) -> Code {
    match e {
        WordError::EmptyAlphabet => Code::EmptyAlphabet,
        WordError::DuplicateSymbol(_) => Code::DuplicateSymbol,
        _ => Code::BadSymbol,
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

struct Cx<'a> {
    locator: &'a Locator,
}

type Res<T> = Result<T, Diagnostic>;

impl Cx<'_> {
    fn at(&self, code: Code, pointer: &str, message: impl Into<String>) -> Diagnostic {
        let (line, column) = self.locator.find(pointer);
        Diagnostic {
            code,
            line,
            column,
            pointer: pointer.to_string(),
            message: message.into(),
        }
    }

    fn object<'v>(&self, v: &'v Value, p: &str) -> Res<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.at(Code::WrongType, p, "expected an object"))
    }

    fn array<'v>(&self, v: &'v Value, p: &str) -> Res<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.at(Code::WrongType, p, "expected an array"))
    }

    fn string<'v>(&self, v: &'v Value, p: &str) -> Res<&'v str> {
        v.as_str().ok_or_else(|| self.at(Code::WrongType, p, "expected a string"))
    }

    fn number(&self, v: &Value, p: &str) -> Res<f64> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| self.at(Code::WrongType, p, "expected a number")),
            Value::String(s) => parse_rational(s)
                .map(|r| crate::scalar::Scalar::to_f64(&r))
                .map_err(|e| self.at(Code::BadRational, p, e.to_string())),
            _ => Err(self.at(Code::WrongType, p, "expected a number")),
        }
    }

    fn probability(&self, v: &Value, p: &str) -> Res<Rational> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(self.at(Code::WrongType, p, "expected a probability string")),
        };
        let r = parse_rational(&text).map_err(|e| self.at(Code::BadRational, p, e.to_string()))?;
        if r < Rational::from_integer(0.into()) || r > Rational::from_integer(1.into()) {
            return Err(self.at(
                Code::OutOfRange,
                p,
                format!("probability {} is outside [0, 1]", format_rational(&r)),
            ));
        }
        Ok(r)
    }

    fn fields<'v>(
        &self,
        obj: &'v Map<String, Value>,
        p: &str,
        required: &[&str],
        optional: &[&str],
        lax: bool,
    ) -> Res<Vec<Option<&'v Value>>> {
        if !lax {
            if let Some(k) = obj.keys().find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str())) {
                return Err(self.at(
                    Code::UnknownField,
                    &format!("{p}/{}", escape(k)),
                    format!("unknown field `{k}`"),
                ));
            }
        }
        let mut out = Vec::new();
        for k in required {
            match obj.get(*k) {
                Some(v) => out.push(Some(v)),
                None => return Err(self.at(Code::MissingField, p, format!("missing field `{k}`"))),
            }
        }
        out.extend(optional.iter().map(|k| obj.get(*k)));
        Ok(out)
    }

    fn document(&self, root: &Value, lax: bool) -> Res<ModelDocument> {
        let obj = self.object(root, "")?;
        let bodies = ["discrete", "grid", "builtin"];
        let f = self.fields(obj, "", &["formatVersion", "type", "alphabet"], &bodies, lax)?;
        let version = f[0]
            .and_then(Value::as_u64)
            .ok_or_else(|| self.at(Code::WrongType, "/formatVersion", "expected an integer"))?;
        if version != FORMAT_VERSION {
            return Err(self.at(
                Code::UnsupportedVersion,
                "/formatVersion",
                format!("format version {version} is not supported (expected {FORMAT_VERSION})"),
            ));
        }
        let kind_text = self.string(f[1].expect("required"), "/type")?;
        let kind = SpaceKind::parse(kind_text).ok_or_else(|| {
            self.at(
                Code::BadKind,
                "/type",
                format!("type must be one of zero, star, omega, infty; got `{kind_text}`"),
            )
        })?;
        let symbols = self
            .array(f[2].expect("required"), "/alphabet")?
            .iter()
            .enumerate()
            .map(|(i, v)| self.string(v, &format!("/alphabet/{i}")).map(str::to_string))
            .collect::<Res<Vec<_>>>()?;
        let alphabet = Alphabet::new(symbols.iter().cloned()).map_err(|e| {
            let p = match &e {
                WordError::DuplicateSymbol(s) | WordError::BadSymbol(s) => {
                    let i = symbols.iter().rposition(|x| x == s).unwrap_or(0);
                    format!("/alphabet/{i}")
                }
                _ => "/alphabet".to_string(),
            };
            self.at(word_code(&e), &p, e.to_string())
        })?;
        let present: Vec<(usize, &Value)> = f[3..].iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        let (which, payload) = match present.as_slice() {
            [one] => *one,
            [] => return Err(self.at(Code::Body, "", "expected one of `discrete`, `grid`, `builtin`")),
            _ => return Err(self.at(Code::Body, "", "only one of `discrete`, `grid`, `builtin` may be given")),
        };
        let body = match bodies[which] {
            "discrete" => Body::Discrete(self.discrete(payload, &alphabet, kind)?),
            "grid" => Body::Grid(self.grid(payload, &alphabet)?),
            _ => Body::Builtin(self.builtin(payload)?),
        };
        Ok(ModelDocument {
            format_version: version,
            kind,
            alphabet: symbols,
            body,
        })
    }

    fn discrete(&self, v: &Value, alphabet: &Alphabet, kind: SpaceKind) -> Res<DiscreteBody> {
        let p = "/discrete";
        let obj = self.object(v, p)?;
        let f = self.fields(obj, p, &["states", "transitions"], &["termination"], false)?;
        let mut states: Vec<String> = Vec::new();
        for (i, s) in self.array(f[0].expect("required"), "/discrete/states")?.iter().enumerate() {
            let sp = format!("/discrete/states/{i}");
            let name = self.string(s, &sp)?;
            if states.iter().any(|x| x == name) {
                return Err(self.at(Code::DuplicateState, &sp, format!("duplicate state `{name}`")));
            }
            states.push(name.to_string());
        }
        if states.is_empty() {
            return Err(self.at(Code::UnknownState, "/discrete/states", "model needs at least one state"));
        }
        let known = |name: &str, at: &str| -> Res<()> {
            if states.iter().any(|s| s == name) {
                Ok(())
            } else {
                Err(self.at(Code::UnknownState, at, format!("unknown state `{name}`")))
            }
        };
        let mut transitions = Vec::new();
        for (i, t) in self.array(f[1].expect("required"), "/discrete/transitions")?.iter().enumerate() {
            let tp = format!("/discrete/transitions/{i}");
            let o = self.object(t, &tp)?;
            let g = self.fields(o, &tp, &["from", "label", "to", "prob"], &[], false)?;
            let from = self.string(g[0].expect("required"), &format!("{tp}/from"))?;
            known(from, &format!("{tp}/from"))?;
            let label = self.string(g[1].expect("required"), &format!("{tp}/label"))?;
            if alphabet.letter(label).is_none() {
                return Err(self.at(Code::UnknownLabel, &format!("{tp}/label"), format!("unknown label `{label}`")));
            }
            let to = self.string(g[2].expect("required"), &format!("{tp}/to"))?;
            known(to, &format!("{tp}/to"))?;
            let prob = self.probability(g[3].expect("required"), &format!("{tp}/prob"))?;
            transitions.push(TransitionSpec {
                from: from.into(),
                label: label.into(),
                to: to.into(),
                prob,
            });
        }
        let mut termination = BTreeMap::new();
        if let Some(t) = f[2] {
            for (name, w) in self.object(t, "/discrete/termination")? {
                let wp = format!("/discrete/termination/{}", escape(name));
                known(name, &wp)?;
                let w = self.probability(w, &wp)?;
                if !kind.has_termination() && !num_traits::Zero::is_zero(&w) {
                    return Err(self.at(
                        Code::TerminationNotAllowed,
                        &wp,
                        format!("type {kind} has no termination"),
                    ));
                }
                termination.insert(name.clone(), w);
            }
        }
        Ok(DiscreteBody {
            states,
            termination,
            transitions,
        })
    }

    fn grid(&self, v: &Value, alphabet: &Alphabet) -> Res<GridBody> {
        let p = "/grid";
        let obj = self.object(v, p)?;
        let f = self.fields(obj, p, &["interval", "cells", "densities"], &["termination"], false)?;
        let iv = self.array(f[0].expect("required"), "/grid/interval")?;
        if iv.len() != 2 {
            return Err(self.at(Code::BadGrid, "/grid/interval", "interval must be [lo, hi]"));
        }
        let lo = self.number(&iv[0], "/grid/interval/0")?;
        let hi = self.number(&iv[1], "/grid/interval/1")?;
        let cells = f[1]
            .expect("required")
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| self.at(Code::BadGrid, "/grid/cells", "cells must be a positive integer"))? as usize;
        let mut densities = BTreeMap::new();
        for (label, m) in self.object(f[2].expect("required"), "/grid/densities")? {
            let lp = format!("/grid/densities/{}", escape(label));
            if alphabet.letter(label).is_none() {
                return Err(self.at(Code::UnknownLabel, &lp, format!("unknown label `{label}`")));
            }
            let rows = self.array(m, &lp)?;
            if rows.len() != cells {
                return Err(self.at(Code::BadGrid, &lp, format!("expected {cells} rows, found {}", rows.len())));
            }
            let mut matrix = Vec::with_capacity(cells);
            for (i, r) in rows.iter().enumerate() {
                let rp = format!("{lp}/{i}");
                let row = self.array(r, &rp)?;
                if row.len() != cells {
                    return Err(self.at(Code::BadGrid, &rp, format!("expected {cells} entries, found {}", row.len())));
                }
                let mut out = Vec::with_capacity(cells);
                for (j, d) in row.iter().enumerate() {
                    let dp = format!("{rp}/{j}");
                    let d = self.number(d, &dp)?;
                    if !(d.is_finite() && d >= 0.0) {
                        return Err(self.at(Code::OutOfRange, &dp, format!("density {d} must be nonnegative")));
                    }
                    out.push(d);
                }
                matrix.push(out);
            }
            densities.insert(label.clone(), matrix);
        }
        if let Some(a) = alphabet.letters().map(|a: Letter| alphabet.symbol(a)).find(|s| !densities.contains_key(*s)) {
            return Err(self.at(Code::BadGrid, "/grid/densities", format!("no density matrix for label `{a}`")));
        }
        let termination = match f[3] {
            None => None,
            Some(t) => {
                let ts = self.array(t, "/grid/termination")?;
                if ts.len() != cells {
                    return Err(self.at(Code::BadGrid, "/grid/termination", format!("expected {cells} weights")));
                }
                let mut out = Vec::with_capacity(cells);
                for (i, w) in ts.iter().enumerate() {
                    let wp = format!("/grid/termination/{i}");
                    let w = self.number(w, &wp)?;
                    if !(0.0..=1.0).contains(&w) {
                        return Err(self.at(Code::OutOfRange, &wp, format!("termination weight {w} is outside [0, 1]")));
                    }
                    out.push(w);
                }
                Some(out)
            }
        };
        Ok(GridBody {
            interval: (lo, hi),
            cells,
            densities,
            termination,
        })
    }

    fn builtin(&self, v: &Value) -> Res<BuiltinFamily> {
        let p = "/builtin";
        let obj = self.object(v, p)?;
        let f = self.fields(obj, p, &["name"], &["T"], false)?;
        let name = self.string(f[0].expect("required"), "/builtin/name")?;
        builtin_family(name, f[1]).map_err(|(code, message)| {
            let at = match code {
                Code::UnknownBuiltin => "/builtin/name",
                Code::BadParameter if f[1].is_some() => "/builtin/T",
                _ => p,
            };
            self.at(code, at, message)
        })
    }
}

/// Source positions of JSON values by pointer, for text already accepted
/// by `serde_json`.
struct Locator {
    positions: BTreeMap<String, (usize, usize)>,
}

impl Locator {
    fn new(text: &str) -> Self {
        let mut s = Scan {
            chars: text.chars().collect(),
            i: 0,
            line: 1,
            col: 1,
            positions: BTreeMap::new(),
        };
        s.value(String::new());
        Locator { positions: s.positions }
    }

    /// Position of the value at `pointer`, or of its nearest located
    /// ancestor.
    fn find(&self, pointer: &str) -> (usize, usize) {
        let mut p = pointer.to_string();
        loop {
            if let Some(&pos) = self.positions.get(&p) {
                return pos;
            }
            match p.rfind('/') {
                Some(i) => p.truncate(i),
                None => return (1, 1),
            }
        }
    }
}

struct Scan {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
    positions: BTreeMap<String, (usize, usize)>,
}

impl Scan {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\n' | '\r')) {
            self.bump();
        }
    }

    fn string(&mut self) -> String {
        let mut raw = String::from("\"");
        self.bump();
        while let Some(c) = self.bump() {
            raw.push(c);
            match c {
                '\\' => {
                    if let Some(e) = self.bump() {
                        raw.push(e);
                    }
                }
                '"' => break,
                _ => {}
            }
        }
        serde_json::from_str(&raw).unwrap_or_default()
    }

    fn value(&mut self, pointer: String) {
        self.ws();
        self.positions.insert(pointer.clone(), (self.line, self.col));
        match self.peek() {
            Some('{') => {
                self.bump();
                loop {
                    self.ws();
                    match self.peek() {
                        Some('}') => {
                            self.bump();
                            break;
                        }
                        Some(',') => {
                            self.bump();
                        }
                        Some('"') => {
                            let key = self.string();
                            self.ws();
                            self.bump();
                            self.value(format!("{pointer}/{}", escape(&key)));
                        }
                        _ => break,
                    }
                }
            }
            Some('[') => {
                self.bump();
                let mut k = 0;
                loop {
                    self.ws();
                    match self.peek() {
                        Some(']') => {
                            self.bump();
                            break;
                        }
                        Some(',') => {
                            self.bump();
                        }
                        Some(_) => {
                            self.value(format!("{pointer}/{k}"));
                            k += 1;
                        }
                        None => break,
                    }
                }
            }
            Some('"') => {
                self.string();
            }
            _ => {
                while matches!(self.peek(), Some(c) if !matches!(c, ',' | '}' | ']' | ' ' | '\t' | '\n' | '\r')) {
                    self.bump();
                }
            }
        }
    }
}

impl fmt::Display for ModelDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}
