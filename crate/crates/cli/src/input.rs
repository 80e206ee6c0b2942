//! Input documents: polyhedral divisors and log pairs in TOML, presentations
//! in the `gens:` text format.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use tsing_core::exactalg::{Int, Rational};
use tsing_core::grouppres::FinitePresentation;
use tsing_core::coxalg::P1LogPair;
use tsing_core::pdiv::{Mark, P1Point, PointCoord, PolyhedralDivisor};
use tsing_core::polyhedra::{Cone, SigmaPolyhedron};
use tsing_core::Error as CoreError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("{0}: recession cone differs from the tail cone")]
    RecessionMismatch(String),
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("tail cone is not full-dimensional")]
    NonFullDimensionalCone,
    /// A resource limit of the core library hit while validating.
    #[error(transparent)]
    Guard(CoreError),
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Divisor,
    P1Pair,
    Presentation,
}

impl InputKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputKind::Divisor => "divisor",
            InputKind::P1Pair => "p1pair",
            InputKind::Presentation => "presentation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputDocument {
    Divisor(PolyhedralDivisor),
    P1Pair(P1LogPair),
    Presentation(FinitePresentation),
}

impl InputDocument {
    pub fn kind(&self) -> InputKind {
        match self {
            InputDocument::Divisor(_) => InputKind::Divisor,
            InputDocument::P1Pair(_) => InputKind::P1Pair,
            InputDocument::Presentation(_) => InputKind::Presentation,
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            InputDocument::Divisor(d) => serialize_divisor(d),
            InputDocument::P1Pair(p) => serialize_p1pair(p),
            InputDocument::Presentation(p) => p.to_string(),
        }
    }
}

/// Presentations start with `gens:`; TOML documents are told apart by an
/// explicit `kind` key or by `[[point]]` tables (log pairs).
pub fn detect_kind(text: &str) -> Result<InputKind, InputError> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty());
    if first.is_some_and(|l| l.starts_with("gens:")) {
        return Ok(InputKind::Presentation);
    }
    let value: toml::Table = toml::from_str(text).map_err(|e| toml_error_in(text, e))?;
    match value.get("kind") {
        Some(toml::Value::String(k)) => match k.as_str() {
            "divisor" => Ok(InputKind::Divisor),
            "p1pair" => Ok(InputKind::P1Pair),
            other => Err(schema("kind", format!("unknown document kind {other:?}"))),
        },
        Some(_) => Err(schema("kind", "expected a string")),
        None if value.contains_key("point") => Ok(InputKind::P1Pair),
        None => Ok(InputKind::Divisor),
    }
}

pub fn parse_document(text: &str) -> Result<InputDocument, InputError> {
    Ok(match detect_kind(text)? {
        InputKind::Divisor => InputDocument::Divisor(parse_divisor(text)?),
        InputKind::P1Pair => InputDocument::P1Pair(parse_p1pair(text)?),
        InputKind::Presentation => InputDocument::Presentation(parse_presentation(text)?),
    })
}

fn toml_error_in(text: &str, e: toml::de::Error) -> InputError {
    let message = e.message().to_string();
    let location = match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}")
        }
        None => "document".into(),
    };
    InputError::Schema { location, message }
}

/// Integer or `"a/b"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumLit {
    Int(i64),
    Str(String),
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

impl NumLit {
    fn rational(&self, at: &str) -> Result<Rational, InputError> {
        match self {
            NumLit::Int(v) => Ok(Rational::from_integer(Int::from(*v))),
            NumLit::Str(s) => {
                parse_rational(s).ok_or_else(|| schema(at, format!("not a rational number: {s:?}")))
            }
        }
    }

    fn integer(&self, at: &str) -> Result<Int, InputError> {
        let q = self.rational(at)?;
        if !q.is_integer() {
            return Err(schema(at, format!("expected an integer, found {q}")));
        }
        Ok(q.to_integer())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorDoc {
    #[serde(default)]
    kind: Option<String>,
    lattice: LatticeDoc,
    tail_cone: TailConeDoc,
    #[serde(default)]
    mark: Vec<MarkDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    rank: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailConeDoc {
    rays: Vec<Vec<NumLit>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkDoc {
    point: String,
    #[serde(default)]
    label: Option<String>,
    vertices: Vec<Vec<NumLit>>,
    #[serde(default)]
    rays: Option<Vec<Vec<NumLit>>>,
}

/// `"0"`, `"inf"`, `"a/b"`.
pub fn parse_point(s: &str) -> Option<P1Point> {
    match s.trim() {
        "inf" | "infinity" => Some(P1Point::infinity()),
        other => parse_rational(other).map(P1Point::finite),
    }
}

fn integer_rows(rows: &[Vec<NumLit>], rank: usize, at: &str) -> Result<Vec<Vec<Int>>, InputError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let at = format!("{at}[{i}]");
            if row.len() != rank {
                return Err(schema(&at, format!("expected {rank} entries, found {}", row.len())));
            }
            row.iter().map(|x| x.integer(&at)).collect()
        })
        .collect()
}

fn cone_from(rank: usize, rays: Vec<Vec<Int>>, at: &str) -> Result<Cone, InputError> {
    Cone::new(rank, rays).map_err(|e| match e {
        e @ CoreError::DimensionGuard { .. } => InputError::Guard(e),
        other => schema(at, other.to_string()),
    })
}

pub fn parse_divisor(text: &str) -> Result<PolyhedralDivisor, InputError> {
    let doc: DivisorDoc = toml::from_str(text).map_err(|e| toml_error_in(text, e))?;
    if let Some(k) = &doc.kind {
        if k != "divisor" {
            return Err(schema("kind", format!("expected \"divisor\", found {k:?}")));
        }
    }
    let rank = doc.lattice.rank;
    if rank == 0 {
        return Err(schema("lattice.rank", "rank must be positive"));
    }
    let tail_rays = integer_rows(&doc.tail_cone.rays, rank, "tail_cone.rays")?;
    let sigma = cone_from(rank, tail_rays, "tail_cone.rays")?;
    if !sigma.is_full_dimensional() {
        return Err(InputError::NonFullDimensionalCone);
    }
    if doc.mark.is_empty() {
        return Err(schema("mark", "at least one [[mark]] is required"));
    }
    let mut marks = Vec::with_capacity(doc.mark.len());
    for (i, m) in doc.mark.iter().enumerate() {
        let at = format!("mark[{i}]");
        let mut point = parse_point(&m.point)
            .ok_or_else(|| schema(format!("{at}.point"), format!("bad point {:?}", m.point)))?;
        if let Some(label) = &m.label {
            if label.trim().is_empty() {
                return Err(schema(format!("{at}.label"), "empty label"));
            }
            point = point.with_label(label.clone());
        }
        if let Some(rays) = &m.rays {
            let rays = integer_rows(rays, rank, &format!("{at}.rays"))?;
            let rec = cone_from(rank, rays, &format!("{at}.rays"))?;
            if rec != sigma {
                return Err(InputError::RecessionMismatch(at));
            }
        }
        if m.vertices.is_empty() {
            return Err(schema(format!("{at}.vertices"), "at least one vertex is required"));
        }
        let mut vertices = Vec::with_capacity(m.vertices.len());
        for (k, row) in m.vertices.iter().enumerate() {
            let vat = format!("{at}.vertices[{k}]");
            if row.len() != rank {
                return Err(schema(&vat, format!("expected {rank} entries, found {}", row.len())));
            }
            vertices.push(row.iter().map(|x| x.rational(&vat)).collect::<Result<Vec<_>, _>>()?);
        }
        let polyhedron = SigmaPolyhedron::new(vertices, sigma.clone())
            .map_err(|e| match e {
                CoreError::DimensionGuard { .. } => InputError::Guard(e),
                other => schema(format!("{at}.vertices"), other.to_string()),
            })?;
        marks.push(Mark { point, polyhedron });
    }
    PolyhedralDivisor::new(sigma, marks).map_err(|e| match e {
        CoreError::DuplicatePoint(p) => InputError::DuplicatePoint(p),
        CoreError::MismatchedRecessionCone => InputError::RecessionMismatch("mark".into()),
        CoreError::NonFullDimensionalCone => InputError::NonFullDimensionalCone,
        other => schema("mark", other.to_string()),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    point: Vec<PairPointDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairPointDoc {
    at: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    coefficient: Option<NumLit>,
    /// Shorthand for the coefficient `1 - 1/n`.
    #[serde(default)]
    multiplicity: Option<u64>,
}

pub fn parse_p1pair(text: &str) -> Result<P1LogPair, InputError> {
    let doc: PairDoc = toml::from_str(text).map_err(|e| toml_error_in(text, e))?;
    if let Some(k) = &doc.kind {
        if k != "p1pair" {
            return Err(schema("kind", format!("expected \"p1pair\", found {k:?}")));
        }
    }
    let mut points = Vec::with_capacity(doc.point.len());
    for (i, p) in doc.point.iter().enumerate() {
        let at = format!("point[{i}]");
        let mut pt = parse_point(&p.at)
            .ok_or_else(|| schema(format!("{at}.at"), format!("bad point {:?}", p.at)))?;
        if let Some(label) = &p.label {
            pt = pt.with_label(label.clone());
        }
        let c = match (&p.coefficient, p.multiplicity) {
            (Some(c), None) => c.rational(&format!("{at}.coefficient"))?,
            (None, Some(0)) => return Err(schema(format!("{at}.multiplicity"), "must be positive")),
            (None, Some(n)) => Rational::one() - Rational::new(Int::one(), Int::from(n)),
            _ => {
                return Err(schema(
                    &at,
                    "exactly one of `coefficient` and `multiplicity` is required",
                ))
            }
        };
        points.push((pt, c));
    }
    P1LogPair::new(points).map_err(|e| match e {
        CoreError::DuplicatePoint(p) => InputError::DuplicatePoint(p),
        other => schema("point", other.to_string()),
    })
}

pub fn parse_presentation(text: &str) -> Result<FinitePresentation, InputError> {
    FinitePresentation::parse(text).map_err(|e| match e {
        CoreError::Invalid(msg) => match msg.split_once(": ") {
            Some((loc, rest)) if loc.starts_with("line ") => schema(loc, rest),
            _ => schema("presentation", msg),
        },
        other => schema("presentation", other.to_string()),
    })
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn format_point(p: &P1Point) -> String {
    match &p.coord {
        PointCoord::Finite(c) => format_rational(c),
        PointCoord::Infinity => "inf".into(),
        PointCoord::Symbolic => p.label.clone(),
    }
}

fn default_label(p: &P1Point) -> Option<String> {
    match &p.coord {
        PointCoord::Finite(c) => Some(P1Point::finite(c.clone()).label),
        PointCoord::Infinity => Some(P1Point::infinity().label),
        PointCoord::Symbolic => None,
    }
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn int_literal(x: &Int) -> String {
    match x.to_i64() {
        Some(v) => v.to_string(),
        None => toml_str(&x.to_string()),
    }
}

fn int_rows(rows: &[Vec<Int>]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(int_literal).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Canonical TOML form; `parse_divisor` inverts it.
///
/// Symbolic points (preimages under covers) have no textual position and
/// are written by label; such documents do not parse back.
pub fn serialize_divisor(d: &PolyhedralDivisor) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[lattice]\nrank = {}\n", d.lattice_rank());
    let _ = writeln!(out, "[tail_cone]\nrays = {}", int_rows(d.tail_cone().rays()));
    for m in d.marks() {
        let _ = writeln!(out, "\n[[mark]]\npoint = {}", toml_str(&format_point(&m.point)));
        if default_label(&m.point).as_deref() != Some(m.point.label.as_str()) {
            let _ = writeln!(out, "label = {}", toml_str(&m.point.label));
        }
        let vs: Vec<String> = m
            .polyhedron
            .vertices()
            .iter()
            .map(|v| {
                let xs: Vec<String> = v.iter().map(|x| toml_str(&format_rational(x))).collect();
                format!("[{}]", xs.join(", "))
            })
            .collect();
        let _ = writeln!(out, "vertices = [{}]", vs.join(", "));
    }
    out
}

pub fn serialize_p1pair(p: &P1LogPair) -> String {
    let mut out = String::from("kind = \"p1pair\"\n");
    for (pt, c) in p.points() {
        let _ = writeln!(out, "\n[[point]]\nat = {}", toml_str(&format_point(pt)));
        if default_label(pt).as_deref() != Some(pt.label.as_str()) {
            let _ = writeln!(out, "label = {}", toml_str(&pt.label));
        }
        let _ = writeln!(out, "coefficient = {}", toml_str(&format_rational(c)));
    }
    out
}
