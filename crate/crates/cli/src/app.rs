//! Command dispatch, exit codes and output rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use tsing_core::coxalg::{class_group_of, p1_class_group, p1_cox, platonic_cox, standard_approximation, P1LogPair};
use tsing_core::fundgrp::{pi1_presentation, pi1_report};
use tsing_core::grouppres::{
    abelianization, derived_series, todd_coxeter, FinitePresentation, DEFAULT_MAX_COSETS,
};
use tsing_core::iteration::{
    emit_triple_sequence, full_pipeline, group_iteration, iteration_bound, scfc, triple_sequence_check,
};
use tsing_core::pdiv::{
    boundary_divisor, contracted_rays, degree_polyhedron, is_klt, is_proper, mu_data, KltCertificate,
    PolyhedralDivisor,
};
use tsing_core::Error as CoreError;

use crate::input::{parse_document, InputDocument, InputError, InputKind};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Bound passed to `iteration_bound` in reports.
pub const JORDAN_CONSTANT: u64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupQuery {
    Order,
    Abelianization,
    DerivedSeries,
    Solvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Degree,
    Cox,
    Pi1,
    Iterate,
    Scfc,
    P1,
    Group(GroupQuery),
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub json: bool,
    pub max_cosets: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            json: false,
            max_cosets: DEFAULT_MAX_COSETS,
        }
    }
}

/// Exit code plus a JSON report; the text form is derived from the JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { code: EXIT_OK, report }
    }

    fn failure(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Outcome {
            code,
            report: json!({"error": kind, "message": message.into()}),
        }
    }

    pub fn render(&self, json_output: bool) -> String {
        if json_output {
            let mut s = serde_json::to_string_pretty(&self.report).expect("serializable report");
            s.push('\n');
            s
        } else {
            let mut out = String::new();
            render_text(&self.report, 0, &mut out);
            out
        }
    }
}

fn core_failure(e: CoreError) -> Outcome {
    let (code, kind) = match &e {
        CoreError::NotProper => (EXIT_REJECTED, "NotProper"),
        CoreError::NotKlt => (EXIT_REJECTED, "NotKlt"),
        CoreError::NotLogFano => (EXIT_REJECTED, "NotLogFano"),
        CoreError::CoverPi1NotAbelian => (EXIT_REJECTED, "CoverPi1NotAbelian"),
        CoreError::NotNormal => (EXIT_REJECTED, "NotNormal"),
        CoreError::NotAbelian => (EXIT_REJECTED, "NotAbelian"),
        CoreError::BranchMismatch(_) => (EXIT_REJECTED, "BranchMismatch"),
        CoreError::CosetOverflow { .. } => (EXIT_GUARD, "CosetOverflow"),
        CoreError::SizeGuard(_) => (EXIT_GUARD, "SizeGuard"),
        CoreError::DimensionGuard { .. } => (EXIT_GUARD, "DimensionGuard"),
        CoreError::DuplicatePoint(_) => (EXIT_INPUT, "DuplicatePoint"),
        CoreError::NonFullDimensionalCone => (EXIT_INPUT, "NonFullDimensionalCone"),
        CoreError::MismatchedRecessionCone => (EXIT_INPUT, "RecessionMismatch"),
        CoreError::DimensionMismatch { .. }
        | CoreError::Unbounded
        | CoreError::NotStronglyConvex
        | CoreError::Invalid(_) => (EXIT_INPUT, "InvalidInput"),
    };
    Outcome::failure(code, kind, e.to_string())
}

fn input_failure(e: InputError) -> Outcome {
    match e {
        InputError::Guard(inner) => core_failure(inner),
        InputError::Schema { .. } => Outcome::failure(EXIT_INPUT, "SchemaError", e.to_string()),
        InputError::RecessionMismatch(_) => Outcome::failure(EXIT_INPUT, "RecessionMismatch", e.to_string()),
        InputError::DuplicatePoint(_) => Outcome::failure(EXIT_INPUT, "DuplicatePoint", e.to_string()),
        InputError::NonFullDimensionalCone => {
            Outcome::failure(EXIT_INPUT, "NonFullDimensionalCone", e.to_string())
        }
    }
}

fn wrong_kind(cmd: Command, kind: InputKind) -> Outcome {
    Outcome::failure(
        EXIT_INPUT,
        "WrongInputKind",
        format!("command {cmd:?} does not accept a {} document", kind.as_str()),
    )
}

/// Why `d` is not proper, or `None`.
fn properness_failure(d: &PolyhedralDivisor) -> Result<Option<&'static str>, CoreError> {
    if is_proper(d)? {
        return Ok(None);
    }
    let deg = degree_polyhedron(d)?;
    Ok(Some(if !deg.is_contained_in(d.tail_cone()) {
        "deg(D) is not contained in the tail cone"
    } else {
        "deg(D) contains the origin"
    }))
}

fn require_klt(d: &PolyhedralDivisor) -> Result<KltCertificate, Outcome> {
    if let Some(reason) = properness_failure(d).map_err(core_failure)? {
        return Err(Outcome::failure(EXIT_REJECTED, "NotProper", reason));
    }
    let cert = is_klt(d).map_err(core_failure)?;
    if !cert.is_klt {
        return Err(Outcome {
            code: EXIT_REJECTED,
            report: json!({
                "error": "NotKlt",
                "message": format!("multiplicities fail the klt test: {}", cert.reason.as_str()),
                "klt": report::klt(&cert),
            }),
        });
    }
    Ok(cert)
}

fn check(d: &PolyhedralDivisor) -> Result<Outcome, CoreError> {
    if let Some(reason) = properness_failure(d)? {
        return Ok(Outcome {
            code: EXIT_REJECTED,
            report: json!({"proper": false, "klt": null, "triple": null, "reason": reason}),
        });
    }
    let cert = is_klt(d)?;
    Ok(Outcome {
        code: if cert.is_klt { EXIT_OK } else { EXIT_REJECTED },
        report: json!({
            "proper": true,
            "klt": cert.is_klt,
            "triple": report::triple(&cert.nontrivial_triple),
            "reason": cert.reason.as_str(),
        }),
    })
}

fn degree(d: &PolyhedralDivisor) -> Result<Outcome, CoreError> {
    let deg = degree_polyhedron(d)?;
    let proper = properness_failure(d)?;
    let mut m = Map::new();
    m.insert("lattice_rank".into(), json!(d.lattice_rank()));
    m.insert(
        "tail_cone".into(),
        json!(d.tail_cone().rays().iter().map(|r| report::int_vec(r)).collect::<Vec<_>>()),
    );
    m.insert("degree".into(), report::polyhedron(&deg));
    m.insert("proper".into(), json!(proper.is_none()));
    m.insert(
        "mu".into(),
        json!(mu_data(d)
            .iter()
            .map(|(p, mu)| json!({"point": report::point(p), "mu": report::int(mu)}))
            .collect::<Vec<_>>()),
    );
    m.insert("boundary".into(), report::q_divisor(&boundary_divisor(d)));
    if proper.is_none() {
        m.insert(
            "contracted_rays".into(),
            json!(contracted_rays(d)?.iter().map(|r| report::int_vec(r)).collect::<Vec<_>>()),
        );
    }
    Ok(Outcome::ok(Value::Object(m)))
}

fn divisor_command(cmd: Command, d: &PolyhedralDivisor, flags: Flags) -> Outcome {
    let bound = iteration_bound(JORDAN_CONSTANT);
    let result = match cmd {
        Command::Check => check(d),
        Command::Degree => degree(d),
        _ => {
            let cert = match require_klt(d) {
                Ok(c) => c,
                Err(o) => return o,
            };
            match cmd {
                Command::Cox => (|| {
                    let cox = platonic_cox(d)?;
                    Ok(Outcome::ok(json!({
                        "klt": report::klt(&cert),
                        "triple": report::triple(&cert.nontrivial_triple),
                        "class_group": report::group(&class_group_of(d)?),
                        "cox": report::cox(&cox),
                    })))
                })(),
                Command::Pi1 => pi1_report(d, flags.max_cosets)
                    .map(|r| Outcome::ok(json!({"triple": report::triple(&cert.nontrivial_triple), "pi1": report::pi1(&r)}))),
                Command::Iterate => (|| {
                    let r = pi1_report(d, flags.max_cosets)?;
                    let mut it = group_iteration(&r.group)?;
                    it.triple_sequence = emit_triple_sequence(cert.nontrivial_triple);
                    let verdicts = triple_sequence_check(&it.triple_sequence);
                    it.sequence_valid = verdicts.iter().all(|&v| v);
                    Ok(Outcome::ok(json!({
                        "triple": report::triple(&cert.nontrivial_triple),
                        "iteration": report::iteration(&it, &verdicts, bound),
                    })))
                })(),
                Command::Scfc => scfc(d, flags.max_cosets).map(|r| {
                    Outcome::ok(json!({
                        "triple": report::triple(&cert.nontrivial_triple),
                        "scfc": report::scfc(&r),
                    }))
                }),
                Command::All => full_pipeline(d, flags.max_cosets).map(|r| Outcome::ok(report::pipeline(&r, bound))),
                Command::Group(q) => (|| {
                    let p = pi1_presentation(d)?.presentation;
                    group_query(q, &p, flags)
                })(),
                Command::Check | Command::Degree | Command::P1 => unreachable!("dispatched above"),
            }
        }
    };
    result.unwrap_or_else(core_failure)
}

fn group_query(q: GroupQuery, p: &FinitePresentation, flags: Flags) -> Result<Outcome, CoreError> {
    // abelianization needs no enumeration, so it also works for infinite groups
    if q == GroupQuery::Abelianization {
        return Ok(Outcome::ok(json!({"abelianization": report::group(&abelianization(p))})));
    }
    let g = todd_coxeter(p, flags.max_cosets)?;
    Ok(Outcome::ok(match q {
        GroupQuery::Order => json!({"order": g.order()?.to_string()}),
        GroupQuery::DerivedSeries => {
            let s = derived_series(&g)?;
            json!({
                "derived_series": report::series(&s),
                "terminal_order": s.terminal_order()?.to_string(),
            })
        }
        GroupQuery::Solvable => json!({"solvable": derived_series(&g)?.terminal_order()? == 1}),
        GroupQuery::Abelianization => unreachable!("handled above"),
    }))
}

fn p1_command(pair: &P1LogPair) -> Result<Outcome, CoreError> {
    let approx = standard_approximation(pair);
    let (group, degrees) = p1_class_group(&approx)?;
    let cox = p1_cox(&approx)?;
    let pts = |p: &P1LogPair| {
        json!(p
            .points()
            .iter()
            .map(|(pt, c)| json!({"point": report::point(pt), "coefficient": report::rational(c)}))
            .collect::<Vec<_>>())
    };
    Ok(Outcome::ok(json!({
        "pair": pts(pair),
        "standard_approximation": pts(&approx),
        "class_group": report::group(&group),
        "generator_degrees": degrees.iter().map(|d| report::int_vec(d)).collect::<Vec<_>>(),
        "cox": report::cox(&cox),
    })))
}

/// Parses `text` and runs `cmd` on it.
pub fn evaluate(cmd: Command, text: &str, flags: Flags) -> Outcome {
    let doc = match parse_document(text) {
        Ok(d) => d,
        Err(e) => return input_failure(e),
    };
    match (&doc, cmd) {
        (InputDocument::Divisor(_), Command::P1) => wrong_kind(cmd, doc.kind()),
        (InputDocument::Divisor(d), _) => divisor_command(cmd, d, flags),
        (InputDocument::P1Pair(p), Command::P1) => p1_command(p).unwrap_or_else(core_failure),
        (InputDocument::Presentation(p), Command::Group(q)) => {
            group_query(q, p, flags).unwrap_or_else(core_failure)
        }
        _ => wrong_kind(cmd, doc.kind()),
    }
}

/// Exit code and rendered output.
pub fn run(cmd: Command, text: &str, flags: Flags) -> (i32, String) {
    let o = evaluate(cmd, text, flags);
    (o.code, o.render(flags.json))
}

pub fn run_file(cmd: Command, path: &Path, flags: Flags) -> Outcome {
    match fs::read_to_string(path) {
        Ok(text) => evaluate(cmd, &text, flags),
        Err(e) => Outcome::failure(EXIT_INPUT, "Io", format!("{}: {e}", path.display())),
    }
}

/// Regular files of `dir`, sorted by name.
pub fn batch_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs `cmd` on every file of `dir` in parallel; output is in file-name
/// order and the exit code is the largest one seen.
pub fn run_batch(cmd: Command, dir: &Path, flags: Flags) -> (i32, String) {
    let files = match batch_files(dir) {
        Ok(f) => f,
        Err(e) => {
            let o = Outcome::failure(EXIT_INPUT, "Io", format!("{}: {e}", dir.display()));
            return (o.code, o.render(flags.json));
        }
    };
    let outcomes: Vec<(String, Outcome)> = files
        .par_iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            (name, run_file(cmd, p, flags))
        })
        .collect();
    let code = outcomes.iter().map(|(_, o)| o.code).max().unwrap_or(EXIT_OK);
    let out = if flags.json {
        let arr: Vec<Value> = outcomes
            .into_iter()
            .map(|(name, o)| json!({"file": name, "exit_code": o.code, "report": o.report}))
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(arr)).expect("serializable report");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for (name, o) in outcomes {
            let _ = writeln!(s, "== {name} (exit {}) ==", o.code);
            s.push_str(&o.render(false));
        }
        s
    };
    (code, out)
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) if !s.contains('\n') => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => Some(format!(
            "[{}]",
            a.iter().filter_map(scalar_text).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match (scalar_text(x), x) {
                    (Some(s), _) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    (None, Value::String(s)) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for line in s.lines() {
                            let _ = writeln!(out, "{pad}  {line}");
                        }
                    }
                    (None, _) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_text(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar_text(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render_text(x, indent + 2, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other).unwrap_or_default());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDER_FIVE: &str = "[lattice]\nrank = 1\n[tail_cone]\nrays = [[1]]\n\
        [[mark]]\npoint = \"0\"\nvertices = [[\"1/2\"]]\n\
        [[mark]]\npoint = \"inf\"\nvertices = [[\"1/3\"]]\n";

    fn flags() -> Flags {
        Flags {
            json: true,
            ..Flags::default()
        }
    }

    #[test]
    fn check_accepts() {
        let o = evaluate(Command::Check, ORDER_FIVE, flags());
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(o.report["proper"], json!(true));
        assert_eq!(o.report["klt"], json!(true));
        assert_eq!(o.report["triple"], json!([3, 2, 1]));
    }

    #[test]
    fn check_rejects_non_proper() {
        let text = ORDER_FIVE.replace("\"1/3\"", "\"-1/2\"");
        let o = evaluate(Command::Check, &text, flags());
        assert_eq!(o.code, EXIT_REJECTED);
        assert_eq!(o.report["proper"], json!(false));
        assert_eq!(o.report["reason"], json!("deg(D) contains the origin"));
        let o = evaluate(Command::Pi1, &text, flags());
        assert_eq!((o.code, o.report["error"].clone()), (EXIT_REJECTED, json!("NotProper")));
    }

    #[test]
    fn input_and_guard_codes() {
        assert_eq!(evaluate(Command::Check, "[lattice]\n", flags()).code, EXIT_INPUT);
        assert_eq!(evaluate(Command::P1, ORDER_FIVE, flags()).code, EXIT_INPUT);
        let free = "gens: a b\n";
        let o = evaluate(Command::Group(GroupQuery::Order), free, Flags { json: true, max_cosets: 100 });
        assert_eq!((o.code, o.report["error"].clone()), (EXIT_GUARD, json!("CosetOverflow")));
        let o = evaluate(Command::Group(GroupQuery::Abelianization), free, flags());
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(o.report["abelianization"]["free_rank"], json!(2));
    }

    #[test]
    fn group_commands() {
        let t = "gens: a b\na^2\nb^3\n(a b)^5\n".replace("(a b)^5", "a b a b a b a b a b");
        let o = evaluate(Command::Group(GroupQuery::Order), &t, flags());
        assert_eq!(o.report["order"], json!("60"));
        let o = evaluate(Command::Group(GroupQuery::Solvable), &t, flags());
        assert_eq!(o.report["solvable"], json!(false));
        let o = evaluate(Command::Group(GroupQuery::Order), ORDER_FIVE, flags());
        assert_eq!(o.report["order"], json!("5"));
    }

    #[test]
    fn p1_pair() {
        let t = "[[point]]\nat = \"0\"\ncoefficient = \"3/5\"\n[[point]]\nat = \"inf\"\nmultiplicity = 6\n";
        let o = evaluate(Command::P1, t, flags());
        assert_eq!(o.code, EXIT_OK);
        // 3/5 rounds down to 1/2
        assert_eq!(o.report["class_group"]["torsion"], json!(["2"]));
    }

    #[test]
    fn text_rendering() {
        let (code, out) = run(Command::Check, ORDER_FIVE, Flags::default());
        assert_eq!(code, 0);
        assert_eq!(out, "klt: true\nproper: true\nreason: AtMostTwoNontrivial\ntriple: [3, 2, 1]\n");
    }
}
