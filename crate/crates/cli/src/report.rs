//! JSON renderings of the pipeline results. Integers that can grow without
//! bound and all rationals are strings.

use serde_json::{json, Value};

use tsing_core::coxalg::{GradedRingPresentation, Scalar};
use tsing_core::exactalg::{FGAbelianGroup, Int, Rational};
use tsing_core::fundgrp::Pi1Report;
use tsing_core::grouppres::DerivedSeries;
use tsing_core::iteration::{IterationReport, PipelineReport, ScfcReport};
use tsing_core::pdiv::{BranchData, KltCertificate, P1Point, QDivisorP1, Triple};
use tsing_core::polyhedra::SigmaPolyhedron;

use crate::input::format_rational;

pub fn int(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn int_vec(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rational_vec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn point(p: &P1Point) -> Value {
    Value::String(p.label.clone())
}

pub fn triple(t: &Triple) -> Value {
    json!(t.0)
}

pub fn group(g: &FGAbelianGroup) -> Value {
    json!({
        "free_rank": g.free_rank(),
        "torsion": int_vec(g.invariant_factors()),
        "text": g.to_string(),
    })
}

pub fn klt(c: &KltCertificate) -> Value {
    json!({
        "is_klt": c.is_klt,
        "reason": c.reason.as_str(),
        "triple": triple(&c.nontrivial_triple),
        "mu": c.mu_list.iter().map(|(p, m)| json!({"point": point(p), "mu": int(m)})).collect::<Vec<_>>(),
    })
}

pub fn polyhedron(p: &SigmaPolyhedron) -> Value {
    json!({
        "vertices": p.vertices().iter().map(|v| rational_vec(v)).collect::<Vec<_>>(),
        "rays": p.recession_cone().rays().iter().map(|r| int_vec(r)).collect::<Vec<_>>(),
    })
}

pub fn q_divisor(b: &QDivisorP1) -> Value {
    Value::Array(
        b.terms
            .iter()
            .map(|(p, c)| json!({"point": point(p), "coefficient": rational(c)}))
            .collect(),
    )
}

fn scalar(s: &Scalar) -> Value {
    match s {
        Scalar::Rational(q) => rational(q),
        Scalar::Symbolic => Value::String("symbolic".into()),
    }
}

pub fn cox(r: &GradedRingPresentation) -> Value {
    let name = |i: usize| r.variables[i].name.clone();
    json!({
        "variables": r.variables.iter().map(|v| json!({
            "name": v.name,
            "exponent": v.exponent,
            "degree": int_vec(&v.degree),
        })).collect::<Vec<_>>(),
        "grading_group": group(&r.grading_group),
        "relations": r.relations.iter().map(|t| json!({
            "index": t.index,
            "theta": scalar(&t.theta),
            "monomials": t.monomials.iter().map(|m| m.iter().map(|&(i, e)| json!([name(i), e])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "blocks": r.blocks.iter().map(|b| b.iter().map(|&i| name(i)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "block_maxima": triple(&r.block_maxima()),
        "notes": r.notes,
        "text": r.to_string(),
    })
}

pub fn series(s: &DerivedSeries) -> Value {
    Value::Array(s.quotients.iter().map(group).collect())
}

pub fn pi1(r: &Pi1Report) -> Value {
    json!({
        "presentation": r.data.presentation.to_string(),
        "n_d_basis": r.data.n_d_basis.iter().map(|v| int_vec(v)).collect::<Vec<_>>(),
        "height_zero_relations": r.data.height_zero_relations,
        "order": r.order.to_string(),
        "abelianization": group(&r.abelianization),
        "derived_series": series(&r.series),
        "solvable": r.solvable,
        "jordan": {
            "rank": r.jordan.rank,
            "index": r.jordan.index.to_string(),
            "structure": group(&r.jordan.structure),
        },
    })
}

pub fn iteration(r: &IterationReport, verdicts: &[bool], bound: u64) -> Value {
    json!({
        "depth": r.depth,
        "torsion_chain": r.torsion_chain.iter().map(group).collect::<Vec<_>>(),
        "terminal_order": r.terminal_order.to_string(),
        "triple_sequence": r.triple_sequence.iter().map(triple).collect::<Vec<_>>(),
        "sequence_verdicts": verdicts,
        "sequence_valid": r.sequence_valid,
        "depth_bound": bound,
    })
}

pub fn branch_data(b: &BranchData) -> Value {
    json!({
        "total_degree": b.total_degree,
        "riemann_hurwitz": b.riemann_hurwitz_holds(),
        "branch_points": b.branch_points.iter().map(|(p, pre)| json!({
            "point": point(p),
            "preimage_count": pre.len(),
            "ramification": pre.first().map(|(_, e)| *e).unwrap_or(1),
        })).collect::<Vec<_>>(),
    })
}

pub fn scfc(r: &ScfcReport) -> Value {
    json!({
        "cover_group_name": r.cover_group.to_string(),
        "cover_degree": r.cover_degree,
        "branch_data": branch_data(&r.branch_data),
        "pulled_back_marks": r.pulled_back_divisor.marks().len(),
        "cover_cox": cox(&r.cover_cox),
        "cover_pi1_order": r.cover_pi1_order.to_string(),
        "cover_pi1_abelian": r.cover_pi1_abelian,
    })
}

pub fn pipeline(r: &PipelineReport, bound: u64) -> Value {
    json!({
        "proper": true,
        "klt": klt(&r.klt),
        "triple": triple(&r.klt.nontrivial_triple),
        "cox": cox(&r.cox),
        "class_group": group(&r.class_group),
        "pi1": pi1(&r.pi1),
        "iteration": iteration(&r.iteration, &r.sequence_verdicts, bound),
        "scfc": scfc(&r.scfc),
        "scfc_matches_tower": r.scfc_matches_tower,
    })
}
