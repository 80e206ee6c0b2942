//! Iteration of Cox rings at the group level, platonic triple sequences and
//! the scfc cover through the orbifold universal cover of `(P^1, B(D))`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::coxalg::{class_group_of, platonic_cox, GradedRingPresentation};
use crate::error::{Error, Result};
use crate::exactalg::{FGAbelianGroup, Int, Rational};
use crate::fundgrp::{pi1_report, Pi1Report};
use crate::grouppres::{
    derived_series, todd_coxeter, FinitePresentation, PermutationGroup, DEFAULT_MAX_COSETS,
};
use crate::pdiv::{
    boundary_divisor, is_klt, is_proper, pullback, BranchData, KltCertificate, P1Point,
    PolyhedralDivisor, QDivisorP1, Triple,
};

#[derive(Clone, Debug)]
pub struct IterationReport {
    /// First `k` with `D_k` perfect.
    pub depth: usize,
    pub torsion_chain: Vec<FGAbelianGroup>,
    pub terminal_group: PermutationGroup,
    pub terminal_order: usize,
    pub triple_sequence: Vec<Triple>,
    pub sequence_valid: bool,
}

/// Derived series of a concrete group read as a tower of abelian covers.
pub fn group_iteration(g: &PermutationGroup) -> Result<IterationReport> {
    let s = derived_series(g)?;
    let terminal_order = s.terminal_order()?;
    Ok(IterationReport {
        depth: s.quotients.len(),
        terminal_group: s.terminal().clone(),
        torsion_chain: s.quotients,
        terminal_order,
        triple_sequence: Vec::new(),
        sequence_valid: true,
    })
}

/// `ceil(2 log2 c) + 3`: the least `k` with `2^k >= c^2`, plus three.
pub fn iteration_bound(c: u64) -> u64 {
    assert!(c >= 1, "iteration bound needs c >= 1");
    let sq = (c as u128) * (c as u128);
    let mut k = 0u64;
    while (1u128 << k) < sq {
        k += 1;
    }
    k + 3
}

// ---------------------------------------------------------------------------
// Platonic triple sequences

/// Successor of a triple along the tower of abelian orbifold covers.
fn next_triple(t: Triple) -> Option<Triple> {
    let [a, b, c] = t.0;
    match t.nontrivial_count() {
        3 => match (a, b, c) {
            (4, 3, 2) => Some(Triple::new(3, 3, 2)),
            (3, 3, 2) => Some(Triple::new(2, 2, 2)),
            (k, 2, 2) if k % 2 == 1 => Some(Triple::new(k, k, 1)),
            (k, 2, 2) => Some(Triple::new(k / 2, k / 2, 1)),
            _ => None,
        },
        2 => {
            let g = a.gcd(&b);
            (g > 1).then(|| Triple::new(a / g, b / g, 1))
        }
        _ => None,
    }
}

/// Triples from `t` down to the end of its abelian tower.
pub fn emit_triple_sequence(t: Triple) -> Vec<Triple> {
    let mut seq = vec![t];
    let mut cur = t;
    while let Some(n) = next_triple(cur) {
        seq.push(n);
        cur = n;
    }
    seq
}

fn is_xx1(t: Triple) -> Option<u64> {
    let [a, b, c] = t.0;
    (a == b && c == 1).then_some(a)
}

fn pair_in_families(s: Triple, t: Triple) -> bool {
    let f1 = [
        (Triple::new(1, 1, 1), Triple::new(2, 2, 2)),
        (Triple::new(2, 2, 2), Triple::new(3, 3, 2)),
        (Triple::new(3, 3, 2), Triple::new(4, 3, 2)),
    ];
    if f1.contains(&(s, t)) {
        return true;
    }
    // (1,1,1) - (x,x,1)
    if s == Triple::trivial() && is_xx1(t).is_some_and(|x| x >= 2) {
        return true;
    }
    if let Some(x) = is_xx1(s) {
        // (x,x,1) - (2x,2,2) and (x,x,1) - (x,2,2)
        if t == Triple::new(2 * x, 2, 2) || t == Triple::new(x, 2, 2) {
            return true;
        }
    }
    // (l0/l, l1/l, 1) - (l0, l1, 1)
    let [l0, l1, one] = t.0;
    if one == 1 {
        let l = l0.gcd(&l1);
        if l > 1 && s == Triple::new(l0 / l, l1 / l, 1) {
            return true;
        }
    }
    false
}

/// Whether an unordered pair of adjacent triples belongs to one of the
/// admissible families.
pub fn triple_pair_valid(a: Triple, b: Triple) -> bool {
    pair_in_families(a, b) || pair_in_families(b, a)
}

/// Verdict per adjacent pair.
pub fn triple_sequence_check(seq: &[Triple]) -> Vec<bool> {
    seq.windows(2).map(|w| triple_pair_valid(w[0], w[1])).collect()
}

// ---------------------------------------------------------------------------
// Orbifold universal covers

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SphericalGroup {
    Trivial,
    Cyclic(u64),
    Dihedral(u64),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl SphericalGroup {
    pub fn order(&self) -> u64 {
        match self {
            SphericalGroup::Trivial => 1,
            SphericalGroup::Cyclic(k) => *k,
            SphericalGroup::Dihedral(k) => 2 * k,
            SphericalGroup::Tetrahedral => 12,
            SphericalGroup::Octahedral => 24,
            SphericalGroup::Icosahedral => 60,
        }
    }
}

impl fmt::Display for SphericalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphericalGroup::Trivial => f.write_str("Trivial"),
            SphericalGroup::Cyclic(k) => write!(f, "Cyclic({k})"),
            SphericalGroup::Dihedral(k) => write!(f, "Dihedral({k})"),
            SphericalGroup::Tetrahedral => f.write_str("Tetrahedral"),
            SphericalGroup::Octahedral => f.write_str("Octahedral"),
            SphericalGroup::Icosahedral => f.write_str("Icosahedral"),
        }
    }
}

fn orbifold_presentation(mus: &[u64]) -> FinitePresentation {
    let names = vec!["x".to_string(), "y".to_string()];
    let rel = match mus {
        [m, n] => vec![vec![(0, *m as i64)], vec![(1, *n as i64)], vec![(0, 1), (1, 1)]],
        [a, b, c] => vec![
            vec![(0, *a as i64)],
            vec![(1, *b as i64)],
            [(0, 1), (1, 1)].repeat(*c as usize),
        ],
        _ => unreachable!("two or three cone points"),
    };
    FinitePresentation::new(names, rel).expect("valid presentation")
}

/// Order of the orbifold fundamental group, by coset enumeration, memoized.
fn orbifold_group_order(mus: &[u64]) -> Result<u64> {
    static TABLE: OnceLock<Mutex<HashMap<Vec<u64>, u64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = table.lock().expect("table lock").get(mus) {
        return Ok(v);
    }
    let g = todd_coxeter(&orbifold_presentation(mus), DEFAULT_MAX_COSETS)?;
    let order = g.order()? as u64;
    table.lock().expect("table lock").insert(mus.to_vec(), order);
    Ok(order)
}

fn standard_multiplicity(c: &Rational) -> Result<u64> {
    let inv = (Rational::one() - c).recip();
    if !inv.is_integer() || inv <= Rational::from_integer(Int::from(0)) {
        return Err(Error::Invalid(format!("coefficient {c} is not standard")));
    }
    inv.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Invalid("multiplicity out of range".into()))
}

/// Universal cover of the orbifold `(P^1, B)`: over a point of multiplicity
/// `mu` lie `d/mu` preimages ramified to order `mu` (for two cone points the
/// cover is cyclic of degree `gcd`).
pub fn orbifold_universal_cover(b: &QDivisorP1) -> Result<(SphericalGroup, BranchData)> {
    let mut pts: Vec<(P1Point, u64)> = Vec::new();
    for (p, c) in &b.terms {
        let mu = standard_multiplicity(c)?;
        if mu > 1 {
            pts.push((p.clone(), mu));
        }
    }
    let fibre = |p: &P1Point, count: u64, e: u64| {
        (
            p.clone(),
            (0..count).map(|k| (format!("{}#{}", p.label, k), e)).collect::<Vec<_>>(),
        )
    };
    match pts.len() {
        0 | 1 => Ok((SphericalGroup::Trivial, BranchData::identity())),
        2 => {
            let (m, n) = (pts[0].1, pts[1].1);
            let g = m.gcd(&n);
            let d = orbifold_group_order(&[m, n])?;
            if d != g {
                return Err(Error::BranchMismatch(format!(
                    "cyclic cover of order {d}, expected {g}"
                )));
            }
            if g == 1 {
                return Ok((SphericalGroup::Trivial, BranchData::identity()));
            }
            let cover = BranchData {
                total_degree: g,
                branch_points: pts.iter().map(|(p, _)| fibre(p, 1, g)).collect(),
            };
            Ok((SphericalGroup::Cyclic(g), cover))
        }
        3 => {
            let t = Triple::new(pts[0].1, pts[1].1, pts[2].1);
            if !t.is_platonic() {
                return Err(Error::NotLogFano);
            }
            let [a, b2, c] = t.0;
            // d = 2 / (1/a + 1/b + 1/c - 1)
            let num = 2 * a * b2 * c;
            let den = b2 * c + a * c + a * b2 - a * b2 * c;
            let d = num / den;
            let name = match t.0 {
                [k, 2, 2] => SphericalGroup::Dihedral(k),
                [3, 3, 2] => SphericalGroup::Tetrahedral,
                [4, 3, 2] => SphericalGroup::Octahedral,
                [5, 3, 2] => SphericalGroup::Icosahedral,
                _ => unreachable!("platonic triple with three cone points"),
            };
            let enumerated = orbifold_group_order(&t.0)?;
            if enumerated != d || name.order() != d {
                return Err(Error::BranchMismatch(format!(
                    "spherical group of order {enumerated}, expected {d}"
                )));
            }
            let cover = BranchData {
                total_degree: d,
                branch_points: pts.iter().map(|(p, mu)| fibre(p, d / mu, *mu)).collect(),
            };
            Ok((name, cover))
        }
        _ => Err(Error::NotLogFano),
    }
}

#[derive(Clone, Debug)]
pub struct ScfcReport {
    pub cover_group: SphericalGroup,
    pub cover_degree: u64,
    pub branch_data: BranchData,
    pub pulled_back_divisor: PolyhedralDivisor,
    pub cover_cox: GradedRingPresentation,
    pub cover_pi1_order: usize,
    pub cover_pi1_abelian: bool,
}

pub fn scfc(d: &PolyhedralDivisor, max_cosets: usize) -> Result<ScfcReport> {
    if !is_klt(d)?.is_klt {
        return Err(Error::NotKlt);
    }
    let (group, cover) = orbifold_universal_cover(&boundary_divisor(d))?;
    let pulled = pullback(d, &cover)?;
    let cover_cox = platonic_cox(&pulled)?;
    let rep = pi1_report(&pulled, max_cosets)?;
    if !rep.group.is_abelian() {
        return Err(Error::CoverPi1NotAbelian);
    }
    Ok(ScfcReport {
        cover_group: group,
        cover_degree: cover.total_degree,
        branch_data: cover,
        pulled_back_divisor: pulled,
        cover_cox,
        cover_pi1_order: rep.order,
        cover_pi1_abelian: true,
    })
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub klt: KltCertificate,
    pub cox: GradedRingPresentation,
    pub class_group: FGAbelianGroup,
    pub pi1: Pi1Report,
    pub iteration: IterationReport,
    pub sequence_verdicts: Vec<bool>,
    pub scfc: ScfcReport,
    /// Solvable `pi_1`: the scfc cover's block maxima equal the last triple
    /// of the abelian tower.
    pub scfc_matches_tower: Option<bool>,
}

pub fn full_pipeline(d: &PolyhedralDivisor, max_cosets: usize) -> Result<PipelineReport> {
    if !is_proper(d)? {
        return Err(Error::NotProper);
    }
    let klt = is_klt(d)?;
    if !klt.is_klt {
        return Err(Error::NotKlt);
    }
    let cox = platonic_cox(d)?;
    let class_group = class_group_of(d)?;
    let pi1 = pi1_report(d, max_cosets)?;
    let mut iteration = group_iteration(&pi1.group)?;
    iteration.triple_sequence = emit_triple_sequence(klt.nontrivial_triple);
    let sequence_verdicts = triple_sequence_check(&iteration.triple_sequence);
    iteration.sequence_valid = sequence_verdicts.iter().all(|&v| v);
    let scfc = scfc(d, max_cosets)?;
    let scfc_matches_tower = pi1.solvable.then(|| {
        iteration.triple_sequence.last().copied() == Some(scfc.cover_cox.block_maxima())
    });
    Ok(PipelineReport {
        klt,
        cox,
        class_group,
        pi1,
        iteration,
        sequence_verdicts,
        scfc,
        scfc_matches_tower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn b(mus: &[u64]) -> QDivisorP1 {
        let pts = [
            P1Point::finite(rat(0, 1)),
            P1Point::infinity(),
            P1Point::finite(rat(1, 1)),
        ];
        QDivisorP1::new(
            mus.iter()
                .zip(pts)
                .map(|(&m, p)| (p, rat(1, 1) - rat(1, m as i64)))
                .collect(),
        )
    }

    #[test]
    fn bounds() {
        assert_eq!(iteration_bound(1), 3);
        assert_eq!(iteration_bound(2), 5);
        assert_eq!(iteration_bound(60), 15);
    }

    #[test]
    fn sequences() {
        let s = emit_triple_sequence(Triple::new(4, 3, 2));
        assert_eq!(
            s,
            vec![
                Triple::new(4, 3, 2),
                Triple::new(3, 3, 2),
                Triple::new(2, 2, 2),
                Triple::new(1, 1, 1)
            ]
        );
        assert!(triple_sequence_check(&s).iter().all(|&v| v));
        assert_eq!(triple_sequence_check(&[Triple::new(6, 4, 1), Triple::new(3, 2, 1)]), vec![true]);
        assert_eq!(triple_sequence_check(&[Triple::new(5, 3, 2), Triple::new(3, 3, 2)]), vec![false]);
        assert_eq!(emit_triple_sequence(Triple::new(5, 3, 2)).len(), 1);
    }

    #[test]
    fn covers() {
        let (g, c) = orbifold_universal_cover(&b(&[2, 3, 5])).unwrap();
        assert_eq!(g, SphericalGroup::Icosahedral);
        let counts: Vec<usize> = c.branch_points.iter().map(|(_, v)| v.len()).collect();
        assert_eq!(counts, vec![30, 20, 12]);
        assert!(c.riemann_hurwitz_holds());
        let (g, c) = orbifold_universal_cover(&b(&[4, 6])).unwrap();
        assert_eq!((g, c.total_degree), (SphericalGroup::Cyclic(2), 2));
        assert!(c.riemann_hurwitz_holds());
        let (g, c) = orbifold_universal_cover(&QDivisorP1::default()).unwrap();
        assert_eq!((g, c.total_degree), (SphericalGroup::Trivial, 1));
        assert_eq!(
            orbifold_universal_cover(&b(&[2, 2, 2])).unwrap().0,
            SphericalGroup::Dihedral(2)
        );
    }
}
