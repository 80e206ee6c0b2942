//! Proper polyhedral divisors on the projective line.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{dot_qz, lp_feasible, Int, LinearConstraint, Rational};
use crate::polyhedra::{minkowski_sum, vertex_denominator, Cone, SigmaPolyhedron, ZVec};

/// Position of a point on `P^1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointCoord {
    Finite(Rational),
    Infinity,
    /// A point whose position is not determined (preimages under covers).
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct P1Point {
    pub coord: PointCoord,
    pub label: String,
}

impl P1Point {
    pub fn finite(c: Rational) -> Self {
        let label = if c.is_integer() {
            c.numer().to_string()
        } else {
            format!("{}/{}", c.numer(), c.denom())
        };
        P1Point {
            coord: PointCoord::Finite(c),
            label,
        }
    }

    pub fn infinity() -> Self {
        P1Point {
            coord: PointCoord::Infinity,
            label: "inf".into(),
        }
    }

    pub fn symbolic(label: impl Into<String>) -> Self {
        P1Point {
            coord: PointCoord::Symbolic,
            label: label.into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same position on `P^1`; symbolic points are told apart by label.
    pub fn same_position(&self, other: &P1Point) -> bool {
        match (&self.coord, &other.coord) {
            (PointCoord::Symbolic, PointCoord::Symbolic) => self.label == other.label,
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// A marked point with its polyhedral coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mark {
    pub point: P1Point,
    pub polyhedron: SigmaPolyhedron,
}

/// `D = sum_i Delta_i ⊗ {p_i}` on `(P^1, N)` with tail cone `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralDivisor {
    lattice_rank: usize,
    tail_cone: Cone,
    marks: Vec<Mark>,
}

impl PolyhedralDivisor {
    pub fn new(tail_cone: Cone, marks: Vec<Mark>) -> Result<PolyhedralDivisor> {
        let lattice_rank = tail_cone.ambient_rank();
        if lattice_rank == 0 {
            return Err(Error::Invalid("lattice rank must be positive".into()));
        }
        if !tail_cone.is_full_dimensional() {
            return Err(Error::NonFullDimensionalCone);
        }
        if marks.is_empty() {
            return Err(Error::Invalid("at least one marked point is required".into()));
        }
        for (i, m) in marks.iter().enumerate() {
            if m.polyhedron.ambient_rank() != lattice_rank {
                return Err(Error::DimensionMismatch {
                    expected: lattice_rank,
                    found: m.polyhedron.ambient_rank(),
                });
            }
            if m.polyhedron.recession_cone() != &tail_cone {
                return Err(Error::MismatchedRecessionCone);
            }
            for other in &marks[..i] {
                if other.point.same_position(&m.point) || other.point.label == m.point.label {
                    return Err(Error::DuplicatePoint(m.point.label.clone()));
                }
            }
        }
        Ok(PolyhedralDivisor {
            lattice_rank,
            tail_cone,
            marks,
        })
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn tail_cone(&self) -> &Cone {
        &self.tail_cone
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    /// `mu(p)`: largest vertex denominator of `Delta_p`.
    pub fn mu_of_mark(&self, i: usize) -> Int {
        self.marks[i]
            .polyhedron
            .vertices()
            .iter()
            .map(|v| vertex_denominator(v))
            .max()
            .unwrap_or_else(Int::one)
    }
}

/// Rational divisor on `P^1`; zero coefficients are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QDivisorP1 {
    pub terms: Vec<(P1Point, Rational)>,
}

impl QDivisorP1 {
    pub fn new(terms: Vec<(P1Point, Rational)>) -> Self {
        QDivisorP1 {
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn degree(&self) -> Rational {
        self.terms.iter().map(|(_, c)| c.clone()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &P1Point) -> Rational {
        self.terms
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for QDivisorP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*[{p}]")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Evaluation `D(u) = sum_i min<Delta_i, u> p_i`.
pub fn evaluate(d: &PolyhedralDivisor, u: &[Int]) -> Result<QDivisorP1> {
    let mut terms = Vec::with_capacity(d.marks.len());
    for m in &d.marks {
        terms.push((m.point.clone(), m.polyhedron.support_eval(u)?));
    }
    Ok(QDivisorP1::new(terms))
}

/// Minkowski sum of all attached polyhedra.
pub fn degree_polyhedron(d: &PolyhedralDivisor) -> Result<SigmaPolyhedron> {
    let mut acc = d.marks[0].polyhedron.clone();
    for m in &d.marks[1..] {
        acc = minkowski_sum(&acc, &m.polyhedron)?;
    }
    Ok(acc)
}

/// On `P^1`, properness means `deg(D) ⊆ sigma` and `0 ∉ deg(D)`.
pub fn is_proper(d: &PolyhedralDivisor) -> Result<bool> {
    let deg = degree_polyhedron(d)?;
    if !deg.is_contained_in(&d.tail_cone) {
        return Ok(false);
    }
    let origin = vec![Rational::zero(); d.lattice_rank];
    Ok(!deg.contains(&origin))
}

/// `mu_p` for every marked point, in mark order.
pub fn mu_data(d: &PolyhedralDivisor) -> Vec<(P1Point, Int)> {
    (0..d.marks.len())
        .map(|i| (d.marks[i].point.clone(), d.mu_of_mark(i)))
        .collect()
}

/// `B(D) = sum (1 - 1/mu_p) p`.
pub fn boundary_divisor(d: &PolyhedralDivisor) -> QDivisorP1 {
    QDivisorP1::new(
        mu_data(d)
            .into_iter()
            .map(|(p, mu)| (p, Rational::one() - Rational::new(Int::one(), mu)))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KltReason {
    AtMostTwoNontrivial,
    PlatonicTriple,
    TooManyNontrivialPoints,
    NonPlatonicTriple,
}

impl KltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            KltReason::AtMostTwoNontrivial => "AtMostTwoNontrivial",
            KltReason::PlatonicTriple => "PlatonicTriple",
            KltReason::TooManyNontrivialPoints => "TooManyNontrivialPoints",
            KltReason::NonPlatonicTriple => "NonPlatonicTriple",
        }
    }
}

/// Sorted triple `a >= b >= c >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple(pub [u64; 3]);

impl Triple {
    pub fn new(a: u64, b: u64, c: u64) -> Triple {
        let mut t = [a, b, c];
        t.sort_unstable_by(|x, y| y.cmp(x));
        Triple(t)
    }

    pub fn trivial() -> Triple {
        Triple([1, 1, 1])
    }

    /// Pad the values `> 1` of `values` with ones; keeps the three largest.
    pub fn from_values(values: &[u64]) -> Triple {
        let mut v: Vec<u64> = values.iter().copied().filter(|&x| x > 1).collect();
        v.sort_unstable_by(|x, y| y.cmp(x));
        v.resize(3.max(v.len()), 1);
        Triple([v[0], v[1], v[2]])
    }

    pub fn nontrivial_count(&self) -> usize {
        self.0.iter().filter(|&&x| x > 1).count()
    }

    /// `1/a + 1/b + 1/c > 1`.
    pub fn is_platonic(&self) -> bool {
        let [a, b, c] = self.0;
        // bc + ac + ab > abc
        let (a, b, c) = (a as u128, b as u128, c as u128);
        b * c + a * c + a * b > a * b * c
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Outcome of the klt test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KltCertificate {
    pub is_klt: bool,
    pub mu_list: Vec<(P1Point, Int)>,
    pub nontrivial_triple: Triple,
    pub reason: KltReason,
}

pub(crate) fn mu_to_u64(mu: &Int) -> u64 {
    mu.to_u64().unwrap_or(u64::MAX)
}

/// klt certificate from the multiplicities alone.
pub fn klt_from_mu(mu_list: Vec<(P1Point, Int)>) -> KltCertificate {
    let values: Vec<u64> = mu_list.iter().map(|(_, m)| mu_to_u64(m)).collect();
    let nontrivial = values.iter().filter(|&&m| m > 1).count();
    let triple = Triple::from_values(&values);
    let reason = match nontrivial {
        0..=2 => KltReason::AtMostTwoNontrivial,
        3 if triple.is_platonic() => KltReason::PlatonicTriple,
        3 => KltReason::NonPlatonicTriple,
        _ => KltReason::TooManyNontrivialPoints,
    };
    KltCertificate {
        is_klt: matches!(
            reason,
            KltReason::AtMostTwoNontrivial | KltReason::PlatonicTriple
        ),
        mu_list,
        nontrivial_triple: triple,
        reason,
    }
}

/// `X(D)` is klt at the vertex iff `(P^1, B(D))` is log Fano.
pub fn is_klt(d: &PolyhedralDivisor) -> Result<KltCertificate> {
    if !is_proper(d)? {
        return Err(Error::NotProper);
    }
    Ok(klt_from_mu(mu_data(d)))
}

/// Second formulation: `deg(K_{P^1} + B(D)) < 0`, i.e. the boundary has
/// degree below two.
pub fn is_log_fano_boundary(b: &QDivisorP1) -> bool {
    b.degree() < Rational::from_integer(Int::from(2))
}

/// Rays of the tail cone meeting `deg(D)` in a nonzero point.
pub fn contracted_rays(d: &PolyhedralDivisor) -> Result<Vec<ZVec>> {
    let deg = degree_polyhedron(d)?;
    let mut out = Vec::new();
    for ray in d.tail_cone.rays() {
        // k * ray in deg(D) with k > 0
        let mut cons: Vec<LinearConstraint> = deg
            .constraints()
            .iter()
            .map(|c| LinearConstraint::new(vec![dot_qz(&c.coeffs, ray)], c.relation, c.bound.clone()))
            .collect();
        cons.push(LinearConstraint::gt(vec![Rational::one()], Rational::zero()));
        if lp_feasible(&cons)? {
            out.push(ray.clone());
        }
    }
    Ok(out)
}

/// Ramification data of a branched cover `P^1 -> P^1` of degree `total_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchData {
    pub total_degree: u64,
    pub branch_points: Vec<(P1Point, Vec<(String, u64)>)>,
}

impl BranchData {
    pub fn identity() -> BranchData {
        BranchData {
            total_degree: 1,
            branch_points: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_degree == 0 {
            return Err(Error::BranchMismatch("degree must be positive".into()));
        }
        for (p, pre) in &self.branch_points {
            let sum: u64 = pre.iter().map(|(_, e)| *e).sum();
            if sum != self.total_degree || pre.iter().any(|(_, e)| *e == 0) {
                return Err(Error::BranchMismatch(format!(
                    "ramification over {p} sums to {sum}, cover degree is {}",
                    self.total_degree
                )));
            }
        }
        Ok(())
    }

    /// Riemann–Hurwitz for a cover of `P^1` by `P^1`.
    pub fn riemann_hurwitz_holds(&self) -> bool {
        let ram: u64 = self
            .branch_points
            .iter()
            .flat_map(|(_, pre)| pre.iter().map(|(_, e)| e - 1))
            .sum();
        ram == 2 * self.total_degree - 2
    }
}

/// Pull-back along a branched cover: a preimage with ramification `e` of a
/// marked point carries `e * Delta_p`; marks away from the branch locus get
/// `d` unramified copies.
pub fn pullback(d: &PolyhedralDivisor, cover: &BranchData) -> Result<PolyhedralDivisor> {
    cover.validate()?;
    if cover.total_degree == 1 {
        return Ok(d.clone());
    }
    let mut marks = Vec::new();
    for m in &d.marks {
        let branch = cover
            .branch_points
            .iter()
            .find(|(p, _)| p.same_position(&m.point) && p.label == m.point.label);
        match branch {
            Some((_, pre)) => {
                for (label, e) in pre {
                    marks.push(Mark {
                        point: P1Point::symbolic(label.clone()),
                        polyhedron: m.polyhedron.scaled(&Int::from(*e)),
                    });
                }
            }
            None => {
                for k in 0..cover.total_degree {
                    marks.push(Mark {
                        point: P1Point::symbolic(format!("{}~{}", m.point.label, k)),
                        polyhedron: m.polyhedron.clone(),
                    });
                }
            }
        }
    }
    PolyhedralDivisor::new(d.tail_cone.clone(), marks)
}

/// Total degree of `D(u)` computed from the degree polyhedron.
pub fn degree_of_evaluation(d: &PolyhedralDivisor, u: &[Int]) -> Result<Rational> {
    degree_polyhedron(d)?.support_eval(u)
}

/// Whether `u` lies in the dual of the tail cone.
pub fn in_dual(d: &PolyhedralDivisor, u: &[Int]) -> bool {
    d.tail_cone.dual_contains(u)
}

/// Helper for tests and callers: a rank-`r` point polyhedron `{v} + sigma`.
pub fn point_mark(p: P1Point, v: Vec<Rational>, sigma: &Cone) -> Result<Mark> {
    Ok(Mark {
        point: p,
        polyhedron: SigmaPolyhedron::point(v, sigma.clone())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int_vec, rat};

    fn rank1(points: &[(P1Point, Rational)]) -> PolyhedralDivisor {
        let sigma = Cone::orthant(1);
        let marks = points
            .iter()
            .map(|(p, v)| point_mark(p.clone(), vec![v.clone()], &sigma).unwrap())
            .collect();
        PolyhedralDivisor::new(sigma, marks).unwrap()
    }

    fn two_mark() -> PolyhedralDivisor {
        rank1(&[
            (P1Point::finite(rat(0, 1)), rat(1, 2)),
            (P1Point::infinity(), rat(1, 3)),
        ])
    }

    #[test]
    fn evaluation() {
        let d = two_mark();
        let e = evaluate(&d, &int_vec(&[6])).unwrap();
        assert_eq!(e.terms, vec![(P1Point::finite(rat(0, 1)), rat(3, 1)), (P1Point::infinity(), rat(2, 1))]);
        assert!(evaluate(&d, &int_vec(&[0])).unwrap().is_empty());
        let e = evaluate(&d, &int_vec(&[1])).unwrap();
        assert_eq!(e.degree(), rat(5, 6));
        assert_eq!(evaluate(&d, &int_vec(&[-1])), Err(Error::Unbounded));
    }

    #[test]
    fn degree_and_properness() {
        let d = two_mark();
        let deg = degree_polyhedron(&d).unwrap();
        assert_eq!(deg.vertices(), &[vec![rat(5, 6)]]);
        assert!(is_proper(&d).unwrap());
        let bad = rank1(&[
            (P1Point::finite(rat(0, 1)), rat(-1, 1)),
            (P1Point::infinity(), rat(0, 1)),
        ]);
        assert!(!is_proper(&bad).unwrap());
        let single = rank1(&[(P1Point::finite(rat(1, 1)), rat(2, 1))]);
        assert!(is_proper(&single).unwrap());
        assert_eq!(is_klt(&bad), Err(Error::NotProper));
    }

    #[test]
    fn mu_and_boundary() {
        let d = two_mark();
        let mus: Vec<Int> = mu_data(&d).into_iter().map(|(_, m)| m).collect();
        assert_eq!(mus, int_vec(&[2, 3]));
        let b = boundary_divisor(&d);
        assert_eq!(b.terms[0].1, rat(1, 2));
        assert_eq!(b.terms[1].1, rat(2, 3));

        let sigma = Cone::zero(2);
        let p = SigmaPolyhedron::new(vec![vec![rat(1, 3), rat(0, 1)], vec![rat(0, 1), rat(1, 5)]], sigma).unwrap();
        let mu = p.vertices().iter().map(|v| vertex_denominator(v)).max().unwrap();
        assert_eq!(mu, Int::from(5));
    }

    #[test]
    fn klt_tests() {
        let cert = klt_from_mu(vec![
            (P1Point::symbolic("a"), Int::from(5)),
            (P1Point::symbolic("b"), Int::from(3)),
            (P1Point::symbolic("c"), Int::from(2)),
        ]);
        assert!(cert.is_klt);
        assert_eq!(cert.reason, KltReason::PlatonicTriple);
        assert_eq!(cert.nontrivial_triple, Triple::new(5, 3, 2));
        let cert = klt_from_mu(vec![
            (P1Point::symbolic("a"), Int::from(5)),
            (P1Point::symbolic("b"), Int::from(4)),
            (P1Point::symbolic("c"), Int::from(2)),
        ]);
        assert!(!cert.is_klt);
        assert_eq!(cert.reason, KltReason::NonPlatonicTriple);
        let cert = klt_from_mu(vec![
            (P1Point::symbolic("a"), Int::from(7)),
            (P1Point::symbolic("b"), Int::from(4)),
        ]);
        assert!(cert.is_klt);
        assert_eq!(cert.reason, KltReason::AtMostTwoNontrivial);
        assert_eq!(cert.nontrivial_triple, Triple::new(7, 4, 1));
        let four: Vec<_> = (0..4).map(|i| (P1Point::symbolic(format!("p{i}")), Int::from(2))).collect();
        assert_eq!(klt_from_mu(four).reason, KltReason::TooManyNontrivialPoints);
    }

    #[test]
    fn contracted() {
        let d = two_mark();
        assert_eq!(contracted_rays(&d).unwrap(), vec![int_vec(&[1])]);
        // deg strictly inside the quadrant: no ray contracted
        let sigma = Cone::orthant(2);
        let m = point_mark(P1Point::finite(rat(0, 1)), vec![rat(1, 1), rat(1, 1)], &sigma).unwrap();
        let d = PolyhedralDivisor::new(sigma.clone(), vec![m]).unwrap();
        assert!(contracted_rays(&d).unwrap().is_empty());
        // deg = (1,0) + quadrant touches the ray (1,0) only
        let m = point_mark(P1Point::finite(rat(0, 1)), vec![rat(1, 1), rat(0, 1)], &sigma).unwrap();
        let d = PolyhedralDivisor::new(sigma, vec![m]).unwrap();
        assert_eq!(contracted_rays(&d).unwrap(), vec![int_vec(&[1, 0])]);
    }

    #[test]
    fn pullbacks() {
        let d = two_mark();
        assert_eq!(pullback(&d, &BranchData::identity()).unwrap(), d);
        let cover = BranchData {
            total_degree: 2,
            branch_points: vec![
                (P1Point::finite(rat(0, 1)), vec![("q0".into(), 2)]),
                (P1Point::infinity(), vec![("q1".into(), 2)]),
            ],
        };
        assert!(cover.riemann_hurwitz_holds());
        let pd = pullback(&d, &cover).unwrap();
        assert_eq!(pd.marks()[0].polyhedron.vertices(), &[vec![rat(1, 1)]]);
        assert_eq!(pd.marks()[1].polyhedron.vertices(), &[vec![rat(2, 3)]]);

        let d3 = rank1(&[(P1Point::finite(rat(0, 1)), rat(1, 3))]);
        let cover = BranchData {
            total_degree: 3,
            branch_points: vec![(P1Point::infinity(), vec![("w".into(), 3)])],
        };
        let pd = pullback(&d3, &cover).unwrap();
        assert_eq!(pd.marks().len(), 3);
        assert!(pd.marks().iter().all(|m| m.polyhedron.vertices() == [vec![rat(1, 3)]]));

        let bad = BranchData {
            total_degree: 3,
            branch_points: vec![(P1Point::infinity(), vec![("w".into(), 2)])],
        };
        assert!(matches!(pullback(&d3, &bad), Err(Error::BranchMismatch(_))));
    }

    #[test]
    fn invariants_enforced() {
        let sigma = Cone::orthant(1);
        let m1 = point_mark(P1Point::finite(rat(0, 1)), vec![rat(1, 2)], &sigma).unwrap();
        let m2 = point_mark(P1Point::finite(rat(0, 1)).with_label("x"), vec![rat(1, 3)], &sigma).unwrap();
        assert!(matches!(
            PolyhedralDivisor::new(sigma.clone(), vec![m1.clone(), m2]),
            Err(Error::DuplicatePoint(_))
        ));
        let other = point_mark(P1Point::infinity(), vec![rat(1, 3)], &Cone::zero(1)).unwrap();
        assert_eq!(
            PolyhedralDivisor::new(sigma, vec![m1.clone(), other]),
            Err(Error::MismatchedRecessionCone)
        );
        let flat = Cone::from_i64(2, &[&[1, 0]]).unwrap();
        let m = point_mark(P1Point::infinity(), vec![rat(1, 3), rat(0, 1)], &flat).unwrap();
        assert_eq!(PolyhedralDivisor::new(flat, vec![m]), Err(Error::NonFullDimensionalCone));
    }
}
