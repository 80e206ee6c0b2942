//! Regional fundamental group of `X(D)` at the vertex, via an explicit
//! finite presentation.

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{lattice_basis, lp_feasible, FGAbelianGroup, Int, LinearConstraint};
use crate::grouppres::{
    abelianization, derived_series, jordan_decomposition, todd_coxeter, DerivedSeries,
    FinitePresentation, JordanData, PermutationGroup, Word,
};
use crate::pdiv::{degree_polyhedron, is_klt, PolyhedralDivisor};
use crate::polyhedra::{cone_over, intersects, is_smooth, SigmaPolyhedron, ZVec};

/// Relation `t^{pi1} b_j^{pi2}` contributed by a basis vector at mark `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRelation {
    pub mark: usize,
    pub lattice_part: ZVec,
    pub height: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Data {
    pub presentation: FinitePresentation,
    pub lattice_rank: usize,
    pub n_d_basis: Vec<ZVec>,
    pub point_relations: Vec<PointRelation>,
    /// Point relations of height zero; they repeat `N_D`-type relations.
    pub height_zero_relations: usize,
}

impl Pi1Data {
    /// Words of the lattice loops `t_1, ..., t_r`.
    pub fn lattice_loops(&self) -> Vec<Word> {
        (0..self.lattice_rank).map(|i| vec![(i, 1)]).collect()
    }
}

/// Lattice generated by the rays of smooth faces of the tail cone missing `deg(D)`.
pub fn sublattice_n_d(d: &PolyhedralDivisor) -> Result<Vec<ZVec>> {
    let deg = degree_polyhedron(d)?;
    let r = d.lattice_rank();
    let mut gens = Vec::new();
    for face in d.tail_cone().faces()? {
        if face.ray_indices().is_empty() || !is_smooth(&face) {
            continue;
        }
        if !intersects(&deg, &face.to_cone())? {
            gens.extend(face.rays());
        }
    }
    Ok(lattice_basis(r, &gens))
}

/// HNF basis of `N_{sigma(D,p)}` for the polyhedron at a marked point, each
/// vector split into its lattice part and its height.
pub fn sublattice_at_point(d: &PolyhedralDivisor, mark: usize) -> Result<Vec<(ZVec, Int)>> {
    let delta = &d.marks()[mark].polyhedron;
    sublattice_over(delta, &degree_polyhedron(d)?)
}

/// Same as [`sublattice_at_point`] for an arbitrary `sigma`-polyhedron, e.g.
/// `sigma` itself at an unmarked point.
pub fn sublattice_over(
    delta: &SigmaPolyhedron,
    deg: &SigmaPolyhedron,
) -> Result<Vec<(ZVec, Int)>> {
    let r = delta.ambient_rank();
    let cone = cone_over(delta);
    let mut gens = Vec::new();
    for face in cone.faces()? {
        if face.ray_indices().is_empty() || !is_smooth(&face) {
            continue;
        }
        // deg(D) sits in the height-zero face: drop the last coordinate
        let mut cons: Vec<LinearConstraint> = face
            .to_cone()
            .constraints()
            .into_iter()
            .map(|c| LinearConstraint::new(c.coeffs[..r].to_vec(), c.relation, c.bound))
            .collect();
        cons.extend(deg.constraints().iter().cloned());
        if !lp_feasible(&cons)? {
            gens.extend(face.rays());
        }
    }
    Ok(lattice_basis(r + 1, &gens)
        .into_iter()
        .map(|mut v| {
            let h = v.pop().expect("height coordinate");
            (v, h)
        })
        .collect())
}

fn exponent(x: &Int) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Invalid(format!("exponent {x} out of range")))
}

fn t_word(n: &[Int]) -> Result<Word> {
    let mut w = Word::new();
    for (i, x) in n.iter().enumerate() {
        if !x.is_zero() {
            w.push((i, exponent(x)?));
        }
    }
    Ok(w)
}

/// Presentation with generators `t_1..t_r, b_1..b_s` (marks in input order).
pub fn pi1_presentation(d: &PolyhedralDivisor) -> Result<Pi1Data> {
    if !is_klt(d)?.is_klt {
        return Err(Error::NotKlt);
    }
    let r = d.lattice_rank();
    let s = d.marks().len();
    let mut names: Vec<String> = (1..=r).map(|i| format!("t{i}")).collect();
    names.extend((1..=s).map(|j| format!("b{j}")));
    let b = |j: usize| r + j;

    let mut relators: Vec<Word> = Vec::new();
    relators.push((0..s).map(|j| (b(j), 1)).collect());
    for i in 0..r {
        for k in i + 1..r {
            relators.push(vec![(i, 1), (k, 1), (i, -1), (k, -1)]);
        }
    }
    for i in 0..r {
        for j in 0..s {
            relators.push(vec![(i, 1), (b(j), 1), (i, -1), (b(j), -1)]);
        }
    }
    let n_d_basis = sublattice_n_d(d)?;
    for n in &n_d_basis {
        relators.push(t_word(n)?);
    }
    let mut point_relations = Vec::new();
    let mut height_zero = 0;
    for j in 0..s {
        for (v, h) in sublattice_at_point(d, j)? {
            let mut w = t_word(&v)?;
            if h.is_zero() {
                height_zero += 1;
            } else {
                w.push((b(j), exponent(&h)?));
            }
            relators.push(w);
            point_relations.push(PointRelation {
                mark: j,
                lattice_part: v,
                height: h,
            });
        }
    }
    Ok(Pi1Data {
        presentation: FinitePresentation::new(names, relators)?,
        lattice_rank: r,
        n_d_basis,
        point_relations,
        height_zero_relations: height_zero,
    })
}

#[derive(Clone, Debug)]
pub struct Pi1Report {
    pub data: Pi1Data,
    /// Regular representation from coset enumeration.
    pub group: PermutationGroup,
    pub order: usize,
    pub abelianization: FGAbelianGroup,
    pub series: DerivedSeries,
    pub solvable: bool,
    /// Image of the lattice loops.
    pub jordan: JordanData,
}

pub fn pi1_report(d: &PolyhedralDivisor, max_cosets: usize) -> Result<Pi1Report> {
    let data = pi1_presentation(d)?;
    let group = todd_coxeter(&data.presentation, max_cosets)?;
    let order = group.order()?;
    let series = derived_series(&group)?;
    let solvable = series.terminal_order()? == 1;
    let t_images = group.generators()[..data.lattice_rank].to_vec();
    let jordan = jordan_decomposition(&group, &t_images)?;
    Ok(Pi1Report {
        abelianization: abelianization(&data.presentation),
        data,
        group,
        order,
        series,
        solvable,
        jordan,
    })
}
