//! Rational convex geometry: pointed cones with face lattices and
//! polyhedra with a prescribed recession cone.
//!
//! Polyhedra are kept in V-representation. The H-representation is produced
//! on demand by double description and cached inside the value.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{
    cokernel, denominator_lcm, dot_q, dot_qz, integer_rank, lp_feasible, nullspace, primitive,
    primitive_from_rational, rational_rank, to_rational_vec, Int, IntMatrix, LinearConstraint,
    Rational, MAX_LP_DIM,
};

/// Largest ambient rank accepted for cones and polyhedra.
pub const MAX_RANK: usize = 8;

pub type QVec = Vec<Rational>;
pub type ZVec = Vec<Int>;

/// Thread-safe lazily computed value that is ignored by comparisons.
struct Cache<T>(OnceLock<T>);

impl<T> Default for Cache<T> {
    fn default() -> Self {
        Cache(OnceLock::new())
    }
}

impl<T: Clone> Clone for Cache<T> {
    fn clone(&self) -> Self {
        let c = Cache(OnceLock::new());
        if let Some(v) = self.0.get() {
            let _ = c.0.set(v.clone());
        }
        c
    }
}

impl<T> fmt::Debug for Cache<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("..")
    }
}

/// Inequality description `{x : eq·x = 0, f·x >= 0}` of a cone.
#[derive(Clone, Debug)]
pub struct ConeHRep {
    pub equations: Vec<ZVec>,
    pub facets: Vec<Facet>,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Primitive inner normal.
    pub normal: ZVec,
    /// Indices of the rays lying on the facet.
    pub rays: Vec<usize>,
}

/// Strongly convex rational polyhedral cone given by primitive extreme rays,
/// sorted lexicographically.
#[derive(Clone)]
pub struct Cone {
    ambient_rank: usize,
    rays: Vec<ZVec>,
    hrep: Cache<ConeHRep>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl Hash for Cone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient_rank.hash(state);
        self.rays.hash(state);
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone(")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_vec(r))?;
        }
        write!(f, ")")
    }
}

fn fmt_vec<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn check_rank(what: &'static str, dim: usize) -> Result<()> {
    if dim > MAX_RANK {
        Err(Error::DimensionGuard {
            what,
            dim,
            limit: MAX_RANK,
        })
    } else {
        Ok(())
    }
}

impl Cone {
    /// Cone generated by `generators`. Generators are made primitive,
    /// duplicates and non-extreme generators are removed.
    pub fn new(ambient_rank: usize, generators: Vec<ZVec>) -> Result<Cone> {
        check_rank("cone", ambient_rank)?;
        let mut rays: Vec<ZVec> = Vec::new();
        for g in generators {
            if g.len() != ambient_rank {
                return Err(Error::DimensionMismatch {
                    expected: ambient_rank,
                    found: g.len(),
                });
            }
            if g.iter().all(|x| x.is_zero()) {
                continue;
            }
            rays.push(primitive(&g));
        }
        rays.sort();
        rays.dedup();
        if !rays.is_empty() && !positive_functional_exists(ambient_rank, &rays)? {
            return Err(Error::NotStronglyConvex);
        }
        let mut extreme = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            // r is extreme iff some u in the dual vanishes on r only
            let mut cons = vec![LinearConstraint::eq(to_rational_vec(r), Rational::zero())];
            for (j, s) in rays.iter().enumerate() {
                if i != j {
                    cons.push(LinearConstraint::gt(to_rational_vec(s), Rational::zero()));
                }
            }
            if lp_feasible(&cons)? {
                extreme.push(r.clone());
            }
        }
        Ok(Cone {
            ambient_rank,
            rays: extreme,
            hrep: Cache::default(),
        })
    }

    pub fn from_i64(ambient_rank: usize, generators: &[&[i64]]) -> Result<Cone> {
        Self::new(
            ambient_rank,
            generators.iter().map(|g| crate::exactalg::int_vec(g)).collect(),
        )
    }

    /// Caller guarantees the generators are primitive, pairwise distinct,
    /// extreme rays of a pointed cone.
    pub(crate) fn from_extreme_rays(ambient_rank: usize, mut rays: Vec<ZVec>) -> Cone {
        rays.sort();
        rays.dedup();
        Cone {
            ambient_rank,
            rays,
            hrep: Cache::default(),
        }
    }

    /// The zero cone `{0}`.
    pub fn zero(ambient_rank: usize) -> Cone {
        Self::from_extreme_rays(ambient_rank, Vec::new())
    }

    /// The positive orthant.
    pub fn orthant(ambient_rank: usize) -> Cone {
        let rays = (0..ambient_rank)
            .map(|i| {
                let mut e = vec![Int::zero(); ambient_rank];
                e[i] = Int::one();
                e
            })
            .collect();
        Self::from_extreme_rays(ambient_rank, rays)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[ZVec] {
        &self.rays
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        integer_rank(&self.rays, self.ambient_rank)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_rank
    }

    /// Whether `u` is nonnegative on the cone.
    pub fn dual_contains(&self, u: &[Int]) -> bool {
        self.rays
            .iter()
            .all(|r| !crate::exactalg::dot_z(r, u).is_negative())
    }

    pub fn hrep(&self) -> &ConeHRep {
        self.hrep.0.get_or_init(|| compute_hrep(self.ambient_rank, &self.rays))
    }

    /// Linear constraints cutting out the cone.
    pub fn constraints(&self) -> Vec<LinearConstraint> {
        let h = self.hrep();
        let mut out = Vec::new();
        for e in &h.equations {
            out.push(LinearConstraint::eq(to_rational_vec(e), Rational::zero()));
        }
        for f in &h.facets {
            out.push(LinearConstraint::ge(to_rational_vec(&f.normal), Rational::zero()));
        }
        out
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.constraints().iter().all(|c| c.is_satisfied_by(x))
    }

    /// All faces, from `{0}` up to the cone itself, ordered by dimension and
    /// then by ray indices.
    pub fn faces(&self) -> Result<Vec<Face>> {
        check_rank("face enumeration", self.ambient_rank)?;
        let full: Vec<usize> = (0..self.rays.len()).collect();
        let facets: Vec<BTreeSet<usize>> = self
            .hrep()
            .facets
            .iter()
            .map(|f| f.rays.iter().copied().collect())
            .collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
        seen.insert(full.clone());
        queue.push_back(full.into_iter().collect());
        while let Some(face) = queue.pop_front() {
            for f in &facets {
                let meet: BTreeSet<usize> = face.intersection(f).copied().collect();
                let key: Vec<usize> = meet.iter().copied().collect();
                if seen.insert(key) {
                    queue.push_back(meet);
                }
            }
        }
        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|idx| Face {
                parent: self.clone(),
                ray_indices: idx,
            })
            .collect();
        faces.sort_by(|a, b| {
            a.dim()
                .cmp(&b.dim())
                .then_with(|| a.ray_indices.cmp(&b.ray_indices))
        });
        Ok(faces)
    }
}

// Is there u with <u, r> > 0 for every generator r?
fn positive_functional_exists(ambient_rank: usize, rays: &[ZVec]) -> Result<bool> {
    if ambient_rank > MAX_LP_DIM {
        return Err(Error::DimensionGuard {
            what: "cone",
            dim: ambient_rank,
            limit: MAX_LP_DIM,
        });
    }
    let cons: Vec<LinearConstraint> = rays
        .iter()
        .map(|r| LinearConstraint::gt(to_rational_vec(r), Rational::zero()))
        .collect();
    lp_feasible(&cons)
}

/// Double description: facet normals of the cone spanned by `rays` are the
/// extreme rays of its dual, built by inserting one ray constraint at a time.
fn compute_hrep(ambient_rank: usize, rays: &[ZVec]) -> ConeHRep {
    let qrays: Vec<QVec> = rays.iter().map(|r| to_rational_vec(r)).collect();
    let equations: Vec<ZVec> = nullspace(&qrays, ambient_rank)
        .iter()
        .map(|v| primitive_from_rational(v))
        .collect();
    // basis of the span chosen among the rays
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut basis: Vec<QVec> = Vec::new();
    for (i, r) in qrays.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(r.clone());
        if rational_rank(&trial, ambient_rank) == trial.len() {
            basis.push(r.clone());
            basis_idx.push(i);
        }
    }
    let d = basis.len();
    if d == 0 {
        return ConeHRep {
            equations,
            facets: Vec::new(),
        };
    }
    // coordinates on the span: L = (B B^T)^{-1} B
    let gram: Vec<QVec> = basis
        .iter()
        .map(|a| basis.iter().map(|b| dot_q(a, b)).collect())
        .collect();
    let gram_inv = invert(&gram);
    let left: Vec<QVec> = (0..d)
        .map(|i| {
            (0..ambient_rank)
                .map(|k| (0..d).map(|j| &gram_inv[i][j] * &basis[j][k]).sum())
                .collect()
        })
        .collect();
    let coords: Vec<QVec> = qrays
        .iter()
        .map(|r| left.iter().map(|row| dot_q(row, r)).collect())
        .collect();

    // Dual cone {u : <u, y_j> >= 0}. Starting from the basis rays, whose
    // coordinates are unit vectors, the dual is the orthant.
    struct DualRay {
        u: QVec,
        zeros: BTreeSet<usize>,
    }
    let mut current: Vec<DualRay> = (0..d)
        .map(|i| {
            let mut u = vec![Rational::zero(); d];
            u[i] = Rational::one();
            let zeros = basis_idx
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &k)| k)
                .collect();
            DualRay { u, zeros }
        })
        .collect();
    let mut processed: Vec<usize> = basis_idx.clone();
    for k in 0..rays.len() {
        if basis_idx.contains(&k) {
            continue;
        }
        let y = &coords[k];
        let vals: Vec<Rational> = current.iter().map(|r| dot_q(&r.u, y)).collect();
        let mut next: Vec<DualRay> = Vec::new();
        for (r, v) in current.iter().zip(&vals) {
            if !v.is_negative() {
                let mut zeros = r.zeros.clone();
                if v.is_zero() {
                    zeros.insert(k);
                }
                next.push(DualRay {
                    u: r.u.clone(),
                    zeros,
                });
            }
        }
        for (pi, p) in current.iter().enumerate() {
            if !vals[pi].is_positive() {
                continue;
            }
            for (ni, n) in current.iter().enumerate() {
                if !vals[ni].is_negative() {
                    continue;
                }
                let common: BTreeSet<usize> = p.zeros.intersection(&n.zeros).copied().collect();
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent = current.iter().enumerate().all(|(oi, o)| {
                    oi == pi || oi == ni || !common.is_subset(&o.zeros)
                });
                if !adjacent {
                    continue;
                }
                let a = &vals[pi];
                let b = &vals[ni];
                let u: QVec = n.u.iter().zip(&p.u).map(|(x, z)| a * x - b * z).collect();
                let mut zeros = common;
                zeros.insert(k);
                next.push(DualRay { u, zeros });
            }
        }
        current = next;
        processed.push(k);
    }
    let mut facets: Vec<Facet> = current
        .into_iter()
        .map(|r| {
            let normal_q: QVec = (0..ambient_rank)
                .map(|k| (0..d).map(|i| &r.u[i] * &left[i][k]).sum())
                .collect();
            let normal = primitive_from_rational(&normal_q);
            let on: Vec<usize> = (0..rays.len())
                .filter(|&j| dot_qz(&to_rational_vec(&normal), &rays[j]).is_zero())
                .collect();
            Facet { normal, rays: on }
        })
        .collect();
    facets.sort_by(|a, b| a.rays.cmp(&b.rays).then_with(|| a.normal.cmp(&b.normal)));
    facets.dedup_by(|a, b| a.rays == b.rays);
    ConeHRep { equations, facets }
}

fn invert(m: &[QVec]) -> Vec<QVec> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (red, pivots) = crate::exactalg::rref(&aug, 2 * n);
    assert_eq!(&pivots[..n], &(0..n).collect::<Vec<_>>()[..], "singular matrix");
    red.iter().map(|r| r[n..].to_vec()).collect()
}

/// A face of a cone, recorded as a subset of the parent's rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    parent: Cone,
    ray_indices: Vec<usize>,
}

impl Face {
    pub fn parent(&self) -> &Cone {
        &self.parent
    }

    pub fn ray_indices(&self) -> &[usize] {
        &self.ray_indices
    }

    pub fn rays(&self) -> Vec<ZVec> {
        self.ray_indices
            .iter()
            .map(|&i| self.parent.rays[i].clone())
            .collect()
    }

    pub fn dim(&self) -> usize {
        integer_rank(&self.rays(), self.parent.ambient_rank)
    }

    pub fn to_cone(&self) -> Cone {
        Cone::from_extreme_rays(self.parent.ambient_rank, self.rays())
    }

    /// A linear functional nonnegative on the parent and vanishing exactly on
    /// this face.
    pub fn supporting_functional(&self) -> ZVec {
        let n = self.parent.ambient_rank;
        let mut u = vec![Int::zero(); n];
        for f in &self.parent.hrep().facets {
            if self.ray_indices.iter().all(|i| f.rays.contains(i)) {
                for k in 0..n {
                    u[k] += &f.normal[k];
                }
            }
        }
        u
    }
}

/// Whether the primitive generators extend to a lattice basis.
pub fn is_smooth_rays(ambient_rank: usize, rays: &[ZVec]) -> bool {
    if rays.is_empty() {
        return true;
    }
    if integer_rank(rays, ambient_rank) != rays.len() {
        return false;
    }
    let m = IntMatrix::from_columns(ambient_rank, rays);
    cokernel(&m).invariant_factors().is_empty()
}

pub fn is_smooth(face: &Face) -> bool {
    is_smooth_rays(face.parent.ambient_rank, &face.rays())
}

/// Smallest positive integer clearing the denominators of `v`.
pub fn vertex_denominator(v: &[Rational]) -> Int {
    denominator_lcm(v)
}

/// Polyhedron `conv(vertices) + recession_cone` with a pointed recession
/// cone. Vertices are exactly the extreme points, sorted lexicographically.
#[derive(Clone)]
pub struct SigmaPolyhedron {
    vertices: Vec<QVec>,
    recession: Cone,
    hrep: Cache<Vec<LinearConstraint>>,
}

impl PartialEq for SigmaPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.recession == other.recession
    }
}

impl Eq for SigmaPolyhedron {}

impl Hash for SigmaPolyhedron {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
        self.recession.hash(state);
    }
}

impl fmt::Debug for SigmaPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| fmt_vec(v)).collect();
        write!(f, "conv{{{}}} + {:?}", vs.join(", "), self.recession)
    }
}

impl SigmaPolyhedron {
    pub fn new(vertices: Vec<QVec>, recession: Cone) -> Result<SigmaPolyhedron> {
        let n = recession.ambient_rank();
        if vertices.is_empty() {
            return Err(Error::Invalid("polyhedron without vertices".into()));
        }
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let mut pts = vertices;
        pts.sort();
        pts.dedup();
        let mut extreme = Vec::new();
        for (i, v) in pts.iter().enumerate() {
            // v is a vertex iff some u is positive on the recession rays and
            // strictly larger on every other point than on v
            let mut cons = Vec::new();
            for r in recession.rays() {
                cons.push(LinearConstraint::gt(to_rational_vec(r), Rational::zero()));
            }
            for (j, w) in pts.iter().enumerate() {
                if i != j {
                    let diff: QVec = w.iter().zip(v).map(|(a, b)| a - b).collect();
                    cons.push(LinearConstraint::gt(diff, Rational::zero()));
                }
            }
            if cons.is_empty() || lp_feasible(&cons)? {
                extreme.push(v.clone());
            }
        }
        Ok(SigmaPolyhedron {
            vertices: extreme,
            recession,
            hrep: Cache::default(),
        })
    }

    /// `{v} + recession`.
    pub fn point(v: QVec, recession: Cone) -> Result<SigmaPolyhedron> {
        Self::new(vec![v], recession)
    }

    pub fn ambient_rank(&self) -> usize {
        self.recession.ambient_rank()
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn recession_cone(&self) -> &Cone {
        &self.recession
    }

    /// Re-run canonicalization (idempotent on canonical values).
    pub fn canonicalized(&self) -> Result<SigmaPolyhedron> {
        Self::new(self.vertices.clone(), self.recession.clone())
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(|v| vertex_denominator(v).is_one())
    }

    /// Vertex-wise scaling by a positive integer.
    pub fn scaled(&self, factor: &Int) -> SigmaPolyhedron {
        assert!(factor.is_positive());
        let f = Rational::from_integer(factor.clone());
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * &f).collect())
            .collect();
        SigmaPolyhedron {
            vertices,
            recession: self.recession.clone(),
            hrep: Cache::default(),
        }
    }

    /// Minimum of `<., u>` over the polyhedron.
    pub fn support_eval(&self, u: &[Int]) -> Result<Rational> {
        if u.len() != self.ambient_rank() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank(),
                found: u.len(),
            });
        }
        if !self.recession.dual_contains(u) {
            return Err(Error::Unbounded);
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| dot_qz(v, u))
            .min()
            .expect("polyhedron has a vertex"))
    }

    /// Linear constraints in `x` cutting out the polyhedron.
    pub fn constraints(&self) -> &[LinearConstraint] {
        self.hrep.0.get_or_init(|| {
            let n = self.ambient_rank();
            let homog = cone_over(self);
            let h = compute_hrep(n + 1, homog.rays());
            let mut out = Vec::new();
            for e in &h.equations {
                out.push(LinearConstraint::eq(
                    to_rational_vec(&e[..n]),
                    Rational::from_integer(-e[n].clone()),
                ));
            }
            for f in &h.facets {
                out.push(LinearConstraint::ge(
                    to_rational_vec(&f.normal[..n]),
                    Rational::from_integer(-f.normal[n].clone()),
                ));
            }
            out
        })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.constraints().iter().all(|c| c.is_satisfied_by(x))
    }

    /// Whether the polyhedron is contained in the cone `c`.
    pub fn is_contained_in(&self, c: &Cone) -> bool {
        self.vertices.iter().all(|v| c.contains(v))
            && self
                .recession
                .rays()
                .iter()
                .all(|r| c.contains(&to_rational_vec(r)))
    }
}

/// Minkowski sum of two polyhedra sharing their recession cone.
pub fn minkowski_sum(p: &SigmaPolyhedron, q: &SigmaPolyhedron) -> Result<SigmaPolyhedron> {
    if p.ambient_rank() != q.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_rank(),
            found: q.ambient_rank(),
        });
    }
    if p.recession != q.recession {
        return Err(Error::MismatchedRecessionCone);
    }
    let mut sums = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            sums.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
        }
    }
    SigmaPolyhedron::new(sums, p.recession.clone())
}

/// Minimum of `<., u>` over `p`; see [`SigmaPolyhedron::support_eval`].
pub fn support_eval(p: &SigmaPolyhedron, u: &[Int]) -> Result<Rational> {
    p.support_eval(u)
}

/// Whether `p` meets the cone `c`, decided by exact LP.
pub fn intersects(p: &SigmaPolyhedron, c: &Cone) -> Result<bool> {
    if p.ambient_rank() != c.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_rank(),
            found: c.ambient_rank(),
        });
    }
    let mut cons: Vec<LinearConstraint> = p.constraints().to_vec();
    cons.extend(c.constraints());
    lp_feasible(&cons)
}

/// Cone over `p` placed at height one, in rank `r + 1`.
pub fn cone_over(p: &SigmaPolyhedron) -> Cone {
    let n = p.ambient_rank();
    let mut rays = Vec::new();
    for v in &p.vertices {
        let mut h: QVec = v.clone();
        h.push(Rational::one());
        rays.push(primitive_from_rational(&h));
    }
    for r in p.recession.rays() {
        let mut h = r.clone();
        h.push(Int::zero());
        rays.push(h);
    }
    debug_assert!(rays.iter().all(|r| r.len() == n + 1));
    Cone::from_extreme_rays(n + 1, rays)
}
