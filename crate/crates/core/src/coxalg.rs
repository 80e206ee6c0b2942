//! Cox rings: trinomial presentations of klt complexity-one singularities and
//! of log pairs on the projective line.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{dot_qz, CokernelMap, FGAbelianGroup, Int, IntMatrix, Rational};
use crate::pdiv::{contracted_rays, is_klt, P1Point, PointCoord, PolyhedralDivisor, Triple};
use crate::polyhedra::{vertex_denominator, QVec};

/// Coefficient of a trinomial relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(Rational),
    /// Depends on point positions that are not determined.
    Symbolic,
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Symbolic => f.write_str("?"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxVariable {
    pub name: String,
    /// Exponent `l_ij` in the relations (1 for `S_k` variables).
    pub exponent: u64,
    /// Coordinates in the grading group: free part first, then torsion residues.
    pub degree: Vec<Int>,
}

/// `theta * M_0 + M_1 + M_2`, each monomial a list of `(variable, exponent)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trinomial {
    pub index: usize,
    pub theta: Scalar,
    pub monomials: [Vec<(usize, u64)>; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRingPresentation {
    pub variables: Vec<CoxVariable>,
    pub grading_group: FGAbelianGroup,
    pub relations: Vec<Trinomial>,
    /// Variable indices per monomial block, in block order.
    pub blocks: Vec<Vec<usize>>,
    pub notes: Vec<String>,
}

impl GradedRingPresentation {
    /// Degree vectors as rows, one per variable.
    pub fn grading_matrix(&self) -> Vec<Vec<Int>> {
        self.variables.iter().map(|v| v.degree.clone()).collect()
    }

    /// Exponent tuples of the blocks, each sorted descending.
    pub fn exponent_data(&self) -> Vec<Vec<u64>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| self.variables[i].exponent).collect())
            .collect()
    }

    /// Maxima of the first three blocks, padded with ones.
    pub fn block_maxima(&self) -> Triple {
        let maxima: Vec<u64> = self
            .exponent_data()
            .iter()
            .map(|b| b.first().copied().unwrap_or(1))
            .collect();
        Triple::from_values(&maxima)
    }

    /// Jacobian criterion at the origin: a relation with a linear monomial
    /// (single variable, exponent one) keeps the vertex smooth.
    pub fn is_smooth_at_origin(&self) -> bool {
        self.relations.iter().all(|t| {
            t.monomials
                .iter()
                .any(|m| m.len() == 1 && m[0].1 == 1)
        })
    }

    fn format_monomial(&self, m: &[(usize, u64)]) -> String {
        m.iter()
            .map(|&(v, e)| {
                if e == 1 {
                    self.variables[v].name.clone()
                } else {
                    format!("{}^{}", self.variables[v].name, e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for GradedRingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
        write!(f, "K[{}]", names.join(", "))?;
        if !self.relations.is_empty() {
            let rels: Vec<String> = self
                .relations
                .iter()
                .map(|t| {
                    let head = self.format_monomial(&t.monomials[0]);
                    let head = match &t.theta {
                        Scalar::Rational(q) if q.is_one() => head,
                        Scalar::Rational(q) => format!("({q})*{head}"),
                        Scalar::Symbolic => format!("theta_{}*{head}", t.index),
                    };
                    format!(
                        "{head} + {} + {}",
                        self.format_monomial(&t.monomials[1]),
                        self.format_monomial(&t.monomials[2])
                    )
                })
                .collect();
            write!(f, " / <{}>", rels.join(", "))?;
        }
        writeln!(f)?;
        writeln!(f, "grading: {}", self.grading_group)?;
        for v in &self.variables {
            let d: Vec<String> = v.degree.iter().map(|x| x.to_string()).collect();
            writeln!(f, "deg {} = [{}]", v.name, d.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Divisor side

#[derive(Clone, Debug)]
struct Block {
    point: Option<P1Point>,
    vertices: Vec<QVec>,
    exponents: Vec<u64>,
}

#[derive(Clone, Debug)]
struct CoxData {
    blocks: Vec<Block>,
    s_rays: Vec<Vec<Int>>,
    map: CokernelMap,
    non_contributing: Vec<String>,
}

fn mark_contributes(vertices: &[QVec]) -> bool {
    vertices.len() > 1 || vertices.iter().any(|v| !vertex_denominator(v).is_one())
}

fn cox_data(d: &PolyhedralDivisor) -> Result<CoxData> {
    if !is_klt(d)?.is_klt {
        return Err(Error::NotKlt);
    }
    let r = d.lattice_rank();
    let mut blocks = Vec::new();
    let mut lattice_shift = vec![Int::zero(); r];
    let mut non_contributing = Vec::new();
    for m in d.marks() {
        let verts = m.polyhedron.vertices();
        if mark_contributes(verts) {
            let exponents = verts
                .iter()
                .map(|v| vertex_denominator(v).to_u64().unwrap_or(u64::MAX))
                .collect();
            blocks.push(Block {
                point: Some(m.point.clone()),
                vertices: verts.to_vec(),
                exponents,
            });
        } else {
            for (s, x) in lattice_shift.iter_mut().zip(&verts[0]) {
                *s += x.to_integer();
            }
            non_contributing.push(m.point.label.clone());
        }
    }
    // generic fibres complete the picture to at least two blocks
    while blocks.len() < 2 {
        blocks.push(Block {
            point: None,
            vertices: vec![vec![Rational::zero(); r]],
            exponents: vec![1],
        });
    }
    let contracted = contracted_rays(d)?;
    let s_rays: Vec<Vec<Int>> = d
        .tail_cone()
        .rays()
        .iter()
        .filter(|ray| !contracted.contains(ray))
        .cloned()
        .collect();

    let n_t: usize = blocks.iter().map(|b| b.vertices.len()).sum();
    let n_vars = n_t + s_rays.len();
    let mut offsets = Vec::new();
    let mut acc = 0;
    for b in &blocks {
        offsets.push(acc);
        acc += b.vertices.len();
    }
    let fibre = |i: usize| {
        let mut v = vec![Int::zero(); n_vars];
        for (j, l) in blocks[i].exponents.iter().enumerate() {
            v[offsets[i] + j] = Int::from(*l);
        }
        v
    };
    let mut relations: Vec<Vec<Int>> = Vec::new();
    let f0 = fibre(0);
    for i in 1..blocks.len() {
        relations.push(fibre(i).iter().zip(&f0).map(|(a, b)| a - b).collect());
    }
    for k in 0..r {
        let mut u = vec![Int::zero(); r];
        u[k] = Int::one();
        let mut col = vec![Int::zero(); n_vars];
        for (i, b) in blocks.iter().enumerate() {
            for (j, v) in b.vertices.iter().enumerate() {
                let val = dot_qz(v, &u) * Rational::from_integer(Int::from(b.exponents[j]));
                col[offsets[i] + j] = val.to_integer();
            }
        }
        for (idx, ray) in s_rays.iter().enumerate() {
            col[n_t + idx] = ray[k].clone();
        }
        if !lattice_shift[k].is_zero() {
            for (c, f) in col.iter_mut().zip(&f0) {
                *c += &lattice_shift[k] * f;
            }
        }
        relations.push(col);
    }
    let map = CokernelMap::new(&IntMatrix::from_columns(n_vars, &relations));
    Ok(CoxData {
        blocks,
        s_rays,
        map,
        non_contributing,
    })
}

/// Divisor class group of `X(D)`.
pub fn class_group_of(d: &PolyhedralDivisor) -> Result<FGAbelianGroup> {
    Ok(cox_data(d)?.map.group().clone())
}

fn degrees(map: &CokernelMap, n: usize) -> Vec<Vec<Int>> {
    let mut degs: Vec<Vec<Int>> = (0..n).map(|i| map.class_of_generator(i)).collect();
    // a single free coordinate is oriented to make weights nonnegative
    if map.group().free_rank() == 1 && degs.iter().any(|d| d[0].is_negative()) {
        for d in &mut degs {
            d[0] = -d[0].clone();
        }
    }
    degs
}

/// Linear form vanishing at a point, as coefficients of `(z, w)`.
fn linear_form(p: &P1Point) -> Option<[Rational; 2]> {
    match &p.coord {
        PointCoord::Finite(c) => Some([Rational::one(), -c.clone()]),
        PointCoord::Infinity => Some([Rational::zero(), Rational::one()]),
        PointCoord::Symbolic => None,
    }
}

fn det2(a: &[Rational; 2], b: &[Rational; 2]) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Scalars of the trinomials for blocks at the given points. The monomial of
/// block `k` is `c_k * l_k` for the linear form `l_k` of its point; each
/// trinomial is the unique dependency of three consecutive forms, and the
/// rescaling `c` is fixed by `theta_0 = 1`, `c_1 = 1`.
pub fn trinomial_scalars(points: &[P1Point]) -> Vec<Scalar> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let forms: Vec<Option<[Rational; 2]>> = points.iter().map(linear_form).collect();
    let mut out = vec![Scalar::Rational(Rational::one())];
    let mut c: Vec<Rational> = Vec::with_capacity(n);
    let mut symbolic = false;
    for i in 0..n - 2 {
        match (&forms[i], &forms[i + 1], &forms[i + 2]) {
            (Some(a), Some(b), Some(g)) if !symbolic => {
                let alpha = det2(b, g);
                let beta = det2(g, a);
                let gamma = det2(a, b);
                if i == 0 {
                    c.push(&alpha / &beta);
                    c.push(Rational::one());
                } else {
                    out.push(Scalar::Rational(&alpha * &c[i + 1] / (&beta * &c[i])));
                }
                let next = &gamma * &c[i + 1] / &beta;
                c.push(next);
            }
            _ => {
                symbolic = true;
                if i > 0 {
                    out.push(Scalar::Symbolic);
                }
            }
        }
    }
    out
}

/// Platonic presentation of `Cox(X(D))`.
pub fn platonic_cox(d: &PolyhedralDivisor) -> Result<GradedRingPresentation> {
    let data = cox_data(d)?;
    let n_t: usize = data.blocks.iter().map(|b| b.vertices.len()).sum();
    let degs = degrees(&data.map, n_t + data.s_rays.len());

    // blocks by descending leading exponent, stable in input order
    let mut order: Vec<usize> = (0..data.blocks.len()).collect();
    let lead = |i: usize| data.blocks[i].exponents.iter().copied().max().unwrap_or(1);
    order.sort_by_key(|&a| std::cmp::Reverse(lead(a)));

    let mut offsets = Vec::new();
    let mut acc = 0;
    for b in &data.blocks {
        offsets.push(acc);
        acc += b.vertices.len();
    }
    let mut variables = Vec::new();
    let mut blocks = Vec::new();
    for (pos, &bi) in order.iter().enumerate() {
        let b = &data.blocks[bi];
        let mut js: Vec<usize> = (0..b.exponents.len()).collect();
        js.sort_by(|&x, &y| b.exponents[y].cmp(&b.exponents[x]));
        let mut idx = Vec::new();
        for (k, &j) in js.iter().enumerate() {
            idx.push(variables.len());
            variables.push(CoxVariable {
                name: format!("T_{{{},{}}}", pos, k + 1),
                exponent: b.exponents[j],
                degree: degs[offsets[bi] + j].clone(),
            });
        }
        blocks.push(idx);
    }
    for (k, _) in data.s_rays.iter().enumerate() {
        variables.push(CoxVariable {
            name: format!("S_{}", k + 1),
            exponent: 1,
            degree: degs[n_t + k].clone(),
        });
    }
    let points: Vec<P1Point> = order
        .iter()
        .map(|&bi| {
            data.blocks[bi]
                .point
                .clone()
                .unwrap_or_else(|| P1Point::symbolic("generic"))
        })
        .collect();
    let scalars = trinomial_scalars(&points);
    let monomial = |b: &[usize]| -> Vec<(usize, u64)> {
        b.iter().map(|&v| (v, variables[v].exponent)).collect()
    };
    let relations = scalars
        .into_iter()
        .enumerate()
        .map(|(i, theta)| Trinomial {
            index: i,
            theta,
            monomials: [
                monomial(&blocks[i]),
                monomial(&blocks[i + 1]),
                monomial(&blocks[i + 2]),
            ],
        })
        .collect();
    let mut notes = Vec::new();
    if !data.non_contributing.is_empty() {
        notes.push(format!(
            "marks without a block: {}",
            data.non_contributing.join(", ")
        ));
    }
    Ok(GradedRingPresentation {
        variables,
        grading_group: data.map.group().clone(),
        relations,
        blocks,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Log pairs on P^1

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1LogPair {
    points: Vec<(P1Point, Rational)>,
}

impl P1LogPair {
    pub fn new(points: Vec<(P1Point, Rational)>) -> Result<Self> {
        for (i, (p, c)) in points.iter().enumerate() {
            if c.is_negative() || *c >= Rational::one() {
                return Err(Error::Invalid(format!("coefficient {c} at {p} not in [0,1)")));
            }
            if points[..i].iter().any(|(q, _)| q.same_position(p) || q.label == p.label) {
                return Err(Error::DuplicatePoint(p.label.clone()));
            }
        }
        Ok(P1LogPair { points })
    }

    /// Pair `sum (1 - 1/n_i) p_i` at the given points.
    pub fn standard(points: Vec<(P1Point, u64)>) -> Result<Self> {
        P1LogPair::new(
            points
                .into_iter()
                .map(|(p, n)| (p, Rational::one() - Rational::new(Int::one(), Int::from(n.max(1)))))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(P1Point, Rational)] {
        &self.points
    }

    /// `n` with coefficient `1 - 1/n`, for standard coefficients.
    fn multiplicities(&self) -> Result<Vec<u64>> {
        self.points
            .iter()
            .map(|(p, c)| {
                let inv = (Rational::one() - c).recip();
                if !inv.is_integer() {
                    return Err(Error::Invalid(format!(
                        "coefficient {c} at {p} is not standard"
                    )));
                }
                inv.to_integer()
                    .to_u64()
                    .ok_or_else(|| Error::Invalid("multiplicity out of range".into()))
            })
            .collect()
    }
}

/// Largest standard coefficients below the given ones.
pub fn standard_approximation(pair: &P1LogPair) -> P1LogPair {
    P1LogPair {
        points: pair
            .points
            .iter()
            .map(|(p, c)| {
                let n = (Rational::one() - c).recip().floor().to_integer();
                (p.clone(), Rational::one() - Rational::new(Int::one(), n))
            })
            .collect(),
    }
}

/// Nontrivial multiplicities `> 1` in input order, rejecting non log Fano pairs.
fn log_fano_multiplicities(pair: &P1LogPair) -> Result<Vec<u64>> {
    let mus: Vec<u64> = pair.multiplicities()?.into_iter().filter(|&n| n > 1).collect();
    match mus.len() {
        0..=2 => Ok(mus),
        3 if Triple::new(mus[0], mus[1], mus[2]).is_platonic() => Ok(mus),
        _ => Err(Error::NotLogFano),
    }
}

fn pair_cokernel(mus: &[u64]) -> CokernelMap {
    let n = mus.len().max(1);
    let relations: Vec<Vec<Int>> = (1..mus.len())
        .map(|i| {
            let mut v = vec![Int::zero(); n];
            v[i - 1] = Int::from(mus[i - 1]);
            v[i] = -Int::from(mus[i]);
            v
        })
        .collect();
    CokernelMap::new(&IntMatrix::from_columns(n, &relations))
}

/// `Cl(P^1, Delta)` generated by `(1/n_i) p_i`, with the generator degrees.
pub fn p1_class_group(pair: &P1LogPair) -> Result<(FGAbelianGroup, Vec<Vec<Int>>)> {
    let mus = log_fano_multiplicities(pair)?;
    let map = pair_cokernel(&mus);
    let degs = degrees(&map, mus.len().max(1));
    Ok((map.group().clone(), degs))
}

/// Cox ring of a log Fano pair on `P^1`.
pub fn p1_cox(pair: &P1LogPair) -> Result<GradedRingPresentation> {
    let mus = log_fano_multiplicities(pair)?;
    // the polynomial cases carry a second point of multiplicity one
    let mut full = mus.clone();
    while full.len() < 2 {
        full.push(1);
    }
    let map = pair_cokernel(&full);
    let degs = degrees(&map, full.len());
    let names = ["x", "y", "z"];
    let variables: Vec<CoxVariable> = full
        .iter()
        .enumerate()
        .map(|(i, &n)| CoxVariable {
            name: names[i].into(),
            exponent: n,
            degree: degs[i].clone(),
        })
        .collect();
    let relations = if full.len() == 3 {
        vec![Trinomial {
            index: 0,
            theta: Scalar::Rational(Rational::one()),
            monomials: [vec![(0, full[0])], vec![(1, full[1])], vec![(2, full[2])]],
        }]
    } else {
        Vec::new()
    };
    Ok(GradedRingPresentation {
        blocks: (0..full.len()).map(|i| vec![i]).collect(),
        variables,
        grading_group: map.group().clone(),
        relations,
        notes: Vec::new(),
    })
}

/// `(m/g, n/g)` or `(ms/g, ns/g, nm/g)`: free weights by the closed formula.
pub fn p1_free_weights(mus: &[u64]) -> Vec<u64> {
    let prod: u64 = mus.iter().product();
    let w: Vec<u64> = mus.iter().map(|m| prod / m).collect();
    let g = w.iter().fold(0u64, |a, &b| a.gcd(&b)).max(1);
    w.iter().map(|x| x / g).collect()
}
