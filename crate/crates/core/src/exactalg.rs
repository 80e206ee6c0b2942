//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt` / `BigRational`; there is no floating
//! point anywhere in the crate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = BigRational;

/// Largest number of variables handed to Fourier–Motzkin elimination.
pub const MAX_LP_DIM: usize = 8;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn to_rational_vec(v: &[Int]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

pub fn dot_q(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_z(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairing of a rational vector with an integer vector.
pub fn dot_qz(a: &[Rational], b: &[Int]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * Rational::from_integer(y.clone()))
        .sum()
}

/// gcd of all entries (0 for the zero vector).
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divide out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = content(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Least common multiple of the denominators.
pub fn denominator_lcm(v: &[Rational]) -> Int {
    v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()))
}

/// Scale a rational vector to the primitive integer vector on the same ray.
pub fn primitive_from_rational(v: &[Rational]) -> Vec<Int> {
    let l = denominator_lcm(v);
    let scaled: Vec<Int> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    primitive(&scaled)
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Build from rows; `cols` is needed to describe matrices with no rows.
    pub fn from_rows(cols: usize, rows: &[Vec<Int>]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            entries.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Int>> = rows.iter().map(|r| int_vec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    /// Build from column vectors living in `Z^rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        (0..self.rows).map(|i| dot_z(&self.row(i), v)).collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(source, j)] * factor;
            self[(target, j)] += v;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, source)] * factor;
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `s = u * a * v` with `u`, `v` unimodular and `s` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Smith normal form, pivoting on the entry of least absolute value.
pub fn snf(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => s[(i, j)].abs() < s[(bi, bj)].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row(i, t, &-&q);
                u.add_row(i, t, &-&q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col(j, t, &-&q);
                v.add_col(j, t, &-&q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s[(i, j)].is_multiple_of(&s[(t, t)]));
            match offender {
                Some((i, _)) => {
                    s.add_row(t, i, &Int::one());
                    u.add_row(t, i, &Int::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, s, v }
}

/// Finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k`
/// with `1 < d_1 | d_2 | … | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FGAbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<Int>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        FGAbelianGroup {
            free_rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// Direct sum of cyclic groups `Z/c` (`c = 0` meaning `Z`), brought into
    /// invariant-factor form.
    pub fn from_cyclic_orders(orders: &[Int]) -> Self {
        let diag: Vec<Vec<Int>> = orders
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut col = vec![Int::zero(); orders.len()];
                col[i] = c.abs();
                col
            })
            .collect();
        cokernel(&IntMatrix::from_columns(orders.len(), &diag))
    }

    pub fn from_i64(free_rank: usize, factors: &[i64]) -> Self {
        let mut orders: Vec<Int> = int_vec(factors);
        orders.extend(std::iter::repeat_n(Int::zero(), free_rank));
        Self::from_cyclic_orders(&orders)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[Int] {
        &self.invariant_factors
    }

    pub fn torsion(&self) -> FGAbelianGroup {
        FGAbelianGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of a finite group, `None` when the free rank is positive.
    pub fn order(&self) -> Option<Int> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of `a : Z^cols -> Z^rows`, i.e. `Z^rows` modulo the column span.
pub fn cokernel(a: &IntMatrix) -> FGAbelianGroup {
    cokernel_with_smith(a).0
}

/// Cokernel together with the Smith form used to compute it; the class of the
/// standard generator `e_i` is `u * e_i` read modulo the diagonal.
pub fn cokernel_with_smith(a: &IntMatrix) -> (FGAbelianGroup, SmithForm) {
    let sf = snf(a);
    let diag = sf.diagonal();
    let free_rank = a.rows() - diag.iter().filter(|d| !d.is_zero()).count();
    let invariant_factors: Vec<Int> = diag
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect();
    (
        FGAbelianGroup {
            free_rank,
            invariant_factors,
        },
        sf,
    )
}

/// Coordinates of elements of `coker(a)` relative to its invariant-factor
/// decomposition: free coordinates first, then one residue per torsion factor.
#[derive(Clone, Debug)]
pub struct CokernelMap {
    group: FGAbelianGroup,
    u: IntMatrix,
    // row indices of u giving torsion coordinates, with their moduli
    torsion_rows: Vec<(usize, Int)>,
    free_rows: Vec<usize>,
}

impl CokernelMap {
    pub fn new(a: &IntMatrix) -> Self {
        let (group, sf) = cokernel_with_smith(a);
        let diag = sf.diagonal();
        let mut torsion_rows = Vec::new();
        let mut free_rows = Vec::new();
        for i in 0..a.rows() {
            match diag.get(i) {
                Some(d) if d.is_zero() => free_rows.push(i),
                None => free_rows.push(i),
                Some(d) if d.is_one() => {}
                Some(d) => torsion_rows.push((i, d.clone())),
            }
        }
        CokernelMap {
            group,
            u: sf.u,
            torsion_rows,
            free_rows,
        }
    }

    pub fn group(&self) -> &FGAbelianGroup {
        &self.group
    }

    /// Image of an element of `Z^rows`.
    pub fn class_of(&self, x: &[Int]) -> Vec<Int> {
        let y = self.u.mul_vec(x);
        let mut out: Vec<Int> = self.free_rows.iter().map(|&i| y[i].clone()).collect();
        for (i, d) in &self.torsion_rows {
            out.push(y[*i].mod_floor(d));
        }
        out
    }

    pub fn class_of_generator(&self, i: usize) -> Vec<Int> {
        let mut e = vec![Int::zero(); self.u.cols()];
        e[i] = Int::one();
        self.class_of(&e)
    }
}

/// Row-style Hermite normal form of the lattice spanned by `generators`:
/// echelon rows with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(dim: usize, generators: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut rows: Vec<Vec<Int>> = generators
        .iter()
        .filter(|g| {
            assert_eq!(g.len(), dim, "generator of wrong dimension");
            g.iter().any(|x| !x.is_zero())
        })
        .cloned()
        .collect();
    let mut out: Vec<Vec<Int>> = Vec::new();
    for col in 0..dim {
        // gcd-reduce the column among remaining rows
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()).then(a.cmp(&b)));
            let p = nz[0];
            if nz.len() == 1 {
                let mut pivot = rows.remove(p);
                if pivot[col].is_negative() {
                    pivot.iter_mut().for_each(|x| *x = -x.clone());
                }
                out.push(pivot);
                break;
            }
            let pivot = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_floor(&pivot[col]);
                for k in 0..dim {
                    let v = &q * &pivot[k];
                    rows[i][k] -= v;
                }
            }
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        let pv = out[i][pc].clone();
        for j in 0..i {
            let q = out[j][pc].div_floor(&pv);
            if !q.is_zero() {
                for k in 0..dim {
                    let v = &q * &out[i][k];
                    out[j][k] -= v;
                }
            }
        }
    }
    out
}

/// Hermite-normal-form basis of the lattice generated by `generators`.
pub fn lattice_basis(dim: usize, generators: &[Vec<Int>]) -> Vec<Vec<Int>> {
    hermite_rows(dim, generators)
}

/// Reduced row echelon form over Q; returns the matrix and pivot columns.
pub fn rref(rows: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let v = &f * &m[r][k];
                    m[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rational_rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    rref(rows, cols).1.len()
}

pub fn integer_rank(rows: &[Vec<Int>], cols: usize) -> usize {
    let q: Vec<Vec<Rational>> = rows.iter().map(|r| to_rational_vec(r)).collect();
    rational_rank(&q, cols)
}

/// Basis of `{x : row · x = 0 for all rows}`.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let (m, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m[i][f].clone();
            }
            x
        })
        .collect()
}

/// Solve `sum_i c_i * basis[i] = target` over Q, if solvable.
pub fn solve_in_span(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = basis.len();
    let dim = target.len();
    // augmented system: rows are coordinates
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|k| {
            let mut r: Vec<Rational> = basis.iter().map(|b| b[k].clone()).collect();
            r.push(target[k].clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&rows, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = m[i][n].clone();
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x >= b`
    Ge,
    /// `a·x > b`
    Gt,
    /// `a·x = b`
    Eq,
}

/// One row `coeffs · x (relation) bound` of a rational linear system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
    pub relation: Relation,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, bound: Rational) -> Self {
        LinearConstraint {
            coeffs,
            bound,
            relation,
        }
    }

    pub fn ge(coeffs: Vec<Rational>, bound: Rational) -> Self {
        Self::new(coeffs, Relation::Ge, bound)
    }

    pub fn gt(coeffs: Vec<Rational>, bound: Rational) -> Self {
        Self::new(coeffs, Relation::Gt, bound)
    }

    pub fn eq(coeffs: Vec<Rational>, bound: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, bound)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = dot_q(&self.coeffs, x);
        match self.relation {
            Relation::Ge => lhs >= self.bound,
            Relation::Gt => lhs > self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }
}

// Inequality `coeffs·x >= bound` (or `>` when strict) used inside elimination.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Ineq {
    coeffs: Vec<Rational>,
    bound: Rational,
    strict: bool,
}

impl Ineq {
    // scale so the first nonzero coefficient has absolute value 1
    fn normalized(mut self) -> Ineq {
        if let Some(first) = self.coeffs.iter().find(|c| !c.is_zero()) {
            let s = first.abs().recip();
            for c in self.coeffs.iter_mut() {
                *c *= &s;
            }
            self.bound *= &s;
        }
        self
    }

    fn trivially_violated(&self) -> Option<bool> {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            let z = Rational::zero();
            Some(if self.strict { z <= self.bound } else { z < self.bound })
        } else {
            None
        }
    }
}

/// Exact feasibility of a rational linear system by Fourier–Motzkin
/// elimination. At most [`MAX_LP_DIM`] variables.
pub fn lp_feasible(constraints: &[LinearConstraint]) -> Result<bool> {
    let Some(first) = constraints.first() else {
        return Ok(true);
    };
    let dim = first.coeffs.len();
    for c in constraints {
        if c.coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.coeffs.len(),
            });
        }
    }
    if dim > MAX_LP_DIM {
        return Err(Error::DimensionGuard {
            what: "linear system",
            dim,
            limit: MAX_LP_DIM,
        });
    }
    let mut system: Vec<Ineq> = Vec::new();
    for c in constraints {
        match c.relation {
            Relation::Ge | Relation::Gt => system.push(Ineq {
                coeffs: c.coeffs.clone(),
                bound: c.bound.clone(),
                strict: c.relation == Relation::Gt,
            }),
            Relation::Eq => {
                system.push(Ineq {
                    coeffs: c.coeffs.clone(),
                    bound: c.bound.clone(),
                    strict: false,
                });
                system.push(Ineq {
                    coeffs: c.coeffs.iter().map(|x| -x).collect(),
                    bound: -c.bound.clone(),
                    strict: false,
                });
            }
        }
    }
    let mut system = tidy(system);
    let Some(mut system) = system.take() else {
        return Ok(false);
    };
    for var in 0..dim {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut rest = Vec::new();
        for ineq in system {
            match ineq.coeffs[var].cmp(&Rational::zero()) {
                Ordering::Greater => lower.push(ineq),
                Ordering::Less => upper.push(ineq),
                Ordering::Equal => rest.push(ineq),
            }
        }
        for lo in &lower {
            for up in &upper {
                // lo: a x_v + ... >= b (a > 0); up: c x_v + ... >= d (c < 0)
                let a = &lo.coeffs[var];
                let c = -&up.coeffs[var];
                let coeffs: Vec<Rational> = lo
                    .coeffs
                    .iter()
                    .zip(&up.coeffs)
                    .map(|(x, y)| x * &c + y * a)
                    .collect();
                rest.push(Ineq {
                    coeffs,
                    bound: &lo.bound * &c + &up.bound * a,
                    strict: lo.strict || up.strict,
                });
            }
        }
        match tidy(rest) {
            Some(s) => system = s,
            None => return Ok(false),
        }
    }
    Ok(true)
}

// Normalize, deduplicate, and drop trivially true rows; `None` if some row is
// trivially violated.
fn tidy(system: Vec<Ineq>) -> Option<Vec<Ineq>> {
    let mut out: Vec<Ineq> = Vec::with_capacity(system.len());
    for ineq in system {
        let ineq = ineq.normalized();
        match ineq.trivially_violated() {
            Some(true) => return None,
            Some(false) => continue,
            None => out.push(ineq),
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}
