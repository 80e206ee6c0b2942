//! Finite presentations, coset enumeration and concrete finite groups.
//!
//! Permutations act on the right: `mul(a, b)` applies `a` first.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{cokernel, FGAbelianGroup, Int, IntMatrix};

pub const DEFAULT_MAX_COSETS: usize = 200_000;
/// Limit on materialized element counts.
pub const MAX_ELEMENTS: usize = 1_000_000;
/// Limit on `elements * degree` when storing full permutations.
pub const MAX_ELEMENT_ENTRIES: usize = 50_000_000;

/// A word as a list of `(generator index, exponent)`.
pub type Word = Vec<(usize, i64)>;

/// Free reduction: merges adjacent powers of the same generator.
pub fn free_reduce(w: &[(usize, i64)]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &(g, e) in w {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

pub fn inverse_word(w: &[(usize, i64)]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// `x y x^-1 y^-1`.
pub fn commutator_word(x: &[(usize, i64)], y: &[(usize, i64)]) -> Word {
    let mut w: Word = x.to_vec();
    w.extend_from_slice(y);
    w.extend(inverse_word(x));
    w.extend(inverse_word(y));
    free_reduce(&w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl FinitePresentation {
    /// Relators are freely reduced; trivial ones are dropped.
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        let n = generator_names.len();
        for (i, name) in generator_names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Invalid(format!("bad generator name {name:?}")));
            }
            if generator_names[..i].contains(name) {
                return Err(Error::Invalid(format!("generator {name} listed twice")));
            }
        }
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            if let Some(&(g, _)) = r.iter().find(|(g, _)| *g >= n) {
                return Err(Error::Invalid(format!("generator index {g} out of range")));
            }
            let r = free_reduce(&r);
            if !r.is_empty() {
                rels.push(r);
            }
        }
        Ok(FinitePresentation {
            generator_names,
            relators: rels,
        })
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Parses `gens: a b c` followed by one relator per line, e.g. `a^2 b^-1 a b`.
    /// Blank lines and `#` comments are ignored; `1` is the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Invalid(format!("line {}: {msg}", lineno + 1));
            match &names {
                None => {
                    let rest = line
                        .strip_prefix("gens:")
                        .ok_or_else(|| err("expected `gens:` header".into()))?;
                    names = Some(rest.split_whitespace().map(str::to_string).collect());
                }
                Some(gens) => {
                    let mut word = Word::new();
                    for tok in line.split_whitespace() {
                        if tok == "1" {
                            continue;
                        }
                        let (name, exp) = match tok.split_once('^') {
                            Some((n, e)) => (
                                n,
                                e.parse::<i64>()
                                    .map_err(|_| err(format!("bad exponent in {tok:?}")))?,
                            ),
                            None => (tok, 1),
                        };
                        let g = gens
                            .iter()
                            .position(|x| x == name)
                            .ok_or_else(|| err(format!("unknown generator {name:?}")))?;
                        word.push((g, exp));
                    }
                    relators.push(word);
                }
            }
        }
        let names = names.ok_or_else(|| Error::Invalid("missing `gens:` header".into()))?;
        FinitePresentation::new(names, relators)
    }

    pub fn format_word(&self, w: &[(usize, i64)]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| {
                if e == 1 {
                    self.generator_names[g].clone()
                } else {
                    format!("{}^{}", self.generator_names[g], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Exponent sums: one row per generator, one column per relator.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let n = self.generator_count();
        let cols: Vec<Vec<Int>> = self
            .relators
            .iter()
            .map(|r| {
                let mut v = vec![Int::zero(); n];
                for &(g, e) in r {
                    v[g] += e;
                }
                v
            })
            .collect();
        IntMatrix::from_columns(n, &cols)
    }
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens:")?;
        for n in &self.generator_names {
            write!(f, " {n}")?;
        }
        writeln!(f)?;
        for r in &self.relators {
            writeln!(f, "{}", self.format_word(r))?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Abelianized presentation: cokernel of the exponent matrix.
pub fn abelianization(p: &FinitePresentation) -> FGAbelianGroup {
    cokernel(&p.exponent_matrix())
}

// ---------------------------------------------------------------------------
// Coset enumeration

const NONE: usize = usize::MAX;

struct CosetTable {
    cols: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    live: usize,
    max_live: usize,
    max_total: usize,
}

impl CosetTable {
    fn new(ngens: usize, max_live: usize) -> Self {
        let cols = 2 * ngens;
        CosetTable {
            cols,
            table: vec![NONE; cols],
            parent: vec![0],
            live: 1,
            max_live,
            max_total: max_live.saturating_mul(16).max(1024),
        }
    }

    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.cols + x]
    }

    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c * self.cols + x] = d;
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn total(&self) -> usize {
        self.parent.len()
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.live >= self.max_live || self.total() >= self.max_total {
            return Err(Error::CosetOverflow {
                limit: self.max_live,
            });
        }
        let d = self.total();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.cols));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill] = keep;
        self.live -= 1;
        queue.push(kill);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                self.set(f, x ^ 1, NONE);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let ex = self.get(e1, x);
                if ex != NONE {
                    self.merge(f1, ex, &mut queue);
                } else {
                    let fx = self.get(f1, x ^ 1);
                    if fx != NONE {
                        self.merge(e1, fx, &mut queue);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Scans `w` at coset `c`; fills gaps by new definitions when `define` is set.
    fn scan(&mut self, c: usize, w: &[usize], define: bool) -> Result<()> {
        let n = w.len();
        if n == 0 {
            return Ok(());
        }
        let mut f = c;
        let mut i = 0;
        let mut b = c;
        let mut j = n;
        loop {
            while i < j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, w[j - 1] ^ 1) != NONE {
                b = self.get(b, w[j - 1] ^ 1);
                j -= 1;
            }
            if j < i + 1 {
                // fronts met
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            if !define {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn lookahead(&mut self, relators: &[Vec<usize>]) -> Result<()> {
        let mut c = 0;
        while c < self.total() {
            if self.is_live(c) {
                for r in relators {
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan(c, r, false)?;
                }
            }
            c += 1;
        }
        Ok(())
    }
}

fn expand_word(w: &[(usize, i64)]) -> Vec<usize> {
    let mut out = Vec::new();
    for &(g, e) in w {
        let col = if e > 0 { 2 * g } else { 2 * g + 1 };
        out.extend(std::iter::repeat_n(col, e.unsigned_abs() as usize));
    }
    out
}

/// Permutation action of the generators on the cosets of `⟨subgroup⟩`.
pub fn coset_action(
    p: &FinitePresentation,
    subgroup: &[Word],
    max_cosets: usize,
) -> Result<PermutationGroup> {
    let ngens = p.generator_count();
    let relators: Vec<Vec<usize>> = p.relators.iter().map(|r| expand_word(r)).collect();
    let mut ct = CosetTable::new(ngens, max_cosets.max(1));
    for h in subgroup {
        let w = expand_word(&free_reduce(h));
        scan_with_retry(&mut ct, 0, &w, &relators)?;
    }
    let mut c = 0;
    while c < ct.total() {
        if ct.is_live(c) {
            for r in &relators {
                if !ct.is_live(c) {
                    break;
                }
                scan_with_retry(&mut ct, c, r, &relators)?;
            }
            for x in 0..ct.cols {
                if !ct.is_live(c) {
                    break;
                }
                if ct.get(c, x) == NONE {
                    define_with_retry(&mut ct, c, x, &relators)?;
                }
            }
        }
        c += 1;
    }
    // compact live cosets in index order
    let mut index = vec![NONE; ct.total()];
    let mut live = Vec::new();
    for c in 0..ct.total() {
        if ct.is_live(c) {
            index[c] = live.len();
            live.push(c);
        }
    }
    let degree = live.len();
    let mut gens = Vec::with_capacity(ngens);
    for g in 0..ngens {
        let mut perm = vec![0u32; degree];
        for (i, &c) in live.iter().enumerate() {
            let d = ct.get(c, 2 * g);
            let d = ct.rep(d);
            perm[i] = index[d] as u32;
        }
        gens.push(perm);
    }
    Ok(PermutationGroup {
        degree,
        generators: gens,
        semiregular: subgroup.iter().all(|h| free_reduce(h).is_empty()),
    })
}

fn scan_with_retry(
    ct: &mut CosetTable,
    c: usize,
    w: &[usize],
    relators: &[Vec<usize>],
) -> Result<()> {
    match ct.scan(c, w, true) {
        Err(Error::CosetOverflow { .. }) => {
            ct.lookahead(relators)?;
            let c = ct.rep(c);
            ct.scan(c, w, true)
        }
        other => other,
    }
}

fn define_with_retry(
    ct: &mut CosetTable,
    c: usize,
    x: usize,
    relators: &[Vec<usize>],
) -> Result<()> {
    match ct.define(c, x) {
        Err(Error::CosetOverflow { .. }) => {
            ct.lookahead(relators)?;
            if ct.is_live(c) && ct.get(c, x) == NONE {
                ct.define(c, x)
            } else {
                Ok(())
            }
        }
        other => other,
    }
}

/// Regular permutation representation of the presented group.
pub fn todd_coxeter(p: &FinitePresentation, max_cosets: usize) -> Result<PermutationGroup> {
    coset_action(p, &[], max_cosets)
}

/// Index of `⟨subgroup⟩` in the presented group.
pub fn subgroup_index(
    p: &FinitePresentation,
    subgroup: &[Word],
    max_cosets: usize,
) -> Result<usize> {
    Ok(coset_action(p, subgroup, max_cosets)?.degree())
}

// ---------------------------------------------------------------------------
// Permutation groups

pub type Perm = Vec<u32>;

pub fn identity_perm(n: usize) -> Perm {
    (0..n as u32).collect()
}

/// `a` then `b`.
pub fn perm_mul(a: &[u32], b: &[u32]) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn perm_inv(a: &[u32]) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// `g^-1 h g`.
pub fn perm_conj(h: &[u32], g: &[u32]) -> Perm {
    perm_mul(&perm_mul(&perm_inv(g), h), g)
}

/// `x^-1 y^-1 x y`.
pub fn perm_comm(x: &[u32], y: &[u32]) -> Perm {
    perm_mul(&perm_mul(&perm_inv(x), &perm_inv(y)), &perm_mul(x, y))
}

fn is_identity(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &x)| x as usize == i)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Perm>,
    // every point stabilizer is trivial (subgroups of a regular representation)
    semiregular: bool,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if g.len() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    found: g.len(),
                });
            }
            let mut seen = vec![false; degree];
            for &x in g {
                let x = x as usize;
                if x >= degree || seen[x] {
                    return Err(Error::Invalid("generator is not a bijection".into()));
                }
                seen[x] = true;
            }
        }
        Ok(PermutationGroup {
            degree,
            generators,
            semiregular: false,
        })
    }

    pub fn trivial() -> Self {
        PermutationGroup {
            degree: 1,
            generators: Vec::new(),
            semiregular: true,
        }
    }

    /// Group from a multiplication table `table[i][j] = i*j` over `0..n`,
    /// generated by the listed elements; realized in its right regular action.
    pub fn from_cayley_table(table: &[Vec<usize>], generators: &[usize]) -> Result<Self> {
        let n = table.len();
        let gens = generators
            .iter()
            .map(|&g| (0..n).map(|i| table[i][g] as u32).collect())
            .collect();
        let mut g = PermutationGroup::new(n, gens)?;
        g.semiregular = true;
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn is_semiregular(&self) -> bool {
        self.semiregular
    }

    /// Image of a word in the generators.
    pub fn evaluate_word(&self, w: &[(usize, i64)]) -> Perm {
        let mut acc = identity_perm(self.degree);
        for &(g, e) in w {
            let base = if e >= 0 {
                self.generators[g].clone()
            } else {
                perm_inv(&self.generators[g])
            };
            for _ in 0..e.unsigned_abs() {
                acc = perm_mul(&acc, &base);
            }
        }
        acc
    }

    fn orbit_of(&self, gens: &[Perm], start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.degree];
        if self.degree == 0 {
            return seen;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = g[x] as usize;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Materialized element list, identity first, in breadth-first order.
    pub fn elements(&self) -> Result<Vec<Perm>> {
        let id = identity_perm(self.degree);
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut list = vec![id];
        let mut i = 0;
        while i < list.len() {
            for g in &self.generators {
                let p = perm_mul(&list[i], g);
                if seen.insert(p.clone()) {
                    list.push(p);
                    if list.len() > MAX_ELEMENTS
                        || list.len().saturating_mul(self.degree.max(1)) > MAX_ELEMENT_ENTRIES
                    {
                        return Err(Error::SizeGuard(format!(
                            "more than {} elements of degree {}",
                            list.len() - 1,
                            self.degree
                        )));
                    }
                }
            }
            i += 1;
        }
        Ok(list)
    }

    pub fn order(&self) -> Result<usize> {
        if self.semiregular {
            Ok(self.orbit_of(&self.generators, 0).iter().filter(|&&b| b).count().max(1))
        } else {
            Ok(self.elements()?.len())
        }
    }

    /// The same group in its right regular action on its own elements.
    pub fn to_regular(&self) -> Result<PermutationGroup> {
        if self.semiregular {
            return Ok(self.clone());
        }
        let elems = self.elements()?;
        let index: HashMap<&Perm, u32> =
            elems.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let gens = self
            .generators
            .iter()
            .map(|g| elems.iter().map(|e| index[&perm_mul(e, g)]).collect())
            .collect();
        Ok(PermutationGroup {
            degree: elems.len(),
            generators: gens,
            semiregular: true,
        })
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators[..i]
                .iter()
                .all(|b| perm_mul(a, b) == perm_mul(b, a))
        })
    }

    fn subgroup(&self, gens: Vec<Perm>) -> PermutationGroup {
        PermutationGroup {
            degree: self.degree,
            generators: gens,
            semiregular: self.semiregular,
        }
    }
}

/// Normal closure of `seeds` under conjugation by `ambient` (semiregular only).
fn normal_closure(g: &PermutationGroup, seeds: Vec<Perm>) -> PermutationGroup {
    debug_assert!(g.semiregular);
    let mut gens: Vec<Perm> = Vec::new();
    let mut orbit = g.orbit_of(&gens, 0);
    let mut queue: VecDeque<Perm> = seeds.into();
    while let Some(h) = queue.pop_front() {
        if g.degree == 0 || orbit[h[0] as usize] {
            continue;
        }
        for a in &g.generators {
            queue.push_back(perm_conj(&h, a));
        }
        gens.push(h);
        orbit = g.orbit_of(&gens, 0);
    }
    g.subgroup(gens)
}

/// Commutator subgroup, as the normal closure of generator commutators.
pub fn derived_subgroup(g: &PermutationGroup) -> Result<PermutationGroup> {
    let g = g.to_regular()?;
    let mut seeds = Vec::new();
    for (i, a) in g.generators.iter().enumerate() {
        for b in &g.generators[..i] {
            let c = perm_comm(a, b);
            if !is_identity(&c) {
                seeds.push(c);
            }
        }
    }
    Ok(normal_closure(&g, seeds))
}

/// Commutator subgroup as the plain closure of all element commutators.
/// Quadratic in `|G|`; used to cross-check [`derived_subgroup`].
pub fn derived_subgroup_by_elements(g: &PermutationGroup) -> Result<PermutationGroup> {
    let g = g.to_regular()?;
    let elems = PermutationGroup {
        degree: g.degree,
        generators: g.generators.clone(),
        semiregular: false,
    }
    .elements()?;
    if elems.len() > 2_000 {
        return Err(Error::SizeGuard(format!("{} elements", elems.len())));
    }
    let inverses: Vec<Perm> = elems.iter().map(|e| perm_inv(e)).collect();
    // in a semiregular group an element is determined by the image of 0
    let mut by_image: Vec<Option<usize>> = vec![None; g.degree];
    for (i, e) in elems.iter().enumerate() {
        by_image[e[0] as usize] = Some(i);
    }
    let mut hit = vec![false; g.degree];
    let mut gens = Vec::new();
    for x in 0..elems.len() {
        for y in 0..elems.len() {
            let p = inverses[x][0] as usize;
            let p = inverses[y][p] as usize;
            let p = elems[x][p] as usize;
            let p = elems[y][p] as usize;
            if p != 0 && !hit[p] {
                hit[p] = true;
                gens.push(elems[by_image[p].expect("element")].clone());
            }
        }
    }
    Ok(g.subgroup(gens))
}

/// Structure of `G/N` for `N` normal in `G` with `G/N` abelian, both acting
/// semiregularly on the same points; generators of the quotient are the
/// images of `G`'s generators.
fn abelian_quotient(g: &PermutationGroup, n: &PermutationGroup) -> FGAbelianGroup {
    let m = g.generators.len();
    let in_g = g.orbit_of(&g.generators, 0);
    // N-orbit labels on the points of G's orbit
    let mut label = vec![NONE; g.degree];
    let mut blocks = 0;
    for start in 0..g.degree {
        if !in_g[start] || label[start] != NONE {
            continue;
        }
        label[start] = blocks;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for h in &n.generators {
                let y = h[x] as usize;
                if label[y] == NONE {
                    label[y] = blocks;
                    queue.push_back(y);
                }
            }
        }
        blocks += 1;
    }
    // spanning tree over blocks, collecting cycle relations
    let mut rep_point = vec![NONE; blocks];
    let mut coord: Vec<Option<Vec<i64>>> = vec![None; blocks];
    rep_point[label[0]] = 0;
    coord[label[0]] = Some(vec![0; m]);
    let mut relations: Vec<Vec<Int>> = Vec::new();
    let mut queue = VecDeque::from([label[0]]);
    while let Some(b) = queue.pop_front() {
        let x = rep_point[b];
        let cb = coord[b].clone().expect("visited");
        for (i, gen) in g.generators.iter().enumerate() {
            let t = label[gen[x] as usize];
            let mut c = cb.clone();
            c[i] += 1;
            match &coord[t] {
                Some(ct) => {
                    let rel: Vec<Int> = c.iter().zip(ct).map(|(a, b)| Int::from(a - b)).collect();
                    if rel.iter().any(|v| !v.is_zero()) {
                        relations.push(rel);
                    }
                }
                None => {
                    rep_point[t] = gen[x] as usize;
                    coord[t] = Some(c);
                    queue.push_back(t);
                }
            }
        }
    }
    cokernel(&IntMatrix::from_columns(m, &relations))
}

/// Structure of an abelian group given concretely.
pub fn abelian_structure(g: &PermutationGroup) -> Result<FGAbelianGroup> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let g = g.to_regular()?;
    let trivial = g.subgroup(Vec::new());
    Ok(abelian_quotient(&g, &trivial))
}

/// `G/[G,G]` of a concrete group.
pub fn group_abelianization(g: &PermutationGroup) -> Result<FGAbelianGroup> {
    let g = g.to_regular()?;
    let d = derived_subgroup(&g)?;
    Ok(abelian_quotient(&g, &d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSeries {
    /// `D_0 ⊋ D_1 ⊋ … ⊋ D_k` with `D_k = [D_k, D_k]`.
    pub subgroups: Vec<PermutationGroup>,
    /// `D_i / D_{i+1}`.
    pub quotients: Vec<FGAbelianGroup>,
    pub terminal_perfect: bool,
}

impl DerivedSeries {
    pub fn length(&self) -> usize {
        self.quotients.len()
    }

    pub fn terminal(&self) -> &PermutationGroup {
        self.subgroups.last().expect("nonempty series")
    }

    pub fn terminal_order(&self) -> Result<usize> {
        self.terminal().order()
    }
}

pub fn derived_series(g: &PermutationGroup) -> Result<DerivedSeries> {
    let mut current = g.to_regular()?;
    let mut order = current.order()?;
    let mut subgroups = Vec::new();
    let mut quotients = Vec::new();
    loop {
        let next = derived_subgroup(&current)?;
        let next_order = next.order()?;
        if next_order == order {
            subgroups.push(current);
            break;
        }
        quotients.push(abelian_quotient(&current, &next));
        subgroups.push(current);
        current = next;
        order = next_order;
    }
    Ok(DerivedSeries {
        subgroups,
        quotients,
        terminal_perfect: true,
    })
}

pub fn is_perfect(g: &PermutationGroup) -> Result<bool> {
    let d = derived_subgroup(g)?;
    Ok(d.order()? == g.order()?)
}

pub fn is_solvable(g: &PermutationGroup) -> Result<bool> {
    Ok(derived_series(g)?.terminal_order()? == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanData {
    pub is_normal_abelian: bool,
    /// Minimal number of generators of the abelian subgroup.
    pub rank: usize,
    pub index: usize,
    pub structure: FGAbelianGroup,
}

/// Checks that `⟨a_generators⟩` is a normal abelian subgroup of `G` and
/// reports its rank and index.
pub fn jordan_decomposition(g: &PermutationGroup, a_generators: &[Perm]) -> Result<JordanData> {
    let (g, a_gens) = if g.semiregular {
        (g.clone(), a_generators.to_vec())
    } else {
        let elems = g.elements()?;
        let index: HashMap<&Perm, u32> =
            elems.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let mapped = a_generators
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|e| {
                        index
                            .get(&perm_mul(e, a))
                            .copied()
                            .ok_or_else(|| Error::Invalid("element not in group".into()))
                    })
                    .collect::<Result<Perm>>()
            })
            .collect::<Result<Vec<_>>>()?;
        (g.to_regular()?, mapped)
    };
    let a = g.subgroup(a_gens);
    if !a.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let orbit = g.orbit_of(&a.generators, 0);
    for h in &a.generators {
        for x in &g.generators {
            if !orbit[perm_conj(h, x)[0] as usize] {
                return Err(Error::NotNormal);
            }
        }
    }
    let structure = abelian_quotient(&a, &a.subgroup(Vec::new()));
    let a_order = orbit.iter().filter(|&&b| b).count().max(1);
    Ok(JordanData {
        is_normal_abelian: true,
        rank: structure.rank(),
        index: g.order()? / a_order,
        structure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(text: &str) -> FinitePresentation {
        FinitePresentation::parse(text).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p = pres("gens: a b\n# comment\na^2\nb^-1 a b a\n");
        assert_eq!(p.relators(), &[vec![(0, 2)], vec![(1, -1), (0, 1), (1, 1), (0, 1)]]);
        assert_eq!(pres(&p.to_string()), p);
        assert!(FinitePresentation::parse("a^2").is_err());
        assert!(FinitePresentation::parse("gens: a\nc").is_err());
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[(0, 2), (0, -2), (1, 1)]), vec![(1, 1)]);
        assert_eq!(commutator_word(&[(0, 1)], &[(0, 1)]), Vec::<(usize, i64)>::new());
    }

    #[test]
    fn small_orders() {
        assert_eq!(todd_coxeter(&pres("gens: a\na^7"), 1000).unwrap().order().unwrap(), 7);
        let v4 = pres("gens: a b\na b a^-1 b^-1\na^2\nb^2");
        assert_eq!(todd_coxeter(&v4, 1000).unwrap().degree(), 4);
        let i = pres("gens: a b\na^2\nb^3\na b a b a b a b a b");
        assert_eq!(todd_coxeter(&i, 1000).unwrap().degree(), 60);
        let empty = FinitePresentation::new(vec![], vec![]).unwrap();
        assert_eq!(todd_coxeter(&empty, 10).unwrap().degree(), 1);
    }

    #[test]
    fn overflow_on_infinite_group() {
        let z2 = pres("gens: a b\na b a^-1 b^-1");
        assert_eq!(
            todd_coxeter(&z2, 500),
            Err(Error::CosetOverflow { limit: 500 })
        );
    }

    #[test]
    fn subgroup_index_of_cyclic() {
        let s3 = pres("gens: a b\na^3\nb^2\na b a b");
        assert_eq!(subgroup_index(&s3, &[vec![(0, 1)]], 100).unwrap(), 2);
        assert_eq!(subgroup_index(&s3, &[vec![(1, 1)]], 100).unwrap(), 3);
    }

    #[test]
    fn abelianizations() {
        assert_eq!(abelianization(&pres("gens: a b\na b a^-1 b^-1")), FGAbelianGroup::free(2));
        let q8 = pres("gens: a b\na^4\na^2 b^-2\nb^-1 a b a");
        assert_eq!(abelianization(&q8), FGAbelianGroup::from_i64(0, &[2, 2]));
        let i = pres("gens: a b\na^2\nb^3\na b a b a b a b a b");
        assert!(abelianization(&i).is_trivial());
        let g = todd_coxeter(&q8, 100).unwrap();
        assert_eq!(group_abelianization(&g).unwrap(), abelianization(&q8));
    }

    #[test]
    fn a5_on_five_points() {
        let g = PermutationGroup::new(5, vec![vec![1, 2, 0, 3, 4], vec![0, 1, 3, 4, 2]]).unwrap();
        assert_eq!(g.order().unwrap(), 60);
        assert!(is_perfect(&g).unwrap());
        assert!(!is_solvable(&g).unwrap());
        assert_eq!(derived_subgroup(&g).unwrap().order().unwrap(), 60);
    }

    #[test]
    fn jordan_small() {
        let z6 = todd_coxeter(&pres("gens: a\na^6"), 100).unwrap();
        let j = jordan_decomposition(&z6, z6.generators()).unwrap();
        assert_eq!((j.rank, j.index), (1, 1));
        // S3: a of order 3 generates A3
        let s3 = todd_coxeter(&pres("gens: a b\na^3\nb^2\na b a b"), 100).unwrap();
        let j = jordan_decomposition(&s3, &[s3.generators()[0].clone()]).unwrap();
        assert_eq!((j.rank, j.index), (1, 2));
        assert_eq!(
            jordan_decomposition(&s3, &[s3.generators()[1].clone()]),
            Err(Error::NotNormal)
        );
        assert_eq!(
            jordan_decomposition(&s3, s3.generators()),
            Err(Error::NotAbelian)
        );
    }
}
