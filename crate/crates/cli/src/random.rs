//! Seeded random proper klt divisors for property tests and corpus growth.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsing_core::exactalg::{Int, Rational};
use tsing_core::pdiv::{is_klt, is_proper, point_mark, Mark, P1Point, PolyhedralDivisor};
use tsing_core::polyhedra::{Cone, SigmaPolyhedron};

/// Multiplicity patterns drawn from; all are klt.
pub const TRIPLES: [[u64; 3]; 8] = [
    [1, 1, 1],
    [2, 2, 2],
    [3, 2, 2],
    [3, 3, 2],
    [4, 3, 2],
    [5, 3, 2],
    [4, 6, 1],
    [5, 5, 1],
];

fn tail_cone(rng: &mut ChaCha8Rng, rank: usize) -> Cone {
    if rank == 1 || rng.gen_bool(0.5) {
        return Cone::orthant(rank);
    }
    // e_1 .. e_{r-1} and (1, .., 1, m): simplicial, singular for m > 1
    let m = rng.gen_range(1..=3i64);
    let mut rays: Vec<Vec<Int>> = (0..rank - 1)
        .map(|i| (0..rank).map(|j| Int::from((i == j) as i64)).collect())
        .collect();
    rays.push((0..rank).map(|j| Int::from(if j + 1 == rank { m } else { 1 })).collect());
    Cone::new(rank, rays).expect("simplicial cone")
}

fn random_vertex(rng: &mut ChaCha8Rng, rank: usize, mu: u64) -> Vec<Rational> {
    let den = mu as i64;
    let first = loop {
        let k = rng.gen_range(-2 * den..=2 * den);
        if k.gcd(&den) == 1 {
            break k;
        }
    };
    (0..rank)
        .map(|i| {
            let n = if i == 0 { first } else { rng.gen_range(-den..=den) };
            Rational::new(Int::from(n), Int::from(den))
        })
        .collect()
}

fn shifted(mark: &Mark, shift: &[Int], k: i64) -> Mark {
    let vs = mark
        .polyhedron
        .vertices()
        .iter()
        .map(|v| {
            v.iter()
                .zip(shift)
                .map(|(x, s)| x + Rational::from_integer(s * Int::from(k)))
                .collect()
        })
        .collect();
    Mark {
        point: mark.point.clone(),
        polyhedron: SigmaPolyhedron::new(vs, mark.polyhedron.recession_cone().clone())
            .expect("shifted polyhedron"),
    }
}

/// One attempt; `None` if no lattice shift of the first mark makes it proper.
pub fn try_random_divisor(rng: &mut ChaCha8Rng) -> Option<PolyhedralDivisor> {
    let rank = rng.gen_range(1..=3usize);
    let sigma = tail_cone(rng, rank);
    let mut mus: Vec<u64> = TRIPLES.choose(rng).expect("nonempty").to_vec();
    mus.retain(|&m| m > 1);
    // sometimes a point with multiplicity one; always one if all are trivial
    let extra = rng.gen_range(0..=1usize) + usize::from(mus.is_empty());
    mus.extend(std::iter::repeat_n(1, extra));
    mus.shuffle(rng);
    let mut points = vec![
        P1Point::finite(Rational::from_integer(Int::from(0))),
        P1Point::infinity(),
        P1Point::finite(Rational::from_integer(Int::from(1))),
        P1Point::finite(Rational::from_integer(Int::from(2))),
        P1Point::finite(Rational::new(Int::from(-1), Int::from(2))),
    ];
    points.shuffle(rng);
    let mut marks = Vec::new();
    for (p, &mu) in points.into_iter().zip(&mus) {
        let v = random_vertex(rng, rank, mu);
        let mut vs = vec![v.clone()];
        if rank >= 2 && rng.gen_bool(0.3) {
            let mut w = v;
            w[0] -= Rational::from_integer(Int::from(1));
            w[1] += Rational::from_integer(Int::from(1));
            vs.push(w);
        }
        marks.push(Mark {
            point: p,
            polyhedron: SigmaPolyhedron::new(vs, sigma.clone()).ok()?,
        });
    }
    if marks.is_empty() {
        marks.push(point_mark(P1Point::infinity(), vec![Rational::from_integer(Int::from(0)); rank], &sigma).ok()?);
    }
    let shift: Vec<Int> = (0..rank)
        .map(|j| sigma.rays().iter().map(|r| r[j].clone()).sum())
        .collect();
    for k in -6..=12 {
        let mut ms = marks.clone();
        ms[0] = shifted(&marks[0], &shift, k);
        let d = PolyhedralDivisor::new(sigma.clone(), ms).ok()?;
        if is_proper(&d).ok()? {
            return is_klt(&d).ok()?.is_klt.then_some(d);
        }
    }
    None
}

/// `count` proper klt divisors, reproducible from `seed`.
pub fn random_klt_divisors(seed: u64, count: usize) -> Vec<PolyhedralDivisor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(d) = try_random_divisor(&mut rng) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_valid() {
        let a = random_klt_divisors(7, 6);
        assert_eq!(a, random_klt_divisors(7, 6));
        for d in &a {
            assert!(is_proper(d).unwrap());
            assert!(is_klt(d).unwrap().is_klt);
        }
    }
}
