use proptest::prelude::*;
use tsing_core::exactalg::FGAbelianGroup;
use tsing_core::grouppres::*;

fn pres(text: &str) -> FinitePresentation {
    FinitePresentation::parse(text).unwrap()
}

fn triangle(a: u32, b: u32, c: u32) -> FinitePresentation {
    let xy = vec!["x y"; c as usize].join(" ");
    pres(&format!("gens: x y\nx^{a}\ny^{b}\n{xy}"))
}

// ---- quaternion tables ----------------------------------------------------

type Quat = [f64; 4];

fn qmul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn close(a: Quat, b: Quat) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
}

/// Closure of unit quaternions with generator positions in the element list.
fn quaternion_table(gens: &[Quat]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut elems: Vec<Quat> = vec![[1.0, 0.0, 0.0, 0.0]];
    let mut i = 0;
    while i < elems.len() {
        for &g in gens {
            let p = qmul(elems[i], g);
            if !elems.iter().any(|&e| close(e, p)) {
                elems.push(p);
            }
        }
        i += 1;
    }
    let find = |q: Quat| elems.iter().position(|&e| close(e, q)).unwrap();
    let table = elems
        .iter()
        .map(|&a| elems.iter().map(|&b| find(qmul(a, b))).collect())
        .collect();
    let gpos = gens.iter().map(|&g| find(g)).collect();
    (table, gpos)
}

fn q8() -> PermutationGroup {
    let (t, g) = quaternion_table(&[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
    assert_eq!(t.len(), 8);
    PermutationGroup::from_cayley_table(&t, &g).unwrap()
}

fn binary_octahedral() -> PermutationGroup {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (t, g) = quaternion_table(&[[s, s, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5]]);
    assert_eq!(t.len(), 48);
    PermutationGroup::from_cayley_table(&t, &g).unwrap()
}

fn table_center(t: &[Vec<usize>]) -> Vec<usize> {
    (0..t.len())
        .filter(|&z| (0..t.len()).all(|x| t[z][x] == t[x][z]))
        .collect()
}

#[test]
fn q8_derived_subgroup_is_center() {
    let (t, _) = quaternion_table(&[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
    let center = table_center(&t);
    assert_eq!(center.len(), 2);
    let g = q8();
    let d = derived_subgroup(&g).unwrap();
    assert_eq!(d.order().unwrap(), center.len());
    // the nontrivial element of D moves 0 to the central element -1
    let image: Vec<usize> = d.generators().iter().map(|p| p[0] as usize).collect();
    assert!(image.iter().all(|x| center.contains(x)));
    assert_eq!(derived_subgroup_by_elements(&g).unwrap().order().unwrap(), 2);
}

#[test]
fn q8_series_and_solvability() {
    let s = derived_series(&q8()).unwrap();
    assert_eq!(
        s.quotients,
        vec![FGAbelianGroup::from_i64(0, &[2, 2]), FGAbelianGroup::from_i64(0, &[2])]
    );
    assert_eq!(s.terminal_order().unwrap(), 1);
    assert!(is_solvable(&q8()).unwrap());
    assert!(!is_perfect(&q8()).unwrap());
}

#[test]
fn q8_jordan_center() {
    let (t, _) = quaternion_table(&[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
    let g = q8();
    let minus_one = table_center(&t).into_iter().find(|&z| z != 0).unwrap();
    let perm: Perm = (0..8).map(|i| t[i][minus_one] as u32).collect();
    let j = jordan_decomposition(&g, &[perm]).unwrap();
    assert_eq!((j.is_normal_abelian, j.rank, j.index), (true, 1, 4));
}

#[test]
fn q8_presentation_matches_table() {
    let p = pres("gens: a b\na^4\na^2 b^-2\nb^-1 a b a");
    let g = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
    assert_eq!(g.order().unwrap(), 8);
    assert_eq!(abelianization(&p), group_abelianization(&q8()).unwrap());
    assert_eq!(
        derived_series(&g).unwrap().quotients,
        derived_series(&q8()).unwrap().quotients
    );
}

#[test]
fn binary_octahedral_series() {
    let g = binary_octahedral();
    let s = derived_series(&g).unwrap();
    let orders: Vec<usize> = s.subgroups.iter().map(|h| h.order().unwrap()).collect();
    assert_eq!(orders, vec![48, 24, 8, 2, 1]);
    assert_eq!(
        s.quotients,
        vec![
            FGAbelianGroup::from_i64(0, &[2]),
            FGAbelianGroup::from_i64(0, &[3]),
            FGAbelianGroup::from_i64(0, &[2, 2]),
            FGAbelianGroup::from_i64(0, &[2]),
        ]
    );
    let d = derived_subgroup(&g).unwrap();
    assert_eq!(derived_subgroup_by_elements(&g).unwrap().order().unwrap(), d.order().unwrap());
}

// ---- icosahedron ------------------------------------------------------------

fn icosahedron_rotations() -> PermutationGroup {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = Vec::new();
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            verts.push([0.0, s1, s2 * phi]);
            verts.push([s1, s2 * phi, 0.0]);
            verts.push([s2 * phi, 0.0, s1]);
        }
    }
    let rot = |axis: [f64; 3], angle: f64| {
        let n = (axis.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        [
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]
    };
    let perm_of = |m: [[f64; 3]; 3]| -> Perm {
        verts
            .iter()
            .map(|v| {
                let w: Vec<f64> = (0..3).map(|r| (0..3).map(|k| m[r][k] * v[k]).sum()).collect();
                verts
                    .iter()
                    .position(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-9))
                    .unwrap() as u32
            })
            .collect()
    };
    let tau = std::f64::consts::TAU;
    let five = perm_of(rot(verts[0], tau / 5.0));
    // half turn about the midpoint of an edge from vertex 0
    let nb = verts
        .iter()
        .skip(1)
        .find(|v| {
            let d: f64 = v.iter().zip(&verts[0]).map(|(a, b)| (a - b) * (a - b)).sum();
            (d - 4.0).abs() < 1e-9
        })
        .unwrap();
    let mid = [verts[0][0] + nb[0], verts[0][1] + nb[1], verts[0][2] + nb[2]];
    let two = perm_of(rot(mid, tau / 2.0));
    PermutationGroup::new(12, vec![two, five]).unwrap()
}

#[test]
fn icosahedral_rotation_order_matches_triangle_235() {
    let oracle = icosahedron_rotations();
    assert_eq!(oracle.order().unwrap(), 60);
    let g = todd_coxeter(&triangle(2, 3, 5), DEFAULT_MAX_COSETS).unwrap();
    assert_eq!(g.order().unwrap(), 60);
    assert!(is_perfect(&g).unwrap());
    assert!(is_perfect(&oracle).unwrap());
    assert!(!is_solvable(&g).unwrap());
}

#[test]
fn binary_icosahedral_is_perfect() {
    let p = pres("gens: x y z\nx^2 y^-3\ny^3 z^-5\nz^5 z^-1 y^-1 x^-1");
    let g = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
    assert_eq!(g.order().unwrap(), 120);
    assert!(is_perfect(&g).unwrap());
    assert!(abelianization(&p).is_trivial());
}

// ---- permutation models of spherical triangle groups -------------------------

fn dihedral_perm(k: usize) -> PermutationGroup {
    let r: Perm = (0..k).map(|i| ((i + 1) % k) as u32).collect();
    let s: Perm = (0..k).map(|i| ((k - i) % k) as u32).collect();
    PermutationGroup::new(k, vec![r, s]).unwrap()
}

#[test]
fn triangle_orders_match_permutation_models() {
    let a4 = PermutationGroup::new(4, vec![vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).unwrap();
    let s4 = PermutationGroup::new(4, vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]]).unwrap();
    let cases = [((2, 3, 3), a4.order().unwrap()), ((2, 3, 4), s4.order().unwrap())];
    for ((a, b, c), expected) in cases {
        let g = todd_coxeter(&triangle(a, b, c), DEFAULT_MAX_COSETS).unwrap();
        assert_eq!(g.order().unwrap(), expected);
    }
    for k in 2..=10 {
        let oracle = if k == 2 {
            // Klein four group
            PermutationGroup::new(4, vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).unwrap()
        } else {
            dihedral_perm(k as usize)
        };
        let g = todd_coxeter(&triangle(2, 2, k), DEFAULT_MAX_COSETS).unwrap();
        assert_eq!(g.order().unwrap(), oracle.order().unwrap(), "k = {k}");
    }
}

#[test]
fn cyclic_two_point_groups() {
    for m in 1..=8u32 {
        for n in 1..=8u32 {
            let p = pres(&format!("gens: x y\nx^{m}\ny^{n}\nx y"));
            let g = todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap();
            assert_eq!(g.order().unwrap() as u32, gcd(m, n));
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn enumeration_is_deterministic() {
    let p = triangle(2, 3, 4);
    assert_eq!(
        todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap(),
        todd_coxeter(&p, DEFAULT_MAX_COSETS).unwrap()
    );
}

#[test]
fn trivial_group_series() {
    let g = PermutationGroup::trivial();
    let s = derived_series(&g).unwrap();
    assert_eq!(s.subgroups.len(), 1);
    assert!(s.quotients.is_empty());
    assert!(s.terminal_perfect);
    assert!(is_solvable(&g).unwrap() && is_perfect(&g).unwrap());
}

// Abelian groups with presentation ⟨a,b | a^m, b^n, [a,b], a^p b^q⟩.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abelianization_agrees_with_concrete_quotient(
        m in 1u32..7, n in 1u32..7, p in -3i32..4, q in -3i32..4,
    ) {
        let text = format!("gens: a b\na^{m}\nb^{n}\na b a^-1 b^-1\na^{p} b^{q}");
        let pr = pres(&text);
        let g = todd_coxeter(&pr, DEFAULT_MAX_COSETS).unwrap();
        let ab = abelianization(&pr);
        prop_assert_eq!(ab.order().unwrap(), num_bigint::BigInt::from(g.order().unwrap()));
        prop_assert_eq!(group_abelianization(&g).unwrap(), ab.clone());
        prop_assert_eq!(abelian_structure(&g).unwrap(), ab);
    }

    #[test]
    fn derived_quotients_multiply_to_order(a in 2u32..4, b in 2u32..4, c in 2u32..6) {
        let mut t = [a, b, c];
        t.sort_unstable();
        prop_assume!(t[0] * t[1] + t[1] * t[2] + t[0] * t[2] > t[0] * t[1] * t[2]);
        let g = todd_coxeter(&triangle(a, b, c), DEFAULT_MAX_COSETS).unwrap();
        let s = derived_series(&g).unwrap();
        let prod: num_bigint::BigInt = s.quotients.iter().map(|q| q.order().unwrap()).product();
        let terminal = s.terminal_order().unwrap();
        prop_assert_eq!(prod * terminal, num_bigint::BigInt::from(g.order().unwrap()));
        let d = derived_subgroup(&g).unwrap();
        prop_assert_eq!(derived_subgroup_by_elements(&g).unwrap().order().unwrap(), d.order().unwrap());
    }
}
