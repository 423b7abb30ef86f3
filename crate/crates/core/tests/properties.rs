use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use horofano::enumerate::{canonical_form, enumerate_toric, ToricClass};
use horofano::exactal::{self, det_lattice, primitive, solve_linear, sublattice_direct_sum, LatticeVector};
use horofano::instance::InstanceFile;
use horofano::polytope::{affine_facets, FacetedPolytope, RationalPolytope};
use horofano::report::{analyze, Outcome};
use horofano::{Rational, SmallRational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn polygons() -> &'static [ToricClass] {
    static CELL: OnceLock<Vec<ToricClass>> = OnceLock::new();
    CELL.get_or_init(|| enumerate_toric(2, 2))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ratio() -> impl Strategy<Value = (i64, i64)> {
    (-1000i64..1000, 1i64..200)
}

fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector::from_i64s(v)
}

/// Random element of SL(2, Z) as a product of elementary moves.
fn unimodular2() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::collection::vec((0u8..4, -2i64..=2), 0..6).prop_map(|moves| {
        let mut m = [[1i64, 0], [0, 1]];
        for (kind, k) in moves {
            let e = match kind {
                0 => [[1, k], [0, 1]],
                1 => [[1, 0], [k, 1]],
                2 => [[0, -1], [1, 0]],
                _ => [[-1, 0], [0, 1]],
            };
            m = [
                [m[0][0] * e[0][0] + m[0][1] * e[1][0], m[0][0] * e[0][1] + m[0][1] * e[1][1]],
                [m[1][0] * e[0][0] + m[1][1] * e[1][0], m[1][0] * e[0][1] + m[1][1] * e[1][1]],
            ];
        }
        m
    })
}

fn apply2(m: &[[i64; 2]; 2], v: &[i64]) -> Vec<i64> {
    vec![m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// The hull vertices of `points`, or `None` when the origin is not interior.
fn hull(points: Vec<Vec<i64>>, dim: usize) -> Option<FacetedPolytope<Rational>> {
    let pts: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| p.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if exactal::rank(&pts) < dim {
        return None;
    }
    let facets = affine_facets(&pts, dim);
    if facets.iter().any(|f| !f.offset.is_negative()) {
        return None;
    }
    let verts: Vec<Vec<Rational>> = (0..pts.len())
        .filter(|&i| {
            let rows: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|f| f.vertices.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            exactal::rank(&rows) == dim
        })
        .map(|i| pts[i].clone())
        .collect();
    RationalPolytope::new(dim, verts).ok()?.with_facets().ok()
}

fn points(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), dim + 1..dim + 7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_arithmetic_matches_cross_multiplication(a in ratio(), b in ratio()) {
        let (x, y) = (q(a.0, a.1), q(b.0, b.1));
        let big = |v: i64| BigInt::from(v);
        // p/q = r/s  iff  p s = r q
        let same = |r: &Rational, n: BigInt, d: BigInt| r.numer() * &d == n * r.denom();
        prop_assert!(same(&(x.clone() + y.clone()), big(a.0) * big(b.1) + big(b.0) * big(a.1), big(a.1) * big(b.1)));
        prop_assert!(same(&(x.clone() - y.clone()), big(a.0) * big(b.1) - big(b.0) * big(a.1), big(a.1) * big(b.1)));
        prop_assert!(same(&(x.clone() * y.clone()), big(a.0) * big(b.0), big(a.1) * big(b.1)));
        if b.0 != 0 {
            prop_assert!(same(&(x.clone() / y.clone()), big(a.0) * big(b.1), big(a.1) * big(b.0)));
        }
        prop_assert_eq!(x < y, big(a.0) * big(b.1) < big(b.0) * big(a.1));
        prop_assert!(x.denom().is_positive());
        prop_assert!(num_integer::Integer::gcd(x.numer(), x.denom()).is_one());
    }

    #[test]
    fn primitive_ignores_positive_scaling(v in prop::collection::vec(ratio(), 1..5), k in ratio()) {
        prop_assume!(v.iter().any(|x| x.0 != 0) && k.0 != 0);
        let v: Vec<Rational> = v.iter().map(|x| q(x.0, x.1)).collect();
        let k = q(k.0.abs(), k.1);
        let scaled: Vec<Rational> = v.iter().map(|x| x * &k).collect();
        let p = primitive(&v).unwrap();
        prop_assert_eq!(&primitive(&scaled).unwrap(), &p);
        let g = p.0.iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
        prop_assert!(g.is_one());
    }

    #[test]
    fn det_is_alternating_and_multilinear(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3),
        extra in prop::collection::vec(-5i64..=5, 3),
        k in -4i64..=4,
    ) {
        let d = det_lattice(&rows.iter().map(|r| lv(r)).collect::<Vec<_>>());
        let swapped = [rows[1].clone(), rows[0].clone(), rows[2].clone()];
        prop_assert_eq!(det_lattice(&swapped.iter().map(|r| lv(r)).collect::<Vec<_>>()), -d.clone());
        let repeated = [rows[0].clone(), rows[0].clone(), rows[2].clone()];
        prop_assert!(det_lattice(&repeated.iter().map(|r| lv(r)).collect::<Vec<_>>()).is_zero());
        let combo: Vec<i64> = rows[0].iter().zip(&extra).map(|(a, b)| k * a + b).collect();
        let lhs = det_lattice(&[lv(&combo), lv(&rows[1]), lv(&rows[2])]);
        let other = det_lattice(&[lv(&extra), lv(&rows[1]), lv(&rows[2])]);
        prop_assert_eq!(lhs, BigInt::from(k) * d + other);
    }

    #[test]
    fn solutions_satisfy_the_system(
        a in prop::collection::vec(prop::collection::vec(ratio(), 3), 3),
        b in prop::collection::vec(ratio(), 3),
    ) {
        let a: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|x| q(x.0, x.1)).collect()).collect();
        let b: Vec<Rational> = b.iter().map(|x| q(x.0, x.1)).collect();
        match solve_linear(&a, &b) {
            Ok(x) => {
                for (row, rhs) in a.iter().zip(&b) {
                    prop_assert_eq!(&exactal::dot(row, &x), rhs);
                }
            }
            Err(_) => prop_assert!(exactal::rank(&a) < 3),
        }
    }

    #[test]
    fn unimodular_rows_split_directly(m in unimodular2(), k in 2i64..5) {
        let rows = [lv(&m[0]), lv(&m[1])];
        prop_assert!(sublattice_direct_sum(&[vec![rows[0].clone()], vec![rows[1].clone()]], 2));
        let scaled = lv(&[k * m[0][0], k * m[0][1]]);
        prop_assert!(!sublattice_direct_sum(&[vec![scaled], vec![rows[1].clone()]], 2));
        prop_assert!(!sublattice_direct_sum(&[vec![rows[0].clone()], vec![rows[0].clone()]], 2));
    }

    #[test]
    fn polygon_duality(pts in points(2)) {
        let p = hull(pts, 2);
        prop_assume!(p.is_some());
        let p = p.unwrap();
        prop_assert_eq!(p.vertices().len(), p.facets().len());
        let back = p.dual().unwrap().with_facets().unwrap().dual().unwrap();
        let a: BTreeSet<_> = p.vertices().iter().cloned().collect();
        let b: BTreeSet<_> = back.vertices().iter().cloned().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn polytope_faces_in_three_dimensions(pts in points(3)) {
        let p = hull(pts, 3);
        prop_assume!(p.is_some());
        let p = p.unwrap();
        let v = p.vertices().len();
        let f = p.facets().len();
        let edges = (0..v)
            .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let rows: Vec<Vec<Rational>> = p
                    .facets()
                    .iter()
                    .filter(|x| x.contains_vertex(i) && x.contains_vertex(j))
                    .map(|x| x.normal.clone())
                    .collect();
                exactal::rank(&rows) == 2
            })
            .count();
        prop_assert_eq!(v + f, edges + 2);

        let back = p.dual().unwrap().with_facets().unwrap().dual().unwrap();
        let a: BTreeSet<_> = p.vertices().iter().cloned().collect();
        let b: BTreeSet<_> = back.vertices().iter().cloned().collect();
        prop_assert_eq!(a, b);

        if p.is_simplicial() {
            let ridges = p.ridges().unwrap();
            prop_assert_eq!(ridges.len(), edges);
            // the facet graph is connected
            let mut seen = vec![false; f];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(x) = queue.pop_front() {
                for y in p.neighbours(x) {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn invariants_survive_gl2z(class in 0usize..16, m in unimodular2()) {
        let c = &polygons()[class];
        let moved: Vec<Vec<i64>> = c.vertices.iter().map(|v| apply2(&m, v)).collect();
        prop_assert_eq!(canonical_form(&moved), c.canonical.clone());
        let a = analyze::<Rational>(&InstanceFile::toric(&c.vertices));
        let b = analyze::<Rational>(&InstanceFile::toric(&moved));
        let (ra, rb) = (a.report.unwrap(), b.report.unwrap());
        prop_assert_eq!(&ra.epsilon.value, &rb.epsilon.value);
        prop_assert_eq!(&ra.pseudo_index.value, &rb.pseudo_index.value);
        prop_assert_eq!(ra.picard_number, rb.picard_number);
        prop_assert_eq!(ra.equality, rb.equality);
        prop_assert_eq!(ra.conditions.map(|x| x.locally_factorial), rb.conditions.map(|x| x.locally_factorial));
        prop_assert_eq!(
            ra.classification.map(|x| x.to_string()),
            rb.classification.map(|x| x.to_string())
        );
        let mut da: Vec<_> = a.curves.iter().map(|x| x.degree.clone()).collect();
        let mut db: Vec<_> = b.curves.iter().map(|x| x.degree.clone()).collect();
        da.sort();
        db.sort();
        prop_assert_eq!(da, db);
    }
}

#[test]
fn small_and_big_scalars_agree_on_polygons() {
    for c in polygons() {
        let inst = InstanceFile::toric(&c.vertices);
        let big = analyze::<Rational>(&inst);
        let small = analyze::<SmallRational>(&inst);
        assert_eq!(big.outcome, Outcome::Verified);
        assert_eq!(big.to_json(), small.to_json(), "{:?}", c.vertices);
    }
}

#[test]
fn polygon_classes_are_pairwise_inequivalent() {
    let forms: BTreeSet<_> = polygons().iter().map(|c| c.canonical.clone()).collect();
    assert_eq!(forms.len(), 16);
    for c in polygons() {
        assert_eq!(canonical_form(&c.vertices), c.canonical);
    }
}
