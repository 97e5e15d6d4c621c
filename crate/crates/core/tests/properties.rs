mod common;

use common::{
    any_lattice_polygon, lattice_polygon, laurent, positive_laurent, small_rational, unimodular,
};
use num_integer::Integer;
use polymut_core::deform::{general_fiber, is_admissible, reduce_to_polygon, Decomposition};
use polymut_core::divpoly::{self, Affine, PLFunc, PointLabel};
use polymut_core::fano::{
    self, diophantine_class, markov_tree, predicted_mutation_weights, triangle_from_weights,
    MarkovTriple, WeightTriple,
};
use polymut_core::geom::{area, dual, lattice_equivalent, LatticeMap, Polygon};
use polymut_core::mutation::{self, find_factors, mutation_data, HeightScan, MutationData};
use polymut_core::rational::Rational;
use proptest::prelude::*;

fn coprime_weights(max: u64) -> impl Strategy<Value = WeightTriple> {
    (1..=max, 1..=max, 1..=max)
        .prop_filter("pairwise coprime", |&(a, b, c)| {
            a.gcd(&b) == 1 && b.gcd(&c) == 1 && a.gcd(&c) == 1
        })
        .prop_map(|(a, b, c)| WeightTriple::new([a, b, c]).unwrap())
}

fn fano_polygon() -> impl Strategy<Value = Polygon> {
    lattice_polygon(3, 7).prop_filter("Fano", fano::is_fano)
}

fn mutations_of(p: &Polygon) -> Vec<MutationData> {
    HeightScan::EdgeNormals
        .candidates(p)
        .iter()
        .flat_map(|w| find_factors(p, w).unwrap())
        .collect()
}

fn affine_map(m: [[i64; 2]; 2], t: (i64, i64)) -> LatticeMap {
    LatticeMap {
        matrix: m,
        translation: [t.0, t.1],
    }
}

proptest! {
    #[test]
    fn lattice_equivalence_is_an_equivalence(
        p in any_lattice_polygon(4, 6),
        (u, s) in (unimodular(), (-5i64..=5, -5i64..=5)),
        (v, r) in (unimodular(), (-5i64..=5, -5i64..=5)),
    ) {
        let q = p.map_affine(&affine_map(u, s));
        let o = q.map_affine(&affine_map(v, r));
        let id = lattice_equivalent(&p, &p).expect("reflexive");
        prop_assert_eq!(p.map_affine(&id), p.clone());
        let back = lattice_equivalent(&q, &p).expect("symmetric");
        prop_assert_eq!(q.map_affine(&back), p.clone());
        let f = lattice_equivalent(&p, &q).unwrap();
        let g = lattice_equivalent(&q, &o).unwrap();
        prop_assert_eq!(p.map_affine(&g.compose(&f)), o);
    }

    #[test]
    fn weights_roundtrip(w in coprime_weights(100)) {
        let t = triangle_from_weights(&w).unwrap();
        prop_assert!(fano::weights(&t).unwrap().same_up_to_permutation(&w));
        prop_assert_eq!(fano::multiplicity(&t).unwrap(), 1);
        let sum = Rational::from_integer(w.sum().into());
        let prod: u128 = w.get().iter().map(|&x| x as u128).product();
        prop_assert_eq!(area(&t) * Rational::from_integer(2.into()), sum.clone());
        let dual_area = &sum * &sum / Rational::from_integer((2 * prod).into());
        prop_assert_eq!(area(&dual(&t).unwrap()), dual_area);
    }

    #[test]
    fn predicted_weights_keep_the_diophantine_class(w in coprime_weights(60), i in 0usize..3) {
        if let Ok(next) = predicted_mutation_weights(&w, i) {
            prop_assert_eq!(diophantine_class(&w).unwrap(), diophantine_class(&next).unwrap());
        }
    }

    #[test]
    fn mutation_preserves_dual_area_and_reverses(p in fano_polygon()) {
        let dual_area = area(&dual(&p).unwrap());
        for md in mutations_of(&p) {
            let q = mutation::mutate(&p, &md).unwrap();
            prop_assert!(q.is_lattice());
            prop_assert_eq!(area(&dual(&q).unwrap()), dual_area.clone());
            let t = md.factor_length().try_into().unwrap();
            let back = mutation_data(&q, &-&md.w, t).unwrap();
            let r = mutation::mutate(&q, &back).unwrap();
            prop_assert!(lattice_equivalent(&r, &p).is_some(), "{} -> {} -> {}", p, q, r);
        }
    }

    #[test]
    fn exact_division_inverts_multiplication(f in laurent(8), g in laurent(8)) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((&f * &g).div_exact(&g).unwrap(), f);
    }

    #[test]
    fn newton_polygon_of_positive_product_is_minkowski_sum(f in positive_laurent(6), g in positive_laurent(6)) {
        let lhs = (&f * &g).newton_polytope().unwrap();
        let rhs = polymut_core::geom::minkowski_sum(
            &f.newton_polytope().unwrap(),
            &g.newton_polytope().unwrap(),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divisorial_polytope_roundtrip(p in lattice_polygon(5, 8)) {
        let dp = divpoly::from_polygon(&p).unwrap();
        prop_assert_eq!(divpoly::to_polygon(&dp).unwrap(), p.clone());
        prop_assert_eq!(dp.degree().integral(), area(&p));
        for f in dp.coeffs().values() {
            prop_assert!(f.is_lattice_graph());
        }
        prop_assert!(divpoly::validate(&dp).is_valid());
    }

    #[test]
    fn shifts_preserve_the_degree(p in lattice_polygon(5, 8), slope in small_rational(), c in small_rational()) {
        let dp = divpoly::from_polygon(&p).unwrap();
        let a = Affine::new(slope, c);
        let moved = dp.shift_affine(&PointLabel::Zero, &PointLabel::Infinity, &a).unwrap();
        prop_assert!(moved.degree().same_function(&dp.degree()));
    }

    #[test]
    fn general_fiber_preserves_the_degree(p in lattice_polygon(5, 8), k in 0usize..4) {
        let dp = divpoly::from_polygon(&p).unwrap();
        let phi = dp.coeff(&PointLabel::Infinity).unwrap().clone();
        let domain = phi.domain();
        // Split off one of the pieces of the lower envelope, or nothing.
        let piece = phi.pieces().get(k).map(|pc| pc.affine.clone());
        let phi0 = match piece {
            Some(a) => PLFunc::affine(domain.clone(), &a).unwrap(),
            None => PLFunc::zero(domain.clone()).unwrap(),
        };
        let phi1 = phi.sub(&phi0).unwrap();
        prop_assume!(is_admissible(&phi, &phi0, &phi1).unwrap().admissible);
        let d = Decomposition { label: PointLabel::Infinity, phi0, phi1 };
        let fiber = general_fiber(&dp, &d).unwrap();
        prop_assert!(fiber.degree().same_function(&dp.degree()));
    }

    #[test]
    fn zero_decomposition_gives_back_the_polygon(p in lattice_polygon(5, 8)) {
        let dp = divpoly::from_polygon(&p).unwrap();
        let phi = dp.coeff(&PointLabel::Infinity).unwrap().clone();
        let zero = PLFunc::zero(phi.domain()).unwrap();
        let d = Decomposition { label: PointLabel::Infinity, phi0: phi, phi1: zero };
        let fiber = general_fiber(&dp, &d).unwrap();
        prop_assert_eq!(reduce_to_polygon(&fiber).unwrap().polygon, p);
    }
}

#[test]
fn markov_tree_solves_the_markov_equation() {
    for t in markov_tree(7).unwrap() {
        let [a, b, c] = t.get().map(u128::from);
        assert_eq!(a * a + b * b + c * c, 3 * a * b * c, "{t:?}");
    }
}

#[test]
fn markov_squares_mutate_by_vieta_jumps() {
    for t in markov_tree(4).unwrap() {
        let [a, b, c] = t.get();
        let w = t.squares().unwrap();
        let jumped = 3 * b * c - a;
        let expected = WeightTriple::new([b * b, c * c, jumped * jumped]).unwrap();
        assert!(predicted_mutation_weights(&w, 0)
            .unwrap()
            .same_up_to_permutation(&expected));
        assert_eq!(MarkovTriple::new(b, c, jumped).unwrap(), t.jump(0).unwrap());
    }
}

#[test]
fn fiber_triangles_carry_the_predicted_weights() {
    for t in markov_tree(3).unwrap() {
        let w = t.squares().unwrap();
        let tri = triangle_from_weights(&w).unwrap();
        for md in mutations_of(&tri) {
            let cert = polymut_core::deform::mutation_to_deformation(
                &tri,
                &md,
                polymut_core::deform::Dilation::Auto,
            )
            .unwrap();
            let apex = mutation::apex_index(&tri, &md.w).unwrap();
            let predicted =
                predicted_mutation_weights(&fano::weights(&tri).unwrap(), apex).unwrap();
            assert!(cert
                .fiber_class
                .weights
                .unwrap()
                .same_up_to_permutation(&predicted));
            assert!(cert.corollary.pass);
        }
    }
}
