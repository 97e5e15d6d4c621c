//! Generators shared by the property suites.

#![allow(dead_code)]

use polymut_core::geom::{Polygon, Vec2};
use polymut_core::laurent::LaurentPoly;
use polymut_core::rational::Rational;
use proptest::prelude::*;

pub fn lattice_point(r: i64) -> impl Strategy<Value = Vec2> {
    (-r..=r, -r..=r).prop_map(|(x, y)| Vec2::int(x, y))
}

/// Full-dimensional lattice polygons with coordinates in `[-r, r]`.
pub fn lattice_polygon(r: i64, max_points: usize) -> impl Strategy<Value = Polygon> {
    prop::collection::vec(lattice_point(r), 3..=max_points)
        .prop_map(Polygon::hull)
        .prop_filter("full-dimensional", |p| p.dim() == 2)
}

/// Lattice polygons with the origin in the interior.
pub fn polygon_around_origin(r: i64, max_points: usize) -> impl Strategy<Value = Polygon> {
    lattice_polygon(r, max_points)
        .prop_filter("origin interior", |p| p.contains_strictly(&Vec2::zero()))
}

/// Lattice polygons of any dimension (points and segments included).
pub fn any_lattice_polygon(r: i64, max_points: usize) -> impl Strategy<Value = Polygon> {
    prop::collection::vec(lattice_point(r), 1..=max_points).prop_map(Polygon::hull)
}

pub fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    let gens: [[[i64; 2]; 2]; 4] = [
        [[1, 1], [0, 1]],
        [[1, 0], [1, 1]],
        [[0, -1], [1, 0]],
        [[1, 0], [0, -1]],
    ];
    prop::collection::vec(0..4usize, 0..12).prop_map(move |word| {
        word.iter().fold([[1, 0], [0, 1]], |m, &i| {
            let g = gens[i];
            [
                [
                    g[0][0] * m[0][0] + g[0][1] * m[1][0],
                    g[0][0] * m[0][1] + g[0][1] * m[1][1],
                ],
                [
                    g[1][0] * m[0][0] + g[1][1] * m[1][0],
                    g[1][0] * m[0][1] + g[1][1] * m[1][1],
                ],
            ]
        })
    })
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

pub fn laurent(max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), small_rational()), 0..=max_terms)
        .prop_map(LaurentPoly::from_terms)
}

pub fn positive_laurent(max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(
        ((-3i64..=3, -3i64..=3), (1i64..=9, 1i64..=4)),
        1..=max_terms,
    )
    .prop_map(|ts| {
        LaurentPoly::from_terms(
            ts.into_iter()
                .map(|(e, (n, d))| (e, Rational::new(n.into(), d.into()))),
        )
    })
}
