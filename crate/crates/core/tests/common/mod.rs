#![allow(dead_code)]

use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngAlgorithm, RngSeed};

use npcc::monodromy::MonodromyDatum;
use npcc::polygon::NewtonPolygon;

pub const CASES: u32 = 512;

pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        max_global_rejects: 100_000,
        ..Config::default()
    }
}

fn complete(m: u64, mut a: Vec<u64>) -> Option<MonodromyDatum> {
    let s: u64 = a.iter().sum();
    let last = (m - s % m) % m;
    if last == 0 {
        return None;
    }
    a.push(last);
    let g = a.iter().fold(m, |g, &x| g.gcd(&x));
    (g == 1).then(|| MonodromyDatum::new(m, a).unwrap())
}

/// Valid data with `m <= max_m` and `3 <= N <= max_n`.
pub fn datum(max_m: u64, max_n: usize) -> impl Strategy<Value = MonodromyDatum> {
    (2..=max_m)
        .prop_flat_map(move |m| (Just(m), prop::collection::vec(1..m, 2..max_n)))
        .prop_filter_map("entries must sum to 0 with gcd 1", |(m, a)| complete(m, a))
}

pub fn unit_mod(m: u64) -> impl Strategy<Value = u64> {
    (1..m.max(2)).prop_filter("unit", move |c| c.gcd(&m) == 1 || m == 1)
}

pub fn datum_with_class(max_m: u64, max_n: usize) -> impl Strategy<Value = (MonodromyDatum, u64)> {
    datum(max_m, max_n).prop_flat_map(|d| {
        let m = d.m();
        (Just(d), unit_mod(m))
    })
}

/// A pair that can be clutched as given, together with a class mod `m3`.
pub fn admissible_pair(
    max_m: u64,
    max_n: usize,
) -> impl Strategy<Value = (MonodromyDatum, MonodromyDatum, u64)> {
    (datum(max_m, max_n), datum(max_m, max_n))
        .prop_filter_map("needs an admissible pair of points", |(g1, g2)| {
            npcc::clutch::find_admissible(&g1, &g2)
        })
        .prop_flat_map(|(g1, g2)| {
            let m3 = g1.m().lcm(&g2.m());
            (Just(g1), Just(g2), unit_mod(m3))
        })
}

/// Pairs with `m1 | m2`, the common shape for gluing along a tower.
pub fn divisible_pair(
    max_m: u64,
    max_n: usize,
) -> impl Strategy<Value = (MonodromyDatum, MonodromyDatum, u64)> {
    (
        datum(max_m, max_n),
        1u64..=3,
        prop::collection::vec(1u64..1000, 1..max_n),
    )
        .prop_filter_map("needs a datum mod k m1", |(g1, k, rest)| {
            let m2 = g1.m() * k;
            let d1 = k;
            let last = *g1.a().last().unwrap();
            let first = (m2 - (d1 * last) % m2) % m2;
            let mut a = vec![first];
            a.extend(rest.iter().map(|x| 1 + x % (m2 - 1)));
            let g2 = complete(m2, a)?;
            npcc::clutch::admissible(&g1, &g2).then_some((g1, g2))
        })
        .prop_flat_map(|(g1, g2)| {
            let m3 = g2.m();
            (Just(g1), Just(g2), unit_mod(m3))
        })
}

/// One symmetric building block: `ord`, `ss` or `(s/t, (t-s)/t)`.
pub fn piece() -> impl Strategy<Value = NewtonPolygon> {
    prop_oneof![
        Just(NewtonPolygon::ord()),
        Just(NewtonPolygon::ss()),
        (3i64..=7)
            .prop_flat_map(|t| (1..=(t - 1) / 2, Just(t)))
            .prop_filter("coprime", |(s, t)| s.gcd(t) == 1)
            .prop_map(|(s, t)| NewtonPolygon::pair(s, t).unwrap()),
    ]
}

/// Symmetric polygon with integral breakpoints assembled from pieces.
pub fn symmetric(max_pieces: usize) -> impl Strategy<Value = NewtonPolygon> {
    prop::collection::vec(piece(), 1..=max_pieces).prop_map(|ps| {
        ps.iter()
            .fold(NewtonPolygon::empty(), |a, b| a.amalgamate(b))
    })
}

/// Symmetric polygons of exact genus `g`, padded with `ord`.
pub fn symmetric_of_genus(g: u64) -> impl Strategy<Value = NewtonPolygon> {
    prop::collection::vec(piece(), 0..(g as usize + 1)).prop_map(move |ps| {
        let mut acc = NewtonPolygon::empty();
        for q in ps {
            let next = acc.amalgamate(&q);
            if next.height() <= 2 * g {
                acc = next;
            }
        }
        let missing = g - acc.height() / 2;
        acc.amalgamate(&NewtonPolygon::ord().power(missing))
    })
}

/// Arbitrary slope multiset (not necessarily symmetric).
pub fn raw_polygon() -> impl Strategy<Value = NewtonPolygon> {
    prop::collection::vec(((0i64..=6), (1i64..=6), (1u64..=4)), 0..5).prop_map(|v| {
        NewtonPolygon::from_slopes(v.into_iter().map(|(a, b, k)| {
            let (a, b) = (a.min(b), b);
            (npcc::Rational::new(a, b), k)
        }))
        .unwrap()
    })
}

/// Literal count of `(x, y)` with `0 <= x, y <= g` and `y < ν(x)`.
pub fn omega_oracle(nu: &NewtonPolygon) -> u64 {
    let g = nu.height() / 2;
    let mut n = 0;
    for x in 0..=g {
        let v = nu.value_at(x);
        for y in 0..=g {
            if npcc::Rational::from_integer(y as i64) < v {
                n += 1;
            }
        }
    }
    n
}
