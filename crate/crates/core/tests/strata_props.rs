mod common;

use npcc::muord;
use npcc::polygon::NewtonPolygon;
use npcc::strata::{self, oort, KottwitzSet, StrataError};
use npcc::Rational;
use proptest::prelude::*;

use common::{config, datum_with_class, omega_oracle, symmetric, symmetric_of_genus};

const CAP: u64 = 50_000;

proptest! {
    #![proptest_config(config(0x5eed_0301))]

    #[test]
    fn kottwitz_set_shape((d, p) in datum_with_class(12, 6)) {
        let ks = match KottwitzSet::new(&d, p, CAP) {
            Err(StrataError::CapExceeded(_)) => return Ok(()),
            r => r.unwrap(),
        };
        let u = muord::mu_ordinary(&d, p).unwrap();
        let top = &ks.elements[ks.top];
        prop_assert_eq!(&top.total, &u);
        prop_assert_eq!(ks.mu_ordinary(), &u);
        prop_assert_eq!(top.length, 0);
        let g = d.genus();
        for e in &ks.elements {
            prop_assert!(e.total.is_symmetric());
            prop_assert_eq!(e.total.height(), 2 * g);
            prop_assert!(e.total.lies_on_or_above(&u).unwrap());
        }
        // unique basic element, below everything
        let bottoms: Vec<usize> = (0..ks.elements.len())
            .filter(|&i| (0..ks.elements.len()).all(|j| ks.le(i, j)))
            .collect();
        prop_assert_eq!(bottoms.len(), 1);
        // componentwise order refines the polygon order
        for i in 0..ks.elements.len() {
            for j in 0..ks.elements.len() {
                if ks.le(i, j) {
                    prop_assert!(ks.elements[i].total.lies_on_or_above(&ks.elements[j].total).unwrap());
                    prop_assert!(ks.elements[i].length >= ks.elements[j].length);
                }
            }
        }
        for (a, b) in ks.covers() {
            prop_assert!(ks.elements[a].length > ks.elements[b].length);
        }
    }

    #[test]
    fn omega_count_matches_lattice_oracle(nu in symmetric(8)) {
        prop_assert_eq!(oort::omega_count(&nu).unwrap(), omega_oracle(&nu));
    }

    #[test]
    fn omega_count_grows_with_ordinary_part(nu in symmetric(6), k in 0u64..8) {
        let bigger = nu.amalgamate(&NewtonPolygon::ord().power(k));
        prop_assert!(oort::omega_count(&bigger).unwrap() >= oort::omega_count(&nu).unwrap());
    }

    #[test]
    fn omega_count_is_monotone_in_the_order(a in symmetric_of_genus(7), b in symmetric_of_genus(7)) {
        if a.lies_on_or_above(&b).unwrap() {
            prop_assert!(oort::omega_count(&a).unwrap() >= oort::omega_count(&b).unwrap());
        }
    }

    #[test]
    fn condition_u_compares_dimensions(nu in symmetric(10)) {
        let r = oort::condition_u(&nu).unwrap();
        prop_assert_eq!(r.holds, r.dim_mg < r.codim_ag);
        prop_assert_eq!(r.codim_ag, omega_oracle(&nu));
    }
}

#[test]
fn supersingular_closed_form() {
    for n in 1..=50u64 {
        let w = oort::omega_count(&NewtonPolygon::ss().power(n)).unwrap();
        assert_eq!(w, n * (n + 1) / 2 - n * n / 4, "n = {n}");
        assert_eq!(w, oort::ss_closed_form(n));
        assert!(4 * w > n * n);
    }
}

#[test]
fn small_codimensions() {
    let p = |s: &str| s.parse::<NewtonPolygon>().unwrap();
    assert_eq!(
        oort::omega_count(&NewtonPolygon::ord().power(9)).unwrap(),
        0
    );
    assert_eq!(oort::omega_count(&p("ss^7+ord^2")).unwrap(), 16);
    assert_eq!(oort::omega_count(&p("(1/3,2/3)")).unwrap(), 3);
    let r = oort::condition_u(&p("ss^7+ord^2")).unwrap();
    assert_eq!((r.dim_mg, r.codim_ag, r.holds), (24, 16, false));
    assert!(oort::condition_u(&p("ss^34+ord^66")).unwrap().holds);
    assert_eq!(oort::condition_u(&NewtonPolygon::ss()).unwrap().dim_mg, 1);
    assert!(oort::omega_count(&p("{0:2,1:1}")).is_err());
    assert!(oort::omega_count(&p("{1/3:3}")).is_err());
}

#[test]
fn threshold_predicates() {
    assert!(oort::half_slope_bound(Rational::new(1, 2), 48).unwrap());
    assert!(!oort::half_slope_bound(Rational::new(1, 2), 47).unwrap());
    assert!(oort::cyclic_ss_bound(1, 34).unwrap());
    assert!(!oort::cyclic_ss_bound(1, 33).unwrap());
    assert!(oort::power_bound(1, 1, 4, 18).unwrap());
    assert!(!oort::power_bound(1, 1, 4, 17).unwrap());
    assert!(oort::power_bound(0, 1, 1, 1).is_err());
    assert!(oort::half_slope_bound(Rational::new(0, 1), 10).is_err());
}

#[test]
fn orbit_enumeration_examples() {
    let ks = strata::kottwitz_set(&"7:4:2,4,4,4".parse().unwrap(), 2).unwrap();
    let t: Vec<String> = ks.totals().iter().map(|q| q.to_string()).collect();
    assert_eq!(t, vec!["ord^3+(1/3,2/3)", "(1/6,5/6)"]);
    let ks = strata::kottwitz_set(&"5:4:1,3,3,3".parse().unwrap(), 2).unwrap();
    assert_eq!(ks.totals().len(), 2);
    assert_eq!(ks.codim(&NewtonPolygon::ss().power(4)).unwrap(), 1);
    let ks = strata::kottwitz_set(&"3:5:1,1,1,1,2".parse().unwrap(), 2).unwrap();
    let t: Vec<String> = ks.totals().iter().map(|q| q.to_string()).collect();
    assert_eq!(t, vec!["ord^2+ss", "ss^3"]);
}

#[test]
fn split_prime_gives_a_singleton() {
    // every f(n) is 0 or g(τ_n), so no orbit has room for another polygon
    for d in ["3:3:1,1,1", "4:3:1,1,2", "5:3:1,1,3", "7:3:1,2,4"] {
        let d = d.parse().unwrap();
        let ks = strata::kottwitz_set(&d, 1).unwrap();
        assert_eq!(ks.elements.len(), 1, "{d}");
    }
}

#[test]
fn cap_is_enforced() {
    let d = "7:4:2,4,4,4".parse().unwrap();
    assert!(matches!(
        KottwitzSet::new(&d, 2, 1),
        Err(StrataError::CapExceeded(1))
    ));
}

#[test]
fn codim_of_non_element() {
    let ks = strata::kottwitz_set(&"8:4:4,2,5,5".parse().unwrap(), 7).unwrap();
    assert!(ks.codim(&NewtonPolygon::ord().power(5)).is_err());
}
