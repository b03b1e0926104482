use std::collections::BTreeMap;

use super::*;
use crate::curvebr::PlaceKey;
use crate::gfq::{Fq, FqField};

/// One constant-cover curve with a single auxiliary curve meeting it at `t = 4`.
fn one_curve(cover: u64, mult: u64) -> SurfaceModel {
    let text = format!(
        "brauer-model v1\nq 3\n[fields]\nF7 ell=7\n[curves]\nC1 kind=vertical field=F7 cover=[{cover}]\n\
         [auxiliary]\nA1 kind=horizontal\n[intersections]\nC1 A1 field=F7 at=4 mult={mult}\n"
    );
    SurfaceModel::parse(&text).unwrap()
}

fn datum(e: u64) -> SplittingDatum {
    SplittingDatum {
        q: 3,
        s: BTreeMap::from([("C1".into(), 1)]),
        e: if e == 0 { BTreeMap::new() } else { BTreeMap::from([("A1".into(), e)]) },
        multipliers: BTreeMap::new(),
        v: BTreeMap::new(),
        formal: true,
        perturb_chilly: None,
    }
}

#[test]
fn residual_class_examples() {
    let f7 = FqField::prime(7, 3).unwrap();
    let rho = f7.prime_rho().unwrap();
    let c = f7.element_of_coordinate(1, rho).unwrap();
    let at4 = PlaceKey::Finite(vec![3, 1]);
    // E disjoint from C
    let m = one_curve(c.0, 1);
    assert!(residual_class(&m, "C1", &datum(0)).unwrap().is_empty());
    // nonsplit point met with multiplicity q
    let m = one_curve(c.0, 3);
    assert!(residual_class(&m, "C1", &datum(1)).unwrap().is_empty());
    // multiplicity 1, gamma = 1: residue -1
    let m = one_curve(c.0, 1);
    let beta = residual_class(&m, "C1", &datum(1)).unwrap();
    assert_eq!(beta.get(&at4), 2);
    assert_eq!(beta.len(), 1);
}

#[test]
fn unconstrained_curves_get_trivial_units() {
    let m = one_curve(3, 3);
    let d = kill_residuals(&m, datum(1)).unwrap();
    assert!(d.v["C1"].is_constant() && d.v["C1"].num().is_one());
}

#[test]
fn nonzero_residue_sum_is_infeasible() {
    let m = one_curve(3, 1);
    assert!(matches!(kill_residuals(&m, datum(1)), Err(Error::Infeasible(_))));
}

#[test]
fn cold_characters_satisfy_the_exchange_relation() {
    for (ell, q) in [(7u64, 3u64), (13, 3), (11, 5)] {
        let f = FqField::prime(ell, q).unwrap();
        let units: Vec<Fq> = f.units().collect();
        for m in 1..q as i64 {
            for s in 1..q {
                for t in 1..q {
                    for &u in units.iter().step_by(2) {
                        for &v in units.iter().step_by(3) {
                            for &w in &units {
                                let [a, b] = cold_characters(&f, m, u, v, w, s, t).unwrap();
                                assert_eq!((s * a + t * b) % q, 0);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn cold_character_moves_linearly_in_w() {
    // multiplying w by x shifts chi of the first curve by m s^{-1} coord(x)
    let f = FqField::prime(7, 3).unwrap();
    let rho = f.prime_rho().unwrap();
    for w in f.units() {
        for x in f.units() {
            let base = cold_characters(&f, 1, Fq(3), Fq(2), w, 2, 1).unwrap()[0];
            let moved = cold_characters(&f, 1, Fq(3), Fq(2), f.mul(w, x), 2, 1).unwrap()[0];
            let cx = f.coordinate(x, rho).unwrap();
            assert_eq!(moved, (base + 2 * cx) % 3);
        }
    }
}

#[test]
fn formal_coefficients_prefer_all_ones() {
    assert_eq!(formal_coefficients(&[vec![1, 2]], 2, 3), vec![1, 1]);
    let x = formal_coefficients(&[vec![1, 1]], 2, 3);
    assert_eq!((x[0] + x[1]) % 3, 0);
    assert_eq!(x[0], 1);
    assert_eq!(formal_coefficients(&[vec![1, 0], vec![0, 1]], 2, 3), vec![0, 0]);
}
