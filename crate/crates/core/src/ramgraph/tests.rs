use super::*;
use crate::gfq::FqField;

/// Curves `C1..Cn` over `F_ell` joined by nodes with separate tails `(u, v)`.
pub(crate) fn graph_with(ell: u64, q: u64, curves: usize, edges: &[(usize, usize, u64, u64)]) -> RamGraph {
    let field = FqField::prime(ell, q).unwrap();
    let k = FunctionField::new(field.clone());
    let mut g = RamGraph::new(q);
    g.fields.insert("F".into(), field);
    for i in 1..=curves {
        let id = format!("C{i}");
        g.curves.insert(
            id.clone(),
            Curve { id, kind: CurveKind::Vertical, field: Some("F".into()), cover: Some(k.t()), parent: None },
        );
    }
    for (e, &(a, b, u, v)) in edges.iter().enumerate() {
        let id = format!("n{}", e + 1);
        g.nodes.insert(
            id.clone(),
            Node {
                id,
                curves: [format!("C{a}"), format!("C{b}")],
                field: "F".into(),
                at: [Loc::At(Fq(e as u64 % ell)), Loc::At(Fq(e as u64 % ell))],
                tail: Tail::Separate { u: Fq(u), v: Fq(v) },
                w: Fq::ONE,
            },
        );
    }
    g
}

#[test]
fn classify_examples() {
    let f7 = FqField::prime(7, 3).unwrap();
    let sep = |u, v| Tail::Separate { u: Fq(u), v: Fq(v) };
    assert_eq!(classify_tail(&f7, &sep(3, 2)).unwrap(), PointClass::Chilly { s: 2 });
    assert_eq!(classify_tail(&f7, &sep(3, 6)).unwrap(), PointClass::Hot);
    assert_eq!(classify_tail(&f7, &sep(6, 1)).unwrap(), PointClass::Cool);
    let cold = Tail::Mixed { m: 1, u: Fq(3), v: Fq(2) };
    assert_eq!(classify_tail(&f7, &cold).unwrap(), PointClass::Cold);
    assert!(classify_tail(&f7, &Tail::Mixed { m: 3, u: Fq(1), v: Fq(1) }).is_err());
    assert!(classify_tail(&f7, &sep(0, 1)).is_err());
}

#[test]
fn classify_swap_and_qth_power_invariance() {
    for ell in [7u64, 13] {
        let f = FqField::prime(ell, 3).unwrap();
        for u in f.units() {
            for v in f.units() {
                let c = classify_tail(&f, &Tail::Separate { u, v }).unwrap();
                let swapped = classify_tail(&f, &Tail::Separate { u: v, v: u }).unwrap();
                match (c, swapped) {
                    (PointClass::Chilly { s }, PointClass::Chilly { s: t }) => assert_eq!(s * t % 3, 1),
                    (a, b) => assert_eq!(a, b),
                }
                let cube = f.pow(f.generator(), 3);
                let moved = Tail::Separate { u: f.mul(u, cube), v };
                assert_eq!(classify_tail(&f, &moved).unwrap(), c);
                assert_eq!(hot_obstruction(&f, u, v).unwrap(), c == PointClass::Hot);
            }
        }
    }
}

#[test]
fn classify_without_roots_of_unity_goes_through_closure() {
    // F_5 has no cube roots of unity, so every unit is a cube there
    let f5 = FqField::prime(5, 3).unwrap();
    for u in f5.units() {
        let c = classify_tail(&f5, &Tail::Separate { u, v: Fq(2) }).unwrap();
        assert_eq!(c, PointClass::Cool);
    }
}

#[test]
fn cool_blowup_makes_two_curve_points() {
    let mut g = graph_with(7, 3, 2, &[(1, 2, 6, 1)]);
    let rec = blowup_cool(&mut g, "n1").unwrap();
    assert_eq!(rec.event, "cool-blowup");
    assert!(g.nodes.is_empty());
    let e = &g.curves[&rec.created[0]];
    assert_eq!(e.kind, CurveKind::Exceptional);
    assert!(!e.is_ramified());
    assert_eq!(g.crossings.len(), 2);
    let met: Vec<_> = g.crossings.values().map(|x| x.curves.clone()).collect();
    assert!(met.contains(&["C1".to_string(), e.id.clone()]));
    assert!(met.contains(&["C2".to_string(), e.id.clone()]));
    assert!(blowup_cool(&mut g, "n1").is_err());
    let mut g = graph_with(7, 3, 2, &[(1, 2, 3, 2)]);
    assert!(blowup_cool(&mut g, "n1").is_err());
}

#[test]
fn chilly_blowup_coefficients() {
    // q = 3, s = 2: edge removed
    let mut g = graph_with(7, 3, 2, &[(1, 2, 3, 2)]);
    let rec = blowup_chilly(&mut g, "n1").unwrap();
    assert_eq!(rec.event, "chilly-delete");
    assert!(g.nodes.is_empty() && g.crossings.len() == 2);
    // q = 3, s = 1: two new chilly nodes with coefficient 2
    let mut g = graph_with(7, 3, 2, &[(1, 2, 3, 3)]);
    let rec = blowup_chilly(&mut g, "n1").unwrap();
    assert_eq!(rec.coefficients.iter().map(|c| c.1).collect::<Vec<_>>(), vec![2, 2]);
    for (id, s) in &rec.coefficients {
        assert_eq!(g.classify(id).unwrap(), PointClass::Chilly { s: *s });
    }
    // q = 5 over F_11, s = 2: coefficients 3 and 4
    let mut g = graph_with(11, 5, 2, &[(1, 2, 2, 4)]);
    assert_eq!(g.classify("n1").unwrap(), PointClass::Chilly { s: 2 });
    let rec = blowup_chilly(&mut g, "n1").unwrap();
    assert_eq!(rec.coefficients.iter().map(|c| c.1).collect::<Vec<_>>(), vec![3, 4]);
    let e = &g.curves[&rec.created[0]];
    assert!(e.is_ramified());
    assert_eq!(g.nodes[&rec.created[1]].curves, ["C1".to_string(), e.id.clone()]);
    assert_eq!(g.nodes[&rec.created[2]].curves, ["C2".to_string(), e.id.clone()]);
}

#[test]
fn loop_detection() {
    let tri = graph_with(7, 3, 3, &[(1, 2, 3, 3), (2, 3, 3, 3), (3, 1, 3, 3)]);
    let cycles = find_chilly_loops(&tri).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].nodes.len(), 3);
    assert_eq!(cycles[0].curves.len(), 3);
    let tree = graph_with(7, 3, 4, &[(1, 2, 3, 3), (1, 3, 3, 2), (3, 4, 3, 3)]);
    assert!(find_chilly_loops(&tree).unwrap().is_empty());
    let par = graph_with(7, 3, 2, &[(1, 2, 3, 3), (1, 2, 3, 2)]);
    let cycles = find_chilly_loops(&par).unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].nodes, vec!["n2".to_string(), "n1".to_string()]);
    // hot and cool nodes are not chilly edges
    let mixed = graph_with(7, 3, 2, &[(1, 2, 3, 6), (1, 2, 6, 1)]);
    assert!(find_chilly_loops(&mixed).unwrap().is_empty());
}

#[test]
fn loop_breaking_examples() {
    let mut tri = graph_with(7, 3, 3, &[(1, 2, 3, 3), (2, 3, 3, 3), (3, 1, 3, 3)]);
    let log = break_chilly_loops(&mut tri).unwrap();
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].event, "chilly-blowup");
    assert_eq!(log[1].event, "chilly-delete");
    assert!(find_chilly_loops(&tri).unwrap().is_empty());
    let mut tree = graph_with(7, 3, 2, &[(1, 2, 3, 3)]);
    let before = tree.clone();
    assert!(break_chilly_loops(&mut tree).unwrap().is_empty());
    assert_eq!(tree, before);
    // q = 5, closing edge with s = 3: 3 -> 4 -> delete
    let g11 = FqField::prime(11, 5).unwrap();
    let v3 = g11.pow(Fq(2), 3);
    let mut g = graph_with(11, 5, 2, &[(1, 2, 2, 2), (1, 2, 2, v3.0)]);
    let log = break_chilly_loops(&mut g).unwrap();
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].coefficients[0].1, 4);
    assert!(find_chilly_loops(&g).unwrap().is_empty());
}

#[test]
fn coefficient_assignment_examples() {
    let path = graph_with(7, 3, 2, &[(1, 2, 3, 2)]);
    let s = assign_coefficients(&path).unwrap();
    assert_eq!((s["C1"], s["C2"]), (1, 2));
    let single = graph_with(7, 3, 1, &[]);
    assert_eq!(assign_coefficients(&single).unwrap()["C1"], 1);
    let star = graph_with(7, 3, 4, &[(1, 2, 3, 3), (1, 3, 3, 3), (1, 4, 3, 3)]);
    assert!(assign_coefficients(&star).unwrap().values().all(|&s| s == 1));
    let hot = graph_with(7, 3, 2, &[(1, 2, 3, 6)]);
    assert!(assign_coefficients(&hot).is_err());
    let bad_loop = graph_with(7, 3, 2, &[(1, 2, 3, 3), (1, 2, 3, 2)]);
    assert!(matches!(assign_coefficients(&bad_loop), Err(Error::Infeasible(_))));
}

#[test]
fn exceptional_class_is_one_plus_s_times_u() {
    for ell in [7u64, 13] {
        let f = FqField::prime(ell, 3).unwrap();
        for u in f.units() {
            for v in f.units() {
                if let PointClass::Chilly { s } = classify_tail(&f, &Tail::Separate { u, v }).unwrap() {
                    let cu = f.unit_class(u).unwrap();
                    assert_eq!(f.unit_class(f.mul(u, v)).unwrap(), cu.scale(1 + s as i64));
                }
            }
        }
    }
}
