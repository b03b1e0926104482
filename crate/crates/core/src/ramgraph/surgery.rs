//! Blowups at cool and chilly nodes, chilly-loop breaking and coefficient assignment.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{classify_tail, Crossing, Curve, CurveKind, Loc, Node, PointClass, RamGraph, Tail};
use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::ffield::FunctionField;
use crate::gfq::Fq;

/// One blowup, as emitted in the surgery log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryRecord {
    pub event: String,
    pub node: String,
    /// The two curves the node joined.
    pub curves: [String; 2],
    pub created: Vec<String>,
    /// Chilly coefficients of newly created nodes, with respect to their first curve.
    pub coefficients: Vec<(String, u64)>,
}

/// A cycle of the chilly multigraph: `nodes[k]` joins `curves[k]` and `curves[k+1]` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChillyCycle {
    pub curves: Vec<String>,
    pub nodes: Vec<String>,
}

fn exceptional_curve(graph: &RamGraph, node: &Node, cover: Option<Fq>) -> Curve {
    let id = graph.fresh_id("X");
    let cover = cover.map(|c| {
        let k = FunctionField::new(graph.fields[&node.field].clone());
        k.constant(c)
    });
    Curve { id, kind: CurveKind::Exceptional, field: Some(node.field.clone()), cover, parent: Some(node.id.clone()) }
}

/// Replace a node by an unramified exceptional curve meeting both old curves.
fn blowup_unramified(graph: &mut RamGraph, node: Node, event: &str) -> SurgeryRecord {
    let e = exceptional_curve(graph, &node, None);
    let e_id = e.id.clone();
    graph.nodes.remove(&node.id);
    graph.curves.insert(e_id.clone(), e);
    let mut created = vec![e_id.clone()];
    for (k, e_loc) in [(0, Loc::At(Fq::ZERO)), (1, Loc::Infinity)] {
        let id = graph.fresh_id(&format!("{}.", node.id));
        graph.crossings.insert(
            id.clone(),
            Crossing {
                id: id.clone(),
                curves: [node.curves[k].clone(), e_id.clone()],
                field: node.field.clone(),
                at: [node.at[k], e_loc],
            },
        );
        created.push(id);
    }
    SurgeryRecord { event: event.into(), node: node.id, curves: node.curves, created, coefficients: Vec::new() }
}

/// Blow up a cool node: the exceptional curve is unramified and meets both curves
/// in ordinary curve points.
pub fn blowup_cool(graph: &mut RamGraph, node: &str) -> Result<SurgeryRecord> {
    let class = graph.classify(node)?;
    if class != PointClass::Cool {
        return Err(Error::Precondition(format!("node {node} is {class}, not cool")));
    }
    let n = graph.nodes[node].clone();
    Ok(blowup_unramified(graph, n, "cool-blowup"))
}

/// Blow up a chilly node with coefficient `s`.
///
/// For `s = q - 1` the exceptional curve is unramified and the chilly edge disappears.
/// Otherwise the exceptional curve `E` carries the constant cover `u v` and the node
/// splits into `(C, E)` with coefficient `s + 1` and `(C', E)` with coefficient `s' + 1`,
/// where `s s' = 1 mod q`.
pub fn blowup_chilly(graph: &mut RamGraph, node: &str) -> Result<SurgeryRecord> {
    let class = graph.classify(node)?;
    let PointClass::Chilly { s } = class else {
        return Err(Error::Precondition(format!("node {node} is {class}, not chilly")));
    };
    let n = graph.nodes[node].clone();
    let q = graph.q;
    if s == q - 1 {
        return Ok(blowup_unramified(graph, n, "chilly-delete"));
    }
    let Tail::Separate { u, v } = n.tail else { unreachable!("chilly tails are separate") };
    let field = graph.field(&n.field)?.clone();
    let uv = field.mul(u, v);
    let e = exceptional_curve(graph, &n, Some(uv));
    let e_id = e.id.clone();
    graph.nodes.remove(node);
    graph.curves.insert(e_id.clone(), e);
    let s_inv = inv_mod(s as i64, q).expect("q prime");
    let mut created = vec![e_id.clone()];
    let mut coefficients = Vec::new();
    let sides = [(0, u, Loc::At(Fq::ZERO), (s + 1) % q), (1, v, Loc::Infinity, (s_inv + 1) % q)];
    for (k, unit, e_loc, coeff) in sides {
        let id = graph.fresh_id(&format!("{node}."));
        let new = Node {
            id: id.clone(),
            curves: [n.curves[k].clone(), e_id.clone()],
            field: n.field.clone(),
            at: [n.at[k], e_loc],
            tail: Tail::Separate { u: unit, v: uv },
            w: Fq::ONE,
        };
        debug_assert_eq!(classify_tail(&field, &new.tail)?, PointClass::Chilly { s: coeff });
        graph.nodes.insert(id.clone(), new);
        created.push(id.clone());
        coefficients.push((id, coeff));
    }
    Ok(SurgeryRecord { event: "chilly-blowup".into(), node: node.into(), curves: n.curves, created, coefficients })
}

fn chilly_edges(graph: &RamGraph) -> Result<Vec<(String, [String; 2], u64)>> {
    let mut edges = Vec::new();
    for (id, n) in &graph.nodes {
        if let PointClass::Chilly { s } = graph.classify(id)? {
            edges.push((id.clone(), n.curves.clone(), s));
        }
    }
    Ok(edges)
}

/// Fundamental cycles of the multigraph (ramified curves, chilly nodes), in a
/// deterministic order. Each cycle lists its closing edge first.
pub fn find_chilly_loops(graph: &RamGraph) -> Result<Vec<ChillyCycle>> {
    let edges = chilly_edges(graph)?;
    let mut forest: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut cycles = Vec::new();
    for (id, [a, b], _) in edges {
        match tree_path(&forest, &b, &a) {
            Some((curves, nodes)) => {
                // closing edge a -> b, then the tree path b -> ... -> a
                let mut cyc_nodes = vec![id];
                cyc_nodes.extend(nodes);
                let mut cyc_curves = vec![a.clone()];
                cyc_curves.extend(curves.into_iter().take_while(|c| *c != a));
                cycles.push(ChillyCycle { curves: cyc_curves, nodes: cyc_nodes });
            }
            None => {
                forest.entry(a.clone()).or_default().push((b.clone(), id.clone()));
                forest.entry(b).or_default().push((a, id));
            }
        }
    }
    Ok(cycles)
}

/// Path `from -> to` in the forest: visited curves (starting with `from`, ending with `to`)
/// and the edges used.
fn tree_path(
    forest: &BTreeMap<String, Vec<(String, String)>>,
    from: &str,
    to: &str,
) -> Option<(Vec<String>, Vec<String>)> {
    if from == to {
        return Some((vec![from.to_string()], Vec::new()));
    }
    let mut prev: BTreeMap<String, (String, String)> = BTreeMap::new();
    let mut queue = VecDeque::from([from.to_string()]);
    while let Some(c) = queue.pop_front() {
        for (next, edge) in forest.get(&c).into_iter().flatten() {
            if next != from && !prev.contains_key(next) {
                prev.insert(next.clone(), (c.clone(), edge.clone()));
                if next == to {
                    let (mut curves, mut nodes) = (vec![to.to_string()], Vec::new());
                    let mut cur = to.to_string();
                    while let Some((p, e)) = prev.get(&cur) {
                        curves.push(p.clone());
                        nodes.push(e.clone());
                        cur = p.clone();
                    }
                    curves.reverse();
                    nodes.reverse();
                    return Some((curves, nodes));
                }
                queue.push_back(next.clone());
            }
        }
    }
    None
}

/// Blow up along chilly cycles until none remain.
///
/// The closing edge of the first cycle is blown up repeatedly on its first-curve
/// branch, raising the coefficient by one each time, until it reaches `q - 1`;
/// one more blowup then deletes the edge.
pub fn break_chilly_loops(graph: &mut RamGraph) -> Result<Vec<SurgeryRecord>> {
    let q = graph.q;
    let budget = (q as usize + 1) * chilly_edges(graph)?.len();
    let mut log = Vec::new();
    loop {
        let cycles = find_chilly_loops(graph)?;
        let Some(cycle) = cycles.first() else { break };
        let mut cur = cycle.nodes[0].clone();
        loop {
            if log.len() >= budget {
                return Err(Error::Infeasible(format!("loop breaking exceeded {budget} surgeries")));
            }
            let rec = blowup_chilly(graph, &cur)?;
            let done = rec.event == "chilly-delete";
            let next = rec.created.get(1).cloned();
            log.push(rec);
            if done {
                break;
            }
            cur = next.expect("chilly blowup creates two nodes");
        }
    }
    Ok(log)
}

/// Coefficients `s_i` on ramified curves with `s = s_j / s_i` across every chilly node.
///
/// Each connected component is rooted at its smallest curve id with `s = 1`.
pub fn assign_coefficients(graph: &RamGraph) -> Result<BTreeMap<String, u64>> {
    let q = graph.q;
    for (id, class) in graph.classify_all()? {
        if matches!(class, PointClass::Cool | PointClass::Hot) {
            return Err(Error::Precondition(format!("node {id} is {class}")));
        }
    }
    let edges = chilly_edges(graph)?;
    let mut adj: BTreeMap<&str, Vec<(&str, u64)>> = BTreeMap::new();
    for (_, [a, b], s) in &edges {
        let s_inv = inv_mod(*s as i64, q).expect("q prime");
        adj.entry(a).or_default().push((b, *s));
        adj.entry(b).or_default().push((a, s_inv));
    }
    let mut coeff: BTreeMap<String, u64> = BTreeMap::new();
    for root in graph.ramified_curves() {
        if coeff.contains_key(&root.id) {
            continue;
        }
        coeff.insert(root.id.clone(), 1);
        let mut queue = VecDeque::from([root.id.as_str()]);
        while let Some(c) = queue.pop_front() {
            let sc = coeff[c];
            for &(next, s) in adj.get(c).into_iter().flatten() {
                if !coeff.contains_key(next) {
                    coeff.insert(next.to_string(), sc * s % q);
                    queue.push_back(next);
                }
            }
        }
    }
    for (id, [a, b], s) in &edges {
        if coeff[b] != coeff[a] * s % q {
            return Err(Error::Infeasible(format!(
                "coefficients inconsistent around node {id} (a chilly loop remains)"
            )));
        }
    }
    Ok(coeff)
}
