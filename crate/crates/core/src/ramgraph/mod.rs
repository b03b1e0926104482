//! The combinatorial surface model: ramification curves with their covers, nodal
//! points with tails, and the point classifier.

mod surgery;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::ffield::{FunctionField, Place, RationalFunction};
use crate::gfq::{Fq, FqField};

pub use surgery::{
    assign_coefficients, blowup_chilly, blowup_cool, break_chilly_loops, find_chilly_loops, ChillyCycle, SurgeryRecord,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Vertical,
    Horizontal,
    Exceptional,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Vertical => "vertical",
            CurveKind::Horizontal => "horizontal",
            CurveKind::Exceptional => "exceptional",
        }
    }
}

/// Position of a point on a curve's `P^1` residue curve: `t = value` or `t = infinity`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loc {
    At(Fq),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub id: String,
    pub kind: CurveKind,
    /// Name of the constant field of the residue curve (absent for horizontal curves).
    pub field: Option<String>,
    /// `c` with ramification `F(C)(c^{1/q})`; present iff the curve is ramified.
    pub cover: Option<RationalFunction>,
    /// Node whose blowup created this curve.
    pub parent: Option<String>,
}

impl Curve {
    pub fn is_ramified(&self) -> bool {
        self.cover.is_some()
    }
}

/// Local shape of the class at a nodal point, `pi` defining the first curve and
/// `delta` the second.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// `(u, pi) + (v, delta)`.
    Separate { u: Fq, v: Fq },
    /// `(u delta^m, v pi)` with `m` prime to q.
    Mixed { m: i64, u: Fq, v: Fq },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub curves: [String; 2],
    /// Name of the residue field of the point.
    pub field: String,
    pub at: [Loc; 2],
    pub tail: Tail,
    /// Unit part of the Kummer element at the point: locally `w pi^{s_C} delta^{s_C'}`.
    pub w: Fq,
}

/// A transversal meeting of a ramified curve with an unramified curve of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub id: String,
    pub curves: [String; 2],
    pub field: String,
    pub at: [Loc; 2],
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum PointClass {
    Distant,
    CurvePoint { split: bool },
    Cold,
    Cool,
    Chilly { s: u64 },
    Hot,
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointClass::Distant => write!(f, "Distant"),
            PointClass::CurvePoint { split } => {
                write!(f, "CurvePoint {}", if *split { "split" } else { "nonsplit" })
            }
            PointClass::Cold => write!(f, "Cold"),
            PointClass::Cool => write!(f, "Cool"),
            PointClass::Chilly { s } => write!(f, "Chilly s={s}"),
            PointClass::Hot => write!(f, "Hot"),
        }
    }
}

/// Classify a tail over its residue field, after adjoining the q-th roots of unity.
pub fn classify_tail(field: &FqField, tail: &Tail) -> Result<PointClass> {
    let q = field.q();
    let (u, v) = match *tail {
        Tail::Mixed { m, .. } => {
            if m.rem_euclid(q as i64) == 0 {
                return Err(Error::InvalidModel(format!("tail exponent m = {m} divisible by q")));
            }
            return Ok(PointClass::Cold);
        }
        Tail::Separate { u, v } => (u, v),
    };
    if u.is_zero() || v.is_zero() {
        return Err(Error::InvalidModel("tail units must be nonzero".into()));
    }
    let closure = field.mu_q_closure()?;
    let big = closure.field();
    let cu = big.unit_class(closure.embedding.apply(u))?.exponent;
    let cv = big.unit_class(closure.embedding.apply(v))?.exponent;
    Ok(match (cu, cv) {
        (0, 0) => PointClass::Cool,
        (0, _) | (_, 0) => PointClass::Hot,
        _ => {
            let s = inv_mod(cu as i64, q).expect("q prime") * cv % q;
            PointClass::Chilly { s }
        }
    })
}

/// The residual obstruction at a node: `ubar` outside `<vbar> (F*)^q`, in either orientation.
///
/// Decided by enumerating the subgroup, independently of [`classify_tail`].
pub fn hot_obstruction(field: &FqField, u: Fq, v: Fq) -> Result<bool> {
    let closure = field.mu_q_closure()?;
    let big = closure.field();
    let (u, v) = (closure.embedding.apply(u), closure.embedding.apply(v));
    let q = big.q();
    let qth: BTreeSet<Fq> = big.units().map(|x| big.pow(x, q)).collect();
    let generated = |g: Fq| -> BTreeSet<Fq> {
        let mut out = BTreeSet::new();
        let mut gj = Fq::ONE;
        for _ in 0..q {
            out.extend(qth.iter().map(|&c| big.mul(c, gj)));
            gj = big.mul(gj, g);
        }
        out
    };
    Ok(!generated(v).contains(&u) || !generated(u).contains(&v))
}

/// Ramification curves, nodal points and crossings, with their fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamGraph {
    pub q: u64,
    pub fields: BTreeMap<String, FqField>,
    pub curves: BTreeMap<String, Curve>,
    pub nodes: BTreeMap<String, Node>,
    pub crossings: BTreeMap<String, Crossing>,
}

impl RamGraph {
    pub fn new(q: u64) -> Self {
        RamGraph {
            q,
            fields: BTreeMap::new(),
            curves: BTreeMap::new(),
            nodes: BTreeMap::new(),
            crossings: BTreeMap::new(),
        }
    }

    pub fn field(&self, name: &str) -> Result<&FqField> {
        self.fields.get(name).ok_or_else(|| Error::InvalidModel(format!("unknown field {name}")))
    }

    pub fn curve(&self, id: &str) -> Result<&Curve> {
        self.curves.get(id).ok_or_else(|| Error::InvalidModel(format!("unknown curve {id}")))
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.nodes.get(id).ok_or_else(|| Error::InvalidModel(format!("unknown node {id}")))
    }

    /// `F(C)` for a curve with a residue curve.
    pub fn function_field(&self, curve: &str) -> Result<FunctionField> {
        let c = self.curve(curve)?;
        let name = c
            .field
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("curve {curve} has no residue curve over a finite field")))?;
        Ok(FunctionField::new(self.field(name)?.clone()))
    }

    /// The place of `F(C)` under a point given in `field` coordinates.
    pub fn place_on(&self, curve: &str, loc: Loc, field: &str) -> Result<Place> {
        let k = self.function_field(curve)?;
        match loc {
            Loc::Infinity => Ok(k.infinity()),
            Loc::At(tau) => k.place_of_point(tau, self.field(field)?),
        }
    }

    pub fn classify(&self, node: &str) -> Result<PointClass> {
        let n = self.node(node)?;
        classify_tail(self.field(&n.field)?, &n.tail)
    }

    /// Classes of all nodes in id order.
    pub fn classify_all(&self) -> Result<Vec<(String, PointClass)>> {
        self.nodes.keys().map(|id| Ok((id.clone(), self.classify(id)?))).collect()
    }

    /// Whether the ramified curve of a crossing is split there.
    pub fn classify_crossing(&self, id: &str) -> Result<PointClass> {
        let x = self.crossings.get(id).ok_or_else(|| Error::InvalidModel(format!("unknown crossing {id}")))?;
        for (k, curve) in x.curves.iter().enumerate() {
            let c = self.curve(curve)?;
            if let Some(cover) = &c.cover {
                let place = self.place_on(curve, x.at[k], &x.field)?;
                let kf = self.function_field(curve)?;
                let cbar = kf.leading_residue(&place, cover)?;
                let split = place.residue_field().is_qth_power(cbar);
                return Ok(PointClass::CurvePoint { split });
            }
        }
        Ok(PointClass::Distant)
    }

    /// Ramified curves in id order.
    pub fn ramified_curves(&self) -> Vec<&Curve> {
        self.curves.values().filter(|c| c.is_ramified()).collect()
    }

    /// Nodes incident to a curve, with the curve's slot (0 or 1) in each.
    pub fn nodes_on(&self, curve: &str) -> Vec<(&Node, usize)> {
        self.nodes.values().filter_map(|n| n.curves.iter().position(|c| c == curve).map(|k| (n, k))).collect()
    }

    pub fn crossings_on(&self, curve: &str) -> Vec<(&Crossing, usize)> {
        self.crossings.values().filter_map(|x| x.curves.iter().position(|c| c == curve).map(|k| (x, k))).collect()
    }

    /// A fresh identifier `prefix<n>` not used by any curve, node or crossing.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|id| {
                !self.curves.contains_key(id) && !self.nodes.contains_key(id) && !self.crossings.contains_key(id)
            })
            .expect("unbounded")
    }

    /// Structural and local-consistency checks on the model.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        for (name, f) in &self.fields {
            if f.q() != self.q {
                return bad(format!("field {name} built for a different q"));
            }
        }
        for c in self.curves.values() {
            if let Some(f) = &c.field {
                self.field(f)?;
            }
            match c.kind {
                CurveKind::Horizontal if c.cover.is_some() => {
                    return bad(format!("curve {}: ramified horizontal curves are not supported", c.id));
                }
                CurveKind::Vertical | CurveKind::Exceptional if c.field.is_none() => {
                    return bad(format!("curve {} needs a constant field", c.id));
                }
                CurveKind::Exceptional if c.parent.is_none() => {
                    return bad(format!("exceptional curve {} needs a parent event", c.id));
                }
                _ => {}
            }
            if let Some(cover) = &c.cover {
                let k = self.function_field(&c.id)?;
                if cover.is_zero() {
                    return bad(format!("curve {}: zero cover element", c.id));
                }
                if k.is_qth_power(cover)? {
                    return bad(format!("curve {}: cover element is a q-th power", c.id));
                }
            }
        }
        for n in self.nodes.values() {
            self.validate_node(n)?;
        }
        for x in self.crossings.values() {
            self.validate_crossing(x)?;
        }
        for c in self.curves.values().filter(|c| c.is_ramified()) {
            self.validate_cover_ramification(c)?;
        }
        Ok(())
    }

    fn validate_node(&self, n: &Node) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("node {}: {msg}", n.id)));
        if n.curves[0] == n.curves[1] {
            return bad("a node must join two distinct curves".into());
        }
        let field = self.field(&n.field)?;
        classify_tail(field, &n.tail)?;
        if n.w.is_zero() || !field.contains(n.w) {
            return bad("w must be a nonzero element of the node field".into());
        }
        for (k, curve) in n.curves.iter().enumerate() {
            let c = self.curve(curve)?;
            let Some(cover) = &c.cover else {
                return bad(format!("curve {curve} is unramified; use a crossing instead"));
            };
            let place = self.place_on(curve, n.at[k], &n.field)?;
            if place.residue_field().size() != field.size() {
                return bad(format!("the point on {curve} does not generate the node field"));
            }
            let kf = self.function_field(curve)?;
            let ord = kf.valuation(&place, cover)?;
            let q = self.q as i64;
            match n.tail {
                Tail::Separate { u, v } => {
                    if ord.rem_euclid(q) != 0 {
                        return bad(format!("cover of {curve} ramifies at a non-cold node"));
                    }
                    let expected = if k == 0 { u } else { v };
                    let cbar = kf.leading_residue(&place, cover)?;
                    let emb = place.residue_embedding(field, tau_of(n.at[k]))?;
                    let ratio = field.div(emb.apply(cbar), expected)?;
                    if !field.is_qth_power(ratio) {
                        return bad(format!("cover of {curve} disagrees with the tail at the node"));
                    }
                }
                Tail::Mixed { m, .. } => {
                    let want = if k == 0 { m } else { -m };
                    if (ord - want).rem_euclid(q) != 0 {
                        return bad(format!("cover of {curve} has order {ord} at a cold node, expected {want} mod q"));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_crossing(&self, x: &Crossing) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("crossing {}: {msg}", x.id)));
        if x.curves[0] == x.curves[1] {
            return bad("a crossing must join two distinct curves".into());
        }
        self.field(&x.field)?;
        let ramified: Vec<_> =
            x.curves.iter().map(|c| self.curve(c).map(|c| c.is_ramified())).collect::<Result<_>>()?;
        if ramified.iter().all(|&r| r) {
            return bad("both curves ramified; use a node".into());
        }
        for (k, curve) in x.curves.iter().enumerate() {
            let c = self.curve(curve)?;
            if let Some(cover) = &c.cover {
                let place = self.place_on(curve, x.at[k], &x.field)?;
                let ord = self.function_field(curve)?.valuation(&place, cover)?;
                if ord.rem_euclid(self.q as i64) != 0 {
                    return bad(format!("cover of {curve} ramifies at a crossing"));
                }
            }
        }
        Ok(())
    }

    /// A ramified curve's cover may only ramify at its cold nodes.
    fn validate_cover_ramification(&self, c: &Curve) -> Result<()> {
        let k = self.function_field(&c.id)?;
        let cover = c.cover.as_ref().expect("ramified");
        let mut cold = Vec::new();
        for (n, slot) in self.nodes_on(&c.id) {
            if matches!(n.tail, Tail::Mixed { .. }) {
                cold.push(self.place_on(&c.id, n.at[slot], &n.field)?);
            }
        }
        for place in k.support(&[cover])? {
            if k.valuation(&place, cover)?.rem_euclid(self.q as i64) != 0 && !cold.contains(&place) {
                return Err(Error::InvalidModel(format!("cover of {} ramifies away from its cold nodes", c.id)));
            }
        }
        Ok(())
    }
}

/// The coordinate value of a finite location; infinity maps to zero (only used with
/// places whose residue field is the constant field).
pub(crate) fn tau_of(loc: Loc) -> Fq {
    match loc {
        Loc::At(t) => t,
        Loc::Infinity => Fq::ZERO,
    }
}

#[cfg(test)]
mod tests;
