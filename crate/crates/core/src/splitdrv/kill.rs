//! Residual classes on the ramified curves and the gluing units that kill them.

use std::collections::BTreeMap;

use super::SplittingDatum;
use crate::arith::inv_mod;
use crate::curvebr::{CurveBrauer, CyclicCover, PlaceKey, ResidueVector};
use crate::error::{Error, Result};
use crate::ffield::{FunctionField, Place, RationalFunction};
use crate::gfq::{Fq, FqField};
use crate::model::SurfaceModel;
use crate::poly::Poly;
use crate::ramgraph::{tau_of, Node, Tail};

/// Candidates tried per degree in the gluing-unit search.
const SEARCH_PER_DEGREE: usize = 4000;
/// Number of degrees tried, in steps of q.
const SEARCH_DEGREES: usize = 4;

pub(crate) struct CurveCtx {
    pub k: FunctionField,
    pub br: CurveBrauer,
    pub cover: CyclicCover,
    pub s: u64,
    /// `s^{-1} mod q`.
    pub m: u64,
}

pub(crate) fn curve_ctx(model: &SurfaceModel, id: &str, datum: &SplittingDatum) -> Result<CurveCtx> {
    let q = model.q();
    let k = model.graph.function_field(id)?;
    let br = CurveBrauer::new(k.clone())?;
    let c = model
        .graph
        .curve(id)?
        .cover
        .clone()
        .ok_or_else(|| Error::Precondition(format!("curve {id} is not ramified")))?;
    let cover = br.cover(c)?;
    let s = datum.s.get(id).copied().unwrap_or(0) % q;
    let m = inv_mod(s as i64, q).ok_or_else(|| Error::Precondition(format!("coefficient of {id} is 0 mod q")))?;
    Ok(CurveCtx { k, br, cover, s, m })
}

/// Ramification coordinates of the two residual classes at a cold node with tail
/// `(u delta^m, v pi)`, when `f pi` reads `w pi^s delta^t` there.
///
/// They always satisfy `s chi_0 + t chi_1 = 0`.
pub fn cold_characters(field: &FqField, m: i64, u: Fq, v: Fq, w: Fq, s: u64, t: u64) -> Result<[u64; 2]> {
    let q = field.q() as i64;
    let rho = field.prime_rho().ok_or(Error::MissingRootsOfUnity { q: q as u64, size: field.ell() })?;
    let c = |x: Fq| field.coordinate(x, rho).map(|v| v as i64);
    let (cs, cu, cv, cw) = (c(field.neg(Fq::ONE))?, c(u)?, c(v)?, c(w)?);
    let inv = |x: u64| {
        inv_mod(x as i64, q as u64)
            .map(|y| y as i64)
            .ok_or_else(|| Error::Precondition("cold node coefficient is 0 mod q".into()))
    };
    let (s, t) = (s as i64, t as i64);
    let (s1, t1) = (inv(s as u64)?, inv(t as u64)?);
    let chi0 = m * t * s1 * cs - t * s1 * cu - m * cv + m * s1 * cw;
    let chi1 = s * t1 * m * cs + cu - t1 * m * cw + s * t1 * m * cv;
    Ok([chi0.rem_euclid(q) as u64, chi1.rem_euclid(q) as u64])
}

/// `(C.E)_P` at every point of a ramified curve met by `E`.
pub(crate) fn e_points(
    model: &SurfaceModel,
    curve: &str,
    datum: &SplittingDatum,
) -> Result<BTreeMap<PlaceKey, (Place, i64)>> {
    let mut out: BTreeMap<PlaceKey, (Place, i64)> = BTreeMap::new();
    for x in model.intersections.iter().filter(|x| x.curve == curve) {
        let e = datum.e.get(&x.aux).copied().unwrap_or(0) as i64;
        let place = model.graph.place_on(curve, x.at, &x.field)?;
        let entry = out.entry(PlaceKey::of(&place)).or_insert((place, 0));
        entry.1 += e * x.mult as i64;
    }
    Ok(out)
}

/// Value of a unit `v` at a node, in the node's field.
pub(crate) fn value_at_node(
    model: &SurfaceModel,
    k: &FunctionField,
    place: &Place,
    node: &Node,
    slot: usize,
    v: &RationalFunction,
) -> Result<Fq> {
    let field = model.graph.field(&node.field)?;
    let val = k.reduce(place, v)?;
    Ok(place.residue_embedding(field, tau_of(node.at[slot]))?.apply(val))
}

/// Residual class of `curve` for the datum, with its gluing unit if one is set.
///
/// Cold nodes contribute their character, evaluated with `w` multiplied by the
/// gluing unit's value there; a point where `E` meets the curve with multiplicity
/// `n` contributes `-m n gamma`, `gamma` the coordinate of the cover element; the
/// gluing unit contributes the residues of `(c, v^{-m})` away from the cold nodes.
pub fn residual_class(model: &SurfaceModel, curve: &str, datum: &SplittingDatum) -> Result<ResidueVector> {
    let ctx = curve_ctx(model, curve, datum)?;
    let q = model.q();
    let v = datum.v.get(curve);
    let mut beta = ResidueVector::zero(q);
    let mut cold = Vec::new();
    for (n, slot) in model.graph.nodes_on(curve) {
        let Tail::Mixed { m, u, v: vv } = n.tail else { continue };
        let place = model.graph.place_on(curve, n.at[slot], &n.field)?;
        let field = model.graph.field(&n.field)?;
        let mut w = n.w;
        if let Some(v) = v {
            w = field.mul(w, value_at_node(model, &ctx.k, &place, n, slot, v)?);
        }
        let (s, t) = node_coefficients(datum, n, q);
        let chi = cold_characters(field, m, u, vv, w, s, t)?[slot];
        let key = PlaceKey::of(&place);
        beta.add_at(key.clone(), chi as i64);
        cold.push(key);
    }
    for (key, (place, mult)) in e_points(model, curve, datum)? {
        let cbar = ctx.k.leading_residue(&place, &ctx.cover.c)?;
        let gamma = ctx.br.coordinate(&place, cbar)? as i64;
        beta.add_at(key, -(ctx.m as i64) * mult * gamma);
    }
    if let Some(v) = v {
        let correction = ctx.k.pow(v, -(ctx.m as i64))?;
        let res = ctx.br.symbol_residues(&ctx.cover.c, &correction)?;
        for (key, r) in res.iter() {
            if !cold.contains(key) {
                beta.add_at(key.clone(), *r as i64);
            }
        }
    }
    Ok(beta)
}

pub(crate) fn node_coefficients(datum: &SplittingDatum, n: &Node, q: u64) -> (u64, u64) {
    let s = datum.s.get(&n.curves[0]).copied().unwrap_or(0) % q;
    let t = datum.s.get(&n.curves[1]).copied().unwrap_or(0) % q;
    (s, t)
}

/// Prescribed value of the gluing unit at each marked point of a curve.
fn marks(model: &SurfaceModel, curve: &str, datum: &SplittingDatum, ctx: &CurveCtx) -> Result<Vec<(Place, Fq)>> {
    let q = model.q();
    let mut out: BTreeMap<PlaceKey, (Place, Fq, String)> = BTreeMap::new();
    let mut put = |place: Place, val: Fq, site: String| -> Result<()> {
        let key = PlaceKey::of(&place);
        if let Some((_, old, other)) = out.get(&key) {
            if *old != val {
                return Err(Error::Infeasible(format!(
                    "{site} and {other} on {curve} need different values of the gluing unit"
                )));
            }
            return Ok(());
        }
        out.insert(key, (place, val, site));
        Ok(())
    };
    for (n, slot) in model.graph.nodes_on(curve) {
        let place = model.graph.place_on(curve, n.at[slot], &n.field)?;
        let val = match n.tail {
            Tail::Separate { .. } => Fq::ONE,
            Tail::Mixed { m, u, v } => {
                // v(P) must move chi of the first curve to zero: chi + m s^{-1} coord(v(P)) = 0
                let field = model.graph.field(&n.field)?;
                let (s, t) = node_coefficients(datum, n, q);
                let chi = cold_characters(field, m, u, v, n.w, s, t)?[0] as i64;
                let m_inv = inv_mod(m, q).expect("m prime to q") as i64;
                let target = (-(s as i64) * chi * m_inv).rem_euclid(q as i64) as u64;
                place.residue_field().element_of_coordinate(target, ctx.br.rho())?
            }
        };
        put(place, val, format!("node {}", n.id))?;
    }
    for (x, slot) in model.graph.crossings_on(curve) {
        put(model.graph.place_on(curve, x.at[slot], &x.field)?, Fq::ONE, format!("crossing {}", x.id))?;
    }
    for p in model.qset.iter().filter(|p| p.curve == curve) {
        put(model.graph.place_on(curve, p.at, &p.field)?, Fq::ONE, "a marked point".into())?;
    }
    for (_, (place, _)) in e_points(model, curve, datum)? {
        put(place, Fq::ONE, "an E-point".into())?;
    }
    Ok(out.into_values().map(|(p, v, _)| (p, v)).collect())
}

/// Residue-field element as a polynomial in `t` over the base.
fn representative(k: &FunctionField, place: &Place, r: Fq) -> Result<Poly> {
    if place.degree() == 1 {
        return Ok(Poly::constant(r));
    }
    if !k.base().is_prime_field() {
        return Err(Error::Unsupported("marked places of degree > 1 over an extension".into()));
    }
    Ok(Poly::new(place.residue_field().coeffs(r).into_iter().map(Fq).collect()))
}

/// Polynomial `g` with `g = r_i mod p_i`, and the product of the `p_i`.
fn crt(field: &FqField, parts: &[(Poly, Poly)]) -> Result<(Poly, Poly)> {
    let mut g = Poly::zero();
    let mut modulus = Poly::one();
    for (p, r) in parts {
        let inv = modulus
            .rem(p, field)
            .inv_mod(p, field)
            .ok_or_else(|| Error::Precondition("marked places are not distinct".into()))?;
        let k = r.sub(&g, field).mul_mod(&inv, p, field);
        g = g.add(&modulus.mul(&k, field), field);
        modulus = modulus.mul(p, field);
    }
    Ok((g, modulus))
}

/// Search for `v = g / (t - a)^D` with prescribed values at the marks, `D` a multiple
/// of q, accepted by `accept`.
///
/// Candidates run through `g = g0 + M h` with `h` of fixed leading coefficient in a
/// fixed lexicographic order, so the result is deterministic.
fn interpolate(
    k: &FunctionField,
    marks: &[(Place, Fq)],
    mut accept: impl FnMut(&RationalFunction) -> Result<bool>,
) -> Result<Option<RationalFunction>> {
    let f = k.base();
    let q = f.q() as usize;
    if marks.iter().all(|(_, v)| *v == Fq::ONE) && accept(&k.one())? {
        return Ok(Some(k.one()));
    }
    let inf = marks.iter().find(|(p, _)| p.is_infinite()).map(|(_, v)| *v);
    let finite: Vec<&(Place, Fq)> = marks.iter().filter(|(p, _)| !p.is_infinite()).collect();
    let a = f
        .elements()
        .find(|&a| {
            let lin = Poly::linear(a, f);
            finite.iter().all(|(p, _)| p.polynomial() != Some(&lin))
        })
        .ok_or_else(|| Error::Infeasible("every rational point is marked".into()))?;
    let deg_m: usize = finite.iter().map(|(p, _)| p.degree()).sum();
    let lead = inf.unwrap_or(Fq::ONE);
    let elements: Vec<Fq> = f.elements().collect();
    let d0 = deg_m.div_ceil(q) * q;
    for d in (0..SEARCH_DEGREES).map(|i| d0 + i * q) {
        let mut parts = Vec::new();
        for (p, val) in &finite {
            let r = p.residue_field();
            let shift = r.pow(r.sub(p.root(), p.embed_constant(a)), d as u64);
            let target = r.mul(*val, shift);
            parts.push((p.polynomial().expect("finite").clone(), representative(k, p, target)?));
        }
        let (g0, modulus) = crt(f, &parts)?;
        let free = d - deg_m;
        let mut digits = vec![0usize; free];
        for _ in 0..SEARCH_PER_DEGREE {
            let mut coeffs: Vec<Fq> = digits.iter().map(|&i| elements[i]).collect();
            coeffs.push(lead);
            let h = Poly::new(coeffs);
            let g = g0.add(&modulus.mul(&h, f), f);
            if !g.eval(a, f).is_zero() {
                let den = Poly::linear(a, f).pow(d as u64, f);
                let v = k.fraction(g, den)?;
                if accept(&v)? {
                    return Ok(Some(v));
                }
            }
            if !advance(&mut digits, elements.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Lexicographic successor; false after the last tuple.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Gluing units on every ramified curve that make all residual classes vanish.
///
/// On each curve `v` is a unit at every marked point (nodes, crossings, marked
/// points, `E`-points), equals 1 except at cold nodes, where its value moves the
/// cold character to zero, and satisfies `Delta(c, v) = s beta`, so that
/// `beta + Delta(c, v^{-m}) = 0`.
pub fn kill_residuals(model: &SurfaceModel, mut datum: SplittingDatum) -> Result<SplittingDatum> {
    datum.v.clear();
    let curves: Vec<String> = model.graph.ramified_curves().iter().map(|c| c.id.clone()).collect();
    let mut units = BTreeMap::new();
    for id in curves {
        let ctx = curve_ctx(model, &id, &datum)?;
        let beta = residual_class(model, &id, &datum)?;
        if beta.total() != 0 {
            return Err(Error::Infeasible(format!(
                "residual class on {id} has residue sum {} (the model data violate reciprocity)",
                beta.total()
            )));
        }
        let target = beta.scale(ctx.s as i64);
        let marks = marks(model, &id, &datum, &ctx)?;
        let v = interpolate(&ctx.k, &marks, |v| {
            let res = ctx.br.symbol_residues(&ctx.cover.c, v)?;
            Ok(res.add(&target.neg()).is_empty())
        })?
        .ok_or_else(|| Error::Infeasible(format!("no gluing unit on {id} within the search bound; residual {beta}")))?;
        units.insert(id, v);
    }
    datum.v = units;
    Ok(datum)
}
