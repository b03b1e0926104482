//! Sitewise certificate that `K((f pi)^{1/q})` splits all the ramification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::kill::{cold_characters, curve_ctx, e_points, node_coefficients, value_at_node};
use super::{residual_class, SplittingDatum};
use crate::curvebr::{CoverBehaviour, PlaceKey, ResidueVector};
use crate::error::{Error, Result};
use crate::ffield::{split_check_monomial, split_mode, BivariateField, MonomialValuation, Place, RatFunc2, SplitMode};
use crate::model::SurfaceModel;
use crate::ramgraph::{PointClass, Tail};

/// One verified site. Fields are in lexicographic order so the JSON form is stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiteRecord {
    pub kind: String,
    pub site: String,
    pub theorem: String,
    pub verdict: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub formal: bool,
    pub overall: bool,
    pub sites: Vec<SiteRecord>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "overall: {}", if self.overall { "pass" } else { "FAIL" });
        if self.formal {
            out.push_str("mode: formal (principal divisor not certified)\n");
        }
        for s in &self.sites {
            let verdict = if s.verdict { "pass" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {} {} [{}]: {}", s.kind, s.site, s.theorem, s.witness);
        }
        out
    }
}

enum Site {
    Curve(String),
    Chilly(String),
    Cold(String),
    Point { curve: String, key: PlaceKey, place: Box<Place>, sources: Vec<String>, e_mult: i64 },
    Residual(String),
}

fn record(kind: &str, site: String, theorem: &str, verdict: bool, witness: String) -> SiteRecord {
    SiteRecord { kind: kind.into(), site, theorem: theorem.into(), verdict, witness }
}

/// Check every site; failures are verdicts, errors only signal malformed input.
///
/// Sites run in parallel on the current rayon pool; the order of the report does
/// not depend on the number of threads.
pub fn verify_splitting(model: &SurfaceModel, datum: &SplittingDatum) -> Result<VerificationReport> {
    let ramified: Vec<String> = model.graph.ramified_curves().iter().map(|c| c.id.clone()).collect();
    for c in &ramified {
        if !datum.v.contains_key(c) {
            return Err(Error::Precondition(format!("datum has no gluing unit for {c}")));
        }
    }
    let betas: BTreeMap<String, ResidueVector> =
        ramified.par_iter().map(|c| Ok((c.clone(), residual_class(model, c, datum)?))).collect::<Result<_>>()?;
    let mut sites: Vec<Site> = ramified.iter().cloned().map(Site::Curve).collect();
    for (id, class) in model.graph.classify_all()? {
        match class {
            PointClass::Chilly { .. } => sites.push(Site::Chilly(id)),
            PointClass::Cold => sites.push(Site::Cold(id)),
            _ => {}
        }
    }
    for c in &ramified {
        sites.extend(curve_points(model, c, datum)?);
    }
    sites.extend(ramified.iter().cloned().map(Site::Residual));
    let records: Vec<SiteRecord> = sites.par_iter().map(|s| check(model, datum, &betas, s)).collect::<Result<_>>()?;
    let overall = records.iter().all(|r| r.verdict);
    Ok(VerificationReport { formal: datum.formal, overall, sites: records })
}

/// Points of a ramified curve where `f pi` has a divisor component other than the
/// curve itself, plus crossings and marked points.
fn curve_points(model: &SurfaceModel, curve: &str, datum: &SplittingDatum) -> Result<Vec<Site>> {
    let mut pts: BTreeMap<PlaceKey, (Place, Vec<String>, i64)> = BTreeMap::new();
    let mut add = |place: Place, source: String, mult: i64| {
        let e = pts.entry(PlaceKey::of(&place)).or_insert((place, Vec::new(), 0));
        e.1.push(source);
        e.2 += mult;
    };
    for (_, (place, mult)) in e_points(model, curve, datum)? {
        add(place, "E".into(), mult);
    }
    for (x, slot) in model.graph.crossings_on(curve) {
        add(model.graph.place_on(curve, x.at[slot], &x.field)?, format!("crossing {}", x.id), 0);
    }
    for p in model.qset.iter().filter(|p| p.curve == curve) {
        add(model.graph.place_on(curve, p.at, &p.field)?, "marked".into(), 0);
    }
    let k = model.graph.function_field(curve)?;
    let v = &datum.v[curve];
    for place in k.support(&[v])? {
        if k.valuation(&place, v)? != 0 {
            add(place, "gluing unit".into(), 0);
        }
    }
    Ok(pts
        .into_iter()
        .map(|(key, (place, sources, e_mult))| Site::Point {
            curve: curve.into(),
            key,
            place: Box::new(place),
            sources,
            e_mult,
        })
        .collect())
}

fn check(
    model: &SurfaceModel,
    datum: &SplittingDatum,
    betas: &BTreeMap<String, ResidueVector>,
    site: &Site,
) -> Result<SiteRecord> {
    let q = model.q();
    match site {
        Site::Curve(c) => {
            let s = datum.s.get(c).copied().unwrap_or(0) as i64;
            let mode = split_mode(q, false, s, |_| Ok(false))?;
            let ok = mode == SplitMode::ByRamification;
            Ok(record(
                "ramified-curve",
                c.clone(),
                "totally-ramified",
                ok,
                format!("order of m along {c} is {s}, {mode:?}"),
            ))
        }
        Site::Chilly(id) => check_chilly(model, datum, betas, id),
        Site::Cold(id) => check_cold(model, datum, id),
        Site::Point { curve, key, place, sources, e_mult } => {
            let ctx = curve_ctx(model, curve, datum)?;
            let ord_v = ctx.k.valuation(place, &datum.v[curve])?;
            let order = e_mult + ord_v;
            let name = format!("{curve}@{key}");
            let from = sources.join(", ");
            Ok(match ctx.br.behaviour(&ctx.cover, place)? {
                CoverBehaviour::Split => record("curve-point", name, "vacuous", true, format!("split point ({from})")),
                CoverBehaviour::Inert => {
                    let ok = order.rem_euclid(q as i64) == 0;
                    let w = format!("nonsplit point ({from}); order of m transverse to {curve} is {order}");
                    record("curve-point", name, "curve-point-shape", ok, w)
                }
                CoverBehaviour::Ramified => record(
                    "curve-point",
                    name,
                    "curve-point-shape",
                    false,
                    format!("cover of {curve} ramifies at a point of the divisor of m ({from})"),
                ),
            })
        }
        Site::Residual(c) => {
            let beta = &betas[c];
            Ok(record("residual-class", c.clone(), "residual-class-zero", beta.is_empty(), format!("residues {beta}")))
        }
    }
}

/// Valuations `(a, b)` with `0 <= a, b <= bound`, ordered by `max(a, b)`, so the
/// first failure found lies in the smallest possible box.
fn grid(bound: u64) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> =
        (0..=bound).flat_map(|a| (0..=bound).map(move |b| (a, b))).filter(|&p| p != (0, 0)).collect();
    out.sort_by_key(|&(a, b)| (a.max(b), a, b));
    out
}

fn check_chilly(
    model: &SurfaceModel,
    datum: &SplittingDatum,
    betas: &BTreeMap<String, ResidueVector>,
    id: &str,
) -> Result<SiteRecord> {
    let q = model.q();
    let n = model.graph.node(id)?;
    let Tail::Separate { u, v } = n.tail else { unreachable!("chilly tails are separate") };
    let field = model.graph.field(&n.field)?;
    let (s0, s1) = node_coefficients(datum, n, q);
    let exps = match datum.perturb_chilly {
        Some(t) => (s0, s0 * t % q),
        None => (s0, s1),
    };
    let bf = BivariateField::new(field.clone());
    let m = RatFunc2::monomial(n.w, exps.0 as i64, exps.1 as i64);
    let tail = [(RatFunc2::constant(u), RatFunc2::x()), (RatFunc2::constant(v), RatFunc2::y())];
    let mut failure = None;
    let cells = grid(3 * q);
    for &(a, b) in &cells {
        let d = MonomialValuation::new(a, b)?;
        let ram = bf.ramification_of_sum(&d, &tail)?;
        let mode = split_check_monomial(&bf, &d, &m, &ram)?;
        if !mode.splits() {
            failure = Some((a, b));
            break;
        }
    }
    let mut images = Vec::new();
    for (k, c) in n.curves.iter().enumerate() {
        let place = model.graph.place_on(c, n.at[k], &n.field)?;
        images.push(betas[c].get(&PlaceKey::of(&place)));
    }
    let equal = images[0] == images[1];
    let site = id.to_string();
    let coeff = if exps.0 == 0 { 0 } else { exps.1 * crate::arith::inv_mod(exps.0 as i64, q).unwrap_or(0) % q };
    Ok(match failure {
        Some((a, b)) => record(
            "chilly-node",
            site,
            "monomial-grid",
            false,
            format!("valuation (a,b)=({a},{b}) is not split by m with local coefficient {coeff}"),
        ),
        None => record(
            "chilly-node",
            site,
            "monomial-grid",
            equal,
            format!(
                "{} valuations with a,b <= {} split; residual images {} and {}",
                cells.len(),
                3 * q,
                images[0],
                images[1]
            ),
        ),
    })
}

fn check_cold(model: &SurfaceModel, datum: &SplittingDatum, id: &str) -> Result<SiteRecord> {
    let q = model.q();
    let n = model.graph.node(id)?;
    let Tail::Mixed { m, u, v } = n.tail else { unreachable!("cold tails are mixed") };
    let field = model.graph.field(&n.field)?;
    let (s, t) = node_coefficients(datum, n, q);
    let mut chis = [0u64; 2];
    let mut relation = true;
    for (k, c) in n.curves.iter().enumerate() {
        let ctx = curve_ctx(model, c, datum)?;
        let place = model.graph.place_on(c, n.at[k], &n.field)?;
        let w = field.mul(n.w, value_at_node(model, &ctx.k, &place, n, k, &datum.v[c])?);
        let both = cold_characters(field, m, u, v, w, s, t)?;
        chis[k] = both[k];
        relation &= (s * both[0] + t * both[1]) % q == 0;
    }
    let ok = chis == [0, 0] && relation;
    Ok(record(
        "cold-node",
        id.into(),
        "cold-criterion",
        ok,
        format!(
            "characters ({}, {}) on {}, {}; s*chi + t*chi' = 0: {relation}",
            chis[0], chis[1], n.curves[0], n.curves[1]
        ),
    ))
}
