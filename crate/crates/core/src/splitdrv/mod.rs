//! The splitting pipeline: index gate, choice of the Kummer element `f pi`, gluing
//! units that kill the residual classes, and the sitewise verifier.

mod kill;
mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::curvebr::{CoverBehaviour, CurveBrauer, PlaceKey};
use crate::error::{Error, Result};
use crate::ffield::RationalFunction;
use crate::gfq::solve_mod_prime;
use crate::model::{show_rational, SurfaceModel};
use crate::ramgraph::{assign_coefficients, PointClass};

pub use kill::{cold_characters, kill_residuals, residual_class};
pub use verify::{verify_splitting, SiteRecord, VerificationReport};

pub const DATUM_HEADER: &str = "brauer-datum v1";

/// Everything needed to write down `f pi`, whose q-th root generates the splitting field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingDatum {
    pub q: u64,
    /// Order of `f pi` along each ramified curve, mod q.
    pub s: BTreeMap<String, u64>,
    /// Coefficients of the auxiliary curves in `E`, mod q; zero coefficients omitted.
    pub e: BTreeMap<String, u64>,
    /// Multipliers of the principal relations combined into `(f pi)`.
    pub multipliers: BTreeMap<String, u64>,
    /// Gluing unit on each ramified curve; `f pi` is replaced by `v f pi`.
    pub v: BTreeMap<String, RationalFunction>,
    /// No relations were used: the principal divisor is taken on trust.
    pub formal: bool,
    /// Test harness: chilly nodes read `f pi` with this coefficient instead of the true one.
    pub perturb_chilly: Option<u64>,
}

impl SplittingDatum {
    /// Symbolic form of `f pi`.
    pub fn m_element(&self) -> String {
        let mut parts: Vec<String> = self.s.iter().map(|(c, s)| format!("{c}^{s}")).collect();
        parts.extend(self.e.iter().map(|(a, e)| format!("{a}^{e}")));
        if self.v.values().any(|v| !v.is_constant() || !v.num().is_one()) {
            parts.push("v".into());
        }
        parts.join(" * ")
    }

    pub fn to_text(&self, model: &SurfaceModel) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "{DATUM_HEADER}\nq {}", self.q);
        let _ = writeln!(out, "mode {}", if self.formal { "formal" } else { "relations" });
        if let Some(t) = self.perturb_chilly {
            let _ = writeln!(out, "perturb-chilly {t}");
        }
        let _ = writeln!(out, "m {}", self.m_element());
        out.push_str("\n[s]\n");
        for (c, s) in &self.s {
            let _ = writeln!(out, "{c} {s}");
        }
        out.push_str("\n[E]\n");
        for (a, e) in &self.e {
            let _ = writeln!(out, "{a} {e}");
        }
        out.push_str("\n[multipliers]\n");
        for (r, l) in &self.multipliers {
            let _ = writeln!(out, "{r} {l}");
        }
        out.push_str("\n[v]\n");
        for (c, v) in &self.v {
            let k = model.graph.function_field(c)?;
            let _ = writeln!(out, "{c} {}", show_rational(k.base(), v));
        }
        Ok(out)
    }
}

/// The index is q exactly when no node is hot; the hot nodes are the witnesses.
pub fn index_is_q(model: &SurfaceModel) -> Result<(bool, Vec<String>)> {
    let hot: Vec<String> =
        model.graph.classify_all()?.into_iter().filter(|(_, c)| *c == PointClass::Hot).map(|(id, _)| id).collect();
    Ok((hot.is_empty(), hot))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConstructOptions {
    /// Ignore the relations and treat the auxiliary coefficients as free.
    pub formal: bool,
}

/// Auxiliary-curve coefficients of one intersection point, keyed by aux id.
type PointRow = BTreeMap<String, i64>;

/// Intersection points of auxiliary curves with ramified curves where the cover is inert.
fn nonsplit_points(model: &SurfaceModel) -> Result<Vec<(String, PlaceKey, PointRow)>> {
    let mut groups: BTreeMap<(String, PlaceKey), PointRow> = BTreeMap::new();
    for x in &model.intersections {
        let place = model.graph.place_on(&x.curve, x.at, &x.field)?;
        let br = CurveBrauer::new(model.graph.function_field(&x.curve)?)?;
        let cover = br.cover(model.graph.curve(&x.curve)?.cover.clone().expect("ramified"))?;
        match br.behaviour(&cover, &place)? {
            CoverBehaviour::Split => continue,
            CoverBehaviour::Ramified => {
                return Err(Error::InvalidModel(format!("{} meets {} at a ramified point", x.aux, x.curve)))
            }
            CoverBehaviour::Inert => {}
        }
        let row = groups.entry((x.curve.clone(), PlaceKey::of(&place))).or_default();
        *row.entry(x.aux.clone()).or_default() += x.mult as i64;
    }
    Ok(groups.into_iter().map(|((c, k), row)| (c, k, row)).collect())
}

/// Aux coefficients, relation multipliers, formal flag.
pub type Selection = (BTreeMap<String, u64>, BTreeMap<String, u64>, bool);

/// Choice of `E`: returns aux coefficients, relation multipliers and whether the
/// choice is formal.
///
/// With relations, the multipliers `l_r` must make `sum_r l_r R_r` have coefficient
/// `s_i` on each ramified curve and 0 on every other model curve, and the induced
/// `E` must meet each inert point with multiplicity divisible by q. Without relations
/// the aux coefficients are free and only the last condition applies.
pub fn select_e(model: &SurfaceModel, s: &BTreeMap<String, u64>, formal: bool) -> Result<Selection> {
    let q = model.q();
    let qi = q as i64;
    let nonsplit = nonsplit_points(model)?;
    let aux: Vec<&String> = model.aux.keys().collect();
    if formal || model.relations.is_empty() {
        let rows: Vec<Vec<u64>> = nonsplit
            .iter()
            .map(|(_, _, row)| aux.iter().map(|a| row.get(*a).copied().unwrap_or(0).rem_euclid(qi) as u64).collect())
            .collect();
        let e = formal_coefficients(&rows, aux.len(), q);
        let e = aux.iter().zip(e).filter(|(_, c)| *c != 0).map(|(a, c)| ((*a).clone(), c)).collect();
        return Ok((e, BTreeMap::new(), true));
    }
    let rels = &model.relations;
    let coeff = |r: usize, id: &str| rels[r].coeffs.get(id).copied().unwrap_or(0);
    let mut constraints: Vec<(String, Vec<u64>)> = Vec::new();
    for c in model.graph.curves.values() {
        let target = s.get(&c.id).copied().unwrap_or(0);
        let mut row: Vec<u64> = (0..rels.len()).map(|r| coeff(r, &c.id).rem_euclid(qi) as u64).collect();
        row.push(target % q);
        constraints.push((format!("coefficient of {} is {target} mod {q}", c.id), row));
    }
    for (curve, key, point) in &nonsplit {
        let mut row: Vec<u64> = (0..rels.len())
            .map(|r| {
                let k: i64 = point.iter().map(|(a, m)| coeff(r, a) * m).sum();
                k.rem_euclid(qi) as u64
            })
            .collect();
        row.push(0);
        constraints.push((format!("E meets {curve} at {key} with multiplicity 0 mod {q}"), row));
    }
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut sol = vec![0; rels.len()];
    for (label, row) in constraints {
        rows.push(row);
        match solve_mod_prime(&mut rows.clone(), rels.len(), q) {
            Some(x) => sol = x,
            None => return Err(Error::Infeasible(format!("no choice of E from the relations satisfies: {label}"))),
        }
    }
    let mut e = BTreeMap::new();
    for a in aux {
        let k: i64 = (0..rels.len()).map(|r| sol[r] as i64 * coeff(r, a)).sum();
        let k = k.rem_euclid(qi) as u64;
        if k != 0 {
            e.insert(a.clone(), k);
        }
    }
    let multipliers = rels.iter().zip(sol).map(|(r, l)| (r.id.clone(), l)).collect();
    Ok((e, multipliers, false))
}

/// All-ones if admissible, otherwise a solution of the homogeneous system with the
/// first possible coefficient pinned to 1, otherwise zero.
fn formal_coefficients(rows: &[Vec<u64>], n: usize, q: u64) -> Vec<u64> {
    let ones = vec![1; n];
    if rows.iter().all(|r| r.iter().sum::<u64>() % q == 0) {
        return ones;
    }
    for j in 0..n {
        let mut sys: Vec<Vec<u64>> = rows.iter().map(|r| [r.as_slice(), &[0]].concat()).collect();
        let mut pin = vec![0; n + 1];
        pin[j] = 1;
        pin[n] = 1;
        sys.push(pin);
        if let Some(x) = solve_mod_prime(&mut sys, n, q) {
            return x;
        }
    }
    vec![0; n]
}

/// Coefficients, `E` and gluing units for a resolved, hot-free model.
pub fn construct_splitting(model: &SurfaceModel, opts: ConstructOptions) -> Result<SplittingDatum> {
    let (ok, hot) = index_is_q(model)?;
    if !ok {
        return Err(Error::Precondition(format!("index exceeds q: hot points [{}]", hot.join(", "))));
    }
    let s = assign_coefficients(&model.graph)?;
    let (e, multipliers, formal) = select_e(model, &s, opts.formal)?;
    let datum = SplittingDatum { q: model.q(), s, e, multipliers, v: BTreeMap::new(), formal, perturb_chilly: None };
    kill_residuals(model, datum)
}

#[cfg(test)]
mod tests;
