//! Surface models and their line-oriented text format.
//!
//! ```text
//! brauer-model v1
//! q 3
//!
//! [fields]
//! F7 ell=7 modulus=[0,1]
//!
//! [curves]
//! C1 kind=vertical field=F7 cover=[0,1]/[1]
//! C2 kind=vertical field=F7 cover=[3]
//! D1 kind=horizontal
//!
//! [nodes]
//! n1 curves=C1,C2 field=F7 at=0,1 tail=separate u=3 v=2 w=1
//!
//! [crossings]
//! x1 curves=C1,D1 field=F7 at=2,0
//!
//! [auxiliary]
//! A1 kind=horizontal
//!
//! [intersections]
//! C1 A1 field=F7 at=3 mult=3
//!
//! [relations]
//! R1 C1=1 A1=-1
//!
//! [qset]
//! C1 field=F7 at=4
//! ```
//!
//! Field elements are integers (prime-subfield elements) or coordinate lists
//! `[c0,c1,...]`. Polynomials are coefficient lists, low degree first; a cover is
//! `num/den` or just `num`. Points are `inf` or an element. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ffield::{FunctionField, RationalFunction};
use crate::gfq::{Fq, FqField};
use crate::poly::Poly;
use crate::ramgraph::{
    blowup_cool, break_chilly_loops, Crossing, Curve, CurveKind, Loc, Node, PointClass, RamGraph, SurgeryRecord, Tail,
};

pub const MODEL_HEADER: &str = "brauer-model v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxCurve {
    pub id: String,
    pub kind: CurveKind,
}

/// `(C.A)_P` for a ramified curve `C`, an auxiliary curve `A` and a point `P` on `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub curve: String,
    pub aux: String,
    pub field: String,
    pub at: Loc,
    pub mult: u64,
}

/// A principal divisor: integer combination of curve and auxiliary classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub id: String,
    pub coeffs: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoint {
    pub curve: String,
    pub field: String,
    pub at: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pub graph: RamGraph,
    pub aux: BTreeMap<String, AuxCurve>,
    pub intersections: Vec<Intersection>,
    pub relations: Vec<Relation>,
    pub qset: Vec<QPoint>,
}

impl SurfaceModel {
    pub fn new(q: u64) -> Self {
        SurfaceModel {
            graph: RamGraph::new(q),
            aux: BTreeMap::new(),
            intersections: Vec::new(),
            relations: Vec::new(),
            qset: Vec::new(),
        }
    }

    pub fn q(&self) -> u64 {
        self.graph.q
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        for a in self.aux.keys() {
            if self.graph.curves.contains_key(a) {
                return bad(format!("auxiliary curve {a} is also a model curve"));
            }
        }
        for x in &self.intersections {
            let c = self.graph.curve(&x.curve)?;
            if !c.is_ramified() {
                return bad(format!("intersection with unramified curve {}", x.curve));
            }
            if !self.aux.contains_key(&x.aux) {
                return bad(format!("unknown auxiliary curve {}", x.aux));
            }
            if x.mult == 0 {
                return bad(format!("intersection {} . {} has multiplicity 0", x.curve, x.aux));
            }
            let place = self.graph.place_on(&x.curve, x.at, &x.field)?;
            let k = self.graph.function_field(&x.curve)?;
            let cover = c.cover.as_ref().expect("ramified");
            if k.valuation(&place, cover)?.rem_euclid(self.q() as i64) != 0 {
                return bad(format!("{} meets {} where the cover of {} ramifies", x.aux, x.curve, x.curve));
            }
            for (n, slot) in self.graph.nodes_on(&x.curve) {
                if self.graph.place_on(&x.curve, n.at[slot], &n.field)? == place {
                    return bad(format!("{} passes through node {}", x.aux, n.id));
                }
            }
            for (y, slot) in self.graph.crossings_on(&x.curve) {
                if self.graph.place_on(&x.curve, y.at[slot], &y.field)? == place {
                    return bad(format!("{} passes through crossing {}", x.aux, y.id));
                }
            }
        }
        for r in &self.relations {
            for id in r.coeffs.keys() {
                if !self.graph.curves.contains_key(id) && !self.aux.contains_key(id) {
                    return bad(format!("relation {} mentions unknown curve {id}", r.id));
                }
            }
        }
        for p in &self.qset {
            if !self.graph.curve(&p.curve)?.is_ramified() {
                return bad(format!("qset point on unramified curve {}", p.curve));
            }
            self.graph.place_on(&p.curve, p.at, &p.field)?;
        }
        Ok(())
    }

    /// Blow up every cool node, then break chilly loops. Relations are pulled back:
    /// an exceptional curve inherits the sum of the coefficients of the two curves
    /// through its node.
    pub fn resolve(&self) -> Result<(SurfaceModel, Vec<SurgeryRecord>)> {
        let mut out = self.clone();
        let mut log = Vec::new();
        let cool: Vec<String> =
            out.graph.classify_all()?.into_iter().filter(|(_, c)| *c == PointClass::Cool).map(|(id, _)| id).collect();
        for id in cool {
            log.push(blowup_cool(&mut out.graph, &id)?);
        }
        log.extend(break_chilly_loops(&mut out.graph)?);
        for rec in &log {
            let e = &rec.created[0];
            for r in &mut out.relations {
                let k: i64 = rec.curves.iter().map(|c| r.coeffs.get(c).copied().unwrap_or(0)).sum();
                if k != 0 {
                    r.coeffs.insert(e.clone(), k);
                }
            }
        }
        Ok((out, log))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::default().run(text)
    }

    pub fn to_text(&self) -> String {
        let g = &self.graph;
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_HEADER}\nq {}", g.q);
        out.push_str("\n[fields]\n");
        for (name, f) in &g.fields {
            let _ = writeln!(out, "{name} ell={} modulus={}", f.ell(), int_list(f.modulus()));
        }
        out.push_str("\n[curves]\n");
        for c in g.curves.values() {
            let _ = write!(out, "{} kind={}", c.id, c.kind.name());
            if let Some(f) = &c.field {
                let _ = write!(out, " field={f}");
            }
            if let (Some(cover), Some(f)) = (&c.cover, &c.field) {
                let fld = &g.fields[f];
                let _ = write!(out, " cover={}/{}", show_poly(fld, cover.num()), show_poly(fld, cover.den()));
            }
            if let Some(p) = &c.parent {
                let _ = write!(out, " parent={p}");
            }
            out.push('\n');
        }
        out.push_str("\n[nodes]\n");
        for n in g.nodes.values() {
            let f = &g.fields[&n.field];
            let _ = write!(
                out,
                "{} curves={},{} field={} at={},{}",
                n.id,
                n.curves[0],
                n.curves[1],
                n.field,
                show_loc(f, n.at[0]),
                show_loc(f, n.at[1])
            );
            match n.tail {
                Tail::Separate { u, v } => {
                    let _ = write!(out, " tail=separate u={} v={}", f.show(u), f.show(v));
                }
                Tail::Mixed { m, u, v } => {
                    let _ = write!(out, " tail=mixed m={m} u={} v={}", f.show(u), f.show(v));
                }
            }
            let _ = writeln!(out, " w={}", f.show(n.w));
        }
        out.push_str("\n[crossings]\n");
        for x in g.crossings.values() {
            let f = &g.fields[&x.field];
            let _ = writeln!(
                out,
                "{} curves={},{} field={} at={},{}",
                x.id,
                x.curves[0],
                x.curves[1],
                x.field,
                show_loc(f, x.at[0]),
                show_loc(f, x.at[1])
            );
        }
        out.push_str("\n[auxiliary]\n");
        for a in self.aux.values() {
            let _ = writeln!(out, "{} kind={}", a.id, a.kind.name());
        }
        out.push_str("\n[intersections]\n");
        for x in &self.intersections {
            let f = &g.fields[&x.field];
            let _ = writeln!(out, "{} {} field={} at={} mult={}", x.curve, x.aux, x.field, show_loc(f, x.at), x.mult);
        }
        out.push_str("\n[relations]\n");
        for r in &self.relations {
            let _ = write!(out, "{}", r.id);
            for (c, k) in &r.coeffs {
                let _ = write!(out, " {c}={k}");
            }
            out.push('\n');
        }
        out.push_str("\n[qset]\n");
        for p in &self.qset {
            let f = &g.fields[&p.field];
            let _ = writeln!(out, "{} field={} at={}", p.curve, p.field, show_loc(f, p.at));
        }
        out
    }
}

fn int_list(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn show_poly(f: &FqField, p: &Poly) -> String {
    let parts: Vec<String> =
        if p.is_zero() { vec!["0".into()] } else { p.coeffs().iter().map(|&c| f.show(c)).collect() };
    format!("[{}]", parts.join(","))
}

pub fn show_loc(f: &FqField, loc: Loc) -> String {
    match loc {
        Loc::Infinity => "inf".into(),
        Loc::At(t) => f.show(t),
    }
}

pub fn show_rational(f: &FqField, r: &RationalFunction) -> String {
    format!("{}/{}", show_poly(f, r.num()), show_poly(f, r.den()))
}

/// Split on commas outside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn strip_brackets(s: &str) -> Option<&str> {
    s.strip_prefix('[')?.strip_suffix(']')
}

pub fn parse_int(s: &str) -> std::result::Result<i64, String> {
    s.trim().parse::<i64>().map_err(|_| format!("expected an integer, got `{s}`"))
}

pub fn parse_element(f: &FqField, s: &str) -> std::result::Result<Fq, String> {
    let s = s.trim();
    if let Some(inner) = strip_brackets(s) {
        let coeffs = split_top(inner)
            .into_iter()
            .map(|c| parse_int(c).map(|v| v.rem_euclid(f.ell() as i64) as u64))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        f.from_coeffs(&coeffs).map_err(|e| e.to_string())
    } else {
        Ok(f.from_int(parse_int(s)?))
    }
}

pub fn parse_loc(f: &FqField, s: &str) -> std::result::Result<Loc, String> {
    if s.trim() == "inf" {
        Ok(Loc::Infinity)
    } else {
        parse_element(f, s).map(Loc::At)
    }
}

fn parse_poly(f: &FqField, s: &str) -> std::result::Result<Poly, String> {
    let inner = strip_brackets(s.trim()).ok_or_else(|| format!("expected a list, got `{s}`"))?;
    let coeffs =
        split_top(inner).into_iter().map(|c| parse_element(f, c)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Poly::new(coeffs))
}

pub fn parse_rational(f: &FqField, s: &str) -> std::result::Result<RationalFunction, String> {
    let (num, den) = match s.split_once("]/[") {
        Some((a, b)) => (format!("{a}]"), format!("[{b}")),
        None => (s.to_string(), "[1]".to_string()),
    };
    let k = FunctionField::new(f.clone());
    k.fraction(parse_poly(f, &num)?, parse_poly(f, &den)?).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<CurveKind, String> {
    match s {
        "vertical" => Ok(CurveKind::Vertical),
        "horizontal" => Ok(CurveKind::Horizontal),
        "exceptional" => Ok(CurveKind::Exceptional),
        _ => Err(format!("unknown curve kind `{s}`")),
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

/// `key=value` attributes of one line, in order, plus bare words.
struct Attrs<'a> {
    words: Vec<&'a str>,
    pairs: BTreeMap<&'a str, &'a str>,
}

impl<'a> Attrs<'a> {
    fn parse(line: &'a str) -> std::result::Result<Self, String> {
        let mut words = Vec::new();
        let mut pairs = BTreeMap::new();
        for tok in line.split_whitespace() {
            match tok.split_once('=') {
                Some((k, v)) => {
                    if pairs.insert(k, v).is_some() {
                        return Err(format!("duplicate key `{k}`"));
                    }
                }
                None => words.push(tok),
            }
        }
        Ok(Attrs { words, pairs })
    }

    fn get(&self, key: &str) -> std::result::Result<&'a str, String> {
        self.pairs.get(key).copied().ok_or_else(|| format!("missing `{key}=`"))
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.pairs.get(key).copied()
    }

    fn only(&self, allowed: &[&str]) -> std::result::Result<(), String> {
        match self.pairs.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(format!("unexpected key `{k}`")),
            None => Ok(()),
        }
    }
}

#[derive(Default)]
struct Parser {
    q: Option<u64>,
    model: Option<SurfaceModel>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<SurfaceModel> {
        let mut section = String::new();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno, msg };
            if !saw_header {
                if line != MODEL_HEADER {
                    return Err(err(format!("expected header `{MODEL_HEADER}`")));
                }
                saw_header = true;
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if self.model.is_none() {
                    return Err(err("`q` must precede all sections".into()));
                }
                section = name.to_string();
                continue;
            }
            self.line(&section, line).map_err(err)?;
        }
        if !saw_header {
            return Err(Error::Parse { line: 0, msg: "empty model file".into() });
        }
        let model = self.model.ok_or(Error::Parse { line: 0, msg: "missing `q`".into() })?;
        model.validate()?;
        Ok(model)
    }

    fn line(&mut self, section: &str, line: &str) -> std::result::Result<(), String> {
        if section.is_empty() {
            let rest = line.strip_prefix("q ").ok_or("expected `q <prime>`")?;
            let q = parse_int(rest)?;
            if q < 2 || !crate::arith::is_prime(q as u64) {
                return Err(format!("q = {q} is not prime"));
            }
            self.q = Some(q as u64);
            self.model = Some(SurfaceModel::new(q as u64));
            return Ok(());
        }
        let q = self.q.expect("set with model");
        let model = self.model.as_mut().expect("checked by caller");
        let a = Attrs::parse(line)?;
        let id = *a.words.first().ok_or("missing identifier")?;
        if !valid_id(id) {
            return Err(format!("invalid identifier `{id}`"));
        }
        let g = &mut model.graph;
        let field_of = |g: &RamGraph, name: &str| -> std::result::Result<FqField, String> {
            g.fields.get(name).cloned().ok_or_else(|| format!("unknown field `{name}`"))
        };
        let pair = |s: &str| -> std::result::Result<[String; 2], String> {
            let v: Vec<&str> = s.split(',').collect();
            match v.as_slice() {
                [x, y] if valid_id(x) && valid_id(y) => Ok([x.to_string(), y.to_string()]),
                _ => Err(format!("expected two curve ids, got `{s}`")),
            }
        };
        let locs = |f: &FqField, s: &str| -> std::result::Result<[Loc; 2], String> {
            match split_top(s).as_slice() {
                [x, y] => Ok([parse_loc(f, x)?, parse_loc(f, y)?]),
                _ => Err(format!("expected two points, got `{s}`")),
            }
        };
        let unique = |taken: bool| if taken { Err(format!("duplicate id `{id}`")) } else { Ok(()) };
        match section {
            "fields" => {
                a.only(&["ell", "modulus", "degree"])?;
                unique(g.fields.contains_key(id))?;
                let ell = parse_int(a.get("ell")?)?;
                if ell < 2 {
                    return Err(format!("bad characteristic {ell}"));
                }
                let f = match (a.opt("modulus"), a.opt("degree")) {
                    (Some(m), None) => {
                        let inner = strip_brackets(m).ok_or("modulus must be a list")?;
                        let coeffs = split_top(inner)
                            .into_iter()
                            .map(|c| parse_int(c).map(|v| v.rem_euclid(ell) as u64))
                            .collect::<std::result::Result<Vec<_>, _>>()?;
                        FqField::new(ell as u64, coeffs, q)
                    }
                    (None, Some(d)) => FqField::with_degree(ell as u64, parse_int(d)? as usize, q),
                    (None, None) => FqField::prime(ell as u64, q),
                    _ => return Err("give either modulus= or degree=".into()),
                }
                .map_err(|e| e.to_string())?;
                g.fields.insert(id.into(), f);
            }
            "curves" => {
                a.only(&["kind", "field", "cover", "parent"])?;
                unique(g.curves.contains_key(id))?;
                let kind = parse_kind(a.get("kind")?)?;
                let field = a.opt("field").map(str::to_string);
                let cover = match a.opt("cover") {
                    None => None,
                    Some(c) => {
                        let name = field.as_deref().ok_or("a cover needs field=")?;
                        Some(parse_rational(&field_of(g, name)?, c)?)
                    }
                };
                if let Some(name) = &field {
                    field_of(g, name)?;
                }
                let parent = a.opt("parent").map(str::to_string);
                g.curves.insert(id.into(), Curve { id: id.into(), kind, field, cover, parent });
            }
            "nodes" => {
                a.only(&["curves", "field", "at", "tail", "m", "u", "v", "w"])?;
                unique(g.nodes.contains_key(id) || g.crossings.contains_key(id))?;
                let fname = a.get("field")?;
                let f = field_of(g, fname)?;
                let u = parse_element(&f, a.get("u")?)?;
                let v = parse_element(&f, a.get("v")?)?;
                let tail = match a.get("tail")? {
                    "separate" => {
                        if a.opt("m").is_some() {
                            return Err("m= only applies to tail=mixed".into());
                        }
                        Tail::Separate { u, v }
                    }
                    "mixed" => Tail::Mixed { m: parse_int(a.get("m")?)?, u, v },
                    other => return Err(format!("unknown tail `{other}`")),
                };
                let w = match a.opt("w") {
                    Some(w) => parse_element(&f, w)?,
                    None => Fq::ONE,
                };
                let node = Node {
                    id: id.into(),
                    curves: pair(a.get("curves")?)?,
                    field: fname.into(),
                    at: locs(&f, a.get("at")?)?,
                    tail,
                    w,
                };
                g.nodes.insert(id.into(), node);
            }
            "crossings" => {
                a.only(&["curves", "field", "at"])?;
                unique(g.nodes.contains_key(id) || g.crossings.contains_key(id))?;
                let fname = a.get("field")?;
                let f = field_of(g, fname)?;
                let x = Crossing {
                    id: id.into(),
                    curves: pair(a.get("curves")?)?,
                    field: fname.into(),
                    at: locs(&f, a.get("at")?)?,
                };
                g.crossings.insert(id.into(), x);
            }
            "auxiliary" => {
                a.only(&["kind"])?;
                unique(model.aux.contains_key(id))?;
                let kind = parse_kind(a.get("kind")?)?;
                if kind == CurveKind::Exceptional {
                    return Err("auxiliary curves are vertical or horizontal".into());
                }
                model.aux.insert(id.into(), AuxCurve { id: id.into(), kind });
            }
            "intersections" => {
                a.only(&["field", "at", "mult"])?;
                let aux = *a.words.get(1).ok_or("expected `<curve> <aux>`")?;
                let fname = a.get("field")?;
                let f = field_of(g, fname)?;
                let mult = parse_int(a.get("mult")?)?;
                if mult < 1 {
                    return Err("multiplicity must be positive".into());
                }
                model.intersections.push(Intersection {
                    curve: id.into(),
                    aux: aux.into(),
                    field: fname.into(),
                    at: parse_loc(&f, a.get("at")?)?,
                    mult: mult as u64,
                });
            }
            "relations" => {
                if a.words.len() != 1 {
                    return Err("expected `<id> <curve>=<coefficient> ...`".into());
                }
                let coeffs = a
                    .pairs
                    .iter()
                    .map(|(k, v)| Ok((k.to_string(), parse_int(v)?)))
                    .collect::<std::result::Result<BTreeMap<_, _>, String>>()?;
                model.relations.push(Relation { id: id.into(), coeffs });
            }
            "qset" => {
                a.only(&["field", "at"])?;
                let fname = a.get("field")?;
                let f = field_of(g, fname)?;
                model.qset.push(QPoint { curve: id.into(), field: fname.into(), at: parse_loc(&f, a.get("at")?)? });
            }
            other => return Err(format!("unknown section [{other}]")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "brauer-model v1
q 3
[fields]
F7 ell=7
F49 ell=7 degree=2
[curves]
C1 kind=vertical field=F7 cover=[0,1]   # ramified at the cold nodes t = 0 and t = inf
C2 kind=vertical field=F7 cover=[0,1]/[1]
C3 kind=vertical field=F7 cover=[3]
D1 kind=horizontal
[nodes]
n1 curves=C1,C2 field=F7 at=0,inf tail=mixed m=1 u=3 v=2
n2 curves=C3,C2 field=F7 at=1,3 tail=separate u=3 v=3 w=6
n3 curves=C1,C2 field=F7 at=inf,0 tail=mixed m=2 u=3 v=2
[crossings]
x1 curves=C3,D1 field=F7 at=2,0
[auxiliary]
A1 kind=horizontal
[intersections]
C3 A1 field=F49 at=[1,1] mult=3
[relations]
R1 C3=1 A1=-1
[qset]
C3 field=F7 at=4
";

    #[test]
    fn parse_and_round_trip() {
        let m = SurfaceModel::parse(SAMPLE);
        let m = match m {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        };
        assert_eq!(m.graph.nodes.len(), 3);
        assert_eq!(m.graph.nodes["n2"].w, Fq(6));
        let text = m.to_text();
        let again = SurfaceModel::parse(&text).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = SAMPLE.replace("tail=mixed m=1", "tail=mixed m=x");
        match SurfaceModel::parse(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(SurfaceModel::parse("nope"), Err(Error::Parse { line: 1, .. })));
        let bad = SAMPLE.replace("q 3", "q 7");
        assert!(SurfaceModel::parse(&bad).is_err());
        let bad = SAMPLE.replace("curves=C3,C2", "curves=C3,C9");
        assert!(matches!(SurfaceModel::parse(&bad), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn validation_catches_tail_cover_mismatch() {
        // the cover of C3 is the constant 3, so the tail u must be 3 up to cubes
        let bad = SAMPLE.replace("tail=separate u=3 v=3", "tail=separate u=2 v=3");
        assert!(matches!(SurfaceModel::parse(&bad), Err(Error::InvalidModel(_))));
    }
}
