//! Randomized internal consistency suites, run by `brauer selfcheck`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvebr::CurveBrauer;
use crate::error::{Error, Result};
use crate::ffield::{FunctionField, RationalFunction};
use crate::gfq::{Fq, FqField};
use crate::poly::Poly;
use crate::ramgraph::{
    assign_coefficients, blowup_chilly, break_chilly_loops, classify_tail, find_chilly_loops, Curve, CurveKind, Loc,
    Node, PointClass, RamGraph, Tail,
};

pub const SUITES: [&str; 6] = ["reciprocity", "steinberg", "bilinearity", "blowup", "loop-breaking", "coefficients"];

/// Failures past this many are counted but not described.
const KEEP_FAILURES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), passed: 0, total: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < KEEP_FAILURES {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match name {
        "reciprocity" => reciprocity(&mut rng),
        "steinberg" => steinberg(&mut rng),
        "bilinearity" => bilinearity(&mut rng),
        "blowup" => blowup(),
        "loop-breaking" => loop_breaking(&mut rng),
        "coefficients" => coefficients(&mut rng),
        _ => Err(Error::Precondition(format!("unknown suite {name}; known: {}", SUITES.join(", ")))),
    }
}

pub fn random_poly(rng: &mut impl Rng, field: &FqField, max_deg: usize) -> Poly {
    loop {
        let d = rng.gen_range(0..=max_deg);
        let p = Poly::new((0..=d).map(|_| Fq(rng.gen_range(0..field.size()))).collect());
        if !p.is_zero() {
            return p;
        }
    }
}

/// Nonzero element of `F(t)` with numerator and denominator of degree at most `max_deg`.
pub fn random_function(rng: &mut impl Rng, k: &FunctionField, max_deg: usize) -> RationalFunction {
    let num = random_poly(rng, k.base(), max_deg);
    let den = random_poly(rng, k.base(), max_deg);
    k.fraction(num, den).expect("nonzero denominator")
}

fn brauer(ell: u64, q: u64) -> Result<CurveBrauer> {
    CurveBrauer::new(FunctionField::new(FqField::prime(ell, q)?))
}

const FIELDS: [(u64, u64); 2] = [(7, 3), (13, 3)];

fn reciprocity(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("reciprocity");
    for (ell, q) in FIELDS {
        let br = brauer(ell, q)?;
        let k = br.field();
        for _ in 0..100 {
            let (a, b) = (random_function(rng, k, 6), random_function(rng, k, 6));
            let total = br.symbol_residues(&a, &b)?.total();
            out.check(total == 0, || format!("F{ell}: residues of ({a:?}, {b:?}) sum to {total}"));
        }
    }
    Ok(out)
}

fn steinberg(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("steinberg");
    for (ell, q) in FIELDS {
        let br = brauer(ell, q)?;
        let k = br.field();
        let mut cases: Vec<RationalFunction> = k.base().units().map(|a| k.mul(&k.constant(a), &k.t())).collect();
        cases.extend((0..30).map(|_| random_function(rng, k, 4)));
        for a in cases {
            let one_minus = k.sub(&k.one(), &a);
            if !one_minus.is_zero() {
                let r = br.symbol_residues(&a, &one_minus)?;
                out.check(r.is_empty(), || format!("F{ell}: (a, 1-a) = {r} for a = {a:?}"));
            }
            let r = br.symbol_residues(&a, &k.neg(&a))?;
            out.check(r.is_empty(), || format!("F{ell}: (a, -a) = {r} for a = {a:?}"));
        }
    }
    Ok(out)
}

fn bilinearity(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("bilinearity");
    for (ell, q) in FIELDS {
        let br = brauer(ell, q)?;
        let k = br.field();
        for _ in 0..25 {
            let [a1, a2, b] = [0; 3].map(|_| random_function(rng, k, 4));
            let lhs = br.symbol_residues(&k.mul(&a1, &a2), &b)?;
            let rhs = br.symbol_residues(&a1, &b)?.add(&br.symbol_residues(&a2, &b)?);
            out.check(lhs == rhs, || format!("F{ell}: (a1 a2, b) = {lhs}, (a1, b) + (a2, b) = {rhs}"));
            let ab = br.symbol_residues(&a1, &b)?;
            let ba = br.symbol_residues(&b, &a1)?;
            out.check(ab == ba.neg(), || format!("F{ell}: (a, b) = {ab}, (b, a) = {ba}"));
        }
    }
    Ok(out)
}

/// Graph on curves `C1..Cn` over `F_ell` with a placeholder cover and the given separate tails.
pub fn graph_of(ell: u64, q: u64, curves: usize, edges: &[(usize, usize, Fq, Fq)]) -> Result<RamGraph> {
    let field = FqField::prime(ell, q)?;
    let k = FunctionField::new(field.clone());
    let mut g = RamGraph::new(q);
    g.fields.insert("F".into(), field);
    for i in 1..=curves {
        let id = format!("C{i}");
        let curve = Curve {
            id: id.clone(),
            kind: CurveKind::Vertical,
            field: Some("F".into()),
            cover: Some(k.t()),
            parent: None,
        };
        g.curves.insert(id, curve);
    }
    for (e, &(a, b, u, v)) in edges.iter().enumerate() {
        let id = format!("n{}", e + 1);
        let at = Loc::At(Fq(e as u64 % ell));
        let node = Node {
            id: id.clone(),
            curves: [format!("C{a}"), format!("C{b}")],
            field: "F".into(),
            at: [at, at],
            tail: Tail::Separate { u, v },
            w: Fq::ONE,
        };
        g.nodes.insert(id, node);
    }
    Ok(g)
}

/// A chilly tail with coefficient `s`: `u` not a q-th power, `v = u^s c^q`.
pub fn random_chilly_tail(rng: &mut impl Rng, field: &FqField, s: u64) -> (Fq, Fq) {
    let units: Vec<Fq> = field.units().collect();
    let u = loop {
        let u = units[rng.gen_range(0..units.len())];
        if !field.is_qth_power(u) {
            break u;
        }
    };
    let c = units[rng.gen_range(0..units.len())];
    (u, field.mul(field.pow(u, s), field.pow(c, field.q())))
}

/// Random chilly multigraph; with `forest` set, edges only join a new curve to an old one.
pub fn random_chilly_graph(rng: &mut impl Rng, ell: u64, q: u64, forest: bool) -> Result<RamGraph> {
    let field = FqField::prime(ell, q)?;
    let n = rng.gen_range(2..=12);
    let mut edges = Vec::new();
    if forest {
        for b in 2..=n {
            if rng.gen_bool(0.8) {
                let a = rng.gen_range(1..b);
                let s = rng.gen_range(1..q);
                let (u, v) = random_chilly_tail(rng, &field, s);
                edges.push((a, b, u, v));
            }
        }
    } else {
        for _ in 0..rng.gen_range(1..=18) {
            let a = rng.gen_range(1..=n);
            let b = loop {
                let b = rng.gen_range(1..=n);
                if b != a {
                    break b;
                }
            };
            let s = rng.gen_range(1..q);
            let (u, v) = random_chilly_tail(rng, &field, s);
            edges.push((a, b, u, v));
        }
    }
    graph_of(ell, q, n, &edges)
}

fn blowup() -> Result<SuiteResult> {
    let mut out = SuiteResult::new("blowup");
    for (ell, q) in [(7, 3), (13, 3), (11, 5)] {
        let field = FqField::prime(ell, q)?;
        for u in field.units() {
            for v in field.units() {
                let PointClass::Chilly { s } = classify_tail(&field, &Tail::Separate { u, v })? else { continue };
                let mut g = graph_of(ell, q, 2, &[(1, 2, u, v)])?;
                let rec = blowup_chilly(&mut g, "n1")?;
                let tag = || format!("F{ell}, (u, v) = ({}, {}), s = {s}", u.0, v.0);
                if s == q - 1 {
                    out.check(rec.event == "chilly-delete" && g.nodes.is_empty(), || {
                        format!("{}: edge not deleted", tag())
                    });
                    continue;
                }
                let s_inv = crate::arith::inv_mod(s as i64, q).expect("q prime");
                let got: Vec<u64> = rec.coefficients.iter().map(|c| c.1).collect();
                out.check(got == vec![(s + 1) % q, (s_inv + 1) % q], || format!("{}: coefficients {got:?}", tag()));
                let e = &g.curves[&rec.created[0]];
                let k = FunctionField::new(field.clone());
                let cover = e.cover.as_ref().map(|c| k.reduce(&k.place_at(Fq::ZERO), c)).transpose()?;
                let expect = field.unit_class(u)?.scale(1 + s as i64);
                let ok = match cover {
                    Some(c) => field.unit_class(c)? == expect,
                    None => false,
                };
                out.check(ok, || format!("{}: exceptional class is not (1 + s) class(u)", tag()));
            }
        }
    }
    Ok(out)
}

fn loop_breaking(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("loop-breaking");
    for i in 0..100 {
        let (ell, q) = if i % 2 == 0 { (7, 3) } else { (11, 5) };
        let mut g = random_chilly_graph(rng, ell, q, false)?;
        let edges = g.nodes.len();
        let res = break_chilly_loops(&mut g);
        let ok = match &res {
            Ok(log) => {
                log.len() <= (q as usize + 1) * edges
                    && find_chilly_loops(&g)?.is_empty()
                    && assign_coefficients(&g).is_ok()
            }
            Err(_) => false,
        };
        out.check(ok, || format!("graph {i} over F{ell}: {:?}", res.map(|l| l.len())));
    }
    Ok(out)
}

fn coefficients(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("coefficients");
    for i in 0..100 {
        let (ell, q) = if i % 2 == 0 { (7, 3) } else { (11, 5) };
        let g = random_chilly_graph(rng, ell, q, true)?;
        let s = assign_coefficients(&g)?;
        let mut ok = s.values().all(|&c| c != 0 && c < q);
        for (id, n) in &g.nodes {
            if let PointClass::Chilly { s: e } = g.classify(id)? {
                ok &= s[&n.curves[1]] == s[&n.curves[0]] * e % q;
            }
        }
        out.check(ok, || format!("forest {i} over F{ell}: {s:?}"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for name in SUITES {
            let r = run_suite(name, 7).unwrap();
            assert!(r.ok() && r.total > 0, "{name}: {:?}", r.failures);
        }
        assert!(run_suite("nope", 0).is_err());
    }
}
