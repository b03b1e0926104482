//! Dense univariate polynomials over an [`FqField`], with factorization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::prime_factors;
use crate::gfq::{Fq, FqField};

const FACTOR_SEED: u64 = 0x5eed_f00d;

/// Coefficients low degree first, no trailing zeros. The zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Polynomial with prime-subfield coefficients given as integers.
    pub fn from_ints(field: &FqField, coeffs: &[u64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_int(c as i64)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fq::ONE] }
    }

    pub fn constant(c: Fq) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![Fq::ZERO, Fq::ONE] }
    }

    pub fn monomial(c: Fq, k: usize) -> Self {
        let mut v = vec![Fq::ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `x - a`.
    pub fn linear(a: Fq, field: &FqField) -> Self {
        Poly::new(vec![field.neg(a), Fq::ONE])
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fq::ONE]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Fq::ONE
    }

    /// Lowest index with a nonzero coefficient, i.e. the order of vanishing at 0.
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn monic(&self, field: &FqField) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = field.inv(self.lc()).expect("nonzero leading coefficient");
        self.scale(inv, field)
    }

    pub fn add(&self, other: &Poly, field: &FqField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| field.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, field: &FqField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| field.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, field: &FqField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn scale(&self, c: Fq, field: &FqField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: &FqField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, mut e: u64, field: &FqField) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, field);
            }
        }
        acc
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fq::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly, field: &FqField) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        if self.deg() < dd || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let inv = field.inv(d.lc()).expect("nonzero");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fq::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let f = field.mul(c, inv);
            quot[i - dd] = f;
            for j in 0..=dd {
                rem[i - dd + j] = field.sub(rem[i - dd + j], field.mul(f, d.coeffs[j]));
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly, field: &FqField) -> Poly {
        self.divrem(d, field).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly, field: &FqField) -> Option<Poly> {
        let (q, r) = self.divrem(d, field);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly, field: &FqField) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly, field: &FqField) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, field);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1, field), field);
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1, field), field);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = field.inv(r0.lc()).expect("nonzero");
        (r0.scale(inv, field), s0.scale(inv, field), t0.scale(inv, field))
    }

    /// Inverse of `self` modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Poly, field: &FqField) -> Option<Poly> {
        let (g, s, _) = self.rem(m, field).xgcd(m, field);
        g.is_one().then(|| s.rem(m, field))
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly, field: &FqField) -> Poly {
        self.mul(other, field).rem(m, field)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly, field: &FqField) -> Poly {
        let mut base = self.rem(m, field);
        let mut acc = Poly::one().rem(m, field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m, field);
            }
        }
        acc
    }

    pub fn eval(&self, a: Fq, field: &FqField) -> Fq {
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| field.add(field.mul(acc, a), c))
    }

    pub fn derivative(&self, field: &FqField) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.mul(c, field.from_int((i as u64 % field.ell()) as i64)))
                .collect(),
        )
    }

    /// Substitute `x -> x + a`.
    pub fn shift_arg(&self, a: Fq, field: &FqField) -> Poly {
        let lin = Poly::new(vec![a, Fq::ONE]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| acc.mul(&lin, field).add(&Poly::constant(c), field))
    }

    /// `x^n f(1/x)` for `n = deg f`.
    pub fn reversed(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(v)
    }

    /// Map coefficients through a function (e.g. an embedding).
    pub fn map(&self, f: impl Fn(Fq) -> Fq) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Sort key: degree first, then coefficients from the top down.
    pub fn sort_key(&self) -> (usize, Vec<u64>) {
        (self.coeffs.len(), self.coeffs.iter().rev().map(|c| c.0).collect())
    }

    // --- irreducibility and factoring ---------------------------------------------------

    /// Rabin's test over `field`.
    pub fn is_irreducible(&self, field: &FqField) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic(field);
        let qsize = field.size();
        let frob_iter = |k: usize| {
            let mut h = Poly::x();
            for _ in 0..k {
                h = h.pow_mod(qsize, &f, field);
            }
            h
        };
        if frob_iter(n).sub(&Poly::x(), field).rem(&f, field) != Poly::zero() {
            return false;
        }
        prime_factors(n as u64).into_iter().all(|r| {
            let h = frob_iter(n / r as usize).sub(&Poly::x(), field);
            h.gcd(&f, field).is_one()
        })
    }

    /// Monic irreducible factors with multiplicities, sorted by [`Poly::sort_key`].
    /// The leading coefficient is dropped.
    pub fn factor(&self, field: &FqField) -> Vec<(Poly, usize)> {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut out: Vec<(Poly, usize)> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
        for (part, mult) in square_free(&self.monic(field), field) {
            for (d, g) in distinct_degree(&part, field) {
                let mut pieces = Vec::new();
                equal_degree(&g, d, field, &mut rng, &mut pieces);
                out.extend(pieces.into_iter().map(|p| (p, mult)));
            }
        }
        out.sort_by_key(|(p, _)| p.sort_key());
        // merge accidental duplicates across square-free layers
        let mut merged: Vec<(Poly, usize)> = Vec::new();
        for (p, m) in out {
            match merged.last_mut() {
                Some((last, lm)) if *last == p => *lm += m,
                _ => merged.push((p, m)),
            }
        }
        merged
    }

    /// Distinct roots in `field`, ascending by encoding.
    pub fn roots(&self, field: &FqField) -> Vec<Fq> {
        if self.is_zero() {
            return Vec::new();
        }
        let f = self.monic(field);
        if f.deg() == 0 {
            return Vec::new();
        }
        let xq = Poly::x().pow_mod(field.size(), &f, field);
        let g = xq.sub(&Poly::x(), field).gcd(&f, field);
        let mut pieces = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
        if g.deg() > 0 {
            equal_degree(&g, 1, field, &mut rng, &mut pieces);
        }
        let mut roots: Vec<Fq> = pieces.iter().map(|p| field.neg(p.coeff(0))).collect();
        roots.sort();
        roots
    }
}

/// Square-free decomposition of a monic polynomial: `f = prod part_i^i`.
fn square_free(f: &Poly, field: &FqField) -> Vec<(Poly, usize)> {
    let p = field.ell() as usize;
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let df = f.derivative(field);
    if df.is_zero() {
        for (g, m) in square_free(&pth_root_poly(f, field), field) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&df, field);
    let mut w = f.exact_div(&c, field).expect("gcd divides");
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c, field);
        let fac = w.exact_div(&y, field).expect("gcd divides");
        if fac.deg() > 0 {
            out.push((fac, i));
        }
        c = c.exact_div(&y, field).expect("gcd divides");
        w = y;
        i += 1;
    }
    if c.deg() > 0 {
        for (g, m) in square_free(&pth_root_poly(&c, field), field) {
            out.push((g, m * p));
        }
    }
    out
}

/// For `f(x) = g(x^p)`, return `g^{1/p}` coefficientwise.
fn pth_root_poly(f: &Poly, field: &FqField) -> Poly {
    let p = field.ell() as usize;
    Poly::new(f.coeffs.iter().step_by(p).map(|&c| field.pth_root(c)).collect())
}

/// Split a square-free monic polynomial into products of equal-degree irreducibles.
fn distinct_degree(f: &Poly, field: &FqField) -> Vec<(usize, Poly)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = Poly::x().rem(&rest, field);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(field.size(), &rest, field);
        let g = h.sub(&Poly::x(), field).gcd(&rest, field);
        if g.deg() > 0 {
            rest = rest.exact_div(&g, field).expect("gcd divides");
            h = h.rem(&rest, field);
            out.push((d, g));
        }
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest));
    }
    out
}

/// Cantor-Zassenhaus splitting into degree-`d` irreducibles.
fn equal_degree(f: &Poly, d: usize, field: &FqField, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = f.deg();
    if n == d {
        out.push(f.monic(field));
        return;
    }
    loop {
        let r = Poly::new((0..n).map(|_| Fq(rng.gen_range(0..field.size()))).collect());
        if r.deg() == 0 {
            continue;
        }
        let s = splitting_element(&r, d, f, field);
        let g = s.gcd(f, field);
        if g.deg() > 0 && g.deg() < n {
            let h = f.exact_div(&g, field).expect("gcd divides");
            equal_degree(&g, d, field, rng, out);
            equal_degree(&h, d, field, rng, out);
            return;
        }
    }
}

fn splitting_element(r: &Poly, d: usize, f: &Poly, field: &FqField) -> Poly {
    let qsize = field.size();
    if field.ell() == 2 {
        // absolute trace to F_2 of r over F_{q^d}
        let bits = field.degree() * d;
        let mut t = r.rem(f, field);
        let mut acc = t.clone();
        for _ in 1..bits {
            t = t.mul_mod(&t, f, field);
            acc = acc.add(&t, field);
        }
        acc
    } else {
        // r^((Q^d - 1)/2) = (prod_{i<d} r^{Q^i})^((Q-1)/2)
        let mut conj = r.rem(f, field);
        let mut prod = conj.clone();
        for _ in 1..d {
            conj = conj.pow_mod(qsize, f, field);
            prod = prod.mul_mod(&conj, f, field);
        }
        prod.pow_mod((qsize - 1) / 2, f, field).sub(&Poly::one(), field)
    }
}

/// Minimal polynomial over `F_ell` of an element of `field`, monic with prime-field coefficients.
pub fn minimal_polynomial(tau: Fq, field: &FqField) -> Poly {
    let mut conj = vec![tau];
    let mut t = field.pow(tau, field.ell());
    while t != tau {
        conj.push(t);
        t = field.pow(t, field.ell());
    }
    conj.iter().fold(Poly::one(), |acc, &c| acc.mul(&Poly::linear(c, field), field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_roots(p: &Poly, field: &FqField) -> Vec<Fq> {
        field.elements().filter(|&a| p.eval(a, field).is_zero()).collect()
    }

    #[test]
    fn divrem_and_gcd() {
        let f = FqField::prime(7, 3).unwrap();
        let a = Poly::from_ints(&f, &[1, 0, 1]); // x^2 + 1
        let b = Poly::from_ints(&f, &[6, 1]); // x - 1
        let (q, r) = a.divrem(&b, &f);
        assert_eq!(q, Poly::from_ints(&f, &[1, 1]));
        assert_eq!(r, Poly::from_ints(&f, &[2]));
        let c = Poly::from_ints(&f, &[6, 0, 1]); // x^2 - 1
        assert_eq!(c.gcd(&b, &f), b);
    }

    #[test]
    fn roots_match_brute_force() {
        for (ell, d) in [(7, 1), (5, 2), (2, 3), (3, 2)] {
            let field = FqField::with_degree(ell, d, if ell == 3 { 2 } else { 3 }).unwrap();
            for seed in 0..20u64 {
                let coeffs: Vec<Fq> = (0..5).map(|i| Fq((seed * 31 + i * 17 + seed * i) % field.size())).collect();
                let p = Poly::new(coeffs);
                if p.is_zero() {
                    continue;
                }
                assert_eq!(p.roots(&field), brute_roots(&p, &field), "{p:?} over {field}");
            }
        }
    }

    #[test]
    fn factor_known_polynomials() {
        let f = FqField::prime(7, 3).unwrap();
        // x^3 - 1 = (x - 1)(x - 2)(x - 4) over F_7
        let p = Poly::from_ints(&f, &[6, 0, 0, 1]);
        let fac = p.factor(&f);
        assert_eq!(fac.len(), 3);
        assert!(fac.iter().all(|(g, m)| g.deg() == 1 && *m == 1));
        // x^3 - 3 is irreducible over F_7 (3 is not a cube)
        let p = Poly::from_ints(&f, &[4, 0, 0, 1]);
        assert!(p.is_irreducible(&f));
        assert_eq!(p.factor(&f), vec![(p.clone(), 1)]);
        // x^7 - x^7-th powers: (x+1)^7 has derivative zero
        let p = Poly::from_ints(&f, &[1, 1]).pow(14, &f);
        assert_eq!(p.factor(&f), vec![(Poly::from_ints(&f, &[1, 1]), 14)]);
    }

    #[test]
    fn minimal_polynomial_of_extension_generator() {
        let f49 = FqField::with_degree(7, 2, 3).unwrap();
        let m = minimal_polynomial(f49.x(), &f49);
        let expect: Vec<Fq> = f49.modulus().iter().map(|&c| Fq(c)).collect();
        assert_eq!(m.coeffs(), &expect[..]);
        assert_eq!(minimal_polynomial(Fq(3), &f49).deg(), 1);
    }

    fn arb_poly(size: u64, max_len: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0..size, 1..=max_len)
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(c in arb_poly(9, 9), extra in arb_poly(9, 3)) {
            let field = FqField::with_degree(3, 2, 2).unwrap();
            let p = Poly::new(c.into_iter().map(Fq).collect());
            let e = Poly::new(extra.into_iter().map(Fq).collect());
            let p = p.mul(&e, &field).mul(&e, &field);
            prop_assume!(p.deg() > 0);
            let fac = p.factor(&field);
            let mut prod = Poly::one();
            for (g, m) in &fac {
                prop_assert!(g.is_monic() && g.is_irreducible(&field));
                prod = prod.mul(&g.pow(*m as u64, &field), &field);
            }
            prop_assert_eq!(prod, p.monic(&field));
        }
    }
}
