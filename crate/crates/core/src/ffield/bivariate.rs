//! Two-variable rational functions over a finite field, monomial valuations on
//! `F(x, y)(T)` and q-th power testing in `F(x, y)`.

use crate::error::{Error, Result};
use crate::gfq::{Fq, FqField};
use crate::poly::Poly;

/// Polynomial in `x, y`, stored as coefficients of `y^j` in `F[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    rows: Vec<Poly>,
}

impl Poly2 {
    pub fn from_rows(mut rows: Vec<Poly>) -> Self {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        Poly2 { rows }
    }

    pub fn zero() -> Self {
        Poly2 { rows: Vec::new() }
    }

    pub fn constant(c: Fq) -> Self {
        Poly2::from_rows(vec![Poly::constant(c)])
    }

    pub fn one() -> Self {
        Poly2::constant(Fq::ONE)
    }

    /// `c x^i y^j`.
    pub fn monomial(c: Fq, i: usize, j: usize) -> Self {
        let mut rows = vec![Poly::zero(); j + 1];
        rows[j] = Poly::monomial(c, i);
        Poly2::from_rows(rows)
    }

    pub fn from_terms(terms: &[(usize, usize, Fq)], field: &FqField) -> Self {
        terms.iter().fold(Poly2::zero(), |acc, &(i, j, c)| acc.add(&Poly2::monomial(c, i, j), field))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Poly] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> Poly {
        self.rows.get(j).cloned().unwrap_or_default()
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    /// Nonzero terms `(i, j, c)` for `c x^i y^j`.
    pub fn terms(&self) -> Vec<(usize, usize, Fq)> {
        let mut out = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            for (i, &c) in row.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// Exchange the roles of `x` and `y`.
    pub fn transpose(&self, field: &FqField) -> Poly2 {
        let swapped: Vec<_> = self.terms().into_iter().map(|(i, j, c)| (j, i, c)).collect();
        Poly2::from_terms(&swapped, field)
    }

    pub fn add(&self, other: &Poly2, field: &FqField) -> Poly2 {
        let n = self.rows.len().max(other.rows.len());
        Poly2::from_rows((0..n).map(|j| self.row(j).add(&other.row(j), field)).collect())
    }

    pub fn neg(&self, field: &FqField) -> Poly2 {
        Poly2::from_rows(self.rows.iter().map(|r| r.neg(field)).collect())
    }

    pub fn sub(&self, other: &Poly2, field: &FqField) -> Poly2 {
        self.add(&other.neg(field), field)
    }

    pub fn mul(&self, other: &Poly2, field: &FqField) -> Poly2 {
        if self.is_zero() || other.is_zero() {
            return Poly2::zero();
        }
        let mut rows = vec![Poly::zero(); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.rows.iter().enumerate() {
                rows[i + j] = rows[i + j].add(&a.mul(b, field), field);
            }
        }
        Poly2::from_rows(rows)
    }

    pub fn scale_x(&self, p: &Poly, field: &FqField) -> Poly2 {
        Poly2::from_rows(self.rows.iter().map(|r| r.mul(p, field)).collect())
    }

    pub fn pow(&self, mut e: u64, field: &FqField) -> Poly2 {
        let mut base = self.clone();
        let mut acc = Poly2::one();
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
}

/// A fraction of two-variable polynomials.
///
/// Only monomial content is cancelled; bivariate gcds are never needed by the
/// valuation-theoretic code, so equality must be tested by cross-multiplying.
#[derive(Clone, Debug)]
pub struct RatFunc2 {
    num: Poly2,
    den: Poly2,
}

impl RatFunc2 {
    pub fn new(num: Poly2, den: Poly2) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(RatFunc2 { num, den })
    }

    pub fn from_poly(p: Poly2) -> Self {
        RatFunc2 { num: p, den: Poly2::one() }
    }

    pub fn constant(c: Fq) -> Self {
        RatFunc2::from_poly(Poly2::constant(c))
    }

    /// `c x^i y^j` with signed exponents.
    pub fn monomial(c: Fq, i: i64, j: i64) -> Self {
        let (ni, di) = (i.max(0) as usize, (-i).max(0) as usize);
        let (nj, dj) = (j.max(0) as usize, (-j).max(0) as usize);
        RatFunc2 { num: Poly2::monomial(c, ni, nj), den: Poly2::monomial(Fq::ONE, di, dj) }
    }

    pub fn x() -> Self {
        RatFunc2::monomial(Fq::ONE, 1, 0)
    }

    pub fn y() -> Self {
        RatFunc2::monomial(Fq::ONE, 0, 1)
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    pub fn den(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &RatFunc2, field: &FqField) -> RatFunc2 {
        RatFunc2 { num: self.num.mul(&other.num, field), den: self.den.mul(&other.den, field) }
    }

    pub fn inv(&self) -> Result<RatFunc2> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(RatFunc2 { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn div(&self, other: &RatFunc2, field: &FqField) -> Result<RatFunc2> {
        Ok(self.mul(&other.inv()?, field))
    }

    pub fn add(&self, other: &RatFunc2, field: &FqField) -> RatFunc2 {
        let num = self.num.mul(&other.den, field).add(&other.num.mul(&self.den, field), field);
        RatFunc2 { num, den: self.den.mul(&other.den, field) }
    }

    pub fn pow(&self, e: i64, field: &FqField) -> Result<RatFunc2> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc2 { num: base.num.pow(k, field), den: base.den.pow(k, field) })
    }

    pub fn equals(&self, other: &RatFunc2, field: &FqField) -> bool {
        self.num.mul(&other.den, field) == other.num.mul(&self.den, field)
    }

    pub fn transpose(&self, field: &FqField) -> RatFunc2 {
        RatFunc2 { num: self.num.transpose(field), den: self.den.transpose(field) }
    }
}

/// The valuation on `F(x, y)(T)` with `d(T) = 1`, `d(x) = a`, `d(y) = b`.
///
/// Realized by `x = T^a x'`, `y = T^b y'`; the residue field is `F(x', y')` and
/// the residue of a unit is its value at `T = 0`. Residues are written in the
/// same two variables, read as `x', y'`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialValuation {
    pub a: u64,
    pub b: u64,
}

impl MonomialValuation {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::Precondition("monomial valuation needs (a, b) != (0, 0)".into()));
        }
        Ok(MonomialValuation { a, b })
    }

    fn term_value(&self, i: usize, j: usize) -> i64 {
        (self.a * i as u64 + self.b * j as u64) as i64
    }

    pub fn value_poly(&self, p: &Poly2) -> Result<i64> {
        p.terms().iter().map(|&(i, j, _)| self.term_value(i, j)).min().ok_or(Error::ZeroInput)
    }

    /// Sum of the terms of minimal value.
    pub fn initial_form(&self, p: &Poly2, field: &FqField) -> Result<Poly2> {
        let v = self.value_poly(p)?;
        let terms: Vec<_> = p.terms().into_iter().filter(|&(i, j, _)| self.term_value(i, j) == v).collect();
        Ok(Poly2::from_terms(&terms, field))
    }

    pub fn value(&self, f: &RatFunc2) -> Result<i64> {
        Ok(self.value_poly(&f.num)? - self.value_poly(&f.den)?)
    }

    /// `(d(f), residue of f / T^{d(f)})`.
    pub fn residue(&self, f: &RatFunc2, field: &FqField) -> Result<(i64, RatFunc2)> {
        let v = self.value(f)?;
        let r = RatFunc2::new(self.initial_form(&f.num, field)?, self.initial_form(&f.den, field)?)?;
        Ok((v, r))
    }
}

/// Which variable plays the role of the polynomial variable in q-th root extraction.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum VariableOrder {
    YOverX,
    XOverY,
}

/// `F(x, y)` with its q-th power structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateField {
    base: FqField,
}

impl BivariateField {
    pub fn new(base: FqField) -> Self {
        BivariateField { base }
    }

    pub fn base(&self) -> &FqField {
        &self.base
    }

    pub fn is_qth_power(&self, f: &RatFunc2) -> Result<bool> {
        self.is_qth_power_ordered(f, VariableOrder::YOverX)
    }

    /// q-th power test in `F(x)[y]` (or `F(y)[x]`); the answer does not depend on the order.
    pub fn is_qth_power_ordered(&self, f: &RatFunc2, order: VariableOrder) -> Result<bool> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        let fld = &self.base;
        let q = fld.q();
        // f is a q-th power iff num * den^(q-1) is
        let mut p = f.num.mul(&f.den.pow(q - 1, fld), fld);
        if order == VariableOrder::XOverY {
            p = p.transpose(fld);
        }
        Ok(qth_root_poly2(&p, fld).is_some())
    }

    /// `(-1)^{AB} a^B / b^A` reduced at `d`, with `A = d(a)`, `B = d(b)`.
    pub fn tame_residue(&self, d: &MonomialValuation, a: &RatFunc2, b: &RatFunc2) -> Result<RatFunc2> {
        let fld = &self.base;
        let (va, a0) = d.residue(a, fld)?;
        let (vb, b0) = d.residue(b, fld)?;
        let sign = if (va * vb).rem_euclid(2) == 1 { fld.neg(Fq::ONE) } else { Fq::ONE };
        Ok(RatFunc2::constant(sign).mul(&a0.pow(vb, fld)?, fld).mul(&b0.pow(-va, fld)?, fld))
    }

    /// Ramification of `sum_k (a_k, b_k)` at `d`, as a representative in `F(x', y')*`.
    pub fn ramification_of_sum(&self, d: &MonomialValuation, tail: &[(RatFunc2, RatFunc2)]) -> Result<RatFunc2> {
        let mut acc = RatFunc2::constant(Fq::ONE);
        for (a, b) in tail {
            acc = acc.mul(&self.tame_residue(d, a, b)?, &self.base);
        }
        Ok(acc)
    }
}

/// A q-th root in `F[x]`, if one exists.
pub fn qth_root_poly(p: &Poly, field: &FqField) -> Option<Poly> {
    let q = field.q();
    if p.is_zero() {
        return Some(Poly::zero());
    }
    let c = qth_root_elem(p.lc(), field)?;
    let mut root = Poly::constant(c);
    if p.deg() > 0 {
        for (g, m) in p.factor(field) {
            if !(m as u64).is_multiple_of(q) {
                return None;
            }
            root = root.mul(&g.pow(m as u64 / q, field), field);
        }
    }
    Some(root)
}

/// Some `c` with `c^q = a`, if one exists.
pub fn qth_root_elem(a: Fq, field: &FqField) -> Option<Fq> {
    if a.is_zero() {
        return Some(a);
    }
    let n = field.size() - 1;
    let q = field.q();
    if !n.is_multiple_of(q) {
        let e = crate::arith::inv_mod(q as i64, n).expect("q prime to |F*|");
        return Some(field.pow(a, e));
    }
    if !field.is_qth_power(a) {
        return None;
    }
    field.units().find(|&c| field.pow(c, q) == a)
}

/// A q-th root of `p` in `F[x][y]`, by matching coefficients from the top in `y`.
pub fn qth_root_poly2(p: &Poly2, field: &FqField) -> Option<Poly2> {
    let q = field.q();
    let Some(n) = p.deg_y() else { return Some(Poly2::zero()) };
    if !(n as u64).is_multiple_of(q) {
        return None;
    }
    let k = n / q as usize;
    let top = qth_root_poly(&p.row(n), field)?;
    // coefficient of y^(n-r) picks up q * top^(q-1) * g_(k-r)
    let scale = top.pow(q - 1, field).scale(field.from_int(q as i64), field);
    let mut g = Poly2::from_rows({
        let mut rows = vec![Poly::zero(); k + 1];
        rows[k] = top;
        rows
    });
    for r in 1..=k {
        let diff = p.sub(&g.pow(q, field), field);
        let c = diff.row(n - r);
        if c.is_zero() {
            continue;
        }
        let coeff = c.exact_div(&scale, field)?;
        let mut rows = vec![Poly::zero(); k - r + 1];
        rows[k - r] = coeff;
        g = g.add(&Poly2::from_rows(rows), field);
    }
    (g.pow(q, field) == *p).then_some(g)
}
