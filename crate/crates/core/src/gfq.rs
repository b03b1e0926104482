//! Finite fields `F_{ell^d}`, q-th power residue classes and Frobenius characters.
//!
//! Elements are packed into a `u64` as the base-`ell` digits of their coordinate
//! vector in the power basis `1, x, ..., x^{d-1}` (low digit first). That keeps
//! [`Fq`] `Copy` and gives every field a canonical enumeration order, which is
//! what the deterministic generator choice relies on.

use std::fmt;

use crate::arith::{gcd, is_prime, prime_factors};
use crate::error::{Error, Result};
use crate::poly::Poly;

const MAX_DEGREE: usize = 40;

/// A field element in packed base-`ell` encoding.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u64);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `F_{ell^d}` presented as `F_ell[x]/(modulus)`, with a fixed generator of the unit group.
#[derive(Clone, Debug)]
pub struct FqField {
    ell: u64,
    q: u64,
    degree: usize,
    /// Monic modulus, low coefficient first, length `degree + 1`.
    modulus: Vec<u64>,
    size: u64,
    generator: Fq,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.ell == other.ell && self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for FqField {}

/// Class of a unit in `F*/(F*)^q`, as an exponent mod q relative to the field generator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitClass {
    pub exponent: u64,
    pub q: u64,
}

impl UnitClass {
    pub fn zero(q: u64) -> Self {
        UnitClass { exponent: 0, q }
    }

    pub fn is_trivial(self) -> bool {
        self.exponent == 0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: UnitClass) -> UnitClass {
        UnitClass { exponent: (self.exponent + other.exponent) % self.q, q: self.q }
    }

    pub fn scale(self, k: i64) -> UnitClass {
        let e = (self.exponent as i64 * k.rem_euclid(self.q as i64)) % self.q as i64;
        UnitClass { exponent: e as u64, q: self.q }
    }
}

impl FqField {
    /// The prime field `F_ell`.
    pub fn prime(ell: u64, q: u64) -> Result<Self> {
        Self::new(ell, vec![0, 1], q)
    }

    /// `F_{ell^d}` with the first monic irreducible modulus in enumeration order.
    pub fn with_degree(ell: u64, d: usize, q: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidField("degree must be at least 1".into()));
        }
        if d == 1 {
            return Self::prime(ell, q);
        }
        check_params(ell, q)?;
        let prime = Self::prime(ell, q)?;
        let count = checked_pow(ell, d)?;
        for tail in 0..count {
            let mut coeffs = digits(tail, ell, d);
            coeffs.push(1);
            let p = Poly::from_ints(&prime, &coeffs);
            if p.is_irreducible(&prime) {
                return Self::new(ell, coeffs, q);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_ell[x]/(modulus)`; the modulus must be monic irreducible over `F_ell`.
    pub fn new(ell: u64, modulus: Vec<u64>, q: u64) -> Result<Self> {
        check_params(ell, q)?;
        let mut modulus: Vec<u64> = modulus.into_iter().map(|c| c % ell).collect();
        while modulus.len() > 1 && *modulus.last().unwrap() == 0 {
            modulus.pop();
        }
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidField(format!("unsupported degree {degree}")));
        }
        if modulus[degree] != 1 {
            return Err(Error::NotIrreducible(format!("{modulus:?} is not monic")));
        }
        let size = checked_pow(ell, degree)?;
        let mut field = FqField { ell, q, degree, modulus, size, generator: Fq::ONE };
        if degree == 1 {
            field.modulus = vec![0, 1];
        } else {
            let prime = Self::prime(ell, q)?;
            let p = Poly::from_ints(&prime, &field.modulus);
            if !p.is_irreducible(&prime) {
                return Err(Error::NotIrreducible(format!("{:?}", field.modulus)));
            }
        }
        field.generator = field.find_generator();
        Ok(field)
    }

    fn find_generator(&self) -> Fq {
        if self.size == 2 {
            return Fq::ONE;
        }
        let n = self.size - 1;
        let factors = prime_factors(n);
        (1..self.size)
            .map(Fq)
            .find(|&g| factors.iter().all(|&r| self.pow(g, n / r) != Fq::ONE))
            .expect("finite field unit groups are cyclic")
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Fq {
        self.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree == 1
    }

    /// True when `q | |F*|`, i.e. the field contains a primitive q-th root of unity.
    pub fn has_mu_q(&self) -> bool {
        (self.size - 1).is_multiple_of(self.q)
    }

    /// The pinned primitive q-th root of unity `generator^((|F|-1)/q)`.
    pub fn rho(&self) -> Option<Fq> {
        self.has_mu_q().then(|| self.pow(self.generator, (self.size - 1) / self.q))
    }

    /// The q-th root of unity pinned in the prime field, seen inside this field.
    ///
    /// Prime-field elements encode identically in every extension, so this is
    /// a canonical choice shared by all fields of characteristic `ell`.
    pub fn prime_rho(&self) -> Option<Fq> {
        if !(self.ell - 1).is_multiple_of(self.q) {
            return None;
        }
        let prime = Self::prime(self.ell, self.q).ok()?;
        prime.rho()
    }

    // --- element construction -------------------------------------------------

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }

    pub fn one(&self) -> Fq {
        Fq::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.ell as i64) as u64)
    }

    /// Element with the given power-basis coordinates (low first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fq> {
        if coeffs.len() > self.degree {
            let extra = &coeffs[self.degree..];
            if extra.iter().any(|&c| c % self.ell != 0) {
                return Err(Error::InvalidField(format!(
                    "element {coeffs:?} has more than {} coordinates",
                    self.degree
                )));
            }
        }
        let mut acc = 0u64;
        for &c in coeffs.iter().take(self.degree).rev() {
            acc = acc * self.ell + c % self.ell;
        }
        Ok(Fq(acc))
    }

    pub fn coeffs(&self, a: Fq) -> Vec<u64> {
        digits(a.0, self.ell, self.degree)
    }

    /// The class of `x` in `F_ell[x]/(modulus)`.
    pub fn x(&self) -> Fq {
        if self.degree == 1 {
            Fq::ZERO
        } else {
            Fq(self.ell)
        }
    }

    pub fn contains(&self, a: Fq) -> bool {
        a.0 < self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.size).map(Fq)
    }

    pub fn units(&self) -> impl Iterator<Item = Fq> {
        (1..self.size).map(Fq)
    }

    // --- arithmetic -------------------------------------------------------------

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.degree == 1 {
            return Fq((a.0 + b.0) % self.ell);
        }
        let (da, db) = (self.unpack(a), self.unpack(b));
        let mut out = [0u64; MAX_DEGREE];
        for i in 0..self.degree {
            out[i] = (da[i] + db[i]) % self.ell;
        }
        self.pack(&out)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.degree == 1 {
            return Fq((self.ell - a.0) % self.ell);
        }
        let da = self.unpack(a);
        let mut out = [0u64; MAX_DEGREE];
        for i in 0..self.degree {
            out[i] = (self.ell - da[i]) % self.ell;
        }
        self.pack(&out)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let ell = self.ell;
        if self.degree == 1 {
            return Fq(((a.0 as u128 * b.0 as u128) % ell as u128) as u64);
        }
        let d = self.degree;
        let (da, db) = (self.unpack(a), self.unpack(b));
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..d {
            if da[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % ell;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..d {
                let sub = c * self.modulus[j] % ell;
                prod[i - d + j] = (prod[i - d + j] + ell - sub) % ell;
            }
            prod[i] = 0;
        }
        self.pack(&prod[..d])
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` for a signed exponent; `a` must be nonzero when `e < 0`.
    pub fn pow_signed(&self, a: Fq, e: i64) -> Result<Fq> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow(a, self.size - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The unique `p`-th root (the field is perfect).
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.pow(a, self.size / self.ell)
    }

    // --- residue classes ----------------------------------------------------------

    /// Class of `u` in `F*/(F*)^q`: discrete log to the generator, mod q.
    pub fn unit_class(&self, u: Fq) -> Result<UnitClass> {
        if u.is_zero() {
            return Err(Error::ZeroInput);
        }
        match self.rho() {
            None => Ok(UnitClass::zero(self.q)),
            Some(rho) => Ok(UnitClass { exponent: self.log_root(u, rho)?, q: self.q }),
        }
    }

    /// Exponent `i` with `rho^i = u^((|F|-1)/q)` for the field's own pinned `rho`.
    pub fn frobenius_invariant(&self, u: Fq) -> Result<u64> {
        Ok(self.unit_class(u)?.exponent)
    }

    /// Frobenius coordinate of `u` measured against an explicit primitive q-th root `rho`.
    pub fn coordinate(&self, u: Fq, rho: Fq) -> Result<u64> {
        if u.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !self.has_mu_q() {
            return Ok(0);
        }
        self.log_root(u, rho)
    }

    fn log_root(&self, u: Fq, rho: Fq) -> Result<u64> {
        let target = self.pow(u, (self.size - 1) / self.q);
        let mut acc = Fq::ONE;
        for i in 0..self.q {
            if acc == target {
                return Ok(i);
            }
            acc = self.mul(acc, rho);
        }
        Err(Error::Precondition("rho is not a primitive q-th root of unity".into()))
    }

    pub fn is_qth_power(&self, u: Fq) -> bool {
        if u.is_zero() {
            return true;
        }
        !self.has_mu_q() || self.pow(u, (self.size - 1) / self.q) == Fq::ONE
    }

    /// Brute-force discrete logarithm to the generator.
    pub fn dlog(&self, u: Fq) -> Result<u64> {
        if u.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut acc = Fq::ONE;
        for k in 0..self.size - 1 {
            if acc == u {
                return Ok(k);
            }
            acc = self.mul(acc, self.generator);
        }
        unreachable!("generator has full order")
    }

    /// An element whose unit class is `exponent`; the generator power `g^exponent`.
    pub fn element_of_class(&self, exponent: u64) -> Fq {
        self.pow(self.generator, exponent % self.q)
    }

    /// An element whose Frobenius coordinate against `rho` equals `target`.
    pub fn element_of_coordinate(&self, target: u64, rho: Fq) -> Result<Fq> {
        let target = target % self.q;
        if target == 0 {
            return Ok(Fq::ONE);
        }
        let base = self.coordinate(self.generator, rho)?;
        if base == 0 {
            return Err(Error::MissingRootsOfUnity { q: self.q, size: self.size });
        }
        let k = crate::arith::inv_mod(base as i64, self.q).expect("q prime") * target % self.q;
        Ok(self.pow(self.generator, k))
    }

    // --- extensions ------------------------------------------------------------------

    /// `F_{ell^{d e}}` with an embedding of `self`.
    pub fn extend(&self, e: usize) -> Result<Extension> {
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        if e == 1 {
            return Ok(Extension { embedding: Embedding::identity(self), degree: 1 });
        }
        let big = FqField::with_degree(self.ell, self.degree * e, self.q)?;
        Ok(Extension { embedding: self.embedding_into(&big)?, degree: e })
    }

    /// The smallest extension containing `mu_q`; its degree divides `q - 1`.
    pub fn mu_q_closure(&self) -> Result<Extension> {
        let o = crate::arith::multiplicative_order(self.size % self.q, self.q);
        self.extend(o as usize)
    }

    /// Embedding of `self` into `target`, sending `x` to the smallest root of the modulus.
    pub fn embedding_into(&self, target: &FqField) -> Result<Embedding> {
        if self == target {
            return Ok(Embedding::identity(self));
        }
        if target.ell != self.ell || !target.degree.is_multiple_of(self.degree) {
            return Err(Error::InvalidField(format!(
                "F_{}^{} does not embed in F_{}^{}",
                self.ell, self.degree, target.ell, target.degree
            )));
        }
        if self.degree == 1 {
            return Ok(Embedding { source: self.clone(), target: target.clone(), image_of_x: Fq::ZERO });
        }
        let m = Poly::from_ints(target, &self.modulus);
        let roots = m.roots(target);
        let image_of_x = *roots.first().ok_or_else(|| Error::InvalidField("modulus has no root in target".into()))?;
        Ok(Embedding { source: self.clone(), target: target.clone(), image_of_x })
    }

    // --- packing -----------------------------------------------------------------------

    fn unpack(&self, a: Fq) -> [u64; MAX_DEGREE] {
        let mut out = [0u64; MAX_DEGREE];
        let mut v = a.0;
        for slot in out.iter_mut().take(self.degree) {
            *slot = v % self.ell;
            v /= self.ell;
        }
        out
    }

    fn pack(&self, coeffs: &[u64]) -> Fq {
        let mut acc = 0u64;
        for &c in coeffs[..self.degree].iter().rev() {
            acc = acc * self.ell + c;
        }
        Fq(acc)
    }

    /// Display an element: an integer for prime fields, a coordinate list otherwise.
    pub fn show(&self, a: Fq) -> String {
        if self.degree == 1 {
            a.0.to_string()
        } else {
            let c: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
            format!("[{}]", c.join(","))
        }
    }
}

impl fmt::Display for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.ell)
        } else {
            write!(f, "F_{}^{}", self.ell, self.degree)
        }
    }
}

/// A ring embedding `source -> target`, determined by the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub source: FqField,
    pub target: FqField,
    pub image_of_x: Fq,
}

impl Embedding {
    pub fn identity(field: &FqField) -> Self {
        Embedding { source: field.clone(), target: field.clone(), image_of_x: field.x() }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    pub fn apply(&self, a: Fq) -> Fq {
        if self.is_identity() || self.source.degree == 1 {
            return a;
        }
        let t = &self.target;
        self.source.coeffs(a).iter().rev().fold(Fq::ZERO, |acc, &c| t.add(t.mul(acc, self.image_of_x), Fq(c)))
    }

    /// Degree of the target over the source.
    pub fn relative_degree(&self) -> usize {
        self.target.degree / self.source.degree
    }

    /// Norm `target* -> source*`, `w -> w^((|T|-1)/(|S|-1))`, pulled back to the source.
    pub fn norm(&self, w: Fq) -> Result<Fq> {
        if w.is_zero() {
            return Err(Error::ZeroInput);
        }
        let e = (self.target.size - 1) / (self.source.size - 1);
        let n = self.target.pow(w, e);
        self.preimage(n).ok_or_else(|| Error::Precondition("norm left the embedded subfield".into()))
    }

    /// Inverse of the embedding on its image, by linear algebra over `F_ell`.
    pub fn preimage(&self, b: Fq) -> Option<Fq> {
        if self.is_identity() {
            return Some(b);
        }
        let ell = self.source.ell;
        let (ds, dt) = (self.source.degree, self.target.degree);
        if ds == 1 {
            return (b.0 < ell).then_some(b);
        }
        // columns: coordinates of image_of_x^j in the target
        let t = &self.target;
        let mut cols = Vec::with_capacity(ds);
        let mut p = Fq::ONE;
        for _ in 0..ds {
            cols.push(t.coeffs(p));
            p = t.mul(p, self.image_of_x);
        }
        let rhs = t.coeffs(b);
        let mut rows: Vec<Vec<u64>> = (0..dt)
            .map(|r| {
                let mut row: Vec<u64> = cols.iter().map(|c| c[r]).collect();
                row.push(rhs[r]);
                row
            })
            .collect();
        let sol = solve_mod_prime(&mut rows, ds, ell)?;
        self.source.from_coeffs(&sol).ok()
    }
}

/// Result of [`FqField::extend`].
#[derive(Clone, Debug)]
pub struct Extension {
    pub embedding: Embedding,
    pub degree: usize,
}

impl Extension {
    pub fn field(&self) -> &FqField {
        &self.embedding.target
    }
}

/// Solve an augmented system over `F_p`; returns one solution (free variables zero).
pub fn solve_mod_prime(rows: &mut [Vec<u64>], ncols: usize, p: u64) -> Option<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = crate::arith::inv_mod(rows[r][c] as i64, p)?;
        for v in rows[r].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_multiple_of(p) {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|row| row[ncols] % p != 0) {
        return None;
    }
    let mut sol = vec![0u64; ncols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][ncols];
    }
    Some(sol)
}

fn check_params(ell: u64, q: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if gcd(ell, q) != 1 {
        return Err(Error::QEqualsCharacteristic { q, ell });
    }
    if ell >= 1 << 31 {
        return Err(Error::InvalidField(format!("characteristic {ell} too large")));
    }
    Ok(())
}

fn checked_pow(ell: u64, d: usize) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..d {
        acc = acc
            .checked_mul(ell)
            .filter(|&v| v < 1 << 62)
            .ok_or_else(|| Error::InvalidField(format!("{ell}^{d} too large")))?;
    }
    Ok(acc)
}

fn digits(mut v: u64, ell: u64, d: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(v % ell);
        v /= ell;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(ell: u64, q: u64) -> FqField {
        FqField::prime(ell, q).unwrap()
    }

    /// q-th powers of F by enumeration.
    fn qth_powers(field: &FqField) -> Vec<Fq> {
        let mut v: Vec<Fq> = field.units().map(|u| field.pow(u, field.q())).collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn unit_class_examples() {
        let f7 = f(7, 3);
        assert_eq!(f7.generator(), Fq(3));
        assert_eq!(qth_powers(&f7), vec![Fq(1), Fq(6)]);
        assert_eq!(f7.unit_class(Fq(3)).unwrap().exponent, 1);
        assert_eq!(f7.unit_class(Fq(6)).unwrap().exponent, 0);
        let f5 = f(5, 3);
        for u in f5.units() {
            assert_eq!(f5.unit_class(u).unwrap().exponent, 0);
        }
        assert_eq!(f7.unit_class(Fq(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn frobenius_examples() {
        let f7 = f(7, 3);
        assert_eq!(f7.rho(), Some(Fq(2)));
        assert_eq!(f7.frobenius_invariant(Fq(3)).unwrap(), 1);
        assert_eq!(f7.frobenius_invariant(Fq(1)).unwrap(), 0);
        assert_eq!(f7.frobenius_invariant(Fq(5)).unwrap(), 2);
        assert!(f7.frobenius_invariant(Fq(0)).is_err());
    }

    #[test]
    fn rejects_q_equal_characteristic() {
        assert!(matches!(FqField::prime(3, 3), Err(Error::QEqualsCharacteristic { .. })));
        assert!(matches!(FqField::prime(9, 3), Err(Error::NotPrime(9))));
        assert!(FqField::new(7, vec![1, 0, 1, 0], 3).is_ok());
        assert!(matches!(FqField::new(5, vec![1, 0, 1], 3), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn mu_q_closure_examples() {
        let c = f(5, 3).mu_q_closure().unwrap();
        assert_eq!((c.degree, c.field().size()), (2, 25));
        assert!(c.field().has_mu_q());
        let c = f(7, 3).mu_q_closure().unwrap();
        assert_eq!((c.degree, c.field().size()), (1, 7));
        let c = f(2, 5).mu_q_closure().unwrap();
        assert_eq!((c.degree, c.field().size()), (4, 16));
        assert_eq!((5 - 1) % c.degree, 0);
    }

    #[test]
    fn extension_norm_of_embedded_elements() {
        let f7 = f(7, 3);
        let ext = f7.extend(2).unwrap();
        assert_eq!(ext.field().size(), 49);
        for u in f7.units() {
            let n = ext.embedding.norm(ext.embedding.apply(u)).unwrap();
            assert_eq!(n, f7.pow(u, 2));
        }
        let id = f7.extend(1).unwrap();
        assert!(id.embedding.is_identity());
        assert_eq!(id.embedding.norm(Fq(3)).unwrap(), Fq(3));
    }

    #[test]
    fn tower_embedding_is_a_ring_map() {
        let f49 = FqField::with_degree(7, 2, 3).unwrap();
        let ext = f49.extend(3).unwrap();
        let e = &ext.embedding;
        let big = ext.field();
        for a in f49.elements().step_by(5) {
            for b in f49.elements().step_by(7) {
                assert_eq!(e.apply(f49.mul(a, b)), big.mul(e.apply(a), e.apply(b)));
                assert_eq!(e.apply(f49.add(a, b)), big.add(e.apply(a), e.apply(b)));
            }
            assert_eq!(e.preimage(e.apply(a)), Some(a));
        }
    }

    #[test]
    fn class_homomorphism_exhaustive_small_fields() {
        for (ell, d, q) in [(7, 1, 3), (13, 1, 3), (11, 1, 5), (11, 2, 3), (2, 4, 5), (3, 2, 2)] {
            let field = FqField::with_degree(ell, d, q).unwrap();
            assert_eq!(field.dlog(field.generator()).unwrap(), 1);
            let powers = qth_powers(&field);
            for u in field.units() {
                let cu = field.unit_class(u).unwrap();
                assert_eq!(cu.exponent, field.dlog(u).unwrap() % q * field.has_mu_q() as u64);
                assert_eq!(cu.is_trivial(), powers.binary_search(&u).is_ok());
                assert_eq!(field.unit_class(field.pow(u, q)).unwrap().exponent, 0);
                for v in field.units().step_by(3) {
                    let cuv = field.unit_class(field.mul(u, v)).unwrap();
                    assert_eq!(cuv, cu.add(field.unit_class(v).unwrap()));
                }
            }
        }
    }

    #[test]
    fn norm_embedding_composite_scales_class() {
        for (ell, q) in [(5u64, 3u64), (7, 3), (2, 5), (11, 5)] {
            let base = f(ell, q);
            let ext = base.mu_q_closure().unwrap();
            let o = ext.degree as i64;
            for u in base.units() {
                let back = ext.embedding.norm(ext.embedding.apply(u)).unwrap();
                assert_eq!(back, base.pow(u, o as u64));
                let lhs = base.unit_class(back).unwrap();
                assert_eq!(lhs, base.unit_class(u).unwrap().scale(o));
            }
        }
    }

    #[test]
    fn coordinate_against_prime_rho_is_galois_invariant() {
        let f49 = FqField::with_degree(7, 2, 3).unwrap();
        let rho = f49.prime_rho().unwrap();
        for u in f49.units() {
            let frob = f49.pow(u, 7);
            assert_eq!(f49.coordinate(u, rho).unwrap(), f49.coordinate(frob, rho).unwrap());
        }
    }

    #[test]
    fn element_of_coordinate_hits_target() {
        let f13 = f(13, 3);
        let rho = f13.prime_rho().unwrap();
        for t in 0..3 {
            let e = f13.element_of_coordinate(t, rho).unwrap();
            assert_eq!(f13.coordinate(e, rho).unwrap(), t);
        }
    }
}
