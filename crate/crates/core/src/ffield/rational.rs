//! The rational function field `F(t)` over a finite field and its places.

use crate::error::{Error, Result};
use crate::gfq::{Embedding, Fq, FqField, UnitClass};
use crate::poly::{minimal_polynomial, Poly};

/// A reduced fraction `num/den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    /// Zero locus of a monic irreducible polynomial.
    Finite(Poly),
    /// The place `t = infinity`, with uniformizer `1/t`.
    Infinite,
}

/// A place of `F(t)`, together with a concrete model of its residue field.
#[derive(Clone, Debug)]
pub struct Place {
    kind: PlaceKind,
    residue: FqField,
    /// `F -> residue field`.
    embedding: Embedding,
    /// Image of `t` in the residue field (zero for the infinite place).
    root: Fq,
}

impl PartialEq for Place {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.embedding.source == other.embedding.source
    }
}

impl Eq for Place {}

impl Place {
    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == PlaceKind::Infinite
    }

    pub fn polynomial(&self) -> Option<&Poly> {
        match &self.kind {
            PlaceKind::Finite(p) => Some(p),
            PlaceKind::Infinite => None,
        }
    }

    pub fn residue_field(&self) -> &FqField {
        &self.residue
    }

    pub fn base(&self) -> &FqField {
        &self.embedding.source
    }

    /// Degree of the residue field over the constant field.
    pub fn degree(&self) -> usize {
        match &self.kind {
            PlaceKind::Finite(p) => p.deg(),
            PlaceKind::Infinite => 1,
        }
    }

    /// The point `t = root` in the residue field.
    pub fn root(&self) -> Fq {
        self.root
    }

    pub fn embed_constant(&self, c: Fq) -> Fq {
        self.embedding.apply(c)
    }

    /// Stable key: coefficient encodings low first, `None` for infinity.
    pub fn key(&self) -> Option<Vec<u64>> {
        self.polynomial().map(|p| p.coeffs().iter().map(|c| c.0).collect())
    }

    /// Embedding of the residue field into `target` sending the image of `t` to `tau`.
    pub fn residue_embedding(&self, target: &FqField, tau: Fq) -> Result<Embedding> {
        if self.residue == *self.base() {
            return self.residue.embedding_into(target);
        }
        let p = self.polynomial().expect("infinite place has the constant residue field");
        if !self.base().is_prime_field() {
            return Err(Error::Unsupported("places of degree > 1 over extension fields".into()));
        }
        if !p.eval(tau, target).is_zero() {
            return Err(Error::Precondition("point is not a zero of the place polynomial".into()));
        }
        Ok(Embedding { source: self.residue.clone(), target: target.clone(), image_of_x: tau })
    }
}

/// `F(t)` for a finite field `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionField {
    base: FqField,
}

impl FunctionField {
    pub fn new(base: FqField) -> Self {
        FunctionField { base }
    }

    pub fn base(&self) -> &FqField {
        &self.base
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    // --- construction ---------------------------------------------------------------

    pub fn fraction(&self, num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        let f = &self.base;
        if num.is_zero() {
            return Ok(RationalFunction { num, den: Poly::one() });
        }
        let g = num.gcd(&den, f);
        let (mut n, mut d) = (num.exact_div(&g, f).unwrap(), den.exact_div(&g, f).unwrap());
        let lc = f.inv(d.lc())?;
        n = n.scale(lc, f);
        d = d.scale(lc, f);
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn from_poly(&self, p: Poly) -> RationalFunction {
        self.fraction(p, Poly::one()).expect("nonzero denominator")
    }

    /// Fraction with integer (prime-subfield) coefficients, low degree first.
    pub fn from_ints(&self, num: &[u64], den: &[u64]) -> Result<RationalFunction> {
        self.fraction(Poly::from_ints(&self.base, num), Poly::from_ints(&self.base, den))
    }

    pub fn constant(&self, c: Fq) -> RationalFunction {
        self.from_poly(Poly::constant(c))
    }

    pub fn one(&self) -> RationalFunction {
        self.constant(Fq::ONE)
    }

    pub fn t(&self) -> RationalFunction {
        self.from_poly(Poly::x())
    }

    // --- arithmetic ---------------------------------------------------------------

    pub fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        let f = &self.base;
        self.fraction(a.num.mul(&b.num, f), a.den.mul(&b.den, f)).expect("nonzero")
    }

    pub fn inv(&self, a: &RationalFunction) -> Result<RationalFunction> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        self.fraction(a.den.clone(), a.num.clone())
    }

    pub fn div(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn add(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        let f = &self.base;
        let num = a.num.mul(&b.den, f).add(&b.num.mul(&a.den, f), f);
        self.fraction(num, a.den.mul(&b.den, f)).expect("nonzero")
    }

    pub fn neg(&self, a: &RationalFunction) -> RationalFunction {
        RationalFunction { num: a.num.neg(&self.base), den: a.den.clone() }
    }

    pub fn sub(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        self.add(a, &self.neg(b))
    }

    pub fn pow(&self, a: &RationalFunction, e: i64) -> Result<RationalFunction> {
        let f = &self.base;
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let k = e.unsigned_abs();
        Ok(RationalFunction { num: base.num.pow(k, f), den: base.den.pow(k, f) })
    }

    // --- places ---------------------------------------------------------------------

    pub fn infinity(&self) -> Place {
        Place {
            kind: PlaceKind::Infinite,
            residue: self.base.clone(),
            embedding: Embedding::identity(&self.base),
            root: Fq::ZERO,
        }
    }

    /// The place cut out by a monic irreducible polynomial.
    pub fn place(&self, p: Poly) -> Result<Place> {
        let f = &self.base;
        if !p.is_monic() || !p.is_irreducible(f) {
            return Err(Error::NotIrreducible(format!("{:?}", p.coeffs())));
        }
        let k = p.deg();
        if k == 1 {
            let root = f.neg(p.coeff(0));
            return Ok(Place {
                kind: PlaceKind::Finite(p),
                residue: f.clone(),
                embedding: Embedding::identity(f),
                root,
            });
        }
        if f.is_prime_field() {
            let modulus: Vec<u64> = p.coeffs().iter().map(|c| c.0).collect();
            let residue = FqField::new(f.ell(), modulus, f.q())?;
            let embedding = f.embedding_into(&residue)?;
            let root = residue.x();
            return Ok(Place { kind: PlaceKind::Finite(p), residue, embedding, root });
        }
        let residue = FqField::with_degree(f.ell(), f.degree() * k, f.q())?;
        let embedding = f.embedding_into(&residue)?;
        let root = *p
            .map(|c| embedding.apply(c))
            .roots(&residue)
            .first()
            .ok_or_else(|| Error::InvalidField("place polynomial has no root".into()))?;
        Ok(Place { kind: PlaceKind::Finite(p), residue, embedding, root })
    }

    /// Degree-one place `t = a`.
    pub fn place_at(&self, a: Fq) -> Place {
        self.place(Poly::linear(a, &self.base)).expect("linear polynomials are irreducible")
    }

    /// The place under a point `t = tau` with `tau` in a field containing the constants.
    pub fn place_of_point(&self, tau: Fq, field: &FqField) -> Result<Place> {
        if *field == self.base {
            return Ok(self.place_at(tau));
        }
        if !self.base.is_prime_field() {
            return Err(Error::Unsupported("points in proper extensions of a non-prime constant field".into()));
        }
        self.place(minimal_polynomial(tau, field))
    }

    /// Finite places in the divisor of `f`, sorted, followed by infinity.
    pub fn support(&self, fs: &[&RationalFunction]) -> Result<Vec<Place>> {
        let mut polys: Vec<Poly> = Vec::new();
        for f in fs {
            if f.is_zero() {
                return Err(Error::ZeroInput);
            }
            for p in [&f.num, &f.den] {
                if p.deg() > 0 {
                    polys.extend(p.factor(&self.base).into_iter().map(|(g, _)| g));
                }
            }
        }
        polys.sort_by_key(|p| p.sort_key());
        polys.dedup();
        let mut out = polys.into_iter().map(|p| self.place(p)).collect::<Result<Vec<_>>>()?;
        out.push(self.infinity());
        Ok(out)
    }

    pub fn valuation(&self, place: &Place, f: &RationalFunction) -> Result<i64> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        match &place.kind {
            PlaceKind::Infinite => Ok(f.den.deg() as i64 - f.num.deg() as i64),
            PlaceKind::Finite(p) => {
                Ok(poly_order(&f.num, p, &self.base) as i64 - poly_order(&f.den, p, &self.base) as i64)
            }
        }
    }

    /// Residue of `f / pi^v(f)` for the standard uniformizer (`p` or `1/t`).
    pub fn leading_residue(&self, place: &Place, f: &RationalFunction) -> Result<Fq> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        let r = &place.residue;
        match &place.kind {
            PlaceKind::Infinite => r.div(f.num.lc(), f.den.lc()),
            PlaceKind::Finite(p) => {
                let n = strip(&f.num, p, &self.base);
                let d = strip(&f.den, p, &self.base);
                r.div(self.reduce_poly(place, &n), self.reduce_poly(place, &d))
            }
        }
    }

    /// Image of a `place`-unit in the residue field.
    pub fn reduce(&self, place: &Place, f: &RationalFunction) -> Result<Fq> {
        if self.valuation(place, f)? != 0 {
            return Err(Error::Precondition("not a unit at the place".into()));
        }
        self.leading_residue(place, f)
    }

    fn reduce_poly(&self, place: &Place, g: &Poly) -> Fq {
        g.map(|c| place.embedding.apply(c)).eval(place.root, &place.residue)
    }

    /// The unit `(-1)^{AB} a^B / b^A` reduced into the residue field, `A = v(a)`, `B = v(b)`.
    pub fn tame_residue_unit(&self, place: &Place, a: &RationalFunction, b: &RationalFunction) -> Result<Fq> {
        let (va, vb) = (self.valuation(place, a)?, self.valuation(place, b)?);
        let r = &place.residue;
        let a0 = self.leading_residue(place, a)?;
        let b0 = self.leading_residue(place, b)?;
        let sign = if (va * vb).rem_euclid(2) == 1 { r.neg(Fq::ONE) } else { Fq::ONE };
        let u = r.mul(sign, r.mul(r.pow_signed(a0, vb)?, r.pow_signed(b0, -va)?));
        Ok(u)
    }

    /// Ramification of the symbol `(a, b)` at `place`, as a class of the residue field.
    pub fn tame_residue(&self, place: &Place, a: &RationalFunction, b: &RationalFunction) -> Result<UnitClass> {
        place.residue.unit_class(self.tame_residue_unit(place, a, b)?)
    }

    /// True iff `f` is a q-th power in `F(t)`.
    pub fn is_qth_power(&self, f: &RationalFunction) -> Result<bool> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        let q = self.q() as usize;
        let fld = &self.base;
        let lc = f.num.lc();
        if !fld.is_qth_power(lc) {
            return Ok(false);
        }
        for p in [&f.num, &f.den] {
            if p.deg() > 0 && p.factor(fld).iter().any(|(_, m)| m % q != 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exponent of the irreducible `p` in `g`.
fn poly_order(g: &Poly, p: &Poly, f: &FqField) -> usize {
    let mut k = 0;
    let mut cur = g.clone();
    while let Some(next) = cur.exact_div(p, f) {
        cur = next;
        k += 1;
    }
    k
}

fn strip(g: &Poly, p: &Poly, f: &FqField) -> Poly {
    let mut cur = g.clone();
    while let Some(next) = cur.exact_div(p, f) {
        cur = next;
    }
    cur
}
