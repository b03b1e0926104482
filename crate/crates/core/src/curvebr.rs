//! q-torsion Brauer classes of `F(t)` as residue vectors, cyclic covers and the
//! residual-class transform.
//!
//! A class is recorded by its Frobenius residue coordinates, one element of
//! `Z/q` per place. Coordinates are measured against the q-th root of unity pinned
//! in the prime field, so they do not depend on how a residue field is presented
//! and the exact sequence for `Br(F(t))` reads as "the residues sum to zero".

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ffield::{FunctionField, Place, RationalFunction};
use crate::gfq::Fq;
use crate::poly::Poly;

/// Identifies a place of `F(t)` independently of its residue-field model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceKey {
    /// Encodings of the monic irreducible polynomial's coefficients, low first.
    Finite(Vec<u64>),
    Infinity,
}

impl PlaceKey {
    pub fn of(place: &Place) -> PlaceKey {
        match place.key() {
            Some(k) => PlaceKey::Finite(k),
            None => PlaceKey::Infinity,
        }
    }
}

impl fmt::Display for PlaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceKey::Infinity => write!(f, "inf"),
            PlaceKey::Finite(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

/// Finitely supported map place -> `Z/q`, zero entries omitted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResidueVector {
    q: u64,
    entries: BTreeMap<PlaceKey, u64>,
}

impl ResidueVector {
    pub fn zero(q: u64) -> Self {
        ResidueVector { q, entries: BTreeMap::new() }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn get(&self, key: &PlaceKey) -> u64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    /// Add `r` to the entry at `key`.
    pub fn add_at(&mut self, key: PlaceKey, r: i64) {
        let v = (self.get(&key) as i64 + r).rem_euclid(self.q as i64) as u64;
        if v == 0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlaceKey, &u64)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &PlaceKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &ResidueVector) -> ResidueVector {
        let mut out = self.clone();
        for (k, &v) in &other.entries {
            out.add_at(k.clone(), v as i64);
        }
        out
    }

    pub fn scale(&self, k: i64) -> ResidueVector {
        let mut out = ResidueVector::zero(self.q);
        for (key, &v) in &self.entries {
            out.add_at(key.clone(), v as i64 * k.rem_euclid(self.q as i64));
        }
        out
    }

    pub fn neg(&self) -> ResidueVector {
        self.scale(-1)
    }

    /// Sum of all residues mod q; zero for every genuine class.
    pub fn total(&self) -> u64 {
        self.entries.values().sum::<u64>() % self.q
    }
}

impl fmt::Display for ResidueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Class is zero iff every residue vanishes.
pub fn is_zero(beta: &ResidueVector) -> bool {
    beta.is_empty()
}

/// The cyclic extension `F(t)(c^{1/q})` with generator `sigma(c^{1/q}) = rho c^{1/q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicCover {
    pub c: RationalFunction,
}

/// Local behaviour of a place in a cyclic cover.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CoverBehaviour {
    Ramified,
    Inert,
    Split,
}

/// Brauer arithmetic over `F(t)` when `F` contains the q-th roots of unity.
#[derive(Clone, Debug)]
pub struct CurveBrauer {
    field: FunctionField,
    rho: Fq,
}

impl CurveBrauer {
    pub fn new(field: FunctionField) -> Result<Self> {
        let base = field.base();
        let rho = base.prime_rho().ok_or(Error::MissingRootsOfUnity { q: base.q(), size: base.ell() })?;
        Ok(CurveBrauer { field, rho })
    }

    pub fn field(&self) -> &FunctionField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn rho(&self) -> Fq {
        self.rho
    }

    /// Frobenius coordinate of a residue-field unit at `place`.
    pub fn coordinate(&self, place: &Place, u: Fq) -> Result<u64> {
        place.residue_field().coordinate(u, self.rho)
    }

    /// Residue of the symbol `(a, b)` at one place.
    pub fn symbol_residue_at(&self, place: &Place, a: &RationalFunction, b: &RationalFunction) -> Result<u64> {
        self.coordinate(place, self.field.tame_residue_unit(place, a, b)?)
    }

    pub fn symbol_residues(&self, a: &RationalFunction, b: &RationalFunction) -> Result<ResidueVector> {
        let mut out = ResidueVector::zero(self.q());
        for place in self.field.support(&[a, b])? {
            let r = self.symbol_residue_at(&place, a, b)?;
            out.add_at(PlaceKey::of(&place), r as i64);
        }
        Ok(out)
    }

    pub fn cover(&self, c: RationalFunction) -> Result<CyclicCover> {
        if c.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(CyclicCover { c })
    }

    /// True when `c` is a q-th power, i.e. the cover splits everywhere.
    pub fn cover_is_trivial(&self, cover: &CyclicCover) -> Result<bool> {
        self.field.is_qth_power(&cover.c)
    }

    /// Residues of `Delta(L, sigma, b)`, which equals the symbol `(c, b)`.
    pub fn cyclic_residues(&self, cover: &CyclicCover, b: &RationalFunction) -> Result<ResidueVector> {
        self.symbol_residues(&cover.c, b)
    }

    pub fn place_of_key(&self, key: &PlaceKey) -> Result<Place> {
        match key {
            PlaceKey::Infinity => Ok(self.field.infinity()),
            PlaceKey::Finite(c) => {
                let p = Poly::new(c.iter().map(|&x| Fq(x)).collect());
                self.field.place(p)
            }
        }
    }

    pub fn behaviour(&self, cover: &CyclicCover, place: &Place) -> Result<CoverBehaviour> {
        let v = self.field.valuation(place, &cover.c)?;
        if v.rem_euclid(self.q() as i64) != 0 {
            return Ok(CoverBehaviour::Ramified);
        }
        let cbar = self.field.leading_residue(place, &cover.c)?;
        Ok(if place.residue_field().is_qth_power(cbar) { CoverBehaviour::Split } else { CoverBehaviour::Inert })
    }

    /// True iff pulling `beta` back to the cover kills every residue.
    pub fn split_by_cover(&self, beta: &ResidueVector, cover: &CyclicCover) -> Result<bool> {
        for key in beta.support() {
            let place = self.place_of_key(key)?;
            if self.behaviour(cover, &place)? == CoverBehaviour::Split {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `beta + Delta(L, sigma, u^{-t})`.
    pub fn residual_transform(
        &self,
        beta: &ResidueVector,
        cover: &CyclicCover,
        u: &RationalFunction,
        t: i64,
    ) -> Result<ResidueVector> {
        let w = self.field.pow(u, -t)?;
        Ok(beta.add(&self.cyclic_residues(cover, &w)?))
    }
}
