//! How a degree-q Kummer extension `K(m^{1/q})` treats the ramification of a class at a valuation.

use serde::Serialize;

use super::bivariate::{BivariateField, MonomialValuation, RatFunc2};
use super::rational::{FunctionField, Place, RationalFunction};
use crate::error::Result;
use crate::gfq::Fq;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SplitMode {
    /// The class is unramified at the valuation.
    Unramified,
    /// `d(m)` is prime to q: the extension is totally ramified and kills the ramification.
    ByRamification,
    /// The extension is unramified and its residue extension absorbs the ramification character.
    ByResidues,
    NotSplit,
}

impl SplitMode {
    pub fn splits(self) -> bool {
        self != SplitMode::NotSplit
    }
}

/// The dichotomy itself: `absorbs(j)` reports whether `ram * mbar^{-j}` is a q-th power.
pub fn split_mode(
    q: u64,
    ram_trivial: bool,
    value_of_m: i64,
    mut absorbs: impl FnMut(u64) -> Result<bool>,
) -> Result<SplitMode> {
    if ram_trivial {
        return Ok(SplitMode::Unramified);
    }
    if value_of_m.rem_euclid(q as i64) != 0 {
        return Ok(SplitMode::ByRamification);
    }
    for j in 1..q {
        if absorbs(j)? {
            return Ok(SplitMode::ByResidues);
        }
    }
    Ok(SplitMode::NotSplit)
}

/// Split check at a monomial valuation of `F(x, y)(T)`; `ram` represents the ramification.
pub fn split_check_monomial(
    field: &BivariateField,
    d: &MonomialValuation,
    m: &RatFunc2,
    ram: &RatFunc2,
) -> Result<SplitMode> {
    let fld = field.base();
    let (vm, mbar) = d.residue(m, fld)?;
    split_mode(fld.q(), field.is_qth_power(ram)?, vm, |j| {
        let t = ram.mul(&mbar.pow(-(j as i64), fld)?, fld);
        field.is_qth_power(&t)
    })
}

/// Split check at a place of `F(t)`; `ram` is the tame residue unit there.
pub fn split_check_place(field: &FunctionField, place: &Place, m: &RationalFunction, ram: Fq) -> Result<SplitMode> {
    let r = place.residue_field();
    let vm = field.valuation(place, m)?;
    let mbar = field.leading_residue(place, m)?;
    split_mode(r.q(), r.is_qth_power(ram), vm, |j| Ok(r.is_qth_power(r.mul(ram, r.pow_signed(mbar, -(j as i64))?))))
}
