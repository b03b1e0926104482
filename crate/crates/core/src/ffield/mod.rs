//! Rational function fields in one and two variables over finite fields, their
//! valuations, tame residues and q-th power tests.

mod bivariate;
mod rational;
mod split;

pub use bivariate::{
    qth_root_elem, qth_root_poly, qth_root_poly2, BivariateField, MonomialValuation, Poly2, RatFunc2, VariableOrder,
};
pub use rational::{FunctionField, Place, PlaceKind, RationalFunction};
pub use split::{split_check_monomial, split_check_place, split_mode, SplitMode};
