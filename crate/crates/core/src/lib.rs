//! Arithmetic kernel and surface-model pipeline for splitting period-q Brauer classes
//! over function fields of arithmetic surfaces with finite residue fields.

pub mod arith;
pub mod bundled;
pub mod curvebr;
pub mod error;
pub mod ffield;
pub mod gfq;
pub mod model;
pub mod poly;
pub mod ramgraph;
pub mod selfcheck;
pub mod splitdrv;

pub use error::{Error, Result};
pub use gfq::{Embedding, Extension, Fq, FqField, UnitClass};
pub use poly::Poly;
