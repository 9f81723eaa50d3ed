//! Exact computations with representation rings, monomial rings and
//! hyperHecke algebras of finite general linear groups.

pub mod character;
pub mod classfn;
pub mod context;
pub mod cyclo;
pub mod error;
pub mod field;
pub mod graded;
pub mod hyperhecke;
pub mod group;
pub mod indmod;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod parabolic;
pub mod rplus;
pub mod verify;

pub use error::{Error, Result};
