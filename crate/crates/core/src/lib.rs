//! Exact computer algebra for bundles of finite groups and modules over
//! finite spaces.
//!
//! The crate covers the finite level of a bundle calculus: finite spaces and
//! fibre products ([`finspace`]), multiplication-table groups with exhaustive
//! homomorphism enumeration ([`fingroup`]), finite modules over `Z/n` and
//! group algebras with tensor, Tor, induction and Pontryagin duality
//! ([`finmod`]), bundles with fibrewise functor lifting and internal
//! coproducts ([`bundle`]), finite internal categories and their colimits
//! ([`internalcat`]) and towers of finite objects ([`protower`]).
//!
//! Profinite objects that are not finite are never materialized. They are
//! observed through their homomorphisms into finite test objects, or through
//! towers of finite quotients.

pub mod abelian;
pub mod bundle;
pub mod error;
pub mod fingroup;
pub mod finmod;
pub mod finspace;
pub mod internalcat;
pub mod matrix;
pub mod protower;

pub use error::{Error, Result};
