//! Trajectory data model, a spatio-temporal predicate language with strict,
//! relaxed and approximated evaluation, relation catalogs and a small NF²
//! algebra engine.

pub mod cli;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod model;
pub mod nf2;
pub mod paramset;
pub mod predicate;
pub mod relations;
