//! Polynomial-sign encodings of geometric intersection graphs and related
//! edge-labelled structures, with exact constructions of many distinct
//! labelings and tools for counting realizable ones.

pub mod poly;
pub mod linalg;
pub mod framework;
pub mod sampling;
pub mod families;
pub mod spec_file;
pub mod wallpair;
pub mod counting;
pub mod construct;
