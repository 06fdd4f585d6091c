//! Goldbach dihedral sieve over Z_N: the prime-pair covering, its affine
//! symmetry group, membership criteria for that group, and a scanner over
//! ranges of even N. A small generic engine for finite group actions backs the
//! dihedral constructions.

pub mod affine;
pub mod criteria;
pub mod dihedral;
pub mod group_core;
pub mod modarith;
pub mod scanner;
pub mod sieve;
pub mod symmetry;
