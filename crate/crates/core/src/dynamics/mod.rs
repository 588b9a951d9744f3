//! Finite-support operator laboratory for weighted shifts and their polynomials.

pub mod poly;
pub mod vector;
pub mod witness;

pub use poly::{apply_poly, poly_power, PolyMode, PolyPower};
pub use vector::{apply_shift, orbit_table, parse_vector, right_inverse, seminorm, seminorm_log, OrbitRow, TruncatedVector};
pub use witness::{
    build_divergence_witness, build_hypercyclic_prefix, verify_witness, DivergenceWitness, PrefixReport,
    WitnessCheck,
};
