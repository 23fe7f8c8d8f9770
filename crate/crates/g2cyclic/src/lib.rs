//! Exact split-octonion and G2' algebra, stability arithmetic for cyclic
//! Higgs bundles, and a chart-level solver for the cyclic Hitchin equations
//! with curve reconstruction.

pub mod exact;
pub mod linalg;
pub mod octonion;
pub mod lie;
pub mod stability;
pub mod solver;
pub mod frenet;
