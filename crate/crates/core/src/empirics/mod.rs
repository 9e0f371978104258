//! Elliptic-curve empirics over Q: integral Weierstrass models, local
//! reduction data, real periods, torsion, Dirichlet coefficients and
//! L(1), curve-record ingest, and the conditional-correlation analyses
//! that run on top of them.

pub mod gen;
pub mod hecke;
pub mod period;
pub mod record;
pub mod tate;
pub mod torsion;
pub mod wmodel;
