//! Symbol calculus, curvature densities and spectral functions for Dirac
//! operators on the flat two-torus rescaled by a positive matrix `h = UHU*`.

pub mod specfun;
pub mod symcalc;
pub mod xi_integrate;
