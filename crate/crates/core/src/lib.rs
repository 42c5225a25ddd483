pub mod airy;
pub mod cartan;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod psi;
pub mod rep;
pub mod spectral;
pub mod tolerance;
