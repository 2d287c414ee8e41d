pub mod born;
pub mod cli;
pub mod error;
pub mod forward;
pub mod fourier;
pub mod geometry;
pub mod io;
pub mod inverse;
pub mod lattice;
pub mod linalg;
pub mod phase;
pub mod quadrature;
pub mod window;
