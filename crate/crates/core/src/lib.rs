//! Traveling waves of defocusing nonlinear Schrödinger equations with unit
//! modulus at infinity, computed by constrained minimization on a periodic
//! pseudospectral grid.
//!
//! The crate is organized bottom-up: [`grid`] holds fields and spectral
//! operators, [`physics`] the nonlinearities and functionals, [`ansatz`] the
//! explicit comparison fields, [`minimize`] the constrained solvers, [`kp`]
//! the KP-I lump solver and [`diagnostics`] the identity checks. [`cli`]
//! drives everything from the command line.

pub mod ansatz;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod kp;
pub mod minimize;
pub mod physics;

pub use error::{Error, Result};
pub use grid::{Axis, ComplexField, Grid, ReflectionSign, ScalarField, Spectrum};
pub use physics::{CutoffPhi, Functionals, Lifting, Nonlinearity};
