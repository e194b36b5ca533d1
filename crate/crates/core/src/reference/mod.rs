//! Independent solutions used to validate the Krylov traces: the closed-form
//! free-space response and a Yee-grid time-stepping solver.

pub mod analytic;
pub mod bessel;
pub mod fdtd;

pub use analytic::{analytic_homogeneous, analytic_time_quadrature, AnalyticProbe};
pub use fdtd::{fdtd_solve, FdtdConfig, FdtdResult, FdtdSolver, Raster};
