//! Numerical toolkit for weighted variational problems on the Poincaré ball.
//!
//! The crate evaluates distance-weighted energies and Caffarelli–Kohn–
//! Nirenberg-type quotients for radial functions in hyperbolic space,
//! estimates best constants by quotient minimization, computes positive
//! radial ground states of the weighted Hardy–Hénon equation (by Nehari
//! quotient minimization cross-validated against ODE shooting), and checks
//! the Pohozaev identity and its supercritical non-existence mechanism.
//!
//! Modules mirror the analytic toolchain:
//! * [`geometry`] — closed-form hyperbolic primitives and divergence factors;
//! * [`quadrature`] — graded Gauss rules on the geodesic half-line;
//! * [`functionals`] — weighted energies, quotients, change-of-variables check;
//! * [`solver`] — ground states via constrained minimization and shooting;
//! * [`pohozaev`] — identity terms, positivity scans, concentration probes;
//! * [`checks`] — the named verification suite behind `verify`.

pub mod checks;
pub mod error;
pub mod fem;
pub mod functionals;
pub mod geometry;
pub mod params;
pub mod pohozaev;
pub mod quadrature;
pub mod solver;

pub use checks::{run_checks, CheckOpts, CheckResult};
pub use error::{Error, Result};
pub use functionals::EnergyReport;
pub use params::{Mode, Params, Violation};
pub use pohozaev::{BallDomain, PohozaevReport, ProbeProfile, ProbeReport};
pub use quadrature::{build_grid, integrate_weighted, Grading, RadialFn, RadialGrid};
pub use solver::{SolveMethod, SolveOpts, SolveResult};
