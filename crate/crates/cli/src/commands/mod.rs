pub mod constant;
pub mod pohozaev;
pub mod solve;
pub mod sweep;
pub mod verify;

use std::sync::Arc;

use cknball::{build_grid, Grading, RadialGrid};

use crate::settings::Settings;
use crate::CliError;

/// Grid defaults shared by the commands.
pub fn default_grid(
    settings: &Settings,
    default_n: usize,
    default_tmax: f64,
    grading: Grading,
) -> Result<(Arc<RadialGrid>, usize, f64), CliError> {
    let n = settings.usize_or("grid-n", default_n)?;
    let t_max = settings.f64_or("tmax", default_tmax)?;
    let grid = build_grid(n, t_max, grading).map_err(CliError::from_core)?;
    Ok((Arc::new(grid), n, t_max))
}

/// Solver options from the shared flags.
pub fn solve_opts(settings: &Settings) -> Result<cknball::SolveOpts, CliError> {
    let mut opts = cknball::SolveOpts::default();
    if let Some(tol) = settings.f64("tol")? {
        opts.tol = tol;
    }
    opts.max_iter = settings.usize_or("max-iter", opts.max_iter)?;
    Ok(opts)
}
