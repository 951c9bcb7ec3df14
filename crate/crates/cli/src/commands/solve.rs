//! `solve`: positive radial ground state for (alpha, beta, lambda, q).

use serde::{Deserialize, Serialize};

use cknball::solver::{mountain_pass_profile, solve_ground_state};
use cknball::{Grading, Mode, Params};

use crate::output::{write_csv, write_json};
use crate::settings::Settings;
use crate::svg::{line_plot, Series};
use crate::{CliError, EXIT_NONCONVERGENCE, EXIT_OK};

#[derive(Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub command: String,
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub q: f64,
    pub quotient: f64,
    pub residual: f64,
    pub method: String,
    pub iterations: usize,
    pub converged: bool,
    pub positivity_ok: bool,
    pub nehari_gap: f64,
    pub grid_n: usize,
    pub t_max: f64,
}

pub fn compute(
    settings: &Settings,
    alpha: f64,
    beta: f64,
    lambda: f64,
    q: f64,
) -> Result<(SolveReport, cknball::RadialFn, Params), CliError> {
    let n = settings.u32_or("N", 3)?;
    let params = Params::solve(n, alpha, beta, lambda, q);
    let viol = params.validate(Mode::Solve);
    if !viol.is_empty() {
        return Err(CliError::validation(&viol));
    }
    let (grid, _, t_max) = super::default_grid(settings, 700, 40.0, Grading::default())?;
    let opts = super::solve_opts(settings)?;
    let res = solve_ground_state(&params, &grid, &opts).map_err(CliError::from_core)?;
    let report = SolveReport {
        command: "solve".into(),
        n,
        alpha,
        beta,
        lambda,
        q,
        quotient: res.quotient,
        residual: res.residual,
        method: "nehari".into(),
        iterations: res.iterations,
        converged: res.converged,
        positivity_ok: res.positivity_ok,
        nehari_gap: res.nehari_gap,
        grid_n: grid.len(),
        t_max,
    };
    Ok((report, res.u, params))
}

pub fn run(settings: &Settings) -> Result<u8, CliError> {
    let alpha = settings.f64_or("alpha", 0.0)?;
    let beta = settings.f64_or("beta", 0.0)?;
    let lambda = settings.f64_or("lambda", 0.0)?;
    let q = settings.require_f64("q")?;
    let (report, u, params) = compute(settings, alpha, beta, lambda, q)?;

    let out = settings.out_dir();
    let fmt = settings.formats();
    if fmt.json {
        write_json(&out.join("solve.json"), &report)?;
    }
    if fmt.csv {
        let mut buf = Vec::new();
        u.write_csv(&mut buf).map_err(CliError::from_core)?;
        crate::output::write_atomic(&out.join("solution.csv"), &buf)?;
        // fibering profile out to past the zero crossing
        let norm = cknball::functionals::shifted_norm_sq(&u, alpha, lambda, report.n)
            .map_err(CliError::from_core)?;
        let mass = cknball::functionals::lq_weighted(&u, beta, q, report.n)
            .map_err(CliError::from_core)?;
        let s_zero = (q * norm / (2.0 * mass)).powf(1.0 / (q - 2.0));
        let samples: Vec<f64> = (0..=160).map(|i| 1.25 * s_zero * i as f64 / 160.0).collect();
        let prof =
            mountain_pass_profile(&u, &params, &samples).map_err(CliError::from_core)?;
        let rows: Vec<Vec<f64>> = prof.iter().map(|&(s, v)| vec![s, v]).collect();
        write_csv(&out.join("mountain_pass.csv"), "s,action", &rows)?;
    }
    if fmt.svg {
        let prof: Vec<(f64, f64)> = u
            .grid()
            .nodes()
            .iter()
            .zip(u.values())
            .map(|(&t, &v)| (t, v))
            .collect();
        let svg = line_plot(
            &format!(
                "ground state (N={}, alpha={alpha}, beta={beta}, lambda={lambda}, q={q})",
                report.n
            ),
            "t",
            "u",
            &[Series {
                points: &prof,
                color: "#1f77b4",
                label: "u(t)",
            }],
        );
        crate::output::write_atomic(&out.join("solution.svg"), svg.as_bytes())?;
    }
    println!(
        "solve: mu {:.8}, residual {:.3e}, nehari gap {:.3e}, positive {}, converged {}",
        report.quotient, report.residual, report.nehari_gap, report.positivity_ok, report.converged
    );
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NONCONVERGENCE
    })
}
