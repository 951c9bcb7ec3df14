//! `pohozaev`: identity verification on a ball at subcritical p, or the
//! supercritical concentration probe at p ≥ max{2*, 2_α^β}.

use std::sync::Arc;

use serde::Serialize;

use cknball::pohozaev::{
    bracket2, laplacian_factor, pohozaev_report, supercritical_probe, BallDomain, ProbeProfile,
};
use cknball::solver::shoot_ball;
use cknball::{build_grid, Grading, Mode, Params};

use crate::output::{write_csv, write_json};
use crate::settings::Settings;
use crate::svg::{line_plot, Series};
use crate::{CliError, EXIT_OK};

#[derive(Debug, Serialize)]
struct IdentityReport {
    command: String,
    mode: String,
    n: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    t_ball: f64,
    shooting_value: f64,
    boundary_term: f64,
    bracket_integral: f64,
    laplacian_integral: f64,
    residual: f64,
    min_bracket: f64,
    min_laplacian_factor: f64,
    cross_agreement: f64,
    laplacian_hypothesis_ok: bool,
}

#[derive(Debug, Serialize)]
struct ProbeRunReport {
    command: String,
    mode: String,
    n: u32,
    alpha: f64,
    beta: f64,
    p: f64,
    t_ball: f64,
    entries: Vec<(f64, f64)>,
    last_ratios: Vec<f64>,
    decreasing: bool,
    increasing: bool,
    laplacian_hypothesis_ok: bool,
}

pub fn run(settings: &Settings) -> Result<u8, CliError> {
    let n = settings.u32_or("N", 3)?;
    let alpha = settings.f64_or("alpha", 0.0)?;
    let beta = settings.f64_or("beta", 0.0)?;
    let p = settings.require_f64("p")?;
    let params = Params::pohozaev(n, alpha, beta, p);
    let viol = params.validate(Mode::Pohozaev);
    if !viol.is_empty() {
        return Err(CliError::validation(&viol));
    }
    if !params.laplacian_hypothesis_ok() {
        eprintln!(
            "warning: parameter set violates the pointwise-positivity hypothesis N >= alpha-1, beta > -N; emitting with flag"
        );
    }
    let crit = params
        .crit()
        .ok_or_else(|| CliError::usage("degenerate critical exponent".into()))?
        .max(params.sobolev_crit());

    let out = settings.out_dir();
    let fmt = settings.formats();

    // positivity scan CSV and plot are emitted in both modes
    let scan_rows: Vec<Vec<f64>> = (1..=2000)
        .map(|i| {
            let r = i as f64 / 2001.0;
            vec![
                r,
                bracket2(&params, r).unwrap_or(f64::NAN),
                laplacian_factor(&params, r).unwrap_or(f64::NAN),
            ]
        })
        .collect();
    if fmt.csv {
        write_csv(
            &out.join("scan.csv"),
            "r,bracket2,laplacian_factor",
            &scan_rows,
        )?;
    }
    if fmt.svg {
        let pts: Vec<(f64, f64)> = scan_rows.iter().map(|r| (r[0], r[1])).collect();
        let svg = line_plot(
            &format!("second-order bracket (N={n}, alpha={alpha}, beta={beta}, p={p})"),
            "r",
            "bracket2",
            &[Series {
                points: &pts,
                color: "#2ca02c",
                label: "bracket2(r)",
            }],
        );
        crate::output::write_atomic(&out.join("bracket.svg"), svg.as_bytes())?;
    }

    if p < crit {
        // identity mode: shoot the Dirichlet problem at q = p and evaluate
        let t_ball = settings.f64_or("tmax", 1.0)?;
        let grid = Arc::new(
            build_grid(
                settings.usize_or("grid-n", 600)?,
                t_ball,
                Grading::default(),
            )
            .map_err(CliError::from_core)?,
        );
        let solve_params = Params::solve(n, alpha, beta, 0.0, p);
        let sviol = solve_params.validate(Mode::Solve);
        if !sviol.is_empty() {
            return Err(CliError::validation(&sviol));
        }
        let opts = super::solve_opts(settings)?;
        let shot = shoot_ball(&solve_params, &grid, 1.0, &opts).map_err(CliError::from_core)?;
        let dom = BallDomain::new(t_ball).map_err(CliError::from_core)?;
        let rep = pohozaev_report(&shot.u, &dom, &params).map_err(CliError::from_core)?;
        let report = IdentityReport {
            command: "pohozaev".into(),
            mode: "identity".into(),
            n,
            alpha,
            beta,
            p,
            t_ball,
            shooting_value: shot.s0,
            boundary_term: rep.boundary_term,
            bracket_integral: rep.bracket_integral,
            laplacian_integral: rep.laplacian_integral,
            residual: rep.residual,
            min_bracket: rep.min_bracket,
            min_laplacian_factor: rep.min_laplacian_factor,
            cross_agreement: rep.cross_agreement,
            laplacian_hypothesis_ok: params.laplacian_hypothesis_ok(),
        };
        if fmt.json {
            write_json(&out.join("pohozaev.json"), &report)?;
        }
        if fmt.csv {
            let mut buf = Vec::new();
            shot.u.write_csv(&mut buf).map_err(CliError::from_core)?;
            crate::output::write_atomic(&out.join("solution.csv"), &buf)?;
        }
        println!(
            "pohozaev identity: residual {:.3e} (boundary {:.6e}, bracket {:.6e}, laplacian {:.6e})",
            report.residual, report.boundary_term, report.bracket_integral, report.laplacian_integral
        );
    } else {
        // probe mode
        let t_ball = settings.f64_or("tmax", 8.0)?;
        let dom = BallDomain::new(t_ball).map_err(CliError::from_core)?;
        let family = settings.usize_or("family-size", 10)?;
        let rep = supercritical_probe(&params, &dom, family, ProbeProfile::SmoothBump)
            .map_err(CliError::from_core)?;
        let report = ProbeRunReport {
            command: "pohozaev".into(),
            mode: "probe".into(),
            n,
            alpha,
            beta,
            p,
            t_ball,
            entries: rep.entries.clone(),
            last_ratios: rep.last_ratios.clone(),
            decreasing: rep.decreasing,
            increasing: rep.increasing,
            laplacian_hypothesis_ok: rep.laplacian_hypothesis_ok,
        };
        if fmt.json {
            write_json(&out.join("pohozaev.json"), &report)?;
        }
        if fmt.csv {
            let rows: Vec<Vec<f64>> = rep.entries.iter().map(|&(e, q)| vec![e, q]).collect();
            write_csv(&out.join("probe.csv"), "epsilon,quotient", &rows)?;
        }
        println!(
            "pohozaev probe: {} entries, collapse signature decreasing = {}",
            report.entries.len(),
            report.decreasing
        );
    }
    Ok(EXIT_OK)
}
