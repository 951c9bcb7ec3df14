//! `constant`: quotient-infimum estimates for a CKN parameter pair, plus the
//! Hardy and spectral floors.

use serde::{Deserialize, Serialize};

use cknball::functionals::{rayleigh_ckn, sample_family};
use cknball::geometry::{hardy_constant, spectral_bottom};
use cknball::pohozaev::{supercritical_probe, BallDomain, ProbeProfile};
use cknball::solver::{
    default_init, minimize_quotient_unchecked, minimize_rayleigh_linear,
};
use cknball::{Grading, Mode, Params, ProbeReport};

use crate::output::{write_csv, write_json};
use crate::settings::Settings;
use crate::svg::{line_plot, Series};
use crate::{CliError, EXIT_OK};

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstantReport {
    pub command: String,
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    /// sharp weighted Hardy constant for these weights
    pub hardy_floor: f64,
    /// bottom of the spectrum (N-1)²/4
    pub spectral_floor: f64,
    /// smallest CKN quotient over the canonical sample family
    pub sample_quotient_min: f64,
    /// optimizer-driven upper estimate of the best constant
    pub optimizer_estimate: f64,
    pub optimizer_converged: bool,
    pub optimizer_iterations: usize,
    /// smallest quotient along the concentrating family (p > 2 only)
    pub family_estimate: Option<f64>,
    pub grid_n: usize,
    pub t_max: f64,
}

/// Computes the full constant report; shared with `sweep` so that sweep cells
/// are bit-identical to single runs.
pub fn compute(settings: &Settings, a: f64, b: f64) -> Result<(ConstantReport, Trace), CliError> {
    let n = settings.u32_or("N", 3)?;
    let params = Params::ckn(n, a, b);
    let viol = params.validate(Mode::Ckn);
    if !viol.is_empty() {
        return Err(CliError::validation(&viol));
    }
    let p = params.ckn_p().unwrap();
    let t_max = settings.f64_or("tmax", 40.0)?;
    let grid_n = settings.usize_or("grid-n", 2400)?;
    // deep geometric head: quotient near-minimizers spread logarithmically
    let grid = std::sync::Arc::new(
        cknball::build_grid(grid_n, t_max, Grading::deep_head(1e-26))
            .map_err(CliError::from_core)?,
    );
    let opts = super::solve_opts(settings)?;

    let mut sample_min = f64::INFINITY;
    for u in sample_family(&grid, n).map_err(CliError::from_core)? {
        sample_min = sample_min.min(rayleigh_ckn(&u, a, b, n).map_err(CliError::from_core)?);
    }

    let hardy_floor = hardy_constant(n, params.alpha);
    let (estimate, converged, iterations, trace, v) = if (p - 2.0).abs() < 1e-12 {
        // Hardy-type pencil: shift just under the sharp constant
        let tr = minimize_rayleigh_linear(
            &grid,
            n,
            params.alpha,
            0.0,
            params.alpha - 2.0,
            Some(hardy_floor * (1.0 - 1e-4)),
            &opts,
        )
        .map_err(CliError::from_core)?;
        (tr.mu, tr.converged, tr.iterations, tr.trace, tr.v)
    } else {
        let mut solve_params = params.clone();
        solve_params.q = Some(p);
        let init = default_init(&grid, n).map_err(CliError::from_core)?;
        let tr = minimize_quotient_unchecked(&solve_params, &grid, &init, &opts)
            .map_err(CliError::from_core)?;
        (tr.mu, tr.converged, tr.iterations, tr.trace, tr.v)
    };

    // concentrating-family upper estimate (needs p > 2)
    let family_estimate = if p > 2.0 + 1e-12 {
        let probe_params = Params::pohozaev(n, params.alpha, params.beta, p);
        let dom = BallDomain::new(t_max.min(30.0)).map_err(CliError::from_core)?;
        let profile = if a == 0.0 && b == 0.0 {
            ProbeProfile::TruncatedBubble { cutoff: 200.0 }
        } else {
            ProbeProfile::SmoothBump
        };
        let rep: ProbeReport = supercritical_probe(&probe_params, &dom, 9, profile)
            .map_err(CliError::from_core)?;
        rep.entries
            .iter()
            .map(|&(_, q)| q)
            .fold(None, |acc: Option<f64>, q| {
                Some(acc.map_or(q, |m| m.min(q)))
            })
    } else {
        None
    };

    let report = ConstantReport {
        command: "constant".into(),
        n,
        a,
        b,
        p,
        alpha: params.alpha,
        beta: params.beta,
        hardy_floor,
        spectral_floor: spectral_bottom(n),
        sample_quotient_min: sample_min,
        optimizer_estimate: estimate,
        optimizer_converged: converged,
        optimizer_iterations: iterations,
        family_estimate,
        grid_n: grid.len(),
        t_max,
    };
    Ok((report, Trace { quotients: trace, minimizer: v }))
}

pub struct Trace {
    pub quotients: Vec<f64>,
    pub minimizer: cknball::RadialFn,
}

pub fn run(settings: &Settings) -> Result<u8, CliError> {
    let a = settings.require_f64("a")?;
    let b = settings.require_f64("b")?;
    let (report, trace) = compute(settings, a, b)?;

    let out = settings.out_dir();
    let fmt = settings.formats();
    if fmt.json {
        write_json(&out.join("constant.json"), &report)?;
    }
    if fmt.csv {
        let mut buf = Vec::new();
        trace
            .minimizer
            .write_csv(&mut buf)
            .map_err(CliError::from_core)?;
        crate::output::write_atomic(&out.join("minimizer.csv"), &buf)?;
        let rows: Vec<Vec<f64>> = trace
            .quotients
            .iter()
            .enumerate()
            .map(|(i, &q)| vec![i as f64, q])
            .collect();
        write_csv(&out.join("quotient_trace.csv"), "iteration,quotient", &rows)?;
    }
    if fmt.svg {
        let prof: Vec<(f64, f64)> = trace
            .minimizer
            .grid()
            .nodes()
            .iter()
            .zip(trace.minimizer.values())
            .map(|(&t, &u)| (t, u))
            .collect();
        let svg = line_plot(
            &format!("CKN minimizer profile (a={a}, b={b})"),
            "t",
            "u",
            &[Series {
                points: &prof,
                color: "#1f77b4",
                label: "u(t)",
            }],
        );
        crate::output::write_atomic(&out.join("minimizer.svg"), svg.as_bytes())?;
        let tr: Vec<(f64, f64)> = trace
            .quotients
            .iter()
            .enumerate()
            .map(|(i, &q)| (i as f64, q))
            .collect();
        let svg = line_plot("quotient vs iteration", "iteration", "quotient", &[Series {
            points: &tr,
            color: "#d62728",
            label: "quotient",
        }]);
        crate::output::write_atomic(&out.join("quotient_trace.svg"), svg.as_bytes())?;
    }
    println!(
        "constant: S({a}, {b}, B^{}) upper estimate {:.8} (hardy floor {:.6}, sample min {:.6})",
        report.n, report.optimizer_estimate, report.hardy_floor, report.sample_quotient_min
    );
    Ok(EXIT_OK)
}
