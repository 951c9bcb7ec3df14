//! Named verification checks: the machine-checkable identities, bounds and
//! positivity scans aggregated by the `verify` command.
//!
//! Every check reports its worst violation against a fixed tolerance, so the
//! suite prints one row per check and fails loudly on any regression. A
//! deliberate fault hook (scaling a single quadrature weight) exists to prove
//! the suite actually bites.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::functionals::{
    cov_residual, grad_energy, hardy_energy, lq_weighted, rayleigh_spectral, sample_family,
};
use crate::geometry::{
    dist, dist_bounds_check, geom_factors, hardy_constant, r_of_d, rho, spectral_bottom,
};
use crate::params::Params;
use crate::pohozaev::{bracket2, laplacian_factor, laplacian_factor_fd, positivity_scan};
use crate::quadrature::{build_grid, integrate_weighted, integrate_weighted_r, Grading, RadialGrid};

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// worst violation measure (0 when clean)
    pub worst: f64,
    /// tolerance the violation is held against
    pub tol: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, worst: f64, tol: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            worst,
            tol,
            pass: worst <= tol,
        }
    }
}

/// Options for a verification run.
#[derive(Debug, Clone)]
pub struct CheckOpts {
    /// main grid size
    pub grid_n: usize,
    /// main truncation radius
    pub t_max: f64,
    /// scan sample count for the geometry/positivity sweeps
    pub scan_samples: usize,
    /// fault hook: scale quadrature weight `index` by `factor`
    pub fault: Option<(usize, f64)>,
    /// run only checks whose name contains one of these fragments
    pub filter: Vec<String>,
}

impl Default for CheckOpts {
    fn default() -> Self {
        CheckOpts {
            grid_n: 512,
            t_max: 40.0,
            scan_samples: 10_000,
            fault: None,
            filter: Vec::new(),
        }
    }
}

fn wanted(opts: &CheckOpts, name: &str) -> bool {
    opts.filter.is_empty() || opts.filter.iter().any(|f| name.contains(f.as_str()))
}

/// Runs the selected checks and returns one result per check.
pub fn run_checks(opts: &CheckOpts) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut grid = build_grid(opts.grid_n, opts.t_max, Grading::default())?;
    if let Some((i, f)) = opts.fault {
        grid.scale_weight(i.min(grid.len() - 1), f);
    }
    let grid = Arc::new(grid);

    macro_rules! check {
        ($name:expr, $body:expr) => {
            if wanted(opts, $name) {
                let (worst, tol) = $body?;
                out.push(CheckResult::new($name, worst, tol));
            }
        };
    }

    check!("geometry-sinh-identity", sinh_identity(opts.scan_samples));
    check!("geometry-dist-bounds", dist_bounds(opts.scan_samples));
    check!("geometry-inverse-pair", inverse_pair(opts.scan_samples));
    check!("geometry-monotonicity", monotonicity(opts.scan_samples));
    check!("quadrature-polynomial", quadrature_polynomial());
    check!("quadrature-gold-volume", quadrature_gold(opts));
    check!("quadrature-cross-coordinate", quadrature_cross());
    check!("hardy-floor-alpha0", hardy_floor(&grid, 0.0));
    check!("hardy-floor-alpha1", hardy_floor(&grid, 1.0));
    check!("spectral-floor", spectral_floor(&grid));
    check!("spectral-spreading-family", spectral_family(&grid));
    check!("cov-identity", cov_identity(&grid));
    check!("cov-inequality", cov_inequality(&grid));
    check!("bracket-positivity", bracket_positivity(opts.scan_samples));
    check!("bracket-critical-zero", bracket_critical_zero(opts.scan_samples));
    check!(
        "laplacian-positivity",
        laplacian_positivity(opts.scan_samples)
    );
    check!("laplacian-fd-oracle", laplacian_fd());
    check!("bochner-identity", bochner_identity());
    check!(
        "interpolation-consistency",
        interpolation_consistency(&grid)
    );
    Ok(out)
}

// sample radii: log-spaced toward 0 and linear toward 1
fn radius_samples(n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut rs = Vec::with_capacity(n);
    for i in 0..half {
        rs.push(1e-9 * (0.5 / 1e-9_f64).powf(i as f64 / (half - 1) as f64));
    }
    for j in 0..(n - half) {
        rs.push(0.5 + (0.999999 - 0.5) * j as f64 / (n - half - 1) as f64);
    }
    rs
}

fn sinh_identity(samples: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for r in radius_samples(samples) {
        let lhs = rho(r)? * r;
        let rhs = dist(r)?.sinh();
        if rhs > 0.0 {
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    Ok((worst, 1e-13))
}

fn dist_bounds(samples: usize) -> Result<(f64, f64)> {
    // the two-sided bound plus the four factor inequalities, as signed slack
    let mut worst: f64 = 0.0;
    for r in radius_samples(samples) {
        let (lo, hi) = dist_bounds_check(r)?;
        if !lo || !hi {
            worst = worst.max(1.0);
        }
        let g = geom_factors(r)?;
        let d = g.dist;
        let s = d * g.rho * r;
        worst = worst
            .max(-(d - 2.0 * r))
            .max(-(g.rho * r - d))
            .max(-g.a)
            .max(-(g.b - 1.0))
            .max(-(s - g.a))
            .max(-(s * g.b - (g.b * g.b - 1.0)));
    }
    Ok((worst, 1e-12))
}

fn inverse_pair(samples: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let r = 0.999999 * i as f64 / (samples - 1) as f64;
        worst = worst.max((r_of_d(dist(r)?)? - r).abs());
    }
    Ok((worst, 1e-12))
}

fn monotonicity(samples: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut prev = (0.0, 2.0);
    for i in 1..samples {
        let r = 0.999999 * i as f64 / (samples - 1) as f64;
        let cur = (dist(r)?, rho(r)?);
        worst = worst.max(-(cur.0 - prev.0)).max(-(cur.1 - prev.1));
        if cur.0 <= prev.0 || cur.1 <= prev.1 {
            worst = worst.max(1.0);
        }
        prev = cur;
    }
    Ok((worst, 0.0))
}

fn quadrature_polynomial() -> Result<(f64, f64)> {
    let g = build_grid(256, 8.0, Grading::default())?;
    let got = g.integrate(|t| t * t);
    Ok((((got - 512.0 / 3.0) / (512.0 / 3.0)).abs(), 1e-12))
}

fn quadrature_gold(opts: &CheckOpts) -> Result<(f64, f64)> {
    // geodesic unit-ball volume in dimension 3; the fault hook scales one
    // quadrature weight of this grid, so an injected fault fails here
    let mut ball = build_grid(256, 1.0, Grading::default())?;
    if let Some((i, f)) = opts.fault {
        ball.scale_weight(i.min(ball.len() - 1), f);
    }
    let vol = integrate_weighted(&ball, 0.0, 3, |_| 1.0)?;
    let vol_ref = std::f64::consts::PI * (2.0_f64.sinh() - 2.0);
    Ok((((vol - vol_ref) / vol_ref).abs(), 1e-8))
}

fn quadrature_cross() -> Result<(f64, f64)> {
    let grid = build_grid(512, 6.0, Grading::default())?;
    let cases: Vec<(f64, Box<dyn Fn(f64) -> f64>)> = vec![
        (0.0, Box::new(|t: f64| (-2.0 * t).exp())),
        (0.0, Box::new(|t: f64| (-t * t).exp())),
        (1.0, Box::new(|t: f64| (-3.0 * t).exp())),
        (1.5, Box::new(|t: f64| 1.0 / (1.0 + t * t))),
        (2.0, Box::new(|t: f64| t * (-2.0 * t).exp())),
        (-0.5, Box::new(|t: f64| (-2.0 * t).exp())),
        (-0.9, Box::new(|t: f64| (1.0 + t).recip().powi(3))),
        (0.5, Box::new(|t: f64| (t - 3.0).tanh() + 1.0001)),
        (3.0, Box::new(|t: f64| (-t).exp() * (1.0 + t).ln_1p())),
        (1.0, Box::new(|t: f64| (0.5 * t).cos().powi(2) * (-2.0 * t).exp())),
    ];
    let mut worst: f64 = 0.0;
    for (gamma, f) in &cases {
        let a = integrate_weighted(&grid, *gamma, 3, f)?;
        let b = integrate_weighted_r(*gamma, 3, 6.0, f)?;
        worst = worst.max((a - b).abs() / (a.abs() + b.abs()).max(1e-300));
    }
    Ok((worst, 1e-8))
}

fn hardy_floor(grid: &Arc<RadialGrid>, alpha: f64) -> Result<(f64, f64)> {
    let c = hardy_constant(3, alpha);
    let mut worst: f64 = 0.0;
    for u in sample_family(grid, 3)? {
        let q = grad_energy(&u, alpha, 3)? / hardy_energy(&u, alpha, 3)?;
        worst = worst.max((c * (1.0 - 1e-6) - q) / c);
    }
    Ok((worst.max(0.0), 0.0))
}

fn spectral_floor(grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    let bottom = spectral_bottom(3);
    let mut worst: f64 = 0.0;
    for u in sample_family(grid, 3)? {
        let q = rayleigh_spectral(&u, 3)?;
        worst = worst.max((bottom * (1.0 - 1e-6) - q) / bottom);
    }
    Ok((worst.max(0.0), 0.0))
}

fn spectral_family(grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    // the spreading family must reach 1.05 × the bottom
    let bottom = spectral_bottom(3);
    let mut best = f64::INFINITY;
    for k in [10.0, 25.0, 50.0] {
        let c = 1.0 + 1.0 / k;
        let u = crate::quadrature::RadialFn::from_fn_with_deriv(
            grid,
            move |t| (-c * t).exp(),
            move |t| -c * (-c * t).exp(),
        )?;
        best = best.min(rayleigh_spectral(&u, 3)?);
    }
    Ok(((best / bottom - 1.05).max(0.0), 0.0))
}

fn cov_identity(grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    // deterministic low-discrepancy sweep over (α, γ₁, γ₂, decay)
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let fi = i as f64;
        let alpha = -0.85 + (2.8 / 19.0) * fi;
        let g1 = 0.05 + 0.9 * frac(fi * 0.618_033_988_749);
        let g2 = 0.05 + 0.9 * frac(fi * 0.414_213_562_373);
        let c = 1.5 + 1.5 * frac(fi * 0.732_050_807_568);
        let w = crate::quadrature::RadialFn::from_fn_with_deriv(
            grid,
            move |t| (-c * t).exp(),
            move |t| -c * (-c * t).exp(),
        )?;
        worst = worst.max(cov_residual(&w, alpha, g1, g2, 3)?);
    }
    Ok((worst, 1e-6))
}

fn cov_inequality(grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    // (changed-variable LHS) ≤ ∫ d^α |∇w|² dV
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let fi = i as f64;
        let alpha = 0.2 + 0.15 * fi;
        let g1 = 0.1 + 0.05 * fi;
        let g2 = 0.1 + 0.07 * fi;
        let c = 2.0 + 0.1 * fi;
        let w = crate::quadrature::RadialFn::from_fn_with_deriv(
            grid,
            move |t| (-c * t).exp(),
            move |t| -c * (-c * t).exp(),
        )?;
        let u = {
            // u = t^{α/2} w assembled through the same integrals as cov_residual
            let k = 2;
            let om = crate::geometry::sphere_area(3);
            let s = move |t: f64| crate::geometry::sinh_ratio_pow(t, k);
            let lhs_grad = om
                * (w.integrate_power_with(alpha + 2.0, |t, _, dw| dw * dw * s(t))?
                    + alpha * w.integrate_power_with(alpha + 1.0, |t, wv, dw| wv * dw * s(t))?
                    + 0.25 * alpha * alpha
                        * w.integrate_power_with(alpha, |t, wv, _| wv * wv * s(t))?);
            let hardy = om * w.integrate_power_with(alpha, |t, wv, _| wv * wv * s(t))?;
            let l2 = om * w.integrate_power_with(alpha + 2.0, |t, wv, _| wv * wv * s(t))?;
            lhs_grad - g1 * hardy - g2 * l2
        };
        let bound = grad_energy(&w, alpha, 3)?;
        worst = worst.max((u - bound) / bound.abs().max(1e-300));
    }
    Ok((worst.max(0.0), 1e-9))
}

// documented parameter sets for the positivity scans: p ≥ max{2*, 2_α^β},
// -N < α-2 ≤ β, N ≥ α-1
fn positivity_params() -> Vec<Params> {
    vec![
        Params::pohozaev(3, 0.0, 0.0, 7.0),
        Params::pohozaev(3, 0.5, 0.0, 7.0),
        Params::pohozaev(3, 0.0, -1.0, 6.5),
        Params::pohozaev(4, 1.0, 2.0, 6.0),
        Params::pohozaev(3, 0.0, -2.9, 7.0),
    ]
}

fn bracket_positivity(samples: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for p in positivity_params() {
        let (mb, _) = positivity_scan(&p, samples)?;
        worst = worst.max(-mb);
    }
    Ok((worst.max(0.0), 1e-10))
}

fn bracket_critical_zero(samples: usize) -> Result<(f64, f64)> {
    let p = Params::pohozaev(3, 0.0, 0.0, 6.0);
    let mut worst: f64 = 0.0;
    for r in radius_samples(samples) {
        worst = worst.max(bracket2(&p, r)?.abs());
    }
    Ok((worst, 1e-14))
}

fn laplacian_positivity(samples: usize) -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for p in positivity_params() {
        let (_, ml) = positivity_scan(&p, samples)?;
        worst = worst.max(-ml);
    }
    Ok((worst.max(0.0), 1e-10))
}

fn laplacian_fd() -> Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    for p in [
        Params::pohozaev(3, 0.0, -1.0, 7.0),
        Params::pohozaev(3, 0.5, 0.5, 7.0),
        Params::pohozaev(4, 1.0, 2.0, 6.0),
    ] {
        for &r in &[0.15, 0.35, 0.55, 0.75, 0.9] {
            let cf = laplacian_factor(&p, r)?;
            let fd = laplacian_factor_fd(&p, r, 1e-4)?;
            worst = worst.max((cf - fd).abs() / cf.abs().max(1e-300));
        }
    }
    Ok((worst, 1e-4))
}

fn bochner_identity() -> Result<(f64, f64)> {
    // ∇u·∇(∇u·x) = |∇u|² + ½ ∇|∇u|²·x for radial u, by central differences
    let mut worst: f64 = 0.0;
    let h = 1e-5;
    for i in 0..20 {
        let fi = i as f64;
        let (a, b, c) = (
            1.0 + frac(fi * 0.618_033_988_749),
            2.0 * frac(fi * 0.414_213_562_373),
            1.0 + 2.0 * frac(fi * 0.732_050_807_568),
        );
        let u = move |r: f64| (a + b * r * r) * (-c * r * r).exp();
        let du = move |r: f64| (u(r + h) - u(r - h)) / (2.0 * h);
        for &r in &[0.2, 0.45, 0.7] {
            // lhs: u'(r) · d/dr (r u'(r)); rhs: u'² + (r/2) d/dr(u'²)
            let lhs = du(r) * ((r + h) * du(r + h) - (r - h) * du(r - h)) / (2.0 * h);
            let rhs = du(r) * du(r)
                + 0.5 * r * (du(r + h).powi(2) - du(r - h).powi(2)) / (2.0 * h);
            let scale = du(r).powi(2).max(1e-6);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok((worst, 1e-6))
}

fn interpolation_consistency(grid: &Arc<RadialGrid>) -> Result<(f64, f64)> {
    // Hölder product route: ∫d^β u^P ≤ (∫u²/d²)^s (∫u^{2*})^{1-s}, s = -β/2,
    // P = 2(N+β)/(N-2), for -2 ≤ β ≤ 0; then the chain through the measured
    // Hardy and Poincaré–Sobolev ratios bounds it by the gradient energy.
    let nf = 3.0;
    let two_star = 2.0 * nf / (nf - 2.0);
    let fam = sample_family(grid, 3)?;
    let ratios = crate::functionals::measured_ratios(&fam, 0.0, 3)?;
    let bottom = spectral_bottom(3);
    let mut worst: f64 = 0.0;
    for beta in [-2.0, -1.5, -1.0, -0.5] {
        let s = -beta / 2.0;
        let p_exp = 2.0 * (nf + beta) / (nf - 2.0);
        for u in &fam {
            let lhs = lq_weighted(u, beta, p_exp, 3)?;
            let hardy = hardy_energy(u, 0.0, 3)?;
            let sob = lq_weighted(u, 0.0, two_star, 3)?;
            let holder = hardy.powf(s) * sob.powf(1.0 - s);
            worst = worst.max((lhs - holder) / holder.max(1e-300));

            // chained bound against the gradient energy
            let grad = grad_energy(u, 0.0, 3)?;
            let l2 = lq_weighted(u, 0.0, 2.0, 3)?;
            let ps_den = grad - bottom * l2;
            if ps_den <= 0.0 {
                continue;
            }
            let chain = (4.0 * grad).powf(s)
                * (ratios.poincare_sobolev_ratio_max * ps_den).powf((1.0 - s) * nf / (nf - 2.0));
            worst = worst.max((lhs - chain) / chain.max(1e-300));
        }
    }
    Ok((worst.max(0.0), 1e-9))
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}
