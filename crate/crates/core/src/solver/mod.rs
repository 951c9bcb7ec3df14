//! Ground states of the weighted Hardy–Hénon equation by constrained
//! quotient minimization, with an independent ODE-shooting cross-check.
//!
//! The primal method minimizes the shifted norm `‖v‖²` over the discrete
//! Hermite space subject to `∫ d^β|v|^q dV = 1`: a projected gradient
//! iteration in the `A`-metric (each step solves with the shifted form, which
//! is the natural quasi-Newton preconditioner), globalized by a backtracking
//! line search on the scale-invariant quotient and re-normalized after every
//! step. A stationary normalized `v` with multiplier `μ = ‖v‖²` rescales to
//! the solution `u = μ^{1/(q-2)} v`.

mod shooting;

pub use shooting::{shoot_ball, shoot_trajectory, ShootOutcome, Trajectory};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{Space, Term};
use crate::functionals::{self, tail_indicator};
use crate::params::{Mode, Params};
use crate::quadrature::{RadialFn, RadialGrid};

/// Solver options; the defaults are the documented tolerances.
#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    /// stationarity tolerance of the quotient minimization
    pub tol: f64,
    /// iteration budget
    pub max_iter: usize,
    /// shooting boundary tolerance (in t)
    pub shoot_tol: f64,
    /// weak-residual threshold a converged result must meet
    pub residual_tol: f64,
    /// enforce tail smallness at the truncation radius
    pub check_tail: bool,
    /// tail indicator floor
    pub tail_floor: f64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            tol: 1e-8,
            max_iter: 400,
            shoot_tol: 1e-8,
            residual_tol: 1e-6,
            check_tail: true,
            tail_floor: 1e-8,
        }
    }
}

/// Which method produced a [`SolveResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Nehari,
    Shooting,
}

/// A computed ground state with its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    /// the solution profile
    #[serde(skip)]
    pub u: RadialFn,
    /// minimized quotient μ
    pub quotient: f64,
    /// weak residual of the scaled solution
    pub residual: f64,
    pub method: SolveMethod,
    pub iterations: usize,
    pub converged: bool,
    pub positivity_ok: bool,
    /// relative Nehari defect |‖u‖² - ∫d^β|u|^q| / ‖u‖²
    pub nehari_gap: f64,
}

/// Outcome of a quotient minimization, with the per-iteration trace.
pub struct QuotientTrace {
    pub mu: f64,
    pub v: RadialFn,
    /// quotient value at each iteration
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stationarity: f64,
}

/// Minimizes `‖v‖²` over `{∫ d^β|v|^q dV = 1}`; returns `(μ, v)`.
///
/// Errors on non-convergence; use [`minimize_quotient_trace`] to inspect
/// capped runs.
pub fn minimize_quotient(
    params: &Params,
    grid: &Arc<RadialGrid>,
    init: &RadialFn,
    opts: &SolveOpts,
) -> Result<(f64, RadialFn)> {
    let tr = minimize_quotient_trace(params, grid, init, opts)?;
    if !tr.converged {
        return Err(Error::NonConvergence {
            iterations: tr.iterations,
            stationarity: tr.stationarity,
        });
    }
    Ok((tr.mu, tr.v))
}

/// [`minimize_quotient`] that always returns the best iterate and its trace.
pub fn minimize_quotient_trace(
    params: &Params,
    grid: &Arc<RadialGrid>,
    init: &RadialFn,
    opts: &SolveOpts,
) -> Result<QuotientTrace> {
    let viol = params.validate(Mode::Solve);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    minimize_quotient_unchecked(params, grid, init, opts)
}

/// Quotient minimization without the subcriticality check: at scale-critical
/// exponents no minimizer need exist, and a capped run still produces a valid
/// upper estimate of the infimum (the constant-estimation path).
pub fn minimize_quotient_unchecked(
    params: &Params,
    grid: &Arc<RadialGrid>,
    init: &RadialFn,
    opts: &SolveOpts,
) -> Result<QuotientTrace> {
    let q = params.q.ok_or(Error::ExponentOutOfRange {
        what: "q",
        value: f64::NAN,
    })?;
    if !(q > 2.0) {
        return Err(Error::ExponentOutOfRange { what: "q", value: q });
    }
    let sp = Space::new(grid, params.n);
    let a = sp.assemble_shifted(params.alpha, params.lambda)?;
    let ldl = a.ldlt()?;
    let mu_beta = params.beta + params.n as f64 - 1.0;

    let mut x = sp.from_radial_fn(init);
    x[sp.dirichlet_dof()] = 0.0;
    normalize_constraint(&sp, &mut x, mu_beta, q)?;

    let mut trace = Vec::new();
    let mut converged = false;
    let mut station = f64::INFINITY;
    let mut it = 0;
    let n = x.len();
    let mut ax = vec![0.0; n];
    while it < opts.max_iter {
        it += 1;
        a.matvec(&x, &mut ax);
        let quot: f64 = dot(&x, &ax);
        trace.push(quot);
        let (_, grad_c) = sp.lq_term(&x, mu_beta, q)?;
        // KKT residual: A x - μ m(x), with m = ∇C/q
        let mut r = vec![0.0; n];
        let mut nr = 0.0;
        let mut nax = 0.0;
        let mut nm = 0.0;
        for i in 0..n {
            let m_i = grad_c[i] / q;
            r[i] = ax[i] - quot * m_i;
            nr += r[i] * r[i];
            nax += ax[i] * ax[i];
            nm += (quot * m_i) * (quot * m_i);
        }
        station = nr.sqrt() / (nax.sqrt() + nm.sqrt() + 1e-300);
        if station < opts.tol {
            converged = true;
            break;
        }
        // preconditioned descent direction: d = A^{-1}(μ m) - x
        let mut z: Vec<f64> = grad_c.iter().map(|g| quot * g / q).collect();
        z[sp.dirichlet_dof()] = 0.0;
        ldl.solve(&mut z);
        let d: Vec<f64> = z.iter().zip(&x).map(|(z, x)| z - x).collect();
        // backtracking on the scale-invariant quotient; near the minimum the
        // decrease sits at rounding level, so equal-within-rounding steps are
        // accepted to let the stationarity keep contracting
        let mut tau = 1.0;
        let mut accepted = false;
        for _ in 0..24 {
            let w: Vec<f64> = x.iter().zip(&d).map(|(x, d)| x + tau * d).collect();
            let (cw, _) = sp.lq_term(&w, mu_beta, q)?;
            if cw > 1e-280 {
                a.matvec(&w, &mut ax);
                let rq = dot(&w, &ax) / cw.powf(2.0 / q);
                if rq <= quot * (1.0 + 1e-14) {
                    x = w;
                    let s = cw.powf(-1.0 / q);
                    x.iter_mut().for_each(|v| *v *= s);
                    accepted = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if !accepted {
            // line search exhausted: the iterate is numerically stationary
            break;
        }
    }
    a.matvec(&x, &mut ax);
    let mu = dot(&x, &ax);
    let v = sp.to_radial_fn(&x)?;
    Ok(QuotientTrace {
        mu,
        v,
        trace,
        iterations: it,
        converged,
        stationarity: station,
    })
}

/// Rescales a normalized stationary point with multiplier `μ` to the solution
/// `u = μ^{1/(q-2)} v` of the unconstrained equation.
pub fn scale_to_solution(v: &RadialFn, mu: f64, q: f64) -> Result<RadialFn> {
    if !(q > 2.0) {
        return Err(Error::ExponentOutOfRange { what: "q", value: q });
    }
    if !(mu > 0.0) {
        return Err(Error::ExponentOutOfRange { what: "mu", value: mu });
    }
    Ok(v.scaled(mu.powf(1.0 / (q - 2.0))))
}

/// Computes the positive radial ground state: minimize, enforce positivity by
/// restarting from `|v|` if needed, rescale, and populate the diagnostics.
pub fn solve_ground_state(
    params: &Params,
    grid: &Arc<RadialGrid>,
    opts: &SolveOpts,
) -> Result<SolveResult> {
    let viol = params.validate(Mode::Solve);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    let q = params.q.unwrap();
    let init = default_init(grid, params.n)?;
    let mut tr = minimize_quotient_trace(params, grid, &init, opts)?;
    let mut iterations = tr.iterations;
    if tr.v.min_value() < 0.0 {
        // the quotient of |v| never exceeds the quotient of v
        let flipped = flip_negative(&tr.v)?;
        tr = minimize_quotient_trace(params, grid, &flipped, opts)?;
        iterations += tr.iterations;
    }
    let u = scale_to_solution(&tr.v, tr.mu, q)?;
    let residual = functionals::weak_residual(&u, params)?;
    let norm = functionals::shifted_norm_sq(&u, params.alpha, params.lambda, params.n)?;
    let mass = functionals::lq_weighted(&u, params.beta, q, params.n)?;
    let nehari_gap = (norm - mass).abs() / norm.max(1e-300);
    if opts.check_tail {
        let (ind, ok) = tail_indicator(&u, params.n, opts.tail_floor);
        if !ok {
            return Err(Error::TailTooFat { indicator: ind });
        }
    }
    Ok(SolveResult {
        positivity_ok: u.min_value() > 0.0,
        converged: tr.converged && residual < opts.residual_tol,
        u,
        quotient: tr.mu,
        residual,
        method: SolveMethod::Nehari,
        iterations,
        nehari_gap,
    })
}

/// Minimizes the linear Rayleigh quotient
/// `(∫ d^α|∇u|² dV - λ∫ d^{α-2}u² dV) / ∫ d^β u² dV`
/// (the `q = 2` pencil) by shift-and-invert iteration.
///
/// `shift` must be a strict lower bound for the quotient (the analytic sharp
/// constant serves); the shifted operator is then definite and the iteration
/// converges to the discrete minimum even when the spectrum clusters above
/// the floor. Without a shift, plain inverse iteration runs.
pub fn minimize_rayleigh_linear(
    grid: &Arc<RadialGrid>,
    dim: u32,
    alpha: f64,
    lambda: f64,
    beta: f64,
    shift: Option<f64>,
    opts: &SolveOpts,
) -> Result<QuotientTrace> {
    let sp = Space::new(grid, dim);
    let a = sp.assemble_shifted(alpha, lambda)?;
    let mut m = sp.assemble(beta + dim as f64 - 1.0, Term::Mass)?;
    // the pencil must not see the pinned dof on the mass side at all
    m.pin(sp.dirichlet_dof());
    m.add(sp.dirichlet_dof(), sp.dirichlet_dof(), -1.0);

    let ldl = match shift {
        Some(sigma) => {
            let mut b = a.clone();
            b.add_scaled(&m, -sigma);
            b.ldlt()?
        }
        None => a.ldlt()?,
    };
    let n = sp.n_dof();
    let init = default_init(grid, dim)?;
    let mut x = sp.from_radial_fn(&init);
    x[sp.dirichlet_dof()] = 0.0;

    let mut ax = vec![0.0; n];
    let mut mx = vec![0.0; n];
    let mut trace = Vec::new();
    let mut theta = 0.0;
    let mut station = f64::INFINITY;
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        a.matvec(&x, &mut ax);
        m.matvec(&x, &mut mx);
        let num = dot(&x, &ax);
        let den = dot(&x, &mx);
        if den <= 0.0 {
            return Err(Error::DegenerateInit);
        }
        theta = num / den;
        trace.push(theta);
        let mut nr = 0.0;
        for i in 0..n {
            let r = ax[i] - theta * mx[i];
            nr += r * r;
        }
        station = nr.sqrt() / (norm2(&ax) + theta.abs() * norm2(&mx) + 1e-300);
        if station < opts.tol {
            converged = true;
            break;
        }
        let mut z = mx.clone();
        ldl.solve(&mut z);
        z[sp.dirichlet_dof()] = 0.0;
        // normalize in the mass norm
        m.matvec(&z, &mut mx);
        let zm = dot(&z, &mx);
        if !(zm > 0.0) || !zm.is_finite() {
            return Err(Error::LinearSolve("mass-degenerate iterate"));
        }
        let s = zm.sqrt().recip();
        z.iter_mut().for_each(|v| *v *= s);
        x = z;
    }
    let v = sp.to_radial_fn(&x)?;
    Ok(QuotientTrace {
        mu: theta,
        v,
        trace,
        iterations: it,
        converged,
        stationarity: station,
    })
}

/// Samples the fibering profile `s ↦ I(s·u)`.
///
/// The profile is exactly `s²/2·‖u‖² - s^q/q·∫d^β|u|^q`, so its maximizer and
/// sign-change are available in closed form from the two coefficients.
pub fn mountain_pass_profile(
    u: &RadialFn,
    params: &Params,
    s_samples: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let q = params.q.ok_or(Error::ExponentOutOfRange {
        what: "q",
        value: f64::NAN,
    })?;
    let norm = functionals::shifted_norm_sq(u, params.alpha, params.lambda, params.n)?;
    let mass = functionals::lq_weighted(u, params.beta, q, params.n)?;
    Ok(s_samples
        .iter()
        .map(|&s| (s, 0.5 * s * s * norm - s.abs().powf(q) / q * mass))
        .collect())
}

/// Default initial iterate `t e^{-(N-1)t/2}`: vanishes at the origin and has
/// the borderline admissible decay.
pub fn default_init(grid: &Arc<RadialGrid>, dim: u32) -> Result<RadialFn> {
    let kappa = 0.5 * (dim as f64 - 1.0);
    RadialFn::from_fn_with_deriv(
        grid,
        move |t| t * (-kappa * t).exp(),
        move |t| (1.0 - kappa * t) * (-kappa * t).exp(),
    )
}

fn normalize_constraint(sp: &Space, x: &mut [f64], mu_beta: f64, q: f64) -> Result<()> {
    let (c, _) = sp.lq_term(x, mu_beta, q)?;
    if !(c > 1e-280) || !c.is_finite() {
        return Err(Error::DegenerateInit);
    }
    let s = c.powf(-1.0 / q);
    x.iter_mut().for_each(|v| *v *= s);
    Ok(())
}

fn flip_negative(v: &RadialFn) -> Result<RadialFn> {
    let values: Vec<f64> = v.values().iter().map(|x| x.abs()).collect();
    let derivs: Vec<f64> = v
        .values()
        .iter()
        .zip(v.derivs())
        .map(|(x, d)| if *x < 0.0 { -d } else { *d })
        .collect();
    let ((v0, d0), (v1, d1)) = v.boundary();
    let b0 = if v0 < 0.0 { (-v0, -d0) } else { (v0, d0) };
    let b1 = if v1 < 0.0 { (-v1, -d1) } else { (v1, d1) };
    RadialFn::from_parts(v.grid(), values, derivs, b0, b1)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_grid, Grading};
    use approx::assert_relative_eq;

    fn classical() -> Params {
        Params::solve(3, 0.0, 0.0, 0.0, 4.0)
    }

    fn grid(n: usize, t_max: f64) -> Arc<RadialGrid> {
        Arc::new(build_grid(n, t_max, Grading::default()).unwrap())
    }

    #[test]
    fn classical_ground_state_flags() {
        let g = grid(500, 40.0);
        let res = solve_ground_state(&classical(), &g, &SolveOpts::default()).unwrap();
        assert!(res.converged, "stationarity not reached");
        assert!(res.positivity_ok);
        assert!(res.residual < 1e-6, "residual {}", res.residual);
        assert!(res.nehari_gap < 1e-8, "gap {}", res.nehari_gap);
        assert!(res.quotient > 0.0);
    }

    #[test]
    fn cross_init_agreement() {
        let g = grid(400, 40.0);
        let p = classical();
        let opts = SolveOpts::default();
        let inits = [
            default_init(&g, 3).unwrap(),
            RadialFn::from_fn_with_deriv(&g, |t| t * t * (-t).exp(), |t| {
                (2.0 * t - t * t) * (-t).exp()
            })
            .unwrap(),
            RadialFn::from_fn_with_deriv(&g, |t| (-0.5 * (t - 1.0) * (t - 1.0)).exp(), |t| {
                -(t - 1.0) * (-0.5 * (t - 1.0) * (t - 1.0)).exp()
            })
            .unwrap(),
        ];
        let mut mus = Vec::new();
        for init in &inits {
            let (mu, _) = minimize_quotient(&p, &g, init, &opts).unwrap();
            mus.push(mu);
        }
        for w in mus.windows(2) {
            assert_relative_eq!(w[0], w[1], max_relative = 1e-6);
        }
        // sign-flipped init reaches the same quotient (evenness)
        let (mu_neg, _) =
            minimize_quotient(&p, &g, &inits[0].scaled(-1.0), &opts).unwrap();
        assert_relative_eq!(mus[0], mu_neg, max_relative = 1e-6);
    }

    #[test]
    fn quotient_decreases_in_lambda() {
        let g = grid(300, 40.0);
        let opts = SolveOpts::default();
        let init = default_init(&g, 3).unwrap();
        let mut prev = f64::INFINITY;
        for lambda in [0.0, 0.1, 0.2] {
            let p = Params::solve(3, 0.0, 0.0, lambda, 4.0);
            let (mu, _) = minimize_quotient(&p, &g, &init, &opts).unwrap();
            assert!(mu < prev, "mu {mu} at lambda {lambda} vs {prev}");
            prev = mu;
        }
    }

    #[test]
    fn scale_to_solution_algebra() {
        let g = grid(128, 10.0);
        let v = default_init(&g, 3).unwrap();
        let u = scale_to_solution(&v, 1.0, 4.0).unwrap();
        assert_eq!(u.values(), v.values());
        let u9 = scale_to_solution(&v, 9.0, 4.0).unwrap();
        assert_relative_eq!(u9.values()[10], 3.0 * v.values()[10], max_relative = 1e-15);
        assert!(scale_to_solution(&v, 1.0, 2.0).is_err());
    }

    #[test]
    fn nehari_identity_after_scaling() {
        let g = grid(400, 40.0);
        let p = classical();
        let opts = SolveOpts::default();
        let (mu, v) = minimize_quotient(&p, &g, &default_init(&g, 3).unwrap(), &opts).unwrap();
        let u = scale_to_solution(&v, mu, 4.0).unwrap();
        let norm = functionals::shifted_norm_sq(&u, 0.0, 0.0, 3).unwrap();
        let mass = functionals::lq_weighted(&u, 0.0, 4.0, 3).unwrap();
        assert!((norm - mass).abs() / norm < 1e-8, "nehari gap");
        // ground-state energy identity I(u) = (1/2 - 1/q)‖u‖²
        let i_u = functionals::energy_i(&u, &p).unwrap();
        assert_relative_eq!(i_u, (0.5 - 0.25) * norm, max_relative = 1e-10);
    }

    #[test]
    fn mountain_pass_profile_shape() {
        let g = grid(300, 40.0);
        let p = classical();
        let u = default_init(&g, 3).unwrap();
        let norm = functionals::shifted_norm_sq(&u, 0.0, 0.0, 3).unwrap();
        let mass = functionals::lq_weighted(&u, 0.0, 4.0, 3).unwrap();
        // closed-form maximizer and zero crossing of the fibering map
        let s_star = (norm / mass).powf(1.0 / 2.0);
        let s_zero = (2.0 * norm / mass).powf(1.0 / 2.0);
        let step = s_zero / 100.0;
        let samples: Vec<f64> = (0..150).map(|i| i as f64 * step).collect();
        let profile = mountain_pass_profile(&u, &p, &samples).unwrap();
        assert_eq!(profile[0].1, 0.0);
        let max_sample = profile
            .iter()
            .cloned()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((max_sample.0 - s_star).abs() <= step + 1e-12);
        // positive on a small sphere, negative beyond the zero crossing
        assert!(profile[1].1 > 0.0);
        for (s, val) in &profile {
            if *s > s_zero * 1.05 {
                assert!(*val < 0.0);
            }
        }
    }

    #[test]
    fn linear_rayleigh_reaches_spectral_bottom() {
        let g = grid(400, 40.0);
        let tr = minimize_rayleigh_linear(
            &g,
            3,
            0.0,
            0.0,
            0.0,
            Some(0.999),
            &SolveOpts::default(),
        )
        .unwrap();
        // bottom of the spectrum is 1 for N = 3; the discrete minimum sits above
        assert!(tr.mu >= 1.0 - 1e-9, "theta {}", tr.mu);
        assert!(tr.mu < 1.10, "theta too far above the bottom: {}", tr.mu);
    }

    #[test]
    fn validation_and_degenerate_errors() {
        let g = grid(128, 10.0);
        let bad = Params::solve(3, 0.0, 0.0, 0.0, 7.0); // q beyond crit
        assert!(matches!(
            solve_ground_state(&bad, &g, &SolveOpts::default()),
            Err(Error::Validation(_))
        ));
        let zero = RadialFn::from_fn_with_deriv(&g, |_| 0.0, |_| 0.0).unwrap();
        assert!(matches!(
            minimize_quotient(&classical(), &g, &zero, &SolveOpts::default()),
            Err(Error::DegenerateInit)
        ));
    }
}
