//! Weighted energies, norms and quotients of radial functions.
//!
//! Every integral is evaluated in the geodesic variable, where the volume
//! element contributes `sinh^{N-1}(t)` and each distance weight `d^γ` is the
//! plain power `t^γ`. All operations act on the piecewise-cubic interpolant
//! carried by a [`RadialFn`] through its cell rule, so the reported values
//! are the exact continuum functionals of that interpolant (up to the cell
//! rule order); in particular the sharp-constant inequalities hold for every
//! admissible input, not just for well-resolved ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::Space;
use crate::geometry::{hardy_constant, sinh_ratio_pow, sphere_area};
use crate::params::{Mode, Params};
use crate::quadrature::{RadialFn, RadialGrid};

const DENOM_FLOOR: f64 = 1e-300;
const RESIDUAL_FLOOR: f64 = 1e-12;

/// Gradient energy `∫ d^α |∇_B u|² dV = ω ∫ t^α u'(t)² sinh^{N-1} t dt`.
pub fn grad_energy(u: &RadialFn, alpha: f64, dim: u32) -> Result<f64> {
    if !(alpha > 2.0 - dim as f64) {
        return Err(Error::NotIntegrable {
            gamma: alpha,
            dim,
        });
    }
    let k = dim as i32 - 1;
    let v = u.integrate_power_with(alpha + dim as f64 - 1.0, |t, _, du| {
        du * du * sinh_ratio_pow(t, k)
    })?;
    Ok(sphere_area(dim) * v)
}

/// Hardy energy `∫ d^{α-2} u² dV = ω ∫ t^{α-2} u² sinh^{N-1} t dt`.
pub fn hardy_energy(u: &RadialFn, alpha: f64, dim: u32) -> Result<f64> {
    let k = dim as i32 - 1;
    let v = u.integrate_power_with(alpha + dim as f64 - 3.0, |t, uv, _| {
        uv * uv * sinh_ratio_pow(t, k)
    })?;
    Ok(sphere_area(dim) * v)
}

/// Weighted Lebesgue mass `∫ d^β |u|^q dV` (the q-th power of the `‖·‖_{β,q}` norm).
pub fn lq_weighted(u: &RadialFn, beta: f64, q: f64, dim: u32) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::ExponentOutOfRange {
            what: "q",
            value: q,
        });
    }
    let k = dim as i32 - 1;
    let v = u.integrate_power_with(beta + dim as f64 - 1.0, |t, uv, _| {
        uv.abs().powf(q) * sinh_ratio_pow(t, k)
    })?;
    Ok(sphere_area(dim) * v)
}

/// The solver's squared norm `‖u‖² = ∫ d^α|∇_B u|² dV - λ ∫ d^{α-2} u² dV`.
pub fn shifted_norm_sq(u: &RadialFn, alpha: f64, lambda: f64, dim: u32) -> Result<f64> {
    if !(lambda < hardy_constant(dim, alpha)) {
        return Err(Error::ExponentOutOfRange {
            what: "lambda",
            value: lambda,
        });
    }
    let g = grad_energy(u, alpha, dim)?;
    if lambda == 0.0 {
        return Ok(g);
    }
    Ok(g - lambda * hardy_energy(u, alpha, dim)?)
}

/// The action functional `I(u) = ½‖u‖² - (1/q)∫ d^β |u|^q dV`.
pub fn energy_i(u: &RadialFn, params: &Params) -> Result<f64> {
    let v = params.validate(Mode::Solve);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let q = params.q.unwrap();
    let norm = shifted_norm_sq(u, params.alpha, params.lambda, params.n)?;
    let mass = lq_weighted(u, params.beta, q, params.n)?;
    Ok(0.5 * norm - mass / q)
}

/// Discrete weak residual of the ground-state equation:
/// `max_v |I'(u) v| / ‖v‖` over the nodal Hermite test basis of the grid.
///
/// Zero (to tolerance) characterizes a discrete weak solution.
pub fn weak_residual(u: &RadialFn, params: &Params) -> Result<f64> {
    let viol = params.validate(Mode::Solve);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    let q = params.q.unwrap();
    let sp = Space::new(u.grid(), params.n);
    let a = sp.assemble_shifted(params.alpha, params.lambda)?;
    let mut x = sp.from_radial_fn(u);
    x[sp.dirichlet_dof()] = 0.0;
    let mut ax = vec![0.0; x.len()];
    a.matvec(&x, &mut ax);
    let (_, grad_c) = sp.lq_term(&x, params.beta + params.n as f64 - 1.0, q)?;
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        if i == sp.dirichlet_dof() {
            continue;
        }
        let r = ax[i] - grad_c[i] / q;
        let chi = a.get(i, i).max(DENOM_FLOOR).sqrt();
        worst = worst.max(r.abs() / chi);
    }
    Ok(worst)
}

/// CKN Rayleigh quotient
/// `(∫ d^{-2a}|∇_B u|² dV) / (∫ d^{-bp}|u|^p dV)^{2/p}`, `p = 2N/(N-2+2(b-a))`.
pub fn rayleigh_ckn(u: &RadialFn, a: f64, b: f64, dim: u32) -> Result<f64> {
    let params = Params::ckn(dim, a, b);
    let viol = params.validate(Mode::Ckn);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    let p = params.ckn_p().unwrap();
    let num = grad_energy(u, -2.0 * a, dim)?;
    let den = lq_weighted(u, -b * p, p, dim)?;
    if den < DENOM_FLOOR {
        return Err(Error::ZeroDenominator("rayleigh_ckn"));
    }
    Ok(num / den.powf(2.0 / p))
}

/// Spectral Rayleigh quotient `∫|∇_B u|² dV / ∫ u² dV`; bounded below by
/// `(N-1)²/4` for decaying functions.
pub fn rayleigh_spectral(u: &RadialFn, dim: u32) -> Result<f64> {
    let num = grad_energy(u, 0.0, dim)?;
    let den = lq_weighted(u, 0.0, 2.0, dim)?;
    if den < DENOM_FLOOR {
        return Err(Error::ZeroDenominator("rayleigh_spectral"));
    }
    Ok(num / den)
}

/// Relative residual of the change-of-variables identity for `u = d^{α/2} w`:
///
/// `∫(|∇_B u|² - γ₁ u²/d² - γ₂ u²) dV` against its `w`-side expansion
/// (weighted gradient term, shifted Hardy coefficient with the `t/sinh t`
/// correction, and the first-order `d^{α-1}|x|` term).
pub fn cov_residual(
    w: &RadialFn,
    alpha: f64,
    gamma1: f64,
    gamma2: f64,
    dim: u32,
) -> Result<f64> {
    if !(gamma1 > 0.0 && gamma2 > 0.0) {
        return Err(Error::Domain {
            what: "gamma1/gamma2",
            value: gamma1.min(gamma2),
            expected: "(0, inf)",
        });
    }
    if !(alpha > 2.0 - dim as f64) {
        return Err(Error::NotIntegrable { gamma: alpha, dim });
    }
    let nf = dim as f64;
    let k = dim as i32 - 1;
    let om = sphere_area(dim);
    let s = |t: f64| sinh_ratio_pow(t, k);

    // u'² = t^α w'² + α t^{α-1} w w' + (α²/4) t^{α-2} w²
    let lhs_grad = om
        * (w.integrate_power_with(alpha + nf - 1.0, |t, _, dw| dw * dw * s(t))?
            + alpha * w.integrate_power_with(alpha + nf - 2.0, |t, wv, dw| wv * dw * s(t))?
            + 0.25 * alpha * alpha
                * w.integrate_power_with(alpha + nf - 3.0, |t, wv, _| wv * wv * s(t))?);
    let hardy_u = om * w.integrate_power_with(alpha + nf - 3.0, |t, wv, _| wv * wv * s(t))?;
    let l2_u = om * w.integrate_power_with(alpha + nf - 1.0, |t, wv, _| wv * wv * s(t))?;
    let lhs = lhs_grad - gamma1 * hardy_u - gamma2 * l2_u;

    // w-side: d^α(|∇w|² - (α(α-2)/4 + (α(N-1)/2)(t/sinh t) + γ₁) w²/d² - γ₂ w²)
    //         - (α(N-1)/2) ∫ d^{α-1} w² |x| dV,  |x| = tanh(t/2)
    let c0 = 0.25 * alpha * (alpha - 2.0);
    let chalf = 0.5 * alpha * (nf - 1.0);
    let rhs_grad = om * w.integrate_power_with(alpha + nf - 1.0, |t, _, dw| dw * dw * s(t))?;
    let rhs_hardy = om
        * w.integrate_power_with(alpha + nf - 3.0, |t, wv, _| {
            let coeff = c0 + chalf * t / t.sinh() + gamma1;
            coeff * wv * wv * s(t)
        })?;
    let rhs_l2 = gamma2 * l2_u;
    let rhs_first_order = chalf
        * om
        * w.integrate_power_with(alpha + nf - 2.0, |t, wv, _| {
            (0.5 * t).tanh() * wv * wv * s(t)
        })?;
    let rhs = rhs_grad - rhs_hardy - rhs_l2 - rhs_first_order;

    Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + RESIDUAL_FLOOR))
}

/// All energies of a function in one bundle (serializes flat, with the
/// parameter echo inlined).
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub grad_energy: f64,
    pub hardy_energy: f64,
    pub lq_mass: f64,
    pub shifted_norm_sq: f64,
    pub i_value: f64,
    #[serde(flatten)]
    pub params: Params,
}

impl EnergyReport {
    pub fn compute(u: &RadialFn, params: &Params) -> Result<Self> {
        let viol = params.validate(Mode::Solve);
        if !viol.is_empty() {
            return Err(Error::Validation(viol));
        }
        let q = params.q.unwrap();
        let grad = grad_energy(u, params.alpha, params.n)?;
        let hardy = hardy_energy(u, params.alpha, params.n)?;
        let lq = lq_weighted(u, params.beta, q, params.n)?;
        let shifted = grad - params.lambda * hardy;
        Ok(EnergyReport {
            grad_energy: grad,
            hardy_energy: hardy,
            lq_mass: lq,
            shifted_norm_sq: shifted,
            i_value: 0.5 * shifted - lq / q,
            params: params.clone(),
        })
    }
}

/// Tail indicator `u(t_n)² sinh^{N-1}(t_n)` relative to the function's L²
/// mass; `ok` when below `floor`.
pub fn tail_indicator(u: &RadialFn, dim: u32, floor: f64) -> (f64, bool) {
    let t = *u.grid().nodes().last().unwrap();
    let uv = *u.values().last().unwrap();
    let k = dim as i32 - 1;
    let weight = t.powf(dim as f64 - 1.0) * sinh_ratio_pow(t, k);
    let mass = lq_weighted(u, 0.0, 2.0, dim).unwrap_or(f64::MAX);
    let ind = uv * uv * weight / (mass + DENOM_FLOOR);
    (ind, ind < floor)
}

/// A canonical family of smooth decaying radial samples (analytic
/// derivatives), used for floors, measured-ratio reports and identity scans.
pub fn sample_family(grid: &std::sync::Arc<RadialGrid>, dim: u32) -> Result<Vec<RadialFn>> {
    let kmin = 0.5 * (dim as f64 - 1.0) + 0.75;
    let mut fam = Vec::new();
    for k in [kmin, kmin + 1.0, kmin + 2.5] {
        fam.push(RadialFn::from_fn_with_deriv(
            grid,
            move |t| (-k * t).exp(),
            move |t| -k * (-k * t).exp(),
        )?);
    }
    fam.push(RadialFn::from_fn_with_deriv(
        grid,
        |t| t * (-2.0 * t).exp(),
        |t| (1.0 - 2.0 * t) * (-2.0 * t).exp(),
    )?);
    fam.push(RadialFn::from_fn_with_deriv(
        grid,
        |t| t * t * (-2.0 * t).exp(),
        |t| (2.0 * t - 2.0 * t * t) * (-2.0 * t).exp(),
    )?);
    fam.push(RadialFn::from_fn_with_deriv(
        grid,
        |t| (-t * t).exp(),
        |t| -2.0 * t * (-t * t).exp(),
    )?);
    fam.push(RadialFn::from_fn_with_deriv(
        grid,
        |t| (-2.0 * t).exp() / (1.0 + t * t),
        |t| (-2.0 * t).exp() * (-2.0 / (1.0 + t * t) - 2.0 * t / (1.0 + t * t).powi(2)),
    )?);
    // compactly supported bump on [0, 3)
    fam.push(RadialFn::from_fn_with_deriv(
        grid,
        |t| bump(t / 3.0),
        |t| bump_deriv(t / 3.0) / 3.0,
    )?);
    Ok(fam)
}

/// `exp(-1/(1-s²))` on `[0,1)`, 0 beyond.
pub fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Derivative of [`bump`] in `s`.
pub fn bump_deriv(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let d = 1.0 - s * s;
        bump(s) * (-2.0 * s / (d * d))
    }
}

/// Measured worst-case ratios behind the discrete Poincaré–Sobolev and Hardy
/// inequalities over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct MeasuredRatios {
    /// max over samples of `hardy_energy / grad_energy` (≤ 1/hardy_constant)
    pub hardy_ratio_max: f64,
    /// max over samples of the Poincaré–Sobolev quotient
    /// `(∫ u^{2N/(N-2)} dV)^{(N-2)/N} / (grad - (N-1)²/4 · L²)`
    pub poincare_sobolev_ratio_max: f64,
}

/// Computes the measured inequality ratios for a sample set.
pub fn measured_ratios(samples: &[RadialFn], alpha: f64, dim: u32) -> Result<MeasuredRatios> {
    let mut hardy_max: f64 = 0.0;
    let mut ps_max: f64 = 0.0;
    let nf = dim as f64;
    let two_star = 2.0 * nf / (nf - 2.0);
    let bottom = crate::geometry::spectral_bottom(dim);
    for u in samples {
        let g = grad_energy(u, alpha, dim)?;
        let h = hardy_energy(u, alpha, dim)?;
        hardy_max = hardy_max.max(h / g.max(DENOM_FLOOR));
        if alpha == 0.0 {
            let sob = lq_weighted(u, 0.0, two_star, dim)?.powf((nf - 2.0) / nf);
            let den = g - bottom * lq_weighted(u, 0.0, 2.0, dim)?;
            if den > DENOM_FLOOR {
                ps_max = ps_max.max(sob / den);
            }
        }
    }
    Ok(MeasuredRatios {
        hardy_ratio_max: hardy_max,
        poincare_sobolev_ratio_max: ps_max,
    })
}
