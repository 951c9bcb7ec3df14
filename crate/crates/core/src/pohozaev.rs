//! Pohozaev identity terms on geodesic balls, positivity of the two
//! divergence factors, and the supercritical concentration probe.
//!
//! For a Dirichlet solution of `-Δ_B^α u = d^β|u|^{p-2}u` on a ball the
//! identity reads
//!
//! `-(1/2)∮ d^α ρ^{N-2}|∇u|² x·ν dσ = ∫ d^α ρ^{N-2}|∇u|²·K dx
//!     + (1/2p) ∫ u² Δ̃ dx`
//!
//! with `K` the second-order bracket handled by [`bracket2`] and `Δ̃` the
//! weighted Laplacian of the divergence factor, handled by
//! [`laplacian_factor`]. Every term is evaluated in both the Euclidean and
//! the geodesic radial coordinate and the two evaluations must agree; the
//! factors are nonnegative exactly when the exponent is Sobolev- and
//! weight-supercritical, which forces nontrivial solutions out of existence.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{bump, bump_deriv, grad_energy, lq_weighted};
use crate::geometry::{geom_factors, geom_factors_t, sinh_ratio, sinh_ratio_pow, sphere_area};
use crate::params::{Mode, Params};
use crate::quadrature::{build_grid, integrate_weighted_r, Grading, RadialFn};

/// Geodesic ball centered at the origin (the canonical star-shaped domain).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BallDomain {
    /// geodesic radius
    pub t: f64,
}

impl BallDomain {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                expected: "(0, inf)",
            });
        }
        Ok(BallDomain { t })
    }

    /// Euclidean radius `tanh(t/2) ∈ (0,1)`.
    pub fn euclidean_radius(&self) -> f64 {
        (0.5 * self.t).tanh()
    }
}

/// All terms of the ball identity plus positivity-scan summaries.
#[derive(Debug, Clone, Serialize)]
pub struct PohozaevReport {
    /// `-(1/2)∮ d^α ρ^{N-2}|∇u|² x·ν dσ` (≤ 0 on star-shaped domains)
    pub boundary_term: f64,
    /// first volume integral (gradient term against the bracket)
    pub bracket_integral: f64,
    /// `(1/2p) ∫ u² Δ̃ dx`
    pub laplacian_integral: f64,
    /// `|LHS - RHS| / (|LHS| + |RHS| + floor)`
    pub residual: f64,
    /// pointwise scan minimum of [`bracket2`]
    pub min_bracket: f64,
    /// pointwise scan minimum of [`laplacian_factor`]
    pub min_laplacian_factor: f64,
    /// worst relative disagreement between the r- and t-coordinate
    /// evaluations of the three terms
    pub cross_agreement: f64,
}

fn require_p(params: &Params) -> Result<f64> {
    params.p.ok_or(Error::ExponentOutOfRange {
        what: "p",
        value: f64::NAN,
    })
}

/// Second-order bracket of the identity at Euclidean radius `r`:
/// `((N-2)/2 - N/p)(1 + ρr²) + (α/2 - β/p)·ρr/d`.
///
/// Vanishes identically at `N = 3, α = β = 0, p = 6` and is nonnegative for
/// `p ≥ max{2N/(N-2), 2_α^β}`.
pub fn bracket2(params: &Params, r: f64) -> Result<f64> {
    let p = require_p(params)?;
    let g = geom_factors(r)?;
    let nf = params.n as f64;
    Ok(((nf - 2.0) / 2.0 - nf / p) * (1.0 + g.rho * r * r)
        + (params.alpha / 2.0 - params.beta / p) * g.b)
}

/// [`bracket2`] in the geodesic coordinate: the conformal combination
/// `1 + ρr²` is exactly `cosh t`.
pub fn bracket2_t(params: &Params, t: f64) -> Result<f64> {
    let p = require_p(params)?;
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "(0, inf)",
        });
    }
    let nf = params.n as f64;
    Ok(((nf - 2.0) / 2.0 - nf / p) * t.cosh()
        + (params.alpha / 2.0 - params.beta / p) * sinh_ratio(t))
}

// The normalized Laplacian factor
// Φ = (NA + (N-1+α)B)(N t + (β/sinh t)A) + N t B + (β/sinh t)(B² - 1),
// so that Δ̃ = d^{α-1} ρ^N Φ.
fn phi_factor_t(params: &Params, t: f64) -> Result<f64> {
    let g = geom_factors_t(t)?;
    let nf = params.n as f64;
    let beta_over = params.beta / t.sinh();
    let lead = nf * g.a + (nf - 1.0 + params.alpha) * g.b;
    Ok(lead * (nf * t + beta_over * g.a) + nf * t * g.b + beta_over * (g.b * g.b - 1.0))
}

/// Weighted Laplacian `Δ̃ = ∇·(d^α ρ^{N-2} ∇(·))` applied to the divergence
/// factor `N + Nρr² + β ρr/d`, in closed form, at Euclidean radius `r`.
///
/// Nonnegative for `N ≥ α-1` and `β > -N`.
pub fn laplacian_factor(params: &Params, r: f64) -> Result<f64> {
    let g = geom_factors(r)?;
    let phi = phi_factor_t(params, g.dist)?;
    Ok(g.dist.powf(params.alpha - 1.0) * g.rho.powi(params.n as i32) * phi)
}

/// [`laplacian_factor`] in the geodesic coordinate.
pub fn laplacian_factor_t(params: &Params, t: f64) -> Result<f64> {
    let phi = phi_factor_t(params, t)?;
    let r = (0.5 * t).tanh();
    let rho = 2.0 / crate::geometry::one_minus_r_sq(r);
    Ok(t.powf(params.alpha - 1.0) * rho.powi(params.n as i32) * phi)
}

/// Second-order central finite-difference oracle for [`laplacian_factor`]:
/// applies the radial divergence form
/// `(1/r^{N-1}) d/dr [ r^{N-1} d^α ρ^{N-2} G'(r) ]`
/// to the divergence factor `G` directly.
pub fn laplacian_factor_fd(params: &Params, r: f64, h: f64) -> Result<f64> {
    let nf = params.n as f64;
    let g_of = |x: f64| -> Result<f64> {
        let g = geom_factors(x)?;
        Ok(nf * (1.0 + g.rho * x * x) + params.beta * g.b)
    };
    let gprime = |x: f64| -> Result<f64> { Ok((g_of(x + h)? - g_of(x - h)?) / (2.0 * h)) };
    let flux = |x: f64| -> Result<f64> {
        let g = geom_factors(x)?;
        Ok(x.powf(nf - 1.0)
            * g.dist.powf(params.alpha)
            * g.rho.powf(nf - 2.0)
            * gprime(x)?)
    };
    Ok((flux(r + h)? - flux(r - h)?) / (2.0 * h) / r.powf(nf - 1.0))
}

/// Scan minima of the two positivity factors over `samples` radii
/// (log-spaced toward 0 and linearly up to `1 - 1e-6`).
pub fn positivity_scan(params: &Params, samples: usize) -> Result<(f64, f64)> {
    let mut min_bracket = f64::INFINITY;
    let mut min_lap = f64::INFINITY;
    let half = samples / 2;
    for i in 0..samples {
        let r = if i < half {
            // log-spaced in (1e-8, 0.5)
            1e-8 * (0.5 / 1e-8_f64).powf(i as f64 / (half - 1) as f64)
        } else {
            let j = i - half;
            0.5 + (1.0 - 1e-6 - 0.5) * j as f64 / (samples - half - 1) as f64
        };
        min_bracket = min_bracket.min(bracket2(params, r)?);
        min_lap = min_lap.min(laplacian_factor(params, r)?);
    }
    Ok((min_bracket, min_lap))
}

const RESIDUAL_FLOOR: f64 = 1e-12;

/// Evaluates every term of the ball identity for a Dirichlet datum `u`.
///
/// Each term is computed in both radial coordinates and the evaluations must
/// agree within `1e-6` (relative to the term scale); the returned residual
/// measures the identity defect.
pub fn pohozaev_report(
    u: &RadialFn,
    dom: &BallDomain,
    params: &Params,
) -> Result<PohozaevReport> {
    let viol = params.validate(Mode::Pohozaev);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    let p = require_p(params)?;
    let dim = params.n;
    let nf = dim as f64;
    let k = dim as i32 - 1;
    let om = sphere_area(dim);
    let t_b = dom.t;
    if (u.grid().t_max() - t_b).abs() > 1e-12 * t_b {
        return Err(Error::Domain {
            what: "grid t_max",
            value: u.grid().t_max(),
            expected: "equal to the ball radius",
        });
    }
    // Dirichlet check against the sup of the datum
    let scale = u
        .values()
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let (_, (v1, d1)) = u.boundary();
    if v1.abs() > 1e-5 * scale.max(1e-300) {
        return Err(Error::NonDirichlet {
            boundary_value: v1,
        });
    }

    // boundary term: single closed number for radial u, two prefactor routes
    let r_e = dom.euclidean_radius();
    let rho_b = 2.0 / crate::geometry::one_minus_r_sq(r_e);
    let pref_t = t_b.sinh().powi(k) * rho_b * r_e;
    let pref_r = rho_b.powi(dim as i32) * r_e.powi(dim as i32);
    let boundary_t = -0.5 * om * t_b.powf(params.alpha) * pref_t * d1 * d1;
    let boundary_r = -0.5 * om * t_b.powf(params.alpha) * pref_r * d1 * d1;

    // first volume integral, geodesic cells
    let bracket_t = om
        * u.integrate_power_with(params.alpha + nf - 1.0, |t, _, du| {
            du * du * bracket2_t(params, t).unwrap_or(f64::NAN) * sinh_ratio_pow(t, k)
        })?;
    // same integral via the independent Euclidean-radius rule
    let bracket_r = integrate_weighted_r(params.alpha, dim, t_b, |t| {
        let (_, du) = u.eval_pair(t);
        du * du * bracket2_t(params, t).unwrap_or(f64::NAN)
    })?;

    // Laplacian term: Δ̃/ρ^N = t^{α-1}Φ, so the geodesic integrand is
    // t^{α+N-2}·u²·Φ(t)/t·(sinh t/t)^{N-1}... assembled directly:
    let lap_t = om / (2.0 * p)
        * u.integrate_power_with(params.alpha + nf - 2.0, |t, uv, _| {
            uv * uv * phi_factor_t(params, t).unwrap_or(f64::NAN) * sinh_ratio_pow(t, k)
        })?;
    let lap_r = integrate_weighted_r(params.alpha - 1.0, dim, t_b, |t| {
        let (uv, _) = u.eval_pair(t);
        uv * uv * phi_factor_t(params, t).unwrap_or(f64::NAN)
    })? / (2.0 * p);

    // cross-coordinate agreement, relative to the overall term scale
    let total_scale = boundary_t.abs() + bracket_t.abs() + lap_t.abs() + RESIDUAL_FLOOR;
    let rel = |a: f64, b: f64| (a - b).abs() / total_scale;
    let cross = rel(boundary_t, boundary_r)
        .max(rel(bracket_t, bracket_r))
        .max(rel(lap_t, lap_r));
    if cross > 1e-6 {
        return Err(Error::CoordinateMismatch {
            term: "pohozaev terms",
            rel: cross,
        });
    }

    let lhs = boundary_t;
    let rhs = bracket_t + lap_t;
    let residual = (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + RESIDUAL_FLOOR);
    let (min_bracket, min_lap) = positivity_scan(params, 2000)?;
    Ok(PohozaevReport {
        boundary_term: boundary_t,
        bracket_integral: bracket_t,
        laplacian_integral: lap_t,
        residual,
        min_bracket,
        min_laplacian_factor: min_lap,
        cross_agreement: cross,
    })
}

/// Concentrating-family profile shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProbeProfile {
    /// `exp(-1/(1-s²))` on `[0,1)`: compactly supported and smooth
    SmoothBump,
    /// `(1+s²)^{-1/2} - (1+S²)^{-1/2}` cut at `s = S`: approaches the
    /// extremal Sobolev profile as `S` grows
    TruncatedBubble { cutoff: f64 },
}

impl ProbeProfile {
    fn support(&self) -> f64 {
        match *self {
            ProbeProfile::SmoothBump => 1.0,
            ProbeProfile::TruncatedBubble { cutoff } => cutoff,
        }
    }

    fn eval(&self, s: f64) -> f64 {
        match *self {
            ProbeProfile::SmoothBump => bump(s),
            ProbeProfile::TruncatedBubble { cutoff } => {
                if s >= cutoff {
                    0.0
                } else {
                    (1.0 + s * s).powf(-0.5) - (1.0 + cutoff * cutoff).powf(-0.5)
                }
            }
        }
    }

    fn eval_deriv(&self, s: f64) -> f64 {
        match *self {
            ProbeProfile::SmoothBump => bump_deriv(s),
            ProbeProfile::TruncatedBubble { cutoff } => {
                if s >= cutoff {
                    0.0
                } else {
                    -s * (1.0 + s * s).powf(-1.5)
                }
            }
        }
    }
}

/// Quotient trajectory of a concentrating family.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    /// `(ε, quotient)` pairs, ε decreasing geometrically
    pub entries: Vec<(f64, f64)>,
    /// consecutive quotient ratios over the last five steps
    pub last_ratios: Vec<f64>,
    /// all recorded last ratios below 1 (supercritical collapse signature)
    pub decreasing: bool,
    /// all recorded last ratios above 1 (subcritical divergence signature)
    pub increasing: bool,
    /// whether the requested parameters satisfy the pointwise-positivity
    /// hypothesis `N ≥ α-1, β > -N`
    pub laplacian_hypothesis_ok: bool,
}

/// Evaluates the Dirichlet quotient
/// `∫d^α|∇u_ε|²dV / (∫d^β|u_ε|^p dV)^{2/p}` along `u_ε(t) = φ(t/ε)`.
///
/// For `p` above both critical exponents the sequence collapses toward zero;
/// strictly below, it diverges; at the Sobolev-critical point with the bubble
/// profile it approaches the Euclidean best constant.
pub fn supercritical_probe(
    params: &Params,
    dom: &BallDomain,
    family_size: usize,
    profile: ProbeProfile,
) -> Result<ProbeReport> {
    let viol = params.validate(Mode::Pohozaev);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    let p = require_p(params)?;
    let dim = params.n;
    let support = profile.support();
    let eps0 = 0.8 * dom.t / support;
    // grid resolution floor: the head panel of the probe grid
    let head = 1e-8 * dom.t.min(1.0);
    let grid = Arc::new(build_grid(900, dom.t, Grading::default())?);
    let mut entries = Vec::with_capacity(family_size);
    for kf in 0..family_size {
        let eps = eps0 * 0.5f64.powi(kf as i32);
        if eps * support < 100.0 * head {
            return Err(Error::FamilyUnderflow { epsilon: eps });
        }
        let u = RadialFn::from_fn_with_deriv(
            &grid,
            move |t| profile.eval(t / eps),
            move |t| profile.eval_deriv(t / eps) / eps,
        )?;
        let num = grad_energy(&u, params.alpha, dim)?;
        let den = lq_weighted(&u, params.beta, p, dim)?;
        if den < 1e-300 {
            return Err(Error::ZeroDenominator("probe quotient"));
        }
        entries.push((eps, num / den.powf(2.0 / p)));
    }
    let tail = entries.len().saturating_sub(5);
    let mut last_ratios = Vec::new();
    for w in entries.windows(2).skip(tail.saturating_sub(1)) {
        last_ratios.push(w[1].1 / w[0].1);
    }
    let decreasing = !last_ratios.is_empty() && last_ratios.iter().all(|&r| r < 1.0);
    let increasing = !last_ratios.is_empty() && last_ratios.iter().all(|&r| r > 1.0);
    Ok(ProbeReport {
        entries,
        last_ratios,
        decreasing,
        increasing,
        laplacian_hypothesis_ok: params.laplacian_hypothesis_ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;
    use approx::assert_relative_eq;

    #[test]
    fn bracket_cancels_exactly_at_critical() {
        let p = Params::pohozaev(3, 0.0, 0.0, 6.0);
        for &r in &[1e-6, 0.3, 0.5, 0.9, 0.999] {
            assert!(bracket2(&p, r).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn bracket_closed_form_values() {
        // N=3, α=β=0, p=8, r=0.5: (1/2 - 3/8)(1 + 2/3) = 5/24
        let p = Params::pohozaev(3, 0.0, 0.0, 8.0);
        assert_relative_eq!(bracket2(&p, 0.5).unwrap(), 5.0 / 24.0, max_relative = 1e-13);
        // subcritical p = 5: negative near the boundary
        let sub = Params::pohozaev(3, 0.0, 0.0, 5.0);
        assert!(bracket2(&sub, 0.999).unwrap() < 0.0);
        // r- and t-forms agree
        let t = dist(0.5).unwrap();
        assert_relative_eq!(
            bracket2(&p, 0.5).unwrap(),
            bracket2_t(&p, t).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn laplacian_factor_beta_zero_reduction() {
        // β = 0 reduces to N·d^α ρ^N (N + Nρr² + αρr/d)
        let p = Params::pohozaev(3, 0.5, 0.0, 7.0);
        for &r in &[0.2, 0.5, 0.8] {
            let g = geom_factors(r).unwrap();
            let expect = 3.0
                * g.dist.powf(0.5)
                * g.rho.powi(3)
                * (3.0 + 3.0 * g.rho * r * r + 0.5 * g.b);
            assert_relative_eq!(
                laplacian_factor(&p, r).unwrap(),
                expect,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn laplacian_factor_matches_fd_oracle() {
        let p = Params::pohozaev(3, 0.0, -1.0, 7.0);
        for &r in &[0.2, 0.4, 0.6, 0.8] {
            let cf = laplacian_factor(&p, r).unwrap();
            let fd = laplacian_factor_fd(&p, r, 1e-4).unwrap();
            assert_relative_eq!(cf, fd, max_relative = 1e-4);
        }
    }

    #[test]
    fn positivity_scans() {
        // documented supercritical set
        let p = Params::pohozaev(3, 0.5, 0.0, 7.0);
        let (mb, ml) = positivity_scan(&p, 4000).unwrap();
        assert!(mb >= -1e-10, "bracket min {mb}");
        assert!(ml >= -1e-10, "laplacian min {ml}");
        // β approaching -N from above
        let edge = Params::pohozaev(3, 0.0, -2.9, 7.0);
        let (_, ml_edge) = positivity_scan(&edge, 4000).unwrap();
        assert!(ml_edge >= -1e-10, "edge laplacian min {ml_edge}");
    }

    #[test]
    fn probe_critical_exponent_dichotomy() {
        let dom = BallDomain::new(8.0).unwrap();
        // supercritical: collapsing quotients
        let sup = Params::pohozaev(3, 0.0, 0.0, 7.0);
        let rep = supercritical_probe(&sup, &dom, 10, ProbeProfile::SmoothBump).unwrap();
        assert!(rep.decreasing, "ratios {:?}", rep.last_ratios);
        assert!(rep.last_ratios.iter().all(|&r| r < 0.95));
        // subcritical: divergence
        let sub = Params::pohozaev(3, 0.0, 0.0, 4.0);
        let rep = supercritical_probe(&sub, &dom, 10, ProbeProfile::SmoothBump).unwrap();
        assert!(rep.increasing, "ratios {:?}", rep.last_ratios);
    }

    #[test]
    fn probe_underflow_guard() {
        let dom = BallDomain::new(1.0).unwrap();
        let p = Params::pohozaev(3, 0.0, 0.0, 7.0);
        assert!(matches!(
            supercritical_probe(&p, &dom, 40, ProbeProfile::SmoothBump),
            Err(Error::FamilyUnderflow { .. })
        ));
    }

    #[test]
    fn report_rejects_non_dirichlet() {
        let grid = Arc::new(build_grid(200, 1.0, Grading::default()).unwrap());
        let p = Params::pohozaev(3, 0.0, 0.0, 4.0);
        let dom = BallDomain::new(1.0).unwrap();
        let u = RadialFn::from_fn_with_deriv(&grid, |_| 1.0, |_| 0.0).unwrap();
        assert!(matches!(
            pohozaev_report(&u, &dom, &p),
            Err(Error::NonDirichlet { .. })
        ));
    }

    #[test]
    fn report_zero_input() {
        let grid = Arc::new(build_grid(200, 1.0, Grading::default()).unwrap());
        let p = Params::pohozaev(3, 0.0, 0.0, 4.0);
        let dom = BallDomain::new(1.0).unwrap();
        let z = RadialFn::from_fn_with_deriv(&grid, |_| 0.0, |_| 0.0).unwrap();
        let rep = pohozaev_report(&z, &dom, &p).unwrap();
        assert_eq!(rep.boundary_term, 0.0);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn report_flags_generic_bump_as_non_solution() {
        // a smooth Dirichlet datum that does not solve the equation: the
        // identity defect is order one
        let grid = Arc::new(build_grid(400, 1.0, Grading::default()).unwrap());
        let p = Params::pohozaev(3, 0.0, 0.0, 4.0);
        let dom = BallDomain::new(1.0).unwrap();
        // u = (2+t)·t·(1-t)² = 2t - 3t² + t⁴ on [0,1]
        let u = RadialFn::from_fn_with_deriv(
            &grid,
            |t| 2.0 * t - 3.0 * t * t + t.powi(4),
            |t| 2.0 - 6.0 * t + 4.0 * t.powi(3),
        )
        .unwrap();
        let rep = pohozaev_report(&u, &dom, &p).unwrap();
        assert!(rep.residual > 0.1, "residual {}", rep.residual);
    }
}
