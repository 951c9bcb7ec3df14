//! Closed-form radial primitives on the Poincaré ball.
//!
//! Everything here is a pure function of the Euclidean radius `r ∈ [0,1)` or
//! of the geodesic radius `t = dist(r) ∈ [0,∞)`. The conformal factor is
//! `rho(r) = 2/(1-r²)`, the distance to the origin `dist(r) = log((1+r)/(1-r))`,
//! and both coordinates are exposed throughout because the geodesic variable
//! turns every metric weight into a plain power weight:
//! `rho^{N-1} r^{N-1} dr · rho = sinh^{N-1}(t) dt`.

use crate::error::{Error, Result};

// 1 - r² without cancellation: 1-r is exact for r ∈ [1/2, 1) and the factored
// product keeps full relative precision all the way to the boundary.
#[inline]
pub(crate) fn one_minus_r_sq(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

/// Conformal factor `rho(r) = 2/(1-r²)` of the ball metric.
pub fn rho(r: f64) -> Result<f64> {
    check_unit_interval(r, "r")?;
    Ok(2.0 / one_minus_r_sq(r))
}

/// Hyperbolic distance from the origin, `dist(r) = log((1+r)/(1-r))`.
pub fn dist(r: f64) -> Result<f64> {
    check_unit_interval(r, "r")?;
    // ln_1p form keeps full precision near r = 0.
    Ok((2.0 * r / (1.0 - r)).ln_1p())
}

/// Inverse of [`dist`]: the Euclidean radius at geodesic distance `t`.
pub fn r_of_d(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "[0, inf)",
        });
    }
    Ok((0.5 * t).tanh())
}

/// `sinh(t)/t`, continuously extended by 1 at `t = 0`.
pub fn sinh_ratio(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sinh() / t
    }
}

/// `(sinh(t)/t)^k` without forming `sinh(t)^k / t^k` (overflow-safe for small t).
pub fn sinh_ratio_pow(t: f64, k: i32) -> f64 {
    sinh_ratio(t).powi(k)
}

/// The algebraic factors of the radial divergence expansions.
///
/// `a = 1 + rho·r² - rho·r/d` and `b = rho·r/d`; in the geodesic variable these
/// are `a = cosh t - sinh(t)/t` and `b = sinh(t)/t`. Both extend continuously
/// to the origin with `a → 0`, `b → 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomFactors {
    pub rho: f64,
    pub dist: f64,
    pub a: f64,
    pub b: f64,
}

// Below this geodesic radius `a = cosh t - sinh t / t` is evaluated by series
// to dodge the 0/0 cancellation.
const FACTOR_SERIES_CUTOFF: f64 = 0.05;

fn factor_a(t: f64) -> f64 {
    if t < FACTOR_SERIES_CUTOFF {
        let s = t * t;
        // sum_{k>=1} t^{2k} (2k)/(2k+1)!
        s * (1.0 / 3.0 + s * (1.0 / 30.0 + s * (1.0 / 840.0 + s / 45360.0)))
    } else {
        t.cosh() - t.sinh() / t
    }
}

/// Geometric factors at geodesic radius `t > 0`.
pub fn geom_factors_t(t: f64) -> Result<GeomFactors> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "(0, inf)",
        });
    }
    let r = (0.5 * t).tanh();
    Ok(GeomFactors {
        rho: 2.0 / one_minus_r_sq(r),
        dist: t,
        a: factor_a(t),
        b: sinh_ratio(t),
    })
}

/// Geometric factors at Euclidean radius `r ∈ (0,1)`.
pub fn geom_factors(r: f64) -> Result<GeomFactors> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            expected: "(0, 1)",
        });
    }
    let t = (2.0 * r / (1.0 - r)).ln_1p();
    Ok(GeomFactors {
        rho: 2.0 / one_minus_r_sq(r),
        dist: t,
        a: factor_a(t),
        b: sinh_ratio(t),
    })
}

/// Checks the two-sided distance bound `2r ≤ dist(r) ≤ 2r/(1-r²)`.
///
/// Returns `(lower_ok, upper_ok)` with a small floating-point slack.
pub fn dist_bounds_check(r: f64) -> Result<(bool, bool)> {
    check_unit_interval(r, "r")?;
    let d = dist(r)?;
    let upper = 2.0 * r / one_minus_r_sq(r);
    let slack = 1e-12 * (1.0 + d.abs());
    Ok((d - 2.0 * r >= -slack, upper - d >= -slack))
}

/// Radial divergence factor `∇·(d^γ ρ^N x)/(d^γ ρ^N) = N + N ρ r² + γ ρ r / d`.
pub fn div_factor(gamma: f64, r: f64, n: u32) -> Result<f64> {
    let g = geom_factors(r)?;
    Ok(n as f64 * (1.0 + g.rho * r * r) + gamma * g.b)
}

/// Same factor in the geodesic variable: `N cosh t + γ sinh(t)/t`.
pub fn div_factor_t(gamma: f64, t: f64, n: u32) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "(0, inf)",
        });
    }
    Ok(n as f64 * t.cosh() + gamma * sinh_ratio(t))
}

/// Gradient-weight divergence factor `∇·(d^γ ρ^{N-2} x)/(d^γ ρ^{N-2}) = N + (N-2) ρ r² + γ ρ r / d`.
pub fn div_factor_grad(gamma: f64, r: f64, n: u32) -> Result<f64> {
    let g = geom_factors(r)?;
    Ok(n as f64 + (n as f64 - 2.0) * g.rho * r * r + gamma * g.b)
}

/// Same factor in the geodesic variable: `2 + (N-2) cosh t + γ sinh(t)/t`.
pub fn div_factor_grad_t(gamma: f64, t: f64, n: u32) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "t",
            value: t,
            expected: "(0, inf)",
        });
    }
    Ok(2.0 + (n as f64 - 2.0) * t.cosh() + gamma * sinh_ratio(t))
}

/// Critical exponent `2(N+β)/(N-2+α)` of the weighted problem.
pub fn critical_exponent(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    let den = n as f64 - 2.0 + alpha;
    if den <= 0.0 {
        return Err(Error::Domain {
            what: "N-2+alpha",
            value: den,
            expected: "(0, inf)",
        });
    }
    if n as f64 + beta <= 0.0 {
        return Err(Error::Domain {
            what: "N+beta",
            value: n as f64 + beta,
            expected: "(0, inf)",
        });
    }
    Ok(2.0 * (n as f64 + beta) / den)
}

/// Sharp constant `((N-2+α)/2)²` of the weighted Hardy inequality.
pub fn hardy_constant(n: u32, alpha: f64) -> f64 {
    let h = 0.5 * (n as f64 - 2.0 + alpha);
    h * h
}

/// Bottom of the spectrum of the hyperbolic Laplacian, `(N-1)²/4`.
pub fn spectral_bottom(n: u32) -> f64 {
    let h = 0.5 * (n as f64 - 1.0);
    h * h
}

/// Surface area `ω_{N-1} = 2 π^{N/2} / Γ(N/2)` of the unit (N-1)-sphere.
pub fn sphere_area(n: u32) -> f64 {
    use std::f64::consts::PI;
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

// Γ(n/2) for integer n ≥ 1, exact up to f64 rounding.
fn gamma_half(n: u32) -> f64 {
    if n % 2 == 0 {
        // Γ(k) = (k-1)!
        let k = n / 2;
        (1..k).fold(1.0, |acc, j| acc * j as f64)
    } else {
        // Γ(k + 1/2) = sqrt(pi) (2k)! / (4^k k!)
        let k = (n - 1) / 2;
        let mut v = std::f64::consts::PI.sqrt();
        for j in 1..=k {
            v *= (2 * j - 1) as f64 / 2.0;
        }
        v
    }
}

fn check_unit_interval(r: f64, what: &'static str) -> Result<()> {
    if !(r >= 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what,
            value: r,
            expected: "[0, 1)",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rho_closed_forms() {
        assert_eq!(rho(0.0).unwrap(), 2.0);
        assert_relative_eq!(rho(0.5).unwrap(), 8.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(rho(0.9).unwrap(), 2.0 / 0.19, max_relative = 1e-15);
        assert!(rho(1.0).is_err());
        assert!(rho(-0.1).is_err());
    }

    #[test]
    fn dist_closed_forms() {
        assert_eq!(dist(0.0).unwrap(), 0.0);
        assert_relative_eq!(dist(0.5).unwrap(), 3.0_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(dist(0.9).unwrap(), 19.0_f64.ln(), max_relative = 1e-15);
        assert!(dist(1.0).is_err());
    }

    #[test]
    fn inverse_pair_round_trip() {
        assert_eq!(r_of_d(0.0).unwrap(), 0.0);
        assert_relative_eq!(r_of_d(3.0_f64.ln()).unwrap(), 0.5, max_relative = 1e-14);
        let r = 0.77;
        assert!((r_of_d(dist(r).unwrap()).unwrap() - r).abs() < 1e-14);
        assert!(r_of_d(-1e-9).is_err());
    }

    #[test]
    fn sinh_identity() {
        // rho(r)·r = sinh(dist(r)), e.g. at r = 0.9: (19 - 1/19)/2.
        let r = 0.9;
        let lhs = rho(r).unwrap() * r;
        assert_relative_eq!(lhs, (19.0 - 1.0 / 19.0) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(lhs, dist(r).unwrap().sinh(), max_relative = 1e-13);
    }

    #[test]
    fn factors_at_half() {
        let g = geom_factors(0.5).unwrap();
        let b = (4.0 / 3.0) / 3.0_f64.ln();
        assert_relative_eq!(g.b, b, max_relative = 1e-13);
        assert_relative_eq!(g.a, 1.0 + 2.0 / 3.0 - b, max_relative = 1e-12);
    }

    #[test]
    fn factors_origin_limit() {
        // a → 0 like t²/3, b → 1.
        for &t in &[1e-9, 1e-6, 1e-3, 0.04] {
            let g = geom_factors_t(t).unwrap();
            assert_relative_eq!(g.a, t * t / 3.0, max_relative = 1e-3);
            assert!((g.b - 1.0).abs() < t * t);
            assert!(g.a >= 0.0 && g.b >= 1.0);
        }
        // the series branch agrees with the direct formula where both are sound
        for &t in &[0.02f64, 0.04, 0.049] {
            let direct = t.cosh() - t.sinh() / t;
            assert_relative_eq!(factor_a(t), direct, max_relative = 1e-10);
        }
        assert!(geom_factors_t(0.0).is_err());
    }

    #[test]
    fn bounds_hold_on_samples() {
        for &r in &[0.0, 0.5, 0.99] {
            let (lo, hi) = dist_bounds_check(r).unwrap();
            assert!(lo && hi, "bounds failed at r = {r}");
        }
        // spot values from the closed forms
        let d = dist(0.99).unwrap();
        assert_relative_eq!(d, 199.0_f64.ln(), max_relative = 1e-14);
        assert!(2.0 * 0.99 <= d && d <= 2.0 * 0.99 / (1.0 - 0.99 * 0.99));
    }

    #[test]
    fn div_factors() {
        // limits at the origin via b → 1
        assert_relative_eq!(div_factor(-1.0, 1e-9, 3).unwrap(), 2.0, max_relative = 1e-9);
        assert_relative_eq!(div_factor_grad(0.0, 1e-9, 3).unwrap(), 3.0, max_relative = 1e-9);
        // closed-form spot values at r = 1/2
        assert_relative_eq!(div_factor(0.0, 0.5, 3).unwrap(), 5.0, max_relative = 1e-14);
        let b = (4.0 / 3.0) / 3.0_f64.ln();
        assert_relative_eq!(div_factor(2.0, 0.5, 3).unwrap(), 5.0 + 2.0 * b, max_relative = 1e-13);
        assert_relative_eq!(div_factor_grad(0.0, 0.5, 3).unwrap(), 11.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            div_factor_grad(1.0, 0.5, 4).unwrap(),
            4.0 + 4.0 / 3.0 + b,
            max_relative = 1e-13
        );
        // r- and t-forms agree
        for &r in &[0.1, 0.5, 0.8] {
            let t = dist(r).unwrap();
            assert_relative_eq!(
                div_factor(1.5, r, 4).unwrap(),
                div_factor_t(1.5, t, 4).unwrap(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                div_factor_grad(-0.5, r, 4).unwrap(),
                div_factor_grad_t(-0.5, t, 4).unwrap(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn exponents_and_constants() {
        assert_relative_eq!(critical_exponent(3, 0.0, 0.0).unwrap(), 6.0);
        assert_relative_eq!(critical_exponent(3, 1.0, 0.0).unwrap(), 3.0);
        assert_relative_eq!(critical_exponent(3, 0.0, 2.0).unwrap(), 10.0);
        assert!(critical_exponent(3, -1.0, 0.0).is_err());
        assert_eq!(hardy_constant(3, 0.0), 0.25);
        assert_eq!(hardy_constant(3, 1.0), 1.0);
        assert_eq!(hardy_constant(4, 0.0), 1.0);
        assert_eq!(spectral_bottom(3), 1.0);
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
    }
}
