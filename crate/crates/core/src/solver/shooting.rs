//! Radial ODE shooting: the independent oracle for Dirichlet ground states.
//!
//! The equation `-(t^α sinh^{N-1}t · u')' = (λ t^{α-2} u + t^β|u|^{q-2}u) sinh^{N-1}t`
//! is integrated as
//! `u'' = -(α/t + (N-1)coth t) u' - λ t^{-2} u - t^{β-α}|u|^{q-2}u`
//! with an adaptive Dormand–Prince 5(4) pair. Integration starts at
//! `t = 1e-6` from a frozen-coefficient expansion: the regular branch
//! `u ≈ s0 - s0^{q-1} t^{2+β-α}/((2+β-α)(N+β))` when `λ = 0`, and the
//! indicial branch `u ≈ s0·t^σ`, `σ = -(N-2+α)/2 + sqrt(hardy - λ)`,
//! otherwise. The boundary shooting value is located by bisection on the
//! first zero of the trajectory.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::hardy_constant;
use crate::params::{Mode, Params};
use crate::quadrature::{RadialFn, RadialGrid};

const EPS_START: f64 = 1e-6;
const MAX_STEP: f64 = 0.05;
const BLOWUP_FACTOR: f64 = 1e9;

/// One accepted integration step: `(t, u, u', u'')`.
pub type StepRecord = (f64, f64, f64, f64);

/// An integrated trajectory with its first zero, when one occurred.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
    pub first_zero: Option<f64>,
}

/// Result of a boundary-matched shooting run.
#[derive(Debug, Clone)]
pub struct ShootOutcome {
    /// solution sampled on the caller's grid
    pub u: RadialFn,
    /// matched shooting value u(0⁺) (indicial amplitude when λ ≠ 0)
    pub s0: f64,
    /// located first zero (within tolerance of the grid's t_max)
    pub first_zero: f64,
    /// bisection iterations
    pub iterations: usize,
}

struct Rhs {
    alpha: f64,
    beta: f64,
    lambda: f64,
    q: f64,
    nm1: f64,
}

impl Rhs {
    fn new(params: &Params) -> Self {
        Rhs {
            alpha: params.alpha,
            beta: params.beta,
            lambda: params.lambda,
            q: params.q.unwrap(),
            nm1: params.n as f64 - 1.0,
        }
    }

    // coth t - 1/t, series below 0.1
    fn coth_defect(t: f64) -> f64 {
        if t < 0.1 {
            let s = t * t;
            t * (1.0 / 3.0 - s / 45.0 + 2.0 * s * s / 945.0)
        } else {
            1.0 / t.tanh() - 1.0 / t
        }
    }

    fn accel(&self, t: f64, u: f64, du: f64) -> f64 {
        let damping = (self.alpha + self.nm1) / t + self.nm1 * Self::coth_defect(t);
        let hardy = if self.lambda != 0.0 {
            self.lambda * u / (t * t)
        } else {
            0.0
        };
        let nonlinear = t.powf(self.beta - self.alpha) * u.abs().powf(self.q - 2.0) * u;
        -damping * du - hardy - nonlinear
    }

    // frozen-coefficient start at t0
    fn start(&self, params: &Params, s0: f64, t0: f64) -> (f64, f64) {
        if self.lambda == 0.0 {
            let e = 2.0 + self.beta - self.alpha;
            let c = s0.abs().powf(self.q - 2.0) * s0 / (e * (params.n as f64 + self.beta));
            (s0 - c * t0.powf(e), -c * e * t0.powf(e - 1.0))
        } else {
            let h = hardy_constant(params.n, self.alpha);
            let sigma = -0.5 * (params.n as f64 - 2.0 + self.alpha) + (h - self.lambda).sqrt();
            (s0 * t0.powf(sigma), s0 * sigma * t0.powf(sigma - 1.0))
        }
    }
}

// Dormand–Prince 5(4) coefficients.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates one trajectory from `u(0⁺) ≈ s0` until the first zero of `u`,
/// blow-up, or `t_cap`.
pub fn shoot_trajectory(params: &Params, s0: f64, t_cap: f64) -> Result<Trajectory> {
    let viol = params.validate(Mode::Solve);
    if !viol.is_empty() {
        return Err(Error::Validation(viol));
    }
    if !(s0 > 0.0) {
        return Err(Error::Domain {
            what: "s0",
            value: s0,
            expected: "(0, inf)",
        });
    }
    let rhs = Rhs::new(params);
    let mut t = EPS_START;
    let (mut u, mut du) = rhs.start(params, s0, t);
    let scale = u.abs().max(s0);
    let mut h: f64 = 1e-4;
    let rtol = 1e-10;
    let atol = 1e-13 * scale;
    let mut steps: Vec<StepRecord> = vec![(t, u, du, rhs.accel(t, u, du))];
    let mut first_zero = None;

    while t < t_cap {
        h = h.min(MAX_STEP).min(t_cap - t).max(1e-14);
        // seven stages
        let mut ku = [0.0; 7];
        let mut kv = [0.0; 7];
        ku[0] = du;
        kv[0] = rhs.accel(t, u, du);
        for s in 0..6 {
            let mut su = 0.0;
            let mut sv = 0.0;
            for j in 0..=s {
                su += DP_A[s][j] * ku[j];
                sv += DP_A[s][j] * kv[j];
            }
            let ts = t + DP_C[s] * h;
            let us = u + h * su;
            let dus = du + h * sv;
            ku[s + 1] = dus;
            kv[s + 1] = rhs.accel(ts, us, dus);
        }
        let mut u5 = 0.0;
        let mut v5 = 0.0;
        let mut u4 = 0.0;
        let mut v4 = 0.0;
        for j in 0..7 {
            u5 += DP_B5[j] * ku[j];
            v5 += DP_B5[j] * kv[j];
            u4 += DP_B4[j] * ku[j];
            v4 += DP_B4[j] * kv[j];
        }
        let un = u + h * u5;
        let dun = du + h * v5;
        let err_u = h * (u5 - u4);
        let err_v = h * (v5 - v4);
        let tol_u = atol + rtol * u.abs().max(un.abs());
        let tol_v = atol / h.max(1e-3) + rtol * du.abs().max(dun.abs());
        let err = ((err_u / tol_u).powi(2) + (err_v / tol_v).powi(2)).sqrt() / 2f64.sqrt();
        if err <= 1.0 {
            let t_new = t + h;
            if u > 0.0 && un <= 0.0 {
                // refine the crossing on the dense cubic of this step
                let tz = refine_zero(t, h, u, du, un, dun);
                first_zero = Some(tz);
                steps.push((t_new, un, dun, rhs.accel(t_new, un, dun)));
                break;
            }
            t = t_new;
            u = un;
            du = dun;
            steps.push((t, u, du, rhs.accel(t, u, du)));
            if u.abs() > BLOWUP_FACTOR * scale {
                break;
            }
        }
        let grow = 0.9 * err.powf(-0.2);
        h *= grow.clamp(0.2, 5.0);
        if h < 1e-13 {
            return Err(Error::OdeStepFailure { t });
        }
    }
    Ok(Trajectory { steps, first_zero })
}

// Hermite-cubic root of u over [t, t+h] given endpoint values/slopes.
fn refine_zero(t: f64, h: f64, u0: f64, du0: f64, u1: f64, du1: f64) -> f64 {
    let eval = |x: f64| -> f64 {
        let x2 = x * x;
        let x3 = x2 * x;
        u0 * (1.0 - 3.0 * x2 + 2.0 * x3)
            + du0 * h * (x - 2.0 * x2 + x3)
            + u1 * (3.0 * x2 - 2.0 * x3)
            + du1 * h * (x3 - x2)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    t + 0.5 * (lo + hi) * h
}

/// First zero of the trajectory for a given shooting value (`None`: the
/// trajectory stayed positive up to `t_cap`).
pub fn first_zero_of(params: &Params, s0: f64, t_cap: f64) -> Result<Option<f64>> {
    Ok(shoot_trajectory(params, s0, t_cap)?.first_zero)
}

/// Shoots the Dirichlet problem on the ball of geodesic radius
/// `grid.t_max()`: bisects `s0` until the first zero lands on the boundary,
/// then samples the matched trajectory on the grid.
pub fn shoot_ball(
    params: &Params,
    grid: &Arc<RadialGrid>,
    s0: f64,
    opts: &super::SolveOpts,
) -> Result<ShootOutcome> {
    let t_boundary = grid.t_max();
    let t_cap = 3.0 * t_boundary + 5.0;
    if !(s0 > 0.0) {
        return Err(Error::Domain {
            what: "s0",
            value: s0,
            expected: "(0, inf)",
        });
    }

    // bracket: s_hi crosses before the boundary, s_lo after (or never)
    let zero_at = |s: f64| -> Result<Option<f64>> { first_zero_of(params, s, t_cap) };
    let mut s_hi = s0;
    let mut hi_zero = zero_at(s_hi)?;
    let mut grow_iter = 0;
    while !matches!(hi_zero, Some(z) if z <= t_boundary) {
        s_hi *= 2.0;
        grow_iter += 1;
        if grow_iter > 200 {
            return Err(Error::NoSignChange { s0: s_hi, t_cap });
        }
        hi_zero = zero_at(s_hi)?;
    }
    let mut s_lo = s_hi;
    let mut lo_iter = 0;
    loop {
        s_lo *= 0.5;
        lo_iter += 1;
        if lo_iter > 200 {
            return Err(Error::NoSignChange { s0: s_lo, t_cap });
        }
        match zero_at(s_lo)? {
            Some(z) if z <= t_boundary => continue,
            _ => break,
        }
    }

    // bisection on the first-zero location
    let mut iterations = grow_iter + lo_iter;
    let mut matched = s_hi;
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (s_lo + s_hi);
        let z = zero_at(mid)?;
        match z {
            Some(z) if (z - t_boundary).abs() <= opts.shoot_tol => {
                matched = mid;
                break;
            }
            Some(z) if z < t_boundary => s_hi = mid,
            _ => s_lo = mid,
        }
        matched = mid;
        if (s_hi - s_lo) / s_hi.abs().max(1e-300) < 1e-15 {
            break;
        }
    }
    let traj = shoot_trajectory(params, matched, t_cap)?;
    let first_zero = traj.first_zero.ok_or(Error::NoSignChange {
        s0: matched,
        t_cap,
    })?;
    if (first_zero - t_boundary).abs() > 1e3 * opts.shoot_tol {
        return Err(Error::NonConvergence {
            iterations,
            stationarity: (first_zero - t_boundary).abs(),
        });
    }

    let u = sample_on_grid(&traj, grid)?;
    Ok(ShootOutcome {
        u,
        s0: matched,
        first_zero,
        iterations,
    })
}

// Hermite interpolation of the step records onto the grid nodes: u from
// (u, u'), u' from (u', u'').
fn sample_on_grid(traj: &Trajectory, grid: &Arc<RadialGrid>) -> Result<RadialFn> {
    let steps = &traj.steps;
    let hermite = |x: f64, h: f64, v0: f64, d0: f64, v1: f64, d1: f64| -> f64 {
        let x2 = x * x;
        let x3 = x2 * x;
        v0 * (1.0 - 3.0 * x2 + 2.0 * x3)
            + d0 * h * (x - 2.0 * x2 + x3)
            + v1 * (3.0 * x2 - 2.0 * x3)
            + d1 * h * (x3 - x2)
    };
    let eval_at = |t: f64| -> (f64, f64) {
        // clamp before the start / after the end
        if t <= steps[0].0 {
            let (_, u, du, _) = steps[0];
            return (u, du);
        }
        let last = steps[steps.len() - 1];
        if t >= last.0 {
            return (last.1, last.2);
        }
        let k = steps.partition_point(|s| s.0 < t) - 1;
        let (t0, u0, du0, ddu0) = steps[k];
        let (t1, u1, du1, ddu1) = steps[k + 1];
        let h = t1 - t0;
        let x = (t - t0) / h;
        (
            hermite(x, h, u0, du0, u1, du1),
            hermite(x, h, du0, ddu0, du1, ddu1),
        )
    };
    let values: Vec<f64> = grid.nodes().iter().map(|&t| eval_at(t).0).collect();
    let derivs: Vec<f64> = grid.nodes().iter().map(|&t| eval_at(t).1).collect();
    let b0 = {
        let (_, u, du, _) = steps[0];
        (u, du)
    };
    let b1 = eval_at(grid.t_max());
    RadialFn::from_parts(grid, values, derivs, b0, b1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_grid, Grading};

    fn classical() -> Params {
        Params::solve(3, 0.0, 0.0, 0.0, 4.0)
    }

    #[test]
    fn small_amplitude_stays_positive() {
        let z = first_zero_of(&classical(), 0.05, 10.0).unwrap();
        assert!(z.is_none(), "tiny shooting values must not cross: {z:?}");
    }

    #[test]
    fn larger_amplitude_crosses_earlier() {
        // below the ground-state amplitude the trajectory stays positive;
        // above it, the first zero moves left as s0 grows
        let p = classical();
        let mut s = 1.0;
        let mut first = None;
        while first.is_none() && s < 1e6 {
            s *= 2.0;
            first = first_zero_of(&p, s, 40.0).unwrap();
        }
        let z1 = first.expect("no crossing found up to s0 = 1e6");
        let z2 = first_zero_of(&p, 2.0 * s, 40.0)
            .unwrap()
            .expect("crossing expected");
        let z3 = first_zero_of(&p, 4.0 * s, 40.0)
            .unwrap()
            .expect("crossing expected");
        assert!(z2 < z1 && z3 < z2, "zeros {z1} {z2} {z3}");
    }

    #[test]
    fn derivative_vanishes_at_origin() {
        // |u'(ε)|/s0 ≤ C ε for the regular (λ=0) start
        let p = classical();
        let tr = shoot_trajectory(&p, 1.0, 1.0).unwrap();
        let (t0, _, du0, _) = tr.steps[0];
        assert!(du0.abs() <= 10.0 * t0, "u'({t0}) = {du0}");
    }

    #[test]
    fn ball_shooting_hits_boundary() {
        let g = std::sync::Arc::new(build_grid(300, 3.0, Grading::default()).unwrap());
        let out = shoot_ball(&classical(), &g, 1.0, &super::super::SolveOpts::default()).unwrap();
        assert!((out.first_zero - 3.0).abs() < 1e-6);
        // Dirichlet value at the boundary is tiny
        let (_, (v1, d1)) = out.u.boundary();
        assert!(v1.abs() < 1e-6, "u(T) = {v1}");
        assert!(d1 < 0.0, "u'(T) should be negative");
        assert!(out.u.min_value() > -1e-8);
        assert!(out.s0 > 0.0);
    }

    #[test]
    fn energy_ode_consistency() {
        // the shooting solution satisfies the weak equation on the ball
        let g = std::sync::Arc::new(build_grid(400, 3.0, Grading::default()).unwrap());
        let p = classical();
        let out = shoot_ball(&p, &g, 1.0, &super::super::SolveOpts::default()).unwrap();
        let res = crate::functionals::weak_residual(&out.u, &p).unwrap();
        assert!(res < 1e-4, "weak residual of shooting solution: {res}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(shoot_trajectory(&classical(), -1.0, 10.0).is_err());
        let bad = Params::solve(3, 0.0, 0.0, 0.0, 2.0);
        assert!(shoot_trajectory(&bad, 1.0, 10.0).is_err());
    }
}
