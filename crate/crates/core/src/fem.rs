//! Cubic Hermite element machinery on the internode cells of a grid.
//!
//! Degrees of freedom are `(value, slope)` pairs at the cell vertices
//! `[0, t_1, .., t_n, T]`; the space is C¹ piecewise cubic, vanishing at `T`
//! (the truncation radius stands in for the ball boundary / infinity). All
//! weighted forms are integrated cell by cell with the grid's cell rule and a
//! moment-fitted first cell, so weights `t^μ` with `μ > -1` are handled at
//! full order.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{sinh_ratio_pow, sphere_area};
use crate::quadrature::{RadialFn, RadialGrid};

/// Which bilinear form a weighted assembly produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    /// `∫ t^μ φ' ψ' sinh^{N-1} dt` (gradient energy)
    Grad,
    /// `∫ t^μ φ ψ sinh^{N-1} dt` (weighted mass)
    Mass,
}

/// The Hermite space over a grid's cells.
pub struct Space {
    grid: Arc<RadialGrid>,
    dim: u32,
}

/// Symmetric banded matrix, upper-band storage.
#[derive(Debug, Clone)]
pub struct BandMat {
    n: usize,
    hb: usize,
    data: Vec<f64>,
}

/// LDLᵀ factorization of a [`BandMat`].
pub struct BandLdl {
    n: usize,
    hb: usize,
    /// column-major band: fac[i*(hb+1)] = d_i, fac[i*(hb+1)+k] = L[i+k][i]
    fac: Vec<f64>,
}

impl BandMat {
    pub fn zeros(n: usize, hb: usize) -> Self {
        BandMat {
            n,
            hb,
            data: vec![0.0; n * (hb + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= i && j - i <= self.hb);
        i * (self.hb + 1) + (j - i)
    }

    /// Adds `v` at `(i, j)` (and by symmetry `(j, i)`); requires `|i-j| ≤ hb`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let at = self.idx(i, j);
        self.data[at] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if j - i > self.hb {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let jmax = (i + self.hb).min(self.n - 1);
            y[i] += self.data[self.idx(i, i)] * x[i];
            for j in i + 1..=jmax {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
    }

    /// `self += c · other` (same layout).
    pub fn add_scaled(&mut self, other: &BandMat, c: f64) {
        assert_eq!(self.n, other.n);
        assert_eq!(self.hb, other.hb);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Pins dof `i` to zero: clears its row/column and sets the diagonal to 1.
    pub fn pin(&mut self, i: usize) {
        let lo = i.saturating_sub(self.hb);
        for r in lo..i {
            if i - r <= self.hb {
                let at = self.idx(r, i);
                self.data[at] = 0.0;
            }
        }
        let hi = (i + self.hb).min(self.n - 1);
        for c in i..=hi {
            let at = self.idx(i, c);
            self.data[at] = 0.0;
        }
        let at = self.idx(i, i);
        self.data[at] = 1.0;
    }

    /// LDLᵀ factorization; fails on a zero pivot.
    pub fn ldlt(&self) -> Result<BandLdl> {
        let (n, hb) = (self.n, self.hb);
        let mut fac = vec![0.0; n * (hb + 1)];
        for i in 0..n {
            // d_i = a_ii - sum_k L[i][k]^2 d_k
            let mut d = self.data[self.idx(i, i)];
            let lo = i.saturating_sub(hb);
            for k in lo..i {
                let l = fac[k * (hb + 1) + (i - k)];
                d -= l * l * fac[k * (hb + 1)];
            }
            if !(d.abs() > 0.0) || !d.is_finite() {
                return Err(Error::LinearSolve("zero pivot in banded LDL^T"));
            }
            fac[i * (hb + 1)] = d;
            // column below the diagonal
            let jmax = (i + hb).min(n - 1);
            for j in i + 1..=jmax {
                let mut v = self.get(i, j);
                let lo2 = j.saturating_sub(hb);
                for k in lo2..i {
                    v -= fac[k * (hb + 1) + (j - k)]
                        * fac[k * (hb + 1) + (i - k)]
                        * fac[k * (hb + 1)];
                }
                fac[i * (hb + 1) + (j - i)] = v / d;
            }
        }
        Ok(BandLdl { n, hb, fac })
    }

    /// True when every pivot of the LDLᵀ factor is positive (SPD check).
    pub fn is_positive_definite(&self) -> bool {
        match self.ldlt() {
            Ok(f) => (0..self.n).all(|i| f.fac[i * (self.hb + 1)] > 0.0),
            Err(_) => false,
        }
    }
}

impl BandLdl {
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, hb) = (self.n, self.hb);
        // L y = b
        for i in 0..n {
            let lo = i.saturating_sub(hb);
            let mut v = b[i];
            for k in lo..i {
                v -= self.fac[k * (hb + 1) + (i - k)] * b[k];
            }
            b[i] = v;
        }
        // D z = y
        for i in 0..n {
            b[i] /= self.fac[i * (hb + 1)];
        }
        // L^T x = z
        for i in (0..n).rev() {
            let jmax = (i + hb).min(n - 1);
            let mut v = b[i];
            for j in i + 1..=jmax {
                v -= self.fac[i * (hb + 1) + (j - i)] * b[j];
            }
            b[i] = v;
        }
    }
}

// Hermite shapes on the unit cell, scaled by the cell width h where needed.
#[inline]
fn shape_values(x: f64, h: f64) -> [f64; 4] {
    let x2 = x * x;
    let x3 = x2 * x;
    [
        1.0 - 3.0 * x2 + 2.0 * x3,
        h * (x - 2.0 * x2 + x3),
        3.0 * x2 - 2.0 * x3,
        h * (x3 - x2),
    ]
}

#[inline]
fn shape_derivs(x: f64, h: f64) -> [f64; 4] {
    let x2 = x * x;
    [
        (6.0 * x2 - 6.0 * x) / h,
        1.0 - 4.0 * x + 3.0 * x2,
        (6.0 * x - 6.0 * x2) / h,
        (3.0 * x2 - 2.0 * x),
    ]
}

impl Space {
    pub fn new(grid: &Arc<RadialGrid>, dim: u32) -> Self {
        Space {
            grid: Arc::clone(grid),
            dim,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Total dof count (2 per vertex).
    pub fn n_dof(&self) -> usize {
        2 * (self.grid.len() + 2)
    }

    /// The pinned dof: the value at the boundary vertex `T`.
    pub fn dirichlet_dof(&self) -> usize {
        2 * (self.grid.len() + 1)
    }

    /// Assembles `ω_{N-1} ∫ t^μ (φ' ψ' | φ ψ) sinh^{N-1} dt` as a banded matrix.
    ///
    /// The Dirichlet dof row/column is pinned to identity.
    pub fn assemble(&self, mu: f64, term: Term) -> Result<BandMat> {
        if !(mu > -1.0) {
            return Err(Error::NotIntegrable { gamma: mu, dim: 1 });
        }
        let omega = sphere_area(self.dim);
        let k = self.dim as i32 - 1;
        let verts = self.grid.verts();
        let mut a = BandMat::zeros(self.n_dof(), 3);
        for c in 0..self.grid.cell_count() {
            let (lo, hi) = (verts[c], verts[c + 1]);
            let h = hi - lo;
            let (ts, ws): (Vec<f64>, Vec<f64>) = if c == 0 {
                self.grid.cell0_moment_rule(mu)
            } else {
                let (t, w) = self.grid.cell_rule(c);
                (
                    t.to_vec(),
                    w.iter().zip(t).map(|(&w, &t)| w * t.powf(mu)).collect(),
                )
            };
            let base = 2 * c;
            for (&t, &w) in ts.iter().zip(&ws) {
                let x = (t - lo) / h;
                let s = omega * w * sinh_ratio_pow(t, k);
                let sh = match term {
                    Term::Grad => shape_derivs(x, h),
                    Term::Mass => shape_values(x, h),
                };
                for i in 0..4 {
                    for j in i..4 {
                        a.add(base + i, base + j, s * sh[i] * sh[j]);
                    }
                }
            }
        }
        a.pin(self.dirichlet_dof());
        Ok(a)
    }

    /// The shifted form `ω ∫ (t^α φ'ψ' - λ t^{α-2} φψ) sinh^{N-1} dt`.
    pub fn assemble_shifted(&self, alpha: f64, lambda: f64) -> Result<BandMat> {
        let nf = self.dim as f64;
        let mut a = self.assemble(alpha + nf - 1.0, Term::Grad)?;
        if lambda != 0.0 {
            let m = self.assemble(alpha + nf - 3.0, Term::Mass)?;
            a.add_scaled(&m, -lambda);
            // re-pin: the mass contribution reintroduced entries on the row
            a.pin(self.dirichlet_dof());
        }
        Ok(a)
    }

    /// Value and gradient of `C(u) = ω ∫ t^μ |u|^q sinh^{N-1} dt` at the dof
    /// vector `u`.
    pub fn lq_term(&self, dofs: &[f64], mu: f64, q: f64) -> Result<(f64, Vec<f64>)> {
        if !(mu > -1.0) {
            return Err(Error::NotIntegrable { gamma: mu, dim: 1 });
        }
        let omega = sphere_area(self.dim);
        let k = self.dim as i32 - 1;
        let verts = self.grid.verts();
        let mut value = 0.0;
        let mut grad = vec![0.0; self.n_dof()];
        for c in 0..self.grid.cell_count() {
            let (lo, hi) = (verts[c], verts[c + 1]);
            let h = hi - lo;
            let (ts, ws): (Vec<f64>, Vec<f64>) = if c == 0 {
                self.grid.cell0_moment_rule(mu)
            } else {
                let (t, w) = self.grid.cell_rule(c);
                (
                    t.to_vec(),
                    w.iter().zip(t).map(|(&w, &t)| w * t.powf(mu)).collect(),
                )
            };
            let base = 2 * c;
            let local = [dofs[base], dofs[base + 1], dofs[base + 2], dofs[base + 3]];
            for (&t, &w) in ts.iter().zip(&ws) {
                let x = (t - lo) / h;
                let sh = shape_values(x, h);
                let u: f64 = (0..4).map(|i| sh[i] * local[i]).sum();
                let s = omega * w * sinh_ratio_pow(t, k);
                let au = u.abs();
                value += s * au.powf(q);
                let dint = q * au.powf(q - 1.0) * u.signum();
                for i in 0..4 {
                    grad[base + i] += s * dint * sh[i];
                }
            }
        }
        grad[self.dirichlet_dof()] = 0.0;
        Ok((value, grad))
    }

    /// Converts a dof vector to a [`RadialFn`] (grid nodes are interior
    /// vertices, boundary pairs come along verbatim).
    pub fn to_radial_fn(&self, dofs: &[f64]) -> Result<RadialFn> {
        let n = self.grid.len();
        let values = (0..n).map(|i| dofs[2 * (i + 1)]).collect();
        let derivs = (0..n).map(|i| dofs[2 * (i + 1) + 1]).collect();
        RadialFn::from_parts(
            &self.grid,
            values,
            derivs,
            (dofs[0], dofs[1]),
            (dofs[2 * (n + 1)], dofs[2 * (n + 1) + 1]),
        )
    }

    /// Extracts the dof vector of a [`RadialFn`] living on the same grid.
    pub fn from_radial_fn(&self, u: &RadialFn) -> Vec<f64> {
        let n = self.grid.len();
        let mut dofs = vec![0.0; self.n_dof()];
        let ((v0, d0), (v1, d1)) = u.boundary();
        dofs[0] = v0;
        dofs[1] = d0;
        for i in 0..n {
            dofs[2 * (i + 1)] = u.values()[i];
            dofs[2 * (i + 1) + 1] = u.derivs()[i];
        }
        dofs[2 * (n + 1)] = v1;
        dofs[2 * (n + 1) + 1] = d1;
        dofs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_grid, Grading};
    use approx::assert_relative_eq;

    fn space(t_max: f64) -> Space {
        let grid = Arc::new(build_grid(300, t_max, Grading::default()).unwrap());
        Space::new(&grid, 3)
    }

    #[test]
    fn band_solve_round_trip() {
        let n = 40;
        let mut a = BandMat::zeros(n, 3);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.01);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
            if i + 3 < n {
                a.add(i, i + 3, 0.3);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let f = a.ldlt().unwrap();
        f.solve(&mut b);
        for i in 0..n {
            assert_relative_eq!(b[i], x_true[i], max_relative = 1e-11);
        }
        assert!(a.is_positive_definite());
    }

    #[test]
    fn quadratic_form_matches_direct_integral() {
        let sp = space(8.0);
        let u = RadialFn::from_fn_with_deriv(
            sp.grid(),
            |t| (1.0 + t) * (-t).exp(),
            |t| -t * (-t).exp(),
        )
        .unwrap();
        // zero the pinned boundary dof so the pin does not perturb the form;
        // compare against the cell integral of the same (modified) function
        let mut dofs = sp.from_radial_fn(&u);
        dofs[sp.dirichlet_dof()] = 0.0;
        let u_pinned = sp.to_radial_fn(&dofs).unwrap();

        let a = sp.assemble(2.0, Term::Grad).unwrap();
        let mut y = vec![0.0; dofs.len()];
        a.matvec(&dofs, &mut y);
        let quad: f64 = dofs.iter().zip(&y).map(|(x, y)| x * y).sum();
        let direct = u_pinned
            .integrate_power_with(2.0, |t, _, du| du * du * sinh_ratio_pow(t, 2))
            .unwrap()
            * sphere_area(3);
        assert_relative_eq!(quad, direct, max_relative = 1e-11);

        let m = sp.assemble(0.5, Term::Mass).unwrap();
        m.matvec(&dofs, &mut y);
        let quad_m: f64 = dofs.iter().zip(&y).map(|(x, y)| x * y).sum();
        let direct_m = u_pinned
            .integrate_power_with(0.5, |t, v, _| v * v * sinh_ratio_pow(t, 2))
            .unwrap()
            * sphere_area(3);
        assert_relative_eq!(quad_m, direct_m, max_relative = 1e-11);
    }

    #[test]
    fn lq_gradient_is_consistent() {
        let sp = space(6.0);
        let u = RadialFn::from_fn_with_deriv(
            sp.grid(),
            |t| t * (-t).exp(),
            |t| (1.0 - t) * (-t).exp(),
        )
        .unwrap();
        let dofs = sp.from_radial_fn(&u);
        let q = 3.0;
        let (c0, grad) = sp.lq_term(&dofs, 2.0, q).unwrap();
        assert!(c0 > 0.0);
        // central directional difference against the analytic gradient
        let mut dir = vec![0.0; dofs.len()];
        for (i, d) in dir.iter_mut().enumerate() {
            *d = ((i * 37 % 11) as f64 - 5.0) / 10.0;
        }
        dir[sp.dirichlet_dof()] = 0.0;
        let eps = 1e-6;
        let probe = |s: f64| -> f64 {
            let v: Vec<f64> = dofs.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
            sp.lq_term(&v, 2.0, q).unwrap().0
        };
        let fd = (probe(eps) - probe(-eps)) / (2.0 * eps);
        let an: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        assert_relative_eq!(fd, an, max_relative = 1e-7);
    }

    #[test]
    fn dof_round_trip() {
        let sp = space(4.0);
        let u = RadialFn::from_fn(sp.grid(), |t| (-0.5 * t * t).exp()).unwrap();
        let dofs = sp.from_radial_fn(&u);
        let back = sp.to_radial_fn(&dofs).unwrap();
        assert_eq!(u.values(), back.values());
        assert_eq!(u.derivs(), back.derivs());
    }

    #[test]
    fn shifted_form_is_spd_below_hardy() {
        let sp = space(20.0);
        // alpha = 0, lambda just under the sharp 1/4
        let a = sp.assemble_shifted(0.0, 0.2499).unwrap();
        assert!(a.is_positive_definite());
    }
}
