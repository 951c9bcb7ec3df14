//! Radial functions sampled on a [`RadialGrid`].
//!
//! A `RadialFn` stores nodal values *and* nodal derivatives, plus the two
//! boundary pairs at `t = 0` and `t = t_max`. Between nodes it is the
//! piecewise-cubic Hermite interpolant of those pairs; integrals of such
//! functions are computed cell by cell, so they are exact (up to the cell
//! rule) for the interpolant itself. Nodal derivatives are taken verbatim
//! when a derivative closure is supplied, otherwise they come from
//! differentiating the quadrature-panel interpolant of the sampled values.

use std::sync::Arc;

use super::{barycentric_weights, interp_eval, RadialGrid};
use crate::error::{Error, Result};

/// Radial function on a grid: nodal values, nodal derivatives, boundary pairs.
#[derive(Debug, Clone)]
pub struct RadialFn {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    /// (value, derivative) at t = 0
    bnd0: (f64, f64),
    /// (value, derivative) at t = t_max
    bnd1: (f64, f64),
}

impl RadialFn {
    /// Samples `f` on the grid; derivatives from the panel interpolant.
    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&t| f(t)).collect();
        let mut rf = Self::from_values_impl(grid, values)?;
        rf.bnd0.0 = f(0.0);
        rf.bnd1.0 = f(grid.t_max());
        rf.check_finite()?;
        Ok(rf)
    }

    /// Samples `f` and its exact derivative `df` on the grid.
    pub fn from_fn_with_deriv(
        grid: &Arc<RadialGrid>,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        let derivs = grid.nodes().iter().map(|&t| df(t)).collect();
        let rf = RadialFn {
            grid: Arc::clone(grid),
            values,
            derivs,
            bnd0: (f(0.0), df(0.0)),
            bnd1: (f(grid.t_max()), df(grid.t_max())),
        };
        rf.check_finite()?;
        Ok(rf)
    }

    /// Wraps nodal values; derivatives and boundary pairs from the panel
    /// interpolant.
    pub fn from_values(grid: &Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        let rf = Self::from_values_impl(grid, values)?;
        rf.check_finite()?;
        Ok(rf)
    }

    /// Wraps explicit nodal and boundary data (the solver path, where the
    /// degrees of freedom are known exactly).
    pub fn from_parts(
        grid: &Arc<RadialGrid>,
        values: Vec<f64>,
        derivs: Vec<f64>,
        bnd0: (f64, f64),
        bnd1: (f64, f64),
    ) -> Result<Self> {
        if values.len() != grid.len() || derivs.len() != grid.len() {
            return Err(Error::Csv(format!(
                "value/derivative length {}/{} does not match grid ({})",
                values.len(),
                derivs.len(),
                grid.len()
            )));
        }
        let rf = RadialFn {
            grid: Arc::clone(grid),
            values,
            derivs,
            bnd0,
            bnd1,
        };
        rf.check_finite()?;
        Ok(rf)
    }

    fn from_values_impl(grid: &Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Csv(format!(
                "value count {} does not match grid node count {}",
                values.len(),
                grid.len()
            )));
        }
        let m = grid.points_per_panel();
        let mut derivs = vec![0.0; values.len()];
        for p in 0..grid.panel_count() {
            let d = grid.panel_diff(p);
            let r = grid.panel_range(p);
            let vals = &values[r.clone()];
            for i in 0..m {
                derivs[r.start + i] = (0..m).map(|j| d[i * m + j] * vals[j]).sum();
            }
        }
        // boundary pairs by evaluating the first/last panel interpolants;
        // the derivative samples are themselves a polynomial of the panel,
        // so interpolating them is exact for the interpolant
        let first = grid.panel_range(0);
        let last = grid.panel_range(grid.panel_count() - 1);
        let w_first = barycentric_weights(&grid.nodes()[first.clone()]);
        let w_last = barycentric_weights(&grid.nodes()[last.clone()]);
        let bnd0 = (
            interp_eval(&grid.nodes()[first.clone()], &values[first.clone()], &w_first, 0.0),
            interp_eval(&grid.nodes()[first.clone()], &derivs[first.clone()], &w_first, 0.0),
        );
        let t1 = grid.t_max();
        let bnd1 = (
            interp_eval(&grid.nodes()[last.clone()], &values[last.clone()], &w_last, t1),
            interp_eval(&grid.nodes()[last.clone()], &derivs[last.clone()], &w_last, t1),
        );
        Ok(RadialFn {
            grid: Arc::clone(grid),
            values,
            derivs,
            bnd0,
            bnd1,
        })
    }

    fn check_finite(&self) -> Result<()> {
        let all = self
            .values
            .iter()
            .chain(&self.derivs)
            .chain([&self.bnd0.0, &self.bnd0.1, &self.bnd1.0, &self.bnd1.1]);
        for &v in all {
            if !v.is_finite() {
                return Err(Error::Csv("non-finite sample value".into()));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Boundary pairs `((u(0), u'(0)), (u(T), u'(T)))`.
    pub fn boundary(&self) -> ((f64, f64), (f64, f64)) {
        (self.bnd0, self.bnd1)
    }

    /// Smallest nodal value.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Degrees of freedom `(value, derivative)` at cell vertex `vi`
    /// (vertex 0 is `t = 0`, vertex `n+1` is `t = t_max`).
    pub(crate) fn vertex_dof(&self, vi: usize) -> (f64, f64) {
        if vi == 0 {
            self.bnd0
        } else if vi == self.values.len() + 1 {
            self.bnd1
        } else {
            (self.values[vi - 1], self.derivs[vi - 1])
        }
    }

    /// Evaluates the function at `t ∈ [0, t_max]` through the panel
    /// interpolant of the stored samples (high order for smooth data).
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_pair(t).0
    }

    /// Derivative at `t ∈ [0, t_max]` (panel interpolant of the stored
    /// derivative samples).
    pub fn eval_deriv(&self, t: f64) -> f64 {
        self.eval_pair(t).1
    }

    /// `(u(t), u'(t))` through the panel interpolants of the stored values
    /// and derivatives.
    pub fn eval_pair(&self, t: f64) -> (f64, f64) {
        let p = self.grid.panel_of(t);
        let r = self.grid.panel_range(p);
        let nodes = &self.grid.nodes()[r.clone()];
        let w = self.grid.panel_bary(p);
        (
            interp_eval(nodes, &self.values[r.clone()], w, t),
            interp_eval(nodes, &self.derivs[r], w, t),
        )
    }

    /// Cell-based power-weighted integral
    /// `∫₀^T t^mu g(t, u(t), u'(t)) dt` over the interpolant; `mu > -1`.
    ///
    /// Exact (up to the cell rule order) for the piecewise cubic itself, with
    /// the first cell moment-fitted against the `t^mu` weight.
    pub fn integrate_power_with(
        &self,
        mu: f64,
        g: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<f64> {
        if !(mu > -1.0) {
            return Err(Error::NotIntegrable { gamma: mu, dim: 1 });
        }
        let verts = self.grid.verts();
        let mut total = 0.0;

        // first cell: moment-fitted nodes/weights against t^mu
        {
            let (va, da) = self.vertex_dof(0);
            let (vb, db) = self.vertex_dof(1);
            let h = verts[1];
            let (ts, ws) = self.grid.cell0_moment_rule(mu);
            for (&t, &w) in ts.iter().zip(&ws) {
                let (u, du) = hermite_eval(t, 0.0, h, va, da, vb, db);
                total += w * g(t, u, du);
            }
        }

        for c in 1..self.grid.cell_count() {
            let (a, b) = (verts[c], verts[c + 1]);
            let h = b - a;
            let (va, da) = self.vertex_dof(c);
            let (vb, db) = self.vertex_dof(c + 1);
            let (ts, ws) = self.grid.cell_rule(c);
            for (&t, &w) in ts.iter().zip(ws.iter()) {
                let (u, du) = hermite_eval(t, a, h, va, da, vb, db);
                total += w * t.powf(mu) * g(t, u, du);
            }
        }
        Ok(total)
    }

    /// Pointwise scaling `c·u` (exact on all stored data).
    pub fn scaled(&self, c: f64) -> RadialFn {
        RadialFn {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| c * v).collect(),
            derivs: self.derivs.iter().map(|v| c * v).collect(),
            bnd0: (c * self.bnd0.0, c * self.bnd0.1),
            bnd1: (c * self.bnd1.0, c * self.bnd1.1),
        }
    }

    /// Linear combination `c1·self + c2·other`; grids must share their nodes.
    pub fn combine(&self, c1: f64, other: &RadialFn, c2: f64) -> Result<RadialFn> {
        if self.len() != other.len()
            || self
                .grid
                .nodes()
                .iter()
                .zip(other.grid.nodes())
                .any(|(a, b)| a != b)
        {
            return Err(Error::Csv("grids differ in a linear combination".into()));
        }
        let comb = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(a, b)| c1 * a + c2 * b).collect()
        };
        Ok(RadialFn {
            grid: Arc::clone(&self.grid),
            values: comb(&self.values, &other.values),
            derivs: comb(&self.derivs, &other.derivs),
            bnd0: (
                c1 * self.bnd0.0 + c2 * other.bnd0.0,
                c1 * self.bnd0.1 + c2 * other.bnd0.1,
            ),
            bnd1: (
                c1 * self.bnd1.0 + c2 * other.bnd1.0,
                c1 * self.bnd1.1 + c2 * other.bnd1.1,
            ),
        })
    }

    /// Writes the profile as CSV (`t,u`).
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema=1")?;
        writeln!(out, "t,u")?;
        for (t, u) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(out, "{t},{u}")?;
        }
        Ok(())
    }

    /// Reads a `t,u` CSV written for the same grid layout.
    pub fn read_csv<R: std::io::BufRead>(grid: &Arc<RadialGrid>, input: R) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut saw_header = false;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "t,u" {
                    return Err(Error::Csv(format!("expected header 't,u', got '{line}'")));
                }
                saw_header = true;
                continue;
            }
            let mut parts = line.split(',');
            let (ts, us) = (
                parts.next().ok_or_else(|| Error::Csv("missing t".into()))?,
                parts.next().ok_or_else(|| Error::Csv("missing u".into()))?,
            );
            let t: f64 = ts
                .trim()
                .parse()
                .map_err(|e| Error::Csv(format!("bad t '{ts}': {e}")))?;
            let u: f64 = us
                .trim()
                .parse()
                .map_err(|e| Error::Csv(format!("bad u '{us}': {e}")))?;
            let i = values.len();
            if i >= grid.len() {
                return Err(Error::Csv("more rows than grid nodes".into()));
            }
            let expect = grid.nodes()[i];
            if (t - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
                return Err(Error::Csv(format!(
                    "node mismatch at row {i}: file {t}, grid {expect}"
                )));
            }
            values.push(u);
        }
        Self::from_values(grid, values)
    }
}

/// Cubic Hermite evaluation on the cell `[a, a+h]`.
#[inline]
fn hermite_eval(t: f64, a: f64, h: f64, va: f64, da: f64, vb: f64, db: f64) -> (f64, f64) {
    if h <= 0.0 {
        return (va, da);
    }
    let x = (t - a) / h;
    let x2 = x * x;
    let x3 = x2 * x;
    let u = va * (1.0 - 3.0 * x2 + 2.0 * x3)
        + da * h * (x - 2.0 * x2 + x3)
        + vb * (3.0 * x2 - 2.0 * x3)
        + db * h * (x3 - x2);
    let du = va * (6.0 * x2 - 6.0 * x) / h
        + da * (1.0 - 4.0 * x + 3.0 * x2)
        + vb * (6.0 * x - 6.0 * x2) / h
        + db * (3.0 * x2 - 2.0 * x);
    (u, du)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_grid, Grading};
    use approx::assert_relative_eq;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(build_grid(256, 6.0, Grading::default()).unwrap())
    }

    #[test]
    fn sampled_derivatives_match_analytic() {
        // panel differentiation of sampled data: spectral in the panel order,
        // a few 1e-7 on unit-width panels at the default order
        let g = grid();
        let u = RadialFn::from_fn(&g, |t| (-2.0 * t).exp()).unwrap();
        for (i, &t) in g.nodes().iter().enumerate() {
            let exact = -2.0 * (-2.0 * t).exp();
            assert_relative_eq!(u.derivs()[i], exact, max_relative = 1e-4);
        }
        let ((v0, d0), (v1, _)) = u.boundary();
        assert_relative_eq!(v0, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d0, -2.0, max_relative = 1e-6);
        assert_relative_eq!(v1, (-12.0_f64).exp(), max_relative = 1e-6);

        // doubling the panel order sharpens the sampled derivatives; the
        // microscopic head panel is excluded (differencing values 1e-8 apart
        // leaves ~1e-7 of roundoff there, harmless under its tiny measure)
        let fine = Arc::new(build_grid(600, 6.0, Grading::default()).unwrap());
        let uf = RadialFn::from_fn(&fine, |t| (-2.0 * t).exp()).unwrap();
        for (i, &t) in fine.nodes().iter().enumerate() {
            if t < 1e-2 {
                continue;
            }
            let exact = -2.0 * (-2.0 * t).exp();
            assert_relative_eq!(uf.derivs()[i], exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn hermite_eval_between_nodes() {
        // cubic order between nodes: value O(h^4), derivative O(h^3)
        let g = grid();
        let u = RadialFn::from_fn_with_deriv(&g, |t| t * (-t).exp(), |t| (1.0 - t) * (-t).exp())
            .unwrap();
        for &t in &[0.013, 0.4, 1.7, 5.9] {
            assert_relative_eq!(u.eval(t), t * (-t).exp(), max_relative = 1e-4);
            assert_relative_eq!(
                u.eval_deriv(t),
                (1.0 - t) * (-t).exp(),
                max_relative = 1e-3,
                epsilon = 1e-6
            );
        }
        // exact at the nodes themselves
        for (i, &t) in g.nodes().iter().enumerate().step_by(17) {
            assert_eq!(u.eval(t), u.values()[i]);
        }
    }

    #[test]
    fn cell_integration_matches_panel_integration() {
        let g = grid();
        // a cubic is reproduced exactly by the interpolant: both quadrature
        // paths must agree to rounding
        let cubic = RadialFn::from_fn_with_deriv(
            &g,
            |t| 1.0 + t - 2.0 * t * t + 0.5 * t * t * t,
            |t| 1.0 - 4.0 * t + 1.5 * t * t,
        )
        .unwrap();
        let cell = cubic.integrate_power_with(0.5, |t, v, _| v * t).unwrap();
        let panel = g
            .integrate_power(0.5, |t| (1.0 + t - 2.0 * t * t + 0.5 * t * t * t) * t)
            .unwrap();
        assert_relative_eq!(cell, panel, max_relative = 1e-12);

        // smooth non-polynomial data: agreement at interpolation order
        let u = RadialFn::from_fn_with_deriv(&g, |t| (-2.0 * t).exp(), |t| -2.0 * (-2.0 * t).exp())
            .unwrap();
        let cell = u.integrate_power_with(0.5, |_, v, _| v * v).unwrap();
        let panel = g.integrate_power(0.5, |t| (-4.0 * t).exp()).unwrap();
        assert_relative_eq!(cell, panel, max_relative = 1e-4);
        let cell_s = u.integrate_power_with(-0.9, |_, v, _| v * v).unwrap();
        let panel_s = g.integrate_power(-0.9, |t| (-4.0 * t).exp()).unwrap();
        assert_relative_eq!(cell_s, panel_s, max_relative = 1e-4);
    }

    #[test]
    fn scaling_is_exact() {
        let g = grid();
        let u = RadialFn::from_fn(&g, |t| (1.0 + t).recip()).unwrap();
        let v = u.scaled(2.0);
        for i in 0..u.len() {
            assert_eq!(v.values()[i], 2.0 * u.values()[i]);
            assert_eq!(v.derivs()[i], 2.0 * u.derivs()[i]);
        }
        let w = u.combine(1.0, &v, -0.5).unwrap();
        for i in 0..u.len() {
            assert_eq!(w.values()[i], 0.0);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = grid();
        let u = RadialFn::from_fn(&g, |t| (-t).exp()).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = RadialFn::read_csv(&g, std::io::Cursor::new(&buf)).unwrap();
        for i in 0..u.len() {
            assert_eq!(u.values()[i], back.values()[i]);
        }
        // header enforcement
        let bad = b"x,y\n1,2\n";
        assert!(RadialFn::read_csv(&g, std::io::Cursor::new(&bad[..])).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let g = grid();
        let mut vals = vec![0.0; g.len()];
        vals[3] = f64::NAN;
        assert!(RadialFn::from_values(&g, vals).is_err());
    }
}
