//! Gauss–Legendre nodes/weights and moment-fitted end-panel rules.

/// Gauss–Legendre rule of order `m` on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Accurate to a few ulp for m ≤ 64.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1 && m <= 64, "unsupported rule order {m}");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for k in 0..(m + 1) / 2 {
        // Tricomi-style initial guess
        let mut xi = (std::f64::consts::PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pair(m, xi);
            let delta = p / d;
            xi -= delta;
            if delta.abs() < 1e-15 {
                break;
            }
        }
        // polish once more and freeze the derivative at the root
        let (p, d) = legendre_pair(m, xi);
        xi -= p / d;
        let dp = legendre_pair(m, xi).1;
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[k] = -xi;
        w[k] = wi;
        x[m - 1 - k] = xi;
        w[m - 1 - k] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
        let (_, d) = legendre_pair(m, 0.0);
        w[m / 2] = 2.0 / (d * d);
    }
    (x, w)
}

// (P_m(x), P_m'(x)) via the three-term recurrence.
fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_legendre_01(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    (
        x.iter().map(|&xi| 0.5 * (xi + 1.0)).collect(),
        w.iter().map(|&wi| 0.5 * wi).collect(),
    )
}

/// Interpolatory weights against the weight `s^mu` on [0, 1] at prescribed nodes.
///
/// Returns `(indices, v)` such that `Σ v_j g(s[indices[j]])` approximates
/// `∫₀¹ s^mu g(s) ds` exactly whenever `g` is a polynomial of degree below the
/// subset size. At most 10 of the given nodes are used, spread across the
/// panel, which keeps the Vandermonde solve well conditioned.
pub fn moment_weights(nodes01: &[f64], mu: f64) -> (Vec<usize>, Vec<f64>) {
    let m = nodes01.len();
    let k = m.min(10);
    let idx: Vec<usize> = if k == m {
        (0..m).collect()
    } else {
        (0..k)
            .map(|j| (j as f64 * (m - 1) as f64 / (k - 1) as f64).round() as usize)
            .collect()
    };
    // Vandermonde system: Σ_j v_j s_j^i = 1/(mu + i + 1)
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        for (j, &id) in idx.iter().enumerate() {
            a[i * k + j] = nodes01[id].powi(i as i32);
        }
        b[i] = 1.0 / (mu + i as f64 + 1.0);
    }
    solve_dense(&mut a, &mut b);
    (idx, b)
}

/// Dense linear solve with partial pivoting; `a` is row-major n×n, `b` the rhs
/// (overwritten by the solution).
pub fn solve_dense(a: &mut [f64], b: &mut [f64]) {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        assert!(d != 0.0, "singular moment system");
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * b[c];
        }
        b[r] = s / a[r * n + r];
    }
}

/// Barycentric weights for polynomial interpolation at `nodes`.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let mut w = vec![1.0; m];
    // scale by the panel half-width to keep products in range
    let scale = 2.0 / (nodes[m - 1] - nodes[0]).max(f64::MIN_POSITIVE);
    for i in 0..m {
        let mut p = 1.0;
        for j in 0..m {
            if i != j {
                p *= (nodes[i] - nodes[j]) * scale;
            }
        }
        w[i] = 1.0 / p;
    }
    w
}

/// Differentiation matrix of the interpolating polynomial at `nodes`
/// (row i: d/dt of the interpolant at node i, as a stencil over values).
pub fn diff_matrix(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            if i != j {
                let v = w[j] / (w[i] * (nodes[i] - nodes[j]));
                d[i * m + j] = v;
                diag -= v;
            }
        }
        d[i * m + i] = diag;
    }
    d
}

/// Evaluate the interpolating polynomial (and derivative) through
/// `(nodes, values)` at `t`, barycentric second form.
pub fn interp_eval(nodes: &[f64], values: &[f64], w: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..nodes.len() {
        let dt = t - nodes[i];
        if dt == 0.0 {
            return values[i];
        }
        let c = w[i] / dt;
        num += c * values[i];
        den += c;
    }
    num / den
}
