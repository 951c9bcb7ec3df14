//! Problem parameter bundle and per-mode admissibility validation.

use serde::Serialize;

use crate::geometry::{critical_exponent, hardy_constant};

/// Full parameter bundle: dimension, weight exponents, Hardy coefficient and
/// the exponents of the three problem families (solve / CKN / Pohozaev).
///
/// Unused exponents stay `None`; [`Params::validate`] checks only the
/// constraints relevant to the requested mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    /// Dimension `N ≥ 3`.
    pub n: u32,
    /// Gradient-weight exponent `α`.
    pub alpha: f64,
    /// Nonlinearity-weight exponent `β`.
    pub beta: f64,
    /// Hardy coefficient `λ`.
    pub lambda: f64,
    /// Subcritical exponent `q` of the ground-state problem.
    pub q: Option<f64>,
    /// Exponent `p` of the Dirichlet/Pohozaev problem.
    pub p: Option<f64>,
    /// First CKN parameter `a`.
    pub a: Option<f64>,
    /// Second CKN parameter `b`.
    pub b: Option<f64>,
}

/// Which family of constraints to validate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ckn,
    Solve,
    Pohozaev,
}

/// A violated admissibility constraint. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Stable name of the constraint, e.g. `"q in (2, crit)"`.
    pub constraint: String,
    /// Human-readable explanation with the offending values.
    pub message: String,
}

impl Violation {
    fn new(constraint: &str, message: String) -> Self {
        Violation {
            constraint: constraint.to_string(),
            message,
        }
    }
}

impl Params {
    /// Parameters for the ground-state problem.
    pub fn solve(n: u32, alpha: f64, beta: f64, lambda: f64, q: f64) -> Self {
        Params {
            n,
            alpha,
            beta,
            lambda,
            q: Some(q),
            p: None,
            a: None,
            b: None,
        }
    }

    /// Parameters for CKN quotient work; `p` is derived from `(a, b)`.
    pub fn ckn(n: u32, a: f64, b: f64) -> Self {
        let p = 2.0 * n as f64 / (n as f64 - 2.0 + 2.0 * (b - a));
        Params {
            n,
            // the CKN weights in exponent form
            alpha: -2.0 * a,
            beta: -b * p,
            lambda: 0.0,
            q: None,
            p: Some(p),
            a: Some(a),
            b: Some(b),
        }
    }

    /// Parameters for the Dirichlet/Pohozaev problem (no Hardy term).
    pub fn pohozaev(n: u32, alpha: f64, beta: f64, p: f64) -> Self {
        Params {
            n,
            alpha,
            beta,
            lambda: 0.0,
            q: None,
            p: Some(p),
            a: None,
            b: None,
        }
    }

    /// Critical exponent `2(N+β)/(N-2+α)` for the stored weights.
    pub fn crit(&self) -> Option<f64> {
        critical_exponent(self.n, self.alpha, self.beta).ok()
    }

    /// Sharp Hardy constant `((N-2+α)/2)²` for the stored `α`.
    pub fn hardy(&self) -> f64 {
        hardy_constant(self.n, self.alpha)
    }

    /// The CKN exponent `p = 2N/(N-2+2(b-a))`, when `a` and `b` are set.
    pub fn ckn_p(&self) -> Option<f64> {
        let (a, b) = (self.a?, self.b?);
        Some(2.0 * self.n as f64 / (self.n as f64 - 2.0 + 2.0 * (b - a)))
    }

    /// Sobolev-critical exponent `2N/(N-2)`.
    pub fn sobolev_crit(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }

    /// Hypotheses of the pointwise Laplacian positivity bound: `N ≥ α-1`, `β > -N`.
    pub fn laplacian_hypothesis_ok(&self) -> bool {
        self.n as f64 >= self.alpha - 1.0 && self.beta > -(self.n as f64)
    }

    /// Checks every constraint of the given mode; empty means admissible.
    pub fn validate(&self, mode: Mode) -> Vec<Violation> {
        let mut v = Vec::new();
        let nf = self.n as f64;
        if self.n < 3 {
            v.push(Violation::new("N >= 3", format!("N = {}", self.n)));
        }
        match mode {
            Mode::Solve | Mode::Pohozaev => {
                if !(self.alpha - 2.0 > -nf) {
                    v.push(Violation::new(
                        "alpha - 2 > -N",
                        format!("alpha = {}, N = {}", self.alpha, self.n),
                    ));
                }
                if mode == Mode::Solve {
                    // strict inequality: at beta = alpha-2 the admissible
                    // q-interval (2, crit) is empty
                    if !(self.beta > self.alpha - 2.0) {
                        v.push(Violation::new(
                            "beta > alpha - 2",
                            format!("beta = {}, alpha - 2 = {}", self.beta, self.alpha - 2.0),
                        ));
                    }
                    if !(self.lambda < self.hardy()) {
                        v.push(Violation::new(
                            "lambda < hardy_constant",
                            format!("lambda = {}, hardy = {}", self.lambda, self.hardy()),
                        ));
                    }
                    match self.q {
                        None => v.push(Violation::new("q present", "q missing".into())),
                        Some(q) => {
                            let crit = self.crit().unwrap_or(2.0);
                            if !(q > 2.0 && q < crit) {
                                v.push(Violation::new(
                                    "q in (2, crit)",
                                    format!("q = {q}, crit = {crit}"),
                                ));
                            }
                        }
                    }
                } else {
                    if !(self.beta >= self.alpha - 2.0) {
                        v.push(Violation::new(
                            "alpha - 2 <= beta",
                            format!("beta = {}, alpha - 2 = {}", self.beta, self.alpha - 2.0),
                        ));
                    }
                    match self.p {
                        None => v.push(Violation::new("p present", "p missing".into())),
                        Some(p) => {
                            if !(p > 2.0) {
                                v.push(Violation::new("p > 2", format!("p = {p}")));
                            }
                        }
                    }
                }
            }
            Mode::Ckn => {
                let (a, b) = match (self.a, self.b) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        v.push(Violation::new("a,b present", "a or b missing".into()));
                        return v;
                    }
                };
                if !(a < (nf - 2.0) / 2.0) {
                    v.push(Violation::new(
                        "a < (N-2)/2",
                        format!("a = {a}, (N-2)/2 = {}", (nf - 2.0) / 2.0),
                    ));
                }
                if !(b - a >= 0.0) {
                    v.push(Violation::new("0 <= b - a", format!("b - a = {}", b - a)));
                }
                if !(b - a <= 1.0) {
                    v.push(Violation::new("b - a <= 1", format!("b - a = {}", b - a)));
                }
                if let (Some(p), Some(pd)) = (self.p, self.ckn_p()) {
                    if (p - pd).abs() > 1e-10 * pd.abs() {
                        v.push(Violation::new(
                            "p = 2N/(N-2+2(b-a))",
                            format!("p = {p}, derived = {pd}"),
                        ));
                    }
                }
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_solve_ok() {
        let p = Params::solve(3, 0.0, 0.0, 0.0, 4.0);
        assert!(p.validate(Mode::Solve).is_empty());
        assert_eq!(p.crit(), Some(6.0));
    }

    #[test]
    fn solve_rejects_empty_q_interval() {
        // beta = alpha - 2 is fine for CKN but leaves no admissible q
        let p = Params::solve(3, 0.0, -2.0, 0.0, 2.1);
        let v = p.validate(Mode::Solve);
        assert!(v.iter().any(|x| x.constraint == "beta > alpha - 2"));
    }

    #[test]
    fn ckn_rejects_large_gap() {
        let p = Params::ckn(3, 0.0, 2.0);
        let v = p.validate(Mode::Ckn);
        assert!(v.iter().any(|x| x.constraint == "b - a <= 1"));
    }

    #[test]
    fn ckn_exponent_derivation() {
        let p = Params::ckn(3, 0.0, 1.0);
        assert_eq!(p.ckn_p(), Some(2.0));
        assert_eq!(p.alpha, 0.0);
        assert_eq!(p.beta, -2.0);
        let s = Params::ckn(3, 0.0, 0.0);
        assert_eq!(s.ckn_p(), Some(6.0));
    }

    #[test]
    fn q_interval_boundary() {
        let p = Params::solve(3, 1.0, 0.5, 0.5, 3.5); // crit = 3.5 exactly
        let v = p.validate(Mode::Solve);
        assert!(v.iter().any(|x| x.constraint == "q in (2, crit)"));
        let ok = Params::solve(3, 1.0, 0.5, 0.5, 2.5);
        assert!(ok.validate(Mode::Solve).is_empty());
    }

    #[test]
    fn lambda_threshold() {
        let p = Params::solve(3, 0.0, 0.0, 0.25, 4.0);
        let v = p.validate(Mode::Solve);
        assert!(v.iter().any(|x| x.constraint == "lambda < hardy_constant"));
    }

    #[test]
    fn pohozaev_allows_equality() {
        let p = Params::pohozaev(3, 0.0, -2.0, 7.0);
        assert!(p.validate(Mode::Pohozaev).is_empty());
        assert!(p.laplacian_hypothesis_ok());
        let bad = Params::pohozaev(3, 5.0, 0.0, 7.0);
        assert!(!bad.laplacian_hypothesis_ok());
    }
}
