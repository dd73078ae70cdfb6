//! Ornstein-Uhlenbeck `T_t` and Poisson-Hermite `P_t` semigroups.
//!
//! Two independent paths:
//! * on [`HermiteExpansion`]s, coefficients are multiplied by `e^{−t|ν|}` or
//!   `(−√|ν|)ᵏ e^{−t√|ν|}`;
//! * on general callables, `T_t` is the Mehler integral and `P_t` the subordination
//!   integral `∫ T_s f(x) g(t, s) ds`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;
use crate::quadrature::{log_spaced, pairwise_sum, GaussianRule};
use crate::stable;

/// Gauss-Hermite nodes per axis used by the kernel path unless a rule is supplied.
pub const DEFAULT_KERNEL_NODES: usize = 20;

/// Relative tolerance of the outer subordination integral.
pub const SUBORDINATION_REL_TOL: f64 = 1e-10;

/// 60 log-spaced points on `[1e−3, 50]`.
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(1e-3, 50.0, 60)
}

fn check_time(t: f64, k: u32) -> Result<()> {
    if !t.is_finite() || t < 0.0 || (k >= 1 && t == 0.0) {
        return Err(Error::invalid(format!(
            "time t = {t} invalid for derivative order {k}"
        )));
    }
    Ok(())
}

/// `c_ν ↦ e^{−t|ν|} c_ν`.
pub fn ou_apply(f: &HermiteExpansion, t: f64) -> Result<HermiteExpansion> {
    check_time(t, 0)?;
    Ok(f.map_by_order(|m| (-t * m as f64).exp()))
}

/// Eigenvalue of `∂ᵏ P_t` on level `m`: `(−√m)ᵏ e^{−t√m}`.
pub fn ph_factor(m: u32, t: f64, k: u32) -> f64 {
    let r = (m as f64).sqrt();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * r.powi(k as i32) * (-t * r).exp()
}

/// `∂ᵏ P_t f / ∂tᵏ` on the coefficients.
pub fn ph_derivative(f: &HermiteExpansion, t: f64, k: u32) -> Result<HermiteExpansion> {
    check_time(t, k)?;
    Ok(f.map_by_order(|m| ph_factor(m, t, k)))
}

pub fn ph_apply(f: &HermiteExpansion, t: f64) -> Result<HermiteExpansion> {
    ph_derivative(f, t, 0)
}

/// Mehler integral `T_t f(x) = ∫ M_t(x, y) f(y) dγ_d(y)`.
///
/// The kernel concentrates near `m = e^{−t}x` with width `√ε`, `ε = 1 − e^{−2t}`, so the
/// rule's nodes are moved to `y = m + √ε z`. Each node weight is corrected by the ratio of
/// kernel times Gaussian density to the density of the moved rule; all three are evaluated
/// in log form, the kernel exponent as `−|e^{−t}x − y|²/ε + |y|²` with `ε` from `expm1`.
pub fn ou_apply_kernel(
    f: impl Fn(&[f64]) -> f64,
    t: f64,
    x: &[f64],
    rule: &GaussianRule,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("kernel path needs t > 0, got {t}")));
    }
    let d = rule.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    Ok(kernel_unchecked(&f, t, x, rule))
}

fn kernel_unchecked(f: &impl Fn(&[f64]) -> f64, t: f64, x: &[f64], rule: &GaussianRule) -> f64 {
    let d = rule.dim();
    let decay = (-t).exp();
    let eps = -(-2.0 * t).exp_m1();
    let root = eps.sqrt();
    let half_d_ln_eps = 0.5 * d as f64 * eps.ln();
    let mut y = vec![0.0; d];
    let mut terms = Vec::with_capacity(rule.len());
    for (z, &w) in rule.points().zip(rule.weights()) {
        let mut dist2 = 0.0;
        let mut y2 = 0.0;
        for a in 0..d {
            let m = decay * x[a];
            y[a] = m + root * z[a];
            let diff = m - y[a];
            dist2 += diff * diff;
            y2 += y[a] * y[a];
        }
        // Common factors π^{−d/2} cancel between the Gaussian and the moved-rule density.
        let ln_kernel = -dist2 / eps + y2 - half_d_ln_eps;
        let ln_gauss = -y2;
        let ln_moved = -dist2 / eps - half_d_ln_eps;
        let correction = (ln_kernel + ln_gauss - ln_moved).exp();
        terms.push(w * correction * f(&y));
    }
    pairwise_sum(&terms)
}

/// `P_t f(x) = ∫ T_s f(x) g(t, s) ds` with `T_s` from the Mehler integral.
pub fn ph_apply_subordination(
    f: impl Fn(&[f64]) -> f64,
    t: f64,
    x: &[f64],
    rule: &GaussianRule,
) -> Result<f64> {
    ph_derivative_subordination(f, t, 0, x, rule)
}

/// `∂ᵏ P_t f(x) = ∫ T_s f(x) ∂ᵏg/∂tᵏ(t, s) ds`.
pub fn ph_derivative_subordination(
    f: impl Fn(&[f64]) -> f64,
    t: f64,
    k: u32,
    x: &[f64],
    rule: &GaussianRule,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!(
            "subordination path needs t > 0, got {t}"
        )));
    }
    if x.len() != rule.dim() {
        return Err(Error::DimensionMismatch {
            expected: rule.dim(),
            got: x.len(),
        });
    }
    let inner = |s: f64| kernel_unchecked(&f, s, x, rule);
    let res = if k == 0 {
        stable::integrate_against_density(t, inner, SUBORDINATION_REL_TOL)?
    } else {
        stable::integrate_against_derivative(k, t, inner, SUBORDINATION_REL_TOL)?
    };
    Ok(res.value)
}

/// Grid supremum `max_t |T_t f(x)|`, a lower bound for `T*f(x)`.
pub fn ou_maximal(f: &HermiteExpansion, x: &[f64], t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::Empty("time grid"));
    }
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let levels = level_values_at(f, x);
    let mut best = 0.0f64;
    for &t in t_grid {
        check_time(t, 0)?;
        let v: f64 = levels.iter().map(|&(m, h)| (-t * m as f64).exp() * h).sum();
        best = best.max(v.abs());
    }
    Ok(best)
}

/// `Σ_{|ν|=m} c_ν h_ν(x)` for every populated level `m`.
fn level_values_at(f: &HermiteExpansion, x: &[f64]) -> Vec<(u32, f64)> {
    let mut out: Vec<(u32, f64)> = Vec::new();
    for (nu, c) in f.terms() {
        let v = c * crate::hermite::hermite_multi(nu, x).expect("dimension checked by caller");
        match out.iter_mut().find(|(m, _)| *m == nu.order()) {
            Some(slot) => slot.1 += v,
            None => out.push((nu.order(), v)),
        }
    }
    out
}

/// `∂ᵏ P_t f(x)` from the expansion.
pub fn ph_derivative_at(f: &HermiteExpansion, t: f64, k: u32, x: &[f64]) -> Result<f64> {
    check_time(t, k)?;
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    Ok(level_values_at(f, x)
        .iter()
        .map(|&(m, h)| ph_factor(m, t, k) * h)
        .sum())
}

/// `sup_t tᵏ |∂ᵏ P_t f(x)| / T*f(x)` over the grid.
pub fn ph_derivative_bound_check(
    f: &HermiteExpansion,
    x: &[f64],
    k: u32,
    t_grid: &[f64],
) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("derivative order must be ≥ 1"));
    }
    let maximal = ou_maximal(f, x, t_grid)?;
    let levels = level_values_at(f, x);
    let mut sup = 0.0f64;
    for &t in t_grid {
        check_time(t, k)?;
        let v: f64 = levels.iter().map(|&(m, h)| ph_factor(m, t, k) * h).sum();
        sup = sup.max(t.powi(k as i32) * v.abs());
    }
    if sup == 0.0 {
        return Ok(0.0);
    }
    if maximal == 0.0 {
        return Err(Error::Degenerate(
            "maximal function vanishes while the derivative does not".into(),
        ));
    }
    Ok(sup / maximal)
}

/// Which computation path a [`SemigroupQuery`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Expansion,
    Kernel,
}

/// A request for `∂ᵏ P_t f(x)` (or `T_t f(x)` when `ou` is set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupQuery {
    pub t: f64,
    pub k: u32,
    pub path: Path,
    #[serde(default)]
    pub ou: bool,
}

impl SemigroupQuery {
    pub fn evaluate(&self, f: &HermiteExpansion, x: &[f64], rule: &GaussianRule) -> Result<f64> {
        check_time(self.t, self.k)?;
        if self.ou && self.k > 0 {
            return Err(Error::invalid(
                "time derivatives are only exposed for the Poisson-Hermite semigroup",
            ));
        }
        match (self.path, self.ou) {
            (Path::Expansion, true) => ou_apply(f, self.t)?.eval(x),
            (Path::Expansion, false) => ph_derivative_at(f, self.t, self.k, x),
            (Path::Kernel, true) => ou_apply_kernel(|y| f.eval_unchecked(y), self.t, x, rule),
            (Path::Kernel, false) => {
                ph_derivative_subordination(|y| f.eval_unchecked(y), self.t, self.k, x, rule)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{hermite_1d, hermite_multi, MultiIndex};

    fn h(n: u32) -> HermiteExpansion {
        HermiteExpansion::basis(MultiIndex::single(n))
    }

    #[test]
    fn ou_expansion_examples() {
        let f = ou_apply(&h(2), 0.5).unwrap();
        assert!((f.coeff(&MultiIndex::single(2)) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(ou_apply(&h(3), 0.0).unwrap(), h(3));
        assert_eq!(ou_apply(&h(0), 7.0).unwrap(), h(0));
        assert!(ou_apply(&h(1), -1.0).is_err());
    }

    #[test]
    fn ph_expansion_examples() {
        let f = ph_derivative(&h(1), 1.0, 0).unwrap();
        assert!((f.coeff(&MultiIndex::single(1)) - (-1.0f64).exp()).abs() < 1e-15);
        let f = ph_derivative(&h(4), 0.5, 1).unwrap();
        assert!((f.coeff(&MultiIndex::single(4)) + 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!(ph_derivative(&h(0), 1.0, 2).unwrap().is_zero());
        assert!(ph_derivative(&h(1), 0.0, 1).is_err());
    }

    #[test]
    fn kernel_examples() {
        let rule = GaussianRule::new(1, DEFAULT_KERNEL_NODES).unwrap();
        let v = ou_apply_kernel(|y| hermite_1d(2, y[0]), 0.5, &[1.0], &rule).unwrap();
        assert!((v - 0.260_130).abs() < 1e-6);
        assert!((v - (-1.0f64).exp() * hermite_1d(2, 1.0)).abs() < 1e-13);
        for t in [1e-6, 0.3, 5.0] {
            let one = ou_apply_kernel(|_| 1.0, t, &[2.5], &rule).unwrap();
            assert!((one - 1.0).abs() < 1e-13);
        }
        let far = ou_apply_kernel(|y| hermite_1d(2, y[0]), 20.0, &[0.0], &rule).unwrap();
        assert!(far.abs() < 1e-16);
        assert!(ou_apply_kernel(|_| 1.0, 0.0, &[0.0], &rule).is_err());
        assert!(ou_apply_kernel(|_| 1.0, 1.0, &[0.0, 1.0], &rule).is_err());
    }

    #[test]
    fn kernel_eigenrelation_d2() {
        let rule = GaussianRule::new(2, 12).unwrap();
        for nu in MultiIndex::all_up_to(2, 6) {
            for t in [0.1, 0.5, 1.0, 2.0] {
                for x in [[0.3, -1.2], [1.5, 0.7], [-2.0, 0.0]] {
                    let v =
                        ou_apply_kernel(|y| hermite_multi(&nu, y).unwrap(), t, &x, &rule).unwrap();
                    let hx = hermite_multi(&nu, &x).unwrap();
                    let expected = (-t * nu.order() as f64).exp() * hx;
                    assert!(
                        (v - expected).abs() <= 1e-10 * (1.0 + hx.abs()),
                        "{nu} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn subordination_examples() {
        let rule = GaussianRule::new(1, 16).unwrap();
        let v = ph_apply_subordination(|y| hermite_1d(1, y[0]), 1.0, &[1.0], &rule).unwrap();
        assert!((v - (-1.0f64).exp() * 2f64.sqrt()).abs() < 1e-9);
        assert!((v - 0.520_260).abs() < 1e-6);
        let one = ph_apply_subordination(|_| 1.0, 0.7, &[0.4], &rule).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
        let v = ph_apply_subordination(|y| hermite_1d(4, y[0]), 2.0, &[0.3], &rule).unwrap();
        let expected = (-4.0f64).exp() * hermite_1d(4, 0.3);
        assert!(((v - expected) / expected).abs() < 1e-7);
    }

    #[test]
    fn subordination_derivatives_match_expansion() {
        let rule = GaussianRule::new(1, 16).unwrap();
        let f = HermiteExpansion::from_terms(
            1,
            [(MultiIndex::single(1), 0.5), (MultiIndex::single(4), -1.0)],
        )
        .unwrap();
        for k in 1..=3 {
            let a = ph_derivative_subordination(|y| f.eval_unchecked(y), 0.8, k, &[0.6], &rule)
                .unwrap();
            let b = ph_derivative_at(&f, 0.8, k, &[0.6]).unwrap();
            assert!(((a - b) / b).abs() < 1e-7, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn semigroup_law() {
        let f = HermiteExpansion::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 2]).unwrap(), 0.3),
                (MultiIndex::new(vec![0, 4]).unwrap(), -2.0),
            ],
        )
        .unwrap();
        let a = ou_apply(&ou_apply(&f, 0.25).unwrap(), 0.5).unwrap();
        let b = ou_apply(&f, 0.75).unwrap();
        for (nu, c) in b.terms() {
            assert!((a.coeff(nu) - c).abs() <= 1e-15 * c.abs());
        }
        let a = ph_apply(&ph_apply(&f, 0.25).unwrap(), 0.5).unwrap();
        let b = ph_apply(&f, 0.75).unwrap();
        for (nu, c) in b.terms() {
            assert!((a.coeff(nu) - c).abs() <= 1e-15 * c.abs());
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = HermiteExpansion::from_terms(
            1,
            [(MultiIndex::single(2), 1.0), (MultiIndex::single(5), 0.4)],
        )
        .unwrap();
        let x = [0.9];
        let p = |t: f64| ph_derivative_at(&f, t, 0, &x).unwrap();
        let h = 1e-3;
        for t in [0.5, 1.0, 2.0] {
            let d1 = (p(t + h) - p(t - h)) / (2.0 * h);
            let d2 = (p(t + h) - 2.0 * p(t) + p(t - h)) / (h * h);
            let d3 = (p(t + 2.0 * h) - 2.0 * p(t + h) + 2.0 * p(t - h) - p(t - 2.0 * h))
                / (2.0 * h * h * h);
            for (k, fd) in [(1, d1), (2, d2), (3, d3)] {
                let exact = ph_derivative_at(&f, t, k, &x).unwrap();
                assert!(((fd - exact) / exact).abs() < 1e-4, "k={k} t={t}");
            }
        }
    }

    #[test]
    fn maximal_examples() {
        let grid = default_t_grid();
        assert_eq!(grid.len(), 60);
        assert!((ou_maximal(&h(0), &[0.3], &grid).unwrap() - 1.0).abs() < 1e-15);
        let v = ou_maximal(&h(2), &[0.0], &grid).unwrap();
        assert!(v <= 0.5f64.sqrt() && v > 0.5f64.sqrt() * (-2e-3f64).exp() - 1e-15);
        assert!(ou_maximal(&h(2), &[0.0], &[]).is_err());

        let f = HermiteExpansion::from_terms(
            1,
            [(MultiIndex::single(1), 1.0), (MultiIndex::single(2), 1.0)],
        )
        .unwrap();
        let fx = f.eval(&[1.0]).unwrap().abs();
        let coarse = ou_maximal(&f, &[1.0], &log_spaced(1e-2, 50.0, 30)).unwrap();
        let fine = ou_maximal(&f, &[1.0], &log_spaced(1e-6, 50.0, 120)).unwrap();
        assert!(fine >= coarse && fx - fine < 1e-5);
    }

    #[test]
    fn derivative_bound_examples() {
        let grid = log_spaced(1e-9, 50.0, 4000);
        assert_eq!(
            ph_derivative_bound_check(&h(0), &[0.5], 1, &grid).unwrap(),
            0.0
        );
        // x = 1/√2 gives h₁(x) = 1 and T*h₁(x) = 1.
        let x = [0.5f64.sqrt()];
        let c = ph_derivative_bound_check(&h(1), &x, 1, &grid).unwrap();
        assert!((c - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn decay_to_zero() {
        let f = HermiteExpansion::from_terms(
            1,
            [(MultiIndex::single(1), 1.0), (MultiIndex::single(3), -0.5)],
        )
        .unwrap();
        for k in 0..3 {
            let tails: Vec<f64> = [1.0, 5.0, 25.0]
                .iter()
                .map(|&t0| {
                    log_spaced(t0, 200.0, 40)
                        .iter()
                        .map(|&t| ph_derivative(&f, t, k).unwrap().l2_norm())
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(tails[0] > tails[1] && tails[1] > tails[2] && tails[2] < 1e-9);
        }
    }

    #[test]
    fn query_paths_agree() {
        let rule = GaussianRule::new(1, 16).unwrap();
        let f = HermiteExpansion::from_terms(1, [(MultiIndex::single(3), 1.0)]).unwrap();
        for ou in [true, false] {
            let a = SemigroupQuery {
                t: 0.7,
                k: 0,
                path: Path::Expansion,
                ou,
            }
            .evaluate(&f, &[0.2], &rule)
            .unwrap();
            let b = SemigroupQuery {
                t: 0.7,
                k: 0,
                path: Path::Kernel,
                ou,
            }
            .evaluate(&f, &[0.2], &rule)
            .unwrap();
            assert!(((a - b) / a).abs() < 1e-8);
        }
        assert!(SemigroupQuery {
            t: 0.0,
            k: 1,
            path: Path::Expansion,
            ou: false
        }
        .evaluate(&f, &[0.2], &rule)
        .is_err());
    }
}
