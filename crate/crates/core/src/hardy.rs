//! Hardy-type operators on `(0, ∞)` and the weighted inequalities
//!
//! ```text
//! ‖t^{−r} ∫₀ᵗ g‖_{q(·),dt/t} ≤ C ‖y^{1−r} g‖_{q(·),dt/t}
//! ‖t^{r} ∫ₜ^∞ g‖_{q(·),dt/t} ≤ C ‖y^{1+r} g‖_{q(·),dt/t}
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::lebesgue::{rel_change, DiscreteMeasure, LpSpace};
use crate::quadrature::{
    integrate_adaptive, AdaptiveOptions, GaussLegendre, GridMeta, LogTimeGrid,
};

/// Extra log-length integrated beyond an endpoint for improper pieces.
const IMPROPER_SPAN: f64 = 60.0;

/// A function on `(0, ∞)` with the points where it may jump.
#[derive(Clone)]
pub struct HalfLineFunction {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfLineFunction")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl HalfLineFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Vec<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            breakpoints,
        }
    }

    /// `χ_{[a,b]}`.
    pub fn indicator(a: f64, b: f64) -> Self {
        Self::new(
            format!("chi[{a},{b}]"),
            move |y| if y >= a && y <= b { 1.0 } else { 0.0 },
            vec![a, b],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    /// `y ↦ g(c y)`.
    pub fn dilated(&self, c: f64) -> Self {
        let f = self.f.clone();
        Self {
            name: format!("{}(·{c})", self.name),
            f: Arc::new(move |y| f(c * y)),
            breakpoints: self.breakpoints.iter().map(|b| b / c).collect(),
        }
    }
}

fn opts() -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_segments: 4000,
        initial_segments: 16,
    }
}

fn u_breaks(g: &HalfLineFunction) -> Vec<f64> {
    g.breakpoints
        .iter()
        .filter(|b| **b > 0.0)
        .map(|b| b.ln())
        .collect()
}

/// `∫ g(eᵘ) eᵘ du` over `[u0, u0 ± 60]` with a check that the far half is negligible.
fn improper(g: &HalfLineFunction, u0: f64, toward_zero: bool) -> Result<f64> {
    let breaks = u_breaks(g);
    let integrand = |u: f64| {
        let y = u.exp();
        g.eval(y) * y
    };
    let (near, far) = if toward_zero {
        (
            (u0 - IMPROPER_SPAN / 2.0, u0),
            (u0 - IMPROPER_SPAN, u0 - IMPROPER_SPAN / 2.0),
        )
    } else {
        (
            (u0, u0 + IMPROPER_SPAN / 2.0),
            (u0 + IMPROPER_SPAN / 2.0, u0 + IMPROPER_SPAN),
        )
    };
    let a = integrate_adaptive(integrand, near.0, near.1, &breaks, opts())?.value;
    let b = integrate_adaptive(integrand, far.0, far.1, &breaks, opts())?.value;
    let total = a + b;
    if b.abs() > 1e-9 * total.abs().max(1e-300) && b.abs() > 1e-300 {
        let side = if toward_zero { "at 0" } else { "at ∞" };
        return Err(Error::NonConvergence(format!(
            "improper integral of {} diverges {side}",
            g.name
        )));
    }
    Ok(total)
}

fn check_r(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("r = {r} must be > 0")));
    }
    Ok(())
}

/// `t^{−r} ∫₀ᵗ g(y) dy`.
pub fn hardy_lower(g: &HalfLineFunction, r: f64, t: f64) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t must be > 0"));
    }
    Ok(t.powf(-r) * improper(g, t.ln(), true)?)
}

/// `t^{r} ∫ₜ^∞ g(y) dy`.
pub fn hardy_upper(g: &HalfLineFunction, r: f64, t: f64) -> Result<f64> {
    check_r(r)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t must be > 0"));
    }
    Ok(t.powf(r) * improper(g, t.ln(), false)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardySide {
    Lower,
    Upper,
}

/// `∫₀ᵗ g` (lower) or `∫ₜ^∞ g` (upper) at every node of the grid.
///
/// Consecutive knots (grid nodes and jumps of `g`) bound smooth pieces, each integrated
/// with an 8-point Gauss-Legendre rule in `u = ln y`.
pub fn cumulative_integrals(
    g: &HalfLineFunction,
    grid: &LogTimeGrid,
    side: HardySide,
) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    if nodes.is_empty() {
        return Err(Error::Empty("log-time grid"));
    }
    let gl = GaussLegendre::new(8)?;
    let mut knots: Vec<(f64, Option<usize>)> = nodes
        .iter()
        .enumerate()
        .map(|(i, &t)| (t.ln(), Some(i)))
        .collect();
    let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
    for b in u_breaks(g) {
        if b > first && b < last {
            knots.push((b, None));
        }
    }
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let piece = |a: f64, b: f64| {
        gl.integrate(a, b, |u| {
            let y = u.exp();
            g.eval(y) * y
        })
    };
    let mut out = vec![0.0; nodes.len()];
    match side {
        HardySide::Lower => {
            let mut acc = improper(g, knots[0].0, true)?;
            for w in 0..knots.len() {
                if w > 0 {
                    acc += piece(knots[w - 1].0, knots[w].0);
                }
                if let Some(i) = knots[w].1 {
                    out[i] = acc;
                }
            }
        }
        HardySide::Upper => {
            let mut acc = improper(g, knots[knots.len() - 1].0, false)?;
            for w in (0..knots.len()).rev() {
                if w + 1 < knots.len() {
                    acc += piece(knots[w].0, knots[w + 1].0);
                }
                if let Some(i) = knots[w].1 {
                    out[i] = acc;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub ratio: f64,
    pub r: f64,
    pub q_desc: String,
    pub side: HardySide,
    pub grid: GridMeta,
}

fn check_q(q: &ExponentFunction) -> Result<()> {
    if !q.tags().p0_inf {
        return Err(Error::HypothesisViolated(format!(
            "{q} is not tagged with log-rate limits at 0 and ∞"
        )));
    }
    let q0 = q
        .limit_zero()
        .ok_or_else(|| Error::HypothesisViolated("q(0) undefined".into()))?;
    if q0 <= 1.0 || q.limit_infty() <= 1.0 {
        return Err(Error::HypothesisViolated(format!(
            "q(0) = {q0}, q(∞) = {} must exceed 1 (the conjugate exponent is unbounded otherwise)",
            q.limit_infty()
        )));
    }
    Ok(())
}

/// Both sides of the Hardy inequality on one grid.
pub fn hardy_inequality_check(
    g: &HalfLineFunction,
    r: f64,
    q: &ExponentFunction,
    side: HardySide,
    grid: &LogTimeGrid,
) -> Result<HardyReport> {
    check_r(r)?;
    check_q(q)?;
    let grid = grid.with_breakpoints(g.breakpoints())?;
    let cum = cumulative_integrals(g, &grid, side)?;
    let nodes = grid.nodes();
    let (lhs_vals, rhs_vals): (Vec<f64>, Vec<f64>) = match side {
        HardySide::Lower => nodes
            .iter()
            .zip(&cum)
            .map(|(t, c)| (t.powf(-r) * c, t.powf(1.0 - r) * g.eval(*t)))
            .unzip(),
        HardySide::Upper => nodes
            .iter()
            .zip(&cum)
            .map(|(t, c)| (t.powf(r) * c, t.powf(1.0 + r) * g.eval(*t)))
            .unzip(),
    };
    let space = LpSpace::new(DiscreteMeasure::logtime(&grid), q)?;
    let lhs_norm = space.norm(&lhs_vals)?.value;
    let rhs_norm = space.norm(&rhs_vals)?.value;
    let ratio = if rhs_norm == 0.0 {
        if lhs_norm > 0.0 {
            return Err(Error::Degenerate(format!(
                "right side vanishes but left side is {lhs_norm:e}"
            )));
        }
        0.0
    } else {
        lhs_norm / rhs_norm
    };
    Ok(HardyReport {
        lhs_norm,
        rhs_norm,
        ratio,
        r,
        q_desc: q.describe(),
        side,
        grid: grid.meta(),
    })
}

/// Twelve functions with both sides finite for `r ≤ 2` on either side: indicators away from
/// 0, and powers of order ≥ 2 that are cut off or damped exponentially.
pub fn test_family() -> Vec<HalfLineFunction> {
    vec![
        HalfLineFunction::indicator(1.0, 2.0),
        HalfLineFunction::indicator(0.5, 3.0),
        HalfLineFunction::indicator(0.1, 0.2),
        HalfLineFunction::indicator(2.0, 10.0),
        HalfLineFunction::new(
            "y^2 chi(0,1]",
            |y| if y <= 1.0 { y * y } else { 0.0 },
            vec![1.0],
        ),
        HalfLineFunction::new(
            "y^3 chi(0,4]",
            |y| if y <= 4.0 { y * y * y } else { 0.0 },
            vec![4.0],
        ),
        HalfLineFunction::new("y^2 e^-y", |y| y * y * (-y).exp(), vec![]),
        HalfLineFunction::new("y^3 e^-2y", |y| y.powi(3) * (-2.0 * y).exp(), vec![]),
        HalfLineFunction::new("y^2 e^-y^2", |y| y * y * (-y * y).exp(), vec![]),
        HalfLineFunction::new(
            "y^2/(1+y^2) e^-y",
            |y| y * y / (1.0 + y * y) * (-y).exp(),
            vec![],
        ),
        HalfLineFunction::new("y^2.5 e^-y/3", |y| y.powf(2.5) * (-y / 3.0).exp(), vec![]),
        HalfLineFunction::new(
            "y^4 e^-y chi[0.5,inf)",
            |y| {
                if y >= 0.5 {
                    y.powi(4) * (-y).exp()
                } else {
                    0.0
                }
            },
            vec![0.5],
        ),
    ]
}

/// Empirical constant over the family and its drift under one grid refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyConstant {
    pub r: f64,
    pub side: HardySide,
    pub q_desc: String,
    pub constant: f64,
    pub refined_constant: f64,
    pub drift: f64,
    pub worst: String,
}

pub fn empirical_constant(
    family: &[HalfLineFunction],
    r: f64,
    q: &ExponentFunction,
    side: HardySide,
    grid: &LogTimeGrid,
) -> Result<HardyConstant> {
    let refined = grid.refined();
    let mut constant = 0.0f64;
    let mut refined_constant = 0.0f64;
    let mut worst = String::new();
    for g in family {
        let a = hardy_inequality_check(g, r, q, side, grid)?;
        let b = hardy_inequality_check(g, r, q, side, &refined)?;
        if !(a.ratio.is_finite() && b.ratio.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "ratio for {} is not finite",
                g.name()
            )));
        }
        if b.ratio > refined_constant {
            worst = g.name().to_string();
        }
        constant = constant.max(a.ratio);
        refined_constant = refined_constant.max(b.ratio);
    }
    Ok(HardyConstant {
        r,
        side,
        q_desc: q.describe(),
        constant,
        refined_constant,
        drift: rel_change(constant, refined_constant),
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> HalfLineFunction {
        HalfLineFunction::new("1", |_| 1.0, vec![])
    }

    #[test]
    fn lower_examples() {
        for t in [0.01, 1.0, 30.0] {
            assert!((hardy_lower(&one(), 1.0, t).unwrap() - 1.0).abs() < 1e-12);
        }
        let chi = HalfLineFunction::indicator(0.0, 1.0);
        assert!((hardy_lower(&chi, 2.0, 2.0).unwrap() - 0.25).abs() < 1e-12);
        let id = HalfLineFunction::new("y", |y| y, vec![]);
        assert!((hardy_lower(&id, 1.0, 3.0).unwrap() - 1.5).abs() < 1e-12);
        let bad = HalfLineFunction::new("1/y", |y| 1.0 / y, vec![]);
        assert!(matches!(
            hardy_lower(&bad, 1.0, 1.0),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn upper_examples() {
        let e = HalfLineFunction::new("e^-y", |y| (-y).exp(), vec![]);
        assert!((hardy_upper(&e, 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-13);
        let p = HalfLineFunction::new("y^-3", |y| y.powi(-3), vec![]);
        assert!((hardy_upper(&p, 1.0, 2.0).unwrap() - 0.25).abs() < 1e-13);
        let z = HalfLineFunction::new("0", |_| 0.0, vec![]);
        assert_eq!(hardy_upper(&z, 1.0, 2.0).unwrap(), 0.0);
        assert!(hardy_upper(&one(), 1.0, 2.0).is_err());
    }

    #[test]
    fn cumulative_matches_pointwise() {
        let grid = LogTimeGrid::new(1e-2, 1e2, 40).unwrap();
        for g in test_family() {
            let grid = grid.with_breakpoints(g.breakpoints()).unwrap();
            for side in [HardySide::Lower, HardySide::Upper] {
                let cum = cumulative_integrals(&g, &grid, side).unwrap();
                for (i, &t) in grid.nodes().iter().enumerate().step_by(17) {
                    let direct = match side {
                        HardySide::Lower => hardy_lower(&g, 1.0, t).unwrap() * t,
                        HardySide::Upper => hardy_upper(&g, 1.0, t).unwrap() / t,
                    };
                    assert!(
                        (cum[i] - direct).abs() <= 1e-10 * direct.abs().max(1e-12),
                        "{} {side:?} t={t} {} {direct}",
                        g.name(),
                        cum[i]
                    );
                }
            }
        }
    }

    #[test]
    fn indicator_closed_form() {
        let q = ExponentFunction::constant(2.0).unwrap();
        let grid = LogTimeGrid::default();
        let chi = HalfLineFunction::indicator(1e-9, 1.0);
        let rep = hardy_inequality_check(&chi, 1.0, &q, HardySide::Lower, &grid).unwrap();
        let (a, b) = (grid.t_min(), grid.t_max());
        let e = 1e-9;
        // ∫_a^1 (1 − e/t)² dt/t + ∫_1^b ((1 − e)/t)² dt/t.
        let lhs = ((1.0 / a).ln() - 2.0 * e * (1.0 / a - 1.0)
            + 0.5 * e * e * (a.powi(-2) - 1.0)
            + 0.5 * (1.0 - e).powi(2) * (1.0 - b.powi(-2)))
        .sqrt();
        let rhs = (1.0 / a).ln().sqrt();
        assert!((rep.lhs_norm - lhs).abs() < 1e-9 * lhs);
        assert!((rep.rhs_norm - rhs).abs() < 1e-9 * rhs);
    }

    #[test]
    fn zero_and_hypotheses() {
        let q = ExponentFunction::constant(2.0).unwrap();
        let grid = LogTimeGrid::new(1e-2, 1e2, 40).unwrap();
        let z = HalfLineFunction::new("0", |_| 0.0, vec![]);
        let rep = hardy_inequality_check(&z, 1.0, &q, HardySide::Lower, &grid).unwrap();
        assert_eq!(rep.ratio, 0.0);
        let e = HalfLineFunction::new("e^-y", |y| (-y).exp(), vec![]);
        assert!(hardy_inequality_check(&e, 0.5, &q, HardySide::Upper, &grid)
            .unwrap()
            .ratio
            .is_finite());
        let q1 = ExponentFunction::time_family(1.0, 2.0).unwrap();
        assert!(matches!(
            hardy_inequality_check(&e, 0.5, &q1, HardySide::Upper, &grid),
            Err(Error::HypothesisViolated(_))
        ));
        let g = ExponentFunction::gaussian_family(2.0, 1.0).unwrap();
        assert!(hardy_inequality_check(&e, 0.5, &g, HardySide::Upper, &grid).is_err());
    }

    #[test]
    fn scaling_covariance() {
        let q = ExponentFunction::constant(3.0).unwrap();
        let grid = LogTimeGrid::new(1e-8, 1e8, 800).unwrap();
        for g in [
            HalfLineFunction::new("y^2 e^-y", |y| y * y * (-y).exp(), vec![]),
            HalfLineFunction::indicator(1.0, 2.0),
        ] {
            let a = hardy_inequality_check(&g, 0.5, &q, HardySide::Lower, &grid)
                .unwrap()
                .ratio;
            let b = hardy_inequality_check(&g.dilated(3.0), 0.5, &q, HardySide::Lower, &grid)
                .unwrap()
                .ratio;
            assert!(((a - b) / a).abs() < 1e-6, "{}: {a} vs {b}", g.name());
        }
    }
}
