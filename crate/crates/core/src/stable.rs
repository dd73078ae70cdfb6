//! The one-sided stable law of order 1/2 that subordinates `T_t` into `P_t`.
//!
//! `g(t, s) = t/(2√π) · e^{−t²/4s} · s^{−3/2}` on `s > 0`.
//!
//! Time derivatives are `∂ᵗᵏ g = (Σ a_{ij} tⁱ s^{−j}) g`. Every term satisfies `2j − i = k`,
//! so the factor equals `t^{−k} P_k(t²/s)` with `P_k(w) = Σ_j a_{2j−k, j} wʲ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, Integral};

/// Highest derivative order for which the exact coefficients fit in `i128`.
pub const MAX_DERIVATIVE_ORDER: u32 = 24;

/// Window in `u = ln s` used by the subordination integrals.
pub const U_WINDOW: (f64, f64) = (-40.0, 40.0);

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(format!(
            "{name} = {v} must be finite and > 0"
        )));
    }
    Ok(())
}

pub fn density(t: f64, s: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("s", s)?;
    Ok(density_unchecked(t, s))
}

pub(crate) fn density_unchecked(t: f64, s: f64) -> f64 {
    (ln_density_times_s(t, s.ln()) - s.ln()).exp()
}

/// `ln(g(t, eᵘ)·eᵘ)`, the density in the variable `u = ln s`.
fn ln_density_times_s(t: f64, u: f64) -> f64 {
    (t / (2.0 * PI.sqrt())).ln() - t * t / (4.0 * u.exp()) - 0.5 * u
}

/// `∂ᵏg/∂tᵏ` as exact coefficients of `tⁱ s^{−j}` (times `g`).
#[derive(Debug, Clone, PartialEq)]
pub struct StableDerivative {
    k: u32,
    terms: BTreeMap<(i32, u32), Ratio<i128>>,
}

impl StableDerivative {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<(i32, u32), Ratio<i128>> {
        &self.terms
    }

    pub fn coefficient(&self, i: i32, j: u32) -> Ratio<i128> {
        self.terms
            .get(&(i, j))
            .copied()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    /// Coefficients of `P_k(w)` indexed by power of `w`.
    pub fn w_polynomial(&self) -> Vec<f64> {
        let deg = self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0) as usize;
        let mut out = vec![0.0; deg + 1];
        for (&(_, j), a) in &self.terms {
            out[j as usize] += *a.numer() as f64 / *a.denom() as f64;
        }
        out
    }

    /// `Σ a_{ij} tⁱ s^{−j}`.
    pub fn factor(&self, t: f64, s: f64) -> f64 {
        let w = t * t / s;
        horner(&self.w_polynomial(), w) * t.powi(-(self.k as i32))
    }

    /// `∂ᵏg/∂tᵏ (t, s)`.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        self.factor(t, s) * density_unchecked(t, s)
    }
}

fn horner(c: &[f64], w: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * w + a)
}

/// Runs the product-rule recursion `k` times from `{(0,0): 1}`.
///
/// `∂ₜ(a tⁱ s^{−j} g) = a(i+1) t^{i−1} s^{−j} g − (a/2) t^{i+1} s^{−(j+1)} g`.
pub fn derivative_terms(k: u32) -> Result<StableDerivative> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(Error::invalid(format!(
            "derivative order {k} exceeds supported maximum {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let mut terms: BTreeMap<(i32, u32), Ratio<i128>> = BTreeMap::new();
    terms.insert((0, 0), Ratio::from_integer(1));
    let half = Ratio::new(1, 2);
    for _ in 0..k {
        let mut next: BTreeMap<(i32, u32), Ratio<i128>> = BTreeMap::new();
        for (&(i, j), &a) in &terms {
            let down = a * Ratio::from_integer(i as i128 + 1);
            *next
                .entry((i - 1, j))
                .or_insert_with(|| Ratio::from_integer(0)) += down;
            *next
                .entry((i + 1, j + 1))
                .or_insert_with(|| Ratio::from_integer(0)) -= a * half;
        }
        next.retain(|_, a| *a.numer() != 0);
        terms = next;
    }
    Ok(StableDerivative { k, terms })
}

/// `C_k = 4ᵏ Γ(k + 1/2)/√π = 2ᵏ (2k − 1)!!`, computed as an exact product.
pub fn moment_constant(k: u32) -> f64 {
    (1..=k).map(|m| 2.0 * (2 * m - 1) as f64).product()
}

/// `∫ s^{−k} g(t, s) ds = C_k / t^{2k}`.
pub fn moment(k: u32, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    Ok(moment_constant(k) / t.powi(2 * k as i32))
}

fn window(t: f64) -> (f64, f64) {
    let centre = 2.0 * t.ln();
    (U_WINDOW.0.min(centre - 30.0), U_WINDOW.1.max(centre + 40.0))
}

fn opts_for(rel_tol: f64, abs_tol: f64) -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol,
        abs_tol,
        max_segments: 4000,
        initial_segments: 32,
    }
}

/// `∫₀^∞ f(s) g(t, s) ds` in `u = ln s`.
///
/// Mass to the right of the window is added as `f(S)·P(s > S)`, with
/// `P(s > S) = erf(t/(2√S))`. Mass to the left is below `e^{−t²e^{40}/4}` and dropped.
pub fn integrate_against_density(t: f64, f: impl Fn(f64) -> f64, rel_tol: f64) -> Result<Integral> {
    integrate_weighted(t, f, |_, _| 1.0, &[], rel_tol, 1e-300, 0)
}

/// `∫₀^∞ f(s) ∂ᵏg/∂tᵏ(t, s) ds`.
///
/// These integrals may vanish (for `f ≡ 1` they always do), so the error target has an
/// absolute floor of `1e−12·t^{−k}`, the scale of the total variation of the measure.
pub fn integrate_against_derivative(
    k: u32,
    t: f64,
    f: impl Fn(f64) -> f64,
    rel_tol: f64,
) -> Result<Integral> {
    let d = derivative_terms(k)?;
    let poly = d.w_polynomial();
    let tk = t.powi(-(k as i32));
    let breaks = sign_change_breaks(&poly, t);
    integrate_weighted(
        t,
        f,
        move |t, s| horner(&poly, t * t / s) * tk,
        &breaks,
        rel_tol,
        1e-12 * tk,
        k,
    )
}

fn integrate_weighted(
    t: f64,
    f: impl Fn(f64) -> f64,
    factor: impl Fn(f64, f64) -> f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    k: u32,
) -> Result<Integral> {
    check_positive("t", t)?;
    let (lo, hi) = window(t);
    let mut all_breaks = breaks.to_vec();
    all_breaks.push((t * t / 6.0).ln());
    let integrand = |u: f64| {
        let s = u.exp();
        let w = ln_density_times_s(t, u).exp();
        if w == 0.0 {
            0.0
        } else {
            f(s) * factor(t, s) * w
        }
    };
    let mut res = integrate_adaptive(integrand, lo, hi, &all_breaks, opts_for(rel_tol, abs_tol))?;
    let s_max = hi.exp();
    let x = t / (2.0 * s_max.sqrt());
    let tail = match k {
        0 => statrs::function::erf::erf(x),
        // d/dt erf(t/(2√S)) = e^{−x²}/√(πS); higher derivatives carry extra factors of 1/S.
        1 => (-x * x).exp() / (PI * s_max).sqrt(),
        _ => 0.0,
    };
    if tail != 0.0 {
        res.value += f(s_max) * tail;
    }
    Ok(res)
}

/// Positive roots of `P_k(w)` mapped to `u = ln(t²/w)`.
fn sign_change_breaks(poly: &[f64], t: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let n = 4000;
    let (a, b) = (-14.0f64, 14.0f64);
    let lw = |i: usize| a + (b - a) * i as f64 / n as f64;
    let p = |l: f64| horner(poly, l.exp());
    let mut prev = p(lw(0));
    for i in 1..=n {
        let cur = p(lw(i));
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut x0, mut x1) = (lw(i - 1), lw(i));
            let s0 = p(x0).signum();
            for _ in 0..80 {
                let m = 0.5 * (x0 + x1);
                if p(m).signum() == s0 {
                    x0 = m;
                } else {
                    x1 = m;
                }
            }
            out.push(2.0 * t.ln() - 0.5 * (x0 + x1));
        }
        prev = cur;
    }
    out
}

/// `∫ s^{−k} g(t, s) ds` by quadrature, as a cross-check of [`moment`].
pub fn moment_quadrature(k: u32, t: f64) -> Result<f64> {
    Ok(integrate_against_density(t, |s| s.powi(-(k as i32)), 1e-13)?.value)
}

/// `∫ |∂ᵏg/∂tᵏ (t, s)| ds`, the total variation of the k-th derivative measure.
pub fn tv_derivative(k: u32, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    if k == 0 {
        return Ok(1.0);
    }
    let d = derivative_terms(k)?;
    let poly = d.w_polynomial();
    let tk = t.powi(-(k as i32));
    let breaks = sign_change_breaks(&poly, t);
    let coarse = integrate_weighted(
        t,
        |_| 1.0,
        |t, s| (horner(&poly, t * t / s) * tk).abs(),
        &breaks,
        1e-10,
        1e-300,
        0,
    )?;
    let fine = integrate_weighted(
        t,
        |_| 1.0,
        |t, s| (horner(&poly, t * t / s) * tk).abs(),
        &breaks,
        1e-12,
        1e-300,
        0,
    )?;
    let change = ((fine.value - coarse.value) / fine.value).abs();
    if change > 1e-8 {
        return Err(Error::NonConvergence(format!(
            "total variation of derivative {k} at t = {t}: relative change {change:.2e}"
        )));
    }
    Ok(fine.value)
}

/// `∂ᵏg/∂tᵏ (t, s)` from central differences of the density, extrapolated over four step
/// halvings starting at `0.4·min(t, 2s/t)` (scaled down for k > 4).
pub fn finite_difference_derivative(k: u32, t: f64, s: f64) -> f64 {
    // The stencil reaches (k/2)·h below t, so the step shrinks for k > 4 to keep it positive.
    let h = 0.4 * t.min(2.0 * s / t) * 4.0 / k.max(4) as f64;
    let g = |t: f64| density_unchecked(t, s);
    let fd = |h: f64| -> f64 {
        // Central k-th difference: Σ (−1)ᵐ C(k,m) g(t + (k/2 − m)h) / hᵏ.
        let mut acc = 0.0;
        let mut binom = 1.0;
        for m in 0..=k {
            let x = t + (k as f64 / 2.0 - m as f64) * h;
            acc += if m % 2 == 0 { binom } else { -binom } * g(x);
            binom = binom * (k - m) as f64 / (m + 1) as f64;
        }
        acc / h.powi(k as i32)
    };
    // Richardson table on the even-power error expansion of the central difference.
    let mut row: Vec<f64> = (0..4).map(|i| fd(h / 2f64.powi(i))).collect();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    row[0]
}

/// Relative mismatch between the symbolic derivative and [`finite_difference_derivative`],
/// with the denominator floored at `10⁻³ g(t,s) t^{−k}`.
pub fn finite_difference_error(k: u32, t: f64, s: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("s", s)?;
    let exact = derivative_terms(k)?.eval(t, s);
    let fd = finite_difference_derivative(k, t, s);
    let scale = density_unchecked(t, s) * t.powi(-(k as i32)) * 1e-3;
    Ok((exact - fd).abs() / exact.abs().max(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn ratio(n: i128, d: i128) -> Ratio<i128> {
        Ratio::new(n, d)
    }

    #[test]
    fn density_examples() {
        let v = density(2.0, 1.0).unwrap();
        assert!((v - (-1.0f64).exp() / PI.sqrt()).abs() < 1e-15);
        assert!((v - 0.207_554).abs() < 1e-6);
        assert!(density(1.0, 1e-6).unwrap() < 1e-100);
        assert!(density(1.0, 1e12).unwrap() < 1e-18);
        assert!(density(0.0, 1.0).is_err());
        assert!(density(1.0, -1.0).is_err());
    }

    #[test]
    fn density_is_probability() {
        for t in [0.1, 1.0, 10.0] {
            let mass = integrate_against_density(t, |_| 1.0, 1e-13).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-11, "t = {t}: mass {mass}");
        }
    }

    #[test]
    fn low_order_terms() {
        let d0 = derivative_terms(0).unwrap();
        assert_eq!(d0.terms().len(), 1);
        assert_eq!(d0.coefficient(0, 0), ratio(1, 1));
        let d1 = derivative_terms(1).unwrap();
        assert_eq!(d1.terms().len(), 2);
        assert_eq!(d1.coefficient(-1, 0), ratio(1, 1));
        assert_eq!(d1.coefficient(1, 1), ratio(-1, 2));
        // Hand expansion of ∂ₜ[(1/t − t/(2s)) g]: −1/t² − 1/(2s) + (1/t − t/2s)² = −3/(2s) + t²/(4s²).
        let d2 = derivative_terms(2).unwrap();
        assert_eq!(d2.coefficient(-2, 0), ratio(0, 1));
        assert_eq!(d2.coefficient(0, 1), ratio(-3, 2));
        assert_eq!(d2.coefficient(2, 2), ratio(1, 4));
        assert_eq!(d2.terms().len(), 2);
    }

    #[test]
    fn degree_invariant() {
        for k in 0..=MAX_DERIVATIVE_ORDER {
            let d = derivative_terms(k).unwrap();
            for &(i, j) in d.terms().keys() {
                assert_eq!(2 * j as i32 - i, k as i32);
            }
        }
        assert!(derivative_terms(MAX_DERIVATIVE_ORDER + 1).is_err());
    }

    #[test]
    fn symbolic_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for k in 1..=4 {
            for _ in 0..50 {
                let t: f64 = rng.random_range(0.2..5.0);
                let s: f64 = rng.random_range(0.2..5.0);
                let err = finite_difference_error(k, t, s).unwrap();
                assert!(err < 1e-5, "k={k} t={t} s={s}: {err}");
            }
        }
    }

    #[test]
    fn moment_constants() {
        assert_eq!(moment_constant(1), 2.0);
        assert_eq!(moment_constant(2), 12.0);
        assert_eq!(moment_constant(0), 1.0);
        for k in 1..=8 {
            let oracle = 4f64.powi(k as i32) * gamma(k as f64 + 0.5) / PI.sqrt();
            assert!((moment_constant(k) - oracle).abs() < 1e-12 * oracle);
        }
        assert!((moment(1, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(moment(0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn moment_quadrature_matches() {
        for k in 1..=4 {
            for t in [0.5, 1.0, 2.0] {
                let q = moment_quadrature(k, t).unwrap();
                let c = moment(k, t).unwrap();
                assert!(((q - c) / c).abs() < 1e-8, "k={k} t={t}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn derivative_measure_has_zero_mass() {
        for k in 1..=3 {
            let v = integrate_against_derivative(k, 1.3, |_| 1.0, 1e-10).unwrap();
            assert!(v.value.abs() < 1e-10, "k={k}: {}", v.value);
        }
    }

    #[test]
    fn derivative_integral_matches_moment_derivative() {
        // d/dt (C₁/t²) = −2C₁/t³.
        let t = 1.7;
        let v = integrate_against_derivative(1, t, |s| 1.0 / s, 1e-12)
            .unwrap()
            .value;
        let expected = -2.0 * moment_constant(1) / t.powi(3);
        assert!(((v - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn total_variation_scaling() {
        assert_eq!(tv_derivative(0, 3.0).unwrap(), 1.0);
        for k in 1..=4 {
            let base = tv_derivative(k, 1.0).unwrap();
            for t in [0.5, 2.0, 4.0] {
                let v = tv_derivative(k, t).unwrap() * t.powi(k as i32);
                assert!(((v - base) / base).abs() < 1e-6, "k={k} t={t}");
            }
        }
        let r = tv_derivative(2, 1.0).unwrap() / tv_derivative(2, 2.0).unwrap();
        assert!((r - 4.0).abs() < 1e-6);
    }
}
