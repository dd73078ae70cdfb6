//! Modulars and Luxemburg norms on discrete measures.
//!
//! A function on `(ℝ^d, γ_d)` is its vector of values at Gauss-Hermite nodes; a function
//! on `((0, ∞), dt/t)` is its vector of values at the nodes of a [`LogTimeGrid`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentFunction;
use crate::quadrature::{pairwise_sum, GaussianRule, GridMeta, LogTimeGrid};

/// Relative tolerance on `λ` for the Luxemburg norm.
pub const NORM_REL_TOL: f64 = 1e-10;
pub const NORM_MAX_ITER: u32 = 200;

/// Slack used when comparing the two sides of an inequality.
pub const INEQ_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    /// `γ_d`, total mass one.
    Gaussian,
    /// `dt/t` truncated to the grid window.
    LogTime,
    /// `dt` on the same grid.
    Lebesgue,
    Custom,
}

/// Nodes and weights of a quadrature-discretized measure.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    kind: MeasureKind,
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn gaussian(rule: &GaussianRule) -> Self {
        let points: Vec<f64> = rule.points().flat_map(|p| p.iter().copied()).collect();
        Self {
            kind: MeasureKind::Gaussian,
            dim: rule.dim(),
            points,
            weights: rule.weights().to_vec(),
        }
    }

    pub fn logtime(grid: &LogTimeGrid) -> Self {
        Self {
            kind: MeasureKind::LogTime,
            dim: 1,
            points: grid.nodes().to_vec(),
            weights: grid.du_weights().to_vec(),
        }
    }

    pub fn lebesgue(grid: &LogTimeGrid) -> Self {
        Self {
            kind: MeasureKind::Lebesgue,
            dim: 1,
            points: grid.nodes().to_vec(),
            weights: grid.dt_weights(),
        }
    }

    pub fn custom(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() != dim * weights.len() {
            return Err(Error::invalid(
                "points must hold dim × weights.len() coordinates",
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        Ok(Self {
            kind: MeasureKind::Custom,
            dim,
            points,
            weights,
        })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.points().map(f).collect()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Outcome of a Luxemburg-norm solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// `ρ(f/value)`; equals 1 up to the solver tolerance when `value > 0`.
    pub modular_at_value: f64,
    pub iterations: u32,
}

impl NormResult {
    pub const ZERO: NormResult = NormResult {
        value: 0.0,
        modular_at_value: 0.0,
        iterations: 0,
    };
}

fn check_values(values: &[f64], len: usize) -> Result<()> {
    if values.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: values.len(),
        });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber("function samples"));
    }
    if values.iter().any(|v| v.is_infinite()) {
        return Err(Error::invalid("function samples contain infinities"));
    }
    Ok(())
}

/// `Σ wᵢ |fᵢ|^{pᵢ}`.
pub fn modular_values(values: &[f64], exps: &[f64], weights: &[f64]) -> Result<f64> {
    check_values(values, weights.len())?;
    let terms: Vec<f64> = values
        .iter()
        .zip(exps)
        .zip(weights)
        .map(|((v, p), w)| if *v == 0.0 { 0.0 } else { w * v.abs().powf(*p) })
        .collect();
    Ok(pairwise_sum(&terms))
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let shifted: Vec<f64> = terms.iter().map(|x| (x - m).exp()).collect();
    m + pairwise_sum(&shifted).ln()
}

/// Luxemburg norm `inf{λ > 0 : Σ wᵢ |fᵢ/λ|^{pᵢ} ≤ 1}`.
///
/// In `ℓ = ln λ` the function `φ(ℓ) = ln ρ(f/eˡ)` is a log-sum-exp of affine maps, hence
/// convex and strictly decreasing. Newton's method started where `φ ≥ 0` increases
/// monotonically to the root, so no bracket maintenance is needed.
pub fn luxemburg_values(values: &[f64], exps: &[f64], weights: &[f64]) -> Result<NormResult> {
    check_values(values, weights.len())?;
    if exps.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: exps.len(),
        });
    }
    // (ln wᵢ + pᵢ ln|fᵢ|, pᵢ) over the support.
    let mut a = Vec::with_capacity(values.len());
    let mut p = Vec::with_capacity(values.len());
    for ((v, e), w) in values.iter().zip(exps).zip(weights) {
        if *v != 0.0 && *w > 0.0 {
            a.push(w.ln() + e * v.abs().ln());
            p.push(*e);
        }
    }
    if a.is_empty() {
        return Ok(NormResult::ZERO);
    }
    if p.iter().all(|e| *e == p[0]) {
        let value = (log_sum_exp(&a) / p[0]).exp();
        return Ok(NormResult {
            value,
            modular_at_value: 1.0,
            iterations: 0,
        });
    }
    let mut buf = vec![0.0; a.len()];
    let mut phi = |l: f64| -> (f64, f64) {
        for i in 0..a.len() {
            buf[i] = a[i] - p[i] * l;
        }
        let lse = log_sum_exp(&buf);
        // φ′(ℓ) = −Σ pᵢ e^{bᵢ} / Σ e^{bᵢ}.
        let terms: Vec<f64> = buf
            .iter()
            .zip(&p)
            .map(|(b, e)| e * (b - lse).exp())
            .collect();
        (lse, -pairwise_sum(&terms))
    };
    // Start from the largest single-term root, where φ ≥ 0.
    let mut l = a
        .iter()
        .zip(&p)
        .map(|(ai, pi)| ai / pi)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (f, df) = phi(l);
        let step = -f / df;
        l += step;
        if step.abs() <= 0.1 * NORM_REL_TOL * (1.0 + l.abs()).min(1.0) || f.abs() < 1e-15 {
            break;
        }
        if iterations >= NORM_MAX_ITER {
            return Err(Error::NonConvergence(format!(
                "Luxemburg solve stalled with step {step:.3e}"
            )));
        }
    }
    let value = l.exp();
    let modular_at_value = phi(l).0.exp();
    Ok(NormResult {
        value,
        modular_at_value,
        iterations,
    })
}

/// `L^{p(·)}` over a fixed measure, with the exponent sampled once at the nodes.
#[derive(Debug, Clone)]
pub struct LpSpace {
    measure: DiscreteMeasure,
    exps: Vec<f64>,
    exponent: ExponentFunction,
}

impl LpSpace {
    pub fn new(measure: DiscreteMeasure, p: &ExponentFunction) -> Result<Self> {
        let exps = measure.sample(|x| p.eval(x));
        for v in &exps {
            if !(v.is_finite() && *v >= 1.0 - 1e-12) {
                return Err(Error::invalid(format!("exponent value {v} outside [1, ∞)")));
            }
        }
        Ok(Self {
            measure,
            exps,
            exponent: p.clone(),
        })
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn exponent(&self) -> &ExponentFunction {
        &self.exponent
    }

    pub fn exponent_values(&self) -> &[f64] {
        &self.exps
    }

    pub fn modular(&self, values: &[f64]) -> Result<f64> {
        modular_values(values, &self.exps, self.measure.weights())
    }

    pub fn norm(&self, values: &[f64]) -> Result<NormResult> {
        luxemburg_values(values, &self.exps, self.measure.weights())
    }

    pub fn norm_of(&self, f: impl Fn(&[f64]) -> f64) -> Result<NormResult> {
        self.norm(&self.measure.sample(f))
    }
}

pub fn modular(
    m: &DiscreteMeasure,
    f: impl Fn(&[f64]) -> f64,
    p: &ExponentFunction,
) -> Result<f64> {
    LpSpace::new(m.clone(), p)?.modular(&m.sample(f))
}

pub fn luxemburg_norm(
    m: &DiscreteMeasure,
    f: impl Fn(&[f64]) -> f64,
    p: &ExponentFunction,
) -> Result<NormResult> {
    LpSpace::new(m.clone(), p)?.norm(&m.sample(f))
}

/// `‖f‖_{q(·),dt/t}` with the truncation window grown until the value changes by less than
/// `rel_tol` between consecutive grids.
pub fn logtime_norm_converged(
    f: impl Fn(f64) -> f64,
    q: &ExponentFunction,
    grid: &LogTimeGrid,
    rel_tol: f64,
    max_refinements: u32,
) -> Result<(NormResult, GridMeta)> {
    let eval = |g: &LogTimeGrid| luxemburg_norm(&DiscreteMeasure::logtime(g), |t| f(t[0]), q);
    let mut g = grid.clone();
    let mut prev = eval(&g)?;
    let mut refinements = 0;
    loop {
        let next_grid = g.refined();
        let next = eval(&next_grid)?;
        refinements += 1;
        let change = rel_change(prev.value, next.value);
        if change < rel_tol || refinements >= max_refinements {
            let mut meta = next_grid.meta();
            meta.refinements = refinements;
            meta.last_rel_change = Some(change);
            return Ok((next, meta));
        }
        g = next_grid;
        prev = next;
    }
}

pub fn rel_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// The two sides of `‖f‖_{q(·),dt/t} = ‖t^{−1/q(t)} f‖_{q(·),dt}` on one grid.
pub fn logtime_norm_identity_check(
    f: impl Fn(f64) -> f64,
    q: &ExponentFunction,
    grid: &LogTimeGrid,
) -> Result<(f64, f64)> {
    let lhs = luxemburg_norm(&DiscreteMeasure::logtime(grid), |t| f(t[0]), q)?.value;
    let rhs = luxemburg_norm(
        &DiscreteMeasure::lebesgue(grid),
        |t| t[0].powf(-1.0 / q.eval(t)) * f(t[0]),
        q,
    )?
    .value;
    Ok((lhs, rhs))
}

/// `lhs ≤ rhs` comparison record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl InequalityRecord {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs * (1.0 + INEQ_REL_TOL) + 1e-14;
        Self {
            lhs,
            rhs,
            ratio,
            pass,
        }
    }
}

/// `‖fg‖_{p(·)} ≤ 2‖f‖_{q(·)}‖g‖_{r(·)}` with `1/p = 1/q + 1/r`.
pub fn holder_check(
    m: &DiscreteMeasure,
    f: &[f64],
    g: &[f64],
    q: &ExponentFunction,
    r: &ExponentFunction,
) -> Result<InequalityRecord> {
    let p = ExponentFunction::harmonic(vec![(1.0, q.clone()), (1.0, r.clone())])?;
    for x in m.points() {
        if p.eval(x) < 1.0 - 1e-12 {
            return Err(Error::HypothesisViolated(format!("1/q + 1/r > 1 at {x:?}")));
        }
    }
    let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let lhs = LpSpace::new(m.clone(), &p)?.norm(&fg)?.value;
    let nf = LpSpace::new(m.clone(), q)?.norm(f)?.value;
    let ng = LpSpace::new(m.clone(), r)?.norm(g)?.value;
    Ok(InequalityRecord::new(lhs, 2.0 * nf * ng))
}

/// `‖∫ F(·, y) dν(y)‖_{p(·)} ≤ 4 ∫ ‖F(·, y)‖_{p(·)} dν(y)`.
pub fn minkowski_check(
    f: impl Fn(&[f64], &[f64]) -> f64,
    p: &ExponentFunction,
    outer: &DiscreteMeasure,
    inner: &DiscreteMeasure,
) -> Result<InequalityRecord> {
    let space = LpSpace::new(outer.clone(), p)?;
    let mut integrated = vec![0.0; outer.len()];
    let mut norm_terms = Vec::with_capacity(inner.len());
    for (y, &w) in inner.points().zip(inner.weights()) {
        let slice = outer.sample(|x| f(x, y));
        for (acc, v) in integrated.iter_mut().zip(&slice) {
            *acc += w * v;
        }
        norm_terms.push(w * space.norm(&slice)?.value);
    }
    let lhs = space.norm(&integrated)?.value;
    Ok(InequalityRecord::new(lhs, 4.0 * pairwise_sum(&norm_terms)))
}

/// Sampled lower bound for the associate norm `‖f‖′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateReport {
    /// `max_g ∫|f||g| dm` over candidates normalized to `‖g‖_{p′(·)} = 1`.
    pub bound: f64,
    pub norm: f64,
    /// `bound / norm`; must not exceed 2.
    pub ratio: f64,
    pub pass: bool,
}

pub fn conjugate_lower_bound(
    m: &DiscreteMeasure,
    f: &[f64],
    p: &ExponentFunction,
    candidates: &[Vec<f64>],
) -> Result<ConjugateReport> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let dual = p.conjugate()?;
    let dual_space = LpSpace::new(m.clone(), &dual)?;
    let norm = LpSpace::new(m.clone(), p)?.norm(f)?.value;
    let mut bound = 0.0f64;
    for g in candidates {
        let ng = dual_space.norm(g)?.value;
        if ng == 0.0 {
            continue;
        }
        let prod: Vec<f64> = f.iter().zip(g).map(|(a, b)| (a * b).abs() / ng).collect();
        bound = bound.max(m.integrate(&prod));
    }
    let ratio = if norm == 0.0 { 0.0 } else { bound / norm };
    let pass = bound <= 2.0 * norm * (1.0 + INEQ_REL_TOL) + 1e-14;
    Ok(ConjugateReport {
        bound,
        norm,
        ratio,
        pass,
    })
}
