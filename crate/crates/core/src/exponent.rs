//! Exponent functions `p(·)` on `ℝ^d` and `q(·)` on `(0, ∞)`.
//!
//! Every exponent is real-valued and bounded, `1 ≤ p₋ ≤ p(x) ≤ p₊ < ∞`; the set where
//! `p = ∞` is always empty.
//!
//! Class tags on the built-in families are certified analytically:
//!
//! * constant `c`: every class, all constants zero.
//! * `p(x) = p_∞ + c/(1+|x|²)`: `|p(x) − p_∞| = c/(1+|x|²) ≤ c/|x|²` gives the Gaussian decay
//!   class with `C = c`; the map is smooth with bounded gradient, hence locally
//!   log-Hölder; decay-class membership implies log-Hölder at infinity.
//! * `q(t) = q_∞ + (q₀ − q_∞)/(1+t)`: `|q(t) − q₀| = |q₀ − q_∞| t/(1+t)` and `t ln(1/t)` is
//!   bounded on `(0, 1/2]`; `|q(t) − q_∞| = |q₀ − q_∞|/(1+t)` and `ln t/(1+t)` is bounded on
//!   `(2, ∞)`. So both log-rate limits hold.
//! * weighted harmonic combinations `1/p = Σ wᵢ/pᵢ`, scalings `s·p` and conjugates
//!   `p/(p−1)` are Lipschitz images of their inputs on `[1, ∞)` (for the conjugate, on
//!   `[p₋, ∞)` with `p₋ > 1`), so they keep the tags shared by all inputs.
//!
//! User-supplied exponents carry no tags unless the caller asserts them via
//! [`ExponentFunction::with_asserted_tags`], and even then only tags whose sampled
//! constant is finite are kept.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership flags for the exponent classes used by the smoothness spaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTags {
    /// Locally log-Hölder continuous.
    pub lh0: bool,
    /// Log-Hölder continuous at infinity (base point 0).
    pub lh_inf: bool,
    /// Gaussian decay class: `|p(x) − p_∞| ≤ C/|x|²`.
    pub pgamma_inf: bool,
    /// Log-rate limits at `0` and `∞` on the half-line, with `p₋ ≥ 1`.
    pub p0_inf: bool,
}

impl ClassTags {
    pub const ALL: ClassTags = ClassTags {
        lh0: true,
        lh_inf: true,
        pgamma_inf: true,
        p0_inf: true,
    };
    pub const NONE: ClassTags = ClassTags {
        lh0: false,
        lh_inf: false,
        pgamma_inf: false,
        p0_inf: false,
    };

    pub fn intersect(self, other: ClassTags) -> ClassTags {
        ClassTags {
            lh0: self.lh0 && other.lh0,
            lh_inf: self.lh_inf && other.lh_inf,
            pgamma_inf: self.pgamma_inf && other.pgamma_inf,
            p0_inf: self.p0_inf && other.p0_inf,
        }
    }
}

/// JSON form `{"kind": "constant"|"gaussian"|"time", "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentDescriptor {
    pub kind: String,
    pub params: Vec<f64>,
}

impl ExponentDescriptor {
    pub fn build(&self) -> Result<ExponentFunction> {
        let want = |n: usize| -> Result<()> {
            if self.params.len() != n {
                return Err(Error::invalid(format!(
                    "exponent kind '{}' takes {n} parameter(s), got {}",
                    self.kind,
                    self.params.len()
                )));
            }
            Ok(())
        };
        match self.kind.as_str() {
            "constant" | "const" => {
                want(1)?;
                ExponentFunction::constant(self.params[0])
            }
            "gaussian" => {
                want(2)?;
                ExponentFunction::gaussian_family(self.params[0], self.params[1])
            }
            "time" => {
                want(2)?;
                ExponentFunction::time_family(self.params[0], self.params[1])
            }
            other => Err(Error::invalid(format!("unknown exponent kind '{other}'"))),
        }
    }
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Constant(f64),
    Gaussian {
        p_inf: f64,
        c: f64,
    },
    Time {
        q0: f64,
        q_inf: f64,
    },
    /// `1/p = Σ wᵢ / pᵢ`.
    Harmonic(Vec<(f64, ExponentFunction)>),
    Scaled(f64, Box<ExponentFunction>),
    Conjugate(Box<ExponentFunction>),
    Custom {
        name: String,
        f: EvalFn,
    },
}

/// An evaluable exponent with its bounds, limits and certified classes.
#[derive(Clone)]
pub struct ExponentFunction {
    shape: Shape,
    p_minus: f64,
    p_plus: f64,
    limit_zero: Option<f64>,
    limit_infty: f64,
    tags: ClassTags,
}

impl fmt::Debug for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentFunction")
            .field("desc", &self.describe())
            .field("p_minus", &self.p_minus)
            .field("p_plus", &self.p_plus)
            .field("limit_zero", &self.limit_zero)
            .field("limit_infty", &self.limit_infty)
            .field("tags", &self.tags)
            .finish()
    }
}

impl fmt::Display for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

fn check_ge_one(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 1.0) {
        return Err(Error::invalid(format!(
            "{name} = {v} must be a finite real ≥ 1"
        )));
    }
    Ok(())
}

impl ExponentFunction {
    /// `p ≡ c`.
    pub fn constant(c: f64) -> Result<Self> {
        check_ge_one("constant exponent", c)?;
        Ok(Self {
            shape: Shape::Constant(c),
            p_minus: c,
            p_plus: c,
            limit_zero: Some(c),
            limit_infty: c,
            tags: ClassTags::ALL,
        })
    }

    /// `p(x) = p_∞ + c/(1+|x|²)`.
    pub fn gaussian_family(p_inf: f64, c: f64) -> Result<Self> {
        check_ge_one("p_inf", p_inf)?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::invalid(format!(
                "gaussian family amplitude c = {c} must be ≥ 0"
            )));
        }
        if c == 0.0 {
            return Self::constant(p_inf);
        }
        Ok(Self {
            shape: Shape::Gaussian { p_inf, c },
            p_minus: p_inf,
            p_plus: p_inf + c,
            limit_zero: None,
            limit_infty: p_inf,
            tags: ClassTags {
                lh0: true,
                lh_inf: true,
                pgamma_inf: true,
                p0_inf: false,
            },
        })
    }

    /// `q(t) = q_∞ + (q₀ − q_∞)/(1+t)` on the half-line.
    pub fn time_family(q0: f64, q_inf: f64) -> Result<Self> {
        check_ge_one("q0", q0)?;
        check_ge_one("q_inf", q_inf)?;
        if q0 == q_inf {
            return Self::constant(q0);
        }
        Ok(Self {
            shape: Shape::Time { q0, q_inf },
            p_minus: q0.min(q_inf),
            p_plus: q0.max(q_inf),
            limit_zero: Some(q0),
            limit_infty: q_inf,
            tags: ClassTags {
                lh0: false,
                lh_inf: false,
                pgamma_inf: false,
                p0_inf: true,
            },
        })
    }

    /// User exponent with declared bounds and no class tags.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        p_minus: f64,
        p_plus: f64,
        limit_zero: Option<f64>,
        limit_infty: f64,
    ) -> Result<Self> {
        check_ge_one("p_minus", p_minus)?;
        if !(p_plus.is_finite() && p_plus >= p_minus) {
            return Err(Error::invalid("p_plus must be finite and ≥ p_minus"));
        }
        if !(p_minus..=p_plus).contains(&limit_infty) {
            return Err(Error::invalid(
                "limit at infinity outside [p_minus, p_plus]",
            ));
        }
        Ok(Self {
            shape: Shape::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            p_minus,
            p_plus,
            limit_zero,
            limit_infty,
            tags: ClassTags::NONE,
        })
    }

    /// Tags a user exponent. Each asserted tag survives only if its sampled constant is
    /// finite and the declared bounds hold on the samples.
    pub fn with_asserted_tags(mut self, asserted: ClassTags, samples: &[Vec<f64>]) -> Result<Self> {
        self.check_bounds(samples)?;
        let k = estimate_class_constants(&self, samples)?;
        self.tags = ClassTags {
            lh0: asserted.lh0 && k.c_lh0.is_finite(),
            lh_inf: asserted.lh_inf && k.c_lhinf.is_finite(),
            pgamma_inf: asserted.pgamma_inf && k.c_gamma.is_finite(),
            p0_inf: asserted.p0_inf
                && self.limit_zero.is_some()
                && k.a0.is_finite()
                && k.a_inf.is_finite(),
        };
        Ok(self)
    }

    /// `1/p = Σ wᵢ/pᵢ`. Fails if the combination can drop below 1.
    pub fn harmonic(parts: Vec<(f64, ExponentFunction)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty("harmonic combination"));
        }
        if parts.iter().any(|(w, _)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("harmonic weights must be positive"));
        }
        let inv = |sel: &dyn Fn(&ExponentFunction) -> f64| {
            parts.iter().map(|(w, p)| w / sel(p)).sum::<f64>()
        };
        let p_minus = 1.0 / inv(&|p| p.p_minus);
        let p_plus = 1.0 / inv(&|p| p.p_plus);
        if p_minus < 1.0 - 1e-12 {
            return Err(Error::HypothesisViolated(format!(
                "combined exponent has minimum {p_minus:.6} < 1"
            )));
        }
        let limit_infty = 1.0 / inv(&|p| p.limit_infty);
        let limit_zero = if parts.iter().all(|(_, p)| p.limit_zero.is_some()) {
            Some(
                1.0 / parts
                    .iter()
                    .map(|(w, p)| w / p.limit_zero.unwrap())
                    .sum::<f64>(),
            )
        } else {
            None
        };
        let tags = parts
            .iter()
            .fold(ClassTags::ALL, |t, (_, p)| t.intersect(p.tags));
        Ok(Self {
            shape: Shape::Harmonic(parts),
            p_minus: p_minus.max(1.0),
            p_plus,
            limit_zero,
            limit_infty,
            tags,
        })
    }

    /// `1/p = (1−θ)/p₀ + θ/p₁`.
    pub fn interpolate(p0: &ExponentFunction, p1: &ExponentFunction, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::invalid(format!("θ = {theta} must lie in (0, 1)")));
        }
        Self::harmonic(vec![(1.0 - theta, p0.clone()), (theta, p1.clone())])
    }

    /// `s·p(·)`; requires `s p₋ ≥ 1`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) || s * self.p_minus < 1.0 {
            return Err(Error::HypothesisViolated(format!(
                "s = {s} gives s·p₋ = {} < 1",
                s * self.p_minus
            )));
        }
        Ok(Self {
            shape: Shape::Scaled(s, Box::new(self.clone())),
            p_minus: s * self.p_minus,
            p_plus: s * self.p_plus,
            limit_zero: self.limit_zero.map(|v| s * v),
            limit_infty: s * self.limit_infty,
            tags: self.tags,
        })
    }

    /// `p′ = p/(p−1)`; requires `p₋ > 1`.
    pub fn conjugate(&self) -> Result<Self> {
        if self.p_minus <= 1.0 {
            return Err(Error::HypothesisViolated(
                "conjugate exponent needs p₋ > 1".into(),
            ));
        }
        let conj = |p: f64| p / (p - 1.0);
        Ok(Self {
            shape: Shape::Conjugate(Box::new(self.clone())),
            p_minus: conj(self.p_plus),
            p_plus: conj(self.p_minus),
            limit_zero: self.limit_zero.map(conj),
            limit_infty: conj(self.limit_infty),
            tags: self.tags,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Constant(c) => *c,
            Shape::Gaussian { p_inf, c } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                p_inf + c / (1.0 + r2)
            }
            Shape::Time { q0, q_inf } => q_inf + (q0 - q_inf) / (1.0 + x[0]),
            Shape::Harmonic(parts) => 1.0 / parts.iter().map(|(w, p)| w / p.eval(x)).sum::<f64>(),
            Shape::Scaled(s, p) => s * p.eval(x),
            Shape::Conjugate(p) => {
                let v = p.eval(x);
                v / (v - 1.0)
            }
            Shape::Custom { f, .. } => f(x),
        }
    }

    /// Convenience for half-line exponents.
    pub fn eval_t(&self, t: f64) -> f64 {
        self.eval(&[t])
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn limit_zero(&self) -> Option<f64> {
        self.limit_zero
    }

    pub fn limit_infty(&self) -> f64 {
        self.limit_infty
    }

    pub fn tags(&self) -> ClassTags {
        self.tags
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.shape {
            Shape::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Short textual form; built-ins round-trip through [`parse`](Self::parse).
    pub fn describe(&self) -> String {
        match &self.shape {
            Shape::Constant(c) => format!("const:{c}"),
            Shape::Gaussian { p_inf, c } => format!("gaussian:{p_inf}:{c}"),
            Shape::Time { q0, q_inf } => format!("time:{q0}:{q_inf}"),
            Shape::Harmonic(parts) => {
                let inner: Vec<String> = parts
                    .iter()
                    .map(|(w, p)| format!("{w}/{}", p.describe()))
                    .collect();
                format!("harmonic[{}]", inner.join(","))
            }
            Shape::Scaled(s, p) => format!("{s}*{}", p.describe()),
            Shape::Conjugate(p) => format!("conj({})", p.describe()),
            Shape::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    /// JSON descriptor for the built-in families.
    pub fn descriptor(&self) -> Option<ExponentDescriptor> {
        let (kind, params) = match self.shape {
            Shape::Constant(c) => ("constant", vec![c]),
            Shape::Gaussian { p_inf, c } => ("gaussian", vec![p_inf, c]),
            Shape::Time { q0, q_inf } => ("time", vec![q0, q_inf]),
            _ => return None,
        };
        Some(ExponentDescriptor {
            kind: kind.into(),
            params,
        })
    }

    /// Parses `const:2`, `gaussian:1.5:1`, `time:1.5:3`, or a JSON descriptor.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let d: ExponentDescriptor = serde_json::from_str(s)
                .map_err(|e| Error::invalid(format!("bad exponent descriptor: {e}")))?;
            return d.build();
        }
        let mut it = s.split(':');
        let kind = it.next().unwrap_or_default().to_string();
        let params = it
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number '{v}' in '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        ExponentDescriptor { kind, params }.build()
    }

    /// Verifies `p₋ ≤ p(x) ≤ p₊` on the samples.
    pub fn check_bounds(&self, samples: &[Vec<f64>]) -> Result<()> {
        for x in samples {
            let v = self.eval(x);
            if v.is_nan() {
                return Err(Error::NotANumber("exponent value"));
            }
            let slack = 1e-12 * self.p_plus;
            if v < self.p_minus - slack || v > self.p_plus + slack {
                return Err(Error::invalid(format!(
                    "exponent value {v} at {x:?} outside declared [{}, {}]",
                    self.p_minus, self.p_plus
                )));
            }
        }
        Ok(())
    }
}

/// Empirical suprema over a sample set. Each is a lower bound for the true constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassConstants {
    /// `sup |p(x)−p(y)|·log(e + 1/|x−y|)`.
    pub c_lh0: f64,
    /// `sup |p(x)−p_∞|·log(e + |x|)`.
    pub c_lhinf: f64,
    /// `sup |p(x)−p_∞|·|x|²`.
    pub c_gamma: f64,
    /// `sup_{0<t≤1/2} |q(t)−q(0)|·ln(1/t)`; zero when `q(0)` is undefined.
    pub a0: f64,
    /// `sup_{t>2} |q(t)−q(∞)|·ln t`.
    pub a_inf: f64,
}

pub fn estimate_class_constants(
    p: &ExponentFunction,
    samples: &[Vec<f64>],
) -> Result<ClassConstants> {
    if samples.is_empty() {
        return Err(Error::Empty("exponent samples"));
    }
    let vals: Vec<f64> = samples.iter().map(|x| p.eval(x)).collect();
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber("exponent value"));
    }
    let e = std::f64::consts::E;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut c_lh0 = 0.0f64;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let d: f64 = samples[i]
                .iter()
                .zip(&samples[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d > 0.0 {
                c_lh0 = c_lh0.max((vals[i] - vals[j]).abs() * (e + 1.0 / d).ln());
            }
        }
    }
    let p_inf = p.limit_infty();
    let mut c_lhinf = 0.0f64;
    let mut c_gamma = 0.0f64;
    for (x, &v) in samples.iter().zip(&vals) {
        let r = norm(x);
        c_lhinf = c_lhinf.max((v - p_inf).abs() * (e + r).ln());
        if r > 0.0 {
            c_gamma = c_gamma.max((v - p_inf).abs() * r * r);
        }
    }
    let mut a0 = 0.0f64;
    let mut a_inf = 0.0f64;
    if let Some(q0) = p.limit_zero() {
        for (x, &v) in samples.iter().zip(&vals) {
            let t = x[0];
            if x.len() == 1 && t > 0.0 && t <= 0.5 {
                a0 = a0.max((v - q0).abs() * (1.0 / t).ln());
            }
            if x.len() == 1 && t > 2.0 {
                a_inf = a_inf.max((v - p_inf).abs() * t.ln());
            }
        }
    }
    Ok(ClassConstants {
        c_lh0,
        c_lhinf,
        c_gamma,
        a0,
        a_inf,
    })
}
