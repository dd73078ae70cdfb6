//! Multi-indices, normalized Hermite polynomials and finite Hermite expansions.
//!
//! `h_ν` is orthonormal in `L²(γ_d)`. One-dimensional values come from the normalized
//! three-term recurrence
//!
//! ```text
//! h_{n+1}(x) = x √(2/(n+1)) h_n(x) − √(n/(n+1)) h_{n−1}(x),   h_0 = 1, h_1 = √2 x,
//! ```
//!
//! so `2^n n!` is never formed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum, GaussianRule, MAX_DIM};

/// Default degree cap for expansions.
pub const DEFAULT_DEGREE_CAP: u32 = 12;

/// `ν ∈ ℕ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() || entries.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "multi-index length {} outside 1..={MAX_DIM}",
                entries.len()
            )));
        }
        Ok(Self(entries))
    }

    /// The one-dimensional index `(n)`.
    pub fn single(n: u32) -> Self {
        Self(vec![n])
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|ν|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `ν!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n).map(f64::from).product::<f64>())
            .product()
    }

    /// All multi-indices of length `dim` with `|ν| ≤ cap`, ordered by `|ν|` then
    /// lexicographically.
    pub fn all_up_to(dim: usize, cap: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in 0..=cap {
            let mut cur = vec![0u32; dim];
            compositions(order, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        compositions(remaining - v, pos + 1, cur, out);
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `h_n(x)` for the `L²(γ₁)`-normalized family.
pub fn hermite_1d(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = std::f64::consts::SQRT_2 * x;
    for m in 1..n {
        let mf = f64::from(m);
        let next = x * (2.0 / (mf + 1.0)).sqrt() * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[n] = h_n(x)` for `n = 0..out.len()`.
pub fn hermite_1d_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x;
    for m in 1..out.len() - 1 {
        let mf = m as f64;
        out[m + 1] = x * (2.0 / (mf + 1.0)).sqrt() * out[m] - (mf / (mf + 1.0)).sqrt() * out[m - 1];
    }
}

/// `h_ν(x) = Π_i h_{ν_i}(x_i)`.
pub fn hermite_multi(nu: &MultiIndex, x: &[f64]) -> Result<f64> {
    if nu.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.dim(),
            got: x.len(),
        });
    }
    Ok(nu
        .0
        .iter()
        .zip(x)
        .map(|(&n, &xi)| hermite_1d(n, xi))
        .product())
}

/// Finite expansion `f = Σ c_ν h_ν` with `|ν| ≤ degree_cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteExpansion {
    dim: usize,
    degree_cap: u32,
    coeffs: BTreeMap<MultiIndex, f64>,
}

/// Parses a function literal:
///
/// * `h:n`: the one-dimensional `h_n`
/// * `expand:[(ν,c),...]`: `Σ c h_ν`, where `ν` is an integer or a bracketed multi-index such as `[1,2]`
/// * `family:random:N:seed`: [`HermiteExpansion::random`] in one dimension with degree cap `N`
pub fn parse_function(s: &str) -> Result<HermiteExpansion> {
    let s = s.trim();
    let bad = |why: &str| Error::invalid(format!("function literal '{s}': {why}"));
    if let Some(rest) = s.strip_prefix("h:") {
        let n: u32 = rest.trim().parse().map_err(|_| bad("expected h:<order>"))?;
        return Ok(HermiteExpansion::basis(MultiIndex::single(n)));
    }
    if let Some(rest) = s.strip_prefix("family:random:") {
        let (n, seed) = rest
            .split_once(':')
            .ok_or_else(|| bad("expected family:random:<N>:<seed>"))?;
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| bad("degree cap is not an integer"))?;
        let seed: u64 = seed
            .trim()
            .parse()
            .map_err(|_| bad("seed is not an integer"))?;
        return HermiteExpansion::random(1, n, seed);
    }
    if let Some(rest) = s.strip_prefix("expand:") {
        let json = rest.replace('(', "[").replace(')', "]");
        let pairs: Vec<(serde_json::Value, f64)> =
            serde_json::from_str(&json).map_err(|e| bad(&format!("expected [(ν,c),...]: {e}")))?;
        if pairs.is_empty() {
            return Err(bad("no terms"));
        }
        let mut terms = Vec::with_capacity(pairs.len());
        for (nu, c) in pairs {
            let nu = match nu {
                serde_json::Value::Number(n) => MultiIndex::single(
                    n.as_u64()
                        .and_then(|v| u32::try_from(v).ok())
                        .ok_or_else(|| bad("bad order"))?,
                ),
                other => MultiIndex::new(
                    serde_json::from_value(other).map_err(|_| bad("bad multi-index"))?,
                )?,
            };
            terms.push((nu, c));
        }
        let dim = terms[0].0.dim();
        return HermiteExpansion::from_terms(dim, terms);
    }
    Err(bad("expected h:, expand: or family:random:"))
}

impl HermiteExpansion {
    pub fn new(dim: usize, degree_cap: u32) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        Ok(Self {
            dim,
            degree_cap,
            coeffs: BTreeMap::new(),
        })
    }

    /// `h_ν` itself, with degree cap `|ν|`.
    pub fn basis(nu: MultiIndex) -> Self {
        let cap = nu.order();
        let dim = nu.dim();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(nu, 1.0);
        Self {
            dim,
            degree_cap: cap,
            coeffs,
        }
    }

    /// Builds from `(ν, c)` pairs; the degree cap is the largest `|ν|`.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut e = Self::new(dim, 0)?;
        for (nu, c) in terms {
            e.degree_cap = e.degree_cap.max(nu.order());
            e.add_term(nu, c)?;
        }
        Ok(e)
    }

    /// Random expansion with every `|ν| ≤ degree_cap` present and coefficients uniform in
    /// `[−1, 1]`, damped by `2^{−|ν|/2}`. Deterministic in `seed`.
    pub fn random(dim: usize, degree_cap: u32, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut e = Self::new(dim, degree_cap)?;
        for nu in MultiIndex::all_up_to(dim, degree_cap) {
            let damp = 2f64.powf(-(nu.order() as f64) / 2.0);
            let c: f64 = rng.random_range(-1.0..=1.0);
            e.add_term(nu, c * damp)?;
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    /// Adds `c` to the coefficient of `ν`.
    pub fn add_term(&mut self, nu: MultiIndex, c: f64) -> Result<()> {
        if nu.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: nu.dim(),
            });
        }
        if nu.order() > self.degree_cap {
            return Err(Error::invalid(format!(
                "|ν| = {} exceeds degree cap {}",
                nu.order(),
                self.degree_cap
            )));
        }
        if !c.is_finite() {
            return Err(Error::NotANumber("expansion coefficient"));
        }
        *self.coeffs.entry(nu).or_insert(0.0) += c;
        Ok(())
    }

    pub fn coeff(&self, nu: &MultiIndex) -> f64 {
        self.coeffs.get(nu).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0.0)
    }

    /// Coefficient-wise `c_ν ↦ m(|ν|) c_ν`.
    pub fn map_by_order(&self, m: impl Fn(u32) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, &c)| (k.clone(), m(k.order()) * c))
            .collect();
        Self {
            dim: self.dim,
            degree_cap: self.degree_cap,
            coeffs,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_by_order(|_| s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        out.degree_cap = self.degree_cap.max(other.degree_cap);
        for (k, &c) in &other.coeffs {
            *out.coeffs.entry(k.clone()).or_insert(0.0) += c;
        }
        Ok(out)
    }

    /// `Σ c_ν h_ν(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// [`eval`](Self::eval) without the length check; `x.len()` must equal `dim`.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let cap = self.max_order() as usize;
        let mut buf = vec![0.0; (cap + 1) * self.dim];
        for (a, &xa) in x.iter().enumerate() {
            hermite_1d_table(xa, &mut buf[a * (cap + 1)..(a + 1) * (cap + 1)]);
        }
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .map(|(nu, &c)| {
                c * nu
                    .0
                    .iter()
                    .enumerate()
                    .map(|(a, &n)| buf[a * (cap + 1) + n as usize])
                    .product::<f64>()
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Largest `|ν|` with a stored coefficient.
    pub fn max_order(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Values grouped by eigen-level: `out[m][i] = Σ_{|ν|=m} c_ν h_ν(x_i)` over the rule's nodes.
    pub fn level_values(&self, rule: &GaussianRule) -> Result<BTreeMap<u32, Vec<f64>>> {
        if rule.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rule.dim(),
            });
        }
        let mut levels: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        let cap = self.max_order() as usize;
        let mut buf = vec![0.0; (cap + 1) * self.dim];
        let n = rule.len();
        for (i, x) in rule.points().enumerate() {
            for (a, &xa) in x.iter().enumerate() {
                hermite_1d_table(xa, &mut buf[a * (cap + 1)..(a + 1) * (cap + 1)]);
            }
            for (nu, &c) in &self.coeffs {
                let v = c * nu
                    .0
                    .iter()
                    .enumerate()
                    .map(|(a, &k)| buf[a * (cap + 1) + k as usize])
                    .product::<f64>();
                levels.entry(nu.order()).or_insert_with(|| vec![0.0; n])[i] += v;
            }
        }
        Ok(levels)
    }

    /// `‖f‖_{L²(γ_d)}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Orthonormal projection `c_ν = ∫ f h_ν dγ_d` for all `|ν| ≤ degree_cap`.
///
/// Needs at least `degree_cap + 1` nodes per axis so that products `h_ν h_β` of
/// polynomial inputs are integrated exactly.
pub fn project(
    f: impl Fn(&[f64]) -> f64,
    rule: &GaussianRule,
    degree_cap: u32,
) -> Result<HermiteExpansion> {
    if rule.nodes_per_axis() < degree_cap as usize + 1 {
        return Err(Error::InsufficientQuadrature {
            nodes: rule.nodes_per_axis(),
            degree_cap,
        });
    }
    let dim = rule.dim();
    let values: Vec<f64> = rule.points().map(&f).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber("projected function"));
    }
    let cap = degree_cap as usize;
    // Per-node Hermite tables, reused for every ν.
    let mut tables = vec![0.0; rule.len() * dim * (cap + 1)];
    for (i, x) in rule.points().enumerate() {
        for (a, &xa) in x.iter().enumerate() {
            let off = (i * dim + a) * (cap + 1);
            hermite_1d_table(xa, &mut tables[off..off + cap + 1]);
        }
    }
    let mut out = HermiteExpansion::new(dim, degree_cap)?;
    for nu in MultiIndex::all_up_to(dim, degree_cap) {
        let terms: Vec<f64> = (0..rule.len())
            .map(|i| {
                let h: f64 =
                    nu.0.iter()
                        .enumerate()
                        .map(|(a, &k)| tables[(i * dim + a) * (cap + 1) + k as usize])
                        .product();
                rule.weights()[i] * values[i] * h
            })
            .collect();
        let c = pairwise_sum(&terms);
        if c != 0.0 {
            out.coeffs.insert(nu, c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_literals() {
        assert_eq!(
            parse_function("h:3").unwrap(),
            HermiteExpansion::basis(MultiIndex::single(3))
        );
        let f = parse_function("expand:[(1,1.0),(4,-0.5)]").unwrap();
        assert_eq!(f.coeff(&MultiIndex::single(4)), -0.5);
        let g = parse_function("expand:[([1,2],0.5),([0,3],1)]").unwrap();
        assert_eq!((g.dim(), g.max_order()), (2, 3));
        assert_eq!(
            parse_function("family:random:5:9").unwrap(),
            HermiteExpansion::random(1, 5, 9).unwrap()
        );
        for bad in [
            "h:x",
            "expand:[]",
            "expand:[(1,2),([1,1],1)]",
            "poly:3",
            "family:random:3",
        ] {
            assert!(parse_function(bad).is_err(), "{bad}");
        }
    }
    use std::f64::consts::SQRT_2;

    // Rodrigues: h_n(x) = (-1)^n e^{x²} (d/dx)^n e^{-x²} / sqrt(2^n n!). The n-th
    // derivative of e^{-x²} is (-1)^n H_n(x) e^{-x²} with physicists' H_n given by
    // its explicit sum, so the oracle evaluates that sum directly.
    fn rodrigues(n: u32, x: f64) -> f64 {
        let mut h = 0.0;
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for m in 0..=n / 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            h += sign * fact(n) / (fact(m) * fact(n - 2 * m)) * (2.0 * x).powi((n - 2 * m) as i32);
        }
        h / (2f64.powi(n as i32) * fact(n)).sqrt()
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_1d(0, 3.7), 1.0);
        assert!((hermite_1d(1, 1.0) - SQRT_2).abs() < 1e-15);
        assert!((hermite_1d(2, 0.0) + 1.0 / SQRT_2).abs() < 1e-15);
        assert!((rodrigues(1, 1.0) - SQRT_2).abs() < 1e-15);
        assert!((rodrigues(2, 0.0) + 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn multi_examples() {
        let x = [3.2, -1.0];
        assert_eq!(
            hermite_multi(&MultiIndex::new(vec![0, 0]).unwrap(), &x).unwrap(),
            1.0
        );
        let v = hermite_multi(&MultiIndex::new(vec![1, 1]).unwrap(), &[1.0, 1.0]).unwrap();
        assert!((v - rodrigues(1, 1.0) * rodrigues(1, 1.0)).abs() < 1e-14);
        assert!((v - 2.0).abs() < 1e-14);
        let v = hermite_multi(&MultiIndex::new(vec![2, 0]).unwrap(), &[0.0, 5.0]).unwrap();
        assert!((v + 1.0 / SQRT_2).abs() < 1e-15);
        assert!(matches!(
            hermite_multi(&MultiIndex::single(1), &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn recurrence_matches_rodrigues() {
        let mut seed = 12345u64;
        for _ in 0..100 {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = -4.0 + 8.0 * ((seed >> 11) as f64 / (1u64 << 53) as f64);
            for n in 0..=10 {
                let a = hermite_1d(n, x);
                let b = rodrigues(n, x);
                assert!(
                    (a - b).abs() <= 1e-9 * b.abs().max(1e-3),
                    "n={n} x={x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn orthonormality_up_to_order_six() {
        for dim in 1..=3 {
            let rule = GaussianRule::new(dim, 8).unwrap();
            let idx = MultiIndex::all_up_to(dim, 6);
            for a in &idx {
                for b in &idx {
                    let v = rule
                        .integrate(|x| hermite_multi(a, x).unwrap() * hermite_multi(b, x).unwrap());
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-10, "d={dim} {a} {b}: {v}");
                }
            }
        }
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::all_up_to(2, 6).len(), 28);
        assert_eq!(MultiIndex::all_up_to(3, 2).len(), 10);
        let nu = MultiIndex::new(vec![2, 3]).unwrap();
        assert_eq!(nu.order(), 5);
        assert_eq!(nu.factorial(), 12.0);
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn projection_examples() {
        let rule = GaussianRule::new(1, 64).unwrap();
        let e = project(|x| hermite_1d(3, x[0]), &rule, 5).unwrap();
        for (nu, c) in e.terms() {
            if nu.order() == 3 {
                assert!((c - 1.0).abs() < 1e-12);
            } else {
                assert!(c.abs() < 1e-12);
            }
        }
        let e = project(|x| x[0], &rule, 2).unwrap();
        assert!((e.coeff(&MultiIndex::single(1)) - 1.0 / SQRT_2).abs() < 1e-13);
        assert!(e.coeff(&MultiIndex::single(0)).abs() < 1e-13);
        let e = project(|_| 1.0, &rule, 0).unwrap();
        assert!((e.coeff(&MultiIndex::single(0)) - 1.0).abs() < 1e-13);

        let small = GaussianRule::new(1, 4).unwrap();
        assert!(matches!(
            project(|x| x[0], &small, 5),
            Err(Error::InsufficientQuadrature { .. })
        ));
    }

    #[test]
    fn project_inverts_evaluate() {
        let rule = GaussianRule::new(2, 12).unwrap();
        let terms = MultiIndex::all_up_to(2, 6)
            .into_iter()
            .enumerate()
            .map(|(i, nu)| (nu, (i as f64 * 0.37).sin()));
        let f = HermiteExpansion::from_terms(2, terms).unwrap();
        let g = project(|x| f.eval_unchecked(x), &rule, 6).unwrap();
        for nu in MultiIndex::all_up_to(2, 6) {
            assert!((f.coeff(&nu) - g.coeff(&nu)).abs() < 1e-10);
        }
    }

    #[test]
    fn level_values_sum_to_eval() {
        let rule = GaussianRule::new(1, 6).unwrap();
        let f = HermiteExpansion::from_terms(
            1,
            [(MultiIndex::single(1), 0.5), (MultiIndex::single(3), -2.0)],
        )
        .unwrap();
        let lv = f.level_values(&rule).unwrap();
        for (i, x) in rule.points().enumerate() {
            let s: f64 = lv.values().map(|v| v[i]).sum();
            assert!((s - f.eval(x).unwrap()).abs() < 1e-13);
        }
    }
}
