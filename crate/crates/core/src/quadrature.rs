//! Generalized Gauss–Laguerre quadrature for the weight `x^s e^{-x}`.
//!
//! Rules are built by the Golub–Welsch method: the nodes are the
//! eigenvalues of the Jacobi matrix of the generalized Laguerre recurrence
//! (diagonal `2i + s + 1`, off-diagonal `√(i(i+s))`) and the weights are
//! the squared first components of the normalized eigenvectors. Because the
//! weights are normalized to sum to one, `Σ w_i f(x_i)` approximates the
//! twisted Mellin transform directly, without ever forming `Γ(s+1)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;

pub const MAX_NODES: usize = 512;
pub const INITIAL_NODES: usize = 16;
pub const MIN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerreRule {
    s: f64,
    requested: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerreRule {
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Requested node count.
    pub fn n(&self) -> usize {
        self.requested
    }

    /// Nodes actually carried. Nodes whose weight underflows to zero (beyond
    /// `x ≈ 745` the factor `e^{-x}` is below the smallest double) are
    /// dropped, so this can be smaller than [`GaussLaguerreRule::n`] for
    /// large rules.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Strictly increasing, all positive.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive, normalized to sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i f(x_i)`
    pub fn integrate(&self, f: &FunctionSpec) -> Result<f64> {
        self.integrate_with(|x| f.evaluate(x))
    }

    pub fn integrate_with<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(*x)?;
        }
        Ok(sum)
    }
}

/// Builds the `n`-point rule for the weight `x^s e^{-x}`.
pub fn build_rule(s: f64, n: usize) -> Result<GaussLaguerreRule> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("build_rule", format!("s must be >= 0, got {s}")));
    }
    build_rule_any(s, n)
}

/// Rule for any Laguerre parameter `s > −1`; negative parameters arise when
/// a singular factor `x^β` of the integrand is moved into the weight.
fn build_rule_any(s: f64, n: usize) -> Result<GaussLaguerreRule> {
    if !(s > -1.0) || !s.is_finite() {
        return Err(Error::domain("build_rule", format!("parameter must be > -1, got {s}")));
    }
    if n == 0 || n > MAX_NODES {
        return Err(Error::range(
            "build_rule",
            format!("node count must be in 1..={MAX_NODES}, got {n}"),
        ));
    }
    let mut diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + s + 1.0).collect();
    let mut off: Vec<f64> = (0..n)
        .map(|i| {
            let i = (i + 1) as f64;
            (i * (i + s)).sqrt()
        })
        .collect();
    off[n - 1] = 0.0;
    let mut first_row = vec![0.0; n];
    first_row[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first_row)
        .map_err(|()| Error::EigenNoConvergence { n, s })?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first_row.into_iter().map(|v| v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs
        .into_iter()
        .map(|(x, w)| (x, w / total))
        .filter(|(_, w)| *w > 0.0)
        .unzip();
    Ok(GaussLaguerreRule {
        s,
        requested: n,
        nodes,
        weights,
    })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `diag` is overwritten with the eigenvalues, `off[i]` couples rows `i` and
/// `i + 1` (the last entry is scratch). Only the first row of the
/// eigenvector matrix is accumulated, in `first_row`.
fn tridiagonal_ql(
    diag: &mut [f64],
    off: &mut [f64],
    first_row: &mut [f64],
) -> std::result::Result<(), ()> {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(());
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut sin, mut cos, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = sin * off[i];
                let b = cos * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                sin = f / r;
                cos = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * sin + 2.0 * cos * b;
                p = sin * r;
                diag[i + 1] = g + p;
                g = cos * r - b;
                let z = first_row[i + 1];
                first_row[i + 1] = sin * first_row[i] + cos * z;
                first_row[i] = cos * first_row[i] - sin * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

type RuleKey = (u64, usize);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<GaussLaguerreRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<GaussLaguerreRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const CACHE_CAPACITY: usize = 2048;

/// Same as [`build_rule`], memoized on `(s, n)`.
pub fn cached_rule(s: f64, n: usize) -> Result<Arc<GaussLaguerreRule>> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("build_rule", format!("s must be >= 0, got {s}")));
    }
    cached_rule_any(s, n)
}

fn cached_rule_any(s: f64, n: usize) -> Result<Arc<GaussLaguerreRule>> {
    let key = (s.to_bits(), n);
    if let Some(rule) = rule_cache().read().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule_any(s, n)?);
    let mut cache = rule_cache().write().unwrap();
    if cache.len() >= CACHE_CAPACITY {
        cache.clear();
    }
    Ok(Arc::clone(cache.entry(key).or_insert(rule)))
}

pub fn integrate(rule: &GaussLaguerreRule, f: &FunctionSpec) -> Result<f64> {
    rule.integrate(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    ClosedForm,
    Series,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub method: Method,
    /// False when adaptive quadrature hit the node cap before meeting its
    /// tolerance; `value` is then the best available estimate.
    pub converged: bool,
}

impl TransformValue {
    pub fn exact(value: f64, method: Method) -> Self {
        TransformValue {
            value,
            error_estimate: 0.0,
            nodes_used: 1,
            method,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: 1e-10,
            max_nodes: MAX_NODES,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureConfig {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol >= MIN_TOL) || !self.tol.is_finite() {
            return Err(Error::domain(
                "adaptive_transform",
                format!("tol must be >= {MIN_TOL}, got {}", self.tol),
            ));
        }
        if self.max_nodes < INITIAL_NODES * 2 || self.max_nodes > MAX_NODES {
            return Err(Error::range(
                "adaptive_transform",
                format!(
                    "max_nodes must be in {}..={MAX_NODES}, got {}",
                    INITIAL_NODES * 2,
                    self.max_nodes
                ),
            ));
        }
        Ok(())
    }
}

/// Doubles the node count from 16 until successive estimates agree to
/// `tol · (1 + |value|)` or the node cap is reached.
///
/// Gauss–Laguerre converges fast only when the integrand is smooth at the
/// origin, so the endpoint behaviour of `f` decides the route:
/// * smooth `f`: the rule for `x^s e^{-x}` directly;
/// * `f = x^β h` with `h` smooth: `Γ(s+β+1)/Γ(s+1)` times the rule for
///   `x^{s+β} e^{-x}` applied to `h`;
/// * logarithmic singularity: exp-sinh quadrature ([`double_exponential_with`]).
pub fn adaptive_transform(f: &FunctionSpec, s: f64, tol: f64) -> Result<TransformValue> {
    adaptive_transform_config(f, s, &QuadratureConfig::with_tol(tol))
}

pub fn adaptive_transform_config(f: &FunctionSpec, s: f64, config: &QuadratureConfig) -> Result<TransformValue> {
    check_parameter("adaptive_transform", s)?;
    match f.endpoint_factor() {
        Some((beta, _)) if beta == 0.0 => adaptive_transform_with(|x| f.evaluate(x), s, config),
        Some((beta, h)) => {
            let shifted = s + beta;
            if shifted <= -1.0 {
                return Err(Error::Divergence(format!(
                    "{f} behaves like x^{beta} at 0, not integrable against x^{s}"
                )));
            }
            let scale = crate::specfun::gamma_ratio(s, beta)?;
            let mut v = gauss_laguerre_adaptive(|x| h.evaluate(x), shifted, config)?;
            v.value *= scale;
            v.error_estimate *= scale;
            Ok(v)
        }
        None => double_exponential_with(|x| f.evaluate(x), s, config),
    }
}

fn check_parameter(func: &'static str, s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("s must be >= 0, got {s}")))
    }
}

/// Plain Gauss–Laguerre doubling on an arbitrary integrand. Accurate only
/// when the integrand is smooth at the origin.
pub fn adaptive_transform_with<F>(f: F, s: f64, config: &QuadratureConfig) -> Result<TransformValue>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_parameter("adaptive_transform", s)?;
    gauss_laguerre_adaptive(f, s, config)
}

fn gauss_laguerre_adaptive<F>(mut f: F, s: f64, config: &QuadratureConfig) -> Result<TransformValue>
where
    F: FnMut(f64) -> Result<f64>,
{
    config.validate()?;
    let mut n = INITIAL_NODES;
    let mut previous = cached_rule_any(s, n)?.integrate_with(&mut f)?;
    loop {
        let next_n = n * 2;
        let current = cached_rule_any(s, next_n)?.integrate_with(&mut f)?;
        let diff = (current - previous).abs();
        let converged = diff <= config.tol * (1.0 + current.abs());
        if converged || next_n * 2 > config.max_nodes {
            return Ok(TransformValue {
                value: current,
                error_estimate: diff,
                nodes_used: next_n,
                method: Method::Quadrature,
                converged,
            });
        }
        previous = current;
        n = next_n;
    }
}

const DE_MAX_LEVEL: u32 = 12;
const DE_MAX_T: f64 = 8.0;
// ln of the smallest weight·jacobian worth evaluating
const DE_LOG_CUTOFF: f64 = -760.0;

/// `M f(s)` by exp-sinh quadrature: `x = m·exp((π/2) sinh t)` centred on
/// the mode `m` of the weight, trapezoid in `t` with the step halved until
/// successive sums agree. Integrable algebraic and logarithmic
/// singularities at the origin are absorbed by the double-exponential
/// decay of the transformed integrand.
///
/// `nodes_used` counts integrand evaluations; `config.max_nodes` is not
/// consulted (the level cap bounds the work instead).
pub fn double_exponential_with<F>(mut f: F, s: f64, config: &QuadratureConfig) -> Result<TransformValue>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_parameter("double_exponential", s)?;
    config.validate()?;
    let ln_norm = crate::specfun::ln_gamma(s + 1.0)?;
    let ln_center = s.max(1.0).ln();
    let mut evaluations = 0usize;
    // weight·jacobian·f at t, or None once the tail is negligible
    let mut term = |t: f64| -> Result<Option<f64>> {
        let ln_x = ln_center + std::f64::consts::FRAC_PI_2 * t.sinh();
        let x = ln_x.exp();
        let log_weight =
            (s + 1.0) * ln_x - x - ln_norm + (std::f64::consts::FRAC_PI_2 * t.cosh()).ln();
        if x == 0.0 || !x.is_finite() || log_weight < DE_LOG_CUTOFF {
            return Ok(None);
        }
        evaluations += 1;
        Ok(Some(f(x)? * log_weight.exp()))
    };
    let centre = term(0.0)?.unwrap_or(0.0);
    // Σ over t = offset + k·stride on both sides of 0, scanning outward
    let mut sweep = |offset: f64, stride: f64| -> Result<f64> {
        let mut sum = 0.0;
        for sign in [1.0, -1.0] {
            let mut t = offset;
            while t <= DE_MAX_T {
                match term(sign * t)? {
                    Some(v) => sum += v,
                    None if sign * t > 0.0 || t > 1.0 => break,
                    None => {}
                }
                t += stride;
            }
        }
        Ok(sum)
    };

    let mut h = 1.0;
    let mut total = sweep(1.0, 1.0)? + centre;
    let mut estimate = total * h;
    let mut diff = f64::INFINITY;
    for level in 1..=DE_MAX_LEVEL {
        h /= 2.0;
        total += sweep(h, 2.0 * h)?;
        let next = total * h;
        diff = (next - estimate).abs();
        estimate = next;
        if level >= 3 && diff <= config.tol * (1.0 + estimate.abs()) {
            break;
        }
    }
    Ok(TransformValue {
        value: estimate,
        error_estimate: diff,
        nodes_used: evaluations,
        method: Method::Quadrature,
        converged: diff <= config.tol * (1.0 + estimate.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Sample mean and standard error of `f(X)`, `X ~ Gamma(s+1, 1)`.
pub fn monte_carlo_oracle(f: &FunctionSpec, s: f64, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    monte_carlo_with(|x| f.evaluate(x), s, samples, seed)
}

pub fn monte_carlo_with<F>(mut f: F, s: f64, samples: usize, seed: u64) -> Result<MonteCarloEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if samples < 1000 {
        return Err(Error::range(
            "monte_carlo_oracle",
            format!("need at least 1000 samples, got {samples}"),
        ));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("monte_carlo_oracle", format!("s must be >= 0, got {s}")));
    }
    let gamma = Gamma::new(s + 1.0, 1.0)
        .map_err(|e| Error::domain("monte_carlo_oracle", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        let mut x: f64 = gamma.sample(&mut rng);
        if x <= 0.0 {
            x = f64::MIN_POSITIVE;
        }
        let y = f(x)?;
        let delta = y - mean;
        mean += delta / k as f64;
        m2 += delta * (y - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    Ok(MonteCarloEstimate {
        mean,
        stderr: (variance / samples as f64).sqrt(),
        samples,
    })
}
