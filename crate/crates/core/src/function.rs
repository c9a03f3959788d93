//! Catalog functions and combinators that the transform acts on.
//!
//! Every function is defined on `x > 0`, has polynomial growth, and carries
//! analytic derivatives of all orders. A handful of kinds also have an
//! analytic antiderivative `∫_0^x f(t) dt`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `x^a`
    Power(f64),
    /// `Σ c_k x^k`, coefficients in ascending powers.
    MonomialPoly(Vec<f64>),
    /// `e^{-cx}`, i.e. `a^{-x}` with `ln a = c`.
    ExpDecay(f64),
    /// `1/(1 - e^{-x})`
    Geom,
    /// `x/(1 - e^{-x})`
    Todd,
    /// `(ln x)^n`
    LogPower(u32),
    /// `sin(ax)`
    Sine(f64),
    /// `cos(ax)`
    Cosine(f64),
    /// `1/(1 + x)`
    RationalDecay,
    /// `e^{-x²/2}`
    Gaussian,
    /// `x ↦ inner(dilation · x)`
    Scaled {
        inner: Box<FunctionSpec>,
        dilation: f64,
    },
    /// `x ↦ x^a · inner(x)`
    ProductPower { inner: Box<FunctionSpec>, a: f64 },
    /// `x ↦ e^{-cx} · inner(x)`
    Damped { inner: Box<FunctionSpec>, c: f64 },
    /// `Σ w_i f_i`
    Combination(Vec<(f64, FunctionSpec)>),
}

/// A function together with the highest derivative order callers may ask
/// for. `None` means unlimited.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    derivative_limit: Option<u32>,
}

impl From<FunctionKind> for FunctionSpec {
    fn from(kind: FunctionKind) -> Self {
        FunctionSpec {
            kind,
            derivative_limit: None,
        }
    }
}

fn positive(func: &'static str, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(func, format!("{name} must be positive, got {v}")))
    }
}

fn finite(func: &'static str, name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(func, format!("{name} must be finite, got {v}")))
    }
}

impl FunctionSpec {
    pub fn power(a: f64) -> Result<Self> {
        Ok(FunctionKind::Power(finite("power", "exponent", a)?).into())
    }

    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("poly", "needs at least one coefficient"));
        }
        for c in &coeffs {
            finite("poly", "coefficient", *c)?;
        }
        Ok(FunctionKind::MonomialPoly(coeffs).into())
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::poly(vec![c])
    }

    /// `x^n` as a polynomial.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        FunctionKind::MonomialPoly(coeffs).into()
    }

    pub fn exp_decay(c: f64) -> Result<Self> {
        Ok(FunctionKind::ExpDecay(positive("exp_decay", "rate", c)?).into())
    }

    pub fn geom() -> Self {
        FunctionKind::Geom.into()
    }

    pub fn todd() -> Self {
        FunctionKind::Todd.into()
    }

    pub fn log_power(n: u32) -> Self {
        FunctionKind::LogPower(n).into()
    }

    pub fn sine(a: f64) -> Result<Self> {
        Ok(FunctionKind::Sine(finite("sin", "frequency", a)?).into())
    }

    pub fn cosine(a: f64) -> Result<Self> {
        Ok(FunctionKind::Cosine(finite("cos", "frequency", a)?).into())
    }

    pub fn rational_decay() -> Self {
        FunctionKind::RationalDecay.into()
    }

    pub fn gaussian() -> Self {
        FunctionKind::Gaussian.into()
    }

    /// `x ↦ self(dilation · x)`
    pub fn scaled(self, dilation: f64) -> Result<Self> {
        let dilation = positive("scaled", "dilation", dilation)?;
        Ok(FunctionKind::Scaled {
            inner: Box::new(self),
            dilation,
        }
        .into())
    }

    /// `x ↦ x^a · self(x)`
    pub fn times_power(self, a: f64) -> Result<Self> {
        let a = finite("xpow", "exponent", a)?;
        Ok(FunctionKind::ProductPower {
            inner: Box::new(self),
            a,
        }
        .into())
    }

    /// `x ↦ e^{-cx} · self(x)`
    pub fn damped(self, c: f64) -> Result<Self> {
        let c = positive("damped", "rate", c)?;
        Ok(FunctionKind::Damped {
            inner: Box::new(self),
            c,
        }
        .into())
    }

    pub fn combination(terms: Vec<(f64, FunctionSpec)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("combination", "needs at least one term"));
        }
        for (w, _) in &terms {
            finite("combination", "weight", *w)?;
        }
        Ok(FunctionKind::Combination(terms).into())
    }

    /// Caps the derivative order that [`FunctionSpec::derivative`] will
    /// answer, modelling a function known only to finite smoothness.
    pub fn with_derivative_limit(mut self, limit: u32) -> Self {
        self.derivative_limit = Some(limit);
        self
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn derivative_limit(&self) -> Option<u32> {
        self.derivative_limit
    }

    pub fn supports_derivative(&self, order: u32) -> bool {
        self.derivative_limit.is_none_or(|m| order <= m)
    }

    /// Exponent `N` with `|f(x)| ≤ C x^N` for large `x`. Decaying kinds
    /// report their decay rate when it is algebraic and `0` otherwise.
    pub fn growth_degree(&self) -> f64 {
        match &self.kind {
            FunctionKind::Power(a) => *a,
            FunctionKind::MonomialPoly(c) => poly_degree(c) as f64,
            FunctionKind::ExpDecay(_) | FunctionKind::Gaussian => 0.0,
            FunctionKind::Geom => 0.0,
            FunctionKind::Todd => 1.0,
            FunctionKind::LogPower(0) => 0.0,
            // (ln x)^n = o(x^ε) for every ε > 0
            FunctionKind::LogPower(_) => 0.5,
            FunctionKind::Sine(_) | FunctionKind::Cosine(_) => 0.0,
            FunctionKind::RationalDecay => -1.0,
            FunctionKind::Scaled { inner, .. } => inner.growth_degree(),
            FunctionKind::ProductPower { inner, a } => inner.growth_degree() + a,
            FunctionKind::Damped { .. } => 0.0,
            FunctionKind::Combination(terms) => terms
                .iter()
                .map(|(_, f)| f.growth_degree())
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// True for the Schwartz-class catalog entries.
    pub fn is_schwartz(&self) -> bool {
        matches!(self.kind, FunctionKind::ExpDecay(_) | FunctionKind::Gaussian)
    }

    /// Splits off the algebraic behaviour at the origin: `f(x) = x^β h(x)`
    /// with `h` analytic on `[0, ∞)`. `None` when `f` has a logarithmic
    /// singularity at `0` or mixes exponents that differ by non-integers.
    pub fn endpoint_factor(&self) -> Option<(f64, FunctionSpec)> {
        let smooth = || Some((0.0, self.clone()));
        match &self.kind {
            FunctionKind::Power(a) if is_nonneg_integer(*a) => smooth(),
            FunctionKind::Power(a) => Some((*a, FunctionSpec::constant(1.0).ok()?)),
            FunctionKind::Geom => Some((-1.0, FunctionSpec::todd())),
            FunctionKind::LogPower(0) => smooth(),
            FunctionKind::LogPower(_) => None,
            FunctionKind::MonomialPoly(_)
            | FunctionKind::ExpDecay(_)
            | FunctionKind::Todd
            | FunctionKind::Sine(_)
            | FunctionKind::Cosine(_)
            | FunctionKind::RationalDecay
            | FunctionKind::Gaussian => smooth(),
            FunctionKind::Scaled { inner, dilation } => {
                let (beta, h) = inner.endpoint_factor()?;
                if beta == 0.0 {
                    return smooth();
                }
                let h = FunctionSpec::combination(vec![(dilation.powf(beta), h.scaled(*dilation).ok()?)]).ok()?;
                Some((beta, h))
            }
            FunctionKind::ProductPower { inner, a } => {
                let (beta, h) = inner.endpoint_factor()?;
                let total = beta + a;
                if is_nonneg_integer(total) {
                    return smooth();
                }
                Some((total, h))
            }
            FunctionKind::Damped { inner, c } => {
                let (beta, h) = inner.endpoint_factor()?;
                if beta == 0.0 {
                    return smooth();
                }
                Some((beta, h.damped(*c).ok()?))
            }
            FunctionKind::Combination(terms) => {
                let parts = terms
                    .iter()
                    .map(|(w, g)| g.endpoint_factor().map(|(b, h)| (*w, b, h)))
                    .collect::<Option<Vec<_>>>()?;
                let beta = parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
                if parts.iter().all(|p| is_nonneg_integer(p.1)) {
                    return smooth();
                }
                let mut out = Vec::with_capacity(parts.len());
                for (w, b, h) in parts {
                    let gap = b - beta;
                    if !is_nonneg_integer(gap) {
                        return None;
                    }
                    let h = if gap == 0.0 { h } else { h.times_power(gap.round()).ok()? };
                    out.push((w, h));
                }
                Some((beta, FunctionSpec::combination(out).ok()?))
            }
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.derivative_unchecked(0, x)
    }

    /// The `order`-th derivative at `x`.
    pub fn derivative(&self, order: u32, x: f64) -> Result<f64> {
        if !self.supports_derivative(order) {
            return Err(Error::UnsupportedFunction(format!(
                "{self} has no derivative of order {order}"
            )));
        }
        self.derivative_unchecked(order, x)
    }

    fn derivative_unchecked(&self, r: u32, x: f64) -> Result<f64> {
        let value = match &self.kind {
            FunctionKind::Power(a) => {
                require_positive(self, x)?;
                power_derivative(*a, r, x)
            }
            FunctionKind::MonomialPoly(c) => {
                let d = differentiate_coeffs(c, r);
                horner(&d, x)
            }
            FunctionKind::ExpDecay(c) => (-c).powi(r as i32) * (-c * x).exp(),
            FunctionKind::Geom => {
                require_positive(self, x)?;
                geom_derivative(r, x)
            }
            FunctionKind::Todd => {
                require_positive(self, x)?;
                let mut v = x * geom_derivative(r, x);
                if r > 0 {
                    v += f64::from(r) * geom_derivative(r - 1, x);
                }
                v
            }
            FunctionKind::LogPower(n) => {
                require_positive(self, x)?;
                log_power_derivative(*n, r, x)
            }
            FunctionKind::Sine(a) => a.powi(r as i32) * shifted_sin(a * x, r),
            FunctionKind::Cosine(a) => a.powi(r as i32) * shifted_sin(a * x, r + 1),
            FunctionKind::RationalDecay => {
                if x <= -1.0 {
                    return Err(Error::Evaluation {
                        x,
                        detail: "1/(1+x) needs x > -1".into(),
                    });
                }
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(r) * (1.0 + x).powi(-(r as i32) - 1)
            }
            FunctionKind::Gaussian => {
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                sign * hermite_he(r, x) * (-0.5 * x * x).exp()
            }
            FunctionKind::Scaled { inner, dilation } => {
                dilation.powi(r as i32) * inner.derivative_unchecked(r, dilation * x)?
            }
            FunctionKind::ProductPower { inner, a } => {
                require_positive(self, x)?;
                let mut sum = 0.0;
                for k in 0..=r {
                    let pk = power_derivative(*a, k, x);
                    if pk != 0.0 {
                        sum += binomial(r, k) * pk * inner.derivative_unchecked(r - k, x)?;
                    }
                }
                sum
            }
            FunctionKind::Damped { inner, c } => {
                let damp = (-c * x).exp();
                let mut sum = 0.0;
                for k in 0..=r {
                    sum += binomial(r, k)
                        * (-c).powi(k as i32)
                        * damp
                        * inner.derivative_unchecked(r - k, x)?;
                }
                sum
            }
            FunctionKind::Combination(terms) => {
                let mut sum = 0.0;
                for (w, f) in terms {
                    sum += w * f.derivative_unchecked(r, x)?;
                }
                sum
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Evaluation {
                x,
                detail: format!("{self} (derivative {r}) is not finite"),
            })
        }
    }

    /// `x ↦ ∫_0^x f(t) dt`, available for polynomials, `e^{-cx}`, `sin(ax)`,
    /// `cos(ax)` and their linear combinations.
    pub fn antiderivative(&self) -> Result<FunctionSpec> {
        let kind = match &self.kind {
            FunctionKind::MonomialPoly(c) => {
                let mut out = Vec::with_capacity(c.len() + 1);
                out.push(0.0);
                for (k, ck) in c.iter().enumerate() {
                    out.push(ck / (k as f64 + 1.0));
                }
                FunctionKind::MonomialPoly(out)
            }
            FunctionKind::ExpDecay(c) => FunctionKind::Combination(vec![
                (1.0 / c, FunctionSpec::constant(1.0)?),
                (-1.0 / c, FunctionSpec::exp_decay(*c)?),
            ]),
            FunctionKind::Sine(a) if *a == 0.0 => FunctionKind::MonomialPoly(vec![0.0]),
            FunctionKind::Sine(a) => FunctionKind::Combination(vec![
                (1.0 / a, FunctionSpec::constant(1.0)?),
                (-1.0 / a, FunctionSpec::cosine(*a)?),
            ]),
            FunctionKind::Cosine(a) if *a == 0.0 => FunctionKind::MonomialPoly(vec![0.0, 1.0]),
            FunctionKind::Cosine(a) => {
                FunctionKind::Combination(vec![(1.0 / a, FunctionSpec::sine(*a)?)])
            }
            FunctionKind::Combination(terms) => FunctionKind::Combination(
                terms
                    .iter()
                    .map(|(w, f)| Ok((*w, f.antiderivative()?)))
                    .collect::<Result<_>>()?,
            ),
            _ => {
                return Err(Error::UnsupportedFunction(format!(
                    "no analytic antiderivative for {self}"
                )))
            }
        };
        Ok(kind.into())
    }
}

fn require_positive(f: &FunctionSpec, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Evaluation {
            x,
            detail: format!("{f} is only defined for x > 0"),
        })
    }
}

pub(crate) fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * f64::from(n - i) / f64::from(i + 1);
    }
    b.round()
}

fn is_nonneg_integer(v: f64) -> bool {
    v >= 0.0 && v.fract() == 0.0
}

fn poly_degree(c: &[f64]) -> usize {
    c.iter().rposition(|v| *v != 0.0).unwrap_or(0)
}

fn differentiate_coeffs(c: &[f64], r: u32) -> Vec<f64> {
    let r = r as usize;
    if r >= c.len() {
        return Vec::new();
    }
    c.iter()
        .enumerate()
        .skip(r)
        .map(|(k, ck)| {
            let falling: f64 = ((k - r + 1)..=k).map(|i| i as f64).product();
            ck * falling
        })
        .collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ck| acc * x + ck)
}

/// d^r/dx^r x^a = a (a-1) ... (a-r+1) x^(a-r)
fn power_derivative(a: f64, r: u32, x: f64) -> f64 {
    let mut coeff = 1.0;
    for i in 0..r {
        coeff *= a - f64::from(i);
    }
    if coeff == 0.0 {
        return 0.0;
    }
    let exponent = a - f64::from(r);
    if exponent.fract() == 0.0 && exponent.abs() < 1024.0 {
        coeff * x.powi(exponent as i32)
    } else {
        coeff * x.powf(exponent)
    }
}

/// sin(θ + rπ/2) without rounding the phase.
fn shifted_sin(theta: f64, r: u32) -> f64 {
    match r % 4 {
        0 => theta.sin(),
        1 => theta.cos(),
        2 => -theta.sin(),
        _ => -theta.cos(),
    }
}

/// Probabilists' Hermite polynomial He_r.
fn hermite_he(r: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if r == 0 {
        return prev;
    }
    for n in 1..r {
        let next = x * cur - f64::from(n) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivatives of `1/(1 - e^{-x}) = 1 + g` with `g = 1/(e^x - 1)`.
///
/// `g' = -(g + g²)`, so every derivative is a polynomial in `g` whose
/// coefficients share one sign; evaluating it in `g` keeps full relative
/// accuracy near `x = 0` where `g ~ 1/x`.
fn geom_derivative(r: u32, x: f64) -> f64 {
    let g = 1.0 / x.exp_m1();
    if r == 0 {
        return 1.0 + g;
    }
    // coefficients of p_k(g), ascending in g
    let mut p = vec![0.0, 1.0];
    for _ in 0..r {
        // p_{k+1}(g) = -p_k'(g) (g + g²)
        let mut next = vec![0.0; p.len() + 1];
        for (j, pj) in p.iter().enumerate().skip(1) {
            let d = j as f64 * pj;
            next[j] -= d;
            next[j + 1] -= d;
        }
        p = next;
    }
    horner(&p, g)
}

/// d^r/dx^r (ln x)^n = x^{-r} Σ_j c_j (ln x)^j
fn log_power_derivative(n: u32, r: u32, x: f64) -> f64 {
    let n = n as usize;
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    for k in 0..r {
        let kf = f64::from(k);
        let mut next = vec![0.0; n + 1];
        for j in 0..=n {
            next[j] = -kf * c[j] + if j < n { (j as f64 + 1.0) * c[j + 1] } else { 0.0 };
        }
        c = next;
    }
    horner(&c, x.ln()) * x.powi(-(r as i32))
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Power(a) => write!(f, "power({a})"),
            FunctionKind::MonomialPoly(c) if c.len() == 1 => write!(f, "const({})", c[0]),
            FunctionKind::MonomialPoly(c) => {
                write!(f, "poly(")?;
                for (i, ck) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{ck}")?;
                }
                write!(f, ")")
            }
            FunctionKind::ExpDecay(c) => write!(f, "exp_decay({c})"),
            FunctionKind::Geom => write!(f, "geom"),
            FunctionKind::Todd => write!(f, "todd"),
            FunctionKind::LogPower(n) => write!(f, "log({n})"),
            FunctionKind::Sine(a) => write!(f, "sin({a})"),
            FunctionKind::Cosine(a) => write!(f, "cos({a})"),
            FunctionKind::RationalDecay => write!(f, "rational_decay"),
            FunctionKind::Gaussian => write!(f, "gaussian"),
            FunctionKind::Scaled { inner, dilation } => write!(f, "scaled({inner},{dilation})"),
            FunctionKind::ProductPower { inner, a } => write!(f, "xpow({inner},{a})"),
            FunctionKind::Damped { inner, c } => write!(f, "damped({inner},{c})"),
            FunctionKind::Combination(terms) => {
                write!(f, "sum(")?;
                for (i, (w, t)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w},{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}
