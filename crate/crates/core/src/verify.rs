//! Self-verification suites: every closed form, identity, exact polynomial
//! fact and asymptotic property the library relies on, checked against an
//! independent computation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::asymptotics::{expansion, n_expansion, n_expansion_coefficients, n_expansion_terms, n_twisted, remainder_scan};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::polyseq::{
    brute_force_interpretation, coefficient_table, diagonal_fit, egf_truncation, f_poly_recurrence, f_poly_sum,
    vanishing_identity, IntPoly, Interpretation,
};
use crate::quadrature::{adaptive_transform, monte_carlo_oracle};
use crate::specfun::{ln_gamma, polygamma, zeta};
use crate::transform::{alpha_twisted, check_identity, closed_form, schwartz_decay_probe, twisted_mellin, Identity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Catalog,
    Polyseq,
    Asymptotics,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Catalog => "catalog",
            Suite::Polyseq => "polyseq",
            Suite::Asymptotics => "asymptotics",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "catalog" => Ok(Suite::Catalog),
            "polyseq" => Ok(Suite::Polyseq),
            "asymptotics" => Ok(Suite::Asymptotics),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?}; expected identities, catalog, polyseq, asymptotics or all"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Replaces every numeric budget of the identities suite when set.
    pub identity_tol: Option<f64>,
    /// Seed of the Monte Carlo cross-checks.
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            identity_tol: None,
            seed: 20_240_601,
            mc_samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub budget: f64,
    /// Exact checks count mismatches; their budget is zero.
    pub exact: bool,
    pub pass: bool,
}

impl Check {
    fn numeric(name: impl Into<String>, max_residual: f64, budget: f64) -> Self {
        Check {
            name: name.into(),
            max_residual,
            budget,
            exact: false,
            pass: max_residual <= budget,
        }
    }

    fn exact(name: impl Into<String>, mismatches: usize) -> Self {
        Check {
            name: name.into(),
            max_residual: mismatches as f64,
            budget: 0.0,
            exact: true,
            pass: mismatches == 0,
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check {
            name: format!("{} [{err}]", name.into()),
            max_residual: f64::INFINITY,
            budget: 0.0,
            exact: false,
            pass: false,
        }
    }

    pub fn residual_text(&self) -> String {
        if self.exact {
            format!("{}", self.max_residual as u64)
        } else {
            format!("{:.3e}", self.max_residual)
        }
    }

    pub fn budget_text(&self) -> String {
        if self.exact {
            "0".into()
        } else {
            format!("{:.0e}", self.budget)
        }
    }
}

/// `name, max_residual, budget, PASS|FAIL`
impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}",
            self.name,
            self.residual_text(),
            self.budget_text(),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs a suite; `All` runs the four suites in order.
pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Vec<Check> {
    match suite {
        Suite::Identities => identities(config),
        Suite::Catalog => catalog(config),
        Suite::Polyseq => polyseq(),
        Suite::Asymptotics => asymptotics(),
        Suite::All => {
            let mut all = identities(config);
            all.extend(catalog(config));
            all.extend(polyseq());
            all.extend(asymptotics());
            all
        }
    }
}

fn numeric_check(name: String, budget: f64, body: impl FnOnce() -> Result<f64>) -> Check {
    match body() {
        Ok(r) => Check::numeric(name, r, budget),
        Err(e) => Check::failed(name, &e),
    }
}

fn exact_check(name: &str, body: impl FnOnce() -> Result<usize>) -> Check {
    match body() {
        Ok(m) => Check::exact(name, m),
        Err(e) => Check::failed(name, &e),
    }
}

fn spec(src: &str) -> FunctionSpec {
    crate::descriptor::parse(src).expect("built-in descriptor")
}

/// `|lhs − rhs| / (1 + |rhs|)`, the quantity that `check_identity` bounds.
fn scaled_residual(identity: Identity, f: &FunctionSpec, s: f64, tol: f64) -> Result<f64> {
    let r = check_identity(identity, f, s, tol)?;
    Ok(r.residual / (1.0 + r.rhs.abs()))
}

fn identities(config: &VerifyConfig) -> Vec<Check> {
    let intertwining_budget = config.identity_tol.unwrap_or(1e-8);
    let identity_budget = config.identity_tol.unwrap_or(1e-7);
    let linear_budget = config.identity_tol.unwrap_or(1e-10);
    let mut out = Vec::new();

    let grid: Vec<f64> = (1..=20).map(f64::from).collect();
    for src in ["monomial(3)", "exp_decay(1)", "sin(1)", "rational_decay"] {
        let f = spec(src);
        out.push(numeric_check(format!("intertwining {src} s=1..20"), intertwining_budget, || {
            grid.iter()
                .map(|&s| scaled_residual(Identity::Intertwining, &f, s, intertwining_budget))
                .try_fold(0.0f64, |m, r| Ok(m.max(r?)))
        }));
    }
    for src in ["monomial(5)", "exp_decay(1)"] {
        let f = spec(src);
        for n in [2, 3] {
            out.push(numeric_check(
                format!("iterated_intertwining n={n} {src} s={n}..20"),
                intertwining_budget,
                || {
                    (n..=20)
                        .map(|s| {
                            scaled_residual(Identity::IteratedIntertwining { n }, &f, f64::from(s), intertwining_budget)
                        })
                        .try_fold(0.0f64, |m, r| Ok(m.max(r?)))
                },
            ));
        }
    }

    let supported = ["monomial(3)", "exp_decay(1)", "sin(1)", "cos(2)", "rational_decay", "power(0.5)", "log(1)", "geom"];
    let shifts = [
        Identity::PowerShift { a: 0.5 },
        Identity::PowerShift { a: 2.0 },
        Identity::Damping { c: 0.5 },
        Identity::Damping { c: 1.0 },
        Identity::LogDerivative,
    ];
    let s_grid = [0.5, 1.0, 2.5, 7.0, 15.0];
    for id in shifts {
        out.push(numeric_check(format!("{id}"), identity_budget, || {
            let mut worst = 0.0f64;
            for src in supported {
                let f = spec(src);
                for &s in &s_grid {
                    worst = worst.max(scaled_residual(id, &f, s, identity_budget)?);
                }
            }
            Ok(worst)
        }));
    }

    let integrable = ["poly(1,-2,0.5)", "monomial(3)", "exp_decay(1)", "exp_decay(2.5)", "sin(1)", "cos(1.5)"];
    let anti = [
        (Identity::AntiderivativeAtInteger, vec![0.0, 1.0, 3.0, 6.0]),
        (Identity::AntiderivativeStep, vec![1.0, 1.5, 4.25, 9.0]),
        (Identity::AntiderivativeSum, vec![0.3, 1.0, 2.7, 5.5]),
    ];
    for (id, points) in anti {
        out.push(numeric_check(format!("{id}"), identity_budget, || {
            let mut worst = 0.0f64;
            for src in integrable {
                let f = spec(src);
                for &s in &points {
                    worst = worst.max(scaled_residual(id, &f, s, identity_budget)?);
                }
            }
            Ok(worst)
        }));
    }

    out.push(numeric_check("linearity 2*rational_decay-3*gaussian".into(), linear_budget, || {
        let f = spec("rational_decay");
        let g = spec("gaussian");
        let fg = spec("sum(2,rational_decay,-3,gaussian)");
        let mut worst = 0.0f64;
        for s in [0.5, 3.0, 12.0] {
            let lhs = adaptive_transform(&fg, s, 1e-13)?.value;
            let rhs = 2.0 * adaptive_transform(&f, s, 1e-13)?.value - 3.0 * adaptive_transform(&g, s, 1e-13)?.value;
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }));

    out.push(numeric_check("alpha_twist dilation".into(), linear_budget, || {
        let mut worst = 0.0f64;
        for src in ["rational_decay", "geom", "sin(1)"] {
            let f = spec(src);
            for (c, alpha) in [(2.0, 1.5), (0.5, 3.0)] {
                let lhs = alpha_twisted(&f.clone().scaled(c)?, 2.5, alpha, 1e-13)?.value;
                let rhs = alpha_twisted(&f, 2.5, alpha / c, 1e-13)?.value;
                worst = worst.max((lhs - rhs).abs());
            }
        }
        Ok(worst)
    }));
    out
}

/// Catalog entries with closed forms, and whether they get the looser budget.
const CLOSED_FORMS: &[(&str, bool)] = &[
    ("power(0.5)", false),
    ("power(2.5)", false),
    ("monomial(3)", false),
    ("poly(1,0,3)", false),
    ("exp_decay(1)", false),
    ("exp_decay(0.5)", false),
    ("xpow(exp_decay(0.7),1.5)", false),
    ("geom", true),
    ("todd", true),
    ("log(1)", false),
    ("log(2)", false),
    ("log(3)", false),
    ("sin(1)", false),
    ("cos(1)", false),
    ("sin(2)", false),
    ("cos(0.3)", false),
];

const MC_CATALOG: &[&str] = &[
    "power(0.5)",
    "monomial(3)",
    "exp_decay(1)",
    "xpow(exp_decay(0.7),1.5)",
    "geom",
    "todd",
    "log(1)",
    "log(3)",
    "sin(1)",
    "cos(1)",
    "rational_decay",
    "gaussian",
];

fn catalog(config: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &(src, loose) in CLOSED_FORMS {
        let budget = if loose { 1e-7 } else { 1e-9 };
        let f = spec(src);
        out.push(numeric_check(format!("closed_form {src} s=0.5,1,2.5,10"), budget, || {
            let mut worst = 0.0f64;
            for s in [0.5, 1.0, 2.5, 10.0] {
                let exact = closed_form(&f, s)?.ok_or_else(|| Error::UnsupportedFunction(src.into()))?;
                let quad = adaptive_transform(&f, s, 1e-12)?.value;
                worst = worst.max((exact - quad).abs());
            }
            Ok(worst)
        }));
    }

    for &src in MC_CATALOG {
        let f = spec(src);
        out.push(numeric_check(format!("monte_carlo {src} s=0.5,2,3,7 (in stderr units)"), 5.0, || {
            let mut worst = 0.0f64;
            for (i, s) in [0.5, 2.0, 3.0, 7.0].into_iter().enumerate() {
                let q = twisted_mellin(&f, s, 1e-12)?.value;
                let mc = monte_carlo_oracle(&f, s, config.mc_samples, config.seed.wrapping_add(i as u64))?;
                worst = worst.max((q - mc.mean).abs() / mc.stderr.max(1e-300));
            }
            Ok(worst)
        }));
    }

    out.push(numeric_check("polygamma bound m=1..6".into(), 0.0, || {
        let mut worst = f64::NEG_INFINITY;
        for m in 1..=6u32 {
            let bound = zeta(f64::from(m) + 1.0)? * ln_gamma(f64::from(m) + 1.0)?.exp();
            for s in [0.0, 0.5, 1.0, 5.0, 50.0] {
                // positive means the bound is violated
                worst = worst.max(polygamma(m, s + 1.0)?.abs() - bound * (1.0 + 1e-10));
            }
        }
        Ok(worst.max(0.0))
    }));

    out.push(numeric_check("growth preservation x^3+x s=1e1..1e4 (max ratio)".into(), 2.0, || {
        let f = spec("poly(0,1,0,1)");
        let mut worst = 0.0f64;
        for s in [1e1, 1e2, 1e3, 1e4] {
            let v = closed_form(&f, s)?.ok_or_else(|| Error::UnsupportedFunction("poly".into()))?;
            worst = worst.max(v.abs() / s.powi(3));
        }
        Ok(worst)
    }));

    for (src, alpha, grid) in [
        ("gaussian", 3u32, vec![10.0, 20.0, 40.0, 80.0]),
        ("exp_decay(1)", 0, vec![1.0, 2.0, 4.0, 8.0]),
    ] {
        let f = spec(src);
        out.push(exact_check(&format!("schwartz decay {src} alpha<={alpha}"), || {
            let probe = schwartz_decay_probe(&f, alpha, &grid, 1e-12)?;
            Ok(usize::from(!probe.pass))
        }));
    }
    out
}

fn polyseq() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(exact_check("f_r recurrence = sum route r<=60", || {
        Ok((0..=60).filter(|&r| f_poly_recurrence(r).ok() != f_poly_sum(r).ok()).count())
    }));
    out.push(exact_check("deg f_r = floor(r/2) r<=60", || {
        Ok((0..=60usize).filter(|&r| f_poly_recurrence(r).map(|p| p.degree()).ok() != Some(r / 2)).count())
    }));
    out.push(exact_check("a_{r,0} = r!, a_{2k,k} = (2k-1)!! r<=60", || {
        Ok(usize::from(coefficient_table(60)?.boundary_mismatch().is_some()))
    }));
    out.push(exact_check("weighted factorial sum r<=60", || {
        Ok(usize::from(coefficient_table(60)?.weighted_sum_mismatch().is_some()))
    }));
    out.push(exact_check("displayed f_0..f_5", || {
        let displayed: [&[i64]; 6] = [&[1], &[1], &[2, 1], &[6, 5], &[24, 26, 3], &[120, 154, 35]];
        Ok(displayed
            .iter()
            .enumerate()
            .filter(|(r, c)| f_poly_recurrence(*r).ok() != Some(IntPoly::from_i64(c)))
            .count())
    }));
    out.push(exact_check("egf truncation order 40", || {
        let egf = egf_truncation(40)?;
        let mut fact = BigInt::one();
        let mut bad = 0;
        for (r, coeff) in egf.iter().enumerate() {
            if r > 0 {
                fact *= BigInt::from(r);
            }
            if coeff.scale(&BigRational::from_integer(fact.clone())) != f_poly_recurrence(r)?.to_rat() {
                bad += 1;
            }
        }
        Ok(bad)
    }));
    out.push(exact_check("vanishing identity 2j<r<=30, nonzero at 2j=r<=12", || {
        let mut bad = 0;
        for r in 1..=30usize {
            for j in 0..=r {
                let v = vanishing_identity(r, j)?;
                if (2 * j < r && !v.is_zero()) || (2 * j == r && r <= 12 && v.is_zero()) {
                    bad += 1;
                }
            }
        }
        Ok(bad)
    }));
    out.push(exact_check("falling-factorial fit j<=6 i<=40", || {
        let mut bad = 0;
        for j in 0..=6 {
            if diagonal_fit(j, 40).is_err() {
                bad += 1;
            }
        }
        Ok(bad)
    }));
    out.push(exact_check("permutations without successions r<=6", || {
        let mut bad = 0;
        for r in 1..=6 {
            bad += usize::from(!brute_force_interpretation(Interpretation::Permutations, r, 1)?.matches);
        }
        Ok(bad)
    }));
    out.push(exact_check("two-support matrices r<=2 s<=2", || {
        let mut bad = 0;
        for r in 1..=2 {
            for s in 0..=2 {
                bad += usize::from(!brute_force_interpretation(Interpretation::Matrices, r, s)?.matches);
            }
        }
        Ok(bad)
    }));
    out.push(exact_check("+-1 determinant fourth moments r<=3", || {
        let mut bad = 0;
        for r in 1..=3 {
            bad += usize::from(!brute_force_interpretation(Interpretation::Determinants, r, 2)?.matches);
        }
        Ok(bad)
    }));
    out
}

fn asymptotics() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(numeric_check("termination x^n n<=8 s=1,5,20 (relative)".into(), 1e-10, || {
        let mut worst = 0.0f64;
        for n in 0..=8usize {
            let f = FunctionSpec::monomial(n);
            for s in [1.0, 5.0, 20.0] {
                let rising: f64 = (1..=n).map(|k| s + k as f64).product();
                let e = expansion(&f, s, n as u32)?;
                worst = worst.max((e.value() - rising).abs() / rising);
            }
        }
        Ok(worst)
    }));
    out.push(exact_check("A_N order-2 coefficients", || {
        let c = n_expansion_coefficients(2)?;
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let got: Vec<Vec<(u32, u32, BigRational)>> = c
            .iter()
            .map(|terms| terms.iter().map(|t| (t.derivative, t.s_power, t.coefficient.clone())).collect())
            .collect();
        let want = vec![
            vec![(0, 0, q(1, 1))],
            vec![(1, 0, q(1, 1)), (2, 1, q(1, 2))],
            vec![(2, 0, q(1, 1)), (3, 1, q(5, 6)), (4, 2, q(1, 8))],
        ];
        Ok(usize::from(got != want))
    }));
    out.push(numeric_check("A_N x^3, x^4 terms s^3,6s^2,11s and s^4,10s^3,35s^2 (relative)".into(), 1e-14, || {
        let mut worst = 0.0f64;
        for s in [0.5f64, 2.0, 7.0] {
            let pairs = [
                (FunctionSpec::monomial(3), [s.powi(3), 6.0 * s * s, 11.0 * s]),
                (FunctionSpec::monomial(4), [s.powi(4), 10.0 * s.powi(3), 35.0 * s * s]),
            ];
            for (f, want) in pairs {
                for (got, want) in n_expansion_terms(&f, s, 2)?.into_iter().zip(want) {
                    worst = worst.max((got - want).abs() / want.abs());
                }
            }
        }
        Ok(worst)
    }));
    out.push(numeric_check("A_N x^3 order 3 vs exact (relative)".into(), 1e-12, || {
        let f = FunctionSpec::monomial(3);
        let mut worst = 0.0f64;
        for n in [2.0, 10.0, 40.0] {
            let exact = n_twisted(&f, 1.7, n, 1e-12)?.value;
            worst = worst.max((n_expansion(&f, 1.7, n, 3)? - exact).abs() / exact);
        }
        Ok(worst)
    }));
    out.push(numeric_check("A_N rational_decay s=3 error drop per doubling (min ratio, inverted)".into(), 1.0 / 6.0, || {
        let f = FunctionSpec::rational_decay();
        let err = |n: f64| -> Result<f64> { Ok((n_twisted(&f, 3.0, n, 1e-12)?.value - n_expansion(&f, 3.0, n, 2)?).abs()) };
        let (e10, e20, e40) = (err(10.0)?, err(20.0)?, err(40.0)?);
        Ok((e20 / e10).max(e40 / e20))
    }));
    out.push(numeric_check("remainder rational_decay R=2 s=25..200 slope".into(), -1.0, || {
        let r = remainder_scan(&FunctionSpec::rational_decay(), 2, &[25.0, 50.0, 100.0, 200.0])?;
        if !r.strictly_decreasing {
            return Ok(f64::INFINITY);
        }
        r.slope.ok_or_else(|| Error::Divergence("no slope".into()))
    }));
    out.push(exact_check("remainder x^2 R=2 vanishes", || {
        let r = remainder_scan(&FunctionSpec::monomial(2), 2, &[25.0, 50.0, 100.0, 200.0])?;
        Ok(r.errors.iter().filter(|e| **e != 0.0).count())
    }));
    out
}
