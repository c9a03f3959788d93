//! Large-`s` expansion of the transform,
//! `M f(s) ∼ Σ_r f^(r)(s) f_r(s) / r!`,
//! and the `N`-twisted transform `A_N f(s) = M[f(·/N)](Ns)` with its
//! expansion in powers of `1/N`.
//!
//! The series is asymptotic, not convergent: callers choose the truncation
//! order and [`remainder_scan`] reports how the error behaves in `s`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::polyseq::{expansion_poly, normalized_coeffs, normalized_coeffs_f64};
use crate::quadrature::{adaptive_transform, TransformValue};
use crate::transform::twisted_mellin;

pub const MAX_ORDER: u32 = 30;
pub const MAX_N_ORDER: u32 = 5;
/// Highest derivative the finite-difference fallback will produce.
pub const MAX_FD_ORDER: u32 = 4;
/// Tolerance of the quadrature used as ground truth.
pub const GROUND_TRUTH_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderTerm {
    pub r: u32,
    /// `f^(r)(s)`
    pub derivative_value: f64,
    /// `f_r(s)`
    pub poly_value: f64,
    /// `f^(r)(s) f_r(s) / r!`
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub s: f64,
    pub orders: Vec<OrderTerm>,
    /// `partial_sums[r] = Σ_{q ≤ r} orders[q].term`
    pub partial_sums: Vec<f64>,
}

impl ExpansionResult {
    /// The partial sum through the highest order.
    pub fn value(&self) -> f64 {
        *self.partial_sums.last().expect("order 0 is always present")
    }
}

/// `f^(r)(x)`, analytically when `f` allows it, otherwise by a
/// second-order central difference of the highest available analytic
/// derivative (only up to `r = 4`, step `1e-3·(1 + x)`).
pub fn derivative_or_fallback(f: &FunctionSpec, r: u32, x: f64) -> Result<f64> {
    if f.supports_derivative(r) {
        return f.derivative(r, x);
    }
    if r > MAX_FD_ORDER {
        return Err(Error::UnsupportedFunction(format!(
            "{f} has no analytic derivative of order {r} and finite differences stop at {MAX_FD_ORDER}"
        )));
    }
    let base = f.derivative_limit().unwrap_or(0).min(r);
    let g = |t: f64| f.derivative(base, t);
    let h = 1e-3 * (1.0 + x);
    Ok(match r - base {
        0 => g(x)?,
        1 => (g(x + h)? - g(x - h)?) / (2.0 * h),
        2 => (g(x + h)? - 2.0 * g(x)? + g(x - h)?) / (h * h),
        3 => (g(x + 2.0 * h)? - 2.0 * g(x + h)? + 2.0 * g(x - h)? - g(x - 2.0 * h)?) / (2.0 * h.powi(3)),
        _ => {
            (g(x + 2.0 * h)? - 4.0 * g(x + h)? + 6.0 * g(x)? - 4.0 * g(x - h)? + g(x - 2.0 * h)?)
                / h.powi(4)
        }
    })
}

fn check_s(func: &'static str, s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("s must be a finite value >= 0, got {s}")))
    }
}

/// Terms and partial sums of the expansion through order `order`.
pub fn expansion(f: &FunctionSpec, s: f64, order: u32) -> Result<ExpansionResult> {
    check_s("expansion", s)?;
    if order > MAX_ORDER {
        return Err(Error::range("expansion", format!("order must be <= {MAX_ORDER}, got {order}")));
    }
    let mut orders = Vec::with_capacity(order as usize + 1);
    let mut partial_sums = Vec::with_capacity(order as usize + 1);
    let mut sum = 0.0;
    for r in 0..=order {
        let derivative_value = derivative_or_fallback(f, r, s)?;
        let poly_value = expansion_poly(r as usize)?.eval_f64(s);
        // f_r/r! from exact rationals rather than dividing two large doubles
        let g: f64 = normalized_coeffs_f64(r as usize)?
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c);
        let term = derivative_value * g;
        sum += term;
        orders.push(OrderTerm {
            r,
            derivative_value,
            poly_value,
            term,
        });
        partial_sums.push(sum);
    }
    Ok(ExpansionResult {
        s,
        orders,
        partial_sums,
    })
}

/// `A_N f(s) = ∫ f(x) x^{Ns} e^{-Nx} dx / ∫ x^{Ns} e^{-Nx} dx`, computed as
/// `M[f(·/N)](Ns)`.
pub fn n_twisted(f: &FunctionSpec, s: f64, n: f64, tol: f64) -> Result<TransformValue> {
    check_s("n_twisted", s)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain("n_twisted", format!("N must be positive, got {n}")));
    }
    if n == 1.0 {
        return twisted_mellin(f, s, tol);
    }
    twisted_mellin(&f.clone().scaled(1.0 / n)?, n * s, tol)
}

/// One contribution `coefficient · f^(k)(s) · s^i` to the `N^{-power}`
/// coefficient of the `A_N` expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct NTerm {
    pub derivative: u32,
    pub s_power: u32,
    /// `a_{k,i} / k!`, exact
    pub coefficient: BigRational,
}

/// For each `j ≤ order`, the terms whose sum is the coefficient of `N^{-j}`.
///
/// Writing `f_k(s) = Σ_i a_{k,i} s^i`, the `k`-th term
/// `N^{-k} f^(k)(s) f_k(Ns)/k!` contributes `a_{k,i}/k! · f^(k)(s) s^i` to
/// `N^{-(k-i)}`. Since `i ≤ k/2`, only `k ≤ 2j` reach `N^{-j}`.
pub fn n_expansion_coefficients(order: u32) -> Result<Vec<Vec<NTerm>>> {
    if order > MAX_N_ORDER {
        return Err(Error::range(
            "n_expansion",
            format!("order must be <= {MAX_N_ORDER}, got {order}"),
        ));
    }
    let mut powers: Vec<Vec<NTerm>> = vec![Vec::new(); order as usize + 1];
    for k in 0..=2 * order {
        for (i, coefficient) in normalized_coeffs(k as usize)?.into_iter().enumerate() {
            let j = k - i as u32;
            if j <= order {
                powers[j as usize].push(NTerm {
                    derivative: k,
                    s_power: i as u32,
                    coefficient,
                });
            }
        }
    }
    Ok(powers)
}

/// Values of the `N^{-j}` coefficients at `s`, `j = 0..=order`.
pub fn n_expansion_terms(f: &FunctionSpec, s: f64, order: u32) -> Result<Vec<f64>> {
    check_s("n_expansion", s)?;
    let powers = n_expansion_coefficients(order)?;
    let mut derivatives = Vec::with_capacity(2 * order as usize + 1);
    for k in 0..=2 * order {
        derivatives.push(derivative_or_fallback(f, k, s)?);
    }
    Ok(powers
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|t| {
                    t.coefficient.to_f64().unwrap_or(f64::NAN)
                        * derivatives[t.derivative as usize]
                        * s.powi(t.s_power as i32)
                })
                .sum()
        })
        .collect())
}

/// `Σ_{j ≤ order} N^{-j} c_j(s)` with `c_j` from [`n_expansion_terms`].
pub fn n_expansion(f: &FunctionSpec, s: f64, n: f64, order: u32) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain("n_expansion", format!("N must be positive, got {n}")));
    }
    let terms = n_expansion_terms(f, s, order)?;
    Ok(terms
        .iter()
        .enumerate()
        .map(|(j, c)| c * n.powi(-(j as i32)))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderReport {
    pub order: u32,
    pub s_values: Vec<f64>,
    /// Quadrature ground truth `M f(s)`.
    pub truth: Vec<f64>,
    /// `|M f(s) − partial_sum_R(s)|`, with differences at rounding level
    /// reported as exactly zero.
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln E_R` against `ln s`; `None` when some
    /// error is zero (terminating expansion).
    pub slope: Option<f64>,
    /// `k − (R+1)/2 + 1/2` for growth degree `k`.
    pub slope_bound: f64,
    pub strictly_decreasing: bool,
    /// Slope within bound (or all errors zero).
    pub pass: bool,
}

/// Error of the order-`R` partial sum along increasing `s ≥ 5`, against
/// quadrature at tolerance [`GROUND_TRUTH_TOL`].
pub fn remainder_scan(f: &FunctionSpec, order: u32, s_values: &[f64]) -> Result<RemainderReport> {
    if s_values.is_empty() || s_values[0] < 5.0 || s_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(
            "remainder_scan",
            "s_values must be increasing with every value >= 5",
        ));
    }
    let mut truth = Vec::with_capacity(s_values.len());
    let mut errors = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let exact = adaptive_transform(f, s, GROUND_TRUTH_TOL)?.value;
        let approx = expansion(f, s, order)?.value();
        let diff = (exact - approx).abs();
        // below this the quadrature itself cannot tell the two apart
        let floor = 1e-12 * (1.0 + exact.abs());
        errors.push(if diff <= floor { 0.0 } else { diff });
        truth.push(exact);
    }
    let slope = if errors.iter().all(|e| *e > 0.0) && errors.len() >= 2 {
        let xs: Vec<f64> = s_values.iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        Some(least_squares_slope(&xs, &ys))
    } else {
        None
    };
    let slope_bound = f.growth_degree() - f64::from(order + 1) / 2.0 + 0.5;
    let all_zero = errors.iter().all(|e| *e == 0.0);
    let strictly_decreasing = all_zero || errors.windows(2).all(|w| w[1] < w[0]);
    let pass = all_zero || slope.is_some_and(|m| m <= slope_bound);
    Ok(RemainderReport {
        order,
        s_values: s_values.to_vec(),
        truth,
        errors,
        slope,
        slope_bound,
        strictly_decreasing,
        pass,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn quadratic_terminates_exactly() {
        let f = FunctionSpec::monomial(2);
        for s in [0.5, 3.0, 17.0] {
            let e = expansion(&f, s, 2).unwrap();
            assert_eq!(e.orders.len(), 3);
            assert_relative_eq!(e.value(), s * s + 3.0 * s + 2.0, max_relative = 1e-14);
            assert_eq!(e.orders[0].term, s * s);
        }
    }

    #[test]
    fn partial_sums_accumulate_terms() {
        let f = FunctionSpec::rational_decay();
        let e = expansion(&f, 10.0, 6).unwrap();
        for r in 1..e.orders.len() {
            assert_eq!(e.partial_sums[r], e.partial_sums[r - 1] + e.orders[r].term);
        }
        assert_eq!(e.orders[0].term, f.evaluate(10.0).unwrap());
    }

    #[test]
    fn termination_for_monomials() {
        for n in 0..=8usize {
            let f = FunctionSpec::monomial(n);
            for s in [1.0, 5.0, 20.0] {
                let rising: f64 = (1..=n).map(|k| s + k as f64).product();
                let e = expansion(&f, s, n as u32).unwrap();
                assert_relative_eq!(e.value(), rising, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn constant_and_rational_examples() {
        let one = FunctionSpec::constant(1.0).unwrap();
        assert_eq!(expansion(&one, 4.0, 0).unwrap().value(), 1.0);
        let f = FunctionSpec::rational_decay();
        let truth = adaptive_transform(&f, 10.0, 1e-12).unwrap().value;
        let err = |r| (expansion(&f, 10.0, r).unwrap().value() - truth).abs();
        assert!(err(4) < 2e-3);
        assert!(err(4) < err(2));
    }

    #[test]
    fn improvement_with_order_at_fifty() {
        let f = FunctionSpec::rational_decay();
        let truth = adaptive_transform(&f, 50.0, 1e-12).unwrap().value;
        // Monte Carlo cross-check of the ground truth
        let mc = crate::quadrature::monte_carlo_oracle(&f, 50.0, 200_000, 7).unwrap();
        assert!((mc.mean - truth).abs() < 5.0 * mc.stderr);
        let err = |r| (expansion(&f, 50.0, r).unwrap().value() - truth).abs();
        assert!(err(4) < err(2));
        assert!(err(4) < err(0));
        assert!(err(6) < err(4));
        // The series is taken about x = s while the Gamma(s+1) mean is s+1,
        // so the order-0 term is accidentally close: E_2 ≈ 1.5e-5 > E_0 ≈ 7.7e-6.
        assert!(err(2) > err(0));
    }

    #[test]
    fn finite_difference_fallback() {
        let exact = FunctionSpec::rational_decay();
        let limited = FunctionSpec::rational_decay().with_derivative_limit(0);
        for r in 1..=4 {
            let fd = derivative_or_fallback(&limited, r, 5.0).unwrap();
            let an = exact.derivative(r, 5.0).unwrap();
            assert_relative_eq!(fd, an, max_relative = 1e-4);
        }
        assert!(matches!(
            derivative_or_fallback(&limited, 5, 5.0),
            Err(Error::UnsupportedFunction(_))
        ));
        assert!(expansion(&limited, 5.0, 5).is_err());
        assert!(expansion(&exact, 5.0, 31).is_err());
    }

    #[test]
    fn n_twisted_examples() {
        let x = FunctionSpec::monomial(1);
        for n in [1.0, 2.0, 10.0] {
            let v = n_twisted(&x, 1.5, n, 1e-12).unwrap().value;
            assert_relative_eq!(v, 1.5 + 1.0 / n, max_relative = 1e-14);
        }
        let one = FunctionSpec::constant(1.0).unwrap();
        assert_eq!(n_twisted(&one, 3.0, 7.0, 1e-10).unwrap().value, 1.0);
        let x3 = FunctionSpec::monomial(3);
        // N⁻³(Ns+1)(Ns+2)(Ns+3) = 21·22·23/1000
        let v = n_twisted(&x3, 2.0, 10.0, 1e-12).unwrap().value;
        assert_relative_eq!(v, 10.626, max_relative = 1e-13);
        assert_relative_eq!(v, 8.0 + 2.4 + 0.22 + 0.006, max_relative = 1e-13);
    }

    #[test]
    fn order_two_coefficients_match_displayed_formula() {
        let c = n_expansion_coefficients(2).unwrap();
        let as_tuples = |j: usize| -> Vec<(u32, u32, BigRational)> {
            c[j].iter().map(|t| (t.derivative, t.s_power, t.coefficient.clone())).collect()
        };
        assert_eq!(as_tuples(0), vec![(0, 0, rational(1, 1))]);
        assert_eq!(as_tuples(1), vec![(1, 0, rational(1, 1)), (2, 1, rational(1, 2))]);
        assert_eq!(
            as_tuples(2),
            vec![(2, 0, rational(1, 1)), (3, 1, rational(5, 6)), (4, 2, rational(1, 8))]
        );
    }

    #[test]
    fn cubic_and_quartic_coefficients() {
        let s = 1.7;
        let x3 = n_expansion_terms(&FunctionSpec::monomial(3), s, 3).unwrap();
        assert_relative_eq!(x3[0], s.powi(3), max_relative = 1e-15);
        assert_relative_eq!(x3[1], 6.0 * s * s, max_relative = 1e-15);
        assert_relative_eq!(x3[2], 11.0 * s, max_relative = 1e-15);
        assert_relative_eq!(x3[3], 6.0, max_relative = 1e-15);
        // x⁴: N⁻¹ gives 4s³ + 12s²·s/2 = 10s³; N⁻² gives 12s² + 24s·5s/6 + 24·s²/8 = 35s²
        let x4 = n_expansion_terms(&FunctionSpec::monomial(4), s, 2).unwrap();
        assert_relative_eq!(x4[1], 10.0 * s.powi(3), max_relative = 1e-14);
        assert_relative_eq!(x4[2], 35.0 * s * s, max_relative = 1e-14);
        // and both agree with the exact A_N for x³ at every N
        for n in [3.0, 10.0] {
            let exact = n_twisted(&FunctionSpec::monomial(3), s, n, 1e-12).unwrap().value;
            let series = n_expansion(&FunctionSpec::monomial(3), s, n, 3).unwrap();
            assert_relative_eq!(exact, series, max_relative = 1e-13);
        }
    }

    #[test]
    fn n_expansion_examples() {
        let one = FunctionSpec::constant(1.0).unwrap();
        assert_eq!(n_expansion(&one, 2.0, 5.0, 4).unwrap(), 1.0);
        let f = FunctionSpec::rational_decay();
        let exact = n_twisted(&f, 3.0, 100.0, 1e-12).unwrap().value;
        let approx = n_expansion(&f, 3.0, 100.0, 2).unwrap();
        assert!((exact - approx).abs() <= 1e-5);
        assert!(n_expansion_coefficients(6).is_err());
    }

    #[test]
    fn n_expansion_error_is_third_order() {
        let f = FunctionSpec::rational_decay();
        let err = |n: f64| {
            (n_twisted(&f, 3.0, n, 1e-12).unwrap().value - n_expansion(&f, 3.0, n, 2).unwrap()).abs()
        };
        let (e10, e20, e40) = (err(10.0), err(20.0), err(40.0));
        assert!(e10 / e20 >= 6.0 && e20 / e40 >= 6.0, "{e10} {e20} {e40}");
    }

    #[test]
    fn remainder_examples() {
        let f = FunctionSpec::rational_decay();
        let r = remainder_scan(&f, 2, &[25.0, 50.0, 100.0, 200.0]).unwrap();
        assert!(r.strictly_decreasing, "{r:?}");
        assert!(r.slope.unwrap() <= -1.0);
        assert!(r.pass, "{r:?}");
        let x2 = remainder_scan(&FunctionSpec::monomial(2), 2, &[25.0, 50.0, 100.0, 200.0]).unwrap();
        assert!(x2.errors.iter().all(|e| *e == 0.0), "{x2:?}");
        assert!(x2.pass);
        let one = remainder_scan(&FunctionSpec::constant(1.0).unwrap(), 0, &[5.0, 10.0]).unwrap();
        assert!(one.errors.iter().all(|e| *e == 0.0));
        assert!(remainder_scan(&f, 2, &[4.0, 10.0]).is_err());
        assert!(remainder_scan(&f, 2, &[10.0, 10.0]).is_err());
    }
}
