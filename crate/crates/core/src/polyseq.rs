//! Exact polynomial sequences behind the asymptotic expansion.
//!
//! Everything here is exact: coefficients are big integers or reduced
//! rationals and every identity is checked with `==`.
//!
//! The central objects are the expansion polynomials
//! `f_r(s) = M[(x − s)^r](s)`, computed two ways (three-term recurrence and
//! alternating sum of rising factorials), the signless Stirling numbers of
//! the first kind `c(n, k)` that expand the rising factorial
//! `s^[n] = (s+1)···(s+n)`, and several identities relating them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_STIRLING_N: usize = 200;
pub const MAX_RISING_N: usize = 100;
pub const MAX_EXPANSION_ORDER: usize = 200;
pub const MAX_EGF_ORDER: usize = 60;
pub const MAX_FIT_J: usize = 10;

/// Dense polynomial in `s` with big-integer coefficients, lowest power
/// first. Trailing zeros are never stored; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `s^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `s^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn scale(&self, factor: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn eval(&self, s: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * s + c)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// Ascending coefficients separated by single spaces, e.g. `120 154 35`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Dense polynomial in `s` with exact rational coefficients (always in
/// lowest terms), lowest power first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scale(&self, factor: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Signless Stirling numbers of the first kind, `c(n, k)` for
/// `1 ≤ k ≤ n ≤ n_max`, filled by `c(n+1, k) = c(n, k−1) + n·c(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTable {
    n_max: usize,
    // rows[n][k], with rows[0] = [1] so that c(0, 0) = 1 seeds the recurrence
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigInt::one()]);
        for n in 0..n_max {
            let prev = &rows[n];
            let nn = BigInt::from(n);
            let mut row = vec![BigInt::zero(); n + 2];
            for k in 1..=n + 1 {
                let mut v = prev[k - 1].clone();
                if k <= n {
                    v += &nn * &prev[k];
                }
                row[k] = v;
            }
            rows.push(row);
        }
        StirlingTable { n_max, rows }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c(n, k)`, zero outside `0 ≤ k ≤ n ≤ n_max`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if n > self.n_max || k > n {
            return BigInt::zero();
        }
        self.rows[n][k].clone()
    }

    /// `c(n, 1), ..., c(n, n)`
    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n][1.min(n)..]
    }
}

/// Shared table through `c(201, ·)`, enough for `s^[200]`.
fn stirling() -> &'static StirlingTable {
    static TABLE: OnceLock<StirlingTable> = OnceLock::new();
    TABLE.get_or_init(|| StirlingTable::new(MAX_STIRLING_N + 1))
}

/// `c(i, j)` with the convention `c = 0` outside `1 ≤ j ≤ i`.
fn c(i: usize, j: isize) -> BigInt {
    if j < 1 {
        return BigInt::zero();
    }
    stirling().get(i, j as usize)
}

/// Number of permutations of `n` elements with exactly `k` cycles.
pub fn stirling_unsigned(n: usize, k: usize) -> Result<BigInt> {
    if n < 1 || k < 1 || k > n || n > MAX_STIRLING_N {
        return Err(Error::range(
            "stirling_unsigned",
            format!("need 1 <= k <= n <= {MAX_STIRLING_N}, got n = {n}, k = {k}"),
        ));
    }
    Ok(stirling().get(n, k))
}

/// `c(n, 1) ... c(n, n)` for `1 ≤ n ≤ 200`.
pub fn stirling_row(n: usize) -> Result<Vec<BigInt>> {
    if n < 1 || n > MAX_STIRLING_N {
        return Err(Error::range(
            "stirling_row",
            format!("need 1 <= n <= {MAX_STIRLING_N}, got {n}"),
        ));
    }
    Ok(stirling().row(n).to_vec())
}

/// `s^[n] = (s+1)(s+2)···(s+n)`, whose `s^k` coefficient is `c(n+1, k+1)`.
pub fn rising_factorial_poly(n: usize) -> Result<IntPoly> {
    if n > MAX_RISING_N {
        return Err(Error::range(
            "rising_factorial_poly",
            format!("need n <= {MAX_RISING_N}, got {n}"),
        ));
    }
    Ok(rising_unchecked(n))
}

fn rising_unchecked(n: usize) -> IntPoly {
    IntPoly::new((0..=n).map(|k| stirling().get(n + 1, k + 1)).collect())
}

fn check_order(func: &'static str, r: usize) -> Result<()> {
    if r > MAX_EXPANSION_ORDER {
        return Err(Error::range(
            func,
            format!("need r <= {MAX_EXPANSION_ORDER}, got {r}"),
        ));
    }
    Ok(())
}

fn expansion_table() -> &'static [IntPoly] {
    static TABLE: OnceLock<Vec<IntPoly>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let s = IntPoly::monomial(1);
        let mut table = vec![IntPoly::one(), IntPoly::one()];
        for r in 2..=MAX_EXPANSION_ORDER {
            // f_r = r f_{r-1} + (r-1) s f_{r-2}
            let a = table[r - 1].scale(&BigInt::from(r));
            let b = (&s * &table[r - 2]).scale(&BigInt::from(r - 1));
            table.push(&a + &b);
        }
        table
    })
}

/// `f_r` from `f_r = r f_{r−1} + (r−1) s f_{r−2}`, `f_0 = f_1 = 1`.
pub fn f_poly_recurrence(r: usize) -> Result<IntPoly> {
    check_order("f_poly_recurrence", r)?;
    Ok(expansion_table()[r].clone())
}

/// Borrowed view of the memoized `f_r`.
pub fn expansion_poly(r: usize) -> Result<&'static IntPoly> {
    check_order("expansion_poly", r)?;
    Ok(&expansion_table()[r])
}

/// `f_r = Σ_i (−1)^{r−i} C(r, i) s^[i] s^{r−i}`, independent of the
/// recurrence.
pub fn f_poly_sum(r: usize) -> Result<IntPoly> {
    check_order("f_poly_sum", r)?;
    let mut total = IntPoly::zero();
    let mut binom = BigInt::one();
    for i in 0..=r {
        let mut term = rising_unchecked(i).shift(r - i).scale(&binom);
        if (r - i) % 2 == 1 {
            term = -&term;
        }
        total = &total + &term;
        // C(r, i+1) = C(r, i) (r − i)/(i + 1)
        binom = binom * BigInt::from(r - i) / BigInt::from(i + 1);
    }
    Ok(total)
}

fn factorial_big(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn double_factorial_odd(k: usize) -> BigInt {
    // (2k−1)!! with (−1)!! = 1
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1))
}

/// `a_{r,i}`, the coefficients of `f_r(s) = Σ_i a_{r,i} s^i`, for
/// `r ≤ r_max`, filled by `a_{r,i} = r a_{r−1,i} + (r−1) a_{r−2,i−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    rows: Vec<Vec<BigInt>>,
}

impl CoefficientTable {
    pub fn r_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `a_{r,i}`, zero past `floor(r/2)`.
    pub fn get(&self, r: usize, i: usize) -> BigInt {
        self.rows
            .get(r)
            .and_then(|row| row.get(i))
            .cloned()
            .unwrap_or_default()
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.rows[r]
    }

    /// Recomputes `a_{r,k}` for `k ≥ 1` from the weighted factorial sum
    /// `a_{r,k} = Σ_{m=2k}^{r} (m−1) a_{m−2,k−1} r!/m!`
    /// and returns the first `(r, k)` where it disagrees with the table.
    pub fn weighted_sum_mismatch(&self) -> Option<(usize, usize)> {
        for r in 0..=self.r_max() {
            for k in 1..=r / 2 {
                let mut sum = BigInt::zero();
                // r!/m! built downward from m = r
                let mut ratio = BigInt::one();
                for m in (2 * k..=r).rev() {
                    sum += BigInt::from(m - 1) * self.get(m - 2, k - 1) * &ratio;
                    ratio *= BigInt::from(m);
                }
                if sum != self.get(r, k) {
                    return Some((r, k));
                }
            }
        }
        None
    }

    /// First `r` where `a_{r,0} ≠ r!` or (for even `r = 2k`) `a_{2k,k} ≠ (2k−1)!!`.
    pub fn boundary_mismatch(&self) -> Option<usize> {
        (0..=self.r_max()).find(|&r| {
            self.get(r, 0) != factorial_big(r)
                || (r % 2 == 0 && self.get(r, r / 2) != double_factorial_odd(r / 2))
        })
    }
}

/// Builds the `a_{r,i}` table and checks it against the weighted factorial
/// sums; a mismatch is reported as a range error naming `(r, k)`.
pub fn coefficient_table(r_max: usize) -> Result<CoefficientTable> {
    if r_max < 1 || r_max > MAX_EXPANSION_ORDER {
        return Err(Error::range(
            "coefficient_table",
            format!("need 1 <= r_max <= {MAX_EXPANSION_ORDER}, got {r_max}"),
        ));
    }
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()], vec![BigInt::one()]];
    for r in 2..=r_max {
        let width = r / 2 + 1;
        let mut row = vec![BigInt::zero(); width];
        for (i, slot) in row.iter_mut().enumerate() {
            let mut v = BigInt::from(r) * rows[r - 1].get(i).cloned().unwrap_or_default();
            if i >= 1 {
                v += BigInt::from(r - 1) * rows[r - 2].get(i - 1).cloned().unwrap_or_default();
            }
            *slot = v;
        }
        rows.push(row);
    }
    rows.truncate(r_max + 1);
    let table = CoefficientTable { rows };
    if let Some((r, k)) = table.weighted_sum_mismatch() {
        return Err(Error::range(
            "coefficient_table",
            format!("weighted factorial sum disagrees with the recurrence at r = {r}, k = {k}"),
        ));
    }
    Ok(table)
}

/// Coefficients of `x^0 ... x^order` in `e^{−sx} (1 − x)^{−(1+s)}`, each a
/// polynomial in `s`, from the Cauchy product of `Σ (−s x)^k/k!` and the
/// binomial series `Σ s^[m] x^m/m!`.
pub fn egf_truncation(order: usize) -> Result<Vec<RatPoly>> {
    if order < 1 || order > MAX_EGF_ORDER {
        return Err(Error::range(
            "egf_truncation",
            format!("need 1 <= order <= {MAX_EGF_ORDER}, got {order}"),
        ));
    }
    let factorials: Vec<BigInt> = (0..=order).map(factorial_big).collect();
    let exp_series: Vec<RatPoly> = (0..=order)
        .map(|k| {
            let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            IntPoly::monomial(k)
                .to_rat()
                .scale(&BigRational::new(sign, factorials[k].clone()))
        })
        .collect();
    let binomial_series: Vec<RatPoly> = (0..=order)
        .map(|m| {
            rising_unchecked(m)
                .to_rat()
                .scale(&BigRational::new(BigInt::one(), factorials[m].clone()))
        })
        .collect();
    Ok((0..=order)
        .map(|r| {
            (0..=r).fold(RatPoly::zero(), |acc, k| {
                &acc + &(&exp_series[k] * &binomial_series[r - k])
            })
        })
        .collect())
}

/// Falling factorial `(i)_l = i (i−1) ··· (i−l+1)`.
pub fn falling_factorial(i: usize, l: usize) -> BigInt {
    if l > i {
        return BigInt::zero();
    }
    ((i - l + 1)..=i).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

/// Constants `C_{l,j}`, `l = j..=2j`, with
/// `c(i+1, i+1−j) = Σ_l C_{l,j} (i)_l`.
///
/// The constants are solved exactly from the `j + 1` points
/// `i = j..=2j` (the system is lower triangular because `(i)_l = 0` for
/// `l > i`) and then the identity is checked for every `0 ≤ i ≤ i_max`.
pub fn diagonal_fit(j: usize, i_max: usize) -> Result<Vec<BigRational>> {
    if j > MAX_FIT_J || i_max < 2 * j + 2 || i_max >= MAX_STIRLING_N {
        return Err(Error::range(
            "diagonal_fit",
            format!(
                "need j <= {MAX_FIT_J} and 2j+2 <= i_max < {MAX_STIRLING_N}, got j = {j}, i_max = {i_max}"
            ),
        ));
    }
    let target = |i: usize| BigRational::from_integer(c(i + 1, i as isize + 1 - j as isize));
    let mut consts: Vec<BigRational> = Vec::with_capacity(j + 1);
    for (idx, i) in (j..=2 * j).enumerate() {
        // row i: Σ_{l=j}^{i} C_l (i)_l = target(i)
        let mut rhs = target(i);
        for (prev, cl) in consts.iter().enumerate() {
            rhs -= cl * BigRational::from_integer(falling_factorial(i, j + prev));
        }
        let pivot = BigRational::from_integer(falling_factorial(i, j + idx));
        consts.push(rhs / pivot);
    }
    for i in 0..=i_max {
        let fitted = consts
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, cl)| {
                acc + cl * BigRational::from_integer(falling_factorial(i, j + k))
            });
        let residual = target(i) - fitted;
        if !residual.is_zero() {
            return Err(Error::FitFailure {
                j,
                i,
                residual: residual.to_string(),
            });
        }
    }
    Ok(consts)
}

/// `Σ_{i=j}^{r} (−1)^{r−i} C(r, i) c(i+1, i−j+1)`, the coefficient of
/// `s^{r−j}` in `f_r`. Zero whenever `2j < r`; at `2j = r` it is the
/// leading coefficient `(2j−1)!!`.
pub fn vanishing_identity(r: usize, j: usize) -> Result<BigInt> {
    if r < 1 || r > MAX_RISING_N {
        return Err(Error::range(
            "vanishing_identity",
            format!("need 1 <= r <= {MAX_RISING_N}, got {r}"),
        ));
    }
    let mut sum = BigInt::zero();
    if j > r {
        return Ok(sum);
    }
    let mut binom = num_integer::binomial(BigInt::from(r), BigInt::from(j));
    for i in j..=r {
        let term = &binom * c(i + 1, i as isize - j as isize + 1);
        if (r - i) % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        binom = binom * BigInt::from(r - i) / BigInt::from(i + 1);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpretation {
    /// Permutations `w` of `{1..r+1}` with `w(i+1) ≠ w(i) + 1`; count is `f_r(1)`.
    Permutations,
    /// `r × r` matrices over ℕ with all line sums `3 + 2s` and at most two
    /// nonzero entries per row; count is `r!·f_r(s)`.
    Matrices,
    /// `2^{−r²}/r! · Σ (det M)^4` over `±1` matrices equals `f_r(2)`.
    Determinants,
}

impl Interpretation {
    pub fn max_r(self) -> usize {
        match self {
            Interpretation::Permutations => 6,
            Interpretation::Matrices => 2,
            Interpretation::Determinants => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Interpretation::Permutations => "permutations",
            Interpretation::Matrices => "matrices",
            Interpretation::Determinants => "determinants",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpretationReport {
    pub kind: Interpretation,
    pub r: usize,
    pub s: usize,
    /// Raw count (or `Σ det⁴`) from exhaustive enumeration.
    pub enumerated: BigInt,
    /// Enumeration normalized to be comparable with `predicted`.
    pub observed: BigRational,
    /// Value read off the expansion polynomial.
    pub predicted: BigRational,
    pub matches: bool,
}

/// Exhaustive check of a combinatorial reading of `f_r`. `s` is ignored for
/// the permutation (`s = 1`) and determinant (`s = 2`) forms.
pub fn brute_force_interpretation(kind: Interpretation, r: usize, s: usize) -> Result<InterpretationReport> {
    if r < 1 || r > kind.max_r() {
        return Err(Error::range(
            "brute_force_interpretation",
            format!("{} enumeration supports 1 <= r <= {}, got {r}", kind.name(), kind.max_r()),
        ));
    }
    if kind == Interpretation::Matrices && s > 6 {
        return Err(Error::range(
            "brute_force_interpretation",
            format!("matrix enumeration supports s <= 6, got {s}"),
        ));
    }
    let f = &expansion_table()[r];
    let (s, enumerated, observed, predicted) = match kind {
        Interpretation::Permutations => {
            let n = count_permutations_without_successions(r + 1);
            let big = BigInt::from(n);
            (1, big.clone(), BigRational::from_integer(big), f.eval(&BigInt::from(1)))
        }
        Interpretation::Matrices => {
            let n = count_two_support_matrices(r, 3 + 2 * s);
            let big = BigInt::from(n);
            let predicted = factorial_big(r) * f.eval(&BigInt::from(s));
            (s, big.clone(), BigRational::from_integer(big), predicted)
        }
        Interpretation::Determinants => {
            let sum = det_fourth_power_sum(r);
            let denom = (BigInt::one() << (r * r)) * factorial_big(r);
            let observed = BigRational::new(sum.clone(), denom);
            (2, sum, observed, f.eval(&BigInt::from(2)))
        }
    };
    let predicted = BigRational::from_integer(predicted);
    Ok(InterpretationReport {
        kind,
        r,
        s,
        matches: observed == predicted,
        enumerated,
        observed,
        predicted,
    })
}

/// Permutations of `{1..n}` with no `i` such that `w(i+1) = w(i) + 1`.
pub fn count_permutations_without_successions(n: usize) -> u64 {
    fn extend(used: &mut [bool], last: Option<usize>, remaining: usize) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let mut total = 0;
        for v in 0..used.len() {
            if used[v] || last.is_some_and(|l| v == l + 1) {
                continue;
            }
            used[v] = true;
            total += extend(used, Some(v), remaining - 1);
            used[v] = false;
        }
        total
    }
    extend(&mut vec![false; n], None, n)
}

/// `r × r` nonnegative integer matrices with every row and column summing
/// to `line_sum` and at most two nonzero entries in each row.
pub fn count_two_support_matrices(r: usize, line_sum: usize) -> u64 {
    // every admissible row
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut row = vec![0; r];
    fn compose(pos: usize, left: usize, nonzero: usize, row: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == row.len() {
            if left == 0 {
                out.push(row.clone());
            }
            return;
        }
        for v in 0..=left {
            let nz = nonzero + usize::from(v > 0);
            if nz > 2 {
                break;
            }
            row[pos] = v;
            compose(pos + 1, left - v, nz, row, out);
        }
        row[pos] = 0;
    }
    compose(0, line_sum, 0, &mut row, &mut rows);

    fn place(rows: &[Vec<usize>], depth: usize, cols: &mut [usize], line_sum: usize) -> u64 {
        if depth == cols.len() {
            return u64::from(cols.iter().all(|&c| c == line_sum));
        }
        let mut total = 0;
        for row in rows {
            if row.iter().zip(cols.iter()).any(|(v, c)| c + v > line_sum) {
                continue;
            }
            for (c, v) in cols.iter_mut().zip(row) {
                *c += v;
            }
            total += place(rows, depth + 1, cols, line_sum);
            for (c, v) in cols.iter_mut().zip(row) {
                *c -= v;
            }
        }
        total
    }
    place(&rows, 0, &mut vec![0; r], line_sum)
}

/// `Σ (det M)^4` over all `r × r` matrices with entries `±1`.
pub fn det_fourth_power_sum(r: usize) -> BigInt {
    let cells = r * r;
    let mut total = BigInt::zero();
    for mask in 0u64..(1u64 << cells) {
        let m: Vec<i64> = (0..cells)
            .map(|b| if mask >> b & 1 == 1 { -1 } else { 1 })
            .collect();
        let d = BigInt::from(integer_det(&m, r));
        total += d.pow(4);
    }
    total
}

/// Determinant by Laplace expansion along the first row.
fn integer_det(m: &[i64], n: usize) -> i64 {
    if n == 1 {
        return m[0];
    }
    let mut det = 0;
    for col in 0..n {
        let minor: Vec<i64> = (1..n)
            .flat_map(|row| (0..n).filter(move |&c| c != col).map(move |c| (row, c)))
            .map(|(row, c)| m[row * n + c])
            .collect();
        let sign = if col % 2 == 0 { 1 } else { -1 };
        det += sign * m[col] * integer_det(&minor, n - 1);
    }
    det
}

/// `a_{r,i}/r!` as doubles: the coefficients of `g_r = f_r/r!`.
pub fn normalized_coeffs_f64(r: usize) -> Result<Vec<f64>> {
    let poly = expansion_poly(r)?;
    let fact = factorial_big(r);
    Ok(poly
        .coeffs()
        .iter()
        .map(|c| {
            let q = BigRational::new(c.clone(), fact.clone());
            q.to_f64().unwrap_or(f64::NAN)
        })
        .collect())
}

/// `a_{r,i}/r!` exactly.
pub fn normalized_coeffs(r: usize) -> Result<Vec<BigRational>> {
    let poly = expansion_poly(r)?;
    let fact = factorial_big(r);
    Ok(poly
        .coeffs()
        .iter()
        .map(|c| BigRational::new(c.clone(), fact.clone()))
        .collect())
}

/// Greatest common divisor of the coefficients (content) of a polynomial.
pub fn content(p: &IntPoly) -> BigInt {
    p.coeffs()
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c))
        .abs()
}
