//! The `P₀/P₁/P★` recurrences of `Ξ_t(r)` under a random p-restriction, and
//! the lemmas about their low-order coefficients.
//!
//! With `q = (1 − p)/2`, `U = P₁(r−1)` and `V = P₀(r−1)`:
//!
//! ```text
//! P₀(r) = Σ_{k<t} qU(q + pU)^k + (q + pU)^t
//! P₁(r) = Σ_{k<t} qV(q + pV)^k
//! ```
//!
//! starting from `P₀(0) = 1`, `P₁(0) = 0` (the single 0-leaf). This gives
//! `P₀(1) = qᵗ` and `P₁(1) = 1 − (1 − q)ᵗ`.
//!
//! Full polynomials and point values are carried as an integer numerator
//! over a power of a fixed base `D` (`D = 2` for polynomials in `p`,
//! `D = 2b` for the value at `p = a/b`), so no gcd is ever taken on the
//! large intermediate numbers. The degree of `P₀(r)` is `n(t, r)`, which
//! grows exponentially in `r`; past a few thousand the full polynomial is out
//! of reach and only the truncation `mod p^K` is computed.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::RationalPoly;
use crate::tribes::num_vars;
use crate::{pow2_inv, rat, rat_int, Error, Rational, Result};

/// Largest `n(t, r)` for which full polynomials are built.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// Arithmetic needed by the scaled recurrence: values are `x / D^e` with the
/// exponent tracked by the caller.
trait Scaled: Clone {
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self · D^k`.
    fn times_base_pow(&self, k: usize) -> Self;
}

/// Integer-coefficient polynomial, optionally truncated mod `p^limit`.
#[derive(Clone, Debug)]
struct IntPoly {
    coeffs: Vec<BigInt>,
    limit: Option<usize>,
}

impl IntPoly {
    fn from_ints(coeffs: &[i64], limit: Option<usize>) -> Self {
        let mut poly = IntPoly {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            limit,
        };
        poly.normalize();
        poly
    }

    fn normalize(&mut self) {
        if let Some(k) = self.limit {
            self.coeffs.truncate(k);
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// Divides by `2^exp` into an exact rational polynomial.
    fn to_rational(&self, exp: usize) -> RationalPoly {
        let den = BigInt::one() << exp;
        RationalPoly::new(
            self.coeffs
                .iter()
                .map(|c| Rational::new(c.clone(), den.clone()))
                .collect(),
        )
    }
}

impl Scaled for IntPoly {
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return IntPoly {
                coeffs: Vec::new(),
                limit: self.limit,
            };
        }
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(k) = self.limit {
            len = len.min(k);
        }
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        let mut poly = IntPoly {
            coeffs: out,
            limit: self.limit,
        };
        poly.normalize();
        poly
    }

    fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        let coeffs = (0..len)
            .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
            .collect();
        let mut poly = IntPoly {
            coeffs,
            limit: self.limit,
        };
        poly.normalize();
        poly
    }

    fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            limit: self.limit,
        }
    }

    fn times_base_pow(&self, k: usize) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c << k).collect(),
            limit: self.limit,
        }
    }
}

/// An integer with a base, for evaluation at a rational point.
#[derive(Clone, Debug)]
struct Int {
    value: BigInt,
    base: BigInt,
}

impl Scaled for Int {
    fn mul(&self, other: &Self) -> Self {
        Int {
            value: &self.value * &other.value,
            base: self.base.clone(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        Int {
            value: &self.value + &other.value,
            base: self.base.clone(),
        }
    }

    fn neg(&self) -> Self {
        Int {
            value: -&self.value,
            base: self.base.clone(),
        }
    }

    fn times_base_pow(&self, k: usize) -> Self {
        Int {
            value: &self.value * num_traits::pow(self.base.clone(), k),
            base: self.base.clone(),
        }
    }
}

/// Runs the recurrence for `r` levels. `dq` and `dp` are `D·q` and `D·p`;
/// `one` is the unit. Returns the numerators of `P₀(r)`, `P₁(r)` and their
/// common exponent `e` (both are over `D^e`).
fn run_recurrence<T: Scaled>(t: usize, r: usize, dq: &T, dp: &T, one: &T) -> (T, T, usize) {
    let zero = one.add(&one.neg());
    let (mut n0, mut n1, mut e) = (one.clone(), zero, 0usize);
    for _ in 0..r {
        let step = |n_u: &T| -> (T, T) {
            // A = q + pU and c = qU, both over D^{e+1}.
            let a = dq.times_base_pow(e).add(&dp.mul(n_u));
            let c = dq.mul(n_u);
            let g = e + 1;
            // Σ_{k<t} c·A^k·D^{g(t−1−k)} by Horner in A, and A^t alongside.
            let mut acc = c.clone();
            let mut a_pow = a.clone();
            for j in 1..t {
                acc = acc.mul(&a).add(&c.times_base_pow(g * j));
                a_pow = a_pow.mul(&a);
            }
            (acc, a_pow)
        };
        let (sum_u, a_t) = step(&n1);
        let (sum_v, _) = step(&n0);
        n0 = sum_u.add(&a_t);
        n1 = sum_v;
        e = (e + 1) * t;
    }
    (n0, n1, e)
}

fn check_t(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::usage("clip parameter t must be at least 1"));
    }
    Ok(())
}

/// `(P₀(r), P₁(r))` as exact polynomials in `p`.
///
/// Refuses when the degree bound `n(t, r)` exceeds [`DEFAULT_DEGREE_CAP`];
/// use [`p0_p1_truncated`] for the low-order part of larger instances.
pub fn p0_p1(t: usize, r: usize) -> Result<(RationalPoly, RationalPoly)> {
    p0_p1_with_cap(t, r, DEFAULT_DEGREE_CAP)
}

pub fn p0_p1_with_cap(t: usize, r: usize, cap: usize) -> Result<(RationalPoly, RationalPoly)> {
    check_t(t)?;
    let n = num_vars(t, r);
    if n > cap.into() {
        return Err(Error::Resource {
            what: "polynomial degree",
            actual: n.to_usize().unwrap_or(usize::MAX),
            cap,
        });
    }
    Ok(p0_p1_impl(t, r, None))
}

/// `(P₀(r) mod p^k, P₁(r) mod p^k)`; exact in every coefficient below `k`.
///
/// Runs on rational coefficients rather than scaled integers: the common
/// denominator of the full polynomial is `2^{n(t,r)}`, far larger than
/// what the low-order coefficients need.
pub fn p0_p1_truncated(t: usize, r: usize, k: usize) -> Result<(RationalPoly, RationalPoly)> {
    check_t(t)?;
    let q = RationalPoly::new(vec![rat(1, 2), rat(-1, 2)]);
    let step = |prev: &RationalPoly, with_top: bool| -> RationalPoly {
        let a = (&q + &prev.shift(1)).truncate(k);
        let c = q.mul_truncated(prev, k);
        let mut sum = RationalPoly::zero();
        let mut power = RationalPoly::one().truncate(k);
        for _ in 0..t {
            sum = &sum + &c.mul_truncated(&power, k);
            power = power.mul_truncated(&a, k);
        }
        if with_top {
            &sum + &power
        } else {
            sum
        }
    };
    let (mut p0, mut p1) = (RationalPoly::one().truncate(k), RationalPoly::zero());
    for _ in 0..r {
        let next0 = step(&p1, true);
        let next1 = step(&p0, false);
        p0 = next0;
        p1 = next1;
    }
    Ok((p0, p1))
}

fn p0_p1_impl(t: usize, r: usize, limit: Option<usize>) -> (RationalPoly, RationalPoly) {
    let dq = IntPoly::from_ints(&[1, -1], limit);
    let dp = IntPoly::from_ints(&[0, 2], limit);
    let one = IntPoly::from_ints(&[1], limit);
    let (n0, n1, e) = run_recurrence(t, r, &dq, &dp, &one);
    (n0.to_rational(e), n1.to_rational(e))
}

/// `P★(r) = 1 − P₀(r) − P₁(r)`.
pub fn p_star(t: usize, r: usize) -> Result<RationalPoly> {
    let (p0, p1) = p0_p1(t, r)?;
    Ok(&(&RationalPoly::one() - &p0) - &p1)
}

/// A value `num / base^exp`, kept unreduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledValue {
    pub num: BigInt,
    pub base: BigInt,
    pub exp: usize,
}

impl ScaledValue {
    fn denominator(&self) -> BigInt {
        num_traits::pow(self.base.clone(), self.exp)
    }

    /// Reduces to a rational. Takes a gcd, so avoid on huge values.
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), self.denominator())
    }

    /// Exact comparison with a rational, by cross-multiplication.
    pub fn cmp_rational(&self, other: &Rational) -> Ordering {
        (&self.num * other.denom()).cmp(&(other.numer() * self.denominator()))
    }

    pub fn to_f64(&self) -> f64 {
        let den = self.denominator();
        let shift = 128u32;
        let scaled = (&self.num << shift) / &den;
        scaled.to_f64().unwrap_or(f64::NAN) / 2f64.powi(shift as i32)
    }
}

/// `P₀(r)`, `P₁(r)` and `P★(r)` evaluated exactly at a rational `p`.
#[derive(Debug, Clone)]
pub struct PointValues {
    pub p0: ScaledValue,
    pub p1: ScaledValue,
    pub pstar: ScaledValue,
}

/// Evaluates the recurrence directly at `p ∈ [0, 1]`. Cost grows with
/// `n(t, r)·log(den p)` bits, so `t = 2, r = 16` is still quick.
pub fn eval_at(t: usize, r: usize, p: &Rational) -> Result<PointValues> {
    check_t(t)?;
    if p.is_negative() || p > &Rational::one() {
        return Err(Error::domain("p must lie in [0, 1]"));
    }
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let base: BigInt = &b * 2;
    let wrap = |value: BigInt| Int {
        value,
        base: base.clone(),
    };
    let (n0, n1, e) = run_recurrence(t, r, &wrap(&b - &a), &wrap(&a * 2), &wrap(BigInt::one()));
    let total = num_traits::pow(base.clone(), e);
    let star = total - &n0.value - &n1.value;
    let scaled = |num: BigInt| ScaledValue {
        num,
        base: base.clone(),
        exp: e,
    };
    Ok(PointValues {
        p0: scaled(n0.value),
        p1: scaled(n1.value),
        pstar: scaled(star),
    })
}

/// `[1]` and `[p]` coefficients of `P₀(r)` and `P₁(r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffPair {
    pub c0_p0: Rational,
    pub c0_p1: Rational,
    pub c1_p0: Rational,
    pub c1_p1: Rational,
}

/// `([1]P₀(r), [1]P₁(r))` for `r = 1..=r_max` by the recurrence
/// `[1]P₀(r) = β[1]P₁(r−1) + α`, `[1]P₁(r) = β[1]P₀(r−1)`.
pub fn const_coeffs_recurrence(t: usize, r_max: usize) -> Result<Vec<(Rational, Rational)>> {
    check_t(t)?;
    let alpha = pow2_inv(t as u32);
    let beta = Rational::one() - &alpha;
    let mut out = Vec::with_capacity(r_max);
    let (mut c0, mut c1) = (alpha.clone(), Rational::one() - &alpha);
    for r in 1..=r_max {
        if r > 1 {
            let next0 = &beta * &c1 + &alpha;
            let next1 = &beta * &c0;
            c0 = next0;
            c1 = next1;
        }
        out.push((c0.clone(), c1.clone()));
    }
    Ok(out)
}

/// The closed forms of `([1]P₀(r), [1]P₁(r))`, split by the parity of `r`.
pub fn const_coeffs_closed(t: usize, r: usize) -> Result<(Rational, Rational)> {
    check_t(t)?;
    if r == 0 {
        return Err(Error::usage("r must be at least 1"));
    }
    let beta = Rational::one() - pow2_inv(t as u32);
    let beta_pow = num_traits::pow(beta.clone(), r + 1);
    let denom = Rational::one() + &beta;
    Ok(if r % 2 == 1 {
        ((Rational::one() - &beta_pow) / &denom, (&beta + &beta_pow) / &denom)
    } else {
        ((Rational::one() + &beta_pow) / &denom, (&beta - &beta_pow) / &denom)
    })
}

/// `([1]P₀(r), [1]P₁(r))`, computed both ways; disagreement is an
/// [`Error::Invariant`].
pub fn const_coeffs(t: usize, r: usize) -> Result<(Rational, Rational)> {
    if r == 0 {
        return Err(Error::usage("r must be at least 1"));
    }
    let by_recurrence = const_coeffs_recurrence(t, r)?.pop().expect("r ≥ 1");
    let closed = const_coeffs_closed(t, r)?;
    if by_recurrence != closed {
        return Err(Error::invariant(format!(
            "constant coefficients disagree at t={t}, r={r}: recurrence {by_recurrence:?}, closed form {closed:?}"
        )));
    }
    Ok(closed)
}

/// All four coefficients for `r = 1..=r_max` from the coefficient
/// recurrences, without building any polynomial.
///
/// With `c = [1]P₀(r−1)` and `c' = [1]P₁(r−1)`:
///
/// ```text
/// [p]P₁(r) = β[p]P₀(r−1) + ((t+2)/2ᵗ − 2)c + 2(1 − (t+1)/2ᵗ)c²
/// [p]P₀(r) = β[p]P₁(r−1) + ((t+2)/2ᵗ − 2)c' + 2(1 − (t+1)/2ᵗ)c'² − t/2ᵗ + (2t/2ᵗ)c'
/// ```
pub fn coeff_recurrence(t: usize, r_max: usize) -> Result<Vec<CoeffPair>> {
    check_t(t)?;
    let alpha = pow2_inv(t as u32);
    let beta = Rational::one() - &alpha;
    let tt = rat_int(t as i64);
    let lin = (&tt + rat_int(2)) * &alpha - rat_int(2);
    let quad = rat_int(2) * (Rational::one() - (&tt + rat_int(1)) * &alpha);
    let base = -(&tt * &alpha);
    let consts = const_coeffs_recurrence(t, r_max)?;
    let mut out: Vec<CoeffPair> = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let (c0_p0, c0_p1) = consts[r - 1].clone();
        let pair = if r == 1 {
            CoeffPair {
                c0_p0,
                c0_p1,
                c1_p0: base.clone(),
                c1_p1: base.clone(),
            }
        } else {
            let prev = &out[r - 2];
            let c = &prev.c0_p0;
            let c_dash = &prev.c0_p1;
            let c1_p1 = &beta * &prev.c1_p0 + &lin * c + &quad * c * c;
            let c1_p0 = &beta * &prev.c1_p1
                + &lin * c_dash
                + &quad * c_dash * c_dash
                + &base
                + rat_int(2) * &tt * &alpha * c_dash;
            CoeffPair {
                c0_p0,
                c0_p1,
                c1_p0,
                c1_p1,
            }
        };
        out.push(pair);
    }
    Ok(out)
}

/// `([p]P₀(r), [p]P₁(r))` from the coefficient recurrence, cross-checked
/// against the coefficients of `P₀(r), P₁(r) mod p²`.
pub fn p_coeffs(t: usize, r: usize) -> Result<(Rational, Rational)> {
    if r == 0 {
        return Err(Error::usage("r must be at least 1"));
    }
    let pair = coeff_recurrence(t, r)?.pop().expect("r ≥ 1");
    let (p0, p1) = p0_p1_truncated(t, r, 2)?;
    if (p0.coeff(1), p1.coeff(1)) != (pair.c1_p0.clone(), pair.c1_p1.clone())
        || (p0.coeff(0), p1.coeff(0)) != (pair.c0_p0.clone(), pair.c0_p1.clone())
    {
        return Err(Error::invariant(format!(
            "coefficient recurrence disagrees with the polynomial recurrence at t={t}, r={r}"
        )));
    }
    Ok((pair.c1_p0, pair.c1_p1))
}

/// `g(r) = [p]P₀(r) + [p]P₁(r)`.
pub fn g_value(t: usize, r: usize) -> Result<Rational> {
    let (a, b) = p_coeffs(t, r)?;
    Ok(a + b)
}

/// One named identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn binomial(n: usize, k: usize) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Checks the six elementary identities and inequalities used in the
/// coefficient bounds, exactly, for `n ≤ 30` and `p` on the grid
/// `{0, 1/16, …, 1}`.
pub fn identity_suite() -> Vec<IdentityCheck> {
    let grid: Vec<Rational> = (0..=16).map(|k| rat(k, 16)).collect();
    let ns = 1..=30usize;
    let mut checks = Vec::new();
    let mut record = |name: &'static str, failure: Option<String>| {
        checks.push(IdentityCheck {
            name,
            passed: failure.is_none(),
            detail: failure.unwrap_or_else(|| "ok".to_string()),
        });
    };

    // (1) geometric sum, with p = 1 read as the limit n + 1.
    let mut fail = None;
    for n in ns.clone() {
        for p in &grid {
            let lhs: Rational = (0..=n).map(|i| num_traits::pow(p.clone(), i)).sum();
            let rhs = if p.is_one() {
                rat_int(n as i64 + 1)
            } else {
                (Rational::one() - num_traits::pow(p.clone(), n + 1)) / (Rational::one() - p)
            };
            if lhs != rhs {
                fail.get_or_insert(format!("n={n}, p={p}"));
            }
        }
    }
    record("geometric sum", fail);

    // (2) Σ k/2^k = 2 − (n+2)/2^n ≤ 2.
    let mut fail = None;
    for n in ns.clone() {
        let lhs: Rational = (1..=n).map(|k| rat_int(k as i64) * pow2_inv(k as u32)).sum();
        let rhs = rat_int(2) - rat_int(n as i64 + 2) * pow2_inv(n as u32);
        if lhs != rhs || lhs > rat_int(2) {
            fail.get_or_insert(format!("n={n}"));
        }
    }
    record("sum k/2^k", fail);

    // (3) Σ C(k,2)/2^k = 2 − (n² + 3n + 4)/2^{n+1} ≤ 2.
    let mut fail = None;
    for n in ns.clone() {
        let lhs: Rational = (2..=n)
            .map(|k| Rational::from_integer(binomial(k, 2)) * pow2_inv(k as u32))
            .sum();
        let n_i = n as i64;
        let rhs = rat_int(2) - rat_int(n_i * n_i + 3 * n_i + 4) * pow2_inv(n as u32 + 1);
        if lhs != rhs || lhs > rat_int(2) {
            fail.get_or_insert(format!("n={n}"));
        }
    }
    record("sum C(k,2)/2^k", fail);

    // (4) Σ C(n,i) q^{n−i} p^i (i+1) = pn(q+p)^{n−1} + (q+p)^n for independent p, q.
    let mut fail = None;
    let coarse: Vec<Rational> = (0..=6).map(|k| rat(k, 6)).collect();
    for n in ns.clone() {
        for p in &coarse {
            for q in &coarse {
                let lhs: Rational = (0..=n)
                    .map(|i| {
                        Rational::from_integer(binomial(n, i))
                            * num_traits::pow(q.clone(), n - i)
                            * num_traits::pow(p.clone(), i)
                            * rat_int(i as i64 + 1)
                    })
                    .sum();
                let s = p + q;
                let rhs = p * rat_int(n as i64) * num_traits::pow(s.clone(), n - 1) + num_traits::pow(s, n);
                if lhs != rhs {
                    fail.get_or_insert(format!("n={n}, p={p}, q={q}"));
                }
            }
        }
    }
    record("binomial moment", fail);

    // (5) (1 − (1−p)^t)/p ≤ t and (6) ((1−p)^t − 1 + tp)/p² ≤ C(t,2). The
    // left sides are the tails [↑p](1−p)^t and [↑p²](1−p)^t, which also
    // covers p = 0.
    let one_minus_p = RationalPoly::new(vec![rat_int(1), rat_int(-1)]);
    let mut fail5 = None;
    let mut fail6 = None;
    for t in ns {
        let power = (0..t).fold(RationalPoly::one(), |acc, _| &acc * &one_minus_p);
        let first = (-&power).tail(1);
        let second = power.tail(2);
        let bound6 = Rational::from_integer(binomial(t, 2));
        for p in &grid {
            if first.eval(p) > rat_int(t as i64) {
                fail5.get_or_insert(format!("t={t}, p={p}"));
            }
            if second.eval(p) > bound6 {
                fail6.get_or_insert(format!("t={t}, p={p}"));
            }
        }
    }
    record("(1-(1-p)^t)/p <= t", fail5);
    record("((1-p)^t-1+tp)/p^2 <= C(t,2)", fail6);
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RationalPoly {
        RationalPoly::new(vec![rat(1, 2), rat(-1, 2)])
    }

    #[test]
    fn base_cases() {
        let (p0, p1) = p0_p1(1, 1).unwrap();
        assert_eq!(p0, q());
        assert_eq!(p1, q());
        for t in 1..=4u32 {
            let (p0, p1) = p0_p1(t as usize, 1).unwrap();
            let q_t = (0..t).fold(RationalPoly::one(), |acc, _| &acc * &q());
            let one_minus_q = &RationalPoly::one() - &q();
            let complement = (0..t).fold(RationalPoly::one(), |acc, _| &acc * &one_minus_q);
            assert_eq!(p0, q_t);
            assert_eq!(p1, &RationalPoly::one() - &complement);
        }
    }

    #[test]
    fn xi_1_2_polynomials() {
        let (p0, _) = p0_p1(1, 2).unwrap();
        let p = RationalPoly::p();
        let expected = &(&q() + &(&q() * &q())) + &(&p * &q());
        assert_eq!(p0, expected);
        assert_eq!(p_star(1, 1).unwrap(), p);
    }

    #[test]
    fn probabilities_on_grid() {
        for t in 1..=3 {
            for r in 1..=3 {
                let (p0, p1) = p0_p1(t, r).unwrap();
                let ps = p_star(t, r).unwrap();
                assert_eq!(&(&p0 + &p1) + &ps, RationalPoly::one());
                for k in 0..=20 {
                    let x = rat(k, 20);
                    for poly in [&p0, &p1, &ps] {
                        let v = poly.eval(&x);
                        assert!(v >= rat_int(0) && v <= rat_int(1));
                    }
                }
            }
        }
        for t in 1..=3 {
            for r in 1..=6 {
                if let Ok(ps) = p_star(t, r) {
                    assert_eq!(ps.coeff(0), rat_int(0));
                }
            }
        }
    }

    #[test]
    fn truncation_agrees_with_full() {
        let (p0, p1) = p0_p1(2, 4).unwrap();
        let (t0, t1) = p0_p1_truncated(2, 4, 7).unwrap();
        assert_eq!(p0.truncate(7), t0);
        assert_eq!(p1.truncate(7), t1);
    }

    #[test]
    fn degree_cap_is_enforced() {
        assert!(p0_p1(2, 12).unwrap_err().is_resource());
    }

    #[test]
    fn point_evaluation_matches_polynomial() {
        for (t, r) in [(1, 5), (2, 3), (3, 2)] {
            let (p0, p1) = p0_p1(t, r).unwrap();
            for x in [rat(0, 1), rat(1, 7), rat(2, 5), rat(1, 1)] {
                let values = eval_at(t, r, &x).unwrap();
                assert_eq!(values.p0.to_rational(), p0.eval(&x));
                assert_eq!(values.p1.to_rational(), p1.eval(&x));
                assert_eq!(
                    values.pstar.cmp_rational(&(rat_int(1) - p0.eval(&x) - p1.eval(&x))),
                    Ordering::Equal
                );
            }
        }
    }

    #[test]
    fn const_coeff_examples() {
        assert_eq!(const_coeffs(1, 1).unwrap(), (rat(1, 2), rat(1, 2)));
        assert_eq!(const_coeffs(1, 2).unwrap().0, rat(3, 4));
        for t in 1..=6 {
            for r in 1..=50 {
                let (a, b) = const_coeffs(t, r).unwrap();
                assert_eq!(a + b, rat_int(1));
            }
        }
    }

    #[test]
    fn p_coeff_examples() {
        assert_eq!(p_coeffs(1, 1).unwrap(), (rat(-1, 2), rat(-1, 2)));
        assert_eq!(p_coeffs(1, 2).unwrap().0, rat(-1, 2));
        assert_eq!(g_value(1, 1).unwrap(), rat_int(-1));
    }

    #[test]
    fn coefficient_routes_agree() {
        for t in 1..=3 {
            let pairs = coeff_recurrence(t, 12).unwrap();
            for r in 1..=12 {
                let (p0, p1) = p0_p1_truncated(t, r, 2).unwrap();
                let pair = &pairs[r - 1];
                assert_eq!(p0.coeff(0), pair.c0_p0, "t={t} r={r}");
                assert_eq!(p1.coeff(0), pair.c0_p1, "t={t} r={r}");
                assert_eq!(p0.coeff(1), pair.c1_p0, "t={t} r={r}");
                assert_eq!(p1.coeff(1), pair.c1_p1, "t={t} r={r}");
            }
        }
    }

    #[test]
    fn identities_hold() {
        for check in identity_suite() {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[test]
    fn scaled_value_conversions() {
        let v = ScaledValue {
            num: BigInt::from(3),
            base: BigInt::from(4),
            exp: 2,
        };
        assert_eq!(v.to_rational(), rat(3, 16));
        assert!((v.to_f64() - 0.1875).abs() < 1e-15);
        assert_eq!(v.cmp_rational(&rat(1, 5)), Ordering::Less);
    }
}
