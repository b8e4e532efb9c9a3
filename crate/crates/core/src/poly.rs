//! Exact univariate polynomials in `p` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{format_rational, Rational};

/// `Σ cᵢ pⁱ`, stored lowest degree first with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `p`.
    pub fn p() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `[pⁱ]Q`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// `[↑pⁱ]Q = Σ_{j≥i} cⱼ p^{j−i}`.
    pub fn tail(&self, i: usize) -> Self {
        Self::new(self.coeffs.iter().skip(i).cloned().collect())
    }

    /// `pʲ·Q`.
    pub fn shift(&self, j: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); j];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `Q mod p^k`: keeps coefficients of degree below `k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k).cloned().collect())
    }

    /// `(self · other) mod p^k`.
    pub fn mul_truncated(&self, other: &Self, k: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(k);
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `Qⁿ mod p^k` by repeated squaring.
    pub fn pow_truncated(&self, mut n: u32, k: usize) -> Self {
        let mut base = self.truncate(k);
        let mut acc = Self::one().truncate(k);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_truncated(&base, k);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_truncated(&base, k);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * Rational::from_integer(j.into()))
                .collect(),
        )
    }

    /// Integer numerators over the least common denominator.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        (nums, lcm)
    }

    /// Exact value at `x`.
    ///
    /// Runs Horner's rule on integer numerators and reduces once at the end,
    /// which keeps high-degree evaluation cheap.
    pub fn eval(&self, x: &Rational) -> Rational {
        let Some(m) = self.degree() else {
            return Rational::zero();
        };
        let (nums, lcm) = self.integer_form();
        let (a, b) = (x.numer(), x.denom());
        let mut acc = nums[m].clone();
        let mut b_pow = BigInt::one();
        for j in (0..m).rev() {
            b_pow *= b;
            acc = acc * a + &nums[j] * &b_pow;
        }
        Rational::new(acc, lcm * b_pow)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + crate::to_f64(c))
    }

    /// `Σ j·|cⱼ|·xʲ⁻¹`: bounds `|Q'|` on `[0, x]` for `x ≥ 0`.
    pub fn derivative_bound(&self, x: &Rational) -> Rational {
        let abs = Self::new(self.derivative().coeffs.iter().map(Signed::abs).collect());
        abs.eval(x)
    }

    /// `Σ |cⱼ|·xʲ`: bounds `|Q|` on `[0, x]` for `x ≥ 0`.
    pub fn magnitude_bound(&self, x: &Rational) -> Rational {
        Self::new(self.coeffs.iter().map(Signed::abs).collect()).eval(x)
    }

    /// Certified upper estimate of `Gᵢ(Q) = max_{p ∈ [0, p_max]} |[↑pⁱ]Q(p)|`.
    ///
    /// The grid maximum over `grid_size` evenly spaced points (both ends
    /// included) is padded by the spacing times the derivative bound, so the
    /// result is at least the true maximum.
    pub fn gmax(&self, i: usize, p_max: &Rational, grid_size: usize) -> Rational {
        assert!(grid_size >= 2, "grid needs at least two points");
        assert!(!p_max.is_negative(), "domain must lie in [0, 1]");
        let tail = self.tail(i);
        let steps = Rational::from_integer((grid_size - 1).into());
        let spacing = p_max / &steps;
        let grid_max = (0..grid_size)
            .map(|k| tail.eval(&(&spacing * Rational::from_integer(k.into()))).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        grid_max + spacing * tail.derivative_bound(p_max)
    }

    /// Coefficients as `"num/den"` strings, lowest degree first.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("{c}"),
                1 => format!("({c})p"),
                _ => format!("({c})p^{j}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, other: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, other: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        RationalPoly::new((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    // The product has fewer than len + len coefficients, so no truncation.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: &RationalPoly) -> RationalPoly {
        let k = self.coeffs.len() + other.coeffs.len();
        self.mul_truncated(other, k)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, other: RationalPoly) -> RationalPoly {
                (&self).$method(&other)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);
