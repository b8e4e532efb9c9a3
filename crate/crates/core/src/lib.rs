//! Clipped decision trees, xor tree tribes and random restrictions.
//!
//! The crate builds t-clipped xor tree tribes `Ξ_t(r)` and arbitrary clipped
//! decision trees, hits them with random p-restrictions, and checks the
//! quantitative switching-lemma statements about them: the `(4p2^t)^d`
//! upper bound, the `(c₀p2^t)^d` lower bound machinery, the `P₀/P₁/P★`
//! polynomial recurrences and the closed-form Fourier coefficients.
//!
//! Everything that feeds an equality check is exact: truth-table measures and
//! polynomial coefficients are arbitrary precision rationals. Floating point
//! only appears in Monte Carlo standard errors and human-facing summaries.
//!
//! Module map:
//!
//! - [`boolfn`]: truth tables, minimal decision-tree depth, Fourier transform,
//!   bias, correlation, influence.
//! - [`dtree`]: decision trees, clipping, restriction, text format.
//! - [`tribes`]: complete clipped trees `W_t(r)` and xor tribes `Ξ_t(r)`.
//! - [`restrict`]: restriction sampling, exact enumeration, Monte Carlo.
//! - [`poly`] and [`polyrec`]: exact univariate polynomials and the
//!   `P₀/P₁/P★` recurrences with their coefficient lemmas.
//! - [`spectral`]: Jacobsthal numbers, closed-form Fourier coefficients, bias.
//! - [`bounds`]: upper/lower bound values, the `U(p)` kernel, the `γ_d`
//!   lower-bound table.
//! - [`verify`]: the acceptance checks, shared by the CLI and the test suite.

pub mod boolfn;
pub mod bounds;
pub mod dtree;
mod error;
pub mod poly;
pub mod polyrec;
pub mod restrict;
pub mod spectral;
pub mod tribes;
pub mod verify;

pub use boolfn::{Constancy, FourierSpectrum, TruthTable};
pub use dtree::{ClipReport, DecisionTree, Node, NodeId, Var};
pub use error::{Error, Result};
pub use poly::RationalPoly;
pub use restrict::{Cell, EstimateReport, OvercapPolicy, Restriction, RestrictionLaw};
pub use tribes::{TribeSpec, TribeTree};

/// Exact rational used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Parses `"num/den"` or a plain integer into an exact rational.
///
/// Decimal and float notations are rejected: every probability fed into an
/// exact check has to be exact itself.
pub fn parse_rational(text: &str) -> Result<Rational> {
    use num_bigint::BigInt;
    use num_traits::Zero;

    let text = text.trim();
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim().parse::<BigInt>().map_err(|_| Error::Parse {
            offset: 0,
            message: format!("expected an integer or num/den, got {text:?}"),
        })
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::usage("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(text)?)),
    }
}

/// Formats a rational as `"num/den"` (always with a denominator).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub(crate) fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub(crate) fn rat_int(value: i64) -> Rational {
    Rational::from_integer(value.into())
}

/// `2^-exp` as an exact rational.
pub(crate) fn pow2_inv(exp: u32) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1) << exp)
}

/// Lossy conversion for reports.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("1/840").unwrap(), rat(1, 840));
        assert_eq!(parse_rational(" 3 ").unwrap(), rat_int(3));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
    }

    #[test]
    fn parse_rational_rejects_floats() {
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(matches!(parse_rational("1/0"), Err(Error::Usage(_))));
    }

    #[test]
    fn format_rational_always_has_denominator() {
        assert_eq!(format_rational(&rat_int(1)), "1/1");
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
    }
}
