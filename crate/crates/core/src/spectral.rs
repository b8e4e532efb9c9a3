//! Closed-form Fourier coefficients and bias of xor tree tribes, and their
//! comparison against the brute-force transform.
//!
//! Fourier coefficients use the `±1` convention of [`crate::boolfn`]:
//! `f̂_S = E[(−1)^{f(x)} · (−1)^{Σ_{i∈S} xᵢ}]`. Sets are bitmasks over 0-based
//! variable ids.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::boolfn::FourierSpectrum;
use crate::dtree::Var;
use crate::tribes::{build_xor_tribe, TribeTree};
use crate::{pow2_inv, rat, Error, Rational, Result};

/// `J_i = (2^i − (−1)^i)/3`.
pub fn jacobsthal(i: u32) -> BigInt {
    let sign = if i.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    ((BigInt::one() << i) - sign) / 3
}

fn vars_of(set: u64) -> Vec<usize> {
    (0..64).filter(|&i| (set >> i) & 1 == 1).collect()
}

/// `f̂_S` of `Ξ₁(n)` for odd `n`, sign included.
///
/// With `j` the 1-based index of the deepest variable of `S`, the value is
/// `(−1)^{|S|+j} J_{n−j+1} / 2^{n−1}`. Even `n` is refused.
pub fn fourier_t1_closed(n: usize, set: u64) -> Result<Rational> {
    if n.is_multiple_of(2) {
        return Err(Error::domain(format!("the t = 1 closed form needs odd n, got {n}")));
    }
    let vars = vars_of(set);
    let Some(&deepest) = vars.last() else {
        return Err(Error::usage("S must be nonempty"));
    };
    if deepest >= n {
        return Err(Error::usage(format!("x{deepest} is not a variable of Ξ₁({n})")));
    }
    let j = deepest + 1;
    let magnitude = Rational::new(jacobsthal((n - j + 1) as u32), BigInt::one() << (n - 1));
    Ok(if (vars.len() + j).is_multiple_of(2) {
        magnitude
    } else {
        -magnitude
    })
}

/// What the general-t closed form claims about one coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FourierClosed {
    /// `S` is not contained in a single root-to-leaf path.
    Zero,
    /// Only `|f̂_S|` is determined.
    Magnitude(Rational),
}

/// Position data of the deepest variable of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathParams {
    /// Steps along the 0-chain from the variable to the end of its block.
    pub k: usize,
    /// Edges from the root.
    pub d: usize,
    pub l: usize,
    pub on_path: bool,
}

pub fn path_params(tribe: &TribeTree, set: u64) -> Result<PathParams> {
    let vars: Vec<Var> = vars_of(set).into_iter().map(|i| Var(i as u32)).collect();
    let Some(&first) = vars.first() else {
        return Err(Error::usage("S must be nonempty"));
    };
    let on_path = tribe.on_one_path(&vars)?;
    let mut deepest = first;
    for &v in &vars {
        if tribe.var_info(v)?.depth > tribe.var_info(deepest)?.depth {
            deepest = v;
        }
    }
    let info = tribe.var_info(deepest)?;
    Ok(PathParams {
        k: tribe.spec.t - info.block_pos + 1,
        d: info.depth,
        l: info.level,
        on_path,
    })
}

/// `|f̂_S| = 2^{−(k+d−1)} (1 − β^{r−l+1}) / (2 − α)` with `α = 2⁻ᵗ`,
/// `β = α − 1`, or zero when `S` is off every root-to-leaf path.
pub fn fourier_general_closed(tribe: &TribeTree, set: u64) -> Result<FourierClosed> {
    let params = path_params(tribe, set)?;
    if !params.on_path {
        return Ok(FourierClosed::Zero);
    }
    let (t, r) = (tribe.spec.t, tribe.spec.r);
    let alpha = pow2_inv(t as u32);
    let beta = &alpha - Rational::one();
    let shape = (Rational::one() - num_traits::pow(beta, r - params.l + 1)) / (rat(2, 1) - &alpha);
    let scale = pow2_inv((params.k + params.d - 1) as u32);
    Ok(FourierClosed::Magnitude(scale * shape))
}

/// `|(1 − (α−1)^{r+1}) / (2 − α) − 1/2|` with `α = 2⁻ᵗ`.
pub fn bias_closed(t: usize, r: usize) -> Result<Rational> {
    if t == 0 || r == 0 {
        return Err(Error::usage("t and r must be at least 1"));
    }
    let alpha = pow2_inv(t as u32);
    let beta = &alpha - Rational::one();
    let prob_zero = (Rational::one() - num_traits::pow(beta, r + 1)) / (rat(2, 1) - &alpha);
    Ok((prob_zero - rat(1, 2)).abs())
}

/// One row of a closed-form versus brute-force comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierRow {
    pub set: u64,
    /// Signed value for `t = 1`; magnitude (or 0 off-path) otherwise.
    pub closed: Rational,
    pub bruteforce: Rational,
    /// Signed equality for `t = 1`, magnitude equality otherwise.
    pub matches: bool,
}

/// Compares the closed forms with the transform of `Ξ_t(r)` on every
/// nonempty set of at most `max_set_size` variables.
///
/// For `t = 1` the signed formula is used (odd `r` only). For `t ≥ 2` the
/// closed value is the claimed magnitude, or 0 off-path.
pub fn compare_fourier(t: usize, r: usize, max_set_size: usize) -> Result<Vec<FourierRow>> {
    let tribe = build_xor_tribe(t, r)?;
    let table = tribe.tree.to_truth_table_natural()?;
    let spectrum = table.fourier_transform();
    compare_spectrum(&tribe, &spectrum, max_set_size)
}

pub fn compare_spectrum(tribe: &TribeTree, spectrum: &FourierSpectrum, max_set_size: usize) -> Result<Vec<FourierRow>> {
    let n = tribe.num_vars();
    let mut rows = Vec::new();
    for set in 1u64..(1u64 << n) {
        if set.count_ones() as usize > max_set_size {
            continue;
        }
        let brute = spectrum.coefficient(set as usize);
        let (closed, matches) = if tribe.spec.t == 1 {
            let value = fourier_t1_closed(n, set)?;
            let ok = value == brute;
            (value, ok)
        } else {
            match fourier_general_closed(tribe, set)? {
                FourierClosed::Zero => {
                    let ok = brute == Rational::from_integer(0.into());
                    (Rational::from_integer(0.into()), ok)
                }
                FourierClosed::Magnitude(m) => {
                    let ok = m == brute.abs();
                    (m, ok)
                }
            }
        };
        rows.push(FourierRow {
            set,
            closed,
            bruteforce: brute,
            matches,
        });
    }
    Ok(rows)
}

/// Formats a set bitmask as `{x0,x3}`.
pub fn format_set(set: u64) -> String {
    let names: Vec<String> = vars_of(set).into_iter().map(|i| format!("x{i}")).collect();
    format!("{{{}}}", names.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobsthal_values_and_recurrence() {
        assert_eq!(jacobsthal(0), BigInt::from(0));
        assert_eq!(jacobsthal(1), BigInt::from(1));
        assert_eq!(jacobsthal(3), BigInt::from(3));
        for i in 2..=64 {
            assert_eq!(jacobsthal(i), jacobsthal(i - 1) + jacobsthal(i - 2) * 2);
        }
    }

    #[test]
    fn t1_examples() {
        assert_eq!(fourier_t1_closed(3, 0b001).unwrap(), rat(3, 4));
        assert_eq!(fourier_t1_closed(3, 0b011).unwrap(), rat(1, 4));
        assert_eq!(fourier_t1_closed(3, 0b100).unwrap(), rat(1, 4));
        assert!(matches!(fourier_t1_closed(4, 1), Err(Error::Domain(_))));
        assert!(fourier_t1_closed(3, 0).is_err());
    }

    #[test]
    fn t1_matches_transform_for_small_odd_n() {
        for n in [1, 3, 5, 7] {
            for row in compare_fourier(1, n, n).unwrap() {
                assert!(row.matches, "n={n} set={}", format_set(row.set));
            }
        }
    }

    #[test]
    fn general_t_matches_transform_on_small_tribes() {
        for (t, r) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            for row in compare_fourier(t, r, 12).unwrap() {
                assert!(
                    row.matches,
                    "t={t} r={r} set={} closed={} brute={}",
                    format_set(row.set),
                    row.closed,
                    row.bruteforce
                );
            }
        }
    }

    #[test]
    fn bias_examples() {
        for t in 1..=4 {
            let or_bias = (pow2_inv(t as u32) - rat(1, 2)).abs();
            assert_eq!(bias_closed(t, 1).unwrap(), or_bias);
        }
        let far = crate::to_f64(&bias_closed(1, 60).unwrap());
        assert!((far - 1.0 / 6.0).abs() < 1e-12);
        for (t, r) in [(1, 5), (2, 3), (3, 2)] {
            let table = build_xor_tribe(t, r).unwrap().tree.to_truth_table_natural().unwrap();
            assert_eq!(bias_closed(t, r).unwrap(), table.bias());
        }
        assert!(bias_closed(1, 0).is_err());
    }
}
