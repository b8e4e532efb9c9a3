//! Ground-truth boolean functions as full truth tables.
//!
//! Sign convention, used by every Fourier quantity in the crate: boolean `0`
//! maps to `+1` and boolean `1` maps to `-1`, for inputs and outputs alike.
//! Under it `f̂_∅ = E[f]` and `χ_S(x) = (-1)^{popcount(x & S)}`.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::restrict::{Cell, Restriction};
use crate::{Error, Rational, Result};

/// Default cap on the number of live variables for [`TruthTable::dt_depth`].
pub const DEFAULT_DEPTH_CAP: usize = 14;

/// Outcome of [`TruthTable::constancy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constancy {
    Const0,
    Const1,
    NonConstant,
}

impl Constancy {
    pub fn is_constant(self) -> bool {
        self != Constancy::NonConstant
    }
}

/// A boolean function `{0,1}^n -> {0,1}` stored as its full value table.
///
/// Entry `x` holds `f` on the assignment whose variable `i` is bit `i` of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    values: Vec<bool>,
}

impl TruthTable {
    /// Hard cap on the number of variables a table may have.
    pub const MAX_VARS: usize = 24;

    pub fn from_values(n: usize, values: Vec<bool>) -> Result<Self> {
        check_cap(n)?;
        if values.len() != 1usize << n {
            return Err(Error::usage(format!(
                "truth table for {n} variables needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(TruthTable { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_cap(n)?;
        Ok(TruthTable {
            n,
            values: (0..1usize << n).map(f).collect(),
        })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.count_ones() % 2 == 1)
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x != 0)
    }

    pub fn dictator(n: usize, var: usize) -> Result<Self> {
        if var >= n {
            return Err(Error::usage(format!("variable {var} out of range for n = {n}")));
        }
        Self::from_fn(n, |x| (x >> var) & 1 == 1)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Value on the assignment with integer encoding `index`.
    pub fn value(&self, index: usize) -> bool {
        self.values[index]
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.n {
            return Err(Error::usage(format!(
                "assignment has {} bits, function has {} variables",
                assignment.len(),
                self.n
            )));
        }
        let index = assignment
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
        Ok(self.values[index])
    }

    pub fn constancy(&self) -> Constancy {
        let first = self.values[0];
        if self.values.iter().all(|&v| v == first) {
            if first {
                Constancy::Const1
            } else {
                Constancy::Const0
            }
        } else {
            Constancy::NonConstant
        }
    }

    /// Whether flipping variable `var` ever changes the value.
    pub fn depends_on(&self, var: usize) -> bool {
        let bit = 1usize << var;
        (0..self.values.len())
            .filter(|x| x & bit == 0)
            .any(|x| self.values[x] != self.values[x | bit])
    }

    /// Variables the function actually depends on, in increasing order.
    pub fn live_vars(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.depends_on(i)).collect()
    }

    pub fn negate(&self) -> TruthTable {
        TruthTable {
            n: self.n,
            values: self.values.iter().map(|v| !v).collect(),
        }
    }

    /// Renames variables: new variable `i` is old variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<TruthTable> {
        if perm.len() != self.n {
            return Err(Error::usage("permutation length differs from variable count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::usage("not a permutation"));
            }
        }
        TruthTable::from_fn(self.n, |x| {
            let old = perm
                .iter()
                .enumerate()
                .fold(0usize, |acc, (new, &old)| acc | (((x >> new) & 1) << old));
            self.values[old]
        })
    }

    /// Sub-function on the variables listed in `keep` (in that order), with
    /// every other variable fixed by `fixed` (bit `i` of `fixed` is the value
    /// of variable `i`).
    pub fn subfunction(&self, keep: &[usize], fixed: usize) -> Result<TruthTable> {
        let keep_mask = keep.iter().fold(0usize, |m, &v| m | (1 << v));
        let base = fixed & !keep_mask;
        TruthTable::from_fn(keep.len(), |y| {
            let x = keep
                .iter()
                .enumerate()
                .fold(base, |acc, (j, &v)| acc | (((y >> j) & 1) << v));
            self.values[x]
        })
    }

    /// `f|_ρ` as a table over the starred variables, in increasing order.
    pub fn restrict(&self, rho: &Restriction) -> Result<TruthTable> {
        if rho.len() != self.n {
            return Err(Error::usage(format!(
                "restriction covers {} variables, function has {}",
                rho.len(),
                self.n
            )));
        }
        let mut keep = Vec::new();
        let mut fixed = 0usize;
        for (i, cell) in rho.cells().iter().enumerate() {
            match cell {
                Cell::Star => keep.push(i),
                Cell::One => fixed |= 1 << i,
                Cell::Zero => {}
            }
        }
        self.subfunction(&keep, fixed)
    }

    /// Exact minimal decision-tree depth with the default live-variable cap.
    pub fn dt_depth(&self) -> Result<usize> {
        self.dt_depth_with_cap(DEFAULT_DEPTH_CAP)
    }

    /// Exact minimal decision-tree depth.
    ///
    /// Variables the function ignores are dropped first; the remaining search
    /// is memoized over subcubes. A subcube is the pair (fixed-variable mask,
    /// fixed values), stored as a base-3 index with digit `2` meaning free.
    pub fn dt_depth_with_cap(&self, cap: usize) -> Result<usize> {
        let live = self.live_vars();
        if live.len() > cap {
            return Err(Error::Resource {
                what: "live variables",
                actual: live.len(),
                cap,
            });
        }
        if live.is_empty() {
            return Ok(0);
        }
        let core = self.subfunction(&live, 0)?;
        Ok(DepthSearch::new(&core).depth_of_full_cube())
    }

    pub fn fourier_transform(&self) -> FourierSpectrum {
        let mut coeffs: Vec<i64> = self.values.iter().map(|&v| if v { -1 } else { 1 }).collect();
        let mut half = 1;
        while half < coeffs.len() {
            for block in coeffs.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            half *= 2;
        }
        FourierSpectrum {
            n: self.n,
            numerators: coeffs,
        }
    }

    fn zeros(&self) -> usize {
        self.values.iter().filter(|&&v| !v).count()
    }

    fn uniform(&self, count: usize) -> Rational {
        Rational::new(BigInt::from(count), BigInt::from(1u64) << self.n)
    }

    /// `|Pr[f = 0] - 1/2|`.
    pub fn bias(&self) -> Rational {
        (self.uniform(self.zeros()) - crate::rat(1, 2)).abs()
    }

    /// `Pr[f = 0]` under the uniform distribution.
    pub fn prob_zero(&self) -> Rational {
        self.uniform(self.zeros())
    }

    /// `Pr[f(x) = g(x)]`.
    pub fn correlation(&self, other: &TruthTable) -> Result<Rational> {
        if self.n != other.n {
            return Err(Error::usage(format!(
                "correlation needs equal variable counts, got {} and {}",
                self.n, other.n
            )));
        }
        let agree = self.values.iter().zip(&other.values).filter(|(a, b)| a == b).count();
        Ok(self.uniform(agree))
    }

    /// Probability that flipping variable `var` flips the value.
    pub fn influence(&self, var: usize) -> Result<Rational> {
        if var >= self.n {
            return Err(Error::usage(format!("variable {var} out of range for n = {}", self.n)));
        }
        let bit = 1usize << var;
        let flips = (0..self.values.len())
            .filter(|&x| self.values[x] != self.values[x ^ bit])
            .count();
        Ok(self.uniform(flips))
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > TruthTable::MAX_VARS {
        return Err(Error::Resource {
            what: "truth table variables",
            actual: n,
            cap: TruthTable::MAX_VARS,
        });
    }
    Ok(())
}

const UNKNOWN: u8 = u8::MAX;
const NONCONST: u8 = 2;

/// Memoized exact depth search over the subcubes of a function whose
/// variables are all live.
struct DepthSearch<'a> {
    table: &'a TruthTable,
    pow3: Vec<usize>,
    // 0 / 1 / NONCONST for constancy; UNKNOWN when not yet computed.
    constancy: Vec<u8>,
    depth: Vec<u8>,
}

impl<'a> DepthSearch<'a> {
    fn new(table: &'a TruthTable) -> Self {
        let n = table.num_vars();
        let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
        let states = pow3[n];
        DepthSearch {
            table,
            pow3,
            constancy: vec![UNKNOWN; states],
            depth: vec![UNKNOWN; states],
        }
    }

    fn depth_of_full_cube(&mut self) -> usize {
        let n = self.table.num_vars();
        let full = (0..n).map(|i| 2 * self.pow3[i]).sum();
        self.depth(full) as usize
    }

    fn digit(&self, state: usize, var: usize) -> usize {
        (state / self.pow3[var]) % 3
    }

    fn first_free(&self, state: usize) -> Option<usize> {
        (0..self.table.num_vars()).find(|&v| self.digit(state, v) == 2)
    }

    fn constancy(&mut self, state: usize) -> u8 {
        if self.constancy[state] != UNKNOWN {
            return self.constancy[state];
        }
        let result = match self.first_free(state) {
            None => {
                let index = (0..self.table.num_vars()).fold(0usize, |acc, v| acc | (self.digit(state, v) << v));
                u8::from(self.table.value(index))
            }
            Some(v) => {
                let a = self.constancy(state - 2 * self.pow3[v]);
                let b = self.constancy(state - self.pow3[v]);
                if a == b && a != NONCONST {
                    a
                } else {
                    NONCONST
                }
            }
        };
        self.constancy[state] = result;
        result
    }

    fn depth(&mut self, state: usize) -> u8 {
        if self.depth[state] != UNKNOWN {
            return self.depth[state];
        }
        let result = if self.constancy(state) != NONCONST {
            0
        } else {
            let mut best = u8::MAX;
            for v in 0..self.table.num_vars() {
                if self.digit(state, v) != 2 {
                    continue;
                }
                let zero = self.depth(state - 2 * self.pow3[v]);
                if zero + 1 >= best {
                    continue;
                }
                let one = self.depth(state - self.pow3[v]);
                best = best.min(1 + zero.max(one));
            }
            best
        };
        self.depth[state] = result;
        result
    }
}

/// Exact Fourier coefficients of a `±1`-valued function.
///
/// Stored as integer numerators over the common denominator `2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierSpectrum {
    n: usize,
    numerators: Vec<i64>,
}

impl FourierSpectrum {
    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// `f̂_S` for the subset encoded by bitmask `set`.
    pub fn coefficient(&self, set: usize) -> Rational {
        Rational::new(BigInt::from(self.numerators[set]), BigInt::from(1u64) << self.n)
    }

    /// Numerator of `f̂_S` over `2^n`.
    pub fn numerator(&self, set: usize) -> i64 {
        self.numerators[set]
    }

    /// `Σ_S f̂_S²`, exactly.
    pub fn parseval_sum(&self) -> Rational {
        let total: BigInt = self.numerators.iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum();
        Rational::new(total, BigInt::from(1u64) << (2 * self.n))
    }

    /// `Σ_{S ∋ var} f̂_S²`, which equals the influence of `var`.
    pub fn influence_from_spectrum(&self, var: usize) -> Rational {
        let total: BigInt = self
            .numerators
            .iter()
            .enumerate()
            .filter(|(s, _)| (s >> var) & 1 == 1)
            .map(|(_, &c)| BigInt::from(c) * BigInt::from(c))
            .sum();
        Rational::new(total, BigInt::from(1u64) << (2 * self.n))
    }

    /// Nonzero coefficients as `(set, f̂_S)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, Rational)> + '_ {
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, _)| (s, self.coefficient(s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    /// Decision version by plain recursion, no memo: can some tree of depth at
    /// most `budget` compute the sub-function on the free variables?
    fn computable_within(table: &TruthTable, budget: usize) -> bool {
        if table.constancy().is_constant() {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let n = table.num_vars();
        (0..n).any(|v| {
            let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            computable_within(&table.subfunction(&keep, 0).unwrap(), budget - 1)
                && computable_within(&table.subfunction(&keep, 1 << v).unwrap(), budget - 1)
        })
    }

    #[test]
    fn evaluate_examples() {
        let zero = TruthTable::constant(3, false).unwrap();
        assert!(!zero.evaluate(&[true, false, true]).unwrap());
        let or = TruthTable::or(2).unwrap();
        assert!(!or.evaluate(&[false, false]).unwrap());
        assert!(or.evaluate(&[true, false]).unwrap());
        assert!(matches!(or.evaluate(&[true]), Err(Error::Usage(_))));
    }

    #[test]
    fn constancy_examples() {
        assert_eq!(TruthTable::constant(4, false).unwrap().constancy(), Constancy::Const0);
        assert_eq!(TruthTable::parity(3).unwrap().constancy(), Constancy::NonConstant);
        let one = TruthTable::from_values(0, vec![true]).unwrap();
        assert_eq!(one.constancy(), Constancy::Const1);
    }

    #[test]
    fn from_values_checks_length_and_cap() {
        assert!(TruthTable::from_values(2, vec![false; 3]).is_err());
        assert!(TruthTable::constant(25, false).unwrap_err().is_resource());
    }

    #[test]
    fn depth_of_constants_or_and_parity() {
        assert_eq!(TruthTable::constant(5, true).unwrap().dt_depth().unwrap(), 0);
        for d in 1..=6 {
            assert_eq!(TruthTable::or(d).unwrap().dt_depth().unwrap(), d);
        }
        let parity4 = TruthTable::parity(4).unwrap();
        assert_eq!(parity4.dt_depth().unwrap(), 4);
        // Independent oracle: no tree of depth 3 computes 4-bit parity.
        assert!(!computable_within(&parity4, 3));
        assert!(computable_within(&parity4, 4));
    }

    #[test]
    fn depth_ignores_dead_variables() {
        // f = x0 XOR x3 on six variables.
        let f = TruthTable::from_fn(6, |x| ((x ^ (x >> 3)) & 1) == 1).unwrap();
        assert_eq!(f.live_vars(), vec![0, 3]);
        assert_eq!(f.dt_depth_with_cap(2).unwrap(), 2);
    }

    #[test]
    fn depth_cap_is_a_resource_error() {
        let err = TruthTable::parity(5).unwrap().dt_depth_with_cap(4).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn fourier_examples() {
        let zero = TruthTable::constant(3, false).unwrap().fourier_transform();
        assert_eq!(zero.coefficient(0), rat_int(1));
        assert!((1..8).all(|s| zero.coefficient(s).is_zero()));

        let dictator = TruthTable::dictator(1, 0).unwrap().fourier_transform();
        assert_eq!(dictator.coefficient(1), rat_int(1));
        assert!(dictator.coefficient(0).is_zero());
    }

    #[test]
    fn measures_examples() {
        assert!(TruthTable::parity(3).unwrap().bias().is_zero());
        assert_eq!(TruthTable::or(2).unwrap().bias(), rat(1, 4));
        let parity = TruthTable::parity(4).unwrap();
        for i in 0..4 {
            assert!(parity.influence(i).unwrap().is_one());
        }
        let or3 = TruthTable::or(3).unwrap();
        assert!(or3.correlation(&parity).is_err());
        assert_eq!(or3.influence(0).unwrap(), rat(1, 4));
    }

    fn table_strategy(max_n: usize) -> impl Strategy<Value = TruthTable> {
        (0..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), 1usize << n)
                .prop_map(move |v| TruthTable::from_values(n, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn parseval_and_influence_identity(f in table_strategy(8)) {
            let spectrum = f.fourier_transform();
            prop_assert!(spectrum.parseval_sum().is_one());
            // f̂_∅ = E[f] = Pr[f = 0] - Pr[f = 1].
            prop_assert_eq!(spectrum.coefficient(0), f.prob_zero() * rat_int(2) - Rational::one());
            for i in 0..f.num_vars() {
                prop_assert_eq!(f.influence(i).unwrap(), spectrum.influence_from_spectrum(i));
            }
        }

        #[test]
        fn depth_zero_iff_constant(f in table_strategy(6)) {
            let depth = f.dt_depth().unwrap();
            prop_assert_eq!(depth == 0, f.constancy().is_constant());
            prop_assert!(depth <= f.live_vars().len());
        }

        #[test]
        fn depth_matches_plain_recursion(f in table_strategy(5)) {
            let depth = f.dt_depth().unwrap();
            prop_assert!(computable_within(&f, depth));
            if depth > 0 {
                prop_assert!(!computable_within(&f, depth - 1));
            }
        }

        #[test]
        fn depth_invariant_under_permutation_and_negation(
            (f, perm) in table_strategy(6).prop_flat_map(|f| {
                let n = f.num_vars();
                (Just(f), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
        ) {
            let depth = f.dt_depth().unwrap();
            prop_assert_eq!(f.permute(&perm).unwrap().dt_depth().unwrap(), depth);
            prop_assert_eq!(f.negate().dt_depth().unwrap(), depth);
        }
    }
}
