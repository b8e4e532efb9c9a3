//! Random p-restrictions: sampling, exhaustive enumeration and Monte Carlo
//! estimation of `Pr[DT_depth(f|ρ) ≥ d]`.
//!
//! # Sampling contract
//!
//! Cell `i` of sample `k` is drawn from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `k`, consuming one `u64` per cell in variable order.
//! With `T = floor(p·2⁶⁴)` a draw `u < T` is a star; among the remaining
//! `2⁶⁴ − T` values the lower half (rounded down) is 0 and the rest is 1.
//! Sample `k` therefore never depends on which worker drew it, and any
//! worker count produces identical tallies.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dtree::DecisionTree;
use crate::poly::RationalPoly;
use crate::{format_rational, Constancy, Error, Rational, Result};

/// Default cap on the number of variables for exhaustive enumeration
/// (`3¹⁴ ≈ 4.8·10⁶` restrictions).
pub const DEFAULT_ENUMERATION_CAP: usize = 14;

/// Default cap on live variables when computing a restricted depth exactly.
pub const DEFAULT_LIVE_CAP: usize = crate::boolfn::DEFAULT_DEPTH_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Zero,
    One,
    Star,
}

impl Cell {
    pub fn as_char(self) -> char {
        match self {
            Cell::Zero => '0',
            Cell::One => '1',
            Cell::Star => '*',
        }
    }
}

/// An assignment of each variable to 0, 1 or `*` (left free).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Restriction {
    cells: Vec<Cell>,
}

impl Restriction {
    pub fn new(cells: Vec<Cell>) -> Self {
        Restriction { cells }
    }

    pub fn all_star(n: usize) -> Self {
        Restriction::new(vec![Cell::Star; n])
    }

    /// The `index`-th restriction on `n` variables in base-3 order: digit `i`
    /// (least significant first) is cell `i`, with 0 ↦ Zero, 1 ↦ One, 2 ↦ Star.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let cells = (0..n)
            .map(|_| {
                let digit = index % 3;
                index /= 3;
                match digit {
                    0 => Cell::Zero,
                    1 => Cell::One,
                    _ => Cell::Star,
                }
            })
            .collect();
        Restriction::new(cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell of variable `i`. Panics when out of range.
    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    /// Indices of starred variables, increasing.
    pub fn starred(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i] == Cell::Star).collect()
    }

    pub fn star_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Star).count()
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            write!(f, "{}", c.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Restriction {
    type Err = Error;

    /// Parses a string over `0`, `1`, `*`, one character per variable.
    fn from_str(s: &str) -> Result<Self> {
        let cells = s
            .trim()
            .char_indices()
            .map(|(offset, ch)| match ch {
                '0' => Ok(Cell::Zero),
                '1' => Ok(Cell::One),
                '*' => Ok(Cell::Star),
                other => Err(Error::Parse {
                    offset,
                    message: format!("unexpected {other:?} in restriction (use 0, 1, *)"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Restriction::new(cells))
    }
}

/// The law of a random p-restriction: star with probability `p`, otherwise
/// 0 or 1 with probability `q = (1 − p)/2` each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionLaw {
    p: Rational,
    star_threshold: u128,
    zero_threshold: u128,
}

impl RestrictionLaw {
    pub fn new(p: Rational) -> Result<Self> {
        if p < Rational::zero() || p > Rational::one() {
            return Err(Error::domain(format!(
                "star probability {} is outside [0, 1]",
                format_rational(&p)
            )));
        }
        let scaled: BigInt = (p.numer() << 64u32) / p.denom();
        let star_threshold = scaled.to_u128().expect("p ≤ 1 keeps the threshold within 2^64");
        let rest = (1u128 << 64) - star_threshold;
        Ok(RestrictionLaw {
            p,
            star_threshold,
            zero_threshold: star_threshold + rest / 2,
        })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> Rational {
        (Rational::one() - &self.p) / Rational::from_integer(2.into())
    }

    /// `floor(p·2⁶⁴)`, as a `u128` so that `p = 1` is representable.
    pub fn star_threshold(&self) -> u128 {
        self.star_threshold
    }

    /// Maps one uniform 64-bit draw to a cell.
    pub fn cell_from_draw(&self, u: u64) -> Cell {
        let u = u as u128;
        if u < self.star_threshold {
            Cell::Star
        } else if u < self.zero_threshold {
            Cell::Zero
        } else {
            Cell::One
        }
    }

    /// Draws a restriction on `n` variables, one `u64` per cell.
    pub fn sample<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Restriction {
        Restriction::new((0..n).map(|_| self.cell_from_draw(rng.next_u64())).collect())
    }

    /// The restriction used as sample `index` under `seed`.
    pub fn sample_indexed(&self, n: usize, seed: u64, index: u64) -> Restriction {
        self.sample(n, &mut sample_rng(seed, index))
    }
}

/// The generator for sample `index`: seeded from `seed`, stream `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Exact probability polynomials of every class of a classifier.
///
/// Each of the `3ⁿ` restrictions with `s` stars contributes `pˢ·qⁿ⁻ˢ`
/// (with `q = (1 − p)/2`) to the polynomial of its class.
pub fn enumerate_exact<C, F>(n: usize, cap: usize, classify: F) -> Result<BTreeMap<C, RationalPoly>>
where
    C: Ord + Clone + Send,
    F: Fn(&Restriction) -> C + Sync,
{
    if n > cap {
        return Err(Error::Resource {
            what: "enumerated variables",
            actual: n,
            cap,
        });
    }
    let total = 3u64.pow(n as u32);
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    // Counts per (class, number of stars); turned into polynomials once.
    let counts: BTreeMap<(C, usize), u64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut local: BTreeMap<(C, usize), u64> = BTreeMap::new();
            let end = ((chunk + 1) * CHUNK).min(total);
            for index in chunk * CHUNK..end {
                let rho = Restriction::from_index(n, index);
                *local.entry((classify(&rho), rho.star_count())).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, count) in b {
                *a.entry(key).or_insert(0) += count;
            }
            a
        });

    let q = RationalPoly::new(vec![crate::rat(1, 2), crate::rat(-1, 2)]);
    let q_powers: Vec<RationalPoly> = std::iter::successors(Some(RationalPoly::one()), |prev| Some(prev * &q))
        .take(n + 1)
        .collect();
    let mut out: BTreeMap<C, RationalPoly> = BTreeMap::new();
    for ((class, stars), count) in counts {
        let term = q_powers[n - stars]
            .shift(stars)
            .scale(&Rational::from_integer(count.into()));
        let entry = out.entry(class).or_insert_with(RationalPoly::zero);
        *entry = &*entry + &term;
    }
    Ok(out)
}

/// `P₀`, `P₁` and `P★` of a tree: the probabilities that the restricted
/// function is constant 0, constant 1, or not constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstancyPolys {
    pub p0: RationalPoly,
    pub p1: RationalPoly,
    pub pstar: RationalPoly,
}

/// Constancy class of `T|_ρ`. Read-once trees are classified by which leaf
/// values stay reachable; other trees by their restricted truth table.
pub fn restricted_constancy(tree: &DecisionTree, rho: &Restriction) -> Result<Constancy> {
    let [zero, one] = tree.reachable_leaf_values_under(rho)?;
    match (zero, one) {
        (true, false) => Ok(Constancy::Const0),
        (false, true) => Ok(Constancy::Const1),
        _ if tree.is_read_once() => Ok(Constancy::NonConstant),
        _ => tree.apply_restriction(rho)?.constancy(),
    }
}

/// [`enumerate_exact`] with the constancy classifier, over variables
/// `0..tree.var_universe()`.
pub fn enumerate_constancy(tree: &DecisionTree, cap: usize) -> Result<ConstancyPolys> {
    let n = tree.var_universe();
    if n > cap {
        return Err(Error::Resource {
            what: "enumerated variables",
            actual: n,
            cap,
        });
    }
    let classes = enumerate_exact(n, cap, |rho| {
        restricted_constancy(tree, rho).expect("restriction covers the tree")
    })?;
    let get = |c: Constancy| classes.get(&c).cloned().unwrap_or_else(RationalPoly::zero);
    Ok(ConstancyPolys {
        p0: get(Constancy::Const0),
        p1: get(Constancy::Const1),
        pstar: get(Constancy::NonConstant),
    })
}

/// What to do with samples whose restricted function has more live variables
/// than the exact depth search accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OvercapPolicy {
    /// Count them as successes (the estimate is biased upward).
    Upper,
    /// Count them as failures (biased downward).
    Lower,
    /// Drop them from the sample count and report how many were dropped.
    #[default]
    Reported,
}

impl FromStr for OvercapPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(OvercapPolicy::Upper),
            "lower" => Ok(OvercapPolicy::Lower),
            "reported" => Ok(OvercapPolicy::Reported),
            other => Err(Error::usage(format!(
                "unknown over-cap policy {other:?} (expected upper, lower or reported)"
            ))),
        }
    }
}

/// Outcome of one sampled restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
    /// The event could not be decided within resource caps.
    Overcap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub live_cap: usize,
    pub policy: OvercapPolicy,
    /// Thread count; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            live_cap: DEFAULT_LIVE_CAP,
            policy: OvercapPolicy::Reported,
            workers: None,
        }
    }
}

fn serialize_rational<S: serde::Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(value))
}

/// Result of a Monte Carlo run.
///
/// `samples` counts the restrictions that entered the estimate, so
/// `phat = successes / samples` always holds. Under
/// [`OvercapPolicy::Reported`] that is `draws − skipped_overcap`; under the
/// other policies every draw counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    #[serde(serialize_with = "serialize_rational")]
    pub p: Rational,
    pub d: usize,
    pub draws: u64,
    pub samples: u64,
    pub successes: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub phat: Rational,
    pub stderr: f64,
    pub skipped_overcap: u64,
    pub seed: u64,
    pub policy: OvercapPolicy,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "t,r,p_num,p_den,d,samples,successes,phat,stderr,skipped,seed";

    pub fn phat_f64(&self) -> f64 {
        crate::to_f64(&self.phat)
    }

    /// One CSV row; `t` and `r` describe the tree the run was made on.
    pub fn csv_row(&self, t: usize, r: usize) -> String {
        format!(
            "{t},{r},{},{},{},{},{},{},{},{},{}",
            self.p.numer(),
            self.p.denom(),
            self.d,
            self.samples,
            self.successes,
            self.phat_f64(),
            self.stderr,
            self.skipped_overcap,
            self.seed
        )
    }

    /// A warning to show the user when some samples were dropped or biased.
    pub fn warning(&self) -> Option<String> {
        (self.skipped_overcap > 0).then(|| {
            format!(
                "{} of {} samples exceeded the live-variable cap ({:?} policy)",
                self.skipped_overcap, self.draws, self.policy
            )
        })
    }

    /// `|phat − target| ≤ k·stderr`.
    pub fn within(&self, target: &Rational, k: f64) -> bool {
        (self.phat_f64() - crate::to_f64(target)).abs() <= k * self.stderr
    }
}

/// Runs `event` on `config.samples` restrictions of `n` variables drawn from
/// `law`, deterministically in the seed and independent of worker count.
pub fn mc_estimate<F>(n: usize, law: &RestrictionLaw, d: usize, config: &McConfig, event: F) -> Result<EstimateReport>
where
    F: Fn(&Restriction) -> Outcome + Sync,
{
    if config.samples == 0 {
        return Err(Error::usage("samples must be at least 1"));
    }
    const CHUNK: u64 = 1 << 12;
    let chunks = config.samples.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut tally = [0u64; 2];
                let end = ((chunk + 1) * CHUNK).min(config.samples);
                for index in chunk * CHUNK..end {
                    let rho = law.sample_indexed(n, config.seed, index);
                    match event(&rho) {
                        Outcome::Success => tally[0] += 1,
                        Outcome::Failure => {}
                        Outcome::Overcap => tally[1] += 1,
                    }
                }
                tally
            })
            .reduce(|| [0, 0], |a, b| [a[0] + b[0], a[1] + b[1]])
    };
    let [raw_successes, overcap] = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::usage(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    let (samples, successes) = match config.policy {
        OvercapPolicy::Upper => (config.samples, raw_successes + overcap),
        OvercapPolicy::Lower => (config.samples, raw_successes),
        OvercapPolicy::Reported => (config.samples - overcap, raw_successes),
    };
    let (phat, stderr) = if samples == 0 {
        (Rational::zero(), f64::NAN)
    } else {
        let phat = Rational::new(successes.into(), samples.into());
        let x = crate::to_f64(&phat);
        (phat, (x * (1.0 - x) / samples as f64).sqrt())
    };
    Ok(EstimateReport {
        p: law.p().clone(),
        d,
        draws: config.samples,
        samples,
        successes,
        phat,
        stderr,
        skipped_overcap: overcap,
        seed: config.seed,
        policy: config.policy,
    })
}

/// Monte Carlo estimate of `Pr[DT_depth(T|ρ) ≥ d]`.
pub fn mc_estimate_depth_ge(
    tree: &DecisionTree,
    law: &RestrictionLaw,
    d: usize,
    config: &McConfig,
) -> Result<EstimateReport> {
    let n = tree.var_universe();
    mc_estimate(n, law, d, config, |rho| {
        if d == 0 {
            return Outcome::Success;
        }
        if d == 1 {
            return match restricted_constancy(tree, rho) {
                Ok(c) if c.is_constant() => Outcome::Failure,
                Ok(_) => Outcome::Success,
                Err(_) => Outcome::Overcap,
            };
        }
        if rho.star_count() < d {
            return Outcome::Failure;
        }
        match tree.restricted_dt_depth(rho, config.live_cap) {
            Ok(depth) if depth >= d => Outcome::Success,
            Ok(_) => Outcome::Failure,
            Err(e) if e.is_resource() => Outcome::Overcap,
            Err(e) => panic!("restricted depth failed on a covering restriction: {e}"),
        }
    })
}

/// Monte Carlo estimate of `Pr[T|ρ is constant 0]` (reported with `d = 0`).
pub fn mc_estimate_constant_zero(
    tree: &DecisionTree,
    law: &RestrictionLaw,
    config: &McConfig,
) -> Result<EstimateReport> {
    mc_estimate(tree.var_universe(), law, 0, config, |rho| {
        match restricted_constancy(tree, rho) {
            Ok(Constancy::Const0) => Outcome::Success,
            Ok(_) => Outcome::Failure,
            Err(_) => Outcome::Overcap,
        }
    })
}

/// Fraction of stars in one long sample; a quick sanity probe for the CLI.
pub fn star_fraction<R: Rng + ?Sized>(law: &RestrictionLaw, n: usize, rng: &mut R) -> f64 {
    law.sample(n, rng).star_count() as f64 / n.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn parse_and_display_round_trip() {
        let rho: Restriction = "01*1".parse().unwrap();
        assert_eq!(rho.to_string(), "01*1");
        assert_eq!(rho.starred(), vec![2]);
        assert!("01x".parse::<Restriction>().is_err());
    }

    #[test]
    fn from_index_covers_every_restriction_once() {
        let all: std::collections::HashSet<String> =
            (0..27).map(|i| Restriction::from_index(3, i).to_string()).collect();
        assert_eq!(all.len(), 27);
    }

    #[test]
    fn law_rejects_out_of_range() {
        assert!(RestrictionLaw::new(rat(3, 2)).is_err());
        assert!(RestrictionLaw::new(rat(-1, 2)).is_err());
    }

    #[test]
    fn sample_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let never = RestrictionLaw::new(rat_int(0)).unwrap();
        assert_eq!(never.sample(1000, &mut rng).star_count(), 0);
        let always = RestrictionLaw::new(rat_int(1)).unwrap();
        assert_eq!(always.sample(1000, &mut rng).star_count(), 1000);
        assert_eq!(always.cell_from_draw(u64::MAX), Cell::Star);
    }

    #[test]
    fn star_fraction_concentrates() {
        let law = RestrictionLaw::new(rat(1, 3)).unwrap();
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = law.sample(n, &mut rng);
        let stars = rho.star_count() as f64;
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        assert!((stars - n as f64 / 3.0).abs() <= 5.0 * sigma);
        let zeros = rho.cells().iter().filter(|&&c| c == Cell::Zero).count() as f64;
        assert!((zeros - n as f64 / 3.0).abs() <= 5.0 * sigma);
    }

    #[test]
    fn enumerate_or1_and_xi_1_2() {
        let q = RationalPoly::new(vec![rat(1, 2), rat(-1, 2)]);
        let dict: DecisionTree = "(x0 L0 L1)".parse().unwrap();
        let polys = enumerate_constancy(&dict, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(polys.p0, q);
        assert_eq!(polys.p1, q);
        assert_eq!(polys.pstar, RationalPoly::new(vec![rat_int(0), rat_int(1)]));

        let xi: DecisionTree = "(x0 L0 (x1 L1 L0))".parse().unwrap();
        let polys = enumerate_constancy(&xi, DEFAULT_ENUMERATION_CAP).unwrap();
        let p = RationalPoly::new(vec![rat_int(0), rat_int(1)]);
        let expected = &(&q + &(&q * &q)) + &(&p * &q);
        assert_eq!(polys.p0, expected);
        let sum = &(&polys.p0 + &polys.p1) + &polys.pstar;
        assert_eq!(sum, RationalPoly::one());
    }

    #[test]
    fn enumeration_respects_cap() {
        let err = enumerate_exact(5, 4, |_| 0u8).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn monte_carlo_trivial_cases() {
        let tree: DecisionTree = "(x0 (x1 L0 L1) L1)".parse().unwrap();
        let law = RestrictionLaw::new(rat(1, 2)).unwrap();
        let config = McConfig::new(2_000, 3);
        let all = mc_estimate_depth_ge(&tree, &law, 0, &config).unwrap();
        assert_eq!(all.phat, rat_int(1));
        let fixed = RestrictionLaw::new(rat_int(0)).unwrap();
        let none = mc_estimate_depth_ge(&tree, &fixed, 1, &config).unwrap();
        assert_eq!(none.successes, 0);
    }

    #[test]
    fn monte_carlo_is_independent_of_worker_count() {
        let tree: DecisionTree = "(x0 (x1 (x2 L0 L1) L1) (x3 L1 (x4 L0 L1)))".parse().unwrap();
        let law = RestrictionLaw::new(rat(1, 3)).unwrap();
        let mut config = McConfig::new(50_000, 11);
        config.workers = Some(1);
        let one = mc_estimate_depth_ge(&tree, &law, 2, &config).unwrap();
        config.workers = Some(4);
        let four = mc_estimate_depth_ge(&tree, &law, 2, &config).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn overcap_policies() {
        // Four starred variables with a cap of 2 are always over the cap.
        let tree: DecisionTree = "(x0 (x1 L0 L1) (x2 L1 (x3 L0 L1)))".parse().unwrap();
        let law = RestrictionLaw::new(rat_int(1)).unwrap();
        let mut config = McConfig::new(100, 5);
        config.live_cap = 2;
        let reported = mc_estimate_depth_ge(&tree, &law, 2, &config).unwrap();
        assert_eq!(reported.skipped_overcap, 100);
        assert_eq!(reported.samples, 0);
        assert!(reported.warning().is_some());
        config.policy = OvercapPolicy::Upper;
        assert_eq!(mc_estimate_depth_ge(&tree, &law, 2, &config).unwrap().successes, 100);
        config.policy = OvercapPolicy::Lower;
        assert_eq!(mc_estimate_depth_ge(&tree, &law, 2, &config).unwrap().successes, 0);
    }

    #[test]
    fn csv_row_matches_header() {
        let tree: DecisionTree = "(x0 L0 L1)".parse().unwrap();
        let law = RestrictionLaw::new(rat(1, 4)).unwrap();
        let report = mc_estimate_depth_ge(&tree, &law, 1, &McConfig::new(100, 9)).unwrap();
        let row = report.csv_row(1, 1);
        assert_eq!(row.split(',').count(), EstimateReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("1,1,1,4,1,100,"));
    }
}
