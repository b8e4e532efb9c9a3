mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cliptree_core::bounds::{
    d1_check, empirical_bound_check, g2_check, gamma_lower_table, lower_bound_value, u_kernel, u_kernel_grid,
    upper_bound_value, BoundConstants, G2Method,
};
use cliptree_core::polyrec::{coeff_recurrence, eval_at, identity_suite, p0_p1, p_star};
use cliptree_core::restrict::{mc_estimate_depth_ge, McConfig, DEFAULT_LIVE_CAP};
use cliptree_core::spectral::{compare_fourier, format_set, fourier_general_closed, fourier_t1_closed, FourierClosed};
use cliptree_core::tribes::build_xor_tribe;
use cliptree_core::verify::{run_all, VerifyOptions, DEFAULT_SEED};
use cliptree_core::{
    format_rational, parse_rational, to_f64, DecisionTree, OvercapPolicy, Rational, RationalPoly, Restriction,
    RestrictionLaw,
};

use output::Output;

/// Exit code for a check that ran and failed.
const EXIT_FAILED: u8 = 1;
/// Exit code for bad arguments or malformed input.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cliptree",
    version,
    about = "Clipped decision trees, xor tree tribes and switching-lemma checks"
)]
struct Cli {
    /// Write results here instead of standard output. Relative paths are
    /// resolved against $CLIPTREE_OUT_DIR when it is set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and describe xor tree tribes.
    #[command(subcommand)]
    Tribe(TribeCmd),
    /// Inspect decision trees given in text form.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// P0/P1/P* polynomials and their coefficient lemmas.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Closed-form and brute-force Fourier coefficients.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Mc(McCmd),
    /// Bound values and bound checks.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Acceptance checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args, Clone, Copy)]
struct TribeArgs {
    #[arg(long)]
    t: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Subcommand)]
enum TribeCmd {
    /// Serialized tree plus n and level counts, as JSON.
    Build(TribeArgs),
    /// Metadata only: n, level counts, depth, clipping and bias.
    Info(TribeArgs),
}

#[derive(Args)]
struct TreeInput {
    /// Tree text, or `@path` to read it from a file (`@-` for stdin).
    tree: String,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Parse and validate a tree; exits 1 when it is not a valid tree.
    Validate(TreeInput),
    /// Clipping statistics.
    Clip {
        #[command(flatten)]
        input: TreeInput,
        /// Also report whether the tree is t-clipped.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Apply a restriction given as a string over `0`, `1` and `*`.
    Restrict {
        #[command(flatten)]
        input: TreeInput,
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = DEFAULT_LIVE_CAP)]
        live_cap: usize,
    },
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Coefficients of P0(r) and P1(r).
    P0p1(TribeArgs),
    /// [1] and [p] coefficients of P0 and P1 for every level up to r.
    Coeffs(TribeArgs),
    /// P*(r), or its exact value at --p.
    Pstar {
        #[command(flatten)]
        tribe: TribeArgs,
        #[arg(long)]
        p: Option<String>,
    },
    /// The elementary identities used by the coefficient bounds.
    Identities,
}

#[derive(Args)]
struct SetArgs {
    #[command(flatten)]
    tribe: TribeArgs,
    /// Comma-separated variable ids, e.g. `0,3`.
    #[arg(long)]
    set: String,
}

#[derive(Subcommand)]
enum FourierCmd {
    /// Closed-form coefficient of one set.
    Closed(SetArgs),
    /// Coefficient of one set from the transform of the truth table.
    Bruteforce(SetArgs),
    /// CSV comparison over all sets up to a size.
    Compare {
        #[command(flatten)]
        tribe: TribeArgs,
        #[arg(long, default_value_t = 4)]
        max_set_size: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    t: usize,
    /// Levels of the tribe. Ignored with --tree.
    #[arg(long)]
    r: Option<usize>,
    /// Use this tree (text or @path) instead of a tribe.
    #[arg(long)]
    tree: Option<String>,
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "reported", value_parser = parse_policy)]
    policy: OvercapPolicy,
    #[arg(long, default_value_t = DEFAULT_LIVE_CAP)]
    live_cap: usize,
}

#[derive(Subcommand)]
enum McCmd {
    /// Estimate Pr[DT_depth(T|rho) >= d].
    Estimate {
        #[command(flatten)]
        args: McArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    t: usize,
    #[arg(long)]
    p: String,
    #[arg(long)]
    d: usize,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Monte Carlo verdict against the upper bound (and the lower-bound table for tribes).
    Check {
        #[command(flatten)]
        args: McArgs,
    },
    /// (4p2^t)^d.
    Upper(PointArgs),
    /// (c0 p 2^t)^d with its domain verdict.
    Lower {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        r: usize,
        /// Depth-ceiling constant; the default is an engineering choice.
        #[arg(long)]
        c_d: Option<String>,
    },
    /// U(p) at one point, or its maximum over the 64-point grid.
    UKernel {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value = "4")]
        kappa: String,
    },
    /// Certified G2 estimate of P0(r) + P1(r) against 30*4^t.
    G2(TribeArgs),
    /// Exact d = 1 sandwich of P*(r)(p).
    D1 {
        #[command(flatten)]
        tribe: TribeArgs,
        #[arg(long)]
        p: String,
    },
    /// The certified lower-bound table L[d][r] as CSV.
    GammaTable {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 2)]
        d_max: usize,
        #[arg(long, default_value_t = 32)]
        r_max: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every acceptance criterion.
    All {
        /// Smaller sample counts and sweeps.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_policy(s: &str) -> Result<OvercapPolicy, String> {
    s.parse().map_err(|e: cliptree_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    use cliptree_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Usage(_) | E::Parse { .. } | E::Domain(_)) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

/// Runs one command. `Ok(false)` means the command ran but a check failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut out = Output::open(cli.output.as_deref())?;
    let passed = match cli.command {
        Command::Tribe(cmd) => tribe(cmd, &mut out)?,
        Command::Tree(cmd) => tree(cmd, &mut out)?,
        Command::Poly(cmd) => poly(cmd, &mut out)?,
        Command::Fourier(cmd) => fourier(cmd, &mut out)?,
        Command::Mc(McCmd::Estimate { args, format }) => mc_estimate(&args, format, &mut out)?,
        Command::Bounds(cmd) => bounds(cmd, &mut out)?,
        Command::Verify(VerifyCmd::All { quick, seed, workers }) => {
            let options = VerifyOptions { quick, seed, workers };
            let results = run_all(&options, |r| {
                // Progress goes to stderr when results go to a file.
                if !out.is_stdout() {
                    eprintln!("{r}");
                }
            });
            for r in &results {
                out.line(&r.to_string())?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            out.line(&format!("{} passed, {failed} failed", results.len() - failed))?;
            failed == 0
        }
    };
    out.finish()?;
    Ok(passed)
}

fn rational(text: &str) -> anyhow::Result<Rational> {
    parse_rational(text).with_context(|| format!("bad rational {text:?} (use num/den)"))
}

fn poly_json(poly: &RationalPoly) -> Value {
    json!(poly.coeff_strings())
}

fn read_tree(input: &TreeInput) -> anyhow::Result<String> {
    match input.tree.strip_prefix('@') {
        Some("-") => std::io::read_to_string(std::io::stdin()).context("reading tree from stdin"),
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(input.tree.clone()),
    }
}

fn tribe(cmd: TribeCmd, out: &mut Output) -> anyhow::Result<bool> {
    let (args, with_tree) = match cmd {
        TribeCmd::Build(a) => (a, true),
        TribeCmd::Info(a) => (a, false),
    };
    let tribe = build_xor_tribe(args.t, args.r)?;
    let clip = tribe.tree.clip_report();
    let mut value = json!({
        "t": args.t,
        "r": args.r,
        "n": tribe.num_vars(),
        "levels": tribe.level_counts(),
        "depth": tribe.tree.depth(),
        "t_clip": clip.t_clip,
    });
    if with_tree {
        value["tree"] = json!(tribe.tree.to_string());
    } else if args.r > 0 {
        value["bias"] = json!(format_rational(&cliptree_core::spectral::bias_closed(args.t, args.r)?));
    }
    out.json(&value)?;
    Ok(true)
}

fn tree(cmd: TreeCmd, out: &mut Output) -> anyhow::Result<bool> {
    match cmd {
        TreeCmd::Validate(input) => {
            let text = read_tree(&input)?;
            match text.parse::<DecisionTree>() {
                Ok(tree) => {
                    out.json(&json!({
                        "valid": true,
                        "read_once": tree.is_read_once(),
                        "variables": tree.var_count(),
                        "depth": tree.depth(),
                    }))?;
                    Ok(true)
                }
                Err(e) => {
                    out.json(&json!({ "valid": false, "error": e.to_string() }))?;
                    Ok(false)
                }
            }
        }
        TreeCmd::Clip { input, t } => {
            let tree: DecisionTree = read_tree(&input)?.parse()?;
            let clip = tree.clip_report();
            let mut value = json!({ "t_clip": clip.t_clip, "t0_clip": clip.t0_clip });
            if let Some(t) = t {
                value["clipped"] = json!(clip.is_clipped(t));
            }
            out.json(&value)?;
            Ok(true)
        }
        TreeCmd::Restrict { input, rho, live_cap } => {
            let tree: DecisionTree = read_tree(&input)?.parse()?;
            let rho: Restriction = rho.parse()?;
            let restricted = tree.apply_restriction(&rho)?;
            out.json(&json!({
                "tree": restricted.to_string(),
                "dt_depth": tree.restricted_dt_depth(&rho, live_cap)?,
                "stars": rho.star_count(),
            }))?;
            Ok(true)
        }
    }
}

fn poly(cmd: PolyCmd, out: &mut Output) -> anyhow::Result<bool> {
    match cmd {
        PolyCmd::P0p1(a) => {
            let (p0, p1) = p0_p1(a.t, a.r)?;
            out.json(&json!({ "t": a.t, "r": a.r, "p0": poly_json(&p0), "p1": poly_json(&p1) }))?;
            Ok(true)
        }
        PolyCmd::Coeffs(a) => {
            let rows: Vec<Value> = coeff_recurrence(a.t, a.r)?
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    json!({
                        "r": i + 1,
                        "const_p0": format_rational(&c.c0_p0),
                        "const_p1": format_rational(&c.c0_p1),
                        "lin_p0": format_rational(&c.c1_p0),
                        "lin_p1": format_rational(&c.c1_p1),
                    })
                })
                .collect();
            out.json(&json!({ "t": a.t, "levels": rows }))?;
            Ok(true)
        }
        PolyCmd::Pstar { tribe: a, p: None } => {
            out.json(&json!({ "t": a.t, "r": a.r, "pstar": poly_json(&p_star(a.t, a.r)?) }))?;
            Ok(true)
        }
        PolyCmd::Pstar { tribe: a, p: Some(p) } => {
            let p = rational(&p)?;
            let values = eval_at(a.t, a.r, &p)?;
            out.json(&json!({
                "t": a.t,
                "r": a.r,
                "p": format_rational(&p),
                "pstar": format_rational(&values.pstar.to_rational()),
                "approx": values.pstar.to_f64(),
            }))?;
            Ok(true)
        }
        PolyCmd::Identities => {
            let checks = identity_suite();
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            out.json(&json!(rows))?;
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn parse_set(text: &str) -> anyhow::Result<u64> {
    let mut set = 0u64;
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i: u32 = part
            .trim_start_matches('x')
            .parse()
            .with_context(|| format!("bad variable id {part:?}"))?;
        if i >= 64 {
            bail!(cliptree_core::Error::Usage(format!("variable id {i} is too large")));
        }
        set |= 1 << i;
    }
    if set == 0 {
        bail!(cliptree_core::Error::Usage("the set must be nonempty".into()));
    }
    Ok(set)
}

fn fourier(cmd: FourierCmd, out: &mut Output) -> anyhow::Result<bool> {
    match cmd {
        FourierCmd::Closed(SetArgs { tribe: a, set }) => {
            let set = parse_set(&set)?;
            let value = if a.t == 1 {
                json!({ "signed": format_rational(&fourier_t1_closed(a.r, set)?) })
            } else {
                let tribe = build_xor_tribe(a.t, a.r)?;
                match fourier_general_closed(&tribe, set)? {
                    FourierClosed::Zero => json!({ "magnitude": "0/1", "on_path": false }),
                    FourierClosed::Magnitude(m) => json!({ "magnitude": format_rational(&m), "on_path": true }),
                }
            };
            out.json(&json!({ "t": a.t, "r": a.r, "set": format_set(set), "closed": value }))?;
            Ok(true)
        }
        FourierCmd::Bruteforce(SetArgs { tribe: a, set }) => {
            let set = parse_set(&set)?;
            let tribe = build_xor_tribe(a.t, a.r)?;
            if set >> tribe.num_vars() != 0 {
                bail!(cliptree_core::Error::Usage(format!(
                    "{} is not a set of Ξ variables",
                    format_set(set)
                )));
            }
            let spectrum = tribe.tree.to_truth_table_natural()?.fourier_transform();
            let value = spectrum.coefficient(set as usize);
            out.json(&json!({ "t": a.t, "r": a.r, "set": format_set(set), "bruteforce": format_rational(&value) }))?;
            Ok(true)
        }
        FourierCmd::Compare { tribe: a, max_set_size } => {
            let rows = compare_fourier(a.t, a.r, max_set_size)?;
            let mut w = out.csv();
            w.write_record(["set", "closed", "bruteforce", "match"])?;
            for row in &rows {
                w.write_record([
                    format_set(row.set),
                    format_rational(&row.closed),
                    format_rational(&row.bruteforce),
                    row.matches.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(rows.iter().all(|r| r.matches))
        }
    }
}

/// The tree to sample and the `(t, r)` labels for the CSV row. `r` is 0
/// for a user-supplied tree.
fn mc_target(args: &McArgs) -> anyhow::Result<(DecisionTree, Option<usize>)> {
    match (&args.tree, args.r) {
        (Some(text), _) => {
            let text = read_tree(&TreeInput { tree: text.clone() })?;
            let tree: DecisionTree = text.parse()?;
            let clip = tree.clip_report();
            if !clip.is_clipped(args.t) {
                eprintln!(
                    "warning: the tree is only {}-clipped, not {}-clipped",
                    clip.t_clip, args.t
                );
            }
            Ok((tree, None))
        }
        (None, Some(r)) => Ok((build_xor_tribe(args.t, r)?.tree, Some(r))),
        (None, None) => bail!(cliptree_core::Error::Usage("give --r for a tribe or --tree".into())),
    }
}

fn mc_config(args: &McArgs) -> McConfig {
    let mut config = McConfig::new(args.samples, args.seed);
    config.workers = args.workers;
    config.policy = args.policy;
    config.live_cap = args.live_cap;
    config
}

fn mc_estimate(args: &McArgs, format: Format, out: &mut Output) -> anyhow::Result<bool> {
    let p = rational(&args.p)?;
    let (tree, r) = mc_target(args)?;
    let report = mc_estimate_depth_ge(&tree, &RestrictionLaw::new(p)?, args.d, &mc_config(args))?;
    if let Some(w) = report.warning() {
        eprintln!("warning: {w}");
    }
    match format {
        Format::Csv => {
            out.line(cliptree_core::EstimateReport::CSV_HEADER)?;
            out.line(&report.csv_row(args.t, r.unwrap_or(0)))?;
        }
        Format::Json => {
            let mut value = serde_json::to_value(&report)?;
            value["t"] = json!(args.t);
            value["r"] = json!(r);
            out.json(&value)?;
        }
    }
    Ok(true)
}

fn bounds(cmd: BoundsCmd, out: &mut Output) -> anyhow::Result<bool> {
    let constants = BoundConstants::default();
    match cmd {
        BoundsCmd::Check { args } => {
            let p = rational(&args.p)?;
            let (tree, r) = mc_target(&args)?;
            let report = empirical_bound_check(&tree, args.t, r, &p, args.d, &mc_config(&args), &constants)?;
            let passed = report.passed();
            let mut value = serde_json::to_value(&report)?;
            value["passed"] = json!(passed);
            out.json(&value)?;
            Ok(passed)
        }
        BoundsCmd::Upper(a) => {
            let p = rational(&a.p)?;
            let v = upper_bound_value(&p, a.t, a.d)?;
            out.json(&json!({ "upper": format_rational(&v), "approx": to_f64(&v) }))?;
            Ok(true)
        }
        BoundsCmd::Lower { point: a, r, c_d } => {
            let p = rational(&a.p)?;
            let mut constants = constants;
            if let Some(c) = c_d {
                constants.c_d = rational(&c)?;
            }
            let lb = lower_bound_value(&p, a.t, a.d, r, &constants)?;
            out.json(&json!({
                "lower": format_rational(&lb.value),
                "approx": to_f64(&lb.value),
                "in_domain": lb.in_domain,
                "violations": lb.violations,
            }))?;
            Ok(true)
        }
        BoundsCmd::UKernel { t, p, kappa } => {
            let kappa = rational(&kappa)?;
            match p {
                Some(p) => {
                    let p = rational(&p)?;
                    let u = u_kernel(&p, t, &kappa)?;
                    out.json(&json!({ "u": format_rational(&u), "approx": to_f64(&u), "at_most_one": u <= Rational::from_integer(1.into()) }))?;
                    Ok(true)
                }
                None => {
                    let mut worst: Option<(Rational, Rational)> = None;
                    for p in u_kernel_grid() {
                        let u = u_kernel(&p, t, &kappa)?;
                        if worst.as_ref().is_none_or(|(_, w)| &u > w) {
                            worst = Some((p, u));
                        }
                    }
                    let (p, u) = worst.expect("the grid is nonempty");
                    let ok = u <= Rational::from_integer(1.into());
                    out.json(&json!({ "t": t, "argmax": format_rational(&p), "max": to_f64(&u), "at_most_one": ok }))?;
                    Ok(ok)
                }
            }
        }
        BoundsCmd::G2(a) => {
            let report = g2_check(a.t, a.r, &constants)?;
            let method = match &report.method {
                G2Method::Full => json!({ "kind": "full" }),
                G2Method::Truncated { k, remainder } => {
                    json!({ "kind": "truncated", "k": k, "remainder": to_f64(remainder) })
                }
            };
            out.json(&json!({
                "t": a.t,
                "r": a.r,
                "p_max": format_rational(&report.p_max),
                "gmax": to_f64(&report.gmax),
                "bound": to_f64(&report.bound),
                "method": method,
                "passed": report.passed,
            }))?;
            Ok(report.passed)
        }
        BoundsCmd::D1 { tribe: a, p } => {
            let p = rational(&p)?;
            let report = d1_check(a.t, a.r, &p, &constants)?;
            out.json(&json!({
                "t": a.t,
                "r": a.r,
                "p": format_rational(&p),
                "pstar": report.pstar,
                "lower": format_rational(&report.lower),
                "upper": format_rational(&report.upper),
                "lower_ok": report.lower_ok,
                "upper_ok": report.upper_ok,
                "in_domain": report.in_domain,
            }))?;
            Ok(report.sandwiched())
        }
        BoundsCmd::GammaTable { t, p, d_max, r_max } => {
            let p = rational(&p)?;
            let table = gamma_lower_table(t, &p, d_max, r_max)?;
            let mut w = out.csv();
            w.write_record(["d", "r", "lower_approx", "theorem_lower_approx", "in_domain"])?;
            for d in 0..=d_max {
                for r in 0..=r_max {
                    let theorem = lower_bound_value(&p, t, d, r, &constants)?;
                    w.write_record([
                        d.to_string(),
                        r.to_string(),
                        format!("{:e}", to_f64(table.get(d, r))),
                        format!("{:e}", to_f64(&theorem.value)),
                        theorem.in_domain.to_string(),
                    ])?;
                }
            }
            w.flush()?;
            Ok(true)
        }
    }
}
