mod output;
mod parse;

use std::io;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use probgems::binom_tail::{bahadur_tail, bracket_tail, left_tail_bracket, TailQuery};
use probgems::concentration::{bernstein_bound, monte_carlo_tail, BernsteinInput, MonteCarloConfig, Summand};
use probgems::gems::beatty::{beatty_pair_check, triple_spectrum_search, wythoff_cold, BeattyNumber};
use probgems::gems::partitions::{partition_exact, partition_value};
use probgems::gems::shuffle::{monge_order, monge_shuffle, perfect_in_shuffle, shuffle_order, Deck};
use probgems::lexis::{dispersion_q, dispersion_report, empirical_q_hat, expected_d, moments_q_hat, CountVector, TrialMatrix};
use probgems::lln_bounds::{
    bernoulli_n_bound, bernoulli_n_two_sided, cantelli_n, chebyshev_n, upper_deviation_probability, LlnQuery,
};
use probgems::numerics::{binom_tail_rational, rational_to_f64, Scalar};
use probgems::ruin::{ruin_b_chain, ruin_bounds_fair, ruin_exact_chain, ruin_root_equation, RuinGame};
use probgems::runs::{
    run_prob_beta, run_prob_beta_exact, run_prob_demoivre, run_prob_demoivre_exact, run_prob_oracle,
    run_prob_oracle_exact, run_prob_recursive, RunSpec,
};
use probgems::{Error, Result};

use output::{big_integer, envelope, render, Format, Outcome};

/// Probability bounds, runs, ruin and number-theory curiosities.
#[derive(Parser, Debug)]
#[command(name = "probgems", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Relative tolerance for iterative methods.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for Monte Carlo runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified bracket for P(S_n > l), or P(S_n < l) with --side left.
    Tail(TailArgs),
    /// P(S_n >= j) by the hypergeometric series.
    Bahadur {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        p: Scalar,
    },
    /// Sample sizes for the weak and strong laws.
    #[command(subcommand)]
    Lln(LlnCommand),
    /// Dispersion of series of trials.
    #[command(subcommand)]
    Lexis(LexisCommand),
    /// Probability of a run of r successes in n trials.
    Runs {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        p: Scalar,
        #[arg(long, value_enum, default_value = "all")]
        method: RunMethod,
    },
    /// Gambler's ruin with unequal stakes.
    #[command(subcommand)]
    Ruin(RuinCommand),
    /// Bernstein's inequality.
    #[command(subcommand)]
    Bernstein(BernsteinCommand),
    /// Perfect and Monge shuffles.
    #[command(subcommand)]
    Shuffle(ShuffleCommand),
    /// Beatty spectra and Wythoff's game.
    #[command(subcommand)]
    Beatty(BeattyCommand),
    /// The partition function.
    #[command(subcommand)]
    Partition(PartitionCommand),
}

#[derive(Args, Debug)]
struct TailArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    l: i64,
    #[arg(long)]
    p: Scalar,
    #[arg(long, value_enum, default_value = "right")]
    side: Side,
    /// Stop after this many coefficients.
    #[arg(long)]
    k_max: Option<u64>,
    /// Also sum the tail in rational arithmetic (p must be rational).
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Right,
    Left,
}

#[derive(Subcommand, Debug)]
enum LlnCommand {
    /// Bernoulli's bound on the number of trials.
    Bernoulli {
        #[arg(long)]
        p: Scalar,
        #[arg(long)]
        eps: Scalar,
        #[arg(long)]
        eta: Scalar,
        /// Bound both deviations.
        #[arg(long)]
        two_sided: bool,
        /// Evaluate the upper deviation probability at the returned N.
        #[arg(long)]
        verify: bool,
    },
    /// Cantelli's strong-law sample size.
    Cantelli {
        #[arg(long)]
        eps: Scalar,
        #[arg(long)]
        eta: Scalar,
        /// Also report the single-time Chebyshev requirement for this p.
        #[arg(long)]
        p: Option<Scalar>,
    },
}

#[derive(Subcommand, Debug)]
enum LexisCommand {
    /// Q against a known p.
    Q {
        /// CSV of success counts, one per series.
        #[arg(long)]
        counts: String,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        p: Scalar,
    },
    /// Q-hat with the estimated p.
    Qhat {
        #[arg(long)]
        counts: String,
        #[arg(long)]
        s: u64,
    },
    /// Mean and variance of Q-hat under a common p.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        p: Scalar,
    },
    /// Expected dispersion D for a matrix of trial probabilities.
    D {
        /// CSV with one row of trial probabilities per series.
        #[arg(long)]
        matrix: String,
        /// Observed counts to score against the matrix.
        #[arg(long)]
        counts: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunMethod {
    Recursive,
    Beta,
    Demoivre,
    Oracle,
    All,
}

#[derive(Args, Debug, Clone)]
struct GameArgs {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
    #[arg(long)]
    alpha: u64,
    #[arg(long)]
    beta: u64,
    #[arg(long)]
    p: Scalar,
}

#[derive(Subcommand, Debug)]
enum RuinCommand {
    /// Bounds on A's ruin probability in a fair game.
    Bounds(GameArgs),
    /// A's and B's ruin probabilities from the absorbing chain.
    Exact(GameArgs),
    /// Roots of p z^(alpha+beta) - z^alpha + q.
    Roots(GameArgs),
}

#[derive(Subcommand, Debug)]
enum BernsteinCommand {
    /// Evaluate the bound.
    Bound {
        /// Variance of the sum.
        #[arg(long)]
        b2: f64,
        /// Moment-growth constant.
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        c: Option<f64>,
        /// Uniform bound on the summands, giving c = M/3.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        t: f64,
    },
    /// Compare the bound with a seeded simulation.
    Check {
        #[arg(long, value_enum, default_value = "uniform")]
        summand: SummandKind,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 16)]
        partitions: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SummandKind {
    Uniform,
    Rademacher,
}

#[derive(Subcommand, Debug)]
enum ShuffleCommand {
    /// Perfect in-shuffles needed to restore a deck.
    Order {
        #[arg(long)]
        deck: u64,
    },
    /// Apply perfect in-shuffles.
    Perfect {
        #[arg(long)]
        deck: usize,
        #[arg(long, default_value_t = 1)]
        times: u64,
    },
    /// Apply Monge shuffles and report their order.
    Monge {
        #[arg(long)]
        deck: usize,
        #[arg(long, default_value_t = 1)]
        times: u64,
    },
}

#[derive(Subcommand, Debug)]
enum BeattyCommand {
    /// Check that alpha and alpha/(alpha-1) split the positive integers.
    Pair {
        #[arg(long, value_parser = parse::beatty_number)]
        alpha: BeattyNumber,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
    },
    /// Find where three spectra fail to split the integers.
    Triple {
        /// Given three times.
        #[arg(long, value_parser = parse::beatty_number, required = true)]
        alpha: Vec<BeattyNumber>,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Cold positions of Wythoff's game.
    Wythoff {
        #[arg(long)]
        count: u64,
    },
}

#[derive(Subcommand, Debug)]
enum PartitionCommand {
    /// p(n) exactly.
    Exact {
        #[arg(long)]
        n: u64,
    },
    /// p(n) against its leading asymptotics.
    Asymptotic {
        #[arg(long)]
        n: u64,
    },
}

/// Largest n for which exact rational routes are taken automatically.
const EXACT_RUNS_LIMIT: u64 = 2000;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let mut outcome = Outcome::default();
    let (code, env) = match run(&cli, &mut outcome) {
        Ok(()) => (ExitCode::SUCCESS, envelope(&name, outcome, None)),
        Err(e) => {
            eprintln!("probgems {name}: {e}");
            let err = json!({ "kind": error_kind(&e), "message": e.to_string() });
            outcome.result = Value::Null;
            (ExitCode::from(1), envelope(&name, outcome, Some(err)))
        }
    };
    if let Err(e) = render(&env, cli.format, &mut io::stdout().lock()) {
        eprintln!("probgems: cannot write output: {e}");
        return ExitCode::from(1);
    }
    code
}

fn command_name(c: &Command) -> String {
    let (head, tail) = match c {
        Command::Tail(_) => ("tail", None),
        Command::Bahadur { .. } => ("bahadur", None),
        Command::Lln(s) => ("lln", Some(match s {
            LlnCommand::Bernoulli { .. } => "bernoulli",
            LlnCommand::Cantelli { .. } => "cantelli",
        })),
        Command::Lexis(s) => ("lexis", Some(match s {
            LexisCommand::Q { .. } => "q",
            LexisCommand::Qhat { .. } => "qhat",
            LexisCommand::Moments { .. } => "moments",
            LexisCommand::D { .. } => "d",
        })),
        Command::Runs { .. } => ("runs", None),
        Command::Ruin(s) => ("ruin", Some(match s {
            RuinCommand::Bounds(_) => "bounds",
            RuinCommand::Exact(_) => "exact",
            RuinCommand::Roots(_) => "roots",
        })),
        Command::Bernstein(s) => ("bernstein", Some(match s {
            BernsteinCommand::Bound { .. } => "bound",
            BernsteinCommand::Check { .. } => "check",
        })),
        Command::Shuffle(s) => ("shuffle", Some(match s {
            ShuffleCommand::Order { .. } => "order",
            ShuffleCommand::Perfect { .. } => "perfect",
            ShuffleCommand::Monge { .. } => "monge",
        })),
        Command::Beatty(s) => ("beatty", Some(match s {
            BeattyCommand::Pair { .. } => "pair",
            BeattyCommand::Triple { .. } => "triple",
            BeattyCommand::Wythoff { .. } => "wythoff",
        })),
        Command::Partition(s) => ("partition", Some(match s {
            PartitionCommand::Exact { .. } => "exact",
            PartitionCommand::Asymptotic { .. } => "asymptotic",
        })),
    };
    match tail {
        Some(t) => format!("{head} {t}"),
        None => head.to_string(),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::MethodInapplicable(_) => "method_inapplicable",
        Error::Precondition(_) => "precondition",
        Error::NotConverged { .. } => "not_converged",
        Error::Degenerate(_) => "degenerate",
        Error::Numeric(_) => "numeric",
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize to JSON")
}

fn scalar(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

fn run(cli: &Cli, out: &mut Outcome) -> Result<()> {
    match &cli.command {
        Command::Tail(args) => tail(args, cli.tol.unwrap_or(1e-10), out),
        Command::Bahadur { n, j, p } => {
            out.input("n", *n).input("j", *j).input("p", scalar(p)).method("hypergeometric-series");
            out.result = json!({ "probability": bahadur_tail(*n, *j, p.to_f64())? });
            Ok(())
        }
        Command::Lln(c) => lln(c, out),
        Command::Lexis(c) => lexis(c, out),
        Command::Runs { n, r, p, method } => runs(*n, *r, p, *method, out),
        Command::Ruin(c) => ruin(c, cli.tol.unwrap_or(1e-12), out),
        Command::Bernstein(c) => bernstein(c, cli.seed, out),
        Command::Shuffle(c) => shuffle(c, out),
        Command::Beatty(c) => beatty(c, out),
        Command::Partition(c) => partition(c, out),
    }
}

fn tail(args: &TailArgs, tol: f64, out: &mut Outcome) -> Result<()> {
    let TailArgs { n, l, ref p, side, k_max, exact } = *args;
    out.input("n", n).input("l", l).input("p", scalar(p)).input("tol", tol);
    out.input("side", if side == Side::Right { "right" } else { "left" });
    if let Some(k) = k_max {
        out.input("k_max", k);
    }
    let pf = p.to_f64();
    let bracket = match side {
        Side::Right => bracket_tail(&TailQuery::new(n, l, pf)?, tol, k_max)?,
        Side::Left => left_tail_bracket(n, l, pf, tol, k_max)?,
    };
    out.method("markov-continued-fraction").method("loader-pmf");
    if !bracket.converged {
        out.warn(format!("relative width target {tol:e} not reached after {} coefficients", bracket.k_used));
    }
    let mut result = to_value(&bracket);
    if exact {
        let r = p
            .as_exact()
            .ok_or_else(|| Error::Domain("--exact needs p given as a rational such as 1/3".into()))?;
        let right = binom_tail_rational(n, l, r);
        let value = match side {
            Side::Right => rational_to_f64(&right),
            // P(S < l) = 1 − P(S > l − 1)
            Side::Left => Scalar::Exact(binom_tail_rational(n, l - 1, r)).complement().to_f64(),
        };
        out.method("rational-summation");
        if !(bracket.lower <= value && value <= bracket.upper) {
            out.warn("rational tail falls outside the bracket");
        }
        result["exact"] = json!(value);
    }
    out.result = result;
    Ok(())
}

fn lln(c: &LlnCommand, out: &mut Outcome) -> Result<()> {
    match c {
        LlnCommand::Bernoulli { p, eps, eta, two_sided, verify } => {
            out.input("p", scalar(p)).input("eps", scalar(eps)).input("eta", scalar(eta));
            out.input("two_sided", *two_sided);
            let q = LlnQuery::new(p.clone(), eps.clone(), eta.clone())?;
            out.method(if p.as_exact().is_some() && eps.as_exact().is_some() && eta.as_exact().is_some() {
                "bernoulli-block-exact"
            } else {
                "bernoulli-block-float"
            });
            let bound = bernoulli_n_bound(&q);
            let mut result = to_value(&bound);
            if *two_sided {
                let t = bernoulli_n_two_sided(&q)?;
                if t.lower.is_none() {
                    out.warn("q + eps exceeds 1, so the lower deviation event is empty");
                }
                result["two_sided"] = to_value(&t);
            }
            if *verify {
                out.method("exact-tail-summation");
                result["upper_deviation_probability"] = json!(upper_deviation_probability(&q, bound.n)?);
            }
            out.result = result;
        }
        LlnCommand::Cantelli { eps, eta, p } => {
            out.input("eps", scalar(eps)).input("eta", scalar(eta));
            out.method("cantelli");
            let (eps, eta) = (eps.to_f64(), eta.to_f64());
            let mut result = json!({ "n": cantelli_n(eps, eta)? });
            if let Some(p) = p {
                out.input("p", scalar(p)).method("chebyshev");
                result["chebyshev_n"] = json!(chebyshev_n(p.to_f64(), eps, eta));
            }
            out.result = result;
        }
    }
    Ok(())
}

fn counts_from(path: &str, s: u64) -> Result<CountVector> {
    let counts: Vec<u64> = parse::csv_rows::<u64>(path)?.into_iter().flatten().collect();
    CountVector::new(counts, s)
}

fn lexis(c: &LexisCommand, out: &mut Outcome) -> Result<()> {
    match c {
        LexisCommand::Q { counts, s, p } => {
            out.input("counts", counts.as_str()).input("s", *s).input("p", scalar(p));
            let cv = counts_from(counts, *s)?;
            out.result = json!({ "q": dispersion_q(&cv, p.to_f64())?, "series": cv.n() });
        }
        LexisCommand::Qhat { counts, s } => {
            out.input("counts", counts.as_str()).input("s", *s);
            let cv = counts_from(counts, *s)?;
            out.result = json!({ "q_hat": empirical_q_hat(&cv)?, "series": cv.n() });
        }
        LexisCommand::Moments { n, s, p } => {
            out.input("n", *n).input("s", *s).input("p", scalar(p));
            out.method("binomial-mixture-sum");
            let m = moments_q_hat(*n, *s, p.to_f64())?;
            if m.bound2.is_none() {
                out.warn("the 2/(n-1) bound is only stated for n >= 5");
            }
            out.result = to_value(&m);
        }
        LexisCommand::D { matrix, counts } => {
            out.input("matrix", matrix.as_str());
            let trials = TrialMatrix::new(parse::csv_rows::<f64>(matrix)?)?;
            match counts {
                Some(path) => {
                    out.input("counts", path.as_str());
                    let cv = counts_from(path, trials.s() as u64)?;
                    out.result = to_value(&dispersion_report(&trials, &cv)?);
                }
                None => out.result = to_value(&expected_d(&trials)?),
            }
        }
    }
    Ok(())
}

fn runs(n: u64, r: u64, p: &Scalar, method: RunMethod, out: &mut Outcome) -> Result<()> {
    out.input("n", n).input("r", r).input("p", scalar(p));
    out.input("method", format!("{method:?}").to_lowercase());
    let spec = RunSpec::new(n, r, p.to_f64())?;
    let exact = p.as_exact().filter(|_| n <= EXACT_RUNS_LIMIT);
    if p.as_exact().is_some() && exact.is_none() {
        out.warn(format!("n exceeds {EXACT_RUNS_LIMIT}; rational p evaluated in floating point"));
    }
    let wanted = |m: RunMethod| method == m || method == RunMethod::All;
    let mut result = serde_json::Map::new();
    if wanted(RunMethod::Recursive) {
        out.method("y-recursion");
        result.insert("recursive".into(), json!(run_prob_recursive(&spec)));
    }
    let mut routes: Vec<(RunMethod, &str, &str)> = vec![
        (RunMethod::Beta, "beta", "beta-sum"),
        (RunMethod::Demoivre, "demoivre", "de-moivre-series"),
        (RunMethod::Oracle, "oracle", "run-length-dp"),
    ];
    routes.retain(|(m, _, _)| wanted(*m));
    for (m, key, id) in routes {
        let value = match (m, exact) {
            (RunMethod::Beta, Some(q)) => rational_to_f64(&run_prob_beta_exact(n, r, q)?),
            (RunMethod::Demoivre, Some(q)) => rational_to_f64(&run_prob_demoivre_exact(n, r, q)?),
            (RunMethod::Oracle, Some(q)) => rational_to_f64(&run_prob_oracle_exact(n, r, q)?),
            (RunMethod::Beta, None) => run_prob_beta(&spec),
            (RunMethod::Demoivre, None) => run_prob_demoivre(&spec),
            _ => run_prob_oracle(&spec),
        };
        out.method(&if exact.is_some() { format!("{id}-exact") } else { id.to_string() });
        result.insert(key.into(), json!(value));
    }
    out.result = Value::Object(result);
    Ok(())
}

fn ruin(c: &RuinCommand, tol: f64, out: &mut Outcome) -> Result<()> {
    let (RuinCommand::Bounds(g) | RuinCommand::Exact(g) | RuinCommand::Roots(g)) = c;
    out.input("a", g.a).input("b", g.b).input("alpha", g.alpha).input("beta", g.beta).input("p", scalar(&g.p));
    let game = RuinGame::new(g.a, g.b, g.alpha, g.beta, g.p.to_f64())?;
    match c {
        RuinCommand::Bounds(_) => {
            out.method("fair-game-bounds");
            out.result = to_value(&ruin_bounds_fair(&game)?);
        }
        RuinCommand::Exact(_) => {
            out.input("tol", tol).method("absorbing-chain");
            let a = ruin_exact_chain(&game, tol)?;
            let b = ruin_b_chain(&game, tol)?;
            if (a + b - 1.0).abs() > 1e-9 {
                out.warn(format!("ruin probabilities sum to {}", a + b));
            }
            out.result = json!({ "ruin_a": a, "ruin_b": b, "drift": game.drift(), "fair": game.is_fair() });
        }
        RuinCommand::Roots(_) => {
            out.method("aberth").method("newton-polish");
            out.result = to_value(&ruin_root_equation(&game)?);
        }
    }
    Ok(())
}

fn bernstein(c: &BernsteinCommand, seed: Option<u64>, out: &mut Outcome) -> Result<()> {
    match c {
        BernsteinCommand::Bound { b2, c, m, t } => {
            out.input("b2", *b2).input("t", *t);
            let input = match (c, m) {
                (_, Some(m)) => {
                    out.input("m", *m);
                    BernsteinInput::bounded(*b2, *m, *t)?
                }
                (Some(c), None) => {
                    out.input("c", *c);
                    BernsteinInput::new(*b2, *c, *t)?
                }
                (None, None) => unreachable!("clap requires c or m"),
            };
            out.method("bernstein");
            out.result = json!({ "bound": bernstein_bound(&input), "c": input.c() });
        }
        BernsteinCommand::Check { summand, m, n, t, samples, partitions } => {
            let Some(seed) = seed else {
                Cli::command()
                    .error(ErrorKind::MissingRequiredArgument, "bernstein check needs --seed")
                    .exit();
            };
            let (kind, s) = match summand {
                SummandKind::Uniform => ("uniform", Summand::Uniform { m: *m }),
                SummandKind::Rademacher => ("rademacher", Summand::Rademacher { m: *m }),
            };
            out.input("summand", kind).input("m", *m).input("n", *n as u64).input("t", *t);
            out.input("samples", *samples).input("partitions", *partitions).input("seed", seed);
            let mut cfg = MonteCarloConfig::new(s, *n, *t, seed);
            cfg.samples = *samples;
            cfg.partitions = *partitions;
            out.method("bernstein").method("chacha8-monte-carlo");
            let r = monte_carlo_tail(&cfg)?;
            if !r.consistent {
                out.warn("simulated tail exceeds the bound by more than three standard errors");
            }
            out.result = to_value(&r);
        }
    }
    Ok(())
}

fn shuffle(c: &ShuffleCommand, out: &mut Outcome) -> Result<()> {
    match c {
        ShuffleCommand::Order { deck } => {
            out.input("deck", *deck).method("order-of-two");
            out.result = json!({ "order": shuffle_order(*deck)? });
        }
        ShuffleCommand::Perfect { deck, times } => {
            out.input("deck", *deck as u64).input("times", *times).method("in-shuffle");
            let mut d = Deck::new(*deck)?;
            for _ in 0..*times {
                d = perfect_in_shuffle(&d);
            }
            out.result = json!({ "order": d.order(), "identity": d.is_identity(), "fixed_points": d.fixed_points() });
        }
        ShuffleCommand::Monge { deck, times } => {
            out.input("deck", *deck as u64).input("times", *times).method("monge-over-under");
            let mut d = Deck::new(*deck)?;
            for _ in 0..*times {
                d = monge_shuffle(&d);
            }
            out.result = json!({
                "order": d.order(),
                "identity": d.is_identity(),
                "fixed_points": d.fixed_points(),
                "monge_order": big_integer(&monge_order(*deck)?.to_string()),
            });
        }
    }
    Ok(())
}

fn describe(a: &BeattyNumber) -> Value {
    match a {
        BeattyNumber::Exact(q) => Value::String(q.to_string()),
        BeattyNumber::Float(x) => json!(x),
    }
}

fn beatty(c: &BeattyCommand, out: &mut Outcome) -> Result<()> {
    match c {
        BeattyCommand::Pair { alpha, horizon } => {
            out.input("alpha", describe(alpha)).input("horizon", *horizon);
            out.method(if matches!(alpha, BeattyNumber::Exact(_)) { "exact-quadratic-floor" } else { "float-floor" });
            let r = beatty_pair_check(alpha, *horizon)?;
            if r.inconclusive {
                out.warn("some floors were within rounding of an integer");
            }
            out.result = to_value(&r);
        }
        BeattyCommand::Triple { alpha, horizon } => {
            let Ok(three) = <[BeattyNumber; 3]>::try_from(alpha.as_slice()) else {
                Cli::command()
                    .error(ErrorKind::WrongNumberOfValues, format!("beatty triple needs --alpha three times, got {}", alpha.len()))
                    .exit();
            };
            out.input("alpha", alpha.iter().map(describe).collect::<Vec<_>>()).input("horizon", *horizon);
            out.method("spectrum-coverage");
            let r = triple_spectrum_search(&three, *horizon)?;
            if r.witness.is_none() {
                out.warn("no witness below the horizon; this is not a proof of a split");
            }
            out.result = to_value(&r);
        }
        BeattyCommand::Wythoff { count } => {
            out.input("count", *count).method("golden-ratio-spectra");
            out.result = json!({ "cold": wythoff_cold(*count) });
        }
    }
    Ok(())
}

fn partition(c: &PartitionCommand, out: &mut Outcome) -> Result<()> {
    match c {
        PartitionCommand::Exact { n } => {
            out.input("n", *n).method("pentagonal-recurrence");
            out.result = json!({ "p": big_integer(&partition_exact(*n as usize).to_string()) });
        }
        PartitionCommand::Asymptotic { n } => {
            out.input("n", *n).method("pentagonal-recurrence").method("uspensky-asymptotic");
            let v = partition_value(*n)?;
            let mut r = to_value(&v);
            r["exact"] = big_integer(&v.exact);
            out.result = r;
        }
    }
    Ok(())
}
