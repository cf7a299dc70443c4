//! The `noisyodds` command line.
//!
//! Exit codes: 0 success, 1 verification findings, 2 invalid input,
//! 3 no root in the search bracket, 4 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::beliefs::Probability;
use crate::error::{Error, Result};
use crate::fairsolver::{solve_adjustment, solve_w1_star, Segment};
use crate::figures::{write_figure, FigureGrid, FIGURE_IDS};
use crate::manifest::RunManifest;
use crate::montecarlo::{
    figure5_strategy, fold_trials, stream_trials, AdjustmentSource, BinSpec, BinnedMargins, GameConfig, LedgerWriter,
    MarginAccumulator, Measure, NormalizePer, Perspective, PtMode, Role, StrategyMatrix,
};
use crate::posterior::{PosteriorDensity, Variant};
use crate::pricing::{conditional_mean_seller_margin, WeightRule};
use crate::verify::{self, Tamper, VerifyOptions};

pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Fair odds for bettors holding noisy probabilities.
#[derive(Debug, Parser)]
#[command(name = "noisyodds", version, about)]
pub struct Cli {
    /// Absolute tolerance for closed-form/oracle agreement.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub abs_tol: f64,
    /// Allowed distance from a target, in standard errors, for simulation checks.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub se_mult: f64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fair adjustment m and fair odds 1/(p_c + m) for an agreed probability.
    FairOdds(FairOddsArgs),
    /// Weight on the seller's belief that makes indiscriminate betting fair.
    W1star(W1StarArgs),
    /// Seller's mean margin over all wagers at a true frequency.
    Margin(MarginArgs),
    /// Density of the true frequency given an agreed probability.
    Posterior(PosteriorArgs),
    /// Simulate the betting game and summarise the ledger.
    Simulate(SimulateArgs),
    /// Write the data series behind a figure.
    Figures(FiguresArgs),
    /// Sweep every closed form against its oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Basic,
    Definetti,
}

impl From<GameArg> for Variant {
    fn from(g: GameArg) -> Self {
        match g {
            GameArg::Basic => Variant::BasicGame,
            GameArg::Definetti => Variant::DeFinetti,
        }
    }
}

#[derive(Debug, Args)]
pub struct FairOddsArgs {
    /// Agreed probability p_c in (0, 1).
    #[arg(long = "pc")]
    pub p_c: f64,
    /// Noise fraction in [0, 1].
    #[arg(long = "eps")]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = GameArg::Basic)]
    pub variant: GameArg,
}

#[derive(Debug, Args)]
pub struct W1StarArgs {
    /// True frequency p_t in (0, 1).
    #[arg(long = "pt")]
    pub p_t: f64,
    #[arg(long = "eps")]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct MarginArgs {
    #[arg(long = "pt")]
    pub p_t: f64,
    #[arg(long = "eps")]
    pub epsilon: f64,
    /// Weight on the seller's belief, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub w1: f64,
    /// Also estimate the margin by simulation with this many trials.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, env = "NOISYODDS_SEED", default_value_t = crate::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[arg(long = "pc")]
    pub p_c: f64,
    #[arg(long = "eps")]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = GameArg::Basic)]
    pub variant: GameArg,
    /// Evaluate the density at this p_t only.
    #[arg(long = "pt")]
    pub p_t: Option<f64>,
    /// Grid points on [0, 1] for the density table.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Write the density table as CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Always,
    Figure5,
}

impl From<StrategyArg> for StrategyMatrix {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Always => StrategyMatrix::ALWAYS_BET,
            StrategyArg::Figure5 => figure5_strategy(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdjustArg {
    None,
    Fair,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// True frequency: a probability, or `uniform` for p_t ~ U(0, 1).
    #[arg(long = "pt", default_value = "uniform")]
    pub p_t: String,
    #[arg(long = "eps")]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w1: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, env = "NOISYODDS_SEED", default_value_t = crate::DEFAULT_SEED)]
    pub seed: u64,
    /// Player 1's strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::Always)]
    pub strategy: StrategyArg,
    /// Player 2's strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::Always)]
    pub counterpart: StrategyArg,
    #[arg(long, value_enum, default_value_t = AdjustArg::None)]
    pub adjust: AdjustArg,
    /// `basic`, or `definetti` for the elicitation game where player 1 quotes.
    #[arg(long, value_enum, default_value_t = GameArg::Basic)]
    pub game: GameArg,
    /// Write the full ledger as CSV (with a JSON sidecar).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Half-width of the p_c bins in the summary.
    #[arg(long, default_value_t = BinSpec::DEFAULT_HALF_WIDTH)]
    pub bin_half_width: f64,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Figure number (1, 2, 3, 4, 6, 7, 8, 9) or `all`.
    #[arg(long)]
    pub id: String,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    /// Interior grid points on (0, 1).
    #[arg(long, default_value_t = 99)]
    pub points: usize,
    /// Comma-separated noise levels overriding the figure's own.
    #[arg(long = "eps", value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated p_c grid.
    #[arg(long = "pc", value_delimiter = ',')]
    pub p_c: Option<Vec<f64>>,
    /// Comma-separated noise grid.
    #[arg(long = "eps", value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    /// Trials per simulation check; 0 skips them.
    #[arg(long, default_value_t = 2_000_000)]
    pub mc_trials: u64,
    #[arg(long, env = "NOISYODDS_SEED", default_value_t = crate::DEFAULT_SEED)]
    pub seed: u64,
    /// Findings CSV (with a JSON sidecar).
    #[arg(long, default_value = "verify_findings.csv")]
    pub out: PathBuf,
    /// Perturb one segment, e.g. `basic:iii`, to check that the sweep catches it.
    #[arg(long)]
    pub tamper: Option<String>,
    /// Size of the perturbation.
    #[arg(long, default_value_t = 1e-3)]
    pub tamper_delta: f64,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let text = e.render().ansi().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoRoot { .. } | Error::NoConvergence { .. } => EXIT_NO_ROOT,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::FairOdds(a) => fair_odds(cli, a, out),
        Command::W1star(a) => w1star(cli, a, out),
        Command::Margin(a) => margin(cli, a, out),
        Command::Posterior(a) => posterior(cli, a, out),
        Command::Simulate(a) => simulate(cli, a, out),
        Command::Figures(a) => figures(cli, a, out),
        Command::Verify(a) => verify(cli, a, out),
    }
}

fn emit(out: &mut dyn Write, value: serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &value)?;
    writeln!(out)?;
    Ok(())
}

fn fair_odds(cli: &Cli, a: &FairOddsArgs, out: &mut dyn Write) -> Result<i32> {
    let p_c = Probability::new(a.p_c)?;
    if !(a.epsilon >= 0.0 && a.epsilon <= 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: a.epsilon,
            expected: "0 <= epsilon <= 1",
        });
    }
    let variant = Variant::from(a.variant);
    // Without noise the unadjusted odds are already fair.
    let (m, segment, method, residual) = if a.epsilon == 0.0 {
        (0.0, "none".to_string(), "noiseless".to_string(), 0.0)
    } else {
        let adj = solve_adjustment(p_c, a.epsilon, variant)?;
        (
            adj.m,
            format!("{}{}", adj.segment, form_suffix(adj.form)),
            adj.method.to_string(),
            adj.residual,
        )
    };
    let q = a.p_c + m;
    if cli.json {
        emit(
            out,
            json!({
                "variant": variant.as_str(), "p_c": a.p_c, "epsilon": a.epsilon, "m": m,
                "fair_probability": q, "fair_odds": 1.0 / q, "segment": segment,
                "method": method, "oracle_residual": residual,
            }),
        )?;
    } else {
        writeln!(out, "variant          {variant}")?;
        writeln!(out, "p_c              {}", a.p_c)?;
        writeln!(out, "epsilon          {}", a.epsilon)?;
        writeln!(out, "m                {m:.12e}")?;
        writeln!(out, "p_c + m          {q:.12}")?;
        writeln!(out, "fair odds        {:.12}", 1.0 / q)?;
        writeln!(out, "naive odds       {:.12}", 1.0 / a.p_c)?;
        writeln!(out, "segment          {segment}")?;
        writeln!(out, "method           {method}")?;
        writeln!(out, "oracle residual  {residual:.3e}")?;
    }
    Ok(0)
}

fn form_suffix(form: crate::fairsolver::Form) -> String {
    match form {
        crate::fairsolver::Form::Tabulated => String::new(),
        f => format!(" ({f})"),
    }
}

fn w1star(cli: &Cli, a: &W1StarArgs, out: &mut dyn Write) -> Result<i32> {
    let w = solve_w1_star(Probability::new(a.p_t)?, a.epsilon)?;
    if cli.json {
        emit(
            out,
            json!({"p_t": a.p_t, "epsilon": a.epsilon, "w1_star": w.w1, "degenerate": w.degenerate, "residual": w.residual}),
        )?;
    } else {
        writeln!(out, "p_t        {}", a.p_t)?;
        writeln!(out, "epsilon    {}", a.epsilon)?;
        writeln!(out, "w1*        {:.12}", w.w1)?;
        writeln!(out, "buyer w    {:.12}", 1.0 - w.w1)?;
        if w.degenerate {
            writeln!(out, "note       no noise: every weight is fair")?;
        }
        writeln!(out, "residual   {:.3e}", w.residual)?;
    }
    Ok(0)
}

fn margin(cli: &Cli, a: &MarginArgs, out: &mut dyn Write) -> Result<i32> {
    let p_t = Probability::new(a.p_t)?;
    let rule = WeightRule::new(a.w1)?;
    let value = if a.epsilon == 0.0 {
        0.0
    } else {
        conditional_mean_seller_margin(p_t, a.epsilon, rule)?
    };
    let mc = match a.trials {
        Some(n) => {
            let cfg = GameConfig::new(PtMode::Fixed { p_t: a.p_t }, a.epsilon, n, a.seed).with_weight(rule);
            let acc = fold_trials(
                &cfg,
                Variant::BasicGame,
                MarginAccumulator::new,
                |acc, r| {
                    if let Some(v) = Perspective::Seller.value(r, Measure::Expected, NormalizePer::Bet) {
                        acc.push(v)
                    }
                },
                |x, y| x.merge(&y),
            )?;
            Some(acc.estimate("settled wagers")?)
        }
        None => None,
    };
    if cli.json {
        emit(
            out,
            json!({"p_t": a.p_t, "epsilon": a.epsilon, "w1": a.w1, "seller_margin": value,
                   "buyer_margin": -value, "simulated": mc}),
        )?;
    } else {
        writeln!(out, "p_t            {}", a.p_t)?;
        writeln!(out, "epsilon        {}", a.epsilon)?;
        writeln!(out, "w1             {}", a.w1)?;
        writeln!(out, "seller margin  {value:.12}")?;
        writeln!(out, "buyer margin   {:.12}", -value)?;
        if let Some(e) = mc {
            let z = e.z_score(value);
            let verdict = if z.abs() <= cli.se_mult { "agrees" } else { "DISAGREES" };
            writeln!(
                out,
                "simulated      {:.6} ± {:.6} (n = {}, z = {z:+.2}, {verdict})",
                e.mean, e.std_error, e.n
            )?;
        }
    }
    Ok(0)
}

fn posterior(cli: &Cli, a: &PosteriorArgs, out: &mut dyn Write) -> Result<i32> {
    let variant = Variant::from(a.variant);
    let d = PosteriorDensity::new(Probability::new(a.p_c)?, a.epsilon, variant)?;
    if let Some(p_t) = a.p_t {
        let v = d.pdf(Probability::new(p_t)?);
        if cli.json {
            emit(
                out,
                json!({"p_c": a.p_c, "epsilon": a.epsilon, "variant": variant.as_str(), "p_t": p_t, "density": v}),
            )?;
        } else {
            writeln!(out, "{v:.12}")?;
        }
        return Ok(0);
    }
    let n = a.points.max(2) - 1;
    let mut table = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        table.push((t, d.pdf(Probability::new(t)?)));
    }
    let write_table = |w: &mut dyn Write| -> Result<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["p_t", "density"])?;
        for (t, v) in &table {
            c.write_record([format!("{t:.16e}"), format!("{v:.16e}")])?;
        }
        c.flush()?;
        Ok(())
    };
    match &a.out {
        Some(path) => {
            write_table(&mut BufWriter::new(File::create(path)?))?;
            RunManifest::new("posterior")
                .param("p_c", a.p_c)
                .param("epsilon", a.epsilon)
                .param("variant", variant.as_str())
                .param("points", a.points)
                .output(path)
                .column("p_t", "true frequency")
                .column("density", "posterior density of p_t")
                .write(&RunManifest::sidecar_path(path))?;
            writeln!(out, "support          [{:.12}, {:.12}]", d.support_lo, d.support_hi)?;
            writeln!(out, "normalizer       {:.12e}", d.normalizer())?;
            writeln!(out, "mean p_t         {:.12}", d.mean())?;
            writeln!(out, "wrote            {}", path.display())?;
        }
        None => write_table(out)?,
    }
    Ok(0)
}

fn parse_pt(s: &str) -> Result<PtMode> {
    if s.eq_ignore_ascii_case("uniform") {
        return Ok(PtMode::UniformPrior);
    }
    let p: f64 = s
        .parse()
        .map_err(|_| Error::Config(format!("--pt expects a probability or `uniform`, got `{s}`")))?;
    Ok(PtMode::Fixed { p_t: p })
}

fn simulate(cli: &Cli, a: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let game = Variant::from(a.game);
    let adjust = match a.adjust {
        AdjustArg::None => AdjustmentSource::None,
        AdjustArg::Fair => AdjustmentSource::FairSolver,
    };
    let cfg = GameConfig::new(parse_pt(&a.p_t)?, a.epsilon, a.trials, a.seed)
        .with_weight(WeightRule::new(a.w1)?)
        .with_strategies(a.strategy.into(), a.counterpart.into())
        .with_adjustment(adjust);
    cfg.validate(game)?;
    let bins = BinSpec::new(0.05, 0.05, 19, a.bin_half_width)?;

    #[derive(Clone)]
    struct Summary {
        seller: MarginAccumulator,
        buyer: MarginAccumulator,
        player1: MarginAccumulator,
        player2: MarginAccumulator,
        settled: u64,
        no_trade: u64,
        bins: BinnedMargins,
    }
    let init = || Summary {
        seller: MarginAccumulator::new(),
        buyer: MarginAccumulator::new(),
        player1: MarginAccumulator::new(),
        player2: MarginAccumulator::new(),
        settled: 0,
        no_trade: 0,
        bins: BinnedMargins::new(bins),
    };
    let step = |s: &mut Summary, r: &crate::montecarlo::GameRecord| {
        if r.role_of_player1 == Role::NoTrade {
            s.no_trade += 1;
        }
        if r.settled() {
            s.settled += 1;
            s.seller.push(r.payoff_seller);
            s.buyer.push(r.payoff_buyer);
            s.bins.push(r.p_c, r.payoff_seller);
        }
        s.player1.push(r.payoff_player1());
        s.player2.push(r.payoff_player2());
    };
    let summary = match &a.out {
        Some(path) => {
            let mut writer = LedgerWriter::new(BufWriter::new(File::create(path)?))?;
            let mut s = init();
            stream_trials(&cfg, game, |r| {
                step(&mut s, r);
                writer.write(r)
            })?;
            writer.finish()?;
            RunManifest::new("simulate")
                .param("game", game.as_str())
                .param("config", cfg)
                .seed(a.seed)
                .output(path)
                .write(&RunManifest::sidecar_path(path))?;
            s
        }
        None => fold_trials(
            &cfg,
            game,
            init,
            |s, r| step(s, r),
            |x, y| {
                x.seller.merge(&y.seller);
                x.buyer.merge(&y.buyer);
                x.player1.merge(&y.player1);
                x.player2.merge(&y.player2);
                x.settled += y.settled;
                x.no_trade += y.no_trade;
                x.bins.merge(&y.bins);
            },
        )?,
    };

    let est = |acc: &MarginAccumulator, what: &str| acc.estimate(what).ok();
    let rows = [
        ("seller, per bet", est(&summary.seller, "seller per settled bet")),
        ("buyer, per bet", est(&summary.buyer, "buyer per settled bet")),
        ("player 1, per trial", est(&summary.player1, "player 1 per trial")),
        ("player 2, per trial", est(&summary.player2, "player 2 per trial")),
    ];
    let binned = summary.bins.estimates();
    if cli.json {
        let bins_json: Vec<_> = binned
            .iter()
            .map(|(c, e)| json!({"p_c": c, "half_width": bins.half_width, "estimate": e}))
            .collect();
        let roles: serde_json::Map<_, _> = rows.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        emit(
            out,
            json!({"game": game.as_str(), "config": cfg, "settled": summary.settled,
                   "no_trade": summary.no_trade, "estimates": roles, "seller_by_p_c": bins_json}),
        )?;
        return Ok(0);
    }
    writeln!(out, "game      {game}")?;
    writeln!(out, "config    {cfg}")?;
    writeln!(
        out,
        "settled   {} of {} trials ({} without a trade)",
        summary.settled, a.trials, summary.no_trade
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:<22}{:>14}{:>14}{:>12}{:>10}",
        "mean payoff", "mean", "std error", "n", "z"
    )?;
    for (label, e) in &rows {
        match e {
            Some(e) => writeln!(
                out,
                "{label:<22}{:>14.6}{:>14.6}{:>12}{:>10.2}",
                e.mean,
                e.std_error,
                e.n,
                e.z_score(0.0)
            )?,
            None => writeln!(out, "{label:<22}{:>14}", "n < 2")?,
        }
    }
    writeln!(out)?;
    writeln!(out, "seller payoff per bet by p_c (half-width {}):", bins.half_width)?;
    writeln!(
        out,
        "{:<10}{:>14}{:>14}{:>12}{:>10}",
        "p_c", "mean", "std error", "n", "z"
    )?;
    for (c, e) in &binned {
        let z = e.z_score(0.0);
        let flag = if z.abs() > cli.se_mult { "  *" } else { "" };
        writeln!(
            out,
            "{c:<10.2}{:>14.6}{:>14.6}{:>12}{:>10.2}{flag}",
            e.mean, e.std_error, e.n, z
        )?;
    }
    writeln!(out, "(* more than {} standard errors from zero)", cli.se_mult)?;
    if let Some(path) = &a.out {
        writeln!(out, "ledger    {}", path.display())?;
    }
    Ok(0)
}

fn figures(_cli: &Cli, a: &FiguresArgs, out: &mut dyn Write) -> Result<i32> {
    let ids: Vec<u8> = if a.id.eq_ignore_ascii_case("all") {
        FIGURE_IDS.to_vec()
    } else {
        let id: u8 =
            a.id.parse()
                .map_err(|_| Error::Config(format!("unknown figure `{}`", a.id)))?;
        vec![id]
    };
    let grid = FigureGrid {
        points: a.points,
        epsilon: a.epsilon.clone(),
    };
    for id in ids {
        for path in write_figure(id, &grid, &a.out)? {
            writeln!(out, "figure {id}: {}", path.display())?;
        }
    }
    Ok(0)
}

fn parse_tamper(s: &str, delta: f64) -> Result<Tamper> {
    let bad = || {
        Error::Config(format!(
            "--tamper expects `basic:<segment>` or `definetti:<segment>`, got `{s}`"
        ))
    };
    let (v, seg) = s.split_once(':').ok_or_else(bad)?;
    let variant: Variant = v.parse()?;
    let segment = Segment::BASIC
        .into_iter()
        .find(|x| x.as_str().eq_ignore_ascii_case(seg))
        .ok_or_else(bad)?;
    Ok(Tamper {
        variant,
        segment,
        delta,
    })
}

fn verify(cli: &Cli, a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mut opts = VerifyOptions {
        abs_tol: cli.abs_tol,
        se_mult: cli.se_mult,
        mc_trials: a.mc_trials,
        seed: a.seed,
        tamper: a
            .tamper
            .as_deref()
            .map(|s| parse_tamper(s, a.tamper_delta))
            .transpose()?,
        ..VerifyOptions::default()
    };
    if let Some(p) = &a.p_c {
        opts.p_c = p.clone();
        opts.extra_points.clear();
    }
    if let Some(e) = &a.epsilon {
        opts.epsilon = e.clone();
        opts.extra_points.clear();
    }
    let report = verify::run(&opts);
    report.write_csv(BufWriter::new(File::create(&a.out)?))?;
    RunManifest::new("verify")
        .param("options", &opts)
        .seed(a.seed)
        .output(&a.out)
        .write(&RunManifest::sidecar_path(&a.out))?;
    for status in [
        verify::Status::Ok,
        verify::Status::Fail,
        verify::Status::Erratum,
        verify::Status::DocumentedDiscrepancy,
    ] {
        writeln!(out, "{:<24}{}", status.as_str(), report.count(status))?;
    }
    for f in report.failures() {
        writeln!(
            out,
            "FAIL {} {} p_c={} eps={} segment={} closed={:.9e} oracle={:.9e}",
            f.quantity, f.variant, f.p_c, f.epsilon, f.segment_id, f.closed_form, f.oracle
        )?;
    }
    writeln!(out, "findings                {}", a.out.display())?;
    Ok(if report.passed() { 0 } else { EXIT_FINDINGS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("noisyodds").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn fair_odds_at_chance() {
        let (code, out, _) = call(&["--json", "fair-odds", "--pc", "0.5", "--eps", "0.5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["m"].as_f64().unwrap(), 0.0);
        assert_eq!(v["fair_odds"].as_f64().unwrap(), 2.0);
    }

    #[test]
    fn validation_and_usage_errors_exit_2() {
        assert_eq!(call(&["fair-odds", "--pc", "1.5", "--eps", "0.5"]).0, EXIT_INVALID);
        assert_eq!(call(&["fair-odds", "--pc", "0.5"]).0, EXIT_INVALID);
        assert_eq!(call(&["fair-odds", "--bogus"]).0, EXIT_INVALID);
        assert_eq!(call(&["figures", "--id", "5"]).0, EXIT_INVALID);
    }

    #[test]
    fn help_lists_flags() {
        let (code, out, _) = call(&["simulate", "--help"]);
        assert_eq!(code, 0);
        for flag in ["--seed", "--trials", "--strategy", "--adjust", "--abs-tol", "--se-mult"] {
            assert!(out.contains(flag), "{flag}");
        }
    }

    #[test]
    fn tamper_spec_parses() {
        let t = parse_tamper("basic:iii", 1e-3).unwrap();
        assert_eq!((t.variant, t.segment), (Variant::BasicGame, Segment::III));
        assert!(parse_tamper("basic", 1e-3).is_err());
    }
}
