//! End-to-end simulation of the two betting games.
//!
//! In the basic game two players draw beliefs from the envelope around
//! `p_t`; the higher belief backs the event (buyer), the lower lays it
//! (seller), and odds come from the weighted consensus, optionally shifted
//! by the fair adjustment. Each player then bets or abandons according to a
//! [`StrategyMatrix`], and a bet settles on a Bernoulli(`p_t`) outcome.
//!
//! In the elicitation game player 1 quotes his own belief as the odds and
//! player 2 picks her side afterwards.
//!
//! Trials run in parallel in fixed-size chunks whose results are merged in
//! chunk order, so every output is a pure function of the configuration.

mod estimate;
mod export;
pub mod rng;

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beliefs::{belief_envelope, sample_belief, BeliefEnvelope, Probability};
use crate::error::{Error, Result};
use crate::fairsolver::quick_adjustment;
use crate::posterior::Variant;
use crate::pricing::WeightRule;

pub use estimate::{
    estimate_margin, estimate_payoff, BinSpec, BinnedMargins, MarginAccumulator, MarginEstimate, Measure, NormalizePer,
    Perspective,
};
pub use export::{write_ledger_csv, LedgerWriter, LEDGER_COLUMNS};

/// Trials folded sequentially before results are merged.
pub const CHUNK_TRIALS: u64 = 1 << 15;

/// How the true frequency of each trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum PtMode {
    Fixed {
        p_t: f64,
    },
    /// `p_t ~ U(0, 1)`.
    UniformPrior,
    /// `p_t ~ U(lo, hi)`; the uniform prior restricted to a window.
    UniformWindow {
        lo: f64,
        hi: f64,
    },
}

impl PtMode {
    fn validate(&self) -> Result<()> {
        match *self {
            PtMode::Fixed { p_t } if !(0.0..=1.0).contains(&p_t) => {
                Err(Error::Config(format!("fixed p_t = {p_t} is outside [0, 1]")))
            }
            PtMode::UniformWindow { lo, hi } if !(0.0 <= lo && lo < hi && hi <= 1.0) => {
                Err(Error::Config(format!("p_t window [{lo}, {hi}] is not inside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// A player's decision at quoted odds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Bet,
    Abandon,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Bet => "bet",
            Action::Abandon => "abandon",
        }
    }
}

/// Bet/abandon rule for each role as a function of the decimal odds:
/// the buyer bets iff `odds >= buyer_min_odds`, the seller iff
/// `odds <= seller_max_odds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyMatrix {
    pub buyer_min_odds: f64,
    pub seller_max_odds: f64,
}

impl StrategyMatrix {
    /// Accepts every wager in either role.
    pub const ALWAYS_BET: StrategyMatrix = StrategyMatrix {
        buyer_min_odds: 1.0,
        seller_max_odds: f64::INFINITY,
    };

    pub fn new(buyer_min_odds: f64, seller_max_odds: f64) -> Result<Self> {
        if buyer_min_odds.is_nan() || seller_max_odds.is_nan() {
            return Err(Error::Config("strategy thresholds must not be NaN".into()));
        }
        // some odds in [1, inf) must be acceptable in some role
        if buyer_min_odds == f64::INFINITY && seller_max_odds < 1.0 {
            return Err(Error::Config("strategy never bets at any odds".into()));
        }
        Ok(Self {
            buyer_min_odds,
            seller_max_odds,
        })
    }

    pub fn buyer_action(&self, odds: f64) -> Action {
        if odds >= self.buyer_min_odds {
            Action::Bet
        } else {
            Action::Abandon
        }
    }

    pub fn seller_action(&self, odds: f64) -> Action {
        if odds <= self.seller_max_odds {
            Action::Bet
        } else {
            Action::Abandon
        }
    }

    pub fn name(&self) -> String {
        if *self == Self::ALWAYS_BET {
            "always".into()
        } else if *self == figure5_strategy() {
            "figure5".into()
        } else {
            format!("buyer>={},seller<={}", self.buyer_min_odds, self.seller_max_odds)
        }
    }
}

/// Back only longshots and lay only favourites: the buyer bets iff the odds
/// exceed 2, the seller iff they are below 2. At exactly 2 the wager is
/// fair to both and both bet.
pub fn figure5_strategy() -> StrategyMatrix {
    StrategyMatrix {
        buyer_min_odds: 2.0,
        seller_max_odds: 2.0,
    }
}

/// Whether quotes are shifted to fair odds before the players decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjustmentSource {
    None,
    FairSolver,
}

/// Everything that determines a simulated ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub p_t_mode: PtMode,
    pub epsilon: f64,
    pub weight_rule: WeightRule,
    pub player1: StrategyMatrix,
    pub player2: StrategyMatrix,
    pub adjustment_source: AdjustmentSource,
    pub trials: u64,
    pub master_seed: u64,
}

impl GameConfig {
    /// Basic game at equal weights, both players always betting.
    pub fn new(p_t_mode: PtMode, epsilon: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            p_t_mode,
            epsilon,
            weight_rule: WeightRule::EQUAL,
            player1: StrategyMatrix::ALWAYS_BET,
            player2: StrategyMatrix::ALWAYS_BET,
            adjustment_source: AdjustmentSource::None,
            trials,
            master_seed,
        }
    }

    pub fn with_weight(mut self, rule: WeightRule) -> Self {
        self.weight_rule = rule;
        self
    }

    pub fn with_strategies(mut self, player1: StrategyMatrix, player2: StrategyMatrix) -> Self {
        self.player1 = player1;
        self.player2 = player2;
        self
    }

    pub fn with_adjustment(mut self, source: AdjustmentSource) -> Self {
        self.adjustment_source = source;
        self
    }

    pub fn validate(&self, game: Variant) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon = {} is outside [0, 1]", self.epsilon)));
        }
        self.p_t_mode.validate()?;
        if game == Variant::BasicGame
            && self.adjustment_source == AdjustmentSource::FairSolver
            && self.weight_rule != WeightRule::EQUAL
        {
            return Err(Error::Config(
                "fair adjustment is defined for equal weights (w1 = 0.5) only".into(),
            ));
        }
        Ok(())
    }
}

/// Role of player 1 in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Buyer,
    Seller,
    /// Equal beliefs: nobody backs the event.
    NoTrade,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Buyer => "buyer",
            Role::Seller => "seller",
            Role::NoTrade => "no-trade",
        }
    }
}

/// Settlement from the buyer's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Win,
    Lose,
    NoBet,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Win => "win",
            Outcome::Lose => "lose",
            Outcome::NoBet => "no-bet",
        }
    }
}

/// One simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub trial_id: u64,
    pub p_t: f64,
    /// Buyer's belief; NaN for a party who holds none.
    pub p_b: f64,
    /// Seller's belief; NaN for a party who holds none.
    pub p_s: f64,
    pub role_of_player1: Role,
    /// Consensus before adjustment.
    pub p_c: f64,
    pub m_applied: f64,
    /// `1 / (p_c + m_applied)`.
    pub odds: f64,
    /// `None` when there is no trade.
    pub action_buyer: Option<Action>,
    pub action_seller: Option<Action>,
    pub outcome: Outcome,
    pub payoff_buyer: f64,
    pub payoff_seller: f64,
}

impl GameRecord {
    pub fn settled(&self) -> bool {
        self.outcome != Outcome::NoBet
    }

    pub fn payoff_player1(&self) -> f64 {
        match self.role_of_player1 {
            Role::Buyer => self.payoff_buyer,
            Role::Seller => self.payoff_seller,
            Role::NoTrade => 0.0,
        }
    }

    pub fn payoff_player2(&self) -> f64 {
        match self.role_of_player1 {
            Role::Buyer => self.payoff_seller,
            Role::Seller => self.payoff_buyer,
            Role::NoTrade => 0.0,
        }
    }

    /// Seller's margin given `p_t`, `1 - p_t (odds)`, for a settled bet.
    pub fn expected_seller_payoff(&self) -> f64 {
        if self.settled() {
            1.0 - self.p_t * self.odds
        } else {
            0.0
        }
    }
}

/// A materialised run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLedger {
    pub game: Variant,
    pub config: GameConfig,
    pub records: Vec<GameRecord>,
}

impl GameLedger {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Per-run state shared by all trials.
struct Prepared {
    game: Variant,
    config: GameConfig,
    fixed_env: Option<BeliefEnvelope>,
}

impl Prepared {
    fn new(config: &GameConfig, game: Variant) -> Result<Self> {
        config.validate(game)?;
        let fixed_env = match config.p_t_mode {
            PtMode::Fixed { p_t } => Some(belief_envelope(Probability::new(p_t)?, config.epsilon)?),
            _ => None,
        };
        Ok(Self {
            game,
            config: *config,
            fixed_env,
        })
    }

    fn adjustment(&self, p_c: f64) -> f64 {
        if self.config.adjustment_source == AdjustmentSource::None || !(p_c > 0.0 && p_c < 1.0) {
            return 0.0;
        }
        // p_c lies strictly inside (0, 1) here
        let p = Probability::new(p_c).expect("checked above");
        quick_adjustment(p, self.config.epsilon, self.game).unwrap_or(0.0)
    }

    fn trial(&self, trial_id: u64) -> GameRecord {
        let mut rng = rng::trial_rng(self.config.master_seed, trial_id);
        let env = match self.fixed_env {
            Some(env) => env,
            None => {
                let (lo, hi) = match self.config.p_t_mode {
                    PtMode::UniformWindow { lo, hi } => (lo, hi),
                    _ => (0.0, 1.0),
                };
                let u: f64 = rng.random();
                let p_t = (lo + (hi - lo) * u).clamp(lo, hi);
                belief_envelope(Probability::new(p_t).expect("inside [0, 1]"), self.config.epsilon)
                    .expect("epsilon validated")
            }
        };
        let first = sample_belief(&env, &mut rng).get();
        let second = sample_belief(&env, &mut rng).get();
        let u_outcome: f64 = rng.random();
        let p_t = env.p_t().get();
        match self.game {
            Variant::BasicGame => self.basic_trial(trial_id, p_t, first, second, u_outcome),
            Variant::DeFinetti => self.elicitation_trial(trial_id, p_t, first, u_outcome),
        }
    }

    fn basic_trial(&self, trial_id: u64, p_t: f64, first: f64, second: f64, u: f64) -> GameRecord {
        let role = if first > second {
            Role::Buyer
        } else if first < second {
            Role::Seller
        } else {
            Role::NoTrade
        };
        let (p_b, p_s) = (first.max(second), first.min(second));
        let rule = self.config.weight_rule;
        let p_c = p_b * rule.buyer_weight() + p_s * rule.w1();
        if role == Role::NoTrade || !(p_c > 0.0) {
            return idle(trial_id, p_t, p_b, p_s, Role::NoTrade, p_c);
        }
        let m = self.adjustment(p_c);
        let odds = 1.0 / (p_c + m);
        let (buyer, seller) = match role {
            Role::Buyer => (&self.config.player1, &self.config.player2),
            _ => (&self.config.player2, &self.config.player1),
        };
        let (ab, as_) = (buyer.buyer_action(odds), seller.seller_action(odds));
        settle(trial_id, p_t, p_b, p_s, role, p_c, m, odds, ab, as_, u)
    }

    fn elicitation_trial(&self, trial_id: u64, p_t: f64, quote: f64, u: f64) -> GameRecord {
        if !(quote > 0.0) {
            return idle(trial_id, p_t, f64::NAN, quote, Role::NoTrade, quote);
        }
        let m = self.adjustment(quote);
        let odds = 1.0 / (quote + m);
        // She backs the event at long odds and lays it at short odds.
        let role = if odds >= 2.0 { Role::Seller } else { Role::Buyer };
        let (p_b, p_s) = match role {
            Role::Seller => (f64::NAN, quote),
            _ => (quote, f64::NAN),
        };
        settle(
            trial_id,
            p_t,
            p_b,
            p_s,
            role,
            quote,
            m,
            odds,
            Action::Bet,
            Action::Bet,
            u,
        )
    }
}

fn idle(trial_id: u64, p_t: f64, p_b: f64, p_s: f64, role: Role, p_c: f64) -> GameRecord {
    GameRecord {
        trial_id,
        p_t,
        p_b,
        p_s,
        role_of_player1: role,
        p_c,
        m_applied: 0.0,
        odds: if p_c > 0.0 { 1.0 / p_c } else { f64::INFINITY },
        action_buyer: None,
        action_seller: None,
        outcome: Outcome::NoBet,
        payoff_buyer: 0.0,
        payoff_seller: 0.0,
    }
}

#[allow(clippy::too_many_arguments)]
fn settle(
    trial_id: u64,
    p_t: f64,
    p_b: f64,
    p_s: f64,
    role: Role,
    p_c: f64,
    m: f64,
    odds: f64,
    action_buyer: Action,
    action_seller: Action,
    u: f64,
) -> GameRecord {
    let (outcome, payoff_buyer) = if action_buyer == Action::Bet && action_seller == Action::Bet {
        if u < p_t {
            (Outcome::Win, odds - 1.0)
        } else {
            (Outcome::Lose, -1.0)
        }
    } else {
        (Outcome::NoBet, 0.0)
    };
    GameRecord {
        trial_id,
        p_t,
        p_b,
        p_s,
        role_of_player1: role,
        p_c,
        m_applied: m,
        odds,
        action_buyer: Some(action_buyer),
        action_seller: Some(action_seller),
        outcome,
        payoff_buyer,
        // negation is exact, so every settled pair sums to zero
        payoff_seller: -payoff_buyer,
    }
}

/// Folds every trial of a run into an accumulator without storing records.
///
/// Trials are grouped into chunks of [`CHUNK_TRIALS`]; each chunk is folded
/// in trial order and the chunk results are merged in chunk order, so the
/// result does not depend on the thread count.
pub fn fold_trials<A, I, S, M>(config: &GameConfig, game: Variant, init: I, step: S, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &GameRecord) + Sync,
    M: Fn(&mut A, A),
{
    let prepared = Prepared::new(config, game)?;
    let n = config.trials;
    let chunks = n.div_ceil(CHUNK_TRIALS);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let end = ((c + 1) * CHUNK_TRIALS).min(n);
            for id in c * CHUNK_TRIALS..end {
                step(&mut acc, &prepared.trial(id));
            }
            acc
        })
        .collect();
    let mut total = init();
    for part in parts {
        merge(&mut total, part);
    }
    Ok(total)
}

/// Calls `sink` on every record in trial order, simulating in parallel
/// windows of chunks to bound memory.
pub fn stream_trials<F>(config: &GameConfig, game: Variant, mut sink: F) -> Result<()>
where
    F: FnMut(&GameRecord) -> Result<()>,
{
    let prepared = Prepared::new(config, game)?;
    let n = config.trials;
    let window = CHUNK_TRIALS * 16;
    let mut start = 0;
    while start < n {
        let end = (start + window).min(n);
        let records: Vec<GameRecord> = (start..end).into_par_iter().map(|id| prepared.trial(id)).collect();
        for r in &records {
            sink(r)?;
        }
        start = end;
    }
    Ok(())
}

/// Simulates the basic game and keeps every record.
pub fn simulate(config: &GameConfig) -> Result<GameLedger> {
    simulate_game(config, Variant::BasicGame)
}

/// Simulates the elicitation game: player 1 quotes his own belief
/// (`p_c = p_s`, plus the adjustment if configured) and player 2 then
/// chooses her side. The weight rule and strategies are not used.
pub fn simulate_definetti(config: &GameConfig) -> Result<GameLedger> {
    simulate_game(config, Variant::DeFinetti)
}

fn simulate_game(config: &GameConfig, game: Variant) -> Result<GameLedger> {
    let prepared = Prepared::new(config, game)?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|id| prepared.trial(id))
        .collect();
    Ok(GameLedger {
        game,
        config: *config,
        records,
    })
}

impl fmt::Display for GameConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.p_t_mode {
            PtMode::Fixed { p_t } => format!("p_t = {p_t}"),
            PtMode::UniformPrior => "p_t ~ U(0, 1)".to_string(),
            PtMode::UniformWindow { lo, hi } => format!("p_t ~ U({lo}, {hi})"),
        };
        write!(
            f,
            "{mode}, epsilon = {}, w1 = {}, players = {}/{}, adjustment = {:?}, trials = {}, seed = {}",
            self.epsilon,
            self.weight_rule.w1(),
            self.player1.name(),
            self.player2.name(),
            self.adjustment_source,
            self.trials,
            self.master_seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(p: f64) -> PtMode {
        PtMode::Fixed { p_t: p }
    }

    #[test]
    fn figure5_decisions() {
        let s = figure5_strategy();
        assert_eq!(s.buyer_action(2.5), Action::Bet);
        assert_eq!(s.seller_action(2.5), Action::Abandon);
        assert_eq!(s.buyer_action(1.8), Action::Abandon);
        assert_eq!(s.seller_action(1.8), Action::Bet);
        assert_eq!(s.buyer_action(2.0), Action::Bet);
        assert_eq!(s.seller_action(2.0), Action::Bet);
    }

    #[test]
    fn ledger_is_reproducible_and_zero_sum() {
        let cfg = GameConfig::new(PtMode::UniformPrior, 0.5, 20_000, 11);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a.records.len(), 20_000);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.p_t.to_bits(), y.p_t.to_bits());
            assert_eq!(x.payoff_buyer.to_bits(), y.payoff_buyer.to_bits());
        }
        for (i, r) in a.records.iter().enumerate() {
            assert_eq!(r.trial_id, i as u64);
            assert_eq!(r.payoff_buyer + r.payoff_seller, 0.0);
            if r.settled() {
                assert!(r.p_s < r.p_b);
            }
        }
    }

    #[test]
    fn fold_matches_materialised_ledger() {
        let cfg = GameConfig::new(PtMode::UniformPrior, 0.7, 3 * CHUNK_TRIALS + 17, 5);
        let ledger = simulate(&cfg).unwrap();
        let direct: f64 = ledger.records.iter().map(|r| r.payoff_seller).sum();
        let folded = fold_trials(
            &cfg,
            Variant::BasicGame,
            || 0.0,
            |a, r| *a += r.payoff_seller,
            |a, b| *a += b,
        )
        .unwrap();
        assert!((direct - folded).abs() < 1e-6 * direct.abs().max(1.0));
        let mut streamed = Vec::new();
        stream_trials(&cfg, Variant::BasicGame, |r| {
            streamed.push(r.trial_id);
            Ok(())
        })
        .unwrap();
        assert!(streamed.iter().enumerate().all(|(i, &t)| t == i as u64));
    }

    #[test]
    fn no_noise_means_no_trade_at_fixed_p_t() {
        let cfg = GameConfig::new(fixed(0.5), 0.0, 1000, 1);
        let ledger = simulate(&cfg).unwrap();
        assert!(ledger.records.iter().all(|r| r.role_of_player1 == Role::NoTrade));
    }

    #[test]
    fn elicitation_quotes_player_ones_belief() {
        let cfg = GameConfig::new(PtMode::UniformPrior, 0.5, 5000, 3);
        let ledger = simulate_definetti(&cfg).unwrap();
        for r in &ledger.records {
            let own = if r.role_of_player1 == Role::Seller {
                r.p_s
            } else {
                r.p_b
            };
            assert_eq!(own, r.p_c);
            assert!(r.settled());
            assert!(r.p_b.is_nan() != r.p_s.is_nan());
            // she backs longshots and lays favourites
            assert_eq!(r.role_of_player1 == Role::Seller, r.odds >= 2.0);
        }
    }

    #[test]
    fn configuration_is_validated() {
        assert!(simulate(&GameConfig::new(PtMode::UniformPrior, 1.5, 10, 0)).is_err());
        assert!(simulate(&GameConfig::new(PtMode::UniformPrior, 0.5, 0, 0)).is_err());
        assert!(simulate(&GameConfig::new(fixed(1.2), 0.5, 10, 0)).is_err());
        let bad = GameConfig::new(PtMode::UniformPrior, 0.5, 10, 0)
            .with_weight(WeightRule::new(0.3).unwrap())
            .with_adjustment(AdjustmentSource::FairSolver);
        assert!(matches!(simulate(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn fair_adjustment_is_recorded() {
        let cfg = GameConfig::new(PtMode::UniformPrior, 0.5, 2000, 9).with_adjustment(AdjustmentSource::FairSolver);
        let ledger = simulate(&cfg).unwrap();
        for r in ledger.records.iter().filter(|r| r.settled()) {
            assert!((r.odds * (r.p_c + r.m_applied) - 1.0).abs() < 1e-12);
            // favourites shortened, longshots lengthened... in probability terms:
            if r.p_c < 0.49 {
                assert!(r.m_applied > 0.0);
            } else if r.p_c > 0.51 {
                assert!(r.m_applied < 0.0);
            }
        }
    }
}
