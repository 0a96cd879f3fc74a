//! Sparse iterated prisoner's dilemma: fixed-length matches against
//! memory-one opponents, scored win/draw/loss, and a tabular Q-learner that
//! trains one match per presentation.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_unit, EvalTarget, Learner};
use crate::error::{Error, Result};
use crate::game::UnitSet;
use crate::par::{self, Exec};
use crate::seed::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    C,
    D,
}

impl Action {
    fn bit(self) -> usize {
        match self {
            Action::C => 0,
            Action::D => 1,
        }
    }
}

/// Memory-one state from one player's perspective: `0` at the start of a
/// match, then `1 + 2·own + opp` with C = 0 and D = 1.
pub type State = usize;

pub const STATES: usize = 5;
pub const START: State = 0;

pub fn state_of(own: Action, opp: Action) -> State {
    1 + 2 * own.bit() + opp.bit()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payoffs {
    pub t: f64,
    pub r: f64,
    pub p: f64,
    pub s: f64,
}

impl Default for Payoffs {
    fn default() -> Self {
        Payoffs {
            t: 5.0,
            r: 3.0,
            p: 1.0,
            s: 0.0,
        }
    }
}

impl Payoffs {
    pub fn get(&self, own: Action, opp: Action) -> f64 {
        match (own, opp) {
            (Action::C, Action::C) => self.r,
            (Action::C, Action::D) => self.s,
            (Action::D, Action::C) => self.t,
            (Action::D, Action::D) => self.p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Payoffs { t, r, p, s } = *self;
        if !(t > r && r > p && p > s) || !(2.0 * r > t + s) {
            return Err(Error::InvalidArgument(format!(
                "payoffs must satisfy T > R > P > S and 2R > T + S, got ({t}, {r}, {p}, {s})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Strategy {
    AlwaysCooperate,
    AlwaysDefect,
    TitForTat,
    WinStayLoseSwitch,
    /// Extortionate strategy with factor 2 under (5, 3, 1, 0).
    ZeroDeterminant,
    /// Cooperation probabilities after CC, CD, DC, DD (own move first) and
    /// on the first move.
    MemoryOne {
        name: String,
        after: [f64; 4],
        first: f64,
    },
}

impl Strategy {
    pub const ZOO: [Strategy; 5] = [
        Strategy::AlwaysCooperate,
        Strategy::AlwaysDefect,
        Strategy::TitForTat,
        Strategy::WinStayLoseSwitch,
        Strategy::ZeroDeterminant,
    ];

    pub fn name(&self) -> &str {
        match self {
            Strategy::AlwaysCooperate => "AlwaysCooperate",
            Strategy::AlwaysDefect => "AlwaysDefect",
            Strategy::TitForTat => "TitForTat",
            Strategy::WinStayLoseSwitch => "WinStayLoseSwitch",
            Strategy::ZeroDeterminant => "ZeroDeterminant",
            Strategy::MemoryOne { name, .. } => name,
        }
    }

    /// `(first, [CC, CD, DC, DD])` cooperation probabilities.
    pub fn memory_one(&self) -> (f64, [f64; 4]) {
        match self {
            Strategy::AlwaysCooperate => (1.0, [1.0; 4]),
            Strategy::AlwaysDefect => (0.0, [0.0; 4]),
            Strategy::TitForTat => (1.0, [1.0, 0.0, 1.0, 0.0]),
            // stay after T or R, switch after S or P
            Strategy::WinStayLoseSwitch => (1.0, [1.0, 0.0, 0.0, 1.0]),
            Strategy::ZeroDeterminant => (1.0, [8.0 / 9.0, 0.5, 1.0 / 3.0, 0.0]),
            Strategy::MemoryOne { after, first, .. } => (*first, *after),
        }
    }

    pub fn cooperation_probability(&self, state: State) -> f64 {
        let (first, after) = self.memory_one();
        if state == START {
            first
        } else {
            after[state - 1]
        }
    }

    pub fn is_deterministic(&self) -> bool {
        let (first, after) = self.memory_one();
        std::iter::once(first)
            .chain(after)
            .all(|p| p == 0.0 || p == 1.0)
    }

    /// Next move. Draws from `rng` only when the move is random.
    pub fn step(&self, state: State, rng: &mut Rng) -> Result<Action> {
        if state >= STATES {
            return Err(Error::InvalidArgument(format!(
                "invalid memory-one state {state}"
            )));
        }
        let p = self.cooperation_probability(state);
        Ok(if p >= 1.0 {
            Action::C
        } else if p <= 0.0 || rng.random::<f64>() >= p {
            Action::D
        } else {
            Action::C
        })
    }

    pub fn validate(&self) -> Result<()> {
        let (first, after) = self.memory_one();
        if std::iter::once(first)
            .chain(after)
            .any(|p| !(0.0..=1.0).contains(&p))
        {
            return Err(Error::InvalidArgument(format!(
                "strategy `{}` has a probability outside [0, 1]",
                self.name()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ZOO
            .iter()
            .find(|z| z.name() == s)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: State,
    pub own: Action,
    pub opp: Action,
    pub own_payoff: f64,
    pub opp_payoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    /// `+1`, `0` or `-1` from the first player's side.
    pub reward: f64,
    pub own_total: f64,
    pub opp_total: f64,
    pub trajectory: Vec<Step>,
}

/// Plays `length` rounds of `player` against `opponent`. `player` receives
/// its own-perspective state.
pub fn play_match<P>(
    mut player: P,
    opponent: &Strategy,
    payoffs: &Payoffs,
    length: usize,
    rng: &mut Rng,
) -> MatchOutcome
where
    P: FnMut(State, &mut Rng) -> Action,
{
    let mut trajectory = Vec::with_capacity(length);
    let (mut own_total, mut opp_total) = (0.0, 0.0);
    let (mut mine, mut theirs) = (START, START);
    for _ in 0..length {
        let own = player(mine, rng);
        let opp = opponent.step(theirs, rng).expect("states stay in range");
        let (a, b) = (payoffs.get(own, opp), payoffs.get(opp, own));
        own_total += a;
        opp_total += b;
        trajectory.push(Step {
            state: mine,
            own,
            opp,
            own_payoff: a,
            opp_payoff: b,
        });
        mine = state_of(own, opp);
        theirs = state_of(opp, own);
    }
    let reward = if own_total > opp_total {
        1.0
    } else if own_total < opp_total {
        -1.0
    } else {
        0.0
    };
    MatchOutcome {
        reward,
        own_total,
        opp_total,
        trajectory,
    }
}

pub fn play_strategies(
    a: &Strategy,
    b: &Strategy,
    payoffs: &Payoffs,
    length: usize,
    rng: &mut Rng,
) -> MatchOutcome {
    play_match(
        |s, r| a.step(s, r).expect("states stay in range"),
        b,
        payoffs,
        length,
        rng,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tournament {
    pub names: Vec<String>,
    /// `payoff[i][j]`: mean terminal reward of `i` playing `j`.
    pub payoff: Vec<Vec<f64>>,
    /// Strategies that are best responses to themselves.
    pub pure_nash: Vec<usize>,
}

/// Round robin over every ordered pair, including self-play.
pub fn tournament_nash(
    population: &[Strategy],
    payoffs: &Payoffs,
    length: usize,
    matches: usize,
    seed: u64,
    exec: Exec,
) -> Result<Tournament> {
    if population.is_empty() || matches == 0 || length == 0 {
        return Err(Error::InvalidArgument(
            "tournament needs strategies, matches and rounds".into(),
        ));
    }
    let n = population.len();
    let cells = par::map_range(exec, n * n, |cell| {
        let (i, j) = (cell / n, cell % n);
        let mut rng = seed::rng(seed::derive(seed, &[i as u64, j as u64]));
        let total: f64 = (0..matches)
            .map(|_| {
                play_strategies(&population[i], &population[j], payoffs, length, &mut rng).reward
            })
            .sum();
        total / matches as f64
    });
    let payoff: Vec<Vec<f64>> = cells.chunks(n).map(<[f64]>::to_vec).collect();
    let pure_nash = (0..n)
        .filter(|&i| (0..n).all(|k| payoff[k][i] <= payoff[i][i]))
        .collect();
    Ok(Tournament {
        names: population.iter().map(|s| s.name().to_string()).collect(),
        payoff,
        pure_nash,
    })
}

/// Bootstrap target of the one-step backup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TdTarget {
    /// Value of the action actually taken next (SARSA).
    #[default]
    OnPolicy,
    /// Greedy value of the next state (Q-learning).
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SipdConfig {
    /// Opponent population; each one is a unit.
    pub opponents: Vec<String>,
    pub payoffs: Payoffs,
    pub episode_length: usize,
    pub learning_rate: f64,
    pub discount: f64,
    pub td_target: TdTarget,
    /// Exploration on the first training match.
    pub epsilon: f64,
    /// Multiplicative decay of exploration per training match.
    pub epsilon_decay: f64,
    pub epsilon_min: f64,
    /// Greedy matches per opponent in `evaluate`.
    pub eval_matches: usize,
}

impl Default for SipdConfig {
    fn default() -> Self {
        SipdConfig {
            opponents: Strategy::ZOO.iter().map(|s| s.name().to_string()).collect(),
            payoffs: Payoffs::default(),
            episode_length: 200,
            learning_rate: 0.1,
            discount: 1.0,
            td_target: TdTarget::OnPolicy,
            epsilon: 0.1,
            epsilon_decay: 0.98,
            epsilon_min: 0.001,
            eval_matches: 32,
        }
    }
}

impl SipdConfig {
    pub fn strategies(&self) -> Result<Vec<Strategy>> {
        self.opponents.iter().map(|s| s.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        self.payoffs.validate()?;
        self.strategies()?;
        if self.episode_length == 0 || self.eval_matches == 0 {
            return bad("episode_length and eval_matches must be positive");
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(self.learning_rate) && unit(self.discount) && unit(self.epsilon)) {
            return bad("learning_rate, discount and epsilon must lie in [0, 1]");
        }
        if !(unit(self.epsilon_decay) && unit(self.epsilon_min)) {
            return bad("epsilon_decay and epsilon_min must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Tabular Q-learner over memory-one states. Greedy ties go to C.
#[derive(Debug, Clone)]
pub struct SipdLearner {
    config: SipdConfig,
    units: UnitSet,
    opponents: Vec<Strategy>,
    q: [[f64; 2]; STATES],
    matches: u64,
    rng: Rng,
    eval_seed: u64,
}

impl SipdLearner {
    pub fn new(config: SipdConfig) -> Result<Self> {
        config.validate()?;
        let opponents = config.strategies()?;
        let units = UnitSet::new(opponents.iter().map(|s| s.name().to_string()))?;
        Ok(SipdLearner {
            config,
            units,
            opponents,
            q: [[0.0; 2]; STATES],
            matches: 0,
            rng: seed::rng(0),
            eval_seed: 0,
        })
    }

    pub fn config(&self) -> &SipdConfig {
        &self.config
    }

    pub fn q_values(&self) -> &[[f64; 2]; STATES] {
        &self.q
    }

    pub fn greedy(&self, state: State) -> Action {
        let [c, d] = self.q[state];
        if d > c {
            Action::D
        } else {
            Action::C
        }
    }

    pub fn epsilon(&self) -> f64 {
        let c = &self.config;
        (c.epsilon * c.epsilon_decay.powf(self.matches as f64)).max(c.epsilon_min.min(c.epsilon))
    }

    fn backup(&mut self, outcome: &MatchOutcome) {
        let (lr, gamma) = (self.config.learning_rate, self.config.discount);
        let steps = &outcome.trajectory;
        for t in (0..steps.len()).rev() {
            let step = steps[t];
            let target = match steps.get(t + 1) {
                None => outcome.reward,
                Some(next) => {
                    let [c, d] = self.q[next.state];
                    gamma
                        * match self.config.td_target {
                            TdTarget::OnPolicy => self.q[next.state][next.own.bit()],
                            TdTarget::Max => c.max(d),
                        }
                }
            };
            let q = &mut self.q[step.state][step.own.bit()];
            *q += lr * (target - *q);
        }
    }

    /// Mean terminal reward of greedy play against one opponent.
    pub fn greedy_score(&self, opponent: usize) -> f64 {
        let strategy = &self.opponents[opponent];
        let c = &self.config;
        let mut rng = seed::rng(seed::derive(self.eval_seed, &[opponent as u64]));
        let policy = |s: State, _: &mut Rng| self.greedy(s);
        if strategy.is_deterministic() {
            return play_match(policy, strategy, &c.payoffs, c.episode_length, &mut rng).reward;
        }
        let total: f64 = (0..c.eval_matches)
            .map(|_| play_match(policy, strategy, &c.payoffs, c.episode_length, &mut rng).reward)
            .sum();
        total / c.eval_matches as f64
    }
}

impl Learner for SipdLearner {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn id(&self) -> String {
        "sipd-tabular".to_string()
    }

    fn reset(&mut self, seed: u64) {
        self.q = [[0.0; 2]; STATES];
        self.matches = 0;
        self.rng = seed::rng(seed::derive(seed, &[seed::stream::LEARNER]));
        self.eval_seed = seed::derive(seed, &[seed::stream::EVAL]);
    }

    fn present(&mut self, unit: usize) -> Result<()> {
        check_unit(&self.units, unit)?;
        let eps = self.epsilon();
        let q = self.q;
        let greedy = |s: State| {
            if q[s][1] > q[s][0] {
                Action::D
            } else {
                Action::C
            }
        };
        let policy = |s: State, rng: &mut Rng| {
            if eps > 0.0 && rng.random::<f64>() < eps {
                if rng.random::<bool>() {
                    Action::D
                } else {
                    Action::C
                }
            } else {
                greedy(s)
            }
        };
        let mut rng = self.rng.clone();
        let c = &self.config;
        let outcome = play_match(
            policy,
            &self.opponents[unit],
            &c.payoffs,
            c.episode_length,
            &mut rng,
        );
        self.rng = rng;
        self.backup(&outcome);
        self.matches += 1;
        Ok(())
    }

    /// Mean greedy terminal reward over the opponents in the target.
    fn evaluate(&self, target: &EvalTarget) -> Result<f64> {
        if target.members.is_empty() {
            return Err(Error::InvalidArgument("empty evaluation target".into()));
        }
        let mut total = 0.0;
        for opp in target.members.members() {
            check_unit(&self.units, opp)?;
            total += self.greedy_score(opp);
        }
        Ok(total / target.members.len() as f64)
    }

    fn metric_range(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn granularity(&self) -> &'static str {
        "match"
    }

    fn steps_per_presentation(&self) -> u64 {
        self.config.episode_length as u64
    }
}
