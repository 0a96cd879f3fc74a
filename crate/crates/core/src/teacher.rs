//! Teachers and the teacher-student training loop.
//!
//! A teacher emits a distribution over units, the loop draws a unit, presents
//! it to the learner and rewards the teacher with the change in the
//! learner's metric on the evaluation target.

use std::collections::{BTreeMap, VecDeque};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::curriculum::{Schedule, StochasticPolicy};
use crate::error::{Error, Result};
use crate::game::UnitSet;
use crate::learners::{EvalTarget, Learner};
use crate::seed::{self, Rng};

/// Softmax of `values / temperature`, shifted by the maximum first.
pub fn boltzmann_policy(values: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value {bad}")));
    }
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = values
        .iter()
        .map(|v| ((v - top) / temperature).exp())
        .collect();
    let total: f64 = exp.iter().sum();
    Ok(exp.into_iter().map(|e| e / total).collect())
}

/// Running mean of the rewards received per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalValues {
    pub q: Vec<f64>,
    pub counts: Vec<u64>,
}

impl EmpiricalValues {
    pub fn new(n: usize) -> Self {
        EmpiricalValues {
            q: vec![0.0; n],
            counts: vec![0; n],
        }
    }

    pub fn update(&mut self, unit: usize, reward: f64) -> Result<()> {
        if unit >= self.q.len() {
            return Err(Error::UnitIndex {
                index: unit,
                size: self.q.len(),
            });
        }
        self.counts[unit] += 1;
        self.q[unit] += (reward - self.q[unit]) / self.counts[unit] as f64;
        Ok(())
    }
}

/// Maps raw rewards to `[0, 1]` by the min and max of a sliding window.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardRescaler {
    window: usize,
    recent: VecDeque<f64>,
}

impl RewardRescaler {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidArgument(
                "rescaler window must be positive".into(),
            ));
        }
        Ok(RewardRescaler {
            window,
            recent: VecDeque::with_capacity(window),
        })
    }

    /// Records `raw` and returns its position in the window's range; `0.5`
    /// when the window holds a single distinct value.
    pub fn rescale(&mut self, raw: f64) -> f64 {
        if self.recent.len() == self.window {
            self.recent.pop_front();
        }
        self.recent.push_back(raw);
        let lo = self.recent.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .recent
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (raw - lo) / (hi - lo)
        } else {
            0.5
        }
    }
}

pub trait Teacher: Send {
    fn id(&self) -> String;
    /// Current distribution over units.
    fn policy(&self) -> Vec<f64>;
    /// Unit for interaction `k` (zero-based).
    fn draw(&mut self, k: usize, rng: &mut Rng) -> Result<usize>;
    fn update(&mut self, unit: usize, reward: f64) -> Result<()>;
    /// Fixed number of interactions the teacher can serve, if any.
    fn horizon(&self) -> Option<usize> {
        None
    }
}

fn sample(policy: &[f64], rng: &mut Rng) -> Result<usize> {
    let dist = WeightedIndex::new(policy)
        .map_err(|e| Error::InvalidArgument(format!("bad policy: {e}")))?;
    Ok(dist.sample(rng))
}

/// Samples units from a Boltzmann policy over their empirical values.
#[derive(Debug, Clone, PartialEq)]
pub struct BoltzmannBandit {
    pub values: EmpiricalValues,
    pub temperature: f64,
}

impl BoltzmannBandit {
    pub fn new(n: usize, temperature: f64) -> Result<Self> {
        boltzmann_policy(&vec![0.0; n.max(1)], temperature)?;
        Ok(BoltzmannBandit {
            values: EmpiricalValues::new(n),
            temperature,
        })
    }
}

impl Teacher for BoltzmannBandit {
    fn id(&self) -> String {
        format!("boltzmann-bandit(T={})", self.temperature)
    }

    fn policy(&self) -> Vec<f64> {
        boltzmann_policy(&self.values.q, self.temperature)
            .expect("validated temperature and finite values")
    }

    fn draw(&mut self, _k: usize, rng: &mut Rng) -> Result<usize> {
        sample(&self.policy(), rng)
    }

    fn update(&mut self, unit: usize, reward: f64) -> Result<()> {
        self.values.update(unit, reward)
    }
}

/// Exp3.S with a sliding-window reward rescaler.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3S {
    weights: Vec<f64>,
    pub alpha: f64,
    pub gamma: f64,
    rescaler: RewardRescaler,
}

impl Exp3S {
    pub const DEFAULT_ALPHA: f64 = 1e-5;
    pub const DEFAULT_GAMMA: f64 = 0.05;
    pub const DEFAULT_WINDOW: usize = 100;

    pub fn new(n: usize, alpha: f64, gamma: f64, window: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Exp3.S needs at least one arm".into(),
            ));
        }
        if !(0.0..=1.0).contains(&gamma) || !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need gamma in [0, 1] and alpha >= 0, got gamma={gamma} alpha={alpha}"
            )));
        }
        Ok(Exp3S {
            weights: vec![1.0; n],
            alpha,
            gamma,
            rescaler: RewardRescaler::new(window)?,
        })
    }

    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(
            n,
            Self::DEFAULT_ALPHA,
            Self::DEFAULT_GAMMA,
            Self::DEFAULT_WINDOW,
        )
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Update with a reward already in `[0, 1]`.
    pub fn step_scaled(&mut self, drawn: usize, reward: f64) -> Result<()> {
        let n = self.weights.len();
        let p = *self.policy().get(drawn).ok_or(Error::UnitIndex {
            index: drawn,
            size: n,
        })?;
        if p <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "arm {drawn} was drawn with probability 0"
            )));
        }
        let total: f64 = self.weights.iter().sum();
        let share = std::f64::consts::E * self.alpha / n as f64 * total;
        for (i, w) in self.weights.iter_mut().enumerate() {
            let x_hat = if i == drawn { reward / p } else { 0.0 };
            *w = *w * (self.gamma * x_hat / n as f64).exp() + share;
        }
        let top = self.weights.iter().copied().fold(0.0, f64::max);
        self.weights.iter_mut().for_each(|w| *w /= top);
        Ok(())
    }
}

impl Teacher for Exp3S {
    fn id(&self) -> String {
        format!("exp3s(alpha={},gamma={})", self.alpha, self.gamma)
    }

    fn policy(&self) -> Vec<f64> {
        let n = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / n)
            .collect()
    }

    fn draw(&mut self, _k: usize, rng: &mut Rng) -> Result<usize> {
        sample(&self.policy(), rng)
    }

    fn update(&mut self, unit: usize, reward: f64) -> Result<()> {
        let x = self.rescaler.rescale(reward);
        self.step_scaled(unit, x)
    }
}

/// Non-adaptive teacher sampling from a fixed distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPolicy {
    probabilities: Vec<f64>,
    label: String,
}

impl FixedPolicy {
    pub fn new(probabilities: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let total: f64 = probabilities.iter().sum();
        if probabilities.is_empty() || probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument(
                "policy entries must be finite and non-negative".into(),
            ));
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "policy sums to {total}, not 1"
            )));
        }
        Ok(FixedPolicy {
            probabilities,
            label: label.into(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n], "uniform")
    }

    pub fn from_curriculum(policy: &StochasticPolicy) -> Result<Self> {
        let label = match policy.projection {
            crate::curriculum::Projection::Boltzmann { .. } => "boltzmann",
            crate::curriculum::Projection::Euclidean => "euclidean",
        };
        Self::new(
            policy.probabilities.clone(),
            format!("{}-{label}", policy.source_method),
        )
    }
}

impl Teacher for FixedPolicy {
    fn id(&self) -> String {
        format!("fixed-policy({})", self.label)
    }

    fn policy(&self) -> Vec<f64> {
        self.probabilities.clone()
    }

    fn draw(&mut self, _k: usize, rng: &mut Rng) -> Result<usize> {
        sample(&self.probabilities, rng)
    }

    fn update(&mut self, _unit: usize, _reward: f64) -> Result<()> {
        Ok(())
    }
}

/// Presents units in the blocks of an ordered schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleTeacher {
    n: usize,
    sequence: Vec<usize>,
    next: usize,
    label: String,
}

impl ScheduleTeacher {
    pub fn new(schedule: &Schedule) -> Result<Self> {
        Ok(ScheduleTeacher {
            n: schedule.units.len(),
            sequence: schedule.expand()?,
            next: 0,
            label: schedule.source_method.clone(),
        })
    }
}

impl Teacher for ScheduleTeacher {
    fn id(&self) -> String {
        format!("ordered-schedule({})", self.label)
    }

    /// Point mass on the unit due next; uniform once the schedule is spent.
    fn policy(&self) -> Vec<f64> {
        match self.sequence.get(self.next) {
            Some(&u) => (0..self.n)
                .map(|i| if i == u { 1.0 } else { 0.0 })
                .collect(),
            None => vec![1.0 / self.n as f64; self.n],
        }
    }

    fn draw(&mut self, k: usize, _rng: &mut Rng) -> Result<usize> {
        let u = *self.sequence.get(k).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "schedule of length {} has no interaction {}",
                self.sequence.len(),
                k + 1
            ))
        })?;
        self.next = k + 1;
        Ok(u)
    }

    fn update(&mut self, _unit: usize, _reward: f64) -> Result<()> {
        Ok(())
    }

    fn horizon(&self) -> Option<usize> {
        Some(self.sequence.len())
    }
}

/// Declarative teacher description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TeacherSpec {
    BoltzmannBandit {
        #[serde(default = "default_temperature")]
        temperature: f64,
    },
    Exp3s {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_window")]
        window: usize,
    },
    FixedPolicy {
        probabilities: Vec<f64>,
    },
    Uniform,
}

fn default_temperature() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    Exp3S::DEFAULT_ALPHA
}
fn default_gamma() -> f64 {
    Exp3S::DEFAULT_GAMMA
}
fn default_window() -> usize {
    Exp3S::DEFAULT_WINDOW
}

impl TeacherSpec {
    pub fn build(&self, n: usize) -> Result<Box<dyn Teacher>> {
        Ok(match self {
            TeacherSpec::BoltzmannBandit { temperature } => {
                Box::new(BoltzmannBandit::new(n, *temperature)?)
            }
            TeacherSpec::Exp3s {
                alpha,
                gamma,
                window,
            } => Box::new(Exp3S::new(n, *alpha, *gamma, *window)?),
            TeacherSpec::FixedPolicy { probabilities } => {
                if probabilities.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "policy has {} entries for {n} units",
                        probabilities.len()
                    )));
                }
                Box::new(FixedPolicy::new(probabilities.clone(), "configured")?)
            }
            TeacherSpec::Uniform => Box::new(FixedPolicy::uniform(n)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub budget: usize,
    pub stride: usize,
    pub units: UnitSet,
    pub eval_target: String,
    pub learner: String,
    pub teacher: String,
    /// Metric of the untrained learner.
    pub initial_metric: f64,
    #[serde(default)]
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// One-based interaction index.
    pub k: usize,
    pub unit: String,
    pub reward: f64,
    pub metric: f64,
    /// False when the metric was carried over inside a stride.
    pub evaluated: bool,
    /// Teacher policy the unit was drawn from.
    pub policy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub meta: RunMeta,
    pub records: Vec<RunRecord>,
}

impl RunLog {
    pub fn final_metric(&self) -> f64 {
        self.records
            .last()
            .map_or(self.meta.initial_metric, |r| r.metric)
    }

    pub fn total_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub budget: usize,
    pub seed: u64,
    /// Evaluate every `stride` interactions (and after the last one).
    pub stride: usize,
}

impl RunOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        RunOptions {
            budget,
            seed,
            stride: 1,
        }
    }
}

/// Runs the teacher-student loop for `opts.budget` interactions.
///
/// Rewards are metric differences, so they telescope to the final metric
/// minus the untrained one. With a stride, the reward of a stride is split
/// evenly across the units presented in it.
pub fn gen_tscl_run<L, T>(
    learner: &mut L,
    teacher: &mut T,
    target: &EvalTarget,
    opts: RunOptions,
) -> Result<RunLog>
where
    L: Learner,
    T: Teacher + ?Sized,
{
    if opts.budget == 0 || opts.stride == 0 {
        return Err(Error::InvalidArgument(
            "budget and stride must be positive".into(),
        ));
    }
    if let Some(h) = teacher.horizon() {
        if opts.budget > h {
            return Err(Error::InvalidArgument(format!(
                "budget {} exceeds the teacher's {h} scheduled interactions",
                opts.budget
            )));
        }
    }
    let fail = |k: usize, e: Error| Error::Learner {
        interaction: k,
        message: e.to_string(),
    };
    let finite = |k: usize, j: f64| {
        if j.is_finite() {
            Ok(j)
        } else {
            Err(fail(k, Error::InvalidArgument(format!("metric is {j}"))))
        }
    };
    learner.reset(seed::derive(opts.seed, &[seed::stream::LEARNER]));
    let mut rng = seed::rng(seed::derive(opts.seed, &[seed::stream::TEACHER]));
    let initial = finite(0, learner.evaluate(target).map_err(|e| fail(0, e))?)?;
    let mut prev = initial;
    let mut pending = Vec::with_capacity(opts.stride);
    let mut records = Vec::with_capacity(opts.budget);
    for k in 1..=opts.budget {
        let policy = teacher.policy();
        let unit = teacher.draw(k - 1, &mut rng)?;
        learner.present(unit).map_err(|e| fail(k, e))?;
        pending.push(unit);
        let evaluated = k % opts.stride == 0 || k == opts.budget;
        let (reward, metric) = if evaluated {
            let j = finite(k, learner.evaluate(target).map_err(|e| fail(k, e))?)?;
            let r = j - prev;
            let share = r / pending.len() as f64;
            for u in pending.drain(..) {
                teacher.update(u, share)?;
            }
            prev = j;
            (r, j)
        } else {
            (0.0, prev)
        };
        records.push(RunRecord {
            k,
            unit: learner.units().name(unit).to_string(),
            reward,
            metric,
            evaluated,
            policy,
        });
    }
    Ok(RunLog {
        meta: RunMeta {
            seed: opts.seed,
            budget: opts.budget,
            stride: opts.stride,
            units: learner.units().clone(),
            eval_target: target.label.clone(),
            learner: learner.id(),
            teacher: teacher.id(),
            initial_metric: initial,
            extra: BTreeMap::new(),
        },
        records,
    })
}
