//! Coalition-formation simulations that tabulate a learner's worth.
//!
//! Every coalition (set or sequence) is trained from scratch within the
//! interaction budget `K`, then the final learner is evaluated once per
//! target. Coalition × replicate cells run concurrently with seeds derived
//! from the master seed and the coalition key, so the output does not depend
//! on scheduling.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    enumerate_coalitions, enumerate_ordered_coalitions, CharTable, OrderedCharTable, UnitSet,
    Worth, MAX_ORDERED_UNITS, META_EMPTY_WORTH,
};
use crate::learners::{EvalTarget, Learner};
use crate::par::{self, Exec};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    Unordered,
    Ordered,
}

impl SimulationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimulationMode::Unordered => "unordered",
            SimulationMode::Ordered => "ordered",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub mode: SimulationMode,
    pub budget: usize,
    pub replicates: usize,
    pub targets: Vec<EvalTarget>,
    pub seed: u64,
}

impl SimulationPlan {
    pub const DEFAULT_REPLICATES: usize = 5;

    /// Plan over the `"all"` target and every single-unit target.
    pub fn standard(
        units: &UnitSet,
        mode: SimulationMode,
        budget: usize,
        replicates: usize,
        seed: u64,
    ) -> Self {
        SimulationPlan {
            mode,
            budget,
            replicates,
            targets: EvalTarget::standard(units),
            seed,
        }
    }

    pub fn validate(&self, units: &UnitSet) -> Result<()> {
        let n = units.len();
        if n == 0 {
            return Err(Error::InvalidArgument("unit set is empty".into()));
        }
        if self.mode == SimulationMode::Ordered && n > MAX_ORDERED_UNITS {
            return Err(Error::TooManyUnits {
                size: n,
                bound: MAX_ORDERED_UNITS,
            });
        }
        if self.budget < n {
            return Err(Error::InvalidArgument(format!(
                "budget {} is smaller than the {n} units",
                self.budget
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be positive".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::InvalidArgument("no evaluation targets".into()));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if t.members.is_empty() || !t.members.is_valid_for(n) {
                return Err(Error::InvalidArgument(format!(
                    "target `{}` is not a non-empty coalition",
                    t.label
                )));
            }
            if self.targets[..i].iter().any(|o| o.label == t.label) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate target `{}`",
                    t.label
                )));
            }
        }
        Ok(())
    }
}

/// One table per evaluation target, all measured from the same trained
/// learners. `tables` hold replicate means; `per_replicate[r]` the raw
/// worths of replicate `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTableFamily<T> {
    pub mode: SimulationMode,
    pub tables: Vec<T>,
    pub per_replicate: Vec<Vec<T>>,
    pub meta: BTreeMap<String, String>,
}

impl<T> CharTableFamily<T> {
    pub fn targets(&self) -> impl Iterator<Item = &T> {
        self.tables.iter()
    }
}

impl CharTableFamily<CharTable> {
    pub fn table(&self, target: &str) -> Option<&CharTable> {
        self.tables.iter().find(|t| t.eval_target() == target)
    }
}

impl CharTableFamily<OrderedCharTable> {
    pub fn table(&self, target: &str) -> Option<&OrderedCharTable> {
        self.tables.iter().find(|t| t.eval_target() == target)
    }
}

/// Trains a fresh learner on `schedule` and evaluates every target.
fn run_cell<L: Learner>(
    template: &L,
    cell_seed: u64,
    schedule: impl Iterator<Item = usize>,
    targets: &[EvalTarget],
) -> Result<Vec<f64>> {
    let mut learner = template.clone();
    learner.reset(seed::derive(cell_seed, &[seed::stream::LEARNER]));
    for unit in schedule {
        learner.present(unit)?;
    }
    targets
        .iter()
        .map(|t| {
            let v = learner.evaluate(t)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidArgument(format!(
                    "metric for `{}` is {v}",
                    t.label
                )))
            }
        })
        .collect()
}

/// Mean, sample standard deviation and count of replicate worths.
fn summarize(samples: &[f64]) -> Worth {
    let n = samples.len() as f64;
    // offset from the first sample keeps identical replicates exact
    let first = samples[0];
    let mean = first + samples.iter().map(|x| x - first).sum::<f64>() / n;
    let std = if samples.len() > 1 {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Worth::with_stats(mean, std, samples.len() as u32)
}

fn base_meta<L: Learner>(plan: &SimulationPlan, learner: &L) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("mode".into(), plan.mode.as_str().into());
    meta.insert("budget".into(), plan.budget.to_string());
    meta.insert("replicates".into(), plan.replicates.to_string());
    meta.insert("seed".into(), plan.seed.to_string());
    meta.insert("learner".into(), learner.id());
    meta.insert("granularity".into(), learner.granularity().into());
    meta.insert(
        "steps_per_presentation".into(),
        learner.steps_per_presentation().to_string(),
    );
    meta.insert(META_EMPTY_WORTH.into(), "untrained-learner".into());
    meta
}

/// Cells in coalition-major order: `out[c * R + r]`. `coalitions` holds the
/// key and label of each coalition; `schedule(c, cell_seed)` its units.
fn simulate_cells<L, S>(
    plan: &SimulationPlan,
    learner: &L,
    coalitions: &[(u64, String)],
    schedule: S,
    exec: Exec,
) -> Result<Vec<Vec<f64>>>
where
    L: Learner,
    S: Fn(usize, u64) -> Vec<usize> + Sync + Send,
{
    let r = plan.replicates;
    par::map_range(exec, coalitions.len() * r, |cell| {
        let (ci, rep) = (cell / r, cell % r);
        let (key, label) = &coalitions[ci];
        let cell_seed = seed::derive(plan.seed, &[seed::stream::CELL, *key, rep as u64]);
        run_cell(
            learner,
            cell_seed,
            schedule(ci, cell_seed).into_iter(),
            &plan.targets,
        )
        .map_err(|e| Error::Cell {
            coalition: label.clone(),
            replicate: rep,
            message: e.to_string(),
        })
    })
    .into_iter()
    .collect()
}

/// Each coalition draws its `K` units uniformly from its members.
pub fn simulate_unordered<L: Learner>(
    plan: &SimulationPlan,
    learner: &L,
) -> Result<CharTableFamily<CharTable>> {
    simulate_unordered_with(plan, learner, Exec::default())
}

pub fn simulate_unordered_with<L: Learner>(
    plan: &SimulationPlan,
    learner: &L,
    exec: Exec,
) -> Result<CharTableFamily<CharTable>> {
    let units = learner.units().clone();
    plan.validate(&units)?;
    let coalitions = enumerate_coalitions(&units)?;
    let budget = plan.budget;
    let keys: Vec<(u64, String)> = coalitions
        .iter()
        .map(|c| (c.mask() as u64, units.describe(*c)))
        .collect();
    let cells = simulate_cells(
        plan,
        learner,
        &keys,
        |ci, cell_seed| {
            let members: Vec<usize> = coalitions[ci].members().collect();
            if members.is_empty() {
                return Vec::new();
            }
            let mut rng = seed::rng(seed::derive(cell_seed, &[seed::stream::SCHEDULE]));
            (0..budget)
                .map(|_| members[rng.random_range(0..members.len())])
                .collect()
        },
        exec,
    )?;
    let r = plan.replicates;
    let build = |value: &dyn Fn(usize, usize) -> Worth| -> Result<Vec<CharTable>> {
        plan.targets
            .iter()
            .enumerate()
            .map(|(ti, target)| {
                let mut table = CharTable::new(units.clone(), target.label.clone());
                for (ci, c) in coalitions.iter().enumerate() {
                    table.set(*c, value(ci, ti))?;
                }
                *table.meta_mut() = base_meta(plan, learner);
                Ok(table)
            })
            .collect()
    };
    let tables = build(&|ci, ti| {
        summarize(
            &(0..r)
                .map(|rep| cells[ci * r + rep][ti])
                .collect::<Vec<_>>(),
        )
    })?;
    let per_replicate = (0..r)
        .map(|rep| build(&|ci, ti| Worth::exact(cells[ci * r + rep][ti])))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharTableFamily {
        mode: SimulationMode::Unordered,
        tables,
        per_replicate,
        meta: base_meta(plan, learner),
    })
}

/// Each member of an ordered coalition is presented `⌊K/|C|⌋` consecutive
/// times, in sequence order. The remaining `K mod |C|` interactions are
/// discarded.
pub fn simulate_ordered<L: Learner>(
    plan: &SimulationPlan,
    learner: &L,
) -> Result<CharTableFamily<OrderedCharTable>> {
    simulate_ordered_with(plan, learner, Exec::default())
}

pub fn simulate_ordered_with<L: Learner>(
    plan: &SimulationPlan,
    learner: &L,
    exec: Exec,
) -> Result<CharTableFamily<OrderedCharTable>> {
    let units = learner.units().clone();
    plan.validate(&units)?;
    let sequences = enumerate_ordered_coalitions(&units)?;
    let budget = plan.budget;
    let keys: Vec<(u64, String)> = sequences
        .iter()
        .map(|oc| (oc.key(), units.describe_seq(&oc.indices())))
        .collect();
    let cells = simulate_cells(
        plan,
        learner,
        &keys,
        |ci, _| {
            let seq = sequences[ci].indices();
            let each = if seq.is_empty() {
                0
            } else {
                budget / seq.len()
            };
            seq.iter()
                .flat_map(|&u| std::iter::repeat_n(u, each))
                .collect()
        },
        exec,
    )?;
    let mut meta = base_meta(plan, learner);
    meta.insert("remainder".into(), "discarded".into());
    for size in 1..=units.len() {
        meta.insert(
            format!("effective_budget_size_{size}"),
            (size * (budget / size)).to_string(),
        );
    }
    let r = plan.replicates;
    let build = |value: &dyn Fn(usize, usize) -> Worth| -> Result<Vec<OrderedCharTable>> {
        plan.targets
            .iter()
            .enumerate()
            .map(|(ti, target)| {
                let mut table = OrderedCharTable::new(units.clone(), target.label.clone())?;
                for (ci, oc) in sequences.iter().enumerate() {
                    table.set(oc, value(ci, ti))?;
                }
                *table.meta_mut() = meta.clone();
                Ok(table)
            })
            .collect()
    };
    let tables = build(&|ci, ti| {
        summarize(
            &(0..r)
                .map(|rep| cells[ci * r + rep][ti])
                .collect::<Vec<_>>(),
        )
    })?;
    let per_replicate = (0..r)
        .map(|rep| build(&|ci, ti| Worth::exact(cells[ci * r + rep][ti])))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharTableFamily {
        mode: SimulationMode::Ordered,
        tables,
        per_replicate,
        meta,
    })
}
