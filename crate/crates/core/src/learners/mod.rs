//! Learners driven by a teacher: `reset`, `present` one unit, `evaluate`
//! against a target set of units.

mod classifier;
pub mod sipd;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Coalition, UnitSet};

pub use classifier::{ClassSpec, ClassifierConfig, ClassifierLearner};
pub use sipd::{SipdConfig, SipdLearner, TdTarget};
pub use table::TableLearner;

/// Label used for the target made of every unit.
pub const ALL_TARGET: &str = "all";

/// Set of units a metric is measured on, with the label it is stored under.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvalTarget {
    pub label: String,
    pub members: Coalition,
}

impl EvalTarget {
    pub fn all(units: &UnitSet) -> Self {
        EvalTarget {
            label: ALL_TARGET.to_string(),
            members: units.full(),
        }
    }

    pub fn single(units: &UnitSet, index: usize) -> Self {
        EvalTarget {
            label: units.name(index).to_string(),
            members: Coalition::singleton(index),
        }
    }

    /// `"all"`, a unit name, or unit names joined with `+`.
    pub fn parse(units: &UnitSet, label: &str) -> Result<Self> {
        if label == ALL_TARGET {
            return Ok(Self::all(units));
        }
        let names: Vec<&str> = label.split('+').map(str::trim).collect();
        let members = units.coalition_of(&names)?;
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty evaluation target".into()));
        }
        Ok(EvalTarget {
            label: label.to_string(),
            members,
        })
    }

    /// `"all"` followed by every single-unit target.
    pub fn standard(units: &UnitSet) -> Vec<Self> {
        std::iter::once(Self::all(units))
            .chain((0..units.len()).map(|i| Self::single(units, i)))
            .collect()
    }
}

/// A system trained one unit at a time.
///
/// `evaluate` must not change the learner's state, and `present` must be
/// deterministic given the state and the seed passed to `reset`.
pub trait Learner: Clone + Send + Sync {
    fn units(&self) -> &UnitSet;
    fn id(&self) -> String;
    fn reset(&mut self, seed: u64);
    fn present(&mut self, unit: usize) -> Result<()>;
    fn evaluate(&self, target: &EvalTarget) -> Result<f64>;
    /// Closed interval the metric lies in.
    fn metric_range(&self) -> (f64, f64);
    /// What one `present` call means, e.g. "match" or "gradient-step".
    fn granularity(&self) -> &'static str;
    /// Underlying steps per presentation, for bookkeeping.
    fn steps_per_presentation(&self) -> u64 {
        1
    }
}

/// Declarative description of a learner built from configuration alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LearnerSpec {
    Classifier(ClassifierConfig),
    Sipd(SipdConfig),
}

impl LearnerSpec {
    pub fn build(&self, seed: u64) -> Result<AnyLearner> {
        Ok(match self {
            LearnerSpec::Classifier(cfg) => {
                AnyLearner::Classifier(ClassifierLearner::new(cfg.clone(), seed)?)
            }
            LearnerSpec::Sipd(cfg) => AnyLearner::Sipd(SipdLearner::new(cfg.clone())?),
        })
    }
}

/// Closed set of learners, for callers that pick one at run time.
#[derive(Debug, Clone)]
pub enum AnyLearner {
    Table(TableLearner),
    Classifier(ClassifierLearner),
    Sipd(SipdLearner),
}

macro_rules! delegate {
    ($self:ident, $l:ident => $e:expr) => {
        match $self {
            AnyLearner::Table($l) => $e,
            AnyLearner::Classifier($l) => $e,
            AnyLearner::Sipd($l) => $e,
        }
    };
}

impl Learner for AnyLearner {
    fn units(&self) -> &UnitSet {
        delegate!(self, l => l.units())
    }
    fn id(&self) -> String {
        delegate!(self, l => l.id())
    }
    fn reset(&mut self, seed: u64) {
        delegate!(self, l => l.reset(seed))
    }
    fn present(&mut self, unit: usize) -> Result<()> {
        delegate!(self, l => l.present(unit))
    }
    fn evaluate(&self, target: &EvalTarget) -> Result<f64> {
        delegate!(self, l => l.evaluate(target))
    }
    fn metric_range(&self) -> (f64, f64) {
        delegate!(self, l => l.metric_range())
    }
    fn granularity(&self) -> &'static str {
        delegate!(self, l => l.granularity())
    }
    fn steps_per_presentation(&self) -> u64 {
        delegate!(self, l => l.steps_per_presentation())
    }
}

pub(crate) fn check_unit(units: &UnitSet, unit: usize) -> Result<()> {
    if unit >= units.len() {
        return Err(Error::UnitIndex {
            index: unit,
            size: units.len(),
        });
    }
    Ok(())
}
