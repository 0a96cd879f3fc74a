use std::sync::Arc;

use super::{check_unit, EvalTarget, Learner};
use crate::error::{Error, Result};
use crate::game::{CharTable, Coalition, OrderedCharTable, UnitSet};

#[derive(Debug)]
enum Backing {
    Unordered(Vec<CharTable>),
    Ordered(Vec<OrderedCharTable>),
}

/// Replays tabulated worths: the metric is the backing table's worth of the
/// realized coalition. Unordered tables see the set of presented units,
/// ordered tables the order of first presentation.
#[derive(Debug, Clone)]
pub struct TableLearner {
    units: UnitSet,
    backing: Arc<Backing>,
    sequence: Vec<usize>,
    seen: Coalition,
}

impl TableLearner {
    /// One table per evaluation target; all must share the unit set.
    pub fn unordered(tables: Vec<CharTable>) -> Result<Self> {
        let units = shared_units(tables.iter().map(|t| (t.units(), t.eval_target())))?;
        Ok(Self::build(units, Backing::Unordered(tables)))
    }

    pub fn ordered(tables: Vec<OrderedCharTable>) -> Result<Self> {
        let units = shared_units(tables.iter().map(|t| (t.units(), t.eval_target())))?;
        Ok(Self::build(units, Backing::Ordered(tables)))
    }

    fn build(units: UnitSet, backing: Backing) -> Self {
        TableLearner {
            units,
            backing: Arc::new(backing),
            sequence: Vec::new(),
            seen: Coalition::EMPTY,
        }
    }

    pub fn is_ordered(&self) -> bool {
        matches!(*self.backing, Backing::Ordered(_))
    }

    /// Units in order of first presentation.
    pub fn realized(&self) -> &[usize] {
        &self.sequence
    }
}

fn shared_units<'a>(mut tables: impl Iterator<Item = (&'a UnitSet, &'a str)>) -> Result<UnitSet> {
    let (units, first) = tables
        .next()
        .ok_or_else(|| Error::InvalidArgument("table learner needs at least one table".into()))?;
    let mut labels = vec![first];
    for (other, label) in tables {
        if other != units {
            return Err(Error::InvalidArgument(format!(
                "table for target `{label}` has a different unit set"
            )));
        }
        if labels.contains(&label) {
            return Err(Error::InvalidArgument(format!(
                "two tables for target `{label}`"
            )));
        }
        labels.push(label);
    }
    Ok(units.clone())
}

impl Learner for TableLearner {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn id(&self) -> String {
        if self.is_ordered() {
            "table-ordered"
        } else {
            "table"
        }
        .to_string()
    }

    fn reset(&mut self, _seed: u64) {
        self.sequence.clear();
        self.seen = Coalition::EMPTY;
    }

    fn present(&mut self, unit: usize) -> Result<()> {
        check_unit(&self.units, unit)?;
        if !self.seen.contains(unit) {
            self.seen = self.seen.with(unit);
            self.sequence.push(unit);
        }
        Ok(())
    }

    fn evaluate(&self, target: &EvalTarget) -> Result<f64> {
        let missing = || Error::InvalidArgument(format!("no table for target `{}`", target.label));
        match &*self.backing {
            Backing::Unordered(tables) => tables
                .iter()
                .find(|t| t.eval_target() == target.label)
                .ok_or_else(missing)?
                .worth(self.seen),
            Backing::Ordered(tables) => tables
                .iter()
                .find(|t| t.eval_target() == target.label)
                .ok_or_else(missing)?
                .worth(&self.sequence),
        }
    }

    fn metric_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn granularity(&self) -> &'static str {
        "lookup"
    }
}
