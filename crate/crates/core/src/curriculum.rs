//! Value-proportional curriculum mechanisms.
//!
//! Unit values become either a fixed sampling policy (Boltzmann or Euclidean
//! projection onto the simplex) or an ordered schedule that presents units
//! one after another for a share of the interaction budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::UnitSet;
use crate::solution::{rank_descending, ValueVector};
use crate::teacher::boltzmann_policy;

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn euclidean_simplex_projection(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot project an empty vector".into(),
        ));
    }
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value {bad}")));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            theta = candidate;
        }
    }
    Ok(v.iter().map(|x| (x - theta).max(0.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Projection {
    Boltzmann { temperature: f64 },
    Euclidean,
}

impl Projection {
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Projection::Boltzmann { temperature } => boltzmann_policy(values, temperature),
            Projection::Euclidean => euclidean_simplex_projection(values),
        }
    }
}

/// A fixed, non-adaptive sampling distribution over units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticPolicy {
    pub units: UnitSet,
    pub probabilities: Vec<f64>,
    pub projection: Projection,
    pub eval_target: String,
    pub source_method: String,
}

pub fn stochastic_mechanism(
    values: &ValueVector,
    projection: Projection,
) -> Result<StochasticPolicy> {
    Ok(StochasticPolicy {
        units: values.units.clone(),
        probabilities: projection.apply(&values.values)?,
        projection,
        eval_target: values.eval_target.clone(),
        source_method: values.method.as_str().to_string(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankDirection {
    #[default]
    Descending,
    Ascending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub unit: String,
    pub count: usize,
}

/// Ordered (unit, interaction count) list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub units: UnitSet,
    pub steps: Vec<ScheduleStep>,
    pub budget: usize,
    /// Interactions lost to flooring, `budget − total()`.
    pub dropped: usize,
    pub eval_target: String,
    pub source_method: String,
}

impl Schedule {
    pub fn total(&self) -> usize {
        self.steps.iter().map(|s| s.count).sum()
    }

    /// Unit index presented at each interaction, in order.
    pub fn expand(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.total());
        for step in &self.steps {
            let i = self.units.index(&step.unit)?;
            out.extend(std::iter::repeat_n(i, step.count));
        }
        Ok(out)
    }
}

/// Ranks units by Nowak & Radzik value, projects the values onto the
/// simplex and gives the i-th ranked unit `⌊τᵢ·K⌋` consecutive interactions.
/// Units whose allocation is zero are dropped.
pub fn ordered_mechanism(
    values: &ValueVector,
    budget: usize,
    direction: RankDirection,
) -> Result<Schedule> {
    if !values.method.is_ordered() {
        return Err(Error::InvalidArgument(format!(
            "ordered mechanism needs Nowak & Radzik values, got {}",
            values.method.as_str()
        )));
    }
    let tau = euclidean_simplex_projection(&values.values)?;
    let positive = tau.iter().filter(|&&p| p > 0.0).count();
    if budget < positive {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} is smaller than the {positive} units with positive weight"
        )));
    }
    let mut order = rank_descending(&values.values);
    if direction == RankDirection::Ascending {
        order.sort_by(|&a, &b| {
            values.values[a]
                .total_cmp(&values.values[b])
                .then(a.cmp(&b))
        });
    }
    let steps: Vec<ScheduleStep> = order
        .into_iter()
        .map(|i| ScheduleStep {
            unit: values.units.name(i).to_string(),
            // absorb rounding in tau so exact products are not floored down
            count: (tau[i] * budget as f64 + 1e-9).floor() as usize,
        })
        .filter(|s| s.count > 0)
        .collect();
    let total: usize = steps.iter().map(|s| s.count).sum();
    Ok(Schedule {
        units: values.units.clone(),
        steps,
        budget,
        dropped: budget - total,
        eval_target: values.eval_target.clone(),
        source_method: values.method.as_str().to_string(),
    })
}

/// Output of a curriculum mechanism, as consumed by the training loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TeacherPolicy {
    FixedPolicy(StochasticPolicy),
    OrderedSchedule(Schedule),
}

impl TeacherPolicy {
    pub fn units(&self) -> &UnitSet {
        match self {
            TeacherPolicy::FixedPolicy(p) => &p.units,
            TeacherPolicy::OrderedSchedule(s) => &s.units,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::ValueMethod;

    fn nr_values(names: &[&str], values: &[f64]) -> ValueVector {
        ValueVector {
            units: UnitSet::new(names.iter().copied()).unwrap(),
            values: values.to_vec(),
            method: ValueMethod::NrExact,
            eval_target: "all".into(),
            sample_count: None,
        }
    }

    #[test]
    fn projection_worked_examples() {
        assert_eq!(
            euclidean_simplex_projection(&[1.0, 0.0, -1.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let third = euclidean_simplex_projection(&[0.5, 0.5, 0.5]).unwrap();
        assert!(third.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let on = [0.2, 0.3, 0.5];
        let p = euclidean_simplex_projection(&on).unwrap();
        for (a, b) in p.iter().zip(on) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn projection_rejects_bad_input() {
        assert!(euclidean_simplex_projection(&[]).is_err());
        assert!(euclidean_simplex_projection(&[f64::NAN]).is_err());
    }

    #[test]
    fn euclidean_mechanism_prunes_negative_unit() {
        let v = ValueVector {
            method: ValueMethod::ShapleyExact,
            ..nr_values(&["a", "b", "c"], &[0.9, -0.5, 0.1])
        };
        let policy = stochastic_mechanism(&v, Projection::Euclidean).unwrap();
        assert_eq!(policy.probabilities[1], 0.0);
        assert!((policy.probabilities[0] - 0.9).abs() < 1e-12);
        assert!((policy.probabilities[2] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn boltzmann_mechanism_equal_values_uniform() {
        let v = nr_values(&["a", "b", "c", "d"], &[0.3; 4]);
        let policy = stochastic_mechanism(&v, Projection::Boltzmann { temperature: 1.0 }).unwrap();
        assert!(policy
            .probabilities
            .iter()
            .all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn ordered_equal_values_split_by_index() {
        let s = ordered_mechanism(
            &nr_values(&["u1", "u2"], &[0.2, 0.2]),
            100,
            RankDirection::Descending,
        )
        .unwrap();
        assert_eq!(
            s.steps,
            vec![
                ScheduleStep {
                    unit: "u1".into(),
                    count: 50
                },
                ScheduleStep {
                    unit: "u2".into(),
                    count: 50
                }
            ]
        );
        assert_eq!(s.dropped, 0);
    }

    #[test]
    fn ordered_two_units_with_negative_value() {
        // sorted (0.423, -0.1): rho = 2, theta = (0.323 - 1)/2 = -0.3385
        // tau = (0.7615, 0.2385) -> floor(76.15) = 76, floor(23.85) = 23
        let s = ordered_mechanism(
            &nr_values(&["u1", "u2"], &[0.423, -0.1]),
            100,
            RankDirection::Descending,
        )
        .unwrap();
        assert_eq!(
            s.steps[0],
            ScheduleStep {
                unit: "u1".into(),
                count: 76
            }
        );
        assert_eq!(
            s.steps[1],
            ScheduleStep {
                unit: "u2".into(),
                count: 23
            }
        );
        assert_eq!(s.dropped, 1);
        // A gap larger than one on the simplex scale drops the lower unit.
        let s = ordered_mechanism(
            &nr_values(&["u1", "u2"], &[1.2, -0.1]),
            100,
            RankDirection::Descending,
        )
        .unwrap();
        assert_eq!(
            s.steps,
            vec![ScheduleStep {
                unit: "u1".into(),
                count: 100
            }]
        );
    }

    #[test]
    fn ordered_rooms_values_rank_higher_first() {
        // (TwoRooms 0.041, FourRooms 0.107): theta = (0.148 - 1)/2 = -0.426
        // tau = (0.467, 0.533)
        let v = nr_values(&["TwoRooms", "FourRooms"], &[0.041, 0.107]);
        let s = ordered_mechanism(&v, 1000, RankDirection::Descending).unwrap();
        assert_eq!(
            s.steps[0],
            ScheduleStep {
                unit: "FourRooms".into(),
                count: 533
            }
        );
        assert_eq!(
            s.steps[1],
            ScheduleStep {
                unit: "TwoRooms".into(),
                count: 467
            }
        );
        let asc = ordered_mechanism(&v, 1000, RankDirection::Ascending).unwrap();
        assert_eq!(asc.steps[0].unit, "TwoRooms");
        assert_eq!(asc.expand().unwrap().len(), 1000);
    }

    #[test]
    fn ordered_rejects_shapley_and_tiny_budget() {
        let mut v = nr_values(&["a", "b"], &[0.5, 0.5]);
        assert!(ordered_mechanism(&v, 1, RankDirection::Descending).is_err());
        v.method = ValueMethod::ShapleyExact;
        assert!(ordered_mechanism(&v, 100, RankDirection::Descending).is_err());
    }
}
