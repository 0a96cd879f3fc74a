//! Solution concepts over tabulated games: Shapley and Nowak & Radzik values
//! (exact and sampled) and the value-of-a-player-to-another-player matrix.

mod nowak_radzik;
mod shapley;
mod vpop;

use serde::{Deserialize, Serialize};

use crate::game::UnitSet;

pub use nowak_radzik::{nowak_radzik, nowak_radzik_mc, nowak_radzik_mc_with, NrVariant};
pub use shapley::{shapley_exact, shapley_mc, shapley_mc_with, shapley_weights};
pub use vpop::{vpop, vpop_ordered, vpop_ordered_with, vpop_with};

/// Tolerance for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-9;

/// Permutations per Monte-Carlo shard. Fixed so shard boundaries, and hence
/// results, do not depend on the thread count.
pub const MC_SHARD_SIZE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueMethod {
    ShapleyExact,
    ShapleyMc,
    NrExact,
    NrLiteral,
    NrMc,
}

impl ValueMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueMethod::ShapleyExact => "shapley-exact",
            ValueMethod::ShapleyMc => "shapley-mc",
            ValueMethod::NrExact => "nr-exact",
            ValueMethod::NrLiteral => "nr-literal",
            ValueMethod::NrMc => "nr-mc",
        }
    }

    pub fn is_ordered(self) -> bool {
        matches!(
            self,
            ValueMethod::NrExact | ValueMethod::NrLiteral | ValueMethod::NrMc
        )
    }
}

impl std::str::FromStr for ValueMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown value method `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixMethod {
    ShapleyVpop,
    NrVpop,
}

impl MatrixMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixMethod::ShapleyVpop => "shapley-vpop",
            MatrixMethod::NrVpop => "nr-vpop",
        }
    }
}

impl std::str::FromStr for MatrixMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown interaction method `{s}`"))
    }
}

/// Per-unit allocation produced by a solution concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueVector {
    pub units: UnitSet,
    pub values: Vec<f64>,
    pub method: ValueMethod,
    pub eval_target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
}

impl ValueVector {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.units.index(name).ok().map(|i| self.values[i])
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Unit indices by descending value; ties keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        rank_descending(&self.values)
    }

    pub fn scaled(&self, factor: f64) -> ValueVector {
        ValueVector {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Pairwise influence matrix; `values[i][j]` is the influence of unit `i` on
/// unit `j`'s value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionMatrix {
    pub units: UnitSet,
    pub values: Vec<Vec<f64>>,
    pub method: MatrixMethod,
    pub eval_target: String,
}

impl InteractionMatrix {
    pub fn row_sums(&self) -> Vec<f64> {
        self.values.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let i = self.units.index(row).ok()?;
        let j = self.units.index(col).ok()?;
        Some(self.values[i][j])
    }

    /// Off-diagonal entry with the smallest value, ties by (row, col) order.
    pub fn most_negative_off_diagonal(&self) -> Option<(usize, usize, f64)> {
        let n = self.units.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = self.values[i][j];
                if best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}
