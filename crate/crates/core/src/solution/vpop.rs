//! Value of a player to another player.
//!
//! Built as a Shapley value of Shapley values: for each unit `j` the inner
//! game `w_j(C)` is `j`'s value in the subgame on `C` (zero when `j ∉ C`),
//! and the entry `(i, j)` is unit `i`'s Shapley value in `w_j`. The outer
//! weight is `(c−1)!(n−c)!/n!` for containing sets of size `c`. Because inner
//! values are efficient, `Σ_j w_j(C) = v(C) − v(∅)` and rows sum to the
//! Shapley value.

use super::nowak_radzik::prefix_values;
use super::shapley::{shapley_in_subgame, shapley_weights};
use super::{InteractionMatrix, MatrixMethod};
use crate::error::Result;
use crate::game::{CharTable, Coalition, OrderedCharTable};
use crate::par::{self, Exec};

pub fn vpop(table: &CharTable) -> Result<InteractionMatrix> {
    vpop_with(table, Exec::default())
}

pub fn vpop_with(table: &CharTable, exec: Exec) -> Result<InteractionMatrix> {
    let worths = table.values()?;
    let n = table.n();
    let weights: Vec<Vec<f64>> = (0..=n).map(shapley_weights).collect();
    let inner = par::map_range(exec, 1usize << n, |mask| {
        let c = Coalition::from_mask(mask as u32);
        shapley_in_subgame(n, &worths, c, &weights[c.len()])
    });
    Ok(InteractionMatrix {
        units: table.units().clone(),
        values: outer(n, &inner, exec),
        method: MatrixMethod::ShapleyVpop,
        eval_target: table.eval_target().to_string(),
    })
}

/// Ordered analog: inner values are prefix Nowak & Radzik values of each
/// ordered subgame; the outer aggregation is unchanged.
pub fn vpop_ordered(table: &OrderedCharTable) -> Result<InteractionMatrix> {
    vpop_ordered_with(table, Exec::default())
}

pub fn vpop_ordered_with(table: &OrderedCharTable, exec: Exec) -> Result<InteractionMatrix> {
    table.require_complete()?;
    let n = table.n();
    let inner = par::map_range(exec, 1usize << n, |mask| {
        let members: Vec<usize> = Coalition::from_mask(mask as u32).members().collect();
        prefix_values(table, &members)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(InteractionMatrix {
        units: table.units().clone(),
        values: outer(n, &inner, exec),
        method: MatrixMethod::NrVpop,
        eval_target: table.eval_target().to_string(),
    })
}

/// `inner[mask][j]` is unit `j`'s value in the subgame on `mask`.
fn outer(n: usize, inner: &[Vec<f64>], exec: Exec) -> Vec<Vec<f64>> {
    let weights = shapley_weights(n);
    par::map_range(exec, n, |i| {
        let mut row = vec![0.0; n];
        for (mask, with_i) in inner.iter().enumerate() {
            let c = Coalition::from_mask(mask as u32);
            if !c.contains(i) {
                continue;
            }
            let without_i = &inner[c.without(i).mask() as usize];
            let w = weights[c.len() - 1];
            for j in c.members() {
                row[j] += w * (with_i[j] - without_i[j]);
            }
        }
        row
    })
}
