use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ValueMethod, ValueVector, MC_SHARD_SIZE};
use crate::error::{Error, Result};
use crate::game::{
    enumerate_ordered_coalitions, for_each_permutation, OrderedCharTable, OrderedGame,
};
use crate::par::{self, Exec};
use crate::seed;

/// Which form of the Nowak & Radzik value to compute.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NrVariant {
    /// Average over full orderings of each unit's marginal contribution when
    /// appended to its predecessors.
    #[default]
    Prefix,
    /// Unweighted sum over every ordered coalition not containing the unit,
    /// divided by n!. Does not reduce to Shapley on order-independent games.
    Literal,
}

/// Exact Nowak & Radzik value over a complete ordered table.
pub fn nowak_radzik(table: &OrderedCharTable, variant: NrVariant) -> Result<ValueVector> {
    table.require_complete()?;
    let n = table.n();
    let values = match variant {
        NrVariant::Prefix => prefix_values(table, &(0..n).collect::<Vec<_>>())?,
        NrVariant::Literal => literal_values(table)?,
    };
    Ok(ValueVector {
        units: table.units().clone(),
        values,
        method: match variant {
            NrVariant::Prefix => ValueMethod::NrExact,
            NrVariant::Literal => ValueMethod::NrLiteral,
        },
        eval_target: table.eval_target().to_string(),
        sample_count: None,
    })
}

/// Prefix-variant values of the subgame on `members` (parent indices),
/// returned in parent indexing with zeros elsewhere.
pub(crate) fn prefix_values<G: OrderedGame + ?Sized>(
    game: &G,
    members: &[usize],
) -> Result<Vec<f64>> {
    let n = game.units().len();
    let mut sums = vec![0.0; n];
    let mut perms = 0u64;
    let empty = game.worth(&[])?;
    let mut order = members.to_vec();
    let mut failure = None;
    for_each_permutation(&mut order, |p| {
        if failure.is_some() {
            return;
        }
        perms += 1;
        let mut prev = empty;
        for k in 0..p.len() {
            match game.worth(&p[..=k]) {
                Ok(cur) => {
                    sums[p[k]] += cur - prev;
                    prev = cur;
                }
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if members.is_empty() {
        return Ok(sums);
    }
    Ok(sums.into_iter().map(|s| s / perms as f64).collect())
}

fn literal_values(table: &OrderedCharTable) -> Result<Vec<f64>> {
    let n = table.n();
    let mut sums = vec![0.0; n];
    let mut appended = Vec::with_capacity(n);
    for oc in enumerate_ordered_coalitions(table.units())? {
        let seq = oc.indices();
        let base = table.worth(&seq)?;
        let support = oc.support();
        for (u, sum) in sums.iter_mut().enumerate() {
            if support.contains(u) {
                continue;
            }
            appended.clear();
            appended.extend_from_slice(&seq);
            appended.push(u);
            *sum += table.worth(&appended)? - base;
        }
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(sums.into_iter().map(|s| s / factorial).collect())
}

/// Sampled estimate of the prefix variant from random full orderings.
pub fn nowak_radzik_mc<G: OrderedGame + ?Sized>(
    game: &G,
    samples: u64,
    seed: u64,
) -> Result<ValueVector> {
    nowak_radzik_mc_with(game, samples, seed, Exec::default())
}

pub fn nowak_radzik_mc_with<G: OrderedGame + ?Sized>(
    game: &G,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<ValueVector> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let n = game.units().len();
    let shards = samples.div_ceil(MC_SHARD_SIZE) as usize;
    let partial = par::map_range(exec, shards, |shard| -> Result<Vec<f64>> {
        let start = shard as u64 * MC_SHARD_SIZE;
        let count = MC_SHARD_SIZE.min(samples - start);
        let mut rng = seed::rng(seed::derive(seed, &[seed::stream::SHARD, shard as u64]));
        let mut order: Vec<usize> = (0..n).collect();
        let mut sums = vec![0.0; n];
        let empty = game.worth(&[])?;
        for _ in 0..count {
            order.shuffle(&mut rng);
            let mut prev = empty;
            for k in 0..n {
                let cur = game.worth(&order[..=k])?;
                sums[order[k]] += cur - prev;
                prev = cur;
            }
        }
        Ok(sums)
    });
    let mut totals = vec![0.0; n];
    for shard in partial {
        for (t, s) in totals.iter_mut().zip(shard?) {
            *t += s;
        }
    }
    Ok(ValueVector {
        units: game.units().clone(),
        values: totals.into_iter().map(|t| t / samples as f64).collect(),
        method: ValueMethod::NrMc,
        eval_target: game.eval_target().to_string(),
        sample_count: Some(samples),
    })
}
