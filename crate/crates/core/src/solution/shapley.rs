use rand::seq::SliceRandom;

use super::{ValueMethod, ValueVector, MC_SHARD_SIZE};
use crate::error::{Error, Result};
use crate::game::{CharTable, Coalition, Game};
use crate::par::{self, Exec};
use crate::seed;

/// `weights[k] = k!(n−k−1)!/n!`, the probability that a given unit is
/// preceded by a specific set of `k` others in a uniform random order.
pub fn shapley_weights(n: usize) -> Vec<f64> {
    // k!(n-k-1)!/n! = 1 / (n * C(n-1, k))
    let mut out = Vec::with_capacity(n);
    let mut binom = 1.0f64;
    for k in 0..n {
        out.push(1.0 / (n as f64 * binom));
        binom = binom * (n - 1 - k) as f64 / (k + 1) as f64;
    }
    out
}

/// Shapley value of every unit in the subgame on `within`, read from the
/// parent's dense worth vector. Entries outside `within` are zero.
pub(crate) fn shapley_in_subgame(
    n: usize,
    worths: &[f64],
    within: Coalition,
    weights: &[f64],
) -> Vec<f64> {
    let mut phi = vec![0.0; n];
    for s in within.subsets() {
        if s == within {
            continue;
        }
        let base = worths[s.mask() as usize];
        let w = weights[s.len()];
        for j in within.members() {
            if !s.contains(j) {
                phi[j] += w * (worths[s.with(j).mask() as usize] - base);
            }
        }
    }
    phi
}

/// Exact Shapley value by enumeration of all coalitions.
pub fn shapley_exact(table: &CharTable) -> Result<ValueVector> {
    let worths = table.values()?;
    let n = table.n();
    let weights = shapley_weights(n);
    let values = shapley_in_subgame(n, &worths, Coalition::full(n), &weights);
    Ok(ValueVector {
        units: table.units().clone(),
        values,
        method: ValueMethod::ShapleyExact,
        eval_target: table.eval_target().to_string(),
        sample_count: None,
    })
}

/// Permutation-sampling estimate of the Shapley value.
pub fn shapley_mc<G: Game + ?Sized>(game: &G, samples: u64, seed: u64) -> Result<ValueVector> {
    shapley_mc_with(game, samples, seed, Exec::default())
}

pub fn shapley_mc_with<G: Game + ?Sized>(
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
        let empty = game.worth(Coalition::EMPTY)?;
        for _ in 0..count {
            order.shuffle(&mut rng);
            let mut prefix = Coalition::EMPTY;
            let mut prev = empty;
            for &u in &order {
                prefix = prefix.with(u);
                let cur = game.worth(prefix)?;
                sums[u] += cur - prev;
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
        method: ValueMethod::ShapleyMc,
        eval_target: game.eval_target().to_string(),
        sample_count: Some(samples),
    })
}
