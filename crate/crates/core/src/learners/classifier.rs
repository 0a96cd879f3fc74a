//! Linear softmax classifier over 2-D Gaussian classes. Each class is a unit;
//! presenting a class takes one gradient step on a batch drawn from it.

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{check_unit, EvalTarget, Learner};
use crate::error::{Error, Result};
use crate::game::UnitSet;
use crate::seed::{self, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    pub mean: [f64; 2],
    /// Symmetric positive-definite covariance.
    pub cov: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub classes: Vec<ClassSpec>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub train_pool: usize,
    pub eval_pool: usize,
    /// Evaluate on only the first `n` held-out points of each class.
    pub eval_subsample: Option<usize>,
}

impl Default for ClassifierConfig {
    /// Four classes; `c0` and `c1` overlap heavily, the others are well apart.
    fn default() -> Self {
        let iso = |s: f64| [[s, 0.0], [0.0, s]];
        let class = |name: &str, mean: [f64; 2]| ClassSpec {
            name: name.to_string(),
            mean,
            cov: iso(0.5),
        };
        ClassifierConfig {
            classes: vec![
                class("c0", [2.0, 0.0]),
                class("c1", [2.0, 0.3]),
                class("c2", [-2.0, 0.0]),
                class("c3", [0.0, -2.5]),
            ],
            learning_rate: 0.05,
            batch_size: 16,
            train_pool: 512,
            eval_pool: 512,
            eval_subsample: None,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.classes.len() < 2 {
            return bad("classifier needs at least two classes".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!(
                "learning_rate must be finite and >= 0, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 || self.train_pool == 0 || self.eval_pool == 0 {
            return bad("batch_size, train_pool and eval_pool must be positive".into());
        }
        if self.eval_subsample == Some(0) {
            return bad("eval_subsample must be positive".into());
        }
        for c in &self.classes {
            cholesky(&c.cov).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "covariance of class `{}` is not positive definite",
                    c.name
                ))
            })?;
        }
        Ok(())
    }
}

fn cholesky(cov: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let [[a, b], [c, d]] = *cov;
    if (b - c).abs() > 1e-12 || a <= 0.0 {
        return None;
    }
    let l00 = a.sqrt();
    let l10 = b / l00;
    let rem = d - l10 * l10;
    if rem <= 0.0 {
        return None;
    }
    Some([[l00, 0.0], [l10, rem.sqrt()]])
}

fn sample_class(spec: &ClassSpec, count: usize, rng: &mut Rng) -> Vec<[f64; 2]> {
    let l = cholesky(&spec.cov).expect("validated covariance");
    (0..count)
        .map(|_| {
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            [
                spec.mean[0] + l[0][0] * z0,
                spec.mean[1] + l[1][0] * z0 + l[1][1] * z1,
            ]
        })
        .collect()
}

#[derive(Debug)]
struct Data {
    train: Vec<Vec<[f64; 2]>>,
    eval: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone)]
pub struct ClassifierLearner {
    config: ClassifierConfig,
    units: UnitSet,
    data: Arc<Data>,
    /// Row `k` is `[w_k0, w_k1, b_k]`.
    theta: Vec<[f64; 3]>,
    rng: Rng,
}

impl ClassifierLearner {
    /// Draws the train and held-out pools from `data_seed`; they stay fixed
    /// across `reset` calls.
    pub fn new(config: ClassifierConfig, data_seed: u64) -> Result<Self> {
        config.validate()?;
        let units = UnitSet::new(config.classes.iter().map(|c| c.name.clone()))?;
        let pool = |which: u64, size: usize| -> Vec<Vec<[f64; 2]>> {
            config
                .classes
                .iter()
                .enumerate()
                .map(|(k, spec)| {
                    let mut rng = seed::rng(seed::derive(data_seed, &[which, k as u64]));
                    sample_class(spec, size, &mut rng)
                })
                .collect()
        };
        let data = Data {
            train: pool(0, config.train_pool),
            eval: pool(1, config.eval_pool),
        };
        let m = config.classes.len();
        Ok(ClassifierLearner {
            config,
            units,
            data: Arc::new(data),
            theta: vec![[0.0; 3]; m],
            rng: seed::rng(0),
        })
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    fn logits(&self, x: &[f64; 2]) -> Vec<f64> {
        self.theta
            .iter()
            .map(|t| t[0] * x[0] + t[1] * x[1] + t[2])
            .collect()
    }

    /// Credit for predicting `x`, split evenly among tied top classes.
    fn prediction(&self, x: &[f64; 2]) -> Vec<f64> {
        let z = self.logits(x);
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties = z.iter().filter(|&&v| v == top).count() as f64;
        z.iter()
            .map(|&v| if v == top { 1.0 / ties } else { 0.0 })
            .collect()
    }

    fn eval_points(&self, class: usize) -> &[[f64; 2]] {
        let pool = &self.data.eval[class];
        match self.config.eval_subsample {
            Some(s) => &pool[..s.min(pool.len())],
            None => pool,
        }
    }

    /// Row-normalized confusion matrix on the held-out pool: entry `(i, j)`
    /// is the fraction of class `i` predicted as `j`.
    pub fn confusion_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.units.len())
            .map(|i| {
                let points = self.eval_points(i);
                let mut row = vec![0.0; self.units.len()];
                for x in points {
                    for (r, p) in row.iter_mut().zip(self.prediction(x)) {
                        *r += p;
                    }
                }
                row.iter().map(|r| r / points.len() as f64).collect()
            })
            .collect()
    }
}

impl Learner for ClassifierLearner {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn id(&self) -> String {
        format!("classifier-{}", self.units.len())
    }

    fn reset(&mut self, seed: u64) {
        self.theta.iter_mut().for_each(|t| *t = [0.0; 3]);
        self.rng = seed::rng(seed::derive(seed, &[seed::stream::LEARNER]));
    }

    fn present(&mut self, unit: usize) -> Result<()> {
        check_unit(&self.units, unit)?;
        let m = self.units.len();
        let b = self.config.batch_size;
        let pool = &self.data.train[unit];
        let mut grad = vec![[0.0; 3]; m];
        for _ in 0..b {
            let x = pool[self.rng.random_range(0..pool.len())];
            let z = self.logits(&x);
            let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exp: Vec<f64> = z.iter().map(|v| (v - top).exp()).collect();
            let total: f64 = exp.iter().sum();
            for (k, g) in grad.iter_mut().enumerate() {
                let err = exp[k] / total - if k == unit { 1.0 } else { 0.0 };
                g[0] += err * x[0];
                g[1] += err * x[1];
                g[2] += err;
            }
        }
        let step = self.config.learning_rate / b as f64;
        for (t, g) in self.theta.iter_mut().zip(&grad) {
            for d in 0..3 {
                t[d] -= step * g[d];
            }
        }
        Ok(())
    }

    /// Held-out accuracy over the classes in the target.
    fn evaluate(&self, target: &EvalTarget) -> Result<f64> {
        if target.members.is_empty() {
            return Err(Error::InvalidArgument("empty evaluation target".into()));
        }
        let mut correct = 0.0;
        let mut total = 0usize;
        for class in target.members.members() {
            check_unit(&self.units, class)?;
            for x in self.eval_points(class) {
                correct += self.prediction(x)[class];
                total += 1;
            }
        }
        Ok(correct / total as f64)
    }

    fn metric_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn granularity(&self) -> &'static str {
        "gradient-step"
    }

    fn steps_per_presentation(&self) -> u64 {
        1
    }
}
