//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tscl_coop::format::{table_from_json, AnyTable};
use tscl_coop::learners::{
    AnyLearner, ClassifierConfig, ClassifierLearner, EvalTarget, SipdConfig, SipdLearner,
    TableLearner,
};
use tscl_coop::prospect::{SimulationMode, SimulationPlan};
use tscl_coop::teacher::TeacherSpec;
use tscl_coop::UnitSet;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output subdirectory name.
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    pub learner: LearnerConfig,
    #[serde(default)]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub teach: Option<TeachConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LearnerConfig {
    Classifier(ClassifierConfig),
    Sipd(SipdConfig),
    /// Replays table files, one per evaluation target.
    Table {
        tables: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_mode")]
    pub mode: SimulationMode,
    pub budget: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Defaults to `"all"` plus every single unit.
    #[serde(default)]
    pub targets: Option<Vec<String>>,
}

fn default_mode() -> SimulationMode {
    SimulationMode::Unordered
}

fn default_replicates() -> usize {
    SimulationPlan::DEFAULT_REPLICATES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeachConfig {
    pub budget: usize,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    pub teachers: Vec<TeacherConfig>,
}

fn default_target() -> String {
    "all".to_string()
}

fn default_stride() -> usize {
    1
}

fn default_seeds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherConfig {
    /// Name used in file names and reports; defaults to the kind.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub kind: TeacherKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TeacherKind {
    /// Policy file written by the `curriculum` command.
    Curriculum { policy: PathBuf },
    #[serde(untagged)]
    Builtin(TeacherSpec),
}

impl TeacherConfig {
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.kind {
            TeacherKind::Curriculum { .. } => "curriculum".into(),
            TeacherKind::Builtin(spec) => match spec {
                TeacherSpec::BoltzmannBandit { .. } => "boltzmann-bandit",
                TeacherSpec::Exp3s { .. } => "exp3s",
                TeacherSpec::FixedPolicy { .. } => "fixed-policy",
                TeacherSpec::Uniform => "uniform",
            }
            .into(),
        }
    }
}

/// A parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: &Path, seed: Option<u64>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        if let Some(s) = seed {
            config.seed = s;
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let loaded = Loaded { config, base };
        loaded.validate()?;
        Ok(loaded)
    }

    /// SHA-256 of the canonical JSON form, seed override included.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.config).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.config;
        let mut errors = Vec::new();
        if c.experiment.is_empty()
            || !c
                .experiment
                .chars()
                .all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch))
            || c.experiment.starts_with('.')
        {
            errors.push(format!(
                "experiment: `{}` must be non-empty and use only letters, digits, `-`, `_` or `.`",
                c.experiment
            ));
        }
        let units = match self.units() {
            Ok(u) => Some(u),
            Err(e) => {
                errors.push(format!("learner: {e}"));
                None
            }
        };
        if let Some(units) = &units {
            if units.is_empty() {
                errors.push("learner: unit set is empty".into());
            }
            if let Some(sim) = &c.simulation {
                if let Err(e) = self
                    .plan(sim, units)
                    .and_then(|p| p.validate(units).map_err(|e| e.to_string()))
                {
                    errors.push(format!("simulation: {e}"));
                }
            }
            if let Some(t) = &c.teach {
                self.validate_teach(t, units, &mut errors);
            }
        }
        if c.simulation.is_none() && c.teach.is_none() {
            errors.push("config needs a [simulation] or a [teach] section".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errors.join("\n")))
        }
    }

    fn validate_teach(&self, t: &TeachConfig, units: &UnitSet, errors: &mut Vec<String>) {
        if t.budget == 0 {
            errors.push("teach.budget: must be positive".into());
        }
        if t.stride == 0 {
            errors.push("teach.stride: must be positive".into());
        }
        if t.seeds == 0 {
            errors.push("teach.seeds: must be positive".into());
        }
        if let Err(e) = EvalTarget::parse(units, &t.target) {
            errors.push(format!("teach.target: {e}"));
        }
        if t.teachers.is_empty() {
            errors.push("teach.teachers: at least one teacher is required".into());
        }
        let mut labels = Vec::new();
        for (i, teacher) in t.teachers.iter().enumerate() {
            let label = teacher.label();
            if label.is_empty()
                || !label
                    .chars()
                    .all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch))
            {
                errors.push(format!(
                    "teach.teachers[{i}].label: `{label}` is not a valid file-name label"
                ));
            }
            if labels.contains(&label) {
                errors.push(format!(
                    "teach.teachers[{i}].label: duplicate label `{label}`"
                ));
            }
            labels.push(label);
            if let TeacherKind::Builtin(spec) = &teacher.kind {
                if let Err(e) = spec.build(units.len()) {
                    errors.push(format!("teach.teachers[{i}]: {e}"));
                }
            }
        }
    }

    pub fn units(&self) -> Result<UnitSet, String> {
        match &self.config.learner {
            LearnerConfig::Classifier(cfg) => {
                cfg.validate().map_err(|e| e.to_string())?;
                UnitSet::new(cfg.classes.iter().map(|c| c.name.clone())).map_err(|e| e.to_string())
            }
            LearnerConfig::Sipd(cfg) => {
                cfg.validate().map_err(|e| e.to_string())?;
                UnitSet::new(cfg.opponents.iter().cloned()).map_err(|e| e.to_string())
            }
            LearnerConfig::Table { tables } => {
                let first = tables
                    .first()
                    .ok_or("tables: at least one table file is required")?;
                Ok(self.read_table(first)?.units().clone())
            }
        }
    }

    fn read_table(&self, path: &Path) -> Result<AnyTable, String> {
        let full = self.resolve(path);
        let text = std::fs::read_to_string(&full)
            .map_err(|e| format!("cannot read {}: {e}", full.display()))?;
        table_from_json(&text).map_err(|e| format!("{}: {e}", full.display()))
    }

    pub fn learner(&self) -> Result<AnyLearner, CliError> {
        let v = |e: String| CliError::Validation(format!("learner: {e}"));
        Ok(match &self.config.learner {
            LearnerConfig::Classifier(cfg) => AnyLearner::Classifier(
                ClassifierLearner::new(cfg.clone(), self.config.seed)
                    .map_err(|e| v(e.to_string()))?,
            ),
            LearnerConfig::Sipd(cfg) => {
                AnyLearner::Sipd(SipdLearner::new(cfg.clone()).map_err(|e| v(e.to_string()))?)
            }
            LearnerConfig::Table { tables } => {
                let loaded: Vec<AnyTable> = tables
                    .iter()
                    .map(|p| self.read_table(p))
                    .collect::<Result<_, _>>()
                    .map_err(v)?;
                let learner = if loaded.iter().all(|t| matches!(t, AnyTable::Ordered(_))) {
                    TableLearner::ordered(
                        loaded
                            .into_iter()
                            .filter_map(|t| match t {
                                AnyTable::Ordered(t) => Some(t),
                                _ => None,
                            })
                            .collect(),
                    )
                } else if loaded.iter().all(|t| matches!(t, AnyTable::Unordered(_))) {
                    TableLearner::unordered(
                        loaded
                            .into_iter()
                            .filter_map(|t| match t {
                                AnyTable::Unordered(t) => Some(t),
                                _ => None,
                            })
                            .collect(),
                    )
                } else {
                    return Err(v("tables mix ordered and unordered files".into()));
                };
                AnyLearner::Table(learner.map_err(|e| v(e.to_string()))?)
            }
        })
    }

    pub fn plan(&self, sim: &SimulationConfig, units: &UnitSet) -> Result<SimulationPlan, String> {
        let mut plan = SimulationPlan::standard(
            units,
            sim.mode,
            sim.budget,
            sim.replicates,
            self.config.seed,
        );
        if let Some(labels) = &sim.targets {
            plan.targets = labels
                .iter()
                .map(|l| EvalTarget::parse(units, l).map_err(|e| format!("targets: {e}")))
                .collect::<Result<_, _>>()?;
        }
        Ok(plan)
    }
}
