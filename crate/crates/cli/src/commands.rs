use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tscl_coop::curriculum::{
    ordered_mechanism, stochastic_mechanism, Projection, RankDirection, TeacherPolicy,
};
use tscl_coop::format::{
    matrix_csv, ordered_table_to_json, runlog_to_jsonl, table_csv, table_from_json, table_to_json,
    values_csv, AnyTable, Stamped,
};
use tscl_coop::learners::{AnyLearner, EvalTarget, Learner};
use tscl_coop::par::{self, Exec};
use tscl_coop::prospect::{simulate_ordered, simulate_unordered, SimulationMode};
use tscl_coop::solution::{
    nowak_radzik, nowak_radzik_mc, shapley_exact, shapley_mc, vpop, vpop_ordered, MatrixMethod,
    NrVariant,
};
use tscl_coop::teacher::{gen_tscl_run, FixedPolicy, RunLog, RunOptions, ScheduleTeacher, Teacher};
use tscl_coop::{seed, InteractionMatrix, ValueMethod, ValueVector};

use crate::config::{ExperimentConfig, Loaded, TeacherConfig, TeacherKind};
use crate::error::{invalid, CliError};
use crate::output::{inherit, provenance, stamp_csv, Artifacts, Provenance};

/// Flags shared by every command.
#[derive(Debug, Clone)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub force: bool,
}

impl Globals {
    fn load(&self) -> Result<Loaded, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Validation("--config is required for this command".into()))?;
        Loaded::read(path, self.seed)
    }
}

/// Keeps file names to a portable character set.
pub fn file_label(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.+".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// Provenance of a derived artifact: inherited from the input's stamp, or
/// minted from the input bytes when it has none.
fn derived_provenance(
    meta: &BTreeMap<String, String>,
    path: &Path,
    text: &str,
    seed: Option<u64>,
) -> Provenance {
    inherit(meta).unwrap_or_else(|| {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let hash = hex::encode(Sha256::digest(text.as_bytes()));
        provenance(&file_label(&stem), &hash, seed.unwrap_or(0))
    })
}

fn master_seed(prov: &Provenance) -> u64 {
    prov.get(crate::output::MASTER_SEED)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn experiment(prov: &Provenance) -> &str {
    prov.get(crate::output::EXPERIMENT)
        .map_or("adhoc", String::as_str)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    command: String,
    config: ExperimentConfig,
    files: Vec<String>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

pub fn simulate(g: &Globals) -> Result<Vec<PathBuf>, CliError> {
    let loaded = g.load()?;
    let cfg = &loaded.config;
    let sim = cfg.simulation.as_ref().ok_or_else(|| {
        CliError::Validation("simulation: section is required by `simulate`".into())
    })?;
    let learner = loaded.learner()?;
    let units = learner.units().clone();
    let plan = loaded
        .plan(sim, &units)
        .map_err(|e| CliError::Validation(format!("simulation: {e}")))?;
    let prov = provenance(&cfg.experiment, &loaded.hash(), cfg.seed);
    let mut out = Artifacts::new(&g.out, &cfg.experiment);
    out.check(&["manifest.json".to_string()], g.force)?;

    let mut files = Vec::new();
    let mut add = |out: &mut Artifacts, name: String, body: String| {
        files.push(name.clone());
        out.add(name, body);
    };
    let stamp = |meta: &mut BTreeMap<String, String>| meta.extend(prov.clone());
    let family_meta = match sim.mode {
        SimulationMode::Unordered => {
            let mut family = simulate_unordered(&plan, &learner)?;
            for (k, t) in family.tables.iter_mut().enumerate() {
                stamp(t.meta_mut());
                let label = file_label(t.eval_target());
                add(&mut out, format!("table-{label}.json"), table_to_json(t)?);
                let any = AnyTable::Unordered(t.clone());
                add(
                    &mut out,
                    format!("table-{label}.csv"),
                    stamp_csv(&prov, &table_csv(&any)),
                );
                for (r, rep) in family.per_replicate.iter_mut().enumerate() {
                    stamp(rep[k].meta_mut());
                    add(
                        &mut out,
                        format!("table-{label}-rep{r}.json"),
                        table_to_json(&rep[k])?,
                    );
                }
            }
            family.meta
        }
        SimulationMode::Ordered => {
            let mut family = simulate_ordered(&plan, &learner)?;
            for (k, t) in family.tables.iter_mut().enumerate() {
                stamp(t.meta_mut());
                let label = file_label(t.eval_target());
                add(
                    &mut out,
                    format!("table-{label}.json"),
                    ordered_table_to_json(t)?,
                );
                let any = AnyTable::Ordered(t.clone());
                add(
                    &mut out,
                    format!("table-{label}.csv"),
                    stamp_csv(&prov, &table_csv(&any)),
                );
                for (r, rep) in family.per_replicate.iter_mut().enumerate() {
                    stamp(rep[k].meta_mut());
                    add(
                        &mut out,
                        format!("table-{label}-rep{r}.json"),
                        ordered_table_to_json(&rep[k])?,
                    );
                }
            }
            family.meta
        }
    };
    let manifest = Manifest {
        command: "simulate".into(),
        config: cfg.clone(),
        files,
        meta: family_meta,
    };
    out.add("manifest.json", Stamped::new(manifest, prov).to_json()?);
    out.commit(g.force)
}

fn load_table(path: &Path) -> Result<(AnyTable, String), CliError> {
    let text = read(path)?;
    let table = table_from_json(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let complete = match &table {
        AnyTable::Unordered(t) => t.require_complete(),
        AnyTable::Ordered(t) => t.require_complete(),
    };
    complete.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok((table, text))
}

pub fn values(
    g: &Globals,
    table_path: &Path,
    method: ValueMethod,
    samples: u64,
) -> Result<Vec<PathBuf>, CliError> {
    let (table, text) = load_table(table_path)?;
    let prov = derived_provenance(table.meta(), table_path, &text, g.seed);
    let mc_seed = g.seed.unwrap_or_else(|| master_seed(&prov));
    let values = match (&table, method) {
        (AnyTable::Unordered(t), ValueMethod::ShapleyExact) => shapley_exact(t)?,
        (AnyTable::Unordered(t), ValueMethod::ShapleyMc) => {
            shapley_mc(t, samples, mc_seed).map_err(invalid)?
        }
        (AnyTable::Ordered(t), ValueMethod::NrExact) => nowak_radzik(t, NrVariant::Prefix)?,
        (AnyTable::Ordered(t), ValueMethod::NrLiteral) => nowak_radzik(t, NrVariant::Literal)?,
        (AnyTable::Ordered(t), ValueMethod::NrMc) => {
            nowak_radzik_mc(t, samples, mc_seed).map_err(invalid)?
        }
        (t, m) => {
            let kind = if matches!(t, AnyTable::Ordered(_)) {
                "an ordered"
            } else {
                "an unordered"
            };
            return Err(CliError::Validation(format!(
                "method `{}` does not apply to {kind} table; use {}",
                m.as_str(),
                if m.is_ordered() {
                    "shapley-exact or shapley-mc"
                } else {
                    "nr-exact, nr-literal or nr-mc"
                }
            )));
        }
    };
    let stem = format!(
        "values-{}-{}",
        file_label(&values.eval_target),
        method.as_str()
    );
    let mut out = Artifacts::new(&g.out, experiment(&prov));
    out.add(
        format!("{stem}.csv"),
        stamp_csv(&prov, &values_csv(&values)),
    );
    out.add(
        format!("{stem}.json"),
        Stamped::new(values, prov).to_json()?,
    );
    out.commit(g.force)
}

pub fn interactions(
    g: &Globals,
    table_path: &Path,
    method: Option<MatrixMethod>,
) -> Result<Vec<PathBuf>, CliError> {
    let (table, text) = load_table(table_path)?;
    let prov = derived_provenance(table.meta(), table_path, &text, g.seed);
    let matrix: InteractionMatrix = match (&table, method) {
        (AnyTable::Unordered(t), None | Some(MatrixMethod::ShapleyVpop)) => vpop(t)?,
        (AnyTable::Ordered(t), None | Some(MatrixMethod::NrVpop)) => vpop_ordered(t)?,
        (_, Some(m)) => {
            return Err(CliError::Validation(format!(
                "method `{}` does not match the table's ordering",
                m.as_str()
            )))
        }
    };
    let stem = format!(
        "interactions-{}-{}",
        file_label(&matrix.eval_target),
        matrix.method.as_str()
    );
    let mut out = Artifacts::new(&g.out, experiment(&prov));
    out.add(
        format!("{stem}.csv"),
        stamp_csv(&prov, &matrix_csv(&matrix)),
    );
    out.add(
        format!("{stem}.json"),
        Stamped::new(matrix, prov).to_json()?,
    );
    out.commit(g.force)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    Boltzmann,
    Euclidean,
    Ordered,
}

impl Mechanism {
    fn as_str(self) -> &'static str {
        match self {
            Mechanism::Boltzmann => "boltzmann",
            Mechanism::Euclidean => "euclidean",
            Mechanism::Ordered => "ordered",
        }
    }
}

pub struct CurriculumArgs {
    pub mechanism: Mechanism,
    pub temperature: f64,
    pub budget: Option<usize>,
    pub ascending: bool,
}

pub fn curriculum(
    g: &Globals,
    values_path: &Path,
    args: &CurriculumArgs,
) -> Result<Vec<PathBuf>, CliError> {
    let text = read(values_path)?;
    let stamped = Stamped::<ValueVector>::from_json(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", values_path.display())))?;
    let prov = derived_provenance(&stamped.provenance, values_path, &text, g.seed);
    let values = stamped.body;
    let policy = match args.mechanism {
        Mechanism::Boltzmann => TeacherPolicy::FixedPolicy(
            stochastic_mechanism(
                &values,
                Projection::Boltzmann {
                    temperature: args.temperature,
                },
            )
            .map_err(invalid)?,
        ),
        Mechanism::Euclidean => TeacherPolicy::FixedPolicy(
            stochastic_mechanism(&values, Projection::Euclidean).map_err(invalid)?,
        ),
        Mechanism::Ordered => {
            let budget = args.budget.ok_or_else(|| {
                CliError::Validation("--budget is required by the ordered mechanism".into())
            })?;
            let dir = if args.ascending {
                RankDirection::Ascending
            } else {
                RankDirection::Descending
            };
            TeacherPolicy::OrderedSchedule(
                ordered_mechanism(&values, budget, dir).map_err(invalid)?,
            )
        }
    };
    let csv = match &policy {
        TeacherPolicy::FixedPolicy(p) => {
            let mut s = String::from("unit,probability\n");
            for (name, q) in p.units.names().iter().zip(&p.probabilities) {
                s.push_str(&format!("{name},{}\n", tscl_coop::format::fmt_sig(*q)));
            }
            s
        }
        TeacherPolicy::OrderedSchedule(s) => {
            let mut out = String::from("position,unit,count\n");
            for (i, step) in s.steps.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", i + 1, step.unit, step.count));
            }
            out
        }
    };
    let stem = format!(
        "curriculum-{}-{}-{}",
        file_label(&values.eval_target),
        values.method.as_str(),
        args.mechanism.as_str()
    );
    let mut out = Artifacts::new(&g.out, experiment(&prov));
    out.add(format!("{stem}.csv"), stamp_csv(&prov, &csv));
    out.add(
        format!("{stem}.json"),
        Stamped::new(policy, prov).to_json()?,
    );
    out.commit(g.force)
}

/// Teacher built fresh for each run.
enum TeacherSource {
    Spec(tscl_coop::teacher::TeacherSpec),
    Policy(TeacherPolicy),
}

impl TeacherSource {
    fn build(&self, n: usize) -> Result<Box<dyn Teacher>, tscl_coop::Error> {
        Ok(match self {
            TeacherSource::Spec(s) => s.build(n)?,
            TeacherSource::Policy(TeacherPolicy::FixedPolicy(p)) => {
                Box::new(FixedPolicy::from_curriculum(p)?)
            }
            TeacherSource::Policy(TeacherPolicy::OrderedSchedule(s)) => {
                Box::new(ScheduleTeacher::new(s)?)
            }
        })
    }
}

fn teacher_source(
    loaded: &Loaded,
    t: &TeacherConfig,
    learner: &AnyLearner,
) -> Result<TeacherSource, CliError> {
    match &t.kind {
        TeacherKind::Builtin(spec) => Ok(TeacherSource::Spec(spec.clone())),
        TeacherKind::Curriculum { policy } => {
            let path = loaded.resolve(policy);
            let stamped = Stamped::<TeacherPolicy>::from_json(&read(&path)?)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            if stamped.body.units() != learner.units() {
                return Err(CliError::Validation(format!(
                    "teacher `{}`: policy {} covers units {:?}, learner has {:?}",
                    t.label(),
                    path.display(),
                    stamped.body.units().names(),
                    learner.units().names()
                )));
            }
            Ok(TeacherSource::Policy(stamped.body))
        }
    }
}

pub fn teach(g: &Globals) -> Result<Vec<PathBuf>, CliError> {
    let loaded = g.load()?;
    let cfg = &loaded.config;
    let tc = cfg
        .teach
        .as_ref()
        .ok_or_else(|| CliError::Validation("teach: section is required by `teach`".into()))?;
    let learner = loaded.learner()?;
    let n = learner.units().len();
    let target = EvalTarget::parse(learner.units(), &tc.target)
        .map_err(|e| invalid(format!("teach.target: {e}")))?;
    let prov = provenance(&cfg.experiment, &loaded.hash(), cfg.seed);
    let sources: Vec<(String, TeacherSource)> = tc
        .teachers
        .iter()
        .map(|t| Ok((t.label(), teacher_source(&loaded, t, &learner)?)))
        .collect::<Result<_, CliError>>()?;

    let jobs: Vec<(usize, usize)> = (0..sources.len())
        .flat_map(|t| (0..tc.seeds).map(move |s| (t, s)))
        .collect();
    let names: Vec<String> = jobs
        .iter()
        .map(|&(t, s)| format!("runlog-{}-seed{s}.jsonl", sources[t].0))
        .collect();
    let mut out = Artifacts::new(&g.out, &cfg.experiment);
    out.check(&names, g.force)?;

    let runs = par::map_slice(
        Exec::Parallel,
        &jobs,
        |&(t, s)| -> Result<RunLog, tscl_coop::Error> {
            let (label, source) = &sources[t];
            let mut teacher = source.build(n)?;
            let budget = teacher.horizon().map_or(tc.budget, |h| h.min(tc.budget));
            let opts = RunOptions {
                budget,
                seed: seed::derive(cfg.seed, &[seed::stream::RUN, s as u64]),
                stride: tc.stride,
            };
            let mut l = learner.clone();
            let mut log = gen_tscl_run(&mut l, teacher.as_mut(), &target, opts)?;
            log.meta.extra.extend(prov.clone());
            log.meta.extra.insert("teacher_label".into(), label.clone());
            log.meta.extra.insert("seed_index".into(), s.to_string());
            if budget < tc.budget {
                log.meta
                    .extra
                    .insert("configured_budget".into(), tc.budget.to_string());
            }
            Ok(log)
        },
    );
    for (name, run) in names.into_iter().zip(runs) {
        let log = run.map_err(|e| CliError::Runtime(format!("{name}: {e}")))?;
        out.add(name, runlog_to_jsonl(&log)?);
    }
    out.commit(g.force)
}
