//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng as _;
use tscl_coop::curriculum::{euclidean_simplex_projection, ordered_mechanism, RankDirection};
use tscl_coop::learners::sipd::{tournament_nash, Payoffs, Strategy};
use tscl_coop::learners::{
    ClassifierConfig, ClassifierLearner, EvalTarget, SipdConfig, SipdLearner, TableLearner,
};
use tscl_coop::prospect::{simulate_ordered, simulate_unordered, SimulationMode, SimulationPlan};
use tscl_coop::solution::{
    nowak_radzik, nowak_radzik_mc, shapley_exact, shapley_mc, vpop, NrVariant,
};
use tscl_coop::teacher::{boltzmann_policy, gen_tscl_run, Exp3S, RunOptions, ScheduleTeacher};
use tscl_coop::{
    seed, CharTable, Coalition, Exec, OrderedCharTable, UnitSet, ValueMethod, ValueVector,
};

type Outcome = Result<Vec<String>, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn units(n: usize) -> UnitSet {
    UnitSet::new((0..n).map(|i| format!("u{i}"))).unwrap()
}

fn random_table(n: usize, rng: &mut seed::Rng) -> CharTable {
    CharTable::from_fn(units(n), "all", |_| rng.random::<f64>()).unwrap()
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, bound: Duration) -> Result<(), String> {
    check(elapsed < bound, || {
        format!("runtime {elapsed:.2?} exceeds {bound:?}")
    })
}

fn shapley_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(1);
    let mut worst = [0.0f64; 4];
    for _ in 0..200 {
        let t = random_table(5, &mut rng);
        let phi = shapley_exact(&t).unwrap().values;
        let full = Coalition::full(5);
        worst[0] = worst[0].max(
            (phi.iter().sum::<f64>()
                - (t.worth(full).unwrap() - t.worth(Coalition::EMPTY).unwrap()))
            .abs(),
        );

        let null = rng.random_range(0..5);
        let tn =
            CharTable::from_fn(units(5), "all", |c| t.worth(c.without(null)).unwrap()).unwrap();
        worst[1] = worst[1].max(shapley_exact(&tn).unwrap().values[null].abs());

        let swap = |c: Coalition| {
            let mut s = c.without(0).without(4);
            if c.contains(0) {
                s = s.with(4);
            }
            if c.contains(4) {
                s = s.with(0);
            }
            s
        };
        let ts = CharTable::from_fn(units(5), "all", |c| {
            t.worth(c).unwrap() + t.worth(swap(c)).unwrap()
        })
        .unwrap();
        let ps = shapley_exact(&ts).unwrap().values;
        worst[2] = worst[2].max((ps[0] - ps[4]).abs());

        let u = random_table(5, &mut rng);
        let a: f64 = rng.random_range(-2.0..2.0);
        let tl = CharTable::from_fn(units(5), "all", |c| {
            t.worth(c).unwrap() + a * u.worth(c).unwrap()
        })
        .unwrap();
        let pu = shapley_exact(&u).unwrap().values;
        let expected: Vec<f64> = phi.iter().zip(&pu).map(|(x, y)| x + a * y).collect();
        worst[3] = worst[3].max(max_dev(&shapley_exact(&tl).unwrap().values, &expected));
    }
    for (name, w) in ["efficiency", "null player", "symmetry", "linearity"]
        .iter()
        .zip(worst)
    {
        check(w < 1e-9, || format!("{name} off by {w:e}"))?;
    }
    let glove = CharTable::from_fn(UnitSet::new(["l", "r1", "r2"]).unwrap(), "all", |c| {
        if c.contains(0) && (c.contains(1) || c.contains(2)) {
            1.0
        } else {
            0.0
        }
    })
    .unwrap();
    let g = shapley_exact(&glove).unwrap().values;
    check(g == [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], || {
        format!("glove game gave {g:?}")
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(vec![
        format!(
            "max deviations: efficiency {:.1e}, null {:.1e}, symmetry {:.1e}, linearity {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
        format!("glove game {g:?}"),
    ])
}

fn ordered_consistency() -> Outcome {
    let mut rng = seed::rng(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = random_table(4, &mut rng);
        let ordered = OrderedCharTable::from_unordered(&t).unwrap();
        let nr = nowak_radzik(&ordered, NrVariant::Prefix).unwrap();
        worst = worst.max(max_dev(&nr.values, &shapley_exact(&t).unwrap().values));
    }
    check(worst < 1e-9, || {
        format!("prefix value differs from Shapley by {worst:e}")
    })?;
    let order = OrderedCharTable::from_fn(UnitSet::new(["a", "b"]).unwrap(), "all", |s| {
        if s == [0, 1] {
            1.0
        } else {
            0.0
        }
    })
    .unwrap();
    let phi = nowak_radzik(&order, NrVariant::Prefix).unwrap().values;
    check(phi == [0.0, 0.5], || format!("order game gave {phi:?}"))?;
    Ok(vec![format!(
        "max deviation {worst:.1e} over 50 tables; order game {phi:?}"
    )])
}

fn vpop_marginals() -> Outcome {
    let mut rng = seed::rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = random_table(5, &mut rng);
        worst = worst.max(max_dev(
            &vpop(&t).unwrap().row_sums(),
            &shapley_exact(&t).unwrap().values,
        ));
    }
    check(worst < 1e-9, || format!("row sums off by {worst:e}"))?;
    Ok(vec![format!(
        "max |row sum - Shapley| = {worst:.1e} over 100 tables"
    )])
}

fn monte_carlo() -> Outcome {
    let mut rng = seed::rng(4);
    let (mut ws, mut wn) = (0.0f64, 0.0f64);
    for k in 0..10u64 {
        let t = random_table(4, &mut rng);
        let mc = shapley_mc(&t, 100_000, k).unwrap();
        ws = ws.max(max_dev(&mc.values, &shapley_exact(&t).unwrap().values));
        check(mc == shapley_mc(&t, 100_000, k).unwrap(), || {
            "shapley_mc not reproducible".into()
        })?;

        let ot = OrderedCharTable::from_fn(units(4), "all", |_| rng.random::<f64>()).unwrap();
        let nmc = nowak_radzik_mc(&ot, 100_000, k).unwrap();
        wn = wn.max(max_dev(
            &nmc.values,
            &nowak_radzik(&ot, NrVariant::Prefix).unwrap().values,
        ));
        check(nmc == nowak_radzik_mc(&ot, 100_000, k).unwrap(), || {
            "nowak_radzik_mc not reproducible".into()
        })?;
    }
    check(ws < 0.01 && wn < 0.01, || {
        format!("max deviation shapley {ws}, nr {wn}")
    })?;
    Ok(vec![format!(
        "max deviation at 1e5 samples: shapley {ws:.4}, nowak-radzik {wn:.4} (10 tables each)"
    )])
}

fn full_pipeline() -> Outcome {
    let start = Instant::now();
    let u = units(4);
    let mut rng = seed::rng(5);
    let targets = EvalTarget::standard(&u);
    let truth: Vec<CharTable> = targets
        .iter()
        .map(|t| CharTable::from_fn(u.clone(), t.label.clone(), |_| rng.random::<f64>()).unwrap())
        .collect();
    let plan = SimulationPlan::standard(&u, SimulationMode::Unordered, 200, 2, 5);
    let family =
        simulate_unordered(&plan, &TableLearner::unordered(truth.clone()).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for t in &truth {
        let sim = family.table(t.eval_target()).unwrap();
        for (c, w) in t.iter() {
            check(sim.worth(c).unwrap() == w.value, || {
                format!("unordered entry {c:?} differs")
            })?;
        }
        worst = worst.max(max_dev(
            &shapley_exact(sim).unwrap().values,
            &shapley_exact(t).unwrap().values,
        ));
    }
    let otruth: Vec<OrderedCharTable> = targets
        .iter()
        .map(|t| {
            OrderedCharTable::from_fn(u.clone(), t.label.clone(), |_| rng.random::<f64>()).unwrap()
        })
        .collect();
    let plan = SimulationPlan::standard(&u, SimulationMode::Ordered, 200, 2, 5);
    let family = simulate_ordered(&plan, &TableLearner::ordered(otruth.clone()).unwrap()).unwrap();
    for t in &otruth {
        let sim = family.table(t.eval_target()).unwrap();
        for (oc, w) in t.iter() {
            check(sim.worth(&oc.indices()).unwrap() == w.value, || {
                format!("ordered entry {oc:?} differs")
            })?;
        }
        let a = nowak_radzik(sim, NrVariant::Prefix).unwrap().values;
        worst = worst.max(max_dev(
            &a,
            &nowak_radzik(t, NrVariant::Prefix).unwrap().values,
        ));
    }
    check(worst < 1e-9, || format!("values differ by {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(vec![format!(
        "tables reproduced exactly; value deviation {worst:.1e}; {:.2?}",
        start.elapsed()
    )])
}

fn classifier_analog() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let (mut seeds_a, mut seeds_b) = (0, 0);
    for master in 0..5u64 {
        let learner = ClassifierLearner::new(ClassifierConfig::default(), master).unwrap();
        let u = tscl_coop::learners::Learner::units(&learner).clone();
        let plan = SimulationPlan::standard(&u, SimulationMode::Unordered, 500, 5, master);
        let family = simulate_unordered(&plan, &learner).unwrap();
        let hits = (0..u.len())
            .filter(|&k| {
                shapley_exact(family.table(u.name(k)).unwrap())
                    .unwrap()
                    .ranking()[0]
                    == k
            })
            .count();
        let m = vpop(family.table("all").unwrap()).unwrap();
        let (i, j, v) = m.most_negative_off_diagonal().unwrap();
        let pair_ok = (i.min(j), i.max(j)) == (0, 1);
        seeds_a += usize::from(hits >= 3);
        seeds_b += usize::from(pair_ok);
        lines.push(format!(
            "seed {master}: matching class largest in {hits}/4 targets; most negative vPoP ({}, {}) = {v:.4}",
            u.name(i),
            u.name(j)
        ));
    }
    check(seeds_a == 5, || {
        format!("matching-class pattern held in only {seeds_a}/5 seeds")
    })?;
    check(seeds_b >= 4, || {
        format!("confused pair most negative in only {seeds_b}/5 seeds")
    })?;
    within(start.elapsed(), Duration::from_secs(15 * 60))?;
    lines.push(format!(
        "(a) {seeds_a}/5 seeds with >= 3/4 targets; (b) {seeds_b}/5 seeds; {:.2?}",
        start.elapsed()
    ));
    Ok(lines)
}

fn sipd_desk() -> Outcome {
    let start = Instant::now();
    let master = 0;
    let cfg = SipdConfig {
        opponents: ["AlwaysDefect", "TitForTat", "AlwaysCooperate"]
            .map(String::from)
            .to_vec(),
        ..SipdConfig::default()
    };
    let learner = SipdLearner::new(cfg).unwrap();
    let u = tscl_coop::learners::Learner::units(&learner).clone();
    let plan = SimulationPlan::standard(&u, SimulationMode::Ordered, 600, 3, master);
    let family = simulate_ordered(&plan, &learner).unwrap();
    let (tft, allc) = (
        u.index("TitForTat").unwrap(),
        u.index("AlwaysCooperate").unwrap(),
    );
    let mut lines = Vec::new();
    let mut families = 0;
    for (r, rep) in family.per_replicate.iter().enumerate() {
        let t = rep
            .iter()
            .find(|t| t.eval_target() == "AlwaysDefect")
            .unwrap();
        let nr = nowak_radzik(t, NrVariant::Prefix).unwrap().values;
        families += usize::from(nr[tft] >= nr[allc]);
        lines.push(format!("replicate {r}: NR for AlwaysDefect target {nr:?}"));
    }
    let values: ValueVector =
        nowak_radzik(family.table("all").unwrap(), NrVariant::Prefix).unwrap();
    let schedule = ordered_mechanism(&values, 600, RankDirection::Descending).unwrap();
    let all = EvalTarget::all(&u);
    let (mut sched, mut exp3) = (0.0, 0.0);
    for s in 0..5u64 {
        let run_seed = seed::derive(master, &[seed::stream::RUN, s]);
        let mut l = learner.clone();
        let mut t = ScheduleTeacher::new(&schedule).unwrap();
        sched += gen_tscl_run(
            &mut l,
            &mut t,
            &all,
            RunOptions::new(schedule.total(), run_seed),
        )
        .unwrap()
        .final_metric()
            / 5.0;
        let mut l = learner.clone();
        let mut t = Exp3S::with_defaults(u.len()).unwrap();
        exp3 += gen_tscl_run(&mut l, &mut t, &all, RunOptions::new(600, run_seed))
            .unwrap()
            .final_metric()
            / 5.0;
    }
    let steps: Vec<String> = schedule
        .steps
        .iter()
        .map(|s| format!("{}x{}", s.unit, s.count))
        .collect();
    lines.push(format!(
        "schedule [{}]; final evaluate(all): nowak-ordered {sched:.4} vs exp3s {exp3:.4}",
        steps.join(", ")
    ));
    check(families >= 2, || {
        format!("TitForTat >= AlwaysCooperate in only {families}/3 replicate families")
    })?;
    check(sched >= exp3, || {
        format!("schedule {sched} below exp3s {exp3}")
    })?;
    within(start.elapsed(), Duration::from_secs(30 * 60))?;
    lines.push(format!(
        "TitForTat >= AlwaysCooperate in {families}/3 families; {:.2?}",
        start.elapsed()
    ));
    Ok(lines)
}

fn empirical_nash() -> Outcome {
    let start = Instant::now();
    let t = tournament_nash(
        &Strategy::ZOO,
        &Payoffs::default(),
        200,
        200,
        8,
        Exec::Parallel,
    )
    .unwrap();
    let nash: Vec<&str> = t.pure_nash.iter().map(|&i| t.names[i].as_str()).collect();
    check(nash.contains(&"AlwaysDefect"), || {
        format!("pure Nash set {nash:?}")
    })?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(vec![format!(
        "pure Nash set {nash:?}; {:.2?}",
        start.elapsed()
    )])
}

/// Nearest simplex point over all supports, by direct enumeration.
fn projection_oracle(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let theta = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut p = vec![0.0; n];
        for &i in &support {
            p[i] = v[i] - theta;
        }
        if p.iter().any(|&x| x < 0.0) {
            continue;
        }
        let d: f64 = v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, p));
        }
    }
    best.unwrap().1
}

fn nr_vector(names: &[&str], values: Vec<f64>) -> ValueVector {
    ValueVector {
        units: UnitSet::new(names.iter().copied()).unwrap(),
        values,
        method: ValueMethod::NrExact,
        eval_target: "all".into(),
        sample_count: None,
    }
}

fn projections() -> Outcome {
    let mut rng = seed::rng(9);
    let mut worst = 0.0f64;
    let mut shift_worst = 0.0f64;
    for _ in 0..1000 {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        worst = worst.max(max_dev(
            &euclidean_simplex_projection(&v).unwrap(),
            &projection_oracle(&v),
        ));
        let shift: f64 = rng.random_range(-100.0..100.0);
        let temp: f64 = rng.random_range(0.05..5.0);
        let moved: Vec<f64> = v.iter().map(|x| x + shift).collect();
        shift_worst = shift_worst.max(max_dev(
            &boltzmann_policy(&v, temp).unwrap(),
            &boltzmann_policy(&moved, temp).unwrap(),
        ));
    }
    check(worst < 1e-6, || {
        format!("projection off oracle by {worst:e}")
    })?;
    check(shift_worst < 1e-12, || {
        format!("boltzmann shift changes policy by {shift_worst:e}")
    })?;

    let p = euclidean_simplex_projection(&[0.9, -0.5, 0.1]).unwrap();
    check(
        p == projection_oracle(&[0.9, -0.5, 0.1]) && p[1] == 0.0,
        || format!("(0.9, -0.5, 0.1) -> {p:?}"),
    )?;

    let tau = projection_oracle(&[0.423, -0.1]);
    let s = ordered_mechanism(
        &nr_vector(&["u1", "u2"], vec![0.423, -0.1]),
        100,
        RankDirection::Descending,
    )
    .unwrap();
    let got: Vec<(String, usize)> = s.steps.iter().map(|x| (x.unit.clone(), x.count)).collect();
    let want = vec![
        ("u1".to_string(), (tau[0] * 100.0 + 1e-9) as usize),
        ("u2".to_string(), (tau[1] * 100.0 + 1e-9) as usize),
    ];
    check(got == want, || {
        format!("(0.423, -0.1) schedule {got:?}, oracle {want:?}")
    })?;

    let tau = projection_oracle(&[0.041, 0.107]);
    let s = ordered_mechanism(
        &nr_vector(&["TwoRooms", "FourRooms"], vec![0.041, 0.107]),
        1000,
        RankDirection::Descending,
    )
    .unwrap();
    let rooms: Vec<(String, usize)> = s.steps.iter().map(|x| (x.unit.clone(), x.count)).collect();
    let want = vec![
        ("FourRooms".to_string(), (tau[1] * 1000.0 + 1e-9) as usize),
        ("TwoRooms".to_string(), (tau[0] * 1000.0 + 1e-9) as usize),
    ];
    check(rooms == want, || {
        format!("rooms schedule {rooms:?}, oracle {want:?}")
    })?;
    Ok(vec![
        format!("oracle deviation {worst:.1e} on 1000 vectors; boltzmann shift deviation {shift_worst:.1e}"),
        format!("examples: (0.9,-0.5,0.1) -> {p:?}; (0.423,-0.1) K=100 -> {got:?}; rooms K=1000 -> {rooms:?}"),
    ])
}

const GLOVE: &str = r#"{"units": ["left", "right1", "right2"], "ordered": false, "eval_target": "all", "entries": [
  {"coalition": [], "value": 0.0}, {"coalition": ["left"], "value": 0.0},
  {"coalition": ["right1"], "value": 0.0}, {"coalition": ["right2"], "value": 0.0},
  {"coalition": ["left", "right1"], "value": 1.0}, {"coalition": ["left", "right2"], "value": 1.0},
  {"coalition": ["right1", "right2"], "value": 0.0}, {"coalition": ["left", "right1", "right2"], "value": 1.0}]}"#;

const GLOVE_CONFIG: &str = r#"
experiment = "glove"
seed = 3
[learner]
kind = "table"
tables = ["glove.json"]
[simulation]
budget = 9
replicates = 2
targets = ["all"]
"#;

const CLASSIFIER: &str = r#"
experiment = "clf"
seed = 11
[learner]
kind = "classifier"
train_pool = 128
eval_pool = 128
[simulation]
budget = 40
replicates = 2
[teach]
budget = 40
seeds = 3
[[teach.teachers]]
kind = "exp3s"
[[teach.teachers]]
kind = "boltzmann-bandit"
[[teach.teachers]]
kind = "curriculum"
label = "euclidean"
policy = "out/clf/curriculum-all-shapley-exact-euclidean.json"
"#;

const SIPD: &str = r#"
experiment = "sipd"
seed = 5
[learner]
kind = "sipd"
opponents = ["AlwaysDefect", "TitForTat", "ZeroDeterminant"]
eval_matches = 4
[simulation]
mode = "ordered"
budget = 30
replicates = 2
[teach]
budget = 30
seeds = 2
[[teach.teachers]]
kind = "exp3s"
[[teach.teachers]]
kind = "curriculum"
label = "ordered"
policy = "out/sipd/curriculum-all-nr-exact-ordered.json"
"#;

/// Every command, in dependency order, writing under `out/`.
fn cli_session(dir: &Path, rerun: bool) -> Result<(), String> {
    let force: &[&str] = if rerun { &["--force"] } else { &[] };
    let steps: &[&[&str]] = &[
        &["--config", "glove.toml", "simulate"],
        &[
            "values",
            "--table",
            "out/glove/table-all.json",
            "--method",
            "shapley-exact",
        ],
        &[
            "values",
            "--table",
            "out/glove/table-all.json",
            "--method",
            "shapley-mc",
            "--samples",
            "5000",
        ],
        &["interactions", "--table", "out/glove/table-all.json"],
        &["--config", "clf.toml", "simulate"],
        &[
            "values",
            "--table",
            "out/clf/table-all.json",
            "--method",
            "shapley-exact",
        ],
        &["interactions", "--table", "out/clf/table-all.json"],
        &[
            "curriculum",
            "--values",
            "out/clf/values-all-shapley-exact.json",
            "--mechanism",
            "euclidean",
        ],
        &[
            "curriculum",
            "--values",
            "out/clf/values-all-shapley-exact.json",
            "--mechanism",
            "boltzmann",
            "--temperature",
            "0.1",
        ],
        &["--config", "clf.toml", "teach"],
        &["report", "out/clf"],
        &["--config", "sipd.toml", "simulate"],
        &[
            "values",
            "--table",
            "out/sipd/table-all.json",
            "--method",
            "nr-exact",
        ],
        &[
            "values",
            "--table",
            "out/sipd/table-all.json",
            "--method",
            "nr-literal",
        ],
        &[
            "values",
            "--table",
            "out/sipd/table-all.json",
            "--method",
            "nr-mc",
            "--samples",
            "5000",
        ],
        &["interactions", "--table", "out/sipd/table-all.json"],
        &[
            "curriculum",
            "--values",
            "out/sipd/values-all-nr-exact.json",
            "--mechanism",
            "ordered",
            "--budget",
            "30",
        ],
        &["--config", "sipd.toml", "teach"],
        &["report", "out/sipd"],
    ];
    for args in steps {
        let out = Command::new(env!("CARGO_BIN_EXE_tscl-coop"))
            .current_dir(dir)
            .args(force.iter().chain(args.iter()))
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "{args:?} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    Ok(())
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, body) in [
        ("glove.json", GLOVE),
        ("glove.toml", GLOVE_CONFIG),
        ("clf.toml", CLASSIFIER),
        ("sipd.toml", SIPD),
    ] {
        std::fs::write(dir.path().join(name), body).map_err(|e| e.to_string())?;
    }
    cli_session(dir.path(), false)?;
    let first = snapshot(&dir.path().join("out"));
    cli_session(dir.path(), true)?;
    let second = snapshot(&dir.path().join("out"));
    let names: Vec<&String> = first.iter().map(|(n, _)| n).collect();
    check(first.len() == second.len(), || {
        "rerun produced a different file set".into()
    })?;
    for ((n1, b1), (n2, b2)) in first.iter().zip(&second) {
        check(n1 == n2 && b1 == b2, || {
            format!("{n1} differs between runs")
        })?;
    }
    Ok(vec![format!(
        "{} files byte-identical across reruns of 19 commands",
        names.len()
    )])
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Shapley axiom suite", shapley_axioms),
        ("ordered/unordered consistency", ordered_consistency),
        ("vPoP marginal property", vpop_marginals),
        ("Monte-Carlo convergence", monte_carlo),
        ("full-pipeline oracle", full_pipeline),
        ("synthetic classifier analog", classifier_analog),
        ("A-SIPD desk scale", sipd_desk),
        ("empirical Nash", empirical_nash),
        ("projection correctness", projections),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(details) => {
                println!("PASS criterion {}: {name} ({took:.2?})", i + 1);
                details.iter().for_each(|d| println!("     {d}"));
            }
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
