use proptest::prelude::*;
use tscl_coop::format::{
    runlog_from_jsonl, runlog_to_jsonl, table_from_json, table_to_json, AnyTable,
};
use tscl_coop::learners::{EvalTarget, Learner, TableLearner};
use tscl_coop::prospect::{
    simulate_ordered_with, simulate_unordered_with, SimulationMode, SimulationPlan,
};
use tscl_coop::solution::{nowak_radzik, shapley_exact, vpop, NrVariant};
use tscl_coop::teacher::{gen_tscl_run, Exp3S, FixedPolicy, RunOptions};
use tscl_coop::{CharTable, Exec, OrderedCharTable, UnitSet};

fn units() -> UnitSet {
    UnitSet::new(["a", "b", "c", "d"]).unwrap()
}

fn backing(target: &str, salt: f64) -> CharTable {
    CharTable::from_fn(units(), target, |c| {
        c.members().map(|i| (i as f64 + salt).sin()).sum::<f64>() + 0.1 * (c.len() * c.len()) as f64
    })
    .unwrap()
}

fn ordered_backing(target: &str, salt: f64) -> OrderedCharTable {
    OrderedCharTable::from_fn(units(), target, |seq| {
        seq.iter()
            .enumerate()
            .map(|(pos, &i)| (i as f64 * salt + pos as f64).cos())
            .sum()
    })
    .unwrap()
}

fn tables() -> Vec<CharTable> {
    EvalTarget::standard(&units())
        .iter()
        .enumerate()
        .map(|(k, t)| backing(&t.label, k as f64))
        .collect()
}

#[test]
fn unordered_simulation_reproduces_backing_tables() {
    let truth = tables();
    let learner = TableLearner::unordered(truth.clone()).unwrap();
    let plan = SimulationPlan::standard(&units(), SimulationMode::Unordered, 200, 3, 11);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let family = simulate_unordered_with(&plan, &learner, exec).unwrap();
        for t in &truth {
            let sim = family.table(t.eval_target()).unwrap();
            for (c, w) in t.iter() {
                assert_eq!(
                    sim.worth(c).unwrap(),
                    w.value,
                    "{} {:?}",
                    t.eval_target(),
                    c
                );
                assert_eq!(sim.get(c).unwrap().std, Some(0.0));
            }
            let direct = shapley_exact(t).unwrap();
            let via = shapley_exact(sim).unwrap();
            for (x, y) in direct.values.iter().zip(&via.values) {
                assert!((x - y).abs() < 1e-9);
            }
            let (m1, m2) = (vpop(t).unwrap(), vpop(sim).unwrap());
            for (r1, r2) in m1.values.iter().zip(&m2.values) {
                for (x, y) in r1.iter().zip(r2) {
                    assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn ordered_simulation_reproduces_backing_tables() {
    let truth: Vec<OrderedCharTable> = EvalTarget::standard(&units())
        .iter()
        .enumerate()
        .map(|(k, t)| ordered_backing(&t.label, k as f64 + 0.5))
        .collect();
    let learner = TableLearner::ordered(truth.clone()).unwrap();
    let plan = SimulationPlan::standard(&units(), SimulationMode::Ordered, 200, 2, 5);
    let family = simulate_ordered_with(&plan, &learner, Exec::Parallel).unwrap();
    for t in &truth {
        let sim = family.table(t.eval_target()).unwrap();
        for (oc, w) in t.iter() {
            assert_eq!(sim.worth(&oc.indices()).unwrap(), w.value);
        }
        let direct = nowak_radzik(t, NrVariant::Prefix).unwrap();
        let via = nowak_radzik(sim, NrVariant::Prefix).unwrap();
        for (x, y) in direct.values.iter().zip(&via.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn simulated_tables_survive_json() {
    let learner = TableLearner::unordered(tables()).unwrap();
    let plan = SimulationPlan::standard(&units(), SimulationMode::Unordered, 40, 2, 3);
    let family = simulate_unordered_with(&plan, &learner, Exec::Sequential).unwrap();
    for t in &family.tables {
        match table_from_json(&table_to_json(t).unwrap()).unwrap() {
            AnyTable::Unordered(back) => assert_eq!(&back, t),
            AnyTable::Ordered(_) => panic!("ordered flag flipped"),
        }
    }
}

#[test]
fn uniform_teacher_rewards_are_table_marginals() {
    let truth = tables();
    let mut learner = TableLearner::unordered(truth.clone()).unwrap();
    let target = EvalTarget::all(&units());
    let mut teacher = FixedPolicy::uniform(4).unwrap();
    let log = gen_tscl_run(&mut learner, &mut teacher, &target, RunOptions::new(60, 8)).unwrap();
    let all = &truth[0];
    let mut seen = tscl_coop::Coalition::EMPTY;
    for r in &log.records {
        let i = units().index(&r.unit).unwrap();
        let before = all.worth(seen).unwrap();
        seen = seen.with(i);
        assert_eq!(r.reward, all.worth(seen).unwrap() - before);
    }
    assert_eq!(log.final_metric(), all.worth(seen).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewards_telescope(seed in any::<u64>(), budget in 1usize..120, stride in 1usize..9) {
        let mut learner = TableLearner::unordered(tables()).unwrap();
        let mut teacher = Exp3S::with_defaults(4).unwrap();
        let opts = RunOptions { budget, seed, stride };
        let target = EvalTarget::all(&units());
        let log = gen_tscl_run(&mut learner, &mut teacher, &target, opts).unwrap();
        prop_assert_eq!(log.records.len(), budget);
        let gap = log.final_metric() - log.meta.initial_metric;
        prop_assert!((log.total_reward() - gap).abs() < 1e-9);
        prop_assert!(log.records.last().unwrap().evaluated);
        // stride-carried metrics are never stale at the end
        prop_assert_eq!(log.final_metric(), learner.evaluate(&target).unwrap());
    }

    #[test]
    fn runlog_round_trips(seed in any::<u64>(), budget in 1usize..40) {
        let mut learner = TableLearner::unordered(tables()).unwrap();
        let mut teacher = Exp3S::with_defaults(4).unwrap();
        let target = EvalTarget::parse(&units(), "b").unwrap();
        let log = gen_tscl_run(&mut learner, &mut teacher, &target, RunOptions::new(budget, seed)).unwrap();
        let text = runlog_to_jsonl(&log).unwrap();
        prop_assert_eq!(text.lines().count(), budget + 1);
        prop_assert_eq!(runlog_from_jsonl(&text).unwrap(), log);
    }
}
