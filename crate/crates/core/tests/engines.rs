use ivme_core::oracle::{brute_force_count, QuerySpec};
use ivme_core::{
    static_count, EnumState, Engine, EpsConfig, LwState, Path4State, RefinedState, Relation, SelfJoinState,
    TriangleState, Value,
};
use proptest::prelude::*;

type Update = (usize, Vec<Value>, i64);

fn arb_stream(arities: Vec<usize>, dom: Value, len: usize) -> impl Strategy<Value = Vec<Update>> {
    let rels = arities.len();
    prop::collection::vec(
        (0..rels, prop::collection::vec(0..dom, 3), prop::sample::select(vec![-2i64, -1, 1, 2])),
        1..len,
    )
    .prop_map(move |v| v.into_iter().map(|(r, t, m)| (r, t[..arities[r]].to_vec(), m)).collect())
}

fn run_checked<E: Engine>(mut eng: E, spec: QuerySpec, stream: &[Update]) -> Result<(), TestCaseError> {
    let mut db: Vec<Relation> = spec.arities().into_iter().map(Relation::new).collect();
    for (step, (r, t, m)) in stream.iter().enumerate() {
        eng.on_update(*r, t, *m);
        db[*r].update(t, *m);
        prop_assert_eq!(eng.answer(), brute_force_count(&db, spec), "step {}", step);
    }
    eng.check_invariants().map_err(TestCaseError::fail)?;
    Ok(())
}

/// Engine scan work must equal the iteration and move counters on every
/// step that does not rebuild the state.
fn audit<E: Engine>(mut eng: E, stream: &[Update]) -> Result<(), TestCaseError> {
    for (r, t, m) in stream {
        let before = eng.counters().snapshot();
        let (_, scans0) = eng.access_totals();
        eng.on_update(*r, t, *m);
        let after = eng.counters().snapshot();
        if after.rebalance_major > before.rebalance_major {
            continue;
        }
        let (_, scans1) = eng.access_totals();
        let d = after - before;
        prop_assert_eq!(d.iterations + d.moves, scans1 - scans0);
    }
    Ok(())
}

fn eps_strategy() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.0, 0.25, 0.5, 0.75, 1.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_engines(eps in eps_strategy(), s in arb_stream(vec![2, 2, 2], 6, 200)) {
        run_checked(TriangleState::new(EpsConfig::uniform(eps).unwrap()), QuerySpec::Triangle, &s)?;
        run_checked(RefinedState::new(eps).unwrap(), QuerySpec::Triangle, &s)?;
        run_checked(EnumState::new(eps).unwrap(), QuerySpec::Triangle, &s)?;
        run_checked(LwState::new(3, eps).unwrap(), QuerySpec::Triangle, &s)?;
    }

    #[test]
    fn static_count_agrees(s in arb_stream(vec![2, 2, 2], 6, 200)) {
        let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
        for (r, t, m) in &s {
            db[*r].update(t, *m);
        }
        prop_assert_eq!(static_count(&db).unwrap(), brute_force_count(&db, QuerySpec::Triangle));
    }

    #[test]
    fn selfjoin_engine(eps in eps_strategy(), s in arb_stream(vec![2], 5, 150)) {
        run_checked(SelfJoinState::new(eps).unwrap(), QuerySpec::TriangleSelfJoin, &s)?;
    }

    #[test]
    fn path4_engine(eps in eps_strategy(), s in arb_stream(vec![1, 2, 2, 1], 5, 200)) {
        run_checked(Path4State::new(eps).unwrap(), QuerySpec::Path4, &s)?;
    }

    #[test]
    fn lw4_engine(eps in eps_strategy(), s in arb_stream(vec![3, 3, 3, 3], 3, 150)) {
        run_checked(LwState::new(4, eps).unwrap(), QuerySpec::Lw(4), &s)?;
    }

    #[test]
    fn counter_audit(eps in eps_strategy(), s in arb_stream(vec![2, 2, 2], 6, 200)) {
        audit(TriangleState::new(EpsConfig::uniform(eps).unwrap()), &s)?;
        audit(RefinedState::new(eps).unwrap(), &s)?;
        audit(EnumState::new(eps).unwrap(), &s)?;
        audit(LwState::new(3, eps).unwrap(), &s)?;
        let sj: Vec<Update> = s.iter().map(|(_, t, m)| (0, t.clone(), *m)).collect();
        audit(SelfJoinState::new(eps).unwrap(), &sj)?;
    }

    #[test]
    fn counter_audit_path4(eps in eps_strategy(), s in arb_stream(vec![1, 2, 2, 1], 6, 200)) {
        audit(Path4State::new(eps).unwrap(), &s)?;
    }
}

#[test]
fn preprocess_equals_streaming() {
    let edges: Vec<(usize, [Value; 2])> =
        (0..90).map(|k: i64| ((k % 3) as usize, [k % 4, (k * 5 + 1) % 6])).collect();
    let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
    let mut st = TriangleState::new(EpsConfig::uniform(0.5).unwrap());
    for (r, t) in &edges {
        db[*r].update(t, 1);
        st.on_update(*r, t, 1);
    }
    for eps in [0.0, 0.5, 1.0] {
        let pre = TriangleState::preprocess(&db, EpsConfig::uniform(eps).unwrap()).unwrap();
        assert_eq!(pre.answer(), st.answer());
        pre.check_invariants().unwrap();
        let rp = RefinedState::preprocess(&db, eps).unwrap();
        assert_eq!(rp.answer(), st.answer());
    }
}
