use ivme_core::oracle::{brute_force_count, brute_force_enumerate, QuerySpec};
use ivme_core::{EnumState, Engine, Relation, Tuple, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random insert/delete stream over a small domain with a skewed key.
fn stream(seed: u64, len: usize, rels: usize, arity: usize, dom: Value) -> Vec<(usize, Vec<Value>, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live: Vec<(usize, Vec<Value>)> = Vec::new();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        if !live.is_empty() && rng.gen_bool(0.3) {
            let k = rng.gen_range(0..live.len());
            let (r, t) = live.swap_remove(k);
            out.push((r, t, -1));
        } else {
            let r = rng.gen_range(0..rels);
            let t: Vec<Value> = (0..arity)
                .map(|c| if c == 0 && rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..dom) })
                .collect();
            let m = if rng.gen_bool(0.1) { 2 } else { 1 };
            live.push((r, t.clone()));
            out.push((r, t, m));
        }
    }
    out
}

#[test]
fn enum_matches_brute_force() {
    for (seed, eps) in [(1, 0.0), (2, 0.3), (3, 0.5), (4, 0.7), (5, 1.0)] {
        let mut st = EnumState::new(eps).unwrap();
        let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
        for (step, (r, t, m)) in stream(seed, 600, 3, 2, 8).into_iter().enumerate() {
            st.on_update(r, &t, m);
            db[r].update(&t, m);
            let mut got: Vec<(Tuple, i64)> = st.enumerate().collect();
            got.sort();
            assert_eq!(got, brute_force_enumerate(&db), "eps {eps} step {step}");
            assert_eq!(st.answer(), brute_force_count(&db, QuerySpec::Triangle));
            if step % 50 == 0 {
                st.check_invariants().unwrap();
            }
        }
        st.check_invariants().unwrap();
    }
}

#[test]
fn lw_matches_brute_force() {
    use ivme_core::LwState;
    for deg in [3usize, 4, 5] {
        for (seed, eps) in [(11, 0.25), (12, 0.5), (13, 0.75), (14, 0.0), (15, 1.0)] {
            let mut st = LwState::new(deg, eps).unwrap();
            let mut db = vec![Relation::new(deg - 1); deg];
            for (step, (r, t, m)) in stream(seed + deg as u64, 500, deg, deg - 1, 5).into_iter().enumerate() {
                st.on_update(r, &t, m);
                db[r].update(&t, m);
                assert_eq!(st.answer(), brute_force_count(&db, QuerySpec::Lw(deg)), "deg {deg} eps {eps} step {step}");
                if step % 40 == 0 {
                    st.check_invariants().unwrap();
                }
            }
        }
    }
}

#[test]
fn path4_matches_brute_force() {
    use ivme_core::Path4State;
    for (seed, eps) in [(21, 0.0), (22, 0.25), (23, 0.5), (24, 0.75), (25, 1.0)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = Path4State::new(eps).unwrap();
        let mut db = [Relation::new(1), Relation::new(2), Relation::new(2), Relation::new(1)];
        let mut live: Vec<(usize, Vec<Value>)> = Vec::new();
        for step in 0..800 {
            let (r, t, m) = if !live.is_empty() && rng.gen_bool(0.3) {
                let (r, t) = live.swap_remove(rng.gen_range(0..live.len()));
                (r, t, -1)
            } else {
                let r = rng.gen_range(0..4);
                let mut v = || if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..7) };
                let t = if r == 0 || r == 3 { vec![v()] } else { vec![v(), v()] };
                live.push((r, t.clone()));
                (r, t, 1)
            };
            st.on_update(r, &t, m);
            db[r].update(&t, m);
            assert_eq!(st.answer(), brute_force_count(&db, QuerySpec::Path4), "eps {eps} step {step}");
            if step % 25 == 0 {
                st.check_invariants().unwrap_or_else(|e| panic!("eps {eps} step {step}: {e}"));
            }
        }
    }
}
