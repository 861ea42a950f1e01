//! Brute-force reference evaluation and the OuMv reduction harness.
//!
//! Nothing here touches partitions or views; only plain relation storage.

use rustc_hash::FxHashMap;

use crate::engine::Engine;
use crate::relation::{Mult, Relation, Tuple, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuerySpec {
    /// Σ R(a,b)·S(b,c)·T(c,a)
    Triangle,
    /// Σ R(a,b)·R(b,c)·R(c,a)
    TriangleSelfJoin,
    /// Σ R(a)·S(a,b)·T(b,c)·U(c)
    Path4,
    /// Loomis-Whitney of degree n: relation i omits variable i−1 (mod n).
    Lw(usize),
}

impl QuerySpec {
    pub fn arities(&self) -> Vec<usize> {
        match *self {
            QuerySpec::Triangle => vec![2, 2, 2],
            QuerySpec::TriangleSelfJoin => vec![2],
            QuerySpec::Path4 => vec![1, 2, 2, 1],
            QuerySpec::Lw(n) => vec![n - 1; n],
        }
    }
}

fn group_by_first(r: &Relation) -> FxHashMap<Value, Vec<(Tuple, Mult)>> {
    let mut g: FxHashMap<Value, Vec<(Tuple, Mult)>> = FxHashMap::default();
    for (t, m) in r.iter() {
        g.entry(t[0]).or_default().push((t.clone(), m));
    }
    g
}

fn triangle(r: &Relation, s: &Relation, t: &Relation) -> i64 {
    let s_by_b = group_by_first(s);
    let mut q = 0;
    for (rt, rm) in r.iter() {
        if let Some(ss) = s_by_b.get(&rt[1]) {
            for (st, sm) in ss {
                q += rm * sm * t.peek(&[st[1], rt[0]]);
            }
        }
    }
    q
}

/// Exact count of the query over `db` (relations in query order).
///
/// # Panics
/// If the number or arity of relations does not match `spec`.
pub fn brute_force_count(db: &[Relation], spec: QuerySpec) -> i64 {
    let ar = spec.arities();
    assert_eq!(db.len(), ar.len(), "relation count");
    for (r, a) in db.iter().zip(&ar) {
        assert_eq!(r.arity(), *a, "relation arity");
    }
    match spec {
        QuerySpec::Triangle => triangle(&db[0], &db[1], &db[2]),
        QuerySpec::TriangleSelfJoin => triangle(&db[0], &db[0], &db[0]),
        QuerySpec::Path4 => {
            let mut q = 0;
            let t_by_b = group_by_first(&db[2]);
            for (st, sm) in db[1].iter() {
                let rm = db[0].peek(&[st[0]]);
                if rm == 0 {
                    continue;
                }
                if let Some(ts) = t_by_b.get(&st[1]) {
                    for (tt, tm) in ts {
                        q += rm * sm * tm * db[3].peek(&[tt[1]]);
                    }
                }
            }
            q
        }
        QuerySpec::Lw(n) => lw(db, n),
    }
}

/// Column of variable `k` in relation `j` of a degree-n LW query.
fn lw_col(n: usize, j: usize, k: usize) -> usize {
    (k + n - j) % n
}

fn lw(db: &[Relation], n: usize) -> i64 {
    assert!(n >= 3);
    let mut q = 0;
    let mut vals = vec![0; n];
    // R_0 binds every variable but A_{n−1}; candidates for it come from R_1.
    let by_key: FxHashMap<Tuple, Vec<(Value, Mult)>> = {
        let mut g: FxHashMap<Tuple, Vec<(Value, Mult)>> = FxHashMap::default();
        let free = lw_col(n, 1, n - 1);
        for (t, m) in db[1].iter() {
            let key: Tuple = (0..n - 1).filter(|&c| c != free).map(|c| t[c]).collect();
            g.entry(key).or_default().push((t[free], m));
        }
        g
    };
    for (t0, m0) in db[0].iter() {
        for k in 0..n - 1 {
            vals[k] = t0[lw_col(n, 0, k)];
        }
        let free = lw_col(n, 1, n - 1);
        let key: Tuple = (0..n - 1)
            .filter(|&c| c != free)
            .map(|c| vals[(c + 1) % n])
            .collect();
        let Some(cands) = by_key.get(&key) else { continue };
        for &(x, m1) in cands {
            vals[n - 1] = x;
            let mut prod = m0 * m1;
            for j in 2..n {
                if prod == 0 {
                    break;
                }
                let t: Tuple = (0..n - 1).map(|c| vals[(j + c) % n]).collect();
                prod *= db[j].peek(&t);
            }
            q += prod;
        }
    }
    q
}

/// The full triangle join with product multiplicities, sorted by tuple.
pub fn brute_force_enumerate(db: &[Relation; 3]) -> Vec<(Tuple, Mult)> {
    let s_by_b = group_by_first(&db[1]);
    let mut out = Vec::new();
    for (rt, rm) in db[0].iter() {
        if let Some(ss) = s_by_b.get(&rt[1]) {
            for (st, sm) in ss {
                let tm = db[2].peek(&[st[1], rt[0]]);
                if tm != 0 {
                    out.push((Tuple::from([rt[0], rt[1], st[1]]), rm * sm * tm));
                }
            }
        }
    }
    out.sort();
    out
}

/// Online Boolean matrix with a stream of vector pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuMvInstance {
    pub n: usize,
    pub m: Vec<Vec<bool>>,
    pub pairs: Vec<(Vec<bool>, Vec<bool>)>,
}

impl OuMvInstance {
    /// uᵀMv per round, computed directly.
    pub fn direct(&self) -> Vec<bool> {
        self.pairs
            .iter()
            .map(|(u, v)| (0..self.n).any(|i| u[i] && (0..self.n).any(|j| self.m[i][j] && v[j])))
            .collect()
    }
}

/// Reserved constant for the reduction; row and column indices are 1..=n.
pub const OUMV_SENTINEL: Value = 0;

/// Answers each round of `inst` with a triangle engine: M is loaded into S,
/// each u into R(a,·) and each v into T(·,a), and the round's bit is Q ≠ 0.
pub fn solve_oumv_via_engine<E: Engine, F: FnOnce() -> E>(inst: &OuMvInstance, engine_factory: F) -> Vec<bool> {
    let mut eng = engine_factory();
    let a = OUMV_SENTINEL;
    for i in 0..inst.n {
        for j in 0..inst.n {
            if inst.m[i][j] {
                eng.on_update(1, &[i as Value + 1, j as Value + 1], 1);
            }
        }
    }
    let mut r_cur = vec![0 as Mult; inst.n];
    let mut t_cur = vec![0 as Mult; inst.n];
    let mut bits = Vec::with_capacity(inst.pairs.len());
    for (u, v) in &inst.pairs {
        for i in 0..inst.n {
            let d = u[i] as Mult - r_cur[i];
            if d != 0 {
                eng.on_update(0, &[a, i as Value + 1], d);
                r_cur[i] += d;
            }
        }
        for i in 0..inst.n {
            let d = v[i] as Mult - t_cur[i];
            if d != 0 {
                eng.on_update(2, &[i as Value + 1, a], d);
                t_cur[i] += d;
            }
        }
        bits.push(eng.answer() != 0);
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::{EpsConfig, TriangleState};

    fn rel(arity: usize, e: &[(&[Value], Mult)]) -> Relation {
        Relation::from_entries(arity, e.iter().map(|&(t, m)| (t, m))).unwrap()
    }

    #[test]
    fn triangle_examples() {
        let r = rel(2, &[(&[1, 2], 1)]);
        let s = rel(2, &[(&[2, 3], 1)]);
        let t = rel(2, &[(&[3, 1], 1)]);
        let db = [r.clone(), s.clone(), t.clone()];
        assert_eq!(brute_force_count(&db, QuerySpec::Triangle), 1);
        assert_eq!(brute_force_count(&[r.clone(), s.clone(), Relation::new(2)], QuerySpec::Triangle), 0);
        let w = [rel(2, &[(&[1, 2], 2)]), rel(2, &[(&[2, 3], 3)]), rel(2, &[(&[3, 1], -1)])];
        assert_eq!(brute_force_count(&w, QuerySpec::Triangle), -6);
        assert_eq!(brute_force_enumerate(&db), vec![(Tuple::from([1, 2, 3]), 1)]);
    }

    #[test]
    fn lw4_single() {
        let db: Vec<_> =
            [[1, 2, 3], [2, 3, 4], [3, 4, 1], [4, 1, 2]].iter().map(|t| rel(3, &[(&t[..], 1)])).collect();
        assert_eq!(brute_force_count(&db, QuerySpec::Lw(4)), 1);
        let db3 = [rel(2, &[(&[1, 2], 1)]), rel(2, &[(&[2, 3], 1)]), rel(2, &[(&[3, 1], 1)])];
        assert_eq!(brute_force_count(&db3, QuerySpec::Lw(3)), 1);
    }

    #[test]
    fn path4_single() {
        let db = [rel(1, &[(&[1], 1)]), rel(2, &[(&[1, 2], 1)]), rel(2, &[(&[2, 3], 1)]), rel(1, &[(&[3], 1)])];
        assert_eq!(brute_force_count(&db, QuerySpec::Path4), 1);
    }

    #[test]
    fn selfjoin_rotations() {
        let r = rel(2, &[(&[1, 2], 1), (&[2, 3], 1), (&[3, 1], 1)]);
        assert_eq!(brute_force_count(&[r], QuerySpec::TriangleSelfJoin), 3);
        let l = rel(2, &[(&[1, 1], 1)]);
        assert_eq!(brute_force_count(&[l], QuerySpec::TriangleSelfJoin), 1);
    }

    #[test]
    fn oumv_identity() {
        let id = vec![vec![true, false], vec![false, true]];
        let inst = OuMvInstance {
            n: 2,
            m: id,
            pairs: vec![(vec![true, false], vec![true, false]), (vec![true, false], vec![false, true])],
        };
        let bits = solve_oumv_via_engine(&inst, || TriangleState::new(EpsConfig::uniform(0.5).unwrap()));
        assert_eq!(bits, vec![true, false]);
        assert_eq!(inst.direct(), bits);
    }
}
