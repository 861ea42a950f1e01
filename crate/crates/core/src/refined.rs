//! Triangle count with every relation partitioned on both of its columns.
//!
//! Relation `i` of schema `(X_i, X_{i+1})` has four parts indexed by
//! `first | second << 1`, where a set bit means heavy on that column. The
//! views join only parts that are heavy on the exported columns:
//!
//! ```text
//! V_i(x_i, x_{i+2}) = Σ_{x_{i+1}} K_i^{hl}(x_i, x_{i+1}) · K_{i+1}^{lh}(x_{i+1}, x_{i+2})
//! ```

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::relation::{move_key, strict_partition_dims, Direction, IndexId, MoveSink, Mult, Part, Partition, Relation, Tuple, Value};
use crate::triangle::template2;

const FIRST: IndexId = 0;
const SECOND: IndexId = 1;
const LL: usize = 0b00;
const HL: usize = 0b01;
const LH: usize = 0b10;
const HH: usize = 0b11;

/// Part index from per-column classes.
pub fn part_index(first: Part, second: Part) -> usize {
    first.is_heavy() as usize | (second.is_heavy() as usize) << 1
}

fn with_first(heavy: bool) -> impl Iterator<Item = usize> {
    [0b00, 0b10].into_iter().map(move |p| p | heavy as usize)
}

#[derive(Debug, Clone)]
pub struct RefinedState {
    eps: f64,
    n: u64,
    parts: [Partition; 3],
    views: [Relation; 3],
    q: i64,
    db_size: usize,
    ops: OpCounter,
}

impl RefinedState {
    pub fn new(eps: f64) -> Result<Self, EngineError> {
        let eps = check_eps(eps)?;
        let part = || Partition::new(&template2(), &[&[0], &[1]], theta(1, eps));
        Ok(RefinedState {
            eps,
            n: 1,
            parts: [part(), part(), part()],
            views: [Relation::new(2), Relation::new(2), Relation::new(2)],
            q: 0,
            db_size: 0,
            ops: OpCounter::new(),
        })
    }

    /// Builds the state of a database `[R, S, T]` with N = 2|D|+1.
    pub fn preprocess(db: &[Relation; 3], eps: f64) -> Result<Self, EngineError> {
        for (rel, r) in db.iter().enumerate() {
            if r.arity() != 2 {
                return Err(EngineError::Schema { rel, expected: 2, got: r.arity() });
            }
        }
        let mut st = RefinedState::new(eps)?;
        st.db_size = db.iter().map(Relation::len).sum();
        st.n = 2 * st.db_size as u64 + 1;
        for (i, r) in db.iter().enumerate() {
            let mut copy = template2();
            for (t, m) in r.iter() {
                st.ops.iteration();
                copy.update(t, m);
            }
            st.parts[i] = strict_partition_dims(&copy, &[&[0], &[1]], theta(st.n, eps));
        }
        for i in 0..3 {
            st.views[i] = st.compute_view(i, &st.ops);
        }
        let mut q = 0;
        for (t, m) in st.parts[0].parts().iter().flat_map(|p| p.iter()) {
            st.ops.iteration();
            q += m * st.join_count(0, t[0], t[1]);
        }
        st.q = q;
        Ok(st)
    }

    pub fn partition(&self, rel: usize) -> &Partition {
        &self.parts[rel]
    }

    /// 0 = V_RS(a,c), 1 = V_ST(b,a), 2 = V_TR(c,b).
    pub fn view(&self, i: usize) -> &Relation {
        &self.views[i]
    }

    /// Σ_z K_{i+1}(y,z)·K_{i+2}(z,x) over all sixteen part combinations.
    /// Parts of next are `s = s_B | s_C << 1`, parts of prev `t = t_C | t_A << 1`.
    fn join_count(&self, i: usize, x: Value, y: Value) -> i64 {
        let next = &self.parts[(i + 1) % 3];
        let prev = &self.parts[(i + 2) % 3];
        let ops = &self.ops;
        let mut s = 0;
        // s_B = h, t_C = h: prev heavy on z bounds the distinct z.
        for t in with_first(true) {
            for (u, pm) in prev.part(t).matching(SECOND, &[x]) {
                ops.iteration();
                for sp in with_first(true) {
                    ops.lookup();
                    s += pm * next.part(sp).get(&[y, u[0]]);
                }
            }
        }
        // s_B = h, s_C = h, t_C = l: next heavy on z.
        for (u, nm) in next.part(HH).matching(FIRST, &[y]) {
            ops.iteration();
            for t in with_first(false) {
                ops.lookup();
                s += nm * prev.part(t).get(&[u[1], x]);
            }
        }
        // s_B = h, s_C = l, t_C = l, t_A = l: prev light on x.
        for (u, pm) in prev.part(LL).matching(SECOND, &[x]) {
            ops.iteration();
            ops.lookup();
            s += pm * next.part(HL).get(&[y, u[0]]);
        }
        // s_B = h, s_C = l, t_C = l, t_A = h
        ops.lookup();
        s += self.views[(i + 1) % 3].get(&[y, x]);
        // s_B = l, t_C = h
        if self.eps <= 0.5 {
            for sp in with_first(false) {
                for (u, nm) in next.part(sp).matching(FIRST, &[y]) {
                    ops.iteration();
                    for t in with_first(true) {
                        ops.lookup();
                        s += nm * prev.part(t).get(&[u[1], x]);
                    }
                }
            }
        } else {
            for t in with_first(true) {
                for (u, pm) in prev.part(t).matching(SECOND, &[x]) {
                    ops.iteration();
                    for sp in with_first(false) {
                        ops.lookup();
                        s += pm * next.part(sp).get(&[y, u[0]]);
                    }
                }
            }
        }
        // s_B = l, t_C = l
        for sp in with_first(false) {
            for (u, nm) in next.part(sp).matching(FIRST, &[y]) {
                ops.iteration();
                for t in with_first(false) {
                    ops.lookup();
                    s += nm * prev.part(t).get(&[u[1], x]);
                }
            }
        }
        s
    }

    /// Applies `{t ↦ m}` to part `(first, second)` of relation `rel`; returns δQ.
    pub fn apply_update_rp(&mut self, rel: usize, first: Part, second: Part, t: &[Value], m: Mult) -> i64 {
        self.apply(rel, part_index(first, second), t, m).0
    }

    fn apply(&mut self, i: usize, part: usize, t: &[Value], m: Mult) -> (i64, Mult) {
        let (x, y) = (t[0], t[1]);
        let dq = m * self.join_count(i, x, y);
        self.q += dq;
        let RefinedState { parts, views, ops, .. } = self;
        if part == HL {
            for (u, nm) in parts[(i + 1) % 3].part(LH).matching(FIRST, &[y]) {
                ops.iteration();
                views[i].update(&[x, u[1]], m * nm);
            }
        } else if part == LH {
            for (u, pm) in parts[(i + 2) % 3].part(HL).matching(SECOND, &[x]) {
                ops.iteration();
                views[(i + 2) % 3].update(&[u[0], y], pm * m);
            }
        }
        let new = parts[i].apply(part, t, m);
        (dq, new)
    }

    pub fn major_rebalance(&mut self) {
        self.ops.major();
        let th = theta(self.n, self.eps);
        for i in 0..3 {
            let visited = self.parts[i].repartition(th);
            self.ops.moved(visited as u64);
        }
        for i in 0..3 {
            self.views[i] = self.compute_view(i, &self.ops);
        }
    }

    /// Moves all tuples of relation `rel` whose column `col` equals `key`.
    pub fn minor_rebalance(&mut self, rel: usize, col: usize, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(&mut Mover { st: self, rel }, col, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }

    fn compute_view(&self, i: usize, ops: &OpCounter) -> Relation {
        let a = self.parts[i].part(HL);
        let b = self.parts[(i + 1) % 3].part(LH);
        let mut v = Relation::new(2);
        if a.len() <= b.len() {
            for (t, am) in a.iter() {
                ops.iteration();
                for (u, bm) in b.matching(FIRST, &[t[1]]) {
                    ops.iteration();
                    v.update(&[t[0], u[1]], am * bm);
                }
            }
        } else {
            for (u, bm) in b.iter() {
                ops.iteration();
                for (t, am) in a.matching(SECOND, &[u[0]]) {
                    ops.iteration();
                    v.update(&[t[0], u[1]], am * bm);
                }
            }
        }
        v
    }

    /// Checks one column of the updated tuple against the loose bounds.
    fn rebalance_column(&mut self, rel: usize, col: usize, key: Value) {
        let th = theta(self.n, self.eps);
        let p = &self.parts[rel];
        self.ops.lookups_n(4);
        let light = p.degree_in(col, Part::Light, &[key]);
        let heavy = p.degree_in(col, Part::Heavy, &[key]);
        if light as f64 >= 1.5 * th {
            self.minor_rebalance(rel, col, key, Direction::LightToHeavy);
        } else if heavy > 0 && (heavy as f64) < 0.5 * th {
            self.minor_rebalance(rel, col, key, Direction::HeavyToLight);
        }
    }
}

struct Mover<'a> {
    st: &'a mut RefinedState,
    rel: usize,
}

impl MoveSink for Mover<'_> {
    fn partition(&self) -> &Partition {
        &self.st.parts[self.rel]
    }

    fn apply(&mut self, part: usize, t: &Tuple, m: Mult) {
        self.st.apply(self.rel, part, t, m);
    }
}

impl Probe for RefinedState {
    fn counters(&self) -> &OpCounter {
        &self.ops
    }

    fn threshold_base(&self) -> u64 {
        self.n
    }

    fn db_size(&self) -> usize {
        self.db_size
    }

    fn space(&self) -> usize {
        self.parts.iter().map(Partition::len).sum::<usize>() + self.views.iter().map(Relation::len).sum::<usize>()
    }
}

impl Engine for RefinedState {
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel < 3 && t.len() == 2 && m != 0);
        let force = self.eps == 0.0;
        if !force {
            self.ops.lookups_n(4);
        }
        let part = self.parts[rel].route_tuple(t, force);
        let (_, new) = self.apply(rel, part, t, m);
        track_size(&mut self.db_size, new, m);
        if resize(&mut self.n, self.db_size) {
            self.major_rebalance();
            return;
        }
        self.rebalance_column(rel, 0, t[0]);
        self.rebalance_column(rel, 1, t[1]);
    }

    fn answer(&self) -> i64 {
        self.q
    }

    fn arities(&self) -> Vec<usize> {
        vec![2, 2, 2]
    }

    fn check_invariants(&self) -> Result<(), String> {
        let stored: usize = self.parts.iter().map(Partition::len).sum();
        if stored != self.db_size {
            return Err(format!("db_size {} but {} stored entries", self.db_size, stored));
        }
        size_invariant(self.n, self.db_size)?;
        for (i, p) in self.parts.iter().enumerate() {
            let mut p = p.clone();
            p.set_theta(theta(self.n, self.eps));
            p.check(false).map_err(|e| format!("relation {i}: {e}"))?;
        }
        let scratch = OpCounter::new();
        for (i, name) in ["V_RS", "V_ST", "V_TR"].iter().enumerate() {
            compare_view(name, &self.views[i], &self.compute_view(i, &scratch))?;
        }
        Ok(())
    }

    fn access_totals(&self) -> (u64, u64) {
        let mut acc = (0, 0);
        for p in &self.parts {
            acc = add_access(acc, partition_access(p));
        }
        for v in &self.views {
            acc = add_access(acc, v.access_counts());
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        for eps in [0.0, 0.25, 0.5, 1.0] {
            let mut st = RefinedState::new(eps).unwrap();
            st.on_update(0, &[1, 2], 1);
            st.on_update(1, &[2, 3], 1);
            st.on_update(2, &[3, 1], 1);
            assert_eq!(st.answer(), 1);
            st.check_invariants().unwrap();
        }
    }

    #[test]
    fn eps_zero_routes_hh() {
        let mut st = RefinedState::new(0.0).unwrap();
        st.on_update(0, &[1, 2], 1);
        st.on_update(0, &[3, 4], 1);
        assert_eq!(st.partition(0).part(HH).len(), 2);
    }

    #[test]
    fn hh_and_ll_updates_leave_views() {
        let mut st = RefinedState::new(0.5).unwrap();
        st.on_update(1, &[2, 3], 1);
        st.on_update(2, &[3, 1], 1);
        let before: Vec<_> = (0..3).map(|i| st.view(i).clone()).collect();
        st.apply_update_rp(0, Part::Heavy, Part::Heavy, &[7, 2], 1);
        st.apply_update_rp(0, Part::Light, Part::Light, &[8, 2], 1);
        for i in 0..3 {
            assert_eq!(st.view(i), &before[i]);
        }
    }

    #[test]
    fn preprocess_matches_stream() {
        let mut st = RefinedState::new(0.5).unwrap();
        let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
        for k in 0..60i64 {
            let (rel, t) = ((k % 3) as usize, [k % 5, (k * 3) % 7]);
            st.on_update(rel, &t, 1);
            db[rel].update(&t, 1);
        }
        let pre = RefinedState::preprocess(&db, 0.5).unwrap();
        assert_eq!(pre.answer(), st.answer());
        pre.check_invariants().unwrap();
    }
}
