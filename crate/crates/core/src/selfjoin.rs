//! Triangle count over a self-join, `Q = Σ R(a,b)·R(b,c)·R(c,a)`.
//!
//! One relation partitioned on its first column and one auxiliary view
//! `V(a,c) = Σ_b R_h(a,b)·R_l(b,c)`.

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::relation::{move_key, Direction, IndexId, MoveSink, Mult, Part, Partition, Relation, Tuple, Value};
use crate::triangle::template2;

const FIRST: IndexId = 0;
const SECOND: IndexId = 1;
const H: usize = 1;
const L: usize = 0;

#[derive(Debug, Clone)]
pub struct SelfJoinState {
    eps: f64,
    n: u64,
    part: Partition,
    v: Relation,
    q: i64,
    db_size: usize,
    ops: OpCounter,
}

impl SelfJoinState {
    pub fn new(eps: f64) -> Result<Self, EngineError> {
        let eps = check_eps(eps)?;
        Ok(SelfJoinState {
            eps,
            n: 1,
            part: Partition::new(&template2(), &[&[0]], theta(1, eps)),
            v: Relation::new(2),
            q: 0,
            db_size: 0,
            ops: OpCounter::new(),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn view(&self) -> &Relation {
        &self.v
    }

    /// Σ_c R(β,c)·R(c,α) over the four part combinations.
    fn join_count(&self, alpha: Value, beta: Value) -> i64 {
        let (rh, rl) = (self.part.part(H), self.part.part(L));
        let ops = &self.ops;
        let mut s = 0;
        for (t, m) in rh.matching(SECOND, &[alpha]) {
            ops.iteration();
            ops.lookup();
            s += m * rh.get(&[beta, t[0]]);
        }
        ops.lookup();
        s += self.v.get(&[beta, alpha]);
        if self.eps <= 0.5 {
            for (t, m) in rl.matching(FIRST, &[beta]) {
                ops.iteration();
                ops.lookup();
                s += m * rh.get(&[t[1], alpha]);
            }
        } else {
            for (t, m) in rh.matching(SECOND, &[alpha]) {
                ops.iteration();
                ops.lookup();
                s += m * rl.get(&[beta, t[0]]);
            }
        }
        for (t, m) in rl.matching(FIRST, &[beta]) {
            ops.iteration();
            ops.lookup();
            s += m * rl.get(&[t[1], alpha]);
        }
        s
    }

    /// Applies `{(α,β) ↦ m}` to the given part; returns δQ.
    pub fn apply_update_selfjoin(&mut self, part: Part, t: &[Value], m: Mult) -> i64 {
        self.apply(part.is_heavy() as usize, t, m).0
    }

    fn apply(&mut self, part: usize, t: &[Value], m: Mult) -> (i64, Mult) {
        let (alpha, beta) = (t[0], t[1]);
        let mut dq = 3 * m * self.join_count(alpha, beta);
        if alpha == beta {
            self.ops.lookups_n(2);
            let diag = self.part.part(H).get(t) + self.part.part(L).get(t);
            dq += 3 * m * m * diag + m * m * m;
        }
        self.q += dq;
        let SelfJoinState { part: p, v, ops, .. } = self;
        if part == H {
            // V(α,c) += m · R_l(β,c)
            for (u, lm) in p.part(L).matching(FIRST, &[beta]) {
                ops.iteration();
                v.update(&[alpha, u[1]], m * lm);
            }
        } else {
            // V(a,β) += R_h(a,α) · m
            for (u, hm) in p.part(H).matching(SECOND, &[alpha]) {
                ops.iteration();
                v.update(&[u[0], beta], hm * m);
            }
        }
        let new = p.apply(part, t, m);
        (dq, new)
    }

    pub fn major_rebalance(&mut self) {
        self.ops.major();
        let visited = self.part.repartition(theta(self.n, self.eps));
        self.ops.moved(visited as u64);
        self.v = self.compute_view(&self.ops);
    }

    pub fn minor_rebalance(&mut self, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(self, 0, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }

    fn compute_view(&self, ops: &OpCounter) -> Relation {
        let mut v = Relation::new(2);
        for (t, hm) in self.part.part(H).iter() {
            ops.iteration();
            for (u, lm) in self.part.part(L).matching(FIRST, &[t[1]]) {
                ops.iteration();
                v.update(&[t[0], u[1]], hm * lm);
            }
        }
        v
    }
}

impl MoveSink for SelfJoinState {
    fn partition(&self) -> &Partition {
        &self.part
    }

    fn apply(&mut self, part: usize, t: &Tuple, m: Mult) {
        SelfJoinState::apply(self, part, t, m);
    }
}

impl Probe for SelfJoinState {
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
        self.part.len() + self.v.len()
    }
}

impl Engine for SelfJoinState {
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel == 0 && t.len() == 2 && m != 0);
        let key = t[0];
        let force = self.eps == 0.0;
        if !force {
            self.ops.lookup();
        }
        let part = self.part.route_dim(0, &[key], force).is_heavy() as usize;
        let (_, new) = self.apply(part, t, m);
        track_size(&mut self.db_size, new, m);
        if resize(&mut self.n, self.db_size) {
            self.major_rebalance();
            return;
        }
        let th = theta(self.n, self.eps);
        self.ops.lookups_n(2);
        let light_deg = self.part.light().degree(FIRST, &[key]);
        let heavy_deg = self.part.heavy().degree(FIRST, &[key]);
        if light_deg as f64 >= 1.5 * th {
            self.minor_rebalance(key, Direction::LightToHeavy);
        } else if heavy_deg > 0 && (heavy_deg as f64) < 0.5 * th {
            self.minor_rebalance(key, Direction::HeavyToLight);
        }
    }

    fn answer(&self) -> i64 {
        self.q
    }

    fn arities(&self) -> Vec<usize> {
        vec![2]
    }

    fn check_invariants(&self) -> Result<(), String> {
        if self.part.len() != self.db_size {
            return Err(format!("db_size {} but {} stored entries", self.db_size, self.part.len()));
        }
        size_invariant(self.n, self.db_size)?;
        let mut p = self.part.clone();
        p.set_theta(theta(self.n, self.eps));
        p.check(false)?;
        compare_view("V", &self.v, &self.compute_view(&OpCounter::new()))
    }

    fn access_totals(&self) -> (u64, u64) {
        add_access(partition_access(&self.part), self.v.access_counts())
    }
}
