//! Triangle count maintenance with heavy/light partitions.
//!
//! Maintains `Q = Σ R(a,b)·S(b,c)·T(c,a)`. Relations are handled by
//! rotation: relation `i` has schema `(X_i, X_{i+1})` (indices mod 3) and is
//! partitioned on its first column, so R = 0 on (A,B), S = 1 on (B,C) and
//! T = 2 on (C,A). View `i` is
//!
//! ```text
//! V_i(x_i, x_{i+2}) = Σ_{x_{i+1}} K_i^h(x_i, x_{i+1}) · K_{i+1}^l(x_{i+1}, x_{i+2})
//! ```
//!
//! which gives V_RS(a,c), V_ST(b,a) and V_TR(c,b).

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::relation::{move_key, strict_partition, Direction, IndexId, MoveSink, Mult, Part, Partition, Relation, Tuple, Value};

const FIRST: IndexId = 0;
const SECOND: IndexId = 1;
const H: usize = 1;
const L: usize = 0;

/// Per-relation ε for R, S and T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsConfig {
    pub eps: [f64; 3],
}

impl EpsConfig {
    pub fn uniform(eps: f64) -> Result<Self, EngineError> {
        Self::new(eps, eps, eps)
    }

    pub fn new(eps_r: f64, eps_s: f64, eps_t: f64) -> Result<Self, EngineError> {
        Ok(EpsConfig { eps: [check_eps(eps_r)?, check_eps(eps_s)?, check_eps(eps_t)?] })
    }

    /// The factorized configurations: every ε in {0,1}, not all equal.
    /// Up to rotation these are ε_S = 0, ε_T = 1 with ε_R free.
    pub fn factorized(eps_r: f64, eps_s: f64, eps_t: f64) -> Result<Self, EngineError> {
        let e = [eps_r, eps_s, eps_t];
        let binary = e.iter().all(|&x| x == 0.0 || x == 1.0);
        let rotation_ok = (0..3).any(|i| e[(i + 1) % 3] == 0.0 && e[(i + 2) % 3] == 1.0);
        if binary && rotation_ok {
            Self::new(eps_r, eps_s, eps_t)
        } else {
            Err(EngineError::Config(format!("{e:?} is not a factorized configuration")))
        }
    }
}

pub(crate) fn template2() -> Relation {
    let mut r = Relation::new(2);
    r.add_index(&[0]);
    r.add_index(&[1]);
    r
}

/// Engine state: ε configuration, threshold base, partitions, views.
#[derive(Debug, Clone)]
pub struct TriangleState {
    cfg: EpsConfig,
    n: u64,
    parts: [Partition; 3],
    views: [Relation; 3],
    q: i64,
    db_size: usize,
    rebalancing: bool,
    ops: OpCounter,
}

impl TriangleState {
    /// Empty state with N = 1.
    pub fn new(cfg: EpsConfig) -> Self {
        let part = |i: usize| Partition::new(&template2(), &[&[0]], theta(1, cfg.eps[i]));
        TriangleState {
            cfg,
            n: 1,
            parts: [part(0), part(1), part(2)],
            views: [Relation::new(2), Relation::new(2), Relation::new(2)],
            q: 0,
            db_size: 0,
            rebalancing: true,
            ops: OpCounter::new(),
        }
    }

    /// Builds the state of a database `[R, S, T]`: N = 2|D|+1, strict
    /// partitions, views and the count.
    pub fn preprocess(db: &[Relation; 3], cfg: EpsConfig) -> Result<Self, EngineError> {
        for (rel, r) in db.iter().enumerate() {
            if r.arity() != 2 {
                return Err(EngineError::Schema { rel, expected: 2, got: r.arity() });
            }
        }
        let mut st = TriangleState::new(cfg);
        st.db_size = db.iter().map(Relation::len).sum();
        st.n = 2 * st.db_size as u64 + 1;
        for (i, r) in db.iter().enumerate() {
            let mut copy = template2();
            for (t, m) in r.iter() {
                st.ops.iteration();
                copy.update(t, m);
            }
            st.parts[i] = strict_partition(&copy, &[0], theta(st.n, cfg.eps[i]));
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

    pub fn config(&self) -> EpsConfig {
        self.cfg
    }

    pub fn partition(&self, rel: usize) -> &Partition {
        &self.parts[rel]
    }

    /// View `i`: 0 = V_RS(a,c), 1 = V_ST(b,a), 2 = V_TR(c,b).
    pub fn view(&self, i: usize) -> &Relation {
        &self.views[i]
    }

    fn theta_of(&self, rel: usize) -> f64 {
        theta(self.n, self.cfg.eps[rel])
    }

    /// Σ_z K_{i+1}(y,z) · K_{i+2}(z,x) over all four part combinations.
    fn join_count(&self, i: usize, x: Value, y: Value) -> i64 {
        let next = &self.parts[(i + 1) % 3];
        let prev = &self.parts[(i + 2) % 3];
        let ops = &self.ops;
        let mut s = 0;
        // hh: prev_h is heavy on z, so few distinct z pair with x.
        for (t, pm) in prev.part(H).matching(SECOND, &[x]) {
            ops.iteration();
            ops.lookup();
            s += pm * next.part(H).get(&[y, t[0]]);
        }
        // hl
        ops.lookup();
        s += self.views[(i + 1) % 3].get(&[y, x]);
        // lh: iterate whichever side has the smaller bound.
        if self.cfg.eps[(i + 1) % 3] <= 1.0 - self.cfg.eps[(i + 2) % 3] {
            for (t, nm) in next.part(L).matching(FIRST, &[y]) {
                ops.iteration();
                ops.lookup();
                s += nm * prev.part(H).get(&[t[1], x]);
            }
        } else {
            for (t, pm) in prev.part(H).matching(SECOND, &[x]) {
                ops.iteration();
                ops.lookup();
                s += pm * next.part(L).get(&[y, t[0]]);
            }
        }
        // ll
        for (t, nm) in next.part(L).matching(FIRST, &[y]) {
            ops.iteration();
            ops.lookup();
            s += nm * prev.part(L).get(&[t[1], x]);
        }
        s
    }

    /// Applies `{t ↦ m}` to part `part` of relation `rel`, maintaining Q and
    /// the views. Returns δQ.
    pub fn apply_update(&mut self, rel: usize, part: Part, t: &[Value], m: Mult) -> i64 {
        self.apply(rel, part.is_heavy() as usize, t, m).0
    }

    fn apply(&mut self, i: usize, part: usize, t: &[Value], m: Mult) -> (i64, Mult) {
        let (x, y) = (t[0], t[1]);
        let dq = m * self.join_count(i, x, y);
        self.q += dq;
        let TriangleState { parts, views, ops, .. } = self;
        if part == H {
            // V_i(x,z) += m · K_{i+1}^l(y,z)
            for (u, nm) in parts[(i + 1) % 3].part(L).matching(FIRST, &[y]) {
                ops.iteration();
                views[i].update(&[x, u[1]], m * nm);
            }
        } else {
            // V_{i+2}(z,y) += K_{i+2}^h(z,x) · m
            for (u, pm) in parts[(i + 2) % 3].part(H).matching(SECOND, &[x]) {
                ops.iteration();
                views[(i + 2) % 3].update(&[u[0], y], pm * m);
            }
        }
        let new = parts[i].apply(part, t, m);
        (dq, new)
    }

    fn route(&self, rel: usize, key: Value) -> usize {
        let force = self.cfg.eps[rel] == 0.0;
        if !force {
            self.ops.lookup();
        }
        self.parts[rel].route_dim(0, &[key], force).is_heavy() as usize
    }

    /// Recomputes partitions at the current N and all views; Q is unchanged.
    pub fn major_rebalance(&mut self) {
        self.ops.major();
        for i in 0..3 {
            let th = self.theta_of(i);
            let visited = self.parts[i].repartition(th);
            self.ops.moved(visited as u64);
        }
        for i in 0..3 {
            self.views[i] = self.compute_view(i, &self.ops);
        }
    }

    /// Moves every tuple with first-column value `key` of relation `rel`
    /// across the partition, through [`apply_update`](Self::apply_update).
    pub fn minor_rebalance(&mut self, rel: usize, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(&mut Mover { st: self, rel }, 0, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }

    fn compute_view(&self, i: usize, ops: &OpCounter) -> Relation {
        let a = self.parts[i].part(H);
        let b = self.parts[(i + 1) % 3].part(L);
        let cost_a = a.len() as f64 * theta(self.n, self.cfg.eps[(i + 1) % 3]);
        let cost_b = b.len() as f64 * theta(self.n, 1.0 - self.cfg.eps[i]);
        let mut v = Relation::new(2);
        if cost_a <= cost_b {
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

    /// Stops all rebalancing; used by [`static_count`].
    fn freeze(&mut self) {
        self.rebalancing = false;
    }
}

struct Mover<'a> {
    st: &'a mut TriangleState,
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

impl Probe for TriangleState {
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

impl Engine for TriangleState {
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel < 3 && t.len() == 2 && m != 0);
        let key = t[0];
        let part = self.route(rel, key);
        let (_, new) = self.apply(rel, part, t, m);
        track_size(&mut self.db_size, new, m);
        if !self.rebalancing {
            return;
        }
        if resize(&mut self.n, self.db_size) {
            self.major_rebalance();
            return;
        }
        let th = self.theta_of(rel);
        let p = &self.parts[rel];
        self.ops.lookups_n(2);
        let light_deg = p.light().degree(FIRST, &[key]) as f64;
        let heavy_deg = p.heavy().degree(FIRST, &[key]);
        if light_deg >= 1.5 * th {
            self.minor_rebalance(rel, key, Direction::LightToHeavy);
        } else if heavy_deg > 0 && (heavy_deg as f64) < 0.5 * th {
            self.minor_rebalance(rel, key, Direction::HeavyToLight);
        }
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
        if self.rebalancing {
            size_invariant(self.n, self.db_size)?;
        }
        for (i, p) in self.parts.iter().enumerate() {
            let mut p = p.clone();
            p.set_theta(self.theta_of(i));
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

/// Triangle count of a static database: each tuple is classified heavy iff
/// its key degree is at least √|D|, then inserted with rebalancing disabled.
pub fn static_count(db: &[Relation; 3]) -> Result<i64, EngineError> {
    static_count_with_ops(db).map(|(q, _)| q)
}

/// [`static_count`] together with the op counts it spent.
pub fn static_count_with_ops(db: &[Relation; 3]) -> Result<(i64, crate::metrics::OpCounts), EngineError> {
    for (rel, r) in db.iter().enumerate() {
        if r.arity() != 2 {
            return Err(EngineError::Schema { rel, expected: 2, got: r.arity() });
        }
    }
    let size: usize = db.iter().map(Relation::len).sum();
    let mut st = TriangleState::new(EpsConfig::uniform(0.5)?);
    st.n = size.max(1) as u64;
    st.freeze();
    let th = (size as f64).sqrt();
    for (i, r) in db.iter().enumerate() {
        let mut deg = template2();
        for (t, m) in r.iter() {
            st.ops.iteration();
            deg.update(t, m);
        }
        for (t, m) in r.iter() {
            st.ops.iteration();
            st.ops.lookup();
            let part = (deg.degree(FIRST, &[t[0]]) as f64 >= th) as usize;
            let (_, new) = st.apply(i, part, t, m);
            track_size(&mut st.db_size, new, m);
        }
    }
    Ok((st.q, st.ops.snapshot()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(r: &[([Value; 2], Mult)], s: &[([Value; 2], Mult)], t: &[([Value; 2], Mult)]) -> [Relation; 3] {
        let mk = |e: &[([Value; 2], Mult)]| Relation::from_entries(2, e.iter().map(|(t, m)| (t, *m))).unwrap();
        [mk(r), mk(s), mk(t)]
    }

    #[test]
    fn preprocess_empty() {
        let st = TriangleState::preprocess(&db(&[], &[], &[]), EpsConfig::uniform(0.5).unwrap()).unwrap();
        assert_eq!(st.threshold_base(), 1);
        assert_eq!(st.answer(), 0);
        assert_eq!(st.space(), 0);
    }

    #[test]
    fn preprocess_single_triangle() {
        let d = db(&[([1, 2], 1)], &[([2, 3], 1)], &[([3, 1], 1)]);
        let st = TriangleState::preprocess(&d, EpsConfig::uniform(0.5).unwrap()).unwrap();
        assert_eq!(st.threshold_base(), 7);
        assert_eq!(st.answer(), 1);
        st.check_invariants().unwrap();
    }

    #[test]
    fn weighted_answer() {
        let d = db(&[([1, 2], 2)], &[([2, 3], 3)], &[([3, 1], 1)]);
        for eps in [0.0, 0.5, 1.0] {
            let st = TriangleState::preprocess(&d, EpsConfig::uniform(eps).unwrap()).unwrap();
            assert_eq!(st.answer(), 6);
        }
        assert_eq!(static_count(&d).unwrap(), 6);
    }

    #[test]
    fn apply_update_light_r() {
        let mut st = TriangleState::new(EpsConfig::uniform(0.5).unwrap());
        st.on_update(1, &[2, 3], 1);
        st.on_update(2, &[3, 1], 1);
        let before = st.clone();
        let dq = st.apply_update(0, Part::Light, &[1, 2], 1);
        assert_eq!(dq, 1);
        assert_eq!(st.answer(), 1);
        assert_eq!(st.apply_update(0, Part::Light, &[1, 2], -1), -1);
        assert_eq!(st.answer(), 0);
        for i in 0..3 {
            assert_eq!(st.view(i), before.view(i));
            assert_eq!(st.partition(i).len(), before.partition(i).len());
        }
    }

    #[test]
    fn empty_join_delta() {
        let mut st = TriangleState::new(EpsConfig::uniform(0.5).unwrap());
        assert_eq!(st.apply_update(0, Part::Light, &[1, 2], 1), 0);
    }

    #[test]
    fn first_insert_doubles() {
        let mut st = TriangleState::new(EpsConfig::uniform(0.5).unwrap());
        st.on_update(0, &[1, 2], 1);
        assert_eq!(st.threshold_base(), 2);
        assert_eq!(st.counters().snapshot().rebalance_major, 1);
        assert_eq!(st.db_size() as u64 * 2, st.threshold_base());
    }

    #[test]
    fn minor_rebalance_light_to_heavy() {
        // N reaches 8 at |D| = 4 while key 1 still has degree 2 < 8^½.
        let mut st = TriangleState::new(EpsConfig::uniform(0.5).unwrap());
        st.on_update(1, &[100, 0], 1);
        st.on_update(1, &[101, 0], 1);
        st.on_update(0, &[1, 0], 1);
        st.on_update(0, &[1, 1], 1);
        assert_eq!(st.threshold_base(), 8);
        assert_eq!(st.partition(0).light().len(), 2);
        // Light→heavy fires once the light degree reaches ⌈1.5·√8⌉ = 5.
        for b in 2..4 {
            st.on_update(0, &[1, b], 1);
            assert_eq!(st.partition(0).heavy().len(), 0);
        }
        st.on_update(0, &[1, 4], 1);
        assert_eq!(st.threshold_base(), 8);
        assert_eq!(st.partition(0).heavy().len(), 5);
        assert_eq!(st.partition(0).light().len(), 0);
        assert_eq!(st.counters().snapshot().rebalance_minor, 1);
        assert_eq!(st.route(0, 1), H);
        st.check_invariants().unwrap();
    }

    #[test]
    fn factorized_configs() {
        assert!(EpsConfig::factorized(0.0, 0.0, 1.0).is_ok());
        assert!(EpsConfig::factorized(1.0, 0.0, 1.0).is_ok());
        assert!(EpsConfig::factorized(1.0, 1.0, 0.0).is_ok());
        assert!(EpsConfig::factorized(1.0, 1.0, 1.0).is_err());
        assert!(EpsConfig::factorized(0.5, 0.0, 1.0).is_err());
        assert!(EpsConfig::uniform(1.5).is_err());
    }
}
