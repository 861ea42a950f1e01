//! Loomis-Whitney count queries of degree `n ≥ 3`.
//!
//! Variables are `A_0..A_{n-1}`. Relation `R_j` omits `A_{j-1}`; its column
//! `c` holds `A_{(j+c) mod n}`, so column 0 is the partition key `A_j`.
//! View `V_k` has the schema of `R_k` and is
//! `Σ_{A_{k-1}} R_{k+1}^h · R_{k+2}^l ⋯ R_{k-1}^l`.

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::oracle::{brute_force_count, QuerySpec};
use crate::relation::{
    move_key, strict_partition, Direction, IndexId, MoveSink, Mult, Part, Partition, Relation, Tuple, Value,
};

const H: usize = 1;
const L: usize = 0;

/// One factor of a join: a relation restricted to one part, or whole.
#[derive(Clone, Copy)]
struct Factor {
    rel: usize,
    part: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct LwState {
    deg: usize,
    eps: f64,
    n: u64,
    parts: Vec<Partition>,
    views: Vec<Relation>,
    /// `by_missing[c]` indexes every column except `c`.
    by_missing: Vec<IndexId>,
    q: i64,
    db_size: usize,
    ops: OpCounter,
}

impl LwState {
    pub fn new(deg: usize, eps: f64) -> Result<Self, EngineError> {
        if deg < 3 {
            return Err(EngineError::Config(format!("Loomis-Whitney degree {deg} below 3")));
        }
        let eps = check_eps(eps)?;
        let mut tpl = Relation::new(deg - 1);
        let by_missing: Vec<_> =
            (0..deg - 1).map(|c| tpl.add_index(&(0..deg - 1).filter(|&x| x != c).collect::<Vec<_>>())).collect();
        let part = Partition::new(&tpl, &[&[0]], theta(1, eps));
        Ok(LwState {
            deg,
            eps,
            n: 1,
            parts: vec![part; deg],
            views: vec![Relation::new(deg - 1); deg],
            by_missing,
            q: 0,
            db_size: 0,
            ops: OpCounter::new(),
        })
    }

    /// State for database `db` (relation `j` at position `j`): N = 2|D|+1,
    /// strict partitions, views and the count.
    pub fn preprocess(db: &[Relation], eps: f64) -> Result<Self, EngineError> {
        let mut st = LwState::new(db.len(), eps)?;
        for (rel, r) in db.iter().enumerate() {
            if r.arity() != st.deg - 1 {
                return Err(EngineError::Schema { rel, expected: st.deg - 1, got: r.arity() });
            }
        }
        st.db_size = db.iter().map(Relation::len).sum();
        st.n = 2 * st.db_size as u64 + 1;
        let tpl = st.parts[0].light().empty_like();
        for (j, r) in db.iter().enumerate() {
            let mut copy = tpl.empty_like();
            for (t, m) in r.iter() {
                st.ops.iteration();
                copy.update(t, m);
            }
            st.parts[j] = strict_partition(&copy, &[0], theta(st.n, eps));
        }
        st.recompute();
        Ok(st)
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn partition(&self, rel: usize) -> &Partition {
        &self.parts[rel]
    }

    pub fn view(&self, k: usize) -> &Relation {
        &self.views[k]
    }

    fn md(&self, v: usize) -> usize {
        v % self.deg
    }

    /// Column of variable `v` in relation `j`.
    fn col(&self, j: usize, v: usize) -> usize {
        (v + self.deg - j) % self.deg
    }

    fn tuple_of(&self, j: usize, vals: &[Value]) -> Tuple {
        (0..self.deg - 1).map(|c| vals[self.md(j + c)]).collect()
    }

    /// Key of relation `j` on every column except the one holding `free`.
    fn key_without(&self, j: usize, free: usize, vals: &[Value]) -> Tuple {
        let skip = self.col(j, free);
        (0..self.deg - 1).filter(|&c| c != skip).map(|c| vals[self.md(j + c)]).collect()
    }

    fn rels_of(&self, f: Factor) -> impl Iterator<Item = &Relation> {
        let p = &self.parts[f.rel];
        let (lo, hi) = match f.part {
            Some(x) => (x, x + 1),
            None => (0, 2),
        };
        p.parts()[lo..hi].iter()
    }

    fn match_count(&self, f: Factor, free: usize, vals: &[Value]) -> usize {
        let ix = self.by_missing[self.col(f.rel, free)];
        let key = self.key_without(f.rel, free, vals);
        self.ops.lookup();
        self.rels_of(f).map(|r| r.degree(ix, &key)).sum()
    }

    /// Calls `emit(x, w)` for each value `x` of variable `free` with
    /// `w = Π factors` nonzero, iterating `factors[it]` and probing the rest.
    fn sum_over(
        &self,
        ops: &OpCounter,
        factors: &[Factor],
        it: usize,
        free: usize,
        vals: &mut [Value],
        mut emit: impl FnMut(Value, Mult),
    ) {
        let f = factors[it];
        let c = self.col(f.rel, free);
        let key = self.key_without(f.rel, free, vals);
        for r in self.rels_of(f) {
            for (u, um) in r.matching(self.by_missing[c], &key) {
                ops.iteration();
                vals[free] = u[c];
                let mut w = um;
                for (k, g) in factors.iter().enumerate() {
                    if k == it {
                        continue;
                    }
                    ops.lookup();
                    let t = self.tuple_of(g.rel, vals);
                    w *= self.rels_of(*g).map(|r| r.get(&t)).sum::<Mult>();
                    if w == 0 {
                        break;
                    }
                }
                if w != 0 {
                    emit(u[c], w);
                }
            }
        }
    }

    fn argmin_count(&self, factors: &[Factor], counts: &[usize]) -> usize {
        (0..factors.len()).min_by_key(|&k| counts[k]).unwrap()
    }

    /// Δ of the query from `{t ↦ m}` on part `r` of relation `i`, then the
    /// view deltas; does not touch the relation itself.
    fn deltas(&mut self, i: usize, r: usize, t: &[Value], m: Mult) -> i64 {
        let n = self.deg;
        let x = self.md(i + n - 1);
        let prev = x;
        let mut vals = vec![0; n];
        for c in 0..n - 1 {
            vals[self.md(i + c)] = t[c];
        }
        let others: Vec<usize> = (1..n).map(|d| self.md(i + d)).collect();
        let mut counts = vec![[0usize; 2]; n - 1];
        for (k, &j) in others.iter().enumerate() {
            for u in [L, H] {
                counts[k][u] = self.match_count(Factor { rel: j, part: Some(u) }, x, &vals);
            }
        }
        let ops = &self.ops;
        let mut sum = 0;
        for mask in 0..1usize << (n - 1) {
            let u = |k: usize| (mask >> k) & 1;
            if (0..n - 1).any(|k| counts[k][u(k)] == 0) {
                continue;
            }
            // others[0] is R_{i+1}, others[n-2] is R_{i-1}.
            if u(0) == H && (1..n - 1).all(|k| u(k) == L) {
                ops.lookup();
                sum += self.views[i].get(t);
                continue;
            }
            let factors: Vec<Factor> =
                others.iter().enumerate().map(|(k, &j)| Factor { rel: j, part: Some(u(k)) }).collect();
            let first_light = (0..n - 2).find(|&k| u(k) == L);
            let it = match (u(n - 2), first_light) {
                (H, Some(k)) if self.eps <= 0.5 => k,
                (H, _) => n - 2,
                (_, Some(k)) => k,
                _ => {
                    let c: Vec<_> = (0..n - 1).map(|k| counts[k][u(k)]).collect();
                    self.argmin_count(&factors, &c)
                }
            };
            self.sum_over(ops, &factors, it, x, &mut vals, |_, w| sum += w);
        }
        let dq = m * sum;
        self.q += dq;

        let targets: Vec<usize> = if r == H { vec![prev] } else { (1..n - 1).map(|d| self.md(i + d)).collect() };
        for k in targets {
            let heavy = self.md(k + 1);
            let ks: Vec<usize> = others.iter().enumerate().filter(|&(_, &j)| j != k).map(|(idx, _)| idx).collect();
            let factors: Vec<Factor> = ks
                .iter()
                .map(|&idx| {
                    let j = others[idx];
                    Factor { rel: j, part: Some(if j == heavy { H } else { L }) }
                })
                .collect();
            let c: Vec<usize> = ks.iter().zip(&factors).map(|(&idx, f)| counts[idx][f.part.unwrap()]).collect();
            if c.contains(&0) {
                continue;
            }
            let it = factors
                .iter()
                .enumerate()
                .filter(|(_, f)| f.rel != prev && f.part == Some(L))
                .min_by_key(|(_, f)| f.rel)
                .map(|(p, _)| p)
                .or_else(|| factors.iter().position(|f| f.rel == prev && f.part == Some(H)))
                .unwrap_or_else(|| self.argmin_count(&factors, &c));
            let mut out = Vec::new();
            self.sum_over(ops, &factors, it, x, &mut vals, |xv, w| out.push((xv, w)));
            for (xv, w) in out {
                vals[x] = xv;
                let key = self.tuple_of(k, &vals);
                self.views[k].update(&key, m * w);
            }
        }
        dq
    }

    fn apply(&mut self, i: usize, r: usize, t: &[Value], m: Mult) -> (i64, Mult) {
        let dq = self.deltas(i, r, t, m);
        let new = self.parts[i].apply(r, t, m);
        (dq, new)
    }

    /// Applies `{t ↦ m}` to one part of `R_rel`; returns δQ.
    pub fn apply_update_lw(&mut self, rel: usize, part: Part, t: &[Value], m: Mult) -> i64 {
        self.apply(rel, part.is_heavy() as usize, t, m).0
    }

    fn compute_view(&self, k: usize, ops: &OpCounter) -> Relation {
        let n = self.deg;
        let factors: Vec<Factor> = (1..n)
            .map(|d| Factor { rel: self.md(k + d), part: Some(if d == 1 { H } else { L }) })
            .collect();
        let outer = if self.parts[factors[0].rel].heavy().len() <= self.parts[factors[1].rel].light().len() { 0 } else { 1 };
        let rest: Vec<Factor> = factors.iter().enumerate().filter(|&(p, _)| p != outer).map(|(_, f)| *f).collect();
        let of = factors[outer];
        let free = self.md(of.rel + n - 1);
        let mut v = Relation::new(n - 1);
        let mut vals = vec![0; n];
        for (t, m) in self.parts[of.rel].part(of.part.unwrap()).iter() {
            ops.iteration();
            for c in 0..n - 1 {
                vals[self.md(of.rel + c)] = t[c];
            }
            let counts: Vec<usize> = rest.iter().map(|f| self.match_count(*f, free, &vals)).collect();
            let it = self.argmin_count(&rest, &counts);
            let mut out = Vec::new();
            self.sum_over(ops, &rest, it, free, &mut vals, |xv, w| out.push((xv, w)));
            for (xv, w) in out {
                vals[free] = xv;
                v.update(&self.tuple_of(k, &vals), m * w);
            }
        }
        v
    }

    fn compute_count(&self, ops: &OpCounter) -> i64 {
        let n = self.deg;
        let rest: Vec<Factor> = (1..n).map(|j| Factor { rel: j, part: None }).collect();
        let free = n - 1;
        let mut vals = vec![0; n];
        let mut q = 0;
        for (t, m) in self.parts[0].parts().iter().flat_map(|p| p.iter()) {
            ops.iteration();
            vals[..n - 1].copy_from_slice(t);
            let counts: Vec<usize> = rest.iter().map(|f| self.match_count(*f, free, &vals)).collect();
            if counts.contains(&0) {
                continue;
            }
            let it = self.argmin_count(&rest, &counts);
            self.sum_over(ops, &rest, it, free, &mut vals, |_, w| q += m * w);
        }
        q
    }

    fn recompute(&mut self) {
        self.views = (0..self.deg).map(|k| self.compute_view(k, &self.ops)).collect();
        self.q = self.compute_count(&self.ops);
    }

    pub fn major_rebalance(&mut self) {
        self.ops.major();
        for p in &mut self.parts {
            let visited = p.repartition(theta(self.n, self.eps));
            self.ops.moved(visited as u64);
        }
        self.views = (0..self.deg).map(|k| self.compute_view(k, &self.ops)).collect();
    }

    pub fn minor_rebalance(&mut self, rel: usize, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(&mut Mover { st: self, rel }, 0, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }
}

struct Mover<'a> {
    st: &'a mut LwState,
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

impl Probe for LwState {
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

impl Engine for LwState {
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel < self.deg && t.len() == self.deg - 1 && m != 0);
        let key = t[0];
        let force = self.eps == 0.0;
        if !force {
            self.ops.lookup();
        }
        let part = self.parts[rel].route_dim(0, &[key], force).is_heavy() as usize;
        let (_, new) = self.apply(rel, part, t, m);
        track_size(&mut self.db_size, new, m);
        if resize(&mut self.n, self.db_size) {
            self.major_rebalance();
            return;
        }
        let th = theta(self.n, self.eps);
        let ix = self.parts[rel].dim_index(0);
        self.ops.lookups_n(2);
        let light = self.parts[rel].light().degree(ix, &[key]);
        let heavy = self.parts[rel].heavy().degree(ix, &[key]);
        if light as f64 >= 1.5 * th {
            self.minor_rebalance(rel, key, Direction::LightToHeavy);
        } else if heavy > 0 && (heavy as f64) < 0.5 * th {
            self.minor_rebalance(rel, key, Direction::HeavyToLight);
        }
    }

    fn answer(&self) -> i64 {
        self.q
    }

    fn arities(&self) -> Vec<usize> {
        vec![self.deg - 1; self.deg]
    }

    fn check_invariants(&self) -> Result<(), String> {
        let stored: usize = self.parts.iter().map(Partition::len).sum();
        if stored != self.db_size {
            return Err(format!("db_size {} but {} stored entries", self.db_size, stored));
        }
        size_invariant(self.n, self.db_size)?;
        let ops = OpCounter::new();
        for (j, p) in self.parts.iter().enumerate() {
            let mut p = p.clone();
            p.set_theta(theta(self.n, self.eps));
            p.check(false).map_err(|e| format!("relation {j}: {e}"))?;
            compare_view(&format!("V_{j}"), &self.views[j], &self.compute_view(j, &ops))?;
        }
        let db: Vec<Relation> = self
            .parts
            .iter()
            .map(|p| {
                Relation::from_entries(self.deg - 1, p.parts().iter().flat_map(|r| r.iter()).map(|(t, m)| (t.clone(), m)))
                    .expect("stored tuples have the relation arity")
            })
            .collect();
        let q = brute_force_count(&db, QuerySpec::Lw(self.deg));
        if q != self.q {
            return Err(format!("answer {} but brute force gives {}", self.q, q));
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

    const CYCLE4: [[Value; 3]; 4] = [[1, 2, 3], [2, 3, 4], [3, 4, 1], [4, 1, 2]];

    #[test]
    fn degree_below_three() {
        assert!(LwState::new(2, 0.5).is_err());
    }

    #[test]
    fn four_cycle() {
        for eps in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for drop in 0..4 {
                let mut st = LwState::new(4, eps).unwrap();
                for (j, t) in CYCLE4.iter().enumerate() {
                    st.on_update(j, t, 1);
                }
                assert_eq!(st.answer(), 1, "eps {eps}");
                st.check_invariants().unwrap();
                st.on_update(drop, &CYCLE4[drop], -1);
                assert_eq!(st.answer(), 0);
                st.check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn degree_three_triangle() {
        let mut st = LwState::new(3, 0.5).unwrap();
        st.on_update(0, &[1, 2], 1);
        st.on_update(1, &[2, 3], 1);
        st.on_update(2, &[3, 1], 2);
        assert_eq!(st.answer(), 2);
    }

    #[test]
    fn preprocess_matches_stream() {
        let mut st = LwState::new(4, 0.5).unwrap();
        let mut db = vec![Relation::new(3); 4];
        for k in 0..40 {
            let j = k % 4;
            let t = [(k % 3) as Value, (k % 5) as Value, (k % 2) as Value];
            st.on_update(j, &t, 1);
            db[j].update(&t, 1);
        }
        let pre = LwState::preprocess(&db, 0.5).unwrap();
        assert_eq!(pre.answer(), st.answer());
        pre.check_invariants().unwrap();
    }

    #[test]
    fn preprocess_rejects_arity() {
        assert!(matches!(
            LwState::preprocess(&[Relation::new(2), Relation::new(2), Relation::new(3)], 0.5),
            Err(EngineError::Schema { rel: 2, .. })
        ));
    }
}
