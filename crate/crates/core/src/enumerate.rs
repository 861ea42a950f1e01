//! Full triangle query `Q(a,b,c) = R(a,b)·S(b,c)·T(c,a)` with
//! constant-delay enumeration.
//!
//! The hhh and lll combinations are kept listed in `Q^L(a,b,c)`. Every other
//! combination has exactly one cyclic position `i` with `K_i` heavy and
//! `K_{i+1}` light, and is covered by the view tree of that position:
//!
//! ```text
//! V3_i(x_i, x_{i+1}, x_{i+2}) = K_i^h(x_i, x_{i+1}) · K_{i+1}^l(x_{i+1}, x_{i+2})
//! V2_i(x_i, x_{i+2})          = Σ_{x_{i+1}} V3_i
//! Qf_i^t(x_i, x_{i+2})        = V2_i · K_{i+2}^t(x_{i+2}, x_i)      t ∈ {h, l}
//! ```
//!
//! Enumeration walks, for each `(i, t)`, the keys `(x_i, x_{i+2})` that have
//! at least one `V3_i` entry and a nonzero `K_{i+2}^t` entry, then the `V3_i`
//! entries under that key. The key set is kept in a support view holding
//! entry counts: with signed multiplicities `V2_i` may sum to zero over
//! entries that are individually nonzero, so `Qf` alone cannot drive it.

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::relation::{move_key, Direction, Entries, IndexId, Matching, MoveSink, Mult, Part, Partition, Relation, Tuple, Value};
use crate::triangle::template2;

const FIRST: IndexId = 0;
const SECOND: IndexId = 1;
const ENDS: IndexId = 0;
const H: usize = 1;
const L: usize = 0;

fn canon(i: usize, xs: [Value; 3]) -> [Value; 3] {
    let mut out = [0; 3];
    for k in 0..3 {
        out[(i + k) % 3] = xs[k];
    }
    out
}

fn v3_template() -> Relation {
    let mut r = Relation::new(3);
    r.add_index(&[0, 2]);
    r
}

#[derive(Debug, Clone, PartialEq)]
struct Views {
    ql: Relation,
    v3: [Relation; 3],
    v2: [Relation; 3],
    qf: [[Relation; 2]; 3],
    sup: [[Relation; 2]; 3],
}

impl Views {
    fn new() -> Self {
        let r2 = || Relation::new(2);
        Views {
            ql: Relation::new(3),
            v3: [v3_template(), v3_template(), v3_template()],
            v2: [r2(), r2(), r2()],
            qf: [[r2(), r2()], [r2(), r2()], [r2(), r2()]],
            sup: [[r2(), r2()], [r2(), r2()], [r2(), r2()]],
        }
    }

    fn len(&self) -> usize {
        self.ql.len()
            + self.v3.iter().map(Relation::len).sum::<usize>()
            + self.v2.iter().map(Relation::len).sum::<usize>()
            + self.qf.iter().flatten().map(Relation::len).sum::<usize>()
    }

    fn access(&self) -> (u64, u64) {
        let mut acc = self.ql.access_counts();
        for r in self.v3.iter().chain(&self.v2).chain(self.qf.iter().flatten()).chain(self.sup.iter().flatten()) {
            acc = add_access(acc, r.access_counts());
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct EnumState {
    eps: f64,
    n: u64,
    parts: [Partition; 3],
    views: Views,
    q: i64,
    db_size: usize,
    ops: OpCounter,
}

/// `V3_j(p,q,s) += d` and the propagation to `V2_j`, `Qf_j`, and the support.
fn bump_v3(parts: &[Partition; 3], views: &mut Views, q: &mut i64, ops: &OpCounter, j: usize, pqs: [Value; 3], d: Mult) {
    let [p, _, s] = pqs;
    let new = views.v3[j].update(&pqs, d);
    let old = new - d;
    views.v2[j].update(&[p, s], d);
    for t in [L, H] {
        ops.lookup();
        let kt = parts[(j + 2) % 3].part(t).get(&[s, p]);
        if kt != 0 {
            views.qf[j][t].update(&[p, s], d * kt);
            *q += d * kt;
            if old == 0 {
                views.sup[j][t].update(&[p, s], 1);
            } else if new == 0 {
                views.sup[j][t].update(&[p, s], -1);
            }
        }
    }
}

impl EnumState {
    pub fn new(eps: f64) -> Result<Self, EngineError> {
        let eps = check_eps(eps)?;
        let part = || Partition::new(&template2(), &[&[0]], theta(1, eps));
        Ok(EnumState {
            eps,
            n: 1,
            parts: [part(), part(), part()],
            views: Views::new(),
            q: 0,
            db_size: 0,
            ops: OpCounter::new(),
        })
    }

    pub fn partition(&self, rel: usize) -> &Partition {
        &self.parts[rel]
    }

    /// The listed hhh/lll results.
    pub fn listing(&self) -> &Relation {
        &self.views.ql
    }

    /// `V3_i`, over `(x_i, x_{i+1}, x_{i+2})`.
    pub fn pair_view(&self, i: usize) -> &Relation {
        &self.views.v3[i]
    }

    /// `V2_i`, over `(x_i, x_{i+2})`.
    pub fn projected_view(&self, i: usize) -> &Relation {
        &self.views.v2[i]
    }

    /// `Qf_i^t`, over `(x_i, x_{i+2})`.
    pub fn root_view(&self, i: usize, t: Part) -> &Relation {
        &self.views.qf[i][t.is_heavy() as usize]
    }

    /// Applies `{t ↦ m}` to part `part` of relation `rel`.
    pub fn apply_update_enum(&mut self, rel: usize, part: Part, t: &[Value], m: Mult) {
        self.apply(rel, part.is_heavy() as usize, t, m);
    }

    fn apply(&mut self, i: usize, r: usize, t: &[Value], m: Mult) -> Mult {
        let (x, y) = (t[0], t[1]);
        let EnumState { parts, views, q, ops, .. } = self;
        let next = &parts[(i + 1) % 3];
        let prev = &parts[(i + 2) % 3];
        if r == H {
            for (u, pm) in prev.part(H).matching(SECOND, &[x]) {
                ops.iteration();
                ops.lookup();
                let nm = next.part(H).get(&[y, u[0]]);
                if nm != 0 {
                    views.ql.update(&canon(i, [x, y, u[0]]), m * nm * pm);
                    *q += m * nm * pm;
                }
            }
            for (u, nm) in next.part(L).matching(FIRST, &[y]) {
                ops.iteration();
                bump_v3(parts, views, q, ops, i, [x, y, u[1]], m * nm);
            }
        } else {
            for (u, nm) in next.part(L).matching(FIRST, &[y]) {
                ops.iteration();
                ops.lookup();
                let pm = prev.part(L).get(&[u[1], x]);
                if pm != 0 {
                    views.ql.update(&canon(i, [x, y, u[1]]), m * nm * pm);
                    *q += m * nm * pm;
                }
            }
            for (u, pm) in prev.part(H).matching(SECOND, &[x]) {
                ops.iteration();
                bump_v3(parts, views, q, ops, (i + 2) % 3, [u[0], x, y], pm * m);
            }
        }
        // View i+1 has K_i at its root, keyed (x_{i+1}, x_i) = (y, x).
        let j = (i + 1) % 3;
        ops.lookups_n(2);
        let v2 = views.v2[j].get(&[y, x]);
        if v2 != 0 {
            views.qf[j][r].update(&[y, x], v2 * m);
            *q += v2 * m;
        }
        let old = parts[i].part(r).get(t);
        let new = parts[i].apply(r, t, m);
        if (old == 0) != (new == 0) {
            ops.lookup();
            let deg = views.v3[j].degree(ENDS, &[y, x]) as Mult;
            if deg > 0 {
                views.sup[j][r].update(&[y, x], if new != 0 { deg } else { -deg });
            }
        }
        new
    }

    fn compute_views(&self, ops: &OpCounter) -> Views {
        let mut v = Views::new();
        let p = &self.parts;
        for (t, rm) in p[0].part(H).iter() {
            ops.iteration();
            for (u, tm) in p[2].part(H).matching(SECOND, &[t[0]]) {
                ops.iteration();
                let sm = p[1].part(H).get(&[t[1], u[0]]);
                if sm != 0 {
                    v.ql.update(&[t[0], t[1], u[0]], rm * sm * tm);
                }
            }
        }
        for (t, rm) in p[0].part(L).iter() {
            ops.iteration();
            for (u, sm) in p[1].part(L).matching(FIRST, &[t[1]]) {
                ops.iteration();
                let tm = p[2].part(L).get(&[u[1], t[0]]);
                if tm != 0 {
                    v.ql.update(&[t[0], t[1], u[1]], rm * sm * tm);
                }
            }
        }
        for j in 0..3 {
            for (t, hm) in p[j].part(H).iter() {
                ops.iteration();
                for (u, lm) in p[(j + 1) % 3].part(L).matching(FIRST, &[t[1]]) {
                    ops.iteration();
                    v.v3[j].update(&[t[0], t[1], u[1]], hm * lm);
                    v.v2[j].update(&[t[0], u[1]], hm * lm);
                }
            }
            for (k, vm) in v.v2[j].iter() {
                ops.iteration();
                for t in [L, H] {
                    let kt = p[(j + 2) % 3].part(t).get(&[k[1], k[0]]);
                    if kt != 0 {
                        v.qf[j][t].update(k, vm * kt);
                    }
                }
            }
            for (k, deg) in v.v3[j].keys(ENDS) {
                ops.iteration();
                for t in [L, H] {
                    if p[(j + 2) % 3].part(t).get(&[k[1], k[0]]) != 0 {
                        v.sup[j][t].update(k, deg as Mult);
                    }
                }
            }
        }
        v
    }

    pub fn major_rebalance(&mut self) {
        self.ops.major();
        for i in 0..3 {
            let visited = self.parts[i].repartition(theta(self.n, self.eps));
            self.ops.moved(visited as u64);
        }
        self.views = self.compute_views(&self.ops);
    }

    pub fn minor_rebalance(&mut self, rel: usize, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(&mut Mover { st: self, rel }, 0, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }

    /// Constant-delay stream of `(a,b,c)` with nonzero multiplicity.
    pub fn enumerate(&self) -> Enumeration<'_> {
        Enumeration { st: self, stage: 0, outer: None, inner: None, k: 0, i: 0, ql: self.views.ql.iter(), steps: 0 }
    }
}

/// Iterator returned by [`EnumState::enumerate`].
pub struct Enumeration<'a> {
    st: &'a EnumState,
    stage: usize,
    ql: Entries<'a>,
    outer: Option<Entries<'a>>,
    inner: Option<Matching<'a>>,
    k: Mult,
    i: usize,
    steps: u64,
}

impl Enumeration<'_> {
    /// Primitive steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }
}

impl Iterator for Enumeration<'_> {
    type Item = (Tuple, Mult);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(inner) = &mut self.inner {
                self.steps += 1;
                if let Some((t, vm)) = inner.next() {
                    return Some((Tuple::from(canon(self.i, [t[0], t[1], t[2]])), vm * self.k));
                }
                self.inner = None;
            }
            if self.stage == 0 {
                self.steps += 1;
                if let Some((t, m)) = self.ql.next() {
                    return Some((t.clone(), m));
                }
                self.stage = 1;
            }
            if self.stage > 6 {
                return None;
            }
            let (i, t) = ((self.stage - 1) / 2, (self.stage - 1) % 2);
            let views = &self.st.views;
            let outer = self.outer.get_or_insert_with(|| views.sup[i][t].iter());
            self.steps += 1;
            match outer.next() {
                Some((key, _)) => {
                    self.steps += 2;
                    self.k = self.st.parts[(i + 2) % 3].part(t).peek(&[key[1], key[0]]);
                    self.i = i;
                    self.inner = Some(views.v3[i].matching(ENDS, key));
                }
                None => {
                    self.outer = None;
                    self.stage += 1;
                }
            }
        }
    }
}

struct Mover<'a> {
    st: &'a mut EnumState,
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

impl Probe for EnumState {
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
        self.parts.iter().map(Partition::len).sum::<usize>() + self.views.len()
    }
}

impl Engine for EnumState {
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel < 3 && t.len() == 2 && m != 0);
        let key = t[0];
        let force = self.eps == 0.0;
        if !force {
            self.ops.lookup();
        }
        let part = self.parts[rel].route_dim(0, &[key], force).is_heavy() as usize;
        let new = self.apply(rel, part, t, m);
        track_size(&mut self.db_size, new, m);
        if resize(&mut self.n, self.db_size) {
            self.major_rebalance();
            return;
        }
        let th = theta(self.n, self.eps);
        self.ops.lookups_n(2);
        let light = self.parts[rel].light().degree(FIRST, &[key]);
        let heavy = self.parts[rel].heavy().degree(FIRST, &[key]);
        if light as f64 >= 1.5 * th {
            self.minor_rebalance(rel, key, Direction::LightToHeavy);
        } else if heavy > 0 && (heavy as f64) < 0.5 * th {
            self.minor_rebalance(rel, key, Direction::HeavyToLight);
        }
    }

    /// Sum of all result multiplicities.
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
        let fresh = self.compute_views(&OpCounter::new());
        let v = &self.views;
        compare_view("Q^L", &v.ql, &fresh.ql)?;
        for j in 0..3 {
            compare_view(&format!("V3_{j}"), &v.v3[j], &fresh.v3[j])?;
            compare_view(&format!("V2_{j}"), &v.v2[j], &fresh.v2[j])?;
            for t in [L, H] {
                compare_view(&format!("Qf_{j}^{t}"), &v.qf[j][t], &fresh.qf[j][t])?;
                compare_view(&format!("support_{j}^{t}"), &v.sup[j][t], &fresh.sup[j][t])?;
            }
        }
        let total: i64 = v.ql.iter().map(|e| e.1).chain(v.qf.iter().flatten().flat_map(|r| r.iter().map(|e| e.1))).sum();
        if total != self.q {
            return Err(format!("answer {} differs from view total {}", self.q, total));
        }
        Ok(())
    }

    fn access_totals(&self) -> (u64, u64) {
        let mut acc = self.views.access();
        for p in &self.parts {
            acc = add_access(acc, partition_access(p));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(st: &EnumState) -> Vec<(Tuple, Mult)> {
        let mut v: Vec<_> = st.enumerate().collect();
        v.sort();
        v
    }

    #[test]
    fn one_triangle() {
        for eps in [0.0, 0.5, 1.0] {
            let mut st = EnumState::new(eps).unwrap();
            assert!(sorted(&st).is_empty());
            st.on_update(0, &[1, 2], 1);
            st.on_update(1, &[2, 3], 1);
            st.on_update(2, &[3, 1], 1);
            assert_eq!(sorted(&st), vec![(Tuple::from([1, 2, 3]), 1)]);
            st.on_update(1, &[2, 3], -1);
            assert!(sorted(&st).is_empty());
            st.check_invariants().unwrap();
        }
    }

    #[test]
    fn shared_edge() {
        let mut st = EnumState::new(0.5).unwrap();
        for (rel, t) in [(0, [1, 2]), (1, [2, 3]), (2, [3, 1]), (1, [2, 4]), (2, [4, 1])] {
            st.on_update(rel, &t, 1);
        }
        assert_eq!(sorted(&st), vec![(Tuple::from([1, 2, 3]), 1), (Tuple::from([1, 2, 4]), 1)]);
    }

    #[test]
    fn t_update_leaves_rs_tree() {
        let mut st = EnumState::new(0.5).unwrap();
        st.apply_update_enum(0, Part::Heavy, &[1, 2], 1);
        st.apply_update_enum(1, Part::Light, &[2, 3], 1);
        let (v3, v2) = (st.pair_view(0).clone(), st.projected_view(0).clone());
        assert_eq!(v3.len(), 1);
        st.apply_update_enum(2, Part::Light, &[3, 1], 1);
        assert_eq!(st.pair_view(0), &v3);
        assert_eq!(st.projected_view(0), &v2);
        assert_eq!(st.root_view(0, Part::Light).len(), 1);
        assert_eq!(sorted(&st), vec![(Tuple::from([1, 2, 3]), 1)]);
    }

    #[test]
    fn cancelling_projection_still_enumerates() {
        let mut st = EnumState::new(0.5).unwrap();
        st.apply_update_enum(0, Part::Heavy, &[1, 2], 1);
        st.apply_update_enum(0, Part::Heavy, &[1, 5], 1);
        st.apply_update_enum(1, Part::Light, &[2, 3], 1);
        st.apply_update_enum(1, Part::Light, &[5, 3], -1);
        st.apply_update_enum(2, Part::Light, &[3, 1], 1);
        assert_eq!(st.projected_view(0).len(), 0);
        assert_eq!(sorted(&st), vec![(Tuple::from([1, 2, 3]), 1), (Tuple::from([1, 5, 3]), -1)]);
    }
}
