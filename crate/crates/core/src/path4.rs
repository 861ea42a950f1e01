//! 4-path count `Q = Σ R(a)·S(a,b)·T(b,c)·U(c)`.
//!
//! The query is symmetric under `a ↔ c`, `R ↔ U`, `S ↔ T`, so state is kept
//! per side: the left side is `R` with `S(a,b)`, the right side is `U` with
//! `T` stored as `(c,b)`. Each middle relation is partitioned on both
//! columns; part index bit 0 is the outer variable (`a` or `c`), bit 1 is
//! `b`.
//!
//! Views, per side `s` with other side `o`:
//!
//! ```text
//! EM[s][p](b)   = Σ_x end_s(x)·mid_s^p(x,b)                 p ∈ {ll, lh, hh}
//! IND[s](b)     = ∃_b mid_s^lh                                (support counts)
//! EMI[s](b)     = IND[o](b) · Σ_x end_s(x)·mid_s^hl(x,b)
//! EX[s](x)      = Σ_y X(s:hl, o:ll)(x,y)·end_o(y)
//! ```
//!
//! and five cross views `X(ps,pt)(a,c) = Σ_b S^ps(a,b)·T^pt(c,b)` for
//! `(ps,pt)` in `{(ll,hl), (hl,ll), (hl,hl), (hl,hh), (hh,hl)}`, a set closed
//! under the mirror.

use crate::engine::{
    add_access, check_eps, compare_view, partition_access, resize, size_invariant, theta, track_size, Engine,
    EngineError,
};
use crate::metrics::{OpCounter, Probe};
use crate::oracle::{brute_force_count, QuerySpec};
use crate::relation::{
    move_key, strict_partition_dims, Direction, IndexId, MoveSink, Mult, Part, Partition, Relation, Tuple, Value,
};
use crate::triangle::template2;

const OUTER: IndexId = 0;
const MID: IndexId = 1;

pub const LL: usize = 0;
pub const HL: usize = 1;
pub const LH: usize = 2;
pub const HH: usize = 3;

const CROSS: [(usize, usize); 5] = [(LL, HL), (HL, LL), (HL, HL), (HL, HH), (HH, HL)];
const EM_PARTS: [usize; 3] = [LL, LH, HH];

/// Side of the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `R` and `S(a,b)`.
    Left,
    /// `U` and `T`, stored as `(c,b)`.
    Right,
}

impl Side {
    fn ix(self) -> usize {
        self as usize
    }
}

fn cross_slot(s: usize, own: usize, other: usize) -> Option<usize> {
    let pair = if s == 0 { (own, other) } else { (other, own) };
    CROSS.iter().position(|&c| c == pair)
}

fn cross_template() -> Relation {
    let mut r = Relation::new(2);
    r.add_index(&[0]);
    r.add_index(&[1]);
    r
}

#[derive(Debug, Clone, PartialEq)]
struct Views {
    em: [[Relation; 4]; 2],
    ind: [Relation; 2],
    emi: [Relation; 2],
    ex: [Relation; 2],
    cross: [Relation; 5],
}

impl Views {
    fn new() -> Self {
        let r1 = || Relation::new(1);
        let em = || [r1(), r1(), r1(), r1()];
        Views {
            em: [em(), em()],
            ind: [r1(), r1()],
            emi: [r1(), r1()],
            ex: [r1(), r1()],
            cross: [cross_template(), cross_template(), cross_template(), cross_template(), cross_template()],
        }
    }

    fn all(&self) -> impl Iterator<Item = &Relation> {
        self.em
            .iter()
            .flatten()
            .chain(&self.ind)
            .chain(&self.emi)
            .chain(&self.ex)
            .chain(&self.cross)
    }
}

#[derive(Debug, Clone)]
pub struct Path4State {
    eps: f64,
    n: u64,
    end: [Relation; 2],
    mid: [Partition; 2],
    views: Views,
    q: i64,
    db_size: usize,
    ops: OpCounter,
}

impl Path4State {
    pub fn new(eps: f64) -> Result<Self, EngineError> {
        let eps = check_eps(eps)?;
        let mid = Partition::new(&template2(), &[&[0], &[1]], theta(1, eps));
        Ok(Path4State {
            eps,
            n: 1,
            end: [Relation::new(1), Relation::new(1)],
            mid: [mid.clone(), mid],
            views: Views::new(),
            q: 0,
            db_size: 0,
            ops: OpCounter::new(),
        })
    }

    /// State for `[R, S, T, U]`: N = 2|D|+1, strict partitions, all views.
    pub fn preprocess(db: &[Relation; 4], eps: f64) -> Result<Self, EngineError> {
        for (rel, (r, a)) in db.iter().zip(QuerySpec::Path4.arities()).enumerate() {
            if r.arity() != a {
                return Err(EngineError::Schema { rel, expected: a, got: r.arity() });
            }
        }
        let mut st = Path4State::new(eps)?;
        st.db_size = db.iter().map(Relation::len).sum();
        st.n = 2 * st.db_size as u64 + 1;
        let th = theta(st.n, eps);
        for (s, e) in [(0, &db[0]), (1, &db[3])] {
            for (t, m) in e.iter() {
                st.ops.iteration();
                st.end[s].update(t, m);
            }
        }
        for (s, r) in [(0, &db[1]), (1, &db[2])] {
            let mut copy = template2();
            for (t, m) in r.iter() {
                st.ops.iteration();
                let stored = if s == 0 { [t[0], t[1]] } else { [t[1], t[0]] };
                copy.update(&stored, m);
            }
            st.mid[s] = strict_partition_dims(&copy, &[&[0], &[1]], th);
        }
        st.views = st.compute_views(&st.ops);
        st.q = st.compute_count(&st.ops);
        Ok(st)
    }

    pub fn end(&self, side: Side) -> &Relation {
        &self.end[side.ix()]
    }

    /// Partition of `S` (left) or of `T` stored as `(c,b)` (right).
    pub fn middle(&self, side: Side) -> &Partition {
        &self.mid[side.ix()]
    }

    /// `Σ_x end(x)·mid^p(x,b)` for `p` in `{LL, LH, HH}`.
    pub fn end_mid_view(&self, side: Side, p: usize) -> &Relation {
        assert!(EM_PARTS.contains(&p));
        &self.views.em[side.ix()][p]
    }

    /// Indicator projection of the `LH` middle part on `b`: 0 or 1.
    pub fn indicator(&self, side: Side, b: Value) -> Mult {
        (self.views.ind[side.ix()].peek(&[b]) > 0) as Mult
    }

    pub fn indicator_view(&self, side: Side) -> Relation {
        let mut r = Relation::new(1);
        for (t, _) in self.views.ind[side.ix()].iter() {
            r.update(t, 1);
        }
        r
    }

    pub fn end_mid_indicator_view(&self, side: Side) -> &Relation {
        &self.views.emi[side.ix()]
    }

    pub fn extended_view(&self, side: Side) -> &Relation {
        &self.views.ex[side.ix()]
    }

    /// `Σ_b S^ps(a,b)·T^pt(c,b)` over `(a,c)`, for one of the five
    /// materialized part pairs.
    pub fn cross_view(&self, ps: usize, pt: usize) -> Option<&Relation> {
        cross_slot(0, ps, pt).map(|k| &self.views.cross[k])
    }

    /// Σ_y X(s:own, o:other)(x,y)·end_o(y).
    fn cross_end_sum(&self, s: usize, own: usize, other: usize, x: Value) -> i64 {
        let Some(k) = cross_slot(s, own, other) else { return 0 };
        let o = 1 - s;
        let mut sum = 0;
        for (t, m) in self.views.cross[k].matching(s as IndexId, &[x]) {
            self.ops.iteration();
            self.ops.lookup();
            sum += m * self.end[o].get(&[t[1 - s]]);
        }
        sum
    }

    /// δQ and view maintenance for `{x ↦ m}` on `end_s`, then applies it.
    fn apply_end(&mut self, s: usize, x: Value, m: Mult) -> Mult {
        let o = 1 - s;
        let ops = &self.ops;
        let (mid, v) = (&self.mid, &self.views);
        let mut sum = 0;
        for p in [LL, LH, HH] {
            for (t, sm) in mid[s].part(p).matching(OUTER, &[x]) {
                ops.iteration();
                ops.lookups_n(3);
                let b = [t[1]];
                let mut w = v.em[o][LL].get(&b) + v.em[o][LH].get(&b) + v.em[o][HH].get(&b);
                if p == LH {
                    ops.lookup();
                    w += v.emi[o].get(&b);
                }
                sum += sm * w;
            }
        }
        ops.lookup();
        let hl_deg = mid[s].part(HL).degree(OUTER, &[x]);
        if hl_deg <= v.em[o][LH].len() {
            for (t, sm) in mid[s].part(HL).matching(OUTER, &[x]) {
                ops.iteration();
                ops.lookup();
                sum += sm * v.em[o][LH].get(&[t[1]]);
            }
        } else {
            for (t, w) in v.em[o][LH].iter() {
                ops.iteration();
                ops.lookup();
                sum += w * mid[s].part(HL).get(&[x, t[0]]);
            }
        }
        ops.lookup();
        sum += v.ex[s].get(&[x]);
        for (own, other) in [(LL, HL), (HL, HL), (HH, HL), (HL, HH)] {
            sum += self.cross_end_sum(s, own, other, x);
        }
        let dq = m * sum;

        let Path4State { mid, views: v, ops, end, .. } = self;
        for p in EM_PARTS {
            for (t, sm) in mid[s].part(p).matching(OUTER, &[x]) {
                ops.iteration();
                v.em[s][p].update(&[t[1]], m * sm);
            }
        }
        ops.lookup();
        let hl_deg = mid[s].part(HL).degree(OUTER, &[x]);
        if hl_deg <= v.ind[o].len() {
            for (t, sm) in mid[s].part(HL).matching(OUTER, &[x]) {
                ops.iteration();
                ops.lookup();
                if v.ind[o].get(&[t[1]]) > 0 {
                    v.emi[s].update(&[t[1]], m * sm);
                }
            }
        } else {
            let mut delta = Vec::new();
            for (t, _) in v.ind[o].iter() {
                ops.iteration();
                ops.lookup();
                let sm = mid[s].part(HL).get(&[x, t[0]]);
                if sm != 0 {
                    delta.push((t[0], sm));
                }
            }
            for (b, sm) in delta {
                v.emi[s].update(&[b], m * sm);
            }
        }
        if let Some(k) = cross_slot(s, LL, HL) {
            for (t, xm) in v.cross[k].matching(s as IndexId, &[x]) {
                ops.iteration();
                v.ex[o].update(&[t[1 - s]], m * xm);
            }
        }
        let new = end[s].update(&[x], m);
        self.q += dq;
        new
    }

    /// δQ and view maintenance for `{(x,b) ↦ m}` on part `p` of `mid_s`
    /// (`x` outer), then applies it.
    fn apply_mid(&mut self, s: usize, p: usize, x: Value, b: Value, m: Mult) -> Mult {
        let o = 1 - s;
        let Path4State { mid, views: v, ops, end, q, .. } = self;
        ops.lookup();
        let e = end[s].get(&[x]);
        if e != 0 {
            ops.lookups_n(3);
            let mut w = v.em[o][LL].get(&[b]) + v.em[o][LH].get(&[b]) + v.em[o][HH].get(&[b]);
            for (t, tm) in mid[o].part(HL).matching(MID, &[b]) {
                ops.iteration();
                ops.lookup();
                w += tm * end[o].get(&[t[0]]);
            }
            *q += e * m * w;
        }
        if EM_PARTS.contains(&p) && e != 0 {
            v.em[s][p].update(&[b], e * m);
        }
        for other in 0..4 {
            if let Some(k) = cross_slot(s, p, other) {
                for (t, tm) in mid[o].part(other).matching(MID, &[b]) {
                    ops.iteration();
                    let key = if s == 0 { [x, t[0]] } else { [t[0], x] };
                    v.cross[k].update(&key, m * tm);
                }
            }
        }
        match p {
            LL if e != 0 => {
                for (t, tm) in mid[o].part(HL).matching(MID, &[b]) {
                    ops.iteration();
                    v.ex[o].update(&[t[0]], e * m * tm);
                }
            }
            HL => {
                ops.lookups_n(2);
                let em = v.em[o][LL].get(&[b]);
                if em != 0 {
                    v.ex[s].update(&[x], m * em);
                }
                if e != 0 && v.ind[o].get(&[b]) > 0 {
                    v.emi[s].update(&[b], e * m);
                }
            }
            _ => {}
        }
        ops.lookup();
        let old = mid[s].part(p).get(&[x, b]);
        let new = mid[s].apply(p, &[x, b], m);
        if p == LH && (old == 0) != (new == 0) {
            let step = if new != 0 { 1 } else { -1 };
            let cnt = v.ind[s].update(&[b], step);
            if (cnt == 0) != (cnt - step == 0) {
                let mut w = 0;
                for (t, tm) in mid[o].part(HL).matching(MID, &[b]) {
                    ops.iteration();
                    ops.lookup();
                    w += tm * end[o].get(&[t[0]]);
                }
                if w != 0 {
                    v.emi[o].update(&[b], step * w);
                }
            }
        }
        new
    }

    /// Applies `{α ↦ m}` to `R` (left) or `U` (right); returns δQ.
    pub fn apply_update_end(&mut self, side: Side, x: Value, m: Mult) -> i64 {
        let before = self.q;
        self.apply_end(side.ix(), x, m);
        self.q - before
    }

    /// Applies `{(x,b) ↦ m}` to part `p` of `S` (left, `x = a`) or of `T`
    /// (right, `x = c`); returns δQ.
    pub fn apply_update_middle(&mut self, side: Side, p: usize, x: Value, b: Value, m: Mult) -> i64 {
        let before = self.q;
        self.apply_mid(side.ix(), p, x, b, m);
        self.q - before
    }

    fn compute_views(&self, ops: &OpCounter) -> Views {
        let mut v = Views::new();
        for s in 0..2 {
            for p in EM_PARTS {
                for (t, sm) in self.mid[s].part(p).iter() {
                    ops.iteration();
                    let e = self.end[s].get(&[t[0]]);
                    if e != 0 {
                        v.em[s][p].update(&[t[1]], e * sm);
                    }
                }
            }
            for (k, deg) in self.mid[s].part(LH).keys(MID) {
                ops.iteration();
                v.ind[s].update(k, deg as Mult);
            }
        }
        for s in 0..2 {
            let o = 1 - s;
            for (t, sm) in self.mid[s].part(HL).iter() {
                ops.iteration();
                let e = self.end[s].get(&[t[0]]);
                if e != 0 && v.ind[o].get(&[t[1]]) > 0 {
                    v.emi[s].update(&[t[1]], e * sm);
                }
            }
        }
        for (k, &(ps, pt)) in CROSS.iter().enumerate() {
            for (t, sm) in self.mid[0].part(ps).iter() {
                ops.iteration();
                for (u, tm) in self.mid[1].part(pt).matching(MID, &[t[1]]) {
                    ops.iteration();
                    v.cross[k].update(&[t[0], u[0]], sm * tm);
                }
            }
        }
        for s in 0..2 {
            let o = 1 - s;
            let k = cross_slot(s, HL, LL).expect("hl/ll cross view is materialized");
            for (t, xm) in v.cross[k].iter() {
                ops.iteration();
                let y = self.end[o].get(&[t[1 - s]]);
                if y != 0 {
                    v.ex[s].update(&[t[s]], xm * y);
                }
            }
        }
        v
    }

    fn compute_count(&self, ops: &OpCounter) -> i64 {
        let mut half = [rustc_hash::FxHashMap::<Value, i64>::default(), rustc_hash::FxHashMap::default()];
        for s in 0..2 {
            for (t, m) in self.mid[s].parts().iter().flat_map(|r| r.iter()) {
                ops.iteration();
                let e = self.end[s].get(&[t[0]]);
                if e != 0 {
                    *half[s].entry(t[1]).or_default() += e * m;
                }
            }
        }
        half[0].iter().map(|(b, w)| w * half[1].get(b).copied().unwrap_or(0)).sum()
    }

    pub fn major_rebalance(&mut self) {
        self.ops.major();
        for p in &mut self.mid {
            let visited = p.repartition(theta(self.n, self.eps));
            self.ops.moved(visited as u64);
        }
        self.views = self.compute_views(&self.ops);
    }

    /// Moves every tuple of `mid_side` whose column `col` equals `key`
    /// across that column's threshold.
    pub fn minor_rebalance(&mut self, side: Side, col: usize, key: Value, dir: Direction) -> usize {
        self.ops.minor();
        let moved = move_key(&mut Mover { st: self, s: side.ix() }, col, &[key], dir);
        self.ops.moved(moved as u64);
        moved
    }

    fn rebalance_column(&mut self, s: usize, col: usize, key: Value) {
        let th = theta(self.n, self.eps);
        let p = &self.mid[s];
        self.ops.lookups_n(4);
        let light = p.degree_in(col, Part::Light, &[key]);
        let heavy = p.degree_in(col, Part::Heavy, &[key]);
        let side = if s == 0 { Side::Left } else { Side::Right };
        if light as f64 >= 1.5 * th {
            self.minor_rebalance(side, col, key, Direction::LightToHeavy);
        } else if heavy > 0 && (heavy as f64) < 0.5 * th {
            self.minor_rebalance(side, col, key, Direction::HeavyToLight);
        }
    }

    fn database(&self) -> [Relation; 4] {
        let flat = |s: usize| {
            let mut r = Relation::new(2);
            for (t, m) in self.mid[s].parts().iter().flat_map(|p| p.iter()) {
                if s == 0 {
                    r.update(t, m);
                } else {
                    r.update(&[t[1], t[0]], m);
                }
            }
            r
        };
        [self.end[0].clone(), flat(0), flat(1), self.end[1].clone()]
    }
}

struct Mover<'a> {
    st: &'a mut Path4State,
    s: usize,
}

impl MoveSink for Mover<'_> {
    fn partition(&self) -> &Partition {
        &self.st.mid[self.s]
    }

    fn apply(&mut self, part: usize, t: &Tuple, m: Mult) {
        self.st.apply_mid(self.s, part, t[0], t[1], m);
    }
}

impl Probe for Path4State {
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
        self.end.iter().map(Relation::len).sum::<usize>()
            + self.mid.iter().map(Partition::len).sum::<usize>()
            + self.views.all().map(Relation::len).sum::<usize>()
    }
}

impl Engine for Path4State {
    /// Relations in order `R(a)`, `S(a,b)`, `T(b,c)`, `U(c)`.
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult) {
        assert!(rel < 4 && t.len() == QuerySpec::Path4.arities()[rel] && m != 0);
        match rel {
            0 | 3 => {
                let s = (rel == 3) as usize;
                let new = self.apply_end(s, t[0], m);
                track_size(&mut self.db_size, new, m);
                if resize(&mut self.n, self.db_size) {
                    self.major_rebalance();
                }
            }
            _ => {
                let s = rel - 1;
                let stored = if s == 0 { [t[0], t[1]] } else { [t[1], t[0]] };
                let force = self.eps == 0.0;
                if !force {
                    self.ops.lookups_n(4);
                }
                let part = self.mid[s].route_tuple(&stored, force);
                let new = self.apply_mid(s, part, stored[0], stored[1], m);
                track_size(&mut self.db_size, new, m);
                if resize(&mut self.n, self.db_size) {
                    self.major_rebalance();
                    return;
                }
                self.rebalance_column(s, 0, stored[0]);
                self.rebalance_column(s, 1, stored[1]);
            }
        }
    }

    fn answer(&self) -> i64 {
        self.q
    }

    fn arities(&self) -> Vec<usize> {
        QuerySpec::Path4.arities()
    }

    fn check_invariants(&self) -> Result<(), String> {
        let stored = self.space() - self.views.all().map(Relation::len).sum::<usize>();
        if stored != self.db_size {
            return Err(format!("db_size {} but {} stored entries", self.db_size, stored));
        }
        size_invariant(self.n, self.db_size)?;
        for (s, p) in self.mid.iter().enumerate() {
            let mut p = p.clone();
            p.set_theta(theta(self.n, self.eps));
            p.check(false).map_err(|e| format!("middle relation {s}: {e}"))?;
        }
        let fresh = self.compute_views(&OpCounter::new());
        let v = &self.views;
        for s in 0..2 {
            for p in EM_PARTS {
                compare_view(&format!("EM[{s}][{p}]"), &v.em[s][p], &fresh.em[s][p])?;
            }
            compare_view(&format!("IND[{s}]"), &v.ind[s], &fresh.ind[s])?;
            compare_view(&format!("EMI[{s}]"), &v.emi[s], &fresh.emi[s])?;
            compare_view(&format!("EX[{s}]"), &v.ex[s], &fresh.ex[s])?;
        }
        for (k, (ps, pt)) in CROSS.iter().enumerate() {
            compare_view(&format!("X({ps},{pt})"), &v.cross[k], &fresh.cross[k])?;
        }
        let q = brute_force_count(&self.database(), QuerySpec::Path4);
        if q != self.q {
            return Err(format!("answer {} but brute force gives {}", self.q, q));
        }
        Ok(())
    }

    fn access_totals(&self) -> (u64, u64) {
        let mut acc = (0, 0);
        for r in self.end.iter().chain(self.views.all()) {
            acc = add_access(acc, r.access_counts());
        }
        for p in &self.mid {
            acc = add_access(acc, partition_access(p));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(st: &mut Path4State, order: &[usize]) {
        let db: [(usize, &[Value]); 4] = [(0, &[1]), (1, &[1, 2]), (2, &[2, 3]), (3, &[3])];
        for &k in order {
            st.on_update(db[k].0, db[k].1, 1);
        }
    }

    #[test]
    fn single_path_any_order() {
        for eps in [0.0, 0.5, 1.0] {
            for order in [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]] {
                let mut st = Path4State::new(eps).unwrap();
                load(&mut st, &order);
                assert_eq!(st.answer(), 1, "eps {eps} order {order:?}");
                st.check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn end_update_without_middle() {
        let mut st = Path4State::new(0.5).unwrap();
        assert_eq!(st.apply_update_end(Side::Left, 1, 1), 0);
    }

    #[test]
    fn end_insert_delete_restores() {
        let mut st = Path4State::new(0.5).unwrap();
        load(&mut st, &[1, 2, 3]);
        let views = st.views.clone();
        st.apply_update_end(Side::Left, 1, 1);
        assert_eq!(st.answer(), 1);
        st.apply_update_end(Side::Left, 1, -1);
        assert_eq!(st.answer(), 0);
        assert_eq!(st.views, views);
    }

    #[test]
    fn indicator_is_presence() {
        let mut st = Path4State::new(0.5).unwrap();
        st.apply_update_middle(Side::Left, LH, 1, 2, 1);
        st.apply_update_middle(Side::Left, LH, 1, 2, 1);
        assert_eq!(st.indicator(Side::Left, 2), 1);
        st.apply_update_middle(Side::Left, LH, 3, 2, 1);
        assert_eq!(st.indicator(Side::Left, 2), 1);
        st.apply_update_middle(Side::Left, LH, 1, 2, -2);
        assert_eq!(st.indicator(Side::Left, 2), 1);
        st.apply_update_middle(Side::Left, LH, 3, 2, -1);
        assert_eq!(st.indicator(Side::Left, 2), 0);
        assert!(st.indicator_view(Side::Left).is_empty());
    }

    #[test]
    fn hl_update_leaves_hh_cross() {
        let mut st = Path4State::new(0.5).unwrap();
        st.apply_update_middle(Side::Right, HL, 5, 2, 1);
        st.apply_update_middle(Side::Left, HH, 1, 2, 1);
        let hh = st.cross_view(HH, HL).unwrap().clone();
        assert_eq!(hh.len(), 1);
        st.apply_update_middle(Side::Left, HL, 7, 2, 1);
        assert_eq!(st.cross_view(HH, HL).unwrap(), &hh);
        assert_eq!(st.cross_view(HL, HL).unwrap().len(), 1);
    }

    #[test]
    fn preprocess_matches_stream() {
        let mut st = Path4State::new(0.5).unwrap();
        let mut db = [Relation::new(1), Relation::new(2), Relation::new(2), Relation::new(1)];
        for k in 0..60i64 {
            let rel = (k % 4) as usize;
            let t: Vec<Value> = if rel == 0 || rel == 3 { vec![k % 3] } else { vec![k % 3, (k * 7) % 4] };
            st.on_update(rel, &t, 1);
            db[rel].update(&t, 1);
        }
        let pre = Path4State::preprocess(&db, 0.5).unwrap();
        assert_eq!(pre.answer(), st.answer());
        pre.check_invariants().unwrap();
    }
}
