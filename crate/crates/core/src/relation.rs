//! Z-ring relations and heavy/light partitions.
//!
//! A [`Relation`] maps tuples to nonzero integer multiplicities. Secondary
//! indexes map a projection of a tuple onto a list of columns to the set of
//! entries carrying that projection. Posting lists are dense vectors with
//! back-references from entries, so inserts and deletes are O(1) per index
//! and matching enumeration has constant delay.
//!
//! A [`Partition`] splits a relation into parts by degree along one or more
//! key dimensions. Part `p` is heavy on dimension `d` iff bit `d` of `p` is
//! set, so a one-dimensional partition has part 0 (light) and part 1 (heavy).

use std::borrow::Borrow;
use std::cell::Cell;
use std::fmt;
use std::ops::Deref;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

pub type Value = i64;
pub type Mult = i64;

/// A fixed-arity tuple of domain values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tuple(SmallVec<[Value; 4]>);

impl Tuple {
    pub fn new(values: &[Value]) -> Self {
        Tuple(SmallVec::from_slice(values))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    /// Projection onto `cols`, in the given column order.
    pub fn project(&self, cols: &[usize]) -> Tuple {
        Tuple(cols.iter().map(|&c| self.0[c]).collect())
    }
}

impl Deref for Tuple {
    type Target = [Value];
    fn deref(&self) -> &[Value] {
        &self.0
    }
}

impl Borrow<[Value]> for Tuple {
    fn borrow(&self) -> &[Value] {
        &self.0
    }
}

impl AsRef<[Value]> for Tuple {
    fn as_ref(&self) -> &[Value] {
        &self.0
    }
}

impl From<&[Value]> for Tuple {
    fn from(v: &[Value]) -> Self {
        Tuple::new(v)
    }
}

impl<const K: usize> From<[Value; K]> for Tuple {
    fn from(v: [Value; K]) -> Self {
        Tuple::new(&v)
    }
}

impl FromIterator<Value> for Tuple {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        Tuple(iter.into_iter().collect())
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum RelationError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("no index on columns {0:?}")]
    Unindexed(Vec<usize>),
    #[error("zero multiplicity")]
    ZeroMult,
}

#[derive(Clone)]
struct Slot {
    tuple: Tuple,
    mult: Mult,
    pos: SmallVec<[u32; 4]>,
}

#[derive(Clone)]
struct Index {
    cols: Vec<usize>,
    postings: FxHashMap<Tuple, Vec<u32>>,
}

/// Handle to a secondary index of a [`Relation`].
pub type IndexId = usize;

/// Finite map from tuples to nonzero multiplicities with secondary indexes.
///
/// Every read through [`get`](Relation::get), [`degree`](Relation::degree)
/// and [`contains_key`](Relation::contains_key) bumps an internal probe
/// counter, and every entry yielded by [`matching`](Relation::matching) or
/// [`iter`](Relation::iter) bumps a scan counter. Engines compare these
/// against their own op counters to audit their accounting.
#[derive(Clone)]
pub struct Relation {
    arity: usize,
    slots: Vec<Slot>,
    lookup: FxHashMap<Tuple, u32>,
    indexes: Vec<Index>,
    probes: Cell<u64>,
    scans: Cell<u64>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut entries: Vec<_> = self.slots.iter().map(|s| (&s.tuple, s.mult)).collect();
        entries.sort();
        f.debug_map().entries(entries).finish()
    }
}

impl PartialEq for Relation {
    /// Equality of contents; indexes and counters are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.len() == other.len()
            && self
                .slots
                .iter()
                .all(|s| other.lookup.get(&s.tuple).map(|&i| other.slots[i as usize].mult) == Some(s.mult))
    }
}

impl Relation {
    pub fn new(arity: usize) -> Self {
        Relation {
            arity,
            slots: Vec::new(),
            lookup: FxHashMap::default(),
            indexes: Vec::new(),
            probes: Cell::new(0),
            scans: Cell::new(0),
        }
    }

    /// Empty relation with the same arity and index layout as `self`.
    pub fn empty_like(&self) -> Self {
        let mut r = Relation::new(self.arity);
        for ix in &self.indexes {
            r.add_index(&ix.cols);
        }
        r
    }

    /// Builds a relation from `(tuple, mult)` pairs, summing duplicates.
    pub fn from_entries<T, I>(arity: usize, entries: I) -> Result<Self, RelationError>
    where
        T: AsRef<[Value]>,
        I: IntoIterator<Item = (T, Mult)>,
    {
        let mut r = Relation::new(arity);
        for (t, m) in entries {
            if m != 0 {
                r.upsert(t.as_ref(), m)?;
            }
        }
        Ok(r)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Adds an index on `cols` (or returns the existing one) and backfills it.
    pub fn add_index(&mut self, cols: &[usize]) -> IndexId {
        assert!(cols.iter().all(|&c| c < self.arity), "index column out of range");
        if let Some(id) = self.index_of(cols) {
            return id;
        }
        let id = self.indexes.len();
        let mut ix = Index { cols: cols.to_vec(), postings: FxHashMap::default() };
        for (s, slot) in self.slots.iter_mut().enumerate() {
            let list = ix.postings.entry(slot.tuple.project(cols)).or_default();
            slot.pos.push(list.len() as u32);
            list.push(s as u32);
        }
        self.indexes.push(ix);
        id
    }

    pub fn index_of(&self, cols: &[usize]) -> Option<IndexId> {
        self.indexes.iter().position(|ix| ix.cols == cols)
    }

    pub fn index_cols(&self, id: IndexId) -> &[usize] {
        &self.indexes[id].cols
    }

    /// Multiplicity of `t`, 0 if absent.
    pub fn get(&self, t: &[Value]) -> Mult {
        self.probes.set(self.probes.get() + 1);
        self.peek(t)
    }

    /// Uncounted read, for oracles and invariant checks.
    pub fn peek(&self, t: &[Value]) -> Mult {
        match self.lookup.get(t) {
            Some(&i) => self.slots[i as usize].mult,
            None => 0,
        }
    }

    /// Checked single-tuple update; returns the new multiplicity.
    pub fn upsert(&mut self, t: &[Value], m: Mult) -> Result<Mult, RelationError> {
        if t.len() != self.arity {
            return Err(RelationError::Arity { expected: self.arity, got: t.len() });
        }
        if m == 0 {
            return Err(RelationError::ZeroMult);
        }
        Ok(self.update(t, m))
    }

    /// Adds `m` to the multiplicity of `t` and returns the new multiplicity.
    /// Entries reaching 0 are removed with their postings.
    ///
    /// # Panics
    /// If the arity of `t` differs from the relation's.
    pub fn update(&mut self, t: &[Value], m: Mult) -> Mult {
        assert_eq!(t.len(), self.arity, "arity mismatch");
        if m == 0 {
            return self.peek(t);
        }
        if let Some(&i) = self.lookup.get(t) {
            let i = i as usize;
            let new = self.slots[i].mult + m;
            if new == 0 {
                self.remove_slot(i);
            } else {
                self.slots[i].mult = new;
            }
            return new;
        }
        let tuple = Tuple::new(t);
        let s = self.slots.len() as u32;
        let mut pos = SmallVec::new();
        for ix in &mut self.indexes {
            let list = ix.postings.entry(tuple.project(&ix.cols)).or_default();
            pos.push(list.len() as u32);
            list.push(s);
        }
        self.lookup.insert(tuple.clone(), s);
        self.slots.push(Slot { tuple, mult: m, pos });
        m
    }

    fn remove_slot(&mut self, i: usize) {
        let tuple = self.slots[i].tuple.clone();
        let pos = self.slots[i].pos.clone();
        for (k, ix) in self.indexes.iter_mut().enumerate() {
            let key = tuple.project(&ix.cols);
            let list = ix.postings.get_mut(&key).expect("posting list");
            let p = pos[k] as usize;
            list.swap_remove(p);
            if p < list.len() {
                let moved = list[p] as usize;
                self.slots[moved].pos[k] = p as u32;
            }
            if list.is_empty() {
                ix.postings.remove(&key);
            }
        }
        let removed = self.slots.swap_remove(i);
        self.lookup.remove(&removed.tuple);
        if i < self.slots.len() {
            let moved = &self.slots[i];
            self.lookup.insert(moved.tuple.clone(), i as u32);
            for (k, ix) in self.indexes.iter_mut().enumerate() {
                let list = ix.postings.get_mut(moved.tuple.project(&ix.cols).values()).expect("posting list");
                list[moved.pos[k] as usize] = i as u32;
            }
        }
    }

    /// Number of entries whose projection on the index columns equals `key`.
    pub fn degree(&self, ix: IndexId, key: &[Value]) -> usize {
        self.probes.set(self.probes.get() + 1);
        self.indexes[ix].postings.get(key).map_or(0, Vec::len)
    }

    /// Whether some entry projects to `key` on the index columns.
    pub fn contains_key(&self, ix: IndexId, key: &[Value]) -> bool {
        self.degree(ix, key) > 0
    }

    /// Entries whose projection on the index columns equals `key`.
    pub fn matching(&self, ix: IndexId, key: &[Value]) -> Matching<'_> {
        let list = self.indexes[ix].postings.get(key).map_or(&[][..], Vec::as_slice);
        Matching { rel: self, list: list.iter() }
    }

    /// Like [`matching`](Relation::matching) but addressed by column list.
    pub fn try_matching(&self, cols: &[usize], key: &[Value]) -> Result<Matching<'_>, RelationError> {
        let ix = self.index_of(cols).ok_or_else(|| RelationError::Unindexed(cols.to_vec()))?;
        Ok(self.matching(ix, key))
    }

    /// Distinct keys of an index, with their degrees.
    pub fn keys(&self, ix: IndexId) -> impl Iterator<Item = (&Tuple, usize)> + '_ {
        self.indexes[ix].postings.iter().map(|(k, l)| (k, l.len()))
    }

    pub fn distinct_keys(&self, ix: IndexId) -> usize {
        self.indexes[ix].postings.len()
    }

    pub fn iter(&self) -> Entries<'_> {
        Entries { rel: self, inner: self.slots.iter() }
    }

    /// Probe and scan counts accumulated so far.
    pub fn access_counts(&self) -> (u64, u64) {
        (self.probes.get(), self.scans.get())
    }

    pub fn clear(&mut self) {
        self.slots.clear();
        self.lookup.clear();
        for ix in &mut self.indexes {
            ix.postings.clear();
        }
    }

    /// Sorted entries, for comparisons in tests and diagnostics.
    pub fn sorted_entries(&self) -> Vec<(Tuple, Mult)> {
        let mut v: Vec<_> = self.slots.iter().map(|s| (s.tuple.clone(), s.mult)).collect();
        v.sort();
        v
    }

    /// Full consistency check of entries, postings and back-references.
    pub fn check_integrity(&self) -> Result<(), String> {
        if self.lookup.len() != self.slots.len() {
            return Err("lookup size differs from entry count".into());
        }
        for (i, s) in self.slots.iter().enumerate() {
            if s.mult == 0 {
                return Err(format!("zero multiplicity stored for {:?}", s.tuple));
            }
            if self.lookup.get(&s.tuple) != Some(&(i as u32)) {
                return Err(format!("lookup does not point at slot {i}"));
            }
            for (k, ix) in self.indexes.iter().enumerate() {
                let list = ix.postings.get(s.tuple.project(&ix.cols).values());
                if list.and_then(|l| l.get(s.pos[k] as usize)) != Some(&(i as u32)) {
                    return Err(format!("posting for slot {i} in index {k} is stale"));
                }
            }
        }
        for ix in &self.indexes {
            let mut total = 0;
            for (key, list) in &ix.postings {
                if list.is_empty() {
                    return Err("empty posting list retained".into());
                }
                for &s in list {
                    let slot = self.slots.get(s as usize).ok_or("posting to dead slot")?;
                    if slot.tuple.project(&ix.cols) != *key {
                        return Err("posting under wrong key".into());
                    }
                }
                total += list.len();
            }
            if total != self.slots.len() {
                return Err("index postings do not cover all entries".into());
            }
        }
        Ok(())
    }
}

/// Constant-delay stream of entries matching an index key.
pub struct Matching<'a> {
    rel: &'a Relation,
    list: std::slice::Iter<'a, u32>,
}

impl<'a> Iterator for Matching<'a> {
    type Item = (&'a Tuple, Mult);

    fn next(&mut self) -> Option<Self::Item> {
        let &s = self.list.next()?;
        self.rel.scans.set(self.rel.scans.get() + 1);
        let slot = &self.rel.slots[s as usize];
        Some((&slot.tuple, slot.mult))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.list.size_hint()
    }
}

impl ExactSizeIterator for Matching<'_> {}

pub struct Entries<'a> {
    rel: &'a Relation,
    inner: std::slice::Iter<'a, Slot>,
}

impl<'a> Iterator for Entries<'a> {
    type Item = (&'a Tuple, Mult);

    fn next(&mut self) -> Option<Self::Item> {
        let slot = self.inner.next()?;
        self.rel.scans.set(self.rel.scans.get() + 1);
        Some((&slot.tuple, slot.mult))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.inner.size_hint()
    }
}

impl ExactSizeIterator for Entries<'_> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Light,
    Heavy,
}

impl Part {
    pub fn is_heavy(self) -> bool {
        self == Part::Heavy
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LightToHeavy,
    HeavyToLight,
}

/// Heavy/light split of a relation along one or more key dimensions.
#[derive(Clone, Debug)]
pub struct Partition {
    dims: Vec<Vec<usize>>,
    dim_index: Vec<IndexId>,
    parts: Vec<Relation>,
    theta: f64,
}

impl Partition {
    /// Empty partition whose parts share the index layout of `template`.
    /// Each dimension is a list of key columns; an index on it is added.
    pub fn new(template: &Relation, dims: &[&[usize]], theta: f64) -> Self {
        assert!(!dims.is_empty() && dims.len() <= 4);
        let mut base = template.empty_like();
        let dim_index: Vec<_> = dims.iter().map(|d| base.add_index(d)).collect();
        Partition {
            dims: dims.iter().map(|d| d.to_vec()).collect(),
            dim_index,
            parts: vec![base; 1 << dims.len()],
            theta,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn set_theta(&mut self, theta: f64) {
        self.theta = theta;
    }

    pub fn dims(&self) -> usize {
        self.dims.len()
    }

    pub fn dim_cols(&self, d: usize) -> &[usize] {
        &self.dims[d]
    }

    pub fn dim_index(&self, d: usize) -> IndexId {
        self.dim_index[d]
    }

    pub fn parts(&self) -> &[Relation] {
        &self.parts
    }

    pub fn part(&self, p: usize) -> &Relation {
        &self.parts[p]
    }

    pub fn part_mut(&mut self, p: usize) -> &mut Relation {
        &mut self.parts[p]
    }

    pub fn heavy(&self) -> &Relation {
        &self.parts[1]
    }

    pub fn light(&self) -> &Relation {
        &self.parts[0]
    }

    pub fn side(&self, part: Part) -> &Relation {
        &self.parts[part.is_heavy() as usize]
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(Relation::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(Relation::is_empty)
    }

    /// K(t) = Σ over parts.
    pub fn get(&self, t: &[Value]) -> Mult {
        self.parts.iter().map(|r| r.get(t)).sum()
    }

    pub fn peek(&self, t: &[Value]) -> Mult {
        self.parts.iter().map(|r| r.peek(t)).sum()
    }

    /// Degree of `key` on dimension `d` among parts whose class on `d` is `class`.
    pub fn degree_in(&self, d: usize, class: Part, key: &[Value]) -> usize {
        let bit = 1usize << d;
        let want = if class.is_heavy() { bit } else { 0 };
        (0..self.parts.len())
            .filter(|p| p & bit == want)
            .map(|p| self.parts[p].degree(self.dim_index[d], key))
            .sum()
    }

    /// Degree of `key` on dimension `d` across the whole relation.
    pub fn degree(&self, d: usize, key: &[Value]) -> usize {
        self.parts.iter().map(|r| r.degree(self.dim_index[d], key)).sum()
    }

    /// Class of `key` on dimension `d`: heavy iff it occurs in a heavy part
    /// for that dimension, or `force_heavy` is set.
    pub fn route_dim(&self, d: usize, key: &[Value], force_heavy: bool) -> Part {
        if force_heavy || self.degree_in(d, Part::Heavy, key) > 0 {
            Part::Heavy
        } else {
            Part::Light
        }
    }

    /// Part index for a tuple, routing each dimension independently.
    pub fn route_tuple(&self, t: &[Value], force_heavy: bool) -> usize {
        let mut p = 0;
        for d in 0..self.dims.len() {
            let key: Tuple = self.dims[d].iter().map(|&c| t[c]).collect();
            if self.route_dim(d, &key, force_heavy).is_heavy() {
                p |= 1 << d;
            }
        }
        p
    }

    /// Applies a single-tuple update to part `p`; returns the new multiplicity.
    pub fn apply(&mut self, p: usize, t: &[Value], m: Mult) -> Mult {
        self.parts[p].update(t, m)
    }

    /// Strict repartition of all current entries at threshold `theta`.
    /// Returns the number of entries visited.
    pub fn repartition(&mut self, theta: f64) -> usize {
        let mut merged = self.parts[0].empty_like();
        for part in &self.parts {
            for (t, m) in part.iter() {
                merged.update(t, m);
            }
        }
        let dims: Vec<&[usize]> = self.dims.iter().map(Vec::as_slice).collect();
        let visited = merged.len();
        *self = strict_partition_dims(&merged, &dims, theta);
        visited
    }

    /// Checks union-free storage and domain partition, and the loose
    /// (`strict = false`) or strict degree conditions at the current θ.
    pub fn check(&self, strict: bool) -> Result<(), String> {
        for (p, part) in self.parts.iter().enumerate() {
            part.check_integrity()?;
            for (t, _) in part.iter() {
                for (q, other) in self.parts.iter().enumerate() {
                    if q != p && other.peek(t) != 0 {
                        return Err(format!("tuple {t:?} stored in parts {p} and {q}"));
                    }
                }
            }
        }
        for d in 0..self.dims.len() {
            let bit = 1 << d;
            let ix = self.dim_index[d];
            let mut degree: FxHashMap<Tuple, (usize, bool, bool)> = FxHashMap::default();
            for (p, part) in self.parts.iter().enumerate() {
                for (key, n) in part.keys(ix) {
                    let e = degree.entry(key.clone()).or_default();
                    e.0 += n;
                    if p & bit != 0 {
                        e.1 = true;
                    } else {
                        e.2 = true;
                    }
                }
            }
            for (key, (deg, heavy, light)) in degree {
                let deg = deg as f64;
                if heavy && light {
                    return Err(format!("key {key:?} on dim {d} is both heavy and light"));
                }
                let (lo, hi) = if strict { (self.theta, self.theta) } else { (0.5 * self.theta, 1.5 * self.theta) };
                if heavy && deg < lo {
                    return Err(format!("heavy key {key:?} on dim {d} has degree {deg} < {lo}"));
                }
                if light && deg >= hi {
                    return Err(format!("light key {key:?} on dim {d} has degree {deg} >= {hi}"));
                }
            }
        }
        Ok(())
    }
}

/// One-pass strict partition of `rel` on `key_cols` at threshold `theta`:
/// keys of degree ≥ θ go heavy, the rest light.
pub fn strict_partition(rel: &Relation, key_cols: &[usize], theta: f64) -> Partition {
    strict_partition_dims(rel, &[key_cols], theta)
}

/// Strict partition along several dimensions at once.
pub fn strict_partition_dims(rel: &Relation, dims: &[&[usize]], theta: f64) -> Partition {
    assert!(theta > 0.0, "theta must be positive");
    let mut src = rel.clone();
    let src_ix: Vec<_> = dims.iter().map(|d| src.add_index(d)).collect();
    let mut out = Partition::new(rel, dims, theta);
    for (t, m) in src.iter() {
        let mut p = 0;
        for (d, cols) in dims.iter().enumerate() {
            let key: Tuple = cols.iter().map(|&c| t[c]).collect();
            if src.degree(src_ix[d], &key) as f64 >= theta {
                p |= 1 << d;
            }
        }
        out.parts[p].update(t, m);
    }
    out
}

/// Heavy or light for a single-dimension partition.
pub fn route(p: &Partition, key: &[Value], force_heavy: bool) -> Part {
    p.route_dim(0, key, force_heavy)
}

/// Receiver of the single-tuple updates a key move is made of.
pub trait MoveSink {
    fn partition(&self) -> &Partition;
    fn apply(&mut self, part: usize, t: &Tuple, m: Mult);
}

impl MoveSink for Partition {
    fn partition(&self) -> &Partition {
        self
    }

    fn apply(&mut self, part: usize, t: &Tuple, m: Mult) {
        self.parts[part].update(t, m);
    }
}

/// Moves every tuple whose key on dimension `d` equals `key` across that
/// dimension, as a delete from the source part followed by an insert into
/// the destination part. Returns the number of moved tuples.
pub fn move_key<S: MoveSink + ?Sized>(sink: &mut S, d: usize, key: &[Value], dir: Direction) -> usize {
    let p = sink.partition();
    let bit = 1usize << d;
    let ix = p.dim_index(d);
    let mut moves = Vec::new();
    for src in 0..p.parts().len() {
        let src_heavy = src & bit != 0;
        if src_heavy != (dir == Direction::HeavyToLight) {
            continue;
        }
        for (t, m) in p.part(src).matching(ix, key) {
            moves.push((src, src ^ bit, t.clone(), m));
        }
    }
    for (src, dst, t, m) in &moves {
        sink.apply(*src, t, -m);
        sink.apply(*dst, t, *m);
    }
    moves.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(entries: &[([Value; 2], Mult)]) -> Relation {
        let mut r = Relation::from_entries(2, entries.iter().map(|(t, m)| (t, *m))).unwrap();
        r.add_index(&[0]);
        r
    }

    #[test]
    fn upsert_examples() {
        let mut r = Relation::new(2);
        r.add_index(&[0]);
        assert_eq!(r.upsert(&[1, 2], 1), Ok(1));
        assert_eq!(r.len(), 1);
        assert_eq!(r.upsert(&[1, 2], -1), Ok(0));
        assert_eq!(r.len(), 0);
        assert_eq!(r.degree(0, &[1]), 0);
        r.upsert(&[1, 2], 1).unwrap();
        assert_eq!(r.upsert(&[1, 2], -3), Ok(-2));
        assert_eq!(r.len(), 1);
        assert_eq!(r.upsert(&[1], 1), Err(RelationError::Arity { expected: 2, got: 1 }));
        assert_eq!(r.upsert(&[1, 1], 0), Err(RelationError::ZeroMult));
        r.check_integrity().unwrap();
    }

    #[test]
    fn matching_examples() {
        let mut r = rel(&[([1, 2], 1), ([1, 3], 2), ([4, 5], 1)]);
        let mut got: Vec<_> = r.matching(0, &[1]).map(|(t, m)| (t.clone(), m)).collect();
        got.sort();
        assert_eq!(got, vec![(Tuple::from([1, 2]), 1), (Tuple::from([1, 3]), 2)]);
        assert_eq!(r.matching(0, &[99]).count(), 0);
        r.update(&[1, 2], -1);
        let got: Vec<_> = r.matching(0, &[1]).map(|(t, m)| (t.clone(), m)).collect();
        assert_eq!(got, vec![(Tuple::from([1, 3]), 2)]);
        assert!(matches!(r.try_matching(&[1], &[3]), Err(RelationError::Unindexed(_))));
    }

    #[test]
    fn strict_partition_examples() {
        let r = rel(&[([1, 1], 1), ([1, 2], 1), ([1, 3], 1)]);
        let p = strict_partition(&r, &[0], 2.0);
        assert_eq!((p.heavy().len(), p.light().len()), (3, 0));
        let p = strict_partition(&r, &[0], 5.0);
        assert_eq!((p.heavy().len(), p.light().len()), (0, 3));
        let r = rel(&[([1, 1], 1), ([1, 2], 1), ([1, 3], 1), ([2, 1], 1)]);
        let p = strict_partition(&r, &[0], 2.0);
        assert_eq!(p.heavy().len(), 3);
        assert_eq!(p.light().sorted_entries(), vec![(Tuple::from([2, 1]), 1)]);
        p.check(true).unwrap();
    }

    #[test]
    fn route_examples() {
        let r = rel(&[([1, 1], 1), ([1, 2], 1), ([2, 1], 1)]);
        let p = strict_partition(&r, &[0], 2.0);
        assert_eq!(route(&p, &[1], false), Part::Heavy);
        assert_eq!(route(&p, &[7], false), Part::Light);
        assert_eq!(route(&p, &[7], true), Part::Heavy);
    }

    #[test]
    fn move_key_examples() {
        let r = rel(&[([1, 1], 1), ([1, 2], -2), ([1, 3], 1), ([2, 1], 1)]);
        let mut p = strict_partition(&r, &[0], 10.0);
        assert_eq!(move_key(&mut p, 0, &[1], Direction::LightToHeavy), 3);
        assert_eq!(p.heavy().len(), 3);
        assert_eq!(p.heavy().peek(&[1, 2]), -2);
        assert_eq!(p.light().degree(0, &[1]), 0);
        assert_eq!(move_key(&mut p, 0, &[9], Direction::LightToHeavy), 0);
    }

    #[test]
    fn two_dimensional_partition() {
        let mut r = Relation::new(2);
        for b in 0..4 {
            r.update(&[1, b], 1);
        }
        r.update(&[2, 0], 1);
        let p = strict_partition_dims(&r, &[&[0], &[1]], 2.0);
        // (1,0): A heavy, B=0 has degree 2 -> heavy.
        assert_eq!(p.part(0b11).sorted_entries(), vec![(Tuple::from([1, 0]), 1)]);
        assert_eq!(p.part(0b01).len(), 3);
        assert_eq!(p.part(0b10).len(), 1);
        assert_eq!(p.part(0b00).len(), 0);
        p.check(true).unwrap();
        assert_eq!(p.route_tuple(&[1, 9], false), 0b01);
    }
}
