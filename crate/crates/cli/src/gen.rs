//! Seeded random update streams.

use clap::ValueEnum;
use ivme_core::oracle::QuerySpec;
use ivme_core::{Mult, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::stream::Update;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Workload {
    /// Every value uniform over the domain (Erdős–Rényi edges for binary
    /// relations).
    Uniform,
    /// Zipf-distributed values with exponent 1.1.
    Zipf,
    /// A handful of hub values take a fixed share of all positions; the rest
    /// is uniform.
    Hub,
}

/// Hub values and the probability that a position takes one of them.
pub const HUBS: Value = 2;
pub const HUB_SHARE: f64 = 0.5;

/// Draws values for one workload over `0..domain`.
#[derive(Debug, Clone)]
pub struct ValueSampler {
    workload: Workload,
    domain: Value,
    zipf: Option<Zipf<f64>>,
}

impl ValueSampler {
    pub fn new(workload: Workload, domain: Value) -> Self {
        assert!(domain >= 1);
        let zipf = (workload == Workload::Zipf).then(|| Zipf::new(domain as u64, 1.1).expect("domain is positive"));
        ValueSampler { workload, domain, zipf }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Value {
        match self.workload {
            Workload::Uniform => rng.gen_range(0..self.domain),
            Workload::Zipf => self.zipf.as_ref().unwrap().sample(rng) as Value - 1,
            Workload::Hub => {
                if self.domain <= HUBS || rng.gen_bool(HUB_SHARE) {
                    rng.gen_range(0..HUBS.min(self.domain))
                } else {
                    rng.gen_range(HUBS..self.domain)
                }
            }
        }
    }
}

fn random_update<R: Rng>(spec: QuerySpec, vals: &ValueSampler, rng: &mut R) -> (usize, Vec<Value>) {
    let ar = spec.arities();
    let rel = rng.gen_range(0..ar.len());
    (rel, (0..ar[rel]).map(|_| vals.sample(rng)).collect())
}

/// `len` single-tuple inserts with multiplicity 1 over a domain of `len`
/// values.
pub fn insert_stream(spec: QuerySpec, workload: Workload, len: usize, seed: u64) -> Vec<Update> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = ValueSampler::new(workload, len.max(4) as Value);
    (0..len)
        .map(|_| {
            let (rel, tuple) = random_update(spec, &vals, &mut rng);
            Update { rel, tuple, mult: 1 }
        })
        .collect()
}

/// Inserts and deletes over `0..domain` with multiplicities in
/// `{-2, -1, 1, 2}`. About a third of the steps retract an earlier update
/// exactly, so entries also return to zero.
pub fn mixed_stream(spec: QuerySpec, workload: Workload, len: usize, domain: Value, seed: u64) -> Vec<Update> {
    const MULTS: [Mult; 4] = [-2, -1, 1, 2];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = ValueSampler::new(workload, domain);
    let mut past: Vec<Update> = Vec::new();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        if !past.is_empty() && rng.gen_bool(0.35) {
            let k = rng.gen_range(0..past.len());
            let u = past.swap_remove(k);
            out.push(Update { mult: -u.mult, ..u });
        } else {
            let (rel, tuple) = random_update(spec, &vals, &mut rng);
            let u = Update { rel, tuple, mult: *MULTS.choose(&mut rng).unwrap() };
            past.push(u.clone());
            out.push(u);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = mixed_stream(QuerySpec::Path4, Workload::Zipf, 200, 10, 7);
        assert_eq!(a, mixed_stream(QuerySpec::Path4, Workload::Zipf, 200, 10, 7));
        assert_ne!(a, mixed_stream(QuerySpec::Path4, Workload::Zipf, 200, 10, 8));
    }

    #[test]
    fn shapes() {
        for u in mixed_stream(QuerySpec::Lw(5), Workload::Uniform, 300, 6, 1) {
            assert_eq!(u.tuple.len(), 4);
            assert!(u.tuple.iter().all(|v| (0..6).contains(v)));
            assert!([-2, -1, 1, 2].contains(&u.mult));
        }
        let s = insert_stream(QuerySpec::Triangle, Workload::Hub, 1000, 3);
        assert!(s.iter().all(|u| u.mult == 1));
        let hubs = s.iter().filter(|u| u.tuple[0] < HUBS).count();
        assert!((400..600).contains(&hubs), "{hubs}");
    }

    #[test]
    fn zipf_in_domain() {
        let v = ValueSampler::new(Workload::Zipf, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            assert!((0..5).contains(&v.sample(&mut rng)));
        }
    }
}
