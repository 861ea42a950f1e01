use std::io::Write;

use ivme_core::metrics::fit_scaling;
use ivme_core::oracle::QuerySpec;
use ivme_core::triangle::static_count_with_ops;
use ivme_core::{Engine, OpCounts, Relation};
use serde::Serialize;

use crate::config::{query_name, ConfigError, Mode, RunConfig};
use crate::gen::{insert_stream, Workload};
use crate::stream::Update;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub query: QuerySpec,
    pub modes: Vec<Mode>,
    pub eps: Vec<f64>,
    pub sizes: Vec<usize>,
    pub workload: Workload,
    pub seed: u64,
}

/// Totals of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub ops: OpCounts,
    pub max_space: usize,
    pub n: u64,
    pub answer: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub query: String,
    pub mode: String,
    pub eps: f64,
    pub size: usize,
    pub lookups: u64,
    pub iterations: u64,
    pub moves: u64,
    pub total_ops: u64,
    pub max_space: usize,
    pub final_n: u64,
    pub answer: i64,
    /// Log-log slope of `total_ops` against `size` over this (mode, ε)
    /// group; empty with fewer than three sizes.
    pub slope: Option<f64>,
    /// Same for `max_space`.
    pub space_slope: Option<f64>,
}

fn drive<E: Engine + ?Sized>(eng: &mut E, updates: &[Update]) -> Measurement {
    let mut max_space = eng.space();
    for u in updates {
        eng.on_update(u.rel, &u.tuple, u.mult);
        max_space = max_space.max(eng.space());
    }
    Measurement { ops: eng.counters().snapshot(), max_space, n: eng.threshold_base(), answer: eng.answer() }
}

/// Runs `updates` through the engine selected by `cfg`.
pub fn measure(cfg: &RunConfig, updates: &[Update]) -> Result<Measurement, ConfigError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Static => {
            let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
            for u in updates {
                db[u.rel].update(&u.tuple, u.mult);
            }
            let (answer, ops) = static_count_with_ops(&db).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let size: usize = db.iter().map(Relation::len).sum();
            Ok(Measurement { ops, max_space: size, n: size.max(1) as u64, answer })
        }
        Mode::Enum => Ok(drive(&mut cfg.build_enum()?, updates)),
        _ => Ok(drive(cfg.build_engine()?.as_mut(), updates)),
    }
}

/// One row per (size, ε, mode) on insert-only streams, with slopes filled
/// per (mode, ε) group.
pub fn bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, ConfigError> {
    let streams: Vec<Vec<Update>> =
        cfg.sizes.iter().map(|&n| insert_stream(cfg.query, cfg.workload, n, cfg.seed)).collect();
    let mut groups = Vec::new();
    for &mode in &cfg.modes {
        for &eps in &cfg.eps {
            let run = RunConfig::new(cfg.query, mode).with_eps(eps);
            run.validate()?;
            groups.push(run);
        }
    }
    let results: Vec<Result<Vec<Measurement>, ConfigError>> = std::thread::scope(|s| {
        let handles: Vec<_> = groups
            .iter()
            .map(|run| {
                let streams = &streams;
                s.spawn(move || streams.iter().map(|u| measure(run, u)).collect::<Result<Vec<_>, _>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let mut rows = Vec::new();
    for (run, res) in groups.iter().zip(results) {
        let ms = res?;
        let fit = |f: &dyn Fn(&Measurement) -> f64| {
            (cfg.sizes.len() >= 3).then(|| {
                let pts: Vec<(f64, f64)> = cfg.sizes.iter().zip(&ms).map(|(&n, m)| (n as f64, f(m).max(1.0))).collect();
                fit_scaling(&pts)
            })
        };
        let slope = fit(&|m| m.ops.total() as f64);
        let space_slope = fit(&|m| m.max_space as f64);
        for (&size, m) in cfg.sizes.iter().zip(&ms) {
            rows.push(BenchRow {
                query: query_name(cfg.query),
                mode: run.mode.name().to_string(),
                eps: run.eps.unwrap_or(0.5),
                size,
                lookups: m.ops.lookups,
                iterations: m.ops.iterations,
                moves: m.ops.moves,
                total_ops: m.ops.total(),
                max_space: m.max_space,
                final_n: m.n,
                answer: m.answer,
                slope,
                space_slope,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
