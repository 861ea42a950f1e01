use std::fs::File;
use std::io::{self, Read, Write};

use ivme_core::metrics::record;
use ivme_core::oracle::{brute_force_count, brute_force_enumerate};
use ivme_core::triangle::static_count_with_ops;
use ivme_core::{EnumState, Engine, OpCounts, Relation, StepRecord, Tuple};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, Emit, Mode, RunConfig};
use crate::gen::{mixed_stream, Workload};
use crate::stream::{format_update, parse_stream, ParseError, Update};

/// Domain of generated streams when no `--stream` is given.
pub const GEN_DOMAIN: i64 = 24;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("verification failed at step {step}: {msg}")]
    Verify { step: usize, msg: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("stream: {0}")]
    Parse(#[from] ParseError),
    #[error("metrics: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Verify { .. } => 1,
            RunError::Config(_) => 2,
            RunError::Io(_) | RunError::Parse(_) | RunError::Csv(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpsJson {
    pub lookups: u64,
    pub iterations: u64,
    pub moves: u64,
    pub total: u64,
}

impl From<OpCounts> for OpsJson {
    fn from(c: OpCounts) -> Self {
        OpsJson { lookups: c.lookups, iterations: c.iterations, moves: c.moves, total: c.total() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rebalances {
    pub major: u64,
    pub minor: u64,
}

/// One output line. Counters are cumulative over the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub step: usize,
    pub answer: i64,
    #[serde(rename = "N")]
    pub n: u64,
    pub db_size: usize,
    pub ops: OpsJson,
    pub rebalances: Rebalances,
    pub space: usize,
}

#[derive(Serialize)]
struct MetricRow<'a> {
    step: usize,
    update: &'a str,
    lookups: u64,
    iterations: u64,
    moves: u64,
    total: u64,
    n: u64,
    db_size: usize,
    major: bool,
    minor: u64,
    space: usize,
}

impl<'a> From<&'a StepRecord> for MetricRow<'a> {
    fn from(r: &'a StepRecord) -> Self {
        MetricRow {
            step: r.step,
            update: &r.update,
            lookups: r.ops.lookups,
            iterations: r.ops.iterations,
            moves: r.ops.moves,
            total: r.ops.total(),
            n: r.n,
            db_size: r.db_size,
            major: r.major_fired,
            minor: r.minor_fired,
            space: r.space,
        }
    }
}

/// Reads the configured stream, or generates a mixed stream of `length`
/// updates from the seed when none is given.
pub fn load_stream(cfg: &RunConfig, length: usize) -> Result<Vec<Update>, RunError> {
    let text = match cfg.stream.as_deref() {
        None => return Ok(mixed_stream(cfg.query, Workload::Zipf, length, GEN_DOMAIN, cfg.seed)),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
        Some(p) => std::fs::read_to_string(p)?,
    };
    Ok(parse_stream(&text, cfg.query)?)
}

fn to_record<E: Engine + ?Sized>(eng: &E, step: usize) -> Record {
    let c = eng.counters().snapshot();
    Record {
        step,
        answer: eng.answer(),
        n: eng.threshold_base(),
        db_size: eng.db_size(),
        ops: c.into(),
        rebalances: Rebalances { major: c.rebalance_major, minor: c.rebalance_minor },
        space: eng.space(),
    }
}

fn emit_json(out: &mut dyn Write, rec: &Record) -> Result<(), RunError> {
    serde_json::to_writer(&mut *out, rec).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

type Extra<'a, E> = &'a dyn Fn(&E, &[Relation]) -> Option<String>;

fn drive<E: Engine + ?Sized>(
    eng: &mut E,
    cfg: &RunConfig,
    updates: &[Update],
    out: &mut dyn Write,
    extra: Extra<'_, E>,
) -> Result<Record, RunError> {
    let mut metrics = cfg.metrics.as_ref().map(|p| File::create(p).map(csv::Writer::from_writer)).transpose()?;
    let mut db: Vec<Relation> = cfg.query.arities().into_iter().map(Relation::new).collect();
    let mut last = to_record(eng, 0);
    for (k, u) in updates.iter().enumerate() {
        let step = k + 1;
        let before = eng.counters().snapshot();
        eng.on_update(u.rel, &u.tuple, u.mult);
        if let Some(w) = metrics.as_mut() {
            let rec = record(eng, before, step, format_update(cfg.query, u));
            w.serialize(MetricRow::from(&rec))?;
        }
        if cfg.verify {
            db[u.rel].update(&u.tuple, u.mult);
            let want = brute_force_count(&db, cfg.query);
            if want != eng.answer() {
                return Err(RunError::Verify { step, msg: format!("answer {} but brute force gives {want}", eng.answer()) });
            }
            if let Some(msg) = extra(eng, &db) {
                return Err(RunError::Verify { step, msg });
            }
        }
        last = to_record(eng, step);
        if cfg.emit == Emit::PerStep {
            emit_json(out, &last)?;
        }
    }
    if let Some(mut w) = metrics {
        w.flush()?;
    }
    if cfg.emit == Emit::Final {
        emit_json(out, &last)?;
    }
    Ok(last)
}

fn check_enumeration(st: &EnumState, db: &[Relation]) -> Option<String> {
    let db: &[Relation; 3] = db.try_into().ok()?;
    let mut got: Vec<(Tuple, i64)> = st.enumerate().collect();
    got.sort();
    let want = brute_force_enumerate(db);
    (got != want).then(|| format!("enumerated {} tuples, brute force lists {}", got.len(), want.len()))
}

fn run_static(cfg: &RunConfig, updates: &[Update], out: &mut dyn Write) -> Result<Record, RunError> {
    let mut db = [Relation::new(2), Relation::new(2), Relation::new(2)];
    for u in updates {
        db[u.rel].update(&u.tuple, u.mult);
    }
    let (answer, ops) = static_count_with_ops(&db).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if cfg.verify {
        let want = brute_force_count(&db, cfg.query);
        if want != answer {
            return Err(RunError::Verify { step: updates.len(), msg: format!("answer {answer} but brute force gives {want}") });
        }
    }
    let size: usize = db.iter().map(Relation::len).sum();
    let rec = Record {
        step: updates.len(),
        answer,
        n: size.max(1) as u64,
        db_size: size,
        ops: ops.into(),
        rebalances: Rebalances { major: 0, minor: 0 },
        space: size,
    };
    emit_json(out, &rec)?;
    Ok(rec)
}

/// Runs `updates` through the configured engine, writing JSON lines to `out`.
/// Returns the last record.
pub fn run(cfg: &RunConfig, updates: &[Update], out: &mut dyn Write) -> Result<Record, RunError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Static => run_static(cfg, updates, out),
        Mode::Enum => {
            let mut st = cfg.build_enum()?;
            drive(&mut st, cfg, updates, out, &check_enumeration)
        }
        _ => {
            let mut eng = cfg.build_engine()?;
            drive(eng.as_mut(), cfg, updates, out, &|_, _| None)
        }
    }
}
