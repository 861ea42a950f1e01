use std::path::PathBuf;

use clap::ValueEnum;
use ivme_core::oracle::QuerySpec;
use ivme_core::{EnumState, Engine, EpsConfig, LwState, Path4State, RefinedState, SelfJoinState, TriangleState};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Mode {
    /// Heavy/light partitioning with threshold N^ε.
    IvmEps,
    /// ε ∈ {0, 1}: no auxiliary views are ever populated.
    Classic,
    /// Triangle with a per-relation ε triple.
    Factorized,
    /// Triangle with relations partitioned on both columns.
    Refined,
    /// Triangle listing with constant-delay enumeration.
    Enum,
    /// One-shot count of the final database.
    Static,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::IvmEps => "ivm-eps",
            Mode::Classic => "classic",
            Mode::Factorized => "factorized",
            Mode::Refined => "refined",
            Mode::Enum => "enum",
            Mode::Static => "static",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Final,
    PerStep,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown query `{0}` (expected triangle, triangle-selfjoin, path4 or lw:<n>)")]
    Query(String),
    #[error("{0}")]
    Invalid(String),
}

pub fn parse_query(s: &str) -> Result<QuerySpec, ConfigError> {
    match s {
        "triangle" => Ok(QuerySpec::Triangle),
        "triangle-selfjoin" => Ok(QuerySpec::TriangleSelfJoin),
        "path4" => Ok(QuerySpec::Path4),
        _ => match s.strip_prefix("lw:").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 3 => Ok(QuerySpec::Lw(n)),
            _ => Err(ConfigError::Query(s.to_string())),
        },
    }
}

pub fn query_name(spec: QuerySpec) -> String {
    match spec {
        QuerySpec::Triangle => "triangle".into(),
        QuerySpec::TriangleSelfJoin => "triangle-selfjoin".into(),
        QuerySpec::Path4 => "path4".into(),
        QuerySpec::Lw(n) => format!("lw:{n}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub query: QuerySpec,
    pub mode: Mode,
    pub eps: Option<f64>,
    pub eps_rst: Option<[f64; 3]>,
    /// `None` means a generated stream.
    pub stream: Option<PathBuf>,
    pub verify: bool,
    pub metrics: Option<PathBuf>,
    pub seed: u64,
    pub emit: Emit,
}

impl RunConfig {
    pub fn new(query: QuerySpec, mode: Mode) -> Self {
        RunConfig {
            query,
            mode,
            eps: None,
            eps_rst: None,
            stream: None,
            verify: false,
            metrics: None,
            seed: 0,
            emit: Emit::Final,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    fn invalid(msg: impl Into<String>) -> ConfigError {
        ConfigError::Invalid(msg.into())
    }

    /// Uniform ε for the configured mode, after validation.
    pub fn epsilon(&self) -> Result<f64, ConfigError> {
        let eps = match (self.mode, self.eps) {
            (Mode::Classic, None) => return Err(Self::invalid("classic mode requires --epsilon 0 or 1")),
            (Mode::Classic, Some(e)) if e != 0.0 && e != 1.0 => {
                return Err(Self::invalid(format!("classic mode requires epsilon 0 or 1, got {e}")))
            }
            (_, Some(e)) => e,
            (_, None) => 0.5,
        };
        if !(0.0..=1.0).contains(&eps) {
            return Err(Self::invalid(format!("epsilon {eps} outside [0, 1]")));
        }
        Ok(eps)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let triangle_only = matches!(self.mode, Mode::Factorized | Mode::Refined | Mode::Enum | Mode::Static);
        if triangle_only && self.query != QuerySpec::Triangle {
            return Err(Self::invalid(format!("mode {} only supports the triangle query", self.mode.name())));
        }
        if self.eps.is_some() && self.eps_rst.is_some() {
            return Err(Self::invalid("--epsilon and --epsilon-rst are exclusive"));
        }
        match self.mode {
            Mode::Factorized => {
                let [r, s, t] = self.eps_rst.ok_or_else(|| Self::invalid("factorized mode requires --epsilon-rst"))?;
                EpsConfig::factorized(r, s, t).map_err(|e| Self::invalid(e.to_string()))?;
            }
            Mode::IvmEps if self.eps_rst.is_some() => {
                if self.query != QuerySpec::Triangle {
                    return Err(Self::invalid("--epsilon-rst only applies to the triangle query"));
                }
                let [r, s, t] = self.eps_rst.unwrap();
                EpsConfig::new(r, s, t).map_err(|e| Self::invalid(e.to_string()))?;
            }
            _ if self.eps_rst.is_some() => {
                return Err(Self::invalid("--epsilon-rst only applies to the ivm-eps and factorized modes"));
            }
            _ => {}
        }
        if self.eps_rst.is_none() {
            self.epsilon()?;
        }
        Ok(())
    }

    fn eps_config(&self) -> Result<EpsConfig, ConfigError> {
        let cfg = match (self.mode, self.eps_rst) {
            (Mode::Factorized, Some([r, s, t])) => EpsConfig::factorized(r, s, t),
            (_, Some([r, s, t])) => EpsConfig::new(r, s, t),
            _ => EpsConfig::uniform(self.epsilon()?),
        };
        cfg.map_err(|e| Self::invalid(e.to_string()))
    }

    /// Builds the maintenance engine. `Static` and `Enum` have dedicated
    /// paths in the run driver and are rejected here.
    pub fn build_engine(&self) -> Result<Box<dyn Engine>, ConfigError> {
        self.validate()?;
        let err = |e: ivme_core::EngineError| Self::invalid(e.to_string());
        Ok(match (self.mode, self.query) {
            (Mode::Static | Mode::Enum, _) => {
                return Err(Self::invalid(format!("mode {} has no incremental count engine", self.mode.name())))
            }
            (Mode::Refined, _) => Box::new(RefinedState::new(self.epsilon()?).map_err(err)?),
            (_, QuerySpec::Triangle) => Box::new(TriangleState::new(self.eps_config()?)),
            (_, QuerySpec::TriangleSelfJoin) => Box::new(SelfJoinState::new(self.epsilon()?).map_err(err)?),
            (_, QuerySpec::Path4) => Box::new(Path4State::new(self.epsilon()?).map_err(err)?),
            (_, QuerySpec::Lw(n)) => Box::new(LwState::new(n, self.epsilon()?).map_err(err)?),
        })
    }

    pub fn build_enum(&self) -> Result<EnumState, ConfigError> {
        self.validate()?;
        EnumState::new(self.epsilon()?).map_err(|e| Self::invalid(e.to_string()))
    }
}
