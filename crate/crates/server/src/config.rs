use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unfun_core::game::RewardConfig;
use unfun_store::FieldMap;

use crate::ServerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerSection {
    pub bind: IpAddr,
    pub port: u16,
    pub database: PathBuf,
    /// Seeds the per-request task sampler.
    pub seed: u64,
    /// Directory served at `/`, typically the built web client.
    pub static_dir: Option<PathBuf>,
    pub leaderboard_size: usize,
}

impl Default for ServerSection {
    fn default() -> Self {
        ServerSection {
            bind: IpAddr::from([127, 0, 0, 1]),
            port: 8080,
            database: PathBuf::from("unfun.db"),
            seed: 2019,
            static_dir: None,
            leaderboard_size: 20,
        }
    }
}

/// Corpus files loaded at startup. Loading is idempotent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorporaSection {
    pub satirical: Vec<PathBuf>,
    pub serious: Vec<PathBuf>,
    pub mapping: FieldMap,
}

/// The service configuration file, shared with the command-line tool.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub server: ServerSection,
    pub game: RewardConfig,
    pub corpora: CorporaSection,
}

pub const ENV_PREFIX: &str = "UNFUN_";

fn env_value<T: std::str::FromStr>(
    lookup: &impl Fn(&str) -> Option<String>,
    name: &str,
) -> Result<Option<T>, ServerError> {
    let key = format!("{ENV_PREFIX}{name}");
    lookup(&key)
        .map(|v| {
            v.parse()
                .map_err(|_| ServerError::Config(format!("cannot parse {key}={v}")))
        })
        .transpose()
}

impl Config {
    /// Reads the file, applies `UNFUN_*` environment overrides and checks
    /// the result.
    pub fn load(path: &Path) -> Result<Self, ServerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServerError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        config.apply_env(|k| std::env::var(k).ok())?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self, ServerError> {
        toml::from_str(text).map_err(|e| ServerError::Config(e.to_string()))
    }

    /// Overrides from `UNFUN_BIND`, `UNFUN_PORT`, `UNFUN_DATABASE`,
    /// `UNFUN_SEED`, `UNFUN_STATIC_DIR`, `UNFUN_ALPHA` and `UNFUN_EPSILON`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ServerError> {
        if let Some(v) = env_value(&lookup, "BIND")? {
            self.server.bind = v;
        }
        if let Some(v) = env_value(&lookup, "PORT")? {
            self.server.port = v;
        }
        if let Some(v) = env_value::<PathBuf>(&lookup, "DATABASE")? {
            self.server.database = v;
        }
        if let Some(v) = env_value(&lookup, "SEED")? {
            self.server.seed = v;
        }
        if let Some(v) = env_value::<PathBuf>(&lookup, "STATIC_DIR")? {
            self.server.static_dir = Some(v);
        }
        if let Some(v) = env_value(&lookup, "ALPHA")? {
            self.game.alpha = v;
        }
        if let Some(v) = env_value(&lookup, "EPSILON")? {
            self.game.epsilon = v;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ServerError> {
        self.game.validate().map_err(|e| ServerError::Config(e.to_string()))
    }

    pub fn address(&self) -> SocketAddr {
        SocketAddr::new(self.server.bind, self.server.port)
    }
}
