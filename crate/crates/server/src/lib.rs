//! HTTP/JSON front end of the game. Every route lives under `/api`; the
//! web client, when configured, is served from `/`.

mod api;
mod config;
mod session;

use std::future::Future;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::{middleware, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use tower_http::services::ServeDir;
use unfun_core::game::RewardConfig;
use unfun_core::records::Origin;
use unfun_store::Store;

pub use api::{LeaderboardEntry, ProfileBody, RatingItem, RatingsRequest, RatingsResponse, TaskBody, UnfunRequest, UnfunResponse};
pub use config::{Config, CorporaSection, ServerSection, ENV_PREFIX};
pub use session::{Session, SESSION_COOKIE, SESSION_HEADER};

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Store(#[from] unfun_store::StoreError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Shared by all handlers.
pub struct AppState {
    pub store: Arc<Store>,
    pub game: RewardConfig,
    pub seed: u64,
    pub leaderboard_size: usize,
    requests: AtomicU64,
}

impl AppState {
    pub fn new(store: Arc<Store>, game: RewardConfig, seed: u64, leaderboard_size: usize) -> Self {
        AppState {
            store,
            game,
            seed,
            leaderboard_size,
            requests: AtomicU64::new(0),
        }
    }

    /// Generator for the next request: the server seed on a fresh stream
    /// per request, so a run with the same seed and request order repeats.
    pub fn next_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.requests.fetch_add(1, Ordering::Relaxed));
        rng
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&std::path::Path>) -> Router {
    let app = api::routes().with_state(state);
    let app = match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    };
    app.layer(middleware::from_fn(session::session_layer))
}

/// Loads the configured corpora into `store`; returns the number of new
/// headlines.
pub fn load_corpora(store: &Store, corpora: &CorporaSection) -> Result<usize, ServerError> {
    let mut inserted = 0;
    for (origin, paths) in [(Origin::Satirical, &corpora.satirical), (Origin::Serious, &corpora.serious)] {
        for path in paths {
            let report = store.import_corpus(path, origin, &corpora.mapping)?;
            for e in &report.errors {
                tracing::warn!(path = %path.display(), line = e.line, "skipped corpus line: {}", e.message);
            }
            inserted += report.inserted;
        }
    }
    Ok(inserted)
}

/// Opens the store, loads corpora and serves until `shutdown` resolves,
/// then checkpoints the database.
pub async fn serve(config: Config, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServerError> {
    config.validate()?;
    let store = Arc::new(Store::open(&config.server.database)?);
    let inserted = load_corpora(&store, &config.corpora)?;
    tracing::info!(inserted, "corpora loaded");
    let listener = tokio::net::TcpListener::bind(config.address()).await?;
    tracing::info!(address = %listener.local_addr()?, "listening");
    let state = Arc::new(AppState::new(
        store.clone(),
        config.game.clone(),
        config.server.seed,
        config.server.leaderboard_size,
    ));
    let app = router(state, config.server.static_dir.as_deref());
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    store.checkpoint()?;
    tracing::info!("store flushed, shutting down");
    Ok(())
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
}
