//! JSON-over-HTTP front end for the meter, plus profile storage.

pub mod api;
pub mod config;
pub mod error;
pub mod store;

use std::sync::Arc;
use std::time::Duration;

pub use api::{router, AppState};
pub use config::{ServiceConfig, WordlistSpec};
pub use error::{ApiError, ApiErrorCode};
pub use store::{FileStore, MemoryStore, ProfileRecord, ProfileStore, StoreError};

const SWEEP_EVERY: Duration = Duration::from_secs(60);

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] sqmeter_core::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}")]
    Bind {
        addr: std::net::SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Builds the shared state for a config: engine plus the configured store.
pub fn state_for(config: &ServiceConfig) -> Result<AppState, ServeError> {
    let engine = config.engine()?;
    let store: Arc<dyn ProfileStore> = match &config.store {
        Some(path) => Arc::new(FileStore::open(path)?),
        None => Arc::new(MemoryStore::new()),
    };
    Ok(AppState::new(engine, store, config.threshold))
}

/// Serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    let state = state_for(&config)?;
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })?;
    tracing::info!(addr = %listener.local_addr()?, "listening");

    let sweeper = {
        let state = state.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(SWEEP_EVERY);
            loop {
                tick.tick().await;
                let n = state.sweep().await;
                if n > 0 {
                    tracing::debug!(removed = n, "swept sessions");
                }
            }
        })
    };

    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        })
        .await?;
    sweeper.abort();
    Ok(())
}
