use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;
use guidemap_service::{router, spawn_reaper, AppState, ServiceConfig};
use tracing_subscriber::EnvFilter;

/// Serve the interactive segmentation session API.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// SLIC superpixel count per uploaded image.
    #[arg(long, default_value_t = 1000)]
    k: usize,
    #[arg(long)]
    max_proposals: Option<usize>,
    /// Upload size limit in bytes.
    #[arg(long, default_value_t = 16 * 1024 * 1024)]
    max_bytes: usize,
    /// Idle session lifetime in seconds.
    #[arg(long, default_value_t = 1800)]
    idle_timeout: u64,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")),
        )
        .init();
    let args = Args::parse();
    let state = Arc::new(AppState::new(ServiceConfig {
        k: args.k,
        max_proposals: args.max_proposals,
        max_bytes: args.max_bytes,
        idle_timeout: Duration::from_secs(args.idle_timeout),
    }));
    spawn_reaper(Arc::clone(&state));
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    tracing::info!(addr = %args.addr, "listening");
    axum::serve(listener, router(state)).await?;
    Ok(())
}
