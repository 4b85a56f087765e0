use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;

use sonowork_service::{router, AppState, Store};

#[derive(Debug, Parser)]
#[command(name = "sonowork-server", version, about = "HTTP service of the sonowork sonification workbench")]
struct Args {
    /// Port to listen on.
    #[arg(long, env = "SONOWORK_PORT", default_value_t = 8080)]
    port: u16,
    /// Directory holding stored datasets and sessions.
    #[arg(long, env = "SONOWORK_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    /// Built web UI bundle to serve at `/`.
    #[arg(long, env = "SONOWORK_WEB_DIR")]
    web_dir: Option<PathBuf>,
    /// Address to bind.
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();
    let store = Store::open(&args.data_dir)
        .with_context(|| format!("opening data directory {}", args.data_dir.display()))?;
    let app = router(AppState::new(store), args.web_dir);
    let addr = SocketAddr::new(args.host, args.port);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on http://{addr}");
    axum::serve(listener, app).await?;
    Ok(())
}
