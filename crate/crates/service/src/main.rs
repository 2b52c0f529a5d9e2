use clap::Parser;
use pvg_service::{router, AppState};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "pvg-serve", version, about = "HTTP render service for Poisson vector graphics")]
struct Args {
    #[arg(long, env = "PVG_PORT", default_value_t = 8080)]
    port: u16,
    /// Bind address
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Directory holding one `<id>.pvg.json` per session
    #[arg(long, env = "PVG_DATA_DIR", default_value = "pvg-sessions")]
    data_dir: PathBuf,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let state = AppState::new(&args.data_dir)?;
    let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
    log::info!("listening on {} (sessions in {})", listener.local_addr()?, args.data_dir.display());
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
