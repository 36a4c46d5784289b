use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fmc_assist::{serve, SessionConfig};
use tokio::net::TcpListener;

#[derive(Parser)]
#[command(name = "fmc-assist", version, about = "Assisted rocket control server")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    walkers: Option<usize>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/static"))]
    static_dir: PathBuf,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let args = Args::parse();
    let mut config = SessionConfig::default();
    if let Some(a) = args.alpha {
        config.alpha = a;
    }
    if let Some(w) = args.walkers {
        config.walkers = w;
    }
    if let Some(f) = args.fps {
        config.fps = f;
        config.dt = 1.0 / f;
    }
    if let Err(e) = config.validate() {
        eprintln!("fmc-assist: {e}");
        return ExitCode::from(2);
    }
    let listener = match TcpListener::bind((args.host.as_str(), args.port)).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("fmc-assist: bind {}:{}: {e}", args.host, args.port);
            return ExitCode::from(1);
        }
    };
    tracing::info!("listening on http://{}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match serve(listener, config, &args.static_dir, shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fmc-assist: {e}");
            ExitCode::from(1)
        }
    }
}
