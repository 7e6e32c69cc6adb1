use clap::Parser;
use dissim_cli::{run, RunConfig, EXIT_OK, EXIT_USAGE};

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DISSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DISSIM_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = e.print();
            } else {
                let body = serde_json::json!({"error": {"kind": "usage", "message": e.to_string()}});
                eprintln!("{body}");
            }
            std::process::exit(code);
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("{}", serde_json::json!({"error": {"kind": "usage", "message": msg}}));
        std::process::exit(EXIT_USAGE);
    }
    std::process::exit(run(&config));
}
